//! Sublevel-set persistence (H0) of a function sampled on a path graph.
//!
//! Vertices are processed in increasing value order. A vertex with no live
//! neighbor starts a component (a local minimum, a birth); a vertex joining
//! two live components is a merge where the younger component dies (elder
//! rule). The component of the global minimum never dies.

use crate::diagram::{PersistenceDiagram, PersistencePoint};

use super::SampledFunction;

/// H0 diagram of the sublevel filtration of the piecewise-linear
/// interpolation. Zero-persistence points are discarded; the global
/// minimum's class has death = +inf.
pub fn sublevel_persistence(f: &SampledFunction) -> PersistenceDiagram {
    let values = f.values();
    let n = values.len();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

    // Union-find where each root remembers its component's birth
    // (value, index); smaller birth = elder.
    let mut parent: Vec<usize> = (0..n).collect();
    let birth: Vec<(f64, usize)> = (0..n).map(|i| (values[i], i)).collect();
    let mut alive = vec![false; n];

    fn find(parent: &mut [usize], mut node: usize) -> usize {
        while parent[node] != node {
            parent[node] = parent[parent[node]];
            node = parent[node];
        }
        node
    }

    let mut points = Vec::new();
    for &i in &order {
        alive[i] = true;
        for j in [i.wrapping_sub(1), i + 1] {
            if j >= n || !alive[j] {
                continue;
            }
            let ri = find(&mut parent, i);
            let rj = find(&mut parent, j);
            if ri == rj {
                continue;
            }
            let (elder, younger) = if birth[ri] <= birth[rj] {
                (ri, rj)
            } else {
                (rj, ri)
            };
            let young_birth = birth[younger].0;
            if values[i] > young_birth {
                points.push(PersistencePoint {
                    birth: young_birth,
                    death: values[i],
                });
            }
            parent[younger] = elder;
        }
    }

    for v in 0..n {
        if find(&mut parent, v) == v {
            points.push(PersistencePoint {
                birth: birth[v].0,
                death: f64::INFINITY,
            });
        }
    }
    points.sort_by(|a, b| {
        a.birth
            .total_cmp(&b.birth)
            .then(a.death.total_cmp(&b.death))
    });
    PersistenceDiagram::new(points, 0)
}

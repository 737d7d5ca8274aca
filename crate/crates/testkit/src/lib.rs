//! Brute-force oracles and data generators backing the property and
//! acceptance test suites.
//!
//! Everything here recomputes its answers from first principles and never
//! calls the pipeline code paths it is used to check: H0 deaths come from a
//! Prim minimum spanning tree, H1 diagrams from persistent Betti numbers
//! obtained by GF(2) rank computations of boundary matrices at every
//! filtration value.

use std::collections::HashSet;

use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::Rng;

use persistence_fisher::diagram::PersistenceDiagram;
use persistence_fisher::homology::PointCloud;

/// Minimum-spanning-tree edge values (half the Euclidean distances, the
/// Rips edge convention) via Prim's algorithm on the complete graph.
pub fn mst_edge_values(cloud: &PointCloud) -> Vec<f64> {
    let n = cloud.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    in_tree[0] = true;
    for j in 1..n {
        best[j] = cloud.distance(0, j) * 0.5;
    }
    let mut values = Vec::with_capacity(n.saturating_sub(1));
    for _ in 1..n {
        let next = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .expect("a vertex remains");
        values.push(best[next]);
        in_tree[next] = true;
        for v in 0..n {
            if !in_tree[v] {
                let d = cloud.distance(next, v) * 0.5;
                if d < best[v] {
                    best[v] = d;
                }
            }
        }
    }
    values.sort_by(f64::total_cmp);
    values
}

struct RipsSkeleton {
    edge_values: Vec<f64>,
    /// Triangle boundary columns as bitmasks over edge indices, with the
    /// triangle's filtration value.
    triangles: Vec<(f64, u64)>,
    vertex_count: usize,
    edge_endpoints: Vec<(usize, usize)>,
}

fn skeleton(cloud: &PointCloud, max_scale: f64) -> RipsSkeleton {
    let n = cloud.len();
    let mut edge_values = Vec::new();
    let mut edge_endpoints = Vec::new();
    let mut edge_index = std::collections::HashMap::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = cloud.distance(i, j) * 0.5;
            if v <= max_scale {
                edge_index.insert((i, j), edge_values.len());
                edge_values.push(v);
                edge_endpoints.push((i, j));
            }
        }
    }
    assert!(edge_values.len() <= 64, "oracle supports at most 64 edges");
    let mut triangles = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let (Some(&e1), Some(&e2), Some(&e3)) = (
                    edge_index.get(&(i, j)),
                    edge_index.get(&(i, k)),
                    edge_index.get(&(j, k)),
                ) else {
                    continue;
                };
                let value = edge_values[e1].max(edge_values[e2]).max(edge_values[e3]);
                triangles.push((value, (1u64 << e1) | (1u64 << e2) | (1u64 << e3)));
            }
        }
    }
    RipsSkeleton {
        edge_values,
        triangles,
        vertex_count: n,
        edge_endpoints,
    }
}

fn gf2_rank(columns: impl Iterator<Item = u64>) -> usize {
    let mut pivots = [0u64; 64];
    let mut rank = 0;
    for mut col in columns {
        while col != 0 {
            let high = 63 - col.leading_zeros() as usize;
            if pivots[high] == 0 {
                pivots[high] = col;
                rank += 1;
                break;
            }
            col ^= pivots[high];
        }
    }
    rank
}

fn component_count(skeleton: &RipsSkeleton, edges_in: u64) -> usize {
    let n = skeleton.vertex_count;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for (e, &(a, b)) in skeleton.edge_endpoints.iter().enumerate() {
        if edges_in & (1 << e) != 0 {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
    }
    (0..n).filter(|&v| find(&mut parent, v) == v).count()
}

/// dim H1(K_b -> K_a) for filtration values b <= a, from boundary-matrix
/// ranks: cycles alive at b minus those already bounded in K_a.
fn persistent_betti_1(skeleton: &RipsSkeleton, b: f64, a: f64) -> isize {
    let edges_b: u64 = skeleton
        .edge_values
        .iter()
        .enumerate()
        .filter(|&(_, v)| *v <= b)
        .fold(0u64, |acc, (e, _)| acc | (1 << e));
    let edge_count_b = edges_b.count_ones() as isize;
    let rank_d1_b = skeleton.vertex_count as isize - component_count(skeleton, edges_b) as isize;
    let z1_b = edge_count_b - rank_d1_b;

    let tri_cols = || {
        skeleton
            .triangles
            .iter()
            .filter(move |(v, _)| *v <= a)
            .map(|&(_, mask)| mask)
    };
    let rank_full = gf2_rank(tri_cols()) as isize;
    // Columns projected onto edges outside K_b: the boundaries lying inside
    // K_b are exactly the kernel of that projection.
    let rank_outside = gf2_rank(tri_cols().map(|mask| mask & !edges_b)) as isize;
    let boundaries_in_b = rank_full - rank_outside;
    z1_b - boundaries_in_b
}

/// H1 persistence diagram from the rank invariant: the multiplicity of each
/// (birth, death) box follows by inclusion-exclusion over consecutive
/// critical values; classes alive at `max_scale` are essential.
pub fn h1_diagram_by_rank(cloud: &PointCloud, max_scale: f64) -> Vec<(f64, f64)> {
    let skeleton = skeleton(cloud, max_scale);
    let mut critical: Vec<f64> = skeleton
        .edge_values
        .iter()
        .copied()
        .chain(skeleton.triangles.iter().map(|&(v, _)| v))
        .collect();
    critical.sort_by(f64::total_cmp);
    critical.dedup_by(|a, b| a.to_bits() == b.to_bits());
    let k = critical.len();

    let beta = |bi: isize, ai: isize| -> isize {
        if bi < 0 {
            return 0;
        }
        persistent_betti_1(&skeleton, critical[bi as usize], critical[ai as usize])
    };

    let mut pairs = Vec::new();
    for i in 0..k as isize {
        for j in (i + 1)..k as isize {
            let mult = beta(i, j - 1) - beta(i, j) - beta(i - 1, j - 1) + beta(i - 1, j);
            for _ in 0..mult {
                pairs.push((critical[i as usize], critical[j as usize]));
            }
        }
        let essential = beta(i, k as isize - 1) - beta(i - 1, k as isize - 1);
        for _ in 0..essential {
            pairs.push((critical[i as usize], f64::INFINITY));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pairs
}

/// Uniform random cloud in the unit box.
pub fn random_cloud(rng: &mut StdRng, n: usize, dim: usize) -> PointCloud {
    let points = (0..n)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect();
    PointCloud::new(points).expect("random cloud is valid")
}

/// Random diagram with 1..=max_points points, births in `[0, span)` and
/// positive persistence up to `span`.
pub fn random_diagram(rng: &mut StdRng, max_points: usize, span: f64) -> PersistenceDiagram {
    let n = rng.random_range(1..=max_points);
    let pairs: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let birth = rng.random_range(0.0..span);
            (birth, birth + rng.random_range(span * 1e-3..span))
        })
        .collect();
    PersistenceDiagram::from_pairs(&pairs, 1).expect("random diagram is valid")
}

/// Zero-sum coefficient vector for conditional-negative-definiteness checks.
pub fn random_zero_sum(rng: &mut StdRng, n: usize) -> Vec<f64> {
    let mut c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = c.iter().sum::<f64>() / n as f64;
    for v in &mut c {
        *v -= mean;
    }
    c
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn eigen_range(m: &DMatrix<f64>) -> (f64, f64) {
    let eigenvalues = m.clone().symmetric_eigen().eigenvalues;
    (
        eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min),
        eigenvalues
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max),
    )
}

/// Sorted finite (birth, death) pairs and essential births of a diagram.
pub fn split_diagram(dg: &PersistenceDiagram) -> (Vec<(f64, f64)>, Vec<f64>) {
    let mut finite = Vec::new();
    let mut essential = Vec::new();
    for p in dg.points() {
        if p.is_essential() {
            essential.push(p.birth);
        } else {
            finite.push((p.birth, p.death));
        }
    }
    finite.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    essential.sort_by(f64::total_cmp);
    (finite, essential)
}

/// Deduplicated count helper used by collision-style assertions.
pub fn distinct_f64(values: impl Iterator<Item = f64>) -> usize {
    values.map(f64::to_bits).collect::<HashSet<_>>().len()
}

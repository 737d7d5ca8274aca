//! Vietoris–Rips persistence on the 2-skeleton.
//!
//! H0 runs union-find over edges in filtration order; H1 runs the standard
//! column reduction of the triangle boundary matrix over Z/2. Simultaneous
//! filtration values are ordered by (value, dimension, lexicographic simplex
//! index); the output diagram does not depend on that tie-break.

use std::collections::HashMap;

use crate::diagram::{PersistenceDiagram, PersistencePoint};
use crate::error::{Error, Result};

use super::{FilteredEdge, PointCloud};

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut node: usize) -> usize {
        while self.parent[node] != node {
            self.parent[node] = self.parent[self.parent[node]];
            node = self.parent[node];
        }
        node
    }

    /// Returns true if the two nodes were in different components.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let mut ra = self.find(a);
        let mut rb = self.find(b);
        if ra == rb {
            return false;
        }
        if self.rank[ra] < self.rank[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        if self.rank[ra] == self.rank[rb] {
            self.rank[ra] += 1;
        }
        true
    }
}

/// Symmetric difference of two ascending index lists (column addition over
/// Z/2), written into `out`.
fn symmetric_difference(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

fn sorted_edges(cloud: &PointCloud, max_scale: f64) -> Vec<FilteredEdge> {
    let n = cloud.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let value = cloud.distance(i, j) * 0.5;
            if value <= max_scale {
                edges.push(FilteredEdge {
                    endpoints: (i, j),
                    value,
                });
            }
        }
    }
    edges.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then(a.endpoints.cmp(&b.endpoints))
    });
    edges
}

/// Persistence diagrams of the Rips filtration, one per homology dimension
/// `0..=max_dim`. Essential classes are reported with death = +inf; points
/// with zero persistence are discarded.
pub fn rips_persistence(
    cloud: &PointCloud,
    max_dim: usize,
    max_scale: f64,
) -> Result<Vec<PersistenceDiagram>> {
    if max_dim > 1 {
        return Err(Error::UnsupportedDimension(max_dim));
    }
    if !(max_scale > 0.0) {
        return Err(Error::InvalidParameter(
            "max_scale must be positive".to_string(),
        ));
    }

    let n = cloud.len();
    let edges = sorted_edges(cloud, max_scale);

    // H0: union-find over edges in filtration order. Every point is born at
    // 0; an edge that merges two components kills one of them.
    let mut uf = UnionFind::new(n);
    let mut h0_points = Vec::new();
    // Edges that do not merge components create 1-cycles.
    let mut positive_edge = vec![false; edges.len()];
    for (rank, e) in edges.iter().enumerate() {
        if uf.union(e.endpoints.0, e.endpoints.1) {
            if e.value > 0.0 {
                h0_points.push(PersistencePoint {
                    birth: 0.0,
                    death: e.value,
                });
            }
        } else {
            positive_edge[rank] = true;
        }
    }
    let mut component_count = 0;
    for v in 0..n {
        if uf.find(v) == v {
            component_count += 1;
        }
    }
    for _ in 0..component_count {
        h0_points.push(PersistencePoint {
            birth: 0.0,
            death: f64::INFINITY,
        });
    }
    let mut diagrams = vec![PersistenceDiagram::new(h0_points, 0)];

    if max_dim == 1 {
        diagrams.push(rips_h1(cloud, max_scale, &edges, &positive_edge));
    }
    Ok(diagrams)
}

fn rips_h1(
    cloud: &PointCloud,
    max_scale: f64,
    edges: &[FilteredEdge],
    positive_edge: &[bool],
) -> PersistenceDiagram {
    let edge_rank: HashMap<(usize, usize), u32> = edges
        .iter()
        .enumerate()
        .map(|(rank, e)| (e.endpoints, rank as u32))
        .collect();

    // Triangles of the 2-skeleton: all three edges must be present at
    // max_scale; the triangle value is the max of its edge values.
    let n = cloud.len();
    let mut triangles: Vec<(f64, (usize, usize, usize))> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let dij = cloud.distance(i, j) * 0.5;
            if dij > max_scale {
                continue;
            }
            for k in (j + 1)..n {
                let dik = cloud.distance(i, k) * 0.5;
                if dik > max_scale {
                    continue;
                }
                let djk = cloud.distance(j, k) * 0.5;
                if djk > max_scale {
                    continue;
                }
                triangles.push((dij.max(dik).max(djk), (i, j, k)));
            }
        }
    }
    triangles.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    // Standard column reduction over Z/2. Columns hold edge ranks; the
    // pivot (low) of a reduced triangle column pairs that edge's cycle
    // with this triangle.
    let mut pivot: Vec<Option<u32>> = vec![None; edges.len()];
    let mut reduced_columns: Vec<Vec<u32>> = Vec::new();
    let mut h1_points = Vec::new();
    let mut column: Vec<u32> = Vec::new();
    let mut scratch: Vec<u32> = Vec::new();
    for &(value, (i, j, k)) in &triangles {
        column.clear();
        column.extend_from_slice(&[edge_rank[&(i, j)], edge_rank[&(i, k)], edge_rank[&(j, k)]]);
        column.sort_unstable();
        loop {
            let Some(&low) = column.last() else {
                break; // positive triangle: creates a 2-cycle, irrelevant for H1
            };
            match pivot[low as usize] {
                Some(stored) => {
                    symmetric_difference(&column, &reduced_columns[stored as usize], &mut scratch);
                    std::mem::swap(&mut column, &mut scratch);
                }
                None => {
                    let birth = edges[low as usize].value;
                    if value > birth {
                        h1_points.push(PersistencePoint {
                            birth,
                            death: value,
                        });
                    }
                    pivot[low as usize] = Some(reduced_columns.len() as u32);
                    reduced_columns.push(column.clone());
                    break;
                }
            }
        }
    }

    // Cycle-creating edges never paired with a triangle are essential.
    for (rank, e) in edges.iter().enumerate() {
        if positive_edge[rank] && pivot[rank].is_none() {
            h1_points.push(PersistencePoint {
                birth: e.value,
                death: f64::INFINITY,
            });
        }
    }
    h1_points.sort_by(|a, b| {
        a.birth
            .total_cmp(&b.birth)
            .then(a.death.total_cmp(&b.death))
    });
    PersistenceDiagram::new(h1_points, 1)
}

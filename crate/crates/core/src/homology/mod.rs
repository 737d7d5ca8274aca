//! Persistence diagram computation from point clouds (Vietoris–Rips, H0 and
//! H1) and from sampled 1-D functions (sublevel sets, H0).
//!
//! Filtration convention: an edge `{x, z}` enters the Rips complex at
//! parameter `a = d(x, z) / 2`, i.e. when `d(x, z) <= 2a`. Many tools use
//! `a = d` instead; diagrams computed here are scaled by 1/2 relative to
//! those.

mod rips;
mod sublevel;

pub use rips::rips_persistence;
pub use sublevel::sublevel_persistence;

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// A finite set of points in d-dimensional Euclidean space.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
}

impl PointCloud {
    /// Validates that the cloud is non-empty, all points share one dimension
    /// `d >= 1`, and every coordinate is finite.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput("point cloud"));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::EmptyInput("point coordinates"));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(
                    "point cloud coordinates must be finite".to_string(),
                ));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// Euclidean distance between points `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.points[i]
            .iter()
            .zip(&self.points[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// An edge of the Rips filtration: endpoint indices plus the filtration
/// parameter at which it appears (half the endpoint distance).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilteredEdge {
    pub endpoints: (usize, usize),
    pub value: f64,
}

/// A real-valued function sampled on a path graph.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("sampled function"));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "sampled function values must be finite".to_string(),
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Reads a point cloud: one point per line, whitespace-separated
/// coordinates, `#` comments ignored.
pub fn load_point_cloud<R: BufRead>(reader: R) -> Result<PointCloud> {
    let mut points = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let coords = trimmed
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("invalid coordinate `{tok}`"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        points.push(coords);
    }
    PointCloud::new(points)
}

pub fn load_point_cloud_file<P: AsRef<Path>>(path: P) -> Result<PointCloud> {
    let file = std::fs::File::open(path)?;
    load_point_cloud(std::io::BufReader::new(file))
}

pub fn save_point_cloud<W: Write>(mut writer: W, cloud: &PointCloud) -> Result<()> {
    for p in cloud.points() {
        let coords: Vec<String> = p.iter().map(|x| format!("{x}")).collect();
        writeln!(writer, "{}", coords.join(" "))?;
    }
    Ok(())
}

pub fn save_point_cloud_file<P: AsRef<Path>>(path: P, cloud: &PointCloud) -> Result<()> {
    let file = std::fs::File::create(path)?;
    save_point_cloud(std::io::BufWriter::new(file), cloud)
}

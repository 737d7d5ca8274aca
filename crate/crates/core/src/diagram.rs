//! Persistence diagrams: the birth–death point model, diagonal geometry,
//! and the canonical text format shared by the whole pipeline.
//!
//! A diagram is a finite multiset of points `(birth, death)` with
//! `death >= birth`, one diagram per homology dimension. Points are stored
//! as a plain list preserving multiplicity; multiplicity carries measure
//! mass when diagrams are smoothed into discrete measures.
//!
//! Essential classes (death = +inf) may be present after computing
//! persistence, but every consumer of diagrams in this crate requires
//! finite points; resolve essentials with an [`EssentialPolicy`] first.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single birth–death pair. `death` may be `+inf` for essential classes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersistencePoint {
    pub birth: f64,
    pub death: f64,
}

impl PersistencePoint {
    /// Validates `death >= birth`, finite `birth`, and no NaNs.
    pub fn new(birth: f64, death: f64) -> Result<Self> {
        if !birth.is_finite() || death.is_nan() || death < birth {
            return Err(Error::InvalidPoint { birth, death });
        }
        Ok(Self { birth, death })
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    /// Bit pattern used for exact-equality dedup of support sets.
    pub(crate) fn bits(&self) -> (u64, u64) {
        (self.birth.to_bits(), self.death.to_bits())
    }

    /// The point as plane coordinates `[birth, death]`.
    pub fn to_xy(self) -> [f64; 2] {
        [self.birth, self.death]
    }
}

/// Orthogonal projection of a finite point onto the diagonal `{(a, a)}`.
///
/// The projection of `(b, d)` is `((b+d)/2, (b+d)/2)`, the closest point of
/// the diagonal in Euclidean distance.
pub fn project_to_diagonal(u: PersistencePoint) -> Result<PersistencePoint> {
    if u.is_essential() {
        return Err(Error::EssentialPoint);
    }
    let mid = 0.5 * (u.birth + u.death);
    Ok(PersistencePoint {
        birth: mid,
        death: mid,
    })
}

/// How to resolve essential classes (death = +inf) when a finite diagram is
/// required.
///
/// The default drops them, which keeps diagrams bounded; `Cap(v)` replaces
/// the infinite death with `v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum EssentialPolicy {
    Drop,
    Cap(f64),
}

impl Default for EssentialPolicy {
    fn default() -> Self {
        EssentialPolicy::Drop
    }
}

/// A finite multiset of persistence points for one homology dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    points: Vec<PersistencePoint>,
    homology_dimension: usize,
}

impl PersistenceDiagram {
    pub fn new(points: Vec<PersistencePoint>, homology_dimension: usize) -> Self {
        Self {
            points,
            homology_dimension,
        }
    }

    pub fn empty(homology_dimension: usize) -> Self {
        Self::new(Vec::new(), homology_dimension)
    }

    /// Builds a diagram from raw pairs, validating each point.
    pub fn from_pairs(pairs: &[(f64, f64)], homology_dimension: usize) -> Result<Self> {
        let points = pairs
            .iter()
            .map(|&(b, d)| PersistencePoint::new(b, d))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(points, homology_dimension))
    }

    pub fn points(&self) -> &[PersistencePoint] {
        &self.points
    }

    pub fn homology_dimension(&self) -> usize {
        self.homology_dimension
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True when no point has infinite death.
    pub fn is_finite(&self) -> bool {
        self.points.iter().all(|p| !p.is_essential())
    }

    /// Resolves essential classes per `policy`. `Cap(v)` fails if `v` is
    /// below the birth of some essential point.
    pub fn apply_policy(&self, policy: EssentialPolicy) -> Result<Self> {
        let mut points = Vec::with_capacity(self.points.len());
        for p in &self.points {
            if !p.is_essential() {
                points.push(*p);
                continue;
            }
            match policy {
                EssentialPolicy::Drop => {}
                EssentialPolicy::Cap(v) => points.push(PersistencePoint::new(p.birth, v)?),
            }
        }
        Ok(Self::new(points, self.homology_dimension))
    }

    /// The diagonal mirror: every point replaced by its projection onto the
    /// diagonal. Cardinality and multiplicity are preserved.
    pub fn diagonal_mirror(&self) -> Result<Self> {
        let points = self
            .points
            .iter()
            .map(|&p| project_to_diagonal(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(points, self.homology_dimension))
    }
}

fn format_coord(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{x}")
    }
}

/// Writes a diagram in the canonical text format: a `dim <k>` header line,
/// then one `birth death` pair per line. Floats are printed in shortest
/// round-trip form so `load(save(dg)) == dg` exactly.
pub fn save_diagram<W: Write>(mut writer: W, diagram: &PersistenceDiagram) -> Result<()> {
    writeln!(writer, "dim {}", diagram.homology_dimension())?;
    for p in diagram.points() {
        writeln!(
            writer,
            "{} {}",
            format_coord(p.birth),
            format_coord(p.death)
        )?;
    }
    Ok(())
}

pub fn save_diagram_file<P: AsRef<Path>>(path: P, diagram: &PersistenceDiagram) -> Result<()> {
    let file = std::fs::File::create(path)?;
    save_diagram(std::io::BufWriter::new(file), diagram)
}

fn parse_coord(token: &str, line: usize) -> Result<f64> {
    let value: f64 = token.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid number `{token}`"),
    })?;
    if value.is_nan() {
        return Err(Error::Parse {
            line,
            msg: format!("NaN coordinate `{token}`"),
        });
    }
    Ok(value)
}

/// Parses the canonical diagram format and resolves essential classes per
/// `policy`.
///
/// Format: UTF-8 text, one `birth death` pair per line, `#`-prefixed comment
/// lines ignored, optional `dim <k>` header. `inf`/`Inf`/`infinity` are
/// accepted case-insensitively for the death coordinate.
pub fn load_diagram<R: BufRead>(reader: R, policy: EssentialPolicy) -> Result<PersistenceDiagram> {
    let mut points = Vec::new();
    let mut dim: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens[0] == "dim" {
            if dim.is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "duplicate dim header".to_string(),
                });
            }
            if tokens.len() != 2 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "expected `dim <k>`".to_string(),
                });
            }
            dim = Some(tokens[1].parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid dimension `{}`", tokens[1]),
            })?);
            continue;
        }
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected `birth death`, got {} tokens", tokens.len()),
            });
        }
        let birth = parse_coord(tokens[0], line_no)?;
        let death = parse_coord(tokens[1], line_no)?;
        points.push(PersistencePoint::new(birth, death)?);
    }
    PersistenceDiagram::new(points, dim.unwrap_or(0)).apply_policy(policy)
}

pub fn load_diagram_file<P: AsRef<Path>>(
    path: P,
    policy: EssentialPolicy,
) -> Result<PersistenceDiagram> {
    let file = std::fs::File::open(path)?;
    load_diagram(std::io::BufReader::new(file), policy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(b: f64, d: f64) -> PersistencePoint {
        PersistencePoint::new(b, d).unwrap()
    }

    #[test]
    fn projection_of_off_diagonal_point() {
        let p = project_to_diagonal(pt(1.0, 3.0)).unwrap();
        assert_eq!(p, pt(2.0, 2.0));
        let p = project_to_diagonal(pt(0.0, 5.0)).unwrap();
        assert_eq!(p, pt(2.5, 2.5));
    }

    #[test]
    fn projection_fixes_diagonal_points() {
        let p = project_to_diagonal(pt(1.25, 1.25)).unwrap();
        assert_eq!(p, pt(1.25, 1.25));
    }

    #[test]
    fn projection_rejects_essential_points() {
        let p = pt(0.0, f64::INFINITY);
        assert!(matches!(project_to_diagonal(p), Err(Error::EssentialPoint)));
    }

    #[test]
    fn mirror_projects_every_point() {
        let dg = PersistenceDiagram::from_pairs(&[(1.0, 3.0), (0.0, 2.0)], 0).unwrap();
        let mirrored = dg.diagonal_mirror().unwrap();
        assert_eq!(mirrored.points(), &[pt(2.0, 2.0), pt(1.0, 1.0)]);
    }

    #[test]
    fn mirror_of_empty_diagram_is_empty() {
        let dg = PersistenceDiagram::empty(1);
        assert!(dg.diagonal_mirror().unwrap().is_empty());
    }

    #[test]
    fn mirror_preserves_multiplicity() {
        let dg = PersistenceDiagram::from_pairs(&[(1.0, 3.0), (1.0, 3.0)], 0).unwrap();
        let mirrored = dg.diagonal_mirror().unwrap();
        assert_eq!(mirrored.points(), &[pt(2.0, 2.0), pt(2.0, 2.0)]);
    }

    #[test]
    fn load_parses_plain_points() {
        let dg = load_diagram("0.0 1.5\n0.2 0.9\n".as_bytes(), EssentialPolicy::Drop).unwrap();
        assert_eq!(dg.len(), 2);
        assert_eq!(dg.points()[0], pt(0.0, 1.5));
        assert_eq!(dg.points()[1], pt(0.2, 0.9));
    }

    #[test]
    fn load_applies_drop_policy() {
        let dg = load_diagram("0.0 inf\n".as_bytes(), EssentialPolicy::Drop).unwrap();
        assert!(dg.is_empty());
    }

    #[test]
    fn load_applies_cap_policy() {
        let dg = load_diagram("0.0 Infinity\n".as_bytes(), EssentialPolicy::Cap(2.0)).unwrap();
        assert_eq!(dg.points(), &[pt(0.0, 2.0)]);
    }

    #[test]
    fn load_rejects_death_before_birth() {
        let err = load_diagram("1.0 0.5\n".as_bytes(), EssentialPolicy::Drop).unwrap_err();
        assert!(matches!(err, Error::InvalidPoint { .. }));
    }

    #[test]
    fn load_reports_line_numbers() {
        let err =
            load_diagram("0.0 1.0\nnot a point\n".as_bytes(), EssentialPolicy::Drop).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn load_honors_header_and_comments() {
        let text = "# comment\ndim 1\n0.0 1.0\n\n# trailing\n";
        let dg = load_diagram(text.as_bytes(), EssentialPolicy::Drop).unwrap();
        assert_eq!(dg.homology_dimension(), 1);
        assert_eq!(dg.len(), 1);
    }

    #[test]
    fn cap_below_birth_is_rejected() {
        let err = load_diagram("3.0 inf\n".as_bytes(), EssentialPolicy::Cap(2.0)).unwrap_err();
        assert!(matches!(err, Error::InvalidPoint { .. }));
    }

    #[test]
    fn save_then_load_round_trips() {
        let dg = PersistenceDiagram::from_pairs(
            &[(0.1, 0.30000000000000004), (1e-300, 2.5), (0.0, 7.0)],
            1,
        )
        .unwrap();
        let mut buf = Vec::new();
        save_diagram(&mut buf, &dg).unwrap();
        let back = load_diagram(buf.as_slice(), EssentialPolicy::Drop).unwrap();
        assert_eq!(back, dg);
    }
}

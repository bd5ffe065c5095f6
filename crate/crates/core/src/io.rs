//! Text formats: FILT v1 filtrations and whitespace-separated point files.
//!
//! FILT v1:
//!
//! ```text
//! filt 1 <ambient_dim> <K>
//! <index> <value> <dim> <v0> ... <vdim>      (K lines, index = 1..K)
//! points                                    (optional section)
//! <id> <x1> ... <xn> [weight]               (one line per vertex id, ids = 0..)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Filtration indices are 1-based;
//! vertex ids are 0-based.

use std::fmt::Write as _;
use std::path::Path;

use crate::complex::{Filtration, Simplex};
use crate::error::{Error, Result};
use crate::geometry::PointCloud;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn number<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("invalid {what} '{tok}'")))
}

struct FiltFile {
    ambient_dim: usize,
    simplices: Vec<(Simplex, f64)>,
    points: Option<PointCloud>,
}

fn parse_filt(text: &str) -> Result<FiltFile> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut h = header.split_whitespace();
    if h.next() != Some("filt") {
        return Err(parse_err(hl, "expected header 'filt 1 <ambient_dim> <K>'"));
    }
    let version: u32 = number(h.next(), hl, "version")?;
    if version != 1 {
        return Err(parse_err(hl, format!("unsupported FILT version {version}")));
    }
    let ambient_dim: usize = number(h.next(), hl, "ambient dimension")?;
    let k: usize = number(h.next(), hl, "simplex count")?;
    if h.next().is_some() {
        return Err(parse_err(hl, "trailing tokens in header"));
    }

    let mut simplices = Vec::with_capacity(k);
    let mut point_lines = None;
    for (ln, line) in lines.by_ref() {
        if line == "points" {
            point_lines = Some(ln);
            break;
        }
        let mut t = line.split_whitespace();
        let index: usize = number(t.next(), ln, "index")?;
        if index != simplices.len() + 1 {
            return Err(parse_err(ln, format!("expected index {}, found {index}", simplices.len() + 1)));
        }
        let value: f64 = number(t.next(), ln, "value")?;
        let dim: usize = number(t.next(), ln, "dimension")?;
        let verts = t.map(|v| number::<u32>(Some(v), ln, "vertex id")).collect::<Result<Vec<_>>>()?;
        if verts.len() != dim + 1 {
            return Err(parse_err(ln, format!("dimension {dim} needs {} vertices, found {}", dim + 1, verts.len())));
        }
        let s = Simplex::new(verts).map_err(|e| parse_err(ln, e.to_string()))?;
        simplices.push((s, value));
    }
    if simplices.len() != k {
        return Err(parse_err(0, format!("header declares {k} simplices, found {}", simplices.len())));
    }

    let points = match point_lines {
        None => None,
        Some(_) => {
            let mut coords = Vec::new();
            let mut weights = Vec::new();
            for (ln, line) in lines {
                let mut t = line.split_whitespace();
                let id: usize = number(t.next(), ln, "point id")?;
                if id != coords.len() {
                    return Err(parse_err(ln, format!("expected point id {}, found {id}", coords.len())));
                }
                let vals = t.map(|v| number::<f64>(Some(v), ln, "coordinate")).collect::<Result<Vec<_>>>()?;
                match vals.len() {
                    n if n == ambient_dim => {
                        coords.push(vals);
                        weights.push(None);
                    }
                    n if n == ambient_dim + 1 => {
                        weights.push(Some(vals[ambient_dim]));
                        coords.push(vals[..ambient_dim].to_vec());
                    }
                    n => return Err(parse_err(ln, format!("expected {ambient_dim} coordinates, found {n}"))),
                }
            }
            let w = if weights.iter().all(Option::is_none) {
                None
            } else if weights.iter().all(Option::is_some) {
                Some(weights.into_iter().flatten().collect())
            } else {
                return Err(parse_err(0, "either all points or none carry a weight"));
            };
            Some(PointCloud::new(ambient_dim, coords, w)?)
        }
    };
    Ok(FiltFile { ambient_dim, simplices, points })
}

fn attach(f: Filtration, points: Option<PointCloud>) -> Result<Filtration> {
    match points {
        Some(p) => f.with_points(p),
        None => Ok(f),
    }
}

/// Parses FILT v1 text and validates the result as a filtration.
pub fn read_filt(text: &str) -> Result<Filtration> {
    let ff = parse_filt(text)?;
    let f = Filtration::from_ordered(ff.ambient_dim, ff.simplices, None)?;
    attach(f, ff.points)
}

/// Parses FILT v1 text without checking the filtration conditions.
pub fn read_filt_unchecked(text: &str) -> Result<Filtration> {
    let ff = parse_filt(text)?;
    let f = Filtration::from_ordered_unchecked(ff.ambient_dim, ff.simplices, None)?;
    attach(f, ff.points)
}

pub fn write_filt(f: &Filtration) -> String {
    let mut out = String::with_capacity(f.len() * 24);
    writeln!(out, "filt 1 {} {}", f.ambient_dim(), f.len()).unwrap();
    for k in 0..f.len() {
        write!(out, "{} {} {}", k + 1, f.value(k), f.dim(k)).unwrap();
        for v in f.vertices(k) {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    if let Some(pc) = f.points() {
        out.push_str("points\n");
        for (i, p) in pc.points().enumerate() {
            write!(out, "{i}").unwrap();
            for x in p {
                write!(out, " {x}").unwrap();
            }
            if pc.is_weighted() {
                write!(out, " {}", pc.weight(i)).unwrap();
            }
            out.push('\n');
        }
    }
    out
}

pub fn load_filt(path: impl AsRef<Path>) -> Result<Filtration> {
    read_filt(&std::fs::read_to_string(path)?)
}

pub fn save_filt(f: &Filtration, path: impl AsRef<Path>) -> Result<()> {
    Ok(std::fs::write(path, write_filt(f))?)
}

/// Parses one point per line (`x1 .. xn`, plus a trailing weight when `weighted`).
///
/// The dimension is taken from the first line and must be 2 or 3.
pub fn read_points(text: &str, weighted: bool) -> Result<PointCloud> {
    let mut coords: Vec<Vec<f64>> = Vec::new();
    let mut weights = Vec::new();
    let mut dim = None;
    for (ln, line) in content_lines(text) {
        let mut vals =
            line.split_whitespace().map(|v| number::<f64>(Some(v), ln, "coordinate")).collect::<Result<Vec<_>>>()?;
        if weighted {
            weights.push(vals.pop().ok_or_else(|| parse_err(ln, "missing weight"))?);
        }
        match dim {
            None => dim = Some(vals.len()),
            Some(d) if d != vals.len() => {
                return Err(parse_err(ln, format!("expected {d} coordinates, found {}", vals.len())))
            }
            _ => {}
        }
        coords.push(vals);
    }
    let dim = dim.ok_or_else(|| Error::InvalidInput("point file contains no points".into()))?;
    PointCloud::new(dim, coords, weighted.then_some(weights))
}

pub fn load_points(path: impl AsRef<Path>, weighted: bool) -> Result<PointCloud> {
    read_points(&std::fs::read_to_string(path)?, weighted)
}

//! Plain-text point lists and point clouds.
//!
//! Point lists hold one coordinate per line; clouds hold one point per line
//! with whitespace-separated coordinates (XYZ style). In both, `#` starts a
//! comment and blank lines are ignored. Parse errors carry 1-based line
//! numbers.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::sliced::PointCloud;

fn content(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
    .trim()
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("{token:?} is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            msg: format!("{token:?} is not finite"),
        });
    }
    Ok(v)
}

pub fn read_points<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let body = content(&line);
        if body.is_empty() {
            continue;
        }
        let mut tokens = body.split_whitespace();
        let first = tokens.next().expect("non-empty line has a token");
        if tokens.next().is_some() {
            return Err(Error::Parse {
                line: idx + 1,
                msg: "expected exactly one coordinate".into(),
            });
        }
        out.push(parse_value(first, idx + 1)?);
    }
    Ok(out)
}

pub fn read_points_file(path: &std::path::Path) -> Result<Vec<f64>> {
    read_points(std::io::BufReader::new(std::fs::File::open(path)?))
}

pub fn write_points<W: Write>(mut w: W, values: &[f64]) -> Result<()> {
    for v in values {
        writeln!(w, "{v:?}")?;
    }
    Ok(())
}

/// CSV with header `i,x` and 0-based indices.
pub fn write_indexed_csv<W: Write>(mut w: W, values: &[f64]) -> Result<()> {
    writeln!(w, "i,x")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(w, "{i},{v:?}")?;
    }
    Ok(())
}

/// Reads a cloud; `dim` fixes the column count, otherwise the first data
/// line determines it.
pub fn read_cloud<R: BufRead>(reader: R, dim: Option<usize>) -> Result<PointCloud> {
    let mut dim = dim;
    let mut coords = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let body = content(&line);
        if body.is_empty() {
            continue;
        }
        let row = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| parse_value(t, idx + 1))
            .collect::<Result<Vec<f64>>>()?;
        let d = *dim.get_or_insert(row.len());
        if row.len() != d {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("expected {d} coordinates, found {}", row.len()),
            });
        }
        coords.extend(row);
    }
    let dim = dim.ok_or_else(|| Error::Format {
        format: "point cloud",
        msg: "no points and no dimension given".into(),
    })?;
    PointCloud::new(dim, coords)
}

pub fn read_cloud_file(path: &std::path::Path, dim: Option<usize>) -> Result<PointCloud> {
    read_cloud(std::io::BufReader::new(std::fs::File::open(path)?), dim)
}

pub fn write_cloud<W: Write>(mut w: W, cloud: &PointCloud) -> Result<()> {
    for p in cloud.points() {
        let row: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

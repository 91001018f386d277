//! CSV serialization of sampled fields.
//!
//! Format: one metadata line naming time and grid parameters, one column
//! header, then `x, re(u), im(u), |u|²` rows. All floats use 17 significant
//! digits so files are byte-reproducible and round-trip exactly.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::field::{ComplexField, Grid1D};

fn fm(v: f64) -> String {
    format!("{v:.16e}")
}

/// Render a field as CSV text.
pub fn field_to_csv(f: &ComplexField) -> String {
    let g = f.grid();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# time={} x_min={} x_max={} n_points={}",
        fm(f.time()),
        fm(g.x_min()),
        fm(g.x_max()),
        g.n_points()
    );
    out.push_str("x,re_u,im_u,abs2_u\n");
    for (i, v) in f.values().iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fm(g.point(i)),
            fm(v.re),
            fm(v.im),
            fm(v.norm_sqr())
        );
    }
    out
}

/// Parse a field from CSV text produced by [`field_to_csv`].
pub fn field_from_csv(text: &str) -> Result<ComplexField> {
    let mut lines = text.lines();
    let meta = lines
        .next()
        .ok_or_else(|| CoreError::Config("empty field CSV".into()))?;
    let meta = meta
        .strip_prefix('#')
        .ok_or_else(|| CoreError::Config("field CSV missing metadata line".into()))?;

    let mut time = None;
    let mut x_min = None;
    let mut x_max = None;
    let mut n_points = None;
    for part in meta.split_whitespace() {
        let (key, val) = part
            .split_once('=')
            .ok_or_else(|| CoreError::Config(format!("bad metadata entry '{part}'")))?;
        match key {
            "time" => time = Some(parse_f64(val)?),
            "x_min" => x_min = Some(parse_f64(val)?),
            "x_max" => x_max = Some(parse_f64(val)?),
            "n_points" => {
                n_points = Some(
                    val.parse::<usize>()
                        .map_err(|e| CoreError::Config(format!("bad n_points '{val}': {e}")))?,
                )
            }
            other => return Err(CoreError::Config(format!("unknown metadata key '{other}'"))),
        }
    }
    let (time, x_min, x_max, n_points) = match (time, x_min, x_max, n_points) {
        (Some(t), Some(a), Some(b), Some(n)) => (t, a, b, n),
        _ => return Err(CoreError::Config("incomplete field CSV metadata".into())),
    };

    let header = lines
        .next()
        .ok_or_else(|| CoreError::Config("field CSV missing column header".into()))?;
    if header.trim() != "x,re_u,im_u,abs2_u" {
        return Err(CoreError::Config(format!(
            "unexpected field CSV header '{header}'"
        )));
    }

    let grid = Grid1D::new(x_min, x_max, n_points)?;
    let mut values = Vec::with_capacity(n_points);
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(CoreError::Config(format!("bad field CSV row '{line}'")));
        }
        values.push(Complex64::new(parse_f64(cols[1])?, parse_f64(cols[2])?));
    }
    ComplexField::new(grid, time, values)
}

/// Read a field CSV from disk.
pub fn read_field_csv(path: &Path) -> Result<ComplexField> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CoreError::Config(format!("cannot read {}: {e}", path.display())))?;
    field_from_csv(&text)
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|e| CoreError::Config(format!("bad float '{s}': {e}")))
}

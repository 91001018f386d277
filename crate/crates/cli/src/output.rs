//! Output-file plumbing: atomic writes, snapshot CSVs, the gnuplot script.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use nls_core::io::field_to_csv;
use nls_core::solver::Trajectory;

/// Write atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn snapshot_name(index: usize) -> String {
    format!("snapshot_{index:04}.csv")
}

/// Write one CSV per snapshot; returns the file names.
pub fn write_snapshots(out_dir: &Path, trajectory: &Trajectory) -> Result<Vec<String>> {
    let mut names = Vec::new();
    for (i, snap) in trajectory.snapshots().iter().enumerate() {
        let name = snapshot_name(i);
        write_atomic(&out_dir.join(&name), &field_to_csv(snap))?;
        names.push(name);
    }
    Ok(names)
}

/// A renderer-agnostic gnuplot script plotting |u|² of every snapshot.
pub fn plot_script(snapshot_names: &[String], times: &[f64]) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set xlabel 'x'\n");
    s.push_str("set ylabel '|u|^2'\n");
    s.push_str("set key outside\n");
    s.push_str("plot \\\n");
    let lines: Vec<String> = snapshot_names
        .iter()
        .zip(times)
        .map(|(name, t)| format!("  '{name}' using 1:4 skip 2 with lines title 't={t:.3}'"))
        .collect();
    s.push_str(&lines.join(", \\\n"));
    s.push('\n');
    s
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir.to_path_buf())
}

//! Output writers. Floats use 17 significant digits so every file parses
//! back to the exact values written.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(names: &[String]) -> String {
    let mut s = names.join(",");
    s.push('\n');
    s
}

pub fn matrix_csv(names: &[String], m: &DMatrix<f64>) -> String {
    let mut s = header(names);
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| fmt_f64(m[(i, j)])).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn int_matrix_csv(names: &[String], m: &DMatrix<i8>) -> String {
    let mut s = header(names);
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| m[(i, j)].to_string()).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// One row of per-variable values under a header of variable names.
pub fn row_csv(names: &[String], values: &[f64]) -> String {
    let mut s = header(names);
    let row: Vec<String> = values.iter().map(|v| fmt_f64(*v)).collect();
    s.push_str(&row.join(","));
    s.push('\n');
    s
}

/// `chain,sweep,loglik` rows, one per sweep of every chain.
pub fn trace_csv(traces: &[Vec<f64>]) -> String {
    let mut s = String::from("chain,sweep,loglik\n");
    for (c, trace) in traces.iter().enumerate() {
        for (t, v) in trace.iter().enumerate() {
            let _ = writeln!(s, "{c},{t},{}", fmt_f64(*v));
        }
    }
    s
}

/// `u v` per line, 0-indexed.
pub fn edge_list(edges: &[(usize, usize)]) -> String {
    let mut s = String::new();
    for (u, v) in edges {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

pub fn json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write(dir: &Path, name: &str, contents: &str) -> CliResult<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))
}

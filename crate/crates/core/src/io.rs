//! Edge-list and weight-matrix files. Node labels on disk are 1-based.
//!
//! Edge list: a header line `n <count>` followed by one `u v` pair per line.
//! Blank lines and lines starting with `#` are ignored.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graphkit::{Topology, WeightMatrix};

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

pub fn write_edge_list(t: &Topology, mut out: impl Write) -> Result<()> {
    writeln!(out, "n {}", t.n())?;
    for e in t.edges() {
        writeln!(out, "{} {}", e.u() + 1, e.v() + 1)?;
    }
    Ok(())
}

pub fn read_edge_list(input: impl BufRead) -> Result<Topology> {
    let mut n = None;
    let mut pairs = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = k + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        let Some(count) = n else {
            match fields.as_slice() {
                ["n", count] => {
                    n = Some(
                        count
                            .parse::<usize>()
                            .map_err(|e| parse_err(lineno, e.to_string()))?,
                    );
                    continue;
                }
                _ => return Err(parse_err(lineno, "expected header `n <count>`")),
            }
        };
        let [u, v] = fields.as_slice() else {
            return Err(parse_err(lineno, "expected `u v`"));
        };
        let label = |s: &str| -> Result<usize> {
            let x: usize = s
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad label `{s}`")))?;
            if x == 0 || x > count {
                return Err(parse_err(lineno, format!("label {x} outside 1..{count}")));
            }
            Ok(x - 1)
        };
        let (u, v) = (label(u)?, label(v)?);
        if u == v {
            return Err(parse_err(
                lineno,
                format!("self-pair ({}, {})", u + 1, v + 1),
            ));
        }
        pairs.push((u, v));
    }
    let n = n.ok_or_else(|| parse_err(0, "missing header `n <count>`"))?;
    Topology::new(n, pairs)
}

/// `n` rows of `n` comma-separated values.
pub fn write_weights_csv(w: &WeightMatrix, mut out: impl Write) -> Result<()> {
    for row in w.entries().row_iter() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn read_weights_csv(input: impl BufRead) -> Result<WeightMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| parse_err(k + 1, e.to_string()))?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_err(
                    k + 1,
                    format!("expected {} columns", first.len()),
                ));
            }
        }
        rows.push(row);
    }
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(parse_err(n, "weight matrix must be square"));
    }
    WeightMatrix::from_matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

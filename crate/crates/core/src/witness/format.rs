//! Line-oriented text format for statistics tables.
//!
//! ```text
//! # comment
//! mode exact|sampled
//! input <label> <dim> <re im ...>          row-major density
//! effect <measurement> <k> <dim> <re im ...>
//! prob <input> <measurement> <shots|-> <p_0 ... p_K-1>
//! ```
//!
//! Labels are whitespace-free. Floats are written in shortest round-trip
//! form so parse/write is lossless.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::StatsTable;
use crate::error::{Error, Result};
use crate::quantum::{c, CMatrix, DensityOperator, Povm};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(line: usize, tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| parse_err(line, format!("expected a finite number, found '{tok}'")))
}

fn parse_matrix(line: usize, dim_tok: &str, rest: &[&str]) -> Result<CMatrix> {
    let dim: usize = dim_tok
        .parse()
        .map_err(|_| parse_err(line, format!("expected a dimension, found '{dim_tok}'")))?;
    if dim == 0 {
        return Err(parse_err(line, "dimension must be positive"));
    }
    if rest.len() != 2 * dim * dim {
        return Err(parse_err(
            line,
            format!(
                "expected {} numbers for a {dim}x{dim} matrix, found {}",
                2 * dim * dim,
                rest.len()
            ),
        ));
    }
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let k = 2 * (i * dim + j);
            m[(i, j)] = c(parse_f64(line, rest[k])?, parse_f64(line, rest[k + 1])?);
        }
    }
    Ok(m)
}

struct Cell {
    line: usize,
    shots: Option<u64>,
    probs: Vec<f64>,
}

pub fn parse_stats(text: &str) -> Result<StatsTable> {
    let mut sampled: Option<bool> = None;
    let mut inputs: Vec<(String, DensityOperator)> = Vec::new();
    let mut effects: Vec<(String, Vec<CMatrix>)> = Vec::new();
    let mut cells: HashMap<(String, String), Cell> = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0] {
            "mode" => {
                if sampled.is_some() {
                    return Err(parse_err(line, "mode given twice"));
                }
                sampled = Some(match toks.get(1).copied() {
                    Some("exact") => false,
                    Some("sampled") => true,
                    other => {
                        return Err(parse_err(
                            line,
                            format!("mode must be 'exact' or 'sampled', found {other:?}"),
                        ))
                    }
                });
            }
            "input" => {
                if toks.len() < 3 {
                    return Err(parse_err(line, "input needs a label and a dimension"));
                }
                if inputs.iter().any(|(l, _)| l == toks[1]) {
                    return Err(parse_err(line, format!("duplicate input '{}'", toks[1])));
                }
                let m = parse_matrix(line, toks[2], &toks[3..])?;
                let rho = DensityOperator::new(m).map_err(|e| parse_err(line, e.to_string()))?;
                inputs.push((toks[1].to_string(), rho));
            }
            "effect" => {
                if toks.len() < 4 {
                    return Err(parse_err(line, "effect needs a measurement, index and dimension"));
                }
                let k: usize = toks[2]
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad outcome index '{}'", toks[2])))?;
                let m = parse_matrix(line, toks[3], &toks[4..])?;
                let pos = match effects.iter().position(|(l, _)| l == toks[1]) {
                    Some(p) => p,
                    None => {
                        effects.push((toks[1].to_string(), Vec::new()));
                        effects.len() - 1
                    }
                };
                if effects[pos].1.len() != k {
                    return Err(parse_err(
                        line,
                        format!(
                            "effect {k} of '{}' out of order, expected {}",
                            toks[1],
                            effects[pos].1.len()
                        ),
                    ));
                }
                effects[pos].1.push(m);
            }
            "prob" => {
                if toks.len() < 5 {
                    return Err(parse_err(
                        line,
                        "prob needs input, measurement, shots and probabilities",
                    ));
                }
                let shots = match toks[3] {
                    "-" => None,
                    s => Some(
                        s.parse::<u64>()
                            .map_err(|_| parse_err(line, format!("bad shot count '{s}'")))?,
                    ),
                };
                let probs = toks[4..]
                    .iter()
                    .map(|t| parse_f64(line, t))
                    .collect::<Result<Vec<_>>>()?;
                let key = (toks[1].to_string(), toks[2].to_string());
                if cells.contains_key(&key) {
                    return Err(parse_err(line, format!("duplicate cell ({}, {})", key.0, key.1)));
                }
                cells.insert(key, Cell { line, shots, probs });
            }
            other => return Err(parse_err(line, format!("unknown record '{other}'"))),
        }
    }

    let sampled = sampled.unwrap_or(false);
    let mut measurements = Vec::with_capacity(effects.len());
    for (label, e) in effects {
        let povm =
            Povm::new(e).map_err(|err| Error::invalid("stats table", format!("measurement '{label}': {err}")))?;
        measurements.push((label, povm));
    }

    for ((p, m), cell) in &cells {
        if !inputs.iter().any(|(l, _)| l == p) {
            return Err(parse_err(cell.line, format!("unknown input '{p}'")));
        }
        if !measurements.iter().any(|(l, _)| l == m) {
            return Err(parse_err(cell.line, format!("unknown measurement '{m}'")));
        }
        if sampled != cell.shots.is_some() {
            return Err(parse_err(cell.line, "shot count must be given exactly in sampled mode"));
        }
    }

    let mut probabilities = Vec::with_capacity(inputs.len());
    let mut counts = Vec::with_capacity(inputs.len());
    for (p, _) in &inputs {
        let mut row = Vec::new();
        let mut count_row = Vec::new();
        for (m, _) in &measurements {
            let cell = cells
                .remove(&(p.clone(), m.clone()))
                .ok_or_else(|| Error::invalid("stats table", format!("missing cell ({p}, {m})")))?;
            row.push(cell.probs);
            count_row.push(cell.shots.unwrap_or(0));
        }
        probabilities.push(row);
        counts.push(count_row);
    }

    StatsTable::new(inputs, measurements, probabilities, sampled.then_some(counts))
}

fn push_matrix(out: &mut String, m: &CMatrix) {
    let _ = write!(out, " {}", m.nrows());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let _ = write!(out, " {:?} {:?}", m[(i, j)].re, m[(i, j)].im);
        }
    }
}

pub fn write_stats(t: &StatsTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mode {}", if t.is_sampled() { "sampled" } else { "exact" });
    for (label, rho) in t.preparations() {
        out.push_str("input ");
        out.push_str(label);
        push_matrix(&mut out, rho.matrix());
        out.push('\n');
    }
    for (label, povm) in t.measurements() {
        for (k, e) in povm.effects().iter().enumerate() {
            let _ = write!(out, "effect {label} {k}");
            push_matrix(&mut out, e);
            out.push('\n');
        }
    }
    for (pi, (p, _)) in t.preparations().iter().enumerate() {
        for (mi, (m, _)) in t.measurements().iter().enumerate() {
            let shots = t
                .sample_counts()
                .map(|c| c[pi][mi].to_string())
                .unwrap_or_else(|| "-".into());
            let _ = write!(out, "prob {p} {m} {shots}");
            for v in &t.probabilities()[pi][mi] {
                let _ = write!(out, " {v:?}");
            }
            out.push('\n');
        }
    }
    out
}

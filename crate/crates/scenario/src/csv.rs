//! CSV writers and readers for run outputs.
//!
//! All numbers are written with shortest round-trip precision; lines starting
//! with `#` carry units and conventions and are skipped by the readers.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use zeno_core::observables::WignerGrid;

use crate::error::{Result, ScenarioError};

/// Shortest representation that parses back to the same double.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

fn parse_err(what: &str, line: usize, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Parse {
        what: what.to_string(),
        reason: format!("line {line}: {}", reason.into()),
    }
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim_start().starts_with('#') && !l.trim().is_empty())
}

fn parse_row(what: &str, line: usize, fields: &[&str]) -> Result<Vec<f64>> {
    fields
        .iter()
        .map(|f| {
            let v: f64 = f
                .trim()
                .parse()
                .map_err(|_| parse_err(what, line, format!("`{f}` is not a number")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_err(what, line, "non-finite value"))
            }
        })
        .collect()
}

/// Time series of Fock populations.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityTable {
    /// Seconds.
    pub times: Vec<f64>,
    /// `rows[i][n] = P_n(times[i])`.
    pub rows: Vec<Vec<f64>>,
}

impl ProbabilityTable {
    pub fn levels(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn column(&self, n: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[n]).collect()
    }
}

pub fn write_probabilities(table: &ProbabilityTable, time_unit_s: f64) -> String {
    let levels = table.levels();
    let mut out = String::new();
    out.push_str("# Fock populations P_n = <n|rho_b|n> of the reduced mechanical state\n");
    let _ = writeln!(out, "# t in seconds; one unit of internal time (1/g) = {} s", num(time_unit_s));
    out.push('t');
    for n in 0..levels {
        let _ = write!(out, ",P{n}");
    }
    out.push('\n');
    for (t, row) in table.times.iter().zip(&table.rows) {
        out.push_str(&num(*t));
        for p in row {
            out.push(',');
            out.push_str(&num(*p));
        }
        out.push('\n');
    }
    out
}

pub fn read_probabilities_csv(text: &str) -> Result<ProbabilityTable> {
    const WHAT: &str = "probabilities CSV";
    let mut lines = data_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(WHAT, 0, "missing header"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.first() != Some(&"t") || cols.len() < 2 {
        return Err(parse_err(WHAT, hline, "header must be `t,P0,...`"));
    }
    for (n, c) in cols[1..].iter().enumerate() {
        if *c != format!("P{n}") {
            return Err(parse_err(WHAT, hline, format!("expected column P{n}, found `{c}`")));
        }
    }
    let mut table = ProbabilityTable {
        times: Vec::new(),
        rows: Vec::new(),
    };
    for (i, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(parse_err(WHAT, i, format!("{} fields, expected {}", fields.len(), cols.len())));
        }
        let mut values = parse_row(WHAT, i, &fields)?;
        table.times.push(values.remove(0));
        table.rows.push(values);
    }
    Ok(table)
}

pub fn write_wigner(grid: &WignerGrid) -> String {
    let mut out = String::new();
    out.push_str("# Wigner function of the final reduced mechanical state\n");
    out.push_str("# W(x,p) = (2/pi) sum_k (-1)^k <k|D(alpha)^dag rho D(alpha)|k>, alpha = x + i p, D(alpha) = exp(alpha b^dag - alpha^* b)\n");
    out.push_str("# normalisation: integral of W dx dp = 1; vacuum W(0,0) = 2/pi\n");
    out.push_str("# first row: x values; each following row: p value, then W(x_j, p) for every x_j\n");
    out.push_str("p\\x");
    for x in &grid.x {
        out.push(',');
        out.push_str(&num(*x));
    }
    out.push('\n');
    for (ip, p) in grid.p.iter().enumerate() {
        out.push_str(&num(*p));
        for ix in 0..grid.x.len() {
            out.push(',');
            out.push_str(&num(grid.values[(ip, ix)]));
        }
        out.push('\n');
    }
    out
}

pub fn read_wigner_csv(text: &str) -> Result<WignerGrid> {
    const WHAT: &str = "Wigner CSV";
    let mut lines = data_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(WHAT, 0, "missing header"))?;
    let fields: Vec<&str> = header.split(',').collect();
    if fields.first().map(|f| f.trim()) != Some("p\\x") || fields.len() < 2 {
        return Err(parse_err(WHAT, hline, "header must be `p\\x,x0,x1,...`"));
    }
    let x = parse_row(WHAT, hline, &fields[1..])?;
    let mut p = Vec::new();
    let mut data = Vec::new();
    for (i, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != x.len() + 1 {
            return Err(parse_err(WHAT, i, format!("{} values, expected {}", fields.len() - 1, x.len())));
        }
        let row = parse_row(WHAT, i, &fields)?;
        p.push(row[0]);
        data.extend_from_slice(&row[1..]);
    }
    if p.is_empty() {
        return Err(parse_err(WHAT, hline, "no grid rows"));
    }
    let values = DMatrix::from_row_slice(p.len(), x.len(), &data);
    Ok(WignerGrid { x, p, values })
}

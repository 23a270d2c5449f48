//! Plain-text problem exchange format.
//!
//! ```text
//! # shaw
//! # 32 32
//! # d=0.25
//! <row 0 entries, whitespace separated>
//! ...
//! # rhs
//! <b, one value per line>
//! # x_true
//! <x_true, one value per line>
//! ```
//!
//! Values use 17 significant digits, so a write/read cycle is bit-exact.

use super::{Params, TestProblem};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::operators::dense_operator;
use std::io::{BufRead, Write};

#[derive(Debug, Clone, PartialEq)]
pub struct ExportedProblem {
    pub name: String,
    pub matrix: DenseMatrix,
    pub b: Vec<f64>,
    pub x_true: Vec<f64>,
    pub metadata: Params,
}

impl ExportedProblem {
    pub fn into_problem(self) -> TestProblem {
        let n = self.matrix.cols();
        TestProblem {
            name: self.name,
            op: Box::new(dense_operator(self.matrix)),
            b: self.b,
            x_true: self.x_true,
            n,
            metadata: self.metadata,
        }
    }
}

pub fn write_problem(p: &TestProblem, out: &mut impl Write) -> Result<()> {
    let a = p.dense()?;
    writeln!(out, "# {}", p.name)?;
    writeln!(out, "# {} {}", a.rows(), a.cols())?;
    for (k, v) in &p.metadata {
        writeln!(out, "# {k}={v}")?;
    }
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    writeln!(out, "# rhs")?;
    for v in &p.b {
        writeln!(out, "{v:.16e}")?;
    }
    writeln!(out, "# x_true")?;
    for v in &p.x_true {
        writeln!(out, "{v:.16e}")?;
    }
    Ok(())
}

#[derive(PartialEq)]
enum Section {
    Matrix,
    Rhs,
    Solution,
}

fn parse_values(line: &str, lineno: usize, into: &mut Vec<f64>) -> Result<()> {
    for tok in line.split_whitespace() {
        let v: f64 = tok
            .parse()
            .map_err(|_| Error::Parse(format!("line {lineno}: bad number '{tok}'")))?;
        into.push(v);
    }
    Ok(())
}

pub fn read_problem(input: impl BufRead) -> Result<ExportedProblem> {
    let mut lines = input.lines().enumerate();
    let mut header = |what: &str| -> Result<String> {
        match lines.next() {
            Some((_, line)) => {
                let line = line?;
                line.strip_prefix('#')
                    .map(|s| s.trim().to_string())
                    .ok_or_else(|| Error::Parse(format!("expected {what} header, found '{line}'")))
            }
            None => Err(Error::Parse(format!("missing {what} header"))),
        }
    };
    let name = header("name")?;
    let dims = header("shape")?;
    let shape: Vec<usize> = dims
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad shape '{dims}'"))))
        .collect::<Result<_>>()?;
    let [rows, cols] = shape[..] else {
        return Err(Error::Parse(format!("bad shape '{dims}'")));
    };

    let mut metadata = Params::new();
    let mut section = Section::Matrix;
    let (mut data, mut b, mut x) = (Vec::with_capacity(rows * cols), Vec::new(), Vec::new());
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(tag) = trimmed.strip_prefix('#') {
            let tag = tag.trim();
            match tag {
                "rhs" => section = Section::Rhs,
                "x_true" => section = Section::Solution,
                _ if section == Section::Matrix && data.is_empty() => {
                    let (k, v) = tag
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("line {lineno}: bad parameter '{tag}'")))?;
                    let v = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("line {lineno}: bad parameter value '{v}'")))?;
                    metadata.insert(k.trim().to_string(), v);
                }
                _ => return Err(Error::Parse(format!("line {lineno}: unexpected header '{tag}'"))),
            }
            continue;
        }
        let target = match section {
            Section::Matrix => &mut data,
            Section::Rhs => &mut b,
            Section::Solution => &mut x,
        };
        parse_values(trimmed, lineno, target)?;
    }
    if data.len() != rows * cols {
        return Err(Error::Parse(format!("expected {} matrix entries, found {}", rows * cols, data.len())));
    }
    if b.len() != rows {
        return Err(Error::Parse(format!("expected {rows} rhs entries, found {}", b.len())));
    }
    if x.len() != cols {
        return Err(Error::Parse(format!("expected {cols} x_true entries, found {}", x.len())));
    }
    let matrix = DenseMatrix::new(rows, cols, data).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(ExportedProblem {
        name,
        matrix,
        b,
        x_true: x,
        metadata,
    })
}

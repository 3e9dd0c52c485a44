//! Rendering of command results and the comparison report.

use std::collections::BTreeSet;

use clap::ValueEnum;
use orbidt::partitions::ColorVector;
use orbidt::qseries::{Coefficient, QSeries};
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A command result: the JSON document plus a flat table for csv/text output.
pub struct Output {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string(&self.json).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = self.header.join(",");
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|c| csv_cell(c)).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Text => {
                let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
                for row in &self.rows {
                    for (w, c) in widths.iter_mut().zip(row) {
                        *w = (*w).max(c.len());
                    }
                }
                let line = |cells: Vec<&str>| {
                    let padded: Vec<String> = cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:<w$}"))
                        .collect();
                    padded.join("  ").trim_end().to_string() + "\n"
                };
                let mut s = line(self.header.clone());
                for row in &self.rows {
                    s.push_str(&line(row.iter().map(String::as_str).collect()));
                }
                s
            }
        }
    }
}

fn csv_cell(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

pub fn alpha_key(a: &ColorVector) -> String {
    a.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("-")
}

/// Series in the shared `{"r", "N", "mode", "ring", "coefficients"}` layout.
pub fn series_output<C: Coefficient>(z: &QSeries<C>, mode: &str, extra: Vec<(&str, Value)>) -> Output {
    let mut json = z.to_json(mode);
    for (k, v) in extra {
        json[k] = v;
    }
    Output {
        json,
        header: vec!["alpha", "value"],
        rows: z.coeffs().map(|(a, c)| vec![alpha_key(a), c.to_string()]).collect(),
    }
}

#[derive(Serialize)]
pub struct CoefficientVerdict {
    pub alpha: Vec<i64>,
    pub lhs: Value,
    pub rhs: Value,
    pub equal: bool,
    #[serde(skip)]
    lhs_text: String,
    #[serde(skip)]
    rhs_text: String,
}

#[derive(Serialize)]
pub struct Comparison {
    /// `None` outside point mode.
    pub point: Option<[String; 3]>,
    pub equal: bool,
    pub coefficients: Vec<CoefficientVerdict>,
}

/// Coefficientwise comparison over the union of supports.
pub fn compare_series<C: Coefficient>(point: Option<[String; 3]>, lhs: &QSeries<C>, rhs: &QSeries<C>) -> Comparison {
    let keys: BTreeSet<&ColorVector> = lhs.coeffs().chain(rhs.coeffs()).map(|(a, _)| a).collect();
    let coefficients: Vec<CoefficientVerdict> = keys
        .into_iter()
        .map(|a| {
            let (l, r) = (lhs.coeff(a), rhs.coeff(a));
            CoefficientVerdict {
                alpha: a.0.clone(),
                lhs: l.to_json(),
                rhs: r.to_json(),
                equal: l == r,
                lhs_text: l.to_string(),
                rhs_text: r.to_string(),
            }
        })
        .collect();
    Comparison {
        point,
        equal: lhs.order() == rhs.order() && coefficients.iter().all(|c| c.equal),
        coefficients,
    }
}

#[derive(Serialize)]
pub struct CompareReport {
    pub r: usize,
    #[serde(rename = "N")]
    pub order: usize,
    pub mode: &'static str,
    pub lhs: &'static str,
    pub rhs: &'static str,
    pub seed: u64,
    pub equal: bool,
    pub comparisons: Vec<Comparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u128>,
}

impl CompareReport {
    pub fn output(&self) -> Output {
        let mut rows = Vec::new();
        for (i, c) in self.comparisons.iter().enumerate() {
            for v in &c.coefficients {
                rows.push(vec![
                    i.to_string(),
                    alpha_key(&ColorVector(v.alpha.clone())),
                    v.lhs_text.clone(),
                    v.rhs_text.clone(),
                    v.equal.to_string(),
                ]);
            }
        }
        Output {
            json: serde_json::to_value(self).expect("serializable"),
            header: vec!["case", "alpha", "lhs", "rhs", "equal"],
            rows,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn series(vals: &[(Vec<i64>, i64)]) -> QSeries<BigRational> {
        let mut z = QSeries::zero(2, 3);
        for (a, v) in vals {
            z.add_to(ColorVector(a.clone()), BigRational::from_integer((*v).into()));
        }
        z
    }

    #[test]
    fn verdict_over_union() {
        let a = series(&[(vec![1, 0], 2), (vec![0, 1], 1)]);
        let b = series(&[(vec![1, 0], 2)]);
        let c = compare_series(None, &a, &b);
        assert!(!c.equal);
        assert_eq!(c.coefficients.len(), 2);
        assert!(compare_series(None, &a, &a).equal);
    }

    #[test]
    fn csv_flattens_alpha() {
        let z = series(&[(vec![1, 2], -3)]);
        let out = series_output(&z, "point", vec![]).render(Format::Csv);
        assert_eq!(out, "alpha,value\n1-2,-3\n");
    }

    #[test]
    fn csv_quotes_commas() {
        assert_eq!(csv_cell("a,b"), "\"a,b\"");
        assert_eq!(csv_cell("x"), "x");
    }
}

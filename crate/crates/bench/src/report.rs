//! Per-solve rows, their CSV form, and the per-(algorithm, alpha) summary.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::config::Algorithm;
use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub image: String,
    pub algorithm: String,
    pub alpha: f64,
    pub seed: u64,
    /// Aligned PSNR in dB; `inf` for an exact reconstruction.
    pub psnr: f64,
    pub ssim: f64,
    /// Wall-clock seconds, including the shared HIO initialization.
    pub runtime: f64,
    /// Empty for scored rows; otherwise why the row carries no scores.
    pub note: String,
}

impl ReportRow {
    pub fn warning(image: &str, note: String) -> Self {
        Self {
            image: image.to_owned(),
            algorithm: String::new(),
            alpha: f64::NAN,
            seed: 0,
            psnr: f64::NAN,
            ssim: f64::NAN,
            runtime: f64::NAN,
            note,
        }
    }

    pub fn is_scored(&self) -> bool {
        self.note.is_empty()
    }
}

pub fn rows_to_csv(rows: &[ReportRow]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| BenchError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_rows_csv(text: &str) -> Result<Vec<ReportRow>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(BenchError::from))
        .collect()
}

/// Averages over one (algorithm, alpha) group.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub algorithm: String,
    pub alpha: f64,
    pub psnr: f64,
    pub ssim: f64,
    pub runtime: f64,
    pub count: usize,
}

fn algorithm_rank(name: &str) -> usize {
    name.parse::<Algorithm>()
        .map(|a| Algorithm::ALL.iter().position(|b| *b == a).unwrap())
        .unwrap_or(Algorithm::ALL.len())
}

/// Order-independent mean: values are sorted before summation.
fn mean(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}

/// Groups scored rows by (algorithm, alpha), ordered by the canonical
/// algorithm order and then by alpha.
pub fn summarize(rows: &[ReportRow]) -> Result<Vec<Summary>> {
    type Key = (usize, String, u64);
    let mut groups: BTreeMap<Key, (f64, Vec<&ReportRow>)> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.is_scored()) {
        // Nonnegative alphas order correctly by their bit patterns.
        let key = (algorithm_rank(&row.algorithm), row.algorithm.clone(), row.alpha.to_bits());
        groups.entry(key).or_insert_with(|| (row.alpha, Vec::new())).1.push(row);
    }
    if groups.is_empty() {
        return Err(BenchError::EmptyRows);
    }
    Ok(groups
        .into_iter()
        .map(|((_, algorithm, _), (alpha, members))| Summary {
            algorithm,
            alpha,
            psnr: mean(members.iter().map(|r| r.psnr).collect()),
            ssim: mean(members.iter().map(|r| r.ssim).collect()),
            runtime: mean(members.iter().map(|r| r.runtime).collect()),
            count: members.len(),
        })
        .collect())
}

/// Summary CSV plus a console table with one line per algorithm and one
/// column group per alpha.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub csv: String,
    pub console: String,
    pub summaries: Vec<Summary>,
}

pub fn emit_table(rows: &[ReportRow]) -> Result<Table> {
    let summaries = summarize(rows)?;

    let mut csv = String::from("algorithm,alpha,psnr,ssim,runtime,count\n");
    for s in &summaries {
        writeln!(csv, "{},{},{:.2},{:.3},{:.2},{}", s.algorithm, s.alpha, s.psnr, s.ssim, s.runtime, s.count).unwrap();
    }

    let mut alphas: Vec<f64> = summaries.iter().map(|s| s.alpha).collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    let mut algorithms: Vec<&str> = Vec::new();
    for s in &summaries {
        if !algorithms.contains(&s.algorithm.as_str()) {
            algorithms.push(&s.algorithm);
        }
    }

    const CELL: usize = 22;
    let label = |name: &str| name.parse::<Algorithm>().map(|a| a.label().to_owned()).unwrap_or_else(|_| name.to_owned());
    let width = algorithms.iter().map(|a| label(a).len()).max().unwrap_or(0).max("Method".len());
    let mut console = format!("{:<width$}", "Method");
    for a in &alphas {
        write!(console, " | {:<CELL$}", format!("alpha={a}")).unwrap();
    }
    console.push('\n');
    write!(console, "{:<width$}", "").unwrap();
    for _ in &alphas {
        write!(console, " | {:<CELL$}", format!("{:<14}{}", "PSNR/SSIM", "Time")).unwrap();
    }
    console.push('\n');
    for name in &algorithms {
        write!(console, "{:<width$}", label(name)).unwrap();
        for a in &alphas {
            let cell = summaries
                .iter()
                .find(|s| s.algorithm == *name && s.alpha == *a)
                .map(|s| format!("{:<14}{:.2}", format!("{:.2}/{:.3}", s.psnr, s.ssim), s.runtime))
                .unwrap_or_else(|| "-".to_owned());
            write!(console, " | {cell:<CELL$}").unwrap();
        }
        console.push('\n');
    }

    Ok(Table {
        csv,
        console,
        summaries,
    })
}

/// Reads the summary CSV written by [`emit_table`].
pub fn parse_summary_csv(text: &str) -> Result<Vec<Summary>> {
    #[derive(Deserialize)]
    struct Record {
        algorithm: String,
        alpha: f64,
        psnr: f64,
        ssim: f64,
        runtime: f64,
        count: usize,
    }
    csv::Reader::from_reader(text.as_bytes())
        .deserialize::<Record>()
        .map(|r| {
            let r = r?;
            Ok(Summary {
                algorithm: r.algorithm,
                alpha: r.alpha,
                psnr: r.psnr,
                ssim: r.ssim,
                runtime: r.runtime,
                count: r.count,
            })
        })
        .collect()
}

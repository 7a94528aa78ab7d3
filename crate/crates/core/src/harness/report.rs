//! Report emission: a fixed-schema CSV plus a Markdown rendering that
//! groups results by k the way the benchmark tables are usually laid out.

use std::fs;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::harness::run::ExperimentCell;

/// Fixed CSV header; the column set is part of the interchange contract.
pub const CSV_HEADER: &str =
    "method,representation,classifier,k_percent,accuracy,macro_f1,macro_precision,macro_recall,seed,wall_time_ms";

/// Output flavor of [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl ReportFormat {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::config(format!(
                "unknown report format {other:?} (expected csv|markdown)"
            ))),
        }
    }
}

/// The per-cell fields that reach the report files. Baseline cells carry
/// `k_percent` 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub method: String,
    pub representation: String,
    pub classifier: String,
    pub k_percent: f64,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub seed: u64,
    pub wall_time_ms: f64,
}

impl From<&ExperimentCell> for CellSummary {
    fn from(cell: &ExperimentCell) -> Self {
        Self {
            method: cell.method.as_str().to_string(),
            representation: cell.representation.as_str().to_string(),
            classifier: cell.classifier.as_str().to_string(),
            k_percent: cell.k_percent.unwrap_or(0.0),
            accuracy: cell.result.accuracy,
            macro_f1: cell.result.macro_f1,
            macro_precision: cell.result.macro_precision,
            macro_recall: cell.result.macro_recall,
            seed: cell.seed,
            wall_time_ms: cell.wall_time_ms,
        }
    }
}

fn sort_summaries(rows: &mut [CellSummary]) {
    rows.sort_by(|a, b| {
        a.k_percent
            .total_cmp(&b.k_percent)
            .then_with(|| a.method.cmp(&b.method))
            .then_with(|| a.representation.cmp(&b.representation))
            .then_with(|| a.classifier.cmp(&b.classifier))
    });
}

/// Render the CSV. Wall times are written as 0 unless `include_timings`,
/// keeping default reports byte-identical across runs of the same seed.
pub fn render_csv(rows: &[CellSummary], include_timings: bool) -> String {
    let mut rows = rows.to_vec();
    sort_summaries(&mut rows);
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &rows {
        let wall = if include_timings { row.wall_time_ms } else { 0.0 };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            row.method,
            row.representation,
            row.classifier,
            row.k_percent,
            row.accuracy,
            row.macro_f1,
            row.macro_precision,
            row.macro_recall,
            row.seed,
            wall
        ));
    }
    out
}

fn percent(v: f64) -> String {
    format!("{:.2}", v * 100.0)
}

fn k_title(k: f64) -> String {
    format!("k = {}%", k * 100.0)
}

/// Render the Markdown report: one section per k value, a row group per
/// method with the four metrics as percentages, one column per
/// (representation, classifier) pair. Baseline rows appear in the first
/// section, mirroring how benchmark tables usually carry the original
/// training set only once.
pub fn render_markdown(rows: &[CellSummary]) -> String {
    let mut rows = rows.to_vec();
    sort_summaries(&mut rows);

    let mut columns: Vec<(String, String)> = Vec::new();
    for row in &rows {
        let col = (row.representation.clone(), row.classifier.clone());
        if !columns.contains(&col) {
            columns.push(col);
        }
    }
    columns.sort();

    let baseline: Vec<&CellSummary> = rows.iter().filter(|r| r.method == "none").collect();
    let mut sections: IndexMap<String, Vec<&CellSummary>> = IndexMap::new();
    for row in rows.iter().filter(|r| r.method != "none") {
        sections.entry(k_title(row.k_percent)).or_default().push(row);
    }
    if sections.is_empty() && !baseline.is_empty() {
        sections.insert("baseline".to_string(), Vec::new());
    }

    let mut out = String::from("# Oversampling benchmark results\n");
    for (si, (title, section_rows)) in sections.iter().enumerate() {
        out.push_str(&format!("\n## {title}\n\n"));
        out.push_str("| Method | Metric (%) |");
        for (rep, clf) in &columns {
            out.push_str(&format!(" {rep}/{clf} |"));
        }
        out.push('\n');
        out.push_str("|---|---|");
        out.push_str(&"---|".repeat(columns.len()));
        out.push('\n');

        let mut methods: Vec<&str> = Vec::new();
        if si == 0 && !baseline.is_empty() {
            methods.push("none");
        }
        for row in section_rows.iter() {
            if !methods.contains(&row.method.as_str()) {
                methods.push(&row.method);
            }
        }

        for method in methods {
            let source: Vec<&&CellSummary> = if method == "none" {
                baseline.iter().collect()
            } else {
                section_rows.iter().filter(|r| r.method == method).collect()
            };
            let lookup = |rep: &str, clf: &str| {
                source
                    .iter()
                    .find(|r| r.representation == rep && r.classifier == clf)
                    .copied()
            };
            let metric_rows: [(&str, fn(&CellSummary) -> f64); 4] = [
                ("Accuracy", |r| r.accuracy),
                ("F1 score", |r| r.macro_f1),
                ("Precision", |r| r.macro_precision),
                ("Recall", |r| r.macro_recall),
            ];
            for (mi, (name, get)) in metric_rows.iter().enumerate() {
                let label = if mi == 0 { method } else { "" };
                out.push_str(&format!("| {label} | {name} |"));
                for (rep, clf) in &columns {
                    match lookup(rep, clf) {
                        Some(r) => out.push_str(&format!(" {} |", percent(get(r)))),
                        None => out.push_str(" - |"),
                    }
                }
                out.push('\n');
            }
        }
    }
    out
}

/// Write one report file (`cells.csv` or `report.md`) under `out_dir`.
pub fn emit_report(
    cells: &[ExperimentCell],
    format: ReportFormat,
    out_dir: impl AsRef<Path>,
    include_timings: bool,
) -> Result<PathBuf> {
    if cells.is_empty() {
        return Err(Error::invalid("no cells to report"));
    }
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let rows: Vec<CellSummary> = cells.iter().map(CellSummary::from).collect();
    let (name, body) = match format {
        ReportFormat::Csv => ("cells.csv", render_csv(&rows, include_timings)),
        ReportFormat::Markdown => ("report.md", render_markdown(&rows)),
    };
    let path = out_dir.join(name);
    fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Read a cells CSV back for re-rendering.
pub fn parse_cells_csv(path: impl AsRef<Path>) -> Result<Vec<CellSummary>> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = content.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        Some((_, other)) => {
            return Err(Error::parse(
                path,
                1,
                format!("unexpected header {other:?}"),
            ))
        }
        None => return Err(Error::parse(path, 0, "empty cells file")),
    }

    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("expected 10 fields, found {}", fields.len()),
            ));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse()
                .map_err(|_| Error::parse(path, idx + 1, format!("bad number {:?}", fields[i])))
        };
        rows.push(CellSummary {
            method: fields[0].to_string(),
            representation: fields[1].to_string(),
            classifier: fields[2].to_string(),
            k_percent: num(3)?,
            accuracy: num(4)?,
            macro_f1: num(5)?,
            macro_precision: num(6)?,
            macro_recall: num(7)?,
            seed: fields[8]
                .parse()
                .map_err(|_| Error::parse(path, idx + 1, format!("bad seed {:?}", fields[8])))?,
            wall_time_ms: num(9)?,
        });
    }
    Ok(rows)
}

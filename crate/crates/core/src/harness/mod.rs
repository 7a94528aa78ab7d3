//! Experiment orchestration: configuration, the grid runner, synthetic
//! fixtures and report emission.

mod config;
mod report;
mod run;
mod synth;

pub use config::{ClassifierKind, ExperimentConfig, Method, Representation};
pub use report::{
    emit_report, parse_cells_csv, render_csv, render_markdown, CellSummary, ReportFormat,
    CSV_HEADER,
};
pub use run::{cell_seed, run_experiment, sort_cells, ExperimentCell};
pub use synth::{
    generate_synthetic, parse_spec, read_matrix_csv, write_corpus_tsv, write_matrix_csv,
    ClassSpec, SyntheticSpec,
};

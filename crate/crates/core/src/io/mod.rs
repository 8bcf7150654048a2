//! Files, text specifications and the analysis pipeline used by the CLI.

mod analysis;
mod curves;
mod sequences;
mod spec;

pub use analysis::{
    generate_seed, run_analysis, write_json, AnalysisConfig, AnalysisReport, LayoutReport,
    ResolvedConfig, SequenceReport, TestKind, TestOutcome, REPORT_SCHEMA,
};
pub use curves::{
    analytic_curve, emit_density_curves, histogram_curve, write_curves, Axis, CurveSet,
    DensityCurve, Provenance, MIN_GRID_SIZE, Q_AXIS_MAX,
};
pub use sequences::{
    load_sequences, read_sequences, simulate_command, simulate_sequences, write_sequences,
    LoadedSequences, SequenceKind, MIN_EVENTS,
};
pub use spec::{LayoutSpec, NormalizerSpec, NullSpec, TransformSpec};

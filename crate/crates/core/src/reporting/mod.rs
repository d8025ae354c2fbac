//! Metrics, per-round CSV records, and parameter sweeps.

mod records;
mod sweep;

pub use records::{
    compute_metrics, read_records, read_records_from, write_records, write_records_to, ExperimentRecord, RECORDS_HEADER,
};
pub use sweep::{run_sweep, write_sweep, SweepCell, SweepParameter, SweepResult, SweepSpec, SweepSummary};

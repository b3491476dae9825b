//! Text formats and the bridge from hybrid automata to solver problems.

mod hybrid;
mod problem;
mod sexpr;
mod trace;

pub use hybrid::{encode_bmc, parse_hybrid, HybridAutomaton, Jump, Mode, MAX_PATHS, MAX_VARIABLES};
pub use problem::{default_delta, parse, print};
pub use trace::{emit_trace, trace_columns, trace_records, write_trace, TraceRecord};

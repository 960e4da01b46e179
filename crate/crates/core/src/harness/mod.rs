//! Configuration, built-in cases, snapshots and the study drivers behind the
//! command line.

pub mod cases;
pub mod config;
pub mod norms;
pub mod run;
pub mod snapshot;

pub use cases::init_case;
pub use config::{load_config, parse_config, CaseConfig, CaseKind};
pub use norms::{convergence_rate, l1_diff, restrict, GridField};
pub use run::{compare, converge, run_case, run_single, RunReport};
pub use snapshot::{read_snapshot, write_snapshot};

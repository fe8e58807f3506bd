//! JSON configuration, orchestration and report rendering for the
//! `dsic-audit` command-line auditor.

pub mod config;
pub mod render;
pub mod run;

pub use config::{load_config, parse_config, AuditConfig, ConfigError, Expectation, CHECK_NAMES};
pub use render::render_text;
pub use run::{run_audit, AuditReport, CheckOutcome, Outcome, RunOptions};

/// The bundled Example 1 audit used by `demo-example1`.
pub const EXAMPLE1_AUDIT: &str = include_str!("../fixtures/example1_audit.json");

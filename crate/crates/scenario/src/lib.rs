//! Scenario layer of the Zeno blockade simulator: configuration files,
//! built-in presets, the run pipeline with its output files, and the
//! subspace report.
//!
//! Output files of a run directory:
//!
//! * `probabilities.csv`: `t,P0,P1,...` with `t` in seconds;
//! * `wigner_final.csv`: Wigner function of the final mechanical state;
//! * `summary.json`: resolved parameters, final observables, diagnostics,
//!   the convergence check and the config that reproduces the run;
//! * `spectrum.json`, `partition.json`, `torus.csv` from the subspace report.

// `!(x > 0.0)` also rejects NaN, which the suggested rewrite would not
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod csv;
pub mod error;
pub mod presets;
pub mod report;
pub mod runner;

pub use config::{RunSpec, ScenarioConfig};
pub use error::{Result, ScenarioError};
pub use runner::{run_scenario, simulate, ScenarioOutcome, Simulation, Summary};

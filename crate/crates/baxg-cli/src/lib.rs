//! Benchmark harness around `baxg-core`: instance generation, experiment
//! execution, Lipschitz sweeps, CSV/SVG emission, and the verification
//! table behind the `baxg verify` subcommand.

pub mod csvio;
pub mod generate;
pub mod merit;
pub mod run;
pub mod svg;
pub mod verify_cmd;

//! Command-line front end for `netzero-core`: JSON model files in, JSON
//! reports out.

pub mod commands;
pub mod error;
pub mod model_file;
pub mod report;

pub use commands::{run, Command, Options};
pub use error::CliError;
pub use model_file::{parse_model, parse_model_source, parse_model_str, serialize_model, Model, ModelFile};
pub use report::{write_report, Report, Status};

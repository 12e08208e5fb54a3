//! Synthetic data, CSV input/output and the evaluation harness.

pub mod eval;
pub mod generate;
pub mod io;

pub use eval::{evaluate, run_method, split, write_reports_csv, CondenseReport, Condensed, Method, MethodConfig, SplitSpec};
pub use generate::{Family, GeneratorSpec};
pub use io::{load_csv, load_table, read_csv, save_csv, write_condensed_csv, write_csv, Table};

pub mod asymptotics;
pub mod branch;
pub mod curve;
pub mod error;
pub mod harness;
pub mod recurrence;
pub mod scaled;
pub mod selftest;
pub mod zeros;

pub use error::{Error, Result};
pub use recurrence::{Case, EvalMode, PolyValue, RecurrenceParams};
pub use scaled::{BigFloat, HpComplex, RationalComplex, ScaledComplex};

/// Shortest text that parses back to `v`, switching to scientific notation
/// when the positional form would be long.
pub(crate) fn csv_float(v: f64) -> String {
    let plain = v.to_string();
    if plain.len() <= 24 {
        plain
    } else {
        format!("{v:e}")
    }
}

//! Shared fixtures for the benchmarks.

use prasymp::RecurrenceParams;

/// One parameter set per case, in the order IA, IB, IC, IIA, IIB, IIC.
pub fn representative_params() -> Vec<(&'static str, RecurrenceParams)> {
    [
        ("IA", 1.0, 1.0, 0.0),
        ("IB", 1.0, -1.0, 0.0),
        ("IC", 1.0, 0.0, 0.3),
        ("IIA", 0.0, 0.5, 0.0),
        ("IIB", 0.0, -1.0, 0.0),
        ("IIC", 0.0, 0.0, 0.25),
    ]
    .into_iter()
    .map(|(tag, d, a, b)| (tag, RecurrenceParams::new(d, a, b).expect("finite parameters")))
    .collect()
}

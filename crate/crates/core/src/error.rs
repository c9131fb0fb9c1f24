//! Error type shared across the library.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point}, feature {feature}: value {value} is not finite")]
    NonFinite {
        point: usize,
        feature: usize,
        value: f64,
    },

    #[error("need at least {min} points, got {got}")]
    TooFewPoints { got: usize, min: usize },

    #[error("point {point} has {got} features, expected {expected}")]
    DimensionMismatch {
        point: usize,
        expected: usize,
        got: usize,
    },

    #[error("csv line {line}, field {field}: {message}")]
    Csv {
        line: usize,
        field: usize,
        message: String,
    },

    #[error("invalid blob spec: {0}")]
    InvalidBlobSpec(String),

    #[error("assignment has {got} labels, expected {expected}")]
    AssignmentLength { expected: usize, got: usize },

    #[error("label {label} at point {point}: labels must be 1 or 2")]
    InvalidLabel { point: usize, label: u8 },

    #[error("degenerate assignment: cluster {0} is empty")]
    EmptyCluster(u8),

    #[error("lloyd: {0}")]
    Lloyd(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("matrix is not symmetric: |m[{i}][{j}] - m[{j}][{i}]| = {deviation}")]
    NotSymmetric { i: usize, j: usize, deviation: f64 },

    #[error("fixed index {index} out of range for {num_points} points")]
    FixedIndexOutOfRange { index: usize, num_points: usize },

    #[error("spin vector has {got} spins, expected {expected}")]
    SpinLength { expected: usize, got: usize },

    #[error("spin value {value} at position {position}: spins must be +1 or -1")]
    InvalidSpin { position: usize, value: i8 },

    #[error("basis index {index} out of range for {num_spins} spins")]
    IndexOutOfRange { index: usize, num_spins: usize },

    #[error("{num_spins} spins exceed the enumeration guard of {max}")]
    EnumerationGuard { num_spins: usize, max: usize },

    #[error(
        "{qubits} qubits exceed the cap of {cap}; the state vector alone would need {required_bytes} bytes"
    )]
    QubitCap {
        qubits: usize,
        cap: usize,
        required_bytes: u128,
    },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("time {t} outside the schedule [0, {tau}]")]
    TimeOutsideSchedule { t: f64, tau: f64 },

    #[error("invalid state vector: {0}")]
    InvalidState(String),

    #[error("state vector is not normalized: |psi|^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error(
        "norm drift {drift:.3e} at t = {t} exceeds the budget {budget:.0e} with {steps} steps{}",
        drift_suggestion(.suggested_steps)
    )]
    NormDrift {
        drift: f64,
        t: f64,
        budget: f64,
        steps: usize,
        suggested_steps: Option<usize>,
    },
}

fn drift_suggestion(suggested: &Option<usize>) -> String {
    match suggested {
        Some(steps) => format!("; {steps} steps kept the drift within budget"),
        None => "; no stable step count found within 64x".to_string(),
    }
}

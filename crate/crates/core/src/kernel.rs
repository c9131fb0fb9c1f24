//! Kernel functions and Gram matrix construction.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::cluster::dist_sq;
use crate::data::DataSet;
use crate::error::{Error, Result};

/// Similarity kernel evaluated between pairs of points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Kernel {
    /// Plain inner product.
    Linear,
    /// `exp(-gamma |x - y|^2)`, `gamma > 0`.
    Rbf { gamma: f64 },
    /// `(<x, y> + coef0)^degree`, `degree >= 1`.
    Polynomial { degree: u32, coef0: f64 },
}

impl Kernel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Linear => Ok(()),
            Kernel::Rbf { gamma } => {
                if gamma > 0.0 && gamma.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidKernel(format!(
                        "rbf gamma must be positive, got {gamma}"
                    )))
                }
            }
            Kernel::Polynomial { degree, coef0 } => {
                if degree < 1 {
                    Err(Error::InvalidKernel(
                        "polynomial degree must be at least 1".to_string(),
                    ))
                } else if !coef0.is_finite() {
                    Err(Error::InvalidKernel(format!(
                        "polynomial coef0 must be finite, got {coef0}"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => dot(x, y),
            Kernel::Rbf { gamma } => (-gamma * dist_sq(x, y)).exp(),
            Kernel::Polynomial { degree, coef0 } => (dot(x, y) + coef0).powi(degree as i32),
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Kernel::Linear => write!(f, "linear"),
            Kernel::Rbf { gamma } => write!(f, "rbf:{gamma}"),
            Kernel::Polynomial { degree, coef0 } => write!(f, "poly:{degree}:{coef0}"),
        }
    }
}

impl FromStr for Kernel {
    type Err = Error;

    /// Parses `linear`, `rbf:<gamma>`, or `poly:<degree>:<coef0>`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let kernel = match parts.as_slice() {
            ["linear"] => Kernel::Linear,
            ["rbf", gamma] => Kernel::Rbf {
                gamma: gamma.parse().map_err(|_| {
                    Error::InvalidKernel(format!("cannot parse rbf gamma {gamma:?}"))
                })?,
            },
            ["poly", degree, coef0] => Kernel::Polynomial {
                degree: degree.parse().map_err(|_| {
                    Error::InvalidKernel(format!("cannot parse poly degree {degree:?}"))
                })?,
                coef0: coef0.parse().map_err(|_| {
                    Error::InvalidKernel(format!("cannot parse poly coef0 {coef0:?}"))
                })?,
            },
            _ => {
                return Err(Error::InvalidKernel(format!(
                    "unknown kernel {s:?}; expected linear, rbf:<gamma>, or poly:<degree>:<coef0>"
                )))
            }
        };
        kernel.validate()?;
        Ok(kernel)
    }
}

/// Symmetric matrix of pairwise kernel values.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    values: Vec<f64>,
}

impl GramMatrix {
    /// Build from row-major values; must be square and symmetric within
    /// `1e-12` absolute.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::InvalidKernel(format!(
                "expected {n}x{n} = {} values, got {}",
                n * n,
                values.len()
            )));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let deviation = (values[i * n + j] - values[j * n + i]).abs();
                if deviation > 1e-12 {
                    return Err(Error::NotSymmetric { i, j, deviation });
                }
            }
        }
        Ok(GramMatrix { n, values })
    }

    /// The identity matrix; Gram matrix of orthonormal points.
    pub fn identity(n: usize) -> Self {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = 1.0;
        }
        GramMatrix { n, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Row sums, i.e. the matrix applied to the all-ones vector.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.values[i * self.n..(i + 1) * self.n].iter().sum())
            .collect()
    }
}

/// Pairwise kernel values of the data; the upper triangle is computed and
/// mirrored, so the result is symmetric by construction.
pub fn gram(data: &DataSet, kernel: &Kernel) -> Result<GramMatrix> {
    kernel.validate()?;
    let n = data.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval(data.point(i), data.point(j));
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    Ok(GramMatrix { n, values })
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

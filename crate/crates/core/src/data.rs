//! Data sets: construction, CSV I/O, mean-centering, and Gaussian blob
//! generation.
//!
//! Points live in columns of an `m x n` matrix (features x points); CSV
//! input uses the transposed layout, one point per line.

use std::io::{BufRead, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// A finite sample of `n` real vectors in `m` dimensions.
///
/// Storage is column-major, so each point is one contiguous slice.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    values: Vec<f64>,
    dim: usize,
    len: usize,
    centered: bool,
    point_ids: Vec<String>,
}

impl DataSet {
    /// Build a data set from per-point rows. Rejects ragged rows and
    /// non-finite entries, naming the offending point and feature.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewPoints {
                got: points.len(),
                min: 2,
            });
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                point: 1,
                expected: 1,
                got: 0,
            });
        }
        let mut values = Vec::with_capacity(dim * points.len());
        for (j, point) in points.iter().enumerate() {
            if point.len() != dim {
                return Err(Error::DimensionMismatch {
                    point: j + 1,
                    expected: dim,
                    got: point.len(),
                });
            }
            for (f, &v) in point.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        point: j + 1,
                        feature: f + 1,
                        value: v,
                    });
                }
                values.push(v);
            }
        }
        let len = points.len();
        Ok(DataSet {
            values,
            dim,
            len,
            centered: false,
            point_ids: default_ids(len),
        })
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of features per point.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub fn point_ids(&self) -> &[String] {
        &self.point_ids
    }

    /// The `j`-th point as a feature slice.
    pub fn point(&self, j: usize) -> &[f64] {
        &self.values[j * self.dim..(j + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    /// Largest absolute entry; used to scale tolerances.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Subtract the per-feature mean so every feature row sums to zero.
    /// Already-centered data is returned unchanged.
    pub fn center(&self) -> DataSet {
        if self.centered {
            return self.clone();
        }
        let mut means = vec![0.0; self.dim];
        for point in self.points() {
            for (f, &v) in point.iter().enumerate() {
                means[f] += v;
            }
        }
        for m in &mut means {
            *m /= self.len as f64;
        }
        let mut values = self.values.clone();
        for j in 0..self.len {
            for f in 0..self.dim {
                values[j * self.dim + f] -= means[f];
            }
        }
        DataSet {
            values,
            dim: self.dim,
            len: self.len,
            centered: true,
            point_ids: self.point_ids.clone(),
        }
    }

    /// Per-feature sums; all near zero on centered data.
    pub fn feature_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.dim];
        for point in self.points() {
            for (f, &v) in point.iter().enumerate() {
                sums[f] += v;
            }
        }
        sums
    }

    /// Read points from CSV, one point per line, features separated by
    /// commas. With `has_header` the first line is skipped.
    pub fn read_csv<R: BufRead>(reader: R, has_header: bool) -> Result<Self> {
        let mut points = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.map_err(|e| Error::Csv {
                line: line_no,
                field: 0,
                message: e.to_string(),
            })?;
            if has_header && idx == 0 {
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let mut row = Vec::new();
            for (col, field) in line.split(',').enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| Error::Csv {
                    line: line_no,
                    field: col + 1,
                    message: format!("cannot parse {:?} as a number", field.trim()),
                })?;
                row.push(v);
            }
            points.push(row);
        }
        DataSet::from_points(&points)
    }

    /// Write points as CSV, one point per line. With `header` a
    /// `x1,...,xm` header line is emitted first.
    pub fn write_csv<W: Write>(&self, w: &mut W, header: bool) -> std::io::Result<()> {
        if header {
            let names: Vec<String> = (1..=self.dim).map(|f| format!("x{f}")).collect();
            writeln!(w, "{}", names.join(","))?;
        }
        for point in self.points() {
            let fields: Vec<String> = point.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

fn default_ids(len: usize) -> Vec<String> {
    (1..=len).map(|j| j.to_string()).collect()
}

/// Sample `n1` + `n2` Gaussian points around two centers, then center the
/// result. Deterministic for a fixed seed; cluster-one points come first.
pub fn gen_blobs(
    n1: usize,
    n2: usize,
    center1: &[f64],
    center2: &[f64],
    spread: f64,
    seed: u64,
) -> Result<DataSet> {
    if n1 < 1 || n2 < 1 {
        return Err(Error::InvalidBlobSpec(format!(
            "cluster sizes must be at least 1, got {n1} and {n2}"
        )));
    }
    if center1.is_empty() || center1.len() != center2.len() {
        return Err(Error::InvalidBlobSpec(format!(
            "centers must share a positive dimension, got {} and {}",
            center1.len(),
            center2.len()
        )));
    }
    if center1.iter().chain(center2).any(|v| !v.is_finite()) {
        return Err(Error::InvalidBlobSpec("centers must be finite".to_string()));
    }
    if !(spread > 0.0) || !spread.is_finite() {
        return Err(Error::InvalidBlobSpec(format!(
            "spread must be positive, got {spread}"
        )));
    }
    let normal = Normal::new(0.0, spread)
        .map_err(|e| Error::InvalidBlobSpec(format!("bad spread {spread}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n1 + n2);
    for (count, center) in [(n1, center1), (n2, center2)] {
        for _ in 0..count {
            let point: Vec<f64> = center
                .iter()
                .map(|&c| c + normal.sample(&mut rng))
                .collect();
            points.push(point);
        }
    }
    Ok(DataSet::from_points(&points)?.center())
}

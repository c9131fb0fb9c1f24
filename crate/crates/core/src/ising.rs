//! Ising models for two-way bipartitioning: full and symmetry-broken
//! builders, energy evaluation, spin/basis-index codecs, and the
//! exhaustive ground-state oracle.
//!
//! Energy convention throughout:
//! `E(s) = -sum_ij J_ij s_i s_j - sum_j h_j s_j - c`
//! with the coupling sum running over all ordered pairs.

use std::io::Write;

use serde::Serialize;

use crate::cluster::ClusterAssignment;
use crate::error::{Error, Result};
use crate::kernel::GramMatrix;

/// Largest spin count [`brute_force`] will enumerate.
pub const ENUMERATION_GUARD: usize = 26;

/// A vector over `{-1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinVector {
    spins: Vec<i8>,
}

impl SpinVector {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        for (position, &value) in spins.iter().enumerate() {
            if value != 1 && value != -1 {
                return Err(Error::InvalidSpin { position, value });
            }
        }
        Ok(SpinVector { spins })
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    /// The global spin flip `-s`.
    pub fn flipped(&self) -> SpinVector {
        SpinVector {
            spins: self.spins.iter().map(|s| -s).collect(),
        }
    }

    /// Ket-style rendering, spin 1 leftmost: `+1 -> '0'`, `-1 -> '1'`.
    pub fn ket(&self) -> String {
        self.spins
            .iter()
            .map(|&s| if s > 0 { '0' } else { '1' })
            .collect()
    }
}

/// Basis index of a spin configuration. Spin `i` (1-based) maps to bit
/// `q - i` of the index, so the ket string read left to right is the
/// index in binary and `|0> <-> +1`.
pub fn encode(s: &SpinVector) -> usize {
    let q = s.len();
    let mut index = 0usize;
    for (i, &spin) in s.spins().iter().enumerate() {
        if spin < 0 {
            index |= 1 << (q - 1 - i);
        }
    }
    index
}

/// Inverse of [`encode`].
pub fn decode(index: usize, num_spins: usize) -> Result<SpinVector> {
    if num_spins >= usize::BITS as usize || index >= (1usize << num_spins) {
        return Err(Error::IndexOutOfRange { index, num_spins });
    }
    let spins = (0..num_spins)
        .map(|i| {
            if index >> (num_spins - 1 - i) & 1 == 0 {
                1
            } else {
                -1
            }
        })
        .collect();
    Ok(SpinVector { spins })
}

/// Index of the globally flipped configuration.
pub fn complement(index: usize, num_spins: usize) -> usize {
    !index & ((1usize << num_spins) - 1)
}

/// Binary rendering of a basis index, qubit 1 leftmost.
pub fn ket_string(index: usize, num_spins: usize) -> String {
    (0..num_spins)
        .map(|i| {
            if index >> (num_spins - 1 - i) & 1 == 0 {
                '0'
            } else {
                '1'
            }
        })
        .collect()
}

/// Couplings, linear fields, and a constant offset over `num_spins`
/// spins.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    num_spins: usize,
    couplings: Vec<f64>,
    fields: Vec<f64>,
    offset: f64,
}

impl IsingModel {
    /// Build from row-major couplings (symmetric within `1e-12`
    /// absolute), per-spin fields, and a constant offset.
    pub fn new(
        num_spins: usize,
        couplings: Vec<f64>,
        fields: Vec<f64>,
        offset: f64,
    ) -> Result<Self> {
        if num_spins == 0 {
            return Err(Error::InvalidKernel("model needs at least one spin".to_string()));
        }
        if couplings.len() != num_spins * num_spins {
            return Err(Error::InvalidKernel(format!(
                "expected {num_spins}x{num_spins} couplings, got {}",
                couplings.len()
            )));
        }
        if fields.len() != num_spins {
            return Err(Error::InvalidKernel(format!(
                "expected {num_spins} fields, got {}",
                fields.len()
            )));
        }
        for i in 0..num_spins {
            for j in (i + 1)..num_spins {
                let deviation = (couplings[i * num_spins + j] - couplings[j * num_spins + i]).abs();
                if deviation > 1e-12 {
                    return Err(Error::NotSymmetric { i, j, deviation });
                }
            }
        }
        Ok(IsingModel {
            num_spins,
            couplings,
            fields,
            offset,
        })
    }

    pub fn num_spins(&self) -> usize {
        self.num_spins
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings[i * self.num_spins + j]
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Plain-text dump: `ising v1` header, the spin count, the coupling
    /// rows, the fields, and the offset, all as decimal floats.
    pub fn write_dump<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "ising v1")?;
        writeln!(w, "{}", self.num_spins)?;
        for row in self.couplings.chunks_exact(self.num_spins) {
            writeln!(w, "{}", join_floats(row))?;
        }
        writeln!(w, "{}", join_floats(&self.fields))?;
        writeln!(w, "{}", self.offset)
    }
}

fn join_floats(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// The full model: couplings are the Gram matrix itself, no fields, no
/// offset. Minimizing its energy maximizes `|X s|^2` for the linear
/// kernel; `s` and `-s` always tie.
pub fn ising_full(q: &GramMatrix) -> IsingModel {
    IsingModel {
        num_spins: q.n(),
        couplings: q.values().to_vec(),
        fields: vec![0.0; q.n()],
        offset: 0.0,
    }
}

/// A model over `n - 1` free spins with one spin pinned to `+1`, plus the
/// mapping from reduced positions back to original point indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedModel {
    pub model: IsingModel,
    /// Original index (0-based) of the pinned point.
    pub fixed_index: usize,
    /// Original index of each reduced position, in order.
    pub free_indices: Vec<usize>,
}

impl ReducedModel {
    /// Insert the pinned `+1` spin back into a reduced configuration.
    pub fn embed(&self, s: &SpinVector) -> Result<SpinVector> {
        if s.len() != self.model.num_spins {
            return Err(Error::SpinLength {
                expected: self.model.num_spins,
                got: s.len(),
            });
        }
        let mut spins = Vec::with_capacity(s.len() + 1);
        let mut free = s.spins().iter();
        for position in 0..=s.len() {
            if position == self.fixed_index {
                spins.push(1);
            } else {
                spins.push(*free.next().expect("free spin count matches"));
            }
        }
        Ok(SpinVector { spins })
    }
}

/// Pin the spin of point `fixed_index` (0-based) to `+1` and fold it into
/// fields and offset, so reduced energies equal embedded full energies
/// exactly.
pub fn ising_reduced(q: &GramMatrix, fixed_index: usize) -> Result<ReducedModel> {
    let n = q.n();
    if fixed_index >= n {
        return Err(Error::FixedIndexOutOfRange {
            index: fixed_index,
            num_points: n,
        });
    }
    if n < 2 {
        return Err(Error::TooFewPoints { got: n, min: 2 });
    }
    let free_indices: Vec<usize> = (0..n).filter(|&i| i != fixed_index).collect();
    let m = n - 1;
    let mut couplings = vec![0.0; m * m];
    for (a, &i) in free_indices.iter().enumerate() {
        for (b, &j) in free_indices.iter().enumerate() {
            couplings[a * m + b] = q.get(i, j);
        }
    }
    let fields: Vec<f64> = free_indices
        .iter()
        .map(|&j| 2.0 * q.get(fixed_index, j))
        .collect();
    let offset = q.get(fixed_index, fixed_index);
    Ok(ReducedModel {
        model: IsingModel {
            num_spins: m,
            couplings,
            fields,
            offset,
        },
        fixed_index,
        free_indices,
    })
}

/// Exact energy `-s'Js - h's - c`.
pub fn energy(model: &IsingModel, s: &SpinVector) -> Result<f64> {
    let q = model.num_spins;
    if s.len() != q {
        return Err(Error::SpinLength {
            expected: q,
            got: s.len(),
        });
    }
    let spins = s.spins();
    let mut quadratic = 0.0;
    for i in 0..q {
        let mut row = 0.0;
        for j in 0..q {
            row += model.couplings[i * q + j] * spins[j] as f64;
        }
        quadratic += spins[i] as f64 * row;
    }
    let linear: f64 = model
        .fields
        .iter()
        .zip(spins)
        .map(|(h, &s)| h * s as f64)
        .sum();
    Ok(-quadratic - linear - model.offset)
}

/// Visit `(basis index, energy)` for every configuration in Gray-code
/// order: one spin flips per step, so each energy update costs `O(q)`.
pub(crate) fn walk_energies(model: &IsingModel, mut visit: impl FnMut(usize, f64)) {
    let q = model.num_spins;
    let count = 1usize << q;
    let mut spins = vec![1.0f64; q];
    // local[k] = sum_{j != k} J_kj s_j
    let mut local = vec![0.0f64; q];
    for k in 0..q {
        local[k] = (0..q)
            .filter(|&j| j != k)
            .map(|j| model.couplings[k * q + j])
            .sum();
    }
    let coupling_sum: f64 = model.couplings.iter().sum();
    let field_sum: f64 = model.fields.iter().sum();
    let mut e = -coupling_sum - field_sum - model.offset;
    visit(0, e);
    let mut code = 0usize;
    for i in 1..count {
        let bit = i.trailing_zeros() as usize;
        let k = q - 1 - bit;
        let s_old = spins[k];
        e += 4.0 * s_old * local[k] + 2.0 * model.fields[k] * s_old;
        spins[k] = -s_old;
        let delta = -2.0 * s_old;
        for j in 0..q {
            if j != k {
                local[j] += model.couplings[j * q + k] * delta;
            }
        }
        code ^= 1usize << bit;
        visit(code, e);
    }
}

/// The exact minimum energy and every basis index attaining it within a
/// relative tie tolerance of `1e-9`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundStateSet {
    pub min_energy: f64,
    /// Minimizers in ascending basis-index order.
    pub states: Vec<usize>,
}

/// Enumerate all `2^q` configurations and report the ground set.
///
/// The sweep uses incremental Gray-code updates; candidates near the
/// minimum are re-evaluated exactly before the tie test, so accumulated
/// rounding cannot misclassify a state.
pub fn brute_force(model: &IsingModel) -> Result<GroundStateSet> {
    let q = model.num_spins;
    if q > ENUMERATION_GUARD {
        return Err(Error::EnumerationGuard {
            num_spins: q,
            max: ENUMERATION_GUARD,
        });
    }

    let mut sweep_min = f64::INFINITY;
    let mut max_abs = 0.0f64;
    walk_energies(model, |_, e| {
        if e < sweep_min {
            sweep_min = e;
        }
        max_abs = max_abs.max(e.abs());
    });

    let tie_tol = 1e-9 * sweep_min.abs().max(1.0);
    let slack = (1usize << q) as f64 * f64::EPSILON * max_abs.max(1.0) * 8.0;
    let mut candidates = Vec::new();
    walk_energies(model, |z, e| {
        if e <= sweep_min + tie_tol + 2.0 * slack {
            candidates.push(z);
        }
    });

    let mut exact: Vec<(usize, f64)> = Vec::with_capacity(candidates.len());
    let mut min_energy = f64::INFINITY;
    for z in candidates {
        let e = energy(model, &decode(z, q)?)?;
        if e < min_energy {
            min_energy = e;
        }
        exact.push((z, e));
    }
    let tie_tol = 1e-9 * min_energy.abs().max(1.0);
    let mut states: Vec<usize> = exact
        .into_iter()
        .filter(|&(_, e)| e <= min_energy + tie_tol)
        .map(|(z, _)| z)
        .collect();
    states.sort_unstable();
    Ok(GroundStateSet { min_energy, states })
}

/// Turn spins into cluster labels: `+1 -> 1`, `-1 -> 2`. With
/// `fixed = Some(index)` the pinned point is inserted at that original
/// position with label 1. All-equal labels are rejected as degenerate.
pub fn assignment_from_spins(
    s: &SpinVector,
    fixed: Option<usize>,
) -> Result<ClusterAssignment> {
    let labels: Vec<u8> = match fixed {
        None => s.spins().iter().map(|&v| if v > 0 { 1 } else { 2 }).collect(),
        Some(fixed_index) => {
            let n = s.len() + 1;
            if fixed_index >= n {
                return Err(Error::FixedIndexOutOfRange {
                    index: fixed_index,
                    num_points: n,
                });
            }
            let mut labels = Vec::with_capacity(n);
            let mut free = s.spins().iter();
            for position in 0..n {
                if position == fixed_index {
                    labels.push(1);
                } else {
                    labels.push(if *free.next().expect("length checked") > 0 {
                        1
                    } else {
                        2
                    });
                }
            }
            labels
        }
    };
    ClusterAssignment::new(labels)
}

//! Matrix-free simulation of the annealing schedule: diagonal problem
//! Hamiltonian, transverse-field mixer, fixed-step RK4 integration, and
//! probability traces.
//!
//! The schedule interpolates `H(t) = (1 - t/tau) H_B + (t/tau) H_P` with
//! `H_B` the negative sum of single-qubit bit flips and `H_P` diagonal in
//! the computational basis. Neither operator is ever materialized: the
//! diagonal acts elementwise and the mixer reads one neighbor per qubit,
//! so one application costs `O(q 2^q)`.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ising::{self, IsingModel};

/// Default ceiling on the simulated register size.
pub const DEFAULT_QUBIT_CAP: usize = 22;

/// Largest tolerated `| |psi|^2 - 1 |` at any sample of an accepted run.
pub const NORM_DRIFT_BUDGET: f64 = 1e-6;

/// `2^q` complex amplitudes of a `q`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    qubits: usize,
}

impl StateVector {
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "amplitude count must be a power of two >= 2, got {len}"
            )));
        }
        Ok(StateVector {
            amps,
            qubits: len.trailing_zeros() as usize,
        })
    }

    /// The computational basis state `|index>`.
    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        if index >= 1usize << qubits {
            return Err(Error::IndexOutOfRange {
                index,
                num_spins: qubits,
            });
        }
        let mut amps = vec![Complex64::ZERO; 1 << qubits];
        amps[index] = Complex64::ONE;
        Ok(StateVector { amps, qubits })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// The uniform superposition, i.e. the unique ground state of the mixer
/// with eigenvalue `-q`; every amplitude is the real value `2^(-q/2)`.
pub fn initial_state(qubits: usize) -> StateVector {
    assert!(qubits >= 1, "need at least one qubit");
    let len = 1usize << qubits;
    let amp = Complex64::new(1.0 / (len as f64).sqrt(), 0.0);
    StateVector {
        amps: vec![amp; len],
        qubits,
    }
}

/// Elementwise `|a_i|^2`.
pub fn probabilities(state: &StateVector) -> Vec<f64> {
    state.amps.iter().map(|a| a.norm_sqr()).collect()
}

/// Total time and sampling plan for one evolution.
#[derive(Debug, Clone, Copy)]
pub struct Schedule {
    /// Total anneal time (dimensionless, `hbar = 1`).
    pub tau: f64,
    /// Integrator step count; `None` picks [`default_steps`].
    pub steps: Option<usize>,
    /// Number of trace samples, snapped to integrator steps.
    pub sample_count: usize,
}

/// Everything needed to drive one anneal: the problem diagonal, the
/// mixer strength, and the schedule.
#[derive(Debug, Clone)]
pub struct AnnealSpec {
    qubits: usize,
    hp_diag: Vec<f64>,
    mixer_strength: f64,
    tau: f64,
    steps: usize,
    sample_count: usize,
    energy_scale: f64,
}

impl AnnealSpec {
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn hp_diag(&self) -> &[f64] {
        &self.hp_diag
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    /// Divisor applied to the raw problem diagonal (`1` when energy
    /// normalization is off). Multiply simulated energies by this to
    /// recover model units.
    pub fn energy_scale(&self) -> f64 {
        self.energy_scale
    }
}

/// Step count keeping the RK4 norm drift within an eighth of the budget.
///
/// The worst Fourier component of the state loses `(|E| h)^6 / 72` of its
/// squared norm per step under RK4; bounding `|E|` along the schedule by
/// the line from the mixer norm `q` down to `peak_problem_energy` and
/// integrating the sixth power gives the estimate. Never returns fewer
/// than 40 steps per unit time.
pub fn default_steps(qubits: usize, tau: f64, peak_problem_energy: f64) -> usize {
    let q = qubits as f64;
    let p = peak_problem_energy.abs().max(1e-300);
    let sixth_moment = if (q - p).abs() <= 1e-12 * q.max(p) {
        q.powi(6)
    } else {
        (q.powi(7) - p.powi(7)) / (7.0 * (q - p))
    };
    let budget = NORM_DRIFT_BUDGET / 8.0;
    let bound = (tau.powi(6) * sixth_moment / (72.0 * budget)).powf(0.2);
    bound.max((40.0 * tau).ceil()).max(1.0).ceil() as usize
}

/// Build an [`AnnealSpec`] from an Ising model with the default qubit
/// cap. The diagonal is filled by a Gray-code sweep in `O(q 2^q)` and
/// spot-checked against direct energy evaluation; with
/// `normalize_energy` it is rescaled by `1 / max|H_P|` so a given `tau`
/// means the same thing across data scales.
pub fn build_spec(
    model: &IsingModel,
    schedule: Schedule,
    normalize_energy: bool,
) -> Result<AnnealSpec> {
    build_spec_with_cap(model, schedule, normalize_energy, DEFAULT_QUBIT_CAP)
}

/// [`build_spec`] with an explicit qubit cap.
pub fn build_spec_with_cap(
    model: &IsingModel,
    schedule: Schedule,
    normalize_energy: bool,
    qubit_cap: usize,
) -> Result<AnnealSpec> {
    let qubits = model.num_spins();
    if qubits > qubit_cap {
        return Err(Error::QubitCap {
            qubits,
            cap: qubit_cap,
            required_bytes: (1u128 << qubits) * 16,
        });
    }
    if !schedule.tau.is_finite() || schedule.tau <= 0.0 {
        return Err(Error::InvalidSchedule(format!(
            "tau must be positive, got {}",
            schedule.tau
        )));
    }
    if schedule.sample_count < 2 {
        return Err(Error::InvalidSchedule(format!(
            "sample_count must be at least 2, got {}",
            schedule.sample_count
        )));
    }

    let count = 1usize << qubits;
    let mut hp_diag = vec![0.0; count];
    ising::walk_energies(model, |z, e| hp_diag[z] = e);
    spot_check_diagonal(model, &hp_diag)?;

    let peak_raw = hp_diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (energy_scale, peak) = if normalize_energy && peak_raw > 0.0 {
        (peak_raw, 1.0)
    } else {
        (1.0, peak_raw)
    };
    if energy_scale != 1.0 {
        for v in &mut hp_diag {
            *v /= energy_scale;
        }
    }

    let steps = match schedule.steps {
        Some(0) => {
            return Err(Error::InvalidSchedule("steps must be at least 1".to_string()))
        }
        Some(steps) => steps,
        None => default_steps(qubits, schedule.tau, peak),
    };
    if schedule.sample_count > steps + 1 {
        return Err(Error::InvalidSchedule(format!(
            "sample_count {} exceeds steps + 1 = {}",
            schedule.sample_count,
            steps + 1
        )));
    }

    Ok(AnnealSpec {
        qubits,
        hp_diag,
        mixer_strength: 1.0,
        tau: schedule.tau,
        steps,
        sample_count: schedule.sample_count,
        energy_scale,
    })
}

/// Every diagonal entry must equal the direct model energy of its basis
/// state; spot-sample the sweep output against that route.
fn spot_check_diagonal(model: &IsingModel, hp_diag: &[f64]) -> Result<()> {
    let qubits = model.num_spins();
    let tol = 1e-9 * hp_diag.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d1a6);
    for _ in 0..128 {
        let z = rng.random_range(0..hp_diag.len());
        let direct = ising::energy(model, &ising::decode(z, qubits)?)?;
        assert!(
            (hp_diag[z] - direct).abs() <= tol,
            "diagonal sweep mismatch at basis index {z}: {} vs {}",
            hp_diag[z],
            direct
        );
    }
    Ok(())
}

/// Apply `H(t)` to a state without materializing any matrix:
/// `(H psi)[z] = (t/tau) hp[z] psi[z] - (1 - t/tau) sum_b psi[z ^ bit_b]`.
pub fn apply_hamiltonian(spec: &AnnealSpec, t: f64, state: &StateVector) -> Result<StateVector> {
    if !t.is_finite() || t < 0.0 || t > spec.tau {
        return Err(Error::TimeOutsideSchedule { t, tau: spec.tau });
    }
    if state.qubits != spec.qubits {
        return Err(Error::InvalidState(format!(
            "state has {} qubits, spec has {}",
            state.qubits, spec.qubits
        )));
    }
    let mut out = vec![Complex64::ZERO; state.len()];
    let lambda = t / spec.tau;
    let mixer = (1.0 - lambda) * spec.mixer_strength;
    for (z, dst) in out.iter_mut().enumerate() {
        let mut flips = Complex64::ZERO;
        for b in 0..spec.qubits {
            flips += state.amps[z ^ (1usize << b)];
        }
        *dst = lambda * spec.hp_diag[z] * state.amps[z] - mixer * flips;
    }
    Ok(StateVector {
        amps: out,
        qubits: spec.qubits,
    })
}

/// `dst = -i H(t) src`, the Schrodinger right-hand side.
fn rhs_into(spec: &AnnealSpec, t: f64, src: &[Complex64], dst: &mut [Complex64]) {
    let lambda = t / spec.tau;
    let mixer = (1.0 - lambda) * spec.mixer_strength;
    let qubits = spec.qubits;
    for (z, dst) in dst.iter_mut().enumerate() {
        let mut flips = Complex64::ZERO;
        for b in 0..qubits {
            flips += src[z ^ (1usize << b)];
        }
        let h = lambda * spec.hp_diag[z] * src[z] - mixer * flips;
        *dst = Complex64::new(h.im, -h.re);
    }
}

/// Sampled times, per-state probabilities, and norm drift of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    times: Vec<f64>,
    probabilities: Vec<Vec<f64>>,
    norm_drift: Vec<f64>,
}

impl EvolutionTrace {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn probabilities(&self) -> &[Vec<f64>] {
        &self.probabilities
    }

    pub fn norm_drift(&self) -> &[f64] {
        &self.norm_drift
    }

    pub fn final_probabilities(&self) -> &[f64] {
        self.probabilities.last().expect("trace has samples")
    }

    pub fn max_drift(&self) -> f64 {
        self.norm_drift.iter().fold(0.0, |m, d| m.max(*d))
    }

    pub fn num_states(&self) -> usize {
        self.probabilities.first().map_or(0, Vec::len)
    }

    /// CSV rows `t,state_0,...,state_{2^q-1},norm_drift`, probabilities
    /// with 13 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        write!(w, "t")?;
        for z in 0..self.num_states() {
            write!(w, ",state_{z}")?;
        }
        writeln!(w, ",norm_drift")?;
        for (i, t) in self.times.iter().enumerate() {
            write!(w, "{t}")?;
            for p in &self.probabilities[i] {
                write!(w, ",{p:.12e}")?;
            }
            writeln!(w, ",{:.6e}", self.norm_drift[i])?;
        }
        Ok(())
    }
}

/// Trace plus the final state of one accepted run.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub trace: EvolutionTrace,
    pub final_state: StateVector,
}

/// Integrate the Schrodinger equation over `[0, tau]` with fixed-step
/// classical RK4, recording probabilities and norm drift at the sampled
/// steps. A sample whose drift exceeds [`NORM_DRIFT_BUDGET`] aborts the
/// run (the state is never renormalized); the error reports a step count
/// that stayed within budget, found by step doubling.
pub fn evolve(spec: &AnnealSpec, psi0: &StateVector) -> Result<Evolution> {
    if psi0.qubits != spec.qubits {
        return Err(Error::InvalidState(format!(
            "state has {} qubits, spec has {}",
            psi0.qubits, spec.qubits
        )));
    }
    let norm_sq = psi0.norm_sq();
    if (norm_sq - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { norm_sq });
    }

    let sample_steps = sample_plan(spec.steps, spec.sample_count);
    let mut times = Vec::with_capacity(spec.sample_count);
    let mut probabilities = Vec::with_capacity(spec.sample_count);
    let mut norm_drift = Vec::with_capacity(spec.sample_count);
    let mut breach: Option<(f64, f64)> = None;

    let final_amps = rk4_run(
        spec,
        psi0.amplitudes(),
        spec.steps,
        &sample_steps,
        |t, amps| {
            let drift = (amps.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs();
            if drift > NORM_DRIFT_BUDGET {
                breach = Some((t, drift));
                return false;
            }
            times.push(t);
            probabilities.push(amps.iter().map(|a| a.norm_sqr()).collect());
            norm_drift.push(drift);
            true
        },
    );

    if let Some((t, drift)) = breach {
        return Err(Error::NormDrift {
            drift,
            t,
            budget: NORM_DRIFT_BUDGET,
            steps: spec.steps,
            suggested_steps: estimate_stable_steps(spec, psi0),
        });
    }

    Ok(Evolution {
        trace: EvolutionTrace {
            times,
            probabilities,
            norm_drift,
        },
        final_state: StateVector {
            amps: final_amps,
            qubits: spec.qubits,
        },
    })
}

/// Double the step count until the drift stays within budget at every
/// sample, up to 64x the original.
fn estimate_stable_steps(spec: &AnnealSpec, psi0: &StateVector) -> Option<usize> {
    let mut steps = spec.steps;
    for _ in 0..6 {
        steps = steps.saturating_mul(2);
        let sample_steps = sample_plan(steps, spec.sample_count);
        let mut stable = true;
        rk4_run(spec, psi0.amplitudes(), steps, &sample_steps, |_, amps| {
            let drift = (amps.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs();
            if drift > NORM_DRIFT_BUDGET {
                stable = false;
            }
            stable
        });
        if stable {
            return Some(steps);
        }
    }
    None
}

/// Evenly spaced sample positions snapped to integrator steps; the first
/// is step 0 and the last is the final step.
fn sample_plan(steps: usize, sample_count: usize) -> Vec<usize> {
    (0..sample_count)
        .map(|j| ((j * steps) as f64 / (sample_count - 1) as f64).round() as usize)
        .collect()
}

fn time_at(tau: f64, step: usize, steps: usize) -> f64 {
    if step == steps {
        tau
    } else {
        tau * step as f64 / steps as f64
    }
}

/// Fixed-step RK4 over `[0, tau]`. `on_sample` sees `(t, state)` at every
/// sampled step and returns whether to keep integrating. The state after
/// the last executed step is returned.
fn rk4_run(
    spec: &AnnealSpec,
    psi0: &[Complex64],
    steps: usize,
    sample_steps: &[usize],
    mut on_sample: impl FnMut(f64, &[Complex64]) -> bool,
) -> Vec<Complex64> {
    let n = psi0.len();
    let h = spec.tau / steps as f64;
    let mut y = psi0.to_vec();
    let mut k1 = vec![Complex64::ZERO; n];
    let mut k2 = vec![Complex64::ZERO; n];
    let mut k3 = vec![Complex64::ZERO; n];
    let mut k4 = vec![Complex64::ZERO; n];
    let mut stage = vec![Complex64::ZERO; n];
    let mut samples = sample_steps.iter().peekable();

    for step in 0..=steps {
        if samples.peek() == Some(&&step) {
            samples.next();
            if !on_sample(time_at(spec.tau, step, steps), &y) {
                return y;
            }
        }
        if step == steps {
            break;
        }
        let t0 = time_at(spec.tau, step, steps);
        let tm = spec.tau * (step as f64 + 0.5) / steps as f64;
        let t1 = time_at(spec.tau, step + 1, steps);

        rhs_into(spec, t0, &y, &mut k1);
        for z in 0..n {
            stage[z] = y[z] + 0.5 * h * k1[z];
        }
        rhs_into(spec, tm, &stage, &mut k2);
        for z in 0..n {
            stage[z] = y[z] + 0.5 * h * k2[z];
        }
        rhs_into(spec, tm, &stage, &mut k3);
        for z in 0..n {
            stage[z] = y[z] + h * k3[z];
        }
        rhs_into(spec, t1, &stage, &mut k4);
        for z in 0..n {
            y[z] += h / 6.0 * (k1[z] + 2.0 * k2[z] + 2.0 * k3[z] + k4[z]);
        }
    }
    y
}

/// Final-sample probabilities, largest first, ties broken by ascending
/// basis index.
pub fn top_states(trace: &EvolutionTrace, k: usize) -> Vec<(usize, f64)> {
    let finals = trace.final_probabilities();
    let mut ranked: Vec<(usize, f64)> = finals.iter().copied().enumerate().collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    ranked.truncate(k);
    ranked
}

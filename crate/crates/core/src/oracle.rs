//! Brute-force reference: fixed-step fourth-order integration of the
//! Haberkorn master equation on the full joint space, for any `ks`, `kt`.
//!
//! The equation
//! `ρ̇ = −i[H, ρ] − (ks/2){Q_S, ρ} − (kt/2){Q_T, ρ}`
//! has no jump term, so `ρ(t) = U(t) ρ(0) U(t)†` with `U̇ = A·U` and
//! `A = −iH − ½(ks·Q_S + kt·Q_T)`. One classical RK4 step of that linear
//! equation is exactly multiplication by
//! `P = I + hA + (hA)²/2 + (hA)³/6 + (hA)⁴/24`. Long horizons are covered by
//! raising `P` to the number of steps per record interval with repeated
//! squaring, and the yield integrals are accumulated with composite Simpson
//! weights over every individual step.

use serde::Serialize;

use crate::coherence::{assemble_series, relative_entropy_of_coherence, CoherenceOptions, TraceMetadata, TraceSeries};
use crate::config::RadicalPairConfig;
use crate::dynamics::{singlet_projector, DensityMatrix, JointLayout, ProjectorPair};
use crate::error::{Error, Result};
use crate::hamiltonian::build_joint_hamiltonian;
use crate::spin::ComplexMatrix;
use num_complex::Complex64 as C64;

/// Largest joint dimension accepted by the oracle.
pub const ORACLE_DIM_CAP: usize = 256;
/// Stability bound: `dt·max(‖H‖₁, ks, kt) ≤ STABILITY_LIMIT`.
pub const STABILITY_LIMIT: f64 = 0.05;
/// Default step as a fraction of the stability scale.
pub const DEFAULT_STEP_FRACTION: f64 = 0.005;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleSettings {
    /// Largest allowed step; the actual step divides each record interval.
    pub dt: f64,
    pub horizon: f64,
    /// Spacing of stored states and yield checkpoints.
    pub record_interval: f64,
    /// Keep the density matrix at every record.
    pub keep_states: bool,
}

impl OracleSettings {
    pub fn new(dt: f64, horizon: f64, record_interval: f64) -> Self {
        OracleSettings {
            dt,
            horizon,
            record_interval,
            keep_states: true,
        }
    }

    /// Default step for `config`, `records` checkpoints over `horizon`.
    pub fn for_config(config: &RadicalPairConfig, horizon: f64, records: usize) -> Result<Self> {
        let scale = stability_scale(config)?;
        Ok(OracleSettings::new(
            DEFAULT_STEP_FRACTION / scale,
            horizon,
            horizon / records.max(1) as f64,
        ))
    }

    pub fn without_states(mut self) -> Self {
        self.keep_states = false;
        self
    }
}

/// `max(‖H‖₁, ks, kt)`, an upper bound on the fastest rate in the equation.
pub fn stability_scale(config: &RadicalPairConfig) -> Result<f64> {
    let h = build_joint_hamiltonian(config)?;
    Ok(one_norm(&h).max(config.rates.ks).max(config.rates.kt))
}

fn one_norm(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    (0..n)
        .map(|j| (0..n).map(|i| m.get(i, j).norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Joint states at `times`; empty when states were not kept.
    pub states: Vec<DensityMatrix>,
    /// `Tr[Q_S ρ]` at `times`.
    pub singlet_probability: Vec<f64>,
    /// `Tr ρ` at `times`.
    pub population: Vec<f64>,
    /// `∫₀ᵗ ks·Tr[Q_S ρ]` at `times`.
    pub singlet_yield: Vec<f64>,
    /// `∫₀ᵗ kt·Tr[Q_T ρ]` at `times`.
    pub triplet_yield: Vec<f64>,
    /// Integration step actually used.
    pub step: f64,
    pub config_digest: String,
}

impl Trajectory {
    pub fn final_singlet_yield(&self) -> f64 {
        *self.singlet_yield.last().expect("trajectory has at least one record")
    }

    /// Singlet plus triplet recombination at the horizon.
    pub fn total_recombined(&self) -> f64 {
        self.final_singlet_yield() + self.triplet_yield.last().copied().unwrap_or(0.0)
    }
}

/// Generator `A = −iH − ½(ks·Q_S + kt·Q_T)`.
pub fn generator(h: &ComplexMatrix, projectors: &ProjectorPair, ks: f64, kt: f64) -> ComplexMatrix {
    let decay = &projectors.qs.scale_real(0.5 * ks) + &projectors.qt.scale_real(0.5 * kt);
    &h.scale(C64::new(0.0, -1.0)) - &decay
}

/// `I + hA + (hA)²/2 + (hA)³/6 + (hA)⁴/24`.
pub fn rk4_propagator(a: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let ha = a.scale_real(h);
    let id = ComplexMatrix::identity(a.dim());
    let mut p = &id + &ha.scale_real(0.25);
    for div in [3.0, 2.0, 1.0] {
        p = &id + &ha.matmul(&p).scale_real(1.0 / div);
    }
    p
}

/// One classical RK4 step of `ρ̇ = Aρ + ρA†` applied to `ρ` directly.
pub fn rk4_density_step(a: &ComplexMatrix, rho: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let ah = a.adjoint();
    let f = |r: &ComplexMatrix| &a.matmul(r) + &r.matmul(&ah);
    let k1 = f(rho);
    let k2 = f(&(rho + &k1.scale_real(h / 2.0)));
    let k3 = f(&(rho + &k2.scale_real(h / 2.0)));
    let k4 = f(&(rho + &k3.scale_real(h)));
    let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
    rho + &incr.scale_real(h / 6.0)
}

/// One classical RK4 step of `U̇ = A·U`.
pub fn rk4_propagator_step(a: &ComplexMatrix, u: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let k1 = a.matmul(u);
    let k2 = a.matmul(&(u + &k1.scale_real(h / 2.0)));
    let k3 = a.matmul(&(u + &k2.scale_real(h / 2.0)));
    let k4 = a.matmul(&(u + &k3.scale_real(h)));
    let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
    u + &incr.scale_real(h / 6.0)
}

/// `(Σ_{i<count} (Xⁱ)† Q Xⁱ, X^count)`.
fn geometric_sandwich(x: &ComplexMatrix, q: &ComplexMatrix, count: u64) -> (ComplexMatrix, ComplexMatrix) {
    if count == 0 {
        return (ComplexMatrix::zeros(x.dim()), ComplexMatrix::identity(x.dim()));
    }
    let (sum, pow) = geometric_sandwich(x, q, count / 2);
    let mut sum = &sum + &sandwich(&pow, &sum);
    let mut pow = pow.matmul(&pow);
    if count % 2 == 1 {
        sum += &sandwich(&pow, q);
        pow = pow.matmul(x);
    }
    (sum, pow)
}

/// `P† M P`.
fn sandwich(p: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    p.adjoint().matmul(&m.matmul(p))
}

/// `ρ ↦ P ρ P†`, re-symmetrized.
fn conjugate(p: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    p.matmul(rho).matmul(&p.adjoint()).hermitian_part()
}

/// Simpson weights over `m` (even) steps of length `h`, folded into a single
/// observable: `K = (h/3)·Σ_i w_i (Pⁱ)† Q Pⁱ`.
fn simpson_observable(p: &ComplexMatrix, q: &ComplexMatrix, steps: u64, h: f64) -> (ComplexMatrix, ComplexMatrix) {
    debug_assert!(steps % 2 == 0 && steps > 0);
    let p2 = p.matmul(p);
    let (even, p_m) = geometric_sandwich(&p2, q, steps / 2);
    let mut k = even.scale_real(2.0);
    k -= q;
    k += &sandwich(&p_m, q);
    k += &sandwich(p, &even).scale_real(4.0);
    (k.scale_real(h / 3.0), p_m)
}

#[cfg(test)]
fn matrix_power(p: &ComplexMatrix, e: u64) -> ComplexMatrix {
    geometric_sandwich(p, &ComplexMatrix::zeros(p.dim()), e).1
}

/// Integrates the master equation from `ρ(0) = Q_S/N`.
pub fn integrate_master_equation(config: &RadicalPairConfig, settings: &OracleSettings) -> Result<Trajectory> {
    let dim = config.joint_dim();
    if dim > ORACLE_DIM_CAP {
        return Err(Error::DimensionCap {
            what: "oracle joint",
            dim,
            cap: ORACLE_DIM_CAP,
        });
    }
    let (ks, kt) = (config.rates.ks, config.rates.kt);
    if !(ks > 0.0 && kt > 0.0) {
        return Err(Error::Validation("recombination rates must be positive".into()));
    }
    let h_joint = build_joint_hamiltonian(config)?;
    let scale = one_norm(&h_joint).max(ks).max(kt);
    let max_dt = STABILITY_LIMIT / scale;
    let OracleSettings {
        dt,
        horizon,
        record_interval,
        keep_states,
    } = *settings;
    if !(dt > 0.0 && dt <= max_dt) {
        return Err(Error::Precondition(format!(
            "oracle step must satisfy 0 < dt <= {STABILITY_LIMIT}/max(|H|, ks, kt) = {max_dt:e} s (got {dt:e} s)"
        )));
    }
    if !(horizon > 0.0 && record_interval > 0.0 && record_interval <= horizon) {
        return Err(Error::Precondition(format!(
            "need 0 < record interval <= horizon (got {record_interval:e} s, {horizon:e} s)"
        )));
    }
    let records = (horizon / record_interval - 1e-9).ceil().max(1.0) as usize;
    let interval = horizon / records as f64;
    let mut steps = (interval / dt - 1e-9).ceil().max(2.0) as u64;
    if steps % 2 == 1 {
        steps += 1;
    }
    let h = interval / steps as f64;

    let projectors = singlet_projector(config)?;
    let a = generator(&h_joint, &projectors, ks, kt);
    let p = rk4_propagator(&a, h);
    let (k_singlet, p_interval) = simpson_observable(&p, &projectors.qs, steps, h);
    let (k_triplet, _) = simpson_observable(&p, &projectors.qt, steps, h);

    let layout = JointLayout::of(config);
    let mut rho = projectors.qs.scale_real(1.0 / config.nuclear_dim() as f64);
    let mut traj = Trajectory {
        times: Vec::with_capacity(records + 1),
        states: Vec::new(),
        singlet_probability: Vec::with_capacity(records + 1),
        population: Vec::with_capacity(records + 1),
        singlet_yield: Vec::with_capacity(records + 1),
        triplet_yield: Vec::with_capacity(records + 1),
        step: h,
        config_digest: config.digest(),
    };
    let (mut ys, mut yt) = (0.0, 0.0);
    for j in 0..=records {
        let t = j as f64 * interval;
        traj.times.push(t);
        traj.singlet_probability.push(projectors.qs.matmul(&rho).trace().re);
        traj.population.push(rho.trace().re);
        traj.singlet_yield.push(ys);
        traj.triplet_yield.push(yt);
        if keep_states {
            traj.states.push(DensityMatrix {
                matrix: rho.clone(),
                time: t,
                layout: layout.clone(),
            });
        }
        if j < records {
            ys += ks * k_singlet.matmul(&rho).trace().re;
            yt += kt * k_triplet.matmul(&rho).trace().re;
            rho = conjugate(&p_interval, &rho);
        }
    }
    Ok(traj)
}

/// Coherence of every stored state of a trajectory.
pub fn oracle_coherence(trajectory: &Trajectory, options: &CoherenceOptions) -> Result<TraceSeries> {
    if trajectory.states.is_empty() {
        return Err(Error::Precondition("trajectory was integrated without keeping states".into()));
    }
    let values = trajectory
        .states
        .iter()
        .map(|s| relative_entropy_of_coherence(s, options))
        .collect();
    assemble_series(
        &trajectory.times,
        values,
        TraceMetadata {
            config_digest: trajectory.config_digest.clone(),
            options: *options,
            truncated_at: None,
        },
    )
}

//! Relative entropy of coherence `C(ρ) = S(ρ_diag) − S(ρ)` and its evolution
//! over time.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RadicalPairConfig;
use crate::dynamics::{DensityMatrix, PairDynamics};
use crate::error::{Error, Result};
use crate::spin::ComplexMatrix;

/// Trace tolerance for a normalized state.
pub const TRACE_TOLERANCE: f64 = 1e-9;
/// Eigenvalues in `[−NEGATIVE_TOLERANCE, 0)` are clamped to zero.
pub const NEGATIVE_TOLERANCE: f64 = 1e-10;
/// States whose trace has decayed below this are not evaluated.
pub const DEGENERATE_TRACE: f64 = 1e-250;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subsystem {
    /// Electrons and nuclei together.
    #[default]
    Joint,
    /// The two electrons after tracing out every nucleus.
    Electrons,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Product of `Sz`/`Iz` eigenstates.
    #[default]
    ProductZ,
    /// Singlet/triplet states for the electron pair (`S, T+, T0, T−`), nuclei
    /// left in their `Iz` basis.
    SingletTriplet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CoherenceOptions {
    pub subsystem: Subsystem,
    pub basis: Basis,
    /// Divide by the trace before taking entropies.
    pub renormalize: bool,
}

impl Default for CoherenceOptions {
    fn default() -> Self {
        CoherenceOptions {
            subsystem: Subsystem::Joint,
            basis: Basis::ProductZ,
            renormalize: true,
        }
    }
}

impl CoherenceOptions {
    pub fn electrons() -> Self {
        CoherenceOptions {
            subsystem: Subsystem::Electrons,
            ..Self::default()
        }
    }

    pub fn with_basis(mut self, basis: Basis) -> Self {
        self.basis = basis;
        self
    }

    pub fn with_renormalize(mut self, renormalize: bool) -> Self {
        self.renormalize = renormalize;
        self
    }
}

/// `−Σ λ ln λ` over the given (possibly sub-normalized) spectrum.
fn entropy_functional(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < -NEGATIVE_TOLERANCE {
            return Err(Error::NegativeEigenvalue(l));
        }
        if l > 0.0 {
            s -= l * l.ln();
        }
    }
    Ok(s)
}

/// Von Neumann entropy of a unit-trace Hermitian matrix.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > TRACE_TOLERANCE {
        return Err(Error::TraceNotUnit {
            trace,
            tolerance: TRACE_TOLERANCE,
        });
    }
    Ok(entropy_functional(&rho.hermitian_part().hermitian_eigenvalues()?)?.max(0.0))
}

/// Diagonal of `ρ` in the singlet/triplet basis for the electron pair.
///
/// `electron_index(e, ν)` maps an electron-pair product index
/// `e ∈ {↑↑, ↑↓, ↓↑, ↓↓}` and a nuclear index `ν` to a row of `ρ`.
fn singlet_triplet_diagonal(rho: &ComplexMatrix, sectors: usize, electron_index: impl Fn(usize, usize) -> usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(4 * sectors);
    for nu in 0..sectors {
        let idx = |e: usize| electron_index(e, nu);
        let uu = rho.get(idx(0), idx(0)).re;
        let ud = rho.get(idx(1), idx(1)).re;
        let du = rho.get(idx(2), idx(2)).re;
        let dd = rho.get(idx(3), idx(3)).re;
        let cross = rho.get(idx(1), idx(2)).re;
        out.extend([0.5 * (ud + du) - cross, uu, 0.5 * (ud + du) + cross, dd]);
    }
    out
}

/// Row index of electron-pair state `e` and nuclear state `(iA, iB)` in the
/// joint ordering (electron A, nuclei A, electron B, nuclei B).
fn joint_index(na: usize, nb: usize) -> impl Fn(usize, usize) -> usize {
    move |e, nu| {
        let (ea, eb) = (e / 2, e % 2);
        let (ia, ib) = (nu / nb, nu % nb);
        ((ea * na + ia) * 2 + eb) * nb + ib
    }
}

/// Coherence of a matrix already restricted to the chosen subsystem.
///
/// `nuclear` gives the nuclear dimensions `(N_A, N_B)` when `rho` is the
/// joint state and the basis is singlet/triplet; pass `(1, 1)` for a
/// two-electron matrix.
fn coherence_of(rho: &ComplexMatrix, basis: Basis, nuclear: (usize, usize), renormalize: bool) -> Result<f64> {
    let trace = rho.trace().re;
    if trace <= DEGENERATE_TRACE {
        return Err(Error::DegenerateState(trace));
    }
    let rho = if renormalize {
        rho.hermitian_part().scale_real(1.0 / trace)
    } else {
        rho.hermitian_part()
    };
    let diagonal: Vec<f64> = match basis {
        Basis::ProductZ => rho.diagonal().iter().map(|z| z.re).collect(),
        Basis::SingletTriplet => {
            let (na, nb) = nuclear;
            singlet_triplet_diagonal(&rho, na * nb, joint_index(na, nb))
        }
    };
    let s_diag = entropy_functional(&diagonal)?;
    let s_full = entropy_functional(&rho.hermitian_eigenvalues()?)?;
    Ok((s_diag - s_full).max(0.0))
}

/// `C(ρ)` for a joint-space state under the given options.
pub fn relative_entropy_of_coherence(rho: &DensityMatrix, options: &CoherenceOptions) -> Result<f64> {
    match options.subsystem {
        Subsystem::Joint => coherence_of(&rho.matrix, options.basis, rho.layout.nuclear_dims(), options.renormalize),
        Subsystem::Electrons => coherence_of(&rho.electron_state(), options.basis, (1, 1), options.renormalize),
    }
}

/// `C(ρ)` for a two-electron matrix in the `↑↑, ↑↓, ↓↑, ↓↓` ordering.
pub fn electron_coherence(rho: &ComplexMatrix, basis: Basis, renormalize: bool) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "two-electron state must be 4x4 (got {0}x{0})",
            rho.dim()
        )));
    }
    coherence_of(rho, basis, (1, 1), renormalize)
}

/// Unitary taking product-basis coordinates of the electron pair to
/// `S, T+, T0, T−` coordinates, extended by the identity on the nuclei.
pub fn singlet_triplet_change_of_basis(nuclear: (usize, usize)) -> ComplexMatrix {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // rows: S, T+, T0, T−; columns: ↑↑, ↑↓, ↓↑, ↓↓
    let w = [
        [0.0, r, -r, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, r, r, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ];
    let (na, nb) = nuclear;
    let sectors = na * nb;
    let idx = joint_index(na, nb);
    let mut u = ComplexMatrix::zeros(4 * sectors);
    for nu in 0..sectors {
        for (row, coeffs) in w.iter().enumerate() {
            for (col, &c) in coeffs.iter().enumerate() {
                if c != 0.0 {
                    u.set(idx(row, nu), idx(col, nu), C64::new(c, 0.0));
                }
            }
        }
    }
    u
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceMetadata {
    pub config_digest: String,
    pub options: CoherenceOptions,
    /// Time at which the series stopped because the state had decayed away.
    pub truncated_at: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub metadata: TraceMetadata,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::Precondition("times must be finite and non-negative".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("times must be strictly increasing".into()));
    }
    Ok(())
}

/// Collects per-time results, stopping at the first degenerate state.
pub(crate) fn assemble_series(
    times: &[f64],
    values: Vec<Result<f64>>,
    metadata: TraceMetadata,
) -> Result<TraceSeries> {
    let mut series = TraceSeries {
        times: Vec::with_capacity(times.len()),
        values: Vec::with_capacity(times.len()),
        metadata,
    };
    for (&t, v) in times.iter().zip(values) {
        match v {
            Ok(v) => {
                series.times.push(t);
                series.values.push(v);
            }
            Err(Error::DegenerateState(_)) => {
                series.metadata.truncated_at = Some(t);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(series)
}

/// `C(ρ(t))` at each requested time.
pub fn coherence_trace(config: &RadicalPairConfig, times: &[f64], options: &CoherenceOptions) -> Result<TraceSeries> {
    check_times(times)?;
    let dynamics = PairDynamics::new(config)?;
    coherence_trace_with(&dynamics, &config.digest(), times, options)
}

pub(crate) fn coherence_trace_with(
    dynamics: &PairDynamics,
    digest: &str,
    times: &[f64],
    options: &CoherenceOptions,
) -> Result<TraceSeries> {
    let values: Vec<Result<f64>> = times
        .par_iter()
        .map(|&t| match options.subsystem {
            Subsystem::Electrons => electron_coherence(&dynamics.electron_state(t), options.basis, options.renormalize),
            Subsystem::Joint => relative_entropy_of_coherence(&dynamics.density_matrix(t), options),
        })
        .collect();
    assemble_series(
        times,
        values,
        TraceMetadata {
            config_digest: digest.to_string(),
            options: *options,
            truncated_at: None,
        },
    )
}

/// `count` evenly spaced times on `[0, end]`.
pub fn uniform_times(end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count).map(|i| end * i as f64 / (count - 1) as f64).collect(),
    }
}

//! Singlet yield for equal recombination rates: a closed-form Lorentzian sum
//! and a direct time integral of the decaying singlet probability.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RadicalPairConfig;
use crate::dynamics::{EigenSystem, PairDynamics};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum YieldMethod {
    ClosedForm,
    Integrated,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct YieldResult {
    pub value: f64,
    pub method: YieldMethod,
    pub config_digest: String,
    /// Upper bound on the population not covered by the integration window.
    pub tail_bound: Option<f64>,
}

/// Products whose magnitude bound falls below this are skipped unless
/// [`ClosedFormOptions::exact`] is set.
pub const TERM_SKIP_THRESHOLD: f64 = 1e-18;

/// Imaginary residual of the quadruple sum, divided by `N`, above which the
/// evaluation is treated as a bug.
pub const IMAGINARY_TOLERANCE: f64 = 1e-9;

/// Work items per parallel chunk. Fixed so that the reduction order, and
/// therefore every bit of the result, is independent of the worker count.
const CHUNK: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClosedFormOptions {
    /// Keep every term regardless of magnitude.
    pub exact: bool,
}

/// Matrix-element products `a_pq(mn) = (S_p)_mn (S_q)_nm` of one radical,
/// stored per `(m,n)` with the frequency gap `ω_m − ω_n`.
struct PairTable {
    gaps: Vec<f64>,
    re: Vec<[f64; 9]>,
    im: Vec<[f64; 9]>,
    bound: Vec<f64>,
}

impl PairTable {
    fn new(eig: &EigenSystem) -> Self {
        let d = eig.dim();
        let ops = eig.spin_in_eigenbasis.components();
        let mut t = PairTable {
            gaps: Vec::with_capacity(d * d),
            re: Vec::with_capacity(d * d),
            im: Vec::with_capacity(d * d),
            bound: Vec::with_capacity(d * d),
        };
        for m in 0..d {
            for n in 0..d {
                let mut re = [0.0; 9];
                let mut im = [0.0; 9];
                let mut bound = 0.0f64;
                for p in 0..3 {
                    for q in 0..3 {
                        let z: C64 = ops[p].get(m, n) * ops[q].get(n, m);
                        re[3 * p + q] = z.re;
                        im[3 * p + q] = z.im;
                        bound = bound.max(z.norm());
                    }
                }
                t.gaps.push(eig.eigenvalues[m] - eig.eigenvalues[n]);
                t.re.push(re);
                t.im.push(im);
                t.bound.push(bound);
            }
        }
        t
    }
}

/// `Φ_S = ¼ + (1/N) Σ_{mn,sr} W(mn,sr)·k²/(k² + (Δ_A,mn + Δ_B,sr)²)` with
/// `W = Σ_pq a_pq(mn)·b_pq(sr)`.
pub fn singlet_yield_closed(config: &RadicalPairConfig) -> Result<YieldResult> {
    singlet_yield_closed_with(config, ClosedFormOptions::default())
}

pub fn singlet_yield_closed_with(config: &RadicalPairConfig, options: ClosedFormOptions) -> Result<YieldResult> {
    let dynamics = PairDynamics::new(config)?;
    let value = closed_form_value(&dynamics, options)?;
    Ok(YieldResult {
        value,
        method: YieldMethod::ClosedForm,
        config_digest: config.digest(),
        tail_bound: None,
    })
}

pub(crate) fn closed_form_value(dynamics: &PairDynamics, options: ClosedFormOptions) -> Result<f64> {
    let k = dynamics.rate();
    let k2 = k * k;
    let a = PairTable::new(&dynamics.a);
    let b = PairTable::new(&dynamics.b);
    let b_max = b.bound.iter().fold(0.0f64, |m, &x| m.max(x));
    let threshold = if options.exact { -1.0 } else { TERM_SKIP_THRESHOLD };

    let rows: Vec<usize> = (0..a.gaps.len()).collect();
    let partials: Vec<(f64, f64)> = rows
        .par_chunks(CHUNK)
        .map(|chunk| {
            let (mut re_sum, mut im_sum) = (0.0, 0.0);
            for &i in chunk {
                if a.bound[i] * b_max < threshold {
                    continue;
                }
                let (ar, ai, ga, bound_a) = (&a.re[i], &a.im[i], a.gaps[i], a.bound[i]);
                for j in 0..b.gaps.len() {
                    if bound_a * b.bound[j] < threshold {
                        continue;
                    }
                    let (br, bi) = (&b.re[j], &b.im[j]);
                    let mut wr = 0.0;
                    let mut wi = 0.0;
                    for c in 0..9 {
                        wr += ar[c] * br[c] - ai[c] * bi[c];
                        wi += ar[c] * bi[c] + ai[c] * br[c];
                    }
                    let gap = ga + b.gaps[j];
                    let weight = k2 / (k2 + gap * gap);
                    re_sum += wr * weight;
                    im_sum += wi * weight;
                }
            }
            (re_sum, im_sum)
        })
        .collect();

    let n = dynamics.nuclear_dim() as f64;
    let (re, im) = partials.iter().fold((0.0, 0.0), |(r, i), (pr, pi)| (r + pr, i + pi));
    if (im / n).abs() > IMAGINARY_TOLERANCE {
        return Err(Error::ImaginaryResidual(im / n));
    }
    Ok(0.25 + re / n)
}

/// Time-integrated yield `∫₀^T k·ρ_S(τ)·e^{−kτ} dτ` by composite Simpson.
///
/// Requires `horizon ≥ 10/k` and `dt ≤ 0.1/max|Δω|`, where `max|Δω|` is the
/// widest eigenfrequency gap of the joint Hamiltonian.
pub fn singlet_yield_integrated(config: &RadicalPairConfig, horizon: f64, dt: f64) -> Result<YieldResult> {
    let dynamics = PairDynamics::new(config)?;
    let k = dynamics.rate();
    let min_horizon = 10.0 / k;
    if !(horizon >= min_horizon) {
        return Err(Error::Precondition(format!(
            "horizon must be at least 10/k = {min_horizon:e} s (got {horizon:e} s)"
        )));
    }
    let gap = dynamics.max_gap();
    let max_dt = if gap > 0.0 { 0.1 / gap } else { f64::INFINITY };
    if !(dt > 0.0 && dt <= max_dt) {
        return Err(Error::Precondition(format!(
            "dt must be positive and at most 0.1/max|Δω| = {max_dt:e} s (got {dt:e} s)"
        )));
    }

    let mut steps = (horizon / dt).ceil() as usize;
    if steps % 2 == 1 {
        steps += 1;
    }
    let h = horizon / steps as f64;
    let nodes: Vec<usize> = (0..=steps).collect();
    let partials: Vec<f64> = nodes
        .par_chunks(4096)
        .map(|chunk| {
            let mut scratch = Vec::new();
            let mut acc = 0.0;
            for &i in chunk {
                let w = if i == 0 || i == steps {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += w * dynamics.singlet_probability_with(i as f64 * h, true, &mut scratch);
            }
            acc
        })
        .collect();
    let value = k * h / 3.0 * partials.iter().sum::<f64>();
    Ok(YieldResult {
        value,
        method: YieldMethod::Integrated,
        config_digest: config.digest(),
        tail_bound: Some((-k * horizon).exp()),
    })
}

/// The largest step accepted by [`singlet_yield_integrated`].
pub fn max_integration_step(config: &RadicalPairConfig) -> Result<f64> {
    let gap = PairDynamics::new(config)?.max_gap();
    Ok(if gap > 0.0 { 0.1 / gap } else { f64::INFINITY })
}

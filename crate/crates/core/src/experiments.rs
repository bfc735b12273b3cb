//! Yield-vs-angle profiles, compass sensitivity and the parameter sweeps,
//! with CSV and JSON-sidecar output.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::coherence::{coherence_trace_with, CoherenceOptions, TraceSeries};
use crate::config::{HyperfineTensor, RadicalPairConfig};
use crate::dynamics::PairDynamics;
use crate::error::{Error, Result};
use crate::yields::{closed_form_value, ClosedFormOptions};

/// Longitudinal component used by the transverse sweep, in mT.
pub const TRANSVERSE_SWEEP_AZ: f64 = 1.0812;

/// Inclination samples and a fixed azimuth.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleGrid {
    pub thetas: Vec<f64>,
    pub phi: f64,
}

impl Default for AngleGrid {
    /// 91 points on `[0, π/2]`, `φ = 0`.
    fn default() -> Self {
        AngleGrid::uniform(0.0, FRAC_PI_2, 91).expect("default grid is valid")
    }
}

impl AngleGrid {
    pub fn new(thetas: Vec<f64>, phi: f64) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::Validation("angle grid must not be empty".into()));
        }
        if thetas.iter().any(|t| !(0.0..=PI).contains(t)) {
            return Err(Error::Validation("angle grid values must lie in [0, pi]".into()));
        }
        if thetas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation("angle grid must be strictly increasing".into()));
        }
        if !phi.is_finite() {
            return Err(Error::Validation("phi must be finite".into()));
        }
        Ok(AngleGrid { thetas, phi })
    }

    /// `count` evenly spaced values on `[start, end]`.
    pub fn uniform(start: f64, end: f64, count: usize) -> Result<Self> {
        let thetas = match count {
            0 => Vec::new(),
            1 => vec![start],
            _ => (0..count)
                .map(|i| start + (end - start) * i as f64 / (count - 1) as f64)
                .collect(),
        };
        AngleGrid::new(thetas, 0.0)
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    fn describe(&self) -> Value {
        json!({
            "theta_first_rad": self.thetas.first(),
            "theta_last_rad": self.thetas.last(),
            "theta_count": self.thetas.len(),
            "phi_rad": self.phi,
        })
    }
}

/// Evenly spaced values `start, start + step, …` up to `end` inclusive,
/// computed as `start + i·step` to avoid accumulation.
pub fn inclusive_range(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

/// A table of results ready for CSV output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    /// File stem used when writing.
    pub name: String,
    pub observable: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub config_digest: String,
    /// Axis and option description recorded in the sidecar.
    pub parameters: Value,
}

impl SweepResult {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_g12(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// `printf("%.12g")`.
pub fn format_g12(x: f64) -> String {
    const SIG: i32 = 12;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (SIG - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..SIG).contains(&exp) {
        let decimals = (SIG - 1 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Provenance written next to every CSV file.
#[derive(Clone, Debug, Serialize)]
pub struct RunMetadata {
    pub name: String,
    pub observable: String,
    pub config_digest: String,
    pub software_version: &'static str,
    pub spin_mapping: Vec<Value>,
    pub parameters: Value,
    pub config: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_unix_s: Option<u64>,
}

impl RunMetadata {
    pub fn new(result: &SweepResult, config: &RadicalPairConfig, stamp: bool) -> Self {
        RunMetadata {
            name: result.name.clone(),
            observable: result.observable.clone(),
            config_digest: result.config_digest.clone(),
            software_version: env!("CARGO_PKG_VERSION"),
            spin_mapping: config
                .spin_table()
                .into_iter()
                .map(|(radical, nucleus, spin)| json!({"radical": radical, "nucleus": nucleus, "spin": spin}))
                .collect(),
            parameters: result.parameters.clone(),
            config: config.to_value(),
            generated_unix_s: stamp.then(|| {
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            }),
        }
    }
}

/// Writes `<dir>/<name>.csv` and `<dir>/<name>.meta.json`; returns both paths.
pub fn write_result(
    dir: &Path,
    result: &SweepResult,
    config: &RadicalPairConfig,
    stamp: bool,
) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{}.csv", result.name));
    let meta = dir.join(format!("{}.meta.json", result.name));
    std::fs::write(&csv, result.to_csv())?;
    let mut text = serde_json::to_string_pretty(&RunMetadata::new(result, config, stamp))?;
    text.push('\n');
    std::fs::write(&meta, text)?;
    Ok((csv, meta))
}

// ---- observables -------------------------------------------------------------

fn yield_at(config: &RadicalPairConfig) -> Result<f64> {
    closed_form_value(&PairDynamics::new(config)?, ClosedFormOptions::default())
}

/// Closed-form yields over the grid, in grid order.
pub fn yield_values(config: &RadicalPairConfig, grid: &AngleGrid) -> Result<Vec<f64>> {
    grid.thetas
        .par_iter()
        .map(|&theta| yield_at(&config.clone().with_theta(theta).with_phi(grid.phi)))
        .collect()
}

/// `Φ_S(θ)` over the grid.
pub fn yield_profile(config: &RadicalPairConfig, grid: &AngleGrid) -> Result<SweepResult> {
    let values = yield_values(config, grid)?;
    Ok(SweepResult {
        name: "yield_profile".into(),
        observable: "singlet_yield".into(),
        columns: vec!["theta_rad".into(), "phi_rad".into(), "singlet_yield".into()],
        rows: grid
            .thetas
            .iter()
            .zip(&values)
            .map(|(&t, &v)| vec![t, grid.phi, v])
            .collect(),
        config_digest: config.digest(),
        parameters: json!({ "grid": grid.describe() }),
    })
}

/// Max minus min of a profile.
pub fn spread(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if values.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// Compass sensitivity `Δ_S = max Φ_S − min Φ_S` over the grid.
pub fn sensitivity(config: &RadicalPairConfig, grid: &AngleGrid) -> Result<f64> {
    Ok(spread(&yield_values(config, grid)?))
}

/// `Φ_S(θ = 0) − Φ_S(θ = π/2)`, sign preserved.
pub fn delta_yield_0_90(config: &RadicalPairConfig) -> Result<f64> {
    let at_zero = yield_at(&config.clone().with_theta(0.0))?;
    let at_right = yield_at(&config.clone().with_theta(FRAC_PI_2))?;
    Ok(at_zero - at_right)
}

/// Sensitivity and full profile for each setting of one swept parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileFamily {
    /// Name of the swept parameter column.
    pub parameter: String,
    pub values: Vec<f64>,
    pub grid: AngleGrid,
    /// One profile per parameter value, in grid order.
    pub profiles: Vec<Vec<f64>>,
    pub sensitivities: Vec<f64>,
    pub config_digest: String,
    pub parameters: Value,
}

impl ProfileFamily {
    /// Index of the largest sensitivity (first one on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &s) in self.sensitivities.iter().enumerate() {
            if s > self.sensitivities[best] {
                best = i;
            }
        }
        best
    }

    pub fn sensitivity_table(&self, name: &str) -> SweepResult {
        SweepResult {
            name: name.into(),
            observable: "sensitivity".into(),
            columns: vec![self.parameter.clone(), "sensitivity".into()],
            rows: self
                .values
                .iter()
                .zip(&self.sensitivities)
                .map(|(&a, &s)| vec![a, s])
                .collect(),
            config_digest: self.config_digest.clone(),
            parameters: self.parameters.clone(),
        }
    }

    /// One row per (parameter value, θ).
    pub fn profile_table(&self, name: &str) -> SweepResult {
        let mut rows = Vec::with_capacity(self.values.len() * self.grid.thetas.len());
        for (&a, profile) in self.values.iter().zip(&self.profiles) {
            for (&theta, &y) in self.grid.thetas.iter().zip(profile) {
                rows.push(vec![a, theta, self.grid.phi, y]);
            }
        }
        SweepResult {
            name: name.into(),
            observable: "singlet_yield".into(),
            columns: vec![
                self.parameter.clone(),
                "theta_rad".into(),
                "phi_rad".into(),
                "singlet_yield".into(),
            ],
            rows,
            config_digest: self.config_digest.clone(),
            parameters: self.parameters.clone(),
        }
    }
}

fn profile_family(
    base: &RadicalPairConfig,
    parameter: &str,
    values: &[f64],
    grid: &AngleGrid,
    parameters: Value,
    configure: impl Fn(&RadicalPairConfig, f64) -> RadicalPairConfig + Sync,
) -> Result<ProfileFamily> {
    let profiles = values
        .iter()
        .map(|&v| yield_values(&configure(base, v), grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProfileFamily {
        parameter: parameter.into(),
        values: values.to_vec(),
        grid: grid.clone(),
        sensitivities: profiles.iter().map(|p| spread(p)).collect(),
        profiles,
        config_digest: base.digest(),
        parameters,
    })
}

/// Default transverse values: 0 to 0.17 mT in steps of 0.01 mT.
pub fn default_transverse_values() -> Vec<f64> {
    inclusive_range(0.0, 0.17, 0.01)
}

/// Sets `ax = ay = a` and the given `az` on every nucleus of `base`.
pub fn sweep_transverse(base: &RadicalPairConfig, transverse: &[f64], az: f64, grid: &AngleGrid) -> Result<ProfileFamily> {
    profile_family(
        base,
        "transverse_mT",
        transverse,
        grid,
        json!({ "az_mT": az, "transverse_mT": transverse, "grid": grid.describe() }),
        |c, a| c.clone().with_uniform_hyperfine(HyperfineTensor::axial(a, az)),
    )
}

/// Profiles at each equal recombination rate.
pub fn sweep_rates(config: &RadicalPairConfig, rates: &[f64], grid: &AngleGrid) -> Result<ProfileFamily> {
    profile_family(
        config,
        "k_per_s",
        rates,
        grid,
        json!({ "k_per_s": rates, "grid": grid.describe() }),
        |c, k| c.clone().with_rate(k),
    )
}

/// `delta_yield_0_90` over `az × transverse`, every nucleus carrying
/// `(a, a, az)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperfineMap {
    pub az: Vec<f64>,
    pub transverse: Vec<f64>,
    /// Row-major: `values[i][j]` is at `az[i]`, `transverse[j]`.
    pub values: Vec<Vec<f64>>,
    pub config_digest: String,
}

impl HyperfineMap {
    /// `(az, transverse, value)` of the largest entry, first on ties in
    /// row-major order.
    pub fn argmax(&self) -> (f64, f64, f64) {
        let mut best = (0, 0);
        for (i, row) in self.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v > self.values[best.0][best.1] {
                    best = (i, j);
                }
            }
        }
        (self.az[best.0], self.transverse[best.1], self.values[best.0][best.1])
    }

    pub fn table(&self, name: &str) -> SweepResult {
        let mut rows = Vec::new();
        for (i, &az) in self.az.iter().enumerate() {
            for (j, &a) in self.transverse.iter().enumerate() {
                rows.push(vec![az, a, self.values[i][j]]);
            }
        }
        SweepResult {
            name: name.into(),
            observable: "delta_yield_0_90".into(),
            columns: vec!["az_mT".into(), "transverse_mT".into(), "delta_yield_0_90".into()],
            rows,
            config_digest: self.config_digest.clone(),
            parameters: json!({ "az_mT": self.az, "transverse_mT": self.transverse }),
        }
    }
}

/// Default map axes: `az` 0 to 2 mT by 0.1, transverse 0 to 0.4 mT by 0.02.
pub fn default_map_axes() -> (Vec<f64>, Vec<f64>) {
    (inclusive_range(0.0, 2.0, 0.1), inclusive_range(0.0, 0.4, 0.02))
}

/// Coarser axes for quick runs: `az` by 0.25, transverse by 0.04.
pub fn reduced_map_axes() -> (Vec<f64>, Vec<f64>) {
    (inclusive_range(0.0, 2.0, 0.25), inclusive_range(0.0, 0.4, 0.04))
}

pub fn sweep_2d(base: &RadicalPairConfig, az: &[f64], transverse: &[f64]) -> Result<HyperfineMap> {
    let cells: Vec<(usize, usize)> = (0..az.len())
        .flat_map(|i| (0..transverse.len()).map(move |j| (i, j)))
        .collect();
    let flat: Vec<f64> = cells
        .par_iter()
        .map(|&(i, j)| {
            delta_yield_0_90(
                &base
                    .clone()
                    .with_uniform_hyperfine(HyperfineTensor::axial(transverse[j], az[i])),
            )
        })
        .collect::<Result<_>>()?;
    Ok(HyperfineMap {
        az: az.to_vec(),
        transverse: transverse.to_vec(),
        values: flat.chunks(transverse.len().max(1)).map(|r| r.to_vec()).collect(),
        config_digest: base.digest(),
    })
}

/// Coherence traces for a family of configurations.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceFamily {
    pub parameter: String,
    pub values: Vec<f64>,
    pub traces: Vec<TraceSeries>,
    pub config_digest: String,
    pub options: CoherenceOptions,
}

impl CoherenceFamily {
    pub fn table(&self, name: &str) -> SweepResult {
        let mut rows = Vec::new();
        for (&v, trace) in self.values.iter().zip(&self.traces) {
            for (&t, &c) in trace.times.iter().zip(&trace.values) {
                rows.push(vec![v, t, c]);
            }
        }
        let truncated: Vec<Option<f64>> = self.traces.iter().map(|t| t.metadata.truncated_at).collect();
        SweepResult {
            name: name.into(),
            observable: "coherence".into(),
            columns: vec![self.parameter.clone(), "time_s".into(), "coherence".into()],
            rows,
            config_digest: self.config_digest.clone(),
            parameters: json!({
                self.parameter.clone(): self.values,
                "options": self.options,
                "truncated_at_s": truncated,
            }),
        }
    }
}

fn coherence_family(
    base: &RadicalPairConfig,
    parameter: &str,
    values: &[f64],
    times: &[f64],
    options: &CoherenceOptions,
    configure: impl Fn(&RadicalPairConfig, f64) -> RadicalPairConfig,
) -> Result<CoherenceFamily> {
    let traces = values
        .iter()
        .map(|&v| {
            let c = configure(base, v);
            coherence_trace_with(&PairDynamics::new(&c)?, &c.digest(), times, options)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoherenceFamily {
        parameter: parameter.into(),
        values: values.to_vec(),
        traces,
        config_digest: base.digest(),
        options: *options,
    })
}

pub fn coherence_vs_rates(
    config: &RadicalPairConfig,
    rates: &[f64],
    times: &[f64],
    options: &CoherenceOptions,
) -> Result<CoherenceFamily> {
    coherence_family(config, "k_per_s", rates, times, options, |c, k| c.clone().with_rate(k))
}

pub fn coherence_vs_transverse(
    base: &RadicalPairConfig,
    transverse: &[f64],
    az: f64,
    times: &[f64],
    options: &CoherenceOptions,
) -> Result<CoherenceFamily> {
    coherence_family(base, "transverse_mT", transverse, times, options, |c, a| {
        c.clone().with_uniform_hyperfine(HyperfineTensor::axial(a, az))
    })
}

/// Inclinations used for coherence-vs-angle runs: 0, π/8, π/4, 3π/8, π/2.
pub fn default_coherence_angles() -> Vec<f64> {
    vec![0.0, FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8, FRAC_PI_2]
}

pub fn coherence_vs_angle(
    config: &RadicalPairConfig,
    thetas: &[f64],
    times: &[f64],
    options: &CoherenceOptions,
) -> Result<CoherenceFamily> {
    coherence_family(config, "theta_rad", thetas, times, options, |c, t| c.clone().with_theta(t))
}

/// Human-readable one-liner for a sequence, used in summaries.
pub fn summarize(values: &[f64]) -> String {
    let mut s = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{v:.6}");
    }
    s
}

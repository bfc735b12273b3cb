//! Radical-pair experiment description and its JSON document format.
//!
//! A document looks like
//!
//! ```json
//! {
//!   "radical_a": {
//!     "label": "FAD",
//!     "nuclei": [
//!       { "label": "N5", "spin": 1, "ax_mT": -0.0989, "ay_mT": -0.0989, "az_mT": 1.7569 }
//!     ]
//!   },
//!   "radical_b": { "label": "Trp", "nuclei": [] },
//!   "field": { "b_uT": 47.0, "theta_rad": 0.0, "phi_rad": 0.0 },
//!   "rates": { "ks_per_s": 10000.0, "kt_per_s": 10000.0 }
//! }
//! ```
//!
//! `field`, `rates`, every key inside them, and each nucleus `spin` are
//! optional. Missing spins come from the nucleus label (see
//! [`SpinAssignment`]). Unknown keys are rejected.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::spin::Spin;

pub const DEFAULT_FIELD_UT: f64 = 47.0;
pub const DEFAULT_RATE_PER_S: f64 = 1e4;

/// Diagonal hyperfine coupling in millitesla.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperfineTensor {
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
}

impl HyperfineTensor {
    pub const ZERO: HyperfineTensor = HyperfineTensor::new(0.0, 0.0, 0.0);

    pub const fn new(ax: f64, ay: f64, az: f64) -> Self {
        HyperfineTensor { ax, ay, az }
    }

    pub const fn isotropic(a: f64) -> Self {
        HyperfineTensor::new(a, a, a)
    }

    /// Equal transverse components `ax = ay = transverse`.
    pub const fn axial(transverse: f64, az: f64) -> Self {
        HyperfineTensor::new(transverse, transverse, az)
    }

    pub fn components(&self) -> [f64; 3] {
        [self.ax, self.ay, self.az]
    }

    fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NucleusSpec {
    pub label: String,
    pub spin: Spin,
    pub hyperfine: HyperfineTensor,
}

impl NucleusSpec {
    pub fn new(label: impl Into<String>, spin: Spin, hyperfine: HyperfineTensor) -> Self {
        NucleusSpec {
            label: label.into(),
            spin,
            hyperfine,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadicalSpec {
    pub label: String,
    pub nuclei: Vec<NucleusSpec>,
}

impl RadicalSpec {
    pub fn new(label: impl Into<String>, nuclei: Vec<NucleusSpec>) -> Self {
        RadicalSpec {
            label: label.into(),
            nuclei,
        }
    }

    /// Particle dimensions in Hilbert-space order: electron first, then nuclei.
    pub fn particle_dims(&self) -> Vec<usize> {
        std::iter::once(2)
            .chain(self.nuclei.iter().map(|n| n.spin.multiplicity()))
            .collect()
    }

    /// Size of the nuclear spin space.
    pub fn nuclear_dim(&self) -> usize {
        self.nuclei.iter().map(|n| n.spin.multiplicity()).product()
    }

    /// Electron plus nuclei.
    pub fn dim(&self) -> usize {
        2 * self.nuclear_dim()
    }
}

/// Static field: magnitude in microtesla, polar and azimuthal angles in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldConfig {
    pub b_magnitude: f64,
    pub theta: f64,
    pub phi: f64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            b_magnitude: DEFAULT_FIELD_UT,
            theta: 0.0,
            phi: 0.0,
        }
    }
}

impl FieldConfig {
    /// Unit direction `(sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Singlet and triplet recombination rates in 1/s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateConfig {
    pub ks: f64,
    pub kt: f64,
}

impl RateConfig {
    pub const fn equal(k: f64) -> Self {
        RateConfig { ks: k, kt: k }
    }

    /// The common rate when `ks == kt`.
    pub fn common(&self) -> Result<f64> {
        if self.ks == self.kt {
            Ok(self.ks)
        } else {
            Err(Error::UnequalRates {
                ks: self.ks,
                kt: self.kt,
            })
        }
    }
}

impl Default for RateConfig {
    fn default() -> Self {
        RateConfig::equal(DEFAULT_RATE_PER_S)
    }
}

/// Hilbert-space size caps applied during validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_radical_dim: usize,
    pub max_joint_dim: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_radical_dim: 256,
            max_joint_dim: 4096,
        }
    }
}

/// How nuclei without an explicit spin get one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpinAssignment {
    /// Labels starting with `N` are ¹⁴N (spin 1), labels starting with `H`
    /// are protons (spin 1/2).
    #[default]
    ByLabel,
    /// Every nucleus is spin 1/2.
    AllHalf,
}

impl SpinAssignment {
    pub fn spin_for(self, label: &str) -> Option<Spin> {
        match self {
            SpinAssignment::AllHalf => Some(Spin::HALF),
            SpinAssignment::ByLabel => match label.chars().next() {
                Some('N') => Some(Spin::ONE),
                Some('H') => Some(Spin::HALF),
                _ => None,
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SpinAssignment::ByLabel => "by-label",
            SpinAssignment::AllHalf => "all-half",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadicalPairConfig {
    pub radical_a: RadicalSpec,
    pub radical_b: RadicalSpec,
    pub field: FieldConfig,
    pub rates: RateConfig,
}

impl RadicalPairConfig {
    pub fn new(radical_a: RadicalSpec, radical_b: RadicalSpec, field: FieldConfig, rates: RateConfig) -> Self {
        RadicalPairConfig {
            radical_a,
            radical_b,
            field,
            rates,
        }
    }

    pub fn radicals(&self) -> [&RadicalSpec; 2] {
        [&self.radical_a, &self.radical_b]
    }

    /// `N = N₁·N₂`, the total nuclear-space size.
    pub fn nuclear_dim(&self) -> usize {
        self.radical_a.nuclear_dim() * self.radical_b.nuclear_dim()
    }

    pub fn joint_dim(&self) -> usize {
        self.radical_a.dim() * self.radical_b.dim()
    }

    pub fn validate(&self, limits: &Limits) -> Result<()> {
        for radical in self.radicals() {
            for n in &radical.nuclei {
                if n.label.is_empty() {
                    return Err(Error::Validation(format!(
                        "radical `{}` has a nucleus with an empty label",
                        radical.label
                    )));
                }
                if n.spin.twice() == 0 {
                    return Err(Error::Validation(format!(
                        "nucleus `{}` must have positive spin",
                        n.label
                    )));
                }
                if !n.hyperfine.is_finite() {
                    return Err(Error::Validation(format!(
                        "nucleus `{}` has a non-finite hyperfine component",
                        n.label
                    )));
                }
            }
            let dim = checked_dim(radical)?;
            if dim > limits.max_radical_dim {
                return Err(Error::DimensionCap {
                    what: "radical",
                    dim,
                    cap: limits.max_radical_dim,
                });
            }
        }
        let f = &self.field;
        if !(f.b_magnitude.is_finite() && f.b_magnitude >= 0.0) {
            return Err(Error::Validation(format!(
                "field magnitude must be finite and >= 0 (got {})",
                f.b_magnitude
            )));
        }
        if !(0.0..=PI).contains(&f.theta) {
            return Err(Error::Validation(format!("theta must lie in [0, pi] (got {})", f.theta)));
        }
        if !(0.0..2.0 * PI).contains(&f.phi) {
            return Err(Error::Validation(format!("phi must lie in [0, 2pi) (got {})", f.phi)));
        }
        let r = &self.rates;
        if !(r.ks.is_finite() && r.ks > 0.0 && r.kt.is_finite() && r.kt > 0.0) {
            return Err(Error::Validation(format!(
                "recombination rates must be positive (got ks = {}, kt = {})",
                r.ks, r.kt
            )));
        }
        let joint = self.joint_dim();
        if joint > limits.max_joint_dim {
            return Err(Error::DimensionCap {
                what: "joint",
                dim: joint,
                cap: limits.max_joint_dim,
            });
        }
        Ok(())
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.field.theta = theta;
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.field.phi = phi;
        self
    }

    pub fn with_field_magnitude(mut self, b_ut: f64) -> Self {
        self.field.b_magnitude = b_ut;
        self
    }

    pub fn with_rate(mut self, k: f64) -> Self {
        self.rates = RateConfig::equal(k);
        self
    }

    /// Assigns the same tensor to every nucleus of both radicals.
    pub fn with_uniform_hyperfine(mut self, tensor: HyperfineTensor) -> Self {
        for n in self.radical_a.nuclei.iter_mut().chain(self.radical_b.nuclei.iter_mut()) {
            n.hyperfine = tensor;
        }
        self
    }

    /// Re-derives every nuclear spin from its label.
    pub fn with_spin_assignment(mut self, assignment: SpinAssignment) -> Result<Self> {
        for n in self.radical_a.nuclei.iter_mut().chain(self.radical_b.nuclei.iter_mut()) {
            n.spin = assignment
                .spin_for(&n.label)
                .ok_or_else(|| Error::Validation(format!("no spin mapping for nucleus `{}`", n.label)))?;
        }
        Ok(self)
    }

    /// `(radical, nucleus label, spin)` for every nucleus, for run metadata.
    pub fn spin_table(&self) -> Vec<(String, String, String)> {
        self.radicals()
            .iter()
            .flat_map(|r| {
                r.nuclei
                    .iter()
                    .map(move |n| (r.label.clone(), n.label.clone(), n.spin.to_string()))
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&ConfigDocument::from(self)).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(ConfigDocument::from(self)).expect("config serializes")
    }

    /// First 16 hex digits of the SHA-256 of the compact JSON form.
    pub fn digest(&self) -> String {
        let compact = serde_json::to_string(&ConfigDocument::from(self)).expect("config serializes");
        let hash = Sha256::digest(compact.as_bytes());
        hex::encode(&hash[..8])
    }
}

fn checked_dim(radical: &RadicalSpec) -> Result<usize> {
    radical
        .nuclei
        .iter()
        .try_fold(2usize, |acc, n| acc.checked_mul(n.spin.multiplicity()))
        .ok_or(Error::DimensionCap {
            what: "radical",
            dim: usize::MAX,
            cap: usize::MAX,
        })
}

// ---- document representation -------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SpinValue {
    Number(f64),
    Text(String),
}

impl SpinValue {
    fn to_spin(&self) -> Result<Spin> {
        match self {
            SpinValue::Number(x) => Spin::from_f64(*x),
            SpinValue::Text(t) => {
                let t = t.trim();
                let value = match t.split_once('/') {
                    Some((num, den)) => {
                        let num: f64 = num.trim().parse().map_err(|_| bad_spin(t))?;
                        let den: f64 = den.trim().parse().map_err(|_| bad_spin(t))?;
                        num / den
                    }
                    None => t.parse().map_err(|_| bad_spin(t))?,
                };
                Spin::from_f64(value)
            }
        }
    }
}

fn bad_spin(text: &str) -> Error {
    Error::Validation(format!("cannot read spin `{text}`"))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NucleusDoc {
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    spin: Option<SpinValue>,
    #[serde(rename = "ax_mT")]
    ax: f64,
    #[serde(rename = "ay_mT")]
    ay: f64,
    #[serde(rename = "az_mT")]
    az: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadicalDoc {
    #[serde(default)]
    label: String,
    #[serde(default)]
    nuclei: Vec<NucleusDoc>,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FieldDoc {
    #[serde(rename = "b_uT", default, skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    #[serde(rename = "theta_rad", default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(rename = "phi_rad", default, skip_serializing_if = "Option::is_none")]
    phi: Option<f64>,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RatesDoc {
    #[serde(rename = "ks_per_s", default, skip_serializing_if = "Option::is_none")]
    ks: Option<f64>,
    #[serde(rename = "kt_per_s", default, skip_serializing_if = "Option::is_none")]
    kt: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDocument {
    radical_a: RadicalDoc,
    radical_b: RadicalDoc,
    #[serde(default)]
    field: FieldDoc,
    #[serde(default)]
    rates: RatesDoc,
}

impl From<&RadicalPairConfig> for ConfigDocument {
    fn from(c: &RadicalPairConfig) -> Self {
        let radical = |r: &RadicalSpec| RadicalDoc {
            label: r.label.clone(),
            nuclei: r
                .nuclei
                .iter()
                .map(|n| NucleusDoc {
                    label: n.label.clone(),
                    spin: Some(SpinValue::Number(n.spin.value())),
                    ax: n.hyperfine.ax,
                    ay: n.hyperfine.ay,
                    az: n.hyperfine.az,
                })
                .collect(),
        };
        ConfigDocument {
            radical_a: radical(&c.radical_a),
            radical_b: radical(&c.radical_b),
            field: FieldDoc {
                b: Some(c.field.b_magnitude),
                theta: Some(c.field.theta),
                phi: Some(c.field.phi),
            },
            rates: RatesDoc {
                ks: Some(c.rates.ks),
                kt: Some(c.rates.kt),
            },
        }
    }
}

impl ConfigDocument {
    fn into_config(self, assignment: SpinAssignment) -> Result<RadicalPairConfig> {
        let radical = |doc: RadicalDoc| -> Result<RadicalSpec> {
            let nuclei = doc
                .nuclei
                .into_iter()
                .map(|n| {
                    let spin = match &n.spin {
                        Some(v) => v.to_spin()?,
                        None => assignment.spin_for(&n.label).ok_or_else(|| {
                            Error::Validation(format!(
                                "nucleus `{}` needs an explicit spin (label does not start with N or H)",
                                n.label
                            ))
                        })?,
                    };
                    Ok(NucleusSpec::new(n.label, spin, HyperfineTensor::new(n.ax, n.ay, n.az)))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RadicalSpec::new(doc.label, nuclei))
        };
        Ok(RadicalPairConfig {
            radical_a: radical(self.radical_a)?,
            radical_b: radical(self.radical_b)?,
            field: FieldConfig {
                b_magnitude: self.field.b.unwrap_or(DEFAULT_FIELD_UT),
                theta: self.field.theta.unwrap_or(0.0),
                phi: self.field.phi.unwrap_or(0.0),
            },
            rates: RateConfig {
                ks: self.rates.ks.unwrap_or(DEFAULT_RATE_PER_S),
                kt: self.rates.kt.unwrap_or(DEFAULT_RATE_PER_S),
            },
        })
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    pub assignment: SpinAssignment,
    pub limits: Limits,
}

/// Parses and validates a configuration document with default options.
pub fn parse_config(text: &str) -> Result<RadicalPairConfig> {
    parse_config_with(text, &ParseOptions::default())
}

pub fn parse_config_with(text: &str, options: &ParseOptions) -> Result<RadicalPairConfig> {
    let doc: ConfigDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let config = doc.into_config(options.assignment)?;
    config.validate(&options.limits)?;
    Ok(config)
}

// ---- presets --------------------------------------------------------------

fn fad_rows() -> [(&'static str, HyperfineTensor); 3] {
    [
        ("N5", HyperfineTensor::new(-0.0989, -0.0989, 1.7569)),
        ("N10", HyperfineTensor::new(-0.0241, -0.0144, 0.6046)),
        ("H6", HyperfineTensor::new(-0.5304, -0.4336, -0.1976)),
    ]
}

fn trp_rows() -> [(&'static str, HyperfineTensor); 3] {
    [
        ("N1", HyperfineTensor::new(0.0, 0.0, 1.0812)),
        ("H1", HyperfineTensor::new(0.4716, -0.36990, 0.0)),
        ("H4", HyperfineTensor::new(-0.74, -0.536, -0.1879)),
    ]
}

/// FAD·⁻/Trp·⁺ pair keeping the first `n` nuclei of each radical.
pub fn fad_trp(n: usize, assignment: SpinAssignment) -> RadicalPairConfig {
    let take = |label: &str, rows: [(&'static str, HyperfineTensor); 3]| {
        RadicalSpec::new(
            label,
            rows.into_iter()
                .take(n)
                .map(|(l, t)| NucleusSpec::new(l, assignment.spin_for(l).expect("N/H label"), t))
                .collect(),
        )
    };
    RadicalPairConfig::new(
        take("FAD", fad_rows()),
        take("Trp", trp_rows()),
        FieldConfig::default(),
        RateConfig::default(),
    )
}

/// A pair without nuclei.
pub fn bare_pair() -> RadicalPairConfig {
    RadicalPairConfig::new(
        RadicalSpec::new("A", Vec::new()),
        RadicalSpec::new("B", Vec::new()),
        FieldConfig::default(),
        RateConfig::default(),
    )
}

/// Three nuclei per radical (the FAD/Trp 3-3 nuclei) all carrying `tensor`.
pub fn equal_tensor_3_3(tensor: HyperfineTensor) -> RadicalPairConfig {
    fad_trp(3, SpinAssignment::ByLabel).with_uniform_hyperfine(tensor)
}

pub const PRESET_NAMES: [&str; 3] = ["fad-trp-1-1", "fad-trp-2-2", "fad-trp-3-3"];

pub fn builtin_presets() -> BTreeMap<&'static str, RadicalPairConfig> {
    PRESET_NAMES
        .iter()
        .enumerate()
        .map(|(i, &name)| (name, fad_trp(i + 1, SpinAssignment::ByLabel)))
        .collect()
}

pub fn preset(name: &str) -> Result<RadicalPairConfig> {
    builtin_presets()
        .remove(name)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}

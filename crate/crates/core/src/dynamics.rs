//! Time evolution of a radical pair with equal recombination rates.
//!
//! Each radical Hamiltonian is diagonalized once; evolved operators and
//! correlation tensors then only need phases per time point.

use num_complex::Complex64 as C64;

use crate::config::RadicalPairConfig;
use crate::error::{Error, Result};
use crate::hamiltonian::{build_joint_hamiltonian, build_pair_hamiltonians, RadicalHamiltonian};
use crate::spin::{hermitian_eig, ComplexMatrix, SpinTriple};

/// Eigen-decomposition of one radical Hamiltonian together with the electron
/// spin operators in the eigenbasis.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
    pub spin_in_eigenbasis: SpinTriple,
}

impl EigenSystem {
    pub fn new(h: &RadicalHamiltonian) -> Result<Self> {
        let eig = hermitian_eig(&h.matrix)?;
        let spin_in_eigenbasis = h.electron_spin.map(|s| eig.to_eigenbasis(s).hermitian_part());
        Ok(EigenSystem {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            spin_in_eigenbasis,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Largest minus smallest eigenvalue.
    pub fn spread(&self) -> f64 {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    /// `e^{−iHt} S_p e^{iHt}` in the original product basis.
    pub fn evolved_spin(&self, t: f64) -> SpinTriple {
        let phases: Vec<C64> = self.eigenvalues.iter().map(|w| C64::from_polar(1.0, -w * t)).collect();
        let v = &self.eigenvectors;
        let vh = v.adjoint();
        self.spin_in_eigenbasis.map(|s| {
            let rotated = ComplexMatrix::from_fn(self.dim(), |m, n| s.get(m, n) * phases[m] * phases[n].conj());
            v.matmul(&rotated).matmul(&vh)
        })
    }
}

/// `R_pq(t) = Σ_mn (S_p)_mn (S_q)_nm e^{i(ω_m−ω_n)t}`.
pub fn correlation_tensor(eig: &EigenSystem, t: f64) -> [[C64; 3]; 3] {
    let d = eig.dim();
    let phases: Vec<C64> = eig.eigenvalues.iter().map(|w| C64::from_polar(1.0, w * t)).collect();
    let ops = eig.spin_in_eigenbasis.components();
    let mut r = [[C64::new(0.0, 0.0); 3]; 3];
    for (p, sp) in ops.iter().enumerate() {
        for (q, sq) in ops.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..d {
                for n in 0..d {
                    acc += sp.get(m, n) * sq.get(n, m) * phases[m] * phases[n].conj();
                }
            }
            r[p][q] = acc;
        }
    }
    r
}

/// Real-arithmetic evaluator of a correlation tensor over many time points.
///
/// `R_pq` is a trace of two Hermitian matrices, hence real; pairing `(m,n)`
/// with `(n,m)` leaves `Σ_m a_pq(mm) + 2 Σ_{m<n} Re[a_pq(mn) e^{iΔ_mn t}]`.
#[derive(Clone, Debug)]
pub(crate) struct CorrelationKernel {
    eigenvalues: Vec<f64>,
    constant: [f64; 9],
    pairs: Vec<(u32, u32)>,
    re: Vec<[f64; 9]>,
    im: Vec<[f64; 9]>,
}

impl CorrelationKernel {
    pub(crate) fn new(eig: &EigenSystem) -> Self {
        let d = eig.dim();
        let ops = eig.spin_in_eigenbasis.components();
        let coeff = |m: usize, n: usize| {
            let mut c = [C64::new(0.0, 0.0); 9];
            for p in 0..3 {
                for q in 0..3 {
                    c[3 * p + q] = ops[p].get(m, n) * ops[q].get(n, m);
                }
            }
            c
        };
        let mut constant = [0.0; 9];
        for m in 0..d {
            for (k, v) in coeff(m, m).iter().enumerate() {
                constant[k] += v.re;
            }
        }
        let mut pairs = Vec::new();
        let mut re = Vec::new();
        let mut im = Vec::new();
        for m in 0..d {
            for n in m + 1..d {
                let c = coeff(m, n);
                if c.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                    continue;
                }
                pairs.push((m as u32, n as u32));
                re.push(c.map(|z| 2.0 * z.re));
                im.push(c.map(|z| 2.0 * z.im));
            }
        }
        CorrelationKernel {
            eigenvalues: eig.eigenvalues.clone(),
            constant,
            pairs,
            re,
            im,
        }
    }

    /// Row-major `R(t)`; `phases` is scratch space of the radical dimension.
    pub(crate) fn evaluate(&self, t: f64, phases: &mut Vec<(f64, f64)>) -> [f64; 9] {
        phases.clear();
        phases.extend(self.eigenvalues.iter().map(|w| {
            let (s, c) = (w * t).sin_cos();
            (c, s)
        }));
        let mut r = self.constant;
        for ((&(m, n), re), im) in self.pairs.iter().zip(&self.re).zip(&self.im) {
            let (cm, sm) = phases[m as usize];
            let (cn, sn) = phases[n as usize];
            // e^{i(ω_m − ω_n)t}
            let c = cm * cn + sm * sn;
            let s = sm * cn - cm * sn;
            for k in 0..9 {
                r[k] += re[k] * c - im[k] * s;
            }
        }
        r
    }
}

/// Singlet and triplet projectors on the joint space.
#[derive(Clone, Debug)]
pub struct ProjectorPair {
    pub qs: ComplexMatrix,
    pub qt: ComplexMatrix,
}

/// `Q_S = ¼I − Σ_p S_Ap ⊗ S_Bp` and `Q_T = I − Q_S`.
pub fn singlet_projector(config: &RadicalPairConfig) -> Result<ProjectorPair> {
    let (a, b) = build_pair_hamiltonians(config)?;
    Ok(projectors_from_spins(&a.electron_spin, &b.electron_spin))
}

pub(crate) fn projectors_from_spins(sa: &SpinTriple, sb: &SpinTriple) -> ProjectorPair {
    let dim = sa.dim() * sb.dim();
    let identity = ComplexMatrix::identity(dim);
    let mut qs = identity.scale_real(0.25);
    for (x, y) in sa.components().into_iter().zip(sb.components()) {
        qs -= &x.kron(y);
    }
    let qt = &identity - &qs;
    ProjectorPair { qs, qt }
}

/// Particle dimensions of both radicals, in joint-space order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointLayout {
    pub dims_a: Vec<usize>,
    pub dims_b: Vec<usize>,
}

impl JointLayout {
    pub fn of(config: &RadicalPairConfig) -> Self {
        JointLayout {
            dims_a: config.radical_a.particle_dims(),
            dims_b: config.radical_b.particle_dims(),
        }
    }

    pub fn nuclear_dims(&self) -> (usize, usize) {
        (
            self.dims_a[1..].iter().product(),
            self.dims_b[1..].iter().product(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dims_a.iter().chain(&self.dims_b).product()
    }
}

/// Joint-space state at a given time. Trace may be below one once
/// recombination has removed population.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    pub matrix: ComplexMatrix,
    pub time: f64,
    pub layout: JointLayout,
}

impl DensityMatrix {
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Trace over every nucleus, leaving the two electrons in the basis
    /// `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`.
    pub fn electron_state(&self) -> ComplexMatrix {
        let (na, nb) = self.layout.nuclear_dims();
        let index = |ea: usize, ia: usize, eb: usize, ib: usize| ((ea * na + ia) * 2 + eb) * nb + ib;
        ComplexMatrix::from_fn(4, |r, c| {
            let (ra, rb) = (r / 2, r % 2);
            let (ca, cb) = (c / 2, c % 2);
            let mut acc = C64::new(0.0, 0.0);
            for ia in 0..na {
                for ib in 0..nb {
                    acc += self.matrix.get(index(ra, ia, rb, ib), index(ca, ia, cb, ib));
                }
            }
            acc
        })
    }

    /// Checks Hermiticity, positivity and the trace bound.
    pub fn check_invariants(&self, tolerance: f64) -> Result<()> {
        let asym = self.matrix.hermitian_asymmetry();
        if asym > tolerance {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        let tr = self.trace();
        if !(-tolerance..=1.0 + tolerance).contains(&tr) {
            return Err(Error::TraceNotUnit { trace: tr, tolerance });
        }
        let lowest = self.matrix.hermitian_part().hermitian_eigenvalues()?;
        if let Some(&min) = lowest.first() {
            if min < -tolerance {
                return Err(Error::NegativeEigenvalue(min));
            }
        }
        Ok(())
    }
}

/// Reusable evaluator for one configuration: both radicals diagonalized,
/// correlation kernels precomputed.
#[derive(Clone, Debug)]
pub struct PairDynamics {
    pub a: EigenSystem,
    pub b: EigenSystem,
    electron_a: SpinTriple,
    electron_b: SpinTriple,
    kernel_a: CorrelationKernel,
    kernel_b: CorrelationKernel,
    layout: JointLayout,
    rate: f64,
    nuclear_dim: usize,
}

impl PairDynamics {
    /// Fails with [`Error::UnequalRates`] unless `ks == kt`.
    pub fn new(config: &RadicalPairConfig) -> Result<Self> {
        let rate = config.rates.common()?;
        let (ha, hb) = build_pair_hamiltonians(config)?;
        let a = EigenSystem::new(&ha)?;
        let b = EigenSystem::new(&hb)?;
        Ok(PairDynamics {
            kernel_a: CorrelationKernel::new(&a),
            kernel_b: CorrelationKernel::new(&b),
            a,
            b,
            electron_a: ha.electron_spin,
            electron_b: hb.electron_spin,
            layout: JointLayout::of(config),
            rate,
            nuclear_dim: config.nuclear_dim(),
        })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn nuclear_dim(&self) -> usize {
        self.nuclear_dim
    }

    pub fn layout(&self) -> &JointLayout {
        &self.layout
    }

    /// Largest eigenfrequency gap of the joint Hamiltonian.
    pub fn max_gap(&self) -> f64 {
        self.a.spread() + self.b.spread()
    }

    /// `¼ + (1/N)·Σ_pq R_Apq R_Bpq`, times `e^{−kt}` when `include_decay`.
    pub fn singlet_probability(&self, t: f64, include_decay: bool) -> f64 {
        let mut scratch = Vec::new();
        self.singlet_probability_with(t, include_decay, &mut scratch)
    }

    pub(crate) fn singlet_probability_with(&self, t: f64, include_decay: bool, scratch: &mut Vec<(f64, f64)>) -> f64 {
        let ra = self.kernel_a.evaluate(t, scratch);
        let rb = self.kernel_b.evaluate(t, scratch);
        let dot: f64 = ra.iter().zip(&rb).map(|(x, y)| x * y).sum();
        let p = 0.25 + dot / self.nuclear_dim as f64;
        if include_decay {
            p * (-self.rate * t).exp()
        } else {
            p
        }
    }

    /// Electron spin operators of radical A at time `t` (Schrödinger-picture
    /// evolution of the operator appearing in ρ).
    fn evolved_spins(&self, t: f64) -> (SpinTriple, SpinTriple) {
        if t == 0.0 {
            (self.electron_a.clone(), self.electron_b.clone())
        } else {
            (self.a.evolved_spin(t), self.b.evolved_spin(t))
        }
    }

    /// `e^{−kt}[I/(4N) − (1/N) Σ_p S_Ap(t) ⊗ S_Bp(t)]`.
    pub fn density_matrix(&self, t: f64) -> DensityMatrix {
        let (sa, sb) = self.evolved_spins(t);
        let n = self.nuclear_dim as f64;
        let pair = projectors_from_spins(&sa, &sb);
        let matrix = pair.qs.scale_real((-self.rate * t).exp() / n);
        DensityMatrix {
            matrix,
            time: t,
            layout: self.layout.clone(),
        }
    }

    /// Two-electron reduced state at `t` without forming the joint matrix:
    /// each evolved operator is traced over its own nuclei first.
    pub fn electron_state(&self, t: f64) -> ComplexMatrix {
        let (sa, sb) = self.evolved_spins(t);
        let (na, nb) = self.layout.nuclear_dims();
        let reduce = |op: &ComplexMatrix, nuc: usize| {
            ComplexMatrix::from_fn(2, |r, c| (0..nuc).map(|i| op.get(r * nuc + i, c * nuc + i)).sum())
        };
        let n = self.nuclear_dim as f64;
        let mut out = ComplexMatrix::identity(4).scale_real(0.25);
        for (x, y) in sa.components().into_iter().zip(sb.components()) {
            out -= &reduce(x, na).kron(&reduce(y, nb)).scale_real(1.0 / n);
        }
        out.scale_real((-self.rate * t).exp())
    }
}

/// Singlet probability at time `t`; see [`PairDynamics::singlet_probability`].
pub fn singlet_probability(config: &RadicalPairConfig, t: f64, include_decay: bool) -> Result<f64> {
    Ok(PairDynamics::new(config)?.singlet_probability(t, include_decay))
}

/// Joint state from per-radical evolved operators.
pub fn evolve_joint(config: &RadicalPairConfig, t: f64) -> Result<DensityMatrix> {
    Ok(PairDynamics::new(config)?.density_matrix(t))
}

/// Joint state from the joint Hamiltonian: `e^{−iHt}(Q_S/N)e^{iHt}e^{−kt}`.
pub fn evolve_joint_direct(config: &RadicalPairConfig, t: f64) -> Result<DensityMatrix> {
    let k = config.rates.common()?;
    let h = build_joint_hamiltonian(config)?;
    let eig = hermitian_eig(&h)?;
    let rho0 = singlet_projector(config)?.qs.scale_real(1.0 / config.nuclear_dim() as f64);
    let v = &eig.eigenvectors;
    let in_basis = eig.to_eigenbasis(&rho0);
    let phases: Vec<C64> = eig.eigenvalues.iter().map(|w| C64::from_polar(1.0, -w * t)).collect();
    let evolved = ComplexMatrix::from_fn(h.dim(), |m, n| in_basis.get(m, n) * phases[m] * phases[n].conj());
    let matrix = v.matmul(&evolved).matmul(&v.adjoint()).scale_real((-k * t).exp());
    Ok(DensityMatrix {
        matrix,
        time: t,
        layout: JointLayout::of(config),
    })
}

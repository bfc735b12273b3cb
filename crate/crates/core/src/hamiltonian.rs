//! Single-radical and joint spin Hamiltonians in rad/s.

use crate::config::{FieldConfig, RadicalPairConfig, RadicalSpec};
use crate::error::Result;
use crate::spin::{embed, ComplexMatrix, SpinTriple};

/// Electron gyromagnetic ratio in rad·s⁻¹·T⁻¹.
pub const GAMMA_E: f64 = 1.760859627e11;

const MICROTESLA: f64 = 1e-6;
const MILLITESLA: f64 = 1e-3;

/// Hamiltonian of one radical plus its electron spin operators embedded in
/// the same space.
#[derive(Clone, Debug)]
pub struct RadicalHamiltonian {
    pub matrix: ComplexMatrix,
    pub electron_spin: SpinTriple,
    pub dims: Vec<usize>,
}

impl RadicalHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Size of the nuclear space.
    pub fn nuclear_dim(&self) -> usize {
        self.dim() / 2
    }
}

/// Zeeman term plus diagonal hyperfine couplings for one radical.
pub fn build_radical_hamiltonian(radical: &RadicalSpec, field: &FieldConfig) -> Result<RadicalHamiltonian> {
    let dims = radical.particle_dims();
    let half = SpinTriple::for_spin(crate::spin::Spin::HALF);
    let electron = half.map(|op| embed(op, 0, &dims).expect("electron slot is valid"));

    let dir = field.direction();
    let zeeman = GAMMA_E * field.b_magnitude * MICROTESLA;
    let mut h = ComplexMatrix::zeros(electron.dim());
    for (s, d) in electron.components().into_iter().zip(dir) {
        if d != 0.0 {
            h += &s.scale_real(zeeman * d);
        }
    }

    for (k, nucleus) in radical.nuclei.iter().enumerate() {
        let ops = SpinTriple::for_spin(nucleus.spin);
        for ((s, i_op), a) in electron
            .components()
            .into_iter()
            .zip(ops.components())
            .zip(nucleus.hyperfine.components())
        {
            if a == 0.0 {
                continue;
            }
            let i_emb = embed(i_op, k + 1, &dims)?;
            h += &s.matmul(&i_emb).scale_real(GAMMA_E * MILLITESLA * a);
        }
    }

    Ok(RadicalHamiltonian {
        matrix: h,
        electron_spin: electron,
        dims,
    })
}

/// Both radical Hamiltonians of a pair.
pub fn build_pair_hamiltonians(config: &RadicalPairConfig) -> Result<(RadicalHamiltonian, RadicalHamiltonian)> {
    Ok((
        build_radical_hamiltonian(&config.radical_a, &config.field)?,
        build_radical_hamiltonian(&config.radical_b, &config.field)?,
    ))
}

/// `H_A ⊗ I + I ⊗ H_B`.
pub fn build_joint_hamiltonian(config: &RadicalPairConfig) -> Result<ComplexMatrix> {
    let (a, b) = build_pair_hamiltonians(config)?;
    Ok(joint_sum(&a.matrix, &b.matrix))
}

pub(crate) fn joint_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let ia = ComplexMatrix::identity(a.dim());
    let ib = ComplexMatrix::identity(b.dim());
    &a.kron(&ib) + &ia.kron(b)
}

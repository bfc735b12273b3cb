use proptest::prelude::*;
use radpair::coherence::{electron_coherence, von_neumann_entropy, Basis, CoherenceOptions};
use radpair::config::{preset, HyperfineTensor, NucleusSpec, RadicalPairConfig, RadicalSpec};
use radpair::dynamics::PairDynamics;
use radpair::experiments::{spread, yield_values, AngleGrid};
use radpair::hamiltonian::build_joint_hamiltonian;
use radpair::spin::{spin_operators, ComplexMatrix, Spin};
use radpair::yields::singlet_yield_closed;

fn coupling() -> impl Strategy<Value = f64> {
    -2.0f64..2.0
}

fn tensor() -> impl Strategy<Value = HyperfineTensor> {
    (coupling(), coupling(), coupling()).prop_map(|(x, y, z)| HyperfineTensor::new(x, y, z))
}

fn spin() -> impl Strategy<Value = Spin> {
    prop_oneof![Just(Spin::HALF), Just(Spin::ONE)]
}

// One nucleus per radical keeps every case well under a millisecond.
fn small_pair() -> impl Strategy<Value = RadicalPairConfig> {
    (spin(), tensor(), spin(), tensor(), 0.0f64..std::f64::consts::PI, 0.0f64..6.28, 3.0f64..7.0).prop_map(
        |(sa, ta, sb, tb, theta, phi, log_k)| {
            let mut c = preset("fad-trp-1-1").unwrap();
            c.radical_a = RadicalSpec::new("A", vec![NucleusSpec::new("a1", sa, ta)]);
            c.radical_b = RadicalSpec::new("B", vec![NucleusSpec::new("b1", sb, tb)]);
            c.with_theta(theta).with_phi(phi).with_rate(10f64.powf(log_k))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spin_commutation_relations(twice in 0u32..7) {
        let s = spin_operators(twice as f64 / 2.0).unwrap();
        let i = num_complex::Complex64::new(0.0, 1.0);
        let resid = &s.sx.commutator(&s.sy) - &s.sz.scale(i);
        prop_assert!(resid.max_abs() < 1e-12);
    }

    #[test]
    fn joint_hamiltonian_is_hermitian(c in small_pair()) {
        let h = build_joint_hamiltonian(&c).unwrap();
        prop_assert!(h.is_hermitian(1e-10));
    }

    #[test]
    fn density_matrix_invariants(c in small_pair(), t in 0.0f64..5e-6) {
        let d = PairDynamics::new(&c).unwrap();
        let rho = d.density_matrix(t);
        prop_assert!(rho.check_invariants(1e-10).is_ok());
        prop_assert!((rho.trace() - (-c.rates.ks * t).exp()).abs() < 1e-10);
        let p = d.singlet_probability(t, false);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
    }

    #[test]
    fn yield_between_quarter_and_one(c in small_pair()) {
        let y = singlet_yield_closed(&c).unwrap().value;
        prop_assert!((0.25 - 1e-12..=1.0 + 1e-12).contains(&y), "{}", y);
    }

    #[test]
    fn axial_tensors_ignore_azimuth(c in small_pair(), t in 0.0f64..1.0, phi in 0.0f64..6.28) {
        let mut c = c;
        for n in c.radical_a.nuclei.iter_mut().chain(c.radical_b.nuclei.iter_mut()) {
            n.hyperfine.ay = n.hyperfine.ax;
        }
        let a = singlet_yield_closed(&c.clone().with_phi(0.0).with_theta(t)).unwrap().value;
        let b = singlet_yield_closed(&c.with_phi(phi).with_theta(t)).unwrap().value;
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn isotropic_tensors_give_flat_profiles(a in coupling(), b in coupling(), sa in spin()) {
        let mut c = preset("fad-trp-1-1").unwrap();
        c.radical_a = RadicalSpec::new("A", vec![NucleusSpec::new("a1", sa, HyperfineTensor::isotropic(a))]);
        c.radical_b = RadicalSpec::new("B", vec![NucleusSpec::new("b1", Spin::HALF, HyperfineTensor::isotropic(b))]);
        let ys = yield_values(&c, &AngleGrid::uniform(0.0, std::f64::consts::FRAC_PI_2, 7).unwrap()).unwrap();
        prop_assert!(spread(&ys) < 1e-10);
    }

    #[test]
    fn coherence_is_non_negative(c in small_pair(), t in 0.0f64..5e-6) {
        let rho = PairDynamics::new(&c).unwrap().density_matrix(t);
        for opts in [CoherenceOptions::default(), CoherenceOptions::electrons()] {
            let v = radpair::coherence::relative_entropy_of_coherence(&rho, &opts).unwrap();
            prop_assert!(v >= 0.0);
        }
    }

    #[test]
    fn diagonal_states_have_no_coherence(w in proptest::collection::vec(0.0f64..1.0, 4)) {
        let total: f64 = w.iter().sum::<f64>() + 1e-3;
        let diag: Vec<f64> = w.iter().map(|x| (x + 2.5e-4) / total).collect();
        let rho = ComplexMatrix::from_real_diagonal(&diag);
        prop_assert!(electron_coherence(&rho, Basis::ProductZ, true).unwrap().abs() < 1e-12);
        let s = von_neumann_entropy(&rho).unwrap();
        prop_assert!(s >= 0.0 && s <= 4f64.ln() + 1e-12);
    }
}

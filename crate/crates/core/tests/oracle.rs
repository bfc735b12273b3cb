use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use radpair::coherence::{coherence_trace, CoherenceOptions};
use radpair::config::{builtin_presets, preset, HyperfineTensor};
use radpair::oracle::{integrate_master_equation, oracle_coherence, OracleSettings};
use radpair::yields::{max_integration_step, singlet_yield_closed, singlet_yield_integrated};

#[test]
fn halving_the_step_barely_moves_the_yield() {
    let c = preset("fad-trp-1-1").unwrap().with_rate(1e5).with_theta(0.5);
    let base = OracleSettings::for_config(&c, 1.5e-4, 3).unwrap().without_states();
    let coarse = integrate_master_equation(&c, &OracleSettings { dt: base.dt * 4.0, ..base }).unwrap();
    let fine = integrate_master_equation(&c, &OracleSettings { dt: base.dt * 2.0, ..base }).unwrap();
    assert!(fine.step < coarse.step);
    let change = (coarse.final_singlet_yield() - fine.final_singlet_yield()).abs();
    assert!(change < 1e-6, "{change:e}");
}

#[test]
fn stored_states_stay_positive() {
    let c = preset("fad-trp-2-2").unwrap().with_theta(1.1);
    let traj = integrate_master_equation(&c, &OracleSettings::for_config(&c, 4e-6, 8).unwrap()).unwrap();
    for s in &traj.states {
        let min = s.matrix.hermitian_eigenvalues().unwrap().into_iter().fold(f64::INFINITY, f64::min);
        assert!(min >= -1e-8, "t = {}: {min:e}", s.time);
    }
}

#[test]
fn oracle_coherence_tracks_fast_path() {
    let c = preset("fad-trp-1-1").unwrap();
    let traj = integrate_master_equation(&c, &OracleSettings::for_config(&c, 3e-6, 30).unwrap()).unwrap();
    for opts in [CoherenceOptions::default(), CoherenceOptions::electrons()] {
        let slow = oracle_coherence(&traj, &opts).unwrap();
        let fast = coherence_trace(&c, &traj.times, &opts).unwrap();
        for (a, b) in slow.values.iter().zip(&fast.values) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }
}

#[test]
fn oracle_coherence_constant_without_transverse_coupling() {
    let c = preset("fad-trp-1-1").unwrap().with_uniform_hyperfine(HyperfineTensor::new(0.0, 0.0, 1.3));
    let traj = integrate_master_equation(&c, &OracleSettings::for_config(&c, 2e-6, 10).unwrap()).unwrap();
    let series = oracle_coherence(&traj, &CoherenceOptions::default()).unwrap();
    let c0 = series.values[0];
    assert!(series.values.iter().all(|v| (v - c0).abs() < 1e-7), "{:?}", series.values);
}

#[test]
fn closed_form_matches_integration_on_small_presets() {
    for name in ["fad-trp-1-1", "fad-trp-2-2"] {
        for k in [1e5, 1e6] {
            for theta in [0.0, FRAC_PI_4, FRAC_PI_2] {
                let c = preset(name).unwrap().with_rate(k).with_theta(theta);
                let dt = max_integration_step(&c).unwrap();
                let closed = singlet_yield_closed(&c).unwrap().value;
                let integrated = singlet_yield_integrated(&c, 10.0 / k, dt).unwrap().value;
                assert!((closed - integrated).abs() < 1e-4, "{name} k={k:e} theta={theta}");
            }
        }
    }
}

// Every preset and rate, including the slow 3-3 cells at low k.
#[test]
#[ignore]
fn closed_form_matches_integration_everywhere() {
    for (name, c) in builtin_presets() {
        for k in [1e4, 1e5, 1e6] {
            for theta in [0.0, FRAC_PI_4, FRAC_PI_2] {
                let c = c.clone().with_rate(k).with_theta(theta);
                let dt = max_integration_step(&c).unwrap();
                let closed = singlet_yield_closed(&c).unwrap().value;
                let integrated = singlet_yield_integrated(&c, 10.0 / k, dt).unwrap().value;
                assert!((closed - integrated).abs() < 1e-4, "{name} k={k:e} theta={theta}");
            }
        }
    }
}

// The electron coherence of a fully axial pair at zero inclination oscillates
// at frequencies set by the hyperfine splittings.

use radpair::coherence::{coherence_trace, CoherenceOptions};
use radpair::config::{preset, HyperfineTensor, NucleusSpec};
use radpair::hamiltonian::build_joint_hamiltonian;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

#[test]
fn dominant_peak_sits_on_an_eigenvalue_gap() {
    let mut c = preset("fad-trp-1-1").unwrap().with_theta(0.0);
    for n in c.radical_a.nuclei.iter_mut().chain(c.radical_b.nuclei.iter_mut()) {
        let az = n.hyperfine.az;
        *n = NucleusSpec::new(n.label.clone(), n.spin, HyperfineTensor::new(0.0, 0.0, az));
    }

    let count = 4096;
    let dt = 1e-9;
    let times: Vec<f64> = (0..count).map(|i| i as f64 * dt).collect();
    let series = coherence_trace(&c, &times, &CoherenceOptions::electrons()).unwrap();
    assert_eq!(series.values.len(), count);

    let mean = series.values.iter().sum::<f64>() / count as f64;
    let mut buf: Vec<Complex<f64>> = series.values.iter().map(|v| Complex::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(count).process(&mut buf);
    let peak = (1..count / 2)
        .max_by(|&i, &j| buf[i].norm().total_cmp(&buf[j].norm()))
        .unwrap();
    let bin = 2.0 * std::f64::consts::PI / (count as f64 * dt);
    let peak_omega = peak as f64 * bin;

    let h = build_joint_hamiltonian(&c).unwrap();
    let eig = h.hermitian_eigenvalues().unwrap();
    let nyquist = std::f64::consts::PI / dt;
    let gaps: Vec<f64> = eig
        .iter()
        .flat_map(|a| eig.iter().map(move |b| a - b))
        .filter(|g| *g > 0.5 * bin && *g < nyquist)
        .collect();
    let nearest = gaps.iter().map(|g| (g - peak_omega).abs()).fold(f64::INFINITY, f64::min);
    assert!(nearest <= bin, "peak {peak_omega:e} rad/s, nearest gap off by {nearest:e}");
}

//! Faster recombination flattens the yield profile and damps coherence.

use radpair::coherence::{coherence_trace, CoherenceOptions};
use radpair::config::{equal_tensor_3_3, HyperfineTensor};
use radpair::experiments::{sweep_rates, AngleGrid, TRANSVERSE_SWEEP_AZ};

fn main() -> radpair::Result<()> {
    let c = equal_tensor_3_3(HyperfineTensor::axial(0.08, TRANSVERSE_SWEEP_AZ));
    let rates = [1e4, 1e5, 1e6];
    let family = sweep_rates(&c, &rates, &AngleGrid::default())?;
    let opts = CoherenceOptions::electrons().with_renormalize(false);
    for (k, s) in rates.iter().zip(&family.sensitivities) {
        let trace = coherence_trace(&c.clone().with_rate(*k), &[5e-7, 1e-6, 2e-6], &opts)?;
        let shown: Vec<String> = trace.values.iter().map(|v| format!("{v:.3e}")).collect();
        println!("k = {k:e}: sensitivity {s:.6}, coherence at 0.5/1/2 us {}", shown.join(" "));
    }
    Ok(())
}

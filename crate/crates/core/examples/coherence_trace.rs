//! Relative entropy of coherence for the joint state and the electron pair.

use radpair::coherence::{coherence_trace, uniform_times, CoherenceOptions};
use radpair::config::preset;

fn main() -> radpair::Result<()> {
    let c = preset("fad-trp-2-2")?;
    let times = uniform_times(4e-6, 9);
    let joint = coherence_trace(&c, &times, &CoherenceOptions::default())?;
    let electrons = coherence_trace(&c, &times, &CoherenceOptions::electrons())?;
    let raw = coherence_trace(&c, &times, &CoherenceOptions::default().with_renormalize(false))?;
    println!("t_us,joint,electrons,joint_unnormalized");
    for i in 0..times.len() {
        println!(
            "{:.1},{:.6},{:.6},{:.6}",
            times[i] * 1e6,
            joint.values[i],
            electrons.values[i],
            raw.values[i]
        );
    }
    Ok(())
}

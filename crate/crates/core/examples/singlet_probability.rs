//! Singlet fraction against time for the two-nucleus pair.

use radpair::config::preset;
use radpair::dynamics::PairDynamics;

fn main() -> radpair::Result<()> {
    let d = PairDynamics::new(&preset("fad-trp-1-1")?.with_theta(0.5))?;
    println!("t_us,singlet_fraction,with_decay");
    for i in 0..=20 {
        let t = i as f64 * 1e-7;
        println!("{:.1},{:.6},{:.6}", t * 1e6, d.singlet_probability(t, false), d.singlet_probability(t, true));
    }
    let rho = d.density_matrix(1e-6);
    rho.check_invariants(1e-10)?;
    println!("trace of rho(1 us) = {:.9}", rho.trace());
    Ok(())
}

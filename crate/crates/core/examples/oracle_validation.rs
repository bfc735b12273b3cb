//! Master-equation integration as an independent check on the fast paths.

use radpair::config::preset;
use radpair::dynamics::evolve_joint;
use radpair::oracle::{integrate_master_equation, OracleSettings};
use radpair::yields::singlet_yield_closed;

fn main() -> radpair::Result<()> {
    for name in ["fad-trp-1-1", "fad-trp-2-2"] {
        let c = preset(name)?.with_rate(1e5).with_theta(0.7);
        let settings = OracleSettings::for_config(&c, 15.0 / 1e5, 15)?;
        let traj = integrate_master_equation(&c, &settings)?;
        let closed = singlet_yield_closed(&c)?.value;
        println!(
            "{name}: oracle {:.9}, closed {closed:.9}, step {:.2e} s",
            traj.final_singlet_yield(),
            traj.step
        );
        let t = traj.times[1];
        let diff = (&evolve_joint(&c, t)?.matrix - &traj.states[1].matrix).max_abs();
        println!("  state at {:.0} us differs by {diff:.1e}", t * 1e6);
    }
    Ok(())
}

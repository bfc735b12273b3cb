//! Closed-form singlet yield checked against direct time integration.

use radpair::config::preset;
use radpair::yields::{max_integration_step, singlet_yield_closed, singlet_yield_integrated};

fn main() -> radpair::Result<()> {
    for name in radpair::config::PRESET_NAMES {
        let c = preset(name)?;
        let start = std::time::Instant::now();
        let y = singlet_yield_closed(&c)?;
        println!("{name}: yield {:.9} ({:.1?})", y.value, start.elapsed());
    }
    let c = preset("fad-trp-1-1")?.with_rate(1e5);
    let closed = singlet_yield_closed(&c)?.value;
    let integrated = singlet_yield_integrated(&c, 10.0 / 1e5, max_integration_step(&c)?)?;
    println!(
        "1-1 at k = 1e5: closed {closed:.9}, integrated {:.9}, tail <= {:.1e}",
        integrated.value,
        integrated.tail_bound.unwrap_or(0.0)
    );
    Ok(())
}

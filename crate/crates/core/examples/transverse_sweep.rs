//! Sensitivity of the six-nucleus equal-tensor pair as ax = ay grows.

use radpair::config::{equal_tensor_3_3, HyperfineTensor};
use radpair::experiments::{default_transverse_values, sweep_transverse, AngleGrid, TRANSVERSE_SWEEP_AZ};

fn main() -> radpair::Result<()> {
    let values = default_transverse_values();
    let family = sweep_transverse(&equal_tensor_3_3(HyperfineTensor::ZERO), &values, TRANSVERSE_SWEEP_AZ, &AngleGrid::default())?;
    for (a, s) in values.iter().zip(&family.sensitivities) {
        println!("transverse {a:.2} mT: sensitivity {s:.6}");
    }
    let best = family.argmax();
    println!("maximum at {:.2} mT", values[best]);
    Ok(())
}

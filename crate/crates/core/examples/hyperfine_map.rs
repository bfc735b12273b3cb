//! Yield difference between 0 and 90 degrees over (az, transverse), coarse grid.

use radpair::config::{equal_tensor_3_3, HyperfineTensor};
use radpair::experiments::{reduced_map_axes, sweep_2d};

fn main() -> radpair::Result<()> {
    let (az, transverse) = reduced_map_axes();
    let map = sweep_2d(&equal_tensor_3_3(HyperfineTensor::ZERO), &az, &transverse)?;
    print!("az\\tr");
    for t in &transverse {
        print!(" {t:>6.2}");
    }
    println!();
    for (a, row) in az.iter().zip(&map.values) {
        print!("{a:>5.2}");
        for v in row {
            print!(" {v:>6.3}");
        }
        println!();
    }
    let (a, t, v) = map.argmax();
    println!("largest difference {v:.6} at az {a:.2} mT, transverse {t:.2} mT");
    Ok(())
}

//! Yield profiles over inclination and the resulting compass sensitivity.

use radpair::config::PRESET_NAMES;
use radpair::experiments::{sensitivity, yield_profile, AngleGrid};

fn main() -> radpair::Result<()> {
    let grid = AngleGrid::default();
    for name in PRESET_NAMES {
        let c = radpair::config::preset(name)?;
        println!("{name}: sensitivity {:.6}", sensitivity(&c, &grid)?);
    }
    let profile = yield_profile(&radpair::config::preset("fad-trp-1-1")?, &AngleGrid::uniform(0.0, 1.5707963267948966, 7)?)?;
    print!("{}", profile.to_csv());
    Ok(())
}

//! Spin matrices and their embedding in a multi-particle space.

use radpair::spin::{embed, spin_operators};

fn main() -> radpair::Result<()> {
    for s in [0.5, 1.0] {
        let ops = spin_operators(s)?;
        let casimir = &(&ops.sx.matmul(&ops.sx) + &ops.sy.matmul(&ops.sy)) + &ops.sz.matmul(&ops.sz);
        println!("s = {s}: dim {}, S^2 diagonal {:?}", ops.dim(), casimir.diagonal().iter().map(|c| c.re).collect::<Vec<_>>());
    }
    // electron ⊗ spin-1 nucleus
    let electron_sz = embed(&spin_operators(0.5)?.sz, 0, &[2, 3])?;
    println!("embedded Sz is {}x{}, trace {:.3}", electron_sz.dim(), electron_sz.dim(), electron_sz.trace().re);
    Ok(())
}

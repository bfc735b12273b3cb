//! Parse a configuration document and list the built-in presets.

use radpair::config::{builtin_presets, parse_config};

const DOC: &str = r#"{
  "radical_a": { "label": "FAD", "nuclei": [ { "label": "N5", "ax_mT": -0.0989, "ay_mT": -0.0989, "az_mT": 1.7569 } ] },
  "radical_b": { "label": "Trp", "nuclei": [ { "label": "H1", "spin": "1/2", "ax_mT": 0.4716, "ay_mT": -0.3699, "az_mT": 0.0 } ] },
  "field": { "b_uT": 50.0, "theta_rad": 0.3 }
}"#;

fn main() -> radpair::Result<()> {
    let c = parse_config(DOC)?;
    println!("joint dim {}, k = {} /s, digest {}", c.joint_dim(), c.rates.ks, c.digest());
    for (label, radical, spin) in c.spin_table() {
        println!("  {radical}/{label}: spin {spin}");
    }
    for (name, p) in builtin_presets() {
        println!("{name}: radical dims {} x {}", p.radical_a.dim(), p.radical_b.dim());
    }
    print!("{}", c.to_json());
    Ok(())
}

//! Volume of the reduced space as coupling to a common factor grows.

use corrgeo::{distance_matrix, embed, gen_regime_panel, volume, FactorSpec, Ramp, RegimeSpec};

fn main() -> corrgeo::Result<()> {
    println!("{:>8} {:>10}", "coupling", "V");
    for w in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let spec = RegimeSpec {
            base: FactorSpec::new(24, 56, 0, 0.3, 1),
            ramp: Ramp::constant(w),
            eccentric: vec![],
        };
        let panel = gen_regime_panel(&spec)?;
        let emb = embed(&distance_matrix(&panel)?)?;
        let v = volume(&emb, 3)?;
        println!("{w:>8.1} {:>10.5}", v.value);
    }
    Ok(())
}

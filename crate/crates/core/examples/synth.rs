//! Generate synthetic panels and write them as CSV to stdout.
//!
//! cargo run --example synth > panel.csv

use corrgeo::{gen_factor_panel, gen_regime_panel, FactorSpec, Format, RegimeSpec};

fn main() -> corrgeo::Result<()> {
    let factor = gen_factor_panel(&FactorSpec::new(6, 20, 2, 0.3, 1))?;
    eprintln!("factor panel ids: {:?}", factor.entity_ids());

    let regime = gen_regime_panel(&RegimeSpec {
        base: FactorSpec::new(6, 20, 0, 0.3, 1),
        ramp: "0.1:0.9".parse()?,
        eccentric: vec!["AT".into()],
    })?;
    regime.write_csv(std::io::stdout().lock(), Format::Long)
}

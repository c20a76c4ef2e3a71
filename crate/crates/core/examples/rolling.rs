//! Rolling-window volume and clustering on a panel whose coupling ramps up.

use corrgeo::rolling::rolling_summary;
use corrgeo::{gen_regime_panel, rolling_analysis, FactorSpec, Ramp, RegimeSpec, RollingConfig};

fn main() -> corrgeo::Result<()> {
    let spec = RegimeSpec {
        base: FactorSpec::new(24, 110, 0, 0.3, 4),
        ramp: Ramp { start: 0.1, end: 0.9 },
        eccentric: vec!["AT".into()],
    };
    let panel = gen_regime_panel(&spec)?;
    let cfg = RollingConfig { step: 6, ..Default::default() };
    let ms = rolling_analysis(&panel, &cfg)?;

    println!("{:>6} {:>6} {:>9} {:>8}", "start", "end", "V", "C");
    for w in &ms.windows {
        println!("{:>6} {:>6} {:>9.5} {:>8.5}", w.start_label, w.end_label, w.volume, w.clustering);
    }
    let s = rolling_summary(&ms)?;
    println!(
        "\nV changed {:+.1}%, C changed {:+.1}%",
        100.0 * s.volume.relative_change,
        100.0 * s.clustering.relative_change
    );
    Ok(())
}

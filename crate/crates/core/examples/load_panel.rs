//! Load a long-format panel from CSV and inspect it.
//!
//! cargo run --example load_panel -- path/to/panel.csv
//!
//! Without an argument a small inline panel is used.

use std::fs::File;

use corrgeo::{load_panel, normalize, Format, Panel};

const INLINE: &str = "\
entity,period,value
AT,2001,1.2
AT,2002,1.9
AT,2003,1.4
DE,2001,0.8
DE,2002,1.1
DE,2003,1.0
FR,2001,2.0
FR,2002,1.7
FR,2003,2.4
";

fn main() -> corrgeo::Result<()> {
    let panel: Panel = match std::env::args().nth(1) {
        Some(path) => load_panel(File::open(path)?, Format::Long)?,
        None => load_panel(INLINE.as_bytes(), Format::Long)?,
    };
    println!("{} entities x {} periods", panel.n_entities(), panel.n_periods());
    println!("periods: {:?}", panel.period_labels());
    for k in 0..panel.n_entities() {
        let s = normalize(&panel, k)?;
        println!("{:>4}  rho = {:.4?}", s.entity_id, s.rho.as_slice());
    }
    let head = panel.window(0, 2)?;
    println!("first two periods: {:?}", head.period_labels());
    Ok(())
}

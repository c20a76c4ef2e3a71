//! Exposure network over the reduced space: strengths and strongest links.

use corrgeo::network::node_stats;
use corrgeo::{distance_matrix, embed, exposure_network, gen_factor_panel, reduce, top_links, FactorSpec};

fn main() -> corrgeo::Result<()> {
    let panel = gen_factor_panel(&FactorSpec::new(10, 80, 2, 0.5, 5))?;
    let rs = reduce(&embed(&distance_matrix(&panel)?)?, 2)?;
    let net = exposure_network(&rs)?;
    let ids = net.entity_ids();

    println!("strongest links:");
    for l in top_links(&net, 5)? {
        println!("  {} -- {}  {:.3}", ids[l.i], ids[l.j], l.weight);
    }
    println!("\n{:>4} {:>10} {:>10}", "id", "strength", "closeness");
    for s in node_stats(&net, &rs) {
        println!("{:>4} {:>10.3} {:>10.3}", s.entity_id, s.strength, s.closeness);
    }
    if !net.floor_applied().is_empty() {
        println!("floored pairs: {:?}", net.floor_applied());
    }
    Ok(())
}

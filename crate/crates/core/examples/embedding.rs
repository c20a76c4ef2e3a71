//! Correlation distances and their coordinate embedding.

use corrgeo::{distance_matrix, embed, gen_factor_panel, reduce, FactorSpec};

fn main() -> corrgeo::Result<()> {
    let panel = gen_factor_panel(&FactorSpec::new(8, 60, 2, 0.4, 11))?;
    let dm = distance_matrix(&panel)?;
    println!("distance {} -- {}: {:.4}", dm.entity_ids()[0], dm.entity_ids()[1], dm.get(0, 1));
    println!("correlation: {:.4}", dm.correlation()[(0, 1)]);

    let emb = embed(&dm)?;
    let total: f64 = emb.eigenvalues().iter().sum();
    for (r, v) in emb.eigenvalues().iter().enumerate() {
        println!("lambda_{:<2} {:>8.4}  ({:>5.1}%)", r + 1, v, 100.0 * v / total);
    }

    let rs = reduce(&emb, 2)?;
    println!("\n2-d coordinates:");
    for (k, id) in rs.entity_ids().iter().enumerate() {
        let c = rs.coordinates().row(k);
        println!("{id:>4}  {:>8.4} {:>8.4}", c[0], c[1]);
    }
    println!("mean reduced distance {:.4}", rs.mean_reduced_distance());
    Ok(())
}

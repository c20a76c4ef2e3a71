//! Continuous clustering and closeness with one entity pushed away.

use corrgeo::{
    closeness_centrality, continuous_clustering, distance_matrix, embed, gen_regime_panel, reduce, FactorSpec,
    Ramp, RegimeSpec,
};

fn main() -> corrgeo::Result<()> {
    let spec = RegimeSpec {
        base: FactorSpec::new(12, 56, 0, 0.3, 9),
        ramp: Ramp::constant(0.8),
        eccentric: vec!["AT".into()],
    };
    let panel = gen_regime_panel(&spec)?;
    let rs = reduce(&embed(&distance_matrix(&panel)?)?, 3)?;
    println!("C = {:.4}", continuous_clustering(&rs)?);
    let mut rows: Vec<(String, f64)> = rs
        .entity_ids()
        .iter()
        .map(|id| Ok((id.clone(), closeness_centrality(&rs, id)?)))
        .collect::<corrgeo::Result<_>>()?;
    rows.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (id, cc) in rows {
        println!("{id:>4} {cc:.4}");
    }
    Ok(())
}

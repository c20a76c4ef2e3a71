//! Minimum spanning tree of the correlation distances, printed as DOT.

use corrgeo::export::write_mst_dot;
use corrgeo::{distance_matrix, gen_factor_panel, mst, FactorSpec};

fn main() -> corrgeo::Result<()> {
    let panel = gen_factor_panel(&FactorSpec::new(10, 80, 3, 0.4, 21))?;
    let dm = distance_matrix(&panel)?;
    let tree = mst(dm.matrix())?;
    eprintln!("total length {:.4}", tree.total_weight());
    write_mst_dot(std::io::stdout().lock(), &tree, dm.entity_ids())
}

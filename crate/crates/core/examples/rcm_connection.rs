//! Wired random cluster model: critical points and three exact routes to π.
//!
//! cargo run --release --example rcm_connection

use gwc::rcm::{
    cluster_identity_holds, connection_prob_enumerate, connection_prob_partition, connection_prob_recursive,
    critical_point,
};
use gwc::{ExplicitTree, OffspringDistribution, RCMParams};

fn main() -> gwc::Result<()> {
    for (m, q) in [(2.0, 1.0), (2.0, 2.0), (1.2, 2.0)] {
        let (beta_c, p_c) = critical_point(m, q)?;
        println!("m={m} q={q}: p_c = {p_c:.6}, beta_c = {beta_c:.6}");
    }
    let tree = ExplicitTree::sample(&OffspringDistribution::finite(vec![0.5, 0.3, 0.2])?, 3, 11, 0)?;
    println!("tree with {} edges, cluster identity holds: {}", tree.edge_count(), cluster_identity_holds(&tree)?);
    for q in [0.5, 1.0, 2.0, 3.0] {
        let params = RCMParams::new(0.7, q)?;
        println!(
            "  q={q}: recursive {:.15} partition {:.15} enumerate {:.15}",
            connection_prob_recursive(&tree, &params)?,
            connection_prob_partition(&tree, &params)?,
            connection_prob_enumerate(&tree, &params)?
        );
    }
    Ok(())
}

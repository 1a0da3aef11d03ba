//! Streaming evaluation of B_n(root) and the same value on the materialized tree.
//!
//! cargo run --release --example tree_recursion

use gwc::tree::evaluate_on_tree;
use gwc::{evaluate_root, ExplicitTree, OffspringDistribution, RSchedule, RecursionConfig, RecursionFunction};

fn main() -> gwc::Result<()> {
    let dist = OffspringDistribution::geometric(0.5)?;
    let g = RecursionFunction::conductance(1.0)?;
    let config = RecursionConfig::new(dist.clone(), g, 12, RSchedule::CriticalProduct);
    let (_, r) = config.resolve()?;
    for index in 0..5 {
        let streamed = evaluate_root(&config, 42, index)?;
        let tree = ExplicitTree::sample(&dist, 12, 42, index)?;
        let explicit = evaluate_on_tree(&tree, &g, r)[0];
        println!(
            "sample {index}: B = {:.12} (explicit {:.12}), Z_n = {}, nodes = {}, W_n = {:.4}",
            streamed.b_root, explicit, streamed.z_n, streamed.total_nodes, streamed.w_n
        );
    }
    Ok(())
}

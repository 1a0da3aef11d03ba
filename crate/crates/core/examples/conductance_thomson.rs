//! p-conductance by recursion, by flow minimization, and the uniform-flow bound.
//!
//! cargo run --release --example conductance_thomson

use gwc::conductance::{conductance_exact, min_flow_energy, p_from_s, uniform_flow_energy};
use gwc::{ExplicitTree, OffspringDistribution};

fn main() -> gwc::Result<()> {
    let asym = ExplicitTree::from_preorder_counts(2, &[2, 1, 2])?;
    println!("asymmetric tree, p=2, R=1: C = {}", conductance_exact(&asym, 1.0, 1.0)?);
    println!("  uniform flow energy {}", uniform_flow_energy(&asym, 2.0, 1.0)?);
    println!("  minimal flow energy {}", min_flow_energy(&asym, 2.0, 1.0, 1e-14)?.energy);

    let dist = OffspringDistribution::geometric(0.5)?;
    let tree = ExplicitTree::sample(&dist, 7, 3, 0)?;
    for s in [0.5, 1.0, 3.0] {
        let p = p_from_s(s);
        let c = conductance_exact(&tree, s, 0.8)?;
        let opt = min_flow_energy(&tree, p, 0.8, 1e-12)?;
        let uniform = uniform_flow_energy(&tree, p, 0.8)?;
        println!(
            "GW tree ({} nodes), p={p:.3}: C = {c:.10}, Thomson {:.10} ({} Newton steps), uniform bound {:.10}",
            tree.len(),
            opt.energy.powf(-1.0 / s),
            opt.iterations,
            uniform.powf(-1.0 / s)
        );
    }
    Ok(())
}

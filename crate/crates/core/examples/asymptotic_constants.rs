//! Normalizing sequences and predicted constants.
//!
//! cargo run --release --example asymptotic_constants

use gwc::asymptotics::{
    a_n, critical_constant, critical_constant_chain, gamma_sequences, near_critical_constant,
    near_critical_constant_chain, w_moments, NormalizingSequence, SlowlyVarying,
};
use gwc::OffspringDistribution;

fn main() -> gwc::Result<()> {
    let grid = [10, 100, 1000];
    for (label, mr) in [("sub", 0.95), ("critical", 1.0), ("super", 1.05)] {
        let seq = NormalizingSequence::new(|_| mr, 1.0, &grid);
        println!("{label:>8} mR={mr}: a_n = {:.4?} {:?}", seq.values, seq.regimes);
    }
    println!("window mR = 1 + 2/n: a_100 = {:.4}", a_n(1.02, 2.0, 100));
    for l in [SlowlyVarying::Const, SlowlyVarying::Log] {
        let (g, gt) = gamma_sequences(1.0, 2.5, l, 2.0, 200)?;
        println!("gamma_200 (alpha=2.5, L={l:?}) = {g:.6e}, tilde = {gt:.6e}");
    }
    let dist = OffspringDistribution::geometric(5.0 / 6.0)?;
    let w = w_moments(&dist)?;
    println!("geometric m=1.2: E[W^2] = {}, E[W^3] = {:?}", w.ew2, w.ew3);
    for q in [1.0, 1.5, 2.0] {
        println!(
            "  q={q}: alpha = {:.10} (chain {:.10}), alpha_tilde = {:.10} (chain {:.10})",
            critical_constant(q, &dist)?,
            critical_constant_chain(q, &dist)?,
            near_critical_constant(q, &dist)?,
            near_critical_constant_chain(q, &dist)?
        );
    }
    Ok(())
}

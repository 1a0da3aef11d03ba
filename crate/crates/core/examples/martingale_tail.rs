//! Tail of W_l = Z_l / m^l for a heavy-tailed law.
//!
//! cargo run --release --example martingale_tail

use gwc::montecarlo::{sample_martingale, survival};
use gwc::OffspringDistribution;

fn main() -> gwc::Result<()> {
    let alpha = 2.5;
    let dist = OffspringDistribution::zeta(alpha)?;
    let levels = [5, 10, 15];
    let w = sample_martingale(&dist, &levels, 200_000, 1)?;
    println!("P(W_l > x) x^alpha for zeta({alpha}), m = {:.4}", dist.mean());
    for (l, values) in levels.iter().zip(&w) {
        let row: Vec<String> = [2.0f64, 4.0, 8.0, 16.0]
            .iter()
            .map(|&x| format!("{:.3}", survival(values, x) * x.powf(alpha)))
            .collect();
        println!("  l={l:>2}: {}", row.join("  "));
    }
    Ok(())
}

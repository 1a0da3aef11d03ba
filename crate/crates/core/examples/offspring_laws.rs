//! Offspring laws: sampling, moments and tails.
//!
//! cargo run --release --example offspring_laws

use gwc::rng::Domain;
use gwc::{OffspringDistribution, OffspringSpec, Stream};

fn main() -> gwc::Result<()> {
    let laws = [
        ("geometric:0.8333333333333334", OffspringSpec::parse_short("geometric:0.8333333333333334")?.build()?),
        ("finite:0.8,0.2", OffspringDistribution::finite(vec![0.8, 0.2])?),
        ("zeta:2.5", OffspringDistribution::zeta(2.5)?),
    ];
    for (name, dist) in &laws {
        let mut stream = Stream::new(1, Domain::Corpus, 0, 0);
        let n = 200_000;
        let draws: Vec<u64> = (0..n).map(|_| dist.sample(&mut stream)).collect();
        let empirical = draws.iter().sum::<u64>() as f64 / n as f64;
        println!("{name}: m = {:.6} (sample mean {empirical:.4})", dist.mean());
        for k in [1u64, 5, 20] {
            let freq = draws.iter().filter(|&&d| d > k).count() as f64 / n as f64;
            println!("  P(Z > {k:>2}) = {:.3e}  empirical {freq:.3e}", dist.survival(k));
        }
        match dist.factorial_moment(3) {
            Ok(f3) => println!("  E[Z(Z-1)] = {:.6}, E[Z(Z-1)(Z-2)] = {f3:.6}", dist.factorial_moment(2)?),
            Err(e) => println!("  E[Z(Z-1)] = {:.6}, third: {e}", dist.factorial_moment(2)?),
        }
    }
    // Sum of many independent draws, as used when growing a generation.
    let geo = &laws[0].1;
    let mut stream = Stream::new(2, Domain::Generations, 0, 0);
    let mut z = 1u64;
    for gen in 1..=30 {
        z = geo.sample_sum(z, &mut stream);
        if gen % 10 == 0 {
            println!("Z_{gen} = {z}, W_{gen} = {:.4}", z as f64 / geo.mean().powi(gen));
        }
    }
    Ok(())
}

//! The two kernel families and their comparison constants.
//!
//! cargo run --release --example concave_kernels

use gwc::concave::bound_form;
use gwc::rcm::critical_point;
use gwc::RecursionFunction;

fn main() -> gwc::Result<()> {
    let cond = RecursionFunction::conductance(2.0)?;
    println!("conductance s=2: g(1) = {:.6}, g(inf) = {}", cond.eval(1.0), cond.at_infinity());

    let (beta_c, _) = critical_point(1.2, 2.0)?;
    for beta in [0.5 * beta_c, beta_c, 2.0 * beta_c] {
        let g = RecursionFunction::rcm(beta, 2.0)?;
        let (k1, k2) = g.sandwich_constants()?;
        let s = g.s_effective();
        println!(
            "rcm q=2 beta={beta:.4}: s={s} kappa_g={:.6} sandwich=({k1:.6}, {k2:.6}) g(inf)={:.6}",
            g.kappa_g()?,
            g.at_infinity()
        );
        for x in [0.01, 1.0, 100.0] {
            println!(
                "   x={x:>6}: {:.6} <= g(x)={:.6} <= {:.6}",
                bound_form(x, k1, s),
                g.eval(x),
                bound_form(x, k2, s)
            );
        }
    }
    // Above q = 2 the kernel is evaluable but not concave.
    let g = RecursionFunction::rcm(1.0, 3.0)?;
    println!("q=3: concave = {}, sandwich: {:?}", g.is_concave(), g.sandwich_constants().err().map(|e| e.to_string()));
    Ok(())
}

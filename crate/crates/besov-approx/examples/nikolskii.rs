//! The different-metrics inequality for band-limited functions:
//! ||g||_p2 <= 2^d (prod nu_j)^(1/p1 - 1/p2) ||g||_p1. Measured margins
//! over a batch of random shell samples show how far realistic inputs
//! sit from the bound.
//!
//!     cargo run --release --example nikolskii

use besov_approx::anisotropy::SmoothnessVector;
use besov_approx::experiments::{nikolskii_check, random_bandlimited};
use besov_approx::lattice::{AxisSpec, Exponent};
use std::f64::consts::PI;

fn main() -> besov_approx::Result<()> {
    let sv = SmoothnessVector::new(vec![1.0])?;
    let axes = vec![AxisSpec::new(16.0 * PI, 1 << 10)?];
    let shell = 3;
    let nu = sv.block(shell);

    for (p1, p2) in [
        (Exponent::Finite(2.0), Exponent::Finite(4.0)),
        (Exponent::Finite(2.0), Exponent::Inf),
        (Exponent::Finite(4.0), Exponent::Inf),
    ] {
        let mut min = f64::INFINITY;
        let mut max = 0.0f64;
        let mut violations = 0;
        for seed in 0..100 {
            let g = random_bandlimited(seed, &sv, shell, 1, &axes)?.remove(0);
            let rep = nikolskii_check(&g, &nu, p1, p2)?;
            if !rep.holds {
                violations += 1;
            }
            let margin = rep.rhs / rep.lhs;
            min = min.min(margin);
            max = max.max(margin);
        }
        println!(
            "p1 = {p1}, p2 = {p2}: rhs/lhs in [{min:.2}, {max:.2}] over 100 seeds, {violations} violations"
        );
    }

    // the bound is claimed only for band-limited inputs, and the checker
    // refuses anything else
    let wide = random_bandlimited(0, &sv, shell + 1, 1, &axes)?.remove(0);
    match nikolskii_check(&wide, &nu, Exponent::Finite(2.0), Exponent::Inf) {
        Err(e) => println!("\nout-of-band input rejected: {e}"),
        Ok(_) => println!("\nunexpected: out-of-band input accepted"),
    }
    Ok(())
}

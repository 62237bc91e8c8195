//! Compute the layered Besov norm of a multi-shell function at several
//! summability exponents; smaller theta weighs the layer sequence more
//! heavily, so the norm decreases as theta grows.
//!
//!     cargo run --release --example besov_norm

use besov_approx::anisotropy::{besov_norm, SmoothnessVector};
use besov_approx::experiments::random_bandlimited;
use besov_approx::lattice::{add, AxisSpec, Exponent};
use std::f64::consts::PI;

fn main() -> besov_approx::Result<()> {
    let sv = SmoothnessVector::new(vec![1.0])?;
    let axes = vec![AxisSpec::new(16.0 * PI, 1 << 10)?];

    let mut f = random_bandlimited(40, &sv, 1, 1, &axes)?.remove(0);
    for s in 2..=4 {
        f = add(
            &f,
            &random_bandlimited(40 + s as u64, &sv, s, 1, &axes)?.remove(0),
        )?;
    }

    let p = Exponent::Finite(2.0);
    let norm = besov_norm(&f, &sv, p, Exponent::Finite(1.0), 5)?;
    println!("  s    ||f_s||_2      2^(sg) ||f_s||_2");
    for t in &norm.terms {
        println!("  {}    {:.6e}   {:.6e}", t.s, t.lp, t.weighted);
    }
    println!();
    for theta in [
        Exponent::Finite(1.0),
        Exponent::Finite(2.0),
        Exponent::Finite(4.0),
        Exponent::Inf,
    ] {
        let v = besov_norm(&f, &sv, p, theta, 5)?;
        println!(
            "theta = {theta:<4}  norm = {:.8}{}",
            v.value,
            if v.truncation_warning {
                "  (truncated)"
            } else {
                ""
            }
        );
    }
    Ok(())
}

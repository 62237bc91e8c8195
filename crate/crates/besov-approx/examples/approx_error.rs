//! Approximation error of the Fourier section: how the sup-norm
//! residual shrinks as the section box grows through the input's
//! shells.
//!
//!     cargo run --release --example approx_error

use besov_approx::anisotropy::SmoothnessVector;
use besov_approx::experiments::{approx_error, random_bandlimited};
use besov_approx::lattice::{add, linf_norm, AxisSpec};
use std::f64::consts::PI;

fn main() -> besov_approx::Result<()> {
    let sv = SmoothnessVector::new(vec![1.0])?;
    let axes = vec![AxisSpec::new(16.0 * PI, 1 << 10)?];

    // shells 1..=4 with geometrically damped amplitudes, a stand-in for
    // a function of finite layered norm
    let mut f = random_bandlimited(500, &sv, 1, 1, &axes)?.remove(0);
    for s in 2..=4 {
        let part = random_bandlimited(500, &sv, s, 1, &axes)?.remove(0);
        let damped = besov_approx::lattice::scale(
            &part,
            rustfft::num_complex::Complex64::new((-(s as f64 - 1.0) * 1.5).exp2(), 0.0),
        )?;
        f = add(&f, &damped)?;
    }
    println!("||f||_inf = {:.6}", linf_norm(&f));
    println!("\n  n    error = ||f - S_(a^(n-1)) f||_inf");
    for n in 1..=5 {
        let e = approx_error(&f, &sv, n)?;
        println!("  {n}    {e:.6e}");
    }
    println!("\nthe error at n is the sup of the shells the section has not yet absorbed,");
    println!("so it drops by roughly the damping factor per level and hits zero once the");
    println!("box covers every populated shell");
    Ok(())
}

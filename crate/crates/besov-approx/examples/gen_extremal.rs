//! Build the extremal function F_n and its scaled witness g_1, then
//! check the closed-form origin value and the norm growth rates.
//!
//!     cargo run --release --example gen_extremal

use besov_approx::anisotropy::SmoothnessVector;
use besov_approx::extremal::{eval_f, f_grid, gen_g1, ExtremalSpec};
use besov_approx::lattice::{linf_norm, lp_norm, AxisSpec};
use std::f64::consts::PI;

fn main() -> besov_approx::Result<()> {
    let sv = SmoothnessVector::new(vec![1.0])?;
    let axes = vec![AxisSpec::new(128.0 * PI, 1 << 15)?];
    let p = 2.0;

    println!(
        "d=1, r=(1): a = {:?}, b = {}, g = {}",
        sv.a(),
        sv.b(),
        sv.g()
    );
    println!();
    println!("  n    F_n(0)      closed form   ||F_n||_2 / 2^(n/2)   ||F_n||_inf / 2^n");
    for n in 1..=5 {
        let spec = ExtremalSpec::new(sv.clone(), n, p, 1.0)?;
        let origin = eval_f(&spec, &[0.0])?;
        // (2/pi)^(d/2) (2^(dn) - 2^(d(n-1)))
        let formula = (2.0 / PI).sqrt() * ((n as f64).exp2() - ((n - 1) as f64).exp2());
        let f = f_grid(&spec, &axes)?;
        let l2 = lp_norm(&f, 2.0)? / (n as f64 / 2.0).exp2();
        let sup = linf_norm(&f) / (n as f64).exp2();
        println!("  {n}    {origin:.6}    {formula:.6}      {l2:.6}              {sup:.6}");
    }

    // the witness g_1 = C_1 2^{-n(g + d/p')} F_n stays bounded in the
    // layered norm while its sup decays exactly at the theorem's rate
    println!();
    println!("  n    ||g_1||_inf   x 2^(n(g-d/p))");
    for n in 1..=5 {
        let spec = ExtremalSpec::new(sv.clone(), n, p, 1.0)?;
        let g1 = gen_g1(&spec, &axes)?;
        let sup = linf_norm(&g1);
        let rate = (n as f64 * (sv.g() - 1.0 / p)).exp2();
        println!("  {n}    {sup:.6e}   {:.6}", sup * rate);
    }
    Ok(())
}

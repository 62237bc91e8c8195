//! Embedding into a weaker metric: moving from exponent p to p' > p
//! costs smoothness kappa = 1 - (1/p - 1/p') sum(1/r_j) per axis, and
//! the contracted vector rho = kappa r shares the shell geometry of r,
//! so the norm ratio of a shell sample isolates the embedding constant.
//!
//!     cargo run --release --example embedding

use besov_approx::anisotropy::{besov_norm, embedding_params, SmoothnessVector};
use besov_approx::experiments::random_bandlimited;
use besov_approx::lattice::{AxisSpec, Exponent};
use std::f64::consts::PI;

fn main() -> besov_approx::Result<()> {
    let sv = SmoothnessVector::new(vec![1.0])?;
    let p = Exponent::Finite(2.0);
    let p_prime = Exponent::Finite(4.0);
    let emb = embedding_params(&sv, p, p_prime)?;
    println!(
        "r = {:?}, p = {p} -> p' = {p_prime}: kappa = {}, rho = {:?}, valid = {}",
        sv.r(),
        emb.kappa,
        emb.rho,
        emb.valid
    );

    let sv_rho = SmoothnessVector::new(emb.rho.clone())?;
    println!(
        "same per-axis scales: a(r) = {:?}, a(rho) = {:?}",
        sv.a(),
        sv_rho.a()
    );

    // ratio of the weak norm to the strong norm per shell level; the
    // embedding theorem says this stays bounded as the level grows
    let axes = vec![AxisSpec::new(16.0 * PI, 1 << 12)?];
    println!("\n  n    max over 5 samples of ||f||_(rho,p') / ||f||_(r,p)");
    for n in 1..=5usize {
        let mut level_max = 0.0f64;
        for seed in 0..5u64 {
            let f = random_bandlimited(2000 + 10 * n as u64 + seed, &sv, n, 1, &axes)?.remove(0);
            let weak = besov_norm(&f, &sv_rho, p_prime, Exponent::Finite(1.0), n)?.value;
            let strong = besov_norm(&f, &sv, p, Exponent::Finite(1.0), n)?.value;
            level_max = level_max.max(weak / strong);
        }
        println!("  {n}    {level_max:.4}");
    }

    // kappa <= 0 marks pairs the theorem does not reach
    let steep = embedding_params(
        &SmoothnessVector::new(vec![1.0, 1.0])?,
        Exponent::Finite(1.0),
        Exponent::Inf,
    )?;
    println!(
        "\nd = 2, r = (1,1), p = 1 -> inf: kappa = {}, valid = {}",
        steep.kappa, steep.valid
    );
    Ok(())
}

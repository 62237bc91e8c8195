//! The headline experiment: the sup-norm approximation error of the
//! normalized witness decays like 2^(-n(g - d/p)), and a log-log fit
//! over levels recovers that slope.
//!
//!     cargo run --release --example rate_experiment

use besov_approx::anisotropy::SmoothnessVector;
use besov_approx::experiments::{rate_experiment, GridPolicy};
use besov_approx::lattice::Exponent;
use std::f64::consts::PI;

fn main() -> besov_approx::Result<()> {
    for (r, p, l, base, cap) in [
        (vec![2.0], 2.0, vec![64.0 * PI], vec![1 << 12], 1 << 14),
        (vec![3.0], 4.0, vec![64.0 * PI], vec![1 << 12], 1 << 14),
    ] {
        let sv = SmoothnessVector::new(r.clone())?;
        let policy = GridPolicy::new(l, base, cap)?;
        let report = rate_experiment(&sv, p, Exponent::Finite(1.0), 2, 6, &policy)?;
        println!(
            "r = {r:?}, p = {p}: predicted slope {:.4}",
            report.predicted_slope
        );
        println!("  n    error            log2");
        for e in &report.entries {
            println!("  {}    {:.6e}   {:+.4}", e.n, e.error, e.error.log2());
        }
        println!(
            "  fitted slope {:.4} (gap {:+.4}, residual rms {:.1e})",
            report.fitted_slope,
            report.fitted_slope - report.predicted_slope,
            report.residual_rms
        );
        if !report.excluded.is_empty() {
            println!(
                "  excluded levels (grid cap hit Nyquist): {:?}",
                report.excluded
            );
        }
        println!("  config digest {}", &report.config_digest[..16]);
        println!();
    }
    Ok(())
}

//! Split a function into its anisotropic dyadic layers and verify the
//! telescoping identity.
//!
//!     cargo run --release --example layer_decompose

use besov_approx::anisotropy::{layer_decompose, SmoothnessVector};
use besov_approx::experiments::random_bandlimited;
use besov_approx::lattice::{add, lp_norm, AxisSpec};
use besov_approx::spectral::fourier_section;
use std::f64::consts::PI;

fn main() -> besov_approx::Result<()> {
    let sv = SmoothnessVector::new(vec![1.0, 2.0])?;
    // axis 0 carries the faster-growing shells (a_1 = 2^{4/3}), so it
    // gets the denser sampling
    let axes = vec![
        AxisSpec::new(4.0 * PI, 512)?,
        AxisSpec::new(16.0 * PI, 256)?,
    ];
    println!(
        "r = (1, 2): per-axis scales a = ({:.4}, {:.4}), so shell s has half-widths (a_1^s, a_2^s)",
        sv.a()[0],
        sv.a()[1]
    );

    // sum of samples from shells 1..=3 plus one from shell 0
    let mut f = random_bandlimited(7, &sv, 0, 1, &axes)?.remove(0);
    for s in 1..=3 {
        f = add(
            &f,
            &random_bandlimited(7 + s as u64, &sv, s, 1, &axes)?.remove(0),
        )?;
    }

    let cutoff = 4;
    let dec = layer_decompose(&f, &sv, cutoff)?;
    println!("\n  s    ||f_s||_2");
    for (s, layer) in dec.layers().iter().enumerate() {
        println!("  {s}    {:.6e}", lp_norm(layer, 2.0)?);
    }

    // sum of layers re-assembles the section onto the largest box
    let mut sum = dec.layers()[0].clone();
    for layer in &dec.layers()[1..] {
        sum = add(&sum, layer)?;
    }
    let section = fourier_section(&f, &sv.block(cutoff))?;
    let worst = sum
        .values()
        .iter()
        .zip(section.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    println!("\nsum of layers vs S_(a^{cutoff})(f): {worst:.2e} absolute");
    Ok(())
}

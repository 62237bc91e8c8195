//! Smoothness vectors, anisotropic dyadic blocks, layer decompositions,
//! and the layered Besov norm.
//!
//! A smoothness vector `r = (r_1, ..., r_d)` induces the harmonic mean
//! `g = (d^-1 sum_j 1/r_j)^-1`, per-axis radii `a_j = 2^(g/r_j)`, and the
//! weight base `b = 2^g`. Frequency space is carved into the nested boxes
//! `D_s = { |lambda_j| <= a_j^s }`; the shells `G_s = D_s \ D_{s-1}` split
//! a function into layers `f_s = S_{a^s} f - S_{a^(s-1)} f`, and the norm
//!
//! ```text
//! ( sum_s  (b^s ||f_s||_p)^theta )^(1/theta)      (sup over s when theta = inf)
//! ```
//!
//! is the object every experiment in this crate measures. The equivalence
//! constants usually hidden in such definitions are fixed to 1: the
//! expression above IS the computed norm.

use crate::error::{Error, Result};
use crate::lattice::{AxisSpec, Exponent, GridFunction};
use crate::spectral::{forward_ft, inverse_ft, FrequencyBox, SpectrumFunction};

/// Direction-dependent smoothness `r` with its derived quantities.
/// Immutable once built; the invariant `prod_j a_j = 2^d` (exponents
/// summing to d) is what makes block volumes grow like `2^(sd)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessVector {
    r: Vec<f64>,
    g: f64,
    a: Vec<f64>,
    b: f64,
}

impl SmoothnessVector {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::Parameter(
                "smoothness vector needs at least one axis".into(),
            ));
        }
        for (j, rj) in r.iter().enumerate() {
            if !rj.is_finite() || *rj <= 0.0 {
                return Err(Error::Parameter(format!(
                    "smoothness exponent on axis {j} must be positive and finite, got {rj}"
                )));
            }
        }
        let d = r.len() as f64;
        let g = d / r.iter().map(|rj| 1.0 / rj).sum::<f64>();
        let a = r.iter().map(|rj| (g / rj).exp2()).collect();
        let b = g.exp2();
        Ok(Self { r, g, a, b })
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn dim(&self) -> usize {
        self.r.len()
    }

    /// Harmonic mean of the exponents; the rate in the main estimate is
    /// `2^(-n(g - d/p))`.
    pub fn g(&self) -> f64 {
        self.g
    }

    /// Per-axis block radii `a_j = 2^(g/r_j)`.
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// Layer weight base `b = 2^g`.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// The box `D_{a^s}` with half-widths `a_j^s = 2^(s g / r_j)`,
    /// computed in the exponent so the product invariant holds to
    /// rounding for any s.
    pub fn block(&self, s: usize) -> FrequencyBox {
        let sigma = self
            .r
            .iter()
            .map(|rj| (s as f64 * self.g / rj).exp2())
            .collect();
        FrequencyBox::new(sigma).expect("positive radii produce a valid box")
    }
}

/// Per-axis multiplier tables for the shell `D_outer \ D_inner` on the
/// bins of `axes`; `inner = None` means the full box `D_outer`.
/// Each bin weight is w_outer - w_inner, which lands in {0, 1/2, 1} and
/// is exact in floating point.
fn shell_tables(
    axes: &[AxisSpec],
    outer: &FrequencyBox,
    inner: Option<&FrequencyBox>,
) -> Vec<(Vec<f64>, Vec<f64>)> {
    (0..axes.len())
        .map(|j| {
            let out: Vec<f64> = (0..axes[j].points())
                .map(|s| FrequencyBox::axis_weight(axes[j].freq(s), outer.sigma()[j]))
                .collect();
            let inn: Vec<f64> = match inner {
                Some(b) => (0..axes[j].points())
                    .map(|s| FrequencyBox::axis_weight(axes[j].freq(s), b.sigma()[j]))
                    .collect(),
                None => vec![0.0; axes[j].points()],
            };
            (out, inn)
        })
        .collect()
}

/// Multiply a cached spectrum by the shell multiplier and return the new
/// spectrum. The shell weight at a bin is the difference of the two box
/// weights (outer minus inner), NOT a product over axes of per-axis shell
/// weights; the latter describes a smaller set once d >= 2.
fn shell_cut(
    spec: &SpectrumFunction,
    tables: &[(Vec<f64>, Vec<f64>)],
    label: String,
) -> Result<SpectrumFunction> {
    let axes = spec.axes();
    let d = axes.len();
    let mut out = spec.coeffs().to_vec();
    let mut idx = vec![0usize; d];
    for v in out.iter_mut() {
        let mut wo = 1.0;
        let mut wi = 1.0;
        for j in 0..d {
            wo *= tables[j].0[idx[j]];
            wi *= tables[j].1[idx[j]];
        }
        let w = wo - wi;
        if w != 1.0 {
            *v *= w;
        }
        for j in (0..d).rev() {
            idx[j] += 1;
            if idx[j] < axes[j].points() {
                break;
            }
            idx[j] = 0;
        }
    }
    SpectrumFunction::from_coeffs(axes.to_vec(), out, label)
}

/// The layers `f_s = S_{a^s} f - S_{a^(s-1)} f` for `s = 0..=cutoff`
/// (layer 0 is the plain section onto `D_1`). All layers are cut from one
/// forward transform, so the telescoping identity
/// `sum_s layers[s] = S_{a^cutoff} f` holds to rounding.
#[derive(Debug)]
pub struct LayerDecomposition {
    base: SmoothnessVector,
    layers: Vec<GridFunction>,
    cutoff: usize,
}

impl LayerDecomposition {
    pub fn base(&self) -> &SmoothnessVector {
        &self.base
    }

    pub fn layers(&self) -> &[GridFunction] {
        &self.layers
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn into_layers(self) -> Vec<GridFunction> {
        self.layers
    }
}

pub fn layer_decompose(
    f: &GridFunction,
    sv: &SmoothnessVector,
    cutoff: usize,
) -> Result<LayerDecomposition> {
    if sv.dim() != f.dim() {
        return Err(Error::AxisMismatch(format!(
            "smoothness vector has {} axes, grid has {}",
            sv.dim(),
            f.dim()
        )));
    }
    // the largest box must be representable; smaller ones then are too
    sv.block(cutoff).check_resolved(f.axes())?;
    let spec = forward_ft(f)?;
    let mut layers = Vec::with_capacity(cutoff + 1);
    for s in 0..=cutoff {
        let outer = sv.block(s);
        let inner = if s == 0 { None } else { Some(sv.block(s - 1)) };
        let tables = shell_tables(f.axes(), &outer, inner.as_ref());
        let cut = shell_cut(&spec, &tables, format!("layer{}[{}]", s, f.label()))?;
        let layer = inverse_ft(&cut)?.with_label(format!("layer{}[{}]", s, f.label()));
        layers.push(layer);
    }
    Ok(LayerDecomposition {
        base: sv.clone(),
        layers,
        cutoff,
    })
}

/// One term of the layered norm: the layer index, its Lp norm, and the
/// weighted contribution `b^s * lp`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerTerm {
    pub s: usize,
    pub lp: f64,
    pub weighted: f64,
}

/// Result of [`besov_norm`]: the norm value, the per-layer terms it was
/// assembled from, and whether the cutoff looks too small for the input.
#[derive(Debug, Clone)]
pub struct BesovNorm {
    pub value: f64,
    pub terms: Vec<LayerTerm>,
    pub truncation_warning: bool,
}

/// Layered Besov norm with cutoff `s_max`:
/// `(sum_{s<=S} (b^s ||f_s||_p)^theta)^(1/theta)`, sup for theta = inf.
///
/// Layers are streamed one at a time from a single cached spectrum, so
/// peak memory is three grids regardless of `s_max`. The truncation
/// warning fires when the last layer contributes more than 10% of the
/// total, which means the cutoff clipped the input's spectrum; results
/// with the warning set underestimate the true norm.
pub fn besov_norm(
    f: &GridFunction,
    sv: &SmoothnessVector,
    p: Exponent,
    theta: Exponent,
    s_max: usize,
) -> Result<BesovNorm> {
    if sv.dim() != f.dim() {
        return Err(Error::AxisMismatch(format!(
            "smoothness vector has {} axes, grid has {}",
            sv.dim(),
            f.dim()
        )));
    }
    if let Exponent::Finite(t) = theta {
        if t < 1.0 {
            return Err(Error::Parameter(format!(
                "theta must satisfy 1 <= theta, got {t}"
            )));
        }
    }
    sv.block(s_max).check_resolved(f.axes())?;
    let spec = forward_ft(f)?;
    let mut terms = Vec::with_capacity(s_max + 1);
    for s in 0..=s_max {
        let outer = sv.block(s);
        let inner = if s == 0 { None } else { Some(sv.block(s - 1)) };
        let tables = shell_tables(f.axes(), &outer, inner.as_ref());
        let cut = shell_cut(&spec, &tables, String::new())?;
        let layer = inverse_ft(&cut)?;
        let lp = p.norm(&layer)?;
        let weighted = (s as f64 * sv.g()).exp2() * lp;
        terms.push(LayerTerm { s, lp, weighted });
    }
    let value = match theta {
        Exponent::Inf => terms.iter().map(|t| t.weighted).fold(0.0, f64::max),
        // theta = 1 skips the powf round trip, keeping the plain sum exact
        Exponent::Finite(1.0) => terms.iter().map(|t| t.weighted).sum(),
        Exponent::Finite(t) => {
            let sum: f64 = terms.iter().map(|term| term.weighted.powf(t)).sum();
            sum.powf(1.0 / t)
        }
    };
    let truncation_warning = match terms.last() {
        Some(last) => last.weighted > 0.1 * value && value > 0.0,
        None => false,
    };
    Ok(BesovNorm {
        value,
        terms,
        truncation_warning,
    })
}

/// Parameters of the embedding into the weaker space over (p', theta'):
/// `kappa = 1 - (1/p - 1/p') sum_j 1/r_j` and `rho_j = r_j kappa`.
/// The embedding carries content only while `kappa > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingParams {
    pub kappa: f64,
    pub rho: Vec<f64>,
    pub valid: bool,
}

pub fn embedding_params(
    sv: &SmoothnessVector,
    p: Exponent,
    p_prime: Exponent,
) -> Result<EmbeddingParams> {
    let inv = |e: &Exponent| match e {
        Exponent::Finite(v) => 1.0 / v,
        Exponent::Inf => 0.0,
    };
    let (ip, ipp) = (inv(&p), inv(&p_prime));
    if ip < ipp {
        return Err(Error::Parameter(format!(
            "embedding needs p <= p', got p = {p}, p' = {p_prime}"
        )));
    }
    let kappa = 1.0 - (ip - ipp) * sv.r().iter().map(|rj| 1.0 / rj).sum::<f64>();
    let rho = sv.r().iter().map(|rj| rj * kappa).collect();
    Ok(EmbeddingParams {
        kappa,
        rho,
        valid: kappa > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{linf_norm, lp_norm, make_grid, scale, sub};
    use crate::spectral::{fourier_section, make_spectrum};
    use approx::assert_relative_eq;
    use rustfft::num_complex::Complex64;

    fn cplx(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn isotropic_vector_collapses_to_scalar() {
        for rho in [0.5, 1.0, 2.5] {
            let sv = SmoothnessVector::new(vec![rho; 3]).unwrap();
            assert_relative_eq!(sv.g(), rho, max_relative = 1e-14);
            for aj in sv.a() {
                assert_relative_eq!(*aj, rho.exp2().powf(1.0 / rho), max_relative = 1e-14);
            }
        }
        let sv = SmoothnessVector::new(vec![1.0, 1.0, 1.0]).unwrap();
        assert_relative_eq!(sv.g(), 1.0);
        assert_eq!(sv.a(), &[2.0, 2.0, 2.0]);
        assert_relative_eq!(sv.b(), 2.0);
    }

    #[test]
    fn mixed_vector_values() {
        let sv = SmoothnessVector::new(vec![1.0, 2.0]).unwrap();
        assert_relative_eq!(sv.g(), 4.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(sv.a()[0], 2.5198420997897464, max_relative = 1e-15);
        assert_relative_eq!(sv.a()[1], 1.5874010519681994, max_relative = 1e-15);
        assert_relative_eq!(sv.a()[0] * sv.a()[1], 4.0, max_relative = 1e-14);
        assert_relative_eq!(sv.b(), 2.5198420997897464, max_relative = 1e-15);
    }

    #[test]
    fn nonpositive_exponent_rejected() {
        assert!(SmoothnessVector::new(vec![1.0, 0.0]).is_err());
        assert!(SmoothnessVector::new(vec![-2.0]).is_err());
        assert!(SmoothnessVector::new(vec![]).is_err());
    }

    #[test]
    fn blocks_have_unit_base_and_geometric_volume() {
        let sv = SmoothnessVector::new(vec![1.0, 2.0]).unwrap();
        let b0 = sv.block(0);
        assert_eq!(b0.sigma(), &[1.0, 1.0]);
        let b1 = sv.block(1);
        assert_relative_eq!(b1.sigma()[0], 2.5198420997897464, max_relative = 1e-15);
        assert_relative_eq!(b1.sigma()[1], 1.5874010519681994, max_relative = 1e-15);
        for s in 0..12 {
            let vol: f64 = sv.block(s).sigma().iter().product();
            assert_relative_eq!(vol, (2.0f64 * s as f64).exp2(), max_relative = 1e-12);
        }
    }

    /// Spectrum with fixed bins inside the shell interiors of `sv`,
    /// conjugate-symmetric so the grid samples are real.
    fn multi_shell_function(ax: AxisSpec, sv: &SmoothnessVector, shells: &[usize]) -> GridFunction {
        let dl = ax.delta_lambda();
        let mut bins: Vec<(i64, Complex64)> = Vec::new();
        for (k, &s) in shells.iter().enumerate() {
            let lo = if s == 0 {
                0.0
            } else {
                sv.block(s - 1).sigma()[0]
            };
            let hi = sv.block(s).sigma()[0];
            // two bins per shell, strictly inside the open interval
            let m1 = ((lo + 0.3 * (hi - lo)) / dl).ceil() as i64;
            let m2 = ((lo + 0.7 * (hi - lo)) / dl).floor() as i64;
            bins.push((m1, Complex64::new(1.0 + k as f64, 0.5)));
            if m2 > m1 {
                bins.push((m2, Complex64::new(0.3, -(k as f64) - 0.7)));
            }
        }
        let spec = make_spectrum(&[ax], "shells", |l| {
            let m = (l[0] / dl).round() as i64;
            let mut v = Complex64::new(0.0, 0.0);
            for (b, c) in &bins {
                if m == *b {
                    v += c;
                } else if m == -*b {
                    v += c.conj();
                }
            }
            v
        })
        .unwrap();
        inverse_ft(&spec).unwrap()
    }

    #[test]
    fn single_block_input_has_one_layer() {
        let ax = AxisSpec::new(16.0, 1 << 8).unwrap();
        let sv = SmoothnessVector::new(vec![1.0]).unwrap();
        // an exact lattice frequency inside D_1 = [-1, 1], so the samples
        // are grid-periodic and the spectrum is two clean bins
        let q = 4.0 * ax.delta_lambda();
        let f = make_grid(&[ax], "slow", |x| cplx((q * x[0]).sin())).unwrap();
        let dec = layer_decompose(&f, &sv, 4).unwrap();
        assert_eq!(dec.layers().len(), 5);
        let base = linf_norm(&f);
        let d0 = sub(&dec.layers()[0], &f).unwrap();
        assert!(linf_norm(&d0) < 1e-10 * base);
        for s in 1..=4 {
            assert!(
                linf_norm(&dec.layers()[s]) < 1e-10 * base,
                "layer {s} not empty"
            );
        }
    }

    #[test]
    fn layers_telescope_to_the_big_section() {
        let ax = AxisSpec::new(16.0, 1 << 9).unwrap();
        let sv = SmoothnessVector::new(vec![1.0]).unwrap();
        let f = make_grid(&[ax], "bump", |x| {
            cplx((-x[0] * x[0] / 2.0).exp() * (5.0 * x[0]).cos())
        })
        .unwrap();
        let cutoff = 3;
        let dec = layer_decompose(&f, &sv, cutoff).unwrap();
        let mut acc = dec.layers()[0].clone();
        for s in 1..=cutoff {
            acc = crate::lattice::add(&acc, &dec.layers()[s]).unwrap();
        }
        let section = fourier_section(&f, &sv.block(cutoff)).unwrap();
        let diff = sub(&acc, &section).unwrap();
        assert!(linf_norm(&diff) < 1e-12 * linf_norm(&f));
    }

    #[test]
    fn layer_spectra_stay_in_their_shells() {
        let ax = AxisSpec::new(16.0, 1 << 9).unwrap();
        let sv = SmoothnessVector::new(vec![1.0]).unwrap();
        let f = multi_shell_function(ax, &sv, &[1, 2, 3]);
        let dec = layer_decompose(&f, &sv, 4).unwrap();
        for (s, layer) in dec.layers().iter().enumerate() {
            let spec = forward_ft(layer).unwrap();
            let total: f64 = spec.coeffs().iter().map(|c| c.norm_sqr()).sum();
            if total == 0.0 {
                continue;
            }
            let outer = sv.block(s);
            let inner = if s == 0 { None } else { Some(sv.block(s - 1)) };
            let mut outside = 0.0;
            for (i, c) in spec.coeffs().iter().enumerate() {
                let lam = spec.freq_coords(i);
                let wo = outer.weight(&lam);
                let wi = inner.as_ref().map_or(0.0, |b| b.weight(&lam));
                if wo - wi == 0.0 {
                    outside += c.norm_sqr();
                }
            }
            assert!(
                outside <= 1e-10 * total,
                "layer {s} leaks {}",
                outside / total
            );
        }
    }

    #[test]
    fn besov_norm_of_zero_is_zero() {
        let ax = AxisSpec::new(8.0, 1 << 6).unwrap();
        let sv = SmoothnessVector::new(vec![1.0]).unwrap();
        let f = make_grid(&[ax], "zero", |_| cplx(0.0)).unwrap();
        let norm = besov_norm(&f, &sv, Exponent::Finite(2.0), Exponent::Finite(1.0), 3).unwrap();
        assert_eq!(norm.value, 0.0);
        assert!(!norm.truncation_warning);
    }

    #[test]
    fn single_layer_norm_is_weighted_lp_for_every_theta() {
        let ax = AxisSpec::new(16.0, 1 << 9).unwrap();
        let sv = SmoothnessVector::new(vec![1.0]).unwrap();
        let f = multi_shell_function(ax, &sv, &[2]);
        let lp = lp_norm(&f, 2.0).unwrap();
        let want = (2.0 * sv.g()).exp2() * lp;
        for theta in [
            Exponent::Finite(1.0),
            Exponent::Finite(2.0),
            Exponent::Finite(3.5),
            Exponent::Inf,
        ] {
            let norm = besov_norm(&f, &sv, Exponent::Finite(2.0), theta, 4).unwrap();
            assert_relative_eq!(norm.value, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn norm_is_monotone_in_theta() {
        let ax = AxisSpec::new(16.0, 1 << 9).unwrap();
        let sv = SmoothnessVector::new(vec![1.0]).unwrap();
        let f = multi_shell_function(ax, &sv, &[0, 1, 2, 3]);
        let thetas = [1.0, 1.5, 2.0, 4.0, 16.0];
        let mut prev = f64::INFINITY;
        for t in thetas {
            let v = besov_norm(&f, &sv, Exponent::Finite(2.0), Exponent::Finite(t), 4)
                .unwrap()
                .value;
            assert!(v <= prev * (1.0 + 1e-12), "theta {t} broke monotonicity");
            prev = v;
        }
        let vinf = besov_norm(&f, &sv, Exponent::Finite(2.0), Exponent::Inf, 4)
            .unwrap()
            .value;
        assert!(vinf <= prev * (1.0 + 1e-12));
    }

    #[test]
    fn norm_is_absolutely_homogeneous() {
        let ax = AxisSpec::new(16.0, 1 << 8).unwrap();
        let sv = SmoothnessVector::new(vec![1.0]).unwrap();
        let f = multi_shell_function(ax, &sv, &[1, 3]);
        let g = scale(&f, Complex64::new(-2.5, 0.0)).unwrap();
        let nf = besov_norm(&f, &sv, Exponent::Finite(2.0), Exponent::Finite(1.0), 4).unwrap();
        let ng = besov_norm(&g, &sv, Exponent::Finite(2.0), Exponent::Finite(1.0), 4).unwrap();
        assert_relative_eq!(ng.value, 2.5 * nf.value, max_relative = 1e-12);
    }

    #[test]
    fn truncation_warning_fires_when_cutoff_clips() {
        let ax = AxisSpec::new(16.0, 1 << 9).unwrap();
        let sv = SmoothnessVector::new(vec![1.0]).unwrap();
        let f = multi_shell_function(ax, &sv, &[3]);
        let clipped = besov_norm(&f, &sv, Exponent::Finite(2.0), Exponent::Finite(1.0), 3).unwrap();
        assert!(clipped.truncation_warning);
        let roomy = besov_norm(&f, &sv, Exponent::Finite(2.0), Exponent::Finite(1.0), 5).unwrap();
        assert!(!roomy.truncation_warning);
    }

    #[test]
    fn besov_rejects_unresolvable_cutoff() {
        let ax = AxisSpec::new(4.0, 1 << 4).unwrap(); // nyquist = 4 pi
        let sv = SmoothnessVector::new(vec![1.0]).unwrap();
        let f = make_grid(&[ax], "one", |_| cplx(1.0)).unwrap();
        assert!(matches!(
            besov_norm(&f, &sv, Exponent::Finite(2.0), Exponent::Finite(1.0), 9),
            Err(Error::NyquistViolation { .. })
        ));
    }

    #[test]
    fn embedding_parameter_arithmetic() {
        let sv = SmoothnessVector::new(vec![2.0]).unwrap();
        let e = embedding_params(&sv, Exponent::Finite(2.0), Exponent::Inf).unwrap();
        assert_relative_eq!(e.kappa, 0.75, max_relative = 1e-15);
        assert_relative_eq!(e.rho[0], 1.5, max_relative = 1e-15);
        assert!(e.valid);

        let same = embedding_params(&sv, Exponent::Finite(3.0), Exponent::Finite(3.0)).unwrap();
        assert_relative_eq!(same.kappa, 1.0);
        assert_eq!(same.rho, vec![2.0]);

        let flat = SmoothnessVector::new(vec![1.0, 1.0]).unwrap();
        let e2 = embedding_params(&flat, Exponent::Finite(2.0), Exponent::Inf).unwrap();
        assert!(e2.kappa.abs() < 1e-15);
        assert!(!e2.valid);

        assert!(embedding_params(&sv, Exponent::Inf, Exponent::Finite(2.0)).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn radii_product_is_two_to_the_d(r in proptest::collection::vec(0.2f64..8.0, 1..5)) {
                let d = r.len();
                let sv = SmoothnessVector::new(r).unwrap();
                let prod: f64 = sv.a().iter().product();
                prop_assert!((prod - (d as f64).exp2()).abs() <= 1e-12 * (d as f64).exp2());
                prop_assert!((sv.b() - sv.g().exp2()).abs() <= 1e-14 * sv.b());
            }

            #[test]
            fn block_volumes_follow_the_exponent_sum(r in proptest::collection::vec(0.3f64..6.0, 1..4), s in 0usize..10) {
                let d = r.len() as f64;
                let sv = SmoothnessVector::new(r).unwrap();
                let vol: f64 = sv.block(s).sigma().iter().product();
                let want = (d * s as f64).exp2();
                prop_assert!((vol - want).abs() <= 1e-12 * want);
            }
        }
    }
}

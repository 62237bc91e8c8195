//! Uniform tensor-product grids on centered boxes and discrete Lp norms.
//!
//! An axis covers `[-L, L)` with `N` equispaced nodes `x_k = -L + k h`,
//! `h = 2L/N`. All grid quadrature is the left-endpoint rectangle rule,
//! which on these periodic-style grids coincides with the trapezoid rule
//! for functions equal at `±L`. Sums are accumulated with a fixed-shape
//! pairwise tree so results are bit-identical across runs and thread
//! counts.
//!
//! `linf_norm` reports the maximum over nodes. That is a lower estimate
//! of the essential sup of the underlying function; it is a faithful one
//! when the grid resolves the fastest oscillation present (at least 8
//! nodes per period, i.e. `h <= pi / (4 sigma_max)`).

use crate::error::{Error, Result};
use rustfft::num_complex::Complex64;

/// One axis of a tensor-product grid: half-width `L` and point count `N`.
///
/// `N` must be a power of two, at least 4, so transforms stay radix-friendly
/// and the frequency range splits symmetrically.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    half_width: f64,
    points: usize,
}

impl AxisSpec {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !half_width.is_finite() || half_width <= 0.0 {
            return Err(Error::Parameter(format!(
                "axis half-width must be positive and finite, got {half_width}"
            )));
        }
        if points < 4 || !points.is_power_of_two() {
            return Err(Error::Parameter(format!(
                "axis point count must be a power of two >= 4, got {points}"
            )));
        }
        Ok(Self { half_width, points })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Node spacing h = 2L/N.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    /// Frequency-node spacing of the matching spectrum, pi/L.
    pub fn delta_lambda(&self) -> f64 {
        std::f64::consts::PI / self.half_width
    }

    /// Largest representable frequency, pi/h.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.spacing()
    }

    /// k-th node, x_k = -L + k h.
    pub fn node(&self, k: usize) -> f64 {
        debug_assert!(k < self.points);
        -self.half_width + k as f64 * self.spacing()
    }

    /// Frequency at storage slot `s` of the matching spectrum:
    /// lambda = (s - N/2) * pi/L, so slot 0 is the Nyquist bin -N/2.
    pub fn freq(&self, s: usize) -> f64 {
        debug_assert!(s < self.points);
        (s as f64 - self.points as f64 / 2.0) * self.delta_lambda()
    }
}

/// Complex samples of a function on the tensor grid of `axes`,
/// stored row-major (axis 0 slowest). Values are validated finite at
/// construction and the struct is immutable afterwards, so norms and
/// transforms can be computed concurrently without locks.
#[derive(Debug, Clone)]
pub struct GridFunction {
    axes: Vec<AxisSpec>,
    values: Vec<Complex64>,
    label: String,
}

impl GridFunction {
    pub fn from_values(axes: Vec<AxisSpec>, values: Vec<Complex64>, label: String) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Parameter("grid needs at least one axis".into()));
        }
        let want: usize = axes.iter().map(|a| a.points()).product();
        if values.len() != want {
            return Err(Error::Parameter(format!(
                "value count {} does not match grid size {}",
                values.len(),
                want
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() {
                let coords = coords_of(&axes, i);
                return Err(Error::NonFinite {
                    value: if v.re.is_finite() { v.im } else { v.re },
                    coords,
                    index: i,
                });
            }
        }
        Ok(Self {
            axes,
            values,
            label,
        })
    }

    pub fn axes(&self) -> &[AxisSpec] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Cell volume of the quadrature rule, prod_j h_j.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing()).product()
    }

    /// Coordinates of the node at flat index `i`.
    pub fn node_coords(&self, i: usize) -> Vec<f64> {
        coords_of(&self.axes, i)
    }

    pub fn with_label(mut self, label: String) -> Self {
        self.label = label;
        self
    }
}

fn coords_of(axes: &[AxisSpec], flat: usize) -> Vec<f64> {
    let mut rem = flat;
    let mut idx = vec![0usize; axes.len()];
    for j in (0..axes.len()).rev() {
        idx[j] = rem % axes[j].points();
        rem /= axes[j].points();
    }
    idx.iter().zip(axes).map(|(&k, ax)| ax.node(k)).collect()
}

/// Evaluate `f` at every node of the tensor grid. `label` should identify
/// the evaluator so downstream files and reports stay traceable. Non-finite
/// evaluator output is rejected with the offending node coordinates.
pub fn make_grid<F>(axes: &[AxisSpec], label: &str, mut f: F) -> Result<GridFunction>
where
    F: FnMut(&[f64]) -> Complex64,
{
    if axes.is_empty() {
        return Err(Error::Parameter("grid needs at least one axis".into()));
    }
    let total: usize = axes.iter().map(|a| a.points()).product();
    let d = axes.len();
    let mut values = Vec::with_capacity(total);
    let mut idx = vec![0usize; d];
    let mut coords: Vec<f64> = axes.iter().map(|a| a.node(0)).collect();
    for flat in 0..total {
        let v = f(&coords);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite {
                value: if v.re.is_finite() { v.im } else { v.re },
                coords,
                index: flat,
            });
        }
        values.push(v);
        // odometer increment, last axis fastest
        for j in (0..d).rev() {
            idx[j] += 1;
            if idx[j] < axes[j].points() {
                coords[j] = axes[j].node(idx[j]);
                break;
            }
            idx[j] = 0;
            coords[j] = axes[j].node(0);
        }
    }
    GridFunction::from_values(axes.to_vec(), values, label.to_string())
}

/// Pairwise (tree) summation with a fixed midpoint split.
///
/// The reduction shape depends only on `n`, never on the data or on any
/// thread count, so repeated evaluations are bit-identical. Blocks of at
/// most 32 terms are folded left to right.
pub fn pairwise_sum<F>(n: usize, term: &F) -> f64
where
    F: Fn(usize) -> f64,
{
    fn rec<F: Fn(usize) -> f64>(lo: usize, hi: usize, term: &F) -> f64 {
        if hi - lo <= 32 {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += term(i);
            }
            return acc;
        }
        let mid = lo + (hi - lo) / 2;
        rec(lo, mid, term) + rec(mid, hi, term)
    }
    if n == 0 {
        0.0
    } else {
        rec(0, n, term)
    }
}

/// Discrete Lp norm: `(sum_k |f(x_k)|^p * prod_j h_j)^(1/p)`, `1 <= p < inf`.
///
/// Infinite p is a different estimator entirely; use [`linf_norm`].
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    if !p.is_finite() || p < 1.0 {
        return Err(Error::Parameter(format!(
            "lp_norm needs finite p >= 1, got {p} (use linf_norm for p = inf)"
        )));
    }
    let vals = f.values();
    let sum = if p == 2.0 {
        pairwise_sum(vals.len(), &|i| vals[i].norm_sqr())
    } else if p == 1.0 {
        pairwise_sum(vals.len(), &|i| vals[i].norm())
    } else {
        pairwise_sum(vals.len(), &|i| vals[i].norm().powf(p))
    };
    Ok((sum * f.cell_volume()).powf(1.0 / p))
}

/// Maximum of |f| over grid nodes: a lower estimate of the essential sup,
/// faithful once the sampling condition `h_j <= pi/(4 sigma_j)` holds for
/// the band actually present.
pub fn linf_norm(f: &GridFunction) -> f64 {
    f.values().iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Dispatches between [`lp_norm`] and [`linf_norm`]; also reused as the
/// summability exponent of Besov norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Inf,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::Parameter(format!(
                "exponent must satisfy 1 <= p, got {p}"
            )));
        }
        Ok(Exponent::Finite(p))
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "Inf" | "INF" | "oo" => Ok(Exponent::Inf),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::Parameter(format!("cannot parse exponent {other:?}")))?;
                Exponent::finite(p)
            }
        }
    }

    pub fn norm(&self, f: &GridFunction) -> Result<f64> {
        match self {
            Exponent::Finite(p) => lp_norm(f, *p),
            Exponent::Inf => Ok(linf_norm(f)),
        }
    }

    /// Hoelder conjugate: 1/p + 1/p' = 1.
    pub fn conjugate(&self) -> Exponent {
        match self {
            Exponent::Inf => Exponent::Finite(1.0),
            Exponent::Finite(p) if *p == 1.0 => Exponent::Inf,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(p) => write!(fm, "{p}"),
            Exponent::Inf => write!(fm, "inf"),
        }
    }
}

fn check_same_axes(f: &GridFunction, g: &GridFunction) -> Result<()> {
    if f.axes() != g.axes() {
        return Err(Error::AxisMismatch(format!(
            "grids {:?} vs {:?}",
            f.axes(),
            g.axes()
        )));
    }
    Ok(())
}

pub fn add(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    check_same_axes(f, g)?;
    let values = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| a + b)
        .collect();
    GridFunction::from_values(
        f.axes().to_vec(),
        values,
        format!("({})+({})", f.label(), g.label()),
    )
}

pub fn sub(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    check_same_axes(f, g)?;
    let values = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| a - b)
        .collect();
    GridFunction::from_values(
        f.axes().to_vec(),
        values,
        format!("({})-({})", f.label(), g.label()),
    )
}

pub fn scale(f: &GridFunction, c: Complex64) -> Result<GridFunction> {
    let values = f.values().iter().map(|a| a * c).collect();
    GridFunction::from_values(f.axes().to_vec(), values, format!("{}*({})", c, f.label()))
}

/// Tail of the Lp norm lost to truncating a `1/|x|`-envelope function at
/// `|x| = L` on one axis: `(2 L^(1-p) / (p-1))^(1/p)`. Callers sizing a
/// domain for sinc-type integrands should keep this below their tolerance
/// times the expected norm.
pub fn sinc_tail_bound(half_width: f64, p: f64) -> Result<f64> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::Parameter(format!(
            "tail bound needs 1 < p < inf, got {p}"
        )));
    }
    Ok((2.0 * half_width.powf(1.0 - p) / (p - 1.0)).powf(1.0 / p))
}

/// Enforce the tail rule on every axis: error if the per-axis bound exceeds
/// `tol * scale`.
pub fn require_tail(axes: &[AxisSpec], p: f64, tol: f64, scale: f64) -> Result<()> {
    for (j, ax) in axes.iter().enumerate() {
        let bound = sinc_tail_bound(ax.half_width(), p)?;
        if bound > tol * scale {
            return Err(Error::DomainTooSmall {
                axis: j,
                bound,
                tol: tol * scale,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cplx(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn axis_nodes_cover_half_open_box() {
        let ax = AxisSpec::new(std::f64::consts::PI, 4).unwrap();
        let nodes: Vec<f64> = (0..4).map(|k| ax.node(k)).collect();
        let pi = std::f64::consts::PI;
        assert_relative_eq!(nodes[0], -pi, max_relative = 1e-15);
        assert_relative_eq!(nodes[1], -pi / 2.0, max_relative = 1e-15);
        assert_relative_eq!(nodes[2], 0.0, epsilon = 1e-15);
        assert_relative_eq!(nodes[3], pi / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn axis_rejects_bad_specs() {
        assert!(AxisSpec::new(0.0, 8).is_err());
        assert!(AxisSpec::new(-1.0, 8).is_err());
        assert!(AxisSpec::new(1.0, 3).is_err());
        assert!(AxisSpec::new(1.0, 12).is_err());
        assert!(AxisSpec::new(f64::NAN, 8).is_err());
    }

    #[test]
    fn constant_one_has_norm_sqrt_measure() {
        // |[-L, L)| = 2L, so ||1||_2 = sqrt(2L); rectangle rule is exact here.
        let ax = AxisSpec::new(1.0, 8).unwrap();
        let f = make_grid(&[ax], "one", |_| cplx(1.0)).unwrap();
        assert_relative_eq!(
            lp_norm(&f, 2.0).unwrap(),
            2.0_f64.sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn gaussian_l2_norm_matches_closed_form() {
        // ||exp(-x^2/2)||_2 = pi^(1/4); the tail beyond L=16 is ~1e-56.
        let ax = AxisSpec::new(16.0, 1 << 12).unwrap();
        let f = make_grid(&[ax], "gaussian", |x| cplx((-x[0] * x[0] / 2.0).exp())).unwrap();
        let expect = std::f64::consts::PI.powf(0.25);
        assert_relative_eq!(lp_norm(&f, 2.0).unwrap(), expect, max_relative = 1e-6);
        assert_relative_eq!(
            lp_norm(&f, 2.0).unwrap(),
            1.3313353638003897,
            max_relative = 1e-6
        );
    }

    #[test]
    fn gaussian_norm_stable_under_refinement() {
        let mut norms = Vec::new();
        for shift in [10, 11] {
            let ax = AxisSpec::new(16.0, 1 << shift).unwrap();
            let f = make_grid(&[ax], "gaussian", |x| cplx((-x[0] * x[0] / 2.0).exp())).unwrap();
            norms.push(lp_norm(&f, 2.0).unwrap());
        }
        assert!((norms[0] - norms[1]).abs() / norms[1] < 1e-6);
    }

    #[test]
    fn linf_of_sine_is_one() {
        let ax = AxisSpec::new(16.0, 1 << 10).unwrap();
        let f = make_grid(&[ax], "sin", |x| cplx(x[0].sin())).unwrap();
        let m = linf_norm(&f);
        assert!(m <= 1.0 + 1e-12);
        assert!(m > 1.0 - 1e-4);
    }

    #[test]
    fn norms_are_deterministic() {
        let ax = AxisSpec::new(8.0, 1 << 10).unwrap();
        let f = make_grid(&[ax], "wiggle", |x| {
            Complex64::new((3.1 * x[0]).sin(), (0.7 * x[0]).cos())
        })
        .unwrap();
        let a = lp_norm(&f, 3.0).unwrap();
        let b = lp_norm(&f, 3.0).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn non_finite_evaluator_reports_coords() {
        let ax = AxisSpec::new(1.0, 4).unwrap();
        let err = make_grid(&[ax], "bad", |x| cplx(1.0 / x[0])).unwrap_err();
        match err {
            Error::NonFinite { coords, .. } => {
                assert_eq!(coords.len(), 1);
                assert!(coords[0].abs() < 1e-12);
            }
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn add_sub_scale_roundtrip() {
        let ax = AxisSpec::new(2.0, 16).unwrap();
        let f = make_grid(std::slice::from_ref(&ax), "f", |x| cplx(x[0])).unwrap();
        let g = make_grid(&[ax], "g", |x| cplx(x[0] * x[0])).unwrap();
        let s = sub(&add(&f, &g).unwrap(), &g).unwrap();
        for (a, b) in s.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-14);
        }
        let tw = scale(&f, Complex64::new(2.0, 0.0)).unwrap();
        assert_relative_eq!(
            lp_norm(&tw, 2.0).unwrap(),
            2.0 * lp_norm(&f, 2.0).unwrap(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn mismatched_axes_rejected() {
        let f = make_grid(&[AxisSpec::new(1.0, 8).unwrap()], "f", |_| cplx(1.0)).unwrap();
        let g = make_grid(&[AxisSpec::new(2.0, 8).unwrap()], "g", |_| cplx(1.0)).unwrap();
        assert!(add(&f, &g).is_err());
    }

    #[test]
    fn tail_bound_formula() {
        // p=2, L=200: (2/L)^(1/2)
        let b = sinc_tail_bound(200.0, 2.0).unwrap();
        assert_relative_eq!(b, (2.0 / 200.0_f64).sqrt(), max_relative = 1e-15);
        assert!(require_tail(&[AxisSpec::new(200.0, 8).unwrap()], 2.0, 0.2, 1.0).is_ok());
        assert!(require_tail(&[AxisSpec::new(200.0, 8).unwrap()], 2.0, 1e-3, 1.0).is_err());
    }

    #[test]
    fn row_major_2d_layout() {
        let ax0 = AxisSpec::new(1.0, 4).unwrap();
        let ax1 = AxisSpec::new(2.0, 8).unwrap();
        let f = make_grid(&[ax0.clone(), ax1.clone()], "plane", |x| {
            cplx(10.0 * x[0] + x[1])
        })
        .unwrap();
        // flat index = k0 * N1 + k1
        let k0 = 2usize;
        let k1 = 5usize;
        let got = f.values()[k0 * 8 + k1].re;
        assert_relative_eq!(
            got,
            10.0 * ax0.node(k0) + ax1.node(k1),
            max_relative = 1e-14
        );
        let coords = f.node_coords(k0 * 8 + k1);
        assert_relative_eq!(coords[0], ax0.node(k0), max_relative = 1e-14);
        assert_relative_eq!(coords[1], ax1.node(k1), max_relative = 1e-14);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn small_grid() -> impl Strategy<Value = GridFunction> {
            (2usize..5, 0.5f64..4.0, any::<u64>()).prop_map(|(shift, l, seed)| {
                let n = 1usize << shift;
                let ax = AxisSpec::new(l, n).unwrap();
                // cheap deterministic pseudo-values from the seed
                let mut state = seed | 1;
                let vals: Vec<Complex64> = (0..n)
                    .map(|_| {
                        state = state
                            .wrapping_mul(6364136223846793005)
                            .wrapping_add(1442695040888963407);
                        let re = ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0;
                        state = state
                            .wrapping_mul(6364136223846793005)
                            .wrapping_add(1442695040888963407);
                        let im = ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0;
                        Complex64::new(re, im)
                    })
                    .collect();
                GridFunction::from_values(vec![ax], vals, "prop".into()).unwrap()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn absolute_homogeneity(f in small_grid(), c in -8.0f64..8.0, p in 1.0f64..5.0) {
                let scaled = scale(&f, Complex64::new(c, 0.0)).unwrap();
                let lhs = lp_norm(&scaled, p).unwrap();
                let rhs = c.abs() * lp_norm(&f, p).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
            }

            #[test]
            fn triangle_inequality(a in small_grid(), p in 1.0f64..5.0, seed in any::<u64>()) {
                // second grid on the same axes
                let mut state = seed | 1;
                let vals: Vec<Complex64> = (0..a.len()).map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    Complex64::new(((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0, 0.0)
                }).collect();
                let b = GridFunction::from_values(a.axes().to_vec(), vals, "b".into()).unwrap();
                let sum = add(&a, &b).unwrap();
                let lhs = lp_norm(&sum, p).unwrap();
                let rhs = lp_norm(&a, p).unwrap() + lp_norm(&b, p).unwrap();
                prop_assert!(lhs <= rhs * (1.0 + 1e-12));
            }

            #[test]
            fn linf_triangle_and_homogeneity(a in small_grid(), c in -4.0f64..4.0) {
                let scaled = scale(&a, Complex64::new(c, 0.0)).unwrap();
                let lhs = linf_norm(&scaled);
                let rhs = c.abs() * linf_norm(&a);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
            }
        }
    }
}

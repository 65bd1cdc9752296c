//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{Error, Result};

/// Tolerances and subdivision budget for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 60,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::domain(format!(
                "quadrature tolerances must be positive (abs_tol = {}, rel_tol = {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::domain("quadrature max_subdivisions must be >= 1"));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub err_est: f64,
    /// Number of subintervals in the final partition.
    pub intervals: usize,
}

// Kronrod abscissae on [0, 1]; odd indices are the Gauss points.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

fn check_finite(y: f64, x: f64) -> Result<f64> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::domain(format!("integrand is not finite at x = {x:e} (value {y})")))
    }
}

fn gauss_kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    let fc = check_finite(f(center)?, center)?;
    let mut res_k = WGK[7] * fc;
    let mut res_g = WG[3] * fc;
    let mut res_abs = res_k.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = check_finite(f(center - dx)?, center - dx)?;
        let f2 = check_finite(f(center + dx)?, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, err })
}

/// Adaptive integral of a fallible integrand over `[a, b]`.
///
/// Errors raised by `f` are returned unchanged.
pub fn try_integrate_finite<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::domain(format!("integration bounds must be finite with a <= b, got [{a}, {b}]")));
    }
    try_integrate_with_breakpoints(f, &[a, b], spec)
}

/// Adaptive integral over `[points[0], points[last]]`, starting from the
/// partition given by `points` (strictly increasing, finite). Use interior
/// points to flag where the integrand changes quickly.
///
/// `spec.max_subdivisions - 1` bounds the number of bisections on top of
/// the initial partition.
pub fn try_integrate_with_breakpoints<F>(mut f: F, points: &[f64], spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    spec.validate()?;
    if points.len() < 2 || points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain(format!("breakpoints must be finite and nondecreasing, got {points:?}")));
    }
    if points[0] == points[points.len() - 1] {
        return Ok(QuadResult {
            value: 0.0,
            err_est: 0.0,
            intervals: 1,
        });
    }

    let mut segments = Vec::with_capacity(points.len() + spec.max_subdivisions);
    for w in points.windows(2) {
        if w[1] > w[0] {
            segments.push(gauss_kronrod(&mut f, w[0], w[1])?);
        }
    }
    let limit = segments.len() + spec.max_subdivisions - 1;
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let err_est: f64 = segments.iter().map(|s| s.err).sum();
        if err_est <= spec.target(value) {
            return Ok(QuadResult {
                value,
                err_est,
                intervals: segments.len(),
            });
        }

        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .expect("at least one segment");
        let seg = segments[worst];
        let mid = 0.5 * (seg.a + seg.b);
        let too_narrow = mid <= seg.a || mid >= seg.b;
        if segments.len() >= limit || too_narrow {
            return Err(Error::Convergence {
                what: "adaptive quadrature",
                value,
                err_est,
            });
        }
        let left = gauss_kronrod(&mut f, seg.a, mid)?;
        let right = gauss_kronrod(&mut f, mid, seg.b)?;
        segments[worst] = left;
        segments.push(right);
    }
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate_finite<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_finite(|x| Ok(f(x)), a, b, spec)
}

/// Integral of a fallible `f` over `[0, ∞)`, computed on `[0, 1)` after
/// `s = t/(1-t)`, `ds = dt/(1-t)²`. The Kronrod nodes are interior so `t = 1`
/// is never evaluated.
pub fn try_integrate_semi_infinite<F>(f: F, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    try_integrate_semi_infinite_with_breakpoints(f, &[], spec)
}

/// As [`try_integrate_semi_infinite`], with the initial partition split at
/// the images of `breakpoints` (positive, finite; any order).
pub fn try_integrate_semi_infinite_with_breakpoints<F>(mut f: F, breakpoints: &[f64], spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut points = vec![0.0];
    for &s in breakpoints {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::domain(format!("semi-infinite breakpoints must be positive and finite, got {s}")));
        }
        points.push(s / (1.0 + s));
    }
    points.push(1.0);
    points.sort_by(f64::total_cmp);
    points.dedup();
    try_integrate_with_breakpoints(
        |t| {
            let one_minus = 1.0 - t;
            let s = t / one_minus;
            let y = f(s)?;
            // f decays, so a zero value wins over an overflowing Jacobian
            if y == 0.0 {
                Ok(0.0)
            } else {
                Ok(y / (one_minus * one_minus))
            }
        },
        &points,
        spec,
    )
}

/// Integral of `f` over `[0, ∞)`; see [`try_integrate_semi_infinite`].
pub fn integrate_semi_infinite<F>(mut f: F, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_semi_infinite(|s| Ok(f(s)), spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn kronrod_weights_sum_to_two() {
        let k: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        let g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_finite_examples() {
        let r = integrate_finite(|_| 1.0, 0.0, 1.0, &spec()).unwrap();
        assert!((r.value - 1.0).abs() <= r.err_est.max(1e-15));
        let r = integrate_finite(|x| x * x, 0.0, 1.0, &spec()).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() <= r.err_est.max(1e-15));
        let r = integrate_finite(|x| (-x).exp(), 0.0, 10.0, &spec()).unwrap();
        let exact = 1.0 - (-10.0f64).exp();
        assert!((r.value - exact).abs() <= r.err_est);
        assert!((r.value - exact).abs() <= 1e-10);
    }

    #[test]
    fn closed_form_semi_infinite_examples() {
        let r = integrate_semi_infinite(|s| (-s).exp(), &spec()).unwrap();
        assert!((r.value - 1.0).abs() <= r.err_est);
        let r = integrate_semi_infinite(|s| 1.0 / ((1.0 + s) * (1.0 + s)), &spec()).unwrap();
        assert!((r.value - 1.0).abs() <= r.err_est.max(1e-15));
    }

    #[test]
    fn polynomial_exactness_of_single_panel() {
        // K15 is exact through degree 22.
        let s = QuadratureSpec::new(1e-300, 1e-300, 1).unwrap();
        let err = integrate_finite(|x| x.powi(22), 0.0, 1.0, &s).unwrap_err();
        match err {
            Error::Convergence { value, .. } => assert!((value - 1.0 / 23.0).abs() < 1e-15),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn empty_interval_and_bad_bounds() {
        assert_eq!(integrate_finite(|x| x, 2.0, 2.0, &spec()).unwrap().value, 0.0);
        assert!(integrate_finite(|x| x, 1.0, 0.0, &spec()).is_err());
        assert!(integrate_finite(|x| x, 0.0, f64::INFINITY, &spec()).is_err());
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let s = QuadratureSpec::new(1e-14, 1e-14, 3).unwrap();
        let err = integrate_finite(|x: f64| x.sqrt(), 0.0, 1.0, &s).unwrap_err();
        match err {
            Error::Convergence { value, err_est, .. } => {
                assert!((value - 2.0 / 3.0).abs() < 1e-4);
                assert!(err_est > 0.0);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn integrand_errors_propagate() {
        let r = try_integrate_finite(|x| if x > 0.5 { Err(Error::domain("boom")) } else { Ok(x) }, 0.0, 1.0, &spec());
        assert!(matches!(r, Err(Error::Domain(_))));
        assert!(integrate_finite(|_| f64::NAN, 0.0, 1.0, &spec()).is_err());
    }

    #[test]
    fn breakpoints_resolve_a_narrow_feature() {
        // a bump far narrower than the first Kronrod node spacing
        let c = 1e-4;
        let w = 1e-6;
        let f = |x: f64| (-((x - c) / w).powi(2)).exp();
        let exact = w * std::f64::consts::PI.sqrt();
        let blind = integrate_finite(f, 0.0, 1.0, &spec()).unwrap();
        assert!((blind.value - exact).abs() > 0.5 * exact);
        let r = try_integrate_with_breakpoints(|x| Ok(f(x)), &[0.0, c - 20.0 * w, c + 20.0 * w, 1.0], &spec()).unwrap();
        assert!((r.value - exact).abs() < 1e-12);
        let r = try_integrate_semi_infinite_with_breakpoints(|s| Ok((-s).exp()), &[0.1, 1.0, 1.0, 7.0], &spec()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
        assert!(try_integrate_with_breakpoints(|x| Ok(x), &[1.0, 0.0], &spec()).is_err());
        assert!(try_integrate_semi_infinite_with_breakpoints(|x| Ok(x), &[-1.0], &spec()).is_err());
    }

    #[test]
    fn invalid_spec() {
        assert!(QuadratureSpec::new(0.0, 1e-8, 10).is_err());
        assert!(QuadratureSpec::new(1e-8, -1.0, 10).is_err());
        assert!(QuadratureSpec::new(1e-8, 1e-8, 0).is_err());
    }
}

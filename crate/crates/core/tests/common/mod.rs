//! Reference implementations used only by tests. None of these share code
//! with the library routines they check.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// 2/√π to 50 decimal places.
const TWO_OVER_SQRT_PI: &str = "112837916709551257389615890312154517168810125865800";

fn two_over_sqrt_pi() -> BigRational {
    BigRational::new(
        TWO_OVER_SQRT_PI.parse::<BigInt>().unwrap(),
        BigInt::from(10u32).pow(50),
    )
}

/// erf(num/den) from the Maclaurin series
/// `2/√π Σ (-1)ⁿ x^{2n+1} / (n! (2n+1))` in exact rational arithmetic,
/// summed until the next term is below 1e-40.
pub fn erf_series_rational(num: i64, den: i64) -> f64 {
    let x = BigRational::new(BigInt::from(num), BigInt::from(den));
    let x2 = &x * &x;
    let eps = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(40));
    // power = x^{2n+1} / n!
    let mut power = x.clone();
    let mut sum = BigRational::zero();
    let mut n: u64 = 0;
    loop {
        let term = &power / BigRational::from_integer(BigInt::from(2 * n + 1));
        let done = n > 10 && term.abs() < eps;
        if n % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        if done {
            break;
        }
        n += 1;
        power = power * &x2 / BigRational::from_integer(BigInt::from(n));
    }
    (sum * two_over_sqrt_pi()).to_f64().unwrap()
}

/// Composite trapezoid rule on `[0, π/2]` after `s = tan θ`; the integrand
/// must decay faster than `1/s²` so the endpoint value at `π/2` is zero.
pub fn trapezoid_semi_infinite<F: Fn(f64) -> f64>(f: F, nodes: usize) -> f64 {
    let h = std::f64::consts::FRAC_PI_2 / nodes as f64;
    let g = |theta: f64| {
        let c = theta.cos();
        f(theta.tan()) / (c * c)
    };
    let mut sum = 0.5 * g(0.0);
    for i in 1..nodes {
        sum += g(i as f64 * h);
    }
    sum * h
}

/// One-sample Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.627_6 / (n as f64).sqrt()
}

/// Upper bound on `sup_s |F(s) - F̂_n(s)|` using `F` only at `grid` order
/// statistics. Between consecutive grid points both functions are monotone,
/// so the gap is bounded by the values at the ends.
pub fn sup_distance_bound<F: FnMut(f64) -> f64>(samples: &[f64], grid: usize, mut cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    // indices i_j with ECDF(x_{i_j}) = (i_j + 1)/n
    let idx: Vec<usize> = (1..grid).map(|j| j * n / grid - 1).collect();
    let f: Vec<f64> = idx.iter().map(|&i| cdf(xs[i])).collect();
    let ecdf = |i: usize| (i + 1) as f64 / n as f64;
    let mut bound: f64 = 0.0;
    // [0, first], gaps, [last, ∞)
    bound = bound.max(ecdf(idx[0]));
    bound = bound.max(f[0]);
    for w in 0..idx.len() - 1 {
        let (a, b) = (idx[w], idx[w + 1]);
        bound = bound.max(f[w + 1] - ecdf(a));
        bound = bound.max(ecdf(b - 1) - f[w]);
    }
    let last = *idx.last().unwrap();
    bound = bound.max(1.0 - f[f.len() - 1]);
    bound = bound.max(1.0 - ecdf(last));
    bound
}

/// Two-pass sample moments: mean, variance, and the standard errors of both.
#[derive(Debug, Clone, Copy)]
pub struct SampleMoments {
    pub mean: f64,
    pub var: f64,
    pub se_mean: f64,
    pub se_var: f64,
}

pub fn sample_moments(xs: &[f64]) -> SampleMoments {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &x in xs {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    let var = m2 / (n - 1.0);
    let mu4 = m4 / n;
    let mu2 = m2 / n;
    SampleMoments {
        mean,
        var,
        se_mean: (var / n).sqrt(),
        se_var: ((mu4 - mu2 * mu2) / n).sqrt(),
    }
}

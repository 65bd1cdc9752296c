//! Moments of the cascaded Rayleigh-product channel
//! `S = Σ_m |f_m||g_m|`, `χ = S²`, and the two-moment Gamma fit of `χ`.
//!
//! `|f_m|` and `|g_m|` are Rayleigh with unit mean square, so the per-element
//! product `|f||g|` has raw moments `E[(|f||g|)^n] = Γ(1 + n/2)²`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::{ln_gamma, reg_lower_gamma};

/// Raw moments of one element product `|f||g|`, orders 1..=4.
pub const PRODUCT_MOMENTS: [f64; 4] = [PI / 4.0, 1.0, 9.0 * PI / 16.0, 4.0];

/// How `E[S⁴]` (and with it `V[χ]`) is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FourthMomentMode {
    /// Exact expansion for i.i.d. element products.
    #[default]
    Exact,
    /// `μ⁴ + 6μ²v + 3v²`, the fourth moment of a Gaussian with the same mean
    /// and variance as `S`.
    GaussianSurrogate,
    /// `μ⁴ + μ²v + v²`. Always gives `V[χ] = -μ²v < 0`; kept for diagnostics.
    PaperLiteral,
}

impl FourthMomentMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            FourthMomentMode::Exact => "exact",
            FourthMomentMode::GaussianSurrogate => "gaussian_surrogate",
            FourthMomentMode::PaperLiteral => "paper_literal",
        }
    }
}

impl fmt::Display for FourthMomentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FourthMomentMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(FourthMomentMode::Exact),
            "gaussian_surrogate" => Ok(FourthMomentMode::GaussianSurrogate),
            "paper_literal" => Ok(FourthMomentMode::PaperLiteral),
            other => Err(Error::domain(format!(
                "unknown fourth-moment mode `{other}` (expected exact, gaussian_surrogate or paper_literal)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeMoments {
    pub elements: u32,
    pub mean_sum: f64,
    pub var_sum: f64,
    pub mean_chi: f64,
    pub var_chi: f64,
    pub mode: FourthMomentMode,
}

/// `E[S⁴]` for `M` i.i.d. terms with raw moments `m1..m4`.
fn iid_fourth_moment(m: f64) -> f64 {
    let [m1, m2, m3, m4] = PRODUCT_MOMENTS;
    m * m4
        + 4.0 * m * (m - 1.0) * m3 * m1
        + 3.0 * m * (m - 1.0) * m2 * m2
        + 6.0 * m * (m - 1.0) * (m - 2.0) * m2 * m1 * m1
        + m * (m - 1.0) * (m - 2.0) * (m - 3.0) * m1.powi(4)
}

/// Moments of `S` and `χ` for `elements` RIS elements.
///
/// `PaperLiteral` returns [`Error::NegativeVariance`] carrying the (negative)
/// variance it produces.
pub fn cascade_moments(elements: u32, mode: FourthMomentMode) -> Result<CascadeMoments> {
    if elements < 1 {
        return Err(Error::domain("element count M must be >= 1"));
    }
    let m = f64::from(elements);
    let mu = m * PI / 4.0;
    let v = m * (1.0 - PI * PI / 16.0);
    let mean_chi = mu * mu + v;
    let fourth = match mode {
        FourthMomentMode::Exact => iid_fourth_moment(m),
        FourthMomentMode::GaussianSurrogate => mu.powi(4) + 6.0 * mu * mu * v + 3.0 * v * v,
        FourthMomentMode::PaperLiteral => mu.powi(4) + mu * mu * v + v * v,
    };
    let var_chi = fourth - mean_chi * mean_chi;
    if !(var_chi > 0.0) {
        return Err(Error::NegativeVariance {
            mode: mode.as_str(),
            elements,
            var_chi,
        });
    }
    Ok(CascadeMoments {
        elements,
        mean_sum: mu,
        var_sum: v,
        mean_chi,
        var_chi,
        mode,
    })
}

/// Gamma distribution with shape `k` and scale `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFit {
    pub k: f64,
    pub omega: f64,
}

impl GammaFit {
    pub fn from_mean_var(mean: f64, var: f64) -> Result<Self> {
        if !(var > 0.0) || !var.is_finite() {
            return Err(Error::Fit { var_chi: var });
        }
        if !(mean > 0.0) || !mean.is_finite() {
            return Err(Error::domain(format!("Gamma fit needs a positive mean, got {mean}")));
        }
        Ok(Self {
            k: mean * mean / var,
            omega: var / mean,
        })
    }

    pub fn mean(&self) -> f64 {
        self.k * self.omega
    }

    pub fn variance(&self) -> f64 {
        self.k * self.omega * self.omega
    }

    pub fn cdf(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::domain(format!("chi CDF: argument must be >= 0, got {s}")));
        }
        reg_lower_gamma(self.k, s / self.omega)
    }

    pub fn pdf(&self, s: f64) -> f64 {
        if s < 0.0 {
            return 0.0;
        }
        if s == 0.0 {
            return if self.k < 1.0 {
                f64::INFINITY
            } else if self.k == 1.0 {
                1.0 / self.omega
            } else {
                0.0
            };
        }
        let z = s / self.omega;
        ((self.k - 1.0) * z.ln() - z - ln_gamma(self.k)).exp() / self.omega
    }
}

/// Moment-matched Gamma fit: `k = E[χ]²/V[χ]`, `ω = V[χ]/E[χ]`.
pub fn fit_gamma(m: &CascadeMoments) -> Result<GammaFit> {
    GammaFit::from_mean_var(m.mean_chi, m.var_chi)
}

/// Approximate CDF of `χ` under the fitted Gamma law.
pub fn chi_cdf(fit: &GammaFit, s: f64) -> Result<f64> {
    fit.cdf(s)
}

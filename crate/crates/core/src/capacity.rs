//! SNR distribution and ergodic capacity of the active-RIS link.
//!
//! The instantaneous SNR is `γ = ρ_s h_L² β² x² χ` with
//! `ρ_s = P_s / (β² σ_r² + σ_u²)`, `x` the misalignment fraction and `χ` the
//! cascaded fading power, approximated by the fitted Gamma law.

use std::cell::Cell;
use std::f64::consts::LN_2;

use log::warn;

use crate::cascade_stats::{cascade_moments, fit_gamma, CascadeMoments, FourthMomentMode, GammaFit};
use crate::channel::{path_gain, AbsorptionSpec, LinkGeometry, MisalignmentParams};
use crate::error::{Error, Result};
use crate::numerics::{
    reg_lower_gamma, try_integrate_semi_infinite_with_breakpoints, try_integrate_with_breakpoints, QuadResult, QuadratureSpec,
};

/// Active RIS and transmitter parameters. Powers are in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveRisParams {
    pub elements: u32,
    /// Per-element amplification factor.
    pub beta: f64,
    pub tx_power_w: f64,
    /// Thermal-noise power at the RIS amplifiers; zero models a passive RIS.
    pub noise_ris_w: f64,
    pub noise_user_w: f64,
}

impl ActiveRisParams {
    pub fn new(elements: u32, beta: f64, tx_power_w: f64, noise_ris_w: f64, noise_user_w: f64) -> Result<Self> {
        let p = Self {
            elements,
            beta,
            tx_power_w,
            noise_ris_w,
            noise_user_w,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.elements < 1 {
            return Err(Error::domain("element count M must be >= 1"));
        }
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(Error::domain(format!("amplification beta must be >= 0, got {}", self.beta)));
        }
        if !(self.tx_power_w > 0.0) || !self.tx_power_w.is_finite() {
            return Err(Error::domain(format!("transmit power must be positive, got {}", self.tx_power_w)));
        }
        if !(self.noise_user_w > 0.0) || !self.noise_user_w.is_finite() {
            return Err(Error::domain(format!("user noise power must be positive, got {}", self.noise_user_w)));
        }
        if !(self.noise_ris_w >= 0.0) || !self.noise_ris_w.is_finite() {
            return Err(Error::domain(format!("RIS noise power must be >= 0, got {}", self.noise_ris_w)));
        }
        if self.beta < 1.0 {
            warn!("beta = {} < 1: the RIS attenuates rather than amplifies", self.beta);
        }
        Ok(())
    }

    /// `ρ_s = P_s / (β² σ_r² + σ_u²)`.
    pub fn snr_scale(&self) -> f64 {
        self.tx_power_w / (self.beta * self.beta * self.noise_ris_w + self.noise_user_w)
    }

    /// Limit of `ρ_s β²` as `β → ∞`, i.e. `P_s / σ_r²`. `None` for a
    /// noiseless (passive) RIS, where the product grows without bound.
    pub fn saturated_snr_scale(&self) -> Option<f64> {
        (self.noise_ris_w > 0.0).then(|| self.tx_power_w / self.noise_ris_w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityResult {
    pub capacity_bits: f64,
    /// Error estimate of the outer (capacity) integral, in bits/s/Hz.
    pub quad_err: f64,
    /// Largest error estimate among the inner CDF integrals (a probability).
    pub inner_quad_err: f64,
}

/// Complete analytical model of the link. Immutable; derived quantities are
/// computed once in [`LinkModel::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct LinkModel {
    geometry: LinkGeometry,
    absorption: AbsorptionSpec,
    misalign: MisalignmentParams,
    ris: ActiveRisParams,
    moments: CascadeMoments,
    fit: GammaFit,
    path_gain: f64,
}

impl LinkModel {
    pub fn new(
        geometry: LinkGeometry,
        absorption: AbsorptionSpec,
        misalign: MisalignmentParams,
        ris: ActiveRisParams,
        mode: FourthMomentMode,
    ) -> Result<Self> {
        geometry.validate()?;
        ris.validate()?;
        let path_gain = path_gain(&geometry, &absorption)?;
        let moments = cascade_moments(ris.elements, mode)?;
        let fit = fit_gamma(&moments)?;
        Ok(Self {
            geometry,
            absorption,
            misalign,
            ris,
            moments,
            fit,
            path_gain,
        })
    }

    pub fn geometry(&self) -> &LinkGeometry {
        &self.geometry
    }

    pub fn absorption(&self) -> &AbsorptionSpec {
        &self.absorption
    }

    pub fn misalignment(&self) -> &MisalignmentParams {
        &self.misalign
    }

    pub fn ris(&self) -> &ActiveRisParams {
        &self.ris
    }

    pub fn moments(&self) -> &CascadeMoments {
        &self.moments
    }

    pub fn fit(&self) -> &GammaFit {
        &self.fit
    }

    /// Composite amplitude path gain `h_L`.
    pub fn path_gain(&self) -> f64 {
        self.path_gain
    }

    /// Deterministic SNR multiplier `ρ_s h_L² β²`.
    pub fn snr_gain(&self) -> f64 {
        let beta = self.ris.beta;
        self.ris.snr_scale() * self.path_gain * self.path_gain * beta * beta
    }

    /// `ρ_s β²` replaced by its `β → ∞` limit `P_s/σ_r²`.
    pub fn saturated_snr_gain(&self) -> Option<f64> {
        self.ris
            .saturated_snr_scale()
            .map(|s| s * self.path_gain * self.path_gain)
    }

    /// Mean SNR under the fitted model, `gain · E[x²] · E[χ]`.
    pub fn mean_snr(&self) -> f64 {
        self.snr_gain() * self.misalign.second_moment() * self.fit.mean()
    }

    /// SNR for a given misalignment fraction `x` and cascade power `chi`.
    pub fn snr_realization(&self, x: f64, chi: f64) -> f64 {
        self.snr_gain() * x * x * chi
    }

    /// `P(γ ≤ s | x)`.
    pub fn snr_cdf_conditional(&self, s: f64, x: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::domain(format!("SNR CDF: s must be >= 0, got {s}")));
        }
        if !(x >= 0.0 && x <= self.misalign.phi) {
            return Err(Error::domain(format!(
                "SNR CDF: misalignment x must lie in [0, {}], got {x}",
                self.misalign.phi
            )));
        }
        conditional_cdf(&self.fit, self.snr_gain(), s, x)
    }

    /// Unconditional `P(γ ≤ s)`, averaging the conditional CDF over the
    /// misalignment law.
    pub fn snr_cdf(&self, s: f64, spec: &QuadratureSpec) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::domain(format!("SNR CDF: s must be >= 0, got {s}")));
        }
        Ok(mixture(&self.fit, &self.misalign, self.snr_gain(), s, spec, Tail::Lower)?.value)
    }

    /// Ergodic capacity in bits/s/Hz.
    pub fn ergodic_capacity(&self, spec: &QuadratureSpec) -> Result<CapacityResult> {
        self.capacity_for_gain(self.snr_gain(), spec)
    }

    /// Capacity in the `β → ∞` limit; `None` when `σ_r² = 0`.
    pub fn saturated_capacity(&self, spec: &QuadratureSpec) -> Result<Option<CapacityResult>> {
        self.saturated_snr_gain()
            .map(|g| self.capacity_for_gain(g, spec))
            .transpose()
    }

    fn capacity_for_gain(&self, gain: f64, spec: &QuadratureSpec) -> Result<CapacityResult> {
        let scale = gain * self.misalign.second_moment() * self.fit.mean();
        if scale == 0.0 {
            return Ok(CapacityResult {
                capacity_bits: 0.0,
                quad_err: 0.0,
                inner_quad_err: 0.0,
            });
        }
        let inner_err = Cell::new(0.0f64);
        let outer = capacity_from_ccdf(
            |s| {
                let r = mixture(&self.fit, &self.misalign, gain, s, spec, Tail::Upper)?;
                inner_err.set(inner_err.get().max(r.err_est));
                Ok(r.value)
            },
            scale,
            spec,
        )?;
        Ok(CapacityResult {
            capacity_bits: outer.value.max(0.0),
            quad_err: outer.err_est,
            inner_quad_err: inner_err.get(),
        })
    }
}

/// `(1/ln 2) ∫₀^∞ (1 - F(s))/(1 + s) ds` for a complementary CDF `ccdf`.
///
/// The integration variable is normalised by `scale` (a typical SNR, e.g.
/// the mean) so the integrand is O(1) wherever `1 - F` is non-negligible;
/// otherwise absolute tolerances swamp links whose SNR is many orders of
/// magnitude below one.
pub fn capacity_from_ccdf<F>(mut ccdf: F, scale: f64, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::domain(format!("capacity scale must be positive, got {scale}")));
    }
    let factor = scale / LN_2;
    // the weight 1/(1+s) bends at s = 1, far left of the mean when scale is large
    let mut knees = vec![1.0];
    let mut tau = 1.0 / scale;
    while tau < 1.0 {
        knees.push(tau);
        tau *= BREAK_RATIO;
    }
    let r = try_integrate_semi_infinite_with_breakpoints(
        |tau| {
            let s = scale * tau;
            Ok(ccdf(s)? / (1.0 + s))
        },
        &knees,
        spec,
    )
    .map_err(|e| match e {
        Error::Convergence { what, value, err_est } => Error::Convergence {
            what,
            value: value * factor,
            err_est: err_est * factor,
        },
        other => other,
    })?;
    Ok(QuadResult {
        value: r.value * factor,
        err_est: r.err_est * factor,
        intervals: r.intervals,
    })
}

const BREAK_RATIO: f64 = 4.0;
const BREAK_SPAN: i32 = 10;

fn conditional_cdf(fit: &GammaFit, gain: f64, s: f64, x: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    let denom = gain * x * x * fit.omega;
    if denom == 0.0 {
        // γ ≡ 0
        return Ok(1.0);
    }
    reg_lower_gamma(fit.k, s / denom)
}

#[derive(Clone, Copy)]
enum Tail {
    Lower,
    Upper,
}

// ∫₀¹ F(s | φ u^{1/ζ}) du: the substitution u = (x/φ)^ζ absorbs the
// misalignment density, including its x^{ζ-1} endpoint singularity.
fn mixture(
    fit: &GammaFit,
    misalign: &MisalignmentParams,
    gain: f64,
    s: f64,
    spec: &QuadratureSpec,
    tail: Tail,
) -> Result<QuadResult> {
    let exact = |v: f64| QuadResult {
        value: v,
        err_est: 0.0,
        intervals: 0,
    };
    if s == 0.0 {
        return Ok(exact(match tail {
            Tail::Lower => 0.0,
            Tail::Upper => 1.0,
        }));
    }
    let peak = gain * misalign.phi * misalign.phi * fit.omega;
    if peak == 0.0 {
        return Ok(exact(match tail {
            Tail::Lower => 1.0,
            Tail::Upper => 0.0,
        }));
    }
    let z_peak = s / peak;
    let exponent = 2.0 / misalign.zeta;
    // the integrand switches between 0 and 1 near z = k
    let centre = (z_peak / fit.k).powf(0.5 * misalign.zeta);
    let mut points = vec![0.0];
    points.extend(
        (-BREAK_SPAN..=BREAK_SPAN)
            .map(|j| centre * BREAK_RATIO.powi(j))
            .filter(|&u| u > 0.0 && u < 1.0),
    );
    points.push(1.0);
    try_integrate_with_breakpoints(
        |u| {
            let p = reg_lower_gamma(fit.k, z_peak / u.powf(exponent))?;
            Ok(match tail {
                Tail::Lower => p,
                Tail::Upper => 1.0 - p,
            })
        },
        &points,
        spec,
    )
}

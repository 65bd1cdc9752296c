//! Deterministic THz link gains and the pointing-error (beam misalignment)
//! distribution.
//!
//! All gains here are amplitude gains; the SNR uses their squares.

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};
use crate::numerics::erf;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Nominal THz band edges in Hz. Frequencies outside only produce a warning.
pub const THZ_BAND: (f64, f64) = (0.1e12, 10e12);

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Antenna gains (linear), carrier frequency and the two hop distances of the
/// BS → RIS → user link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub gain_a: f64,
    pub gain_b: f64,
    pub freq_hz: f64,
    pub d_a: f64,
    pub d_b: f64,
}

impl LinkGeometry {
    pub fn new(gain_a: f64, gain_b: f64, freq_hz: f64, d_a: f64, d_b: f64) -> Result<Self> {
        let geom = Self {
            gain_a,
            gain_b,
            freq_hz,
            d_a,
            d_b,
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("antenna gain G_a", self.gain_a)?;
        require_positive("antenna gain G_b", self.gain_b)?;
        require_positive("carrier frequency", self.freq_hz)?;
        require_positive("BS-RIS distance d_a", self.d_a)?;
        require_positive("RIS-user distance d_b", self.d_b)?;
        if self.freq_hz < THZ_BAND.0 || self.freq_hz > THZ_BAND.1 {
            warn!(
                "carrier frequency {:e} Hz is outside the THz band [{:e}, {:e}] Hz",
                self.freq_hz, THZ_BAND.0, THZ_BAND.1
            );
        }
        Ok(())
    }
}

/// Piecewise-linear frequency → absorption-coefficient table.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionTable {
    points: Vec<(f64, f64)>,
}

impl AbsorptionTable {
    pub const HEADER: [&'static str; 2] = ["frequency_hz", "kappa_per_m"];

    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::domain("absorption table needs at least two rows"));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::domain(format!(
                    "absorption table frequencies must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        for &(f, k) in &points {
            if !f.is_finite() || !(k >= 0.0) || !k.is_finite() {
                return Err(Error::domain(format!("invalid absorption table row ({f}, {k})")));
            }
        }
        Ok(Self { points })
    }

    /// Reads a `frequency_hz,kappa_per_m` CSV; the header row is required.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != Self::HEADER {
            return Err(Error::domain(format!(
                "absorption table header must be `{}`, got `{}`",
                Self::HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |j: usize| -> Result<f64> {
                rec.get(j)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::domain(format!("absorption table row {}: bad field {}", i + 2, j + 1)))
            };
            points.push((parse(0)?, parse(1)?));
        }
        Self::new(points)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Interpolated κ at `f`; frequencies outside the table are rejected.
    pub fn kappa_at(&self, f: f64) -> Result<f64> {
        let (lo, hi) = (self.points[0].0, self.points[self.points.len() - 1].0);
        if !(f >= lo && f <= hi) {
            return Err(Error::domain(format!(
                "frequency {f:e} Hz outside absorption table range [{lo:e}, {hi:e}]"
            )));
        }
        let idx = self.points.partition_point(|&(x, _)| x <= f);
        if idx >= self.points.len() {
            return Ok(self.points[self.points.len() - 1].1);
        }
        let (f0, k0) = self.points[idx - 1];
        let (f1, k1) = self.points[idx];
        Ok(k0 + (k1 - k0) * (f - f0) / (f1 - f0))
    }
}

/// Molecular absorption coefficient κ (1/m), either a constant or a table
/// lookup keyed by carrier frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionSpec {
    pub kappa: f64,
    pub table: Option<AbsorptionTable>,
}

impl AbsorptionSpec {
    pub fn constant(kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::domain(format!("absorption coefficient must be >= 0, got {kappa}")));
        }
        Ok(Self { kappa, table: None })
    }

    pub fn with_table(table: AbsorptionTable) -> Self {
        Self { kappa: 0.0, table: Some(table) }
    }

    pub fn kappa_at(&self, f: f64) -> Result<f64> {
        match &self.table {
            Some(t) => t.kappa_at(f),
            None => Ok(self.kappa),
        }
    }
}

/// Free-space amplitude gain `c² √(G_a G_b) / ((4π f)² d_a d_b)`.
pub fn propagation_gain(geom: &LinkGeometry) -> f64 {
    let four_pi_f = 4.0 * PI * geom.freq_hz;
    SPEED_OF_LIGHT * SPEED_OF_LIGHT * (geom.gain_a * geom.gain_b).sqrt() / (four_pi_f * four_pi_f * geom.d_a * geom.d_b)
}

/// Molecular-absorption amplitude gain `exp(-κ(f) (d_a + d_b) / 2)`.
pub fn absorption_gain(spec: &AbsorptionSpec, freq_hz: f64, d_a: f64, d_b: f64) -> Result<f64> {
    require_positive("d_a", d_a)?;
    require_positive("d_b", d_b)?;
    let kappa = spec.kappa_at(freq_hz)?;
    Ok((-kappa * (d_a + d_b) / 2.0).exp())
}

/// Composite path gain `h_L = h_P · h_A`.
pub fn path_gain(geom: &LinkGeometry, spec: &AbsorptionSpec) -> Result<f64> {
    Ok(propagation_gain(geom) * absorption_gain(spec, geom.freq_hz, geom.d_a, geom.d_b)?)
}

/// Pointing-error distribution with density `ζ φ^{-ζ} x^{ζ-1}` on `[0, φ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MisalignmentParams {
    /// Fraction of power captured under perfect alignment.
    pub phi: f64,
    pub zeta: f64,
}

impl MisalignmentParams {
    pub fn new(phi: f64, zeta: f64) -> Result<Self> {
        if !(phi > 0.0 && phi <= 1.0) {
            return Err(Error::domain(format!("misalignment phi must lie in (0, 1], got {phi}")));
        }
        if !(zeta > 0.0) || !zeta.is_finite() {
            return Err(Error::domain(format!("misalignment zeta must be positive, got {zeta}")));
        }
        Ok(Self { phi, zeta })
    }

    /// Builds the parameters from the receiver radius `r`, beam footprint
    /// `u`, beam-width `v` and jitter variance `sigma2`:
    /// `φ = erf(√(π/2) r/u)²`, `ζ = v²/(4σ²)`.
    ///
    /// `v` and `sigma2` are taken in whatever consistent units the caller
    /// uses; only their ratio enters.
    pub fn from_physical(r: f64, u: f64, v: f64, sigma2: f64) -> Result<Self> {
        require_positive("receiver radius r", r)?;
        require_positive("beam footprint u", u)?;
        require_positive("beam-width v", v)?;
        require_positive("misalignment variance sigma2", sigma2)?;
        let s = (PI / 2.0).sqrt() * r / u;
        let e = erf(s)?;
        Self::new(e * e, v * v / (4.0 * sigma2))
    }

    /// Same as [`from_physical`](Self::from_physical) with `s` given directly.
    pub fn from_normalized_radius(s: f64, zeta: f64) -> Result<Self> {
        require_positive("normalized radius s", s)?;
        let e = erf(s)?;
        Self::new(e * e, zeta)
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        let (phi, zeta) = (self.phi, self.zeta);
        if x.is_nan() {
            return Err(Error::domain("misalignment pdf: NaN argument"));
        }
        if x < 0.0 || x > phi {
            return Ok(0.0);
        }
        if x == 0.0 {
            return match zeta.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Greater) => Ok(0.0),
                Some(std::cmp::Ordering::Equal) => Ok(1.0 / phi),
                _ => Err(Error::domain(format!(
                    "misalignment pdf is singular at x = 0 for zeta = {zeta} < 1"
                ))),
            };
        }
        Ok(zeta * phi.powf(-zeta) * x.powf(zeta - 1.0))
    }

    /// `(x/φ)^ζ` clamped to `[0, 1]`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= self.phi {
            1.0
        } else {
            (x / self.phi).powf(self.zeta)
        }
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::domain(format!("misalignment quantile: q must lie in [0, 1], got {q}")));
        }
        Ok(self.phi * q.powf(1.0 / self.zeta))
    }

    pub fn mean(&self) -> f64 {
        self.zeta * self.phi / (self.zeta + 1.0)
    }

    /// `E[x²] = ζ φ² / (ζ + 2)`.
    pub fn second_moment(&self) -> f64 {
        self.zeta * self.phi * self.phi / (self.zeta + 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_finite, QuadratureSpec};

    fn default_geom() -> LinkGeometry {
        LinkGeometry::new(1e3, 1e3, 0.3e12, 15.0, 15.0).unwrap()
    }

    #[test]
    fn unit_propagation_gain() {
        let g = LinkGeometry::new(1.0, 1.0, SPEED_OF_LIGHT / (4.0 * PI), 1.0, 1.0).unwrap();
        assert!((propagation_gain(&g) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn propagation_gain_default_geometry() {
        // (c / (4π · 0.3e12))² · 1e3 / 225, evaluated with 50-digit arithmetic
        let expect = 2.810_584_522_046_148_4e-8;
        assert!((propagation_gain(&default_geom()) / expect - 1.0).abs() < 1e-14);
        assert!((propagation_gain(&default_geom()) - 2.81e-8).abs() < 1e-10);
    }

    #[test]
    fn propagation_gain_inverse_in_distance() {
        let g = default_geom();
        let g2 = LinkGeometry { d_a: 30.0, ..g };
        assert!((propagation_gain(&g2) / propagation_gain(&g) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn absorption_examples() {
        let none = AbsorptionSpec::constant(0.0).unwrap();
        assert_eq!(absorption_gain(&none, 0.3e12, 10.0, 10.0).unwrap(), 1.0);
        let k = AbsorptionSpec::constant(0.1).unwrap();
        assert!((absorption_gain(&k, 0.3e12, 12.0, 8.0).unwrap() - 0.367_879_441_171_442_3).abs() < 1e-15);
        let k = AbsorptionSpec::constant(0.2).unwrap();
        assert!((absorption_gain(&k, 0.3e12, 5.0, 5.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!(AbsorptionSpec::constant(-0.1).is_err());
    }

    #[test]
    fn path_gain_composition() {
        let g = default_geom();
        let none = AbsorptionSpec::constant(0.0).unwrap();
        assert_eq!(path_gain(&g, &none).unwrap(), propagation_gain(&g));
        let k = AbsorptionSpec::constant(0.05).unwrap();
        let hl = path_gain(&g, &k).unwrap();
        assert!((hl - propagation_gain(&g) * (-0.75f64).exp()).abs() < 1e-22);
        assert!(hl <= propagation_gain(&g));
    }

    #[test]
    fn path_gain_monotone_grid() {
        let base = default_geom();
        let k = |kappa| AbsorptionSpec::constant(kappa).unwrap();
        let vals = [1.0, 1.5, 2.0, 4.0];
        let series = |mk: &dyn Fn(f64) -> f64| vals.iter().map(|&v| mk(v)).collect::<Vec<_>>();
        let checks: Vec<Vec<f64>> = vec![
            series(&|v| path_gain(&LinkGeometry { freq_hz: 0.3e12 * v, ..base }, &k(0.05)).unwrap()),
            series(&|v| path_gain(&LinkGeometry { d_a: 15.0 * v, ..base }, &k(0.05)).unwrap()),
            series(&|v| path_gain(&LinkGeometry { d_b: 15.0 * v, ..base }, &k(0.05)).unwrap()),
            series(&|v| path_gain(&base, &k(0.05 * v)).unwrap()),
        ];
        for s in checks {
            assert!(s.windows(2).all(|w| w[1] < w[0]), "{s:?}");
        }
    }

    #[test]
    fn table_lookup() {
        let t = AbsorptionTable::new(vec![(1e11, 0.0), (3e11, 0.2), (5e11, 0.1)]).unwrap();
        assert!((t.kappa_at(2e11).unwrap() - 0.1).abs() < 1e-15);
        assert!((t.kappa_at(3e11).unwrap() - 0.2).abs() < 1e-15);
        assert!((t.kappa_at(5e11).unwrap() - 0.1).abs() < 1e-15);
        assert!((t.kappa_at(4e11).unwrap() - 0.15).abs() < 1e-15);
        assert!(t.kappa_at(6e11).is_err());
        assert!(t.kappa_at(0.5e11).is_err());
        let spec = AbsorptionSpec::with_table(t);
        assert!(absorption_gain(&spec, 6e11, 1.0, 1.0).is_err());
    }

    #[test]
    fn table_validation_and_csv() {
        assert!(AbsorptionTable::new(vec![(1.0, 0.1), (1.0, 0.2)]).is_err());
        assert!(AbsorptionTable::new(vec![(1.0, 0.1)]).is_err());
        assert!(AbsorptionTable::new(vec![(1.0, -0.1), (2.0, 0.2)]).is_err());
        let t = AbsorptionTable::from_reader("frequency_hz,kappa_per_m\n1e11,0.01\n2e11,0.03\n".as_bytes()).unwrap();
        assert_eq!(t.points(), &[(1e11, 0.01), (2e11, 0.03)]);
        assert!(AbsorptionTable::from_reader("f,k\n1e11,0.01\n2e11,0.03\n".as_bytes()).is_err());
        assert!(AbsorptionTable::from_reader("frequency_hz,kappa_per_m\n1e11,x\n2e11,0.03\n".as_bytes()).is_err());
    }

    #[test]
    fn misalignment_from_physical_examples() {
        // s = √(π/2) r/u = 0.3
        let u = 1.0;
        let r = 0.3 / (PI / 2.0).sqrt();
        let p = MisalignmentParams::from_physical(r, u, 2.0, 1.0).unwrap();
        // erf(0.3)² from mpmath
        assert!((p.phi - 0.107_995_547_032_607_2).abs() < 1e-15);
        assert!((p.zeta - 1.0).abs() < 1e-15);
        let wide = MisalignmentParams::from_physical(100.0, 1.0, 1.0, 1.0).unwrap();
        assert!((wide.phi - 1.0).abs() < 1e-15);
        assert!(MisalignmentParams::from_physical(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(MisalignmentParams::from_physical(1.0, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn misalignment_pdf_cases() {
        let uni = MisalignmentParams::new(0.4, 1.0).unwrap();
        for &x in &[0.0, 0.1, 0.4] {
            assert!((uni.pdf(x).unwrap() - 2.5).abs() < 1e-15);
        }
        assert_eq!(uni.pdf(0.41).unwrap(), 0.0);
        assert_eq!(uni.pdf(-0.1).unwrap(), 0.0);
        let steep = MisalignmentParams::new(0.5, 2.0).unwrap();
        assert_eq!(steep.pdf(0.0).unwrap(), 0.0);
        let singular = MisalignmentParams::new(0.108, 0.6).unwrap();
        assert!(singular.pdf(0.0).is_err());
        assert!(singular.pdf(1e-9).unwrap().is_finite());
    }

    #[test]
    fn misalignment_pdf_normalized() {
        let spec = QuadratureSpec::new(1e-12, 1e-12, 200).unwrap();
        for &(phi, zeta) in &[(0.108, 0.6), (0.5, 2.0)] {
            let p = MisalignmentParams::new(phi, zeta).unwrap();
            let r = integrate_finite(|x| p.pdf(x).unwrap(), 0.0, phi, &spec).unwrap();
            assert!((r.value - 1.0).abs() < 1e-9, "{phi} {zeta}: {}", r.value);
        }
    }

    #[test]
    fn misalignment_quantile_cases() {
        let p = MisalignmentParams::new(0.4, 1.0).unwrap();
        assert_eq!(p.quantile(1.0).unwrap(), 0.4);
        assert_eq!(p.quantile(0.0).unwrap(), 0.0);
        assert!((p.quantile(0.25).unwrap() - 0.1).abs() < 1e-15);
        assert!(p.quantile(1.1).is_err());
        assert!(p.quantile(-0.1).is_err());
        let q = MisalignmentParams::new(0.108, 0.6).unwrap();
        for i in 0..=20 {
            let u = i as f64 / 20.0;
            assert!((q.cdf(q.quantile(u).unwrap()) - u).abs() < 1e-14);
        }
    }

    #[test]
    fn misalignment_param_validation() {
        assert!(MisalignmentParams::new(0.0, 1.0).is_err());
        assert!(MisalignmentParams::new(1.2, 1.0).is_err());
        assert!(MisalignmentParams::new(0.5, 0.0).is_err());
        assert!(MisalignmentParams::new(1.0, 1.0).is_ok());
    }
}

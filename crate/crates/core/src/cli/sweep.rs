use std::fmt;
use std::str::FromStr;

use crate::channel::{dbm_to_watts, AbsorptionSpec, MisalignmentParams};
use crate::error::{Error, Result};

use super::config::ScenarioConfig;

/// Scenario parameter that a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Elements,
    Beta,
    TxPowerDbm,
    FreqHz,
    DistA,
    DistB,
    Kappa,
    Phi,
    Zeta,
}

impl SweepParam {
    pub const ALL: [SweepParam; 9] = [
        SweepParam::Elements,
        SweepParam::Beta,
        SweepParam::TxPowerDbm,
        SweepParam::FreqHz,
        SweepParam::DistA,
        SweepParam::DistB,
        SweepParam::Kappa,
        SweepParam::Phi,
        SweepParam::Zeta,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::Elements => "M",
            SweepParam::Beta => "beta",
            SweepParam::TxPowerDbm => "P_s_dBm",
            SweepParam::FreqHz => "f_Hz",
            SweepParam::DistA => "d_a",
            SweepParam::DistB => "d_b",
            SweepParam::Kappa => "kappa",
            SweepParam::Phi => "phi",
            SweepParam::Zeta => "zeta",
        }
    }

    fn check(&self, v: f64) -> Result<()> {
        let ok = v.is_finite()
            && match self {
                SweepParam::Elements => v >= 1.0 && v.fract() == 0.0 && v <= f64::from(u32::MAX),
                SweepParam::TxPowerDbm => true,
                SweepParam::Beta | SweepParam::Kappa => v >= 0.0,
                SweepParam::Phi => v > 0.0 && v <= 1.0,
                _ => v > 0.0,
            };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("{v} is not a valid value for sweep parameter `{}`", self.name())))
        }
    }

    /// `base` with this parameter set to `value`.
    pub fn apply(&self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        self.check(value)?;
        let mut c = base.clone();
        match self {
            SweepParam::Elements => c.ris.elements = value as u32,
            SweepParam::Beta => c.ris.beta = value,
            SweepParam::TxPowerDbm => c.ris.tx_power_w = dbm_to_watts(value),
            SweepParam::FreqHz => c.geometry.freq_hz = value,
            SweepParam::DistA => c.geometry.d_a = value,
            SweepParam::DistB => c.geometry.d_b = value,
            SweepParam::Kappa => {
                c.absorption = AbsorptionSpec::constant(value)?;
                c.absorption_table_path = None;
            }
            SweepParam::Phi => c.misalign = MisalignmentParams::new(value, c.misalign.zeta)?,
            SweepParam::Zeta => c.misalign = MisalignmentParams::new(c.misalign.phi, value)?,
        }
        Ok(c)
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepParam::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<_> = SweepParam::ALL.iter().map(|p| p.name()).collect();
            Error::domain(format!("unknown sweep parameter `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl SweepSpec {
    pub fn new(param: SweepParam, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("sweep needs at least one value"));
        }
        for &v in &values {
            param.check(v)?;
        }
        Ok(Self { param, values })
    }

    /// `count` points from `start` to `stop` inclusive, linearly or
    /// geometrically spaced. `M` grids are rounded to integers.
    pub fn from_range(param: SweepParam, start: f64, stop: f64, count: usize, log: bool) -> Result<Self> {
        if count == 0 {
            return Err(Error::domain("sweep range needs count >= 1"));
        }
        if log && !(start > 0.0 && stop > 0.0) {
            return Err(Error::domain("log sweep needs positive start and stop"));
        }
        let values = (0..count)
            .map(|i| {
                let t = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
                let v = if i + 1 == count && count > 1 {
                    stop
                } else if log {
                    (start.ln() + t * (stop.ln() - start.ln())).exp()
                } else {
                    start + t * (stop - start)
                };
                if param == SweepParam::Elements {
                    v.round()
                } else {
                    v
                }
            })
            .collect();
        Self::new(param, values)
    }
}

/// Parses `a,b,c` into numbers.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::domain(format!("cannot parse `{}` as a number", t.trim())))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_and_log_grids() {
        let s = SweepSpec::from_range(SweepParam::Beta, 1.0, 3.0, 5, false).unwrap();
        assert_eq!(s.values, vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        let s = SweepSpec::from_range(SweepParam::Beta, 1.0, 1000.0, 4, true).unwrap();
        for (v, e) in s.values.iter().zip([1.0, 10.0, 100.0, 1000.0]) {
            assert!((v / e - 1.0).abs() < 1e-12);
        }
        let s = SweepSpec::from_range(SweepParam::Elements, 1.0, 100.0, 3, true).unwrap();
        assert_eq!(s.values, vec![1.0, 10.0, 100.0]);
        let s = SweepSpec::from_range(SweepParam::Zeta, 0.5, 2.0, 1, false).unwrap();
        assert_eq!(s.values, vec![0.5]);
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(SweepSpec::new(SweepParam::Elements, vec![2.5]).is_err());
        assert!(SweepSpec::new(SweepParam::Elements, vec![0.0]).is_err());
        assert!(SweepSpec::new(SweepParam::Phi, vec![1.2]).is_err());
        assert!(SweepSpec::new(SweepParam::Beta, vec![]).is_err());
        assert!(SweepSpec::new(SweepParam::DistA, vec![-1.0]).is_err());
        assert!(SweepSpec::new(SweepParam::TxPowerDbm, vec![-10.0]).is_ok());
        assert!(SweepSpec::from_range(SweepParam::Beta, 0.0, 10.0, 3, true).is_err());
    }

    #[test]
    fn names_round_trip() {
        for p in SweepParam::ALL {
            assert_eq!(p.name().parse::<SweepParam>().unwrap(), p);
        }
        assert!("gain".parse::<SweepParam>().is_err());
    }

    #[test]
    fn apply_sets_fields() {
        let base = ScenarioConfig::default();
        assert_eq!(SweepParam::Elements.apply(&base, 16.0).unwrap().ris.elements, 16);
        assert_eq!(SweepParam::TxPowerDbm.apply(&base, 30.0).unwrap().ris.tx_power_w, 1.0);
        let z = SweepParam::Zeta.apply(&base, 2.0).unwrap();
        assert_eq!(z.misalign.zeta, 2.0);
        assert_eq!(z.misalign.phi, base.misalign.phi);
        assert_eq!(SweepParam::Kappa.apply(&base, 0.2).unwrap().absorption.kappa, 0.2);
    }

    #[test]
    fn list_parsing() {
        assert_eq!(parse_list("1, 2.5,1e3").unwrap(), vec![1.0, 2.5, 1000.0]);
        assert!(parse_list("1,,2").is_err());
    }
}

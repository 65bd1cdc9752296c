//! Scenario files: flat `section.key = value` lines, `#` comments.
//!
//! ```text
//! # default scenario
//! link.G_a_dBi = 30
//! link.f_Hz = 0.3e12
//! ris.M = 100
//! ris.P_s_dBm = 30
//! ```
//!
//! Every key is optional; omitted keys take the default-scenario value.
//! Mutually exclusive spellings (`link.G_a_dBi` / `link.G_a`,
//! `ris.P_s_dBm` / `ris.P_s_W`, `absorption.kappa` / `absorption.table`,
//! `misalign.{phi,zeta}` / `misalign.{r,u,v,sigma2}`) may not be mixed.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::capacity::{ActiveRisParams, LinkModel};
use crate::cascade_stats::FourthMomentMode;
use crate::channel::{db_to_linear, dbm_to_watts, AbsorptionSpec, AbsorptionTable, LinkGeometry, MisalignmentParams};
use crate::error::{Error, Result};
use crate::montecarlo::McConfig;
use crate::numerics::QuadratureSpec;

const KEYS: &[&str] = &[
    "link.G_a_dBi",
    "link.G_a",
    "link.G_b_dBi",
    "link.G_b",
    "link.f_Hz",
    "link.d_a",
    "link.d_b",
    "absorption.kappa",
    "absorption.table",
    "misalign.phi",
    "misalign.zeta",
    "misalign.r",
    "misalign.u",
    "misalign.v",
    "misalign.sigma2",
    "ris.M",
    "ris.beta",
    "ris.P_s_dBm",
    "ris.P_s_W",
    "ris.sigma2_r",
    "ris.sigma2_u",
    "stats.fourth_moment_mode",
    "quad.abs_tol",
    "quad.rel_tol",
    "quad.max_subdivisions",
    "mc.trials",
    "mc.seed",
    "mc.batch",
    "validate.tol_rel",
];

/// Default normalized receiver radius `s = √(π/2) r/u`.
pub const DEFAULT_NORMALIZED_RADIUS: f64 = 0.3;
pub const DEFAULT_ZETA: f64 = 0.6;
pub const DEFAULT_TOL_REL: f64 = 0.05;

/// Everything needed to run any subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub geometry: LinkGeometry,
    pub absorption: AbsorptionSpec,
    /// Source of `absorption.table`, if a table is in use.
    pub absorption_table_path: Option<PathBuf>,
    pub misalign: MisalignmentParams,
    pub ris: ActiveRisParams,
    pub mode: FourthMomentMode,
    pub quad: QuadratureSpec,
    pub mc: McConfig,
    /// Relative tolerance used by `validate`.
    pub tol_rel: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            geometry: LinkGeometry {
                gain_a: db_to_linear(30.0),
                gain_b: db_to_linear(30.0),
                freq_hz: 0.3e12,
                d_a: 15.0,
                d_b: 15.0,
            },
            absorption: AbsorptionSpec { kappa: 0.05, table: None },
            absorption_table_path: None,
            misalign: MisalignmentParams::from_normalized_radius(DEFAULT_NORMALIZED_RADIUS, DEFAULT_ZETA)
                .expect("default misalignment is valid"),
            ris: ActiveRisParams {
                elements: 100,
                beta: 2.0,
                tx_power_w: dbm_to_watts(30.0),
                noise_ris_w: 0.01,
                noise_user_w: 0.01,
            },
            mode: FourthMomentMode::Exact,
            quad: QuadratureSpec::default(),
            mc: McConfig::default(),
            tol_rel: DEFAULT_TOL_REL,
        }
    }
}

struct Entries {
    map: HashMap<String, (usize, String)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(Some(line_no), line, "expected `key = value`"));
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(Error::config(Some(line_no), key, "unknown key"));
            }
            if value.is_empty() {
                return Err(Error::config(Some(line_no), key, "missing value"));
            }
            if let Some((first, _)) = map.insert(key.to_string(), (line_no, value.to_string())) {
                return Err(Error::config(Some(line_no), key, format!("duplicate key (first set on line {first})")));
            }
        }
        Ok(Self { map })
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.map.get(key).map(|(l, _)| *l)
    }

    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.map.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::config(Some(line), key, format!("cannot parse `{v}`"))),
        }
    }

    fn real(&self, key: &str, check: Check) -> Result<Option<f64>> {
        let Some(v) = self.parsed::<f64>(key)? else {
            return Ok(None);
        };
        let ok = v.is_finite()
            && match check {
                Check::Any => true,
                Check::Positive => v > 0.0,
                Check::NonNegative => v >= 0.0,
                Check::UnitInterval => v > 0.0 && v <= 1.0,
            };
        if !ok {
            return Err(Error::config(self.line(key), key, format!("value {v} must be {}", check.describe())));
        }
        Ok(Some(v))
    }

    fn exclusive(&self, a: &str, b: &str) -> Result<()> {
        if self.has(a) && self.has(b) {
            return Err(Error::config(self.line(b), b, format!("cannot be combined with `{a}`")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Check {
    Any,
    Positive,
    NonNegative,
    UnitInterval,
}

impl Check {
    fn describe(self) -> &'static str {
        match self {
            Check::Any => "finite",
            Check::Positive => "positive",
            Check::NonNegative => "non-negative",
            Check::UnitInterval => "in (0, 1]",
        }
    }
}

fn group_err(key: &str, e: Error) -> Error {
    match e {
        Error::Domain(msg) => Error::config(None, key, msg),
        other => other,
    }
}

impl ScenarioConfig {
    /// Reads and validates a scenario file. A relative `absorption.table`
    /// path is resolved against the file's directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let e = Entries::parse(text)?;
        let d = ScenarioConfig::default();

        e.exclusive("link.G_a_dBi", "link.G_a")?;
        e.exclusive("link.G_b_dBi", "link.G_b")?;
        e.exclusive("ris.P_s_dBm", "ris.P_s_W")?;
        e.exclusive("absorption.kappa", "absorption.table")?;

        let gain = |db_key: &str, lin_key: &str, default: f64| -> Result<f64> {
            if let Some(db) = e.real(db_key, Check::Any)? {
                return Ok(db_to_linear(db));
            }
            Ok(e.real(lin_key, Check::Positive)?.unwrap_or(default))
        };
        let geometry = LinkGeometry {
            gain_a: gain("link.G_a_dBi", "link.G_a", d.geometry.gain_a)?,
            gain_b: gain("link.G_b_dBi", "link.G_b", d.geometry.gain_b)?,
            freq_hz: e.real("link.f_Hz", Check::Positive)?.unwrap_or(d.geometry.freq_hz),
            d_a: e.real("link.d_a", Check::Positive)?.unwrap_or(d.geometry.d_a),
            d_b: e.real("link.d_b", Check::Positive)?.unwrap_or(d.geometry.d_b),
        };
        geometry.validate().map_err(|err| group_err("link", err))?;

        let (absorption, absorption_table_path) = match e.raw("absorption.table") {
            Some((line, p)) => {
                let joined = base_dir.join(p);
                let resolved = joined.canonicalize().unwrap_or(joined);
                let table = AbsorptionTable::from_path(&resolved)
                    .map_err(|err| Error::config(Some(line), "absorption.table", format!("{}: {err}", resolved.display())))?;
                (AbsorptionSpec::with_table(table), Some(resolved))
            }
            None => {
                let kappa = e.real("absorption.kappa", Check::NonNegative)?.unwrap_or(d.absorption.kappa);
                (AbsorptionSpec { kappa, table: None }, None)
            }
        };
        // surfaces a table that does not cover the carrier
        absorption
            .kappa_at(geometry.freq_hz)
            .map_err(|err| group_err("absorption.table", err))?;

        let misalign = Self::parse_misalignment(&e, d.misalign)?;

        let elements = match e.parsed::<u32>("ris.M")? {
            Some(0) => return Err(Error::config(e.line("ris.M"), "ris.M", "element count must be >= 1")),
            Some(m) => m,
            None => d.ris.elements,
        };
        let tx_power_w = match e.real("ris.P_s_dBm", Check::Any)? {
            Some(dbm) => dbm_to_watts(dbm),
            None => e.real("ris.P_s_W", Check::Positive)?.unwrap_or(d.ris.tx_power_w),
        };
        let ris = ActiveRisParams {
            elements,
            beta: e.real("ris.beta", Check::NonNegative)?.unwrap_or(d.ris.beta),
            tx_power_w,
            noise_ris_w: e.real("ris.sigma2_r", Check::NonNegative)?.unwrap_or(d.ris.noise_ris_w),
            noise_user_w: e.real("ris.sigma2_u", Check::Positive)?.unwrap_or(d.ris.noise_user_w),
        };
        ris.validate().map_err(|err| group_err("ris", err))?;

        let mode = match e.raw("stats.fourth_moment_mode") {
            Some((line, v)) => v
                .parse::<FourthMomentMode>()
                .map_err(|err| Error::config(Some(line), "stats.fourth_moment_mode", err.to_string()))?,
            None => d.mode,
        };

        let max_subdivisions = match e.parsed::<usize>("quad.max_subdivisions")? {
            Some(0) => {
                return Err(Error::config(e.line("quad.max_subdivisions"), "quad.max_subdivisions", "must be >= 1"))
            }
            Some(n) => n,
            None => d.quad.max_subdivisions,
        };
        let quad = QuadratureSpec {
            abs_tol: e.real("quad.abs_tol", Check::Positive)?.unwrap_or(d.quad.abs_tol),
            rel_tol: e.real("quad.rel_tol", Check::Positive)?.unwrap_or(d.quad.rel_tol),
            max_subdivisions,
        };

        let count = |key: &str, default: u64| -> Result<u64> {
            match e.parsed::<u64>(key)? {
                Some(0) => Err(Error::config(e.line(key), key, "must be >= 1")),
                Some(n) => Ok(n),
                None => Ok(default),
            }
        };
        let mc = McConfig {
            trials: count("mc.trials", d.mc.trials)?,
            seed: e.parsed::<u64>("mc.seed")?.unwrap_or(d.mc.seed),
            batch: count("mc.batch", d.mc.batch)?,
        };

        let tol_rel = e.real("validate.tol_rel", Check::Positive)?.unwrap_or(d.tol_rel);

        Ok(Self {
            geometry,
            absorption,
            absorption_table_path,
            misalign,
            ris,
            mode,
            quad,
            mc,
            tol_rel,
        })
    }

    fn parse_misalignment(e: &Entries, default: MisalignmentParams) -> Result<MisalignmentParams> {
        const DIRECT: [&str; 2] = ["misalign.phi", "misalign.zeta"];
        const PHYSICAL: [&str; 4] = ["misalign.r", "misalign.u", "misalign.v", "misalign.sigma2"];
        let direct_given: Vec<&str> = DIRECT.iter().copied().filter(|k| e.has(k)).collect();
        let physical_given: Vec<&str> = PHYSICAL.iter().copied().filter(|k| e.has(k)).collect();
        if let (Some(a), Some(b)) = (direct_given.first(), physical_given.first()) {
            return Err(Error::config(
                e.line(b),
                *b,
                format!("cannot be combined with `{a}`: give either (phi, zeta) or (r, u, v, sigma2)"),
            ));
        }
        let require_all = |group: &[&str]| -> Result<()> {
            for k in group {
                if !e.has(k) {
                    return Err(Error::config(None, *k, format!("missing required key (needed with `{}`)", group.iter().find(|g| e.has(g)).unwrap())));
                }
            }
            Ok(())
        };
        if !direct_given.is_empty() {
            require_all(&DIRECT)?;
            let phi = e.real("misalign.phi", Check::UnitInterval)?.unwrap();
            let zeta = e.real("misalign.zeta", Check::Positive)?.unwrap();
            return MisalignmentParams::new(phi, zeta).map_err(|err| group_err("misalign", err));
        }
        if !physical_given.is_empty() {
            require_all(&PHYSICAL)?;
            let get = |k| -> Result<f64> { Ok(e.real(k, Check::Positive)?.unwrap()) };
            return MisalignmentParams::from_physical(get("misalign.r")?, get("misalign.u")?, get("misalign.v")?, get("misalign.sigma2")?)
                .map_err(|err| group_err("misalign", err));
        }
        Ok(default)
    }

    /// The analytical model this scenario describes.
    pub fn model(&self) -> Result<LinkModel> {
        LinkModel::new(self.geometry, self.absorption.clone(), self.misalign, self.ris, self.mode)
    }

    /// Effective configuration in the scenario-file format, using linear
    /// gains and watts so that re-parsing reproduces it exactly.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("link.G_a", self.geometry.gain_a.to_string());
        kv("link.G_b", self.geometry.gain_b.to_string());
        kv("link.f_Hz", self.geometry.freq_hz.to_string());
        kv("link.d_a", self.geometry.d_a.to_string());
        kv("link.d_b", self.geometry.d_b.to_string());
        match &self.absorption_table_path {
            Some(p) => kv("absorption.table", p.display().to_string()),
            None => kv("absorption.kappa", self.absorption.kappa.to_string()),
        }
        kv("misalign.phi", self.misalign.phi.to_string());
        kv("misalign.zeta", self.misalign.zeta.to_string());
        kv("ris.M", self.ris.elements.to_string());
        kv("ris.beta", self.ris.beta.to_string());
        kv("ris.P_s_W", self.ris.tx_power_w.to_string());
        kv("ris.sigma2_r", self.ris.noise_ris_w.to_string());
        kv("ris.sigma2_u", self.ris.noise_user_w.to_string());
        kv("stats.fourth_moment_mode", self.mode.to_string());
        kv("quad.abs_tol", self.quad.abs_tol.to_string());
        kv("quad.rel_tol", self.quad.rel_tol.to_string());
        kv("quad.max_subdivisions", self.quad.max_subdivisions.to_string());
        kv("mc.trials", self.mc.trials.to_string());
        kv("mc.seed", self.mc.seed.to_string());
        kv("mc.batch", self.mc.batch.to_string());
        kv("validate.tol_rel", self.tol_rel.to_string());
        s
    }
}

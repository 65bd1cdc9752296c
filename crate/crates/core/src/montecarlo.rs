//! Monte-Carlo simulator of the link SNR, independent of the Gamma
//! approximation. Draws Rayleigh fading per element, a misalignment fraction
//! and forms `γ` directly.
//!
//! Trials are split into fixed-size batches. Batch `i` draws from its own
//! ChaCha8 stream `i` keyed by the seed, and batch results are merged in
//! index order, so results do not depend on thread count or scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::capacity::LinkModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    /// Trials per batch (the unit of parallel work and of RNG substreams).
    pub batch: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            trials: 1_000_000,
            seed: 0x5EED,
            batch: 16_384,
        }
    }
}

impl McConfig {
    pub fn new(trials: u64, seed: u64, batch: u64) -> Result<Self> {
        let cfg = Self { trials, seed, batch };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::domain("Monte-Carlo trials must be >= 1"));
        }
        if self.batch < 1 {
            return Err(Error::domain("Monte-Carlo batch size must be >= 1"));
        }
        Ok(())
    }

    fn batches(&self) -> impl IndexedParallelIterator<Item = (u64, u64)> + '_ {
        let n = usize::try_from(self.trials.div_ceil(self.batch)).expect("batch count fits in usize");
        (0..n).into_par_iter().map(move |i| {
            let i = i as u64;
            let start = i * self.batch;
            (i, (self.trials - start).min(self.batch))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
}

/// RNG for batch `index` of a run seeded with `seed`.
pub fn batch_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Magnitude of a unit-variance circularly-symmetric complex Gaussian.
pub fn sample_rayleigh<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    ((re * re + im * im) * 0.5).sqrt()
}

/// Draws `S = Σ_m |f_m||g_m|` for `elements` RIS elements.
pub fn sample_cascade_sum<R: Rng + ?Sized>(elements: u32, rng: &mut R) -> f64 {
    (0..elements).map(|_| sample_rayleigh(rng) * sample_rayleigh(rng)).sum()
}

/// Draws `χ = S²`.
pub fn sample_cascade<R: Rng + ?Sized>(elements: u32, rng: &mut R) -> f64 {
    let s = sample_cascade_sum(elements, rng);
    s * s
}

/// Draws one SNR realization of `model`.
pub fn sample_snr<R: Rng + ?Sized>(model: &LinkModel, rng: &mut R) -> f64 {
    let chi = sample_cascade(model.ris().elements, rng);
    let q: f64 = rng.random();
    let x = model
        .misalignment()
        .quantile(q)
        .expect("uniform draw lies in [0, 1)");
    model.snr_realization(x, chi)
}

#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    // Chan et al. pairwise merge
    fn merge(self, other: Welford) -> Welford {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + d * d * (self.n as f64 * other.n as f64 / n as f64);
        Welford { n, mean, m2 }
    }

    fn estimate(&self) -> McEstimate {
        let std_error = if self.n > 1 {
            (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
        } else {
            0.0
        };
        McEstimate {
            mean: self.mean,
            std_error,
            n: self.n,
        }
    }
}

/// Sample mean and standard error of `draw` over `cfg.trials` trials.
pub fn estimate_mean<F>(cfg: &McConfig, draw: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    cfg.validate()?;
    let parts: Vec<Welford> = cfg
        .batches()
        .map(|(index, len)| {
            let mut rng = batch_rng(cfg.seed, index);
            let mut acc = Welford::default();
            for _ in 0..len {
                acc.push(draw(&mut rng));
            }
            acc
        })
        .collect();
    Ok(parts.into_iter().fold(Welford::default(), Welford::merge).estimate())
}

/// All `cfg.trials` draws of `draw`, in batch order.
pub fn collect_samples<F>(cfg: &McConfig, draw: F) -> Result<Vec<f64>>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    cfg.validate()?;
    let parts: Vec<Vec<f64>> = cfg
        .batches()
        .map(|(index, len)| {
            let mut rng = batch_rng(cfg.seed, index);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    Ok(parts.concat())
}

/// SNR samples of `model`, in batch order.
pub fn sample_snrs(model: &LinkModel, cfg: &McConfig) -> Result<Vec<f64>> {
    collect_samples(cfg, |rng| sample_snr(model, rng))
}

/// Monte-Carlo estimate of `E[log₂(1 + γ)]` in bits/s/Hz.
pub fn estimate_ergodic_rate(model: &LinkModel, cfg: &McConfig) -> Result<McEstimate> {
    estimate_mean(cfg, |rng| sample_snr(model, rng).ln_1p() / std::f64::consts::LN_2)
}

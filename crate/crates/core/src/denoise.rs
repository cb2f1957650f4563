//! Universal frame thresholding under additive white Gaussian noise.
//!
//! The threshold for atom `k` is `τ_k = σ ‖ψ_k‖₂ √(2 ln N)`, with `N` the
//! number of vertices. For a unit-norm frame this is the classical universal
//! threshold; the per-atom scaling matches the standard deviation of
//! `⟨σz, ψ_k⟩` for white `z`.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::signal::Signal;
use crate::transform::{frame_bounds, Frame};

/// Allowed deviation of the frame bounds from 1.
pub const TIGHTNESS_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise level must be finite and nonnegative, got {sigma}"
            )));
        }
        Ok(Self { sigma, seed })
    }

    /// Standard normal draws for one trial; stream `trial` of the seeded generator.
    pub fn standard_noise(&self, n: usize, trial: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }
}

/// `y = x + σ z` with `z` drawn from the `(seed, trial)` stream.
pub fn add_awgn(x: &Signal, model: &NoiseModel, trial: u64) -> Signal {
    if model.sigma == 0.0 {
        return x.clone();
    }
    let z = model.standard_noise(x.len(), trial);
    let values = x
        .values()
        .iter()
        .zip(z)
        .map(|(v, z)| v + model.sigma * z)
        .collect();
    Signal::new(values).expect("finite noise")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdRule {
    #[default]
    Hard,
    Soft,
}

/// `√(2 ln N)`.
pub fn universal_factor(n: usize) -> f64 {
    (2.0 * (n as f64).ln()).sqrt()
}

/// A tight frame prepared for thresholding; tightness is checked once.
pub struct Denoiser<'a, F: Frame + ?Sized> {
    frame: &'a F,
    norms: Vec<f64>,
    rule: ThresholdRule,
}

impl<'a, F: Frame + ?Sized> Denoiser<'a, F> {
    pub fn new(frame: &'a F, rule: ThresholdRule) -> Result<Self> {
        let (lower, upper) = frame_bounds(frame)?;
        if (lower - 1.0).abs() > TIGHTNESS_TOLERANCE || (upper - 1.0).abs() > TIGHTNESS_TOLERANCE {
            return Err(Error::NotTight { lower, upper });
        }
        Ok(Self {
            frame,
            norms: frame.atom_norms(),
            rule,
        })
    }

    /// Thresholded coefficients of `y` at noise level `sigma`.
    pub fn threshold(&self, y: &Signal, sigma: f64) -> Result<DVector<f64>> {
        if sigma.is_nan() || sigma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "noise level must be nonnegative, got {sigma}"
            )));
        }
        let mut c = self.frame.coefficients(y)?;
        let factor = sigma * universal_factor(self.frame.dim());
        for (ck, norm) in c.iter_mut().zip(&self.norms) {
            let tau = factor * norm;
            *ck = match self.rule {
                ThresholdRule::Hard => {
                    if ck.abs() > tau {
                        *ck
                    } else {
                        0.0
                    }
                }
                ThresholdRule::Soft => ck.signum() * (ck.abs() - tau).max(0.0),
            };
        }
        Ok(c)
    }

    pub fn denoise(&self, y: &Signal, sigma: f64) -> Result<Signal> {
        let c = self.threshold(y, sigma)?;
        self.frame.combine(&c)
    }
}

/// Analysis, per-atom universal thresholding, and synthesis in one call.
pub fn universal_threshold_denoise<F: Frame + ?Sized>(
    frame: &F,
    y: &Signal,
    sigma: f64,
    rule: ThresholdRule,
) -> Result<Signal> {
    Denoiser::new(frame, rule)?.denoise(y, sigma)
}

/// `(1/n) Σ (x_v − x̂_v)²`.
pub fn mse(x: &Signal, xhat: &Signal) -> Result<f64> {
    let d = x.sub(xhat)?;
    if d.is_empty() {
        return Ok(0.0);
    }
    Ok(d.norm_squared() / d.len() as f64)
}

/// `count` values log-spaced over `[0.01, 1] · RMS(x)`.
pub fn default_sigma_grid(x: &Signal, count: usize) -> Vec<f64> {
    let rms = if x.is_empty() {
        0.0
    } else {
        (x.norm_squared() / x.len() as f64).sqrt()
    };
    let (lo, hi) = (0.01_f64.ln(), 0.0_f64);
    (0..count)
        .map(|k| {
            let t = if count > 1 {
                k as f64 / (count - 1) as f64
            } else {
                0.0
            };
            rms * (lo + t * (hi - lo)).exp()
        })
        .collect()
}

pub const DEFAULT_SIGMA_COUNT: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseRow {
    pub method: String,
    pub sigma: f64,
    pub mean_mse: f64,
    pub std_mse: f64,
    pub trials: usize,
}

/// Noise seed for the `sigma_index`-th noise level of an experiment.
pub fn level_seed(seed: u64, sigma_index: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ (sigma_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `trials` corruptions per noise level and denoises each with every
/// method. All methods see identical noise for a given `(sigma, trial)`.
pub fn denoise_experiment(
    clean: &Signal,
    methods: &[(&str, &(dyn Frame + Sync))],
    sigmas: &[f64],
    trials: usize,
    seed: u64,
    rule: ThresholdRule,
) -> Result<Vec<DenoiseRow>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let denoisers = methods
        .iter()
        .map(|(name, frame)| {
            clean.expect_len(frame.dim())?;
            Ok((*name, Denoiser::new(*frame, rule)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (si, &sigma) in sigmas.iter().enumerate() {
        let model = NoiseModel::new(sigma, level_seed(seed, si))?;
        let noisy: Vec<Signal> = (0..trials as u64)
            .into_par_iter()
            .map(|t| add_awgn(clean, &model, t))
            .collect();
        for (name, den) in &denoisers {
            let errors = noisy
                .par_iter()
                .map(|y| mse(clean, &den.denoise(y, sigma)?))
                .collect::<Result<Vec<f64>>>()?;
            let n = errors.len() as f64;
            let mean = errors.iter().sum::<f64>() / n;
            let var = errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n;
            rows.push(DenoiseRow {
                method: (*name).to_string(),
                sigma,
                mean_mse: mean,
                std_mse: var.sqrt(),
                trials,
            });
        }
    }
    Ok(rows)
}

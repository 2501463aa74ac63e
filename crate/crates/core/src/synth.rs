//! Synthetic datasets with log-normal columns calibrated to target moments.
//!
//! All columns share a latent size factor, so inputs and outputs of a unit
//! move together with strength `rho`. After drawing, each column is power
//! transformed to hit its target coefficient of variation and then rescaled
//! to hit its target mean, so the sample moments match exactly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// (mean, standard deviation) of three inputs of a banking dataset.
pub const INPUT_MOMENTS: [(f64, f64); 3] = [(15.16, 18.16), (27.06, 37.86), (36.49, 47.34)];
/// (mean, standard deviation) of three outputs of the same dataset.
pub const OUTPUT_MOMENTS: [(f64, f64); 3] = [(6.62, 9.36), (3.52, 4.82), (1.02, 1.32)];

pub const DEFAULT_RHO: f64 = 0.7;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n: usize,
    pub input_moments: Vec<(f64, f64)>,
    pub output_moments: Vec<(f64, f64)>,
    /// Share of each column's log-variance carried by the common factor.
    pub rho: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// Default moments, cycling through the three-column tables when `m` or
    /// `r` differ from 3.
    pub fn with_defaults(n: usize, m: usize, r: usize, seed: u64) -> Self {
        Self {
            n,
            input_moments: (0..m).map(|k| INPUT_MOMENTS[k % 3]).collect(),
            output_moments: (0..r).map(|i| OUTPUT_MOMENTS[i % 3]).collect(),
            rho: DEFAULT_RHO,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.input_moments.is_empty() || self.output_moments.is_empty() {
            return Err(Error::input("synthetic data needs n, m, r ≥ 1"));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::input(format!("rho must lie in [0, 1), got {}", self.rho)));
        }
        for &(mean, sd) in self.input_moments.iter().chain(&self.output_moments) {
            if !(mean > 0.0 && sd > 0.0 && mean.is_finite() && sd.is_finite()) {
                return Err(Error::input("column means and deviations must be positive"));
            }
        }
        Ok(())
    }
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn cv_after_power(v: &[f64], p: f64) -> f64 {
    let w: Vec<f64> = v.iter().map(|x| x.powf(p)).collect();
    let (m, s) = mean_sd(&w);
    s / m
}

/// Power-transforms then rescales `v` so its sample mean and deviation hit
/// the targets. Values are first normalized by their geometric mean.
fn calibrate(v: &mut [f64], mean: f64, sd: f64) {
    if v.len() < 2 {
        v.iter_mut().for_each(|x| *x = mean);
        return;
    }
    let log_mean = v.iter().map(|x| x.ln()).sum::<f64>() / v.len() as f64;
    let g = log_mean.exp();
    v.iter_mut().for_each(|x| *x /= g);
    let target = sd / mean;
    let (mut lo, mut hi) = (1e-3, 1.0);
    while cv_after_power(v, hi) < target && hi < 64.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cv_after_power(v, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    v.iter_mut().for_each(|x| *x = x.powf(p));
    let (m, _) = mean_sd(v);
    v.iter_mut().for_each(|x| *x *= mean / m);
}

/// Draws a dataset; identical specs give identical data.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<Dataset> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let latent: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let (a, b) = (spec.rho.sqrt(), (1.0 - spec.rho).sqrt());
    let mut column = |mean: f64, sd: f64| -> Vec<f64> {
        let s2 = (1.0 + (sd / mean).powi(2)).ln();
        let mu = mean.ln() - s2 / 2.0;
        let mut v: Vec<f64> = latent
            .iter()
            .map(|z| {
                let e: f64 = StandardNormal.sample(&mut rng);
                (mu + s2.sqrt() * (a * z + b * e)).exp()
            })
            .collect();
        calibrate(&mut v, mean, sd);
        v
    };
    let xcols: Vec<Vec<f64>> = spec.input_moments.iter().map(|&(m, s)| column(m, s)).collect();
    let ycols: Vec<Vec<f64>> = spec.output_moments.iter().map(|&(m, s)| column(m, s)).collect();
    let width = n.to_string().len();
    let ids = (1..=n).map(|j| format!("u{j:0width$}")).collect();
    let inputs = (0..n).map(|j| xcols.iter().map(|c| c[j]).collect()).collect();
    let outputs = (0..n).map(|j| ycols.iter().map(|c| c[j]).collect()).collect();
    Dataset::new(ids, inputs, outputs)
}

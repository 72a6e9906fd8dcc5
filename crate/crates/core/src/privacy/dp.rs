//! Gaussian-mechanism release of population statistics.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::circuit::fixed_point::{decode_fixed_point, encode_fixed_point, encode_spread, DOMAIN_MS, SCALE_MAX};
use crate::{Error, Result};

/// Noise standard deviations added to the released variance, on top of the
/// noisy second moment. Keeps released spreads from shrinking below the
/// truth because of the noise itself.
pub const VARIANCE_MARGIN: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DpBudget {
    pub epsilon: f64,
    pub delta: f64,
    /// Cohort size.
    pub n: usize,
}

impl DpBudget {
    pub fn new(epsilon: f64, delta: f64, n: usize) -> Result<Self> {
        let b = DpBudget { epsilon, delta, n };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        check_eps_delta(self.epsilon, self.delta)?;
        if self.n < 2 {
            return Err(Error::Budget(format!("cohort of {} is too small to release", self.n)));
        }
        Ok(())
    }
}

fn check_eps_delta(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Budget(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Budget(format!("delta must be in (0, 1), got {delta}")));
    }
    Ok(())
}

/// `sensitivity * sqrt(2 ln(1.25 / delta)) / epsilon`.
pub fn gaussian_sigma(sensitivity: f64, epsilon: f64, delta: f64) -> Result<f64> {
    check_eps_delta(epsilon, delta)?;
    if !(sensitivity.is_finite() && sensitivity >= 0.0) {
        return Err(Error::Budget(format!("sensitivity must be finite and non-negative, got {sensitivity}")));
    }
    Ok(sensitivity * (2.0 * (1.25 / delta).ln()).sqrt() / epsilon)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    Raw { n: usize },
    DpReleased { epsilon: f64, delta: f64, n: usize, seed: Option<u64> },
}

/// Per-feature location and spread in 16-bit fixed point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationParams {
    pub mu: Vec<u64>,
    pub sigma: Vec<u64>,
    pub bounds_mult: u64,
    pub provenance: Provenance,
}

impl PopulationParams {
    /// Quantizes millisecond statistics. Spreads that round to zero become
    /// one quantization step.
    pub fn from_ms(mu_ms: &[f64], sigma_ms: &[f64], bounds_mult: u64, provenance: Provenance) -> Result<Self> {
        if mu_ms.len() != sigma_ms.len() || mu_ms.is_empty() {
            return Err(Error::Schema("mu and sigma need the same nonzero length".into()));
        }
        let mu = mu_ms
            .iter()
            .map(|&x| encode_fixed_point(x.clamp(0.0, DOMAIN_MS)))
            .collect::<Result<Vec<_>>>()?;
        let sigma = sigma_ms
            .iter()
            .map(|&s| encode_spread(s).map(|v| v.max(1)))
            .collect::<Result<Vec<_>>>()?;
        let p = PopulationParams { mu, sigma, bounds_mult, provenance };
        p.validate()?;
        Ok(p)
    }

    pub fn m(&self) -> usize {
        self.mu.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu.len() != self.sigma.len() || self.mu.is_empty() {
            return Err(Error::Schema("mu and sigma need the same nonzero length".into()));
        }
        if !(1..=4).contains(&self.bounds_mult) {
            return Err(Error::Config("bounds_mult must be in 1..=4".into()));
        }
        for (j, (&u, &s)) in self.mu.iter().zip(&self.sigma).enumerate() {
            if u > SCALE_MAX || s > SCALE_MAX || s == 0 {
                return Err(Error::Domain(format!("feature {j}: mu {u}, sigma {s} outside the fixed-point range")));
            }
        }
        Ok(())
    }

    /// Inclusive `(a_j, b_j)` in fixed point, clipped to the domain.
    pub fn bounds(&self) -> Vec<(u64, u64)> {
        self.mu
            .iter()
            .zip(&self.sigma)
            .map(|(&u, &s)| {
                let k = self.bounds_mult * s;
                (u.saturating_sub(k), (u + k).min(SCALE_MAX))
            })
            .collect()
    }

    pub fn bounds_ms(&self) -> Vec<(f64, f64)> {
        self.bounds()
            .into_iter()
            .map(|(a, b)| (decode_fixed_point(a), decode_fixed_point(b)))
            .collect()
    }

    pub fn mu_ms(&self) -> Vec<f64> {
        self.mu.iter().map(|&v| decode_fixed_point(v)).collect()
    }

    pub fn sigma_ms(&self) -> Vec<f64> {
        self.sigma.iter().map(|&v| decode_fixed_point(v)).collect()
    }
}

/// Unquantized output of one release.
#[derive(Clone, Debug, PartialEq)]
pub struct Release {
    pub mu_ms: Vec<f64>,
    pub sigma_ms: Vec<f64>,
    /// Noise scale on each mean.
    pub mean_noise: Vec<f64>,
    /// Noise scale on each centered second moment.
    pub moment_noise: Vec<f64>,
}

fn check_matrix(features: &[Vec<f64>], clamp: &[(f64, f64)]) -> Result<()> {
    if features.len() < 2 {
        return Err(Error::Budget(format!("cohort of {} is too small to release", features.len())));
    }
    let m = clamp.len();
    if let Some((i, row)) = features.iter().enumerate().find(|(_, r)| r.len() != m) {
        return Err(Error::Schema(format!("row {i} has {} features, expected {m}", row.len())));
    }
    if let Some((j, _)) = clamp.iter().enumerate().find(|(_, (a, b))| !(a.is_finite() && b.is_finite() && a < b)) {
        return Err(Error::InvalidInput(format!("clamp interval {j} is empty or not finite")));
    }
    Ok(())
}

/// Mean of every column after clamping each entry to its interval.
pub fn clamped_mean(features: &[Vec<f64>], clamp: &[(f64, f64)]) -> Result<Vec<f64>> {
    check_matrix(features, clamp)?;
    let n = features.len() as f64;
    Ok((0..clamp.len())
        .map(|j| {
            let (a, b) = clamp[j];
            features.iter().map(|r| r[j].clamp(a, b)).sum::<f64>() / n
        })
        .collect())
}

/// Noisy per-feature means and spreads.
///
/// The mean has sensitivity `(b - a) / N`. The spread comes from the second
/// moment around the interval midpoint, whose sensitivity is
/// `((b - a) / 2)^2 / N`; each statistic is released under the full budget.
pub fn release<R: Rng>(features: &[Vec<f64>], clamp: &[(f64, f64)], budget: &DpBudget, rng: &mut R) -> Result<Release> {
    budget.validate()?;
    check_matrix(features, clamp)?;
    if features.len() != budget.n {
        return Err(Error::Budget(format!("budget is for N = {}, matrix has {} rows", budget.n, features.len())));
    }
    let n = features.len() as f64;
    let mut out = Release {
        mu_ms: vec![],
        sigma_ms: vec![],
        mean_noise: vec![],
        moment_noise: vec![],
    };
    for (j, &(a, b)) in clamp.iter().enumerate() {
        let c = (a + b) / 2.0;
        let (mut sum, mut sq) = (0.0, 0.0);
        for row in features {
            let x = row[j].clamp(a, b);
            sum += x;
            sq += (x - c) * (x - c);
        }
        let s1 = gaussian_sigma((b - a) / n, budget.epsilon, budget.delta)?;
        let s2 = gaussian_sigma((b - a) * (b - a) / 4.0 / n, budget.epsilon, budget.delta)?;
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let mu = sum / n + s1 * z1;
        let m2 = sq / n + s2 * z2;
        let var = (m2 - (mu - c) * (mu - c)).max(0.0) + VARIANCE_MARGIN * s2;
        out.mu_ms.push(mu);
        out.sigma_ms.push(var.sqrt());
        out.mean_noise.push(s1);
        out.moment_noise.push(s2);
    }
    Ok(out)
}

/// Releases and quantizes population parameters, recording provenance.
pub fn release_population<R: Rng>(
    features: &[Vec<f64>],
    clamp: &[(f64, f64)],
    budget: &DpBudget,
    bounds_mult: u64,
    seed: Option<u64>,
    rng: &mut R,
) -> Result<PopulationParams> {
    let r = release(features, clamp, budget, rng)?;
    PopulationParams::from_ms(
        &r.mu_ms,
        &r.sigma_ms,
        bounds_mult,
        Provenance::DpReleased {
            epsilon: budget.epsilon,
            delta: budget.delta,
            n: budget.n,
            seed,
        },
    )
}

/// Plain sample statistics, for callers that publish without noise.
pub fn raw_population(features: &[Vec<f64>], bounds_mult: u64) -> Result<PopulationParams> {
    let m = features.first().map(|r| r.len()).unwrap_or(0);
    check_matrix(features, &vec![(0.0, DOMAIN_MS); m])?;
    let n = features.len() as f64;
    let mut mu = vec![];
    let mut sigma = vec![];
    for j in 0..m {
        let mean = features.iter().map(|r| r[j]).sum::<f64>() / n;
        let var = features.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / (n - 1.0);
        mu.push(mean);
        sigma.push(var.sqrt());
    }
    PopulationParams::from_ms(&mu, &sigma, bounds_mult, Provenance::Raw { n: features.len() })
}

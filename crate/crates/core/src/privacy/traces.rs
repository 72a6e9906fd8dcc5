//! Synthetic labeled sessions.
//!
//! Genuine marginals are uniform on `mu -/+ sqrt(3) sigma`, which has standard
//! deviation `sigma`. Temporal dependence comes from a Gaussian AR(1)
//! pushed through the normal CDF; for a Gaussian copula the lag-1
//! correlation of the uniform scores is `(6 / pi) asin(rho / 2)`, so the
//! latent coefficient is `rho = 2 sin(pi r1 / 6)`.
//!
//! Every draw comes from a stream keyed by (seed, purpose, indices), so
//! configurations that share a seed see the same sessions feature by
//! feature. Sweeps over m or over the bounds then compare like with like.

use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::dp::{PopulationParams, Provenance};
use crate::circuit::fixed_point::DOMAIN_MS;
use crate::{Error, Result};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Nominal gap between checkpoints and its jitter, in ms.
pub const GAP_MS: u64 = 30_000;
pub const GAP_JITTER_MS: u64 = 2_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryModel {
    /// Independent uniform draws over the whole `[0, 1000]` ms domain.
    NaiveUniform,
    /// Independent draws from the genuine marginals.
    DistributionMatched,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationConfig {
    pub label: String,
    /// Sessions per class.
    pub n_sessions: usize,
    pub n_checkpoints: usize,
    pub m: usize,
    pub bounds_mult: u64,
    /// `None` publishes the exact population statistics.
    pub epsilon: Option<f64>,
    pub delta: f64,
    /// Users contributing to the released statistics.
    pub cohort: usize,
    pub adversary: AdversaryModel,
    pub r1: f64,
    /// Compare 16-bit fixed-point values (as the circuit does) rather than
    /// raw milliseconds.
    pub quantized: bool,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            label: "default".into(),
            n_sessions: 2000,
            n_checkpoints: 1,
            m: 12,
            bounds_mult: 3,
            epsilon: Some(1.0),
            delta: 1e-5,
            cohort: 10_000,
            adversary: AdversaryModel::NaiveUniform,
            r1: 0.111,
            quantized: true,
            seed: 0,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_sessions == 0 || self.n_checkpoints == 0 || self.m == 0 {
            return Err(Error::Config("sessions, checkpoints and m must be positive".into()));
        }
        if !(1..=4).contains(&self.bounds_mult) {
            return Err(Error::Config("bounds_mult must be in 1..=4".into()));
        }
        if !(0.0..1.0).contains(&self.r1) {
            return Err(Error::Config(format!("r1 must be in [0, 1), got {}", self.r1)));
        }
        if self.epsilon.is_some() && self.cohort < 2 {
            return Err(Error::Config("a DP release needs a cohort of at least 2".into()));
        }
        Ok(())
    }
}

/// Unquantized population behind a simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    pub mu_ms: Vec<f64>,
    pub sigma_ms: Vec<f64>,
}

impl GroundTruth {
    /// Means near the middle of the domain and spreads for which a 3-sigma
    /// box covers about 79% of each feature's domain.
    pub fn synthetic(m: usize, seed: u64) -> Self {
        let (mut mu_ms, mut sigma_ms) = (vec![], vec![]);
        for j in 0..m {
            let mut rng = stream(seed, "truth", &[j as u64]);
            mu_ms.push(rng.gen_range(480.0..520.0));
            sigma_ms.push(rng.gen_range(126.0..137.0));
        }
        GroundTruth { mu_ms, sigma_ms }
    }

    pub fn m(&self) -> usize {
        self.mu_ms.len()
    }

    pub fn to_params(&self, bounds_mult: u64, n: usize) -> Result<PopulationParams> {
        PopulationParams::from_ms(&self.mu_ms, &self.sigma_ms, bounds_mult, Provenance::Raw { n })
    }

    fn marginal(&self, j: usize, u: f64) -> f64 {
        (self.mu_ms[j] + SQRT_3 * self.sigma_ms[j] * (2.0 * u - 1.0)).clamp(0.0, DOMAIN_MS)
    }

    /// One genuine user's feature vector, as contributed to a release.
    pub fn cohort(&self, size: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut cols: Vec<Vec<f64>> = (0..self.m())
            .map(|j| {
                let mut rng = stream(seed, "cohort", &[j as u64]);
                (0..size).map(|_| self.marginal(j, rng.gen())).collect()
            })
            .collect();
        (0..size).map(|i| cols.iter_mut().map(|c| c[i]).collect()).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceSession {
    pub genuine: bool,
    /// `n_checkpoints x m`, in ms.
    pub features_ms: Vec<Vec<f64>>,
    /// Checkpoint times since session start.
    pub timestamps_ms: Vec<u64>,
}

pub(crate) fn stream(seed: u64, tag: &str, ids: &[u64]) -> ChaCha20Rng {
    let mut h = Sha256::new();
    h.update(b"zkattest-sim-v1");
    h.update(seed.to_le_bytes());
    h.update((tag.len() as u64).to_le_bytes());
    h.update(tag.as_bytes());
    for i in ids {
        h.update(i.to_le_bytes());
    }
    ChaCha20Rng::from_seed(h.finalize().into())
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / SQRT_2))
}

fn timestamps(seed: u64, class: u64, s: u64, n: usize) -> Vec<u64> {
    let mut rng = stream(seed, "time", &[class, s]);
    let mut t = 0;
    (0..n)
        .map(|_| {
            t += rng.gen_range(GAP_MS - GAP_JITTER_MS..=GAP_MS + GAP_JITTER_MS);
            t
        })
        .collect()
}

/// `n_sessions` genuine sessions followed by `n_sessions` adversarial ones.
pub fn generate_traces(truth: &GroundTruth, config: &SimulationConfig) -> Result<Vec<TraceSession>> {
    config.validate()?;
    if truth.m() < config.m {
        return Err(Error::Config(format!("population has {} features, config needs {}", truth.m(), config.m)));
    }
    let (m, n) = (config.m, config.n_checkpoints);
    let rho = 2.0 * (PI * config.r1 / 6.0).sin();
    let innov = (1.0 - rho * rho).sqrt();
    let mut out = Vec::with_capacity(2 * config.n_sessions);
    for s in 0..config.n_sessions as u64 {
        let mut rows = vec![vec![0.0; m]; n];
        for j in 0..m {
            let mut rng = stream(config.seed, "genuine", &[s, j as u64]);
            let mut z: f64 = rng.sample(StandardNormal);
            for (t, row) in rows.iter_mut().enumerate() {
                if t > 0 {
                    z = rho * z + innov * rng.sample::<f64, _>(StandardNormal);
                }
                row[j] = truth.marginal(j, normal_cdf(z));
            }
        }
        out.push(TraceSession {
            genuine: true,
            features_ms: rows,
            timestamps_ms: timestamps(config.seed, 0, s, n),
        });
    }
    for s in 0..config.n_sessions as u64 {
        let mut rows = vec![vec![0.0; m]; n];
        for j in 0..m {
            let mut rng = stream(config.seed, "adversary", &[s, j as u64]);
            for row in rows.iter_mut() {
                row[j] = match config.adversary {
                    AdversaryModel::NaiveUniform => rng.gen_range(0.0..=DOMAIN_MS),
                    AdversaryModel::DistributionMatched => truth.marginal(j, rng.gen()),
                };
            }
        }
        out.push(TraceSession {
            genuine: false,
            features_ms: rows,
            timestamps_ms: timestamps(config.seed, 1, s, n),
        });
    }
    Ok(out)
}

/// Pooled lag-1 autocorrelation of the genuine sessions, centered on the
/// population means.
pub fn lag1_autocorrelation(sessions: &[TraceSession], truth: &GroundTruth) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for s in sessions.iter().filter(|s| s.genuine) {
        for j in 0..s.features_ms.first().map_or(0, |r| r.len()) {
            let d: Vec<f64> = s.features_ms.iter().map(|r| r[j] - truth.mu_ms[j]).collect();
            num += d.windows(2).map(|w| w[0] * w[1]).sum::<f64>();
            den += d.iter().map(|x| x * x).sum::<f64>();
        }
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marginals_have_the_population_moments() {
        let truth = GroundTruth::synthetic(3, 1);
        let c = truth.cohort(20_000, 2);
        for j in 0..3 {
            let mean = c.iter().map(|r| r[j]).sum::<f64>() / 20_000.0;
            let sd = (c.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / 20_000.0).sqrt();
            assert!((mean - truth.mu_ms[j]).abs() < 3.0);
            assert!((sd / truth.sigma_ms[j] - 1.0).abs() < 0.02);
        }
    }

    #[test]
    fn traces_are_reproducible_and_labeled() {
        let truth = GroundTruth::synthetic(12, 0);
        let cfg = SimulationConfig { n_sessions: 5, n_checkpoints: 4, ..Default::default() };
        let a = generate_traces(&truth, &cfg).unwrap();
        assert_eq!(a, generate_traces(&truth, &cfg).unwrap());
        assert_eq!(a.iter().filter(|s| s.genuine).count(), 5);
        assert!(a.iter().all(|s| s.features_ms.len() == 4 && s.timestamps_ms.len() == 4));
        assert!(a.iter().flat_map(|s| &s.features_ms).flatten().all(|x| (0.0..=1000.0).contains(x)));
    }

    #[test]
    fn smaller_m_is_a_prefix_of_larger_m() {
        let truth = GroundTruth::synthetic(24, 0);
        let small = generate_traces(&truth, &SimulationConfig { m: 6, n_sessions: 3, ..Default::default() }).unwrap();
        let big = generate_traces(&truth, &SimulationConfig { m: 24, n_sessions: 3, ..Default::default() }).unwrap();
        for (a, b) in small.iter().zip(&big) {
            assert_eq!(a.features_ms[0][..], b.features_ms[0][..6]);
        }
    }
}

//! Closed-form leakage, false-accept and detection calculators, plus the
//! fabrication experiment that checks the detection formula.

use ark_bn254::Fr;
use ark_std::UniformRand;
use rand::{seq::index, RngCore};
use serde::Serialize;

use crate::evidence::sampling::sample_positions;
use crate::{Error, Result};

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Bits a verifier with per-checkpoint false-accept rate `alpha` must learn:
/// `1 - h(alpha)`.
pub fn minimum_leakage(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must be in (0, 1), got {alpha}")));
    }
    Ok(1.0 - binary_entropy(alpha))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SessionBound {
    pub n_eff: f64,
    /// `log10(alpha^n_eff)`.
    pub log10_bound: f64,
}

/// Effective sample size `n (1 - r1) / (1 + r1)` and the session
/// false-accept bound `alpha^n_eff`.
pub fn session_false_accept(alpha: f64, n: u64, r1: f64) -> Result<SessionBound> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must be in (0, 1), got {alpha}")));
    }
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&r1) {
        return Err(Error::InvalidInput(format!("r1 must be in [0, 1), got {r1}")));
    }
    let n_eff = n as f64 * (1.0 - r1) / (1.0 + r1);
    Ok(SessionBound {
        n_eff,
        log10_bound: n_eff * alpha.log10(),
    })
}

fn check_detection(f: f64, k: u64, n: u64) -> Result<()> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidInput(format!("f must be in [0, 1], got {f}")));
    }
    if k == 0 || n == 0 {
        return Err(Error::InvalidInput("k and n must be at least 1".into()));
    }
    Ok(())
}

/// `1 - (1 - f)^(k n)`.
pub fn detection_probability(f: f64, k: u64, n: u64) -> Result<f64> {
    check_detection(f, k, n)?;
    Ok(-((k * n) as f64 * (-f).ln_1p()).exp_m1())
}

/// `log10((1 - f)^(k n))`, the miss probability on a log scale. Detection is
/// `1 - 10^x`, which `f64` cannot resolve once `x` drops below about -16.
pub fn log10_miss_probability(f: f64, k: u64, n: u64) -> Result<f64> {
    check_detection(f, k, n)?;
    Ok((k * n) as f64 * (1.0 - f).log10())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetectionExperiment {
    pub trials: usize,
    /// Fraction of trials where some checkpoint sampled a fabricated link.
    pub detection_rate: f64,
    /// Fraction of individual checkpoints that sampled only honest links.
    pub checkpoint_evasion_rate: f64,
}

/// Fabricates `round(f N)` links of each checkpoint's chain and samples `k`
/// positions per checkpoint from fresh random roots.
pub fn simulate_detection<R: RngCore>(
    f: f64,
    k: usize,
    n: usize,
    chain_length: usize,
    trials: usize,
    rng: &mut R,
) -> Result<DetectionExperiment> {
    check_detection(f, k as u64, n as u64)?;
    if trials == 0 {
        return Err(Error::InvalidInput("need at least one trial".into()));
    }
    let bad_count = (f * chain_length as f64).round() as usize;
    let mut fabricated = vec![false; chain_length + 1];
    let (mut detected, mut evaded) = (0usize, 0usize);
    for _ in 0..trials {
        let mut hit = false;
        for _ in 0..n {
            fabricated.iter_mut().for_each(|b| *b = false);
            for j in index::sample(rng, chain_length, bad_count) {
                fabricated[j + 1] = true;
            }
            let plan = sample_positions(Fr::rand(rng), k, chain_length)?;
            if plan.indices.iter().any(|&j| fabricated[j]) {
                hit = true;
            } else {
                evaded += 1;
            }
        }
        detected += hit as usize;
    }
    Ok(DetectionExperiment {
        trials,
        detection_rate: detected as f64 / trials as f64,
        checkpoint_evasion_rate: evaded as f64 / (trials * n) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn leakage_reference_values() {
        assert!(minimum_leakage(0.5).unwrap().abs() < 1e-15);
        // 1 - h(0.01) = 0.919206864...
        assert!((minimum_leakage(0.01).unwrap() - 0.9192068641040888).abs() < 1e-12);
        // 1 - h(0.058) = 0.680546...
        assert!((minimum_leakage(0.058).unwrap() - 0.6805460341905538).abs() < 1e-12);
        assert!(minimum_leakage(0.0).is_err());
        assert!(minimum_leakage(1.0).is_err());
    }

    #[test]
    fn session_bounds() {
        let b = session_false_accept(0.058, 120, 0.0).unwrap();
        assert_eq!(b.n_eff, 120.0);
        assert!(b.log10_bound < -148.0);
        let b = session_false_accept(0.329, 120, 0.111).unwrap();
        assert!((b.n_eff - 96.0216).abs() < 1e-3);
        assert!(b.log10_bound < -46.0);
        assert!(session_false_accept(0.5, 0, 0.1).is_err());
        assert!(session_false_accept(0.5, 3, 1.0).is_err());
    }

    #[test]
    fn detection_values() {
        assert_eq!(detection_probability(0.0, 2, 20).unwrap(), 0.0);
        assert!((detection_probability(0.1, 2, 20).unwrap() - 0.9852191170585654).abs() < 1e-12);
        // 0.9^240 = 1.0428e-11
        let x = log10_miss_probability(0.1, 2, 120).unwrap();
        assert!((x - (-10.981797734562027)).abs() < 1e-9);
        assert!(detection_probability(1.1, 2, 20).is_err());
    }

    #[test]
    fn fabrication_experiment_tracks_the_formula() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let e = simulate_detection(0.1, 2, 3, 1024, 2000, &mut rng).unwrap();
        assert!((e.detection_rate - detection_probability(0.1, 2, 3).unwrap()).abs() < 0.03);
        assert!((e.checkpoint_evasion_rate - 0.81).abs() < 0.02);
    }

    proptest! {
        #[test]
        fn leakage_in_unit_interval_and_symmetric(a in 1e-9f64..(1.0 - 1e-9)) {
            let l = minimum_leakage(a).unwrap();
            prop_assert!((0.0..=1.0).contains(&l));
            prop_assert!((l - minimum_leakage(1.0 - a).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn detection_monotone_in_n(f in 0.001f64..0.999, k in 1u64..8, n in 1u64..200) {
            prop_assert!(detection_probability(f, k, n + 1).unwrap() >= detection_probability(f, k, n).unwrap());
        }
    }
}

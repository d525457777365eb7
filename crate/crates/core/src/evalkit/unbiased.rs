//! Content effect of a classifier with the same accuracy on every cell,
//! which is nonzero only through sampling noise, and how sharply the
//! combined score reacts to it.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bootstrap::{percentile, replicate_rng};
use super::metrics::{combined_score, content_effect, GroupAccuracies};
use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnbiasedModelSpec {
    /// Probability of a correct answer, in [0, 1].
    pub accuracy_a: f64,
    pub n_per_group: u64,
    pub trials: usize,
    pub seed: u64,
}

impl UnbiasedModelSpec {
    fn validate(&self) -> Result<(), EvalError> {
        if !(0.0..=1.0).contains(&self.accuracy_a) {
            return Err(EvalError::InvalidArgument(format!("accuracy {} outside [0, 1]", self.accuracy_a)));
        }
        if self.n_per_group == 0 || self.trials == 0 {
            return Err(EvalError::InvalidArgument("n_per_group and trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// Measured accuracy and content effect of one simulated test set, percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub accuracy: f64,
    pub ce: f64,
}

/// Approximate expected CE of an unbiased model: every cell difference is
/// treated as normal with mean 0, whose absolute value has mean
/// `sigma * sqrt(2 / pi)`.
pub fn expected_ce_closed_form(a: f64, n: u64) -> f64 {
    200.0 * (a * (1.0 - a) / (PI * n as f64)).sqrt()
}

/// Mean of `|X|` for `X ~ N(mu, sigma^2)`.
pub fn folded_normal_mean(mu: f64, sigma: f64) -> f64 {
    let phi = |x: f64| 0.5 * libm::erfc(-x / std::f64::consts::SQRT_2);
    sigma * (2.0 / PI).sqrt() * (-mu * mu / (2.0 * sigma * sigma)).exp() + mu * (1.0 - 2.0 * phi(-mu / sigma))
}

fn trial(rng: &mut impl Rng, binomial: &Binomial, n: u64) -> Trial {
    let counts: [u64; 4] = std::array::from_fn(|_| binomial.sample(rng));
    let cell = |c: u64| 100.0 * c as f64 / n as f64;
    let groups = GroupAccuracies {
        a_vp: cell(counts[0]),
        a_vnp: cell(counts[1]),
        a_nvp: cell(counts[2]),
        a_nvnp: cell(counts[3]),
    };
    Trial {
        accuracy: 100.0 * counts.iter().sum::<u64>() as f64 / (4 * n) as f64,
        ce: content_effect(&groups).ce,
    }
}

/// Per trial, four independent Binomial(n, a) correct-counts.
pub fn simulate_unbiased_ce(spec: &UnbiasedModelSpec) -> Result<Vec<Trial>, EvalError> {
    spec.validate()?;
    let binomial =
        Binomial::new(spec.n_per_group, spec.accuracy_a).map_err(|e| EvalError::InvalidArgument(e.to_string()))?;
    Ok((0..spec.trials as u64)
        .into_par_iter()
        .map(|i| trial(&mut replicate_rng(spec.seed, i), &binomial, spec.n_per_group))
        .collect())
}

/// One simulated result with the true accuracy drawn from U(0.5, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub a: f64,
    pub accuracy: f64,
    pub ce: f64,
}

pub fn simulate_scatter(n_per_group: u64, trials: usize, seed: u64) -> Result<Vec<ScatterPoint>, EvalError> {
    if n_per_group == 0 {
        return Err(EvalError::InvalidArgument("n_per_group must be at least 1".into()));
    }
    (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = replicate_rng(seed, i);
            let a = rng.gen_range(0.5..=1.0);
            let binomial = Binomial::new(n_per_group, a).map_err(|e| EvalError::InvalidArgument(e.to_string()))?;
            let t = trial(&mut rng, &binomial, n_per_group);
            Ok(ScatterPoint {
                a,
                accuracy: t.accuracy,
                ce: t.ce,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub a: f64,
    pub ce_threshold: f64,
}

/// Grid point `j` is simulated under `seed + j`.
fn grid_trials(
    n_per_group: u64,
    grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<(f64, Vec<Trial>)>, EvalError> {
    grid.iter()
        .enumerate()
        .map(|(j, &a)| {
            let spec = UnbiasedModelSpec {
                accuracy_a: a,
                n_per_group,
                trials,
                seed: seed.wrapping_add(j as u64),
            };
            Ok((a, simulate_unbiased_ce(&spec)?))
        })
        .collect()
}

fn sorted_ce(trials: &[Trial]) -> Vec<f64> {
    let mut ce: Vec<f64> = trials.iter().map(|t| t.ce).collect();
    ce.sort_by(f64::total_cmp);
    ce
}

/// Empirical `quantile` of the unbiased model's CE at each accuracy. A
/// measured CE above it is unlikely to be sampling noise alone.
pub fn ce_significance_threshold(
    n_per_group: u64,
    accuracy_grid: &[f64],
    trials: usize,
    seed: u64,
    quantile: f64,
) -> Result<Vec<ThresholdRow>, EvalError> {
    Ok(grid_trials(n_per_group, accuracy_grid, trials, seed)?
        .into_iter()
        .map(|(a, t)| ThresholdRow {
            a,
            ce_threshold: percentile(&sorted_ce(&t), quantile),
        })
        .collect())
}

/// One row of the simulation table written by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationRow {
    pub a: f64,
    pub n_per_group: u64,
    pub trials: usize,
    pub mean_accuracy: f64,
    pub mean_ce: f64,
    pub closed_form_ce: f64,
    pub ce_threshold: f64,
}

/// Mean measured accuracy and CE, closed form and `quantile` threshold per
/// accuracy; same seeding as [`ce_significance_threshold`].
pub fn summarize_simulation(
    n_per_group: u64,
    accuracy_grid: &[f64],
    trials: usize,
    seed: u64,
    quantile: f64,
) -> Result<Vec<SimulationRow>, EvalError> {
    Ok(grid_trials(n_per_group, accuracy_grid, trials, seed)?
        .into_iter()
        .map(|(a, t)| {
            let mean = |f: fn(&Trial) -> f64| t.iter().map(f).sum::<f64>() / t.len() as f64;
            SimulationRow {
                a,
                n_per_group,
                trials,
                mean_accuracy: mean(|t| t.accuracy),
                mean_ce: mean(|t| t.ce),
                closed_form_ce: expected_ce_closed_form(a, n_per_group),
                ce_threshold: percentile(&sorted_ce(&t), quantile),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleFlip {
    pub n_total: u64,
    pub cs_before: f64,
    pub cs_after: f64,
    pub drop: f64,
    pub accuracy_after: f64,
    pub ce_after: f64,
}

/// A perfect model on `n_total / 4` samples per cell gets one answer wrong.
pub fn cs_single_flip(n_total: u64) -> Result<SingleFlip, EvalError> {
    if n_total == 0 || n_total % 4 != 0 {
        return Err(EvalError::InvalidArgument(format!("n_total {n_total} is not a positive multiple of 4")));
    }
    let per_group = (n_total / 4) as f64;
    let flipped = 100.0 * (per_group - 1.0) / per_group;
    let ce = content_effect(&GroupAccuracies {
        a_vp: flipped,
        a_vnp: 100.0,
        a_nvp: 100.0,
        a_nvnp: 100.0,
    })
    .ce;
    let accuracy = 100.0 * (n_total - 1) as f64 / n_total as f64;
    let cs_before = combined_score(100.0, 0.0);
    let cs_after = combined_score(accuracy, ce);
    Ok(SingleFlip {
        n_total,
        cs_before,
        cs_after,
        drop: cs_before - cs_after,
        accuracy_after: accuracy,
        ce_after: ce,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityPoint {
    pub accuracy: f64,
    pub ce: f64,
    pub cs: f64,
}

/// Combined score over `0..=ce_max` in `step` increments for each accuracy.
pub fn sensitivity_curve(accuracies: &[f64], ce_max: f64, step: f64) -> Result<Vec<SensitivityPoint>, EvalError> {
    if !(step > 0.0) || ce_max < 0.0 {
        return Err(EvalError::InvalidArgument("need step > 0 and ce_max >= 0".into()));
    }
    let steps = (ce_max / step).round() as usize;
    Ok(accuracies
        .iter()
        .flat_map(|&accuracy| {
            (0..=steps).map(move |i| {
                let ce = i as f64 * step;
                SensitivityPoint {
                    accuracy,
                    ce,
                    cs: combined_score(accuracy, ce),
                }
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(a: f64, trials: usize) -> UnbiasedModelSpec {
        UnbiasedModelSpec {
            accuracy_a: a,
            n_per_group: 48,
            trials,
            seed: 11,
        }
    }

    #[test]
    fn closed_form_values() {
        assert!((expected_ce_closed_form(0.98, 48) - 2.28).abs() <= 0.02);
        assert_eq!(expected_ce_closed_form(1.0, 17), 0.0);
        assert!((expected_ce_closed_form(0.5, 48) - 8.14).abs() <= 0.01);
    }

    #[test]
    fn perfect_model_has_no_effect() {
        assert!(simulate_unbiased_ce(&spec(1.0, 200)).unwrap().iter().all(|t| t.ce == 0.0 && t.accuracy == 100.0));
    }

    #[test]
    fn reproducible_under_seed() {
        assert_eq!(simulate_unbiased_ce(&spec(0.8, 300)).unwrap(), simulate_unbiased_ce(&spec(0.8, 300)).unwrap());
    }

    #[test]
    fn half_accuracy_mean_near_closed_form() {
        let t = simulate_unbiased_ce(&spec(0.5, 20_000)).unwrap();
        let mean = t.iter().map(|t| t.ce).sum::<f64>() / t.len() as f64;
        assert!((mean - expected_ce_closed_form(0.5, 48)).abs() < 0.1, "mean {mean}");
    }

    #[test]
    fn folded_normal_at_zero_mean() {
        let sigma = 2.5;
        assert!((folded_normal_mean(0.0, sigma) - sigma * (2.0 / PI).sqrt()).abs() < 1e-12);
        // Far from zero the fold does nothing.
        assert!((folded_normal_mean(50.0, 1.0) - 50.0).abs() < 1e-9);
    }

    #[test]
    fn folded_normal_matches_simulated_cell_gap() {
        // One cell difference of the unbiased model at a = 0.5.
        let n = 48;
        let s = spec(0.5, 40_000);
        let binomial = Binomial::new(n, 0.5).unwrap();
        let gaps: f64 = (0..s.trials as u64)
            .map(|i| {
                let mut rng = replicate_rng(s.seed, i);
                let x = binomial.sample(&mut rng) as f64;
                let y = binomial.sample(&mut rng) as f64;
                100.0 * (x - y).abs() / n as f64
            })
            .sum();
        let sigma = 100.0 * (2.0 * 0.25 / n as f64).sqrt();
        assert!((gaps / s.trials as f64 - folded_normal_mean(0.0, sigma)).abs() < 0.15);
    }

    #[test]
    fn thresholds() {
        let grid = [0.6, 0.7, 0.8, 0.9, 1.0];
        let t95 = ce_significance_threshold(48, &grid, 20_000, 5, 0.95).unwrap();
        let t100 = ce_significance_threshold(48, &grid, 20_000, 5, 1.0).unwrap();
        for (a, b) in t95.iter().zip(&t100) {
            assert!(b.ce_threshold >= a.ce_threshold);
        }
        assert_eq!(t95.last().unwrap().ce_threshold, 0.0);
        for w in t95.windows(2) {
            assert!(w[1].ce_threshold <= w[0].ce_threshold, "{w:?}");
        }
    }

    #[test]
    fn single_flip_thousand() {
        let f = cs_single_flip(1000).unwrap();
        assert_eq!(f.cs_before, 100.0);
        assert!((f.cs_after - 84.49).abs() <= 0.05, "{}", f.cs_after);
        assert!(f.drop > 15.0);
        assert!((f.ce_after - 0.2).abs() < 1e-9);
        assert!((f.accuracy_after - 99.9).abs() < 1e-9);
    }

    #[test]
    fn single_flip_four() {
        // One sample per cell: the flipped cell drops to 0.
        let f = cs_single_flip(4).unwrap();
        assert_eq!(f.accuracy_after, 75.0);
        assert_eq!(f.ce_after, 50.0);
        assert!((f.cs_after - 75.0 / (1.0 + 51f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn single_flip_vanishes_for_large_n() {
        assert!(cs_single_flip(4_000_000).unwrap().drop < 0.01);
        assert!(cs_single_flip(10).is_err());
    }

    #[test]
    fn curve_is_monotone() {
        let c = sensitivity_curve(&[90.0], 10.0, 0.5).unwrap();
        assert_eq!(c.len(), 21);
        assert!(c.windows(2).all(|w| w[1].cs < w[0].cs));
    }
}

//! Percentile bootstrap over samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::pipeline::{Prediction, Syllogism};

use super::metrics::{align, Scored};
use super::EvalError;

pub const DEFAULT_BOOTSTRAP: usize = 10_000;

/// Generator for replicate `i`: one ChaCha stream per replicate, so results
/// do not depend on thread scheduling.
pub(crate) fn replicate_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

/// Linear-interpolated quantile of sorted data, `q` in [0, 1].
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty data");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// 95% percentile interval of `metric` over `b` resamples of the aligned
/// samples, drawn with replacement. Resamples on which the metric is
/// undefined (a validity/plausibility cell left empty) are skipped.
pub fn bootstrap_ci<F>(
    metric: F,
    preds: &[Prediction],
    gold: &[Syllogism],
    b: usize,
    seed: u64,
) -> Result<(f64, f64), EvalError>
where
    F: Fn(&[Scored]) -> Result<f64, EvalError> + Sync,
{
    if b < 100 {
        return Err(EvalError::InvalidArgument(format!("bootstrap needs at least 100 resamples, got {b}")));
    }
    let items = align(preds, gold)?;
    if items.is_empty() {
        return Err(EvalError::InvalidArgument("no samples to resample".into()));
    }
    let n = items.len();
    let mut values: Vec<f64> = (0..b as u64)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = replicate_rng(seed, i);
            let sample: Vec<Scored> = (0..n).map(|_| items[rng.gen_range(0..n)]).collect();
            metric(&sample).ok()
        })
        .collect();
    if values.is_empty() {
        return Err(EvalError::InvalidArgument("metric undefined on every resample".into()));
    }
    values.sort_by(f64::total_cmp);
    Ok((percentile(&values, 0.025), percentile(&values, 0.975)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalkit::metrics::Metric;
    use crate::pipeline::Diagnostics;

    fn data(n: usize, correct_every: usize) -> (Vec<Prediction>, Vec<Syllogism>) {
        let gold: Vec<Syllogism> = (0..n)
            .map(|i| Syllogism {
                id: i.to_string(),
                premises: vec!["p".into()],
                conclusion: "c".into(),
                label_valid: Some(i % 2 == 0),
                label_plausible: Some(i % 4 < 2),
                gold_relevant: None,
                language: "en".into(),
            })
            .collect();
        let preds = gold
            .iter()
            .enumerate()
            .map(|(i, g)| Prediction {
                id: g.id.clone(),
                valid: g.label_valid.unwrap() ^ (i % correct_every == 0),
                relevant: vec![],
                diagnostics: Diagnostics::default(),
            })
            .collect();
        (preds, gold)
    }

    fn acc(s: &[Scored]) -> Result<f64, EvalError> {
        Metric::Accuracy.compute(s)
    }

    #[test]
    fn percentile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(percentile(&v, 0.5), 3.0);
        assert_eq!(percentile(&v, 0.125), 1.5);
        assert_eq!(percentile(&v, 1.0), 5.0);
    }

    #[test]
    fn constant_metric_is_degenerate() {
        let (p, g) = data(40, 3);
        assert_eq!(bootstrap_ci(|_| Ok(42.0), &p, &g, 500, 1).unwrap(), (42.0, 42.0));
    }

    #[test]
    fn deterministic_under_seed() {
        let (p, g) = data(60, 5);
        let a = bootstrap_ci(acc, &p, &g, 1000, 9).unwrap();
        assert_eq!(a, bootstrap_ci(acc, &p, &g, 1000, 9).unwrap());
        assert!(a.0 <= a.1);
    }

    #[test]
    fn too_few_resamples_rejected() {
        let (p, g) = data(8, 3);
        assert!(bootstrap_ci(acc, &p, &g, 50, 0).is_err());
    }

    #[test]
    fn width_shrinks_with_n() {
        let width = |n| {
            let (p, g) = data(n, 5);
            let (lo, hi) = bootstrap_ci(acc, &p, &g, 2000, 3).unwrap();
            hi - lo
        };
        let (w1, w2, w3) = (width(100), width(400), width(1600));
        // Quadrupling n should roughly halve the width.
        for (a, b) in [(w1, w2), (w2, w3)] {
            let ratio = a / b;
            assert!((1.6..2.5).contains(&ratio), "ratio {ratio}");
        }
    }
}

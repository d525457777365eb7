//! Validity accuracy, premise F1, content effect and combined score.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::pipeline::{Prediction, Syllogism};

use super::bootstrap::bootstrap_ci;
use super::EvalError;

/// Accuracy (percent) per validity/plausibility cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupAccuracies {
    pub a_vp: f64,
    pub a_vnp: f64,
    pub a_nvp: f64,
    pub a_nvnp: f64,
}

impl GroupAccuracies {
    pub fn new(a_vp: f64, a_vnp: f64, a_nvp: f64, a_nvnp: f64) -> Result<Self, EvalError> {
        let g = Self { a_vp, a_vnp, a_nvp, a_nvnp };
        if [a_vp, a_vnp, a_nvp, a_nvnp].iter().any(|a| !(0.0..=100.0).contains(a)) {
            return Err(EvalError::InvalidArgument(format!("group accuracies must lie in [0, 100]: {g:?}")));
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCounts {
    pub valid_plausible: usize,
    pub valid_implausible: usize,
    pub invalid_plausible: usize,
    pub invalid_implausible: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContentEffect {
    pub c_intra: f64,
    pub c_inter: f64,
    pub ce: f64,
}

/// Mean absolute accuracy gap within and across validity classes.
pub fn content_effect(g: &GroupAccuracies) -> ContentEffect {
    let c_intra = ((g.a_vp - g.a_vnp).abs() + (g.a_nvp - g.a_nvnp).abs()) / 2.0;
    let c_inter = ((g.a_vp - g.a_nvp).abs() + (g.a_vnp - g.a_nvnp).abs()) / 2.0;
    ContentEffect {
        c_intra,
        c_inter,
        ce: (c_intra + c_inter) / 2.0,
    }
}

/// Accuracy discounted by content effect, both in percentage points.
pub fn combined_score(accuracy: f64, ce: f64) -> f64 {
    accuracy / (1.0 + (1.0 + ce).ln())
}

/// A prediction next to its gold record.
#[derive(Debug, Clone, Copy)]
pub struct Scored<'a> {
    pub pred: &'a Prediction,
    pub gold: &'a Syllogism,
}

/// Pairs predictions with gold records by id, in gold order. Every id must
/// occur exactly once on each side.
pub fn align<'a>(preds: &'a [Prediction], gold: &'a [Syllogism]) -> Result<Vec<Scored<'a>>, EvalError> {
    let mut by_id: HashMap<&str, &Prediction> = HashMap::with_capacity(preds.len());
    for p in preds {
        if by_id.insert(&p.id, p).is_some() {
            return Err(EvalError::IdMismatch(format!("duplicate prediction id `{}`", p.id)));
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(gold.len());
    for g in gold {
        if !seen.insert(g.id.as_str()) {
            return Err(EvalError::IdMismatch(format!("duplicate gold id `{}`", g.id)));
        }
        let pred = by_id
            .get(g.id.as_str())
            .ok_or_else(|| EvalError::IdMismatch(format!("no prediction for `{}`", g.id)))?;
        out.push(Scored { pred, gold: g });
    }
    if let Some(extra) = preds.iter().find(|p| !seen.contains(p.id.as_str())) {
        return Err(EvalError::IdMismatch(format!("prediction `{}` has no gold record", extra.id)));
    }
    Ok(out)
}

fn label_valid(s: &Scored) -> Result<bool, EvalError> {
    s.gold
        .label_valid
        .ok_or_else(|| EvalError::MissingLabels(format!("`{}` has no validity label", s.gold.id)))
}

fn accuracy_of(items: &[Scored]) -> Result<f64, EvalError> {
    if items.is_empty() {
        return Err(EvalError::InvalidArgument("no samples to score".into()));
    }
    let mut correct = 0usize;
    for s in items {
        correct += usize::from(s.pred.valid == label_valid(s)?);
    }
    Ok(100.0 * correct as f64 / items.len() as f64)
}

fn group_accuracies_of(items: &[Scored]) -> Result<(GroupAccuracies, GroupCounts), EvalError> {
    // (correct, total) for vp, vnp, nvp, nvnp.
    let mut cells = [(0usize, 0usize); 4];
    for s in items {
        let valid = label_valid(s)?;
        let plausible = s
            .gold
            .label_plausible
            .ok_or_else(|| EvalError::MissingLabels(format!("`{}` has no plausibility label", s.gold.id)))?;
        let cell = &mut cells[usize::from(!valid) * 2 + usize::from(!plausible)];
        cell.0 += usize::from(s.pred.valid == valid);
        cell.1 += 1;
    }
    const NAMES: [&str; 4] = ["valid/plausible", "valid/implausible", "invalid/plausible", "invalid/implausible"];
    let mut acc = [0.0; 4];
    for (i, (correct, total)) in cells.iter().enumerate() {
        if *total == 0 {
            return Err(EvalError::EmptyGroup(NAMES[i]));
        }
        acc[i] = 100.0 * *correct as f64 / *total as f64;
    }
    let counts = GroupCounts {
        valid_plausible: cells[0].1,
        valid_implausible: cells[1].1,
        invalid_plausible: cells[2].1,
        invalid_implausible: cells[3].1,
    };
    Ok((GroupAccuracies::new(acc[0], acc[1], acc[2], acc[3])?, counts))
}

/// Micro-averaged F1 over every (sample, premise) decision. With no
/// relevant premise predicted or gold anywhere the score is 100.
fn premise_f1_of(items: &[Scored]) -> Result<f64, EvalError> {
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for s in items {
        let gold: BTreeSet<usize> = s
            .gold
            .gold_relevant
            .as_ref()
            .ok_or_else(|| EvalError::MissingLabels(format!("`{}` has no relevant-premise labels", s.gold.id)))?
            .iter()
            .copied()
            .collect();
        let pred: BTreeSet<usize> = s.pred.relevant.iter().copied().collect();
        tp += pred.intersection(&gold).count();
        fp += pred.difference(&gold).count();
        fn_ += gold.difference(&pred).count();
    }
    if tp + fp + fn_ == 0 {
        return Ok(100.0);
    }
    Ok(100.0 * 2.0 * tp as f64 / (2 * tp + fp + fn_) as f64)
}

fn has_relevance(items: &[Scored]) -> Result<bool, EvalError> {
    let labelled = items.iter().filter(|s| s.gold.gold_relevant.is_some()).count();
    match labelled {
        0 => Ok(false),
        n if n == items.len() => Ok(true),
        _ => Err(EvalError::MissingLabels("relevant-premise labels on only some samples".into())),
    }
}

/// Combined score of a scored set. When relevance labels are present the
/// numerator is the mean of accuracy and premise F1.
fn combined_score_of(items: &[Scored]) -> Result<f64, EvalError> {
    let acc = accuracy_of(items)?;
    let numerator = if has_relevance(items)? {
        (acc + premise_f1_of(items)?) / 2.0
    } else {
        acc
    };
    let (g, _) = group_accuracies_of(items)?;
    Ok(combined_score(numerator, content_effect(&g).ce))
}

/// Validity accuracy in percent.
pub fn accuracy(preds: &[Prediction], gold: &[Syllogism]) -> Result<f64, EvalError> {
    accuracy_of(&align(preds, gold)?)
}

pub fn group_accuracies(preds: &[Prediction], gold: &[Syllogism]) -> Result<GroupAccuracies, EvalError> {
    group_accuracies_of(&align(preds, gold)?).map(|(g, _)| g)
}

/// Micro-averaged premise-relevance F1 in percent.
pub fn premise_f1(preds: &[Prediction], gold: &[Syllogism]) -> Result<f64, EvalError> {
    premise_f1_of(&align(preds, gold)?)
}

/// Metrics that can be bootstrapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Accuracy,
    PremiseF1,
    ContentEffect,
    CombinedScore,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::PremiseF1 => "premise_f1",
            Metric::ContentEffect => "content_effect",
            Metric::CombinedScore => "combined_score",
        }
    }

    pub fn compute(self, items: &[Scored]) -> Result<f64, EvalError> {
        match self {
            Metric::Accuracy => accuracy_of(items),
            Metric::PremiseF1 => premise_f1_of(items),
            Metric::ContentEffect => group_accuracies_of(items).map(|(g, _)| content_effect(&g).ce),
            Metric::CombinedScore => combined_score_of(items),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub accuracy: f64,
    pub premise_f1: Option<f64>,
    pub c_intra: f64,
    pub c_inter: f64,
    pub content_effect: f64,
    pub combined_score: f64,
    /// 95% percentile intervals; empty when bootstrapping is off.
    pub ci: BTreeMap<String, (f64, f64)>,
    pub group_counts: BTreeMap<String, usize>,
}

impl MetricReport {
    /// `acc=… f1=… ce=… cs=…` with `f1=-` when relevance is not scored.
    pub fn summary_line(&self) -> String {
        let f1 = self.premise_f1.map_or("-".to_string(), |f| format!("{f:.2}"));
        format!(
            "acc={:.2} f1={f1} ce={:.2} cs={:.2}",
            self.accuracy, self.content_effect, self.combined_score
        )
    }
}

/// Full report; `bootstrap` resamples (0 to skip intervals) under `seed`.
pub fn evaluate(
    preds: &[Prediction],
    gold: &[Syllogism],
    bootstrap: usize,
    seed: u64,
) -> Result<MetricReport, EvalError> {
    let items = align(preds, gold)?;
    let accuracy = accuracy_of(&items)?;
    let with_f1 = has_relevance(&items)?;
    let premise_f1 = if with_f1 { Some(premise_f1_of(&items)?) } else { None };
    let (groups, counts) = group_accuracies_of(&items)?;
    let ce = content_effect(&groups);
    let numerator = premise_f1.map_or(accuracy, |f1| (accuracy + f1) / 2.0);

    let mut ci = BTreeMap::new();
    if bootstrap > 0 {
        let mut metrics = vec![Metric::Accuracy, Metric::ContentEffect, Metric::CombinedScore];
        if with_f1 {
            metrics.push(Metric::PremiseF1);
        }
        for m in metrics {
            ci.insert(m.name().to_string(), bootstrap_ci(|s: &[Scored]| m.compute(s), preds, gold, bootstrap, seed)?);
        }
    }
    let group_counts = [
        ("valid_plausible", counts.valid_plausible),
        ("valid_implausible", counts.valid_implausible),
        ("invalid_plausible", counts.invalid_plausible),
        ("invalid_implausible", counts.invalid_implausible),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();

    Ok(MetricReport {
        accuracy,
        premise_f1,
        c_intra: ce.c_intra,
        c_inter: ce.c_inter,
        content_effect: ce.ce,
        combined_score: combined_score(numerator, ce.ce),
        ci,
        group_counts,
    })
}

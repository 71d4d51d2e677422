//! Recommending transformations for a new dataset: prune candidates with
//! expert rules, score the rest with the forest, rank by the probability of
//! a positive impact. The classifier itself runs only once, to measure the
//! untransformed dataset.

use std::fmt;
use std::fmt::Write as _;

use crate::classifiers::{cross_validate, ClassifierKind, Learner, Measure, DEFAULT_FOLDS};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::exec;
use crate::metadb::{feature_row, ResponseClass};
use crate::metafeatures::{compute_meta_features, delta, N_MODIFIABLE};
use crate::metalearner::ForestModel;
use crate::transforms::{apply, enumerate_applicable, TransformKind, TransformationSpec};

/// Which classifiers a rule covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleTarget {
    Any,
    Tree,
    NaiveBayes,
    /// Every neighbour count, or one specific count.
    KNearest(Option<usize>),
    Logistic,
}

impl RuleTarget {
    pub fn matches(&self, algorithm: ClassifierKind) -> bool {
        match (self, algorithm) {
            (RuleTarget::Any, _) => true,
            (RuleTarget::Tree, ClassifierKind::DecisionTree) => true,
            (RuleTarget::NaiveBayes, ClassifierKind::NaiveBayes) => true,
            (RuleTarget::KNearest(None), ClassifierKind::KNearest(_)) => true,
            (RuleTarget::KNearest(Some(a)), ClassifierKind::KNearest(b)) => *a == b,
            (RuleTarget::Logistic, ClassifierKind::LogisticRegression) => true,
            _ => false,
        }
    }
}

impl fmt::Display for RuleTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleTarget::Any => f.write_str("any"),
            RuleTarget::Tree => f.write_str("tree"),
            RuleTarget::NaiveBayes => f.write_str("nb"),
            RuleTarget::KNearest(None) => f.write_str("knn"),
            RuleTarget::KNearest(Some(k)) => write!(f, "knn:{k}"),
            RuleTarget::Logistic => f.write_str("logistic"),
        }
    }
}

/// Excludes one transformation kind for the matching classifiers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpertRule {
    pub target: RuleTarget,
    pub kind: TransformKind,
    pub note: String,
}

impl fmt::Display for ExpertRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exclude {} {}", self.target, self.kind)?;
        if !self.note.is_empty() {
            write!(f, " # {}", self.note)?;
        }
        Ok(())
    }
}

/// Scale changes do not alter trees, distance-normalizing neighbours or
/// internally standardized logistic regression.
pub fn default_rules() -> Vec<ExpertRule> {
    let note = "scale-invariant learner";
    [RuleTarget::Tree, RuleTarget::KNearest(None), RuleTarget::Logistic]
        .into_iter()
        .flat_map(|t| {
            [TransformKind::Normalize, TransformKind::Standardize].map(|k| ExpertRule {
                target: t.clone(),
                kind: k,
                note: note.to_string(),
            })
        })
        .collect()
}

/// Parses `exclude <algorithm|any> <kind> [# note]` lines. Blank lines and
/// lines starting with `#` are ignored.
pub fn parse_rules(text: &str) -> Result<Vec<ExpertRule>> {
    let mut rules = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let (body, note) = match raw.split_once('#') {
            Some((b, n)) => (b, n.trim()),
            None => (raw, ""),
        };
        let words: Vec<&str> = body.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        let err = |message: String| Error::Rules { line: line_no, message };
        let [action, target, kind] = words[..] else {
            return Err(err(format!("expected 3 words, found {}", words.len())));
        };
        if action != "exclude" {
            return Err(err(format!("unknown action `{action}`")));
        }
        let target = match target {
            "any" => RuleTarget::Any,
            "knn" => RuleTarget::KNearest(None),
            other => match other.parse::<ClassifierKind>() {
                Ok(ClassifierKind::DecisionTree) => RuleTarget::Tree,
                Ok(ClassifierKind::NaiveBayes) => RuleTarget::NaiveBayes,
                Ok(ClassifierKind::KNearest(k)) => RuleTarget::KNearest(Some(k)),
                Ok(ClassifierKind::LogisticRegression) => RuleTarget::Logistic,
                Err(_) => return Err(err(format!("unknown algorithm `{other}`"))),
            },
        };
        let kind = TransformKind::from_token(kind).ok_or_else(|| err(format!("unknown transformation `{kind}`")))?;
        rules.push(ExpertRule { target, kind, note: note.to_string() });
    }
    Ok(rules)
}

/// Candidates not excluded by any rule for `algorithm`, in input order.
pub fn prune(rules: &[ExpertRule], algorithm: ClassifierKind, candidates: &[TransformationSpec]) -> Vec<TransformationSpec> {
    candidates
        .iter()
        .filter(|c| !rules.iter().any(|r| r.kind == c.kind && r.target.matches(algorithm)))
        .cloned()
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Recommendation {
    pub spec: TransformationSpec,
    pub p_positive: f64,
    pub p_negative: f64,
    pub p_zero: f64,
    pub predicted: ResponseClass,
    pub rank: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct RankOptions {
    pub seed: u64,
    pub folds: usize,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions { seed: 42, folds: DEFAULT_FOLDS }
    }
}

pub fn rank_transformations(
    model: &ForestModel,
    rules: &[ExpertRule],
    algorithm: ClassifierKind,
    ds: &Dataset,
    seed: u64,
) -> Result<Vec<Recommendation>> {
    rank_with_learner(model, rules, algorithm, &algorithm, ds, &RankOptions { seed, ..Default::default() })
}

/// As `rank_transformations`, measuring base performance with `learner`.
pub fn rank_with_learner(
    model: &ForestModel,
    rules: &[ExpertRule],
    algorithm: ClassifierKind,
    learner: &dyn Learner,
    ds: &Dataset,
    opts: &RankOptions,
) -> Result<Vec<Recommendation>> {
    if let Some(a) = model.algorithm {
        if a != algorithm {
            return Err(Error::SchemaMismatch(format!("model trained for `{a}`, not `{algorithm}`")));
        }
    }
    let measure = model.measure.unwrap_or(Measure::Accuracy);
    let base_mf = compute_meta_features(ds);
    let candidates = prune(rules, algorithm, &enumerate_applicable(ds));
    if candidates.is_empty() {
        return Ok(Vec::new());
    }
    let base_perf = cross_validate(learner, ds, opts.folds, opts.seed)?.get(measure);
    let base = &base_mf.modifiable()[..N_MODIFIABLE];

    let scored = exec::map(&candidates, |spec| -> Result<(TransformationSpec, [f64; 3], ResponseClass)> {
        let after = compute_meta_features(&apply(spec, ds)?.dataset);
        let d = delta(&base_mf, &after)?;
        let row = feature_row(base, &d.deltas[..N_MODIFIABLE], base_perf);
        let (class, p) = model.predict(&row)?;
        Ok((spec.clone(), p, class))
    });
    let mut scored = scored.into_iter().collect::<Result<Vec<_>>>()?;
    sort_by_positive(&mut scored);
    Ok(scored
        .into_iter()
        .enumerate()
        .map(|(i, (spec, p, predicted))| Recommendation {
            spec,
            p_positive: p[0],
            p_negative: p[1],
            p_zero: p[2],
            predicted,
            rank: i + 1,
        })
        .collect())
}

/// Positive probability descending, canonical spec text ascending.
pub fn sort_by_positive<T>(items: &mut [(TransformationSpec, [f64; 3], T)]) {
    items.sort_by(|a, b| b.1[0].total_cmp(&a.1[0]).then_with(|| a.0.to_string().cmp(&b.0.to_string())));
}

/// Delimited table: rank, spec, probabilities, predicted class.
pub fn recommendations_table(recs: &[Recommendation]) -> String {
    let mut s = String::from("rank,spec,p_pos,p_neg,p_zero,predicted_class\n");
    for r in recs {
        let spec = r.spec.to_string();
        let spec = if spec.contains(',') { format!("\"{spec}\"") } else { spec };
        let _ = writeln!(s, "{},{spec},{},{},{},{}", r.rank, r.p_positive, r.p_negative, r.p_zero, r.predicted);
    }
    s
}

//! Measuring how well predicted impacts match real impacts: tri-class
//! confusion accounting, per-dataset accuracy measures, top-K position
//! accuracy against a random picker, gain-based ranking quality and impact
//! distributions.

mod baseline;
mod confusion;
mod distribution;
mod gain;
mod positions;
mod report;

pub use baseline::{binomial_significance, expected_tnp, expected_tp, random_pick_probability};
pub use confusion::{
    corpus_measures, dataset_measures, record_confusion, triclass_confusion, CorpusMeasures, DatasetMeasures,
    TriClassConfusion,
};
pub use distribution::{impact_distribution, uniform_distance, DistributionRecord, GroupBy};
pub use gain::{dcg, gain_report, ndcg, ndcg_of_order, production_order, GainReport, GainRow};
pub use report::{build_report, distribution_csv, EvaluationReport, DEFAULT_K_MAX};
pub use positions::{
    baseline_matrix, evaluation_ordering, lk_matrix, BaselineCell, BaselineMatrix, LKCell, LKMatrix,
};

use crate::metadb::{MetaDatabase, ResponseClass};
use crate::metalearner::LoovReport;

/// One transformation of one dataset: what the model said and what happened.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalEntry {
    pub spec: String,
    pub p_positive: f64,
    pub predicted: ResponseClass,
    pub real: ResponseClass,
    /// Signed relative performance change.
    pub impact: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetEvalRecord {
    pub dataset: String,
    pub entries: Vec<EvalEntry>,
}

impl DatasetEvalRecord {
    /// Number of transformations, `|T_d|`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Transformations with a real positive impact.
    pub fn real_positives(&self) -> usize {
        self.entries.iter().filter(|e| e.real == ResponseClass::Positive).count()
    }

    /// Transformations predicted positive.
    pub fn predicted_positives(&self) -> usize {
        self.entries.iter().filter(|e| e.predicted == ResponseClass::Positive).count()
    }
}

/// Per-dataset records from a leave-one-dataset-out run, in fold order.
pub fn records_from_loov(report: &LoovReport) -> Vec<DatasetEvalRecord> {
    report
        .folds
        .iter()
        .map(|f| DatasetEvalRecord {
            dataset: f.dataset.clone(),
            entries: f
                .predictions
                .iter()
                .map(|p| EvalEntry {
                    spec: p.transformation.to_string(),
                    p_positive: p.proba[0],
                    predicted: p.predicted,
                    real: p.real,
                    impact: p.impact,
                })
                .collect(),
        })
        .collect()
}

/// Share of meta-instances with a real positive impact.
pub fn positive_rate(db: &MetaDatabase) -> f64 {
    if db.rows.is_empty() {
        return 0.0;
    }
    db.rows.iter().filter(|r| r.response_class == ResponseClass::Positive).count() as f64 / db.rows.len() as f64
}

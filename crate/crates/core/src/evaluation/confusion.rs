//! Weighted 3x3 predicted-vs-real matrices and the per-dataset measures
//! derived from them.

use super::DatasetEvalRecord;
use crate::metadb::ResponseClass;

/// Cells indexed `[predicted][real]` in positive, negative, zero order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TriClassConfusion {
    pub cells: [[f64; 3]; 3],
}

impl TriClassConfusion {
    fn at(&self, predicted: ResponseClass, real: ResponseClass) -> f64 {
        self.cells[predicted.index()][real.index()]
    }

    pub fn tp(&self) -> f64 {
        self.at(ResponseClass::Positive, ResponseClass::Positive)
    }
    pub fn fp_n(&self) -> f64 {
        self.at(ResponseClass::Positive, ResponseClass::Negative)
    }
    pub fn fp_0(&self) -> f64 {
        self.at(ResponseClass::Positive, ResponseClass::Zero)
    }
    pub fn fn_p(&self) -> f64 {
        self.at(ResponseClass::Negative, ResponseClass::Positive)
    }
    pub fn tn(&self) -> f64 {
        self.at(ResponseClass::Negative, ResponseClass::Negative)
    }
    pub fn fn_0(&self) -> f64 {
        self.at(ResponseClass::Negative, ResponseClass::Zero)
    }
    pub fn f0_p(&self) -> f64 {
        self.at(ResponseClass::Zero, ResponseClass::Positive)
    }
    pub fn f0_n(&self) -> f64 {
        self.at(ResponseClass::Zero, ResponseClass::Negative)
    }
    pub fn t0(&self) -> f64 {
        self.at(ResponseClass::Zero, ResponseClass::Zero)
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().flatten().sum()
    }

    pub fn add(&mut self, other: &TriClassConfusion) {
        for i in 0..3 {
            for j in 0..3 {
                self.cells[i][j] += other.cells[i][j];
            }
        }
    }
}

/// One dataset's matrix; each transformation weighs `1/|T_d|`.
pub fn record_confusion(record: &DatasetEvalRecord) -> TriClassConfusion {
    let mut m = TriClassConfusion::default();
    if record.is_empty() {
        return m;
    }
    let w = 1.0 / record.len() as f64;
    for e in &record.entries {
        m.cells[e.predicted.index()][e.real.index()] += w;
    }
    m
}

pub fn triclass_confusion(records: &[DatasetEvalRecord]) -> TriClassConfusion {
    let mut m = TriClassConfusion::default();
    for r in records {
        m.add(&record_confusion(r));
    }
    m
}

/// Per-dataset measures; `None` where a measure is undefined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DatasetMeasures {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub overall_recall: Option<f64>,
    pub g_measure: Option<f64>,
    /// Precision half-terms dropped for a zero denominator (0, 1 or 2).
    pub dropped_precision_terms: usize,
}

pub fn dataset_measures(record: &DatasetEvalRecord) -> DatasetMeasures {
    measures_of(&record_confusion(record))
}

pub(crate) fn measures_of(m: &TriClassConfusion) -> DatasetMeasures {
    let inner = m.tp() + m.fn_p() + m.fp_n() + m.tn();
    let accuracy = (inner > 0.0).then(|| (m.tp() + m.tn()) / inner);

    let halves: Vec<f64> = [(m.tp(), m.tp() + m.fp_n()), (m.tn(), m.tn() + m.fn_p())]
        .into_iter()
        .filter(|&(_, d)| d > 0.0)
        .map(|(n, d)| n / d)
        .collect();
    let precision = (!halves.is_empty()).then(|| halves.iter().sum::<f64>() / halves.len() as f64);

    let or_den = inner + m.f0_p() + m.f0_n();
    let overall_recall = (or_den > 0.0).then(|| inner / or_den);
    let g_measure = match (accuracy, overall_recall) {
        (Some(a), Some(o)) if a + o > 0.0 => Some(2.0 * a * o / (a + o)),
        (Some(_), Some(_)) => Some(0.0),
        _ => None,
    };
    DatasetMeasures { accuracy, precision, overall_recall, g_measure, dropped_precision_terms: 2 - halves.len() }
}

/// Means of the per-dataset measures over the datasets where each is defined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorpusMeasures {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub overall_recall: Option<f64>,
    pub g_measure: Option<f64>,
    pub n_accuracy: usize,
    pub n_precision: usize,
    pub n_overall_recall: usize,
    pub n_g_measure: usize,
    pub dropped_precision_terms: usize,
    pub n_datasets: usize,
}

pub fn corpus_measures(records: &[DatasetEvalRecord]) -> CorpusMeasures {
    let per: Vec<DatasetMeasures> = records.iter().map(dataset_measures).collect();
    let mean = |f: &dyn Fn(&DatasetMeasures) -> Option<f64>| {
        let xs: Vec<f64> = per.iter().filter_map(f).collect();
        ((!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64), xs.len())
    };
    let (accuracy, n_accuracy) = mean(&|m| m.accuracy);
    let (precision, n_precision) = mean(&|m| m.precision);
    let (overall_recall, n_overall_recall) = mean(&|m| m.overall_recall);
    let (g_measure, n_g_measure) = mean(&|m| m.g_measure);
    CorpusMeasures {
        accuracy,
        precision,
        overall_recall,
        g_measure,
        n_accuracy,
        n_precision,
        n_overall_recall,
        n_g_measure,
        dropped_precision_terms: per.iter().map(|m| m.dropped_precision_terms).sum(),
        n_datasets: records.len(),
    }
}

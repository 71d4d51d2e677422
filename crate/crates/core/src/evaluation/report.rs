//! Assembled evaluation results and their text/CSV renderings.

use std::fmt::Write as _;

use super::{
    baseline_matrix, corpus_measures, dataset_measures, gain_report, lk_matrix, triclass_confusion, BaselineMatrix,
    CorpusMeasures, DatasetEvalRecord, DatasetMeasures, DistributionRecord, GainReport, LKMatrix, TriClassConfusion,
};

pub const DEFAULT_K_MAX: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationReport {
    pub rate: f64,
    pub corpus: CorpusMeasures,
    pub confusion: TriClassConfusion,
    pub lk: LKMatrix,
    pub baseline: BaselineMatrix,
    pub gains: GainReport,
    pub per_dataset: Vec<(String, usize, usize, usize, DatasetMeasures)>,
}

pub fn build_report(records: &[DatasetEvalRecord], rate: f64, k_max: usize) -> EvaluationReport {
    let lk = lk_matrix(records, k_max);
    let baseline = baseline_matrix(records, &lk, rate);
    EvaluationReport {
        rate,
        corpus: corpus_measures(records),
        confusion: triclass_confusion(records),
        baseline,
        lk,
        gains: gain_report(records),
        per_dataset: records
            .iter()
            .map(|r| (r.dataset.clone(), r.len(), r.real_positives(), r.predicted_positives(), dataset_measures(r)))
            .collect(),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn opt4(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl EvaluationReport {
    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        let c = &self.corpus;
        let _ = writeln!(s, "[measures]");
        let _ = writeln!(s, "datasets = {}", c.n_datasets);
        let _ = writeln!(s, "PA = {} (n={})", opt4(c.accuracy), c.n_accuracy);
        let _ = writeln!(s, "Pr = {} (n={}, dropped_terms={})", opt4(c.precision), c.n_precision, c.dropped_precision_terms);
        let _ = writeln!(s, "OR = {} (n={})", opt4(c.overall_recall), c.n_overall_recall);
        let _ = writeln!(s, "G = {} (n={})", opt4(c.g_measure), c.n_g_measure);

        let _ = writeln!(s, "\n[confusion] rows=predicted cols=real (positive negative zero)");
        for (name, row) in ["positive", "negative", "zero"].iter().zip(&self.confusion.cells) {
            let _ = writeln!(s, "{name:>8} {:.4} {:.4} {:.4}", row[0], row[1], row[2]);
        }

        let _ = writeln!(s, "\n[lk_matrix] accuracy/datasets");
        self.grid(&mut s, |l, k| {
            self.lk.cell(l, k).filter(|c| c.datasets > 0).map(|c| format!("{}/{}", opt4(c.accuracy()), c.datasets))
        });
        let _ = write!(s, "{:>6}", "wavg");
        for k in 1..=self.lk.k_max {
            let _ = write!(s, " {:>12}", opt4(self.lk.weighted_average(k)));
        }
        let _ = writeln!(s);

        let _ = writeln!(s, "\n[significance] random/p-value (positive rate {:.4})", self.rate);
        self.grid(&mut s, |l, k| {
            let b = self.baseline.cells.get(l)?.get(k - 1)?;
            b.random.map(|r| format!("{:.3}/{:.1e}", r, b.p_value.unwrap_or(1.0)))
        });
        let _ = write!(s, "{:>6}", "wavg");
        for k in 1..=self.lk.k_max {
            let _ = write!(s, " {:>12}", opt4(self.baseline.weighted_average(k)));
        }
        let _ = writeln!(s);

        let g = &self.gains;
        let _ = writeln!(s, "\n[ndcg]");
        let n_all = g.rows.iter().filter(|r| r.ndcg.is_some()).count();
        let n_top = g.rows.iter().filter(|r| r.ndcg_top1.is_some()).count();
        let _ = writeln!(s, "all_transformations = {} (n={n_all})", opt4(g.mean_ndcg));
        let _ = writeln!(s, "top1 = {} (n={n_top})", opt4(g.mean_ndcg_top1));
        s
    }

    fn grid(&self, s: &mut String, cell: impl Fn(usize, usize) -> Option<String>) {
        let _ = write!(s, "{:>6}", "L\\K");
        for k in 1..=self.lk.k_max {
            let _ = write!(s, " {k:>12}");
        }
        let _ = writeln!(s);
        for l in 0..self.lk.cells.len() {
            let row: Vec<Option<String>> = (1..=self.lk.k_max).map(|k| cell(l, k)).collect();
            if row.iter().all(Option::is_none) {
                continue;
            }
            let _ = write!(s, "{l:>6}");
            for c in row {
                let _ = write!(s, " {:>12}", c.unwrap_or_else(|| "-".into()));
            }
            let _ = writeln!(s);
        }
    }

    /// One row per populated (L, K) cell.
    pub fn lk_csv(&self) -> String {
        let mut s = String::from("L,K,datasets,successes,trials,accuracy,mean_ratio,random,p_value\n");
        for (l, row) in self.lk.cells.iter().enumerate() {
            for (ki, c) in row.iter().enumerate().filter(|(_, c)| c.datasets > 0) {
                let b = &self.baseline.cells[l][ki];
                let _ = writeln!(
                    s,
                    "{l},{},{},{},{},{},{},{},{}",
                    ki + 1,
                    c.datasets,
                    c.successes,
                    c.trials,
                    opt(c.accuracy()),
                    opt(c.mean_ratio()),
                    opt(b.random),
                    opt(b.p_value)
                );
            }
        }
        s
    }

    pub fn ndcg_csv(&self) -> String {
        let mut s = String::from("dataset,dcg_rec,dcg_best,dcg_worst,ndcg,ndcg_top1\n");
        for r in &self.gains.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                csv_field(&r.dataset),
                r.dcg_rec,
                r.dcg_best,
                r.dcg_worst,
                opt(r.ndcg),
                opt(r.ndcg_top1)
            );
        }
        s
    }

    pub fn measures_csv(&self) -> String {
        let mut s = String::from("dataset,transformations,real_positives,predicted_positives,PA,Pr,OR,G\n");
        for (d, t, l, y, m) in &self.per_dataset {
            let _ = writeln!(
                s,
                "{},{t},{l},{y},{},{},{},{}",
                csv_field(d),
                opt(m.accuracy),
                opt(m.precision),
                opt(m.overall_recall),
                opt(m.g_measure)
            );
        }
        s
    }
}

pub fn distribution_csv(algorithm: &str, records: &[DistributionRecord]) -> String {
    let mut s = String::from("algorithm,group,rows,positive_pct,negative_pct,zero_pct,distance,r,g,b\n");
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            csv_field(algorithm),
            csv_field(&r.group),
            r.rows,
            r.positive_pct,
            r.negative_pct,
            r.zero_pct,
            r.distance,
            r.rgb[0],
            r.rgb[1],
            r.rgb[2]
        );
    }
    s
}

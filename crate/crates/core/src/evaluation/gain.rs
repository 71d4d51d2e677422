//! Discounted cumulative gain of the production ranking, normalized between
//! the worst and the best possible orderings.

use super::DatasetEvalRecord;

/// `sum(gains[i] / log2(i + 1))` with 1-based positions.
pub fn dcg(gains: &[f64]) -> f64 {
    gains.iter().enumerate().map(|(i, g)| g / ((i + 2) as f64).log2()).sum()
}

/// Entry indices by positive probability descending, spec text ascending.
pub fn production_order(record: &DatasetEvalRecord) -> Vec<usize> {
    let e = &record.entries;
    let mut idx: Vec<usize> = (0..e.len()).collect();
    idx.sort_by(|&a, &b| e[b].p_positive.total_cmp(&e[a].p_positive).then_with(|| e[a].spec.cmp(&e[b].spec)));
    idx
}

fn truncated(g: &[f64], top_k: Option<usize>) -> &[f64] {
    &g[..top_k.map_or(g.len(), |k| k.min(g.len()))]
}

/// (rec, best, worst) DCG for gains visited in `order`.
fn dcg_triple(gains: &[f64], order: &[usize], top_k: Option<usize>) -> (f64, f64, f64) {
    let rec: Vec<f64> = order.iter().map(|&i| gains[i]).collect();
    let mut best = gains.to_vec();
    best.sort_by(|a, b| b.total_cmp(a));
    let mut worst = gains.to_vec();
    worst.sort_by(f64::total_cmp);
    (dcg(truncated(&rec, top_k)), dcg(truncated(&best, top_k)), dcg(truncated(&worst, top_k)))
}

/// nDCG of an arbitrary ordering of `gains`; `None` when best equals worst.
pub fn ndcg_of_order(gains: &[f64], order: &[usize], top_k: Option<usize>) -> Option<f64> {
    let (rec, best, worst) = dcg_triple(gains, order, top_k);
    (best != worst).then(|| (rec - worst) / (best - worst))
}

/// nDCG of the production ranking with real impacts as gains.
pub fn ndcg(record: &DatasetEvalRecord, top_k: Option<usize>) -> Option<f64> {
    let gains: Vec<f64> = record.entries.iter().map(|e| e.impact).collect();
    ndcg_of_order(&gains, &production_order(record), top_k)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GainRow {
    pub dataset: String,
    pub dcg_rec: f64,
    pub dcg_best: f64,
    pub dcg_worst: f64,
    pub ndcg: Option<f64>,
    pub ndcg_top1: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GainReport {
    pub rows: Vec<GainRow>,
    /// Mean over datasets where nDCG is defined.
    pub mean_ndcg: Option<f64>,
    pub mean_ndcg_top1: Option<f64>,
}

pub fn gain_report(records: &[DatasetEvalRecord]) -> GainReport {
    let rows: Vec<GainRow> = records
        .iter()
        .map(|r| {
            let gains: Vec<f64> = r.entries.iter().map(|e| e.impact).collect();
            let (dcg_rec, dcg_best, dcg_worst) = dcg_triple(&gains, &production_order(r), None);
            GainRow {
                dataset: r.dataset.clone(),
                dcg_rec,
                dcg_best,
                dcg_worst,
                ndcg: ndcg(r, None),
                ndcg_top1: ndcg(r, Some(1)),
            }
        })
        .collect();
    let mean = |f: fn(&GainRow) -> Option<f64>| {
        let xs: Vec<f64> = rows.iter().filter_map(f).collect();
        (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
    };
    GainReport { mean_ndcg: mean(|r| r.ndcg), mean_ndcg_top1: mean(|r| r.ndcg_top1), rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn worked_dcg() {
        assert_relative_eq!(dcg(&[1.0, 0.5, 0.0]), 1.0 + 0.5 / 3f64.log2(), epsilon = 1e-12);
        assert!((dcg(&[1.0, 0.5, 0.0]) - 1.31546).abs() < 1e-5);
        assert!((dcg(&[3.0, 2.0, 1.0]) - 4.76186).abs() < 1e-5);
        assert_eq!(dcg(&[]), 0.0);
    }

    #[test]
    fn extremes() {
        let g = [0.2, -0.1, 0.0, 0.4];
        assert_eq!(ndcg_of_order(&g, &[3, 0, 2, 1], None), Some(1.0));
        assert_eq!(ndcg_of_order(&g, &[1, 2, 0, 3], None), Some(0.0));
        assert_eq!(ndcg_of_order(&[0.1, 0.1], &[0, 1], None), None);
    }
}

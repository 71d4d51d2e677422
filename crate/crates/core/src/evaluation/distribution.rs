//! Shares of positive, negative and zero impacts per group, with the
//! distance from a uniform split and a colour encoding for plotting.

use crate::error::{Error, Result};
use crate::metadb::{MetaDatabase, ResponseClass};
use crate::transforms::TransformKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupBy {
    AlgorithmTotal,
    TransformationKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistributionRecord {
    pub group: String,
    pub rows: usize,
    pub positive_pct: f64,
    pub negative_pct: f64,
    pub zero_pct: f64,
    pub distance: f64,
    /// Red for negative, green for positive, blue for zero.
    pub rgb: [u8; 3],
}

/// Euclidean distance of a percentage triple from (33, 33, 33).
pub fn uniform_distance(positive: f64, negative: f64, zero: f64) -> f64 {
    let u = 33.0;
    ((positive - u).powi(2) + (negative - u).powi(2) + (zero - u).powi(2)).sqrt()
}

fn to_channel(pct: f64) -> u8 {
    (pct * 255.0 / 100.0).round().clamp(0.0, 255.0) as u8
}

fn record(group: String, classes: &[ResponseClass]) -> DistributionRecord {
    let n = classes.len() as f64;
    let pct = |c| 100.0 * classes.iter().filter(|&&x| x == c).count() as f64 / n;
    let (p, ng, z) = (pct(ResponseClass::Positive), pct(ResponseClass::Negative), pct(ResponseClass::Zero));
    DistributionRecord {
        group,
        rows: classes.len(),
        positive_pct: p,
        negative_pct: ng,
        zero_pct: z,
        distance: uniform_distance(p, ng, z),
        rgb: [to_channel(ng), to_channel(p), to_channel(z)],
    }
}

/// One record per non-empty group, kinds in catalog order.
pub fn impact_distribution(db: &MetaDatabase, group_by: GroupBy) -> Result<Vec<DistributionRecord>> {
    if db.rows.is_empty() {
        return Err(Error::Evaluation("empty meta-database".into()));
    }
    Ok(match group_by {
        GroupBy::AlgorithmTotal => {
            let classes: Vec<ResponseClass> = db.rows.iter().map(|r| r.response_class).collect();
            vec![record(db.algorithm.to_string(), &classes)]
        }
        GroupBy::TransformationKind => TransformKind::ALL
            .iter()
            .filter_map(|&k| {
                let classes: Vec<ResponseClass> =
                    db.rows.iter().filter(|r| r.transformation.kind == k).map(|r| r.response_class).collect();
                (!classes.is_empty()).then(|| record(k.to_string(), &classes))
            })
            .collect(),
    })
}

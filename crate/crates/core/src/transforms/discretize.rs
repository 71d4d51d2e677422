//! Equal-width binning and MDL (Fayyad-Irani) supervised discretization.

use crate::dataset::Cell;
use crate::stats::entropy_bits;

/// Bin index of each cell for `bins` equal-width intervals over the observed
/// range. A constant attribute falls entirely into bin 0.
pub fn equal_width(col: &[Cell], bins: usize) -> Vec<Cell> {
    let values = col.iter().filter_map(Cell::num);
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    col.iter()
        .map(|cell| match cell.num() {
            None => Cell::Missing,
            Some(_) if hi <= lo => Cell::Cat(0),
            Some(v) => {
                let pos = ((v - lo) / (hi - lo) * bins as f64).floor();
                Cell::Cat((pos.max(0.0) as usize).min(bins - 1) as u32)
            }
        })
        .collect()
}

/// Accepted MDL cut points for one attribute, ascending.
///
/// Candidates are midpoints between consecutive distinct values whose class
/// sets differ (boundary points). The cut minimizing class-entropy is taken,
/// with ties going to the lower cut, and accepted when its information gain
/// passes the MDL criterion; both halves are then split recursively.
pub fn mdl_cut_points(values: &[f64], labels: &[usize], n_classes: usize) -> Vec<f64> {
    let mut pairs: Vec<(f64, usize)> = values.iter().copied().zip(labels.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut cuts = Vec::new();
    split(&pairs, n_classes, &mut cuts);
    cuts.sort_by(f64::total_cmp);
    cuts
}

fn counts_of(pairs: &[(f64, usize)], n_classes: usize) -> Vec<f64> {
    let mut c = vec![0.0; n_classes];
    for &(_, y) in pairs {
        c[y] += 1.0;
    }
    c
}

fn n_present(counts: &[f64]) -> f64 {
    counts.iter().filter(|&&c| c > 0.0).count() as f64
}

/// Index `i` such that pairs[..i] / pairs[i..] is a boundary split.
fn boundary_candidates(pairs: &[(f64, usize)]) -> Vec<usize> {
    // (start, end, single class or None) per distinct value
    let mut groups: Vec<(usize, usize, Option<usize>)> = Vec::new();
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].0 == pairs[start].0 {
            end += 1;
        }
        let first = pairs[start].1;
        let single = pairs[start..end].iter().all(|p| p.1 == first).then_some(first);
        groups.push((start, end, single));
        start = end;
    }
    groups
        .windows(2)
        .filter(|w| !matches!((w[0].2, w[1].2), (Some(a), Some(b)) if a == b))
        .map(|w| w[1].0)
        .collect()
}

fn split(pairs: &[(f64, usize)], n_classes: usize, cuts: &mut Vec<f64>) {
    let n = pairs.len();
    if n < 2 {
        return;
    }
    let total = counts_of(pairs, n_classes);
    let ent = entropy_bits(&total);
    if ent == 0.0 {
        return;
    }
    let mut best: Option<(usize, f64)> = None;
    for i in boundary_candidates(pairs) {
        let left = counts_of(&pairs[..i], n_classes);
        let right: Vec<f64> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
        let e = (i as f64 * entropy_bits(&left) + (n - i) as f64 * entropy_bits(&right)) / n as f64;
        if best.is_none_or(|(_, b)| e < b) {
            best = Some((i, e));
        }
    }
    let Some((i, e)) = best else {
        return;
    };
    let left = counts_of(&pairs[..i], n_classes);
    let right: Vec<f64> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
    if mdl_accepts(&total, &left, &right, ent, e) {
        cuts.push((pairs[i - 1].0 + pairs[i].0) / 2.0);
        split(&pairs[..i], n_classes, cuts);
        split(&pairs[i..], n_classes, cuts);
    }
}

/// Fayyad-Irani acceptance test for a binary cut.
pub(crate) fn mdl_accepts(total: &[f64], left: &[f64], right: &[f64], ent: f64, split_ent: f64) -> bool {
    let n: f64 = total.iter().sum();
    let gain = ent - split_ent;
    let k = n_present(total);
    let k1 = n_present(left);
    let k2 = n_present(right);
    let delta = (3f64.powf(k) - 2.0).log2()
        - (k * ent - k1 * entropy_bits(left) - k2 * entropy_bits(right));
    gain > ((n - 1.0).log2() + delta) / n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_bins_split_at_midrange() {
        let col: Vec<Cell> = (0..10).map(|i| Cell::Num(i as f64)).collect();
        let out = equal_width(&col, 2);
        let zeros = out.iter().filter(|c| **c == Cell::Cat(0)).count();
        assert_eq!(zeros, 5);
        assert_eq!(out[4], Cell::Cat(0));
        assert_eq!(out[5], Cell::Cat(1));
    }

    #[test]
    fn missing_and_constant() {
        let out = equal_width(&[Cell::Num(3.0), Cell::Missing, Cell::Num(3.0)], 10);
        assert_eq!(out, vec![Cell::Cat(0), Cell::Missing, Cell::Cat(0)]);
    }

    #[test]
    fn pure_attribute_has_no_cuts() {
        let cuts = mdl_cut_points(&[1.0, 2.0, 3.0, 4.0], &[0, 0, 0, 0], 2);
        assert!(cuts.is_empty());
    }

    #[test]
    fn noise_is_not_cut() {
        let cuts = mdl_cut_points(&[1.0, 2.0, 3.0, 4.0], &[0, 1, 0, 1], 2);
        assert!(cuts.is_empty());
    }
}

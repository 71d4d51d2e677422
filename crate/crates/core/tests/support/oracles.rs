//! Brute-force reference computations, written independently of the library
//! code they check: direct tallies, exhaustive enumeration, plain summation.

#![allow(dead_code)]

use preprank_core::metadb::ResponseClass;
use rand::seq::SliceRandom;
use rand::Rng;

/// (PA, Pr, OR, G) from integer counts of (predicted, real) pairs. The
/// transformation weight `1/|T_d|` cancels in every ratio, so counts suffice.
/// A precision half with an empty denominator is left out of the average.
pub fn tally_measures(pairs: &[(ResponseClass, ResponseClass)]) -> [Option<f64>; 4] {
    use ResponseClass::*;
    let count = |p: ResponseClass, r: ResponseClass| pairs.iter().filter(|&&x| x == (p, r)).count() as f64;
    let (tp, tn) = (count(Positive, Positive), count(Negative, Negative));
    let (fn_p, fp_n) = (count(Negative, Positive), count(Positive, Negative));
    let (f0_p, f0_n) = (count(Zero, Positive), count(Zero, Negative));

    let core = tp + tn + fn_p + fp_n;
    let pa = if core == 0.0 { None } else { Some((tp + tn) / core) };
    let mut halves = Vec::new();
    if tp + fp_n > 0.0 {
        halves.push(tp / (tp + fp_n));
    }
    if tn + fn_p > 0.0 {
        halves.push(tn / (tn + fn_p));
    }
    let pr = if halves.is_empty() { None } else { Some(halves.iter().sum::<f64>() / halves.len() as f64) };
    let outer = core + f0_p + f0_n;
    let or = if outer == 0.0 { None } else { Some(core / outer) };
    let g = match (pa, or) {
        (Some(a), Some(o)) if a + o == 0.0 => Some(0.0),
        (Some(a), Some(o)) => Some(2.0 * a * o / (a + o)),
        _ => None,
    };
    [pa, pr, or, g]
}

/// Discounted cumulative gain with the discount written via natural logs.
pub fn dcg_direct(gains: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, g) in gains.iter().enumerate() {
        let position = (i + 1) as f64;
        total += g * std::f64::consts::LN_2 / (position + 1.0).ln();
    }
    total
}

/// Every permutation of `0..n`, by recursive insertion.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for slot in 0..=p.len() {
            let mut q = p.clone();
            q.insert(slot, n - 1);
            out.push(q);
        }
    }
    out
}

/// nDCG of `order` with best and worst found by trying every permutation.
pub fn ndcg_exhaustive(gains: &[f64], order: &[usize], top_k: Option<usize>) -> Option<f64> {
    let cut = top_k.unwrap_or(gains.len()).min(gains.len());
    let score = |o: &[usize]| dcg_direct(&o[..cut].iter().map(|&i| gains[i]).collect::<Vec<_>>());
    let (mut best, mut worst) = (f64::NEG_INFINITY, f64::INFINITY);
    for p in permutations(gains.len()) {
        let s = score(&p);
        best = best.max(s);
        worst = worst.min(s);
    }
    if (best - worst).abs() <= 1e-12 * best.abs().max(1.0) {
        return None;
    }
    Some((score(order) - worst) / (best - worst))
}

/// Every `r`-element subset of `items`, in lexicographic position order.
fn subsets(items: &[usize], r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![Vec::new()];
    }
    if items.len() < r {
        return Vec::new();
    }
    let mut out = subsets(&items[1..], r - 1);
    out.iter_mut().for_each(|s| s.insert(0, items[0]));
    out.extend(subsets(&items[1..], r));
    out
}

/// The random picker on one fixed order `perm` of items `0..t`, where items
/// `0..l` are the real positives and the first `y` of `perm` are picked.
/// If fewer than `l` were picked, the real positives in `filler` come next;
/// the leftovers follow in `perm` order. Returns whether each position
/// 1..=t is a success.
///
/// Positions `1..=y` succeed on a real positive, later positions on a real
/// non-positive.
fn picker_successes(perm: &[usize], l: usize, y: usize, filler: &[usize]) -> Vec<bool> {
    let is_pos = |i: usize| i < l;
    let mut seq: Vec<usize> = perm[..y].to_vec();
    seq.extend_from_slice(filler);
    let placed = seq.clone();
    seq.extend(perm.iter().copied().filter(|i| !placed.contains(i)));
    seq.iter()
        .enumerate()
        .map(|(pos, &i)| if pos < y { is_pos(i) } else { !is_pos(i) })
        .collect()
}

/// Positives missing from the picks, which the ordering must add.
fn unpicked_positives(perm: &[usize], l: usize, y: usize) -> Vec<usize> {
    perm[y..].iter().copied().filter(|&i| i < l).collect()
}

/// Mean success over positions 1..=k, averaged over the number of picks:
/// `floor(t*rate)` or `ceil(t*rate)`, the latter with probability equal to the
/// fractional part (so the expected pick count is `t*rate`).
fn mixed_over_picks(t: usize, rate: f64, per_y: impl Fn(usize) -> f64) -> f64 {
    let y = t as f64 * rate;
    let lo = y.floor();
    let frac = y - lo;
    let lo = lo as usize;
    if frac == 0.0 {
        per_y(lo)
    } else {
        (1.0 - frac) * per_y(lo) + frac * per_y((lo + 1).min(t))
    }
}

/// Exact expected top-`k` accuracy of the random picker, by enumerating
/// every picking order and, for each, every equally likely choice of filler
/// positives. Feasible for `t <= 7`.
pub fn random_pick_exact(t: usize, l: usize, k: usize, rate: f64) -> f64 {
    let perms = permutations(t);
    mixed_over_picks(t, rate, |y| {
        let mut total = 0.0;
        for p in &perms {
            let fillers = subsets(&unpicked_positives(p, l, y), l.saturating_sub(y));
            let hits: usize = fillers
                .iter()
                .map(|f| picker_successes(p, l, y, f)[..k].iter().filter(|&&s| s).count())
                .sum();
            total += hits as f64 / fillers.len() as f64;
        }
        total / (perms.len() * k) as f64
    })
}

/// One random-picker trial; element `k-1` is the mean success over
/// positions 1..=k.
pub fn random_picker_trial<R: Rng>(rng: &mut R, t: usize, l: usize, rate: f64) -> Vec<f64> {
    let y_exp = t as f64 * rate;
    let mut y = y_exp.floor() as usize;
    if rng.gen::<f64>() < y_exp - y_exp.floor() {
        y += 1;
    }
    let y = y.min(t);
    let mut perm: Vec<usize> = (0..t).collect();
    perm.shuffle(rng);
    let mut filler = unpicked_positives(&perm, l, y);
    filler.shuffle(rng);
    filler.truncate(l.saturating_sub(y));
    let s = picker_successes(&perm, l, y, &filler);
    let mut hits = 0usize;
    (0..t)
        .map(|k| {
            hits += s[k] as usize;
            hits as f64 / (k + 1) as f64
        })
        .collect()
}

/// `P(X >= s)` for `X ~ Binomial(n, p)` by summing the mass function, with
/// coefficients built multiplicatively.
pub fn binomial_tail_direct(s: u64, n: u64, p: f64) -> f64 {
    let mut coef = 1.0f64;
    let mut total = 0.0;
    for i in 0..=n {
        if i > 0 {
            coef = coef * (n - i + 1) as f64 / i as f64;
        }
        if i >= s {
            total += coef * p.powi(i as i32) * (1.0 - p).powi((n - i) as i32);
        }
    }
    total
}

/// `|a - b| <= rel * max(|a|, |b|)`; exact equality passes.
pub fn close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs())
}

/// Absolute closeness, for quantities normalized to [0, 1] where a relative
/// test near zero would only measure rounding noise.
pub fn close_unit(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

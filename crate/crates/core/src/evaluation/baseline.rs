//! The random-picker baseline and the binomial tail test against it.

/// Expected top-`k` position accuracy of a user who marks `t * rate`
/// transformations positive at random, on a dataset with `t` transformations
/// of which `l` are real positives. Positions follow the evaluation ordering.
pub fn random_pick_probability(t: usize, l: usize, k: usize, rate: f64) -> f64 {
    assert!(l <= t && k >= 1 && k <= t, "need l <= t and 1 <= k <= t");
    let (tf, lf, kf) = (t as f64, l as f64, k as f64);
    let y = tf * rate;
    let hit = kf.min(y) * lf / tf;
    if y >= lf || l == t {
        (hit + (kf - y).max(0.0) * (tf - lf) / tf) / kf
    } else {
        let tail = ((tf - lf) - (tf - lf) / tf * y) / (tf - lf);
        (hit + (kf - lf).max(0.0) * tail) / kf
    }
}

/// Expected true positives among the first `k` random picks.
pub fn expected_tp(t: usize, l: usize, k: usize) -> f64 {
    k as f64 * l as f64 / t as f64
}

/// Expected true non-positives among the first `k` random picks.
pub fn expected_tnp(t: usize, l: usize, k: usize) -> f64 {
    k as f64 * (t as f64 - l as f64) / t as f64
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for i in 1..=n {
        out[i] = out[i - 1] + (i as f64).ln();
    }
    out
}

/// Upper tail `P(X >= successes)` for `X ~ Binomial(trials, p0)`.
pub fn binomial_significance(successes: u64, trials: u64, p0: f64) -> f64 {
    assert!(successes <= trials, "successes exceed trials");
    if successes == 0 || p0 >= 1.0 {
        return 1.0;
    }
    if p0 <= 0.0 {
        return 0.0;
    }
    let n = trials as usize;
    let lf = ln_factorials(n);
    let (lp, lq) = (p0.ln(), (1.0 - p0).ln());
    let terms: Vec<f64> = (successes as usize..=n)
        .map(|i| lf[n] - lf[i] - lf[n - i] + i as f64 * lp + (n - i) as f64 * lq)
        .collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let p = max.exp() * terms.iter().map(|x| (x - max).exp()).sum::<f64>();
    p.min(1.0)
}

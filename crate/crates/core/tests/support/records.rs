//! Random evaluation records and a position-by-position count of the
//! top-K accounting, kept apart from the library's ordering code.

#![allow(dead_code)]

use preprank_core::evaluation::{DatasetEvalRecord, EvalEntry};
use preprank_core::metadb::ResponseClass;
use rand::Rng;

const CLASSES: [ResponseClass; 3] = [ResponseClass::Positive, ResponseClass::Negative, ResponseClass::Zero];

/// A record of `t` entries. Probabilities come from a coarse grid so ties
/// occur; impacts are zero for real-zero entries.
pub fn random_record<R: Rng>(rng: &mut R, name: &str, t: usize) -> DatasetEvalRecord {
    let entries = (0..t)
        .map(|i| {
            let real = CLASSES[rng.gen_range(0..3)];
            let impact = match real {
                ResponseClass::Positive => rng.gen_range(0.001..0.2),
                ResponseClass::Negative => -rng.gen_range(0.001..0.2),
                ResponseClass::Zero => 0.0,
            };
            EvalEntry {
                spec: format!("s{:02}", t - 1 - i),
                p_positive: rng.gen_range(0..6) as f64 / 5.0,
                predicted: CLASSES[rng.gen_range(0..3)],
                real,
                impact,
            }
        })
        .collect();
    DatasetEvalRecord { dataset: name.into(), entries }
}

fn pos(c: ResponseClass) -> bool {
    c == ResponseClass::Positive
}

/// Ordering rebuilt from its description: predicted positives first, then
/// enough of the remaining real positives to reach L, then the rest; each
/// group by probability descending and spec ascending.
pub fn ordering_direct(r: &DatasetEvalRecord) -> Vec<usize> {
    let e = &r.entries;
    let rank = |a: &usize, b: &usize| {
        e[*b].p_positive.partial_cmp(&e[*a].p_positive).unwrap().then(e[*a].spec.cmp(&e[*b].spec))
    };
    let l = e.iter().filter(|x| pos(x.real)).count();
    let mut first: Vec<usize> = (0..e.len()).filter(|&i| pos(e[i].predicted)).collect();
    first.sort_by(rank);
    let mut reals: Vec<usize> = (0..e.len()).filter(|&i| !pos(e[i].predicted) && pos(e[i].real)).collect();
    reals.sort_by(rank);
    reals.truncate(l.saturating_sub(first.len()));
    let mut rest: Vec<usize> = (0..e.len()).filter(|i| !first.contains(i) && !reals.contains(i)).collect();
    rest.sort_by(rank);
    first.into_iter().chain(reals).chain(rest).collect()
}

/// (successes, trials) of one record at cut-off `k`, counted position by position.
pub fn cell_count_direct(r: &DatasetEvalRecord, k: usize) -> (usize, usize) {
    let order = ordering_direct(r);
    let l = r.entries.iter().filter(|x| pos(x.real)).count();
    let (mut s, mut n) = (0, 0);
    for (p, &i) in order.iter().enumerate().take(k) {
        let x = &r.entries[i];
        if k <= l {
            n += 1;
            s += (pos(x.predicted) && pos(x.real)) as usize;
        } else if p >= l {
            n += 1;
            s += (!pos(x.predicted) && !pos(x.real)) as usize;
        }
    }
    (s, n)
}

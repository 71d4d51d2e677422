//! Principal components over standardized continuous predictors.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::dataset::Cell;
use crate::stats::{mean, sample_std};

/// Fitted projection. `components` are unit vectors, one per retained axis.
#[derive(Clone, Debug)]
pub struct PcaFit {
    pub components: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub retained_fraction: f64,
    /// Standardized, mean-imputed input matrix (rows x attributes).
    standardized: DMatrix<f64>,
}

impl PcaFit {
    pub fn scores(&self) -> Vec<Vec<f64>> {
        self.components
            .iter()
            .map(|v| {
                (0..self.standardized.nrows())
                    .map(|r| {
                        self.standardized
                            .row(r)
                            .iter()
                            .zip(v)
                            .map(|(x, w)| x * w)
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }
}

/// Mean-imputes, standardizes and keeps the fewest leading components whose
/// eigenvalues cover `coverage` of the total variance.
pub fn fit(columns: &[&[Cell]], coverage: f64) -> PcaFit {
    let p = columns.len();
    let n = columns.first().map_or(0, |c| c.len());
    let mut z = DMatrix::<f64>::zeros(n, p);
    for (j, col) in columns.iter().enumerate() {
        let present: Vec<f64> = col.iter().filter_map(Cell::num).collect();
        let m = mean(&present);
        let filled: Vec<f64> = col.iter().map(|c| c.num().unwrap_or(m)).collect();
        let mu = mean(&filled);
        let sd = sample_std(&filled);
        for (r, x) in filled.iter().enumerate() {
            z[(r, j)] = if sd > 0.0 { (x - mu) / sd } else { 0.0 };
        }
    }
    let cov = if n > 1 {
        (z.transpose() * &z) / (n - 1) as f64
    } else {
        DMatrix::zeros(p, p)
    };
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let total: f64 = values.iter().sum();

    let mut keep = 1;
    if total > 0.0 {
        let mut cum = 0.0;
        for (i, v) in values.iter().enumerate() {
            cum += v;
            keep = i + 1;
            if cum >= coverage * total * (1.0 - 1e-9) {
                break;
            }
        }
    }
    let components: Vec<Vec<f64>> = order[..keep]
        .iter()
        .map(|&i| {
            let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            // sign: largest-magnitude entry positive
            let pivot = v
                .iter()
                .enumerate()
                .fold(0, |best, (k, x)| if x.abs() > v[best].abs() { k } else { best });
            if v[pivot] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    let retained: f64 = values[..keep].iter().sum();
    PcaFit {
        components,
        eigenvalues: values[..keep].to_vec(),
        retained_fraction: if total > 0.0 { retained / total } else { 1.0 },
        standardized: z,
    }
}

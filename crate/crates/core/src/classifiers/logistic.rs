//! Multinomial logistic regression with a small ridge penalty.
//!
//! Continuous inputs are mean-imputed and standardized on the training split,
//! categorical inputs are one-hot encoded (missing becomes the training mode).
//! The objective is minimized with L-BFGS.

use super::{argmax, check_schema, Learner, Prediction};
use crate::dataset::{Cell, Dataset};
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct Logistic {
    pub ridge: f64,
    pub max_iter: usize,
    pub tolerance: f64,
}

impl Default for Logistic {
    fn default() -> Self {
        Logistic { ridge: 1e-4, max_iter: 1000, tolerance: 1e-6 }
    }
}

enum Encoder {
    Num { attr: usize, fill: f64, mean: f64, sd: f64 },
    Cat { attr: usize, k: usize, mode: usize },
}

impl Encoder {
    fn width(&self) -> usize {
        match self {
            Encoder::Num { .. } => 1,
            Encoder::Cat { k, .. } => *k,
        }
    }

    fn write(&self, ds: &Dataset, row: usize, out: &mut Vec<f64>) {
        match *self {
            Encoder::Num { attr, fill, mean, sd } => {
                let x = ds.cell(row, attr).num().unwrap_or(fill);
                out.push(if sd > 0.0 { (x - mean) / sd } else { 0.0 });
            }
            Encoder::Cat { attr, k, mode } => {
                let v = ds.cell(row, attr).cat().unwrap_or(mode);
                out.extend((0..k).map(|c| if c == v { 1.0 } else { 0.0 }));
            }
        }
    }
}

fn encoders(train: &Dataset) -> Vec<Encoder> {
    train
        .predictors()
        .map(|a| {
            let col = train.column(a);
            if train.attribute(a).is_continuous() {
                let xs: Vec<f64> = col.iter().filter_map(Cell::num).collect();
                let fill = if xs.is_empty() { 0.0 } else { xs.iter().sum::<f64>() / xs.len() as f64 };
                let filled: Vec<f64> = col.iter().map(|c| c.num().unwrap_or(fill)).collect();
                let n = filled.len() as f64;
                let mean = filled.iter().sum::<f64>() / n;
                let sd = (filled.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
                Encoder::Num { attr: a, fill, mean, sd }
            } else {
                let k = train.attribute(a).categories.len();
                let mut counts = vec![0usize; k];
                for v in col.iter().filter_map(Cell::cat) {
                    counts[v] += 1;
                }
                let mode = (0..k).fold(0, |b, c| if counts[c] > counts[b] { c } else { b });
                Encoder::Cat { attr: a, k, mode }
            }
        })
        .collect()
}

fn design(ds: &Dataset, enc: &[Encoder]) -> Vec<Vec<f64>> {
    (0..ds.n_rows())
        .map(|r| {
            let mut row = Vec::with_capacity(enc.iter().map(Encoder::width).sum::<usize>() + 1);
            for e in enc {
                e.write(ds, r, &mut row);
            }
            row.push(1.0);
            row
        })
        .collect()
}

struct Problem<'a> {
    x: &'a [Vec<f64>],
    y: &'a [usize],
    classes: usize,
    dim: usize,
    ridge: f64,
}

impl Problem<'_> {
    /// Objective and gradient at `w` (class-major, bias last in each block).
    fn eval(&self, w: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let n = self.x.len() as f64;
        let mut loss = 0.0;
        let mut z = vec![0.0; self.classes];
        for (xi, &yi) in self.x.iter().zip(self.y) {
            for (c, zc) in z.iter_mut().enumerate() {
                let wc = &w[c * self.dim..(c + 1) * self.dim];
                *zc = wc.iter().zip(xi).map(|(a, b)| a * b).sum();
            }
            let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
            loss += lse - z[yi];
            for c in 0..self.classes {
                let p = (z[c] - lse).exp() - if c == yi { 1.0 } else { 0.0 };
                let g = &mut grad[c * self.dim..(c + 1) * self.dim];
                for (gj, xj) in g.iter_mut().zip(xi) {
                    *gj += p * xj;
                }
            }
        }
        loss /= n;
        grad.iter_mut().for_each(|g| *g /= n);
        for c in 0..self.classes {
            for j in 0..self.dim - 1 {
                let i = c * self.dim + j;
                loss += 0.5 * self.ridge * w[i] * w[i];
                grad[i] += self.ridge * w[i];
            }
        }
        loss
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Limited-memory BFGS with Armijo backtracking.
fn minimize(p: &Problem, max_iter: usize, tol: f64) -> Vec<f64> {
    const MEMORY: usize = 10;
    let len = p.classes * p.dim;
    let mut w = vec![0.0; len];
    let mut g = vec![0.0; len];
    let mut f = p.eval(&w, &mut g);
    let mut hist: std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)> = Default::default();
    let mut g_new = vec![0.0; len];
    for _ in 0..max_iter {
        if dot(&g, &g).sqrt() <= tol {
            break;
        }
        // two-loop recursion
        let mut d: Vec<f64> = g.iter().map(|x| -x).collect();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dot(s, &d);
            d.iter_mut().zip(y).for_each(|(di, yi)| *di -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = hist.back() {
            let gamma = dot(s, y) / dot(y, y);
            d.iter_mut().for_each(|x| *x *= gamma);
        } else {
            let gn = dot(&g, &g).sqrt();
            d.iter_mut().for_each(|x| *x /= gn.max(1.0));
        }
        for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &d);
            d.iter_mut().zip(s).for_each(|(di, si)| *di += (a - b) * si);
        }
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            d = g.iter().map(|x| -x).collect();
            slope = -dot(&g, &g);
            hist.clear();
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = w.iter().zip(&d).map(|(wi, di)| wi + step * di).collect();
            let f_trial = p.eval(&trial, &mut g_new);
            if f_trial <= f + 1e-4 * step * slope {
                accepted = Some((trial, f_trial));
                break;
            }
            step *= 0.5;
        }
        let Some((w_next, f_next)) = accepted else { break };
        let s: Vec<f64> = w_next.iter().zip(&w).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 {
            if hist.len() == MEMORY {
                hist.pop_front();
            }
            hist.push_back((s, y, 1.0 / sy));
        }
        let converged = (f - f_next).abs() <= 1e-15 * f.abs().max(1.0);
        w = w_next;
        f = f_next;
        std::mem::swap(&mut g, &mut g_new);
        if converged {
            break;
        }
    }
    w
}

impl Learner for Logistic {
    fn name(&self) -> String {
        "logistic".into()
    }

    fn fit_predict(&self, train: &Dataset, test: &Dataset, _seed: u64) -> Result<Vec<Prediction>> {
        check_schema(train, test)?;
        let enc = encoders(train);
        let x = design(train, &enc);
        let y = train.class_labels();
        let classes = train.n_classes();
        let dim = x[0].len();
        let problem = Problem { x: &x, y: &y, classes, dim, ridge: self.ridge };
        let w = minimize(&problem, self.max_iter, self.tolerance);
        Ok(design(test, &enc)
            .iter()
            .map(|xi| {
                let z: Vec<f64> = (0..classes).map(|c| dot(&w[c * dim..(c + 1) * dim], xi)).collect();
                let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let e: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
                let total: f64 = e.iter().sum();
                let scores: Vec<f64> = e.iter().map(|v| v / total).collect();
                Prediction { class: argmax(&scores), scores }
            })
            .collect())
    }
}

//! L2-regularized logistic regression fitted by gradient descent with
//! Armijo backtracking.
//!
//! Features are standardized before fitting; the stored weights are mapped
//! back to raw feature units, so prediction needs no scaler. The penalty
//! therefore applies to the standardized weights.

use serde::{Deserialize, Serialize};

use super::{check_training_set, Classifier, Matrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticParams {
    pub l2: f64,
    pub max_iter: usize,
    /// Stop once the gradient norm falls below this.
    pub tol: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            l2: 1e-3,
            max_iter: 1000,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub l2: f64,
}

impl LogisticModel {
    pub fn score(&self, x: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }
}

impl Classifier for LogisticModel {
    fn n_features(&self) -> usize {
        self.weights.len()
    }

    fn predict_proba_unchecked(&self, x: &[f64]) -> f64 {
        sigmoid(self.score(x))
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Mean log-loss plus `l2 / 2 * |w|^2`. The parameter vector holds one weight
/// per feature followed by the (unpenalized) intercept.
pub struct LogisticObjective<'a> {
    x: &'a Matrix,
    y: &'a [bool],
    l2: f64,
}

impl<'a> LogisticObjective<'a> {
    pub fn new(x: &'a Matrix, y: &'a [bool], l2: f64) -> Result<Self> {
        check_training_set(x, y)?;
        Ok(LogisticObjective { x, y, l2 })
    }

    pub fn dim(&self) -> usize {
        self.x.n_cols() + 1
    }

    fn z(&self, w: &[f64], row: &[f64]) -> f64 {
        let p = row.len();
        w[p] + w[..p].iter().zip(row).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn loss(&self, w: &[f64]) -> f64 {
        let p = self.x.n_cols();
        let data: f64 = self
            .x
            .rows()
            .zip(self.y)
            .map(|(row, &y)| {
                let z = self.z(w, row);
                softplus(z) - if y { z } else { 0.0 }
            })
            .sum();
        let penalty: f64 = w[..p].iter().map(|v| v * v).sum();
        data / self.x.n_rows() as f64 + 0.5 * self.l2 * penalty
    }

    pub fn gradient(&self, w: &[f64]) -> Vec<f64> {
        let p = self.x.n_cols();
        let n = self.x.n_rows() as f64;
        let mut g = vec![0.0; p + 1];
        for (row, &y) in self.x.rows().zip(self.y) {
            let r = sigmoid(self.z(w, row)) - if y { 1.0 } else { 0.0 };
            for (gj, xj) in g.iter_mut().zip(row) {
                *gj += r * xj;
            }
            g[p] += r;
        }
        for (j, gj) in g.iter_mut().enumerate() {
            *gj /= n;
            if j < p {
                *gj += self.l2 * w[j];
            }
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub model: LogisticModel,
    pub converged: bool,
    pub iterations: usize,
    /// Objective after each accepted step, starting from the initial point.
    pub losses: Vec<f64>,
}

pub fn train_logistic(x: &Matrix, y: &[bool], params: &LogisticParams) -> Result<LogisticFit> {
    check_training_set(x, y)?;
    if x.rows().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("training features".into()));
    }
    if !(params.l2 >= 0.0 && params.l2.is_finite()) {
        return Err(Error::Argument(format!("l2 must be a finite non-negative number, got {}", params.l2)));
    }
    let (n, p) = (x.n_rows(), x.n_cols());
    let mut means = vec![0.0; p];
    let mut scales = vec![0.0; p];
    for j in 0..p {
        let m = (0..n).map(|i| x.get(i, j)).sum::<f64>() / n as f64;
        let var = (0..n).map(|i| (x.get(i, j) - m).powi(2)).sum::<f64>() / n as f64;
        means[j] = m;
        scales[j] = if var > 0.0 { var.sqrt() } else { 1.0 };
    }
    let mut z = Vec::with_capacity(n * p);
    for row in x.rows() {
        z.extend(row.iter().enumerate().map(|(j, v)| (v - means[j]) / scales[j]));
    }
    let zx = Matrix::new(n, p, z)?;
    let obj = LogisticObjective::new(&zx, y, params.l2)?;

    let mut w = vec![0.0; p + 1];
    let mut f = obj.loss(&w);
    let mut losses = vec![f];
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < params.max_iter {
        let g = obj.gradient(&w);
        let gg: f64 = g.iter().map(|v| v * v).sum();
        if gg.sqrt() < params.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let mut accepted = None;
        while step > 1e-12 {
            let cand: Vec<f64> = w.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let fc = obj.loss(&cand);
            if fc <= f - 1e-4 * step * gg {
                accepted = Some((cand, fc));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, fc)) = accepted else {
            // no descent possible at machine precision
            converged = true;
            break;
        };
        w = cand;
        f = fc;
        losses.push(f);
        step *= 2.0;
    }

    let weights: Vec<f64> = (0..p).map(|j| w[j] / scales[j]).collect();
    let intercept = w[p] - (0..p).map(|j| w[j] * means[j] / scales[j]).sum::<f64>();
    if weights.iter().any(|v| !v.is_finite()) || !intercept.is_finite() {
        return Err(Error::NonFinite("fitted logistic weights".into()));
    }
    Ok(LogisticFit {
        model: LogisticModel {
            weights,
            intercept,
            l2: params.l2,
        },
        converged,
        iterations,
        losses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_give_half() {
        let m = LogisticModel {
            weights: vec![0.0; 3],
            intercept: 0.0,
            l2: 0.0,
        };
        assert_eq!(m.predict_proba(&[1.0, -4.0, 9.0]).unwrap(), 0.5);
        assert!(m.predict_proba(&[1.0]).is_err());
    }

    #[test]
    fn all_positive_saturates() {
        let x = Matrix::from_rows(&(0..20).map(|i| vec![i as f64]).collect::<Vec<_>>()).unwrap();
        let y = vec![true; 20];
        let fit = train_logistic(&x, &y, &LogisticParams::default()).unwrap();
        for i in 0..20 {
            assert!(fit.model.predict_proba(&[i as f64]).unwrap() > 0.95);
        }
    }

    #[test]
    fn symmetric_data_has_zero_intercept() {
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 1..=10 {
            let v = i as f64 * 0.37;
            rows.push(vec![v, 2.0 * v - 1.0 * (i % 3) as f64]);
            y.push(i % 4 != 0);
            rows.push(vec![-v, -(2.0 * v - 1.0 * (i % 3) as f64)]);
            y.push(i % 4 == 0);
        }
        let x = Matrix::from_rows(&rows).unwrap();
        let fit = train_logistic(&x, &y, &LogisticParams::default()).unwrap();
        assert!(fit.model.intercept.abs() < 1e-6, "{}", fit.model.intercept);
    }

    #[test]
    fn losses_never_increase() {
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![(i as f64).sin() * 3.0, (i % 7) as f64]).collect();
        let y: Vec<bool> = (0..50).map(|i| (i as f64).sin() + 0.3 * ((i % 5) as f64 - 2.0) > 0.0).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let fit = train_logistic(&x, &y, &LogisticParams::default()).unwrap();
        assert!(fit.losses.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn non_finite_rejected() {
        let x = Matrix::from_rows(&[vec![f64::INFINITY], vec![0.0]]).unwrap();
        assert!(matches!(
            train_logistic(&x, &[true, false], &LogisticParams::default()),
            Err(Error::NonFinite(_))
        ));
    }
}

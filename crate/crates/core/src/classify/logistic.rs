use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Classifier, FeatureMatrix, Predictor, SparseRow};
use crate::corpus::Class;
use crate::error::{Error, Result};

/// Rescale the weight vector once its lazy scale factor falls below this.
const MIN_SCALE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LrConfig {
    /// L2 penalty λ in `mean log-loss + λ/2 ‖w‖²`.
    pub l2: f64,
    pub epochs: usize,
    pub lr: f64,
    pub seed: u64,
}

impl Default for LrConfig {
    fn default() -> Self {
        Self {
            l2: 1e-4,
            epochs: 20,
            lr: 0.05,
            seed: 0,
        }
    }
}

/// Binary logistic regression on raw term counts, trained by SGD.
#[derive(Clone, Debug, Default)]
pub struct LogisticRegression {
    pub config: LrConfig,
}

/// Class B is the positive class.
#[derive(Clone, Debug, PartialEq)]
pub struct LrModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z) - y z`, computed without overflow.
fn log_loss(z: f64, y: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p() - y * z
}

fn target(class: Class) -> f64 {
    match class {
        Class::A => 0.0,
        Class::B => 1.0,
    }
}

impl LrModel {
    pub fn decision(&self, row: SparseRow<'_>) -> f64 {
        row.iter()
            .fold(self.bias, |acc, &(c, n)| acc + self.weights[c as usize] * n as f64)
    }

    /// Regularized objective over `rows`: mean log-loss plus `l2/2 ‖w‖²`.
    pub fn objective(&self, data: &FeatureMatrix, rows: &[usize], l2: f64) -> f64 {
        let loss: f64 = rows
            .iter()
            .map(|&r| log_loss(self.decision(data.row(r)), target(data.label(r))))
            .sum();
        loss / rows.len() as f64 + 0.5 * l2 * self.weights.iter().map(|w| w * w).sum::<f64>()
    }

    /// Gradient of [`LrModel::objective`] with respect to weights and bias.
    pub fn gradient(&self, data: &FeatureMatrix, rows: &[usize], l2: f64) -> (Vec<f64>, f64) {
        let n = rows.len() as f64;
        let mut grad: Vec<f64> = self.weights.iter().map(|w| l2 * w).collect();
        let mut grad_bias = 0.0;
        for &r in rows {
            let g = sigmoid(self.decision(data.row(r))) - target(data.label(r));
            for &(c, x) in data.row(r) {
                grad[c as usize] += g * x as f64 / n;
            }
            grad_bias += g / n;
        }
        (grad, grad_bias)
    }
}

impl Predictor for LrModel {
    fn predict(&self, row: SparseRow<'_>) -> Class {
        if self.decision(row) > 0.0 {
            Class::B
        } else {
            Class::A
        }
    }
}

impl Classifier for LogisticRegression {
    type Model = LrModel;

    /// Each step takes a plain gradient step on one sample's log-loss and an
    /// implicit step on the penalty, `w ← (w - lr·g·x) / (1 + lr·λ)`, which
    /// stays stable for any λ. The weight vector is stored as `scale · v` so
    /// the shrinkage costs O(1) per sample.
    fn fit(&self, data: &FeatureMatrix, rows: &[usize]) -> Result<LrModel> {
        let cfg = &self.config;
        if !(cfg.lr > 0.0 && cfg.lr.is_finite()) || !(cfg.l2 >= 0.0) {
            return Err(Error::Config("lr must be positive and l2 non-negative".into()));
        }
        let has = |c: Class| rows.iter().any(|&r| data.label(r) == c);
        if !has(Class::A) || !has(Class::B) {
            return Err(Error::SingleClass);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut order = rows.to_vec();
        let mut v = vec![0f64; data.n_cols()];
        let mut scale = 1f64;
        let mut bias = 0f64;
        let shrink = 1.0 / (1.0 + cfg.lr * cfg.l2);

        for epoch in 0..cfg.epochs {
            order.shuffle(&mut rng);
            for &r in &order {
                let row = data.row(r);
                let z = row
                    .iter()
                    .fold(0.0, |acc, &(c, n)| acc + v[c as usize] * n as f64)
                    * scale
                    + bias;
                let g = sigmoid(z) - target(data.label(r));
                let step = cfg.lr * g / scale;
                for &(c, n) in row {
                    v[c as usize] -= step * n as f64;
                }
                bias -= cfg.lr * g;
                scale *= shrink;
                if scale < MIN_SCALE {
                    v.iter_mut().for_each(|x| *x *= scale);
                    scale = 1.0;
                }
            }
            let model = LrModel {
                weights: v.iter().map(|x| x * scale).collect(),
                bias,
            };
            let objective = model.objective(data, rows, cfg.l2);
            if !objective.is_finite() {
                return Err(Error::Divergence(format!(
                    "objective is {objective} after epoch {epoch}"
                )));
            }
        }
        Ok(LrModel {
            weights: v.iter().map(|x| x * scale).collect(),
            bias,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(data: &FeatureMatrix) -> Vec<usize> {
        (0..data.n_rows()).collect()
    }

    #[test]
    fn separable_reaches_full_accuracy() {
        let rows = (0..10)
            .map(|i| if i % 2 == 0 { vec![] } else { vec![(0, 5)] })
            .collect();
        let labels = (0..10).map(|i| if i % 2 == 0 { Class::A } else { Class::B }).collect();
        let data = FeatureMatrix::from_rows(rows, labels, 1).unwrap();
        let lr = LogisticRegression {
            config: LrConfig {
                l2: 0.0,
                ..LrConfig::default()
            },
        };
        let model = lr.fit(&data, &all(&data)).unwrap();
        for r in 0..data.n_rows() {
            assert_eq!(model.predict(data.row(r)), data.label(r));
        }
    }

    #[test]
    fn huge_penalty_collapses_to_prior() {
        // 6 A rows, 2 B rows, features that would separate them
        let mut rows = vec![vec![(0, 3)]; 6];
        rows.extend(vec![vec![(1, 3)]; 2]);
        let mut labels = vec![Class::A; 6];
        labels.extend([Class::B; 2]);
        let data = FeatureMatrix::from_rows(rows, labels, 2).unwrap();
        let lr = LogisticRegression {
            config: LrConfig {
                l2: 1e6,
                ..LrConfig::default()
            },
        };
        let model = lr.fit(&data, &all(&data)).unwrap();
        assert!(model.weights.iter().all(|w| w.abs() < 1e-5), "{:?}", model.weights);
        for r in 0..data.n_rows() {
            assert_eq!(model.predict(data.row(r)), Class::A);
        }
    }

    #[test]
    fn single_class_and_bad_config() {
        let data = FeatureMatrix::from_rows(vec![vec![(0, 1)]; 3], vec![Class::B; 3], 1).unwrap();
        assert!(matches!(
            LogisticRegression::default().fit(&data, &all(&data)),
            Err(Error::SingleClass)
        ));
        let bad = LogisticRegression {
            config: LrConfig {
                lr: 0.0,
                ..LrConfig::default()
            },
        };
        assert!(bad.fit(&data, &all(&data)).is_err());
    }

    #[test]
    fn log_loss_is_stable() {
        assert!(log_loss(1e4, 0.0).is_finite());
        assert!(log_loss(-1e4, 1.0).is_finite());
        assert!((log_loss(0.0, 1.0) - 2f64.ln()).abs() < 1e-15);
    }
}

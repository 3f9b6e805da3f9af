use super::{Classifier, FeatureMatrix, Predictor, SparseRow};
use crate::corpus::Class;
use crate::error::{Error, Result};

/// Multinomial Naive Bayes with add-one smoothing.
#[derive(Clone, Copy, Debug, Default)]
pub struct NaiveBayes;

#[derive(Clone, Debug, PartialEq)]
pub struct NbModel {
    pub log_prior: [f64; 2],
    /// Smoothed per-class log-probability of each column.
    pub log_prob: [Vec<f64>; 2],
}

impl Classifier for NaiveBayes {
    type Model = NbModel;

    fn fit(&self, data: &FeatureMatrix, rows: &[usize]) -> Result<NbModel> {
        let n_cols = data.n_cols();
        let mut docs = [0usize; 2];
        let mut counts = [vec![0u64; n_cols], vec![0u64; n_cols]];
        for &r in rows {
            let c = data.label(r).index();
            docs[c] += 1;
            for &(col, n) in data.row(r) {
                counts[c][col as usize] += n as u64;
            }
        }
        if docs[0] == 0 || docs[1] == 0 {
            return Err(Error::SingleClass);
        }
        let total = (docs[0] + docs[1]) as f64;
        let log_prob = counts.map(|counts| {
            let denom = (counts.iter().sum::<u64>() + n_cols as u64) as f64;
            counts
                .iter()
                .map(|&n| ((n + 1) as f64 / denom).ln())
                .collect()
        });
        Ok(NbModel {
            log_prior: [(docs[0] as f64 / total).ln(), (docs[1] as f64 / total).ln()],
            log_prob,
        })
    }
}

impl NbModel {
    pub fn log_joint(&self, row: SparseRow<'_>, class: Class) -> f64 {
        let c = class.index();
        row.iter().fold(self.log_prior[c], |acc, &(col, n)| {
            acc + n as f64 * self.log_prob[c][col as usize]
        })
    }

    /// log P(A | row) - log P(B | row).
    pub fn log_odds(&self, row: SparseRow<'_>) -> f64 {
        self.log_joint(row, Class::A) - self.log_joint(row, Class::B)
    }
}

impl Predictor for NbModel {
    fn predict(&self, row: SparseRow<'_>) -> Class {
        // exact ties go to class A
        if self.log_joint(row, Class::B) > self.log_joint(row, Class::A) {
            Class::B
        } else {
            Class::A
        }
    }
}

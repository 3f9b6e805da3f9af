//! Evaluation classifiers and stratified cross-validation.

mod cv;
mod features;
mod logistic;
mod naive_bayes;

pub use cv::{cross_validate, cross_validate_matrix, stratified_folds, CvResult};
pub use features::{FeatureMatrix, SparseRow};
pub use logistic::{LogisticRegression, LrConfig, LrModel};
pub use naive_bayes::{NaiveBayes, NbModel};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::Class;
use crate::error::Result;

/// A trainable binary classifier over sparse term-count rows.
pub trait Classifier: Sync {
    type Model: Predictor;

    /// Fit on the rows of `data` listed in `rows`.
    fn fit(&self, data: &FeatureMatrix, rows: &[usize]) -> Result<Self::Model>;
}

pub trait Predictor: Send + Sync {
    fn predict(&self, row: SparseRow<'_>) -> Class;
}

/// The classifiers the evaluation grid knows about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Nb,
    Lr,
}

impl ClassifierKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::Nb => "nb",
            ClassifierKind::Lr => "lr",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nb" => Ok(ClassifierKind::Nb),
            "lr" => Ok(ClassifierKind::Lr),
            other => Err(crate::error::Error::Config(format!(
                "unknown classifier {other:?} (expected nb or lr)"
            ))),
        }
    }
}

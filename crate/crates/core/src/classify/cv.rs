use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{Classifier, FeatureMatrix, Predictor};
use crate::corpus::{Class, Corpus};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CvResult {
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub train_time_per_fold: Vec<f64>,
    pub predict_time_per_fold: Vec<f64>,
    pub folds_requested: usize,
    /// Lower than `folds_requested` when a class has fewer documents.
    pub folds_used: usize,
    /// Number of feature columns (surviving words).
    pub vocab_size: usize,
    /// Documents with no surviving tokens; predicted by class prior.
    pub empty_doc_count: usize,
}

impl CvResult {
    pub fn train_time_s(&self) -> f64 {
        self.train_time_per_fold.iter().sum()
    }

    pub fn predict_time_s(&self) -> f64 {
        self.predict_time_per_fold.iter().sum()
    }
}

/// Held-out row indices of each fold, sorted. Each class is shuffled with
/// `seed` and dealt round-robin; class B continues where class A stopped so
/// fold sizes differ by at most one.
pub fn stratified_folds(labels: &[Class], folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if labels.is_empty() {
        return Err(Error::NoDocuments);
    }
    if folds < 2 {
        return Err(Error::Config("cross-validation needs at least 2 folds".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Vec::new(); folds];
    let mut dealt = 0;
    for class in Class::BOTH {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            out[dealt % folds].push(i);
            dealt += 1;
        }
    }
    out.iter_mut().for_each(|f| f.sort_unstable());
    Ok(out)
}

/// Stratified k-fold accuracy of `classifier` on a prepared feature matrix.
/// The number of folds drops to the smaller class size when needed.
pub fn cross_validate_matrix<C: Classifier>(
    data: &FeatureMatrix,
    classifier: &C,
    folds: usize,
    seed: u64,
) -> Result<CvResult> {
    if data.n_rows() == 0 {
        return Err(Error::NoDocuments);
    }
    let smallest = Class::BOTH
        .iter()
        .map(|&c| data.labels().iter().filter(|&&l| l == c).count())
        .min()
        .unwrap_or(0);
    if smallest < 2 {
        return Err(Error::TooFewDocuments(smallest));
    }
    let folds_used = folds.min(smallest);
    let held_out = stratified_folds(data.labels(), folds_used, seed)?;

    let per_fold = held_out
        .par_iter()
        .map(|test| {
            let mut is_test = vec![false; data.n_rows()];
            test.iter().for_each(|&i| is_test[i] = true);
            let train: Vec<usize> = (0..data.n_rows()).filter(|&i| !is_test[i]).collect();

            let start = Instant::now();
            let model = classifier.fit(data, &train)?;
            let train_time = start.elapsed().as_secs_f64();

            let start = Instant::now();
            let correct = test
                .iter()
                .filter(|&&i| model.predict(data.row(i)) == data.label(i))
                .count();
            let predict_time = start.elapsed().as_secs_f64();
            Ok((correct as f64 / test.len() as f64, train_time, predict_time))
        })
        .collect::<Result<Vec<_>>>()?;

    let fold_accuracies: Vec<f64> = per_fold.iter().map(|f| f.0).collect();
    Ok(CvResult {
        mean_accuracy: fold_accuracies.iter().sum::<f64>() / fold_accuracies.len() as f64,
        fold_accuracies,
        train_time_per_fold: per_fold.iter().map(|f| f.1).collect(),
        predict_time_per_fold: per_fold.iter().map(|f| f.2).collect(),
        folds_requested: folds,
        folds_used,
        vocab_size: data.n_cols(),
        empty_doc_count: data.empty_rows(),
    })
}

/// Cross-validate on the corpus restricted to the words with `keep[id]` set.
pub fn cross_validate<C: Classifier>(
    corpus: &Corpus,
    keep: &[bool],
    classifier: &C,
    folds: usize,
    seed: u64,
) -> Result<CvResult> {
    let data = FeatureMatrix::from_corpus(corpus, keep)?;
    cross_validate_matrix(&data, classifier, folds, seed)
}

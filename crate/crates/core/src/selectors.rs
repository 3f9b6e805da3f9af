//! Baseline rankings: χ², mutual information and random elimination.
//!
//! Both statistics use document-level binary occurrence: the event is
//! "the document contains the word at least once".

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corpus::{Class, Vocabulary};
use crate::error::{Error, Result};
use crate::ranking::{check_percentage, eliminated_count, Method, RankedWordList};

/// Word occurrence against class, counted in documents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ContingencyTable {
    /// Class-A documents containing the word.
    pub n11: u64,
    /// Class-A documents without it.
    pub n10: u64,
    /// Class-B documents containing it.
    pub n01: u64,
    /// Class-B documents without it.
    pub n00: u64,
}

impl ContingencyTable {
    pub fn new(n11: u64, n10: u64, n01: u64, n00: u64) -> Self {
        Self { n11, n10, n01, n00 }
    }

    pub fn for_word(vocab: &Vocabulary, id: u32) -> Self {
        let a = vocab.doc_count(id, Class::A) as u64;
        let b = vocab.doc_count(id, Class::B) as u64;
        Self {
            n11: a,
            n10: vocab.class_doc_total(Class::A) as u64 - a,
            n01: b,
            n00: vocab.class_doc_total(Class::B) as u64 - b,
        }
    }

    pub fn n(&self) -> u64 {
        self.n11 + self.n10 + self.n01 + self.n00
    }

    /// The table with classes A and B exchanged.
    pub fn swap_classes(&self) -> Self {
        Self {
            n11: self.n01,
            n10: self.n00,
            n01: self.n11,
            n00: self.n10,
        }
    }
}

pub fn chi2_score(t: &ContingencyTable) -> f64 {
    let present = t.n11 + t.n01;
    let absent = t.n10 + t.n00;
    let class_a = t.n11 + t.n10;
    let class_b = t.n01 + t.n00;
    if present == 0 || absent == 0 || class_a == 0 || class_b == 0 {
        return 0.0;
    }
    let det = (t.n11 as i128 * t.n00 as i128 - t.n10 as i128 * t.n01 as i128) as f64;
    let denom = class_a as f64 * class_b as f64 * present as f64 * absent as f64;
    t.n() as f64 * det * det / denom
}

/// Mutual information in bits between occurrence and class.
pub fn mi_score(t: &ContingencyTable) -> f64 {
    let n = t.n() as f64;
    if n == 0.0 {
        return 0.0;
    }
    let present = (t.n11 + t.n01) as f64;
    let absent = (t.n10 + t.n00) as f64;
    let class_a = (t.n11 + t.n10) as f64;
    let class_b = (t.n01 + t.n00) as f64;
    let term = |joint: u64, occurrence: f64, class: f64| {
        if joint == 0 {
            return 0.0;
        }
        let joint = joint as f64;
        joint / n * ((joint * n) / (occurrence * class)).log2()
    };
    let mi = term(t.n11, present, class_a)
        + term(t.n10, absent, class_a)
        + term(t.n01, present, class_b)
        + term(t.n00, absent, class_b);
    mi.max(0.0)
}

/// Rank the vocabulary ascending by χ² or MI; least informative first.
pub fn rank_by_selector(vocab: &Vocabulary, method: Method) -> Result<RankedWordList> {
    let score: fn(&ContingencyTable) -> f64 = match method {
        Method::Chi2 => chi2_score,
        Method::Mi => mi_score,
        other => {
            return Err(Error::Config(format!(
                "{other} is not a contingency-table selector"
            )))
        }
    };
    let scores: Vec<f64> = (0..vocab.len() as u32)
        .map(|id| score(&ContingencyTable::for_word(vocab, id)))
        .collect();
    Ok(RankedWordList::ascending(method, vocab, &scores))
}

/// Seeded uniform random permutation; each word's score is its random key.
pub fn rank_random(vocab: &Vocabulary, seed: u64) -> RankedWordList {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let keys: Vec<f64> = (0..vocab.len()).map(|_| rng.gen::<f64>()).collect();
    RankedWordList::ascending(Method::Random, vocab, &keys)
}

/// Fraction of surviving words two rankings share after eliminating `pct`
/// percent from the head of each.
pub fn overlap(x: &RankedWordList, y: &RankedWordList, pct: u32) -> Result<f64> {
    check_percentage(pct)?;
    let xs: HashSet<&str> = x.words().collect();
    let ys: HashSet<&str> = y.words().collect();
    if xs != ys || xs.len() != x.len() || ys.len() != y.len() {
        return Err(Error::VocabularyMismatch {
            only_x: xs.difference(&ys).count(),
            only_y: ys.difference(&xs).count(),
        });
    }
    let len = x.len();
    let kept = len - eliminated_count(len, pct);
    if kept == 0 {
        return Err(Error::Config("no words survive elimination".into()));
    }
    let survivors_x: HashSet<&str> = x.survivors(pct).iter().map(|e| e.word.as_str()).collect();
    let shared = y
        .survivors(pct)
        .iter()
        .filter(|e| survivors_x.contains(e.word.as_str()))
        .count();
    Ok(shared as f64 / kept as f64)
}

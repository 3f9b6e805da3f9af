use std::collections::BTreeMap;

use crate::corpus::{Class, Corpus};
use crate::error::{Error, Result};

/// `(column, count)` pairs sorted by column.
pub type SparseRow<'a> = &'a [(u32, u32)];

/// Bag-of-words term counts restricted to the surviving vocabulary.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    rows: Vec<Vec<(u32, u32)>>,
    labels: Vec<Class>,
    /// Vocabulary word id of each column.
    columns: Vec<u32>,
}

impl FeatureMatrix {
    /// One row per document; columns are the word ids with `keep[id]` set.
    pub fn from_corpus(corpus: &Corpus, keep: &[bool]) -> Result<Self> {
        if keep.len() != corpus.vocab.len() {
            return Err(Error::DimensionMismatch {
                expected: corpus.vocab.len(),
                found: keep.len(),
            });
        }
        let mut column_of = vec![u32::MAX; keep.len()];
        let mut columns = Vec::new();
        for (id, _) in keep.iter().enumerate().filter(|(_, &k)| k) {
            column_of[id] = columns.len() as u32;
            columns.push(id as u32);
        }
        let mut counts = BTreeMap::new();
        let rows = corpus
            .documents
            .iter()
            .map(|doc| {
                counts.clear();
                for &id in &doc.word_ids {
                    let col = column_of[id as usize];
                    if col != u32::MAX {
                        *counts.entry(col).or_insert(0u32) += 1;
                    }
                }
                counts.iter().map(|(&c, &n)| (c, n)).collect()
            })
            .collect();
        Ok(Self {
            rows,
            labels: corpus.documents.iter().map(|d| d.class).collect(),
            columns,
        })
    }

    /// Build directly from sparse rows; `n_cols` columns numbered `0..n_cols`.
    pub fn from_rows(rows: Vec<Vec<(u32, u32)>>, labels: Vec<Class>, n_cols: usize) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                found: labels.len(),
            });
        }
        let mut rows = rows;
        for row in &mut rows {
            row.sort_unstable_by_key(|&(c, _)| c);
            if let Some(&(c, _)) = row.iter().find(|&&(c, _)| c as usize >= n_cols) {
                return Err(Error::DimensionMismatch {
                    expected: n_cols,
                    found: c as usize + 1,
                });
            }
        }
        Ok(Self {
            rows,
            labels,
            columns: (0..n_cols as u32).collect(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, i: usize) -> SparseRow<'_> {
        &self.rows[i]
    }

    pub fn label(&self, i: usize) -> Class {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Class] {
        &self.labels
    }

    pub fn columns(&self) -> &[u32] {
        &self.columns
    }

    pub fn empty_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.is_empty()).count()
    }
}

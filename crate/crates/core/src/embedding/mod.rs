//! Skip-gram word embeddings trained with negative sampling.
//!
//! One shared space is trained over the documents of both classes. Rows of
//! both matrices are indexed by vocabulary word id; only the input vectors
//! are used downstream.

mod io;
mod sgns;

pub use io::{load_model, load_model_for, read_model, save_model, write_model, MAGIC};
pub use sgns::{
    pair_loss_and_gradients, target_term, train_skipgram, train_skipgram_logged, PairGradients,
    TrainLog,
};

use serde::{Deserialize, Serialize};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub dim: usize,
    /// Maximum distance between a center word and a context word.
    pub window: usize,
    /// Negative samples drawn per (center, context) pair.
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f32,
    pub seed: u64,
    /// Frequent-word subsampling threshold; 0 disables subsampling.
    pub subsample_threshold: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            seed: 1,
            subsample_threshold: 1e-3,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.to_owned()));
        if self.dim == 0 {
            return fail("embedding dim must be at least 1");
        }
        if self.window == 0 {
            return fail("window must be at least 1");
        }
        if self.negatives == 0 {
            return fail("negatives must be at least 1");
        }
        if self.epochs == 0 {
            return fail("epochs must be at least 1");
        }
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return fail("initial_lr must be positive");
        }
        if !(self.subsample_threshold >= 0.0 && self.subsample_threshold.is_finite()) {
            return fail("subsample_threshold must be non-negative");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingModel {
    dim: usize,
    rows: usize,
    /// Raw SHA-256 of the vocabulary the model was trained on.
    vocab_hash: [u8; 32],
    input: Vec<f32>,
    output: Vec<f32>,
}

impl EmbeddingModel {
    /// Assemble a model from row-major matrices.
    pub fn from_parts(
        vocab_hash: &str,
        dim: usize,
        input: Vec<f32>,
        output: Vec<f32>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("embedding dim must be at least 1".into()));
        }
        if input.len() % dim != 0 || input.len() != output.len() {
            return Err(Error::DimensionMismatch {
                expected: input.len(),
                found: output.len(),
            });
        }
        let mut hash = [0u8; 32];
        hex::decode_to_slice(vocab_hash, &mut hash)
            .map_err(|e| Error::ModelFormat(format!("bad vocabulary hash: {e}")))?;
        Ok(Self {
            dim,
            rows: input.len() / dim,
            vocab_hash: hash,
            input,
            output,
        })
    }

    /// A model whose input vectors are `vectors` (one per vocabulary word, in
    /// id order) and whose output vectors are zero.
    pub fn from_vectors(vocab: &Vocabulary, vectors: &[Vec<f32>]) -> Result<Self> {
        if vectors.len() != vocab.len() {
            return Err(Error::DimensionMismatch {
                expected: vocab.len(),
                found: vectors.len(),
            });
        }
        let dim = vectors.first().map_or(0, Vec::len);
        let mut input = Vec::with_capacity(dim * vectors.len());
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            input.extend_from_slice(v);
        }
        let output = vec![0.0; input.len()];
        Self::from_parts(&vocab.hash(), dim, input, output)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn vocab_hash(&self) -> String {
        hex::encode(self.vocab_hash)
    }

    /// Input vector for a word id.
    pub fn vector(&self, id: u32) -> &[f32] {
        let start = id as usize * self.dim;
        &self.input[start..start + self.dim]
    }

    /// Context (output) vector for a word id.
    pub fn output_vector(&self, id: u32) -> &[f32] {
        let start = id as usize * self.dim;
        &self.output[start..start + self.dim]
    }

    pub fn input_matrix(&self) -> &[f32] {
        &self.input
    }

    pub fn output_matrix(&self) -> &[f32] {
        &self.output
    }

    pub fn embedding_of(&self, vocab: &Vocabulary, word: &str) -> Result<&[f32]> {
        let id = vocab
            .id(word)
            .filter(|&id| (id as usize) < self.rows)
            .ok_or_else(|| Error::UnknownWord(word.to_owned()))?;
        Ok(self.vector(id))
    }

    /// Refuse a vocabulary other than the one the model was trained on.
    pub fn check_vocab(&self, vocab: &Vocabulary) -> Result<()> {
        let corpus = vocab.hash();
        let model = self.vocab_hash();
        if corpus != model || vocab.len() != self.rows {
            return Err(Error::VocabHashMismatch { model, corpus });
        }
        Ok(())
    }
}

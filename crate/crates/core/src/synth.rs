//! Synthetic two-class corpus with planted common words.
//!
//! Each class draws its tokens uniformly from its own dictionary; a third,
//! shared dictionary supplies a fixed number of extra tokens inserted at
//! random positions in every document. The shared words carry no class
//! information, so a good stop word detector should rank them first.
//!
//! Words are spelled `wa<i>`, `wb<i>` and `m<i>` (1-based) so that they pass
//! through tokenization unchanged.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::RawDocument;
use crate::error::{Error, Result};

pub const LABEL_A: &str = "A";
pub const LABEL_B: &str = "B";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub docs_per_class: usize,
    /// Class tokens per document, before the common words are added.
    pub doc_len: usize,
    pub class_dict_size: usize,
    pub common_dict_size: usize,
    pub common_per_doc: usize,
    pub seed: u64,
}

impl SynthConfig {
    /// 20,000 documents per class, 2000-word class dictionaries, 300 common
    /// words.
    pub fn paper(seed: u64) -> Self {
        Self {
            docs_per_class: 20_000,
            doc_len: 300,
            class_dict_size: 2000,
            common_dict_size: 300,
            common_per_doc: 10,
            seed,
        }
    }

    /// Small enough for tests: 1000 documents per class, 500 + 500 + 100 words.
    pub fn desk(seed: u64) -> Self {
        Self {
            docs_per_class: 1000,
            class_dict_size: 500,
            common_dict_size: 100,
            ..Self::paper(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("docs_per_class", self.docs_per_class),
            ("doc_len", self.doc_len),
            ("class_dict_size", self.class_dict_size),
            ("common_dict_size", self.common_dict_size),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if self.common_per_doc > self.doc_len {
            return Err(Error::Config("common_per_doc must not exceed doc_len".into()));
        }
        Ok(())
    }

    pub fn final_doc_len(&self) -> usize {
        self.doc_len + self.common_per_doc
    }
}

/// Everything an oracle needs to know about a generated corpus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: SynthConfig,
    pub labels: [String; 2],
    /// Tokens per document after the common words are inserted.
    pub final_doc_len: usize,
    pub class_a_words: Vec<String>,
    pub class_b_words: Vec<String>,
    pub common_words: Vec<String>,
}

impl Manifest {
    pub fn vocab_size(&self) -> usize {
        self.class_a_words.len() + self.class_b_words.len() + self.common_words.len()
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        out.write_all(b"\n")?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticCorpus {
    pub documents: Vec<RawDocument>,
    pub manifest: Manifest,
}

fn dictionary(prefix: &str, size: usize) -> Vec<String> {
    (1..=size).map(|i| format!("{prefix}{i}")).collect()
}

/// Class-A documents come first, then class B. Document `i` draws from its
/// own ChaCha stream, so output does not depend on scheduling.
pub fn generate(config: &SynthConfig) -> Result<SyntheticCorpus> {
    config.validate()?;
    let class_a_words = dictionary("wa", config.class_dict_size);
    let class_b_words = dictionary("wb", config.class_dict_size);
    let common_words = dictionary("m", config.common_dict_size);

    let n = config.docs_per_class;
    let documents = (0..2 * n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            let (label, dict, number) = if i < n {
                (LABEL_A, &class_a_words, i + 1)
            } else {
                (LABEL_B, &class_b_words, i - n + 1)
            };
            let mut tokens: Vec<&str> = Vec::with_capacity(config.final_doc_len());
            for _ in 0..config.doc_len {
                tokens.push(dict.choose(&mut rng).unwrap());
            }
            for _ in 0..config.common_per_doc {
                let word = common_words.choose(&mut rng).unwrap();
                let at = rng.gen_range(0..=tokens.len());
                tokens.insert(at, word);
            }
            RawDocument::new(format!("{label}{number}"), tokens.join(" "), label)
        })
        .collect();

    Ok(SyntheticCorpus {
        documents,
        manifest: Manifest {
            config: config.clone(),
            labels: [LABEL_A.to_owned(), LABEL_B.to_owned()],
            final_doc_len: config.final_doc_len(),
            class_a_words,
            class_b_words,
            common_words,
        },
    })
}

//! Corpus ingestion: tokenization, JSON-lines loading and vocabulary statistics.
//!
//! Preprocessing lowercases the text and treats every character outside
//! `[a-z0-9]` as a separator. Conventional stop words are kept; finding the
//! corpus-specific ones is what the rest of the crate is for.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// One of the two classes of a corpus. `A` is always the lexicographically
/// smaller label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class {
    A,
    B,
}

impl Class {
    pub const BOTH: [Class; 2] = [Class::A, Class::B];

    pub fn index(self) -> usize {
        match self {
            Class::A => 0,
            Class::B => 1,
        }
    }

    pub fn other(self) -> Class {
        match self {
            Class::A => Class::B,
            Class::B => Class::A,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub id: String,
    pub text: String,
    pub label: String,
}

impl RawDocument {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            label: label.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub class: Class,
    pub tokens: Vec<String>,
    /// `tokens` mapped through the vocabulary.
    pub word_ids: Vec<u32>,
}

/// Lowercase, replace every non-alphanumeric ASCII character by a space and
/// split on whitespace.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_ascii_alphanumeric() {
            current.push(ch.to_ascii_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

#[derive(Clone, Debug)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, u32>,
    total_counts: Vec<u64>,
    doc_counts: Vec<[u32; 2]>,
    class_doc_totals: [u32; 2],
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Words in id order (lexicographic).
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn total_count(&self, id: u32) -> u64 {
        self.total_counts[id as usize]
    }

    /// Number of documents of `class` that contain the word at least once.
    pub fn doc_count(&self, id: u32, class: Class) -> u32 {
        self.doc_counts[id as usize][class.index()]
    }

    pub fn class_doc_total(&self, class: Class) -> u32 {
        self.class_doc_totals[class.index()]
    }

    pub fn total_docs(&self) -> u32 {
        self.class_doc_totals[0] + self.class_doc_totals[1]
    }

    /// Ids of the unique words occurring in at least one document of `class`.
    pub fn class_words(&self, class: Class) -> Vec<u32> {
        (0..self.words.len() as u32)
            .filter(|&id| self.doc_count(id, class) > 0)
            .collect()
    }

    /// SHA-256 over the id-ordered word list, hex encoded.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        for word in &self.words {
            hasher.update(word.as_bytes());
            hasher.update(b"\n");
        }
        hex::encode(hasher.finalize())
    }

    /// CSV dump with header `word,word_id,total_count,doc_count_a,doc_count_b`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["word", "word_id", "total_count", "doc_count_a", "doc_count_b"])?;
        for (id, word) in self.words.iter().enumerate() {
            let [a, b] = self.doc_counts[id];
            writer.write_record([
                word.clone(),
                id.to_string(),
                self.total_counts[id].to_string(),
                a.to_string(),
                b.to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Corpus {
    /// Original label strings, indexed by `Class::index`.
    pub labels: [String; 2],
    pub documents: Vec<Document>,
    pub vocab: Vocabulary,
    /// Ids of documents left with no tokens after the `min_count` filter.
    pub empty_documents: Vec<String>,
}

impl Corpus {
    pub fn label(&self, class: Class) -> &str {
        &self.labels[class.index()]
    }

    pub fn token_count(&self) -> usize {
        self.documents.iter().map(|d| d.tokens.len()).sum()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let mut counts = [0; 2];
        for doc in &self.documents {
            counts[doc.class.index()] += 1;
        }
        counts
    }
}

/// Tokenize, assign classes, drop words rarer than `min_count` and count.
pub fn build_corpus(docs: &[RawDocument], min_count: u64) -> Result<Corpus> {
    if docs.is_empty() {
        return Err(Error::NoDocuments);
    }
    if min_count == 0 {
        return Err(Error::Config("min_count must be positive".into()));
    }
    let mut seen = HashSet::with_capacity(docs.len());
    for doc in docs {
        if !seen.insert(doc.id.as_str()) {
            return Err(Error::DuplicateId(doc.id.clone()));
        }
    }
    let labels: BTreeSet<&str> = docs.iter().map(|d| d.label.as_str()).collect();
    if labels.len() != 2 {
        return Err(Error::Labels {
            found: labels.into_iter().map(str::to_owned).collect(),
        });
    }
    let mut labels = labels.into_iter();
    let labels = [
        labels.next().unwrap().to_owned(),
        labels.next().unwrap().to_owned(),
    ];

    let tokenized: Vec<Vec<String>> = docs.par_iter().map(|d| tokenize(&d.text)).collect();

    let mut counts: HashMap<&str, u64> = HashMap::new();
    for tokens in &tokenized {
        for token in tokens {
            *counts.entry(token.as_str()).or_insert(0) += 1;
        }
    }
    let mut words: Vec<String> = counts
        .iter()
        .filter(|(_, &c)| c >= min_count)
        .map(|(w, _)| (*w).to_owned())
        .collect();
    words.sort_unstable();
    let index: HashMap<String, u32> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i as u32))
        .collect();
    let total_counts: Vec<u64> = words.iter().map(|w| counts[w.as_str()]).collect();

    let mut doc_counts = vec![[0u32; 2]; words.len()];
    let mut class_doc_totals = [0u32; 2];
    let mut documents = Vec::with_capacity(docs.len());
    let mut empty_documents = Vec::new();
    let mut unique = HashSet::new();
    for (raw, tokens) in docs.iter().zip(tokenized) {
        let class = if raw.label == labels[0] { Class::A } else { Class::B };
        let (tokens, word_ids): (Vec<String>, Vec<u32>) = tokens
            .into_iter()
            .filter_map(|t| index.get(&t).map(|&id| (t, id)))
            .unzip();
        unique.clear();
        for &id in &word_ids {
            if unique.insert(id) {
                doc_counts[id as usize][class.index()] += 1;
            }
        }
        class_doc_totals[class.index()] += 1;
        if tokens.is_empty() {
            empty_documents.push(raw.id.clone());
        }
        documents.push(Document {
            id: raw.id.clone(),
            class,
            tokens,
            word_ids,
        });
    }

    Ok(Corpus {
        labels,
        documents,
        vocab: Vocabulary {
            words,
            index,
            total_counts,
            doc_counts,
            class_doc_totals,
        },
        empty_documents,
    })
}

#[derive(Deserialize)]
struct JsonLine {
    text: String,
    label: String,
    #[serde(default)]
    id: Option<String>,
}

/// Read a JSON-lines corpus. Blank lines are skipped; documents without an
/// `id` get their 1-based line number.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<RawDocument>> {
    let reader = BufReader::new(File::open(path)?);
    read_jsonl(reader)
}

pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Vec<RawDocument>> {
    let mut docs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: JsonLine = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        docs.push(RawDocument {
            id: parsed.id.unwrap_or_else(|| line_no.to_string()),
            text: parsed.text,
            label: parsed.label,
        });
    }
    if docs.is_empty() {
        return Err(Error::NoDocuments);
    }
    Ok(docs)
}

pub fn write_jsonl<W: Write>(docs: &[RawDocument], mut out: W) -> Result<()> {
    for doc in docs {
        serde_json::to_writer(&mut out, doc)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

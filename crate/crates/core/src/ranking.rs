//! Elimination-ordered word lists shared by every selection method.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Shortest distance to the separating hyperplane first.
    Hyperplane,
    /// Longest distance first; the negative control.
    HyperplaneLongest,
    Chi2,
    Mi,
    Random,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Hyperplane,
        Method::HyperplaneLongest,
        Method::Chi2,
        Method::Mi,
        Method::Random,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Hyperplane => "hyperplane",
            Method::HyperplaneLongest => "hyperplane_longest",
            Method::Chi2 => "chi2",
            Method::Mi => "mi",
            Method::Random => "random",
        }
    }

    pub fn needs_embedding(self) -> bool {
        matches!(self, Method::Hyperplane | Method::HyperplaneLongest)
    }

    fn score_column(self) -> &'static str {
        if self.needs_embedding() {
            "distance"
        } else {
            "score"
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown method {s:?} (expected one of hyperplane, hyperplane_longest, chi2, mi, random)"
                ))
            })
    }
}

/// How scores relate to elimination order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Lowest score eliminated first.
    Ascending,
    /// Highest score eliminated first.
    Descending,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Ascending => "ascending",
            Direction::Descending => "descending",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub word: String,
    pub score: f64,
}

/// The whole vocabulary in elimination order: `entries[0]` goes first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedWordList {
    pub method: Method,
    pub direction: Direction,
    pub entries: Vec<RankedEntry>,
}

/// Number of words removed from the head of a ranking at `pct` percent.
pub fn eliminated_count(vocab_len: usize, pct: u32) -> usize {
    vocab_len * pct as usize / 100
}

pub fn check_percentage(pct: u32) -> Result<()> {
    if pct >= 100 {
        return Err(Error::Config(format!(
            "elimination percentage must be below 100, got {pct}"
        )));
    }
    Ok(())
}

impl RankedWordList {
    /// Sort vocabulary ids ascending by `scores[id]`; exact ties fall back to
    /// word order, which is id order.
    pub fn ascending(method: Method, vocab: &Vocabulary, scores: &[f64]) -> Self {
        assert_eq!(scores.len(), vocab.len(), "one score per vocabulary word");
        let mut ids: Vec<u32> = (0..vocab.len() as u32).collect();
        ids.sort_by(|&a, &b| {
            scores[a as usize]
                .total_cmp(&scores[b as usize])
                .then(a.cmp(&b))
        });
        Self {
            method,
            direction: Direction::Ascending,
            entries: ids
                .into_iter()
                .map(|id| RankedEntry {
                    word: vocab.word(id).to_owned(),
                    score: scores[id as usize],
                })
                .collect(),
        }
    }

    /// The same list read back to front.
    pub fn reversed(&self, method: Method) -> Self {
        Self {
            method,
            direction: match self.direction {
                Direction::Ascending => Direction::Descending,
                Direction::Descending => Direction::Ascending,
            },
            entries: self.entries.iter().rev().cloned().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.word.as_str())
    }

    /// Entries that remain after eliminating `pct` percent from the head.
    pub fn survivors(&self, pct: u32) -> &[RankedEntry] {
        &self.entries[eliminated_count(self.entries.len(), pct).min(self.entries.len())..]
    }

    /// Per-word-id keep flags after eliminating `pct` percent.
    pub fn survivor_mask(&self, vocab: &Vocabulary, pct: u32) -> Result<Vec<bool>> {
        if self.entries.len() != vocab.len() {
            return Err(Error::DimensionMismatch {
                expected: vocab.len(),
                found: self.entries.len(),
            });
        }
        let mut mask = vec![false; vocab.len()];
        for entry in self.survivors(pct) {
            let id = vocab
                .id(&entry.word)
                .ok_or_else(|| Error::UnknownWord(entry.word.clone()))?;
            mask[id as usize] = true;
        }
        Ok(mask)
    }

    /// CSV with a `# method: <tag>` comment line, then `rank,word,<distance|score>`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# method: {}, direction: {}",
            self.method,
            self.direction.as_str()
        )?;
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["rank", "word", self.method.score_column()])?;
        for (rank, entry) in self.entries.iter().enumerate() {
            writer.write_record([
                (rank + 1).to_string(),
                entry.word.clone(),
                entry.score.to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(mut input: R) -> Result<Self> {
        let mut first = String::new();
        input.read_line(&mut first)?;
        let parse_err = |message: String| Error::Parse { line: 1, message };
        let header = first
            .trim()
            .strip_prefix("# method:")
            .ok_or_else(|| parse_err("missing `# method:` comment".into()))?;
        let mut parts = header.split(',').map(str::trim);
        let method: Method = parts.next().unwrap_or_default().parse()?;
        let direction = match parts.next().and_then(|p| p.strip_prefix("direction:")) {
            Some(d) if d.trim() == "descending" => Direction::Descending,
            _ => Direction::Ascending,
        };
        let mut reader = csv::Reader::from_reader(input);
        let mut entries = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let line = i + 3;
            let field = |j: usize| {
                record.get(j).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("missing column {}", j + 1),
                })
            };
            let score = field(2)?.parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            entries.push(RankedEntry {
                word: field(1)?.to_owned(),
                score,
            });
        }
        Ok(Self {
            method,
            direction,
            entries,
        })
    }
}

//! Binary model format, all integers and floats little-endian:
//!
//! ```text
//! offset  size          field
//! 0       8             magic b"HSTOPEMB"
//! 8       4             format version (u32) = 1
//! 12      4             dim (u32)
//! 16      8             rows (u64), the vocabulary size
//! 24      32            SHA-256 of the vocabulary word list
//! 56      rows*dim*4    input vectors, row-major f32
//! ...     rows*dim*4    output vectors, row-major f32
//! ```
//!
//! The file must end exactly after the output matrix.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::EmbeddingModel;
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"HSTOPEMB";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 56;

pub fn write_model<W: Write>(model: &EmbeddingModel, mut out: W) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(model.dim as u32).to_le_bytes())?;
    out.write_all(&(model.rows as u64).to_le_bytes())?;
    out.write_all(&model.vocab_hash)?;
    for x in model.input.iter().chain(&model.output) {
        out.write_all(&x.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_model<R: Read>(mut input: R) -> Result<EmbeddingModel> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() < HEADER_LEN {
        return Err(Error::ModelFormat(format!(
            "file is {} bytes, shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if &bytes[..8] != MAGIC {
        return Err(Error::ModelFormat("bad magic".into()));
    }
    let u32_at = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
    let version = u32_at(8);
    if version != VERSION {
        return Err(Error::ModelFormat(format!("unsupported version {version}")));
    }
    let dim = u32_at(12) as usize;
    let rows = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
    if dim == 0 {
        return Err(Error::ModelFormat("dim is zero".into()));
    }
    let mut vocab_hash = [0u8; 32];
    vocab_hash.copy_from_slice(&bytes[24..56]);

    let cells = rows
        .checked_mul(dim)
        .ok_or_else(|| Error::ModelFormat("matrix size overflows".into()))?;
    let expected = HEADER_LEN + 2 * 4 * cells;
    if bytes.len() != expected {
        return Err(Error::ModelFormat(format!(
            "expected {expected} bytes for {rows}x{dim} matrices, found {}",
            bytes.len()
        )));
    }
    let mut floats = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()));
    let input: Vec<f32> = floats.by_ref().take(cells).collect();
    let output: Vec<f32> = floats.collect();
    Ok(EmbeddingModel {
        dim,
        rows,
        vocab_hash,
        input,
        output,
    })
}

pub fn save_model(model: &EmbeddingModel, path: impl AsRef<Path>) -> Result<()> {
    write_model(model, BufWriter::new(File::create(path)?))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<EmbeddingModel> {
    read_model(BufReader::new(File::open(path)?))
}

/// Load a model and refuse it unless it was trained on `vocab`.
pub fn load_model_for(path: impl AsRef<Path>, vocab: &Vocabulary) -> Result<EmbeddingModel> {
    let model = load_model(path)?;
    model.check_vocab(vocab)?;
    Ok(model)
}

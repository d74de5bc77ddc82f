use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::dataset::{read_matrix_csv, write_matrix_csv};
use crate::error::{Error, Result};

use super::{EmbeddingProvider, ProviderKind};

/// Reads an embedding matrix: `.csv` as headerless CSV, anything else as the
/// binary layout (`u32` rows, `u32` cols, then row-major `f64`, all
/// little-endian).
pub fn read_embeddings(path: &Path) -> Result<Array2<f64>> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        return read_matrix_csv(path);
    }
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 8 {
        return Err(Error::invalid(format!(
            "{}: truncated embedding header",
            path.display()
        )));
    }
    let rows = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let body = &bytes[8..];
    if body.len() != rows * cols * 8 {
        return Err(Error::invalid(format!(
            "{}: header declares {rows}x{cols} but body holds {} bytes",
            path.display(),
            body.len()
        )));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Array2::from_shape_vec((rows, cols), data).map_err(|e| Error::Shape(e.to_string()))
}

pub fn write_embeddings(path: &Path, m: &Array2<f64>) -> Result<()> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        return write_matrix_csv(path, m);
    }
    let rows = u32::try_from(m.nrows()).map_err(|_| Error::invalid("too many rows"))?;
    let cols = u32::try_from(m.ncols()).map_err(|_| Error::invalid("too many columns"))?;
    let mut out = Vec::with_capacity(8 + m.len() * 8);
    out.extend_from_slice(&rows.to_le_bytes());
    out.extend_from_slice(&cols.to_le_bytes());
    for v in m.iter() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Serves rows of a matrix loaded from disk; row `i` belongs to node `i`.
#[derive(Debug, Clone)]
pub struct PrecomputedEmbeddings {
    pub matrix: Array2<f64>,
    pub source: String,
}

impl PrecomputedEmbeddings {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(PrecomputedEmbeddings {
            matrix: read_embeddings(path)?,
            source: path.display().to_string(),
        })
    }
}

impl EmbeddingProvider for PrecomputedEmbeddings {
    fn kind(&self) -> ProviderKind {
        ProviderKind::PrecomputedFile
    }

    fn dimension(&self) -> usize {
        self.matrix.ncols()
    }

    fn describe(&self) -> String {
        format!("precomputed-file({})", self.source)
    }

    fn expected_rows(&self) -> Option<usize> {
        Some(self.matrix.nrows())
    }

    fn embed_batch(&self, offset: usize, texts: &[&str]) -> Result<Vec<Vec<f64>>> {
        Ok((offset..offset + texts.len())
            .map(|i| self.matrix.row(i).to_vec())
            .collect())
    }
}

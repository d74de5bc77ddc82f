//! Narrative embeddings: providers, batching, and column standardization.

mod hash;
mod precomputed;
mod remote;

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

pub use hash::{hash_embed, tokenize, HashEmbedder};
pub use precomputed::{read_embeddings, write_embeddings, PrecomputedEmbeddings};
pub use remote::{RemoteEmbedder, ENDPOINT_ENV};

use crate::error::{Error, Result};
use crate::narrate::NodeNarrative;

pub const DEFAULT_BATCH_SIZE: usize = 100;
pub const DEFAULT_DIM: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProviderKind {
    RemoteService,
    LocalHash,
    PrecomputedFile,
}

/// Source of one embedding vector per input text.
pub trait EmbeddingProvider: Sync {
    fn kind(&self) -> ProviderKind;

    fn dimension(&self) -> usize;

    fn batch_size(&self) -> usize {
        DEFAULT_BATCH_SIZE
    }

    /// Number of batches that may be outstanding at once.
    fn max_in_flight(&self) -> usize {
        1
    }

    fn describe(&self) -> String;

    /// Row count the provider can serve, if fixed in advance.
    fn expected_rows(&self) -> Option<usize> {
        None
    }

    /// Embeds `texts`, which start at corpus position `offset`.
    fn embed_batch(&self, offset: usize, texts: &[&str]) -> Result<Vec<Vec<f64>>>;
}

/// `n x d_z` embedding matrix; row `i` belongs to node `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    pub values: Array2<f64>,
    pub standardized: bool,
    pub provenance: String,
}

/// Embeds `texts` in batches of the provider's batch size. Up to
/// `max_in_flight` batches run concurrently; results are reassembled in
/// input order.
pub fn embed_texts(texts: &[&str], provider: &dyn EmbeddingProvider) -> Result<EmbeddingMatrix> {
    let n = texts.len();
    if n == 0 {
        return Err(Error::invalid("cannot embed an empty corpus"));
    }
    let dim = provider.dimension();
    let batch = provider.batch_size();
    if dim == 0 || batch == 0 {
        return Err(Error::invalid("provider dimension and batch size must be positive"));
    }
    if let Some(rows) = provider.expected_rows() {
        if rows != n {
            return Err(Error::RowCountMismatch {
                what: format!("embeddings from {}", provider.describe()),
                expected: n,
                found: rows,
            });
        }
    }

    let chunks: Vec<(usize, &[&str])> = texts
        .chunks(batch)
        .enumerate()
        .map(|(i, c)| (i * batch, c))
        .collect();
    let window = provider.max_in_flight().max(1);
    let mut values = Array2::zeros((n, dim));
    for group in chunks.chunks(window) {
        let results: Vec<Result<Vec<Vec<f64>>>> = if group.len() == 1 {
            vec![provider.embed_batch(group[0].0, group[0].1)]
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = group
                    .iter()
                    .map(|&(off, texts)| scope.spawn(move || provider.embed_batch(off, texts)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("embedding worker panicked"))
                    .collect()
            })
        };
        for (&(offset, texts), rows) in group.iter().zip(results) {
            let rows = rows?;
            if rows.len() != texts.len() {
                return Err(Error::DimensionMismatch {
                    what: format!("embedding batch at {offset} (vector count)"),
                    expected: texts.len(),
                    found: rows.len(),
                });
            }
            for (k, row) in rows.into_iter().enumerate() {
                if row.len() != dim {
                    return Err(Error::DimensionMismatch {
                        what: format!("embedding of text {}", offset + k),
                        expected: dim,
                        found: row.len(),
                    });
                }
                values.row_mut(offset + k).assign(&Array1::from(row));
            }
        }
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("embedding matrix".into()));
    }
    Ok(EmbeddingMatrix {
        values,
        standardized: false,
        provenance: provider.describe(),
    })
}

/// Embeds a narration corpus (row `i` = `narratives[i]`).
pub fn embed_corpus(
    narratives: &[NodeNarrative],
    provider: &dyn EmbeddingProvider,
) -> Result<EmbeddingMatrix> {
    let texts: Vec<&str> = narratives.iter().map(|n| n.text.as_str()).collect();
    embed_texts(&texts, provider)
}

/// Per-column population mean and standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnStats {
    pub mean: Array1<f64>,
    pub std: Array1<f64>,
}

impl ColumnStats {
    pub fn of(m: &Array2<f64>) -> Result<Self> {
        if m.nrows() < 2 {
            return Err(Error::invalid(format!(
                "standardization needs at least 2 rows, got {}",
                m.nrows()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix to standardize".into()));
        }
        let mean = m.mean_axis(Axis(0)).expect("non-empty");
        let std = m.var_axis(Axis(0), 0.0).mapv(f64::sqrt);
        Ok(ColumnStats { mean, std })
    }

    /// `(x - mean) / std` per column; zero-variance columns map to 0.
    pub fn apply(&self, m: &Array2<f64>) -> Result<Array2<f64>> {
        if m.ncols() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                what: "standardization statistics".into(),
                expected: self.mean.len(),
                found: m.ncols(),
            });
        }
        let mut out = m.clone();
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            let (mu, sigma) = (self.mean[j], self.std[j]);
            if sigma > 0.0 {
                col.mapv_inplace(|x| (x - mu) / sigma);
            } else {
                col.fill(0.0);
            }
        }
        Ok(out)
    }
}

/// Column-wise z-scores of a plain matrix.
pub fn zscore_columns(m: &Array2<f64>) -> Result<Array2<f64>> {
    ColumnStats::of(m)?.apply(m)
}

/// Z-score standardization with statistics taken from `m` itself.
pub fn zscore_standardize(m: &EmbeddingMatrix) -> Result<EmbeddingMatrix> {
    let stats = ColumnStats::of(&m.values)?;
    zscore_with_stats(m, &stats)
}

/// Z-score standardization with externally supplied (e.g. frozen) statistics.
pub fn zscore_with_stats(m: &EmbeddingMatrix, stats: &ColumnStats) -> Result<EmbeddingMatrix> {
    if m.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix to standardize".into()));
    }
    Ok(EmbeddingMatrix {
        values: stats.apply(&m.values)?,
        standardized: true,
        provenance: m.provenance.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    fn raw(values: Array2<f64>) -> EmbeddingMatrix {
        EmbeddingMatrix {
            values,
            standardized: false,
            provenance: "test".into(),
        }
    }

    #[test]
    fn zscore_examples() {
        let m = raw(array![[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]]);
        let z = zscore_standardize(&m).unwrap();
        assert!(z.standardized);
        let expected = [-1.224744871391589, 0.0, 1.224744871391589];
        for (i, e) in expected.iter().enumerate() {
            assert!((z.values[[i, 0]] - e).abs() < 1e-12);
            assert_eq!(z.values[[i, 1]], 0.0);
        }
        let again = zscore_standardize(&z).unwrap();
        for (a, b) in again.values.iter().zip(z.values.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn zscore_errors() {
        assert!(zscore_standardize(&raw(array![[1.0, 2.0]])).is_err());
        assert!(matches!(
            zscore_standardize(&raw(array![[1.0], [f64::NAN]])),
            Err(Error::NonFinite(_))
        ));
    }

    struct Echo;
    impl EmbeddingProvider for Echo {
        fn kind(&self) -> ProviderKind {
            ProviderKind::LocalHash
        }
        fn dimension(&self) -> usize {
            2
        }
        fn batch_size(&self) -> usize {
            3
        }
        fn max_in_flight(&self) -> usize {
            2
        }
        fn describe(&self) -> String {
            "echo".into()
        }
        fn embed_batch(&self, offset: usize, texts: &[&str]) -> Result<Vec<Vec<f64>>> {
            Ok(texts
                .iter()
                .enumerate()
                .map(|(k, t)| vec![(offset + k) as f64, t.len() as f64])
                .collect())
        }
    }

    #[test]
    fn concurrent_batches_reassemble_in_order() {
        let texts: Vec<String> = (0..10).map(|i| "x".repeat(i)).collect();
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let m = embed_texts(&refs, &Echo).unwrap();
        for i in 0..10 {
            assert_eq!(m.values.row(i).to_vec(), vec![i as f64, i as f64]);
        }
    }

    #[test]
    fn precomputed_row_mismatch() {
        let p = PrecomputedEmbeddings {
            matrix: Array2::zeros((2, 4)),
            source: "mem".into(),
        };
        let err = embed_texts(&["a", "b", "c"], &p).unwrap_err();
        assert!(matches!(err, Error::RowCountMismatch { expected: 3, found: 2, .. }));
    }

    proptest! {
        #[test]
        fn batch_size_does_not_change_rows(batch in 1usize..20, n in 1usize..40) {
            let texts: Vec<String> = (0..n).map(|i| format!("node {i} has degree {}", i % 7)).collect();
            let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
            let mut a = HashEmbedder::new(16, 3);
            a.batch_size = batch;
            let b = HashEmbedder::new(16, 3);
            prop_assert_eq!(embed_texts(&refs, &a).unwrap().values, embed_texts(&refs, &b).unwrap().values);
        }

        #[test]
        fn standardized_columns_have_unit_moments(
            rows in proptest::collection::vec(proptest::collection::vec(-100.0f64..100.0, 3), 2..30)
        ) {
            let n = rows.len();
            let m = Array2::from_shape_vec((n, 3), rows.concat()).unwrap();
            let z = zscore_columns(&m).unwrap();
            let stats = ColumnStats::of(&m).unwrap();
            for j in 0..3 {
                let col = z.column(j);
                let mean = col.sum() / n as f64;
                let std = (col.mapv(|x| (x - mean) * (x - mean)).sum() / n as f64).sqrt();
                prop_assert!(mean.abs() < 1e-6);
                if stats.std[j] > 1e-9 {
                    prop_assert!((std - 1.0).abs() < 1e-6);
                }
            }
            let again = zscore_columns(&z).unwrap();
            for (a, b) in again.iter().zip(z.iter()) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }
}

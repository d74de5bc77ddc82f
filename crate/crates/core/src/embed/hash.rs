use xxhash_rust::xxh3::xxh3_64_with_seed;

use crate::error::Result;

use super::{EmbeddingProvider, ProviderKind};

/// Lowercased word tokens with surrounding punctuation stripped; inner
/// punctuation (decimal points, hyphens, `%`) is kept so numbers survive.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| {
            w.trim_matches(|c: char| !c.is_alphanumeric() && c != '%')
                .to_lowercase()
        })
        .filter(|w| !w.is_empty())
        .collect()
}

/// Signed feature hashing of word unigrams and bigrams into `dim` buckets,
/// scaled by `1 / sqrt(feature count)`. Empty text maps to the zero vector.
pub fn hash_embed(text: &str, dim: usize, seed: u64) -> Vec<f64> {
    assert!(dim >= 1, "embedding dimension must be positive");
    let tokens = tokenize(text);
    let mut v = vec![0.0; dim];
    if tokens.is_empty() {
        return v;
    }
    let mut features = 0usize;
    let mut add = |key: &str| {
        let h = xxh3_64_with_seed(key.as_bytes(), seed);
        let bucket = (h % dim as u64) as usize;
        let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
        v[bucket] += sign;
        features += 1;
    };
    for t in &tokens {
        add(t);
    }
    let mut bigram = String::new();
    for pair in tokens.windows(2) {
        bigram.clear();
        bigram.push_str(&pair[0]);
        bigram.push('\u{1f}');
        bigram.push_str(&pair[1]);
        add(&bigram);
    }
    let scale = 1.0 / (features as f64).sqrt();
    v.iter_mut().for_each(|x| *x *= scale);
    v
}

/// Deterministic offline provider backed by [`hash_embed`].
#[derive(Debug, Clone)]
pub struct HashEmbedder {
    pub dim: usize,
    pub seed: u64,
    pub batch_size: usize,
}

impl HashEmbedder {
    pub fn new(dim: usize, seed: u64) -> Self {
        HashEmbedder {
            dim,
            seed,
            batch_size: super::DEFAULT_BATCH_SIZE,
        }
    }
}

impl EmbeddingProvider for HashEmbedder {
    fn kind(&self) -> ProviderKind {
        ProviderKind::LocalHash
    }

    fn dimension(&self) -> usize {
        self.dim
    }

    fn batch_size(&self) -> usize {
        self.batch_size
    }

    fn describe(&self) -> String {
        format!("local-hash(dim={}, seed={})", self.dim, self.seed)
    }

    fn embed_batch(&self, _offset: usize, texts: &[&str]) -> Result<Vec<Vec<f64>>> {
        Ok(texts
            .iter()
            .map(|t| hash_embed(t, self.dim, self.seed))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_text_is_zero() {
        assert!(hash_embed("", 16, 1).iter().all(|&x| x == 0.0));
        assert!(hash_embed("  ...  ", 16, 1).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn identical_texts_have_cosine_one() {
        let a = hash_embed("Node 3 has a degree of 4.", 64, 9);
        let b = hash_embed("Node 3 has a degree of 4.", 64, 9);
        assert_eq!(a, b);
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        let norm: f64 = a.iter().map(|x| x * x).sum::<f64>();
        assert!((dot / norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kcore_sentence_changes_vector() {
        let a = hash_embed("It has degree 4. It resides in the k-core layer 2.", 1024, 0);
        let b = hash_embed("It has degree 4. It resides in the k-core layer 3.", 1024, 0);
        assert!(a.iter().zip(&b).any(|(x, y)| x != y));
    }

    #[test]
    fn numbers_keep_decimal_points() {
        assert_eq!(tokenize("value of 0.154, top 1%."), ["value", "of", "0.154", "top", "1%"]);
    }

    proptest! {
        #[test]
        fn norm_is_bounded(text in "[a-z0-9 .,]{0,200}", dim in 1usize..64, seed in 0u64..100) {
            let v = hash_embed(&text, dim, seed);
            let toks = tokenize(&text).len();
            let features = if toks == 0 { 0 } else { 2 * toks - 1 };
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!(v.iter().all(|x| x.is_finite()));
            prop_assert!(norm <= (features as f64).sqrt() + 1e-12);
        }
    }
}

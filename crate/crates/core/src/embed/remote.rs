use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{EmbeddingProvider, ProviderKind};

/// Environment variable consulted when no endpoint is given explicitly.
pub const ENDPOINT_ENV: &str = "TERGAD_EMBED_ENDPOINT";

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [&'a str],
}

#[derive(Deserialize)]
struct EmbedResponse {
    embeddings: Vec<Vec<f64>>,
}

/// Client for an embedding service exposing `POST <endpoint>/embed` with
/// body `{"texts": [...]}` and reply `{"embeddings": [[...], ...]}`.
#[derive(Debug, Clone)]
pub struct RemoteEmbedder {
    pub endpoint: String,
    pub dim: usize,
    pub batch_size: usize,
    pub max_in_flight: usize,
    /// Retries after the first failed attempt.
    pub retries: usize,
    pub backoff: Duration,
    agent: ureq::Agent,
}

impl RemoteEmbedder {
    pub fn new(endpoint: impl Into<String>, dim: usize) -> Self {
        Self::with_timeout(endpoint, dim, Duration::from_secs(60))
    }

    pub fn with_timeout(endpoint: impl Into<String>, dim: usize, timeout: Duration) -> Self {
        RemoteEmbedder {
            endpoint: endpoint.into(),
            dim,
            batch_size: super::DEFAULT_BATCH_SIZE,
            max_in_flight: 4,
            retries: 3,
            backoff: Duration::from_millis(200),
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
        }
    }

    /// Endpoint from `explicit`, falling back to [`ENDPOINT_ENV`].
    pub fn resolve_endpoint(explicit: Option<&str>) -> Option<String> {
        explicit
            .map(str::to_string)
            .or_else(|| std::env::var(ENDPOINT_ENV).ok())
            .filter(|s| !s.is_empty())
    }

    fn url(&self) -> String {
        format!("{}/embed", self.endpoint.trim_end_matches('/'))
    }

    fn attempt(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>> {
        let resp = self
            .agent
            .post(&self.url())
            .send_json(EmbedRequest { texts })
            .map_err(|e| Error::Transport(e.to_string()))?;
        let body: EmbedResponse = resp
            .into_json()
            .map_err(|e| Error::Transport(format!("malformed response: {e}")))?;
        Ok(body.embeddings)
    }
}

impl EmbeddingProvider for RemoteEmbedder {
    fn kind(&self) -> ProviderKind {
        ProviderKind::RemoteService
    }

    fn dimension(&self) -> usize {
        self.dim
    }

    fn batch_size(&self) -> usize {
        self.batch_size
    }

    fn max_in_flight(&self) -> usize {
        self.max_in_flight
    }

    fn describe(&self) -> String {
        format!("remote-service({}, dim={})", self.url(), self.dim)
    }

    fn embed_batch(&self, offset: usize, texts: &[&str]) -> Result<Vec<Vec<f64>>> {
        let mut delay = self.backoff;
        let mut last = None;
        for attempt in 0..=self.retries {
            if attempt > 0 {
                log::warn!(
                    "embedding batch at {offset} failed (attempt {attempt}), retrying in {delay:?}"
                );
                std::thread::sleep(delay);
                delay *= 2;
            }
            match self.attempt(texts) {
                Ok(rows) => {
                    if rows.len() != texts.len() {
                        return Err(Error::DimensionMismatch {
                            what: format!("embedding batch at {offset} (vector count)"),
                            expected: texts.len(),
                            found: rows.len(),
                        });
                    }
                    return Ok(rows);
                }
                Err(e) => last = Some(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }
}

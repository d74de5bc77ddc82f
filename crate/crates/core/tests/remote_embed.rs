mod common;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use common::mock::{numbered_reply, MockServer};
use tergad::embed::{embed_texts, RemoteEmbedder};
use tergad::pipeline::ProviderConfig;
use tergad::Error;

fn texts(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("node {i}")).collect()
}

fn client(url: &str, dim: usize) -> RemoteEmbedder {
    let mut c = RemoteEmbedder::with_timeout(url, dim, Duration::from_secs(5));
    c.backoff = Duration::from_millis(5);
    c
}

#[test]
fn batches_of_one_hundred_reassembled_in_order() {
    let server = MockServer::start(Box::new(|_, t| (200, numbered_reply(t, 6))));
    let t = texts(250);
    let refs: Vec<&str> = t.iter().map(String::as_str).collect();
    let m = embed_texts(&refs, &client(&server.url, 6)).unwrap();
    let mut sizes = server.batch_sizes();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![50, 100, 100]);
    for i in 0..250 {
        assert_eq!(m.values[[i, 0]], i as f64);
    }
    assert!(!m.standardized);
}

#[test]
fn transient_failures_are_retried() {
    let calls = Arc::new(AtomicUsize::new(0));
    let c = calls.clone();
    let server = MockServer::start(Box::new(move |_, t| {
        if c.fetch_add(1, Ordering::SeqCst) < 2 {
            (503, "{}".into())
        } else {
            (200, numbered_reply(t, 4))
        }
    }));
    let t = texts(10);
    let refs: Vec<&str> = t.iter().map(String::as_str).collect();
    let m = embed_texts(&refs, &client(&server.url, 4)).unwrap();
    assert_eq!(calls.load(Ordering::SeqCst), 3);
    assert_eq!(m.values[[9, 0]], 9.0);
}

#[test]
fn persistent_failure_is_a_transport_error() {
    let server = MockServer::start(Box::new(|_, _| (500, "{}".into())));
    let t = texts(3);
    let refs: Vec<&str> = t.iter().map(String::as_str).collect();
    let mut c = client(&server.url, 4);
    c.retries = 2;
    let err = embed_texts(&refs, &c).unwrap_err();
    assert!(matches!(err, Error::Transport(_)), "{err}");
    assert_eq!(server.batch_sizes().len(), 3);
}

#[test]
fn wrong_vector_width_is_rejected() {
    let server = MockServer::start(Box::new(|_, t| (200, numbered_reply(t, 5))));
    let t = texts(3);
    let refs: Vec<&str> = t.iter().map(String::as_str).collect();
    let err = embed_texts(&refs, &client(&server.url, 4)).unwrap_err();
    assert!(matches!(err, Error::DimensionMismatch { expected: 4, found: 5, .. }), "{err}");
}

#[test]
fn wrong_vector_count_is_rejected() {
    let server = MockServer::start(Box::new(|_, t| (200, numbered_reply(&t[1..], 4))));
    let t = texts(3);
    let refs: Vec<&str> = t.iter().map(String::as_str).collect();
    let err = embed_texts(&refs, &client(&server.url, 4)).unwrap_err();
    assert!(matches!(err, Error::DimensionMismatch { expected: 3, found: 2, .. }), "{err}");
}

#[test]
fn malformed_reply_is_a_transport_error() {
    let server = MockServer::start(Box::new(|_, _| (200, "not json".into())));
    let err = embed_texts(&["a"], &client(&server.url, 4)).unwrap_err();
    assert!(matches!(err, Error::Transport(_)), "{err}");
}

#[test]
fn explicit_endpoint_wins_over_missing_config() {
    let server = MockServer::start(Box::new(|_, t| (200, numbered_reply(t, 3))));
    let cfg = ProviderConfig::Remote {
        endpoint: None,
        dim: 3,
        batch_size: 2,
        max_in_flight: 2,
    };
    let provider = cfg.build(Some(&server.url)).unwrap();
    let m = embed_texts(&["x 1", "x 2", "x 3"], provider.as_ref()).unwrap();
    assert_eq!(m.values.column(0).to_vec(), vec![1.0, 2.0, 3.0]);
    assert_eq!(server.batch_sizes().len(), 2);
}

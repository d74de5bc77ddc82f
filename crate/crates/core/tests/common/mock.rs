//! Minimal HTTP/1.1 server standing in for an embedding service.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};

/// Receives (request index, texts) and returns (status, body).
pub type Handler = dyn Fn(usize, &[String]) -> (u16, String) + Send + Sync;

pub struct MockServer {
    pub url: String,
    /// Texts per request, in arrival order.
    pub batches: Arc<Mutex<Vec<usize>>>,
}

fn read_request(stream: &TcpStream) -> Option<Vec<String>> {
    let mut reader = BufReader::new(stream);
    let mut len = 0;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).ok()? == 0 {
            return None;
        }
        if line == "\r\n" {
            break;
        }
        if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
            len = v.trim().parse().ok()?;
        }
    }
    let mut body = vec![0; len];
    reader.read_exact(&mut body).ok()?;
    let v: serde_json::Value = serde_json::from_slice(&body).ok()?;
    Some(
        v["texts"]
            .as_array()?
            .iter()
            .map(|t| t.as_str().unwrap_or_default().to_string())
            .collect(),
    )
}

impl MockServer {
    pub fn start(handler: Box<Handler>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        let batches = Arc::new(Mutex::new(Vec::new()));
        let log = batches.clone();
        let handler: Arc<Handler> = Arc::from(handler);
        std::thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(mut stream) = stream else { continue };
                let log = log.clone();
                let handler = handler.clone();
                std::thread::spawn(move || {
                    let Some(texts) = read_request(&stream) else { return };
                    let idx = {
                        let mut l = log.lock().unwrap();
                        l.push(texts.len());
                        l.len() - 1
                    };
                    let (status, body) = handler(idx, &texts);
                    let _ = write!(
                        stream,
                        "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                        body.len()
                    );
                });
            }
        });
        MockServer { url, batches }
    }

    pub fn batch_sizes(&self) -> Vec<usize> {
        self.batches.lock().unwrap().clone()
    }
}

/// Reply with `dim`-wide vectors whose first entry encodes the text's
/// trailing number, so row order can be checked.
pub fn numbered_reply(texts: &[String], dim: usize) -> String {
    let rows: Vec<Vec<f64>> = texts
        .iter()
        .map(|t| {
            let mut v = vec![0.5; dim];
            v[0] = t.rsplit(' ').next().and_then(|s| s.parse().ok()).unwrap_or(-1.0);
            v
        })
        .collect();
    serde_json::json!({ "embeddings": rows }).to_string()
}

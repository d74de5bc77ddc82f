//! Remote embedding client against an in-process mock service.
//!
//! Point `--endpoint` (or `TERGAD_EMBED_ENDPOINT`) at a real service with the
//! same `POST /embed` contract to use it instead.
//!
//! ```sh
//! cargo run --example remote_embed
//! ```

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use tergad::embed::{embed_texts, RemoteEmbedder};

const DIM: usize = 8;

/// Answers each request with one vector per text: its length, then zeros.
fn serve(listener: TcpListener, requests: Arc<AtomicUsize>) {
    for stream in listener.incoming() {
        let Ok(mut stream) = stream else { continue };
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut len = 0;
        loop {
            let mut line = String::new();
            if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
                break;
            }
            if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                len = v.trim().parse().unwrap_or(0);
            }
        }
        let mut body = vec![0; len];
        if reader.read_exact(&mut body).is_err() {
            continue;
        }
        requests.fetch_add(1, Ordering::SeqCst);
        let req: serde_json::Value = serde_json::from_slice(&body).unwrap_or_default();
        let rows: Vec<Vec<f64>> = req["texts"]
            .as_array()
            .map(|a| a.iter().map(|t| {
                let mut v = vec![0.0; DIM];
                v[0] = t.as_str().map_or(0, str::len) as f64;
                v
            }).collect())
            .unwrap_or_default();
        let reply = serde_json::json!({ "embeddings": rows }).to_string();
        let _ = write!(
            stream,
            "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
            reply.len()
        );
    }
}

fn main() -> tergad::Result<()> {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind");
    let addr = listener.local_addr().expect("addr");
    let requests = Arc::new(AtomicUsize::new(0));
    let counter = requests.clone();
    std::thread::spawn(move || serve(listener, counter));

    let endpoint = RemoteEmbedder::resolve_endpoint(None).unwrap_or(format!("http://{addr}"));
    let mut client = RemoteEmbedder::new(endpoint, DIM);
    client.batch_size = 4;

    let texts: Vec<String> = (0..10).map(|i| format!("node {i} {}", "x".repeat(i))).collect();
    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    let m = embed_texts(&refs, &client)?;
    println!("{}", m.provenance);
    println!("first column (text lengths): {:?}", m.values.column(0).to_vec());
    println!("requests served: {}", requests.load(Ordering::SeqCst));
    Ok(())
}

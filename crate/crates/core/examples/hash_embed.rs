//! Local feature-hashing embeddings: deterministic, offline, and
//! z-scored per dimension before they reach the model.
//!
//! ```sh
//! cargo run --example hash_embed
//! ```

use tergad::embed::{embed_texts, tokenize, zscore_standardize, HashEmbedder};

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

fn main() -> tergad::Result<()> {
    let texts = [
        "Node 4 has a degree of 12, placing it in the top 10% of all nodes.",
        "Node 9 has a degree of 11, placing it in the top 10% of all nodes.",
        "With a local clustering coefficient of 0.000, none of its neighbors are linked.",
    ];
    println!("tokens: {:?}", tokenize(texts[0]));

    let provider = HashEmbedder::new(512, 0);
    let raw = embed_texts(&texts, &provider)?;
    println!("{} ({} x {})", raw.provenance, raw.values.nrows(), raw.values.ncols());
    let rows: Vec<Vec<f64>> = raw.values.rows().into_iter().map(|r| r.to_vec()).collect();
    println!("cos(0,1) = {:.3}", cosine(&rows[0], &rows[1]));
    println!("cos(0,2) = {:.3}", cosine(&rows[0], &rows[2]));

    let again = embed_texts(&texts, &provider)?;
    assert_eq!(raw.values, again.values);

    let z = zscore_standardize(&raw)?;
    let col = z.values.column(0);
    println!(
        "after z-scoring column 0: mean {:.2e}, standardized = {}",
        col.mean().unwrap_or(0.0),
        z.standardized
    );
    Ok(())
}

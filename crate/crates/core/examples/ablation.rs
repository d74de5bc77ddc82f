//! Paired variant comparison on the synthetic two-block graph.
//!
//! ```sh
//! cargo run --release --example ablation -- full w/o-gate w/o-prompt
//! ```

use tergad::pipeline::{format_table, run_ablation, RunConfig, Variant};

fn main() -> tergad::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let mut variants: Vec<Variant> = std::env::args()
        .skip(1)
        .map(|s| s.parse())
        .collect::<tergad::Result<_>>()?;
    if variants.is_empty() {
        variants = vec![Variant::Full, Variant::WithoutGate, Variant::WithoutPrompt];
    }
    let cfg = RunConfig {
        output_dir: std::env::temp_dir().join("tergad-ablation"),
        ..Default::default()
    };
    let res = run_ablation(&cfg, &variants, None)?;
    print!("{}", format_table(&res.rows));
    println!("shared dataset hashes: {:?}", res.content_hashes);
    Ok(())
}

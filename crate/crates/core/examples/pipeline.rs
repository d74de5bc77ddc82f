//! End-to-end run from a TOML config: inject, profile, narrate, embed,
//! train, score, and evaluate for every seed.
//!
//! ```sh
//! cargo run --release --example pipeline -- examples/configs/toy.toml
//! ```

use std::path::PathBuf;

use tergad::pipeline::{format_table, run_pipeline, RunConfig};

fn main() -> tergad::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/toy.toml"));
    let mut cfg = RunConfig::load(&path)?;
    cfg.output_dir = std::env::temp_dir().join("tergad-pipeline");
    cfg.plot = true;

    let res = run_pipeline(&cfg, None)?;
    print!("{}", format_table(std::slice::from_ref(&res)));
    let mut files: Vec<_> = std::fs::read_dir(&res.dir)
        .expect("run directory")
        .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
        .collect();
    files.sort();
    println!("\n{}:", res.dir.display());
    for f in files {
        println!("  {f}");
    }
    Ok(())
}

//! Writing and reading the on-disk dataset format: a TOML manifest next to
//! an edge list, an attribute CSV, optional labels, and optional node ids.
//!
//! ```sh
//! cargo run --example dataset_io
//! ```

use ndarray::array;
use tergad::{load_dataset, save_dataset, Dataset, Graph};

fn main() -> tergad::Result<()> {
    let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)])?;
    let x = array![[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.5, 0.25]];
    let mut ds = Dataset::new("square", g, x, Some(vec![0, 0, 1, 0]))?;
    ds.original_ids = vec![10, 20, 30, 40];

    let dir = std::env::temp_dir().join("tergad-dataset-io");
    let manifest = save_dataset(&ds, &dir)?;
    println!("{}:\n{}", manifest.display(), std::fs::read_to_string(&manifest).expect("manifest"));

    let back = load_dataset(&manifest)?;
    assert_eq!(back, ds);
    println!("round trip ok, content hash {}", back.content_hash());
    Ok(())
}

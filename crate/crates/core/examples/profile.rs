//! Structural profile of a small hand-made graph: two triangles joined by a
//! bridge plus a pendant node.
//!
//! ```sh
//! cargo run --example profile
//! ```

use tergad::features::{build_profiles, fiedler_value, profiles_to_csv, ProfileConfig};
use tergad::Graph;

fn main() -> tergad::Result<()> {
    let g = Graph::new(7, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5), (5, 6)])?;
    let (profiles, summary) = build_profiles(&g, 0, &ProfileConfig::default());

    println!(
        "n={} m={} communities={} max k-core={} fiedler={:.4}",
        summary.n,
        summary.m,
        summary.num_communities,
        summary.max_core,
        fiedler_value(&g)?
    );
    for p in &profiles {
        println!(
            "node {}: deg {} tri {} cc {:.3} core {} betweenness {:.3} closeness {:.3} role {}",
            p.node_id,
            p.degree,
            p.triangles,
            p.clustering,
            p.kcore,
            p.betweenness_centrality,
            p.closeness_centrality,
            p.role.as_str()
        );
    }
    println!("\n{}", profiles_to_csv(&profiles));
    Ok(())
}

//! Narratives for the nodes of a small graph in both styles, and a
//! shuffled corpus whose sentences match the canonical one as a multiset.
//!
//! ```sh
//! cargo run --example narrate
//! ```

use tergad::features::{build_profiles, ProfileConfig};
use tergad::narrate::{render_corpus, ContentFlag, NarrationConfig, Style};
use tergad::Graph;

fn main() -> tergad::Result<()> {
    let g = Graph::new(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (3, 5), (4, 5)])?;
    let (profiles, summary) = build_profiles(&g, 0, &ProfileConfig::default());

    let narrative = NarrationConfig::default();
    let corpus = render_corpus(&profiles, &summary, &narrative)?;
    println!("narrative style, node 2:\n{}\n", corpus[2].text);

    let profile_style = NarrationConfig {
        style: Style::Profile,
        ..Default::default()
    };
    let compact = render_corpus(&profiles, &summary, &profile_style)?;
    println!("profile style, node 2:\n{}\n", compact[2].text);

    // Dropping content removes the matching sentences.
    let no_centrality = NarrationConfig::default().without(ContentFlag::Centrality);
    let short = render_corpus(&profiles, &summary, &no_centrality)?;
    println!(
        "without centrality: {} -> {} sentences",
        corpus[2].sentence_spans.len(),
        short[2].sentence_spans.len()
    );

    let shuffled = render_corpus(
        &profiles,
        &summary,
        &NarrationConfig {
            shuffle_seed: Some(11),
            ..Default::default()
        },
    )?;
    println!("\nshuffled, node 2:\n{}", shuffled[2].text);
    for (a, b) in corpus.iter().zip(&shuffled) {
        let mut x: Vec<_> = a.sentences().collect();
        let mut y: Vec<_> = b.sentences().collect();
        x.sort();
        y.sort();
        assert_eq!(x, y, "node {}", a.node_id);
    }
    println!("\nsentence multisets agree for all {} nodes", corpus.len());
    Ok(())
}

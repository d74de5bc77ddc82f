//! Train the gated dual-branch autoencoder on an injected block-model graph,
//! score nodes, and round-trip the checkpoint.
//!
//! ```sh
//! cargo run --release --example train_score
//! ```

use tergad::embed::{embed_texts, zscore_standardize, HashEmbedder};
use tergad::features::ProfileConfig;
use tergad::metrics::evaluate;
use tergad::model::{load_checkpoint, save_checkpoint, score, train, Fusion, Hyperparams};
use tergad::narrate::{render_corpus, NarrationConfig};
use tergad::perturb::{inject, InjectionConfig};
use tergad::pipeline::{model_inputs, profile_dataset};
use tergad::synth::{sbm, SbmConfig};

fn main() -> tergad::Result<()> {
    let (base, blocks) = sbm(&SbmConfig {
        block_size: 100,
        ..Default::default()
    })?;
    let (ds, _) = inject(&base, &blocks, &InjectionConfig::with_count(10, 1))?;
    let labels = ds.labels.clone().expect("labelled");

    let (profiles, summary) = profile_dataset(&ds, 0, &ProfileConfig::default());
    let corpus = render_corpus(&profiles, &summary, &NarrationConfig::default())?;
    let texts: Vec<&str> = corpus.iter().map(|c| c.text.as_str()).collect();
    let z = zscore_standardize(&embed_texts(&texts, &HashEmbedder::new(256, 0))?)?;
    let inputs = model_inputs(&ds, Some(&z.values), &profiles)?;

    for fusion in [Fusion::Gate, Fusion::Concat] {
        let hyper = Hyperparams {
            fusion,
            hidden: 32,
            epochs: 100,
            ..Default::default()
        };
        let out = train(&inputs, &hyper)?;
        let first = out.history.first().map_or(f64::NAN, |l| l.total);
        let last = out.history.last().map_or(f64::NAN, |l| l.total);
        let s = score(&out.params, &inputs, &hyper, hyper.alpha)?;
        let m = evaluate(s.scores.as_slice().expect("contiguous"), &labels, 0)?;
        println!(
            "{:<8} loss {first:.3} -> {last:.3}  ROC-AUC {:.4}  PR-AUC {:.4}  Recall@K {:.4}",
            fusion.as_str(),
            m.roc_auc,
            m.pr_auc,
            m.recall_at_k
        );

        let path = std::env::temp_dir().join(format!("tergad-{}.ckpt", fusion.as_str()));
        save_checkpoint(&out.params, &path)?;
        let restored = load_checkpoint(&path)?;
        assert_eq!(restored, out.params);
        assert_eq!(score(&restored, &inputs, &hyper, hyper.alpha)?, s);
    }
    Ok(())
}

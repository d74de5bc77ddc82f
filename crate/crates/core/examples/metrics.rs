//! Ranking metrics on a hand-sized example, aggregation across seeds, and
//! SVG curves.
//!
//! ```sh
//! cargo run --example metrics
//! ```

use tergad::metrics::{
    aggregate_seeds, evaluate, pr_auc, pr_curve, recall_at_k, roc_auc, roc_curve, table_csv,
};
use tergad::plot::{pr_svg, roc_svg};

fn main() -> tergad::Result<()> {
    let scores = [0.9, 0.8, 0.8, 0.6, 0.4, 0.3, 0.2, 0.1];
    let labels = [1, 0, 1, 1, 0, 0, 1, 0];
    println!("ROC-AUC   {:.4}", roc_auc(&scores, &labels)?);
    println!("PR-AUC    {:.4}", pr_auc(&scores, &labels)?);
    for k in 1..=4 {
        println!("Recall@{k}  {:.4}", recall_at_k(&scores, &labels, k)?);
    }

    // Three "seeds" with shifted scores.
    let per_seed: Vec<_> = (0..3u64)
        .map(|s| {
            let shifted: Vec<f64> = scores
                .iter()
                .enumerate()
                .map(|(i, x)| x + 0.05 * ((i as u64 * 7 + s) % 3) as f64)
                .collect();
            evaluate(&shifted, &labels, s)
        })
        .collect::<tergad::Result<_>>()?;
    let report = aggregate_seeds(&per_seed)?;
    print!("\n{}", table_csv(&[("demo".into(), "toy".into(), report)]));

    let dir = std::env::temp_dir();
    let roc = vec![("demo".to_string(), roc_curve(&scores, &labels)?)];
    let pr = vec![("demo".to_string(), pr_curve(&scores, &labels)?)];
    std::fs::write(dir.join("tergad-roc.svg"), roc_svg("ROC", &roc)).expect("write svg");
    std::fs::write(dir.join("tergad-pr.svg"), pr_svg("Precision-recall", &pr)).expect("write svg");
    println!("\ncurves written to {}", dir.display());
    Ok(())
}

mod common;

use common::oracles::*;
use tergad::metrics::{pr_auc, roc_auc};

#[test]
fn roc_auc_matches_pairwise_oracle_with_ties() {
    let (worst, tied) = roc_oracle_sweep(5);
    assert!(worst <= 1e-12, "max error {worst:e}");
    assert!(tied > 100, "only {tied} instances had ties");
}

#[test]
fn average_precision_matches_hand_values() {
    let bad = check_ap_cases();
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn tied_scores_rank_by_index() {
    // All tied: ranking is index order, so AP of labels [0, 1] is 1/2 and of
    // [1, 0] is 1.
    assert_eq!(pr_auc(&[0.5, 0.5], &[0, 1]).unwrap(), 0.5);
    assert_eq!(pr_auc(&[0.5, 0.5], &[1, 0]).unwrap(), 1.0);
    assert_eq!(roc_auc(&[0.5, 0.5], &[0, 1]).unwrap(), 0.5);
}

mod common;

use std::fs;

use ndarray::Array2;
use proptest::prelude::*;
use tergad::{load_dataset, save_dataset, Dataset, Error, Graph};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn save_load_round_trip(
        n in 2usize..20,
        es in proptest::collection::vec((0usize..20, 0usize..20), 0..40),
        d in 1usize..5,
        id_offset in -1000i64..1000,
        labelled in any::<bool>(),
    ) {
        let edges = es.into_iter().map(|(u, v)| (u % n, v % n)).filter(|(u, v)| u != v);
        let g = Graph::new(n, edges).unwrap();
        let x = Array2::from_shape_fn((n, d), |(i, j)| (i * 7 + j) as f64 / 3.0 - 1.25);
        let labels = labelled.then(|| (0..n).map(|i| (i % 3 == 0) as u8).collect());
        let mut ds = Dataset::new("prop", g, x, labels).unwrap();
        ds.original_ids = (0..n as i64).map(|i| id_offset + 3 * i).collect();
        let dir = tempfile::tempdir().unwrap();
        let back = load_dataset(&save_dataset(&ds, dir.path()).unwrap()).unwrap();
        prop_assert_eq!(back.content_hash(), ds.content_hash());
        prop_assert_eq!(back, ds);
    }
}

#[test]
fn hand_written_manifest_with_original_ids() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(
        p.join("m.toml"),
        "name = \"hand\"\nnodes = 3\nedges = \"e.txt\"\nattributes = \"x.csv\"\nnode_ids = \"ids.txt\"\ndirected = true\n",
    )
    .unwrap();
    fs::write(p.join("e.txt"), "# comment\n101 205\n205 101\n205 307\n").unwrap();
    fs::write(p.join("x.csv"), "1,0\n0,1\n0.5,0.5\n").unwrap();
    fs::write(p.join("ids.txt"), "101\n205\n307\n").unwrap();
    let ds = load_dataset(&p.join("m.toml")).unwrap();
    assert_eq!(ds.graph.m(), 2);
    assert!(ds.graph.has_edge(0, 1) && ds.graph.has_edge(1, 2));
    assert_eq!(ds.original_ids, vec![101, 205, 307]);
    assert!(ds.labels.is_none());

    fs::write(p.join("e.txt"), "101 999\n").unwrap();
    let err = load_dataset(&p.join("m.toml")).unwrap_err();
    assert!(matches!(err, Error::NodeOutOfRange { id: 999, .. }), "{err}");
}

#[test]
fn content_hash_tracks_every_component() {
    let g = Graph::new(3, [(0, 1)]).unwrap();
    let x = Array2::zeros((3, 2));
    let a = Dataset::new("h", g.clone(), x.clone(), None).unwrap();
    let mut b = a.clone();
    b.attributes[[2, 1]] = 1e-9;
    let c = Dataset::new("h", Graph::new(3, [(1, 2)]).unwrap(), x.clone(), None).unwrap();
    let d = Dataset::new("h", g, x, Some(vec![0, 0, 1])).unwrap();
    let hashes = [a.content_hash(), b.content_hash(), c.content_hash(), d.content_hash()];
    for i in 0..4 {
        for j in i + 1..4 {
            assert_ne!(hashes[i], hashes[j], "{i} vs {j}");
        }
    }
}

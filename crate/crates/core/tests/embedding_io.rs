use std::fmt::Write as _;
use std::fs;

use weighted_sims::embed::{export_embeddings, import_embeddings, train_bpr, BprConfig};
use weighted_sims::recommend::{top_n, Metric, WeightConfig};
use weighted_sims::synthetic::{generate, SyntheticSpec};
use weighted_sims::{Error, IdMap};

#[test]
fn exported_embeddings_give_identical_lists() {
    let m = generate(&SyntheticSpec::new(30, 25, 200).with_seed(3)).unwrap();
    let e = train_bpr(&m, &BprConfig::new(5, 0.05, 0.01, 7)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bpr.wse");
    export_embeddings(&e, m.user_map(), m.item_map(), &path).unwrap();
    let back = import_embeddings(&path, m.user_map(), m.item_map()).unwrap();
    assert_eq!(back.users(), e.users());
    assert_eq!(back.items(), e.items());
    for metric in Metric::ALL {
        let w = WeightConfig::new(2.0, 3.0, metric).unwrap();
        assert_eq!(top_n(&e, &m, &w, 10, None).unwrap(), top_n(&back, &m, &w, 10, None).unwrap());
    }
}

#[test]
fn hand_written_wide_file_imports() {
    let d = 200;
    let users = IdMap::from_ids(["alice", "bob"], "user").unwrap();
    let items = IdMap::from_ids(["x", "y", "z"], "item").unwrap();
    let mut text = format!("WSE\t1\t{d}\nUSERS\t2\n");
    for (id, base) in [("bob", 2.0), ("alice", 1.0)] {
        text.push_str(id);
        for k in 0..d {
            write!(text, "\t{}", base + k as f64 / 1000.0).unwrap();
        }
        text.push('\n');
    }
    text.push_str("ITEMS\t3\n");
    for (id, base) in [("x", -1.0), ("y", 0.5), ("z", 0.25)] {
        text.push_str(id);
        for _ in 0..d {
            write!(text, "\t{base}").unwrap();
        }
        text.push('\n');
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wide.wse");
    fs::write(&path, text).unwrap();
    let e = import_embeddings(&path, &users, &items).unwrap();
    assert_eq!(e.dim(), 200);
    assert_eq!(e.user(0)[0], 1.0);
    assert_eq!(e.user(1)[199], 2.199);
    assert_eq!(e.item(2), vec![0.25; 200].as_slice());
}

#[test]
fn missing_item_is_named() {
    let users = IdMap::from_ids(["u"], "user").unwrap();
    let items = IdMap::from_ids(["kept", "lost"], "item").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.wse");
    fs::write(&path, "WSE\t1\t2\nUSERS\t1\nu\t1\t2\nITEMS\t1\nkept\t3\t4\n").unwrap();
    let err = import_embeddings(&path, &users, &items).unwrap_err();
    assert!(err.to_string().contains("\"lost\""), "{err}");
    assert!(matches!(err, Error::MissingId { kind: "item", .. }));

    let absent = import_embeddings(&dir.path().join("none.wse"), &users, &items).unwrap_err();
    assert!(matches!(absent, Error::Io { .. }));
}

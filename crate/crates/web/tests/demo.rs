use splatbench_web::{catalog_json, demo_clouds, render_rgba, score_noisy, DEMO_POINTS};

#[test]
fn render_sizes_and_modes() {
    for mode in ["affordance", "depth"] {
        let px = render_rgba("mug", "jitter", 3, 1, 0, 12, 32, mode).unwrap();
        assert_eq!(px.len(), 32 * 32 * 4);
        assert!(px.chunks(4).all(|c| c[3] == 255));
    }
    assert!(render_rgba("mug", "clean", 1, 1, 12, 12, 32, "depth").is_err());
    assert!(render_rgba("teapot", "clean", 1, 1, 0, 12, 32, "depth").is_err());
    assert!(render_rgba("mug", "clean", 1, 1, 0, 12, 32, "normals").is_err());
}

#[test]
fn render_is_deterministic_and_corruption_changes_pixels() {
    let a = render_rgba("chair", "drop_local", 5, 2, 1, 6, 40, "depth").unwrap();
    let b = render_rgba("chair", "drop_local", 5, 2, 1, 6, 40, "depth").unwrap();
    let clean = render_rgba("chair", "clean", 5, 2, 1, 6, 40, "depth").unwrap();
    assert_eq!(a, b);
    assert_ne!(a, clean);
}

#[test]
fn corrupted_counts() {
    let (clean, dropped) = demo_clouds("bowl", "drop_global", 1, 0).unwrap();
    assert_eq!(clean.n_points(), DEMO_POINTS);
    assert_eq!(dropped.n_points(), 1536);
    let (_, added) = demo_clouds("bowl", "add_local", 3, 0).unwrap();
    assert_eq!(added.n_points(), DEMO_POINTS + 300);
}

#[test]
fn scores_are_perfect_without_noise() {
    let v: serde_json::Value = serde_json::from_str(&score_noisy("mug", "clean", 1, 4, 0.0).unwrap()).unwrap();
    assert_eq!(v["auc"], 1.0);
    assert_eq!(v["mae"], 0.0);
    let v: serde_json::Value = serde_json::from_str(&score_noisy("mug", "rotate", 2, 4, 0.2).unwrap()).unwrap();
    assert!(v["mae"].as_f64().unwrap() > 0.0);
}

#[test]
fn catalog_lists_table_order() {
    let v: serde_json::Value = serde_json::from_str(&catalog_json()).unwrap();
    assert_eq!(v["kinds"].as_array().unwrap().len(), 7);
    assert_eq!(v["kinds"][0]["label"], "Scale");
    assert_eq!(v["shapes"].as_array().unwrap().len(), 3);
}

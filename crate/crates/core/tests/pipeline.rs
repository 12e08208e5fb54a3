use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wnn_core::compression::{encode, load_code, reconstruct, save_code};
use wnn_core::data::generate::{blobs, circle, GeneratorSpec};
use wnn_core::data::io::{load_csv, load_table, save_csv, write_condensed_csv};
use wnn_core::data::{evaluate, split, Family, Method, MethodConfig, SplitSpec};
use wnn_core::{consistency_check, enemy_distances, greedy_wnn, hart_cnn, Dataset, Metric, WnnClassifier};

#[test]
fn csv_to_code_and_back() {
    let dir = tempfile::tempdir().unwrap();
    let ds = circle(150, 4).unwrap();
    let data_path = dir.path().join("circle.csv");
    save_csv(&ds, &data_path).unwrap();
    let loaded = load_csv(&data_path, "label").unwrap();
    assert_eq!(loaded, ds);

    let (set, _) = greedy_wnn(&loaded).unwrap();
    assert!(consistency_check(&loaded, &set).consistent);

    let code_path = dir.path().join("code.csv");
    save_code(&encode(&loaded, &set).unwrap(), &code_path).unwrap();
    let clf = reconstruct(&load_code(&code_path, Metric::Euclidean).unwrap()).unwrap();
    let original = WnnClassifier::from_condensed(&loaded, &set);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..2000 {
        let q = [rng.gen_range(-3.5..3.5), rng.gen_range(-3.5..3.5)];
        assert_eq!(clf.classify(&q), original.classify(&q));
    }
}

#[test]
fn condensed_file_carries_weights() {
    let ds = blobs(80, 3, 2.0, 0.7, 2).unwrap();
    let (set, _) = greedy_wnn(&ds).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("condensed.csv");
    write_condensed_csv(&ds, &set, std::fs::File::create(&path).unwrap()).unwrap();

    let table = load_table(&path, "label", Metric::Euclidean).unwrap();
    let radii = enemy_distances(&ds);
    let expected: Vec<f64> = set.indices().iter().map(|&i| radii[i]).collect();
    assert_eq!(table.weights.unwrap(), expected);
    assert_eq!(table.dataset.len(), set.len());

    // The file alone reproduces the classifier.
    let clf = WnnClassifier::new(
        Metric::Euclidean,
        table.dataset.points().to_vec(),
        expected,
    )
    .unwrap();
    assert_eq!(clf.error_rate(&ds), 0.0);
}

#[test]
fn every_method_is_consistent_on_its_training_split() {
    let ds = GeneratorSpec { n: 90, seed: 8, ..GeneratorSpec::new(Family::Blobs) }.generate().unwrap();
    let (train, test) = split(&ds, SplitSpec { train_fraction: 0.6, seed: 3 }).unwrap();
    assert_eq!(train.len() + test.len(), ds.len());
    for method in Method::ALL {
        let r = evaluate(&train, &test, method, MethodConfig::default()).unwrap();
        assert!(r.consistent, "{method}");
        assert!(r.compression_ratio > 0.0 && r.compression_ratio <= 1.0);
        assert!((0.0..=1.0).contains(&r.test_error));
    }
}

#[test]
fn hart_output_depends_only_on_seed() {
    let ds = circle(200, 6).unwrap();
    let runs: Vec<_> = (0..3).map(|_| hart_cnn(&ds, 42).unwrap()).collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
    assert!(consistency_check(&ds, &runs[0]).consistent);
}

#[test]
fn other_metrics_condense_consistently() {
    let ds = circle(120, 3).unwrap();
    for metric in [Metric::Manhattan, Metric::Chebyshev] {
        let ds = Dataset::new(ds.points().to_vec(), metric).unwrap();
        let (set, _) = greedy_wnn(&ds).unwrap();
        assert!(consistency_check(&ds, &set).consistent, "{metric}");
    }
}

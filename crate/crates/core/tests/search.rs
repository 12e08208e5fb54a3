use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wnn_core::{Metric, NavigatingNet};

fn scan(pts: &[Vec<f64>], w: &[f64], q: &[f64], metric: Metric) -> f64 {
    pts.iter()
        .zip(w)
        .map(|(p, wi)| metric.dist(q, p) / wi)
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn guarantee_holds_for_every_metric() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let pts: Vec<Vec<f64>> = (0..300)
        .map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let w: Vec<f64> = (0..300).map(|_| rng.gen_range(0.1..10.0)).collect();
    for metric in [Metric::Euclidean, Metric::Manhattan, Metric::Chebyshev] {
        let net = NavigatingNet::build(pts.clone(), w.clone(), metric).unwrap();
        for _ in 0..300 {
            let q: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let opt = scan(&pts, &w, &q, metric);
            for eps in [0.05, 0.3, 0.9] {
                let loose = net.query(&q, eps).unwrap();
                assert!(loose.wdist <= (1.0 + 8.0 * eps) * opt, "{metric} eps={eps}");
                let tight = net.query_within(&q, eps).unwrap();
                assert!(tight.wdist <= (1.0 + eps) * opt, "{metric} eps={eps}");
            }
        }
    }
}

#[test]
fn clustered_points_with_skewed_weights() {
    // Tight clusters far apart stress the heaviest-point annotation.
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut pts = Vec::new();
    let mut w = Vec::new();
    for c in 0..10 {
        let center = [c as f64 * 100.0, (c % 3) as f64 * 50.0];
        for _ in 0..40 {
            pts.push(vec![center[0] + rng.gen_range(-1.0..1.0), center[1] + rng.gen_range(-1.0..1.0)]);
            w.push(if rng.gen_bool(0.02) { 500.0 } else { rng.gen_range(0.5..2.0) });
        }
    }
    let net = NavigatingNet::build(pts.clone(), w.clone(), Metric::Euclidean).unwrap();
    for _ in 0..500 {
        let q = [rng.gen_range(-100.0..1000.0), rng.gen_range(-50.0..150.0)];
        let opt = scan(&pts, &w, &q, Metric::Euclidean);
        let got = net.query(&q, 0.1).unwrap();
        assert!(got.wdist <= 1.8 * opt);
    }
}

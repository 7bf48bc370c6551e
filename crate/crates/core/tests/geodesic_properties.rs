use bloch_core::geodesic::{min_weight_bound, straight_segment_cost};
use bloch_core::hyperbolic::hyperbolic_distance;
use bloch_core::{geodesic_distance, path_cost, Domain, GeodesicOptions, Point, Weight};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_point(rng: &mut ChaCha8Rng, dim: usize, max_norm: f64) -> Point {
    loop {
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-max_norm..max_norm)).collect();
        if x.iter().map(|v| v * v).sum::<f64>().sqrt() <= max_norm {
            return Point::new(x).unwrap();
        }
    }
}

fn d(w: &Weight, a: &Point, b: &Point) -> f64 {
    geodesic_distance(w, a, b, &GeodesicOptions::default()).unwrap().value
}

#[test]
fn symmetric_on_random_pairs() {
    let w = Weight::hyperbolic(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let a = random_point(&mut rng, 2, 0.9);
        let b = random_point(&mut rng, 2, 0.9);
        let (ab, ba) = (d(&w, &a, &b), d(&w, &b, &a));
        assert!((ab - ba).abs() <= 1e-6 * ab.max(ba), "{a} {b}: {ab} vs {ba}");
    }
}

#[test]
fn triangle_inequality_on_random_triples() {
    let w = Weight::hyperbolic(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..100 {
        let a = random_point(&mut rng, 2, 0.9);
        let b = random_point(&mut rng, 2, 0.9);
        let c = random_point(&mut rng, 2, 0.9);
        let direct = d(&w, &a, &b);
        let via = d(&w, &a, &c) + d(&w, &c, &b);
        assert!(direct <= via + 1e-5, "{a} {b} via {c}: {direct} > {via}");
    }
}

fn oracle_agreement(dim: usize, seed: u64) {
    let w = Weight::hyperbolic(dim).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = random_point(&mut rng, dim, 0.9);
        let b = random_point(&mut rng, dim, 0.9);
        let exact = hyperbolic_distance(&a, &b).unwrap();
        let rel = (d(&w, &a, &b) - exact).abs() / exact;
        worst = worst.max(rel);
    }
    assert!(worst <= 1e-3, "dimension {dim}: worst relative error {worst}");
}

#[test]
fn matches_closed_form_in_the_disc() {
    oracle_agreement(2, 23);
}

#[test]
fn matches_closed_form_in_the_three_ball() {
    oracle_agreement(3, 24);
}

#[test]
fn more_control_points_never_cost_more() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let weights = [
        Weight::hyperbolic(2).unwrap(),
        Weight::from_spec("power:0.5", Domain::unit_ball(2).unwrap()).unwrap(),
        Weight::parse("(1-r^2)*(1+0.5*x1^2)", Domain::unit_ball(2).unwrap()).unwrap(),
    ];
    for w in &weights {
        for _ in 0..8 {
            let a = random_point(&mut rng, 2, 0.9);
            let b = random_point(&mut rng, 2, 0.9);
            let values: Vec<f64> = [17, 33, 65]
                .iter()
                .map(|&n| {
                    let opts = GeodesicOptions {
                        control_points: n,
                        ..GeodesicOptions::default()
                    };
                    geodesic_distance(w, &a, &b, &opts).unwrap().value
                })
                .collect();
            assert!(values[1] <= values[0] + 1e-9, "{a} {b}: {values:?}");
            assert!(values[2] <= values[1] + 1e-9, "{a} {b}: {values:?}");
        }
    }
}

#[test]
fn never_worse_than_the_straight_segment() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let w = Weight::hyperbolic(3).unwrap();
    for _ in 0..50 {
        let a = random_point(&mut rng, 3, 0.95);
        let b = random_point(&mut rng, 3, 0.95);
        let r = geodesic_distance(&w, &a, &b, &GeodesicOptions::default()).unwrap();
        let straight = straight_segment_cost(&w, &a, &b).unwrap();
        assert!(r.value <= straight * (1.0 + 1e-12), "{a} {b}");
        assert!(r.value <= min_weight_bound(&w, &a, &b).unwrap() * (1.0 + 1e-12));
        let recomputed = path_cost(&r.path, &w, 16).unwrap();
        assert!((r.value - recomputed).abs() <= 1e-12 * r.value.max(1.0));
        assert_eq!(r.path.start(), &a);
        assert_eq!(r.path.end(), &b);
    }
}

use bloch_core::geometry::{path_cost, GaussLegendre, segment_cost};
use bloch_core::{Domain, Path, Point, Weight};
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn in_disc() -> impl Strategy<Value = Point> {
    (0.0..0.9f64, 0.0..std::f64::consts::TAU)
        .prop_map(|(r, t)| Point::new(vec![r * t.cos(), r * t.sin()]).unwrap())
}

fn hyperbolic() -> Weight {
    Weight::hyperbolic(2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn path_cost_is_additive(pts in prop::collection::vec(in_disc(), 3..8), cut in 1usize..6) {
        let w = hyperbolic();
        let cut = cut.min(pts.len() - 2);
        let a = Path::new(pts[..=cut].to_vec()).unwrap();
        let b = Path::new(pts[cut..].to_vec()).unwrap();
        let whole = Path::new(pts.clone()).unwrap();
        let sum = path_cost(&a, &w, 8).unwrap() + path_cost(&b, &w, 8).unwrap();
        let joined = path_cost(&a.concat(&b).unwrap(), &w, 8).unwrap();
        prop_assert!((path_cost(&whole, &w, 8).unwrap() - sum).abs() <= 1e-12 * sum.max(1.0));
        prop_assert!((joined - sum).abs() <= 1e-12 * sum.max(1.0));
    }

    #[test]
    fn path_cost_is_reversal_invariant(pts in prop::collection::vec(in_disc(), 2..8)) {
        let w = hyperbolic();
        let p = Path::new(pts).unwrap();
        let fwd = path_cost(&p, &w, 8).unwrap();
        let back = path_cost(&p.reversed(), &w, 8).unwrap();
        prop_assert!((fwd - back).abs() <= 1e-12 * fwd.max(1e-300));
    }

    #[test]
    fn weight_eval_is_deterministic(p in in_disc()) {
        let w = Weight::parse("(1-r^2)^1.5 + 0.1*exp(-x1^2)", Domain::unit_ball(2).unwrap()).unwrap();
        prop_assert_eq!(w.eval(&p).unwrap().to_bits(), w.eval(&p).unwrap().to_bits());
    }
}

#[test]
fn quadrature_refinement_converges() {
    let w = hyperbolic();
    let a = Point::new(vec![-0.3, 0.1]).unwrap();
    let b = Point::new(vec![0.8, 0.2]).unwrap();
    let costs: Vec<f64> = [1, 2, 4, 8, 16, 32]
        .iter()
        .map(|&n| segment_cost(&a, &b, &w, &GaussLegendre::new(n).unwrap()).unwrap())
        .collect();
    let diffs: Vec<f64> = costs.windows(2).map(|c| (c[1] - c[0]).abs()).collect();
    for d in diffs.windows(2) {
        assert!(d[1] <= d[0] || d[1] < 1e-13, "{costs:?}");
    }
    assert!(diffs.last().unwrap() < &1e-10);
}

#[test]
fn parsed_hyperbolic_matches_builtin_on_random_points() {
    let ball = Domain::unit_ball(3).unwrap();
    let parsed = Weight::parse("1-r^2", ball.clone()).unwrap();
    let builtin = Weight::hyperbolic(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut n = 0;
    while n < 1000 {
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        if x.iter().map(|v| v * v).sum::<f64>() >= 0.999 {
            continue;
        }
        let p = Point::new(x).unwrap();
        assert!((parsed.eval(&p).unwrap() - builtin.eval(&p).unwrap()).abs() <= 1e-15);
        n += 1;
    }
}

use bloch_core::sampling::direction_set;
use bloch_core::seminorms::{kernel_supremum, weight_supremum};
use bloch_core::{
    check_admissible, AdmissibilityOptions, DistanceProvider, Domain, Kernel, Point, Sampler, Weight,
};
use proptest::prelude::*;

fn disc_point() -> impl Strategy<Value = Point> {
    (0.0..0.99f64, 0.0..std::f64::consts::TAU)
        .prop_map(|(r, t)| Point::new(vec![r * t.cos(), r * t.sin()]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn min_kernel_below_geometric_mean(z in disc_point(), e in disc_point()) {
        let min = Kernel::min_weight(Weight::hyperbolic(2).unwrap());
        let gm = Kernel::geometric_mean(2).unwrap();
        prop_assert!(min.eval(&z, &e).unwrap() <= gm.eval(&z, &e).unwrap());
    }
}

#[test]
fn kernel_supremum_equals_weight_supremum() {
    let w = Weight::hyperbolic(2).unwrap();
    let s = Sampler::grid(40).pairs(2000);
    let sup_w = weight_supremum(&w, &s).unwrap().value;
    let kernels = [
        Kernel::geometric_mean(2).unwrap(),
        Kernel::min_weight(w.clone()),
        Kernel::canonical(w.clone(), DistanceProvider::Hyperbolic),
    ];
    for k in &kernels {
        let sup_k = kernel_supremum(k, &s).unwrap().value;
        assert!(sup_k <= sup_w + 1e-12, "{}: {sup_k} > {sup_w}", k.label());
        assert!(sup_w - sup_k <= 1e-5, "{}: {sup_k} vs {sup_w}", k.label());
    }
}

fn sphere_minimum(k: &Kernel, z: &Point, r: f64) -> f64 {
    direction_set(z.dim(), 32, 7)
        .iter()
        .map(|u| k.eval(z, &z.offset(u, r)).unwrap())
        .fold(f64::INFINITY, f64::min)
}

fn diagonal_trend(w: &Weight, dist: DistanceProvider) {
    let k = Kernel::canonical(w.clone(), dist);
    for c in [[0.0, 0.0], [0.3, -0.2], [-0.6, 0.5], [0.85, 0.1]] {
        let z = Point::new(c.to_vec()).unwrap();
        let wz = w.eval(&z).unwrap();
        let mins: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&r| sphere_minimum(&k, &z, r)).collect();
        assert!(mins[0] <= mins[1] + 1e-9 * wz && mins[1] <= mins[2] + 1e-9 * wz, "{z}: {mins:?}");
        assert!(mins.iter().all(|m| *m <= wz * (1.0 + 1e-9)), "{z}: {mins:?} vs {wz}");
        assert!((wz - mins[2]) / wz < 1e-3, "{z}: {mins:?} vs {wz}");
    }
}

#[test]
fn canonical_kernel_tends_to_the_weight_on_the_diagonal() {
    diagonal_trend(&Weight::hyperbolic(2).unwrap(), DistanceProvider::Hyperbolic);
}

#[test]
fn canonical_kernel_tends_to_the_weight_with_geodesic_distances() {
    let w = Weight::from_spec("power:0.5", Domain::unit_ball(2).unwrap()).unwrap();
    diagonal_trend(&w, DistanceProvider::geodesic(w.clone()));
}

#[test]
fn reports_serialize_with_lowercase_verdicts() {
    let w = Weight::hyperbolic(2).unwrap();
    let opts = AdmissibilityOptions {
        sample_pairs: 200,
        w3_centers: 8,
        ..AdmissibilityOptions::default()
    };
    let good = check_admissible(&Kernel::geometric_mean(2).unwrap(), &w, &DistanceProvider::Hyperbolic, &opts).unwrap();
    let v = serde_json::to_value(&good).unwrap();
    for c in ["w1", "w2", "w3", "w4"] {
        assert_eq!(v[c]["verdict"], "pass", "{c}");
    }
    assert_eq!(v["options"]["liminf_radii"], serde_json::json!([1e-2, 1e-3, 1e-4]));

    let bad = Kernel::geometric_mean(2).unwrap().scaled(3.0);
    let report = check_admissible(&bad, &w, &DistanceProvider::Hyperbolic, &opts).unwrap();
    let v = serde_json::to_value(&report).unwrap();
    assert_eq!(v["w2"]["verdict"], "fail");
    let witness = &v["w2"]["violations"][0];
    assert!(witness["measured"].as_f64().unwrap() > witness["bound"].as_f64().unwrap());
}

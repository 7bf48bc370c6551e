//! Two-point kernels `W(ζ, η)` and a sampled checker for the admissibility
//! conditions:
//!
//! * W1 symmetry `W(ζ,η) = W(η,ζ)`
//! * W2 diagonal `W(ζ,ζ) = w(ζ)`
//! * W3 diagonal lower limit `liminf_{η→ζ} W(ζ,η) ≥ w(ζ)`
//! * W4 distance bound `d_w(ζ,η) W(ζ,η) ≤ |ζ−η|`

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geodesic::DistanceProvider;
use crate::geometry::{Domain, Point};
use crate::sampling::{direction_set, low_discrepancy_pairs};
use crate::weights::{Weight, WeightSource};

pub type KernelFn = Arc<dyn Fn(&Point, &Point) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
pub enum KernelKind {
    /// `|ζ−η| / d_w(ζ,η)` off the diagonal, `w(ζ)` on it.
    Canonical {
        weight: Weight,
        distance: DistanceProvider,
    },
    /// `√(1−|ζ|²) √(1−|η|²)` on the unit ball.
    GeometricMean,
    /// `min{w(ζ), w(η)}`.
    MinWeight { weight: Weight },
    Custom { label: String, eval: KernelFn },
    /// `max{k(ζ,η), k(η,ζ)}`.
    Symmetrized(Box<Kernel>),
}

#[derive(Clone)]
pub struct Kernel {
    kind: KernelKind,
    domain: Domain,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Kernel({} on {})", self.label(), self.domain.describe())
    }
}

impl Kernel {
    /// Admissible for any weight; evaluation solves for `d_w` unless the
    /// distance provider is closed-form.
    pub fn canonical(weight: Weight, distance: DistanceProvider) -> Self {
        let domain = weight.domain().clone();
        Kernel {
            kind: KernelKind::Canonical { weight, distance },
            domain,
        }
    }

    pub fn geometric_mean(dim: usize) -> Result<Self> {
        Ok(Kernel {
            kind: KernelKind::GeometricMean,
            domain: Domain::unit_ball(dim)?,
        })
    }

    /// Admissible when `w` decreases in `|ζ|` on a convex domain.
    pub fn min_weight(weight: Weight) -> Self {
        let domain = weight.domain().clone();
        Kernel {
            kind: KernelKind::MinWeight { weight },
            domain,
        }
    }

    pub fn custom(
        label: impl Into<String>,
        domain: Domain,
        eval: impl Fn(&Point, &Point) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Kernel {
            kind: KernelKind::Custom {
                label: label.into(),
                eval: Arc::new(eval),
            },
            domain,
        }
    }

    /// Built-in kernel by CLI name: `canonical`, `geometric-mean` or `min`.
    pub fn by_name(name: &str, weight: &Weight, distance: DistanceProvider) -> Result<Self> {
        match name {
            "canonical" => Ok(Kernel::canonical(weight.clone(), distance)),
            "geometric-mean" | "geometric_mean" => {
                if !matches!(weight.domain(), Domain::UnitBall { .. }) {
                    return Err(Error::InvalidParameter(
                        "the geometric-mean kernel is defined on the unit ball only".into(),
                    ));
                }
                Kernel::geometric_mean(weight.dim())
            }
            "min" | "min-weight" | "min_weight" => Ok(Kernel::min_weight(weight.clone())),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }

    /// `c · k` as a custom kernel.
    pub fn scaled(&self, c: f64) -> Kernel {
        let inner = self.clone();
        Kernel::custom(format!("{c}*{}", self.label()), self.domain.clone(), move |z, e| {
            Ok(c * inner.eval(z, e)?)
        })
    }

    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn label(&self) -> String {
        match &self.kind {
            KernelKind::Canonical { .. } => "canonical".into(),
            KernelKind::GeometricMean => "geometric-mean".into(),
            KernelKind::MinWeight { .. } => "min".into(),
            KernelKind::Custom { label, .. } => label.clone(),
            KernelKind::Symmetrized(k) => format!("sym({})", k.label()),
        }
    }

    /// Built-in kinds are symmetric by construction.
    pub fn is_builtin(&self) -> bool {
        matches!(
            self.kind,
            KernelKind::Canonical { .. } | KernelKind::GeometricMean | KernelKind::MinWeight { .. }
        )
    }

    pub fn eval(&self, z: &Point, e: &Point) -> Result<f64> {
        for p in [z, e] {
            if !self.domain.contains(p)? {
                return Err(Error::OutsideDomain {
                    point: p.coords().to_vec(),
                });
            }
        }
        let v = match &self.kind {
            KernelKind::Canonical { weight, distance } => {
                if z == e {
                    weight.eval(z)?
                } else {
                    z.distance(e) / distance.distance(z, e)?
                }
            }
            KernelKind::GeometricMean => (1.0 - z.norm_sq()).sqrt() * (1.0 - e.norm_sq()).sqrt(),
            KernelKind::MinWeight { weight } => weight.eval(z)?.min(weight.eval(e)?),
            KernelKind::Custom { eval, .. } => eval(z, e)?,
            KernelKind::Symmetrized(k) => k.eval(z, e)?.max(k.eval(e, z)?),
        };
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::NonPositiveWeight {
                point: z.coords().to_vec(),
                value: v,
            })
        }
    }
}

/// Replaces `k` by `max{k(ζ,η), k(η,ζ)}`; built-in and already
/// symmetrized kernels are returned unchanged.
pub fn symmetrize(k: &Kernel) -> Kernel {
    if k.is_builtin() || matches!(k.kind, KernelKind::Symmetrized(_)) {
        return k.clone();
    }
    Kernel {
        kind: KernelKind::Symmetrized(Box::new(k.clone())),
        domain: k.domain.clone(),
    }
}

/// Whether the weight is the hyperbolic weight `1 − |ζ|²` on the ball.
pub fn is_hyperbolic_weight(w: &Weight) -> bool {
    matches!(w.source(), WeightSource::Hyperbolic) && matches!(w.domain(), Domain::UnitBall { .. })
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityOptions {
    pub sample_pairs: usize,
    /// Decreasing radii of the spheres used for W3.
    pub liminf_radii: Vec<f64>,
    pub sphere_samples: usize,
    /// Number of centres probed for W3.
    pub w3_centers: usize,
    /// W1 and W2.
    pub exact_tolerance: f64,
    /// W3 and W4.
    pub limit_tolerance: f64,
    pub boundary_margin: f64,
    pub seed: u64,
}

impl Default for AdmissibilityOptions {
    fn default() -> Self {
        AdmissibilityOptions {
            sample_pairs: 10_000,
            liminf_radii: vec![1e-2, 1e-3, 1e-4],
            sphere_samples: 32,
            w3_centers: 64,
            exact_tolerance: 1e-6,
            limit_tolerance: 1e-3,
            boundary_margin: 0.02,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_ok(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// A sampled pair breaking a condition. `measured` is the tested quantity
/// and `bound` the value it had to respect.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub z: Vec<f64>,
    pub e: Vec<f64>,
    pub measured: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub verdict: Verdict,
    pub checked: usize,
    pub violation_count: usize,
    /// First violations in sample order (at most [`MAX_WITNESSES`]).
    pub violations: Vec<Witness>,
    /// Largest relative excess over the bound among checked samples.
    pub worst_relative_excess: f64,
}

pub const MAX_WITNESSES: usize = 32;

impl ConditionReport {
    fn from_checks(checks: impl IntoIterator<Item = (Witness, bool)>) -> Self {
        let mut checked = 0;
        let mut violation_count = 0;
        let mut violations = Vec::new();
        let mut worst = f64::NEG_INFINITY;
        for (w, ok) in checks {
            checked += 1;
            let excess = (w.measured - w.bound) / w.bound.abs().max(f64::MIN_POSITIVE);
            worst = worst.max(excess);
            if !ok {
                violation_count += 1;
                if violations.len() < MAX_WITNESSES {
                    violations.push(w);
                }
            }
        }
        ConditionReport {
            verdict: Verdict::from_ok(violation_count == 0),
            checked,
            violation_count,
            violations,
            worst_relative_excess: if checked == 0 { 0.0 } else { worst },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub kernel: String,
    pub distance: String,
    pub w1: ConditionReport,
    pub w2: ConditionReport,
    pub w3: ConditionReport,
    pub w4: ConditionReport,
    pub samples_used: usize,
    /// Pairs dropped because the kernel, weight or distance failed.
    pub skipped: usize,
    pub options: AdmissibilityOptions,
}

impl AdmissibilityReport {
    pub fn verdict(&self) -> Verdict {
        Verdict::from_ok([&self.w1, &self.w2, &self.w3, &self.w4].iter().all(|c| c.verdict.passed()))
    }
}

struct PairSample {
    w1: Witness,
    w1_ok: bool,
    w4: Witness,
    w4_ok: bool,
}

/// Tests W1–W4 on sampled pairs. Violations are reported, never raised.
///
/// W3 probes `sphere_samples` directions at each radius around each centre;
/// the smallest ratio `W(ζ,η)/w(ζ)` per radius is extrapolated linearly to
/// radius zero from the two smallest radii, and the better of that limit
/// and the smallest-radius value must reach `1 − limit_tolerance`.
pub fn check_admissible(
    k: &Kernel,
    w: &Weight,
    dist: &DistanceProvider,
    opts: &AdmissibilityOptions,
) -> Result<AdmissibilityReport> {
    if opts.sample_pairs == 0 {
        return Err(Error::InvalidParameter("sample_pairs must be at least 1".into()));
    }
    if k.domain().dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            found: k.domain().dim(),
        });
    }
    let mut radii = opts.liminf_radii.clone();
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidParameter("liminf radii must be positive".into()));
    }
    radii.sort_by(|a, b| b.total_cmp(a));

    let domain = w.domain();
    let pairs = low_discrepancy_pairs(domain, opts.boundary_margin, opts.sample_pairs, opts.seed);
    if pairs.is_empty() {
        return Err(Error::EmptySample);
    }
    let dim = w.dim();
    let directions = direction_set(dim, opts.sphere_samples.max(1), opts.seed ^ 0xD1);
    let centers: Vec<&Point> = pairs.iter().map(|(z, _)| z).take(opts.w3_centers).collect();

    // sphere pairs double as extra W1/W4 samples close to the diagonal
    let mut sphere_pairs = Vec::new();
    for z in &centers {
        for &r in &radii {
            for d in &directions {
                let e = z.offset(d, r);
                if domain.contains_coords(e.coords()) {
                    sphere_pairs.push(((*z).clone(), e));
                }
            }
        }
    }

    let eval_pair = |(z, e): &(Point, Point)| -> Option<PairSample> {
        let kze = k.eval(z, e).ok()?;
        let kez = k.eval(e, z).ok()?;
        let d = dist.distance(z, e).ok()?;
        let sep = z.distance(e);
        let w1_bound = opts.exact_tolerance * kze;
        let w1 = Witness {
            z: z.coords().to_vec(),
            e: e.coords().to_vec(),
            measured: (kze - kez).abs(),
            bound: w1_bound,
        };
        let w4_bound = sep * (1.0 + opts.limit_tolerance);
        let w4 = Witness {
            z: z.coords().to_vec(),
            e: e.coords().to_vec(),
            measured: d * kze,
            bound: w4_bound,
        };
        Some(PairSample {
            w1_ok: w1.measured <= w1.bound,
            w1,
            w4_ok: w4.measured <= w4.bound,
            w4,
        })
    };

    let all_pairs: Vec<&(Point, Point)> = pairs.iter().chain(sphere_pairs.iter()).collect();
    let results: Vec<Option<PairSample>> = all_pairs.par_iter().map(|p| eval_pair(p)).collect();
    let skipped_pairs = results.iter().filter(|r| r.is_none()).count();
    let ok_results: Vec<PairSample> = results.into_iter().flatten().collect();

    let w2_results: Vec<Option<(Witness, bool)>> = pairs
        .par_iter()
        .map(|(z, _)| {
            let kzz = k.eval(z, z).ok()?;
            let wz = w.eval(z).ok()?;
            let wit = Witness {
                z: z.coords().to_vec(),
                e: z.coords().to_vec(),
                measured: kzz,
                bound: wz,
            };
            let ok = (kzz - wz).abs() <= opts.exact_tolerance * wz;
            Some((wit, ok))
        })
        .collect();
    let skipped_w2 = w2_results.iter().filter(|r| r.is_none()).count();

    let w3_results: Vec<Option<(Witness, bool)>> = centers
        .par_iter()
        .map(|z| {
            let wz = w.eval(z).ok()?;
            let mut profile = Vec::with_capacity(radii.len());
            let mut worst_e = None;
            for &r in &radii {
                let mut lowest = f64::INFINITY;
                for d in &directions {
                    let e = z.offset(d, r);
                    if !domain.contains_coords(e.coords()) {
                        continue;
                    }
                    if let Ok(v) = k.eval(z, &e) {
                        if v < lowest {
                            lowest = v;
                            worst_e = Some(e);
                        }
                    }
                }
                if lowest.is_finite() {
                    profile.push((r, lowest / wz));
                }
            }
            let &(r_small, m_small) = profile.last()?;
            let limit = if profile.len() >= 2 {
                let (r_big, m_big) = profile[profile.len() - 2];
                let extrapolated = m_small + (m_small - m_big) * r_small / (r_big - r_small);
                extrapolated.max(m_small)
            } else {
                m_small
            };
            let wit = Witness {
                z: z.coords().to_vec(),
                e: worst_e?.into_coords(),
                measured: limit * wz,
                bound: wz * (1.0 - opts.limit_tolerance),
            };
            let ok = limit >= 1.0 - opts.limit_tolerance;
            Some((wit, ok))
        })
        .collect();
    let skipped_w3 = w3_results.iter().filter(|r| r.is_none()).count();

    let w1 = ConditionReport::from_checks(ok_results.iter().map(|s| (s.w1.clone(), s.w1_ok)));
    let w4 = ConditionReport::from_checks(ok_results.iter().map(|s| (s.w4.clone(), s.w4_ok)));
    let w2 = ConditionReport::from_checks(w2_results.into_iter().flatten());
    let w3 = ConditionReport::from_checks(w3_results.into_iter().flatten());

    Ok(AdmissibilityReport {
        kernel: k.label(),
        distance: dist.describe().to_string(),
        w1,
        w2,
        w3,
        w4,
        samples_used: all_pairs.len(),
        skipped: skipped_pairs + skipped_w2 + skipped_w3,
        options: opts.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::hyperbolic_distance;
    use approx::assert_relative_eq;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn small_opts() -> AdmissibilityOptions {
        AdmissibilityOptions {
            sample_pairs: 500,
            w3_centers: 16,
            ..AdmissibilityOptions::default()
        }
    }

    #[test]
    fn eval_examples() {
        let w = Weight::hyperbolic(2).unwrap();
        let gm = Kernel::geometric_mean(2).unwrap();
        assert_eq!(gm.eval(&pt(&[0.0, 0.0]), &pt(&[0.0, 0.0])).unwrap(), 1.0);
        let mk = Kernel::min_weight(w.clone());
        assert_relative_eq!(mk.eval(&pt(&[0.5, 0.0]), &pt(&[0.0, 0.8])).unwrap(), 0.36, epsilon = 1e-15);
        let can = Kernel::canonical(w, DistanceProvider::Hyperbolic);
        let v = can.eval(&pt(&[0.0, 0.0]), &pt(&[0.5, 0.0])).unwrap();
        assert_relative_eq!(v, 0.5 / 0.5f64.atanh(), epsilon = 1e-14);
        assert_relative_eq!(v, 0.910239, epsilon = 1e-6);
    }

    #[test]
    fn canonical_with_geodesic_matches_closed_form() {
        let w = Weight::hyperbolic(2).unwrap();
        let can = Kernel::canonical(w.clone(), DistanceProvider::geodesic(w));
        let v = can.eval(&pt(&[0.0, 0.0]), &pt(&[0.5, 0.0])).unwrap();
        assert_relative_eq!(v, 0.5 / 0.5f64.atanh(), max_relative = 1e-4);
        assert_eq!(can.eval(&pt(&[0.3, 0.1]), &pt(&[0.3, 0.1])).unwrap(), 1.0 - 0.1);
    }

    #[test]
    fn builtins_are_symmetric_and_hit_the_weight_on_the_diagonal() {
        let w = Weight::hyperbolic(2).unwrap();
        let z = pt(&[0.31, -0.52]);
        let e = pt(&[-0.7, 0.11]);
        for k in [
            Kernel::geometric_mean(2).unwrap(),
            Kernel::min_weight(w.clone()),
            Kernel::canonical(w.clone(), DistanceProvider::Hyperbolic),
        ] {
            assert_eq!(k.eval(&z, &e).unwrap(), k.eval(&e, &z).unwrap());
            assert_relative_eq!(k.eval(&z, &z).unwrap(), w.eval(&z).unwrap(), epsilon = 1e-15);
        }
    }

    #[test]
    fn symmetrize_examples() {
        let w = Weight::hyperbolic(2).unwrap();
        let gm = Kernel::geometric_mean(2).unwrap();
        let z = pt(&[0.2, 0.4]);
        let e = pt(&[-0.5, 0.1]);
        assert_eq!(symmetrize(&gm).eval(&z, &e).unwrap(), gm.eval(&z, &e).unwrap());

        let wc = w.clone();
        let left = Kernel::custom("w(z)", w.domain().clone(), move |z, _| wc.eval(z));
        let sym = symmetrize(&left);
        let expect = w.eval(&z).unwrap().max(w.eval(&e).unwrap());
        assert_eq!(sym.eval(&z, &e).unwrap(), expect);
        assert_eq!(sym.eval(&e, &z).unwrap(), expect);
        let twice = symmetrize(&sym);
        assert_eq!(twice.eval(&z, &e).unwrap(), sym.eval(&z, &e).unwrap());
        assert_eq!(twice.label(), sym.label());
    }

    #[test]
    fn geometric_mean_passes_with_closed_form() {
        let w = Weight::hyperbolic(2).unwrap();
        let k = Kernel::geometric_mean(2).unwrap();
        let r = check_admissible(&k, &w, &DistanceProvider::Hyperbolic, &small_opts()).unwrap();
        assert_eq!(r.verdict(), Verdict::Pass, "{r:#?}");
        assert_eq!(r.skipped, 0);
    }

    #[test]
    fn scaled_kernel_fails_the_diagonal_condition() {
        let w = Weight::hyperbolic(2).unwrap();
        let k = Kernel::geometric_mean(2).unwrap().scaled(2.0);
        let r = check_admissible(&k, &w, &DistanceProvider::Hyperbolic, &small_opts()).unwrap();
        assert_eq!(r.w2.verdict, Verdict::Fail);
        let wit = &r.w2.violations[0];
        assert_relative_eq!(wit.measured, 2.0 * wit.bound, max_relative = 1e-14);
        assert_eq!(r.w1.verdict, Verdict::Pass);
        assert_eq!(r.w3.verdict, Verdict::Pass);
        assert_eq!(r.w4.verdict, Verdict::Fail);
    }

    #[test]
    fn half_kernel_fails_the_liminf_condition() {
        let w = Weight::hyperbolic(2).unwrap();
        let k = Kernel::min_weight(w.clone()).scaled(0.5);
        let r = check_admissible(&k, &w, &DistanceProvider::Hyperbolic, &small_opts()).unwrap();
        assert_eq!(r.w3.verdict, Verdict::Fail);
        assert_eq!(r.w4.verdict, Verdict::Pass);
    }

    #[test]
    fn asymmetric_kernel_fails_symmetry() {
        let w = Weight::hyperbolic(2).unwrap();
        let wc = w.clone();
        let k = Kernel::custom("w(z)", w.domain().clone(), move |z, _| wc.eval(z));
        let r = check_admissible(&k, &w, &DistanceProvider::Hyperbolic, &small_opts()).unwrap();
        assert_eq!(r.w1.verdict, Verdict::Fail);
        assert!(r.w1.violations.len() <= MAX_WITNESSES);
        assert!(r.w1.violation_count >= r.w1.violations.len());
    }

    #[test]
    fn min_kernel_passes_with_geodesic_distances() {
        let w = Weight::hyperbolic(2).unwrap();
        let k = Kernel::min_weight(w.clone());
        let opts = AdmissibilityOptions {
            sample_pairs: 40,
            w3_centers: 4,
            sphere_samples: 8,
            ..AdmissibilityOptions::default()
        };
        let r = check_admissible(&k, &w, &DistanceProvider::geodesic(w.clone()), &opts).unwrap();
        assert_eq!(r.verdict(), Verdict::Pass, "{r:#?}");
    }

    #[test]
    fn canonical_product_reproduces_euclidean_distance() {
        let w = Weight::hyperbolic(2).unwrap();
        let k = Kernel::canonical(w.clone(), DistanceProvider::geodesic(w));
        for (z, e) in [
            (pt(&[0.1, 0.2]), pt(&[-0.6, 0.3])),
            (pt(&[0.7, -0.1]), pt(&[0.2, 0.8])),
        ] {
            let prod = hyperbolic_distance(&z, &e).unwrap() * k.eval(&z, &e).unwrap();
            assert_relative_eq!(prod, z.distance(&e), max_relative = 1e-3);
        }
    }

    #[test]
    fn rejects_bad_options() {
        let w = Weight::hyperbolic(2).unwrap();
        let k = Kernel::geometric_mean(2).unwrap();
        let zero = AdmissibilityOptions {
            sample_pairs: 0,
            ..AdmissibilityOptions::default()
        };
        assert!(check_admissible(&k, &w, &DistanceProvider::Hyperbolic, &zero).is_err());
        let k3 = Kernel::geometric_mean(3).unwrap();
        assert!(check_admissible(&k3, &w, &DistanceProvider::Hyperbolic, &small_opts()).is_err());
    }

    #[test]
    fn by_name() {
        let w = Weight::hyperbolic(2).unwrap();
        assert_eq!(Kernel::by_name("min", &w, DistanceProvider::Hyperbolic).unwrap().label(), "min");
        assert!(matches!(
            Kernel::by_name("sqrt", &w, DistanceProvider::Hyperbolic),
            Err(Error::UnknownName(_))
        ));
        let bx = Domain::open_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let wb = Weight::builtin("constant", &[1.0], bx).unwrap();
        assert!(Kernel::by_name("geometric-mean", &wb, DistanceProvider::Hyperbolic).is_err());
    }
}

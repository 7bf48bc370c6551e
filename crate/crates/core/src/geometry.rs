//! Points, domains and piecewise-linear paths.
//!
//! Paths carry no weight of their own; [`path_cost`] integrates `1/w` along
//! each segment with a composite Gauss-Legendre rule.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::Weight;

/// Default Gauss-Legendre nodes per segment.
pub const DEFAULT_QUADRATURE_NODES: usize = 8;

/// A point of `R^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("a point needs at least one coordinate".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Point(coords))
    }

    /// Builds a point without validation. Callers guarantee finite coordinates.
    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Point(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    pub fn dot(&self, other: &Point) -> f64 {
        dot(&self.0, &other.0)
    }

    /// Euclidean distance `|self - other|`.
    pub fn distance(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: f64) -> Point {
        Point(self.0.iter().map(|a| a * s).collect())
    }

    /// `self + t * dir`.
    pub fn offset(&self, dir: &[f64], t: f64) -> Point {
        Point(self.0.iter().zip(dir).map(|(a, d)| a + t * d).collect())
    }

    /// Point at parameter `t` of the segment from `self` to `other`.
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + t * (b - a))
                .collect(),
        )
    }

    pub fn same_dim(&self, other: &Point) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            })
        }
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl FromStr for Point {
    type Err = Error;

    /// Parses a comma-separated list such as `0.5,0`.
    fn from_str(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad coordinate {c:?} in point {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Point::new(coords)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

pub fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Membership test of a predicate domain.
pub type MembershipFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// An open domain described by a membership test.
///
/// The caller must supply an open, path-connected set; neither property can
/// be checked. `inner_radius` bounds finite-difference steps and sets the
/// pitch of the grid used to seed geodesic searches, and `lower`/`upper`
/// must enclose the set.
#[derive(Clone)]
pub struct PredicateDomain {
    pub name: String,
    pub dim: usize,
    pub test: MembershipFn,
    pub inner_radius: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl fmt::Debug for PredicateDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PredicateDomain")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("inner_radius", &self.inner_radius)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum Domain {
    /// Open unit ball `|p| < 1`.
    UnitBall { dim: usize },
    /// Open box `lower < p < upper`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Predicate(PredicateDomain),
}

impl Domain {
    pub fn unit_ball(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(Domain::UnitBall { dim })
    }

    pub fn open_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidParameter("box corners must share a positive dimension".into()));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(l, u)| !(l.is_finite() && u.is_finite() && l < u))
        {
            return Err(Error::InvalidParameter(
                "box lower corner must be below the upper corner componentwise".into(),
            ));
        }
        Ok(Domain::Box { lower, upper })
    }

    pub fn predicate(
        name: impl Into<String>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        inner_radius: f64,
        test: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
    ) -> Result<Self> {
        if let Domain::Box { lower, upper } = Domain::open_box(lower, upper)? {
            if !(inner_radius > 0.0 && inner_radius.is_finite()) {
                return Err(Error::InvalidParameter("inner radius hint must be positive".into()));
            }
            Ok(Domain::Predicate(PredicateDomain {
                name: name.into(),
                dim: lower.len(),
                test: Arc::new(test),
                inner_radius,
                lower,
                upper,
            }))
        } else {
            unreachable!()
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::UnitBall { dim } => *dim,
            Domain::Box { lower, .. } => lower.len(),
            Domain::Predicate(p) => p.dim,
        }
    }

    pub fn check_dim(&self, p: &Point) -> Result<()> {
        if p.dim() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: p.dim(),
            })
        }
    }

    pub fn contains(&self, p: &Point) -> Result<bool> {
        self.check_dim(p)?;
        Ok(self.contains_coords(p.coords()))
    }

    /// Membership without the dimension check.
    pub fn contains_coords(&self, x: &[f64]) -> bool {
        match self {
            Domain::UnitBall { .. } => dot(x, x) < 1.0,
            Domain::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(v, (l, u))| *l < *v && *v < *u),
            Domain::Predicate(p) => {
                x.iter()
                    .zip(p.lower.iter().zip(&p.upper))
                    .all(|(v, (l, u))| *l < *v && *v < *u)
                    && (p.test)(x)
            }
        }
    }

    /// Membership in the domain shrunk by `margin`.
    ///
    /// For predicate domains this is approximated by probing the `2m`
    /// axis-aligned offsets at distance `margin`.
    pub fn contains_with_margin(&self, x: &[f64], margin: f64) -> bool {
        if margin <= 0.0 {
            return self.contains_coords(x);
        }
        match self {
            Domain::UnitBall { .. } => norm(x) < 1.0 - margin,
            Domain::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(v, (l, u))| *l + margin < *v && *v < *u - margin),
            Domain::Predicate(_) => {
                if !self.contains_coords(x) {
                    return false;
                }
                let mut probe = x.to_vec();
                for i in 0..x.len() {
                    for s in [-margin, margin] {
                        probe[i] = x[i] + s;
                        if !self.contains_coords(&probe) {
                            return false;
                        }
                    }
                    probe[i] = x[i];
                }
                true
            }
        }
    }

    /// Axis-aligned bounding box `(lower, upper)`.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::UnitBall { dim } => (vec![-1.0; *dim], vec![1.0; *dim]),
            Domain::Box { lower, upper } => (lower.clone(), upper.clone()),
            Domain::Predicate(p) => (p.lower.clone(), p.upper.clone()),
        }
    }

    /// A length scale below which the domain is locally "thick".
    pub fn inner_radius(&self) -> f64 {
        match self {
            Domain::UnitBall { .. } => 1.0,
            Domain::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| 0.5 * (u - l))
                .fold(f64::INFINITY, f64::min),
            Domain::Predicate(p) => p.inner_radius,
        }
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self, Domain::Predicate(_))
    }

    /// Whether the closed segment `[a, b]` minus its endpoints' boundary
    /// stays in the domain. Exact for convex kinds, sampled otherwise.
    pub fn segment_inside(&self, a: &Point, b: &Point) -> bool {
        if !(self.contains_coords(a.coords()) && self.contains_coords(b.coords())) {
            return false;
        }
        if self.is_convex() {
            return true;
        }
        const PROBES: usize = 64;
        (1..PROBES).all(|i| {
            let t = i as f64 / PROBES as f64;
            self.contains_coords(a.lerp(b, t).coords())
        })
    }

    pub fn describe(&self) -> String {
        match self {
            Domain::UnitBall { dim } => format!("unit_ball({dim})"),
            Domain::Box { lower, upper } => format!("box({lower:?}, {upper:?})"),
            Domain::Predicate(p) => format!("predicate({}, {})", p.name, p.dim),
        }
    }
}

/// A polyline through ordered control points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct Path {
    points: Vec<Point>,
}

impl Path {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter("a path needs at least two points".into()));
        }
        let dim = points[0].dim();
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        Ok(Path { points })
    }

    pub fn segment(a: Point, b: Point) -> Result<Self> {
        Path::new(vec![a, b])
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn start(&self) -> &Point {
        &self.points[0]
    }

    pub fn end(&self) -> &Point {
        &self.points[self.points.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn reversed(&self) -> Path {
        let mut points = self.points.clone();
        points.reverse();
        Path { points }
    }

    /// Joins `self` and `other`, which must start where `self` ends.
    pub fn concat(&self, other: &Path) -> Result<Path> {
        if self.end() != other.start() {
            return Err(Error::InvalidParameter("paths do not share a junction point".into()));
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points[1..]);
        Path::new(points)
    }

    /// Euclidean length.
    pub fn euclidean_length(&self) -> f64 {
        self.points.windows(2).map(|s| s[0].distance(&s[1])).sum()
    }
}

impl TryFrom<Vec<Point>> for Path {
    type Error = Error;

    fn try_from(points: Vec<Point>) -> Result<Self> {
        Path::new(points)
    }
}

impl From<Path> for Vec<Point> {
    fn from(p: Path) -> Self {
        p.points
    }
}

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are roots of `P_n` found by Newton iteration from the
    /// Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("quadrature needs at least one node".into()));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(GaussLegendre { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// `∫_{[a,b]} |dω| / w(ω)` under the given rule.
pub fn segment_cost(a: &Point, b: &Point, w: &Weight, rule: &GaussLegendre) -> Result<f64> {
    let len = a.distance(b);
    if len == 0.0 {
        return Ok(0.0);
    }
    let mut buf = vec![0.0; a.dim()];
    let mut acc = 0.0;
    for (x, wt) in rule.nodes().iter().zip(rule.weights()) {
        let t = 0.5 * (1.0 + x);
        for ((o, p), q) in buf.iter_mut().zip(a.coords()).zip(b.coords()) {
            *o = p + t * (q - p);
        }
        acc += wt / w.eval_coords(&buf)?;
    }
    Ok(0.5 * len * acc)
}

/// Weighted length `∫_γ |dω| / w(ω)` of a polyline, using
/// `quadrature_points_per_segment` Gauss-Legendre nodes on every segment.
pub fn path_cost(path: &Path, w: &Weight, quadrature_points_per_segment: usize) -> Result<f64> {
    if quadrature_points_per_segment < 2 {
        return Err(Error::InvalidParameter(
            "at least two quadrature points per segment are required".into(),
        ));
    }
    let rule = GaussLegendre::new(quadrature_points_per_segment)?;
    path_cost_with_rule(path, w, &rule)
}

pub(crate) fn path_cost_with_rule(path: &Path, w: &Weight, rule: &GaussLegendre) -> Result<f64> {
    let domain = w.domain();
    for p in path.points() {
        if !domain.contains(p)? {
            return Err(Error::OutsideDomain {
                point: p.coords().to_vec(),
            });
        }
    }
    path.points()
        .windows(2)
        .map(|s| segment_cost(&s[0], &s[1], w, rule))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(pt(&[0.0, 0.0]).norm(), 0.0);
        assert_eq!(pt(&[3.0, 4.0]).norm(), 5.0);
        assert_eq!(pt(&[0.5, 0.0]).norm(), 0.5);
    }

    #[test]
    fn point_rejects_non_finite() {
        assert_eq!(Point::new(vec![f64::NAN]), Err(Error::NonFinite));
        assert!(Point::new(vec![]).is_err());
    }

    #[test]
    fn point_parse_and_display() {
        let p: Point = "0.5, 0".parse().unwrap();
        assert_eq!(p.coords(), &[0.5, 0.0]);
        assert_eq!(p.to_string(), "0.5,0");
        assert!("0.5,abc".parse::<Point>().is_err());
    }

    #[test]
    fn contains_examples() {
        let ball = Domain::unit_ball(2).unwrap();
        assert!(ball.contains(&pt(&[0.5, 0.0])).unwrap());
        assert!(!ball.contains(&pt(&[1.0, 0.0])).unwrap());
        let bx = Domain::open_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(bx.contains(&pt(&[0.5, 0.5])).unwrap());
        assert!(!bx.contains(&pt(&[0.0, 0.5])).unwrap());
    }

    #[test]
    fn contains_dimension_mismatch() {
        let ball = Domain::unit_ball(2).unwrap();
        assert_eq!(
            ball.contains(&pt(&[0.1, 0.1, 0.1])),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
    }

    #[test]
    fn box_corners_must_be_ordered() {
        assert!(Domain::open_box(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn margin_shrinks_ball() {
        let ball = Domain::unit_ball(2).unwrap();
        assert!(ball.contains_with_margin(&[0.97, 0.0], 0.02));
        assert!(!ball.contains_with_margin(&[0.99, 0.0], 0.02));
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [2, 3, 8, 16] {
            let rule = GaussLegendre::new(n).unwrap();
            let wsum: f64 = rule.weights().iter().sum();
            assert_relative_eq!(wsum, 2.0, epsilon = 1e-14);
            // degree 2n-1 monomial on [0, 1]
            let deg = 2 * n - 1;
            let v = rule.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert_relative_eq!(v, 1.0 / (deg as f64 + 1.0), epsilon = 1e-13);
        }
    }

    #[test]
    fn eight_point_nodes_match_tables() {
        let rule = GaussLegendre::new(8).unwrap();
        assert_relative_eq!(rule.nodes()[7], 0.960_289_856_497_536_2, epsilon = 1e-15);
        assert_relative_eq!(rule.weights()[7], 0.101_228_536_290_376_26, epsilon = 1e-15);
    }

    #[test]
    fn path_cost_constant_weight_is_length() {
        let ball = Domain::unit_ball(2).unwrap();
        let w = Weight::builtin("constant", &[1.0], ball).unwrap();
        let path = Path::segment(pt(&[0.0, 0.0]), pt(&[0.5, 0.0])).unwrap();
        assert_relative_eq!(path_cost(&path, &w, 2).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(path_cost(&path, &w, 8).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn path_cost_degenerate_path_is_zero() {
        let w = Weight::builtin("hyperbolic", &[], Domain::unit_ball(2).unwrap()).unwrap();
        let p = pt(&[0.3, 0.2]);
        let path = Path::new(vec![p.clone(), p]).unwrap();
        assert_eq!(path_cost(&path, &w, 8).unwrap(), 0.0);
    }

    #[test]
    fn path_cost_hyperbolic_radial_segment() {
        let w = Weight::builtin("hyperbolic", &[], Domain::unit_ball(2).unwrap()).unwrap();
        let path = Path::segment(pt(&[0.0, 0.0]), pt(&[0.5, 0.0])).unwrap();
        // ∫₀^½ dt / (1 - t²) = atanh ½
        assert_relative_eq!(path_cost(&path, &w, 8).unwrap(), 0.5_f64.atanh(), epsilon = 1e-12);
    }

    #[test]
    fn path_cost_errors() {
        let w = Weight::builtin("hyperbolic", &[], Domain::unit_ball(2).unwrap()).unwrap();
        let path = Path::segment(pt(&[0.0, 0.0]), pt(&[1.5, 0.0])).unwrap();
        assert!(matches!(path_cost(&path, &w, 8), Err(Error::OutsideDomain { .. })));
        let ok = Path::segment(pt(&[0.0, 0.0]), pt(&[0.5, 0.0])).unwrap();
        assert!(matches!(path_cost(&ok, &w, 1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn path_cost_positivity_violation() {
        // vanishes (up to 1e-13) on the circle r = 0.5, which the spot check misses
        let w = Weight::parse("abs(0.5-r)+1e-13", Domain::unit_ball(2).unwrap()).unwrap();
        let path = Path::segment(pt(&[0.25, 0.0]), pt(&[0.75, 0.0])).unwrap();
        // the middle node of the 3-point rule lands on (0.5, 0)
        assert!(matches!(
            path_cost(&path, &w, 3),
            Err(Error::NonPositiveWeight { .. })
        ));
    }

    #[test]
    fn path_serializes_as_nested_arrays() {
        let path = Path::segment(pt(&[0.0, 0.5]), pt(&[0.25, 0.0])).unwrap();
        let s = serde_json::to_string(&path).unwrap();
        assert_eq!(s, "[[0.0,0.5],[0.25,0.0]]");
        let back: Path = serde_json::from_str(&s).unwrap();
        assert_eq!(back, path);
        assert!(serde_json::from_str::<Path>("[[0.0,0.5]]").is_err());
    }

    #[test]
    fn concat_and_reverse() {
        let a = Path::new(vec![pt(&[0.0, 0.0]), pt(&[0.2, 0.1])]).unwrap();
        let b = Path::new(vec![pt(&[0.2, 0.1]), pt(&[0.4, -0.3])]).unwrap();
        let ab = a.concat(&b).unwrap();
        assert_eq!(ab.len(), 3);
        assert_eq!(ab.reversed().start(), b.end());
        assert!(b.concat(&a).is_err());
    }
}

//! Numerical w-distance: the infimum of `∫ |dω| / w(ω)` over curves joining
//! two points, approximated by optimizing piecewise-linear paths.
//!
//! Paths are refined multilevel: the segment count is halved (rounding up)
//! down to a single segment, and each level starts from the optimum of the
//! previous one with midpoints inserted in its costliest segments. Interior
//! control points are then moved one at a time along their descent
//! direction, using a quadratic fit of the local cost with a golden-section
//! fallback. Every intermediate path stays inside the domain.

use petgraph::algo::astar;
use petgraph::graph::{NodeIndex, UnGraph};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{segment_cost, Domain, GaussLegendre, Path, Point, DEFAULT_QUADRATURE_NODES};
use crate::hyperbolic::hyperbolic_distance;
use crate::weights::Weight;

/// Nodes per segment used for the reported value.
pub const REPORT_QUADRATURE_NODES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicOptions {
    /// Control points of the final path, endpoints included.
    pub control_points: usize,
    /// Sweep limit per refinement level.
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub cost_tolerance: f64,
    /// Drives the order in which control points are visited.
    pub seed: u64,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        GeodesicOptions {
            control_points: 33,
            max_iterations: 500,
            step_tolerance: 1e-8,
            cost_tolerance: 1e-9,
            seed: 0,
        }
    }
}

impl GeodesicOptions {
    pub fn validate(&self) -> Result<()> {
        if self.control_points < 2 {
            return Err(Error::InvalidParameter("control_points must be at least 2".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be positive".into()));
        }
        if !(self.step_tolerance > 0.0 && self.cost_tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicResult {
    /// Cost of `path` under the reporting rule; an upper bound on `d_w`.
    pub value: f64,
    pub path: Path,
    /// Sweeps over all levels.
    pub iterations: usize,
    /// Whether the last level met both stopping criteria.
    pub converged: bool,
}

/// Approximates `d_w(a, b)`.
pub fn geodesic_distance(
    w: &Weight,
    a: &Point,
    b: &Point,
    opts: &GeodesicOptions,
) -> Result<GeodesicResult> {
    opts.validate()?;
    let domain = w.domain();
    for p in [a, b] {
        if !domain.contains(p)? {
            return Err(Error::OutsideDomain {
                point: p.coords().to_vec(),
            });
        }
    }
    let report_rule = GaussLegendre::new(REPORT_QUADRATURE_NODES)?;
    if a == b {
        return Ok(GeodesicResult {
            value: 0.0,
            path: Path::segment(a.clone(), b.clone())?,
            iterations: 0,
            converged: true,
        });
    }

    let mut solver = Solver::new(w, opts)?;
    let straight = if domain.segment_inside(a, b) {
        segment_cost(a, b, w, &report_rule).ok()
    } else {
        None
    };

    let (points, iterations, converged) = match straight {
        Some(_) => solver.multilevel(vec![a.clone(), b.clone()], opts.control_points - 1)?,
        None => {
            let seed = grid_seed_path(w, a, b)?;
            let points = admissible_resample(domain, &seed, opts.control_points)
                .ok_or_else(|| Error::NoAdmissiblePath {
                    from: a.coords().to_vec(),
                    to: b.coords().to_vec(),
                })?;
            let (points, it, conv) = solver.optimize_level(points)?;
            (points, it, conv)
        }
    };

    let path = Path::new(points)?;
    let value = path
        .points()
        .windows(2)
        .map(|s| segment_cost(&s[0], &s[1], w, &report_rule))
        .sum::<Result<f64>>()?;
    if let Some(s) = straight {
        if s <= value {
            // the straight segment is itself admissible and no worse
            let mut pts = Vec::with_capacity(opts.control_points);
            for k in 0..opts.control_points {
                pts.push(a.lerp(b, k as f64 / (opts.control_points - 1) as f64));
            }
            let path = Path::new(pts)?;
            let value = path_value(&path, w, &report_rule)?;
            return Ok(GeodesicResult {
                value,
                path,
                iterations,
                converged,
            });
        }
    }
    Ok(GeodesicResult {
        value,
        path,
        iterations,
        converged,
    })
}

fn path_value(path: &Path, w: &Weight, rule: &GaussLegendre) -> Result<f64> {
    path.points()
        .windows(2)
        .map(|s| segment_cost(&s[0], &s[1], w, rule))
        .sum()
}

/// Solves many pairs in parallel; results are in input order.
pub fn geodesic_distances(
    w: &Weight,
    pairs: &[(Point, Point)],
    opts: &GeodesicOptions,
) -> Vec<Result<GeodesicResult>> {
    pairs
        .par_iter()
        .map(|(a, b)| geodesic_distance(w, a, b, opts))
        .collect()
}

/// Cost of the straight segment `[a, b]`, an upper bound on `d_w(a, b)`.
pub fn straight_segment_cost(w: &Weight, a: &Point, b: &Point) -> Result<f64> {
    a.same_dim(b)?;
    w.domain().check_dim(a)?;
    if !w.domain().segment_inside(a, b) {
        let bad = if w.domain().contains_coords(a.coords()) { b } else { a };
        return Err(Error::OutsideDomain {
            point: bad.coords().to_vec(),
        });
    }
    segment_cost(a, b, w, &GaussLegendre::new(REPORT_QUADRATURE_NODES)?)
}

/// `|a − b| / min{w(a), w(b)}`; bounds the straight-segment cost from above
/// when `w` decreases radially on a convex domain.
pub fn min_weight_bound(w: &Weight, a: &Point, b: &Point) -> Result<f64> {
    Ok(a.distance(b) / w.eval(a)?.min(w.eval(b)?))
}

/// Source of distances for kernels and estimators.
#[derive(Debug, Clone)]
pub enum DistanceProvider {
    /// Closed-form hyperbolic distance of the unit ball.
    Hyperbolic,
    /// Numerical w-distance.
    Geodesic {
        weight: Weight,
        options: GeodesicOptions,
    },
}

impl DistanceProvider {
    pub fn geodesic(weight: Weight) -> Self {
        DistanceProvider::Geodesic {
            weight,
            options: GeodesicOptions::default(),
        }
    }

    /// Symmetric in its arguments: geodesic solves are run on the
    /// lexicographically ordered pair.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        match self {
            DistanceProvider::Hyperbolic => hyperbolic_distance(a, b),
            DistanceProvider::Geodesic { weight, options } => {
                let (p, q) = ordered(a, b);
                Ok(geodesic_distance(weight, p, q, options)?.value)
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, DistanceProvider::Hyperbolic)
    }

    pub fn describe(&self) -> &'static str {
        match self {
            DistanceProvider::Hyperbolic => "closed-form",
            DistanceProvider::Geodesic { .. } => "geodesic",
        }
    }
}

pub(crate) fn ordered<'a>(a: &'a Point, b: &'a Point) -> (&'a Point, &'a Point) {
    let key = |p: &Point| p.coords().iter().map(|c| c.to_bits() as i64).collect::<Vec<_>>();
    match a
        .coords()
        .partial_cmp(b.coords())
        .unwrap_or_else(|| key(a).cmp(&key(b)))
    {
        std::cmp::Ordering::Greater => (b, a),
        _ => (a, b),
    }
}

struct Solver<'a> {
    w: &'a Weight,
    opts: &'a GeodesicOptions,
    rule: GaussLegendre,
    iterations: usize,
    level: u64,
}

impl<'a> Solver<'a> {
    fn new(w: &'a Weight, opts: &'a GeodesicOptions) -> Result<Self> {
        Ok(Solver {
            w,
            opts,
            rule: GaussLegendre::new(DEFAULT_QUADRATURE_NODES)?,
            iterations: 0,
            level: 0,
        })
    }

    fn segment(&self, a: &[f64], b: &[f64]) -> f64 {
        let pa = Point::from_vec_unchecked(a.to_vec());
        let pb = Point::from_vec_unchecked(b.to_vec());
        segment_cost(&pa, &pb, self.w, &self.rule).unwrap_or(f64::INFINITY)
    }

    fn local(&self, prev: &[f64], p: &[f64], next: &[f64]) -> f64 {
        if !self.w.domain().contains_coords(p) {
            return f64::INFINITY;
        }
        let d = self.w.domain();
        if !d.is_convex() {
            let pp = Point::from_vec_unchecked(p.to_vec());
            if !d.segment_inside(&Point::from_vec_unchecked(prev.to_vec()), &pp)
                || !d.segment_inside(&pp, &Point::from_vec_unchecked(next.to_vec()))
            {
                return f64::INFINITY;
            }
        }
        self.segment(prev, p) + self.segment(p, next)
    }

    /// Runs levels with segment counts `1, …, ⌈s/2⌉, s` starting from
    /// `start`, which must be a single segment.
    fn multilevel(&mut self, start: Vec<Point>, segments: usize) -> Result<(Vec<Point>, usize, bool)> {
        let mut chain = vec![segments];
        while *chain.last().expect("nonempty") > 1 {
            let s = *chain.last().expect("nonempty");
            chain.push(s.div_ceil(2));
        }
        chain.reverse();
        let mut pts: Vec<Vec<f64>> = start.into_iter().map(Point::into_coords).collect();
        let mut converged = true;
        for &s in &chain[1..] {
            // candidates: even cost spacing, and the previous optimum with
            // midpoints inserted (the same polyline, so never worse)
            let (spread, conv_spread) = self.sweep_until_converged(self.refine(&pts, s));
            let split = self.split(&pts, s);
            let (kept, conv) = if self.total(&spread) <= self.total(&split) {
                (spread, conv_spread)
            } else {
                self.sweep_until_converged(split)
            };
            pts = kept;
            converged = conv;
            self.level += 1;
        }
        let points = pts.into_iter().map(Point::from_vec_unchecked).collect();
        Ok((points, self.iterations, converged))
    }

    fn optimize_level(&mut self, points: Vec<Point>) -> Result<(Vec<Point>, usize, bool)> {
        let pts = points.into_iter().map(Point::into_coords).collect();
        let (pts, conv) = self.sweep_until_converged(pts);
        Ok((
            pts.into_iter().map(Point::from_vec_unchecked).collect(),
            self.iterations,
            conv,
        ))
    }

    fn total(&self, pts: &[Vec<f64>]) -> f64 {
        pts.windows(2).map(|s| self.segment(&s[0], &s[1])).sum()
    }

    /// Inserts midpoints into the costliest segments until there are
    /// `target` segments.
    fn split(&self, pts: &[Vec<f64>], target: usize) -> Vec<Vec<f64>> {
        let current = pts.len() - 1;
        let extra = target.saturating_sub(current).min(current);
        let mut costs: Vec<(usize, f64)> = pts
            .windows(2)
            .enumerate()
            .map(|(i, s)| (i, self.segment(&s[0], &s[1])))
            .collect();
        costs.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
        let mut split = vec![false; current];
        for &(i, _) in costs.iter().take(extra) {
            split[i] = true;
        }
        let mut out = Vec::with_capacity(target + 1);
        for i in 0..current {
            out.push(pts[i].clone());
            if split[i] {
                out.push(pts[i].iter().zip(&pts[i + 1]).map(|(a, b)| 0.5 * (a + b)).collect());
            }
        }
        out.push(pts[current].clone());
        out
    }

    /// Resamples the polyline at `target + 1` points spaced evenly in
    /// cost, so control points cannot stay bunched where the weight is
    /// large.
    fn refine(&self, pts: &[Vec<f64>], target: usize) -> Vec<Vec<f64>> {
        let mut cumulative = vec![0.0];
        for s in pts.windows(2) {
            let c = self.segment(&s[0], &s[1]);
            cumulative.push(cumulative.last().expect("nonempty") + c);
        }
        let total = *cumulative.last().expect("nonempty");
        if !(total.is_finite() && total > 0.0) {
            return self.split(pts, target);
        }
        let mut out = Vec::with_capacity(target + 1);
        out.push(pts[0].clone());
        let mut j = 0;
        for k in 1..target {
            let f = total * k as f64 / target as f64;
            while j + 2 < cumulative.len() && cumulative[j + 1] < f {
                j += 1;
            }
            let span = cumulative[j + 1] - cumulative[j];
            let u = if span > 0.0 { ((f - cumulative[j]) / span).clamp(0.0, 1.0) } else { 0.0 };
            out.push(pts[j].iter().zip(&pts[j + 1]).map(|(a, b)| a + u * (b - a)).collect());
        }
        out.push(pts[pts.len() - 1].clone());
        out
    }

    fn sweep_until_converged(&mut self, mut pts: Vec<Vec<f64>>) -> (Vec<Vec<f64>>, bool) {
        let n = pts.len();
        if n <= 2 {
            return (pts, true);
        }
        let mut steps: Vec<f64> = (1..n - 1)
            .map(|i| 0.25 * dist(&pts[i - 1], &pts[i]).min(dist(&pts[i], &pts[i + 1])))
            .collect();
        let mut order: Vec<usize> = (1..n - 1).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed ^ self.level.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        for _ in 0..self.opts.max_iterations {
            self.iterations += 1;
            order.shuffle(&mut rng);
            let mut decrease = 0.0;
            let mut displacement = 0.0f64;
            for &i in &order {
                let (moved, gain) = self.move_point(&pts[i - 1], &pts[i], &pts[i + 1], &mut steps[i - 1]);
                if let Some(p) = moved {
                    displacement = displacement.max(dist(&p, &pts[i]));
                    decrease += gain;
                    pts[i] = p;
                }
            }
            if decrease < self.opts.cost_tolerance && displacement < self.opts.step_tolerance {
                return (pts, true);
            }
        }
        (pts, false)
    }

    /// One descent step for a single control point. Returns the new
    /// position (if it lowers the local cost) and the decrease.
    fn move_point(&self, prev: &[f64], p: &[f64], next: &[f64], step: &mut f64) -> (Option<Vec<f64>>, f64) {
        let f0 = self.local(prev, p, next);
        if !f0.is_finite() {
            return (None, 0.0);
        }
        let scale = dist(prev, p).min(dist(p, next)).max(1e-12);
        let h = 1e-6 * scale;
        let m = p.len();
        let mut grad = vec![0.0; m];
        let mut probe = p.to_vec();
        for k in 0..m {
            probe[k] = p[k] + h;
            let fp = self.local(prev, &probe, next);
            probe[k] = p[k] - h;
            let fm = self.local(prev, &probe, next);
            probe[k] = p[k];
            grad[k] = match (fp.is_finite(), fm.is_finite()) {
                (true, true) => (fp - fm) / (2.0 * h),
                (true, false) => (fp - f0) / h,
                (false, true) => (f0 - fm) / h,
                (false, false) => 0.0,
            };
        }
        // drop the component along the chord: sliding along the path only
        // redistributes points, which the level resampling already does
        let chord: Vec<f64> = next.iter().zip(prev).map(|(a, b)| a - b).collect();
        let clen = crate::geometry::norm(&chord);
        if clen > 0.0 {
            let along = crate::geometry::dot(&grad, &chord) / (clen * clen);
            for (g, c) in grad.iter_mut().zip(&chord) {
                *g -= along * c;
            }
        }
        let gnorm = crate::geometry::norm(&grad);
        if !(gnorm > 0.0 && gnorm.is_finite()) {
            return (None, 0.0);
        }
        let dir: Vec<f64> = grad.iter().map(|g| -g / gnorm).collect();
        let at = |t: f64| -> Vec<f64> { p.iter().zip(&dir).map(|(x, d)| x + t * d).collect() };
        let phi = |t: f64| self.local(prev, &at(t), next);

        let s = self.feasible_step(p, &dir, step.min(0.5 * scale).max(1e-15));
        let fs = phi(s);
        let mut best = (0.0, f0);
        if fs < best.1 {
            best = (s, fs);
        }
        // quadratic through φ(0), φ'(0) = −|g| and φ(s)
        let curvature = 2.0 * (fs - f0 + gnorm * s) / (s * s);
        if curvature > 0.0 && fs.is_finite() {
            let t = self.feasible_step(p, &dir, (gnorm / curvature).min(4.0 * s));
            let ft = phi(t);
            if ft < best.1 {
                best = (t, ft);
            }
        }
        if best.0 == 0.0 {
            // golden section on [0, s]
            let (t, ft) = golden_section(&phi, 0.0, s, 40);
            if ft < f0 {
                best = (t, ft);
            }
        }
        // gains below rounding noise only slide points along the path
        let noise = 1e-14 * f0.abs() + 1e-3 * self.opts.cost_tolerance;
        if best.0 > 0.0 && f0 - best.1 > noise {
            *step = (2.0 * best.0).max(1e-14);
            (Some(at(best.0)), f0 - best.1)
        } else {
            *step = (0.25 * *step).max(1e-15);
            (None, 0.0)
        }
    }

    /// Largest `t' ≤ t` along `dir` whose point lies in the domain, found
    /// by bisection from the current (interior) point.
    fn feasible_step(&self, p: &[f64], dir: &[f64], t: f64) -> f64 {
        let d = self.w.domain();
        let inside = |t: f64| {
            let x: Vec<f64> = p.iter().zip(dir).map(|(a, b)| a + t * b).collect();
            d.contains_coords(&x)
        };
        if inside(t) {
            return t;
        }
        let (mut lo, mut hi) = (0.0, t);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if inside(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Shortest path on a uniform grid (pitch = inner radius / 8) joining `a`
/// and `b`, as a fallback seed when the straight segment leaves the domain.
fn grid_seed_path(w: &Weight, a: &Point, b: &Point) -> Result<Vec<Point>> {
    let domain = w.domain();
    let m = domain.dim();
    let pitch = domain.inner_radius() / 8.0;
    let (lower, upper) = domain.bounds();
    let counts: Vec<usize> = lower
        .iter()
        .zip(&upper)
        .map(|(l, u)| ((u - l) / pitch).floor() as usize + 1)
        .collect();
    let total: usize = counts.iter().product();
    if total > 4_000_000 {
        return Err(Error::InvalidParameter(format!(
            "seed grid with {total} nodes is too large; increase the inner radius hint"
        )));
    }
    let coord_of = |flat: usize| -> Vec<f64> {
        let mut rem = flat;
        (0..m)
            .map(|k| {
                let i = rem % counts[k];
                rem /= counts[k];
                lower[k] + pitch * (i as f64 + 0.5 * ((upper[k] - lower[k]) / pitch - (counts[k] - 1) as f64))
            })
            .collect()
    };

    let mut graph: UnGraph<Vec<f64>, f64> = UnGraph::new_undirected();
    let mut node_of = vec![None; total];
    for (flat, slot) in node_of.iter_mut().enumerate() {
        let x = coord_of(flat);
        if domain.contains_coords(&x) && w.eval_coords(&x).is_ok() {
            *slot = Some(graph.add_node(x));
        }
    }
    let edge_cost = |x: &[f64], y: &[f64]| -> Option<f64> {
        let px = Point::from_vec_unchecked(x.to_vec());
        let py = Point::from_vec_unchecked(y.to_vec());
        if !domain.segment_inside(&px, &py) {
            return None;
        }
        let mid = px.lerp(&py, 0.5);
        w.eval(&mid).ok().map(|v| px.distance(&py) / v)
    };

    // neighbour offsets in {-1,0,1}^m, forward half only
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(m as u32))
        .map(|mut c| {
            (0..m)
                .map(|_| {
                    let d = (c % 3) as i64 - 1;
                    c /= 3;
                    d
                })
                .collect::<Vec<i64>>()
        })
        .filter(|o| o.iter().find(|&&d| d != 0) == Some(&1))
        .collect();
    for flat in 0..total {
        let Some(u) = node_of[flat] else { continue };
        let mut idx = Vec::with_capacity(m);
        let mut rem = flat;
        for &c in &counts {
            idx.push((rem % c) as i64);
            rem /= c;
        }
        for o in &offsets {
            let mut nflat = 0usize;
            let mut stride = 1usize;
            let mut ok = true;
            for k in 0..m {
                let j = idx[k] + o[k];
                if j < 0 || j >= counts[k] as i64 {
                    ok = false;
                    break;
                }
                nflat += j as usize * stride;
                stride *= counts[k];
            }
            if !ok {
                continue;
            }
            if let Some(v) = node_of[nflat] {
                if let Some(c) = edge_cost(&graph[u], &graph[v]) {
                    graph.add_edge(u, v, c);
                }
            }
        }
    }

    let attach = |graph: &mut UnGraph<Vec<f64>, f64>, p: &Point| -> NodeIndex {
        let id = graph.add_node(p.coords().to_vec());
        let reach = pitch * ((m as f64).sqrt() + 1.0);
        let near: Vec<NodeIndex> = graph
            .node_indices()
            .filter(|&n| n != id && dist(&graph[n], p.coords()) <= reach)
            .collect();
        for n in near {
            if let Some(c) = edge_cost(p.coords(), &graph[n]) {
                graph.add_edge(id, n, c);
            }
        }
        id
    };
    let start = attach(&mut graph, a);
    let goal = attach(&mut graph, b);
    let (_, route) = astar(&graph, start, |n| n == goal, |e| *e.weight(), |_| 0.0).ok_or_else(|| {
        Error::NoAdmissiblePath {
            from: a.coords().to_vec(),
            to: b.coords().to_vec(),
        }
    })?;
    Ok(route
        .into_iter()
        .map(|n| Point::from_vec_unchecked(graph[n].clone()))
        .collect())
}

/// Resamples a polyline at equal arc length to `count` points, doubling the
/// count until every chord lies in the domain.
fn admissible_resample(domain: &Domain, seed: &[Point], count: usize) -> Option<Vec<Point>> {
    let mut k = count.max(2);
    loop {
        let pts = resample(seed, k);
        if pts.windows(2).all(|s| domain.segment_inside(&s[0], &s[1])) {
            return Some(pts);
        }
        if k >= 4 * seed.len() {
            return if seed.windows(2).all(|s| domain.segment_inside(&s[0], &s[1])) {
                Some(seed.to_vec())
            } else {
                None
            };
        }
        k = 2 * k - 1;
    }
}

fn resample(seed: &[Point], count: usize) -> Vec<Point> {
    let lengths: Vec<f64> = seed.windows(2).map(|s| s[0].distance(&s[1])).collect();
    let total: f64 = lengths.iter().sum();
    let mut out = Vec::with_capacity(count);
    out.push(seed[0].clone());
    let mut seg = 0;
    let mut acc = 0.0;
    for k in 1..count - 1 {
        let target = total * k as f64 / (count - 1) as f64;
        while seg + 1 < lengths.len() && acc + lengths[seg] < target {
            acc += lengths[seg];
            seg += 1;
        }
        let t = if lengths[seg] > 0.0 {
            ((target - acc) / lengths[seg]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out.push(seed[seg].lerp(&seed[seg + 1], t));
    }
    out.push(seed[seed.len() - 1].clone());
    out
}

//! Sampled estimates of the Bloch semi-norm `sup w‖Df‖`, the two-point
//! `W`-Lipschitz semi-norm `sup W(ζ,η)|f(ζ)−f(η)|/|ζ−η|` and the
//! `d_w`-difference quotient `sup |f(ζ)−f(η)|/d_w(ζ,η)`.
//!
//! Every estimate is a maximum over a finite sample and therefore a lower
//! bound for the true supremum.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::DistanceProvider;
use crate::geometry::{norm, Domain, Point};
use crate::kernels::{Kernel, Verdict};
use crate::sampling::{direction_set, grid_points, low_discrepancy_points, low_discrepancy_pairs};
use crate::weights::Weight;

/// Relative agreement required between an exact Jacobian and central
/// differences when a map is validated.
pub const JACOBIAN_TOLERANCE: f64 = 1e-5;
pub const JACOBIAN_CHECK_POINTS: usize = 100;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Matrix::new(rows.len(), cols, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn scaled(&self, c: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    pub fn plus(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        if self.rows == 1 || self.cols == 1 {
            return norm(&self.data);
        }
        if self.rows == 2 && self.cols == 2 {
            let (a, b, c, d) = (self.data[0], self.data[1], self.data[2], self.data[3]);
            let e = 0.5 * (a + d);
            let f = 0.5 * (a - d);
            let g = 0.5 * (c + b);
            let h = 0.5 * (c - b);
            return e.hypot(h) + f.hypot(g);
        }
        let m = DMatrix::from_row_slice(self.rows, self.cols, &self.data);
        m.singular_values().max()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

pub type MapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&[f64]) -> Matrix + Send + Sync>;

/// A map `f: Ω ⊂ R^m → R^n` with an optional exact Jacobian.
#[derive(Clone)]
pub struct SmoothMap {
    label: String,
    dim_in: usize,
    dim_out: usize,
    eval: MapFn,
    jacobian: Option<JacobianFn>,
    differentiable: bool,
}

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothMap")
            .field("label", &self.label)
            .field("dim_in", &self.dim_in)
            .field("dim_out", &self.dim_out)
            .field("exact_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl SmoothMap {
    pub fn new(
        label: impl Into<String>,
        dim_in: usize,
        dim_out: usize,
        eval: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidParameter("map dimensions must be positive".into()));
        }
        Ok(SmoothMap {
            label: label.into(),
            dim_in,
            dim_out,
            eval: Arc::new(eval),
            jacobian: None,
            differentiable: true,
        })
    }

    /// A map that is only known to be continuous. The Lipschitz and
    /// quotient estimators accept it and flag their results as outside the
    /// hypotheses of the equality theorem.
    pub fn continuous(
        label: impl Into<String>,
        dim_in: usize,
        dim_out: usize,
        eval: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        let mut f = SmoothMap::new(label, dim_in, dim_out, eval)?;
        f.differentiable = false;
        Ok(f)
    }

    pub fn with_jacobian(mut self, jac: impl Fn(&[f64]) -> Matrix + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(jac));
        self
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Ok(SmoothMap::new(format!("identity:{dim}"), dim, dim, |x| x.to_vec())?
            .with_jacobian(move |_| Matrix::identity(dim)))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn has_exact_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    pub fn is_differentiable(&self) -> bool {
        self.differentiable
    }

    pub fn eval(&self, p: &Point) -> Result<Vec<f64>> {
        if p.dim() != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                found: p.dim(),
            });
        }
        self.eval_coords(p.coords())
    }

    fn eval_coords(&self, x: &[f64]) -> Result<Vec<f64>> {
        let v = (self.eval)(x);
        if v.len() != self.dim_out {
            return Err(Error::DimensionMismatch {
                expected: self.dim_out,
                found: v.len(),
            });
        }
        if v.iter().all(|c| c.is_finite()) {
            Ok(v)
        } else {
            Err(Error::NonFinite)
        }
    }

    /// `c · f`.
    pub fn scaled(&self, c: f64) -> SmoothMap {
        let f = self.eval.clone();
        let jac = self.jacobian.clone();
        SmoothMap {
            label: format!("{c}*{}", self.label),
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            eval: Arc::new(move |x| f(x).into_iter().map(|v| c * v).collect()),
            jacobian: jac.map(|j| Arc::new(move |x: &[f64]| j(x).scaled(c)) as JacobianFn),
            differentiable: self.differentiable,
        }
    }

    /// `f + g`.
    pub fn sum(&self, g: &SmoothMap) -> Result<SmoothMap> {
        if self.dim_in != g.dim_in || self.dim_out != g.dim_out {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in * self.dim_out,
                found: g.dim_in * g.dim_out,
            });
        }
        let (f1, f2) = (self.eval.clone(), g.eval.clone());
        let jacobian = match (&self.jacobian, &g.jacobian) {
            (Some(j1), Some(j2)) => {
                let (j1, j2) = (j1.clone(), j2.clone());
                Some(Arc::new(move |x: &[f64]| j1(x).plus(&j2(x)).expect("matching shapes")) as JacobianFn)
            }
            _ => None,
        };
        Ok(SmoothMap {
            label: format!("{}+{}", self.label, g.label),
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            eval: Arc::new(move |x| f1(x).into_iter().zip(f2(x)).map(|(a, b)| a + b).collect()),
            jacobian,
            differentiable: self.differentiable && g.differentiable,
        })
    }

    /// Compares the exact Jacobian with central differences at
    /// `JACOBIAN_CHECK_POINTS` low-discrepancy points of `domain`.
    pub fn validate_jacobian(&self, domain: &Domain, seed: u64) -> Result<()> {
        let Some(jac) = &self.jacobian else {
            return Ok(());
        };
        let margin = 0.05 * domain.inner_radius();
        for p in low_discrepancy_points(domain, margin, JACOBIAN_CHECK_POINTS, seed) {
            let exact = jac(p.coords());
            let h = 1e-6 * p.norm().max(1.0);
            let fd = finite_difference(self, &p, h, domain)?;
            let scale = exact.max_abs().max(1.0);
            let err = exact.max_abs_diff(&fd) / scale;
            if exact.rows() != self.dim_out || exact.cols() != self.dim_in || !(err <= JACOBIAN_TOLERANCE) {
                return Err(Error::JacobianMismatch {
                    label: self.label.clone(),
                    point: p.into_coords(),
                    error: err,
                });
            }
        }
        Ok(())
    }
}

fn finite_difference(f: &SmoothMap, p: &Point, h: f64, domain: &Domain) -> Result<Matrix> {
    let m = f.dim_in;
    let n = f.dim_out;
    let mut data = vec![0.0; n * m];
    let mut x = p.coords().to_vec();
    for j in 0..m {
        let orig = x[j];
        x[j] = orig + h;
        if !domain.contains_coords(&x) {
            return Err(Error::StencilOutsideDomain {
                point: p.coords().to_vec(),
            });
        }
        let plus = f.eval_coords(&x)?;
        x[j] = orig - h;
        if !domain.contains_coords(&x) {
            return Err(Error::StencilOutsideDomain {
                point: p.coords().to_vec(),
            });
        }
        let minus = f.eval_coords(&x)?;
        x[j] = orig;
        for i in 0..n {
            data[i * m + j] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    Matrix::new(n, m, data)
}

/// `Df(p)`: the exact Jacobian when the map has one, otherwise central
/// differences. With `step = None` the step is `1e-6·max(1, |p|)`, shrunk
/// until the stencil fits in `domain`; an explicit step is used as given.
pub fn jacobian_at(f: &SmoothMap, p: &Point, step: Option<f64>, domain: &Domain) -> Result<Matrix> {
    if p.dim() != f.dim_in {
        return Err(Error::DimensionMismatch {
            expected: f.dim_in,
            found: p.dim(),
        });
    }
    if !domain.contains(p)? {
        return Err(Error::OutsideDomain {
            point: p.coords().to_vec(),
        });
    }
    if let Some(j) = &f.jacobian {
        return Ok(j(p.coords()));
    }
    match step {
        Some(h) if h > 0.0 && h.is_finite() => finite_difference(f, p, h, domain),
        Some(_) => Err(Error::InvalidParameter("finite-difference step must be positive".into())),
        None => {
            let mut h = 1e-6 * p.norm().max(1.0);
            loop {
                match finite_difference(f, p, h, domain) {
                    Err(Error::StencilOutsideDomain { .. }) if h > 1e-12 => h *= 0.1,
                    other => return other,
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleStrategy {
    /// Tensor grid with `resolution` intervals per axis.
    Grid { resolution: usize },
    LowDiscrepancy { count: usize, seed: u64 },
}

/// Point and pair sets for the estimators. Pairs are `pair_budget`
/// low-discrepancy pairs followed by near-diagonal pairs `(ζ, ζ + h u)` for
/// every sample point `ζ`, every separation `h` and every direction `u`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sampler {
    pub strategy: SampleStrategy,
    pub boundary_margin: f64,
    pub pair_budget: usize,
    pub pair_seed: u64,
    pub diagonal_separations: Vec<f64>,
    pub diagonal_directions: usize,
}

impl Sampler {
    pub fn grid(resolution: usize) -> Self {
        Sampler::with_strategy(SampleStrategy::Grid { resolution })
    }

    pub fn low_discrepancy(count: usize, seed: u64) -> Self {
        let mut s = Sampler::with_strategy(SampleStrategy::LowDiscrepancy { count, seed });
        s.pair_seed = seed;
        s
    }

    fn with_strategy(strategy: SampleStrategy) -> Self {
        Sampler {
            strategy,
            boundary_margin: 0.02,
            pair_budget: 10_000,
            pair_seed: 0,
            diagonal_separations: vec![1e-2, 1e-3],
            diagonal_directions: 16,
        }
    }

    pub fn margin(mut self, margin: f64) -> Self {
        self.boundary_margin = margin;
        self
    }

    pub fn pairs(mut self, budget: usize) -> Self {
        self.pair_budget = budget;
        self
    }

    pub fn pair_seed(mut self, seed: u64) -> Self {
        self.pair_seed = seed;
        self
    }

    /// Drops the near-diagonal pairs.
    pub fn without_diagonal(mut self) -> Self {
        self.diagonal_separations.clear();
        self
    }

    pub fn describe(&self) -> String {
        match &self.strategy {
            SampleStrategy::Grid { resolution } => format!("grid:{resolution}"),
            SampleStrategy::LowDiscrepancy { count, seed } => format!("low-discrepancy:{count}@{seed}"),
        }
    }

    pub fn points(&self, domain: &Domain) -> Result<Vec<Point>> {
        if !(self.boundary_margin >= 0.0) {
            return Err(Error::InvalidParameter("boundary margin must be nonnegative".into()));
        }
        let pts = match &self.strategy {
            SampleStrategy::Grid { resolution } => grid_points(domain, self.boundary_margin, *resolution),
            SampleStrategy::LowDiscrepancy { count, seed } => {
                low_discrepancy_points(domain, self.boundary_margin, *count, *seed)
            }
        };
        if pts.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(pts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateWitness {
    Point(Vec<f64>),
    Pair(Vec<f64>, Vec<f64>),
}

#[derive(Debug, Clone, Serialize)]
pub struct SeminormEstimate {
    pub value: f64,
    pub witness: EstimateWitness,
    pub samples_used: usize,
    pub skipped: usize,
    pub boundary_margin: f64,
    pub strategy: String,
    /// Set when the map is not known to be continuously differentiable.
    pub outside_hypotheses: bool,
}

fn check_map_domain(f: &SmoothMap, domain: &Domain) -> Result<()> {
    if f.dim_in != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            found: f.dim_in,
        });
    }
    Ok(())
}

/// Sampled `sup w(ζ)‖Df(ζ)‖`.
pub fn bloch_seminorm(f: &SmoothMap, w: &Weight, s: &Sampler) -> Result<SeminormEstimate> {
    if !f.differentiable {
        return Err(Error::InvalidParameter(format!(
            "{} is not differentiable; the Bloch semi-norm needs a derivative",
            f.label
        )));
    }
    let domain = w.domain();
    check_map_domain(f, domain)?;
    let pts = s.points(domain)?;
    let vals: Vec<Option<f64>> = pts
        .par_iter()
        .map(|p| {
            let wp = w.eval(p).ok()?;
            let jac = jacobian_at(f, p, None, domain).ok()?;
            let v = wp * jac.operator_norm();
            v.is_finite().then_some(v)
        })
        .collect();
    let (best, skipped) = first_max(vals.iter().copied());
    let (i, value) = best.ok_or(Error::EmptySample)?;
    Ok(SeminormEstimate {
        value,
        witness: EstimateWitness::Point(pts[i].coords().to_vec()),
        samples_used: pts.len() - skipped,
        skipped,
        boundary_margin: s.boundary_margin,
        strategy: s.describe(),
        outside_hypotheses: false,
    })
}

// Index and value of the first maximum, plus the number of `None`s.
fn first_max(vals: impl Iterator<Item = Option<f64>>) -> (Option<(usize, f64)>, usize) {
    let mut best: Option<(usize, f64)> = None;
    let mut skipped = 0;
    for (i, v) in vals.enumerate() {
        match v {
            None => skipped += 1,
            Some(v) => {
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some((i, v));
                }
            }
        }
    }
    (best, skipped)
}

/// Outcome of one pass over the pair set of a sampler.
#[derive(Debug, Clone)]
pub struct PairScan {
    pub best: Option<(f64, Point, Point)>,
    /// Maximum over near-diagonal pairs at each separation, in sampler order.
    pub diagonal_maxima: Vec<(f64, f64)>,
    /// Pairs whose quotient exceeded the threshold given to the scan.
    pub exceedances: usize,
    pub evaluated: usize,
    pub skipped: usize,
}

type Quotient<'a> = dyn Fn(&Point, &Point, &[f64], &[f64]) -> Result<f64> + Sync + 'a;

/// Evaluates `q(ζ, η, f(ζ), f(η))` over the random pairs and then the
/// near-diagonal pairs of `s`. Ties keep the first pair in that order.
pub fn scan_pairs(
    f: &SmoothMap,
    domain: &Domain,
    s: &Sampler,
    threshold: Option<f64>,
    q: &Quotient<'_>,
) -> Result<PairScan> {
    check_map_domain(f, domain)?;
    let random = low_discrepancy_pairs(domain, s.boundary_margin, s.pair_budget, s.pair_seed);
    let random_vals: Vec<Option<f64>> = random
        .par_iter()
        .map(|(z, e)| {
            let fz = f.eval(z).ok()?;
            let fe = f.eval(e).ok()?;
            q(z, e, &fz, &fe).ok().filter(|v| v.is_finite())
        })
        .collect();
    let over = |v: f64| threshold.is_some_and(|t| v > t);
    let (best_random, mut skipped) = first_max(random_vals.iter().copied());
    let mut exceedances = random_vals.iter().flatten().filter(|v| over(**v)).count();
    let mut evaluated = random_vals.len() - skipped;
    let mut best = best_random.map(|(i, v)| (v, random[i].0.clone(), random[i].1.clone()));

    let seps = &s.diagonal_separations;
    let mut diagonal_maxima: Vec<(f64, f64)> = seps.iter().map(|h| (*h, f64::NEG_INFINITY)).collect();
    if !seps.is_empty() {
        let bases = s.points(domain)?;
        let dirs = direction_set(domain.dim(), s.diagonal_directions.max(1), s.pair_seed ^ 0xA5);
        struct BaseScan {
            best: Option<(f64, Point)>,
            per_sep: Vec<f64>,
            exceed: usize,
            evaluated: usize,
            skipped: usize,
        }
        let scans: Vec<BaseScan> = bases
            .par_iter()
            .map(|z| {
                let mut out = BaseScan {
                    best: None,
                    per_sep: vec![f64::NEG_INFINITY; seps.len()],
                    exceed: 0,
                    evaluated: 0,
                    skipped: 0,
                };
                let Ok(fz) = f.eval(z) else {
                    out.skipped += seps.len() * dirs.len();
                    return out;
                };
                for (k, &h) in seps.iter().enumerate() {
                    for u in &dirs {
                        let e = z.offset(u, h);
                        if !domain.contains_coords(e.coords()) {
                            continue;
                        }
                        let v = f.eval(&e).and_then(|fe| q(z, &e, &fz, &fe));
                        match v {
                            Ok(v) if v.is_finite() => {
                                out.evaluated += 1;
                                if over(v) {
                                    out.exceed += 1;
                                }
                                out.per_sep[k] = out.per_sep[k].max(v);
                                if out.best.as_ref().is_none_or(|(b, _)| v > *b) {
                                    out.best = Some((v, e));
                                }
                            }
                            _ => out.skipped += 1,
                        }
                    }
                }
                out
            })
            .collect();
        for (z, sc) in bases.iter().zip(scans) {
            evaluated += sc.evaluated;
            skipped += sc.skipped;
            exceedances += sc.exceed;
            for (k, v) in sc.per_sep.iter().enumerate() {
                diagonal_maxima[k].1 = diagonal_maxima[k].1.max(*v);
            }
            if let Some((v, e)) = sc.best {
                if best.as_ref().is_none_or(|(b, _, _)| v > *b) {
                    best = Some((v, z.clone(), e));
                }
            }
        }
    }
    Ok(PairScan {
        best,
        diagonal_maxima,
        exceedances,
        evaluated,
        skipped,
    })
}

fn estimate_from_scan(scan: PairScan, s: &Sampler, outside_hypotheses: bool) -> Result<SeminormEstimate> {
    let (value, z, e) = scan.best.ok_or(Error::EmptySample)?;
    Ok(SeminormEstimate {
        value,
        witness: EstimateWitness::Pair(z.into_coords(), e.into_coords()),
        samples_used: scan.evaluated,
        skipped: scan.skipped,
        boundary_margin: s.boundary_margin,
        strategy: s.describe(),
        outside_hypotheses,
    })
}

fn difference_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn kernel_quotient(k: &Kernel) -> impl Fn(&Point, &Point, &[f64], &[f64]) -> Result<f64> + Sync + '_ {
    move |z, e, fz, fe| Ok(k.eval(z, e)? * difference_norm(fz, fe) / z.distance(e))
}

/// Sampled `sup W(ζ,η)|f(ζ)−f(η)|/|ζ−η|` over pairs of the kernel's domain.
pub fn lipschitz_seminorm(f: &SmoothMap, k: &Kernel, s: &Sampler) -> Result<SeminormEstimate> {
    let q = kernel_quotient(k);
    let scan = scan_pairs(f, k.domain(), s, None, &q)?;
    estimate_from_scan(scan, s, !f.differentiable)
}

/// Sampled `sup |f(ζ)−f(η)|/d(ζ,η)`. The closed-form provider samples the
/// unit ball of the map's dimension, a geodesic provider its weight's domain.
pub fn dw_quotient_seminorm(f: &SmoothMap, dist: &DistanceProvider, s: &Sampler) -> Result<SeminormEstimate> {
    let domain = match dist {
        DistanceProvider::Hyperbolic => Domain::unit_ball(f.dim_in)?,
        DistanceProvider::Geodesic { weight, .. } => weight.domain().clone(),
    };
    let q = |z: &Point, e: &Point, fz: &[f64], fe: &[f64]| Ok(difference_norm(fz, fe) / dist.distance(z, e)?);
    let scan = scan_pairs(f, &domain, s, None, &q)?;
    estimate_from_scan(scan, s, !f.differentiable)
}

/// Sampled `sup W(ζ,η)` over the pair set of `s`.
pub fn kernel_supremum(k: &Kernel, s: &Sampler) -> Result<SeminormEstimate> {
    let id = SmoothMap::identity(k.domain().dim())?;
    let q = |z: &Point, e: &Point, _: &[f64], _: &[f64]| k.eval(z, e);
    let scan = scan_pairs(&id, k.domain(), s, None, &q)?;
    estimate_from_scan(scan, s, false)
}

/// Sampled `sup w(ζ)` over the points of `s`.
pub fn weight_supremum(w: &Weight, s: &Sampler) -> Result<SeminormEstimate> {
    let pts = s.points(w.domain())?;
    let vals: Vec<Option<f64>> = pts.par_iter().map(|p| w.eval(p).ok()).collect();
    let (best, skipped) = first_max(vals.into_iter());
    let (i, value) = best.ok_or(Error::EmptySample)?;
    Ok(SeminormEstimate {
        value,
        witness: EstimateWitness::Point(pts[i].coords().to_vec()),
        samples_used: pts.len() - skipped,
        skipped,
        boundary_margin: s.boundary_margin,
        strategy: s.describe(),
        outside_hypotheses: false,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperCheck {
    /// `B(1 + tol)`.
    pub bound: f64,
    pub max_quotient: f64,
    pub violations: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagonalCheck {
    /// `B(1 − tol)`.
    pub bound: f64,
    /// `(separation, largest quotient)` per separation.
    pub maxima: Vec<(f64, f64)>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EqualityReport {
    pub map: String,
    pub kernel: String,
    pub bloch: SeminormEstimate,
    pub lipschitz: SeminormEstimate,
    pub difference: f64,
    pub tolerance: f64,
    pub upper: UpperCheck,
    pub diagonal: DiagonalCheck,
    pub verdict: Verdict,
}

/// Compares the Bloch and `W`-Lipschitz estimates of `f`.
///
/// Also reports (i) the pairs whose quotient exceeds `B(1+tol)` and
/// (ii) whether the near-diagonal maximum at the smallest separation
/// reaches `B(1−tol)`. The verdict is pass iff `|B − L| ≤ tol·max(B, 1)`.
pub fn verify_equality(
    f: &SmoothMap,
    w: &Weight,
    k: &Kernel,
    s: &Sampler,
    tol: f64,
) -> Result<EqualityReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    if k.domain().dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            found: k.domain().dim(),
        });
    }
    let bloch = bloch_seminorm(f, w, s)?;
    let b = bloch.value;
    let q = kernel_quotient(k);
    let scan = scan_pairs(f, w.domain(), s, Some(b * (1.0 + tol)), &q)?;
    let violations = scan.exceedances;
    let diag_maxima = scan.diagonal_maxima.clone();
    let lipschitz = estimate_from_scan(scan, s, !f.differentiable)?;
    let l = lipschitz.value;

    let smallest = diag_maxima
        .iter()
        .copied()
        .min_by(|a, b| a.0.total_cmp(&b.0));
    let diag_bound = b * (1.0 - tol);
    let diagonal = DiagonalCheck {
        bound: diag_bound,
        passed: smallest.is_some_and(|(_, m)| m >= diag_bound),
        maxima: diag_maxima,
    };
    let upper = UpperCheck {
        bound: b * (1.0 + tol),
        max_quotient: l,
        violations,
        passed: violations == 0,
    };
    let difference = (b - l).abs();
    Ok(EqualityReport {
        map: f.label.clone(),
        kernel: k.label(),
        verdict: Verdict::from_ok(difference <= tol * b.max(1.0)),
        bloch,
        lipschitz,
        difference,
        tolerance: tol,
        upper,
        diagonal,
    })
}

//! Deterministic point sets for supremum estimation.
//!
//! Low-discrepancy points come from an Owen-scrambled Sobol sequence. The
//! sequence is limited to 2^16 points per seed, so longer runs continue with
//! a fresh scramble per block of 2^16 indices; every prefix of the stream is
//! stable, which makes refinements nested.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Domain, Point};

const BLOCK: u32 = 1 << 16;
const MAX_DIMS: u32 = 256;

/// Component `dim` of the `index`-th point of the unit-cube stream.
pub fn unit_cube_sample(index: u64, dim: u32, seed: u32) -> f64 {
    assert!(dim < MAX_DIMS, "at most {MAX_DIMS} sampling dimensions");
    let block = (index / BLOCK as u64) as u32;
    let within = (index % BLOCK as u64) as u32;
    let block_seed = seed ^ block.wrapping_mul(0x9E37_79B9);
    f64::from(sobol_burley::sample(within, dim, block_seed))
}

/// Iterator over low-discrepancy points of `domain` shrunk by `margin`,
/// produced by rejection from the bounding box. Points of dimension
/// `2m` can be drawn with `components = 2 * m` for pair sampling.
pub struct LowDiscrepancy<'a> {
    domain: &'a Domain,
    margin: f64,
    seed: u32,
    lower: Vec<f64>,
    upper: Vec<f64>,
    copies: usize,
    index: u64,
    // stop after this many consecutive rejections
    patience: u64,
}

impl<'a> LowDiscrepancy<'a> {
    pub fn points(domain: &'a Domain, margin: f64, seed: u64) -> Self {
        Self::with_copies(domain, margin, seed, 1)
    }

    /// Each draw yields `copies` points of the domain concatenated.
    pub fn with_copies(domain: &'a Domain, margin: f64, seed: u64, copies: usize) -> Self {
        let (mut lower, mut upper) = domain.bounds();
        for (l, u) in lower.iter_mut().zip(upper.iter_mut()) {
            let m = margin.max(0.0).min(0.49 * (*u - *l));
            *l += m;
            *u -= m;
        }
        LowDiscrepancy {
            domain,
            margin,
            seed: (seed ^ (seed >> 32)) as u32,
            lower,
            upper,
            copies,
            index: 0,
            patience: 1 << 20,
        }
    }
}

impl Iterator for LowDiscrepancy<'_> {
    type Item = Vec<Point>;

    fn next(&mut self) -> Option<Vec<Point>> {
        let m = self.lower.len();
        let mut misses = 0;
        loop {
            let i = self.index;
            self.index += 1;
            let mut out = Vec::with_capacity(self.copies);
            let mut ok = true;
            for c in 0..self.copies {
                let coords: Vec<f64> = (0..m)
                    .map(|k| {
                        let u = unit_cube_sample(i, (c * m + k) as u32, self.seed);
                        self.lower[k] + u * (self.upper[k] - self.lower[k])
                    })
                    .collect();
                if !self.domain.contains_with_margin(&coords, self.margin) {
                    ok = false;
                    break;
                }
                out.push(Point::from_vec_unchecked(coords));
            }
            if ok {
                return Some(out);
            }
            misses += 1;
            if misses > self.patience {
                return None;
            }
        }
    }
}

/// `count` low-discrepancy points in `domain` shrunk by `margin`.
pub fn low_discrepancy_points(domain: &Domain, margin: f64, count: usize, seed: u64) -> Vec<Point> {
    LowDiscrepancy::points(domain, margin, seed)
        .take(count)
        .map(|mut v| v.pop().expect("one copy"))
        .collect()
}

/// `count` low-discrepancy pairs with both members in the shrunk domain.
pub fn low_discrepancy_pairs(
    domain: &Domain,
    margin: f64,
    count: usize,
    seed: u64,
) -> Vec<(Point, Point)> {
    LowDiscrepancy::with_copies(domain, margin, seed, 2)
        .take(count)
        .map(|mut v| {
            let b = v.pop().expect("two copies");
            let a = v.pop().expect("two copies");
            (a, b)
        })
        .collect()
}

/// Nodes of a tensor grid with `resolution` intervals per axis over the
/// bounding box of the shrunk domain, keeping those inside it. Doubling
/// the resolution yields a superset.
pub fn grid_points(domain: &Domain, margin: f64, resolution: usize) -> Vec<Point> {
    let resolution = resolution.max(1);
    let (mut lower, mut upper) = domain.bounds();
    for (l, u) in lower.iter_mut().zip(upper.iter_mut()) {
        let m = margin.max(0.0).min(0.49 * (*u - *l));
        *l += m;
        *u -= m;
    }
    let m = lower.len();
    let nodes = resolution + 1;
    let total = nodes.checked_pow(m as u32).expect("grid too large");
    let mut out = Vec::new();
    let mut idx = vec![0usize; m];
    for _ in 0..total {
        let coords: Vec<f64> = (0..m)
            .map(|k| {
                // symmetric formula so mirrored nodes are exact negatives
                let t = idx[k] as f64 / resolution as f64;
                0.5 * (lower[k] + upper[k]) + (t - 0.5) * (upper[k] - lower[k])
            })
            .collect();
        if domain.contains_with_margin(&coords, margin) || on_margin(domain, &coords, margin) {
            out.push(Point::from_vec_unchecked(coords));
        }
        for k in 0..m {
            idx[k] += 1;
            if idx[k] < nodes {
                break;
            }
            idx[k] = 0;
        }
    }
    out
}

// Grid nodes exactly on the shrunk boundary are kept when they are still
// inside the domain itself.
fn on_margin(domain: &Domain, x: &[f64], margin: f64) -> bool {
    match domain {
        Domain::UnitBall { .. } => {
            let r = crate::geometry::norm(x);
            r <= 1.0 - margin + 1e-12 && r < 1.0
        }
        _ => false,
    }
}

/// Uniformly distributed unit vectors from a seeded generator.
pub fn random_unit_vectors(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = crate::geometry::norm(&v);
        if n > 1e-3 && n <= 1.0 {
            out.push(v.into_iter().map(|c| c / n).collect());
        }
    }
    out
}

/// Evenly spaced directions on the circle for `dim == 2`; otherwise the
/// `2m` signed axes followed by seeded random unit vectors.
pub fn direction_set(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    if dim == 1 {
        return vec![vec![1.0], vec![-1.0]];
    }
    if dim == 2 {
        return (0..count)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
    }
    let mut dirs = Vec::with_capacity(count.max(2 * dim));
    for k in 0..dim {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; dim];
            v[k] = s;
            dirs.push(v);
        }
    }
    if count > dirs.len() {
        dirs.extend(random_unit_vectors(dim, count - dirs.len(), seed));
    }
    dirs
}

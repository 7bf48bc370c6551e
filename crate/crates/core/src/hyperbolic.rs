//! Closed-form geometry of the unit ball: the bracket `[ζ, η]`, the Möbius
//! transform `T_ζ`, and the hyperbolic distance `ρ = atanh |T_ζ η|`.
//!
//! `T_ζ` is the displayed representative of its class; automorphisms of
//! the ball differ from it by an orthogonal factor, which leaves `|T_ζ η|`
//! and `ρ` unchanged.

use log::warn;

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Points at least this close to the sphere are accepted but logged.
pub const NEAR_BOUNDARY: f64 = 1e-9;

fn ball_norm(p: &Point) -> Result<f64> {
    let n = p.norm();
    if n >= 1.0 {
        return Err(Error::OutsideBall {
            point: p.coords().to_vec(),
            norm: n,
        });
    }
    if n >= 1.0 - NEAR_BOUNDARY {
        warn!("point {p} is within {NEAR_BOUNDARY:e} of the unit sphere; expect reduced accuracy");
    }
    Ok(n)
}

fn check_pair(z: &Point, e: &Point) -> Result<()> {
    z.same_dim(e)?;
    ball_norm(z)?;
    ball_norm(e)?;
    Ok(())
}

/// `atanh t` as `½(log(1+t) − log(1−t))`, accurate up to `t → 1`.
pub fn atanh(t: f64) -> f64 {
    0.5 * (t.ln_1p() - (-t).ln_1p())
}

/// `[z, e] = √(1 − 2⟨z,e⟩ + |z|²|e|²)`.
///
/// Evaluated through the equivalent `|z − e|² + (1 − |z|²)(1 − |e|²)`,
/// which avoids cancellation for nearby points close to the sphere.
pub fn bracket(z: &Point, e: &Point) -> Result<f64> {
    check_pair(z, e)?;
    Ok(bracket_sq_unchecked(z, e).sqrt())
}

fn bracket_sq_unchecked(z: &Point, e: &Point) -> f64 {
    let d2 = z.sub(e).norm_sq();
    d2 + (1.0 - z.norm_sq()) * (1.0 - e.norm_sq())
}

/// The ball automorphism `T_base`, mapping `base` to the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusTransform {
    base: Point,
}

impl MobiusTransform {
    pub fn new(base: Point) -> Result<Self> {
        ball_norm(&base)?;
        Ok(MobiusTransform { base })
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// `T_base(e) = [−(1−|a|²)(a−e) − |a−e|² a] / [a,e]²`.
    pub fn apply(&self, e: &Point) -> Result<Point> {
        check_pair(&self.base, e)?;
        Ok(self.apply_unchecked(e.coords()))
    }

    pub(crate) fn apply_unchecked(&self, e: &[f64]) -> Point {
        let a = self.base.coords();
        let a2: f64 = a.iter().map(|v| v * v).sum();
        let d2: f64 = a.iter().zip(e).map(|(x, y)| (x - y) * (x - y)).sum();
        let e2: f64 = e.iter().map(|v| v * v).sum();
        let br2 = d2 + (1.0 - a2) * (1.0 - e2);
        let coords = a
            .iter()
            .zip(e)
            .map(|(ai, ei)| (-(1.0 - a2) * (ai - ei) - d2 * ai) / br2)
            .collect();
        Point::from_vec_unchecked(coords)
    }

    /// Jacobian of `T_base` at `e`, row-major `m × m`.
    pub(crate) fn jacobian_unchecked(&self, e: &[f64]) -> Vec<f64> {
        let a = self.base.coords();
        let m = a.len();
        let a2: f64 = a.iter().map(|v| v * v).sum();
        let e2: f64 = e.iter().map(|v| v * v).sum();
        let ae: f64 = a.iter().zip(e).map(|(x, y)| x * y).sum();
        let d2 = a2 - 2.0 * ae + e2;
        let den = 1.0 - 2.0 * ae + a2 * e2;
        let num: Vec<f64> = (0..m)
            .map(|i| -(1.0 - a2) * (a[i] - e[i]) - d2 * a[i])
            .collect();
        // ∂den/∂e_j = −2 a_j + 2 |a|² e_j
        let dden: Vec<f64> = (0..m).map(|j| -2.0 * a[j] + 2.0 * a2 * e[j]).collect();
        let mut jac = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                // ∂num_i/∂e_j = (1−|a|²) δ_ij + 2 a_i (a_j − e_j)
                let dnum = if i == j { 1.0 - a2 } else { 0.0 } + 2.0 * a[i] * (a[j] - e[j]);
                jac[i * m + j] = (dnum * den - num[i] * dden[j]) / (den * den);
            }
        }
        jac
    }
}

/// `T_base(e)`.
pub fn mobius(base: &Point, e: &Point) -> Result<Point> {
    MobiusTransform::new(base.clone())?.apply(e)
}

/// `ρ(z, e) = atanh |T_z e|`.
pub fn hyperbolic_distance(z: &Point, e: &Point) -> Result<f64> {
    check_pair(z, e)?;
    if z == e {
        return Ok(0.0);
    }
    let t = MobiusTransform { base: z.clone() }
        .apply_unchecked(e.coords())
        .norm();
    Ok(atanh(t.min(1.0)))
}

/// `ρ(z, e)` through `sinh² ρ = |z−e|² / ((1−|z|²)(1−|e|²))`, an
/// independent route used to cross-check [`hyperbolic_distance`].
pub fn hyperbolic_distance_via_sinh(z: &Point, e: &Point) -> Result<f64> {
    check_pair(z, e)?;
    let d = z.distance(e);
    let s = d / ((1.0 - z.norm_sq()) * (1.0 - e.norm_sq())).sqrt();
    Ok(s.asinh())
}

/// `t/√(1−t²) − ½ log((1+t)/(1−t))` on `[0, 1)`; nonnegative, zero only
/// at `t = 0`.
pub fn scalar_gap(t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("t must lie in [0, 1), got {t}")));
    }
    if t < 0.1 {
        // Σ_k (C(2k,k)/4^k − 1/(2k+1)) t^(2k+1); every coefficient is positive
        let t2 = t * t;
        let mut central = 1.0;
        let mut power = t;
        let mut sum = 0.0;
        for k in 1..=14 {
            let kf = k as f64;
            central *= (2.0 * kf - 1.0) / (2.0 * kf);
            power *= t2;
            sum += (central - 1.0 / (2.0 * kf + 1.0)) * power;
        }
        return Ok(sum);
    }
    Ok(t / (1.0 - t * t).sqrt() - atanh(t))
}

/// `(ρ(z,e)·√(1−|z|²)√(1−|e|²), |z−e|)`; the first never exceeds the second.
pub fn lemma_bound(z: &Point, e: &Point) -> Result<(f64, f64)> {
    let rho = hyperbolic_distance(z, e)?;
    let lhs = rho * (1.0 - z.norm_sq()).sqrt() * (1.0 - e.norm_sq()).sqrt();
    Ok((lhs, z.distance(e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn random_in_ball(rng: &mut ChaCha8Rng, dim: usize, max_norm: f64) -> Point {
        loop {
            let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p = Point::new(v).unwrap();
            if p.norm() <= max_norm {
                return p;
            }
        }
    }

    #[test]
    fn bracket_examples() {
        let z = pt(&[0.3, -0.6]);
        assert_relative_eq!(bracket(&z, &pt(&[0.0, 0.0])).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(bracket(&z, &z).unwrap(), 1.0 - z.norm_sq(), epsilon = 1e-15);
        assert_relative_eq!(
            bracket(&pt(&[0.5, 0.0]), &pt(&[0.0, 0.5])).unwrap(),
            1.0625f64.sqrt(),
            epsilon = 1e-15
        );
        assert_relative_eq!(1.0625f64.sqrt(), 1.030776, epsilon = 1e-6);
    }

    #[test]
    fn bracket_rejects_boundary_points() {
        assert!(matches!(
            bracket(&pt(&[1.0, 0.0]), &pt(&[0.0, 0.0])),
            Err(Error::OutsideBall { .. })
        ));
        assert!(matches!(
            bracket(&pt(&[0.1, 0.0]), &pt(&[0.0, 0.0, 0.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bracket_matches_defining_expression() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let z = random_in_ball(&mut rng, 3, 0.95);
            let e = random_in_ball(&mut rng, 3, 0.95);
            let direct = (1.0 - 2.0 * z.dot(&e) + z.norm_sq() * e.norm_sq()).sqrt();
            assert_relative_eq!(bracket(&z, &e).unwrap(), direct, max_relative = 1e-13);
        }
    }

    #[test]
    fn mobius_examples() {
        let z = pt(&[0.3, -0.6]);
        assert!(mobius(&z, &z).unwrap().norm() < 1e-16);
        let m0 = mobius(&z, &pt(&[0.0, 0.0])).unwrap();
        assert_relative_eq!(m0.coords()[0], -0.3, epsilon = 1e-16);
        assert_relative_eq!(m0.coords()[1], 0.6, epsilon = 1e-16);
    }

    #[test]
    fn mobius_modulus_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let z = random_in_ball(&mut rng, 2, 0.95);
            let e = random_in_ball(&mut rng, 2, 0.95);
            let lhs = mobius(&z, &e).unwrap().norm();
            let rhs = z.distance(&e) / bracket(&z, &e).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
        }
    }

    #[test]
    fn mobius_jacobian_matches_finite_differences() {
        let t = MobiusTransform::new(pt(&[0.4, -0.2, 0.1])).unwrap();
        let e = [0.1, 0.3, -0.5];
        let jac = t.jacobian_unchecked(&e);
        let h = 1e-6;
        for j in 0..3 {
            let mut ep = e;
            let mut em = e;
            ep[j] += h;
            em[j] -= h;
            let fp = t.apply_unchecked(&ep);
            let fm = t.apply_unchecked(&em);
            for i in 0..3 {
                let fd = (fp.coords()[i] - fm.coords()[i]) / (2.0 * h);
                assert_relative_eq!(jac[i * 3 + j], fd, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn distance_examples() {
        let o = pt(&[0.0, 0.0]);
        assert_eq!(hyperbolic_distance(&o, &o).unwrap(), 0.0);
        let half = pt(&[0.5, 0.0]);
        assert_relative_eq!(hyperbolic_distance(&o, &half).unwrap(), 0.5 * 3f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(hyperbolic_distance(&o, &half).unwrap(), 0.5493061, epsilon = 1e-7);
        let d = hyperbolic_distance(&half, &pt(&[0.0, 0.5])).unwrap();
        assert_relative_eq!(d, (0.5f64.sqrt() / 1.0625f64.sqrt()).atanh(), epsilon = 1e-14);
        assert_relative_eq!(d, 0.840350, epsilon = 1e-6);
    }

    #[test]
    fn distance_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let z = random_in_ball(&mut rng, 3, 0.95);
            let e = random_in_ball(&mut rng, 3, 0.95);
            assert_relative_eq!(
                hyperbolic_distance(&z, &e).unwrap(),
                hyperbolic_distance_via_sinh(&z, &e).unwrap(),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn atanh_is_accurate_near_one() {
        let t = 1.0 - 1e-12;
        assert_relative_eq!(atanh(t), t.atanh(), max_relative = 1e-12);
        assert_eq!(atanh(0.0), 0.0);
    }

    #[test]
    fn scalar_gap_examples() {
        assert_eq!(scalar_gap(0.0).unwrap(), 0.0);
        let g = scalar_gap(0.5).unwrap();
        assert_relative_eq!(g, 0.5 / 0.75f64.sqrt() - 0.5 * 3f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(g, 0.028044, epsilon = 1e-6);
        assert!(scalar_gap(0.9).unwrap() > g);
        assert!(scalar_gap(1.0).is_err());
        assert!(scalar_gap(-0.1).is_err());
    }

    #[test]
    fn scalar_gap_series_joins_closed_form() {
        let below = scalar_gap(0.1 - 1e-12).unwrap();
        let above = scalar_gap(0.1).unwrap();
        assert_relative_eq!(below, above, max_relative = 1e-9);
        assert!(scalar_gap(1e-8).unwrap() > 0.0);
    }

    #[test]
    fn scalar_gap_derivative_matches_lemma_formula() {
        // d/dt gap = (1−t²)^(-3/2) − (1−t²)^(-1)
        for &t in &[0.05, 0.2, 0.5, 0.8, 0.95] {
            let h = 1e-6;
            let fd = (scalar_gap(t + h).unwrap() - scalar_gap(t - h).unwrap()) / (2.0 * h);
            let s = 1.0 - t * t;
            let exact = s.powf(-1.5) - 1.0 / s;
            assert_relative_eq!(fd, exact, max_relative = 1e-5);
        }
    }

    #[test]
    fn lemma_bound_examples() {
        let o = pt(&[0.0, 0.0]);
        assert_eq!(lemma_bound(&o, &o).unwrap(), (0.0, 0.0));
        let (l, r) = lemma_bound(&o, &pt(&[0.5, 0.0])).unwrap();
        assert_relative_eq!(l, 0.5 * 3f64.ln() * 0.75f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(l, 0.475713, epsilon = 1e-6);
        assert_eq!(r, 0.5);
        let z = pt(&[0.3, 0.4]);
        let e = pt(&[0.3 + 1e-4, 0.4]);
        let (l, r) = lemma_bound(&z, &e).unwrap();
        assert!(l / r > 0.999 && l <= r);
    }

    #[test]
    fn mobius_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let a = MobiusTransform::new(random_in_ball(&mut rng, 2, 0.9)).unwrap();
            let z = random_in_ball(&mut rng, 2, 0.9);
            let e = random_in_ball(&mut rng, 2, 0.9);
            let before = hyperbolic_distance(&z, &e).unwrap();
            let after = hyperbolic_distance(&a.apply(&z).unwrap(), &a.apply(&e).unwrap()).unwrap();
            assert_relative_eq!(before, after, max_relative = 1e-10);
        }
    }
}

//! Weight functions `w(ζ)`: built-in families and parsed expressions.

use std::fmt;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::{parse_weight, WeightExpr};
use crate::geometry::{norm, Domain, Point};
use crate::sampling::low_discrepancy_points;

/// Values at or below this are treated as a positivity violation.
pub const POSITIVITY_THRESHOLD: f64 = 1e-12;

/// Number of low-discrepancy points checked when a weight is built.
pub const SPOT_CHECK_SAMPLES: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightSource {
    /// `1 - |ζ|²`.
    Hyperbolic,
    /// `(1 - |ζ|²)^alpha`.
    Power { alpha: f64 },
    Constant { value: f64 },
    Parsed(WeightExpr),
}

/// An everywhere-positive weight on a domain.
///
/// Continuity of parsed expressions is the caller's responsibility; it
/// cannot be verified from the expression alone.
#[derive(Debug, Clone)]
pub struct Weight {
    source: WeightSource,
    domain: Domain,
}

impl Weight {
    /// Built-in weight by name: `hyperbolic`, `power` (`[alpha]`, alpha > 0)
    /// or `constant` (`[c]`, c > 0).
    pub fn builtin(name: &str, parameters: &[f64], domain: Domain) -> Result<Self> {
        let source = match name {
            "hyperbolic" => {
                expect_params(name, parameters, 0)?;
                WeightSource::Hyperbolic
            }
            "power" => {
                expect_params(name, parameters, 1)?;
                let alpha = parameters[0];
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "power weight needs alpha > 0, got {alpha}"
                    )));
                }
                WeightSource::Power { alpha }
            }
            "constant" => {
                expect_params(name, parameters, 1)?;
                let value = parameters[0];
                if !(value > 0.0 && value.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "constant weight needs c > 0, got {value}"
                    )));
                }
                WeightSource::Constant { value }
            }
            other => return Err(Error::UnknownName(other.to_string())),
        };
        Weight::from_source(source, domain)
    }

    pub fn hyperbolic(dim: usize) -> Result<Self> {
        Weight::builtin("hyperbolic", &[], Domain::unit_ball(dim)?)
    }

    /// Parses `text` with the domain's dimension.
    pub fn parse(text: &str, domain: Domain) -> Result<Self> {
        let expr = parse_weight(text, domain.dim())?;
        Weight::from_source(WeightSource::Parsed(expr), domain)
    }

    /// CLI-style specifier: `hyperbolic`, `power:2.0`, `constant:1`,
    /// `expr:1-r^2`.
    pub fn from_spec(spec: &str, domain: Domain) -> Result<Self> {
        if let Some(text) = spec.strip_prefix("expr:") {
            return Weight::parse(text, domain);
        }
        let (name, params) = match spec.split_once(':') {
            Some((n, p)) => (n, p),
            None => (spec, ""),
        };
        let parameters = if params.trim().is_empty() {
            Vec::new()
        } else {
            params
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidParameter(format!("bad weight parameter {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Weight::builtin(name, &parameters, domain)
    }

    pub fn from_source(source: WeightSource, domain: Domain) -> Result<Self> {
        if let WeightSource::Parsed(e) = &source {
            if e.dimension() != domain.dim() {
                return Err(Error::DimensionMismatch {
                    expected: domain.dim(),
                    found: e.dimension(),
                });
            }
        }
        let w = Weight { source, domain };
        // keep clear of the boundary, where admissible weights may vanish
        let margin = 0.01 * w.domain.inner_radius();
        for p in low_discrepancy_points(&w.domain, margin, SPOT_CHECK_SAMPLES, 0x5107) {
            w.eval(&p)?;
        }
        Ok(w)
    }

    pub fn source(&self) -> &WeightSource {
        &self.source
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// `w(p)`; fails outside the domain and where the value is not above
    /// [`POSITIVITY_THRESHOLD`].
    pub fn eval(&self, p: &Point) -> Result<f64> {
        self.domain.check_dim(p)?;
        self.eval_coords(p.coords())
    }

    /// As [`Weight::eval`] without the dimension check.
    pub fn eval_coords(&self, x: &[f64]) -> Result<f64> {
        if !self.domain.contains_coords(x) {
            return Err(Error::OutsideDomain { point: x.to_vec() });
        }
        let v = self.raw(x)?;
        if !v.is_finite() {
            return Err(Error::Arithmetic(format!("weight is not finite at {x:?}")));
        }
        if v <= POSITIVITY_THRESHOLD {
            return Err(Error::NonPositiveWeight {
                point: x.to_vec(),
                value: v,
            });
        }
        Ok(v)
    }

    fn raw(&self, x: &[f64]) -> Result<f64> {
        Ok(match &self.source {
            WeightSource::Hyperbolic => 1.0 - x.iter().map(|c| c * c).sum::<f64>(),
            WeightSource::Power { alpha } => {
                let base = 1.0 - x.iter().map(|c| c * c).sum::<f64>();
                if base <= 0.0 {
                    base
                } else {
                    base.powf(*alpha)
                }
            }
            WeightSource::Constant { value } => *value,
            WeightSource::Parsed(e) => e.eval(x)?,
        })
    }

    /// Samples `rays` random rays from the origin and checks that `w`
    /// depends only on `|ζ|` and does not increase along each ray.
    ///
    /// The origin must lie in the domain. This is a sampled check, not a
    /// proof.
    pub fn is_radially_decreasing(&self, rays: usize, seed: u64) -> bool {
        const STEPS: usize = 64;
        let dim = self.dim();
        if !self.domain.contains_coords(&vec![0.0; dim]) {
            return false;
        }
        let (lower, upper) = self.domain.bounds();
        let reach = lower
            .iter()
            .chain(&upper)
            .fold(0.0f64, |m, v| m.max(v.abs()))
            * (dim as f64).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut profiles: Vec<Vec<Option<f64>>> = Vec::with_capacity(rays);
        for _ in 0..rays {
            let dir = loop {
                let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                let n = norm(&v);
                if n > 1e-3 && n <= 1.0 {
                    break v.into_iter().map(|c| c / n).collect::<Vec<_>>();
                }
            };
            let mut prev = f64::INFINITY;
            let mut profile = Vec::with_capacity(STEPS);
            for k in 0..STEPS {
                let t = reach * k as f64 / STEPS as f64;
                let x: Vec<f64> = dir.iter().map(|d| d * t).collect();
                let v = self.eval_coords(&x).ok();
                if let Some(v) = v {
                    if v > prev * (1.0 + 1e-12) {
                        return false;
                    }
                    prev = v;
                }
                profile.push(v);
            }
            profiles.push(profile);
        }
        // same radius, different rays
        for k in 0..STEPS {
            let mut vals = profiles.iter().filter_map(|p| p[k]);
            if let Some(first) = vals.next() {
                if vals.any(|v| (v - first).abs() > 1e-9 * first.abs().max(1.0)) {
                    return false;
                }
            }
        }
        true
    }
}

fn expect_params(name: &str, parameters: &[f64], n: usize) -> Result<()> {
    if parameters.len() == n {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "weight {name} takes {n} parameter(s), got {}",
            parameters.len()
        )))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            WeightSource::Hyperbolic => f.write_str("hyperbolic"),
            WeightSource::Power { alpha } => write!(f, "power:{alpha}"),
            WeightSource::Constant { value } => write!(f, "constant:{value}"),
            WeightSource::Parsed(e) => write!(f, "expr:{e}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::RngExt;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn hyperbolic_examples() {
        let w = Weight::hyperbolic(2).unwrap();
        assert_eq!(w.eval(&pt(&[0.0, 0.0])).unwrap(), 1.0);
        assert_eq!(w.eval(&pt(&[0.5, 0.0])).unwrap(), 0.75);
    }

    #[test]
    fn power_weight_alpha_two() {
        let w = Weight::builtin("power", &[2.0], Domain::unit_ball(2).unwrap()).unwrap();
        assert_relative_eq!(w.eval(&pt(&[0.5, 0.0])).unwrap(), 0.5625, epsilon = 1e-15);
    }

    #[test]
    fn constant_on_box() {
        let bx = Domain::open_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let w = Weight::builtin("constant", &[1.0], bx).unwrap();
        assert_eq!(w.eval(&pt(&[0.3, 0.9])).unwrap(), 1.0);
    }

    #[test]
    fn builtin_errors() {
        let ball = Domain::unit_ball(2).unwrap();
        assert!(matches!(
            Weight::builtin("power", &[0.0], ball.clone()),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            Weight::builtin("constant", &[-1.0], ball.clone()),
            Err(Error::InvalidParameter(_))
        ));
        assert_eq!(
            Weight::builtin("gaussian", &[], ball).unwrap_err(),
            Error::UnknownName("gaussian".into())
        );
    }

    #[test]
    fn spot_check_rejects_sign_errors() {
        let ball = Domain::unit_ball(2).unwrap();
        assert!(matches!(
            Weight::parse("r^2-1", ball.clone()),
            Err(Error::NonPositiveWeight { .. })
        ));
        // hyperbolic weight on a box reaching outside the ball
        let bx = Domain::open_box(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap();
        assert!(Weight::builtin("hyperbolic", &[], bx).is_err());
    }

    #[test]
    fn eval_errors() {
        let w = Weight::hyperbolic(2).unwrap();
        assert!(matches!(w.eval(&pt(&[1.0, 0.0])), Err(Error::OutsideDomain { .. })));
        assert!(matches!(w.eval(&pt(&[0.1])), Err(Error::DimensionMismatch { .. })));
        let w = Weight::parse("1-r^2+1e-13", Domain::unit_ball(2).unwrap()).unwrap();
        assert!(matches!(
            w.eval(&pt(&[1.0 - 1e-15, 0.0])),
            Err(Error::NonPositiveWeight { .. })
        ));
    }

    #[test]
    fn specifiers() {
        let ball = Domain::unit_ball(2).unwrap();
        let p = pt(&[0.5, 0.0]);
        let w = Weight::from_spec("power:2.0", ball.clone()).unwrap();
        assert_relative_eq!(w.eval(&p).unwrap(), 0.5625, epsilon = 1e-15);
        let w = Weight::from_spec("expr:1-r^2", ball.clone()).unwrap();
        assert_eq!(w.eval(&p).unwrap(), 0.75);
        assert_eq!(w.to_string(), "expr:(1.0-(r^2.0))");
        let err = Weight::from_spec("expr:1-q^2", ball).unwrap_err();
        assert!(err.to_string().contains("\"q\""));
    }

    #[test]
    fn parsed_agrees_with_builtin() {
        let ball = Domain::unit_ball(3).unwrap();
        let a = Weight::builtin("hyperbolic", &[], ball.clone()).unwrap();
        let b = Weight::parse("1-r^2", ball).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut n = 0;
        while n < 1000 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            if norm(&x) >= 0.999 {
                continue;
            }
            n += 1;
            let p = Point::new(x).unwrap();
            assert!((a.eval(&p).unwrap() - b.eval(&p).unwrap()).abs() <= 1e-15);
        }
    }

    #[test]
    fn evaluation_is_deterministic() {
        let w = Weight::parse("exp(-r)*(1-r^2)^1.5", Domain::unit_ball(2).unwrap()).unwrap();
        let p = pt(&[0.3, -0.41]);
        assert_eq!(w.eval(&p).unwrap().to_bits(), w.eval(&p).unwrap().to_bits());
    }

    #[test]
    fn radial_monotonicity_predicate() {
        let ball = Domain::unit_ball(2).unwrap();
        assert!(Weight::hyperbolic(2).unwrap().is_radially_decreasing(64, 0));
        assert!(Weight::builtin("power", &[3.0], ball.clone())
            .unwrap()
            .is_radially_decreasing(64, 0));
        // increasing in r
        assert!(!Weight::parse("1+r", ball.clone()).unwrap().is_radially_decreasing(64, 0));
        // decreasing along rays but not radial
        assert!(!Weight::parse("2-r^2+0.5*x1", ball).unwrap().is_radially_decreasing(64, 0));
    }
}

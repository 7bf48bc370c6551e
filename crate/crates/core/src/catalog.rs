//! Maps with known Bloch semi-norms, used to calibrate the estimators.
//!
//! Planar maps identify `R²` with `C`. Specifiers:
//!
//! * `identity` or `identity:m`
//! * `poly:c0,c1,...` for `Σ c_k z^k`, coefficients written `re`, `re+imi` or `imi`
//! * `mobius:a1,...,am` for the ball automorphism `T_a`
//! * `atanh` for `½ log((1+z)/(1−z))`, Bloch semi-norm 1
//! * `colonna` for `(2/π) Arg((1+z)/(1−z))` into `R`, Bloch semi-norm `4/π`

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::hyperbolic::MobiusTransform;
use crate::seminorms::{Matrix, SmoothMap};

pub const CATALOG_NAMES: [&str; 5] = ["identity", "poly", "mobius", "atanh", "colonna"];

/// Real 2×2 matrix of multiplication by `c`.
fn complex_jacobian(c: Complex64) -> Matrix {
    Matrix::new(2, 2, vec![c.re, -c.im, c.im, c.re]).expect("2x2")
}

fn to_c(x: &[f64]) -> Complex64 {
    Complex64::new(x[0], x[1])
}

pub fn identity(dim: usize) -> Result<SmoothMap> {
    SmoothMap::identity(dim)
}

/// `Σ c_k z^k` on the plane.
pub fn polynomial(coefficients: Vec<Complex64>) -> Result<SmoothMap> {
    if coefficients.is_empty() {
        return Err(Error::InvalidParameter("a polynomial needs a coefficient".into()));
    }
    let label = format!(
        "poly:{}",
        coefficients.iter().map(format_complex).collect::<Vec<_>>().join(",")
    );
    let derivative: Vec<Complex64> = coefficients
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect();
    let horner = |cs: &[Complex64], z: Complex64| cs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
    let cs = coefficients.clone();
    Ok(SmoothMap::new(label, 2, 2, move |x| {
        let v = horner(&cs, to_c(x));
        vec![v.re, v.im]
    })?
    .with_jacobian(move |x| complex_jacobian(horner(&derivative, to_c(x)))))
}

/// The ball automorphism `T_a`; isometric for `d_ρ`, Bloch semi-norm 1.
pub fn mobius(base: Point) -> Result<SmoothMap> {
    let t = MobiusTransform::new(base)?;
    let m = t.dim();
    let label = format!("mobius:{}", t.base());
    let t2 = t.clone();
    Ok(SmoothMap::new(label, m, m, move |x| t.apply_unchecked(x).into_coords())?
        .with_jacobian(move |x| Matrix::new(m, m, t2.jacobian_unchecked(x)).expect("square")))
}

/// `½ log((1+z)/(1−z))` on the disc.
pub fn atanh_map() -> Result<SmoothMap> {
    Ok(SmoothMap::new("atanh", 2, 2, |x| {
        let z = to_c(x);
        let v = 0.5 * ((1.0 + z) / (1.0 - z)).ln();
        vec![v.re, v.im]
    })?
    .with_jacobian(|x| {
        let z = to_c(x);
        complex_jacobian(1.0 / (1.0 - z * z))
    }))
}

/// `(2/π) Arg((1+z)/(1−z))`, mapping the disc onto `(−1, 1)`.
pub fn colonna() -> Result<SmoothMap> {
    Ok(SmoothMap::new("colonna", 2, 1, |x| {
        let z = to_c(x);
        vec![(2.0 / PI) * ((1.0 + z) / (1.0 - z)).arg()]
    })?
    .with_jacobian(|x| {
        // u = Im G with G = (2/π) log((1+z)/(1−z)), G' = (4/π)/(1−z²)
        let z = to_c(x);
        let g = (4.0 / PI) / (1.0 - z * z);
        Matrix::new(1, 2, vec![g.im, g.re]).expect("1x2")
    }))
}

/// Builds a map from its specifier; `dim` is used by `identity` when no
/// dimension is given. Exact Jacobians are checked against differences.
pub fn from_spec(spec: &str, dim: usize) -> Result<SmoothMap> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (spec.trim(), None),
    };
    let map = match (name, arg) {
        ("identity", None) => identity(dim)?,
        ("identity", Some(a)) => identity(
            a.parse()
                .map_err(|_| Error::InvalidParameter(format!("bad dimension {a:?}")))?,
        )?,
        ("poly", Some(a)) => polynomial(a.split(',').map(parse_complex).collect::<Result<_>>()?)?,
        ("mobius", Some(a)) => mobius(a.parse()?)?,
        ("atanh", None) => atanh_map()?,
        ("colonna", None) => colonna()?,
        ("poly" | "mobius", None) => {
            return Err(Error::InvalidParameter(format!("{name} needs parameters")));
        }
        ("atanh" | "colonna", Some(_)) => {
            return Err(Error::InvalidParameter(format!("{name} takes no parameters")));
        }
        _ => return Err(Error::UnknownName(spec.to_string())),
    };
    map.validate_jacobian(&Domain::unit_ball(map.dim_in())?, 0)?;
    Ok(map)
}

fn format_complex(c: &Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.im < 0.0 {
        format!("{}{}i", c.re, c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

/// Parses `re`, `imi`, `re+imi` or `re-imi`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let t = text.trim();
    let bad = || Error::InvalidParameter(format!("bad complex number {text:?}"));
    let num = |s: &str| -> Result<f64> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s.parse::<f64>().map_err(|_| bad()),
        }
    };
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(t.parse::<f64>().map_err(|_| bad())?, 0.0));
    };
    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let c = match split {
        Some(i) => Complex64::new(body[..i].parse::<f64>().map_err(|_| bad())?, num(&body[i..])?),
        None => Complex64::new(0.0, num(body)?),
    };
    if c.re.is_finite() && c.im.is_finite() {
        Ok(c)
    } else {
        Err(bad())
    }
}

//! Complete elliptic integral of the second kind and the ellipse perimeter.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Modulus handed to E(k) when measuring the perimeter of an ellipse with
/// semi-axes max >= min.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusConvention {
    /// k = sqrt(1 - (min/max)^2), the eccentricity; gives the exact perimeter
    /// 4*max*E(k).
    Eccentric,
    /// k = 1 - min/max. Agrees with `Eccentric` at the circle (k = 0) and the
    /// degenerate segment (k = 1) but differs in between.
    OneMinusRatio,
}

/// E(k) = integral over [0,1] of sqrt(1 - k^2 t^2)/sqrt(1 - t^2) dt,
/// computed by the arithmetic-geometric-mean iteration.
pub fn elliptic_e(k: f64) -> Result<f64> {
    if !k.is_finite() || !(0.0..=1.0).contains(&k) {
        return Err(Error::Domain(format!(
            "elliptic modulus {k} outside [0, 1]"
        )));
    }
    if k == 1.0 {
        return Ok(1.0);
    }
    // E = K * (1 - sum over n of 2^(n-1) c_n^2), c_0 = k, K = pi/(2 a_inf)
    let mut a = 1.0_f64;
    let mut b = (1.0 - k * k).sqrt();
    let mut c = k;
    let mut sum = 0.5 * c * c;
    let mut pow = 0.5;
    for _ in 0..64 {
        if c.abs() <= 1e-17 {
            break;
        }
        c = 0.5 * (a - b);
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        sum += pow * c * c;
    }
    Ok(std::f64::consts::FRAC_PI_2 / a * (1.0 - sum))
}

/// Perimeter of the ellipse with semi-axes `a`, `b` (order irrelevant) under
/// the eccentric modulus. The point (0, 0) measures 0 by continuity.
pub fn arc_length(a: f64, b: f64) -> Result<f64> {
    arc_length_with(a, b, ModulusConvention::Eccentric)
}

/// Perimeter under a chosen modulus convention, as 4*max*E(k).
pub fn arc_length_with(a: f64, b: f64, convention: ModulusConvention) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a < 0.0 || b < 0.0 {
        return Err(Error::Domain(format!(
            "semi-axes must be finite and non-negative, got ({a}, {b})"
        )));
    }
    let (min, max) = if a <= b { (a, b) } else { (b, a) };
    if max == 0.0 {
        return Ok(0.0);
    }
    let ratio = min / max;
    let k = match convention {
        ModulusConvention::Eccentric => (1.0 - ratio * ratio).max(0.0).sqrt(),
        ModulusConvention::OneMinusRatio => 1.0 - ratio,
    };
    Ok(4.0 * max * elliptic_e(k.min(1.0))?)
}

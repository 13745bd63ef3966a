//! Schwarzschild exterior coordinates and static worldlines.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::special::w_of_exp;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeParams {
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticDetector {
    pub radius: f64,
    pub gap: f64,
    pub tau0: f64,
    pub coupling: f64,
}

impl StaticDetector {
    pub fn new(radius: f64, gap: f64, tau0: f64) -> Self {
        StaticDetector { radius, gap, tau0, coupling: 1.0 }
    }
}

/// Null coordinates along a static worldline and their proper-time rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullCoords {
    pub u: Complex64,
    pub v: Complex64,
    pub big_u: Complex64,
    pub big_v: Complex64,
    pub ubar: Complex64,
    pub du: Complex64,
    pub dv: Complex64,
    pub dbig_u: Complex64,
    pub dbig_v: Complex64,
    pub dubar: Complex64,
}

pub fn metric_f(r: f64, m: f64) -> f64 {
    1.0 - 2.0 * m / r
}

pub fn tortoise(r: f64, m: f64) -> Result<f64> {
    if m == 0.0 {
        return Ok(r);
    }
    if !(r > 2.0 * m) {
        return Err(Error::Domain(format!("tortoise coordinate needs r > 2M, got r={r}, M={m}")));
    }
    Ok(r + 2.0 * m * (r / (2.0 * m) - 1.0).ln())
}

fn proper_distance_primitive(r: f64, m: f64) -> f64 {
    let rh = 2.0 * m;
    let s = (r - rh).max(0.0);
    (r * s).sqrt() + rh * ((r.sqrt() + s.sqrt()) / rh.sqrt()).ln()
}

pub fn proper_distance(r1: f64, r2: f64, m: f64) -> Result<f64> {
    if r1 < 2.0 * m || r1 > r2 {
        return Err(Error::Domain(format!(
            "proper_distance needs 2M <= r1 <= r2, got r1={r1}, r2={r2}, M={m}"
        )));
    }
    if m == 0.0 {
        return Ok(r2 - r1);
    }
    Ok(proper_distance_primitive(r2, m) - proper_distance_primitive(r1, m))
}

pub fn radius_from_proper_distance(d: f64, r_ref: f64, m: f64) -> Result<f64> {
    if d < 0.0 || r_ref < 2.0 * m || !d.is_finite() {
        return Err(Error::Domain(format!(
            "radius_from_proper_distance needs d >= 0 and r_ref >= 2M, got d={d}, r_ref={r_ref}"
        )));
    }
    if d == 0.0 {
        return Ok(r_ref);
    }
    if m == 0.0 {
        return Ok(r_ref + d);
    }
    // proper distance is at least the coordinate distance, so r <= r_ref + d
    let (mut lo, mut hi) = (r_ref, r_ref + d);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let res = proper_distance(r_ref, mid, m)? - d;
        if res.abs() <= 1e-12 || mid == lo || mid == hi {
            return Ok(mid);
        }
        if res > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::NoConvergence(format!("no radius at proper distance {d} from {r_ref}")))
}

pub fn redshift_gamma(ri: f64, rj: f64, m: f64) -> Result<f64> {
    if !(ri > 2.0 * m && rj > 2.0 * m) {
        return Err(Error::Domain(format!("redshift factor needs r > 2M, got {ri}, {rj}")));
    }
    Ok((metric_f(ri, m) / metric_f(rj, m)).sqrt())
}

/// True when the whole strong support [tau0 - b sigma, tau0 + b sigma] lies at v > 0,
/// i.e. after the collapsing shell has passed.
pub fn shell_admissible(det: &StaticDetector, m: f64, b: f64, sigma: f64) -> bool {
    if !(det.radius > 2.0 * m) {
        return false;
    }
    if m == 0.0 {
        return true;
    }
    let rstar = match tortoise(det.radius, m) {
        Ok(x) => x,
        Err(_) => return false,
    };
    det.tau0 > b * sigma - metric_f(det.radius, m).sqrt() * rstar
}

/// Precomputed static worldline at fixed radius.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Worldline {
    pub sqrt_f: f64,
    pub rate: f64,
    pub rstar: f64,
}

impl Worldline {
    pub fn new(r: f64, m: f64) -> Result<Self> {
        if m == 0.0 {
            return Ok(Worldline { sqrt_f: 1.0, rate: 1.0, rstar: r });
        }
        let rstar = tortoise(r, m)?;
        let sqrt_f = metric_f(r, m).sqrt();
        Ok(Worldline { sqrt_f, rate: 1.0 / sqrt_f, rstar })
    }

    #[inline]
    pub fn u(&self, tau: Complex64) -> Complex64 {
        tau * self.rate - self.rstar
    }

    #[inline]
    pub fn v(&self, tau: Complex64) -> Complex64 {
        tau * self.rate + self.rstar
    }
}

pub fn pullback(det: &StaticDetector, tau: Complex64, m: f64) -> Result<NullCoords> {
    if !(m > 0.0) {
        return Err(Error::Domain("Kruskal coordinates need M > 0".into()));
    }
    let wl = Worldline::new(det.radius, m)?;
    let rate = Complex64::new(wl.rate, 0.0);
    let u = wl.u(tau);
    let v = wl.v(tau);
    let k = 1.0 / (4.0 * m);
    let big_u = -(-u * k).exp();
    let big_v = (v * k).exp();
    let w = w_of_exp(-u * k - 1.0)?;
    let ubar = -4.0 * m * (1.0 + w);
    Ok(NullCoords {
        u,
        v,
        big_u,
        big_v,
        ubar,
        du: rate,
        dv: rate,
        dbig_u: -big_u * rate * k,
        dbig_v: big_v * rate * k,
        dubar: rate * w / (1.0 + w),
    })
}

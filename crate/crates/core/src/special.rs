//! Lambert W (branches 0 and -1), the Wright omega function and erfc.

use num_complex::Complex64;
use std::f64::consts::{E, PI};

use crate::{Error, Result};

const INV_E: f64 = 1.0 / E;
const MAX_ITER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WBranch {
    Principal,
    MinusOne,
}

/// What the principal branch does with a point on its cut (-inf, -1/e).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutPolicy {
    #[default]
    Reject,
    /// Continue from the upper half-plane.
    FromAbove,
}

pub fn lambert_w(branch: WBranch, z: Complex64) -> Result<Complex64> {
    lambert_w_with(branch, z, CutPolicy::Reject)
}

pub fn lambert_w_with(branch: WBranch, z: Complex64, policy: CutPolicy) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("lambert_w of non-finite argument {z}")));
    }
    match branch {
        WBranch::MinusOne => {
            if z.im != 0.0 || z.re < -INV_E || z.re >= 0.0 {
                return Err(Error::Domain(format!(
                    "W_-1 is only defined for real z in [-1/e, 0), got {z}"
                )));
            }
            Ok(Complex64::new(w_minus_one_real(z.re)?, 0.0))
        }
        WBranch::Principal => {
            if z.im == 0.0 {
                if z.re >= -INV_E {
                    return Ok(Complex64::new(w0_real(z.re)?, 0.0));
                }
                if policy == CutPolicy::Reject {
                    return Err(Error::BranchCut(format!(
                        "W_0 argument {} lies on the cut (-inf, -1/e)",
                        z.re
                    )));
                }
                // +0 imaginary part selects the upper side in every complex op below.
                return w0_complex(Complex64::new(z.re, 0.0));
            }
            w0_complex(z)
        }
    }
}

fn w0_real(x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == -INV_E {
        return Ok(-1.0);
    }
    let mut w = if x < -0.25 {
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        // Pade-like start, good on (-0.25, 3).
        x * (1.0 + 1.5 * x) / (1.0 + 2.5 * x + 0.5 * x * x).max(1e-3)
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..MAX_ITER {
        let step = halley_step_real(w, x);
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            return Ok(w);
        }
    }
    Err(Error::NoConvergence(format!("W_0({x}) did not converge")))
}

fn w_minus_one_real(x: f64) -> Result<f64> {
    if x == -INV_E {
        return Ok(-1.0);
    }
    let mut w = if x < -0.25 {
        let p = -(2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..MAX_ITER {
        let step = halley_step_real(w, x);
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            return Ok(w.min(-1.0));
        }
    }
    Err(Error::NoConvergence(format!("W_-1({x}) did not converge")))
}

fn halley_step_real(w: f64, x: f64) -> f64 {
    let ew = w.exp();
    let f = w * ew - x;
    let wp1 = w + 1.0;
    if wp1 == 0.0 {
        return 0.0;
    }
    f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
}

fn w0_complex(z: Complex64) -> Result<Complex64> {
    if z.norm() > 1e8 {
        // e^w would be huge; solve w + ln w = ln z instead.
        return omega_log_newton(z.ln());
    }
    let near_branch = z + INV_E;
    let mut guesses = Vec::with_capacity(3);
    if near_branch.norm() < 0.3 {
        let p = (2.0 * (E * z + 1.0)).sqrt();
        guesses.push(-1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p);
    }
    if z.norm() < 1.0 {
        guesses.push(z * (1.0 + 1.5 * z) / (1.0 + 2.5 * z + 0.5 * z * z));
    }
    if z.norm() < 4.0 {
        guesses.push((1.0 + z).ln());
    }
    let l1 = z.ln();
    let l2 = l1.ln();
    guesses.push(l1 - l2 + l2 / l1);
    for w in guesses {
        if let Some(w) = halley(z, w) {
            if in_principal_range(w) {
                return Ok(w);
            }
        }
    }
    Err(Error::NoConvergence(format!("W_0({z}) did not converge")))
}

fn halley(z: Complex64, mut w: Complex64) -> Option<Complex64> {
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        if wp1.norm() == 0.0 {
            return None;
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if !w.is_finite() {
            return None;
        }
        if step.norm() <= 4.0 * f64::EPSILON * (1.0 + w.norm()) {
            return Some(w);
        }
    }
    None
}

/// The image of W_0 is bounded by the curve x = -y cot y, |y| < pi.
fn in_principal_range(w: Complex64) -> bool {
    let y = w.im.abs();
    if y >= PI {
        return false;
    }
    if y < 1e-8 {
        return w.re >= -1.0 - 1e-6;
    }
    w.re >= -y / y.tan() - 1e-6 * (1.0 + w.norm())
}

/// Newton on w + ln w = l, started from the large-|l| asymptote.
fn omega_log_newton(l: Complex64) -> Result<Complex64> {
    let mut w = l - l.ln();
    for _ in 0..MAX_ITER {
        let g = w + w.ln() - l;
        let step = g * w / (w + 1.0);
        w -= step;
        if step.norm() <= 4.0 * f64::EPSILON * (1.0 + w.norm()) {
            return Ok(w);
        }
    }
    Err(Error::NoConvergence(format!("omega({l}) did not converge")))
}

/// Wright omega: the solution of w + ln w = l, equal to W_0(e^l) for |Im l| <= pi.
pub fn wright_omega(l: Complex64) -> Result<Complex64> {
    if !(l.im > -PI && l.im <= PI) {
        return Err(Error::BranchCut(format!("wright_omega needs Im l in (-pi, pi], got {l}")));
    }
    if l.re > 20.0 {
        return omega_log_newton(l);
    }
    if l.re < -700.0 {
        return Ok(l.exp());
    }
    lambert_w_with(WBranch::Principal, l.exp(), CutPolicy::FromAbove)
}

/// W_0(e^l) continued analytically in l, as needed along the deformed contour.
///
/// Inside |Im l| <= pi this is the Wright omega function. Outside that band the
/// continuation is only free of the branch point while |e^l| < 1/e.
pub fn w_of_exp(l: Complex64) -> Result<Complex64> {
    if l.im.abs() <= PI && l.im != -PI {
        return wright_omega(l);
    }
    if l.re < -1.0 {
        if l.re < -700.0 {
            return Ok(l.exp());
        }
        return w0_complex(l.exp());
    }
    Err(Error::BranchCut(format!(
        "continuation of W_0(e^l) reaches the branch point region at l = {l}"
    )))
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

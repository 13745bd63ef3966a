//! Concurrence, mutual information and the signalling estimator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::detector::{combine, pair_state, DetectorLabel, PairState, Scenario};
use crate::quadrature::{strip_double_integral, Estimate, InnerLimit, Strip};
use crate::wightman::{strip_height_limit, PairKernel};
use crate::{Error, Result};

/// Relative slack allowed on the local terms before they count as negative.
const LOCAL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub concurrence: f64,
    pub mutual_information: f64,
    pub l_plus: f64,
    pub l_minus: f64,
    pub estimator: f64,
}

fn local_terms(p: &PairState) -> Result<(f64, f64)> {
    let (a, b) = (p.l_aa.re, p.l_bb.re);
    let scale = a.abs().max(b.abs());
    if a < -LOCAL_SLACK * scale || b < -LOCAL_SLACK * scale || !(a.is_finite() && b.is_finite()) {
        return Err(Error::NegativeLocal(format!("L_AA = {a}, L_BB = {b}")));
    }
    Ok((a.max(0.0), b.max(0.0)))
}

pub fn concurrence(p: &PairState) -> Result<f64> {
    let (a, b) = local_terms(p)?;
    Ok(2.0 * (p.m_nonlocal.norm() - (a * b).sqrt()).max(0.0))
}

/// Eigenvalues of the local 2x2 block, larger first.
pub fn l_plus_minus(p: &PairState) -> Result<(f64, f64)> {
    let (a, b) = local_terms(p)?;
    let c = p.l_ab.norm();
    let root = ((a - b) * (a - b) + 4.0 * c * c).sqrt();
    let plus = 0.5 * (a + b + root);
    // a b - c^2 over plus avoids cancelling a + b against the root
    let minus = if plus > 0.0 { (a * b - c * c) / plus } else { 0.0 };
    Ok((plus, minus))
}

fn xlogx(x: f64, scale: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(x * x.ln())
    } else if x >= -LOCAL_SLACK * scale {
        Ok(0.0)
    } else {
        Err(Error::Domain(format!("entropy term of negative eigenvalue {x}")))
    }
}

pub fn mutual_information(p: &PairState) -> Result<f64> {
    let (a, b) = local_terms(p)?;
    let (plus, minus) = l_plus_minus(p)?;
    let scale = a.max(b);
    let i = xlogx(plus, scale)? + xlogx(minus, scale)? - xlogx(a, scale)? - xlogx(b, scale)?;
    if i < 0.0 {
        if -i > 1e-14 {
            return Err(Error::Domain(format!("mutual information came out negative: {i:e}")));
        }
        log::debug!("clamped mutual information {i:e} to zero");
        return Ok(0.0);
    }
    Ok(i)
}

/// -(lambda_A lambda_B / 2) Im of the commutator integrated over both supports.
///
/// The two orderings A(x_A, x_B) and A(x_B, x_A) are distributions with opposite pole
/// prescriptions, so each is integrated with its own second argument lifted into the
/// upper half-plane.
pub fn signalling_estimator(s: &Scenario) -> Result<Estimate> {
    s.validate()?;
    let (a, b) = (DetectorLabel::A, DetectorLabel::B);
    let i1 = ordering_integral(s, a, b);
    let i2 = ordering_integral(s, b, a);
    let pref = -0.5 * s.det_a.coupling * s.det_b.coupling * s.switching.normalization();
    let (d, flagged) = match combine(i1, i2.map(|e| e.scale(Complex64::new(-1.0, 0.0))), 1.0) {
        Ok(e) => (e, false),
        Err(Error::ToleranceNotMet { value, error }) => (Estimate::new(value, error), true),
        Err(e) => return Err(e),
    };
    let out = Estimate::new(Complex64::new(pref * d.value.im, 0.0), pref.abs() * d.error);
    if flagged {
        return Err(Error::ToleranceNotMet { value: out.value, error: out.error });
    }
    Ok(out)
}

fn ordering_integral(s: &Scenario, i: DetectorLabel, j: DetectorLabel) -> Result<Estimate> {
    let kern = PairKernel::new(s.vacuum, s.detector(i), s.detector(j), s.mass(), &s.kernel)?;
    let (pi, pj) = (s.switching.peak(s.detector(i)), s.switching.peak(s.detector(j)));
    let sw = s.switching;
    let limit = strip_height_limit(s.vacuum, s.detector(j), s.mass(), s.support(j).lo);
    let strip = Strip { height: s.contour.resolve(limit, sw.sigma, 0.0)?, inner_upper: InnerLimit::Full };
    let f = |tau: f64, taup: Complex64| -> Result<Complex64> {
        let t = Complex64::new(tau, 0.0);
        Ok(sw.window(t, pi) * sw.window(taup, pj) * kern.eval(t, taup)?)
    };
    strip_double_integral(f, s.support(i), s.support(j), &strip, &s.quad)
}

/// Everything derived from one scenario; tolerance misses are folded into the values.
pub fn correlation_report(s: &Scenario) -> Result<CorrelationReport> {
    let p = pair_state(s)?;
    let (l_plus, l_minus) = l_plus_minus(&p.state)?;
    let estimator = match signalling_estimator(s) {
        Ok(e) => e.value.re,
        Err(Error::ToleranceNotMet { value, .. }) => value.re,
        Err(e) => return Err(e),
    };
    Ok(CorrelationReport {
        concurrence: concurrence(&p.state)?,
        mutual_information: mutual_information(&p.state)?,
        l_plus,
        l_minus,
        estimator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn state(aa: f64, bb: f64, ab: f64, m: f64) -> PairState {
        let c = |x| Complex64::new(x, 0.0);
        PairState { l_aa: c(aa), l_bb: c(bb), l_ab: c(ab), m_nonlocal: c(m) }
    }

    #[test]
    fn concurrence_algebra() {
        assert_eq!(concurrence(&state(0.3, 0.2, 0.1, 0.0)).unwrap(), 0.0);
        let s = 0.01;
        assert_relative_eq!(concurrence(&state(s, s, 0.0, 2.0 * s)).unwrap(), 2.0 * s, max_relative = 1e-14);
        assert_relative_eq!(concurrence(&state(s * s, s * s, 0.0, 2.0 * s)).unwrap(), 2.0 * (2.0 * s - s * s), max_relative = 1e-14);
        assert!(concurrence(&state(-1e-3, 0.1, 0.0, 0.5)).is_err());
    }

    #[test]
    fn mutual_information_algebra() {
        assert_eq!(mutual_information(&state(0.02, 0.01, 0.0, 0.0)).unwrap(), 0.0);
        let s = 0.03;
        let i = mutual_information(&state(s, s, s, 0.0)).unwrap();
        assert_relative_eq!(i, 2.0 * s * 2f64.ln(), max_relative = 1e-12);
        let (p, m) = l_plus_minus(&state(s, s, s, 0.0)).unwrap();
        assert_relative_eq!(p, 2.0 * s, max_relative = 1e-14);
        assert!(m.abs() < 1e-17);
    }

    #[test]
    fn eigenvalues_are_ordered() {
        let (p, m) = l_plus_minus(&state(0.04, 0.01, 0.015, 0.0)).unwrap();
        assert!(p >= m && m >= 0.0);
        assert_relative_eq!(p + m, 0.05, max_relative = 1e-14);
        assert_relative_eq!(p * m, 0.04 * 0.01 - 0.015 * 0.015, max_relative = 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn measures_are_non_negative(a in 1e-8f64..0.5, b in 1e-8f64..0.5, t in 0.0f64..1.0, phase in -3.1f64..3.1, m in 0.0f64..0.5) {
            // |L_AB|^2 <= L_AA L_BB keeps the local block positive
            let ab = Complex64::from_polar(t * (a * b).sqrt(), phase);
            let p = PairState { l_aa: Complex64::new(a, 0.0), l_bb: Complex64::new(b, 0.0), l_ab: ab, m_nonlocal: Complex64::new(m, 0.0) };
            let i = mutual_information(&p).unwrap();
            proptest::prop_assert!(i >= 0.0);
            let c = concurrence(&p).unwrap();
            proptest::prop_assert!(c >= 0.0);
            proptest::prop_assert_eq!(c == 0.0, m <= (a * b).sqrt());
            let (plus, minus) = l_plus_minus(&p).unwrap();
            proptest::prop_assert!(plus >= minus && minus >= -1e-15 * plus);
        }
    }
}

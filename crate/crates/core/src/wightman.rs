//! Derivative-coupling two-point kernels pulled back to static worldlines.
//!
//! Kruskal and Vaidya terms are evaluated through `sinh` of differences of
//! (log-)null coordinates, so nothing over- or underflows when `U` is
//! exponentially small near the horizon.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::{StaticDetector, Worldline};
use crate::special::w_of_exp;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VacuumKind {
    Boulware,
    Unruh,
    Hhi,
    Vaidya,
    Minkowski,
    ThermalFlat,
}

impl VacuumKind {
    pub const BLACK_HOLE: [VacuumKind; 4] =
        [VacuumKind::Boulware, VacuumKind::Unruh, VacuumKind::Hhi, VacuumKind::Vaidya];

    pub fn name(self) -> &'static str {
        match self {
            VacuumKind::Boulware => "boulware",
            VacuumKind::Unruh => "unruh",
            VacuumKind::Hhi => "hhi",
            VacuumKind::Vaidya => "vaidya",
            VacuumKind::Minkowski => "minkowski",
            VacuumKind::ThermalFlat => "thermal_flat",
        }
    }

    /// Flat reference kernels ignore the metric function.
    pub fn is_flat(self) -> bool {
        matches!(self, VacuumKind::Minkowski | VacuumKind::ThermalFlat)
    }

    pub fn is_stationary(self) -> bool {
        self != VacuumKind::Vaidya
    }
}

impl fmt::Display for VacuumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VacuumKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "boulware" => VacuumKind::Boulware,
            "unruh" => VacuumKind::Unruh,
            "hhi" | "hartle_hawking" | "hartle-hawking" => VacuumKind::Hhi,
            "vaidya" => VacuumKind::Vaidya,
            "minkowski" => VacuumKind::Minkowski,
            "thermal_flat" | "thermal-flat" | "thermal" => VacuumKind::ThermalFlat,
            other => return Err(Error::InvalidScenario(format!("unknown vacuum '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelOptions {
    /// Keep the mixed (ubar, v') and (v, ubar') terms of the collapse kernel.
    pub vaidya_cross_terms: bool,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions { vaidya_cross_terms: true }
    }
}

const PREFACTOR: f64 = -1.0 / (4.0 * PI);

#[inline]
fn inv_sq(z: Complex64, name: &'static str) -> Result<Complex64> {
    if z.norm() < 1e-300 {
        return Err(Error::Pole(name));
    }
    Ok((z * z).inv())
}

/// 1/sinh(z)^2 without overflow for large |Re z|.
#[inline]
fn inv_sinh_sq(z: Complex64, name: &'static str) -> Result<Complex64> {
    if z.re > 20.0 {
        let q = (-2.0 * z).exp();
        return Ok(4.0 * q / ((1.0 - q) * (1.0 - q)));
    }
    if z.re < -20.0 {
        let q = (2.0 * z).exp();
        return Ok(4.0 * q / ((1.0 - q) * (1.0 - q)));
    }
    let s = z.sinh();
    if s.norm() < 1e-300 {
        return Err(Error::Pole(name));
    }
    Ok((s * s).inv())
}

/// Collapse-state data for one event: W = W0(-U/e) and log W.
#[derive(Clone, Copy)]
struct Collapse {
    w: Complex64,
    log_w: Complex64,
}

impl Collapse {
    fn at(u: Complex64, m: f64) -> Result<Self> {
        let l = -u / (4.0 * m) - 1.0;
        let w = w_of_exp(l)?;
        let log_w = if w.norm() > 1.0 { w.ln() } else { l - w };
        Ok(Collapse { w, log_w })
    }
}

/// Kernel for a fixed detector pair, reusable across many time arguments.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PairKernel {
    vacuum: VacuumKind,
    wi: Worldline,
    wj: Worldline,
    m: f64,
    cross: bool,
}

impl PairKernel {
    pub fn new(
        vacuum: VacuumKind,
        di: &StaticDetector,
        dj: &StaticDetector,
        m: f64,
        opts: &KernelOptions,
    ) -> Result<Self> {
        let needs_mass = !matches!(vacuum, VacuumKind::Minkowski);
        if needs_mass && !(m > 0.0) {
            return Err(Error::Domain(format!("the {vacuum} kernel needs M > 0")));
        }
        let (wi, wj) = if vacuum.is_flat() {
            (Worldline::new(di.radius, 0.0)?, Worldline::new(dj.radius, 0.0)?)
        } else {
            (Worldline::new(di.radius, m)?, Worldline::new(dj.radius, m)?)
        };
        Ok(PairKernel { vacuum, wi, wj, m, cross: opts.vaidya_cross_terms })
    }

    pub fn eval(&self, tau: Complex64, taup: Complex64) -> Result<Complex64> {
        let (wi, wj) = (&self.wi, &self.wj);
        let a = wi.rate * wj.rate;
        let du = wi.u(tau) - wj.u(taup);
        let dv = wi.v(tau) - wj.v(taup);
        let name = self.vacuum.name();
        let k8 = 1.0 / (8.0 * self.m);
        let thermal = a / (64.0 * self.m * self.m);
        let sum = match self.vacuum {
            VacuumKind::Boulware | VacuumKind::Minkowski => {
                a * (inv_sq(du, name)? + inv_sq(dv, name)?)
            }
            VacuumKind::Unruh => thermal * inv_sinh_sq(du * k8, name)? + a * inv_sq(dv, name)?,
            VacuumKind::Hhi | VacuumKind::ThermalFlat => {
                thermal * (inv_sinh_sq(du * k8, name)? + inv_sinh_sq(dv * k8, name)?)
            }
            VacuumKind::Vaidya => self.vaidya(tau, taup, dv)?,
        };
        Ok(PREFACTOR * sum)
    }

    fn vaidya(&self, tau: Complex64, taup: Complex64, dv: Complex64) -> Result<Complex64> {
        let (wi, wj, m) = (&self.wi, &self.wj, self.m);
        let name = "vaidya";
        let a = wi.rate * wj.rate;
        let ci = Collapse::at(wi.u(tau), m)?;
        let cj = Collapse::at(wj.u(taup), m)?;
        let (opi, opj) = (1.0 + ci.w, 1.0 + cj.w);
        let uu = a / (64.0 * m * m) / (opi * opj)
            * inv_sinh_sq(0.5 * (ci.log_w - cj.log_w), name)?;
        let mut sum = uu + a * inv_sq(dv, name)?;
        if self.cross {
            let ubar_i = -4.0 * m * opi;
            let ubar_j = -4.0 * m * opj;
            let dubar_i = wi.rate * ci.w / opi;
            let dubar_j = wj.rate * cj.w / opj;
            sum -= dubar_i * wj.rate * inv_sq(ubar_i - wj.v(taup), name)?;
            sum -= wi.rate * dubar_j * inv_sq(wi.v(tau) - ubar_j, name)?;
        }
        Ok(sum)
    }
}

pub fn kernel(
    vacuum: VacuumKind,
    di: &StaticDetector,
    tau: Complex64,
    dj: &StaticDetector,
    taup: Complex64,
    m: f64,
    opts: &KernelOptions,
) -> Result<Complex64> {
    PairKernel::new(vacuum, di, dj, m, opts)?.eval(tau, taup)
}

/// Pointwise antisymmetrisation. Every kernel here is a symmetric analytic function
/// of its two events, so this vanishes away from the real-axis singularities; the
/// commutator only appears once the two orderings are integrated with their own
/// pole prescriptions.
pub fn commutator_kernel(
    vacuum: VacuumKind,
    di: &StaticDetector,
    tau: Complex64,
    dj: &StaticDetector,
    taup: Complex64,
    m: f64,
    opts: &KernelOptions,
) -> Result<Complex64> {
    Ok(kernel(vacuum, di, tau, dj, taup, m, opts)? - kernel(vacuum, dj, taup, di, tau, m, opts)?)
}

/// Largest imaginary shift of the second (inner) time that stays clear of
/// complex singularities, for an inner detector whose support starts at `lower`.
///
/// Thermal kernels have image poles at Im tau' = 8 pi M sqrt(f) k. The collapse kernel
/// additionally meets the branch point of W once Im tau' = 4 pi M sqrt(f) on the part of
/// the support where u' < 0.
pub fn strip_height_limit(vacuum: VacuumKind, inner: &StaticDetector, m: f64, lower: f64) -> f64 {
    match vacuum {
        VacuumKind::Boulware | VacuumKind::Minkowski => f64::INFINITY,
        VacuumKind::ThermalFlat => 8.0 * PI * m,
        VacuumKind::Unruh | VacuumKind::Hhi | VacuumKind::Vaidya => {
            let wl = match Worldline::new(inner.radius, m) {
                Ok(w) => w,
                Err(_) => return 0.0,
            };
            let thermal = 8.0 * PI * m * wl.sqrt_f;
            if vacuum == VacuumKind::Vaidya && wl.u(Complex64::new(lower, 0.0)).re < 0.0 {
                0.5 * thermal
            } else {
                thermal
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{metric_f, pullback, radius_from_proper_distance};
    use approx::assert_relative_eq;

    const M: f64 = 0.5;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn det(r: f64) -> StaticDetector {
        StaticDetector::new(r, 2.0, 12.0)
    }

    fn k(v: VacuumKind, di: &StaticDetector, t: Complex64, dj: &StaticDetector, tp: Complex64) -> Complex64 {
        kernel(v, di, t, dj, tp, M, &KernelOptions::default()).unwrap()
    }

    /// Textbook forms straight from the pulled-back null coordinates.
    fn direct(v: VacuumKind, di: &StaticDetector, t: Complex64, dj: &StaticDetector, tp: Complex64) -> Complex64 {
        let x = pullback(di, t, M).unwrap();
        let y = pullback(dj, tp, M).unwrap();
        let q = |a: Complex64, da: Complex64, b: Complex64, db: Complex64| da * db / ((a - b) * (a - b));
        let s = match v {
            VacuumKind::Boulware => q(x.u, x.du, y.u, y.du) + q(x.v, x.dv, y.v, y.dv),
            VacuumKind::Unruh => q(x.big_u, x.dbig_u, y.big_u, y.dbig_u) + q(x.v, x.dv, y.v, y.dv),
            VacuumKind::Hhi => q(x.big_u, x.dbig_u, y.big_u, y.dbig_u) + q(x.big_v, x.dbig_v, y.big_v, y.dbig_v),
            VacuumKind::Vaidya => {
                q(x.ubar, x.dubar, y.ubar, y.dubar) + q(x.v, x.dv, y.v, y.dv)
                    - q(x.ubar, x.dubar, y.v, y.dv)
                    - q(x.v, x.dv, y.ubar, y.dubar)
            }
            _ => unreachable!(),
        };
        -s / (4.0 * PI)
    }

    #[test]
    fn stable_forms_match_direct_coordinates() {
        let (a, b) = (det(1.3), det(2.9));
        for v in VacuumKind::BLACK_HOLE {
            for &(t, tp) in &[(0.3, c(1.1, 0.4)), (-2.0, c(0.5, 0.9)), (1.0, c(-1.0, 0.2))] {
                let t = c(t, 0.0);
                let got = k(v, &a, t, &b, tp);
                let want = direct(v, &a, t, &b, tp);
                assert!((got - want).norm() <= 1e-10 * want.norm(), "{v}: {got} {want}");
            }
        }
    }

    #[test]
    fn boulware_tends_to_minkowski_far_away() {
        let (a, b) = (det(1e9), det(1e9 + 2.0));
        for &(t, tp) in &[(0.0, c(0.3, 0.5)), (0.7, c(-0.4, 1.0))] {
            let t = c(t, 0.0);
            let bw = k(VacuumKind::Boulware, &a, t, &b, tp);
            let mk = k(VacuumKind::Minkowski, &a, t, &b, tp);
            assert!((bw - mk).norm() <= 1e-6 * mk.norm());
        }
    }

    #[test]
    fn minkowski_closed_form() {
        let (a, b) = (det(3.0), det(5.5));
        let (t, tp) = (c(0.4, 0.0), c(1.2, 0.7));
        let dx = 3.0 - 5.5;
        let dt = t - tp;
        let want = -(1.0 / ((dx - dt) * (dx - dt)) + 1.0 / ((dx + dt) * (dx + dt))) / (4.0 * PI);
        let got = k(VacuumKind::Minkowski, &a, t, &b, tp);
        assert!((got - want).norm() < 1e-14 * want.norm());
    }

    #[test]
    fn thermal_flat_closed_form() {
        let (a, b) = (det(3.0), det(5.5));
        let (t, tp) = (c(0.4, 0.0), c(1.2, 0.7));
        let (dx, dt) = (c(3.0 - 5.5, 0.0), t - tp);
        let csch2 = |z: Complex64| (z.sinh() * z.sinh()).inv();
        let want = -(csch2((dx - dt) / (8.0 * M)) + csch2((dx + dt) / (8.0 * M)))
            / (64.0 * M * M * 4.0 * PI);
        let got = k(VacuumKind::ThermalFlat, &a, t, &b, tp);
        assert!((got - want).norm() < 1e-13 * want.norm());
    }

    #[test]
    fn unruh_is_invariant_under_affine_rescaling_of_u() {
        // Replacing U by -4M U + c leaves the ratio of squares unchanged.
        let (a, b) = (det(1.4), det(2.2));
        let (t, tp) = (c(0.2, 0.0), c(0.9, 0.3));
        let x = pullback(&a, t, M).unwrap();
        let y = pullback(&b, tp, M).unwrap();
        let s = -4.0 * M;
        let shifted = (s * x.dbig_u) * (s * y.dbig_u)
            / ((s * x.big_u + 3.0 - s * y.big_u - 3.0) * (s * x.big_u - s * y.big_u));
        let plain = x.dbig_u * y.dbig_u / ((x.big_u - y.big_u) * (x.big_u - y.big_u));
        assert!((shifted - plain).norm() < 1e-12 * plain.norm());
    }

    #[test]
    fn collapse_kernel_reduces_to_unruh_near_horizon() {
        // late-time events: -U tiny, W ~ 0
        let a = det(radius_from_proper_distance(0.1, 2.0 * M, M).unwrap());
        let b = det(radius_from_proper_distance(0.3, 2.0 * M, M).unwrap());
        let opts = KernelOptions { vaidya_cross_terms: false };
        for &(t, tp) in &[(10.0, c(10.4, 0.01)), (12.0, c(11.0, 0.02))] {
            let t = c(t, 0.0);
            let x = pullback(&a, t, M).unwrap();
            assert!(x.big_u.norm() < 1e-3);
            let vd = kernel(VacuumKind::Vaidya, &a, t, &b, tp, M, &opts).unwrap();
            let un = k(VacuumKind::Unruh, &a, t, &b, tp);
            assert!((vd - un).norm() <= 1e-2 * un.norm());
        }
    }

    #[test]
    fn hhi_tends_to_boulware_for_large_mass() {
        let m = 50.0;
        let opts = KernelOptions::default();
        let a = StaticDetector::new(4.0 * m, 2.0, 0.0);
        let b = StaticDetector::new(radius_from_proper_distance(2.0, a.radius, m).unwrap(), 2.0, 0.0);
        for &(t, tp) in &[(0.0, c(0.5, 0.5)), (1.0, c(-0.5, 1.0)), (0.2, c(0.3, 0.2))] {
            let t = c(t, 0.0);
            let h = kernel(VacuumKind::Hhi, &a, t, &b, tp, m, &opts).unwrap();
            let bw = kernel(VacuumKind::Boulware, &a, t, &b, tp, m, &opts).unwrap();
            assert!((h - bw).norm() <= 1e-2 * bw.norm(), "{h} {bw}");
        }
    }

    #[test]
    fn conjugation_property() {
        let (a, b) = (det(1.2), det(2.6));
        for v in [VacuumKind::Boulware, VacuumKind::Unruh, VacuumKind::Hhi, VacuumKind::Vaidya, VacuumKind::Minkowski] {
            let (t, tp) = (c(11.0, 0.0), c(12.5, 0.3));
            let lhs = k(v, &a, t, &b, tp).conj();
            let rhs = k(v, &b, tp.conj(), &a, t);
            assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm(), "{v}");
        }
    }

    #[test]
    fn stationary_vacua_are_shift_invariant() {
        let a = det(1.15);
        for v in [VacuumKind::Boulware, VacuumKind::Unruh, VacuumKind::Hhi] {
            let (t, tp) = (c(11.0, 0.0), c(12.0, 0.3));
            let s = 5.0;
            let k0 = k(v, &a, t, &a, tp);
            let k1 = k(v, &a, t + s, &a, tp + s);
            assert!((k0 - k1).norm() <= 1e-10 * k0.norm(), "{v}");
        }
    }

    #[test]
    fn collapse_kernel_is_not_stationary() {
        // early events (u < 0) one sigma outside the horizon
        let a = det(radius_from_proper_distance(1.0, 2.0 * M, M).unwrap());
        let (t, tp) = (c(0.5, 0.0), c(1.0, 0.01));
        let k0 = k(VacuumKind::Vaidya, &a, t, &a, tp);
        let k1 = k(VacuumKind::Vaidya, &a, t + 5.0, &a, tp + 5.0);
        assert!((k0 - k1).norm() > 1e-6);
    }

    #[test]
    fn commutator_vanishes_pointwise() {
        let a = det(1.3);
        let t = c(0.4, 0.0);
        for v in VacuumKind::BLACK_HOLE {
            let z = commutator_kernel(v, &a, t, &a, c(0.4, 0.7), M, &KernelOptions::default()).unwrap();
            assert!(z.norm() < 1e-12);
        }
    }

    #[test]
    fn pole_is_reported() {
        let a = det(3.0);
        let t = c(0.5, 0.0);
        let e = kernel(VacuumKind::Boulware, &a, t, &a, t, M, &KernelOptions::default());
        assert_eq!(e, Err(Error::Pole("boulware")));
    }

    #[test]
    fn strip_limits() {
        let a = det(1.1);
        let th = 8.0 * PI * M * metric_f(1.1, M).sqrt();
        assert_eq!(strip_height_limit(VacuumKind::Boulware, &a, M, 7.0), f64::INFINITY);
        assert_relative_eq!(strip_height_limit(VacuumKind::Unruh, &a, M, 7.0), th);
        // late support vs one that starts before u = 0
        assert_relative_eq!(strip_height_limit(VacuumKind::Vaidya, &a, M, 7.0), th);
        assert_relative_eq!(strip_height_limit(VacuumKind::Vaidya, &a, M, -7.0), 0.5 * th);
    }

    #[test]
    fn thermal_image_pole_sits_at_the_limit() {
        let a = det(1.1);
        let h = strip_height_limit(VacuumKind::Hhi, &a, M, 0.0);
        let t = c(3.0, 0.0);
        let near = k(VacuumKind::Hhi, &a, t, &a, t + c(0.0, h * (1.0 - 1e-7)));
        assert!(near.norm() > 1e10);
    }
}

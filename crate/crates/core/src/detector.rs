//! Density-matrix ingredients for a pair of static detectors.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::{metric_f, redshift_gamma, shell_admissible, SpacetimeParams, StaticDetector};
use crate::quadrature::{strip_double_integral, Estimate, InnerLimit, Interval, QuadratureConfig, Strip};
use crate::wightman::{strip_height_limit, KernelOptions, PairKernel, VacuumKind};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DetectorLabel {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchingKind {
    /// exp(-(tau - tau0)^2 / sigma^2)
    MainBody,
    /// exp(-tau^2 / (2 sigma^2)) with the kernel scaled by 1/(2 pi), so that the flat
    /// single-detector integrand carries the prefactor -1/(4 pi^2).
    Appendix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Switching {
    pub kind: SwitchingKind,
    pub sigma: f64,
}

impl Switching {
    pub fn main_body(sigma: f64) -> Self {
        Switching { kind: SwitchingKind::MainBody, sigma }
    }

    pub fn appendix(sigma: f64) -> Self {
        Switching { kind: SwitchingKind::Appendix, sigma }
    }

    pub fn peak(&self, det: &StaticDetector) -> f64 {
        match self.kind {
            SwitchingKind::MainBody => det.tau0,
            SwitchingKind::Appendix => 0.0,
        }
    }

    #[inline]
    pub fn window(&self, tau: Complex64, peak: f64) -> Complex64 {
        let x = (tau - peak) / self.sigma;
        match self.kind {
            SwitchingKind::MainBody => (-x * x).exp(),
            SwitchingKind::Appendix => (-0.5 * x * x).exp(),
        }
    }

    pub fn normalization(&self) -> f64 {
        match self.kind {
            SwitchingKind::MainBody => 1.0,
            SwitchingKind::Appendix => 1.0 / (2.0 * PI),
        }
    }
}

/// Strip height in units of sigma.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StripHeight {
    /// Use exactly this height; refuse if it reaches a complex singularity.
    Fixed(f64),
    /// `min(max, fraction * limit, PHASE_GROWTH_CAP / |Omega|)`, where `limit` is the singularity-free height.
    Auto { max: f64, fraction: f64 },
}

impl Default for StripHeight {
    fn default() -> Self {
        StripHeight::Auto { max: 1.0, fraction: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub b: f64,
    pub height: StripHeight,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec { b: 5.0, height: StripHeight::default() }
    }
}

/// Automatic heights keep |Omega| h below this, so the inner phase factor
/// e^{|Omega| h} cannot swamp the result.
pub const PHASE_GROWTH_CAP: f64 = 2.0;

impl ContourSpec {
    /// Height for an inner argument whose phase is e^{i omega tau'}.
    pub fn resolve(&self, limit: f64, sigma: f64, omega: f64) -> Result<f64> {
        match self.height {
            StripHeight::Fixed(h) => {
                let h = h * sigma;
                if !(h > 0.0) {
                    return Err(Error::InvalidScenario(format!("strip height must be positive, got {h}")));
                }
                if h >= limit {
                    return Err(Error::Analyticity(format!(
                        "strip height {h} reaches a complex singularity at Im = {limit}"
                    )));
                }
                Ok(h)
            }
            StripHeight::Auto { max, fraction } => {
                if !(max > 0.0 && fraction > 0.0 && fraction < 1.0) {
                    return Err(Error::InvalidScenario(format!(
                        "automatic strip height needs max > 0 and 0 < fraction < 1, got {max}, {fraction}"
                    )));
                }
                let mut h = (max * sigma).min(fraction * limit);
                if omega != 0.0 {
                    h = h.min(PHASE_GROWTH_CAP / omega.abs());
                }
                Ok(h)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub spacetime: SpacetimeParams,
    pub vacuum: VacuumKind,
    pub det_a: StaticDetector,
    pub det_b: StaticDetector,
    pub switching: Switching,
    pub contour: ContourSpec,
    pub quad: QuadratureConfig,
    pub kernel: KernelOptions,
}

impl Scenario {
    pub fn detector(&self, which: DetectorLabel) -> &StaticDetector {
        match which {
            DetectorLabel::A => &self.det_a,
            DetectorLabel::B => &self.det_b,
        }
    }

    pub fn detector_mut(&mut self, which: DetectorLabel) -> &mut StaticDetector {
        match which {
            DetectorLabel::A => &mut self.det_a,
            DetectorLabel::B => &mut self.det_b,
        }
    }

    pub fn mass(&self) -> f64 {
        self.spacetime.mass
    }

    pub fn support(&self, which: DetectorLabel) -> Interval {
        let d = self.detector(which);
        Interval::centered(self.switching.peak(d), self.contour.b * self.switching.sigma)
    }

    /// Checks that do not depend on which matrix element is asked for.
    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        let m = self.mass();
        if !(self.switching.sigma > 0.0) || !(self.contour.b > 0.0) {
            return Err(Error::InvalidScenario("sigma and b must be positive".into()));
        }
        if !(m >= 0.0) {
            return Err(Error::InvalidScenario(format!("mass must be non-negative, got {m}")));
        }
        if self.det_b.radius < self.det_a.radius {
            return Err(Error::InvalidScenario(format!(
                "detector B must not be inside detector A (r_A = {}, r_B = {})",
                self.det_a.radius, self.det_b.radius
            )));
        }
        if !self.vacuum.is_flat() {
            for d in [&self.det_a, &self.det_b] {
                if !(d.radius > 2.0 * m) || !(m > 0.0) {
                    return Err(Error::Domain(format!(
                        "the {} vacuum needs M > 0 and r > 2M, got M = {m}, r = {}",
                        self.vacuum, d.radius
                    )));
                }
            }
        }
        if self.vacuum == VacuumKind::Vaidya {
            for (label, d) in [("A", &self.det_a), ("B", &self.det_b)] {
                let shifted = StaticDetector { tau0: self.switching.peak(d), ..*d };
                if !shell_admissible(&shifted, m, self.contour.b, self.switching.sigma) {
                    return Err(Error::ShellCrossing(format!(
                        "detector {label} at r = {} switches on before the shell has passed",
                        d.radius
                    )));
                }
            }
        }
        Ok(())
    }

    fn strip_height(&self, inner: DetectorLabel, omega: f64) -> Result<f64> {
        let d = self.detector(inner);
        let limit = strip_height_limit(self.vacuum, d, self.mass(), self.support(inner).lo);
        self.contour.resolve(limit, self.switching.sigma, omega)
    }

    fn kernel_for(&self, i: DetectorLabel, j: DetectorLabel) -> Result<PairKernel> {
        PairKernel::new(self.vacuum, self.detector(i), self.detector(j), self.mass(), &self.kernel)
    }

    /// Proper-time ratio tau_j / tau_i at equal coordinate time.
    fn gamma(&self, j: DetectorLabel, i: DetectorLabel) -> Result<f64> {
        if self.vacuum.is_flat() {
            return Ok(1.0);
        }
        redshift_gamma(self.detector(j).radius, self.detector(i).radius, self.mass())
    }
}

fn coupling_product(s: &Scenario, i: DetectorLabel, j: DetectorLabel) -> f64 {
    s.detector(i).coupling * s.detector(j).coupling * s.switching.normalization()
}

/// Generic switching-weighted double integral with phases e^{i(pi tau + pj tau')}.
fn weighted(
    s: &Scenario,
    i: DetectorLabel,
    j: DetectorLabel,
    phase_i: f64,
    phase_j: f64,
    inner_upper: InnerLimit,
    quad: &QuadratureConfig,
) -> Result<Estimate> {
    let kern = s.kernel_for(i, j)?;
    let pref = coupling_product(s, i, j);
    if pref == 0.0 {
        return Ok(Estimate::ZERO);
    }
    let (pi, pj) = (s.switching.peak(s.detector(i)), s.switching.peak(s.detector(j)));
    let sw = s.switching;
    let strip = Strip { height: s.strip_height(j, phase_j)?, inner_upper };
    let iu = Complex64::new(0.0, 1.0);
    let f = |tau: f64, taup: Complex64| -> Result<Complex64> {
        let t = Complex64::new(tau, 0.0);
        let w = sw.window(t, pi) * sw.window(taup, pj);
        let phase = (iu * (phase_i * tau + phase_j * taup)).exp();
        Ok(w * phase * kern.eval(t, taup)?)
    };
    let est = strip_double_integral(f, s.support(i), s.support(j), &strip, quad);
    scale_result(est, pref)
}

fn scale_result(r: Result<Estimate>, k: f64) -> Result<Estimate> {
    let k = Complex64::new(k, 0.0);
    match r {
        Ok(e) => Ok(e.scale(k)),
        Err(Error::ToleranceNotMet { value, error }) => {
            Err(Error::ToleranceNotMet { value: value * k, error: error * k.norm() })
        }
        Err(e) => Err(e),
    }
}

/// L_ij = int int chi_i chi_j e^{-i(Omega_i tau - Omega_j tau')} A(x_i(tau), x_j(tau')).
pub fn l_element(s: &Scenario, i: DetectorLabel, j: DetectorLabel) -> Result<Estimate> {
    s.validate()?;
    weighted(s, i, j, -s.detector(i).gap, s.detector(j).gap, InnerLimit::Full, &s.quad)
}

/// Non-local term, as the sum of the two time-ordered integrals.
pub fn m_element(s: &Scenario) -> Result<Estimate> {
    s.validate()?;
    if s.det_a.radius == s.det_b.radius {
        return Err(Error::InvalidScenario(
            "the ordered integrals diverge for detectors at the same radius".into(),
        ));
    }
    let (a, b) = (DetectorLabel::A, DetectorLabel::B);
    let (wa, wb) = (s.det_a.gap, s.det_b.gap);
    let t1 = weighted(s, a, b, wa, wb, InnerLimit::Scaled(s.gamma(b, a)?), &s.quad);
    // the second ordering is often tiny; hold it to the accuracy of the sum, not its own size
    let floor = match &t1 {
        Ok(e) => e.value.norm(),
        Err(Error::ToleranceNotMet { value, .. }) => value.norm(),
        Err(_) => 0.0,
    } / coupling_product(s, a, b).abs();
    let quad = QuadratureConfig { abs_tol: s.quad.abs_tol.max(s.quad.rel_tol * floor), ..s.quad };
    let t2 = weighted(s, b, a, wb, wa, InnerLimit::Scaled(s.gamma(a, b)?), &quad);
    combine(t1, t2, -1.0)
}

/// a + b scaled, keeping best estimates when either side missed its tolerance.
pub(crate) fn combine(a: Result<Estimate>, b: Result<Estimate>, k: f64) -> Result<Estimate> {
    let (ea, fa) = soften(a)?;
    let (eb, fb) = soften(b)?;
    let e = ea.add(eb).scale(Complex64::new(k, 0.0));
    if fa || fb {
        Err(Error::ToleranceNotMet { value: e.value, error: e.error })
    } else {
        Ok(e)
    }
}

/// Splits a tolerance miss into (best estimate, flagged).
pub fn soften(r: Result<Estimate>) -> Result<(Estimate, bool)> {
    match r {
        Ok(e) => Ok((e, false)),
        Err(Error::ToleranceNotMet { value, error }) => Ok((Estimate::new(value, error), true)),
        Err(e) => Err(e),
    }
}

pub fn transition_probability(s: &Scenario, which: DetectorLabel, gap: Option<f64>) -> Result<f64> {
    Ok(transition_estimate(s, which, gap)?.value.re)
}

pub fn transition_estimate(s: &Scenario, which: DetectorLabel, gap: Option<f64>) -> Result<Estimate> {
    let mut s2 = *s;
    if let Some(g) = gap {
        s2.detector_mut(which).gap = g;
    }
    l_element(&s2, which, which)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdrEstimate {
    pub ratio: f64,
    pub error: f64,
    pub excitation: Estimate,
    pub deexcitation: Estimate,
    pub flagged: bool,
}

pub fn edr_estimate(s: &Scenario, which: DetectorLabel) -> Result<EdrEstimate> {
    let gap = s.detector(which).gap;
    let (up, f1) = soften(transition_estimate(s, which, Some(gap)))?;
    let (down, f2) = soften(transition_estimate(s, which, Some(-gap)))?;
    if !(down.value.re > 1e-300) {
        return Err(Error::Underflow(format!(
            "de-excitation probability {} is too small for a ratio",
            down.value.re
        )));
    }
    let ratio = up.value.re / down.value.re;
    let error = up.error / down.value.re + ratio.abs() * down.error / down.value.re;
    Ok(EdrEstimate { ratio, error, excitation: up, deexcitation: down, flagged: f1 || f2 })
}

pub fn edr_ratio(s: &Scenario, which: DetectorLabel) -> Result<f64> {
    let e = edr_estimate(s, which)?;
    if e.flagged {
        return Err(Error::ToleranceNotMet { value: Complex64::new(e.ratio, 0.0), error: e.error });
    }
    Ok(e.ratio)
}

/// Local inverse temperature 8 pi M sqrt(f(r)).
pub fn tolman_beta(m: f64, r: f64) -> Result<f64> {
    if !(r > 2.0 * m) {
        return Err(Error::Domain(format!("Tolman temperature needs r > 2M, got r={r}, M={m}")));
    }
    Ok(8.0 * PI * m * metric_f(r, m).sqrt())
}

/// Long-time transition rates of a static detector (derivative coupling, 1+1).
pub fn longtime_rate(vacuum: VacuumKind, omega: f64, beta: f64) -> Result<f64> {
    let vac = if omega < 0.0 { -omega } else { 0.0 };
    let planck = if omega == 0.0 { 1.0 / beta } else { omega / (beta * omega).exp_m1() };
    match vacuum {
        VacuumKind::Boulware => Ok(vac),
        VacuumKind::Hhi => Ok(planck),
        VacuumKind::Unruh => Ok(0.5 * (vac + planck)),
        other => Err(Error::InvalidScenario(format!("no stationary long-time rate for the {other} vacuum"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairState {
    pub l_aa: Complex64,
    pub l_bb: Complex64,
    pub l_ab: Complex64,
    pub m_nonlocal: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PairErrors {
    pub l_aa: f64,
    pub l_bb: f64,
    pub l_ab: f64,
    pub m_nonlocal: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairReport {
    pub state: PairState,
    pub errors: PairErrors,
    /// Some integral stopped short of its tolerance; values are best estimates.
    pub flagged: bool,
}

pub fn pair_state(s: &Scenario) -> Result<PairReport> {
    use DetectorLabel::{A, B};
    let (aa, f1) = soften(l_element(s, A, A))?;
    let (bb, f2) = soften(l_element(s, B, B))?;
    let (ab, f3) = soften(l_element(s, A, B))?;
    let (m, f4) = soften(m_element(s))?;
    if aa.value.re + bb.value.re > 0.1 {
        log::warn!(
            "local terms sum to {:.3e}; leading-order perturbation theory is doubtful",
            aa.value.re + bb.value.re
        );
    }
    Ok(PairReport {
        state: PairState { l_aa: aa.value, l_bb: bb.value, l_ab: ab.value, m_nonlocal: m.value },
        errors: PairErrors { l_aa: aa.error, l_bb: bb.error, l_ab: ab.error, m_nonlocal: m.error },
        flagged: f1 || f2 || f3 || f4,
    })
}

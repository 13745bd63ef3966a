//! Built-in validation suite, one criterion per entry of [`criteria`].

use std::f64::consts::{E, PI};
use std::fmt;
use std::time::Instant;

use harvest_core::num_complex::Complex64;
use harvest_core::*;
use DetectorLabel::{A, B};

use crate::config::Config;
use crate::sweep::{run_serial, run_sweep, Sweep, Value};

const J0: f64 = 0.00708827;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Part of the criterion as stated.
    Required,
    /// A corrected or derived statement that stands in where a stated check is known to be wrong.
    Supplementary,
    /// Reported, never judged.
    Info,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: String,
    pub pass: bool,
    pub role: Role,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// Stated checks fail for a documented reason and every supplementary check passes.
    KnownDefect,
    Fail,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub id: &'static str,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub defect: Option<&'static str>,
    pub seconds: f64,
}

impl Report {
    fn new(id: &'static str, title: &'static str) -> Self {
        Report { id, title, checks: vec![], defect: None, seconds: 0.0 }
    }

    fn push(&mut self, role: Role, name: impl Into<String>, measured: f64, bound: impl Into<String>, pass: bool) {
        self.checks.push(Check { name: name.into(), measured, bound: bound.into(), pass, role });
    }

    fn require(&mut self, name: impl Into<String>, measured: f64, bound: impl Into<String>, pass: bool) {
        self.push(Role::Required, name, measured, bound, pass);
    }

    fn error(&mut self, name: impl Into<String>, e: impl fmt::Display) {
        self.push(Role::Required, format!("{}: {e}", name.into()), f64::NAN, "no error", false);
    }

    pub fn verdict(&self) -> Verdict {
        let ok = |r: Role| self.checks.iter().filter(|c| c.role == r).all(|c| c.pass);
        if ok(Role::Required) {
            Verdict::Pass
        } else if self.defect.is_some() && ok(Role::Supplementary) {
            Verdict::KnownDefect
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict() == Verdict::Pass
    }

    /// The one-line summary.
    pub fn summary(&self) -> String {
        let v = match self.verdict() {
            Verdict::Pass => "PASS".to_string(),
            Verdict::KnownDefect => format!("FAIL (known defect: {})", self.defect.unwrap_or("")),
            Verdict::Fail => "FAIL".to_string(),
        };
        format!("{} {} {} ({:.1}s)", self.id, v, self.title, self.seconds)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.summary())?;
        for c in &self.checks {
            let tag = match (c.role, c.pass) {
                (Role::Info, _) => "info",
                (_, true) => "ok",
                (_, false) => "FAIL",
            };
            let role = if c.role == Role::Supplementary { " [supplementary]" } else { "" };
            writeln!(f, "    {tag:4} {}{role}: {:.6e} (want {})", c.name, c.measured, c.bound)?;
        }
        Ok(())
    }
}

pub struct Criterion {
    pub id: &'static str,
    pub title: &'static str,
    run: fn(&mut Report),
}

impl Criterion {
    pub fn run(&self) -> Report {
        let mut r = Report::new(self.id, self.title);
        let t = Instant::now();
        (self.run)(&mut r);
        r.seconds = t.elapsed().as_secs_f64();
        r
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: "A1", title: "appendix strip integral", run: a1 },
        Criterion { id: "A2", title: "pole-local detour width", run: a2 },
        Criterion { id: "A3", title: "direct i-epsilon breakdown", run: a3 },
        Criterion { id: "A4", title: "long-switching EDR", run: a4 },
        Criterion { id: "A5", title: "Unruh and Vaidya near the horizon", run: a5 },
        Criterion { id: "A6", title: "death zones", run: a6 },
        Criterion { id: "A7", title: "Vaidya between Unruh and Boulware", run: a7 },
        Criterion { id: "A8", title: "asymptotic kernel limits", run: a8 },
        Criterion { id: "A9", title: "structural invariants", run: a9 },
    ]
}

/// Criteria whose id or title contains `filter` (case-insensitive), in order.
pub fn select(filter: Option<&str>) -> Vec<Criterion> {
    let f = filter.map(|s| s.to_lowercase());
    criteria()
        .into_iter()
        .filter(|c| match &f {
            None => true,
            Some(f) => c.id.to_lowercase() == *f || c.title.to_lowercase().contains(f.as_str()),
        })
        .collect()
}

// Near-horizon working point: Omega = 2, M = 1/2, d_AB = 2, tau0 = 12.
const M: f64 = 0.5;
const OMEGA: f64 = 2.0;
const TAU0: f64 = 12.0;

fn pair(vacuum: VacuumKind, d_a: f64, d_ab: f64, tau0: f64) -> Result<Scenario> {
    let ra = radius_from_proper_distance(d_a, 2.0 * M, M)?;
    let rb = radius_from_proper_distance(d_ab, ra, M)?;
    Ok(Scenario {
        spacetime: SpacetimeParams { mass: M },
        vacuum,
        det_a: StaticDetector::new(ra, OMEGA, tau0),
        det_b: StaticDetector::new(rb, OMEGA, tau0),
        switching: Switching::main_body(1.0),
        contour: ContourSpec::default(),
        quad: QuadratureConfig::default(),
        kernel: KernelOptions::default(),
    })
}

fn flat_appendix() -> Scenario {
    let d = StaticDetector::new(0.0, 1.0, 0.0);
    Scenario {
        spacetime: SpacetimeParams { mass: 0.0 },
        vacuum: VacuumKind::Minkowski,
        det_a: d,
        det_b: d,
        switching: Switching::appendix(1.0),
        contour: ContourSpec::default(),
        quad: QuadratureConfig::default(),
        kernel: KernelOptions::default(),
    }
}

fn appendix_integrand(tau: f64, taup: Complex64) -> Complex64 {
    let t = Complex64::new(tau, 0.0);
    let d = t - taup;
    let w = (-0.5 * (t * t + taup * taup)).exp();
    -w * (Complex64::new(0.0, -1.0) * d).exp() / (d * d) / (4.0 * PI * PI)
}

fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

fn value(r: Result<Estimate>) -> Result<Estimate> {
    soften(r).map(|(e, _)| e)
}

fn a1(r: &mut Report) {
    let t = Instant::now();
    match transition_estimate(&flat_appendix(), A, None) {
        Ok(p) => {
            let dt = t.elapsed().as_secs_f64();
            r.require("|P - J0|", (p.value.re - J0).abs(), "<= 1e-6", (p.value.re - J0).abs() <= 1e-6);
            r.require("runtime [s]", dt, "<= 10", dt <= 10.0);
        }
        Err(e) => r.error("strip integral", e),
    }
}

fn a2(r: &mut Report) {
    let iv = Interval::centered(0.0, 5.0);
    let cfg = QuadratureConfig::default();
    for (eps, role) in [(1.0, Role::Required), (0.1, Role::Required), (0.01, Role::Required), (1e-5, Role::Info)] {
        let res = pole_local_contour_integral(|t, z| Ok(appendix_integrand(t, z)), iv, iv, eps, |t| t, &cfg);
        match value(res) {
            Ok(p) => {
                let d = (p.value.re - J0).abs();
                r.push(role, format!("|J - J0| at eps = {eps:e}"), d, "<= 1e-6", d <= 1e-6);
            }
            Err(e) if role == Role::Info => r.push(role, format!("eps = {eps:e}: {e}"), f64::NAN, "-", false),
            Err(e) => r.error(format!("eps = {eps:e}"), e),
        }
    }
}

fn a3(r: &mut Report) {
    let iv = Interval::centered(0.0, 5.0);
    let rule = ProductRule::default();
    let direct = |eps: f64| {
        let f = |t: f64, tp: f64| {
            let z = Complex64::new(t - tp, -eps);
            let w = (-0.5 * (t * t + tp * tp)).exp();
            -w * Complex64::new(0.0, -(t - tp)).exp() / (z * z) / (4.0 * PI * PI)
        };
        direct_ieps_integral(f, iv, iv, &rule).re
    };
    let j2 = direct(1e-2);
    r.require("|J - 0.00704838| at eps = 1e-2", (j2 - 0.00704838).abs(), "<= 5e-5", (j2 - 0.00704838).abs() <= 5e-5);
    let j3 = direct(1e-3);
    let dev = ((j3 - J0) / J0).abs();
    r.require("relative deviation from J0 at eps = 1e-3", dev, "> 0.1", dev > 0.1);
}

fn long_switching(vacuum: VacuumKind, sigma: f64) -> Scenario {
    let d = StaticDetector::new(2.2 * M, OMEGA, 5.0 * sigma + 20.0);
    Scenario {
        spacetime: SpacetimeParams { mass: M },
        vacuum,
        det_a: d,
        det_b: d,
        switching: Switching::main_body(sigma),
        contour: ContourSpec::default(),
        quad: QuadratureConfig::default(),
        kernel: KernelOptions::default(),
    }
}

fn a4(r: &mut Report) {
    let hhi_target = (-8.0 * PI / 11f64.sqrt()).exp();
    let unruh_target = 1.0 / (2.0 * (8.0 * PI / 11f64.sqrt()).exp() - 1.0);
    let mut last = None;
    for sigma in [10.0, 20.0, 40.0] {
        let mut row = vec![];
        for v in [VacuumKind::Boulware, VacuumKind::Unruh, VacuumKind::Hhi, VacuumKind::Vaidya] {
            match edr_estimate(&long_switching(v, sigma), A) {
                Ok(e) => {
                    r.push(Role::Info, format!("{v} EDR at sigma = {sigma}"), e.ratio, "-", true);
                    row.push(e);
                }
                Err(e) => return r.error(format!("{v} at sigma = {sigma}"), e),
            }
        }
        last = Some(row);
    }
    let Some(e) = last else { return };
    let (bw, un, hh, va) = (e[0].ratio, e[1].ratio, e[2].ratio, e[3].ratio);
    r.require("HHI EDR / e^(-8 pi/sqrt 11) - 1", hh / hhi_target - 1.0, "|.| <= 0.05", rel(hh, hhi_target) <= 0.05);
    r.require("Unruh EDR / (2e^(8 pi/sqrt 11) - 1)^-1 - 1", un / unruh_target - 1.0, "|.| <= 0.05", rel(un, unruh_target) <= 0.05);
    let bw_hi = bw + e[0].error;
    r.require("Boulware EDR (upper bound) / Unruh EDR", bw_hi / un, "< 0.1", bw_hi < 0.1 * un);
    r.require("Vaidya EDR / Unruh EDR - 1", va / un - 1.0, "|.| <= 0.05", rel(va, un) <= 0.05);
}

fn a5(r: &mut Report) {
    for d_a in [0.1, 0.3, 0.5] {
        let run = || -> Result<(PairReport, PairReport)> {
            Ok((pair_state(&pair(VacuumKind::Unruh, d_a, 2.0, TAU0)?)?, pair_state(&pair(VacuumKind::Vaidya, d_a, 2.0, TAU0)?)?))
        };
        match run() {
            Ok((u, v)) => {
                let dl = rel(u.state.l_aa.norm(), v.state.l_aa.norm());
                let dm = rel(u.state.m_nonlocal.norm(), v.state.m_nonlocal.norm());
                r.require(format!("|L_AA| relative difference at d_A = {d_a}"), dl, "<= 0.02", dl <= 0.02);
                r.require(format!("|M| relative difference at d_A = {d_a}"), dm, "<= 0.02", dm <= 0.02);
            }
            Err(e) => r.error(format!("d_A = {d_a}"), e),
        }
    }
}

fn a6(r: &mut Report) {
    for v in VacuumKind::BLACK_HOLE {
        let run = |d_a| -> Result<PairState> { Ok(pair_state(&pair(v, d_a, 2.0, TAU0)?)?.state) };
        match (run(0.1), run(2.0)) {
            (Ok(near), Ok(far)) => {
                let (cn, cf) = (concurrence(&near), concurrence(&far));
                let (inear, ifar) = (mutual_information(&near), mutual_information(&far));
                match (cn, cf, inear, ifar) {
                    (Ok(cn), Ok(cf), Ok(inear), Ok(ifar)) => {
                        r.require(format!("{v} concurrence at d_A = 0.1"), cn, "= 0", cn == 0.0);
                        r.require(format!("{v} concurrence at d_A = 2"), cf, "> 0", cf > 0.0);
                        r.require(format!("{v} mutual information at d_A = 0.1"), inear, "<= 1e-6", inear <= 1e-6);
                        r.require(format!("{v} mutual information at d_A = 2"), ifar, "> 0", ifar > 0.0);
                    }
                    (a, b, c, d) => {
                        let e = [a, b, c, d].into_iter().find_map(|x| x.err()).unwrap();
                        r.error(v.to_string(), e)
                    }
                }
            }
            (Err(e), _) | (_, Err(e)) => r.error(v.to_string(), e),
        }
    }
}

/// Signed distance of `x` outside the closed interval spanned by `a` and `b`.
fn outside(x: f64, a: f64, b: f64) -> f64 {
    let (lo, hi) = (a.min(b), a.max(b));
    (lo - x).max(x - hi).max(0.0)
}

fn a7(r: &mut Report) {
    r.defect = Some("for d_A <= 6 the Vaidya values sit just past the Unruh ones, by under 0.2% of the Unruh-Boulware gap");
    let grid: Vec<f64> = (1..=10).map(|k| 2.0 * k as f64).collect();
    let mut worst = 0.0f64;
    for &d_a in &grid {
        let run = |v| -> Result<(Estimate, Estimate)> {
            let s = pair(v, d_a, 2.0, TAU0)?;
            Ok((value(l_element(&s, A, A))?, value(m_element(&s))?))
        };
        let (b, u, v) = match (run(VacuumKind::Boulware), run(VacuumKind::Unruh), run(VacuumKind::Vaidya)) {
            (Ok(b), Ok(u), Ok(v)) => (b, u, v),
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
                r.error(format!("d_A = {d_a}"), e);
                continue;
            }
        };
        let l_err = b.0.error + u.0.error + v.0.error;
        let l_out = outside(v.0.value.re, u.0.value.re, b.0.value.re);
        r.require(format!("L_AA outside [Unruh, Boulware] at d_A = {d_a}"), l_out, format!("<= {l_err:.1e}"), l_out <= l_err);
        let m_err = b.1.error + u.1.error + v.1.error;
        let m_out = outside(v.1.value.norm(), u.1.value.norm(), b.1.value.norm());
        r.require(format!("|M| outside [Unruh, Boulware] at d_A = {d_a}"), m_out, format!("<= {m_err:.1e}"), m_out <= m_err);
        // the overshoot is tiny next to the Unruh-Boulware gap
        let gap = (u.0.value.re - b.0.value.re).abs().max((u.1.value.norm() - b.1.value.norm()).abs());
        worst = worst.max(l_out.max(m_out) / gap.max(f64::MIN_POSITIVE));
    }
    r.push(Role::Supplementary, "largest overshoot relative to the Unruh-Boulware gap", worst, "<= 0.05", worst <= 0.05);
}

fn ubar(u_kruskal: f64) -> Result<f64> {
    Ok(-4.0 * M * (1.0 + lambert_w(WBranch::Principal, Complex64::new(-u_kruskal / E, 0.0))?.re))
}

fn a8(r: &mut Report) {
    r.defect = Some("u-bar tends to u + 4M ln(-u/4M) at early times and to -4M + 4MU/e at late times");
    // early times: -U large, u = -4M ln(-U)
    for neg_u in [1e3, 1e4, 1e6, 1e8] {
        let Ok(ub) = ubar(-neg_u) else { return r.error("u-bar", "lambert W failed") };
        let u = -4.0 * M * neg_u.ln();
        r.require(format!("|u-bar - u| / |u| at -U = {neg_u:e}"), rel(ub, u), "<= 0.02", rel(ub, u) <= 0.02);
        let l = neg_u.ln() - 1.0;
        let asym = -4.0 * M * (1.0 + l - l.ln() + l.ln() / l);
        let d = rel(ub, asym);
        r.push(Role::Supplementary, format!("u-bar against its log asymptote at -U = {neg_u:e}"), d, "<= 0.02", d <= 0.02);
    }
    // late times: -U small
    for neg_u in [1e-3, 1e-5, 1e-7] {
        let Ok(ub) = ubar(-neg_u) else { return r.error("u-bar", "lambert W failed") };
        let lin = 4.0 * M * neg_u;
        r.require(format!("|u-bar + 4MU| / |4MU| at -U = {neg_u:e}"), (ub - lin).abs() / lin, "<= 0.02", (ub - lin).abs() <= 0.02 * lin);
        let affine = -4.0 * M - lin / E;
        let d = (ub - affine).abs() / (lin / E);
        r.push(Role::Supplementary, format!("u-bar against -4M + 4MU/e at -U = {neg_u:e}"), d, "<= 0.02", d <= 0.02);
    }
    // the affine late-time form is invisible to the kernel, which then matches Unruh
    let opts = KernelOptions { vaidya_cross_terms: false };
    let near = |d| radius_from_proper_distance(d, 2.0 * M, M).map(|r| StaticDetector::new(r, OMEGA, TAU0));
    if let (Ok(a), Ok(b)) = (near(0.1), near(0.3)) {
        let mut worst = 0.0f64;
        for (t, tp) in [(10.0, Complex64::new(10.4, 0.01)), (12.0, Complex64::new(11.0, 0.02)), (14.0, Complex64::new(14.5, 0.3))] {
            let t = Complex64::new(t, 0.0);
            let ok = pullback(&a, t, M).map(|x| x.big_u.norm() <= 1e-3).unwrap_or(false);
            let (Ok(vd), Ok(un)) = (kernel(VacuumKind::Vaidya, &a, t, &b, tp, M, &opts), kernel(VacuumKind::Unruh, &a, t, &b, tp, M, &opts)) else {
                return r.error("late-time kernels", "evaluation failed");
            };
            worst = worst.max(if ok { (vd - un).norm() / un.norm() } else { f64::INFINITY });
        }
        r.push(Role::Supplementary, "Vaidya (no cross terms) against Unruh kernel at -U <= 1e-3", worst, "<= 1e-2", worst <= 1e-2);
    }
    // Boulware against Minkowski for a separated pair, on a small grid of times
    let bw_gap = |radius: f64| -> Result<f64> {
        let a = StaticDetector::new(radius, OMEGA, 0.0);
        let b = StaticDetector::new(radius_from_proper_distance(2.0, radius, M)?, OMEGA, 0.0);
        let mut worst = 0.0f64;
        for (t, tp) in [(0.0, Complex64::new(0.3, 0.5)), (0.7, Complex64::new(-0.4, 1.0)), (2.0, Complex64::new(0.5, 0.2))] {
            let t = Complex64::new(t, 0.0);
            let bw = kernel(VacuumKind::Boulware, &a, t, &b, tp, M, &opts)?;
            let fa = StaticDetector::new(0.0, OMEGA, 0.0);
            let fb = StaticDetector::new(2.0, OMEGA, 0.0);
            let mk = kernel(VacuumKind::Minkowski, &fa, t, &fb, tp, 0.0, &opts)?;
            worst = worst.max((bw - mk).norm() / mk.norm());
        }
        Ok(worst)
    };
    for k in [3, 4, 6] {
        match bw_gap(10f64.powi(k) * M) {
            Ok(g) => r.require(format!("Boulware vs Minkowski relative gap at r = 1e{k} M"), g, "<= 1e-4", g <= 1e-4),
            Err(e) => r.error(format!("Boulware at r = 1e{k} M"), e),
        }
    }
}

fn a9(r: &mut Report) {
    // Lambert W round trip over a polar grid
    let mut worst = 0.0f64;
    for i in 0..24 {
        for j in 0..24 {
            let rad = 10f64.powf(-4.0 + 8.0 * i as f64 / 23.0);
            let th = -PI + 1e-6 + (2.0 * PI - 2e-6) * j as f64 / 23.0;
            let z = Complex64::from_polar(rad, th);
            match lambert_w(WBranch::Principal, z) {
                Ok(w) => worst = worst.max((w * w.exp() - z).norm() / z.norm()),
                Err(e) => return r.error(format!("W({z})"), e),
            }
        }
    }
    r.require("Lambert W round trip", worst, "<= 1e-12", worst <= 1e-12);

    let mut worst = 0.0f64;
    for ri in [1.01, 1.1, 1.5, 3.0, 10.0, 1e3] {
        for rj in [1.001, 1.2, 2.0, 7.0, 1e4] {
            match (redshift_gamma(ri, rj, M), redshift_gamma(rj, ri, M)) {
                (Ok(a), Ok(b)) => worst = worst.max((a * b - 1.0).abs()),
                (Err(e), _) | (_, Err(e)) => return r.error("redshift", e),
            }
        }
    }
    r.require("gamma_BA gamma_AB - 1", worst, "<= 1e-14", worst <= 1e-14);

    let mut herm = 0.0f64;
    let mut imag = 0.0f64;
    let mut deform = 0.0f64;
    for v in VacuumKind::BLACK_HOLE {
        let Ok(mut s) = pair(v, 1.0, 2.0, TAU0) else { return r.error("scenario", "bad geometry") };
        let base = s;
        s.contour.b = 6.0;
        s.quad = QuadratureConfig { rel_tol: 1e-11, abs_tol: 1e-15, ..s.quad };
        match (value(l_element(&s, A, B)), value(l_element(&s, B, A))) {
            (Ok(ab), Ok(ba)) => herm = herm.max((ab.value - ba.value.conj()).norm() / ab.value.norm()),
            (Err(e), _) | (_, Err(e)) => return r.error(format!("{v} L_AB"), e),
        }
        for d_a in [0.1, 1.0, 4.0] {
            let Ok(s) = pair(v, d_a, 2.0, TAU0) else { return r.error("scenario", "bad geometry") };
            for i in [A, B] {
                match l_element(&s, i, i) {
                    Ok(l) => imag = imag.max(l.value.im.abs() / l.value.re.abs()),
                    Err(e) => return r.error(format!("{v} L_ii"), e),
                }
            }
        }
        let mut rows = vec![];
        for h in [0.5, 1.0, 2.0] {
            let mut s = base;
            s.contour.height = StripHeight::Fixed(h);
            match pair_state(&s) {
                Ok(p) => rows.push(p.state),
                Err(e) => return r.error(format!("{v} at h = {h}"), e),
            }
        }
        for p in &rows[1..] {
            for (x, y) in [(p.l_aa, rows[0].l_aa), (p.l_bb, rows[0].l_bb), (p.l_ab, rows[0].l_ab), (p.m_nonlocal, rows[0].m_nonlocal)] {
                deform = deform.max((x - y).norm() / y.norm());
            }
        }
    }
    r.require("L_BA - conj(L_AB), relative", herm, "<= 1e-10", herm <= 1e-10);
    r.require("|Im L_ii| / Re L_ii", imag, "<= 1e-8", imag <= 1e-8);
    let rt = QuadratureConfig::default().rel_tol;
    // a few rel_tol of slack: each of the two integrals carries its own rel_tol
    r.require("strip height spread over h in {0.5, 1, 2}, relative", deform, format!("<= {:.0e}", 10.0 * rt), deform <= 10.0 * rt);

    let p = |v, tau0| pair(v, 1.0, 2.0, tau0).and_then(|s| transition_probability(&s, A, None));
    for v in [VacuumKind::Boulware, VacuumKind::Unruh, VacuumKind::Hhi] {
        match (p(v, TAU0), p(v, TAU0 + 5.0)) {
            (Ok(a), Ok(b)) => r.require(format!("{v} change under a Killing shift, relative"), rel(a, b), "<= 1e-6", rel(a, b) <= 1e-6),
            (Err(e), _) | (_, Err(e)) => r.error(v.to_string(), e),
        }
    }
    let pv = |tau0| pair(VacuumKind::Vaidya, 2.0, 2.0, tau0).and_then(|s| transition_probability(&s, A, None));
    match (pv(5.5), pv(10.5)) {
        (Ok(a), Ok(b)) => r.require("vaidya change under a Killing shift (early switching)", (a - b).abs(), "> 1e-6", (a - b).abs() > 1e-6),
        (Err(e), _) | (_, Err(e)) => r.error("vaidya shift", e),
    }

    for d_a in [1.0, 2.0] {
        let mut vals = vec![];
        for v in VacuumKind::BLACK_HOLE {
            match pair(v, d_a, 2.0, TAU0).and_then(|s| signalling_estimator(&s)) {
                Ok(e) => vals.push(e.value.re),
                Err(e) => return r.error(format!("{v} estimator"), e),
            }
        }
        let spread = vals.iter().map(|x| rel(*x, vals[0])).fold(0.0, f64::max);
        r.require(format!("estimator spread across vacua at d_A = {d_a}"), spread, "<= 1e-8", spread <= 1e-8);
    }

    let mut lowest = f64::INFINITY;
    for v in VacuumKind::BLACK_HOLE {
        for d_a in [0.1, 0.5, 2.0, 6.0] {
            match pair(v, d_a, 2.0, TAU0).and_then(|s| pair_state(&s)).and_then(|p| mutual_information(&p.state)) {
                Ok(i) => lowest = lowest.min(i),
                Err(e) => return r.error(format!("{v} mutual information"), e),
            }
        }
    }
    r.require("smallest mutual information", lowest, ">= 0", lowest >= 0.0);

    let toml = r#"
        [scenario]
        mass = 0.5
        gap = 2.0
        tau0 = 12.0
        d_a = 1.0
        d_ab = 2.0
        [sweep]
        axis = "dA"
        grid = [0.5, 1.0, 2.0]
        vacua = ["boulware", "unruh", "hhi", "vaidya"]
        outputs = ["L_AA", "L_AB", "M_nonlocal", "concurrence", "mutual_information"]
    "#;
    let cfg = match Config::from_toml(toml) {
        Ok(c) => c,
        Err(e) => return r.error("sweep config", e),
    };
    let sweep = Sweep::from_config(&cfg).expect("sweep section present");
    let serial = run_serial(&cfg, &sweep);
    match run_sweep(&cfg, &sweep, 4) {
        Ok(par) => {
            let d = sweep_difference(&serial, &par);
            r.require("parallel against serial sweep", d, "<= 1e-12", d <= 1e-12);
        }
        Err(e) => r.error("thread pool", e),
    }
}

/// Largest absolute difference between two sweeps; infinite if their shapes differ.
pub fn sweep_difference(a: &[crate::sweep::Row], b: &[crate::sweep::Row]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut worst = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        if x.axis != y.axis || x.vacuum != y.vacuum || x.status != y.status || x.values.len() != y.values.len() {
            return f64::INFINITY;
        }
        for ((vx, ex), (vy, ey)) in x.values.iter().zip(&y.values) {
            let d = match (vx, vy) {
                (Value::Real(p), Value::Real(q)) => (p - q).abs(),
                (Value::Complex(p), Value::Complex(q)) => (p - q).norm(),
                _ => f64::INFINITY,
            };
            worst = worst.max(d).max((ex - ey).abs());
        }
    }
    worst
}

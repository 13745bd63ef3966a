//! Adaptive Gauss-Kronrod quadrature along straight segments of the complex
//! plane, and the double integrals built from it.
//!
//! The inner variable of a double integral never touches the real axis except
//! at the two ends of the contour: it climbs from the lower support edge to
//! height `h`, runs along `Im = h`, and comes back down at the upper limit.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::special::erfc;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    pub min_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { rel_tol: 1e-8, abs_tol: 1e-12, max_depth: 30, min_depth: 3 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidScenario("tolerances must be positive".into()));
        }
        if self.min_depth > self.max_depth || self.max_depth > 60 {
            return Err(Error::InvalidScenario(format!(
                "need min_depth <= max_depth <= 60, got {} and {}",
                self.min_depth, self.max_depth
            )));
        }
        Ok(())
    }

    /// Tolerances handed to inner integrals so their errors stay inside the outer budget.
    fn inner(&self) -> QuadratureConfig {
        QuadratureConfig { rel_tol: 0.1 * self.rel_tol, abs_tol: 0.1 * self.abs_tol, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate { value: Complex64 { re: 0.0, im: 0.0 }, error: 0.0 };

    pub fn new(value: Complex64, error: f64) -> Self {
        Estimate { value, error }
    }

    pub fn scale(self, s: Complex64) -> Self {
        Estimate { value: self.value * s, error: self.error * s.norm() }
    }

    pub fn add(self, other: Estimate) -> Self {
        Estimate { value: self.value + other.value, error: self.error + other.error }
    }

    pub fn within(&self, cfg: &QuadratureConfig) -> bool {
        self.error <= cfg.abs_tol.max(cfg.rel_tol * self.value.norm())
    }

    /// Ok when the error bound meets the tolerance, otherwise the best estimate
    /// travels inside the error.
    pub fn checked(self, cfg: &QuadratureConfig) -> Result<Estimate> {
        if self.within(cfg) {
            Ok(self)
        } else {
            Err(Error::ToleranceNotMet { value: self.value, error: self.error })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn centered(center: f64, half_width: f64) -> Self {
        Interval { lo: center - half_width, hi: center + half_width }
    }
}

/// Upper end of the inner integration for a given outer time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerLimit {
    /// The inner support's upper edge.
    Full,
    /// `gamma * tau`, clipped to the inner support.
    Scaled(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strip {
    pub height: f64,
    pub inner_upper: InnerLimit,
}

/// Neumaier summation for complex values.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    fn add_part(sum: &mut f64, comp: &mut f64, x: f64) {
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *comp += (*sum - t) + x;
        } else {
            *comp += (x - t) + *sum;
        }
        *sum = t;
    }

    pub fn add(&mut self, z: Complex64) {
        Self::add_part(&mut self.sum.re, &mut self.comp.re, z.re);
        Self::add_part(&mut self.sum.im, &mut self.comp.im, z.im);
    }

    pub fn total(&self) -> Complex64 {
        self.sum + self.comp
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes (10-point rule).
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const MAX_SPLITS: usize = 4000;

#[derive(Debug, Clone, Copy)]
struct Panel {
    s0: f64,
    s1: f64,
    depth: u32,
    value: Complex64,
    /// Kronrod-vs-Gauss error; the only part bisection can reduce.
    error: f64,
    /// Error carried in from the integrand itself (inner integrals).
    carried: f64,
    /// The error is the roundoff floor, so splitting cannot help.
    at_floor: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then(other.s0.total_cmp(&self.s0))
    }
}

fn gk21<F>(f: &mut F, z0: Complex64, dz: Complex64, s0: f64, s1: f64, depth: u32) -> Result<Panel>
where
    F: FnMut(Complex64) -> Result<(Complex64, f64)>,
{
    let half = 0.5 * (s1 - s0);
    let mid = 0.5 * (s0 + s1);
    let jac = dz * half;
    let mut fv = [Complex64::new(0.0, 0.0); 21];
    let mut carried = 0.0;
    let mut idx = 0;
    for k in 0..11 {
        let nodes: &[f64] = if k == 10 { &[0.0] } else { &[-1.0, 1.0] };
        for &sgn in nodes {
            let s = mid + sgn * half * XGK[k];
            let (val, err) = f(z0 + dz * s)?;
            if !(val.re.is_finite() && val.im.is_finite()) {
                return Err(Error::Analyticity(format!(
                    "non-finite integrand at {}",
                    z0 + dz * s
                )));
            }
            fv[idx] = val;
            carried += WGK[k] * err;
            idx += 1;
        }
    }
    // fv layout: pairs for k = 0..10, then the centre
    let centre = fv[20];
    let mut kron = centre * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut resabs = centre.norm() * WGK[10];
    for k in 0..10 {
        let pair = fv[2 * k] + fv[2 * k + 1];
        kron += pair * WGK[k];
        resabs += WGK[k] * (fv[2 * k].norm() + fv[2 * k + 1].norm());
        if k % 2 == 1 {
            gauss += pair * WG[k / 2];
        }
    }
    let mean = kron * 0.5;
    let mut resasc = WGK[10] * (centre - mean).norm();
    for k in 0..10 {
        resasc += WGK[k] * ((fv[2 * k] - mean).norm() + (fv[2 * k + 1] - mean).norm());
    }
    let scale = jac.norm();
    let value = kron * jac;
    let resabs = resabs * scale;
    let resasc = resasc * scale;
    let mut error = ((kron - gauss) * jac).norm();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let mut at_floor = false;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let floor = 50.0 * f64::EPSILON * resabs;
        at_floor = error <= floor;
        error = error.max(floor);
    }
    Ok(Panel { s0, s1, depth, value, error, carried: carried * scale, at_floor })
}

/// Result of one adaptive line integral.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LineResult {
    pub value: Complex64,
    pub error: f64,
}

/// Globally adaptive GK21 integral of `f` along the segment z0 -> z1.
pub(crate) fn line_integral<F>(
    mut f: F,
    z0: Complex64,
    z1: Complex64,
    rel_tol: f64,
    abs_tol: f64,
    cfg: &QuadratureConfig,
) -> Result<LineResult>
where
    F: FnMut(Complex64) -> Result<(Complex64, f64)>,
{
    let dz = z1 - z0;
    if dz.norm() == 0.0 {
        return Ok(LineResult { value: Complex64::new(0.0, 0.0), error: 0.0 });
    }
    let n0 = 1usize << cfg.min_depth.min(12);
    let mut heap = BinaryHeap::with_capacity(2 * n0);
    let mut frozen = Vec::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for i in 0..n0 {
        let p = gk21(&mut f, z0, dz, i as f64 / n0 as f64, (i + 1) as f64 / n0 as f64, cfg.min_depth)?;
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    let target = |t: Complex64| abs_tol.max(rel_tol * t.norm());
    let mut splits = 0;
    while err > target(total) && splits < MAX_SPLITS {
        let Some(p) = heap.pop() else { break };
        let mid = 0.5 * (p.s0 + p.s1);
        if p.at_floor || p.depth >= cfg.max_depth || mid <= p.s0 || mid >= p.s1 {
            frozen.push(p);
            continue;
        }
        let a = gk21(&mut f, z0, dz, p.s0, mid, p.depth + 1)?;
        let b = gk21(&mut f, z0, dz, mid, p.s1, p.depth + 1)?;
        total += a.value + b.value - p.value;
        err += a.error + b.error - p.error;
        heap.push(a);
        heap.push(b);
        splits += 1;
    }
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|a, b| a.s0.total_cmp(&b.s0));
    let mut sum = CompensatedSum::default();
    let mut err = 0.0;
    let mut carried = 0.0;
    for p in &panels {
        sum.add(p.value);
        err += p.error;
        carried += p.carried;
    }
    Ok(LineResult { value: sum.total(), error: err + carried })
}

/// Adaptive integral of a complex-valued function over a real interval.
pub fn integrate<F>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    cfg.validate()?;
    let r = line_integral(
        |z| Ok((f(z.re)?, 0.0)),
        Complex64::new(a, 0.0),
        Complex64::new(b, 0.0),
        cfg.rel_tol,
        cfg.abs_tol,
        cfg,
    )?;
    Estimate::new(r.value, r.error).checked(cfg)
}

/// Integrates `f` along a polyline. Later legs get an absolute floor set by the
/// first (dominant) leg so that negligible pieces are not over-resolved.
fn polyline<F>(f: &mut F, legs: &[(Complex64, Complex64)], cfg: &QuadratureConfig) -> Result<(Complex64, f64)>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let mut sum = CompensatedSum::default();
    let mut err = 0.0;
    let mut floor = cfg.abs_tol;
    for (i, &(z0, z1)) in legs.iter().enumerate() {
        let r = line_integral(|z| Ok((f(z)?, 0.0)), z0, z1, cfg.rel_tol, floor, cfg)?;
        if i == 0 {
            floor = floor.max(cfg.rel_tol * r.value.norm());
        }
        sum.add(r.value);
        err += r.error;
    }
    Ok((sum.total(), err))
}

/// Double integral with the inner variable on the strip contour of height `strip.height`.
///
/// `f(tau, tau')` with real outer `tau` in `outer` and complex inner `tau'` whose real
/// part ranges over `inner` (upper end possibly moving with `tau`).
pub fn strip_double_integral<F>(
    f: F,
    outer: Interval,
    inner: Interval,
    strip: &Strip,
    cfg: &QuadratureConfig,
) -> Result<Estimate>
where
    F: Fn(f64, Complex64) -> Result<Complex64>,
{
    cfg.validate()?;
    if !(strip.height >= 0.0) {
        return Err(Error::InvalidScenario(format!("strip height {} < 0", strip.height)));
    }
    let icfg = cfg.inner();
    let ih = Complex64::new(0.0, strip.height);
    let inner_fn = |tau: f64| -> Result<(Complex64, f64)> {
        let up = match strip.inner_upper {
            InnerLimit::Full => inner.hi,
            InnerLimit::Scaled(g) => (g * tau).min(inner.hi),
        };
        if up <= inner.lo {
            return Ok((Complex64::new(0.0, 0.0), 0.0));
        }
        let lo = Complex64::new(inner.lo, 0.0);
        let hi = Complex64::new(up, 0.0);
        let legs = [(lo + ih, hi + ih), (lo, lo + ih), (hi + ih, hi)];
        polyline(&mut |z| f(tau, z), &legs, &icfg)
    };
    outer_integral(inner_fn, outer, cfg)
}

fn outer_integral<G>(mut g: G, outer: Interval, cfg: &QuadratureConfig) -> Result<Estimate>
where
    G: FnMut(f64) -> Result<(Complex64, f64)>,
{
    let r = line_integral(
        |z| g(z.re),
        Complex64::new(outer.lo, 0.0),
        Complex64::new(outer.hi, 0.0),
        cfg.rel_tol,
        cfg.abs_tol,
        cfg,
    )?;
    Estimate::new(r.value, r.error).checked(cfg)
}

/// Pole-local detour: the inner contour follows the real axis except between
/// `pole(tau) - eps` and `pole(tau) + eps`, where it steps up to `Im = 1`.
pub fn pole_local_contour_integral<F, P>(
    f: F,
    outer: Interval,
    inner: Interval,
    eps: f64,
    pole: P,
    cfg: &QuadratureConfig,
) -> Result<Estimate>
where
    F: Fn(f64, Complex64) -> Result<Complex64>,
    P: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !(eps > 0.0) {
        return Err(Error::InvalidScenario(format!("detour half-width must be positive, got {eps}")));
    }
    let icfg = cfg.inner();
    let i1 = Complex64::new(0.0, 1.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    let inner_fn = |tau: f64| -> Result<(Complex64, f64)> {
        let p = pole(tau);
        let (a, b) = (p - eps, p + eps);
        let mut legs = Vec::with_capacity(5);
        if b <= inner.lo || a >= inner.hi {
            legs.push((re(inner.lo), re(inner.hi)));
        } else {
            let start = a.max(inner.lo);
            let end = b.min(inner.hi);
            legs.push((re(start) + i1, re(end) + i1));
            if start > inner.lo {
                legs.push((re(inner.lo), re(start)));
            }
            legs.push((re(start), re(start) + i1));
            legs.push((re(end) + i1, re(end)));
            if end < inner.hi {
                legs.push((re(end), re(inner.hi)));
            }
        }
        let mut sum = CompensatedSum::default();
        let mut err = 0.0;
        for &(z0, z1) in &legs {
            let r = line_integral(|z| Ok((f(tau, z)?, 0.0)), z0, z1, icfg.rel_tol, icfg.abs_tol, &icfg)?;
            sum.add(r.value);
            err += r.error;
        }
        Ok((sum.total(), err))
    };
    outer_integral(inner_fn, outer, cfg)
}

/// Fixed composite Gauss-Legendre product rule for brute-force double integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductRule {
    pub panel_width: f64,
    pub order: usize,
}

impl Default for ProductRule {
    fn default() -> Self {
        ProductRule { panel_width: 0.02, order: 20 }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn composite_nodes(iv: Interval, rule: &ProductRule) -> Vec<(f64, f64)> {
    let panels = ((iv.hi - iv.lo) / rule.panel_width).round().max(1.0) as usize;
    let width = (iv.hi - iv.lo) / panels as f64;
    let (x, w) = gauss_legendre(rule.order);
    let mut out = Vec::with_capacity(panels * rule.order);
    for p in 0..panels {
        let mid = iv.lo + (p as f64 + 0.5) * width;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((mid + 0.5 * width * xi, 0.5 * width * wi));
        }
    }
    out
}

/// Brute-force real-axis product quadrature of an integrand that carries its own
/// `i epsilon` regulator. Deliberately non-adaptive: it is a diagnostic that shows
/// how the direct approach breaks down once the regulator is narrower than the grid.
pub fn direct_ieps_integral<F>(f_eps: F, outer: Interval, inner: Interval, rule: &ProductRule) -> Complex64
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    let xo = composite_nodes(outer, rule);
    let xi = composite_nodes(inner, rule);
    let rows: Vec<Complex64> = xo
        .par_iter()
        .map(|&(t, wt)| {
            let mut s = CompensatedSum::default();
            for &(tp, wp) in &xi {
                s.add(f_eps(t, tp) * wp);
            }
            s.total() * wt
        })
        .collect();
    let mut s = CompensatedSum::default();
    for r in rows {
        s.add(r);
    }
    s.total()
}

/// Closed-form response of a derivative-coupled detector in 1+1 Minkowski space
/// with switching exp(-t^2 / 2 sigma^2).
pub fn closed_form_minkowski_response(omega: f64, sigma: f64) -> f64 {
    let x = sigma * omega;
    ((-x * x).exp() - PI.sqrt() * x * erfc(x)) / (4.0 * PI)
}

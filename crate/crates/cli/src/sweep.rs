//! Parameter sweeps and their CSV form.

use std::io::Write;

use harvest_core::num_complex::Complex64;
use harvest_core::{
    concurrence, edr_estimate, l_element, m_element, mutual_information, signalling_estimator, soften,
    DetectorLabel, Error, Estimate, PairState, Scenario, VacuumKind,
};
use rayon::prelude::*;

use crate::config::{Axis, Config, Output};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Real(f64),
    Complex(Complex64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Ok,
    /// Some integral missed its tolerance; the values are best estimates.
    Flagged,
    Failed(String),
}

impl Status {
    pub fn label(&self) -> String {
        match self {
            Status::Ok => "ok".into(),
            Status::Flagged => "flagged".into(),
            Status::Failed(msg) => format!("failed: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub axis: f64,
    pub vacuum: VacuumKind,
    pub status: Status,
    /// One entry per requested output, with its error bound; empty when the row failed.
    pub values: Vec<(Value, f64)>,
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub vacua: Vec<VacuumKind>,
    pub outputs: Vec<Output>,
}

impl Sweep {
    pub fn from_config(cfg: &Config) -> Option<Sweep> {
        let s = cfg.sweep.as_ref()?;
        Some(Sweep { axis: s.axis, grid: s.grid.clone(), vacua: s.vacua.clone(), outputs: s.outputs.clone() })
    }
}

/// Lazily computed pieces of one row.
struct RowWork {
    s: Scenario,
    flagged: bool,
    laa: Option<Estimate>,
    lbb: Option<Estimate>,
    lab: Option<Estimate>,
    m: Option<Estimate>,
}

impl RowWork {
    fn take(&mut self, r: harvest_core::Result<Estimate>) -> harvest_core::Result<Estimate> {
        let (e, f) = soften(r)?;
        self.flagged |= f;
        Ok(e)
    }

    fn l(&mut self, i: DetectorLabel, j: DetectorLabel) -> harvest_core::Result<Estimate> {
        use DetectorLabel::{A, B};
        let cached = match (i, j) {
            (A, A) => self.laa,
            (B, B) => self.lbb,
            _ => self.lab,
        };
        if let Some(e) = cached {
            return Ok(e);
        }
        let r = l_element(&self.s, i, j);
        let e = self.take(r)?;
        match (i, j) {
            (A, A) => self.laa = Some(e),
            (B, B) => self.lbb = Some(e),
            _ => self.lab = Some(e),
        }
        Ok(e)
    }

    fn m(&mut self) -> harvest_core::Result<Estimate> {
        if let Some(e) = self.m {
            return Ok(e);
        }
        let r = m_element(&self.s);
        let e = self.take(r)?;
        self.m = Some(e);
        Ok(e)
    }

    fn state(&self) -> PairState {
        let z = Complex64::new(0.0, 0.0);
        PairState {
            l_aa: self.laa.map_or(z, |e| e.value),
            l_bb: self.lbb.map_or(z, |e| e.value),
            l_ab: self.lab.map_or(z, |e| e.value),
            m_nonlocal: self.m.map_or(z, |e| e.value),
        }
    }

    fn output(&mut self, o: Output) -> harvest_core::Result<(Value, f64)> {
        use DetectorLabel::{A, B};
        let cx = |e: Estimate| (Value::Complex(e.value), e.error);
        Ok(match o {
            Output::LAA => cx(self.l(A, A)?),
            Output::LBB => cx(self.l(B, B)?),
            Output::LAB => cx(self.l(A, B)?),
            Output::MNonlocal => cx(self.m()?),
            Output::Concurrence => {
                let (a, b, m) = (self.l(A, A)?, self.l(B, B)?, self.m()?);
                let p = self.state();
                let c = concurrence(&p)?;
                let err = propagate(&p, [a.error, b.error, 0.0, m.error], |q| concurrence(q))?;
                (Value::Real(c), err)
            }
            Output::MutualInformation => {
                let (a, b, ab) = (self.l(A, A)?, self.l(B, B)?, self.l(A, B)?);
                let p = self.state();
                let i = mutual_information(&p)?;
                let err = propagate(&p, [a.error, b.error, ab.error, 0.0], |q| mutual_information(q))?;
                (Value::Real(i), err)
            }
            Output::Estimator => {
                let r = signalling_estimator(&self.s);
                let e = self.take(r)?;
                (Value::Real(e.value.re), e.error)
            }
            Output::Edr => {
                let e = edr_estimate(&self.s, A)?;
                self.flagged |= e.flagged;
                (Value::Real(e.ratio), e.error)
            }
        })
    }
}

/// First-order error of `f` from independent shifts of the state entries.
fn propagate<F>(p: &PairState, errs: [f64; 4], f: F) -> harvest_core::Result<f64>
where
    F: Fn(&PairState) -> harvest_core::Result<f64>,
{
    let base = f(p)?;
    let mut total = 0.0;
    for (k, &e) in errs.iter().enumerate() {
        if e == 0.0 {
            continue;
        }
        let mut q = *p;
        let field = match k {
            0 => &mut q.l_aa,
            1 => &mut q.l_bb,
            2 => &mut q.l_ab,
            _ => &mut q.m_nonlocal,
        };
        // move the magnitude, which is all the measures depend on
        let n = field.norm();
        *field = if n > 0.0 { *field * ((n + e) / n) } else { Complex64::new(e, 0.0) };
        total += (f(&q)? - base).abs();
    }
    Ok(total)
}

fn status_of(e: &Error) -> String {
    e.to_string()
}

pub fn run_row(cfg: &Config, sweep: &Sweep, x: f64, vacuum: VacuumKind) -> Row {
    let fail = |msg: String| Row { axis: x, vacuum, status: Status::Failed(msg), values: vec![] };
    let s = match cfg.scenario(vacuum, Some((sweep.axis, x))) {
        Ok(s) => s,
        Err(e) => return fail(status_of(&e)),
    };
    if let Err(e) = s.validate() {
        return fail(status_of(&e));
    }
    let mut work = RowWork { s, flagged: false, laa: None, lbb: None, lab: None, m: None };
    let mut values = Vec::with_capacity(sweep.outputs.len());
    for &o in &sweep.outputs {
        match work.output(o) {
            Ok(v) => values.push(v),
            Err(e) => return fail(format!("{}: {}", o.name(), status_of(&e))),
        }
    }
    let status = if work.flagged { Status::Flagged } else { Status::Ok };
    Row { axis: x, vacuum, status, values }
}

/// All rows, axis-major and vacuum-minor, on a pool of `workers` threads (0: rayon default).
pub fn run_sweep(cfg: &Config, sweep: &Sweep, workers: usize) -> Result<Vec<Row>, rayon::ThreadPoolBuildError> {
    let jobs: Vec<(f64, VacuumKind)> =
        sweep.grid.iter().flat_map(|&x| sweep.vacua.iter().map(move |&v| (x, v))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    Ok(pool.install(|| jobs.par_iter().map(|&(x, v)| run_row(cfg, sweep, x, v)).collect()))
}

pub fn run_serial(cfg: &Config, sweep: &Sweep) -> Vec<Row> {
    sweep.grid.iter().flat_map(|&x| sweep.vacua.iter().map(move |&v| run_row(cfg, sweep, x, v))).collect()
}

pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn header(outputs: &[Output]) -> Vec<String> {
    let mut h = vec!["axis".to_string(), "vacuum".into(), "status".into()];
    for o in outputs {
        if o.is_complex() {
            h.push(format!("{}_re", o.name()));
            h.push(format!("{}_im", o.name()));
        } else {
            h.push(o.name().into());
        }
    }
    for o in outputs {
        h.push(format!("err_{}", o.name()));
    }
    h
}

pub fn write_csv<W: Write>(out: W, outputs: &[Output], rows: &[Row]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(outputs))?;
    for r in rows {
        let mut rec = vec![fmt_float(r.axis), r.vacuum.name().to_string(), r.status.label()];
        let mut errs = Vec::with_capacity(outputs.len());
        for (k, o) in outputs.iter().enumerate() {
            match r.values.get(k) {
                Some((Value::Complex(z), e)) => {
                    rec.push(fmt_float(z.re));
                    rec.push(fmt_float(z.im));
                    errs.push(fmt_float(*e));
                }
                Some((Value::Real(v), e)) => {
                    rec.push(fmt_float(*v));
                    errs.push(fmt_float(*e));
                }
                None => {
                    let blanks = if o.is_complex() { 2 } else { 1 };
                    rec.extend(std::iter::repeat(String::new()).take(blanks));
                    errs.push(String::new());
                }
            }
        }
        rec.extend(errs);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

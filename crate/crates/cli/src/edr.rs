//! Excitation to de-excitation ratios over a list of switching widths.

use std::io::Write;

use harvest_core::{edr_estimate, longtime_rate, tolman_beta, DetectorLabel, Scenario, VacuumKind};
use rayon::prelude::*;

use crate::config::{Axis, Config};
use crate::sweep::{fmt_float, Status};

#[derive(Debug, Clone, PartialEq)]
pub struct EdrRow {
    pub sigma: f64,
    pub vacuum: VacuumKind,
    pub status: Status,
    pub ratio: f64,
    pub error: f64,
    pub excitation: f64,
    pub deexcitation: f64,
    /// Long-switching limit from the stationary rates, where one exists.
    pub longtime: Option<f64>,
}

/// Vacua to run: the sweep list, else the scenario vacuum, else the four black-hole vacua.
pub fn vacua(cfg: &Config) -> Vec<VacuumKind> {
    if let Some(s) = &cfg.sweep {
        return s.vacua.clone();
    }
    match cfg.scenario.vacuum {
        Some(v) => vec![v],
        None => VacuumKind::BLACK_HOLE.to_vec(),
    }
}

fn longtime(s: &Scenario) -> Option<f64> {
    let v = match s.vacuum {
        // late-time collapse radiation is the Unruh flux
        VacuumKind::Vaidya => VacuumKind::Unruh,
        v => v,
    };
    let beta = tolman_beta(s.mass(), s.det_a.radius).ok()?;
    let gap = s.det_a.gap;
    Some(longtime_rate(v, gap, beta).ok()? / longtime_rate(v, -gap, beta).ok()?)
}

pub fn edr_row(cfg: &Config, sigma: f64, vacuum: VacuumKind) -> EdrRow {
    let mut row = EdrRow {
        sigma,
        vacuum,
        status: Status::Ok,
        ratio: f64::NAN,
        error: f64::NAN,
        excitation: f64::NAN,
        deexcitation: f64::NAN,
        longtime: None,
    };
    let s = match cfg.scenario(vacuum, Some((Axis::Sigma, sigma))) {
        Ok(s) => s,
        Err(e) => {
            row.status = Status::Failed(e.to_string());
            return row;
        }
    };
    row.longtime = longtime(&s);
    match edr_estimate(&s, DetectorLabel::A) {
        Ok(e) => {
            row.ratio = e.ratio;
            row.error = e.error;
            row.excitation = e.excitation.value.re;
            row.deexcitation = e.deexcitation.value.re;
            if e.flagged {
                row.status = Status::Flagged;
            }
        }
        Err(e) => row.status = Status::Failed(e.to_string()),
    }
    row
}

/// Sigma-major, vacuum-minor.
pub fn run_edr(cfg: &Config, sigmas: &[f64], workers: usize) -> Result<Vec<EdrRow>, rayon::ThreadPoolBuildError> {
    let vac = vacua(cfg);
    let jobs: Vec<(f64, VacuumKind)> = sigmas.iter().flat_map(|&s| vac.iter().map(move |&v| (s, v))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    Ok(pool.install(|| jobs.par_iter().map(|&(s, v)| edr_row(cfg, s, v)).collect()))
}

pub const HEADER: [&str; 8] =
    ["sigma", "vacuum", "status", "edr", "err_edr", "excitation", "deexcitation", "edr_longtime"];

pub fn write_edr_csv<W: Write>(out: W, rows: &[EdrRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    let num = |x: f64| if x.is_nan() { String::new() } else { fmt_float(x) };
    for r in rows {
        w.write_record([
            fmt_float(r.sigma),
            r.vacuum.name().to_string(),
            r.status.label(),
            num(r.ratio),
            num(r.error),
            num(r.excitation),
            num(r.deexcitation),
            r.longtime.map_or(String::new(), fmt_float),
        ])?;
    }
    w.flush()?;
    Ok(())
}

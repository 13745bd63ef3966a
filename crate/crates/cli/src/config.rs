//! TOML run configuration.

use std::path::Path;

use harvest_core::{
    radius_from_proper_distance, ContourSpec, KernelOptions, QuadratureConfig, Scenario, SpacetimeParams,
    StaticDetector, StripHeight, Switching, SwitchingKind, VacuumKind,
};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub contour: ContourSection,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    pub sweep: Option<SweepSection>,
}

/// Lengths are in the same (arbitrary) unit as `sigma`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub mass: f64,
    pub vacuum: Option<VacuumKind>,
    pub gap: f64,
    #[serde(default)]
    pub tau0: f64,
    /// Adds `tau0_lead * sigma` to the switching peak, for sigma sweeps that must
    /// stay clear of the shell.
    #[serde(default)]
    pub tau0_lead: f64,
    #[serde(default = "one")]
    pub coupling: f64,
    #[serde(default = "one")]
    pub sigma: f64,
    #[serde(default = "main_body")]
    pub switching: SwitchingKind,
    /// Proper distance of detector A from the horizon.
    pub d_a: Option<f64>,
    pub radius_a: Option<f64>,
    /// Proper distance from A to B; B sits on A when neither this nor `radius_b` is given.
    pub d_ab: Option<f64>,
    pub radius_b: Option<f64>,
    #[serde(default = "yes")]
    pub vaidya_cross_terms: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourSection {
    #[serde(default = "five")]
    pub b: f64,
    /// Fixed strip height in units of sigma; automatic when absent.
    pub height: Option<f64>,
    #[serde(default = "one")]
    pub auto_max: f64,
    #[serde(default = "half")]
    pub auto_fraction: f64,
}

impl Default for ContourSection {
    fn default() -> Self {
        ContourSection { b: 5.0, height: None, auto_max: 1.0, auto_fraction: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Axis {
    #[serde(rename = "dA")]
    DA,
    #[serde(rename = "dAB")]
    DAB,
    #[serde(rename = "mass")]
    Mass,
    #[serde(rename = "sigma")]
    Sigma,
    #[serde(rename = "tau0")]
    Tau0,
    #[serde(rename = "omega")]
    Omega,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Output {
    #[serde(rename = "L_AA")]
    LAA,
    #[serde(rename = "L_BB")]
    LBB,
    #[serde(rename = "L_AB")]
    LAB,
    #[serde(rename = "M_nonlocal")]
    MNonlocal,
    #[serde(rename = "concurrence")]
    Concurrence,
    #[serde(rename = "mutual_information")]
    MutualInformation,
    #[serde(rename = "estimator")]
    Estimator,
    #[serde(rename = "edr")]
    Edr,
}

impl Output {
    pub fn name(self) -> &'static str {
        match self {
            Output::LAA => "L_AA",
            Output::LBB => "L_BB",
            Output::LAB => "L_AB",
            Output::MNonlocal => "M_nonlocal",
            Output::Concurrence => "concurrence",
            Output::MutualInformation => "mutual_information",
            Output::Estimator => "estimator",
            Output::Edr => "edr",
        }
    }

    pub fn is_complex(self) -> bool {
        matches!(self, Output::LAA | Output::LBB | Output::LAB | Output::MNonlocal)
    }

    fn needs_two_radii(self) -> bool {
        matches!(self, Output::MNonlocal | Output::Concurrence)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub vacua: Vec<VacuumKind>,
    pub outputs: Vec<Output>,
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn five() -> f64 {
    5.0
}
fn yes() -> bool {
    true
}
fn main_body() -> SwitchingKind {
    SwitchingKind::MainBody
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config, ConfigError> {
        let cfg: Config = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Config::from_toml(&text)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.scenario;
        if s.d_a.is_some() == s.radius_a.is_some() {
            return invalid("give exactly one of scenario.d_a and scenario.radius_a");
        }
        if s.d_ab.is_some() && s.radius_b.is_some() {
            return invalid("give at most one of scenario.d_ab and scenario.radius_b");
        }
        for (name, v) in [("mass", s.mass), ("sigma", s.sigma), ("contour.b", self.contour.b)] {
            if !v.is_finite() || v < 0.0 {
                return invalid(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        if !(s.sigma > 0.0) {
            return invalid("sigma must be positive");
        }
        if let Some(h) = self.contour.height {
            if !(h > 0.0) {
                return invalid(format!("contour.height must be positive, got {h}"));
            }
        }
        self.quadrature.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if let Some(sw) = &self.sweep {
            sw.validate(s)?;
        }
        Ok(())
    }

    /// Scenario for one vacuum, with an optional axis value substituted.
    pub fn scenario(&self, vacuum: VacuumKind, point: Option<(Axis, f64)>) -> harvest_core::Result<Scenario> {
        let mut s = self.scenario.clone();
        if let Some((axis, x)) = point {
            match axis {
                Axis::DA => {
                    s.d_a = Some(x);
                    s.radius_a = None;
                }
                Axis::DAB => {
                    s.d_ab = Some(x);
                    s.radius_b = None;
                }
                Axis::Mass => s.mass = x,
                Axis::Sigma => s.sigma = x,
                Axis::Tau0 => s.tau0 = x,
                Axis::Omega => s.gap = x,
            }
        }
        // flat kernels ignore the mass, so place the detectors in flat space
        let m_geom = if vacuum.is_flat() { 0.0 } else { s.mass };
        let ra = match (s.d_a, s.radius_a) {
            (Some(d), _) => radius_from_proper_distance(d, 2.0 * m_geom, m_geom)?,
            (None, Some(r)) => r,
            (None, None) => unreachable!("checked when loading"),
        };
        let rb = match (s.d_ab, s.radius_b) {
            (Some(d), _) => radius_from_proper_distance(d, ra, m_geom)?,
            (None, Some(r)) => r,
            (None, None) => ra,
        };
        let tau0 = s.tau0 + s.tau0_lead * s.sigma;
        let det = |r| StaticDetector { radius: r, gap: s.gap, tau0, coupling: s.coupling };
        let height = match self.contour.height {
            Some(h) => StripHeight::Fixed(h),
            None => StripHeight::Auto { max: self.contour.auto_max, fraction: self.contour.auto_fraction },
        };
        Ok(Scenario {
            spacetime: SpacetimeParams { mass: s.mass },
            vacuum,
            det_a: det(ra),
            det_b: det(rb),
            switching: Switching { kind: s.switching, sigma: s.sigma },
            contour: ContourSpec { b: self.contour.b, height },
            quad: self.quadrature,
            kernel: KernelOptions { vaidya_cross_terms: s.vaidya_cross_terms },
        })
    }
}

impl SweepSection {
    fn validate(&self, s: &ScenarioSection) -> Result<(), ConfigError> {
        if self.grid.is_empty() {
            return invalid("sweep.grid is empty");
        }
        if self.grid.iter().any(|x| !x.is_finite()) {
            return invalid("sweep.grid has non-finite entries");
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("sweep.grid must be strictly increasing");
        }
        if self.vacua.is_empty() {
            return invalid("sweep.vacua is empty");
        }
        if self.outputs.is_empty() {
            return invalid("sweep.outputs is empty");
        }
        for (i, o) in self.outputs.iter().enumerate() {
            if self.outputs[..i].contains(o) {
                return invalid(format!("output {} requested twice", o.name()));
            }
        }
        let separated = match self.axis {
            Axis::DAB => self.grid.iter().all(|&x| x > 0.0),
            _ => s.d_ab.map_or(false, |d| d > 0.0) || s.radius_b.is_some(),
        };
        if let Some(o) = self.outputs.iter().find(|o| o.needs_two_radii()) {
            if !separated {
                return invalid(format!("{} needs detectors at different radii", o.name()));
            }
        }
        let lo = self.grid[0];
        let positive = matches!(self.axis, Axis::Sigma | Axis::Mass);
        if positive && !(lo > 0.0) || matches!(self.axis, Axis::DA | Axis::DAB) && lo < 0.0 {
            return invalid(format!("sweep.grid starts at {lo}, outside the range of {:?}", self.axis));
        }
        for v in &self.vacua {
            if !v.is_flat() && !(s.mass > 0.0) && self.axis != Axis::Mass {
                return invalid(format!("the {v} vacuum needs mass > 0"));
            }
        }
        Ok(())
    }
}

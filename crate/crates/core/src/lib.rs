//! Leading-order reduced state of two static Unruh-DeWitt detectors with
//! derivative coupling outside (1+1)-dimensional Schwarzschild and Vaidya
//! black holes.
//!
//! All lengths are in units of the switching width unless a scenario says
//! otherwise. Two-point kernels are written without any `i epsilon`; the
//! distributional prescription comes from deforming the second time argument
//! into the upper half-plane (see [`quadrature`]).

pub mod correlations;
pub mod detector;
pub mod geometry;
pub mod quadrature;
pub mod special;
pub mod wightman;

use num_complex::Complex64;
use thiserror::Error;

pub use correlations::{
    concurrence, correlation_report, l_plus_minus, mutual_information, signalling_estimator,
    CorrelationReport,
};
pub use detector::{
    edr_estimate, edr_ratio, l_element, longtime_rate, m_element, pair_state, soften,
    tolman_beta, transition_estimate, transition_probability, ContourSpec, DetectorLabel,
    EdrEstimate, PairErrors, PairReport, PairState, Scenario, StripHeight, Switching,
    SwitchingKind,
};
pub use geometry::{
    metric_f, proper_distance, pullback, radius_from_proper_distance, redshift_gamma,
    shell_admissible, tortoise, NullCoords, SpacetimeParams, StaticDetector,
};
pub use quadrature::{
    closed_form_minkowski_response, direct_ieps_integral, gauss_legendre, integrate, pole_local_contour_integral,
    strip_double_integral, Estimate, InnerLimit, Interval, ProductRule, QuadratureConfig, Strip,
};
pub use special::{erfc, lambert_w, lambert_w_with, w_of_exp, wright_omega, CutPolicy, WBranch};
pub use wightman::{commutator_kernel, kernel, strip_height_limit, KernelOptions, VacuumKind};

pub use num_complex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("branch cut: {0}")]
    BranchCut(String),
    #[error("pole hit in the {0} kernel")]
    Pole(&'static str),
    #[error("analyticity violation: {0}")]
    Analyticity(String),
    #[error("tolerance not met: best estimate {value} with error bound {error:e}")]
    ToleranceNotMet { value: Complex64, error: f64 },
    #[error("shell crossing: {0}")]
    ShellCrossing(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("underflow: {0}")]
    Underflow(String),
    #[error("negative local term: {0}")]
    NegativeLocal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

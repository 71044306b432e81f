//! Zero-noise extrapolation: noise-scaling schedules, scaled runs, the linear,
//! Richardson and exponential extrapolators, and bias/MSE bookkeeping.

mod fits;

pub use fits::{
    extrapolate, fit_exponential, fit_linear, fit_richardson, linear_weights, propagate_variance,
    richardson_weights, ExponentialFit,
};

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::exec::Execution;
use crate::linalg::ComplexMatrix;
use crate::noisy_sim::{
    derive_seed, measure, sample_estimate, Circuit, DensityMatrix, Measurement, NoiseModel,
    ShotEstimate, SimError, MAX_P,
};

/// Richardson extrapolation is limited to degree 3.
pub const MAX_RICHARDSON_POINTS: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZneError {
    #[error("repeated scale factor {0}")]
    DegenerateSchedule(f64),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("{method} needs at least {needed} points, got {found}")]
    TooFewPoints {
        method: FitMethod,
        needed: usize,
        found: usize,
    },
    #[error("expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite input")]
    NonFinite,
    #[error("exponential fit not found: {0}")]
    FitNotFound(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Noise amplification factors `1 = c_0 < c_1 < ... < c_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSchedule {
    factors: Vec<f64>,
}

impl ScalingSchedule {
    pub fn new(factors: Vec<f64>) -> Result<Self, ZneError> {
        match factors.first() {
            None => return Err(ZneError::InvalidSchedule("empty schedule".into())),
            Some(&c0) if c0 != 1.0 => {
                return Err(ZneError::InvalidSchedule(format!(
                    "first factor must be 1, got {c0}"
                )))
            }
            _ => {}
        }
        if factors.iter().any(|c| !c.is_finite()) {
            return Err(ZneError::NonFinite);
        }
        for w in factors.windows(2) {
            if w[1] == w[0] {
                return Err(ZneError::DegenerateSchedule(w[0]));
            }
            if w[1] < w[0] {
                return Err(ZneError::InvalidSchedule(format!(
                    "factors must ascend, {} follows {}",
                    w[1], w[0]
                )));
            }
        }
        Ok(Self { factors })
    }

    /// `[1, 2, 3]`.
    pub fn integer() -> Self {
        Self {
            factors: vec![1.0, 2.0, 3.0],
        }
    }

    /// `[1, 1.25, 1.5]`.
    pub fn fine() -> Self {
        Self {
            factors: vec![1.0, 1.25, 1.5],
        }
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn max_factor(&self) -> f64 {
        self.factors[self.factors.len() - 1]
    }

    /// Checks `p * c_n <= 3/4`.
    pub fn check_noise(&self, p: f64) -> Result<(), ZneError> {
        if !(p >= 0.0) || p * self.max_factor() > MAX_P {
            return Err(ZneError::InvalidSchedule(format!(
                "scaled noise {} exceeds {MAX_P}",
                p * self.max_factor()
            )));
        }
        Ok(())
    }

    /// Dash-separated factors, e.g. `1-1.25-1.5`.
    pub fn id(&self) -> String {
        self.factors
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

impl fmt::Display for ScalingSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// Extrapolator family. The declaration order is the tie-break order in
/// [`select_best`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FitMethod {
    Exponential,
    Richardson,
    Linear,
}

impl FitMethod {
    pub const ALL: [FitMethod; 3] = [
        FitMethod::Exponential,
        FitMethod::Richardson,
        FitMethod::Linear,
    ];

    pub fn label(self) -> &'static str {
        match self {
            FitMethod::Exponential => "exponential",
            FitMethod::Richardson => "richardson",
            FitMethod::Linear => "linear",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.label() == s)
    }
}

impl fmt::Display for FitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One scaled run: the exact post-selected expectation and its shot estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledSample {
    pub factor: f64,
    pub exact: Measurement,
    pub estimate: ShotEstimate,
}

/// Exact expectations at noise `p * c_k` for each factor.
pub fn scaled_measurements(
    circuit: &Circuit,
    system_state: &DensityMatrix,
    o: &ComplexMatrix,
    noise: NoiseModel,
    schedule: &ScalingSchedule,
    exec: Execution,
) -> Result<Vec<Measurement>, ZneError> {
    schedule.check_noise(noise.p)?;
    exec.map(schedule.factors(), |&c| {
        measure(circuit, system_state, o, noise.scaled(c)?)
    })
    .into_iter()
    .map(|r| r.map_err(ZneError::from))
    .collect()
}

/// Scaled runs followed by `shots` samples each. Factor `k` draws from the
/// stream `derive_seed(seed, [k])`.
#[allow(clippy::too_many_arguments)]
pub fn scaled_expectations(
    circuit: &Circuit,
    system_state: &DensityMatrix,
    o: &ComplexMatrix,
    noise: NoiseModel,
    schedule: &ScalingSchedule,
    shots: u64,
    seed: u64,
    exec: Execution,
) -> Result<Vec<ScaledSample>, ZneError> {
    let exact = scaled_measurements(circuit, system_state, o, noise, schedule, exec)?;
    schedule
        .factors()
        .iter()
        .zip(exact)
        .enumerate()
        .map(|(k, (&factor, exact))| {
            let estimate =
                sample_estimate(exact.expectation, shots, derive_seed(seed, &[k as u64]))?;
            Ok(ScaledSample {
                factor,
                exact,
                estimate,
            })
        })
        .collect()
}

/// Extrapolated value with its error decomposition against a known ideal.
#[derive(Debug, Clone, PartialEq)]
pub struct ZneReport {
    pub method: FitMethod,
    pub schedule: ScalingSchedule,
    pub estimate: f64,
    pub variance: f64,
    pub bias: f64,
    /// `variance + bias^2`.
    pub mse: f64,
    pub scaled_means: Vec<f64>,
    pub scaled_variances: Vec<f64>,
}

impl ZneReport {
    /// Polynomial degree of a Richardson report.
    pub fn richardson_degree(&self) -> Option<usize> {
        (self.method == FitMethod::Richardson).then(|| self.schedule.len() - 1)
    }
}

/// Blind extrapolation without reference to the ideal value.
#[derive(Debug, Clone, PartialEq)]
pub struct ZneFit {
    pub method: FitMethod,
    pub estimate: f64,
    pub variance: f64,
}

/// Extrapolates with `method` and propagates the scaled variances.
pub fn fit(
    method: FitMethod,
    schedule: &ScalingSchedule,
    means: &[f64],
    variances: &[f64],
) -> Result<ZneFit, ZneError> {
    let estimate = extrapolate(method, schedule, means)?;
    let variance = propagate_variance(method, schedule, variances, means)?;
    Ok(ZneFit {
        method,
        estimate,
        variance,
    })
}

/// Every extrapolator applied to the same data, failures included.
pub fn fit_all(
    schedule: &ScalingSchedule,
    means: &[f64],
    variances: &[f64],
) -> Vec<(FitMethod, Result<ZneFit, ZneError>)> {
    FitMethod::ALL
        .iter()
        .map(|&m| (m, fit(m, schedule, means, variances)))
        .collect()
}

/// Fits `method` to the shot estimates and scores it against `ideal`.
pub fn evaluate(
    method: FitMethod,
    schedule: &ScalingSchedule,
    samples: &[ShotEstimate],
    ideal: f64,
) -> Result<ZneReport, ZneError> {
    let means: Vec<f64> = samples.iter().map(|s| s.mean).collect();
    let variances: Vec<f64> = samples.iter().map(|s| s.variance).collect();
    let f = fit(method, schedule, &means, &variances)?;
    let bias = f.estimate - ideal;
    Ok(ZneReport {
        method,
        schedule: schedule.clone(),
        estimate: f.estimate,
        variance: f.variance,
        bias,
        mse: f.variance + bias * bias,
        scaled_means: means,
        scaled_variances: variances,
    })
}

fn rank(a: &ZneReport, b: &ZneReport) -> Ordering {
    a.mse
        .total_cmp(&b.mse)
        .then(a.method.cmp(&b.method))
        .then(a.schedule.max_factor().total_cmp(&b.schedule.max_factor()))
        .then(a.schedule.len().cmp(&b.schedule.len()))
}

/// Minimum-MSE report. Ties go to exponential, then Richardson, then linear,
/// then the schedule with the smaller largest factor.
pub fn select_best(reports: &[ZneReport]) -> Option<&ZneReport> {
    reports.iter().min_by(|a, b| rank(a, b))
}

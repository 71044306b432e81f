//! Truncated Jacobi–Anger expansion of `e^{-i tau x} / sqrt(2)` as a pair of
//! Laurent polynomials in `z = e^{i theta}`, `x = cos(theta)`.
//!
//! ```text
//! cos(tau x) = J_0(tau) + 2 sum_{k>=1} (-1)^k J_2k(tau)   T_2k(x)
//! sin(tau x) =            2 sum_{k>=0} (-1)^k J_2k+1(tau) T_2k+1(x)
//! ```
//!
//! With `T_m(cos theta) = (z^m + z^-m) / 2` both components become reciprocal
//! Laurent polynomials with real coefficients. The QSP target is
//! `P = A - iB`.

mod bessel;
mod laurent;

pub use bessel::{bessel_j, bessel_sequence, MAX_ARGUMENT};
pub use laurent::{LaurentPolynomial, Parity, Symmetry};

use std::f64::consts::{E, FRAC_1_SQRT_2};

use num_complex::Complex64;
use thiserror::Error;

/// Uniform grid density used for every l-infinity measurement on `[-1, 1]`.
pub const DEFAULT_GRID_POINTS: usize = 1001;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JacobiAngerError {
    #[error("Bessel argument {tau} outside supported range |tau| <= 500")]
    RangeError { tau: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(
        "no degree up to {max_degree} reaches error {target:e} at tau = {tau} (best {best:e})"
    )]
    NoConvergence {
        tau: f64,
        target: f64,
        max_degree: usize,
        best: f64,
    },
}

/// Upper bound `r~(tau, eps)` on the solution of `(e tau / 2r)^r = eps`.
pub fn analytic_degree_bound(tau: f64, eps: f64) -> Result<u64, JacobiAngerError> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(JacobiAngerError::InvalidArgument(format!(
            "tau must be positive, got {tau}"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(JacobiAngerError::InvalidArgument(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let log_inv = (1.0 / eps).ln();
    let bound = if tau > log_inv / E {
        (E * tau).ceil()
    } else {
        (4.0 * log_inv / (E + log_inv / tau).ln()).ceil()
    };
    Ok(bound as u64)
}

/// Components `A(z) ≈ cos(tau cos theta)/sqrt2` and `B(z) ≈ sin(tau cos theta)/sqrt2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HsPair {
    pub tau: f64,
    /// Truncation order; the polynomial degree is `2R + 1`.
    pub r: usize,
    pub a: LaurentPolynomial,
    pub b: LaurentPolynomial,
}

impl HsPair {
    pub fn degree(&self) -> usize {
        2 * self.r + 1
    }

    /// `P(z) = A(z) - i B(z)`.
    pub fn polynomial(&self) -> LaurentPolynomial {
        self.a.sub(&self.b.scale(Complex64::new(0.0, 1.0)))
    }

    /// `P(e^{i theta})`.
    pub fn eval_circle(&self, theta: f64) -> Complex64 {
        self.a.eval_circle(theta) - Complex64::new(0.0, 1.0) * self.b.eval_circle(theta)
    }
}

/// The function the QSP polynomial approximates: `e^{-i tau x} / sqrt(2)`.
pub fn target_value(tau: f64, x: f64) -> Complex64 {
    Complex64::from_polar(FRAC_1_SQRT_2, -tau * x)
}

/// Truncated expansion at order `R`, degree `2R + 1`.
pub fn build_hs_laurent(tau: f64, r: usize) -> Result<HsPair, JacobiAngerError> {
    let degree = 2 * r + 1;
    let j = bessel_sequence(degree, tau)?;
    let s = FRAC_1_SQRT_2;
    let mut a = vec![0.0; 2 * degree + 1];
    let mut b = vec![0.0; 2 * degree + 1];
    let mid = degree as i64;
    let put = |v: &mut Vec<f64>, k: i64, c: f64| {
        v[(mid + k) as usize] = c;
        v[(mid - k) as usize] = c;
    };
    a[degree] = s * j[0];
    for k in 1..=r {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        put(&mut a, 2 * k as i64, s * sign * j[2 * k]);
    }
    for k in 0..=r {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        put(&mut b, 2 * k as i64 + 1, s * sign * j[2 * k + 1]);
    }
    Ok(HsPair {
        tau,
        r,
        a: LaurentPolynomial::from_real(-mid, &a),
        b: LaurentPolynomial::from_real(-mid, &b),
    })
}

fn uniform_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| (-1.0 + 2.0 * i as f64 / (points - 1) as f64).clamp(-1.0, 1.0))
        .collect()
}

/// `max_x |(a - i b)(e^{i arccos x}) - e^{-i tau x}/sqrt2|` over a uniform grid on `[-1, 1]`.
pub fn linf_circle_error(
    a: &LaurentPolynomial,
    b: &LaurentPolynomial,
    tau: f64,
    grid_points: usize,
) -> Result<f64, JacobiAngerError> {
    if grid_points < 101 {
        return Err(JacobiAngerError::InvalidArgument(format!(
            "grid needs at least 101 points, got {grid_points}"
        )));
    }
    let i = Complex64::new(0.0, 1.0);
    Ok(uniform_grid(grid_points)
        .into_iter()
        .map(|x| {
            let theta = x.acos();
            (a.eval_circle(theta) - i * b.eval_circle(theta) - target_value(tau, x)).norm()
        })
        .fold(0.0, f64::max))
}

/// `2 sum_l |J_{2R+2l+2}| + 2 sum_l |J_{2R+2l+3}|` with 51 terms each: an upper bound
/// on the truncation error of the unnormalized expansion.
pub fn truncation_tail_bound(tau: f64, r: usize) -> Result<f64, JacobiAngerError> {
    let top = 2 * r + 2 * 50 + 3;
    let j = bessel_sequence(top, tau)?;
    let even: f64 = (0..=50).map(|l| j[2 * r + 2 * l + 2].abs()).sum();
    let odd: f64 = (0..=50).map(|l| j[2 * r + 2 * l + 3].abs()).sum();
    Ok(2.0 * even + 2.0 * odd)
}

/// Acceptance rule for the numerically selected degree.
///
/// A degree is accepted once its l-infinity error is below `slack * eps_coeff`,
/// and never below `min_degree`. The default is `slack = 10`, `min_degree = 5`;
/// [`DegreeCriterion::strict`] demands `error <= eps_coeff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeCriterion {
    pub slack: f64,
    pub min_degree: usize,
}

impl Default for DegreeCriterion {
    fn default() -> Self {
        Self {
            slack: 10.0,
            min_degree: 5,
        }
    }
}

impl DegreeCriterion {
    pub fn strict() -> Self {
        Self {
            slack: 1.0,
            min_degree: 1,
        }
    }

    fn accepts(&self, degree: usize, error: f64, eps: f64) -> bool {
        if degree < self.min_degree {
            return false;
        }
        if self.slack == 1.0 {
            error <= eps
        } else {
            error < self.slack * eps
        }
    }
}

/// Outcome of the numeric degree search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationReport {
    pub r: usize,
    /// `2R + 1`.
    pub degree: usize,
    pub eps_coeff: f64,
    /// Error level the search accepted against (`slack * eps_coeff`).
    pub tolerance: f64,
    pub linf_error: f64,
}

/// Smallest odd degree meeting [`DegreeCriterion::default`].
pub fn numeric_degree(
    tau: f64,
    eps_coeff: f64,
    grid_points: usize,
) -> Result<TruncationReport, JacobiAngerError> {
    numeric_degree_with(tau, eps_coeff, grid_points, DegreeCriterion::default())
}

pub fn numeric_degree_with(
    tau: f64,
    eps_coeff: f64,
    grid_points: usize,
    criterion: DegreeCriterion,
) -> Result<TruncationReport, JacobiAngerError> {
    if !(eps_coeff > 1e-8 && eps_coeff < 1.0) {
        return Err(JacobiAngerError::InvalidArgument(format!(
            "eps_coeff must lie in (1e-8, 1), got {eps_coeff}"
        )));
    }
    if grid_points < 101 {
        return Err(JacobiAngerError::InvalidArgument(format!(
            "grid needs at least 101 points, got {grid_points}"
        )));
    }
    let max_degree =
        (2 * analytic_degree_bound(tau, eps_coeff)? as usize + 1).max(criterion.min_degree);
    let j = bessel_sequence(max_degree + 1, tau)?;
    let grid = uniform_grid(grid_points);
    let thetas: Vec<f64> = grid.iter().map(|x| x.acos()).collect();
    let target_cos: Vec<f64> = grid.iter().map(|x| (tau * x).cos()).collect();
    let target_sin: Vec<f64> = grid.iter().map(|x| (tau * x).sin()).collect();

    // Running partial sums of the unnormalized cos and sin expansions.
    let mut cos_part = vec![j[0]; grid_points];
    let mut sin_part = vec![0.0; grid_points];
    let mut best = f64::INFINITY;
    let mut r = 0usize;
    loop {
        let degree = 2 * r + 1;
        if degree > max_degree {
            return Err(JacobiAngerError::NoConvergence {
                tau,
                target: eps_coeff,
                max_degree,
                best,
            });
        }
        let sign = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
        for (g, th) in thetas.iter().enumerate() {
            if r > 0 {
                cos_part[g] += 2.0 * sign * j[2 * r] * (2.0 * r as f64 * th).cos();
            }
            sin_part[g] += 2.0 * sign * j[2 * r + 1] * ((2 * r + 1) as f64 * th).cos();
        }
        let error = FRAC_1_SQRT_2
            * (0..grid_points)
                .map(|g| (cos_part[g] - target_cos[g]).hypot(sin_part[g] - target_sin[g]))
                .fold(0.0, f64::max);
        best = best.min(error);
        if criterion.accepts(degree, error, eps_coeff) {
            return Ok(TruncationReport {
                r,
                degree,
                eps_coeff,
                tolerance: criterion.slack * eps_coeff,
                linf_error: error,
            });
        }
        r += 1;
    }
}

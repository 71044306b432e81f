//! Complementary polynomials: given `a`, `b` real on the unit circle with
//! `a^2 + b^2 <= 1`, find `c`, `d` with `a^2 + b^2 + c^2 + d^2 = 1`.
//!
//! `g = 1 - a^2 - b^2` is a nonnegative trigonometric polynomial, so it factors
//! as `|h|^2` with `h` an ordinary polynomial whose roots are the roots of
//! `z^m g(z)` inside the closed unit disk (Fejér–Riesz). Then `c = Re h'`,
//! `d = Im h'` on the circle, where `h' = z^{-ceil(m/2)} h` recentres the degree.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::roots::polynomial_roots;
use super::QspError;
use crate::jacobi_anger::LaurentPolynomial;

/// Maximum accepted `|a^2 + b^2 + c^2 + d^2 - 1|` on the check grid.
pub const COMPLETION_TOL: f64 = 1e-8;

const CHECK_GRID: usize = 1001;
/// Relative size below which outer coefficients of `g` are dropped.
const TRIM_REL: f64 = 1e-30;
/// Roots within this distance of the unit circle are treated as lying on it.
const CIRCLE_BAND: f64 = 1e-4;
/// Roots on the circle closer than this are merged into one multiple root.
const CLUSTER_RADIUS: f64 = 1e-3;

/// Returns `(c, d)`.
pub fn complete(
    a: &LaurentPolynomial,
    b: &LaurentPolynomial,
) -> Result<(LaurentPolynomial, LaurentPolynomial), QspError> {
    for (name, p) in [("a", a), ("b", b)] {
        if !p.is_real_on_circle(1e-12 * p.max_abs_coefficient().max(1.0)) {
            return Err(QspError::InvalidInput(format!(
                "{name} is not real on the unit circle"
            )));
        }
    }
    let one = LaurentPolynomial::constant(Complex64::new(1.0, 0.0));
    let g_full = one.sub(&a.mul(a)).sub(&b.mul(b));
    let g = symmetric_trim(&g_full);

    let worst = circle_grid(CHECK_GRID)
        .map(|th| g.eval_circle(th).re)
        .fold(f64::INFINITY, f64::min);
    if worst < -COMPLETION_TOL {
        return Err(QspError::CompletionFailure {
            residual: -worst,
            reason: "1 - a^2 - b^2 is negative on the unit circle".into(),
        });
    }

    let m = g.degree();
    let scale = g.max_abs_coefficient();
    let (c, d) = if scale <= 1e-14 {
        (LaurentPolynomial::zero(), LaurentPolynomial::zero())
    } else if m == 0 {
        let c0 = g.coefficient(0).re.max(0.0).sqrt();
        (
            LaurentPolynomial::constant(Complex64::new(c0, 0.0)),
            LaurentPolynomial::zero(),
        )
    } else {
        let h = spectral_factor(&g, m)?;
        let shifted = h.shift(-(m.div_ceil(2) as i64));
        let reflected = shifted.conj_reflect();
        let c = shifted.add(&reflected).scale(Complex64::new(0.5, 0.0));
        let d = shifted.sub(&reflected).scale(Complex64::new(0.0, -0.5));
        (c, d)
    };

    let residual = circle_grid(CHECK_GRID)
        .map(|th| {
            let s = [a, b, &c, &d]
                .iter()
                .map(|p| p.eval_circle(th).norm_sqr())
                .sum::<f64>();
            (s - 1.0).abs()
        })
        .fold(0.0, f64::max);
    if residual > COMPLETION_TOL {
        return Err(QspError::CompletionFailure {
            residual,
            reason: "residual above tolerance".into(),
        });
    }
    Ok((c, d))
}

fn circle_grid(points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |i| 2.0 * PI * i as f64 / (points - 1) as f64)
}

/// Restricts `g` to `[-m, m]` where `m` is the largest index with a coefficient
/// above `TRIM_REL * max|g_k|` on either side, and symmetrizes it to be exactly
/// real on the circle.
fn symmetric_trim(g: &LaurentPolynomial) -> LaurentPolynomial {
    let cutoff = TRIM_REL * g.max_abs_coefficient();
    let span = g.degree() as i64;
    let m = (0..=span)
        .rev()
        .find(|&k| g.coefficient(k).norm() > cutoff || g.coefficient(-k).norm() > cutoff)
        .unwrap_or(0);
    let coeffs = (-m..=m)
        .map(|k| 0.5 * (g.coefficient(k) + g.coefficient(-k).conj()))
        .collect();
    LaurentPolynomial::new(-m, coeffs)
}

/// Polynomial `h` of degree `m` with `|h|^2 = g` on the unit circle.
fn spectral_factor(g: &LaurentPolynomial, m: usize) -> Result<LaurentPolynomial, QspError> {
    let shifted: Vec<Complex64> = (-(m as i64)..=m as i64).map(|k| g.coefficient(k)).collect();
    let roots = polynomial_roots(&shifted).ok_or_else(|| QspError::CompletionFailure {
        residual: f64::NAN,
        reason: "root finding did not converge".into(),
    })?;
    let chosen = select_inner_roots(&shifted, &roots);
    if chosen.len() != m {
        return Err(QspError::CompletionFailure {
            residual: f64::NAN,
            reason: format!(
                "found {} roots inside the unit disk, expected {m}",
                chosen.len()
            ),
        });
    }

    // Sample prod(z - r) on the circle in log form to avoid overflow, fit the
    // scale against g, then read off coefficients with a DFT.
    let samples = (2 * m + 2).next_power_of_two().max(64);
    let mut log_mod = Vec::with_capacity(samples);
    let mut phase = Vec::with_capacity(samples);
    for j in 0..samples {
        let z = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / samples as f64);
        let (mut lm, mut ph) = (0.0, 0.0);
        for r in &chosen {
            let f = z - r;
            lm += f.norm().ln();
            ph += f.arg();
        }
        log_mod.push(lm);
        phase.push(ph);
    }
    let peak = log_mod.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, lm) in log_mod.iter().enumerate() {
        let p = (2.0 * (lm - peak)).exp();
        let gz = g.eval_circle(2.0 * PI * j as f64 / samples as f64).re;
        num += gz * p;
        den += p * p;
    }
    let k = (num / den).max(0.0).sqrt();
    let values: Vec<Complex64> = log_mod
        .iter()
        .zip(&phase)
        .map(|(lm, ph)| Complex64::from_polar(k * (lm - peak).exp(), *ph))
        .collect();
    let coeffs = (0..=m)
        .map(|deg| {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    v * Complex64::from_polar(
                        1.0,
                        -2.0 * PI * (j * deg % samples) as f64 / samples as f64,
                    )
                })
                .sum::<Complex64>()
                / samples as f64
        })
        .collect();
    Ok(LaurentPolynomial::new(0, coeffs))
}

/// Roots strictly inside the disk, plus half of each cluster of roots on the
/// circle (those come in even multiplicity for a nonnegative `g`).
fn select_inner_roots(poly: &[Complex64], roots: &[Complex64]) -> Vec<Complex64> {
    let mut chosen: Vec<Complex64> = roots
        .iter()
        .copied()
        .filter(|r| r.norm() < 1.0 - CIRCLE_BAND)
        .collect();
    let mut on_circle: Vec<Complex64> = roots
        .iter()
        .copied()
        .filter(|r| (r.norm() - 1.0).abs() <= CIRCLE_BAND)
        .collect();
    while let Some(seed) = on_circle.pop() {
        let mut cluster = vec![seed];
        let mut i = 0;
        while i < on_circle.len() {
            if (on_circle[i] - seed).norm() <= CLUSTER_RADIUS {
                cluster.push(on_circle.swap_remove(i));
            } else {
                i += 1;
            }
        }
        let centroid: Complex64 = cluster.iter().sum::<Complex64>() / cluster.len() as f64;
        let point = polish_multiple_root(poly, centroid, cluster.len());
        chosen.extend(std::iter::repeat_n(point, cluster.len() / 2));
    }
    chosen
}

/// A root of multiplicity `k` is a simple root of the `(k-1)`-th derivative;
/// refine it there with Newton steps and project onto the circle.
fn polish_multiple_root(poly: &[Complex64], start: Complex64, k: usize) -> Complex64 {
    let mut deriv = poly.to_vec();
    for _ in 1..k {
        deriv = deriv
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c * j as f64)
            .collect();
    }
    let eval = |coeffs: &[Complex64], z: Complex64| {
        coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    };
    let slope: Vec<Complex64> = deriv
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, c)| c * j as f64)
        .collect();
    let mut z = start;
    for _ in 0..8 {
        let d = eval(&slope, z);
        if d.norm() == 0.0 {
            break;
        }
        let step = eval(&deriv, z) / d;
        if !step.is_finite() || step.norm() > CLUSTER_RADIUS {
            break;
        }
        z -= step;
        if step.norm() <= 4.0 * f64::EPSILON {
            break;
        }
    }
    z / z.norm()
}

//! Simultaneous polynomial root finding (Aberth–Ehrlich iteration).

use num_complex::Complex64;

const MAX_ITERATIONS: usize = 1000;

/// Roots of `sum_k coeffs[k] z^k` (ascending coefficients).
///
/// Starting points come from the Newton polygon of `log |c_k|`, so roots of
/// very different magnitudes are seeded on circles of matching radius.
/// Returns `None` if the iteration does not converge.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
    let top = coeffs
        .iter()
        .rposition(|c| *c != Complex64::new(0.0, 0.0))?;
    let low = coeffs.iter().position(|c| *c != Complex64::new(0.0, 0.0))?;
    let mut roots = vec![Complex64::new(0.0, 0.0); low];
    let poly = &coeffs[low..=top];
    let degree = poly.len() - 1;
    if degree == 0 {
        return Some(roots);
    }
    let lead = poly[degree];
    let monic: Vec<Complex64> = poly.iter().map(|c| c / lead).collect();
    let moduli: Vec<f64> = monic.iter().map(|c| c.norm()).collect();

    let mut z = initial_guesses(&moduli);
    let mut done = vec![false; degree];
    for _ in 0..MAX_ITERATIONS {
        let mut all_done = true;
        for i in 0..degree {
            if done[i] {
                continue;
            }
            let (ratio, converged) = newton_ratio(&monic, &moduli, z[i]);
            if converged {
                done[i] = true;
                continue;
            }
            all_done = false;
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                return None;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm() {
                done[i] = true;
            }
        }
        if all_done {
            roots.extend(z);
            return Some(roots);
        }
    }
    None
}

/// `p(z)/p'(z)` and whether `|p(z)|` is within its rounding error bound.
/// Evaluates the reversed polynomial in `1/z` outside the unit disk.
fn newton_ratio(c: &[Complex64], moduli: &[f64], z: Complex64) -> (Complex64, bool) {
    let n = c.len() - 1;
    if z.norm() <= 1.0 {
        let (p, dp, bound) = horner(c.iter().rev().copied(), moduli.iter().rev().copied(), z);
        (p / dp, p.norm() <= 8.0 * f64::EPSILON * bound)
    } else {
        let w = z.inv();
        let (q, dq, bound) = horner(c.iter().copied(), moduli.iter().copied(), w);
        let ratio = z * q / (q * n as f64 - w * dq);
        (ratio, q.norm() <= 8.0 * f64::EPSILON * bound)
    }
}

/// Horner evaluation from the highest coefficient down, with derivative and
/// the running bound `sum |c_k| |z|^k`.
fn horner(
    coeffs: impl Iterator<Item = Complex64>,
    moduli: impl Iterator<Item = f64>,
    z: Complex64,
) -> (Complex64, Complex64, f64) {
    let r = z.norm();
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    let mut bound = 0.0;
    for (c, m) in coeffs.zip(moduli) {
        dp = dp * z + p;
        p = p * z + c;
        bound = bound * r + m;
    }
    (p, dp, bound)
}

/// Points on circles whose radii follow the upper convex hull of `(k, log|c_k|)`.
fn initial_guesses(moduli: &[f64]) -> Vec<Complex64> {
    let n = moduli.len() - 1;
    let logs: Vec<f64> = moduli
        .iter()
        .map(|&m| if m > 0.0 { m.ln() } else { f64::NEG_INFINITY })
        .collect();
    let mut hull: Vec<usize> = Vec::new();
    for k in 0..=n {
        if logs[k] == f64::NEG_INFINITY {
            continue;
        }
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b - a) as f64 * (logs[k] - logs[a]) - (k - a) as f64 * (logs[b] - logs[a]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let sigma = 0.7;
    let mut guesses = Vec::with_capacity(n);
    for pair in hull.windows(2) {
        let (i, j) = (pair[0], pair[1]);
        let count = j - i;
        let radius = ((logs[i] - logs[j]) / count as f64).exp();
        for m in 0..count {
            let angle =
                2.0 * std::f64::consts::PI * (m as f64 / count as f64 + i as f64 / n as f64)
                    + sigma;
            guesses.push(Complex64::from_polar(radius, angle));
        }
    }
    guesses
}

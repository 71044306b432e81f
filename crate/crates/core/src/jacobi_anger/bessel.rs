//! Bessel functions of the first kind for integer order.
//!
//! Small arguments use the power series directly. Everything else goes through
//! Miller's backward recurrence normalized by `J_0 + 2 sum_k J_2k = 1`, which is
//! stable for all orders below the starting index.

use super::JacobiAngerError;

/// Largest `|tau|` accepted by [`bessel_j`] and [`bessel_sequence`].
pub const MAX_ARGUMENT: f64 = 500.0;

const SERIES_CUTOFF: f64 = 2.0;
const RESCALE_ABOVE: f64 = 1e250;

fn check_argument(tau: f64) -> Result<(), JacobiAngerError> {
    if !tau.is_finite() || tau.abs() > MAX_ARGUMENT {
        return Err(JacobiAngerError::RangeError { tau });
    }
    Ok(())
}

/// `J_k(tau)` for a single order.
pub fn bessel_j(k: usize, tau: f64) -> Result<f64, JacobiAngerError> {
    Ok(bessel_sequence(k, tau)?[k])
}

/// `[J_0(tau), J_1(tau), ..., J_max_order(tau)]`.
pub fn bessel_sequence(max_order: usize, tau: f64) -> Result<Vec<f64>, JacobiAngerError> {
    check_argument(tau)?;
    let x = tau.abs();
    let mut values = if x == 0.0 {
        let mut v = vec![0.0; max_order + 1];
        v[0] = 1.0;
        v
    } else if x < SERIES_CUTOFF {
        (0..=max_order).map(|k| series(k, x)).collect()
    } else {
        miller(max_order, x)
    };
    if tau < 0.0 {
        for (k, v) in values.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
    }
    Ok(values)
}

fn series(k: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    // (x/2)^k / k!, built incrementally so large k underflows instead of overflowing
    let mut lead = 1.0;
    for j in 1..=k {
        lead *= half / j as f64;
    }
    if lead == 0.0 {
        return 0.0;
    }
    let q = half * half;
    let mut term = lead;
    let mut sum = lead;
    for m in 1..60 {
        term *= -q / (m as f64 * (m + k) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn miller(max_order: usize, x: f64) -> Vec<f64> {
    let base = max_order.max(x.ceil() as usize);
    let mut start = base + 40 + (12.0 * x.cbrt()).ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut values = vec![0.0; start + 2];
    values[start] = 1e-30;
    for k in (1..=start).rev() {
        values[k - 1] = (2.0 * k as f64 / x) * values[k] - values[k + 1];
        if values[k - 1].abs() > RESCALE_ABOVE {
            for v in values[k - 1..].iter_mut() {
                *v /= RESCALE_ABOVE;
            }
        }
    }
    let norm = values[0] + 2.0 * values.iter().skip(2).step_by(2).sum::<f64>();
    values.truncate(max_order + 1);
    for v in values.iter_mut() {
        *v /= norm;
    }
    values
}

//! Extrapolators over `(c_k, y_k)` pairs and their variance propagation.

use super::{FitMethod, ScalingSchedule, ZneError};

/// Relative tolerance below which two consecutive scaled means count as equal.
const FLAT_TOL: f64 = 1e-14;
/// `|1 - rho|` below which the exponential rate is unidentifiable.
const RATIO_TOL: f64 = 1e-12;
const BISECTION_STEPS: usize = 200;
const GOLDEN_STEPS: usize = 120;
const SCAN_POINTS: usize = 41;

fn check_lengths(schedule: &ScalingSchedule, values: &[f64]) -> Result<(), ZneError> {
    if values.len() != schedule.len() {
        return Err(ZneError::LengthMismatch {
            expected: schedule.len(),
            found: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ZneError::NonFinite);
    }
    Ok(())
}

fn require_points(
    method: FitMethod,
    schedule: &ScalingSchedule,
    needed: usize,
) -> Result<(), ZneError> {
    if schedule.len() < needed {
        return Err(ZneError::TooFewPoints {
            method,
            needed,
            found: schedule.len(),
        });
    }
    Ok(())
}

/// `beta_k = prod_{i != k} c_i / (c_i - c_k)`, the Lagrange weights of the
/// interpolating polynomial evaluated at `c = 0`.
pub fn richardson_weights(factors: &[f64]) -> Result<Vec<f64>, ZneError> {
    if factors.len() < 2 {
        return Err(ZneError::TooFewPoints {
            method: FitMethod::Richardson,
            needed: 2,
            found: factors.len(),
        });
    }
    if factors.len() > super::MAX_RICHARDSON_POINTS {
        return Err(ZneError::InvalidSchedule(format!(
            "Richardson degree {} exceeds {}",
            factors.len() - 1,
            super::MAX_RICHARDSON_POINTS - 1
        )));
    }
    let mut betas = Vec::with_capacity(factors.len());
    for (k, &ck) in factors.iter().enumerate() {
        let mut beta = 1.0;
        for (i, &ci) in factors.iter().enumerate() {
            if i == k {
                continue;
            }
            if ci == ck {
                return Err(ZneError::DegenerateSchedule(ck));
            }
            beta *= ci / (ci - ck);
        }
        betas.push(beta);
    }
    Ok(betas)
}

/// Richardson estimate `sum_k beta_k y_k` and the weights used.
pub fn fit_richardson(
    schedule: &ScalingSchedule,
    means: &[f64],
) -> Result<(f64, Vec<f64>), ZneError> {
    check_lengths(schedule, means)?;
    let betas = richardson_weights(schedule.factors())?;
    Ok((dot(&betas, means), betas))
}

/// Weights `w` with `intercept = sum_k w_k y_k` for the least-squares line.
pub fn linear_weights(factors: &[f64]) -> Result<Vec<f64>, ZneError> {
    if factors.len() < 2 {
        return Err(ZneError::TooFewPoints {
            method: FitMethod::Linear,
            needed: 2,
            found: factors.len(),
        });
    }
    let n = factors.len() as f64;
    let mean = factors.iter().sum::<f64>() / n;
    let sxx: f64 = factors.iter().map(|c| (c - mean) * (c - mean)).sum();
    if sxx <= 0.0 {
        return Err(ZneError::DegenerateSchedule(mean));
    }
    Ok(factors
        .iter()
        .map(|c| 1.0 / n - mean * (c - mean) / sxx)
        .collect())
}

/// Intercept at `c = 0` of the least-squares line through the data.
pub fn fit_linear(schedule: &ScalingSchedule, means: &[f64]) -> Result<f64, ZneError> {
    check_lengths(schedule, means)?;
    Ok(dot(&linear_weights(schedule.factors())?, means))
}

/// Parameters of `y(c) = offset + amplitude * exp(-rate * c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit {
    pub offset: f64,
    pub amplitude: f64,
    pub rate: f64,
    /// `y(0) = offset + amplitude`.
    pub estimate: f64,
    /// Root-mean-square residual over the data.
    pub residual: f64,
}

/// `(exp(-a x) - 1) / (-a)`, continuous through `a = 0`.
fn phi(a: f64, x: f64) -> f64 {
    if a == 0.0 {
        x
    } else {
        (-a * x).exp_m1() / -a
    }
}

/// For fixed rate, fits `y = beta0 + beta1 * phi(a, c - c0)` by least squares.
/// Returns `(beta0, beta1, sum of squared residuals)`.
fn projected(a: f64, factors: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let c0 = factors[0];
    let g: Vec<f64> = factors.iter().map(|c| phi(a, c - c0)).collect();
    let n = g.len() as f64;
    let gm = g.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sgg: f64 = g.iter().map(|v| (v - gm) * (v - gm)).sum();
    if !(sgg > 0.0) || !sgg.is_finite() {
        return None;
    }
    let sgy: f64 = g.iter().zip(y).map(|(gv, yv)| (gv - gm) * (yv - ym)).sum();
    let beta1 = sgy / sgg;
    let beta0 = ym - beta1 * gm;
    let ss = g
        .iter()
        .zip(y)
        .map(|(gv, yv)| (yv - beta0 - beta1 * gv).powi(2))
        .sum();
    Some((beta0, beta1, ss))
}

fn not_found(reason: impl Into<String>) -> ZneError {
    ZneError::FitNotFound(reason.into())
}

/// Strictly monotone data with a common sign of consecutive differences.
fn check_monotone(y: &[f64]) -> Result<(), ZneError> {
    let scale = y
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let diffs: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    if diffs.iter().any(|d| d.abs() <= FLAT_TOL * scale) {
        return Err(not_found("scaled means are flat"));
    }
    if !(diffs.iter().all(|d| *d > 0.0) || diffs.iter().all(|d| *d < 0.0)) {
        return Err(not_found("scaled means are not monotone"));
    }
    Ok(())
}

/// Rate matching the ratio of consecutive differences for three points.
fn three_point_rate(c: &[f64], y: &[f64]) -> Result<f64, ZneError> {
    let (h1, h2) = (c[1] - c[0], c[2] - c[1]);
    let rho = (y[2] - y[1]) / (y[1] - y[0]);
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(not_found(format!(
            "difference ratio {rho:e} is not positive"
        )));
    }
    let lattice = h2 / h1;
    if (rho / lattice - 1.0).abs() < RATIO_TOL {
        return Err(not_found("data are linear, decay rate is unidentifiable"));
    }
    if (h1 - h2).abs() <= 1e-12 * h1.max(h2) {
        return Ok(-rho.ln() / h1);
    }
    let ratio = |a: f64| {
        if a == 0.0 {
            lattice
        } else {
            (-a * h1).exp() * (-a * h2).exp_m1() / (-a * h1).exp_m1()
        }
    };
    // ratio(a) decreases monotonically from +inf to 0.
    let limit = 700.0 / h1.min(h2);
    let (mut lo, mut hi) = (-1.0 / h1, 1.0 / h1);
    while ratio(lo) < rho {
        lo *= 2.0;
        if lo < -limit {
            return Err(not_found("decay rate out of range"));
        }
    }
    while ratio(hi) > rho {
        hi *= 2.0;
        if hi > limit {
            return Err(not_found("decay rate out of range"));
        }
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if ratio(mid) > rho {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_STEPS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Fits `y(c) = b + A exp(-a c)` and extrapolates to `c = 0`.
///
/// Three equally spaced factors use the closed-form rate `-ln(d2/d1)/h`; three
/// unequal factors solve the ratio equation by bisection; more points minimise
/// the residual over the rate with the linear parameters projected out.
pub fn fit_exponential(
    schedule: &ScalingSchedule,
    means: &[f64],
) -> Result<ExponentialFit, ZneError> {
    check_lengths(schedule, means)?;
    require_points(FitMethod::Exponential, schedule, 3)?;
    let c = schedule.factors();
    check_monotone(means)?;
    let rate = if c.len() == 3 {
        three_point_rate(c, means)?
    } else {
        let mid = c.len() / 2;
        let sub = [c[0], c[mid], c[c.len() - 1]];
        let a0 = three_point_rate(&sub, &[means[0], means[mid], means[c.len() - 1]])?;
        let span = c[c.len() - 1] - c[0];
        let objective = |a: f64| projected(a, c, means).map_or(f64::INFINITY, |p| p.2);
        let width = 4.0 * a0.abs().max(1.0 / span);
        let step = 2.0 * width / (SCAN_POINTS - 1) as f64;
        let best = (0..SCAN_POINTS)
            .map(|i| a0 - width + step * i as f64)
            .min_by(|x, y| objective(*x).total_cmp(&objective(*y)))
            .unwrap_or(a0);
        let a = golden_min(&objective, best - step, best + step);
        if (a * span).abs() < RATIO_TOL {
            return Err(not_found("data are linear, decay rate is unidentifiable"));
        }
        a
    };
    if !rate.is_finite() {
        return Err(not_found("non-finite decay rate"));
    }
    let (beta0, beta1, ss) =
        projected(rate, c, means).ok_or_else(|| not_found("singular design at the fitted rate"))?;
    let c0 = c[0];
    let estimate = beta0 + beta1 * phi(rate, -c0);
    // A exp(-a c0) = -beta1 / a
    let scaled_amp = -beta1 / rate;
    let amplitude = scaled_amp * (rate * c0).exp();
    let offset = beta0 - scaled_amp;
    if !estimate.is_finite() {
        return Err(not_found("non-finite extrapolation"));
    }
    Ok(ExponentialFit {
        offset,
        amplitude,
        rate,
        estimate,
        residual: (ss / c.len() as f64).sqrt(),
    })
}

/// Extrapolated `c = 0` value for `method`.
pub fn extrapolate(
    method: FitMethod,
    schedule: &ScalingSchedule,
    means: &[f64],
) -> Result<f64, ZneError> {
    match method {
        FitMethod::Linear => fit_linear(schedule, means),
        FitMethod::Richardson => fit_richardson(schedule, means).map(|r| r.0),
        FitMethod::Exponential => fit_exponential(schedule, means).map(|f| f.estimate),
    }
}

/// Variance of the extrapolated value given independent scaled means.
///
/// Linear and Richardson estimates are weighted sums, so the variance is
/// `sum_k w_k^2 Var_k`. The exponential estimate uses a first-order expansion
/// with a central-difference Jacobian; if a perturbed refit fails the result is
/// infinite.
pub fn propagate_variance(
    method: FitMethod,
    schedule: &ScalingSchedule,
    variances: &[f64],
    means: &[f64],
) -> Result<f64, ZneError> {
    check_lengths(schedule, variances)?;
    check_lengths(schedule, means)?;
    if variances.iter().any(|v| *v < 0.0) {
        return Err(ZneError::InvalidArgument("negative variance".into()));
    }
    let weighted = |w: Vec<f64>| w.iter().zip(variances).map(|(w, v)| w * w * v).sum();
    match method {
        FitMethod::Linear => Ok(weighted(linear_weights(schedule.factors())?)),
        FitMethod::Richardson => Ok(weighted(richardson_weights(schedule.factors())?)),
        FitMethod::Exponential => {
            fit_exponential(schedule, means)?;
            let mut total = 0.0;
            let mut y = means.to_vec();
            for k in 0..y.len() {
                if variances[k] == 0.0 {
                    continue;
                }
                let h = 1e-6 * means[k].abs().max(1.0);
                y[k] = means[k] + h;
                let up = fit_exponential(schedule, &y);
                y[k] = means[k] - h;
                let down = fit_exponential(schedule, &y);
                y[k] = means[k];
                match (up, down) {
                    (Ok(u), Ok(d)) => {
                        let grad = (u.estimate - d.estimate) / (2.0 * h);
                        total += grad * grad * variances[k];
                    }
                    _ => return Ok(f64::INFINITY),
                }
            }
            Ok(total)
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sched(c: &[f64]) -> ScalingSchedule {
        ScalingSchedule::new(c.to_vec()).unwrap()
    }

    #[test]
    fn richardson_examples() {
        let (est, betas) = fit_richardson(&sched(&[1.0, 2.0, 3.0]), &[2.0, 5.0, 10.0]).unwrap();
        for (b, e) in betas.iter().zip([3.0, -3.0, 1.0]) {
            assert!((b - e).abs() < 1e-12);
        }
        assert!((est - 1.0).abs() < 1e-12);
        let (v, _) = fit_richardson(&sched(&[1.0, 1.25, 1.5]), &[0.4, 0.4, 0.4]).unwrap();
        assert!((v - 0.4).abs() < 1e-14);
        // two points: the line through (1, y1), (2, y2) hits 2 y1 - y2
        let (two, _) = fit_richardson(&sched(&[1.0, 2.0]), &[0.9, 0.8]).unwrap();
        assert!((two - 1.0).abs() < 1e-14);
        assert!(matches!(
            richardson_weights(&[1.0, 1.0]),
            Err(ZneError::DegenerateSchedule(_))
        ));
        assert!(richardson_weights(&[1.0, 2.0, 3.0, 4.0, 5.0]).is_err());
    }

    #[test]
    fn linear_examples() {
        assert!((fit_linear(&sched(&[1.0, 2.0]), &[0.7, 0.5]).unwrap() - 0.9).abs() < 1e-14);
        assert!((fit_linear(&sched(&[1.0, 2.0, 3.0]), &[0.3; 3]).unwrap() - 0.3).abs() < 1e-14);
        let c = [1.0, 1.25, 1.5];
        let y: Vec<f64> = c.iter().map(|c| 3.0 - 0.5 * c).collect();
        assert!((fit_linear(&sched(&c), &y).unwrap() - 3.0).abs() < 1e-12);
        assert!(fit_linear(&sched(&[1.0]), &[0.3]).is_err());
    }

    #[test]
    fn exponential_examples() {
        let model = |c: f64| 0.2 + 0.7 * (-0.9 * c).exp();
        for c in [
            vec![1.0, 2.0, 3.0],
            vec![1.0, 1.25, 1.5],
            vec![1.0, 1.3, 2.9],
            vec![1.0, 2.0, 2.5, 4.0],
        ] {
            let y: Vec<f64> = c.iter().map(|&c| model(c)).collect();
            let fit = fit_exponential(&sched(&c), &y).unwrap();
            assert!((fit.estimate - 0.9).abs() < 1e-9, "{c:?} {fit:?}");
            assert!((fit.rate - 0.9).abs() < 1e-6);
            assert!((fit.offset - 0.2).abs() < 1e-6 && (fit.amplitude - 0.7).abs() < 1e-6);
        }
        let growth: Vec<f64> = [1.0, 2.0, 3.0]
            .iter()
            .map(|c: &f64| 1.0 - 0.1 * (0.3 * c).exp())
            .collect();
        let fit = fit_exponential(&sched(&[1.0, 2.0, 3.0]), &growth).unwrap();
        assert!((fit.estimate - 0.9).abs() < 1e-9);
    }

    #[test]
    fn exponential_failures() {
        let s = sched(&[1.0, 2.0, 3.0]);
        for y in [[0.4, 0.4, 0.4], [0.5, 0.7, 0.4], [0.9, 0.8, 0.7]] {
            assert!(
                matches!(fit_exponential(&s, &y), Err(ZneError::FitNotFound(_))),
                "{y:?}"
            );
        }
        assert!(matches!(
            fit_exponential(&sched(&[1.0, 2.0]), &[0.9, 0.8]),
            Err(ZneError::TooFewPoints { .. })
        ));
        assert!(fit_exponential(&s, &[0.9, 0.8]).is_err());
    }

    #[test]
    fn variance_examples() {
        let s = sched(&[1.0, 2.0, 3.0]);
        let v = 2.5e-7;
        let y = [0.9, 0.85, 0.81];
        let r = propagate_variance(FitMethod::Richardson, &s, &[v; 3], &y).unwrap();
        assert!((r - 19.0 * v).abs() < 1e-18);
        let two = sched(&[1.0, 2.0]);
        let l = propagate_variance(FitMethod::Linear, &two, &[v; 2], &y[..2]).unwrap();
        assert!((l - 5.0 * v).abs() < 1e-18);
        for m in [
            FitMethod::Linear,
            FitMethod::Richardson,
            FitMethod::Exponential,
        ] {
            assert_eq!(propagate_variance(m, &s, &[0.0; 3], &y).unwrap(), 0.0);
        }
    }

    #[test]
    fn exponential_delta_method_matches_analytic_gradient() {
        // y(c) = b + A rho^c with rho = d2 / d1 gives y(0) = y0 - d1 / rho.
        let s = sched(&[1.0, 2.0, 3.0]);
        let y = [0.9, 0.85, 0.81];
        let v = [1e-6, 2e-6, 3e-6];
        let got = propagate_variance(FitMethod::Exponential, &s, &v, &y).unwrap();
        let est = |y: &[f64]| -> f64 {
            let (d1, d2) = (y[1] - y[0], y[2] - y[1]);
            y[0] - d1 * d1 / d2
        };
        let mut oracle = 0.0;
        for k in 0..3 {
            let h = 1e-5;
            let mut up = y;
            up[k] += h;
            let mut down = y;
            down[k] -= h;
            let g = (est(&up) - est(&down)) / (2.0 * h);
            oracle += g * g * v[k];
        }
        assert!((got - oracle).abs() <= 1e-6 * oracle, "{got} {oracle}");
    }
}

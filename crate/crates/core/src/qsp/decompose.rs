//! Layer stripping of a unitary 2x2 Laurent matrix into `E_0 prod_k E_{P_k}(t)`
//! with `E_P(t) = t P + t^{-1} (I - P)`.
//!
//! Matrices are stored on the `t = z^{1/2}` lattice, so a `z^k` coefficient
//! sits at `t^{2k}`. Each step removes one factor from the right.

use num_complex::Complex64;

use super::{Mat2, QspError, QspPhaseSet};
use crate::jacobi_anger::LaurentPolynomial;

/// Leading coefficients below this norm are treated as absent.
pub const DEGENERATE_TOL: f64 = 1e-12;
/// Largest norm of the coefficients discarded by one stripping step.
pub const STRIP_TOL: f64 = 1e-6;

/// `sum_k coeffs[k] t^{min_power + k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixLaurent {
    pub min_power: i64,
    pub coeffs: Vec<Mat2>,
}

impl MatrixLaurent {
    pub fn constant(m: Mat2) -> Self {
        Self {
            min_power: 0,
            coeffs: vec![m],
        }
    }

    pub fn max_power(&self) -> i64 {
        self.min_power + self.coeffs.len() as i64 - 1
    }

    pub fn coefficient(&self, power: i64) -> Mat2 {
        let idx = power - self.min_power;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            Mat2::zeros()
        } else {
            self.coeffs[idx as usize]
        }
    }

    pub fn eval(&self, t: Complex64) -> Mat2 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * t.powi((self.min_power + k as i64) as i32))
            .sum()
    }

    /// `self * E_P(t)`.
    pub fn mul_factor(&self, p: &Mat2) -> Self {
        let q = Mat2::identity() - p;
        let lo = self.min_power - 1;
        let hi = self.max_power() + 1;
        let coeffs = (lo..=hi)
            .map(|k| self.coefficient(k - 1) * p + self.coefficient(k + 1) * q)
            .collect();
        Self {
            min_power: lo,
            coeffs,
        }
    }

    /// `F(z) = a I + i (b X + c Y + d Z)` placed on the `t` lattice.
    pub fn from_components(
        a: &LaurentPolynomial,
        b: &LaurentPolynomial,
        c: &LaurentPolynomial,
        d: &LaurentPolynomial,
    ) -> Self {
        let parts = [a, b, c, d];
        let lo = parts.iter().map(|p| p.min_degree()).min().unwrap_or(0);
        let hi = parts.iter().map(|p| p.max_degree()).max().unwrap_or(0);
        let i = Complex64::new(0.0, 1.0);
        let mut coeffs = Vec::with_capacity((2 * (hi - lo) + 1) as usize);
        for power in 2 * lo..=2 * hi {
            if power % 2 != 0 {
                coeffs.push(Mat2::zeros());
                continue;
            }
            let k = power / 2;
            let (ak, bk, ck, dk) = (
                a.coefficient(k),
                b.coefficient(k),
                c.coefficient(k),
                d.coefficient(k),
            );
            coeffs.push(Mat2::new(
                ak + i * dk,
                i * bk + ck,
                i * bk - ck,
                ak - i * dk,
            ));
        }
        Self {
            min_power: 2 * lo,
            coeffs,
        }
    }
}

/// Decomposes `F = a I + i (b X + c Y + d Z)`, with `F` unitary on `|z| = 1`.
pub fn decompose(
    a: &LaurentPolynomial,
    b: &LaurentPolynomial,
    c: &LaurentPolynomial,
    d: &LaurentPolynomial,
) -> Result<QspPhaseSet, QspError> {
    let degree = [a, b, c, d].iter().map(|p| p.degree()).max().unwrap_or(0);
    let mut f = MatrixLaurent::from_components(a, b, c, d);
    // Pad symmetrically so the lattice spans exactly [-2n, 2n].
    let span = 2 * degree as i64;
    f = MatrixLaurent {
        min_power: -span,
        coeffs: (-span..=span).map(|k| f.coefficient(k)).collect(),
    };
    decompose_matrix(&f)
}

/// Strips `2n` factors from a matrix Laurent polynomial supported on `[-2n, 2n]`.
pub fn decompose_matrix(f: &MatrixLaurent) -> Result<QspPhaseSet, QspError> {
    let span = f.max_power().max(-f.min_power);
    if span % 2 != 0 || f.min_power != -span || f.max_power() != span {
        return Err(QspError::InvalidInput(format!(
            "matrix polynomial must span a symmetric even range, got [{}, {}]",
            f.min_power,
            f.max_power()
        )));
    }
    let scale = f.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let off_lattice = f
        .coeffs
        .iter()
        .enumerate()
        .filter(|(k, _)| k % 2 == 1)
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    if off_lattice > DEGENERATE_TOL * scale.max(1.0) {
        return Err(QspError::InvalidInput("odd powers of t must vanish".into()));
    }
    let layers = span as usize;
    let mut coeffs = f.coeffs.clone();
    let mut projectors = vec![Mat2::zeros(); layers];
    for step in 0..layers {
        let top = *coeffs.last().expect("nonempty");
        let bottom = coeffs[0];
        let p = choose_projector(&top, &bottom);
        let q = Mat2::identity() - p;
        let residual = (top * q).norm() + (bottom * p).norm();
        let layer = layers - step;
        if residual > STRIP_TOL {
            return Err(QspError::DecompositionFailure { layer, residual });
        }
        // F E_P^{-1} = F (t^{-1} P + t (I - P)); new support shrinks by one on each side.
        let next: Vec<Mat2> = (0..coeffs.len() - 2)
            .map(|j| coeffs[j + 2] * p + coeffs[j] * q)
            .collect();
        coeffs = next;
        projectors[layer - 1] = p;
    }
    let e0 = nearest_unitary(&coeffs[0]);
    let deviation = (e0 - coeffs[0]).norm();
    if deviation > STRIP_TOL {
        return Err(QspError::DecompositionFailure {
            layer: 0,
            residual: deviation,
        });
    }
    QspPhaseSet::new(e0, projectors)
}

/// Projector onto the row space of `top`, or onto the complement of the row
/// space of `bottom` when that coefficient dominates.
fn choose_projector(top: &Mat2, bottom: &Mat2) -> Mat2 {
    let (nt, nb) = (top.norm(), bottom.norm());
    if nt < DEGENERATE_TOL && nb < DEGENERATE_TOL {
        return Mat2::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        );
    }
    if nt >= nb {
        rank_one_projector(&dominant_eigenvector(&(top.adjoint() * top)))
    } else {
        Mat2::identity() - rank_one_projector(&dominant_eigenvector(&(bottom.adjoint() * bottom)))
    }
}

fn rank_one_projector(v: &nalgebra::Vector2<Complex64>) -> Mat2 {
    v * v.adjoint()
}

/// Unit eigenvector of the largest eigenvalue of a 2x2 Hermitian matrix.
fn dominant_eigenvector(m: &Mat2) -> nalgebra::Vector2<Complex64> {
    let p = m[(0, 0)].re;
    let r = m[(1, 1)].re;
    let q = m[(0, 1)];
    let half = 0.5 * (p - r);
    let lambda = 0.5 * (p + r) + (half * half + q.norm_sqr()).sqrt();
    let zero = Complex64::new(0.0, 0.0);
    let v1 = nalgebra::Vector2::new(q, Complex64::new(lambda - p, 0.0));
    let v2 = nalgebra::Vector2::new(Complex64::new(lambda - r, 0.0), q.conj());
    let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
    if v.norm() == 0.0 {
        return if p >= r {
            nalgebra::Vector2::new(Complex64::new(1.0, 0.0), zero)
        } else {
            nalgebra::Vector2::new(zero, Complex64::new(1.0, 0.0))
        };
    }
    v / Complex64::new(v.norm(), 0.0)
}

/// Unitary polar factor of an invertible 2x2 matrix.
fn nearest_unitary(m: &Mat2) -> Mat2 {
    let svd = m.svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => u * v_t,
        _ => *m,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi_anger::build_hs_laurent;
    use crate::qsp::complete;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_projector(rng: &mut impl Rng) -> Mat2 {
        let v = nalgebra::Vector2::new(
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        );
        rank_one_projector(&(v / Complex64::new(v.norm(), 0.0)))
    }

    fn random_unitary(rng: &mut impl Rng) -> Mat2 {
        let m = Mat2::from_fn(|_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        nearest_unitary(&m)
    }

    fn max_grid_gap(x: &QspPhaseSet, f: &MatrixLaurent) -> f64 {
        (0..1001)
            .map(|i| {
                let t = Complex64::from_polar(1.0, std::f64::consts::PI * i as f64 / 1000.0);
                (x.evaluate(t) - f.eval(t)).norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn constant_input_has_no_layers() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(&mut rng);
        let phases = decompose_matrix(&MatrixLaurent::constant(u)).unwrap();
        assert!(phases.projectors.is_empty());
        assert!((phases.e0 - u).norm() < 1e-14);
    }

    #[test]
    fn synthesis_then_analysis() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let e0 = random_unitary(&mut rng);
            let projectors: Vec<Mat2> = (0..8).map(|_| random_projector(&mut rng)).collect();
            let original = QspPhaseSet::new(e0, projectors).unwrap();
            let product = original.to_matrix_laurent();
            assert_eq!((product.min_power, product.max_power()), (-8, 8));
            let recovered = decompose_matrix(&product).unwrap();
            assert_eq!(recovered.projectors.len(), 8);
            assert!(max_grid_gap(&recovered, &product) < 1e-10);
            for (p, q) in recovered.projectors.iter().zip(&original.projectors) {
                assert!((p - q).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn expansion_decomposes_into_projectors() {
        let pair = build_hs_laurent(1.0, 2).unwrap();
        let b = pair.b.scale(Complex64::new(-1.0, 0.0));
        let (c, d) = complete(&pair.a, &b).unwrap();
        let phases = decompose(&pair.a, &b, &c, &d).unwrap();
        assert_eq!(phases.projectors.len(), 10);
        for p in &phases.projectors {
            assert!((p * p - p).norm() < 1e-10);
            assert!((p.adjoint() - p).norm() < 1e-10);
            assert!((p.trace().re - 1.0).abs() < 1e-10);
        }
        let f = MatrixLaurent::from_components(&pair.a, &b, &c, &d);
        assert!(max_grid_gap(&phases, &f) < 1e-10);
    }

    #[test]
    fn tiny_tails_round_trip() {
        // At tau = 0.1 the degree-5 coefficients are ~1e-9, so their squares
        // sit far below rounding of 1 - a^2 - b^2.
        let pair = build_hs_laurent(0.1, 2).unwrap();
        let b = pair.b.scale(Complex64::new(-1.0, 0.0));
        let (c, d) = complete(&pair.a, &b).unwrap();
        let phases = decompose(&pair.a, &b, &c, &d).unwrap();
        let f = MatrixLaurent::from_components(&pair.a, &b, &c, &d);
        assert!(max_grid_gap(&phases, &f) < 1e-12);
    }

    #[test]
    fn degenerate_layers_use_default_projector() {
        // z-degree 1 matrix whose t^{±2} coefficients vanish entirely.
        let u = Mat2::identity();
        let f = MatrixLaurent {
            min_power: -2,
            coeffs: vec![
                Mat2::zeros(),
                Mat2::zeros(),
                u,
                Mat2::zeros(),
                Mat2::zeros(),
            ],
        };
        let phases = decompose_matrix(&f).unwrap();
        assert_eq!(phases.projectors.len(), 2);
        assert!(max_grid_gap(&phases, &f) < 1e-14);
    }

    #[test]
    fn non_unitary_input_fails() {
        let m = Mat2::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        );
        let f = MatrixLaurent {
            min_power: -2,
            coeffs: vec![m, Mat2::zeros(), Mat2::zeros(), Mat2::zeros(), m],
        };
        assert!(matches!(
            decompose_matrix(&f),
            Err(QspError::DecompositionFailure { .. })
        ));
    }
}

use std::fmt;

use num_complex::Complex64;

/// Coefficient symmetry under `z -> 1/z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// `c_{-m} = c_m`
    Reciprocal,
    /// `c_{-m} = -c_m`
    AntiReciprocal,
    None,
}

/// Which exponents carry nonzero coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// Laurent polynomial `sum_{k = min_degree}^{max_degree} c_k z^k`.
///
/// Coefficients are complex so that complementary polynomials produced by the
/// completion step, which are real on the unit circle but generally have
/// imaginary coefficients, share the same type as the target pair.
#[derive(Clone, PartialEq)]
pub struct LaurentPolynomial {
    min_degree: i64,
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Laurent[{}..{}]{:?}",
            self.min_degree,
            self.max_degree(),
            self.coeffs
        )
    }
}

impl LaurentPolynomial {
    pub fn new(min_degree: i64, coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            return Self::zero();
        }
        Self { min_degree, coeffs }
    }

    pub fn from_real(min_degree: i64, coeffs: &[f64]) -> Self {
        Self::new(
            min_degree,
            coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        )
    }

    pub fn zero() -> Self {
        Self {
            min_degree: 0,
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self {
            min_degree: 0,
            coeffs: vec![c],
        }
    }

    /// Zero polynomial whose support spans `[-degree, degree]`.
    pub fn zeros_symmetric(degree: usize) -> Self {
        Self {
            min_degree: -(degree as i64),
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * degree + 1],
        }
    }

    pub fn min_degree(&self) -> i64 {
        self.min_degree
    }

    pub fn max_degree(&self) -> i64 {
        self.min_degree + self.coeffs.len() as i64 - 1
    }

    /// `max(|min_degree|, |max_degree|)`.
    pub fn degree(&self) -> usize {
        self.min_degree
            .unsigned_abs()
            .max(self.max_degree().unsigned_abs()) as usize
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^k`; zero outside the stored range.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        let idx = k - self.min_degree;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// Iterator over `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.min_degree + i as i64, c))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        // Horner in z, then shift by z^min_degree.
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * z.powi(self.min_degree as i32)
    }

    /// Value at `z = e^{i theta}`.
    pub fn eval_circle(&self, theta: f64) -> Complex64 {
        self.terms()
            .map(|(k, c)| c * Complex64::from_polar(1.0, k as f64 * theta))
            .sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            min_degree: self.min_degree,
            coeffs: self.coeffs.iter().map(|&c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let lo = self.min_degree.min(other.min_degree);
        let hi = self.max_degree().max(other.max_degree());
        let coeffs = (lo..=hi)
            .map(|k| self.coefficient(k) + other.coefficient(k))
            .collect();
        Self {
            min_degree: lo,
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self {
            min_degree: self.min_degree + other.min_degree,
            coeffs,
        }
    }

    /// `f̄(z) = sum conj(c_k) z^{-k}`; equals `conj(f(z))` on the unit circle.
    pub fn conj_reflect(&self) -> Self {
        let coeffs = self.coeffs.iter().rev().map(|c| c.conj()).collect();
        Self {
            min_degree: -self.max_degree(),
            coeffs,
        }
    }

    /// Multiplies by `z^shift`.
    pub fn shift(&self, shift: i64) -> Self {
        Self {
            min_degree: self.min_degree + shift,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Drops leading and trailing coefficients with magnitude `<= tol`.
    pub fn trim(&self, tol: f64) -> Self {
        let first = self.coeffs.iter().position(|c| c.norm() > tol);
        let Some(first) = first else {
            return Self::zero();
        };
        let last = self
            .coeffs
            .iter()
            .rposition(|c| c.norm() > tol)
            .unwrap_or(first);
        Self {
            min_degree: self.min_degree + first as i64,
            coeffs: self.coeffs[first..=last].to_vec(),
        }
    }

    pub fn symmetry(&self, tol: f64) -> Symmetry {
        let span = self.degree() as i64;
        let reciprocal =
            (0..=span).all(|m| (self.coefficient(-m) - self.coefficient(m)).norm() <= tol);
        if reciprocal {
            return Symmetry::Reciprocal;
        }
        let anti = (0..=span).all(|m| (self.coefficient(-m) + self.coefficient(m)).norm() <= tol);
        if anti {
            Symmetry::AntiReciprocal
        } else {
            Symmetry::None
        }
    }

    pub fn parity(&self, tol: f64) -> Parity {
        let mut even = false;
        let mut odd = false;
        for (k, c) in self.terms() {
            if c.norm() > tol {
                if k.rem_euclid(2) == 0 {
                    even = true;
                } else {
                    odd = true;
                }
            }
        }
        match (even, odd) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Mixed,
        }
    }

    /// `c_{-k} = conj(c_k)` for all `k`, i.e. real values on `|z| = 1`.
    pub fn is_real_on_circle(&self, tol: f64) -> bool {
        let span = self.degree() as i64;
        (0..=span).all(|m| (self.coefficient(-m) - self.coefficient(m).conj()).norm() <= tol)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, c| acc.max(c.norm()))
    }
}

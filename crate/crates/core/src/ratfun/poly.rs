use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real polynomial, coefficients stored highest degree first.
///
/// Leading zeros are trimmed on construction; the zero polynomial is `[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Self {
        let mut coeffs = coeffs.into();
        let first_nonzero = coeffs.iter().position(|&c| c != 0.0);
        match first_nonzero {
            Some(i) => {
                coeffs.drain(..i);
            }
            None => coeffs = vec![0.0],
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `a*s + b`
    pub fn linear(a: f64, b: f64) -> Self {
        Self::new(vec![a, b])
    }

    /// The monomial `s^n`.
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![0.0; n + 1];
        c[0] = 1.0;
        Self { coeffs: c }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Value at `s = 0`.
    pub fn constant_term(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        let n = self.degree();
        if n == 0 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs[..n]
                .iter()
                .enumerate()
                .map(|(i, &c)| c * (n - i) as f64)
                .collect::<Vec<_>>(),
        )
    }

    pub fn scale(&self, k: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect::<Vec<_>>())
    }

    /// Coefficients padded with leading zeros to length `len`.
    pub fn padded(&self, len: usize) -> Vec<f64> {
        assert!(len >= self.coeffs.len());
        let mut out = vec![0.0; len - self.coeffs.len()];
        out.extend_from_slice(&self.coeffs);
        out
    }

    /// All complex roots with multiplicity, conjugate pairs matched exactly.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.is_zero() {
            return Err(Error::InvalidInput("roots of the zero polynomial".into()));
        }
        if !self.is_finite() {
            return Err(Error::InvalidInput("non-finite polynomial coefficient".into()));
        }
        super::roots::find_roots(self)
    }

    /// Residual used to accept a root: `|p(z)| / (|a_n| max(1,|z|)^n)`.
    pub fn scaled_residual(&self, z: Complex64) -> f64 {
        let n = self.degree() as i32;
        self.eval(z).norm() / (self.leading().abs() * z.norm().max(1.0).powi(n))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 && !(first && i == n) {
                continue;
            }
            let p = n - i;
            if !first {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            let a = c.abs();
            match p {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}*s")?,
                _ => write!(f, "{a}*s^{p}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let a = self.padded(len);
        let b = rhs.padded(len);
        Polynomial::new(a.iter().zip(&b).map(|(x, y)| x + y).collect::<Vec<_>>())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Mul, Neg};

use num_complex::Complex64;

use super::poly::Polynomial;
use crate::error::{Error, Result};

/// Below this denominator modulus an evaluation point is treated as a pole.
pub const POLE_GUARD: f64 = 1e-300;

/// Continuous-time SISO rational transfer function `num(s) / den(s)`.
///
/// Algebra never cancels common factors, so the denominator of a product or
/// feedback connection is exactly the polynomial the formula produces.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    num: Polynomial,
    den: Polynomial,
}

impl TransferFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if !num.is_finite() || !den.is_finite() {
            return Err(Error::InvalidInput("non-finite transfer function coefficient".into()));
        }
        Ok(Self { num, den })
    }

    pub fn from_coeffs(num: &[f64], den: &[f64]) -> Result<Self> {
        Self::new(Polynomial::new(num.to_vec()), Polynomial::new(den.to_vec()))
    }

    pub fn constant(k: f64) -> Self {
        Self {
            num: Polynomial::constant(k),
            den: Polynomial::constant(1.0),
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_proper(&self) -> bool {
        self.num.is_zero() || self.num.degree() <= self.den.degree()
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.num.is_zero() || self.num.degree() < self.den.degree()
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    /// Series connection; no cancellation.
    pub fn series(&self, other: &TransferFunction) -> Self {
        Self {
            num: &self.num * &other.num,
            den: &self.den * &other.den,
        }
    }

    /// Negative feedback `g / (1 + g h)` as one rational function.
    pub fn feedback(&self, h: &TransferFunction) -> Result<Self> {
        let num = &self.num * &h.den;
        let den = &(&self.den * &h.den) + &(&self.num * &h.num);
        if den.is_zero() {
            return Err(Error::DegenerateLoop);
        }
        Self::new(num, den)
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let d = self.den.eval(s);
        if d.norm() < POLE_GUARD {
            return Err(Error::PoleOnAxis {
                frequency_hz: s.im / TAU,
            });
        }
        Ok(self.num.eval(s) / d)
    }

    /// Evaluates at `s = j 2 pi f`.
    pub fn freq_eval(&self, f_hz: f64) -> Result<Complex64> {
        if !(f_hz > 0.0) || !f_hz.is_finite() {
            return Err(Error::InvalidInput(format!("frequency must be positive, got {f_hz}")));
        }
        self.eval(Complex64::new(0.0, TAU * f_hz))
    }

    /// Static gain `num(0)/den(0)`.
    pub fn dc_gain(&self) -> Result<f64> {
        self.eval(Complex64::new(0.0, 0.0)).map(|v| v.re)
    }

    pub fn poles(&self) -> Result<Vec<Complex64>> {
        if self.den.degree() == 0 {
            return Ok(Vec::new());
        }
        self.den.roots()
    }

    pub fn zeros(&self) -> Result<Vec<Complex64>> {
        if self.num.is_zero() || self.num.degree() == 0 {
            return Ok(Vec::new());
        }
        self.num.roots()
    }
}

impl Mul for &TransferFunction {
    type Output = TransferFunction;

    fn mul(self, rhs: &TransferFunction) -> TransferFunction {
        self.series(rhs)
    }
}

impl Neg for &TransferFunction {
    type Output = TransferFunction;

    fn neg(self) -> TransferFunction {
        self.scale(-1.0)
    }
}

impl fmt::Display for TransferFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

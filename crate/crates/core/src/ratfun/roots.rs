//! Simultaneous polynomial root iteration (Aberth–Ehrlich).
//!
//! Roots at the origin are split off exactly, the remaining polynomial is made
//! monic, and all roots are refined together. Real-coefficient input is
//! exploited afterwards: near-real roots are snapped to the axis and complex
//! roots are paired with their conjugates so the result is exactly symmetric.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::poly::Polynomial;
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 1000;

/// Acceptance threshold for the scaled residual of every returned root.
pub const RESIDUAL_TOL: f64 = 1e-8;

pub(crate) fn find_roots(p: &Polynomial) -> Result<Vec<Complex64>> {
    let c = p.coeffs();
    let zeros_at_origin = c.iter().rev().take_while(|&&x| x == 0.0).count();
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros_at_origin];

    let reduced = &c[..c.len() - zeros_at_origin];
    let lead = reduced[0];
    let monic: Vec<f64> = reduced.iter().map(|x| x / lead).collect();
    let monic = Polynomial::new(monic);

    let found = match monic.degree() {
        0 => Vec::new(),
        1 => vec![Complex64::new(-monic.coeffs()[1], 0.0)],
        _ => aberth(&monic)?,
    };
    roots.extend(conjugate_cleanup(&monic, found));

    for z in &roots {
        if p.scaled_residual(*z) >= RESIDUAL_TOL {
            return Err(Error::ConvergenceFailure {
                iterations: MAX_ITERATIONS,
            });
        }
    }
    roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(roots)
}

fn aberth(p: &Polynomial) -> Result<Vec<Complex64>> {
    let n = p.degree();
    let dp = p.derivative();
    let mut z = initial_guesses(p);
    let mut done = vec![false; n];

    for _ in 0..MAX_ITERATIONS {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let pv = p.eval(zi);
            if pv.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = pv / dp.eval(zi);
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (zi - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                return Err(Error::ConvergenceFailure {
                    iterations: MAX_ITERATIONS,
                });
            }
            z[i] = zi - step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
    }
    // Multiple roots converge linearly and may hover at rounding level
    // without meeting the step criterion; the residual test decides.
    if z.iter().all(|&zi| p.scaled_residual(zi) < RESIDUAL_TOL) {
        Ok(z)
    } else {
        Err(Error::ConvergenceFailure {
            iterations: MAX_ITERATIONS,
        })
    }
}

/// Points on a circle whose radius is the geometric mean of the root moduli,
/// rotated off the real axis so conjugate symmetry does not stall the iteration.
fn initial_guesses(p: &Polynomial) -> Vec<Complex64> {
    let n = p.degree();
    let c = p.coeffs();
    let c0 = c[n].abs();
    let radius = if c0 > 0.0 {
        c0.powf(1.0 / n as f64)
    } else {
        1.0
    };
    let center = -c[1] / n as f64;
    let radius = radius.max(center.abs()).max(f64::MIN_POSITIVE);
    (0..n)
        .map(|k| {
            let theta = TAU * k as f64 / n as f64 + 0.4;
            Complex64::new(center, 0.0) + Complex64::from_polar(radius, theta)
        })
        .collect()
}

fn conjugate_cleanup(p: &Polynomial, roots: Vec<Complex64>) -> Vec<Complex64> {
    let mut real = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for z in roots {
        let snapped = Complex64::new(z.re, 0.0);
        let tiny_imag = z.im.abs() <= 1e-10 * z.norm().max(1e-300);
        if tiny_imag && p.scaled_residual(snapped) <= p.scaled_residual(z).max(RESIDUAL_TOL * 1e-3) {
            real.push(snapped);
        } else if z.im >= 0.0 {
            upper.push(z);
        } else {
            lower.push(z);
        }
    }

    let mut out = real;
    // pair each upper-half root with the nearest conjugate of a lower-half one
    while let Some(u) = upper.pop() {
        let best = lower
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (a.conj() - u).norm().total_cmp(&(b.conj() - u).norm()))
            .map(|(i, _)| i);
        match best {
            Some(i) => {
                let l = lower.swap_remove(i);
                let avg = (u + l.conj()) * 0.5;
                out.push(avg);
                out.push(avg.conj());
            }
            None => out.push(Complex64::new(u.re, 0.0)),
        }
    }
    // unmatched lower roots can only appear through near-real ambiguity
    out.extend(lower.into_iter().map(|l| Complex64::new(l.re, 0.0)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn linear_factor() {
        let r = Polynomial::linear(1.0, 1.0).roots().unwrap();
        assert_eq!(r, vec![Complex64::new(-1.0, 0.0)]);
    }

    #[test]
    fn quadratic_conjugate_pair() {
        let r = Polynomial::new(vec![1.0, 2.0, 2.0]).roots().unwrap();
        assert_eq!(r.len(), 2);
        assert!(close(r[0], Complex64::new(-1.0, 1.0), 1e-14));
        assert_eq!(r[1], r[0].conj());
    }

    #[test]
    fn roots_at_origin_are_exact() {
        // 0.001 s^2 + s
        let r = Polynomial::new(vec![0.001, 1.0, 0.0]).roots().unwrap();
        assert_eq!(r[0], Complex64::new(0.0, 0.0));
        assert!(close(r[1], Complex64::new(-1000.0, 0.0), 1e-14));
    }

    #[test]
    fn repeated_roots_pass_residual_test() {
        // (s+2)^3
        let p = Polynomial::new(vec![1.0, 6.0, 12.0, 8.0]);
        let r = p.roots().unwrap();
        assert_eq!(r.len(), 3);
        for z in r {
            assert!(p.scaled_residual(z) < RESIDUAL_TOL);
            assert!((z - Complex64::new(-2.0, 0.0)).norm() < 1e-4);
        }
    }

    #[test]
    fn widely_spread_roots() {
        // (s + 1e-3)(s + 1)(s + 1e3)(s^2 + 2s + 1e4)
        let p = [
            Polynomial::linear(1.0, 1e-3),
            Polynomial::linear(1.0, 1.0),
            Polynomial::linear(1.0, 1e3),
            Polynomial::new(vec![1.0, 2.0, 1e4]),
        ]
        .iter()
        .fold(Polynomial::constant(1.0), |acc, f| &acc * f);
        let r = p.roots().unwrap();
        assert_eq!(r.len(), 5);
        let expect = [
            Complex64::new(-1e-3, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(-1.0, 9999f64.sqrt()),
            Complex64::new(-1.0, -(9999f64.sqrt())),
            Complex64::new(-1e3, 0.0),
        ];
        for e in expect {
            assert!(r.iter().any(|z| (z - e).norm() < 1e-8 * e.norm().max(1.0)), "missing {e}");
        }
    }

    #[test]
    fn scaling_coefficients_does_not_change_roots() {
        let p = Polynomial::new(vec![7.54e-5, 0.0754, 2.8, 2000.0]);
        let q = p.scale(1.0 / 7.54e-5);
        let a = p.roots().unwrap();
        let b = q.roots().unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(close(*x, *y, 1e-12));
        }
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert!(Polynomial::zero().roots().is_err());
    }
}

//! Univariate polynomials with exact rational coefficients and real-root
//! extraction (companion-matrix eigenvalues, then Newton polishing in MPFR).

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rug::{Assign, Float};

use crate::error::{invalid, Error, Result};

/// Coefficients stored lowest power first; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![BigRational::zero(), BigRational::from_integer(1.into())])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..len).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn mul_x(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(BigRational::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// `p(-x)`
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        )
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval(&self, x: &Float) -> Float {
        let prec = x.prec();
        let mut acc = Float::new(prec);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += rational_to_float(c, prec);
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Largest coefficient magnitude, as a float.
    pub fn coefficient_scale(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

pub fn rational_to_float(q: &BigRational, prec: u32) -> Float {
    let num = rug::Integer::from_str_radix(&q.numer().to_str_radix(16), 16).expect("valid integer");
    let den = rug::Integer::from_str_radix(&q.denom().to_str_radix(16), 16).expect("valid integer");
    Float::with_val(prec, num) / Float::with_val(prec, den)
}

/// Exact rational value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| invalid(format!("{x} is not a finite number")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealRoots {
    /// Ascending, polished to the requested precision.
    pub roots: Vec<Float>,
    /// Companion eigenvalues rejected as non-real.
    pub discarded_complex: usize,
}

pub const MAX_NEWTON_STEPS: usize = 400;

/// Real roots of `p` at `prec` bits.
///
/// Seeds come from the eigenvalues of the companion matrix in double
/// precision; each real seed is then refined by Newton's method on the
/// exact coefficients. Seeds whose imaginary part exceeds `1e-6 (1 + |z|)`
/// are counted as complex and dropped.
pub fn real_roots(p: &Polynomial, prec: u32) -> Result<RealRoots> {
    let degree = match p.degree() {
        None => return Err(invalid("the zero polynomial has no isolated roots")),
        Some(0) => {
            return Ok(RealRoots {
                roots: Vec::new(),
                discarded_complex: 0,
            })
        }
        Some(d) => d,
    };

    // factor out exact zeros first; the companion matrix of x^k q(x) is singular
    let zero_multiplicity = p.coeffs.iter().take_while(|c| c.is_zero()).count();
    let reduced = Polynomial::new(p.coeffs[zero_multiplicity..].to_vec());
    let mut roots: Vec<Float> = Vec::new();
    if zero_multiplicity > 0 {
        roots.push(Float::new(prec));
    }

    let mut discarded = 0;
    if let Some(d) = reduced.degree().filter(|&d| d > 0) {
        let lead = reduced.coeffs[d].clone();
        let monic: Vec<f64> = reduced.coeffs[..d]
            .iter()
            .map(|c| (c / &lead).to_f64().unwrap_or(f64::NAN))
            .collect();
        if monic.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonConvergence {
                solver: "companion",
                detail: "normalized coefficients overflow f64".into(),
            });
        }
        let companion = DMatrix::from_fn(d, d, |i, j| {
            if j == d - 1 {
                -monic[i]
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        let seeds = companion.complex_eigenvalues();
        let derivative = reduced.derivative();
        for z in seeds.iter() {
            if z.im.abs() > 1e-6 * (1.0 + z.norm()) {
                discarded += 1;
                continue;
            }
            let root = newton_polish(&reduced, &derivative, z.re, prec)?;
            roots.push(root);
        }
    }

    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    // distinct seeds may polish onto the same root
    let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2));
    roots.dedup_by(|a, b| {
        let scale = Float::with_val(prec, b.abs_ref()).max(&Float::with_val(prec, 1));
        Float::with_val(prec, &*a - &*b).abs() <= Float::with_val(prec, &tol * &scale)
    });
    debug_assert!(roots.len() + discarded <= degree);
    Ok(RealRoots {
        roots,
        discarded_complex: discarded,
    })
}

fn newton_polish(p: &Polynomial, dp: &Polynomial, seed: f64, prec: u32) -> Result<Float> {
    let mut x = Float::with_val(prec, seed);
    let mut step = Float::new(prec);
    let eps = Float::with_val(prec, Float::i_exp(1, 8 - prec as i32));
    let mut last_step = f64::INFINITY;
    for _ in 0..MAX_NEWTON_STEPS {
        let value = p.eval(&x);
        if value.is_zero() {
            return Ok(x);
        }
        let slope = dp.eval(&x);
        if slope.is_zero() {
            break;
        }
        step.assign(&value / &slope);
        x -= &step;
        let scale = Float::with_val(prec, x.abs_ref()).max(&Float::with_val(prec, 1));
        if Float::with_val(prec, step.abs_ref()) <= Float::with_val(prec, &eps * &scale) {
            return Ok(x);
        }
        last_step = step.to_f64().abs();
    }
    Err(Error::NonConvergence {
        solver: "newton",
        detail: format!("seed {seed}: last step {last_step:e} after {MAX_NEWTON_STEPS} iterations"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn poly(c: &[i64]) -> Polynomial {
        Polynomial::new(c.iter().map(|&k| q(k, 1)).collect())
    }

    #[test]
    fn arithmetic() {
        let p = poly(&[1, 2, 3]);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.derivative(), poly(&[2, 6]));
        assert_eq!(p.mul_x(), poly(&[0, 1, 2, 3]));
        assert_eq!(p.add(&poly(&[-1, -2, -3])), Polynomial::zero());
        assert_eq!(p.reflect(), poly(&[1, -2, 3]));
        assert_eq!(p.eval_rational(&q(1, 2)), q(11, 4));
        assert_eq!(Polynomial::zero().degree(), None);
    }

    #[test]
    fn roots_of_quadratic_in_extended_precision() {
        // x^2 - 6
        let r = real_roots(&poly(&[-6, 0, 1]), 200).unwrap();
        assert_eq!(r.roots.len(), 2);
        let s6 = Float::with_val(200, 6).sqrt();
        assert!(Float::with_val(200, &r.roots[1] - &s6).abs() < 1e-55);
        assert!(Float::with_val(200, &r.roots[0] + &s6).abs() < 1e-55);
    }

    #[test]
    fn zero_root_and_complex_pair() {
        // x (x^2 + 1) (x - 2) = x^4 - 2x^3 + x^2 - 2x
        let r = real_roots(&poly(&[0, -2, 1, -2, 1]), 128).unwrap();
        assert_eq!(r.discarded_complex, 2);
        assert_eq!(r.roots.len(), 2);
        assert!(r.roots[0].is_zero());
        assert!((r.roots[1].to_f64() - 2.0).abs() < 1e-30);
    }

    #[test]
    fn rational_conversions() {
        let x = rational_from_f64(0.375).unwrap();
        assert_eq!(x, q(3, 8));
        assert!(rational_from_f64(f64::NAN).is_err());
        let f = rational_to_float(&q(1, 3), 200);
        let third = Float::with_val(200, 1) / 3u32;
        assert_eq!(f, third);
    }
}

//! Extended-precision scalars.
//!
//! All extended-precision work is done with MPFR floats ([`rug::Float`]); the
//! precision travels with the values, so a problem built at 300 bits keeps
//! every derived matrix and series at 300 bits.

use rug::Float;

use crate::error::{invalid, Result};
use crate::model::ReducedRadialProblem;

pub const DEFAULT_PRECISION_BITS: u32 = 200;

/// Shortest precision accepted; below this MPFR offers nothing over `f64`.
pub const MIN_PRECISION_BITS: u32 = 53;

pub fn float(prec: u32, value: f64) -> Float {
    Float::with_val(prec, value)
}

pub fn zero(prec: u32) -> Float {
    Float::new(prec)
}

pub fn sqrt_of(prec: u32, value: f64) -> Float {
    Float::with_val(prec, value).sqrt()
}

/// The dimensionless problem `(gamma, delta)` carried at a fixed precision.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedProblem {
    gamma: Float,
    delta: Float,
}

impl ExtendedProblem {
    pub fn new(gamma: Float, delta: Float) -> Result<Self> {
        if gamma.prec() != delta.prec() {
            return Err(invalid(format!(
                "gamma and delta carry different precisions ({} vs {})",
                gamma.prec(),
                delta.prec()
            )));
        }
        if gamma.prec() < MIN_PRECISION_BITS {
            return Err(invalid(format!(
                "precision of {} bits is below the minimum of {MIN_PRECISION_BITS}",
                gamma.prec()
            )));
        }
        if !gamma.is_finite() || gamma <= 0 {
            return Err(invalid(format!("gamma must be positive, got {}", gamma.to_f64())));
        }
        if !delta.is_finite() {
            return Err(invalid("delta must be finite"));
        }
        Ok(Self { gamma, delta })
    }

    pub fn from_f64(gamma: f64, delta: f64, prec: u32) -> Result<Self> {
        Self::new(float(prec, gamma), float(prec, delta))
    }

    pub fn from_reduced(problem: &ReducedRadialProblem, prec: u32) -> Result<Self> {
        Self::from_f64(problem.gamma(), problem.delta(), prec)
    }

    pub fn gamma(&self) -> &Float {
        &self.gamma
    }

    pub fn delta(&self) -> &Float {
        &self.delta
    }

    pub fn prec(&self) -> u32 {
        self.gamma.prec()
    }

    /// Same gamma, reflected Coulomb strength (`f -> -f`).
    pub fn reflected(&self) -> Self {
        Self {
            gamma: self.gamma.clone(),
            delta: Float::with_val(self.prec(), -&self.delta),
        }
    }

    pub fn with_delta(&self, delta: Float) -> Result<Self> {
        Self::new(self.gamma.clone(), Float::with_val(self.prec(), delta))
    }

    pub fn to_reduced(&self) -> ReducedRadialProblem {
        ReducedRadialProblem::from_parts_unchecked(self.gamma.to_f64(), self.delta.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mixed_precision_and_bad_gamma() {
        assert!(ExtendedProblem::new(float(100, 1.0), float(200, 1.0)).is_err());
        assert!(ExtendedProblem::from_f64(0.0, 1.0, 200).is_err());
        assert!(ExtendedProblem::from_f64(-1.0, 1.0, 200).is_err());
        assert!(ExtendedProblem::from_f64(1.0, f64::NAN, 200).is_err());
        assert!(ExtendedProblem::from_f64(1.0, 1.0, 32).is_err());
    }

    #[test]
    fn reflection_flips_delta_only() {
        let p = ExtendedProblem::new(float(200, 1.0), sqrt_of(200, 6.0)).unwrap();
        let r = p.reflected();
        assert_eq!(r.gamma(), p.gamma());
        assert_eq!(Float::with_val(200, r.delta() + p.delta()), 0);
        assert_eq!(r.prec(), 200);
    }
}

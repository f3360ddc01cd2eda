//! Physical parameters, the reduction to the dimensionless radial problem and
//! the map from the eigenvalue `W` back to the relativistic energy.
//!
//! Natural units (`c = hbar = 1`) throughout.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Inputs of the radial Klein-Gordon equation: mass `m`, oscillator
/// frequency `omega`, Coulomb coupling `f` and azimuthal number `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParameters {
    m: f64,
    omega: f64,
    f: f64,
    l: i64,
}

impl PhysicalParameters {
    pub fn new(m: f64, omega: f64, f: f64, l: i64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(invalid(format!("mass must be positive, got {m}")));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(invalid(format!("frequency must be positive, got {omega}")));
        }
        if !f.is_finite() {
            return Err(invalid("coupling f must be finite"));
        }
        if f == 0.0 && l == 0 {
            return Err(invalid("f and l cannot both vanish (gamma would be zero)"));
        }
        Ok(Self { m, omega, f, l })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn l(&self) -> i64 {
        self.l
    }

    /// `gamma = sqrt(l^2 + f^2)`
    pub fn gamma(&self) -> f64 {
        (self.l as f64).hypot(self.f)
    }
}

/// The pair `(gamma, delta)` that fully determines the dimensionless equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedRadialProblem {
    gamma: f64,
    delta: f64,
}

impl ReducedRadialProblem {
    pub fn new(gamma: f64, delta: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(invalid(format!("gamma must be positive, got {gamma}")));
        }
        if !delta.is_finite() {
            return Err(invalid("delta must be finite"));
        }
        Ok(Self { gamma, delta })
    }

    pub(crate) fn from_parts_unchecked(gamma: f64, delta: f64) -> Self {
        Self { gamma, delta }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `alpha = 2 gamma + 1`, the constant appearing in the series recurrence.
    pub fn alpha(&self) -> f64 {
        2.0 * self.gamma + 1.0
    }

    pub fn reflected(&self) -> Self {
        Self {
            gamma: self.gamma,
            delta: -self.delta,
        }
    }
}

/// `gamma = sqrt(l^2 + f^2)`, `delta = 2 m f / sqrt(m omega)`.
pub fn reduce(params: &PhysicalParameters) -> Result<ReducedRadialProblem> {
    let p = PhysicalParameters::new(params.m, params.omega, params.f, params.l)?;
    let delta = 2.0 * p.m * p.f / (p.m * p.omega).sqrt();
    ReducedRadialProblem::new(p.gamma(), delta)
}

/// Oscillator frequency that maps coupling `f` onto the reduced strength
/// `delta`: `omega = 4 m f^2 / delta^2`.
pub fn frequency_from_delta(m: f64, f: f64, delta: f64) -> Result<f64> {
    if !(m.is_finite() && m > 0.0) {
        return Err(invalid(format!("mass must be positive, got {m}")));
    }
    if !f.is_finite() || f == 0.0 {
        return Err(invalid("coupling f must be finite and nonzero"));
    }
    if !delta.is_finite() || delta == 0.0 {
        return Err(invalid("delta = 0 corresponds to no finite frequency"));
    }
    Ok(4.0 * m * f * f / (delta * delta))
}

/// Energy associated with an eigenvalue `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub w: f64,
    pub e_squared: f64,
    /// `(+sqrt(E^2), -sqrt(E^2))`, absent when `E^2 < 0`.
    pub branches: Option<(f64, f64)>,
}

impl EnergyRecord {
    pub fn has_real_energy(&self) -> bool {
        self.branches.is_some()
    }

    pub fn e_plus(&self) -> Option<f64> {
        self.branches.map(|b| b.0)
    }

    pub fn e_minus(&self) -> Option<f64> {
        self.branches.map(|b| b.1)
    }
}

/// `E^2 = m omega W + m^2 - m omega`. A negative `E^2` is reported, not rejected.
pub fn energy_from_w(params: &PhysicalParameters, w: f64) -> Result<EnergyRecord> {
    if !w.is_finite() {
        return Err(Error::InvalidParameter("W must be finite".into()));
    }
    let m_omega = params.m * params.omega;
    let e_squared = m_omega * (w - 1.0) + params.m * params.m;
    let branches = (e_squared >= 0.0).then(|| {
        let e = e_squared.sqrt();
        (e, -e)
    });
    Ok(EnergyRecord {
        w,
        e_squared,
        branches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn reduce_examples() {
        let r = reduce(&PhysicalParameters::new(1.0, 1.0, 1.0, 0).unwrap()).unwrap();
        assert_eq!((r.gamma(), r.delta()), (1.0, 2.0));

        let r = reduce(&PhysicalParameters::new(1.0, 2.0 / 3.0, 1.0, 0).unwrap()).unwrap();
        assert_eq!(r.gamma(), 1.0);
        assert!(close(r.delta(), 6f64.sqrt(), 1e-15));

        let r = reduce(&PhysicalParameters::new(1.0, 1.0, 0.0, 2).unwrap()).unwrap();
        assert_eq!((r.gamma(), r.delta()), (2.0, 0.0));
    }

    #[test]
    fn invalid_physical_parameters() {
        assert!(PhysicalParameters::new(0.0, 1.0, 1.0, 0).is_err());
        assert!(PhysicalParameters::new(-1.0, 1.0, 1.0, 0).is_err());
        assert!(PhysicalParameters::new(1.0, 0.0, 1.0, 0).is_err());
        assert!(PhysicalParameters::new(1.0, -2.0, 1.0, 0).is_err());
        assert!(PhysicalParameters::new(1.0, 1.0, 0.0, 0).is_err());
        assert!(PhysicalParameters::new(1.0, 1.0, f64::INFINITY, 1).is_err());
        assert!(ReducedRadialProblem::new(0.0, 1.0).is_err());
    }

    #[test]
    fn frequency_examples() {
        assert!(close(frequency_from_delta(1.0, 1.0, 6f64.sqrt()).unwrap(), 2.0 / 3.0, 1e-15));
        assert_eq!(frequency_from_delta(1.0, 1.0, 2.0).unwrap(), 1.0);
        // 4 * 2 * 1 / 6
        assert!(close(frequency_from_delta(2.0, -1.0, -(6f64.sqrt())).unwrap(), 4.0 / 3.0, 1e-15));
        assert!(frequency_from_delta(1.0, 1.0, 0.0).is_err());
        assert!(frequency_from_delta(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn energy_examples() {
        let p = PhysicalParameters::new(1.0, 2.0 / 3.0, 1.0, 0).unwrap();
        // beta^2 = m omega W, E^2 = beta^2 + m^2 - m omega
        let independent = |w: f64| (2.0 / 3.0) * w + 1.0 - 2.0 / 3.0;

        let e = energy_from_w(&p, 6.0).unwrap();
        assert!(close(e.e_squared, 13.0 / 3.0, 1e-15));
        assert!(close(e.e_squared, independent(6.0), 1e-15));
        let (plus, minus) = e.branches.unwrap();
        assert_eq!(plus, -minus);
        assert!(close(plus * plus, 13.0 / 3.0, 1e-15));

        for omega in [0.1, 1.0, 7.5] {
            let q = PhysicalParameters::new(1.0, omega, 1.0, 0).unwrap();
            assert!(close(energy_from_w(&q, 1.0).unwrap().e_squared, 1.0, 1e-15));
        }

        let e = energy_from_w(&p, 1.600357154).unwrap();
        assert!(close(e.e_squared, 1.400238103, 1e-9));
        assert!(close(e.e_squared, independent(1.600357154), 1e-15));
    }

    #[test]
    fn negative_energy_squared_is_flagged() {
        let p = PhysicalParameters::new(1.0, 4.0, 1.0, 0).unwrap();
        let e = energy_from_w(&p, -2.0).unwrap();
        assert!(e.e_squared < 0.0);
        assert!(!e.has_real_energy());
        assert!(e.e_plus().is_none());
        assert!(energy_from_w(&p, f64::NAN).is_err());
    }

    #[test]
    fn reflection_properties() {
        let p = PhysicalParameters::new(1.3, 0.7, 0.9, -2).unwrap();
        let q = PhysicalParameters::new(1.3, 0.7, -0.9, 2).unwrap();
        let (rp, rq) = (reduce(&p).unwrap(), reduce(&q).unwrap());
        assert_eq!(rp.gamma(), rq.gamma());
        assert_eq!(rp.delta(), -rq.delta());
        assert_eq!(rp.reflected(), rq);
        assert_eq!(rp.delta().signum(), p.f().signum());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn frequency_round_trip(m in 0.01f64..50.0, omega in 0.01f64..50.0,
                                    f in prop_oneof![-5.0f64..-0.01, 0.01f64..5.0], l in -4i64..5) {
                let p = PhysicalParameters::new(m, omega, f, l).unwrap();
                let r = reduce(&p).unwrap();
                let back = frequency_from_delta(m, f, r.delta()).unwrap();
                prop_assert!((back - omega).abs() <= 1e-12 * omega);
            }

            #[test]
            fn energy_is_affine_with_slope_m_omega(m in 0.1f64..10.0, omega in 0.1f64..10.0,
                                                   w in -20.0f64..20.0, dw in 0.5f64..5.0) {
                let p = PhysicalParameters::new(m, omega, 1.0, 0).unwrap();
                let a = energy_from_w(&p, w).unwrap().e_squared;
                let b = energy_from_w(&p, w + dw).unwrap().e_squared;
                let slope = (b - a) / dw;
                prop_assert!((slope - m * omega).abs() <= 1e-9 * (1.0 + m * omega + a.abs() / dw));
            }
        }
    }
}

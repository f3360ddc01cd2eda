use std::fmt;
use std::str::FromStr;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Truncation,
    RayleighRitz,
    Rpm,
    Oracle,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Truncation => "truncation",
            Method::RayleighRitz => "rr",
            Method::Rpm => "rpm",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "truncation" | "trunc" => Ok(Method::Truncation),
            "rr" | "rayleigh_ritz" | "rayleigh-ritz" => Ok(Method::RayleighRitz),
            "rpm" | "riccati_pade" | "riccati-pade" => Ok(Method::Rpm),
            "oracle" | "fd" => Ok(Method::Oracle),
            other => Err(invalid(format!("unknown method '{other}'"))),
        }
    }
}

/// Size parameter of the computation that produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    /// Rayleigh-Ritz basis size.
    BasisSize(usize),
    /// Largest Hankel determinant dimension.
    HankelDimension(usize),
    /// Interior points of the finer finite-difference grid.
    GridPoints(usize),
    /// Degree of the truncated polynomial solution.
    PolynomialDegree(usize),
}

/// One eigenvalue with its error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub value: Float,
    /// Non-negative; `f64::INFINITY` when no estimate exists.
    pub estimate: f64,
    pub converged: bool,
}

impl Level {
    pub fn w(&self) -> f64 {
        self.value.to_f64()
    }
}

/// Ascending eigenvalues `W_0 < W_1 < ...` from a single method.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub method: Method,
    pub levels: Vec<Level>,
    pub resolution: Resolution,
    /// Working precision in bits (53 for double-precision methods).
    pub precision_bits: u32,
}

impl Spectrum {
    pub fn new(method: Method, mut levels: Vec<Level>, resolution: Resolution, precision_bits: u32) -> Self {
        levels.sort_by(|a, b| a.value.partial_cmp(&b.value).expect("finite eigenvalues"));
        debug_assert!(levels.iter().all(|l| l.estimate >= 0.0 || l.estimate.is_nan()));
        Self {
            method,
            levels,
            resolution,
            precision_bits,
        }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.levels.iter().map(Level::w).collect()
    }

    pub fn value(&self, nu: usize) -> Option<&Float> {
        self.levels.get(nu).map(|l| &l.value)
    }

    pub fn all_converged(&self) -> bool {
        self.levels.iter().all(|l| l.converged)
    }

    pub fn truncated(mut self, count: usize) -> Self {
        self.levels.truncate(count);
        self
    }

    /// Index of the level closest to `w`, if it lies within `tol`.
    pub fn index_of(&self, w: &Float, tol: f64) -> Option<usize> {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, l)| (i, Float::with_val(l.value.prec(), &l.value - w).abs().to_f64()))
            .filter(|&(_, d)| d <= tol)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
    }

    pub fn is_strictly_ascending(&self) -> bool {
        self.levels.windows(2).all(|w| w[0].value < w[1].value)
    }
}

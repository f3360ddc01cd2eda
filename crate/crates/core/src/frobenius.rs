//! Power-series solutions `R(x) = x^gamma exp(-x^2/2) sum_j a_j x^j` and the
//! three-term recurrence for their coefficients,
//!
//! ```text
//! a_{j+2} = [delta a_{j+1} - (theta - 2j) a_j] / [(j+2)(j+1+alpha)],   j >= -1,
//! a_{-1} = 0,  a_0 = 1,  alpha = 2 gamma + 1,  theta = W - 2(gamma + 1).
//! ```
//!
//! The series terminates after `a_n` only when `theta = 2n` and
//! `a_{n+1} = 0`; the second condition is a polynomial equation in `delta`
//! whose roots are the isolated couplings carrying a closed-form level.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rug::ops::Pow;
use rug::{Assign, Float};

use crate::error::{invalid, Result};
use crate::model::frequency_from_delta;
use crate::poly::{rational_from_f64, rational_to_float, real_roots, Polynomial};
use crate::precision::ExtendedProblem;

#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceContext {
    gamma: Float,
    alpha: Float,
    theta: Float,
    delta: Float,
}

impl RecurrenceContext {
    pub fn new(problem: &ExtendedProblem, theta: Float) -> Self {
        let prec = problem.prec();
        let gamma = problem.gamma().clone();
        let alpha = Float::with_val(prec, &gamma * 2u32) + 1u32;
        Self {
            gamma,
            alpha,
            theta: Float::with_val(prec, theta),
            delta: problem.delta().clone(),
        }
    }

    /// Context for a trial eigenvalue: `theta = W - 2(gamma + 1)`.
    pub fn for_eigenvalue(problem: &ExtendedProblem, w: &Float) -> Self {
        let prec = problem.prec();
        let shift = Float::with_val(prec, problem.gamma() + 1u32) * 2u32;
        Self::new(problem, Float::with_val(prec, w - shift))
    }

    pub fn from_f64(gamma: f64, delta: f64, theta: f64, prec: u32) -> Result<Self> {
        let problem = ExtendedProblem::from_f64(gamma, delta, prec)?;
        Ok(Self::new(&problem, Float::with_val(prec, theta)))
    }

    pub fn prec(&self) -> u32 {
        self.gamma.prec()
    }

    pub fn gamma(&self) -> &Float {
        &self.gamma
    }

    pub fn alpha(&self) -> &Float {
        &self.alpha
    }

    pub fn theta(&self) -> &Float {
        &self.theta
    }

    pub fn delta(&self) -> &Float {
        &self.delta
    }

    /// `W = theta + 2(gamma + 1)`
    pub fn eigenvalue(&self) -> Float {
        let prec = self.prec();
        Float::with_val(prec, &self.gamma + 1u32) * 2u32 + &self.theta
    }
}

/// `a_{j+2}` from `a_j` and `a_{j+1}`; `j >= -1`.
pub fn recurrence_step(ctx: &RecurrenceContext, a_j: &Float, a_j1: &Float, j: i64) -> Float {
    debug_assert!(j >= -1);
    let prec = ctx.prec();
    let mut numer = Float::with_val(prec, &ctx.delta * a_j1);
    let mut factor = Float::with_val(prec, &ctx.theta - 2 * j);
    factor *= a_j;
    numer -= &factor;
    // (j+2)(j+1+alpha) > 0 for gamma > 0
    let mut denom = Float::with_val(prec, &ctx.alpha + (j + 1));
    denom *= j + 2;
    numer / denom
}

/// Coefficients `a_0 ..= a_J` of the series solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    context: RecurrenceContext,
    coefficients: Vec<Float>,
}

impl SeriesTable {
    pub fn context(&self) -> &RecurrenceContext {
        &self.context
    }

    pub fn coefficients(&self) -> &[Float] {
        &self.coefficients
    }

    pub fn max_index(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `sum_j a_j x^j` by Horner's rule; any real `x`.
    pub fn polynomial_value(&self, xi: &Float) -> Float {
        let mut acc = Float::new(self.context.prec());
        for a in self.coefficients.iter().rev() {
            acc *= xi;
            acc += a;
        }
        acc
    }

    /// `R(x) = x^gamma exp(-x^2/2) sum_j a_j x^j` for `x > 0`.
    pub fn evaluate_solution(&self, xi: &Float) -> Result<Float> {
        if !(xi.is_finite() && *xi > 0) {
            return Err(invalid("the radial solution is evaluated at positive x only"));
        }
        let prec = self.context.prec();
        let power = Float::with_val(prec, xi.pow(&self.context.gamma));
        let gauss = Float::with_val(prec, -Float::with_val(prec, xi.square_ref()) / 2u32).exp();
        Ok(self.polynomial_value(xi) * power * gauss)
    }

    pub fn evaluate_solution_f64(&self, xi: f64) -> Result<f64> {
        Ok(self.evaluate_solution(&Float::with_val(self.context.prec(), xi))?.to_f64())
    }

    /// Residual of the radial equation for the truncated sum, divided by the
    /// common factor `x^gamma exp(-x^2/2)`, with the largest magnitude among the
    /// individual terms for scaling: `(residual, scale)`.
    pub fn ode_residual(&self, xi: &Float) -> (Float, Float) {
        let prec = self.context.prec();
        let ctx = &self.context;
        let mut p = Float::new(prec);
        let mut dp = Float::new(prec);
        let mut d2p = Float::new(prec);
        for a in self.coefficients.iter().rev() {
            d2p *= xi;
            d2p += Float::with_val(prec, &dp * 2u32);
            dp *= xi;
            dp += &p;
            p *= xi;
            p += a;
        }
        let inv = Float::with_val(prec, xi.recip_ref());
        let inv2 = Float::with_val(prec, inv.square_ref());
        let xi2 = Float::with_val(prec, xi.square_ref());
        // u'/u with u = x^gamma exp(-x^2/2)
        let g = Float::with_val(prec, &ctx.gamma * &inv) - xi;
        let g2 = Float::with_val(prec, g.square_ref());
        let gamma2 = Float::with_val(prec, ctx.gamma.square_ref());
        let w = ctx.eigenvalue();

        let terms = [
            d2p.clone(),
            Float::with_val(prec, &g * &dp) * 2u32,
            Float::with_val(prec, &g2 * &p),
            -Float::with_val(prec, &ctx.gamma * &inv2) * &p,
            -p.clone(),
            Float::with_val(prec, &dp * &inv),
            Float::with_val(prec, &g * &p) * &inv,
            -Float::with_val(prec, &gamma2 * &inv2) * &p,
            -Float::with_val(prec, &ctx.delta * &inv) * &p,
            -Float::with_val(prec, &xi2 * &p),
            Float::with_val(prec, &w * &p),
        ];
        let mut residual = Float::new(prec);
        let mut scale = Float::new(prec);
        for t in &terms {
            residual += t;
            scale.max_mut(&Float::with_val(prec, t.abs_ref()));
        }
        (residual, scale)
    }
}

/// `a_0 ..= a_J` by repeated [`recurrence_step`] from `a_{-1} = 0`, `a_0 = 1`.
pub fn series_coefficients(ctx: &RecurrenceContext, max_index: usize) -> SeriesTable {
    let prec = ctx.prec();
    let mut coefficients = Vec::with_capacity(max_index + 1);
    coefficients.push(Float::with_val(prec, 1));
    let mut prev = Float::new(prec);
    let mut j: i64 = -1;
    while coefficients.len() <= max_index {
        let cur = coefficients.last().expect("a_0 present");
        let next = recurrence_step(ctx, &prev, cur, j);
        prev.assign(cur);
        coefficients.push(next);
        j += 1;
    }
    SeriesTable {
        context: ctx.clone(),
        coefficients,
    }
}

fn rational_int(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

/// `a_{n+1}` as an exact polynomial in `delta` with `theta = 2n`.
///
/// `gamma` is taken at its exact binary value, so the coefficients are
/// rational numbers and carry no rounding.
pub fn truncation_polynomial(gamma: f64, n: usize) -> Result<Polynomial> {
    if n == 0 {
        return Err(invalid("truncation order n must be at least 1"));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(invalid(format!("gamma must be positive, got {gamma}")));
    }
    let gamma_q = rational_from_f64(gamma)?;
    let alpha = gamma_q * rational_int(2) + rational_int(1);
    let theta = rational_int(2 * n as i64);

    let mut prev = Polynomial::zero();
    let mut cur = Polynomial::constant(rational_int(1));
    for j in -1..(n as i64) {
        let denom = rational_int(j + 2) * (rational_int(j + 1) + &alpha);
        let coupling = &theta - rational_int(2 * j);
        let next = cur
            .mul_x()
            .add(&prev.scale(&-coupling))
            .scale(&(rational_int(1) / denom));
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationRoot {
    pub delta: Float,
    /// `delta = 0`, i.e. no Coulomb term at all.
    pub trivial: bool,
    /// `|a_{n+1}(delta)|` relative to the evaluation scale.
    pub relative_residual: f64,
}

impl TruncationRoot {
    pub fn delta_f64(&self) -> f64 {
        self.delta.to_f64()
    }
}

/// Everything the truncation condition yields for a given order `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationFamily {
    pub n: usize,
    pub gamma: f64,
    /// `theta = 2n`
    pub theta: f64,
    /// `W = 2n + 2(gamma + 1)`, at the working precision.
    pub w: Float,
    pub polynomial: Polynomial,
    /// Real roots of `a_{n+1}(delta)`, ascending.
    pub delta_roots: Vec<TruncationRoot>,
    pub discarded_complex: usize,
}

impl TruncationFamily {
    pub fn w_f64(&self) -> f64 {
        self.w.to_f64()
    }

    pub fn nontrivial_roots(&self) -> impl Iterator<Item = &TruncationRoot> {
        self.delta_roots.iter().filter(|r| !r.trivial)
    }

    /// `omega = 4 m f^2 / delta^2` for every nontrivial root, paired with the root.
    pub fn allowed_omegas(&self, m: f64, f: f64) -> Result<Vec<(f64, f64)>> {
        self.nontrivial_roots()
            .map(|r| {
                let d = r.delta_f64();
                frequency_from_delta(m, f, d).map(|w| (d, w))
            })
            .collect()
    }

    /// Problem at one of the roots, at the family's precision.
    pub fn problem_at(&self, root: &TruncationRoot) -> Result<ExtendedProblem> {
        let prec = self.w.prec();
        ExtendedProblem::new(Float::with_val(prec, self.gamma), root.delta.clone())
    }

    /// Polynomial solution at one of the roots, `a_0 ..= a_n`.
    pub fn solution(&self, root: &TruncationRoot) -> Result<SeriesTable> {
        let problem = self.problem_at(root)?;
        let ctx = RecurrenceContext::new(&problem, Float::with_val(self.w.prec(), self.theta));
        Ok(series_coefficients(&ctx, self.n))
    }
}

/// Relative back-substitution tolerance for accepting a root.
pub const ROOT_ACCEPT_TOL: f64 = 1e-10;

/// Solves the truncation condition `theta = 2n`, `a_{n+1}(delta) = 0`.
pub fn truncation_solve(gamma: f64, n: usize, prec: u32) -> Result<TruncationFamily> {
    let polynomial = truncation_polynomial(gamma, n)?;
    let found = real_roots(&polynomial, prec)?;

    let coeff_abs: Vec<Float> = polynomial
        .coeffs()
        .iter()
        .map(|c| rational_to_float(&c.abs(), prec))
        .collect();
    let mut delta_roots = Vec::with_capacity(found.roots.len());
    for delta in found.roots {
        let value = polynomial.eval(&delta).abs();
        let abs_delta = Float::with_val(prec, delta.abs_ref());
        let mut scale = Float::new(prec);
        for c in coeff_abs.iter().rev() {
            scale *= &abs_delta;
            scale += c;
        }
        let relative = if value.is_zero() {
            0.0
        } else {
            Float::with_val(prec, &value / &scale).to_f64()
        };
        if relative.is_nan() || relative >= ROOT_ACCEPT_TOL {
            return Err(crate::Error::NonConvergence {
                solver: "truncation",
                detail: format!(
                    "root delta = {} fails back-substitution: |a_(n+1)| / scale = {relative:e}",
                    delta.to_f64()
                ),
            });
        }
        delta_roots.push(TruncationRoot {
            trivial: delta.is_zero(),
            delta,
            relative_residual: relative,
        });
    }

    let w = Float::with_val(prec, gamma) + 1u32;
    let w = w * 2u32 + 2 * n as u32;
    Ok(TruncationFamily {
        n,
        gamma,
        theta: 2.0 * n as f64,
        w,
        polynomial,
        delta_roots,
        discarded_complex: found.discarded_complex,
    })
}

/// Truncation families (orders `1..=max_order`) whose nontrivial roots lie
/// within `tol` of `delta`.
pub fn families_through(
    gamma: f64,
    delta: f64,
    max_order: usize,
    tol: f64,
    prec: u32,
) -> Result<Vec<(TruncationFamily, usize)>> {
    let mut hits = Vec::new();
    for n in 1..=max_order {
        let family = truncation_solve(gamma, n, prec)?;
        if let Some(idx) = family
            .delta_roots
            .iter()
            .position(|r| !r.trivial && (r.delta_f64() - delta).abs() <= tol * (1.0 + delta.abs()))
        {
            hits.push((family, idx));
        }
    }
    Ok(hits)
}

/// Whether the rational `delta^2` polynomial contains only powers of the
/// parity of `n + 1`.
pub fn has_parity(polynomial: &Polynomial, n: usize) -> bool {
    polynomial
        .coeffs()
        .iter()
        .enumerate()
        .all(|(k, c)| c.is_zero() || k % 2 == (n + 1) % 2)
}

//! Rayleigh-Ritz upper bounds in the non-orthogonal basis
//! `u_j(x) = x^(gamma+j) exp(-x^2/2)`, `j = 0..N-1`.
//!
//! With the measure `x dx` and one integration by parts, every matrix
//! element reduces to the moments `M(p) = int_0^inf x^p exp(-x^2) dx =
//! Gamma((p+1)/2)/2`. Writing `q = 2 gamma + i + j`:
//!
//! ```text
//! S_ij = M(q+1)
//! H_ij = [(gamma+i)(gamma+j) + gamma^2] M(q-1) + delta M(q) - q M(q+1) + 2 M(q+3)
//! ```
//!
//! The Gram matrix of this basis is badly conditioned (it behaves like a
//! Hilbert matrix), which is why everything runs in MPFR precision.

use rug::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::{cholesky, congruence_reduce, jacobi_eigenvalues, FloatMatrix};
use crate::precision::ExtendedProblem;
use crate::spectrum::{Level, Method, Resolution, Spectrum};

/// `M(p) = Gamma((p+1)/2) / 2`, defined for `p > -1`.
pub fn moment(p: &Float) -> Result<Float> {
    if !(p.is_finite() && *p > -1) {
        return Err(invalid(format!(
            "moment of order {} diverges (requires p > -1)",
            p.to_f64()
        )));
    }
    let prec = p.prec();
    Ok((Float::with_val(prec, p + 1u32) / 2u32).gamma() / 2u32)
}

pub fn moment_f64(p: f64, prec: u32) -> Result<f64> {
    moment(&Float::with_val(prec, p)).map(|m| m.to_f64())
}

/// Moments `M(2 gamma + s)` for `s = -1 ..= max_shift`.
///
/// Only the first two entries go through the Gamma function; the rest follow
/// from `M(p+2) = (p+1)/2 M(p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    gamma: Float,
    entries: Vec<Float>,
}

impl MomentTable {
    pub fn new(gamma: &Float, max_shift: usize) -> Result<Self> {
        if !(gamma.is_finite() && *gamma > 0) {
            return Err(invalid("moment table requires gamma > 0"));
        }
        let prec = gamma.prec();
        let two_gamma = Float::with_val(prec, gamma * 2u32);
        let count = max_shift + 2;
        let mut entries = Vec::with_capacity(count);
        entries.push(moment(&Float::with_val(prec, &two_gamma - 1u32))?);
        entries.push(moment(&two_gamma)?);
        for k in 2..count {
            // p = 2 gamma + (k - 3), the order two steps back
            let p = Float::with_val(prec, &two_gamma + (k as i64 - 3));
            let factor = (p + 1u32) / 2u32;
            let next = Float::with_val(prec, &entries[k - 2] * &factor);
            entries.push(next);
        }
        Ok(Self {
            gamma: gamma.clone(),
            entries,
        })
    }

    pub fn gamma(&self) -> &Float {
        &self.gamma
    }

    /// `M(2 gamma + shift)`, `shift >= -1`.
    pub fn get(&self, shift: i64) -> &Float {
        &self.entries[(shift + 1) as usize]
    }

    pub fn max_shift(&self) -> i64 {
        self.entries.len() as i64 - 2
    }
}

/// Overlap and Hamiltonian matrices for one basis size.
#[derive(Debug, Clone, PartialEq)]
pub struct RitzMatrices {
    pub problem: ExtendedProblem,
    pub overlap: FloatMatrix,
    pub hamiltonian: FloatMatrix,
}

impl RitzMatrices {
    pub fn basis_size(&self) -> usize {
        self.overlap.dim()
    }

    pub fn precision_bits(&self) -> u32 {
        self.overlap.prec()
    }
}

pub fn build_matrices(problem: &ExtendedProblem, basis_size: usize) -> Result<RitzMatrices> {
    if basis_size == 0 {
        return Err(invalid("basis size must be at least 1"));
    }
    let prec = problem.prec();
    let gamma = problem.gamma();
    let delta = problem.delta();
    let moments = MomentTable::new(gamma, 2 * basis_size + 1)?;
    let gamma_sq = Float::with_val(prec, gamma.square_ref());

    let overlap = FloatMatrix::from_fn(basis_size, prec, |i, j| moments.get((i + j + 1) as i64).clone());
    let hamiltonian = FloatMatrix::from_fn(basis_size, prec, |i, j| {
        let s = (i + j) as i64;
        let gi = Float::with_val(prec, gamma + i as u32);
        let gj = Float::with_val(prec, gamma + j as u32);
        let q = Float::with_val(prec, gamma * 2u32) + s;
        let mut h = (gi * gj + &gamma_sq) * moments.get(s - 1);
        h += Float::with_val(prec, delta * moments.get(s));
        h -= q * moments.get(s + 1);
        h += Float::with_val(prec, moments.get(s + 3) * 2u32);
        h
    });
    Ok(RitzMatrices {
        problem: problem.clone(),
        overlap,
        hamiltonian,
    })
}

/// All `N` generalized eigenvalues of `H c = W S c`, ascending.
///
/// The returned levels carry no error estimate (`estimate = inf`).
pub fn solve_generalized(matrices: &RitzMatrices) -> Result<Spectrum> {
    let n = matrices.basis_size();
    let prec = matrices.precision_bits();
    let l = cholesky(&matrices.overlap).ok_or(Error::PrecisionInsufficient {
        basis_size: n,
        precision_bits: prec,
    })?;
    let reduced = congruence_reduce(&l, &matrices.hamiltonian);
    let values = jacobi_eigenvalues(&reduced)?;
    let levels = values
        .into_iter()
        .map(|value| Level {
            value,
            estimate: f64::INFINITY,
            converged: false,
        })
        .collect();
    Ok(Spectrum::new(Method::RayleighRitz, levels, Resolution::BasisSize(n), prec))
}

pub fn ritz_values(problem: &ExtendedProblem, basis_size: usize) -> Result<Spectrum> {
    solve_generalized(&build_matrices(problem, basis_size)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceOptions {
    pub step: usize,
    pub max_basis: usize,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            step: 5,
            max_basis: 60,
        }
    }
}

/// Grows the basis in steps until the lowest `target_count` eigenvalues
/// move by less than `tol` between successive sizes.
///
/// Every returned level carries `|W(N) - W(N - step)|` as its estimate
/// (infinite for levels absent at the smaller size). When the basis cap is
/// hit, or the overlap matrix stops being numerically positive definite,
/// the last successful spectrum is returned with `converged = false`.
pub fn converge_spectrum(
    problem: &ExtendedProblem,
    target_count: usize,
    tol: f64,
    options: ConvergenceOptions,
) -> Result<Spectrum> {
    if target_count == 0 {
        return Err(invalid("target count must be at least 1"));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    if options.step == 0 {
        return Err(invalid("basis step must be positive"));
    }
    let prec = problem.prec();
    let first = options.step * target_count.div_ceil(options.step);
    if first > options.max_basis {
        return Err(invalid(format!(
            "{target_count} levels need at least {first} basis functions, above the cap of {}",
            options.max_basis
        )));
    }

    let mut previous: Option<Spectrum> = None;
    let mut n = first;
    while n <= options.max_basis {
        let current = match ritz_values(problem, n) {
            Ok(s) => s,
            Err(Error::PrecisionInsufficient { .. }) if previous.is_some() => break,
            Err(e) => return Err(e),
        };
        if let Some(prev) = &previous {
            let spectrum = with_estimates(current, prev, tol, prec);
            if spectrum.levels[..target_count].iter().all(|l| l.converged) {
                return Ok(spectrum);
            }
            previous = Some(spectrum);
        } else {
            previous = Some(current);
        }
        n += options.step;
    }
    let mut last = previous.expect("at least one basis size evaluated");
    for level in &mut last.levels {
        level.converged = false;
    }
    Ok(last)
}

fn with_estimates(mut current: Spectrum, previous: &Spectrum, tol: f64, prec: u32) -> Spectrum {
    for (nu, level) in current.levels.iter_mut().enumerate() {
        match previous.value(nu) {
            Some(prev) => {
                let moved = Float::with_val(prec, &level.value - prev).abs().to_f64();
                level.estimate = moved;
                level.converged = moved < tol;
            }
            None => {
                level.estimate = f64::INFINITY;
                level.converged = false;
            }
        }
    }
    current
}

//! Brute-force finite-difference eigenvalues, independent of the series
//! machinery. With `R = ξ^{-1/2} φ` the radial equation becomes
//!
//! ```text
//! -φ'' + [ξ² + δ/ξ + (γ² − ¼)/ξ²] φ = W φ,   φ(ξ_min) = φ(ξ_max) = 0,
//! ```
//!
//! discretized with the three-point Laplacian and solved by Sturm-sequence
//! bisection in double precision. The centrifugal term is taken in the form
//! that the stencil reproduces exactly on the regular power `ξ^{γ+½}`.

use rug::Float;

use crate::error::{invalid, Error, Result};
use crate::model::ReducedRadialProblem;
use crate::spectrum::{Level, Method, Resolution, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdGrid {
    pub xi_min: f64,
    pub xi_max: f64,
    /// Interior points.
    pub num_points: usize,
}

pub const MIN_GRID_POINTS: usize = 100;

impl Default for FdGrid {
    /// The inner wall shifts levels by roughly `xi_min^{2γ}`, which is
    /// visible near `γ = ½` unless `xi_min` is tiny.
    fn default() -> Self {
        Self { xi_min: 1e-10, xi_max: 12.0, num_points: 4000 }
    }
}

impl FdGrid {
    pub fn new(xi_min: f64, xi_max: f64, num_points: usize) -> Result<Self> {
        let grid = Self { xi_min, xi_max, num_points };
        grid.validate()?;
        Ok(grid)
    }

    fn validate(&self) -> Result<()> {
        if !(self.xi_min > 0.0 && self.xi_min < self.xi_max && self.xi_max.is_finite()) {
            return Err(invalid(format!("grid needs 0 < xi_min < xi_max, got [{}, {}]", self.xi_min, self.xi_max)));
        }
        if self.num_points < MIN_GRID_POINTS {
            return Err(invalid(format!("grid needs at least {MIN_GRID_POINTS} points, got {}", self.num_points)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.xi_max - self.xi_min) / (self.num_points + 1) as f64
    }

    /// Same interval, half the spacing.
    pub fn halved(&self) -> Self {
        Self { num_points: 2 * self.num_points + 1, ..*self }
    }

    pub fn abscissa(&self, i: usize) -> f64 {
        self.xi_min + (i + 1) as f64 * self.spacing()
    }
}

/// `(γ² − ¼)/ξ²` replaced by the value that makes the three-point stencil
/// exact on `ξ^s`, `s = γ + ½`. It tends to `s(s − 1)/ξ²` for `h ≪ ξ` and
/// restores second-order convergence for `γ < 1`, where the plain stencil
/// only reaches `O(h^{2γ})`.
fn centrifugal(s: f64, x: f64, h: f64) -> f64 {
    let t = h / x;
    let up = (s * t.ln_1p()).exp_m1();
    let down = (s * (-t).ln_1p()).exp_m1();
    (up + down) / (h * h)
}

struct Tridiagonal {
    diag: Vec<f64>,
    off_sq: f64,
}

impl Tridiagonal {
    fn assemble(problem: &ReducedRadialProblem, grid: &FdGrid) -> Self {
        let h = grid.spacing();
        let (g, d) = (problem.gamma(), problem.delta());
        let s = g + 0.5;
        let diag = (0..grid.num_points)
            .map(|i| {
                let x = grid.abscissa(i);
                2.0 / (h * h) + x * x + d / x + centrifugal(s, x, h)
            })
            .collect();
        let off = 1.0 / (h * h);
        Self { diag, off_sq: off * off }
    }

    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            q = if i == 0 { d - x } else { d - x - self.off_sq / q };
            if q == 0.0 {
                q = f64::EPSILON * (d.abs() + x.abs()).max(1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn lower_bound(&self) -> f64 {
        let reach = 2.0 * self.off_sq.sqrt();
        self.diag.iter().fold(f64::INFINITY, |m, &d| m.min(d - reach))
    }

    /// `k`-th smallest eigenvalue (0-based) by bisection.
    fn eigenvalue(&self, k: usize, floor: f64) -> f64 {
        let mut lo = floor;
        let mut step = 1.0;
        let mut hi = lo.max(0.0) + step;
        while self.count_below(hi) <= k {
            lo = hi;
            step *= 2.0;
            hi += step;
        }
        while hi - lo > 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Lowest `count` eigenvalues on a single grid, without extrapolation.
pub fn fd_eigenvalues(problem: &ReducedRadialProblem, grid: &FdGrid, count: usize) -> Result<Vec<f64>> {
    grid.validate()?;
    if count == 0 {
        return Err(invalid("count must be at least 1"));
    }
    if count > grid.num_points {
        return Err(Error::GridTooCoarse { requested: count, points: grid.num_points });
    }
    let matrix = Tridiagonal::assemble(problem, grid);
    let mut floor = matrix.lower_bound();
    let mut values = Vec::with_capacity(count);
    for k in 0..count {
        let w = matrix.eigenvalue(k, floor);
        floor = floor.max(w - 1.0);
        values.push(w);
    }
    Ok(values)
}

/// Richardson-extrapolated eigenvalues from grids `h` and `h/2`; each level
/// carries `|W_h − W_{h/2}|/3` as its error estimate.
pub fn fd_spectrum(problem: &ReducedRadialProblem, grid: &FdGrid, count: usize) -> Result<Spectrum> {
    let fine_grid = grid.halved();
    let coarse = fd_eigenvalues(problem, grid, count)?;
    let fine = fd_eigenvalues(problem, &fine_grid, count)?;
    let levels = coarse
        .iter()
        .zip(&fine)
        .map(|(&wh, &wh2)| Level {
            value: Float::with_val(53, (4.0 * wh2 - wh) / 3.0),
            estimate: (wh - wh2).abs() / 3.0,
            converged: true,
        })
        .collect();
    Ok(Spectrum::new(Method::Oracle, levels, Resolution::GridPoints(fine_grid.num_points), 53))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetryRow {
    pub nu: usize,
    pub plus: f64,
    pub minus: f64,
    pub difference: f64,
}

/// `W_ν(δ)` against `W_ν(−δ)` on the default grid.
pub fn asymmetry_check(gamma: f64, delta: f64, count: usize) -> Result<Vec<AsymmetryRow>> {
    if delta == 0.0 {
        return Err(invalid("asymmetry check needs delta != 0"));
    }
    let grid = FdGrid::default();
    let plus = fd_spectrum(&ReducedRadialProblem::new(gamma, delta)?, &grid, count)?.values();
    let minus = fd_spectrum(&ReducedRadialProblem::new(gamma, -delta)?, &grid, count)?.values();
    Ok(plus
        .into_iter()
        .zip(minus)
        .enumerate()
        .map(|(nu, (p, m))| AsymmetryRow { nu, plus: p, minus: m, difference: p - m })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(gamma: f64, delta: f64) -> ReducedRadialProblem {
        ReducedRadialProblem::new(gamma, delta).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(FdGrid::new(0.0, 12.0, 4000).is_err());
        assert!(FdGrid::new(1.0, 0.5, 4000).is_err());
        assert!(FdGrid::new(1e-4, 12.0, 99).is_err());
        let g = FdGrid::new(1e-4, 12.0, 100).unwrap();
        assert!((g.spacing() - (12.0 - 1e-4) / 101.0).abs() < 1e-15);
        assert!((g.halved().spacing() - g.spacing() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn centrifugal_limit() {
        for g in [0.5, 0.7, 1.0, 2.5] {
            let s = g + 0.5;
            let (x, h) = (2.0, 1e-3);
            let exact = (g * g - 0.25) / (x * x);
            assert!((centrifugal(s, x, h) - exact).abs() < 1e-6 * exact.abs().max(1.0));
            // the stencil annihilates x^s
            let (xm, x0, xp) = (x - h, x, x + h);
            let lap = (xp.powf(s) - 2.0 * x0.powf(s) + xm.powf(s)) / (h * h);
            assert!((lap - centrifugal(s, x, h) * x0.powf(s)).abs() < 1e-8);
        }
    }

    #[test]
    fn too_many_levels() {
        let g = FdGrid::new(1e-4, 12.0, 100).unwrap();
        assert!(matches!(
            fd_eigenvalues(&problem(1.0, 0.0), &g, 101),
            Err(Error::GridTooCoarse { requested: 101, points: 100 })
        ));
        assert!(fd_eigenvalues(&problem(1.0, 0.0), &g, 0).is_err());
    }

    #[test]
    fn sturm_count_matches_dense_solve() {
        let g = FdGrid::new(0.01, 8.0, 120).unwrap();
        let p = problem(1.5, -2.0);
        let m = Tridiagonal::assemble(&p, &g);
        let off = -m.off_sq.sqrt();
        let n = g.num_points;
        let dense = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                m.diag[i]
            } else if i.abs_diff(j) == 1 {
                off
            } else {
                0.0
            }
        });
        let mut reference: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        let ours = fd_eigenvalues(&p, &g, 5).unwrap();
        for (a, b) in ours.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn oscillator_levels() {
        // δ = 0: W = 2(γ + 1) + 4k
        let s = fd_spectrum(&problem(1.0, 0.0), &FdGrid::default(), 3).unwrap();
        for (k, w) in s.values().iter().enumerate() {
            assert!((w - (4.0 + 4.0 * k as f64)).abs() < 1e-6, "{k}: {w}");
        }
    }

    #[test]
    fn asymmetry_requires_nonzero_delta() {
        assert!(asymmetry_check(1.0, 0.0, 1).is_err());
    }
}

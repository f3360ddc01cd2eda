//! Riccati-Pade method.
//!
//! With `R = x^(-1/2) phi` the radial equation becomes
//! `phi'' + [W - x^2 - delta/x - (gamma^2 - 1/4)/x^2] phi = 0`. The regularized
//! logarithmic derivative `f(x) = (gamma + 1/2)/x - phi'/phi` is analytic at the
//! origin, `f = sum_k f_k x^k`, and its Taylor coefficients obey
//!
//! ```text
//! f_0     = -delta / (2 gamma + 1)
//! f_{k+1} = [sum_{i=0..k} f_i f_{k-i} - b_k] / (k + 2 gamma + 2),   b_0 = -W, b_2 = 1, else 0.
//! ```
//!
//! Eigenvalues are limits of roots of the Hankel determinants
//! `H_D^d(W) = det[f_{d+i+j+1}]_{i,j<D}` as `D` grows.
//!
//! Since `f_k(-delta) = (-1)^(k+1) f_k(delta)`, `H_D^d` is the same function of
//! `W` for `delta` and `-delta` up to sign: its roots approximate both spectra
//! at once. Each root is therefore attributed by checking on which half-line
//! the series solution decays (see [`side_amplitude_ratio`]).

use rug::{Assign, Float};

use crate::error::{invalid, Error, Result};
use crate::frobenius::{series_coefficients, RecurrenceContext};
use crate::linalg::{determinant, FloatMatrix};
use crate::precision::ExtendedProblem;
use crate::spectrum::{Level, Method, Resolution, Spectrum};

#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiSeries {
    pub problem: ExtendedProblem,
    pub w: Float,
    pub coeffs: Vec<Float>,
}

impl RiccatiSeries {
    pub fn max_index(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// `f_0 ..= f_K` for trial eigenvalue `w`.
pub fn riccati_coefficients(problem: &ExtendedProblem, w: &Float, max_index: usize) -> Result<RiccatiSeries> {
    if max_index < 1 {
        return Err(invalid("at least two Riccati coefficients are required"));
    }
    let prec = problem.prec();
    let two_gamma = Float::with_val(prec, problem.gamma() * 2u32);
    let mut coeffs: Vec<Float> = Vec::with_capacity(max_index + 1);
    coeffs.push(-Float::with_val(prec, problem.delta() / Float::with_val(prec, &two_gamma + 1u32)));
    let mut acc = Float::new(prec);
    let mut term = Float::new(prec);
    for k in 0..max_index {
        acc.assign(0);
        for i in 0..=k {
            term.assign(&coeffs[i] * &coeffs[k - i]);
            acc += &term;
        }
        match k {
            0 => acc += w,
            2 => acc -= 1u32,
            _ => {}
        }
        let denom = Float::with_val(prec, &two_gamma + (k as u32 + 2));
        coeffs.push(Float::with_val(prec, &acc / &denom));
    }
    Ok(RiccatiSeries {
        problem: problem.clone(),
        w: Float::with_val(prec, w),
        coeffs,
    })
}

/// Dimension `D` and shift `d` of `H_D^d = det[f_{d+i+j+1}]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HankelSpec {
    pub dimension: usize,
    pub shift: usize,
}

impl HankelSpec {
    pub fn new(dimension: usize, shift: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("Hankel dimension must be at least 1"));
        }
        Ok(Self { dimension, shift })
    }

    /// Highest Taylor index the determinant touches.
    pub fn max_index(&self) -> usize {
        self.shift + 2 * self.dimension - 1
    }
}

pub fn hankel_determinant(series: &RiccatiSeries, spec: HankelSpec) -> Result<Float> {
    let needed = spec.max_index() + 1;
    if series.coeffs.len() < needed {
        return Err(Error::InsufficientCoefficients {
            needed,
            available: series.coeffs.len(),
        });
    }
    Ok(hankel_unchecked(&series.coeffs, spec))
}

fn hankel_unchecked(coeffs: &[Float], spec: HankelSpec) -> Float {
    let prec = coeffs[0].prec();
    let m = FloatMatrix::from_fn(spec.dimension, prec, |i, j| coeffs[spec.shift + i + j + 1].clone());
    determinant(&m)
}

/// `H_D^d(w)` computed from scratch.
pub fn hankel_at(problem: &ExtendedProblem, w: &Float, spec: HankelSpec) -> Result<Float> {
    let series = riccati_coefficients(problem, w, spec.max_index().max(1))?;
    hankel_determinant(&series, spec)
}

/// Growth of the series solution on the half-line `sign * x > 0`.
///
/// Returns `|P(sX; w)| / |P(sX; w + h)|` where `P` is the Frobenius sum
/// `sum_j a_j x^j` at `X = probe`. Away from an eigenvalue of that side the
/// sum grows like `exp(X^2)` with a smooth amplitude and the ratio is close
/// to one; at an eigenvalue the growing amplitude vanishes and the ratio is
/// of order `|w - W_exact| / h`. The negative half-line corresponds to the
/// problem with `-delta`.
pub fn side_amplitude_ratio(problem: &ExtendedProblem, w: &Float, sign: i32, probe: f64, h: f64) -> f64 {
    let prec = problem.prec();
    let terms = (4.0 * probe * probe).ceil() as usize + 100;
    let x = Float::with_val(prec, probe * sign.signum() as f64);
    let amplitude = |trial: &Float| {
        let ctx = RecurrenceContext::for_eigenvalue(problem, trial);
        series_coefficients(&ctx, terms).polynomial_value(&x).abs()
    };
    let at = amplitude(w);
    let shifted = amplitude(&Float::with_val(prec, w + h));
    if shifted.is_zero() {
        return f64::INFINITY;
    }
    Float::with_val(prec, &at / &shifted).to_f64()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RpmOptions {
    /// Largest Hankel dimension `D`; scanning starts at `D = 2`.
    pub max_dimension: usize,
    /// Hankel shift `d`.
    pub shift: usize,
    /// Roots whose movement between the last two dimensions stays below
    /// `tol` are flagged converged.
    pub tol: f64,
    /// Roots moving more than this between the last two dimensions are
    /// treated as spurious and dropped.
    pub keep_tol: f64,
    /// Uniform grid points across the search interval.
    pub grid_points: usize,
    /// Probe abscissa and step for [`side_amplitude_ratio`].
    pub side_probe: f64,
    pub side_step: f64,
}

impl Default for RpmOptions {
    fn default() -> Self {
        Self {
            max_dimension: 10,
            shift: 1,
            tol: 1e-8,
            keep_tol: 1e-3,
            grid_points: 400,
            side_probe: 6.0,
            side_step: 0.05,
        }
    }
}

/// Roots of one Hankel dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionRoots {
    pub dimension: usize,
    pub roots: Vec<Float>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RpmOutcome {
    /// Roots attributed to the requested `delta`.
    pub spectrum: Spectrum,
    /// Roots attributed to `-delta` (same determinant, other half-line).
    pub reflected: Spectrum,
    /// Roots per dimension, `D = 2 ..= max_dimension`.
    pub history: Vec<DimensionRoots>,
    pub diagnostics: Vec<String>,
}

impl RpmOutcome {
    /// Nearest-neighbour chain of `root` back through the history,
    /// stopping at the first dimension without a root within `gate`.
    pub fn track(&self, root: &Float, gate: f64) -> Vec<(usize, Float)> {
        let mut chain = Vec::new();
        let mut current = root.clone();
        for dim in self.history.iter().rev() {
            match nearest(&dim.roots, &current) {
                Some((r, dist)) if dist <= gate => {
                    current = r.clone();
                    chain.push((dim.dimension, r.clone()));
                }
                _ => break,
            }
        }
        chain.reverse();
        chain
    }
}

fn nearest<'a>(roots: &'a [Float], x: &Float) -> Option<(&'a Float, f64)> {
    roots
        .iter()
        .map(|r| (r, Float::with_val(x.prec(), r - x).abs().to_f64()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// Eigenvalues in `[w_lo, w_hi]` from the Hankel root sequences.
pub fn rpm_spectrum(problem: &ExtendedProblem, interval: (f64, f64), options: &RpmOptions) -> Result<RpmOutcome> {
    let (lo, hi) = interval;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(invalid(format!("search interval [{lo}, {hi}] is empty")));
    }
    if options.max_dimension < 2 {
        return Err(invalid("the maximum Hankel dimension must be at least 2"));
    }
    if options.grid_points < 2 {
        return Err(invalid("the scan grid needs at least two points"));
    }
    if !(options.tol > 0.0 && options.keep_tol >= options.tol) {
        return Err(invalid("tolerances must satisfy 0 < tol <= keep_tol"));
    }

    let prec = problem.prec();
    let dims: Vec<usize> = (2..=options.max_dimension).collect();
    let max_index = options.shift + 2 * options.max_dimension - 1;
    let n = options.grid_points;
    let grid: Vec<Float> = (0..=n)
        .map(|i| Float::with_val(prec, lo + (hi - lo) * i as f64 / n as f64))
        .collect();

    // one Taylor series per grid point serves every dimension
    let mut table: Vec<Vec<Float>> = vec![Vec::with_capacity(n + 1); dims.len()];
    for w in &grid {
        let series = riccati_coefficients(problem, w, max_index)?;
        for (slot, &dim) in table.iter_mut().zip(&dims) {
            slot.push(hankel_unchecked(&series.coeffs, HankelSpec { dimension: dim, shift: options.shift }));
        }
    }

    let refine_tol = (options.tol * 1e-4).max(f64::powi(2.0, -(prec as i32) / 2));
    let mut diagnostics = Vec::new();
    let mut history: Vec<DimensionRoots> = Vec::with_capacity(dims.len());
    for (values, &dim) in table.iter().zip(&dims) {
        let spec = HankelSpec { dimension: dim, shift: options.shift };
        let eval = |w: &Float| hankel_at(problem, w, spec).expect("series sized for spec");
        let mut notes = Vec::new();
        let mut roots = scan_roots(&grid, values, &eval, refine_tol, &mut notes);
        if dim == options.max_dimension {
            diagnostics.extend(notes.into_iter().map(|n| format!("D={dim}: {n}")));
        }
        if let Some(prev) = history.last() {
            for seed in &prev.roots {
                // nested windows expose pairs hidden next to a crossing
                let mut radius = options.keep_tol;
                while radius > options.tol {
                    roots.extend(local_roots(&eval, seed, radius, refine_tol));
                    radius *= 1e-2;
                }
            }
        }
        roots.retain(|r| *r >= lo && *r <= hi);
        roots.sort_by(|x, y| x.partial_cmp(y).expect("finite roots"));
        roots.dedup_by(|x, y| Float::with_val(x.prec(), &*x - &*y).abs().to_f64() <= 2.0 * refine_tol);
        history.push(DimensionRoots { dimension: dim, roots });
    }

    let last = history.last().expect("at least one dimension");
    let previous = &history[history.len() - 2].roots;
    let mut stable: Vec<Level> = last
        .roots
        .iter()
        .filter_map(|root| {
            let movement = nearest(previous, root).map_or(f64::INFINITY, |(_, d)| d);
            (movement <= options.keep_tol).then(|| Level {
                value: root.clone(),
                estimate: movement,
                converged: movement < options.tol,
            })
        })
        .collect();
    stable = least_moving_per_cluster(stable, options.keep_tol);

    let mut own = Vec::new();
    let mut reflected = Vec::new();
    for level in stable {
        let plus = side_amplitude_ratio(problem, &level.value, 1, options.side_probe, options.side_step);
        let minus = side_amplitude_ratio(problem, &level.value, -1, options.side_probe, options.side_step);
        if plus >= SIDE_THRESHOLD && minus >= SIDE_THRESHOLD {
            diagnostics.push(format!(
                "root W = {} decays on neither half-line (ratios {plus:.2e}, {minus:.2e}); dropped",
                level.w()
            ));
        }
        if attributed(minus, plus) {
            reflected.push(level.clone());
        }
        if attributed(plus, minus) {
            own.push(level);
        }
    }
    if own.is_empty() {
        diagnostics.push(format!("no stable roots found in [{lo}, {hi}]"));
    }

    let resolution = Resolution::HankelDimension(options.max_dimension);
    Ok(RpmOutcome {
        spectrum: Spectrum::new(Method::Rpm, own, resolution, prec),
        reflected: Spectrum::new(Method::Rpm, reflected, resolution, prec),
        history,
        diagnostics,
    })
}

/// Roots closer than `radius` approximate the same level; keep the one whose
/// sequence moved least.
fn least_moving_per_cluster(mut levels: Vec<Level>, radius: f64) -> Vec<Level> {
    levels.sort_by(|a, b| a.value.partial_cmp(&b.value).expect("finite roots"));
    let mut out: Vec<Level> = Vec::new();
    for level in levels {
        match out.last_mut() {
            Some(prev) if Float::with_val(level.value.prec(), &level.value - &prev.value).to_f64() <= radius => {
                if level.estimate < prev.estimate {
                    *prev = level;
                }
            }
            _ => out.push(level),
        }
    }
    out
}

/// Attribution threshold on [`side_amplitude_ratio`].
pub const SIDE_THRESHOLD: f64 = 0.1;

/// A side must also be within this factor of the better side: a level of
/// one half-line lying close to a level of the other leaves a small but
/// not negligible ratio on the wrong side.
pub const SIDE_DOMINANCE: f64 = 1e3;

/// Ratios below this are indistinguishable from an exact eigenvalue.
const SIDE_FLOOR: f64 = 1e-14;

fn attributed(ratio: f64, other: f64) -> bool {
    ratio < SIDE_THRESHOLD && ratio <= SIDE_DOMINANCE * other.min(ratio).max(SIDE_FLOOR)
}

/// Local minima of `|H|` that dip below this fraction of both grid
/// neighbours are treated as unresolved root pairs.
const PAIR_DIP: f64 = 1e-4;

fn scan_roots(
    grid: &[Float],
    values: &[Float],
    eval: &dyn Fn(&Float) -> Float,
    refine_tol: f64,
    notes: &mut Vec<String>,
) -> Vec<Float> {
    let mut roots = Vec::new();
    let n = grid.len() - 1;
    for i in 0..n {
        if values[i].is_zero() {
            roots.push(grid[i].clone());
        } else if sign_change(&values[i], &values[i + 1]) {
            roots.push(bracket_root(eval, &grid[i], &grid[i + 1], &values[i], &values[i + 1], refine_tol));
        }
    }
    // interior minima of |H| without a sign change on either side
    for i in 1..n {
        let (a, b, c) = (&values[i - 1], &values[i], &values[i + 1]);
        if b.is_zero() || sign_change(a, b) || sign_change(b, c) {
            continue;
        }
        if !(b.as_abs().lt(&*a.as_abs()) && b.as_abs().le(&*c.as_abs())) {
            continue;
        }
        match zoom(eval, &grid[i - 1], &grid[i + 1], refine_tol) {
            Zoom::Roots(rs) => roots.extend(rs),
            Zoom::Dip(w, depth) if depth < PAIR_DIP => {
                notes.push(format!("root pair near W = {} unresolved after grid refinement", w.to_f64()));
                roots.push(w);
            }
            Zoom::Dip(..) => {}
        }
    }
    roots
}

/// Roots within `radius` of `seed`: sign changes and deep dips on a small grid.
fn local_roots(eval: &dyn Fn(&Float) -> Float, seed: &Float, radius: f64, refine_tol: f64) -> Vec<Float> {
    const CELLS: usize = 20;
    let prec = seed.prec();
    let a = Float::with_val(prec, seed - radius);
    let pts: Vec<Float> = (0..=CELLS)
        .map(|k| Float::with_val(prec, &a + 2.0 * radius * k as f64 / CELLS as f64))
        .collect();
    let vals: Vec<Float> = pts.iter().map(eval).collect();
    let mut roots = Vec::new();
    for k in 0..CELLS {
        if vals[k].is_zero() {
            roots.push(pts[k].clone());
        } else if sign_change(&vals[k], &vals[k + 1]) {
            roots.push(bracket_root(eval, &pts[k], &pts[k + 1], &vals[k], &vals[k + 1], refine_tol));
        }
    }
    for k in 1..CELLS {
        let (x, y, z) = (&vals[k - 1], &vals[k], &vals[k + 1]);
        if y.is_zero() || sign_change(x, y) || sign_change(y, z) {
            continue;
        }
        if y.as_abs().lt(&*x.as_abs()) && y.as_abs().le(&*z.as_abs()) {
            match zoom(eval, &pts[k - 1], &pts[k + 1], refine_tol) {
                Zoom::Roots(rs) => roots.extend(rs),
                Zoom::Dip(w, depth) if depth < PAIR_DIP => roots.push(w),
                Zoom::Dip(..) => {}
            }
        }
    }
    roots
}

fn sign_change(a: &Float, b: &Float) -> bool {
    !a.is_zero() && !b.is_zero() && a.is_sign_negative() != b.is_sign_negative()
}

enum Zoom {
    Roots(Vec<Float>),
    /// Location of the minimum of `|H|` and its depth relative to the
    /// original bracket ends.
    Dip(Float, f64),
}

const ZOOM_CELLS: usize = 10;

/// Repeatedly resamples the neighbourhood of the smallest `|H|` until a sign
/// change separates the suspected pair or the window shrinks below `tol`.
fn zoom(eval: &dyn Fn(&Float) -> Float, a: &Float, b: &Float, tol: f64) -> Zoom {
    let prec = a.prec();
    let ends = Float::with_val(prec, eval(a).abs_ref()).min(&Float::with_val(prec, eval(b).abs_ref()));
    let (mut a, mut b) = (a.clone(), b.clone());
    loop {
        let width = Float::with_val(prec, &b - &a);
        let pts: Vec<Float> = (0..=ZOOM_CELLS)
            .map(|k| Float::with_val(prec, &width * k as u32) / ZOOM_CELLS as u32 + &a)
            .collect();
        let vals: Vec<Float> = pts.iter().map(eval).collect();
        let roots: Vec<Float> = (0..ZOOM_CELLS)
            .filter(|&k| sign_change(&vals[k], &vals[k + 1]))
            .map(|k| bracket_root(eval, &pts[k], &pts[k + 1], &vals[k], &vals[k + 1], tol))
            .chain((0..=ZOOM_CELLS).filter(|&k| vals[k].is_zero()).map(|k| pts[k].clone()))
            .collect();
        if !roots.is_empty() {
            return Zoom::Roots(roots);
        }
        let k = (0..=ZOOM_CELLS)
            .min_by(|&x, &y| vals[x].as_abs().partial_cmp(&*vals[y].as_abs()).expect("finite values"))
            .expect("non-empty grid");
        if width.to_f64() <= tol {
            let depth = if ends.is_zero() {
                1.0
            } else {
                (Float::with_val(prec, vals[k].abs_ref()) / &ends).to_f64()
            };
            return Zoom::Dip(pts[k].clone(), depth);
        }
        a = pts[k.saturating_sub(1)].clone();
        b = pts[(k + 1).min(ZOOM_CELLS)].clone();
    }
}

/// Illinois-modified regula falsi on a sign-changing bracket.
fn bracket_root(
    eval: &dyn Fn(&Float) -> Float,
    a: &Float,
    b: &Float,
    fa: &Float,
    fb: &Float,
    tol: f64,
) -> Float {
    let prec = a.prec();
    let (mut a, mut b) = (a.clone(), b.clone());
    let (mut fa, mut fb) = (fa.clone(), fb.clone());
    let mut side = 0i8;
    for iter in 0..400 {
        let width = Float::with_val(prec, &b - &a).to_f64();
        if width <= tol {
            break;
        }
        // alternate in a plain bisection step to guarantee shrinkage
        let c = if iter % 4 == 3 {
            Float::with_val(prec, &a + &b) / 2u32
        } else {
            let num = Float::with_val(prec, &a * &fb) - Float::with_val(prec, &b * &fa);
            let den = Float::with_val(prec, &fb - &fa);
            let c = num / den;
            if !(c > a && c < b) {
                Float::with_val(prec, &a + &b) / 2u32
            } else {
                c
            }
        };
        let fc = eval(&c);
        if fc.is_zero() {
            return c;
        }
        if sign_change(&fa, &fc) {
            b = c;
            fb = fc;
            if side == -1 {
                fa /= 2u32;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb /= 2u32;
            }
            side = 1;
        }
    }
    Float::with_val(prec, &a + &b) / 2u32
}

/// Interval guaranteed to hold the lowest `count` levels of both `delta`
/// and `-delta`, from comparison with pure oscillators:
/// `|delta|/x <= c/x^2 + delta^2/(4c)` for every `c > 0`.
pub fn search_interval(gamma: f64, delta: f64, count: usize) -> Result<(f64, f64)> {
    if !(gamma > 0.0 && gamma.is_finite() && delta.is_finite()) {
        return Err(invalid("search interval needs gamma > 0 and finite delta"));
    }
    if count == 0 {
        return Err(invalid("count must be at least 1"));
    }
    let top = 4.0 * (count - 1) as f64;
    let d2 = delta * delta;
    let cs: Vec<f64> = (0..=400).map(|k| 10f64.powf(-4.0 + 8.0 * k as f64 / 400.0)).collect();
    let upper = if delta == 0.0 {
        2.0 * (gamma + 1.0) + top
    } else {
        cs.iter()
            .map(|&c| 2.0 * ((gamma * gamma + c).sqrt() + 1.0) + top + d2 / (4.0 * c))
            .fold(f64::INFINITY, f64::min)
    };
    let lower = if delta == 0.0 {
        2.0 * (gamma + 1.0)
    } else {
        cs.iter()
            .filter(|&&c| c < gamma * gamma)
            .map(|&c| 2.0 * ((gamma * gamma - c).sqrt() + 1.0) - d2 / (4.0 * c))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let lower = if lower.is_finite() { lower } else { 2.0 - d2 };
    Ok((lower - 0.5, upper + 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::sqrt_of;

    const P: u32 = 200;

    fn problem(gamma: f64, delta: Float) -> ExtendedProblem {
        ExtendedProblem::new(Float::with_val(P, gamma), delta).unwrap()
    }

    #[test]
    fn leading_coefficients() {
        let p = problem(1.0, sqrt_of(P, 6.0));
        let s = riccati_coefficients(&p, &Float::with_val(P, 7.3), 4).unwrap();
        assert!((s.coeffs[0].to_f64() + 6f64.sqrt() / 3.0).abs() < 1e-15);
        assert_eq!(s.max_index(), 4);

        for w in [2.0, 4.0, 5.5] {
            let p = problem(1.0, Float::new(P));
            let s = riccati_coefficients(&p, &Float::with_val(P, w), 3).unwrap();
            assert!(s.coeffs[0].is_zero());
            assert!((s.coeffs[1].to_f64() - w / 4.0).abs() < 1e-15);
        }
        assert!(riccati_coefficients(&problem(1.0, Float::new(P)), &Float::new(P), 0).is_err());
    }

    #[test]
    fn exact_ground_state_gives_f_equal_x() {
        for gamma in [0.5, 1.0, 2.7] {
            let p = problem(gamma, Float::new(P));
            let w = Float::with_val(P, 2.0 * (gamma + 1.0));
            let s = riccati_coefficients(&p, &w, 12).unwrap();
            for (k, f) in s.coeffs.iter().enumerate() {
                let expected = if k == 1 { 1.0 } else { 0.0 };
                assert!((f.to_f64() - expected).abs() < 1e-50, "gamma {gamma} k {k}");
            }
        }
    }

    /// Riccati residual `-f' - (2 gamma + 1) f / x + f^2 - x^2 - delta/x + W`
    /// at small `x`, summed from the truncated series.
    #[test]
    fn series_satisfies_riccati_equation() {
        let (gamma, delta, w) = (1.0f64, 6f64.sqrt(), 7.1f64);
        let p = problem(gamma, sqrt_of(P, 6.0));
        let s = riccati_coefficients(&p, &Float::with_val(P, w), 30).unwrap();
        let c: Vec<f64> = s.coeffs.iter().map(|x| x.to_f64()).collect();
        let x = 0.05f64;
        let f: f64 = c.iter().enumerate().map(|(k, a)| a * x.powi(k as i32)).sum();
        let df: f64 = c.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a * x.powi(k as i32 - 1)).sum();
        let residual = -df - (2.0 * gamma + 1.0) * f / x + f * f - x * x - delta / x + w;
        assert!(residual.abs() < 1e-10, "{residual}");
    }

    #[test]
    fn reflection_changes_only_signs() {
        let p = problem(1.4, Float::with_val(P, 2.2));
        let w = Float::with_val(P, 5.0);
        let a = riccati_coefficients(&p, &w, 15).unwrap();
        let b = riccati_coefficients(&p.reflected(), &w, 15).unwrap();
        for (k, (x, y)) in a.coeffs.iter().zip(&b.coeffs).enumerate() {
            let sign = if k % 2 == 0 { -1 } else { 1 };
            assert!(Float::with_val(P, x - Float::with_val(P, y * sign)).abs() < 1e-55);
        }
        for dim in 2..6 {
            let spec = HankelSpec::new(dim, 1).unwrap();
            let ha = hankel_determinant(&a, spec).unwrap();
            let hb = hankel_determinant(&b, spec).unwrap();
            let diff = Float::with_val(P, ha.abs_ref()) - Float::with_val(P, hb.abs_ref());
            assert!(diff.abs() <= 1e-50 * (1.0 + ha.to_f64().abs()));
        }
    }

    #[test]
    fn hankel_examples() {
        let p = problem(1.0, sqrt_of(P, 6.0));
        let s = riccati_coefficients(&p, &Float::with_val(P, 3.3), 6).unwrap();
        let h1 = hankel_determinant(&s, HankelSpec::new(1, 0).unwrap()).unwrap();
        assert_eq!(h1, s.coeffs[1]);
        assert!(matches!(
            hankel_determinant(&s, HankelSpec::new(4, 0).unwrap()),
            Err(Error::InsufficientCoefficients { needed: 8, available: 7 })
        ));
        assert!(HankelSpec::new(0, 0).is_err());

        let osc = problem(1.0, Float::new(P));
        for dim in 2..7 {
            let h = hankel_at(&osc, &Float::with_val(P, 4), HankelSpec::new(dim, 0).unwrap()).unwrap();
            assert!(h.is_zero() || h.to_f64().abs() < 1e-50);
        }
    }

    #[test]
    fn side_ratio_identifies_half_line() {
        // W = 6 is a level of both +sqrt6 and -sqrt6; 9.8057840897 only of +sqrt6
        let p = problem(1.0, sqrt_of(P, 6.0));
        let six = Float::with_val(P, 6);
        assert!(side_amplitude_ratio(&p, &six, 1, 6.0, 0.05) < 1e-6);
        assert!(side_amplitude_ratio(&p, &six, -1, 6.0, 0.05) < 1e-6);
        let w1 = Float::with_val(P, 9.8057840897);
        assert!(side_amplitude_ratio(&p, &w1, 1, 6.0, 0.05) < 1e-6);
        assert!(side_amplitude_ratio(&p, &w1, -1, 6.0, 0.05) > 0.5);
        let w0m = Float::with_val(P, 1.6003571543);
        assert!(side_amplitude_ratio(&p, &w0m, 1, 6.0, 0.05) > 0.5);
        assert!(side_amplitude_ratio(&p, &w0m, -1, 6.0, 0.05) < 1e-6);
    }

    #[test]
    fn oscillator_interval_scan() {
        let p = problem(1.0, Float::new(P));
        let opts = RpmOptions {
            max_dimension: 4,
            tol: 1e-10,
            ..RpmOptions::default()
        };
        let out = rpm_spectrum(&p, (3.0, 5.0), &opts).unwrap();
        assert_eq!(out.spectrum.len(), 1);
        assert!((out.spectrum.values()[0] - 4.0).abs() < 1e-10);
    }

    #[test]
    fn bad_inputs() {
        let p = problem(1.0, Float::new(P));
        assert!(rpm_spectrum(&p, (5.0, 3.0), &RpmOptions::default()).is_err());
        let opts = RpmOptions {
            max_dimension: 1,
            ..RpmOptions::default()
        };
        assert!(rpm_spectrum(&p, (3.0, 5.0), &opts).is_err());
    }

    #[test]
    fn empty_interval_reports_diagnostic() {
        let p = problem(1.0, Float::new(P));
        let out = rpm_spectrum(&p, (0.5, 1.5), &RpmOptions::default()).unwrap();
        assert!(out.spectrum.is_empty());
        assert!(out.diagnostics.iter().any(|d| d.contains("no stable roots")));
    }

    #[test]
    fn comparison_interval_brackets_known_levels() {
        let (lo, hi) = search_interval(1.0, 6f64.sqrt(), 3).unwrap();
        assert!(lo < 1.600357154 && hi > 13.66928892);
        let (lo, hi) = search_interval(1.0, 0.0, 1).unwrap();
        assert!(lo < 4.0 && hi > 4.0);
    }
}

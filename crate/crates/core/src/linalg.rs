//! Dense linear algebra over MPFR floats: Cholesky reduction of the
//! generalized symmetric-definite problem, cyclic Jacobi rotations and
//! determinants by partial pivoting.
//!
//! Nothing here depends on a machine kernel, so every routine runs at
//! whatever precision its inputs carry.

use rug::{Assign, Float};

use crate::error::{Error, Result};

/// Square matrix of MPFR floats, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatMatrix {
    n: usize,
    prec: u32,
    data: Vec<Float>,
}

impl FloatMatrix {
    pub fn zeros(n: usize, prec: u32) -> Self {
        Self {
            n,
            prec,
            data: vec![Float::new(prec); n * n],
        }
    }

    pub fn from_fn(n: usize, prec: u32, mut entry: impl FnMut(usize, usize) -> Float) -> Self {
        let mut m = Self::zeros(n, prec);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = Float::with_val(prec, entry(i, j));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn get(&self, i: usize, j: usize) -> &Float {
        &self.data[i * self.n + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Float {
        &mut self.data[i * self.n + j]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, self.prec, |i, j| self.get(j, i).clone())
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_f64()).collect())
            .collect()
    }
}

/// Lower-triangular `L` with `S = L L^T`. `None` when a pivot is not positive.
pub fn cholesky(s: &FloatMatrix) -> Option<FloatMatrix> {
    let n = s.n;
    let prec = s.prec;
    let mut l = FloatMatrix::zeros(n, prec);
    let mut acc = Float::new(prec);
    for j in 0..n {
        acc.assign(s.get(j, j));
        for k in 0..j {
            acc -= Float::with_val(prec, l.get(j, k).square_ref());
        }
        if acc <= 0 || !acc.is_finite() {
            return None;
        }
        let diag = Float::with_val(prec, acc.sqrt_ref());
        for i in (j + 1)..n {
            acc.assign(s.get(i, j));
            for k in 0..j {
                acc -= Float::with_val(prec, l.get(i, k) * l.get(j, k));
            }
            *l.get_mut(i, j) = Float::with_val(prec, &acc / &diag);
        }
        *l.get_mut(j, j) = diag;
    }
    Some(l)
}

/// Solves `L X = B` for lower-triangular `L`.
fn forward_substitute(l: &FloatMatrix, b: &FloatMatrix) -> FloatMatrix {
    let n = l.n;
    let prec = l.prec;
    let mut x = FloatMatrix::zeros(n, prec);
    let mut acc = Float::new(prec);
    for col in 0..n {
        for i in 0..n {
            acc.assign(b.get(i, col));
            for k in 0..i {
                acc -= Float::with_val(prec, l.get(i, k) * x.get(k, col));
            }
            *x.get_mut(i, col) = Float::with_val(prec, &acc / l.get(i, i));
        }
    }
    x
}

/// `L^{-1} H L^{-T}`, symmetrized. `H` must be symmetric.
pub fn congruence_reduce(l: &FloatMatrix, h: &FloatMatrix) -> FloatMatrix {
    let x = forward_substitute(l, h);
    let a = forward_substitute(l, &x.transpose());
    let n = a.n;
    FloatMatrix::from_fn(n, a.prec, |i, j| {
        if i == j {
            a.get(i, i).clone()
        } else {
            Float::with_val(a.prec, a.get(i, j) + a.get(j, i)) / 2u32
        }
    })
}

/// Bound on cyclic sweeps before giving up.
pub const MAX_JACOBI_SWEEPS: usize = 100;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(a: &FloatMatrix) -> Result<Vec<Float>> {
    let n = a.n;
    let prec = a.prec;
    let mut m = a.clone();
    if n == 1 {
        return Ok(vec![m.data[0].clone()]);
    }
    let eps = Float::with_val(prec, Float::i_exp(1, 1 - prec as i32));

    let mut off = Float::new(prec);
    let mut scale = Float::new(prec);
    let mut theta = Float::new(prec);
    let mut t = Float::new(prec);
    let mut c = Float::new(prec);
    let mut s = Float::new(prec);
    let mut tau = Float::new(prec);
    let mut g = Float::new(prec);
    let mut h = Float::new(prec);
    let mut tmp = Float::new(prec);

    for _sweep in 0..MAX_JACOBI_SWEEPS {
        off.assign(0);
        scale.assign(0);
        for i in 0..n {
            scale += Float::with_val(prec, m.get(i, i).square_ref());
            for j in (i + 1)..n {
                off += Float::with_val(prec, m.get(i, j).square_ref());
            }
        }
        // off-diagonal mass below eps^2 of the total
        tmp.assign(&scale + &off);
        tmp *= &eps;
        tmp *= &eps;
        if off <= tmp {
            let mut values: Vec<Float> = (0..n).map(|i| m.get(i, i).clone()).collect();
            values.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
            return Ok(values);
        }

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q).clone();
                if apq.is_zero() {
                    continue;
                }
                // negligible against both diagonal entries: drop it
                tmp.assign(m.get(p, p).abs_ref());
                tmp.min_mut(&Float::with_val(prec, m.get(q, q).abs_ref()));
                tmp *= &eps;
                if Float::with_val(prec, apq.abs_ref()) < tmp && !tmp.is_zero() {
                    m.get_mut(p, q).assign(0);
                    m.get_mut(q, p).assign(0);
                    continue;
                }

                theta.assign(m.get(q, q) - m.get(p, p));
                theta /= &apq;
                theta /= 2u32;
                // t = sign(theta) / (|theta| + sqrt(theta^2 + 1))
                tmp.assign(theta.square_ref());
                tmp += 1u32;
                tmp.sqrt_mut();
                tmp += Float::with_val(prec, theta.abs_ref());
                t.assign(tmp.recip_ref());
                if theta.is_sign_negative() {
                    t = -t;
                }
                c.assign(t.square_ref());
                c += 1u32;
                c.sqrt_mut();
                c.recip_mut();
                s.assign(&t * &c);
                tmp.assign(&c + 1u32);
                tau.assign(&s / &tmp);

                tmp.assign(&t * &apq);
                *m.get_mut(p, p) -= &tmp;
                *m.get_mut(q, q) += &tmp;
                m.get_mut(p, q).assign(0);
                m.get_mut(q, p).assign(0);

                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    g.assign(m.get(r, p));
                    h.assign(m.get(r, q));
                    // a_rp = g - s (h + g tau)
                    tmp.assign(&g * &tau);
                    tmp += &h;
                    tmp *= &s;
                    let new_rp = Float::with_val(prec, &g - &tmp);
                    // a_rq = h + s (g - h tau)
                    tmp.assign(&h * &tau);
                    tmp = Float::with_val(prec, &g - &tmp);
                    tmp *= &s;
                    let new_rq = Float::with_val(prec, &h + &tmp);
                    m.get_mut(p, r).assign(&new_rp);
                    *m.get_mut(r, p) = new_rp;
                    m.get_mut(q, r).assign(&new_rq);
                    *m.get_mut(r, q) = new_rq;
                }
            }
        }
    }
    Err(Error::NonConvergence {
        solver: "jacobi",
        detail: format!("off-diagonal norm still {} after {MAX_JACOBI_SWEEPS} sweeps", off.to_f64().sqrt()),
    })
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(a: &FloatMatrix) -> Float {
    let n = a.n;
    let prec = a.prec;
    let mut m = a.clone();
    let mut det = Float::with_val(prec, 1);
    let mut factor = Float::new(prec);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&x, &y| {
                m.get(x, col)
                    .as_abs()
                    .partial_cmp(&*m.get(y, col).as_abs())
                    .expect("finite entries")
            })
            .expect("non-empty range");
        if m.get(pivot_row, col).is_zero() {
            return Float::new(prec);
        }
        if pivot_row != col {
            for j in 0..n {
                m.data.swap(pivot_row * n + j, col * n + j);
            }
            det = -det;
        }
        det *= m.get(col, col);
        for i in (col + 1)..n {
            factor.assign(m.get(i, col) / m.get(col, col));
            if factor.is_zero() {
                continue;
            }
            for j in (col + 1)..n {
                let update = Float::with_val(prec, &factor * m.get(col, j));
                *m.get_mut(i, j) -= update;
            }
        }
    }
    det
}

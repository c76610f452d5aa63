//! Dense complex least squares via column-pivoted Householder QR.
//!
//! The collocation systems are small (tens of rows) but can be severely
//! ill conditioned: Müntz power bases with closely spaced exponents produce
//! nearly dependent columns. Columns are scaled to unit norm and pivoted so
//! that rank decisions are made on a well-balanced factor; normal equations
//! would square the condition number and are avoided throughout.

// Index-style loops mirror the textbook factorization updates.
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![Complex64::new(0.0, 0.0); nrows * ncols],
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.ncols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.ncols + c] = v;
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.ncols);
        let mut out = vec![Complex64::new(0.0, 0.0); self.nrows];
        for r in 0..self.nrows {
            let row = &self.data[r * self.ncols..(r + 1) * self.ncols];
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            out[r] = acc;
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Solution of one least-squares problem `min ||A x - b||_2`.
#[derive(Debug, Clone)]
pub struct Lstsq {
    pub solution: Vec<Complex64>,
    /// Two-norm of the residual `A x - b`, recomputed from the original data.
    pub residual_norm: f64,
    /// Numerical rank at the pivoted-QR truncation threshold.
    pub rank: usize,
    /// True when the rank fell short of the column count.
    pub ill_conditioned: bool,
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

struct ColPivQr {
    // Factored matrix: reflector vectors below the diagonal, R on and above.
    f: CMatrix,
    // 2 / (u^H u) per reflector.
    taus: Vec<f64>,
    // Diagonal of R (the reflector betas).
    diag: Vec<Complex64>,
    perm: Vec<usize>,
    rank: usize,
    col_scale: Vec<f64>,
}

/// Factors a column-scaled copy of `a` with Householder reflections and
/// column pivoting. Requires `nrows >= ncols`.
fn factor(a: &CMatrix, rank_threshold: Option<f64>) -> Result<ColPivQr> {
    let (m, n) = (a.nrows(), a.ncols());
    if m < n {
        return Err(Error::Validation(format!(
            "least squares expects at least as many rows as columns, got {m} x {n}"
        )));
    }
    if !a.is_finite() {
        return Err(Error::Numerical(
            "least-squares matrix contains non-finite entries".into(),
        ));
    }

    let mut f = a.clone();
    let mut col_scale = vec![1.0_f64; n];
    for c in 0..n {
        let norm = (0..m).map(|r| f.get(r, c).norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            col_scale[c] = norm;
            for r in 0..m {
                let v = f.get(r, c);
                f.set(r, c, v / norm);
            }
        }
    }
    // After scaling, every nonzero column has unit norm, so the truncation
    // threshold n_rows * eps corresponds to n_rows * eps * (largest column
    // norm) of the scaled system.
    let threshold = rank_threshold.unwrap_or(m as f64 * f64::EPSILON);

    let mut perm: Vec<usize> = (0..n).collect();
    let mut taus = vec![0.0_f64; n];
    let mut diag = vec![Complex64::new(0.0, 0.0); n];
    let mut rank = n;

    for j in 0..n {
        // Pivot: bring the column with the largest remaining norm to front.
        let mut best = j;
        let mut best_norm = -1.0_f64;
        for c in j..n {
            let norm: f64 = (j..m).map(|r| f.get(r, c).norm_sqr()).sum();
            if norm > best_norm {
                best_norm = norm;
                best = c;
            }
        }
        if best != j {
            for r in 0..m {
                let tmp = f.get(r, j);
                f.set(r, j, f.get(r, best));
                f.set(r, best, tmp);
            }
            perm.swap(j, best);
        }

        let xnorm = best_norm.max(0.0).sqrt();
        if xnorm <= threshold {
            rank = j;
            break;
        }

        // Householder reflector sending the pivot column to beta * e_j.
        let alpha = f.get(j, j);
        let phase = if alpha.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            alpha / alpha.norm()
        };
        let beta = -phase * xnorm;
        let u0 = alpha - beta;
        f.set(j, j, u0);
        let unorm_sqr: f64 = (j..m).map(|r| f.get(r, j).norm_sqr()).sum();
        let tau = if unorm_sqr > 0.0 { 2.0 / unorm_sqr } else { 0.0 };
        taus[j] = tau;
        diag[j] = beta;

        for c in (j + 1)..n {
            let mut w = Complex64::new(0.0, 0.0);
            for r in j..m {
                w += f.get(r, j).conj() * f.get(r, c);
            }
            w *= tau;
            for r in j..m {
                let v = f.get(r, c) - f.get(r, j) * w;
                f.set(r, c, v);
            }
        }
    }

    Ok(ColPivQr {
        f,
        taus,
        diag,
        perm,
        rank,
        col_scale,
    })
}

impl ColPivQr {
    /// Applies Q^H to `b` and back-substitutes on the leading rank block.
    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let (m, n) = (self.f.nrows(), self.f.ncols());
        let mut y = b.to_vec();
        for j in 0..self.rank {
            let mut w = Complex64::new(0.0, 0.0);
            for r in j..m {
                w += self.f.get(r, j).conj() * y[r];
            }
            w *= self.taus[j];
            for r in j..m {
                y[r] -= self.f.get(r, j) * w;
            }
        }
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        for j in (0..self.rank).rev() {
            let mut acc = y[j];
            for c in (j + 1)..self.rank {
                acc -= self.f.get(j, c) * z[c];
            }
            z[j] = acc / self.diag[j];
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..self.rank {
            x[self.perm[j]] = z[j] / self.col_scale[self.perm[j]];
        }
        x
    }
}

/// Solves `min ||A x - b||_2` by rank-revealing column-pivoted QR.
pub fn lstsq(a: &CMatrix, b: &[Complex64]) -> Result<Lstsq> {
    let solutions = lstsq_multi(a, std::slice::from_ref(&b.to_vec()))?;
    Ok(solutions.into_iter().next().expect("one rhs in, one out"))
}

/// Solves the same matrix against several right-hand sides, factoring once.
pub fn lstsq_multi(a: &CMatrix, rhs: &[Vec<Complex64>]) -> Result<Vec<Lstsq>> {
    let qr = factor(a, None)?;
    let mut out = Vec::with_capacity(rhs.len());
    for b in rhs {
        if b.len() != a.nrows() {
            return Err(Error::Validation(format!(
                "right-hand side length {} does not match {} rows",
                b.len(),
                a.nrows()
            )));
        }
        if !b.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Numerical(
                "least-squares right-hand side contains non-finite entries".into(),
            ));
        }
        let x = qr.solve(b);
        let mut r = a.mul_vec(&x);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri -= bi;
        }
        out.push(Lstsq {
            solution: x,
            residual_norm: vec_norm(&r),
            rank: qr.rank,
            ill_conditioned: qr.rank < a.ncols(),
        });
    }
    Ok(out)
}

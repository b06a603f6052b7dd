//! Small dense complex linear algebra: Hermitian eigendecomposition by cyclic
//! Jacobi rotations, Cholesky solves, and the two zero-forcing projectors.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::ChannelRealization;

pub type CVector = Vec<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Squared norms below this are treated as exactly zero by the ZF projectors.
pub const DEGENERATE_NORM_SQR: f64 = 1e-30;

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    /// `u v†`
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> CVector {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> CVector {
        assert_eq!(x.len(), self.cols, "mul_vec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(x).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `A† x`
    pub fn adjoint_mul_vec(&self, x: &[Complex64]) -> CVector {
        assert_eq!(x.len(), self.rows, "adjoint_mul_vec dimension mismatch");
        let mut out = vec![ZERO; self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            for j in 0..self.cols {
                out[j] += self[(i, j)].conj() * xi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.lin_comb(1.0, other, -1.0)
    }

    /// `a·self + b·other`
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| x * a + y * b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A_ij − conj(A_ji)|`, or infinity for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Real part of `tr(self · other)`.
    pub fn trace_product_re(&self, other: &Self) -> f64 {
        assert_eq!((self.cols, self.rows), (other.rows, other.cols));
        let mut acc = 0.0;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += (self[(i, k)] * other[(k, i)]).re;
            }
        }
        acc
    }

    /// `x† A x` (real part; exact for Hermitian `A`).
    pub fn quad_form(&self, x: &[Complex64]) -> f64 {
        dot(x, &self.mul_vec(x)).re
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Conjugate-linear in the first argument: `a† b`.
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    assert_eq!(a.len(), b.len(), "dot dimension mismatch");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Bilinear product without conjugation: `a^T b` (row vector times column).
pub fn row_mul(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    assert_eq!(a.len(), b.len(), "row_mul dimension mismatch");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    norm_sqr(v).sqrt()
}

pub fn conj(v: &[Complex64]) -> CVector {
    v.iter().map(|z| z.conj()).collect()
}

pub fn scale(v: &[Complex64], s: Complex64) -> CVector {
    v.iter().map(|z| z * s).collect()
}

pub fn basis(n: usize, k: usize) -> CVector {
    let mut e = vec![ZERO; n];
    e[k] = ONE;
    e
}

/// Unit vector in the direction of `v`, or `None` when `v` is (numerically) zero.
pub fn normalized(v: &[Complex64]) -> Option<CVector> {
    let n2 = norm_sqr(v);
    if !(n2 > DEGENERATE_NORM_SQR) || !n2.is_finite() {
        return None;
    }
    Some(scale(v, Complex64::new(1.0 / n2.sqrt(), 0.0)))
}

/// Rotates the global phase so the first non-negligible entry is real positive.
pub fn phase_normalize(v: &mut [Complex64]) {
    let tol = 1e-12 * norm(v);
    if let Some(z) = v.iter().copied().find(|z| z.norm() > tol) {
        let rot = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= rot;
        }
        // Remove the rounding residue from the reference entry.
        if let Some(x) = v.iter_mut().find(|x| x.norm() > tol) {
            *x = Complex64::new(x.norm(), 0.0);
        }
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// (as columns).
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEig {
    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k)
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig(a: &CMatrix) -> Result<HermitianEig> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition of a {}x{} matrix",
            a.rows, a.cols
        )));
    }
    let scale_ref = a.max_abs().max(f64::MIN_POSITIVE);
    let dev = a.hermitian_deviation();
    if dev > 1e-12 * scale_ref.max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    let n = a.rows;
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
    }
    let mut v = CMatrix::identity(n);

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale_ref {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = 0.5 * (2.0 * mag).atan2(app - aqq);
                let (s, c) = theta.sin_cos();
                // J = diag(1, e^{-iφ}) · [[c, -s], [s, c]]
                let gpp = Complex64::new(c, 0.0);
                let gpq = Complex64::new(-s, 0.0);
                let gqp = phase.conj() * s;
                let gqq = phase.conj() * c;
                for k in 0..n {
                    let (x, y) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = x * gpp + y * gqp;
                    m[(k, q)] = x * gpq + y * gqq;
                }
                for k in 0..n {
                    let (x, y) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = gpp.conj() * x + gqp.conj() * y;
                    m[(q, k)] = gpq.conj() * x + gqq.conj() * y;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * gpp + y * gqp;
                    v[(k, q)] = x * gpq + y * gqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEig { values, vectors })
}

/// Lower-triangular Cholesky factor `L` with `A = L L†`.
pub fn cholesky(a: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::Dimension("cholesky of a non-square matrix".into()));
    }
    let n = a.rows;
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `L x = b` for lower-triangular `L`.
pub fn forward_subst(l: &CMatrix, b: &[Complex64]) -> CVector {
    let n = l.rows;
    let mut x = b.to_vec();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[(i, k)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solves `L† x = b` for lower-triangular `L`.
pub fn backward_subst_adjoint(l: &CMatrix, b: &[Complex64]) -> CVector {
    let n = l.rows;
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= l[(k, i)].conj() * x[k];
        }
        x[i] = s / l[(i, i)].conj();
    }
    x
}

/// Solves `A x = b` for Hermitian positive-definite `A`.
pub fn solve_hermitian_psd(a: &CMatrix, b: &[Complex64]) -> Result<CVector> {
    if a.rows != b.len() {
        return Err(Error::Dimension(format!(
            "{}x{} system with rhs of length {}",
            a.rows,
            a.cols,
            b.len()
        )));
    }
    let l = cholesky(a)?;
    Ok(backward_subst_adjoint(&l, &forward_subst(&l, b)))
}

/// Inverse of a Hermitian positive-definite matrix.
pub fn inverse_hermitian_pd(a: &CMatrix) -> Result<CMatrix> {
    let l = cholesky(a)?;
    let n = a.rows;
    let mut inv = CMatrix::zeros(n, n);
    for j in 0..n {
        let col = backward_subst_adjoint(&l, &forward_subst(&l, &basis(n, j)));
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Ok(inv)
}

/// Dense real solve by Gaussian elimination with partial pivoting.
/// `a` is row-major `n×n` and is consumed as workspace.
pub fn solve_real_dense(mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n * n {
        return Err(Error::Dimension("real system shape".into()));
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        let pv = a[piv * n + col];
        if pv == 0.0 || !pv.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        for r in (col + 1)..n {
            let f = a[r * n + col] / pv;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[r * n + k] -= f * a[col * n + k];
            }
            b[r] -= f * b[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    Ok(b)
}

/// `I − u u† / ‖u‖²`, or the identity when `‖u‖² < 1e−30`.
fn deflation_projector(u: &[Complex64]) -> CMatrix {
    let n = u.len();
    let n2 = norm_sqr(u);
    let eye = CMatrix::identity(n);
    if !(n2 >= DEGENERATE_NORM_SQR) {
        return eye;
    }
    eye.sub(&CMatrix::outer(u, u).scale(1.0 / n2))
}

/// Transmit-side ZF projector `B = I − H†h h†H / ‖h†H‖²` (M_T × M_T).
pub fn projection_b(ch: &ChannelRealization) -> CMatrix {
    deflation_projector(&ch.h_rr.adjoint_mul_vec(&ch.h_sr))
}

/// Receive-side ZF projector `D = I − H g† g H† / ‖H g†‖²` (M_R × M_R).
pub fn projection_d(ch: &ChannelRealization) -> CMatrix {
    deflation_projector(&ch.h_rr.mul_vec(&conj(&ch.h_rd)))
}

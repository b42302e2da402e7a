//! Dense Hermitian eigensolvers, characteristic polynomials, and a fast
//! eigenvalue solver for periodic Jacobi matrices with unit hopping.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type RealMatrix = DMatrix<f64>;

/// Relative Hermiticity tolerance `‖A − A*‖_F ≤ tol·‖A‖_F`.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 10_000;

#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: Option<ComplexMatrix>,
}

/// `‖A − A*‖_F / ‖A‖_F` (zero for the zero matrix).
pub fn hermitian_defect(a: &ComplexMatrix) -> f64 {
    let norm = a.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (a - a.adjoint()).norm() / norm
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::param(format!(
            "expected a nonempty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::param("matrix has non-finite entries"));
    }
    let asymmetry = hermitian_defect(a);
    if asymmetry > HERMITIAN_TOL {
        return Err(Error::NotHermitian { asymmetry });
    }
    Ok(())
}

fn sorted_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    idx
}

/// Eigen-decomposition of a Hermitian matrix.
pub fn eig_hermitian(a: &ComplexMatrix, want_vectors: bool) -> Result<Spectrum> {
    check_hermitian(a)?;
    let sym = (a + a.adjoint()).scale(0.5);
    let n = sym.nrows();
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, MAX_SWEEPS).ok_or_else(|| {
        Error::NoConvergence {
            what: "Hermitian eigensolver",
            detail: format!("no convergence for n = {n}"),
        }
    })?;
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let order = sorted_order(&values);
    let eigenvalues = order.iter().map(|&i| values[i]).collect();
    let eigenvectors =
        want_vectors.then(|| ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]));
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// Eigen-decomposition of a real symmetric matrix: ascending values and,
/// optionally, the matching orthonormal columns.
pub fn eig_symmetric(a: &RealMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<RealMatrix>)> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::param("expected a nonempty square matrix"));
    }
    let norm = a.norm();
    if norm > 0.0 && (a - a.transpose()).norm() > HERMITIAN_TOL * norm {
        return Err(Error::NotHermitian {
            asymmetry: (a - a.transpose()).norm() / norm,
        });
    }
    let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, MAX_SWEEPS).ok_or_else(|| {
        Error::NoConvergence {
            what: "symmetric eigensolver",
            detail: format!("no convergence for n = {n}"),
        }
    })?;
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let order = sorted_order(&values);
    let sorted = order.iter().map(|&i| values[i]).collect();
    let vecs = want_vectors.then(|| RealMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]));
    Ok((sorted, vecs))
}

/// `det(A − E·I)` of a Hermitian matrix, by LU with partial pivoting.
/// The sign is that of the literal determinant, so for `n×n` input it
/// behaves like `(−E)^n` for large `E`.
pub fn charpoly_eval(a: &ComplexMatrix, e: f64) -> Result<f64> {
    check_hermitian(a)?;
    let n = a.nrows();
    let shifted = a - ComplexMatrix::identity(n, n).scale(e);
    Ok(shifted.lu().determinant().re)
}

/// Eigenvalues of the real symmetric tridiagonal matrix with diagonal `d`
/// and off-diagonal `e` (`e.len() == d.len() − 1`), ascending. Implicit QL.
pub fn tridiagonal_eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if e.len() + 1 != n {
        return Err(Error::param("off-diagonal must have length n − 1"));
    }
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::once(0.0)).collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence {
                    what: "tridiagonal QL",
                    detail: format!("eigenvalue {l} of {n} after 60 sweeps"),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Hermitian matrix stored as a window of `2w+1` diagonals around the main one.
struct Banded {
    n: usize,
    w: usize,
    data: Vec<Complex64>,
}

impl Banded {
    fn new(n: usize, w: usize) -> Self {
        Banded { n, w, data: vec![Complex64::new(0.0, 0.0); n * (2 * w + 1)] }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i.abs_diff(j) <= self.w);
        i * (2 * self.w + 1) + j + self.w - i
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[self.idx(i, j)]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    /// `A ← G A Gᴴ` with `G` acting on rows `p, p+1` as `[[c, s], [−s̄, c]]`,
    /// restricted to columns `lo..hi`, outside of which both rows vanish.
    fn rotate(&mut self, p: usize, c: f64, s: Complex64, lo: usize, hi: usize) {
        let q = p + 1;
        for k in lo..hi {
            let (x, y) = (self.get(p, k), self.get(q, k));
            self.set(p, k, x * c + s * y);
            self.set(q, k, y * c - s.conj() * x);
        }
        for k in lo..hi {
            let (x, y) = (self.get(k, p), self.get(k, q));
            self.set(k, p, x * c + s.conj() * y);
            self.set(k, q, y * c - s * x);
        }
    }

    /// Zero entry `(p+1, col)` against `(p, col)` by a rotation in the plane `(p, p+1)`.
    fn annihilate(&mut self, p: usize, col: usize) {
        let y = self.get(p + 1, col);
        if y.norm_sqr() == 0.0 {
            return;
        }
        let x = self.get(p, col);
        let r = x.norm().hypot(y.norm());
        let (c, s) = if x.norm() == 0.0 {
            (0.0, Complex64::new(1.0, 0.0))
        } else {
            (x.norm() / r, x / x.norm() * y.conj() / r)
        };
        let hi = (p + self.w + 1).min(self.n);
        self.rotate(p, c, s, col, hi);
        self.set(p + 1, col, Complex64::new(0.0, 0.0));
        self.set(col, p + 1, Complex64::new(0.0, 0.0));
    }

    /// Reduce half-bandwidth `b = w − 1` to tridiagonal form by Givens
    /// rotations with bulge chasing, then solve with implicit QL.
    fn eigenvalues(mut self) -> Result<Vec<f64>> {
        let n = self.n;
        let b = self.w - 1;
        if b >= 2 {
            for col in 0..n.saturating_sub(2) {
                for d in (2..=b).rev() {
                    if col + d >= n {
                        continue;
                    }
                    self.annihilate(col + d - 1, col);
                    // The rotation leaves a bulge b+1 below the diagonal; chase it off.
                    let (mut p, mut c) = (col + d + b - 1, col + d - 1);
                    while p + 1 < n {
                        self.annihilate(p, c);
                        c = p;
                        p += b;
                    }
                }
            }
        }
        let d: Vec<f64> = (0..n).map(|i| self.get(i, i).re).collect();
        let e: Vec<f64> = (1..n).map(|i| self.get(i, i - 1).norm()).collect();
        tridiagonal_eigenvalues(&d, &e)
    }
}

/// Eigenvalues (ascending) of a real symmetric band matrix given by its
/// lower diagonals: `lower[k][i] = A[i+k][i]`, `lower[0]` being the diagonal.
pub fn symmetric_band_eigenvalues(lower: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = lower.first().map_or(0, Vec::len);
    if n == 0 {
        return Err(Error::param("empty band matrix"));
    }
    let b = lower.len() - 1;
    let mut m = Banded::new(n, b.max(1) + 1);
    for (k, diag) in lower.iter().enumerate() {
        if diag.len() + k != n && !(k >= n && diag.is_empty()) {
            return Err(Error::param(format!("band {k} has length {}, expected {}", diag.len(), n.saturating_sub(k))));
        }
        for (i, &v) in diag.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::param("non-finite band entry"));
            }
            m.set(i + k, i, Complex64::new(v, 0.0));
            m.set(i, i + k, Complex64::new(v, 0.0));
        }
    }
    m.eigenvalues()
}

/// All eigenvalues (ascending) of the `q×q` Hermitian periodic Jacobi matrix
/// with diagonal `diag` and unit-modulus nearest-neighbour hoppings whose
/// phases multiply to `e^{i·phase}` around the ring.
///
/// Runs in `O(q²)` and is backward stable: relabelling the sites in the
/// zig-zag order `0, q−1, 1, q−2, …` turns the ring into a band matrix of
/// half-bandwidth 2.
pub fn periodic_jacobi_eigenvalues(diag: &[f64], phase: f64) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::param("empty diagonal"));
    }
    if diag.iter().any(|d| !d.is_finite()) || !phase.is_finite() {
        return Err(Error::param("non-finite periodic Jacobi input"));
    }
    if n == 1 {
        return Ok(vec![diag[0] + 2.0 * phase.cos()]);
    }
    let pos = |site: usize| if 2 * site < n { 2 * site } else { 2 * (n - 1 - site) + 1 };
    let mut m = Banded::new(n, 3);
    for (k, &d) in diag.iter().enumerate() {
        m.set(pos(k), pos(k), Complex64::new(d, 0.0));
    }
    for k in 0..n {
        let t = if k == n - 1 { Complex64::from_polar(1.0, phase) } else { Complex64::new(1.0, 0.0) };
        let (i, j) = (pos(k), pos((k + 1) % n));
        m.set(i, j, m.get(i, j) + t);
        m.set(j, i, m.get(j, i) + t.conj());
    }
    m.eigenvalues()
}

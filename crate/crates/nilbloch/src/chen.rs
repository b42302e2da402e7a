//! Line integrals, two-fold iterated integrals and Lie integrals of
//! Heisenberg-algebra-valued polynomial one-forms along planar polylines.
//!
//! The Lie integral is the right one: later pieces of the path multiply on
//! the left, so the integral over a concatenation `αβ` is `Φ(β)·Φ(α)`. With
//! this ordering its `(1,3)` entry is `∫ω₁₂ + ∫∫_{u₁<u₂} ω₂(u₁) ω₁(u₂)` and
//! the integral is homotopy invariant exactly when `dω₁₂ = ω₁ ∧ ω₂`.

use std::collections::BTreeMap;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest total degree accepted in a one-form coefficient.
pub const MAX_DEGREE: usize = 4;

/// Flatness residuals at or below this count as flat.
pub const FLAT_TOL: f64 = 1e-12;

/// Bivariate polynomial `Σ c[i][j] x^i y^j`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly2 {
    coef: BTreeMap<(usize, usize), f64>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn constant(c: f64) -> Self {
        Poly2::monomial(0, 0, c)
    }

    pub fn monomial(i: usize, j: usize, c: f64) -> Self {
        let mut p = Poly2::zero();
        p.add_term(i, j, c);
        p
    }

    pub fn from_terms(terms: &[((usize, usize), f64)]) -> Self {
        let mut p = Poly2::zero();
        for &((i, j), c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn add_term(&mut self, i: usize, j: usize, c: f64) {
        if c != 0.0 {
            let e = self.coef.entry((i, j)).or_insert(0.0);
            *e += c;
            if *e == 0.0 {
                self.coef.remove(&(i, j));
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.coef.iter().map(|(&k, &c)| (k, c))
    }

    pub fn degree(&self) -> usize {
        self.coef.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn is_finite(&self) -> bool {
        self.coef.values().all(|c| c.is_finite())
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms().map(|((i, j), c)| c * x.powi(i as i32) * y.powi(j as i32)).sum()
    }

    /// Euclidean norm of the coefficient table.
    pub fn norm(&self) -> f64 {
        self.coef.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Poly2 {
        let mut p = Poly2::zero();
        for ((i, j), c) in self.terms() {
            p.add_term(i, j, s * c);
        }
        p
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut p = self.clone();
        for ((i, j), c) in other.terms() {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn sub(&self, other: &Poly2) -> Poly2 {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut p = Poly2::zero();
        for ((i, j), a) in self.terms() {
            for ((k, l), b) in other.terms() {
                p.add_term(i + k, j + l, a * b);
            }
        }
        p
    }

    pub fn dx(&self) -> Poly2 {
        let mut p = Poly2::zero();
        for ((i, j), c) in self.terms() {
            if i > 0 {
                p.add_term(i - 1, j, c * i as f64);
            }
        }
        p
    }

    pub fn dy(&self) -> Poly2 {
        let mut p = Poly2::zero();
        for ((i, j), c) in self.terms() {
            if j > 0 {
                p.add_term(i, j - 1, c * j as f64);
            }
        }
        p
    }

    /// Restriction to the line `(x0 + u·hx, y0 + u·hy)` as a polynomial in `u`.
    fn along(&self, x0: f64, y0: f64, hx: f64, hy: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.degree() + 1];
        for ((i, j), c) in self.terms() {
            let px = binomial_power(x0, hx, i);
            let py = binomial_power(y0, hy, j);
            for (a, u) in px.iter().enumerate() {
                for (b, v) in py.iter().enumerate() {
                    out[a + b] += c * u * v;
                }
            }
        }
        out
    }
}

/// Coefficients of `(a + b·u)^n` in `u`.
fn binomial_power(a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..n {
        let mut next = vec![0.0; out.len() + 1];
        for (k, c) in out.iter().enumerate() {
            next[k] += c * a;
            next[k + 1] += c * b;
        }
        out = next;
    }
    out
}

fn upoly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Antiderivative vanishing at 0.
fn upoly_integral(a: &[f64]) -> Vec<f64> {
    std::iter::once(0.0).chain(a.iter().enumerate().map(|(k, c)| c / (k + 1) as f64)).collect()
}

/// `∫₀¹ a(u) du`.
fn upoly_unit_integral(a: &[f64]) -> f64 {
    a.iter().enumerate().map(|(k, c)| c / (k + 1) as f64).sum()
}

/// `P dx + Q dy` with polynomial coefficients.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormTable", into = "FormTable")]
pub struct PolyOneForm {
    pub p: Poly2,
    pub q: Poly2,
}

impl PolyOneForm {
    pub fn new(p: Poly2, q: Poly2) -> Result<Self> {
        if p.degree() > MAX_DEGREE || q.degree() > MAX_DEGREE {
            return Err(Error::param(format!("one-form coefficients limited to total degree {MAX_DEGREE}")));
        }
        if !p.is_finite() || !q.is_finite() {
            return Err(Error::param("non-finite one-form coefficient"));
        }
        Ok(PolyOneForm { p, q })
    }

    pub fn zero() -> Self {
        PolyOneForm::default()
    }

    pub fn dx() -> Self {
        PolyOneForm { p: Poly2::constant(1.0), q: Poly2::zero() }
    }

    pub fn dy() -> Self {
        PolyOneForm { p: Poly2::zero(), q: Poly2::constant(1.0) }
    }

    pub fn scale(&self, s: f64) -> Self {
        PolyOneForm { p: self.p.scale(s), q: self.q.scale(s) }
    }

    /// Coefficient of `dx∧dy` in the exterior derivative.
    pub fn exterior_derivative(&self) -> Poly2 {
        self.q.dx().sub(&self.p.dy())
    }

    /// Coefficient of `dx∧dy` in `self ∧ other`.
    pub fn wedge(&self, other: &PolyOneForm) -> Poly2 {
        self.p.mul(&other.q).sub(&self.q.mul(&other.p))
    }

    pub fn eval(&self, x: f64, y: f64, vx: f64, vy: f64) -> f64 {
        self.p.eval(x, y) * vx + self.q.eval(x, y) * vy
    }

    /// Pullback to the segment `a → b` parametrized by `u ∈ [0, 1]`.
    fn pullback(&self, a: [f64; 2], b: [f64; 2]) -> Vec<f64> {
        let (hx, hy) = (b[0] - a[0], b[1] - a[1]);
        let mut out = self.p.along(a[0], a[1], hx, hy);
        for v in out.iter_mut() {
            *v *= hx;
        }
        let q = self.q.along(a[0], a[1], hx, hy);
        if out.len() < q.len() {
            out.resize(q.len(), 0.0);
        }
        for (o, v) in out.iter_mut().zip(q) {
            *o += v * hy;
        }
        out
    }
}

/// JSON shape of a one-form: `{"dx": {"i,j": c, …}, "dy": {…}}`.
#[derive(Serialize, Deserialize)]
struct FormTable {
    #[serde(default)]
    dx: BTreeMap<String, f64>,
    #[serde(default)]
    dy: BTreeMap<String, f64>,
}

fn poly_from_table(t: &BTreeMap<String, f64>) -> Result<Poly2> {
    let mut p = Poly2::zero();
    for (key, &c) in t {
        let parsed = key
            .split_once(',')
            .and_then(|(i, j)| Some((i.trim().parse::<usize>().ok()?, j.trim().parse::<usize>().ok()?)));
        let (i, j) = parsed.ok_or_else(|| Error::param(format!("bad monomial key {key:?}, expected \"i,j\"")))?;
        p.add_term(i, j, c);
    }
    Ok(p)
}

fn poly_to_table(p: &Poly2) -> BTreeMap<String, f64> {
    p.terms().map(|((i, j), c)| (format!("{i},{j}"), c)).collect()
}

impl TryFrom<FormTable> for PolyOneForm {
    type Error = Error;
    fn try_from(t: FormTable) -> Result<Self> {
        PolyOneForm::new(poly_from_table(&t.dx)?, poly_from_table(&t.dy)?)
    }
}

impl From<PolyOneForm> for FormTable {
    fn from(f: PolyOneForm) -> Self {
        FormTable { dx: poly_to_table(&f.p), dy: poly_to_table(&f.q) }
    }
}

/// Entries of the nilpotent form `ω = [[0, ω₁, ω₁₂], [0, 0, ω₂], [0, 0, 0]]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConnectionTriple {
    pub omega1: PolyOneForm,
    pub omega2: PolyOneForm,
    pub omega12: PolyOneForm,
}

impl ConnectionTriple {
    pub fn new(omega1: PolyOneForm, omega2: PolyOneForm, omega12: PolyOneForm) -> Self {
        ConnectionTriple { omega1, omega2, omega12 }
    }

    /// `(dx, dy, −y dx)`: flat, and its Lie integral from the origin to
    /// `(x, y)` is the Heisenberg element with coordinates `(x, y, 0)`.
    pub fn standard() -> Self {
        ConnectionTriple {
            omega1: PolyOneForm::dx(),
            omega2: PolyOneForm::dy(),
            omega12: PolyOneForm { p: Poly2::monomial(0, 1, -1.0), q: Poly2::zero() },
        }
    }

    /// `(dx, dy, 0)`: not flat; its Lie integral around a lattice loop is
    /// the lift of the loop to `Heis₃(ℤ)`, with central entry minus the
    /// signed enclosed area.
    pub fn translation() -> Self {
        ConnectionTriple { omega1: PolyOneForm::dx(), omega2: PolyOneForm::dy(), omega12: PolyOneForm::zero() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub vertices: Vec<[f64; 2]>,
    /// Set when consecutive vertices are allowed to coincide.
    #[serde(default)]
    pub degenerate: bool,
}

impl Polyline {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        Polyline::build(vertices, false)
    }

    /// A polyline that may pause at a vertex (for instance a constant path).
    pub fn new_degenerate(vertices: Vec<[f64; 2]>) -> Result<Self> {
        Polyline::build(vertices, true)
    }

    fn build(vertices: Vec<[f64; 2]>, degenerate: bool) -> Result<Self> {
        let p = Polyline { vertices, degenerate };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vertices.len() < 2 {
            return Err(Error::param("a polyline needs at least two vertices"));
        }
        if self.vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::param("non-finite polyline vertex"));
        }
        if !self.degenerate && self.vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("repeated consecutive vertex in a non-degenerate polyline"));
        }
        Ok(())
    }

    pub fn start(&self) -> [f64; 2] {
        self.vertices[0]
    }

    pub fn end(&self) -> [f64; 2] {
        self.vertices[self.vertices.len() - 1]
    }

    pub fn closing_gap(&self) -> f64 {
        let (a, b) = (self.start(), self.end());
        (a[0] - b[0]).hypot(a[1] - b[1])
    }

    /// `self` followed by `other`; the end of `self` must be the start of `other`.
    pub fn concat(&self, other: &Polyline) -> Result<Polyline> {
        let (a, b) = (self.end(), other.start());
        let gap = (a[0] - b[0]).hypot(a[1] - b[1]);
        if gap > 0.0 {
            return Err(Error::NotClosed { gap });
        }
        let mut v = self.vertices.clone();
        v.extend_from_slice(&other.vertices[1..]);
        Ok(Polyline { vertices: v, degenerate: self.degenerate || other.degenerate })
    }

    /// The path traversed `k` times (a closed loop is required for `k > 1`).
    pub fn repeat(&self, k: usize) -> Result<Polyline> {
        let mut out = self.clone();
        for _ in 1..k {
            out = out.concat(self)?;
        }
        Ok(out)
    }

    pub fn segments(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }
}

pub fn line_integral(form: &PolyOneForm, path: &Polyline) -> f64 {
    path.segments().map(|(a, b)| upoly_unit_integral(&form.pullback(a, b))).sum()
}

/// `∫∫_{u₁ ≤ u₂} η₁(α'(u₁)) η₂(α'(u₂)) du₁ du₂`: `η₁` is met first along the path.
pub fn iterated_integral(forms: (&PolyOneForm, &PolyOneForm), path: &Polyline) -> f64 {
    let (first, second) = forms;
    let mut earlier = 0.0;
    let mut total = 0.0;
    for (a, b) in path.segments() {
        let f1 = first.pullback(a, b);
        let f2 = second.pullback(a, b);
        let within = upoly_unit_integral(&upoly_mul(&f2, &upoly_integral(&f1)));
        total += earlier * upoly_unit_integral(&f2) + within;
        earlier += upoly_unit_integral(&f1);
    }
    total
}

fn unitriangular(a12: f64, a23: f64, a13: f64) -> Matrix3<f64> {
    Matrix3::new(1.0, a12, a13, 0.0, 1.0, a23, 0.0, 0.0, 1.0)
}

/// Right Lie integral from the terminating Chen series.
pub fn lie_integral_series(conn: &ConnectionTriple, path: &Polyline) -> Matrix3<f64> {
    let a12 = line_integral(&conn.omega1, path);
    let a23 = line_integral(&conn.omega2, path);
    let a13 = line_integral(&conn.omega12, path) + iterated_integral((&conn.omega2, &conn.omega1), path);
    unitriangular(a12, a23, a13)
}

/// `exp` of the strictly upper triangular matrix with entries `a12, a23, a13`.
fn nil_exp(a12: f64, a23: f64, a13: f64) -> Matrix3<f64> {
    unitriangular(a12, a23, a13 + 0.5 * a12 * a23)
}

/// Ordered product `exp(A_n)⋯exp(A_1)` over `n_subdiv` equal pieces of every
/// segment, each `A_i` the connection sampled at the midpoint of its piece
/// times the piece's displacement.
pub fn lie_integral_product(conn: &ConnectionTriple, path: &Polyline, n_subdiv: usize) -> Result<Matrix3<f64>> {
    if n_subdiv == 0 {
        return Err(Error::param("n_subdiv must be at least 1"));
    }
    let mut acc = Matrix3::identity();
    for (a, b) in path.segments() {
        let (hx, hy) = ((b[0] - a[0]) / n_subdiv as f64, (b[1] - a[1]) / n_subdiv as f64);
        for k in 0..n_subdiv {
            let s = k as f64 + 0.5;
            let (x, y) = (a[0] + s * hx, a[1] + s * hy);
            let f = nil_exp(
                conn.omega1.eval(x, y, hx, hy),
                conn.omega2.eval(x, y, hx, hy),
                conn.omega12.eval(x, y, hx, hy),
            );
            acc = f * acc;
        }
    }
    Ok(acc)
}

/// Norm of the coefficient table of `dω₁₂ − ω₁ ∧ ω₂`.
pub fn flatness_residual(conn: &ConnectionTriple) -> f64 {
    conn.omega12.exterior_derivative().sub(&conn.omega1.wedge(&conn.omega2)).norm()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonodromyReport {
    pub matrix: [[f64; 3]; 3],
    /// `(1,2)` and `(2,3)` entries.
    pub displacement: (f64, f64),
    pub central: f64,
    /// Nearest integer to the central entry and the distance to it.
    pub central_integer: i64,
    pub integrality_defect: f64,
}

/// Lie integral of a flat connection around a closed loop.
pub fn monodromy(conn: &ConnectionTriple, lp: &Polyline) -> Result<MonodromyReport> {
    let residual = flatness_residual(conn);
    if residual > FLAT_TOL {
        return Err(Error::NotFlat { residual });
    }
    lp.validate()?;
    let gap = lp.closing_gap();
    if gap > 0.0 {
        return Err(Error::NotClosed { gap });
    }
    let m = lie_integral_series(conn, lp);
    let central = m[(0, 2)];
    let nearest = central.round();
    Ok(MonodromyReport {
        matrix: [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ],
        displacement: (m[(0, 1)], m[(1, 2)]),
        central,
        central_integer: nearest as i64,
        integrality_defect: (central - nearest).abs(),
    })
}

//! Finite-dimensional irreducible unitary representations of the discrete
//! Heisenberg group, normalized traces, discretized Fourier inversion and
//! the Kazhdan distance to the trivial representation.
//!
//! The representation at `x = (p/q, x2, x3)` acts on `q`-periodic sequences:
//!
//! ```text
//! (ρ(n)φ)(k) = exp(2πi/q · (n3·x3 + n2·x2 + n1·p + k·n2·p)) · φ(k + n3)
//! ```
//!
//! so `ρ(u)` is `α` times the cyclic shift `φ(k) ↦ φ(k+1)` and `ρ(v)` is
//! `diag(β γ^k)`, with `α = e^{2πi x3/q}`, `β = e^{2πi x2/q}`, `γ = e^{2πi p/q}`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heis::GroupElement;
use crate::spectra::{eig_hermitian, ComplexMatrix};

/// A finitely supported complex function on the group.
pub type GroupFunction = BTreeMap<GroupElement, Complex64>;

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepPoint {
    pub p: i64,
    pub q: i64,
    pub x2: f64,
    pub x3: f64,
}

impl RepPoint {
    /// Validated constructor: `q ≥ 1`, `0 ≤ p ≤ q`, `gcd(p, q) = 1`, `x2, x3 ∈ [0, 1)`.
    pub fn new(p: i64, q: i64, x2: f64, x3: f64) -> Result<Self> {
        if q < 1 {
            return Err(Error::param(format!("q must be positive, got {q}")));
        }
        if !(0..=q).contains(&p) {
            return Err(Error::param(format!("p must lie in [0, q], got p={p}, q={q}")));
        }
        if gcd(p, q) != 1 {
            return Err(Error::param(format!("p/q = {p}/{q} is not reduced")));
        }
        for (name, x) in [("x2", x2), ("x3", x3)] {
            if !(0.0..1.0).contains(&x) {
                return Err(Error::param(format!("{name} must lie in [0,1), got {x}")));
            }
        }
        Ok(RepPoint { p, q, x2, x3 })
    }

    /// The point at flux `p/q` written in lowest terms.
    pub fn reduced(p: i64, q: i64, x2: f64, x3: f64) -> Result<Self> {
        if q < 1 {
            return Err(Error::param(format!("q must be positive, got {q}")));
        }
        let g = gcd(p, q).max(1);
        Self::new(p / g, q / g, x2, x3)
    }

    pub fn is_trivial(&self) -> bool {
        self.q == 1 && self.x2 == 0.0 && self.x3 == 0.0
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::from_polar(1.0, TAU * self.x3 / self.q as f64)
    }

    pub fn beta(&self) -> Complex64 {
        Complex64::from_polar(1.0, TAU * self.x2 / self.q as f64)
    }

    pub fn gamma(&self) -> Complex64 {
        Complex64::from_polar(1.0, TAU * self.p as f64 / self.q as f64)
    }

    /// `exp(2πi/q · (n3·x3 + n2·x2 + n1·p + k·n2·p))`, with the integer part
    /// of the exponent reduced mod `q` before converting to floating point.
    fn phase(&self, g: &GroupElement, k: i64) -> Complex64 {
        let q = self.q as i128;
        let int_part = (g.n1 as i128 * self.p as i128 + k as i128 * g.n2 as i128 * self.p as i128)
            .rem_euclid(q) as f64;
        let real_part = g.n3 as f64 * self.x3 + g.n2 as f64 * self.x2;
        Complex64::from_polar(1.0, TAU * (int_part + real_part) / self.q as f64)
    }
}

#[derive(Clone, Debug)]
pub struct FiniteRep {
    pub point: RepPoint,
    pub dim: usize,
    /// `ρ(u)`
    pub u: ComplexMatrix,
    /// `ρ(v)`, diagonal.
    pub v: ComplexMatrix,
    /// `ρ(w)` as a scalar.
    pub gamma: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
}

pub fn build_rep(x: RepPoint) -> Result<FiniteRep> {
    let x = RepPoint::new(x.p, x.q, x.x2, x.x3)?;
    let q = x.q as usize;
    let (alpha, beta, gamma) = (x.alpha(), x.beta(), x.gamma());
    let mut u = ComplexMatrix::zeros(q, q);
    let mut v = ComplexMatrix::zeros(q, q);
    for k in 0..q {
        u[(k, (k + 1) % q)] = alpha;
        v[(k, k)] = x.phase(&GroupElement::V, k as i64);
    }
    Ok(FiniteRep { point: x, dim: q, u, v, gamma, alpha, beta })
}

/// The matrix of `ρ(g)` in the delta basis of `q`-periodic sequences.
pub fn rep_of_element(rep: &FiniteRep, g: &GroupElement) -> ComplexMatrix {
    let x = &rep.point;
    let q = x.q;
    let mut m = ComplexMatrix::zeros(rep.dim, rep.dim);
    for k in 0..q {
        let col = (k + g.n3).rem_euclid(q) as usize;
        m[(k as usize, col)] = x.phase(g, k);
    }
    m
}

/// `Tr ρ(g) / q`, in closed form: the matrix has a nonzero diagonal only when
/// `q | n3`, and the diagonal phases sum to zero unless `q | n2·p`.
pub fn normalized_trace(x: &RepPoint, g: &GroupElement) -> Complex64 {
    let q = x.q as i128;
    if (g.n3 as i128).rem_euclid(q) != 0 || (g.n2 as i128 * x.p as i128).rem_euclid(q) != 0 {
        return Complex64::new(0.0, 0.0);
    }
    x.phase(g, 0)
}

/// Discretized Fourier inversion: the average over `p = 0..qstar` (each
/// flux reduced to lowest terms) and a `grid × grid` midpoint lattice in
/// `(x2, x3)` of `tr(ρ(σ⁻¹) ρ(f))`.
pub fn fourier_inversion(f: &GroupFunction, sigma: &GroupElement, qstar: i64, grid: usize) -> Result<Complex64> {
    if qstar < 2 {
        return Err(Error::param(format!("qstar must be at least 2, got {qstar}")));
    }
    if grid == 0 {
        return Err(Error::param("grid must be positive"));
    }
    let zero = Complex64::new(0.0, 0.0);
    if f.is_empty() {
        return Ok(zero);
    }
    let sinv = sigma.checked_inverse()?;
    let shifted: Vec<(GroupElement, Complex64)> = f
        .iter()
        .map(|(g, &c)| sinv.checked_mul(g).map(|h| (h, c)))
        .collect::<Result<_>>()?;
    let mids: Vec<f64> = (0..grid).map(|j| (j as f64 + 0.5) / grid as f64).collect();
    let mut total = zero;
    for p in 0..qstar {
        let g = gcd(p, qstar);
        let (pr, qr) = (p / g, qstar / g);
        let mut sum_p = zero;
        for &x2 in &mids {
            for &x3 in &mids {
                let x = RepPoint { p: pr, q: qr, x2, x3 };
                for (h, c) in &shifted {
                    sum_p += c * normalized_trace(&x, h);
                }
            }
        }
        total += sum_p / (grid * grid) as f64;
    }
    Ok(total / qstar as f64)
}

/// `Q = Σ_{σ∈{u,v}} (ρ(σ) − I)*(ρ(σ) − I)`, which equals `4I − H` for the
/// Harper matrix `H`.
pub fn kazhdan_form(rep: &FiniteRep) -> ComplexMatrix {
    let id = ComplexMatrix::identity(rep.dim, rep.dim);
    let du = &rep.u - &id;
    let dv = &rep.v - &id;
    du.adjoint() * &du + dv.adjoint() * &dv
}

/// Bracket `(√(λ_min(Q)/2), √λ_min(Q))` containing the Kazhdan distance
/// `inf_{|φ|=1} max_{σ∈{u,v}} ‖ρ(σ)φ − φ‖`.
pub fn kazhdan_delta(rep: &FiniteRep) -> Result<(f64, f64)> {
    let lam = eig_hermitian(&kazhdan_form(rep), false)?.eigenvalues[0].max(0.0);
    Ok(((lam / 2.0).sqrt(), lam.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn trivial_rep() {
        let r = build_rep(RepPoint::new(0, 1, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(r.u[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(r.v[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(r.gamma, Complex64::new(1.0, 0.0));
        assert_eq!(kazhdan_delta(&r).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn q2_rep() {
        let r = build_rep(RepPoint::new(1, 2, 0.0, 0.0).unwrap()).unwrap();
        let one = Complex64::new(1.0, 0.0);
        assert!(close(r.u[(0, 1)], one, 1e-15) && close(r.u[(1, 0)], one, 1e-15));
        assert!(close(r.v[(1, 1)], -one, 1e-15));
        assert!(close(r.gamma, -one, 1e-15));
        assert!(kazhdan_delta(&r).unwrap().0 > 0.0);
    }

    #[test]
    fn invalid_points_rejected() {
        assert!(RepPoint::new(2, 4, 0.0, 0.0).is_err());
        assert!(RepPoint::new(1, 0, 0.0, 0.0).is_err());
        assert!(RepPoint::new(1, 3, 1.0, 0.0).is_err());
        assert_eq!(RepPoint::reduced(2, 4, 0.0, 0.0).unwrap().q, 2);
    }

    #[test]
    fn trace_examples() {
        let x = RepPoint::new(1, 3, 0.0, 0.0).unwrap();
        assert!(close(normalized_trace(&x, &GroupElement::IDENTITY), Complex64::new(1.0, 0.0), 1e-15));
        assert!(close(normalized_trace(&x, &GroupElement::W), x.gamma(), 1e-15));
        assert_eq!(normalized_trace(&x, &GroupElement::U), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn fourier_trivial_cases() {
        let one = Complex64::new(1.0, 0.0);
        let f: GroupFunction = [(GroupElement::IDENTITY, one)].into();
        let got = fourier_inversion(&f, &GroupElement::IDENTITY, 7, 3).unwrap();
        assert!(close(got, one, 1e-14));
        let f: GroupFunction = [(GroupElement::U, one)].into();
        assert!(close(fourier_inversion(&f, &GroupElement::U, 5, 2).unwrap(), one, 1e-14));
        assert_eq!(fourier_inversion(&GroupFunction::new(), &GroupElement::U, 5, 2).unwrap(), Complex64::new(0.0, 0.0));
        assert!(fourier_inversion(&f, &GroupElement::U, 1, 2).is_err());
    }
}

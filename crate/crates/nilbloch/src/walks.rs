//! Simple random walk on the Cayley graph of `Heis₃(ℤ)` with generators
//! `u^{±1}, v^{±1}`: exact convolution powers, return probabilities from the
//! finite-dimensional Fourier side, and the decay exponent and constant.

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harper::harper_eigenvalues;
use crate::heis::{generators, GroupElement};
use crate::oscillators::linear_fit;
use crate::reps::{gcd, RepPoint};

/// Largest time accepted by [`return_prob_exact`].
pub const MAX_EXACT_TIME: usize = 40;

/// Support cap for [`convolve`].
pub const MAX_SUPPORT: usize = 20_000_000;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Distribution {
    pub weights: FxHashMap<GroupElement, f64>,
}

impl Distribution {
    pub fn delta(g: GroupElement) -> Self {
        let mut weights = FxHashMap::default();
        weights.insert(g, 1.0);
        Distribution { weights }
    }

    pub fn mass(&self) -> f64 {
        self.weights.values().sum()
    }

    pub fn get(&self, g: &GroupElement) -> f64 {
        self.weights.get(g).copied().unwrap_or(0.0)
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    /// `Σ_g d(g)²`, which for a symmetric `d` is `(d∗d)(e)`.
    pub fn collision(&self) -> f64 {
        self.weights.values().map(|w| w * w).sum()
    }
}

/// Uniform weight on `u, u⁻¹, v, v⁻¹`.
pub fn step_distribution() -> Distribution {
    Distribution { weights: generators().into_iter().map(|g| (g, 0.25)).collect() }
}

/// `(d1 ∗ d2)(g) = Σ_h d1(h)·d2(h⁻¹g)`.
pub fn convolve(d1: &Distribution, d2: &Distribution) -> Result<Distribution> {
    let bound = d1.support_len().saturating_mul(d2.support_len());
    let mut out: FxHashMap<GroupElement, f64> = FxHashMap::default();
    out.reserve(bound.min(MAX_SUPPORT));
    for (h, a) in &d1.weights {
        for (k, b) in &d2.weights {
            *out.entry(h.checked_mul(k)?).or_insert(0.0) += a * b;
        }
        if out.len() > MAX_SUPPORT {
            return Err(Error::SupportTooLarge { limit: MAX_SUPPORT });
        }
    }
    Ok(Distribution { weights: out })
}

/// Law of the walk after `t` steps.
pub fn walk_distribution(t: usize) -> Result<Distribution> {
    let step = step_distribution();
    let mut d = Distribution::delta(GroupElement::IDENTITY);
    for _ in 0..t {
        d = convolve(&d, &step)?;
    }
    Ok(d)
}

/// `P(walk at e after t steps)`, exactly up to rounding.
///
/// The walk is symmetric, so `p_{2s}(e) = Σ_g p_s(g)²` and only `s = t/2`
/// convolution steps are needed.
pub fn return_prob_exact(t: usize) -> Result<f64> {
    if t > MAX_EXACT_TIME {
        return Err(Error::param(format!("exact return probability limited to t <= {MAX_EXACT_TIME}, got {t}")));
    }
    if t % 2 == 1 {
        return Ok(0.0);
    }
    Ok(walk_distribution(t / 2)?.collision())
}

/// Spectrum of `H_x` on one reduced flux and one class of grid points
/// sharing `cos 2πx₂ + cos 2πx₃`, with its weight in the discretized measure.
struct Cell {
    x: RepPoint,
    weight: f64,
}

/// The discretized Plancherel measure: flux `p/qstar` for `p < qstar` in
/// lowest terms, twists on the midpoints of a `grid × grid` mesh, collapsed
/// onto cells with identical Harper spectra.
fn cells(qstar: i64, grid: usize) -> Vec<Cell> {
    let g = grid as f64;
    // Midpoints i and grid−1−i share cos 2πx; group unordered pairs of classes.
    let classes = grid.div_ceil(2);
    let class_count = |c: usize| if 2 * c + 1 == grid { 1.0 } else { 2.0 };
    let mut twist = Vec::new();
    for a in 0..classes {
        for b in a..classes {
            let mult = class_count(a) * class_count(b) * if a == b { 1.0 } else { 2.0 };
            twist.push(((a as f64 + 0.5) / g, (b as f64 + 0.5) / g, mult / (g * g)));
        }
    }
    let mut out = Vec::new();
    for p in 0..qstar {
        // p and qstar − p give complex-conjugate representations with equal spectra.
        let mirror = (qstar - p) % qstar;
        if mirror < p {
            continue;
        }
        let pmult = if mirror == p { 1.0 } else { 2.0 };
        let d = gcd(p, qstar);
        for &(x2, x3, w) in &twist {
            out.push(Cell {
                x: RepPoint { p: p / d, q: qstar / d, x2, x3 },
                weight: pmult * w / qstar as f64,
            });
        }
    }
    out
}

fn check_fourier_args(qstar: i64, grid: usize) -> Result<()> {
    if qstar < 2 {
        return Err(Error::param(format!("qstar must be at least 2, got {qstar}")));
    }
    if grid == 0 {
        return Err(Error::param("grid must be positive"));
    }
    Ok(())
}

/// `p_F(t)` for every `t ≤ t_max`: the discretized average of
/// `(1/q) Σ_i (λ_i(H_x)/4)^t`.
pub fn return_prob_fourier_series(t_max: usize, qstar: i64, grid: usize) -> Result<Vec<f64>> {
    check_fourier_args(qstar, grid)?;
    let parts: Vec<Vec<f64>> = cells(qstar, grid)
        .into_par_iter()
        .map(|cell| {
            let lam = harper_eigenvalues(&cell.x)?;
            let mut sums = vec![0.0; t_max + 1];
            for l in lam {
                let y = l / 4.0;
                let mut pow = 1.0;
                for s in sums.iter_mut() {
                    *s += pow;
                    pow *= y;
                }
            }
            let scale = cell.weight / cell.x.q as f64;
            Ok(sums.into_iter().map(|s| s * scale).collect())
        })
        .collect::<Result<_>>()?;
    let mut total = vec![0.0; t_max + 1];
    for part in parts {
        for (acc, v) in total.iter_mut().zip(part) {
            *acc += v;
        }
    }
    Ok(total)
}

pub fn return_prob_fourier(t: usize, qstar: i64, grid: usize) -> Result<f64> {
    Ok(return_prob_fourier_series(t, qstar, grid)?[t])
}

/// Tolerance for Fourier/exact agreement at the given resolution.
pub fn fourier_tolerance(qstar: i64, grid: usize) -> f64 {
    2.0 / qstar as f64 + 2.0 / (grid * grid) as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentReport {
    pub slope: f64,
    pub intercept: f64,
    /// `(t, p(t))` on the fit window.
    pub points: Vec<(usize, f64)>,
}

fn fit_exponent(t_lo: usize, t_hi: usize, p: impl Fn(usize) -> f64) -> Result<ExponentReport> {
    if t_lo < 1 || t_hi <= t_lo {
        return Err(Error::param(format!("need 1 <= t_lo < t_hi, got [{t_lo}, {t_hi}]")));
    }
    let first = t_lo + t_lo % 2;
    let points: Vec<(usize, f64)> = (first..=t_hi).step_by(2).map(|t| (t, p(t))).collect();
    if points.len() < 2 {
        return Err(Error::param(format!("fit window [{t_lo}, {t_hi}] holds fewer than two even times")));
    }
    if points.iter().any(|&(_, v)| !(v > 0.0)) {
        return Err(Error::NoConvergence {
            what: "return probability",
            detail: "non-positive value in the fit window".into(),
        });
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(t, v)| ((t as f64).ln(), v.ln())).collect();
    let (slope, intercept) = linear_fit(&logs);
    Ok(ExponentReport { slope, intercept, points })
}

/// Log-log slope of the return probability `p(t)` against `t` over the even
/// times in `[t_lo, t_hi]`.
pub fn exponent_estimate(t_lo: usize, t_hi: usize, qstar: i64, grid: usize) -> Result<ExponentReport> {
    if t_hi as i64 > qstar {
        return Err(Error::param(format!("t_hi = {t_hi} exceeds the resolution limit qstar = {qstar}")));
    }
    let series = return_prob_fourier_series(t_hi, qstar, grid)?;
    fit_exponent(t_lo, t_hi, |t| series[t])
}

/// Return probability of the simple walk on `ℤ²`: `(C(t, t/2)/2^t)²` for even `t`.
pub fn abelian_return_prob(t: usize) -> f64 {
    if t % 2 == 1 {
        return 0.0;
    }
    let s = (t / 2) as f64;
    let log_central = libm::lgamma(2.0 * s + 1.0) - 2.0 * libm::lgamma(s + 1.0) - 2.0 * s * std::f64::consts::LN_2;
    (2.0 * log_central).exp()
}

/// Same fit as [`exponent_estimate`] for the abelianized walk on `ℤ²`.
pub fn abelian_exponent(t_lo: usize, t_hi: usize) -> Result<ExponentReport> {
    fit_exponent(t_lo, t_hi, abelian_return_prob)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantReport {
    /// `(t, t²·p(t))`.
    pub rows: Vec<(usize, f64)>,
    /// `|c(t_{i+1}) − c(t_i)| / c(t_i)` for consecutive rows.
    pub variations: Vec<f64>,
    pub constant: f64,
}

/// The sequence `c(t) = t²·p(t)` over even `t`; its last entry is the
/// empirical constant.
pub fn constant_estimate(t_list: &[usize], qstar: i64, grid: usize) -> Result<ConstantReport> {
    let t_max = *t_list.iter().max().ok_or_else(|| Error::param("empty time list"))?;
    if t_max as i64 > qstar {
        return Err(Error::param(format!("t = {t_max} exceeds the resolution limit qstar = {qstar}")));
    }
    if t_list.iter().any(|t| t % 2 == 1 || *t == 0) {
        return Err(Error::param("constant estimate needs positive even times"));
    }
    let series = return_prob_fourier_series(t_max, qstar, grid)?;
    let rows: Vec<(usize, f64)> = t_list.iter().map(|&t| (t, (t * t) as f64 * series[t])).collect();
    let variations = rows.windows(2).map(|w| (w[1].1 - w[0].1).abs() / w[0].1).collect();
    let constant = rows.last().map(|r| r.1).unwrap_or(0.0);
    Ok(ConstantReport { rows, variations, constant })
}

fn sinh_kernel(tau: f64) -> f64 {
    if tau.abs() < 1e-4 {
        let t2 = tau * tau;
        1.0 - t2 / 6.0 + 7.0 * t2 * t2 / 360.0
    } else {
        tau / tau.sinh()
    }
}

/// `∫_{−∞}^{∞} τ/sinh τ dτ` by trapezoid sums with successive step halving.
/// The integrand is analytic in `|Im τ| < π` and decays like `|τ|e^{−|τ|}`,
/// so the sums converge geometrically in the number of halvings.
pub fn sinh_integral() -> f64 {
    let cutoff = 40.0;
    let mut h = 0.5;
    let mut prev = f64::NAN;
    loop {
        let n = (cutoff / h) as usize;
        let sum: f64 = sinh_kernel(0.0) + 2.0 * (1..=n).map(|j| sinh_kernel(j as f64 * h)).sum::<f64>();
        let value = sum * h;
        if (value - prev).abs() < 1e-14 || h < 1e-3 {
            return value;
        }
        prev = value;
        h *= 0.5;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_exact_values() {
        assert_eq!(return_prob_exact(0).unwrap(), 1.0);
        assert_eq!(return_prob_exact(1).unwrap(), 0.0);
        assert_eq!(return_prob_exact(2).unwrap(), 0.25);
    }

    #[test]
    fn cells_carry_unit_mass() {
        for (qstar, grid) in [(2, 1), (7, 3), (12, 12), (64, 8)] {
            let m: f64 = cells(qstar, grid).iter().map(|c| c.weight).sum();
            assert!((m - 1.0).abs() < 1e-12, "{qstar} {grid}: {m}");
        }
    }

    #[test]
    fn abelian_closed_form() {
        assert_eq!(abelian_return_prob(0), 1.0);
        assert!((abelian_return_prob(2) - 0.25).abs() < 1e-15);
        assert!((abelian_return_prob(4) - 9.0 / 64.0).abs() < 1e-15);
    }
}

//! Harper operators `H_x = U + U* + V + V*`, band structure at rational flux,
//! the Hofstadter butterfly, the Wilkinson expansion of the lowest bands,
//! band-width decay, Chambers-type identities, the Hermite truncation of the
//! continuum operator `h_θ`, and the Sunada ratio scan.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::reps::{build_rep, gcd, kazhdan_delta, kazhdan_form, RepPoint};
use crate::spectra::{charpoly_eval, eig_hermitian, eig_symmetric, periodic_jacobi_eigenvalues, ComplexMatrix, RealMatrix};

/// Adjacent bands closer than this are reported as touching.
pub const TOUCH_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BandSet {
    /// Ascending closed intervals `[e_min, e_max]`.
    pub bands: Vec<(f64, f64)>,
    /// Indices `n` such that band `n` and band `n+1` touch (gap below [`TOUCH_TOL`]).
    /// Touching bands are kept separate.
    pub touching: Vec<usize>,
}

impl BandSet {
    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.bands.iter().map(|(a, b)| b - a).collect()
    }

    pub fn midpoint(&self, n: usize) -> f64 {
        let (a, b) = self.bands[n];
        0.5 * (a + b)
    }

    pub fn measure(&self) -> f64 {
        self.widths().iter().sum()
    }

    /// Distance from `e` to the union of bands (zero inside).
    pub fn distance(&self, e: f64) -> f64 {
        self.bands
            .iter()
            .map(|&(a, b)| if e < a { a - e } else if e > b { e - b } else { 0.0 })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, e: f64, tol: f64) -> bool {
        self.distance(e) <= tol
    }
}

/// Diagonal `c_k = 2cos(2π(x2 + k·p)/q)` of `V + V*`.
pub fn harper_diagonal(x: &RepPoint) -> Vec<f64> {
    (0..x.q)
        .map(|k| {
            let kp = (k as i128 * x.p as i128).rem_euclid(x.q as i128) as f64;
            2.0 * (TAU * (x.x2 + kp) / x.q as f64).cos()
        })
        .collect()
}

pub fn harper_matrix(x: &RepPoint) -> Result<ComplexMatrix> {
    let r = build_rep(*x)?;
    Ok(&r.u + r.u.adjoint() + &r.v + r.v.adjoint())
}

/// Eigenvalues of `H_x`, ascending, by the structured `O(q²)` solver.
pub fn harper_eigenvalues(x: &RepPoint) -> Result<Vec<f64>> {
    periodic_jacobi_eigenvalues(&harper_diagonal(x), TAU * x.x3)
}

/// Monic characteristic polynomial `det(E − H_x)`.
fn monic_charpoly(x: &RepPoint, e: f64) -> Result<f64> {
    let h = harper_matrix(x)?;
    let sign = if x.q % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * charpoly_eval(&h, e)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChambersResiduals {
    /// `|F_x(E) − F_{(x1,x2,0)}(E) + 2cos2πx3 − 2|`
    pub r1: f64,
    /// `|F_{(x1,0,0)}(E*) + 4 − 2(cos2πx3 + cos2πx2)|` at the eigenvalue `E*` of `H_x` nearest `E`.
    pub r2: f64,
    pub eigenvalue: f64,
}

/// Residuals of the two Chambers identities, with `F_x(E) = det(E − H_x)`.
///
/// The monic normalization is the one for which the identities hold for
/// every `q`; the literal `det(H_x − E)` differs by `(−1)^q`.
pub fn chambers_residuals(x: &RepPoint, e: f64) -> Result<ChambersResiduals> {
    if x.q < 2 {
        return Err(Error::param("Chambers identities need q ≥ 2"));
    }
    let c2 = (TAU * x.x2).cos();
    let c3 = (TAU * x.x3).cos();
    let x_no3 = RepPoint { x3: 0.0, ..*x };
    let x_00 = RepPoint { x2: 0.0, x3: 0.0, ..*x };
    let r1 = (monic_charpoly(x, e)? - monic_charpoly(&x_no3, e)? + 2.0 * c3 - 2.0).abs();
    let eig = eig_hermitian(&harper_matrix(x)?, false)?.eigenvalues;
    let estar = eig
        .iter()
        .copied()
        .min_by(|a, b| (a - e).abs().total_cmp(&(b - e).abs()))
        .expect("q ≥ 2 eigenvalues");
    let r2 = (monic_charpoly(&x_00, estar)? + 4.0 - 2.0 * (c3 + c2)).abs();
    Ok(ChambersResiduals { r1, r2, eigenvalue: estar })
}

/// Real symmetric matrix unitarily equivalent to `H_x` at the corner
/// `(x2, x3) = (0, 0)`, or `(½, ½)` when `half` is set. At `x3 = ½` the
/// hopping phases multiply to `−1`, gauged onto the bond closing the ring.
pub fn corner_matrix(p: i64, q: i64, half: bool) -> RealMatrix {
    let x2 = if half { 0.5 } else { 0.0 };
    let diag = harper_diagonal(&RepPoint { p: p.rem_euclid(q.max(1)), q, x2, x3: 0.0 });
    let n = q as usize;
    let mut m = RealMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    for k in 0..n {
        let t = if half && k == n - 1 { -1.0 } else { 1.0 };
        let j = (k + 1) % n;
        m[(k, j)] += t;
        m[(j, k)] += t;
    }
    m
}

/// The `q` bands at flux `p/q`. Edges are the eigenvalues at the torus
/// corners `(x2, x3) = (0, 0)` and `(½, ½)`.
pub fn bands(p: i64, q: i64) -> Result<BandSet> {
    if q < 1 || gcd(p, q) != 1 {
        return Err(Error::param(format!("flux {p}/{q} must be reduced with q ≥ 1")));
    }
    if q == 1 {
        return Ok(BandSet { bands: vec![(-4.0, 4.0)], touching: vec![] });
    }
    let lo = eig_symmetric(&corner_matrix(p, q, false), false)?.0;
    let hi = eig_symmetric(&corner_matrix(p, q, true), false)?.0;
    let mut bands: Vec<(f64, f64)> = lo.iter().zip(&hi).map(|(&a, &b)| (a.min(b), a.max(b))).collect();
    let mut touching = Vec::new();
    for n in 0..bands.len() - 1 {
        let gap = bands[n + 1].0 - bands[n].1;
        if gap < TOUCH_TOL {
            // Round-off can leave a tiny overlap; pin both edges to the contact point.
            let m = 0.5 * (bands[n + 1].0 + bands[n].1);
            bands[n].1 = m;
            bands[n + 1].0 = m;
            touching.push(n);
        }
    }
    Ok(BandSet { bands, touching })
}

#[derive(Clone, Debug, Serialize)]
pub struct ButterflyRow {
    pub p: i64,
    pub q: i64,
    pub theta: f64,
    pub bands: BandSet,
}

/// One row per reduced `p/q ∈ [0, 1]` with `q ≤ q_max`, ordered by `(q, p)`.
pub fn butterfly(q_max: i64) -> Result<Vec<ButterflyRow>> {
    if !(1..=60).contains(&q_max) {
        return Err(Error::param(format!("q_max must lie in [1, 60], got {q_max}")));
    }
    let fluxes: Vec<(i64, i64)> = (1..=q_max)
        .flat_map(|q| (0..=q).filter(move |&p| gcd(p, q) == 1).map(move |p| (p, q)))
        .collect();
    fluxes
        .par_iter()
        .map(|&(p, q)| {
            Ok(ButterflyRow { p, q, theta: TAU * p as f64 / q as f64, bands: bands(p, q)? })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct WilkinsonReport {
    pub q: i64,
    pub theta: f64,
    /// `r_n = (mid(band_n) + 4)/θ`
    pub ratios: Vec<f64>,
    /// `|r_n − (2n+1)|`
    pub deviations: Vec<f64>,
    /// `max_n |r_n − (2n+1)| / θ`
    pub constant: f64,
}

pub fn wilkinson_check(q: i64, n_max: usize) -> Result<WilkinsonReport> {
    if q < 20 {
        return Err(Error::param(format!("Wilkinson check needs q ≥ 20, got {q}")));
    }
    if n_max > 5 || n_max as i64 >= q {
        return Err(Error::param(format!("n_max must be at most 5 and below q, got {n_max}")));
    }
    let theta = TAU / q as f64;
    let b = bands(1, q)?;
    let ratios: Vec<f64> = (0..=n_max).map(|n| (b.midpoint(n) + 4.0) / theta).collect();
    let deviations: Vec<f64> = ratios.iter().enumerate().map(|(n, r)| (r - (2 * n + 1) as f64).abs()).collect();
    let constant = deviations.iter().fold(0.0f64, |m, d| m.max(d / theta));
    Ok(WilkinsonReport { q, theta, ratios, deviations, constant })
}

#[derive(Clone, Debug, Serialize)]
pub struct BandwidthTable {
    /// `(q, largest band width at flux 1/q)`
    pub rows: Vec<(i64, f64)>,
    /// Least-squares slope of `ln(width)` against `q`.
    pub slope: f64,
    /// Width of the lowest band at flux `1/q`, for comparison.
    pub lowest_band_rows: Vec<(i64, f64)>,
    pub lowest_band_slope: f64,
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub fn bandwidth_table(q_min: i64, q_max: i64) -> Result<BandwidthTable> {
    if !(3 <= q_min && q_min < q_max && q_max <= 16) {
        return Err(Error::param(format!("need 3 ≤ q_min < q_max ≤ 16, got {q_min}..{q_max}")));
    }
    let mut rows = Vec::new();
    let mut lowest = Vec::new();
    for q in q_min..=q_max {
        let w = bands(1, q)?.widths();
        rows.push((q, w.iter().copied().fold(0.0, f64::max)));
        lowest.push((q, w[0]));
    }
    let fit = |r: &[(i64, f64)]| {
        let xs: Vec<f64> = r.iter().map(|&(q, _)| q as f64).collect();
        let ys: Vec<f64> = r.iter().map(|&(_, w)| w.ln()).collect();
        ls_slope(&xs, &ys)
    };
    Ok(BandwidthTable { slope: fit(&rows), lowest_band_slope: fit(&lowest), rows, lowest_band_rows: lowest })
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Matrix elements `⟨n+j| cos(k·P) |n⟩` for even `j`, with `P` the momentum
/// operator, in the Hermite basis: `(k/√2)^j e^{−x/2} √(n!/(n+j)!) L_n^{(j)}(x)`,
/// `x = k²/2`. Returns the values for `n = 0..count`.
fn displacement_band(k: f64, j: usize, count: usize) -> Vec<f64> {
    let x = 0.5 * k * k;
    let jf = j as f64;
    // g_n = √(j!) √(n!/(n+j)!) L_n^{(j)}(x), carried with a separate log scale.
    let mut out = Vec::with_capacity(count);
    let log_pref = jf * (k / 2f64.sqrt()).ln() - 0.5 * ln_factorial(j) - 0.5 * x;
    let (mut g_prev, mut g) = (0.0f64, 1.0f64);
    let mut log_scale = 0.0f64;
    for n in 0..count {
        out.push(g * (log_pref + log_scale).exp());
        let nf = n as f64;
        let g_next = ((2.0 * nf + 1.0 + jf - x) * g - (nf * (nf + jf)).sqrt() * g_prev)
            / ((nf + 1.0) * (nf + 1.0 + jf)).sqrt();
        g_prev = g;
        g = g_next;
        if g.abs() > 1e200 {
            g *= 1e-200;
            g_prev *= 1e-200;
            log_scale += 200.0 * 10f64.ln();
        }
    }
    out
}

/// `N×N` Hermite-basis matrix of `h_θ = −2cos(√θ·P) − 2cos(√θ·s)`, built from
/// exact displacement-operator matrix elements. Only entries with
/// `m − n ≡ 0 (mod 4)` survive, where they equal `−4⟨m|cos(√θ P)|n⟩`.
pub fn htheta_matrix(theta: f64, n: usize) -> RealMatrix {
    let k = theta.sqrt();
    let mut h = RealMatrix::zeros(n, n);
    for j in (0..n).step_by(4) {
        let band = displacement_band(k, j, n - j);
        for (i, val) in band.into_iter().enumerate() {
            h[(i + j, i)] = -4.0 * val;
            h[(i, i + j)] = -4.0 * val;
        }
    }
    h
}

/// Ascending eigenvalues of the `N×N` Hermite truncation of `h_θ`, `θ = 2π/q`.
/// The matrix splits into four blocks by basis index mod 4.
pub fn htheta_truncated_spectrum(q: i64, n: usize) -> Result<Vec<f64>> {
    if n < 50 {
        return Err(Error::param(format!("truncation N must be at least 50, got {n}")));
    }
    if q < 1 {
        return Err(Error::param("q must be positive"));
    }
    let h = htheta_matrix(TAU / q as f64, n);
    let mut all = Vec::with_capacity(n);
    for r in 0..4 {
        let idx: Vec<usize> = (r..n).step_by(4).collect();
        let block = RealMatrix::from_fn(idx.len(), idx.len(), |a, b| h[(idx[a], idx[b])]);
        all.extend(eig_symmetric(&block, false)?.0);
    }
    all.sort_by(f64::total_cmp);
    Ok(all)
}

#[derive(Clone, Debug, Serialize)]
pub struct SunadaSample {
    pub point: RepPoint,
    pub lambda0: f64,
    pub delta_lower: f64,
    pub delta_upper: f64,
}

impl SunadaSample {
    pub fn ratio_upper(&self) -> f64 {
        self.lambda0 / self.delta_upper.powi(2)
    }

    pub fn ratio_lower(&self) -> f64 {
        self.lambda0 / self.delta_lower.powi(2)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SunadaScan {
    pub samples: Vec<SunadaSample>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Draws `sample_count` nontrivial representation points with `q ≤ 12` and
/// compares `λ₀(4I − H_x)` with the squared Kazhdan bracket.
pub fn sunada_ratio_scan(sample_count: usize, seed: u64) -> Result<SunadaScan> {
    if sample_count < 20 {
        return Err(Error::param(format!("need at least 20 samples, got {sample_count}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(sample_count);
    while samples.len() < sample_count {
        let q: i64 = rng.gen_range(1..=12);
        let ps: Vec<i64> = (0..=q).filter(|&p| gcd(p, q) == 1).collect();
        let p = ps[rng.gen_range(0..ps.len())];
        let x = RepPoint::new(p, q, rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))?;
        if x.is_trivial() {
            continue;
        }
        let rep = build_rep(x)?;
        let lambda0 = eig_hermitian(&kazhdan_form(&rep), false)?.eigenvalues[0];
        let (delta_lower, delta_upper) = kazhdan_delta(&rep)?;
        samples.push(SunadaSample { point: x, lambda0, delta_lower, delta_upper });
    }
    let ratios = samples.iter().flat_map(|s| [s.ratio_upper(), s.ratio_lower()]);
    let (min_ratio, max_ratio) = ratios.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)));
    Ok(SunadaScan { samples, min_ratio, max_ratio })
}

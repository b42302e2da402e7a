use std::f64::consts::PI;

use nilbloch::oscillators::{
    bessel_i, bessel_k, eigs, gauss_legendre, hurwitz_zeta, ladder_matrices, oscillator_matrix,
    oscillator_matrix_scaled, resolvent_kernel, zeta, zeta_integral, OscillatorSpec,
};
use nilbloch::spectra::{eig_symmetric, RealMatrix};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Compare two matrices on the first `rows` rows.
fn rows_close(a: &RealMatrix, b: &RealMatrix, rows: usize, tol: f64) -> bool {
    (0..rows).all(|i| (0..a.ncols()).all(|j| (a[(i, j)] - b[(i, j)]).abs() <= tol))
}

#[test]
fn ladder_examples() {
    let h = ladder_matrices(2).unwrap();
    assert_eq!(h.annihilation, RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]));
    assert!(ladder_matrices(1).is_err());

    let n = 30;
    let h = ladder_matrices(n).unwrap();
    assert_eq!(h.creation, h.annihilation.transpose());
    let number = &h.creation * &h.annihilation;
    for i in 0..n {
        assert!((number[(i, i)] - i as f64).abs() < 1e-12);
    }
    let comm = &h.annihilation * &h.creation - &h.creation * &h.annihilation;
    for i in 0..n {
        let expect = if i == n - 1 { -((n - 1) as f64) } else { 1.0 };
        assert!((comm[(i, i)] - expect).abs() < 1e-12, "row {i}");
    }
    let ho = &h.position * &h.position - &h.derivative * &h.derivative;
    for i in 0..n - 2 {
        assert!((ho[(i, i)] - (2 * i + 1) as f64).abs() < 1e-12);
    }
}

/// Action of `s`, `d/ds`, `s²`, `s·d/ds` and `(d/ds)²` on Hermite functions.
#[test]
fn ladder_identities() {
    let n = 40;
    let h = ladder_matrices(n).unwrap();
    let rows = n - 4;
    let exact = |f: &dyn Fn(usize, usize) -> f64| RealMatrix::from_fn(n, n, |i, j| f(i, j));
    let sq = |x: usize| (x as f64).sqrt();
    // Column m holds the expansion of (operator ψ_m).
    let s = exact(&|i, j| if i + 1 == j { sq(j) } else if j + 1 == i { sq(i) } else { 0.0 } / 2f64.sqrt());
    let d = exact(&|i, j| if i + 1 == j { sq(j) } else if j + 1 == i { -sq(i) } else { 0.0 } / 2f64.sqrt());
    let s2 = exact(&|i, j| match () {
        _ if i == j => i as f64 + 0.5,
        _ if i + 2 == j => 0.5 * sq(j * (j - 1)),
        _ if j + 2 == i => 0.5 * sq(i * (i - 1)),
        _ => 0.0,
    });
    let sds = exact(&|i, j| match () {
        _ if i == j => -0.5,
        _ if i + 2 == j => 0.5 * sq(j * (j - 1)),
        _ if j + 2 == i => -0.5 * sq(i * (i - 1)),
        _ => 0.0,
    });
    let d2 = exact(&|i, j| match () {
        _ if i == j => -(i as f64 + 0.5),
        _ if i + 2 == j => 0.5 * sq(j * (j - 1)),
        _ if j + 2 == i => 0.5 * sq(i * (i - 1)),
        _ => 0.0,
    });
    assert!(rows_close(&h.position, &s, rows, 1e-12));
    assert!(rows_close(&h.derivative, &d, rows, 1e-12));
    assert!(rows_close(&(&h.position * &h.position), &s2, rows, 1e-12));
    assert!(rows_close(&(&h.position * &h.derivative), &sds, rows, 1e-12));
    assert!(rows_close(&(&h.derivative * &h.derivative), &d2, rows, 1e-12));
}

#[test]
fn oscillator_matrix_examples() {
    let ho = oscillator_matrix(&OscillatorSpec::harmonic(), 60).unwrap();
    for i in 0..60 {
        assert!((ho[(i, i)] - (2 * i + 1) as f64).abs() < 1e-12);
    }
    assert_eq!(ho, ho.transpose());
    assert!(ho.iter().enumerate().all(|(k, v)| k % 61 == 0 || v.abs() < 1e-12));

    let q = oscillator_matrix(&OscillatorSpec::quartic(), 60).unwrap();
    assert!((q[(0, 0)] - 1.25).abs() < 1e-14);
    assert_eq!(q, q.transpose());
    for i in 0..60usize {
        for j in 0..60usize {
            if i.abs_diff(j) > 4 {
                assert_eq!(q[(i, j)], 0.0);
            }
        }
    }
    assert!(oscillator_matrix(&OscillatorSpec::quartic(), 40).is_err());
    assert!(OscillatorSpec::new(3, 1.0, 1.0).is_err());
    assert!(OscillatorSpec::new(1, -1.0, 1.0).is_err());
}

#[test]
fn harmonic_eigenvalues() {
    let ev = eigs(&OscillatorSpec::harmonic(), 200, 100).unwrap();
    for (k, l) in ev.iter().enumerate() {
        assert!((l - (2 * k + 1) as f64).abs() < 1e-10, "k={k} {l}");
    }
    let (a, b) = (0.7, 1.3);
    let ev = eigs(&OscillatorSpec::new(1, a, b).unwrap(), 100, 50).unwrap();
    for (k, l) in ev.iter().enumerate() {
        let expect = 4.0 * PI * a * b * (k as f64 + 0.5);
        assert!(rel(*l, expect) < 1e-8, "k={k}: {l} vs {expect}");
    }
    assert!(eigs(&OscillatorSpec::harmonic(), 100, 51).is_err());
    assert!(eigs(&OscillatorSpec::harmonic(), 100, 0).is_err());
}

#[test]
fn quartic_eigenvalues() {
    let ev = eigs(&OscillatorSpec::quartic(), 300, 150).unwrap();
    assert!((ev[0] - 1.0603620904841828).abs() < 1e-8, "{}", ev[0]);
    assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    let fine = eigs(&OscillatorSpec::quartic(), 600, 150).unwrap();
    for (a, b) in ev.iter().zip(&fine) {
        assert!((a - b).abs() <= 1e-8 * (1.0 + b));
    }
}

#[test]
fn zeta_examples() {
    let h = zeta(&OscillatorSpec::harmonic(), 2.0, 400, 200).unwrap();
    assert!((h.zeta - PI * PI / 8.0).abs() < 1e-10, "{}", h.zeta);
    assert_eq!(h.method, "eigensum");

    // Ground state dominance: what is left over is the next eigenvalue.
    let h20 = zeta(&OscillatorSpec::harmonic(), 20.0, 400, 200).unwrap();
    assert!((h20.zeta - 1.0 - 3f64.powi(-20)).abs() < 1e-12);
    let q = OscillatorSpec::quartic();
    let lam = eigs(&q, 400, 200).unwrap();
    let q20 = zeta(&q, 20.0, 400, 200).unwrap();
    assert!(rel(q20.zeta, lam[0].powf(-20.0)) < 1e-9);

    let a = zeta(&q, 3.5, 600, 300).unwrap();
    let b = zeta(&q, 3.5, 1200, 600).unwrap();
    assert!((a.zeta - b.zeta).abs() < 1e-6, "{} vs {}", a.zeta, b.zeta);
    assert!((b.weyl_exponent - 4.0 / 3.0).abs() < 0.05, "{}", b.weyl_exponent);

    assert!(zeta(&OscillatorSpec::harmonic(), 1.0, 100, 50).is_err());
    assert!(zeta(&q, 0.75, 100, 50).is_err());
    assert!(zeta(&q, 2.0, 100, 4).is_err());
}

#[test]
fn zeta_decreases_in_s() {
    let q = OscillatorSpec::quartic();
    let vals: Vec<f64> = [0.9, 1.2, 2.0, 3.0, 3.5, 5.0].iter().map(|&s| zeta(&q, s, 600, 300).unwrap().zeta).collect();
    assert!(vals.windows(2).all(|w| w[0] > w[1]), "{vals:?}");
}

/// The odd-integer spectrum gives `(1 − 2^{−s})ζ(s)`.
#[test]
fn harmonic_zeta_matches_riemann() {
    for s in [2.0, 3.0, 4.0] {
        // Direct sum plus the Euler–Maclaurin remainder.
        let n = 1_000_000u32;
        let head: f64 = (1..n).rev().map(|k| (k as f64).powf(-s)).sum();
        let nf = n as f64;
        let riemann = head + nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s) + s / 12.0 * nf.powf(-s - 1.0);
        let expect = (1.0 - 2f64.powf(-s)) * riemann;
        let got = zeta(&OscillatorSpec::harmonic(), s, 400, 200).unwrap().zeta;
        assert!((got - expect).abs() < 1e-8, "s={s}: {got} vs {expect}");
        assert!((hurwitz_zeta(s, 1.0) - riemann).abs() < 1e-12);
    }
}

#[test]
fn bessel_examples() {
    for &mu in &[0.25, 1.0 / 6.0, 0.5, 0.8] {
        for i in 0..40 {
            let z = 0.1 + i as f64 * 0.5;
            let h = 1e-5 * z;
            let dk = (bessel_k(mu, z + h).unwrap() - bessel_k(mu, z - h).unwrap()) / (2.0 * h);
            let di = (bessel_i(mu, z + h).unwrap() - bessel_i(mu, z - h).unwrap()) / (2.0 * h);
            let w = bessel_i(mu, z).unwrap() * dk - di * bessel_k(mu, z).unwrap();
            assert!(rel(w, -1.0 / z) < 1e-8, "mu={mu} z={z}: {w}");
        }
        let ks: Vec<f64> = (1..200).map(|i| bessel_k(mu, i as f64 * 0.2).unwrap()).collect();
        assert!(ks.iter().all(|&k| k > 0.0) && ks.windows(2).all(|w| w[0] > w[1]));
        let z: f64 = 1e-3;
        let lead = (z / 2.0).powf(mu) / libm::tgamma(mu + 1.0);
        assert!(rel(bessel_i(mu, z).unwrap(), lead) < 1e-6);
    }
    // K_{1/2}(z) = √(π/2z) e^{−z}
    for z in [0.3f64, 2.0, 10.0, 40.0] {
        let exact = (PI / (2.0 * z)).sqrt() * (-z).exp();
        assert!(rel(bessel_k(0.5, z).unwrap(), exact) < 1e-12);
    }
    assert!(bessel_k(0.5, 0.0).is_err() && bessel_i(0.5, -1.0).is_err());
}

#[test]
fn kernel_symmetry_and_positivity() {
    for m in [1, 2] {
        for i in -12..=12 {
            for j in -12..=12 {
                let (a, b) = (i as f64 * 0.25, j as f64 * 0.25 + 0.1);
                let r = resolvent_kernel(m, a, b).unwrap();
                assert_eq!(r, resolvent_kernel(m, b, a).unwrap());
                assert!(r > 0.0, "M={m} ({a},{b})");
            }
        }
    }
    assert!(resolvent_kernel(3, 0.0, 1.0).is_err());
}

/// `(−D² + q^{2M}) R(·, q₂) = 0` off the diagonal, with unit derivative jump.
#[test]
fn kernel_solves_the_equation() {
    let h = 1e-3;
    for m in [1, 2] {
        let pot = |q: f64| q.powi(2 * m as i32);
        for &q2 in &[-1.3, 0.0, 0.4, 2.0] {
            let r = |q: f64| resolvent_kernel(m, q, q2).unwrap();
            for &q in &[-3.0, -1.0, -0.2, 0.3, 1.1, 2.7] {
                if (q - q2).abs() < 0.05 {
                    continue;
                }
                let lap = (r(q + h) - 2.0 * r(q) + r(q - h)) / (h * h);
                let res = (-lap + pot(q) * r(q)).abs();
                assert!(res <= 1e-4, "M={m} q={q} q2={q2}: {res}");
            }
            let k = 1e-5;
            let right = (-3.0 * r(q2) + 4.0 * r(q2 + k) - r(q2 + 2.0 * k)) / (2.0 * k);
            let left = (3.0 * r(q2) - 4.0 * r(q2 - k) + r(q2 - 2.0 * k)) / (2.0 * k);
            assert!((right - left + 1.0).abs() < 1e-6, "M={m} q2={q2}: jump {}", right - left);
        }
    }
}

/// Hermite function `ψ_k(s)` of frequency `omega`, all `k < n`.
fn hermite_functions(n: usize, omega: f64, s: f64) -> Vec<f64> {
    let x = omega.sqrt() * s;
    let mut out = vec![omega.powf(0.25) * PI.powf(-0.25) * (-0.5 * x * x).exp()];
    out.push(2f64.sqrt() * x * out[0]);
    for k in 1..n - 1 {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Eigen-expansion of the inverse operator against the closed form.
#[test]
fn kernel_matches_eigen_expansion() {
    let spec = OscillatorSpec::quartic();
    let n = 600;
    let omega = spec.basis_frequency(n);
    let (lam, vecs) = eig_symmetric(&oscillator_matrix_scaled(&spec, n, omega).unwrap(), true).unwrap();
    let vecs = vecs.unwrap();
    let (q1, q2) = (0.5, 1.0);
    let p1 = hermite_functions(n, omega, q1);
    let p2 = hermite_functions(n, omega, q2);
    let mut sum = 0.0;
    for k in 0..n / 2 {
        let col = vecs.column(k);
        let f1: f64 = col.iter().zip(&p1).map(|(c, p)| c * p).sum();
        let f2: f64 = col.iter().zip(&p2).map(|(c, p)| c * p).sum();
        sum += f1 * f2 / lam[k];
    }
    let r = resolvent_kernel(2, q1, q2).unwrap();
    assert!((sum - r).abs() < 1e-3, "expansion {sum} vs kernel {r}");
}

#[test]
fn gauss_legendre_is_exact() {
    for n in [2, 5, 8, 16] {
        let (x, w) = gauss_legendre(n);
        for deg in 0..2 * n {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}");
        }
    }
}

#[test]
fn zeta_integral_examples() {
    let h = zeta_integral(1, 2, 40.0, 8).unwrap();
    assert!((h.zeta - PI * PI / 8.0).abs() < 1e-6, "{h:?}");
    assert_eq!(h.method, "integral");
    assert!(h.richardson_gap <= 1e-4);

    let q = OscillatorSpec::quartic();
    for s in [2u32, 3] {
        let int = zeta_integral(2, s, 10.0, 8).unwrap();
        let sum = zeta(&q, s as f64, 600, 300).unwrap();
        assert!(rel(int.zeta, sum.zeta) < 1e-4, "s={s}: {} vs {}", int.zeta, sum.zeta);
    }
    assert!(zeta_integral(1, 4, 10.0, 8).is_err());
    assert!(zeta_integral(1, 2, 5.0, 8).is_err());
    assert!(zeta_integral(3, 2, 10.0, 8).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Modified oscillator spectra depend on `a·b` only.
    #[test]
    fn modified_spectrum_scales(a in 0.2f64..3.0, b in 0.2f64..3.0) {
        let ev = eigs(&OscillatorSpec::new(1, a, b).unwrap(), 60, 20).unwrap();
        for (k, l) in ev.iter().enumerate() {
            prop_assert!(rel(*l, 4.0 * PI * a * b * (k as f64 + 0.5)) < 1e-10);
        }
    }

    #[test]
    fn kernel_symmetric(m in 1u32..3, a in -6.0f64..6.0, b in -6.0f64..6.0) {
        let r = resolvent_kernel(m, a, b).unwrap();
        prop_assert!(r > 0.0);
        prop_assert_eq!(r, resolvent_kernel(m, b, a).unwrap());
    }
}

use std::f64::consts::PI;

use nilbloch::heis::GroupElement;
use nilbloch::oscillators::gauss_legendre;
use nilbloch::walks::{
    abelian_exponent, abelian_return_prob, constant_estimate, convolve, exponent_estimate, fourier_tolerance,
    return_prob_exact, return_prob_fourier, return_prob_fourier_series, sinh_integral, step_distribution,
    walk_distribution, Distribution, MAX_EXACT_TIME,
};
use proptest::prelude::*;

#[test]
fn step_examples() {
    let s = step_distribution();
    assert_eq!(s.support_len(), 4);
    assert!(s.weights.values().all(|&w| w == 0.25));
    assert_eq!(s.mass(), 1.0);
    for g in s.weights.keys() {
        assert_eq!(s.get(g), s.get(&g.inverse()));
    }
}

#[test]
fn convolve_examples() {
    let s = step_distribution();
    let e = Distribution::delta(GroupElement::IDENTITY);
    assert_eq!(convolve(&e, &s).unwrap(), s);
    assert_eq!(convolve(&s, &e).unwrap(), s);
    let two = convolve(&s, &s).unwrap();
    assert_eq!(two.get(&GroupElement::IDENTITY), 0.25);
    assert!((two.mass() - 1.0).abs() < 1e-12);
}

#[test]
fn exact_examples() {
    assert_eq!(return_prob_exact(0).unwrap(), 1.0);
    assert_eq!(return_prob_exact(1).unwrap(), 0.0);
    assert_eq!(return_prob_exact(2).unwrap(), 0.25);
    assert_eq!(return_prob_exact(7).unwrap(), 0.0);
    assert!(return_prob_exact(MAX_EXACT_TIME + 1).is_err());
    // 4 steps: 36 of the 256 words return (Z² count), minus the 4 commutators
    // and their 4 inverses, which end at w^{±1}.
    assert!((return_prob_exact(4).unwrap() - 28.0 / 256.0).abs() < 1e-15);
}

/// The collision shortcut agrees with the full t-step law.
#[test]
fn collision_matches_full_law() {
    for t in [2, 4, 6, 8, 10] {
        let full = walk_distribution(t).unwrap().get(&GroupElement::IDENTITY);
        assert!((full - return_prob_exact(t).unwrap()).abs() < 1e-15, "t={t}");
    }
}

#[test]
fn mass_and_symmetry() {
    let mut d = Distribution::delta(GroupElement::IDENTITY);
    for t in 1..=12 {
        d = convolve(&d, &step_distribution()).unwrap();
        assert!((d.mass() - 1.0).abs() < 1e-10, "t={t}");
        for (g, w) in &d.weights {
            assert!(*w > 0.0);
            assert!((w - d.get(&g.inverse())).abs() < 1e-15, "t={t} g={g}");
            assert_eq!(g.parity() as usize, t % 2);
        }
    }
}

#[test]
fn exact_return_is_nonincreasing() {
    let p: Vec<f64> = (0..=30).step_by(2).map(|t| return_prob_exact(t).unwrap()).collect();
    assert!(p.windows(2).all(|w| w[0] >= w[1]), "{p:?}");
}

#[test]
fn fourier_examples() {
    let (qstar, grid) = (64, 8);
    let tol = fourier_tolerance(qstar, grid);
    let series = return_prob_fourier_series(9, qstar, grid).unwrap();
    assert!((series[0] - 1.0).abs() < 1e-12);
    assert!((series[2] - 0.25).abs() < tol);
    for t in [1, 3, 5, 7, 9] {
        assert!(series[t].abs() <= tol, "t={t}: {}", series[t]);
    }
    assert_eq!(return_prob_fourier(2, qstar, grid).unwrap(), series[2]);
    assert!(return_prob_fourier(2, 1, 8).is_err());
    assert!(return_prob_fourier(2, 64, 0).is_err());
}

#[test]
fn fourier_agrees_with_exact() {
    let (qstar, grid) = (128, 12);
    let series = return_prob_fourier_series(30, qstar, grid).unwrap();
    let worst = (0..=30)
        .step_by(2)
        .map(|t| (series[t] - return_prob_exact(t).unwrap()).abs())
        .fold(0.0, f64::max);
    assert!(worst <= fourier_tolerance(qstar, grid), "max gap {worst}");
}

#[test]
fn abelian_control() {
    assert_eq!(abelian_return_prob(0), 1.0);
    assert_eq!(abelian_return_prob(3), 0.0);
    assert!((abelian_return_prob(2) - 0.25).abs() < 1e-15);
    assert!((abelian_return_prob(4) - 36.0 / 256.0).abs() < 1e-14);
    let r = abelian_exponent(64, 256).unwrap();
    assert!((-1.1..=-0.9).contains(&r.slope), "{}", r.slope);
    assert!(abelian_exponent(10, 10).is_err());
}

/// Finer flux resolution brings the log-log slope closer to −2.
#[test]
fn slope_improves_with_resolution() {
    let coarse = exponent_estimate(64, 128, 128, 12).unwrap();
    let fine = exponent_estimate(64, 128, 256, 12).unwrap();
    assert!((fine.slope + 2.0).abs() < (coarse.slope + 2.0).abs(), "{} {}", coarse.slope, fine.slope);
    assert!(fine.points.iter().all(|&(t, p)| t % 2 == 0 && p > 0.0));
    assert!(exponent_estimate(64, 300, 256, 12).is_err());
}

/// `t²p(t)` settles once the twist grid resolves the walk, roughly `t ≲ grid²/4`.
#[test]
fn constant_sequence() {
    let c = constant_estimate(&[8, 16, 32], 128, 12).unwrap();
    assert!(c.rows.iter().all(|r| r.1 > 0.0));
    assert!(c.variations.iter().all(|&v| v <= 0.1), "{:?}", c.variations);
    assert_eq!(c.constant, c.rows[2].1);
    let refined = constant_estimate(&[8, 16, 32], 128, 24).unwrap();
    assert!((refined.constant - c.constant).abs() <= 0.03 * c.constant, "{} {}", c.constant, refined.constant);
    assert!(constant_estimate(&[15], 128, 12).is_err());
    assert!(constant_estimate(&[], 128, 12).is_err());
    assert!(constant_estimate(&[256], 128, 12).is_err());
}

#[test]
fn sinh_examples() {
    let v = sinh_integral();
    assert!((v - PI * PI / 2.0).abs() < 1e-8, "{v}");
    // Half line by composite Gauss–Legendre.
    let (x, w) = gauss_legendre(16);
    let mut half = 0.0;
    for panel in 0..80 {
        let (a, b) = (panel as f64 * 0.5, panel as f64 * 0.5 + 0.5);
        for (xi, wi) in x.iter().zip(&w) {
            let t = 0.5 * (a + b) + 0.25 * xi;
            half += 0.25 * wi * t / t.sinh();
        }
    }
    assert!((2.0 * half - v).abs() < 1e-10);
    assert!(((PI * PI / 2.0) / (2.0 * PI).powi(2) - 0.125).abs() < 1e-15);
}

fn small_distribution() -> impl Strategy<Value = Distribution> {
    prop::collection::vec(((-3i64..4, -3i64..4, -3i64..4), 0.01f64..1.0), 1..12).prop_map(|items| {
        let total: f64 = items.iter().map(|(_, w)| w).sum();
        let mut d = Distribution::default();
        for ((a, b, c), w) in items {
            *d.weights.entry(GroupElement::new(a, b, c)).or_insert(0.0) += w / total;
        }
        d
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_preserves_mass(a in small_distribution(), b in small_distribution(), c in small_distribution()) {
        let ab = convolve(&a, &b).unwrap();
        prop_assert!((ab.mass() - 1.0).abs() < 1e-12);
        let left = convolve(&ab, &c).unwrap();
        let right = convolve(&a, &convolve(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left.support_len(), right.support_len());
        for (g, w) in &left.weights {
            prop_assert!((w - right.get(g)).abs() < 1e-12);
        }
    }
}

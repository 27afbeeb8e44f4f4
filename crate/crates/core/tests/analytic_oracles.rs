//! Closed-form engine against independent oracles: explicit field sums,
//! trapezoidal quadrature of the Gaussian average, and grid sweeps.

use std::f64::consts::PI;

use cohom::analytic::{
    classical_baseline_g2, classical_g2_gaussian, coincidence_r13, coincidence_r24,
    ensemble_coincidence, ensemble_intensity, local_intensity, port_fields,
    uniform_limit_threshold, visibility, I0,
};
use cohom::optics::{intensity, propagate_reference};

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

/// Trapezoid rule for a Gaussian average over +-12 sigma; spectrally accurate
/// for smooth integrands that vanish at the ends.
fn gaussian_average(sigma: f64, f: impl Fn(f64) -> f64) -> f64 {
    let n = 20_000;
    let h = 24.0 * sigma / n as f64;
    let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
    (0..=n)
        .map(|k| {
            let x = -12.0 * sigma + h * k as f64;
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            w * norm * (-0.5 * (x / sigma).powi(2)).exp() * f(x)
        })
        .sum::<f64>()
        * h
}

#[test]
fn local_intensity_matches_port_fields_on_10_cubed_grid() {
    let dfs = grid(-2.0 * PI * 5e6, 2.0 * PI * 5e6, 10);
    let taus = grid(0.0, 2e-6, 10);
    for &df in &dfs {
        for &t1 in &taus {
            for &t2 in &taus {
                let pf = port_fields(df, t1, t2);
                for k in 1..=4u8 {
                    let closed = local_intensity(k, df, t1, t2).unwrap();
                    let fields = intensity(pf.port(k).unwrap());
                    assert!(
                        (closed - fields).abs() <= 1e-12 * fields.abs().max(I0),
                        "port {k} df {df} t1 {t1} t2 {t2}: {closed} vs {fields}"
                    );
                }
            }
        }
    }
}

#[test]
fn local_intensity_oracle_cos_squared() {
    // |(e^{-iT} + e^{iT}) / 2|^2 = cos^2 T with T = df (tau1 + tau2).
    for &df in &[0.0, 1.0e5, -7.7e6, 3.0e7] {
        for &(t1, t2) in &[(1e-6, 1e-6), (0.2e-6, 1.3e-6)] {
            let t = df * (t1 + t2);
            let i1 = local_intensity(1, df, t1, t2).unwrap();
            let i3 = local_intensity(3, df, t1, t2).unwrap();
            assert!((i1 - t.cos().powi(2)).abs() < 1e-12);
            assert!((i3 - t.sin().powi(2)).abs() < 1e-12);
        }
    }
}

#[test]
fn port_pairs_sum_to_i0_exactly() {
    for &df in &grid(-1e8, 1e8, 101) {
        for &t in &grid(0.0, 3e-6, 31) {
            let i: Vec<f64> = (1..=4u8)
                .map(|k| local_intensity(k, df, t, 0.7 * t).unwrap())
                .collect();
            assert_eq!(i[0] + i[2], I0);
            assert_eq!(i[1] + i[3], I0);
        }
    }
}

#[test]
fn unit_photon_pipeline_is_half_the_port_intensity() {
    let f = propagate_reference(1.0, 2.3e6, 1e-6, 0.4e-6, 1.0);
    for (k, field) in (1..=4u8).zip(&f) {
        let want = local_intensity(k, 2.3e6, 1e-6, 0.4e-6).unwrap() / 2.0;
        assert!((intensity(field) - want).abs() < 1e-14);
    }
}

#[test]
fn ensemble_matches_quadrature_to_1e_minus_6() {
    for &x in &grid(0.0, 4.0, 17) {
        for &(t1, t2) in &[(1e-6, 1e-6), (0.25e-6, 1.5e-6)] {
            let sigma = x / (t1 + t2);
            for k in 1..=4u8 {
                let closed = ensemble_intensity(k, sigma, t1, t2).unwrap();
                let quad = if sigma == 0.0 {
                    local_intensity(k, 0.0, t1, t2).unwrap()
                } else {
                    gaussian_average(sigma, |df| local_intensity(k, df, t1, t2).unwrap())
                };
                assert!(
                    (closed - quad).abs() <= 1e-6,
                    "x {x} port {k}: {closed} vs {quad}"
                );
            }
        }
    }
}

#[test]
fn visibility_closed_form() {
    let (t1, t2) = (0.9e-6, 1.1e-6);
    for &sigma in &[0.0f64, 1e5, 4e5, 2e6] {
        let want = gaussian_average(sigma.max(1e-30), |df| (2.0 * df * (t1 + t2)).cos());
        let want = if sigma == 0.0 { 1.0 } else { want };
        assert!((visibility(sigma, t1, t2) - want).abs() < 1e-9);
    }
}

#[test]
fn uniform_intensity_limit() {
    assert!(uniform_limit_threshold() <= 1.52);
    let (t1, t2) = (1e-6, 1e-6);
    for &x in &grid(1.52, 20.0, 300) {
        let sigma = x / (t1 + t2);
        for k in 1..=4u8 {
            let dev = (ensemble_intensity(k, sigma, t1, t2).unwrap() - I0 / 2.0).abs() / (I0 / 2.0);
            assert!(dev < 0.01, "x {x}: {dev}");
        }
    }
    // Just below the threshold the deviation exceeds 1%.
    let sigma = 1.45 / (t1 + t2);
    assert!((ensemble_intensity(1, sigma, t1, t2).unwrap() - 0.5).abs() / 0.5 > 0.01);
}

#[test]
fn hom_coincidences_vanish_on_50_cubed_grid() {
    let dfs = grid(-2.0 * PI * 5e6, 2.0 * PI * 5e6, 50);
    let taus = grid(0.0, 2e-6, 50);
    let mut worst: f64 = 0.0;
    for &df in &dfs {
        for &t1 in &taus {
            for &t2 in &taus {
                worst = worst.max(coincidence_r13(df, t1, t2).abs());
                worst = worst.max(coincidence_r24(df, t1, t2).abs());
            }
        }
    }
    assert!(worst <= 1e-12, "{worst}");
    assert_eq!(ensemble_coincidence((1, 3), 2e6, 1e-6, 1e-6).unwrap(), 0.0);
    assert!(ensemble_coincidence((1, 2), 2e6, 1e-6, 1e-6).is_err());
}

#[test]
fn classical_baseline_values() {
    assert!(classical_baseline_g2(1).is_err());
    assert!((classical_baseline_g2(2).unwrap() - 1.0).abs() < 1e-12);
    for n in 3..64 {
        let g = classical_baseline_g2(n).unwrap();
        assert!((g - 0.5).abs() < 1e-12, "n {n}: {g}");
    }
}

#[test]
fn classical_gaussian_g2_against_quadrature() {
    let (t1, t2) = (1e-6, 1e-6);
    for &x in &[0.05, 0.2, 0.5, 1.0, 2.0, 5.0] {
        let sigma = x / (t1 + t2);
        let phase = |df: f64| 2.0 * df * (t1 + t2);
        let i1 = |df: f64| 0.5 * (1.0 + phase(df).cos());
        let i3 = |df: f64| 0.5 * (1.0 - phase(df).cos());
        let m13 = gaussian_average(sigma, |df| i1(df) * i3(df));
        let m1 = gaussian_average(sigma, i1);
        let m3 = gaussian_average(sigma, i3);
        let want = m13 / (m1 * m3);
        let got = classical_g2_gaussian(sigma, t1, t2);
        assert!((got - want).abs() < 1e-8, "x {x}: {got} vs {want}");
    }
    assert_eq!(classical_g2_gaussian(0.0, t1, t2), 1.0);
}

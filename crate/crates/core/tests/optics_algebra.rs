//! Element algebra: unitarity, involutions, and agreement of the composite
//! interferometer and the reference bench with the element pipeline.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use cohom::analytic::port_fields;
use cohom::optics::{
    bs_transform, delay_path, detune_phase, hwp_transform, intensity, nmzi_transfer, pbs_route,
    propagate_reference, BeamSplitter, Bench, Complex, ModeLabel, PathTag, PhotonField,
    Polarization,
};
use common::{distance_up_to_phase, first_stage};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

const I: Complex = Complex::new(0.0, 1.0);

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn complex() -> impl Strategy<Value = Complex> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(re, im)| c(re, im))
}

fn tagged_field() -> impl Strategy<Value = PhotonField> {
    prop::array::uniform4(complex()).prop_map(|a| {
        PhotonField::tagged(&[
            (ModeLabel::HU, a[0]),
            (ModeLabel::HD, a[1]),
            (ModeLabel::VU, a[2]),
            (ModeLabel::VD, a[3]),
        ])
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn field_distance(x: &PhotonField, y: &PhotonField) -> f64 {
    ModeLabel::ALL
        .iter()
        .map(|&l| (x.amplitude(l) - y.amplitude(l)).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn every_element_is_unitary(
        a in tagged_field(),
        b in tagged_field(),
        theta in 0.0..PI,
        df in -1e8..1e8f64,
        tau in 0.0..1e-5f64,
        h in complex(),
        v in complex(),
    ) {
        let two = a.norm() + b.norm();
        let (o1, o2) = bs_transform(&a, &b).unwrap();
        prop_assert!(close(o1.norm() + o2.norm(), two, 1e-12));
        let (p1, p2) = pbs_route(&a, &b).unwrap();
        prop_assert!(close(p1.norm() + p2.norm(), two, 1e-12));
        prop_assert!(close(hwp_transform(&a, theta).norm(), a.norm(), 1e-12));
        prop_assert!(close(detune_phase(&a, df, tau).norm(), a.norm(), 1e-12));
        prop_assert!(close(delay_path(&a, PathTag::U, df, tau).norm(), a.norm(), 1e-12));
        let jones = PhotonField::jones(h, v);
        let (na, nb) = nmzi_transfer(&jones, df, tau).unwrap();
        prop_assert!(close(na.norm() + nb.norm(), jones.norm(), 1e-12));
    }

    #[test]
    fn splitter_twice_swaps_with_factor_i(a in tagged_field(), b in tagged_field()) {
        // ((i,1),(1,i))^2 / 2 = ((0,i),(i,0))
        let (o1, o2) = bs_transform(&a, &b).unwrap();
        let (t1, t2) = bs_transform(&o1, &o2).unwrap();
        for l in ModeLabel::ALL {
            prop_assert!((t1.amplitude(l) - I * b.amplitude(l)).norm() < 1e-12);
            prop_assert!((t2.amplitude(l) - I * a.amplitude(l)).norm() < 1e-12);
        }
    }

    #[test]
    fn half_wave_plate_is_an_involution(a in tagged_field(), theta in -PI..PI) {
        let twice = hwp_transform(&hwp_transform(&a, theta), theta);
        prop_assert!(field_distance(&twice, &a) < 1e-12);
    }

    #[test]
    fn half_wave_plate_matches_rotation_product(h in complex(), v in complex(), theta in -PI..PI) {
        // R(theta) diag(1, -1) R(-theta)
        let (s, co) = theta.sin_cos();
        let r = [[co, -s], [s, co]];
        let rinv = [[co, s], [-s, co]];
        let d = [[1.0, 0.0], [0.0, -1.0]];
        let mut m = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m[i][j] += r[i][k] * d[k][l] * rinv[l][j];
                    }
                }
            }
        }
        let out = hwp_transform(&PhotonField::jones(h, v), theta);
        let want_h = h * m[0][0] + v * m[0][1];
        let want_v = h * m[1][0] + v * m[1][1];
        prop_assert!((out.polarization_amplitude(Polarization::H) - want_h).norm() < 1e-12);
        prop_assert!((out.polarization_amplitude(Polarization::V) - want_v).norm() < 1e-12);
    }
}

#[test]
fn hwp_at_22_5_degrees_balances_h_and_v() {
    let h = PhotonField::jones(c(1.0, 0.0), c(0.0, 0.0));
    let out = hwp_transform(&h, PI / 8.0);
    assert!((out.polarization_amplitude(Polarization::H) - FRAC_1_SQRT_2).norm() < 1e-12);
    assert!((out.polarization_amplitude(Polarization::V) - FRAC_1_SQRT_2).norm() < 1e-12);
}

#[test]
fn splitter_matrix_oracle() {
    let a = PhotonField::tagged(&[(ModeLabel::HU, c(0.3, -1.1)), (ModeLabel::VD, c(2.0, 0.5))]);
    let b = PhotonField::tagged(&[(ModeLabel::HU, c(-0.7, 0.2)), (ModeLabel::VU, c(0.1, 0.9))]);
    let (o1, o2) = bs_transform(&a, &b).unwrap();
    for l in ModeLabel::ALL {
        let (x, y) = (a.amplitude(l), b.amplitude(l));
        assert!((o1.amplitude(l) - (I * x + y) / SQRT_2).norm() < 1e-15);
        assert!((o2.amplitude(l) - (x + I * y) / SQRT_2).norm() < 1e-15);
    }
}

#[test]
fn nmzi_equals_element_pipeline_on_100_draws() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strat = (complex(), complex(), -1e8..1e8f64, 0.0..1e-5f64);
    for _ in 0..100 {
        let (h, v, df, tau1) = strat.new_tree(&mut runner).unwrap().current();
        let input = PhotonField::jones(h, v);
        let (a, b) = nmzi_transfer(&input, df, tau1).unwrap();
        let out = first_stage(tau1)
            .propagate(&[("in", input)], df, &BeamSplitter::IDEAL)
            .unwrap();
        assert!(distance_up_to_phase(&a, &out[&1]) < 1e-12);
        assert!(distance_up_to_phase(&b, &out[&2]) < 1e-12);
    }
}

#[test]
fn reference_bench_reproduces_port_fields_on_grid() {
    // Both the netlist and the direct propagation, against the closed form.
    for df in [-3.1e7, -2.0e5, 0.0, 4.4e6, 1.9e7] {
        for (t1, t2) in [(0.0, 0.0), (1e-6, 1e-6), (0.4e-6, 1.7e-6), (2e-6, 0.0)] {
            let closed = port_fields(df, t1, t2).as_array();
            let source = PhotonField::jones(c(SQRT_2, 0.0), c(0.0, 0.0));
            let netlist = Bench::reference(t1, t2, 1.0)
                .propagate(&[("laser", source)], df, &BeamSplitter::IDEAL)
                .unwrap();
            let direct = propagate_reference(SQRT_2, df, t1, t2, 1.0);
            for k in 0..4 {
                assert!(field_distance(&netlist[&(k as u8 + 1)], &closed[k]) < 1e-12);
                assert!(field_distance(&direct[k], &closed[k]) < 1e-12);
            }
        }
    }
}

#[test]
fn perturbed_splitter_is_not_unitary() {
    let bad = BeamSplitter {
        reflection_phase_error: 0.1,
    };
    let a = PhotonField::tagged(&[(ModeLabel::HU, c(1.0, 0.0))]);
    let b = PhotonField::tagged(&[(ModeLabel::HU, c(1.0, 0.0))]);
    let (o1, o2) = bad.transform(&a, &b).unwrap();
    assert!((o1.norm() + o2.norm() - 2.0).abs() > 1e-3);
}

#[test]
fn no_first_order_fringe_behind_the_interferometer() {
    // Port intensities of the first interferometer do not depend on df.
    let input = hwp_transform(&PhotonField::jones(c(1.0, 0.0), c(0.0, 0.0)), PI / 8.0);
    for df in [0.0, 1e6, 3.7e7] {
        let (a, b) = nmzi_transfer(&input, df, 1e-6).unwrap();
        assert!((intensity(&a) - 0.5).abs() < 1e-15);
        assert!((intensity(&b) - 0.5).abs() < 1e-15);
    }
}

//! Linear transforms of the bench elements.
//!
//! Conventions: a beam splitter reflection carries a factor `i`, a polarizing
//! beam splitter transmits H and reflects V with a factor `i`. A detuned
//! component on path `p` picks up `exp(i * sign(p) * df * tau)` over a delay
//! `tau`, with `df` an angular frequency.

use std::f64::consts::FRAC_1_SQRT_2;

use super::field::{Complex, ModeLabel, PathTag, PhotonField, Polarization};
use super::OpticsError;

const I: Complex = Complex::new(0.0, 1.0);

/// Half-wave plate with fast axis at `theta` radians from H.
///
/// Applies `[[cos 2t, sin 2t], [sin 2t, -cos 2t]]` to each path separately.
pub fn hwp_transform(field: &PhotonField, theta: f64) -> PhotonField {
    let (s, c) = (2.0 * theta).sin_cos();
    let mut out = *field;
    let paths: &[PathTag] = if field.is_tagged() {
        &PathTag::ALL
    } else {
        &[PathTag::U]
    };
    for &path in paths {
        let hi = ModeLabel::new(Polarization::H, path).index();
        let vi = ModeLabel::new(Polarization::V, path).index();
        let (h, v) = (field.raw(hi), field.raw(vi));
        *out.raw_mut(hi) = h * c + v * s;
        *out.raw_mut(vi) = h * s - v * c;
    }
    out
}

/// Non-polarizing 50:50 beam splitter.
///
/// `reflection_phase_error` perturbs the reflection factor of input `a`; it is
/// zero for a physical splitter and only exists so the validation suite can
/// prove that it notices a broken element.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BeamSplitter {
    pub reflection_phase_error: f64,
}

impl BeamSplitter {
    pub const IDEAL: BeamSplitter = BeamSplitter {
        reflection_phase_error: 0.0,
    };

    /// `out_1 = (i a + b)/sqrt2`, `out_2 = (a + i b)/sqrt2`, componentwise.
    pub fn transform(
        &self,
        a: &PhotonField,
        b: &PhotonField,
    ) -> Result<(PhotonField, PhotonField), OpticsError> {
        check_compatible(a, b)?;
        let refl_a = if self.reflection_phase_error == 0.0 {
            I
        } else {
            I * Complex::from_polar(1.0, self.reflection_phase_error)
        };
        let mut out1 = PhotonField::merged_meta(a, b);
        let mut out2 = out1;
        for idx in 0..4 {
            let (x, y) = (a.raw(idx), b.raw(idx));
            *out1.raw_mut(idx) = (refl_a * x + y) * FRAC_1_SQRT_2;
            *out2.raw_mut(idx) = (x + I * y) * FRAC_1_SQRT_2;
        }
        Ok((out1, out2))
    }
}

/// Ideal beam splitter, see [`BeamSplitter::transform`].
pub fn bs_transform(
    a: &PhotonField,
    b: &PhotonField,
) -> Result<(PhotonField, PhotonField), OpticsError> {
    BeamSplitter::IDEAL.transform(a, b)
}

/// Polarizing beam splitter.
///
/// Port 1 receives H from `a` and V from `b`; port 2 receives V from `a` and
/// H from `b`. Both reflections (the V routes) pick up `i`.
pub fn pbs_route(
    a: &PhotonField,
    b: &PhotonField,
) -> Result<(PhotonField, PhotonField), OpticsError> {
    check_compatible(a, b)?;
    let mut port1 = PhotonField::merged_meta(a, b);
    let mut port2 = port1;
    for path in PathTag::ALL {
        let h = ModeLabel::new(Polarization::H, path).index();
        let v = ModeLabel::new(Polarization::V, path).index();
        *port1.raw_mut(h) = a.raw(h);
        *port1.raw_mut(v) = I * b.raw(v);
        *port2.raw_mut(h) = b.raw(h);
        *port2.raw_mut(v) = I * a.raw(v);
    }
    Ok((port1, port2))
}

/// Detuning phase over a common delay `tau` on every path: each component
/// gets `exp(i * sign(path) * df * tau)`. Untagged fields carry no detuning
/// yet and are returned with only their delay bookkeeping advanced.
pub fn detune_phase(field: &PhotonField, df: f64, tau: f64) -> PhotonField {
    let mut out = *field;
    for path in PathTag::ALL {
        out = delay_path(&out, path, df, tau);
    }
    out
}

/// Detuning phase over a delay on a single path.
pub fn delay_path(field: &PhotonField, path: PathTag, df: f64, tau: f64) -> PhotonField {
    let mut out = *field;
    out.add_delay(path, tau);
    if !field.is_tagged() || df == 0.0 || tau == 0.0 {
        return out;
    }
    let phase = Complex::from_polar(1.0, field.detune_sign(path) * df * tau);
    for pol in Polarization::ALL {
        let idx = ModeLabel::new(pol, path).index();
        *out.raw_mut(idx) = field.raw(idx) * phase;
    }
    out
}

/// Transfer of the first (non-interfering) Mach-Zehnder interferometer.
///
/// The input must still be untagged. The splitter sends the reflected part to
/// `U` and the transmitted part to `D`, both arms accrue the detuning phase
/// over `tau1`, and a polarizing combiner yields
///
/// ```text
/// A = (-v V^U e^{+i df tau1} + h H^D e^{-i df tau1}) / sqrt2
/// B = i (h H^U e^{+i df tau1} + v V^D e^{-i df tau1}) / sqrt2
/// ```
///
/// for Jones input `(h, v)` and `U` detuning sign `+1`.
pub fn nmzi_transfer(
    input: &PhotonField,
    df: f64,
    tau1: f64,
) -> Result<(PhotonField, PhotonField), OpticsError> {
    if input.is_tagged() {
        return Err(OpticsError::AlreadyTagged);
    }
    let h = input.polarization_amplitude(Polarization::H);
    let v = input.polarization_amplitude(Polarization::V);
    let s_up = input.detune_sign(PathTag::U);
    let up = Complex::from_polar(FRAC_1_SQRT_2, s_up * df * tau1);
    let down = Complex::from_polar(FRAC_1_SQRT_2, -s_up * df * tau1);

    let mut port_a = PhotonField::tagged(&[(ModeLabel::VU, -v * up), (ModeLabel::HD, h * down)]);
    let mut port_b =
        PhotonField::tagged(&[(ModeLabel::HU, I * h * up), (ModeLabel::VD, I * v * down)]);
    for port in [&mut port_a, &mut port_b] {
        *port = port.with_detune_sign(PathTag::U, s_up);
        for path in PathTag::ALL {
            port.add_delay(path, input.accumulated_delay(path) + tau1);
        }
    }
    Ok((port_a, port_b))
}

fn check_compatible(a: &PhotonField, b: &PhotonField) -> Result<(), OpticsError> {
    if !a.is_vacuum() && !b.is_vacuum() && a.is_tagged() != b.is_tagged() {
        return Err(OpticsError::MixedTagging);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::field::intensity;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn h_only() -> PhotonField {
        PhotonField::jones(c(1.0, 0.0), c(0.0, 0.0))
    }

    #[test]
    fn hwp_zero_keeps_h_and_flips_v() {
        let out = hwp_transform(&h_only(), 0.0);
        assert_eq!(out.polarization_amplitude(Polarization::H), c(1.0, 0.0));
        let v = PhotonField::jones(c(0.0, 0.0), c(1.0, 0.0));
        let out = hwp_transform(&v, 0.0);
        assert_eq!(out.polarization_amplitude(Polarization::V), c(-1.0, 0.0));
    }

    #[test]
    fn hwp_45_swaps_h_to_v() {
        let out = hwp_transform(&h_only(), PI / 4.0);
        assert!(out.polarization_amplitude(Polarization::H).norm() < 1e-15);
        assert!((out.polarization_amplitude(Polarization::V) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hwp_225_matches_rotation_product() {
        // Oracle: R(-t) diag(1, -1) R(t) applied to (1, 0).
        let t = PI / 8.0;
        let rot = |a: f64| [[a.cos(), a.sin()], [-a.sin(), a.cos()]];
        let mul = |m: [[f64; 2]; 2], n: [[f64; 2]; 2]| {
            let mut r = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    r[i][j] = m[i][0] * n[0][j] + m[i][1] * n[1][j];
                }
            }
            r
        };
        let m = mul(mul(rot(-t), [[1.0, 0.0], [0.0, -1.0]]), rot(t));
        let expected = (m[0][0], m[1][0]);
        let out = hwp_transform(&h_only(), t);
        assert!((out.polarization_amplitude(Polarization::H).re - expected.0).abs() < 1e-15);
        assert!((out.polarization_amplitude(Polarization::V).re - expected.1).abs() < 1e-15);
        assert!((expected.0 - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((expected.1 - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn bs_reflection_carries_i() {
        let (o1, o2) = bs_transform(&h_only(), &PhotonField::vacuum()).unwrap();
        let a1 = o1.polarization_amplitude(Polarization::H);
        let a2 = o2.polarization_amplitude(Polarization::H);
        assert!((a1 - c(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((a2 - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn bs_unit_inputs_conserve_norm() {
        let b = PhotonField::jones(c(0.0, 1.0), c(0.0, 0.0));
        let (o1, o2) = bs_transform(&h_only(), &b).unwrap();
        assert!((o1.norm() + o2.norm() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn bs_destructive_port() {
        let a = PhotonField::jones(c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0));
        let b = PhotonField::jones(c(0.0, -FRAC_1_SQRT_2), c(0.0, 0.0));
        let (o1, o2) = bs_transform(&a, &b).unwrap();
        // Oracle: [[i, 1], [1, i]] / sqrt2 times (1, -i)/sqrt2.
        let m = [[c(0.0, 1.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 1.0)]];
        let x = [c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2)];
        let y1 = (m[0][0] * x[0] + m[0][1] * x[1]) * FRAC_1_SQRT_2;
        let y2 = (m[1][0] * x[0] + m[1][1] * x[1]) * FRAC_1_SQRT_2;
        assert!(y1.norm() < 1e-15);
        assert!((o1.polarization_amplitude(Polarization::H) - y1).norm() < 1e-15);
        assert!((o2.polarization_amplitude(Polarization::H) - y2).norm() < 1e-15);
        assert!((o2.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bs_rejects_mixed_tagging() {
        let tagged = PhotonField::tagged(&[(ModeLabel::HU, c(1.0, 0.0))]);
        assert_eq!(
            bs_transform(&h_only(), &tagged).unwrap_err(),
            OpticsError::MixedTagging
        );
    }

    #[test]
    fn pbs_transmits_h_reflects_v() {
        let vac = PhotonField::vacuum();
        let (p1, p2) = pbs_route(&h_only(), &vac).unwrap();
        assert_eq!(p1.norm(), 1.0);
        assert_eq!(p2.norm(), 0.0);

        let v = PhotonField::jones(c(0.0, 0.0), c(1.0, 0.0));
        let (p1, p2) = pbs_route(&v, &vac).unwrap();
        assert_eq!(p1.norm(), 0.0);
        assert_eq!(p2.polarization_amplitude(Polarization::V), c(0.0, 1.0));
    }

    #[test]
    fn pbs_splits_diagonal_evenly() {
        let d = PhotonField::jones(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0));
        let (p1, p2) = pbs_route(&d, &PhotonField::vacuum()).unwrap();
        assert!((p1.norm() - 0.5).abs() < 1e-15);
        assert!((p2.norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn detune_zero_is_identity() {
        let f = PhotonField::tagged(&[(ModeLabel::HU, c(0.3, 0.4)), (ModeLabel::VD, c(0.1, 0.0))]);
        let g = detune_phase(&f, 0.0, 1e-6);
        assert_eq!(g.components(), f.components());
        assert_eq!(g.accumulated_delay(PathTag::U), 1e-6);
    }

    #[test]
    fn detune_half_period_flips_sign() {
        let f = PhotonField::tagged(&[(ModeLabel::HU, c(1.0, 0.0))]);
        let g = detune_phase(&f, PI, 1.0);
        assert!((g.amplitude(ModeLabel::HU) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn detune_opposite_paths_get_conjugate_phases() {
        let f = PhotonField::tagged(&[(ModeLabel::HU, c(1.0, 0.0)), (ModeLabel::HD, c(1.0, 0.0))]);
        let g = detune_phase(&f, 2.0e6, 3.1e-7);
        let (u, d) = (g.amplitude(ModeLabel::HU), g.amplitude(ModeLabel::HD));
        assert!((u - d.conj()).norm() < 1e-15);
        assert!((u.arg() - 2.0e6 * 3.1e-7).abs() < 1e-12);
    }

    #[test]
    fn nmzi_zero_phase_matches_output_expressions() {
        let x = hwp_transform(&h_only(), PI / 8.0);
        let (a, b) = nmzi_transfer(&x, 0.0, 0.0).unwrap();
        assert_eq!(a.components().len(), 2);
        let r = |f: &PhotonField, l| f.amplitude(l);
        // Port A: (-V^U + H^D)/sqrt2 up to the overall scale 1/sqrt2.
        assert!((r(&a, ModeLabel::VU) - c(-0.5, 0.0)).norm() < 1e-15);
        assert!((r(&a, ModeLabel::HD) - c(0.5, 0.0)).norm() < 1e-15);
        // Port B: i(H^U + V^D)/sqrt2.
        assert!((r(&b, ModeLabel::HU) - c(0.0, 0.5)).norm() < 1e-15);
        assert!((r(&b, ModeLabel::VD) - c(0.0, 0.5)).norm() < 1e-15);
        assert_eq!(r(&a, ModeLabel::HU), c(0.0, 0.0));
        assert_eq!(r(&b, ModeLabel::HD), c(0.0, 0.0));
    }

    #[test]
    fn nmzi_rejects_tagged_input() {
        let f = PhotonField::tagged(&[(ModeLabel::HU, c(1.0, 0.0))]);
        assert_eq!(
            nmzi_transfer(&f, 0.0, 0.0).unwrap_err(),
            OpticsError::AlreadyTagged
        );
    }

    #[test]
    fn nmzi_ports_have_no_first_order_fringe() {
        let x = hwp_transform(&h_only(), PI / 8.0);
        for k in 0..20 {
            let (a, b) = nmzi_transfer(&x, 1.0e6 * k as f64, 1.3e-6).unwrap();
            assert!((intensity(&a) - 0.5).abs() < 1e-14);
            assert!((intensity(&b) - 0.5).abs() < 1e-14);
        }
    }
}

//! Closed-form port fields, local and ensemble intensities, basis-selected
//! coincidences and the classical intensity-correlation baseline.
//!
//! Intensities are reported relative to `I0`, the intensity of one output
//! port of the first interferometer, so `I1 + I3 = I2 + I4 = I0 = 1`.
//! Detunings are angular frequencies (rad/s), delays are seconds.

use std::f64::consts::PI;

use crate::optics::{Complex, ModeLabel, PathTag, PhotonField, Polarization};

/// Reference intensity of one interferometer output port.
pub const I0: f64 = 1.0;

/// `sigma_f * (tau1 + tau2)` beyond which every port is within 1% of `I0/2`
/// (`exp(-2 x^2) < 0.01`).
pub fn uniform_limit_threshold() -> f64 {
    (100.0f64.ln() / 2.0).sqrt()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyticError {
    #[error("port index {0} is outside 1..=4")]
    InvalidPort(u8),
    #[error("phase_samples must be at least 2, got {0}")]
    TooFewSamples(usize),
    #[error("sigma_f must be non-negative, got {0}")]
    NegativeSpread(f64),
}

/// Fields at the four detectors. `E1`/`E3` are H-only, `E2`/`E4` V-only.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PortFields {
    pub e1: PhotonField,
    pub e2: PhotonField,
    pub e3: PhotonField,
    pub e4: PhotonField,
}

impl PortFields {
    pub fn port(&self, k: u8) -> Result<&PhotonField, AnalyticError> {
        match k {
            1 => Ok(&self.e1),
            2 => Ok(&self.e2),
            3 => Ok(&self.e3),
            4 => Ok(&self.e4),
            _ => Err(AnalyticError::InvalidPort(k)),
        }
    }

    pub fn as_array(&self) -> [PhotonField; 4] {
        [self.e1, self.e2, self.e3, self.e4]
    }
}

/// Port fields with the `U` arm detuned by `+df`.
pub fn port_fields(df: f64, tau1: f64, tau2: f64) -> PortFields {
    port_fields_signed(df, tau1, tau2, 1.0)
}

/// Port fields for an explicit `U` detuning sign (`+1` or `-1`).
///
/// ```text
/// E1 =  i/2 (H^D e^{-iT} + H^U e^{+iT})
/// E2 =  1/2 (V^U e^{+iT} - V^D e^{-iT})
/// E3 =  1/2 (H^D e^{-iT} - H^U e^{+iT})
/// E4 = -i/2 (V^U e^{+iT} + V^D e^{-iT})
/// ```
///
/// with `T = sign * df * (tau1 + tau2)`.
pub fn port_fields_signed(df: f64, tau1: f64, tau2: f64, up_sign: f64) -> PortFields {
    let theta = up_sign.signum() * df * (tau1 + tau2);
    let up = Complex::from_polar(0.5, theta);
    let down = Complex::from_polar(0.5, -theta);
    let i = Complex::new(0.0, 1.0);
    let signed = |f: PhotonField| f.with_detune_sign(PathTag::U, up_sign);
    PortFields {
        e1: signed(PhotonField::tagged(&[
            (ModeLabel::HD, i * down),
            (ModeLabel::HU, i * up),
        ])),
        e2: signed(PhotonField::tagged(&[
            (ModeLabel::VU, up),
            (ModeLabel::VD, -down),
        ])),
        e3: signed(PhotonField::tagged(&[
            (ModeLabel::HD, down),
            (ModeLabel::HU, -up),
        ])),
        e4: signed(PhotonField::tagged(&[
            (ModeLabel::VU, -i * up),
            (ModeLabel::VD, -i * down),
        ])),
    }
}

fn port_sign(port: u8) -> Result<f64, AnalyticError> {
    match port {
        1 | 4 => Ok(1.0),
        2 | 3 => Ok(-1.0),
        _ => Err(AnalyticError::InvalidPort(port)),
    }
}

/// `(I0/2) [1 +- cos(2 df (tau1 + tau2))]`, `+` for ports 1 and 4.
pub fn local_intensity(port: u8, df: f64, tau1: f64, tau2: f64) -> Result<f64, AnalyticError> {
    let s = port_sign(port)?;
    Ok(split_pair(s, (2.0 * df * (tau1 + tau2)).cos()))
}

/// `(I0/2)(1 + s c)` such that the `s = +1` and `s = -1` values sum to `I0`
/// exactly: the smaller one is `I0` minus the larger, which is exact because
/// the larger is at least `I0/2`.
fn split_pair(s: f64, c: f64) -> f64 {
    let big = 0.5 * I0 * (1.0 + c.abs());
    if s * c >= 0.0 {
        big
    } else {
        I0 - big
    }
}

/// Fringe visibility after averaging over `df ~ Normal(0, sigma_f^2)`:
/// `exp(-2 sigma_f^2 (tau1 + tau2)^2)`.
pub fn visibility(sigma_f: f64, tau1: f64, tau2: f64) -> f64 {
    let x = sigma_f * (tau1 + tau2);
    (-2.0 * x * x).exp()
}

/// Local intensity averaged over a Gaussian detuning spread.
pub fn ensemble_intensity(
    port: u8,
    sigma_f: f64,
    tau1: f64,
    tau2: f64,
) -> Result<f64, AnalyticError> {
    let s = port_sign(port)?;
    if sigma_f < 0.0 {
        return Err(AnalyticError::NegativeSpread(sigma_f));
    }
    Ok(split_pair(s, visibility(sigma_f, tau1, tau2)))
}

/// Two-photon basis products between two detector fields, split by the path
/// tags of the contributing components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisProducts {
    /// `a^U b^D + a^D b^U`: photons from opposite arms (opposite detuning).
    pub cross: Complex,
    /// `a^U b^U`: both photons from the up arm.
    pub same_up: Complex,
    /// `a^D b^D`: both photons from the down arm.
    pub same_down: Complex,
}

/// Expands the product of two detector fields into path-resolved terms.
/// Only components of matching polarization pair up.
pub fn basis_products(a: &PhotonField, b: &PhotonField) -> BasisProducts {
    let mut out = BasisProducts {
        cross: Complex::new(0.0, 0.0),
        same_up: Complex::new(0.0, 0.0),
        same_down: Complex::new(0.0, 0.0),
    };
    for pa in Polarization::ALL {
        for pb in Polarization::ALL {
            let au = a.amplitude(ModeLabel::new(pa, PathTag::U));
            let ad = a.amplitude(ModeLabel::new(pa, PathTag::D));
            let bu = b.amplitude(ModeLabel::new(pb, PathTag::U));
            let bd = b.amplitude(ModeLabel::new(pb, PathTag::D));
            out.cross += au * bd + ad * bu;
            out.same_up += au * bu;
            out.same_down += ad * bd;
        }
    }
    out
}

fn cross_path_coincidence(i: u8, j: u8, df: f64, tau1: f64, tau2: f64) -> f64 {
    // Average over which arm carries +df.
    [1.0, -1.0]
        .iter()
        .map(|&s| {
            let pf = port_fields_signed(df, tau1, tau2, s);
            let (a, b) = (
                pf.port(i).expect("valid port"),
                pf.port(j).expect("valid port"),
            );
            basis_products(a, b).cross.norm_sqr()
        })
        .sum::<f64>()
        / 2.0
}

/// Basis-selected D1-D3 coincidence: only cross-path products (`H^U H^D`)
/// survive, since one photon cannot populate the same basis twice.
pub fn coincidence_r13(df: f64, tau1: f64, tau2: f64) -> f64 {
    cross_path_coincidence(1, 3, df, tau1, tau2)
}

/// Basis-selected D2-D4 coincidence, the V-channel analogue of R13.
pub fn coincidence_r24(df: f64, tau1: f64, tau2: f64) -> f64 {
    cross_path_coincidence(2, 4, df, tau1, tau2)
}

/// Basis-selected coincidence averaged over `df ~ Normal(0, sigma_f^2)`, for
/// detector pairs `(1, 3)` and `(2, 4)`. Simpson rule over +-8 sigma.
pub fn ensemble_coincidence(
    pair: (u8, u8),
    sigma_f: f64,
    tau1: f64,
    tau2: f64,
) -> Result<f64, AnalyticError> {
    let r = match pair {
        (1, 3) | (3, 1) => coincidence_r13,
        (2, 4) | (4, 2) => coincidence_r24,
        (a, _) => return Err(AnalyticError::InvalidPort(a)),
    };
    if sigma_f < 0.0 {
        return Err(AnalyticError::NegativeSpread(sigma_f));
    }
    if sigma_f == 0.0 {
        return Ok(r(0.0, tau1, tau2));
    }
    let n = 256;
    let (a, h) = (-8.0 * sigma_f, 16.0 * sigma_f / n as f64);
    let norm = 1.0 / (sigma_f * (2.0 * PI).sqrt());
    let mut sum = 0.0;
    for k in 0..=n {
        let df = a + h * k as f64;
        let w = match k {
            0 => 1.0,
            k if k == n => 1.0,
            k if k % 2 == 1 => 4.0,
            _ => 2.0,
        };
        sum += w * norm * (-0.5 * (df / sigma_f).powi(2)).exp() * r(df, tau1, tau2);
    }
    Ok(sum * h / 3.0)
}

/// Normalized intensity correlation `<I1 I3> / (<I1><I3>)` of classical
/// fields over a fringe phase sampled at `n` equally spaced midpoints
/// `2 pi (m + 1/2) / n`. Equals 0.5 for every `n >= 3`, 1 for `n = 2`.
pub fn classical_baseline_g2(phase_samples: usize) -> Result<f64, AnalyticError> {
    if phase_samples < 2 {
        return Err(AnalyticError::TooFewSamples(phase_samples));
    }
    let n = phase_samples as f64;
    let (mut s1, mut s3, mut s13) = (0.0, 0.0, 0.0);
    for m in 0..phase_samples {
        let c = (2.0 * PI * (m as f64 + 0.5) / n).cos();
        let (i1, i3) = (0.5 * I0 * (1.0 + c), 0.5 * I0 * (1.0 - c));
        s1 += i1;
        s3 += i3;
        s13 += i1 * i3;
    }
    Ok((s13 / n) / ((s1 / n) * (s3 / n)))
}

/// Classical D1-D3 correlation for a Gaussian detuning spread, where the
/// fringe phase `2 df (tau1 + tau2)` is not yet uniform. Tends to 0.5.
pub fn classical_g2_gaussian(sigma_f: f64, tau1: f64, tau2: f64) -> f64 {
    let x = sigma_f * (tau1 + tau2);
    if x == 0.0 {
        return 1.0;
    }
    let mean_cos = (-2.0 * x * x).exp();
    let mean_cos2 = 0.5 * (1.0 + (-8.0 * x * x).exp());
    let denom = 1.0 - mean_cos * mean_cos;
    if denom < 1e-12 {
        // Small-x expansion of (1 - <c^2>) / (1 - <c>^2).
        return 1.0 - 2.0 * x * x;
    }
    (1.0 - mean_cos2) / denom
}

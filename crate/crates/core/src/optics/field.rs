//! Mode labels and the per-photon coherent field carried across the bench.

use std::fmt;

use serde::{Deserialize, Serialize};

pub use num_complex::Complex64 as Complex;

/// Linear polarization basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const ALL: [Polarization; 2] = [Polarization::H, Polarization::V];

    pub fn orthogonal(self) -> Self {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Arm of the first interferometer a component travelled through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PathTag {
    U,
    D,
}

impl PathTag {
    pub const ALL: [PathTag; 2] = [PathTag::U, PathTag::D];

    pub fn other(self) -> Self {
        match self {
            PathTag::U => PathTag::D,
            PathTag::D => PathTag::U,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// One field component label, e.g. `H^U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeLabel {
    pub pol: Polarization,
    pub path: PathTag,
}

impl ModeLabel {
    pub const HU: ModeLabel = ModeLabel::new(Polarization::H, PathTag::U);
    pub const HD: ModeLabel = ModeLabel::new(Polarization::H, PathTag::D);
    pub const VU: ModeLabel = ModeLabel::new(Polarization::V, PathTag::U);
    pub const VD: ModeLabel = ModeLabel::new(Polarization::V, PathTag::D);

    pub const ALL: [ModeLabel; 4] = [Self::HU, Self::HD, Self::VU, Self::VD];

    pub const fn new(pol: Polarization, path: PathTag) -> Self {
        Self { pol, path }
    }

    pub(crate) fn index(self) -> usize {
        self.pol.index() * 2 + self.path.index()
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}^{:?}", self.pol, self.path)
    }
}

/// Coherent amplitude of one photon on one rail of the bench.
///
/// Before the first interferometer beam splitter a field is *untagged*: it
/// only has a polarization (Jones) state, stored in the `U` slots. Once tags
/// are assigned they never change.
///
/// Intensity is evaluated with interference between components that share a
/// polarization and never between orthogonal polarizations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhotonField {
    amps: [Complex; 4],
    tagged: bool,
    /// Detuning sign of the `U` arm; the `D` arm always carries the opposite.
    sign_up: f64,
    delay: [f64; 2],
}

impl Default for PhotonField {
    fn default() -> Self {
        Self::vacuum()
    }
}

impl PhotonField {
    pub fn vacuum() -> Self {
        Self {
            amps: [Complex::new(0.0, 0.0); 4],
            tagged: false,
            sign_up: 1.0,
            delay: [0.0; 2],
        }
    }

    /// Untagged field with the given Jones components.
    pub fn jones(h: Complex, v: Complex) -> Self {
        let mut field = Self::vacuum();
        field.amps[ModeLabel::HU.index()] = h;
        field.amps[ModeLabel::VU.index()] = v;
        field
    }

    /// Tagged field built from explicit components; unlisted labels are zero.
    pub fn tagged(components: &[(ModeLabel, Complex)]) -> Self {
        let mut field = Self::vacuum();
        field.tagged = true;
        for &(label, amp) in components {
            field.amps[label.index()] += amp;
        }
        field
    }

    pub fn is_tagged(&self) -> bool {
        self.tagged
    }

    /// True when every amplitude is exactly zero.
    pub fn is_vacuum(&self) -> bool {
        self.amps.iter().all(|a| a.re == 0.0 && a.im == 0.0)
    }

    /// Amplitude of a tagged component. Untagged fields report zero.
    pub fn amplitude(&self, label: ModeLabel) -> Complex {
        if self.tagged {
            self.amps[label.index()]
        } else {
            Complex::new(0.0, 0.0)
        }
    }

    /// Coherent sum over path tags for one polarization. For untagged fields
    /// this is the Jones component.
    pub fn polarization_amplitude(&self, pol: Polarization) -> Complex {
        let u = self.amps[ModeLabel::new(pol, PathTag::U).index()];
        if self.tagged {
            u + self.amps[ModeLabel::new(pol, PathTag::D).index()]
        } else {
            u
        }
    }

    /// Non-zero components in label order.
    pub fn components(&self) -> Vec<(ModeLabel, Complex)> {
        if !self.tagged {
            return Vec::new();
        }
        ModeLabel::ALL
            .iter()
            .map(|&l| (l, self.amps[l.index()]))
            .filter(|(_, a)| a.re != 0.0 || a.im != 0.0)
            .collect()
    }

    /// Mode norm: sum of |amplitude|^2 over labels, no cross terms.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn detune_sign(&self, path: PathTag) -> f64 {
        match path {
            PathTag::U => self.sign_up,
            PathTag::D => -self.sign_up,
        }
    }

    pub fn accumulated_delay(&self, path: PathTag) -> f64 {
        self.delay[path.index()]
    }

    /// Sets the detuning sign of `path` (the other arm gets the opposite).
    pub fn with_detune_sign(mut self, path: PathTag, sign: f64) -> Self {
        let s = if sign < 0.0 { -1.0 } else { 1.0 };
        self.sign_up = match path {
            PathTag::U => s,
            PathTag::D => -s,
        };
        self
    }

    /// Multiplies every amplitude by `c`.
    pub fn scaled(mut self, c: Complex) -> Self {
        for a in &mut self.amps {
            *a *= c;
        }
        self
    }

    /// Assigns path tags to an untagged field: all Jones content moves to `path`.
    pub(crate) fn assign_path(mut self, path: PathTag) -> Self {
        debug_assert!(!self.tagged);
        if path == PathTag::D {
            for pol in Polarization::ALL {
                let from = ModeLabel::new(pol, PathTag::U).index();
                let to = ModeLabel::new(pol, PathTag::D).index();
                self.amps[to] = self.amps[from];
                self.amps[from] = Complex::new(0.0, 0.0);
            }
        }
        self.tagged = true;
        self
    }

    pub(crate) fn raw(&self, idx: usize) -> Complex {
        self.amps[idx]
    }

    pub(crate) fn raw_mut(&mut self, idx: usize) -> &mut Complex {
        &mut self.amps[idx]
    }

    pub(crate) fn add_delay(&mut self, path: PathTag, tau: f64) {
        self.delay[path.index()] += tau;
    }

    /// Bookkeeping of the non-amplitude state when two rails are combined.
    pub(crate) fn merged_meta(a: &PhotonField, b: &PhotonField) -> PhotonField {
        let primary = if a.is_vacuum() && !b.is_vacuum() {
            b
        } else {
            a
        };
        let mut out = PhotonField::vacuum();
        out.tagged = primary.tagged;
        out.sign_up = primary.sign_up;
        out.delay = [a.delay[0].max(b.delay[0]), a.delay[1].max(b.delay[1])];
        out
    }
}

/// Detected intensity of a field: `sum_pol |sum_path amp(pol, path)|^2`.
///
/// Components with the same polarization interfere regardless of their path
/// tag; orthogonal polarizations never do.
pub fn intensity(field: &PhotonField) -> f64 {
    Polarization::ALL
        .iter()
        .map(|&p| field.polarization_amplitude(p).norm_sqr())
        .sum()
}

//! Complex-amplitude optics for the bench: mode-labelled photon fields and
//! the unitary transforms of each element.

mod bench;
mod elements;
mod field;

pub use bench::{propagate_reference, Bench, DetectorId, ElementKind, ElementSpec};
pub use elements::{
    bs_transform, delay_path, detune_phase, hwp_transform, nmzi_transfer, pbs_route, BeamSplitter,
};
pub use field::{intensity, Complex, ModeLabel, PathTag, PhotonField, Polarization};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OpticsError {
    #[error("input field already carries path tags")]
    AlreadyTagged,
    #[error("cannot combine a path-tagged field with an untagged one")]
    MixedTagging,
    #[error("{element} expects {expected:?} (in, out) ports, got {got:?}")]
    Arity {
        element: &'static str,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("rail `{0}` is produced twice")]
    DuplicateRail(String),
    #[error("rail `{0}` is consumed twice")]
    RailReused(String),
    #[error("AOM placed before the path-tagging beam splitter")]
    AomBeforeTagging,
    #[error("AOM rail carries both path tags")]
    AomMixedPaths,
}

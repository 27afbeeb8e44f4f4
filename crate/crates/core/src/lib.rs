//! Simulation and analysis of a coherence-driven Hong-Ou-Mandel bench.
//!
//! Attenuated laser photons are polarization-randomized, split into two
//! counter-detuned arms, separated by polarization and recombined on a final
//! beam splitter. The crate provides:
//!
//! - [`optics`]: mode-labelled coherent fields and element transforms,
//! - [`analytic`]: closed-form port fields, intensities and coincidences,
//! - [`combinatorics`]: the 16 path/polarization pair configurations and the
//!   detector pair chart,
//! - [`montecarlo`]: seeded, parallel pair-event simulation with coincidence
//!   and heterodyne post-selection,
//! - [`benchio`]: configuration parsing and result files,
//! - [`validate`]: the cross-engine self-check behind `cohom validate`.

pub mod analytic;
pub mod benchio;
pub mod combinatorics;
pub mod montecarlo;
pub mod optics;
pub mod validate;

//! Element netlists and the reference bench.
//!
//! A [`Bench`] is an ordered list of elements wired by named rails. Rails that
//! no element produces are external inputs (vacuum unless supplied).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::f64::consts::PI;

use super::elements::{delay_path, hwp_transform, nmzi_transfer, pbs_route, BeamSplitter};
use super::field::{Complex, ModeLabel, PathTag, PhotonField};
use super::OpticsError;

/// Detector index, 1 to 4 on the reference bench.
pub type DetectorId = u8;

/// Kind and parameters of one element.
#[derive(Clone, Debug, PartialEq)]
pub enum ElementKind {
    /// Half-wave plate, fast axis angle in radians.
    Hwp {
        theta: f64,
    },
    /// 50:50 beam splitter. Untagged inputs get path tags here: the reflected
    /// output becomes `U`, the transmitted one `D`.
    Bs,
    Pbs,
    /// Acousto-optic modulator fixing the detuning sign of the arm it sits in.
    Aom {
        sign: f64,
    },
    /// Delay in seconds acting on the components of one path tag.
    Delay {
        path: PathTag,
        tau: f64,
    },
    /// Whole first interferometer with common delay `tau` and `U` sign.
    Nmzi {
        tau: f64,
        up_sign: f64,
    },
    Detector {
        id: DetectorId,
    },
}

impl ElementKind {
    fn arity(&self) -> (usize, usize) {
        match self {
            ElementKind::Bs | ElementKind::Pbs => (2, 2),
            ElementKind::Hwp { .. } | ElementKind::Aom { .. } | ElementKind::Delay { .. } => (1, 1),
            ElementKind::Nmzi { .. } => (1, 2),
            ElementKind::Detector { .. } => (1, 0),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            ElementKind::Hwp { .. } => "HWP",
            ElementKind::Bs => "BS",
            ElementKind::Pbs => "PBS",
            ElementKind::Aom { .. } => "AOM",
            ElementKind::Delay { .. } => "Delay",
            ElementKind::Nmzi { .. } => "NMZI",
            ElementKind::Detector { .. } => "Detector",
        }
    }
}

/// An element plus its ordered input and output rails.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementSpec {
    pub kind: ElementKind,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl ElementSpec {
    pub fn new(kind: ElementKind, inputs: &[&str], outputs: &[&str]) -> Self {
        Self {
            kind,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Validated netlist.
#[derive(Clone, Debug)]
pub struct Bench {
    elements: Vec<ElementSpec>,
}

impl Bench {
    pub fn new(elements: Vec<ElementSpec>) -> Result<Self, OpticsError> {
        let mut produced = HashSet::new();
        let mut consumed = HashSet::new();
        for el in &elements {
            let (n_in, n_out) = el.kind.arity();
            if el.inputs.len() != n_in || el.outputs.len() != n_out {
                return Err(OpticsError::Arity {
                    element: el.kind.name(),
                    expected: (n_in, n_out),
                    got: (el.inputs.len(), el.outputs.len()),
                });
            }
            for rail in &el.inputs {
                if !consumed.insert(rail.clone()) {
                    return Err(OpticsError::RailReused(rail.clone()));
                }
            }
            for rail in &el.outputs {
                if !produced.insert(rail.clone()) || consumed.contains(rail) {
                    return Err(OpticsError::DuplicateRail(rail.clone()));
                }
            }
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[ElementSpec] {
        &self.elements
    }

    /// Propagates one photon. `sources` seeds external rails; `df` is the
    /// pair's detuning in rad/s. Returns the field reaching each detector.
    pub fn propagate(
        &self,
        sources: &[(&str, PhotonField)],
        df: f64,
        splitter: &BeamSplitter,
    ) -> Result<BTreeMap<DetectorId, PhotonField>, OpticsError> {
        let mut rails: HashMap<&str, PhotonField> =
            sources.iter().map(|(name, f)| (*name, *f)).collect();
        let mut detectors = BTreeMap::new();
        for el in &self.elements {
            let mut take = |i: usize| rails.remove(el.inputs[i].as_str()).unwrap_or_default();
            let outputs: Vec<PhotonField> = match el.kind {
                ElementKind::Hwp { theta } => vec![hwp_transform(&take(0), theta)],
                ElementKind::Bs => {
                    let (a, b) = (take(0), take(1));
                    let assign = !a.is_tagged() && !b.is_tagged();
                    let (o1, o2) = splitter.transform(&a, &b)?;
                    if assign {
                        vec![o1.assign_path(PathTag::U), o2.assign_path(PathTag::D)]
                    } else {
                        vec![o1, o2]
                    }
                }
                ElementKind::Pbs => {
                    let (a, b) = (take(0), take(1));
                    let (p1, p2) = pbs_route(&a, &b)?;
                    vec![p1, p2]
                }
                ElementKind::Aom { sign } => vec![apply_aom(take(0), sign)?],
                ElementKind::Delay { path, tau } => vec![delay_path(&take(0), path, df, tau)],
                ElementKind::Nmzi { tau, up_sign } => {
                    let input = take(0).with_detune_sign(PathTag::U, up_sign);
                    let (a, b) = nmzi_transfer(&input, df, tau)?;
                    vec![a, b]
                }
                ElementKind::Detector { id } => {
                    detectors.insert(id, take(0));
                    vec![]
                }
            };
            for (name, field) in el.outputs.iter().zip(outputs) {
                rails.insert(name.as_str(), field);
            }
        }
        Ok(detectors)
    }

    /// The reference bench built from primitive elements: HWP at 22.5 deg,
    /// splitter, counter-scanned AOMs, common delay `tau1`, polarizing
    /// combiner, polarizing split of each output port, delay `tau2`, and two
    /// final splitters feeding D1/D3 (H) and D2/D4 (V).
    pub fn reference(tau1: f64, tau2: f64, up_sign: f64) -> Self {
        use ElementKind::*;
        let mut els = vec![
            ElementSpec::new(Hwp { theta: PI / 8.0 }, &["laser"], &["pol"]),
            ElementSpec::new(Bs, &["pol", "vac"], &["up", "down"]),
            ElementSpec::new(Aom { sign: up_sign }, &["up"], &["up_aom"]),
            ElementSpec::new(Aom { sign: -up_sign }, &["down"], &["down_aom"]),
            ElementSpec::new(
                Delay {
                    path: PathTag::U,
                    tau: tau1,
                },
                &["up_aom"],
                &["up_d"],
            ),
            ElementSpec::new(
                Delay {
                    path: PathTag::D,
                    tau: tau1,
                },
                &["down_aom"],
                &["down_d"],
            ),
            ElementSpec::new(Pbs, &["up_d", "down_d"], &["B", "A"]),
        ];
        els.extend(Self::second_stage(tau2));
        Self::new(els).expect("reference bench wiring is valid")
    }

    /// Same bench with the first interferometer as a single composite element.
    pub fn reference_composite(tau1: f64, tau2: f64, up_sign: f64) -> Self {
        use ElementKind::*;
        let mut els = vec![
            ElementSpec::new(Hwp { theta: PI / 8.0 }, &["laser"], &["pol"]),
            ElementSpec::new(Nmzi { tau: tau1, up_sign }, &["pol"], &["A", "B"]),
        ];
        els.extend(Self::second_stage(tau2));
        Self::new(els).expect("reference bench wiring is valid")
    }

    fn second_stage(tau2: f64) -> Vec<ElementSpec> {
        use ElementKind::*;
        vec![
            ElementSpec::new(Pbs, &["A", "vacA"], &["A1", "A2"]),
            ElementSpec::new(Pbs, &["B", "vacB"], &["B3", "B4"]),
            ElementSpec::new(
                Delay {
                    path: PathTag::D,
                    tau: tau2,
                },
                &["A1"],
                &["A1d"],
            ),
            ElementSpec::new(
                Delay {
                    path: PathTag::U,
                    tau: tau2,
                },
                &["A2"],
                &["A2d"],
            ),
            ElementSpec::new(
                Delay {
                    path: PathTag::U,
                    tau: tau2,
                },
                &["B3"],
                &["B3d"],
            ),
            ElementSpec::new(
                Delay {
                    path: PathTag::D,
                    tau: tau2,
                },
                &["B4"],
                &["B4d"],
            ),
            ElementSpec::new(Bs, &["A1d", "B3d"], &["E1", "E3"]),
            ElementSpec::new(Bs, &["A2d", "B4d"], &["E2", "E4"]),
            ElementSpec::new(Detector { id: 1 }, &["E1"], &[]),
            ElementSpec::new(Detector { id: 2 }, &["E2"], &[]),
            ElementSpec::new(Detector { id: 3 }, &["E3"], &[]),
            ElementSpec::new(Detector { id: 4 }, &["E4"], &[]),
        ]
    }
}

fn apply_aom(field: PhotonField, sign: f64) -> Result<PhotonField, OpticsError> {
    if field.is_vacuum() {
        return Ok(field);
    }
    if !field.is_tagged() {
        return Err(OpticsError::AomBeforeTagging);
    }
    let present = |path: PathTag| {
        ModeLabel::ALL
            .iter()
            .any(|l| l.path == path && field.amplitude(*l).norm_sqr() > 0.0)
    };
    match (present(PathTag::U), present(PathTag::D)) {
        (true, false) => Ok(field.with_detune_sign(PathTag::U, sign)),
        (false, true) => Ok(field.with_detune_sign(PathTag::D, sign)),
        _ => Err(OpticsError::AomMixedPaths),
    }
}

/// Allocation-free propagation through the reference bench for a source of
/// Jones vector `(1, 0)` scaled by `amplitude`. Returns the fields at D1..D4.
pub fn propagate_reference(
    amplitude: f64,
    df: f64,
    tau1: f64,
    tau2: f64,
    up_sign: f64,
) -> [PhotonField; 4] {
    let laser = PhotonField::jones(Complex::new(amplitude, 0.0), Complex::new(0.0, 0.0));
    let pol = hwp_transform(&laser, PI / 8.0).with_detune_sign(PathTag::U, up_sign);
    let (a, b) = nmzi_transfer(&pol, df, tau1).expect("source is untagged");
    let vac = PhotonField::vacuum();
    let (a1, a2) = pbs_route(&a, &vac).expect("tagged with vacuum");
    let (b3, b4) = pbs_route(&b, &vac).expect("tagged with vacuum");
    let a1 = delay_path(&a1, PathTag::D, df, tau2);
    let a2 = delay_path(&a2, PathTag::U, df, tau2);
    let b3 = delay_path(&b3, PathTag::U, df, tau2);
    let b4 = delay_path(&b4, PathTag::D, df, tau2);
    let bs = BeamSplitter::IDEAL;
    let (e1, e3) = bs.transform(&a1, &b3).expect("both tagged");
    let (e2, e4) = bs.transform(&a2, &b4).expect("both tagged");
    [e1, e2, e3, e4]
}

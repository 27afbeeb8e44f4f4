//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use cohom::combinatorics::{ComboRecord, PhotonLabel};
use cohom::optics::{
    Bench, Complex, ElementKind, ElementSpec, ModeLabel, PathTag, PhotonField, Polarization,
};

/// Reference distribution table, four charts of two rows by eight columns,
/// copied cell by cell. Charts 1-2 list the arms (up, down), charts 3-4 the
/// interferometer output ports (A, B).
pub const REFERENCE: &str = r"
H_1^U | H_1^U | V_1^U | V_1^U | H_2^U | H_2^U | V_2^U | V_2^U
H_2^D | V_2^D | H_2^D | V_2^D | H_1^D | V_1^D | H_1^D | V_1^D

H_1^U - H_2^U | H_1^U - V_2^U | V_1^U - V_2^U | V_1^U - H_2^U | 0 | 0 | 0 | 0
0 | 0 | 0 | 0 | H_1^D - H_2^D | H_1^D - V_2^D | V_1^D - V_2^D | V_1^D - H_2^D

H_2^D | 0 | V_1^U - H_2^D | V_1^U | H_1^D | H_1^D - V_2^U | 0 | V_2^U
H_1^U | H_1^U - V_2^D | 0 | V_2^D | H_2^U | 0 | V_1^D - H_2^U | V_1^D

V_2^U | 0 | V_1^U - V_2^U | V_1^U | H_1^D | H_1^D - H_2^D | 0 | H_2^D
H_1^U | H_1^U - H_2^U | 0 | H_2^U | V_2^D | 0 | V_1^D - V_2^D | V_1^D
";

pub fn label(text: &str) -> PhotonLabel {
    let (head, path) = text.trim().split_once('^').expect("label has a path");
    let (pol, photon) = head.split_once('_').expect("label has a photon index");
    PhotonLabel::new(
        photon.parse().unwrap(),
        match pol {
            "H" => Polarization::H,
            "V" => Polarization::V,
            other => panic!("bad polarization {other}"),
        },
        match path {
            "U" => PathTag::U,
            "D" => PathTag::D,
            other => panic!("bad path {other}"),
        },
    )
}

pub fn cell(text: &str) -> Vec<PhotonLabel> {
    let text = text.trim();
    if text == "0" {
        return vec![];
    }
    let mut v: Vec<_> = text.split(" - ").map(label).collect();
    v.sort();
    v
}

pub type Chart = [Vec<Vec<PhotonLabel>>; 2];

pub fn reference_charts() -> Vec<Chart> {
    let rows: Vec<Vec<Vec<PhotonLabel>>> = REFERENCE
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split('|').map(cell).collect())
        .collect();
    assert_eq!(rows.len(), 8);
    rows.chunks(2)
        .map(|c| [c[0].clone(), c[1].clone()])
        .collect()
}

pub fn sorted(v: &[PhotonLabel]) -> Vec<PhotonLabel> {
    let mut v = v.to_vec();
    v.sort();
    v
}

pub fn record_for<'a>(table: &'a [ComboRecord], chart: &Chart, col: usize) -> &'a ComboRecord {
    let members = sorted(&[chart[0][col].clone(), chart[1][col].clone()].concat());
    table
        .iter()
        .find(|r| sorted(&[r.photon1, r.photon2]) == members)
        .unwrap_or_else(|| panic!("no record for {members:?}"))
}

/// Reference pair chart. Rows: D3 H_1^U, H_2^U, D4 V_1^D, V_2^D. Columns:
/// D1 H_1^D, H_2^D, D2 V_1^U, V_2^U.
pub const CHART: [[&str; 4]; 4] = [
    ["1", "1", "", "1^δ"],
    ["1", "", "1^δ", ""],
    ["", "1^δ", "1", "1"],
    ["1^δ", "", "1", ""],
];

/// Input splitter, counter-detuned arms, equal delays, PBS recombination.
pub fn first_stage(tau1: f64) -> Bench {
    use ElementKind::*;
    Bench::new(vec![
        ElementSpec::new(Bs, &["in", "vac"], &["up", "down"]),
        ElementSpec::new(Aom { sign: 1.0 }, &["up"], &["u1"]),
        ElementSpec::new(Aom { sign: -1.0 }, &["down"], &["d1"]),
        ElementSpec::new(
            Delay {
                path: PathTag::U,
                tau: tau1,
            },
            &["u1"],
            &["u2"],
        ),
        ElementSpec::new(
            Delay {
                path: PathTag::D,
                tau: tau1,
            },
            &["d1"],
            &["d2"],
        ),
        ElementSpec::new(Pbs, &["u2", "d2"], &["B", "A"]),
        ElementSpec::new(Detector { id: 1 }, &["A"], &[]),
        ElementSpec::new(Detector { id: 2 }, &["B"], &[]),
    ])
    .unwrap()
}

/// `min over phi of max |y - e^{i phi} x|`, with phi from the overlap.
pub fn distance_up_to_phase(x: &PhotonField, y: &PhotonField) -> f64 {
    let overlap: Complex = ModeLabel::ALL
        .iter()
        .map(|&l| x.amplitude(l).conj() * y.amplitude(l))
        .sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex::new(1.0, 0.0)
    };
    ModeLabel::ALL
        .iter()
        .map(|&l| (y.amplitude(l) - phase * x.amplitude(l)).norm())
        .fold(0.0, f64::max)
}

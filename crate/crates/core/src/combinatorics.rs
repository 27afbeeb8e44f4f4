//! Path/polarization configurations of a photon pair and the detector pair
//! chart they give rise to.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::optics::{nmzi_transfer, Complex, ModeLabel, PathTag, PhotonField, Polarization};

/// A photon of the pair with its polarization basis and arm, e.g. `H_1^U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhotonLabel {
    pub photon: u8,
    pub pol: Polarization,
    pub path: PathTag,
}

impl PhotonLabel {
    pub fn new(photon: u8, pol: Polarization, path: PathTag) -> Self {
        Self { photon, pol, path }
    }

    pub fn mode(&self) -> ModeLabel {
        ModeLabel::new(self.pol, self.path)
    }
}

impl fmt::Display for PhotonLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}_{}^{:?}", self.pol, self.photon, self.path)
    }
}

/// Which interferometer output port a component leaves through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputPort {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// Photons in opposite arms, one in each output port.
    CrossPathKept,
    /// Both photons in the same arm; never measured.
    SamePathExcluded,
    /// Photons in opposite arms but leaving through the same port.
    SinglePortExcluded,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::CrossPathKept => "cross-path-kept",
            Classification::SamePathExcluded => "same-path-excluded",
            Classification::SinglePortExcluded => "single-port-excluded",
        })
    }
}

/// One of the sixteen ways to distribute a pair over arms and bases.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComboRecord {
    pub photon1: PhotonLabel,
    pub photon2: PhotonLabel,
    /// Photons in the up arm.
    pub up: Vec<PhotonLabel>,
    /// Photons in the down arm.
    pub down: Vec<PhotonLabel>,
    pub port_a: Vec<PhotonLabel>,
    pub port_b: Vec<PhotonLabel>,
    pub classification: Classification,
}

pub type ComboTable = Vec<ComboRecord>;

/// Output port of a single component, read off the interferometer transfer.
pub fn output_port(mode: ModeLabel) -> OutputPort {
    let (h, v) = match mode.pol {
        Polarization::H => (Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)),
        Polarization::V => (Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)),
    };
    let (a, b) = nmzi_transfer(&PhotonField::jones(h, v), 0.0, 0.0).expect("untagged input");
    if a.amplitude(mode).norm_sqr() > 0.0 {
        OutputPort::A
    } else {
        debug_assert!(b.amplitude(mode).norm_sqr() > 0.0);
        OutputPort::B
    }
}

/// All sixteen pair configurations: opposite-arm choices first (photon 1 up,
/// then photon 1 down), then both up, then both down; within each, photon
/// polarizations `(H,H), (H,V), (V,H), (V,V)`.
pub fn enumerate_combinations() -> ComboTable {
    use PathTag::{D, U};
    use Polarization::{H, V};
    let paths = [(U, D), (D, U), (U, U), (D, D)];
    let pols = [(H, H), (H, V), (V, H), (V, V)];
    let mut table = Vec::with_capacity(16);
    for &(path1, path2) in &paths {
        for &(pol1, pol2) in &pols {
            let p1 = PhotonLabel::new(1, pol1, path1);
            let p2 = PhotonLabel::new(2, pol2, path2);
            let pick = |pred: &dyn Fn(&PhotonLabel) -> bool| -> Vec<PhotonLabel> {
                [p1, p2].into_iter().filter(|p| pred(p)).collect()
            };
            let up = pick(&|p| p.path == U);
            let down = pick(&|p| p.path == D);
            let port_a = pick(&|p| output_port(p.mode()) == OutputPort::A);
            let port_b = pick(&|p| output_port(p.mode()) == OutputPort::B);
            let classification = if path1 == path2 {
                Classification::SamePathExcluded
            } else if port_a.is_empty() || port_b.is_empty() {
                Classification::SinglePortExcluded
            } else {
                Classification::CrossPathKept
            };
            table.push(ComboRecord {
                photon1: p1,
                photon2: p2,
                up,
                down,
                port_a,
                port_b,
                classification,
            });
        }
    }
    table
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartCell {
    /// Opposite detunings, same polarization: the perfectly correlated pairs.
    Correlated,
    /// Equal detunings, orthogonal polarization.
    DeltaCorrelated,
    Empty,
}

impl ChartCell {
    pub fn marker(&self) -> &'static str {
        match self {
            ChartCell::Correlated => "1",
            ChartCell::DeltaCorrelated => "1δ",
            ChartCell::Empty => "·",
        }
    }
}

/// Detector pair chart: rows are photons reaching D3 (H^U) and D4 (V^D),
/// columns photons reaching D1 (H^D) and D2 (V^U).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairChart {
    pub rows: Vec<(u8, PhotonLabel)>,
    pub columns: Vec<(u8, PhotonLabel)>,
    pub cells: Vec<Vec<ChartCell>>,
}

impl PairChart {
    pub fn cell(&self, row: PhotonLabel, column: PhotonLabel) -> Option<ChartCell> {
        let r = self.rows.iter().position(|(_, l)| *l == row)?;
        let c = self.columns.iter().position(|(_, l)| *l == column)?;
        Some(self.cells[r][c])
    }
}

/// Builds the pair chart.
///
/// Same-polarization cells pair an up-arm photon with a down-arm photon, so
/// their detunings are opposite: these are correlated. The index-degenerate
/// pairing appears once, under photon 1. Orthogonal-polarization cells from
/// the same arm share a detuning and are delta-correlated when they involve
/// both photons of the pair. Everything else is empty.
pub fn pair_chart() -> PairChart {
    use PathTag::{D, U};
    use Polarization::{H, V};
    let rows = vec![
        (3, PhotonLabel::new(1, H, U)),
        (3, PhotonLabel::new(2, H, U)),
        (4, PhotonLabel::new(1, V, D)),
        (4, PhotonLabel::new(2, V, D)),
    ];
    let columns = vec![
        (1, PhotonLabel::new(1, H, D)),
        (1, PhotonLabel::new(2, H, D)),
        (2, PhotonLabel::new(1, V, U)),
        (2, PhotonLabel::new(2, V, U)),
    ];
    let cells = rows
        .iter()
        .map(|(_, r)| columns.iter().map(|(_, c)| classify_cell(r, c)).collect())
        .collect();
    PairChart {
        rows,
        columns,
        cells,
    }
}

fn classify_cell(row: &PhotonLabel, column: &PhotonLabel) -> ChartCell {
    if row.pol == column.pol && row.path != column.path {
        if row.photon == 2 && column.photon == 2 {
            ChartCell::Empty
        } else {
            ChartCell::Correlated
        }
    } else if row.pol != column.pol && row.path == column.path && row.photon != column.photon {
        ChartCell::DeltaCorrelated
    } else {
        ChartCell::Empty
    }
}

/// Plain-text rendering of the combination table.
pub fn render_combinations(table: &ComboTable) -> String {
    let join = |v: &[PhotonLabel]| {
        if v.is_empty() {
            "0".to_string()
        } else {
            v.iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(" - ")
        }
    };
    let mut out = format!(
        "{:<4}{:<8}{:<8}{:<16}{:<16}{:<16}{:<16}{}\n",
        "#", "photon1", "photon2", "up", "down", "port A", "port B", "class"
    );
    for (k, r) in table.iter().enumerate() {
        out.push_str(&format!(
            "{:<4}{:<8}{:<8}{:<16}{:<16}{:<16}{:<16}{}\n",
            k + 1,
            r.photon1.to_string(),
            r.photon2.to_string(),
            join(&r.up),
            join(&r.down),
            join(&r.port_a),
            join(&r.port_b),
            r.classification
        ));
    }
    out
}

/// Plain-text rendering of the pair chart with markers `1`, `1δ`, `·`.
pub fn render_chart(chart: &PairChart) -> String {
    let mut out = format!("{:<10}", "");
    for (d, c) in &chart.columns {
        out.push_str(&format!("{:<10}", format!("D{d}:{c}")));
    }
    out.push('\n');
    for ((d, r), row) in chart.rows.iter().zip(&chart.cells) {
        out.push_str(&format!("{:<10}", format!("D{d}:{r}")));
        for cell in row {
            out.push_str(&format!("{:<10}", cell.marker()));
        }
        out.push('\n');
    }
    out
}

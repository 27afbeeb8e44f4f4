//! Seeded event simulation of doubly-bunched photon pairs.
//!
//! Each pair gets a fresh Gaussian detuning. In amplitude mode both photons
//! are propagated through the reference bench and the detector outcome is
//! drawn from the symmetrized two-photon distribution; the outcome is then
//! attributed to a path configuration (opposite arms, both up, both down) with
//! probability proportional to the matching basis-product weight. Heterodyne
//! filtering drops equal-detuning configurations. Classical mode instead lets
//! every detector click independently with probability `I_k / I0`.
//!
//! Pairs are processed in fixed-size blocks, each with its own ChaCha stream,
//! so parallel and serial runs produce identical counts.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::I0;
use crate::optics::{intensity, propagate_reference, Complex, PathTag, PhotonField, Polarization};

/// Pairs simulated per RNG stream.
pub const PAIRS_PER_STREAM: u64 = 1 << 16;

/// Detuning draws are truncated at this many standard deviations.
pub const DETUNING_TRUNCATION: f64 = 4.0;

pub const DETECTORS: [u8; 4] = [1, 2, 3, 4];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Amplitude,
    Classical,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "amplitude" => Ok(Mode::Amplitude),
            "classical" => Ok(Mode::Classical),
            other => Err(format!(
                "unknown mode `{other}` (expected amplitude or classical)"
            )),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Amplitude => "amplitude",
            Mode::Classical => "classical",
        })
    }
}

/// Physical and numerical parameters of one simulation point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Detuning spread, rad/s.
    pub sigma_f: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub mean_photon_number: f64,
    pub n_pairs: u64,
    pub seed: u64,
    pub higher_order_ratio: f64,
    pub detector_pulse_sigma: f64,
    /// Full width of the coincidence window, seconds.
    pub coincidence_window: f64,
    pub heterodyne_filter: bool,
    pub mode: Mode,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sigma_f: 2.0 * PI * 1.0e6,
            tau1: 1.0e-6,
            tau2: 1.0e-6,
            mean_photon_number: 0.02,
            n_pairs: 100_000,
            seed: 0,
            higher_order_ratio: 0.01,
            detector_pulse_sigma: 0.5e-9,
            coincidence_window: 5.0e-9,
            heterodyne_filter: true,
            mode: Mode::Amplitude,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid `{field}`: {reason}")]
pub struct ValidationError {
    pub field: &'static str,
    pub reason: String,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ValidationError> {
        let fail = |field, reason: &str| {
            Err(ValidationError {
                field,
                reason: reason.to_string(),
            })
        };
        let finite_non_negative = [
            ("sigma_f", self.sigma_f),
            ("tau1", self.tau1),
            ("tau2", self.tau2),
            ("detector_pulse_sigma", self.detector_pulse_sigma),
        ];
        for (field, v) in finite_non_negative {
            if !v.is_finite() || v < 0.0 {
                return fail(field, "must be finite and non-negative");
            }
        }
        if !(self.mean_photon_number.is_finite() && self.mean_photon_number > 0.0) {
            return fail("mean_photon_number", "must be positive");
        }
        if self.n_pairs < 1 {
            return fail("n_pairs", "must be at least 1");
        }
        if !(0.0..1.0).contains(&self.higher_order_ratio) {
            return fail("higher_order_ratio", "must lie in [0, 1)");
        }
        if !(self.coincidence_window.is_finite() && self.coincidence_window > 0.0) {
            return fail("coincidence_window", "must be positive");
        }
        Ok(())
    }
}

/// Draws `df ~ Normal(0, sigma_f^2)` truncated at `4 sigma_f`.
pub fn sample_detuning<R: Rng + ?Sized>(rng: &mut R, sigma_f: f64) -> f64 {
    if sigma_f == 0.0 {
        return 0.0;
    }
    loop {
        let z: f64 = rng.sample(StandardNormal);
        if z.abs() <= DETUNING_TRUNCATION {
            return sigma_f * z;
        }
    }
}

/// Adds Gaussian timing jitter of the detector pulse.
pub fn detector_convolve<R: Rng + ?Sized>(true_time: f64, rng: &mut R, pulse_sigma: f64) -> f64 {
    if pulse_sigma == 0.0 {
        return true_time;
    }
    let z: f64 = rng.sample(StandardNormal);
    true_time + pulse_sigma * z
}

/// Arm configuration a detected pair is attributed to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PathClass {
    /// Opposite arms, opposite detunings.
    Cross,
    SameUp,
    SameDown,
}

impl PathClass {
    pub fn equal_detuning(self) -> bool {
        !matches!(self, PathClass::Cross)
    }
}

/// Two-photon amplitude for one detector pair, split by path configuration.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct JointAmplitude {
    pub cross: Complex,
    pub same_up: Complex,
    pub same_down: Complex,
}

impl JointAmplitude {
    pub fn total(&self) -> Complex {
        self.cross + self.same_up + self.same_down
    }

    fn class_weights(&self) -> [(PathClass, f64); 3] {
        [
            (PathClass::Cross, self.cross.norm_sqr()),
            (PathClass::SameUp, self.same_up.norm_sqr()),
            (PathClass::SameDown, self.same_down.norm_sqr()),
        ]
    }
}

/// One doubly-bunched pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PairEvent {
    pub detuning: f64,
    pub global_phase: f64,
    /// `joint[i][j]` for detectors `i+1`, `j+1`; symmetric.
    joint: [[JointAmplitude; 4]; 4],
}

/// Unordered detector outcome `(first <= second)` with its probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutcomeProbability {
    pub first: u8,
    pub second: u8,
    pub probability: f64,
}

impl PairEvent {
    pub fn joint_amplitude(&self, i: u8, j: u8) -> JointAmplitude {
        self.joint[i as usize - 1][j as usize - 1]
    }

    /// Normalized probabilities of the ten unordered detector outcomes.
    /// Distinct detectors get `|S|^2 / 2`, a shared detector `|S|^2 / 4`,
    /// where `S` is the symmetrized amplitude.
    pub fn outcome_probabilities(&self) -> Vec<OutcomeProbability> {
        let mut out = Vec::with_capacity(10);
        for i in DETECTORS {
            for j in DETECTORS.into_iter().filter(|&j| j >= i) {
                let w = self.joint_amplitude(i, j).total().norm_sqr();
                let probability = if i == j { w / 4.0 } else { w / 2.0 };
                out.push(OutcomeProbability {
                    first: i,
                    second: j,
                    probability,
                });
            }
        }
        let total: f64 = out.iter().map(|o| o.probability).sum();
        if total > 0.0 {
            for o in &mut out {
                o.probability /= total;
            }
        }
        out
    }

    /// Probability of each path configuration given the detector outcome.
    pub fn class_probabilities(&self, i: u8, j: u8) -> [(PathClass, f64); 3] {
        let mut w = self.joint_amplitude(i, j).class_weights();
        let total: f64 = w.iter().map(|(_, x)| x).sum();
        if total > 0.0 {
            for (_, x) in &mut w {
                *x /= total;
            }
        }
        w
    }
}

fn path_split(field: &PhotonField) -> [Complex; 2] {
    // Detector fields carry a single polarization; sum both to stay general.
    let mut out = [Complex::new(0.0, 0.0); 2];
    for (k, path) in PathTag::ALL.iter().enumerate() {
        for pol in Polarization::ALL {
            out[k] += field.amplitude(crate::optics::ModeLabel::new(pol, *path));
        }
    }
    out
}

/// Symmetrized pairing amplitudes for two photons with detector fields `a`
/// and `b` (D1..D4). The global phase multiplies both photons.
pub fn pair_amplitudes_from_fields(
    a: &[PhotonField; 4],
    b: &[PhotonField; 4],
    detuning: f64,
    global_phase: f64,
) -> PairEvent {
    let g = Complex::from_polar(1.0, global_phase);
    let pa: Vec<[Complex; 2]> = a.iter().map(|f| path_split(f).map(|c| c * g)).collect();
    let pb: Vec<[Complex; 2]> = b.iter().map(|f| path_split(f).map(|c| c * g)).collect();
    let (u, d) = (0, 1);
    let mut joint = [[JointAmplitude::default(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            joint[i][j] = JointAmplitude {
                cross: pa[i][u] * pb[j][d]
                    + pa[j][u] * pb[i][d]
                    + (pa[i][d] * pb[j][u] + pa[j][d] * pb[i][u]),
                same_up: pa[i][u] * pb[j][u] + pa[j][u] * pb[i][u],
                same_down: pa[i][d] * pb[j][d] + pa[j][d] * pb[i][d],
            };
        }
    }
    PairEvent {
        detuning,
        global_phase,
        joint,
    }
}

/// Pair event for two photons sent through the reference bench.
pub fn pair_amplitudes(df: f64, tau1: f64, tau2: f64, global_phase: f64) -> PairEvent {
    let fields = propagate_reference(1.0, df, tau1, tau2, 1.0);
    pair_amplitudes_from_fields(&fields, &fields, df, global_phase)
}

/// A two-detector outcome ready for post-selection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Detection {
    pub first: u8,
    pub second: u8,
    /// `None` for classical and accidental events.
    pub class: Option<PathClass>,
    /// Measured arrival-time difference, seconds.
    pub time_difference: f64,
}

/// Coincidence post-selection: two distinct detectors inside the window and,
/// with heterodyne filtering, not an equal-detuning configuration.
pub fn postselect(detection: &Detection, config: &RunConfig) -> bool {
    if detection.first == detection.second {
        return false;
    }
    if detection.time_difference.abs() > 0.5 * config.coincidence_window {
        return false;
    }
    if config.heterodyne_filter && detection.class.is_some_and(PathClass::equal_detuning) {
        return false;
    }
    true
}

/// Counts gathered by a run. Detectors are indexed 1..=4.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsAccumulator {
    pub singles: [u64; 4],
    /// Upper triangle `[i-1][j-1]`, `i < j`.
    pub coincidences: [[u64; 4]; 4],
    pub histogram: BTreeMap<usize, u64>,
    pub n_generated: u64,
    pub n_postselected: u64,
    pub n_accidental: u64,
}

impl CountsAccumulator {
    pub fn singles(&self, detector: u8) -> u64 {
        self.singles[detector as usize - 1]
    }

    pub fn coincidences(&self, i: u8, j: u8) -> u64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.coincidences[a as usize - 1][b as usize - 1]
    }

    pub fn total_coincidences(&self) -> u64 {
        self.coincidences.iter().flatten().sum()
    }

    fn record_coincidence(&mut self, i: u8, j: u8, bin: usize) {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.coincidences[a as usize - 1][b as usize - 1] += 1;
        *self.histogram.entry(bin).or_default() += 1;
    }

    /// Adds `other` into `self`. Addition is commutative, so merge order
    /// never changes the result.
    pub fn merge(&mut self, other: &CountsAccumulator) {
        for k in 0..4 {
            self.singles[k] += other.singles[k];
            for l in 0..4 {
                self.coincidences[k][l] += other.coincidences[k][l];
            }
        }
        for (bin, n) in &other.histogram {
            *self.histogram.entry(*bin).or_default() += n;
        }
        self.n_generated += other.n_generated;
        self.n_postselected += other.n_postselected;
        self.n_accidental += other.n_accidental;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

/// Runs one configuration with scan bin 0.
pub fn simulate_run(config: &RunConfig) -> Result<CountsAccumulator, ValidationError> {
    simulate_point(config, 0, Execution::Parallel)
}

/// Runs one configuration, tagging coincidences with histogram `bin`.
pub fn simulate_point(
    config: &RunConfig,
    bin: usize,
    execution: Execution,
) -> Result<CountsAccumulator, ValidationError> {
    config.validate()?;
    let n_streams = config.n_pairs.div_ceil(PAIRS_PER_STREAM);
    let block = |stream: u64| {
        let start = stream * PAIRS_PER_STREAM;
        let len = PAIRS_PER_STREAM.min(config.n_pairs - start);
        simulate_block(config, stream, len, bin)
    };
    let merge = |mut a: CountsAccumulator, b: CountsAccumulator| {
        a.merge(&b);
        a
    };
    let counts = match execution {
        Execution::Serial => (0..n_streams)
            .map(block)
            .fold(CountsAccumulator::default(), merge),
        Execution::Parallel => (0..n_streams)
            .into_par_iter()
            .map(block)
            .reduce(CountsAccumulator::default, merge),
    };
    Ok(counts)
}

/// Runs every scan point (in parallel); results are in input order and point
/// `k` fills histogram bin `k`.
pub fn simulate_scan(points: &[RunConfig]) -> Result<Vec<CountsAccumulator>, ValidationError> {
    points
        .par_iter()
        .enumerate()
        .map(|(k, cfg)| simulate_point(cfg, k, Execution::Parallel))
        .collect()
}

fn simulate_block(config: &RunConfig, stream: u64, len: u64, bin: usize) -> CountsAccumulator {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(stream);
    let mut counts = CountsAccumulator::default();
    for _ in 0..len {
        counts.n_generated += 1;
        let kept = match config.mode {
            Mode::Amplitude => amplitude_event(config, &mut rng, &mut counts, bin),
            Mode::Classical => classical_event(config, &mut rng, &mut counts, bin),
        };
        let accidental = accidental_event(config, &mut rng, &mut counts, bin);
        if kept || accidental {
            counts.n_postselected += 1;
        }
    }
    counts
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, weighted: impl IntoIterator<Item = (T, f64)>) -> T {
    let items: Vec<(T, f64)> = weighted.into_iter().collect();
    let total: f64 = items.iter().map(|(_, w)| w).sum();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (item, w) in items {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = Some(item);
        if target < acc {
            return item;
        }
    }
    last.expect("at least one positive weight")
}

fn amplitude_event(
    config: &RunConfig,
    rng: &mut ChaCha8Rng,
    counts: &mut CountsAccumulator,
    bin: usize,
) -> bool {
    let df = sample_detuning(rng, config.sigma_f);
    let global_phase = rng.random::<f64>() * 2.0 * PI;
    let event = pair_amplitudes(df, config.tau1, config.tau2, global_phase);
    let outcome = pick(
        rng,
        event
            .outcome_probabilities()
            .into_iter()
            .map(|o| ((o.first, o.second), o.probability)),
    );
    let (i, j) = outcome;
    let class = pick(rng, event.class_probabilities(i, j));
    counts.singles[i as usize - 1] += 1;
    counts.singles[j as usize - 1] += 1;

    let arrival = match class {
        PathClass::Cross => config.tau2 - config.tau1,
        PathClass::SameUp | PathClass::SameDown => 0.0,
    };
    let t_i = detector_convolve(0.0, rng, config.detector_pulse_sigma);
    let t_j = detector_convolve(arrival, rng, config.detector_pulse_sigma);
    let detection = Detection {
        first: i,
        second: j,
        class: Some(class),
        time_difference: t_j - t_i,
    };
    if postselect(&detection, config) {
        counts.record_coincidence(i, j, bin);
        true
    } else {
        false
    }
}

/// Per-detector click probabilities `I_k / I0` for one detuning draw.
pub fn classical_click_probabilities(df: f64, tau1: f64, tau2: f64) -> [f64; 4] {
    // Source amplitude sqrt2 puts I0 on each interferometer output port.
    let fields = propagate_reference(SQRT_2, df, tau1, tau2, 1.0);
    fields.map(|f| (intensity(&f) / I0).clamp(0.0, 1.0))
}

fn classical_event(
    config: &RunConfig,
    rng: &mut ChaCha8Rng,
    counts: &mut CountsAccumulator,
    bin: usize,
) -> bool {
    let df = sample_detuning(rng, config.sigma_f);
    let p = classical_click_probabilities(df, config.tau1, config.tau2);
    let mut clicks = [None; 4];
    for k in 0..4 {
        let u = rng.random::<f64>();
        let t = detector_convolve(0.0, rng, config.detector_pulse_sigma);
        if u < p[k] {
            counts.singles[k] += 1;
            clicks[k] = Some(t);
        }
    }
    let mut kept = false;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if let (Some(ti), Some(tj)) = (clicks[i], clicks[j]) {
                let detection = Detection {
                    first: i as u8 + 1,
                    second: j as u8 + 1,
                    class: None,
                    time_difference: tj - ti,
                };
                if postselect(&detection, config) {
                    counts.record_coincidence(i as u8 + 1, j as u8 + 1, bin);
                    kept = true;
                }
            }
        }
    }
    kept
}

/// Higher-order contamination: with probability `higher_order_ratio` a pair
/// slot also yields a coincidence between two uniformly chosen detectors.
/// Classical mode has no pair structure and ignores it.
fn accidental_event(
    config: &RunConfig,
    rng: &mut ChaCha8Rng,
    counts: &mut CountsAccumulator,
    bin: usize,
) -> bool {
    if config.higher_order_ratio == 0.0 || config.mode == Mode::Classical {
        return false;
    }
    if rng.random::<f64>() >= config.higher_order_ratio {
        return false;
    }
    counts.n_accidental += 1;
    let pairs = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];
    let (i, j) = pairs[rng.random_range(0..pairs.len())];
    let t_i = detector_convolve(0.0, rng, config.detector_pulse_sigma);
    let t_j = detector_convolve(0.0, rng, config.detector_pulse_sigma);
    let detection = Detection {
        first: i,
        second: j,
        class: None,
        time_difference: t_j - t_i,
    };
    if postselect(&detection, config) {
        counts.record_coincidence(i, j, bin);
        true
    } else {
        false
    }
}

/// Normalized coincidence estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct G2Estimate {
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EstimateError {
    #[error("detector D{0} has no singles; g2 is undefined")]
    UndefinedSingles(u8),
    #[error("no trials recorded")]
    NoTrials,
}

/// `C_ij N / (S_i S_j)` over `N = n_generated` trials.
///
/// The error is the delta-method propagation of binomial fluctuations of the
/// per-trial indicators of a click on `i`, on `j` and a coincidence, with
/// their covariances. Zero coincidences report the error of a single count.
pub fn g2_estimate(
    counts: &CountsAccumulator,
    pair: (u8, u8),
) -> Result<G2Estimate, EstimateError> {
    let (i, j) = pair;
    let n = counts.n_generated as f64;
    if counts.n_generated == 0 {
        return Err(EstimateError::NoTrials);
    }
    for d in [i, j] {
        if counts.singles(d) == 0 {
            return Err(EstimateError::UndefinedSingles(d));
        }
    }
    let a = counts.singles(i) as f64 / n;
    let b = counts.singles(j) as f64 / n;
    let c_count = counts.coincidences(i, j);
    let value = (c_count as f64 / n) / (a * b);
    let c = c_count.max(1) as f64 / n;

    // Gradient of c / (a b) and covariance of (x_i, x_j, x_ij).
    let grad = [-c / (a * a * b), -c / (a * b * b), 1.0 / (a * b)];
    let cov = [
        [a * (1.0 - a), c - a * b, c * (1.0 - a)],
        [c - a * b, b * (1.0 - b), c * (1.0 - b)],
        [c * (1.0 - a), c * (1.0 - b), c * (1.0 - c)],
    ];
    let mut var = 0.0;
    for r in 0..3 {
        for s in 0..3 {
            var += grad[r] * cov[r][s] * grad[s];
        }
    }
    Ok(G2Estimate {
        value,
        std_error: (var.max(0.0) / n).sqrt(),
    })
}

/// Poisson photon-number statistics of the attenuated source.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhotonStatistics {
    pub mean_photon_number: f64,
    pub p_vacuum: f64,
    pub p_single: f64,
    pub p_double: f64,
    pub p_higher: f64,
    pub double_to_single: f64,
    pub higher_to_double: f64,
}

impl PhotonStatistics {
    pub fn poisson(mu: f64) -> Self {
        let p0 = (-mu).exp();
        let p1 = mu * p0;
        let p2 = mu * mu / 2.0 * p0;
        // 1 - p0 - p1 - p2 loses all precision at small mu; sum the tail.
        let mut term = p2;
        let mut p_higher = 0.0;
        for n in 3..200 {
            term *= mu / n as f64;
            p_higher += term;
            if term < p_higher * 1e-17 {
                break;
            }
        }
        Self {
            mean_photon_number: mu,
            p_vacuum: p0,
            p_single: p1,
            p_double: p2,
            p_higher,
            double_to_single: p2 / p1,
            higher_to_double: p_higher / p2,
        }
    }
}

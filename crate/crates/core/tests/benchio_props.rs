//! Configuration and result-table round trips.

use cohom::benchio::{
    parse_config, parse_csv, parse_json, render_config, render_csv, render_json, resolve_seed,
    BenchConfig, Manifest, ResultRow, RunResult, ScanSpec, Timing,
};
use cohom::montecarlo::Mode;
use proptest::prelude::*;

fn timing() -> impl Strategy<Value = Timing> {
    prop_oneof![
        (0.0..1e-5f64).prop_map(|tau2_s| Timing::Fixed { tau2_s }),
        (0.0..1e-8f64, 0.0..1e-8f64, 1usize..200).prop_map(|(a, b, steps)| {
            Timing::Scan(ScanSpec {
                start_s: -a,
                stop_s: b,
                steps,
            })
        }),
    ]
}

prop_compose! {
    fn config()(
        sigma_f_hz in 0.0..1e8f64,
        tau1_s in 1e-8..1e-5f64,
        timing in timing(),
        mean_photon_number in 1e-6..1.0f64,
        n_pairs in 1u64..u64::MAX,
        higher_order_ratio in 0.0..0.999f64,
        pulse_sigma_s in 0.0..1e-8f64,
        coincidence_window_s in 1e-12..1e-7f64,
        seed in any::<u64>(),
        classical in any::<bool>(),
        heterodyne_filter in any::<bool>(),
    ) -> BenchConfig {
        BenchConfig {
            sigma_f_hz,
            tau1_s,
            timing,
            mean_photon_number,
            n_pairs,
            higher_order_ratio,
            pulse_sigma_s,
            coincidence_window_s,
            seed,
            mode: if classical { Mode::Classical } else { Mode::Amplitude },
            heterodyne_filter,
        }
    }
}

const KEYS: [&str; 14] = [
    "sigma_f_hz",
    "tau1_s",
    "tau2_s",
    "tau21_start_s",
    "tau21_stop_s",
    "tau21_steps",
    "mean_photon_number",
    "n_pairs",
    "higher_order_ratio",
    "pulse_sigma_s",
    "coincidence_window_s",
    "seed",
    "mode",
    "heterodyne_filter",
];

fn row() -> impl Strategy<Value = ResultRow> {
    let f = || prop_oneof![9 => -1e3..1e3f64, 1 => Just(f64::NAN)];
    (prop::array::uniform11(f()), any::<u32>(), any::<u32>()).prop_map(|(x, c13, c24)| ResultRow {
        tau21_s: x[0],
        intensities: [x[1], x[2], x[3], x[4]],
        r13: x[5],
        r24: x[6],
        g2_13: x[7],
        g2_13_err: x[8],
        g2_24: x[9],
        g2_24_err: x[10],
        n_coinc_13: c13 as u64,
        n_coinc_24: c24 as u64,
    })
}

/// Equality that treats NaN as equal to NaN.
fn same_rows(a: &[ResultRow], b: &[ResultRow]) -> bool {
    let bits = |r: &ResultRow| {
        let f = [
            r.tau21_s,
            r.intensities[0],
            r.intensities[1],
            r.intensities[2],
            r.intensities[3],
            r.r13,
            r.r24,
            r.g2_13,
            r.g2_13_err,
            r.g2_24,
            r.g2_24_err,
        ];
        (
            f.map(|x| if x.is_nan() { u64::MAX } else { x.to_bits() }),
            r.n_coinc_13,
            r.n_coinc_24,
        )
    };
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| bits(x) == bits(y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn config_render_parse_round_trip(cfg in config()) {
        let text = render_config(&cfg);
        prop_assert_eq!(parse_config(&text).unwrap(), cfg);
    }

    #[test]
    fn misspelled_key_is_rejected(cfg in config(), which in 0usize..14, at in any::<prop::sample::Index>()) {
        let text = render_config(&cfg);
        let key = KEYS[which];
        prop_assume!(text.lines().any(|l| l.starts_with(&format!("{key} ="))));
        // Drop one character of the key.
        let k = at.index(key.len());
        let bad: String = key.chars().enumerate().filter(|&(i, _)| i != k).map(|(_, c)| c).collect();
        prop_assume!(!KEYS.contains(&bad.as_str()));
        let edited = text
            .lines()
            .map(|l| if l.starts_with(&format!("{key} =")) { l.replacen(key, &bad, 1) } else { l.to_string() })
            .collect::<Vec<_>>()
            .join("\n");
        let line = edited.lines().position(|l| l.starts_with(&format!("{bad} ="))).unwrap() + 1;
        let err = parse_config(&edited).unwrap_err();
        prop_assert_eq!(err.line, line);
        prop_assert_eq!(err.column, 1);
        prop_assert!(err.message.contains(&bad));
    }

    #[test]
    fn csv_round_trip_equals_rounded_rows(rows in prop::collection::vec(row(), 0..20)) {
        let back = parse_csv(&render_csv(&rows).unwrap()).unwrap();
        let want: Vec<_> = rows.iter().map(ResultRow::rounded).collect();
        prop_assert!(same_rows(&back, &want));
        // A second pass is a fixed point.
        let again = parse_csv(&render_csv(&back).unwrap()).unwrap();
        prop_assert!(same_rows(&again, &back));
    }

    #[test]
    fn json_round_trip_equals_rounded_rows(rows in prop::collection::vec(row(), 0..20), seed in any::<u64>()) {
        let result = RunResult { manifest: manifest(seed), rows: rows.clone() };
        let back = parse_json(&render_json(&result).unwrap()).unwrap();
        prop_assert_eq!(&back.manifest, &result.manifest);
        let want: Vec<_> = rows.iter().map(ResultRow::rounded).collect();
        prop_assert!(same_rows(&back.rows, &want));
    }
}

fn manifest(seed: u64) -> Manifest {
    Manifest {
        tool: "cohom".into(),
        version: "0.1.0".into(),
        command: "scan".into(),
        seed,
        config: render_config(&BenchConfig {
            seed,
            ..BenchConfig::default()
        }),
        started_unix_s: 1.7e9,
        wall_clock_s: 0.25,
    }
}

#[test]
fn manifest_config_echoes_the_seed() {
    let m = manifest(987_654_321);
    assert_eq!(parse_config(&m.config).unwrap().seed, m.seed);
}

#[test]
fn seed_precedence() {
    assert_eq!(resolve_seed(Some(1), Some("2"), 3).unwrap(), 1);
    assert_eq!(resolve_seed(None, Some(" 2 "), 3).unwrap(), 2);
    assert_eq!(resolve_seed(None, None, 3).unwrap(), 3);
    assert!(resolve_seed(None, Some("-4"), 3).is_err());
}

#[test]
fn errors_point_at_line_and_column() {
    let cases: [(&str, usize, usize, &str); 8] = [
        ("[bench]\nsigma_f_hz = abc\n", 2, 14, "finite number"),
        ("[bench]\n  tau1_s = -1e-6\n", 2, 12, "non-negative"),
        ("tau1_s = 1\n", 1, 1, "before any section"),
        ("[bench\n", 1, 1, "unterminated"),
        ("[optics]\n", 1, 1, "unknown section"),
        ("[source]\nn_pairs = 10\nn_pairs = 20\n", 3, 1, "duplicate"),
        ("[source]\nn_pairs = 1.5\n", 2, 11, "integer"),
        (
            "[bench]\ntau2_s = 1e-6\ntau21_start_s = 0\ntau21_stop_s = 1e-9\n",
            2,
            1,
            "cannot be combined",
        ),
    ];
    for (text, line, column, fragment) in cases {
        let err = parse_config(text).unwrap_err();
        assert_eq!((err.line, err.column), (line, column), "{text:?}: {err}");
        assert!(err.message.contains(fragment), "{text:?}: {err}");
        assert!(err
            .to_string()
            .starts_with(&format!("line {line}, column {column}")));
    }
}

#[test]
fn comments_defaults_and_exponent_integers() {
    let cfg = parse_config(
        "# bench file\n; another\n[source]\nn_pairs = 1e6 # one million\n[run]\nmode = classical\n",
    )
    .unwrap();
    assert_eq!(cfg.n_pairs, 1_000_000);
    assert_eq!(cfg.mode, Mode::Classical);
    assert_eq!(cfg.timing, Timing::Fixed { tau2_s: cfg.tau1_s });
    assert_eq!(
        BenchConfig {
            n_pairs: 100_000,
            mode: Mode::Amplitude,
            ..cfg
        },
        BenchConfig::default()
    );
}

#[test]
fn scan_points_span_the_range() {
    let cfg = parse_config(
        "[bench]\ntau1_s = 1e-6\ntau21_start_s = -2e-9\ntau21_stop_s = 2e-9\ntau21_steps = 5\n",
    )
    .unwrap();
    let pts = cfg.points();
    assert_eq!(pts.len(), 5);
    assert_eq!(pts[0].0, -2e-9);
    assert_eq!(pts[4].0, 2e-9);
    assert!((pts[2].1.tau2 - 1e-6).abs() < 1e-20);
    assert!((pts[0].1.sigma_f - 2.0 * std::f64::consts::PI * 1e6).abs() < 1e-6);
}

use ergodic_lab::config::{ExperimentConfig, ExperimentKind, Format, Schedule};
use ergodic_lab::report::{emit, format_f64, from_json, render, to_csv, to_json, Value};
use ergodic_lab::{ExperimentReport, Flag, Row, Verdict};
use proptest::prelude::*;

fn report_with(rows: Vec<Row>) -> ExperimentReport {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Ww);
    cfg.x = Some("rotation(SQRT2)".into());
    cfg.schedule = Some(Schedule {
        start: 8,
        doublings: 2,
    });
    let mut r = ExperimentReport::new(&cfg);
    r.rows = rows;
    r
}

#[test]
fn empty_report_is_header_only() {
    let csv = to_csv(&report_with(vec![]));
    assert_eq!(csv, "experiment,N,value_re,value_im,bound,verdict\n");
}

#[test]
fn three_rows_four_lines() {
    let rows = vec![
        Row::new("a", 8, 0.5, 1e-3, Verdict::Pass),
        Row::new("a", 16, -0.25, 2e-3, Verdict::Pass),
        Row::new("", 32, 1.0 / 3.0, 0.0, Verdict::Fail),
    ];
    let csv = to_csv(&report_with(rows));
    assert!(csv.ends_with('\n'));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(
        lines[1],
        "ww/a,8,5.0000000000000000e-1,0.0000000000000000e0,1.0000000000000000e-3,PASS"
    );
    assert_eq!(
        lines[3],
        "ww,32,3.3333333333333331e-1,0.0000000000000000e0,0.0000000000000000e0,FAIL"
    );
}

#[test]
fn labels_with_commas_are_quoted() {
    let csv = to_csv(&report_with(vec![Row::new(
        "char(1,0)",
        1,
        0.0,
        0.0,
        Verdict::Pass,
    )]));
    assert!(csv
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("\"ww/char(1,0)\",1,"));
}

#[test]
fn seventeen_significant_digits() {
    for x in [
        0.1,
        1.0 / 3.0,
        -2.5e-300,
        6.02214076e23,
        f64::MIN_POSITIVE,
        5e-324,
    ] {
        let s = format_f64(x);
        let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(
            mantissa.chars().filter(char::is_ascii_digit).count(),
            17,
            "{s}"
        );
        assert_eq!(s.parse::<f64>().unwrap(), x);
    }
    assert_eq!(format_f64(f64::NAN), "NaN");
}

#[test]
fn json_numbers_are_raw_17_digit() {
    let json = to_json(&report_with(vec![Row::new(
        "a",
        8,
        0.1,
        0.2,
        Verdict::Pass,
    )]));
    assert!(json.ends_with('\n'));
    assert!(json.contains("\"re\": 1.0000000000000001e-1"));
    assert!(json.contains("\"bound\": 2.0000000000000001e-1"));
    assert!(json.contains("\"tolerance\": 1.0000000000000000e-2"));
}

#[test]
fn non_finite_become_null() {
    let r = report_with(vec![Row::new(
        "a",
        1,
        f64::INFINITY,
        f64::NAN,
        Verdict::Inconclusive,
    )]);
    let json = to_json(&r);
    assert!(json.contains("\"re\": null"));
    let back = from_json(&json).unwrap();
    assert!(back.rows[0].value.re.is_nan() && back.rows[0].bound.is_nan());
}

#[test]
fn emit_writes_and_reports_path() {
    let dir = tempfile::tempdir().unwrap();
    let r = report_with(vec![Row::new("a", 8, 0.5, 0.0, Verdict::Pass)]);
    let csv = dir.path().join("r.csv");
    emit(&r, Format::Csv, &csv).unwrap();
    assert_eq!(
        std::fs::read_to_string(&csv).unwrap(),
        render(&r, Format::Csv)
    );
    let json = dir.path().join("r.json");
    emit(&r, Format::Json, &json).unwrap();
    assert_eq!(
        from_json(&std::fs::read_to_string(&json).unwrap()).unwrap(),
        r
    );
    let missing = dir.path().join("no/such/dir/r.csv");
    let err = emit(&r, Format::Csv, &missing).unwrap_err();
    assert!(err.to_string().contains("no/such/dir"));
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        -1.0f64..1.0
    ]
}

fn verdict() -> impl Strategy<Value = Verdict> {
    prop_oneof![
        Just(Verdict::Pass),
        Just(Verdict::Fail),
        Just(Verdict::Inconclusive)
    ]
}

fn row() -> impl Strategy<Value = Row> {
    (
        "[a-z0-9/,+ -]{0,12}",
        any::<u64>(),
        finite(),
        finite(),
        finite(),
        verdict(),
    )
        .prop_map(|(l, n, re, im, b, v)| Row {
            label: l,
            n,
            value: Value { re, im },
            bound: b,
            verdict: v,
        })
}

proptest! {
    #[test]
    fn json_round_trips(rows in prop::collection::vec(row(), 0..6), tol in 1e-12f64..10.0, seed in any::<u64>(), flags in prop::collection::vec(prop_oneof![Just(Flag::Refused), Just(Flag::StartSensitive), Just(Flag::Counterexample)], 0..3)) {
        let mut r = report_with(rows);
        r.config.tolerance = tol;
        r.config.seed = seed;
        r.config.witness_threshold = Some(tol / 3.0);
        for f in flags {
            r.flag(f);
        }
        r.note("a note, with a comma");
        prop_assert_eq!(from_json(&to_json(&r)).unwrap(), r);
    }

    #[test]
    fn csv_fields_parse_back(rows in prop::collection::vec(row(), 0..6)) {
        let r = report_with(rows);
        let csv = to_csv(&r);
        let mut reader = csv::Reader::from_reader(csv.as_bytes());
        let parsed: Vec<csv::StringRecord> = reader.records().map(|x| x.unwrap()).collect();
        prop_assert_eq!(parsed.len(), r.rows.len());
        for (rec, row) in parsed.iter().zip(&r.rows) {
            prop_assert_eq!(rec[1].parse::<u64>().unwrap(), row.n);
            prop_assert_eq!(rec[2].parse::<f64>().unwrap(), row.value.re);
            prop_assert_eq!(rec[3].parse::<f64>().unwrap(), row.value.im);
            prop_assert_eq!(rec[4].parse::<f64>().unwrap(), row.bound);
        }
    }
}

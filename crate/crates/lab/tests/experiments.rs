use std::f64::consts::PI;

use ergodic_lab::config::{ExperimentConfig, ExperimentKind, Schedule};
use ergodic_lab::report::to_csv;
use ergodic_lab::{run_experiment, Flag, RunError, Verdict};
use num_complex::Complex64;

fn cfg(kind: ExperimentKind) -> ExperimentConfig {
    ExperimentConfig::new(kind)
}

fn ww_cfg(x: &str, y: &str, f: &str, phi: &str, start: u64, doublings: u32) -> ExperimentConfig {
    let mut c = cfg(ExperimentKind::Ww);
    c.x = Some(x.into());
    c.y = Some(y.into());
    c.f = vec![f.into()];
    c.phi = vec![phi.into()];
    c.schedule = Some(Schedule { start, doublings });
    c
}

/// Start coordinates recorded in the notes as `startK: x = (a), y = (b)`.
fn starts(notes: &[String]) -> Vec<(f64, f64)> {
    notes
        .iter()
        .filter(|n| n.starts_with("start"))
        .map(|n| {
            let nums: Vec<f64> = n
                .split(['(', ')'])
                .filter_map(|s| s.trim().parse::<f64>().ok())
                .collect();
            (nums[0], nums[1])
        })
        .collect()
}

fn phase(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

#[test]
fn tempered_intervals_and_boxes() {
    let mut c = cfg(ExperimentKind::TemperedCheck);
    c.folner = Some("intervals".into());
    c.max_n = Some(1000);
    let r = run_experiment(&c).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.rows[0].bound, 2.0);
    assert_eq!(r.rows[0].value.re, 1998.0 / 1000.0);

    c.folner = Some("boxes:2".into());
    c.max_n = Some(60);
    assert_eq!(run_experiment(&c).unwrap().rows[0].bound, 4.0);

    c.folner = None;
    c.windows = vec![vec![1], vec![1, 2]];
    c.max_n = Some(2);
    assert!(matches!(run_experiment(&c), Err(RunError::Config(e)) if e.path == "cap"));
    c.cap = Some("1/2".into());
    assert_eq!(run_experiment(&c).unwrap().verdict, Verdict::Fail);
    c.cap = Some("1".into());
    assert_eq!(run_experiment(&c).unwrap().verdict, Verdict::Pass);
}

#[test]
fn joinings_sweep_passes() {
    let mut c = cfg(ExperimentKind::JoiningsSweep);
    c.max_order = Some(12);
    let r = run_experiment(&c).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.rows.len(), 121);
    let r46 = r.rows.iter().find(|r| r.label == "Z4xZ6").unwrap();
    assert_eq!((r46.n, r46.value.re), (24, 2.0));
    c.max_order = Some(400);
    assert!(matches!(run_experiment(&c), Err(RunError::Config(e)) if e.path == "max_order"));
}

#[test]
fn ww_rotations_match_geometric_sums() {
    let (a, b) = (2f64.sqrt(), 3f64.sqrt());
    let mut c = ww_cfg(
        "rotation(SQRT2)",
        "rotation(SQRT3)",
        "char(1)",
        "char(1)",
        256,
        4,
    );
    c.starts = Some(2);
    c.seed = 5;
    let r = run_experiment(&c).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    let st = starts(&r.notes);
    assert_eq!(st.len(), 2);
    for row in &r.rows {
        let s: usize = row.label.trim_start_matches("start").parse().unwrap();
        let (x, y) = st[s];
        let n = row.n;
        let sum: Complex64 = (1..=n).map(|k| phase(k as f64 * (a + b))).sum();
        let want = phase(x + y) * sum / n as f64;
        let got = Complex64::new(row.value.re, row.value.im);
        assert!((got - want).norm() < 1e-9, "{row:?}");
        // |A_N| <= 2 / (N |1 - e(a + b)|).
        let bound = 2.0 / (n as f64 * 2.0 * (PI * (a + b)).sin().abs());
        assert!(got.norm() <= bound + 1e-12);
    }
}

#[test]
fn ww_constant_f_reduces_to_birkhoff() {
    let c = ww_cfg(
        "rotation(SQRT2)",
        "rotation(GOLDEN)",
        "const",
        "arc(0,1/3)",
        512,
        3,
    );
    let r = run_experiment(&c).unwrap();
    for row in &r.rows {
        assert!(row.bound < 1e-15, "{row:?}");
    }
    assert_eq!(r.verdict, Verdict::Pass);
}

#[test]
fn ww_refusals() {
    let r = run_experiment(&ww_cfg(
        "rotation(1/2)",
        "rotation(1/4)",
        "char(1)",
        "char(1)",
        64,
        1,
    ))
    .unwrap();
    assert_eq!(r.verdict, Verdict::Inconclusive);
    assert_eq!(r.flags, vec![Flag::Refused]);
    assert!(r.rows.is_empty());
    let r = run_experiment(&ww_cfg(
        "thue-morse",
        "rotation(SQRT2)",
        "symbol",
        "char(1)",
        64,
        1,
    ))
    .unwrap();
    assert_eq!(r.flags, vec![Flag::Refused]);
}

#[test]
fn ww_accepts_any_disjoint_y() {
    // Only x must be distal; the q-adic containment settles disjointness.
    let r = run_experiment(&ww_cfg(
        "rotation(SQRT2)",
        "thue-morse",
        "char(1)",
        "symbol",
        1 << 12,
        4,
    ))
    .unwrap();
    assert!(r.flags.is_empty());
    assert_eq!(r.verdict, Verdict::Pass);
}

#[test]
fn ww_without_convergence_is_inconclusive() {
    // Slow oscillation: the Cauchy gaps stay large over this short schedule.
    let mut c = ww_cfg(
        "rotation(SQRT2/1000)",
        "rotation(1/3)",
        "char(1)",
        "const",
        16,
        3,
    );
    c.tolerance = 1e-6;
    let r = run_experiment(&c).unwrap();
    assert_eq!(r.verdict, Verdict::Inconclusive);
    assert!(!r.flags.contains(&Flag::StartSensitive));
}

#[test]
fn ww_finite_x_converges() {
    let mut c = ww_cfg(
        "finite(3;1)",
        "rotation(SQRT2)",
        "char(1)",
        "char(1)",
        3 * 64,
        3,
    );
    c.starts = Some(4);
    let r = run_experiment(&c).unwrap();
    // SQRT2 is not a cube-root frequency, so every start tends to 0.
    assert_eq!(r.verdict, Verdict::Pass);
}

#[test]
fn ww_mixed_starts_are_flagged() {
    // Short schedule and loose tolerance: some starts settle, others do not.
    let mut c = ww_cfg(
        "skew(SQRT2)",
        "rotation(SQRT3)",
        "char(0,1)",
        "char(1)",
        256,
        3,
    );
    c.seed = 1;
    c.starts = Some(8);
    c.tolerance = 0.05;
    let r = run_experiment(&c).unwrap();
    assert!(r.flags.contains(&Flag::StartSensitive));
    assert_eq!(r.verdict, Verdict::Inconclusive);
    let per_start: Vec<Verdict> = r
        .rows
        .iter()
        .filter(|x| x.n == 2048)
        .map(|x| x.verdict)
        .collect();
    assert!(per_start.contains(&Verdict::Pass) && per_start.contains(&Verdict::Inconclusive));
}

fn po_cfg(x: &str, y: &str, f: &[&str], g: &[&str]) -> ExperimentConfig {
    let mut c = cfg(ExperimentKind::ProductOrthogonality);
    c.x = Some(x.into());
    c.y = Some(y.into());
    c.f = f.iter().map(|s| s.to_string()).collect();
    c.phi = g.iter().map(|s| s.to_string()).collect();
    c.samples = Some(8);
    c.tolerance = 0.02;
    c.schedule = Some(Schedule {
        start: 4000,
        doublings: 0,
    });
    c
}

#[test]
fn product_orthogonality_modes() {
    let r = run_experiment(&po_cfg(
        "rotation(SQRT2)",
        "rotation(SQRT3)",
        &["char(1)"],
        &["char(1)"],
    ))
    .unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert!(r.rows[0].bound < 1e-3);
    let r = run_experiment(&po_cfg(
        "rotation(SQRT2)",
        "rotation(SQRT3)",
        &["char(1)", "char(1)"],
        &["char(1)"],
    ))
    .unwrap();
    assert_eq!(r.verdict, Verdict::Pass);

    let r = run_experiment(&po_cfg(
        "rotation(1/4)",
        "rotation(1/4)",
        &["char(1)"],
        &["char(-1)"],
    ))
    .unwrap();
    assert_eq!(r.flags, vec![Flag::Counterexample]);
    assert_eq!(r.verdict, Verdict::Pass);
    // Every sample contributes |e(x - y) - 0| = 1.
    assert!((r.rows[0].bound - 1.0).abs() < 1e-12);

    let mut bad = po_cfg(
        "rotation(SQRT2)",
        "rotation(SQRT3)",
        &["char(1)"],
        &["char(1)"],
    );
    bad.samples = Some(1);
    assert!(matches!(run_experiment(&bad), Err(RunError::Config(e)) if e.path == "samples"));
}

fn wm_cfg(arc: &str, k: u32) -> ExperimentConfig {
    let mut c = cfg(ExperimentKind::WeightedMultirec);
    c.x = Some("rotation(GOLDEN)".into());
    c.weight = Some("level(thue-morse,0)".into());
    c.arc = Some(arc.into());
    c.k = Some(k);
    c.tolerance = 0.02;
    c.schedule = Some(Schedule {
        start: 1024,
        doublings: 2,
    });
    c
}

#[test]
fn weighted_multirec_examples() {
    let r = run_experiment(&wm_cfg("arc(0,1/4)", 2)).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    let w = &r.rows[0];
    assert_eq!(w.label, "witness");
    assert!(w.n <= 200 && w.value.re > 1e-3);
    assert_eq!(w.n.count_ones() % 2, 0);

    // k = 0: mu(A) = 1/4 at the least positive element of R, which is 3.
    let r = run_experiment(&wm_cfg("arc(0,1/4)", 0)).unwrap();
    assert_eq!((r.rows[0].n, r.rows[0].value.re), (3, 0.25));

    // Full circle: every n is a witness of measure 1.
    let r = run_experiment(&wm_cfg("arc(0,1)", 3)).unwrap();
    assert_eq!((r.rows[0].n, r.rows[0].value.re), (3, 1.0));
    for row in &r.rows[1..] {
        assert!(row.bound < 1e-12);
    }
}

#[test]
fn weighted_multirec_hypotheses() {
    let mut c = wm_cfg("arc(0,1/4)", 2);
    c.x = Some("rotation(1/4)".into());
    let r = run_experiment(&c).unwrap();
    assert_eq!(
        (r.verdict, r.flags.clone()),
        (Verdict::Inconclusive, vec![Flag::Refused])
    );

    // Digit levels 0, 2, 2 modulo 4 never sum to an odd level.
    let mut c = wm_cfg("arc(0,1/4)", 2);
    c.weight = Some("level(qmult(3,4;0,2,2),1)".into());
    let r = run_experiment(&c).unwrap();
    assert_eq!(
        (r.verdict, r.flags.clone()),
        (Verdict::Inconclusive, vec![Flag::NotApplicable])
    );

    let mut c = wm_cfg("arc(0,1/4)", 2);
    c.weight = Some("thue-morse".into());
    assert!(matches!(run_experiment(&c), Err(RunError::Config(e)) if e.path == "weight"));
    let mut c = wm_cfg("char(1)", 2);
    c.arc = Some("char(1)".into());
    assert!(matches!(run_experiment(&c), Err(RunError::Config(e)) if e.path == "arc"));
}

#[test]
fn spectrum_scan_verdicts() {
    let mut c = cfg(ExperimentKind::SpectrumScan);
    c.x = Some("rotation(GOLDEN)".into());
    c.candidate_bound = Some(3);
    c.max_den = Some(12);
    c.schedule = Some(Schedule {
        start: 1024,
        doublings: 0,
    });
    let r = run_experiment(&c).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    let labels: Vec<&str> = r.rows.iter().map(|r| r.label.as_str()).collect();
    assert!(labels.contains(&"GOLDEN"));

    // Membership in the q-adic containment is not decidable.
    c.x = Some("finite(4;1)".into());
    let labels: Vec<String> = run_experiment(&c)
        .unwrap()
        .rows
        .into_iter()
        .map(|r| r.label)
        .collect();
    assert_eq!(labels, vec!["1/4", "3/4"]);
    c.x = Some("product(thue-morse,finite(2;1))".into());
    let r = run_experiment(&c).unwrap();
    assert_eq!(r.verdict, Verdict::Inconclusive);
}

#[test]
fn seeded_runs_are_reproducible() {
    let mut c = ww_cfg(
        "skew(SQRT2)",
        "rotation(SQRT3)",
        "char(0,1)",
        "char(1)",
        256,
        2,
    );
    c.seed = 42;
    let a = to_csv(&run_experiment(&c).unwrap());
    assert_eq!(a, to_csv(&run_experiment(&c).unwrap()));
    c.seed = 43;
    assert_ne!(a, to_csv(&run_experiment(&c).unwrap()));
}

//! The six experiment kinds. Each one reads its keys from an
//! [`ExperimentConfig`] and returns a report; nothing here touches the
//! file system.

use ergodic_core::arcs::multiple_recurrence_measure;
use ergodic_core::averaging::{
    cesaro_limit, ergodic_average, mean_and_std_error, product_average_samples, sample_point,
    WeightSequence,
};
use ergodic_core::folner::FolnerSequence;
use ergodic_core::joinings::sweep;
use ergodic_core::numeric::circle_dist;
use ergodic_core::spectrum::{
    default_scan_observables, eigenvalue_scan, known_spectrum, kronecker_disjoint, scan_candidates,
    DetectedEigenvalue, DETECTION_THRESHOLD,
};
use ergodic_core::{product, Complex64, Error, Frequency, Observable, Point, SystemDescriptor};
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ConfigError, ExperimentConfig, ExperimentKind};
use crate::report::{format_f64, ExperimentReport, Flag, Row, Verdict};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error(transparent)]
    Emit(#[from] crate::report::EmitError),
}

pub const DEFAULT_STARTS: u32 = 5;
pub const DEFAULT_SAMPLES: u32 = 32;
pub const DEFAULT_K: u32 = 2;
pub const DEFAULT_SCAN_MAX: u64 = 200;
pub const DEFAULT_WITNESS_THRESHOLD: f64 = 1e-3;
pub const DEFAULT_MAX_ORDER: u64 = 12;
pub const DEFAULT_CANDIDATE_BOUND: i64 = 8;
pub const DEFAULT_MAX_DEN: i64 = 64;
pub const DEFAULT_SCAN_N: u64 = 4096;
/// Smallest discrepancy accepted as a counterexample.
pub const COUNTEREXAMPLE_GAP: f64 = 0.5;

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::Ww => ww(cfg),
        ExperimentKind::ProductOrthogonality => product_orthogonality(cfg),
        ExperimentKind::WeightedMultirec => weighted_multirec(cfg),
        ExperimentKind::JoiningsSweep => joinings_sweep(cfg),
        ExperimentKind::SpectrumScan => spectrum_scan(cfg),
        ExperimentKind::TemperedCheck => tempered_check(cfg),
    }
}

/// `Ok(None)` when the spectra do not decide the question.
fn spectra_disjoint(x: &SystemDescriptor, y: &SystemDescriptor) -> Result<Option<bool>, Error> {
    match kronecker_disjoint(&known_spectrum(x)?, &known_spectrum(y)?) {
        Ok(d) => Ok(Some(d)),
        Err(Error::Undecidable(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Rotations, skew products, nilsystems and their products.
fn distal(sys: &SystemDescriptor) -> bool {
    match sys {
        SystemDescriptor::QMultShift(_) => false,
        SystemDescriptor::Product(l, r) => distal(l) && distal(r),
        _ => true,
    }
}

fn single(cfg: &ExperimentConfig, key: &'static str) -> Result<Observable, ConfigError> {
    let mut list = cfg.observables(key)?;
    if list.len() != 1 {
        return Err(ConfigError::new(key, "expects exactly one observable"));
    }
    Ok(list.remove(0))
}

fn fmt_point(p: &Point) -> String {
    let c: Vec<String> = match p {
        Point::FiniteElem(v) => v.iter().map(u64::to_string).collect(),
        Point::Torus(v) => v.iter().map(|x| format_f64(*x)).collect(),
        Point::Skew { base, fiber } => vec![format_f64(*base), format_f64(*fiber)],
        Point::Heisenberg { x, y, z } => vec![format_f64(*x), format_f64(*y), format_f64(*z)],
        Point::Symbolic(i) => vec![i.to_string()],
        Point::Product(l, r) => vec![fmt_point(l), fmt_point(r)],
    };
    format!("({})", c.join(", "))
}

fn fmt_complex(z: Complex64) -> String {
    format!("({}, {})", format_f64(z.re), format_f64(z.im))
}

/// Pair averages `(1/|Phi_N|) sum f(T^g x) phi(S^g y)` along a doubling
/// schedule for seeded start pairs, against the product of the two separate
/// averages. Needs `x` distal and Kronecker disjoint from `y`.
pub fn ww(cfg: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let x = cfg.system("x")?;
    let y = cfg.system("y")?;
    let f = single(cfg, "f")?;
    let phi = single(cfg, "phi")?;
    let folner = cfg.folner()?;
    let schedule = cfg.schedule()?;
    let starts = cfg.starts.unwrap_or(DEFAULT_STARTS);
    if starts == 0 {
        return Err(ConfigError::new("starts", "must be positive").into());
    }
    let report = ExperimentReport::new(cfg);
    if !distal(&x) {
        return Ok(report.refuse(Verdict::Inconclusive, "x is not distal by construction"));
    }
    match spectra_disjoint(&x, &y)? {
        Some(true) => {}
        Some(false) => {
            return Ok(report.refuse(
                Verdict::Inconclusive,
                "x and y share a nontrivial eigenvalue",
            ));
        }
        None => {
            return Ok(report.refuse(
                Verdict::Inconclusive,
                "Kronecker disjointness is undecidable for these systems",
            ));
        }
    }
    let mut report = report;
    let joint = product(x.clone(), y.clone());
    let pair = Observable::tensor(f.clone(), phi.clone());
    let left = Observable::tensor(f, Observable::constant());
    let right = Observable::tensor(Observable::constant(), phi);
    let one = WeightSequence::one();
    let avg = |obs: &Observable, p: &Point, n| ergodic_average(&joint, obs, p, &one, &folner, n);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut verdicts = Vec::with_capacity(starts as usize);
    for s in 0..starts {
        let px = sample_point(&x, &mut rng);
        let py = sample_point(&y, &mut rng);
        report.note(format!(
            "start{s}: x = {}, y = {}",
            fmt_point(&px),
            fmt_point(&py)
        ));
        let p = Point::product(px, py);
        let conv = cesaro_limit(
            |n| avg(&pair, &p, n),
            schedule.start,
            schedule.doublings,
            cfg.tolerance,
        )?;
        let mut gaps = Vec::with_capacity(conv.values_at.len());
        for &(n, v) in &conv.values_at {
            let target = avg(&left, &p, n)? * avg(&right, &p, n)?;
            gaps.push((v - target).norm());
        }
        let verdict = match conv.extrapolated_limit {
            None => Verdict::Inconclusive,
            Some(_) if gaps.last().is_some_and(|g| *g < cfg.tolerance) => Verdict::Pass,
            Some(_) => Verdict::Fail,
        };
        for (&(n, v), gap) in conv.values_at.iter().zip(gaps) {
            report
                .rows
                .push(Row::new(format!("start{s}"), n, v, gap, verdict));
        }
        verdicts.push(verdict);
    }
    report.verdict = verdicts.iter().fold(Verdict::Pass, |a, &b| a.and(b));
    if verdicts.contains(&Verdict::Pass) && report.verdict != Verdict::Pass {
        report.flag(Flag::StartSensitive);
    }
    Ok(report)
}

/// Multiple averages on `X x Y` against the product of the separate ones,
/// compared in `L^2` over random start pairs. When the spectra intersect the
/// run is a declared counterexample and a large discrepancy is expected.
pub fn product_orthogonality(cfg: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let x = cfg.system("x")?;
    let y = cfg.system("y")?;
    let fs = cfg.observables("f")?;
    let gs = cfg.observables("phi")?;
    if fs.is_empty() {
        return Err(ConfigError::new("f", "required").into());
    }
    if gs.is_empty() {
        return Err(ConfigError::new("phi", "required").into());
    }
    let schedule = cfg.schedule()?;
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    if samples < 2 {
        return Err(ConfigError::new("samples", "needs at least 2 for a standard error").into());
    }
    let mut report = ExperimentReport::new(cfg);
    let counterexample = match spectra_disjoint(&x, &y)? {
        Some(d) => !d,
        None => {
            return Ok(report.refuse(
                Verdict::Inconclusive,
                "Kronecker disjointness is undecidable for these systems",
            ));
        }
    };
    if counterexample {
        report.flag(Flag::Counterexample);
        report.note(format!(
            "not Kronecker disjoint: expecting a discrepancy of at least {COUNTEREXAMPLE_GAP}"
        ));
    }
    for n in schedule.values() {
        let draws = product_average_samples(&x, &y, &fs, &gs, samples as usize, n, cfg.seed)?;
        let joint: Vec<Complex64> = draws.iter().map(|d| d.joint).collect();
        let (lhs, lhs_err) = mean_and_std_error(&joint);
        let diffs: Vec<Complex64> = draws
            .iter()
            .map(|d| Complex64::new((d.joint - d.left * d.right).norm(), 0.0))
            .collect();
        let rms = (diffs.iter().map(|d| d.re * d.re).sum::<f64>() / diffs.len() as f64).sqrt();
        let (_, err) = mean_and_std_error(&diffs);
        let ok = if counterexample {
            rms >= COUNTEREXAMPLE_GAP
        } else {
            rms <= 3.0 * err + cfg.tolerance
        };
        let (left, _) = mean_and_std_error(&draws.iter().map(|d| d.left).collect::<Vec<_>>());
        let (right, _) = mean_and_std_error(&draws.iter().map(|d| d.right).collect::<Vec<_>>());
        report.note(format!(
            "N = {n}: lhs std error {}, left mean {}, right mean {}, discrepancy std error {}",
            format_f64(lhs_err),
            fmt_complex(left),
            fmt_complex(right),
            format_f64(err),
        ));
        let verdict = if ok { Verdict::Pass } else { Verdict::Fail };
        report.verdict = report.verdict.and(verdict);
        report.rows.push(Row::new("", n, lhs, rms, verdict));
    }
    Ok(report)
}

/// Multiple recurrence along a level set `R` of a q-multiplicative weight:
/// a witness `n in R` for `mu(A ∩ T^{-n} A ∩ ... ∩ T^{-kn} A) > 0`, and the
/// gap between the `R`-weighted average of these measures and density times
/// the plain average.
pub fn weighted_multirec(cfg: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let x = cfg.system("x")?;
    let alpha = match &x {
        SystemDescriptor::TorusRotation { alphas } if alphas.len() == 1 => alphas[0].clone(),
        _ => return Err(ConfigError::new("x", "must be a rotation of the circle").into()),
    };
    let (w, target) = match cfg.weight()? {
        Some(WeightSequence::LevelSetIndicator { w, target }) => (w, target),
        _ => {
            return Err(
                ConfigError::new("weight", "must be a level set `level(qfunction,target)`").into(),
            )
        }
    };
    let (start, length) = match cfg.arc.as_deref().map(str::parse::<Observable>) {
        Some(Ok(Observable::ArcIndicator { start, length })) => (start, length),
        Some(Err(e)) => return Err(ConfigError::new("arc", e.to_string()).into()),
        _ => return Err(ConfigError::new("arc", "required, as `arc(start,length)`").into()),
    };
    let k = cfg.k.unwrap_or(DEFAULT_K);
    let scan_max = cfg.scan_max.unwrap_or(DEFAULT_SCAN_MAX);
    let threshold = cfg.witness_threshold.unwrap_or(DEFAULT_WITNESS_THRESHOLD);
    let schedule = cfg.schedule()?;

    let report = ExperimentReport::new(cfg);
    match spectra_disjoint(&x, &SystemDescriptor::QMultShift(w.clone()))? {
        Some(true) => {}
        Some(false) | None => {
            return Ok(report.refuse(
                Verdict::Inconclusive,
                format!("cannot show that the spectrum of x avoids the roots of unity of order a power of {}", w.q()),
            ));
        }
    }
    let mut report = report;
    let density = w.level_set_density(target, schedule.last())?;
    if density == Ratio::new(0, 1) {
        report.flag(Flag::NotApplicable);
        report.verdict = Verdict::Inconclusive;
        report.note("the level set has density 0");
        return Ok(report);
    }
    let measure = |n| multiple_recurrence_measure(&alpha, start, length, k, n);

    let mut witness = None;
    for n in (1..=scan_max).filter(|&n| w.level_indicator(target, n)) {
        let m = measure(n)?;
        if m.inconclusive {
            report.flag(Flag::Inconclusive);
        }
        if m.value > threshold {
            witness = Some((n, m.value));
            break;
        }
    }
    match witness {
        Some((n, m)) => report
            .rows
            .push(Row::new("witness", n, m, threshold, Verdict::Pass)),
        None => {
            report.verdict = Verdict::Fail;
            report
                .rows
                .push(Row::new("witness", scan_max, 0.0, threshold, Verdict::Fail));
        }
    }

    let mut weighted = 0.0;
    let mut plain = 0.0;
    let mut hits = 0u64;
    let mut n_done = 0;
    for n_target in schedule.values() {
        while n_done < n_target {
            let m = measure(n_done)?.value;
            plain += m;
            if w.level_indicator(target, n_done) {
                weighted += m;
                hits += 1;
            }
            n_done += 1;
        }
        let nf = n_target as f64;
        let lhs = weighted / nf;
        let residual = (lhs - hits as f64 / nf * (plain / nf)).abs();
        let verdict = if residual < cfg.tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        report
            .rows
            .push(Row::new("identity", n_target, lhs, residual, verdict));
    }
    if let Some(last) = report.rows.last() {
        report.verdict = report.verdict.and(last.verdict);
    }
    report.note(format!(
        "level set density below N = {}: {density}",
        schedule.last()
    ));
    Ok(report)
}

/// All predicates for every ordered pair of cyclic rotations up to
/// `max_order`.
pub fn joinings_sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let max_order = cfg.max_order.unwrap_or(DEFAULT_MAX_ORDER);
    let all = cfg.all_generators.unwrap_or(false);
    let reports = sweep(max_order, all).map_err(|e| match e {
        Error::OrderTooLarge(_) => RunError::Config(ConfigError::new("max_order", e.to_string())),
        e => e.into(),
    })?;
    let mut report = ExperimentReport::new(cfg);
    let mut failures = 0;
    for r in &reports {
        let name = |orders: &[u64], step: &[u64]| {
            if all {
                format!("Z{}+{}", orders[0], step[0])
            } else {
                format!("Z{}", orders[0])
            }
        };
        let label = format!(
            "{}x{}",
            name(&r.x_orders, &r.x_step),
            name(&r.y_orders, &r.y_step)
        );
        let n = r.x_orders.iter().chain(&r.y_orders).product();
        let verdict = if r.consistent() {
            Verdict::Pass
        } else {
            failures += 1;
            Verdict::Fail
        };
        report.verdict = report.verdict.and(verdict);
        report.rows.push(Row::new(
            label,
            n,
            r.ergodic_joining_count as f64,
            0.0,
            verdict,
        ));
    }
    report.note(format!("{} pairs, {failures} inconsistent", reports.len()));
    Ok(report)
}

/// Frequencies that parametrise the system.
fn system_frequencies(sys: &SystemDescriptor) -> Vec<Frequency> {
    match sys {
        SystemDescriptor::TorusRotation { alphas } => alphas.clone(),
        SystemDescriptor::SkewProduct { alpha } => vec![alpha.clone()],
        SystemDescriptor::Heisenberg { a, b } => vec![a.clone(), b.clone()],
        SystemDescriptor::Product(l, r) => {
            let mut v = system_frequencies(l);
            v.extend(system_frequencies(r));
            v
        }
        SystemDescriptor::FiniteRotation { .. } | SystemDescriptor::QMultShift(_) => Vec::new(),
    }
}

/// Point masses of spectral measures at lattice and rational candidates,
/// each large one checked against the constructive spectrum.
pub fn spectrum_scan(cfg: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let x = cfg.system("x")?;
    let mut observables = cfg.observables("observables")?;
    if observables.is_empty() {
        observables = default_scan_observables(&x);
    }
    let bound = cfg.candidate_bound.unwrap_or(DEFAULT_CANDIDATE_BOUND);
    let max_den = cfg.max_den.unwrap_or(DEFAULT_MAX_DEN);
    if bound < 0 {
        return Err(ConfigError::new("candidate_bound", "must be non-negative").into());
    }
    if max_den < 1 {
        return Err(ConfigError::new("max_den", "must be positive").into());
    }
    let n = cfg.schedule.map(|s| s.last()).unwrap_or(DEFAULT_SCAN_N);
    let candidates = scan_candidates(&system_frequencies(&x), bound, max_den);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let start = sample_point(&x, &mut rng);
    let found = eigenvalue_scan(&x, &start, &observables, &candidates, n)?;

    let mut report = ExperimentReport::new(cfg);
    report.note(format!("start {}", fmt_point(&start)));
    report.note(format!("known spectrum {:?}", known_spectrum(&x)?));
    report.note(format!(
        "{} candidates, {} detected",
        candidates.len(),
        found.len()
    ));
    // Below 1/N two frequencies are not resolved, so a detection next to a
    // stronger confirmed one is its shadow rather than a new eigenvalue.
    let resolution = 1.0 / n as f64;
    let aliased = |d: &DetectedEigenvalue| {
        d.in_known_spectrum == Some(false)
            && found.iter().any(|e| {
                e.in_known_spectrum == Some(true)
                    && e.mass >= d.mass
                    && circle_dist(e.freq.value(), d.freq.value()).abs() < resolution
            })
    };
    for d in &found {
        if aliased(d) {
            report.note(format!(
                "{} aliased to a confirmed eigenvalue within 1/N",
                d.freq
            ));
            continue;
        }
        let verdict = match d.in_known_spectrum {
            Some(true) => Verdict::Pass,
            Some(false) => Verdict::Fail,
            None => Verdict::Inconclusive,
        };
        report.verdict = report.verdict.and(verdict);
        report.rows.push(Row::new(
            d.freq.to_string(),
            n,
            d.mass,
            DETECTION_THRESHOLD,
            verdict,
        ));
    }
    Ok(report)
}

/// The tempered constant `max_N |Phi_{<N}^{-1} Phi_N| / |Phi_N|` up to `max_n`
/// against a cap: 2 for intervals, `2^d` for boxes, configured otherwise.
pub fn tempered_check(cfg: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let folner = cfg.folner()?;
    let max_n = cfg
        .max_n
        .ok_or_else(|| ConfigError::new("max_n", "required"))?;
    let cap = match (&cfg.cap, &folner) {
        (Some(s), _) => s.trim().parse::<Ratio<u64>>().map_err(|_| {
            ConfigError::new("cap", format!("expected a rational `p/q`, found `{s}`"))
        })?,
        (None, FolnerSequence::Intervals) => Ratio::from_integer(2),
        (None, FolnerSequence::Boxes(d)) => {
            Ratio::from_integer(1u64.checked_shl(*d as u32).unwrap_or(u64::MAX))
        }
        (None, FolnerSequence::Custom(_)) => {
            return Err(ConfigError::new("cap", "required for explicit windows").into())
        }
    };
    let bound = folner
        .tempered_bound(max_n)
        .map_err(|e| ConfigError::new("max_n", e.to_string()))?;
    let verdict = if bound <= cap {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let mut report = ExperimentReport::new(cfg);
    report.verdict = verdict;
    report.note(format!("bound {bound} against cap {cap}"));
    let as_f64 = |r: Ratio<u64>| *r.numer() as f64 / *r.denom() as f64;
    report
        .rows
        .push(Row::new("", max_n, as_f64(bound), as_f64(cap), verdict));
    Ok(report)
}

use std::f64::consts::TAU;

use ergodic_core::averaging::{
    cesaro_limit, ergodic_average, l2_product_average, multiple_average, product_average_samples,
    WeightSequence,
};
use ergodic_core::folner::FolnerSequence;
use ergodic_core::qmult::QMultFunction;
use ergodic_core::{Complex64, Frequency, Observable, Point, SystemDescriptor};
use num_rational::Rational64;
use proptest::prelude::*;

fn ex(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (t - t.floor()))
}

/// `(1/N) sum_{n=1}^N e(x + n a)` from the geometric series formula.
fn geometric(x: f64, a: f64, n: u64) -> Complex64 {
    let ea = ex(a);
    ex(x) * ea * (ex(n as f64 * a) - 1.0) / (ea - 1.0) / n as f64
}

fn one() -> WeightSequence {
    WeightSequence::one()
}

#[test]
fn constant_observable_averages_to_one() {
    let sys = SystemDescriptor::heisenberg(Frequency::sqrt2(), Frequency::sqrt3());
    let v = ergodic_average(
        &sys,
        &Observable::constant(),
        &sys.origin(),
        &one(),
        &FolnerSequence::Intervals,
        777,
    )
    .unwrap();
    assert_eq!(v, Complex64::new(1.0, 0.0));
}

#[test]
fn rotation_average_matches_geometric_series() {
    for alpha in [
        Frequency::sqrt2(),
        Frequency::golden(),
        &Frequency::sqrt3() + &Frequency::rational(1, 7),
    ] {
        let sys = SystemDescriptor::rotation(alpha.clone());
        for n in [1u64, 2, 10, 999, 65_536, 200_000] {
            let v = ergodic_average(
                &sys,
                &Observable::character(&[1]),
                &sys.origin(),
                &one(),
                &FolnerSequence::Intervals,
                n,
            )
            .unwrap();
            assert!(
                (v - geometric(0.0, alpha.value(), n)).norm() < 1e-9,
                "{alpha} N={n}"
            );
        }
    }
}

#[test]
fn finite_cycle_cancels() {
    let sys = SystemDescriptor::finite_rotation(vec![4], vec![1]).unwrap();
    let v = ergodic_average(
        &sys,
        &Observable::character(&[1]),
        &sys.origin(),
        &one(),
        &FolnerSequence::Intervals,
        4,
    )
    .unwrap();
    assert!(v.norm() <= 1e-15);
}

#[test]
fn multiple_average_matches_explicit_sum() {
    let a = Frequency::sqrt2();
    let sys = SystemDescriptor::rotation(a.clone());
    let x = 0.37;
    let fs = [Observable::character(&[1]), Observable::character(&[1])];
    for n in [1u64, 5, 1000, 20_000] {
        let v = multiple_average(&sys, &fs, &Point::Torus(vec![x]), &one(), n).unwrap();
        // f(T^n x) f(T^{2n} x) = e(2x + 3 n a).
        assert!(
            (v - geometric(2.0 * x, 3.0 * a.value(), n)).norm() < 1e-9,
            "N={n}"
        );
    }
    // With one observable this is the interval average.
    let single = multiple_average(&sys, &fs[..1], &Point::Torus(vec![x]), &one(), 333).unwrap();
    let plain = ergodic_average(
        &sys,
        &fs[0],
        &Point::Torus(vec![x]),
        &one(),
        &FolnerSequence::Intervals,
        333,
    )
    .unwrap();
    assert_eq!(single, plain);
}

#[test]
fn thue_morse_weighted_average_decays() {
    let sys = SystemDescriptor::rotation(Frequency::sqrt2());
    let w = WeightSequence::QMult(QMultFunction::thue_morse());
    let f = [Observable::character(&[1])];
    let r = cesaro_limit(
        |n| multiple_average(&sys, &f, &sys.origin(), &w, n),
        1 << 10,
        6,
        1e-3,
    )
    .unwrap();
    let (first, last) = (r.values_at[0].1.norm(), r.last().unwrap().1.norm());
    let gaps = r.gaps();
    assert!(last < 0.05);
    assert!(r.extrapolated_limit.is_some(), "gap {}", r.cauchy_gap);
    assert!(gaps[gaps.len() - 1] < gaps[0], "{gaps:?}");
    assert!(last < first);
}

#[test]
fn box_averages_factor_over_coordinates() {
    let (a, b) = (Frequency::sqrt2(), Frequency::golden());
    let sys = SystemDescriptor::torus(vec![a.clone(), b.clone()]);
    let f = Observable::character(&[1, 1]);
    for n in [1u64, 3, 40] {
        let v = ergodic_average(
            &sys,
            &f,
            &sys.origin(),
            &one(),
            &FolnerSequence::Boxes(2),
            n,
        )
        .unwrap();
        let want = geometric(0.0, a.value(), n) * geometric(0.0, b.value(), n);
        assert!((v - want).norm() < 1e-12);
    }
}

#[test]
fn custom_windows_use_negative_times() {
    let sys = SystemDescriptor::skew(Frequency::sqrt3());
    let f = Observable::character(&[1, 1]);
    let x = Point::Skew {
        base: 0.1,
        fiber: 0.6,
    };
    let set = vec![-7, -2, 0, 3, 11];
    let fs = FolnerSequence::custom(vec![set.clone()]).unwrap();
    let got = ergodic_average(&sys, &f, &x, &one(), &fs, 1).unwrap();
    let mut want = Complex64::new(0.0, 0.0);
    for g in set {
        want += sys
            .evaluate(&f, &sys.iterate_signed(&x, g).unwrap())
            .unwrap();
    }
    want /= 5.0;
    assert!((got - want).norm() < 1e-12);
}

#[test]
fn rational_rotation_averages_equal_period_mean() {
    // Over whole periods, sum_n e(k n / D) is D when D | k and 0 otherwise.
    for (p, d) in [(1i64, 3i64), (2, 5), (3, 8), (5, 12)] {
        let sys = SystemDescriptor::rotation(Frequency::rational(p, d));
        for m in -6i64..=6 {
            for (bp, bd) in [(0i64, 1i64), (1, d), (1, 2 * d)] {
                let w = WeightSequence::Character(Frequency::rational(bp, bd));
                let den = d * bd / num_integer::gcd(d, bd);
                let k = m * p * (den / d) + bp * (den / bd);
                let exact = if k % den == 0 { 1.0 } else { 0.0 };
                for periods in [1u64, 4] {
                    let n = den as u64 * periods;
                    let v = ergodic_average(
                        &sys,
                        &Observable::character(&[m]),
                        &sys.origin(),
                        &w,
                        &FolnerSequence::Intervals,
                        n,
                    )
                    .unwrap();
                    assert!(
                        (v - Complex64::new(exact, 0.0)).norm() < 1e-12,
                        "{p}/{d} m={m} beta={bp}/{bd}"
                    );
                }
            }
        }
    }
}

#[test]
fn level_set_indicators_add_up() {
    let tm = QMultFunction::thue_morse();
    let sys = SystemDescriptor::rotation(Frequency::golden());
    let f = Observable::character(&[1]);
    let x = Point::Torus(vec![0.2]);
    let avg = |w: &WeightSequence| {
        ergodic_average(&sys, &f, &x, w, &FolnerSequence::Intervals, 100_000).unwrap()
    };
    let plus = avg(&WeightSequence::LevelSetIndicator {
        w: tm.clone(),
        target: 0,
    });
    let minus = avg(&WeightSequence::LevelSetIndicator {
        w: tm.clone(),
        target: 1,
    });
    assert!((plus + minus - avg(&one())).norm() < 1e-12);
    assert!((plus - minus - avg(&WeightSequence::QMult(tm))).norm() < 1e-12);
}

#[test]
fn arc_observables_add_up() {
    let r = |a, b| Rational64::new(a, b);
    let sys = SystemDescriptor::rotation(Frequency::sqrt2());
    let avg = |o: Observable| {
        ergodic_average(
            &sys,
            &o,
            &sys.origin(),
            &one(),
            &FolnerSequence::Intervals,
            1_000_000,
        )
        .unwrap()
    };
    let left = avg(Observable::arc(r(0, 1), r(1, 4)).unwrap());
    let right = avg(Observable::arc(r(1, 4), r(1, 4)).unwrap());
    let whole = avg(Observable::arc(r(0, 1), r(1, 2)).unwrap());
    assert!((left + right - whole).norm() < 1e-12);
}

#[test]
fn l2_average_of_constants_is_exact() {
    let x = SystemDescriptor::rotation(Frequency::sqrt2());
    let y = SystemDescriptor::skew(Frequency::sqrt3());
    let (m, se) = l2_product_average(
        &x,
        &y,
        &[Observable::constant()],
        &[Observable::constant()],
        8,
        100,
        1,
    )
    .unwrap();
    assert_eq!((m, se), (Complex64::new(1.0, 0.0), 0.0));
}

#[test]
fn l2_average_of_disjoint_rotations_vanishes() {
    let x = SystemDescriptor::rotation(Frequency::sqrt2());
    let y = SystemDescriptor::rotation(Frequency::sqrt3());
    let f = [Observable::character(&[1])];
    let g = [Observable::character(&[1])];
    let (m, se) = l2_product_average(&x, &y, &f, &g, 32, 100_000, 7).unwrap();
    assert!(m.norm() <= 3.0 * se + 0.02, "{m} {se}");
}

#[test]
fn shared_eigenvalue_breaks_product_formula() {
    let x = SystemDescriptor::rotation(Frequency::rational(1, 4));
    let f = [Observable::character(&[1])];
    let g = [Observable::character(&[-1])];
    for s in product_average_samples(&x, &x, &f, &g, 16, 10_000, 3).unwrap() {
        assert!((s.joint.norm() - 1.0).abs() < 1e-12);
        assert!(s.left.norm() < 1e-12 && s.right.norm() < 1e-12);
    }
}

#[test]
fn l2_average_is_reproducible() {
    let x = SystemDescriptor::heisenberg(Frequency::sqrt2(), Frequency::golden());
    let y = SystemDescriptor::finite_rotation(vec![7], vec![3]).unwrap();
    let f = [Observable::character(&[1, 0])];
    let g = [Observable::character(&[2])];
    let a = l2_product_average(&x, &y, &f, &g, 5, 3000, 99).unwrap();
    let b = l2_product_average(&x, &y, &f, &g, 5, 3000, 99).unwrap();
    assert_eq!(a.0.re.to_bits(), b.0.re.to_bits());
    assert_eq!(a.0.im.to_bits(), b.0.im.to_bits());
    assert_eq!(a.1.to_bits(), b.1.to_bits());
}

#[test]
fn cesaro_of_constant() {
    let c = Complex64::new(0.25, -3.0);
    let r = cesaro_limit(|_| Ok(c), 8, 5, 1e-9).unwrap();
    assert_eq!(r.extrapolated_limit, Some(c));
    assert_eq!(r.cauchy_gap, 0.0);
    assert_eq!(r.values_at.len(), 6);
    assert!(r.values_at.windows(2).all(|w| w[0].0 < w[1].0));
}

#[test]
fn cesaro_of_golden_character() {
    let sys = SystemDescriptor::rotation(Frequency::golden());
    let f = Observable::character(&[1]);
    let r = cesaro_limit(
        |n| {
            ergodic_average(
                &sys,
                &f,
                &sys.origin(),
                &one(),
                &FolnerSequence::Intervals,
                n,
            )
        },
        1 << 10,
        4,
        1e-3,
    )
    .unwrap();
    let limit = r
        .extrapolated_limit
        .expect("Cauchy criterion fires by 2^14");
    assert!(limit.norm() < 1e-3);
    let bound = 2.0 / (ex(Frequency::golden().value()) - 1.0).norm();
    for (n, v) in &r.values_at {
        assert!(v.norm() <= bound / *n as f64 + 1e-12);
    }
}

#[test]
fn cesaro_of_thue_morse_is_exactly_zero_on_blocks() {
    let tm = QMultFunction::thue_morse();
    let r = cesaro_limit(
        |n| Ok((0..n).map(|i| tm.eval_complex(i)).sum::<Complex64>() / n as f64),
        2,
        10,
        1e-12,
    )
    .unwrap();
    assert!(r
        .values_at
        .iter()
        .all(|(_, v)| *v == Complex64::new(0.0, 0.0)));
    assert_eq!(r.extrapolated_limit, Some(Complex64::new(0.0, 0.0)));
}

fn weight() -> impl Strategy<Value = WeightSequence> {
    prop_oneof![
        (-2.0f64..2.0, -2.0f64..2.0)
            .prop_map(|(a, b)| WeightSequence::Constant(Complex64::new(a, b))),
        Just(WeightSequence::Character(Frequency::golden())),
        Just(WeightSequence::Character(Frequency::rational(1, 3))),
        Just(WeightSequence::QMult(QMultFunction::thue_morse())),
        Just(WeightSequence::LevelSetIndicator {
            w: QMultFunction::thue_morse(),
            target: 0
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn averages_scale_linearly_with_weights(w in weight(), c in -3.0f64..3.0, d in -3.0f64..3.0,
                                            x in 0.0f64..1.0, n in 1u64..20_000) {
        let sys = SystemDescriptor::rotation(Frequency::sqrt2());
        let f = Observable::character(&[1]);
        let p = Point::Torus(vec![x]);
        let z = Complex64::new(c, d);
        let scaled = WeightSequence::PointwiseProduct(vec![WeightSequence::Constant(z), w.clone()]);
        let a = ergodic_average(&sys, &f, &p, &scaled, &FolnerSequence::Intervals, n).unwrap();
        let b = ergodic_average(&sys, &f, &p, &w, &FolnerSequence::Intervals, n).unwrap();
        prop_assert!((a - z * b).norm() < 1e-12);
    }

    #[test]
    fn shift_coherence(w in weight(), x in 0.0f64..1.0, y in 0.0f64..1.0, n in 2u64..5000) {
        let sys = SystemDescriptor::skew(Frequency::sqrt2());
        let f = Observable::character(&[1, 2]);
        let p = Point::Skew { base: x, fiber: y };
        let a_n = ergodic_average(&sys, &f, &p, &w, &FolnerSequence::Intervals, n).unwrap();
        let a_m = ergodic_average(&sys, &f, &p, &w, &FolnerSequence::Intervals, n - 1).unwrap();
        let term = w.at(n as i64).unwrap() * sys.evaluate(&f, &sys.iterate(&p, n).unwrap()).unwrap();
        prop_assert!((a_n * n as f64 - a_m * (n - 1) as f64 - term).norm() < 1e-9);
    }

    #[test]
    fn averages_are_bounded(w in weight(), n in 1u64..3000) {
        let sys = SystemDescriptor::heisenberg(Frequency::sqrt3(), Frequency::golden());
        let v = ergodic_average(&sys, &Observable::character(&[1, 1]), &sys.origin(), &w, &FolnerSequence::Intervals, n)
            .unwrap();
        prop_assert!(v.norm() <= w.bound() + 1e-12);
    }
}

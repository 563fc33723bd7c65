//! Weighted, Wiener–Wintner and multiple ergodic averages.
//!
//! Every kernel evaluates orbit points with the closed-form iterate and sums
//! with [`ComplexSum`] in increasing index order (row-major over boxes), so
//! results are reproducible bit for bit.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::folner::FolnerSequence;
use crate::frequency::Frequency;
use crate::numeric;
use crate::qmult::QMultFunction;
use crate::summation::{CompensatedSum, ComplexSum};
use crate::systems::{Observable, Point, SystemDescriptor};

/// Bounded complex weights `a_n`, indexed by integers.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSequence {
    Constant(Complex64),
    /// `n -> e(n alpha)`.
    Character(Frequency),
    /// `n -> w(n)` for a strongly q-multiplicative `w` (defined for `n >= 0`).
    QMult(QMultFunction),
    /// Indicator of `{n : w(n) = e(target/m)}`, evaluated as the linear
    /// combination `(1/m) sum_j conj(z)^j w^j(n)`.
    LevelSetIndicator {
        w: QMultFunction,
        target: u32,
    },
    PointwiseProduct(Vec<WeightSequence>),
}

impl WeightSequence {
    pub fn one() -> Self {
        WeightSequence::Constant(Complex64::new(1.0, 0.0))
    }

    pub fn at(&self, n: i64) -> Result<Complex64> {
        Ok(match self {
            WeightSequence::Constant(c) => *c,
            WeightSequence::Character(alpha) => numeric::e(alpha.mul_frac_signed_unreduced(n)),
            WeightSequence::QMult(w) => w.eval_complex(nonnegative(n)?),
            WeightSequence::LevelSetIndicator { w, target } => {
                w.level_indicator_expansion(*target, nonnegative(n)?)
            }
            WeightSequence::PointwiseProduct(ws) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for w in ws {
                    acc *= w.at(n)?;
                }
                acc
            }
        })
    }

    /// `sup_n |a_n|`.
    pub fn bound(&self) -> f64 {
        match self {
            WeightSequence::Constant(c) => c.norm(),
            WeightSequence::Character(_)
            | WeightSequence::QMult(_)
            | WeightSequence::LevelSetIndicator { .. } => 1.0,
            WeightSequence::PointwiseProduct(ws) => ws.iter().map(|w| w.bound()).product(),
        }
    }
}

fn nonnegative(n: i64) -> Result<u64> {
    u64::try_from(n)
        .map_err(|_| Error::InvalidArgument("q-multiplicative weights are defined for n >= 0"))
}

/// Action of `g in Z^d` used with box windows: coordinatewise on a torus of
/// dimension `d`, and through `g -> g_1 + ... + g_d` on every other system.
fn act(sys: &SystemDescriptor, p: &Point, g: &[i64]) -> Result<Point> {
    match (sys, p) {
        (SystemDescriptor::TorusRotation { alphas }, Point::Torus(x))
            if g.len() > 1 && alphas.len() == g.len() =>
        {
            Ok(Point::Torus(
                x.iter()
                    .zip(alphas)
                    .zip(g)
                    .map(|((&xi, a), &gi)| numeric::frac(xi + a.mul_frac_signed_unreduced(gi)))
                    .collect(),
            ))
        }
        _ => sys.iterate_unchecked(p, g.iter().sum()),
    }
}

/// `(1/|Phi_N|) sum_{g in Phi_N} a_g f(T^g x)`.
pub fn ergodic_average(
    sys: &SystemDescriptor,
    obs: &Observable,
    start: &Point,
    w: &WeightSequence,
    folner: &FolnerSequence,
    n: u64,
) -> Result<Complex64> {
    sys.check_point(start)?;
    let size = folner.size(n)?;
    let mut acc = ComplexSum::new();
    if let FolnerSequence::Intervals = folner {
        for g in 1..=n as i64 {
            let p = sys.iterate_unchecked(start, g)?;
            acc.add(w.at(g)? * sys.evaluate_unchecked(obs, &p)?);
        }
    } else {
        for g in folner.elements(n)? {
            let p = act(sys, start, &g)?;
            acc.add(w.at(g.iter().sum())? * sys.evaluate_unchecked(obs, &p)?);
        }
    }
    Ok(acc.value() / size as f64)
}

/// `(1/N) sum_{n=1}^N a_n prod_i f_i(T^{i n} x)`.
pub fn multiple_average(
    sys: &SystemDescriptor,
    observables: &[Observable],
    start: &Point,
    w: &WeightSequence,
    n: u64,
) -> Result<Complex64> {
    if observables.is_empty() {
        return Err(Error::InvalidArgument(
            "multiple averages need at least one observable",
        ));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive"));
    }
    sys.check_point(start)?;
    let mut acc = ComplexSum::new();
    for k in 1..=n as i64 {
        acc.add(w.at(k)? * multiple_product(sys, observables, start, k)?);
    }
    Ok(acc.value() / n as f64)
}

fn multiple_product(
    sys: &SystemDescriptor,
    observables: &[Observable],
    start: &Point,
    k: i64,
) -> Result<Complex64> {
    let mut prod = Complex64::new(1.0, 0.0);
    for (i, f) in observables.iter().enumerate() {
        let p = sys.iterate_unchecked(start, (i as i64 + 1) * k)?;
        prod *= sys.evaluate_unchecked(f, &p)?;
    }
    Ok(prod)
}

/// `(1/N) sum_{n=1}^N prod_i f_i(T^{in} x) prod_j g_j(S^{jn} y)`.
pub fn product_multiple_average(
    sys_x: &SystemDescriptor,
    sys_y: &SystemDescriptor,
    fs: &[Observable],
    gs: &[Observable],
    x: &Point,
    y: &Point,
    n: u64,
) -> Result<Complex64> {
    if fs.is_empty() || gs.is_empty() {
        return Err(Error::InvalidArgument(
            "both observable lists must be non-empty",
        ));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive"));
    }
    sys_x.check_point(x)?;
    sys_y.check_point(y)?;
    let mut acc = ComplexSum::new();
    for k in 1..=n as i64 {
        acc.add(multiple_product(sys_x, fs, x, k)? * multiple_product(sys_y, gs, y, k)?);
    }
    Ok(acc.value() / n as f64)
}

/// Draws a point from the invariant measure: Haar measure on groups and
/// nilmanifolds (exactly uniform residues on finite groups). For symbolic
/// shifts the orbit index is uniform on `[0, q^12)`.
pub fn sample_point<R: Rng + ?Sized>(sys: &SystemDescriptor, rng: &mut R) -> Point {
    match sys {
        SystemDescriptor::FiniteRotation { orders, .. } => {
            Point::FiniteElem(orders.iter().map(|&o| rng.random_range(0..o)).collect())
        }
        SystemDescriptor::TorusRotation { alphas } => {
            Point::Torus(alphas.iter().map(|_| rng.random::<f64>()).collect())
        }
        SystemDescriptor::SkewProduct { .. } => Point::Skew {
            base: rng.random(),
            fiber: rng.random(),
        },
        SystemDescriptor::Heisenberg { .. } => Point::Heisenberg {
            x: rng.random(),
            y: rng.random(),
            z: rng.random(),
        },
        SystemDescriptor::QMultShift(w) => {
            Point::Symbolic(rng.random_range(0..(w.q() as u64).pow(12)))
        }
        SystemDescriptor::Product(l, r) => {
            Point::product(sample_point(l, rng), sample_point(r, rng))
        }
    }
}

/// One Monte-Carlo draw for the product-system average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductSample {
    /// Average of the tensor observable along the diagonal orbit.
    pub joint: Complex64,
    /// Multiple average on the first factor alone.
    pub left: Complex64,
    /// Multiple average on the second factor alone.
    pub right: Complex64,
}

/// Draws `samples` independent start pairs from `mu_X x mu_Y` with a ChaCha8
/// generator seeded by `seed` and evaluates the joint and separate averages.
pub fn product_average_samples(
    sys_x: &SystemDescriptor,
    sys_y: &SystemDescriptor,
    fs: &[Observable],
    gs: &[Observable],
    samples: usize,
    n: u64,
    seed: u64,
) -> Result<Vec<ProductSample>> {
    if samples == 0 {
        return Err(Error::InvalidArgument("sample_count must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let none = WeightSequence::one();
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = sample_point(sys_x, &mut rng);
        let y = sample_point(sys_y, &mut rng);
        out.push(ProductSample {
            joint: product_multiple_average(sys_x, sys_y, fs, gs, &x, &y, n)?,
            left: multiple_average(sys_x, fs, &x, &none, n)?,
            right: multiple_average(sys_y, gs, &y, &none, n)?,
        });
    }
    Ok(out)
}

/// Sample mean and its standard error for complex samples.
pub fn mean_and_std_error(values: &[Complex64]) -> (Complex64, f64) {
    let n = values.len();
    if n == 0 {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    let mut acc = ComplexSum::new();
    acc.extend(values.iter().copied());
    let mean = acc.value() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let mut var = CompensatedSum::new();
    for v in values {
        var.add((v - mean).norm_sqr());
    }
    let var = var.value() / (n as f64 - 1.0);
    (mean, libm::sqrt(var / n as f64))
}

/// Monte-Carlo estimate of the `L^2(mu_X x mu_Y)` limit object: the sample
/// mean over random start pairs of the pointwise product-system average,
/// with its standard error. Deterministic for a given seed.
pub fn l2_product_average(
    sys_x: &SystemDescriptor,
    sys_y: &SystemDescriptor,
    fs: &[Observable],
    gs: &[Observable],
    samples: usize,
    n: u64,
    seed: u64,
) -> Result<(Complex64, f64)> {
    let draws = product_average_samples(sys_x, sys_y, fs, gs, samples, n, seed)?;
    let joint: Vec<Complex64> = draws.iter().map(|s| s.joint).collect();
    Ok(mean_and_std_error(&joint))
}

/// Averages along the doubling schedule `N0, 2 N0, 4 N0, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub values_at: Vec<(u64, Complex64)>,
    /// The last value, when the Cauchy criterion fired.
    pub extrapolated_limit: Option<Complex64>,
    /// `max |A_{2N} - A_N|` over the last three doublings.
    pub cauchy_gap: f64,
}

impl ConvergenceReport {
    pub fn last(&self) -> Option<(u64, Complex64)> {
        self.values_at.last().copied()
    }

    /// Successive gaps `|A_{2N} - A_N|` along the whole schedule.
    pub fn gaps(&self) -> Vec<f64> {
        self.values_at
            .windows(2)
            .map(|w| (w[1].1 - w[0].1).norm())
            .collect()
    }
}

/// Number of trailing doublings inspected by [`cesaro_limit`].
pub const CAUCHY_WINDOW: usize = 3;

/// Evaluates `f` at `n0 * 2^j` for `j = 0..=doublings` and declares a limit
/// when every one of the last three gaps is below `tol`.
pub fn cesaro_limit<F>(mut f: F, n0: u64, doublings: u32, tol: f64) -> Result<ConvergenceReport>
where
    F: FnMut(u64) -> Result<Complex64>,
{
    if n0 == 0 {
        return Err(Error::InvalidArgument("N0 must be positive"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive"));
    }
    let mut values_at = Vec::with_capacity(doublings as usize + 1);
    for j in 0..=doublings {
        let n = n0
            .checked_mul(1u64 << j)
            .ok_or(Error::InvalidArgument("doubling schedule overflows"))?;
        values_at.push((n, f(n)?));
    }
    let gaps: Vec<f64> = values_at
        .windows(2)
        .map(|w| (w[1].1 - w[0].1).norm())
        .collect();
    let tail = &gaps[gaps.len().saturating_sub(CAUCHY_WINDOW)..];
    let cauchy_gap = tail.iter().copied().fold(0.0, f64::max);
    let extrapolated_limit = if !tail.is_empty() && cauchy_gap < tol {
        values_at.last().map(|(_, v)| *v)
    } else {
        None
    };
    Ok(ConvergenceReport {
        values_at,
        extrapolated_limit,
        cauchy_gap,
    })
}

//! Lengths of intersections of circle arcs, for multiple recurrence of
//! rotations.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::frequency::{ratio_to_f64, Frequency};
use crate::numeric;

/// Positive lengths below this are not trusted.
pub const GUARD_BAND: f64 = 1e-9;

/// A union of disjoint half-open intervals `[a, b)` inside `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcSet {
    intervals: Vec<(f64, f64)>,
}

impl ArcSet {
    pub fn full() -> Self {
        ArcSet {
            intervals: vec![(0.0, 1.0)],
        }
    }

    /// `[start, start + length)` modulo one; `length >= 1` is the circle.
    pub fn arc(start: f64, length: f64) -> Self {
        if length >= 1.0 {
            return ArcSet::full();
        }
        if length <= 0.0 {
            return ArcSet {
                intervals: Vec::new(),
            };
        }
        let s = numeric::frac(start);
        let e = s + length;
        if e <= 1.0 {
            ArcSet {
                intervals: vec![(s, e)],
            }
        } else {
            ArcSet {
                intervals: vec![(0.0, e - 1.0), (s, 1.0)],
            }
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn intersect(&self, other: &ArcSet) -> ArcSet {
        let mut out = Vec::new();
        for &(a, b) in &self.intervals {
            for &(c, d) in &other.intervals {
                let lo = a.max(c);
                let hi = b.min(d);
                if hi > lo {
                    out.push((lo, hi));
                }
            }
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        ArcSet { intervals: out }
    }

    pub fn length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }
}

/// A measure with the guard band applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuardedMeasure {
    /// The length, or 0 when the raw length fell inside the guard band.
    pub value: f64,
    pub raw: f64,
    /// The raw length was positive but below [`GUARD_BAND`].
    pub inconclusive: bool,
}

impl GuardedMeasure {
    fn new(raw: f64) -> Self {
        let inconclusive = raw > 0.0 && raw < GUARD_BAND;
        GuardedMeasure {
            value: if inconclusive { 0.0 } else { raw },
            raw,
            inconclusive,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.value > 0.0
    }
}

/// `mu(A ∩ T^{-n} A ∩ ... ∩ T^{-kn} A)` for the rotation by `alpha` and the
/// arc `A = [start, start + length)`. The set `T^{-jn} A` is the arc starting
/// at `start - j n alpha`; that offset is reduced modulo one from the
/// symbolic frequency.
pub fn multiple_recurrence_measure(
    alpha: &Frequency,
    start: Rational64,
    length: Rational64,
    k: u32,
    n: u64,
) -> Result<GuardedMeasure> {
    if length <= Rational64::from_integer(0) {
        return Err(Error::InvalidArgument("arc length must be positive"));
    }
    let s = ratio_to_f64(start);
    let len = ratio_to_f64(length);
    let mut set = ArcSet::arc(s, len);
    for j in 1..=k as u64 {
        let jn = j
            .checked_mul(n)
            .ok_or(Error::InvalidArgument("k * n overflows"))?;
        let shift = alpha.mul_frac(jn);
        set = set.intersect(&ArcSet::arc(s - shift, len));
    }
    Ok(GuardedMeasure::new(set.length()))
}

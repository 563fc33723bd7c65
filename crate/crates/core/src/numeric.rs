//! Floating point helpers for arithmetic on the circle `R/Z`.
//!
//! Orbit coordinates are reduced modulo one after every closed-form step.
//! Products such as `n * alpha` with `n` in the millions are formed with an
//! error-free transformation (`fma`) so that the fractional part keeps full
//! double precision instead of losing the digits consumed by the integer part.

use num_complex::Complex64;

/// Values within this distance below 1.0 are reduced to 0.0.
pub const SNAP: f64 = 1e-12;

/// `x - floor(x)` without snapping; the result lies in `[0, 1]`.
#[inline]
pub fn frac_raw(x: f64) -> f64 {
    x - libm::floor(x)
}

/// Reduces `x` into `[0, 1)`, snapping results within [`SNAP`] of 1.0 to 0.0.
#[inline]
pub fn frac(x: f64) -> f64 {
    let r = frac_raw(x);
    if r >= 1.0 - SNAP {
        0.0
    } else {
        r
    }
}

/// Error-free product: `a * b == p + e` exactly.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

/// Fractional part of `a * b`, accurate to a few ulps of 1 even when the
/// product is large. The result is not reduced, it lies in a small
/// neighbourhood of `[0, 1)`.
#[inline]
pub fn frac_mul_unreduced(a: f64, b: f64) -> f64 {
    let (p, e) = two_prod(a, b);
    frac_raw(p) + e
}

/// Fractional part of `a * b * c` where `a` is typically a large integer.
#[inline]
pub fn frac_mul3_unreduced(a: f64, b: f64, c: f64) -> f64 {
    let (h, l) = two_prod(b, c);
    let (p, e) = two_prod(a, h);
    frac_raw(p) + e + frac_raw(a * l)
}

/// Signed distance on the circle, in `[-1/2, 1/2]`.
#[inline]
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = a - b;
    d - libm::round(d)
}

/// `e(t) = exp(2 pi i t)`. Quarter turns are returned exactly.
pub fn e(t: f64) -> Complex64 {
    let r = t - libm::round(t);
    let quarter = r * 4.0;
    if quarter == libm::round(quarter) {
        return quarter_turn(quarter as i64);
    }
    let angle = core::f64::consts::TAU * r;
    Complex64::new(libm::cos(angle), libm::sin(angle))
}

/// `e(k / m)` computed from the reduced residue; exact on quarter turns.
pub fn root_of_unity(k: i64, m: u64) -> Complex64 {
    debug_assert!(m > 0);
    let m = m as i64;
    let k = k.rem_euclid(m);
    if (4 * k) % m == 0 {
        return quarter_turn(4 * k / m);
    }
    // Map to (-m/2, m/2] before dividing so the angle stays small.
    let centered = if 2 * k > m { k - m } else { k };
    let angle = core::f64::consts::TAU * (centered as f64) / (m as f64);
    Complex64::new(libm::cos(angle), libm::sin(angle))
}

fn quarter_turn(q: i64) -> Complex64 {
    match q.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

//! Concrete measure preserving systems, their points and observables.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::frequency::Frequency;
use crate::numeric::{
    self, frac, frac_mul3_unreduced, frac_mul_unreduced, frac_raw, two_prod, SNAP,
};
use crate::qmult::QMultFunction;

/// A state of one of the systems below. Real coordinates live in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    FiniteElem(Vec<u64>),
    Torus(Vec<f64>),
    Skew {
        base: f64,
        fiber: f64,
    },
    Heisenberg {
        x: f64,
        y: f64,
        z: f64,
    },
    /// Position `index` along the forward orbit of a q-multiplicative sequence.
    Symbolic(u64),
    Product(Box<Point>, Box<Point>),
}

impl Point {
    pub fn product(left: Point, right: Point) -> Point {
        Point::Product(Box::new(left), Box::new(right))
    }

    /// All coordinates as floats in `[0, 1)` (residues divided by their
    /// orders), left factor first. Used for distance comparisons.
    pub fn coordinates(&self, sys: &SystemDescriptor) -> Vec<f64> {
        let mut out = Vec::new();
        self.push_coordinates(sys, &mut out);
        out
    }

    fn push_coordinates(&self, sys: &SystemDescriptor, out: &mut Vec<f64>) {
        match (self, sys) {
            (Point::FiniteElem(r), SystemDescriptor::FiniteRotation { orders, .. }) => {
                out.extend(r.iter().zip(orders).map(|(&a, &o)| a as f64 / o as f64))
            }
            (Point::Torus(x), _) => out.extend_from_slice(x),
            (Point::Skew { base, fiber }, _) => out.extend_from_slice(&[*base, *fiber]),
            (Point::Heisenberg { x, y, z }, _) => out.extend_from_slice(&[*x, *y, *z]),
            (Point::Symbolic(i), _) => out.push(*i as f64),
            (Point::Product(l, r), SystemDescriptor::Product(sl, sr)) => {
                l.push_coordinates(sl, out);
                r.push_coordinates(sr, out);
            }
            _ => {}
        }
    }
}

/// Which family a system belongs to, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemDescriptor {
    /// Translation by `step` on `Z/orders[0] x Z/orders[1] x ...`.
    FiniteRotation {
        orders: Vec<u64>,
        step: Vec<u64>,
    },
    /// Translation by `alphas` on the torus of dimension `alphas.len()`.
    TorusRotation {
        alphas: Vec<Frequency>,
    },
    /// `(x, y) -> (x + alpha, y + x)` on the 2-torus.
    SkewProduct {
        alpha: Frequency,
    },
    /// Left translation by `(a, b, 0)` on the Heisenberg nilmanifold `G / G(Z)`.
    Heisenberg {
        a: Frequency,
        b: Frequency,
    },
    /// Shift along the orbit closure of a strongly q-multiplicative sequence.
    QMultShift(QMultFunction),
    Product(Box<SystemDescriptor>, Box<SystemDescriptor>),
}

impl SystemDescriptor {
    pub fn finite_rotation(orders: Vec<u64>, step: Vec<u64>) -> Result<Self> {
        if orders.is_empty() || orders.len() != step.len() {
            return Err(Error::InvalidArgument(
                "orders and step must have the same non-zero length",
            ));
        }
        if orders.contains(&0) {
            return Err(Error::InvalidArgument("group orders must be positive"));
        }
        let step = step.iter().zip(&orders).map(|(s, o)| s % o).collect();
        Ok(SystemDescriptor::FiniteRotation { orders, step })
    }

    /// Circle rotation by `alpha`.
    pub fn rotation(alpha: Frequency) -> Self {
        SystemDescriptor::TorusRotation {
            alphas: alloc::vec![alpha],
        }
    }

    pub fn torus(alphas: Vec<Frequency>) -> Self {
        SystemDescriptor::TorusRotation { alphas }
    }

    pub fn skew(alpha: Frequency) -> Self {
        SystemDescriptor::SkewProduct { alpha }
    }

    pub fn heisenberg(a: Frequency, b: Frequency) -> Self {
        SystemDescriptor::Heisenberg { a, b }
    }

    pub fn is_product(&self) -> bool {
        matches!(self, SystemDescriptor::Product(..))
    }

    /// The identity element (origin) of the state space.
    pub fn origin(&self) -> Point {
        match self {
            SystemDescriptor::FiniteRotation { orders, .. } => {
                Point::FiniteElem(alloc::vec![0; orders.len()])
            }
            SystemDescriptor::TorusRotation { alphas } => {
                Point::Torus(alloc::vec![0.0; alphas.len()])
            }
            SystemDescriptor::SkewProduct { .. } => Point::Skew {
                base: 0.0,
                fiber: 0.0,
            },
            SystemDescriptor::Heisenberg { .. } => Point::Heisenberg {
                x: 0.0,
                y: 0.0,
                z: 0.0,
            },
            SystemDescriptor::QMultShift(_) => Point::Symbolic(0),
            SystemDescriptor::Product(l, r) => Point::product(l.origin(), r.origin()),
        }
    }

    /// Checks that `p` is a state of this system.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        let unit = |v: f64| (0.0..1.0).contains(&v);
        match (self, p) {
            (SystemDescriptor::FiniteRotation { orders, .. }, Point::FiniteElem(r)) => {
                if r.len() != orders.len() {
                    return Err(Error::InvalidPoint("residue vector has the wrong length"));
                }
                if r.iter().zip(orders).any(|(a, o)| a >= o) {
                    return Err(Error::InvalidPoint("residue out of range"));
                }
                Ok(())
            }
            (SystemDescriptor::TorusRotation { alphas }, Point::Torus(x)) => {
                if x.len() != alphas.len() {
                    return Err(Error::InvalidPoint("torus point has the wrong dimension"));
                }
                if !x.iter().all(|&v| unit(v)) {
                    return Err(Error::InvalidPoint("coordinate outside [0, 1)"));
                }
                Ok(())
            }
            (SystemDescriptor::SkewProduct { .. }, Point::Skew { base, fiber }) => {
                if unit(*base) && unit(*fiber) {
                    Ok(())
                } else {
                    Err(Error::InvalidPoint("coordinate outside [0, 1)"))
                }
            }
            (SystemDescriptor::Heisenberg { .. }, Point::Heisenberg { x, y, z }) => {
                if unit(*x) && unit(*y) && unit(*z) {
                    Ok(())
                } else {
                    Err(Error::InvalidPoint("coordinate outside [0, 1)"))
                }
            }
            (SystemDescriptor::QMultShift(_), Point::Symbolic(_)) => Ok(()),
            (SystemDescriptor::Product(l, r), Point::Product(pl, pr)) => {
                l.check_point(pl)?;
                r.check_point(pr)
            }
            _ => Err(Error::InvalidPoint(
                "point variant does not match the system",
            )),
        }
    }

    /// One step of the transformation, computed directly from the defining
    /// map rather than from the closed forms used by [`Self::iterate`].
    pub fn apply(&self, p: &Point) -> Result<Point> {
        self.check_point(p)?;
        self.step(p)
    }

    fn step(&self, p: &Point) -> Result<Point> {
        Ok(match (self, p) {
            (SystemDescriptor::FiniteRotation { orders, step }, Point::FiniteElem(r)) => {
                Point::FiniteElem(
                    r.iter()
                        .zip(step)
                        .zip(orders)
                        .map(|((a, s), o)| (a + s) % o)
                        .collect(),
                )
            }
            (SystemDescriptor::TorusRotation { alphas }, Point::Torus(x)) => Point::Torus(
                x.iter()
                    .zip(alphas)
                    .map(|(&xi, a)| frac(xi + a.mul_frac_unreduced(1)))
                    .collect(),
            ),
            (SystemDescriptor::SkewProduct { alpha }, Point::Skew { base, fiber }) => Point::Skew {
                base: frac(base + alpha.mul_frac_unreduced(1)),
                fiber: frac(fiber + base),
            },
            (SystemDescriptor::Heisenberg { a, b }, Point::Heisenberg { x, y, z }) => {
                let lift = heisenberg_mul((a.value(), b.value(), 0.0), (*x, *y, *z));
                let x_new = frac(lift.0);
                let mut carry = libm::floor(lift.1);
                let mut y_new = lift.1 - carry;
                if y_new >= 1.0 - SNAP {
                    y_new = 0.0;
                    carry += 1.0;
                }
                Point::Heisenberg {
                    x: x_new,
                    y: y_new,
                    z: frac(lift.2 - x_new * carry),
                }
            }
            (SystemDescriptor::QMultShift(_), Point::Symbolic(i)) => Point::Symbolic(i + 1),
            (SystemDescriptor::Product(l, r), Point::Product(pl, pr)) => {
                Point::product(l.step(pl)?, r.step(pr)?)
            }
            _ => unreachable!("point checked against system"),
        })
    }

    /// `T^n p`, computed in closed form for every family.
    pub fn iterate(&self, p: &Point, n: u64) -> Result<Point> {
        let n =
            i64::try_from(n).map_err(|_| Error::InvalidArgument("iteration count too large"))?;
        self.iterate_signed(p, n)
    }

    /// `T^k p` for any integer `k`. Every family is invertible except the
    /// one-sided symbolic shift, which rejects moves before index 0.
    pub fn iterate_signed(&self, p: &Point, k: i64) -> Result<Point> {
        self.check_point(p)?;
        self.iterate_unchecked(p, k)
    }

    pub(crate) fn iterate_unchecked(&self, p: &Point, k: i64) -> Result<Point> {
        if k == 0 {
            return Ok(p.clone());
        }
        Ok(match (self, p) {
            (SystemDescriptor::FiniteRotation { orders, step }, Point::FiniteElem(r)) => {
                Point::FiniteElem(
                    r.iter()
                        .zip(step)
                        .zip(orders)
                        .map(|((&a, &s), &o)| {
                            let o = o as i128;
                            (a as i128 + (k as i128 % o) * s as i128).rem_euclid(o) as u64
                        })
                        .collect(),
                )
            }
            (SystemDescriptor::TorusRotation { alphas }, Point::Torus(x)) => Point::Torus(
                x.iter()
                    .zip(alphas)
                    .map(|(&xi, a)| frac(xi + a.mul_frac_signed_unreduced(k)))
                    .collect(),
            ),
            (SystemDescriptor::SkewProduct { alpha }, Point::Skew { base, fiber }) => {
                // (x, y) -> (x + k a, y + k x + k(k-1)/2 a); k(k-1)/2 >= 0 for every integer k.
                let shift = alpha.mul_frac_signed_unreduced(k);
                let tri = alpha.mul_frac_unreduced(binom2_signed(k));
                Point::Skew {
                    base: frac(base + shift),
                    fiber: frac(fiber + frac_mul_unreduced(k as f64, *base) + tri),
                }
            }
            (SystemDescriptor::Heisenberg { a, b }, Point::Heisenberg { x, y, z }) => {
                heisenberg_translate(a.value(), b.value(), (*x, *y, *z), k)
            }
            (SystemDescriptor::QMultShift(_), Point::Symbolic(i)) => {
                let j = *i as i128 + k as i128;
                if j < 0 {
                    return Err(Error::InvalidArgument("the symbolic shift is one-sided"));
                }
                Point::Symbolic(j as u64)
            }
            (SystemDescriptor::Product(l, r), Point::Product(pl, pr)) => {
                Point::product(l.iterate_unchecked(pl, k)?, r.iterate_unchecked(pr, k)?)
            }
            _ => unreachable!("point checked against system"),
        })
    }

    /// `f(p)`.
    pub fn evaluate(&self, obs: &Observable, p: &Point) -> Result<Complex64> {
        self.check_point(p)?;
        self.evaluate_unchecked(obs, p)
    }

    pub(crate) fn evaluate_unchecked(&self, obs: &Observable, p: &Point) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        match obs {
            Observable::Character(m) if m.iter().all(|&k| k == 0) => Ok(one),
            Observable::Character(m) => match (self, p) {
                (SystemDescriptor::FiniteRotation { orders, .. }, Point::FiniteElem(r)) => {
                    if m.len() != orders.len() {
                        return Err(Error::InvalidObservable(
                            "character length differs from the group rank",
                        ));
                    }
                    let l = orders.iter().fold(1u64, |acc, o| acc.lcm(o));
                    let mut k: i128 = 0;
                    for ((&mi, &ri), &oi) in m.iter().zip(r).zip(orders) {
                        k += mi as i128 * ri as i128 * (l / oi) as i128;
                    }
                    Ok(numeric::root_of_unity(k.rem_euclid(l as i128) as i64, l))
                }
                (_, Point::Torus(x)) => {
                    if m.len() != x.len() {
                        return Err(Error::InvalidObservable(
                            "character length differs from the torus dimension",
                        ));
                    }
                    Ok(character_on(m, x))
                }
                (_, Point::Skew { base, fiber }) => {
                    if m.len() > 2 {
                        return Err(Error::InvalidObservable("skew product has two coordinates"));
                    }
                    Ok(character_on(m, &[*base, *fiber]))
                }
                (_, Point::Heisenberg { x, y, z }) => {
                    if m.len() > 3 {
                        return Err(Error::InvalidObservable(
                            "Heisenberg points have three coordinates",
                        ));
                    }
                    Ok(character_on(m, &[*x, *y, *z]))
                }
                _ => Err(Error::InvalidObservable(
                    "characters need a group coordinate",
                )),
            },
            Observable::ArcIndicator { start, length } => match p {
                Point::Torus(x) if x.len() == 1 => Ok(if arc_contains(*start, *length, x[0]) {
                    one
                } else {
                    Complex64::new(0.0, 0.0)
                }),
                _ => Err(Error::InvalidObservable(
                    "arc indicators live on the circle",
                )),
            },
            Observable::SymbolValue => match (self, p) {
                (SystemDescriptor::QMultShift(w), Point::Symbolic(i)) => Ok(w.eval_complex(*i)),
                _ => Err(Error::InvalidObservable(
                    "symbol value needs a q-multiplicative shift",
                )),
            },
            Observable::TensorProduct(fl, fr) => match (self, p) {
                (SystemDescriptor::Product(sl, sr), Point::Product(pl, pr)) => {
                    Ok(sl.evaluate_unchecked(fl, pl)? * sr.evaluate_unchecked(fr, pr)?)
                }
                _ => Err(Error::InvalidObservable(
                    "tensor products need a product point",
                )),
            },
        }
    }
}

/// Diagonal product system `X x Y`.
pub fn product(a: SystemDescriptor, b: SystemDescriptor) -> SystemDescriptor {
    SystemDescriptor::Product(Box::new(a), Box::new(b))
}

fn character_on(m: &[i64], x: &[f64]) -> Complex64 {
    let t: f64 = m
        .iter()
        .zip(x)
        .map(|(&k, &xi)| frac_mul_unreduced(k as f64, xi))
        .sum();
    numeric::e(t)
}

/// Bounded observables.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    /// `x -> e(sum m_i x_i)`; on finite groups `x_i` is `residue / order`.
    Character(Vec<i64>),
    /// Indicator of the arc `[start, start + length)` of the circle.
    ArcIndicator {
        start: Rational64,
        length: Rational64,
    },
    /// `w(index)` on a q-multiplicative shift.
    SymbolValue,
    TensorProduct(Box<Observable>, Box<Observable>),
}

impl Observable {
    pub fn character(m: &[i64]) -> Self {
        Observable::Character(m.to_vec())
    }

    pub fn constant() -> Self {
        Observable::Character(Vec::new())
    }

    pub fn arc(start: Rational64, length: Rational64) -> Result<Self> {
        let zero = Rational64::from_integer(0);
        let one = Rational64::from_integer(1);
        if start < zero || start >= one {
            return Err(Error::InvalidArgument("arc start must lie in [0, 1)"));
        }
        if length <= zero || length > one {
            return Err(Error::InvalidArgument("arc length must lie in (0, 1]"));
        }
        Ok(Observable::ArcIndicator { start, length })
    }

    pub fn tensor(l: Observable, r: Observable) -> Self {
        Observable::TensorProduct(Box::new(l), Box::new(r))
    }

    /// `sup |f|`.
    pub fn sup_norm(&self) -> f64 {
        1.0
    }
}

/// `x >= r` decided exactly for a float `x` and a rational `r`.
pub(crate) fn ge_rational(x: f64, r: Rational64) -> bool {
    let (h, l) = two_prod(x, *r.denom() as f64);
    let p = *r.numer() as f64;
    h > p || (h == p && l >= 0.0)
}

/// Membership of `x` in the arc `[start, start + length)` taken modulo one.
pub fn arc_contains(start: Rational64, length: Rational64, x: f64) -> bool {
    let one = Rational64::from_integer(1);
    let end = start + length;
    if length >= one {
        return true;
    }
    if end <= one {
        ge_rational(x, start) && !ge_rational(x, end)
    } else {
        ge_rational(x, start) || !ge_rational(x, end - one)
    }
}

/// Group law of the Heisenberg group in coordinates
/// `(x, y, z) (x', y', z') = (x + x', y + y', z + z' + x y')`.
pub fn heisenberg_mul<T>(p: (T, T, T), q: (T, T, T)) -> (T, T, T)
where
    T: Copy + Add<Output = T> + Mul<Output = T>,
{
    (p.0 + q.0, p.1 + q.1, p.2 + q.2 + p.0 * q.1)
}

/// Representative in `[0, 1)^3` of the coset `g G(Z)`: writes
/// `g = g0 * (m, n, k)` with integers `m, n, k`.
pub fn heisenberg_reduce_exact(
    g: (Rational64, Rational64, Rational64),
) -> (Rational64, Rational64, Rational64) {
    let x0 = g.0 - g.0.floor();
    let n = g.1.floor();
    let y0 = g.1 - n;
    let z = g.2 - x0 * n;
    (x0, y0, z - z.floor())
}

/// Rational point of the nilmanifold, for exact checks of the group law.
pub fn heisenberg_inverse_exact(
    g: (Rational64, Rational64, Rational64),
) -> (Rational64, Rational64, Rational64) {
    (-g.0, -g.1, g.0 * g.1 - g.2)
}

fn binom2_signed(k: i64) -> u64 {
    let k = k as i128;
    (k * (k - 1) / 2) as u64
}

fn heisenberg_translate(a: f64, b: f64, p: (f64, f64, f64), n: i64) -> Point {
    // g^n = (n a, n b, C(n, 2) a b); g^n p = (x + n a, y + n b, z + C(n,2) a b + n a y).
    let nf = n as f64;
    let x_new = frac(frac_mul_unreduced(nf, a) + p.0);
    let (pb, eb) = two_prod(nf, b);
    let int_b = libm::floor(pb);
    let t = (pb - int_b) + eb + p.1;
    let mut carry = libm::floor(t);
    let mut y_new = t - carry;
    if y_new >= 1.0 - SNAP {
        y_new = 0.0;
        carry += 1.0;
    }
    let lattice_y = int_b + carry;
    let z_raw =
        frac_mul3_unreduced(binom2_signed(n) as f64, a, b) + p.2 + frac_mul3_unreduced(nf, a, p.1)
            - frac_mul_unreduced(x_new, lattice_y);
    Point::Heisenberg {
        x: x_new,
        y: y_new,
        z: frac(frac_raw(z_raw)),
    }
}

impl Sub for &Point {
    type Output = Option<f64>;

    /// Largest coordinatewise circle distance; `None` on shape mismatch.
    fn sub(self, rhs: &Point) -> Option<f64> {
        match (self, rhs) {
            (Point::FiniteElem(a), Point::FiniteElem(b)) => Some(if a == b { 0.0 } else { 1.0 }),
            (Point::Torus(a), Point::Torus(b)) if a.len() == b.len() => Some(
                a.iter()
                    .zip(b)
                    .map(|(x, y)| numeric::circle_dist(*x, *y).abs())
                    .fold(0.0, f64::max),
            ),
            (
                Point::Skew {
                    base: a0,
                    fiber: a1,
                },
                Point::Skew {
                    base: b0,
                    fiber: b1,
                },
            ) => Some(
                numeric::circle_dist(*a0, *b0)
                    .abs()
                    .max(numeric::circle_dist(*a1, *b1).abs()),
            ),
            (
                Point::Heisenberg {
                    x: a0,
                    y: a1,
                    z: a2,
                },
                Point::Heisenberg {
                    x: b0,
                    y: b1,
                    z: b2,
                },
            ) => Some(
                [(a0, b0), (a1, b1), (a2, b2)]
                    .iter()
                    .map(|(u, v)| numeric::circle_dist(**u, **v).abs())
                    .fold(0.0, f64::max),
            ),
            (Point::Symbolic(a), Point::Symbolic(b)) => Some(if a == b { 0.0 } else { 1.0 }),
            (Point::Product(al, ar), Point::Product(bl, br)) => {
                Some((&**al - &**bl)?.max((&**ar - &**br)?))
            }
            _ => None,
        }
    }
}

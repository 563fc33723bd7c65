//! Frequencies: elements of a finite dimensional rational vector space
//! spanned by 1 and a fixed family of irrationals.
//!
//! The basis is chosen so that `{1, sqrt 2, sqrt 3, golden, sqrt 6, sqrt 7, pi}`
//! is linearly independent over the rationals. Every question of the form
//! "is this combination of frequencies rational?" is therefore answered by
//! looking at coefficients, never at floating point approximations.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::error::ParseError;
use crate::numeric;

/// Symbolic basis direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisTag {
    One,
    Sqrt2,
    Sqrt3,
    Golden,
    Sqrt6,
    Sqrt7,
    Pi,
}

impl BasisTag {
    pub const ALL: [BasisTag; 7] = [
        BasisTag::One,
        BasisTag::Sqrt2,
        BasisTag::Sqrt3,
        BasisTag::Golden,
        BasisTag::Sqrt6,
        BasisTag::Sqrt7,
        BasisTag::Pi,
    ];

    pub fn approx(self) -> f64 {
        match self {
            BasisTag::One => 1.0,
            BasisTag::Sqrt2 => core::f64::consts::SQRT_2,
            BasisTag::Sqrt3 => 1.732_050_807_568_877_2,
            BasisTag::Golden => 1.618_033_988_749_895,
            BasisTag::Sqrt6 => 2.449_489_742_783_178,
            BasisTag::Sqrt7 => 2.645_751_311_064_590_7,
            BasisTag::Pi => core::f64::consts::PI,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BasisTag::One => "ONE",
            BasisTag::Sqrt2 => "SQRT2",
            BasisTag::Sqrt3 => "SQRT3",
            BasisTag::Golden => "GOLDEN",
            BasisTag::Sqrt6 => "SQRT6",
            BasisTag::Sqrt7 => "SQRT7",
            BasisTag::Pi => "PI",
        }
    }
}

/// A rational combination of basis tags; `e(Frequency)` is a point of the
/// unit circle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Frequency {
    coeffs: BTreeMap<BasisTag, Rational64>,
}

impl Frequency {
    pub fn zero() -> Self {
        Frequency::default()
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Frequency::from_term(BasisTag::One, Rational64::new(num, den))
    }

    pub fn tag(tag: BasisTag) -> Self {
        Frequency::from_term(tag, Rational64::one())
    }

    pub fn from_term(tag: BasisTag, coeff: Rational64) -> Self {
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() {
            coeffs.insert(tag, coeff);
        }
        Frequency { coeffs }
    }

    pub fn sqrt2() -> Self {
        Frequency::tag(BasisTag::Sqrt2)
    }

    pub fn sqrt3() -> Self {
        Frequency::tag(BasisTag::Sqrt3)
    }

    pub fn golden() -> Self {
        Frequency::tag(BasisTag::Golden)
    }

    pub fn coeff(&self, tag: BasisTag) -> Rational64 {
        self.coeffs
            .get(&tag)
            .copied()
            .unwrap_or_else(Rational64::zero)
    }

    /// Non-zero coefficients in basis order.
    pub fn terms(&self) -> impl Iterator<Item = (BasisTag, Rational64)> + '_ {
        self.coeffs.iter().map(|(t, c)| (*t, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.keys().all(|t| *t == BasisTag::One)
    }

    /// True when `e(self) = 1`, i.e. the frequency is an integer.
    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.coeff(BasisTag::One).is_integer()
    }

    pub fn rational_part(&self) -> Rational64 {
        self.coeff(BasisTag::One)
    }

    /// Floating value of the irrational directions only.
    pub fn irrational_value(&self) -> f64 {
        self.coeffs
            .iter()
            .filter(|(t, _)| **t != BasisTag::One)
            .map(|(t, c)| ratio_to_f64(*c) * t.approx())
            .sum()
    }

    pub fn value(&self) -> f64 {
        ratio_to_f64(self.rational_part()) + self.irrational_value()
    }

    /// `n * self mod 1` in `[0, 1)`. The rational part is reduced with integer
    /// arithmetic, so rational frequencies produce exact residues.
    pub fn mul_frac(&self, n: u64) -> f64 {
        numeric::frac(self.mul_frac_unreduced(n))
    }

    pub(crate) fn mul_frac_signed_unreduced(&self, k: i64) -> f64 {
        if k >= 0 {
            self.mul_frac_unreduced(k as u64)
        } else {
            -self.mul_frac_unreduced(k.unsigned_abs())
        }
    }

    pub(crate) fn mul_frac_unreduced(&self, n: u64) -> f64 {
        let r = self.rational_part();
        let den = *r.denom() as i128;
        let num = (*r.numer() as i128).rem_euclid(den);
        let residue = ((n as i128 % den) * num).rem_euclid(den);
        let rational = residue as f64 / den as f64;
        let irr = self.irrational_value();
        if irr == 0.0 {
            rational
        } else {
            rational + numeric::frac_mul_unreduced(n as f64, irr)
        }
    }

    pub fn scale(&self, k: Rational64) -> Self {
        let mut out = Frequency::zero();
        if k.is_zero() {
            return out;
        }
        for (t, c) in &self.coeffs {
            out.coeffs.insert(*t, *c * k);
        }
        out
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(Rational64::from_integer(k))
    }

    /// Least common denominator of all coefficients.
    pub fn common_denominator(&self) -> i64 {
        self.coeffs.values().fold(1i64, |acc, c| acc.lcm(c.denom()))
    }

    fn add_term(&mut self, tag: BasisTag, c: Rational64) {
        let entry = self.coeffs.entry(tag).or_insert_with(Rational64::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&tag);
        }
    }
}

pub(crate) fn ratio_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl Add for &Frequency {
    type Output = Frequency;
    fn add(self, rhs: &Frequency) -> Frequency {
        let mut out = self.clone();
        for (t, c) in &rhs.coeffs {
            out.add_term(*t, *c);
        }
        out
    }
}

impl Add for Frequency {
    type Output = Frequency;
    fn add(self, rhs: Frequency) -> Frequency {
        &self + &rhs
    }
}

impl Neg for &Frequency {
    type Output = Frequency;
    fn neg(self) -> Frequency {
        self.scale_int(-1)
    }
}

impl Neg for Frequency {
    type Output = Frequency;
    fn neg(self) -> Frequency {
        -&self
    }
}

impl Sub for &Frequency {
    type Output = Frequency;
    fn sub(self, rhs: &Frequency) -> Frequency {
        self + &(-rhs)
    }
}

impl Sub for Frequency {
    type Output = Frequency;
    fn sub(self, rhs: Frequency) -> Frequency {
        &self - &rhs
    }
}

impl Mul<i64> for &Frequency {
    type Output = Frequency;
    fn mul(self, rhs: i64) -> Frequency {
        self.scale_int(rhs)
    }
}

impl Mul<i64> for Frequency {
    type Output = Frequency;
    fn mul(self, rhs: i64) -> Frequency {
        self.scale_int(rhs)
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (tag, c)) in self.coeffs.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if *tag == BasisTag::One {
                write!(f, "{}", a)?;
            } else if a.is_one() {
                f.write_str(tag.name())?;
            } else {
                write!(f, "{}*{}", a, tag.name())?;
            }
        }
        Ok(())
    }
}

impl FromStr for Frequency {
    type Err = ParseError;

    /// Accepts sums such as `SQRT2`, `-GOLDEN`, `1/3`, `2*SQRT2 + 1/3`,
    /// `SQRT2/2`. `SQRT5` is rewritten as `2*GOLDEN - 1` and `PHI` is an
    /// alias of `GOLDEN`.
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(ParseError::new(s, "empty frequency"));
        }
        let mut out = Frequency::zero();
        let mut terms: Vec<(bool, &str)> = Vec::new();
        let bytes = compact.as_bytes();
        let mut start = 0;
        let mut sign = false;
        if bytes[0] == b'+' || bytes[0] == b'-' {
            sign = bytes[0] == b'-';
            start = 1;
        }
        let mut i = start;
        while i < bytes.len() {
            let b = bytes[i];
            if (b == b'+' || b == b'-') && i > start && bytes[i - 1] != b'*' && bytes[i - 1] != b'/'
            {
                terms.push((sign, &compact[start..i]));
                sign = b == b'-';
                start = i + 1;
            }
            i += 1;
        }
        terms.push((sign, &compact[start..]));
        for (neg, term) in terms {
            let (tag_part, coeff) = parse_term(s, term)?;
            let coeff = if neg { -coeff } else { coeff };
            for (tag, c) in tag_part {
                out.add_term(tag, c * coeff);
            }
        }
        Ok(out)
    }
}

/// Parses `[coef*]ATOM[/den]` or a bare rational. Returns the atom expanded
/// into basis terms and the scalar multiplier.
fn parse_term(
    input: &str,
    term: &str,
) -> Result<(Vec<(BasisTag, Rational64)>, Rational64), ParseError> {
    if term.is_empty() {
        return Err(ParseError::new(input, "empty term"));
    }
    let (coef_str, rest) = match term.find('*') {
        Some(pos) => (Some(&term[..pos]), &term[pos + 1..]),
        None => (None, term),
    };
    let mut coeff = match coef_str {
        Some(c) => parse_rational(input, c)?,
        None => Rational64::one(),
    };
    let starts_alpha = rest.chars().next().is_some_and(|c| c.is_ascii_alphabetic());
    if !starts_alpha {
        return Ok((
            alloc::vec![(BasisTag::One, parse_rational(input, rest)?)],
            coeff,
        ));
    }
    let (atom, den) = match rest.find('/') {
        Some(pos) => (&rest[..pos], Some(&rest[pos + 1..])),
        None => (rest, None),
    };
    if let Some(d) = den {
        let d = parse_rational(input, d)?;
        if d.is_zero() {
            return Err(ParseError::new(input, "division by zero"));
        }
        coeff /= d;
    }
    let upper = atom.to_ascii_uppercase();
    let expansion = match upper.as_str() {
        "ONE" => alloc::vec![(BasisTag::One, Rational64::one())],
        "SQRT2" => alloc::vec![(BasisTag::Sqrt2, Rational64::one())],
        "SQRT3" => alloc::vec![(BasisTag::Sqrt3, Rational64::one())],
        "GOLDEN" | "PHI" => alloc::vec![(BasisTag::Golden, Rational64::one())],
        "SQRT5" => alloc::vec![
            (BasisTag::Golden, Rational64::from_integer(2)),
            (BasisTag::One, Rational64::from_integer(-1)),
        ],
        "SQRT6" => alloc::vec![(BasisTag::Sqrt6, Rational64::one())],
        "SQRT7" => alloc::vec![(BasisTag::Sqrt7, Rational64::one())],
        "PI" => alloc::vec![(BasisTag::Pi, Rational64::one())],
        _ => {
            return Err(ParseError::new(
                input,
                alloc::format!("unknown basis element `{atom}`"),
            ))
        }
    };
    Ok((expansion, coeff))
}

fn parse_rational(input: &str, s: &str) -> Result<Rational64, ParseError> {
    let bad = || ParseError::new(input, alloc::format!("`{s}` is not a rational number"));
    match s.find('/') {
        Some(pos) => {
            let n: i64 = s[..pos].parse().map_err(|_| bad())?;
            let d: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(ParseError::new(input, "zero denominator"));
            }
            Ok(Rational64::new(n, d))
        }
        None => {
            if let Ok(n) = s.parse::<i64>() {
                return Ok(Rational64::from_integer(n));
            }
            parse_decimal(s).ok_or_else(bad)
        }
    }
}

/// Finite decimal such as `0.25`.
fn parse_decimal(s: &str) -> Option<Rational64> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.')?;
    if frac_part.len() > 15 || frac_part.is_empty() && int_part.is_empty() {
        return None;
    }
    let digits: String = alloc::format!("{int_part}{frac_part}");
    let n: i64 = digits.parse().ok()?;
    let d = 10i64.pow(frac_part.len() as u32);
    let r = Rational64::new(n, d);
    Some(if neg { -r } else { r })
}

//! Text forms of systems, observables and weights.
//!
//! ```text
//! system      finite(4,6;1,1) | rotation(F) | torus(F,F,..) | skew(F)
//!             | heisenberg(F,F) | qmult(q,m;i0,i1,..) | thue-morse
//!             | product(system,system)
//! observable  char(m1,m2,..) | const | arc(start,length) | symbol
//!             | tensor(observable,observable)
//! weight      const(re[,im]) | character(F) | thue-morse | qmult(q,m;..)
//!             | level(qfunction,target) | product(weight,weight,..)
//! ```
//!
//! `F` is a frequency such as `SQRT2`, `1/3` or `2*GOLDEN + 1/5`. Every
//! `Display` output parses back to an equal value.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;

use crate::averaging::WeightSequence;
use crate::error::ParseError;
use crate::frequency::Frequency;
use crate::qmult::QMultFunction;
use crate::systems::{Observable, SystemDescriptor};

/// Splits `name(args)` into the name and the raw argument text.
fn call(s: &str) -> Result<(&str, Option<&str>), ParseError> {
    let s = s.trim();
    match s.find('(') {
        None => Ok((s, None)),
        Some(i) => {
            if !s.ends_with(')') {
                return Err(ParseError::new(s, "missing closing parenthesis"));
            }
            Ok((s[..i].trim(), Some(&s[i + 1..s.len() - 1])))
        }
    }
}

/// Splits on `sep` outside parentheses.
fn split_top(s: &str, sep: char) -> Result<Vec<&str>, ParseError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut last = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(ParseError::new(s, "unbalanced parentheses"));
                }
            }
            c if c == sep && depth == 0 => {
                out.push(s[last..i].trim());
                last = i + c.len_utf8();
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(ParseError::new(s, "unbalanced parentheses"));
    }
    out.push(s[last..].trim());
    Ok(out)
}

fn args<'a>(whole: &str, a: Option<&'a str>) -> Result<Vec<&'a str>, ParseError> {
    let a = a.ok_or_else(|| ParseError::new(whole, "expected an argument list"))?;
    if a.trim().is_empty() {
        return Ok(Vec::new());
    }
    split_top(a, ',')
}

fn exactly<'a, const N: usize>(whole: &str, v: Vec<&'a str>) -> Result<[&'a str; N], ParseError> {
    v.try_into()
        .map_err(|_| ParseError::new(whole, format!("expected {} arguments", N)))
}

fn int<T: FromStr>(whole: &str, s: &str) -> Result<T, ParseError> {
    s.trim()
        .parse()
        .map_err(|_| ParseError::new(whole, format!("`{}` is not an integer", s.trim())))
}

fn ints<T: FromStr>(whole: &str, s: &str) -> Result<Vec<T>, ParseError> {
    split_top(s, ',')?
        .into_iter()
        .map(|x| int(whole, x))
        .collect()
}

fn rational(whole: &str, s: &str) -> Result<Rational64, ParseError> {
    let f: Frequency = s.parse()?;
    if !f.is_rational() {
        return Err(ParseError::new(whole, "expected a rational number"));
    }
    Ok(f.rational_part())
}

fn semicolon_pair<'a>(whole: &str, a: Option<&'a str>) -> Result<(&'a str, &'a str), ParseError> {
    let a = a.ok_or_else(|| ParseError::new(whole, "expected an argument list"))?;
    let parts = split_top(a, ';')?;
    let [l, r] = exactly::<2>(whole, parts)?;
    Ok((l, r))
}

fn parse_qmult(
    whole: &str,
    name: &str,
    a: Option<&str>,
) -> Result<Option<QMultFunction>, ParseError> {
    match name {
        "thue-morse" | "thue_morse" if a.is_none() => Ok(Some(QMultFunction::thue_morse())),
        "qmult" => {
            let (head, tail) = semicolon_pair(whole, a)?;
            let [q, m] = exactly::<2>(whole, split_top(head, ',')?)?;
            let w = QMultFunction::new(int(whole, q)?, int(whole, m)?, ints(whole, tail)?)
                .map_err(|e| ParseError::new(whole, e.to_string()))?;
            Ok(Some(w))
        }
        _ => Ok(None),
    }
}

impl FromStr for QMultFunction {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let (name, a) = call(s)?;
        parse_qmult(s, name, a)?
            .ok_or_else(|| ParseError::new(s, "expected `thue-morse` or `qmult(q,m;indices)`"))
    }
}

impl fmt::Display for QMultFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == QMultFunction::thue_morse() {
            return f.write_str("thue-morse");
        }
        write!(
            f,
            "qmult({},{};{})",
            self.q(),
            self.m(),
            join(self.digit_indices())
        )
    }
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    parts.join(",")
}

impl FromStr for SystemDescriptor {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let (name, a) = call(s)?;
        let freq = |x: &str| x.parse::<Frequency>();
        let sys = match name {
            "finite" => {
                let (orders, step) = semicolon_pair(s, a)?;
                SystemDescriptor::finite_rotation(ints(s, orders)?, ints(s, step)?)
                    .map_err(|e| ParseError::new(s, e.to_string()))?
            }
            "rotation" => {
                let [x] = exactly::<1>(s, args(s, a)?)?;
                SystemDescriptor::rotation(freq(x)?)
            }
            "torus" => {
                let v = args(s, a)?;
                if v.is_empty() {
                    return Err(ParseError::new(s, "torus needs at least one frequency"));
                }
                SystemDescriptor::torus(v.into_iter().map(freq).collect::<Result<_, _>>()?)
            }
            "skew" => {
                let [x] = exactly::<1>(s, args(s, a)?)?;
                SystemDescriptor::skew(freq(x)?)
            }
            "heisenberg" => {
                let [x, y] = exactly::<2>(s, args(s, a)?)?;
                SystemDescriptor::heisenberg(freq(x)?, freq(y)?)
            }
            "product" => {
                let [x, y] = exactly::<2>(s, args(s, a)?)?;
                crate::systems::product(x.parse()?, y.parse()?)
            }
            _ => match parse_qmult(s, name, a)? {
                Some(w) => SystemDescriptor::QMultShift(w),
                None => return Err(ParseError::new(s, format!("unknown system `{}`", name))),
            },
        };
        Ok(sys)
    }
}

impl fmt::Display for SystemDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemDescriptor::FiniteRotation { orders, step } => {
                write!(f, "finite({};{})", join(orders), join(step))
            }
            SystemDescriptor::TorusRotation { alphas } if alphas.len() == 1 => {
                write!(f, "rotation({})", alphas[0])
            }
            SystemDescriptor::TorusRotation { alphas } => write!(f, "torus({})", join(alphas)),
            SystemDescriptor::SkewProduct { alpha } => write!(f, "skew({})", alpha),
            SystemDescriptor::Heisenberg { a, b } => write!(f, "heisenberg({},{})", a, b),
            SystemDescriptor::QMultShift(w) => write!(f, "{}", w),
            SystemDescriptor::Product(l, r) => write!(f, "product({},{})", l, r),
        }
    }
}

impl FromStr for Observable {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let (name, a) = call(s)?;
        Ok(match (name, a) {
            ("const", None) => Observable::constant(),
            ("symbol", None) => Observable::SymbolValue,
            ("char", _) => Observable::Character(
                args(s, a)?
                    .into_iter()
                    .map(|x| int(s, x))
                    .collect::<Result<_, _>>()?,
            ),
            ("arc", _) => {
                let [st, len] = exactly::<2>(s, args(s, a)?)?;
                Observable::arc(rational(s, st)?, rational(s, len)?)
                    .map_err(|e| ParseError::new(s, e.to_string()))?
            }
            ("tensor", _) => {
                let [l, r] = exactly::<2>(s, args(s, a)?)?;
                Observable::tensor(l.parse()?, r.parse()?)
            }
            _ => return Err(ParseError::new(s, format!("unknown observable `{}`", name))),
        })
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Character(m) if m.is_empty() => f.write_str("const"),
            Observable::Character(m) => write!(f, "char({})", join(m)),
            Observable::ArcIndicator { start, length } => write!(f, "arc({},{})", start, length),
            Observable::SymbolValue => f.write_str("symbol"),
            Observable::TensorProduct(l, r) => write!(f, "tensor({},{})", l, r),
        }
    }
}

fn float(whole: &str, s: &str) -> Result<f64, ParseError> {
    s.trim()
        .parse()
        .map_err(|_| ParseError::new(whole, format!("`{}` is not a number", s.trim())))
}

impl FromStr for WeightSequence {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let (name, a) = call(s)?;
        Ok(match name {
            "const" => match a {
                None => WeightSequence::one(),
                Some(_) => match args(s, a)?.as_slice() {
                    [re] => WeightSequence::Constant(Complex64::new(float(s, re)?, 0.0)),
                    [re, im] => {
                        WeightSequence::Constant(Complex64::new(float(s, re)?, float(s, im)?))
                    }
                    _ => return Err(ParseError::new(s, "const takes one or two numbers")),
                },
            },
            "character" => {
                let [x] = exactly::<1>(s, args(s, a)?)?;
                WeightSequence::Character(x.parse()?)
            }
            "level" => {
                let [w, t] = exactly::<2>(s, args(s, a)?)?;
                let w: QMultFunction = w.parse()?;
                let target: u32 = int(s, t)?;
                if target >= w.m() {
                    return Err(ParseError::new(s, "level target must be below m"));
                }
                WeightSequence::LevelSetIndicator { w, target }
            }
            "product" => {
                let ws = args(s, a)?;
                if ws.is_empty() {
                    return Err(ParseError::new(s, "product needs at least one weight"));
                }
                WeightSequence::PointwiseProduct(
                    ws.into_iter().map(str::parse).collect::<Result<_, _>>()?,
                )
            }
            _ => match parse_qmult(s, name, a)? {
                Some(w) => WeightSequence::QMult(w),
                None => return Err(ParseError::new(s, format!("unknown weight `{}`", name))),
            },
        })
    }
}

impl fmt::Display for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSequence::Constant(c) if c.im == 0.0 => write!(f, "const({:?})", c.re),
            WeightSequence::Constant(c) => write!(f, "const({:?},{:?})", c.re, c.im),
            WeightSequence::Character(a) => write!(f, "character({})", a),
            WeightSequence::QMult(w) => write!(f, "{}", w),
            WeightSequence::LevelSetIndicator { w, target } => write!(f, "level({},{})", w, target),
            WeightSequence::PointwiseProduct(ws) => write!(f, "product({})", join(ws)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn systems_round_trip() {
        for s in [
            "finite(4,6;1,1)",
            "rotation(SQRT2)",
            "torus(SQRT2,1/3)",
            "skew(GOLDEN)",
            "heisenberg(SQRT2,SQRT3)",
            "thue-morse",
            "qmult(3,3;0,1,2)",
            "product(rotation(1/4),skew(SQRT2))",
        ] {
            let sys: SystemDescriptor = s.parse().unwrap();
            assert_eq!(sys.to_string(), s);
        }
        let sys: SystemDescriptor = "finite(4;5)".parse().unwrap();
        assert_eq!(
            sys,
            SystemDescriptor::finite_rotation(vec![4], vec![1]).unwrap()
        );
    }

    #[test]
    fn observables_round_trip() {
        for s in [
            "char(1)",
            "char(0,-1)",
            "const",
            "arc(0,1/4)",
            "symbol",
            "tensor(char(1),char(-1))",
        ] {
            let o: Observable = s.parse().unwrap();
            assert_eq!(o.to_string(), s);
        }
        assert!("arc(0,2)".parse::<Observable>().is_err());
    }

    #[test]
    fn weights_round_trip() {
        for s in [
            "const(1.0)",
            "const(0.5,-2.0)",
            "character(GOLDEN)",
            "thue-morse",
            "level(thue-morse,0)",
        ] {
            let w: WeightSequence = s.parse().unwrap();
            assert_eq!(w.to_string(), s);
        }
        let w: WeightSequence = "product(thue-morse,character(SQRT2))".parse().unwrap();
        assert_eq!(w.to_string(), "product(thue-morse,character(SQRT2))");
        assert!("level(thue-morse,2)".parse::<WeightSequence>().is_err());
    }

    #[test]
    fn errors_are_reported() {
        assert!("rotation(SQRT2".parse::<SystemDescriptor>().is_err());
        assert!("spiral(1)".parse::<SystemDescriptor>().is_err());
        assert!("heisenberg(SQRT2)".parse::<SystemDescriptor>().is_err());
        assert!("finite(4;x)".parse::<SystemDescriptor>().is_err());
    }
}

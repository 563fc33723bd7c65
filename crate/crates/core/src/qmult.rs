//! Strongly q-multiplicative functions with values in the m-th roots of unity.
//!
//! `w(n)` is the product of `w` over the base-q digits of `n`. Values are kept
//! as exponents modulo `m` so multiplicativity and level-set membership are
//! exact; [`RootOfUnity::to_complex`] is the only place floats appear.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::numeric;

/// `e(index / m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    pub index: u32,
    pub m: u32,
}

impl RootOfUnity {
    pub fn to_complex(self) -> Complex64 {
        numeric::root_of_unity(self.index as i64, self.m as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QMultFunction {
    q: u32,
    m: u32,
    digit_indices: Vec<u32>,
}

impl QMultFunction {
    /// `digit_indices[a]` is the exponent of `w(a)` for the digit `a < q`;
    /// the first entry must be 0 so that `w(0) = 1`.
    pub fn new(q: u32, m: u32, digit_indices: Vec<u32>) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidArgument("q must be at least 2"));
        }
        if m < 1 {
            return Err(Error::InvalidArgument("m must be positive"));
        }
        if digit_indices.len() != q as usize {
            return Err(Error::InvalidArgument("need exactly q digit values"));
        }
        if !digit_indices[0].is_multiple_of(m) {
            return Err(Error::InvalidArgument("w(0) must be 1"));
        }
        let digit_indices = digit_indices.into_iter().map(|i| i % m).collect();
        Ok(QMultFunction {
            q,
            m,
            digit_indices,
        })
    }

    /// The +-1 Thue-Morse sequence: q = 2, w(1) = -1.
    pub fn thue_morse() -> Self {
        QMultFunction {
            q: 2,
            m: 2,
            digit_indices: vec![0, 1],
        }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn digit_indices(&self) -> &[u32] {
        &self.digit_indices
    }

    pub fn digit_values(&self) -> Vec<Complex64> {
        self.digit_indices
            .iter()
            .map(|&i| {
                RootOfUnity {
                    index: i,
                    m: self.m,
                }
                .to_complex()
            })
            .collect()
    }

    pub fn eval(&self, mut n: u64) -> RootOfUnity {
        let q = self.q as u64;
        let mut acc = 0u64;
        while n > 0 {
            acc += self.digit_indices[(n % q) as usize] as u64;
            n /= q;
        }
        RootOfUnity {
            index: (acc % self.m as u64) as u32,
            m: self.m,
        }
    }

    pub fn eval_complex(&self, n: u64) -> Complex64 {
        self.eval(n).to_complex()
    }

    /// `w^j`, again strongly q-multiplicative.
    pub fn pow(&self, j: u32) -> Self {
        QMultFunction {
            q: self.q,
            m: self.m,
            digit_indices: self
                .digit_indices
                .iter()
                .map(|&i| ((i as u64 * j as u64) % self.m as u64) as u32)
                .collect(),
        }
    }

    /// `sum_{n < q^k} w(n)`, an element of the cyclotomic integers.
    pub fn block_sum(&self, k: u32) -> CyclotomicInt {
        let mut digit_sum = CyclotomicInt::zero(self.m);
        for &i in &self.digit_indices {
            digit_sum = digit_sum.add(&CyclotomicInt::root(self.m, i));
        }
        let mut acc = CyclotomicInt::one(self.m);
        for _ in 0..k {
            acc = acc.mul(&digit_sum);
        }
        acc
    }

    /// `counts[i] = #{n < q^k : w(n) = e(i/m)}`, the k-fold convolution
    /// power of the digit-exponent multiset.
    pub fn block_level_counts(&self, k: u32) -> Vec<u128> {
        let m = self.m as usize;
        let mut digits = vec![0u128; m];
        for &i in &self.digit_indices {
            digits[i as usize] += 1;
        }
        let mut acc = vec![0u128; m];
        acc[0] = 1;
        for _ in 0..k {
            let mut next = vec![0u128; m];
            for (a, &ca) in acc.iter().enumerate() {
                if ca == 0 {
                    continue;
                }
                for (b, &cb) in digits.iter().enumerate() {
                    next[(a + b) % m] += ca * cb;
                }
            }
            acc = next;
        }
        acc
    }

    /// `#{n < N : w(n) = e(target/m)} / N`.
    pub fn level_set_density(&self, target: u32, n: u64) -> Result<Ratio<u64>> {
        if n == 0 {
            return Err(Error::InvalidArgument("density needs N >= 1"));
        }
        let count = (0..n)
            .filter(|&k| self.eval(k).index == target % self.m)
            .count() as u64;
        Ok(Ratio::new(count, n))
    }

    /// Indicator of `{n : w(n) = e(target/m)}` through the expansion
    /// `(1/m) sum_j conj(z)^j w(n)^j`.
    pub fn level_indicator_expansion(&self, target: u32, n: u64) -> Complex64 {
        let idx = self.eval(n).index as i64;
        let m = self.m as u64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..self.m as i64 {
            let conj_z = numeric::root_of_unity(-(j * target as i64), m);
            let w_j = numeric::root_of_unity(j * idx, m);
            acc += conj_z * w_j;
        }
        acc / self.m as f64
    }

    pub fn level_indicator(&self, target: u32, n: u64) -> bool {
        self.eval(n).index == target % self.m
    }
}

/// Element of `Z[zeta_m]`, stored as a polynomial in `zeta` of degree below
/// `phi(m)` reduced modulo the m-th cyclotomic polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicInt {
    m: u32,
    coeffs: Vec<i128>,
}

impl CyclotomicInt {
    pub fn zero(m: u32) -> Self {
        let deg = cyclotomic_polynomial(m).len() - 1;
        CyclotomicInt {
            m,
            coeffs: vec![0; deg],
        }
    }

    pub fn one(m: u32) -> Self {
        CyclotomicInt::root(m, 0)
    }

    /// `zeta_m^i`.
    pub fn root(m: u32, i: u32) -> Self {
        let mut poly = vec![0i128; (i % m) as usize + 1];
        poly[(i % m) as usize] = 1;
        CyclotomicInt::reduce(m, poly)
    }

    fn reduce(m: u32, mut poly: Vec<i128>) -> Self {
        let phi = cyclotomic_polynomial(m);
        let deg = phi.len() - 1;
        // phi is monic, so long division stays in the integers.
        while poly.len() > deg {
            let lead = poly.pop().unwrap();
            if lead != 0 {
                let shift = poly.len() - deg;
                for (j, &c) in phi[..deg].iter().enumerate() {
                    poly[shift + j] -= lead * c;
                }
            }
        }
        poly.resize(deg, 0);
        CyclotomicInt { m, coeffs: poly }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        CyclotomicInt { m: self.m, coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m);
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut poly = vec![0i128; self.coeffs.len() + other.coeffs.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                poly[i + j] += a * b;
            }
        }
        CyclotomicInt::reduce(self.m, poly)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn to_complex(&self) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| numeric::root_of_unity(i as i64, self.m as u64) * c as f64)
            .sum()
    }
}

/// Coefficients of the m-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(m: u32) -> Vec<i128> {
    assert!(m >= 1);
    // x^m - 1 divided by every Phi_d with d | m, d < m.
    let mut poly = vec![0i128; m as usize + 1];
    poly[0] = -1;
    poly[m as usize] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            poly = poly_div_exact(&poly, &cyclotomic_polynomial(d));
        }
    }
    poly
}

fn poly_div_exact(num: &[i128], den: &[i128]) -> Vec<i128> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i128; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        for (j, &b) in den.iter().enumerate() {
            rem[i + j] -= c * b;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thue_morse_values() {
        let w = QMultFunction::thue_morse();
        let vals: Vec<u32> = (0..8).map(|n| w.eval(n).index).collect();
        assert_eq!(vals, [0, 1, 1, 0, 1, 0, 0, 1]);
        assert_eq!(w.eval_complex(7), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn block_sums() {
        let w = QMultFunction::thue_morse();
        assert_eq!(w.block_sum(0), CyclotomicInt::one(2));
        assert!(w.block_sum(1).is_zero());
        let ternary = QMultFunction::new(3, 3, vec![0, 1, 2]).unwrap();
        assert!(ternary.block_sum(1).is_zero());
        // Non-vanishing case: q = 3 with values (1, -1, 1).
        let v = QMultFunction::new(3, 2, vec![0, 1, 0]).unwrap();
        assert_eq!(v.block_sum(3).to_complex(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn rejects_bad_digit_tables() {
        assert!(QMultFunction::new(1, 2, vec![0]).is_err());
        assert!(QMultFunction::new(2, 2, vec![1, 0]).is_err());
        assert!(QMultFunction::new(3, 2, vec![0, 1]).is_err());
    }

    #[test]
    fn density_examples() {
        let w = QMultFunction::thue_morse();
        assert_eq!(w.level_set_density(1, 6).unwrap(), Ratio::new(1, 2));
        assert_eq!(w.level_set_density(0, 1024).unwrap(), Ratio::new(1, 2));
        let constant = QMultFunction::new(2, 3, vec![0, 0]).unwrap();
        assert_eq!(
            constant.level_set_density(2, 100).unwrap(),
            Ratio::new(0, 1)
        );
    }

    #[test]
    fn indicator_expansion_for_thue_morse() {
        let w = QMultFunction::thue_morse();
        for n in 0..64 {
            let expected = (1.0 + w.eval_complex(n).re) / 2.0;
            let got = w.level_indicator_expansion(0, n);
            assert!((got.re - expected).abs() < 1e-15 && got.im.abs() < 1e-15);
        }
        let sq = w.pow(2);
        assert!((0..256).all(|n| sq.eval(n).index == 0));
    }
}

//! Discrete spectra, exact Kronecker disjointness, and point-mass estimates.
//!
//! A spectrum generated by frequencies `beta_1, ..., beta_r` is the subgroup
//! `{e(sum m_i beta_i)}` of the circle. Frequencies are rational vectors over
//! the symbolic basis, so after clearing denominators the subgroup becomes an
//! integer lattice containing `Z * ONE`, and intersections reduce to integer
//! kernels.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::frequency::{BasisTag, Frequency};
use crate::lattice::{hermite_normal_form, lattice_contains, left_kernel};
use crate::numeric;
use crate::summation::ComplexSum;
use crate::systems::{Observable, Point, SystemDescriptor};

/// A subgroup of the unit circle, described exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpectrumDescription {
    /// All `e(sum k_i / orders_i)`.
    FiniteCyclic(Vec<u64>),
    /// All `e(sum m_i alpha_i)`.
    TorusGenerated(Vec<Frequency>),
    /// Some subgroup of `{e(a / q^n)}`; which elements occur is not recorded.
    QDyadic(u32),
    TrivialOnly,
    /// Frequencies found numerically. Never used for verdicts.
    Estimated(Vec<Frequency>),
    /// `Eig(X) * Eig(Y)` when it cannot be folded into a single lattice.
    Product(Box<SpectrumDescription>, Box<SpectrumDescription>),
}

// Column order: irrational directions first, ONE last.
const COLUMNS: [BasisTag; 7] = [
    BasisTag::Sqrt2,
    BasisTag::Sqrt3,
    BasisTag::Golden,
    BasisTag::Sqrt6,
    BasisTag::Sqrt7,
    BasisTag::Pi,
    BasisTag::One,
];
const ONE_COL: usize = COLUMNS.len() - 1;

fn common_scale(gens: &[Frequency]) -> i128 {
    gens.iter()
        .fold(1i128, |acc, g| acc.lcm(&(g.common_denominator() as i128)))
}

fn to_row(f: &Frequency, scale: i128) -> Vec<i128> {
    COLUMNS
        .iter()
        .map(|&t| {
            let c = f.coeff(t);
            *c.numer() as i128 * (scale / *c.denom() as i128)
        })
        .collect()
}

fn from_row(row: &[i128], scale: i128) -> Result<Frequency> {
    let mut out = Frequency::zero();
    for (&t, &v) in COLUMNS.iter().zip(row) {
        if v != 0 {
            let g = v.gcd(&scale);
            let (n, d) = (v / g, scale / g);
            let (n, d) = (
                i64::try_from(n)
                    .map_err(|_| Error::InvalidArgument("frequency coefficients overflow"))?,
                i64::try_from(d)
                    .map_err(|_| Error::InvalidArgument("frequency coefficients overflow"))?,
            );
            out = &out + &Frequency::from_term(t, Rational64::new(n, d));
        }
    }
    Ok(out)
}

/// Integer rows spanning the lattice `Z * ONE + sum Z * gens`, scaled by a
/// common denominator.
fn lattice_rows(gens: &[Frequency]) -> (Vec<Vec<i128>>, i128) {
    let scale = common_scale(gens);
    let mut rows = vec![to_row(&Frequency::rational(1, 1), scale)];
    rows.extend(gens.iter().map(|g| to_row(g, scale)));
    (rows, scale)
}

/// Canonical description of the group generated by `gens`: rational groups
/// become `FiniteCyclic([n])` or `TrivialOnly`, anything else becomes the
/// Hermite basis of its lattice.
pub fn canonical(gens: &[Frequency]) -> Result<SpectrumDescription> {
    let (rows, scale) = lattice_rows(gens);
    let hnf = hermite_normal_form(&rows);
    let mut irrational = Vec::new();
    let mut rational_den = 1i128;
    for row in &hnf {
        if row[..ONE_COL].iter().all(|&v| v == 0) {
            // Z * ONE is inside the lattice, so the pivot divides the scale.
            rational_den = scale / row[ONE_COL];
        } else {
            irrational.push(from_row(row, scale)?);
        }
    }
    if irrational.is_empty() {
        return Ok(if rational_den == 1 {
            SpectrumDescription::TrivialOnly
        } else {
            SpectrumDescription::FiniteCyclic(vec![rational_den as u64])
        });
    }
    if rational_den > 1 {
        irrational.push(Frequency::rational(1, rational_den as i64));
    }
    Ok(SpectrumDescription::TorusGenerated(irrational))
}

impl SpectrumDescription {
    /// Generators of the lattice, if this description is one.
    pub fn lattice_generators(&self) -> Result<Option<Vec<Frequency>>> {
        Ok(match self {
            SpectrumDescription::FiniteCyclic(orders) => {
                if orders.iter().any(|&o| o == 0 || o > i64::MAX as u64) {
                    return Err(Error::InvalidArgument("cyclic orders must be positive"));
                }
                Some(
                    orders
                        .iter()
                        .map(|&o| Frequency::rational(1, o as i64))
                        .collect(),
                )
            }
            SpectrumDescription::TorusGenerated(g) => Some(g.clone()),
            SpectrumDescription::TrivialOnly => Some(Vec::new()),
            _ => None,
        })
    }

    fn is_empty_list(&self) -> bool {
        match self {
            SpectrumDescription::FiniteCyclic(v) => v.is_empty(),
            SpectrumDescription::TorusGenerated(v) | SpectrumDescription::Estimated(v) => {
                v.is_empty()
            }
            _ => false,
        }
    }

    fn has_estimate(&self) -> bool {
        match self {
            SpectrumDescription::Estimated(_) => true,
            SpectrumDescription::Product(a, b) => a.has_estimate() || b.has_estimate(),
            _ => false,
        }
    }

    /// Canonical form of exact lattice descriptions; other variants unchanged.
    pub fn canonicalize(&self) -> Result<SpectrumDescription> {
        match self.lattice_generators()? {
            Some(g) => canonical(&g),
            None => Ok(self.clone()),
        }
    }

    /// Exact membership of `e(beta)`.
    pub fn contains(&self, beta: &Frequency) -> Result<bool> {
        if beta.is_integer() {
            return Ok(true);
        }
        if let Some(gens) = self.lattice_generators()? {
            let mut all = gens.clone();
            all.push(beta.clone());
            let scale = common_scale(&all);
            let mut rows = vec![to_row(&Frequency::rational(1, 1), scale)];
            rows.extend(gens.iter().map(|g| to_row(g, scale)));
            return Ok(lattice_contains(&rows, &to_row(beta, scale)));
        }
        match self {
            SpectrumDescription::QDyadic(q) => {
                if beta.is_rational()
                    && is_q_power_denominator(*beta.rational_part().denom() as u64, *q as u64)
                {
                    Err(Error::Undecidable(
                        "membership in a q-dyadic spectrum is only known up to containment",
                    ))
                } else {
                    Ok(false)
                }
            }
            _ => Err(Error::Undecidable(
                "membership needs an exact lattice description",
            )),
        }
    }
}

fn is_q_power_denominator(mut d: u64, q: u64) -> bool {
    if q < 2 {
        return d == 1;
    }
    loop {
        let g = d.gcd(&q);
        if g == 1 {
            return d == 1;
        }
        while d.is_multiple_of(g) {
            d /= g;
        }
    }
}

/// `Eig(X) * Eig(Y)`.
pub fn product_spectrum(
    a: &SpectrumDescription,
    b: &SpectrumDescription,
) -> Result<SpectrumDescription> {
    if let (Some(ga), Some(gb)) = (a.lattice_generators()?, b.lattice_generators()?) {
        let mut all = ga;
        all.extend(gb);
        return canonical(&all);
    }
    Ok(match (a, b) {
        (SpectrumDescription::TrivialOnly, x) | (x, SpectrumDescription::TrivialOnly) => x.clone(),
        (SpectrumDescription::QDyadic(p), SpectrumDescription::QDyadic(q)) if p == q => {
            SpectrumDescription::QDyadic(*p)
        }
        _ => SpectrumDescription::Product(Box::new(a.clone()), Box::new(b.clone())),
    })
}

/// Spectrum of the Kronecker factor of a system, from its construction.
pub fn known_spectrum(sys: &SystemDescriptor) -> Result<SpectrumDescription> {
    match sys {
        SystemDescriptor::FiniteRotation { orders, step } => {
            let order = orders
                .iter()
                .zip(step)
                .fold(1u64, |acc, (&o, &s)| acc.lcm(&(o / o.gcd(&s))));
            canonical(&[Frequency::rational(1, order as i64)])
        }
        SystemDescriptor::TorusRotation { alphas } => canonical(alphas),
        SystemDescriptor::SkewProduct { alpha } => canonical(core::slice::from_ref(alpha)),
        SystemDescriptor::Heisenberg { a, b } => canonical(&[a.clone(), b.clone()]),
        SystemDescriptor::QMultShift(w) => Ok(SpectrumDescription::QDyadic(w.q())),
        SystemDescriptor::Product(l, r) => {
            product_spectrum(&known_spectrum(l)?, &known_spectrum(r)?)
        }
    }
}

/// `Eig(A) ∩ Eig(B)` for two exact lattice descriptions.
pub fn intersection(
    a: &SpectrumDescription,
    b: &SpectrumDescription,
) -> Result<SpectrumDescription> {
    let (Some(ga), Some(gb)) = (a.lattice_generators()?, b.lattice_generators()?) else {
        return Err(Error::Undecidable(
            "intersection needs exact lattice descriptions",
        ));
    };
    let mut all = ga.clone();
    all.extend(gb.iter().cloned());
    let scale = common_scale(&all);
    let one = to_row(&Frequency::rational(1, 1), scale);
    let mut rows = vec![one.clone()];
    rows.extend(ga.iter().map(|g| to_row(g, scale)));
    let split = rows.len();
    rows.push(one.iter().map(|v| -v).collect());
    rows.extend(
        gb.iter()
            .map(|g| to_row(g, scale).into_iter().map(|v| -v).collect()),
    );
    let mut common = Vec::new();
    for k in left_kernel(&rows) {
        let mut v = vec![0i128; COLUMNS.len()];
        for (c, row) in k[..split].iter().zip(&rows[..split]) {
            for (o, x) in v.iter_mut().zip(row) {
                *o += c * x;
            }
        }
        common.push(from_row(&v, scale)?);
    }
    canonical(&common)
}

/// Denominator `D` with `L ∩ Q = (1/D) Z` for a lattice description.
fn rational_subgroup_denominator(gens: &[Frequency]) -> u64 {
    let (rows, scale) = lattice_rows(gens);
    hermite_normal_form(&rows)
        .iter()
        .find(|row| row[..ONE_COL].iter().all(|&v| v == 0))
        .map(|row| (scale / row[ONE_COL]) as u64)
        .unwrap_or(1)
}

/// Decides whether `Eig(A) ∩ Eig(B) = {1}`.
///
/// Lattice descriptions are decided exactly. Against `QDyadic(q)` only the
/// containment in `{e(a/q^n)}` is known, so a verdict of "disjoint" is given
/// when the other group has no element of that form and `Undecidable`
/// otherwise.
pub fn kronecker_disjoint(a: &SpectrumDescription, b: &SpectrumDescription) -> Result<bool> {
    use SpectrumDescription as S;
    if a.is_empty_list() || b.is_empty_list() {
        return Err(Error::Undecidable("empty spectrum description"));
    }
    if a.has_estimate() || b.has_estimate() {
        return Err(Error::Undecidable(
            "numerical spectra cannot decide disjointness",
        ));
    }
    if matches!(a, S::TrivialOnly) || matches!(b, S::TrivialOnly) {
        return Ok(true);
    }
    if let (Some(_), Some(_)) = (a.lattice_generators()?, b.lattice_generators()?) {
        return Ok(intersection(a, b)? == S::TrivialOnly);
    }
    match (a, b) {
        (S::QDyadic(q), other) | (other, S::QDyadic(q)) => match other {
            S::QDyadic(p) => {
                if (*p as u64).gcd(&(*q as u64)) == 1 {
                    Ok(true)
                } else {
                    Err(Error::Undecidable(
                        "two q-dyadic spectra with a common prime",
                    ))
                }
            }
            _ => match other.lattice_generators()? {
                Some(gens) => {
                    if rational_subgroup_denominator(&gens).gcd(&(*q as u64)) == 1 {
                        Ok(true)
                    } else {
                        Err(Error::Undecidable("lattice meets the q-dyadic rationals"))
                    }
                }
                None => Err(Error::Undecidable(
                    "product spectrum against a q-dyadic spectrum",
                )),
            },
        },
        _ => Err(Error::Undecidable(
            "product spectrum with a q-dyadic factor",
        )),
    }
}

/// `Eig` of the translation on the diagonal orbit closure of
/// `(x, x, ..., x)` under `R x R^2 x ... x R^k` for the rotation by `alpha`.
///
/// The closure is a coset of the subtorus traced by `(t, 2t, ..., kt)` (a
/// finite orbit when `alpha` is rational); characters `m` of `T^k` restrict
/// to eigenfunctions with eigenvalue `e(sum_i m_i i alpha)`.
pub fn diag_orbit_spectrum(alpha: &Frequency, k: u32) -> Result<SpectrumDescription> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1"));
    }
    let gens: Vec<Frequency> = (1..=k as i64).map(|i| alpha * i).collect();
    canonical(&gens)
}

/// Finite-N point mass of the spectral measure at `freq`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMassEstimate {
    pub freq: Frequency,
    pub mass: Complex64,
    pub n: u64,
}

fn orbit_values(
    sys: &SystemDescriptor,
    f: &Observable,
    start: &Point,
    count: u64,
) -> Result<Vec<Complex64>> {
    sys.check_point(start)?;
    (1..=count as i64)
        .map(|j| {
            let p = sys.iterate_unchecked(start, j)?;
            sys.evaluate_unchecked(f, &p)
        })
        .collect()
}

/// `c_n = (1/N) sum_{m=1}^N f(T^{m+n} x) conj(f(T^m x))` for `n < N`.
pub fn correlation_sequence(
    sys: &SystemDescriptor,
    f: &Observable,
    start: &Point,
    n: u64,
) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive"));
    }
    let v = orbit_values(sys, f, start, 2 * n - 1)?;
    let n = n as usize;
    Ok((0..n)
        .map(|lag| {
            let mut acc = ComplexSum::new();
            for m in 0..n {
                acc.add(v[m + lag] * v[m].conj());
            }
            acc.value() / n as f64
        })
        .collect())
}

/// `(1/N) sum_{n<N} corr[n] e(-n beta)`.
pub fn spectral_point_mass(
    corr: &[Complex64],
    beta: &Frequency,
    n: u64,
) -> Result<PointMassEstimate> {
    if n == 0 || n as usize > corr.len() {
        return Err(Error::InvalidArgument("N must lie in 1..=corr.len()"));
    }
    let mut acc = ComplexSum::new();
    for (i, c) in corr[..n as usize].iter().enumerate() {
        acc.add(c * numeric::e(-beta.mul_frac_unreduced(i as u64)));
    }
    Ok(PointMassEstimate {
        freq: beta.clone(),
        mass: acc.value() / n as f64,
        n,
    })
}

/// Same quantity as `spectral_point_mass(correlation_sequence(..))` in
/// `O(N)`: with `u_j = f(T^j x) e(-j beta)` the double sum factors as
/// `(1/N^2) sum_m conj(u_m) (u_m + ... + u_{m+N-1})`.
pub fn orbit_point_mass(
    sys: &SystemDescriptor,
    f: &Observable,
    start: &Point,
    beta: &Frequency,
    n: u64,
) -> Result<PointMassEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive"));
    }
    let v = orbit_values(sys, f, start, 2 * n - 1)?;
    Ok(PointMassEstimate {
        freq: beta.clone(),
        mass: twisted_mass(&v, beta, n as usize),
        n,
    })
}

fn twisted_mass(v: &[Complex64], beta: &Frequency, n: usize) -> Complex64 {
    let u: Vec<Complex64> = v
        .iter()
        .enumerate()
        .map(|(j, x)| x * numeric::e(-beta.mul_frac_unreduced(j as u64 + 1)))
        .collect();
    let mut prefix = Vec::with_capacity(u.len() + 1);
    let mut run = ComplexSum::new();
    prefix.push(Complex64::new(0.0, 0.0));
    for x in &u {
        run.add(*x);
        prefix.push(run.value());
    }
    let mut acc = ComplexSum::new();
    for m in 0..n {
        acc.add(u[m].conj() * (prefix[m + n] - prefix[m]));
    }
    acc.value() / (n as f64 * n as f64)
}

/// `beta` with its rational part reduced into `[0, 1)`.
pub fn reduce_mod_one(beta: &Frequency) -> Frequency {
    let r = beta.rational_part();
    beta - &Frequency::from_term(BasisTag::One, r.floor())
}

/// Candidate eigenfrequencies: `sum m_i g_i` with `|m_i| <= bound`, plus all
/// rationals `a/b` with `b <= max_den`, reduced modulo one.
pub fn scan_candidates(gens: &[Frequency], bound: i64, max_den: i64) -> Vec<Frequency> {
    let mut set = BTreeSet::new();
    let mut combos = vec![Frequency::zero()];
    for g in gens {
        let mut next = Vec::with_capacity(combos.len() * (2 * bound as usize + 1));
        for c in &combos {
            for m in -bound..=bound {
                next.push(c + &(g * m));
            }
        }
        combos = next;
    }
    for c in combos {
        set.insert(reduce_mod_one(&c));
    }
    for b in 1..=max_den {
        for a in 0..b {
            if a.gcd(&b) == 1 {
                set.insert(Frequency::rational(a, b));
            }
        }
    }
    set.into_iter().collect()
}

/// Characters with exponents in `{-1, 0, 1}` (nonzero), the symbol value on
/// q-multiplicative shifts, and tensors of these on products.
pub fn default_scan_observables(sys: &SystemDescriptor) -> Vec<Observable> {
    fn characters(d: usize) -> Vec<Observable> {
        let mut out = Vec::new();
        let total = 3usize.pow(d as u32);
        for code in 0..total {
            let mut m = Vec::with_capacity(d);
            let mut c = code;
            for _ in 0..d {
                m.push((c % 3) as i64 - 1);
                c /= 3;
            }
            if m.iter().any(|&x| x != 0) {
                out.push(Observable::Character(m));
            }
        }
        out
    }
    match sys {
        SystemDescriptor::FiniteRotation { orders, .. } => characters(orders.len()),
        SystemDescriptor::TorusRotation { alphas } => characters(alphas.len()),
        SystemDescriptor::SkewProduct { .. } | SystemDescriptor::Heisenberg { .. } => characters(2),
        SystemDescriptor::QMultShift(_) => vec![Observable::SymbolValue],
        SystemDescriptor::Product(l, r) => {
            let (lo, ro) = (default_scan_observables(l), default_scan_observables(r));
            let mut out = Vec::new();
            for a in core::iter::once(Observable::constant()).chain(lo.iter().cloned()) {
                for b in core::iter::once(Observable::constant()).chain(ro.iter().cloned()) {
                    if a != Observable::constant() || b != Observable::constant() {
                        out.push(Observable::tensor(a.clone(), b.clone()));
                    }
                }
            }
            out
        }
    }
}

/// Threshold on `|mass|` above which a candidate is reported.
pub const DETECTION_THRESHOLD: f64 = 0.5;

/// A candidate with a large point mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectedEigenvalue {
    pub freq: Frequency,
    /// Largest `|mass|` over the scanned observables.
    pub mass: f64,
    /// Exact membership in the constructive spectrum, when decidable.
    pub in_known_spectrum: Option<bool>,
}

/// Scans `candidates` for point masses of the spectral measures of
/// `observables` along the orbit of `start`.
pub fn eigenvalue_scan(
    sys: &SystemDescriptor,
    start: &Point,
    observables: &[Observable],
    candidates: &[Frequency],
    n: u64,
) -> Result<Vec<DetectedEigenvalue>> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive"));
    }
    let known = known_spectrum(sys)?;
    let orbits = observables
        .iter()
        .map(|f| orbit_values(sys, f, start, 2 * n - 1))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for beta in candidates {
        let mass = orbits
            .iter()
            .map(|v| twisted_mass(v, beta, n as usize).norm())
            .fold(0.0, f64::max);
        if mass >= DETECTION_THRESHOLD {
            out.push(DetectedEigenvalue {
                freq: beta.clone(),
                mass,
                in_known_spectrum: known.contains(beta).ok(),
            });
        }
    }
    Ok(out)
}

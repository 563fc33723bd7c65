//! Joinings of ergodic rotations on finite abelian groups, in exact
//! arithmetic.
//!
//! For ergodic rotations `(G1, a1)` and `(G2, a2)` the orbit closure of the
//! identity under the diagonal rotation is the cyclic subgroup `H` generated
//! by `(a1, a2)`. The ergodic joinings are the uniform measures on the cosets
//! of `H`, and `K = (G1 x G2) / H` is the largest common factor.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::spectrum::{known_spectrum, kronecker_disjoint};
use crate::systems::SystemDescriptor;

/// Largest supported order of a single factor.
pub const MAX_ORDER: u64 = 360;

/// `Z/orders[0] x Z/orders[1] x ...`, elements indexed in mixed radix (last
/// coordinate fastest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    orders: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        if orders.contains(&0) {
            return Err(Error::InvalidArgument("group orders must be positive"));
        }
        Ok(FiniteAbelianGroup { orders })
    }

    pub fn cyclic(n: u64) -> Self {
        FiniteAbelianGroup { orders: vec![n] }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn index_of(&self, x: &[u64]) -> usize {
        x.iter()
            .zip(&self.orders)
            .fold(0usize, |acc, (&v, &o)| acc * o as usize + v as usize)
    }

    pub fn element(&self, mut idx: usize) -> Vec<u64> {
        let mut out = vec![0; self.orders.len()];
        for (slot, &o) in out.iter_mut().zip(&self.orders).rev() {
            *slot = (idx % o as usize) as u64;
            idx /= o as usize;
        }
        out
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter()
            .zip(y)
            .zip(&self.orders)
            .map(|((a, b), o)| (a + b) % o)
            .collect()
    }

    pub fn neg(&self, x: &[u64]) -> Vec<u64> {
        x.iter()
            .zip(&self.orders)
            .map(|(a, o)| (o - a) % o)
            .collect()
    }

    pub fn identity(&self) -> Vec<u64> {
        vec![0; self.orders.len()]
    }

    /// Order of the element `x`.
    pub fn element_order(&self, x: &[u64]) -> u64 {
        x.iter()
            .zip(&self.orders)
            .fold(1u64, |acc, (&a, &o)| acc.lcm(&(o / o.gcd(&a))))
    }

    fn product_with(&self, other: &FiniteAbelianGroup) -> FiniteAbelianGroup {
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        FiniteAbelianGroup { orders }
    }
}

/// An ergodic rotation `x -> x + step` on a finite abelian group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rotation {
    group: FiniteAbelianGroup,
    step: Vec<u64>,
}

impl Rotation {
    /// Rejects steps that do not generate the group.
    pub fn new(orders: Vec<u64>, step: Vec<u64>) -> Result<Self> {
        if orders.is_empty() || orders.len() != step.len() {
            return Err(Error::InvalidArgument(
                "orders and step must have the same non-zero length",
            ));
        }
        if let Some(&o) = orders.iter().find(|&&o| o > MAX_ORDER) {
            return Err(Error::OrderTooLarge(o));
        }
        let group = FiniteAbelianGroup::new(orders)?;
        if group.order() > MAX_ORDER {
            return Err(Error::OrderTooLarge(group.order()));
        }
        let step: Vec<u64> = step
            .iter()
            .zip(group.orders())
            .map(|(s, o)| s % o)
            .collect();
        if group.element_order(&step) != group.order() {
            return Err(Error::NonErgodicRotation);
        }
        Ok(Rotation { group, step })
    }

    pub fn cyclic(n: u64, step: u64) -> Result<Self> {
        Rotation::new(vec![n], vec![step])
    }

    pub fn from_system(sys: &SystemDescriptor) -> Result<Self> {
        match sys {
            SystemDescriptor::FiniteRotation { orders, step } => {
                Rotation::new(orders.clone(), step.clone())
            }
            _ => Err(Error::InvalidArgument(
                "joinings are computed for finite rotations only",
            )),
        }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn step(&self) -> &[u64] {
        &self.step
    }

    pub fn order(&self) -> u64 {
        self.group.order()
    }

    pub fn to_system(&self) -> SystemDescriptor {
        SystemDescriptor::FiniteRotation {
            orders: self.group.orders.clone(),
            step: self.step.clone(),
        }
    }
}

/// A subgroup of `X x Y`, stored as sorted element indices of the product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    pub generators: Vec<Vec<u64>>,
    pub elements: Vec<usize>,
    pub index: u64,
}

/// Group and step of the diagonal rotation on `X x Y`.
fn diagonal(x: &Rotation, y: &Rotation) -> (FiniteAbelianGroup, Vec<u64>) {
    let g = x.group.product_with(&y.group);
    let mut step = x.step.clone();
    step.extend_from_slice(&y.step);
    (g, step)
}

/// The cyclic subgroup `H` generated by `(a1, a2)`.
pub fn orbit_subgroup(x: &Rotation, y: &Rotation) -> Subgroup {
    let (g, step) = diagonal(x, y);
    let mut elements = Vec::new();
    let mut cur = g.identity();
    loop {
        elements.push(g.index_of(&cur));
        cur = g.add(&cur, &step);
        if cur.iter().all(|&v| v == 0) {
            break;
        }
    }
    elements.sort_unstable();
    Subgroup {
        generators: vec![step],
        index: g.order() / elements.len() as u64,
        elements,
    }
}

/// `K = (X x Y) / H` with the maps `alpha(x) = (x, 0) + H` and
/// `beta(y) = (0, -y) + H`. Cosets are labelled `j` for `(j a1, 0) + H`,
/// so the induced rotation on `K = Z/|K|` is `k -> k + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointQuotient {
    pub k: FiniteAbelianGroup,
    /// Coset label of every element of `X x Y`.
    pub labels: Vec<u64>,
    pub alpha: Vec<u64>,
    pub beta: Vec<u64>,
}

impl JointQuotient {
    /// `gamma(x, y) = alpha(x) - beta(y)`.
    pub fn gamma(&self, xi: usize, yi: usize) -> u64 {
        let k = self.k.order();
        (self.alpha[xi] + k - self.beta[yi]) % k
    }
}

pub fn joint_kronecker_quotient(x: &Rotation, y: &Rotation) -> Result<JointQuotient> {
    let (g, step) = diagonal(x, y);
    let h = orbit_subgroup(x, y);
    let kord = h.index;
    let total = g.order() as usize;
    let mut labels = vec![u64::MAX; total];
    let mut rep = g.identity();
    let a1_only: Vec<u64> = x.step.iter().copied().chain(y.group.identity()).collect();
    for j in 0..kord {
        for &hi in &h.elements {
            let e = g.add(&rep, &g.element(hi));
            let idx = g.index_of(&e);
            if labels[idx] != u64::MAX {
                return Err(Error::InvalidArgument("coset labelling is inconsistent"));
            }
            labels[idx] = j;
        }
        rep = g.add(&rep, &a1_only);
    }
    if labels.contains(&u64::MAX) {
        return Err(Error::InvalidArgument("cosets do not cover the group"));
    }
    // Cosets are invariant under the diagonal rotation and shifted by one
    // under the induced rotation.
    for i in 0..total {
        let e = g.element(i);
        if labels[g.index_of(&g.add(&e, &step))] != labels[i] {
            return Err(Error::InvalidArgument("cosets are not invariant"));
        }
        let moved = g.index_of(&g.add(&e, &a1_only));
        if labels[moved] != (labels[i] + 1) % kord {
            return Err(Error::InvalidArgument(
                "induced rotation is not a shift of labels",
            ));
        }
    }
    let ny = y.order() as usize;
    let alpha: Vec<u64> = (0..x.order() as usize).map(|xi| labels[xi * ny]).collect();
    let beta: Vec<u64> = (0..ny)
        .map(|yi| {
            let neg = y.group.neg(&y.group.element(yi));
            labels[y.group.index_of(&neg)]
        })
        .collect();
    let quotient = JointQuotient {
        k: FiniteAbelianGroup::cyclic(kord),
        labels,
        alpha,
        beta,
    };
    check_factor_maps(x, y, &quotient)?;
    Ok(quotient)
}

fn check_factor_maps(x: &Rotation, y: &Rotation, q: &JointQuotient) -> Result<()> {
    let k = q.k.order();
    let mut seen_a = vec![false; k as usize];
    for xi in 0..x.order() as usize {
        let next = x
            .group
            .index_of(&x.group.add(&x.group.element(xi), &x.step));
        if q.alpha[next] != (q.alpha[xi] + 1) % k {
            return Err(Error::InvalidArgument("alpha is not equivariant"));
        }
        seen_a[q.alpha[xi] as usize] = true;
    }
    let mut seen_b = vec![false; k as usize];
    for yi in 0..y.order() as usize {
        let next = y
            .group
            .index_of(&y.group.add(&y.group.element(yi), &y.step));
        if q.beta[next] != (q.beta[yi] + 1) % k {
            return Err(Error::InvalidArgument("beta is not equivariant"));
        }
        seen_b[q.beta[yi] as usize] = true;
    }
    if seen_a.contains(&false) || seen_b.contains(&false) {
        return Err(Error::InvalidArgument("factor map is not surjective"));
    }
    Ok(())
}

/// A probability measure on `X x Y`, stored densely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Joining {
    pub nx: usize,
    pub ny: usize,
    pub weights: Vec<Ratio<u64>>,
}

impl Joining {
    pub fn weight(&self, xi: usize, yi: usize) -> Ratio<u64> {
        self.weights[xi * self.ny + yi]
    }

    pub fn is_product_measure(&self) -> bool {
        let u = Ratio::new(1, (self.nx * self.ny) as u64);
        self.weights.iter().all(|&w| w == u)
    }

    pub fn total_mass(&self) -> Ratio<u64> {
        self.weights.iter().fold(Ratio::zero(), |acc, &w| acc + w)
    }

    /// Both marginals are uniform.
    pub fn has_uniform_marginals(&self) -> bool {
        let ux = Ratio::new(1, self.nx as u64);
        let uy = Ratio::new(1, self.ny as u64);
        let rows_ok = (0..self.nx)
            .all(|xi| (0..self.ny).fold(Ratio::zero(), |a, yi| a + self.weight(xi, yi)) == ux);
        let cols_ok = (0..self.ny)
            .all(|yi| (0..self.nx).fold(Ratio::zero(), |a, xi| a + self.weight(xi, yi)) == uy);
        rows_ok && cols_ok
    }

    /// Invariant under `(x, y) -> (x + a1, y + a2)`.
    pub fn is_invariant(&self, x: &Rotation, y: &Rotation) -> bool {
        (0..self.nx).all(|xi| {
            let xn = x
                .group
                .index_of(&x.group.add(&x.group.element(xi), &x.step));
            (0..self.ny).all(|yi| {
                let yn = y
                    .group
                    .index_of(&y.group.add(&y.group.element(yi), &y.step));
                self.weight(xi, yi) == self.weight(xn, yn)
            })
        })
    }

    pub fn is_joining_of(&self, x: &Rotation, y: &Rotation) -> bool {
        self.nx == x.order() as usize
            && self.ny == y.order() as usize
            && self.total_mass().is_one()
            && self.has_uniform_marginals()
            && self.is_invariant(x, y)
    }
}

/// The uniform measures on the cosets of `H`, in label order.
pub fn ergodic_joinings(x: &Rotation, y: &Rotation) -> Result<Vec<Joining>> {
    let q = joint_kronecker_quotient(x, y)?;
    let h = orbit_subgroup(x, y);
    let w = Ratio::new(1u64, h.elements.len() as u64);
    let (nx, ny) = (x.order() as usize, y.order() as usize);
    let out: Vec<Joining> = (0..q.k.order())
        .map(|j| Joining {
            nx,
            ny,
            weights: q
                .labels
                .iter()
                .map(|&l| if l == j { w } else { Ratio::zero() })
                .collect(),
        })
        .collect();
    if out.iter().any(|j| !j.is_joining_of(x, y)) {
        return Err(Error::InvalidArgument(
            "coset measure failed the joining checks",
        ));
    }
    Ok(out)
}

/// `(1/|K|) sum_k lambda_k` equals the product measure.
pub fn verify_ergodic_decomposition(x: &Rotation, y: &Rotation) -> Result<bool> {
    let js = ergodic_joinings(x, y)?;
    let kinv = Ratio::new(1u64, js.len() as u64);
    let total = (x.order() * y.order()) as usize;
    let u = Ratio::new(1u64, total as u64);
    Ok((0..total).all(|i| {
        js.iter()
            .fold(Ratio::zero(), |acc, j| acc + j.weights[i] * kinv)
            == u
    }))
}

/// `mu_X x mu_Y` is the only joining.
pub fn disjoint(x: &Rotation, y: &Rotation) -> Result<bool> {
    Ok(ergodic_joinings(x, y)?.len() == 1)
}

pub fn common_factor(x: &Rotation, y: &Rotation) -> Result<FiniteAbelianGroup> {
    Ok(joint_kronecker_quotient(x, y)?.k)
}

/// Number of orbits of the diagonal rotation on `X x Y`. Invariant 0/1
/// functions are unions of orbits, so there are `2^orbits` of them and the
/// product is ergodic iff that count is 2.
pub fn diagonal_orbit_count(x: &Rotation, y: &Rotation) -> u64 {
    let (g, step) = diagonal(x, y);
    let total = g.order() as usize;
    let mut seen = vec![false; total];
    let mut orbits = 0;
    for s in 0..total {
        if seen[s] {
            continue;
        }
        orbits += 1;
        let mut cur = g.element(s);
        loop {
            let i = g.index_of(&cur);
            if seen[i] {
                break;
            }
            seen[i] = true;
            cur = g.add(&cur, &step);
        }
    }
    orbits
}

/// `2^orbits`, or `None` past `u128`.
pub fn invariant_indicator_count(x: &Rotation, y: &Rotation) -> Option<u128> {
    1u128.checked_shl(u32::try_from(diagonal_orbit_count(x, y)).ok()?)
}

pub fn product_ergodic(x: &Rotation, y: &Rotation) -> bool {
    invariant_indicator_count(x, y) == Some(2)
}

type Q = Ratio<i128>;

/// Solution set of `A p = b` over the rationals: `None` when inconsistent,
/// otherwise a particular solution and the nullity.
fn solve(mut rows: Vec<Vec<Q>>, ncols: usize) -> Option<(Vec<Q>, usize)> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(p, r);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v *= inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c];
                let pivot_row = rows[r].clone();
                for (v, pv) in rows[i].iter_mut().zip(pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[ncols].is_zero()) {
        return None;
    }
    let mut sol = vec![Q::zero(); ncols];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = rows[i][ncols];
    }
    Some((sol, ncols - pivots.len()))
}

/// The only joining that projects to the product of the two Kronecker
/// factors is the product joining. Rotations are their own Kronecker
/// factors, so this asks which convex combinations `sum p_k lambda_k` of
/// the ergodic joinings equal the product measure; the answer must be the
/// single point `p = (1/|K|, ...)`.
pub fn quasi_disjoint(x: &Rotation, y: &Rotation) -> Result<bool> {
    let js = ergodic_joinings(x, y)?;
    let k = js.len();
    let total = (x.order() * y.order()) as usize;
    let u = Q::new(1, total as i128);
    let to_q = |r: Ratio<u64>| Q::new(*r.numer() as i128, *r.denom() as i128);
    let mut eqs: BTreeSet<Vec<Q>> = BTreeSet::new();
    for i in 0..total {
        let mut row: Vec<Q> = js.iter().map(|j| to_q(j.weights[i])).collect();
        row.push(u);
        eqs.insert(row);
    }
    let mut normalisation = vec![Q::one(); k];
    normalisation.push(Q::one());
    eqs.insert(normalisation);
    let Some((p, nullity)) = solve(eqs.into_iter().collect(), k) else {
        return Ok(false);
    };
    if nullity != 0 || p.iter().any(|v| *v < Q::zero()) {
        return Ok(false);
    }
    let mixed: Vec<Q> = (0..total)
        .map(|i| {
            js.iter()
                .zip(&p)
                .fold(Q::zero(), |acc, (j, pk)| acc + to_q(j.weights[i]) * pk)
        })
        .collect();
    Ok(mixed.iter().all(|&v| v == u))
}

/// For every `k in K`, exactly one ergodic joining gives full measure to
/// the fibre `gamma^{-1}(k)`.
pub fn bqd_check(x: &Rotation, y: &Rotation) -> Result<bool> {
    let q = joint_kronecker_quotient(x, y)?;
    let js = ergodic_joinings(x, y)?;
    let (nx, ny) = (x.order() as usize, y.order() as usize);
    for k in 0..q.k.order() {
        let count = js
            .iter()
            .filter(|j| {
                let mass = (0..nx).fold(Ratio::zero(), |acc, xi| {
                    (0..ny)
                        .filter(|&yi| q.gamma(xi, yi) == k)
                        .fold(acc, |a, yi| a + j.weight(xi, yi))
                });
                mass.is_one()
            })
            .count();
        if count != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All predicates for one pair of rotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairReport {
    pub x_orders: Vec<u64>,
    pub x_step: Vec<u64>,
    pub y_orders: Vec<u64>,
    pub y_step: Vec<u64>,
    pub ergodic_joining_count: usize,
    pub disjoint: bool,
    pub trivial_common_factor: bool,
    pub product_ergodic: bool,
    pub kronecker_disjoint: bool,
    pub quasi_disjoint: bool,
    pub bqd: bool,
    pub decomposition_exact: bool,
}

impl PairReport {
    /// The equivalent characterisations of disjointness agree, both
    /// quasi-disjointness predicates hold, and the decomposition is exact.
    pub fn consistent(&self) -> bool {
        self.disjoint == self.trivial_common_factor
            && self.disjoint == self.product_ergodic
            && self.disjoint == self.kronecker_disjoint
            && self.quasi_disjoint
            && self.bqd
            && self.decomposition_exact
    }
}

pub fn analyse_pair(x: &Rotation, y: &Rotation) -> Result<PairReport> {
    let js = ergodic_joinings(x, y)?;
    Ok(PairReport {
        x_orders: x.group.orders.clone(),
        x_step: x.step.clone(),
        y_orders: y.group.orders.clone(),
        y_step: y.step.clone(),
        ergodic_joining_count: js.len(),
        disjoint: disjoint(x, y)?,
        trivial_common_factor: common_factor(x, y)?.is_trivial(),
        product_ergodic: product_ergodic(x, y),
        kronecker_disjoint: kronecker_disjoint(
            &known_spectrum(&x.to_system())?,
            &known_spectrum(&y.to_system())?,
        )?,
        quasi_disjoint: quasi_disjoint(x, y)?,
        bqd: bqd_check(x, y)?,
        decomposition_exact: verify_ergodic_decomposition(x, y)?,
    })
}

/// Cyclic rotations `(Z/n, 1)` for `2 <= n <= max_order`, all ordered pairs.
/// With `all_generators`, every generator of each `Z/n` is used as a step.
pub fn sweep(max_order: u64, all_generators: bool) -> Result<Vec<PairReport>> {
    if max_order > MAX_ORDER {
        return Err(Error::OrderTooLarge(max_order));
    }
    let mut rotations = Vec::new();
    for n in 2..=max_order {
        if all_generators {
            for s in (1..n).filter(|s| s.gcd(&n) == 1) {
                rotations.push(Rotation::cyclic(n, s)?);
            }
        } else {
            rotations.push(Rotation::cyclic(n, 1)?);
        }
    }
    let mut out = Vec::with_capacity(rotations.len() * rotations.len());
    for x in &rotations {
        for y in &rotations {
            out.push(analyse_pair(x, y)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_subgroup_examples() {
        let h = orbit_subgroup(
            &Rotation::cyclic(4, 1).unwrap(),
            &Rotation::cyclic(6, 1).unwrap(),
        );
        assert_eq!((h.elements.len(), h.index), (12, 2));
        let h = orbit_subgroup(
            &Rotation::cyclic(4, 1).unwrap(),
            &Rotation::cyclic(9, 1).unwrap(),
        );
        assert_eq!(h.index, 1);
        let h = orbit_subgroup(
            &Rotation::cyclic(1, 0).unwrap(),
            &Rotation::cyclic(5, 1).unwrap(),
        );
        assert_eq!((h.elements.len(), h.index), (5, 1));
    }

    #[test]
    fn rejects_non_ergodic_and_large() {
        assert_eq!(Rotation::cyclic(6, 2), Err(Error::NonErgodicRotation));
        assert_eq!(Rotation::cyclic(361, 1), Err(Error::OrderTooLarge(361)));
        assert_eq!(
            Rotation::new(vec![2, 2], vec![1, 1]),
            Err(Error::NonErgodicRotation)
        );
        assert!(Rotation::new(vec![2, 3], vec![1, 1]).is_ok());
    }

    #[test]
    fn z2_self_joinings() {
        let x = Rotation::cyclic(2, 1).unwrap();
        let js = ergodic_joinings(&x, &x).unwrap();
        let half = Ratio::new(1, 2);
        assert_eq!(js.len(), 2);
        assert_eq!(
            js[0].weights,
            vec![half, Ratio::zero(), Ratio::zero(), half]
        );
        assert_eq!(
            js[1].weights,
            vec![Ratio::zero(), half, half, Ratio::zero()]
        );
    }

    #[test]
    fn common_factor_examples() {
        let c = |a, b| {
            common_factor(
                &Rotation::cyclic(a, 1).unwrap(),
                &Rotation::cyclic(b, 1).unwrap(),
            )
            .unwrap()
        };
        assert_eq!(c(4, 6).order(), 2);
        assert_eq!(c(4, 9).order(), 1);
        assert_eq!(c(6, 15).order(), 3);
        assert_eq!(c(7, 7).order(), 7);
    }

    #[test]
    fn solver_detects_free_directions() {
        let q = |n| Q::from_integer(n);
        let rows = vec![vec![q(1), q(1), q(1)]];
        assert_eq!(solve(rows, 2), Some((vec![q(1), q(0)], 1)));
        let rows = vec![vec![q(1), q(1)], vec![q(1), q(2)]];
        assert_eq!(solve(rows, 1), None);
    }

    #[test]
    fn non_cyclic_presentation() {
        let x = Rotation::new(vec![2, 3], vec![1, 1]).unwrap();
        let y = Rotation::cyclic(6, 1).unwrap();
        let r = analyse_pair(&x, &y).unwrap();
        assert_eq!(r.ergodic_joining_count, 6);
        assert!(r.consistent());
    }
}

//! The chart algebras `R_i = k[t]⟨x_i, y_i⟩/(x_i y_i − y_i x_i − t_0)` and
//! their overlaps, in PBW normal form `Σ c_{l,m} x^l y^m` (x-powers left).
//!
//! The overlap of charts `i` and `i+1` is the same ring seen in two
//! coordinate systems, glued by
//!
//! ```text
//! x_{i+1} = x_i² y_i + t_{i+1} x_i,    y_{i+1} = x_i^{-1}
//! x_i = y_{i+1}^{-1},                  y_i = y_{i+1}² x_{i+1} − t_{i+1} y_{i+1}
//! ```
//!
//! [`ChartKind::Overlap`] uses chart-`i` generators (`x_i` invertible) and
//! [`ChartKind::OverlapUpper`] uses chart-`(i+1)` generators (`y_{i+1}`
//! invertible).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::cyclotomic::CycNumber;
use crate::param::{Exponents, ParamPoly, ParamSystem};
use crate::{Error, Rational, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChartKind {
    /// `R_i`
    Chart(usize),
    /// `R_{i,i+1}` in chart-`i` generators
    Overlap(usize),
    /// `R_{i,i+1}` in chart-`(i+1)` generators
    OverlapUpper(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChartRing {
    pub kind: ChartKind,
    pub n: usize,
}

impl ChartRing {
    pub fn chart(n: usize, i: usize) -> Result<Self> {
        if i > n {
            return Err(Error::IndexOutOfRange { what: "chart", index: i as i64, n });
        }
        Ok(ChartRing { kind: ChartKind::Chart(i), n })
    }

    pub fn overlap(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::IndexOutOfRange { what: "overlap", index: i as i64, n });
        }
        Ok(ChartRing { kind: ChartKind::Overlap(i), n })
    }

    pub fn overlap_upper(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::IndexOutOfRange { what: "overlap", index: i as i64, n });
        }
        Ok(ChartRing { kind: ChartKind::OverlapUpper(i), n })
    }

    /// Index of the chart whose generators `x, y` denote.
    pub fn coordinate_chart(&self) -> usize {
        match self.kind {
            ChartKind::Chart(i) | ChartKind::Overlap(i) => i,
            ChartKind::OverlapUpper(i) => i + 1,
        }
    }

    pub fn allows_negative_x(&self) -> bool {
        matches!(self.kind, ChartKind::Overlap(_))
    }

    pub fn allows_negative_y(&self) -> bool {
        matches!(self.kind, ChartKind::OverlapUpper(_))
    }

    /// Weight of `x` in the torus grading `wt(x_i) = 1 − n + 2i`,
    /// `wt(y_i) = n + 1 − 2i`, `wt(t_k) = 2`, which the relation and both
    /// gluing rules respect.
    pub fn x_weight(&self) -> i64 {
        1 - self.n as i64 + 2 * self.coordinate_chart() as i64
    }

    pub fn y_weight(&self) -> i64 {
        self.n as i64 + 1 - 2 * self.coordinate_chart() as i64
    }

    fn admits(&self, l: i64, m: i64) -> bool {
        (l >= 0 || self.allows_negative_x()) && (m >= 0 || self.allows_negative_y())
    }
}

impl fmt::Display for ChartRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ChartKind::Chart(i) => write!(f, "R_{i}"),
            ChartKind::Overlap(i) => write!(f, "R_{{{i},{}}}[chart {i}]", i + 1),
            ChartKind::OverlapUpper(i) => write!(f, "R_{{{i},{}}}[chart {}]", i + 1, i + 1),
        }
    }
}

/// Element `Σ c_{l,m} x^l y^m` of a chart or overlap algebra, coefficients in
/// `k[t_0..t_n]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ChartElement {
    ring: ChartRing,
    terms: BTreeMap<(i64, i64), ParamPoly>,
}

/// `Π_{j<k} (c − j)`.
fn falling(c: i64, k: i64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, j| acc * BigInt::from(c - j))
}

fn binom(b: i64, k: i64) -> BigInt {
    if k < 0 || k > b {
        return BigInt::from(0);
    }
    falling(b, k) / falling(k, k)
}

impl ChartElement {
    pub fn zero(ring: ChartRing) -> Self {
        ChartElement { ring, terms: BTreeMap::new() }
    }

    pub fn one(ring: ChartRing) -> Self {
        Self::constant(ring, ParamPoly::one(ParamSystem::T, ring.n))
    }

    pub fn constant(ring: ChartRing, c: ParamPoly) -> Self {
        Self::monomial(ring, 0, 0, c).expect("constants lie in every ring")
    }

    pub fn from_int(ring: ChartRing, k: i64) -> Self {
        Self::constant(ring, ParamPoly::from_int(ParamSystem::T, ring.n, k))
    }

    pub fn t(ring: ChartRing, k: usize) -> Self {
        Self::constant(ring, ParamPoly::var(ParamSystem::T, ring.n, k))
    }

    pub fn x(ring: ChartRing) -> Self {
        Self::x_pow(ring, 1)
    }

    pub fn y(ring: ChartRing) -> Self {
        Self::y_pow(ring, 1)
    }

    /// `x^l`; negative `l` only in [`ChartKind::Overlap`]. Panics otherwise;
    /// use [`ChartElement::monomial`] for a checked version.
    pub fn x_pow(ring: ChartRing, l: i64) -> Self {
        Self::monomial(ring, l, 0, ParamPoly::one(ParamSystem::T, ring.n)).expect("x power")
    }

    pub fn y_pow(ring: ChartRing, m: i64) -> Self {
        Self::monomial(ring, 0, m, ParamPoly::one(ParamSystem::T, ring.n)).expect("y power")
    }

    /// `c · x^l y^m`.
    pub fn monomial(ring: ChartRing, l: i64, m: i64, c: ParamPoly) -> Result<Self> {
        c.expect_system(ParamSystem::T)?;
        if !ring.admits(l, m) {
            return Err(Error::InverseNotAllowed { ring });
        }
        let mut e = Self::zero(ring);
        e.add_term(l, m, c);
        Ok(e)
    }

    pub fn ring(&self) -> ChartRing {
        self.ring
    }

    pub fn n(&self) -> usize {
        self.ring.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&(0, 0)).is_some_and(ParamPoly::is_one)
    }

    /// Terms in increasing `(l, m)` order.
    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &ParamPoly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, l: i64, m: i64) -> Option<&ParamPoly> {
        self.terms.get(&(l, m))
    }

    pub fn add_term(&mut self, l: i64, m: i64, c: ParamPoly) {
        debug_assert!(self.ring.admits(l, m), "monomial x^{l} y^{m} not in {:?}", self.ring);
        if c.is_zero() {
            return;
        }
        match self.terms.entry((l, m)) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign_ref(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same(&self, other: &ChartElement) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch { left: self.ring, right: other.ring })
        }
    }

    pub fn add(&self, other: &ChartElement) -> Result<ChartElement> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (&(l, m), c) in &other.terms {
            out.add_term(l, m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ChartElement) -> Result<ChartElement> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ChartElement {
        ChartElement {
            ring: self.ring,
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn scale(&self, c: &ParamPoly) -> ChartElement {
        let mut out = Self::zero(self.ring);
        for (&(l, m), a) in &self.terms {
            out.add_term(l, m, a * c);
        }
        out
    }

    pub fn scale_cyc(&self, c: &CycNumber) -> ChartElement {
        let mut out = Self::zero(self.ring);
        for (&(l, m), a) in &self.terms {
            out.add_term(l, m, a.scale(c));
        }
        out
    }

    /// Product of two monomials `x^a y^b · x^c y^d` in normal form.
    ///
    /// Uses `y^b x^c = Σ_k C(b,k) (c)_k (−t_0)^k x^{c−k} y^{b−k}` when `b ≥ 0`
    /// (valid for every integer `c`), and the mirror formula with the roles
    /// of `b` and `c` swapped when `c ≥ 0` and `b < 0`.
    fn mul_monomials(&self, (a, b): (i64, i64), (c, d): (i64, i64), out: &mut ChartElement, coef: &ParamPoly) {
        let n = self.ring.n;
        let kmax = if b >= 0 && c >= 0 {
            b.min(c)
        } else if b >= 0 {
            b
        } else {
            assert!(c >= 0, "y^{b} x^{c} has no finite normal form");
            c
        };
        let neg_t0 = ParamPoly::linear(ParamSystem::T, n, &{
            let mut v = alloc::vec![0; n + 1];
            v[0] = -1;
            v
        });
        let mut tpow = ParamPoly::one(ParamSystem::T, n);
        for k in 0..=kmax {
            let num = if b >= 0 { binom(b, k) * falling(c, k) } else { binom(c, k) * falling(b, k) };
            if num != BigInt::from(0) {
                let q = CycNumber::from_rational(n as u32 + 1, Rational::from_integer(num));
                out.add_term(a + c - k, b + d - k, (&tpow * coef).scale(&q));
            }
            tpow = &tpow * &neg_t0;
        }
    }

    /// Product in a common ring. Elements of a chart and of an adjacent
    /// overlap are first brought into the overlap (see [`ChartElement::embed`]).
    pub fn mul(&self, other: &ChartElement) -> Result<ChartElement> {
        if self.ring != other.ring {
            if let Ok(b) = other.embed(self.ring) {
                return self.mul(&b);
            }
            let a = self.embed(other.ring)?;
            return a.mul(other);
        }
        let mut out = Self::zero(self.ring);
        if self.is_zero() || other.is_zero() {
            return Ok(out);
        }
        for (&ka, ca) in &self.terms {
            for (&kb, cb) in &other.terms {
                let c = ca * cb;
                self.mul_monomials(ka, kb, &mut out, &c);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> ChartElement {
        let mut acc = Self::one(self.ring);
        for _ in 0..e {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Maps into `target`: inclusion of a chart into an overlap containing
    /// it (converting coordinates where needed), or restriction of an overlap
    /// element to a chart when it has no inverted powers.
    pub fn embed(&self, target: ChartRing) -> Result<ChartElement> {
        use ChartKind::*;
        if self.ring == target {
            return Ok(self.clone());
        }
        if self.ring.n != target.n {
            return Err(Error::RingMismatch { left: self.ring, right: target });
        }
        let mismatch = || Error::RingMismatch { left: self.ring, right: target };
        match (self.ring.kind, target.kind) {
            (Chart(i), Overlap(j)) if i == j => Ok(self.relabel(target)),
            (Chart(i), OverlapUpper(j)) if i == j + 1 => Ok(self.relabel(target)),
            (Chart(i), Overlap(j)) if i == j + 1 => self.to_lower(),
            (Chart(i), OverlapUpper(j)) if i == j => self.to_upper(),
            (Overlap(i), OverlapUpper(j)) if i == j => self.to_upper(),
            (OverlapUpper(i), Overlap(j)) if i == j => self.to_lower(),
            (Overlap(i), Chart(j)) if i == j => self.restrict(target),
            (OverlapUpper(i), Chart(j)) if i + 1 == j => self.restrict(target),
            (Overlap(i), Chart(j)) if i + 1 == j => self.to_upper()?.restrict(target),
            (OverlapUpper(i), Chart(j)) if i == j => self.to_lower()?.restrict(target),
            _ => Err(mismatch()),
        }
    }

    fn relabel(&self, ring: ChartRing) -> ChartElement {
        ChartElement { ring, terms: self.terms.clone() }
    }

    fn restrict(&self, target: ChartRing) -> Result<ChartElement> {
        if let Some((l, m)) = self.terms.keys().find(|&&(l, m)| !target.admits(l, m)) {
            return Err(Error::NotInRing {
                ring: target,
                detail: format!("term x^{l} y^{m} has an inverted power"),
            });
        }
        Ok(self.relabel(target))
    }

    /// Rewrites an element of `R_{i+1}` (or of the overlap in chart-`(i+1)`
    /// generators) in chart-`i` generators of `R_{i,i+1}`:
    /// `x_{i+1} ↦ x_i² y_i + t_{i+1} x_i`, `y_{i+1} ↦ x_i^{-1}`.
    pub fn to_lower(&self) -> Result<ChartElement> {
        let n = self.ring.n;
        let i = match self.ring.kind {
            ChartKind::Chart(j) if j >= 1 => j - 1,
            ChartKind::OverlapUpper(i) => i,
            ChartKind::Overlap(_) => return Ok(self.clone()),
            _ => return Err(Error::RingMismatch { left: self.ring, right: self.ring }),
        };
        let target = ChartRing::overlap(n, i)?;
        let big_x = ChartElement::monomial(target, 2, 1, ParamPoly::one(ParamSystem::T, n))?
            .add(&ChartElement::x(target).scale(&ParamPoly::var(ParamSystem::T, n, i + 1)))?;
        let mut xpows: Vec<ChartElement> = alloc::vec![ChartElement::one(target)];
        let mut out = ChartElement::zero(target);
        for (&(l, m), c) in &self.terms {
            debug_assert!(l >= 0);
            while xpows.len() <= l as usize {
                let next = xpows.last().unwrap().mul(&big_x)?;
                xpows.push(next);
            }
            // X^l · x^{-m}
            let img = xpows[l as usize].mul(&ChartElement::x_pow(target, -m))?;
            out = out.add(&img.scale(c))?;
        }
        Ok(out)
    }

    /// Rewrites an element of `R_i` (or of the overlap in chart-`i`
    /// generators) in chart-`(i+1)` generators:
    /// `x_i ↦ y_{i+1}^{-1}`, `y_i ↦ x_{i+1} y_{i+1}² − (2t_0 + t_{i+1}) y_{i+1}`.
    pub fn to_upper(&self) -> Result<ChartElement> {
        let n = self.ring.n;
        let i = match self.ring.kind {
            ChartKind::Chart(j) if j < n => j,
            ChartKind::Overlap(i) => i,
            ChartKind::OverlapUpper(_) => return Ok(self.clone()),
            _ => return Err(Error::RingMismatch { left: self.ring, right: self.ring }),
        };
        let target = ChartRing::overlap_upper(n, i)?;
        let mut lin = alloc::vec![0i64; n + 1];
        lin[0] = -2;
        lin[i + 1] -= 1;
        let big_y = ChartElement::monomial(target, 1, 2, ParamPoly::one(ParamSystem::T, n))?
            .add(&ChartElement::y(target).scale(&ParamPoly::linear(ParamSystem::T, n, &lin)))?;
        let mut ypows: Vec<ChartElement> = alloc::vec![ChartElement::one(target)];
        let mut out = ChartElement::zero(target);
        for (&(l, m), c) in &self.terms {
            debug_assert!(m >= 0);
            while ypows.len() <= m as usize {
                let next = ypows.last().unwrap().mul(&big_y)?;
                ypows.push(next);
            }
            let img = ChartElement::y_pow(target, -l).mul(&ypows[m as usize])?;
            out = out.add(&img.scale(c))?;
        }
        Ok(out)
    }

    /// `l − m` if every term has the same value, with `deg x = 1`,
    /// `deg y = −1`, `deg t = 0`.
    pub fn principal_degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|&(l, m)| l - m);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Largest `l + m` over the terms (`deg x = deg y = 1`).
    pub fn filtration_degree(&self) -> Option<i64> {
        self.terms.keys().map(|&(l, m)| l + m).max()
    }

    /// The terms of top filtration degree.
    pub fn leading_part(&self) -> ChartElement {
        let Some(top) = self.filtration_degree() else {
            return self.clone();
        };
        self.filter(|l, m, _| l + m == top)
    }

    /// Splits into principal-degree-homogeneous parts.
    pub fn principal_parts(&self) -> BTreeMap<i64, ChartElement> {
        let mut parts: BTreeMap<i64, ChartElement> = BTreeMap::new();
        for (&(l, m), c) in &self.terms {
            parts.entry(l - m).or_insert_with(|| ChartElement::zero(self.ring)).add_term(l, m, c.clone());
        }
        parts
    }

    /// Keeps the terms satisfying the predicate.
    pub fn filter(&self, mut keep: impl FnMut(i64, i64, &ParamPoly) -> bool) -> ChartElement {
        ChartElement {
            ring: self.ring,
            terms: self
                .terms
                .iter()
                .filter(|(&(l, m), c)| keep(l, m, c))
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Drops parameter terms of total degree above `max_t`.
    pub fn truncate_t(&self, max_t: u32) -> ChartElement {
        let mut out = ChartElement::zero(self.ring);
        for (&(l, m), c) in &self.terms {
            out.add_term(l, m, c.truncate(max_t));
        }
        out
    }

    /// Maps every coefficient through `f`.
    pub fn map_coeffs(&self, mut f: impl FnMut(&ParamPoly) -> ParamPoly) -> ChartElement {
        let mut out = ChartElement::zero(self.ring);
        for (&(l, m), c) in &self.terms {
            out.add_term(l, m, f(c));
        }
        out
    }

    /// Lowest power of `y` occurring (`None` for zero).
    pub fn min_y(&self) -> Option<i64> {
        self.terms.keys().map(|&(_, m)| m).min()
    }

    pub fn min_x(&self) -> Option<i64> {
        self.terms.keys().map(|&(l, _)| l).min()
    }
}

/// A letter of a formal word in the chart generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    X,
    XInv,
    Y,
    YInv,
    /// the parameter `t_k`
    T(usize),
}

/// Normal form of the product of the letters, times `coeff`.
pub fn normalize(ring: ChartRing, coeff: ParamPoly, word: &[Letter]) -> Result<ChartElement> {
    let mut acc = ChartElement::constant(ring, coeff);
    for &letter in word {
        let g = match letter {
            Letter::X => ChartElement::x(ring),
            Letter::Y => ChartElement::y(ring),
            Letter::XInv => ChartElement::monomial(ring, -1, 0, ParamPoly::one(ParamSystem::T, ring.n))?,
            Letter::YInv => ChartElement::monomial(ring, 0, -1, ParamPoly::one(ParamSystem::T, ring.n))?,
            Letter::T(k) => {
                if k > ring.n {
                    return Err(Error::IndexOutOfRange { what: "parameter", index: k as i64, n: ring.n });
                }
                ChartElement::t(ring, k)
            }
        };
        acc = acc.mul(&g)?;
    }
    Ok(acc)
}

impl fmt::Debug for ChartElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.ring, self)
    }
}

impl fmt::Display for ChartElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (&(l, m), c)) in self.terms.iter().rev().enumerate() {
            let single = c.num_terms() == 1;
            // a one-term coefficient with a negative rational factor prints as a subtraction
            let negative = single && c.terms().all(|(_, q)| q.as_rational().is_some_and(|q| q.is_negative()));
            let c = if negative { -c } else { c.clone() };
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = match (l, m) {
                (0, 0) => None,
                (l, 0) => Some(pow_str('x', l)),
                (0, m) => Some(pow_str('y', m)),
                (l, m) => Some(format!("{}*{}", pow_str('x', l), pow_str('y', m))),
            };
            match mono {
                None if single || self.terms.len() == 1 => write!(f, "{c}")?,
                None => write!(f, "({c})")?,
                Some(s) if c.is_one() => write!(f, "{s}")?,
                Some(s) if single => write!(f, "{c}*{s}")?,
                Some(s) => write!(f, "({c})*{s}")?,
            }
        }
        Ok(())
    }
}

fn pow_str(v: char, e: i64) -> alloc::string::String {
    if e == 1 {
        format!("{v}")
    } else {
        format!("{v}^{e}")
    }
}

/// Total parameter degree of the monomial `t^α` (helper for slicing).
pub fn t_degree(e: &Exponents) -> u32 {
    e.degree()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn tp(n: usize, k: usize) -> ParamPoly {
        ParamPoly::var(ParamSystem::T, n, k)
    }

    fn lin(n: usize, c: &[i64]) -> ParamPoly {
        ParamPoly::linear(ParamSystem::T, n, c)
    }

    #[test]
    fn defining_relation() {
        let r = ChartRing::chart(2, 1).unwrap();
        let yx = normalize(r, ParamPoly::one(ParamSystem::T, 2), &[Letter::Y, Letter::X]).unwrap();
        let expect = ChartElement::monomial(r, 1, 1, ParamPoly::one(ParamSystem::T, 2))
            .unwrap()
            .sub(&ChartElement::t(r, 0))
            .unwrap();
        assert_eq!(yx, expect);
        let yxx = normalize(r, ParamPoly::one(ParamSystem::T, 2), &[Letter::Y, Letter::X, Letter::X]).unwrap();
        let expect = ChartElement::monomial(r, 2, 1, ParamPoly::one(ParamSystem::T, 2))
            .unwrap()
            .sub(&ChartElement::monomial(r, 1, 0, lin(2, &[2, 0, 0])).unwrap())
            .unwrap();
        assert_eq!(yxx, expect);
    }

    #[test]
    fn inverses_cancel() {
        let r = ChartRing::overlap(1, 0).unwrap();
        let one = normalize(r, ParamPoly::one(ParamSystem::T, 1), &[Letter::XInv, Letter::X]).unwrap();
        assert!(one.is_one());
        let u = ChartRing::overlap_upper(1, 0).unwrap();
        let one = normalize(u, ParamPoly::one(ParamSystem::T, 1), &[Letter::Y, Letter::YInv]).unwrap();
        assert!(one.is_one());
        assert!(normalize(ChartRing::chart(1, 0).unwrap(), ParamPoly::one(ParamSystem::T, 1), &[Letter::XInv]).is_err());
    }

    #[test]
    fn conjugated_commutator_is_t0() {
        // x·(y·x + t_0)·x^{-1} − x·y = t_0
        let n = 2;
        let r = ChartRing::overlap(n, 0).unwrap();
        let one = ParamPoly::one(ParamSystem::T, n);
        let a = normalize(r, one.clone(), &[Letter::X, Letter::Y, Letter::X, Letter::XInv]).unwrap();
        let b = normalize(r, one.clone(), &[Letter::X, Letter::T(0), Letter::XInv]).unwrap();
        let c = normalize(r, one, &[Letter::X, Letter::Y]).unwrap();
        assert_eq!(a.add(&b).unwrap().sub(&c).unwrap(), ChartElement::t(r, 0));
    }

    #[test]
    fn transition_tables() {
        for n in 1..=4 {
            for i in 0..n {
                let up = ChartRing::chart(n, i + 1).unwrap();
                let lo = ChartRing::overlap(n, i).unwrap();
                let x1 = ChartElement::x(up).to_lower().unwrap();
                let expect = ChartElement::monomial(lo, 2, 1, ParamPoly::one(ParamSystem::T, n))
                    .unwrap()
                    .add(&ChartElement::x(lo).scale(&tp(n, i + 1)))
                    .unwrap();
                assert_eq!(x1, expect);
                assert_eq!(x1.principal_degree(), Some(1));
                let xy = ChartElement::x(up).mul(&ChartElement::y(up)).unwrap().to_lower().unwrap();
                let mut c = alloc::vec![0i64; n + 1];
                c[0] = 1;
                c[i + 1] = 1;
                let expect = ChartElement::monomial(lo, 1, 1, ParamPoly::one(ParamSystem::T, n))
                    .unwrap()
                    .add(&ChartElement::constant(lo, lin(n, &c)))
                    .unwrap();
                assert_eq!(xy, expect);
            }
        }
    }

    #[test]
    fn y_goes_up_and_back() {
        for n in 1..=4 {
            for i in 0..n {
                let r = ChartRing::chart(n, i).unwrap();
                for e in [ChartElement::x(r), ChartElement::y(r), ChartElement::x(r).mul(&ChartElement::y(r)).unwrap()] {
                    let back = e.to_upper().unwrap().to_lower().unwrap();
                    assert_eq!(back, e.embed(ChartRing::overlap(n, i).unwrap()).unwrap());
                }
                let r1 = ChartRing::chart(n, i + 1).unwrap();
                for e in [ChartElement::x(r1), ChartElement::y(r1)] {
                    let back = e.to_lower().unwrap().to_upper().unwrap();
                    assert_eq!(back, e.embed(ChartRing::overlap_upper(n, i).unwrap()).unwrap());
                }
            }
        }
    }

    #[test]
    fn y_upward_formula() {
        let (n, i) = (3, 1);
        let r = ChartRing::chart(n, i).unwrap();
        let u = ChartRing::overlap_upper(n, i).unwrap();
        let one = ParamPoly::one(ParamSystem::T, n);
        let expect = normalize(u, one.clone(), &[Letter::Y, Letter::Y, Letter::X])
            .unwrap()
            .sub(&normalize(u, one, &[Letter::T(i + 1), Letter::Y]).unwrap())
            .unwrap();
        assert_eq!(ChartElement::y(r).to_upper().unwrap(), expect);
    }

    #[test]
    fn adjacent_commutators() {
        for n in 1..=4 {
            for i in 0..n {
                let lo = ChartRing::overlap(n, i).unwrap();
                let up = ChartRing::chart(n, i + 1).unwrap();
                let x1 = ChartElement::x(up).to_lower().unwrap();
                let y1 = ChartElement::y(up).to_lower().unwrap();
                let comm = x1.mul(&y1).unwrap().sub(&y1.mul(&x1).unwrap()).unwrap();
                assert_eq!(comm, ChartElement::t(lo, 0));
                // y_i y_{i+1} − y_{i+1} y_i = t_0 y_{i+1}²
                let y0 = ChartElement::y(lo);
                let lhs = y0.mul(&y1).unwrap().sub(&y1.mul(&y0).unwrap()).unwrap();
                assert_eq!(lhs, y1.mul(&y1).unwrap().scale(&tp(n, 0)));
            }
        }
    }

    #[test]
    fn display() {
        let n = 1;
        let r = ChartRing::chart(n, 0).unwrap();
        let xy = ChartElement::x(r).mul(&ChartElement::y(r)).unwrap();
        assert_eq!(xy.sub(&ChartElement::t(r, 0)).unwrap().to_string(), "x*y - t0");
        let c = ChartElement::constant(r, &tp(n, 0) + &tp(n, 1).scale_int(-2));
        assert_eq!(c.to_string(), "t0 - 2*t1");
        assert_eq!(xy.add(&c).unwrap().to_string(), "x*y + (t0 - 2*t1)");
        assert_eq!(ChartElement::y(r).scale(&tp(n, 1).scale_int(-3)).to_string(), "-3*t1*y");
    }

    #[test]
    fn leading_part_and_degrees() {
        let r = ChartRing::chart(1, 0).unwrap();
        let e = normalize(r, ParamPoly::one(ParamSystem::T, 1), &[Letter::Y, Letter::X, Letter::X]).unwrap();
        assert_eq!(e.principal_degree(), Some(1));
        assert_eq!(e.filtration_degree(), Some(3));
        assert_eq!(e.leading_part(), ChartElement::monomial(r, 2, 1, ParamPoly::one(ParamSystem::T, 1)).unwrap());
        assert_eq!(e.add(&ChartElement::y(r)).unwrap().principal_degree(), None);
    }

    #[test]
    fn non_adjacent_rejected() {
        let a = ChartElement::x(ChartRing::chart(3, 0).unwrap());
        let b = ChartElement::x(ChartRing::chart(3, 2).unwrap());
        assert!(matches!(a.mul(&b), Err(Error::RingMismatch { .. })));
    }

    fn arb_elem(ring: ChartRing) -> impl Strategy<Value = ChartElement> {
        let lo = if ring.allows_negative_x() { -2i64 } else { 0 };
        let ylo = if ring.allows_negative_y() { -2i64 } else { 0 };
        proptest::collection::vec((lo..3, ylo..3, -3i64..4, 0usize..=ring.n, 0u32..2), 0..4).prop_map(move |ts| {
            let mut e = ChartElement::zero(ring);
            for (l, m, c, k, p) in ts {
                let coeff = ParamPoly::var(ParamSystem::T, ring.n, k).pow(p).scale_int(c);
                e.add_term(l, m, coeff);
            }
            e
        })
    }

    fn rings() -> impl Strategy<Value = ChartRing> {
        (1usize..4).prop_flat_map(|n| {
            (0..n, 0u8..3).prop_map(move |(i, k)| match k {
                0 => ChartRing::chart(n, i).unwrap(),
                1 => ChartRing::overlap(n, i).unwrap(),
                _ => ChartRing::overlap_upper(n, i).unwrap(),
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn associative_and_distributive((a, b, c) in rings().prop_flat_map(|r| (arb_elem(r), arb_elem(r), arb_elem(r)))) {
            let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
            let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            let l = a.mul(&b.add(&c).unwrap()).unwrap();
            let r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn transitions_are_homomorphisms((a, b) in (1usize..4).prop_flat_map(|n| (0..n).prop_flat_map(move |i| {
            let r = ChartRing::chart(n, i + 1).unwrap();
            (arb_elem(r), arb_elem(r))
        }))) {
            let lhs = a.mul(&b).unwrap().to_lower().unwrap();
            let rhs = a.to_lower().unwrap().mul(&b.to_lower().unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            let back = a.to_lower().unwrap().to_upper().unwrap();
            prop_assert_eq!(back, a.embed(ChartRing::overlap_upper(a.n(), match a.ring().kind { ChartKind::Chart(j) => j - 1, _ => unreachable!() }).unwrap()).unwrap());
        }

        #[test]
        fn degree_additive_and_preserved((a, b) in (1usize..4).prop_flat_map(|n| (0..n).prop_flat_map(move |i| {
            let r = ChartRing::chart(n, i + 1).unwrap();
            (arb_elem(r), arb_elem(r))
        }))) {
            let parts_a = a.principal_parts();
            let parts_b = b.principal_parts();
            for (da, pa) in &parts_a {
                for (db, pb) in &parts_b {
                    let p = pa.mul(pb).unwrap();
                    prop_assert!(p.is_zero() || p.principal_degree() == Some(da + db));
                }
                let img = pa.to_lower().unwrap();
                prop_assert!(img.is_zero() || img.principal_degree() == Some(*da));
            }
        }
    }
}

//! The deformed twisted group algebra
//! `S = k[s_0..s_n]⟨u, v⟩ # G / (uv − vu − Σ s_i g^i)`, `G = ⟨g⟩` cyclic of
//! order `n + 1` acting by `g u = ζ u g`, `g v = ζ^{-1} v g`.
//!
//! Elements are kept in the normal form `Σ c_{a,b,j} u^a v^b g^j`. The only
//! nontrivial reordering is `v` past `u^a`:
//!
//! ```text
//! v · u^a v^b g^j = u^a v^{b+1} g^j − Σ_i s_i ζ^{-ib} (Σ_{m<a} ζ^{im}) u^{a-1} v^b g^{i+j}
//! ```

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use crate::cyclotomic::CycNumber;
use crate::linalg::{rank_cyc, SparseRow};
use crate::param::{Exponents, ParamPoly, ParamSystem};
use crate::{Error, Rational, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SElement {
    n: usize,
    terms: BTreeMap<(u32, u32, u32), ParamPoly>,
}

/// A generator of `S`, for formal words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SLetter {
    U,
    V,
    G,
}

impl SElement {
    pub fn zero(n: usize) -> Self {
        SElement { n, terms: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::monomial(n, 0, 0, 0, ParamPoly::one(ParamSystem::S, n))
    }

    pub fn constant(n: usize, c: ParamPoly) -> Self {
        Self::monomial(n, 0, 0, 0, c)
    }

    pub fn scalar(n: usize, c: CycNumber) -> Self {
        Self::constant(n, ParamPoly::constant(ParamSystem::S, n, c))
    }

    pub fn s(n: usize, i: usize) -> Self {
        Self::constant(n, ParamPoly::var(ParamSystem::S, n, i))
    }

    pub fn u(n: usize) -> Self {
        Self::monomial(n, 1, 0, 0, ParamPoly::one(ParamSystem::S, n))
    }

    pub fn v(n: usize) -> Self {
        Self::monomial(n, 0, 1, 0, ParamPoly::one(ParamSystem::S, n))
    }

    /// `g^j`, `j` taken mod `n + 1`.
    pub fn g_pow(n: usize, j: i64) -> Self {
        let j = j.rem_euclid(n as i64 + 1) as u32;
        Self::monomial(n, 0, 0, j, ParamPoly::one(ParamSystem::S, n))
    }

    pub fn monomial(n: usize, a: u32, b: u32, j: u32, c: ParamPoly) -> Self {
        assert_eq!(c.system(), ParamSystem::S, "coefficients of S live in k[s]");
        let mut e = Self::zero(n);
        e.add_term(a, b, j, c);
        e
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn order(&self) -> u32 {
        self.n as u32 + 1
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32, u32), &ParamPoly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, a: u32, b: u32, j: u32, c: ParamPoly) {
        if c.is_zero() {
            return;
        }
        let j = j % self.order();
        match self.terms.entry((a, b, j)) {
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

    pub fn add(&self, other: &SElement) -> SElement {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (&(a, b, j), c) in &other.terms {
            out.add_term(a, b, j, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SElement) -> SElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SElement {
        SElement { n: self.n, terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    pub fn scale(&self, c: &ParamPoly) -> SElement {
        let mut out = Self::zero(self.n);
        for (&(a, b, j), x) in &self.terms {
            out.add_term(a, b, j, x * c);
        }
        out
    }

    pub fn scale_cyc(&self, c: &CycNumber) -> SElement {
        let mut out = Self::zero(self.n);
        for (&(a, b, j), x) in &self.terms {
            out.add_term(a, b, j, x.scale(c));
        }
        out
    }

    /// `v · self`.
    fn left_mul_v(&self) -> SElement {
        let n = self.n;
        let order = self.order();
        let mut out = Self::zero(n);
        for (&(a, b, j), c) in &self.terms {
            out.add_term(a, b + 1, j, c.clone());
            if a == 0 {
                continue;
            }
            for i in 0..=n {
                let geo = (0..a).fold(CycNumber::zero(order), |acc, m| &acc + &CycNumber::zeta_pow(order, (i as i64) * m as i64));
                if geo.is_zero() {
                    continue;
                }
                let coef = &geo * &CycNumber::zeta_pow(order, -(i as i64) * b as i64);
                let s_i = ParamPoly::var(ParamSystem::S, n, i);
                out.add_term(a - 1, b, j + i as u32, (&s_i * c).scale(&-coef));
            }
        }
        out
    }

    pub fn mul(&self, other: &SElement) -> SElement {
        assert_eq!(self.n, other.n);
        let order = self.order();
        let mut out = Self::zero(self.n);
        for (&(a, b, j), c1) in &self.terms {
            // g^j · other, then v^b ·, then u^a ·
            let mut cur = Self::zero(self.n);
            for (&(c, d, k), c2) in &other.terms {
                let z = CycNumber::zeta_pow(order, j as i64 * (c as i64 - d as i64));
                cur.add_term(c, d, j + k, (c1 * c2).scale(&z));
            }
            for _ in 0..b {
                cur = cur.left_mul_v();
            }
            for (&(c, d, k), x) in &cur.terms {
                out.add_term(a + c, d, k, x.clone());
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> SElement {
        (0..e).fold(Self::one(self.n), |acc, _| acc.mul(self))
    }

    /// Normal form of a formal word times `coeff`.
    pub fn from_word(n: usize, coeff: ParamPoly, word: &[SLetter]) -> SElement {
        word.iter().fold(Self::constant(n, coeff), |acc, l| {
            acc.mul(&match l {
                SLetter::U => Self::u(n),
                SLetter::V => Self::v(n),
                SLetter::G => Self::g_pow(n, 1),
            })
        })
    }

    /// Largest `a + b` (`deg u = deg v = 1`, `deg g = deg s = 0`).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(a, b, _)| a + b).max()
    }

    /// Terms of top degree.
    pub fn leading_part(&self) -> SElement {
        let Some(top) = self.degree() else { return self.clone() };
        SElement {
            n: self.n,
            terms: self.terms.iter().filter(|(k, _)| k.0 + k.1 == top).map(|(k, c)| (*k, c.clone())).collect(),
        }
    }

    /// Substitutes values for the parameters.
    pub fn map_coeffs(&self, mut f: impl FnMut(&ParamPoly) -> ParamPoly) -> SElement {
        let mut out = Self::zero(self.n);
        for (&(a, b, j), c) in &self.terms {
            out.add_term(a, b, j, f(c));
        }
        out
    }

    /// Coefficient vector keyed by `(a, b, j, α)` for rank computations.
    pub fn coordinates(&self, index: &mut BTreeMap<(u32, u32, u32, Exponents), usize>) -> SparseRow<CycNumber> {
        let mut row = BTreeMap::new();
        for (&(a, b, j), c) in &self.terms {
            for (e, v) in c.terms() {
                let next = index.len();
                let r = *index.entry((a, b, j, e.clone())).or_insert(next);
                row.insert(r, v.clone());
            }
        }
        row.into_iter().collect()
    }
}

/// `e_i = Σ_j ζ^{ij} g^j / (n + 1)`, `i` taken mod `n + 1`.
pub fn make_es(n: usize, i: i64) -> SElement {
    let order = n as u32 + 1;
    let inv = Rational::new(BigInt::from(1), BigInt::from(order));
    let mut e = SElement::zero(n);
    for j in 0..=n {
        let c = CycNumber::zeta_pow(order, i * j as i64).scale(&inv);
        e.add_term(0, 0, j as u32, ParamPoly::constant(ParamSystem::S, n, c));
    }
    e
}

/// `e_i a e_j`.
pub fn block(a: &SElement, i: i64, j: i64) -> SElement {
    make_es(a.n, i).mul(a).mul(&make_es(a.n, j))
}

/// `α_{i,i+1} = e_i u e_{i+1}`.
pub fn make_alpha_s(n: usize, i: i64) -> SElement {
    block(&SElement::u(n), i, i + 1)
}

/// `β_{i+1,i} = e_{i+1} v e_i`.
pub fn make_beta_s(n: usize, i: i64) -> SElement {
    block(&SElement::v(n), i + 1, i)
}

/// `(x, y, z) = (e u^{n+1} e, e v^{n+1} e, e u v e)` with `e = e_0`.
pub fn make_xyz_s(n: usize) -> (SElement, SElement, SElement) {
    let m = n as u32 + 1;
    (
        block(&SElement::u(n).pow(m), 0, 0),
        block(&SElement::v(n).pow(m), 0, 0),
        block(&SElement::u(n).mul(&SElement::v(n)), 0, 0),
    )
}

/// Rank of the degree-`d` part of `e_i S e_j` modulo lower degree, computed
/// by projecting every `u^a v^b g^k` with `a + b = d`.
pub fn s_graded_dim(n: usize, i: i64, j: i64, d: u32) -> usize {
    let mut index = BTreeMap::new();
    let mut rows = Vec::new();
    for a in 0..=d {
        for k in 0..=n as u32 {
            let m = SElement::monomial(n, a, d - a, k, ParamPoly::one(ParamSystem::S, n));
            let p = block(&m, i, j);
            if p.degree() == Some(d) {
                rows.push(p.leading_part().coordinates(&mut index));
            }
        }
    }
    rank_cyc(&rows, index.len())
}

/// Number of normal monomials of degree `d`, and the rank of the top-degree
/// parts of all products of `d` letters `u, v` followed by `g^k`: both are
/// `(d + 1)(n + 1)` when `Gr S = k[s][u, v] # G`.
pub fn pbw_degree_count(n: usize, d: u32) -> (usize, usize) {
    let monomials = (d as usize + 1) * (n + 1);
    let mut index = BTreeMap::new();
    let mut rows = Vec::new();
    for mask in 0u32..(1 << d) {
        let word: Vec<SLetter> = (0..d).map(|b| if mask >> b & 1 == 1 { SLetter::V } else { SLetter::U }).collect();
        let w = SElement::from_word(n, ParamPoly::one(ParamSystem::S, n), &word);
        for k in 0..=n as i64 {
            rows.push(w.mul(&SElement::g_pow(n, k)).leading_part().coordinates(&mut index));
        }
    }
    (monomials, rank_cyc(&rows, index.len()))
}

/// Index of `e_i` in `e_i u^a v^b = u^a v^b e_{i+a-b}`.
pub fn shifted_idempotent(n: usize, i: i64, a: u32, b: u32) -> i64 {
    (i + a as i64 - b as i64).rem_euclid(n as i64 + 1)
}

/// Independent normaliser by repeated single-rule rewriting of words, used
/// to cross-check [`SElement::mul`]. `leftmost` picks which redex fires
/// first.
pub fn rewrite_normal_form(n: usize, word: &[SLetter], leftmost: bool) -> Result<SElement> {
    let order = n as u32 + 1;
    let mut pending: Vec<(Vec<SLetter>, ParamPoly)> = alloc::vec![(word.to_vec(), ParamPoly::one(ParamSystem::S, n))];
    let mut out = SElement::zero(n);
    let mut steps = 0usize;
    while let Some((w, c)) = pending.pop() {
        steps += 1;
        if steps > 1_000_000 {
            return Err(Error::ReductionDiverged { steps });
        }
        let redexes: Vec<usize> = (0..w.len().saturating_sub(1))
            .filter(|&p| {
                matches!((w[p], w[p + 1]), (SLetter::V, SLetter::U) | (SLetter::G, SLetter::U) | (SLetter::G, SLetter::V))
            })
            .collect();
        let g_run = w.iter().rev().take_while(|&&l| l == SLetter::G).count();
        let Some(&p) = (if leftmost { redexes.first() } else { redexes.last() }) else {
            if g_run as u32 >= order {
                let mut w2 = w.clone();
                w2.truncate(w.len() - order as usize);
                pending.push((w2, c));
                continue;
            }
            let a = w.iter().filter(|&&l| l == SLetter::U).count() as u32;
            let b = w.iter().filter(|&&l| l == SLetter::V).count() as u32;
            out.add_term(a, b, g_run as u32, c);
            continue;
        };
        let mut swapped = w.clone();
        swapped.swap(p, p + 1);
        match (w[p], w[p + 1]) {
            (SLetter::V, SLetter::U) => {
                pending.push((swapped, c.clone()));
                for i in 0..=n {
                    let mut w2 = w[..p].to_vec();
                    w2.extend(core::iter::repeat_n(SLetter::G, i));
                    w2.extend_from_slice(&w[p + 2..]);
                    pending.push((w2, -&(&c * &ParamPoly::var(ParamSystem::S, n, i))));
                }
            }
            (SLetter::G, SLetter::U) => pending.push((swapped, c.scale(&CycNumber::zeta_pow(order, 1)))),
            (SLetter::G, SLetter::V) => pending.push((swapped, c.scale(&CycNumber::zeta_pow(order, -1)))),
            _ => unreachable!(),
        }
    }
    Ok(out)
}

impl fmt::Debug for SElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (&(a, b, j), c)) in self.terms.iter().rev().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (sym, e) in [('u', a), ('v', b), ('g', j)] {
                match e {
                    0 => {}
                    1 => write!(f, "*{sym}")?,
                    _ => write!(f, "*{sym}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

//! Commutative polynomials in the deformation parameters, with coefficients in
//! `Q(ζ_{n+1})`, and the linear coordinate changes
//!
//! ```text
//! w_0 = -(n-1) t_0 - t_1 - … - t_n,   w_j = t_0 + t_j  (1 ≤ j ≤ n)
//! s_i = 1/(n+1) Σ_j ζ^{ij} w_j
//! ```
//!
//! Naming follows `coord_<target>_from_<source>`: the function takes a
//! polynomial written in the source parameters and rewrites it in the target
//! parameters.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::cyclotomic::CycNumber;
use crate::{Error, Rational, Result};

/// Which family of parameters a polynomial is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamSystem {
    T,
    S,
    W,
}

impl ParamSystem {
    pub fn letter(self) -> char {
        match self {
            ParamSystem::T => 't',
            ParamSystem::S => 's',
            ParamSystem::W => 'w',
        }
    }
}

/// Exponent vector of a parameter monomial, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponents(Vec<u32>);

impl Exponents {
    pub fn new(exps: Vec<u32>) -> Self {
        Exponents(exps)
    }

    pub fn zero(nvars: usize) -> Self {
        Exponents(vec![0; nvars])
    }

    pub fn unit(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        Exponents(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn add(&self, other: &Exponents) -> Exponents {
        Exponents(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// All exponent vectors of total degree `deg` in `nvars` variables, in
    /// increasing graded-lex order.
    pub fn all_of_degree(nvars: usize, deg: u32) -> Vec<Exponents> {
        fn rec(nvars: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Exponents>) {
            if prefix.len() + 1 == nvars {
                prefix.push(left);
                out.push(Exponents(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in 0..=left {
                prefix.push(e);
                rec(nvars, left - e, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if nvars == 0 {
            if deg == 0 {
                out.push(Exponents(Vec::new()));
            }
            return out;
        }
        rec(nvars, deg, &mut Vec::with_capacity(nvars), &mut out);
        out.sort();
        out
    }

    /// All exponent vectors of total degree at most `deg`.
    pub fn up_to_degree(nvars: usize, deg: u32) -> Vec<Exponents> {
        (0..=deg).flat_map(|d| Self::all_of_degree(nvars, d)).collect()
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `n + 1` parameters of one [`ParamSystem`], with
/// coefficients in `Q(ζ_{n+1})`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ParamPoly {
    system: ParamSystem,
    n: usize,
    terms: BTreeMap<Exponents, CycNumber>,
}

impl ParamPoly {
    pub fn zero(system: ParamSystem, n: usize) -> Self {
        ParamPoly { system, n, terms: BTreeMap::new() }
    }

    pub fn constant(system: ParamSystem, n: usize, c: CycNumber) -> Self {
        Self::monomial(system, n, Exponents::zero(n + 1), c)
    }

    pub fn one(system: ParamSystem, n: usize) -> Self {
        Self::from_int(system, n, 1)
    }

    pub fn from_int(system: ParamSystem, n: usize, k: i64) -> Self {
        Self::constant(system, n, CycNumber::from_int(n as u32 + 1, k))
    }

    pub fn from_rational(system: ParamSystem, n: usize, q: Rational) -> Self {
        Self::constant(system, n, CycNumber::from_rational(n as u32 + 1, q))
    }

    /// The `k`-th parameter of the system.
    pub fn var(system: ParamSystem, n: usize, k: usize) -> Self {
        assert!(k <= n, "parameter index {k} out of range for n = {n}");
        Self::monomial(system, n, Exponents::unit(n + 1, k), CycNumber::one(n as u32 + 1))
    }

    pub fn monomial(system: ParamSystem, n: usize, exps: Exponents, c: CycNumber) -> Self {
        assert_eq!(exps.0.len(), n + 1);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        ParamPoly { system, n, terms }
    }

    /// Linear form `Σ_k coeffs[k]·var_k` with integer coefficients.
    pub fn linear(system: ParamSystem, n: usize, coeffs: &[i64]) -> Self {
        let mut p = Self::zero(system, n);
        for (k, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                p.add_term(Exponents::unit(n + 1, k), CycNumber::from_int(n as u32 + 1, c));
            }
        }
        p
    }

    pub fn system(&self) -> ParamSystem {
        self.system
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.n as u32 + 1
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().next().is_some_and(|(e, c)| e.degree() == 0 && c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &CycNumber)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest total degree of a term; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Exponents::degree).max()
    }

    /// Smallest total degree of a term; `None` for zero.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(Exponents::degree).min()
    }

    pub fn constant_term(&self) -> CycNumber {
        self.terms
            .get(&Exponents::zero(self.n + 1))
            .cloned()
            .unwrap_or_else(|| CycNumber::zero(self.order()))
    }

    pub fn coeff(&self, exps: &Exponents) -> Option<&CycNumber> {
        self.terms.get(exps)
    }

    /// True when every coefficient is rational.
    pub fn is_rational(&self) -> bool {
        self.terms.values().all(CycNumber::is_rational)
    }

    pub fn add_term(&mut self, exps: Exponents, c: CycNumber) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &ParamPoly) {
        self.check(other);
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    pub fn sub_assign_ref(&mut self, other: &ParamPoly) {
        self.check(other);
        for (e, c) in &other.terms {
            self.add_term(e.clone(), -c);
        }
    }

    pub fn scale(&self, c: &CycNumber) -> ParamPoly {
        if c.is_zero() {
            return Self::zero(self.system, self.n);
        }
        ParamPoly {
            system: self.system,
            n: self.n,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn scale_int(&self, k: i64) -> ParamPoly {
        self.scale(&CycNumber::from_int(self.order(), k))
    }

    /// Multiplies by the monomial `params^exps`.
    pub fn shift(&self, exps: &Exponents) -> ParamPoly {
        ParamPoly {
            system: self.system,
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.add(exps), c.clone())).collect(),
        }
    }

    /// Drops every term of total degree above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> ParamPoly {
        ParamPoly {
            system: self.system,
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() <= max_degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> ParamPoly {
        let mut acc = Self::one(self.system, self.n);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes `var_k ↦ images[k]`. The result lives in the system of the
    /// images.
    pub fn substitute(&self, images: &[ParamPoly]) -> ParamPoly {
        assert_eq!(images.len(), self.n + 1);
        let target = images[0].system;
        let mut powers: Vec<Vec<ParamPoly>> =
            images.iter().map(|p| vec![ParamPoly::one(target, self.n), p.clone()]).collect();
        let mut out = ParamPoly::zero(target, self.n);
        for (e, c) in &self.terms {
            let mut term = ParamPoly::constant(target, self.n, c.clone());
            for (k, &ek) in e.0.iter().enumerate() {
                while powers[k].len() <= ek as usize {
                    let next = &powers[k][powers[k].len() - 1] * &images[k];
                    powers[k].push(next);
                }
                if ek > 0 {
                    term = &term * &powers[k][ek as usize];
                }
            }
            out.add_assign_ref(&term);
        }
        out
    }

    /// Evaluates at a point of `Q^{n+1}`.
    pub fn evaluate(&self, point: &[Rational]) -> CycNumber {
        let mut acc = CycNumber::zero(self.order());
        for (e, c) in &self.terms {
            let mut v = Rational::one();
            for (x, &k) in point.iter().zip(&e.0) {
                for _ in 0..k {
                    v *= x;
                }
            }
            acc += &c.scale(&v);
        }
        acc
    }

    /// Reinterprets the polynomial in another system without substitution.
    pub fn relabel(&self, system: ParamSystem) -> ParamPoly {
        ParamPoly { system, n: self.n, terms: self.terms.clone() }
    }

    pub fn expect_system(&self, expected: ParamSystem) -> Result<()> {
        if self.system == expected {
            Ok(())
        } else {
            Err(Error::SystemMismatch { expected, found: self.system })
        }
    }

    fn check(&self, other: &ParamPoly) {
        assert_eq!(self.system, other.system, "mixing parameter systems");
        assert_eq!(self.n, other.n, "mixing parameter rings of different n");
    }
}

impl Add for &ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &ParamPoly {
    type Output = ParamPoly;
    fn sub(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        out.sub_assign_ref(rhs);
        out
    }
}

impl Neg for &ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        ParamPoly {
            system: self.system,
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &ParamPoly) -> ParamPoly {
        self.check(rhs);
        if rhs.is_one() {
            return self.clone();
        }
        if self.is_one() {
            return rhs.clone();
        }
        let mut out = ParamPoly::zero(self.system, self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea.add(eb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Debug for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let letter = self.system.letter();
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            // rational coefficients print their sign as a separator
            let negative = c.as_rational().is_some_and(|q| q.is_negative());
            let c = if negative { -c } else { c.clone() };
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono: Vec<(usize, u32)> =
                e.0.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, &k)| (i, k)).collect();
            if mono.is_empty() || !c.is_one() {
                write!(f, "{c}")?;
            }
            for (j, (i, k)) in mono.iter().enumerate() {
                if j > 0 || !c.is_one() {
                    write!(f, "*")?;
                }
                if *k == 1 {
                    write!(f, "{letter}{i}")?;
                } else {
                    write!(f, "{letter}{i}^{k}")?;
                }
            }
        }
        Ok(())
    }
}

/// `w_j` written in the `t` parameters.
pub fn w_in_t(n: usize) -> Vec<ParamPoly> {
    let mut out = Vec::with_capacity(n + 1);
    let mut w0 = vec![-1i64; n + 1];
    w0[0] = 1 - n as i64;
    out.push(ParamPoly::linear(ParamSystem::T, n, &w0));
    for j in 1..=n {
        let mut c = vec![0i64; n + 1];
        c[0] = 1;
        c[j] += 1;
        out.push(ParamPoly::linear(ParamSystem::T, n, &c));
    }
    out
}

/// `t_k` written in the `w` parameters: `t_0 = Σ_j w_j`, `t_j = w_j - Σ_k w_k`.
pub fn t_in_w(n: usize) -> Vec<ParamPoly> {
    let t0 = ParamPoly::linear(ParamSystem::W, n, &vec![1; n + 1]);
    let mut out = vec![t0.clone()];
    for j in 1..=n {
        out.push(&ParamPoly::var(ParamSystem::W, n, j) - &t0);
    }
    out
}

/// `s_i = 1/(n+1) Σ_j ζ^{ij} w_j`, written in the `w` parameters.
pub fn s_in_w(n: usize) -> Vec<ParamPoly> {
    let m = n as u32 + 1;
    let inv = Rational::new(BigInt::one(), BigInt::from(m));
    (0..=n)
        .map(|i| {
            let mut p = ParamPoly::zero(ParamSystem::W, n);
            for j in 0..=n {
                p.add_term(
                    Exponents::unit(n + 1, j),
                    CycNumber::zeta_pow(m, (i * j) as i64).scale(&inv),
                );
            }
            p
        })
        .collect()
}

/// `w_j = Σ_i ζ^{-ij} s_i`, written in the `s` parameters.
pub fn w_in_s(n: usize) -> Vec<ParamPoly> {
    let m = n as u32 + 1;
    (0..=n)
        .map(|j| {
            let mut p = ParamPoly::zero(ParamSystem::S, n);
            for i in 0..=n {
                p.add_term(Exponents::unit(n + 1, i), CycNumber::zeta_pow(m, -((i * j) as i64)));
            }
            p
        })
        .collect()
}

pub fn coord_t_from_w(p: &ParamPoly) -> Result<ParamPoly> {
    p.expect_system(ParamSystem::W)?;
    Ok(p.substitute(&w_in_t(p.n)))
}

pub fn coord_w_from_t(p: &ParamPoly) -> Result<ParamPoly> {
    p.expect_system(ParamSystem::T)?;
    Ok(p.substitute(&t_in_w(p.n)))
}

pub fn coord_w_from_s(p: &ParamPoly) -> Result<ParamPoly> {
    p.expect_system(ParamSystem::S)?;
    Ok(p.substitute(&s_in_w(p.n)))
}

pub fn coord_s_from_w(p: &ParamPoly) -> Result<ParamPoly> {
    p.expect_system(ParamSystem::W)?;
    Ok(p.substitute(&w_in_s(p.n)))
}

/// Composite change `S → W → T`, the one the comparison homomorphism uses.
pub fn coord_t_from_s(p: &ParamPoly) -> Result<ParamPoly> {
    coord_t_from_w(&coord_w_from_s(p)?)
}

pub fn coord_s_from_t(p: &ParamPoly) -> Result<ParamPoly> {
    coord_s_from_w(&coord_w_from_t(p)?)
}

/// `s_i` expressed directly in the `t` parameters.
pub fn s_in_t(n: usize) -> Vec<ParamPoly> {
    (0..=n)
        .map(|i| coord_t_from_s(&ParamPoly::var(ParamSystem::S, n, i)).expect("S input"))
        .collect()
}

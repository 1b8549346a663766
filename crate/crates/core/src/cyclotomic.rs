//! Exact arithmetic in the cyclotomic field `Q(ζ)`, `ζ` a primitive `m`-th root of unity.
//!
//! Elements are stored in the power basis `1, z, …, z^{φ(m)-1}` of
//! `Q[z]/(Φ_m(z))`. Using the true minimal polynomial `Φ_m` (rather than
//! `z^m - 1`) keeps the quotient a field, so every nonzero element is invertible
//! and `ζ^j ≠ 1` for `0 < j < m` holds as a field identity.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::Rational;

/// Coefficients (low degree first) of the `m`-th cyclotomic polynomial.
///
/// Computed as `(z^m - 1) / ∏_{d | m, d < m} Φ_d(z)`.
pub fn cyclotomic_poly(m: u32) -> Vec<BigInt> {
    assert!(m > 0, "cyclotomic order must be positive");
    let mut num: Vec<BigInt> = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m % d == 0 {
            num = exact_div_monic(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); num.len() - dn];
    for k in (dn..num.len()).rev() {
        let c = rem[k].clone();
        if c.is_zero() {
            continue;
        }
        quot[k - dn] = c.clone();
        for (j, dc) in den.iter().enumerate() {
            rem[k - dn + j] -= &c * dc;
        }
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

/// Euler's totient, i.e. `deg Φ_m`.
pub fn euler_phi(m: u32) -> usize {
    (1..=m).filter(|k| k.gcd(&m) == 1).count()
}

/// An element of `Q(ζ_m)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNumber {
    order: u32,
    coeffs: Vec<Rational>,
}

impl CycNumber {
    pub fn zero(order: u32) -> Self {
        CycNumber { order, coeffs: vec![Rational::zero(); euler_phi(order)] }
    }

    pub fn one(order: u32) -> Self {
        Self::from_rational(order, Rational::one())
    }

    pub fn from_rational(order: u32, q: Rational) -> Self {
        let mut out = Self::zero(order);
        out.coeffs[0] = q;
        out
    }

    pub fn from_int(order: u32, k: i64) -> Self {
        Self::from_rational(order, Rational::from_integer(BigInt::from(k)))
    }

    /// Builds an element from power-basis coefficients, reducing modulo `Φ_m`
    /// when more than `φ(m)` coefficients are given.
    pub fn from_coeffs(order: u32, coeffs: Vec<Rational>) -> Self {
        reduce(order, coeffs)
    }

    /// `ζ^e`, with `e` taken modulo the order.
    pub fn zeta_pow(order: u32, e: i64) -> Self {
        let e = e.rem_euclid(order as i64) as usize;
        let mut c = vec![Rational::zero(); e + 1];
        c[e] = Rational::one();
        reduce(order, c)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// True when the element lies in the prime field `Q`.
    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then(|| &self.coeffs[0])
    }

    pub fn scale(&self, q: &Rational) -> Self {
        CycNumber { order: self.order, coeffs: self.coeffs.iter().map(|c| mul_q(c, q)).collect() }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against `Φ_m`.
    /// Returns `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.as_rational() {
            return Some(Self::from_rational(self.order, q.recip()));
        }
        let modulus: Vec<Rational> =
            cyclotomic_poly(self.order).into_iter().map(Rational::from_integer).collect();
        let (g, s) = ext_gcd(trim(self.coeffs.clone()), modulus);
        // g is a nonzero constant because Φ_m is irreducible
        debug_assert_eq!(g.len(), 1);
        let c = g[0].recip();
        Some(reduce(self.order, s.into_iter().map(|x| x * &c).collect()))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.order);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    fn check_order(&self, other: &Self) {
        assert_eq!(self.order, other.order, "mixing elements of different cyclotomic fields");
    }
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
            match b.get(i) {
                Some(y) => x - y,
                None => x,
            }
        })
        .collect()
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut rem = trim(a.to_vec());
    if rem.len() < b.len() {
        return (vec![Rational::zero()], rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - db];
    for k in (db..rem.len()).rev() {
        let c = &rem[k] / &lead;
        if c.is_zero() {
            continue;
        }
        for (j, bc) in b.iter().enumerate() {
            rem[k - db + j] -= &c * bc;
        }
        quot[k - db] = c;
    }
    rem.truncate(db.max(1));
    (quot, trim(rem))
}

/// Returns `(g, s)` with `s·a ≡ g (mod m)`, `g = gcd(a, m)`.
fn ext_gcd(a: Vec<Rational>, m: Vec<Rational>) -> (Vec<Rational>, Vec<Rational>) {
    let (mut r0, mut r1) = (m, a);
    let (mut s0, mut s1) = (vec![Rational::zero()], vec![Rational::one()]);
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, r) = poly_divrem(&r0, &r1);
        let s2 = trim(poly_sub(&s0, &poly_mul(&q, &s1)));
        r0 = core::mem::replace(&mut r1, r);
        s0 = core::mem::replace(&mut s1, s2);
    }
    (r0, s0)
}

/// Product skipping the gcd work of the common zero and integer cases.
fn mul_q(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() || b.is_zero() {
        Rational::zero()
    } else if a.is_integer() && b.is_integer() {
        Rational::from_integer(a.numer() * b.numer())
    } else {
        a * b
    }
}

fn reduce(order: u32, mut p: Vec<Rational>) -> CycNumber {
    let deg = euler_phi(order);
    if p.len() > deg {
        let phi = cyclotomic_poly(order);
        for k in (deg..p.len()).rev() {
            let c = core::mem::take(&mut p[k]);
            if c.is_zero() {
                continue;
            }
            for (j, pc) in phi.iter().take(deg).enumerate() {
                p[k - deg + j] -= &c * pc;
            }
        }
    }
    p.resize(deg, Rational::zero());
    CycNumber { order, coeffs: p }
}

impl Add for &CycNumber {
    type Output = CycNumber;
    fn add(self, rhs: &CycNumber) -> CycNumber {
        self.check_order(rhs);
        CycNumber {
            order: self.order,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CycNumber {
    type Output = CycNumber;
    fn sub(self, rhs: &CycNumber) -> CycNumber {
        self.check_order(rhs);
        CycNumber {
            order: self.order,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CycNumber {
    type Output = CycNumber;
    fn mul(self, rhs: &CycNumber) -> CycNumber {
        self.check_order(rhs);
        if let Some(q) = rhs.as_rational() {
            return self.scale(q);
        }
        if let Some(q) = self.as_rational() {
            return rhs.scale(q);
        }
        reduce(self.order, poly_mul(&self.coeffs, &rhs.coeffs))
    }
}

impl Neg for &CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        CycNumber { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for CycNumber {
    type Output = CycNumber;
    fn neg(mut self) -> CycNumber {
        for c in &mut self.coeffs {
            *c = -core::mem::take(c);
        }
        self
    }
}

impl AddAssign<&CycNumber> for CycNumber {
    fn add_assign(&mut self, rhs: &CycNumber) {
        self.check_order(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&CycNumber> for CycNumber {
    fn sub_assign(&mut self, rhs: &CycNumber) {
        self.check_order(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl fmt::Debug for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{q}");
        }
        let mut first = true;
        write!(f, "(")?;
        for (k, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            if !first {
                write!(f, "{}", if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => write!(f, "ζ^{k}")?,
                _ => write!(f, "{a}*ζ^{k}")?,
            }
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int(k: i64) -> BigInt {
        BigInt::from(k)
    }

    #[test]
    fn small_cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![int(-1), int(1)]);
        assert_eq!(cyclotomic_poly(2), vec![int(1), int(1)]);
        assert_eq!(cyclotomic_poly(4), vec![int(1), int(0), int(1)]);
        assert_eq!(cyclotomic_poly(5), vec![int(1); 5]);
        assert_eq!(cyclotomic_poly(6), vec![int(1), int(-1), int(1)]);
    }

    #[test]
    fn zeta_powers() {
        assert!(CycNumber::zeta_pow(3, 0).is_one());
        assert_eq!(CycNumber::zeta_pow(2, 1), CycNumber::from_int(2, -1));
        assert_eq!(CycNumber::zeta_pow(4, 2), CycNumber::from_int(4, -1));
        assert_eq!(CycNumber::zeta_pow(5, -1), CycNumber::zeta_pow(5, 4));
    }

    #[test]
    fn zeta_is_primitive() {
        for m in 1..=8u32 {
            assert!(CycNumber::zeta_pow(m, 1).pow(m).is_one());
            for j in 1..m {
                assert!(!CycNumber::zeta_pow(m, j as i64).is_one(), "m={m} j={j}");
            }
        }
    }

    #[test]
    fn character_sums() {
        for m in 1..=7u32 {
            for i in 0..m as i64 {
                let mut s = CycNumber::zero(m);
                for j in 0..m as i64 {
                    s += &CycNumber::zeta_pow(m, i * j);
                }
                let expect = if i == 0 { m as i64 } else { 0 };
                assert_eq!(s, CycNumber::from_int(m, expect));
            }
        }
    }

    #[test]
    fn inverse_of_zero_is_none() {
        assert!(CycNumber::zero(5).inv().is_none());
    }

    fn arb_cyc(m: u32) -> impl Strategy<Value = CycNumber> {
        proptest::collection::vec((-6i64..6, 1i64..4), euler_phi(m)).prop_map(move |v| {
            CycNumber::from_coeffs(
                m,
                v.into_iter().map(|(a, b)| Rational::new(BigInt::from(a), BigInt::from(b))).collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn field_axioms((a, b, c) in (1u32..8).prop_flat_map(|m| (arb_cyc(m), arb_cyc(m), arb_cyc(m)))) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            if !a.is_zero() {
                prop_assert!((&a * &a.inv().unwrap()).is_one());
            }
        }
    }
}

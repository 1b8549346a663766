//! Exact sparse Gaussian elimination over `Q` and `Q(ζ)`.
//!
//! Rows are stored as sorted `(column, value)` lists. Elimination is
//! incremental: each incoming row is reduced against the pivots found so far,
//! so rank computations never materialise a dense matrix.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::cyclotomic::CycNumber;
use crate::Rational;

/// The exact fields the solvers run over.
pub trait Field: Clone + PartialEq + Debug {
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn one_like(&self) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; only called on nonzero values.
    fn inv(&self) -> Self;
}

impl Field for Rational {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        self.recip()
    }
}

impl Field for CycNumber {
    fn is_zero(&self) -> bool {
        CycNumber::is_zero(self)
    }
    fn is_one(&self) -> bool {
        CycNumber::is_one(self)
    }
    fn one_like(&self) -> Self {
        CycNumber::one(self.order())
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        CycNumber::inv(self).expect("inverse of zero")
    }
}

pub type SparseRow<F> = Vec<(usize, F)>;

/// `a + c·b` for sorted sparse rows.
fn axpy<F: Field>(a: &SparseRow<F>, c: &F, b: &SparseRow<F>) -> SparseRow<F> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, c.mul(&b[j].1)));
            j += 1;
        } else {
            let v = a[i].1.add(&c.mul(&b[j].1));
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Row echelon form built one row at a time. Pivot rows are normalised to a
/// leading `1`.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    ncols: usize,
    /// pivot column -> row with leading entry 1 at that column
    pivots: BTreeMap<usize, SparseRow<F>>,
}

impl<F: Field> Echelon<F> {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, pivots: BTreeMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    /// Reduces `row` against the current pivots (entries at pivot columns are
    /// eliminated one by one in increasing column order).
    pub fn reduce(&self, mut row: SparseRow<F>) -> SparseRow<F> {
        let mut k = 0;
        while k < row.len() {
            let (col, ref val) = row[k];
            if let Some(p) = self.pivots.get(&col) {
                let c = val.neg();
                row = axpy(&row, &c, p);
                // entries before k are untouched and the pivot column vanished
            } else {
                k += 1;
            }
        }
        row
    }

    /// Inserts a row; returns `true` if it raised the rank.
    pub fn insert(&mut self, row: SparseRow<F>) -> bool {
        debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
        let row = self.reduce(row);
        let Some((lead, lv)) = row.first().cloned() else {
            return false;
        };
        let inv = lv.inv();
        let row: SparseRow<F> = row.into_iter().map(|(c, v)| (c, v.mul(&inv))).collect();
        self.pivots.insert(lead, row);
        true
    }

    pub fn contains(&self, row: SparseRow<F>) -> bool {
        self.reduce(row).is_empty()
    }

    /// Fully reduced pivot rows (every pivot column is zero in the other rows).
    pub fn reduced_rows(&self) -> BTreeMap<usize, SparseRow<F>> {
        let mut rows: BTreeMap<usize, SparseRow<F>> = BTreeMap::new();
        for (&col, row) in self.pivots.iter().rev() {
            // later pivots already fully reduced; eliminate them from this row
            let mut r = row.clone();
            let mut k = 1;
            while k < r.len() {
                let (c, ref v) = r[k];
                if let Some(p) = rows.get(&c) {
                    let f = v.neg();
                    r = axpy(&r, &f, p);
                } else {
                    k += 1;
                }
            }
            rows.insert(col, r);
        }
        rows
    }

    /// A basis of the solution space of `row · v = 0` for all inserted rows,
    /// as sparse vectors indexed by column.
    pub fn kernel(&self) -> Vec<SparseRow<F>> {
        let rows = self.reduced_rows();
        let Some(one) = rows.values().next().and_then(|r| r.first()).map(|(_, v)| v.one_like())
        else {
            return Vec::new();
        };
        // free column -> list of (pivot column, -entry)
        let mut deps: BTreeMap<usize, Vec<(usize, F)>> = BTreeMap::new();
        for (&pc, r) in &rows {
            for (c, v) in r.iter().skip(1) {
                deps.entry(*c).or_default().push((pc, v.neg()));
            }
        }
        (0..self.ncols)
            .filter(|c| !rows.contains_key(c))
            .map(|f| {
                let mut v: SparseRow<F> = deps.remove(&f).unwrap_or_default();
                v.push((f, one.clone()));
                v.sort_by_key(|e| e.0);
                v
            })
            .collect()
    }
}

/// Kernel basis when the caller has no field element at hand to produce `1`
/// (e.g. an all-zero matrix): every standard vector.
pub fn kernel_with_one<F: Field>(ech: &Echelon<F>, one: &F) -> Vec<SparseRow<F>> {
    if ech.rank() == 0 {
        return (0..ech.ncols()).map(|c| alloc::vec![(c, one.clone())]).collect();
    }
    ech.kernel()
}

/// Rank of a dense matrix.
pub fn rank<F: Field>(rows: Vec<Vec<F>>, ncols: usize) -> usize {
    let mut ech = Echelon::new(ncols);
    for r in rows {
        ech.insert(to_sparse(r));
    }
    ech.rank()
}

pub fn to_sparse<F: Field>(row: Vec<F>) -> SparseRow<F> {
    row.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect()
}

/// Rank of a sparse matrix with `CycNumber` entries; elimination runs over
/// `Q` when every entry is rational.
pub fn rank_cyc(rows: &[SparseRow<CycNumber>], ncols: usize) -> usize {
    if rows.iter().all(|r| r.iter().all(|(_, v)| v.is_rational())) {
        // rank mod p never exceeds the rank over Q, so a full modular rank is
        // already the answer
        let full = rows.len().min(ncols);
        if rank_mod_p(rows.iter().map(|r| r.iter().map(|(c, v)| (*c, v.as_rational().unwrap())))) == Some(full) {
            return full;
        }
        let mut ech = Echelon::<Rational>::new(ncols);
        for r in rows {
            ech.insert(r.iter().map(|(c, v)| (*c, v.as_rational().unwrap().clone())).collect());
        }
        ech.rank()
    } else {
        let mut ech = Echelon::<CycNumber>::new(ncols);
        for r in rows {
            ech.insert(r.clone());
        }
        ech.rank()
    }
}

const P: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn inv_mod(a: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a, P - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        e >>= 1;
    }
    acc
}

fn reduce_mod(q: &Rational) -> Option<u64> {
    use num_traits::ToPrimitive;
    let p = BigInt::from(P);
    let num = q.numer().mod_floor(&p).to_u64()?;
    let den = q.denom().mod_floor(&p).to_u64()?;
    (den != 0).then(|| mul_mod(num, inv_mod(den)))
}

/// Rank over `F_p`, `p = 2^61 − 1`; `None` if a denominator vanishes mod p.
fn rank_mod_p<'a, R, I>(rows: R) -> Option<usize>
where
    R: Iterator<Item = I>,
    I: Iterator<Item = (usize, &'a Rational)>,
{
    let mut pivots: BTreeMap<usize, Vec<(usize, u64)>> = BTreeMap::new();
    for r in rows {
        let mut row: BTreeMap<usize, u64> = BTreeMap::new();
        for (c, q) in r {
            let v = reduce_mod(q)?;
            if v != 0 {
                row.insert(c, v);
            }
        }
        while let Some((&c, &v)) = row.iter().next() {
            let Some(p) = pivots.get(&c) else {
                let inv = inv_mod(v);
                pivots.insert(c, row.iter().map(|(&k, &x)| (k, mul_mod(x, inv))).collect());
                break;
            };
            for &(k, x) in p {
                let e = row.entry(k).or_insert(0);
                *e = (*e + P - mul_mod(v, x)) % P;
                if *e == 0 {
                    row.remove(&k);
                }
            }
        }
    }
    Some(pivots.len())
}

/// Kernel of the linear map whose *columns* are given (i.e. the null space of
/// `M` where `M e_k = columns[k]`), with `nrows` rows. Returns sparse vectors
/// indexed by column number.
pub fn column_kernel_cyc(
    columns: &[SparseRow<CycNumber>],
    nrows: usize,
    order: u32,
) -> Vec<SparseRow<CycNumber>> {
    // transpose into rows
    let mut rows: Vec<SparseRow<CycNumber>> = alloc::vec![Vec::new(); nrows];
    for (k, col) in columns.iter().enumerate() {
        for (r, v) in col {
            rows[*r].push((k, v.clone()));
        }
    }
    let ncols = columns.len();
    if rows.iter().all(|r| r.iter().all(|(_, v)| v.is_rational())) {
        let mut ech = Echelon::<Rational>::new(ncols);
        for r in rows {
            ech.insert(r.into_iter().map(|(c, v)| (c, v.as_rational().unwrap().clone())).collect());
        }
        kernel_with_one(&ech, &Rational::one())
            .into_iter()
            .map(|v| v.into_iter().map(|(c, q)| (c, CycNumber::from_rational(order, q))).collect())
            .collect()
    } else {
        let mut ech = Echelon::<CycNumber>::new(ncols);
        for r in rows {
            ech.insert(r);
        }
        kernel_with_one(&ech, &CycNumber::one(order))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn q(a: i64) -> Rational {
        Rational::from_integer(BigInt::from(a))
    }

    fn dense_rank_oracle(mut m: Vec<Vec<Rational>>) -> usize {
        // textbook dense elimination
        let rows = m.len();
        let cols = if rows == 0 { 0 } else { m[0].len() };
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows).find(|&i| !Zero::is_zero(&m[i][c])) else { continue };
            m.swap(r, p);
            for i in 0..rows {
                if i != r && !Zero::is_zero(&m[i][c]) {
                    let f = &m[i][c] / &m[r][c];
                    for k in 0..cols {
                        let d = &f * &m[r][k];
                        m[i][k] -= d;
                    }
                }
            }
            r += 1;
        }
        r
    }

    #[test]
    fn small_rank_and_kernel() {
        let rows = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)], vec![q(0), q(1), q(1)]];
        assert_eq!(rank(rows.clone(), 3), 2);
        let mut ech = Echelon::new(3);
        for r in &rows {
            ech.insert(to_sparse(r.clone()));
        }
        let ker = ech.kernel();
        assert_eq!(ker.len(), 1);
        for r in &rows {
            let dot: Rational = ker[0].iter().map(|(c, v)| &r[*c] * v).sum();
            assert!(Zero::is_zero(&dot));
        }
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let ech = Echelon::<Rational>::new(4);
        assert_eq!(kernel_with_one(&ech, &q(1)).len(), 4);
    }

    #[test]
    fn cyclotomic_rank() {
        // rows (1, ζ) and (ζ^2, ζ^3) are proportional over Q(ζ_5)
        let z = |e| CycNumber::zeta_pow(5, e);
        let rows = vec![vec![(0, z(0)), (1, z(1))], vec![(0, z(2)), (1, z(3))]];
        assert_eq!(rank_cyc(&rows, 2), 1);
    }

    proptest! {
        #[test]
        fn matches_dense_oracle(m in proptest::collection::vec(proptest::collection::vec(-3i64..4, 5), 0..6)) {
            let dense: Vec<Vec<Rational>> = m.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect();
            let r = rank(dense.clone(), 5);
            prop_assert_eq!(r, dense_rank_oracle(dense.clone()));
            let mut ech = Echelon::new(5);
            for row in &dense {
                ech.insert(to_sparse(row.clone()));
            }
            let ker = kernel_with_one(&ech, &q(1));
            prop_assert_eq!(ker.len(), 5 - r);
            for v in &ker {
                for row in &dense {
                    let dot: Rational = v.iter().map(|(c, x)| &row[*c] * x).sum();
                    prop_assert!(Zero::is_zero(&dot));
                }
            }
        }
    }
}

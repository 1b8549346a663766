//! The tilting bundle `T = R ⊕ R(-D_1) ⊕ … ⊕ R(-D_n)` and its endomorphism
//! algebra `A = End(T)`, stored as an `(n+1) × (n+1)` matrix of sheaf
//! homomorphisms: block `(i, j)` maps `R(-D_j) → R(-D_i)`.
//!
//! Block labels are read mod `n + 1`. Products compose blocks as
//! `(a·b)(i,j) = Σ_k a(i,k) ∘ b(k,j)`, which multiplies chart components in
//! the written order.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::chart::{ChartElement, ChartRing};
use crate::cyclotomic::CycNumber;
use crate::param::{ParamPoly, ParamSystem};
use crate::scheme::{chart_offset, DivisorData, SheafHom};
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct EndoElement {
    n: usize,
    blocks: BTreeMap<(usize, usize), SheafHom>,
}

fn wrap(n: usize, i: i64) -> usize {
    i.rem_euclid(n as i64 + 1) as usize
}

fn check_index(n: usize, i: usize, what: &'static str) -> Result<()> {
    if i > n {
        return Err(Error::IndexOutOfRange { what, index: i as i64, n });
    }
    Ok(())
}

/// `R(-D_i)`, with `R(-D_0) = R`.
pub fn summand(n: usize, i: usize) -> DivisorData {
    DivisorData::tilting_summand(n, i).expect("summand index checked by caller")
}

impl EndoElement {
    pub fn zero(n: usize) -> Self {
        EndoElement { n, blocks: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zero(n);
        for i in 0..=n {
            a.blocks.insert((i, i), SheafHom::identity(summand(n, i)));
        }
        a
    }

    /// The element whose only block is `h`, placed according to its source
    /// and target.
    pub fn from_hom(h: SheafHom) -> Result<Self> {
        let n = h.n();
        let find = |d: &DivisorData| (0..=n).find(|&k| summand(n, k) == *d);
        let (Some(i), Some(j)) = (find(h.target()), find(h.source())) else {
            return Err(Error::Invalid(format!("{} -> {} is not a block of End(T)", h.source(), h.target())));
        };
        let mut a = Self::zero(n);
        if !h.is_zero() {
            a.blocks.insert((i, j), h);
        }
        Ok(a)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Block `(i, j)`; `None` when zero.
    pub fn block(&self, i: usize, j: usize) -> Option<&SheafHom> {
        self.blocks.get(&(i, j))
    }

    /// Block `(i, j)` as a homomorphism, zero included.
    pub fn block_hom(&self, i: usize, j: usize) -> SheafHom {
        self.block(i, j).cloned().unwrap_or_else(|| SheafHom::zero(summand(self.n, j), summand(self.n, i)))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, usize), &SheafHom)> {
        self.blocks.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    fn insert_sum(&mut self, key: (usize, usize), h: SheafHom) {
        let sum = match self.blocks.remove(&key) {
            Some(old) => old.add(&h).expect("blocks share source and target"),
            None => h,
        };
        if !sum.is_zero() {
            self.blocks.insert(key, sum);
        }
    }

    pub fn add(&self, other: &EndoElement) -> EndoElement {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (&k, h) in &other.blocks {
            out.insert_sum(k, h.clone());
        }
        out
    }

    pub fn sub(&self, other: &EndoElement) -> EndoElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> EndoElement {
        self.map_blocks(SheafHom::neg)
    }

    pub fn scale(&self, c: &ParamPoly) -> EndoElement {
        self.map_blocks(|h| h.scale(c))
    }

    pub fn scale_cyc(&self, c: &CycNumber) -> EndoElement {
        self.map_blocks(|h| h.scale_cyc(c))
    }

    fn map_blocks(&self, mut f: impl FnMut(&SheafHom) -> SheafHom) -> EndoElement {
        let mut out = Self::zero(self.n);
        for (&k, h) in &self.blocks {
            let img = f(h);
            if !img.is_zero() {
                out.blocks.insert(k, img);
            }
        }
        out
    }

    pub fn mul(&self, other: &EndoElement) -> EndoElement {
        assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.n);
        for (&(i, k), a) in &self.blocks {
            for (&(_, j), b) in other.blocks.range((k, 0)..=(k, self.n)) {
                out.insert_sum((i, j), a.compose(b).expect("block shapes agree"));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> EndoElement {
        (0..e).fold(Self::identity(self.n), |acc, _| acc.mul(self))
    }

    /// `e_i · self · e_j`, labels mod `n + 1`.
    pub fn project(&self, i: i64, j: i64) -> EndoElement {
        let key = (wrap(self.n, i), wrap(self.n, j));
        let mut out = Self::zero(self.n);
        if let Some(h) = self.blocks.get(&key) {
            out.blocks.insert(key, h.clone());
        }
        out
    }

    /// Every block glues.
    pub fn glue_check(&self) -> bool {
        self.blocks.values().all(SheafHom::glue_check)
    }
}

impl fmt::Debug for EndoElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return write!(f, "0");
        }
        for (idx, ((i, j), h)) in self.blocks.iter().enumerate() {
            if idx > 0 {
                write!(f, "; ")?;
            }
            write!(f, "[{i},{j}] {h:?}")?;
        }
        Ok(())
    }
}

/// `e^t_i`, the projection onto `R(-D_i)`.
pub fn make_idempotent(n: usize, i: usize) -> Result<EndoElement> {
    check_index(n, i, "idempotent")?;
    let mut a = EndoElement::zero(n);
    a.blocks.insert((i, i), SheafHom::identity(summand(n, i)));
    Ok(a)
}

/// `c_0 t_0 + Σ_{a ≤ k ≤ b} t_k` as a linear form.
fn t_run(n: usize, c0: i64, a: usize, b: usize) -> ParamPoly {
    let mut lin = alloc::vec![0i64; n + 1];
    lin[0] = c0;
    for k in a..=b.min(n) {
        lin[k] += 1;
    }
    ParamPoly::linear(ParamSystem::T, n, &lin)
}

fn xy_plus(n: usize, k: usize, c: ParamPoly) -> ChartElement {
    let r = ChartRing::chart(n, k).unwrap();
    ChartElement::monomial(r, 1, 1, ParamPoly::one(ParamSystem::T, n)).unwrap().add(&ChartElement::constant(r, c)).unwrap()
}

/// The chart components of `α_{i,i+1}: R(-D_{i+1}) → R(-D_i)`.
pub fn alpha_components(n: usize, i: usize) -> Vec<ChartElement> {
    (0..=n)
        .map(|k| {
            let r = ChartRing::chart(n, k).unwrap();
            if k < i {
                // x_k y_k + (i-k-1) t_0 + t_{k+1} + … + t_i
                xy_plus(n, k, t_run(n, i as i64 - k as i64 - 1, k + 1, i))
            } else if k == i {
                ChartElement::x(r)
            } else {
                ChartElement::one(r)
            }
        })
        .collect()
}

/// The chart components of `β_{i+1,i}: R(-D_i) → R(-D_{i+1})`.
pub fn beta_components(n: usize, i: usize) -> Vec<ChartElement> {
    (0..=n)
        .map(|k| {
            let r = ChartRing::chart(n, k).unwrap();
            if k < i {
                ChartElement::one(r)
            } else if k == i {
                ChartElement::y(r)
            } else {
                // x_k y_k − (k-i) t_0 − t_{i+1} − … − t_k
                xy_plus(n, k, -&t_run(n, k as i64 - i as i64, i + 1, k))
            }
        })
        .collect()
}

/// `α^t_{i,i+1}`, in block `(i, i+1 mod n+1)`.
pub fn make_alpha(n: usize, i: usize) -> Result<EndoElement> {
    check_index(n, i, "alpha")?;
    let h = SheafHom::new(summand(n, wrap(n, i as i64 + 1)), summand(n, i), alpha_components(n, i))?;
    EndoElement::from_hom(h)
}

/// `β^t_{i+1,i}`, in block `(i+1 mod n+1, i)`.
pub fn make_beta(n: usize, i: usize) -> Result<EndoElement> {
    check_index(n, i, "beta")?;
    let h = SheafHom::new(summand(n, i), summand(n, wrap(n, i as i64 + 1)), beta_components(n, i))?;
    EndoElement::from_hom(h)
}

/// `u^t = Σ α^t_{i,i+1}`.
pub fn make_u(n: usize) -> EndoElement {
    (0..=n).fold(EndoElement::zero(n), |acc, i| acc.add(&make_alpha(n, i).unwrap()))
}

/// `v^t = Σ β^t_{i+1,i}`.
pub fn make_v(n: usize) -> EndoElement {
    (0..=n).fold(EndoElement::zero(n), |acc, i| acc.add(&make_beta(n, i).unwrap()))
}

/// `g^t = Σ ζ^{-i} e^t_i`.
pub fn make_g(n: usize) -> EndoElement {
    let order = n as u32 + 1;
    (0..=n).fold(EndoElement::zero(n), |acc, i| {
        acc.add(&make_idempotent(n, i).unwrap().scale_cyc(&CycNumber::zeta_pow(order, -(i as i64))))
    })
}

/// The chart-0 components of all blocks, zero blocks included.
pub fn matrix_form_chart0(a: &EndoElement) -> Vec<Vec<ChartElement>> {
    let r0 = ChartRing::chart(a.n, 0).unwrap();
    (0..=a.n)
        .map(|i| {
            (0..=a.n)
                .map(|j| a.block(i, j).map(|h| h.component(0).clone()).unwrap_or_else(|| ChartElement::zero(r0)))
                .collect()
        })
        .collect()
}

fn diagonal0(n: usize, entries: Vec<ChartElement>) -> Vec<Vec<ChartElement>> {
    let r0 = ChartRing::chart(n, 0).unwrap();
    entries
        .into_iter()
        .enumerate()
        .map(|(i, e)| (0..=n).map(|j| if i == j { e.clone() } else { ChartElement::zero(r0) }).collect())
        .collect()
}

/// Closed forms for the chart-0 matrices of `u^t` and `v^t`: `u^t` has
/// `x_0` at `(0,1)` and `x_0 y_0 + (i-1) t_0 + t_1 + … + t_i` at
/// `(i, i+1)` for `i ≥ 1`; `v^t` has `y_0` at `(1,0)` and `1` elsewhere on
/// its cyclic subdiagonal.
pub fn predicted_uv_matrices(n: usize) -> (Vec<Vec<ChartElement>>, Vec<Vec<ChartElement>>) {
    let r0 = ChartRing::chart(n, 0).unwrap();
    let mut mu = alloc::vec![alloc::vec![ChartElement::zero(r0); n + 1]; n + 1];
    let mut mv = mu.clone();
    for i in 0..=n {
        let up = wrap(n, i as i64 + 1);
        mu[i][up] = if i == 0 { ChartElement::x(r0) } else { xy_plus(n, 0, t_run(n, i as i64 - 1, 1, i)) };
        mv[up][i] = if i == 0 { ChartElement::y(r0) } else { ChartElement::one(r0) };
    }
    (mu, mv)
}

/// Closed forms for the chart-0 diagonals of `u^t v^t`, `v^t u^t` and their
/// difference `diag(-(n-1)t_0 - t_1 - … - t_n, t_0 + t_1, …, t_0 + t_n)`.
pub fn predicted_uv_diagonals(n: usize) -> [Vec<Vec<ChartElement>>; 3] {
    let r0 = ChartRing::chart(n, 0).unwrap();
    let uv = (0..=n).map(|i| if i == 0 { xy_plus(n, 0, ParamPoly::zero(ParamSystem::T, n)) } else { xy_plus(n, 0, t_run(n, i as i64 - 1, 1, i)) });
    let vu = (0..=n).map(|i| match i {
        0 => xy_plus(n, 0, t_run(n, n as i64 - 1, 1, n)),
        1 => xy_plus(n, 0, t_run(n, -1, 1, 0)),
        _ => xy_plus(n, 0, t_run(n, i as i64 - 2, 1, i - 1)),
    });
    let comm = (0..=n).map(|i| {
        let mut c = alloc::vec![0i64; n + 1];
        if i == 0 {
            c[0] = 1 - n as i64;
            c.iter_mut().skip(1).for_each(|x| *x = -1);
        } else {
            c[0] = 1;
            c[i] = 1;
        }
        ChartElement::constant(r0, ParamPoly::linear(ParamSystem::T, n, &c))
    });
    [diagonal0(n, uv.collect()), diagonal0(n, vu.collect()), diagonal0(n, comm.collect())]
}

/// `(x^t_{i,i}, y^t_{i,i}, z^t_{i,i}) = e_i (u^{n+1}, v^{n+1}, uv) e_i`.
pub fn make_xyz(n: usize, i: usize) -> Result<(EndoElement, EndoElement, EndoElement)> {
    check_index(n, i, "xyz")?;
    let e = make_idempotent(n, i)?;
    let (u, v) = (make_u(n), make_v(n));
    let m = n as u32 + 1;
    let sandwich = |a: &EndoElement| e.mul(a).mul(&e);
    Ok((sandwich(&u.pow(m)), sandwich(&v.pow(m)), sandwich(&u.mul(&v))))
}

/// Leading part of a chart element for the weights `deg x = wx`,
/// `deg y = wy`, `deg t = 0`.
pub fn weighted_leading_part(e: &ChartElement, wx: i64, wy: i64) -> ChartElement {
    let Some(top) = e.terms().map(|(&(l, m), _)| wx * l + wy * m).max() else { return e.clone() };
    e.filter(|l, m, _| wx * l + wy * m == top)
}

/// The path of arrows from vertex `j` to vertex `i` used by the division
/// algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Path {
    /// `i = j`.
    Trivial,
    /// `β_{i,i-1} ⋯ β_{j+1,j}`.
    Betas,
    /// `α_{i,i+1} ⋯ α_{j-1,j}`.
    Alphas,
}

/// `(z_{i,i})^z (x_{i,i})^x (y_{i,i})^y · path(j → i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorWord {
    pub target: usize,
    pub source: usize,
    pub z: u32,
    pub x: u32,
    pub y: u32,
    pub path: Path,
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = self.target;
        let mut parts: Vec<String> = Vec::new();
        for (sym, e) in [('z', self.z), ('x', self.x), ('y', self.y)] {
            match e {
                0 => {}
                1 => parts.push(format!("{sym}[{i},{i}]")),
                _ => parts.push(format!("{sym}[{i},{i}]^{e}")),
            }
        }
        match self.path {
            Path::Trivial => {}
            Path::Betas => parts.push(format!("beta[{i}->{}]", self.source)),
            Path::Alphas => parts.push(format!("alpha[{i}->{}]", self.source)),
        }
        if parts.is_empty() {
            parts.push(format!("e[{i}]"));
        }
        write!(f, "{}", parts.join("*"))
    }
}

/// Which branch of the case analysis peeled a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReductionCase {
    /// Diagonal block, principal degree `≤ 0`: chart 0 with `y, z`.
    DiagonalLow,
    /// Diagonal block, principal degree `> 0`: chart `n` with `x, z`.
    DiagonalHigh,
    /// `deg r_0 ≤ 0` and `0 ≠ j < i` or `i = 0`.
    I,
    /// `deg r_0 < 0` and `0 ≠ i < j` or `j = 0`.
    II,
    /// `deg r_n ≥ 0` and `i < j` or `j = 0`.
    IPrime,
    /// `deg r_n > 0` and `0 ≠ j < i`.
    IIPrime,
}

/// An expression of a block homomorphism in the generators.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub terms: Vec<(ParamPoly, GeneratorWord)>,
    pub cases: Vec<ReductionCase>,
    /// Zero when the division succeeded.
    pub remainder: SheafHom,
}

impl Reduction {
    pub fn succeeded(&self) -> bool {
        self.remainder.is_zero()
    }
}

/// The quiver generators of `A` for one `n`, with cached powers and paths.
pub struct Generators {
    n: usize,
    alpha: Vec<SheafHom>,
    beta: Vec<SheafHom>,
    xyz: Vec<[Vec<SheafHom>; 3]>,
    paths: BTreeMap<(usize, usize, Path), SheafHom>,
    words: BTreeMap<GeneratorWord, SheafHom>,
}

impl Generators {
    pub fn new(n: usize) -> Self {
        let alpha: Vec<SheafHom> = (0..=n).map(|i| make_alpha(n, i).unwrap().block_hom(i, wrap(n, i as i64 + 1))).collect();
        let beta: Vec<SheafHom> = (0..=n).map(|i| make_beta(n, i).unwrap().block_hom(wrap(n, i as i64 + 1), i)).collect();
        let xyz = (0..=n)
            .map(|i| {
                let (x, y, z) = make_xyz(n, i).unwrap();
                let id = SheafHom::identity(summand(n, i));
                [x, y, z].map(|g| alloc::vec![id.clone(), g.block_hom(i, i)])
            })
            .collect();
        Generators { n, alpha, beta, xyz, paths: BTreeMap::new(), words: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self, i: usize) -> &SheafHom {
        &self.alpha[i]
    }

    pub fn beta(&self, i: usize) -> &SheafHom {
        &self.beta[i]
    }

    /// `(x, y, z)_{i,i}^e` for `which = 0, 1, 2`.
    fn power(&mut self, i: usize, which: usize, e: u32) -> SheafHom {
        let pows = &mut self.xyz[i][which];
        while pows.len() <= e as usize {
            let next = pows.last().unwrap().compose(&pows[1]).unwrap();
            pows.push(next);
        }
        pows[e as usize].clone()
    }

    fn path(&mut self, i: usize, j: usize, path: Path) -> SheafHom {
        let n = self.n;
        if let Some(p) = self.paths.get(&(i, j, path)) {
            return p.clone();
        }
        let m = n as i64 + 1;
        let p = match path {
            Path::Trivial => SheafHom::identity(summand(n, i)),
            Path::Betas => {
                // β_{i,i-1} ∘ … ∘ β_{j+1,j}
                let len = (i as i64 - j as i64).rem_euclid(m);
                let mut acc = SheafHom::identity(summand(n, j));
                for s in 0..len {
                    acc = self.beta[wrap(n, j as i64 + s)].compose(&acc).unwrap();
                }
                acc
            }
            Path::Alphas => {
                // α_{i,i+1} ∘ … ∘ α_{j-1,j}
                let len = (j as i64 - i as i64).rem_euclid(m);
                let mut acc = SheafHom::identity(summand(n, j));
                for s in 1..=len {
                    acc = self.alpha[wrap(n, j as i64 - s)].compose(&acc).unwrap();
                }
                acc
            }
        };
        self.paths.insert((i, j, path), p.clone());
        p
    }

    pub fn evaluate(&mut self, w: &GeneratorWord) -> &SheafHom {
        if !self.words.contains_key(w) {
            let i = w.target;
            let z = self.power(i, 2, w.z);
            let x = self.power(i, 0, w.x);
            let y = self.power(i, 1, w.y);
            let p = self.path(i, w.source, w.path);
            let h = z.compose(&x).unwrap().compose(&y).unwrap().compose(&p).unwrap();
            self.words.insert(w.clone(), h);
        }
        &self.words[w]
    }

    /// The homomorphism `Σ c · word`.
    pub fn evaluate_sum(&mut self, terms: &[(ParamPoly, GeneratorWord)], i: usize, j: usize) -> SheafHom {
        let mut acc = SheafHom::zero(summand(self.n, j), summand(self.n, i));
        for (c, w) in terms {
            acc = acc.add(&self.evaluate(w).scale(c)).unwrap();
        }
        acc
    }
}

/// Top term `(l, m, coeff)` of `e` in the filtration `deg x = deg y = 1`;
/// unique for principal-homogeneous `e`.
fn secondary_leading(e: &ChartElement) -> Option<(i64, i64, ParamPoly)> {
    let top = e.filtration_degree()?;
    let (&(l, m), c) = e.terms().find(|(&(l, m), _)| l + m == top)?;
    Some((l, m, c.clone()))
}

/// Selects the chart, path and generator exponents for one step, following
/// the case analysis on principal degrees.
fn choose_case(n: usize, i: usize, j: usize, p0: i64, pn: i64) -> Option<(ReductionCase, usize, Path)> {
    if i == j {
        return Some(if p0 <= 0 { (ReductionCase::DiagonalLow, 0, Path::Trivial) } else { (ReductionCase::DiagonalHigh, n, Path::Trivial) });
    }
    if p0 <= 0 && ((j != 0 && j < i) || i == 0) {
        Some((ReductionCase::I, 0, Path::Betas))
    } else if p0 < 0 && ((i != 0 && i < j) || j == 0) {
        Some((ReductionCase::II, 0, Path::Betas))
    } else if pn >= 0 && (i < j || j == 0) {
        Some((ReductionCase::IPrime, n, Path::Alphas))
    } else if pn > 0 && j != 0 && j < i {
        Some((ReductionCase::IIPrime, n, Path::Alphas))
    } else {
        None
    }
}

/// Expresses `h ∈ A_{i,j}` through `z, y, β` (chart 0) and `z, x, α`
/// (chart `n`) by peeling the secondary-leading term of each
/// principal-homogeneous part.
pub fn reduce_to_generators(gens: &mut Generators, h: &SheafHom) -> Result<Reduction> {
    let n = gens.n;
    let find = |d: &DivisorData| (0..=n).find(|&k| summand(n, k) == *d);
    let (Some(i), Some(j)) = (find(h.target()), find(h.source())) else {
        return Err(Error::Invalid(format!("{} -> {} is not a block of End(T)", h.source(), h.target())));
    };
    // A homomorphism is determined by any one chart component, so each
    // principal part is divided on the chart its case selects. The full
    // remainder is recomputed at the end; it vanishes only if `h` is the
    // (glued) combination of the words.
    let off_n = chart_offset(h.source(), h.target(), n).principal;
    let mut terms = Vec::new();
    let mut cases = Vec::new();
    let mut stuck = false;
    for (p0, _) in h.component(0).principal_parts() {
        let pn = p0 + off_n;
        let Some((case, chart, path)) = choose_case(n, i, j, p0, pn) else {
            stuck = true;
            continue;
        };
        let pk = p0 + chart_offset(h.source(), h.target(), chart).principal;
        let mut part = h.component(chart).filter(|l, m, _| l - m == pk);
        let guard = part.filtration_degree().unwrap_or(0).max(0) as usize / 2 + 2;
        let path_lead = secondary_leading(gens.path(i, j, path).component(chart)).unwrap();
        // chart 0 and chart n coincide when n = 0, so the side follows the case
        let low_side = matches!(case, ReductionCase::DiagonalLow | ReductionCase::I | ReductionCase::II);
        let mut steps = 0;
        while !part.is_zero() {
            steps += 1;
            if steps > guard {
                return Err(Error::ReductionDiverged { steps });
            }
            let (l, m, a) = secondary_leading(&part).unwrap();
            let mut word = GeneratorWord { target: i, source: j, z: 0, x: 0, y: 0, path };
            let ok = if low_side {
                // (xy)^b y^{c'} · path, path_0 ∈ {1, y_0}
                word.z = l as u32;
                let c = m - l - path_lead.1;
                word.y = c.max(0) as u32;
                l >= 0 && c >= 0
            } else {
                // (xy)^b x^{c'} · path, path_n ∈ {1, x_n}
                word.z = m as u32;
                let c = l - m - path_lead.0;
                word.x = c.max(0) as u32;
                m >= 0 && c >= 0
            };
            if !ok {
                stuck = true;
                break;
            }
            let wc = gens.evaluate(&word).component(chart);
            let lead = wc.coeff(l, m).filter(|c| c.degree() == Some(0) && wc.filtration_degree() == Some(l + m));
            let Some(lead) = lead else {
                return Err(Error::ReductionStuck(format!("{word} does not lead with x^{l} y^{m} on chart {chart}")));
            };
            let c = a.scale(&lead.constant_term().inv().unwrap());
            part = part.sub(&wc.scale(&c))?;
            terms.push((c, word));
            cases.push(case);
        }
    }
    let mut remainder = h.clone();
    for (c, w) in &terms {
        remainder = remainder.sub(&gens.evaluate(w).scale(c))?;
    }
    debug_assert!(stuck || remainder.is_zero());
    Ok(Reduction { terms, cases, remainder })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lin(n: usize, c: &[i64]) -> ParamPoly {
        ParamPoly::linear(ParamSystem::T, n, c)
    }

    fn diag0(n: usize, entries: &[ChartElement]) -> Vec<Vec<ChartElement>> {
        let r0 = ChartRing::chart(n, 0).unwrap();
        (0..=n).map(|i| (0..=n).map(|j| if i == j { entries[i].clone() } else { ChartElement::zero(r0) }).collect()).collect()
    }

    fn xy0(n: usize, c: ParamPoly) -> ChartElement {
        xy_plus(n, 0, c)
    }

    #[test]
    fn idempotents_decompose_identity() {
        for n in 0..=4 {
            let mut sum = EndoElement::zero(n);
            for i in 0..=n {
                let e = make_idempotent(n, i).unwrap();
                assert_eq!(e.mul(&e), e);
                for j in 0..=n {
                    if i != j {
                        assert!(e.mul(&make_idempotent(n, j).unwrap()).is_zero());
                    }
                }
                sum = sum.add(&e);
            }
            assert_eq!(sum, EndoElement::identity(n));
        }
        assert!(make_idempotent(2, 3).is_err());
    }

    #[test]
    fn alpha_beta_glue() {
        for n in 0..=4 {
            for i in 0..=n {
                let a = make_alpha(n, i).unwrap();
                let b = make_beta(n, i).unwrap();
                assert!(a.glue_check(), "alpha n={n} i={i}");
                assert!(b.glue_check(), "beta n={n} i={i}");
                assert!(a.block(i, wrap(n, i as i64 + 1)).is_some());
                assert!(b.block(wrap(n, i as i64 + 1), i).is_some());
            }
        }
    }

    #[test]
    fn alpha_beta_tables() {
        let n = 3;
        let r = |k| ChartRing::chart(n, k).unwrap();
        let a01 = alpha_components(n, 0);
        assert_eq!(a01[0], ChartElement::x(r(0)));
        assert!(a01[1..].iter().all(ChartElement::is_one));
        let b10 = beta_components(n, 0);
        assert_eq!(b10[0], ChartElement::y(r(0)));
        assert_eq!(b10[1], xy_plus(n, 1, lin(n, &[-1, -1, 0, 0])));
        assert_eq!(b10[2], xy_plus(n, 2, lin(n, &[-2, -1, -1, 0])));
    }

    #[test]
    fn perturbed_alpha_fails() {
        let n = 2;
        let mut comps = alpha_components(n, 1);
        comps[0] = xy_plus(n, 0, lin(n, &[0, 1, 1]));
        let h = SheafHom::new(summand(n, 2), summand(n, 1), comps).unwrap();
        assert_eq!(h.first_glue_failure(), Some(1));
    }

    #[test]
    fn quiver_shape() {
        for n in 0..=4 {
            let (u, v) = (make_u(n), make_v(n));
            for (&(i, j), _) in u.blocks() {
                assert_eq!(j, wrap(n, i as i64 + 1));
            }
            for (&(i, j), _) in v.blocks() {
                assert_eq!(j, wrap(n, i as i64 - 1));
            }
            assert_eq!(u.blocks().count(), n + 1);
            assert_eq!(v.blocks().count(), n + 1);
        }
    }

    #[test]
    fn matrix_forms() {
        let n = 1;
        let r0 = ChartRing::chart(n, 0).unwrap();
        let mu = matrix_form_chart0(&make_u(n));
        assert!(mu[0][0].is_zero() && mu[1][1].is_zero());
        assert_eq!(mu[0][1], ChartElement::x(r0));
        assert_eq!(mu[1][0], xy0(n, lin(n, &[0, 1])));
        assert_eq!(matrix_form_chart0(&EndoElement::identity(2)), diag0(2, &alloc::vec![ChartElement::one(ChartRing::chart(2, 0).unwrap()); 3]));
        for n in 1..=4 {
            let r0 = ChartRing::chart(n, 0).unwrap();
            let mu = matrix_form_chart0(&make_u(n));
            let mv = matrix_form_chart0(&make_v(n));
            for i in 0..=n {
                for j in 0..=n {
                    let want_u = if j == i + 1 && i == 0 {
                        ChartElement::x(r0)
                    } else if j == wrap(n, i as i64 + 1) {
                        // x_0 y_0 + (i-1) t_0 + t_1 + … + t_i
                        xy0(n, t_run(n, i as i64 - 1, 1, i))
                    } else {
                        ChartElement::zero(r0)
                    };
                    assert_eq!(mu[i][j], want_u, "u n={n} ({i},{j})");
                    let want_v = if i == 1 && j == 0 {
                        ChartElement::y(r0)
                    } else if j == wrap(n, i as i64 - 1) {
                        ChartElement::one(r0)
                    } else {
                        ChartElement::zero(r0)
                    };
                    assert_eq!(mv[i][j], want_v, "v n={n} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn uv_diagonals() {
        for n in 1..=4 {
            let (u, v) = (make_u(n), make_v(n));
            let (uv, vu) = (u.mul(&v), v.mul(&u));
            let uv_want: Vec<_> = (0..=n).map(|i| if i == 0 { xy0(n, ParamPoly::zero(ParamSystem::T, n)) } else { xy0(n, t_run(n, i as i64 - 1, 1, i)) }).collect();
            let vu_want: Vec<_> = (0..=n)
                .map(|i| match i {
                    0 => xy0(n, t_run(n, n as i64 - 1, 1, n)),
                    1 => xy0(n, lin(n, &{ let mut c = alloc::vec![0; n + 1]; c[0] = -1; c })),
                    _ => xy0(n, t_run(n, i as i64 - 2, 1, i - 1)),
                })
                .collect();
            let r0 = ChartRing::chart(n, 0).unwrap();
            let comm_want: Vec<_> = (0..=n)
                .map(|i| {
                    let mut c = alloc::vec![1i64; n + 1];
                    if i == 0 {
                        c[0] = -(n as i64 - 1);
                        c.iter_mut().skip(1).for_each(|x| *x = -1);
                    } else {
                        c.iter_mut().enumerate().skip(1).for_each(|(k, x)| *x = (k == i) as i64);
                    }
                    ChartElement::constant(r0, lin(n, &c))
                })
                .collect();
            assert_eq!(matrix_form_chart0(&uv), diag0(n, &uv_want), "uv n={n}");
            assert_eq!(matrix_form_chart0(&vu), diag0(n, &vu_want), "vu n={n}");
            assert_eq!(matrix_form_chart0(&uv.sub(&vu)), diag0(n, &comm_want), "[u,v] n={n}");
        }
        let n = 1;
        let r0 = ChartRing::chart(n, 0).unwrap();
        let c = matrix_form_chart0(&make_u(n).mul(&make_v(n)).sub(&make_v(n).mul(&make_u(n))));
        assert_eq!(c[0][0], ChartElement::constant(r0, lin(n, &[0, -1])));
        assert_eq!(c[1][1], ChartElement::constant(r0, lin(n, &[1, 1])));
    }

    #[test]
    fn group_element() {
        for n in 0..=4 {
            let g = make_g(n);
            let order = n as u32 + 1;
            for j in 1..=n as u32 {
                assert_ne!(g.pow(j), EndoElement::identity(n));
            }
            assert_eq!(g.pow(order), EndoElement::identity(n));
            let zeta = CycNumber::zeta_pow(order, 1);
            let (u, v) = (make_u(n), make_v(n));
            assert_eq!(g.mul(&u), u.mul(&g).scale_cyc(&zeta));
            assert_eq!(g.mul(&v), v.mul(&g).scale_cyc(&zeta.inv().unwrap()));
            for i in 0..=n {
                // e_i = Σ_j ζ^{ij} g^j / (n+1)
                let mut sum = EndoElement::zero(n);
                for j in 0..=n as u32 {
                    sum = sum.add(&g.pow(j).scale_cyc(&CycNumber::zeta_pow(order, (i as i64) * j as i64)));
                }
                let inv = CycNumber::from_int(order, order as i64).inv().unwrap();
                assert_eq!(sum.scale_cyc(&inv), make_idempotent(n, i).unwrap());
            }
        }
    }

    #[test]
    fn arrow_relations() {
        for n in 1..=4 {
            let (u, v) = (make_u(n), make_v(n));
            let m = n as u32 + 1;
            for i in 0..=n {
                let e = |k: i64| make_idempotent(n, wrap(n, k)).unwrap();
                let a = make_alpha(n, i).unwrap();
                let b = make_beta(n, i).unwrap();
                assert_eq!(a, e(i as i64).mul(&u).mul(&e(i as i64 + 1)));
                assert_eq!(b, e(i as i64 + 1).mul(&v).mul(&e(i as i64)));
                assert_eq!(e(i as i64).mul(&u), u.mul(&e(i as i64 + 1)));
                assert_eq!(e(i as i64).mul(&v), v.mul(&e(i as i64 - 1)));
                assert_eq!(a.mul(&b), u.mul(&v).mul(&e(i as i64)));
                assert_eq!(b.mul(&a), v.mul(&u).mul(&e(i as i64 + 1)));
                let apath = (0..m as i64).fold(e(i as i64), |acc, k| acc.mul(&make_alpha(n, wrap(n, i as i64 + k)).unwrap()));
                assert_eq!(apath, u.pow(m).mul(&e(i as i64)));
                let bpath = (0..m as i64).fold(e(i as i64), |acc, k| acc.mul(&make_beta(n, wrap(n, i as i64 - k - 1)).unwrap()));
                assert_eq!(bpath, v.pow(m).mul(&e(i as i64)));
            }
        }
    }

    #[test]
    fn xyz_components() {
        for n in 1..=4 {
            let rn = ChartRing::chart(n, n).unwrap();
            let r0 = ChartRing::chart(n, 0).unwrap();
            for i in 0..=n {
                let (x, y, z) = make_xyz(n, i).unwrap();
                let (x, y, z) = (x.block_hom(i, i), y.block_hom(i, i), z.block_hom(i, i));
                assert_eq!(x.component(n), &ChartElement::x(rn));
                assert_eq!(y.component(0), &ChartElement::y(r0));
                let z0 = if i == 0 { xy0(n, ParamPoly::zero(ParamSystem::T, n)) } else { xy0(n, t_run(n, i as i64 - 1, 1, i)) };
                assert_eq!(z.component(0), &z0);
                let zn = if i == n { xy_plus(n, n, ParamPoly::zero(ParamSystem::T, n)) } else { xy_plus(n, n, -&t_run(n, n as i64 - i as i64, i + 1, n)) };
                assert_eq!(z.component(n), &zn);
            }
            let (x, y, z) = make_xyz(n, 0).unwrap();
            let (x, y, z) = (x.block_hom(0, 0), y.block_hom(0, 0), z.block_hom(0, 0));
            // (x^t)_0 = x_0 ∏ (x_0 y_0 + (i-1) t_0 + t_1 + … + t_i)
            let factors: Vec<_> = (1..=n).map(|i| xy0(n, t_run(n, i as i64 - 1, 1, i))).collect();
            let prod = factors.iter().fold(ChartElement::x(r0), |acc, f| acc.mul(f).unwrap());
            assert_eq!(x.component(0), &prod);
            for a in &factors {
                for b in &factors {
                    assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
                }
            }
            // (y^t)_n = y_n ∏ (x_n y_n − (n+1-i) t_0 − t_i − … − t_n)
            let yprod = (1..=n).fold(ChartElement::y(rn), |acc, i| acc.mul(&xy_plus(n, n, -&t_run(n, n as i64 + 1 - i as i64, i, n))).unwrap());
            assert_eq!(y.component(n), &yprod);
            let zn = xy_plus(n, n, -&t_run(n, n as i64, 1, n));
            assert_eq!(z.component(n), &zn);
            // x·y ≡ z^{n+1} under deg(x_0, y_0) = (1-n, n+1)
            let w = (1 - n as i64, n as i64 + 1);
            let lhs = weighted_leading_part(&x.component(0).mul(y.component(0)).unwrap(), w.0, w.1);
            let rhs = weighted_leading_part(&z.component(0).pow(n as u32 + 1), w.0, w.1);
            assert_eq!(lhs, rhs);
        }
    }

    fn check_reduces(gens: &mut Generators, h: &SheafHom) -> Reduction {
        let red = reduce_to_generators(gens, h).unwrap();
        assert!(red.succeeded(), "remainder {:?}", red.remainder);
        let n = gens.n();
        let find = |d: &DivisorData| (0..=n).find(|&k| summand(n, k) == *d).unwrap();
        assert_eq!(&gens.evaluate_sum(&red.terms, find(h.target()), find(h.source())), h);
        red
    }

    #[test]
    fn reduces_generators() {
        for n in 0..=3 {
            let mut gens = Generators::new(n);
            for i in 0..=n {
                let (_, _, z) = make_xyz(n, i).unwrap();
                let red = check_reduces(&mut gens, &z.block_hom(i, i));
                assert_eq!(red.terms.len(), 1);
                assert_eq!(red.terms[0].1.z, 1);
                let ab = make_alpha(n, i).unwrap().mul(&make_beta(n, i).unwrap()).block_hom(i, i);
                let red = check_reduces(&mut gens, &ab);
                assert_eq!(red.terms, alloc::vec![(ParamPoly::one(ParamSystem::T, n), GeneratorWord { target: i, source: i, z: 1, x: 0, y: 0, path: Path::Trivial })]);
                let a = make_alpha(n, i).unwrap();
                let (bi, bj) = (i, wrap(n, i as i64 + 1));
                check_reduces(&mut gens, &a.block_hom(bi, bj));
                let b = make_beta(n, i).unwrap();
                check_reduces(&mut gens, &b.block_hom(bj, bi));
            }
        }
    }

    #[test]
    fn case_split_exercised() {
        let n = 2;
        let mut gens = Generators::new(n);
        let mut seen = alloc::collections::BTreeSet::new();
        let hs: Vec<(usize, usize, EndoElement)> = alloc::vec![
            (2, 1, make_beta(n, 1).unwrap()),
            (1, 2, make_alpha(n, 1).unwrap()),
            (1, 2, make_alpha(n, 1).unwrap().mul(&make_xyz(n, 2).unwrap().1)),
            (2, 1, make_beta(n, 1).unwrap().mul(&make_xyz(n, 1).unwrap().0)),
        ];
        for (i, j, a) in hs {
            seen.extend(check_reduces(&mut gens, &a.block_hom(i, j)).cases);
        }
        for c in [ReductionCase::I, ReductionCase::II, ReductionCase::IPrime, ReductionCase::IIPrime] {
            assert!(seen.contains(&c), "{c:?} not reached: {seen:?}");
        }
    }

    fn arb_word(n: usize) -> impl Strategy<Value = Vec<(u8, usize)>> {
        proptest::collection::vec((0u8..6, 0..=n), 1..=6)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn random_products_reduce(n in 1usize..=3, word in (1usize..=3).prop_flat_map(arb_word), c in -3i64..4) {
            let word: Vec<_> = word.into_iter().map(|(g, i)| (g, i.min(n))).collect();
            let mut a = EndoElement::identity(n);
            for &(g, i) in &word {
                let f = match g {
                    0 => make_idempotent(n, i).unwrap(),
                    1 => make_alpha(n, i).unwrap(),
                    2 => make_beta(n, i).unwrap(),
                    3 => make_xyz(n, i).unwrap().0,
                    4 => make_xyz(n, i).unwrap().1,
                    _ => make_xyz(n, i).unwrap().2,
                };
                a = a.mul(&f);
            }
            let a = a.add(&a.mul(&make_u(n)).scale(&lin(n, &{ let mut v = alloc::vec![0; n + 1]; v[n] = c; v })));
            let mut gens = Generators::new(n);
            for (_, h) in a.blocks() {
                check_reduces(&mut gens, h);
            }
        }
    }
}

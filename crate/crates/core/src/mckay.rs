//! The comparison homomorphism `φ: S → A = End(T)`,
//! `e^s_i ↦ e^t_i, u ↦ u^t, v ↦ v^t, g ↦ g^t`, over the parameter change
//! `s_i = 1/(n+1) Σ_j ζ^{ij} w_j` with `w_0 = −(n−1)t_0 − t_1 − … − t_n`,
//! `w_j = t_0 + t_j`; and finite evidence that it is bijective.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use rand::Rng;

use crate::cbh::{self, SElement};
use crate::chart::ChartElement;
use crate::cyclotomic::CycNumber;
use crate::endo::{self, EndoElement, Generators, ReductionCase};
use crate::linalg::{rank_cyc, SparseRow};
use crate::param::{s_in_w, w_in_t, ParamPoly, ParamSystem};
use crate::scheme::{hom_basis, Bounds};
use crate::{Rational, Result};

/// `φ` for one `n`, with cached powers of the images of `u, v, g`.
pub struct Phi {
    n: usize,
    s_images: Vec<ParamPoly>,
    u: Vec<EndoElement>,
    v: Vec<EndoElement>,
    g: Vec<EndoElement>,
}

impl Phi {
    pub fn new(n: usize) -> Self {
        Self::with_w_images(n, w_in_t(n))
    }

    /// `φ` over a different choice of `w_j ∈ k[t]` (for mutation tests).
    pub fn with_w_images(n: usize, w: Vec<ParamPoly>) -> Self {
        let s_images = s_in_w(n).iter().map(|s| s.substitute(&w)).collect();
        let one = EndoElement::identity(n);
        Phi {
            n,
            s_images,
            u: alloc::vec![one.clone(), endo::make_u(n)],
            v: alloc::vec![one.clone(), endo::make_v(n)],
            g: alloc::vec![one, endo::make_g(n)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The parameter change `k[s] → k[t]`.
    pub fn coefficient(&self, c: &ParamPoly) -> ParamPoly {
        c.substitute(&self.s_images)
    }

    fn power(cache: &mut Vec<EndoElement>, e: u32) -> EndoElement {
        while cache.len() <= e as usize {
            let next = cache.last().unwrap().mul(&cache[1]);
            cache.push(next);
        }
        cache[e as usize].clone()
    }

    pub fn apply(&mut self, a: &SElement) -> EndoElement {
        assert_eq!(a.n(), self.n);
        let mut out = EndoElement::zero(self.n);
        for (&(p, q, j), c) in a.terms() {
            let img = Self::power(&mut self.u, p).mul(&Self::power(&mut self.v, q)).mul(&Self::power(&mut self.g, j));
            out = out.add(&img.scale(&self.coefficient(c)));
        }
        out
    }
}

/// `φ(a)`.
pub fn phi(a: &SElement) -> EndoElement {
    Phi::new(a.n()).apply(a)
}

/// `φ(u)φ(v) − φ(v)φ(u) − Σ φ(s_i) φ(g)^i`, evaluated on the images of
/// the generators (in `S` the relation is already zero).
pub fn relation_image(phi: &mut Phi) -> EndoElement {
    let n = phi.n;
    let (u, v) = (phi.u[1].clone(), phi.v[1].clone());
    let mut out = u.mul(&v).sub(&v.mul(&u));
    for i in 0..=n {
        let g = Phi::power(&mut phi.g, i as u32);
        out = out.sub(&g.scale(&phi.s_images[i]));
    }
    out
}

/// A random element with at most `max_terms` terms `c · u^a v^b g^j`,
/// `a + b ≤ degree`, `c` a small integer times `1` or some `s_i`.
pub fn random_s_element<R: Rng + ?Sized>(rng: &mut R, n: usize, degree: u32, max_terms: usize) -> SElement {
    let mut e = SElement::zero(n);
    for _ in 0..rng.gen_range(1..=max_terms) {
        let a = rng.gen_range(0..=degree);
        let b = rng.gen_range(0..=degree - a);
        let j = rng.gen_range(0..=n as u32);
        let k = rng.gen_range(-3i64..=3);
        let c = match rng.gen_range(0..=n + 1) {
            0 => ParamPoly::from_int(ParamSystem::S, n, k),
            i => ParamPoly::var(ParamSystem::S, n, i - 1).scale_int(k),
        };
        e.add_term(a, b, j, c);
    }
    e
}

#[derive(Clone, Debug)]
pub struct MultiplicativityReport {
    pub n: usize,
    pub degree_bound: u32,
    pub samples: usize,
    /// First pair with `φ(ab) ≠ φ(a)φ(b)`.
    pub witness: Option<(SElement, SElement)>,
}

impl MultiplicativityReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Checks `φ(ab) = φ(a)φ(b)` on the fixed pairs `(u, v)`, `(g, u)`,
/// `(g, v)`, then on `sample_count` random pairs, stopping at the first
/// failure.
pub fn verify_phi_multiplicative<R: Rng + ?Sized>(rng: &mut R, n: usize, sample_count: usize, degree_bound: u32) -> MultiplicativityReport {
    let mut phi = Phi::new(n);
    let (u, v, g) = (SElement::u(n), SElement::v(n), SElement::g_pow(n, 1));
    let mut pairs = alloc::vec![(u.clone(), v.clone()), (v, u.clone()), (g.clone(), u), (g, SElement::v(n))];
    for _ in 0..sample_count {
        let a = random_s_element(rng, n, degree_bound, 3);
        let b = random_s_element(rng, n, degree_bound, 3);
        pairs.push((a, b));
    }
    let samples = pairs.len();
    for (a, b) in pairs {
        let lhs = phi.apply(&a.mul(&b));
        let rhs = phi.apply(&a).mul(&phi.apply(&b));
        if lhs != rhs {
            return MultiplicativityReport { n, degree_bound, samples, witness: Some((a, b)) };
        }
    }
    MultiplicativityReport { n, degree_bound, samples, witness: None }
}

/// Rank data of `φ` on one filtered slice of a block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceRank {
    pub i: usize,
    pub j: usize,
    pub degree: u32,
    /// PBW monomials `e_i u^a v^b e_j` with `a + b ≤ degree`.
    pub count: usize,
    /// Rank of their images.
    pub rank: usize,
}

#[derive(Clone, Debug)]
pub struct InjectivityReport {
    pub n: usize,
    pub degree_bound: u32,
    /// `φ(x^s, y^s, z^s) = (x^t, y^t, z^t)`.
    pub xyz_match: bool,
    /// `x^s y^s ≡ (z^s)^{n+1}` in `Gr S`.
    pub leading_relation_s: bool,
    /// `(x^t)_0 (y^t)_0 ≡ (z^t)_0^{n+1}` in `Gr R_0`.
    pub leading_relation_t: bool,
    pub slices: Vec<SliceRank>,
}

impl InjectivityReport {
    pub fn passed(&self) -> bool {
        self.xyz_match && self.leading_relation_s && self.leading_relation_t && self.slices.iter().all(|s| s.rank == s.count)
    }
}

fn random_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Rational> {
    (0..=n).map(|_| Rational::from_integer(BigInt::from(rng.gen_range(-1000i64..=1000)))).collect()
}

/// Coordinates of the chart-0 component with the parameters specialised.
fn specialised_row(e: &ChartElement, point: &[Rational], index: &mut BTreeMap<(i64, i64), usize>) -> SparseRow<CycNumber> {
    let mut row = Vec::new();
    for (&key, c) in e.terms() {
        let v = c.evaluate(point);
        if !v.is_zero() {
            let next = index.len();
            row.push((*index.entry(key).or_insert(next), v));
        }
    }
    row
}

/// Injectivity evidence: the generators of `eSe` match, both sides satisfy
/// the same leading relation, and for every block `(i, j)` the images of the
/// PBW monomials of `e_i S e_j` up to each degree are linearly independent
/// (checked after specialising `t` at a random point, which can only lower
/// the rank).
pub fn injectivity_evidence<R: Rng + ?Sized>(rng: &mut R, n: usize, degree_bound: u32) -> InjectivityReport {
    let mut phi = Phi::new(n);
    let (xs, ys, zs) = cbh::make_xyz_s(n);
    let (xt, yt, zt) = endo::make_xyz(n, 0).expect("0 ≤ n");
    let xyz_match = phi.apply(&xs) == xt && phi.apply(&ys) == yt && phi.apply(&zs) == zt;

    let m = n as u32 + 1;
    let leading_relation_s = xs.mul(&ys).leading_part() == zs.pow(m).leading_part();
    let (x0, y0, z0) = (xt.block_hom(0, 0).component(0).clone(), yt.block_hom(0, 0).component(0).clone(), zt.block_hom(0, 0).component(0).clone());
    let (wx, wy) = (1 - n as i64, n as i64 + 1);
    let leading_relation_t = x0.mul(&y0).map(|p| endo::weighted_leading_part(&p, wx, wy)).ok() == Some(endo::weighted_leading_part(&z0.pow(m), wx, wy));

    let point = random_point(rng, n);
    let one = ParamPoly::one(ParamSystem::S, n);
    let mut slices = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            let mut index = BTreeMap::new();
            let mut rows = Vec::new();
            for d in 0..=degree_bound {
                for a in 0..=d {
                    let b = d - a;
                    if cbh::shifted_idempotent(n, i as i64, a, b) != j as i64 {
                        continue;
                    }
                    let mono = cbh::block(&SElement::monomial(n, a, b, 0, one.clone()), i as i64, j as i64);
                    let img = phi.apply(&mono).block_hom(i, j);
                    rows.push(specialised_row(img.component(0), &point, &mut index));
                }
                slices.push(SliceRank { i, j, degree: d, count: rows.len(), rank: rank_cyc(&rows, index.len()) });
            }
        }
    }
    InjectivityReport { n, degree_bound, xyz_match, leading_relation_s, leading_relation_t, slices }
}

#[derive(Clone, Debug)]
pub struct BlockSurjectivity {
    pub i: usize,
    pub j: usize,
    pub basis_size: usize,
    pub reduced: usize,
    pub cases: Vec<ReductionCase>,
    /// Homomorphisms left with a nonzero remainder, or reduction errors.
    pub failures: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SurjectivityReport {
    pub n: usize,
    pub bounds: Bounds,
    pub blocks: Vec<BlockSurjectivity>,
}

impl SurjectivityReport {
    pub fn passed(&self) -> bool {
        self.blocks.iter().all(|b| b.failures.is_empty() && b.reduced == b.basis_size)
    }
}

/// Surjectivity evidence for one block: every truncated Hom basis vector of
/// `A_{i,j}` is a combination of generator words.
pub fn block_surjectivity(gens: &mut Generators, i: usize, j: usize, bounds: &Bounds) -> Result<BlockSurjectivity> {
    let n = gens.n();
    let basis = hom_basis(&endo::summand(n, j), &endo::summand(n, i), bounds)?;
    let mut out = BlockSurjectivity { i, j, basis_size: basis.len(), reduced: 0, cases: Vec::new(), failures: Vec::new() };
    for h in &basis {
        match endo::reduce_to_generators(gens, h) {
            Ok(red) if red.succeeded() => {
                out.reduced += 1;
                for c in red.cases {
                    if !out.cases.contains(&c) {
                        out.cases.push(c);
                    }
                }
            }
            Ok(red) => out.failures.push(alloc::format!("{h:?}: remainder {:?}", red.remainder)),
            Err(e) => out.failures.push(alloc::format!("{h:?}: {e}")),
        }
    }
    out.cases.sort();
    Ok(out)
}

/// [`block_surjectivity`] for every block.
pub fn surjectivity_evidence(n: usize, bounds: &Bounds) -> Result<SurjectivityReport> {
    let mut gens = Generators::new(n);
    let mut blocks = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            blocks.push(block_surjectivity(&mut gens, i, j, bounds)?);
        }
    }
    Ok(SurjectivityReport { n, bounds: *bounds, blocks })
}

/// `φ(uv − vu − Σ s_i g^i)` under a perturbed parameter change: adds `t_0`
/// to `w_k`. Nonzero for every `k` when the chosen change is the only one
/// that works.
pub fn perturbed_relation_image(n: usize, k: usize) -> EndoElement {
    let mut w = w_in_t(n);
    w[k] = &w[k] + &ParamPoly::var(ParamSystem::T, n, 0);
    relation_image(&mut Phi::with_w_images(n, w))
}

/// Label of a branch of the division algorithm, for reports.
pub fn case_name(c: ReductionCase) -> &'static str {
    match c {
        ReductionCase::DiagonalLow => "diagonal, deg <= 0",
        ReductionCase::DiagonalHigh => "diagonal, deg > 0",
        ReductionCase::I => "(i)",
        ReductionCase::II => "(ii)",
        ReductionCase::IPrime => "(i')",
        ReductionCase::IIPrime => "(ii')",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_and_group() {
        for n in 0..=3 {
            assert_eq!(phi(&SElement::one(n)), EndoElement::identity(n));
            let g = phi(&SElement::g_pow(n, 1));
            assert_eq!(g.pow(n as u32 + 1), EndoElement::identity(n));
            for i in 0..=n {
                assert_eq!(phi(&cbh::make_es(n, i as i64)), endo::make_idempotent(n, i).unwrap());
            }
        }
    }

    #[test]
    fn relation_maps_to_zero() {
        for n in 0..=4 {
            assert!(relation_image(&mut Phi::new(n)).is_zero(), "n={n}");
        }
    }

    #[test]
    fn perturbations_break_relation() {
        for n in 0..=3 {
            for k in 0..=n {
                assert!(!perturbed_relation_image(n, k).is_zero(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn blocks_respected() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=3 {
            let mut p = Phi::new(n);
            for _ in 0..5 {
                let a = random_s_element(&mut rng, n, 3, 3);
                let img = p.apply(&a);
                for i in 0..=n as i64 {
                    for j in 0..=n as i64 {
                        let lhs = p.apply(&cbh::block(&a, i, j));
                        let ei = endo::make_idempotent(n, i as usize).unwrap();
                        let ej = endo::make_idempotent(n, j as usize).unwrap();
                        assert_eq!(lhs, ei.mul(&img).mul(&ej));
                    }
                }
            }
        }
    }

    #[test]
    fn perturbation_breaks_multiplicativity() {
        let mut w = w_in_t(2);
        w[1] = &w[1] + &ParamPoly::var(ParamSystem::T, 2, 0);
        let mut p = Phi::with_w_images(2, w);
        let (u, v) = (SElement::u(2), SElement::v(2));
        assert_ne!(p.apply(&v.mul(&u)), p.apply(&v).mul(&p.apply(&u)));
    }

    #[test]
    fn multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 0..=2 {
            let r = verify_phi_multiplicative(&mut rng, n, 10, 3);
            assert!(r.passed(), "{:?}", r.witness);
        }
    }

    #[test]
    fn injectivity_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=2 {
            let r = injectivity_evidence(&mut rng, n, 3);
            assert!(r.passed(), "{r:?}");
        }
        let r = injectivity_evidence(&mut rng, 2, 2);
        let s = r.slices.iter().find(|s| s.i == 0 && s.j == 0 && s.degree == 2).unwrap();
        assert_eq!((s.count, s.rank), (2, 2));
    }

    #[test]
    fn surjectivity_small() {
        let r = surjectivity_evidence(1, &Bounds::new(4, 1)).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.blocks.iter().all(|b| b.basis_size > 0));
        let r = surjectivity_evidence(2, &Bounds::new(3, 1)).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}

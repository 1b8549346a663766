//! The glued scheme `X = ⋃ Spec R_i`, its divisorial sheaves
//! `R(Σ d_i D_i)` and the Čech description of their morphisms.
//!
//! A divisorial sheaf is `R_i` on every chart, glued on the overlap
//! `R_{i-1,i}` by `r ↦ x_{i-1}^{d_i} r` from the chart-`i` side and by the
//! identity from the chart-`(i-1)` side. A morphism of right modules is left
//! multiplication by one element `m_i ∈ R_i` per chart, and the components
//! are compatible exactly when
//!
//! ```text
//! m_{i-1} = x_{i-1}^{d'_i} · τ(m_i) · x_{i-1}^{-d_i}      in R_{i-1,i}
//! ```
//!
//! with `τ` the chart-`i`-to-chart-`(i-1)` transition, `d` the source twist
//! and `d'` the target twist. The failure of this identity is the Čech
//! differential `Δ`.

mod cohomology;
mod ses;

use alloc::vec::Vec;
use core::fmt;

use crate::chart::{ChartElement, ChartRing};
use crate::{Error, Result};

pub use cohomology::{
    cech_h1_dims, delta_slice, hom_basis, hom_basis_slice, hom_dims, hom_slices, h1_slices, Bounds,
    SliceComplex, SliceReport, DEFAULT_MAX_UNKNOWNS,
};
pub use ses::{
    cech_solve_large_twist, random_cochain, ses_euler_check, ses_maps, verify_ses, EulerReport, SesCheck, SesMaps,
    TwistSolution,
};

/// Twist vector `(d_1, …, d_n)` of `R(Σ d_i D_i)`; `D_0` carries no twist.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorData {
    d: Vec<i64>,
}

impl DivisorData {
    pub fn new(d: Vec<i64>) -> Self {
        DivisorData { d }
    }

    pub fn zero(n: usize) -> Self {
        DivisorData { d: alloc::vec![0; n] }
    }

    /// `D_i` itself (`i ≥ 1`), or `0` for `i = 0`.
    pub fn unit(n: usize, i: usize) -> Result<Self> {
        if i > n {
            return Err(Error::IndexOutOfRange { what: "divisor", index: i as i64, n });
        }
        let mut d = Self::zero(n);
        if i > 0 {
            d.d[i - 1] = 1;
        }
        Ok(d)
    }

    /// The summand `R(−D_i)` of the tilting bundle (`R` for `i = 0`).
    pub fn tilting_summand(n: usize, i: usize) -> Result<Self> {
        Ok(Self::unit(n, i)?.scale(-1))
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// `d_i` for `1 ≤ i ≤ n`.
    pub fn get(&self, i: usize) -> i64 {
        self.d[i - 1]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.d
    }

    pub fn add(&self, other: &DivisorData) -> DivisorData {
        DivisorData { d: self.d.iter().zip(&other.d).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, k: i64) -> DivisorData {
        DivisorData { d: self.d.iter().map(|a| a * k).collect() }
    }
}

impl fmt::Display for DivisorData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R(")?;
        let mut any = false;
        for (k, &d) in self.d.iter().enumerate() {
            if d != 0 {
                if any && d > 0 {
                    write!(f, "+")?;
                }
                match d {
                    1 => write!(f, "D{}", k + 1)?,
                    -1 => write!(f, "-D{}", k + 1)?,
                    _ => write!(f, "{d}D{}", k + 1)?,
                }
                any = true;
            }
        }
        if !any {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

/// `(principal degree, weight)`: `deg x = 1, deg y = −1, deg t = 0` and
/// `wt(x_i) = 1 − n + 2i, wt(y_i) = n + 1 − 2i, wt(t) = 2`. Both are
/// respected by the chart relation and by the gluing, so every Čech complex
/// splits into finite-dimensional bidegree slices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bidegree {
    pub principal: i64,
    pub weight: i64,
}

impl Bidegree {
    pub fn new(principal: i64, weight: i64) -> Self {
        Bidegree { principal, weight }
    }

    pub fn add(self, o: Bidegree) -> Bidegree {
        Bidegree::new(self.principal + o.principal, self.weight + o.weight)
    }

    pub fn sub(self, o: Bidegree) -> Bidegree {
        Bidegree::new(self.principal - o.principal, self.weight - o.weight)
    }

    /// Bidegree of `x^l y^m t^α` with `|α| = tdeg` in `ring`.
    pub fn of_monomial(ring: ChartRing, l: i64, m: i64, tdeg: u32) -> Bidegree {
        Bidegree::new(l - m, l * ring.x_weight() + m * ring.y_weight() + 2 * tdeg as i64)
    }

    /// Bidegree of a homogeneous element; `None` for zero or mixed elements.
    pub fn of_element(e: &ChartElement) -> Option<Bidegree> {
        let mut out = None;
        for (&(l, m), c) in e.terms() {
            for (exps, _) in c.terms() {
                let b = Self::of_monomial(e.ring(), l, m, exps.degree());
                match out {
                    None => out = Some(b),
                    Some(o) if o != b => return None,
                    _ => {}
                }
            }
        }
        out
    }
}

/// Shift from the hom bidegree (that of the chart-0 component) to the
/// bidegree of the chart-`i` component: `B_i = B_0 + offset(i)`.
pub fn chart_offset(src: &DivisorData, tgt: &DivisorData, i: usize) -> Bidegree {
    let n = src.n() as i64;
    let mut off = Bidegree::new(0, 0);
    for k in 1..=i {
        let diff = tgt.get(k) - src.get(k);
        off = off.sub(Bidegree::new(diff, diff * (2 * k as i64 - n - 1)));
    }
    off
}

/// The glued scheme: `n + 1` charts and the `n` overlaps of neighbours. The
/// poset of opens has height one, so the cocycle condition is vacuous.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NcScheme {
    pub n: usize,
}

impl NcScheme {
    pub fn new(n: usize) -> Self {
        NcScheme { n }
    }

    pub fn charts(&self) -> Vec<ChartRing> {
        (0..=self.n).map(|i| ChartRing::chart(self.n, i).unwrap()).collect()
    }

    pub fn overlaps(&self) -> Vec<ChartRing> {
        (0..self.n).map(|i| ChartRing::overlap(self.n, i).unwrap()).collect()
    }

    /// `x_i x_i^{-1} = 1` on every overlap, and `x_i y_{i+1} = 1` after
    /// transition (the generator-level birationality of the gluing).
    pub fn birational_on_generators(&self) -> bool {
        self.overlaps().into_iter().all(|r| {
            let xinv = ChartElement::x_pow(r, -1);
            let y_up = ChartElement::y(ChartRing::chart(self.n, r.coordinate_chart() + 1).unwrap());
            ChartElement::x(r).mul(&xinv).is_ok_and(|e| e.is_one())
                && ChartElement::x(r).mul(&y_up).is_ok_and(|e| e.is_one())
        })
    }
}

/// Morphism `R(Σ d_i D_i) → R(Σ d'_i D_i)` given by its chart components.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SheafHom {
    source: DivisorData,
    target: DivisorData,
    components: Vec<ChartElement>,
}

/// One Čech 1-cochain: an element of every overlap `R_{i-1,i}`, written in
/// chart-`(i-1)` generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CechCocycle {
    pub components: Vec<ChartElement>,
}

impl CechCocycle {
    pub fn zero(n: usize) -> Self {
        CechCocycle {
            components: (0..n).map(|i| ChartElement::zero(ChartRing::overlap(n, i).unwrap())).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(ChartElement::is_zero)
    }
}

fn check_components(n: usize, hs: &[ChartElement]) -> Result<()> {
    if hs.len() != n + 1 {
        return Err(Error::Invalid(alloc::format!("expected {} chart components, got {}", n + 1, hs.len())));
    }
    for (i, h) in hs.iter().enumerate() {
        let want = ChartRing::chart(n, i)?;
        if h.ring() != want {
            return Err(Error::RingMismatch { left: want, right: h.ring() });
        }
    }
    Ok(())
}

/// `x^{d'} · τ(m) · x^{-d}` in the overlap below chart `i`.
fn pull_down(m: &ChartElement, d_src: i64, d_tgt: i64) -> Result<ChartElement> {
    let lower = m.to_lower()?;
    let r = lower.ring();
    ChartElement::x_pow(r, d_tgt).mul(&lower)?.mul(&ChartElement::x_pow(r, -d_src))
}

/// Inverse of [`pull_down`]: `τ^{-1}(x^{-d'} · g · x^{d})`, in chart-`i`
/// generators of the overlap.
fn push_up(g: &ChartElement, d_src: i64, d_tgt: i64) -> Result<ChartElement> {
    let r = g.ring();
    ChartElement::x_pow(r, -d_tgt).mul(g)?.mul(&ChartElement::x_pow(r, d_src))?.to_upper()
}

/// The Čech differential `g_{i-1,i} = m_{i-1} − x^{d'_i} τ(m_i) x^{-d_i}`.
pub fn delta(hs: &[ChartElement], src: &DivisorData, tgt: &DivisorData) -> Result<CechCocycle> {
    let n = src.n();
    check_components(n, hs)?;
    let mut comps = Vec::with_capacity(n);
    for i in 1..=n {
        let lower = hs[i - 1].embed(ChartRing::overlap(n, i - 1)?)?;
        comps.push(lower.sub(&pull_down(&hs[i], src.get(i), tgt.get(i))?)?);
    }
    Ok(CechCocycle { components: comps })
}

impl SheafHom {
    pub fn new(source: DivisorData, target: DivisorData, components: Vec<ChartElement>) -> Result<Self> {
        if source.n() != target.n() {
            return Err(Error::Invalid("source and target live on different schemes".into()));
        }
        check_components(source.n(), &components)?;
        Ok(SheafHom { source, target, components })
    }

    pub fn zero(source: DivisorData, target: DivisorData) -> Self {
        let n = source.n();
        let components = (0..=n).map(|i| ChartElement::zero(ChartRing::chart(n, i).unwrap())).collect();
        SheafHom { source, target, components }
    }

    pub fn identity(d: DivisorData) -> Self {
        let n = d.n();
        let components = (0..=n).map(|i| ChartElement::one(ChartRing::chart(n, i).unwrap())).collect();
        SheafHom { source: d.clone(), target: d, components }
    }

    /// The unique morphism with the given component on `chart`, if the
    /// propagated components are regular on every chart.
    pub fn extend_from_component(
        source: DivisorData,
        target: DivisorData,
        chart: usize,
        m: ChartElement,
    ) -> Result<Self> {
        let n = source.n();
        if m.ring() != ChartRing::chart(n, chart)? {
            return Err(Error::RingMismatch { left: ChartRing::chart(n, chart)?, right: m.ring() });
        }
        let mut comps: Vec<Option<ChartElement>> = alloc::vec![None; n + 1];
        comps[chart] = Some(m);
        for i in (1..=chart).rev() {
            let down = pull_down(comps[i].as_ref().unwrap(), source.get(i), target.get(i))?;
            let below = down.embed(ChartRing::chart(n, i - 1)?).map_err(|_| Error::NotExtendable { chart: i - 1 })?;
            comps[i - 1] = Some(below);
        }
        for i in chart + 1..=n {
            let cur = comps[i - 1].as_ref().unwrap().embed(ChartRing::overlap(n, i - 1)?)?;
            let up = push_up(&cur, source.get(i), target.get(i))?;
            let above = up.embed(ChartRing::chart(n, i)?).map_err(|_| Error::NotExtendable { chart: i })?;
            comps[i] = Some(above);
        }
        Self::new(source, target, comps.into_iter().map(Option::unwrap).collect())
    }

    pub fn source(&self) -> &DivisorData {
        &self.source
    }

    pub fn target(&self) -> &DivisorData {
        &self.target
    }

    pub fn n(&self) -> usize {
        self.source.n()
    }

    pub fn components(&self) -> &[ChartElement] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &ChartElement {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(ChartElement::is_zero)
    }

    pub fn delta(&self) -> Result<CechCocycle> {
        delta(&self.components, &self.source, &self.target)
    }

    /// Index `i` of the first overlap `(i-1, i)` where the components are
    /// incompatible.
    pub fn first_glue_failure(&self) -> Option<usize> {
        let cocycle = self.delta().expect("components validated at construction");
        cocycle.components.iter().position(|g| !g.is_zero()).map(|k| k + 1)
    }

    pub fn glue_check(&self) -> bool {
        self.first_glue_failure().is_none()
    }

    /// `self ∘ other`: apply `other`, then `self`; chart components multiply
    /// as `m_self · m_other`.
    pub fn compose(&self, other: &SheafHom) -> Result<SheafHom> {
        if self.source != other.target {
            return Err(Error::Invalid(alloc::format!(
                "cannot compose: {} is not {}",
                other.target, self.source
            )));
        }
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.mul(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(SheafHom { source: other.source.clone(), target: self.target.clone(), components: comps })
    }

    pub fn add(&self, other: &SheafHom) -> Result<SheafHom> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Invalid("adding morphisms between different sheaves".into()));
        }
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(SheafHom { source: self.source.clone(), target: self.target.clone(), components: comps })
    }

    pub fn sub(&self, other: &SheafHom) -> Result<SheafHom> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SheafHom {
        self.map_components(ChartElement::neg)
    }

    pub fn scale(&self, c: &crate::param::ParamPoly) -> SheafHom {
        self.map_components(|e| e.scale(c))
    }

    pub fn scale_cyc(&self, c: &crate::cyclotomic::CycNumber) -> SheafHom {
        self.map_components(|e| e.scale_cyc(c))
    }

    pub fn map_components(&self, f: impl FnMut(&ChartElement) -> ChartElement) -> SheafHom {
        SheafHom {
            source: self.source.clone(),
            target: self.target.clone(),
            components: self.components.iter().map(f).collect(),
        }
    }

    /// Bidegree of the chart-0 component, if homogeneous.
    pub fn bidegree(&self) -> Option<Bidegree> {
        Bidegree::of_element(&self.components[0])
    }
}

impl fmt::Debug for SheafHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}: (", self.source, self.target)?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

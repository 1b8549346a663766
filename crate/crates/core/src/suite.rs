//! Named verification checks, grouped into suites. Each check states the
//! identity it verifies and runs it exactly for one `n`; the checks are
//! independent, so a driver may run them in any order or concurrently.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cbh::{self, SElement, SLetter};
use crate::chart::{ChartElement, ChartRing};
use crate::cyclotomic::CycNumber;
use crate::endo::{self, EndoElement, Generators};
use crate::mckay::{self, Phi};
use crate::param::{ParamPoly, ParamSystem};
use crate::scheme::{self, Bounds, DivisorData, NcScheme};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Scheme,
    Sheaves,
    Tilting,
    Cbh,
    Iso,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Scheme, Suite::Sheaves, Suite::Tilting, Suite::Cbh, Suite::Iso];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Scheme => "scheme",
            Suite::Sheaves => "sheaves",
            Suite::Tilting => "tilting",
            Suite::Cbh => "cbh",
            Suite::Iso => "iso",
        }
    }

    /// Parses a suite name; `all` selects every suite.
    pub fn parse(s: &str) -> Option<Vec<Suite>> {
        if s == "all" {
            return Some(Suite::ALL.to_vec());
        }
        Suite::ALL.iter().copied().find(|x| x.name() == s).map(|x| alloc::vec![x])
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct SuiteParams {
    pub n: usize,
    /// Truncation of the Hom / `Ȟ¹` computations.
    pub bounds: Bounds,
    /// Degree bound for random elements and injectivity slices.
    pub degree: u32,
    /// Number of random samples for property checks.
    pub samples: usize,
    pub seed: u64,
}

impl SuiteParams {
    pub fn new(n: usize) -> Self {
        SuiteParams { n, bounds: Bounds::new(6, 3), degree: 4, samples: 50, seed: 0 }
    }

    /// A generator seeded by `seed` and the check name, so results do not
    /// depend on the order in which checks run.
    fn rng(&self, name: &str) -> ChaCha8Rng {
        let h = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
        ChaCha8Rng::seed_from_u64(self.seed ^ h)
    }
}

type Run = fn(&SuiteParams) -> Result<Outcome>;

/// A named check and the identity it verifies.
#[derive(Clone, Copy)]
pub struct Check {
    pub name: &'static str,
    pub suite: Suite,
    claim: fn(usize) -> String,
    run: Run,
}

/// The result of one check: `detail` is a summary on success and the first
/// failure witness otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn pass(detail: impl Into<String>) -> Self {
        Outcome { passed: true, detail: detail.into() }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Outcome { passed: false, detail: detail.into() }
    }

    fn from_failures(failures: Vec<String>, summary: impl Into<String>) -> Self {
        match failures.into_iter().next() {
            Some(w) => Outcome::fail(w),
            None => Outcome::pass(summary),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub suite: Suite,
    pub claim: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn claim(&self, n: usize) -> String {
        (self.claim)(n)
    }

    pub fn run(&self, params: &SuiteParams) -> CheckReport {
        let outcome = (self.run)(params).unwrap_or_else(|e| Outcome::fail(format!("error: {e}")));
        CheckReport {
            name: self.name.to_string(),
            suite: self.suite,
            claim: self.claim(params.n),
            passed: outcome.passed,
            detail: outcome.detail,
        }
    }
}

impl fmt::Debug for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Check({}/{})", self.suite, self.name)
    }
}

macro_rules! check {
    ($suite:ident, $name:literal, $claim:expr, $run:expr) => {
        Check { name: $name, suite: Suite::$suite, claim: $claim, run: $run }
    };
}

/// The checks of `suite`, sorted by name.
pub fn checks(suite: Suite) -> Vec<Check> {
    let mut out = match suite {
        Suite::Scheme => alloc::vec![
            check!(Scheme, "chart-commutator", |_| "x_i y_i - y_i x_i = t0 in every chart and overlap".into(), chart_commutator),
            check!(Scheme, "adjacent-y-commutator", |_| "y_i y_{i+1} - y_{i+1} y_i = t0 y_{i+1}^2 on every overlap".into(), adjacent_y_commutator),
            check!(Scheme, "transition-roundtrip", |_| "to_upper(to_lower(a)) = a and to_lower(ab) = to_lower(a) to_lower(b)".into(), transition_roundtrip),
            check!(Scheme, "birational", |_| "x_i x_i^-1 = 1 and x_i y_{i+1} = 1 on every overlap".into(), birational),
        ],
        Suite::Sheaves => alloc::vec![
            check!(Sheaves, "tilting-vanishing", |_| "H^1(R(-D_a), R(-D_b)) = 0 on every stable slice, all a, b".into(), tilting_vanishing),
            check!(Sheaves, "ses-exact", |_| "0 -> R -> R(D_j) + R(D_k) -> R(D_j + D_k) -> 0 exact, 1 <= j <= k <= n".into(), ses_exact),
            check!(Sheaves, "ses-euler", |_| "Euler characteristics of Hom(R(-D_n), -) add up along each sequence".into(), ses_euler),
            check!(Sheaves, "twist-solver", |_| "delta(h) = g for the large-twist solution h of random cochains g".into(), twist_solver),
            check!(Sheaves, "negative-control", |_| "H^1(R, R(-2D_i)) has a nonzero or unstable slice".into(), negative_control),
        ],
        Suite::Tilting => alloc::vec![
            check!(Tilting, "idempotents", |_| "e_i e_j = delta_ij e_i and sum e_i = 1".into(), idempotents),
            check!(Tilting, "alpha-beta-glue", |_| "alpha_{i,i+1} and beta_{i+1,i} glue on every overlap".into(), alpha_beta_glue),
            check!(Tilting, "quiver-shape", |_| "e_i u e_j = 0 unless j = i+1, e_i v e_j = 0 unless j = i-1 (mod n+1)".into(), quiver_shape),
            check!(Tilting, "u-v-matrices", |_| "chart-0 matrices of u and v match their closed forms".into(), uv_matrices),
            check!(Tilting, "uv-diagonals", |_| "uv = diag(x0y0, x0y0 + t1, ...), vu = diag(x0y0 + (n-1)t0 + t1 + ... + tn, x0y0 - t0, ...) on chart 0".into(), uv_diagonals),
            check!(Tilting, "uv-commutator", uv_commutator_claim, uv_commutator),
            check!(Tilting, "group-element", |_| "g^{n+1} = 1, gu = zeta ug, gv = zeta^-1 vg, e_i = sum_j zeta^{ij} g^j / (n+1)".into(), group_element),
            check!(Tilting, "arrow-relations", |_| "e_i u = u e_{i+1}, e_i v = v e_{i-1}, alpha beta = uv e_i, beta alpha = vu e_{i+1}, cycles = u^{n+1} e_i, v^{n+1} e_i".into(), arrow_relations),
            check!(Tilting, "xyz", |_| "(x)_n = x_n, (y)_0 = y_0, (z)_0 = x0y0 + ..., and x y = z^{n+1} in leading terms".into(), xyz),
            check!(Tilting, "reduction", |_| "generators and random products reduce to generator words with zero remainder".into(), reduction),
        ],
        Suite::Cbh => alloc::vec![
            check!(Cbh, "s-defining-rules", |_| "gu = zeta ug, gv = zeta^-1 vg, vu = uv - sum s_i g^i, g^{n+1} = 1".into(), s_defining_rules),
            check!(Cbh, "s-confluence", |_| "leftmost and rightmost rewriting of random words agree with the product".into(), s_confluence),
            check!(Cbh, "s-associativity", |_| "(ab)c = a(bc) and a(b + c) = ab + ac on random elements".into(), s_associativity),
            check!(Cbh, "s-idempotents", |_| "e_i e_j = delta_ij e_i, sum e_i = 1, e_i u = u e_{i+1}, e_i v = v e_{i-1}".into(), s_idempotents),
            check!(Cbh, "s-quiver-relations", |_| "alpha beta = uv e_i, beta alpha = vu e_{i+1}, sum alpha = u, sum beta = v".into(), s_quiver_relations),
            check!(Cbh, "s-pbw-counts", |_| "degree-d PBW words and normal forms both number (d+1)(n+1)".into(), s_pbw_counts),
            check!(Cbh, "s-block-dims", |_| "e_i S_d e_j has one basis word u^a v^b per a + b = d with i + a - b = j".into(), s_block_dims),
        ],
        Suite::Iso => alloc::vec![
            check!(Iso, "phi-relation", |_| "phi(u)phi(v) - phi(v)phi(u) = sum phi(s_i) phi(g)^i".into(), phi_relation),
            check!(Iso, "phi-idempotents", |_| "phi(1) = 1, phi(e_i) = e_i, phi(g)^{n+1} = 1".into(), phi_idempotents),
            check!(Iso, "phi-multiplicative", |_| "phi(ab) = phi(a)phi(b) on fixed and random pairs".into(), phi_multiplicative),
            check!(Iso, "phi-mutation", |_| "adding t0 to any single w_k breaks the relation".into(), phi_mutation),
            check!(Iso, "injectivity", |_| "images of the PBW words of each e_i S e_j are independent; xy = z^{n+1} in leading terms on both sides".into(), injectivity),
            check!(Iso, "surjectivity", |_| "every truncated Hom basis vector of every block reduces to generator words".into(), surjectivity),
        ],
    };
    out.sort_by_key(|c| c.name);
    out
}

/// The checks of several suites, sorted by suite then name.
pub fn checks_for(suites: &[Suite]) -> Vec<Check> {
    let mut s = suites.to_vec();
    s.sort();
    s.dedup();
    s.into_iter().flat_map(checks).collect()
}

fn lin(n: usize, c: &[i64]) -> ParamPoly {
    ParamPoly::linear(ParamSystem::T, n, c)
}

fn wrap(n: usize, i: i64) -> usize {
    i.rem_euclid(n as i64 + 1) as usize
}

fn show_diag(m: &[Vec<ChartElement>]) -> String {
    let entries: Vec<String> = m.iter().enumerate().map(|(i, row)| row[i].to_string()).collect();
    format!("diag({})", entries.join(", "))
}

fn compare_matrix(label: &str, got: &[Vec<ChartElement>], want: &[Vec<ChartElement>], failures: &mut Vec<String>) {
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        for (j, (a, b)) in g.iter().zip(w).enumerate() {
            if a != b {
                failures.push(format!("{label} entry ({i},{j}): got {a}, expected {b}"));
            }
        }
    }
}

// scheme

fn chart_commutator(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let mut failures = Vec::new();
    for i in 0..=n {
        let r = ChartRing::chart(n, i)?;
        let (x, y) = (ChartElement::x(r), ChartElement::y(r));
        let c = x.mul(&y)?.sub(&y.mul(&x)?)?;
        if c != ChartElement::t(r, 0) {
            failures.push(format!("chart {i}: [x, y] = {c}"));
        }
    }
    for i in 0..n {
        let up = ChartRing::chart(n, i + 1)?;
        let lo = ChartRing::overlap(n, i)?;
        let x1 = ChartElement::x(up).to_lower()?;
        let y1 = ChartElement::y(up).to_lower()?;
        let c = x1.mul(&y1)?.sub(&y1.mul(&x1)?)?;
        if c != ChartElement::t(lo, 0) {
            failures.push(format!("overlap {i}: transported [x, y] = {c}"));
        }
    }
    Ok(Outcome::from_failures(failures, format!("{} charts, {n} overlaps", n + 1)))
}

fn adjacent_y_commutator(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let mut failures = Vec::new();
    for i in 0..n {
        let lo = ChartRing::overlap(n, i)?;
        let y0 = ChartElement::y(lo);
        let y1 = ChartElement::y(ChartRing::chart(n, i + 1)?).to_lower()?;
        let lhs = y0.mul(&y1)?.sub(&y1.mul(&y0)?)?;
        let rhs = y1.mul(&y1)?.scale(&ParamPoly::var(ParamSystem::T, n, 0));
        if lhs != rhs {
            failures.push(format!("overlap {i}: {lhs} != {rhs}"));
        }
    }
    Ok(Outcome::from_failures(failures, format!("{n} overlaps")))
}

fn transition_roundtrip(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let mut failures = Vec::new();
    for i in 0..n {
        let up = ChartRing::chart(n, i + 1)?;
        let upper = ChartRing::overlap_upper(n, i)?;
        let mut elems = alloc::vec![ChartElement::x(up), ChartElement::y(up), ChartElement::t(up, n)];
        elems.push(ChartElement::x(up).mul(&ChartElement::y(up))?.add(&ChartElement::t(up, i + 1))?);
        elems.push(ChartElement::y(up).pow(2).mul(&ChartElement::x(up).pow(3))?);
        for a in &elems {
            if a.to_lower()?.to_upper()? != a.embed(upper)? {
                failures.push(format!("overlap {i}: round trip of {a}"));
            }
            for b in &elems {
                if a.mul(b)?.to_lower()? != a.to_lower()?.mul(&b.to_lower()?)? {
                    failures.push(format!("overlap {i}: transition not multiplicative on {a}, {b}"));
                }
            }
        }
    }
    Ok(Outcome::from_failures(failures, format!("{n} transitions")))
}

fn birational(p: &SuiteParams) -> Result<Outcome> {
    Ok(if NcScheme::new(p.n).birational_on_generators() {
        Outcome::pass(format!("{} overlaps", p.n))
    } else {
        Outcome::fail("an overlap fails x x^-1 = 1 or x y' = 1")
    })
}

// sheaves

fn tilting_vanishing(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let mut failures = Vec::new();
    let mut slices = 0;
    for a in 0..=n {
        for b in 0..=n {
            let reports = scheme::cech_h1_dims(&endo::summand(n, a), &endo::summand(n, b), &p.bounds)?;
            slices += reports.len();
            for r in reports {
                if !r.stable {
                    failures.push(format!("(a, b) = ({a}, {b}) slice {:?}: unstable", r.bidegree));
                } else if r.h1_dim != 0 {
                    failures.push(format!("(a, b) = ({a}, {b}) slice {:?}: H^1 has dimension {}", r.bidegree, r.h1_dim));
                }
            }
        }
    }
    Ok(Outcome::from_failures(failures, format!("{slices} slices, all zero")))
}

fn ses_exact(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let mut failures = Vec::new();
    let mut count = 0;
    for j in 1..=n {
        for k in j..=n {
            let maps = scheme::ses_maps(&DivisorData::zero(n), j, k)?;
            let c = scheme::verify_ses(&maps, &p.bounds)?;
            count += 1;
            if !c.passed() {
                failures.push(format!("(j, k) = ({j}, {k}): {c:?}"));
            }
        }
    }
    Ok(Outcome::from_failures(failures, format!("{count} sequences")))
}

fn ses_euler(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let mut failures = Vec::new();
    let probe = endo::summand(n, n);
    let slices = scheme::hom_slices(&probe, &Bounds::new(p.bounds.xy.min(3), p.bounds.t.min(1)));
    for j in 1..=n {
        for k in j..=n {
            let maps = scheme::ses_maps(&DivisorData::zero(n), j, k)?;
            for r in scheme::ses_euler_check(&maps, &probe, &slices)? {
                if !r.passed() {
                    failures.push(format!("(j, k) = ({j}, {k}): {r:?}"));
                }
            }
        }
    }
    Ok(Outcome::from_failures(failures, format!("{} slices per sequence", slices.len())))
}

fn twist_solver(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    if n == 0 {
        return Ok(Outcome::pass("no overlaps"));
    }
    let mut rng = p.rng("twist-solver");
    let tgt = DivisorData::zero(n);
    for _ in 0..p.samples {
        let g = scheme::random_cochain(&mut rng, n, 3);
        let sol = scheme::cech_solve_large_twist(&g, &tgt)?;
        if scheme::delta(&sol.components, &sol.source, &tgt)? != g {
            return Ok(Outcome::fail(format!("cochain {:?}: solution does not delta-verify", g.components)));
        }
    }
    Ok(Outcome::pass(format!("{} random cochains", p.samples)))
}

fn negative_control(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    if n == 0 {
        return Ok(Outcome::pass("vacuous: no exceptional curves"));
    }
    let src = DivisorData::zero(n);
    let mut failures = Vec::new();
    for i in 1..=n {
        let tgt = DivisorData::unit(n, i)?.scale(-2);
        let reports = scheme::cech_h1_dims(&src, &tgt, &p.bounds)?;
        if !reports.iter().any(|r| r.h1_dim > 0 || !r.stable) {
            failures.push(format!("i = {i}: every slice zero and stable"));
        }
    }
    Ok(Outcome::from_failures(failures, format!("{n} twists detected")))
}

// tilting

fn idempotents(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let mut failures = Vec::new();
    let mut sum = EndoElement::zero(n);
    for i in 0..=n {
        let e = endo::make_idempotent(n, i)?;
        for j in 0..=n {
            let f = endo::make_idempotent(n, j)?;
            let want = if i == j { e.clone() } else { EndoElement::zero(n) };
            if e.mul(&f) != want {
                failures.push(format!("e_{i} e_{j}"));
            }
        }
        sum = sum.add(&e);
    }
    if sum != EndoElement::identity(n) {
        failures.push("sum of idempotents is not 1".into());
    }
    Ok(Outcome::from_failures(failures, format!("{} idempotents", n + 1)))
}

fn alpha_beta_glue(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let mut failures = Vec::new();
    for i in 0..=n {
        for (name, a) in [("alpha", endo::make_alpha(n, i)?), ("beta", endo::make_beta(n, i)?)] {
            for (&(r, c), h) in a.blocks() {
                if let Some(k) = h.first_glue_failure() {
                    failures.push(format!("{name} i = {i}, block ({r},{c}): fails on overlap {k}"));
                }
            }
        }
    }
    Ok(Outcome::from_failures(failures, format!("{} arrows", 2 * (n + 1))))
}

fn quiver_shape(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let mut failures = Vec::new();
    for (name, a, step) in [("u", endo::make_u(n), 1i64), ("v", endo::make_v(n), -1)] {
        for (&(i, j), _) in a.blocks() {
            if j != wrap(n, i as i64 + step) {
                failures.push(format!("{name} has block ({i},{j})"));
            }
        }
        if a.blocks().count() != n + 1 {
            failures.push(format!("{name} has {} blocks", a.blocks().count()));
        }
    }
    Ok(Outcome::from_failures(failures, "cyclic quiver"))
}

fn uv_matrices(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let (mu, mv) = endo::predicted_uv_matrices(n);
    let mut failures = Vec::new();
    compare_matrix("u", &endo::matrix_form_chart0(&endo::make_u(n)), &mu, &mut failures);
    compare_matrix("v", &endo::matrix_form_chart0(&endo::make_v(n)), &mv, &mut failures);
    Ok(Outcome::from_failures(failures, format!("{0}x{0} matrices", n + 1)))
}

fn uv_diagonals(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let (u, v) = (endo::make_u(n), endo::make_v(n));
    let [uv, vu, _] = endo::predicted_uv_diagonals(n);
    let mut failures = Vec::new();
    compare_matrix("uv", &endo::matrix_form_chart0(&u.mul(&v)), &uv, &mut failures);
    compare_matrix("vu", &endo::matrix_form_chart0(&v.mul(&u)), &vu, &mut failures);
    Ok(Outcome::from_failures(failures, format!("uv = {}, vu = {}", show_diag(&uv), show_diag(&vu))))
}

fn uv_commutator_claim(n: usize) -> String {
    format!("uv - vu = {} on chart 0", show_diag(&endo::predicted_uv_diagonals(n)[2]))
}

fn uv_commutator(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let (u, v) = (endo::make_u(n), endo::make_v(n));
    let want = &endo::predicted_uv_diagonals(n)[2];
    let mut failures = Vec::new();
    compare_matrix("uv - vu", &endo::matrix_form_chart0(&u.mul(&v).sub(&v.mul(&u))), want, &mut failures);
    Ok(Outcome::from_failures(failures, show_diag(want)))
}

fn group_element(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let order = n as u32 + 1;
    let g = endo::make_g(n);
    let one = EndoElement::identity(n);
    let mut failures = Vec::new();
    for j in 1..order {
        if g.pow(j) == one {
            failures.push(format!("g^{j} = 1"));
        }
    }
    if g.pow(order) != one {
        failures.push(format!("g^{order} != 1"));
    }
    let zeta = CycNumber::zeta_pow(order, 1);
    let (u, v) = (endo::make_u(n), endo::make_v(n));
    if g.mul(&u) != u.mul(&g).scale_cyc(&zeta) {
        failures.push("gu != zeta ug".into());
    }
    if g.mul(&v) != v.mul(&g).scale_cyc(&CycNumber::zeta_pow(order, -1)) {
        failures.push("gv != zeta^-1 vg".into());
    }
    let inv = CycNumber::from_int(order, order as i64).inv().expect("n + 1 is nonzero");
    for i in 0..=n {
        let sum = (0..order).fold(EndoElement::zero(n), |acc, j| {
            acc.add(&g.pow(j).scale_cyc(&CycNumber::zeta_pow(order, i as i64 * j as i64)))
        });
        if sum.scale_cyc(&inv) != endo::make_idempotent(n, i)? {
            failures.push(format!("e_{i} is not sum_j zeta^(ij) g^j / (n+1)"));
        }
    }
    Ok(Outcome::from_failures(failures, format!("group of order {order}")))
}

fn arrow_relations(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let (u, v) = (endo::make_u(n), endo::make_v(n));
    let m = n as u32 + 1;
    let e = |k: i64| endo::make_idempotent(n, wrap(n, k));
    let mut failures = Vec::new();
    for i in 0..=n {
        let ii = i as i64;
        let a = endo::make_alpha(n, i)?;
        let b = endo::make_beta(n, i)?;
        let checks = [
            ("alpha = e_i u e_{i+1}", a == e(ii)?.mul(&u).mul(&e(ii + 1)?)),
            ("beta = e_{i+1} v e_i", b == e(ii + 1)?.mul(&v).mul(&e(ii)?)),
            ("e_i u = u e_{i+1}", e(ii)?.mul(&u) == u.mul(&e(ii + 1)?)),
            ("e_i v = v e_{i-1}", e(ii)?.mul(&v) == v.mul(&e(ii - 1)?)),
            ("alpha beta = uv e_i", a.mul(&b) == u.mul(&v).mul(&e(ii)?)),
            ("beta alpha = vu e_{i+1}", b.mul(&a) == v.mul(&u).mul(&e(ii + 1)?)),
        ];
        for (name, ok) in checks {
            if !ok {
                failures.push(format!("i = {i}: {name}"));
            }
        }
        let mut apath = e(ii)?;
        let mut bpath = e(ii)?;
        for k in 0..m as i64 {
            apath = apath.mul(&endo::make_alpha(n, wrap(n, ii + k))?);
            bpath = bpath.mul(&endo::make_beta(n, wrap(n, ii - k - 1))?);
        }
        if apath != u.pow(m).mul(&e(ii)?) {
            failures.push(format!("i = {i}: alpha cycle != u^{m} e_i"));
        }
        if bpath != v.pow(m).mul(&e(ii)?) {
            failures.push(format!("i = {i}: beta cycle != v^{m} e_i"));
        }
    }
    Ok(Outcome::from_failures(failures, format!("{} vertices", n + 1)))
}

fn xyz(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let r0 = ChartRing::chart(n, 0)?;
    let rn = ChartRing::chart(n, n)?;
    let mut failures = Vec::new();
    for i in 0..=n {
        let (x, y, z) = endo::make_xyz(n, i)?;
        let (x, y, z) = (x.block_hom(i, i), y.block_hom(i, i), z.block_hom(i, i));
        if x.component(n) != &ChartElement::x(rn) {
            failures.push(format!("i = {i}: (x)_n = {}", x.component(n)));
        }
        if y.component(0) != &ChartElement::y(r0) {
            failures.push(format!("i = {i}: (y)_0 = {}", y.component(0)));
        }
        let mut c = alloc::vec![0i64; n + 1];
        if i > 0 {
            c[0] = i as i64 - 1;
            c[1..=i].iter_mut().for_each(|t| *t = 1);
        }
        let z0 = ChartElement::x(r0).mul(&ChartElement::y(r0))?.add(&ChartElement::constant(r0, lin(n, &c)))?;
        if z.component(0) != &z0 {
            failures.push(format!("i = {i}: (z)_0 = {}, expected {z0}", z.component(0)));
        }
        let (wx, wy) = (1 - n as i64, n as i64 + 1);
        let lhs = endo::weighted_leading_part(&x.component(0).mul(y.component(0))?, wx, wy);
        let rhs = endo::weighted_leading_part(&z.component(0).pow(n as u32 + 1), wx, wy);
        if lhs != rhs {
            failures.push(format!("i = {i}: leading parts {lhs} != {rhs}"));
        }
    }
    // (x)_0 = x_0 ∏_{i=1}^n (x_0 y_0 + (i-1) t_0 + t_1 + … + t_i) on vertex 0
    let x = endo::make_xyz(n, 0)?.0.block_hom(0, 0);
    let mut prod = ChartElement::x(r0);
    for i in 1..=n {
        let mut c = alloc::vec![0i64; n + 1];
        c[0] = i as i64 - 1;
        c[1..=i].iter_mut().for_each(|t| *t = 1);
        prod = prod.mul(&ChartElement::x(r0).mul(&ChartElement::y(r0))?.add(&ChartElement::constant(r0, lin(n, &c)))?)?;
    }
    if x.component(0) != &prod {
        failures.push(format!("(x)_0 = {}, expected {prod}", x.component(0)));
    }
    Ok(Outcome::from_failures(failures, format!("{} vertices", n + 1)))
}

fn random_endo<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<EndoElement> {
    let mut a = EndoElement::identity(n);
    for _ in 0..rng.gen_range(1..=4) {
        let i = rng.gen_range(0..=n);
        let f = match rng.gen_range(0..6) {
            0 => endo::make_idempotent(n, i)?,
            1 => endo::make_alpha(n, i)?,
            2 => endo::make_beta(n, i)?,
            3 => endo::make_xyz(n, i)?.0,
            4 => endo::make_xyz(n, i)?.1,
            _ => endo::make_xyz(n, i)?.2,
        };
        a = a.mul(&f);
    }
    let c = ParamPoly::var(ParamSystem::T, n, rng.gen_range(0..=n)).scale_int(rng.gen_range(-3..=3));
    Ok(a.add(&a.mul(&endo::make_u(n)).scale(&c)))
}

fn reduction(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let mut gens = Generators::new(n);
    let mut rng = p.rng("reduction");
    let mut homs = Vec::new();
    for i in 0..=n {
        let (_, _, z) = endo::make_xyz(n, i)?;
        homs.push(z.block_hom(i, i));
        let ab = endo::make_alpha(n, i)?.mul(&endo::make_beta(n, i)?);
        homs.push(ab.block_hom(i, i));
        let up = wrap(n, i as i64 + 1);
        homs.push(endo::make_alpha(n, i)?.block_hom(i, up));
        homs.push(endo::make_beta(n, i)?.block_hom(up, i));
    }
    for _ in 0..p.samples.min(10) {
        homs.extend(random_endo(&mut rng, n)?.blocks().map(|(_, h)| h.clone()));
    }
    for h in &homs {
        let red = endo::reduce_to_generators(&mut gens, h)?;
        if !red.succeeded() {
            return Ok(Outcome::fail(format!("{h:?}: remainder {:?}", red.remainder)));
        }
    }
    Ok(Outcome::pass(format!("{} homomorphisms reduced", homs.len())))
}

// cbh

fn s_defining_rules(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let order = n as u32 + 1;
    let (u, v, g) = (SElement::u(n), SElement::v(n), SElement::g_pow(n, 1));
    let sum = (0..=n).fold(SElement::zero(n), |acc, i| acc.add(&SElement::s(n, i).mul(&SElement::g_pow(n, i as i64))));
    let mut failures = Vec::new();
    if g.mul(&u) != u.mul(&g).scale_cyc(&CycNumber::zeta_pow(order, 1)) {
        failures.push("gu != zeta ug".to_string());
    }
    if g.mul(&v) != v.mul(&g).scale_cyc(&CycNumber::zeta_pow(order, -1)) {
        failures.push("gv != zeta^-1 vg".to_string());
    }
    if v.mul(&u) != u.mul(&v).sub(&sum) {
        failures.push(format!("vu = {}", v.mul(&u)));
    }
    if g.pow(order) != SElement::one(n) {
        failures.push(format!("g^{order} != 1"));
    }
    Ok(Outcome::from_failures(failures, format!("uv - vu = {sum}")))
}

fn random_word<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<SLetter> {
    (0..len).map(|_| [SLetter::U, SLetter::V, SLetter::G][rng.gen_range(0..3)]).collect()
}

fn s_confluence(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let mut rng = p.rng("s-confluence");
    let one = ParamPoly::one(ParamSystem::S, n);
    for _ in 0..p.samples {
        let len = rng.gen_range(0..=2 * p.degree as usize);
        let w = random_word(&mut rng, len);
        let left = cbh::rewrite_normal_form(n, &w, true)?;
        let right = cbh::rewrite_normal_form(n, &w, false)?;
        let prod = SElement::from_word(n, one.clone(), &w);
        if left != right || left != prod {
            return Ok(Outcome::fail(format!("word {w:?}: leftmost {left}, rightmost {right}, product {prod}")));
        }
    }
    Ok(Outcome::pass(format!("{} random words", p.samples)))
}

fn s_associativity(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let mut rng = p.rng("s-associativity");
    let d = p.degree.min(3);
    for _ in 0..p.samples.min(20) {
        let a = mckay::random_s_element(&mut rng, n, d, 3);
        let b = mckay::random_s_element(&mut rng, n, d, 3);
        let c = mckay::random_s_element(&mut rng, n, d, 3);
        if a.mul(&b).mul(&c) != a.mul(&b.mul(&c)) || a.mul(&b.add(&c)) != a.mul(&b).add(&a.mul(&c)) {
            return Ok(Outcome::fail(format!("({a}, {b}, {c})")));
        }
    }
    Ok(Outcome::pass(format!("{} random triples", p.samples.min(20))))
}

fn s_idempotents(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let (u, v) = (SElement::u(n), SElement::v(n));
    let mut failures = Vec::new();
    let mut total = SElement::zero(n);
    for i in 0..=n as i64 {
        let ei = cbh::make_es(n, i);
        for j in 0..=n as i64 {
            let want = if i == j { ei.clone() } else { SElement::zero(n) };
            if ei.mul(&cbh::make_es(n, j)) != want {
                failures.push(format!("e_{i} e_{j}"));
            }
        }
        if ei.mul(&u) != u.mul(&cbh::make_es(n, i + 1)) {
            failures.push(format!("e_{i} u != u e_{}", i + 1));
        }
        if ei.mul(&v) != v.mul(&cbh::make_es(n, i - 1)) {
            failures.push(format!("e_{i} v != v e_{}", i - 1));
        }
        total = total.add(&ei);
    }
    if total != SElement::one(n) {
        failures.push("sum of idempotents is not 1".into());
    }
    Ok(Outcome::from_failures(failures, format!("{} idempotents", n + 1)))
}

fn s_quiver_relations(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let m = n as i64 + 1;
    let (u, v) = (SElement::u(n), SElement::v(n));
    let mut failures = Vec::new();
    let (mut su, mut sv) = (SElement::zero(n), SElement::zero(n));
    for i in 0..m {
        let a = cbh::make_alpha_s(n, i);
        let b = cbh::make_beta_s(n, i);
        su = su.add(&a);
        sv = sv.add(&b);
        if a.mul(&b) != u.mul(&v).mul(&cbh::make_es(n, i)) {
            failures.push(format!("i = {i}: alpha beta != uv e_i"));
        }
        if b.mul(&a) != v.mul(&u).mul(&cbh::make_es(n, i + 1)) {
            failures.push(format!("i = {i}: beta alpha != vu e_(i+1)"));
        }
        for j in 0..m {
            if (j - i - 1).rem_euclid(m) != 0 && !cbh::block(&u, i, j).is_zero() {
                failures.push(format!("e_{i} u e_{j} != 0"));
            }
        }
    }
    if su != u || sv != v {
        failures.push("arrows do not sum to u, v".into());
    }
    Ok(Outcome::from_failures(failures, format!("{m} vertices")))
}

fn s_pbw_counts(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let mut failures = Vec::new();
    for d in 0..=p.degree {
        let (words, normal) = cbh::pbw_degree_count(n, d);
        let want = (d as usize + 1) * (n + 1);
        if words != normal || words != want {
            failures.push(format!("d = {d}: {words} words, {normal} normal forms, expected {want}"));
        }
    }
    Ok(Outcome::from_failures(failures, format!("degrees 0..={}", p.degree)))
}

fn s_block_dims(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let mut failures = Vec::new();
    for d in 0..=p.degree {
        let mut total = 0;
        for i in 0..=n as i64 {
            for j in 0..=n as i64 {
                let dim = cbh::s_graded_dim(n, i, j, d);
                let count = (0..=d).filter(|&a| cbh::shifted_idempotent(n, i, a, d - a) == j).count();
                if dim != count {
                    failures.push(format!("({i},{j}) d = {d}: dimension {dim}, expected {count}"));
                }
                total += dim;
            }
        }
        if total != (d as usize + 1) * (n + 1) {
            failures.push(format!("d = {d}: blocks sum to {total}"));
        }
    }
    Ok(Outcome::from_failures(failures, format!("degrees 0..={}", p.degree)))
}

// iso

fn phi_relation(p: &SuiteParams) -> Result<Outcome> {
    let r = mckay::relation_image(&mut Phi::new(p.n));
    Ok(if r.is_zero() { Outcome::pass("relation image is zero") } else { Outcome::fail(format!("relation image {r:?}")) })
}

fn phi_idempotents(p: &SuiteParams) -> Result<Outcome> {
    let n = p.n;
    let mut phi = Phi::new(n);
    let mut failures = Vec::new();
    if phi.apply(&SElement::one(n)) != EndoElement::identity(n) {
        failures.push("phi(1) != 1".to_string());
    }
    if phi.apply(&SElement::g_pow(n, 1)).pow(n as u32 + 1) != EndoElement::identity(n) {
        failures.push("phi(g)^(n+1) != 1".to_string());
    }
    for i in 0..=n {
        if phi.apply(&cbh::make_es(n, i as i64)) != endo::make_idempotent(n, i)? {
            failures.push(format!("phi(e_{i}) != e_{i}"));
        }
    }
    Ok(Outcome::from_failures(failures, format!("{} idempotents", n + 1)))
}

fn phi_multiplicative(p: &SuiteParams) -> Result<Outcome> {
    let r = mckay::verify_phi_multiplicative(&mut p.rng("phi-multiplicative"), p.n, p.samples, p.degree);
    Ok(match r.witness {
        None => Outcome::pass(format!("{} pairs up to degree {}", r.samples, r.degree_bound)),
        Some((a, b)) => Outcome::fail(format!("phi(ab) != phi(a)phi(b) for a = {a}, b = {b}")),
    })
}

fn phi_mutation(p: &SuiteParams) -> Result<Outcome> {
    let failures = (0..=p.n)
        .filter(|&k| mckay::perturbed_relation_image(p.n, k).is_zero())
        .map(|k| format!("perturbing w_{k} keeps the relation"))
        .collect();
    Ok(Outcome::from_failures(failures, format!("{} perturbations detected", p.n + 1)))
}

fn injectivity(p: &SuiteParams) -> Result<Outcome> {
    let r = mckay::injectivity_evidence(&mut p.rng("injectivity"), p.n, p.degree);
    let mut failures = Vec::new();
    if !r.xyz_match {
        failures.push("phi(x, y, z) != (x, y, z)".to_string());
    }
    if !r.leading_relation_s {
        failures.push("x y != z^(n+1) in leading terms of S".to_string());
    }
    if !r.leading_relation_t {
        failures.push("x y != z^(n+1) in leading terms of chart 0".to_string());
    }
    for s in &r.slices {
        if s.rank != s.count {
            failures.push(format!("block ({},{}) degree <= {}: rank {} of {}", s.i, s.j, s.degree, s.rank, s.count));
        }
    }
    let words: usize = r.slices.iter().filter(|s| s.degree == p.degree).map(|s| s.count).sum();
    Ok(Outcome::from_failures(failures, format!("{words} PBW words up to degree {}, all independent", p.degree)))
}

fn surjectivity(p: &SuiteParams) -> Result<Outcome> {
    let r = mckay::surjectivity_evidence(p.n, &p.bounds)?;
    let mut failures = Vec::new();
    let mut total = 0;
    for b in &r.blocks {
        total += b.basis_size;
        if let Some(f) = b.failures.first() {
            failures.push(format!("block ({},{}): {f}", b.i, b.j));
        }
    }
    let mut cases: Vec<&str> = r.blocks.iter().flat_map(|b| b.cases.iter().map(|&c| mckay::case_name(c))).collect();
    cases.sort();
    cases.dedup();
    Ok(Outcome::from_failures(failures, format!("{total} basis homomorphisms reduced; branches {}", cases.join(", "))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_sorted() {
        let all = checks_for(&Suite::ALL);
        let names: Vec<_> = all.iter().map(|c| (c.suite, c.name)).collect();
        let sorted = {
            let mut s = names.clone();
            s.sort();
            s
        };
        assert_eq!(names, sorted);
        let unique: alloc::collections::BTreeSet<_> = names.iter().map(|x| x.1).collect();
        assert_eq!(unique.len(), all.len());
        assert_eq!(Suite::parse("all").unwrap().len(), 5);
        assert_eq!(Suite::parse("iso"), Some(alloc::vec![Suite::Iso]));
        assert!(Suite::parse("isomorphism").is_none());
    }

    #[test]
    fn commutator_claim_for_n1() {
        assert_eq!(uv_commutator_claim(1), "uv - vu = diag(-t1, t0 + t1) on chart 0");
    }

    #[test]
    fn fast_suites_pass() {
        for n in 0..=2 {
            let mut p = SuiteParams::new(n);
            p.bounds = Bounds::new(3, 1);
            p.degree = 3;
            p.samples = 5;
            for c in checks_for(&[Suite::Scheme, Suite::Tilting, Suite::Cbh, Suite::Iso]) {
                let r = c.run(&p);
                assert!(r.passed, "n={n} {}: {}", r.name, r.detail);
            }
        }
    }

    #[test]
    fn sheaves_suite_passes() {
        for n in 0..=2 {
            let mut p = SuiteParams::new(n);
            p.bounds = Bounds::new(4, 2);
            p.samples = 10;
            for c in checks(Suite::Sheaves) {
                let r = c.run(&p);
                assert!(r.passed, "n={n} {}: {}", r.name, r.detail);
            }
        }
    }
}

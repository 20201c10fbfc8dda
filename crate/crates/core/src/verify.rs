//! Exact checks of the conjugation, commutator and membership identities
//! that the involution generating sets rest on.
//!
//! Every check compares reduced tables, so there is no tolerance anywhere.
//! A failing report carries both sides for diffing.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::constructions::{
    base_involutions, default_conjugators, dot, embed, make_t, make_tau,
    plan_alpha, sigma_dot, spine, spine_branch, AlphaPlan, AlphaSequence, Permutation,
    SidonStrategy,
};
use crate::element::{random_element, ProbeOutcome, Sign, VnElement};
use crate::error::{Error, Result};
use crate::words::{Alphabet, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail {
        lhs: VnElement,
        rhs: VnElement,
        reason: String,
    },
    PreconditionViolated(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub name: String,
    pub params: String,
    pub verdict: Verdict,
}

impl VerificationReport {
    fn new(name: &str, params: String, verdict: Verdict) -> Self {
        VerificationReport {
            name: name.to_string(),
            params,
            verdict,
        }
    }

    fn equality(name: &str, params: String, lhs: VnElement, rhs: VnElement) -> Self {
        let verdict = if lhs == rhs {
            Verdict::Pass
        } else {
            Verdict::Fail {
                lhs,
                rhs,
                reason: "sides differ".into(),
            }
        };
        VerificationReport::new(name, params, verdict)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        matches!(self.verdict, Verdict::Fail { .. })
    }

    pub fn status(&self) -> &'static str {
        match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail { .. } => "FAIL",
            Verdict::PreconditionViolated(_) => "SKIP(precondition)",
        }
    }

    /// Both tables of a failure, or the violated precondition.
    pub fn detail(&self) -> Option<String> {
        match &self.verdict {
            Verdict::Pass => None,
            Verdict::Fail { lhs, rhs, reason } => {
                Some(format!("{reason}\n--- lhs\n{lhs}--- rhs\n{rhs}"))
            }
            Verdict::PreconditionViolated(why) => Some(why.clone()),
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.name, self.params, self.status())
    }
}

fn fail(g: &VnElement, reason: impl Into<String>) -> Verdict {
    Verdict::Fail {
        lhs: g.clone(),
        rhs: g.clone(),
        reason: reason.into(),
    }
}

/// `(x_1^k gamma)^t = x_1^{k+1} gamma`.
pub fn verify_translation(gamma: &VnElement, k: usize) -> VerificationReport {
    let params = format!("n={} k={k} depth={}", gamma.alphabet(), gamma.depth());
    if k == 0 {
        return VerificationReport::new("eq2", params, Verdict::PreconditionViolated("k must be >= 1".into()));
    }
    let t = make_t(gamma.alphabet());
    let lhs = embed(&spine(k), gamma)
        .and_then(|e| e.conjugate(&t))
        .expect("same alphabet");
    let rhs = embed(&spine(k + 1), gamma).expect("valid word");
    VerificationReport::equality("eq2", params, lhs, rhs)
}

fn alpha_params(alpha: &AlphaSequence, k: usize) -> String {
    format!("n={} l={} I={:?} k={k}", alpha.alphabet, alpha.len(), alpha.support())
}

/// `s_alpha^{t^k} = x_1^{l+k+1} sigma_dot . prod_i x_1^{i+k} x_2 alpha_i`.
pub fn verify_s_alpha_conjugation(alpha: &AlphaSequence, k: usize) -> VerificationReport {
    let a = alpha.alphabet;
    let ell = alpha.len();
    let s = alpha.s_alpha();
    let lhs = s.conjugate(&make_t(a).power(k as i64)).expect("same alphabet");
    let mut rhs = embed(&spine(ell + k + 1), &sigma_dot(a)).expect("valid word");
    for i in 1..=ell {
        let factor = embed(&spine_branch(i + k), alpha.get(i)).expect("valid word");
        rhs = rhs.compose(&factor).expect("same alphabet");
    }
    VerificationReport::equality("eq3", alpha_params(alpha, k), lhs, rhs)
}

/// `[s_alpha, s_alpha^{t^k}] = x_1^{l+1}[sigma_dot, x_1^k sigma_dot] .
/// prod_{i=k+1}^{l} x_1^i x_2 [alpha_i, alpha_{i-k}]`, under the hypothesis
/// `alpha_i = id` for `l-k+1 <= i <= l`.
pub fn verify_commutator_trick(alpha: &AlphaSequence, k: usize) -> VerificationReport {
    let a = alpha.alphabet;
    let ell = alpha.len();
    let params = alpha_params(alpha, k);
    let start = (ell + 1).saturating_sub(k).max(1);
    if let Some(i) = (start..=ell).find(|&i| !alpha.get(i).is_identity()) {
        return VerificationReport::new(
            "trick",
            params,
            Verdict::PreconditionViolated(format!("alpha_{i} != id with {start} <= {i} <= {ell}")),
        );
    }
    let s = alpha.s_alpha();
    let lhs = s
        .commutator(&s.conjugate(&make_t(a).power(k as i64)).expect("same alphabet"))
        .expect("same alphabet");
    let sig = sigma_dot(a);
    let inner = sig
        .commutator(&embed(&spine(k), &sig).expect("valid word"))
        .expect("same alphabet");
    let mut rhs = embed(&spine(ell + 1), &inner).expect("valid word");
    for i in (k + 1)..=ell {
        let c = alpha.get(i).commutator(alpha.get(i - k)).expect("same alphabet");
        rhs = rhs
            .compose(&embed(&spine_branch(i), &c).expect("valid word"))
            .expect("same alphabet");
    }
    VerificationReport::equality("trick", params, lhs, rhs)
}

/// `gamma_{i,j} = [sigma_dot, x_1^{j-i} sigma_dot]`.
pub fn isolation_gamma(alphabet: Alphabet, distance: usize) -> VnElement {
    let s = sigma_dot(alphabet);
    s.commutator(&embed(&spine(distance), &s).expect("valid word"))
        .expect("same alphabet")
}

/// `[s_alpha, s_alpha^{t^{j-i}}] = x_1^{l+1} gamma_{i,j} . x_1^j x_2 [alpha_j, alpha_i]`
/// for `i < j` in the support, with `gamma_{i,j}` volume-preserving and the
/// two factors commuting.
pub fn verify_isolation(plan: &AlphaPlan, i: u64, j: u64) -> VerificationReport {
    let a = plan.alphabet();
    let ell = plan.len();
    let params = format!("n={a} l={ell} I={:?} i={i} j={j}", plan.support().members());
    let bad = |why: String| VerificationReport::new("isolation", params.clone(), Verdict::PreconditionViolated(why));
    if i >= j {
        return bad(format!("need i < j, got i={i} j={j}"));
    }
    if !plan.support().contains(i) || !plan.support().contains(j) {
        return bad(format!("{i} and {j} must both lie in I"));
    }
    let d = (j - i) as usize;
    let s = plan.s_alpha();
    let lhs = s
        .commutator(&s.conjugate(&make_t(a).power(d as i64)).expect("same alphabet"))
        .expect("same alphabet");
    let gamma = isolation_gamma(a, d);
    let top = embed(&spine(ell + 1), &gamma).expect("valid word");
    let (aj, ai) = (plan.sequence().get(j as usize), plan.sequence().get(i as usize));
    let branch = embed(&spine_branch(j as usize), &aj.commutator(ai).expect("same alphabet"))
        .expect("valid word");
    let rhs = top.compose(&branch).expect("same alphabet");
    let verdict = if lhs != rhs {
        Verdict::Fail {
            lhs,
            rhs,
            reason: "sides differ".into(),
        }
    } else if !gamma.is_volume_preserving() {
        fail(&gamma, "gamma_{i,j} is not volume-preserving")
    } else if !top.support().supported_in(&spine(ell + 1)) {
        fail(&top, "embedded gamma_{i,j} leaves the cone x_1^{l+1}")
    } else if top.compose(&branch).ok() != branch.compose(&top).ok() {
        fail(&top, "the two factors do not commute")
    } else {
        Verdict::Pass
    };
    VerificationReport::new("isolation", params, verdict)
}

/// Membership in `(+)_i x_i V_n x| Sym(X_n)^.`: the element permutes the
/// level-1 cones.
pub fn in_maximal_subgroup(g: &VnElement) -> bool {
    if g.is_identity() {
        return true;
    }
    let n = g.alphabet().degree() as usize;
    let mut map = vec![0u8; n + 1];
    for (d, r) in g.pairs() {
        let (Some(x), Some(y)) = (d.first(), r.first()) else {
            return false;
        };
        match map[x as usize] {
            0 => map[x as usize] = y,
            z if z != y => return false,
            _ => {}
        }
    }
    let mut hit = vec![false; n + 1];
    map[1..].iter().all(|&y| y != 0 && !std::mem::replace(&mut hit[y as usize], true))
}

/// The finite group generated by volume-preserving elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnGroup {
    /// The level `L` on which the generators were realized as permutations
    /// of `X_n^L`.
    pub level: usize,
    pub order: usize,
    /// Reduced forms, sorted.
    pub elements: Vec<VnElement>,
}

const EN_CAP: usize = 1_000_000;

/// Closure of `gens` inside `Sym(X_n^L)` for `L` the largest reduced word
/// length among the generators.
pub fn enumerate_en_group(gens: &[VnElement]) -> Result<EnGroup> {
    let level = gens.iter().map(VnElement::depth).max().unwrap_or(0);
    enumerate_en_group_at_level(gens, level)
}

pub fn enumerate_en_group_at_level(gens: &[VnElement], level: usize) -> Result<EnGroup> {
    let Some(first) = gens.first() else {
        return Err(Error::BadGenerators("empty generator list".into()));
    };
    let alphabet = first.alphabet();
    for (k, g) in gens.iter().enumerate() {
        alphabet.check(g.alphabet())?;
        if !g.is_volume_preserving() {
            return Err(Error::NotVolumePreserving(format!("#{k}\n{g}")));
        }
        if g.depth() > level {
            return Err(Error::LevelTooSmall {
                level,
                longest: g.depth(),
            });
        }
    }
    let points = Word::all_of_length(alphabet, level);
    let n = alphabet.degree() as usize;
    let index = |w: &Word| w.letters().iter().fold(0usize, |acc, &l| acc * n + (l as usize - 1));
    let perms: Vec<Vec<u32>> = gens
        .iter()
        .map(|g| {
            points
                .iter()
                .map(|w| index(&g.apply_word(w).expect("level covers the domain")) as u32)
                .collect()
        })
        .collect();
    let identity: Vec<u32> = (0..points.len() as u32).collect();
    let mut seen = HashSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    while let Some(p) = queue.pop_front() {
        for g in &perms {
            let q: Vec<u32> = p.iter().map(|&x| g[x as usize]).collect();
            if seen.insert(q.clone()) {
                if seen.len() > EN_CAP {
                    return Err(Error::TooLarge(EN_CAP));
                }
                queue.push_back(q);
            }
        }
    }
    let order = seen.len();
    debug_assert!(divides_factorial(order, points.len()));
    let mut elements: Vec<VnElement> = seen
        .into_iter()
        .map(|p| {
            let table = points
                .iter()
                .cloned()
                .zip(p.iter().map(|&x| points[x as usize].clone()))
                .collect();
            VnElement::from_table(alphabet, table).expect("permutation of a level")
        })
        .collect();
    elements.sort_unstable();
    Ok(EnGroup {
        level,
        order,
        elements,
    })
}

/// `d | m!`, via Legendre's formula on the prime factorization of `d`.
pub fn divides_factorial(d: usize, m: usize) -> bool {
    let mut rest = d;
    let mut p = 2;
    while rest > 1 {
        if p * p > rest {
            p = rest;
        }
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            let (mut avail, mut q) = (0, p);
            while q <= m {
                avail += m / q;
                q = match q.checked_mul(p) {
                    Some(v) => v,
                    None => break,
                };
            }
            if avail < e {
                return false;
            }
        }
        p += 1;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbelianImage {
    Trivial,
    NonTrivial,
}

/// Image in `V_n^ab`: `Z/2` detected by the sign for odd `n`, trivial for
/// even `n`.
pub fn abelianization_image(g: &VnElement) -> AbelianImage {
    match g.sign() {
        Ok(Sign::Minus) => AbelianImage::NonTrivial,
        _ => AbelianImage::Trivial,
    }
}

/// `sigma_dot^2 = tau^2 = s_alpha^2 = id`.
pub fn verify_involutions_for(alpha: &AlphaSequence) -> VerificationReport {
    let a = alpha.alphabet;
    let params = format!("n={a} l={} I={:?}", alpha.len(), alpha.support());
    let checks = [
        ("sigma", sigma_dot(a)),
        ("tau", make_tau(a)),
        ("s_alpha", alpha.s_alpha()),
    ];
    for (name, g) in checks {
        let sq = g.compose(&g).expect("same alphabet");
        if !sq.is_identity() {
            return VerificationReport::new(
                "involutions",
                params,
                Verdict::Fail {
                    lhs: sq,
                    rhs: VnElement::identity(a),
                    reason: format!("{name}^2 != id"),
                },
            );
        }
    }
    VerificationReport::new("involutions", params, Verdict::Pass)
}

/// Involutions used as alpha bases in the grids: conjugates of
/// `x_1 sigma_dot . x_2 sigma_dot` by `id`, `sigma_dot` and `tau`.
pub fn sample_base(alphabet: Alphabet) -> Vec<VnElement> {
    base_involutions(alphabet, &default_conjugators(alphabet, 1)).expect("a working gamma exists")
}

/// A planned alpha sequence over the first `size` sample involutions.
pub fn sample_plan(alphabet: Alphabet, size: usize) -> AlphaPlan {
    let base = sample_base(alphabet);
    plan_alpha(&base[..size.min(base.len())], SidonStrategy::Greedy).expect("base is involutive")
}

pub fn verify_involution_suite(n: usize) -> Result<Vec<VerificationReport>> {
    let a = Alphabet::new(n)?;
    let mut out = vec![verify_involutions_for(&AlphaSequence::new(a, vec![])?)];
    for size in 1..=3 {
        out.push(verify_involutions_for(sample_plan(a, size).sequence()));
    }
    Ok(out)
}

/// A random involution: a random conjugate of `w sigma_dot` for a random
/// short word `w`.
pub fn random_involution<R: Rng>(alphabet: Alphabet, rng: &mut R) -> VnElement {
    let len = rng.gen_range(0..=2);
    let w = Word::from_letters(
        (0..len)
            .map(|_| rng.gen_range(1..=alphabet.degree()))
            .collect::<Vec<u8>>(),
    );
    let base = embed(&w, &sigma_dot(alphabet)).expect("valid word");
    let g = random_element(alphabet, 3, 3, rng);
    base.conjugate(&g).expect("same alphabet")
}

/// A random sequence of length `<= max_len` with entries of order <= 2.
pub fn random_involutive_alpha<R: Rng>(alphabet: Alphabet, max_len: usize, rng: &mut R) -> AlphaSequence {
    let len = rng.gen_range(0..=max_len);
    let entries = (0..len)
        .map(|_| {
            if rng.gen_bool(0.4) {
                VnElement::identity(alphabet)
            } else {
                random_involution(alphabet, rng)
            }
        })
        .collect();
    AlphaSequence::new(alphabet, entries).expect("one alphabet")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Eq2,
    Eq3,
    Trick,
    Isolation,
    Involutions,
    Maximal,
    En,
    Abelianization,
    Sign,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "eq2" => Suite::Eq2,
            "eq3" => Suite::Eq3,
            "trick" => Suite::Trick,
            "isolation" => Suite::Isolation,
            "involutions" => Suite::Involutions,
            "maximal" => Suite::Maximal,
            "en" => Suite::En,
            "abelianization" => Suite::Abelianization,
            "sign" => Suite::Sign,
            _ => return Err(Error::BadGenerators(format!("unknown suite `{s}`"))),
        })
    }
}

/// Parameter grid for [`run_suite`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub degrees: Vec<usize>,
    pub ks: Vec<usize>,
    /// Random samples per degree for the randomized checks.
    pub samples: usize,
    pub seed: u64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            degrees: vec![2, 3, 5],
            ks: (0..=5).collect(),
            samples: 200,
            seed: 0,
        }
    }
}

type Job = Box<dyn Fn() -> Vec<VerificationReport> + Send + Sync>;

/// Runs a suite over the grid. Checks run in parallel; the report order is
/// fixed by the grid.
pub fn run_suite(suite: Suite, grid: &Grid) -> Result<Vec<VerificationReport>> {
    let mut jobs: Vec<Job> = Vec::new();
    let suites = match suite {
        Suite::All => vec![
            Suite::Involutions,
            Suite::Eq2,
            Suite::Eq3,
            Suite::Trick,
            Suite::Isolation,
            Suite::Maximal,
            Suite::En,
            Suite::Abelianization,
            Suite::Sign,
        ],
        s => vec![s],
    };
    for s in suites {
        for &n in &grid.degrees {
            let a = Alphabet::new(n)?;
            push_jobs(&mut jobs, s, a, grid);
        }
    }
    Ok(jobs.par_iter().flat_map_iter(|job| job()).collect())
}

fn seeded(grid: &Grid, salt: u64, n: u8) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(grid.seed ^ (salt << 32) ^ ((n as u64) << 16))
}

fn push_jobs(jobs: &mut Vec<Job>, suite: Suite, a: Alphabet, grid: &Grid) {
    let ks = grid.ks.clone();
    match suite {
        Suite::All => unreachable!("expanded by run_suite"),
        Suite::Involutions => {
            jobs.push(Box::new(move || verify_involution_suite(a.degree() as usize).expect("n >= 2")));
        }
        Suite::Eq2 => {
            let mut rng = seeded(grid, 2, a.degree());
            let mut gammas = vec![sigma_dot(a), VnElement::identity(a)];
            gammas.extend((0..grid.samples).map(|_| random_element(a, 6, 4, &mut rng)));
            for gamma in gammas {
                let ks = ks.clone();
                jobs.push(Box::new(move || {
                    ks.iter()
                        .filter(|&&k| k >= 1)
                        .map(|&k| verify_translation(&gamma, k))
                        .collect()
                }));
            }
        }
        Suite::Eq3 | Suite::Trick => {
            let mut seqs: Vec<AlphaSequence> =
                (1..=3).map(|size| sample_plan(a, size).sequence().clone()).collect();
            if a.degree() <= 3 {
                let mut rng = seeded(grid, 3, a.degree());
                seqs.extend((0..grid.samples / 20).map(|_| random_involutive_alpha(a, 6, &mut rng)));
            }
            for seq in seqs {
                let ks = ks.clone();
                jobs.push(Box::new(move || {
                    ks.iter()
                        .map(|&k| match suite {
                            Suite::Eq3 => verify_s_alpha_conjugation(&seq, k),
                            _ => verify_commutator_trick(&seq, k),
                        })
                        .collect()
                }));
            }
        }
        Suite::Isolation => {
            for size in [2, 3] {
                jobs.push(Box::new(move || {
                    let plan = sample_plan(a, size);
                    let members = plan.support().members().to_vec();
                    let mut out = Vec::new();
                    for (x, &i) in members.iter().enumerate() {
                        for &j in &members[x + 1..] {
                            out.push(verify_isolation(&plan, i, j));
                        }
                    }
                    out
                }));
            }
        }
        Suite::Maximal => {
            let mut rng = seeded(grid, 4, a.degree());
            let samples = grid.samples.clamp(1, 50);
            let mut cases: Vec<(String, VnElement, bool)> = vec![
                ("sigma".into(), sigma_dot(a), true),
                ("tau".into(), make_tau(a), false),
                ("t".into(), make_t(a), false),
            ];
            for k in 0..samples {
                let mut letters: Vec<u8> = a.letters().collect();
                letters.shuffle(&mut rng);
                let p = Permutation::from_images(a, letters).expect("shuffle is a bijection");
                cases.push((format!("dot{p}"), dot(&p, a).expect("same degree"), true));
                let w = Word::from_letters(vec![rng.gen_range(1..=a.degree())]);
                let g = random_element(a, 4, 3, &mut rng);
                cases.push((format!("embed{k}({w})"), embed(&w, &g).expect("valid word"), true));
            }
            for (label, g, expected) in cases {
                jobs.push(Box::new(move || {
                    let verdict = if in_maximal_subgroup(&g) == expected {
                        Verdict::Pass
                    } else {
                        fail(&g, format!("membership should be {expected}"))
                    };
                    vec![VerificationReport::new("maximal", format!("n={a} g={label}"), verdict)]
                }));
            }
        }
        Suite::En => {
            jobs.push(Box::new(move || en_checks(a)));
        }
        Suite::Abelianization => {
            let mut rng = seeded(grid, 5, a.degree());
            let pairs: Vec<(VnElement, VnElement)> = (0..grid.samples.min(100))
                .map(|_| (random_element(a, 4, 3, &mut rng), random_element(a, 4, 3, &mut rng)))
                .collect();
            jobs.push(Box::new(move || {
                let mut out = Vec::new();
                let s = sigma_dot(a);
                let expected = if a.is_odd() { AbelianImage::NonTrivial } else { AbelianImage::Trivial };
                let verdict = if abelianization_image(&s) == expected {
                    Verdict::Pass
                } else {
                    fail(&s, format!("expected {expected:?}"))
                };
                out.push(VerificationReport::new("abelianization", format!("n={a} g=sigma"), verdict));
                let bad = pairs.iter().find_map(|(x, y)| {
                    let c = x.commutator(y).expect("same alphabet");
                    (abelianization_image(&c) != AbelianImage::Trivial).then_some(c)
                });
                let verdict = match bad {
                    None => Verdict::Pass,
                    Some(c) => fail(&c, "commutator with nontrivial image"),
                };
                out.push(VerificationReport::new(
                    "abelianization",
                    format!("n={a} commutators={}", pairs.len()),
                    verdict,
                ));
                out
            }));
        }
        Suite::Sign => {
            let mut rng = seeded(grid, 6, a.degree());
            let pairs: Vec<(VnElement, VnElement)> = (0..grid.samples)
                .map(|_| (random_element(a, 5, 4, &mut rng), random_element(a, 5, 4, &mut rng)))
                .collect();
            let seed = grid.seed;
            jobs.push(Box::new(move || sign_checks(a, &pairs, seed)));
        }
    }
}

fn en_checks(a: Alphabet) -> Vec<VerificationReport> {
    let s = sigma_dot(a);
    let e1 = embed(&Word::from_letters(vec![1]), &s).expect("valid word");
    let mut out = Vec::new();
    let mut check = |label: &str, gens: Vec<VnElement>| {
        let verdict = match (enumerate_en_group(&gens), enumerate_en_group_at_level(&gens, 3)) {
            (Ok(g), Ok(h)) if g.order == h.order && divides_factorial(g.order, (a.degree() as usize).pow(g.level as u32)) => {
                Verdict::Pass
            }
            (Ok(g), Ok(h)) => fail(&gens[0], format!("order {} at level {} vs {} at level 3", g.order, g.level, h.order)),
            (Err(e), _) | (_, Err(e)) => Verdict::PreconditionViolated(e.to_string()),
        };
        out.push(VerificationReport::new("en", format!("n={a} gens={label}"), verdict));
    };
    check("sigma", vec![s.clone()]);
    check("sigma,x1sigma", vec![s.clone(), e1.clone()]);
    check("id", vec![VnElement::identity(a)]);
    out
}

fn sign_checks(a: Alphabet, pairs: &[(VnElement, VnElement)], seed: u64) -> Vec<VerificationReport> {
    let params = format!("n={a} pairs={}", pairs.len());
    if !a.is_odd() {
        let s = sigma_dot(a);
        let verdict = match s.sign_refinement_probe(0, seed) {
            ProbeOutcome::Inconsistent { .. } => Verdict::Pass,
            ProbeOutcome::WellDefined => fail(&s, "expected a parity witness for even n"),
        };
        return vec![VerificationReport::new("sign", format!("n={a} probe=sigma"), verdict)];
    }
    for (g, h) in pairs {
        let gh = g.compose(h).expect("same alphabet");
        let (sg, sh, sgh) = (g.sign().unwrap(), h.sign().unwrap(), gh.sign().unwrap());
        if sg * sh != sgh {
            return vec![VerificationReport::new(
                "sign",
                params,
                Verdict::Fail {
                    lhs: g.clone(),
                    rhs: h.clone(),
                    reason: format!("sign(gh) = {sgh} but sign(g) sign(h) = {}", sg * sh),
                },
            )];
        }
        for (k, x) in [g, h].into_iter().enumerate() {
            if let ProbeOutcome::Inconsistent { .. } = x.sign_refinement_probe(50, seed.wrapping_add(k as u64)) {
                return vec![VerificationReport::new("sign", params, fail(x, "parity changed under refinement"))];
            }
        }
    }
    vec![VerificationReport::new("sign", params, Verdict::Pass)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: usize) -> Alphabet {
        Alphabet::new(n).unwrap()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn translation_examples() {
        for n in [2, 3, 5] {
            for k in 1..=5 {
                assert!(verify_translation(&sigma_dot(a(n)), k).passed());
                assert!(verify_translation(&VnElement::identity(a(n)), k).passed());
            }
        }
        assert!(!verify_translation(&sigma_dot(a(2)), 0).passed());
    }

    #[test]
    fn conjugation_examples() {
        let plan = sample_plan(a(2), 2);
        for k in 0..=5 {
            let r = verify_s_alpha_conjugation(plan.sequence(), k);
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn trick_examples() {
        let n = a(2);
        let id = VnElement::identity(n);
        let beta = crate::constructions::base_alpha0(n);
        let seq = AlphaSequence::new(n, vec![id.clone(), beta.clone(), id.clone(), id.clone()]).unwrap();
        let r = verify_commutator_trick(&seq, 2);
        assert!(r.passed(), "{r}");
        // The right-hand side collapses to the top factor.
        let top = embed(&spine(5), &isolation_gamma(n, 2)).unwrap();
        let s = seq.s_alpha();
        let lhs = s.commutator(&s.conjugate(&make_t(n).power(2)).unwrap()).unwrap();
        assert_eq!(lhs, top);
        assert!(verify_commutator_trick(&seq, 0).passed());
        let tail = AlphaSequence::new(n, vec![id.clone(), beta.clone()]).unwrap();
        assert!(matches!(
            verify_commutator_trick(&tail, 1).verdict,
            Verdict::PreconditionViolated(_)
        ));
    }

    #[test]
    fn isolation_examples() {
        let p2 = sample_plan(a(2), 2);
        assert_eq!(p2.support().members(), &[2, 3]);
        assert!(verify_isolation(&p2, 2, 3).passed());
        assert!(matches!(verify_isolation(&p2, 2, 2).verdict, Verdict::PreconditionViolated(_)));
        assert!(matches!(verify_isolation(&p2, 1, 3).verdict, Verdict::PreconditionViolated(_)));
        let p3 = sample_plan(a(3), 3);
        assert_eq!(p3.support().members(), &[4, 5, 7]);
        for (i, j) in [(4, 5), (4, 7), (5, 7)] {
            let r = verify_isolation(&p3, i, j);
            assert!(r.passed(), "{r}: {:?}", r.detail());
        }
    }

    #[test]
    fn maximal_examples() {
        let n = a(2);
        assert!(in_maximal_subgroup(&sigma_dot(n)));
        assert!(in_maximal_subgroup(&VnElement::identity(n)));
        assert!(in_maximal_subgroup(&embed(&w("2.1"), &make_tau(n)).unwrap()));
        assert!(!in_maximal_subgroup(&make_tau(n)));
        assert!(!in_maximal_subgroup(&make_t(n)));
        let p = Permutation::parse(a(4), "(1 3 4)").unwrap();
        assert!(in_maximal_subgroup(&dot(&p, a(4)).unwrap()));
    }

    #[test]
    fn en_examples() {
        let n = a(2);
        let s = sigma_dot(n);
        assert_eq!(enumerate_en_group(std::slice::from_ref(&s)).unwrap().order, 2);
        let e1 = embed(&w("1"), &s).unwrap();
        let g = enumerate_en_group(&[s.clone(), e1.clone()]).unwrap();
        assert_eq!((g.level, g.order), (2, 8));
        assert_eq!(enumerate_en_group_at_level(&[s.clone(), e1], 3).unwrap().order, 8);
        assert_eq!(enumerate_en_group(&[VnElement::identity(n)]).unwrap().order, 1);
        assert!(matches!(
            enumerate_en_group(&[make_tau(n)]),
            Err(Error::NotVolumePreserving(_))
        ));
    }

    #[test]
    fn factorial_divisibility() {
        assert!(divides_factorial(8, 4));
        assert!(divides_factorial(24, 4));
        assert!(!divides_factorial(16, 4));
        assert!(!divides_factorial(5, 4));
        assert!(divides_factorial(1, 0));
    }

    #[test]
    fn abelianization_examples() {
        assert_eq!(abelianization_image(&sigma_dot(a(3))), AbelianImage::NonTrivial);
        assert_eq!(abelianization_image(&sigma_dot(a(2))), AbelianImage::Trivial);
        assert_eq!(abelianization_image(&VnElement::identity(a(5))), AbelianImage::Trivial);
    }

    #[test]
    fn involution_suite_examples() {
        for n in 2..=6 {
            for r in verify_involution_suite(n).unwrap() {
                assert!(r.passed(), "{r}");
            }
        }
        let n = a(2);
        let three = VnElement::from_table(
            n,
            vec![(w("1"), w("2.1")), (w("2.1"), w("2.2")), (w("2.2"), w("1"))],
        )
        .unwrap();
        let seq = AlphaSequence::new(n, vec![three, VnElement::identity(n)]).unwrap();
        assert!(verify_involutions_for(&seq).failed());
    }

    #[test]
    fn report_lines() {
        let r = verify_translation(&sigma_dot(a(2)), 1);
        assert_eq!(r.to_string(), "eq2 n=2 k=1 depth=1 PASS");
        let r = verify_translation(&sigma_dot(a(2)), 0);
        assert!(r.to_string().ends_with("SKIP(precondition)"));
    }
}

//! Named elements and generating data: level-1 permutation lifts, `tau`,
//! the translation `t`, cone embeddings, spinal elements `s_alpha`, Sidon
//! sets and padded alpha sequences.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::element::{Order, VnElement};
use crate::error::{Error, Result};
use crate::words::{Alphabet, Word};

/// A permutation of the letters `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(alphabet: Alphabet) -> Self {
        Permutation {
            images: alphabet.letters().collect(),
        }
    }

    /// `images[i - 1]` is the image of letter `i`.
    pub fn from_images(alphabet: Alphabet, images: Vec<u8>) -> Result<Self> {
        let mut seen = vec![false; alphabet.degree() as usize + 1];
        if images.len() != alphabet.degree() as usize {
            return Err(Error::BadPermutation(format!(
                "expected {} images, got {}",
                alphabet.degree(),
                images.len()
            )));
        }
        for &x in &images {
            if x == 0 || x > alphabet.degree() || std::mem::replace(&mut seen[x as usize], true) {
                return Err(Error::BadPermutation(format!("{images:?} is not a bijection")));
            }
        }
        Ok(Permutation { images })
    }

    pub fn from_cycles(alphabet: Alphabet, cycles: &[Vec<u8>]) -> Result<Self> {
        let mut images: Vec<u8> = alphabet.letters().collect();
        let mut used = BTreeSet::new();
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                if x == 0 || x > alphabet.degree() || !used.insert(x) {
                    return Err(Error::BadPermutation(format!(
                        "cycle {cycle:?}: letter {x} out of range or repeated"
                    )));
                }
                images[x as usize - 1] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    /// Cycle notation such as `(1 2)(3 4 5)`; commas are accepted as
    /// separators and `()` is the identity.
    pub fn parse(alphabet: Alphabet, text: &str) -> Result<Self> {
        let mut cycles = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .and_then(|r| r.split_once(')'))
                .ok_or_else(|| Error::BadPermutation(format!("malformed cycle notation `{text}`")))?;
            let cycle = body
                .0
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<u8>()
                        .map_err(|_| Error::BadPermutation(format!("bad letter `{s}`")))
                })
                .collect::<Result<Vec<u8>>>()?;
            cycles.push(cycle);
            rest = body.1.trim_start();
        }
        Permutation::from_cycles(alphabet, &cycles)
    }

    /// The transposition `(1 2)`.
    pub fn sigma(alphabet: Alphabet) -> Self {
        Permutation::from_cycles(alphabet, &[vec![1, 2]]).expect("n >= 2")
    }

    pub fn apply(&self, letter: u8) -> u8 {
        self.images[letter as usize - 1]
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.images.len() + 1];
        let mut any = false;
        for start in 1..=self.images.len() as u8 {
            if seen[start as usize] || self.apply(start) == start {
                continue;
            }
            any = true;
            f.write_str("(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x as usize] {
                seen[x as usize] = true;
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
                first = false;
                x = self.apply(x);
            }
            f.write_str(")")?;
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}

/// The lift `x . xi -> p(x) . xi`.
pub fn dot(p: &Permutation, alphabet: Alphabet) -> Result<VnElement> {
    if p.degree() != alphabet.degree() as usize {
        return Err(Error::BadPermutation(format!(
            "permutation of {} letters used in V_{}",
            p.degree(),
            alphabet
        )));
    }
    let table = alphabet
        .letters()
        .map(|x| (Word::from_letters(vec![x]), Word::from_letters(vec![p.apply(x)])))
        .collect();
    VnElement::from_table(alphabet, table)
}

/// `dot((1 2))`.
pub fn sigma_dot(alphabet: Alphabet) -> VnElement {
    dot(&Permutation::sigma(alphabet), alphabet).expect("degrees agree")
}

/// The involution exchanging `x_1 x_i` with `x_{i+1}` for `i < n`; the
/// cone `x_1 x_n` is fixed.
pub fn make_tau(alphabet: Alphabet) -> VnElement {
    let n = alphabet.degree();
    let mut table = Vec::with_capacity(2 * n as usize - 1);
    for i in 1..n {
        table.push((Word::from_letters(vec![1, i]), Word::from_letters(vec![i + 1])));
        table.push((Word::from_letters(vec![i + 1]), Word::from_letters(vec![1, i])));
    }
    table.push((Word::from_letters(vec![1, n]), Word::from_letters(vec![1, n])));
    VnElement::from_table(alphabet, table).expect("tau is a bijection")
}

/// `t = sigma_dot . tau`; maps `x_1 x_1 xi` to `x_1 xi`.
pub fn make_t(alphabet: Alphabet) -> VnElement {
    sigma_dot(alphabet)
        .compose(&make_tau(alphabet))
        .expect("same alphabet")
}

/// The element acting as `g` inside the cone `w` (`w . xi -> w . g(xi)`) and
/// as the identity elsewhere.
pub fn embed(w: &Word, g: &VnElement) -> Result<VnElement> {
    let alphabet = g.alphabet();
    w.check(alphabet)?;
    let mut table: Vec<(Word, Word)> = g.pairs().map(|(d, r)| (w.concat(d), w.concat(r))).collect();
    for k in 0..w.len() {
        let stem = w.prefix(k);
        for a in alphabet.letters().filter(|&a| a != w.letters()[k]) {
            let leaf = stem.child(a);
            table.push((leaf.clone(), leaf));
        }
    }
    table.sort_unstable();
    Ok(VnElement::reduce(alphabet, table))
}

/// `x_1^k`.
pub fn spine(k: usize) -> Word {
    Word::repeat(1, k)
}

/// `x_1^k x_2`.
pub fn spine_branch(k: usize) -> Word {
    spine(k).child(2)
}

/// `s_alpha = x_1^{l+1} sigma_dot . prod_k x_1^k x_2 alpha_k`, assembled from
/// embeddings. The factors have disjoint supports.
pub fn make_s_alpha(alphabet: Alphabet, alpha: &[VnElement]) -> Result<VnElement> {
    let ell = alpha.len();
    let mut s = embed(&spine(ell + 1), &sigma_dot(alphabet))?;
    for (k, a) in alpha.iter().enumerate() {
        alphabet.check(a.alphabet())?;
        s = s.compose(&embed(&spine_branch(k + 1), a)?)?;
    }
    Ok(s)
}

/// `s_alpha` written down case by case on the cones `x_1^k x_i`: identity on
/// `x_i` (`i != 1`) and on `x_1^k x_i` (`i >= 3`), `alpha_k` below
/// `x_1^k x_2`, and `sigma_dot` below `x_1^{l+1}`.
pub fn make_s_alpha_direct(alphabet: Alphabet, alpha: &[VnElement]) -> Result<VnElement> {
    let ell = alpha.len();
    let sigma = Permutation::sigma(alphabet);
    let mut table = Vec::new();
    for k in 0..=ell {
        let stem = spine(k);
        for i in 2..=alphabet.degree() {
            let cone = stem.child(i);
            if k >= 1 && i == 2 {
                let a = &alpha[k - 1];
                alphabet.check(a.alphabet())?;
                for (d, r) in a.pairs() {
                    table.push((cone.concat(d), cone.concat(r)));
                }
            } else {
                table.push((cone.clone(), cone));
            }
        }
    }
    let top = spine(ell + 1);
    for x in alphabet.letters() {
        table.push((top.child(x), top.child(sigma.apply(x))));
    }
    VnElement::from_table(alphabet, table)
}

/// Pairwise differences are all distinct.
pub fn is_sidon(members: &[u64]) -> bool {
    let mut diffs = BTreeSet::new();
    for (k, &i) in members.iter().enumerate() {
        for &j in &members[k + 1..] {
            if i == j || !diffs.insert(i.abs_diff(j)) {
                return false;
            }
        }
    }
    true
}

/// A set of positive integers with the unique difference property.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SidonSet {
    members: Vec<u64>,
}

impl SidonSet {
    pub fn new(members: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut members: Vec<u64> = members.into_iter().collect();
        members.sort_unstable();
        if members.first() == Some(&0) {
            return Err(Error::InvalidPlan("Sidon set members must be positive".into()));
        }
        if !is_sidon(&members) {
            return Err(Error::InvalidPlan(format!("{members:?} has a repeated difference")));
        }
        Ok(SidonSet { members })
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: u64) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    /// Largest pairwise difference; 0 when there are fewer than two members.
    pub fn max_difference(&self) -> u64 {
        match (self.members.first(), self.members.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0,
        }
    }

    pub fn shifted(&self, by: u64) -> SidonSet {
        SidonSet {
            members: self.members.iter().map(|m| m + by).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SidonStrategy {
    /// `{2, 4, .., 2^count}`.
    PowersOfTwo,
    /// The greedy (Mian-Chowla) sequence `1, 2, 4, 8, 13, 21, ..`.
    #[default]
    Greedy,
}

impl FromStr for SidonStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "powers-of-two" | "powers" => Ok(SidonStrategy::PowersOfTwo),
            "greedy" => Ok(SidonStrategy::Greedy),
            _ => Err(Error::InvalidPlan(format!("unknown Sidon strategy `{s}`"))),
        }
    }
}

pub fn sidon_generate(count: usize, strategy: SidonStrategy) -> SidonSet {
    let members = match strategy {
        SidonStrategy::PowersOfTwo => (1..=count as u32).map(|i| 1u64 << i).collect(),
        SidonStrategy::Greedy => {
            let mut members: Vec<u64> = Vec::with_capacity(count);
            let mut diffs = BTreeSet::new();
            let mut candidate = 1;
            while members.len() < count {
                let new: Vec<u64> = members.iter().map(|m| candidate - m).collect();
                let distinct = new.iter().collect::<BTreeSet<_>>().len() == new.len();
                if distinct && new.iter().all(|d| !diffs.contains(d)) {
                    diffs.extend(new);
                    members.push(candidate);
                }
                candidate += 1;
            }
            members
        }
    };
    SidonSet { members }
}

/// A finite sequence `(alpha_1, .., alpha_l)` over one alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaSequence {
    pub alphabet: Alphabet,
    pub entries: Vec<VnElement>,
}

impl AlphaSequence {
    pub fn new(alphabet: Alphabet, entries: Vec<VnElement>) -> Result<Self> {
        for e in &entries {
            alphabet.check(e.alphabet())?;
        }
        Ok(AlphaSequence { alphabet, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// 1-based access.
    pub fn get(&self, i: usize) -> &VnElement {
        &self.entries[i - 1]
    }

    /// Indices `i` with `alpha_i != id`.
    pub fn support(&self) -> Vec<u64> {
        (1..=self.len())
            .filter(|&i| !self.get(i).is_identity())
            .map(|i| i as u64)
            .collect()
    }

    pub fn s_alpha(&self) -> VnElement {
        make_s_alpha(self.alphabet, &self.entries).expect("alphabet checked on construction")
    }

    /// Reads `alpha <n> <ell>` followed by `<index> @ <element-file>` lines.
    /// Element paths are relative to the alpha file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        AlphaSequence::parse(&text, |p| {
            let full = base.join(p);
            VnElement::from_text(&read(&full)?)
        })
    }

    /// Parses the alpha file text, resolving element paths through `load`.
    pub fn parse(text: &str, mut load: impl FnMut(&str) -> Result<VnElement>) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let (hl, header) = lines
            .next()
            .ok_or_else(|| perr(1, "missing `alpha <n> <ell>` header".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (n, ell) = match fields.as_slice() {
            ["alpha", n, ell] => (
                n.parse::<usize>().map_err(|_| perr(hl, format!("bad degree `{n}`")))?,
                ell.parse::<usize>().map_err(|_| perr(hl, format!("bad length `{ell}`")))?,
            ),
            _ => return Err(perr(hl, format!("expected `alpha <n> <ell>`, found `{header}`"))),
        };
        let alphabet = Alphabet::new(n).map_err(|e| perr(hl, e.to_string()))?;
        let mut entries = vec![VnElement::identity(alphabet); ell];
        let mut seen = BTreeSet::new();
        for (ln, line) in lines {
            let (idx, file) = line
                .split_once('@')
                .ok_or_else(|| perr(ln, format!("expected `<index> @ <file>`, found `{line}`")))?;
            let idx: usize = idx
                .trim()
                .parse()
                .map_err(|_| perr(ln, format!("bad index `{}`", idx.trim())))?;
            if idx == 0 || idx > ell || !seen.insert(idx) {
                return Err(perr(ln, format!("index {idx} out of range 1..={ell} or repeated")));
            }
            let g = load(file.trim()).map_err(|e| perr(ln, e.to_string()))?;
            if g.alphabet() != alphabet {
                return Err(perr(ln, format!("element is in V_{}, expected V_{alphabet}", g.alphabet())));
            }
            entries[idx - 1] = g;
        }
        Ok(AlphaSequence { alphabet, entries })
    }

    /// Writes the alpha file and one `<stem>.<index>.vn` element file per
    /// nonidentity entry next to it.
    pub fn save(&self, path: &Path) -> Result<()> {
        let stem = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "alpha".into());
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut text = format!("alpha {} {}\n", self.alphabet, self.len());
        for i in self.support() {
            let name = format!("{stem}.{i}.vn");
            write(&dir.join(&name), &self.get(i as usize).to_text())?;
            text.push_str(&format!("{i} @ {name}\n"));
        }
        write(path, &text)
    }
}

pub(crate) fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

pub(crate) fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

/// An alpha sequence satisfying the checkable padding conditions: entries
/// of order at most 2, Sidon support `I`, `alpha_i = id` for `i <= N` and
/// for `i >= l - N`, where `N` is the largest difference in `I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaPlan {
    sequence: AlphaSequence,
    support: SidonSet,
}

impl AlphaPlan {
    pub fn new(sequence: AlphaSequence) -> Result<Self> {
        let violations = plan_violations(&sequence);
        if !violations.is_empty() {
            return Err(Error::InvalidPlan(violations.join("; ")));
        }
        let support = SidonSet::new(sequence.support())?;
        Ok(AlphaPlan { sequence, support })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.sequence.alphabet
    }

    pub fn sequence(&self) -> &AlphaSequence {
        &self.sequence
    }

    pub fn entries(&self) -> &[VnElement] {
        &self.sequence.entries
    }

    /// `l`.
    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn support(&self) -> &SidonSet {
        &self.support
    }

    /// `N`, the largest pairwise difference in the support.
    pub fn padding(&self) -> u64 {
        self.support.max_difference()
    }

    /// `i_0 = max(I)`, or 0 for an all-identity sequence.
    pub fn i0(&self) -> u64 {
        self.support.members().last().copied().unwrap_or(0)
    }

    pub fn s_alpha(&self) -> VnElement {
        self.sequence.s_alpha()
    }
}

/// Human-readable list of the padding conditions `sequence` breaks.
pub fn plan_violations(sequence: &AlphaSequence) -> Vec<String> {
    let mut out = Vec::new();
    for (k, e) in sequence.entries.iter().enumerate() {
        if !matches!(e.order_bounded(2), Order::Finite(_)) {
            out.push(format!("alpha_{} has order > 2", k + 1));
        }
    }
    let support = sequence.support();
    if !is_sidon(&support) {
        out.push(format!("support {support:?} is not a Sidon set"));
        return out;
    }
    let n = match (support.first(), support.last()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => 0,
    };
    let ell = sequence.len() as u64;
    if let Some(&lo) = support.first() {
        if lo <= n {
            out.push(format!("alpha_{lo} != id but N = {n}"));
        }
    }
    if let Some(&hi) = support.last() {
        if hi + n >= ell {
            out.push(format!("alpha_{hi} != id within the last N + 1 = {} positions of l = {ell}", n + 1));
        }
    }
    out
}

/// Places the involutions of `base` on a shifted Sidon set `I` with
/// `min(I) > N`, and pads to `l = max(I) + N + 1`.
pub fn plan_alpha(base: &[VnElement], strategy: SidonStrategy) -> Result<AlphaPlan> {
    let first = base
        .first()
        .ok_or_else(|| Error::InvalidPlan("base must be nonempty".into()))?;
    let alphabet = first.alphabet();
    for (k, b) in base.iter().enumerate() {
        alphabet.check(b.alphabet())?;
        if !matches!(b.order_bounded(2), Order::Finite(_)) {
            return Err(Error::NotInvolution(format!("base element {k}")));
        }
    }
    let mut set = sidon_generate(base.len(), strategy);
    let pad = set.max_difference();
    let lo = set.members()[0];
    if lo <= pad {
        set = set.shifted(pad + 1 - lo);
    }
    let ell = (*set.members().last().expect("nonempty") + pad + 1) as usize;
    let mut entries = vec![VnElement::identity(alphabet); ell];
    for (&i, b) in set.members().iter().zip(base) {
        entries[i as usize - 1] = b.clone();
    }
    AlphaPlan::new(AlphaSequence { alphabet, entries })
}

/// `x_1 sigma_dot . x_2 sigma_dot`.
pub fn base_alpha0(alphabet: Alphabet) -> VnElement {
    let s = sigma_dot(alphabet);
    let left = embed(&Word::from_letters(vec![1]), &s).expect("valid word");
    let right = embed(&Word::from_letters(vec![2]), &s).expect("valid word");
    left.compose(&right).expect("same alphabet")
}

/// All products of at most `len` factors from `{sigma_dot, tau}`, shortest
/// first, deduplicated.
pub fn default_conjugators(alphabet: Alphabet, len: usize) -> Vec<VnElement> {
    let gens = [sigma_dot(alphabet), make_tau(alphabet)];
    let mut out = vec![VnElement::identity(alphabet)];
    let mut frontier = out.clone();
    for _ in 0..len {
        let mut next = Vec::new();
        for x in &frontier {
            for g in &gens {
                let y = x.compose(g).expect("same alphabet");
                if !out.contains(&y) {
                    out.push(y.clone());
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    out
}

/// Builds `{alpha0^g : g in A} u {alpha0^(gamma g) : g in A}` where
/// `alpha0 = x_1 sigma_dot . x_2 sigma_dot` and `gamma` is the first of
/// `gamma_candidates` for which `[alpha0, alpha0^gamma] != id`.
pub fn base_involutions_with(
    alphabet: Alphabet,
    gamma_candidates: &[VnElement],
    conjugators: &[VnElement],
) -> Result<Vec<VnElement>> {
    let alpha0 = base_alpha0(alphabet);
    let mut gamma = None;
    for c in gamma_candidates {
        alphabet.check(c.alphabet())?;
        if !alpha0.commutator(&alpha0.conjugate(c)?)?.is_identity() {
            gamma = Some(c);
            break;
        }
    }
    let gamma = gamma.ok_or(Error::ConstructionFailed)?;
    let mut out: Vec<VnElement> = Vec::new();
    for g in conjugators {
        alphabet.check(g.alphabet())?;
        out.push(alpha0.conjugate(g)?);
    }
    for g in conjugators {
        out.push(alpha0.conjugate(&gamma.compose(g)?)?);
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|x| seen.insert(x.clone()));
    Ok(out)
}

/// [`base_involutions_with`] using `gamma` from the products of at most two
/// factors in `{sigma_dot, tau}`.
pub fn base_involutions(alphabet: Alphabet, conjugators: &[VnElement]) -> Result<Vec<VnElement>> {
    base_involutions_with(alphabet, &default_conjugators(alphabet, 2), conjugators)
}

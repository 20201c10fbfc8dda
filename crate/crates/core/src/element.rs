//! Elements of `V_n` as reduced prefix-replacement tables.
//!
//! An element is stored as a sorted list of domain words (a partition set)
//! together with the image of each one. The element maps `d . xi` to
//! `f(d) . xi`. The table is kept fully reduced: no `n` sibling leaves
//! `u.1 .. u.n` map to `v.1 .. v.n` for a common `v`. Reduced tables are
//! unique, so equality of elements is equality of tables.
//!
//! Products follow the convention that the right factor acts first:
//! `g.compose(&h)` is `x -> g(h(x))`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::words::{
    extensions_in_sorted, prefix_in_sorted, sorted_is_partition, Alphabet, PartitionSet,
    RationalPoint, Word,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VnElement {
    alphabet: Alphabet,
    domain: Vec<Word>,
    images: Vec<Word>,
}

/// Result of [`VnElement::order_bounded`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Finite(u64),
    ExceedsBound(u64),
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "Finite({k})"),
            Order::ExceedsBound(b) => write!(f, "ExceedsBound({b})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_odd(odd: bool) -> Sign {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_odd(self != rhs)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeStatus {
    Fixed,
    Moved,
    Boundary(RationalPoint),
}

/// Fixed-point classification of the cones of the reduced domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportReport {
    pub cones: Vec<(Word, ConeStatus)>,
}

impl SupportReport {
    /// True when every cone outside `w` is pointwise fixed.
    pub fn supported_in(&self, w: &Word) -> bool {
        self.cones
            .iter()
            .all(|(c, s)| *s == ConeStatus::Fixed || w.is_prefix_of(c))
    }

    pub fn fixed_points(&self) -> impl Iterator<Item = &RationalPoint> {
        self.cones.iter().filter_map(|(_, s)| match s {
            ConeStatus::Boundary(p) => Some(p),
            _ => None,
        })
    }
}

/// A refinement of an element's table on which the lexicographic parity
/// disagrees with the parity of the reduced table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeOutcome {
    WellDefined,
    Inconsistent {
        base: Sign,
        refined: Vec<(Word, Word)>,
        refined_parity: Sign,
    },
}

impl VnElement {
    pub fn identity(alphabet: Alphabet) -> Self {
        VnElement {
            alphabet,
            domain: vec![Word::empty()],
            images: vec![Word::empty()],
        }
    }

    /// Builds an element from a domain partition set and the image of each
    /// domain word (in the partition set's sorted order).
    pub fn make(domain: &PartitionSet, images: Vec<Word>) -> Result<Self> {
        if images.len() != domain.len() {
            return Err(Error::Arity {
                domain: domain.len(),
                images: images.len(),
            });
        }
        let pairs = domain.words().iter().cloned().zip(images).collect();
        VnElement::from_table(domain.alphabet(), pairs)
    }

    /// Validates an arbitrary (possibly unreduced, unsorted) table and
    /// reduces it.
    pub fn from_table(alphabet: Alphabet, pairs: Vec<(Word, Word)>) -> Result<Self> {
        for (d, r) in &pairs {
            d.check(alphabet)?;
            r.check(alphabet)?;
        }
        let mut pairs = pairs;
        pairs.sort_unstable();
        let domain: Vec<Word> = pairs.iter().map(|p| p.0.clone()).collect();
        if !sorted_is_partition(alphabet, &domain) {
            return Err(Error::NotAPartition);
        }
        let mut images: Vec<Word> = pairs.iter().map(|p| p.1.clone()).collect();
        images.sort_unstable();
        if !sorted_is_partition(alphabet, &images) {
            return Err(Error::NotABijection);
        }
        Ok(VnElement::reduce(alphabet, pairs))
    }

    /// Merges reducible caret pairs until none remain. `pairs` must be a
    /// valid bijection table sorted by domain word.
    pub(crate) fn reduce(alphabet: Alphabet, pairs: Vec<(Word, Word)>) -> Self {
        debug_assert!(pairs.windows(2).all(|p| p[0].0 < p[1].0));
        let n = alphabet.degree() as usize;
        let mut stack: Vec<(Word, Word)> = Vec::with_capacity(pairs.len());
        for pair in pairs {
            stack.push(pair);
            // Siblings are contiguous in sorted order, so a mergeable group
            // is always the top n entries once its last member arrives.
            while stack.len() >= n && mergeable(&stack[stack.len() - n..]) {
                let group = stack.split_off(stack.len() - n);
                let (d, r) = &group[0];
                stack.push((d.prefix(d.len() - 1), r.prefix(r.len() - 1)));
            }
        }
        let (domain, images) = stack.into_iter().unzip();
        VnElement {
            alphabet,
            domain,
            images,
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn domain(&self) -> &[Word] {
        &self.domain
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Word, &Word)> {
        self.domain.iter().zip(&self.images)
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.domain.len() == 1 && self.domain[0].is_empty() && self.images[0].is_empty()
    }

    /// Longest word on either side of the reduced table.
    pub fn depth(&self) -> usize {
        self.domain
            .iter()
            .chain(&self.images)
            .map(Word::len)
            .max()
            .unwrap_or(0)
    }

    /// `self . other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &VnElement) -> Result<VnElement> {
        self.alphabet.check(other.alphabet)?;
        let mut out = Vec::with_capacity(self.len().max(other.len()));
        for (d, r) in other.pairs() {
            match prefix_in_sorted(&self.domain, r) {
                Some(i) => {
                    let tail = r.suffix_from(self.domain[i].len());
                    out.push((d.clone(), self.images[i].concat(&tail)));
                }
                None => {
                    let start = self.domain.partition_point(|x| x < r);
                    let run = extensions_in_sorted(&self.domain[start..], r);
                    for (k, gd) in run.iter().enumerate() {
                        let tail = gd.suffix_from(r.len());
                        out.push((d.concat(&tail), self.images[start + k].clone()));
                    }
                }
            }
        }
        Ok(VnElement::reduce(self.alphabet, out))
    }

    pub fn inverse(&self) -> VnElement {
        let mut pairs: Vec<(Word, Word)> = self
            .images
            .iter()
            .cloned()
            .zip(self.domain.iter().cloned())
            .collect();
        pairs.sort_unstable();
        let (domain, images) = pairs.into_iter().unzip();
        VnElement {
            alphabet: self.alphabet,
            domain,
            images,
        }
    }

    /// `self^h = h^-1 . self . h`.
    pub fn conjugate(&self, h: &VnElement) -> Result<VnElement> {
        h.inverse().compose(&self.compose(h)?)
    }

    /// `[self, h] = self . h . self^-1 . h^-1`.
    pub fn commutator(&self, h: &VnElement) -> Result<VnElement> {
        self.compose(h)?
            .compose(&self.inverse())?
            .compose(&h.inverse())
    }

    pub fn power(&self, k: i64) -> VnElement {
        let mut base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = VnElement::identity(self.alphabet);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base).expect("same alphabet");
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base).expect("same alphabet");
            }
        }
        acc
    }

    /// Rewrites the domain prefix of `w`. Fails if `w` is a proper prefix of
    /// some domain word.
    pub fn apply_word(&self, w: &Word) -> Result<Word> {
        w.check(self.alphabet)?;
        match prefix_in_sorted(&self.domain, w) {
            Some(i) => Ok(self.images[i].concat(&w.suffix_from(self.domain[i].len()))),
            None => Err(Error::NeedsLongerWord(w.clone())),
        }
    }

    pub fn apply_point(&self, p: &RationalPoint) -> RationalPoint {
        let probe = p.prefix(self.domain.iter().map(Word::len).max().unwrap_or(0));
        let i = prefix_in_sorted(&self.domain, &probe).expect("domain is a complete antichain");
        p.drop_prefix(self.domain[i].len()).prepend(&self.images[i])
    }

    /// Least `k <= bound` with `self^k = id`.
    pub fn order_bounded(&self, bound: u64) -> Order {
        let mut acc = self.clone();
        for k in 1..=bound {
            if acc.is_identity() {
                return Order::Finite(k);
            }
            if k < bound {
                acc = acc.compose(self).expect("same alphabet");
            }
        }
        Order::ExceedsBound(bound)
    }

    pub fn support(&self) -> SupportReport {
        let cones = self
            .pairs()
            .map(|(d, r)| {
                let status = if d == r {
                    ConeStatus::Fixed
                } else if d.is_prefix_of(r) {
                    ConeStatus::Boundary(boundary_point(d, r))
                } else if r.is_prefix_of(d) {
                    ConeStatus::Boundary(boundary_point(r, d))
                } else {
                    ConeStatus::Moved
                };
                (d.clone(), status)
            })
            .collect();
        SupportReport { cones }
    }

    /// Every cone is mapped onto a cone of the same length.
    pub fn is_volume_preserving(&self) -> bool {
        self.pairs().all(|(d, r)| d.len() == r.len())
    }

    /// Parity of the permutation matching the lexicographically listed domain
    /// and image antichains. Only defined for odd `n`.
    pub fn sign(&self) -> Result<Sign> {
        if !self.alphabet.is_odd() {
            return Err(Error::SignUndefined(self.alphabet.degree()));
        }
        Ok(self.table_parity())
    }

    /// The lexicographic parity of the reduced table, for any `n`.
    pub fn table_parity(&self) -> Sign {
        images_parity(&self.images)
    }

    /// The table expanded onto `partition`, which must refine the domain.
    pub fn refined_table(&self, partition: &PartitionSet) -> Result<Vec<(Word, Word)>> {
        self.alphabet.check(partition.alphabet())?;
        partition
            .words()
            .iter()
            .map(|w| self.apply_word(w).map(|img| (w.clone(), img)))
            .collect()
    }

    /// Every domain word expanded to length `level`.
    pub fn expanded_table(&self, level: usize) -> Result<Vec<(Word, Word)>> {
        let domain = PartitionSet::new(self.alphabet, self.domain.iter().cloned())?;
        self.refined_table(&domain.expand_to_level(level)?)
    }

    /// Recomputes the lexicographic parity on refinements of the table: all
    /// single-caret expansions first, then `trials` random multi-caret
    /// refinements drawn from `seed`.
    pub fn sign_refinement_probe(&self, trials: usize, seed: u64) -> ProbeOutcome {
        let base = self.table_parity();
        let table: Vec<(Word, Word)> = self.pairs().map(|(d, r)| (d.clone(), r.clone())).collect();
        let check = |t: Vec<(Word, Word)>| {
            let images: Vec<Word> = t.iter().map(|p| p.1.clone()).collect();
            let parity = images_parity(&images);
            (parity != base).then_some(ProbeOutcome::Inconsistent {
                base,
                refined: t,
                refined_parity: parity,
            })
        };
        for i in 0..table.len() {
            if let Some(out) = check(split_leaf(&table, i, self.alphabet)) {
                return out;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let mut t = table.clone();
            for _ in 0..rng.gen_range(1..=4) {
                let i = rng.gen_range(0..t.len());
                t = split_leaf(&t, i, self.alphabet);
            }
            if let Some(out) = check(t) {
                return out;
            }
        }
        ProbeOutcome::WellDefined
    }

    /// `vn <n>` then one `<domain> -> <image>` line per reduced domain word.
    pub fn to_text(&self) -> String {
        let mut s = format!("vn {}\n", self.alphabet);
        for (d, r) in self.pairs() {
            s.push_str(&format!("{d} -> {r}\n"));
        }
        s
    }

    /// Parses the text format; the table need not be reduced or sorted.
    /// Blank lines and `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<VnElement> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing `vn <n>` header".into(),
        })?;
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let degree = header
            .strip_prefix("vn")
            .and_then(|d| d.trim().parse::<usize>().ok())
            .ok_or_else(|| perr(hline, format!("expected `vn <n>`, found `{header}`")))?;
        let alphabet = Alphabet::new(degree).map_err(|e| perr(hline, e.to_string()))?;
        let mut pairs = Vec::new();
        for (ln, line) in lines {
            let (d, r) = line
                .split_once("->")
                .ok_or_else(|| perr(ln, format!("expected `<word> -> <word>`, found `{line}`")))?;
            let d = Word::parse_in(d, alphabet).map_err(|e| perr(ln, e.to_string()))?;
            let r = Word::parse_in(r, alphabet).map_err(|e| perr(ln, e.to_string()))?;
            pairs.push((d, r));
        }
        VnElement::from_table(alphabet, pairs)
    }
}

impl fmt::Display for VnElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn mergeable(group: &[(Word, Word)]) -> bool {
    let (d0, r0) = &group[0];
    if d0.is_empty() || r0.is_empty() {
        return false;
    }
    let (dp, rp) = (d0.len() - 1, r0.len() - 1);
    group.iter().enumerate().all(|(k, (d, r))| {
        let letter = k as u8 + 1;
        d.len() == dp + 1
            && r.len() == rp + 1
            && d.letters()[dp] == letter
            && r.letters()[rp] == letter
            && d.letters()[..dp] == d0.letters()[..dp]
            && r.letters()[..rp] == r0.letters()[..rp]
    })
}

/// `short . u^inf` where `long = short . u`.
fn boundary_point(short: &Word, long: &Word) -> RationalPoint {
    RationalPoint::new(short.clone(), long.suffix_from(short.len())).expect("u is nonempty")
}

fn split_leaf(table: &[(Word, Word)], i: usize, alphabet: Alphabet) -> Vec<(Word, Word)> {
    let mut out = Vec::with_capacity(table.len() + alphabet.degree() as usize);
    out.extend_from_slice(&table[..i]);
    let (d, r) = &table[i];
    out.extend(alphabet.letters().map(|a| (d.child(a), r.child(a))));
    out.extend_from_slice(&table[i + 1..]);
    out
}

/// Parity of the permutation sending position `i` (domain order) to the
/// lexicographic rank of `images[i]`.
pub(crate) fn images_parity(images: &[Word]) -> Sign {
    let mut order: Vec<usize> = (0..images.len()).collect();
    order.sort_by(|&a, &b| images[a].cmp(&images[b]));
    let mut rank = vec![0; images.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    Sign::from_odd(permutation_is_odd(&rank))
}

pub(crate) fn permutation_is_odd(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
        }
    }
    (perm.len() - cycles) % 2 == 1
}

/// A random complete antichain built from `carets` random leaf splits, never
/// splitting a leaf of length `max_depth` or more.
pub fn random_partition<R: Rng>(
    alphabet: Alphabet,
    carets: usize,
    max_depth: usize,
    rng: &mut R,
) -> PartitionSet {
    let mut leaves = vec![Word::empty()];
    for _ in 0..carets {
        let open: Vec<usize> = (0..leaves.len())
            .filter(|&i| leaves[i].len() < max_depth)
            .collect();
        let Some(&i) = open.choose(rng) else { break };
        let w = leaves.swap_remove(i);
        leaves.extend(alphabet.letters().map(|a| w.child(a)));
    }
    PartitionSet::new(alphabet, leaves).expect("splitting preserves completeness")
}

/// A random element whose unreduced table has words of length at most
/// `max_depth`.
pub fn random_element<R: Rng>(
    alphabet: Alphabet,
    max_carets: usize,
    max_depth: usize,
    rng: &mut R,
) -> VnElement {
    loop {
        let carets = rng.gen_range(0..=max_carets);
        let domain = random_partition(alphabet, carets, max_depth, rng);
        let range = random_partition(alphabet, carets, max_depth, rng);
        // Depth caps can stop one side early; retry until the sizes agree.
        if domain.len() != range.len() {
            continue;
        }
        let mut images = range.words().to_vec();
        images.shuffle(rng);
        return VnElement::make(&domain, images).expect("sizes match");
    }
}

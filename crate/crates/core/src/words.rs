//! Alphabets, finite words, eventually periodic points and complete prefix
//! antichains (n-adic partition sets) of the Cantor space `X_n^N`.
//!
//! Letters are 1-based, so the letter `i` stands for `x_i`. In text a word
//! is written as dot-separated integers (`1.1.2`), and the empty word as
//! `eps`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The letter set `{1, .., n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet(u8);

impl Alphabet {
    pub fn new(degree: usize) -> Result<Self> {
        if !(2..=255).contains(&degree) {
            return Err(Error::BadDegree(degree));
        }
        Ok(Alphabet(degree as u8))
    }

    #[inline]
    pub fn degree(self) -> u8 {
        self.0
    }

    pub fn is_odd(self) -> bool {
        self.0 % 2 == 1
    }

    pub fn letters(self) -> impl Iterator<Item = u8> {
        1..=self.0
    }

    pub fn check(self, other: Alphabet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch {
                left: self.0,
                right: other.0,
            })
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite word over the alphabet; names the cone of all infinite words
/// that start with it.
///
/// The derived ordering is the word-lexicographic order induced by
/// `x_1 < .. < x_n`, with a proper prefix sorting before its extensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word without checking letters against an alphabet.
    pub fn from_letters(letters: impl Into<Vec<u8>>) -> Self {
        Word(letters.into())
    }

    /// `letter^count`, e.g. `x_1^k`.
    pub fn repeat(letter: u8, count: usize) -> Self {
        Word(vec![letter; count])
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<u8> {
        self.0.first().copied()
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// True when one of the two words is a prefix of the other, i.e. the
    /// cones intersect.
    pub fn is_comparable(&self, other: &Word) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn child(&self, letter: u8) -> Word {
        let mut letters = Vec::with_capacity(self.len() + 1);
        letters.extend_from_slice(&self.0);
        letters.push(letter);
        Word(letters)
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    /// The letters after the first `len`.
    pub fn suffix_from(&self, len: usize) -> Word {
        Word(self.0[len..].to_vec())
    }

    pub fn check(&self, alphabet: Alphabet) -> Result<()> {
        match self.0.iter().find(|&&l| l == 0 || l > alphabet.degree()) {
            Some(&l) => Err(Error::LetterOutOfRange {
                letter: l as usize,
                degree: alphabet.degree(),
            }),
            None => Ok(()),
        }
    }

    /// Parses the dot syntax and checks letters against `alphabet`.
    pub fn parse_in(text: &str, alphabet: Alphabet) -> Result<Word> {
        let w: Word = text.parse()?;
        w.check(alphabet)?;
        Ok(w)
    }

    /// All words of length `len`, in lexicographic order.
    pub fn all_of_length(alphabet: Alphabet, len: usize) -> Vec<Word> {
        let mut level = vec![Word::empty()];
        for _ in 0..len {
            level = level
                .iter()
                .flat_map(|w| alphabet.letters().map(move |a| w.child(a)))
                .collect();
        }
        level
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let s = s.trim();
        if s == "eps" {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        for part in s.split('.') {
            let l: usize = part
                .parse()
                .map_err(|_| Error::MalformedWord(s.to_string()))?;
            if l == 0 || l > 255 {
                return Err(Error::LetterOutOfRange {
                    letter: l,
                    degree: 255,
                });
            }
            letters.push(l as u8);
        }
        Ok(Word(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("eps");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// An eventually periodic infinite word `pre . per^inf`, kept in normal
/// form: the period is primitive and the preperiod is as short as possible.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint {
    pre: Word,
    per: Word,
}

impl RationalPoint {
    pub fn new(pre: Word, per: Word) -> Result<Self> {
        if per.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        let mut per = primitive_root(per.0);
        let mut pre = pre.0;
        // Absorb trailing preperiod letters into a rotation of the period.
        while let (Some(&a), Some(&b)) = (pre.last(), per.last()) {
            if a != b {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        Ok(RationalPoint {
            pre: Word(pre),
            per: Word(per),
        })
    }

    pub fn preperiod(&self) -> &Word {
        &self.pre
    }

    pub fn period(&self) -> &Word {
        &self.per
    }

    pub fn letter(&self, index: usize) -> u8 {
        if index < self.pre.len() {
            self.pre.0[index]
        } else {
            self.per.0[(index - self.pre.len()) % self.per.len()]
        }
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word((0..len).map(|i| self.letter(i)).collect())
    }

    /// The point with its first `count` letters removed.
    pub fn drop_prefix(&self, count: usize) -> RationalPoint {
        if count <= self.pre.len() {
            return RationalPoint {
                pre: self.pre.suffix_from(count),
                per: self.per.clone(),
            };
        }
        let mut per = self.per.0.clone();
        let shift = (count - self.pre.len()) % per.len();
        per.rotate_left(shift);
        // A rotation of a primitive word is primitive and there is no
        // preperiod left, so this is already normal.
        RationalPoint {
            pre: Word::empty(),
            per: Word(per),
        }
    }

    /// `w . self`, normalized.
    pub fn prepend(&self, w: &Word) -> RationalPoint {
        RationalPoint::new(w.concat(&self.pre), self.per.clone())
            .expect("period is nonempty")
    }

    pub fn check(&self, alphabet: Alphabet) -> Result<()> {
        self.pre.check(alphabet)?;
        self.per.check(alphabet)
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.pre, self.per)
    }
}

impl FromStr for RationalPoint {
    type Err = Error;

    /// Parses `pre:per`, e.g. `eps:1` or `2:1.2`.
    fn from_str(s: &str) -> Result<Self> {
        let (pre, per) = s
            .split_once(':')
            .ok_or_else(|| Error::MalformedWord(s.to_string()))?;
        RationalPoint::new(pre.parse()?, per.parse()?)
    }
}

/// Shortest `d` with `letters == letters[..d]^(len/d)`.
fn primitive_root(letters: Vec<u8>) -> Vec<u8> {
    let len = letters.len();
    for d in 1..len {
        if len.is_multiple_of(d) && (d..len).all(|i| letters[i] == letters[i - d]) {
            return letters[..d].to_vec();
        }
    }
    letters
}

/// Normalizes `pre . per^inf`.
pub fn point_normalize(pre: Word, per: Word) -> Result<RationalPoint> {
    RationalPoint::new(pre, per)
}

/// A complete prefix-free antichain of words; the cones of its words
/// partition the Cantor space. Words are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionSet {
    alphabet: Alphabet,
    words: Vec<Word>,
}

impl PartitionSet {
    /// The trivial partition `{eps}`.
    pub fn root(alphabet: Alphabet) -> Self {
        PartitionSet {
            alphabet,
            words: vec![Word::empty()],
        }
    }

    /// `X_n^level`.
    pub fn level(alphabet: Alphabet, level: usize) -> Self {
        PartitionSet {
            alphabet,
            words: Word::all_of_length(alphabet, level),
        }
    }

    pub fn new(alphabet: Alphabet, words: impl IntoIterator<Item = Word>) -> Result<Self> {
        let mut words: Vec<Word> = words.into_iter().collect();
        for w in &words {
            w.check(alphabet)?;
        }
        words.sort_unstable();
        if !sorted_is_partition(alphabet, &words) {
            return Err(Error::NotAPartition);
        }
        Ok(PartitionSet { alphabet, words })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.words.iter().map(Word::len).max().unwrap_or(0)
    }

    /// The unique member that is a prefix of `w`, if any.
    pub fn prefix_of(&self, w: &Word) -> Option<&Word> {
        prefix_in_sorted(&self.words, w).map(|i| &self.words[i])
    }

    /// Coarsest common refinement.
    pub fn refine(&self, other: &PartitionSet) -> Result<PartitionSet> {
        self.alphabet.check(other.alphabet)?;
        let mut out = Vec::new();
        for a in &self.words {
            if other.prefix_of(a).is_some() {
                out.push(a.clone());
            } else {
                out.extend(extensions_in_sorted(&other.words, a).iter().cloned());
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(PartitionSet {
            alphabet: self.alphabet,
            words: out,
        })
    }

    /// Expands every word to length exactly `level`.
    pub fn expand_to_level(&self, level: usize) -> Result<PartitionSet> {
        let longest = self.max_len();
        if level < longest {
            return Err(Error::LevelTooSmall { level, longest });
        }
        let words = self
            .words
            .iter()
            .flat_map(|w| {
                Word::all_of_length(self.alphabet, level - w.len())
                    .into_iter()
                    .map(move |s| w.concat(&s))
            })
            .collect();
        Ok(PartitionSet {
            alphabet: self.alphabet,
            words,
        })
    }

    /// One word per line.
    pub fn to_text(&self) -> String {
        self.words.iter().map(|w| format!("{w}\n")).collect()
    }

    pub fn from_text(alphabet: Alphabet, text: &str) -> Result<PartitionSet> {
        let mut words = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            words.push(Word::parse_in(line, alphabet).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?);
        }
        PartitionSet::new(alphabet, words)
    }
}

/// True iff `words` (any order, letters in range) is a complete prefix-free
/// antichain.
pub fn is_partition_set(words: &[Word], alphabet: Alphabet) -> Result<bool> {
    for w in words {
        w.check(alphabet)?;
    }
    let mut sorted = words.to_vec();
    sorted.sort_unstable();
    Ok(sorted_is_partition(alphabet, &sorted))
}

pub(crate) fn sorted_is_partition(alphabet: Alphabet, words: &[Word]) -> bool {
    // In sorted order a prefix is immediately followed by its extensions, so
    // adjacent pairs suffice. Duplicates count as a prefix violation.
    let prefix_free = words.windows(2).all(|p| !p[0].is_prefix_of(&p[1]));
    prefix_free && covers_cone(alphabet, words, 0)
}

/// Every word in `words` shares the same prefix of length `depth`; checks
/// that they tile that cone, i.e. every internal node has all n children.
fn covers_cone(alphabet: Alphabet, words: &[Word], depth: usize) -> bool {
    match words {
        [] => false,
        [w] if w.len() == depth => true,
        _ => {
            if words.iter().any(|w| w.len() <= depth) {
                return false;
            }
            let mut rest = words;
            for a in alphabet.letters() {
                let split = rest
                    .iter()
                    .position(|w| w.0[depth] != a)
                    .unwrap_or(rest.len());
                if !covers_cone(alphabet, &rest[..split], depth + 1) {
                    return false;
                }
                rest = &rest[split..];
            }
            rest.is_empty()
        }
    }
}

/// Index of the member of the sorted prefix-free list that is a prefix of
/// `w`. Such a member is the largest one `<= w`.
pub(crate) fn prefix_in_sorted(sorted: &[Word], w: &Word) -> Option<usize> {
    let idx = sorted.partition_point(|d| d <= w);
    (idx > 0 && sorted[idx - 1].is_prefix_of(w)).then(|| idx - 1)
}

/// The contiguous run of members of a sorted list that extend `w`.
pub(crate) fn extensions_in_sorted<'a>(sorted: &'a [Word], w: &Word) -> &'a [Word] {
    let start = sorted.partition_point(|d| d < w);
    let len = sorted[start..]
        .iter()
        .take_while(|d| w.is_prefix_of(d))
        .count();
    &sorted[start..start + len]
}

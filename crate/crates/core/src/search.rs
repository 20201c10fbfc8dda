//! Breadth-first exploration of the subgroup generated by a finite set of
//! named elements, deduplicated by reduced table.
//!
//! Every element is recorded with its shortest word over the generators;
//! ties go to the lexicographically least word, letters ordered by
//! generator name with a generator before its inverse. The frontier of
//! each level is multiplied out in parallel and merged sequentially, so the
//! result does not depend on the thread count.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use crate::constructions::{read, write};
use crate::element::VnElement;
use crate::error::{Error, Result};
use crate::words::Alphabet;

pub const DEFAULT_CAP: usize = 1_000_000;

/// One letter of a word over the generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

/// Named generators, kept in name order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    alphabet: Alphabet,
    names: Vec<String>,
    elements: Vec<VnElement>,
    /// Letters in search order, with the element each one multiplies by.
    letters: Vec<(Letter, VnElement)>,
}

impl GeneratorSet {
    pub fn new(named: impl IntoIterator<Item = (String, VnElement)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (name, g) in named {
            if name.is_empty()
                || name == "eps"
                || name.contains(|c: char| c.is_whitespace() || c == '^')
            {
                return Err(Error::BadGenerators(format!("invalid generator name `{name}`")));
            }
            if map.insert(name.clone(), g).is_some() {
                return Err(Error::BadGenerators(format!("duplicate generator name `{name}`")));
            }
        }
        let Some(alphabet) = map.values().next().map(VnElement::alphabet) else {
            return Err(Error::BadGenerators("no generators".into()));
        };
        let mut letters = Vec::new();
        for (k, g) in map.values().enumerate() {
            alphabet.check(g.alphabet())?;
            letters.push((Letter { generator: k, inverse: false }, g.clone()));
            let inv = g.inverse();
            if inv != *g {
                letters.push((Letter { generator: k, inverse: true }, inv));
            }
        }
        let (names, elements) = map.into_iter().unzip();
        Ok(GeneratorSet {
            alphabet,
            names,
            elements,
            letters,
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn elements(&self) -> &[VnElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&VnElement> {
        self.names.iter().position(|n| n == name).map(|k| &self.elements[k])
    }

    /// The product of the letters, left to right (the last letter acts
    /// first).
    pub fn evaluate(&self, word: &[Letter]) -> VnElement {
        let mut acc = VnElement::identity(self.alphabet);
        for l in word {
            let g = &self.elements[l.generator];
            let g = if l.inverse { g.inverse() } else { g.clone() };
            acc = acc.compose(&g).expect("one alphabet");
        }
        acc
    }

    pub fn format_word(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "eps".into();
        }
        word.iter()
            .map(|l| {
                let name = &self.names[l.generator];
                if l.inverse {
                    format!("{name}^-1")
                } else {
                    name.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_word(&self, text: &str) -> Result<Vec<Letter>> {
        let text = text.trim();
        if text == "eps" {
            return Ok(Vec::new());
        }
        text.split_whitespace()
            .map(|tok| {
                let (name, inverse) = match tok.strip_suffix("^-1") {
                    Some(n) => (n, true),
                    None => (tok, false),
                };
                self.names
                    .iter()
                    .position(|n| n == name)
                    .map(|generator| Letter { generator, inverse })
                    .ok_or_else(|| Error::BadGenerators(format!("unknown generator `{name}`")))
            })
            .collect()
    }

    /// Reads `gen <name> <element-file>` lines; paths are relative to the
    /// manifest.
    pub fn load_manifest(path: &Path) -> Result<Self> {
        let text = read(path)?;
        let dir = path.parent().unwrap_or(Path::new(""));
        let mut named = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, file) = parse_gen_line(line).ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected `gen <name> <element-file>`, found `{line}`"),
            })?;
            let g = VnElement::from_text(&read(&dir.join(file))?).map_err(|e| Error::Parse {
                line: i + 1,
                msg: format!("{file}: {e}"),
            })?;
            named.push((name.to_string(), g));
        }
        GeneratorSet::new(named)
    }

    /// Writes one element file per generator next to `path` and returns the
    /// manifest lines.
    fn write_elements(&self, path: &Path) -> Result<String> {
        let stem = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "gens".into());
        let dir = path.parent().unwrap_or(Path::new(""));
        let mut lines = String::new();
        for (name, g) in self.names.iter().zip(&self.elements) {
            let file = format!("{stem}.{name}.vn");
            write(&dir.join(&file), &g.to_text())?;
            lines.push_str(&format!("gen {name} {file}\n"));
        }
        Ok(lines)
    }

    pub fn save_manifest(&self, path: &Path) -> Result<()> {
        let lines = self.write_elements(path)?;
        write(path, &lines)
    }
}

fn parse_gen_line(line: &str) -> Option<(&str, &str)> {
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next(), parts.next()) {
        (Some("gen"), Some(name), Some(file), None) => Some((name, file)),
        _ => None,
    }
}

/// All elements of word length at most `radius`, each with its shortest
/// word.
#[derive(Debug, Clone)]
pub struct Ball {
    gens: GeneratorSet,
    radius: usize,
    entries: Vec<(VnElement, Vec<Letter>)>,
    index: HashMap<VnElement, usize>,
    /// `sizes[r]` = number of elements of length at most `r`.
    sizes: Vec<usize>,
    truncated: bool,
}

impl PartialEq for Ball {
    fn eq(&self, other: &Ball) -> bool {
        self.gens == other.gens
            && self.radius == other.radius
            && self.entries == other.entries
            && self.sizes == other.sizes
            && self.truncated == other.truncated
    }
}

impl Ball {
    fn start(gens: &GeneratorSet) -> Ball {
        let id = VnElement::identity(gens.alphabet);
        Ball {
            gens: gens.clone(),
            radius: 0,
            entries: vec![(id.clone(), Vec::new())],
            index: HashMap::from([(id, 0)]),
            sizes: vec![1],
            truncated: false,
        }
    }

    /// Adds the sphere of radius `self.radius + 1`. Returns false when the
    /// cap stopped the level early.
    fn grow_level(&mut self, cap: usize) -> bool {
        let lo = if self.radius == 0 { 0 } else { self.sizes[self.radius - 1] };
        let frontier = &self.entries[lo..];
        let letters = &self.gens.letters;
        let products: Vec<Vec<VnElement>> = frontier
            .par_iter()
            .map(|(x, _)| {
                letters
                    .iter()
                    .map(|(_, g)| x.compose(g).expect("one alphabet"))
                    .collect()
            })
            .collect();
        let mut complete = true;
        'merge: for (parent, row) in (lo..).zip(products) {
            for ((letter, _), y) in letters.iter().zip(row) {
                if self.index.contains_key(&y) {
                    continue;
                }
                if self.entries.len() >= cap {
                    complete = false;
                    break 'merge;
                }
                let mut word = self.entries[parent].1.clone();
                word.push(*letter);
                self.index.insert(y.clone(), self.entries.len());
                self.entries.push((y, word));
            }
        }
        self.radius += 1;
        self.sizes.push(self.entries.len());
        if !complete {
            self.truncated = true;
        }
        complete
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Cumulative counts `|B(0)|, .., |B(radius)|`.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Elements with their words, in discovery order.
    pub fn entries(&self) -> &[(VnElement, Vec<Letter>)] {
        &self.entries
    }

    pub fn word_of(&self, g: &VnElement) -> Option<&[Letter]> {
        self.index.get(g).map(|&i| self.entries[i].1.as_slice())
    }

    pub fn contains(&self, g: &VnElement) -> bool {
        self.index.contains_key(g)
    }

    /// Re-evaluates every stored word; returns the first mismatch.
    pub fn audit(&self) -> std::result::Result<(), (VnElement, Vec<Letter>)> {
        match self
            .entries
            .par_iter()
            .find_first(|(g, w)| w.len() > self.radius || self.gens.evaluate(w) != *g)
        {
            Some((g, w)) => Err((g.clone(), w.clone())),
            None => Ok(()),
        }
    }

    /// The ball file text, with generator files named `<name>.vn`.
    pub fn to_text(&self) -> String {
        self.render(None)
    }

    fn render(&self, manifest: Option<String>) -> String {
        let mut s = format!(
            "ball {} {} {} {}\n",
            self.gens.alphabet,
            self.radius,
            self.entries.len(),
            u8::from(self.truncated)
        );
        match manifest {
            Some(m) => s.push_str(&m),
            None => {
                for name in &self.gens.names {
                    s.push_str(&format!("gen {name} {name}.vn\n"));
                }
            }
        }
        for (g, w) in &self.entries {
            s.push('\n');
            s.push_str(&format!("word {}\n", self.gens.format_word(w)));
            s.push_str(&g.to_text());
        }
        s
    }
}

/// The ball of the given radius, stopping (and flagging truncation) once
/// `cap` elements are recorded.
pub fn grow_ball(gens: &GeneratorSet, radius: usize, cap: usize) -> Ball {
    let mut ball = Ball::start(gens);
    while ball.radius < radius {
        if !ball.grow_level(cap.max(1)) {
            break;
        }
    }
    ball
}

/// [`grow_ball`] on a dedicated pool of `threads` workers.
pub fn grow_ball_with_threads(
    gens: &GeneratorSet,
    radius: usize,
    cap: usize,
    threads: usize,
) -> Result<Ball> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::BadGenerators(e.to_string()))?;
    Ok(pool.install(|| grow_ball(gens, radius, cap)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FindResult {
    Found(Vec<Letter>),
    NotFound(usize),
}

impl FindResult {
    pub fn found(&self) -> Option<&[Letter]> {
        match self {
            FindResult::Found(w) => Some(w),
            FindResult::NotFound(_) => None,
        }
    }
}

/// A shortest word for `target` of length at most `max_radius`.
pub fn find_element(target: &VnElement, gens: &GeneratorSet, max_radius: usize) -> Result<FindResult> {
    gens.alphabet.check(target.alphabet())?;
    let mut ball = Ball::start(gens);
    loop {
        if let Some(w) = ball.word_of(target) {
            return Ok(FindResult::Found(w.to_vec()));
        }
        if ball.radius >= max_radius || !ball.grow_level(DEFAULT_CAP) {
            return Ok(FindResult::NotFound(max_radius));
        }
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Writes the ball file and one element file per generator
/// (`<file>.<name>.vn`) next to it.
pub fn save_ball(ball: &Ball, path: &Path) -> Result<()> {
    let manifest = ball.gens.write_elements(path)?;
    write(path, &ball.render(Some(manifest)))
}

pub fn load_ball(path: &Path) -> Result<Ball> {
    let text = read(path)?;
    let dir = path.parent().unwrap_or(Path::new("")).to_path_buf();
    parse_ball(&text, |file| VnElement::from_text(&read(&dir.join(file))?))
}

/// Parses a ball file, resolving generator element files through `load`.
pub fn parse_ball(text: &str, mut load: impl FnMut(&str) -> Result<VnElement>) -> Result<Ball> {
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).collect();
    let mut pos = 0;
    let header = lines.first().ok_or_else(|| perr(1, "empty ball file".into()))?;
    let fields: Vec<&str> = header.1.split_whitespace().collect();
    let parse_num = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| perr(1, format!("bad {what} `{s}`")))
    };
    let (degree, radius, count, truncated) = match fields.as_slice() {
        ["ball", n, r, c, t] => (
            parse_num(n, "degree")?,
            parse_num(r, "radius")?,
            parse_num(c, "count")?,
            match *t {
                "0" => false,
                "1" => true,
                _ => return Err(perr(1, format!("bad truncation flag `{t}`"))),
            },
        ),
        _ => return Err(perr(1, format!("expected `ball <n> <radius> <count> <0|1>`, found `{}`", header.1))),
    };
    let alphabet = Alphabet::new(degree).map_err(|e| perr(1, e.to_string()))?;
    pos += 1;
    let mut named = Vec::new();
    while pos < lines.len() && lines[pos].1.starts_with("gen ") {
        let (ln, line) = lines[pos];
        let (name, file) = parse_gen_line(line)
            .ok_or_else(|| perr(ln, format!("expected `gen <name> <element-file>`, found `{line}`")))?;
        let g = load(file).map_err(|e| perr(ln, format!("{file}: {e}")))?;
        named.push((name.to_string(), g));
        pos += 1;
    }
    let gens = GeneratorSet::new(named).map_err(|e| perr(2, e.to_string()))?;
    if gens.alphabet != alphabet {
        return Err(perr(1, format!("generators live in V_{}, header says V_{alphabet}", gens.alphabet)));
    }
    let mut entries: Vec<(VnElement, Vec<Letter>)> = Vec::new();
    let mut index = HashMap::new();
    while pos < lines.len() {
        let (ln, line) = lines[pos];
        pos += 1;
        if line.is_empty() {
            continue;
        }
        let word_text = line
            .strip_prefix("word")
            .filter(|rest| rest.is_empty() || rest.starts_with(' '))
            .ok_or_else(|| perr(ln, format!("expected `word <name>+`, found `{line}`")))?;
        let word = gens
            .parse_word(if word_text.trim().is_empty() { "eps" } else { word_text })
            .map_err(|e| perr(ln, e.to_string()))?;
        if word.len() > radius {
            return Err(perr(ln, format!("word of length {} exceeds radius {radius}", word.len())));
        }
        let start = pos;
        while pos < lines.len() && !lines[pos].1.is_empty() && !lines[pos].1.starts_with("word") {
            pos += 1;
        }
        let block: Vec<&str> = lines[start..pos].iter().map(|l| l.1).collect();
        let g = VnElement::from_text(&block.join("\n")).map_err(|e| match e {
            Error::Parse { line, msg } => perr(start + line, msg),
            other => perr(ln, other.to_string()),
        })?;
        if g.alphabet() != alphabet {
            return Err(perr(start + 1, "element alphabet differs from the header".into()));
        }
        if index.insert(g.clone(), entries.len()).is_some() {
            return Err(perr(ln, "duplicate element".into()));
        }
        entries.push((g, word));
    }
    if entries.len() != count {
        return Err(perr(1, format!("header announces {count} elements, found {}", entries.len())));
    }
    let mut sizes = vec![0; radius + 1];
    for (_, w) in &entries {
        sizes[w.len()] += 1;
    }
    for r in 1..=radius {
        sizes[r] += sizes[r - 1];
    }
    Ok(Ball {
        gens,
        radius,
        entries,
        index,
        sizes,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{make_t, make_tau, sigma_dot};

    fn a(n: usize) -> Alphabet {
        Alphabet::new(n).unwrap()
    }

    fn sigma_tau(n: usize) -> GeneratorSet {
        GeneratorSet::new([
            ("sigma".to_string(), sigma_dot(a(n))),
            ("tau".to_string(), make_tau(a(n))),
        ])
        .unwrap()
    }

    #[test]
    fn small_balls() {
        let s = sigma_tau(2);
        let b1 = grow_ball(&s, 1, DEFAULT_CAP);
        assert_eq!(b1.len(), 3);
        let b2 = grow_ball(&s, 2, DEFAULT_CAP);
        assert_eq!(b2.len(), 5);
        assert_eq!(b2.sizes(), &[1, 3, 5]);
        assert!(b2.audit().is_ok());
        assert_eq!(grow_ball(&s, 0, DEFAULT_CAP).len(), 1);
    }

    #[test]
    fn cap_truncates() {
        let b = grow_ball(&sigma_tau(2), 5, 4);
        assert!(b.is_truncated());
        assert_eq!(b.len(), 4);
    }

    #[test]
    fn find_examples() {
        let s = sigma_tau(2);
        let t = make_t(a(2));
        let w = find_element(&t, &s, 2).unwrap();
        assert_eq!(s.format_word(w.found().unwrap()), "sigma tau");
        let id = VnElement::identity(a(2));
        assert_eq!(find_element(&id, &s, 0).unwrap(), FindResult::Found(vec![]));
        assert_eq!(find_element(&t.power(3), &s, 3).unwrap(), FindResult::NotFound(3));
    }

    #[test]
    fn inverses_are_letters() {
        let g = GeneratorSet::new([("t".to_string(), make_t(a(2)))]).unwrap();
        let b = grow_ball(&g, 3, DEFAULT_CAP);
        assert_eq!(b.sizes(), &[1, 3, 5, 7]);
        let w = b.word_of(&make_t(a(2)).power(-2)).unwrap();
        assert_eq!(g.format_word(w), "t^-1 t^-1");
        assert_eq!(g.parse_word("t^-1 t^-1").unwrap(), w);
    }

    #[test]
    fn generator_names() {
        let s = sigma_dot(a(2));
        assert!(GeneratorSet::new([("eps".to_string(), s.clone())]).is_err());
        assert!(GeneratorSet::new([("a b".to_string(), s.clone())]).is_err());
        assert!(GeneratorSet::new([("x".to_string(), s.clone()), ("x".to_string(), s.clone())]).is_err());
        assert!(GeneratorSet::new(Vec::<(String, VnElement)>::new()).is_err());
        assert!(GeneratorSet::new([("x".to_string(), s), ("y".to_string(), sigma_dot(a(3)))]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let s = sigma_tau(2);
        let b = grow_ball(&s, 4, DEFAULT_CAP);
        let text = b.to_text();
        let back = parse_ball(&text, |f| match f {
            "sigma.vn" => Ok(sigma_dot(a(2))),
            "tau.vn" => Ok(make_tau(a(2))),
            _ => panic!("unexpected file {f}"),
        })
        .unwrap();
        assert_eq!(back, b);
        let corrupted = text.replacen("word sigma tau", "word sigma bogus", 1);
        let line = text.lines().position(|l| l == "word sigma tau").unwrap() + 1;
        match parse_ball(&corrupted, |f| Ok(if f == "sigma.vn" { sigma_dot(a(2)) } else { make_tau(a(2)) })) {
            Err(Error::Parse { line: l, .. }) => assert_eq!(l, line),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }
}

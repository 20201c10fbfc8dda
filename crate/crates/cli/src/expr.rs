//! Expressions over named elements.
//!
//! ```text
//! expr    := term ('*' term)*
//! term    := atom postfix*
//! postfix := '^-1' | '^' integer | '^' atom
//! atom    := name | 'id' | '[' expr ',' expr ']' | '(' expr ')'
//!          | 'dot(' cycles ')' | 'embed(' word ',' expr ')' | 's(' path ')'
//! ```
//!
//! `a * b` acts by `b` first, `a^b = b^-1 a b` and `[a, b] = a b a^-1 b^-1`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use thiserror::Error;
use vn_core::{embed, make_t, make_tau, sigma_dot, AlphaSequence, Alphabet, Permutation, VnElement, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Name(String),
    Id,
    Product(Box<Expr>, Box<Expr>),
    Power(Box<Expr>, i64),
    Conjugate(Box<Expr>, Box<Expr>),
    Commutator(Box<Expr>, Box<Expr>),
    /// Cycles of a permutation of the letters; `dot(())` is the identity.
    Dot(Vec<Vec<u8>>),
    Embed(Word, Box<Expr>),
    /// `s_alpha` for the alpha file at this path.
    SAlpha(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at column {}: {msg}", .pos + 1)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error(transparent)]
    Core(#[from] vn_core::Error),
}

const KEYWORDS: [&str; 4] = ["id", "dot", "embed", "s"];

pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.term()?;
        while self.eat(b'*') {
            let rhs = self.term()?;
            e = Expr::Product(Box::new(e), Box::new(rhs));
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.atom()?;
        while self.eat(b'^') {
            match self.peek() {
                Some(b'-' | b'0'..=b'9') => {
                    let k = self.integer()?;
                    e = Expr::Power(Box::new(e), k);
                }
                _ => {
                    let h = self.atom()?;
                    e = Expr::Conjugate(Box::new(e), Box::new(h));
                }
            }
        }
        Ok(e)
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse().map_err(|_| ParseError {
            pos: start,
            msg: format!("bad exponent `{text}`"),
        })
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    /// Raw text up to the next `stop` byte, not consuming it.
    fn raw_until(&mut self, stop: &[u8]) -> String {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|c| !stop.contains(c)) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).trim().to_string()
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'[') => {
                self.pos += 1;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b']')?;
                Ok(Expr::Commutator(Box::new(a), Box::new(b)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                let name = self.ident().unwrap();
                let call = self.peek() == Some(b'(');
                match (name.as_str(), call) {
                    ("id", _) => Ok(Expr::Id),
                    ("dot", true) => self.dot_call(),
                    ("embed", true) => {
                        self.pos += 1;
                        self.skip_ws();
                        let wpos = self.pos;
                        let word = self.raw_until(b",)");
                        let word: Word = word.parse().map_err(|_| ParseError {
                            pos: wpos,
                            msg: format!("bad word `{word}`"),
                        })?;
                        self.expect(b',')?;
                        let g = self.expr()?;
                        self.expect(b')')?;
                        Ok(Expr::Embed(word, Box::new(g)))
                    }
                    ("s", true) => {
                        self.pos += 1;
                        self.skip_ws();
                        let path = self.raw_until(b")");
                        if path.is_empty() {
                            return Err(self.error("expected an alpha file path"));
                        }
                        self.expect(b')')?;
                        Ok(Expr::SAlpha(path))
                    }
                    ("dot" | "embed", false) => Err(ParseError {
                        pos: start,
                        msg: format!("`{name}` needs arguments"),
                    }),
                    _ => Ok(Expr::Name(name)),
                }
            }
            Some(c) => Err(self.error(format!("unexpected `{}`", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn dot_call(&mut self) -> Result<Expr, ParseError> {
        self.expect(b'(')?;
        let mut cycles = Vec::new();
        while self.eat(b'(') {
            let mut cycle = Vec::new();
            loop {
                match self.peek() {
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    Some(b',') => self.pos += 1,
                    Some(b'0'..=b'9') => {
                        let at = self.pos;
                        let k = self.integer()?;
                        let k = u8::try_from(k).ok().filter(|&k| k > 0).ok_or(ParseError {
                            pos: at,
                            msg: format!("letter {k} out of range"),
                        })?;
                        cycle.push(k);
                    }
                    _ => return Err(self.error("expected a letter or `)` in cycle")),
                }
            }
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
        }
        self.expect(b')')?;
        Ok(Expr::Dot(cycles))
    }
}

impl Expr {
    fn is_atom(&self) -> bool {
        !matches!(self, Expr::Product(..) | Expr::Power(..) | Expr::Conjugate(..))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |e: &Expr, f: &mut fmt::Formatter<'_>, atom_only: bool| {
            let plain = if atom_only {
                e.is_atom()
            } else {
                !matches!(e, Expr::Product(..))
            };
            if plain {
                write!(f, "{e}")
            } else {
                write!(f, "({e})")
            }
        };
        match self {
            Expr::Name(n) => f.write_str(n),
            Expr::Id => f.write_str("id"),
            Expr::Product(a, b) => {
                write!(f, "{a} * ")?;
                wrap(b, f, false)
            }
            Expr::Power(a, k) => {
                wrap(a, f, false)?;
                write!(f, "^{k}")
            }
            Expr::Conjugate(a, h) => {
                wrap(a, f, false)?;
                f.write_str("^")?;
                wrap(h, f, true)
            }
            Expr::Commutator(a, b) => write!(f, "[{a}, {b}]"),
            Expr::Dot(cycles) => {
                f.write_str("dot(")?;
                if cycles.is_empty() {
                    f.write_str("()")?;
                }
                for c in cycles {
                    let body: Vec<String> = c.iter().map(u8::to_string).collect();
                    write!(f, "({})", body.join(" "))?;
                }
                f.write_str(")")
            }
            Expr::Embed(w, g) => write!(f, "embed({w}, {g})"),
            Expr::SAlpha(p) => write!(f, "s({p})"),
        }
    }
}

/// Names visible to an expression. `sigma`, `tau` and `t` are predefined;
/// bindings shadow them.
#[derive(Debug, Clone)]
pub struct Env {
    alphabet: Alphabet,
    names: BTreeMap<String, VnElement>,
    /// Directory that relative `s(...)` paths are resolved against.
    base_dir: PathBuf,
}

impl Env {
    pub fn new(alphabet: Alphabet) -> Self {
        let names = BTreeMap::from([
            ("sigma".to_string(), sigma_dot(alphabet)),
            ("tau".to_string(), make_tau(alphabet)),
            ("t".to_string(), make_t(alphabet)),
        ]);
        Env {
            alphabet,
            names,
            base_dir: PathBuf::new(),
        }
    }

    pub fn with_base_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.base_dir = dir.into();
        self
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn bind(&mut self, name: &str, g: VnElement) -> Result<(), EvalError> {
        if KEYWORDS.contains(&name) && name != "s" {
            return Err(EvalError::UnknownName(format!("{name} is reserved")));
        }
        self.alphabet.check(g.alphabet())?;
        self.names.insert(name.to_string(), g);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&VnElement> {
        self.names.get(name)
    }

    pub fn eval(&self, e: &Expr) -> Result<VnElement, EvalError> {
        Ok(match e {
            Expr::Name(n) => self
                .names
                .get(n)
                .cloned()
                .ok_or_else(|| EvalError::UnknownName(n.clone()))?,
            Expr::Id => VnElement::identity(self.alphabet),
            Expr::Product(a, b) => self.eval(a)?.compose(&self.eval(b)?)?,
            Expr::Power(a, k) => self.eval(a)?.power(*k),
            Expr::Conjugate(a, h) => self.eval(a)?.conjugate(&self.eval(h)?)?,
            Expr::Commutator(a, b) => self.eval(a)?.commutator(&self.eval(b)?)?,
            Expr::Dot(cycles) => {
                let p = Permutation::from_cycles(self.alphabet, cycles)?;
                vn_core::dot(&p, self.alphabet)?
            }
            Expr::Embed(w, g) => embed(w, &self.eval(g)?)?,
            Expr::SAlpha(path) => {
                let seq = AlphaSequence::load(&self.base_dir.join(path))?;
                self.alphabet.check(seq.alphabet)?;
                seq.s_alpha()
            }
        })
    }

    pub fn eval_str(&self, text: &str) -> Result<VnElement, String> {
        let e = parse_expression(text).map_err(|e| e.to_string())?;
        self.eval(&e).map_err(|e| e.to_string())
    }
}

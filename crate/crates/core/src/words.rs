//! Free-group words over the closed alphabet `h`, `t` (target generators) and
//! `a`, `b`, `p` (punctured-surface generators).
//!
//! A [`Word`] is always stored freely reduced. Unreduced letter sequences only
//! exist as plain slices handed to [`reduce`], which also reports which
//! positions cancelled against each other.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator index must be at least 1 in `{0}`")]
    ZeroIndex(String),
    #[error("bad exponent in `{0}`")]
    BadExponent(String),
    #[error("no image given for generator {0}")]
    MissingImage(Generator),
}

/// Generator families, ordered `h < t < a < b < p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    H,
    T,
    A,
    B,
    P,
}

impl Family {
    pub fn symbol(self) -> char {
        match self {
            Family::H => 'h',
            Family::T => 't',
            Family::A => 'a',
            Family::B => 'b',
            Family::P => 'p',
        }
    }

    fn from_symbol(c: char) -> Option<Self> {
        Some(match c {
            'h' => Family::H,
            't' => Family::T,
            'a' => Family::A,
            'b' => Family::B,
            'p' => Family::P,
            _ => return None,
        })
    }

    /// Target (free group) families.
    pub fn is_target(self) -> bool {
        matches!(self, Family::H | Family::T)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    family: Family,
    index: u32,
}

impl Generator {
    /// Panics if `index == 0`; use [`Generator::try_new`] for untrusted input.
    pub fn new(family: Family, index: u32) -> Self {
        assert!(index >= 1, "generator indices start at 1");
        Generator { family, index }
    }

    pub fn try_new(family: Family, index: u32) -> Option<Self> {
        (index >= 1).then_some(Generator { family, index })
    }

    pub fn h(index: u32) -> Self {
        Self::new(Family::H, index)
    }
    pub fn t(index: u32) -> Self {
        Self::new(Family::T, index)
    }
    pub fn a(index: u32) -> Self {
        Self::new(Family::A, index)
    }
    pub fn b(index: u32) -> Self {
        Self::new(Family::B, index)
    }
    pub fn p(index: u32) -> Self {
        Self::new(Family::P, index)
    }

    pub fn family(self) -> Family {
        self.family
    }

    pub fn index(self) -> u32 {
        self.index
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.symbol(), self.index)
    }
}

impl FromStr for Generator {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        let family = chars
            .next()
            .and_then(Family::from_symbol)
            .ok_or_else(|| WordError::UnknownGenerator(s.to_string()))?;
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(WordError::UnknownGenerator(s.to_string()));
        }
        let index: u32 = digits
            .parse()
            .map_err(|_| WordError::UnknownGenerator(s.to_string()))?;
        Generator::try_new(family, index).ok_or_else(|| WordError::ZeroIndex(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            1 => Some(Sign::Pos),
            -1 => Some(Sign::Neg),
            _ => None,
        }
    }
}

/// Anything that can be freely cancelled against its inverse.
pub trait Invertible: Copy + Eq {
    fn inverse(self) -> Self;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: Generator,
    pub sign: Sign,
}

impl Letter {
    pub fn new(gen: Generator, sign: Sign) -> Self {
        Letter { gen, sign }
    }

    pub fn pos(gen: Generator) -> Self {
        Letter::new(gen, Sign::Pos)
    }

    pub fn neg(gen: Generator) -> Self {
        Letter::new(gen, Sign::Neg)
    }
}

impl Invertible for Letter {
    fn inverse(self) -> Self {
        Letter::new(self.gen, self.sign.flip())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Pos => write!(f, "{}", self.gen),
            Sign::Neg => write!(f, "{}^-1", self.gen),
        }
    }
}

/// Record of a stack-based free reduction: which input positions cancelled
/// pairwise, and which survived (in order).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CancellationTrace {
    /// Pairs `(i, j)` with `i < j`, listed in the order the cancellations happened.
    pub matching: Vec<(usize, usize)>,
    pub survivors: Vec<usize>,
}

impl CancellationTrace {
    /// Number of input positions covered by the trace.
    pub fn input_len(&self) -> usize {
        self.matching.len() * 2 + self.survivors.len()
    }

    /// No two pairs `(i, j)`, `(k, l)` with `i < k < j < l`.
    pub fn is_non_crossing(&self) -> bool {
        let mut pairs = self.matching.clone();
        pairs.sort_unstable();
        let mut open: Vec<usize> = Vec::new();
        for &(i, j) in &pairs {
            while let Some(&top) = open.last() {
                if top < i {
                    open.pop();
                } else {
                    break;
                }
            }
            if let Some(&top) = open.last() {
                if j > top {
                    return false;
                }
            }
            open.push(j);
        }
        true
    }

    /// Every input index appears exactly once among pairs and survivors.
    pub fn is_partition(&self) -> bool {
        let n = self.input_len();
        let mut seen = vec![false; n];
        let all = self
            .matching
            .iter()
            .flat_map(|&(i, j)| [i, j])
            .chain(self.survivors.iter().copied());
        for k in all {
            if k >= n || seen[k] {
                return false;
            }
            seen[k] = true;
        }
        true
    }
}

/// Left-to-right stack reduction. The matching it produces is always nested.
pub fn free_reduce<L: Invertible>(letters: &[L]) -> (Vec<L>, CancellationTrace) {
    let mut stack: Vec<usize> = Vec::with_capacity(letters.len());
    let mut matching = Vec::new();
    for (j, &l) in letters.iter().enumerate() {
        match stack.last() {
            Some(&i) if letters[i].inverse() == l => {
                stack.pop();
                matching.push((i, j));
            }
            _ => stack.push(j),
        }
    }
    let reduced = stack.iter().map(|&i| letters[i]).collect();
    (
        reduced,
        CancellationTrace {
            matching,
            survivors: stack,
        },
    )
}

/// Freely reduce a letter sequence, keeping the cancellation record.
pub fn reduce(letters: &[Letter]) -> (Word, CancellationTrace) {
    let (reduced, trace) = free_reduce(letters);
    (Word(reduced), trace)
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            if stack.last() == Some(&l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word(stack)
    }

    pub fn gen(g: Generator) -> Self {
        Word(vec![Letter::pos(g)])
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let reps = n.unsigned_abs() as usize;
        Word::from_letters(std::iter::repeat_n(base.0, reps).flatten())
    }

    /// Signed count of occurrences of `g`.
    pub fn exponent_sum(&self, g: Generator) -> i64 {
        self.0
            .iter()
            .filter(|l| l.gen == g)
            .map(|l| l.sign.value())
            .sum()
    }

    /// Image under the endomorphism killing every generator in `kill`.
    pub fn delete_letters(&self, kill: &BTreeSet<Generator>) -> Word {
        Word::from_letters(self.0.iter().copied().filter(|l| !kill.contains(&l.gen)))
    }

    /// Image under the endomorphism `g ↦ images[g]`.
    pub fn substitute(&self, images: &BTreeMap<Generator, Word>) -> Result<Word, WordError> {
        let mut out = Vec::new();
        for l in &self.0 {
            let img = images.get(&l.gen).ok_or(WordError::MissingImage(l.gen))?;
            match l.sign {
                Sign::Pos => out.extend_from_slice(&img.0),
                Sign::Neg => out.extend(img.0.iter().rev().map(|x| x.inverse())),
            }
        }
        Ok(Word::from_letters(out))
    }

    /// Split `self = conjugator · core · conjugator⁻¹` with `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let w = &self.0;
        if w.is_empty() {
            return (Word::empty(), Word::empty());
        }
        let (mut i, mut j) = (0usize, w.len() - 1);
        while i < j && w[i].inverse() == w[j] {
            i += 1;
            j -= 1;
        }
        (Word(w[..i].to_vec()), Word(w[i..=j].to_vec()))
    }

    /// Conjugacy in the free group: cyclic cores agree up to rotation.
    pub fn is_conjugate(&self, other: &Word) -> bool {
        let (_, a) = self.cyclic_reduce();
        let (_, b) = other.cyclic_reduce();
        if a.len() != b.len() {
            return false;
        }
        if a.is_empty() {
            return true;
        }
        let n = a.len();
        (0..n).any(|r| (0..n).all(|k| a.0[(r + k) % n] == b.0[k]))
    }

    pub fn generators(&self) -> BTreeSet<Generator> {
        self.0.iter().map(|l| l.gen).collect()
    }
}

impl fmt::Display for Word {
    /// Runs of a repeated letter are written with an exponent; the empty word is `e`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        let mut first = true;
        let mut k = 0;
        while k < self.0.len() {
            let l = self.0[k];
            let mut run = 1;
            while k + run < self.0.len() && self.0[k + run] == l {
                run += 1;
            }
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let exp = run as i64 * l.sign.value();
            if exp == 1 {
                write!(f, "{}", l.gen)?;
            } else {
                write!(f, "{}^{}", l.gen, exp)?;
            }
            k += run;
        }
        Ok(())
    }
}

/// Parse the textual word grammar without reducing. `e` is the empty word;
/// `g^n` expands to `|n|` copies of `g` or `g⁻¹`.
pub fn parse_letters(s: &str) -> Result<Vec<Letter>, WordError> {
    let s = s.trim();
    if s == "e" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for term in s.split_whitespace() {
        let (name, exp) = match term.split_once('^') {
            Some((name, exp)) => {
                let e: i64 = exp
                    .parse()
                    .map_err(|_| WordError::BadExponent(term.to_string()))?;
                if e == 0 {
                    return Err(WordError::BadExponent(term.to_string()));
                }
                (name, e)
            }
            None => (term, 1),
        };
        let gen: Generator = name.parse()?;
        let sign = if exp > 0 { Sign::Pos } else { Sign::Neg };
        out.extend(std::iter::repeat_n(Letter::new(gen, sign), exp.unsigned_abs() as usize));
    }
    Ok(out)
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Word::from_letters(parse_letters(s)?))
    }
}

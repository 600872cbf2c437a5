//! The standard punctured surface, homomorphisms from its group to free groups,
//! and the bounding conditions.
//!
//! Domain generators are `p1..p2b, a1, b1, ..., ag, bg` subject to the single
//! relation `p1⋯p2b = [a1,b1]⋯[ag,bg]` with `[a,b] = a b a⁻¹ b⁻¹`. Targets are
//! free on `t1..tb, h1..hg`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::folding::generates;
use crate::words::{Family, Generator, Letter, Sign, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("no image given for {0}")]
    MissingImage(Generator),
    #[error("{0} is not a generator of the surface group")]
    NotInDomain(Generator),
    #[error("image of {gen} uses {letter}, outside the target free group")]
    ImageOutOfRange { gen: Generator, letter: Generator },
    #[error("images do not respect the surface relation")]
    IllDefined,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SurfaceSignature {
    pub genus: u32,
    pub bridges: u32,
}

impl SurfaceSignature {
    pub fn new(genus: u32, bridges: u32) -> Self {
        SurfaceSignature { genus, bridges }
    }

    pub fn punctures(self) -> u32 {
        2 * self.bridges
    }

    /// `p1..p2b, a1, b1, ..., ag, bg`, the order used everywhere.
    pub fn domain_generators(self) -> Vec<Generator> {
        let mut out: Vec<Generator> = (1..=self.punctures()).map(Generator::p).collect();
        for i in 1..=self.genus {
            out.push(Generator::a(i));
            out.push(Generator::b(i));
        }
        out
    }

    pub fn is_domain_generator(self, g: Generator) -> bool {
        match g.family() {
            Family::P => g.index() <= self.punctures(),
            Family::A | Family::B => g.index() <= self.genus,
            _ => false,
        }
    }

    pub fn t_generators(self) -> BTreeSet<Generator> {
        (1..=self.bridges).map(Generator::t).collect()
    }

    pub fn h_generators(self) -> BTreeSet<Generator> {
        (1..=self.genus).map(Generator::h).collect()
    }

    /// `{t1..tb, h1..hg}`.
    pub fn target_basis(self) -> BTreeSet<Generator> {
        let mut s = self.h_generators();
        s.extend(self.t_generators());
        s
    }

    pub fn is_target_generator(self, g: Generator) -> bool {
        match g.family() {
            Family::T => g.index() <= self.bridges,
            Family::H => g.index() <= self.genus,
            _ => false,
        }
    }

    /// `(p1⋯p2b, [a1,b1]⋯[ag,bg])`.
    pub fn relation_sides(self) -> (Word, Word) {
        let left = Word::from_letters((1..=self.punctures()).map(|k| Letter::pos(Generator::p(k))));
        let mut right = Vec::new();
        for i in 1..=self.genus {
            let (a, b) = (Generator::a(i), Generator::b(i));
            right.extend([Letter::pos(a), Letter::pos(b), Letter::neg(a), Letter::neg(b)]);
        }
        (left, Word::from_letters(right))
    }

    /// `[a1,b1]⋯[ag,bg]·(p1⋯p2b)⁻¹`, trivial in the surface group.
    pub fn relator(self) -> Word {
        let (left, right) = self.relation_sides();
        right.concat(&left.inverse())
    }
}

/// A homomorphism from the punctured-surface group, given on generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeTargetHom {
    sig: SurfaceSignature,
    images: BTreeMap<Generator, Word>,
}

impl FreeTargetHom {
    /// Checks that every domain generator has an image over `t1..tb, h1..hg`.
    /// The surface relation is checked separately by [`FreeTargetHom::verify_hom`].
    pub fn new(sig: SurfaceSignature, images: BTreeMap<Generator, Word>) -> Result<Self, SurfaceError> {
        for &g in images.keys() {
            if !sig.is_domain_generator(g) {
                return Err(SurfaceError::NotInDomain(g));
            }
        }
        for g in sig.domain_generators() {
            let w = images.get(&g).ok_or(SurfaceError::MissingImage(g))?;
            if let Some(l) = w.letters().iter().find(|l| !sig.is_target_generator(l.gen)) {
                return Err(SurfaceError::ImageOutOfRange { gen: g, letter: l.gen });
            }
        }
        Ok(FreeTargetHom { sig, images })
    }

    pub fn sig(&self) -> SurfaceSignature {
        self.sig
    }

    pub fn image(&self, g: Generator) -> &Word {
        &self.images[&g]
    }

    pub fn images(&self) -> &BTreeMap<Generator, Word> {
        &self.images
    }

    /// Images in domain order.
    pub fn ordered_images(&self) -> Vec<(Generator, &Word)> {
        self.sig
            .domain_generators()
            .into_iter()
            .map(|g| (g, &self.images[&g]))
            .collect()
    }

    /// Total letter count over all images.
    pub fn total_length(&self) -> usize {
        self.images.values().map(Word::len).sum()
    }

    /// Image of an arbitrary domain word.
    pub fn apply(&self, w: &Word) -> Word {
        w.substitute(&self.images)
            .expect("domain words only use domain generators")
    }

    /// Whether the images satisfy the surface relation.
    pub fn verify_hom(&self) -> bool {
        let (left, right) = self.sig.relation_sides();
        self.apply(&left) == self.apply(&right)
    }

    pub fn verify_bounding(&self) -> Result<BoundingReport, SurfaceError> {
        if !self.verify_hom() {
            return Err(SurfaceError::IllDefined);
        }
        let sig = self.sig;
        let mut failures = Vec::new();

        let all: Vec<Word> = self.images.values().cloned().collect();
        let surjective = generates(&all, &sig.target_basis());
        if !surjective {
            failures.push(format!(
                "images do not generate the free group on {} generators",
                sig.genus + sig.bridges
            ));
        }

        let ts = sig.t_generators();
        let closed: Vec<Word> = (1..=sig.genus)
            .flat_map(|i| [Generator::a(i), Generator::b(i)])
            .map(|g| self.images[&g].delete_letters(&ts))
            .collect();
        let cond1 = generates(&closed, &sig.h_generators());
        if !cond1 {
            failures.push("a/b images do not generate the h-quotient after killing the t's".into());
        }

        let mut f = BTreeMap::new();
        let mut conjugators = BTreeMap::new();
        let mut cond2 = true;
        let mut hits: BTreeMap<Letter, Vec<Generator>> = BTreeMap::new();
        for k in 1..=sig.punctures() {
            let p = Generator::p(k);
            let (conj, core) = self.images[&p].cyclic_reduce();
            conjugators.insert(p, conj);
            match core.letters() {
                [l] if l.gen.family() == Family::T => {
                    f.insert(p, *l);
                    hits.entry(*l).or_default().push(p);
                }
                _ => {
                    cond2 = false;
                    failures.push(format!("{p} maps to a conjugate of {core}, not of a single t letter"));
                }
            }
        }
        for t in ts {
            for sign in [Sign::Pos, Sign::Neg] {
                let l = Letter::new(t, sign);
                let n = hits.get(&l).map_or(0, Vec::len);
                if n != 1 {
                    cond2 = false;
                    failures.push(format!("{l} is the central letter of {n} puncture images, expected 1"));
                }
            }
        }
        if !cond2 {
            f.clear();
        }

        Ok(BoundingReport {
            ok: surjective && cond1 && cond2,
            surjective,
            cond1,
            cond2,
            f,
            conjugators,
            failures,
        })
    }

    /// Kills every `t`, keeping only the closed-surface generators.
    pub fn associated_closed(&self) -> FreeTargetHom {
        let sig = SurfaceSignature::new(self.sig.genus, 0);
        let ts = self.sig.t_generators();
        let images = sig
            .domain_generators()
            .into_iter()
            .map(|g| (g, self.images[&g].delete_letters(&ts)))
            .collect();
        FreeTargetHom { sig, images }
    }
}

/// Outcome of the bounding check; `f` is filled only when `cond2` holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundingReport {
    pub ok: bool,
    pub surjective: bool,
    pub cond1: bool,
    pub cond2: bool,
    pub f: BTreeMap<Generator, Letter>,
    pub conjugators: BTreeMap<Generator, Word>,
    pub failures: Vec<String>,
}

impl BoundingReport {
    /// Strand pairing on punctures (1-based, `i < j`): `pi ~ pj` iff `f(pi) = f(pj)⁻¹`.
    pub fn strand_pairs(&self) -> Vec<(u32, u32)> {
        let mut by_t: BTreeMap<Generator, Vec<u32>> = BTreeMap::new();
        for (p, l) in &self.f {
            by_t.entry(l.gen).or_default().push(p.index());
        }
        let mut pairs: Vec<(u32, u32)> = by_t
            .values()
            .filter(|v| v.len() == 2)
            .map(|v| (v[0].min(v[1]), v[0].max(v[1])))
            .collect();
        pairs.sort_unstable();
        pairs
    }
}

impl fmt::Display for FreeTargetHom {
    /// The homomorphism file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "genus = {}", self.sig.genus)?;
        writeln!(f, "bridges = {}", self.sig.bridges)?;
        for (g, w) in self.ordered_images() {
            writeln!(f, "{g} -> {w}")?;
        }
        Ok(())
    }
}

fn header(line: Option<(usize, &str)>, key: &str) -> Result<u32, SurfaceError> {
    let (n, text) = line.ok_or(SurfaceError::Parse {
        line: 0,
        message: format!("missing `{key} = <int>` line"),
    })?;
    let err = || SurfaceError::Parse {
        line: n,
        message: format!("expected `{key} = <int>`"),
    };
    let (k, v) = text.split_once('=').ok_or_else(err)?;
    if k.trim() != key {
        return Err(err());
    }
    v.trim().parse().map_err(|_| err())
}

/// Parses a homomorphism block. `first_line` offsets reported line numbers.
pub fn parse_hom(text: &str, first_line: usize) -> Result<FreeTargetHom, SurfaceError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + first_line, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let genus = header(lines.next(), "genus")?;
    let bridges = header(lines.next(), "bridges")?;
    let sig = SurfaceSignature::new(genus, bridges);
    let mut images = BTreeMap::new();
    let mut last_line = first_line;
    for (n, line) in lines {
        last_line = n;
        let perr = |message: String| SurfaceError::Parse { line: n, message };
        let (name, word) = line
            .split_once("->")
            .ok_or_else(|| perr("expected `<generator> -> <word>`".into()))?;
        let g: Generator = name.trim().parse().map_err(|e| perr(format!("{e}")))?;
        if !sig.is_domain_generator(g) {
            return Err(perr(format!("{g} is not a generator of the surface group")));
        }
        let w: Word = word.trim().parse().map_err(|e| perr(format!("{e}")))?;
        if images.insert(g, w).is_some() {
            return Err(perr(format!("{g} given twice")));
        }
    }
    FreeTargetHom::new(sig, images).map_err(|e| match e {
        SurfaceError::MissingImage(g) => SurfaceError::Parse {
            line: last_line,
            message: format!("no image given for {g}"),
        },
        SurfaceError::ImageOutOfRange { gen, letter } => SurfaceError::Parse {
            line: last_line,
            message: format!("image of {gen} uses {letter}, outside the target free group"),
        },
        other => other,
    })
}

impl FromStr for FreeTargetHom {
    type Err = SurfaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_hom(s, 1)
    }
}

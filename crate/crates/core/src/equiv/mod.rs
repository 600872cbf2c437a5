//! Splitting tuples: pairs and triples of bounding homomorphisms on a common
//! surface group, their pushouts, and the invariants read from them.

pub mod moves;
pub mod presentation;
pub mod smith;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use presentation::{simplify, PLetter, Presentation, Simplified};
pub use smith::{invariant_factors, AbelianInvariants};

use crate::surface::{parse_hom, BoundingReport, FreeTargetHom, SurfaceError, SurfaceSignature};
use crate::unionfind::UnionFind;
use crate::words::{Generator, Sign, Word};

pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TupleError {
    #[error("{flavor} needs {want} homomorphisms, got {got}")]
    Arity { flavor: Flavor, want: usize, got: usize },
    #[error("homomorphisms are defined on different surfaces")]
    MixedSignatures,
    #[error("phi{index} is not bounding: {}", .failures.join("; "))]
    NotBounding { index: usize, failures: Vec<String> },
    #[error("phi{0} is not a homomorphism")]
    IllDefined(usize),
    #[error("index {0} out of range")]
    Index(usize),
    #[error("indices must differ")]
    SameIndex,
    #[error("needs at least one bridge")]
    NoBridges,
    #[error("{flavor} requires {requirement}")]
    Flavor { flavor: Flavor, requirement: &'static str },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flavor {
    /// Heegaard splittings: pairs, closed surface.
    Alg3,
    /// Links in 3-manifolds: pairs with punctures.
    Alg31,
    /// Trisections: triples, closed surface.
    Alg4,
    /// Knotted surfaces in trisected 4-manifolds: triples with punctures.
    Alg42,
}

impl Flavor {
    pub fn arity(self) -> usize {
        match self {
            Flavor::Alg3 | Flavor::Alg31 => 2,
            Flavor::Alg4 | Flavor::Alg42 => 3,
        }
    }

    pub fn punctured(self) -> bool {
        matches!(self, Flavor::Alg31 | Flavor::Alg42)
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Alg3 => "Alg3",
            Flavor::Alg31 => "Alg31",
            Flavor::Alg4 => "Alg4",
            Flavor::Alg42 => "Alg42",
        })
    }
}

impl FromStr for Flavor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Alg3" => Ok(Flavor::Alg3),
            "Alg31" => Ok(Flavor::Alg31),
            "Alg4" => Ok(Flavor::Alg4),
            "Alg42" => Ok(Flavor::Alg42),
            other => Err(format!("unknown flavor `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Holds,
    Fails,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Unknown => "unknown",
        }
    }

    /// Fails beats unknown beats holds.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fails, _) | (_, Verdict::Fails) => Verdict::Fails,
            (Verdict::Unknown, _) | (_, Verdict::Unknown) => Verdict::Unknown,
            _ => Verdict::Holds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionVerdict {
    pub value: Verdict,
    pub evidence: Vec<String>,
}

/// Two or three bounding homomorphisms on one surface, tagged with a flavor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingTuple {
    flavor: Flavor,
    homs: Vec<FreeTargetHom>,
}

impl SplittingTuple {
    /// Every hom must be bounding and share the signature; the arity must fit the flavor.
    pub fn new(flavor: Flavor, homs: Vec<FreeTargetHom>) -> Result<Self, TupleError> {
        if homs.len() != flavor.arity() {
            return Err(TupleError::Arity {
                flavor,
                want: flavor.arity(),
                got: homs.len(),
            });
        }
        let sig = homs[0].sig();
        if homs.iter().any(|h| h.sig() != sig) {
            return Err(TupleError::MixedSignatures);
        }
        for (i, h) in homs.iter().enumerate() {
            let rep = h.verify_bounding().map_err(|_| TupleError::IllDefined(i + 1))?;
            if !rep.ok {
                return Err(TupleError::NotBounding {
                    index: i + 1,
                    failures: rep.failures,
                });
            }
        }
        Ok(SplittingTuple { flavor, homs })
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn arity(&self) -> usize {
        self.homs.len()
    }

    pub fn sig(&self) -> SurfaceSignature {
        self.homs[0].sig()
    }

    pub fn homs(&self) -> &[FreeTargetHom] {
        &self.homs
    }

    pub fn hom(&self, i: usize) -> &FreeTargetHom {
        &self.homs[i]
    }

    fn check_index(&self, i: usize) -> Result<(), TupleError> {
        if i < self.homs.len() {
            Ok(())
        } else {
            Err(TupleError::Index(i + 1))
        }
    }

    pub fn reports(&self) -> Vec<BoundingReport> {
        self.homs
            .iter()
            .map(|h| h.verify_bounding().expect("tuple members are homomorphisms"))
            .collect()
    }

    /// Pushout of homs `i` and `j` (0-based).
    pub fn pushout_pair(&self, i: usize, j: usize) -> Result<Presentation, TupleError> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(TupleError::SameIndex);
        }
        Ok(pushout(&[&self.homs[i], &self.homs[j]], &[i + 1, j + 1]))
    }

    /// Pushout of all three homs.
    pub fn pushout_tuple(&self) -> Result<Presentation, TupleError> {
        if self.arity() != 3 {
            return Err(TupleError::Arity {
                flavor: self.flavor,
                want: 3,
                got: self.arity(),
            });
        }
        let homs: Vec<&FreeTargetHom> = self.homs.iter().collect();
        Ok(pushout(&homs, &[1, 2, 3]))
    }

    fn require_bridges(&self) -> Result<(), TupleError> {
        if self.sig().bridges == 0 {
            Err(TupleError::NoBridges)
        } else {
            Ok(())
        }
    }

    fn require_triple(&self) -> Result<(), TupleError> {
        if self.arity() == 3 {
            Ok(())
        } else {
            Err(TupleError::Arity {
                flavor: self.flavor,
                want: 3,
                got: self.arity(),
            })
        }
    }

    /// Cycles in the union of the strand pairings of homs `i` and `j`.
    pub fn link_components(&self, i: usize, j: usize) -> Result<usize, TupleError> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(TupleError::SameIndex);
        }
        self.require_bridges()?;
        let reports = self.reports();
        Ok(matching_components(
            self.sig().punctures() as usize,
            &[&reports[i].strand_pairs(), &reports[j].strand_pairs()],
        ))
    }

    pub fn surface_components(&self) -> Result<usize, TupleError> {
        self.require_triple()?;
        self.require_bridges()?;
        let reports = self.reports();
        let pairs: Vec<Vec<(u32, u32)>> = reports.iter().map(|r| r.strand_pairs()).collect();
        let refs: Vec<&[(u32, u32)]> = pairs.iter().map(Vec::as_slice).collect();
        Ok(matching_components(self.sig().punctures() as usize, &refs))
    }

    /// Link components `c1, c2, c3` of the consecutive pairs (1,2), (2,3), (3,1).
    pub fn sector_components(&self) -> Result<[usize; 3], TupleError> {
        self.require_triple()?;
        Ok([
            self.link_components(0, 1)?,
            self.link_components(1, 2)?,
            self.link_components(2, 0)?,
        ])
    }

    /// `c1 + c2 + c3 - b`.
    pub fn euler_characteristic(&self) -> Result<i64, TupleError> {
        let c = self.sector_components()?;
        Ok(c.iter().sum::<usize>() as i64 - self.sig().bridges as i64)
    }

    pub fn is_spherical(&self) -> Result<bool, TupleError> {
        Ok(self.surface_components()? == 1 && self.euler_characteristic()? == 2)
    }

    /// Membership in the tuple's flavor. Freeness of a pushout is certified only
    /// by simplifying to a relator-free presentation; torsion or a wrong free
    /// rank in the abelianization refutes it; anything else is unknown.
    pub fn verify_membership(&self, budget: usize) -> Result<ConditionVerdict, TupleError> {
        let flavor = self.flavor;
        let b = self.sig().bridges;
        if flavor.punctured() && b == 0 {
            return Err(TupleError::Flavor { flavor, requirement: "at least one bridge" });
        }
        if !flavor.punctured() && b != 0 {
            return Err(TupleError::Flavor { flavor, requirement: "a closed surface (no bridges)" });
        }
        let mut evidence = vec![format!("all {} homomorphisms are bounding", self.arity())];
        if self.arity() == 2 {
            return Ok(ConditionVerdict { value: Verdict::Holds, evidence });
        }
        let pairs = [(0usize, 1usize), (1, 2), (0, 2)];
        let results: Vec<(Verdict, Vec<String>)> = std::thread::scope(|s| {
            let handles: Vec<_> = pairs
                .iter()
                .map(|&(i, j)| s.spawn(move || self.pair_condition(i, j, budget)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("pair check panicked")).collect()
        });
        let mut value = Verdict::Holds;
        for (v, ev) in results {
            value = value.and(v);
            evidence.extend(ev);
        }
        Ok(ConditionVerdict { value, evidence })
    }

    fn pair_condition(&self, i: usize, j: usize, budget: usize) -> (Verdict, Vec<String>) {
        let label = format!("pair ({},{})", i + 1, j + 1);
        let mut ev = Vec::new();
        if self.flavor == Flavor::Alg4 {
            let p = self.pushout_pair(i, j).expect("valid pair");
            let (v, note) = freeness(&p, None, budget);
            ev.push(format!("{label}: {note}"));
            return (v, ev);
        }
        let closed = pushout(
            &[&self.homs[i].associated_closed(), &self.homs[j].associated_closed()],
            &[i + 1, j + 1],
        );
        let (v1, note1) = freeness(&closed, None, budget);
        ev.push(format!("{label} closed: {note1}"));
        let c = self.link_components(i, j).expect("bridges present");
        let expected = (v1 == Verdict::Holds).then(|| simplify(&closed, budget).presentation.generators.len() + c);
        let p = self.pushout_pair(i, j).expect("valid pair");
        let (v2, note2) = freeness(&p, expected, budget);
        ev.push(format!("{label}: {c} link component(s); {note2}"));
        (v1.and(v2), ev)
    }
}

/// Three-valued freeness check with an optional required rank.
pub fn freeness(p: &Presentation, rank: Option<usize>, budget: usize) -> (Verdict, String) {
    let s = simplify(p, budget);
    let ab = p.abelianization();
    let q = &s.presentation;
    if q.is_free() {
        let r = q.generators.len();
        return match rank {
            Some(want) if want != r => (Verdict::Fails, format!("free of rank {r}, expected {want}")),
            _ => (Verdict::Holds, format!("simplifies to free group of rank {r}")),
        };
    }
    if !ab.torsion.is_empty() {
        return (Verdict::Fails, format!("abelianization {ab} has torsion"));
    }
    if let Some(want) = rank {
        if ab.free_rank != want {
            return (Verdict::Fails, format!("abelianization {ab} cannot be free of rank {want}"));
        }
    }
    (
        Verdict::Unknown,
        format!("simplified to {q} within {} steps; abelianization {ab}", s.steps),
    )
}

fn copy_name(g: Generator, copy: usize) -> String {
    format!("{g}_{copy}")
}

/// Disjoint copies of each target, with `φk(x) = φ(k+1)(x)` for consecutive
/// homs and every domain generator `x`.
fn pushout(homs: &[&FreeTargetHom], copies: &[usize]) -> Presentation {
    let mut names = Vec::new();
    let mut offsets = Vec::new();
    let mut bases: Vec<Vec<Generator>> = Vec::new();
    for (h, &c) in homs.iter().zip(copies) {
        offsets.push(names.len());
        let basis: Vec<Generator> = h.sig().target_basis().into_iter().collect();
        names.extend(basis.iter().map(|&g| copy_name(g, c)));
        bases.push(basis);
    }
    let lift = |k: usize, w: &Word| -> Vec<PLetter> {
        w.letters()
            .iter()
            .map(|l| {
                let idx = bases[k].iter().position(|&g| g == l.gen).expect("target letter");
                PLetter::new(offsets[k] + idx, l.sign == Sign::Neg)
            })
            .collect()
    };
    let mut relators = Vec::new();
    for k in 0..homs.len().saturating_sub(1) {
        for x in homs[k].sig().domain_generators() {
            let mut r = lift(k, homs[k].image(x));
            let other = lift(k + 1, homs[k + 1].image(x));
            r.extend(other.iter().rev().map(|l| PLetter::new(l.gen, !l.inv)));
            relators.push(r);
        }
    }
    Presentation::new(names, relators)
}

/// Connected components of the graph on `n` points (1-based pairs).
fn matching_components(n: usize, matchings: &[&[(u32, u32)]]) -> usize {
    let mut uf = UnionFind::new(n);
    for m in matchings {
        for &(i, j) in *m {
            uf.union(i as usize - 1, j as usize - 1);
        }
    }
    uf.count()
}

impl fmt::Display for SplittingTuple {
    /// The tuple file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "flavor = {}", self.flavor)?;
        for (k, h) in self.homs.iter().enumerate() {
            writeln!(f)?;
            writeln!(f, "[phi{}]", k + 1)?;
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

impl FromStr for SplittingTuple {
    type Err = TupleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lines: Vec<&str> = s.lines().collect();
        let mut idx = 0;
        while idx < lines.len() && lines[idx].trim().is_empty() {
            idx += 1;
        }
        let perr = |line: usize, message: String| TupleError::Parse { line, message };
        let first = lines.get(idx).ok_or_else(|| perr(1, "empty tuple file".into()))?;
        let flavor: Flavor = first
            .split_once('=')
            .filter(|(k, _)| k.trim() == "flavor")
            .ok_or_else(|| perr(idx + 1, "expected `flavor = Alg3|Alg31|Alg4|Alg42`".into()))?
            .1
            .trim()
            .parse()
            .map_err(|e| perr(idx + 1, e))?;
        idx += 1;
        let mut sections: Vec<(usize, usize, usize)> = Vec::new(); // (number, header line index, end)
        for (i, line) in lines.iter().enumerate().skip(idx) {
            let t = line.trim();
            if let Some(inner) = t.strip_prefix("[phi").and_then(|r| r.strip_suffix(']')) {
                let k: usize = inner.parse().map_err(|_| perr(i + 1, format!("bad section header `{t}`")))?;
                if let Some(last) = sections.last_mut() {
                    last.2 = i;
                }
                sections.push((k, i, lines.len()));
            } else if sections.is_empty() && !t.is_empty() {
                return Err(perr(i + 1, "expected a `[phi1]` section".into()));
            }
        }
        let mut homs = Vec::new();
        for (n, &(k, start, end)) in sections.iter().enumerate() {
            if k != n + 1 {
                return Err(perr(start + 1, format!("expected section [phi{}]", n + 1)));
            }
            let body = lines[start + 1..end].join("\n");
            let hom = parse_hom(&body, start + 2).map_err(|e| match e {
                SurfaceError::Parse { line, message } => perr(line, message),
                other => perr(start + 1, other.to_string()),
            })?;
            homs.push(hom);
        }
        SplittingTuple::new(flavor, homs)
    }
}

/// Strand pairing of one hom, for callers that only have a report.
pub fn strand_pairs(report: &BoundingReport) -> BTreeSet<(u32, u32)> {
    report.strand_pairs().into_iter().collect()
}

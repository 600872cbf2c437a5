//! Moves on splitting tuples. Every move re-verifies its output and rejects
//! instead of emitting a tuple with a non-bounding member.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{Flavor, SplittingTuple, TupleError};
use crate::surface::{FreeTargetHom, SurfaceSignature};
use crate::words::{Generator, Letter, Sign, Word};

pub type GenMap = BTreeMap<Generator, Word>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("move needs {0}")]
    Precondition(String),
    #[error("normal form absent: {0}")]
    NormalForm(String),
    #[error("maps are not mutually inverse: {0}")]
    NotInverse(String),
    #[error("puncture classes not preserved: {0}")]
    Punctures(String),
    #[error("orientation check: {0}")]
    Orientation(String),
    #[error("invariant changed: {0}")]
    Invariant(String),
    #[error("result rejected: {0}")]
    Rejected(#[from] TupleError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Shared,
    Unshared,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "shared" => Ok(Mode::Shared),
            "unshared" => Ok(Mode::Unshared),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Shared => "shared",
            Mode::Unshared => "unshared",
        })
    }
}

fn pre(msg: &str) -> MoveError {
    MoveError::Precondition(msg.to_string())
}

fn w(letters: &[Letter]) -> Word {
    Word::from_letters(letters.iter().copied())
}

fn rebuild(sig: SurfaceSignature, images: GenMap) -> FreeTargetHom {
    FreeTargetHom::new(sig, images).expect("move keeps images inside the target")
}

/// `x ↦ φ(x)` rewritten by `map` (post-composition).
pub fn postcompose(hom: &FreeTargetHom, map: &GenMap) -> FreeTargetHom {
    let images = hom
        .images()
        .iter()
        .map(|(&g, img)| (g, img.substitute(map).expect("map covers the target basis")))
        .collect();
    rebuild(hom.sig(), images)
}

/// `x ↦ φ(map(x))` (pre-composition).
pub fn precompose(hom: &FreeTargetHom, map: &GenMap) -> FreeTargetHom {
    let images = hom
        .sig()
        .domain_generators()
        .into_iter()
        .map(|g| (g, map[&g].substitute(hom.images()).expect("images cover the domain")))
        .collect();
    rebuild(hom.sig(), images)
}

/// `x ↦ outer(inner(x))`.
pub fn compose(outer: &GenMap, inner: &GenMap) -> GenMap {
    inner
        .iter()
        .map(|(&g, img)| (g, img.substitute(outer).expect("outer covers inner's letters")))
        .collect()
}

fn identity_on(gens: impl IntoIterator<Item = Generator>) -> GenMap {
    gens.into_iter().map(|g| (g, Word::gen(g))).collect()
}

fn check_inverse(images: &GenMap, inverse: &GenMap, basis: &[Generator]) -> Result<(), MoveError> {
    for m in [images, inverse] {
        if let Some(g) = basis.iter().find(|g| !m.contains_key(g)) {
            return Err(MoveError::NotInverse(format!("no image for {g}")));
        }
        if let Some(g) = m.keys().find(|g| !basis.contains(g)) {
            return Err(MoveError::NotInverse(format!("{g} is not in the basis")));
        }
        for (g, img) in m {
            if let Some(l) = img.letters().iter().find(|l| !basis.contains(&l.gen)) {
                return Err(MoveError::NotInverse(format!("image of {g} uses {}", l.gen)));
            }
        }
    }
    for (outer, inner) in [(images, inverse), (inverse, images)] {
        for (g, img) in compose(outer, inner) {
            if img != Word::gen(g) {
                return Err(MoveError::NotInverse(format!("{g} goes to {img}")));
            }
        }
    }
    Ok(())
}

fn replace_hom(t: &SplittingTuple, i: usize, hom: FreeTargetHom) -> Result<SplittingTuple, MoveError> {
    let mut homs = t.homs().to_vec();
    homs[i] = hom;
    Ok(SplittingTuple::new(t.flavor(), homs)?)
}

/// Heegaard stabilization of a closed pair.
pub fn stabilize_heegaard(t: &SplittingTuple) -> Result<SplittingTuple, MoveError> {
    if t.flavor() != Flavor::Alg3 {
        return Err(pre("an Alg3 pair"));
    }
    stabilize_genus(t)
}

/// Adds one handle to a pair, or three handles to a triple, with the standard
/// images on the new `a`, `b` generators.
pub fn stabilize_genus(t: &SplittingTuple) -> Result<SplittingTuple, MoveError> {
    let sig = t.sig();
    let g = sig.genus;
    // per hom, per new handle k: (a image is h, b image is h)
    let table: Vec<Vec<(bool, bool)>> = if t.arity() == 2 {
        vec![vec![(true, false)], vec![(false, true)]]
    } else {
        vec![
            vec![(true, false), (true, false), (false, true)],
            vec![(true, false), (false, true), (true, false)],
            vec![(false, true), (true, false), (true, false)],
        ]
    };
    let added = table[0].len() as u32;
    let new_sig = SurfaceSignature::new(g + added, sig.bridges);
    let homs = t
        .homs()
        .iter()
        .zip(&table)
        .map(|(hom, row)| {
            let mut images = hom.images().clone();
            for (k, &(a_h, b_h)) in row.iter().enumerate() {
                let i = g + 1 + k as u32;
                let h = Word::gen(Generator::h(i));
                images.insert(Generator::a(i), if a_h { h.clone() } else { Word::empty() });
                images.insert(Generator::b(i), if b_h { h } else { Word::empty() });
            }
            rebuild(new_sig, images)
        })
        .collect();
    Ok(SplittingTuple::new(t.flavor(), homs)?)
}

fn require_slot(hom: &FreeTargetHom, k: usize, p: Generator, tb: Generator) -> Result<(), MoveError> {
    if *hom.image(p) == Word::gen(tb) {
        Ok(())
    } else {
        Err(MoveError::NormalForm(format!("phi{k}({p}) = {}, expected {tb}", hom.image(p))))
    }
}

/// Bridge perturbation of an Alg31 pair, pushing a strand from `side` (1 or 2).
/// Requires `φ1(p2b) = φ2(p2b) = tb`.
pub fn perturb(t: &SplittingTuple, side: usize) -> Result<SplittingTuple, MoveError> {
    if t.flavor() != Flavor::Alg31 {
        return Err(pre("an Alg31 pair"));
    }
    if !(1..=2).contains(&side) {
        return Err(pre("side 1 or 2"));
    }
    let sig = t.sig();
    let b = sig.bridges;
    let (ia, ib) = if side == 1 { (0, 1) } else { (1, 0) };
    let (tb, tn) = (Generator::t(b), Generator::t(b + 1));
    let p = Generator::p;
    for i in [ia, ib] {
        require_slot(t.hom(i), i + 1, p(2 * b), tb)?;
    }
    let new_sig = SurfaceSignature::new(sig.genus, b + 1);
    let mut a = t.hom(ia).images().clone();
    a.insert(p(2 * b), Word::gen(tn));
    a.insert(p(2 * b + 1), w(&[Letter::neg(tn)]));
    a.insert(p(2 * b + 2), Word::gen(tb));
    let mut bb = t.hom(ib).images().clone();
    bb.insert(p(2 * b + 1), Word::gen(tn));
    bb.insert(p(2 * b + 2), w(&[Letter::neg(tn)]));
    let mut homs = vec![rebuild(new_sig, a), rebuild(new_sig, bb)];
    if side == 2 {
        homs.swap(0, 1);
    }
    let out = SplittingTuple::new(t.flavor(), homs)?;
    let (before, after) = (t.link_components(0, 1)?, out.link_components(0, 1)?);
    if before != after {
        return Err(MoveError::Invariant(format!("link components {before} -> {after}")));
    }
    Ok(out)
}

/// Positions of the three roles for color `c` (1-based).
fn roles(color: usize) -> [usize; 3] {
    let c = color - 1;
    [c, (c + 1) % 3, (c + 2) % 3]
}

/// Bridge perturbation of an Alg42 triple. Colors rotate the roles: color `c`
/// plays the first role, `c+1` the second, `c+2` the third.
pub fn perturb_triple(t: &SplittingTuple, color: usize, mode: Mode) -> Result<SplittingTuple, MoveError> {
    if t.flavor() != Flavor::Alg42 {
        return Err(pre("an Alg42 triple"));
    }
    if !(1..=3).contains(&color) {
        return Err(pre("color 1, 2 or 3"));
    }
    let sig = t.sig();
    let b = sig.bridges;
    let [ia, ib, ic] = roles(color);
    let (tb, tn) = (Generator::t(b), Generator::t(b + 1));
    let p = Generator::p;
    let tn_inv = w(&[Letter::neg(tn)]);
    let new_sig = SurfaceSignature::new(sig.genus, b + 1);

    let mut a = t.hom(ia).images().clone();
    let mut bb = t.hom(ib).images().clone();
    match mode {
        Mode::Shared => {
            require_slot(t.hom(ia), ia + 1, p(2 * b), tb)?;
            require_slot(t.hom(ib), ib + 1, p(2 * b), tb)?;
            a.insert(p(2 * b), Word::gen(tn));
        }
        Mode::Unshared => {
            if b < 1 {
                return Err(pre("at least one bridge"));
            }
            require_slot(t.hom(ia), ia + 1, p(2 * b - 1), tb)?;
            require_slot(t.hom(ib), ib + 1, p(2 * b), tb)?;
            a.insert(p(2 * b - 1), Word::gen(tn));
            // keeps the product of the puncture images unchanged
            let x = t.hom(ia).image(p(2 * b));
            let c = w(&[Letter::neg(tn), Letter::pos(tb)]);
            a.insert(p(2 * b), c.concat(x).concat(&c.inverse()));
        }
    }
    a.insert(p(2 * b + 1), tn_inv.clone());
    a.insert(p(2 * b + 2), Word::gen(tb));
    bb.insert(p(2 * b), Word::gen(tn));
    bb.insert(p(2 * b + 1), tn_inv.clone());
    bb.insert(p(2 * b + 2), Word::gen(tb));
    let mut cc = t.hom(ic).images().clone();
    cc.insert(p(2 * b + 1), Word::gen(tn));
    cc.insert(p(2 * b + 2), tn_inv);

    let mut homs = vec![None, None, None];
    homs[ia] = Some(rebuild(new_sig, a));
    homs[ib] = Some(rebuild(new_sig, bb));
    homs[ic] = Some(rebuild(new_sig, cc));
    let out = SplittingTuple::new(t.flavor(), homs.into_iter().map(Option::unwrap).collect())?;
    let before = (t.euler_characteristic()?, t.surface_components()?);
    let after = (out.euler_characteristic()?, out.surface_components()?);
    if before != after {
        return Err(MoveError::Invariant(format!(
            "(chi, components) {before:?} -> {after:?}"
        )));
    }
    Ok(out)
}

/// `(φ1, φ2, φ3) → (φ2, φ3, φ1)`.
pub fn cyclic(t: &SplittingTuple) -> Result<SplittingTuple, MoveError> {
    if t.arity() != 3 {
        return Err(pre("a triple"));
    }
    let mut homs = t.homs().to_vec();
    homs.rotate_left(1);
    Ok(SplittingTuple::new(t.flavor(), homs)?)
}

/// Post-composes hom `index` (0-based) with an automorphism of the target.
pub fn target_automorphism(
    t: &SplittingTuple,
    index: usize,
    images: &GenMap,
    inverse: &GenMap,
) -> Result<SplittingTuple, MoveError> {
    if index >= t.arity() {
        return Err(TupleError::Index(index + 1).into());
    }
    let basis: Vec<Generator> = t.sig().target_basis().into_iter().collect();
    check_inverse(images, inverse, &basis)?;
    replace_hom(t, index, postcompose(t.hom(index), images))
}

/// Precomposes every hom with the inverse of a surface automorphism.
pub fn surface_automorphism(t: &SplittingTuple, images: &GenMap, inverse: &GenMap) -> Result<SplittingTuple, MoveError> {
    let sig = t.sig();
    check_surface_automorphism(sig, images, inverse)?;
    let homs = t.homs().iter().map(|h| precompose(h, inverse)).collect();
    Ok(SplittingTuple::new(t.flavor(), homs)?)
}

/// Mutual inverses, punctures permuted up to conjugacy, and the relator sent
/// to a conjugate of itself.
pub fn check_surface_automorphism(sig: SurfaceSignature, images: &GenMap, inverse: &GenMap) -> Result<(), MoveError> {
    let basis = sig.domain_generators();
    check_inverse(images, inverse, &basis)?;
    let n = sig.punctures();
    let mut hit = vec![false; n as usize];
    for i in 1..=n {
        let img = &images[&Generator::p(i)];
        let j = (1..=n)
            .find(|&j| img.is_conjugate(&Word::gen(Generator::p(j))))
            .ok_or_else(|| MoveError::Punctures(format!("p{i} goes to {img}, not a conjugate of a puncture")))?;
        if std::mem::replace(&mut hit[j as usize - 1], true) {
            return Err(MoveError::Punctures(format!("two punctures land on the class of p{j}")));
        }
    }
    let rel = sig.relator();
    let img = rel.substitute(images).expect("images cover the domain");
    if img.is_conjugate(&rel) {
        Ok(())
    } else if img.is_conjugate(&rel.inverse()) {
        Err(MoveError::Orientation("relator goes to a conjugate of its inverse".into()))
    } else {
        Err(MoveError::Orientation("inconclusive: relator image is not conjugate to the relator".into()))
    }
}

/// Target automorphism `(images, inverse)` sending `φ(p)` to exactly `t_slot`:
/// conjugate away the prefix, swap the central letter with `t_slot`, then fix the sign.
pub fn slot_normalizer(hom: &FreeTargetHom, p: Generator, slot: u32) -> Result<(GenMap, GenMap), MoveError> {
    let (conj, core) = hom.image(p).cyclic_reduce();
    let l = match core.letters() {
        [l] if l.gen.family() == crate::words::Family::T => *l,
        _ => return Err(MoveError::NormalForm(format!("{p} is not sent to a conjugate of a t letter"))),
    };
    let basis: Vec<Generator> = hom.sig().target_basis().into_iter().collect();
    let ts = Generator::t(slot);
    let mut inner = identity_on(basis.iter().copied());
    let mut inner_inv = inner.clone();
    for &g in &basis {
        let x = Word::gen(g);
        inner.insert(g, conj.inverse().concat(&x).concat(&conj));
        inner_inv.insert(g, conj.concat(&x).concat(&conj.inverse()));
    }
    let mut swap = identity_on(basis.iter().copied());
    swap.insert(l.gen, Word::gen(ts));
    swap.insert(ts, Word::gen(l.gen));
    let mut flip = identity_on(basis.iter().copied());
    if l.sign == Sign::Neg {
        flip.insert(ts, w(&[Letter::neg(ts)]));
    }
    let forward = compose(&flip, &compose(&swap, &inner));
    let backward = compose(&inner_inv, &compose(&swap, &flip));
    Ok((forward, backward))
}

fn normalize_slots(t: &SplittingTuple, slots: &[(usize, Generator)], tb: u32) -> Result<SplittingTuple, MoveError> {
    let mut cur = t.clone();
    for &(i, p) in slots {
        let (f, g) = slot_normalizer(cur.hom(i), p, tb)?;
        cur = target_automorphism(&cur, i, &f, &g)?;
    }
    Ok(cur)
}

/// Applies the target automorphisms that put a pair in the form [`perturb`] needs.
pub fn normalize_for_perturb(t: &SplittingTuple) -> Result<SplittingTuple, MoveError> {
    let b = t.sig().bridges;
    if b == 0 || t.arity() != 2 {
        return Err(pre("a pair with at least one bridge"));
    }
    let p = Generator::p(2 * b);
    normalize_slots(t, &[(0, p), (1, p)], b)
}

/// Applies the target automorphisms that put a triple in the form
/// [`perturb_triple`] needs for `color` and `mode`.
pub fn normalize_for_triple(t: &SplittingTuple, color: usize, mode: Mode) -> Result<SplittingTuple, MoveError> {
    let b = t.sig().bridges;
    if b == 0 || t.arity() != 3 || !(1..=3).contains(&color) {
        return Err(pre("a triple with at least one bridge and color 1..3"));
    }
    let [ia, ib, _] = roles(color);
    let slots = match mode {
        Mode::Shared => [(ia, Generator::p(2 * b)), (ib, Generator::p(2 * b))],
        Mode::Unshared => [(ia, Generator::p(2 * b - 1)), (ib, Generator::p(2 * b))],
    };
    normalize_slots(t, &slots, b)
}

/// Half twist exchanging punctures `i` and `i+1`: `pi ↦ pi p(i+1) pi⁻¹`, `p(i+1) ↦ pi`.
pub fn half_twist(sig: SurfaceSignature, i: u32) -> (GenMap, GenMap) {
    assert!(i >= 1 && i < sig.punctures(), "half twist index out of range");
    let (x, y) = (Generator::p(i), Generator::p(i + 1));
    let mut f = identity_on(sig.domain_generators());
    let mut g = f.clone();
    f.insert(x, w(&[Letter::pos(x), Letter::pos(y), Letter::neg(x)]));
    f.insert(y, Word::gen(x));
    g.insert(x, Word::gen(y));
    g.insert(y, w(&[Letter::neg(y), Letter::pos(x), Letter::pos(y)]));
    (f, g)
}

/// Dehn twist `ai ↦ ai bi`.
pub fn twist_a(sig: SurfaceSignature, i: u32) -> (GenMap, GenMap) {
    assert!(i >= 1 && i <= sig.genus, "twist index out of range");
    let (a, b) = (Generator::a(i), Generator::b(i));
    let mut f = identity_on(sig.domain_generators());
    let mut g = f.clone();
    f.insert(a, w(&[Letter::pos(a), Letter::pos(b)]));
    g.insert(a, w(&[Letter::pos(a), Letter::neg(b)]));
    (f, g)
}

/// Dehn twist `bi ↦ bi ai`.
pub fn twist_b(sig: SurfaceSignature, i: u32) -> (GenMap, GenMap) {
    assert!(i >= 1 && i <= sig.genus, "twist index out of range");
    let (a, b) = (Generator::a(i), Generator::b(i));
    let mut f = identity_on(sig.domain_generators());
    let mut g = f.clone();
    f.insert(b, w(&[Letter::pos(b), Letter::pos(a)]));
    g.insert(b, w(&[Letter::pos(b), Letter::neg(a)]));
    (f, g)
}

/// Reads a generator map, one `x -> word` per line.
pub fn parse_gen_map(text: &str) -> Result<GenMap, String> {
    let mut out = GenMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| format!("line {}: expected `x -> word`", n + 1))?;
        let g: Generator = lhs.trim().parse().map_err(|e| format!("line {}: {e}", n + 1))?;
        let img: Word = rhs.trim().parse().map_err(|e| format!("line {}: {e}", n + 1))?;
        if out.insert(g, img).is_some() {
            return Err(format!("line {}: {g} given twice", n + 1));
        }
    }
    Ok(out)
}

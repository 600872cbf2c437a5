//! Seeded generators of random bounding homomorphisms, tuples, move sequences
//! and free-group bases. Used by tests, benchmarks and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::equiv::moves::{self, GenMap, Mode};
use crate::equiv::{Flavor, SplittingTuple};
use crate::surface::{FreeTargetHom, SurfaceSignature};
use crate::words::{Generator, Letter, Sign, Word};

/// `ai ↦ hi`, `bi ↦ 1`, `p(2j-1) ↦ tj`, `p(2j) ↦ tj⁻¹`.
pub fn base_hom(sig: SurfaceSignature) -> FreeTargetHom {
    let mut images = GenMap::new();
    for i in 1..=sig.genus {
        images.insert(Generator::a(i), Word::gen(Generator::h(i)));
        images.insert(Generator::b(i), Word::empty());
    }
    for j in 1..=sig.bridges {
        images.insert(Generator::p(2 * j - 1), Word::gen(Generator::t(j)));
        images.insert(Generator::p(2 * j), Word::letter(Letter::neg(Generator::t(j))));
    }
    FreeTargetHom::new(sig, images).expect("base images lie in the target")
}

fn identity(gens: &[Generator]) -> GenMap {
    gens.iter().map(|&g| (g, Word::gen(g))).collect()
}

fn pick_sign<R: Rng>(rng: &mut R) -> Sign {
    if rng.gen_bool(0.5) {
        Sign::Pos
    } else {
        Sign::Neg
    }
}

/// One elementary target automorphism with its inverse. All of them keep the
/// bounding conditions: h's get multiplied by other letters, t's get conjugated,
/// and generators of one family are inverted or swapped.
pub fn random_target_automorphism<R: Rng>(rng: &mut R, sig: SurfaceSignature) -> (GenMap, GenMap) {
    let basis: Vec<Generator> = sig.target_basis().into_iter().collect();
    let hs: Vec<Generator> = sig.h_generators().into_iter().collect();
    let ts: Vec<Generator> = sig.t_generators().into_iter().collect();
    let mut f = identity(&basis);
    let mut g = f.clone();
    if basis.len() < 2 {
        if let Some(&x) = basis.first() {
            f.insert(x, Word::letter(Letter::neg(x)));
            g.insert(x, Word::letter(Letter::neg(x)));
        }
        return (f, g);
    }
    let other = |rng: &mut R, not: Generator| loop {
        let x = *basis.choose(rng).unwrap();
        if x != not {
            return Letter::new(x, pick_sign(rng));
        }
    };
    match rng.gen_range(0..5) {
        0 | 1 if !hs.is_empty() => {
            let h = *hs.choose(rng).unwrap();
            let x = other(rng, h);
            let (xw, hw) = (Word::letter(x), Word::gen(h));
            if rng.gen_bool(0.5) {
                f.insert(h, hw.concat(&xw));
                g.insert(h, hw.concat(&xw.inverse()));
            } else {
                f.insert(h, xw.concat(&hw));
                g.insert(h, xw.inverse().concat(&hw));
            }
        }
        2 if !ts.is_empty() => {
            let t = *ts.choose(rng).unwrap();
            let x = Word::letter(other(rng, t));
            let tw = Word::gen(t);
            f.insert(t, x.concat(&tw).concat(&x.inverse()));
            g.insert(t, x.inverse().concat(&tw).concat(&x));
        }
        3 => {
            let x = *basis.choose(rng).unwrap();
            f.insert(x, Word::letter(Letter::neg(x)));
            g.insert(x, Word::letter(Letter::neg(x)));
        }
        _ => {
            let fam = if hs.len() >= 2 && (ts.len() < 2 || rng.gen_bool(0.5)) { &hs } else { &ts };
            if fam.len() >= 2 {
                let pair: Vec<&Generator> = fam.choose_multiple(rng, 2).collect();
                let (x, y) = (*pair[0], *pair[1]);
                for m in [&mut f, &mut g] {
                    m.insert(x, Word::gen(y));
                    m.insert(y, Word::gen(x));
                }
            }
        }
    }
    (f, g)
}

/// A half twist or a Dehn twist (or an inverse of one), as `(map, inverse)`.
pub fn random_surface_automorphism<R: Rng>(rng: &mut R, sig: SurfaceSignature) -> Option<(GenMap, GenMap)> {
    let mut kinds = Vec::new();
    if sig.punctures() >= 2 {
        kinds.push(0);
    }
    if sig.genus >= 1 {
        kinds.extend([1, 2]);
    }
    let (f, g) = match *kinds.choose(rng)? {
        0 => moves::half_twist(sig, rng.gen_range(1..sig.punctures())),
        1 => moves::twist_a(sig, rng.gen_range(1..=sig.genus)),
        _ => moves::twist_b(sig, rng.gen_range(1..=sig.genus)),
    };
    Some(if rng.gen_bool(0.5) { (f, g) } else { (g, f) })
}

/// Random bounding homomorphism on `sig`: the base hom pushed through random
/// automorphisms of the target and of the surface. Steps that would take the
/// total image length above `max_len` are skipped; it stops after `steps`
/// accepted steps or once the length reaches `min_len`, whichever is later,
/// giving up after a bounded number of attempts.
pub fn random_bounding_hom<R: Rng>(
    rng: &mut R,
    sig: SurfaceSignature,
    steps: usize,
    min_len: usize,
    max_len: usize,
) -> FreeTargetHom {
    let mut hom = base_hom(sig);
    let mut accepted = 0;
    let mut attempts = 0;
    while (accepted < steps || hom.total_length() < min_len) && attempts < 50 * (steps + min_len + 10) {
        attempts += 1;
        let next = if rng.gen_bool(0.5) {
            let (f, _) = random_target_automorphism(rng, sig);
            moves::postcompose(&hom, &f)
        } else {
            match random_surface_automorphism(rng, sig) {
                Some((_, g)) => moves::precompose(&hom, &g),
                None => continue,
            }
        };
        if next.total_length() <= max_len {
            hom = next;
            accepted += 1;
        }
    }
    hom
}

/// Random `(g, b)` with `g + b ≥ 1` inside the given bounds.
pub fn random_signature<R: Rng>(rng: &mut R, max_genus: u32, max_bridges: u32) -> SurfaceSignature {
    loop {
        let sig = SurfaceSignature::new(rng.gen_range(0..=max_genus), rng.gen_range(0..=max_bridges));
        if sig.genus + sig.bridges > 0 {
            return sig;
        }
    }
}

/// A basis of the free group on `h1..hn` scrambled by random Nielsen moves
/// (swap, invert, multiply one word by another), keeping words at most `max_len` long.
pub fn random_nielsen_basis<R: Rng>(rng: &mut R, n: u32, moves: usize, max_len: usize) -> Vec<Word> {
    let mut words: Vec<Word> = (1..=n).map(|i| Word::gen(Generator::h(i))).collect();
    for _ in 0..moves {
        let i = rng.gen_range(0..words.len());
        match rng.gen_range(0..3) {
            0 => {
                let j = rng.gen_range(0..words.len());
                words.swap(i, j);
            }
            1 => words[i] = words[i].inverse(),
            _ if words.len() > 1 => {
                let j = loop {
                    let j = rng.gen_range(0..words.len());
                    if j != i {
                        break j;
                    }
                };
                let other = if rng.gen_bool(0.5) { words[j].clone() } else { words[j].inverse() };
                let cand = if rng.gen_bool(0.5) { words[i].concat(&other) } else { other.concat(&words[i]) };
                if cand.len() <= max_len {
                    words[i] = cand;
                }
            }
            _ => {}
        }
    }
    words
}

/// A random word over `h1..hn` of length at most `max_len`.
pub fn random_word<R: Rng>(rng: &mut R, n: u32, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::from_letters((0..len).map(|_| Letter::new(Generator::h(rng.gen_range(1..=n)), pick_sign(rng))))
}

/// One random move applicable to `t`, or `None` if the drawn move was rejected.
/// Target automorphisms go to a random member; perturbations are preceded by
/// the normalizing target automorphisms they need.
pub fn random_move<R: Rng>(rng: &mut R, t: &SplittingTuple) -> Option<(String, SplittingTuple)> {
    let sig = t.sig();
    let mut options = vec!["target", "surface"];
    if sig.genus < 6 {
        options.push("stabilize");
    }
    if t.arity() == 3 {
        options.push("cyclic");
    }
    if t.flavor() == Flavor::Alg31 && sig.bridges < 6 {
        options.push("perturb");
    }
    if t.flavor() == Flavor::Alg42 && sig.bridges < 6 {
        options.push("perturb");
    }
    let kind = *options.choose(rng).unwrap();
    let out = match kind {
        "target" => {
            let i = rng.gen_range(0..t.arity());
            let (f, g) = random_target_automorphism(rng, sig);
            moves::target_automorphism(t, i, &f, &g)
        }
        "surface" => {
            let (f, g) = random_surface_automorphism(rng, sig)?;
            moves::surface_automorphism(t, &f, &g)
        }
        "stabilize" => moves::stabilize_genus(t),
        "cyclic" => moves::cyclic(t),
        _ if t.arity() == 2 => {
            let side = rng.gen_range(1..=2);
            moves::normalize_for_perturb(t).and_then(|n| moves::perturb(&n, side))
        }
        _ => {
            let color = rng.gen_range(1..=3);
            let mode = if rng.gen_bool(0.5) { Mode::Shared } else { Mode::Unshared };
            moves::normalize_for_triple(t, color, mode).and_then(|n| moves::perturb_triple(&n, color, mode))
        }
    };
    out.ok().map(|t| (kind.to_string(), t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_homs_are_bounding() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let sig = random_signature(&mut rng, 3, 3);
            let h = random_bounding_hom(&mut rng, sig, 12, 0, 200);
            assert!(h.total_length() <= 200);
            let rep = h.verify_bounding().unwrap();
            assert!(rep.ok, "{h}\n{:?}", rep.failures);
        }
    }

    #[test]
    fn length_target_is_reached() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_bounding_hom(&mut rng, SurfaceSignature::new(2, 2), 0, 1000, 2000);
        assert!((1000..=2000).contains(&h.total_length()), "{}", h.total_length());
    }

    #[test]
    fn nielsen_bases_generate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=4 {
            let words = random_nielsen_basis(&mut rng, n, 30, 64);
            assert!(crate::folding::generates_full(&words, n as usize));
        }
    }
}

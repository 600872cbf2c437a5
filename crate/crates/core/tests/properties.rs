//! Randomized invariants, checked with proptest.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use tangleforge::diagram::{homology_rows, rank};
use tangleforge::equiv::moves;
use tangleforge::equiv::presentation::{PLetter, Presentation};
use tangleforge::equiv::smith::invariant_factors;
use tangleforge::equiv::{simplify, Verdict, DEFAULT_BUDGET};
use tangleforge::folding::{generates_full, FoldGraph};
use tangleforge::synth;
use tangleforge::words::reduce;
use tangleforge::{realize, ComponentKind, FreeTargetHom, Generator, Letter, Sign, SurfaceSignature, Word};

fn letter() -> impl Strategy<Value = Letter> {
    (0u8..4, 1u32..4, any::<bool>()).prop_map(|(fam, i, pos)| {
        let g = match fam {
            0 => Generator::h(i),
            1 => Generator::t(i),
            2 => Generator::a(i),
            _ => Generator::b(i),
        };
        Letter::new(g, if pos { Sign::Pos } else { Sign::Neg })
    })
}

/// Small alphabet so cancellations are frequent.
fn letters() -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(
        (1u32..3, any::<bool>()).prop_map(|(i, pos)| Letter::new(Generator::h(i), if pos { Sign::Pos } else { Sign::Neg })),
        0..40,
    )
}

fn word() -> impl Strategy<Value = Word> {
    prop::collection::vec(letter(), 0..24).prop_map(Word::from_letters)
}

fn hom_from_seed(seed: u64) -> FreeTargetHom {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sig = synth::random_signature(&mut rng, 3, 3);
    synth::random_bounding_hom(&mut rng, sig, 20, 0, 500)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reduction_matches_naive_oracle(ls in letters()) {
        let (w, trace) = reduce(&ls);
        let naive = naive_reduce(&ls);
        prop_assert_eq!(w.letters(), naive.as_slice());
        prop_assert!(trace.is_non_crossing());
        prop_assert!(trace.is_partition());
        prop_assert_eq!(trace.input_len(), ls.len());
        prop_assert!(w.len() <= ls.len());
        prop_assert_eq!(w.len() == ls.len(), naive_reduce(&ls).len() == ls.len() && trace.matching.is_empty());
        let (again, t2) = reduce(w.letters());
        prop_assert_eq!(again, w);
        prop_assert!(t2.matching.is_empty());
    }

    #[test]
    fn matched_pairs_are_inverse(ls in letters()) {
        let (_, trace) = reduce(&ls);
        for &(i, j) in &trace.matching {
            prop_assert_eq!(ls[j], letter_inverse(ls[i]));
        }
        let kept: Vec<Letter> = trace.survivors.iter().map(|&i| ls[i]).collect();
        prop_assert_eq!(kept, naive_reduce(&ls));
    }

    #[test]
    fn word_times_inverse_is_trivial(w in word()) {
        prop_assert!(w.concat(&w.inverse()).is_empty());
        prop_assert_eq!(w.inverse().inverse(), w);
    }

    #[test]
    fn exponent_sums_add(a in word(), b in word(), l in letter()) {
        let g = l.gen;
        prop_assert_eq!(a.concat(&b).exponent_sum(g), a.exponent_sum(g) + b.exponent_sum(g));
    }

    #[test]
    fn deletion_is_substitution(w in word(), kill in prop::collection::btree_set(letter().prop_map(|l| l.gen), 0..4)) {
        let images: BTreeMap<Generator, Word> = w
            .generators()
            .into_iter()
            .map(|g| (g, if kill.contains(&g) { Word::empty() } else { Word::gen(g) }))
            .collect();
        prop_assert_eq!(w.delete_letters(&kill), w.substitute(&images).unwrap());
    }

    #[test]
    fn cyclic_reduction_recomposes(w in word()) {
        let (c, core) = w.cyclic_reduce();
        prop_assert_eq!(c.concat(&core).concat(&c.inverse()), w.clone());
        if core.len() >= 2 {
            let ls = core.letters();
            prop_assert_ne!(ls[0], letter_inverse(ls[ls.len() - 1]));
        }
    }

    #[test]
    fn conjugacy_is_an_equivalence(w in word(), x in word(), y in word()) {
        let u = x.concat(&w).concat(&x.inverse());
        let v = y.concat(&u).concat(&y.inverse());
        prop_assert!(w.is_conjugate(&w));
        prop_assert!(w.is_conjugate(&u) && u.is_conjugate(&w));
        prop_assert!(u.is_conjugate(&v) && w.is_conjugate(&v));
    }

    #[test]
    fn fold_records_account_for_lost_edges(ws in prop::collection::vec(letters(), 1..4)) {
        let words: Vec<Word> = ws.into_iter().map(|l| Word::from_letters(l)).filter(|w| !w.is_empty()).collect();
        prop_assume!(!words.is_empty());
        let mut g = FoldGraph::wedge_from_words(&words).unwrap();
        let before = g.edge_count();
        let recs = g.fold_to_core();
        prop_assert_eq!(recs.len(), before - g.edge_count());
        prop_assert!(g.is_folded());
    }

    #[test]
    fn nielsen_moves_keep_generation(seed in any::<u64>(), n in 1u32..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let words = synth::random_nielsen_basis(&mut rng, n, 30, 64);
        prop_assert!(generates_full(&words, n as usize));
        let mut fewer = words.clone();
        fewer.pop();
        let basis: BTreeSet<Generator> = (1..=n).map(Generator::h).collect();
        prop_assert!(!tangleforge::folding::generates(&fewer, &basis));
    }

    #[test]
    fn smith_form_matches_minors(m in prop::collection::vec(prop::collection::vec(-5i64..=5, 1..5), 1..5)) {
        let cols = m.iter().map(Vec::len).min().unwrap();
        let m: Vec<Vec<i64>> = m.into_iter().map(|mut r| { r.truncate(cols); r }).collect();
        let f = invariant_factors(&m);
        prop_assert_eq!(&f, &determinantal_factors(&m));
        prop_assert!(f.windows(2).all(|p| p[1] % p[0] == 0));
        prop_assert_eq!(f.len(), rational_rank(&m));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn surjectivity_forces_full_exponent_rank(seed in any::<u64>()) {
        let hom = hom_from_seed(seed);
        let sig = hom.sig();
        let rep = hom.verify_bounding().unwrap();
        prop_assert!(rep.ok);
        let basis: Vec<Generator> = sig.target_basis().into_iter().collect();
        let rows: Vec<Vec<i64>> = hom.images().values().map(|w| basis.iter().map(|&g| w.exponent_sum(g)).collect()).collect();
        if !basis.is_empty() {
            prop_assert_eq!(rational_rank(&rows), basis.len());
        }
        prop_assert_eq!(hom.associated_closed().associated_closed(), hom.associated_closed());
        let pairs = rep.strand_pairs();
        let covered: BTreeSet<u32> = pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
        prop_assert_eq!(covered.len(), sig.punctures() as usize);
        prop_assert_eq!(pairs.len(), sig.bridges as usize);
    }

    #[test]
    fn realization_round_trip(seed in any::<u64>()) {
        let hom = hom_from_seed(seed);
        let sig = hom.sig();
        let r = realize(&hom).unwrap();
        let d = &r.diagram;
        d.validate().unwrap();
        prop_assert_eq!(d.read_off().unwrap(), hom.clone());
        let census = d.component_census();
        prop_assert_eq!(census.closed_total(), sig.genus as usize);
        prop_assert_eq!(census.arc_total(), sig.bridges as usize);
        let letters: BTreeSet<Generator> = d.components.iter().map(|c| c.letter).collect();
        prop_assert_eq!(letters, sig.target_basis());
        prop_assert!(d.components.iter().all(|c| (c.kind == ComponentKind::Arc) == (c.letter.family() == tangleforge::Family::T)));
        let mut ends: Vec<(u32, u32)> = census.endpoints.values().flatten().copied().collect();
        ends.sort_unstable();
        prop_assert_eq!(ends, hom.verify_bounding().unwrap().strand_pairs());
        prop_assert_eq!(d.is_cut_system(), Ok(true));
        prop_assert_eq!(rank(&homology_rows(&hom)), sig.genus as usize);
        prop_assert_eq!(r.band_count, d.bands.len());
        prop_assert_eq!(r.band_count, r.fold_trace.iter().filter(|f| f.is_band()).count());
        // census law: every preliminary component beyond the final ones was absorbed by a band
        let pre = r.preliminary_census.closed_total() + r.preliminary_census.arc_total();
        prop_assert_eq!(pre - r.band_count, (sig.genus + sig.bridges) as usize);
        let again = realize(&hom).unwrap();
        prop_assert_eq!(again.diagram.to_json(), d.to_json());
    }

    #[test]
    fn bands_join_like_letters(seed in any::<u64>()) {
        let hom = hom_from_seed(seed);
        let r = realize(&hom).unwrap();
        let pre = tangleforge::realize::preliminary_diagram(&hom).unwrap();
        let letter: BTreeMap<usize, Generator> = pre.components.iter().map(|c| (c.id, c.letter)).collect();
        let mut merged = letter.clone();
        for b in &r.diagram.bands {
            let (x, y) = (merged[&b.from], merged[&b.to]);
            prop_assert_eq!(x, y);
            merged.insert(b.result, x);
        }
    }

    #[test]
    fn simplify_preserves_abelianization(
        gens in 1usize..4,
        rels in prop::collection::vec(prop::collection::vec((0usize..4, any::<bool>()), 0..10), 0..4),
    ) {
        let rels: Vec<Vec<PLetter>> = rels
            .into_iter()
            .map(|r| r.into_iter().map(|(g, inv)| PLetter::new(g % gens, inv)).collect())
            .collect();
        let names = (0..gens).map(|i| format!("x{i}")).collect();
        let p = Presentation::new(names, rels);
        let s = simplify(&p, 2_000);
        prop_assert_eq!(s.presentation.abelianization(), p.abelianization());
        prop_assert!(s.presentation.total_length() <= p.total_length() || s.presentation.generators.len() < p.generators.len());
    }

    #[test]
    fn random_moves_keep_invariants(seed in any::<u64>(), fixture in 0usize..64) {
        let names = tuple_fixtures();
        let name = &names[fixture % names.len()];
        let start = tuple_fixture(name);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ab = |t: &tangleforge::SplittingTuple| if t.arity() == 2 {
            t.pushout_pair(0, 1).unwrap().abelianization()
        } else {
            t.pushout_tuple().unwrap().abelianization()
        };
        let base = ab(&start);
        let mut cur = start;
        for _ in 0..6 {
            if let Some((kind, next)) = synth::random_move(&mut rng, &cur) {
                prop_assert_eq!(ab(&next), base.clone(), "{} after {}", name, kind);
                cur = next;
            }
        }
    }
}

#[test]
fn holds_is_stable_under_cyclic_and_stabilization() {
    for name in tuple_fixtures() {
        let t = tuple_fixture(&name);
        if t.arity() != 3 || t.verify_membership(DEFAULT_BUDGET).unwrap().value != Verdict::Holds {
            continue;
        }
        for next in [moves::cyclic(&t).unwrap(), moves::stabilize_genus(&t).unwrap()] {
            let v = next.verify_membership(DEFAULT_BUDGET).unwrap();
            assert_eq!(v.value, Verdict::Holds, "{name}: {:?}", v.evidence);
        }
    }
}

#[test]
fn every_fixture_round_trips_byte_for_byte() {
    for name in all_fixtures() {
        let text = fixture_text(&name);
        let out = if name.ends_with(".tuple") {
            tuple_fixture(&name).to_string()
        } else {
            hom_fixture(&name).to_string()
        };
        assert_eq!(out, text, "{name}");
    }
}

#[test]
fn fixture_homs_round_trip_through_diagrams() {
    for name in all_fixtures() {
        let homs: Vec<FreeTargetHom> = if name.ends_with(".tuple") {
            tuple_fixture(&name).homs().to_vec()
        } else {
            vec![hom_fixture(&name)]
        };
        for hom in homs {
            let r = realize(&hom).unwrap();
            assert_eq!(r.diagram.read_off().unwrap(), hom, "{name}");
        }
    }
}

#[test]
fn move_outputs_on_fixtures_are_bounding() {
    for name in tuple_fixtures() {
        let t = tuple_fixture(&name);
        let mut outs = vec![];
        outs.push(moves::stabilize_genus(&t));
        if t.arity() == 3 {
            outs.push(moves::cyclic(&t));
        }
        if t.sig().bridges > 0 && t.arity() == 2 {
            for side in 1..=2 {
                outs.push(moves::normalize_for_perturb(&t).and_then(|n| moves::perturb(&n, side)));
            }
        }
        if t.sig().bridges > 0 && t.arity() == 3 {
            for color in 1..=3 {
                for mode in [moves::Mode::Shared, moves::Mode::Unshared] {
                    outs.push(moves::normalize_for_triple(&t, color, mode).and_then(|n| moves::perturb_triple(&n, color, mode)));
                }
            }
        }
        for out in outs.into_iter().flatten() {
            for hom in out.homs() {
                assert!(hom.verify_bounding().unwrap().ok, "{name}");
            }
        }
    }
}

#[test]
fn signature_of_empty_surface() {
    let sig = SurfaceSignature::new(0, 0);
    let hom = synth::base_hom(sig);
    let r = realize(&hom).unwrap();
    assert!(r.diagram.components.is_empty());
}

#[test]
fn link_components_agree_with_alternating_walk() {
    for name in tuple_fixtures() {
        let t = tuple_fixture(&name);
        let n = t.sig().punctures() as usize;
        if n == 0 {
            continue;
        }
        let reps = t.reports();
        for i in 0..t.arity() {
            for j in i + 1..t.arity() {
                let want = alternating_cycles(n, &reps[i].strand_pairs(), &reps[j].strand_pairs());
                assert_eq!(t.link_components(i, j).unwrap(), want, "{name} ({i},{j})");
            }
        }
    }
}

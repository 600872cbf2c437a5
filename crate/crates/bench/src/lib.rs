//! Shared input builders for the criterion benches.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tangleforge::equiv::{Presentation, SplittingTuple};
use tangleforge::{synth, FreeTargetHom, SurfaceSignature, Word};

const SEED: u64 = 0xbe4c;

/// A genus-2, 2-bridge bounding map with total image length at least `len`.
pub fn hom_of_length(len: usize) -> FreeTargetHom {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ len as u64);
    synth::random_bounding_hom(&mut rng, SurfaceSignature::new(2, 2), 0, len, 2 * len)
}

/// A Nielsen-scrambled basis of `F_n`.
pub fn nielsen_basis(n: u32, moves: usize) -> Vec<Word> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ u64::from(n));
    synth::random_nielsen_basis(&mut rng, n, moves, 64)
}

/// The triple pushout of `t`, stabilized `rounds` times first to grow it.
pub fn stabilized_pushout(t: &SplittingTuple, rounds: usize) -> Presentation {
    let mut t = t.clone();
    for _ in 0..rounds {
        t = tangleforge::equiv::moves::stabilize_genus(&t).expect("stabilization applies");
    }
    t.pushout_tuple().expect("triple pushout")
}

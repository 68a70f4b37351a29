use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic PRNG stream for `(seed, stream)`. Independent streams let
/// trials run in any order, or in parallel, with identical results.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Fresh seed from OS entropy, for runs where the caller gave none.
pub fn entropy_seed() -> u64 {
    rand::random()
}

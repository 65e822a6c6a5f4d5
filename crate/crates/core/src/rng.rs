use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent generator for item `index` of a seeded run. `domain` keeps
/// different consumers of the same seed apart.
pub(crate) fn keyed(seed: u64, index: u64, domain: &[u8; 8]) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    key[16..24].copy_from_slice(domain);
    ChaCha8Rng::from_seed(key)
}

//! Deterministic derivation of per-replicate seeds from a master seed.

/// One round of SplitMix64 finalization.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for stream `k` under `master`: `splitmix64(master ⊕ splitmix64(k))`.
///
/// Streams for distinct `k` are decorrelated and the mapping is stable
/// across platforms and releases.
#[inline]
pub fn split(master: u64, k: u64) -> u64 {
    splitmix64(master ^ splitmix64(k))
}

//! Deterministic seeding helpers.

use rand_core::RngCore;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stateless 64-bit mix of `(base_seed, cell, trial)`.
pub fn mix_seed(base_seed: u64, cell: u64, trial: u64) -> u64 {
    let h = splitmix64(base_seed);
    let h = splitmix64(h ^ cell.wrapping_mul(0xD6E8_FEB8_6659_FD93));
    splitmix64(h ^ trial.wrapping_mul(0xA076_1D64_78BD_642F))
}

/// Uniform double in `[0, 1)` with 53 random bits.
#[inline]
pub fn unit_f64<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

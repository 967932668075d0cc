//! Portable random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 keystream
//! (`rand_chacha::ChaCha8Rng`, stream 0, word position 0). The 32-byte key is
//! the little-endian concatenation of four `u64`s:
//!
//! ```text
//! key = master_seed || purpose || network_id || event_id
//! ```
//!
//! so a run is addressed by `(master_seed, purpose, network_id, event_id)`
//! and does not depend on the order in which other runs were executed.
//! Derived draws are defined on raw `u64` outputs only:
//!
//! * `uniform`: `(x >> 11) * 2^-53`, a double in `[0, 1)`;
//! * `below(n)`: `(x * n) >> 64` computed in 128 bits;
//! * `shuffle`: Fisher-Yates from the last index down, `j = below(i + 1)`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// What a stream is used for. The discriminant is the `purpose` key word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    /// Free-standing use from a single user seed (CLI `generate`, tests).
    Direct = 0,
    /// Sampling a network's target degree sequence.
    Degrees = 1,
    /// Stub matching in the configuration model.
    Wiring = 2,
    /// Per-node subscription uniforms.
    Subscriptions = 3,
    /// Publisher choice and gossip coins of one event.
    Event = 4,
}

pub fn stream(master_seed: u64, purpose: Purpose, network_id: u64, event_id: u64) -> StreamRng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    key[16..24].copy_from_slice(&network_id.to_le_bytes());
    key[24..32].copy_from_slice(&event_id.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Stream for a single user-supplied seed.
pub fn seeded(seed: u64) -> StreamRng {
    stream(seed, Purpose::Direct, 0, 0)
}

#[inline]
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[inline]
pub fn bernoulli<R: RngCore + ?Sized>(rng: &mut R, p: f64) -> bool {
    uniform(rng) < p
}

/// Integer in `0..n`. `n` must be positive.
#[inline]
pub fn below<R: RngCore + ?Sized>(rng: &mut R, n: usize) -> usize {
    debug_assert!(n > 0);
    ((rng.next_u64() as u128 * n as u128) >> 64) as usize
}

pub fn shuffle<T, R: RngCore + ?Sized>(items: &mut [T], rng: &mut R) {
    for i in (1..items.len()).rev() {
        let j = below(rng, i + 1);
        items.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_addressed_by_key() {
        let a: Vec<u64> = (0..4).map(|_| stream(7, Purpose::Event, 3, 9).next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut x = stream(7, Purpose::Event, 3, 9);
        let mut y = stream(7, Purpose::Event, 3, 10);
        assert_ne!(x.next_u64(), y.next_u64());
        let mut z = stream(7, Purpose::Wiring, 3, 9);
        assert_ne!(stream(7, Purpose::Event, 3, 9).next_u64(), z.next_u64());
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut rng = seeded(1);
        for _ in 0..10_000 {
            let u = uniform(&mut rng);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn below_covers_range() {
        let mut rng = seeded(2);
        let mut seen = [0usize; 5];
        for _ in 0..5_000 {
            seen[below(&mut rng, 5)] += 1;
        }
        assert!(seen.iter().all(|&c| c > 800 && c < 1200), "{seen:?}");
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut v: Vec<u32> = (0..100).collect();
        shuffle(&mut v, &mut seeded(3));
        let mut sorted = v.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..100).collect::<Vec<_>>());
        assert_ne!(v, sorted);
    }
}

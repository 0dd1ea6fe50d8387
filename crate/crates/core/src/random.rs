//! Product-replacement pseudo-random elements.

use alloc::vec::Vec;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::{GeneratorSet, GroupElement};

pub const SLOTS: usize = 12;
pub const BURN_IN: usize = 60;

/// Seed for worker `index` derived from a master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = SplitMix64::seed_from_u64(master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.next_u64()
}

/// Uniform integer in `0..n` (n > 0).
pub(crate) fn below(rng: &mut SplitMix64, n: usize) -> usize {
    ((rng.next_u64() as u128 * n as u128) >> 64) as usize
}

/// Accumulator variant of product replacement: `r` slots seeded with the
/// generators, each step replaces a random slot by its product with another
/// slot (or its inverse) and multiplies the result into the accumulator.
/// Every emitted element is a word in the generators.
#[derive(Clone, Debug)]
pub struct RandomElementStream<E> {
    slots: Vec<E>,
    accumulator: E,
    seed: u64,
    rng: SplitMix64,
}

impl<E: GroupElement> RandomElementStream<E> {
    pub fn new(gens: &GeneratorSet<E>, seed: u64) -> Self {
        Self::with_params(gens, seed, SLOTS, BURN_IN)
    }

    pub fn with_params(gens: &GeneratorSet<E>, seed: u64, slots: usize, burn_in: usize) -> Self {
        let identity = gens.identity().clone();
        let slots = if gens.is_empty() {
            Vec::new()
        } else {
            let r = slots.max(gens.len()).max(2);
            (0..r).map(|i| gens.elements()[i % gens.len()].clone()).collect()
        };
        let mut s = Self { slots, accumulator: identity, seed, rng: SplitMix64::seed_from_u64(seed) };
        for _ in 0..burn_in {
            s.step();
        }
        s
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn step(&mut self) {
        let r = self.slots.len();
        if r == 0 {
            return;
        }
        let i = below(&mut self.rng, r);
        let mut j = below(&mut self.rng, r - 1);
        if j >= i {
            j += 1;
        }
        let flags = self.rng.next_u64();
        let other = if flags & 1 == 0 { self.slots[j].clone() } else { self.slots[j].inv() };
        self.slots[i] = if flags & 2 == 0 { self.slots[i].mul(&other) } else { other.mul(&self.slots[i]) };
        self.accumulator = self.accumulator.mul(&self.slots[i]);
    }

    /// Advances one step and returns the accumulator.
    pub fn next_element(&mut self) -> E {
        self.step();
        self.accumulator.clone()
    }
}

impl<E: GroupElement> Iterator for RandomElementStream<E> {
    type Item = E;

    fn next(&mut self) -> Option<E> {
        Some(self.next_element())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Permutation;
    use hashbrown::HashSet;

    fn s3() -> GeneratorSet<Permutation> {
        GeneratorSet::unlabelled(alloc::vec![
            Permutation::from_cycles(3, &[&[1, 2]]).unwrap(),
            Permutation::from_cycles(3, &[&[1, 2, 3]]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn equal_seeds_agree() {
        let a: Vec<_> = RandomElementStream::new(&s3(), 7).take(50).collect();
        let b: Vec<_> = RandomElementStream::new(&s3(), 7).take(50).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn covers_s3() {
        let seen: HashSet<_> = RandomElementStream::new(&s3(), 1).take(10_000).collect();
        assert_eq!(seen.len(), 6);
    }

    #[test]
    fn trivial_group_stream() {
        let g = GeneratorSet::trivial(Permutation::identity(4).unwrap());
        let mut s = RandomElementStream::new(&g, 3);
        assert!(s.next_element().is_identity());
    }
}

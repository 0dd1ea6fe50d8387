//! Exact finite group computations over small prime fields and permutation
//! domains.
//!
//! The crate is `no_std` (with `alloc`) unless the `std` feature is on. It
//! carries the algorithmic half of the triality verifier: dense GF(p) linear
//! algebra, permutations, a uniform [`GroupElement`] contract, randomized and
//! deterministic Schreier–Sims, orbit enumeration over conjugacy classes,
//! orbit–stabilizer and birthday-collision centralizers, and invariant
//! fingerprints of small subgroups.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod action;
pub mod bsgs;
mod error;
pub mod field;
pub mod forms;
pub mod generators;
pub mod group;
pub mod orbit;
pub mod perm;
pub mod random;
pub mod structure;
mod unionfind;
pub mod word;

pub use action::{Action, ConjugationAction, ElementKeyer, FullKey, PermAction, VectorAction};
pub use bsgs::{BaseImageConjugation, BsgsChain, BsgsOptions, SiftResult, VerifyMode};
pub use error::{Error, Result};
pub use field::{FieldMatrix, FieldScalar, FieldVector};
pub use forms::{solve_invariant_forms, BilinearForm, QuadraticForm};
pub use generators::GeneratorSet;
pub use group::{element_order, GroupElement, Key};
pub use orbit::{MemoryMode, OrbitIndex, OrbitPartition};
pub use perm::Permutation;
pub use random::RandomElementStream;
pub use structure::{ElementTable, FingerprintCatalog, StructureFingerprint};
pub use word::Word;

/// Greatest common divisor.
pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least common multiple; `lcm(0, n) = 0`.
pub fn lcm(a: u128, b: u128) -> u128 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Prime factorisation as `(prime, exponent)` pairs in increasing order.
pub fn factorize(mut n: u128) -> alloc::vec::Vec<(u128, u32)> {
    let mut out = alloc::vec::Vec::new();
    let mut p = 2u128;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Renders an integer in the `2^7.3^3` style used for factored orders.
pub fn factored(n: u128) -> alloc::string::String {
    use alloc::string::{String, ToString};
    if n == 1 {
        return "1".to_string();
    }
    let parts: alloc::vec::Vec<String> =
        factorize(n).into_iter().map(|(p, e)| if e == 1 { p.to_string() } else { alloc::format!("{p}^{e}") }).collect();
    parts.join(".")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factored_orders() {
        assert_eq!(factored(3456), "2^7.3^3");
        assert_eq!(factored(12), "2^2.3");
        assert_eq!(factored(3), "3");
        assert_eq!(factored(1), "1");
        assert_eq!(factored(174_182_400), "2^12.3^5.5^2.7");
    }

    #[test]
    fn lcm_gcd() {
        assert_eq!(lcm(4, 6), 12);
        assert_eq!(gcd(0, 5), 5);
        assert_eq!(lcm(0, 5), 0);
    }
}

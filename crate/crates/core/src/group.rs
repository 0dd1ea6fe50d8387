//! The element contract shared by matrices and permutations.

use alloc::boxed::Box;
use core::fmt::Debug;
use core::hash::Hash;

use crate::{Error, FieldMatrix, Permutation, Result};

/// Deterministic byte string identifying an element (or a point).
pub type Key = Box<[u8]>;

/// A finite group element with exact arithmetic.
///
/// `mul` and `inv` assume both operands come from the same ambient group
/// (same dimension and field, or same degree); [`GeneratorSet`] enforces
/// this on construction.
///
/// [`GeneratorSet`]: crate::GeneratorSet
pub trait GroupElement: Clone + Eq + Hash + Debug + Send + Sync {
    fn mul(&self, rhs: &Self) -> Self;
    fn inv(&self) -> Self;
    fn is_identity(&self) -> bool;
    /// The identity of the ambient group this element lives in.
    fn identity_like(&self) -> Self;
    /// Injective byte encoding of the element.
    fn canonical_key(&self) -> Key;
    /// Whether `self` and `other` live in the same ambient group.
    fn compatible(&self, other: &Self) -> bool;

    /// `self^-1 · self · g`, the conjugate `self^g` under the right action.
    fn conjugate_by(&self, g: &Self) -> Self {
        g.inv().mul(self).mul(g)
    }

    fn commutator(&self, g: &Self) -> Self {
        self.inv().mul(&g.inv()).mul(self).mul(g)
    }

    fn pow(&self, k: i64) -> Self {
        let mut base = if k < 0 { self.inv() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.identity_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Order by repeated multiplication, giving up after `cap` steps.
    fn order_with_cap(&self, cap: u64) -> Result<u64> {
        let mut acc = self.clone();
        for k in 1..=cap {
            if acc.is_identity() {
                return Ok(k);
            }
            acc = acc.mul(self);
        }
        Err(Error::OrderExceedsCap { cap })
    }
}

/// Least `k <= cap` with `g^k = 1`.
pub fn element_order<E: GroupElement>(g: &E, cap: u64) -> Result<u64> {
    if cap == 0 {
        return Err(Error::OrderExceedsCap { cap });
    }
    g.order_with_cap(cap)
}

impl GroupElement for FieldMatrix {
    fn mul(&self, rhs: &Self) -> Self {
        self.mul_unchecked(rhs)
    }

    fn inv(&self) -> Self {
        self.inverse().expect("group elements are invertible")
    }

    fn is_identity(&self) -> bool {
        FieldMatrix::is_identity(self)
    }

    fn identity_like(&self) -> Self {
        FieldMatrix::identity(self.characteristic(), self.dim()).expect("valid shape")
    }

    fn canonical_key(&self) -> Key {
        self.key_bytes().into()
    }

    fn compatible(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.characteristic() == other.characteristic()
    }
}

impl GroupElement for Permutation {
    fn mul(&self, rhs: &Self) -> Self {
        self.then(rhs)
    }

    fn inv(&self) -> Self {
        self.inverse()
    }

    fn is_identity(&self) -> bool {
        Permutation::is_identity(self)
    }

    fn identity_like(&self) -> Self {
        Permutation::identity(self.degree()).expect("valid degree")
    }

    fn canonical_key(&self) -> Key {
        self.raw().iter().flat_map(|x| x.to_le_bytes()).collect()
    }

    fn compatible(&self, other: &Self) -> bool {
        self.degree() == other.degree()
    }

    fn conjugate_by(&self, g: &Self) -> Self {
        // i^(g^-1 a g) = g(a(g^-1(i))), i.e. g(i) -> g(a(i))
        let mut images = alloc::vec![0usize; self.degree()];
        for i in 0..self.degree() {
            images[g.image(i)] = g.image(self.image(i));
        }
        Permutation::from_images(&images).expect("conjugate is a bijection")
    }

    fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        Permutation::pow(&base, k.unsigned_abs())
    }

    fn order_with_cap(&self, cap: u64) -> Result<u64> {
        let o = self.order();
        if o > cap as u128 {
            Err(Error::OrderExceedsCap { cap })
        } else {
            Ok(o as u64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_of_identity_and_cap() {
        let i = FieldMatrix::identity(2, 4).unwrap();
        assert_eq!(element_order(&i, 1).unwrap(), 1);
        let a = FieldMatrix::parse_literals("11\n.1\n", 3).unwrap().remove(0);
        assert_eq!(element_order(&a, 10).unwrap(), 3);
        assert_eq!(element_order(&a, 2), Err(Error::OrderExceedsCap { cap: 2 }));
        let p = Permutation::from_cycles(5, &[&[1, 2, 3], &[4, 5]]).unwrap();
        assert_eq!(element_order(&p, 6).unwrap(), 6);
        assert!(element_order(&p, 5).is_err());
    }

    #[test]
    fn perm_conjugation_matches_generic() {
        let a = Permutation::from_cycles(6, &[&[1, 2, 3], &[5, 6]]).unwrap();
        let g = Permutation::from_cycles(6, &[&[1, 4, 6, 2]]).unwrap();
        assert_eq!(a.conjugate_by(&g), g.inv().mul(&a).mul(&g));
    }

    #[test]
    fn negative_powers() {
        let a = Permutation::from_cycles(4, &[&[1, 2, 3, 4]]).unwrap();
        assert_eq!(GroupElement::pow(&a, -1), a.inverse());
        let m = FieldMatrix::parse_literals("11\n.1\n", 3).unwrap().remove(0);
        assert!(GroupElement::pow(&m, -1).mul(&m).is_identity());
    }
}

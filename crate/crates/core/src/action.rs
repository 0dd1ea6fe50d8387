//! Group actions: permutations on points, matrices on row vectors, and any
//! element type on itself by conjugation.

use alloc::vec::Vec;
use core::fmt::Debug;
use core::hash::Hash;

use crate::{FieldMatrix, FieldVector, GroupElement, Key, Permutation};

/// A right action `p ↦ p^g`; `apply(gh, p) = apply(h, apply(g, p))`.
pub trait Action<E: GroupElement>: Sync {
    type Point: Clone + Eq + Hash + Debug + Send + Sync;

    fn apply(&self, g: &E, p: &Self::Point) -> Self::Point;

    /// Same as [`Action::apply`] for callers that already hold `g^-1`.
    fn apply_with_inverse(&self, g: &E, _g_inv: &E, p: &Self::Point) -> Self::Point {
        self.apply(g, p)
    }

    /// Injective encoding of points, used for hashing large orbits.
    fn key(&self, p: &Self::Point) -> Key;

    /// `key(apply(g, p))`, possibly without forming the image.
    fn image_key(&self, g: &E, g_inv: &E, p: &Self::Point) -> Key {
        self.key(&self.apply_with_inverse(g, g_inv, p))
    }

    /// Points on which the ambient group of `sample` acts faithfully: the
    /// identity is the only element fixing every one of them. Empty when the
    /// action cannot supply base points.
    fn base_candidates(&self, sample: &E) -> Vec<Self::Point>;
}

/// Natural action of permutations on 0-based points.
#[derive(Clone, Copy, Debug, Default)]
pub struct PermAction;

impl Action<Permutation> for PermAction {
    type Point = u32;

    #[inline]
    fn apply(&self, g: &Permutation, p: &u32) -> u32 {
        g.image(*p as usize) as u32
    }

    fn key(&self, p: &u32) -> Key {
        (*p as u16).to_le_bytes().into()
    }

    fn base_candidates(&self, sample: &Permutation) -> Vec<u32> {
        (0..sample.degree() as u32).collect()
    }
}

/// Matrices acting on row vectors from the right.
///
/// By default the base candidates are the standard basis vectors; a
/// restricted candidate list is useful when only part of the module should
/// carry base points.
#[derive(Clone, Debug, Default)]
pub struct VectorAction {
    candidates: Option<Vec<FieldVector>>,
}

impl VectorAction {
    pub fn new() -> Self {
        Self { candidates: None }
    }

    pub fn with_candidates(candidates: Vec<FieldVector>) -> Self {
        Self { candidates: Some(candidates) }
    }
}

impl Action<FieldMatrix> for VectorAction {
    type Point = FieldVector;

    #[inline]
    fn apply(&self, g: &FieldMatrix, p: &FieldVector) -> FieldVector {
        p.times_unchecked(g)
    }

    fn key(&self, p: &FieldVector) -> Key {
        match p.bits() {
            Some(b) => b.to_le_bytes()[..p.len().div_ceil(8)].into(),
            None => p.entries().into(),
        }
    }

    fn base_candidates(&self, sample: &FieldMatrix) -> Vec<FieldVector> {
        match &self.candidates {
            Some(c) => c.clone(),
            None => (0..sample.dim())
                .map(|i| FieldVector::unit(sample.characteristic(), sample.dim(), i).expect("valid shape"))
                .collect(),
        }
    }
}

/// Injective keys for group elements.
pub trait ElementKeyer<E>: Sync {
    fn key(&self, e: &E) -> Key;

    /// Key of `g^-1 · e · g`.
    fn conjugate_key(&self, e: &E, g: &E, g_inv: &E) -> Key
    where
        E: GroupElement,
    {
        self.key(&g_inv.mul(e).mul(g))
    }
}

/// Keys elements by their full canonical encoding.
#[derive(Clone, Copy, Debug, Default)]
pub struct FullKey;

impl<E: GroupElement> ElementKeyer<E> for FullKey {
    fn key(&self, e: &E) -> Key {
        e.canonical_key()
    }
}

/// Keys elements by the images of a base of the ambient group, which is
/// injective on that group (but not beyond it).
#[derive(Clone, Debug)]
pub struct BaseImageKey<A, P> {
    action: A,
    base: Vec<P>,
}

impl<A, P> BaseImageKey<A, P> {
    pub fn new(action: A, base: Vec<P>) -> Self {
        Self { action, base }
    }

    pub fn base(&self) -> &[P] {
        &self.base
    }
}

impl<E, A> ElementKeyer<E> for BaseImageKey<A, A::Point>
where
    E: GroupElement,
    A: Action<E>,
{
    fn key(&self, e: &E) -> Key {
        let mut out = Vec::new();
        for b in &self.base {
            out.extend_from_slice(&self.action.key(&self.action.apply(e, b)));
        }
        out.into()
    }

    fn conjugate_key(&self, e: &E, g: &E, g_inv: &E) -> Key {
        let mut out = Vec::new();
        for b in &self.base {
            let p = self.action.apply(g_inv, b);
            let p = self.action.apply(e, &p);
            let p = self.action.apply(g, &p);
            out.extend_from_slice(&self.action.key(&p));
        }
        out.into()
    }
}

/// Conjugation `p ↦ g^-1 p g` of a group on its own elements.
#[derive(Clone, Debug)]
pub struct ConjugationAction<K> {
    keyer: K,
}

impl<K> ConjugationAction<K> {
    pub fn new(keyer: K) -> Self {
        Self { keyer }
    }

    pub fn keyer(&self) -> &K {
        &self.keyer
    }
}

impl<E: GroupElement, K: ElementKeyer<E>> Action<E> for ConjugationAction<K> {
    type Point = E;

    fn apply(&self, g: &E, p: &E) -> E {
        p.conjugate_by(g)
    }

    fn apply_with_inverse(&self, g: &E, g_inv: &E, p: &E) -> E {
        g_inv.mul(p).mul(g)
    }

    fn key(&self, p: &E) -> Key {
        self.keyer.key(p)
    }

    fn image_key(&self, g: &E, g_inv: &E, p: &E) -> Key {
        self.keyer.conjugate_key(p, g, g_inv)
    }

    fn base_candidates(&self, _sample: &E) -> Vec<E> {
        Vec::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perm_action_is_right_action() {
        let g = Permutation::from_cycles(4, &[&[1, 2, 3]]).unwrap();
        let h = Permutation::from_cycles(4, &[&[3, 4]]).unwrap();
        for p in 0..4u32 {
            assert_eq!(PermAction.apply(&g.mul(&h), &p), PermAction.apply(&h, &PermAction.apply(&g, &p)));
        }
    }

    #[test]
    fn conjugation_identity_fixes() {
        let g = Permutation::from_cycles(4, &[&[1, 2, 3]]).unwrap();
        let id = Permutation::identity(4).unwrap();
        let act = ConjugationAction::new(FullKey);
        assert_eq!(act.apply(&id, &g), g);
        let base = BaseImageKey::new(PermAction, (0..4).collect());
        let h = Permutation::from_cycles(4, &[&[1, 4]]).unwrap();
        assert_eq!(
            ElementKeyer::<Permutation>::conjugate_key(&base, &g, &h, &h.inv()),
            ElementKeyer::<Permutation>::key(&base, &g.conjugate_by(&h))
        );
    }

    #[test]
    fn vector_action_composes() {
        let a = FieldMatrix::parse_literals("11.\n.11\n..1\n", 2).unwrap().remove(0);
        let b = FieldMatrix::parse_literals("1..\n11.\n.11\n", 2).unwrap().remove(0);
        for v in FieldVector::all(2, 3).unwrap() {
            let act = VectorAction::new();
            assert_eq!(act.apply(&a.mul(&b), &v), act.apply(&b, &act.apply(&a, &v)));
        }
    }
}

//! Permutations of `{1..n}` stored as 0-based `u16` image tables.
//!
//! Composition is left to right: `a.then(b)` maps `i` to `b(a(i))`, matching
//! the right action used for matrices.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Largest supported degree.
pub const MAX_DEGREE: usize = 1 << 16;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Box<[u16]>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(degree));
        }
        Ok(Self { images: (0..degree).map(|i| i as u16).collect() })
    }

    /// Builds from 0-based images, checking bijectivity.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        if n == 0 || n > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(n));
        }
        let mut seen = vec![false; n];
        for &im in images {
            if im >= n {
                return Err(Error::PointOutOfRange { point: im + 1, degree: n });
            }
            if core::mem::replace(&mut seen[im], true) {
                return Err(Error::NotABijection { image: im + 1 });
            }
        }
        Ok(Self { images: images.iter().map(|&i| i as u16).collect() })
    }

    /// Builds from 1-based images as they appear in data files.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut zero = Vec::with_capacity(n);
        for &im in images {
            if im == 0 || im > n {
                return Err(Error::PointOutOfRange { point: im, degree: n });
            }
            zero.push(im - 1);
        }
        Self::from_images(&zero)
    }

    /// Builds from disjoint cycles written with 1-based points.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (k, &pt) in cycle.iter().enumerate() {
                if pt == 0 || pt > degree {
                    return Err(Error::PointOutOfRange { point: pt, degree });
                }
                if core::mem::replace(&mut touched[pt - 1], true) {
                    return Err(Error::NotABijection { image: pt });
                }
                images[pt - 1] = cycle[(k + 1) % cycle.len()] - 1;
            }
        }
        Self::from_images(&images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of the 0-based point `i`.
    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub(crate) fn raw(&self) -> &[u16] {
        &self.images
    }

    /// 1-based images.
    pub fn one_based_images(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i as usize + 1).collect()
    }

    /// `self` followed by `other`.
    pub fn try_then(&self, other: &Self) -> Result<Self> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch { left: self.degree(), right: other.degree() });
        }
        Ok(self.then(other))
    }

    pub(crate) fn then(&self, other: &Self) -> Self {
        let b = &other.images;
        let images: Box<[u16]> = self.images.iter().map(|&i| b[i as usize]).collect();
        debug_assert!(is_bijection(&images));
        Self { images }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u16; self.degree()];
        for (i, &im) in self.images.iter().enumerate() {
            inv[im as usize] = i as u16;
        }
        Self { images: inv.into() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &im)| i == im as usize)
    }

    /// Cycle lengths including fixed points, largest first.
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i] as usize;
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    /// Order as the lcm of the cycle lengths.
    pub fn order(&self) -> u128 {
        self.cycle_type().into_iter().fold(1u128, |acc, l| crate::lcm(acc, l as u128))
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self { images: (0..self.degree()).map(|i| i as u16).collect() };
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            k >>= 1;
        }
        acc
    }

    /// Points moved by the permutation (0-based).
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.images.iter().enumerate().filter(|(i, &im)| *i != im as usize).map(|(i, _)| i)
    }
}

fn is_bijection(images: &[u16]) -> bool {
    let mut seen = vec![false; images.len()];
    images.iter().all(|&i| !core::mem::replace(&mut seen[i as usize], true))
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]{}", self.degree(), self)
    }
}

/// Cycle notation with 1-based points; the identity prints as `()`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut any = false;
        for start in 0..n {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            any = true;
            f.write_str("(")?;
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{}", i + 1)?;
                first = false;
                i = self.images[i] as usize;
            }
            f.write_str(")")?;
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_composition() {
        let a = Permutation::from_cycles(3, &[&[1, 2]]).unwrap();
        let b = Permutation::from_cycles(3, &[&[2, 3]]).unwrap();
        // 1 -> 2 -> 3, 3 -> 3 -> 2, 2 -> 1 -> 1
        assert_eq!(a.try_then(&b).unwrap(), Permutation::from_cycles(3, &[&[1, 3, 2]]).unwrap());
    }

    #[test]
    fn inverse_cancels() {
        let a = Permutation::from_cycles(6, &[&[1, 4, 2], &[3, 6]]).unwrap();
        assert!(a.then(&a.inverse()).is_identity());
    }

    #[test]
    fn orders_and_cycle_types() {
        let id = Permutation::identity(5).unwrap();
        assert_eq!(id.order(), 1);
        assert_eq!(id.cycle_type(), vec![1, 1, 1, 1, 1]);
        let a = Permutation::from_cycles(5, &[&[1, 2, 3], &[4, 5]]).unwrap();
        assert_eq!(a.order(), 6);
        assert_eq!(a.cycle_type(), vec![3, 2]);
        assert!(a.pow(6).is_identity());
        assert!(!a.pow(3).is_identity());
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(Permutation::from_one_based(&[1, 1, 2]), Err(Error::NotABijection { image: 1 }));
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
        let a = Permutation::identity(3).unwrap();
        let b = Permutation::identity(4).unwrap();
        assert!(matches!(a.try_then(&b), Err(Error::DegreeMismatch { .. })));
    }

    #[test]
    fn display_cycles() {
        let a = Permutation::from_cycles(5, &[&[1, 2, 3], &[4, 5]]).unwrap();
        assert_eq!(a.to_string(), "(1 2 3)(4 5)");
        assert_eq!(Permutation::identity(2).unwrap().to_string(), "()");
    }
}

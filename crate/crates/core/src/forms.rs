//! Invariant bilinear and quadratic forms of a matrix group.
//!
//! A quadratic form `Q(v) = Σ_{i≤j} c_ij v_i v_j` is determined by its values
//! on the basis vectors `e_k` and the sums `e_k + e_l`, so `Q∘g = Q` is a
//! linear system in the `n(n+1)/2` coefficients with one equation per such
//! test vector and generator.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, FieldMatrix, FieldVector, Result};

/// Symmetric bilinear form `B(u, v) = u·G·vᵀ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearForm {
    gram: FieldMatrix,
}

impl BilinearForm {
    pub fn new(gram: FieldMatrix) -> Self {
        Self { gram }
    }

    pub fn gram(&self) -> &FieldMatrix {
        &self.gram
    }

    pub fn is_symmetric(&self) -> bool {
        self.gram.transpose() == self.gram
    }

    pub fn evaluate(&self, u: &FieldVector, v: &FieldVector) -> Result<u8> {
        u.times(&self.gram)?.dot(v)
    }

    /// Whether `g·G·gᵀ = G`.
    pub fn preserved_by(&self, g: &FieldMatrix) -> Result<bool> {
        Ok(g.try_mul(&self.gram)?.try_mul(&g.transpose())? == self.gram)
    }
}

/// Quadratic form stored by its upper-triangular coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    p: u8,
    n: usize,
    /// Row-major `c_ij` for `i ≤ j`.
    coefficients: Vec<u8>,
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i..n).map(move |j| (i, j)))
}

impl QuadraticForm {
    /// Builds `Q` from coefficients listed in [`QuadraticForm::pairs`] order.
    pub fn from_coefficients(p: u8, n: usize, coefficients: Vec<u8>) -> Result<Self> {
        FieldMatrix::zero(p, n)?;
        if coefficients.len() != n * (n + 1) / 2 {
            return Err(Error::DimensionMismatch { left: n * (n + 1) / 2, right: coefficients.len() });
        }
        let coefficients = coefficients.into_iter().map(|c| c % p).collect();
        Ok(Self { p, n, coefficients })
    }

    /// Index pairs `(i, j)`, `i ≤ j`, in coefficient order.
    pub fn pairs(n: usize) -> Vec<(usize, usize)> {
        pairs(n).collect()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn characteristic(&self) -> u8 {
        self.p
    }

    pub fn coefficient(&self, i: usize, j: usize) -> u8 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.coefficients[i * self.n - i * (i + 1) / 2 + j]
    }

    pub fn evaluate(&self, v: &FieldVector) -> Result<u8> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: v.len() });
        }
        let p = self.p as u32;
        let x = v.entries();
        let mut acc = 0u32;
        for ((i, j), &c) in pairs(self.n).zip(&self.coefficients) {
            acc = (acc + c as u32 * x[i] as u32 * x[j] as u32) % p;
        }
        Ok(acc as u8)
    }

    /// The bilinear form `B(u,v) = Q(u+v) − Q(u) − Q(v)`.
    pub fn polarization(&self) -> BilinearForm {
        let gram = FieldMatrix::from_fn(self.p, self.n, |i, j| {
            let c = self.coefficient(i, j) as i64;
            if i == j {
                2 * c
            } else {
                c
            }
        })
        .expect("valid shape");
        BilinearForm { gram }
    }

    /// Whether `Q(v·g) = Q(v)` for all `v`, checked on the determining vectors.
    pub fn preserved_by(&self, g: &FieldMatrix) -> Result<bool> {
        for v in test_vectors(self.p, self.n)? {
            if self.evaluate(&v.times(g)?)? != self.evaluate(&v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Number of nonzero `v` with `Q(v) = 0`, by exhaustive enumeration.
    pub fn singular_vector_count(&self) -> Result<u64> {
        if (self.p as u64).checked_pow(self.n as u32).is_none_or(|size| size > 1 << 24) {
            return Err(Error::UnsupportedDimension(self.n));
        }
        let mut count = 0;
        for v in FieldVector::all(self.p, self.n)?.skip(1) {
            if self.evaluate(&v)? == 0 {
                count += 1;
            }
        }
        Ok(count)
    }
}

fn test_vectors(p: u8, n: usize) -> Result<Vec<FieldVector>> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for (i, j) in pairs(n) {
        let mut e = vec![0i64; n];
        e[i] = 1;
        e[j] = 1;
        out.push(FieldVector::from_entries(p, &e)?);
    }
    Ok(out)
}

fn inv_mod(a: u8, p: u8) -> u8 {
    (1..p).find(|&b| (a as u16 * b as u16) % p as u16 == 1).expect("nonzero residue")
}

/// Basis of `{x : A x = 0}` over GF(p), as vectors of length `cols`.
fn nullspace(mut rows: Vec<Vec<u8>>, cols: usize, p: u8) -> Vec<Vec<u8>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..rows.len()).find(|&k| rows[k][c] != 0) else { continue };
        rows.swap(r, k);
        let s = inv_mod(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = (*x as u16 * s as u16 % p as u16) as u8;
        }
        for k in 0..rows.len() {
            let f = rows[k][c];
            if k != r && f != 0 {
                for j in 0..cols {
                    let sub = f as u16 * rows[r][j] as u16 % p as u16;
                    rows[k][j] = ((rows[k][j] as u16 + p as u16 - sub) % p as u16) as u8;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![0u8; cols];
            x[f] = 1;
            for (k, &c) in pivots.iter().enumerate() {
                x[c] = (p - rows[k][f]) % p;
            }
            x
        })
        .collect()
}

/// The unique (up to the solution space being one-dimensional) quadratic
/// form preserved by every generator, together with its polarization.
pub fn solve_invariant_forms(gens: &[FieldMatrix]) -> Result<(BilinearForm, QuadraticForm)> {
    let first = gens.first().ok_or(Error::EmptyGenerators)?;
    let (p, n) = (first.characteristic(), first.dim());
    for g in gens {
        if g.characteristic() != p {
            return Err(Error::CharacteristicMismatch { left: p, right: g.characteristic() });
        }
        if g.dim() != n {
            return Err(Error::DimensionMismatch { left: n, right: g.dim() });
        }
        g.inverse()?;
    }
    let idx = QuadraticForm::pairs(n);
    let tests = test_vectors(p, n)?;
    let mut rows = Vec::with_capacity(gens.len() * tests.len());
    for g in gens {
        for v in &tests {
            let w = v.times(g)?.entries();
            let v = v.entries();
            rows.push(
                idx.iter()
                    .map(|&(i, j)| {
                        let a = (w[i] as u16 * w[j] as u16) % p as u16;
                        let b = (v[i] as u16 * v[j] as u16) % p as u16;
                        ((a + p as u16 - b) % p as u16) as u8
                    })
                    .collect(),
            );
        }
    }
    let mut basis = nullspace(rows, idx.len(), p);
    match basis.len() {
        0 => Err(Error::NoInvariantForm),
        1 => {
            let q = QuadraticForm::from_coefficients(p, n, basis.remove(0))?;
            Ok((q.polarization(), q))
        }
        _ => Err(Error::AmbiguousForm { basis }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Hyperbolic form `x0 x1 + x2 x3 + ...`.
    fn hyperbolic(n: usize) -> QuadraticForm {
        let c = QuadraticForm::pairs(n).iter().map(|&(i, j)| (i % 2 == 0 && j == i + 1) as u8).collect();
        QuadraticForm::from_coefficients(2, n, c).unwrap()
    }

    #[test]
    fn identity_is_ambiguous() {
        let i = FieldMatrix::identity(2, 8).unwrap();
        match solve_invariant_forms(&[i]) {
            Err(Error::AmbiguousForm { basis }) => assert_eq!(basis.len(), 36),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hyperbolic_counts() {
        assert_eq!(hyperbolic(8).singular_vector_count().unwrap(), 135);
        assert_eq!(hyperbolic(2).singular_vector_count().unwrap(), 2);
        let b = hyperbolic(4).polarization();
        assert!(b.is_symmetric());
    }

    #[test]
    fn recovers_form_of_o4_plus() {
        let q = hyperbolic(4);
        let isometries: Vec<FieldMatrix> = (0u64..1 << 16)
            .filter_map(|bits| {
                let m = FieldMatrix::from_fn(2, 4, |i, j| (bits >> (4 * i + j) & 1) as i64).unwrap();
                (m.rank() == 4 && q.preserved_by(&m).unwrap()).then_some(m)
            })
            .collect();
        assert_eq!(isometries.len(), 72);
        let (b, found) = solve_invariant_forms(&isometries).unwrap();
        assert_eq!(found, q);
        for g in &isometries {
            assert!(b.preserved_by(g).unwrap());
        }
    }

    #[test]
    fn no_form_for_full_linear_group() {
        // GL(2,2) permutes the three nonzero vectors transitively: no invariant Q
        // with polarization nonzero, and the only invariant Q is x0^2+x0x1+x1^2.
        let a = FieldMatrix::parse_literals("11\n.1\n", 2).unwrap().remove(0);
        let b = FieldMatrix::parse_literals(".1\n1.\n", 2).unwrap().remove(0);
        let (_, q) = solve_invariant_forms(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(q.singular_vector_count().unwrap(), 0);
        let c = FieldMatrix::parse_literals("1.\n.1\n", 3).unwrap().remove(0);
        assert!(matches!(solve_invariant_forms(&[a, c]), Err(Error::CharacteristicMismatch { .. })));
    }
}

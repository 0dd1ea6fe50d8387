//! Dense linear algebra over small prime fields.
//!
//! Vectors are row vectors and matrices act on the right (`v ↦ v·M`). Over
//! GF(2) each row is packed into one `u64`, bit `j` holding column `j`; other
//! characteristics store one byte per entry. Dimensions are limited to
//! `1..=64`.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

fn check_prime(p: u8) -> Result<()> {
    let prime = p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d));
    if prime {
        Ok(())
    } else {
        Err(Error::UnsupportedField(p))
    }
}

fn check_dim(n: usize) -> Result<()> {
    if (1..=64).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

fn inv_mod(a: u8, p: u8) -> Option<u8> {
    if a.is_multiple_of(p) {
        return None;
    }
    (1..p).find(|&b| (a as u16 * b as u16) % p as u16 == 1)
}

/// An element of GF(p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldScalar {
    value: u8,
    p: u8,
}

impl FieldScalar {
    pub fn new(value: i64, p: u8) -> Result<Self> {
        check_prime(p)?;
        Ok(Self { value: value.rem_euclid(p as i64) as u8, p })
    }

    pub fn value(self) -> u8 {
        self.value
    }

    pub fn characteristic(self) -> u8 {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        Self { value: ((self.value as u16 + rhs.value as u16) % self.p as u16) as u8, p: self.p }
    }

    pub fn sub(self, rhs: Self) -> Self {
        self.add(rhs.neg())
    }

    pub fn neg(self) -> Self {
        Self { value: (self.p - self.value) % self.p, p: self.p }
    }

    pub fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        Self { value: ((self.value as u16 * rhs.value as u16) % self.p as u16) as u8, p: self.p }
    }

    pub fn inv(self) -> Option<Self> {
        inv_mod(self.value, self.p).map(|value| Self { value, p: self.p })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum VecEntries {
    Packed(u64),
    Dense(Box<[u8]>),
}

/// A row vector over GF(p) of length `1..=64`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldVector {
    p: u8,
    len: u8,
    entries: VecEntries,
}

impl FieldVector {
    pub fn zero(p: u8, len: usize) -> Result<Self> {
        check_prime(p)?;
        check_dim(len)?;
        let entries = if p == 2 { VecEntries::Packed(0) } else { VecEntries::Dense(vec![0; len].into()) };
        Ok(Self { p, len: len as u8, entries })
    }

    pub fn from_entries(p: u8, values: &[i64]) -> Result<Self> {
        let mut v = Self::zero(p, values.len())?;
        for (i, &x) in values.iter().enumerate() {
            v.set(i, x.rem_euclid(p as i64) as u8);
        }
        Ok(v)
    }

    /// The `i`-th standard basis vector.
    pub fn unit(p: u8, len: usize, i: usize) -> Result<Self> {
        let mut v = Self::zero(p, len)?;
        if i >= len {
            return Err(Error::DimensionMismatch { left: i, right: len });
        }
        v.set(i, 1);
        Ok(v)
    }

    /// GF(2) vector from a bit mask (bit `j` is coordinate `j`).
    pub fn from_bits(len: usize, bits: u64) -> Result<Self> {
        check_dim(len)?;
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        Ok(Self { p: 2, len: len as u8, entries: VecEntries::Packed(bits & mask) })
    }

    /// Bit mask of a GF(2) vector.
    pub fn bits(&self) -> Option<u64> {
        match self.entries {
            VecEntries::Packed(b) => Some(b),
            VecEntries::Dense(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn characteristic(&self) -> u8 {
        self.p
    }

    pub fn get(&self, i: usize) -> u8 {
        match &self.entries {
            VecEntries::Packed(b) => ((b >> i) & 1) as u8,
            VecEntries::Dense(d) => d[i],
        }
    }

    fn set(&mut self, i: usize, x: u8) {
        match &mut self.entries {
            VecEntries::Packed(b) => {
                if x & 1 == 1 {
                    *b |= 1 << i
                } else {
                    *b &= !(1 << i)
                }
            }
            VecEntries::Dense(d) => d[i] = x % self.p,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.entries {
            VecEntries::Packed(b) => *b == 0,
            VecEntries::Dense(d) => d.iter().all(|&x| x == 0),
        }
    }

    pub fn entries(&self) -> Vec<u8> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.compatible(rhs)?;
        Ok(match (&self.entries, &rhs.entries) {
            (VecEntries::Packed(a), VecEntries::Packed(b)) => {
                Self { p: 2, len: self.len, entries: VecEntries::Packed(a ^ b) }
            }
            (VecEntries::Dense(a), VecEntries::Dense(b)) => {
                let p = self.p as u16;
                let d: Box<[u8]> = a.iter().zip(b.iter()).map(|(&x, &y)| ((x as u16 + y as u16) % p) as u8).collect();
                Self { p: self.p, len: self.len, entries: VecEntries::Dense(d) }
            }
            _ => unreachable!(),
        })
    }

    /// Standard dot product.
    pub fn dot(&self, rhs: &Self) -> Result<u8> {
        self.compatible(rhs)?;
        Ok(match (&self.entries, &rhs.entries) {
            (VecEntries::Packed(a), VecEntries::Packed(b)) => ((a & b).count_ones() & 1) as u8,
            (VecEntries::Dense(a), VecEntries::Dense(b)) => {
                (a.iter().zip(b.iter()).map(|(&x, &y)| x as u32 * y as u32).sum::<u32>() % self.p as u32) as u8
            }
            _ => unreachable!(),
        })
    }

    fn compatible(&self, rhs: &Self) -> Result<()> {
        if self.p != rhs.p {
            return Err(Error::CharacteristicMismatch { left: self.p, right: rhs.p });
        }
        if self.len != rhs.len {
            return Err(Error::DimensionMismatch { left: self.len(), right: rhs.len() });
        }
        Ok(())
    }

    /// Image `v·m` of this row vector.
    pub fn times(&self, m: &FieldMatrix) -> Result<Self> {
        if self.p != m.p {
            return Err(Error::CharacteristicMismatch { left: self.p, right: m.p });
        }
        if self.len != m.dim {
            return Err(Error::DimensionMismatch { left: self.len(), right: m.dim() });
        }
        Ok(self.times_unchecked(m))
    }

    pub(crate) fn times_unchecked(&self, m: &FieldMatrix) -> Self {
        match (&self.entries, &m.rows) {
            (VecEntries::Packed(v), Rows::Packed(rows)) => {
                Self { p: 2, len: self.len, entries: VecEntries::Packed(xor_rows(*v, rows)) }
            }
            (VecEntries::Dense(v), Rows::Dense(a)) => {
                let n = self.len();
                let p = self.p as u32;
                let mut out = vec![0u32; n];
                for (i, &x) in v.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (j, o) in out.iter_mut().enumerate() {
                        *o += x as u32 * a[i * n + j] as u32;
                    }
                }
                let d: Box<[u8]> = out.into_iter().map(|x| (x % p) as u8).collect();
                Self { p: self.p, len: self.len, entries: VecEntries::Dense(d) }
            }
            _ => unreachable!(),
        }
    }

    /// Enumerates all `p^len` vectors (use only for small spaces).
    pub fn all(p: u8, len: usize) -> Result<impl Iterator<Item = FieldVector>> {
        let zero = Self::zero(p, len)?;
        let total = (p as u64).checked_pow(len as u32).ok_or(Error::UnsupportedDimension(len))?;
        Ok((0..total).map(move |mut k| {
            let mut v = zero.clone();
            for i in 0..len {
                v.set(i, (k % p as u64) as u8);
                k /= p as u64;
            }
            v
        }))
    }
}

impl fmt::Display for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            let x = self.get(i);
            if x == 0 {
                f.write_str(".")?;
            } else {
                write!(f, "{x}")?;
            }
        }
        Ok(())
    }
}

#[inline]
fn xor_rows(mut v: u64, rows: &[u64]) -> u64 {
    let mut acc = 0;
    while v != 0 {
        let i = v.trailing_zeros() as usize;
        acc ^= rows[i];
        v &= v - 1;
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Rows {
    Packed(Box<[u64]>),
    Dense(Box<[u8]>),
}

/// Square matrix over GF(p).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    p: u8,
    dim: u8,
    rows: Rows,
}

impl FieldMatrix {
    pub fn from_fn(p: u8, n: usize, mut f: impl FnMut(usize, usize) -> i64) -> Result<Self> {
        check_prime(p)?;
        check_dim(n)?;
        let rows = if p == 2 {
            let r: Box<[u64]> =
                (0..n).map(|i| (0..n).fold(0u64, |acc, j| acc | (((f(i, j).rem_euclid(2)) as u64) << j))).collect();
            Rows::Packed(r)
        } else {
            let mut d = vec![0u8; n * n];
            for i in 0..n {
                for j in 0..n {
                    d[i * n + j] = f(i, j).rem_euclid(p as i64) as u8;
                }
            }
            Rows::Dense(d.into())
        };
        Ok(Self { p, dim: n as u8, rows })
    }

    pub fn identity(p: u8, n: usize) -> Result<Self> {
        Self::from_fn(p, n, |i, j| (i == j) as i64)
    }

    pub fn zero(p: u8, n: usize) -> Result<Self> {
        Self::from_fn(p, n, |_, _| 0)
    }

    pub fn from_rows(p: u8, rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { left: bad.len(), right: n });
        }
        Self::from_fn(p, n, |i, j| rows[i][j])
    }

    /// Block-diagonal matrix with the given square blocks.
    pub fn block_diagonal(blocks: &[&FieldMatrix]) -> Result<Self> {
        let first = blocks.first().ok_or(Error::UnsupportedDimension(0))?;
        let p = first.p;
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut n = 0;
        for b in blocks {
            if b.p != p {
                return Err(Error::CharacteristicMismatch { left: p, right: b.p });
            }
            offsets.push(n);
            n += b.dim();
        }
        Self::from_fn(p, n, |i, j| {
            for (b, &o) in blocks.iter().zip(&offsets) {
                if (o..o + b.dim()).contains(&i) {
                    return if (o..o + b.dim()).contains(&j) { b.get(i - o, j - o) as i64 } else { 0 };
                }
            }
            0
        })
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn characteristic(&self) -> u8 {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        match &self.rows {
            Rows::Packed(r) => ((r[i] >> j) & 1) as u8,
            Rows::Dense(d) => d[i * self.dim() + j],
        }
    }

    pub fn row(&self, i: usize) -> FieldVector {
        match &self.rows {
            Rows::Packed(r) => FieldVector { p: 2, len: self.dim, entries: VecEntries::Packed(r[i]) },
            Rows::Dense(d) => {
                let n = self.dim();
                FieldVector { p: self.p, len: self.dim, entries: VecEntries::Dense(d[i * n..(i + 1) * n].into()) }
            }
        }
    }

    fn compatible(&self, rhs: &Self) -> Result<()> {
        if self.p != rhs.p {
            return Err(Error::CharacteristicMismatch { left: self.p, right: rhs.p });
        }
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch { left: self.dim(), right: rhs.dim() });
        }
        Ok(())
    }

    /// Exact product `self · rhs`.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.compatible(rhs)?;
        Ok(self.mul_unchecked(rhs))
    }

    pub(crate) fn mul_unchecked(&self, rhs: &Self) -> Self {
        let rows = match (&self.rows, &rhs.rows) {
            (Rows::Packed(a), Rows::Packed(b)) => Rows::Packed(a.iter().map(|&r| xor_rows(r, b)).collect()),
            (Rows::Dense(a), Rows::Dense(b)) => {
                let n = self.dim();
                let p = self.p as u32;
                let mut out = vec![0u8; n * n];
                let mut acc = vec![0u32; n];
                for i in 0..n {
                    acc.iter_mut().for_each(|x| *x = 0);
                    for k in 0..n {
                        let x = a[i * n + k] as u32;
                        if x == 0 {
                            continue;
                        }
                        for (j, s) in acc.iter_mut().enumerate() {
                            *s += x * b[k * n + j] as u32;
                        }
                    }
                    for j in 0..n {
                        out[i * n + j] = (acc[j] % p) as u8;
                    }
                }
                Rows::Dense(out.into())
            }
            _ => unreachable!("compatible matrices share a representation"),
        };
        Self { p: self.p, dim: self.dim, rows }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        Self::from_fn(self.p, n, |i, j| self.get(j, i) as i64).expect("same shape")
    }

    pub fn is_identity(&self) -> bool {
        match &self.rows {
            Rows::Packed(r) => r.iter().enumerate().all(|(i, &x)| x == 1 << i),
            Rows::Dense(d) => {
                let n = self.dim();
                d.iter().enumerate().all(|(k, &x)| x == (k / n == k % n) as u8)
            }
        }
    }

    /// Row-reduces a copy and returns `(rank, inverse if full rank)`.
    fn gauss_jordan(&self) -> (usize, Option<Self>) {
        let n = self.dim();
        let p = self.p;
        // augmented rows [A | I] as dense u8 vectors of length 2n
        let mut m: Vec<Vec<u8>> = (0..n)
            .map(|i| {
                let mut r = vec![0u8; 2 * n];
                for j in 0..n {
                    r[j] = self.get(i, j);
                }
                r[n + i] = 1;
                r
            })
            .collect();
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| m[r][col] != 0) else { continue };
            m.swap(rank, piv);
            let inv = inv_mod(m[rank][col], p).expect("nonzero pivot");
            for x in m[rank].iter_mut() {
                *x = ((*x as u16 * inv as u16) % p as u16) as u8;
            }
            for r in 0..n {
                if r != rank && m[r][col] != 0 {
                    let f = m[r][col] as u16;
                    for c in 0..2 * n {
                        let sub = (f * m[rank][c] as u16) % p as u16;
                        m[r][c] = ((m[r][c] as u16 + p as u16 - sub) % p as u16) as u8;
                    }
                }
            }
            rank += 1;
        }
        if rank < n {
            return (rank, None);
        }
        let inv = Self::from_fn(p, n, |i, j| m[i][n + j] as i64).expect("same shape");
        (rank, Some(inv))
    }

    pub fn rank(&self) -> usize {
        self.gauss_jordan().0
    }

    /// Inverse by Gauss–Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        match self.gauss_jordan() {
            (_, Some(inv)) => Ok(inv),
            (rank, None) => Err(Error::SingularMatrix { rank, dimension: self.dim() }),
        }
    }

    /// Row-major entries, one byte each.
    pub fn entries(&self) -> Vec<u8> {
        let n = self.dim();
        (0..n * n).map(|k| self.get(k / n, k % n)).collect()
    }

    pub(crate) fn key_bytes(&self) -> Vec<u8> {
        match &self.rows {
            Rows::Packed(r) => {
                let width = self.dim().div_ceil(8);
                let mut out = Vec::with_capacity(width * r.len());
                for row in r.iter() {
                    out.extend_from_slice(&row.to_le_bytes()[..width]);
                }
                out
            }
            Rows::Dense(d) => d.to_vec(),
        }
    }

    /// Parses matrix literals: rows are digit strings (`.` for zero), matrices
    /// are separated by blank lines. Spaces inside rows are ignored and lines
    /// starting with `#` are comments.
    pub fn parse_literals(text: &str, p: u8) -> Result<Vec<Self>> {
        check_prime(p)?;
        let mut out = Vec::new();
        let mut block: Vec<Vec<i64>> = Vec::new();
        let flush = |block: &mut Vec<Vec<i64>>, out: &mut Vec<Self>| -> Result<()> {
            if !block.is_empty() {
                out.push(Self::from_rows(p, block)?);
                block.clear();
            }
            Ok(())
        };
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.starts_with('#') {
                continue;
            }
            if line.is_empty() {
                flush(&mut block, &mut out)?;
                continue;
            }
            let mut row = Vec::new();
            for ch in line.chars().filter(|c| !c.is_whitespace()) {
                let x = match ch {
                    '.' => 0,
                    d if d.is_ascii_digit() && (d as u8 - b'0') < p => (d as u8 - b'0') as i64,
                    other => {
                        return Err(Error::MatrixLiteral(alloc::format!(
                            "line {}: invalid entry {other:?} for GF({p})",
                            lineno + 1
                        )))
                    }
                };
                row.push(x);
            }
            block.push(row);
        }
        flush(&mut block, &mut out)?;
        Ok(out)
    }

    /// Inverse of [`FieldMatrix::parse_literals`] for a single matrix.
    pub fn to_literal(&self) -> String {
        let mut s = String::new();
        for i in 0..self.dim() {
            s.push_str(&alloc::format!("{}\n", self.row(i)));
        }
        s
    }
}

impl fmt::Display for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

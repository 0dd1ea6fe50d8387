//! The polar space of O8+(3) with its triality, realised on split octonions.
//!
//! Vectors are Zorn vector-matrices `(a, u, v, b)` over GF(3) with norm
//! `Q = ab − u·v`. The 1120 singular points, the 1120 solids `L_a = aO` and
//! the 1120 solids `R_a = Oa` (one for each singular point `a`) are the
//! three object types permuted by the full automorphism group
//! O8+(3):S4. Object indices are `0..1120` for points (sorted normalised
//! vectors), `1120..2240` for `L_a` and `2240..3360` for `R_a`, both in the
//! order of their defining point.
//!
//! The triality sends the point `a` to `L_ā`, `L_b` to `R_b` and `R_c` to
//! the point `c̄`, where bar is octonion conjugation.

use std::collections::HashMap;

use triality_core::{FieldMatrix, Permutation};

pub type Vec8 = [u8; 8];
type Solid = [Vec8; 4];

pub const P: u8 = 3;
pub const POINTS: usize = 1120;
pub const DEGREE: usize = 3 * POINTS;

fn add(x: u8, y: u8) -> u8 {
    (x + y) % P
}

fn mulp(x: u8, y: u8) -> u8 {
    (x * y) % P
}

fn neg(x: u8) -> u8 {
    (P - x) % P
}

fn dot3(s: &[u8], t: &[u8]) -> u8 {
    (0..3).fold(0, |acc, i| add(acc, mulp(s[i], t[i])))
}

fn cross(s: &[u8], t: &[u8]) -> [u8; 3] {
    let c = |i: usize, j: usize| add(mulp(s[i], t[j]), neg(mulp(s[j], t[i])));
    [c(1, 2), c(2, 0), c(0, 1)]
}

/// Zorn product `[a,u;v,b]·[a',u';v',b']`.
pub fn octonion_mul(x: &Vec8, y: &Vec8) -> Vec8 {
    let (a, u, v, b) = (x[0], &x[1..4], &x[4..7], x[7]);
    let (a2, u2, v2, b2) = (y[0], &y[1..4], &y[4..7], y[7]);
    let vv = cross(v, v2);
    let uu = cross(u, u2);
    let mut out = [0u8; 8];
    out[0] = add(mulp(a, a2), dot3(u, v2));
    for i in 0..3 {
        out[1 + i] = add(add(mulp(a, u2[i]), mulp(b2, u[i])), neg(vv[i]));
        out[4 + i] = add(add(mulp(a2, v[i]), mulp(b, v2[i])), uu[i]);
    }
    out[7] = add(mulp(b, b2), dot3(v, u2));
    out
}

pub fn conjugate(x: &Vec8) -> Vec8 {
    [x[7], neg(x[1]), neg(x[2]), neg(x[3]), neg(x[4]), neg(x[5]), neg(x[6]), x[0]]
}

pub fn norm(x: &Vec8) -> u8 {
    add(mulp(x[0], x[7]), neg(dot3(&x[1..4], &x[4..7])))
}

/// Polar form `B(x,y) = Q(x+y) − Q(x) − Q(y)`.
pub fn polar(x: &Vec8, y: &Vec8) -> u8 {
    let s: Vec8 = core::array::from_fn(|i| add(x[i], y[i]));
    add(add(norm(&s), neg(norm(x))), neg(norm(y)))
}

/// Scales `x` so that its first nonzero entry is 1.
pub fn normalise(x: &Vec8) -> Vec8 {
    let lead = x.iter().copied().find(|&c| c != 0).unwrap_or(1);
    let inv = if lead == 2 { 2 } else { 1 };
    core::array::from_fn(|i| mulp(x[i], inv))
}

/// Reduced row echelon form, dropping zero rows.
pub fn rref(rows: &[Vec8]) -> Vec<Vec8> {
    let mut m: Vec<Vec8> = rows.to_vec();
    let mut r = 0;
    for c in 0..8 {
        let Some(k) = (r..m.len()).find(|&k| m[k][c] != 0) else { continue };
        m.swap(r, k);
        let inv = if m[r][c] == 2 { 2 } else { 1 };
        for x in m[r].iter_mut() {
            *x = mulp(*x, inv);
        }
        for k in 0..m.len() {
            let f = m[k][c];
            if k != r && f != 0 {
                let pivot = m[r];
                for (x, y) in m[k].iter_mut().zip(pivot) {
                    *x = add(*x, neg(mulp(f, y)));
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

fn apply(x: &Vec8, g: &[Vec8; 8]) -> Vec8 {
    let mut out = [0u8; 8];
    for (i, &c) in x.iter().enumerate() {
        if c != 0 {
            for j in 0..8 {
                out[j] = add(out[j], mulp(c, g[i][j]));
            }
        }
    }
    out
}

fn unit(i: usize) -> Vec8 {
    core::array::from_fn(|j| (i == j) as u8)
}

/// Points, solids and their incidences.
pub struct TrialityGeometry {
    points: Vec<Vec8>,
    point_index: HashMap<Vec8, u16>,
    solids: Vec<Solid>,
    solid_index: HashMap<Solid, u16>,
}

#[derive(Debug, PartialEq, Eq)]
pub enum GeometryError {
    /// The matrix does not map solids to solids.
    NotASimilitude,
    NotABijection,
}

impl TrialityGeometry {
    pub fn new() -> Self {
        let mut points = Vec::with_capacity(POINTS);
        for k in 1..3u32.pow(8) {
            let mut x = [0u8; 8];
            let mut r = k;
            for c in x.iter_mut().rev() {
                *c = (r % 3) as u8;
                r /= 3;
            }
            if norm(&x) == 0 && normalise(&x) == x {
                points.push(x);
            }
        }
        points.sort_unstable();
        assert_eq!(points.len(), POINTS);
        let point_index = points.iter().enumerate().map(|(i, p)| (*p, i as u16)).collect();
        let to_solid = |rows: Vec<Vec8>| -> Solid {
            let r = rref(&rows);
            assert_eq!(r.len(), 4, "a·O is a solid for singular a");
            [r[0], r[1], r[2], r[3]]
        };
        let mut solids = Vec::with_capacity(2 * POINTS);
        for a in &points {
            solids.push(to_solid((0..8).map(|i| octonion_mul(a, &unit(i))).collect()));
        }
        for a in &points {
            solids.push(to_solid((0..8).map(|i| octonion_mul(&unit(i), a)).collect()));
        }
        let solid_index: HashMap<Solid, u16> = solids.iter().enumerate().map(|(i, s)| (*s, i as u16)).collect();
        assert_eq!(solid_index.len(), 2 * POINTS, "left and right solids are distinct");
        Self { points, point_index, solids, solid_index }
    }

    pub fn points(&self) -> &[Vec8] {
        &self.points
    }

    pub fn point_of(&self, x: &Vec8) -> Option<usize> {
        self.point_index.get(&normalise(x)).map(|&i| i as usize)
    }

    /// Basis rows of solid `object − 1120`.
    pub fn solid(&self, object: usize) -> &[Vec8; 4] {
        &self.solids[object - POINTS]
    }

    fn solid_of(&self, rows: &[Vec8]) -> Option<usize> {
        let r = rref(rows);
        if r.len() != 4 {
            return None;
        }
        self.solid_index.get(&[r[0], r[1], r[2], r[3]]).map(|&i| POINTS + i as usize)
    }

    /// Points of a solid, in increasing order.
    pub fn points_on(&self, object: usize) -> Vec<usize> {
        let s = self.solid(object);
        let mut out = Vec::with_capacity(40);
        for k in 1..81u32 {
            let mut x = [0u8; 8];
            let mut r = k;
            for row in s {
                let c = (r % 3) as u8;
                r /= 3;
                for j in 0..8 {
                    x[j] = add(x[j], mulp(c, row[j]));
                }
            }
            if normalise(&x) == x {
                out.push(self.point_index[&x] as usize);
            }
        }
        out.sort_unstable();
        out
    }

    /// Dimension of the intersection of two solids.
    pub fn meet_dimension(&self, s: usize, t: usize) -> usize {
        let mut rows = self.solid(s).to_vec();
        rows.extend_from_slice(self.solid(t));
        8 - rref(&rows).len()
    }

    /// Permutation of the 3360 objects induced by a similitude acting on
    /// row vectors.
    pub fn linear_permutation(&self, g: &[Vec8; 8]) -> Result<Permutation, GeometryError> {
        let mut images = Vec::with_capacity(DEGREE);
        for p in &self.points {
            images.push(self.point_of(&apply(p, g)).ok_or(GeometryError::NotASimilitude)?);
        }
        for s in &self.solids {
            let rows: Vec<Vec8> = s.iter().map(|r| apply(r, g)).collect();
            images.push(self.solid_of(&rows).ok_or(GeometryError::NotASimilitude)?);
        }
        Permutation::from_images(&images).map_err(|_| GeometryError::NotABijection)
    }

    pub fn triality(&self) -> Permutation {
        let mut images = Vec::with_capacity(DEGREE);
        for p in &self.points {
            images.push(POINTS + self.point_of(&conjugate(p)).expect("conjugate of a singular vector"));
        }
        for i in 0..POINTS {
            images.push(2 * POINTS + i);
        }
        for p in &self.points {
            images.push(self.point_of(&conjugate(p)).expect("conjugate of a singular vector"));
        }
        Permutation::from_images(&images).expect("triality is a bijection")
    }

    /// Point–solid incidences and plane-sharing pairs of opposite solids, as
    /// adjacency lists on the 3360 objects.
    pub fn incidence(&self) -> Vec<Vec<u16>> {
        let mut adj = vec![Vec::new(); DEGREE];
        for s in POINTS..DEGREE {
            for p in self.points_on(s) {
                adj[p].push(s as u16);
                adj[s].push(p as u16);
            }
        }
        for l in POINTS..2 * POINTS {
            for r in 2 * POINTS..DEGREE {
                if self.meet_dimension(l, r) == 3 {
                    adj[l].push(r as u16);
                    adj[r].push(l as u16);
                }
            }
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        adj
    }

    /// Number of points lying on their image, for a permutation sending
    /// points to solids (0 otherwise).
    pub fn absolute_points(&self, g: &Permutation) -> usize {
        (0..POINTS)
            .filter(|&p| {
                let s = g.image(p);
                s >= POINTS && {
                    let x = &self.points[p];
                    let mut rows = self.solid(s).to_vec();
                    rows.push(*x);
                    rref(&rows).len() == 4
                }
            })
            .count()
    }
}

impl Default for TrialityGeometry {
    fn default() -> Self {
        Self::new()
    }
}

/// Reflection in the nonsingular vector `v`, as a row-action matrix.
pub fn reflection(v: &Vec8) -> [Vec8; 8] {
    let q = norm(v);
    assert_ne!(q, 0, "reflection vector must be nonsingular");
    let qinv = if q == 2 { 2 } else { 1 };
    core::array::from_fn(|i| {
        let e = unit(i);
        let c = mulp(polar(&e, v), qinv);
        core::array::from_fn(|j| add(e[j], neg(mulp(c, v[j]))))
    })
}

/// The similitude `(a,u,v,b) ↦ (a,u,−v,−b)` with multiplier −1.
pub fn similitude() -> [Vec8; 8] {
    core::array::from_fn(|i| {
        let mut e = unit(i);
        if i >= 4 {
            e[i] = neg(e[i]);
        }
        e
    })
}

pub fn to_field_matrix(g: &[Vec8; 8]) -> FieldMatrix {
    FieldMatrix::from_fn(P, 8, |i, j| g[i][j] as i64).expect("8x8 over GF(3)")
}

#[cfg(test)]
mod tests {
    use super::*;
    use triality_core::GroupElement;

    #[test]
    fn norm_is_multiplicative() {
        let g = TrialityGeometry::new();
        let pts = g.points();
        for (i, x) in pts.iter().enumerate().step_by(37) {
            let y = pts[(i * 7 + 3) % POINTS];
            let z: Vec8 = core::array::from_fn(|k| add(x[k], y[k]));
            for (a, b) in [(x, &y), (&z, x), (&z, &y)] {
                assert_eq!(norm(&octonion_mul(a, b)), mulp(norm(a), norm(b)));
            }
        }
        let one = [1, 0, 0, 0, 0, 0, 0, 1];
        assert_eq!(norm(&one), 1);
        assert_eq!(octonion_mul(&one, &pts[5]), pts[5]);
    }

    #[test]
    fn triality_preserves_incidence() {
        let g = TrialityGeometry::new();
        let adj = g.incidence();
        assert!(adj[..POINTS].iter().all(|a| a.len() == 80));
        assert!(adj[POINTS..].iter().all(|a| a.len() == 80));
        let t = g.triality();
        assert_eq!(t.order(), 3);
        for (i, a) in adj.iter().enumerate() {
            let mut img: Vec<u16> = a.iter().map(|&j| t.image(j as usize) as u16).collect();
            img.sort_unstable();
            assert_eq!(img, adj[t.image(i)]);
        }
        let r = g.linear_permutation(&reflection(&[1, 0, 0, 0, 0, 0, 0, 1])).unwrap();
        assert_eq!(r.order(), 2);
        // reflections swap the two solid families
        assert!((2 * POINTS..DEGREE).contains(&r.image(POINTS)));
        let d = g.linear_permutation(&similitude()).unwrap();
        assert!(!d.is_identity());
        assert!(g.linear_permutation(&reflection(&[1, 0, 0, 0, 0, 0, 0, 1])).unwrap().mul(&r).is_identity());
    }
}

//! O8+(2) from the 8-dimensional generators and their triality images, and
//! the 24-dimensional induced representation of O8+(2):3.

use triality_core::{
    solve_invariant_forms, BsgsChain, BsgsOptions, FieldMatrix, FieldVector, GeneratorSet, GroupElement, VectorAction,
};

use crate::golden::{o8_plus_order, Q2};
use crate::pipeline::{Check, Groups};

/// Generators `x`, `y` of O8+(2) followed by their images `x^ρ`, `y^ρ`
/// under the triality, as printed (dots are zeros).
pub const GENERATORS: &str = "\
# x
1.1111.1
..1.11.1
..1.1..1
....1..1
....1...
.1..1...
.1....1.
...1..1.

# y
11......
.1......
..1.....
...1....
...11...
....11..
......1.
11.....1

# x^rho
..1.....
11.1....
11......
.1......
11.1..1.
1.1....1
1..11..1
...111..

# y^rho
1.......
.1....1.
1.1..1..
...1....
.1..1...
1....1..
......1.
.......1
";

/// The four 8×8 matrices `x`, `y`, `x^ρ`, `y^ρ`.
pub fn literals(text: &str) -> Result<[FieldMatrix; 4], String> {
    let m = FieldMatrix::parse_literals(text, 2).map_err(|e| e.to_string())?;
    let m: [FieldMatrix; 4] =
        m.try_into().map_err(|m: Vec<FieldMatrix>| format!("expected 4 matrices, found {}", m.len()))?;
    if m.iter().any(|a| a.dim() != 8) {
        return Err("expected 8x8 matrices".to_string());
    }
    if let Some(k) = m.iter().position(|a| a.rank() != 8) {
        return Err(format!("matrix {} is singular", k + 1));
    }
    Ok(m)
}

fn pad(v: &FieldVector, width: usize, offset: usize) -> FieldVector {
    let mut e = vec![0i64; width];
    for (i, x) in v.entries().into_iter().enumerate() {
        e[offset + i] = x as i64;
    }
    FieldVector::from_entries(v.characteristic(), &e).expect("GF(p) entries")
}

fn block(m: &FieldMatrix, at: usize, n: usize) -> FieldMatrix {
    FieldMatrix::from_fn(m.characteristic(), n, |i, j| m.get(at + i, at + j) as i64).expect("in range")
}

/// Graph subgroup `⟨(x, x'), (y, y')⟩` of the direct square, acting on the
/// direct sum of the two natural modules. The generator map `x ↦ x'`,
/// `y ↦ y'` extends to a homomorphism exactly when this group has the order
/// of `⟨x, y⟩`.
pub struct GraphGroup {
    pub chain: BsgsChain<FieldMatrix, VectorAction>,
    n: usize,
}

impl GraphGroup {
    pub fn build(
        x: &FieldMatrix,
        y: &FieldMatrix,
        xr: &FieldMatrix,
        yr: &FieldMatrix,
        seed: u64,
    ) -> triality_core::Result<Self> {
        let n = x.dim();
        let gx = FieldMatrix::block_diagonal(&[x, xr])?;
        let gy = FieldMatrix::block_diagonal(&[y, yr])?;
        let gens = GeneratorSet::unlabelled(vec![gx, gy])?;
        let chain = BsgsChain::build(&gens, VectorAction::new(), &BsgsOptions::seeded(seed))?;
        Ok(Self { chain, n })
    }

    pub fn order(&self) -> u128 {
        self.chain.order().expect("verified on construction")
    }

    /// Image of `g` under the homomorphism, read off the graph element with
    /// first component `g`. Requires the base to lie in the first summand,
    /// which holds whenever the graph is a homomorphism.
    pub fn image(&self, g: &FieldMatrix) -> Option<FieldMatrix> {
        let base = self.chain.base();
        if base.iter().any(|b| (self.n..2 * self.n).any(|i| b.get(i) != 0)) {
            return None;
        }
        let image = base
            .iter()
            .map(|b| block_vector(b, self.n).times(g).ok().map(|v| pad(&v, 2 * self.n, 0)))
            .collect::<Option<Vec<FieldVector>>>()?;
        let pair = self.chain.element_from_base_image(&image)?;
        Some(block(&pair, self.n, self.n))
    }
}

fn block_vector(v: &FieldVector, n: usize) -> FieldVector {
    let e: Vec<i64> = v.entries()[..n].iter().map(|&x| x as i64).collect();
    FieldVector::from_entries(v.characteristic(), &e).expect("GF(p) entries")
}

/// The block cycling matrix realising ρ on the induced module.
pub fn block_shift(n: usize) -> FieldMatrix {
    FieldMatrix::from_fn(2, 3 * n, |i, j| (i % n == j % n && j / n == (i / n + 1) % 3) as i64).expect("valid shape")
}

/// Everything the O8+(2) pipeline needs, plus the checks made on the way.
pub struct Q2Build {
    pub groups: Option<Groups<FieldMatrix, VectorAction>>,
    pub checks: Vec<Check>,
}

/// Builds `S = ⟨x, y⟩`, checks the triality map, and constructs
/// `X = diag(x, x^ρ², x^ρ)`, `Y` likewise and the block shift `P`.
pub fn build(text: &str, seed: u64) -> Q2Build {
    let mut checks = Vec::new();
    let fail = |mut checks: Vec<Check>, name: &str, expected: String, e: String| {
        checks.push(Check::fail(name, expected, format!("error: {e}"), 0.0));
        Q2Build { groups: None, checks }
    };
    let [x, y, xr, yr] = match literals(text) {
        Ok(m) => m,
        Err(e) => return fail(checks, "build: generator literals", "4 matrices 8x8".into(), e),
    };

    let t = Check::timer();
    let s8_gens = GeneratorSet::with_labels(vec![x.clone(), y.clone()], &["x", "y"]).expect("compatible");
    let s8 = match BsgsChain::build(&s8_gens, VectorAction::new(), &BsgsOptions::seeded(seed)) {
        Ok(c) => c,
        Err(e) => return fail(checks, "build: |<x,y>|", Check::num(Q2.s_order), e.to_string()),
    };
    let s_order = s8.order().expect("verified");
    // the order polynomial of D4(q) at q = 2
    checks.push(Check::compare("build: |<x,y>|", o8_plus_order(2), s_order, t));

    let t = Check::timer();
    let form = solve_invariant_forms(&[x.clone(), y.clone()]);
    let singular = form.as_ref().ok().and_then(|(_, q)| q.singular_vector_count().ok());
    checks.push(Check::compare_text(
        "build: nonzero singular vectors of the invariant form",
        "135".into(),
        match (&form, singular) {
            (Ok(_), Some(n)) => n.to_string(),
            (Err(e), _) => format!("error: {e}"),
            _ => "uncountable".into(),
        },
        t,
    ));

    let t = Check::timer();
    let inside = s8.contains(&xr).unwrap_or(false) && s8.contains(&yr).unwrap_or(false);
    checks.push(Check::compare_text("build: x^rho, y^rho in <x,y>", "true".into(), inside.to_string(), t));

    let t = Check::timer();
    let graph = match GraphGroup::build(&x, &y, &xr, &yr, seed) {
        Ok(g) => g,
        Err(e) => return fail(checks, "build: graph subgroup order", Check::num(s_order), e.to_string()),
    };
    checks.push(Check::compare("build: graph subgroup order", s_order, graph.order(), t));
    if graph.order() != s_order || !inside || s_order != Q2.s_order {
        return Q2Build { groups: None, checks };
    }

    let t = Check::timer();
    let (xr2, yr2) = match (graph.image(&xr), graph.image(&yr)) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return fail(
                checks,
                "build: rho^2 images",
                "elements of <x,y>".into(),
                "graph base leaves the first summand".into(),
            )
        }
    };
    let big_x = FieldMatrix::block_diagonal(&[&x, &xr2, &xr]).expect("same field");
    let big_y = FieldMatrix::block_diagonal(&[&y, &yr2, &yr]).expect("same field");
    let p = block_shift(8);
    let s_gens = GeneratorSet::with_labels(vec![big_x.clone(), big_y.clone()], &["x", "y"]).expect("compatible");
    let s24 = match BsgsChain::build(&s_gens, VectorAction::new(), &BsgsOptions::seeded(seed)) {
        Ok(c) => c,
        Err(e) => return fail(checks, "build: |<X,Y>|", Check::num(s_order), e.to_string()),
    };
    checks.push(Check::compare("build: |<X,Y>|", s_order, s24.order().expect("verified"), t));

    let t = Check::timer();
    let g_gens = GeneratorSet::with_labels(vec![big_x, big_y, p.clone()], &["x", "y", "r"]).expect("compatible");
    let g24 = match BsgsChain::build(&g_gens, VectorAction::new(), &BsgsOptions::seeded(seed)) {
        Ok(c) => c,
        Err(e) => return fail(checks, "build: |<X,Y,P>|", Check::num(3 * s_order), e.to_string()),
    };
    checks.push(Check::compare("build: |<X,Y,P>|", 3 * s_order, g24.order().expect("verified"), t));

    let t = Check::timer();
    let p_order = p.order_with_cap(3).ok();
    checks.push(Check::compare_text(
        "build: order of P",
        "3".into(),
        p_order.map_or("> 3".into(), |o| o.to_string()),
        t,
    ));
    let t = Check::timer();
    let outside = !s24.contains(&p).expect("verified");
    checks.push(Check::compare_text("build: P not in <X,Y>", "true".into(), outside.to_string(), t));

    let ok = checks.iter().all(|c| c.passed());
    let groups = ok.then(|| Groups { s_gens, s_chain: s24, g_chain: g24, rho: p, action: VectorAction::new() });
    Q2Build { groups, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm_matrix(images: &[usize]) -> FieldMatrix {
        FieldMatrix::from_fn(2, images.len(), |i, j| (images[i] == j) as i64).unwrap()
    }

    #[test]
    fn literals_are_invertible() {
        let [x, y, xr, yr] = literals(GENERATORS).unwrap();
        for m in [&x, &y, &xr, &yr] {
            let inv = m.inverse().unwrap();
            assert!(m.mul(&inv).is_identity());
        }
        // e_1·x is the first row of x
        let e1 = FieldVector::unit(2, 8, 0).unwrap();
        assert_eq!(e1.times(&x).unwrap(), x.row(0));
    }

    #[test]
    fn graph_of_identity_is_a_homomorphism() {
        let a = perm_matrix(&[1, 0, 2]);
        let b = perm_matrix(&[1, 2, 0]);
        let g = GraphGroup::build(&a, &b, &a, &b, 1).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.image(&a.mul(&b)), Some(a.mul(&b)));
    }

    #[test]
    fn non_homomorphic_map_is_detected_on_s3() {
        // x ↦ x, y ↦ y·x does not respect (xy)^2 = 1
        let a = perm_matrix(&[1, 0, 2]);
        let b = perm_matrix(&[1, 2, 0]);
        let g = GraphGroup::build(&a, &b, &a, &b.mul(&a), 1).unwrap();
        assert!(g.order() > 6);
        assert_eq!(g.order() % 6, 0);
    }

    #[test]
    fn block_shift_has_order_three() {
        let p = block_shift(8);
        assert!(!p.is_identity());
        assert!(p.pow(3).is_identity());
        let v = FieldVector::unit(2, 24, 0).unwrap();
        // (v0, v1, v2)·P = (v2, v0, v1)
        assert_eq!(v.times(&p).unwrap(), FieldVector::unit(2, 24, 8).unwrap());
    }
}

//! Small-group oracle suite: chains against brute-force enumeration,
//! catalog separation, the invariant-form solver and the file formats.

use std::time::Instant;

use triality_core::structure::DEFAULT_CAP;
use triality_core::{
    solve_invariant_forms, BsgsChain, BsgsOptions, ElementTable, FieldMatrix, FieldVector, FingerprintCatalog,
    GeneratorSet, GroupElement, PermAction, Permutation, RandomElementStream, VectorAction,
};

use crate::atlas::{parse_generators, serialize_canonical};
use crate::golden;
use crate::pipeline::Check;

fn perms(n: usize, cycles: &[&[&[usize]]]) -> GeneratorSet<Permutation> {
    GeneratorSet::unlabelled(cycles.iter().map(|c| Permutation::from_cycles(n, c).expect("valid cycles")).collect())
        .expect("compatible")
}

fn matrices(p: u8, text: &str) -> GeneratorSet<FieldMatrix> {
    GeneratorSet::unlabelled(FieldMatrix::parse_literals(text, p).expect("valid literal")).expect("compatible")
}

fn dihedral(n: usize) -> GeneratorSet<Permutation> {
    let rotation: Vec<usize> = (1..=n).collect();
    let reflection: Vec<Vec<usize>> = (1..=n / 2).map(|i| vec![i, n + 1 - i]).collect();
    let refl: Vec<&[usize]> = reflection.iter().map(Vec::as_slice).collect();
    GeneratorSet::unlabelled(vec![
        Permutation::from_cycles(n, &[&rotation]).expect("cycle"),
        Permutation::from_cycles(n, &refl).expect("involution"),
    ])
    .expect("compatible")
}

/// Permutation groups of the reference set.
pub fn permutation_groups() -> Vec<(&'static str, GeneratorSet<Permutation>, u128)> {
    vec![
        ("S3", perms(3, &[&[&[1, 2]], &[&[1, 2, 3]]]), 6),
        ("S4", perms(4, &[&[&[1, 2]], &[&[1, 2, 3, 4]]]), 24),
        ("S5", perms(5, &[&[&[1, 2]], &[&[1, 2, 3, 4, 5]]]), 120),
        ("S6", perms(6, &[&[&[1, 2]], &[&[1, 2, 3, 4, 5, 6]]]), 720),
        ("A4", perms(4, &[&[&[1, 2, 3]], &[&[2, 3, 4]]]), 12),
        ("A5", perms(5, &[&[&[1, 2, 3]], &[&[1, 2, 3, 4, 5]]]), 60),
        ("D8", dihedral(4), 8),
        ("D10", dihedral(5), 10),
        ("D24", dihedral(12), 24),
    ]
}

/// Matrix groups of the reference set.
pub fn matrix_groups() -> Vec<(&'static str, GeneratorSet<FieldMatrix>, u128)> {
    vec![
        ("SL2(3)", matrices(3, "11\n.1\n\n.1\n2.\n"), 24),
        ("UT3(3)", matrices(3, "11.\n.1.\n..1\n\n1..\n.11\n..1\n"), 27),
        ("UT4(2)", matrices(2, "11..\n.1..\n..1.\n...1\n\n1...\n.11.\n..1.\n...1\n\n1...\n.1..\n..11\n...1\n"), 64),
        ("GL3(2)", matrices(2, "11.\n.1.\n..1\n\n.1.\n..1\n1..\n"), 168),
        ("SL2(5)", matrices(5, "11\n.1\n\n.1\n4.\n"), 120),
    ]
}

/// Chain order and membership against the element table.
fn agree<E, A>(name: &str, gens: &GeneratorSet<E>, action: A, order: u128, ambient: &GeneratorSet<E>) -> Check
where
    E: GroupElement,
    A: triality_core::Action<E>,
{
    let t = Instant::now();
    let outcome = (|| -> Result<String, String> {
        let chain = BsgsChain::build(gens, action, &BsgsOptions::seeded(7)).map_err(|e| e.to_string())?;
        let table = ElementTable::enumerate(gens, DEFAULT_CAP).map_err(|e| e.to_string())?;
        let keys: std::collections::HashSet<_> = table.elements().iter().map(GroupElement::canonical_key).collect();
        let mut stream = RandomElementStream::new(ambient, 3);
        for _ in 0..300 {
            let g = stream.next_element();
            if chain.contains(&g).map_err(|e| e.to_string())? != keys.contains(&g.canonical_key()) {
                return Err(format!("membership of {g:?} disagrees"));
            }
        }
        let c = chain.order().map_err(|e| e.to_string())?;
        Ok(format!("chain {c}, table {}", table.order()))
    })();
    let expected = format!("chain {order}, table {order}");
    match outcome {
        Ok(actual) => Check::compare_text(&format!("oracle: {name}"), expected, actual, t),
        Err(e) => Check::with_status(&format!("oracle: {name}"), expected, format!("error: {e}"), false, t),
    }
}

fn symmetric(n: usize) -> GeneratorSet<Permutation> {
    let cycle: Vec<usize> = (1..=n).collect();
    GeneratorSet::unlabelled(vec![
        Permutation::from_cycles(n, &[&[1, 2]]).expect("transposition"),
        Permutation::from_cycles(n, &[&cycle]).expect("cycle"),
    ])
    .expect("compatible")
}

fn general_linear(p: u8, n: usize) -> GeneratorSet<FieldMatrix> {
    // a transvection, a diagonal generator of the multiplicative group and
    // a cyclic permutation matrix generate GL(n, p) for these small cases
    let t = FieldMatrix::from_fn(p, n, |i, j| (i == j || (i == 0 && j == 1)) as i64).expect("shape");
    let d = FieldMatrix::from_fn(p, n, |i, j| {
        if i == j {
            if i == 0 {
                (p as i64 - 1).max(1)
            } else {
                1
            }
        } else {
            0
        }
    })
    .expect("shape");
    let c = FieldMatrix::from_fn(p, n, |i, j| (j == (i + 1) % n) as i64).expect("shape");
    let mut gens = vec![t, c];
    if !d.is_identity() {
        gens.push(d);
    }
    if p == 5 {
        gens.push(
            FieldMatrix::from_fn(p, n, |i, j| {
                if i == j {
                    if i == 0 {
                        2
                    } else {
                        1
                    }
                } else {
                    0
                }
            })
            .expect("shape"),
        );
    }
    GeneratorSet::unlabelled(gens).expect("compatible")
}

/// Runs every oracle check. `extra` is merged into the fingerprint catalog
/// before the separation test.
pub fn run(extra: Option<&FingerprintCatalog>) -> Vec<Check> {
    let mut checks = Vec::new();
    for (name, gens, order) in permutation_groups() {
        let n = gens.identity().degree();
        checks.push(agree(name, &gens, PermAction, order, &symmetric(n)));
    }
    for (name, gens, order) in matrix_groups() {
        let g = &gens.elements()[0];
        let ambient = general_linear(g.characteristic(), g.dim());
        checks.push(agree(name, &gens, VectorAction::new(), order, &ambient));
    }

    let t = Instant::now();
    let mut catalog = golden::catalog();
    if let Some(e) = extra {
        catalog.merge(e);
    }
    let collisions: Vec<String> =
        catalog.collisions().into_iter().map(|(a, b)| format!("AmbiguousMatch: {a} = {b}")).collect();
    checks.push(Check::compare_text(
        "catalog: fingerprints pairwise distinct",
        "no collisions".into(),
        if collisions.is_empty() { "no collisions".into() } else { collisions.join("; ") },
        t,
    ));
    let t = Instant::now();
    let reference = FingerprintCatalog::reference();
    let stable = reference.names().iter().all(|n| catalog.get(n) == reference.get(n));
    checks.push(Check::compare_text(
        "catalog: reference constructions reproducible",
        "true".into(),
        stable.to_string(),
        t,
    ));

    checks.push(form_check());
    checks.push(format_check());
    checks
}

/// Exhaustive check of the form recovered from the O8+(2) generators.
fn form_check() -> Check {
    let t = Instant::now();
    let name = "forms: invariant quadratic form on GF(2)^8";
    let expected = "invariant, polarizes, 135 singular".to_string();
    let [x, y, _, _] = crate::q2::literals(crate::q2::GENERATORS).expect("embedded literals");
    let (b, q) = match solve_invariant_forms(&[x.clone(), y.clone()]) {
        Ok(f) => f,
        Err(e) => return Check::with_status(name, expected, format!("error: {e}"), false, t),
    };
    let vectors: Vec<FieldVector> = FieldVector::all(2, 8).expect("small space").collect();
    let qv = |v: &FieldVector| q.evaluate(v).expect("dimension 8");
    let mut invariant = true;
    let mut polarizes = true;
    for v in &vectors {
        for g in [&x, &y] {
            invariant &= qv(&v.times(g).expect("dimension 8")) == qv(v);
        }
        for u in &vectors {
            // over GF(2): B(u, v) = Q(u + v) + Q(u) + Q(v)
            let lhs = b.evaluate(u, v).expect("dimension 8");
            polarizes &= lhs == qv(&u.add(v).expect("dimension 8")) ^ qv(u) ^ qv(v);
        }
    }
    invariant &= b.preserved_by(&x).unwrap_or(false) && b.preserved_by(&y).unwrap_or(false);
    let singular = vectors.iter().filter(|v| !v.is_zero() && qv(v) == 0).count();
    let actual = format!(
        "{}, {}, {singular} singular",
        if invariant { "invariant" } else { "not invariant" },
        if polarizes { "polarizes" } else { "does not polarize" }
    );
    Check::compare_text(name, expected, actual, t)
}

fn format_check() -> Check {
    let t = Instant::now();
    let name = "formats: canonical and MeatAxe readers";
    let perms: Vec<Permutation> = symmetric(7).elements().to_vec();
    let text = serialize_canonical(&perms);
    let canonical = parse_generators(text.as_bytes(), None, "selftest").map(|f| f.permutations);
    let mut meataxe = String::from("12 1 7 2\n");
    for p in &perms {
        for i in p.one_based_images() {
            meataxe.push_str(&format!("{i}\n"));
        }
    }
    let meataxe = parse_generators(meataxe.as_bytes(), None, "selftest").map(|f| f.permutations);
    let ok = canonical.as_ref().ok() == Some(&perms) && meataxe.as_ref().ok() == Some(&perms);
    Check::with_status(name, "round trip".into(), if ok { "round trip" } else { "mismatch" }.into(), ok, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_linear_surrogates_have_expected_orders() {
        let order = |g: GeneratorSet<FieldMatrix>| {
            BsgsChain::build(&g, VectorAction::new(), &BsgsOptions::seeded(1)).unwrap().order().unwrap()
        };
        assert_eq!(order(general_linear(2, 3)), 168);
        assert_eq!(order(general_linear(3, 2)), 48);
        assert_eq!(order(general_linear(2, 4)), 20160);
        assert_eq!(order(general_linear(5, 2)), 480);
        assert_eq!(order(general_linear(3, 3)), 11232);
    }
}

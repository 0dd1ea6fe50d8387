//! Builds generators `x0`, `y0` of O8+(3):S4 on the 3360 objects of the
//! triality geometry and writes them in the canonical permutation format.
//!
//! The group comes from reflections, a similitude and the octonion
//! triality. A seeded search then picks `x0` of order 24 and `y0` of order
//! 20 such that
//!
//! * `⟨x0, y0⟩` is the whole group and `x = x0^4`, `y = y0^4` generate S,
//! * `ρ = (x0 y0)^4` is a triality with as many absolute points as the
//!   octonion triality (whose centralizer contains G2(3)),
//! * `ϱ = (ρ x^4 y)^4` has order 3 and a different absolute-point count,
//! * `⟨ρ, ρ^x, ρ^y⟩` and `⟨ϱ, ϱ^x⟩` both have order `3|S|`.
//!
//! Usage: `cargo run --release -p triality --example build_o8p3_generators -- [seed] [out]`

use std::time::Instant;

use triality::atlas::{serialize_canonical, sha256_hex};
use triality::geometry::{reflection, similitude, TrialityGeometry, Vec8, POINTS};
use triality_core::{BsgsChain, BsgsOptions, GeneratorSet, GroupElement, PermAction, Permutation, RandomElementStream};

const S_ORDER: u128 = 4_952_179_814_400;

fn order_of(g: &[Permutation], expected: u128, seed: u64) -> Option<u128> {
    let gens = GeneratorSet::unlabelled(g.to_vec()).ok()?;
    let opts = BsgsOptions { random_budget: 3000, ..BsgsOptions::known_order(seed, expected) };
    BsgsChain::build(&gens, PermAction, &opts).ok().map(|c| c.order().expect("certified"))
}

fn main() {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map(|s| s.parse().expect("seed")).unwrap_or(1);
    let out = args.next().unwrap_or_else(|| "data/o8p3-s4-3360.perm".to_string());
    let t0 = Instant::now();
    let geo = TrialityGeometry::new();
    let tau = geo.triality();
    let reference = geo.absolute_points(&tau);
    eprintln!("geometry ready ({:.1?}); octonion triality has {reference} absolute points", t0.elapsed());

    let mut gens = vec![tau.clone(), geo.linear_permutation(&similitude()).expect("similitude")];
    let mut k = 0u32;
    while gens.len() < 8 {
        k += 1;
        let mut v: Vec8 = [0; 8];
        let mut r = k.wrapping_mul(2654435761) % 6561;
        for c in v.iter_mut() {
            *c = (r % 3) as u8;
            r /= 3;
        }
        if triality_core::FieldScalar::new(triality::geometry::norm(&v) as i64, 3).unwrap().is_zero() {
            continue;
        }
        gens.push(geo.linear_permutation(&reflection(&v)).expect("reflection"));
    }
    let g_order = order_of(&gens, 24 * S_ORDER, seed).expect("generators give O8+(3):S4");
    eprintln!("|G| = {g_order} ({:.1?})", t0.elapsed());

    let group = GeneratorSet::unlabelled(gens).unwrap();
    let mut stream = RandomElementStream::new(&group, seed);
    let mut xs: Vec<Permutation> = Vec::new();
    let mut ys: Vec<Permutation> = Vec::new();
    let mut tried = 0u64;
    loop {
        let g = stream.next_element();
        let o = g.order() as u64;
        if o.is_multiple_of(24) {
            xs.push(g.pow(o / 24));
            for y0 in &ys.clone() {
                tried += 1;
                if let Some(found) = check(&geo, reference, xs.last().unwrap(), y0, seed) {
                    write(&found, &out);
                    eprintln!("found after {tried} pairs ({:.1?})", t0.elapsed());
                    return;
                }
            }
        }
        if o.is_multiple_of(20) {
            ys.push(g.pow(o / 20));
            for x0 in &xs.clone() {
                tried += 1;
                if let Some(found) = check(&geo, reference, x0, ys.last().unwrap(), seed) {
                    write(&found, &out);
                    eprintln!("found after {tried} pairs ({:.1?})", t0.elapsed());
                    return;
                }
            }
        }
    }
}

fn check(
    geo: &TrialityGeometry,
    reference: usize,
    x0: &Permutation,
    y0: &Permutation,
    seed: u64,
) -> Option<[Permutation; 2]> {
    let rho = GroupElement::pow(&x0.mul(y0), 4);
    if rho.order() != 3 || rho.image(0) < POINTS || geo.absolute_points(&rho) != reference {
        return None;
    }
    let x = GroupElement::pow(x0, 4);
    let y = GroupElement::pow(y0, 4);
    let vrho = GroupElement::pow(&rho.mul(&GroupElement::pow(&x, 4)).mul(&y), 4);
    if vrho.order() != 3 || geo.absolute_points(&vrho) == reference {
        return None;
    }
    eprintln!("candidate: rho absolute {}, vrho absolute {}", reference, geo.absolute_points(&vrho));
    if order_of(&[x.clone(), y.clone()], S_ORDER, seed)? != S_ORDER {
        return None;
    }
    if order_of(&[x0.clone(), y0.clone()], 24 * S_ORDER, seed)? != 24 * S_ORDER {
        return None;
    }
    let triple = [rho.clone(), rho.conjugate_by(&x), rho.conjugate_by(&y)];
    order_of(&triple, 3 * S_ORDER, seed)?;
    order_of(&[vrho.clone(), vrho.conjugate_by(&x)], 3 * S_ORDER, seed)?;
    Some([x0.clone(), y0.clone()])
}

fn write(gens: &[Permutation; 2], out: &str) {
    let text = serialize_canonical(gens);
    std::fs::write(out, &text).expect("write generator file");
    println!("{out} sha256 {}", sha256_hex(text.as_bytes()));
}

//! Base and strong generating sets.
//!
//! A [`BsgsChain`] is built by randomized Schreier–Sims and then certified
//! either by the deterministic Schreier-generator test or by a known-order
//! certificate. The chain stores explicit transversals (and their inverses)
//! alongside the Schreier vectors so that sifting is a sequence of lookups
//! and multiplications.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use hashbrown::HashMap;
use rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;

use crate::{Action, Error, GeneratorSet, GroupElement, Key, RandomElementStream, Result};

/// How a chain was certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every Schreier generator sifts to the identity.
    Deterministic,
    /// The chain reaches a known group order and every generator sifts.
    KnownOrder(u128),
}

#[derive(Clone, Debug)]
pub struct BsgsOptions {
    pub seed: u64,
    pub expected_order: Option<u128>,
    /// Certify with the known-order test when `expected_order` is set;
    /// otherwise (or when false) run the deterministic test.
    pub prefer_known_order: bool,
    /// Random elements drawn before giving up on reaching `expected_order`.
    pub random_budget: u64,
    /// Consecutive trivial sifts that end the random phase when the order is
    /// not known in advance.
    pub quiet_sifts: u32,
}

impl Default for BsgsOptions {
    fn default() -> Self {
        Self { seed: 1, expected_order: None, prefer_known_order: false, random_budget: 200_000, quiet_sifts: 40 }
    }
}

impl BsgsOptions {
    pub fn seeded(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn known_order(seed: u64, order: u128) -> Self {
        Self { seed, expected_order: Some(order), prefer_known_order: true, ..Self::default() }
    }
}

#[derive(Clone, Debug)]
pub struct SiftResult<E> {
    pub residue: E,
    /// Number of levels passed before the residue left the basic orbit (the
    /// chain length when it passed all of them).
    pub depth: usize,
}

#[derive(Clone, Debug)]
struct Level<E, P> {
    base_point: P,
    orbit: Vec<P>,
    index: HashMap<P, u32>,
    /// Predecessor orbit index and strong generator id; `None` at the root.
    schreier: Vec<Option<(u32, u32)>>,
    transversal: Vec<E>,
    transversal_inv: Vec<E>,
}

#[derive(Clone, Debug)]
struct Strong<E> {
    elt: E,
    inv: E,
    level: usize,
}

#[derive(Clone, Debug)]
pub struct BsgsChain<E: GroupElement, A: Action<E>> {
    action: A,
    identity: E,
    candidates: Vec<A::Point>,
    generators: Vec<E>,
    levels: Vec<Level<E, A::Point>>,
    strong: Vec<Strong<E>>,
    verified: Option<VerifyMode>,
}

impl<E: GroupElement, A: Action<E>> BsgsChain<E, A> {
    /// Chain of the trivial group, ready for [`BsgsChain::sift_and_add`].
    pub fn empty(identity: E, action: A) -> Self {
        let identity = identity.identity_like();
        let candidates = action.base_candidates(&identity);
        Self {
            action,
            identity,
            candidates,
            generators: Vec::new(),
            levels: Vec::new(),
            strong: Vec::new(),
            verified: Some(VerifyMode::Deterministic),
        }
    }

    /// Randomized Schreier–Sims followed by certification.
    pub fn build(gens: &GeneratorSet<E>, action: A, opts: &BsgsOptions) -> Result<Self> {
        let mut chain = Self::empty(gens.identity().clone(), action);
        chain.extend(gens.elements(), opts)?;
        Ok(chain)
    }

    /// Adds generators and re-certifies the chain.
    pub fn extend(&mut self, new_gens: &[E], opts: &BsgsOptions) -> Result<()> {
        self.verified = None;
        for g in new_gens {
            if g.is_identity() {
                continue;
            }
            self.generators.push(g.clone());
            let s = self.sift(g);
            if !s.residue.is_identity() {
                self.add_strong(s.residue, s.depth)?;
            }
        }
        if self.generators.is_empty() {
            self.verified = Some(VerifyMode::Deterministic);
            return match opts.expected_order {
                Some(t) if t != 1 => Err(Error::OrderMismatch { expected: t, actual: 1 }),
                _ => Ok(()),
            };
        }
        self.random_phase(opts)?;
        match opts.expected_order {
            Some(t) if opts.prefer_known_order => self.certify_known_order(t),
            expected => {
                self.complete()?;
                self.verified = Some(VerifyMode::Deterministic);
                match expected {
                    Some(t) if t != self.claimed_order() => {
                        Err(Error::OrderMismatch { expected: t, actual: self.claimed_order() })
                    }
                    _ => Ok(()),
                }
            }
        }
    }

    fn random_phase(&mut self, opts: &BsgsOptions) -> Result<()> {
        let gens = GeneratorSet::unlabelled(self.generators.clone())?;
        let mut stream = RandomElementStream::new(&gens, opts.seed);
        let mut quiet = 0;
        let mut draws = 0u64;
        loop {
            let order = self.claimed_order();
            match opts.expected_order {
                Some(t) if order == t => return Ok(()),
                Some(t) if order > t => return Err(Error::OrderMismatch { expected: t, actual: order }),
                Some(_) => {}
                None if quiet >= opts.quiet_sifts => return Ok(()),
                None => {}
            }
            if draws >= opts.random_budget {
                return match opts.expected_order {
                    Some(t) if opts.prefer_known_order => Err(Error::OrderMismatch { expected: t, actual: order }),
                    _ => Ok(()),
                };
            }
            draws += 1;
            let g = stream.next_element();
            let s = self.sift(&g);
            if s.residue.is_identity() {
                quiet += 1;
            } else {
                quiet = 0;
                self.add_strong(s.residue, s.depth)?;
            }
        }
    }

    fn certify_known_order(&mut self, target: u128) -> Result<()> {
        let order = self.claimed_order();
        if order != target {
            return Err(Error::OrderMismatch { expected: target, actual: order });
        }
        // The product of basic orbit lengths bounds the generated order from
        // below, so reaching the true order means the chain is complete.
        for g in &self.generators {
            if !self.sift(g).residue.is_identity() {
                return Err(Error::VerificationFailed("generator does not sift to the identity".to_string()));
            }
        }
        self.verified = Some(VerifyMode::KnownOrder(target));
        Ok(())
    }

    /// Adds `g` as a new generator if it is not already a member; the chain
    /// stays complete only for the elements sifted so far (no certification).
    pub fn sift_and_add(&mut self, g: &E) -> Result<bool> {
        let s = self.sift(g);
        if s.residue.is_identity() {
            return Ok(false);
        }
        self.verified = None;
        self.generators.push(g.clone());
        self.add_strong(s.residue, s.depth)?;
        Ok(true)
    }

    /// Marks the chain as certified by a known order reached through
    /// [`BsgsChain::sift_and_add`].
    pub fn certify(&mut self, target: u128) -> Result<()> {
        self.certify_known_order(target)
    }

    /// Runs the deterministic Schreier-generator test, adding any missing
    /// strong generators, and marks the chain verified.
    pub fn verify_deterministic(&mut self) -> Result<()> {
        self.complete()?;
        self.verified = Some(VerifyMode::Deterministic);
        Ok(())
    }

    fn complete(&mut self) -> Result<()> {
        let mut i = self.levels.len();
        while i > 0 {
            let lvl = i - 1;
            match self.find_failing_schreier(lvl) {
                Some((residue, depth)) => {
                    self.add_strong(residue, depth)?;
                    i = depth.min(self.levels.len() - 1) + 1;
                }
                None => i -= 1,
            }
        }
        Ok(())
    }

    fn find_failing_schreier(&self, lvl: usize) -> Option<(E, usize)> {
        let level = &self.levels[lvl];
        for k in 0..level.orbit.len() {
            for (id, s) in self.strong.iter().enumerate() {
                if s.level < lvl {
                    continue;
                }
                let q = self.action.apply(&s.elt, &level.orbit[k]);
                let j = level.index[&q] as usize;
                if level.schreier[j] == Some((k as u32, id as u32)) {
                    continue;
                }
                let sg = level.transversal[k].mul(&s.elt).mul(&level.transversal_inv[j]);
                let r = self.sift_from(&sg, lvl + 1);
                if !r.residue.is_identity() {
                    return Some((r.residue, r.depth));
                }
            }
        }
        None
    }

    fn add_strong(&mut self, residue: E, depth: usize) -> Result<()> {
        if depth == self.levels.len() {
            let point = self
                .candidates
                .iter()
                .find(|c| self.action.apply(&residue, c) != **c)
                .cloned()
                .ok_or(Error::NoBasePoint)?;
            let mut index = HashMap::new();
            index.insert(point.clone(), 0);
            self.levels.push(Level {
                base_point: point.clone(),
                orbit: vec![point],
                index,
                schreier: vec![None],
                transversal: vec![self.identity.clone()],
                transversal_inv: vec![self.identity.clone()],
            });
        }
        let id = self.strong.len();
        let inv = residue.inv();
        self.strong.push(Strong { elt: residue, inv, level: depth });
        for lvl in 0..=depth {
            self.extend_orbit(lvl, id);
        }
        Ok(())
    }

    fn extend_orbit(&mut self, lvl: usize, new_id: usize) {
        let gen_ids: Vec<usize> = (0..self.strong.len()).filter(|&id| self.strong[id].level >= lvl).collect();
        let strong = &self.strong;
        let action = &self.action;
        let level = &mut self.levels[lvl];
        let try_add = |level: &mut Level<E, A::Point>, k: usize, id: usize| {
            let q = action.apply(&strong[id].elt, &level.orbit[k]);
            if level.index.contains_key(&q) {
                return;
            }
            let n = level.orbit.len() as u32;
            level.index.insert(q.clone(), n);
            level.orbit.push(q);
            level.schreier.push(Some((k as u32, id as u32)));
            let t = level.transversal[k].mul(&strong[id].elt);
            let ti = strong[id].inv.mul(&level.transversal_inv[k]);
            level.transversal.push(t);
            level.transversal_inv.push(ti);
        };
        let old = level.orbit.len();
        for k in 0..old {
            try_add(level, k, new_id);
        }
        let mut k = old;
        while k < level.orbit.len() {
            for &id in &gen_ids {
                try_add(level, k, id);
            }
            k += 1;
        }
    }

    /// Sifts `g` through the whole chain.
    pub fn sift(&self, g: &E) -> SiftResult<E> {
        self.sift_from(g, 0)
    }

    fn sift_from(&self, g: &E, start: usize) -> SiftResult<E> {
        let mut residue = g.clone();
        for (i, level) in self.levels.iter().enumerate().skip(start) {
            let q = self.action.apply(&residue, &level.base_point);
            match level.index.get(&q) {
                Some(&k) => {
                    if k != 0 {
                        residue = residue.mul(&level.transversal_inv[k as usize]);
                    }
                }
                None => return SiftResult { residue, depth: i },
            }
        }
        SiftResult { residue, depth: self.levels.len() }
    }

    pub fn is_verified(&self) -> bool {
        self.verified.is_some()
    }

    pub fn verification(&self) -> Option<VerifyMode> {
        self.verified
    }

    /// Product of the basic orbit lengths.
    pub fn claimed_order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    /// Exact order of a verified chain.
    pub fn order(&self) -> Result<u128> {
        self.verified.ok_or(Error::Unverified)?;
        Ok(self.claimed_order())
    }

    /// Membership test for a verified chain.
    pub fn contains(&self, g: &E) -> Result<bool> {
        self.verified.ok_or(Error::Unverified)?;
        if !g.compatible(&self.identity) {
            return Err(Error::IncompatibleGenerators);
        }
        Ok(self.sift(g).residue.is_identity())
    }

    pub fn base(&self) -> Vec<A::Point> {
        self.levels.iter().map(|l| l.base_point.clone()).collect()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn generators(&self) -> &[E] {
        &self.generators
    }

    pub fn identity(&self) -> &E {
        &self.identity
    }

    pub fn action(&self) -> &A {
        &self.action
    }

    /// Strong generators fixing the first `level` base points.
    pub fn strong_generators(&self, level: usize) -> Vec<E> {
        self.strong.iter().filter(|s| s.level >= level).map(|s| s.elt.clone()).collect()
    }

    /// Images of the base points under `g`.
    pub fn base_image(&self, g: &E) -> Vec<A::Point> {
        self.levels.iter().map(|l| self.action.apply(g, &l.base_point)).collect()
    }

    /// The unique group element with the given base image, if any.
    pub fn element_from_base_image(&self, image: &[A::Point]) -> Option<E> {
        if image.len() != self.levels.len() {
            return None;
        }
        // w = u_0^-1 ... u_{i-1}^-1 maps the remaining targets back into the
        // basic orbits; the element is w^-1 at the end.
        let mut w = self.identity.clone();
        for (level, gamma) in self.levels.iter().zip(image) {
            let delta = self.action.apply(&w, gamma);
            let k = *level.index.get(&delta)? as usize;
            if k != 0 {
                w = w.mul(&level.transversal_inv[k]);
            }
        }
        let g = w.inv();
        (self.base_image(&g) == image).then_some(g)
    }

    /// Uniformly distributed element: one random transversal element per
    /// level.
    pub fn random_element(&self, rng: &mut SplitMix64) -> E {
        let mut g = self.identity.clone();
        for level in self.levels.iter().rev() {
            let k = crate::random::below(rng, level.transversal.len());
            if k != 0 {
                g = g.mul(&level.transversal[k]);
            }
        }
        g
    }

    /// Transversal indices `k_0, ..., k_{m-1}` with `g = u_{m-1} ... u_0`
    /// for the element `g` with the given base image.
    pub fn factor_base_image(&self, image: &[A::Point]) -> Option<Vec<u32>> {
        if image.len() != self.levels.len() {
            return None;
        }
        let mut factors: Vec<u32> = Vec::with_capacity(image.len());
        for (i, gamma) in image.iter().enumerate() {
            let mut delta = gamma.clone();
            for (level, &k) in self.levels.iter().zip(&factors) {
                if k != 0 {
                    delta = self.action.apply(&level.transversal_inv[k as usize], &delta);
                }
            }
            factors.push(*self.levels[i].index.get(&delta)?);
        }
        Some(factors)
    }

    /// Image of `p` under the element with transversal factors `factors`,
    /// evaluated point by point.
    pub fn apply_factored(&self, factors: &[u32], p: &A::Point) -> A::Point {
        let mut q = p.clone();
        for (level, &k) in self.levels.iter().zip(factors).rev() {
            if k != 0 {
                q = self.action.apply(&level.transversal[k as usize], &q);
            }
        }
        q
    }

    /// Transversal element of level `lvl` carrying the base point to the
    /// `k`-th orbit point, rebuilt from the Schreier vector.
    pub fn schreier_path(&self, lvl: usize, k: usize) -> Vec<usize> {
        let level = &self.levels[lvl];
        let mut path = Vec::new();
        let mut k = k;
        while let Some((pred, id)) = level.schreier[k] {
            path.push(id as usize);
            k = pred as usize;
        }
        path.reverse();
        path
    }

    /// Checks the structural invariants: orbit product, base fixing and
    /// transversal consistency (Schreier vector agrees with the cached
    /// transversal).
    pub fn check_invariants(&self) -> bool {
        for (lvl, level) in self.levels.iter().enumerate() {
            for s in self.strong.iter().filter(|s| s.level >= lvl) {
                for earlier in &self.levels[..lvl] {
                    if self.action.apply(&s.elt, &earlier.base_point) != earlier.base_point {
                        return false;
                    }
                }
            }
            for (k, t) in level.transversal.iter().enumerate() {
                if self.action.apply(t, &level.base_point) != level.orbit[k] {
                    return false;
                }
                let rebuilt = self
                    .schreier_path(lvl, k)
                    .into_iter()
                    .fold(self.identity.clone(), |acc, id| acc.mul(&self.strong[id].elt));
                if rebuilt != *t || !t.mul(&level.transversal_inv[k]).is_identity() {
                    return false;
                }
            }
        }
        true
    }
}

/// Generators and chain for the normal closure of `seeds` in the group
/// generated by `group_gens`.
///
/// With `opts.prefer_known_order` and an expected order, membership during
/// the closure loop is decided by sifting through the uncertified chain
/// (sound for positive answers), and the final chain is certified by the
/// known-order test; otherwise every extension is verified deterministically.
pub fn normal_closure<E, A>(
    group_gens: &GeneratorSet<E>,
    seeds: Vec<E>,
    action: A,
    opts: &BsgsOptions,
    max_generators: usize,
) -> Result<(GeneratorSet<E>, BsgsChain<E, A>)>
where
    E: GroupElement,
    A: Action<E> + Clone,
{
    let known = match opts.expected_order {
        Some(t) if opts.prefer_known_order => Some(t),
        _ => None,
    };
    let inner = BsgsOptions { expected_order: None, prefer_known_order: false, ..opts.clone() };
    let mut gens: Vec<E> = seeds.into_iter().filter(|g| !g.is_identity()).collect();
    let mut chain = BsgsChain::empty(group_gens.identity().clone(), action);
    if known.is_some() {
        for g in &gens {
            chain.sift_and_add(g)?;
        }
    } else {
        chain.extend(&gens, &inner)?;
    }
    let mut i = 0;
    while i < gens.len() {
        for g in group_gens.elements() {
            let c = gens[i].conjugate_by(g);
            let member = match known {
                Some(_) => chain.sift(&c).residue.is_identity(),
                None => chain.contains(&c)?,
            };
            if !member {
                if gens.len() >= max_generators {
                    return Err(Error::BudgetExceeded {
                        budget: max_generators as u64,
                        what: "normal closure generators",
                    });
                }
                match known {
                    Some(_) => {
                        chain.sift_and_add(&c)?;
                    }
                    None => chain.extend(core::slice::from_ref(&c), &inner)?,
                }
                gens.push(c);
            }
        }
        i += 1;
    }
    if let Some(t) = known {
        if chain.generators.is_empty() {
            if t != 1 {
                return Err(Error::OrderMismatch { expected: t, actual: 1 });
            }
            chain.verified = Some(VerifyMode::Deterministic);
        } else {
            chain.random_phase(opts)?;
            chain.certify_known_order(t)?;
        }
    }
    let set = if gens.is_empty() {
        GeneratorSet::trivial(group_gens.identity().clone())
    } else if gens.len() <= FEW_GENERATORS {
        GeneratorSet::unlabelled(gens)?
    } else {
        few_generators(&chain, opts)?
    };
    Ok((set, chain))
}

const FEW_GENERATORS: usize = 4;

/// A handful of uniformly random elements generating the group of `chain`.
/// Each candidate set is checked by building its own chain and comparing
/// orders, so the result is exact.
fn few_generators<E, A>(chain: &BsgsChain<E, A>, opts: &BsgsOptions) -> Result<GeneratorSet<E>>
where
    E: GroupElement,
    A: Action<E> + Clone,
{
    let order = chain.order()?;
    let mut rng = SplitMix64::seed_from_u64(opts.seed ^ 0x5EED);
    let mut picks = vec![chain.random_element(&mut rng), chain.random_element(&mut rng)];
    loop {
        let set = GeneratorSet::unlabelled(picks.clone())?;
        let trial = match chain.verification() {
            Some(VerifyMode::KnownOrder(_)) => {
                BsgsOptions { expected_order: Some(order), prefer_known_order: true, ..opts.clone() }
            }
            _ => BsgsOptions { expected_order: None, prefer_known_order: false, ..opts.clone() },
        };
        // a failed known-order build means the picks generate too little
        if let Ok(c) = BsgsChain::build(&set, chain.action().clone(), &trial) {
            if c.order()? == order {
                return Ok(set);
            }
        }
        if picks.len() >= 3 * FEW_GENERATORS {
            return GeneratorSet::unlabelled(chain.generators().to_vec());
        }
        picks.push(chain.random_element(&mut rng));
    }
}

/// Derived subgroup: normal closure of the generator commutators.
pub fn derived_subgroup<E, A>(
    gens: &GeneratorSet<E>,
    action: A,
    opts: &BsgsOptions,
) -> Result<(GeneratorSet<E>, BsgsChain<E, A>)>
where
    E: GroupElement,
    A: Action<E> + Clone,
{
    let els = gens.elements();
    let mut seeds = Vec::new();
    for i in 0..els.len() {
        for j in i + 1..els.len() {
            seeds.push(els[i].commutator(&els[j]));
        }
    }
    normal_closure(gens, seeds, action, opts, 4096)
}

/// Conjugation on the elements of a group stored as base images of `chain`.
///
/// Points cost a few words each, so orbits of a million elements fit in
/// memory; images are computed pointwise through the transversals.
pub struct BaseImageConjugation<'a, E: GroupElement, A: Action<E>> {
    chain: &'a BsgsChain<E, A>,
}

impl<'a, E: GroupElement, A: Action<E>> BaseImageConjugation<'a, E, A> {
    pub fn new(chain: &'a BsgsChain<E, A>) -> Self {
        Self { chain }
    }

    /// Base image of an element of the chain's group.
    pub fn point(&self, e: &E) -> Vec<A::Point> {
        self.chain.base_image(e)
    }

    /// The element behind a point.
    pub fn element(&self, p: &[A::Point]) -> Option<E> {
        self.chain.element_from_base_image(p)
    }
}

impl<E: GroupElement, A: Action<E>> Action<E> for BaseImageConjugation<'_, E, A>
where
    E: Sync,
    A::Point: Sync,
{
    type Point = Vec<A::Point>;

    fn apply(&self, g: &E, p: &Self::Point) -> Self::Point {
        self.apply_with_inverse(g, &g.inv(), p)
    }

    fn apply_with_inverse(&self, g: &E, g_inv: &E, p: &Self::Point) -> Self::Point {
        let factors = self.chain.factor_base_image(p).expect("point outside the chain's group");
        let action = &self.chain.action;
        self.chain
            .levels
            .iter()
            .map(|level| {
                let q = action.apply(g_inv, &level.base_point);
                let q = self.chain.apply_factored(&factors, &q);
                action.apply(g, &q)
            })
            .collect()
    }

    fn key(&self, p: &Self::Point) -> Key {
        let mut out = Vec::new();
        for q in p {
            out.extend_from_slice(&self.chain.action.key(q));
        }
        out.into()
    }

    fn base_candidates(&self, _sample: &E) -> Vec<Self::Point> {
        Vec::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{FieldMatrix, PermAction, Permutation, VectorAction};

    fn perms(n: usize, cycles: &[&[&[usize]]]) -> GeneratorSet<Permutation> {
        GeneratorSet::unlabelled(cycles.iter().map(|c| Permutation::from_cycles(n, c).unwrap()).collect()).unwrap()
    }

    #[test]
    fn s3_order() {
        let g = perms(3, &[&[&[1, 2]], &[&[1, 2, 3]]]);
        let c = BsgsChain::build(&g, PermAction, &BsgsOptions::default()).unwrap();
        assert_eq!(c.order().unwrap(), 6);
        assert!(c.check_invariants());
    }

    #[test]
    fn trivial_group() {
        let g = GeneratorSet::trivial(Permutation::identity(5).unwrap());
        let c = BsgsChain::build(&g, PermAction, &BsgsOptions::default()).unwrap();
        assert_eq!(c.order().unwrap(), 1);
        assert!(c.contains(&Permutation::identity(5).unwrap()).unwrap());
    }

    #[test]
    fn membership() {
        let a4 = perms(4, &[&[&[1, 2, 3]], &[&[2, 3, 4]]]);
        let c = BsgsChain::build(&a4, PermAction, &BsgsOptions::default()).unwrap();
        assert_eq!(c.order().unwrap(), 12);
        assert!(!c.contains(&Permutation::from_cycles(4, &[&[1, 2]]).unwrap()).unwrap());
        assert!(c.contains(&Permutation::from_cycles(4, &[&[1, 2], &[3, 4]]).unwrap()).unwrap());
    }

    #[test]
    fn known_order_certificate() {
        let s5 = perms(5, &[&[&[1, 2]], &[&[1, 2, 3, 4, 5]]]);
        let c = BsgsChain::build(&s5, PermAction, &BsgsOptions::known_order(3, 120)).unwrap();
        assert_eq!(c.verification(), Some(VerifyMode::KnownOrder(120)));
        let err =
            BsgsChain::build(&s5, PermAction, &BsgsOptions { random_budget: 2000, ..BsgsOptions::known_order(3, 240) });
        assert!(matches!(err, Err(Error::OrderMismatch { expected: 240, .. })));
        let err = BsgsChain::build(&s5, PermAction, &BsgsOptions::known_order(3, 60));
        assert!(matches!(err, Err(Error::OrderMismatch { expected: 60, .. })));
    }

    #[test]
    fn unverified_chain_refuses_queries() {
        let mut c = BsgsChain::empty(Permutation::identity(4).unwrap(), PermAction);
        assert!(c.sift_and_add(&Permutation::from_cycles(4, &[&[1, 2]]).unwrap()).unwrap());
        assert!(!c.is_verified());
        assert_eq!(c.order(), Err(Error::Unverified));
        assert_eq!(c.contains(&Permutation::identity(4).unwrap()), Err(Error::Unverified));
    }

    #[test]
    fn derived_subgroup_comes_back_with_few_generators() {
        let pairs: Vec<[usize; 2]> = (1..=6).flat_map(|i| (i + 1..=6).map(move |j| [i, j])).collect();
        let cycles: Vec<[&[usize]; 1]> = pairs.iter().map(|p| [&p[..]]).collect();
        let refs: Vec<&[&[usize]]> = cycles.iter().map(|c| &c[..]).collect();
        let s6 = perms(6, &refs);
        assert_eq!(s6.len(), 15);
        for opts in [BsgsOptions::default(), BsgsOptions::known_order(2, 360)] {
            let (gens, chain) = derived_subgroup(&s6, PermAction, &opts).unwrap();
            assert_eq!(chain.order().unwrap(), 360);
            assert!(gens.len() <= FEW_GENERATORS, "{} generators", gens.len());
            let again = BsgsChain::build(&gens, PermAction, &BsgsOptions::default()).unwrap();
            assert_eq!(again.order().unwrap(), 360);
        }
    }

    #[test]
    fn random_elements_are_members() {
        let a5 = perms(5, &[&[&[1, 2, 3]], &[&[1, 2, 3, 4, 5]]]);
        let c = BsgsChain::build(&a5, PermAction, &BsgsOptions::default()).unwrap();
        let mut rng = SplitMix64::seed_from_u64(4);
        let mut seen = hashbrown::HashSet::new();
        for _ in 0..2000 {
            let g = c.random_element(&mut rng);
            assert!(c.contains(&g).unwrap());
            seen.insert(g);
        }
        assert_eq!(seen.len(), 60);
    }

    #[test]
    fn derived_series_of_s4() {
        let s4 = perms(4, &[&[&[1, 2]], &[&[1, 2, 3, 4]]]);
        let (d1, c1) = derived_subgroup(&s4, PermAction, &BsgsOptions::default()).unwrap();
        assert_eq!(c1.order().unwrap(), 12);
        let (d2, c2) = derived_subgroup(&d1, PermAction, &BsgsOptions::default()).unwrap();
        assert_eq!(c2.order().unwrap(), 4);
        let (_, c3) = derived_subgroup(&d2, PermAction, &BsgsOptions::default()).unwrap();
        assert_eq!(c3.order().unwrap(), 1);
    }

    #[test]
    fn derived_series_with_known_orders() {
        let s4 = perms(4, &[&[&[1, 2]], &[&[1, 2, 3, 4]]]);
        let (d1, c1) = derived_subgroup(&s4, PermAction, &BsgsOptions::known_order(5, 12)).unwrap();
        assert_eq!(c1.verification(), Some(VerifyMode::KnownOrder(12)));
        let (_, c2) = derived_subgroup(&d1, PermAction, &BsgsOptions::known_order(5, 4)).unwrap();
        assert_eq!(c2.order().unwrap(), 4);
        assert!(matches!(
            derived_subgroup(&s4, PermAction, &BsgsOptions { random_budget: 500, ..BsgsOptions::known_order(5, 24) }),
            Err(Error::OrderMismatch { .. })
        ));
    }

    #[test]
    fn abelian_derived_is_trivial() {
        let c4 = perms(4, &[&[&[1, 2, 3, 4]]]);
        let (_, c) = derived_subgroup(&c4, PermAction, &BsgsOptions::default()).unwrap();
        assert_eq!(c.order().unwrap(), 1);
    }

    #[test]
    fn gl3_2_on_vectors() {
        // GL(3,2) has order 168
        let a = FieldMatrix::parse_literals("11.\n.1.\n..1\n", 2).unwrap().remove(0);
        let b = FieldMatrix::parse_literals(".1.\n..1\n1..\n", 2).unwrap().remove(0);
        let g = GeneratorSet::unlabelled(vec![a, b]).unwrap();
        let c = BsgsChain::build(&g, VectorAction::new(), &BsgsOptions::default()).unwrap();
        assert_eq!(c.order().unwrap(), 168);
        assert!(c.check_invariants());
    }

    #[test]
    fn base_image_reconstruction() {
        let s5 = perms(5, &[&[&[1, 2]], &[&[1, 2, 3, 4, 5]]]);
        let c = BsgsChain::build(&s5, PermAction, &BsgsOptions::default()).unwrap();
        let mut stream = RandomElementStream::new(&s5, 11);
        for _ in 0..50 {
            let g = stream.next_element();
            assert_eq!(c.element_from_base_image(&c.base_image(&g)), Some(g));
        }
    }

    #[test]
    fn factored_application_matches_element() {
        let s6 = perms(6, &[&[&[1, 2]], &[&[1, 2, 3, 4, 5, 6]]]);
        let c = BsgsChain::build(&s6, PermAction, &BsgsOptions::default()).unwrap();
        let mut stream = RandomElementStream::new(&s6, 5);
        for _ in 0..30 {
            let g = stream.next_element();
            let f = c.factor_base_image(&c.base_image(&g)).unwrap();
            for p in 0..6u32 {
                assert_eq!(c.apply_factored(&f, &p), g.image(p as usize) as u32);
            }
        }
    }

    #[test]
    fn base_image_conjugation_class() {
        let s6 = perms(6, &[&[&[1, 2]], &[&[1, 2, 3, 4, 5, 6]]]);
        let c = BsgsChain::build(&s6, PermAction, &BsgsOptions::default()).unwrap();
        let action = BaseImageConjugation::new(&c);
        let x = Permutation::from_cycles(6, &[&[1, 2, 3]]).unwrap();
        let orbit = crate::orbit::orbit_enumerate(action.point(&x), &s6, &action, &Default::default()).unwrap();
        assert_eq!(orbit.size(), 40);
        let g = stream_element(&s6);
        let moved = action.apply(&g, &action.point(&x));
        assert_eq!(action.element(&moved), Some(x.conjugate_by(&g)));
    }

    fn stream_element(gens: &GeneratorSet<Permutation>) -> Permutation {
        RandomElementStream::new(gens, 99).next_element()
    }
}

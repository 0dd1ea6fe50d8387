//! Orbit enumeration, orbit partitions and stabilizers.
//!
//! An [`OrbitIndex`] stores one key per visited point plus a Schreier link
//! (predecessor, generator). Points themselves are kept only while a BFS
//! level is being expanded; any point can be rebuilt from the root by
//! following its Schreier path, and [`OrbitIndex::for_each_level`] replays
//! the whole orbit level by level in bounded memory.
//!
//! Indices are assigned in BFS discovery order with a fixed generator order,
//! so the index content, including Schreier links, is independent of thread
//! scheduling.

use alloc::vec::Vec;
use hashbrown::HashMap;

use crate::unionfind::UnionFind;
use crate::{Action, BsgsChain, ElementKeyer, Error, GeneratorSet, GroupElement, Key, RandomElementStream, Result};

const ROOT: u32 = u32::MAX;

#[cfg(feature = "parallel")]
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.iter().map(f).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MemoryMode {
    /// Full points for the current and next BFS level only.
    #[default]
    Frontier,
    /// Keys only; each point is rebuilt along its Schreier path when needed.
    Reconstruct,
}

#[derive(Clone, Copy, Debug)]
pub struct OrbitOptions {
    pub memory_mode: MemoryMode,
    pub max_points: u64,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self { memory_mode: MemoryMode::Frontier, max_points: 1 << 31 }
    }
}

/// Keyed index of one orbit with Schreier links back to its root.
#[derive(Clone, Debug)]
pub struct OrbitIndex<P> {
    root: P,
    keys: HashMap<Key, u32>,
    parent: Vec<(u32, u16)>,
    /// Start index of every BFS level, followed by the orbit size.
    level_starts: Vec<u32>,
}

impl<P: Clone> OrbitIndex<P> {
    pub fn root(&self) -> &P {
        &self.root
    }

    pub fn size(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Number of BFS levels (the root alone is one level).
    pub fn depth(&self) -> usize {
        self.level_starts.len() - 1
    }

    pub fn lookup(&self, key: &[u8]) -> Option<u32> {
        self.keys.get(key).copied()
    }

    /// Generator indices leading from the root to point `idx`.
    pub fn path(&self, idx: u32) -> Vec<usize> {
        let mut out = Vec::new();
        let mut i = idx;
        while self.parent[i as usize].0 != ROOT {
            let (pred, g) = self.parent[i as usize];
            out.push(g as usize);
            i = pred;
        }
        out.reverse();
        out
    }

    /// Element `t` with `root^t` equal to point `idx`.
    pub fn transversal<E: GroupElement>(&self, idx: u32, gens: &GeneratorSet<E>) -> E {
        self.path(idx).into_iter().fold(gens.identity().clone(), |acc, g| acc.mul(&gens.elements()[g]))
    }

    /// Rebuilds point `idx` along its Schreier path.
    pub fn point<E: GroupElement, A: Action<E, Point = P>>(&self, idx: u32, gens: &GeneratorSet<E>, action: &A) -> P {
        self.path(idx).into_iter().fold(self.root.clone(), |p, g| action.apply(&gens.elements()[g], &p))
    }

    /// Replays the orbit level by level, calling `f(first_index, points)`
    /// for each BFS level. Only two levels are materialised at a time.
    pub fn for_each_level<E, A>(
        &self,
        gens: &GeneratorSet<E>,
        action: &A,
        mut f: impl FnMut(u32, &[P]) -> Result<()>,
    ) -> Result<()>
    where
        E: GroupElement,
        A: Action<E, Point = P>,
        P: Send + Sync,
    {
        let inverses: Vec<E> = gens.elements().iter().map(|g| g.inv()).collect();
        let mut current = alloc::vec![self.root.clone()];
        f(0, &current)?;
        let mut prev_start = 0u32;
        for w in self.level_starts.windows(2).skip(1) {
            let (start, end) = (w[0], w[1]);
            let ids: Vec<u32> = (start..end).collect();
            let next = par_map(&ids, |&i| {
                let (pred, g) = self.parent[i as usize];
                let g = g as usize;
                action.apply_with_inverse(&gens.elements()[g], &inverses[g], &current[(pred - prev_start) as usize])
            });
            f(start, &next)?;
            current = next;
            prev_start = start;
        }
        Ok(())
    }
}

/// BFS closure of `start` under the generators.
pub fn orbit_enumerate<E, A>(
    start: A::Point,
    gens: &GeneratorSet<E>,
    action: &A,
    opts: &OrbitOptions,
) -> Result<OrbitIndex<A::Point>>
where
    E: GroupElement,
    A: Action<E>,
{
    orbit_enumerate_with_progress(start, gens, action, opts, |_, _| {})
}

/// [`orbit_enumerate`] reporting `(level, points so far)` after each level.
pub fn orbit_enumerate_with_progress<E, A>(
    start: A::Point,
    gens: &GeneratorSet<E>,
    action: &A,
    opts: &OrbitOptions,
    mut progress: impl FnMut(usize, usize),
) -> Result<OrbitIndex<A::Point>>
where
    E: GroupElement,
    A: Action<E>,
{
    let inverses: Vec<E> = gens.elements().iter().map(|g| g.inv()).collect();
    let mut index =
        OrbitIndex { root: start.clone(), keys: HashMap::new(), parent: Vec::new(), level_starts: Vec::new() };
    index.keys.insert(action.key(&start), 0);
    index.parent.push((ROOT, 0));
    index.level_starts.push(0);
    let mut frontier: Vec<A::Point> = alloc::vec![start];
    let mut frontier_start = 0u32;
    let ngens = gens.len();
    while !frontier.is_empty() || opts.memory_mode == MemoryMode::Reconstruct && frontier_start < index.size() as u32 {
        let level_end = index.size() as u32;
        index.level_starts.push(level_end);
        if frontier_start == level_end {
            index.level_starts.pop();
            break;
        }
        let points: Vec<A::Point> = match opts.memory_mode {
            MemoryMode::Frontier => core::mem::take(&mut frontier),
            MemoryMode::Reconstruct => {
                let ids: Vec<u32> = (frontier_start..level_end).collect();
                par_map(&ids, |&i| index.point(i, gens, action))
            }
        };
        let pairs: Vec<(usize, usize)> = (0..points.len()).flat_map(|p| (0..ngens).map(move |g| (p, g))).collect();
        let keys = par_map(&pairs, |&(p, g)| action.image_key(&gens.elements()[g], &inverses[g], &points[p]));
        let mut fresh = Vec::new();
        for (&(p, g), key) in pairs.iter().zip(keys) {
            if index.keys.contains_key(&key) {
                continue;
            }
            let n = index.parent.len() as u32;
            if n as u64 >= opts.max_points {
                return Err(Error::MemoryBudgetExceeded(opts.max_points));
            }
            index.keys.insert(key, n);
            index.parent.push((frontier_start + p as u32, g as u16));
            fresh.push((p, g));
        }
        if opts.memory_mode == MemoryMode::Frontier {
            frontier =
                par_map(&fresh, |&(p, g)| action.apply_with_inverse(&gens.elements()[g], &inverses[g], &points[p]));
        }
        frontier_start = level_end;
        progress(index.level_starts.len() - 1, index.size());
        if fresh.is_empty() {
            break;
        }
    }
    if *index.level_starts.last().expect("nonempty") != index.size() as u32 {
        index.level_starts.push(index.size() as u32);
    }
    Ok(index)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitEntry {
    /// Smallest index of the orbit in the partitioned [`OrbitIndex`].
    pub representative: u32,
    pub size: u64,
}

/// Partition of an indexed point set into orbits, in order of their
/// representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    pub orbits: Vec<OrbitEntry>,
}

impl OrbitPartition {
    /// Orbit sizes sorted increasingly.
    pub fn sizes(&self) -> Vec<u64> {
        let mut s: Vec<u64> = self.orbits.iter().map(|o| o.size).collect();
        s.sort_unstable();
        s
    }

    pub fn total(&self) -> u64 {
        self.orbits.iter().map(|o| o.size).sum()
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }
}

/// Partitions the points of `index` (built from `point_gens`) into orbits of
/// the group generated by `acting`.
pub fn orbit_partition<E, A>(
    index: &OrbitIndex<A::Point>,
    point_gens: &GeneratorSet<E>,
    acting: &GeneratorSet<E>,
    action: &A,
) -> Result<OrbitPartition>
where
    E: GroupElement,
    A: Action<E>,
{
    let n = index.size();
    let mut uf = UnionFind::new(n);
    let acting_inv: Vec<E> = acting.elements().iter().map(|g| g.inv()).collect();
    index.for_each_level(point_gens, action, |start, points| {
        let targets = par_map(points, |p| {
            acting
                .elements()
                .iter()
                .zip(&acting_inv)
                .map(|(c, ci)| index.lookup(&action.image_key(c, ci, p)))
                .collect::<Vec<_>>()
        });
        for (i, ts) in targets.into_iter().enumerate() {
            for t in ts {
                let t = t.ok_or(Error::PointSetNotClosed)?;
                uf.union(start + i as u32, t);
            }
        }
        Ok(())
    })?;
    let mut by_root: HashMap<u32, usize> = HashMap::new();
    let mut orbits: Vec<OrbitEntry> = Vec::new();
    for i in 0..n as u32 {
        let r = uf.find(i);
        match by_root.get(&r) {
            Some(&k) => orbits[k].size += 1,
            None => {
                by_root.insert(r, orbits.len());
                orbits.push(OrbitEntry { representative: i, size: 1 });
            }
        }
    }
    Ok(OrbitPartition { orbits })
}

#[derive(Clone, Copy, Debug)]
pub struct StabilizerOptions {
    pub seed: u64,
    /// Random Schreier generators tried before giving up.
    pub budget: u64,
}

impl Default for StabilizerOptions {
    fn default() -> Self {
        Self { seed: 1, budget: 100_000 }
    }
}

/// Stabilizer of the root of `index` in `⟨gens⟩`, a group of known order.
///
/// Random Schreier generators `u · t(u)^-1` are sifted into a chain over
/// `chain_action` until it reaches `group_order / |orbit|`, which certifies
/// the chain.
pub fn orbit_stabilizer<E, A, B>(
    index: &OrbitIndex<A::Point>,
    gens: &GeneratorSet<E>,
    action: &A,
    chain_action: B,
    group_order: u128,
    opts: &StabilizerOptions,
) -> Result<(GeneratorSet<E>, BsgsChain<E, B>)>
where
    E: GroupElement,
    A: Action<E>,
    B: Action<E>,
{
    let orbit = index.size() as u128;
    if orbit == 0 || !group_order.is_multiple_of(orbit) {
        return Err(Error::OrbitSizeMismatch { orbit, group: group_order });
    }
    let target = group_order / orbit;
    let mut chain = BsgsChain::empty(gens.identity().clone(), chain_action);
    let root_key = action.key(index.root());
    let mut stream = RandomElementStream::new(gens, opts.seed);
    let mut draws = 0u64;
    while chain.claimed_order() < target {
        if draws >= opts.budget {
            return Err(Error::BudgetExceeded { budget: opts.budget, what: "random Schreier generators" });
        }
        draws += 1;
        let u = stream.next_element();
        let u_inv = u.inv();
        let idx = index.lookup(&action.image_key(&u, &u_inv, index.root())).ok_or(Error::PointSetNotClosed)?;
        let t = index.transversal(idx, gens);
        let s = u.mul(&t.inv());
        if action.image_key(&s, &s.inv(), index.root()) != root_key {
            return Err(Error::VerificationFailed(alloc::string::String::from("Schreier generator moves the root")));
        }
        chain.sift_and_add(&s)?;
    }
    chain.certify(target)?;
    let stab = if chain.generators().is_empty() {
        GeneratorSet::trivial(gens.identity().clone())
    } else {
        GeneratorSet::unlabelled(chain.generators().to_vec())?
    };
    Ok((stab, chain))
}

#[derive(Clone, Copy, Debug)]
pub struct MonteCarloOptions {
    pub seed: u64,
    /// Conjugates drawn before giving up.
    pub budget: u64,
    /// Consecutive collisions without growth that end the search.
    pub plateau: u32,
}

impl Default for MonteCarloOptions {
    fn default() -> Self {
        Self { seed: 1, budget: 1_000_000, plateau: 8 }
    }
}

#[derive(Clone, Debug)]
pub struct MonteCarloCentralizer<E: GroupElement, B: Action<E>> {
    pub generators: GeneratorSet<E>,
    /// Deterministically verified chain of the collected subgroup.
    pub chain: BsgsChain<E, B>,
    /// Certified lower bound on the centralizer order; equality is heuristic.
    pub order: u128,
    pub samples: u64,
    pub collisions: u32,
}

impl<E: GroupElement, B: Action<E>> MonteCarloCentralizer<E, B> {
    pub const NOTE: &'static str = "lower bound, heuristic equality";
}

/// Birthday-collision centralizer search.
///
/// Random conjugates `x^g` are keyed with `keyer` (which must be injective on
/// the class); each stored `g` is kept as its base image in `ambient`. Two
/// draws with equal conjugates give the centralizing element `g·h^-1`, which
/// is added to a chain over `chain_action` and re-verified deterministically.
/// The search stops after `plateau` consecutive collisions leave the order
/// unchanged.
pub fn centralizer_monte_carlo<E, K, A, B>(
    x: &E,
    gens: &GeneratorSet<E>,
    ambient: &BsgsChain<E, A>,
    keyer: &K,
    chain_action: B,
    opts: &MonteCarloOptions,
) -> Result<MonteCarloCentralizer<E, B>>
where
    E: GroupElement,
    K: ElementKeyer<E>,
    A: Action<E>,
    B: Action<E>,
{
    let order = ambient.order()?;
    if x.is_identity() {
        let mut chain = BsgsChain::empty(gens.identity().clone(), chain_action);
        chain.extend(gens.elements(), &crate::BsgsOptions::known_order(opts.seed, order))?;
        return Ok(MonteCarloCentralizer { generators: gens.clone(), chain, order, samples: 0, collisions: 0 });
    }
    let mut chain = BsgsChain::empty(gens.identity().clone(), chain_action);
    let mut seen: HashMap<Key, Vec<A::Point>> = HashMap::new();
    let mut stream = RandomElementStream::new(gens, opts.seed);
    let mut collisions = 0u32;
    let mut quiet = 0u32;
    for samples in 1..=opts.budget {
        let g = stream.next_element();
        let g_inv = g.inv();
        let key = keyer.conjugate_key(x, &g, &g_inv);
        let h = match seen.get(&key) {
            None => {
                seen.insert(key, ambient.base_image(&g));
                continue;
            }
            Some(img) => ambient
                .element_from_base_image(img)
                .ok_or_else(|| Error::VerificationFailed(alloc::string::String::from("stored base image")))?,
        };
        if h == g {
            continue;
        }
        let c = g.mul(&h.inv());
        if x.conjugate_by(&c) != *x {
            return Err(Error::VerificationFailed(alloc::string::String::from(
                "collision element does not centralize",
            )));
        }
        collisions += 1;
        let before = chain.claimed_order();
        if chain.sift_and_add(&c)? {
            chain.verify_deterministic()?;
        }
        if chain.claimed_order() > before {
            quiet = 0;
        } else {
            quiet += 1;
            if quiet >= opts.plateau {
                chain.verify_deterministic()?;
                let generators = GeneratorSet::unlabelled(chain.generators().to_vec())?;
                let order = chain.order()?;
                return Ok(MonteCarloCentralizer { generators, chain, order, samples, collisions });
            }
        }
    }
    Err(Error::BudgetExceeded { budget: opts.budget, what: "Monte Carlo conjugates" })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{BsgsOptions, ConjugationAction, FullKey, PermAction, Permutation};

    fn s(n: usize) -> GeneratorSet<Permutation> {
        let cyc: Vec<usize> = (1..=n).collect();
        GeneratorSet::unlabelled(alloc::vec![
            Permutation::from_cycles(n, &[&[1, 2]]).unwrap(),
            Permutation::from_cycles(n, &[&cyc]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn point_orbit_and_fixed_point() {
        let g = s(5);
        let idx = orbit_enumerate(0u32, &g, &PermAction, &OrbitOptions::default()).unwrap();
        assert_eq!(idx.size(), 5);
        let h = GeneratorSet::unlabelled(alloc::vec![Permutation::from_cycles(5, &[&[1, 2]]).unwrap()]).unwrap();
        let fixed = orbit_enumerate(4u32, &h, &PermAction, &OrbitOptions::default()).unwrap();
        assert_eq!(fixed.size(), 1);
    }

    #[test]
    fn replayed_levels_match_stored_points() {
        // the first point of each level of the S6 3-cycle class does not
        // always have fresh neighbours
        let g = s(6);
        let act = ConjugationAction::new(FullKey);
        let t = Permutation::from_cycles(6, &[&[1, 2, 3]]).unwrap();
        let idx = orbit_enumerate(t, &g, &act, &OrbitOptions::default()).unwrap();
        let mut seen = 0u32;
        idx.for_each_level(&g, &act, |start, points| {
            assert_eq!(start, seen);
            for (i, p) in points.iter().enumerate() {
                assert_eq!(idx.lookup(&act.key(p)), Some(start + i as u32));
            }
            seen += points.len() as u32;
            Ok(())
        })
        .unwrap();
        assert_eq!(seen as usize, idx.size());
    }

    #[test]
    fn class_of_transpositions_in_s5() {
        let g = s(5);
        let act = ConjugationAction::new(FullKey);
        let t = Permutation::from_cycles(5, &[&[1, 2]]).unwrap();
        for mode in [MemoryMode::Frontier, MemoryMode::Reconstruct] {
            let idx = orbit_enumerate(t.clone(), &g, &act, &OrbitOptions { memory_mode: mode, ..Default::default() })
                .unwrap();
            assert_eq!(idx.size(), 10);
            for i in 0..10 {
                let p = idx.point(i, &g, &act);
                assert_eq!(idx.lookup(&act.key(&p)), Some(i));
                let tr = idx.transversal(i, &g);
                assert_eq!(t.conjugate_by(&tr), p);
            }
        }
    }

    #[test]
    fn stabilizer_orders() {
        let g = s(5);
        let act = ConjugationAction::new(FullKey);
        let t = Permutation::from_cycles(5, &[&[1, 2]]).unwrap();
        let idx = orbit_enumerate(t, &g, &act, &OrbitOptions::default()).unwrap();
        let (_, chain) = orbit_stabilizer(&idx, &g, &act, PermAction, 120, &StabilizerOptions::default()).unwrap();
        assert_eq!(chain.order().unwrap(), 12);
    }

    #[test]
    fn partition_under_point_stabilizer() {
        // S4 = stabilizer of point 5 acting on transpositions of S5: {(i 5)} and {(i j), i,j<5}
        let g = s(5);
        let act = ConjugationAction::new(FullKey);
        let t = Permutation::from_cycles(5, &[&[1, 2]]).unwrap();
        let idx = orbit_enumerate(t, &g, &act, &OrbitOptions::default()).unwrap();
        let s4 = GeneratorSet::unlabelled(alloc::vec![
            Permutation::from_cycles(5, &[&[1, 2]]).unwrap(),
            Permutation::from_cycles(5, &[&[1, 2, 3, 4]]).unwrap(),
        ])
        .unwrap();
        let part = orbit_partition(&idx, &g, &s4, &act).unwrap();
        assert_eq!(part.sizes(), alloc::vec![4, 6]);
        let trivial = GeneratorSet::trivial(Permutation::identity(5).unwrap());
        let part = orbit_partition(&idx, &g, &trivial, &act).unwrap();
        assert_eq!(part.sizes(), alloc::vec![1; 10]);
    }

    #[test]
    fn partition_detects_open_sets() {
        let a4 = GeneratorSet::unlabelled(alloc::vec![
            Permutation::from_cycles(4, &[&[1, 2, 3]]).unwrap(),
            Permutation::from_cycles(4, &[&[2, 3, 4]]).unwrap(),
        ])
        .unwrap();
        let act = ConjugationAction::new(FullKey);
        let c = Permutation::from_cycles(4, &[&[1, 2, 3]]).unwrap();
        let idx = orbit_enumerate(c, &a4, &act, &OrbitOptions::default()).unwrap();
        assert_eq!(idx.size(), 4);
        let s4 = s(4);
        assert_eq!(orbit_partition(&idx, &a4, &s4, &act), Err(Error::PointSetNotClosed));
    }

    #[test]
    fn monte_carlo_matches_exact() {
        let g = s(6);
        let ambient = BsgsChain::build(&g, PermAction, &BsgsOptions::default()).unwrap();
        let x = Permutation::from_cycles(6, &[&[1, 2, 3]]).unwrap();
        let r = centralizer_monte_carlo(&x, &g, &ambient, &FullKey, PermAction, &MonteCarloOptions::default()).unwrap();
        // C_{S6}((1 2 3)) = C3 x S3
        assert_eq!(r.order, 18);
        for e in r.generators.elements() {
            assert_eq!(x.conjugate_by(e), x);
        }
        let id = Permutation::identity(6).unwrap();
        let r =
            centralizer_monte_carlo(&id, &g, &ambient, &FullKey, PermAction, &MonteCarloOptions::default()).unwrap();
        assert_eq!(r.order, 720);
    }
}

//! Small subgroups as multiplication tables, and isomorphism-invariant
//! fingerprints used to name them.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::{factorize, lcm, Error, FieldMatrix, GeneratorSet, GroupElement, Key, Permutation, Result};

pub const DEFAULT_CAP: usize = 10_000;
const MAX_CAP: usize = u16::MAX as usize;

/// Every element of a finite group with its full multiplication table.
///
/// Index 0 is the identity. Elements are numbered in BFS order from the
/// generators, so the table depends only on the ordered generating set.
#[derive(Clone, Debug)]
pub struct ElementTable<E> {
    elements: Vec<E>,
    mult: Vec<u16>,
    inverse: Vec<u16>,
    generators: Vec<u16>,
}

/// BFS closure of `gens`, failing once more than `cap` elements appear.
pub fn enumerate_subgroup<E: GroupElement>(gens: &GeneratorSet<E>, cap: usize) -> Result<ElementTable<E>> {
    ElementTable::enumerate(gens, cap)
}

impl<E: GroupElement> ElementTable<E> {
    pub fn enumerate(gens: &GeneratorSet<E>, cap: usize) -> Result<Self> {
        let cap = cap.min(MAX_CAP);
        let g = gens.elements();
        let mut index: HashMap<Key, u16> = HashMap::new();
        let mut elements = vec![gens.identity().clone()];
        index.insert(gens.identity().canonical_key(), 0);
        // regular representation: right[k][i] = index of elements[i]·g_k
        let mut right: Vec<Vec<u16>> = vec![Vec::new(); g.len()];
        let mut parent: Vec<(u16, u16)> = vec![(0, 0)];
        let mut i = 0;
        while i < elements.len() {
            for (k, gk) in g.iter().enumerate() {
                let y = elements[i].mul(gk);
                let key = y.canonical_key();
                let j = match index.get(&key) {
                    Some(&j) => j,
                    None => {
                        if elements.len() >= cap {
                            return Err(Error::CapExceeded { cap });
                        }
                        let j = elements.len() as u16;
                        index.insert(key, j);
                        elements.push(y);
                        parent.push((i as u16, k as u16));
                        j
                    }
                };
                right[k].push(j);
            }
            i += 1;
        }
        let n = elements.len();
        let mut mult = vec![0u16; n * n];
        for a in 0..n {
            mult[a * n] = a as u16;
        }
        // e_a·e_b = (e_a·e_p)·g_k when e_b = e_p·g_k
        for b in 1..n {
            let (p, k) = parent[b];
            for a in 0..n {
                mult[a * n + b] = right[k as usize][mult[a * n + p as usize] as usize];
            }
        }
        let mut inverse = vec![0u16; n];
        for a in 0..n {
            for b in 0..n {
                if mult[a * n + b] == 0 {
                    inverse[a] = b as u16;
                    break;
                }
            }
        }
        let mut generators: Vec<u16> = (0..g.len()).map(|k| right[k][0]).collect();
        generators.dedup();
        Ok(Self { elements, mult, inverse, generators })
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }
}

impl<E> ElementTable<E> {
    pub fn order(&self) -> usize {
        self.inverse.len()
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order() + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    pub fn generator_indices(&self) -> Vec<usize> {
        self.generators.iter().map(|&g| g as usize).collect()
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn commutator(&self, a: usize, b: usize) -> usize {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(self.inv(ba), ab)
    }

    /// Membership flags of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> Vec<bool> {
        let mut member = vec![false; self.order()];
        member[0] = true;
        let mut queue = vec![0usize];
        while let Some(x) = queue.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !member[y] {
                    member[y] = true;
                    queue.push(y);
                }
            }
        }
        member
    }

    /// Generators of the derived subgroup of the subgroup generated by `gens`.
    fn derived(&self, gens: &[usize]) -> Vec<usize> {
        let h: Vec<usize> = self.closure(gens).iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect();
        let mut out = Vec::new();
        let mut member = self.closure(&out);
        for &a in &h {
            for &b in &h {
                let c = self.commutator(a, b);
                if !member[c] {
                    out.push(c);
                    member = self.closure(&out);
                }
            }
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| self.mul(a, self.inv(a)) == 0 && self.mul(0, a) == a && self.mul(a, 0) == a)
    }

    pub fn fingerprint(&self) -> StructureFingerprint {
        let n = self.order();
        let mut order_statistics = BTreeMap::new();
        let mut exponent = 1u128;
        for a in 0..n {
            let o = self.element_order(a);
            *order_statistics.entry(o).or_insert(0u64) += 1;
            exponent = lcm(exponent, o as u128);
        }
        let gens = self.generator_indices();
        let center_order = (0..n).filter(|&a| gens.iter().all(|&g| self.mul(a, g) == self.mul(g, a))).count() as u64;
        let mut derived_orders = vec![n as u64];
        let mut current = gens;
        loop {
            let next = self.derived(&current);
            let size = self.closure(&next).iter().filter(|&&m| m).count() as u64;
            if size == *derived_orders.last().expect("nonempty") {
                break;
            }
            derived_orders.push(size);
            if size == 1 {
                break;
            }
            current = next;
        }
        StructureFingerprint {
            order: n as u64,
            order_statistics,
            abelian: center_order == n as u64,
            derived_orders,
            center_order,
            exponent: exponent as u64,
        }
    }
}

/// Whether every prime dividing the group order lies in `primes`.
pub fn is_pi_group<E>(table: &ElementTable<E>, primes: &[u64]) -> bool {
    factorize(table.order() as u128).iter().all(|(p, _)| primes.contains(&(*p as u64)))
}

/// Isomorphism invariants of a finite group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StructureFingerprint {
    pub order: u64,
    /// Element order → number of elements of that order.
    pub order_statistics: BTreeMap<u64, u64>,
    /// Orders along the derived series, starting with the group order and
    /// stopping at 1 or at the first repeat.
    pub derived_orders: Vec<u64>,
    pub center_order: u64,
    pub exponent: u64,
    pub abelian: bool,
}

impl StructureFingerprint {
    pub fn is_solvable(&self) -> bool {
        self.derived_orders.last() == Some(&1)
    }

    /// `key = value` lines with keys in sorted order.
    pub fn to_text(&self) -> String {
        let stats: Vec<String> = self.order_statistics.iter().map(|(o, c)| alloc::format!("{o}:{c}")).collect();
        let derived: Vec<String> = self.derived_orders.iter().map(u64::to_string).collect();
        alloc::format!(
            "abelian = {}\ncenter_order = {}\nderived_orders = {}\nexponent = {}\norder = {}\norder_statistics = {}\n",
            self.abelian,
            self.center_order,
            derived.join(" "),
            self.exponent,
            self.order,
            stats.join(" ")
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Snapshot(alloc::format!("bad line `{line}`")))?;
            if fields.insert(k.trim(), v.trim()).is_some() {
                return Err(Error::Snapshot(alloc::format!("duplicate key `{}`", k.trim())));
            }
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| Error::Snapshot(alloc::format!("missing key `{k}`")));
        let num = |s: &str| s.parse::<u64>().map_err(|_| Error::Snapshot(alloc::format!("bad number `{s}`")));
        let mut order_statistics = BTreeMap::new();
        for item in get("order_statistics")?.split_whitespace() {
            let (o, c) =
                item.split_once(':').ok_or_else(|| Error::Snapshot(alloc::format!("bad statistic `{item}`")))?;
            order_statistics.insert(num(o)?, num(c)?);
        }
        let abelian = match get("abelian")? {
            "true" => true,
            "false" => false,
            other => return Err(Error::Snapshot(alloc::format!("bad flag `{other}`"))),
        };
        let fp = Self {
            order: num(get("order")?)?,
            order_statistics,
            derived_orders: get("derived_orders")?.split_whitespace().map(num).collect::<Result<_>>()?,
            center_order: num(get("center_order")?)?,
            exponent: num(get("exponent")?)?,
            abelian,
        };
        if fp.order_statistics.values().sum::<u64>() != fp.order || fp.derived_orders.first() != Some(&fp.order) {
            return Err(Error::Snapshot("inconsistent fingerprint".to_string()));
        }
        Ok(fp)
    }
}

impl fmt::Display for StructureFingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let stats: Vec<String> = self.order_statistics.iter().map(|(o, c)| alloc::format!("{o}:{c}")).collect();
        write!(
            f,
            "order {} [{}] derived {:?} center {} exponent {}{}",
            self.order,
            stats.join(" "),
            self.derived_orders,
            self.center_order,
            self.exponent,
            if self.abelian { " abelian" } else { "" }
        )
    }
}

/// Named fingerprints.
#[derive(Clone, Debug, Default)]
pub struct FingerprintCatalog {
    entries: Vec<(String, StructureFingerprint)>,
}

fn perm_group(n: usize, cycles: &[&[&[usize]]]) -> GeneratorSet<Permutation> {
    GeneratorSet::unlabelled(cycles.iter().map(|c| Permutation::from_cycles(n, c).expect("valid cycles")).collect())
        .expect("compatible")
}

fn matrix_group(p: u8, literals: &str) -> GeneratorSet<FieldMatrix> {
    GeneratorSet::unlabelled(FieldMatrix::parse_literals(literals, p).expect("valid literal")).expect("compatible")
}

impl FingerprintCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fingerprints of the groups with a direct construction: `3`, `3^2`,
    /// `A4`, `SL2(3)`, `3^(1+2)+` and `3xSL2(3)`.
    pub fn reference() -> Self {
        let fp = |t: Result<ElementTable<Permutation>>| t.expect("small group").fingerprint();
        let fm = |t: Result<ElementTable<FieldMatrix>>| t.expect("small group").fingerprint();
        let mut c = Self::new();
        c.insert("3", fp(ElementTable::enumerate(&perm_group(3, &[&[&[1, 2, 3]]]), DEFAULT_CAP)));
        c.insert("3^2", fp(ElementTable::enumerate(&perm_group(6, &[&[&[1, 2, 3]], &[&[4, 5, 6]]]), DEFAULT_CAP)));
        c.insert("A4", fp(ElementTable::enumerate(&perm_group(4, &[&[&[1, 2, 3]], &[&[2, 3, 4]]]), DEFAULT_CAP)));
        c.insert("SL2(3)", fm(ElementTable::enumerate(&matrix_group(3, "11\n.1\n\n.1\n2.\n"), DEFAULT_CAP)));
        c.insert(
            "3^(1+2)+",
            fm(ElementTable::enumerate(&matrix_group(3, "11.\n.1.\n..1\n\n1..\n.11\n..1\n"), DEFAULT_CAP)),
        );
        c.insert(
            "3xSL2(3)",
            fm(ElementTable::enumerate(
                &matrix_group(3, "11..\n.1..\n..1.\n...1\n\n1...\n.1..\n..11\n...1\n\n1...\n.1..\n...1\n..2.\n"),
                DEFAULT_CAP,
            )),
        );
        c
    }

    /// Parses snapshots written by [`FingerprintCatalog::to_text`]: a
    /// `[name]` header followed by the fingerprint's `key = value` lines.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = Self::new();
        let mut name: Option<String> = None;
        let mut body = String::new();
        let mut flush = |name: &mut Option<String>, body: &mut String| -> Result<()> {
            if let Some(n) = name.take() {
                c.insert(&n, StructureFingerprint::from_text(body)?);
            }
            body.clear();
            Ok(())
        };
        for line in text.lines() {
            let t = line.trim();
            if let Some(rest) = t.strip_prefix('[') {
                flush(&mut name, &mut body)?;
                let n = rest.strip_suffix(']').ok_or_else(|| Error::Snapshot(alloc::format!("bad header `{t}`")))?;
                name = Some(n.to_string());
            } else if !t.is_empty() && !t.starts_with('#') {
                if name.is_none() {
                    return Err(Error::Snapshot("entry before the first header".to_string()));
                }
                body.push_str(t);
                body.push('\n');
            }
        }
        flush(&mut name, &mut body)?;
        Ok(c)
    }

    /// Entries sorted by name.
    pub fn to_text(&self) -> String {
        let mut sorted: Vec<&(String, StructureFingerprint)> = self.entries.iter().collect();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out = String::new();
        for (name, fp) in sorted {
            out.push('[');
            out.push_str(name);
            out.push_str("]\n");
            out.push_str(&fp.to_text());
            out.push('\n');
        }
        out
    }

    /// Adds or replaces an entry.
    pub fn insert(&mut self, name: &str, fp: StructureFingerprint) {
        match self.entries.iter_mut().find(|(n, _)| n == name) {
            Some(e) => e.1 = fp,
            None => self.entries.push((name.to_string(), fp)),
        }
    }

    pub fn merge(&mut self, other: &FingerprintCatalog) {
        for (n, fp) in &other.entries {
            self.insert(n, fp.clone());
        }
    }

    pub fn get(&self, name: &str) -> Option<&StructureFingerprint> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, fp)| fp)
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Name of the unique entry equal to `fp`, or `None`.
    pub fn match_fingerprint(&self, fp: &StructureFingerprint) -> Result<Option<&str>> {
        let hits: Vec<&str> = self.entries.iter().filter(|(_, e)| e == fp).map(|(n, _)| n.as_str()).collect();
        match hits.len() {
            0 => Ok(None),
            1 => Ok(Some(hits[0])),
            _ => Err(Error::AmbiguousMatch(hits.into_iter().map(str::to_string).collect())),
        }
    }

    /// Pairs of entries with identical fingerprints.
    pub fn collisions(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::new();
        for (i, (a, fa)) in self.entries.iter().enumerate() {
            for (b, fb) in &self.entries[i + 1..] {
                if fa == fb {
                    out.push((a.as_str(), b.as_str()));
                }
            }
        }
        out
    }
}

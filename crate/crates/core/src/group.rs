//! Finite abelian groups given as products of cyclic groups.
//!
//! A group is described by the list of cyclic factor orders the caller
//! supplied; elements are residue vectors in that coordinate system. The
//! invariant-factor form `d_1 | d_2 | ... | d_r` is computed on construction and
//! only used for the rank.
//!
//! Elements are numbered by a mixed-radix index with factor 0 as the fastest
//! axis: `index = g_0 + m_0 * (g_1 + m_1 * (g_2 + ...))`. Dense masks over the
//! index space are therefore byte-stable across runs.

use std::collections::VecDeque;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::limits;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    moduli: Vec<u64>,
    invariant_factors: Vec<u64>,
    order: u64,
    exponent: u64,
}

impl GroupSpec {
    pub fn new(moduli: &[u64]) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::InvalidArgument(
                "a group needs at least one cyclic factor".into(),
            ));
        }
        let mut order: u64 = 1;
        let mut exponent: u64 = 1;
        for &m in moduli {
            if m < 2 {
                return Err(Error::InvalidModulus(m));
            }
            order = order.checked_mul(m).ok_or(Error::Overflow("group order"))?;
            let g = exponent.gcd(&m);
            exponent = (exponent / g).checked_mul(m).ok_or(Error::Overflow("group exponent"))?;
        }
        Ok(GroupSpec {
            moduli: moduli.to_vec(),
            invariant_factors: invariant_factors(moduli),
            order,
            exponent,
        })
    }

    /// `Z_p^n`, the additive group of an `n`-dimensional space over `F_p`.
    pub fn elementary(p: u64, n: usize) -> Result<Self> {
        Self::new(&vec![p; n])
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Minimal number of generators.
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            residues: vec![0; self.moduli.len()],
        }
    }

    /// Builds an element from arbitrary integers, reducing each coordinate.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.moduli.len() {
            return Err(Error::GroupMismatch);
        }
        Ok(GroupElement {
            residues: coords
                .iter()
                .zip(&self.moduli)
                .map(|(&c, &m)| c.rem_euclid(m as i64) as u64)
                .collect(),
        })
    }

    pub fn check(&self, g: &GroupElement) -> Result<()> {
        if g.residues.len() != self.moduli.len() || g.residues.iter().zip(&self.moduli).any(|(r, m)| r >= m) {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(GroupElement {
            residues: g
                .residues
                .iter()
                .zip(&h.residues)
                .zip(&self.moduli)
                .map(|((&a, &b), &m)| add_mod(a, b, m))
                .collect(),
        })
    }

    pub fn neg(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(GroupElement {
            residues: g
                .residues
                .iter()
                .zip(&self.moduli)
                .map(|(&a, &m)| if a == 0 { 0 } else { m - a })
                .collect(),
        })
    }

    pub fn sub(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.add(g, &self.neg(h)?)
    }

    /// `c * g`, with `c` reduced modulo each factor order.
    pub fn scale(&self, c: i64, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(GroupElement {
            residues: g
                .residues
                .iter()
                .zip(&self.moduli)
                .map(|(&a, &m)| {
                    let c = c.rem_euclid(m as i64) as u128;
                    ((c * a as u128) % m as u128) as u64
                })
                .collect(),
        })
    }

    pub fn index_of(&self, g: &GroupElement) -> Result<u64> {
        self.check(g)?;
        Ok(self.index_unchecked(&g.residues))
    }

    pub(crate) fn index_unchecked(&self, residues: &[u64]) -> u64 {
        residues
            .iter()
            .zip(&self.moduli)
            .rev()
            .fold(0u64, |acc, (&r, &m)| acc * m + r)
    }

    pub fn element_at(&self, index: u64) -> Result<GroupElement> {
        if index >= self.order {
            return Err(Error::IndexOutOfRange {
                index,
                order: self.order,
            });
        }
        let mut rem = index;
        let residues = self
            .moduli
            .iter()
            .map(|&m| {
                let d = rem % m;
                rem /= m;
                d
            })
            .collect();
        Ok(GroupElement { residues })
    }

    /// Fails with a desk-scale error when the group is too large to enumerate.
    pub fn ensure_enumerable(&self) -> Result<usize> {
        limits::check_order(self.order)?;
        Ok(self.order as usize)
    }

    /// Index of `i + g`, where `digits` are the residues of `g`.
    #[inline]
    pub(crate) fn add_index(&self, i: usize, digits: &[u64]) -> usize {
        let mut rem = i as u64;
        let mut mult = 1u64;
        let mut out = 0u64;
        for (&m, &t) in self.moduli.iter().zip(digits) {
            let d = rem % m;
            rem /= m;
            out += add_mod(d, t, m) * mult;
            mult *= m;
        }
        out as usize
    }

    /// Index of `-g` given the index of `g`.
    pub(crate) fn neg_index(&self, i: usize) -> usize {
        let mut rem = i as u64;
        let mut mult = 1u64;
        let mut out = 0u64;
        for &m in &self.moduli {
            let d = rem % m;
            rem /= m;
            out += (if d == 0 { 0 } else { m - d }) * mult;
            mult *= m;
        }
        out as usize
    }

    pub(crate) fn digits_of(&self, i: usize) -> Vec<u64> {
        let mut rem = i as u64;
        self.moduli
            .iter()
            .map(|&m| {
                let d = rem % m;
                rem /= m;
                d
            })
            .collect()
    }
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z")?;
        for (i, m) in self.moduli.iter().enumerate() {
            if i > 0 {
                write!(f, "xZ")?;
            }
            write!(f, "_{m}")?;
        }
        Ok(())
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.moduli.serialize(s)
    }
}

#[inline]
fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

fn prime_power_parts(mut n: u64) -> Vec<(u64, u32, u64)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            let mut pe = 1;
            while n % p == 0 {
                n /= p;
                e += 1;
                pe *= p;
            }
            out.push((p, e, pe));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1, n));
    }
    out
}

/// Invariant factors `d_1 | d_2 | ... | d_r` of `Z_{m_1} x ... x Z_{m_t}`.
pub fn invariant_factors(moduli: &[u64]) -> Vec<u64> {
    use std::collections::BTreeMap;
    let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &m in moduli {
        for (p, _, pe) in prime_power_parts(m) {
            by_prime.entry(p).or_default().push(pe);
        }
    }
    let rank = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut factors = vec![1u64; rank];
    for powers in by_prime.values_mut() {
        powers.sort_unstable_by(|a, b| b.cmp(a));
        // largest powers go to the last (largest) invariant factor
        for (slot, pe) in factors.iter_mut().rev().zip(powers.iter()) {
            *slot *= pe;
        }
    }
    factors
}

/// Residue vector relative to some [`GroupSpec`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    residues: Vec<u64>,
}

impl GroupElement {
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn is_zero(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// A set of group elements stored as a dense indicator over the index space.
#[derive(Clone, PartialEq, Eq)]
pub struct ElementSet {
    group: GroupSpec,
    mask: BitSet,
}

impl ElementSet {
    pub fn empty(group: &GroupSpec) -> Result<Self> {
        let n = group.ensure_enumerable()?;
        Ok(ElementSet {
            group: group.clone(),
            mask: BitSet::new(n),
        })
    }

    pub fn singleton_zero(group: &GroupSpec) -> Result<Self> {
        let mut s = Self::empty(group)?;
        s.mask.insert(0);
        Ok(s)
    }

    pub fn full(group: &GroupSpec) -> Result<Self> {
        let n = group.ensure_enumerable()?;
        Ok(ElementSet {
            group: group.clone(),
            mask: BitSet::full(n),
        })
    }

    pub fn from_elements<'a>(group: &GroupSpec, elems: impl IntoIterator<Item = &'a GroupElement>) -> Result<Self> {
        let mut s = Self::empty(group)?;
        for g in elems {
            s.insert(g)?;
        }
        Ok(s)
    }

    pub fn from_indices(group: &GroupSpec, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(group)?;
        for i in indices {
            if i as u64 >= group.order() {
                return Err(Error::IndexOutOfRange {
                    index: i as u64,
                    order: group.order(),
                });
            }
            s.mask.insert(i);
        }
        Ok(s)
    }

    pub(crate) fn from_mask(group: &GroupSpec, mask: BitSet) -> Self {
        debug_assert_eq!(mask.capacity() as u64, group.order());
        ElementSet {
            group: group.clone(),
            mask,
        }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn mask(&self) -> &BitSet {
        &self.mask
    }

    pub fn insert(&mut self, g: &GroupElement) -> Result<bool> {
        let i = self.group.index_of(g)?;
        Ok(self.mask.insert(i as usize))
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        match self.group.index_of(g) {
            Ok(i) => self.mask.contains(i as usize),
            Err(_) => false,
        }
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.mask.contains(i)
    }

    pub fn len(&self) -> usize {
        self.mask.count()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.iter().next().is_none()
    }

    pub fn is_full(&self) -> bool {
        self.mask.is_full()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter()
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        self.mask.iter().map(|i| GroupElement {
            residues: self.group.digits_of(i),
        })
    }

    pub(crate) fn same_group(&self, other: &ElementSet) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    pub fn union(&self, other: &ElementSet) -> Result<ElementSet> {
        self.same_group(other)?;
        let mut out = self.clone();
        out.mask.union_with(&other.mask);
        Ok(out)
    }

    /// `self + g`.
    pub fn translate(&self, g: &GroupElement) -> Result<ElementSet> {
        self.group.check(g)?;
        let mut mask = BitSet::new(self.mask.capacity());
        for i in self.mask.iter() {
            mask.insert(self.group.add_index(i, g.residues()));
        }
        Ok(ElementSet::from_mask(&self.group, mask))
    }

    /// `{-x : x in self}`.
    pub fn negate(&self) -> ElementSet {
        let mut mask = BitSet::new(self.mask.capacity());
        for i in self.mask.iter() {
            mask.insert(self.group.neg_index(i));
        }
        ElementSet::from_mask(&self.group, mask)
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elements()).finish()
    }
}

/// A multiset of group elements; duplicates are kept and each copy can be
/// used once in a subset sum.
#[derive(Clone, PartialEq, Eq)]
pub struct ElementMultiset {
    group: GroupSpec,
    items: Vec<GroupElement>,
}

impl ElementMultiset {
    pub fn new(group: &GroupSpec, items: Vec<GroupElement>) -> Result<Self> {
        for g in &items {
            group.check(g)?;
        }
        Ok(ElementMultiset {
            group: group.clone(),
            items,
        })
    }

    pub fn from_coords(group: &GroupSpec, coords: &[Vec<i64>]) -> Result<Self> {
        let items = coords.iter().map(|c| group.element(c)).collect::<Result<Vec<_>>>()?;
        Ok(ElementMultiset {
            group: group.clone(),
            items,
        })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn items(&self) -> &[GroupElement] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, g: GroupElement) -> Result<()> {
        self.group.check(&g)?;
        self.items.push(g);
        Ok(())
    }

    /// Items in ascending element-index order.
    pub fn sorted_items(&self) -> Vec<GroupElement> {
        let mut v = self.items.clone();
        v.sort_by_key(|g| self.group.index_unchecked(g.residues()));
        v
    }

    /// Multiset union.
    pub fn union(&self, other: &ElementMultiset) -> Result<ElementMultiset> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        let mut items = self.items.clone();
        items.extend(other.items.iter().cloned());
        Ok(ElementMultiset {
            group: self.group.clone(),
            items,
        })
    }
}

impl fmt::Debug for ElementMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.items).finish()
    }
}

/// Subgroup generated by the support of `b`, by breadth-first closure from 0.
pub fn subgroup_closure(b: &ElementMultiset) -> Result<ElementSet> {
    let group = b.group();
    let n = group.ensure_enumerable()?;
    let mut gens: Vec<&GroupElement> = b.items().iter().filter(|g| !g.is_zero()).collect();
    gens.sort();
    gens.dedup();
    let mut seen = BitSet::new(n);
    let mut queue = VecDeque::from([0usize]);
    seen.insert(0);
    while let Some(i) = queue.pop_front() {
        for g in &gens {
            let j = group.add_index(i, g.residues());
            if seen.insert(j) {
                queue.push_back(j);
            }
        }
    }
    Ok(ElementSet::from_mask(group, seen))
}

/// Whether the support of `b` generates the whole group.
pub fn generates(b: &ElementMultiset) -> Result<bool> {
    Ok(subgroup_closure(b)?.is_full())
}

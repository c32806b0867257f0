//! Subset-sum sets, sumsets and the growth machinery behind the
//! `k > 2m ln log2|G|` additive-basis threshold.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::group::{generates, ElementMultiset, ElementSet, GroupElement, GroupSpec};

/// `B* = { sum of A : A a sub-multiset of B }`, always containing 0.
///
/// Computed incrementally as `S <- S u (S + b)` over the items of `B` in
/// ascending index order.
pub fn subset_sum_set(b: &ElementMultiset) -> Result<ElementSet> {
    let group = b.group();
    let mut s = ElementSet::singleton_zero(group)?;
    for item in b.sorted_items() {
        if s.is_full() {
            break;
        }
        let shifted = s.translate(&item)?;
        s = s.union(&shifted)?;
    }
    Ok(s)
}

/// `B*` together with, for every reachable element, the item that first
/// produced it and the element it was produced from. Enough to rebuild one
/// sub-multiset for any member.
#[derive(Clone, Debug)]
pub struct SubsetSumTable {
    set: ElementSet,
    items: Vec<GroupElement>,
    // (item position, predecessor index); u32::MAX marks the root 0
    pred: Vec<(u32, u32)>,
}

const ROOT: u32 = u32::MAX;

impl SubsetSumTable {
    pub fn build(b: &ElementMultiset) -> Result<Self> {
        let group = b.group();
        let n = group.ensure_enumerable()?;
        if n as u64 >= u32::MAX as u64 || b.len() >= u32::MAX as usize {
            return Err(Error::Overflow("witness table index"));
        }
        let items = b.sorted_items();
        let mut mask = BitSet::new(n);
        mask.insert(0);
        let mut pred = vec![(ROOT, ROOT); n];
        let mut members = vec![0usize];
        for (pos, item) in items.iter().enumerate() {
            let mut fresh = Vec::new();
            for &x in &members {
                let y = group.add_index(x, item.residues());
                if mask.insert(y) {
                    pred[y] = (pos as u32, x as u32);
                    fresh.push(y);
                }
            }
            members.extend(fresh);
        }
        Ok(SubsetSumTable {
            set: ElementSet::from_mask(group, mask),
            items,
            pred,
        })
    }

    pub fn set(&self) -> &ElementSet {
        &self.set
    }

    /// A sub-multiset summing to the element with index `i`, if reachable.
    pub fn witness_index(&self, i: usize) -> Option<Vec<GroupElement>> {
        if !self.set.contains_index(i) {
            return None;
        }
        let mut out = Vec::new();
        let mut cur = i;
        while cur != 0 {
            let (pos, prev) = self.pred[cur];
            out.push(self.items[pos as usize].clone());
            cur = prev as usize;
        }
        out.reverse();
        Some(out)
    }

    pub fn witness(&self, g: &GroupElement) -> Option<Vec<GroupElement>> {
        let i = self.set.group().index_of(g).ok()?;
        self.witness_index(i as usize)
    }
}

/// Minkowski sum `S + T`.
pub fn sumset(s: &ElementSet, t: &ElementSet) -> Result<ElementSet> {
    s.same_group(t)?;
    let group = s.group();
    let (small, large) = if s.len() <= t.len() { (s, t) } else { (t, s) };
    let large_idx: Vec<usize> = large.indices().collect();
    let mut mask = BitSet::new(group.order() as usize);
    let mut done = 0usize;
    let order = group.order() as usize;
    for j in small.indices() {
        let digits = group.digits_of(j);
        for &i in &large_idx {
            if mask.insert(group.add_index(i, &digits)) {
                done += 1;
            }
        }
        if done == order {
            break;
        }
    }
    Ok(ElementSet::from_mask(group, mask))
}

/// `S + ... + S` with `n` summands.
pub fn iterated_sumset(n: usize, s: &ElementSet) -> Result<ElementSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("iterated sumset needs n >= 1".into()));
    }
    let mut acc = s.clone();
    for _ in 1..n {
        if acc.is_full() {
            break;
        }
        acc = sumset(&acc, s)?;
    }
    Ok(acc)
}

fn common_group(bs: &[ElementMultiset]) -> Result<&GroupSpec> {
    let g = bs
        .first()
        .map(ElementMultiset::group)
        .ok_or_else(|| Error::InvalidArgument("at least one multiset is required".into()))?;
    if bs.iter().any(|b| b.group() != g) {
        return Err(Error::GroupMismatch);
    }
    Ok(g)
}

/// `B_1* + ... + B_k*` and the intermediate sizes `|S_1|, ..., |S_k|`.
pub fn star_sumset_trace(bs: &[ElementMultiset]) -> Result<(ElementSet, Vec<usize>)> {
    common_group(bs)?;
    let mut sizes = Vec::with_capacity(bs.len());
    let mut acc: Option<ElementSet> = None;
    for b in bs {
        let star = subset_sum_set(b)?;
        let next = match acc {
            None => star,
            Some(prev) if prev.is_full() => prev,
            Some(prev) => sumset(&prev, &star)?,
        };
        sizes.push(next.len());
        acc = Some(next);
    }
    Ok((acc.expect("non-empty"), sizes))
}

/// Whether the multiset union `B_1 u ... u B_k` is an additive basis, i.e.
/// `B_1* + ... + B_k* = G`.
pub fn is_additive_basis(bs: &[ElementMultiset]) -> Result<bool> {
    Ok(star_sumset_trace(bs)?.0.is_full())
}

/// Per-block sub-multisets `A_i` with `g = sum_i sum(A_i)`.
pub type BasisWitness = Vec<Vec<GroupElement>>;

/// Full record of `S_j = B_1* + ... + B_j*` with deterministic predecessors,
/// for extracting witnesses.
pub struct BasisTable {
    tables: Vec<SubsetSumTable>,
    // for each step j >= 1 and each member of S_j: (index in S_{j-1}, index in B_j*)
    preds: Vec<Vec<(u32, u32)>>,
    total: ElementSet,
}

impl BasisTable {
    pub fn build(bs: &[ElementMultiset]) -> Result<Self> {
        let group = common_group(bs)?.clone();
        let n = group.ensure_enumerable()?;
        let tables = bs.iter().map(SubsetSumTable::build).collect::<Result<Vec<_>>>()?;
        let mut preds = Vec::with_capacity(bs.len().saturating_sub(1));
        let mut acc = tables[0].set().clone();
        for t in &tables[1..] {
            let mut mask = BitSet::new(n);
            let mut pred = vec![(ROOT, ROOT); n];
            let star: Vec<(usize, Vec<u64>)> = t.set().indices().map(|i| (i, group.digits_of(i))).collect();
            // lowest S_{j-1} index first, then lowest B_j* index
            for s in acc.indices() {
                for (bi, digits) in &star {
                    let x = group.add_index(s, digits);
                    if mask.insert(x) {
                        pred[x] = (s as u32, *bi as u32);
                    }
                }
            }
            acc = ElementSet::from_mask(&group, mask);
            preds.push(pred);
        }
        Ok(BasisTable {
            tables,
            preds,
            total: acc,
        })
    }

    pub fn sumset(&self) -> &ElementSet {
        &self.total
    }

    pub fn witness(&self, g: &GroupElement) -> Option<BasisWitness> {
        let group = self.total.group();
        let mut cur = group.index_of(g).ok()? as usize;
        if !self.total.contains_index(cur) {
            return None;
        }
        let k = self.tables.len();
        let mut parts = vec![Vec::new(); k];
        for j in (1..k).rev() {
            let (prev, b) = self.preds[j - 1][cur];
            parts[j] = self.tables[j].witness_index(b as usize)?;
            cur = prev as usize;
        }
        parts[0] = self.tables[0].witness_index(cur)?;
        Some(parts)
    }
}

/// Checks membership and returns a witness decomposition of `g`.
pub fn additive_basis_witness(bs: &[ElementMultiset], g: &GroupElement) -> Result<Option<BasisWitness>> {
    common_group(bs)?.check(g)?;
    Ok(BasisTable::build(bs)?.witness(g))
}

/// Least integer `k` with `k > 2 m ln(log2 |G|)`.
pub fn basis_threshold(group: &GroupSpec) -> u64 {
    let x = threshold_value(group);
    x.floor() as u64 + 1
}

/// `2 m ln(log2 |G|)`.
pub fn threshold_value(group: &GroupSpec) -> f64 {
    let m = group.exponent() as f64;
    let log2 = (group.order() as f64).log2();
    (2.0 * m * log2.ln()).max(0.0)
}

/// `floor(m ln log2 |G|)`: the prefix length after which `|S_j| > |G|/2`.
pub fn half_index(group: &GroupSpec) -> u64 {
    let m = group.exponent() as f64;
    let v = m * (group.order() as f64).log2().ln();
    v.max(0.0).floor() as u64
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthTrace {
    pub sizes: Vec<usize>,
    pub group_order: u64,
    pub exponent: u64,
    pub rank: usize,
    /// Step `j` (for `j = 2..k`): `|S_j| >= |S_{j-1}|^{1-1/(m-1)} |G|^{1/(m-1)}`.
    pub per_step_ok: Vec<bool>,
    /// `|S_1| >= 2^r`.
    pub first_step_ok: bool,
    /// For `j = 1..k`: `ln(|G|/|S_j|) < e^{-(j+1)/m} ln |G|`.
    pub log_ratio_ok: Vec<bool>,
    /// `floor(m ln log2 |G|)`, when it lies in `1..=k`.
    pub half_index: Option<u64>,
    /// `|S_j| > |G|/2` at `j = half_index`.
    pub half_ok: Option<bool>,
}

impl GrowthTrace {
    pub fn all_ok(&self) -> bool {
        self.first_step_ok
            && self.per_step_ok.iter().all(|&b| b)
            && self.log_ratio_ok.iter().all(|&b| b)
            && self.half_ok.unwrap_or(true)
    }
}

// Above this many bits the exact power comparison switches to logarithms.
const EXACT_BITS_LIMIT: u64 = 1 << 22;

/// `cur^(m-1) >= prev^(m-2) * order`, exactly where affordable and with a
/// rounding-aware logarithmic comparison otherwise.
pub fn growth_step_holds(prev: u64, cur: u64, order: u64, m: u64) -> bool {
    debug_assert!(m >= 3);
    let bits = (m - 1) * (64 - order.leading_zeros() as u64);
    if bits <= EXACT_BITS_LIMIT {
        return growth_step_exact(prev, cur, order, m);
    }
    let lhs = (m - 1) as f64 * (cur as f64).ln();
    let rhs = (m - 2) as f64 * (prev as f64).ln() + (order as f64).ln();
    // relative error of each side is a few ulps times the term count
    let slack = 1e-12 * lhs.abs().max(rhs.abs()).max(1.0);
    if lhs > rhs + slack {
        true
    } else if lhs < rhs - slack {
        false
    } else {
        growth_step_exact(prev, cur, order, m)
    }
}

fn growth_step_exact(prev: u64, cur: u64, order: u64, m: u64) -> bool {
    let pow = |b: u64, e: u64| -> BigUint {
        let mut acc = BigUint::one();
        let base = BigUint::from(b);
        let mut e = e;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc *= &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        acc
    };
    pow(cur, m - 1) >= pow(prev, m - 2) * BigUint::from(order)
}

/// Sizes of `S_j` and every intermediate inequality used in the growth
/// argument. Requires exponent at least 3 and every `B_i` generating.
pub fn growth_trace(bs: &[ElementMultiset]) -> Result<GrowthTrace> {
    let group = common_group(bs)?.clone();
    let m = group.exponent();
    if m < 3 {
        return Err(Error::InvalidArgument(
            "growth trace needs exponent >= 3; for exponent 2 every generating set has B* = G".into(),
        ));
    }
    for (index, b) in bs.iter().enumerate() {
        if !generates(b)? {
            return Err(Error::NotGenerating { index });
        }
    }
    let (_, sizes) = star_sumset_trace(bs)?;
    let order = group.order();
    let per_step_ok = sizes
        .windows(2)
        .map(|w| growth_step_holds(w[0] as u64, w[1] as u64, order, m))
        .collect();
    let rank = group.rank();
    let first_step_ok = (sizes[0] as u128) >= (1u128 << rank.min(127));
    let ln_g = (order as f64).ln();
    let log_ratio_ok = sizes
        .iter()
        .enumerate()
        .map(|(j0, &s)| {
            let j = (j0 + 1) as f64;
            let lhs = (order as f64 / s as f64).ln();
            lhs < (-(j + 1.0) / m as f64).exp() * ln_g
        })
        .collect();
    let hi = half_index(&group);
    let (half_index, half_ok) = if hi >= 1 && hi as usize <= sizes.len() {
        let s = sizes[hi as usize - 1] as u64;
        (Some(hi), Some(2 * s > order))
    } else {
        (None, None)
    };
    Ok(GrowthTrace {
        sizes,
        group_order: order,
        exponent: m,
        rank,
        per_step_ok,
        first_step_ok,
        log_ratio_ok,
        half_index,
        half_ok,
    })
}

/// `|S| + |T| > |G|` forces `S + T = G`. Returns whether the size condition
/// holds; when it does the sumset is computed and a failure is reported as
/// an invariant breach.
pub fn halving_complete(s: &ElementSet, t: &ElementSet) -> Result<bool> {
    s.same_group(t)?;
    let order = s.group().order();
    if (s.len() + t.len()) as u64 <= order {
        return Ok(false);
    }
    if !sumset(s, t)?.is_full() {
        return Err(Error::InvariantBreach("|S|+|T| > |G| but S+T != G".into()));
    }
    Ok(true)
}

/// Both sides of `|A_0|^{n-1} |A_1+...+A_n| <= |A_0+A_1| ... |A_0+A_n|`.
pub fn ruzsa_triangle_sides(sets: &[ElementSet]) -> Result<(BigUint, BigUint)> {
    if sets.len() < 2 {
        return Err(Error::InvalidArgument("need A_0 and at least one more set".into()));
    }
    if sets.iter().any(ElementSet::is_empty) {
        return Err(Error::EmptySet);
    }
    let a0 = &sets[0];
    for s in &sets[1..] {
        a0.same_group(s)?;
    }
    let n = sets.len() - 1;
    let mut tail = sets[1].clone();
    for s in &sets[2..] {
        tail = sumset(&tail, s)?;
    }
    let lhs = BigUint::from(a0.len()).pow((n - 1) as u32) * BigUint::from(tail.len());
    let mut rhs = BigUint::one();
    for s in &sets[1..] {
        rhs *= BigUint::from(sumset(a0, s)?.len());
    }
    Ok((lhs, rhs))
}

pub fn ruzsa_triangle_check(sets: &[ElementSet]) -> Result<bool> {
    let (lhs, rhs) = ruzsa_triangle_sides(sets)?;
    Ok(lhs <= rhs)
}

/// Subset sums and sumsets of integer vectors, standing in for a vector space
/// over the rationals (any rational configuration can be scaled to an
/// integral one without changing sumset sizes).
pub mod integral {
    use std::collections::HashSet;

    pub type IntVector = Vec<i64>;

    pub fn subset_sums(vectors: &[IntVector]) -> HashSet<IntVector> {
        let dim = vectors.first().map_or(0, Vec::len);
        let mut out: HashSet<IntVector> = HashSet::from([vec![0; dim]]);
        for v in vectors {
            let shifted: Vec<IntVector> = out
                .iter()
                .map(|s| s.iter().zip(v).map(|(a, b)| a + b).collect())
                .collect();
            out.extend(shifted);
        }
        out
    }

    pub fn sumset(a: &HashSet<IntVector>, b: &HashSet<IntVector>) -> HashSet<IntVector> {
        let mut out = HashSet::with_capacity(a.len() * b.len() / 2 + 1);
        for x in a {
            for y in b {
                out.insert(x.iter().zip(y).map(|(p, q)| p + q).collect());
            }
        }
        out
    }

    /// `|B_1* + ... + B_k*|`.
    pub fn star_sumset_size(systems: &[Vec<IntVector>]) -> usize {
        let mut acc: Option<HashSet<IntVector>> = None;
        for b in systems {
            let star = subset_sums(b);
            acc = Some(match acc {
                None => star,
                Some(prev) => sumset(&prev, &star),
            });
        }
        acc.map_or(1, |s| s.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(moduli: &[u64]) -> GroupSpec {
        GroupSpec::new(moduli).unwrap()
    }

    fn ms(g: &GroupSpec, coords: &[Vec<i64>]) -> ElementMultiset {
        ElementMultiset::from_coords(g, coords).unwrap()
    }

    fn set(g: &GroupSpec, coords: &[Vec<i64>]) -> ElementSet {
        let els: Vec<_> = coords.iter().map(|c| g.element(c).unwrap()).collect();
        ElementSet::from_elements(g, &els).unwrap()
    }

    #[test]
    fn subset_sum_examples() {
        let g = z(&[3, 3]);
        let empty = subset_sum_set(&ms(&g, &[])).unwrap();
        assert_eq!(empty.len(), 1);
        assert!(empty.contains(&g.zero()));

        let s = subset_sum_set(&ms(&g, &[vec![1, 0], vec![0, 1]])).unwrap();
        assert_eq!(s, set(&g, &[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]));

        let g = z(&[4]);
        let s = subset_sum_set(&ms(&g, &[vec![1], vec![1], vec![2]])).unwrap();
        assert!(s.is_full());
    }

    #[test]
    fn sumset_examples() {
        let g = z(&[3]);
        let a = set(&g, &[vec![0], vec![1]]);
        assert!(sumset(&a, &a).unwrap().is_full());
        let zero = set(&g, &[vec![0]]);
        assert_eq!(sumset(&a, &zero).unwrap(), a);
        assert_eq!(iterated_sumset(1, &a).unwrap(), a);
        assert!(iterated_sumset(0, &a).is_err());
        let h = z(&[4]);
        assert!(matches!(sumset(&a, &set(&h, &[vec![0]])), Err(Error::GroupMismatch)));
    }

    #[test]
    fn basis_examples() {
        let g = z(&[2, 2, 2]);
        let b = ms(&g, &[vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 1]]);
        assert!(is_additive_basis(&[b]).unwrap());

        let g = z(&[5]);
        assert!(!is_additive_basis(&[ms(&g, &[vec![1]])]).unwrap());

        let g = z(&[3]);
        let bs = vec![ms(&g, &[vec![1]]), ms(&g, &[vec![1]])];
        assert!(is_additive_basis(&bs).unwrap());
        let w = additive_basis_witness(&bs, &g.element(&[2]).unwrap()).unwrap().unwrap();
        assert_eq!(w, vec![vec![g.element(&[1]).unwrap()], vec![g.element(&[1]).unwrap()]]);
    }

    #[test]
    fn witness_reconstructs_every_element() {
        let g = z(&[2, 6]);
        let bs = vec![
            ms(&g, &[vec![1, 1], vec![0, 2], vec![0, 2]]),
            ms(&g, &[vec![1, 3], vec![0, 1]]),
            ms(&g, &[vec![0, 5]]),
        ];
        let table = BasisTable::build(&bs).unwrap();
        for x in table.sumset().elements() {
            let parts = table.witness(&x).unwrap();
            let mut acc = g.zero();
            for (part, b) in parts.iter().zip(&bs) {
                let mut pool = b.items().to_vec();
                for a in part {
                    let pos = pool.iter().position(|y| y == a).expect("drawn from B_i");
                    pool.swap_remove(pos);
                    acc = g.add(&acc, a).unwrap();
                }
            }
            assert_eq!(acc, x);
        }
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(basis_threshold(&z(&[2])), 1);
        assert_eq!(basis_threshold(&z(&[3, 3])), 7);
        assert_eq!(basis_threshold(&z(&[2; 10])), 10);
    }

    #[test]
    fn growth_trace_examples() {
        let g = z(&[3]);
        let t = growth_trace(&[ms(&g, &[vec![1]]), ms(&g, &[vec![1]])]).unwrap();
        assert_eq!(t.sizes, vec![2, 3]);
        assert_eq!(t.per_step_ok, vec![true]);
        assert!(t.first_step_ok);

        let g = z(&[5, 5]);
        let full: Vec<Vec<i64>> = (0..25).map(|i| vec![i % 5, i / 5]).collect();
        let t = growth_trace(&vec![ms(&g, &full); 4]).unwrap();
        assert!(t.sizes.iter().all(|&s| s == 25));
        assert!(t.all_ok());

        let g2 = z(&[2, 2]);
        assert!(growth_trace(&[ms(&g2, &[vec![1, 0], vec![0, 1]])]).is_err());
        assert!(matches!(
            growth_trace(&[ms(&g, &[vec![1, 0]])]),
            Err(Error::NotGenerating { index: 0 })
        ));
    }

    #[test]
    fn growth_step_boundary_is_exact() {
        // 4^2 = 16 = 2^1 * 8: equality must hold
        assert!(growth_step_holds(2, 4, 8, 3));
        assert!(!growth_step_holds(2, 3, 8, 3));
        // logarithmic path for huge exponents
        let m = 1 << 23;
        assert!(growth_step_holds(2, 4, 8, m));
        assert!(!growth_step_holds(7, 6, 7, m));
    }

    #[test]
    fn halving_examples() {
        let g = z(&[2]);
        let zero = set(&g, &[vec![0]]);
        assert!(!halving_complete(&zero, &zero).unwrap());
        let full = ElementSet::full(&g).unwrap();
        assert!(halving_complete(&full, &full).unwrap());
    }

    #[test]
    fn ruzsa_examples() {
        let g = z(&[5]);
        let a = set(&g, &[vec![0], vec![1]]);
        let (l, r) = ruzsa_triangle_sides(&[a.clone(), a.clone(), a.clone()]).unwrap();
        assert_eq!((l, r), (BigUint::from(6u32), BigUint::from(9u32)));
        assert!(ruzsa_triangle_check(&[a.clone(), a.clone()]).unwrap());
        let e = ElementSet::empty(&g).unwrap();
        assert!(matches!(ruzsa_triangle_check(&[a, e]), Err(Error::EmptySet)));
    }

    #[test]
    fn integral_equal_bases() {
        let b = vec![vec![1i64]];
        assert_eq!(integral::star_sumset_size(&[b.clone(), b]), 3);
        let e: Vec<Vec<i64>> = vec![vec![1, 0], vec![0, 1]];
        assert_eq!(integral::star_sumset_size(&vec![e; 3]), 16);
    }
}

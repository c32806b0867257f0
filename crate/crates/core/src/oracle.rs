//! Brute-force reference computations. Slow and direct on purpose: they
//! share no code paths with the fast implementations they are compared to.

use std::collections::{HashMap, HashSet};

use crate::group::GroupSpec;
use crate::lattice::BlockLattice;
use crate::linalg::{Fp, Matrix};

fn add_residues(moduli: &[u64], a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).zip(moduli).map(|((x, y), m)| (x + y) % m).collect()
}

/// Every subset sum of `items`, by enumerating all `2^|items|` subsets.
pub fn subset_sums(g: &GroupSpec, items: &[Vec<u64>]) -> HashSet<Vec<u64>> {
    let moduli = g.moduli();
    let n = items.len();
    assert!(n < 32, "brute-force subset sums need fewer than 32 items");
    let mut out = HashSet::new();
    for mask in 0u64..1 << n {
        let mut s = vec![0u64; moduli.len()];
        for (i, it) in items.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s = add_residues(moduli, &s, it);
            }
        }
        out.insert(s);
    }
    out
}

/// `|{(a, b, c, d) in S^4 : a + b = c + d}|` by enumerating all quadruples.
pub fn energy_quadruples(g: &GroupSpec, set: &[Vec<u64>]) -> u128 {
    let moduli = g.moduli();
    let mut count = 0u128;
    for a in set {
        for b in set {
            let ab = add_residues(moduli, a, b);
            for c in set {
                for d in set {
                    if add_residues(moduli, c, d) == ab {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// `|{sums}|` over one element from each set, enumerated directly.
pub fn sumset_size(g: &GroupSpec, sets: &[HashSet<Vec<u64>>]) -> usize {
    let mut acc: HashSet<Vec<u64>> = HashSet::from([vec![0u64; g.moduli().len()]]);
    for s in sets {
        acc = acc
            .iter()
            .flat_map(|a| s.iter().map(move |b| add_residues(g.moduli(), a, b)))
            .collect();
    }
    acc.len()
}

/// Whether `v` mod p lies in `W`, by comparing ranks.
pub fn in_lattice_by_rank(l: &BlockLattice, v: &[i64]) -> bool {
    let f: Fp = l.field();
    let mut rows: Vec<Vec<u64>> = l.basis_rows();
    let before = rows.len();
    rows.push(v.iter().map(|&x| f.reduce(x)).collect());
    let m = Matrix::from_rows(f, &rows).expect("rows have equal length");
    m.rank() == before
}

/// Least number of translates of `l` covering `{0,1}^{kr}`, by exact set
/// cover over the translates that meet the cube.
pub fn covering_by_set_cover(l: &BlockLattice) -> u64 {
    let n = l.ambient_dim();
    assert!(n <= 10, "set-cover brute force is limited to 10 coordinates");
    let verts: Vec<Vec<i64>> = (0..1u32 << n)
        .map(|m| (0..n).map(|c| (m >> c & 1) as i64).collect())
        .collect();
    // translate through vertex v covers {w : w - v in L}
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut seen = HashSet::new();
    for v in &verts {
        let members: Vec<usize> = verts
            .iter()
            .enumerate()
            .filter(|(_, w)| {
                let d: Vec<i64> = w.iter().zip(v).map(|(a, b)| a - b).collect();
                in_lattice_by_rank(l, &d)
            })
            .map(|(i, _)| i)
            .collect();
        if seen.insert(members.clone()) {
            sets.push(members);
        }
    }
    let mut containing: HashMap<usize, Vec<usize>> = HashMap::new();
    for (si, s) in sets.iter().enumerate() {
        for &v in s {
            containing.entry(v).or_default().push(si);
        }
    }
    let mut best = sets.len() as u64;
    let mut covered = vec![0u32; verts.len()];
    search(&sets, &containing, &mut covered, 0, &mut best);
    best
}

fn search(
    sets: &[Vec<usize>],
    containing: &HashMap<usize, Vec<usize>>,
    covered: &mut [u32],
    used: u64,
    best: &mut u64,
) {
    if used >= *best {
        return;
    }
    let Some(v) = covered.iter().position(|&c| c == 0) else {
        *best = used;
        return;
    };
    for &si in &containing[&v] {
        for &w in &sets[si] {
            covered[w] += 1;
        }
        search(sets, containing, covered, used + 1, best);
        for &w in &sets[si] {
            covered[w] -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::example_lattice;

    #[test]
    fn small_cases() {
        let g = GroupSpec::new(&[7]).unwrap();
        assert_eq!(subset_sums(&g, &[vec![1], vec![1]]).len(), 3);
        assert_eq!(energy_quadruples(&g, &[vec![0], vec![1]]), 6);
        assert_eq!(covering_by_set_cover(&example_lattice(3, 1, 5).unwrap()), 4);
        assert_eq!(covering_by_set_cover(&BlockLattice::scaled(2, 2, 2).unwrap()), 16);
    }
}

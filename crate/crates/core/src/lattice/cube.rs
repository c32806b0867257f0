//! Enumeration of the `2^n` unit-cube vertices under a linear map.
//!
//! Vertices are visited in Gray-code order inside contiguous index ranges,
//! so each step updates the image by one column. Ranges run in parallel and
//! their results are merged by set union, which makes the count independent
//! of the thread count.

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

const DENSE_LIMIT_BITS: u32 = 28;

#[inline]
fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

fn chunk_count(n: usize) -> u64 {
    let want = (rayon::current_num_threads() as u64 * 4).next_power_of_two();
    want.min(1u64 << n.min(20)).max(1)
}

/// Visits the images of vertices with Gray index in `[lo, hi)`.
fn walk_fp(p: u64, images: &[Vec<u64>], lo: u64, hi: u64, mut visit: impl FnMut(&[u64])) {
    let f = images.first().map_or(0, Vec::len);
    let mut key = vec![0u64; f];
    let start = gray(lo);
    for (c, img) in images.iter().enumerate() {
        if start >> c & 1 == 1 {
            for (k, x) in key.iter_mut().zip(img) {
                *k = (*k + x) % p;
            }
        }
    }
    visit(&key);
    for i in lo + 1..hi {
        let c = i.trailing_zeros() as usize;
        let img = &images[c];
        if gray(i) >> c & 1 == 1 {
            for (k, x) in key.iter_mut().zip(img) {
                *k = (*k + x) % p;
            }
        } else {
            for (k, x) in key.iter_mut().zip(img) {
                *k = (*k + p - x) % p;
            }
        }
        visit(&key);
    }
}

fn pack(p: u64, key: &[u64]) -> u128 {
    key.iter().rev().fold(0u128, |acc, &d| acc * p as u128 + d as u128)
}

/// Number of distinct values of `sum_{c in S} images[c]` over all subsets
/// `S`, computed in `F_p^f` with `f = images[c].len()`.
pub fn count_cube_images(p: u64, images: &[Vec<u64>]) -> u64 {
    let n = images.len();
    let f = images.first().map_or(0, Vec::len);
    debug_assert!(n < 63);
    let total = 1u64 << n;
    let chunks = chunk_count(n);
    let size = total / chunks;
    let bits = f as f64 * (p as f64).log2();

    if bits <= DENSE_LIMIT_BITS as f64 {
        let space = p.pow(f as u32) as usize;
        let words: Vec<AtomicU64> = (0..space.div_ceil(64)).map(|_| AtomicU64::new(0)).collect();
        (0..chunks).into_par_iter().for_each(|c| {
            walk_fp(p, images, c * size, (c + 1) * size, |key| {
                let idx = pack(p, key) as usize;
                words[idx / 64].fetch_or(1 << (idx % 64), Ordering::Relaxed);
            });
        });
        return words
            .iter()
            .map(|w| w.load(Ordering::Relaxed).count_ones() as u64)
            .sum();
    }
    if bits < 127.0 {
        let merged = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut local = HashSet::new();
                walk_fp(p, images, c * size, (c + 1) * size, |key| {
                    local.insert(pack(p, key));
                });
                local
            })
            .reduce(HashSet::new, |mut a, b| {
                a.extend(b);
                a
            });
        return merged.len() as u64;
    }
    let merged = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local = HashSet::new();
            walk_fp(p, images, c * size, (c + 1) * size, |key| {
                local.insert(key.to_vec());
            });
            local
        })
        .reduce(HashSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    merged.len() as u64
}

/// Visits every vertex in Gray order over `[lo, hi)`, reporting the index of
/// the flipped coordinate and its new value (`None` for the first vertex).
pub(crate) fn walk_flips(lo: u64, hi: u64, mut visit: impl FnMut(u64, Option<(usize, bool)>)) {
    visit(gray(lo), None);
    for i in lo + 1..hi {
        let c = i.trailing_zeros() as usize;
        let g = gray(i);
        visit(g, Some((c, g >> c & 1 == 1)));
    }
}

pub(crate) fn parallel_distinct<K, F>(n: usize, make: F) -> u64
where
    K: std::hash::Hash + Eq + Send,
    F: Fn(u64, u64, &mut HashSet<K>) + Sync,
{
    let total = 1u64 << n;
    let chunks = chunk_count(n);
    let size = total / chunks;
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local = HashSet::new();
            make(c * size, (c + 1) * size, &mut local);
            local
        })
        .reduce(HashSet::new, |mut a, b| {
            a.extend(b);
            a
        })
        .len() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(p: u64, images: &[Vec<u64>]) -> u64 {
        let f = images.first().map_or(0, Vec::len);
        let mut seen = HashSet::new();
        for mask in 0..1u64 << images.len() {
            let mut key = vec![0u64; f];
            for (c, img) in images.iter().enumerate() {
                if mask >> c & 1 == 1 {
                    for (k, x) in key.iter_mut().zip(img) {
                        *k = (*k + x) % p;
                    }
                }
            }
            seen.insert(key);
        }
        seen.len() as u64
    }

    #[test]
    fn gray_walk_visits_every_vertex_once() {
        let mut seen = HashSet::new();
        walk_flips(0, 64, |v, _| {
            assert!(seen.insert(v));
        });
        assert_eq!(seen.len(), 64);
    }

    #[test]
    fn matches_brute_force() {
        let images = vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![2, 1], vec![1, 2]];
        assert_eq!(count_cube_images(3, &images), brute(3, &images));
        let images = vec![vec![1], vec![1], vec![1]];
        assert_eq!(count_cube_images(7, &images), 4);
        assert_eq!(count_cube_images(2, &images), 2);
        // no key coordinates: everything collapses
        assert_eq!(count_cube_images(5, &[vec![], vec![]]), 1);
        // large key space takes the hashed path
        let wide: Vec<Vec<u64>> = (0..6)
            .map(|i| (0..20).map(|j| ((i * 7 + j * 3) % 5) as u64).collect())
            .collect();
        assert_eq!(count_cube_images(5, &wide), brute(5, &wide));
    }
}

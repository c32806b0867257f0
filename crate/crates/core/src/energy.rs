//! Additive energy and the closed-form lower bounds for `|B_1* + ... + B_k*|`.
//!
//! Bound-versus-measurement comparisons are exact: square roots and
//! half-integer exponents are cleared by squaring, and rational bounds are
//! compared as fractions. Floating values only appear for display.

use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::ElementSet;
use crate::linalg::{is_prime, rank_of_vectors, FieldKind};

/// `T(B) = #{(b1,b2,b3,b4) in B^4 : b1 + b2 = b3 + b4}`, as the sum of
/// squared representation counts of `B + B`.
pub fn additive_energy(b: &ElementSet) -> u128 {
    let group = b.group();
    let idx: Vec<usize> = b.indices().collect();
    let digits: Vec<Vec<u64>> = idx.iter().map(|&i| group.digits_of(i)).collect();
    let mut nu = vec![0u64; group.order() as usize];
    for &i in &idx {
        for d in &digits {
            nu[group.add_index(i, d)] += 1;
        }
    }
    nu.iter().map(|&c| (c as u128) * (c as u128)).sum()
}

/// The same count via `B - B`: `sum_z nu_{B-B}(z)^2`.
pub fn additive_energy_by_differences(b: &ElementSet) -> u128 {
    let group = b.group();
    let idx: Vec<usize> = b.indices().collect();
    let neg_digits: Vec<Vec<u64>> = idx.iter().map(|&i| group.digits_of(group.neg_index(i))).collect();
    let mut nu = vec![0u64; group.order() as usize];
    for &i in &idx {
        for d in &neg_digits {
            nu[group.add_index(i, d)] += 1;
        }
    }
    nu.iter().map(|&c| (c as u128) * (c as u128)).sum()
}

/// Energy of a finite set in any abelian group with hashable elements.
pub fn additive_energy_by<T, K, F>(items: &[T], add: F) -> u128
where
    K: Hash + Eq,
    F: Fn(&T, &T) -> K,
{
    let mut nu: HashMap<K, u64> = HashMap::new();
    for a in items {
        for b in items {
            *nu.entry(add(a, b)).or_default() += 1;
        }
    }
    nu.values().map(|&c| (c as u128) * (c as u128)).sum()
}

/// Energy of a set of integer vectors (characteristic zero).
pub fn additive_energy_integral(vectors: &[Vec<i64>]) -> u128 {
    additive_energy_by(vectors, |a, b| {
        a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<i64>>()
    })
}

/// Number of pairs `(A, A')` of subsets of an independent set `B` with
/// `sum A - sum A' = sum_j eps_j b_j`; equals `2^{n - sum |eps_j|}`.
pub fn nu_difference(b: &[Vec<i64>], field: FieldKind, eps: &[i8]) -> Result<u64> {
    if let FieldKind::Prime(2) = field {
        return Err(Error::InvalidArgument("characteristic 2 is excluded".into()));
    }
    if eps.len() != b.len() {
        return Err(Error::DimensionMismatch("sign pattern length".into()));
    }
    if eps.iter().any(|e| !(-1..=1).contains(e)) {
        return Err(Error::InvalidArgument("sign pattern entries must be -1, 0 or 1".into()));
    }
    let (rank, _) = rank_of_vectors(b, field)?;
    if rank != b.len() {
        return Err(Error::DependentVectors);
    }
    let support: u32 = eps.iter().map(|e| e.unsigned_abs() as u32).sum();
    let free = b.len() as u32 - support;
    1u64.checked_shl(free).ok_or(Error::Overflow("2^n"))
}

/// `T(B*) = 6^n` for an independent `B` with `n` elements.
pub fn independent_star_energy(n: u32) -> Result<u128> {
    6u128.checked_pow(n).ok_or(Error::Overflow("6^n"))
}

/// `|A|^2 |B|^2 / sqrt(T(A) T(B))`, kept as its two integer ingredients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnergyBound {
    /// `|A|^2 |B|^2`
    #[serde(serialize_with = "decimal")]
    pub numerator: BigUint,
    /// `T(A) T(B)`
    #[serde(serialize_with = "decimal")]
    pub energy_product: BigUint,
}

fn decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl EnergyBound {
    /// `x >= bound`, i.e. `x^2 T(A) T(B) >= (|A|^2 |B|^2)^2`.
    pub fn holds_for(&self, x: u64) -> bool {
        let x = BigUint::from(x);
        &x * &x * &self.energy_product >= &self.numerator * &self.numerator
    }

    pub fn value(&self) -> f64 {
        self.numerator.to_f64().unwrap_or(f64::INFINITY) / self.energy_product.to_f64().unwrap_or(f64::INFINITY).sqrt()
    }
}

pub fn energy_sumset_lower_bound(a: &ElementSet, b: &ElementSet) -> Result<EnergyBound> {
    a.same_group(b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let (na, nb) = (BigUint::from(a.len()), BigUint::from(b.len()));
    Ok(EnergyBound {
        numerator: &na * &na * &nb * &nb,
        energy_product: BigUint::from(additive_energy(a)) * BigUint::from(additive_energy(b)),
    })
}

fn check_ranks(ranks: &[i64]) -> Result<Vec<u32>> {
    ranks
        .iter()
        .map(|&r| u32::try_from(r).map_err(|_| Error::InvalidArgument(format!("rank must be non-negative, got {r}"))))
        .collect()
}

/// `prod_j ((j+1)/j)^{rk(B_j)}` in the order given.
pub fn char0_lower_bound(ranks: &[i64]) -> Result<BigRational> {
    let ranks = check_ranks(ranks)?;
    let mut acc = BigRational::one();
    for (j0, &r) in ranks.iter().enumerate() {
        let j = BigInt::from(j0 as u64 + 1);
        let factor = BigRational::new(&j + 1u32, j);
        acc *= num_traits::pow(factor, r as usize);
    }
    Ok(acc)
}

/// The same product for the strongest ordering of the ranks (descending,
/// since `(j+1)/j` decreases in `j`).
pub fn char0_best_order_bound(ranks: &[i64]) -> Result<BigRational> {
    let mut sorted = ranks.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    char0_lower_bound(&sorted)
}

/// `(8/3)^{(rk1 + rk2)/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CharpBound {
    pub rank_sum: u32,
}

impl CharpBound {
    /// `x >= (8/3)^{s/2}` iff `x^2 3^s >= 8^s`.
    pub fn holds_for(&self, x: u64) -> bool {
        let x = BigUint::from(x);
        &x * &x * BigUint::from(3u32).pow(self.rank_sum) >= BigUint::from(8u32).pow(self.rank_sum)
    }

    /// The bound squared, `(8/3)^s`, exactly.
    pub fn squared(&self) -> BigRational {
        BigRational::new(
            BigInt::from(8u32).pow(self.rank_sum),
            BigInt::from(3u32).pow(self.rank_sum),
        )
    }

    pub fn value(&self) -> f64 {
        (8.0f64 / 3.0).powf(self.rank_sum as f64 / 2.0)
    }
}

pub fn charp_lower_bound(rk1: u32, rk2: u32) -> CharpBound {
    CharpBound { rank_sum: rk1 + rk2 }
}

/// `B_1 = {e_1, ..., e_{2l}}` and `B_2 = {e_{2i-1} + e_{2i}, e_{2i-1} - e_{2i}}`
/// in `F_3^{2l}`, as residue vectors.
pub fn char3_extremal_pair(l: usize) -> Result<(Vec<Vec<u64>>, Vec<Vec<u64>>)> {
    if l == 0 {
        return Err(Error::InvalidArgument("l must be at least 1".into()));
    }
    let n = 2 * l;
    let unit = |i: usize| -> Vec<u64> { (0..n).map(|j| (i == j) as u64).collect() };
    let b1 = (0..n).map(unit).collect();
    let mut b2 = Vec::with_capacity(n);
    for i in 0..l {
        let mut plus = vec![0u64; n];
        plus[2 * i] = 1;
        plus[2 * i + 1] = 1;
        let mut minus = vec![0u64; n];
        minus[2 * i] = 1;
        minus[2 * i + 1] = 2;
        b2.push(plus);
        b2.push(minus);
    }
    Ok((b1, b2))
}

/// Same pair, refusing any characteristic other than 3.
pub fn extremal_pair_for(p: u64, l: usize) -> Result<(Vec<Vec<u64>>, Vec<Vec<u64>>)> {
    if p != 3 {
        return Err(Error::InvalidArgument(format!(
            "the extremal pair is defined for characteristic 3, not {p}"
        )));
    }
    char3_extremal_pair(l)
}

fn binomial(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `sigma_p(k) = sum_{u=1}^{p-1} cos(pi u / p)^{2k}`, exactly.
///
/// Writing `cos^2(theta/2) = |1 + e^{i theta}|^2 / 4` and summing the roots of
/// unity gives `1 + sigma_p(k) = p 4^{-k} sum_{|j| <= k, p | j} C(2k, k + j)`.
pub fn sigma_p(p: u64, k: u32) -> Result<BigRational> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let k = k as u64;
    let mut count = BigUint::zero();
    let p_i = p as i64;
    let k_i = k as i64;
    let mut j = -(k_i / p_i) * p_i;
    while j <= k_i {
        count += binomial(2 * k, (k_i + j) as u64);
        j += p_i;
    }
    let num = BigInt::from(count) * BigInt::from(p);
    let den = BigInt::from(4u32).pow(k as u32);
    Ok(BigRational::new(num, den) - BigRational::one())
}

/// Direct floating-point evaluation of the cosine sum.
pub fn sigma_p_f64(p: u64, k: u32) -> f64 {
    (1..p)
        .map(|u| (std::f64::consts::PI * u as f64 / p as f64).cos().powi(2 * k as i32))
        .sum()
}

/// `p^r / (1 + sigma_p(k))^r`, for odd primes `p`.
pub fn character_sum_lower_bound(p: u64, r: u32, k: u32) -> Result<BigRational> {
    if p == 2 {
        return Err(Error::InvalidArgument(
            "the character-sum bound needs an odd prime".into(),
        ));
    }
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let base = BigRational::from_integer(BigInt::from(p)) / (BigRational::one() + sigma_p(p, k)?);
    Ok(num_traits::pow(base, r as usize))
}

/// `x >= q` for a non-negative rational `q`.
pub fn rational_le(q: &BigRational, x: u64) -> bool {
    q <= &BigRational::from_integer(BigInt::from(x))
}

/// Decimal rendering of a rational with `digits` fractional digits
/// (truncated towards zero).
pub fn rational_to_decimal(q: &BigRational, digits: u32) -> String {
    let neg = q < &BigRational::zero();
    let q = if neg { -q.clone() } else { q.clone() };
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (q.numer() * &scale).div_floor(q.denom());
    let (int, frac) = scaled.div_rem(&scale);
    let mut s = String::new();
    if neg && !scaled.is_zero() {
        s.push('-');
    }
    s.push_str(&int.to_string());
    if digits > 0 {
        s.push('.');
        s.push_str(&format!("{:0>width$}", frac.to_string(), width = digits as usize));
    }
    s
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    Char0Product,
    #[serde(rename = "charp_83")]
    Charp83,
    EnergyCs,
    CharacterSum,
}

/// An exact bound value: `numerator/denominator`, or its square root when
/// `sqrt` is set. Integers are decimal strings so they never lose precision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactValue {
    pub numerator: String,
    pub denominator: String,
    pub sqrt: bool,
}

impl ExactValue {
    fn of(q: &BigRational, sqrt: bool) -> Self {
        ExactValue {
            numerator: q.numer().to_string(),
            denominator: q.denom().to_string(),
            sqrt,
        }
    }
}

/// A bound compared against a measured sumset size.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub bound_name: BoundName,
    pub bound_exact: ExactValue,
    /// Decimal rendering with 12 fractional digits, display only.
    pub bound_value: String,
    pub measured_value: Option<u64>,
    pub holds: Option<bool>,
}

impl BoundReport {
    pub fn rational(name: BoundName, q: &BigRational, measured: Option<u64>) -> Self {
        BoundReport {
            bound_name: name,
            bound_exact: ExactValue::of(q, false),
            bound_value: rational_to_decimal(q, 12),
            measured_value: measured,
            holds: measured.map(|x| rational_le(q, x)),
        }
    }

    pub fn charp(b: CharpBound, measured: Option<u64>) -> Self {
        BoundReport {
            bound_name: BoundName::Charp83,
            bound_exact: ExactValue::of(&b.squared(), true),
            bound_value: format!("{:.12}", b.value()),
            measured_value: measured,
            holds: measured.map(|x| b.holds_for(x)),
        }
    }

    pub fn energy(b: &EnergyBound, measured: Option<u64>) -> Self {
        let sq = BigRational::new(
            BigInt::from(&b.numerator * &b.numerator),
            BigInt::from(b.energy_product.clone()),
        );
        BoundReport {
            bound_name: BoundName::EnergyCs,
            bound_exact: ExactValue::of(&sq, true),
            bound_value: format!("{:.12}", b.value()),
            measured_value: measured,
            holds: measured.map(|x| b.holds_for(x)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{ElementMultiset, GroupSpec};
    use crate::sumsets::{subset_sum_set, sumset};

    fn quadruple_count(b: &ElementSet) -> u128 {
        let g = b.group();
        let els: Vec<_> = b.elements().collect();
        let mut count = 0;
        for a in &els {
            for c in &els {
                let s = g.add(a, c).unwrap();
                for d in &els {
                    for e in &els {
                        if g.add(d, e).unwrap() == s {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn energy_examples() {
        let g = GroupSpec::new(&[5]).unwrap();
        let one = ElementSet::from_elements(&g, &[g.element(&[3]).unwrap()]).unwrap();
        assert_eq!(additive_energy(&one), 1);
        let pair = ElementSet::from_indices(&g, [0, 1]).unwrap();
        assert_eq!(quadruple_count(&pair), 6);
        assert_eq!(additive_energy(&pair), 6);
        assert_eq!(additive_energy_by_differences(&pair), 6);
        assert_eq!(additive_energy_integral(&[vec![0], vec![1]]), 6);
    }

    #[test]
    fn nu_difference_examples() {
        let e = |i: usize, n: usize| -> Vec<i64> { (0..n).map(|j| (i == j) as i64).collect() };
        let b3 = vec![e(0, 3), e(1, 3), e(2, 3)];
        assert_eq!(nu_difference(&b3, FieldKind::Prime(5), &[0, 0, 0]).unwrap(), 8);
        assert_eq!(nu_difference(&b3, FieldKind::Prime(5), &[1, 1, 1]).unwrap(), 1);
        assert_eq!(nu_difference(&b3, FieldKind::Rationals, &[-1, 0, 1]).unwrap(), 2);

        // brute force for n = 2, eps = (1, 0) over F_5
        let b2 = vec![e(0, 2), e(1, 2)];
        let mut count = 0;
        for a in 0..4u32 {
            for a2 in 0..4u32 {
                let sum = |m: u32| -> Vec<i64> {
                    (0..2)
                        .map(|c| (0..2).filter(|&i| m >> i & 1 == 1).map(|i| b2[i][c]).sum())
                        .collect()
                };
                let (x, y) = (sum(a), sum(a2));
                let diff: Vec<i64> = x.iter().zip(&y).map(|(p, q)| (p - q).rem_euclid(5)).collect();
                if diff == vec![1, 0] {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 2);
        assert_eq!(nu_difference(&b2, FieldKind::Prime(5), &[1, 0]).unwrap(), 2);

        let dep = vec![e(0, 2), e(0, 2)];
        assert!(matches!(
            nu_difference(&dep, FieldKind::Prime(5), &[0, 0]),
            Err(Error::DependentVectors)
        ));
        assert!(nu_difference(&b2, FieldKind::Prime(2), &[0, 0]).is_err());
    }

    #[test]
    fn star_energy_closed_form() {
        assert_eq!(independent_star_energy(0).unwrap(), 1);
        assert_eq!(independent_star_energy(1).unwrap(), 6);
        assert_eq!(independent_star_energy(8).unwrap(), 1_679_616);
        assert!(independent_star_energy(60).is_err());
        for n in 0..=4usize {
            let g = GroupSpec::elementary(5, n.max(1)).unwrap();
            let coords: Vec<Vec<i64>> = (0..n)
                .map(|i| (0..n.max(1)).map(|j| (i == j) as i64).collect())
                .collect();
            let star = subset_sum_set(&ElementMultiset::from_coords(&g, &coords).unwrap()).unwrap();
            assert_eq!(quadruple_count(&star), 6u128.pow(n as u32));
        }
    }

    #[test]
    fn energy_bound_examples() {
        let g = GroupSpec::new(&[7]).unwrap();
        let zero = ElementSet::from_indices(&g, [0]).unwrap();
        let b = energy_sumset_lower_bound(&zero, &zero).unwrap();
        assert!(b.holds_for(1));
        assert!(!b.holds_for(0));

        let pair = ElementSet::from_indices(&g, [0, 1]).unwrap();
        let b = energy_sumset_lower_bound(&pair, &pair).unwrap();
        assert_eq!(b.numerator, BigUint::from(16u32));
        assert_eq!(b.energy_product, BigUint::from(36u32));
        assert!((b.value() - 8.0 / 3.0).abs() < 1e-12);
        assert!(b.holds_for(sumset(&pair, &pair).unwrap().len() as u64));
        assert!(!b.holds_for(2));
        assert!(matches!(
            energy_sumset_lower_bound(&pair, &ElementSet::empty(&g).unwrap()),
            Err(Error::EmptySet)
        ));
    }

    #[test]
    fn char0_examples() {
        assert_eq!(char0_lower_bound(&[5]).unwrap(), BigRational::from_integer(32.into()));
        assert_eq!(
            char0_lower_bound(&[3, 3, 3]).unwrap(),
            BigRational::from_integer(64.into())
        );
        assert_eq!(char0_lower_bound(&[1, 1]).unwrap(), BigRational::from_integer(3.into()));
        assert_eq!(char0_lower_bound(&[]).unwrap(), BigRational::one());
        assert!(char0_lower_bound(&[1, -1]).is_err());
        // (1, 3): 2 * (3/2)^3 = 27/4 ; best order (3, 1): 8 * 3/2 = 12
        assert_eq!(
            char0_lower_bound(&[1, 3]).unwrap(),
            BigRational::new(27.into(), 4.into())
        );
        assert_eq!(
            char0_best_order_bound(&[1, 3]).unwrap(),
            BigRational::from_integer(12.into())
        );
    }

    #[test]
    fn charp_examples() {
        let b = charp_lower_bound(0, 0);
        assert!(b.holds_for(1) && !b.holds_for(0));
        let b = charp_lower_bound(2, 2);
        assert!((b.value() - 64.0 / 9.0).abs() < 1e-12);
        assert!(b.holds_for(8) && !b.holds_for(7));
        // odd rank sum: (8/3)^{1/2} ~ 1.633
        let b = charp_lower_bound(1, 0);
        assert!(b.holds_for(2) && !b.holds_for(1));
    }

    #[test]
    fn extremal_pair_is_a_basis_pair() {
        for l in 1..=3 {
            let (b1, b2) = char3_extremal_pair(l).unwrap();
            let to_i = |v: &Vec<Vec<u64>>| {
                v.iter()
                    .map(|x| x.iter().map(|&y| y as i64).collect())
                    .collect::<Vec<Vec<i64>>>()
            };
            assert_eq!(rank_of_vectors(&to_i(&b1), FieldKind::Prime(3)).unwrap().0, 2 * l);
            assert_eq!(rank_of_vectors(&to_i(&b2), FieldKind::Prime(3)).unwrap().0, 2 * l);
        }
        assert!(char3_extremal_pair(0).is_err());
        assert!(extremal_pair_for(5, 1).is_err());
    }

    #[test]
    fn sigma_examples() {
        assert!(sigma_p(2, 3).unwrap().is_zero());
        assert_eq!(sigma_p(3, 2).unwrap(), BigRational::new(1.into(), 8.into()));
        for p in [3u64, 5, 7, 11, 13, 17] {
            let s = sigma_p(p, 2).unwrap() + BigRational::one();
            assert_eq!(s, BigRational::new((3 * p).into(), 8.into()));
            assert!((1.0 + sigma_p_f64(p, 2) - 3.0 * p as f64 / 8.0).abs() < 1e-12);
        }
        assert!(matches!(sigma_p(9, 2), Err(Error::NotPrime(9))));
    }

    #[test]
    fn sigma_exact_matches_cosine_sum() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            for k in 1..=12 {
                let exact = rational_to_f64(&sigma_p(p, k).unwrap());
                assert!((exact - sigma_p_f64(p, k)).abs() < 1e-12, "p={p} k={k}");
            }
        }
    }

    #[test]
    fn character_bound_examples() {
        assert_eq!(
            character_sum_lower_bound(3, 1, 2).unwrap(),
            BigRational::new(8.into(), 3.into())
        );
        assert_eq!(
            character_sum_lower_bound(5, 2, 2).unwrap(),
            BigRational::new(1600.into(), 225.into())
        );
        assert!(character_sum_lower_bound(2, 1, 2).is_err());
        for p in [3u64, 5, 7] {
            let mut prev = character_sum_lower_bound(p, 2, 1).unwrap();
            for k in 2..=64 {
                let cur = character_sum_lower_bound(p, 2, k).unwrap();
                assert!(cur > prev);
                assert!(cur < BigRational::from_integer((p * p).into()));
                prev = cur;
            }
        }
    }

    #[test]
    fn decimal_rendering() {
        let q = BigRational::new(8.into(), 3.into());
        assert_eq!(rational_to_decimal(&q, 4), "2.6666");
        assert_eq!(rational_to_decimal(&BigRational::from_integer(5.into()), 0), "5");
        assert_eq!(
            rational_to_decimal(&BigRational::new((-1).into(), 4.into()), 2),
            "-0.25"
        );
    }
}

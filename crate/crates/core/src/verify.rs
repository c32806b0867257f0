//! The acceptance checks, shared by the `verify` command and the test suite.
//!
//! Each check is deterministic for a given seed and reports a one-line
//! detail string whether it passes or not.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::energy::{
    additive_energy, char0_lower_bound, char3_extremal_pair, character_sum_lower_bound, charp_lower_bound,
    energy_sumset_lower_bound, independent_star_energy, rational_le, sigma_p, sigma_p_f64,
};
use crate::group::{ElementMultiset, ElementSet, GroupSpec};
use crate::lattice::{
    count_cube_images, covering_number, covering_number_int, example_lattice, is_p_oblique, lattice_from_bases,
    BasisSystem, IntLattice,
};
use crate::linalg::{rank_of_vectors, FieldKind, Fp};
use crate::oracle;
use crate::random::{
    random_basis, random_basis_system, random_generating_multiset, random_group, random_oblique_lattice, random_subset,
};
use crate::sumsets::{
    basis_threshold, growth_trace, halving_complete, integral, is_additive_basis, ruzsa_triangle_sides,
    star_sumset_trace, subset_sum_set, sumset,
};
use crate::synthesis::{bases_from_lattice, SynthesisOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    /// Additive-basis threshold, growth and the sumset inequalities behind it.
    Threshold,
    /// Subset sums of independent vectors and rank products.
    Rank,
    /// Two-set bounds: extremal pair, energy, cosine sums.
    TwoSet,
    /// Lattice coverings and the basis-system correspondence.
    Lattice,
    /// Basis systems built from oblique lattices.
    Synthesis,
    /// Fast paths against brute force.
    Oracles,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::All,
        Suite::Threshold,
        Suite::Rank,
        Suite::TwoSet,
        Suite::Lattice,
        Suite::Synthesis,
        Suite::Oracles,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Threshold => "threshold",
            Suite::Rank => "rank",
            Suite::TwoSet => "two-set",
            Suite::Lattice => "lattice",
            Suite::Synthesis => "synthesis",
            Suite::Oracles => "oracles",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }
}

type Outcome = std::result::Result<String, String>;

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub suite: Suite,
    pub budget: Duration,
    run: fn(u64) -> Outcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub suite: Suite,
    pub passed: bool,
    pub within_budget: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub budget_ms: u128,
}

impl CriterionResult {
    /// `PASS  3 name (12 ms): detail`
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {} ({} ms / {} ms): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_ms,
            self.budget_ms,
            self.detail
        )
    }
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn e2s<T>(r: crate::error::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn rng_for(seed: u64, id: u8) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (u64::from(id) << 56))
}

pub fn criteria() -> Vec<Criterion> {
    let c = |id, name, suite, secs, run| Criterion {
        id,
        name,
        suite,
        budget: Duration::from_secs(secs),
        run,
    };
    vec![
        c(
            1,
            "independent subset sums",
            Suite::Rank,
            1,
            independent_subset_sums as fn(u64) -> Outcome,
        ),
        c(2, "equal rational bases reach (k+1)^n", Suite::Rank, 5, equal_bases),
        c(
            3,
            "rank product bound over the rationals",
            Suite::Rank,
            30,
            rank_product_bound,
        ),
        c(4, "characteristic-3 extremal pair", Suite::TwoSet, 5, extremal_pair),
        c(
            5,
            "energy of independent subset sums",
            Suite::TwoSet,
            5,
            independent_energy,
        ),
        c(6, "energy bound for sumsets", Suite::TwoSet, 30, energy_bound),
        c(7, "(8/3)^r bound for basis pairs", Suite::TwoSet, 30, eight_thirds),
        c(8, "cosine-sum identity and bound", Suite::TwoSet, 1, cosine_sums),
        c(
            9,
            "example lattice covering numbers",
            Suite::Lattice,
            60,
            example_coverings,
        ),
        c(10, "basis system to lattice round trip", Suite::Lattice, 60, round_trip),
        c(
            11,
            "basis systems from oblique lattices",
            Suite::Synthesis,
            60,
            synthesis,
        ),
        c(12, "additive bases at the threshold", Suite::Threshold, 120, threshold),
        c(13, "fast paths agree with brute force", Suite::Oracles, 60, oracles),
        c(14, "Ruzsa triangle and halving", Suite::Threshold, 30, ruzsa_halving),
    ]
}

pub fn run_criterion(c: &Criterion, seed: u64) -> CriterionResult {
    let start = Instant::now();
    let outcome = (c.run)(seed);
    let elapsed = start.elapsed();
    let within_budget = elapsed <= c.budget;
    let (ok, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if !within_budget {
        detail.push_str(" [over time budget]");
    }
    CriterionResult {
        id: c.id,
        name: c.name,
        suite: c.suite,
        passed: ok && within_budget,
        within_budget,
        detail,
        elapsed_ms: elapsed.as_millis(),
        budget_ms: c.budget.as_millis(),
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Vec<CriterionResult> {
    criteria()
        .iter()
        .filter(|c| suite == Suite::All || c.suite == suite)
        .map(|c| run_criterion(c, seed))
        .collect()
}

fn independent_subset_sums(seed: u64) -> Outcome {
    let mut rng = rng_for(seed, 1);
    let mut checked = 0;
    for p in [3u64, 5] {
        let f = e2s(Fp::new(p))?;
        for n in 1..=12usize {
            let basis = random_basis(f, n, &mut rng);
            let size = if (p as f64).powi(n as i32) <= crate::limits::max_order() as f64 {
                let g = e2s(GroupSpec::elementary(p, n))?;
                let b = e2s(ElementMultiset::from_coords(&g, &basis))?;
                e2s(subset_sum_set(&b))?.len() as u64
            } else {
                let images: Vec<Vec<u64>> = basis.iter().map(|v| v.iter().map(|&x| x as u64).collect()).collect();
                count_cube_images(p, &images)
            };
            ensure!(size == 1 << n, "p={p}, n={n}: |B*| = {size}, expected {}", 1u64 << n);
            checked += 1;
        }
    }
    Ok(format!("{checked} independent sets, all |B*| = 2^n"))
}

fn random_rational_basis(n: usize, rng: &mut impl Rng) -> Vec<Vec<i64>> {
    loop {
        let b: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect())
            .collect();
        if rank_of_vectors(&b, FieldKind::Rationals).is_ok_and(|r| r.0 == n) {
            return b;
        }
    }
}

fn equal_bases(seed: u64) -> Outcome {
    let mut rng = rng_for(seed, 2);
    for k in 1..=4usize {
        for n in 1..=4usize {
            let b = random_rational_basis(n, &mut rng);
            let measured = integral::star_sumset_size(&vec![b; k]) as u64;
            let expected = (k as u64 + 1).pow(n as u32);
            ensure!(
                measured == expected,
                "k={k}, n={n}: measured {measured}, expected {expected}"
            );
            let bound = e2s(char0_lower_bound(&vec![n as i64; k]))?;
            ensure!(
                bound == BigRational::from_integer(expected.into()),
                "k={k}, n={n}: bound {bound} differs from (k+1)^n"
            );
        }
    }
    Ok("16 systems, measured = bound = (k+1)^n".into())
}

fn rank_product_bound(seed: u64) -> Outcome {
    let mut rng = rng_for(seed, 3);
    let mut tight = 0;
    for t in 0..100 {
        let k = rng.gen_range(1..=3usize);
        let n = rng.gen_range(1..=6 / k);
        let sets: Vec<Vec<Vec<i64>>> = (0..k)
            .map(|_| {
                let size = rng.gen_range(1..=n + 1);
                (0..size)
                    .map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect())
                    .collect()
            })
            .collect();
        let ranks: Vec<i64> = sets
            .iter()
            .map(|s| rank_of_vectors(s, FieldKind::Rationals).map(|r| r.0 as i64))
            .collect::<crate::error::Result<_>>()
            .map_err(|e| e.to_string())?;
        let bound = e2s(char0_lower_bound(&ranks))?;
        let measured = integral::star_sumset_size(&sets) as u64;
        ensure!(
            rational_le(&bound, measured),
            "instance {t}: measured {measured} < bound {bound} (ranks {ranks:?})"
        );
        if bound == BigRational::from_integer(measured.into()) {
            tight += 1;
        }
    }
    Ok(format!("100 systems hold, {tight} with equality"))
}

fn extremal_pair(_seed: u64) -> Outcome {
    for l in 1..=3usize {
        let (b1, b2) = e2s(char3_extremal_pair(l))?;
        let g = e2s(GroupSpec::elementary(3, 2 * l))?;
        let to_ms = |b: &[Vec<u64>]| {
            let coords: Vec<Vec<i64>> = b.iter().map(|v| v.iter().map(|&x| x as i64).collect()).collect();
            ElementMultiset::from_coords(&g, &coords)
        };
        let (size, _) = e2s(star_sumset_trace(&[e2s(to_ms(&b1))?, e2s(to_ms(&b2))?]))?;
        let expected = 8usize.pow(l as u32);
        ensure!(
            size.len() == expected,
            "l={l}: |B1*+B2*| = {}, expected {expected}",
            size.len()
        );
        let bound = charp_lower_bound(2 * l as u32, 2 * l as u32);
        ensure!(bound.holds_for(expected as u64), "l={l}: (8/3)^{} exceeds 8^l", 2 * l);
    }
    Ok("l = 1, 2, 3 give 8, 64, 512".into())
}

fn independent_energy(seed: u64) -> Outcome {
    let mut rng = rng_for(seed, 5);
    let mut checked = 0;
    for p in [3u64, 5, 7] {
        let f = e2s(Fp::new(p))?;
        for n in 1..=8usize {
            let g = e2s(GroupSpec::elementary(p, n))?;
            if g.order() > crate::limits::max_order() {
                continue;
            }
            let b = e2s(ElementMultiset::from_coords(&g, &random_basis(f, n, &mut rng)))?;
            let star = e2s(subset_sum_set(&b))?;
            let t = additive_energy(&star);
            let expected = e2s(independent_star_energy(n as u32))?;
            ensure!(t == expected, "p={p}, n={n}: T(B*) = {t}, expected 6^n = {expected}");
            checked += 1;
        }
    }
    Ok(format!("{checked} independent sets, all T(B*) = 6^n"))
}

fn energy_bound(seed: u64) -> Outcome {
    let mut rng = rng_for(seed, 6);
    let mut min_ratio = f64::INFINITY;
    for t in 0..1000 {
        let g = e2s(random_group(121, &mut rng))?;
        let da = rng.gen_range(0.02..0.6);
        let db = rng.gen_range(0.02..0.6);
        let a = e2s(random_subset(&g, da, &mut rng))?;
        let b = e2s(random_subset(&g, db, &mut rng))?;
        let bound = e2s(energy_sumset_lower_bound(&a, &b))?;
        let measured = e2s(sumset(&a, &b))?.len() as u64;
        ensure!(
            bound.holds_for(measured),
            "pair {t} in {:?}: |A+B| = {measured} below bound {:.4}",
            g.moduli(),
            bound.value()
        );
        min_ratio = min_ratio.min(measured as f64 / bound.value());
    }
    Ok(format!("1000 pairs hold, least |A+B|/bound = {min_ratio:.4}"))
}

/// The basis pairs shared by the (8/3)^r and cosine-sum checks.
fn basis_pairs(seed: u64) -> std::result::Result<Vec<(u64, usize, BasisSystem)>, String> {
    let mut rng = rng_for(seed, 7);
    (0..100)
        .map(|_| {
            let p = [3u64, 5, 7][rng.gen_range(0..3)];
            let r = rng.gen_range(1..=3usize);
            Ok((p, r, e2s(random_basis_system(p, 2, r, &mut rng))?))
        })
        .collect()
}

fn eight_thirds(seed: u64) -> Outcome {
    let mut min_ratio = f64::INFINITY;
    for (t, (p, r, bs)) in basis_pairs(seed)?.into_iter().enumerate() {
        let measured = e2s(bs.sumset_size())?;
        let bound = charp_lower_bound(r as u32, r as u32);
        ensure!(
            bound.holds_for(measured),
            "pair {t} (p={p}, r={r}): measured {measured} < (8/3)^{r}"
        );
        min_ratio = min_ratio.min(measured as f64 / bound.value());
    }
    Ok(format!("100 pairs hold, least measured/bound = {min_ratio:.4}"))
}

fn cosine_sums(seed: u64) -> Outcome {
    let mut worst = 0f64;
    for p in [3u64, 5, 7, 11, 13, 17] {
        let float_err = (1.0 + sigma_p_f64(p, 2) - 3.0 * p as f64 / 8.0).abs();
        ensure!(float_err < 1e-12, "p={p}: |1 + sigma_p(2) - 3p/8| = {float_err:e}");
        let exact = e2s(sigma_p(p, 2))? + BigRational::one();
        let target = BigRational::new((3 * p).into(), 8.into());
        ensure!(
            exact == target,
            "p={p}: exact 1 + sigma_p(2) = {exact}, expected {target}"
        );
        worst = worst.max(float_err);
    }
    for (t, (p, r, bs)) in basis_pairs(seed)?.into_iter().enumerate() {
        let bound = e2s(character_sum_lower_bound(p, r as u32, 2))?;
        let measured = e2s(bs.sumset_size())?;
        ensure!(
            rational_le(&bound, measured),
            "pair {t} (p={p}, r={r}): measured {measured} < {bound}"
        );
    }
    Ok(format!(
        "identity exact, float error {worst:.1e}; 100 pairs above p^r/(1+sigma_p(2))^r"
    ))
}

fn example_coverings(_seed: u64) -> Outcome {
    let mut checked = 0;
    for k in 2..=5usize {
        for r in 1..=3usize {
            if k * r > 15 {
                continue;
            }
            for p in [2u64, 3, 5, 7] {
                let l = e2s(example_lattice(k, r, p))?;
                let c = e2s(covering_number(&l))?;
                let expected = (k as u64 + 1).pow(r as u32).min(p.pow(r as u32));
                ensure!(c == expected, "(k,r,p)=({k},{r},{p}): C = {c}, expected {expected}");
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} parameter sets match min((k+1)^r, p^r)"))
}

fn round_trip(seed: u64) -> Outcome {
    let mut rng = rng_for(seed, 10);
    for t in 0..100 {
        let p = [3u64, 5][rng.gen_range(0..2)];
        let k = rng.gen_range(2..=3usize);
        let r = rng.gen_range(1..=3usize.min(12 / k));
        let bs = e2s(random_basis_system(p, k, r, &mut rng))?;
        let l = e2s(lattice_from_bases(&bs))?;
        ensure!(is_p_oblique(&l).oblique, "system {t}: lattice not oblique");
        ensure!(
            l.det() == num_bigint::BigUint::from(p).pow(r as u32),
            "system {t}: det {} != p^r",
            l.det()
        );
        let c = e2s(covering_number(&l))?;
        let s = e2s(bs.sumset_size())?;
        ensure!(c == s, "system {t} (p={p}, k={k}, r={r}): C = {c} but sumset size {s}");
    }
    Ok("100 systems: oblique, det p^r, C = sumset size".into())
}

fn synthesis(seed: u64) -> Outcome {
    let mut rng = rng_for(seed, 11);
    let mut improved = 0;
    for t in 0..100 {
        let p = [3u64, 5][rng.gen_range(0..2)];
        let k = rng.gen_range(2..=p as usize);
        let r = rng.gen_range(1..=3usize);
        let l = e2s(random_oblique_lattice(p, k, r, &mut rng))?;
        let opts = SynthesisOptions {
            seed: rng.gen(),
            ..SynthesisOptions::default()
        };
        let (_, cert) = bases_from_lattice(&l, opts).map_err(|e| format!("lattice {t}: {e}"))?;
        ensure!(cert.checks.all_ok(), "lattice {t}: checks {:?}", cert.checks);
        if cert.checks.covering_output < cert.checks.covering_input {
            improved += 1;
        }
    }
    Ok(format!(
        "100 lattices synthesized, {improved} with strictly smaller covering"
    ))
}

/// Every list of cyclic factors `2 <= m_1 <= m_2 <= ...` with product at
/// most `max_order`.
pub fn factorizations_up_to(max_order: u64) -> Vec<Vec<u64>> {
    fn rec(min: u64, budget: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        let mut m = min;
        while m <= budget {
            cur.push(m);
            rec(m, budget / m, cur, out);
            cur.pop();
            m += 1;
        }
    }
    let mut out = Vec::new();
    rec(2, max_order, &mut Vec::new(), &mut out);
    out
}

fn threshold(seed: u64) -> Outcome {
    let mut rng = rng_for(seed, 12);
    let groups = factorizations_up_to(48);
    let (mut systems, mut steps, mut extra_fail) = (0, 0, 0);
    for moduli in &groups {
        let g = e2s(GroupSpec::new(moduli))?;
        let k = basis_threshold(&g) as usize;
        for s in 0..20 {
            let bs: Vec<ElementMultiset> = (0..k)
                .map(|_| random_generating_multiset(&g, 2, &mut rng))
                .collect::<crate::error::Result<_>>()
                .map_err(|e| e.to_string())?;
            ensure!(
                e2s(is_additive_basis(&bs))?,
                "{moduli:?} system {s}: not an additive basis with k = {k}"
            );
            if g.exponent() >= 3 {
                let trace = e2s(growth_trace(&bs))?;
                if let Some(j) = trace.per_step_ok.iter().position(|&ok| !ok) {
                    return Err(format!(
                        "{moduli:?} system {s}: growth step {} fails, sizes {:?}",
                        j + 2,
                        trace.sizes
                    ));
                }
                steps += trace.per_step_ok.len();
                if !trace.all_ok() {
                    extra_fail += 1;
                }
            }
            systems += 1;
        }
    }
    Ok(format!(
        "{} factorizations, {systems} systems are bases, {steps} growth steps hold ({extra_fail} traces miss a derived estimate)",
        groups.len()
    ))
}

fn oracles(seed: u64) -> Outcome {
    let mut rng = rng_for(seed, 13);
    for t in 0..200 {
        let g = e2s(random_group(64, &mut rng))?;
        let n = rng.gen_range(0..=16usize);
        let coords: Vec<Vec<i64>> = (0..n).map(|_| crate::random::random_element(&g, &mut rng)).collect();
        let b = e2s(ElementMultiset::from_coords(&g, &coords))?;
        let fast: HashSet<Vec<u64>> = e2s(subset_sum_set(&b))?
            .elements()
            .map(|e| e.residues().to_vec())
            .collect();
        let items: Vec<Vec<u64>> = b.items().iter().map(|e| e.residues().to_vec()).collect();
        ensure!(
            fast == oracle::subset_sums(&g, &items),
            "subset sums {t} in {:?} disagree",
            g.moduli()
        );
    }
    for t in 0..200 {
        let g = e2s(random_group(64, &mut rng))?;
        let size = rng.gen_range(1..=8usize.min(g.order() as usize));
        let mut idx: Vec<usize> = (0..g.order() as usize).collect();
        rand::seq::SliceRandom::shuffle(idx.as_mut_slice(), &mut rng);
        let set = e2s(ElementSet::from_indices(&g, idx[..size].iter().copied()))?;
        let items: Vec<Vec<u64>> = set.elements().map(|e| e.residues().to_vec()).collect();
        let fast = additive_energy(&set);
        let slow = oracle::energy_quadruples(&g, &items);
        ensure!(fast == slow, "energy {t}: {fast} vs quadruple count {slow}");
    }
    for t in 0..60 {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let k = rng.gen_range(2..=4usize);
        let r = rng.gen_range(1..=12 / k).min(3);
        let l = e2s(random_oblique_lattice(p, k, r, &mut rng))?;
        let a = e2s(covering_number(&l))?;
        let b = e2s(covering_number_int(&e2s(IntLattice::from_block(&l))?))?;
        ensure!(a == b, "lattice {t}: block covering {a} vs HNF covering {b}");
        if k * r <= 8 {
            let c = oracle::covering_by_set_cover(&l);
            ensure!(a == c, "lattice {t}: coset count {a} vs set cover {c}");
        }
    }
    Ok("subset sums (200), energy (200), coverings (60) agree".into())
}

fn ruzsa_halving(seed: u64) -> Outcome {
    let mut rng = rng_for(seed, 14);
    let mut halving = 0;
    for t in 0..1000 {
        let g = e2s(random_group(32, &mut rng))?;
        let n = rng.gen_range(1..=3usize);
        let sets: Vec<ElementSet> = (0..=n)
            .map(|_| {
                let d = rng.gen_range(0.05..0.8);
                random_subset(&g, d, &mut rng)
            })
            .collect::<crate::error::Result<_>>()
            .map_err(|e| e.to_string())?;
        let (lhs, rhs) = e2s(ruzsa_triangle_sides(&sets))?;
        ensure!(lhs <= rhs, "instance {t} in {:?}: {lhs} > {rhs}", g.moduli());
        if e2s(halving_complete(&sets[0], &sets[1]))? {
            halving += 1;
        }
    }
    Ok(format!("1000 instances hold; halving step exercised {halving} times"))
}

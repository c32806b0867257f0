use addbasis_core::energy::{
    char0_best_order_bound, char0_lower_bound, character_sum_lower_bound, charp_lower_bound, energy_sumset_lower_bound,
    BoundName, BoundReport,
};
use addbasis_core::limits;
use addbasis_core::linalg::{is_prime, rank_of_vectors};
use addbasis_core::sumsets::{integral, star_sumset_trace, subset_sum_set, sumset};
use addbasis_core::{BasisSystem, ElementMultiset, ElementSet, Error, FieldKind, GroupSpec};
use serde_json::{json, Value};

use super::{invalid, multisets, Outcome};
use crate::error::CliError;
use crate::instance::{Instance, Loaded};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    Char0,
    Charp,
    Energy,
    Charsum,
}

impl Which {
    fn name(self) -> &'static str {
        match self {
            Which::Char0 => "char0",
            Which::Charp => "charp",
            Which::Energy => "energy",
            Which::Charsum => "charsum",
        }
    }
}

pub fn run(loaded: Loaded, which: Which) -> Result<Outcome, CliError> {
    let (bound, extra) = match (&loaded.instance, which) {
        (Instance::BasisSystem { p: 0, bases, .. }, Which::Char0) => char0(bases)?,
        (Instance::BasisSystem { .. }, Which::Char0) => {
            return Err(invalid(
                "the char0 bound needs a basis_system over the rationals (p = 0)",
            ))
        }
        (Instance::BasisSystem { p, r, bases, .. }, Which::Charp) => charp(*p, *r, bases)?,
        (Instance::BasisSystem { p, r, bases, .. }, Which::Energy) => energy_stars(*p, *r, bases)?,
        (Instance::GroupSets { moduli, sets }, Which::Energy) => energy_sets(moduli, sets)?,
        (Instance::BasisSystem { p, bases, .. }, Which::Charsum) => charsum(*p, bases)?,
        (inst, w) => {
            return Err(invalid(format!(
                "bound {} does not apply to a {} instance",
                w.name(),
                inst.kind()
            )))
        }
    };
    let mut outputs = json!({
        "which": which.name(),
        "bound": serde_json::to_value(&bound).expect("bound serializes"),
    });
    if let Value::Object(extra) = extra {
        outputs.as_object_mut().expect("object").extend(extra);
    }
    Ok(Outcome::ok(loaded.digest, outputs))
}

fn vector_count_cap(bases: &[Vec<Vec<i64>>]) -> Result<(), CliError> {
    let total: usize = bases.iter().map(Vec::len).sum();
    let cap = limits::max_cube_dim();
    if total as u64 > cap {
        return Err(Error::DeskScale {
            what: "total number of vectors",
            size: total as u64,
            cap,
        }
        .into());
    }
    Ok(())
}

fn ranks(bases: &[Vec<Vec<i64>>], field: FieldKind) -> Result<Vec<i64>, CliError> {
    bases.iter().map(|b| Ok(rank_of_vectors(b, field)?.0 as i64)).collect()
}

fn field_of(p: u64) -> Result<FieldKind, CliError> {
    match p {
        0 => Ok(FieldKind::Rationals),
        p if is_prime(p) => Ok(FieldKind::Prime(p)),
        p => Err(Error::NotPrime(p).into()),
    }
}

/// `|B_1* + ... + B_k*|` in `F_p^r`, or over the integers when `p = 0`.
fn measured_sumset(p: u64, r: usize, bases: &[Vec<Vec<i64>>]) -> Result<u64, CliError> {
    vector_count_cap(bases)?;
    if p == 0 {
        return Ok(integral::star_sumset_size(bases) as u64);
    }
    let g = GroupSpec::elementary(p, r)?;
    g.ensure_enumerable()?;
    let ms = multisets(&g, bases)?;
    Ok(star_sumset_trace(&ms)?.0.len() as u64)
}

fn char0(bases: &[Vec<Vec<i64>>]) -> Result<(BoundReport, Value), CliError> {
    let rk = ranks(bases, FieldKind::Rationals)?;
    let measured = measured_sumset(0, 0, bases)?;
    let q = char0_lower_bound(&rk)?;
    let best = char0_best_order_bound(&rk)?;
    let best = BoundReport::rational(BoundName::Char0Product, &best, Some(measured));
    Ok((
        BoundReport::rational(BoundName::Char0Product, &q, Some(measured)),
        json!({"ranks": rk, "best_order": best}),
    ))
}

fn charp(p: u64, r: usize, bases: &[Vec<Vec<i64>>]) -> Result<(BoundReport, Value), CliError> {
    if bases.len() != 2 {
        return Err(invalid(format!(
            "the charp bound takes exactly two sets, got {}",
            bases.len()
        )));
    }
    if p == 2 {
        return Err(invalid("the charp bound needs odd or zero characteristic"));
    }
    let field = field_of(p)?;
    let rk = ranks(bases, field)?;
    let measured = measured_sumset(p, r, bases)?;
    let b = charp_lower_bound(rk[0] as u32, rk[1] as u32);
    Ok((BoundReport::charp(b, Some(measured)), json!({"ranks": rk})))
}

fn stars(ms: &[ElementMultiset]) -> Result<Vec<ElementSet>, CliError> {
    ms.iter().map(|m| subset_sum_set(m).map_err(CliError::from)).collect()
}

fn energy_pair(a: &ElementSet, b: &ElementSet) -> Result<(BoundReport, u64), CliError> {
    let measured = sumset(a, b)?.len() as u64;
    let bound = energy_sumset_lower_bound(a, b)?;
    Ok((BoundReport::energy(&bound, Some(measured)), measured))
}

/// Cauchy-Schwarz bound for `B_1* + B_2*`.
fn energy_stars(p: u64, r: usize, bases: &[Vec<Vec<i64>>]) -> Result<(BoundReport, Value), CliError> {
    if bases.len() != 2 {
        return Err(invalid(format!(
            "the energy bound takes exactly two sets, got {}",
            bases.len()
        )));
    }
    if p == 0 {
        return Err(invalid(
            "the energy bound is evaluated in a finite group; p must be prime",
        ));
    }
    vector_count_cap(bases)?;
    let g = GroupSpec::elementary(p, r)?;
    g.ensure_enumerable()?;
    let ms = multisets(&g, bases)?;
    let st = stars(&ms)?;
    let (report, _) = energy_pair(&st[0], &st[1])?;
    Ok((report, json!({"applied_to": "subset_sums"})))
}

/// Cauchy-Schwarz bound for `A + B` with the two sets as given.
fn energy_sets(moduli: &[u64], sets: &[Vec<Vec<i64>>]) -> Result<(BoundReport, Value), CliError> {
    if sets.len() != 2 {
        return Err(invalid(format!(
            "the energy bound takes exactly two sets, got {}",
            sets.len()
        )));
    }
    let g = GroupSpec::new(moduli)?;
    g.ensure_enumerable()?;
    let elems: Vec<ElementSet> = sets
        .iter()
        .map(|s| {
            let els = s.iter().map(|c| g.element(c)).collect::<Result<Vec<_>, _>>()?;
            ElementSet::from_elements(&g, &els)
        })
        .collect::<Result<_, _>>()?;
    let (report, _) = energy_pair(&elems[0], &elems[1])?;
    Ok((report, json!({"applied_to": "sets"})))
}

fn charsum(p: u64, bases: &[Vec<Vec<i64>>]) -> Result<(BoundReport, Value), CliError> {
    if p == 0 || p == 2 {
        return Err(invalid("the character-sum bound needs an odd prime p"));
    }
    let bs = BasisSystem::new(p, bases)?;
    let (k, r) = (bs.k(), bs.r());
    let measured = bs.sumset_size()?;
    let q = character_sum_lower_bound(p, r as u32, k as u32)?;
    Ok((
        BoundReport::rational(BoundName::CharacterSum, &q, Some(measured)),
        json!({"k": k, "r": r}),
    ))
}

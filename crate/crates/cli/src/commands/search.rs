use std::collections::BTreeMap;

use addbasis_core::energy::{character_sum_lower_bound, rational_le, rational_to_decimal};
use addbasis_core::lattice::covering_number;
use addbasis_core::limits;
use addbasis_core::linalg::is_prime;
use addbasis_core::random::{random_basis_system, random_oblique_lattice_of_dim};
use addbasis_core::{BasisSystem, BlockLattice, Error};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::{invalid, residues_i64, Outcome};
use crate::error::CliError;
use crate::instance::Instance;
use crate::report::params_digest;

const BATCH: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    #[value(name = "min_cover", alias = "min-cover")]
    MinCover,
    #[value(name = "min_sumset", alias = "min-sumset")]
    MinSumset,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::MinCover => "min_cover",
            Mode::MinSumset => "min_sumset",
        }
    }
}

pub struct Args {
    pub k: usize,
    pub r: usize,
    pub p: u64,
    pub budget: u64,
    pub mode: Mode,
    pub seed: u64,
}

enum Sample {
    Lattice(BlockLattice),
    Bases(BasisSystem),
}

impl Sample {
    fn objective(&self) -> Result<u64, CliError> {
        Ok(match self {
            Sample::Lattice(l) => covering_number(l)?,
            Sample::Bases(b) => b.sumset_size()?,
        })
    }

    fn instance(&self) -> Instance {
        match self {
            Sample::Lattice(l) => Instance::BlockLattice {
                p: l.p(),
                k: l.k(),
                r: l.r(),
                generators: residues_i64(&l.basis_rows()),
            },
            Sample::Bases(b) => Instance::BasisSystem {
                p: b.p(),
                k: b.k(),
                r: b.r(),
                bases: b.bases().iter().map(|v| residues_i64(v)).collect(),
            },
        }
    }
}

fn check(args: &Args) -> Result<(), CliError> {
    if args.budget == 0 {
        return Err(invalid("--budget must be at least 1"));
    }
    if !is_prime(args.p) {
        return Err(Error::NotPrime(args.p).into());
    }
    if args.r == 0 || args.k == 0 {
        return Err(invalid("--k and --r must be at least 1"));
    }
    match args.mode {
        Mode::MinCover => {
            if args.k < 2 {
                return Err(invalid("min_cover needs k >= 2"));
            }
            let n = (args.k * args.r) as u64;
            if n > limits::max_cube_dim() {
                return Err(Error::DeskScale {
                    what: "cube dimension k*r",
                    size: n,
                    cap: limits::max_cube_dim(),
                }
                .into());
            }
        }
        Mode::MinSumset => {
            addbasis_core::GroupSpec::elementary(args.p, args.r)?.ensure_enumerable()?;
        }
    }
    Ok(())
}

/// The proven lower bound for `|B_1* + ... + B_k*|`: the character-sum bound
/// for odd `p`, `2^r` for `p = 2`.
fn proven_bound(p: u64, k: usize, r: usize) -> Result<BigRational, CliError> {
    if p == 2 {
        return Ok(BigRational::from_integer(num_bigint::BigInt::from(2u32).pow(r as u32)));
    }
    Ok(character_sum_lower_bound(p, r as u32, k as u32)?)
}

pub fn run(args: &Args) -> Result<Outcome, CliError> {
    check(args)?;
    let params = json!({
        "mode": args.mode.name(),
        "p": args.p,
        "k": args.k,
        "r": args.r,
        "budget": args.budget,
    });
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let dim = (args.k - 1) * args.r;
    let bound = proven_bound(args.p, args.k, args.r)?;

    let mut values: Vec<u64> = Vec::with_capacity(args.budget as usize);
    let mut best: Option<(u64, Instance)> = None;
    let mut left = args.budget;
    while left > 0 {
        let n = left.min(BATCH as u64);
        left -= n;
        // draws are sequential so the sample stream depends only on the seed
        let batch: Vec<Sample> = (0..n)
            .map(|_| -> Result<Sample, CliError> {
                Ok(match args.mode {
                    Mode::MinCover => {
                        Sample::Lattice(random_oblique_lattice_of_dim(args.p, args.k, args.r, dim, &mut rng)?)
                    }
                    Mode::MinSumset => Sample::Bases(random_basis_system(args.p, args.k, args.r, &mut rng)?),
                })
            })
            .collect::<Result<_, _>>()?;
        let objs: Vec<u64> = batch.par_iter().map(Sample::objective).collect::<Result<_, _>>()?;
        for (s, v) in batch.iter().zip(&objs) {
            if best.as_ref().is_none_or(|(b, _)| v < b) {
                best = Some((*v, s.instance()));
            }
        }
        values.extend(objs);
    }
    let (best_value, best_instance) = best.expect("budget is at least 1");

    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    for v in &values {
        *hist.entry(*v).or_default() += 1;
    }
    let p_pow_r = num_bigint::BigUint::from(args.p).pow(args.r as u32);
    let k1_pow_r = num_bigint::BigUint::from(args.k as u64 + 1).pow(args.r as u32);
    let bound_dec = rational_to_decimal(&bound, 12);
    let outputs = json!({
        "parameters": params,
        "samples": values.len(),
        "best_value": best_value,
        "best_instance": best_instance,
        "histogram": hist.iter().map(|(v, c)| json!({"value": v, "count": c})).collect::<Vec<_>>(),
        "reference": {
            "p_pow_r": p_pow_r.to_string(),
            "k_plus_1_pow_r": k1_pow_r.to_string(),
            "proven_bound": {
                "kind": if args.p == 2 { "two_pow_r" } else { "character_sum" },
                "numerator": bound.numer().to_string(),
                "denominator": bound.denom().to_string(),
                "value": bound_dec.clone(),
                "holds_for_best": rational_le(&bound, best_value),
            },
        },
        "below_p_pow_r": num_bigint::BigUint::from(best_value) < p_pow_r,
        "note": "minimum over sampled instances only; not a certified optimum",
    });

    let mut rows = vec![["index", "mode", "p", "k", "r", "bound", "measured", "holds"]
        .map(String::from)
        .to_vec()];
    for (i, v) in values.iter().enumerate() {
        rows.push(vec![
            i.to_string(),
            args.mode.name().into(),
            args.p.to_string(),
            args.k.to_string(),
            args.r.to_string(),
            bound_dec.clone(),
            v.to_string(),
            rational_le(&bound, *v).to_string(),
        ]);
    }
    Ok(Outcome {
        input_digest: params_digest(&params),
        outputs,
        exit: 0,
        csv: Some(rows),
    })
}

use addbasis_core::lattice::{covering_number, covering_number_int, is_p_oblique, lattice_from_bases, ObliqueVerdict};
use addbasis_core::limits;
use addbasis_core::synthesis::{bases_from_lattice, SynthesisOptions};
use addbasis_core::{BasisSystem, BlockLattice, IntLattice};
use serde_json::{json, Map, Value};

use super::{invalid, Outcome};
use crate::error::CliError;
use crate::instance::{Instance, Loaded};

#[derive(Default)]
pub struct Args {
    pub cover: bool,
    pub oblique: bool,
    pub from_bases: bool,
    pub to_bases: bool,
    /// Block shape for `int_lattice` inputs.
    pub shape: Option<(u64, usize, usize)>,
    pub allow_small_field: bool,
    pub seed: u64,
}

fn block_json(l: &BlockLattice) -> Value {
    json!({
        "p": l.p(),
        "k": l.k(),
        "r": l.r(),
        "dim_w": l.dim_w(),
        "det": l.det().to_string(),
        "basis": l.basis_rows(),
    })
}

fn oblique_json(v: &ObliqueVerdict) -> Value {
    serde_json::to_value(v).expect("verdict serializes")
}

fn synthesize(l: &BlockLattice, args: &Args) -> Result<Value, CliError> {
    let opts = SynthesisOptions {
        seed: args.seed,
        allow_small_field: args.allow_small_field,
        check_covering: l.ambient_dim() as u64 <= limits::max_cube_dim(),
    };
    let (bs, cert) = bases_from_lattice(l, opts)?;
    Ok(json!({
        "bases": bs.bases(),
        "certificate": cert,
        "all_checks_ok": cert.checks.all_ok(),
    }))
}

pub fn run(loaded: Loaded, args: &Args) -> Result<Outcome, CliError> {
    let any = args.cover || args.oblique || args.from_bases || args.to_bases;
    let mut out = Map::new();
    match &loaded.instance {
        Instance::BlockLattice { p, k, r, generators } => {
            if args.from_bases {
                return Err(invalid("--from-bases needs a basis_system instance"));
            }
            let l = BlockLattice::new(*p, *k, *r, generators)?;
            out.insert("lattice".into(), block_json(&l));
            if args.cover || !any {
                out.insert("covering_number".into(), json!(covering_number(&l)?));
            }
            if args.oblique || !any {
                out.insert("oblique".into(), oblique_json(&is_p_oblique(&l)));
            }
            if args.to_bases {
                out.insert("to_bases".into(), synthesize(&l, args)?);
            }
        }
        Instance::IntLattice { dim, basis } => {
            if args.from_bases {
                return Err(invalid("--from-bases needs a basis_system instance"));
            }
            let il = IntLattice::from_generators(*dim, basis)?;
            out.insert(
                "lattice".into(),
                json!({"dim": il.dim(), "det": il.det()?.to_string(), "basis": il.basis()}),
            );
            if args.cover || !any {
                out.insert("covering_number".into(), json!(covering_number_int(&il)?));
            }
            let need_shape = args.oblique || args.to_bases;
            if need_shape || (!any && args.shape.is_some()) {
                let (p, k, r) = args
                    .shape
                    .ok_or_else(|| invalid("--p, --k and --r are required to read an int_lattice in blocks"))?;
                let l = il.to_block(p, k, r)?;
                out.insert("block".into(), block_json(&l));
                if args.oblique || !any {
                    out.insert("oblique".into(), oblique_json(&is_p_oblique(&l)));
                }
                if args.to_bases {
                    out.insert("to_bases".into(), synthesize(&l, args)?);
                }
            }
        }
        Instance::BasisSystem { p, bases, .. } => {
            if args.to_bases {
                return Err(invalid("--to-bases needs a lattice instance"));
            }
            if *p == 0 {
                return Err(invalid(
                    "lattices of basis systems are defined over F_p; p must be prime",
                ));
            }
            let bs = BasisSystem::new(*p, bases)?;
            let l = lattice_from_bases(&bs)?;
            out.insert("lattice".into(), block_json(&l));
            if args.cover {
                let c = covering_number(&l)?;
                out.insert("covering_number".into(), json!(c));
                out.insert("sumset_size".into(), json!(bs.sumset_size()?));
            }
            if args.oblique || !any || args.from_bases {
                out.insert("oblique".into(), oblique_json(&is_p_oblique(&l)));
            }
        }
        Instance::GroupSets { .. } => {
            return Err(invalid(
                "lattice needs a block_lattice, int_lattice or basis_system instance",
            ));
        }
    }
    Ok(Outcome::ok(loaded.digest, Value::Object(out)))
}

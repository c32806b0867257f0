use addbasis_core::group::generates;
use addbasis_core::sumsets::{
    additive_basis_witness, basis_threshold, growth_trace, star_sumset_trace, threshold_value,
};
use addbasis_core::GroupSpec;
use serde_json::{json, Value};

use super::{invalid, multisets, Outcome};
use crate::error::CliError;
use crate::instance::{Instance, Loaded};

pub struct Args {
    pub k: Option<usize>,
    pub witness: Option<Vec<i64>>,
}

pub fn run(loaded: Loaded, args: &Args) -> Result<Outcome, CliError> {
    let Instance::GroupSets { moduli, sets } = &loaded.instance else {
        return Err(invalid(format!(
            "sumset needs a group_sets instance, got {}",
            loaded.instance.kind()
        )));
    };
    let g = GroupSpec::new(moduli)?;
    g.ensure_enumerable()?;
    let k = args.k.unwrap_or(sets.len());
    if k == 0 || k > sets.len() {
        return Err(invalid(format!("--k must be between 1 and {}", sets.len())));
    }
    let bs = multisets(&g, &sets[..k])?;
    let (total, sizes) = star_sumset_trace(&bs)?;
    let generating: Vec<bool> = bs.iter().map(generates).collect::<Result<_, _>>()?;
    let threshold = basis_threshold(&g);

    let growth = if g.exponent() < 3 {
        json!({"skipped": "exponent below 3"})
    } else if !generating.iter().all(|&x| x) {
        json!({"skipped": "some set does not generate the group"})
    } else {
        serde_json::to_value(growth_trace(&bs)?).expect("trace serializes")
    };

    let witness = match &args.witness {
        None => Value::Null,
        Some(coords) => {
            if coords.len() != moduli.len() {
                return Err(invalid(format!("--witness needs {} coordinates", moduli.len())));
            }
            let target = g.element(coords)?;
            let w = additive_basis_witness(&bs, &target)?;
            json!({
                "element": target.residues(),
                "reachable": w.is_some(),
                "parts": w.map(|parts| parts.iter().map(|p| p.iter().map(|e| e.residues().to_vec()).collect::<Vec<_>>()).collect::<Vec<_>>()),
            })
        }
    };

    let outputs = json!({
        "group": {
            "moduli": g.moduli(),
            "invariant_factors": g.invariant_factors(),
            "order": g.order(),
            "exponent": g.exponent(),
            "rank": g.rank(),
        },
        "k": k,
        "sizes": sizes,
        "sumset_size": total.len(),
        "is_additive_basis": total.is_full(),
        "generating": generating,
        "threshold": {
            "k_required": threshold,
            "value": format!("{:.12}", threshold_value(&g)),
            "k_meets_threshold": k as u64 >= threshold,
        },
        "growth": growth,
        "witness": witness,
    });
    Ok(Outcome::ok(loaded.digest, outputs))
}

//! Desk-scale caps shared by every enumerating routine.
//!
//! Dense element masks and cube-vertex enumeration are exponential in the
//! instance size, so each enumerating operation checks one of two caps before
//! allocating. Defaults can be overridden with the `ADDBASIS_MAX_ORDER` and
//! `ADDBASIS_MAX_CUBE_DIM` environment variables, or programmatically.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_ORDER: u64 = 1 << 24;
pub const DEFAULT_MAX_CUBE_DIM: u64 = 24;

pub const MAX_ORDER_ENV: &str = "ADDBASIS_MAX_ORDER";
pub const MAX_CUBE_DIM_ENV: &str = "ADDBASIS_MAX_CUBE_DIM";

// 0 means "not overridden".
static ORDER_OVERRIDE: AtomicU64 = AtomicU64::new(0);
static CUBE_OVERRIDE: AtomicU64 = AtomicU64::new(0);

fn env_u64(name: &str) -> Option<u64> {
    std::env::var(name).ok()?.trim().parse().ok()
}

fn env_defaults() -> &'static (u64, u64) {
    static CELL: OnceLock<(u64, u64)> = OnceLock::new();
    CELL.get_or_init(|| {
        (
            env_u64(MAX_ORDER_ENV).unwrap_or(DEFAULT_MAX_ORDER),
            env_u64(MAX_CUBE_DIM_ENV).unwrap_or(DEFAULT_MAX_CUBE_DIM),
        )
    })
}

/// Largest group order that may be enumerated densely.
pub fn max_order() -> u64 {
    match ORDER_OVERRIDE.load(Ordering::Relaxed) {
        0 => env_defaults().0,
        v => v,
    }
}

/// Largest cube dimension `kr` whose `2^{kr}` vertices may be enumerated.
pub fn max_cube_dim() -> u64 {
    match CUBE_OVERRIDE.load(Ordering::Relaxed) {
        0 => env_defaults().1,
        v => v,
    }
}

pub fn set_max_order(cap: u64) {
    ORDER_OVERRIDE.store(cap, Ordering::Relaxed);
}

pub fn set_max_cube_dim(cap: u64) {
    CUBE_OVERRIDE.store(cap, Ordering::Relaxed);
}

pub(crate) fn check_order(order: u64) -> Result<()> {
    let cap = max_order();
    if order > cap {
        return Err(Error::DeskScale {
            what: "group order",
            size: order,
            cap,
        });
    }
    Ok(())
}

pub(crate) fn check_cube_dim(dim: usize) -> Result<()> {
    let cap = max_cube_dim().min(62);
    if dim as u64 > cap {
        return Err(Error::DeskScale {
            what: "cube dimension",
            size: dim as u64,
            cap,
        });
    }
    Ok(())
}

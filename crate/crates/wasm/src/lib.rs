//! Browser bindings: zeroth-order solution, radial density and form factor
//! of one atom or ion.

use effcharge::config::{configuration_from_string, element_symbol, format_with_core, select_ground_configuration, Configuration};
use effcharge::observables::{density_zeroth, form_factor_numeric, s_to_q, DensityExpansion};
use effcharge::refdata::{load_reference, Dataset, RecordKey};
use effcharge::scf0::{solve_zeroth_order, ZerothOrderSolution};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn err(e: effcharge::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Empty `config` selects the ground configuration of `n` electrons.
fn resolve(z: u32, n: u32, config: &str) -> Result<(Configuration, ZerothOrderSolution), effcharge::Error> {
    if config.trim().is_empty() {
        select_ground_configuration(z, n as usize)
    } else {
        let cfg = configuration_from_string(z, config)?;
        let sol = solve_zeroth_order(&cfg)?;
        Ok((cfg, sol))
    }
}

fn density(z: u32, n: u32, config: &str) -> Result<DensityExpansion, JsError> {
    let (cfg, sol) = resolve(z, n, config).map_err(err)?;
    density_zeroth(&cfg, &sol).map_err(err)
}

/// JSON summary: configuration, `A`, `B`, `Z*`, `E0` and the tabulated
/// neutral-atom values when they exist.
#[wasm_bindgen]
pub fn solve(z: u32, n: u32, config: &str) -> Result<String, JsError> {
    let (cfg, sol) = resolve(z, n, config).map_err(err)?;
    let reference = if cfg.n_electrons() == z as usize {
        load_reference(Dataset::Table2)
            .ok()
            .and_then(|t| t.into_iter().find(|r| r.key == RecordKey::ground(z, z)))
            .map(|r| json!({ "Zstar": r.get("Zstar"), "E0": r.get("E0"), "E_HF": r.get("E_HF") }))
    } else {
        None
    };
    let v = json!({
        "symbol": element_symbol(z),
        "Z": z,
        "N": cfg.n_electrons(),
        "configuration": format_with_core(&cfg.occupancy()),
        "spherical": cfg.is_spherical(),
        "A": sol.a_f64(),
        "B": sol.b_f64(),
        "Zstar": sol.zstar,
        "E0": sol.e0,
        "reference": reference,
    });
    Ok(v.to_string())
}

/// `4 pi r^2 rho(r)` at `points` evenly spaced radii on `[0, r_max]`.
#[wasm_bindgen]
pub fn radial_density(z: u32, n: u32, config: &str, r_max: f64, points: u32) -> Result<Vec<f64>, JsError> {
    let d = density(z, n, config)?;
    Ok(grid(r_max, points).map(|r| d.radial_density(r)).collect())
}

/// Orientation-averaged form factor at `points` evenly spaced
/// `s = sin(theta)/lambda` on `[0, s_max]` (1/angstrom).
#[wasm_bindgen]
pub fn form_factor(z: u32, n: u32, config: &str, s_max: f64, points: u32) -> Result<Vec<f64>, JsError> {
    let d = density(z, n, config)?;
    Ok(grid(s_max, points).map(|s| form_factor_numeric(&d, s_to_q(s))).collect())
}

fn grid(max: f64, points: u32) -> impl Iterator<Item = f64> {
    let step = if points > 1 { max / f64::from(points - 1) } else { 0.0 };
    (0..points).map(move |i| f64::from(i) * step)
}

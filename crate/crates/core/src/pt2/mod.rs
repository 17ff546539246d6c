//! Second-order corrections in the hydrogen-like basis.
//!
//! All radial work is done in unit-charge coordinates (`r -> Z* r`), where
//! the perturbation is `w = -(Z - Z*)/r + sum 1/r_ij` and orbital energies are
//! `-1/(2n^2)`; the explicit `Z*` factors cancel in every second-order term.
//! Radial functions are reduced (`u = r R`) and sampled on one panel grid.

use crate::angular::gaunt_ck;
use crate::config::{Configuration, Orbital, Spin, Subshell};
use crate::greens::{hydrogen_u, GreenEnergy, RadialGreenKernel, Resolvent};
use crate::quad::{GridSpec, RadialGrid};
use crate::scf0::ZerothOrderSolution;
use crate::{Error, Result};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

mod excited;
mod pairs;
pub use excited::*;
pub use pairs::*;

/// Projection below which a degenerate level counts as uncoupled.
pub const DEGENERATE_COUPLING_TOL: f64 = 1e-10;

/// What to do with an unoccupied level degenerate with the excited orbital
/// that the perturbation couples to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum DegeneratePolicy {
    /// Report [`Error::UnresolvedDegeneracy`].
    #[default]
    Reject,
    /// Drop the level from the intermediate sum and record it.
    Exclude,
}

#[derive(Debug, Clone, Copy)]
pub struct Pt2Options {
    pub degenerate: DegeneratePolicy,
    /// Largest panel width of the radial grid.
    pub max_panel: f64,
}

impl Default for Pt2Options {
    fn default() -> Self {
        Pt2Options { degenerate: DegeneratePolicy::Reject, max_panel: 1.0 }
    }
}

/// Radial grid sized for the outermost occupied shell.
pub fn grid_for(cfg: &Configuration, max_panel: f64) -> RadialGrid {
    let n_outer = cfg.orbitals().iter().map(|o| o.n).max().unwrap_or(1);
    RadialGrid::new(GridSpec::new(40.0 * f64::from(n_outer * n_outer), max_panel))
}

/// Occupied radial functions and their multipole potentials on a grid.
pub struct PerturbationPotentials {
    pub grid: RadialGrid,
    /// `Z - Z*`.
    pub screening: f64,
    orbitals: HashMap<Subshell, Vec<f64>>,
    /// `y^j_{ab}(r) = int u_a u_b r_<^j / r_>^{j+1}`.
    multipoles: HashMap<(Subshell, Subshell, u32), Vec<f64>>,
}

impl PerturbationPotentials {
    pub fn new(cfg: &Configuration, sol: &ZerothOrderSolution, grid: RadialGrid) -> Self {
        let shells: Vec<Subshell> = cfg.occupancy().keys().copied().collect();
        let orbitals: HashMap<Subshell, Vec<f64>> =
            shells.iter().map(|s| (*s, grid.sample(|r| hydrogen_u(s.n, s.l, r)))).collect();
        let mut pp = PerturbationPotentials {
            grid,
            screening: f64::from(cfg.z()) - sol.zstar,
            orbitals,
            multipoles: HashMap::new(),
        };
        for a in &shells {
            for b in &shells {
                if a > b {
                    continue;
                }
                for j in a.l.abs_diff(b.l)..=a.l + b.l {
                    pp.ensure_multipole(*a, *b, j);
                }
            }
        }
        pp
    }

    pub fn orbital(&self, s: Subshell) -> &[f64] {
        &self.orbitals[&s]
    }

    fn ensure_multipole(&mut self, a: Subshell, b: Subshell, j: u32) {
        let key = if a <= b { (a, b, j) } else { (b, a, j) };
        if self.multipoles.contains_key(&key) {
            return;
        }
        let f: Vec<f64> = self.orbitals[&a].iter().zip(&self.orbitals[&b]).map(|(x, y)| x * y).collect();
        let y = self.grid.multipole_potential(&f, j);
        self.multipoles.insert(key, y);
    }

    pub fn multipole(&self, a: Subshell, b: Subshell, j: u32) -> &[f64] {
        let key = if a <= b { (a, b, j) } else { (b, a, j) };
        &self.multipoles[&key]
    }

    /// Channels `L -> u_L(r)` of `w_k |k> = [v1 + sum_{o != k} (J_o - delta_spin K_o)] |k>`,
    /// all with magnetic number `m_k`.
    pub fn excitation_source(&self, cfg: &Configuration, k: usize) -> BTreeMap<u32, Vec<f64>> {
        let ok = cfg.orbitals()[k];
        let sk = ok.subshell();
        let uk = self.orbital(sk);
        let n = self.grid.len();
        let mut ch: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
        let v1: Vec<f64> = self.grid.r.iter().zip(uk).map(|(r, u)| -self.screening / r * u).collect();
        ch.insert(ok.l, v1);
        let (lk, mk) = (ok.l as i32, ok.m);
        for (i, o) in cfg.orbitals().iter().enumerate() {
            if i == k {
                continue;
            }
            let so = o.subshell();
            let (lo, mo) = (o.l as i32, o.m);
            for j in (0..=2 * lo).step_by(2) {
                let a = gaunt_ck(j, lo, mo, lo, mo);
                if a == 0.0 {
                    continue;
                }
                let y = self.multipole(so, so, j as u32);
                for l_out in ((lk - j).abs()..=lk + j).step_by(2) {
                    let b = gaunt_ck(j, l_out, mk, lk, mk);
                    if b == 0.0 {
                        continue;
                    }
                    let c = ch.entry(l_out as u32).or_insert_with(|| vec![0.0; n]);
                    for t in 0..n {
                        c[t] += a * b * y[t] * uk[t];
                    }
                }
            }
            if o.spin != ok.spin {
                continue;
            }
            let uo = self.orbital(so);
            for j in (lo - lk).abs()..=lo + lk {
                let a = gaunt_ck(j, lk, mk, lo, mo);
                if a == 0.0 {
                    continue;
                }
                let y = self.multipole(so, sk, j as u32);
                for l_out in (lo - j).abs()..=lo + j {
                    let b = gaunt_ck(j, l_out, mk, lo, mo);
                    if b == 0.0 {
                        continue;
                    }
                    let c = ch.entry(l_out as u32).or_insert_with(|| vec![0.0; n]);
                    for t in 0..n {
                        c[t] -= a * b * y[t] * uo[t];
                    }
                }
            }
        }
        ch
    }
}

/// `<sigma| w |k>` for a bound hydrogen-like `sigma`, where `w` is the
/// effective one-electron operator seen by orbital `k` (zero unless `sigma`
/// shares spin and `m` with `k`).
pub fn single_excitation_matrix_element(
    pots: &PerturbationPotentials,
    cfg: &Configuration,
    k: usize,
    sigma: &Orbital,
) -> Result<f64> {
    let ok = cfg.orbitals().get(k).ok_or_else(|| Error::domain("orbital index out of range"))?;
    if sigma.spin != ok.spin || sigma.m != ok.m {
        return Ok(0.0);
    }
    let ch = pots.excitation_source(cfg, k);
    Ok(match ch.get(&sigma.l) {
        None => 0.0,
        Some(f) => {
            let g = &pots.grid;
            let u = g.sample(|r| hydrogen_u(sigma.n, sigma.l, r));
            g.integrate(&u.iter().zip(f).map(|(a, b)| a * b).collect::<Vec<_>>())
        }
    })
}

/// Unoccupied degenerate level dropped from an intermediate sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExcludedLevel {
    pub n: u32,
    pub l: u32,
    pub m: i32,
    pub coupling: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SingleContribution {
    pub orbital: Orbital,
    pub delta: f64,
    pub excluded: Vec<ExcludedLevel>,
}

/// Subtracted levels for electron `o` in channel `(l, m)`: every same-spin
/// occupied orbital of that channel.
fn occupied_levels(cfg: &Configuration, l: u32, m: i32, spin: Spin) -> Vec<u32> {
    cfg.orbitals().iter().filter(|o| o.l == l && o.m == m && o.spin == spin).map(|o| o.n).collect()
}

/// Per-orbital single-excitation shifts `-<w_k k| G~_k |w_k k>`.
pub fn delta_e2_single(
    cfg: &Configuration,
    pots: &PerturbationPotentials,
    resolvent: &dyn Resolvent,
    opts: &Pt2Options,
) -> Result<Vec<SingleContribution>> {
    let run = |k: usize| -> Result<SingleContribution> {
        let ok = cfg.orbitals()[k];
        let energy = GreenEnergy::from_nu(f64::from(ok.n))?;
        let mut delta = 0.0;
        let mut excluded = Vec::new();
        for (l, f) in pots.excitation_source(cfg, k) {
            let mut subtracted = occupied_levels(cfg, l, ok.m, ok.spin);
            if ok.n > l && !subtracted.contains(&ok.n) {
                let g = &pots.grid;
                let u = g.sample(|r| hydrogen_u(ok.n, l, r));
                let c = g.integrate(&u.iter().zip(&f).map(|(a, b)| a * b).collect::<Vec<_>>());
                if c.abs() >= DEGENERATE_COUPLING_TOL {
                    if opts.degenerate == DegeneratePolicy::Reject {
                        return Err(Error::UnresolvedDegeneracy { n: ok.n, l });
                    }
                    excluded.push(ExcludedLevel { n: ok.n, l, m: ok.m, coupling: c });
                }
                subtracted.push(ok.n);
            }
            let kernel = RadialGreenKernel::new(l, energy, subtracted)?;
            delta -= resolvent.form_matrix(&pots.grid, &kernel, &[f])?[0][0];
        }
        Ok(SingleContribution { orbital: ok, delta, excluded })
    };
    let idx: Vec<usize> = (0..cfg.n_electrons()).collect();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        idx.par_iter().map(|&k| run(k)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        idx.iter().map(|&k| run(k)).collect()
    }
}

/// Energy through second order with its parts.
#[derive(Debug, Clone, Serialize)]
pub struct SecondOrderBreakdown {
    pub e0: f64,
    pub de_single: f64,
    pub de_multi: f64,
    pub e2_single: f64,
    pub e2_total: f64,
    pub singles: Vec<SingleContribution>,
    pub pairs: Vec<PairResult>,
}

/// `E0 + dE_single` with the closed-form kernel.
pub fn e2_single(cfg: &Configuration, sol: &ZerothOrderSolution, opts: &Pt2Options) -> Result<SecondOrderBreakdown> {
    let pots = PerturbationPotentials::new(cfg, sol, grid_for(cfg, opts.max_panel));
    let singles = delta_e2_single(cfg, &pots, &crate::greens::ClosedForm, opts)?;
    let de_single: f64 = singles.iter().map(|s| s.delta).sum();
    Ok(SecondOrderBreakdown {
        e0: sol.e0,
        de_single,
        de_multi: 0.0,
        e2_single: sol.e0 + de_single,
        e2_total: sol.e0 + de_single,
        singles,
        pairs: Vec::new(),
    })
}

/// `E0 + dE_single + dE_multi` with the closed-form kernel.
pub fn e2_total(
    cfg: &Configuration,
    sol: &ZerothOrderSolution,
    space: &IntermediateSpace,
    opts: &Pt2Options,
) -> Result<SecondOrderBreakdown> {
    let pots = PerturbationPotentials::new(cfg, sol, grid_for(cfg, opts.max_panel));
    let singles = delta_e2_single(cfg, &pots, &crate::greens::ClosedForm, opts)?;
    let pairs = delta_e2_multi(cfg, &pots, &crate::greens::ClosedForm, space, opts)?;
    let de_single: f64 = singles.iter().map(|s| s.delta).sum();
    let de_multi: f64 = pairs.iter().map(|p| p.total.total()).sum();
    Ok(SecondOrderBreakdown {
        e0: sol.e0,
        de_single,
        de_multi,
        e2_single: sol.e0 + de_single,
        e2_total: sol.e0 + de_single + de_multi,
        singles,
        pairs,
    })
}

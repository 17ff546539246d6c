//! Two-electron states built from s orbitals, including the degenerate
//! He 1s2s pair.
//!
//! For a spatial state `Psi = sum_t c_t f_t(1) g_t(2)` the second-order shift is
//! `-sum_sigma <chi_sigma| G~(E_H - e_sigma) |chi_sigma>` with
//! `chi_sigma(2) = int sigma*(1) [v1(1) + v1(2) + 1/r12] Psi d1`.
//! Intermediate pairs degenerate with `Psi` are left out of `G~`.

use super::pairs::{bound_sigma, channel_gram, continuum_nodes, continuum_sigma, sum_partial_waves, SigmaRadial};
use super::{grid_for, ExcludedLevel, IntermediateSpace, PartialWave, Pt2Options, SigmaTerm};
use crate::config::{Configuration, Orbital, Spin};
use crate::exact::{ratio, to_f64};
use crate::greens::{hydrogen_u, Resolvent};
use crate::quad::RadialGrid;
use crate::radial::{direct_integral_i, exchange_integral_l};
use crate::{Error, Result};
use num_rational::BigRational;
use serde::Serialize;

/// Spatial two-electron state `sum_t c_t |n_a s>(1) |n_b s>(2)`.
#[derive(Debug, Clone, Serialize)]
pub struct SpatialState {
    pub terms: Vec<(f64, u32, u32)>,
}

impl SpatialState {
    /// Unit-charge unperturbed energy, common to all terms.
    fn energy(&self) -> Result<f64> {
        let e = |t: &(f64, u32, u32)| -0.5 / f64::from(t.1 * t.1) - 0.5 / f64::from(t.2 * t.2);
        let first = self.terms.first().ok_or_else(|| Error::domain("empty two-electron state"))?;
        if self.terms.iter().any(|t| (e(t) - e(first)).abs() > 1e-14) {
            return Err(Error::domain("terms of a two-electron state must be degenerate"));
        }
        Ok(e(first))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HeliumState {
    /// `(1s 2s - 2s 1s)/sqrt 2`, spin triplet.
    Triplet2S,
    /// `(1s 2s + 2s 1s)/sqrt 2`, spin singlet.
    Singlet2S,
}

impl HeliumState {
    pub fn label(self) -> &'static str {
        match self {
            HeliumState::Triplet2S => "2 3S",
            HeliumState::Singlet2S => "2 1S",
        }
    }

    pub fn spatial(self) -> SpatialState {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let s = if self == HeliumState::Triplet2S { -c } else { c };
        SpatialState { terms: vec![(c, 1, 2), (s, 2, 1)] }
    }

    /// `B = F0(1s,2s) -+ G0(1s,2s)` at unit charge.
    pub fn b_exact(self) -> Result<BigRational> {
        let f0 = direct_integral_i(1, 0, 2, 0, 0)?;
        let g0 = exchange_integral_l(1, 0, 2, 0, 0)?;
        Ok(match self {
            HeliumState::Triplet2S => f0 - g0,
            HeliumState::Singlet2S => f0 + g0,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExcitedBreakdown {
    pub state: HeliumState,
    pub zstar: f64,
    pub e0: f64,
    pub de2: f64,
    pub e2: f64,
    pub waves: Vec<PartialWave>,
    pub excluded: Vec<ExcludedLevel>,
}

/// Second-order shift of `state` for nuclear charge `z` and effective charge `zstar`.
pub fn spatial_second_order(
    z: u32,
    zstar: f64,
    state: &SpatialState,
    resolvent: &dyn Resolvent,
    space: &IntermediateSpace,
    opts: &Pt2Options,
) -> Result<(SigmaTerm, Vec<PartialWave>, Vec<ExcludedLevel>)> {
    let e_h = state.energy()?;
    let n_outer = state.terms.iter().map(|t| t.1.max(t.2)).max().unwrap_or(1);
    let probe = Configuration::new(z, vec![Orbital { n: n_outer, l: 0, m: 0, spin: Spin::Up }])?;
    let grid = grid_for(&probe, opts.max_panel);
    let screening = f64::from(z) - zstar;
    let mut shells: Vec<u32> = state.terms.iter().flat_map(|t| [t.1, t.2]).collect();
    shells.sort_unstable();
    shells.dedup();
    let us: Vec<(u32, Vec<f64>)> = shells.iter().map(|&n| (n, grid.sample(|r| hydrogen_u(n, 0, r)))).collect();
    let u = |n: u32| -> &[f64] { &us.iter().find(|x| x.0 == n).unwrap().1 };
    let v1: Vec<f64> = grid.r.iter().map(|r| -screening / r).collect();

    let nodes = space.continuum.as_ref().map(continuum_nodes).unwrap_or_default();
    let mut excluded = Vec::new();
    let mut waves = Vec::new();
    for l1 in 0..=space.l_max {
        let mut wave = PartialWave { l: l1, ..Default::default() };
        for n in l1 + 1..=space.n_max {
            let s = bound_sigma(&grid, n, l1);
            let t = sigma_term(&grid, resolvent, state, e_h, &s, &u, &v1, opts, &mut excluded)?;
            wave.bound.push((n, t));
        }
        for &(q, w) in &nodes {
            let s = continuum_sigma(&grid, q, l1);
            let t = sigma_term(&grid, resolvent, state, e_h, &s, &u, &v1, opts, &mut excluded)?;
            wave.continuum.push((q, w, t));
        }
        waves.push(wave);
    }
    let total = sum_partial_waves(&waves, space.extrapolate)?;
    Ok((total, waves, excluded))
}

#[allow(clippy::too_many_arguments)]
fn sigma_term<'a>(
    grid: &RadialGrid,
    resolvent: &dyn Resolvent,
    state: &SpatialState,
    e_h: f64,
    sigma: &SigmaRadial,
    u: &dyn Fn(u32) -> &'a [f64],
    v1: &[f64],
    opts: &Pt2Options,
    excluded: &mut Vec<ExcludedLevel>,
) -> Result<SigmaTerm> {
    let l = sigma.l;
    let scale = 1.0 / f64::from(2 * l + 1);
    let mut chi = vec![0.0; grid.len()];
    let mut subtracted = Vec::new();
    for &(c, f, g) in &state.terms {
        let uf = u(f);
        let ug = u(g);
        let rho: Vec<f64> = sigma.u.iter().zip(uf).map(|(a, b)| a * b).collect();
        let y = grid.multipole_potential(&rho, l);
        for i in 0..chi.len() {
            chi[i] += c * scale * y[i] * ug[i];
        }
        if l == 0 {
            let v1f: f64 = grid.integrate(&rho.iter().zip(v1).map(|(a, b)| a * b).collect::<Vec<_>>());
            for i in 0..chi.len() {
                chi[i] += c * v1f * ug[i];
            }
            if sigma.n == Some(f) {
                for i in 0..chi.len() {
                    chi[i] += c * v1[i] * ug[i];
                }
                subtracted.push(g);
            }
        }
    }
    if l != 0 {
        subtracted.clear();
    }
    subtracted.sort_unstable();
    subtracted.dedup();
    let g = channel_gram(grid, resolvent, l, e_h - sigma.energy, subtracted, &[chi], &[vec![1.0]], 0, opts.degenerate, excluded)?;
    Ok(SigmaTerm { direct: -f64::from(2 * l + 1) * g[0][0], exchange: 0.0 })
}

/// He 2 3S or 2 1S through second order with the closed-form kernel.
pub fn degenerate_he_excited(state: HeliumState, space: &IntermediateSpace, opts: &Pt2Options) -> Result<ExcitedBreakdown> {
    let a = ratio(5, 8);
    let b = state.b_exact()?;
    let zstar_exact = BigRational::from_integer(2.into()) - &b / (&a * ratio(2, 1));
    let zstar = to_f64(&zstar_exact);
    let e0 = -to_f64(&(&a * &zstar_exact * &zstar_exact));
    let (total, waves, excluded) =
        spatial_second_order(2, zstar, &state.spatial(), &crate::greens::ClosedForm, space, opts)?;
    let de2 = total.total();
    Ok(ExcitedBreakdown { state, zstar, e0, de2, e2: e0 + de2, waves, excluded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::select_ground_configuration;
    use crate::greens::TruncatedSpectral;
    use crate::pt2::{delta_e2_multi, delta_e2_single, PerturbationPotentials};

    #[test]
    fn ground_state_equals_singles_plus_pairs() {
        let (cfg, sol) = select_ground_configuration(2, 2).unwrap();
        let opts = Pt2Options::default();
        let space = IntermediateSpace { n_max: 6, l_max: 3, continuum: None, extrapolate: false };
        let res = TruncatedSpectral { n_max: 6 };
        let pots = PerturbationPotentials::new(&cfg, &sol, grid_for(&cfg, opts.max_panel));
        let singles: f64 = delta_e2_single(&cfg, &pots, &res, &opts).unwrap().iter().map(|s| s.delta).sum();
        let pairs: f64 = delta_e2_multi(&cfg, &pots, &res, &space, &opts).unwrap().iter().map(|p| p.total.total()).sum();
        let state = SpatialState { terms: vec![(1.0, 1, 1)] };
        let (unified, _, _) = spatial_second_order(2, sol.zstar, &state, &res, &space, &opts).unwrap();
        assert!((unified.total() - singles - pairs).abs() < 1e-10, "{} vs {}", unified.total(), singles + pairs);
    }

    #[test]
    fn excited_charges_are_exact() {
        assert_eq!(HeliumState::Triplet2S.b_exact().unwrap(), ratio(137, 729));
        assert_eq!(HeliumState::Singlet2S.b_exact().unwrap(), ratio(169, 729));
    }

    #[test]
    fn triplet_equals_high_spin_determinant() {
        use crate::scf0::solve_zeroth_order;
        let up = |n| Orbital { n, l: 0, m: 0, spin: Spin::Up };
        let cfg = Configuration::new(2, vec![up(1), up(2)]).unwrap();
        let sol = solve_zeroth_order(&cfg).unwrap();
        let opts = Pt2Options::default();
        let space = IntermediateSpace { n_max: 6, l_max: 3, continuum: None, extrapolate: false };
        let res = TruncatedSpectral { n_max: 6 };
        let pots = PerturbationPotentials::new(&cfg, &sol, grid_for(&cfg, opts.max_panel));
        let singles: f64 = delta_e2_single(&cfg, &pots, &res, &opts).unwrap().iter().map(|s| s.delta).sum();
        let pairs = delta_e2_multi(&cfg, &pots, &res, &space, &opts).unwrap();
        assert!(pairs[0].total.exchange != 0.0);
        let det = singles + pairs[0].total.total();
        let (unified, _, _) =
            spatial_second_order(2, sol.zstar, &HeliumState::Triplet2S.spatial(), &res, &space, &opts).unwrap();
        assert!((unified.total() - det).abs() < 1e-10, "{} vs {}", unified.total(), det);
    }
}

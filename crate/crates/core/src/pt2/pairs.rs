//! Pair (two-electron excitation) term.
//!
//! For each electron pair `(k, l)` the two-particle resolvent is reduced by
//! residues: the excitation `sigma` of electron `k` is summed explicitly over
//! hydrogen-like bound states and a continuum quadrature, while electron `l`
//! sees the closed-form reduced kernel at `E = e_k + e_l - e_sigma`:
//!
//! `dE_kl = -sum_sigma [<D|G~|D> - delta_s <D|G~|X>]`,
//! `D = (sigma k | 1/r12) l`, `X = (sigma l | 1/r12) k`.

use super::{DegeneratePolicy, ExcludedLevel, PerturbationPotentials, Pt2Options, DEGENERATE_COUPLING_TOL};
use crate::angular::gaunt_ck;
use crate::config::{Configuration, Orbital, Spin};
use crate::greens::{hydrogen_u, GreenEnergy, RadialGreenKernel, Resolvent};
use crate::quad::{gauss_legendre, RadialGrid};
use crate::special::coulomb_continuum_many;
use crate::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;

/// Continuum part of the intermediate sum: Gauss-Legendre panels in momentum.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ContinuumQuadrature {
    pub q_max: f64,
    pub panel: f64,
    pub order: usize,
}

impl Default for ContinuumQuadrature {
    fn default() -> Self {
        ContinuumQuadrature { q_max: 12.0, panel: 0.5, order: 8 }
    }
}

/// Intermediate states of the explicitly summed electron.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntermediateSpace {
    pub n_max: u32,
    pub l_max: u32,
    pub continuum: Option<ContinuumQuadrature>,
    /// Add power-law tails in `n`, `q` and `L` beyond the cutoffs.
    pub extrapolate: bool,
}

impl Default for IntermediateSpace {
    fn default() -> Self {
        IntermediateSpace { n_max: 20, l_max: 8, continuum: Some(ContinuumQuadrature::default()), extrapolate: true }
    }
}

/// One radial intermediate function of the summed electron.
pub(crate) struct SigmaRadial {
    pub l: u32,
    /// `Some(n)` for bound states.
    pub n: Option<u32>,
    pub energy: f64,
    pub u: Vec<f64>,
}

pub(crate) fn bound_sigma(grid: &RadialGrid, n: u32, l: u32) -> SigmaRadial {
    SigmaRadial { l, n: Some(n), energy: -0.5 / f64::from(n * n), u: grid.sample(|r| hydrogen_u(n, l, r)) }
}

pub(crate) fn continuum_sigma(grid: &RadialGrid, q: f64, l: u32) -> SigmaRadial {
    SigmaRadial { l, n: None, energy: 0.5 * q * q, u: coulomb_continuum_many(q, l, &grid.r) }
}

/// Momentum nodes and weights of the continuum quadrature.
pub(crate) fn continuum_nodes(c: &ContinuumQuadrature) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(c.order);
    let panels = (c.q_max / c.panel).round().max(1.0) as usize;
    let h = c.q_max / panels as f64;
    let mut out = Vec::with_capacity(panels * c.order);
    for p in 0..panels {
        let a = p as f64 * h;
        for i in 0..c.order {
            out.push((a + 0.5 * h * (x[i] + 1.0), 0.5 * h * w[i]));
        }
    }
    out
}

/// Contribution of one radial intermediate function.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct SigmaTerm {
    pub direct: f64,
    pub exchange: f64,
}

impl SigmaTerm {
    pub fn total(&self) -> f64 {
        self.direct + self.exchange
    }
}

impl std::ops::AddAssign for SigmaTerm {
    fn add_assign(&mut self, o: SigmaTerm) {
        self.direct += o.direct;
        self.exchange += o.exchange;
    }
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn dot(a: &[f64], m: &[Vec<f64>], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        if a[i] == 0.0 {
            continue;
        }
        for j in 0..b.len() {
            s += a[i] * m[i][j] * b[j];
        }
    }
    s
}

fn occupied_levels(cfg: &Configuration, l: u32, m: i32, spin: Spin) -> Vec<u32> {
    cfg.orbitals().iter().filter(|o| o.l == l && o.m == m && o.spin == spin).map(|o| o.n).collect()
}

fn multipoles_needed(l1: u32, l2: u32) -> impl Iterator<Item = u32> {
    (l1.abs_diff(l2)..=l1 + l2).step_by(2)
}

/// Reduced-kernel Gram matrix of `basis` in channel `l2` at energy `e`, with
/// degenerate handling: a level at `e` that is not already subtracted is
/// subtracted when every source vector is orthogonal to it, otherwise it is
/// excluded (policy permitting) and reported.
#[allow(clippy::too_many_arguments)]
pub(crate) fn channel_gram(
    grid: &RadialGrid,
    resolvent: &dyn Resolvent,
    l2: u32,
    e: f64,
    mut subtracted: Vec<u32>,
    basis: &[Vec<f64>],
    sources: &[Vec<f64>],
    m2: i32,
    policy: DegeneratePolicy,
    excluded: &mut Vec<ExcludedLevel>,
) -> Result<Vec<Vec<f64>>> {
    if !(e < 0.0) {
        return Err(Error::domain(format!("pair energy {e} is not below the continuum threshold")));
    }
    let energy = GreenEnergy::from_energy(e)?;
    if let Some(n) = energy.pole(l2) {
        if !subtracted.contains(&n) {
            let u = grid.sample(|r| hydrogen_u(n, l2, r));
            let proj: Vec<f64> = basis.iter().map(|f| grid.integrate(&mul(&u, f))).collect();
            let coupling = sources
                .iter()
                .map(|c| c.iter().zip(&proj).map(|(a, b)| a * b).sum::<f64>().abs())
                .fold(0.0f64, f64::max);
            if coupling >= DEGENERATE_COUPLING_TOL {
                if policy == DegeneratePolicy::Reject {
                    return Err(Error::UnresolvedDegeneracy { n, l: l2 });
                }
                excluded.push(ExcludedLevel { n, l: l2, m: m2, coupling });
            }
            subtracted.push(n);
        }
    }
    let kernel = RadialGreenKernel::new(l2, energy, subtracted)?;
    resolvent.form_matrix(grid, &kernel, basis)
}

/// Pair contribution of one radial intermediate function `sigma` of electron `k`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn pair_sigma_term(
    cfg: &Configuration,
    pots: &PerturbationPotentials,
    resolvent: &dyn Resolvent,
    ok: &Orbital,
    ol: &Orbital,
    sigma: &SigmaRadial,
    policy: DegeneratePolicy,
    excluded: &mut Vec<ExcludedLevel>,
) -> Result<SigmaTerm> {
    let grid = &pots.grid;
    let same_spin = ok.spin == ol.spin;
    let uk = pots.orbital(ok.subshell());
    let ul = pots.orbital(ol.subshell());
    let e_pair = ok.energy() + ol.energy() - sigma.energy;
    let l1 = sigma.l as i32;
    let (lk, ll) = (ok.l as i32, ol.l as i32);
    // y^j_{sigma k} u_l and y^j_{sigma l} u_k
    let ydir: BTreeMap<u32, Vec<f64>> = multipoles_needed(sigma.l, ok.l)
        .map(|j| (j, mul(&grid.multipole_potential(&mul(&sigma.u, uk), j), ul)))
        .collect();
    let yexc: BTreeMap<u32, Vec<f64>> = if same_spin {
        multipoles_needed(sigma.l, ol.l)
            .map(|j| (j, mul(&grid.multipole_potential(&mul(&sigma.u, ul), j), uk)))
            .collect()
    } else {
        BTreeMap::new()
    };
    let l2_max = ydir.keys().map(|j| j + ol.l).chain(yexc.keys().map(|j| j + ok.l)).max().unwrap_or(0);
    let mut term = SigmaTerm::default();
    for l2 in 0..=l2_max {
        let l2i = l2 as i32;
        let dj: Vec<u32> = ydir.keys().copied().filter(|&j| (ll - l2i).unsigned_abs() <= j && j <= ol.l + l2 && (ol.l + l2 + j) % 2 == 0).collect();
        let xj: Vec<u32> = yexc.keys().copied().filter(|&j| (lk - l2i).unsigned_abs() <= j && j <= ok.l + l2 && (ok.l + l2 + j) % 2 == 0).collect();
        if dj.is_empty() && xj.is_empty() {
            continue;
        }
        let basis: Vec<Vec<f64>> = dj.iter().map(|j| ydir[j].clone()).chain(xj.iter().map(|j| yexc[j].clone())).collect();
        let nd = dj.len();
        // group magnetic components by subtraction set
        let mut groups: BTreeMap<Vec<u32>, Vec<(i32, Vec<f64>, Vec<f64>)>> = BTreeMap::new();
        for m1 in -l1..=l1 {
            if let Some(n) = sigma.n {
                if cfg.contains(&Orbital { n, l: sigma.l, m: m1, spin: ok.spin }) {
                    continue;
                }
            }
            let m2 = ok.m + ol.m - m1;
            if m2.abs() > l2i {
                continue;
            }
            let mut cd = vec![0.0; basis.len()];
            let mut cx = vec![0.0; basis.len()];
            for (i, &j) in dj.iter().enumerate() {
                let ji = j as i32;
                cd[i] = gaunt_ck(ji, l1, m1, lk, ok.m) * gaunt_ck(ji, ll, ol.m, l2i, m2);
            }
            for (i, &j) in xj.iter().enumerate() {
                let ji = j as i32;
                cx[nd + i] = gaunt_ck(ji, l1, m1, ll, ol.m) * gaunt_ck(ji, lk, ok.m, l2i, m2);
            }
            if cd.iter().all(|&c| c == 0.0) {
                continue;
            }
            let sub = occupied_levels(cfg, l2, m2, ol.spin);
            groups.entry(sub).or_default().push((m2, cd, cx));
        }
        for (sub, members) in groups {
            let sources: Vec<Vec<f64>> = members.iter().flat_map(|(_, cd, cx)| [cd.clone(), cx.clone()]).collect();
            let m2 = members[0].0;
            let g = channel_gram(grid, resolvent, l2, e_pair, sub, &basis, &sources, m2, policy, excluded)?;
            for (_, cd, cx) in &members {
                term.direct -= dot(cd, &g, cd);
                if same_spin {
                    term.exchange += dot(cd, &g, cx);
                }
            }
        }
    }
    Ok(term)
}

/// Raw partial sums of one pair, resolved by `L` of the summed electron.
#[derive(Debug, Clone, Default, Serialize)]
pub struct PartialWave {
    pub l: u32,
    /// `(n, term)` for bound intermediate states.
    pub bound: Vec<(u32, SigmaTerm)>,
    /// `(q, weight, term)`; the term is a density in `q`.
    pub continuum: Vec<(f64, f64, SigmaTerm)>,
}

impl PartialWave {
    fn bound_sum(&self) -> SigmaTerm {
        let mut s = SigmaTerm::default();
        for (_, t) in &self.bound {
            s += *t;
        }
        s
    }

    fn continuum_sum(&self) -> SigmaTerm {
        let mut s = SigmaTerm::default();
        for (_, w, t) in &self.continuum {
            s += SigmaTerm { direct: w * t.direct, exchange: w * t.exchange };
        }
        s
    }

    /// `c n^{-3}` tail of the bound sum fitted to the last state.
    fn bound_tail(&self) -> SigmaTerm {
        match self.bound.last() {
            Some(&(n, t)) if self.bound.len() >= 2 => {
                let nf = f64::from(n);
                let f = nf.powi(3) * 0.5 / (nf + 0.5).powi(2);
                SigmaTerm { direct: t.direct * f, exchange: t.exchange * f }
            }
            _ => SigmaTerm::default(),
        }
    }

    /// Power-law tail of the continuum density beyond the last node.
    fn continuum_tail(&self) -> SigmaTerm {
        let n = self.continuum.len();
        if n < 2 {
            return SigmaTerm::default();
        }
        let (q1, _, t1) = self.continuum[n - 2];
        let (q2, _, t2) = self.continuum[n - 1];
        let fit = |a: f64, b: f64| -> f64 {
            if a == 0.0 || b == 0.0 || a.signum() != b.signum() {
                return 0.0;
            }
            let p = (a / b).ln() / (q2 / q1).ln();
            if p <= 1.5 {
                return 0.0;
            }
            b * q2 / (p - 1.0)
        };
        SigmaTerm { direct: fit(t1.direct, t2.direct), exchange: fit(t1.exchange, t2.exchange) }
    }

    pub fn total(&self, extrapolate: bool) -> SigmaTerm {
        let mut s = self.bound_sum();
        s += self.continuum_sum();
        if extrapolate {
            s += self.bound_tail();
            s += self.continuum_tail();
        }
        s
    }
}

/// Sum over partial waves with an optional `(L + 1/2)^{-p}` tail.
pub fn sum_partial_waves(waves: &[PartialWave], extrapolate: bool) -> Result<SigmaTerm> {
    let totals: Vec<SigmaTerm> = waves.iter().map(|w| w.total(extrapolate)).collect();
    let mut s = SigmaTerm::default();
    for t in &totals {
        s += *t;
    }
    if !extrapolate || totals.len() < 3 {
        return Ok(s);
    }
    let n = totals.len();
    let estimate = s.total();
    let (la, lb) = (waves[n - 2].l as f64 + 0.5, waves[n - 1].l as f64 + 0.5);
    let tail = |a: f64, b: f64| -> Result<f64> {
        if a == 0.0 || b == 0.0 || b.abs() < 1e-14 {
            return Ok(0.0);
        }
        if a.signum() != b.signum() {
            return Ok(0.0);
        }
        let p = (a / b).ln() / (lb / la).ln();
        if p <= 2.0 {
            return Err(Error::Convergence {
                what: "partial-wave sum of the pair term".into(),
                estimate,
                change: b,
            });
        }
        // sum_{L > Lb} b ((L+1/2)/lb)^{-p} ~ b lb^p (lb + 1/2)^{1-p} / (p - 1)
        Ok(b * lb.powf(p) * (lb + 0.5).powf(1.0 - p) / (p - 1.0))
    };
    s.direct += tail(totals[n - 2].direct, totals[n - 1].direct)?;
    s.exchange += tail(totals[n - 2].exchange, totals[n - 1].exchange)?;
    Ok(s)
}

/// Result for one electron pair.
#[derive(Debug, Clone, Serialize)]
pub struct PairResult {
    pub first: Orbital,
    pub second: Orbital,
    pub waves: Vec<PartialWave>,
    pub total: SigmaTerm,
    pub excluded: Vec<ExcludedLevel>,
}

/// Pair term for electrons `k < l` of `cfg`.
pub fn pair_correlation(
    cfg: &Configuration,
    pots: &PerturbationPotentials,
    resolvent: &dyn Resolvent,
    k: usize,
    l: usize,
    space: &IntermediateSpace,
    opts: &Pt2Options,
) -> Result<PairResult> {
    let ok = cfg.orbitals()[k];
    let ol = cfg.orbitals()[l];
    let grid = &pots.grid;
    let nodes = space.continuum.as_ref().map(continuum_nodes).unwrap_or_default();
    let mut excluded = Vec::new();
    let mut waves = Vec::new();
    for l1 in 0..=space.l_max {
        let mut wave = PartialWave { l: l1, ..Default::default() };
        for n in l1 + 1..=space.n_max {
            let s = bound_sigma(grid, n, l1);
            let t = pair_sigma_term(cfg, pots, resolvent, &ok, &ol, &s, opts.degenerate, &mut excluded)?;
            wave.bound.push((n, t));
        }
        for &(q, w) in &nodes {
            let s = continuum_sigma(grid, q, l1);
            let t = pair_sigma_term(cfg, pots, resolvent, &ok, &ol, &s, opts.degenerate, &mut excluded)?;
            wave.continuum.push((q, w, t));
        }
        waves.push(wave);
    }
    let total = sum_partial_waves(&waves, space.extrapolate)?;
    Ok(PairResult { first: ok, second: ol, waves, total, excluded })
}

/// All pairs `k < l`, in parallel when enabled.
pub fn delta_e2_multi(
    cfg: &Configuration,
    pots: &PerturbationPotentials,
    resolvent: &dyn Resolvent,
    space: &IntermediateSpace,
    opts: &Pt2Options,
) -> Result<Vec<PairResult>> {
    let n = cfg.n_electrons();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|k| (k + 1..n).map(move |l| (k, l))).collect();
    let run = |&(k, l): &(usize, usize)| pair_correlation(cfg, pots, resolvent, k, l, space, opts);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        pairs.par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        pairs.iter().map(run).collect()
    }
}

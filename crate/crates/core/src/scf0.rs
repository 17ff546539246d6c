//! Zeroth-order solution: one effective charge for every electron.
//!
//! With unit-charge sums `A = sum 1/(2n^2)` and `B = J + K` the variational
//! energy is `E(Z*) = A Z*^2 - 2 A Z Z* + B Z*`, minimised at
//! `Z* = Z - B/(2A)` with `E0 = -A Z*^2`.

use crate::angular::{coulomb_angular_factor, exchange_angular_d};
use crate::config::{Configuration, Orbital, Subshell};
use crate::error::{Error, Result};
use crate::exact::{ratio, to_f64};
use crate::radial::{direct_integral_i, exchange_integral_l};
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::sync::{OnceLock, RwLock};

/// Exact and floating-point zeroth-order quantities for one configuration.
#[derive(Debug, Clone)]
pub struct ZerothOrderSolution {
    pub z: u32,
    pub n_electrons: usize,
    pub a: BigRational,
    pub b: BigRational,
    pub coulomb_j: BigRational,
    pub exchange_k: BigRational,
    pub zstar_exact: BigRational,
    pub zstar: f64,
    pub e0: f64,
}

/// Serializable summary of [`ZerothOrderSolution`].
#[derive(Debug, Clone, Serialize)]
pub struct ZerothOrderSummary {
    pub z: u32,
    pub n_electrons: usize,
    pub a: f64,
    pub b: f64,
    pub zstar: f64,
    pub e0: f64,
}

impl ZerothOrderSolution {
    pub fn a_f64(&self) -> f64 {
        to_f64(&self.a)
    }

    pub fn b_f64(&self) -> f64 {
        to_f64(&self.b)
    }

    /// Exact first-order correction `<W>` at the optimal charge.
    pub fn first_order_energy(&self) -> BigRational {
        let z = BigRational::from_integer(self.z.into());
        let two_a = &self.a * ratio(2, 1);
        &self.zstar_exact * (&self.b - two_a * (z - &self.zstar_exact))
    }

    /// Orbital energy `-Z*^2/(2n^2)`.
    pub fn orbital_energy(&self, n: u32) -> f64 {
        -self.zstar * self.zstar / (2.0 * f64::from(n * n))
    }

    pub fn summary(&self) -> ZerothOrderSummary {
        ZerothOrderSummary {
            z: self.z,
            n_electrons: self.n_electrons,
            a: self.a_f64(),
            b: self.b_f64(),
            zstar: self.zstar,
            e0: self.e0,
        }
    }
}

/// `A = sum_k 1/(2 n_k^2)`.
pub fn kinetic_sum_a(cfg: &Configuration) -> BigRational {
    cfg.orbitals()
        .iter()
        .fold(BigRational::zero(), |acc, o| acc + ratio(1, 2 * i64::from(o.n * o.n)))
}

fn alpha_cache() -> &'static RwLock<HashMap<(i32, i32, i32), BigRational>> {
    static C: OnceLock<RwLock<HashMap<(i32, i32, i32), BigRational>>> = OnceLock::new();
    C.get_or_init(|| RwLock::new(HashMap::new()))
}

fn alpha(l: i32, m: i32, j: i32) -> BigRational {
    if let Some(v) = alpha_cache().read().unwrap().get(&(l, m, j)) {
        return v.clone();
    }
    let v = coulomb_angular_factor(l, m, j);
    alpha_cache().write().unwrap().insert((l, m, j), v.clone());
    v
}

type DKey = (i32, i32, i32, i32, i32);

fn d_cache() -> &'static RwLock<HashMap<DKey, BigRational>> {
    static C: OnceLock<RwLock<HashMap<DKey, BigRational>>> = OnceLock::new();
    C.get_or_init(|| RwLock::new(HashMap::new()))
}

fn d_coef(l: i32, m: i32, l1: i32, m1: i32, j: i32) -> BigRational {
    let key = (l, m, l1, m1, j);
    if let Some(v) = d_cache().read().unwrap().get(&key) {
        return v.clone();
    }
    let v = exchange_angular_d(l, m, l1, m1, j);
    d_cache().write().unwrap().insert(key, v.clone());
    v
}

fn by_subshell(cfg: &Configuration) -> BTreeMap<Subshell, Vec<Orbital>> {
    let mut map: BTreeMap<Subshell, Vec<Orbital>> = BTreeMap::new();
    for o in cfg.orbitals() {
        map.entry(o.subshell()).or_default().push(*o);
    }
    map
}

/// Unit-charge Coulomb sum `J`, over all ordered pairs including `k = l`.
pub fn coulomb_sum_j(cfg: &Configuration) -> Result<BigRational> {
    let shells = by_subshell(cfg);
    let keys: Vec<&Subshell> = shells.keys().collect();
    // alpha sums per subshell and even multipole
    let alphas: Vec<Vec<BigRational>> = keys
        .iter()
        .map(|s| {
            let l = s.l as i32;
            (0..=l)
                .map(|h| {
                    shells[*s]
                        .iter()
                        .fold(BigRational::zero(), |acc, o| acc + alpha(l, o.m, 2 * h))
                })
                .collect()
        })
        .collect();
    let mut total = BigRational::zero();
    for (i, s) in keys.iter().enumerate() {
        for (t_idx, t) in keys.iter().enumerate().skip(i) {
            let hmax = s.l.min(t.l);
            let mut block = BigRational::zero();
            for h in 0..=hmax {
                let (sa, ta) = (&alphas[i][h as usize], &alphas[t_idx][h as usize]);
                if sa.is_zero() || ta.is_zero() {
                    continue;
                }
                block += direct_integral_i(s.n, s.l, t.n, t.l, 2 * h)? * sa * ta;
            }
            // ordered pairs: off-diagonal blocks count twice, then the 1/2
            if i == t_idx {
                total += block * ratio(1, 2);
            } else {
                total += block;
            }
        }
    }
    Ok(total)
}

/// Unit-charge exchange sum `K` (negative), same-spin ordered pairs including `k = l`.
pub fn exchange_sum_k(cfg: &Configuration) -> Result<BigRational> {
    let shells = by_subshell(cfg);
    let keys: Vec<&Subshell> = shells.keys().collect();
    let mut total = BigRational::zero();
    for (i, s) in keys.iter().enumerate() {
        for (t_idx, t) in keys.iter().enumerate().skip(i) {
            let (l, l1) = (s.l as i32, t.l as i32);
            // multiplicity of (m, m1) same-spin pairs
            let mut counts: HashMap<(i32, i32), i64> = HashMap::new();
            for a in &shells[*s] {
                for b in &shells[*t] {
                    if a.spin == b.spin {
                        *counts.entry((a.m, b.m)).or_insert(0) += 1;
                    }
                }
            }
            if counts.is_empty() {
                continue;
            }
            let mut block = BigRational::zero();
            let mut j = (l - l1).abs();
            while j <= l + l1 {
                let mut ang = BigRational::zero();
                for (&(m, m1), &c) in &counts {
                    let d = d_coef(l, m, l1, m1, j);
                    if !d.is_zero() {
                        ang += d * ratio(c, 1);
                    }
                }
                if !ang.is_zero() {
                    block += exchange_integral_l(s.n, s.l, t.n, t.l, j as u32)? * ang;
                }
                j += 2;
            }
            if i == t_idx {
                total -= block * ratio(1, 2);
            } else {
                total -= block;
            }
        }
    }
    Ok(total)
}

/// Solve for `Z*` and `E0` in exact arithmetic.
pub fn solve_zeroth_order(cfg: &Configuration) -> Result<ZerothOrderSolution> {
    let a = kinetic_sum_a(cfg);
    let coulomb_j = coulomb_sum_j(cfg)?;
    let exchange_k = exchange_sum_k(cfg)?;
    let b = &coulomb_j + &exchange_k;
    let z = BigRational::from_integer(cfg.z().into());
    let zstar_exact = &z - &b / (&a * ratio(2, 1));
    let zstar = to_f64(&zstar_exact);
    if zstar <= 0.0 {
        return Err(Error::domain(format!(
            "effective charge {zstar} is not positive for Z={} N={}",
            cfg.z(),
            cfg.n_electrons()
        )));
    }
    let e0 = -to_f64(&(&a * &zstar_exact * &zstar_exact));
    Ok(ZerothOrderSolution {
        z: cfg.z(),
        n_electrons: cfg.n_electrons(),
        a,
        b,
        coulomb_j,
        exchange_k,
        zstar_exact,
        zstar,
        e0,
    })
}

/// Floating-point pair interaction energies at unit charge, memoised.
///
/// `e(a, b) = sum_j I^j M^j - delta_spin sum_j L^j D^j`.
pub struct PairTable {
    cache: RwLock<HashMap<(Orbital, Orbital), f64>>,
}

impl PairTable {
    pub fn global() -> &'static PairTable {
        static T: OnceLock<PairTable> = OnceLock::new();
        T.get_or_init(|| PairTable {
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn pair_energy(&self, a: &Orbital, b: &Orbital) -> Result<f64> {
        let (a, b) = if a <= b { (*a, *b) } else { (*b, *a) };
        if let Some(&v) = self.cache.read().unwrap().get(&(a, b)) {
            return Ok(v);
        }
        let (l, l1) = (a.l as i32, b.l as i32);
        let mut e = BigRational::zero();
        for h in 0..=l.min(l1) {
            let m = alpha(l, a.m, 2 * h) * alpha(l1, b.m, 2 * h);
            if !m.is_zero() {
                e += direct_integral_i(a.n, a.l, b.n, b.l, 2 * h as u32)? * m;
            }
        }
        if a.spin == b.spin {
            let mut j = (l - l1).abs();
            while j <= l + l1 {
                let d = d_coef(l, a.m, l1, b.m, j);
                if !d.is_zero() {
                    e -= exchange_integral_l(a.n, a.l, b.n, b.l, j as u32)? * d;
                }
                j += 2;
            }
        }
        let v = to_f64(&e);
        self.cache.write().unwrap().insert((a, b), v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_occupancy, Spin};

    fn orb(n: u32, l: u32, m: i32, s: Spin) -> Orbital {
        Orbital::new(n, l, m, s).unwrap()
    }

    #[test]
    fn helium_exact() {
        let cfg = Configuration::new(2, vec![orb(1, 0, 0, Spin::Up), orb(1, 0, 0, Spin::Down)]).unwrap();
        let s = solve_zeroth_order(&cfg).unwrap();
        assert_eq!(s.coulomb_j, ratio(5, 4));
        assert_eq!(s.exchange_k, ratio(-5, 8));
        assert_eq!(s.b, ratio(5, 8));
        assert_eq!(s.zstar_exact, ratio(27, 16));
        assert!(s.first_order_energy().is_zero());
    }

    #[test]
    fn hydrogen_has_no_screening() {
        let cfg = Configuration::new(1, vec![orb(1, 0, 0, Spin::Up)]).unwrap();
        let s = solve_zeroth_order(&cfg).unwrap();
        assert!(s.b.is_zero());
        assert_eq!(s.e0, -0.5);
    }

    #[test]
    fn helium_excited_1s2s() {
        let trip = Configuration::new(2, vec![orb(1, 0, 0, Spin::Up), orb(2, 0, 0, Spin::Up)]).unwrap();
        let s = solve_zeroth_order(&trip).unwrap();
        assert_eq!(s.a, ratio(5, 8));
        assert_eq!(s.b, ratio(137, 729));
        let sing = Configuration::new(2, vec![orb(1, 0, 0, Spin::Up), orb(2, 0, 0, Spin::Down)]).unwrap();
        assert_eq!(solve_zeroth_order(&sing).unwrap().b, ratio(17, 81));
    }

    /// Brute-force double sum over spin-orbital pairs must match the blocked sums.
    #[test]
    fn blocked_sums_match_pairwise() {
        let occ = parse_occupancy("1s2 2s2 2p3").unwrap();
        let cfgs = crate::config::assignments(7, &occ).unwrap();
        for cfg in cfgs.iter().step_by(3) {
            let mut jb = BigRational::zero();
            let mut kb = BigRational::zero();
            for a in cfg.orbitals() {
                for b in cfg.orbitals() {
                    let (l, l1) = (a.l as i32, b.l as i32);
                    for j in 0..=4 {
                        let m = crate::angular::coulomb_angular_m(l, a.m, l1, b.m, j);
                        if !m.is_zero() {
                            jb += direct_integral_i(a.n, a.l, b.n, b.l, j as u32).unwrap() * m;
                        }
                        if a.spin == b.spin && j >= (l - l1).abs() && j <= l + l1 {
                            let d = exchange_angular_d(l, a.m, l1, b.m, j);
                            if !d.is_zero() {
                                kb -= exchange_integral_l(a.n, a.l, b.n, b.l, j as u32).unwrap() * d;
                            }
                        }
                    }
                }
            }
            assert_eq!(coulomb_sum_j(cfg).unwrap(), jb * ratio(1, 2));
            assert_eq!(exchange_sum_k(cfg).unwrap(), kb * ratio(1, 2));
            assert!(solve_zeroth_order(cfg).unwrap().first_order_energy().is_zero());
        }
    }
}

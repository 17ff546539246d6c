//! Electron densities and X-ray form factors.
//!
//! Densities are kept as exact exponential polynomials in `u = Z* r`:
//! `rho(r, theta) = (Z*^3 / pi) sum c u^k e^{-a u} P_L(cos theta)`.

use crate::angular::coulomb_angular_factor;
use crate::config::Configuration;
use crate::exact::{factorial, int, pow, ratio, to_f64};
use crate::greens::{apply_reduced, GreenEnergy, RadialGreenKernel};
use crate::pt2::{grid_for, PerturbationPotentials, Pt2Options};
use crate::radial::radial_wavefunction;
use crate::scf0::ZerothOrderSolution;
use crate::{Error, Result};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

/// Bohr radius in angstrom used for the `s -> q` conversion.
pub const BOHR_ANGSTROM: f64 = 0.529177;

/// `q = 4 pi a0 s`, with `s = sin(theta)/lambda` in inverse angstrom.
pub fn s_to_q(s: f64) -> f64 {
    4.0 * std::f64::consts::PI * BOHR_ANGSTROM * s
}

pub fn q_to_s(q: f64) -> f64 {
    q / (4.0 * std::f64::consts::PI * BOHR_ANGSTROM)
}

/// One term `c u^k e^{-decay u} P_L(cos theta)` of a density, in units of `Z*^3/pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTerm {
    pub coeff: BigRational,
    pub power: u32,
    pub decay: BigRational,
    pub legendre: u32,
}

/// Angular factor in the printed layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum AngularFactor {
    One,
    Cos2Theta,
    /// `P_L(cos theta)` for `L >= 4`.
    Legendre(u32),
}

#[derive(Debug, Clone)]
pub struct DensityExpansion {
    pub zstar: f64,
    pub zstar_exact: BigRational,
    pub n_electrons: usize,
    pub terms: Vec<DensityTerm>,
}

fn legendre(l: u32, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if l == 0 {
        return 1.0;
    }
    for k in 1..l {
        let kf = f64::from(k);
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Zeroth-order density of `cfg`: sum over occupied spin orbitals of `|psi|^2`.
pub fn density_zeroth(cfg: &Configuration, sol: &ZerothOrderSolution) -> Result<DensityExpansion> {
    // key: (decay, power, L)
    let mut acc: BTreeMap<(BigRational, u32, u32), BigRational> = BTreeMap::new();
    let mut radial = BTreeMap::new();
    for o in cfg.orbitals() {
        let s = o.subshell();
        if !radial.contains_key(&s) {
            let r = radial_wavefunction(s.n, s.l)?;
            let sq = r.poly.mul(&r.poly).scale(&r.norm_sq);
            radial.insert(s, sq);
        }
        let sq = &radial[&s];
        let l = s.l as i32;
        for big_l in (0..=2 * s.l).step_by(2) {
            // |Y_lm|^2 = sum_L c^L(lm,lm) (2L+1)/(4 pi) P_L; the 1/pi is global
            let ang = coulomb_angular_factor(l, o.m, big_l as i32) * ratio(2 * i64::from(big_l) + 1, 4);
            if ang.is_zero() {
                continue;
            }
            for (k, c) in sq.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                *acc.entry((sq.decay.clone(), k as u32, big_l)).or_insert_with(BigRational::zero) += c * &ang;
            }
        }
    }
    let terms = acc
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((decay, power, legendre), coeff)| DensityTerm { coeff, power, decay, legendre })
        .collect();
    Ok(DensityExpansion { zstar: sol.zstar, zstar_exact: sol.zstar_exact.clone(), n_electrons: cfg.n_electrons(), terms })
}

impl DensityExpansion {
    /// `rho(r, theta)` in bohr^-3.
    pub fn eval(&self, r: f64, cos_theta: f64) -> f64 {
        let u = self.zstar * r;
        let z3 = self.zstar.powi(3) / std::f64::consts::PI;
        self.terms
            .iter()
            .map(|t| to_f64(&t.coeff) * u.powi(t.power as i32) * (-to_f64(&t.decay) * u).exp() * legendre(t.legendre, cos_theta))
            .sum::<f64>()
            * z3
    }

    /// Angle-averaged radial density `4 pi r^2 rho_0(r)`.
    pub fn radial_density(&self, r: f64) -> f64 {
        let u = self.zstar * r;
        let s: f64 = self
            .terms
            .iter()
            .filter(|t| t.legendre == 0)
            .map(|t| to_f64(&t.coeff) * u.powi(t.power as i32) * (-to_f64(&t.decay) * u).exp())
            .sum();
        4.0 * self.zstar.powi(3) * r * r * s
    }

    /// `int rho d^3r`, exactly; independent of `Z*`.
    pub fn electron_count(&self) -> BigRational {
        self.terms
            .iter()
            .filter(|t| t.legendre == 0)
            .map(|t| int(4) * &t.coeff * BigRational::from_integer(factorial(t.power as usize + 2)) / pow(&t.decay, t.power as usize + 3))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Terms regrouped with `P_2 = (1 + 3 cos 2theta)/4`, keyed by
    /// `(decay, power, factor)` and sorted.
    pub fn printed_terms(&self) -> BTreeMap<(BigRational, u32, AngularFactor), BigRational> {
        let mut out: BTreeMap<(BigRational, u32, AngularFactor), BigRational> = BTreeMap::new();
        let mut add = |d: &BigRational, k: u32, f: AngularFactor, c: BigRational| {
            *out.entry((d.clone(), k, f)).or_insert_with(BigRational::zero) += c;
        };
        for t in &self.terms {
            match t.legendre {
                0 => add(&t.decay, t.power, AngularFactor::One, t.coeff.clone()),
                2 => {
                    add(&t.decay, t.power, AngularFactor::One, &t.coeff * ratio(1, 4));
                    add(&t.decay, t.power, AngularFactor::Cos2Theta, &t.coeff * ratio(3, 4));
                }
                l => add(&t.decay, t.power, AngularFactor::Legendre(l), t.coeff.clone()),
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    pub fn is_spherical(&self) -> bool {
        self.terms.iter().all(|t| t.legendre == 0)
    }
}

/// `int_0^inf r^p e^{-beta r} j_l(q r) dr` for `p >= l + 1`.
fn laplace_bessel(p: u32, beta: f64, q: f64, l: u32) -> f64 {
    if q == 0.0 {
        if l > 0 {
            return 0.0;
        }
        return to_f64(&BigRational::from_integer(factorial(p as usize))) / beta.powi(p as i32 + 1);
    }
    if l > 0 && q < 0.1 * beta {
        return laplace_bessel_series(p, beta, q, l);
    }
    // j_l(x) = Re[(-i)^{l+1} e^{ix}/x sum_k i^k (l+k)!/(k!(l-k)!(2x)^k)]
    let z = Complex64::new(beta, -q);
    let mut phase = Complex64::new(0.0, -1.0).powu(l + 1);
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..=l {
        let c = to_f64(&BigRational::new(factorial((l + k) as usize), factorial(k as usize) * factorial((l - k) as usize)))
            / 2f64.powi(k as i32)
            / q.powi(k as i32 + 1);
        let m = p - k - 1;
        let lap = to_f64(&BigRational::from_integer(factorial(m as usize))) / z.powu(m + 1);
        s += phase * c * lap;
        phase *= Complex64::new(0.0, 1.0);
    }
    s.re
}

/// Small-`q` form: `j_l(x) = sum_s (-1)^s x^{l+2s} / (2^s s! (2l+2s+1)!!)`.
fn laplace_bessel_series(p: u32, beta: f64, q: f64, l: u32) -> f64 {
    let x = q / beta;
    // term_s without the common p!/beta^{p+1}: (p+l+2s)!/p! x^{l+2s} / (2^s s! (2l+2s+1)!!)
    let mut term = x.powi(l as i32) / (1..=l).map(|i| f64::from(2 * i + 1)).product::<f64>();
    term *= (1..=l).map(|i| f64::from(p + i)).product::<f64>();
    let mut sum = term;
    for s in 1..200u32 {
        let a = f64::from(p + l + 2 * s - 1) * f64::from(p + l + 2 * s);
        term *= -a * x * x / (2.0 * f64::from(s) * f64::from(2 * l + 2 * s + 1));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum * to_f64(&BigRational::from_integer(factorial(p as usize))) / beta.powi(p as i32 + 1)
}

/// `int rho(r) e^{i q.r} d^3r` averaged over the direction of `q`
/// (the `L = 0` part), by term-wise closed-form transforms.
pub fn form_factor_numeric(density: &DensityExpansion, q: f64) -> f64 {
    form_factor_oriented(density, q, None)
}

/// Form factor for `q` at polar angle `acos(cos_q)` to the quantisation
/// axis; `None` gives the orientational average.
pub fn form_factor_oriented(density: &DensityExpansion, q: f64, cos_q: Option<f64>) -> f64 {
    let zs = density.zstar;
    // in u = Z* r: rho d^3r = (1/pi) sum c u^{k+2} e^{-a u} P_L du dOmega, q r = (q/Z*) u
    let qq = q / zs;
    let mut f = 0.0;
    for t in &density.terms {
        let ang = match (t.legendre, cos_q) {
            (0, _) => 1.0,
            (_, None) => continue,
            (l, Some(c)) => {
                // i^L, real for even L
                let sign = if (l / 2) % 2 == 0 { 1.0 } else { -1.0 };
                sign * legendre(l, c)
            }
        };
        f += 4.0 * ang * to_f64(&t.coeff) * laplace_bessel(t.power + 2, to_f64(&t.decay), qq, t.legendre);
    }
    f
}

/// Exact `a + ib` with rational parts.
#[derive(Clone)]
struct GaussRational(BigRational, BigRational);

impl GaussRational {
    fn mul(&self, o: &GaussRational) -> GaussRational {
        GaussRational(&self.0 * &o.0 - &self.1 * &o.1, &self.0 * &o.1 + &self.1 * &o.0)
    }

    fn scale(&self, s: &BigRational) -> GaussRational {
        GaussRational(&self.0 * s, &self.1 * s)
    }

    fn powu(&self, n: u32) -> GaussRational {
        let mut r = GaussRational(BigRational::one(), BigRational::zero());
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }
}

/// Exact `int_0^inf r^p e^{-beta r} j_l(q r) dr` for rational `beta`, `q > 0`.
fn laplace_bessel_exact(p: u32, beta: &BigRational, q: &BigRational, l: u32) -> BigRational {
    // 1/(beta - iq)^m = (beta + iq)^m / (beta^2 + q^2)^m
    let z = GaussRational(beta.clone(), q.clone());
    let modsq = beta * beta + q * q;
    let i = GaussRational(BigRational::zero(), BigRational::one());
    let mut phase = GaussRational(BigRational::zero(), -BigRational::one()).powu(l + 1);
    let mut s = BigRational::zero();
    for k in 0..=l {
        let c = BigRational::new(factorial((l + k) as usize), factorial(k as usize) * factorial((l - k) as usize))
            / pow(&int(2), k as usize)
            / pow(q, k as usize + 1);
        let m = p - k - 1;
        let lap = z.powu(m + 1).scale(&(BigRational::from_integer(factorial(m as usize)) / pow(&modsq, m as usize + 1)));
        s += phase.mul(&lap).scale(&c).0;
        phase = phase.mul(&i);
    }
    s
}

/// Exact form factor at rational `q`, either orientation-averaged (`None`)
/// or for `q` at rational `cos(theta_q)` to the quantisation axis.
pub fn form_factor_exact(density: &DensityExpansion, q: &BigRational, cos_q: Option<&BigRational>) -> BigRational {
    let qq = q / &density.zstar_exact;
    let mut f = BigRational::zero();
    for t in &density.terms {
        let ang = match (t.legendre, cos_q) {
            (0, _) => BigRational::one(),
            (_, None) => continue,
            (l, Some(c)) => {
                let sign = if (l / 2) % 2 == 0 { int(1) } else { int(-1) };
                sign * legendre_exact(l, c)
            }
        };
        let radial = if qq.is_zero() {
            if t.legendre > 0 {
                continue;
            }
            BigRational::from_integer(factorial(t.power as usize + 2)) / pow(&t.decay, t.power as usize + 3)
        } else {
            laplace_bessel_exact(t.power + 2, &t.decay, &qq, t.legendre)
        };
        f += int(4) * ang * &t.coeff * radial;
    }
    f
}

fn legendre_exact(l: u32, x: &BigRational) -> BigRational {
    let (mut p0, mut p1) = (BigRational::one(), x.clone());
    if l == 0 {
        return p0;
    }
    for k in 1..l {
        let kk = i64::from(k);
        let p2 = (int(2 * kk + 1) * x * &p1 - int(kk) * &p0) / int(kk + 1);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Polynomial in `xi` and `t = Q^2`, `coeff[i][j] xi^i t^j`.
type Bivariate = Vec<Vec<BigRational>>;

/// `P_k` with `d^k/dxi^k (xi^2 + t)^{-1} = P_k / (xi^2 + t)^{k+1}`.
fn derivative_tower(kmax: usize) -> Vec<Bivariate> {
    let mut out: Vec<Bivariate> = vec![vec![vec![BigRational::one()]]];
    for k in 0..kmax {
        let p = &out[k];
        let deg_xi = p.len() + 1;
        let deg_t = p.iter().map(|r| r.len()).max().unwrap_or(1) + 1;
        let mut next = vec![vec![BigRational::zero(); deg_t]; deg_xi];
        let kk = int(2 * (k as i64 + 1));
        for (i, row) in p.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if i > 0 {
                    // d/dxi times (xi^2 + t)
                    let d = c * int(i as i64);
                    next[i + 1][j] += &d;
                    next[i - 1][j + 1] += &d;
                }
                next[i + 1][j] -= c * &kk;
            }
        }
        out.push(next);
    }
    out
}

/// Spherical form factor `sum_shells g F(Q)` as a sum of
/// `N(t) / (xi^2 + t)^p` blocks with `t = (q/Z*)^2`.
#[derive(Debug, Clone)]
pub struct RationalFormFactor {
    pub zstar_exact: BigRational,
    /// `(xi, numerator coefficients in t, power)`.
    pub blocks: Vec<(BigRational, Vec<BigRational>, u32)>,
}

impl RationalFormFactor {
    pub fn eval_exact(&self, q: &BigRational) -> BigRational {
        let qq = q / &self.zstar_exact;
        let t = &qq * &qq;
        let mut f = BigRational::zero();
        for (xi, num, p) in &self.blocks {
            let mut n = BigRational::zero();
            for c in num.iter().rev() {
                n = n * &t + c;
            }
            f += n / pow(&(xi * xi + &t), *p as usize);
        }
        f
    }

    pub fn eval(&self, q: f64) -> f64 {
        let qq = q / to_f64(&self.zstar_exact);
        let t = qq * qq;
        self.blocks
            .iter()
            .map(|(xi, num, p)| {
                let x = to_f64(xi);
                let n = num.iter().rev().fold(0.0, |a, c| a * t + to_f64(c));
                n / (x * x + t).powi(*p as i32)
            })
            .sum()
    }
}

/// Closed-form spherical form factor from the derivative tower of `1/(xi^2 + Q^2)`.
pub fn form_factor_rational(cfg: &Configuration, sol: &ZerothOrderSolution) -> Result<RationalFormFactor> {
    if !cfg.is_spherical() {
        return Err(Error::domain(format!(
            "configuration {} is not spherically symmetric; use the numeric transform",
            cfg.spectroscopic()
        )));
    }
    Ok(form_factor_average_rational(&density_zeroth(cfg, sol)?))
}

/// Orientation-averaged form factor of any density as a rational function.
pub fn form_factor_average_rational(density: &DensityExpansion) -> RationalFormFactor {
    // int (4/pi) pi c u^{k+2} e^{-a u} j0(Q u) du = 4 c (-d/da)^{k+1} 1/(a^2 + t)
    let mut by_decay: BTreeMap<BigRational, Vec<(u32, BigRational)>> = BTreeMap::new();
    for t in density.terms.iter().filter(|t| t.legendre == 0) {
        by_decay.entry(t.decay.clone()).or_default().push((t.power, t.coeff.clone()));
    }
    let mut blocks = Vec::new();
    for (xi, terms) in by_decay {
        let kmax = terms.iter().map(|t| t.0).max().unwrap_or(0) as usize;
        let tower = derivative_tower(kmax + 1);
        let top = kmax + 2;
        let mut num: Vec<BigRational> = Vec::new();
        for (k, c) in terms {
            let k = k as usize;
            let p = &tower[k + 1];
            let sign = if (k + 1) % 2 == 0 { int(4) } else { int(-4) };
            let mut pt: Vec<BigRational> = vec![BigRational::zero(); p.iter().map(|r| r.len()).max().unwrap_or(1)];
            for (i, row) in p.iter().enumerate() {
                let xp = pow(&xi, i);
                for (j, v) in row.iter().enumerate() {
                    pt[j] += v * &xp;
                }
            }
            // bring to the common power (xi^2 + t)^top
            for _ in 0..(top - (k + 2)) {
                let mut nx = vec![BigRational::zero(); pt.len() + 1];
                for (j, v) in pt.iter().enumerate() {
                    nx[j] += v * &xi * &xi;
                    nx[j + 1] += v;
                }
                pt = nx;
            }
            if num.len() < pt.len() {
                num.resize(pt.len(), BigRational::zero());
            }
            let scale = &c * &sign;
            for (j, v) in pt.iter().enumerate() {
                num[j] += v * &scale;
            }
        }
        while num.len() > 1 && num.last().is_some_and(|c| c.is_zero()) {
            num.pop();
        }
        blocks.push((xi, num, top as u32));
    }
    RationalFormFactor { zstar_exact: density.zstar_exact.clone(), blocks }
}

/// `f(q)` for a spherically symmetric configuration.
pub fn form_factor_spherical(cfg: &Configuration, sol: &ZerothOrderSolution, q: f64) -> Result<f64> {
    if !(q >= 0.0) {
        return Err(Error::domain(format!("momentum transfer q = {q} must be non-negative")));
    }
    Ok(form_factor_rational(cfg, sol)?.eval(q))
}

/// Angle-averaged radial densities on the quadrature grid, physical units.
#[derive(Debug, Clone, Serialize)]
pub struct FirstOrderDensity {
    pub r: Vec<f64>,
    /// `4 pi r^2 rho0(r)`.
    pub zeroth: Vec<f64>,
    /// First-order change of `4 pi r^2 rho(r)`.
    pub correction: Vec<f64>,
    pub weights: Vec<f64>,
}

impl FirstOrderDensity {
    pub fn total(&self) -> Vec<f64> {
        self.zeroth.iter().zip(&self.correction).map(|(a, b)| a + b).collect()
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    /// Linear interpolation of a sampled curve at `r`.
    pub fn interpolate(&self, f: &[f64], r: f64) -> f64 {
        match self.r.iter().position(|&x| x >= r) {
            Some(0) => f[0] * r / self.r[0],
            Some(i) => {
                let t = (r - self.r[i - 1]) / (self.r[i] - self.r[i - 1]);
                f[i - 1] + t * (f[i] - f[i - 1])
            }
            None => 0.0,
        }
    }
}

/// Angle-averaged zeroth-order density plus the single-excitation first-order correction
/// `2 sum_k u_k du_k`, `du_k = -(1/Z*) G~ w_k u_k`.
pub fn density_first_order(cfg: &Configuration, sol: &ZerothOrderSolution, opts: &Pt2Options) -> Result<FirstOrderDensity> {
    let pots = PerturbationPotentials::new(cfg, sol, grid_for(cfg, opts.max_panel));
    let grid = &pots.grid;
    let n = grid.len();
    let mut zeroth = vec![0.0; n];
    let mut correction = vec![0.0; n];
    for (k, ok) in cfg.orbitals().iter().enumerate() {
        let uk = pots.orbital(ok.subshell());
        for i in 0..n {
            zeroth[i] += uk[i] * uk[i];
        }
        let source = pots.excitation_source(cfg, k);
        let Some(f) = source.get(&ok.l) else { continue };
        let mut subtracted: Vec<u32> =
            cfg.orbitals().iter().filter(|o| o.l == ok.l && o.m == ok.m && o.spin == ok.spin).map(|o| o.n).collect();
        if !subtracted.contains(&ok.n) {
            subtracted.push(ok.n);
        }
        let kernel = RadialGreenKernel::new(ok.l, GreenEnergy::from_nu(f64::from(ok.n))?, subtracted)?;
        let g = apply_reduced(grid, &kernel, std::slice::from_ref(f))?;
        for i in 0..n {
            correction[i] -= 2.0 * uk[i] * g[0][i] / sol.zstar;
        }
    }
    // channels L != l_k, the only ones with degenerate unoccupied levels,
    // drop out of the angle average
    let zs = sol.zstar;
    Ok(FirstOrderDensity {
        r: grid.r.iter().map(|u| u / zs).collect(),
        zeroth: zeroth.iter().map(|v| v * zs).collect(),
        correction: correction.iter().map(|v| v * zs).collect(),
        weights: grid.w.iter().map(|w| w / zs).collect(),
    })
}

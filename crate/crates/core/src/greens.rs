//! Radial Coulomb Green function of the unit-charge hydrogen Hamiltonian and
//! its Pauli-reduced form.
//!
//! Kernels act on reduced radial functions `u(r) = r R(r)`:
//! `G_l(r, r') = sum_n u_nl(r) u_nl(r') / (E_n - E)` plus the continuum, with
//! closed form `C M_{nu,l+1/2}(2 r_< / nu) W_{nu,l+1/2}(2 r_> / nu)`.

use crate::quad::{RadialGrid, ORDER};
use crate::special::{hydrogen_radial, ln_gamma, ln_gamma_signed, whittaker_m_hat_many, whittaker_w_hat_many};
use crate::{Error, Result};

/// Distance from an integer `nu` below which the energy counts as a pole.
pub const POLE_TOL: f64 = 1e-8;

const RICHARDSON_EPS: [f64; 3] = [1e-3, 5e-4, 2.5e-4];

/// Largest panel width in `x = 2r/nu` for the grid quadratic form.
const MAX_X_WIDTH: f64 = 8.0;

/// Energy argument of the kernel, `E = -1/(2 nu^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenEnergy {
    pub energy: f64,
    pub nu: f64,
}

impl GreenEnergy {
    pub fn from_energy(energy: f64) -> Result<Self> {
        if !(energy < 0.0) || !energy.is_finite() {
            return Err(Error::domain(format!("Green energy must be negative, got {energy}")));
        }
        Ok(GreenEnergy { energy, nu: 1.0 / (-2.0 * energy).sqrt() })
    }

    pub fn from_nu(nu: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::domain(format!("nu must be positive, got {nu}")));
        }
        Ok(GreenEnergy { energy: -0.5 / (nu * nu), nu })
    }

    /// Bound level `n >= l+1` within `POLE_TOL` of `nu`, if any.
    pub fn pole(&self, l: u32) -> Option<u32> {
        let n = self.nu.round();
        if n >= f64::from(l + 1) && (self.nu - n).abs() < POLE_TOL {
            Some(n as u32)
        } else {
            None
        }
    }
}

pub fn bound_energy(n: u32) -> f64 {
    -0.5 / f64::from(n * n)
}

/// Reduced hydrogen radial function `u_nl(r) = r R_nl(r)`.
pub fn hydrogen_u(n: u32, l: u32, r: f64) -> f64 {
    r * hydrogen_radial(n, l, r)
}

/// `(ln |C|, sign C)` with `C = nu Gamma(l+1-nu) / Gamma(2l+2)`.
fn prefactor(l: u32, nu: f64) -> (f64, f64) {
    let (lg, s) = ln_gamma_signed(f64::from(l) + 1.0 - nu);
    (nu.ln() + lg - ln_gamma(f64::from(2 * l + 2)), s)
}

fn closed_form(l: u32, nu: f64, r: f64, rp: f64) -> f64 {
    let mu = f64::from(l) + 0.5;
    let xs = 2.0 * r.min(rp) / nu;
    let xl = 2.0 * r.max(rp) / nu;
    let m = whittaker_m_hat_many(nu, mu, &[xs])[0];
    let w = whittaker_w_hat_many(nu, mu, &[xl])[0];
    let (lc, s) = prefactor(l, nu);
    s * m * w * (lc + 0.5 * (xs - xl)).exp()
}

/// Closed-form radial Green function `G_l(r, r'; E)`.
pub fn green_radial(l: u32, energy: GreenEnergy, r: f64, rp: f64) -> Result<f64> {
    if !(r > 0.0 && rp > 0.0) {
        return Err(Error::domain("radial arguments must be positive"));
    }
    if let Some(n) = energy.pole(l) {
        return Err(Error::Pole { nu: energy.nu, n, l });
    }
    Ok(closed_form(l, energy.nu, r, rp))
}

/// Green kernel in one partial wave with a list of bound levels `n` projected out.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGreenKernel {
    pub l: u32,
    pub energy: GreenEnergy,
    pub subtracted: Vec<u32>,
}

impl RadialGreenKernel {
    pub fn new(l: u32, energy: GreenEnergy, subtracted: Vec<u32>) -> Result<Self> {
        if let Some(&n) = subtracted.iter().find(|&&n| n <= l) {
            return Err(Error::domain(format!("level n = {n} does not exist for l = {l}")));
        }
        let mut subtracted = subtracted;
        subtracted.sort_unstable();
        subtracted.dedup();
        Ok(RadialGreenKernel { l, energy, subtracted })
    }

    /// The subtracted level sitting at the kernel energy, or an error when the
    /// energy hits a level that is not subtracted.
    fn resonance(&self) -> Result<Option<u32>> {
        match self.energy.pole(self.l) {
            None => Ok(None),
            Some(n) if self.subtracted.contains(&n) => Ok(Some(n)),
            Some(n) => Err(Error::Pole { nu: self.energy.nu, n, l: self.l }),
        }
    }
}

fn richardson(f: [f64; 3]) -> f64 {
    (8.0 * f[2] - 6.0 * f[1] + f[0]) / 3.0
}

fn pole_subtracted_point(k: &RadialGreenKernel, nu: f64, r: f64, rp: f64) -> f64 {
    let e = -0.5 / (nu * nu);
    let mut g = closed_form(k.l, nu, r, rp);
    for &n in &k.subtracted {
        g -= hydrogen_u(n, k.l, r) * hydrogen_u(n, k.l, rp) / (bound_energy(n) - e);
    }
    g
}

/// Reduced kernel `G - sum_sub |u_n><u_n| / (E_n - E)`, finite at subtracted levels.
pub fn reduced_green_radial(kernel: &RadialGreenKernel, r: f64, rp: f64) -> Result<f64> {
    if !(r > 0.0 && rp > 0.0) {
        return Err(Error::domain("radial arguments must be positive"));
    }
    match kernel.resonance()? {
        None => Ok(pole_subtracted_point(kernel, kernel.energy.nu, r, rp)),
        Some(n) => {
            let v = RICHARDSON_EPS.map(|eps| pole_subtracted_point(kernel, f64::from(n) * (1.0 - eps), r, rp));
            Ok(richardson(v))
        }
    }
}

/// `G_l(nu)` applied to functions sampled on `grid`: `(G a)(r_i) = int G(r_i, r') a(r') dr'`.
/// Panels must be at most `MAX_X_WIDTH` wide in `x = 2r/nu`.
pub fn apply_closed_form(grid: &RadialGrid, l: u32, nu: f64, fs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mu = f64::from(l) + 0.5;
    let x: Vec<f64> = grid.r.iter().map(|r| 2.0 * r / nu).collect();
    let mh = whittaker_m_hat_many(nu, mu, &x);
    let wh = whittaker_w_hat_many(nu, mu, &x);
    let (lc, sign) = prefactor(l, nu);
    let c = sign * lc.exp();
    let s = crate::quad::integration_matrix();
    let n = grid.len();
    fs.iter()
        .map(|a| {
            let mut left = vec![0.0; n];
            let mut right = vec![0.0; n];
            let mut carry = 0.0;
            for p in &grid.panels {
                let (xa, xb) = (2.0 * p.a / nu, 2.0 * p.b / nu);
                let half = 0.5 * (p.b - p.a);
                let idx = p.start..p.start + ORDER;
                let g: Vec<f64> = idx.clone().map(|j| mh[j] * (0.5 * (x[j] - xb)).exp() * a[j]).collect();
                for i in 0..ORDER {
                    let xi = x[p.start + i];
                    let part: f64 = (0..ORDER).map(|j| s[i][j] * g[j]).sum::<f64>() * half;
                    left[p.start + i] = (0.5 * (xa - xi)).exp() * carry + (0.5 * (xb - xi)).exp() * part;
                }
                let whole: f64 = idx.clone().map(|j| grid.w[j] * g[j - p.start]).sum();
                carry = (0.5 * (xa - xb)).exp() * carry + whole;
            }
            carry = 0.0;
            for p in grid.panels.iter().rev() {
                let (xa, xb) = (2.0 * p.a / nu, 2.0 * p.b / nu);
                let half = 0.5 * (p.b - p.a);
                let h: Vec<f64> = (0..ORDER).map(|j| wh[p.start + j] * (0.5 * (xa - x[p.start + j])).exp() * a[p.start + j]).collect();
                for i in 0..ORDER {
                    let xi = x[p.start + i];
                    let tail: f64 = (0..ORDER).map(|j| (grid.w[p.start + j] - s[i][j] * half) * h[j]).sum();
                    right[p.start + i] = (0.5 * (xi - xb)).exp() * carry + (0.5 * (xi - xa)).exp() * tail;
                }
                let whole: f64 = (0..ORDER).map(|j| grid.w[p.start + j] * h[j]).sum();
                carry = (0.5 * (xa - xb)).exp() * carry + whole;
            }
            (0..n).map(|i| c * (wh[i] * left[i] + mh[i] * right[i])).collect()
        })
        .collect()
}

/// Reduced kernel applied to sampled functions, on a grid fine enough for `nu`.
pub fn apply_reduced(grid: &RadialGrid, kernel: &RadialGreenKernel, fs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let resonance = kernel.resonance()?;
    let l = kernel.l;
    let subs: Vec<(f64, Vec<f64>)> = kernel
        .subtracted
        .iter()
        .map(|&n| (bound_energy(n), grid.sample(|r| hydrogen_u(n, l, r))))
        .collect();
    let overlaps: Vec<Vec<f64>> = fs
        .iter()
        .map(|f| subs.iter().map(|(_, u)| grid.integrate(&mul(u, f))).collect())
        .collect();
    let eval = |nu: f64| -> Vec<Vec<f64>> {
        let e = -0.5 / (nu * nu);
        let mut g = apply_closed_form(grid, l, nu, fs);
        for (gi, ov) in g.iter_mut().zip(&overlaps) {
            for ((en, u), o) in subs.iter().zip(ov) {
                let c = o / (en - e);
                for (v, uu) in gi.iter_mut().zip(u) {
                    *v -= c * uu;
                }
            }
        }
        g
    };
    Ok(match resonance {
        None => eval(kernel.energy.nu),
        Some(n) => {
            let v: Vec<Vec<Vec<f64>>> = RICHARDSON_EPS.iter().map(|eps| eval(f64::from(n) * (1.0 - eps))).collect();
            (0..fs.len())
                .map(|k| (0..grid.len()).map(|i| richardson([v[0][k][i], v[1][k][i], v[2][k][i]])).collect())
                .collect()
        }
    })
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// Source of the reduced resolvent used by the second-order sums.
pub trait Resolvent: Send + Sync {
    /// Matrix `<f_i | G~ | f_j>` for functions sampled on `grid`.
    fn form_matrix(&self, grid: &RadialGrid, kernel: &RadialGreenKernel, fs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>>;
}

/// Closed-form Whittaker kernel with the full continuum.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClosedForm;

impl Resolvent for ClosedForm {
    fn form_matrix(&self, grid: &RadialGrid, kernel: &RadialGreenKernel, fs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let nu = kernel.energy.nu;
        let needs = |p: &crate::quad::Panel| (2.0 * (p.b - p.a) / nu / MAX_X_WIDTH).ceil() as usize;
        let refine = grid.panels.iter().any(|p| needs(p) > 1);
        let fine;
        let (g, fs_fine): (&RadialGrid, Vec<Vec<f64>>) = if refine {
            fine = grid.subdivide(needs);
            (&fine, fs.iter().map(|f| grid.interpolate_to(&fine, f)).collect())
        } else {
            (grid, fs.to_vec())
        };
        let gf = apply_reduced(g, kernel, &fs_fine)?;
        Ok(gram(g, &fs_fine, &gf))
    }
}

fn gram(grid: &RadialGrid, fs: &[Vec<f64>], gf: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = fs.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = grid.integrate(&mul(&fs[i], &gf[j]));
        }
    }
    // symmetrise quadrature noise
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

/// Bound levels `l < n <= n_max` only, no continuum.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedSpectral {
    pub n_max: u32,
}

impl Resolvent for TruncatedSpectral {
    fn form_matrix(&self, grid: &RadialGrid, kernel: &RadialGreenKernel, fs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let l = kernel.l;
        let e = kernel.energy.energy;
        let mut m = vec![vec![0.0; fs.len()]; fs.len()];
        for n in l + 1..=self.n_max {
            if kernel.subtracted.contains(&n) {
                continue;
            }
            if kernel.energy.pole(l) == Some(n) {
                return Err(Error::Pole { nu: kernel.energy.nu, n, l });
            }
            let u = grid.sample(|r| hydrogen_u(n, l, r));
            let ov: Vec<f64> = fs.iter().map(|f| grid.integrate(&mul(&u, f))).collect();
            let d = bound_energy(n) - e;
            for i in 0..fs.len() {
                for j in 0..fs.len() {
                    m[i][j] += ov[i] * ov[j] / d;
                }
            }
        }
        Ok(m)
    }
}

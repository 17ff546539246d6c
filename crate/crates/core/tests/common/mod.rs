//! Test oracles. The items in this file are an independent spectral oracle
//! for the radial Coulomb Green function: free-particle kernel plus bound-state
//! sum plus the Coulomb-minus-free continuum difference integrated over k.

#![allow(dead_code)]

pub mod printed;
pub mod truncated;

use effcharge::greens::hydrogen_u;
use effcharge::quad::gauss_legendre;
use effcharge::special::coulomb_continuum_many;
use std::f64::consts::PI;

fn double_factorial_odd(l: u32) -> f64 {
    (1..=l).map(|k| f64::from(2 * k + 1)).product()
}

/// Modified spherical Bessel `i_l(x)` by its everywhere-positive series.
pub fn bessel_i(l: u32, x: f64) -> f64 {
    let mut term = x.powi(l as i32) / double_factorial_odd(l);
    let mut sum = term;
    for k in 1..400 {
        term *= x * x / (2.0 * f64::from(k) * f64::from(2 * l + 2 * k + 1));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// Modified spherical Bessel `k_l(x)` normalised so `k_0 = e^{-x}/x`.
pub fn bessel_k(l: u32, x: f64) -> f64 {
    let e = (-x).exp();
    match l {
        0 => e / x,
        1 => e * (x + 1.0) / (x * x),
        2 => e * (x * x + 3.0 * x + 3.0) / (x * x * x),
        _ => unimplemented!("l <= 2 only"),
    }
}

pub fn bessel_j(l: u32, x: f64) -> f64 {
    if x < 2.0 {
        let mut term = x.powi(l as i32) / double_factorial_odd(l);
        let mut sum = term;
        for k in 1..60 {
            term *= -x * x / (2.0 * f64::from(k) * f64::from(2 * l + 2 * k + 1));
            sum += term;
        }
        return sum;
    }
    let (s, c) = x.sin_cos();
    match l {
        0 => s / x,
        1 => s / (x * x) - c / x,
        2 => (3.0 / (x * x * x) - 1.0 / x) * s - 3.0 * c / (x * x),
        _ => unimplemented!("l <= 2 only"),
    }
}

pub fn free_green(l: u32, e: f64, r: f64, rp: f64) -> f64 {
    let kappa = (-2.0 * e).sqrt();
    let (a, b) = (r.min(rp), r.max(rp));
    2.0 * kappa * a * b * bessel_i(l, kappa * a) * bessel_k(l, kappa * b)
}

/// Spectral sum at energy `e`, omitting the bound levels in `skip`, for
/// every pair `(rs[i], rps[j])`. The continuum difference is integrated with
/// a smooth cutoff tapering from k = 40 to k = 160, which suppresses the
/// oscillatory truncation error of a sharp cut.
pub fn spectral_green(l: u32, e: f64, rs: &[f64], rps: &[f64], skip: &[u32]) -> Vec<Vec<f64>> {
    let mut out = bound_sum(l, e, rs, rps, skip);
    let cont = continuum(l, e, rs, rps, |k| {
        let t = ((k - 40.0) / 120.0).clamp(0.0, 1.0);
        1.0 - t.powi(4) * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t)
    }, 160.0);
    for i in 0..rs.len() {
        for j in 0..rps.len() {
            out[i][j] += cont[i][j];
        }
    }
    out
}

/// Spectral sum with the continuum cut at `k_max`, no extrapolation.
pub fn spectral_green_k(l: u32, e: f64, rs: &[f64], rps: &[f64], skip: &[u32], k_max: f64) -> Vec<Vec<f64>> {
    let cont = continuum(l, e, rs, rps, |_| 1.0, k_max);
    let mut out = bound_sum(l, e, rs, rps, skip);
    for i in 0..rs.len() {
        for j in 0..rps.len() {
            out[i][j] += cont[i][j];
        }
    }
    out
}

fn bound_sum(l: u32, e: f64, rs: &[f64], rps: &[f64], skip: &[u32]) -> Vec<Vec<f64>> {
    let n_max = 60;
    let mut out = vec![vec![0.0; rps.len()]; rs.len()];
    for (i, &r) in rs.iter().enumerate() {
        for (j, &rp) in rps.iter().enumerate() {
            let mut s = free_green(l, e, r, rp);
            let mut last = 0.0;
            for n in l + 1..=n_max {
                let en = -0.5 / f64::from(n * n);
                let t = hydrogen_u(n, l, r) * hydrogen_u(n, l, rp) / (en - e);
                if !skip.contains(&n) {
                    s += t;
                }
                last = t;
            }
            // u_n ~ n^{-3/2} at fixed r: tail of c n^{-3}
            let c = last * f64::from(n_max).powi(3);
            s += c * 0.5 / (f64::from(n_max) + 0.5).powi(2);
            out[i][j] = s;
        }
    }
    out
}

/// `int_0^K window(k) (u^C u^C - u^0 u^0) / (k^2/2 - e) dk`.
fn continuum(l: u32, e: f64, rs: &[f64], rps: &[f64], window: impl Fn(f64) -> f64, k_max: f64) -> Vec<Vec<f64>> {
    let (gx, gw) = gauss_legendre(16);
    let width = 0.25;
    let mut pts: Vec<f64> = rs.iter().chain(rps).copied().collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let idx = |x: f64| pts.iter().position(|&p| p == x).unwrap();
    let mut acc = vec![vec![0.0; rps.len()]; rs.len()];
    let mut a = 0.0;
    while a < k_max - 1e-12 {
        for q in 0..16 {
            let k = a + 0.5 * width * (gx[q] + 1.0);
            let w = 0.5 * width * gw[q] * window(k);
            let uc = coulomb_continuum_many(k, l, &pts);
            let u0: Vec<f64> = pts.iter().map(|&r| (2.0 / PI).sqrt() * k * r * bessel_j(l, k * r)).collect();
            let den = 0.5 * k * k - e;
            for (i, &r) in rs.iter().enumerate() {
                for (j, &rp) in rps.iter().enumerate() {
                    let (ir, jr) = (idx(r), idx(rp));
                    acc[i][j] += w * (uc[ir] * uc[jr] - u0[ir] * u0[jr]) / den;
                }
            }
        }
        a += width;
    }
    acc
}

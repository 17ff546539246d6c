//! Hydrogenic radial functions at unit charge and the closed-form two-electron
//! radial integrals `I^j` (direct) and `L^j` (exchange).
//!
//! Every integrand is a polynomial times a single exponential, so both the
//! inner incomplete-gamma integrals and the outer integral stay rational.

use crate::error::{Error, Result};
use crate::exact::{factorial, pow, ratio, to_f64};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

/// `sum_k coeffs[k] r^k * exp(-decay r)` with exact rational data.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPoly {
    pub coeffs: Vec<BigRational>,
    pub decay: BigRational,
}

impl ExpPoly {
    pub fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        ExpPoly {
            coeffs,
            decay: &self.decay + &other.decay,
        }
    }

    pub fn scale(&self, s: &BigRational) -> ExpPoly {
        ExpPoly {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            decay: self.decay.clone(),
        }
    }

    /// Multiply by `r^p`.
    pub fn shift(&self, p: usize) -> ExpPoly {
        let mut coeffs = vec![BigRational::zero(); p];
        coeffs.extend(self.coeffs.iter().cloned());
        ExpPoly {
            coeffs,
            decay: self.decay.clone(),
        }
    }

    /// Lowest power with a nonzero coefficient.
    pub fn lowest_power(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    /// `int_0^inf self(r) dr`.
    pub fn integral(&self) -> BigRational {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| c * gamma_int(k, &self.decay))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn eval(&self, r: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * r + to_f64(c);
        }
        acc * (-to_f64(&self.decay) * r).exp()
    }
}

/// `int_0^inf r^k e^{-b r} dr = k!/b^{k+1}`.
fn gamma_int(k: usize, b: &BigRational) -> BigRational {
    BigRational::from_integer(factorial(k)) / pow(b, k + 1)
}

/// Hydrogenic radial function at unit nuclear charge,
/// `R_nl(r) = sqrt(norm_sq) * poly(r) * exp(-r/n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialOrbital {
    pub n: u32,
    pub l: u32,
    pub norm_sq: BigRational,
    pub poly: ExpPoly,
}

impl RadialOrbital {
    pub fn eval(&self, r: f64) -> f64 {
        to_f64(&self.norm_sq).sqrt() * self.poly.eval(r)
    }

    /// `R_nl(r)^2`-weighted combinations need the rational product
    /// `R_a R_b / sqrt(norm_a norm_b)`; this is `poly(r) e^{-r/n}`.
    pub fn shape(&self) -> &ExpPoly {
        &self.poly
    }

    /// Number of positive zeros of the radial function.
    pub fn node_count(&self) -> usize {
        (self.n - self.l - 1) as usize
    }
}

/// Build `R_nl` from the associated Laguerre polynomial.
pub fn radial_wavefunction(n: u32, l: u32) -> Result<RadialOrbital> {
    if n == 0 || l >= n {
        return Err(Error::domain(format!("invalid hydrogenic orbital n={n}, l={l}")));
    }
    let k = (n - l - 1) as usize;
    let alpha = (2 * l + 1) as usize;
    let nn = i64::from(n);
    // rho = 2r/n; L^alpha_k(rho) = sum_i (-1)^i C(k+alpha, k-i) rho^i / i!
    let mut coeffs = vec![BigRational::zero(); l as usize + k + 1];
    for i in 0..=k {
        let binom = factorial(k + alpha) / (factorial(k - i) * factorial(alpha + i));
        let mut c = BigRational::new(binom, factorial(i));
        if i % 2 == 1 {
            c = -c;
        }
        // rho^{l+i} = (2/n)^{l+i} r^{l+i}
        c *= pow(&ratio(2, nn), l as usize + i);
        coeffs[l as usize + i] = c;
    }
    let norm_sq = pow(&ratio(2, nn), 3)
        * BigRational::new(factorial(k), BigInt::from(2 * nn) * factorial(n as usize + l as usize));
    Ok(RadialOrbital {
        n,
        l,
        norm_sq,
        poly: ExpPoly {
            coeffs,
            decay: ratio(1, nn),
        },
    })
}

/// `int_0^inf dr d(r) r^{-j-1} int_0^r t^j e(t) dt` where `d`, `e` already
/// contain the `r^2` volume factors.
fn ordered_part(d: &ExpPoly, e: &ExpPoly, j: usize) -> Result<BigRational> {
    let low = d.lowest_power();
    if low < j + 1 {
        return Err(Error::domain(format!(
            "multipole j={j} leaves the rational closed form (lowest power {low})"
        )));
    }
    // d(r) r^{-j-1}: drop j+1 leading (zero) coefficients.
    let outer = ExpPoly {
        coeffs: d.coeffs[j + 1..].to_vec(),
        decay: d.decay.clone(),
    };
    let beta = &e.decay;
    // int_0^r t^p e^{-beta t} dt = p!/beta^{p+1} - e^{-beta r} sum_{i<=p} p!/i! r^i / beta^{p-i+1}
    let mut constant = BigRational::zero();
    let mut tail = vec![BigRational::zero(); e.coeffs.len() + j];
    for (k, c) in e.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let p = k + j;
        let pf = BigRational::from_integer(factorial(p));
        constant += c * &pf / pow(beta, p + 1);
        for (i, slot) in tail.iter_mut().enumerate().take(p + 1) {
            *slot += c * &pf / BigRational::from_integer(factorial(i)) / pow(beta, p - i + 1);
        }
    }
    let first = outer.scale(&constant).integral();
    let second = outer
        .mul(&ExpPoly {
            coeffs: tail,
            decay: beta.clone(),
        })
        .integral();
    Ok(first - second)
}

/// `int int r^2 t^2 p(r) q(t) r_<^j / r_>^{j+1} dr dt` for exp-polynomials `p`, `q`.
pub fn multipole_double_integral(p: &ExpPoly, q: &ExpPoly, j: usize) -> Result<BigRational> {
    let p2 = p.shift(2);
    let q2 = q.shift(2);
    Ok(ordered_part(&p2, &q2, j)? + ordered_part(&q2, &p2, j)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntegralKind {
    Direct,
    Exchange,
}

/// Memo key for radial integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RadialIntegralKey {
    pub kind: IntegralKind,
    pub a: (u32, u32),
    pub b: (u32, u32),
    pub j: u32,
}

impl RadialIntegralKey {
    /// Orbital pairs are stored in sorted order; both integrals are symmetric.
    pub fn new(kind: IntegralKind, a: (u32, u32), b: (u32, u32), j: u32) -> Self {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        RadialIntegralKey { kind, a, b, j }
    }
}

fn memo() -> &'static RwLock<HashMap<RadialIntegralKey, BigRational>> {
    static MEMO: OnceLock<RwLock<HashMap<RadialIntegralKey, BigRational>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

fn orbital(nl: (u32, u32)) -> Result<RadialOrbital> {
    radial_wavefunction(nl.0, nl.1)
}

fn compute(key: RadialIntegralKey) -> Result<BigRational> {
    let a = orbital(key.a)?;
    let b = orbital(key.b)?;
    let j = key.j as usize;
    let norm = &a.norm_sq * &b.norm_sq;
    let raw = match key.kind {
        IntegralKind::Direct => {
            multipole_double_integral(&a.poly.mul(&a.poly), &b.poly.mul(&b.poly), j)?
        }
        IntegralKind::Exchange => {
            let ab = a.poly.mul(&b.poly);
            multipole_double_integral(&ab, &ab, j)?
        }
    };
    Ok(raw * norm)
}

fn lookup(key: RadialIntegralKey) -> Result<BigRational> {
    if let Some(v) = memo().read().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let v = compute(key)?;
    memo().write().unwrap().entry(key).or_insert_with(|| v.clone());
    Ok(v)
}

/// Direct Slater-type integral `I^j_{nl,n1l1}`.
///
/// Defined in closed rational form for `j <= min(2l, 2l1) + 1`.
pub fn direct_integral_i(n: u32, l: u32, n1: u32, l1: u32, j: u32) -> Result<BigRational> {
    lookup(RadialIntegralKey::new(IntegralKind::Direct, (n, l), (n1, l1), j))
}

/// Exchange integral `L^j_{nl,n1l1}`.
pub fn exchange_integral_l(n: u32, l: u32, n1: u32, l1: u32, j: u32) -> Result<BigRational> {
    if j + l1 < l || j + l < l1 || j > l + l1 {
        return Err(Error::domain(format!(
            "exchange multipole j={j} outside |{l}-{l1}|..{l}+{l1}"
        )));
    }
    lookup(RadialIntegralKey::new(IntegralKind::Exchange, (n, l), (n1, l1), j))
}

/// Warm the memo for a set of keys (used before energy evaluation).
pub fn precompute<I: IntoIterator<Item = RadialIntegralKey>>(keys: I) -> Result<()> {
    for k in keys {
        lookup(k)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn ground_state_shape() {
        let r = radial_wavefunction(1, 0).unwrap();
        assert!((r.eval(0.0) - 2.0).abs() < 1e-15);
        assert!((r.eval(1.3) - 2.0 * (-1.3f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn two_s_matches_closed_form() {
        let r = radial_wavefunction(2, 0).unwrap();
        for x in [0.0, 0.5, 2.0, 7.0] {
            let want = (1.0 - x / 2.0) * (-x / 2.0f64).exp() / 2f64.sqrt();
            assert!((r.eval(x) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn three_p_node_at_six() {
        let r = radial_wavefunction(3, 1).unwrap();
        assert!(r.eval(6.0).abs() < 1e-15);
        assert_eq!(r.node_count(), 1);
    }

    #[test]
    fn exact_normalization() {
        for n in 1..=7 {
            for l in 0..n {
                let r = radial_wavefunction(n, l).unwrap();
                let norm = r.poly.mul(&r.poly).shift(2).integral() * &r.norm_sq;
                assert_eq!(norm, BigRational::one(), "n={n} l={l}");
            }
        }
    }

    #[test]
    fn invalid_orbital() {
        assert!(radial_wavefunction(2, 2).is_err());
        assert!(radial_wavefunction(0, 0).is_err());
    }

    #[test]
    fn slater_values() {
        assert_eq!(direct_integral_i(1, 0, 1, 0, 0).unwrap(), ratio(5, 8));
        assert_eq!(direct_integral_i(1, 0, 2, 0, 0).unwrap(), ratio(17, 81));
        assert_eq!(exchange_integral_l(1, 0, 1, 0, 0).unwrap(), ratio(5, 8));
        assert_eq!(exchange_integral_l(1, 0, 2, 0, 0).unwrap(), ratio(16, 729));
    }

    #[test]
    fn exchange_window_enforced() {
        assert!(exchange_integral_l(1, 0, 2, 1, 0).is_err());
        assert!(exchange_integral_l(1, 0, 2, 1, 1).is_ok());
    }
}

//! Exact angular-momentum algebra: Wigner 3j symbols and the angular
//! coefficients of the Coulomb and exchange sums.
//!
//! 3j symbols come from the Racah sum evaluated in big-integer arithmetic and
//! are stored as `sign * sqrt(p/q)`. The Coulomb (`M`) and exchange (`D`)
//! coefficients are products in which every square root pairs up, so they are
//! returned as exact rationals.

use crate::exact::{factorial, SignedSqrt};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

/// Half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(pub i32);

impl HalfInt {
    pub const fn from_int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }
}

impl From<i32> for HalfInt {
    fn from(n: i32) -> Self {
        HalfInt::from_int(n)
    }
}

type Key = [i32; 6];

fn cache() -> &'static RwLock<HashMap<Key, SignedSqrt>> {
    static CACHE: OnceLock<RwLock<HashMap<Key, SignedSqrt>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn is_integer(twice: i32) -> bool {
    twice % 2 == 0
}

fn triangle(a: i32, b: i32, c: i32) -> bool {
    c >= (a - b).abs() && c <= a + b && is_integer(a + b + c)
}

/// Wigner 3j symbol `(j1 j2 j3; m1 m2 m3)`, exact.
///
/// Selection-rule violations give zero.
pub fn three_j(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> SignedSqrt {
    let key = [j1.0, j2.0, j3.0, m1.0, m2.0, m3.0];
    if let Some(v) = cache().read().unwrap().get(&key) {
        return v.clone();
    }
    let v = racah(key);
    cache().write().unwrap().entry(key).or_insert_with(|| v.clone());
    v
}

/// Integer-argument convenience wrapper around [`three_j`].
pub fn three_j_int(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> SignedSqrt {
    three_j(j1.into(), j2.into(), j3.into(), m1.into(), m2.into(), m3.into())
}

fn racah(k: Key) -> SignedSqrt {
    let [tj1, tj2, tj3, tm1, tm2, tm3] = k;
    if tj1 < 0 || tj2 < 0 || tj3 < 0 {
        return SignedSqrt::zero();
    }
    if tm1 + tm2 + tm3 != 0 {
        return SignedSqrt::zero();
    }
    if tm1.abs() > tj1 || tm2.abs() > tj2 || tm3.abs() > tj3 {
        return SignedSqrt::zero();
    }
    if !is_integer(tj1 + tm1) || !is_integer(tj2 + tm2) || !is_integer(tj3 + tm3) {
        return SignedSqrt::zero();
    }
    if !triangle(tj1, tj2, tj3) {
        return SignedSqrt::zero();
    }
    // Everything below is an integer once halved.
    let h = |x: i32| -> i64 { i64::from(x / 2) };
    let f = |x: i64| -> BigInt { factorial(x as usize) };

    let a = h(tj1 + tj2 - tj3);
    let b = h(tj1 - tj2 + tj3);
    let c = h(-tj1 + tj2 + tj3);
    let s = h(tj1 + tj2 + tj3);
    let delta = BigRational::new(f(a) * f(b) * f(c), f(s + 1));

    let jm = [
        h(tj1 + tm1),
        h(tj1 - tm1),
        h(tj2 + tm2),
        h(tj2 - tm2),
        h(tj3 + tm3),
        h(tj3 - tm3),
    ];
    let pref = jm.iter().fold(BigInt::one(), |acc, &x| acc * f(x));

    let t1 = h(tj3 - tj2 + tm1);
    let t2 = h(tj3 - tj1 - tm2);
    let t3 = h(tj1 + tj2 - tj3);
    let t4 = h(tj1 - tm1);
    let t5 = h(tj2 + tm2);
    let kmin = 0.max(-t1).max(-t2);
    let kmax = t3.min(t4).min(t5);
    let mut sum = BigRational::zero();
    for kk in kmin..=kmax {
        let den = f(kk) * f(t1 + kk) * f(t2 + kk) * f(t3 - kk) * f(t4 - kk) * f(t5 - kk);
        let term = BigRational::new(BigInt::one(), den);
        if kk % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return SignedSqrt::zero();
    }
    let phase = h(tj1 - tj2 - tm3);
    let mut sign: i8 = if phase.rem_euclid(2) == 0 { 1 } else { -1 };
    if sum.is_negative() {
        sign = -sign;
    }
    SignedSqrt {
        sign,
        square: delta * BigRational::from_integer(pref) * &sum * &sum,
    }
}

fn parity(n: i32) -> i32 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Single-orbital factor of the Coulomb coefficient,
/// `(-1)^m (2l+1) (l l j; 0 0 0) (l l j; m -m 0)`; `M^j` is the product of two.
pub fn coulomb_angular_factor(l: i32, m: i32, j: i32) -> BigRational {
    if j < 0 || m.abs() > l {
        return BigRational::zero();
    }
    let p = three_j_int(l, l, j, 0, 0, 0).mul(&three_j_int(l, l, j, m, -m, 0));
    if p.is_zero() {
        return BigRational::zero();
    }
    p.to_rational().expect("diagonal 3j pair is rational")
        * BigRational::from_integer(BigInt::from(parity(m) * (2 * l + 1)))
}

/// Coulomb angular coefficient `M^j_{lm,l1m1}`.
pub fn coulomb_angular_m(l: i32, m: i32, l1: i32, m1: i32, j: i32) -> BigRational {
    if j < 0 || m.abs() > l || m1.abs() > l1 {
        return BigRational::zero();
    }
    let p = three_j_int(l, l, j, 0, 0, 0)
        .mul(&three_j_int(l, l, j, m, -m, 0))
        .mul(&three_j_int(l1, l1, j, 0, 0, 0))
        .mul(&three_j_int(l1, l1, j, m1, -m1, 0));
    if p.is_zero() {
        return BigRational::zero();
    }
    let r = p
        .to_rational()
        .expect("product of diagonal 3j pairs is rational");
    r * BigRational::from_integer(BigInt::from(parity(m + m1) * (2 * l + 1) * (2 * l1 + 1)))
}

/// Exchange angular coefficient `D^j_{lm,l1m1}`.
pub fn exchange_angular_d(l: i32, m: i32, l1: i32, m1: i32, j: i32) -> BigRational {
    if j < (l - l1).abs() || j > l + l1 || m.abs() > l || m1.abs() > l1 {
        return BigRational::zero();
    }
    let a = three_j_int(l1, l, j, 0, 0, 0);
    let b = three_j_int(l1, l, j, -m1, m, m1 - m);
    if a.is_zero() || b.is_zero() {
        return BigRational::zero();
    }
    a.square
        * b.square
        * BigRational::from_integer(BigInt::from(parity(l + l1 + j) * (2 * l + 1) * (2 * l1 + 1)))
}

/// Condon-Shortley coefficient
/// `c^k(l m, l' m') = sqrt(4π/(2k+1)) ∫ Y*_{lm} Y_{k,m-m'} Y_{l'm'} dΩ`, in f64.
pub fn gaunt_ck(k: i32, l: i32, m: i32, lp: i32, mp: i32) -> f64 {
    let a = three_j_int(l, k, lp, 0, 0, 0);
    if a.is_zero() {
        return 0.0;
    }
    let b = three_j_int(l, k, lp, -m, m - mp, mp);
    if b.is_zero() {
        return 0.0;
    }
    f64::from(parity(m)) * f64::from((2 * l + 1) * (2 * lp + 1)).sqrt() * a.to_f64() * b.to_f64()
}

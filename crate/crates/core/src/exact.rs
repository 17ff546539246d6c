//! Small helpers for exact rational arithmetic shared by the angular and
//! radial modules.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::OnceLock;

const FACTORIAL_TABLE: usize = 200;

fn table() -> &'static [BigInt] {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(FACTORIAL_TABLE);
        let mut acc = BigInt::one();
        v.push(acc.clone());
        for k in 1..FACTORIAL_TABLE {
            acc *= k;
            v.push(acc.clone());
        }
        v
    })
}

/// `n!` as a big integer.
pub fn factorial(n: usize) -> BigInt {
    if n < FACTORIAL_TABLE {
        table()[n].clone()
    } else {
        (FACTORIAL_TABLE..=n).fold(table()[FACTORIAL_TABLE - 1].clone(), |a, k| a * k)
    }
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `base^exp` for a rational base and non-negative exponent.
pub fn pow(base: &BigRational, exp: usize) -> BigRational {
    num_traits::pow(base.clone(), exp)
}

/// Exact square root of a rational if it is a perfect square.
pub fn sqrt_exact(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    if x.is_zero() {
        return Some(BigRational::zero());
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Lossy conversion that survives numerators and denominators beyond f64 range.
pub fn to_f64(x: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift_n = (nb - 60).max(0) as usize;
    let shift_d = (db - 60).max(0) as usize;
    let n = (x.numer().abs() >> shift_n).to_f64().unwrap_or(0.0);
    let d = (x.denom() >> shift_d).to_f64().unwrap_or(1.0);
    let v = n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32);
    if x.numer().sign() == Sign::Minus {
        -v
    } else {
        v
    }
}

/// Value stored as `sign * sqrt(square)` with `square` an exact rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedSqrt {
    pub sign: i8,
    pub square: BigRational,
}

impl SignedSqrt {
    pub fn zero() -> Self {
        SignedSqrt {
            sign: 0,
            square: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        SignedSqrt {
            sign: 1,
            square: BigRational::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn mul(&self, other: &SignedSqrt) -> SignedSqrt {
        if self.is_zero() || other.is_zero() {
            return SignedSqrt::zero();
        }
        SignedSqrt {
            sign: self.sign * other.sign,
            square: &self.square * &other.square,
        }
    }

    /// Exact rational value, when the square is a perfect square.
    pub fn to_rational(&self) -> Option<BigRational> {
        sqrt_exact(&self.square).map(|r| if self.sign < 0 { -r } else { r })
    }

    pub fn to_f64(&self) -> f64 {
        f64::from(self.sign) * to_f64(&self.square).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(10), BigInt::from(3_628_800));
        assert_eq!(factorial(201), factorial(200) * 201);
    }

    #[test]
    fn exact_sqrt() {
        assert_eq!(sqrt_exact(&ratio(4, 9)), Some(ratio(2, 3)));
        assert_eq!(sqrt_exact(&ratio(2, 9)), None);
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = BigRational::new(factorial(190), factorial(189));
        assert!((to_f64(&big) - 190.0).abs() < 1e-12);
    }
}

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use super::rational::{format_rational, valuation};
use crate::error::{Error, Result};

/// Exact non-negative real value of an absolute value or norm.
///
/// Every magnitude the library produces has the form `q·ρ^n` with `q` a
/// positive rational and `ρ = 1/p` rational, so the value itself is a
/// rational number and is stored as one. The `(q, n)` presentation is
/// recovered on demand by [`Magnitude::parts`] and is canonical: `q` carries
/// no factor of the base prime.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Magnitude(BigRational);

impl Magnitude {
    pub fn zero() -> Self {
        Magnitude(BigRational::zero())
    }

    pub fn one() -> Self {
        Magnitude(BigRational::one())
    }

    /// Wraps a rational value; `None` if it is negative.
    pub fn new(value: BigRational) -> Option<Self> {
        (!value.is_negative()).then_some(Magnitude(value))
    }

    pub fn from_integer(n: u64) -> Self {
        Magnitude(BigRational::from_integer(n.into()))
    }

    pub fn from_ratio(num: u64, den: u64) -> Self {
        Magnitude(BigRational::new(num.into(), den.into()))
    }

    /// `q·ρ^n` with `ρ = 1/base`; for the trivial valuation (`base = None`)
    /// the exponent must be zero.
    pub fn from_parts(q: BigRational, n: i64, base: Option<u64>) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::NonPositiveWeight);
        }
        match base {
            None if n != 0 => Err(Error::Invalid(
                "trivial valuation magnitudes have exponent 0".into(),
            )),
            None => Ok(Magnitude(q)),
            Some(p) => Ok(Magnitude(q * rho_pow(p, n))),
        }
    }

    /// The canonical `(q, n)` pair, `None` for zero.
    pub fn parts(&self, base: Option<u64>) -> Option<(BigRational, i64)> {
        if self.is_zero() {
            return None;
        }
        match base {
            None => Some((self.0.clone(), 0)),
            Some(p) => {
                // value = q·p^{-n}, so n = -ord_p(value)
                let n = -valuation(&self.0, p).expect("nonzero");
                Some((&self.0 * pow_base(p, n), n))
            }
        }
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn into_value(self) -> BigRational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn mul(&self, other: &Magnitude) -> Magnitude {
        Magnitude(&self.0 * &other.0)
    }

    pub fn div(&self, other: &Magnitude) -> Result<Magnitude> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Magnitude(&self.0 / &other.0))
    }

    pub fn recip(&self) -> Result<Magnitude> {
        Magnitude::one().div(self)
    }

    pub fn pow(&self, m: i64) -> Result<Magnitude> {
        if m < 0 {
            return self.recip()?.pow(-m);
        }
        Ok(Magnitude(Pow::pow(&self.0, m as u64)))
    }

    /// Compares `self^(1/a)` with `other^(1/b)` exactly, for positive `a`, `b`.
    pub fn cmp_roots(&self, a: u32, other: &Magnitude, b: u32) -> std::cmp::Ordering {
        assert!(a > 0 && b > 0, "root indices must be positive");
        Pow::pow(&self.0, b).cmp(&Pow::pow(&other.0, a))
    }
}

/// `ρ^n = p^{-n}`
fn rho_pow(p: u64, n: i64) -> BigRational {
    pow_base(p, -n)
}

/// `p^k` for any integer `k`.
pub(crate) fn pow_base(p: u64, k: i64) -> BigRational {
    let b = BigInt::from(p);
    if k >= 0 {
        BigRational::from_integer(Pow::pow(&b, k as u64))
    } else {
        BigRational::new(BigInt::one(), Pow::pow(&b, (-k) as u64))
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl std::ops::Mul for &Magnitude {
    type Output = Magnitude;
    fn mul(self, rhs: &Magnitude) -> Magnitude {
        Magnitude::mul(self, rhs)
    }
}

//! Exact arithmetic for the supported valued fields and for magnitudes.
//!
//! Three field families are modeled:
//!
//! * `Q` with the `p`-adic absolute value, standing in for its completion
//!   `Q_p` (every optimum computed downstream is attained on the dense
//!   subfield);
//! * `Q` with the trivial absolute value;
//! * `Q(T)` with the `T`-adic absolute value `|T| = 1/P`, the algebraic part of
//!   the Laurent field `Q((T))` used to extend trivially valued problems.

mod magnitude;
pub mod rational;
mod ratfunc;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
pub use magnitude::Magnitude;
pub(crate) use magnitude::pow_base;
pub use ratfunc::{Poly, RatFunc};
use rational::{format_rational, is_prime, next_prime, valuation};

/// A valued field together with its absolute value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ValuedField {
    /// `Q ⊂ Q_p`, `|p| = 1/p`.
    Padic { p: u64 },
    /// `Q` with `|x| = 1` for all `x ≠ 0`.
    Trivial,
    /// `Q(T) ⊂ Q((T))` with `|T| = 1/base_prime`.
    Laurent { base_prime: u64 },
}

impl ValuedField {
    pub fn padic(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(ValuedField::Padic { p })
    }

    pub fn trivial() -> Self {
        ValuedField::Trivial
    }

    pub fn laurent(base_prime: u64) -> Result<Self> {
        if !is_prime(base_prime) {
            return Err(Error::NotPrime(base_prime));
        }
        Ok(ValuedField::Laurent { base_prime })
    }

    /// The prime `b` with `ρ = 1/b`, or `None` for the trivial valuation.
    pub fn base_prime(&self) -> Option<u64> {
        match *self {
            ValuedField::Padic { p } => Some(p),
            ValuedField::Laurent { base_prime } => Some(base_prime),
            ValuedField::Trivial => None,
        }
    }

    /// `|ϖ|`, absent for the trivial valuation.
    pub fn uniformizer_magnitude(&self) -> Option<Magnitude> {
        self.base_prime().map(|b| Magnitude::from_ratio(1, b))
    }

    /// A uniformizer: `p` for `Q_p`, `T` for the Laurent field.
    pub fn uniformizer(&self) -> Option<FieldElement> {
        match *self {
            ValuedField::Padic { p } => Some(FieldElement::from_int(p as i64)),
            ValuedField::Laurent { .. } => Some(FieldElement::t()),
            ValuedField::Trivial => None,
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, ValuedField::Trivial)
    }

    pub fn is_padic(&self) -> bool {
        matches!(self, ValuedField::Padic { .. })
    }

    /// Whether `x` is an element of this field (rational functions only
    /// live in the Laurent field).
    pub fn contains(&self, x: &FieldElement) -> bool {
        matches!(self, ValuedField::Laurent { .. }) || x.is_rational()
    }

    /// The absolute value `|x|`.
    pub fn abs(&self, x: &FieldElement) -> Magnitude {
        if x.is_zero() {
            return Magnitude::zero();
        }
        match (self, x) {
            (ValuedField::Trivial, FieldElement::Rational(_)) => Magnitude::one(),
            (ValuedField::Padic { p }, FieldElement::Rational(r)) => {
                pow_magnitude(*p, -valuation(r, *p).expect("nonzero"))
            }
            (ValuedField::Laurent { .. }, FieldElement::Rational(_)) => Magnitude::one(),
            (ValuedField::Laurent { base_prime }, FieldElement::Function(f)) => {
                pow_magnitude(*base_prime, -f.order().expect("nonzero"))
            }
            (field, FieldElement::Function(f)) => {
                panic!("rational function {f} is not an element of {field}")
            }
        }
    }
}

fn pow_magnitude(b: u64, k: i64) -> Magnitude {
    Magnitude::new(pow_base(b, k)).expect("positive")
}

impl fmt::Display for ValuedField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValuedField::Padic { p } => write!(f, "Q_{p}"),
            ValuedField::Trivial => write!(f, "Q (trivial)"),
            ValuedField::Laurent { base_prime } => write!(f, "Q((T)), |T| = 1/{base_prime}"),
        }
    }
}

/// An exact field element.
///
/// Rational functions are kept reduced and are never constant; constants
/// always collapse to `Rational`, so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Rational(BigRational),
    Function(RatFunc),
}

impl FieldElement {
    pub fn zero() -> Self {
        FieldElement::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        FieldElement::Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        FieldElement::Rational(BigRational::from_integer(n.into()))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        FieldElement::Rational(BigRational::new(n.into(), d.into()))
    }

    pub fn t() -> Self {
        FieldElement::Function(RatFunc::t())
    }

    pub fn from_ratfunc(f: RatFunc) -> Self {
        match f.as_constant() {
            Some(c) => FieldElement::Rational(c),
            None => FieldElement::Function(f),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(r) => r.is_zero(),
            FieldElement::Function(f) => f.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, FieldElement::Rational(r) if r.is_one())
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, FieldElement::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElement::Rational(r) => Some(r),
            FieldElement::Function(_) => None,
        }
    }

    fn to_ratfunc(&self) -> RatFunc {
        match self {
            FieldElement::Rational(r) => RatFunc::from_poly(Poly::constant(r.clone())),
            FieldElement::Function(f) => f.clone(),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return None;
        }
        Some(FieldElement::one() / self)
    }

    pub fn pow(&self, k: u32) -> FieldElement {
        let mut acc = FieldElement::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

impl From<BigRational> for FieldElement {
    fn from(r: BigRational) -> Self {
        FieldElement::Rational(r)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(r) => f.write_str(&format_rational(r)),
            FieldElement::Function(g) => write!(f, "{g}"),
        }
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        match (self, rhs) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(a + b),
            _ => FieldElement::from_ratfunc(self.to_ratfunc().add(&rhs.to_ratfunc())),
        }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        match (self, rhs) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(a - b),
            _ => FieldElement::from_ratfunc(self.to_ratfunc().sub(&rhs.to_ratfunc())),
        }
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        match (self, rhs) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(a * b),
            _ if self.is_zero() || rhs.is_zero() => FieldElement::zero(),
            (FieldElement::Rational(a), FieldElement::Function(g))
            | (FieldElement::Function(g), FieldElement::Rational(a)) => {
                FieldElement::Function(RatFunc::new(g.numer().scale(a), g.denom().clone()))
            }
            _ => FieldElement::from_ratfunc(self.to_ratfunc().mul(&rhs.to_ratfunc())),
        }
    }
}

impl Div for &FieldElement {
    type Output = FieldElement;
    /// Panics on division by zero, like integer division.
    fn div(self, rhs: &FieldElement) -> FieldElement {
        assert!(!rhs.is_zero(), "field division by zero");
        match (self, rhs) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(a / b),
            _ => FieldElement::from_ratfunc(self.to_ratfunc().div(&rhs.to_ratfunc())),
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        match self {
            FieldElement::Rational(a) => FieldElement::Rational(-a),
            FieldElement::Function(g) => FieldElement::Function(g.neg()),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement { (&self).$m(&rhs) }
        }
        impl $tr<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul, Div::div);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// Whether `r` (a positive rational `≠ 1`) is `P^k` for some integer `k ≠ 0`.
fn is_pure_power_of(r: &BigRational, prime: u64) -> bool {
    if r.is_one() {
        return false;
    }
    let (n, d) = (r.numer(), r.denom());
    let other = if n.is_one() {
        d
    } else if d.is_one() {
        n
    } else {
        return false;
    };
    let v = rational::int_valuation(other, prime);
    v > 0 && *other == num_traits::Pow::pow(num_bigint::BigInt::from(prime), v)
}

/// Whether fixing `|T| = 1/prime` keeps every ratio of the given (nonzero)
/// norm values off the value group `prime^Z`.
pub fn laurent_base_admissible(values: &[Magnitude], prime: u64) -> bool {
    let nonzero: Vec<&Magnitude> = values.iter().filter(|v| !v.is_zero()).collect();
    for (i, a) in nonzero.iter().enumerate() {
        for b in &nonzero[i + 1..] {
            let r = a.value() / b.value();
            if is_pure_power_of(&r, prime) {
                return false;
            }
        }
    }
    true
}

/// Smallest prime `P` such that no ratio of two of the given trivial-valuation
/// norm values is a nontrivial power of `P`.
pub fn choose_laurent_base(values: &[Magnitude]) -> u64 {
    let mut p = 2;
    while !laurent_base_admissible(values, p) {
        p = next_prime(p);
    }
    p
}

//! Coefficient rings.
//!
//! Everything above this module is written against [`Ring`], [`Euclidean`]
//! or [`Field`]. The concrete instances are arbitrary-precision integers and
//! rationals from `num`, plus [`crate::RationalFunction`] which implements
//! [`Field`] itself so it can serve as the coefficient field of a Gröbner
//! computation.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};

/// A commutative ring with unit. Operations take references so that
/// big-number coefficients are not cloned on every step.
pub trait Ring: Clone + PartialEq + Debug + Display + Zero + One + Send + Sync + 'static {
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;

    /// Multiplicative inverse when `self` is a unit.
    fn try_inv(&self) -> Option<Self>;

    fn add_assign_ref(&mut self, o: &Self) {
        *self = self.add_ref(o);
    }

    fn sub_assign_ref(&mut self, o: &Self) {
        *self = self.sub_ref(o);
    }

    fn from_i64(v: i64) -> Self;
}

/// Integer-like rings: exact division and gcd. Used for polynomial content
/// and for the multivariate gcd that canonicalizes rational functions.
pub trait Euclidean: Ring {
    /// `self / o` when the division is exact.
    fn div_exact(&self, o: &Self) -> Option<Self>;
    fn gcd_ref(&self, o: &Self) -> Self;
    fn is_negative_value(&self) -> bool;
    /// Quotient rounded towards negative infinity.
    fn div_floor_ref(&self, o: &Self) -> Self;
    /// Approximate magnitude, saturating for huge values.
    fn abs_f64(&self) -> f64;
}

pub trait Field: Ring {
    fn div_ref(&self, o: &Self) -> Option<Self> {
        o.try_inv().map(|inv| self.mul_ref(&inv))
    }
}

macro_rules! integer_ring {
    ($t:ty, $conv:expr) => {
        impl Ring for $t {
            fn add_ref(&self, o: &Self) -> Self {
                self + o
            }
            fn sub_ref(&self, o: &Self) -> Self {
                self - o
            }
            fn mul_ref(&self, o: &Self) -> Self {
                self * o
            }
            fn neg_ref(&self) -> Self {
                -self
            }
            fn try_inv(&self) -> Option<Self> {
                if self.is_one() || (-self).is_one() {
                    Some(self.clone())
                } else {
                    None
                }
            }
            fn add_assign_ref(&mut self, o: &Self) {
                *self += o;
            }
            fn sub_assign_ref(&mut self, o: &Self) {
                *self -= o;
            }
            fn from_i64(v: i64) -> Self {
                $conv(v)
            }
        }

        impl Euclidean for $t {
            fn div_exact(&self, o: &Self) -> Option<Self> {
                if o.is_zero() {
                    return None;
                }
                let (q, r) = self.div_rem(o);
                r.is_zero().then_some(q)
            }
            fn gcd_ref(&self, o: &Self) -> Self {
                Integer::gcd(self, o)
            }
            fn is_negative_value(&self) -> bool {
                Signed::is_negative(self)
            }
            fn div_floor_ref(&self, o: &Self) -> Self {
                Integer::div_floor(self, o)
            }
            fn abs_f64(&self) -> f64 {
                num_traits::ToPrimitive::to_f64(self).map_or(f64::MAX, f64::abs)
            }
        }
    };
}

integer_ring!(BigInt, BigInt::from);
integer_ring!(i64, |v| v);
integer_ring!(i128, |v: i64| v as i128);

macro_rules! ratio_field {
    ($t:ty, $conv:expr) => {
        impl Ring for $t {
            fn add_ref(&self, o: &Self) -> Self {
                self + o
            }
            fn sub_ref(&self, o: &Self) -> Self {
                self - o
            }
            fn mul_ref(&self, o: &Self) -> Self {
                self * o
            }
            fn neg_ref(&self) -> Self {
                -self
            }
            fn try_inv(&self) -> Option<Self> {
                (!self.is_zero()).then(|| self.recip())
            }
            fn from_i64(v: i64) -> Self {
                $conv(v)
            }
        }

        impl Field for $t {}
    };
}

ratio_field!(BigRational, |v| BigRational::from_integer(BigInt::from(v)));
ratio_field!(Ratio<i64>, Ratio::from_integer);

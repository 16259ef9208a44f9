//! Rational functions in the torus variables.
//!
//! Canonical form: numerator and denominator share no nonunit factor, the
//! denominator is an ordinary polynomial with no monomial factor and a
//! positive graded-lex leading coefficient. Equality is structural.

use std::fmt;

use num_traits::{One, Zero};

use super::gcd::{poly_gcd, split_monomial};
use super::poly::{t_name, Laurent, Mono};
use crate::scalar::{Euclidean, Field, Ring};
use crate::Error;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFun<C> {
    num: Laurent<C>,
    den: Laurent<C>,
}

impl<C: Euclidean> RatFun<C> {
    pub fn new(num: Laurent<C>, den: Laurent<C>) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    pub fn from_poly(p: Laurent<C>) -> Self {
        RatFun { num: p, den: Laurent::one() }
    }

    pub fn from_i64(c: i64) -> Self {
        Self::from_poly(Laurent::from_i64(c))
    }

    pub fn var(i: usize) -> Self {
        Self::from_poly(Laurent::var(i))
    }

    pub fn num(&self) -> &Laurent<C> {
        &self.num
    }

    pub fn den(&self) -> &Laurent<C> {
        &self.den
    }

    /// True when the denominator is one, i.e. the value is a Laurent polynomial.
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_laurent(&self) -> Option<&Laurent<C>> {
        self.is_laurent().then_some(&self.num)
    }

    fn canonical(num: Laurent<C>, den: Laurent<C>) -> Self {
        if num.is_zero() {
            return RatFun { num, den: Laurent::one() };
        }
        let (md, d0) = split_monomial(&den);
        let num = num.shift(&md.inv());
        if d0.is_constant() {
            let c = d0.constant_term();
            if let Some(q) = num.div_scalar_exact(&c) {
                return RatFun { num: q, den: Laurent::one() };
            }
            let g = num.content().gcd_ref(&c);
            let mut n = num.div_scalar_exact(&g).unwrap();
            let mut d = c.div_exact(&g).unwrap();
            if d.is_negative_value() {
                n = n.neg_ref();
                d = d.neg_ref();
            }
            return RatFun { num: n, den: Laurent::constant(d) };
        }
        if let Some(q) = num.div_exact(&d0) {
            return RatFun { num: q, den: Laurent::one() };
        }
        let (mn, n0) = split_monomial(&num);
        let g = poly_gcd(&n0, &d0);
        let mut n = n0.div_exact(&g).expect("gcd divides").shift(&mn);
        let mut d = d0.div_exact(&g).expect("gcd divides");
        if d.leading().is_some_and(|(_, c)| c.is_negative_value()) {
            n = n.neg_ref();
            d = d.neg_ref();
        }
        RatFun { num: n, den: d }
    }

    /// Build from coprime parts with a monomial-free denominator, fixing
    /// only the sign (and a constant denominator's content).
    fn signed(num: Laurent<C>, den: Laurent<C>) -> Self {
        if den.is_constant() {
            return Self::canonical(num, den);
        }
        if den.leading().is_some_and(|(_, c)| c.is_negative_value()) {
            return RatFun { num: num.neg_ref(), den: den.neg_ref() };
        }
        RatFun { num, den }
    }

    /// Re-run canonicalization; a no-op on canonical input.
    pub fn recanonicalize(&self) -> Self {
        Self::canonical(self.num.clone(), self.den.clone())
    }

    pub fn div(&self, o: &Self) -> Result<Self, Error> {
        if o.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(self.num.mul_ref(&o.den), self.den.mul_ref(&o.num)))
    }

    pub fn shift(&self, m: &Mono) -> Self {
        RatFun { num: self.num.shift(m), den: self.den.clone() }
    }

    pub fn pow(&self, k: i32) -> Result<Self, Error> {
        let base = if k < 0 { self.try_inv().ok_or(Error::DivisionByZero)? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul_ref(&base);
        }
        Ok(acc)
    }

    /// Rename variables (e.g. permute the torus weights).
    pub fn rename_vars(&self, f: impl Fn(usize) -> usize + Copy) -> Self {
        Self::canonical(self.num.rename_vars(f), self.den.rename_vars(f))
    }

    /// Evaluate at a point of a field; `None` at a pole.
    pub fn eval<F: Field>(&self, vals: &[F], conv: impl Fn(&C) -> F + Copy) -> Option<F> {
        let n = self.num.eval(vals, conv)?;
        let d = self.den.eval(vals, conv)?;
        n.div_ref(&d)
    }

    pub fn render(&self, name: &dyn Fn(usize) -> String) -> String {
        if self.den.is_one() {
            self.num.render(name)
        } else {
            format!("({})/({})", self.num.render(name), self.den.render(name))
        }
    }
}

impl<C: Euclidean> Zero for RatFun<C> {
    fn zero() -> Self {
        Self::from_poly(Laurent::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<C: Euclidean> One for RatFun<C> {
    fn one() -> Self {
        Self::from_poly(Laurent::one())
    }
}

impl<C: Euclidean> std::ops::Add for RatFun<C> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.add_ref(&o)
    }
}

impl<C: Euclidean> std::ops::Mul for RatFun<C> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.mul_ref(&o)
    }
}

impl<C: Euclidean> std::ops::Sub for RatFun<C> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.sub_ref(&o)
    }
}

impl<C: Euclidean> std::ops::Neg for RatFun<C> {
    type Output = Self;
    fn neg(self) -> Self {
        self.neg_ref()
    }
}

impl<C: Euclidean> Ring for RatFun<C> {
    fn add_ref(&self, o: &Self) -> Self {
        if self.den.is_one() && o.den.is_one() {
            return Self::from_poly(self.num.add_ref(&o.num));
        }
        if self.num.is_zero() {
            return o.clone();
        }
        if o.num.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return Self::canonical(self.num.add_ref(&o.num), self.den.clone());
        }
        // Henrici: only the common factor of the denominators can cancel.
        let g = poly_gcd(&self.den, &o.den);
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = o.den.div_exact(&g).expect("gcd divides");
        let t = self.num.mul_ref(&d1).add_ref(&o.num.mul_ref(&b1));
        if t.is_zero() {
            return Self::zero();
        }
        if g.is_one() {
            return Self::signed(t, self.den.mul_ref(&o.den));
        }
        let (mt, t0) = split_monomial(&t);
        let h = poly_gcd(&t0, &g);
        let t = t0.div_exact(&h).expect("gcd divides").shift(&mt);
        let g = g.div_exact(&h).expect("gcd divides");
        Self::signed(t, g.mul_ref(&b1).mul_ref(&d1))
    }

    fn sub_ref(&self, o: &Self) -> Self {
        self.add_ref(&o.neg_ref())
    }

    fn mul_ref(&self, o: &Self) -> Self {
        if self.den.is_one() && o.den.is_one() {
            return Self::from_poly(self.num.mul_ref(&o.num));
        }
        if self.num.is_zero() || o.num.is_zero() {
            return Self::zero();
        }
        // Cross-cancel each numerator against the other denominator.
        let (ma, a0) = split_monomial(&self.num);
        let (mc, c0) = split_monomial(&o.num);
        let g1 = poly_gcd(&a0, &o.den);
        let g2 = poly_gcd(&c0, &self.den);
        let a = a0.div_exact(&g1).expect("gcd divides");
        let c = c0.div_exact(&g2).expect("gcd divides");
        let b = self.den.div_exact(&g2).expect("gcd divides");
        let d = o.den.div_exact(&g1).expect("gcd divides");
        Self::signed(a.mul_ref(&c).shift(&ma.mul(&mc)), b.mul_ref(&d))
    }

    fn neg_ref(&self) -> Self {
        RatFun { num: self.num.neg_ref(), den: self.den.clone() }
    }

    fn try_inv(&self) -> Option<Self> {
        (!self.num.is_zero()).then(|| Self::canonical(self.den.clone(), self.num.clone()))
    }

    fn from_i64(v: i64) -> Self {
        RatFun::from_i64(v)
    }
}

impl<C: Euclidean> Field for RatFun<C> {}

impl<C: Euclidean> fmt::Display for RatFun<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&t_name))
    }
}

impl<C: Euclidean> From<Laurent<C>> for RatFun<C> {
    fn from(p: Laurent<C>) -> Self {
        Self::from_poly(p)
    }
}

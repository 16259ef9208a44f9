//! Truncated power series in the Novikov variables `q_1..q_k`.
//!
//! Truncation is componentwise: a term `q^d` is kept only while every
//! `d_i <= bound`. The discarded monomials form an ideal, so products and
//! inverses are well defined in the quotient.

use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::Ring;
use crate::weyl::Degree;
use crate::Error;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QSeries<R> {
    k: usize,
    bound: u32,
    coeffs: BTreeMap<Degree, R>,
}

impl<R: Ring> QSeries<R> {
    pub fn zero(k: usize, bound: u32) -> Self {
        QSeries { k, bound, coeffs: BTreeMap::new() }
    }

    pub fn constant(k: usize, bound: u32, c: R) -> Self {
        Self::monomial(k, bound, Degree::zero(k), c)
    }

    pub fn one(k: usize, bound: u32) -> Self {
        Self::constant(k, bound, R::one())
    }

    /// `c * q^d`; zero when `d` lies beyond the truncation.
    pub fn monomial(k: usize, bound: u32, d: Degree, c: R) -> Self {
        assert_eq!(d.len(), k, "degree length must match the number of q variables");
        let mut s = Self::zero(k, bound);
        s.add_term(d, &c);
        s
    }

    /// `1 - q_j` (zero-based `j`).
    pub fn one_minus_q(k: usize, bound: u32, j: usize) -> Self {
        let mut s = Self::one(k, bound);
        s.add_term(Degree::unit(k, j), &R::one().neg_ref());
        s
    }

    pub fn nq(&self) -> usize {
        self.k
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, d: &Degree) -> R {
        self.coeffs.get(d).cloned().unwrap_or_else(R::zero)
    }

    pub fn constant_term(&self) -> R {
        self.coeff(&Degree::zero(self.k))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Degree, &R)> {
        self.coeffs.iter()
    }

    fn in_range(&self, d: &Degree) -> bool {
        d.entries().iter().all(|&e| e <= self.bound)
    }

    pub fn add_term(&mut self, d: Degree, c: &R) {
        if c.is_zero() || !self.in_range(&d) {
            return;
        }
        match self.coeffs.entry(d) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check(&self, o: &Self) -> Result<(), Error> {
        if self.k != o.k || self.bound != o.bound {
            return Err(Error::MismatchedTruncation { left: (self.k, self.bound), right: (o.k, o.bound) });
        }
        Ok(())
    }

    fn check_other<S>(&self, o: &QSeries<S>) -> Result<(), Error> {
        if self.k != o.k || self.bound != o.bound {
            return Err(Error::MismatchedTruncation { left: (self.k, self.bound), right: (o.k, o.bound) });
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self, Error> {
        self.check(o)?;
        let mut s = self.clone();
        for (d, c) in o.coeffs.iter() {
            s.add_term(d.clone(), c);
        }
        Ok(s)
    }

    pub fn sub(&self, o: &Self) -> Result<Self, Error> {
        self.check(o)?;
        let mut s = self.clone();
        for (d, c) in o.coeffs.iter() {
            s.add_term(d.clone(), &c.neg_ref());
        }
        Ok(s)
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg_ref())
    }

    pub fn mul(&self, o: &Self) -> Result<Self, Error> {
        self.mul_with(o, |a, b| a.mul_ref(b))
    }

    /// Product with a series over another ring, combining coefficients with `f`.
    pub fn mul_with<S: Ring>(&self, o: &QSeries<S>, f: impl Fn(&R, &S) -> R) -> Result<Self, Error> {
        self.check_other(o)?;
        let mut s = Self::zero(self.k, self.bound);
        for (d1, c1) in self.coeffs.iter() {
            for (d2, c2) in o.coeffs.iter() {
                let d = d1.add(d2);
                if self.in_range(&d) {
                    s.add_term(d, &f(c1, c2));
                }
            }
        }
        Ok(s)
    }

    pub fn scale(&self, c: &R) -> Self {
        if c.is_zero() {
            return Self::zero(self.k, self.bound);
        }
        self.map(|x| x.mul_ref(c))
    }

    pub fn map(&self, f: impl Fn(&R) -> R) -> Self {
        let mut s = Self::zero(self.k, self.bound);
        for (d, c) in self.coeffs.iter() {
            s.add_term(d.clone(), &f(c));
        }
        s
    }

    /// Multiply by `q^e`.
    pub fn shift(&self, e: &Degree) -> Self {
        let mut s = Self::zero(self.k, self.bound);
        for (d, c) in self.coeffs.iter() {
            s.add_term(d.add(e), c);
        }
        s
    }

    /// Inverse in the truncated ring; requires a unit constant term.
    pub fn inverse(&self) -> Result<Self, Error> {
        let c0 = self.constant_term();
        let inv0 = c0.try_inv().ok_or(Error::NotAUnit)?;
        // Coefficients of the inverse by the triangular recurrence
        // b_d = -inv0 * sum_{e < d} a_{d - e} b_e, degrees visited by total.
        let mut degrees = Degree::all_up_to(self.k, self.bound);
        degrees.sort_by_key(|d| (d.entries().iter().sum::<u32>(), d.clone()));
        let mut out = Self::zero(self.k, self.bound);
        out.add_term(Degree::zero(self.k), &inv0);
        for d in degrees.iter().skip(1) {
            let mut acc = R::zero();
            for (e, b) in out.coeffs.iter() {
                if let Some(rest) = d.checked_sub(e) {
                    if let Some(a) = self.coeffs.get(&rest) {
                        acc.add_assign_ref(&a.mul_ref(b));
                    }
                }
            }
            if !acc.is_zero() {
                out.add_term(d.clone(), &acc.mul_ref(&inv0).neg_ref());
            }
        }
        Ok(out)
    }

    pub fn render(&self, coeff: &dyn Fn(&R) -> String) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (d, c) in self.coeffs.iter() {
            let mono: Vec<String> = d
                .entries()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(j, &e)| if e == 1 { format!("q{}", j + 1) } else { format!("q{}^{}", j + 1, e) })
                .collect();
            let cs = coeff(c);
            if mono.is_empty() {
                parts.push(format!("({cs})"));
            } else if c.is_one() {
                parts.push(mono.join("*"));
            } else {
                parts.push(format!("({cs})*{}", mono.join("*")));
            }
        }
        parts.join(" + ")
    }
}

impl<R: Ring> fmt::Display for QSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&|c| c.to_string()))
    }
}

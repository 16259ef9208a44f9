//! Sparse Laurent polynomials over a coefficient ring.
//!
//! Exponent vectors are stored with trailing zeros trimmed, so a polynomial
//! does not carry a fixed variable count: variable `i` is simply the `i`-th
//! slot. Constants have the empty exponent vector.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::scalar::{Euclidean, Field, Ring};

pub type Exps = SmallVec<[i32; 6]>;

/// A monomial, ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Mono(Exps);

impl Mono {
    pub fn one() -> Self {
        Mono(Exps::new())
    }

    pub fn new(exps: &[i32]) -> Self {
        let mut v: Exps = exps.iter().copied().collect();
        trim(&mut v);
        Mono(v)
    }

    pub fn var(i: usize, e: i32) -> Self {
        let mut v = Exps::from_elem(0, i + 1);
        v[i] = e;
        trim(&mut v);
        Mono(v)
    }

    pub fn exps(&self) -> &[i32] {
        &self.0
    }

    pub fn exp(&self, i: usize) -> i32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let (long, short) = if self.0.len() >= o.0.len() { (self, o) } else { (o, self) };
        let mut v = long.0.clone();
        for (a, b) in v.iter_mut().zip(short.0.iter()) {
            *a += b;
        }
        trim(&mut v);
        Mono(v)
    }

    pub fn inv(&self) -> Mono {
        Mono(self.0.iter().map(|e| -e).collect())
    }

    pub fn div(&self, o: &Mono) -> Mono {
        self.mul(&o.inv())
    }

    /// Componentwise `self >= o`.
    pub fn divisible_by(&self, o: &Mono) -> bool {
        let n = self.0.len().max(o.0.len());
        (0..n).all(|i| self.exp(i) >= o.exp(i))
    }

    pub fn pow(&self, k: i32) -> Mono {
        let mut v: Exps = self.0.iter().map(|e| e * k).collect();
        trim(&mut v);
        Mono(v)
    }

    /// Componentwise minimum.
    pub fn meet(&self, o: &Mono) -> Mono {
        let n = self.0.len().max(o.0.len());
        let mut v: Exps = (0..n).map(|i| self.exp(i).min(o.exp(i))).collect();
        trim(&mut v);
        Mono(v)
    }

    pub fn join(&self, o: &Mono) -> Mono {
        let n = self.0.len().max(o.0.len());
        let mut v: Exps = (0..n).map(|i| self.exp(i).max(o.exp(i))).collect();
        trim(&mut v);
        Mono(v)
    }
}

fn trim(v: &mut Exps) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

impl Ord for Mono {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| {
            let n = self.0.len().max(o.0.len());
            for i in 0..n {
                match self.exp(i).cmp(&o.exp(i)) {
                    Ordering::Equal => continue,
                    c => return c,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// A Laurent polynomial. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Laurent<C> {
    terms: BTreeMap<Mono, C>,
}

impl<C: Ring> Default for Laurent<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Ring> Laurent<C> {
    pub fn zero() -> Self {
        Laurent { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::term(Mono::one(), c)
    }

    pub fn from_i64(c: i64) -> Self {
        Self::constant(C::from_i64(c))
    }

    pub fn term(m: Mono, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Laurent { terms }
    }

    /// The variable `x_i` (zero-based).
    pub fn var(i: usize) -> Self {
        Self::term(Mono::var(i, 1), C::one())
    }

    pub fn var_pow(i: usize, e: i32) -> Self {
        Self::term(Mono::var(i, e), C::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono, C)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Mono::one()).is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&Mono::one()))
    }

    pub fn constant_term(&self) -> C {
        self.terms.get(&Mono::one()).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Mono) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Number of variable slots touched by any term.
    pub fn nvars(&self) -> usize {
        self.terms.keys().map(|m| m.0.len()).max().unwrap_or(0)
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&Mono, &C)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Mono, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
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

    pub fn add_ref(&self, o: &Self) -> Self {
        let (mut acc, other) = if self.len() >= o.len() { (self.clone(), o) } else { (o.clone(), self) };
        for (m, c) in other.terms.iter() {
            acc.add_term(m.clone(), c);
        }
        acc
    }

    pub fn sub_ref(&self, o: &Self) -> Self {
        let mut acc = self.clone();
        for (m, c) in o.terms.iter() {
            acc.add_term(m.clone(), &c.neg_ref());
        }
        acc
    }

    pub fn neg_ref(&self) -> Self {
        Laurent { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg_ref())).collect() }
    }

    pub fn mul_ref(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if o.is_monomial() {
            let (m, c) = o.leading().unwrap();
            return self.mul_term(m, c);
        }
        if self.is_monomial() {
            let (m, c) = self.leading().unwrap();
            return o.mul_term(m, c);
        }
        let mut acc = Self::zero();
        for (m1, c1) in self.terms.iter() {
            for (m2, c2) in o.terms.iter() {
                acc.add_term(m1.mul(m2), &c1.mul_ref(c2));
            }
        }
        acc
    }

    pub fn mul_term(&self, m: &Mono, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut terms = BTreeMap::new();
        for (m1, c1) in self.terms.iter() {
            let v = c1.mul_ref(c);
            if !v.is_zero() {
                terms.insert(m1.mul(m), v);
            }
        }
        Laurent { terms }
    }

    pub fn scale(&self, c: &C) -> Self {
        self.mul_term(&Mono::one(), c)
    }

    pub fn shift(&self, m: &Mono) -> Self {
        Laurent { terms: self.terms.iter().map(|(m1, c)| (m1.mul(m), c.clone())).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul_ref(self);
        }
        acc
    }

    /// Componentwise minimum exponent over all terms (one for zero).
    pub fn min_mono(&self) -> Mono {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return Mono::one() };
        it.fold(first.clone(), |acc, m| acc.meet(m))
    }

    pub fn max_mono(&self) -> Mono {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return Mono::one() };
        it.fold(first.clone(), |acc, m| acc.join(m))
    }

    /// True when every exponent is nonnegative.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|&e| e >= 0))
    }

    pub fn degree_in(&self, v: usize) -> i32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    /// Rename variables: slot `i` goes to slot `f(i)`.
    pub fn rename_vars(&self, f: impl Fn(usize) -> usize) -> Self {
        let mut acc = Self::zero();
        for (m, c) in self.terms.iter() {
            let mut out = Mono::one();
            for (i, &e) in m.0.iter().enumerate() {
                if e != 0 {
                    out = out.mul(&Mono::var(f(i), e));
                }
            }
            acc.add_term(out, c);
        }
        acc
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> Laurent<D> {
        Laurent::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Substitute a ring element for every variable. `vals[i]` must be
    /// invertible wherever a negative exponent of `x_i` occurs.
    pub fn eval<R: Ring>(&self, vals: &[R], conv: impl Fn(&C) -> R) -> Option<R> {
        let mut acc = R::zero();
        for (m, c) in self.terms.iter() {
            let mut t = conv(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let base = vals.get(i)?;
                let b = if e < 0 { base.try_inv()? } else { base.clone() };
                for _ in 0..e.unsigned_abs() {
                    t = t.mul_ref(&b);
                }
            }
            acc.add_assign_ref(&t);
        }
        Some(acc)
    }

    /// Split into powers of variable `v`: result[k] is the coefficient of
    /// `x_v^k` (with `x_v` removed). Requires nonnegative exponents in `v`.
    pub fn to_univariate(&self, v: usize) -> Vec<Self> {
        let d = self.degree_in(v).max(0) as usize;
        let mut out = vec![Self::zero(); d + 1];
        for (m, c) in self.terms.iter() {
            let e = m.exp(v);
            debug_assert!(e >= 0);
            let rest = m.mul(&Mono::var(v, -e));
            out[e as usize].add_term(rest, c);
        }
        while out.len() > 1 && out.last().unwrap().is_zero() {
            out.pop();
        }
        out
    }

    pub fn from_univariate(coeffs: &[Self], v: usize) -> Self {
        let mut acc = Self::zero();
        for (k, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add_ref(&c.shift(&Mono::var(v, k as i32)));
            }
        }
        acc
    }

    pub fn fmt_with(&self, f: &mut fmt::Formatter<'_>, name: &dyn Fn(usize) -> String) -> fmt::Result {
        f.write_str(&self.render(name))
    }

    /// Render in the text grammar, leading term first.
    pub fn render(&self, name: &dyn Fn(usize) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let cs = c.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) if !rest.contains(['+', '-', '(']) => (true, rest.to_string()),
                _ => (false, cs.clone()),
            };
            let needs_paren = mag.contains(['+', '-', '/']) && !m.is_one();
            let mag = if needs_paren { format!("({mag})") } else { mag };
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = render_mono(m, name);
            if m.is_one() {
                s.push_str(&mag);
            } else if mag == "1" {
                s.push_str(&mono);
            } else {
                s.push_str(&mag);
                s.push('*');
                s.push_str(&mono);
            }
        }
        s
    }
}

pub(crate) fn render_mono(m: &Mono, name: &dyn Fn(usize) -> String) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(name(i)),
            _ => parts.push(format!("{}^{}", name(i), e)),
        }
    }
    parts.join("*")
}

pub fn t_name(i: usize) -> String {
    format!("T{}", i + 1)
}

impl<C: Ring> fmt::Display for Laurent<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f, &t_name)
    }
}

impl<C: Euclidean> Laurent<C> {
    /// Gcd of all coefficients, made positive.
    pub fn content(&self) -> C {
        let mut g = C::zero();
        for c in self.terms.values() {
            g = g.gcd_ref(c);
            if g.is_one() {
                break;
            }
        }
        if g.is_negative_value() {
            g.neg_ref()
        } else {
            g
        }
    }

    pub fn div_scalar_exact(&self, c: &C) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (m, a) in self.terms.iter() {
            terms.insert(m.clone(), a.div_exact(c)?);
        }
        Some(Laurent { terms })
    }

    /// Exact quotient in the Laurent ring, or `None` when `d` does not divide.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if d.is_monomial() {
            let (m, c) = d.leading().unwrap();
            return self.div_scalar_exact(c).map(|p| p.shift(&m.inv()));
        }
        let sd = d.min_mono();
        let sn = self.min_mono();
        let d0 = d.shift(&sd.inv());
        let n0 = self.shift(&sn.inv());
        let q = poly_div_exact(&n0, &d0)?;
        Some(q.shift(&sn.div(&sd)))
    }

    /// Make the leading coefficient positive.
    pub fn normalize_sign(&self) -> Self {
        match self.leading() {
            Some((_, c)) if c.is_negative_value() => self.neg_ref(),
            _ => self.clone(),
        }
    }
}

/// Exact division of ordinary polynomials by repeated leading-term
/// cancellation.
pub(crate) fn poly_div_exact<C: Euclidean>(n: &Laurent<C>, d: &Laurent<C>) -> Option<Laurent<C>> {
    let (ld, lc) = d.leading().map(|(m, c)| (m.clone(), c.clone()))?;
    let mut r = n.clone();
    let mut q = Laurent::zero();
    while let Some((lm, c)) = r.leading() {
        if !lm.divisible_by(&ld) {
            return None;
        }
        let tc = c.div_exact(&lc)?;
        let tm = lm.div(&ld);
        r = r.sub_ref(&d.mul_term(&tm, &tc));
        q.add_term(tm, &tc);
    }
    Some(q)
}

impl<F: Field> Laurent<F> {
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, c)) => self.scale(&c.try_inv().expect("nonzero leading coefficient")),
            None => self.clone(),
        }
    }
}

macro_rules! forward_ops {
    ($($tr:ident $m:ident $inner:ident),*) => {$(
        impl<C: Ring> std::ops::$tr<&Laurent<C>> for &Laurent<C> {
            type Output = Laurent<C>;
            fn $m(self, o: &Laurent<C>) -> Laurent<C> { self.$inner(o) }
        }
        impl<C: Ring> std::ops::$tr for Laurent<C> {
            type Output = Laurent<C>;
            fn $m(self, o: Laurent<C>) -> Laurent<C> { (&self).$inner(&o) }
        }
    )*};
}

forward_ops!(Add add add_ref, Sub sub sub_ref, Mul mul mul_ref);

impl<C: Ring> std::ops::Neg for Laurent<C> {
    type Output = Laurent<C>;
    fn neg(self) -> Laurent<C> {
        self.neg_ref()
    }
}

impl<C: Ring> std::ops::Neg for &Laurent<C> {
    type Output = Laurent<C>;
    fn neg(self) -> Laurent<C> {
        self.neg_ref()
    }
}

impl<C: Ring> num_traits::Zero for Laurent<C> {
    fn zero() -> Self {
        Laurent::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<C: Ring> num_traits::One for Laurent<C> {
    fn one() -> Self {
        Laurent::one()
    }
}

impl<C: Ring> Ring for Laurent<C> {
    fn add_ref(&self, o: &Self) -> Self {
        Laurent::add_ref(self, o)
    }
    fn sub_ref(&self, o: &Self) -> Self {
        Laurent::sub_ref(self, o)
    }
    fn mul_ref(&self, o: &Self) -> Self {
        Laurent::mul_ref(self, o)
    }
    fn neg_ref(&self) -> Self {
        Laurent::neg_ref(self)
    }
    fn try_inv(&self) -> Option<Self> {
        if !self.is_monomial() {
            return None;
        }
        let (m, c) = self.leading().unwrap();
        Some(Laurent::term(m.inv(), c.try_inv()?))
    }
    fn add_assign_ref(&mut self, o: &Self) {
        for (m, c) in o.terms.iter() {
            self.add_term(m.clone(), c);
        }
    }
    fn from_i64(v: i64) -> Self {
        Laurent::from_i64(v)
    }
}

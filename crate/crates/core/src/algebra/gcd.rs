//! Multivariate polynomial gcd over an integer-like ring.
//!
//! Recursive primitive remainder sequences: a polynomial is viewed as
//! univariate in one variable with coefficients in the remaining ones, and
//! contents are taken recursively. Inputs must have nonnegative exponents.

use super::poly::{Laurent, Mono};
use crate::scalar::Euclidean;

type P<C> = Laurent<C>;

/// Greatest common divisor with positive leading coefficient.
pub fn poly_gcd<C: Euclidean>(a: &P<C>, b: &P<C>) -> P<C> {
    debug_assert!(a.is_polynomial() && b.is_polynomial());
    gcd_rec(a, b).normalize_sign()
}

fn gcd_rec<C: Euclidean>(a: &P<C>, b: &P<C>) -> P<C> {
    if a.is_zero() {
        return b.normalize_sign();
    }
    if b.is_zero() {
        return a.normalize_sign();
    }
    if a.is_constant() {
        return P::constant(abs(&a.constant_term().gcd_ref(&b.content())));
    }
    if b.is_constant() {
        return P::constant(abs(&b.constant_term().gcd_ref(&a.content())));
    }
    let va = vars_of(a);
    let vb = vars_of(b);
    // A variable present in only one argument cannot occur in the gcd.
    if let Some(&only_a) = va.iter().find(|x| !vb.contains(x)) {
        return gcd_rec(&content_in(a, only_a), b);
    }
    if let Some(&only_b) = vb.iter().find(|x| !va.contains(x)) {
        return gcd_rec(a, &content_in(b, only_b));
    }
    if let Some(g) = heuristic_gcd(a, b, &va) {
        return g;
    }
    let v = *va.iter().min_by_key(|&&v| a.degree_in(v) + b.degree_in(v)).unwrap();

    let ua = a.to_univariate(v);
    let ub = b.to_univariate(v);
    let ca = uni_content(&ua);
    let cb = uni_content(&ub);
    let c = gcd_rec(&ca, &cb);
    let mut pa = uni_div(&ua, &ca);
    let mut pb = uni_div(&ub, &cb);
    if pa.len() < pb.len() {
        std::mem::swap(&mut pa, &mut pb);
    }
    let g = subresultant_gcd(pa, pb);
    let g = uni_primitive(&g);
    P::from_univariate(&g, v).mul_ref(&c).normalize_sign()
}

/// Subresultant remainder sequence; returns the last nonzero remainder
/// (an associate of the gcd up to content). `a` and `b` are primitive with
/// `deg a >= deg b`.
fn subresultant_gcd<C: Euclidean>(mut a: Vec<P<C>>, mut b: Vec<P<C>>) -> Vec<P<C>> {
    let mut g = P::one();
    let mut h = P::one();
    loop {
        if b.len() == 1 {
            return vec![P::one()];
        }
        let delta = (a.len() - b.len()) as u32;
        let r = prem(&a, &b);
        if r.iter().all(|x| x.is_zero()) {
            return b;
        }
        if r.len() == 1 {
            return vec![P::one()];
        }
        let divisor = g.mul_ref(&h.pow(delta));
        let next: Vec<P<C>> =
            r.iter().map(|x| x.div_exact(&divisor).expect("subresultant division is exact")).collect();
        a = b;
        b = next;
        g = a.last().unwrap().clone();
        // h <- g^delta / h^(delta - 1)
        h = if delta == 0 {
            h
        } else {
            g.pow(delta).div_exact(&h.pow(delta - 1)).expect("subresultant division is exact")
        };
    }
}

/// Heuristic gcd: evaluate one variable at a large integer, recurse, and
/// lift the result back by balanced base-`xi` expansion. Returns `None`
/// when no candidate divides both inputs after a few attempts.
fn heuristic_gcd<C: Euclidean>(a: &P<C>, b: &P<C>, vars: &[usize]) -> Option<P<C>> {
    let v = *vars.last()?;
    let ca = a.content();
    let cb = b.content();
    let cg = ca.gcd_ref(&cb);
    let pa = a.div_scalar_exact(&ca)?;
    let pb = b.div_scalar_exact(&cb)?;
    let bound = max_abs(&pa).max(max_abs(&pb));
    if bound > 1e12 {
        return None;
    }
    let mut xi = 2 * bound as i64 + 29;
    for _ in 0..4 {
        let x = C::from_i64(xi);
        let ea = eval_var(&pa, v, &x);
        let eb = eval_var(&pb, v, &x);
        if !ea.is_zero() && !eb.is_zero() {
            let gamma = gcd_rec(&ea, &eb);
            let cand = lift(&gamma, v, &x, xi);
            if !cand.is_zero() {
                let cand = cand.div_scalar_exact(&cand.content())?.normalize_sign();
                if super::poly::poly_div_exact(&pa, &cand).is_some()
                    && super::poly::poly_div_exact(&pb, &cand).is_some()
                {
                    return Some(cand.scale(&cg));
                }
            }
        }
        xi = xi.checked_mul(73794)? / 27011;
    }
    None
}

fn max_abs<C: Euclidean>(p: &P<C>) -> f64 {
    p.terms().map(|(_, c)| c.abs_f64()).fold(0.0, f64::max)
}

fn eval_var<C: Euclidean>(p: &P<C>, v: usize, x: &C) -> P<C> {
    let mut out = P::zero();
    for (m, c) in p.terms() {
        let e = m.exp(v);
        let mut t = c.clone();
        for _ in 0..e {
            t = t.mul_ref(x);
        }
        out.add_term(m.mul(&Mono::var(v, -e)), &t);
    }
    out
}

/// Balanced base-`xi` expansion of every coefficient, digits becoming the
/// coefficients of powers of `x_v`.
fn lift<C: Euclidean>(gamma: &P<C>, v: usize, x: &C, xi: i64) -> P<C> {
    let half = C::from_i64(xi / 2);
    let mut out = P::zero();
    let mut rest = gamma.clone();
    let mut i = 0;
    while !rest.is_zero() {
        let mut digit = P::zero();
        for (m, c) in rest.terms() {
            let q = c.div_floor_ref(x);
            let mut r = c.sub_ref(&q.mul_ref(x));
            if !r.sub_ref(&half).is_negative_value() && !r.sub_ref(&half).is_zero() {
                r = r.sub_ref(x);
            }
            digit.add_term(m.clone(), &r);
        }
        out = out.add_ref(&digit.shift(&Mono::var(v, i)));
        rest = rest.sub_ref(&digit).div_scalar_exact(x).expect("digits leave a multiple of xi");
        i += 1;
        if i > 1000 {
            return P::zero();
        }
    }
    out
}

fn abs<C: Euclidean>(c: &C) -> C {
    if c.is_negative_value() {
        c.neg_ref()
    } else {
        c.clone()
    }
}

fn vars_of<C: Euclidean>(p: &P<C>) -> Vec<usize> {
    let n = p.nvars();
    (0..n).filter(|&i| p.degree_in(i) > 0).collect()
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `x_v`.
fn content_in<C: Euclidean>(p: &P<C>, v: usize) -> P<C> {
    uni_content(&p.to_univariate(v))
}

fn uni_content<C: Euclidean>(u: &[P<C>]) -> P<C> {
    let mut g = P::zero();
    // Start from the sparsest coefficients; gcd shrinks quickly.
    let mut order: Vec<&P<C>> = u.iter().filter(|c| !c.is_zero()).collect();
    order.sort_by_key(|c| c.len());
    for c in order {
        g = gcd_rec(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn uni_div<C: Euclidean>(u: &[P<C>], c: &P<C>) -> Vec<P<C>> {
    u.iter().map(|x| x.div_exact(c).expect("content divides every coefficient")).collect()
}

fn uni_primitive<C: Euclidean>(u: &[P<C>]) -> Vec<P<C>> {
    let c = uni_content(u);
    let mut out = uni_div(u, &c);
    if let Some(last) = out.last() {
        if last.leading().is_some_and(|(_, c)| c.is_negative_value()) {
            out = out.iter().map(|x| x.neg_ref()).collect();
        }
    }
    out
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) a mod b`.
fn prem<C: Euclidean>(a: &[P<C>], b: &[P<C>]) -> Vec<P<C>> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r: Vec<P<C>> = a.to_vec();
    let mut steps_left = (a.len() - db) as u32;
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for x in r.iter_mut() {
            *x = x.mul_ref(lb);
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] = r[i + shift].sub_ref(&bc.mul_ref(&lr));
        }
        debug_assert!(r[dr].is_zero());
        while r.len() > 1 && r.last().unwrap().is_zero() {
            r.pop();
        }
        steps_left -= 1;
    }
    if steps_left > 0 {
        let f = lb.pow(steps_left);
        for x in r.iter_mut() {
            *x = x.mul_ref(&f);
        }
    }
    r
}

/// Split a Laurent polynomial into a monomial times an ordinary polynomial
/// with no monomial factor.
pub fn split_monomial<C: Euclidean>(p: &P<C>) -> (Mono, P<C>) {
    let m = p.min_mono();
    (m.clone(), p.shift(&m.inv()))
}

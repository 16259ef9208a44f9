//! Exact arithmetic: Laurent polynomials, rational functions, truncated
//! q-series, a multivariate gcd and a Gröbner basis engine.

pub mod gcd;
pub mod groebner;
pub mod poly;
pub mod ratfun;
pub mod series;
pub mod text;

pub use poly::{Laurent, Mono};
pub use ratfun::RatFun;
pub use series::QSeries;

use crate::scalar::Ring;

/// Elementary symmetric polynomial `e_l(xs)`; zero when `l > xs.len()`.
pub fn elem_sym<R: Ring>(l: usize, xs: &[R]) -> R {
    if l > xs.len() {
        return R::zero();
    }
    let mut e = vec![R::zero(); l + 1];
    e[0] = R::one();
    for x in xs {
        for j in (1..=l).rev() {
            let t = e[j - 1].mul_ref(x);
            e[j].add_assign_ref(&t);
        }
    }
    e.pop().unwrap()
}

/// All of `e_0(xs), ..., e_m(xs)` where `m = xs.len()`.
pub fn elem_sym_all<R: Ring>(xs: &[R]) -> Vec<R> {
    let mut e = vec![R::zero(); xs.len() + 1];
    e[0] = R::one();
    for (i, x) in xs.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            let t = e[j - 1].mul_ref(x);
            e[j].add_assign_ref(&t);
        }
    }
    e
}

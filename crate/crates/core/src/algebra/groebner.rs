//! Buchberger's algorithm over a coefficient field, graded reverse
//! lexicographic order with `x_0 > x_1 > ...`.

use std::cmp::Ordering;

use crate::scalar::Field;

pub type GMono = Vec<u16>;

fn deg(m: &[u16]) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

/// Graded reverse lexicographic comparison.
pub fn grevlex(a: &[u16], b: &[u16]) -> Ordering {
    deg(a).cmp(&deg(b)).then_with(|| {
        for i in (0..a.len()).rev() {
            match a[i].cmp(&b[i]) {
                Ordering::Equal => continue,
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
            }
        }
        Ordering::Equal
    })
}

/// Polynomial with terms sorted by decreasing grevlex order.
#[derive(Clone, Debug, PartialEq)]
pub struct GPoly<F> {
    nvars: usize,
    terms: Vec<(GMono, F)>,
}

impl<F: Field> GPoly<F> {
    pub fn zero(nvars: usize) -> Self {
        GPoly { nvars, terms: Vec::new() }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (GMono, F)>) -> Self {
        let mut v: Vec<(GMono, F)> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        v.sort_by(|a, b| grevlex(&b.0, &a.0));
        let mut out: Vec<(GMono, F)> = Vec::with_capacity(v.len());
        for (m, c) in v {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => {
                    lc.add_assign_ref(&c);
                    if lc.is_zero() {
                        out.pop();
                    }
                }
                _ => out.push((m, c)),
            }
        }
        GPoly { nvars, terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(GMono, F)] {
        &self.terms
    }

    pub fn leading_mono(&self) -> Option<&GMono> {
        self.terms.first().map(|(m, _)| m)
    }

    fn monic(mut self) -> Self {
        if let Some((_, c)) = self.terms.first() {
            let inv = c.try_inv().expect("nonzero leading coefficient");
            for (_, x) in self.terms.iter_mut() {
                *x = x.mul_ref(&inv);
            }
        }
        self
    }

    /// `self - c * m * g`, merging sorted term lists.
    fn sub_scaled(&self, c: &F, m: &[u16], g: &GPoly<F>) -> GPoly<F> {
        let shifted: Vec<(GMono, F)> =
            g.terms.iter().map(|(gm, gc)| (gm.iter().zip(m).map(|(a, b)| a + b).collect(), gc.mul_ref(c))).collect();
        let mut out = Vec::with_capacity(self.terms.len() + shifted.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < shifted.len() {
            let ord = match (self.terms.get(i), shifted.get(j)) {
                (Some(a), Some(b)) => grevlex(&a.0, &b.0),
                (Some(_), None) => Ordering::Greater,
                _ => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((shifted[j].0.clone(), shifted[j].1.neg_ref()));
                    j += 1;
                }
                Ordering::Equal => {
                    let v = self.terms[i].1.sub_ref(&shifted[j].1);
                    if !v.is_zero() {
                        out.push((self.terms[i].0.clone(), v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        GPoly { nvars: self.nvars, terms: out }
    }
}

fn divides(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u16], b: &[u16]) -> GMono {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn diff(a: &[u16], b: &[u16]) -> GMono {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Full reduction of `f` modulo `basis`.
pub fn normal_form<F: Field>(f: &GPoly<F>, basis: &[GPoly<F>]) -> GPoly<F> {
    let mut p = f.clone();
    let mut rem: Vec<(GMono, F)> = Vec::new();
    'outer: while let Some((lm, lc)) = p.terms.first().cloned() {
        for g in basis {
            let gl = &g.terms[0];
            if divides(&gl.0, &lm) {
                let c = lc.div_ref(&gl.1).expect("nonzero leading coefficient");
                p = p.sub_scaled(&c, &diff(&lm, &gl.0), g);
                continue 'outer;
            }
        }
        rem.push((lm, lc));
        p.terms.remove(0);
    }
    GPoly { nvars: f.nvars, terms: rem }
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
pub fn groebner_basis<F: Field>(gens: &[GPoly<F>]) -> Vec<GPoly<F>> {
    let mut basis: Vec<GPoly<F>> = Vec::new();
    for g in gens {
        let r = normal_form(g, &basis);
        if !r.is_zero() {
            basis.push(r.monic());
        }
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    while let Some(idx) = select_pair(&pairs, &basis) {
        let (i, j) = pairs.swap_remove(idx);
        let (li, lj) = (&basis[i].terms[0].0, &basis[j].terms[0].0);
        // Product criterion: coprime leading monomials reduce to zero.
        if li.iter().zip(lj.iter()).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        let l = lcm(li, lj);
        let s = {
            let a = GPoly { nvars: basis[i].nvars, terms: Vec::new() }.sub_scaled(
                &F::one().neg_ref(),
                &diff(&l, li),
                &basis[i],
            );
            a.sub_scaled(&F::one(), &diff(&l, lj), &basis[j])
        };
        let r = normal_form(&s, &basis);
        if !r.is_zero() {
            basis.push(r.monic());
            let n = basis.len() - 1;
            for i in 0..n {
                pairs.push((i, n));
            }
        }
    }
    reduce_basis(basis)
}

fn select_pair<F: Field>(pairs: &[(usize, usize)], basis: &[GPoly<F>]) -> Option<usize> {
    // Normal strategy: smallest lcm first.
    pairs
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            let la = lcm(&basis[a.0].terms[0].0, &basis[a.1].terms[0].0);
            let lb = lcm(&basis[b.0].terms[0].0, &basis[b.1].terms[0].0);
            grevlex(&la, &lb)
        })
        .map(|(i, _)| i)
}

fn reduce_basis<F: Field>(mut basis: Vec<GPoly<F>>) -> Vec<GPoly<F>> {
    // Drop elements whose leading monomial is divisible by another's.
    let mut keep: Vec<GPoly<F>> = Vec::new();
    basis.sort_by(|a, b| grevlex(&a.terms[0].0, &b.terms[0].0));
    for g in basis {
        if !keep.iter().any(|h| divides(&h.terms[0].0, &g.terms[0].0)) {
            keep.push(g);
        }
    }
    let mut out = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<GPoly<F>> = keep.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()).collect();
        out.push(normal_form(&keep[i], &others).monic());
    }
    out
}

/// Number of standard monomials, or `None` when the quotient is infinite.
pub fn standard_monomial_count<F: Field>(basis: &[GPoly<F>], nvars: usize) -> Option<usize> {
    let leads: Vec<&GMono> = basis.iter().filter_map(|g| g.leading_mono()).collect();
    if leads.iter().any(|m| m.iter().all(|&e| e == 0)) {
        return Some(0);
    }
    // Each variable needs a pure power among the leading monomials.
    let mut caps = vec![0u16; nvars];
    for (v, cap) in caps.iter_mut().enumerate() {
        *cap = leads.iter().filter(|m| m.iter().enumerate().all(|(i, &e)| i == v || e == 0)).map(|m| m[v]).min()?;
    }
    let mut count = 0usize;
    let mut cur = vec![0u16; nvars];
    fn walk(v: usize, cur: &mut Vec<u16>, caps: &[u16], leads: &[&GMono], count: &mut usize) {
        if v == cur.len() {
            if !leads.iter().any(|m| divides(m, cur)) {
                *count += 1;
            }
            return;
        }
        for e in 0..caps[v] {
            cur[v] = e;
            // Prune: if the partial monomial is already divisible, larger
            // exponents in later slots stay divisible.
            let partial_div = leads.iter().any(|m| divides(m, cur) && m[v + 1..].iter().all(|&x| x == 0));
            if partial_div {
                break;
            }
            walk(v + 1, cur, caps, leads, count);
        }
        cur[v] = 0;
    }
    walk(0, &mut cur, &caps, &leads, &mut count);
    Some(count)
}

//! Equivariant K-theory of `Fl(r_1, ..., r_k; n)` by restriction to torus
//! fixed points.
//!
//! Conventions, all checked by the test suite rather than assumed:
//! * the fixed points are the minimal coset representatives `w`, and
//!   `S_j|_w` has weights `T_{w(1)}, ..., T_{w(r_j)}`;
//! * `χ(σ) = Σ_w σ(w) / ∏ (1 - T_{w(a)}/T_{w(b)})` over `a < b` in different
//!   blocks;
//! * `(∂_i σ)(w) = (σ(w) - x σ(w s_i)) / (1 - x)` with `x = T_{w(i)}/T_{w(i+1)}`;
//! * the point class at the identity restricts there to `∏_{a<b} (1 - T_a/T_b)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{elem_sym, Laurent, Mono};
use crate::scalar::Ring;
use crate::weyl::{FlagSpace, Permutation};
use crate::{Error, LaurentPolynomial, RationalFunction};

/// Which Borel orbit a Schubert class comes from.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Variant {
    /// `O_w`, the structure sheaf of `closure(B w P)`, of dimension `ℓ(w)`.
    #[serde(rename = "B")]
    B,
    /// `O^w`, the structure sheaf of `closure(B⁻ w P)`, of codimension `ℓ(w)`.
    #[serde(rename = "B-")]
    Opposite,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "B" | "b" => Ok(Variant::B),
            "B-" | "b-" | "opposite" => Ok(Variant::Opposite),
            _ => Err(Error::Parse(format!("unknown Schubert variant {s:?}"))),
        }
    }
}

/// Fixed-point data of one flag space, shared by all classes on it.
pub struct FixedPoints {
    space: FlagSpace,
    points: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    // σ ↦ χ(σ) is Σ_w σ(w)·chi_weight[w] / ∏ vandermonde.
    chi_weight: Vec<LaurentPolynomial>,
    vandermonde: Vec<LaurentPolynomial>,
    schubert: [OnceLock<Vec<KClass>>; 2],
    pairing: OnceLock<Vec<Vec<bool>>>,
}

impl fmt::Debug for FixedPoints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FixedPoints({})", self.space)
    }
}

fn t(i: usize) -> LaurentPolynomial {
    Laurent::var(i - 1)
}

fn cache() -> &'static Mutex<HashMap<FlagSpace, &'static FixedPoints>> {
    static CACHE: OnceLock<Mutex<HashMap<FlagSpace, &'static FixedPoints>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The shared fixed-point data of `space`, built on first use and kept for
/// the life of the process.
pub fn fixed_points(space: &FlagSpace) -> &'static FixedPoints {
    if let Some(fp) = cache().lock().unwrap().get(space) {
        return fp;
    }
    let fp = FixedPoints::build(space.clone());
    let mut guard = cache().lock().unwrap();
    guard.entry(space.clone()).or_insert_with(|| Box::leak(Box::new(fp)))
}

impl FixedPoints {
    fn build(space: FlagSpace) -> Self {
        let n = space.n();
        let points = space.min_coset_reps();
        let index = points.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let mut vandermonde = Vec::new();
        for p in 1..=n {
            for m in p + 1..=n {
                vandermonde.push(t(m).sub_ref(&t(p)));
            }
        }
        let chi_weight = points
            .iter()
            .map(|w| {
                let mut acc = if w.length() % 2 == 0 { Laurent::one() } else { Laurent::from_i64(-1) };
                for a in 1..=n {
                    for b in a + 1..=n {
                        let (ta, tb) = (t(w.at(a)), t(w.at(b)));
                        if space.block_of(a) == space.block_of(b) {
                            acc = acc.mul_ref(&tb.sub_ref(&ta));
                        } else {
                            acc = acc.mul_ref(&tb);
                        }
                    }
                }
                acc
            })
            .collect();
        FixedPoints {
            space,
            points,
            index,
            chi_weight,
            vandermonde,
            schubert: [OnceLock::new(), OnceLock::new()],
            pairing: OnceLock::new(),
        }
    }

    pub fn space(&self) -> &FlagSpace {
        &self.space
    }

    /// Minimal coset representatives, sorted by length.
    pub fn points(&self) -> &[Permutation] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, w: &Permutation) -> Option<usize> {
        self.index.get(w).copied()
    }

    fn index_or_err(&self, w: &Permutation) -> Result<usize, Error> {
        if w.n() != self.space.n() {
            return Err(Error::InvalidPermutation(format!("{w} does not lie in S_{}", self.space.n())));
        }
        self.index_of(w).ok_or_else(|| Error::NotMinimalRep(w.to_string()))
    }
}

/// A class in `K_T(X)` given by its restrictions to the fixed points.
#[derive(Clone, Debug)]
pub struct KClass {
    fp: &'static FixedPoints,
    values: Vec<RationalFunction>,
}

impl PartialEq for KClass {
    fn eq(&self, o: &Self) -> bool {
        (std::ptr::eq(self.fp, o.fp) || self.fp.space == o.fp.space) && self.values == o.values
    }
}

impl KClass {
    pub fn from_fn(space: &FlagSpace, f: impl FnMut(&Permutation) -> RationalFunction) -> Self {
        let fp = fixed_points(space);
        let values = fp.points.iter().map(f).collect();
        KClass { fp, values }
    }

    pub fn from_values(space: &FlagSpace, values: Vec<RationalFunction>) -> Result<Self, Error> {
        let fp = fixed_points(space);
        if values.len() != fp.len() {
            return Err(Error::OutOfRange(format!("{} values for {} fixed points", values.len(), fp.len())));
        }
        Ok(KClass { fp, values })
    }

    pub fn constant(space: &FlagSpace, c: &RationalFunction) -> Self {
        Self::from_fn(space, |_| c.clone())
    }

    /// The class of `O_X`.
    pub fn one(space: &FlagSpace) -> Self {
        Self::constant(space, &RationalFunction::one())
    }

    pub fn zero(space: &FlagSpace) -> Self {
        Self::constant(space, &RationalFunction::zero())
    }

    pub fn space(&self) -> &FlagSpace {
        &self.fp.space
    }

    pub fn fixed_points(&self) -> &'static FixedPoints {
        self.fp
    }

    pub fn values(&self) -> &[RationalFunction] {
        &self.values
    }

    pub fn at(&self, w: &Permutation) -> Option<&RationalFunction> {
        self.fp.index_of(w).map(|i| &self.values[i])
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    fn zip(&self, o: &Self, f: impl Fn(&RationalFunction, &RationalFunction) -> RationalFunction) -> Self {
        assert_eq!(self.fp.space, o.fp.space, "classes live on different spaces");
        let values = self.values.iter().zip(&o.values).map(|(a, b)| f(a, b)).collect();
        KClass { fp: self.fp, values }
    }

    fn map(&self, f: impl Fn(&RationalFunction) -> RationalFunction) -> Self {
        KClass { fp: self.fp, values: self.values.iter().map(f).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add_ref(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub_ref(b))
    }

    /// Product in `K_T(X)`: pointwise.
    pub fn mul(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.mul_ref(b))
    }

    pub fn scale(&self, c: &RationalFunction) -> Self {
        self.map(|a| a.mul_ref(c))
    }

    pub fn neg(&self) -> Self {
        self.map(|a| a.neg_ref())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.fp
                .points
                .iter()
                .zip(&self.values)
                .map(|(w, v)| serde_json::json!({ "w": w.one_line(), "value": v.to_string() }))
                .collect(),
        )
    }
}

fn check_rank(space: &FlagSpace, j: usize, l: usize, top: usize) -> Result<(), Error> {
    if j > top || l > space.n() {
        return Err(Error::OutOfRange(format!("bundle index j={j}, l={l} on {space}")));
    }
    Ok(())
}

/// `∧^ℓ S_j`, with `S_{k+1} = C^n`.
pub fn bundle_class(space: &FlagSpace, j: usize, l: usize) -> Result<KClass, Error> {
    check_rank(space, j, l, space.k() + 1)?;
    if j == 0 || l > space.rank(j) {
        return Err(Error::OutOfRange(format!("∧^{l} S_{j} on {space}")));
    }
    let r = space.rank(j);
    Ok(weights_class(space, 0, r, l))
}

/// `∧^ℓ (S_{j+1}/S_j)` for `0 <= j <= k`, with `S_0 = 0`.
pub fn bundle_quotient_class(space: &FlagSpace, j: usize, l: usize) -> Result<KClass, Error> {
    check_rank(space, j, l, space.k())?;
    let (lo, hi) = (space.rank(j), space.rank(j + 1));
    if l > hi - lo {
        return Err(Error::OutOfRange(format!("∧^{l} (S_{}/S_{j}) on {space}", j + 1)));
    }
    Ok(weights_class(space, lo, hi, l))
}

/// `e_ℓ` of the weights at positions `lo+1..=hi`.
fn weights_class(space: &FlagSpace, lo: usize, hi: usize, l: usize) -> KClass {
    KClass::from_fn(space, |w| {
        let xs: Vec<LaurentPolynomial> = (lo + 1..=hi).map(|p| t(w.at(p))).collect();
        RationalFunction::from_poly(elem_sym(l, &xs))
    })
}

/// `e_ℓ(T_1, ..., T_n)` as a scalar.
pub fn elementary_t(n: usize, l: usize) -> RationalFunction {
    let xs: Vec<LaurentPolynomial> = (1..=n).map(t).collect();
    RationalFunction::from_poly(elem_sym(l, &xs))
}

/// A bundle whose λ_y class is wanted.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Bundle {
    /// `S_j`, with `S_{k+1} = C^n`.
    Sub(usize),
    /// `S_{j+1}/S_j`.
    Quotient(usize),
}

/// `λ_y(E) = Σ y^ℓ ∧^ℓ E` as its list of coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaPoly {
    coeffs: Vec<KClass>,
}

impl LambdaPoly {
    pub fn coeffs(&self) -> &[KClass] {
        &self.coeffs
    }

    /// Coefficient of `y^ℓ`; zero above the rank.
    pub fn coeff(&self, l: usize) -> KClass {
        self.coeffs.get(l).cloned().unwrap_or_else(|| KClass::zero(self.coeffs[0].space()))
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mul(&self, o: &Self) -> Self {
        let space = self.coeffs[0].space().clone();
        let mut coeffs = vec![KClass::zero(&space); self.coeffs.len() + o.coeffs.len() - 1];
        for (a, x) in self.coeffs.iter().enumerate() {
            for (b, y) in o.coeffs.iter().enumerate() {
                coeffs[a + b] = coeffs[a + b].add(&x.mul(y));
            }
        }
        LambdaPoly { coeffs }
    }
}

pub fn lambda_y(space: &FlagSpace, which: Bundle) -> Result<LambdaPoly, Error> {
    let coeffs = match which {
        Bundle::Sub(j) => {
            check_rank(space, j, 0, space.k() + 1)?;
            (0..=space.rank(j)).map(|l| bundle_class(space, j, l)).collect::<Result<_, _>>()?
        }
        Bundle::Quotient(j) => {
            check_rank(space, j, 0, space.k())?;
            let s = space.rank(j + 1) - space.rank(j);
            (0..=s).map(|l| bundle_quotient_class(space, j, l)).collect::<Result<_, _>>()?
        }
    };
    Ok(LambdaPoly { coeffs })
}

/// Equivariant Euler characteristic `χ(X, σ) ∈ Frac K_T(pt)`.
///
/// The localization sum is put over the common denominator `∏_{p<m} (T_m - T_p)`
/// and divided out factor by factor. A surviving denominator means the input
/// was not the class of a sheaf and is logged.
pub fn euler_char(sigma: &KClass) -> RationalFunction {
    let fp = sigma.fp;
    if sigma.values.iter().all(|v| v.is_laurent()) {
        let mut num = Laurent::zero();
        for (v, wt) in sigma.values.iter().zip(&fp.chi_weight) {
            if !v.is_zero() {
                num = num.add_ref(&v.num().mul_ref(wt));
            }
        }
        let mut cur = num.clone();
        for (i, b) in fp.vandermonde.iter().enumerate() {
            match cur.div_exact(b) {
                Some(q) => cur = q,
                None => {
                    let rest = fp.vandermonde[i..].iter().fold(Laurent::one(), |acc, x| acc.mul_ref(x));
                    let r = RationalFunction::new(cur, rest).expect("nonzero Vandermonde");
                    log::warn!("Euler characteristic on {} keeps a denominator: {r}", fp.space);
                    return r;
                }
            }
        }
        return RationalFunction::from_poly(cur);
    }
    let mut acc = RationalFunction::zero();
    for (v, wt) in sigma.values.iter().zip(&fp.chi_weight) {
        acc = acc.add_ref(&v.mul_ref(&RationalFunction::from_poly(wt.clone())));
    }
    let v = fp.vandermonde.iter().fold(Laurent::one(), |a, x| a.mul_ref(x));
    let r = acc.div(&RationalFunction::from_poly(v)).expect("nonzero Vandermonde");
    if !r.is_laurent() {
        log::warn!("Euler characteristic on {} keeps a denominator: {r}", fp.space);
    }
    r
}

fn require_full(space: &FlagSpace) -> Result<(), Error> {
    if space.is_full() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("Demazure operators act on the complete flag variety, not {space}")))
    }
}

/// `(x σ(w) - y σ(w')) / (x - y)` with exact division when possible.
fn divided_difference(
    a: &RationalFunction,
    ta: &LaurentPolynomial,
    b: &RationalFunction,
    tb: &LaurentPolynomial,
) -> RationalFunction {
    let den = ta.sub_ref(tb);
    if let (Some(x), Some(y)) = (a.as_laurent(), b.as_laurent()) {
        let num = x.mul_ref(ta).sub_ref(&y.mul_ref(tb));
        if let Some(q) = num.div_exact(&den) {
            return RationalFunction::from_poly(q);
        }
        return RationalFunction::new(num, den).expect("distinct weights");
    }
    let num = a
        .mul_ref(&RationalFunction::from_poly(ta.clone()))
        .sub_ref(&b.mul_ref(&RationalFunction::from_poly(tb.clone())));
    num.div(&RationalFunction::from_poly(den)).expect("distinct weights")
}

/// The Demazure operator `∂_i = p_i^* p_{i*}` on `K_T(Fl(n))`.
pub fn demazure_op(i: usize, sigma: &KClass) -> Result<KClass, Error> {
    let space = sigma.space();
    require_full(space)?;
    let n = space.n();
    if i == 0 || i >= n {
        return Err(Error::OutOfRange(format!("∂_{i} on Fl({n})")));
    }
    let fp = sigma.fp;
    let values = fp
        .points
        .iter()
        .enumerate()
        .map(|(idx, w)| {
            let other = fp.index[&w.mul_simple(i)];
            // (σ(w) - x σ(ws_i))/(1 - x), x = T_{w(i)}/T_{w(i+1)}, cleared of T_{w(i+1)}.
            divided_difference(&sigma.values[idx], &t(w.at(i + 1)), &sigma.values[other], &t(w.at(i)))
        })
        .collect();
    Ok(KClass { fp, values })
}

/// Apply `∂_{i_1}`, then `∂_{i_2}`, ... along `word`.
pub fn demazure_word(word: &[usize], sigma: &KClass) -> Result<KClass, Error> {
    word.iter().try_fold(sigma.clone(), |acc, &i| demazure_op(i, &acc))
}

fn full_schubert(fp: &'static FixedPoints, variant: Variant) -> &'static [KClass] {
    let slot = match variant {
        Variant::B => 0,
        Variant::Opposite => 1,
    };
    fp.schubert[slot].get_or_init(|| match variant {
        Variant::B => build_b_classes(fp),
        Variant::Opposite => build_opposite_classes(fp),
    })
}

/// `O_w` for all `w ∈ S_n`, seeded by the point class at the identity and
/// built along lex-least reduced words: `O_w = ∂_{i_p} O_{w s_{i_p}}`.
fn build_b_classes(fp: &'static FixedPoints) -> Vec<KClass> {
    let n = fp.space.n();
    let mut point = Laurent::one();
    for a in 1..=n {
        for b in a + 1..=n {
            // 1 - T_a/T_b
            point = point.mul_ref(
                &Laurent::one().sub_ref(&Laurent::term(Mono::var(a - 1, 1).mul(&Mono::var(b - 1, -1)), BigInt::one())),
            );
        }
    }
    let mut seed = vec![RationalFunction::zero(); fp.len()];
    seed[0] = RationalFunction::from_poly(point);
    let mut out: Vec<Option<KClass>> = vec![None; fp.len()];
    out[0] = Some(KClass { fp, values: seed });
    for idx in 1..fp.len() {
        let w = &fp.points[idx];
        let last = *w.reduced_word().last().unwrap();
        let prev = fp.index[&w.mul_simple(last)];
        let base = out[prev].as_ref().expect("shorter classes are built first");
        out[idx] = Some(demazure_op(last, base).unwrap());
    }
    out.into_iter().map(Option::unwrap).collect()
}

/// `O^w(v) = O_{w_0 w}(w_0 v)` with `T_i ↦ T_{n+1-i}`.
fn build_opposite_classes(fp: &'static FixedPoints) -> Vec<KClass> {
    let n = fp.space.n();
    let w0 = Permutation::longest(n);
    let b = full_schubert(fp, Variant::B);
    fp.points
        .iter()
        .map(|w| {
            let src = &b[fp.index[&w0.compose(w)]];
            let values =
                fp.points.iter().map(|v| src.values[fp.index[&w0.compose(v)]].rename_vars(|i| n - 1 - i)).collect();
            KClass { fp, values }
        })
        .collect()
}

/// Schubert class `O_w` or `O^w` for a minimal coset representative `w`.
///
/// On a partial flag this is the full-flag class of the preimage, restricted
/// to the minimal representatives: `O_{w_max}` for the B variant and `O^w`
/// for the opposite one.
pub fn schubert_class(space: &FlagSpace, w: &Permutation, variant: Variant) -> Result<KClass, Error> {
    let fp = fixed_points(space);
    let idx = fp.index_or_err(w)?;
    Ok(schubert_classes(space, variant)[idx].clone())
}

/// All Schubert classes of one variant, aligned with the fixed points.
pub fn schubert_classes(space: &FlagSpace, variant: Variant) -> &'static [KClass] {
    let fp = fixed_points(space);
    if space.is_full() {
        return full_schubert(fp, variant);
    }
    let slot = match variant {
        Variant::B => 0,
        Variant::Opposite => 1,
    };
    fp.schubert[slot].get_or_init(|| {
        let full = fixed_points(&FlagSpace::full(space.n()));
        let classes = full_schubert(full, variant);
        fp.points
            .iter()
            .map(|w| {
                let label = match variant {
                    Variant::B => space.coset_max(w),
                    Variant::Opposite => w.clone(),
                };
                let src = &classes[full.index[&label]];
                let values = fp.points.iter().map(|v| src.values[full.index[v]].clone()).collect();
                KClass { fp, values }
            })
            .collect()
    })
}

/// `χ(O_u · O^v)` as a 0/1 table indexed by fixed-point positions `[u][v]`.
///
/// Panics if an entry is not 0 or 1; that would mean the localization
/// conventions are inconsistent.
pub fn schubert_pairing(space: &FlagSpace) -> &'static [Vec<bool>] {
    let fp = fixed_points(space);
    fp.pairing.get_or_init(|| {
        let b = schubert_classes(space, Variant::B);
        let o = schubert_classes(space, Variant::Opposite);
        b.iter()
            .map(|x| {
                o.iter()
                    .map(|y| {
                        let c = euler_char(&x.mul(y));
                        if c.is_zero() {
                            false
                        } else if c.is_one() {
                            true
                        } else {
                            panic!("χ(O_u O^v) = {c} on {space}, expected 0 or 1")
                        }
                    })
                    .collect()
            })
            .collect()
    })
}

/// Coordinates of `σ` in the Schubert basis of the given variant, by
/// solving the unitriangular system of pairings against the other basis.
/// Non-Laurent coordinates are logged: `σ` was not in the lattice.
pub fn expand_schubert(sigma: &KClass, variant: Variant) -> Vec<(Permutation, RationalFunction)> {
    let space = sigma.space();
    let fp = sigma.fp;
    let pairing = schubert_pairing(space);
    let dual = match variant {
        Variant::B => Variant::Opposite,
        Variant::Opposite => Variant::B,
    };
    let duals = schubert_classes(space, dual);
    let m = fp.len();
    let b: Vec<RationalFunction> = duals.iter().map(|d| euler_char(&sigma.mul(d))).collect();
    let mut c = vec![RationalFunction::zero(); m];
    match variant {
        // b_v = Σ_{u ≥ v} c_u
        Variant::B => {
            for v in (0..m).rev() {
                let mut acc = b[v].clone();
                for u in v + 1..m {
                    if pairing[u][v] {
                        acc = acc.sub_ref(&c[u]);
                    }
                }
                c[v] = acc;
            }
        }
        // b_v = Σ_{u ≤ v} c_u
        Variant::Opposite => {
            for v in 0..m {
                let mut acc = b[v].clone();
                for u in 0..v {
                    if pairing[v][u] {
                        acc = acc.sub_ref(&c[u]);
                    }
                }
                c[v] = acc;
            }
        }
    }
    if let Some(bad) = c.iter().find(|x| !x.is_laurent()) {
        log::warn!("Schubert expansion on {space} has a non-Laurent coordinate {bad}");
    }
    fp.points.iter().cloned().zip(c).collect()
}

/// Rebuild a class from Schubert coordinates.
pub fn from_schubert(space: &FlagSpace, variant: Variant, coords: &[RationalFunction]) -> KClass {
    let classes = schubert_classes(space, variant);
    let mut acc = KClass::zero(space);
    for (c, o) in coords.iter().zip(classes) {
        if !c.is_zero() {
            acc = acc.add(&o.scale(c));
        }
    }
    acc
}

/// Pull a class back along `Fl(n) → X`.
pub fn pullback(sigma: &KClass) -> KClass {
    let space = sigma.space();
    KClass::from_fn(&FlagSpace::full(space.n()), |u| sigma.at(&space.coset_min(u)).unwrap().clone())
}

/// Inverse of `pullback` on classes constant along the fibres.
pub fn descend(space: &FlagSpace, sigma: &KClass) -> Result<KClass, Error> {
    require_full(sigma.space())?;
    if sigma.space().n() != space.n() {
        return Err(Error::InvalidSpace(format!("cannot descend from Fl({}) to {space}", sigma.space().n())));
    }
    for (u, v) in sigma.fp.points.iter().zip(&sigma.values) {
        if sigma.at(&space.coset_min(u)).unwrap() != v {
            return Err(Error::Unsupported(format!("class is not pulled back from {space}")));
        }
    }
    Ok(KClass::from_fn(space, |w| sigma.at(w).unwrap().clone()))
}

/// The product `T_1 ⋯ T_m`.
pub fn weight_product(m: usize) -> RationalFunction {
    RationalFunction::from_poly((1..=m).fold(Laurent::one(), |acc, i| acc.mul_ref(&t(i))))
}

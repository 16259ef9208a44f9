//! Abstract presentations of the (quantum) K ring by Whitney-type
//! relations: ideal generators, quotient dimensions by Gröbner bases, the
//! Coulomb-branch relations, and evaluation of polynomials in the
//! generators inside the truncated quantum ring.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::groebner::{groebner_basis, standard_monomial_count, GMono, GPoly};
use crate::algebra::text::parse_with;
use crate::algebra::{Laurent, Mono, QSeries};
use crate::ktheory::{elementary_t, fixed_points, KClass};
use crate::qk::{quantum_k, wedge, wedge_quotient, GWOracle, Mutation, QKElement, QuantumK};
use crate::report::Report;
use crate::scalar::{Field, Ring};
use crate::weyl::{Degree, FlagSpace};
use crate::{Error, LaurentPolynomial, QSeriesRF, RationalFunction};

type RF = RationalFunction;
/// Coefficients of one polynomial keyed by generator exponents.
type Row = BTreeMap<Vec<i32>, RF>;

/// A named generator of the presentation ring.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Gen {
    /// `e_ℓ(X^{(j)})`.
    X(usize, usize),
    /// `e_ℓ(Y^{(j)})`.
    Y(usize, usize),
    /// `e_ℓ(X̄^{(1)})`, Coulomb auxiliary on incidence varieties.
    XBar1(usize),
    /// `X̄^{(2)}_1`, Coulomb auxiliary on incidence varieties.
    XBar2,
}

impl Gen {
    pub fn name(&self) -> String {
        match *self {
            Gen::X(j, l) => format!("eX{j}_{l}"),
            Gen::Y(j, l) => format!("eY{j}_{l}"),
            Gen::XBar1(l) => format!("eXbar1_{l}"),
            Gen::XBar2 => "Xbar2_1".to_string(),
        }
    }

    fn parse_name(s: &str) -> Option<Gen> {
        if s == "Xbar2_1" {
            return Some(Gen::XBar2);
        }
        if let Some(l) = s.strip_prefix("eXbar1_") {
            return l.parse().ok().map(Gen::XBar1);
        }
        let (ctor, rest): (fn(usize, usize) -> Gen, &str) =
            if let Some(r) = s.strip_prefix("eX") { (Gen::X, r) } else { (Gen::Y, s.strip_prefix("eY")?) };
        let (j, l) = rest.split_once('_')?;
        Some(ctor(j.parse().ok()?, l.parse().ok()?))
    }

    fn is_coulomb(&self) -> bool {
        matches!(self, Gen::XBar1(_) | Gen::XBar2)
    }
}

/// Variable slots: `T_1..T_n` first, then the generators, then `q_1..q_k`.
#[derive(Clone, Debug)]
pub struct Layout {
    space: FlagSpace,
    gens: Vec<Gen>,
    index: HashMap<Gen, usize>,
}

enum Slot {
    T,
    Gen(Gen),
    Q(usize),
}

impl Layout {
    pub fn new(space: &FlagSpace) -> Self {
        let mut gens = Vec::new();
        for j in 1..=space.k() {
            gens.extend((1..=space.rank(j)).map(|l| Gen::X(j, l)));
            gens.extend((1..=space.rank(j + 1) - space.rank(j)).map(|l| Gen::Y(j, l)));
        }
        if space.is_incidence() {
            gens.extend((1..=space.n() - 2).map(Gen::XBar1));
            gens.push(Gen::XBar2);
        }
        let index = gens.iter().enumerate().map(|(i, g)| (*g, i)).collect();
        Layout { space: space.clone(), gens, index }
    }

    /// Generators in monomial-order position, Coulomb auxiliaries last.
    pub fn gens(&self) -> &[Gen] {
        &self.gens
    }

    pub fn gen_slot(&self, g: Gen) -> Result<usize, Error> {
        self.index
            .get(&g)
            .map(|i| self.space.n() + i)
            .ok_or_else(|| Error::OutOfRange(format!("{} on {}", g.name(), self.space)))
    }

    pub fn q_slot(&self, j: usize) -> usize {
        self.space.n() + self.gens.len() + j - 1
    }

    fn classify(&self, slot: usize) -> Slot {
        let n = self.space.n();
        if slot < n {
            Slot::T
        } else if slot < n + self.gens.len() {
            Slot::Gen(self.gens[slot - n])
        } else {
            Slot::Q(slot - n - self.gens.len() + 1)
        }
    }

    pub fn slot_name(&self, slot: usize) -> String {
        match self.classify(slot) {
            Slot::T => format!("T{}", slot + 1),
            Slot::Gen(g) => g.name(),
            Slot::Q(j) => format!("q{j}"),
        }
    }

    pub fn resolve(&self, name: &str) -> Option<usize> {
        if let Some(g) = Gen::parse_name(name) {
            return self.gen_slot(g).ok();
        }
        if let Some(j) = name.strip_prefix('q') {
            let j: usize = j.parse().ok()?;
            return (1..=self.space.k()).contains(&j).then(|| self.q_slot(j));
        }
        let i: usize = name.strip_prefix('T')?.parse().ok()?;
        (1..=self.space.n()).contains(&i).then(|| i - 1)
    }
}

/// A polynomial in the generators with coefficients in `Frac(K_T(pt))(q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PresPoly {
    space: FlagSpace,
    value: RF,
}

impl PresPoly {
    pub fn from_value(space: &FlagSpace, value: RF) -> Self {
        PresPoly { space: space.clone(), value }
    }

    pub fn zero(space: &FlagSpace) -> Self {
        Self::from_value(space, RF::zero())
    }

    pub fn constant(space: &FlagSpace, c: RF) -> Self {
        Self::from_value(space, c)
    }

    pub fn gen(space: &FlagSpace, g: Gen) -> Result<Self, Error> {
        let slot = Layout::new(space).gen_slot(g)?;
        Ok(Self::from_value(space, RF::var(slot)))
    }

    pub fn q(space: &FlagSpace, j: usize) -> Self {
        Self::from_value(space, RF::var(Layout::new(space).q_slot(j)))
    }

    pub fn parse(space: &FlagSpace, s: &str) -> Result<Self, Error> {
        let layout = Layout::new(space);
        Ok(Self::from_value(space, parse_with(s, &|name| layout.resolve(name))?))
    }

    pub fn render(&self) -> String {
        let layout = Layout::new(&self.space);
        self.value.render(&|i| layout.slot_name(i))
    }

    pub fn space(&self) -> &FlagSpace {
        &self.space
    }

    pub fn value(&self) -> &RF {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_value(&self.space, self.value.add_ref(&o.value))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_value(&self.space, self.value.sub_ref(&o.value))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::from_value(&self.space, self.value.mul_ref(&o.value))
    }

    pub fn scale(&self, c: &RF) -> Self {
        Self::from_value(&self.space, self.value.mul_ref(c))
    }

    /// Set every `q_j` to zero. Requires `q` to appear only with
    /// non-negative powers and the denominator not to vanish there.
    pub fn at_q0(&self) -> Result<Self, Error> {
        let layout = Layout::new(&self.space);
        let drop_q = |p: &LaurentPolynomial| -> Result<LaurentPolynomial, Error> {
            let mut out = Laurent::zero();
            for (m, c) in p.terms() {
                let mut has_q = false;
                for (slot, &e) in m.exps().iter().enumerate() {
                    if e != 0 && matches!(layout.classify(slot), Slot::Q(_)) {
                        if e < 0 {
                            return Err(Error::Unsupported("negative power of q".into()));
                        }
                        has_q = true;
                    }
                }
                if !has_q {
                    out.add_term(m.clone(), c);
                }
            }
            Ok(out)
        };
        let num = drop_q(self.value.num())?;
        let den = drop_q(self.value.den())?;
        Ok(Self::from_value(&self.space, RF::new(num, den)?))
    }

    /// Generators occurring in the numerator or denominator.
    pub fn generators_used(&self) -> BTreeSet<Gen> {
        let layout = Layout::new(&self.space);
        let mut out = BTreeSet::new();
        for p in [self.value.num(), self.value.den()] {
            for (m, _) in p.terms() {
                for (slot, &e) in m.exps().iter().enumerate() {
                    if let (true, Slot::Gen(g)) = (e != 0, layout.classify(slot)) {
                        out.insert(g);
                    }
                }
            }
        }
        out
    }

    /// Replace generators by polynomials; `f` returns `None` to keep one.
    pub fn substitute(&self, f: impl Fn(Gen) -> Option<PresPoly>) -> Result<Self, Error> {
        let layout = Layout::new(&self.space);
        let eval = |p: &LaurentPolynomial| -> Result<RF, Error> {
            let mut acc = RF::zero();
            for (m, c) in p.terms() {
                let mut term = RF::from_poly(Laurent::constant(c.clone()));
                for (slot, &e) in m.exps().iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let base = match layout.classify(slot) {
                        Slot::Gen(g) => f(g).map(|p| p.value).unwrap_or_else(|| RF::var(slot)),
                        _ => RF::var(slot),
                    };
                    term = term.mul_ref(&base.pow(e)?);
                }
                acc = acc.add_ref(&term);
            }
            Ok(acc)
        };
        let value = eval(self.value.num())?.div(&eval(self.value.den())?)?;
        Ok(Self::from_value(&self.space, value))
    }

    /// Split the numerator by generator monomial. Coefficients are in `T`
    /// and `q` over the common denominator, which must be generator-free.
    fn by_monomial(&self, layout: &Layout) -> Result<Row, Error> {
        let ng = layout.gens.len();
        let n = self.space.n();
        if self
            .value
            .den()
            .terms()
            .any(|(m, _)| m.exps().iter().enumerate().any(|(s, &e)| e != 0 && s >= n && s < n + ng))
        {
            return Err(Error::NotComputable(format!("generator in a denominator: {}", self.render())));
        }
        let mut parts: BTreeMap<Vec<i32>, LaurentPolynomial> = BTreeMap::new();
        for (m, c) in self.value.num().terms() {
            let mut gen_exps = vec![0; ng];
            let mut rest = Vec::with_capacity(m.exps().len());
            for (slot, &e) in m.exps().iter().enumerate() {
                if slot >= n && slot < n + ng {
                    gen_exps[slot - n] = e;
                    rest.push(0);
                } else {
                    rest.push(e);
                }
            }
            parts.entry(gen_exps).or_insert_with(Laurent::zero).add_term(Mono::new(&rest), c);
        }
        parts.into_iter().map(|(k, v)| Ok((k, RF::new(v, self.value.den().clone())?))).collect()
    }
}

impl std::fmt::Display for PresPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    Classical,
    QuantumPowerSeries,
    QuantumPolynomial,
    Coulomb,
}

impl std::str::FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        serde_json::from_value(Value::String(s.to_string())).map_err(|_| Error::Parse(format!("unknown flavor {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdealSpec {
    pub flavor: Flavor,
    pub space: FlagSpace,
    pub generators: Vec<PresPoly>,
}

impl IdealSpec {
    pub fn to_json(&self) -> Value {
        json!({
            "flavor": self.flavor,
            "space": { "n": self.space.n(), "ranks": self.space.ranks },
            "generators": self.generators.iter().map(|g| g.render()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("not an ideal description: {v}"));
        let flavor: Flavor = serde_json::from_value(v["flavor"].clone()).map_err(|_| bad())?;
        let n = v["space"]["n"].as_u64().ok_or_else(bad)? as usize;
        let ranks: Vec<usize> = serde_json::from_value(v["space"]["ranks"].clone()).map_err(|_| bad())?;
        let space = FlagSpace::new(n, ranks)?;
        let generators = v["generators"]
            .as_array()
            .ok_or_else(bad)?
            .iter()
            .map(|g| PresPoly::parse(&space, g.as_str().ok_or_else(bad)?))
            .collect::<Result<_, _>>()?;
        Ok(IdealSpec { flavor, space, generators })
    }

    /// The same ideal with `q = 0`.
    pub fn at_q0(&self) -> Result<Self, Error> {
        let generators = self.generators.iter().map(|g| g.at_q0()).collect::<Result<_, _>>()?;
        Ok(IdealSpec { flavor: Flavor::Classical, space: self.space.clone(), generators })
    }
}

/// Polynomials in `y` with `PresPoly` coefficients.
type YPoly = Vec<PresPoly>;

fn y_mul(a: &YPoly, b: &YPoly) -> YPoly {
    let space = a[0].space().clone();
    let mut out = vec![PresPoly::zero(&space); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

fn y_add(a: &YPoly, b: &YPoly) -> YPoly {
    let space = a[0].space().clone();
    (0..a.len().max(b.len()))
        .map(|i| {
            let z = PresPoly::zero(&space);
            a.get(i).unwrap_or(&z).add(b.get(i).unwrap_or(&z))
        })
        .collect()
}

fn y_scale(a: &YPoly, c: &PresPoly) -> YPoly {
    a.iter().map(|x| x.mul(c)).collect()
}

fn y_shift(a: &YPoly, p: usize) -> YPoly {
    let space = a[0].space().clone();
    let mut out = vec![PresPoly::zero(&space); p];
    out.extend(a.iter().cloned());
    out
}

fn y_neg(a: &YPoly) -> YPoly {
    a.iter().map(|x| PresPoly::zero(x.space()).sub(x)).collect()
}

fn one(space: &FlagSpace) -> PresPoly {
    PresPoly::constant(space, RF::one())
}

fn gen(space: &FlagSpace, g: Gen) -> PresPoly {
    PresPoly::gen(space, g).expect("generator in layout")
}

/// `∏(1 + y X^{(j)}_ℓ)` for `0 <= j <= k+1`: `1` for `j = 0`, the torus
/// weights for `j = k+1`.
fn lambda_x(space: &FlagSpace, j: usize) -> YPoly {
    let mut out = vec![one(space)];
    if j == space.k() + 1 {
        out.extend((1..=space.n()).map(|l| PresPoly::constant(space, elementary_t(space.n(), l))));
    } else if j >= 1 {
        out.extend((1..=space.rank(j)).map(|l| gen(space, Gen::X(j, l))));
    }
    out
}

fn lambda_y(space: &FlagSpace, j: usize) -> YPoly {
    let mut out = vec![one(space)];
    out.extend((1..=space.rank(j + 1) - space.rank(j)).map(|l| gen(space, Gen::Y(j, l))));
    out
}

/// Coefficients of `y^1 .. y^top`.
fn coefficients(p: YPoly, top: usize) -> Vec<PresPoly> {
    let space = p[0].space().clone();
    (1..=top).map(|l| p.get(l).cloned().unwrap_or_else(|| PresPoly::zero(&space))).collect()
}

fn one_minus_q(space: &FlagSpace, j: usize) -> PresPoly {
    one(space).sub(&PresPoly::q(space, j))
}

fn require_incidence(space: &FlagSpace, what: &str) -> Result<usize, Error> {
    if !space.is_incidence() {
        return Err(Error::Unsupported(format!("{what} is only defined for Fl(1, n-1; n), not {space}")));
    }
    Ok(space.n())
}

pub fn ideal_generators(space: &FlagSpace, flavor: Flavor) -> Result<IdealSpec, Error> {
    let k = space.k();
    let mut generators = Vec::new();
    match flavor {
        Flavor::Classical | Flavor::QuantumPowerSeries => {
            for j in 1..=k {
                let lx = lambda_x(space, j);
                let ly = lambda_y(space, j);
                let s = ly.len() - 1;
                let mut rel = y_add(&y_mul(&lx, &ly), &y_neg(&lambda_x(space, j + 1)));
                if flavor == Flavor::QuantumPowerSeries {
                    let factor = PresPoly::q(space, j).mul(&ly[s]).value.div(&one_minus_q(space, j).value)?;
                    let diff = y_add(&lx, &y_neg(&lambda_x(space, j - 1)));
                    let extra = y_shift(&y_scale(&diff, &PresPoly::from_value(space, factor)), s);
                    rel = y_add(&rel, &extra);
                }
                generators.extend(coefficients(rel, space.rank(j + 1)));
            }
        }
        Flavor::QuantumPolynomial => {
            let n = require_incidence(space, "the polynomial quantum ideal")?;
            let x2 = lambda_x(space, 2);
            let x1 = lambda_x(space, 1);
            let r1 = y_add(
                &y_add(&y_mul(&x1, &lambda_y(space, 1)), &y_neg(&x2)),
                &y_shift(&vec![PresPoly::q(space, 1).mul(&x2[n - 1])], n - 1),
            );
            generators.extend(coefficients(r1, n - 1));
            let t = lambda_x(space, 3);
            let y2 = lambda_y(space, 2);
            let bracket = y_add(&y_add(&t, &y_neg(&x2)), &y_neg(&y_shift(&y_scale(&x1, &y2[1]), 1)));
            let r2 = y_add(&y_add(&y_mul(&x2, &y2), &y_neg(&t)), &y_scale(&bracket, &PresPoly::q(space, 2)));
            generators.extend(coefficients(r2, n));
        }
        Flavor::Coulomb => {
            let n = require_incidence(space, "the Coulomb presentation")?;
            let e_bar1 = |l: usize| -> PresPoly {
                if l == 0 {
                    one(space)
                } else if l <= n - 2 {
                    gen(space, Gen::XBar1(l))
                } else {
                    PresPoly::zero(space)
                }
            };
            let e_x2 = |l: usize| lambda_x(space, 2).get(l).cloned().unwrap_or_else(|| PresPoly::zero(space));
            let x1 = gen(space, Gen::X(1, 1));
            let xbar2 = gen(space, Gen::XBar2);
            for l in 1..n {
                let mut rel = e_bar1(l).add(&x1.mul(&e_bar1(l - 1))).sub(&e_x2(l));
                if l == n - 2 {
                    rel = rel.sub(&PresPoly::q(space, 1).mul(&e_bar1(n - 2)));
                }
                generators.push(rel);
            }
            for l in 1..=n {
                let e_t = PresPoly::constant(space, elementary_t(n, l));
                let mut rel = e_x2(l).add(&e_x2(l - 1).mul(&xbar2)).sub(&e_t);
                let q2 = PresPoly::q(space, 2);
                if l == 1 {
                    rel = rel.sub(&q2.mul(&xbar2));
                } else if l == 2 {
                    rel = rel.sub(&q2.mul(&x1).mul(&xbar2));
                }
                generators.push(rel);
            }
        }
    }
    Ok(IdealSpec { flavor, space: space.clone(), generators })
}

/// How the torus weights are treated in Gröbner computations.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Coefficients {
    /// Coefficients in `Q(T)`.
    Exact,
    /// `T_i` replaced by seeded random distinct nonzero rationals.
    Seed(u64),
}

impl std::str::FromStr for Coefficients {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        if s == "exact" {
            return Ok(Coefficients::Exact);
        }
        s.strip_prefix("seed:")
            .and_then(|x| x.parse().ok())
            .map(Coefficients::Seed)
            .ok_or_else(|| Error::Parse(format!("expected exact or seed:<u64>, got {s:?}")))
    }
}

impl std::fmt::Display for Coefficients {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coefficients::Exact => f.write_str("exact"),
            Coefficients::Seed(s) => write!(f, "seed:{s}"),
        }
    }
}

/// Distinct nonzero rationals for `T_1..T_n`.
pub fn random_weights(n: usize, seed: u64) -> Vec<BigRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<BigRational> = Vec::new();
    while out.len() < n {
        let p: i64 = rng.gen_range(1..=40) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let q: i64 = rng.gen_range(1..=9);
        let v = BigRational::new(BigInt::from(p), BigInt::from(q));
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Convert the `q = 0` generators into polynomials in the X/Y generators
/// over a field, mapping each `T`-coefficient with `conv`.
fn to_gpolys<F: Field>(
    spec: &IdealSpec,
    conv: impl Fn(&RF) -> Result<F, Error>,
) -> Result<(Vec<GPoly<F>>, usize), Error> {
    let layout = Layout::new(&spec.space);
    let nvars = layout.gens.iter().filter(|g| !g.is_coulomb()).count();
    let q0 = spec.at_q0()?;
    let mut out = Vec::new();
    for g in &q0.generators {
        let parts = g.by_monomial(&layout)?;
        let mut terms = Vec::new();
        for (exps, c) in parts {
            if exps.iter().enumerate().any(|(i, &e)| e != 0 && (i >= nvars || e < 0)) {
                return Err(Error::Unsupported(format!("{} is not a polynomial in the X/Y generators", g.render())));
            }
            let m: GMono = exps[..nvars].iter().map(|&e| e as u16).collect();
            terms.push((m, conv(&c)?));
        }
        out.push(GPoly::from_terms(nvars, terms));
    }
    Ok((out, nvars))
}

/// Dimension of the quotient by the `q = 0` ideal, as the number of
/// standard monomials of a grevlex Gröbner basis.
pub fn groebner_dimension(spec: &IdealSpec, coeffs: Coefficients) -> Result<usize, Error> {
    if spec.flavor == Flavor::Coulomb {
        return Err(Error::Unsupported("Gröbner dimension of the Coulomb ideal".into()));
    }
    let count = match coeffs {
        Coefficients::Seed(seed) => {
            let vals = random_weights(spec.space.n(), seed);
            let (gens, nvars) = to_gpolys(spec, |c| {
                c.eval(&vals, |z: &BigInt| BigRational::from_integer(z.clone()))
                    .ok_or_else(|| Error::Unsupported(format!("coefficient {c} has a pole at the chosen weights")))
            })?;
            standard_monomial_count(&groebner_basis(&gens), nvars)
        }
        Coefficients::Exact => {
            if spec.space.n() > 3 {
                return Err(Error::Unsupported("exact Gröbner coefficients are offered for n <= 3".into()));
            }
            let (gens, nvars) = to_gpolys(spec, |c| Ok(c.clone()))?;
            standard_monomial_count(&groebner_basis(&gens), nvars)
        }
    };
    count.ok_or(Error::NotZeroDimensional)
}

/// Truncated series of a coefficient in `T` and `q` over the layout.
fn coefficient_series(c: &RF, layout: &Layout, bound: u32) -> Result<QSeriesRF, Error> {
    let k = layout.space.k();
    let split = |p: &LaurentPolynomial| -> Result<QSeriesRF, Error> {
        let mut out = QSeries::zero(k, bound);
        for (m, coef) in p.terms() {
            let mut qd = vec![0u32; k];
            let mut tm = Vec::new();
            for (slot, &e) in m.exps().iter().enumerate() {
                match layout.classify(slot) {
                    Slot::T => tm.push(e),
                    Slot::Q(j) => {
                        if e < 0 {
                            return Err(Error::NotComputable("negative power of q".into()));
                        }
                        qd[j - 1] = e as u32;
                    }
                    Slot::Gen(_) if e != 0 => {
                        return Err(Error::NotComputable("generator inside a coefficient".into()));
                    }
                    Slot::Gen(_) => {}
                }
            }
            out.add_term(Degree::new(qd), &RF::from_poly(Laurent::term(Mono::new(&tm), coef.clone())));
        }
        Ok(out)
    };
    split(c.num())?.mul(&split(c.den())?.inverse()?)
}

enum Factor {
    Line(Gen),
    Other(Gen),
}

/// `Ψ(p)` in the truncated quantum ring of a space with a proven oracle.
pub fn psi_evaluate(p: &PresPoly, bound: u32) -> Result<QKElement, Error> {
    let oracle = GWOracle::for_space(p.space(), false)?;
    psi_evaluate_with(&*quantum_k(&oracle, bound)?, p)
}

/// `Ψ(p)` with a given engine. Each monomial may contain at most one
/// generator that is not a line bundle; line bundles act by quantum
/// multiplication.
pub fn psi_evaluate_with(engine: &QuantumK, p: &PresPoly) -> Result<QKElement, Error> {
    let space = engine.space().clone();
    if p.space() != &space {
        return Err(Error::InvalidSpace(format!("{} vs {}", p.space(), space)));
    }
    let layout = Layout::new(&space);
    let classify = |g: Gen| -> Result<Factor, Error> {
        match g {
            Gen::X(j, l) if l == space.rank(j) => Ok(Factor::Line(g)),
            Gen::Y(j, l) if l == space.rank(j + 1) - space.rank(j) => Ok(Factor::Line(g)),
            Gen::X(..) | Gen::Y(..) => Ok(Factor::Other(g)),
            _ => Err(Error::NotComputable(format!("{} has no image; substitute the Coulomb map first", g.name()))),
        }
    };
    let class_of = |g: Gen| -> KClass {
        match g {
            Gen::X(j, l) => wedge(&space, j, l),
            Gen::Y(j, l) => wedge_quotient(&space, j, l),
            _ => unreachable!(),
        }
    };
    let act = |g: Gen, x: &QKElement| -> Result<QKElement, Error> {
        match g {
            Gen::X(j, _) => engine.det_product(j, x),
            Gen::Y(j, _) => engine.quotient_det_product(j, x),
            _ => unreachable!(),
        }
    };
    let mut total = QKElement::zero(&space, engine.bound());
    for (exps, coef) in p.by_monomial(&layout)? {
        let mut lines = Vec::new();
        let mut others = Vec::new();
        for (i, &e) in exps.iter().enumerate() {
            if e < 0 {
                return Err(Error::NotComputable(format!("negative power of {}", layout.gens[i].name())));
            }
            for _ in 0..e {
                match classify(layout.gens[i])? {
                    Factor::Line(g) => lines.push(g),
                    Factor::Other(g) => others.push(g),
                }
            }
        }
        if others.len() > 1 {
            let names: Vec<String> = others.iter().map(|g| g.name()).collect();
            return Err(Error::NotComputable(format!(
                "product not computable with proven oracles: {}",
                names.join("*")
            )));
        }
        let base = others.pop().or_else(|| lines.pop());
        let mut x = match base {
            Some(g) => engine.element(&class_of(g)),
            None => engine.element(&KClass::one(&space)),
        };
        for g in lines {
            x = act(g, &x)?;
        }
        total = total.add(&x.mul_series(&coefficient_series(&coef, &layout, engine.bound())?)?)?;
    }
    Ok(total)
}

/// Each row's coefficients over the monomials in the generators.
fn linearize(polys: &[PresPoly]) -> Result<Vec<Row>, Error> {
    let layout = Layout::new(polys[0].space());
    polys.iter().map(|p| p.by_monomial(&layout)).collect()
}

/// Whether `f` is a `Frac(K_T(pt))(q)`-linear combination of `gens`.
fn in_linear_span(f: &PresPoly, gens: &[PresPoly]) -> Result<bool, Error> {
    let mut rows = linearize(gens)?;
    let mut target = linearize(std::slice::from_ref(f))?.pop().unwrap();
    // Row echelon form keyed by pivot monomial.
    let mut pivots: Vec<(Vec<i32>, Row)> = Vec::new();
    let reduce = |row: &mut Row, pivots: &[(Vec<i32>, Row)]| {
        for (pm, prow) in pivots {
            if let Some(c) = row.get(pm).cloned() {
                for (m, v) in prow {
                    let nv = row.get(m).cloned().unwrap_or_else(RF::zero).sub_ref(&v.mul_ref(&c));
                    if nv.is_zero() {
                        row.remove(m);
                    } else {
                        row.insert(m.clone(), nv);
                    }
                }
            }
        }
    };
    for mut row in rows.drain(..) {
        reduce(&mut row, &pivots);
        let Some((pm, pc)) = row.iter().next().map(|(m, c)| (m.clone(), c.clone())) else { continue };
        let inv = pc.try_inv().expect("nonzero pivot");
        let row: Row = row.into_iter().map(|(m, v)| (m, v.mul_ref(&inv))).collect();
        // Keep earlier pivots reduced against the new one.
        for (_, prow) in pivots.iter_mut() {
            reduce(prow, std::slice::from_ref(&(pm.clone(), row.clone())));
        }
        pivots.push((pm, row));
    }
    reduce(&mut target, &pivots);
    Ok(target.is_empty())
}

/// Substitute the Coulomb map into the Coulomb relations and check each
/// result against the quantum Whitney generators, exactly.
pub fn coulomb_equivalence(space: &FlagSpace, bound: u32, mutation: Option<Mutation>) -> Result<Report, Error> {
    let n = require_incidence(space, "the Coulomb presentation")?;
    let whitney = ideal_generators(space, Flavor::QuantumPowerSeries)?.generators;
    let coulomb = ideal_generators(space, Flavor::Coulomb)?.generators;
    let drop_q1 = mutation == Some(Mutation::DropPhiQ1Factor);
    let phi = |g: Gen| -> Option<PresPoly> {
        match g {
            Gen::XBar1(l) if l == n - 2 => {
                let y = gen(space, Gen::Y(1, l));
                Some(if drop_q1 {
                    y
                } else {
                    PresPoly::from_value(space, y.value.div(&one_minus_q(space, 1).value).unwrap())
                })
            }
            Gen::XBar1(l) => Some(gen(space, Gen::Y(1, l))),
            Gen::XBar2 => Some(PresPoly::from_value(
                space,
                gen(space, Gen::Y(2, 1)).value.div(&one_minus_q(space, 2).value).unwrap(),
            )),
            _ => None,
        }
    };
    let mut report = Report::new("coulomb", space, bound);
    let mut substituted = Vec::new();
    for (i, rel) in coulomb.iter().enumerate() {
        let (family, l) = if i < n - 1 { (1, i + 1) } else { (2, i + 2 - n) };
        let image = rel.substitute(phi)?;
        let ok = in_linear_span(&image, &whitney)?;
        if !ok {
            let psi = psi_evaluate(&image, bound)?;
            report.fail(json!({
                "relation": format!("coulomb-{family}"),
                "l": l,
                "image": image.render(),
                "psi_image_nonzero": !psi.is_zero(),
                "psi_image": psi.to_json(),
            }));
        } else {
            report.checked += 1;
        }
        substituted.push(image.render());
    }
    report.details = json!({ "substituted": substituted });
    report.config = json!({ "mutation": mutation.map(|m| m.to_string()) });
    Ok(report.finish(false))
}

/// Coset-representative count `|S_n / (S_{s_0} × ... × S_{s_k})|`.
pub fn expected_dimension(space: &FlagSpace) -> usize {
    fixed_points(space).len()
}

/// Quotient dimension at `q = 0` under each coefficient mode against the
/// number of Schubert classes.
pub fn verify_classical(space: &FlagSpace, modes: &[Coefficients]) -> Result<Report, Error> {
    let spec = ideal_generators(space, Flavor::Classical)?;
    let expected = expected_dimension(space);
    let mut report = Report::new("classical", space, 0);
    let mut dims = Vec::new();
    for &mode in modes {
        let d = groebner_dimension(&spec, mode)?;
        report.record(d == expected, || json!({ "coeffs": mode.to_string(), "dimension": d, "expected": expected }));
        dims.push(json!({ "coeffs": mode.to_string(), "dimension": d }));
    }
    report.details = json!({ "expected": expected, "dimensions": dims });
    Ok(report.finish(false))
}

/// The quantum Whitney presentation of an incidence variety: every
/// generator of both quantum ideals maps to zero, the ideals specialize to
/// the classical one at `q = 0`, the classical quotient has the right
/// dimension, and the polynomial kernel element maps to zero.
pub fn verify_presentation(space: &FlagSpace, bound: u32, modes: &[Coefficients]) -> Result<Report, Error> {
    let n = require_incidence(space, "the quantum presentation check")?;
    let mut report = Report::new("presentation", space, bound);
    let classical = ideal_generators(space, Flavor::Classical)?;
    let mut monomial_degrees = BTreeMap::new();
    for flavor in [Flavor::QuantumPowerSeries, Flavor::QuantumPolynomial] {
        let spec = ideal_generators(space, flavor)?;
        let same = spec.at_q0()?.generators.iter().zip(&classical.generators).all(|(a, b)| a == b);
        report.record(same, || json!({ "relation": "q=0", "flavor": flavor }));
        for (i, g) in spec.generators.iter().enumerate() {
            let image = psi_evaluate(g, bound)?;
            report.record(image.is_zero(), || {
                json!({ "relation": "psi", "flavor": flavor, "generator": i + 1, "text": g.render(), "image": image.to_json() })
            });
            if flavor == Flavor::QuantumPolynomial {
                record_monomial_degrees(g, bound, &mut monomial_degrees)?;
            }
        }
    }
    let kernel = PresPoly::parse(space, &format!("eX2_1 + eY2_1 - ({})", elementary_t(n, 1)))?;
    report.record(psi_evaluate(&kernel, bound)?.is_zero(), || json!({ "relation": "kernel-element" }));
    let expected = expected_dimension(space);
    for &mode in modes {
        let d = groebner_dimension(&classical, mode)?;
        let coeffs = mode.to_string();
        report.record(
            d == expected,
            || json!({ "relation": "dimension", "coeffs": coeffs, "dimension": d, "expected": expected }),
        );
    }
    let below: bool = monomial_degrees
        .values()
        .all(|d: &Value| d.as_array().is_none_or(|a| a.iter().all(|e| e.as_u64() < Some(bound as u64))));
    report.details = json!({
        "monomial_q_degrees": monomial_degrees,
        "observed_polynomial_below_truncation": below,
    });
    Ok(report.finish(false))
}

/// Largest q-degree in `Ψ` of each generator monomial, as an observation
/// on polynomiality of structure constants.
fn record_monomial_degrees(g: &PresPoly, bound: u32, out: &mut BTreeMap<String, Value>) -> Result<(), Error> {
    let layout = Layout::new(g.space());
    for (exps, _) in g.by_monomial(&layout)? {
        let mut mono = RF::one();
        for (i, &e) in exps.iter().enumerate() {
            mono = mono.mul_ref(&RF::var(g.space().n() + i).pow(e)?);
        }
        let p = PresPoly::from_value(g.space(), mono);
        let key = p.render();
        if out.contains_key(&key) {
            continue;
        }
        let image = psi_evaluate(&p, bound)?;
        let deg = image.max_q_degree().map(|d| json!(d.entries())).unwrap_or(Value::Null);
        out.insert(key, deg);
    }
    Ok(())
}

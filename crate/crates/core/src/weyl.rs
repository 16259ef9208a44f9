//! Type A Weyl group combinatorics: permutations, Bruhat order, Demazure
//! products, minimal coset representatives and the curve-neighborhood
//! elements `z_d`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::Error;

/// A permutation of `1..=n` in one-line notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<u8>);

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self, Error> {
        Permutation::from_one_line(&v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.one_line()
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((1..=n as u8).collect())
    }

    pub fn from_one_line(v: &[usize]) -> Result<Self, Error> {
        let n = v.len();
        let mut seen = vec![false; n + 1];
        for &x in v {
            if x == 0 || x > n || seen[x] {
                return Err(Error::InvalidPermutation(format!("{v:?}")));
            }
            seen[x] = true;
        }
        Ok(Permutation(v.iter().map(|&x| x as u8).collect()))
    }

    /// Longest element `w_0 = n (n-1) ... 1`.
    pub fn longest(n: usize) -> Self {
        Permutation((1..=n as u8).rev().collect())
    }

    /// The transposition exchanging `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.0.swap(a - 1, b - 1);
        p
    }

    /// Simple reflection `s_i`, `1 <= i < n`.
    pub fn simple(n: usize, i: usize) -> Self {
        Self::transposition(n, i, i + 1)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// `w(i)` for `1 <= i <= n`.
    pub fn at(&self, i: usize) -> usize {
        self.0[i - 1] as usize
    }

    pub fn one_line(&self) -> Vec<usize> {
        self.0.iter().map(|&x| x as usize).collect()
    }

    pub fn length(&self) -> usize {
        let v = &self.0;
        let mut l = 0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if v[i] > v[j] {
                    l += 1;
                }
            }
        }
        l
    }

    pub fn inverse(&self) -> Self {
        let mut out = vec![0u8; self.n()];
        for (i, &x) in self.0.iter().enumerate() {
            out[x as usize - 1] = i as u8 + 1;
        }
        Permutation(out)
    }

    /// Group product `(self * o)(i) = self(o(i))`.
    pub fn compose(&self, o: &Self) -> Self {
        Permutation(o.0.iter().map(|&x| self.0[x as usize - 1]).collect())
    }

    /// `w s_i`: swap positions `i` and `i+1`.
    pub fn mul_simple(&self, i: usize) -> Self {
        let mut p = self.clone();
        p.0.swap(i - 1, i);
        p
    }

    /// `s_i w`: swap values `i` and `i+1`.
    pub fn simple_mul(&self, i: usize) -> Self {
        Permutation(
            self.0
                .iter()
                .map(|&x| match x as usize {
                    v if v == i => (i + 1) as u8,
                    v if v == i + 1 => i as u8,
                    _ => x,
                })
                .collect(),
        )
    }

    /// `w s_i > w`.
    pub fn has_right_ascent(&self, i: usize) -> bool {
        self.0[i - 1] < self.0[i]
    }

    /// `s_i w < w`.
    pub fn has_left_descent(&self, i: usize) -> bool {
        let inv = self.inverse();
        inv.0[i - 1] > inv.0[i]
    }

    /// Lexicographically least reduced word `[i_1, ..., i_p]` with
    /// `self = s_{i_1} ... s_{i_p}`.
    pub fn reduced_word(&self) -> Vec<usize> {
        let mut w = self.clone();
        let mut word = Vec::new();
        while let Some(i) = (1..w.n()).find(|&i| w.has_left_descent(i)) {
            word.push(i);
            w = w.simple_mul(i);
        }
        word
    }

    /// Demazure product with a simple reflection on the right.
    pub fn demazure_simple(&self, i: usize) -> Self {
        if self.has_right_ascent(i) {
            self.mul_simple(i)
        } else {
            self.clone()
        }
    }

    /// Demazure product `self · o`.
    pub fn demazure(&self, o: &Self) -> Self {
        o.reduced_word().into_iter().fold(self.clone(), |acc, i| acc.demazure_simple(i))
    }

    /// Bruhat order by the tableau criterion.
    pub fn bruhat_le(&self, o: &Self) -> bool {
        let n = self.n();
        let mut a: Vec<u8> = Vec::with_capacity(n);
        let mut b: Vec<u8> = Vec::with_capacity(n);
        for k in 0..n {
            a.push(self.0[k]);
            b.push(o.0[k]);
            a.sort_unstable();
            b.sort_unstable();
            if a.iter().zip(b.iter()).any(|(x, y)| x > y) {
                return false;
            }
        }
        true
    }

    pub fn parse(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::InvalidPermutation(s.to_string());
        let v: Vec<usize> = if s.contains(',') {
            s.split(',').map(|t| t.trim().parse::<usize>().map_err(|_| bad())).collect::<Result<_, _>>()?
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad)).collect::<Result<_, _>>()?
        };
        Self::from_one_line(&v)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n() <= 9 {
            for x in &self.0 {
                write!(f, "{x}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
            f.write_str(&parts.join(","))
        }
    }
}

/// Positive root `ε_i - ε_j`, `i < j`, with support `{α_i, ..., α_{j-1}}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Root {
    pub i: usize,
    pub j: usize,
}

impl Root {
    pub fn new(i: usize, j: usize) -> Self {
        assert!(i < j, "positive root needs i < j");
        Root { i, j }
    }

    pub fn simple(i: usize) -> Self {
        Root { i, j: i + 1 }
    }

    pub fn contains_simple(&self, m: usize) -> bool {
        self.i <= m && m < self.j
    }

    /// Support as a subset of the simple roots.
    pub fn support(&self) -> std::ops::Range<usize> {
        self.i..self.j
    }

    /// `self <= o` in the root poset.
    pub fn le(&self, o: &Root) -> bool {
        o.i <= self.i && self.j <= o.j
    }

    pub fn reflection(&self, n: usize) -> Permutation {
        Permutation::transposition(n, self.i, self.j)
    }

    pub fn all(n: usize) -> Vec<Root> {
        let mut v = Vec::new();
        for i in 1..n {
            for j in i + 1..=n {
                v.push(Root { i, j });
            }
        }
        v
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}-e{}", self.i, self.j)
    }
}

/// Curve degree: a tuple of nonnegative integers, one per Novikov variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Degree(Vec<u32>);

impl Degree {
    pub fn new(v: Vec<u32>) -> Self {
        Degree(v)
    }

    pub fn zero(k: usize) -> Self {
        Degree(vec![0; k])
    }

    pub fn unit(k: usize, j: usize) -> Self {
        let mut v = vec![0; k];
        v[j] = 1;
        Degree(v)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, j: usize) -> u32 {
        self.0[j]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, o: &Self) -> Self {
        Degree(self.0.iter().zip(o.0.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn checked_sub(&self, o: &Self) -> Option<Self> {
        self.0.iter().zip(o.0.iter()).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(Degree)
    }

    pub fn le(&self, o: &Self) -> bool {
        self.0.iter().zip(o.0.iter()).all(|(a, b)| a <= b)
    }

    /// Every degree with entries in `0..=bound`, in lexicographic order.
    pub fn all_up_to(k: usize, bound: u32) -> Vec<Degree> {
        let mut out = vec![Degree(Vec::new())];
        for _ in 0..k {
            let mut next = Vec::new();
            for d in &out {
                for e in 0..=bound {
                    let mut v = d.0.clone();
                    v.push(e);
                    next.push(Degree(v));
                }
            }
            out = next;
        }
        out
    }

    pub fn parse(s: &str) -> Result<Self, Error> {
        s.split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map(Degree)
            .map_err(|_| Error::Parse(format!("bad degree {s:?}")))
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// The partial flag variety `Fl(r_1, ..., r_k; n)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct FlagSpace {
    pub n: usize,
    pub ranks: Vec<usize>,
}

impl FlagSpace {
    pub fn new(n: usize, ranks: Vec<usize>) -> Result<Self, Error> {
        if ranks.is_empty() || ranks.windows(2).any(|w| w[0] >= w[1]) || ranks[0] == 0 || *ranks.last().unwrap() >= n {
            return Err(Error::InvalidSpace(format!("n={n}, ranks={ranks:?}")));
        }
        Ok(FlagSpace { n, ranks })
    }

    /// The complete flag variety `Fl(n)`.
    pub fn full(n: usize) -> Self {
        FlagSpace { n, ranks: (1..n).collect() }
    }

    /// `Fl(1, n-1; n)`.
    pub fn incidence(n: usize) -> Self {
        FlagSpace { n, ranks: vec![1, n - 1] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_full(&self) -> bool {
        self.ranks.len() == self.n - 1
    }

    pub fn is_incidence(&self) -> bool {
        self.n >= 3 && self.ranks == [1, self.n - 1]
    }

    pub fn is_grassmannian(&self) -> bool {
        self.ranks.len() == 1
    }

    /// `r_j` with the conventions `r_0 = 0`, `r_{k+1} = n`.
    pub fn rank(&self, j: usize) -> usize {
        if j == 0 {
            0
        } else if j <= self.k() {
            self.ranks[j - 1]
        } else {
            self.n
        }
    }

    pub fn dimension(&self) -> usize {
        let mut d = self.n * (self.n - 1) / 2;
        for j in 0..=self.k() {
            let b = self.rank(j + 1) - self.rank(j);
            d -= b * (b - 1) / 2;
        }
        d
    }

    /// Block index (0-based) containing position `p` (1-based).
    pub fn block_of(&self, p: usize) -> usize {
        (0..=self.k()).find(|&j| p <= self.rank(j + 1)).unwrap()
    }

    /// Sort values within each block, ascending or descending.
    fn sort_blocks(&self, w: &Permutation, descending: bool) -> Permutation {
        let mut v = w.0.clone();
        for j in 0..=self.k() {
            let seg = &mut v[self.rank(j)..self.rank(j + 1)];
            seg.sort_unstable();
            if descending {
                seg.reverse();
            }
        }
        Permutation(v)
    }

    /// Minimal representative of `w W_P`.
    pub fn coset_min(&self, w: &Permutation) -> Permutation {
        self.sort_blocks(w, false)
    }

    /// Maximal representative of `w W_P`.
    pub fn coset_max(&self, w: &Permutation) -> Permutation {
        self.sort_blocks(w, true)
    }

    pub fn is_min_rep(&self, w: &Permutation) -> bool {
        w.n() == self.n && self.coset_min(w) == *w
    }

    /// Minimal coset representatives sorted by (length, one-line).
    pub fn min_coset_reps(&self) -> Vec<Permutation> {
        let n = self.n;
        let sizes: Vec<usize> = (0..=self.k()).map(|j| self.rank(j + 1) - self.rank(j)).collect();
        let mut out = Vec::new();
        let mut assign = vec![0usize; n];
        fn rec(
            v: usize,
            n: usize,
            sizes: &[usize],
            used: &mut [usize],
            assign: &mut [usize],
            out: &mut Vec<Vec<usize>>,
        ) {
            if v > n {
                out.push(assign.to_vec());
                return;
            }
            for b in 0..sizes.len() {
                if used[b] < sizes[b] {
                    used[b] += 1;
                    assign[v - 1] = b;
                    rec(v + 1, n, sizes, used, assign, out);
                    used[b] -= 1;
                }
            }
        }
        let mut assignments = Vec::new();
        let mut used = vec![0usize; sizes.len()];
        rec(1, n, &sizes, &mut used, &mut assign, &mut assignments);
        for a in assignments {
            // Values in increasing order fill each block left to right.
            let mut pos: Vec<usize> = (0..=self.k()).map(|j| self.rank(j)).collect();
            let mut one = vec![0usize; n];
            for (val0, &b) in a.iter().enumerate() {
                one[pos[b]] = val0 + 1;
                pos[b] += 1;
            }
            out.push(Permutation::from_one_line(&one).unwrap());
        }
        out.sort_by(|a, b| a.length().cmp(&b.length()).then_with(|| a.cmp(b)));
        out
    }

    /// Image of a positive root in `H_2(X) = Q^∨ / Q_P^∨`.
    pub fn project_root(&self, r: &Root) -> Vec<u32> {
        self.ranks.iter().map(|&rj| u32::from(r.contains_simple(rj))).collect()
    }

    /// Roots whose image is nonzero and bounded by `d`, maximal in the root
    /// poset among those.
    pub fn maximal_roots_below(&self, d: &Degree) -> Vec<Root> {
        let cands: Vec<Root> = Root::all(self.n)
            .into_iter()
            .filter(|r| {
                let p = self.project_root(r);
                p.iter().any(|&x| x > 0) && p.iter().zip(d.entries()).all(|(a, b)| a <= b)
            })
            .collect();
        let mut out: Vec<Root> =
            cands.iter().filter(|&&r| !cands.iter().any(|&o| o != r && r.le(&o))).copied().collect();
        out.sort();
        out
    }
}

impl fmt::Display for FlagSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r: Vec<String> = self.ranks.iter().map(|x| x.to_string()).collect();
        write!(f, "Fl({};{})", r.join(","), self.n)
    }
}

/// Roots `β_1, ..., β_p` with `z_d = s_{β_1} · ... · s_{β_p}`, choosing at
/// each step the maximal root with the smallest `i`.
pub fn z_d_roots(space: &FlagSpace, d: &Degree) -> Vec<Root> {
    assert_eq!(d.len(), space.k(), "degree length must equal the number of ranks");
    let mut roots = Vec::new();
    let mut cur = d.clone();
    while !cur.is_zero() {
        let beta = space.maximal_roots_below(&cur)[0];
        cur = cur.checked_sub(&Degree(space.project_root(&beta))).unwrap();
        roots.push(beta);
    }
    roots.reverse();
    roots
}

/// Demazure product of reflections in the given order.
pub fn demazure_of_roots(n: usize, roots: &[Root]) -> Permutation {
    roots.iter().fold(Permutation::identity(n), |acc, r| acc.demazure(&r.reflection(n)))
}

/// The curve-neighborhood element `z_d`. For a partial flag the result is
/// the minimal representative of its coset.
pub fn z_d(space: &FlagSpace, d: &Degree) -> Permutation {
    let z = demazure_of_roots(space.n, &z_d_roots(space, d));
    space.coset_min(&z)
}

/// `z_d` computed along every possible sequence of maximal-root choices
/// (memoized by degree). Choice independence means the set is a singleton.
pub fn z_d_all_choices(space: &FlagSpace, d: &Degree) -> BTreeSet<Permutation> {
    let mut memo: BTreeMap<Degree, BTreeSet<Permutation>> = BTreeMap::new();
    fn rec(space: &FlagSpace, d: &Degree, memo: &mut BTreeMap<Degree, BTreeSet<Permutation>>) -> BTreeSet<Permutation> {
        if d.is_zero() {
            return [Permutation::identity(space.n)].into_iter().collect();
        }
        if let Some(s) = memo.get(d) {
            return s.clone();
        }
        let mut out = BTreeSet::new();
        for beta in space.maximal_roots_below(d) {
            let rest = d.checked_sub(&Degree(space.project_root(&beta))).unwrap();
            for z in rec(space, &rest, memo) {
                out.insert(z.demazure(&beta.reflection(space.n)));
            }
        }
        memo.insert(d.clone(), out.clone());
        out
    }
    rec(space, d, &mut memo).iter().map(|z| space.coset_min(z)).collect()
}

/// Roots of `z_d` on `Fl(n)` reordered so that the ones containing `α_i`
/// come last, with growing support; the Demazure product is unchanged.
/// Returns the reordered roots and the position where that chain starts.
pub fn roots_with_chain_last(space: &FlagSpace, d: &Degree, i: usize) -> (Vec<Root>, usize) {
    let (mut rest, mut chain): (Vec<Root>, Vec<Root>) =
        z_d_roots(space, d).into_iter().partition(|r| !r.contains_simple(i));
    chain.sort_by_key(|r| r.support().len());
    let k = rest.len();
    rest.extend(chain);
    (rest, k)
}

/// `z_{d - α_i}` on `Fl(n)` when `d_i > 0` and `d_{i+1} = 0`, obtained from
/// the roots of `z_d` by shrinking the shortest root containing `α_i` to
/// end just before `α_i`. With `adjust = false` that root is dropped
/// outright instead of shrunk (used as a negative control; leaving it
/// unchanged would give `z_d`, which acts on `∧^ℓ S_{i-1}` exactly like
/// `z_{d-α_i}` and so cannot be detected).
pub fn z_d_lowered(space: &FlagSpace, d: &Degree, i: usize, adjust: bool) -> Option<Permutation> {
    let n = space.n;
    if !space.is_full() || i == 0 || i >= n || d.get(i - 1) == 0 || (i < n - 1 && d.get(i) != 0) {
        return None;
    }
    let (mut roots, k) = roots_with_chain_last(space, d, i);
    let beta = *roots.get(k)?;
    if adjust && beta.i != i {
        roots[k] = Root::new(beta.i, i);
    } else {
        roots.remove(k);
    }
    Some(demazure_of_roots(n, &roots))
}

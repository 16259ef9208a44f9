use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;
use qkwhitney::weyl::{demazure_of_roots, z_d, z_d_all_choices, z_d_roots};
use qkwhitney::{Degree, FlagSpace, Permutation, Root};

fn perm(s: &str) -> Permutation {
    Permutation::parse(s).unwrap()
}

fn all_perms(n: usize) -> Vec<Permutation> {
    FlagSpace::full(n).min_coset_reps()
}

fn deg(v: &[u32]) -> Degree {
    Degree::new(v.to_vec())
}

/// Everything below `v` in Bruhat order, by walking down along reflections
/// that drop the length.
fn bruhat_down_set(v: &Permutation) -> BTreeSet<Permutation> {
    let n = v.n();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([v.clone()]);
    seen.insert(v.clone());
    while let Some(w) = queue.pop_front() {
        for r in Root::all(n) {
            let x = w.compose(&r.reflection(n));
            if x.length() < w.length() && seen.insert(x.clone()) {
                queue.push_back(x);
            }
        }
    }
    seen
}

fn multinomial(n: usize, ranks: &[usize]) -> usize {
    let fact = |m: usize| (1..=m).product::<usize>();
    let mut prev = 0;
    let mut denom = 1;
    for &r in ranks.iter().chain(std::iter::once(&n)) {
        denom *= fact(r - prev);
        prev = r;
    }
    fact(n) / denom
}

#[test]
fn coset_representatives() {
    let fl13 = FlagSpace::new(3, vec![1]).unwrap();
    let reps: Vec<String> = fl13.min_coset_reps().iter().map(|w| w.to_string()).collect();
    assert_eq!(reps, ["123", "213", "312"]);
    assert_eq!(FlagSpace::full(3).min_coset_reps().len(), 6);
    assert_eq!(FlagSpace::new(4, vec![1, 3]).unwrap().min_coset_reps().len(), 12);
    for n in 2..=5 {
        for mask in 1..(1u32 << (n - 1)) {
            let ranks: Vec<usize> = (1..n).filter(|r| mask & (1 << (r - 1)) != 0).collect();
            let space = FlagSpace::new(n, ranks.clone()).unwrap();
            let reps = space.min_coset_reps();
            assert_eq!(reps.len(), multinomial(n, &ranks));
            // Brute-force filter of S_n by the ascent condition inside each block.
            let brute: BTreeSet<Permutation> = all_perms(n)
                .into_iter()
                .filter(|w| (1..n).filter(|i| !ranks.contains(i)).all(|i| w.has_right_ascent(i)))
                .collect();
            assert_eq!(reps.iter().cloned().collect::<BTreeSet<_>>(), brute);
        }
    }
}

#[test]
fn demazure_product_examples() {
    let s1 = Permutation::simple(3, 1);
    let s2 = Permutation::simple(3, 2);
    assert_eq!(s1.demazure(&s1), s1);
    assert_eq!(s1.demazure(&s2), s1.compose(&s2));
    let w0 = Permutation::longest(4);
    for v in all_perms(4) {
        assert_eq!(w0.demazure(&v), w0);
    }
}

#[test]
fn demazure_product_is_word_independent() {
    // Multiply letter by letter along every reduced word of v.
    fn words(v: &Permutation) -> Vec<Vec<usize>> {
        if v.length() == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for i in 1..v.n() {
            if !v.has_right_ascent(i) {
                for mut w in words(&v.mul_simple(i)) {
                    w.push(i);
                    out.push(w);
                }
            }
        }
        out
    }
    for u in all_perms(4) {
        for v in all_perms(4) {
            let expect = u.demazure(&v);
            for w in words(&v) {
                let got = w.iter().fold(u.clone(), |acc, &i| acc.demazure_simple(i));
                assert_eq!(got, expect);
            }
        }
    }
}

#[test]
fn bruhat_matches_reflection_walk() {
    for n in 2..=4 {
        for v in all_perms(n) {
            let below = bruhat_down_set(&v);
            for u in all_perms(n) {
                assert_eq!(u.bruhat_le(&v), below.contains(&u), "{u} <= {v}");
            }
        }
    }
}

#[test]
fn reduced_words_rebuild_the_permutation() {
    for w in all_perms(5) {
        let word = w.reduced_word();
        assert_eq!(word.len(), w.length());
        let rebuilt = word.iter().fold(Permutation::identity(5), |acc, &i| acc.mul_simple(i));
        assert_eq!(rebuilt, w);
    }
}

#[test]
fn z_d_small_examples() {
    let fl3 = FlagSpace::full(3);
    assert_eq!(z_d(&fl3, &deg(&[1, 0])), perm("213"));
    assert_eq!(z_d(&fl3, &deg(&[1, 1])), Permutation::longest(3));
    assert_eq!(z_d(&fl3, &deg(&[2, 0])), perm("213"));
    assert_eq!(z_d(&fl3, &deg(&[0, 0])), Permutation::identity(3));
    // A line through a point sweeps out the projective plane.
    let p2 = FlagSpace::new(3, vec![1]).unwrap();
    assert_eq!(z_d(&p2, &deg(&[1])), perm("312"));
}

fn spaces_up_to(nmax: usize) -> Vec<FlagSpace> {
    let mut out = Vec::new();
    for n in 2..=nmax {
        for mask in 1..(1u32 << (n - 1)) {
            let ranks: Vec<usize> = (1..n).filter(|r| mask & (1 << (r - 1)) != 0).collect();
            out.push(FlagSpace::new(n, ranks).unwrap());
        }
    }
    out
}

#[test]
fn z_d_is_choice_independent_and_an_involution() {
    for space in spaces_up_to(5) {
        for d in Degree::all_up_to(space.k(), 3) {
            let all = z_d_all_choices(&space, &d);
            assert_eq!(all.len(), 1, "{space} d={d}: {all:?}");
            let z = z_d(&space, &d);
            assert!(all.contains(&z));
            if space.is_full() {
                assert_eq!(z.inverse(), z, "{space} d={d}");
            }
        }
    }
}

/// Reorder the recursion's roots so that the ones containing `α_i` come
/// last with growing support, as in the factorization lemma.
fn chain_last(roots: &[Root], i: usize) -> (Vec<Root>, usize) {
    let (mut rest, mut chain): (Vec<Root>, Vec<Root>) = roots.iter().partition(|r| !r.contains_simple(i));
    chain.sort_by_key(|r| r.support().len());
    let k = rest.len();
    rest.extend(chain);
    (rest, k)
}

#[test]
fn dropping_alpha_i_from_the_chain_gives_z_of_smaller_degree() {
    for n in 3..=5 {
        let space = FlagSpace::full(n);
        for d in Degree::all_up_to(n - 1, 3) {
            for i in 1..n {
                let di = d.get(i - 1);
                let next = if i < n - 1 { d.get(i) } else { 0 };
                if di == 0 || next != 0 {
                    continue;
                }
                let roots = z_d_roots(&space, &d);
                let (ordered, k) = chain_last(&roots, i);
                assert_eq!(demazure_of_roots(n, &ordered), z_d(&space, &d));
                // Nested supports along the chain, none containing α_{i+1}.
                for w in ordered[k..].windows(2) {
                    assert!(w[0].support().start >= w[1].support().start && w[0].support().end <= w[1].support().end);
                }
                assert!(ordered.iter().all(|r| !r.contains_simple(i + 1)));
                assert!(k < ordered.len(), "some root must contain α_i");
                let mut adjusted = ordered.clone();
                let beta = adjusted[k];
                if beta.i == i {
                    adjusted.remove(k);
                } else {
                    adjusted[k] = Root::new(beta.i, i);
                }
                let mut smaller = d.entries().to_vec();
                smaller[i - 1] -= 1;
                assert_eq!(demazure_of_roots(n, &adjusted), z_d(&space, &deg(&smaller)), "n={n} d={d} i={i}");
            }
        }
    }
}

fn supports_separated(a: &Root, b: &Root) -> bool {
    let (x, y) = (a.support(), b.support());
    x.end < y.start || y.end < x.start
}

fn supports_nested(a: &Root, b: &Root) -> bool {
    let (x, y) = (a.support(), b.support());
    (x.start >= y.start && x.end <= y.end) || (y.start >= x.start && y.end <= x.end)
}

#[test]
fn reflections_commute_for_separated_or_nested_supports() {
    for n in 2..=5 {
        for a in Root::all(n) {
            for b in Root::all(n) {
                if supports_separated(&a, &b) || supports_nested(&a, &b) {
                    let (sa, sb) = (a.reflection(n), b.reflection(n));
                    assert_eq!(sa.demazure(&sb), sb.demazure(&sa), "{a} {b}");
                }
            }
        }
    }
}

#[test]
fn adjacent_disjoint_supports_need_not_commute() {
    // Disjoint but adjacent supports: s_1 · s_2 != s_2 · s_1.
    let (a, b) = (Root::simple(1), Root::simple(2));
    assert!(a.support().end <= b.support().start);
    let (sa, sb) = (a.reflection(3), b.reflection(3));
    assert_ne!(sa.demazure(&sb), sb.demazure(&sa));
}

fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Permutation::from_one_line(&v).unwrap())
}

proptest! {
    #[test]
    fn demazure_product_is_associative(a in perm_strategy(6), b in perm_strategy(6), c in perm_strategy(6)) {
        prop_assert_eq!(a.demazure(&b).demazure(&c), a.demazure(&b.demazure(&c)));
    }

    #[test]
    fn demazure_product_dominates_both_factors(a in perm_strategy(5), b in perm_strategy(5)) {
        let p = a.demazure(&b);
        prop_assert!(a.bruhat_le(&p));
        prop_assert!(b.bruhat_le(&p));
        prop_assert!(p.length() <= a.length() + b.length());
    }

    #[test]
    fn length_counts_inversions(a in perm_strategy(7)) {
        let v = a.one_line();
        let inv = (0..7).flat_map(|i| (i + 1..7).map(move |j| (i, j))).filter(|&(i, j)| v[i] > v[j]).count();
        prop_assert_eq!(a.length(), inv);
    }
}

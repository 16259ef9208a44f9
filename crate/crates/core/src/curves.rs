//! Curve neighborhoods `Γ_d` of Schubert varieties and the class-level
//! operator `σ ↦ σ[d] = ∂_{z_d}(σ)`.

use serde::Serialize;

use crate::ktheory::{demazure_word, descend, pullback, KClass};
use crate::weyl::{demazure_of_roots, z_d_roots, Degree, FlagSpace, Permutation};
use crate::Error;

fn check_degree(space: &FlagSpace, d: &Degree) -> Result<(), Error> {
    if d.len() != space.k() {
        return Err(Error::OutOfRange(format!("degree {d} has {} entries, {space} needs {}", d.len(), space.k())));
    }
    Ok(())
}

/// `z_d` as an element of `S_n` before projecting to the coset.
pub fn z_d_full(space: &FlagSpace, d: &Degree) -> Permutation {
    demazure_of_roots(space.n(), &z_d_roots(space, d))
}

/// Label of `Γ_d(X_w)`: the minimal representative of `w_max · z_d`
/// (Demazure product).
pub fn curve_neighborhood_schubert(space: &FlagSpace, w: &Permutation, d: &Degree) -> Result<Permutation, Error> {
    check_degree(space, d)?;
    if !space.is_min_rep(w) {
        return Err(Error::NotMinimalRep(w.to_string()));
    }
    Ok(space.coset_min(&space.coset_max(w).demazure(&z_d_full(space, d))))
}

/// Longest element of the parabolic subgroup fixing the flag type.
fn longest_parabolic(space: &FlagSpace) -> Permutation {
    space.coset_max(&Permutation::identity(space.n()))
}

/// `σ[d] = ∂_{z_d}(σ)`. Classes on a partial flag are pulled back to
/// `Fl(n)`, moved there, symmetrized along the fibres and pushed back.
pub fn class_neighborhood(sigma: &KClass, d: &Degree) -> Result<KClass, Error> {
    let space = sigma.space().clone();
    check_degree(&space, d)?;
    let word = z_d_full(&space, d).reduced_word();
    if space.is_full() {
        return demazure_word(&word, sigma);
    }
    let moved = demazure_word(&word, &pullback(sigma))?;
    let sym = demazure_word(&longest_parabolic(&space).reduced_word(), &moved)?;
    descend(&space, &sym)
}

/// Closed form on `Fl(1, n-1; n)`: `p_1^{-1} p_1(X_w)` when only `d_2 > 0`,
/// `p_2^{-1} p_2(X_w)` when only `d_1 > 0`, all of `X` when both are.
pub fn incidence_neighborhood(n: usize, w: &Permutation, d: &Degree) -> Result<Permutation, Error> {
    let space = FlagSpace::incidence(n);
    check_degree(&space, d)?;
    if !space.is_min_rep(w) {
        return Err(Error::NotMinimalRep(w.to_string()));
    }
    let through = |rank: usize| {
        let image = FlagSpace::new(n, vec![rank]).unwrap();
        space.coset_min(&image.coset_max(w))
    };
    Ok(match (d.get(0) > 0, d.get(1) > 0) {
        (false, false) => w.clone(),
        (false, true) => through(1),
        (true, false) => through(n - 1),
        (true, true) => space.coset_min(&Permutation::longest(n)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NeighborhoodRow {
    pub w: Permutation,
    pub d: Degree,
    pub label: Permutation,
}

/// Rows `(w, d, label of Γ_d(X_w))` for every Schubert variety and every
/// degree with entries at most `bound`.
pub fn neighborhood_table(space: &FlagSpace, bound: u32) -> Vec<NeighborhoodRow> {
    let mut rows = Vec::new();
    for w in space.min_coset_reps() {
        for d in Degree::all_up_to(space.k(), bound) {
            let label = curve_neighborhood_schubert(space, &w, &d).unwrap();
            rows.push(NeighborhoodRow { w: w.clone(), d, label });
        }
    }
    rows
}

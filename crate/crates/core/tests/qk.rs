use num_traits::{One, Zero};
use qkwhitney::ktheory::{bundle_class, euler_char, schubert_class, schubert_classes, KClass, Variant};
use qkwhitney::qk::{
    conjectural_product_fln, gw2, gw3_divisor, quantum_gram, quantum_k, verify_determinant_relation,
    verify_flag_reduction, verify_qk_whitney, wedge, Divisor, GWOracle, LineClass, Mutation, OracleMode, QKElement,
};
use qkwhitney::report::Status;
use qkwhitney::scalar::Ring;
use qkwhitney::{Degree, FlagSpace, Permutation, RationalFunction};

fn deg(v: &[u32]) -> Degree {
    Degree::new(v.to_vec())
}

#[test]
fn two_point_invariants() {
    let space = FlagSpace::incidence(3);
    let one = KClass::one(&space);
    let det2 = bundle_class(&space, 2, 2).unwrap();
    for w in space.min_coset_reps() {
        for d in Degree::all_up_to(2, 2) {
            assert!(gw2(&one, &w, &d).unwrap().is_one());
            let v = gw2(&det2, &w, &d).unwrap();
            if d.get(1) > 0 {
                assert!(v.is_zero(), "w={w} d={d}: {v}");
            }
            assert!(v.is_laurent());
        }
        let ow = schubert_class(&space, &w, Variant::B).unwrap();
        let s1 = bundle_class(&space, 1, 1).unwrap();
        assert_eq!(gw2(&s1, &w, &deg(&[0, 0])).unwrap(), euler_char(&s1.mul(&ow)));
    }
}

#[test]
fn three_point_branches() {
    let space = FlagSpace::incidence(4);
    let oracle = GWOracle::new(&space, OracleMode::IncidenceProven).unwrap();
    let sigma = bundle_class(&space, 2, 2).unwrap();
    let det2 = LineClass::from(Divisor::Det(2));
    let opp1 = LineClass::from(Divisor::Opposite(1));
    for w in space.min_coset_reps() {
        for d in Degree::all_up_to(2, 2) {
            let a = gw3_divisor(&oracle, &det2, &sigma, &w, &d).unwrap();
            if d.get(1) > 0 {
                assert!(a.is_zero());
            }
            let b = gw3_divisor(&oracle, &opp1, &sigma, &w, &d).unwrap();
            if d.get(0) > 0 {
                assert_eq!(b, gw2(&sigma, &w, &d).unwrap());
            }
            assert!(a.is_laurent() && b.is_laurent());
            if d.is_zero() {
                let ow = schubert_class(&space, &w, Variant::B).unwrap();
                let l = Divisor::Det(2).class(&space).unwrap();
                assert_eq!(a, euler_char(&l.mul(&sigma).mul(&ow)));
            }
        }
    }
    // A constant first argument reduces to the two-point invariant.
    let w = Permutation::identity(4);
    let c = LineClass::constant(RationalFunction::from_i64(3));
    let d = deg(&[1, 1]);
    assert_eq!(
        gw3_divisor(&oracle, &c, &sigma, &w, &d).unwrap(),
        gw2(&sigma, &w, &d).unwrap().mul_ref(&RationalFunction::from_i64(3))
    );
}

#[test]
fn oracle_modes_are_tied_to_spaces() {
    assert!(GWOracle::new(&FlagSpace::full(4), OracleMode::IncidenceProven).is_err());
    assert!(GWOracle::new(&FlagSpace::incidence(4), OracleMode::FullFlagConjectural).is_err());
    assert!(GWOracle::for_space(&FlagSpace::full(4), false).is_err());
    let full = GWOracle::for_space(&FlagSpace::full(4), true).unwrap();
    assert!(full.is_conditional());
    assert!(!GWOracle::new(&FlagSpace::full(3), OracleMode::FullFlagConjectural).unwrap().is_conditional());
    let grass = GWOracle::for_space(&FlagSpace::new(4, vec![2]).unwrap(), false).unwrap();
    assert_eq!(grass.mode(), OracleMode::GrassmannianProven);
    // The opposite divisor is not licensed by the conjectural formula.
    let sigma = KClass::one(&FlagSpace::full(4));
    let l = LineClass::from(Divisor::Opposite(1));
    assert!(gw3_divisor(&full, &l, &sigma, &Permutation::identity(4), &deg(&[0, 0, 0])).is_err());
}

#[test]
fn quantum_gram_has_a_unitriangular_constant_term() {
    for space in [FlagSpace::incidence(3), FlagSpace::incidence(4), FlagSpace::full(4)] {
        let g = quantum_gram(&space, 2);
        let points = space.min_coset_reps();
        for (i, w) in points.iter().enumerate() {
            for (j, v) in points.iter().enumerate() {
                let c = g[i][j].constant_term();
                assert_eq!(c.is_one(), v.bruhat_le(w), "{space} {w} {v}");
                assert!(c.is_one() || c.is_zero());
                for (d, x) in g[i][j].terms() {
                    assert!(d.entries().iter().all(|&e| e <= 2));
                    assert!(x.is_one());
                }
            }
            assert!(g[i][i].constant_term().is_one());
        }
    }
}

#[test]
fn whitney_relations_hold_on_incidence_varieties() {
    for n in [3, 4] {
        let report = verify_qk_whitney(&FlagSpace::incidence(n), 2, None).unwrap();
        assert_eq!(report.status, Status::Pass, "n={n}: {:?}", &report.witnesses[..report.witnesses.len().min(3)]);
        assert!(report.checked > 100);
    }
}

#[test]
fn dropping_the_q2_correction_fails_with_a_witness() {
    let report = verify_qk_whitney(&FlagSpace::incidence(3), 2, Some(Mutation::DropQ2InRel2)).unwrap();
    assert_eq!(report.status, Status::Fail);
    assert!(report.witnesses.iter().all(|w| w["relation"] == "rel2"));
    let top = report.witnesses.iter().find(|w| w["y_power"] == 3).expect("the top power of y fails");
    assert_eq!(top["d"], serde_json::json!([0, 1]));
}

#[test]
fn determinant_relation_from_the_quantum_pairing() {
    for space in [
        FlagSpace::incidence(3),
        FlagSpace::incidence(4),
        FlagSpace::new(3, vec![1]).unwrap(),
        FlagSpace::new(4, vec![2]).unwrap(),
    ] {
        let oracle = GWOracle::for_space(&space, false).unwrap();
        let engine = quantum_k(&oracle, 2).unwrap();
        let report = verify_determinant_relation(&engine).unwrap();
        assert_eq!(report.status, Status::Pass, "{space}: {:?}", report.witnesses);
    }
}

#[test]
fn products_specialize_to_classical_products() {
    let space = FlagSpace::incidence(4);
    let engine = quantum_k(&GWOracle::for_space(&space, false).unwrap(), 2).unwrap();
    for d in [Divisor::Det(1), Divisor::Det(2), Divisor::Opposite(1), Divisor::Opposite(2)] {
        let l = d.class(&space).unwrap();
        for o in schubert_classes(&space, Variant::B) {
            let p = engine.divisor_product(d, &engine.element(o)).unwrap();
            assert_eq!(p.at_q0(), l.mul(o));
        }
    }
}

#[test]
fn determinant_products_commute() {
    let space = FlagSpace::incidence(4);
    let engine = quantum_k(&GWOracle::for_space(&space, false).unwrap(), 2).unwrap();
    let d1 = engine.element(&wedge(&space, 1, 1));
    let d2 = engine.element(&wedge(&space, 2, 3));
    let a = engine.det_product(1, &d2).unwrap();
    let b = engine.det_product(2, &d1).unwrap();
    assert_eq!(a, b);
    // The q = 0 part of a quantum square is the classical square.
    let sq = engine.det_product(1, &d1).unwrap();
    assert_eq!(sq.at_q0(), wedge(&space, 1, 1).mul(&wedge(&space, 1, 1)));
}

#[test]
fn solving_undoes_the_product() {
    let space = FlagSpace::incidence(3);
    let engine = quantum_k(&GWOracle::for_space(&space, false).unwrap(), 2).unwrap();
    for o in schubert_classes(&space, Variant::Opposite) {
        let x = engine.element(o);
        let y = engine.divisor_product(Divisor::Det(2), &x).unwrap();
        assert_eq!(engine.divisor_solve(Divisor::Det(2), &y).unwrap(), x);
    }
}

#[test]
fn elements_round_trip_and_reject_mismatches() {
    let space = FlagSpace::incidence(3);
    let s1 = bundle_class(&space, 1, 1).unwrap();
    let x = QKElement::from_class(&s1, 2);
    assert_eq!(x.at_q0(), s1);
    let y = QKElement::from_class(&s1, 1);
    assert!(x.add(&y).is_err());
    assert!(x.sub(&x).unwrap().is_zero());
    let json = x.to_json();
    assert_eq!(json["basis"], "O^w");
    assert!(x.max_q_degree().unwrap().is_zero());
}

#[test]
fn flag_reduction_identities() {
    let report = verify_flag_reduction(4, 2, None).unwrap();
    assert_eq!(report.status, Status::Pass, "{:?}", &report.witnesses[..report.witnesses.len().min(3)]);
    assert!(report.checked > 1000);
    let mutated = verify_flag_reduction(4, 2, Some(Mutation::SkipRootAdjustment)).unwrap();
    assert_eq!(mutated.status, Status::Fail);
    assert!(mutated.witnesses.iter().all(|w| w["relation"] == "lowered-degree"));
    assert!(mutated.witnesses.iter().any(|w| w["n"] == 4 && w["d"] == serde_json::json!([1, 1, 0]) && w["i"] == 2));
}

#[test]
fn conditional_full_flag_products() {
    let (report, table) = conjectural_product_fln(4, 2).unwrap();
    assert_eq!(report.status, Status::ConditionalPass, "{:?}", &report.witnesses[..report.witnesses.len().min(3)]);
    assert!(report.conditional);
    assert_eq!(table.len(), 3 * 24);
    // The smallest instance of the determinant relation.
    let space = FlagSpace::full(4);
    let engine = quantum_k(&GWOracle::for_space(&space, true).unwrap(), 2).unwrap();
    let quotient = wedge(&space, 2, 1).sub(&wedge(&space, 1, 1));
    let lhs = engine.det_product(1, &engine.element(&quotient)).unwrap();
    let rhs = engine.element(&wedge(&space, 2, 2)).mul_series(&engine.one_minus_q(1)).unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn conditional_mode_on_fl3_matches_the_incidence_engine() {
    let space = FlagSpace::full(3);
    let (report, _) = conjectural_product_fln(3, 2).unwrap();
    assert_eq!(report.status, Status::Pass);
    let conj = quantum_k(&GWOracle::new(&space, OracleMode::FullFlagConjectural).unwrap(), 2).unwrap();
    let inc = quantum_k(&GWOracle::new(&space, OracleMode::IncidenceProven).unwrap(), 2).unwrap();
    for j in 1..=2 {
        assert_eq!(conj.product_matrix(Divisor::Det(j)).unwrap(), inc.product_matrix(Divisor::Det(j)).unwrap());
    }
}

#[test]
fn mutation_names_round_trip() {
    for m in [Mutation::DropQ2InRel2, Mutation::SkipRootAdjustment, Mutation::DropPhiQ1Factor] {
        assert_eq!(m.to_string().parse::<Mutation>().unwrap(), m);
    }
    assert!("nonsense".parse::<Mutation>().is_err());
}

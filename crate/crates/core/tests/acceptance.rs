//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::time::{Duration, Instant};

use qkwhitney::curves::{curve_neighborhood_schubert, incidence_neighborhood};
use qkwhitney::ktheory::{demazure_op, demazure_word, euler_char, schubert_class, schubert_classes, KClass, Variant};
use qkwhitney::presentation::{
    coulomb_equivalence, groebner_dimension, ideal_generators, psi_evaluate, Coefficients, Flavor, PresPoly,
};
use qkwhitney::qk::{
    conjectural_product_fln, quantum_k, verify_determinant_relation, verify_flag_reduction, verify_qk_whitney, wedge,
    GWOracle, Mutation,
};
use qkwhitney::report::{Report, Status};
use qkwhitney::weyl::{z_d, z_d_all_choices};
use qkwhitney::{Degree, FlagSpace, RationalFunction};

type Outcome = Result<String, String>;

/// Id, name, optional time limit in seconds, check.
type Criterion = (&'static str, &'static str, Option<u64>, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn report_ok(r: &Report, want: Status) -> Result<(), String> {
    ensure(r.status == want, format!("{} {:?}: {:?}", r.check, r.status, &r.witnesses[..r.witnesses.len().min(2)]))
}

fn all_spaces(nmax: usize) -> Vec<FlagSpace> {
    let mut out = Vec::new();
    for n in 2..=nmax {
        for mask in 1..(1u32 << (n - 1)) {
            out.push(FlagSpace::new(n, (1..n).filter(|r| mask & (1 << (r - 1)) != 0).collect()).unwrap());
        }
    }
    out
}

fn classical_rank() -> Outcome {
    let cases = [
        (FlagSpace::full(3), 6),
        (FlagSpace::new(3, vec![1]).unwrap(), 3),
        (FlagSpace::incidence(4), 12),
        (FlagSpace::new(4, vec![2]).unwrap(), 6),
    ];
    for (space, want) in &cases {
        let spec = ideal_generators(space, Flavor::Classical).map_err(|e| e.to_string())?;
        ensure(space.min_coset_reps().len() == *want, format!("{space} has {} cosets", space.min_coset_reps().len()))?;
        for seed in [0, 1] {
            let d = groebner_dimension(&spec, Coefficients::Seed(seed)).map_err(|e| e.to_string())?;
            ensure(d == *want, format!("{space} seed {seed}: dimension {d}, expected {want}"))?;
        }
    }
    Ok("dimensions 6, 3, 12, 6 under two seeds".into())
}

fn demazure_engine() -> Outcome {
    let mut checked = 0;
    for n in 2..=4 {
        let space = FlagSpace::full(n);
        let points = space.min_coset_reps();
        let mut inputs: Vec<KClass> = schubert_classes(&space, Variant::B).to_vec();
        inputs.extend(
            points.iter().map(|u| schubert_class(&space, u, Variant::Opposite).unwrap().mul(&wedge(&space, 1, 1))),
        );
        for s in &inputs {
            for i in 1..n {
                let d = demazure_op(i, s).map_err(|e| e.to_string())?;
                ensure(demazure_op(i, &d).unwrap() == d, format!("n={n}: ∂_{i} is not idempotent"))?;
                if i + 1 < n {
                    let a = demazure_word(&[i, i + 1, i], s).unwrap();
                    ensure(
                        a == demazure_word(&[i + 1, i, i + 1], s).unwrap(),
                        format!("n={n}: braid relation at {i}"),
                    )?;
                }
                for j in i + 2..n {
                    ensure(
                        demazure_word(&[i, j], s).unwrap() == demazure_word(&[j, i], s).unwrap(),
                        format!("n={n}: {i}, {j} do not commute"),
                    )?;
                }
                checked += 1;
            }
        }
        for u in &points {
            let ou = schubert_class(&space, u, Variant::B).unwrap();
            for i in 1..n {
                let want = schubert_class(&space, &u.demazure_simple(i), Variant::B).unwrap();
                ensure(demazure_op(i, &ou).unwrap() == want, format!("n={n}: ∂_{i} O_{u}"))?;
            }
            for variant in [Variant::B, Variant::Opposite] {
                let c = schubert_class(&space, u, variant).unwrap();
                ensure(euler_char(&c) == RationalFunction::from_i64(1), format!("n={n}: χ(O_{u}) != 1"))?;
            }
        }
    }
    Ok(format!("{checked} operator applications on Fl(2..4)"))
}

fn curve_neighborhoods() -> Outcome {
    let mut degrees = 0;
    for space in all_spaces(5) {
        for d in Degree::all_up_to(space.k(), 3) {
            let all = z_d_all_choices(&space, &d);
            ensure(all.len() == 1 && all.contains(&z_d(&space, &d)), format!("{space} d={d}: {all:?}"))?;
            degrees += 1;
        }
    }
    for n in [3, 4] {
        let space = FlagSpace::incidence(n);
        for w in space.min_coset_reps() {
            for d in Degree::all_up_to(2, 2) {
                let a = curve_neighborhood_schubert(&space, &w, &d).map_err(|e| e.to_string())?;
                let b = incidence_neighborhood(n, &w, &d).map_err(|e| e.to_string())?;
                ensure(a == b, format!("n={n} w={w} d={d}: {a} vs {b}"))?;
            }
        }
    }
    Ok(format!("{degrees} (space, degree) pairs; closed form on n = 3, 4"))
}

fn lowered_degree() -> Outcome {
    let r = verify_flag_reduction(4, 2, None).map_err(|e| e.to_string())?;
    report_ok(&r, Status::Pass)?;
    Ok(format!("{} identities on Fl(3), Fl(4)", r.checked))
}

fn whitney_relations() -> Outcome {
    let mut total = 0;
    for n in [3, 4] {
        let r = verify_qk_whitney(&FlagSpace::incidence(n), 2, None).map_err(|e| e.to_string())?;
        report_ok(&r, Status::Pass)?;
        total += r.checked;
    }
    Ok(format!("{total} coefficient identities, n = 3, 4, D = 2"))
}

fn determinant_relation() -> Outcome {
    for n in [3, 4] {
        let oracle = GWOracle::for_space(&FlagSpace::incidence(n), false).map_err(|e| e.to_string())?;
        let engine = quantum_k(&oracle, 2).map_err(|e| e.to_string())?;
        report_ok(&verify_determinant_relation(&engine).map_err(|e| e.to_string())?, Status::Pass)?;
    }
    Ok("n = 3, 4, D = 2".into())
}

fn golden_fl3() -> Outcome {
    let space = FlagSpace::full(3);
    let expected = [
        "eX1_1 + eY1_1 - eX2_1",
        "eX1_1*eY1_1 - (1 - q1)*eX2_2",
        "(1 - q2)*(eX2_1 + eY2_1 - (T1 + T2 + T3))",
        "(eX2_1 - q2*eX1_1)*eY2_1 - (1 - q2)*(T1*T2 + T1*T3 + T2*T3 - eX2_2)",
        "eX2_2*eY2_1 - (1 - q2)*T1*T2*T3",
    ];
    let spec = ideal_generators(&space, Flavor::QuantumPolynomial).map_err(|e| e.to_string())?;
    ensure(spec.generators.len() == 5, format!("{} generators", spec.generators.len()))?;
    for (i, (got, want)) in spec.generators.iter().zip(expected).enumerate() {
        let want = PresPoly::parse(&space, want).map_err(|e| e.to_string())?;
        ensure(got == &want, format!("generator {}: {got}", i + 1))?;
        ensure(
            psi_evaluate(got, 2).map_err(|e| e.to_string())?.is_zero(),
            format!("generator {} has nonzero image", i + 1),
        )?;
    }
    let kernel = PresPoly::parse(&space, "eX2_1 + eY2_1 - T1 - T2 - T3").unwrap();
    ensure(psi_evaluate(&kernel, 2).map_err(|e| e.to_string())?.is_zero(), "kernel element has nonzero image")?;
    Ok("five generators and the kernel element map to zero".into())
}

fn coulomb() -> Outcome {
    for n in [3, 4] {
        report_ok(&coulomb_equivalence(&FlagSpace::incidence(n), 2, None).map_err(|e| e.to_string())?, Status::Pass)?;
    }
    Ok("n = 3, 4".into())
}

fn conditional_full_flag() -> Outcome {
    let n = 4;
    let (r, table) = conjectural_product_fln(n, 2).map_err(|e| e.to_string())?;
    report_ok(&r, Status::ConditionalPass)?;
    let assoc = (n - 1).pow(3);
    Ok(format!("{} identities incl. {assoc} associativity triples, {} table rows", r.checked, table.len()))
}

fn negative_controls() -> Outcome {
    let runs = [
        verify_qk_whitney(&FlagSpace::incidence(3), 2, Some(Mutation::DropQ2InRel2)),
        verify_flag_reduction(4, 2, Some(Mutation::SkipRootAdjustment)),
        coulomb_equivalence(&FlagSpace::incidence(4), 2, Some(Mutation::DropPhiQ1Factor)),
    ];
    let mut counts = Vec::new();
    for r in runs {
        let r = r.map_err(|e| e.to_string())?;
        ensure(r.status == Status::Fail && !r.witnesses.is_empty(), format!("{} did not fail", r.check))?;
        counts.push(format!("{}: {}", r.check, r.witnesses.len()));
    }
    Ok(format!("witnesses {}", counts.join(", ")))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1", "classical presentation rank", Some(30), classical_rank),
        ("2", "Demazure and Schubert engine", Some(60), demazure_engine),
        ("3", "curve neighborhoods", None, curve_neighborhoods),
        ("4", "lowered-degree Demazure identity", None, lowered_degree),
        ("5", "quantum Whitney relations on incidence varieties", Some(300), whitney_relations),
        ("6", "determinant relation from the quantum pairing", None, determinant_relation),
        ("7", "Fl(3) golden generators", None, golden_fl3),
        ("8", "Coulomb equivalence", None, coulomb),
        ("9", "full-flag products, conditional", None, conditional_full_flag),
        ("10", "negative controls", None, negative_controls),
    ];
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(s)) if took > Duration::from_secs(s) => Err(format!("took {took:.1?}, limit {s} s")),
            (o, _) => o,
        };
        let tag = if id == "9" { " [CONDITIONAL]" } else { "" };
        match outcome {
            Ok(msg) => println!("PASS{tag} {id:>2} {name}: {msg} ({took:.2?})"),
            Err(msg) => {
                failed += 1;
                println!("FAIL{tag} {id:>2} {name}: {msg} ({took:.2?})");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

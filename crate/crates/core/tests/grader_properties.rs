use proptest::prelude::*;
use varcomp::grader::{grade_continuous, CandidateDesign, ContinuousCandidate, ContinuousClaims, GradeConfig};
use varcomp::switched::{brute_force_design, design_minimax, CompensationProblem};
use varcomp::Tolerance;

fn problem() -> impl Strategy<Value = CompensationProblem> {
    (50.0f64..500.0, prop::sample::select(vec![50.0, 60.0]), 10.0f64..1000.0, -100.0f64..100.0, 1.0f64..200.0)
        .prop_map(|(v_rms, frequency, p_d, q_min, w)| CompensationProblem { v_rms, frequency, p_d, q_min, q_max: q_min + w })
}

fn candidate(design: CandidateDesign, claims: ContinuousClaims) -> ContinuousCandidate {
    ContinuousCandidate {
        schema_version: 1,
        provenance: None,
        design,
        capacitor_sign_convention: Default::default(),
        claims,
        points: Vec::new(),
        markers: Default::default(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn oracle_design_grades_clean(p in problem()) {
        let d = design_minimax(&p).unwrap();
        let c = candidate(
            CandidateDesign { x_l: d.x_l, x_c: d.x_c, threshold: d.threshold },
            ContinuousClaims {
                unity_points: Some(d.unity_points),
                worst_abs_qs: Some(d.worst_abs_qs),
                worst_pf: Some(d.worst_pf),
                optimal: Some(true),
                ..Default::default()
            },
        );
        let r = grade_continuous(&c, &p, &GradeConfig::default()).unwrap();
        prop_assert!(r.is_clean(), "{}", r.to_text());
        prop_assert_eq!(r.optimality_gap, Some(0.0));
    }

    #[test]
    fn gap_is_nonnegative_and_zero_only_within_tolerance(
        p in problem(),
        shift in -0.5f64..0.5,
        scale_l in 0.5f64..2.0,
        scale_c in 0.5f64..2.0,
    ) {
        let d = design_minimax(&p).unwrap();
        let c = candidate(
            CandidateDesign {
                x_l: d.x_l.map(|x| x * scale_l),
                x_c: d.x_c.map(|x| x * scale_c),
                threshold: d.threshold.map(|t| t + shift * p.width()),
            },
            ContinuousClaims::default(),
        );
        let config = GradeConfig::default();
        let r = grade_continuous(&c, &p, &config).unwrap();
        let gap = r.optimality_gap.unwrap();
        prop_assert!(gap >= 0.0);
        let achieved = varcomp::switched::evaluate(&c.to_solution(&p).unwrap(), &p).unwrap().worst_pf;
        let within = Tolerance::relative(config.pf_rel).close(achieved, d.worst_pf);
        prop_assert_eq!(gap == 0.0, within, "gap {} achieved {} oracle {}", gap, achieved, d.worst_pf);
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let p = CompensationProblem { v_rms: 100.0, frequency: 60.0, p_d: 50.0, q_min: -36.0, q_max: 60.0 };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let brute = brute_force_design(&p, 0.5).unwrap();
            let c = candidate(
                CandidateDesign { x_l: brute.x_l, x_c: brute.x_c, threshold: brute.threshold },
                ContinuousClaims { optimal: Some(true), ..Default::default() },
            );
            (serde_json::to_string(&brute).unwrap(), grade_continuous(&c, &p, &GradeConfig::default()).unwrap().to_json())
        })
    };
    let single = run(1);
    for threads in [2, 4, 8] {
        assert_eq!(run(threads), single);
    }
}

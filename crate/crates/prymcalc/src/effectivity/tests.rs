use super::certificate::{replay_certificate, EliminationReason, LeafReason};
use super::enumerate::enumerate;
use super::*;
use crate::exec::ExecMode;
use crate::lattice::{nonstandard, standard, LatticeModel, ModelKind, ParityRule};
use crate::rational::{rat, rat_int};
use proptest::prelude::*;

fn cls(model: &LatticeModel, expr: &str) -> LatticeClass {
    model.class_from_expr(expr).expect("test expression parses")
}

fn proved(model: &LatticeModel, expr: &str, depth: u32) -> NonEffectivityCertificate {
    match prove_non_effective(model, &cls(model, expr), depth).expect("prover runs") {
        ProofOutcome::Proved(cert) => cert,
        ProofOutcome::NoProof(report) => {
            panic!("expected a proof for {expr}, got no-proof: {}", report.reason)
        }
    }
}

// ---- peeling ----

#[test]
fn peeling_subtracts_every_curve_meeting_e_negatively() {
    let model = standard(7, false).unwrap();
    let (peeled, steps) = peel_base_curves(&model, &cls(&model, "e")).unwrap();
    assert_eq!(steps.len(), 8);
    assert!(steps.iter().all(|s| s.pairing == rat_int(-1)));
    assert_eq!(peeled, cls(&model, "-e"));
}

#[test]
fn peeling_leaves_the_polarization_alone() {
    let model = standard(7, false).unwrap();
    let (peeled, steps) = peel_base_curves(&model, &cls(&model, "L")).unwrap();
    assert!(steps.is_empty());
    assert_eq!(peeled, cls(&model, "L"));
}

#[test]
fn peeling_the_adjusted_polarization_flips_the_half_sum() {
    let model = standard(7, true).unwrap();
    let (peeled, steps) = peel_base_curves(&model, &cls(&model, "L + e - 3*E")).unwrap();
    assert_eq!(steps.len(), 8);
    assert_eq!(peeled, cls(&model, "L - e - 3*E"));
}

#[test]
fn peeling_strips_the_tail_curves_from_the_mixed_class() {
    let model = nonstandard(2, true).unwrap();
    let (peeled, steps) = peel_base_curves(&model, &cls(&model, "R - 2*E + e")).unwrap();
    assert_eq!(steps.len(), 6);
    assert!(steps.iter().all(|s| s.pairing == rat_int(-1)));
    assert_eq!(
        peeled,
        cls(
            &model,
            "1/2*L - 2*E - 1/2*N3 - 1/2*N4 - 1/2*N5 - 1/2*N6 - 1/2*N7 - 1/2*N8"
        )
    );
}

// ---- enumeration ----

#[test]
fn enumeration_finds_exactly_the_eight_twisted_curves() {
    let model = standard(7, true).unwrap();
    let found = enumerate(&model, &cls(&model, "L - 3*E - e")).unwrap();
    let expected: Vec<LatticeClass> = (1..=8)
        .map(|j| cls(&model, &format!("L - 3*E - N{j}")))
        .collect();
    assert_eq!(found.candidates, expected);

    let bounds = &found.bounds;
    assert_eq!(
        bounds.nef_constraints,
        vec!["0 <= pair(D, L) <= 6", "0 <= pair(D, E) <= 2"]
    );
    assert_eq!(bounds.intervals.len(), 2);
    assert_eq!(bounds.intervals[0].coordinate, "L");
    assert_eq!((bounds.intervals[0].lo.as_str(), bounds.intervals[0].hi.as_str()), ("0", "1"));
    assert_eq!(bounds.intervals[1].coordinate, "E");
    assert_eq!((bounds.intervals[1].lo.as_str(), bounds.intervals[1].hi.as_str()), ("-6", "3"));
    assert_eq!(bounds.negative_block.len(), 8);
    assert!(bounds.span_support_rule);
}

#[test]
fn enumeration_rejects_targets_of_the_wrong_square() {
    let model = standard(7, true).unwrap();
    let err = enumerate(&model, &cls(&model, "L")).unwrap_err();
    assert!(matches!(err, EffectivityError::UnsupportedShape { .. }));
}

#[test]
fn enumeration_respects_the_elementary_ladder() {
    // target iE - e pins the pencil coefficient to zero and the
    // polarization constraint caps the ladder at b = i
    let model = standard(7, true).unwrap();
    let found = enumerate(&model, &cls(&model, "3*E - e")).unwrap();
    let mut expected: Vec<LatticeClass> = Vec::new();
    for b in 1..=3 {
        for j in 1..=8 {
            expected.push(cls(&model, &format!("{b}*E - N{j}")));
        }
    }
    expected.sort_by(|x, y| x.doubled_coeffs().cmp(y.doubled_coeffs()));
    assert_eq!(found.candidates, expected);
}

// ---- proofs on the standard hyperelliptic family ----

#[test]
fn twisted_polarization_proof_closes_in_one_level() {
    let model = standard(7, true).unwrap();
    let cert = proved(&model, "L - 3*E - e", 3);
    assert_eq!(cert.depth(), 1);
    assert!(cert.root.peel_steps.is_empty());
    assert!(cert.sub_certificates.is_empty());
    assert_eq!(cert.root.candidates.len(), 8);
    for (j, cand) in cert.root.candidates.iter().enumerate() {
        let expected_residue = cls(&model, &format!("N{} - e", j + 1));
        match &cand.elimination {
            EliminationReason::ExceptionalSupport { class, combo } => {
                assert_eq!(*class, expected_residue);
                // the unique expansion has a -1/2 in every slot but one
                let minus_half = combo.iter().filter(|c| **c == rat(-1, 2)).count();
                assert_eq!(minus_half, 7);
                assert_eq!(combo[j], rat(1, 2));
            }
            other => panic!("candidate {j}: unexpected elimination {other:?}"),
        }
    }
    replay_certificate(&model, &cert).unwrap();
}

#[test]
fn no_candidate_survives_with_a_zero_polarization_coefficient() {
    let model = standard(7, true).unwrap();
    let cert = proved(&model, "L - 3*E - e", 3);
    assert!(cert
        .root
        .candidates
        .iter()
        .all(|c| c.d.coeff(0) == rat_int(1)));
}

#[test]
fn elementary_chain_builds_a_pool_of_shared_nodes() {
    let model = standard(7, true).unwrap();
    let cert = proved(&model, "3*E - e", 5);
    assert_eq!(cert.depth(), 3);
    // 8 first-step residues (2E + Nj - e) and 8 second-step residues
    // (E + Nj - e), shared across branches through the pool
    assert_eq!(cert.sub_certificates.len(), 16);
    assert_eq!(cert.root.candidates.len(), 24);
    replay_certificate(&model, &cert).unwrap();
}

#[test]
fn chain_subproofs_peel_exactly_one_curve() {
    let model = standard(7, true).unwrap();
    let cert = proved(&model, "3*E - e", 5);
    for node in &cert.sub_certificates {
        assert_eq!(node.peel_steps.len(), 1, "at {}", node.target.display_with(&model));
        assert!(node.leaf.is_none());
    }
}

#[test]
fn raising_the_budget_never_loses_a_proof() {
    let model = standard(7, true).unwrap();
    let target = cls(&model, "3*E - e");
    match prove_non_effective(&model, &target, 2).unwrap() {
        ProofOutcome::NoProof(report) => {
            assert!(!report.surviving.is_empty());
        }
        ProofOutcome::Proved(_) => panic!("budget 2 cannot close a height-3 chain"),
    }
    let at3 = prove_non_effective(&model, &target, 3).unwrap();
    let at4 = prove_non_effective(&model, &target, 4).unwrap();
    let c3 = at3.certificate().expect("provable at its height");
    let c4 = at4.certificate().expect("still provable with slack");
    assert_eq!(c3.depth(), 3);
    assert_eq!(c4.depth(), 3);
    assert_eq!(c3, c4);
}

#[test]
fn half_sum_is_directly_exceptional() {
    let model = standard(7, false).unwrap();
    let cert = proved(&model, "e", 1);
    assert_eq!(cert.depth(), 0);
    assert!(matches!(
        cert.root.leaf,
        Some(LeafReason::ExceptionalSupport { .. })
    ));
    replay_certificate(&model, &cert).unwrap();
}

// ---- proofs on the nonstandard hyperelliptic family ----

#[test]
fn all_four_obstruction_classes_close_at_i_two() {
    let model = nonstandard(2, true).unwrap();
    let cases = [
        ("1*E + e", 1u32, 0usize),
        ("2*E - e", 2, 8),
        ("R - 1*E - e", 2, 1),
        ("R - 2*E + e", 1, 0),
    ];
    for (expr, want_depth, want_pool) in cases {
        let cert = proved(&model, expr, 4);
        assert_eq!(cert.depth(), want_depth, "depth of {expr}");
        assert_eq!(cert.sub_certificates.len(), want_pool, "pool of {expr}");
        replay_certificate(&model, &cert).unwrap();
    }
}

#[test]
fn mixed_class_analysis_matches_the_hand_count() {
    // R - E - e: one candidate recurses through R - 2E; the rest close by
    // exceptional support in three shapes (fifteen dropping two tail
    // curves, two leaning on a head curve, two through the complementary
    // half-class)
    let model = nonstandard(2, true).unwrap();
    let cert = proved(&model, "R - 1*E - e", 4);
    assert!(cert.root.peel_steps.is_empty());
    assert_eq!(cert.root.candidates.len(), 20);

    let recursive: Vec<_> = cert
        .root
        .candidates
        .iter()
        .filter(|c| matches!(c.elimination, EliminationReason::Recursive { .. }))
        .collect();
    assert_eq!(recursive.len(), 1);
    assert_eq!(recursive[0].d, cls(&model, "R - 2*E"));
    match &recursive[0].elimination {
        EliminationReason::Recursive { target } => {
            assert_eq!(*target, cls(&model, "1*E - e"));
        }
        _ => unreachable!(),
    }

    let exceptional = cert
        .root
        .candidates
        .iter()
        .filter(|c| matches!(c.elimination, EliminationReason::ExceptionalSupport { .. }))
        .count();
    assert_eq!(exceptional, 19);

    // the complementary-half shape resolves to a bare negative curve
    let bare: Vec<_> = cert
        .root
        .candidates
        .iter()
        .filter_map(|c| match &c.elimination {
            EliminationReason::ExceptionalSupport { class, .. }
                if *class == cls(&model, "-N1") || *class == cls(&model, "-N2") =>
            {
                Some(c.d.clone())
            }
            _ => None,
        })
        .collect();
    assert_eq!(bare.len(), 2);
}

#[test]
fn peeled_mixed_class_leaves_one_candidate() {
    let model = nonstandard(2, true).unwrap();
    let cert = proved(&model, "R - 2*E + e", 3);
    assert_eq!(cert.root.peel_steps.len(), 6);
    assert_eq!(cert.root.candidates.len(), 1);
    assert_eq!(cert.root.candidates[0].d, cls(&model, "R - 2*E"));
    match &cert.root.candidates[0].elimination {
        EliminationReason::ExceptionalSupport { class, .. } => {
            assert_eq!(
                *class,
                cls(
                    &model,
                    "1/2*N1 + 1/2*N2 - 1/2*N3 - 1/2*N4 - 1/2*N5 - 1/2*N6 - 1/2*N7 - 1/2*N8"
                )
            );
        }
        other => panic!("unexpected elimination {other:?}"),
    }
}

#[test]
fn deeper_nonstandard_chains_close_with_matching_height() {
    let model = nonstandard(4, true).unwrap();
    let cert = proved(&model, "4*E - e", 6);
    assert_eq!(cert.depth(), 4);
    replay_certificate(&model, &cert).unwrap();
}

// ---- failure modes reported honestly ----

#[test]
fn effective_combinations_never_get_a_proof() {
    let model = standard(7, false).unwrap();
    match prove_non_effective(&model, &cls(&model, "N1"), 3).unwrap() {
        ProofOutcome::NoProof(report) => {
            assert!(report.reason.contains("nonnegative integral combination"));
        }
        ProofOutcome::Proved(_) => panic!("proved a known curve non-effective"),
    }
}

#[test]
fn zero_class_is_reported_effective() {
    let model = standard(7, false).unwrap();
    match prove_non_effective(&model, &cls(&model, "L - L"), 3).unwrap() {
        ProofOutcome::NoProof(report) => assert!(report.reason.contains("zero")),
        ProofOutcome::Proved(_) => panic!("proved the zero class non-effective"),
    }
}

#[test]
fn positive_square_targets_are_rejected_loudly() {
    let model = standard(7, false).unwrap();
    let err = prove_non_effective(&model, &cls(&model, "L"), 3).unwrap_err();
    assert!(matches!(err, EffectivityError::UnsupportedShape { .. }));
}

#[test]
fn zero_budget_is_a_parameter_error() {
    let model = standard(7, false).unwrap();
    let err = prove_non_effective(&model, &cls(&model, "e"), 0).unwrap_err();
    assert!(matches!(err, EffectivityError::InvalidParameter { .. }));
}

#[test]
fn foreign_classes_are_rejected() {
    let seven = standard(7, false).unwrap();
    let nine = standard(9, false).unwrap();
    let class = cls(&seven, "e");
    let err = prove_non_effective(&nine, &class, 3).unwrap_err();
    assert!(matches!(err, EffectivityError::Lattice(_)));
}

// ---- adversarial custom models ----

fn toy_rank3() -> LatticeModel {
    let gram = vec![
        vec![rat_int(2), rat_int(0), rat_int(0)],
        vec![rat_int(0), rat_int(-2), rat_int(0)],
        vec![rat_int(0), rat_int(0), rat_int(-2)],
    ];
    LatticeModel::custom(
        "toy-rank3".into(),
        ModelKind::Custom,
        vec!["L".into(), "N1".into(), "N2".into()],
        gram,
        ParityRule {
            integral: vec![0, 1, 2],
            groups: vec![],
        },
        vec![],
        vec!["L".into()],
        vec!["N1".into(), "N2".into()],
    )
    .expect("toy model is consistent")
}

#[test]
fn toy_difference_of_curves_is_exceptional() {
    let model = toy_rank3();
    let cert = proved(&model, "N1 - N2", 2);
    assert_eq!(cert.depth(), 0);
    replay_certificate(&model, &cert).unwrap();
}

proptest! {
    #[test]
    fn toy_effective_cone_is_never_disproved(a in 0i64..4, b in 0i64..4, c in 0i64..4) {
        prop_assume!(a + b + c > 0);
        let model = toy_rank3();
        let class = model
            .linear_combination(&[("L", rat_int(a)), ("N1", rat_int(b)), ("N2", rat_int(c))])
            .unwrap();
        match prove_non_effective(&model, &class, 3) {
            Ok(ProofOutcome::Proved(cert)) => {
                panic!(
                    "claimed proof against an effective class {}",
                    cert.target().display_with(&model)
                );
            }
            Ok(ProofOutcome::NoProof(_)) | Err(_) => {}
        }
    }
}

#[test]
fn isotropic_pencil_alone_cannot_bound_the_search() {
    let gram = vec![
        vec![rat_int(0), rat_int(0), rat_int(0)],
        vec![rat_int(0), rat_int(-2), rat_int(0)],
        vec![rat_int(0), rat_int(0), rat_int(-2)],
    ];
    let model = LatticeModel::custom(
        "toy-isotropic".into(),
        ModelKind::Custom,
        vec!["E".into(), "N1".into(), "N2".into()],
        gram,
        ParityRule {
            integral: vec![0, 1, 2],
            groups: vec![],
        },
        vec![],
        vec!["E".into()],
        vec!["N1".into(), "N2".into()],
    )
    .unwrap();
    let err = prove_non_effective(&model, &cls(&model, "E - N1 - N2"), 3).unwrap_err();
    match err {
        EffectivityError::UnboundedSearch { coordinate, .. } => assert_eq!(coordinate, "E"),
        other => panic!("expected an unbounded-search error, got {other}"),
    }
}

#[test]
fn hostile_pairing_matrix_trips_the_peel_cap() {
    let gram = vec![vec![rat_int(-2), rat_int(3)], vec![rat_int(3), rat_int(-2)]];
    let model = LatticeModel::custom(
        "toy-hostile".into(),
        ModelKind::Custom,
        vec!["C1".into(), "C2".into()],
        gram,
        ParityRule {
            integral: vec![0, 1],
            groups: vec![],
        },
        vec![],
        vec![],
        vec!["C1".into(), "C2".into()],
    )
    .unwrap();
    let err = peel_base_curves(&model, &cls(&model, "-C1")).unwrap_err();
    assert!(matches!(err, EffectivityError::PeelCapExceeded { cap: 1024 }));
}

// ---- decompositions ----

#[test]
fn polarization_minus_half_sum_only_decomposes_with_a_rigid_part() {
    let model = standard(6, false).unwrap();
    let target = cls(&model, "L - e");
    let report = check_no_moving_decomposition(&model, &target, 2).unwrap();
    assert!(report.all_have_rigid_part);
    // every integer pattern in {0,1,2}^8 is a lattice member
    assert_eq!(report.inspected, 6561);
    for row in &report.rows {
        assert_eq!(row.rigid_part.add(&row.moving_part), target);
        assert_eq!(row.rigid_part.coeff(0), rat_int(0));
        assert_eq!(row.moving_part.coeff(0), rat_int(1));
    }
}

#[test]
fn decomposition_check_requires_the_expected_shape() {
    let hyp = standard(7, true).unwrap();
    let err =
        check_no_moving_decomposition(&hyp, &cls(&hyp, "L - e"), 2).unwrap_err();
    assert!(matches!(err, EffectivityError::UnsupportedShape { .. }));

    let ns = nonstandard(2, false).unwrap();
    let err = check_no_moving_decomposition(&ns, &cls(&ns, "L - e"), 2).unwrap_err();
    assert!(matches!(err, EffectivityError::UnsupportedShape { .. }));

    let model = standard(6, false).unwrap();
    for bad in ["N1", "2*L - e"] {
        let err = check_no_moving_decomposition(&model, &cls(&model, bad), 2).unwrap_err();
        assert!(matches!(err, EffectivityError::UnsupportedShape { .. }), "{bad}");
    }
}

// ---- suites ----

#[test]
fn standard_vanishing_suite_passes_and_embeds_certificates() {
    let entries = run_suite(SuiteKind::VanishingStandard, 2..=4, ExecMode::Auto);
    assert_eq!(entries.len(), 3);
    for e in &entries {
        assert_eq!(e.status, SuiteStatus::Pass, "i = {}", e.parameter);
        assert!(e.artifact.get("certificate").is_some());
    }
}

#[test]
fn nonstandard_vanishing_suite_emits_four_entries_per_parameter() {
    let entries = run_suite(SuiteKind::VanishingNonstandard, 2..=3, ExecMode::Sequential);
    assert_eq!(entries.len(), 8);
    assert!(entries.iter().all(SuiteEntry::passed));
}

#[test]
fn decomposition_suite_passes_on_the_low_genus_band() {
    let entries = run_suite(SuiteKind::RigidDecomposition, 6..=8, ExecMode::Auto);
    assert_eq!(entries.len(), 3);
    assert!(entries.iter().all(SuiteEntry::passed));
}

#[test]
fn peel_chain_suite_records_the_eight_subtractions() {
    let entries = run_suite(SuiteKind::PeelChain, 2..=3, ExecMode::Auto);
    assert_eq!(entries.len(), 2);
    for e in &entries {
        assert!(e.passed());
        assert_eq!(e.artifact["peel_steps"], serde_json::json!(8));
        assert_eq!(e.artifact["certificates"].as_array().unwrap().len(), 2);
    }
}

#[test]
fn suite_names_round_trip() {
    for kind in SuiteKind::ALL {
        assert_eq!(SuiteKind::from_name(kind.name()), Some(kind));
    }
    assert_eq!(SuiteKind::from_name("no-such-suite"), None);
}

#[test]
fn execution_mode_does_not_change_suite_output() {
    let seq = run_suite(SuiteKind::VanishingNonstandard, 2..=3, ExecMode::Sequential);
    let auto = run_suite(SuiteKind::VanishingNonstandard, 2..=3, ExecMode::Auto);
    let to_json = |entries: &[SuiteEntry]| serde_json::to_string(entries).unwrap();
    assert_eq!(to_json(&seq), to_json(&auto));
}

// ---- certificates as data ----

#[test]
fn certificates_survive_a_json_round_trip() {
    let model = nonstandard(2, true).unwrap();
    let cert = proved(&model, "R - 1*E - e", 4);
    let text = serde_json::to_string_pretty(&cert).unwrap();
    let back: NonEffectivityCertificate = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cert);
    replay_certificate(&model, &back).unwrap();
}

#[test]
fn certificate_json_uses_the_documented_field_names() {
    let model = standard(7, true).unwrap();
    let cert = proved(&model, "L - 3*E - e", 3);
    let value = cert.to_json();
    assert!(value.get("model_name").is_some());
    assert!(value.get("target").is_some());
    assert!(value.get("bounds").is_some());
    assert!(value.get("depth").is_some());
    let first = &value["candidates"][0];
    assert!(first.get("D").is_some());
    assert_eq!(first["reason"], serde_json::json!("exceptional_support"));
    assert!(first["data"].get("combo").is_some());
}

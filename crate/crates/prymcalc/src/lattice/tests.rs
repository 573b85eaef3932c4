use super::*;
use crate::rational::{rat, rat_int};
use proptest::prelude::*;

fn standard(g: i64) -> LatticeModel {
    build_model(ModelKind::Standard { g }).unwrap()
}

fn standard_hyp(g: i64) -> LatticeModel {
    build_model(ModelKind::StandardHyperelliptic { g }).unwrap()
}

fn nonstandard(i: i64) -> LatticeModel {
    build_model(ModelKind::Nonstandard { i }).unwrap()
}

fn nonstandard_hyp(i: i64) -> LatticeModel {
    build_model(ModelKind::NonstandardHyperelliptic { i }).unwrap()
}

/// Naive pairing straight from rational coefficients, as a cross-check on
/// the doubled-integer path.
fn pair_naive(m: &LatticeModel, v: &LatticeClass, w: &LatticeClass) -> Rat {
    let vc = v.coeffs();
    let wc = w.coeffs();
    let mut acc = Rat::zero();
    for i in 0..m.rank() {
        for j in 0..m.rank() {
            acc += &vc[i] * &wc[j] * &m.gram()[i][j];
        }
    }
    acc
}

#[test]
fn standard_pairing_table() {
    let m = standard(7);
    let l = m.resolve("L").unwrap();
    let e = m.resolve("e").unwrap();
    let n3 = m.resolve("N3").unwrap();
    assert_eq!(m.pair(&l, &l).unwrap(), rat_int(12));
    assert_eq!(m.pair(&e, &e).unwrap(), rat_int(-4));
    assert_eq!(m.pair(&e, &n3).unwrap(), rat_int(-1));
    assert_eq!(m.pair(&l, &e).unwrap(), rat_int(0));
    assert_eq!(m.pair(&n3, &n3).unwrap(), rat_int(-2));
}

#[test]
fn hyperelliptic_pencil_pairings() {
    let m = standard_hyp(7);
    let l = m.resolve("L").unwrap();
    let e = m.resolve("E").unwrap();
    assert_eq!(m.pair(&e, &e).unwrap(), rat_int(0));
    assert_eq!(m.pair(&e, &l).unwrap(), rat_int(2));
    assert_eq!(m.pair(&e, &m.resolve("e").unwrap()).unwrap(), rat_int(0));

    let m = nonstandard_hyp(2);
    let e = m.resolve("E").unwrap();
    assert_eq!(m.pair(&e, &m.resolve("L").unwrap()).unwrap(), rat_int(4));
    assert_eq!(m.pair(&e, &m.resolve("R").unwrap()).unwrap(), rat_int(2));
}

#[test]
fn nonstandard_pairing_table() {
    let m = nonstandard(2);
    let l = m.resolve("L").unwrap();
    let r = m.resolve("R").unwrap();
    let rp = m.resolve("R'").unwrap();
    assert_eq!(m.pair(&l, &l).unwrap(), rat_int(28));
    assert_eq!(m.pair(&r, &r).unwrap(), rat_int(6)); // 4i-2
    assert_eq!(m.pair(&rp, &rp).unwrap(), rat_int(4)); // 4i-4
    assert_eq!(m.pair(&r, &m.resolve("N1").unwrap()).unwrap(), rat_int(1));
    assert_eq!(m.pair(&r, &m.resolve("N3").unwrap()).unwrap(), rat_int(0));
    // R + R' = L - e
    let sum = r.add(&rp);
    let l_minus_e = l.sub(&m.resolve("e").unwrap());
    assert_eq!(sum, l_minus_e);
}

#[test]
fn pairing_matches_naive_expansion() {
    for m in [standard(5), standard_hyp(3), nonstandard(1), nonstandard_hyp(3)] {
        let b = m
            .linear_combination(&[("L", rat_int(2)), ("e", rat_int(-3)), ("N1", rat(1, 2))])
            .unwrap();
        let c = m
            .linear_combination(&[("L", rat(1, 2)), ("N2", rat_int(-1))])
            .unwrap();
        assert_eq!(m.pair(&b, &c).unwrap(), pair_naive(&m, &b, &c));
        assert_eq!(m.pair(&b, &c).unwrap(), m.pair(&c, &b).unwrap());
    }
}

#[test]
fn membership_standard() {
    let m = standard(7);
    let member = |s: &str| m.is_member(&m.class_from_expr(s).unwrap()).unwrap();
    assert!(member("L"));
    assert!(member("e"));
    assert!(member("L - e"));
    assert!(member("3*N1 + 2*N2"));
    assert!(!member("1/2*N1"));
    assert!(!member("1/2*L"));
    assert!(!member("1/2*N1 + 1/2*N2")); // e needs all eight halves
}

#[test]
fn membership_nonstandard() {
    let m = nonstandard_hyp(2);
    let member = |s: &str| m.is_member(&m.class_from_expr(s).unwrap()).unwrap();
    assert!(member("R"));
    assert!(member("R'"));
    assert!(member("e"));
    assert!(member("L"));
    assert!(member("R - 2*E + e"));
    // the half-L classes admitted here all tie the L parity to every N slot
    assert!(member("1/2*L - 2*E - 1/2*N3 - 1/2*N4 - 1/2*N5 - 1/2*N6 - 1/2*N7 - 1/2*N8"));
    assert!(!member("1/2*L"));
    assert!(!member("1/2*N1 + 1/2*N2"));
    assert!(!member("1/2*E")); // pencil class stays integral
    assert!(!member("R - 1/2*E"));
}

#[test]
fn expr_parser_accepts_usual_forms() {
    let m = standard_hyp(5);
    let b = m.class_from_expr("L - 2*E - e").unwrap();
    let same = m
        .linear_combination(&[("L", rat_int(1)), ("E", rat_int(-2)), ("e", rat_int(-1))])
        .unwrap();
    assert_eq!(b, same);
    assert_eq!(
        m.class_from_expr("-e").unwrap(),
        m.resolve("e").unwrap().neg()
    );
    assert_eq!(
        m.class_from_expr("1/2*N1 + 1/2*N2").unwrap().coeff(2),
        rat(1, 2)
    );
    // leading plus and redundant whitespace are fine
    assert_eq!(
        m.class_from_expr("+ L  -  2*E - e").unwrap(),
        m.class_from_expr("L-2*E-e").unwrap()
    );
}

#[test]
fn expr_parser_rejects_malformed_input() {
    let m = standard(3);
    let err = |s: &str| m.class_from_expr(s).unwrap_err();
    assert!(matches!(err(""), LatticeError::ExprSyntax { .. }));
    assert!(matches!(err("L -- e"), LatticeError::ExprSyntax { .. }));
    assert!(matches!(err("3 L"), LatticeError::ExprSyntax { .. }));
    assert!(matches!(err("2*"), LatticeError::ExprSyntax { .. }));
    assert!(matches!(err("L N1"), LatticeError::ExprSyntax { .. }));
    assert!(matches!(err("1/0*L"), LatticeError::ExprSyntax { .. }));
    assert!(matches!(err("L + %"), LatticeError::ExprSyntax { .. }));
    assert!(matches!(err("Q"), LatticeError::UnknownName { .. }));
    assert!(matches!(err("1/3*L"), LatticeError::NotHalfIntegral { .. }));
}

#[test]
fn display_round_trips_through_parser() {
    let m = nonstandard_hyp(3);
    let b = m.class_from_expr("1/2*L - 3*E - 1/2*N3 - 1/2*N4 - 1/2*N5 - 1/2*N6 - 1/2*N7 - 1/2*N8").unwrap();
    let shown = b.display_with(&m);
    assert_eq!(m.class_from_expr(&shown).unwrap(), b);
    let zero = b.sub(&b);
    assert_eq!(zero.display_with(&m), "0");
}

#[test]
fn model_json_round_trip() {
    for m in [standard(9), standard_hyp(2), nonstandard(4), nonstandard_hyp(1)] {
        let s = serde_json::to_string_pretty(&m).unwrap();
        let back: LatticeModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.kind(), m.kind()); // builtin kind survives the trip
    }
}

#[test]
fn class_json_round_trip() {
    let m = nonstandard_hyp(2);
    let b = m.class_from_expr("R - 2*E + e").unwrap();
    let s = serde_json::to_string(&b).unwrap();
    let back: LatticeClass = serde_json::from_str(&s).unwrap();
    assert_eq!(back, b);
    // third-integer coefficients are rejected on the way in
    let bad = r#"{"model":"nonstandard-hyp-i2","coeffs":["1/3","0","0","0","0","0","0","0","0","0"]}"#;
    assert!(serde_json::from_str::<LatticeClass>(bad).is_err());
}

#[test]
fn custom_model_validation() {
    let two = || vec![vec![rat_int(2), rat_int(0)], vec![rat_int(0), rat_int(-2)]];
    let ok = LatticeModel::custom(
        "toy".into(),
        ModelKind::Custom,
        vec!["H".into(), "C".into()],
        two(),
        ParityRule {
            integral: vec![0, 1],
            groups: vec![],
        },
        vec![],
        vec!["H".into()],
        vec!["C".into()],
    );
    assert!(ok.is_ok());

    let dup = LatticeModel::custom(
        "toy".into(),
        ModelKind::Custom,
        vec!["H".into(), "H".into()],
        two(),
        ParityRule::default(),
        vec![],
        vec![],
        vec![],
    );
    assert!(matches!(dup, Err(LatticeError::InvalidModel { .. })));

    let asym = LatticeModel::custom(
        "toy".into(),
        ModelKind::Custom,
        vec!["H".into(), "C".into()],
        vec![vec![rat_int(2), rat_int(1)], vec![rat_int(0), rat_int(-2)]],
        ParityRule::default(),
        vec![],
        vec![],
        vec![],
    );
    assert!(matches!(asym, Err(LatticeError::InvalidModel { .. })));

    // a declared (-2)-curve must actually square to -2
    let bad_sq = LatticeModel::custom(
        "toy".into(),
        ModelKind::Custom,
        vec!["H".into(), "C".into()],
        two(),
        ParityRule::default(),
        vec![],
        vec![],
        vec!["H".into()],
    );
    assert!(matches!(bad_sq, Err(LatticeError::InvalidModel { .. })));
}

#[test]
fn model_mismatch_is_an_error() {
    let a = standard(3);
    let b = standard(4);
    let la = a.resolve("L").unwrap();
    let lb = b.resolve("L").unwrap();
    assert!(matches!(
        a.pair(&la, &lb),
        Err(LatticeError::ModelMismatch { .. })
    ));
}

#[test]
fn bad_parameters_are_rejected() {
    assert!(build_model(ModelKind::Standard { g: 1 }).is_err());
    assert!(build_model(ModelKind::Nonstandard { i: 0 }).is_err());
}

proptest! {
    #[test]
    fn pairing_is_symmetric_and_bilinear(
        av in proptest::collection::vec(-20i64..=20, 10),
        bv in proptest::collection::vec(-20i64..=20, 10),
        cv in proptest::collection::vec(-20i64..=20, 10),
    ) {
        let m = nonstandard_hyp(2);
        let a = LatticeClass::from_doubled_i64(m.name(), &av);
        let b = LatticeClass::from_doubled_i64(m.name(), &bv);
        let c = LatticeClass::from_doubled_i64(m.name(), &cv);
        prop_assert_eq!(m.pair(&a, &b).unwrap(), m.pair(&b, &a).unwrap());
        let lhs = m.pair(&a.add(&b), &c).unwrap();
        let rhs = m.pair(&a, &c).unwrap() + m.pair(&b, &c).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn members_form_a_group(
        av in proptest::collection::vec(-6i64..=6, 9),
        bv in proptest::collection::vec(-6i64..=6, 9),
    ) {
        let m = nonstandard(3);
        let a = LatticeClass::from_doubled_i64(m.name(), &av);
        let b = LatticeClass::from_doubled_i64(m.name(), &bv);
        if m.is_member(&a).unwrap() && m.is_member(&b).unwrap() {
            prop_assert!(m.is_member(&a.add(&b)).unwrap());
            prop_assert!(m.is_member(&a.sub(&b)).unwrap());
            prop_assert!(m.is_member(&a.neg()).unwrap());
            // and the pairing of members is an integer on this lattice
            let p = m.pair(&a, &b).unwrap();
            prop_assert!(p.is_integer(), "member pairing {} not integral", p);
        }
    }

    #[test]
    fn doubled_and_rational_constructors_agree(
        dv in proptest::collection::vec(-9i64..=9, 9),
    ) {
        let m = standard(4);
        let via_doubled = LatticeClass::from_doubled_i64(m.name(), &dv);
        let coeffs: Vec<Rat> = dv.iter().map(|&d| rat(d, 2)).collect();
        let via_rat = LatticeClass::from_rationals(m.name(), &coeffs).unwrap();
        prop_assert_eq!(via_doubled, via_rat);
    }
}

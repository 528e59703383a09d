use super::*;
use crate::profile::PrecisionProfile;
use crate::ring::Coeff;

fn prof(p: u64) -> Profile {
    PrecisionProfile::new(p).with_truncation(12, 10, 12, 10).build().unwrap()
}

fn r0(pr: &Profile, c: &[i64]) -> R0Series {
    let f = pr.k0();
    Series::from_coeffs(&f.zero(), c.iter().map(|&x| f.from_int(x)).collect(), pr.my())
}

fn r(pr: &Profile, c: &[i64]) -> RSeries {
    r0(pr, c).to_k(pr.k())
}

fn counterexample(pr: &Profile) -> FilteredModule {
    let p = pr.p() as i64;
    let phi = vec![vec![r0(pr, &[p]), r0(pr, &[])], vec![r0(pr, &[]), r0(pr, &[1])]];
    let n = vec![vec![r0(pr, &[]); 2]; 2];
    let fil1 = FilStep { weight: 1, generators: vec![vec![r(pr, &[p, 1])], vec![r(pr, &[1])]] };
    FilteredModule::new(pr, phi, n, vec![fil1]).unwrap()
}

fn diag(pr: &Profile, a: &[i64], b: &[i64], fil1: Option<Matrix<RSeries>>) -> FilteredModule {
    let phi = vec![vec![r0(pr, a), r0(pr, &[])], vec![r0(pr, &[]), r0(pr, b)]];
    let n = vec![vec![r0(pr, &[]); 2]; 2];
    let steps = fil1.map(|g| vec![FilStep { weight: 1, generators: g }]).unwrap_or_default();
    FilteredModule::new(pr, phi, n, steps).unwrap()
}

#[test]
fn counterexample_validates() {
    let pr = prof(3);
    let d = counterexample(&pr);
    let rep = d.validate();
    assert!(rep.all_pass(), "{rep}");
    assert_eq!(d.hodge_number().unwrap(), 1);
    assert_eq!(d.newton_number(Point::Closed).unwrap(), Rational::from(1));
    assert_eq!(d.newton_number(Point::Generic).unwrap(), Rational::from(1));
}

#[test]
fn non_invertible_frobenius_fails_named_axiom() {
    let pr = prof(3);
    let d = diag(&pr, &[3, 1], &[1], None);
    let rep = d.validate();
    let c = rep.get(AXIOM_ISOMORPHISM).unwrap();
    assert!(matches!(c.outcome, Outcome::Fail(_)), "{rep}");
    assert!(c.to_string().contains("Weierstrass degree 1"));
}

#[test]
fn identity_module_is_valid() {
    let pr = prof(5);
    let d = diag(&pr, &[1], &[1], None);
    assert!(d.validate().all_pass());
    assert_eq!(d.hodge_number().unwrap(), 0);
    assert_eq!(d.newton_number(Point::Closed).unwrap(), Rational::from(0));
}

#[test]
fn etale_hodge_number() {
    let pr = prof(3);
    let one = r(&pr, &[1]);
    let zero = r(&pr, &[]);
    let d = diag(&pr, &[3], &[3], Some(vec![vec![one.clone(), zero.clone()], vec![zero, one]]));
    assert_eq!(d.hodge_number().unwrap(), 2);
    assert!(d.validate().all_pass());
}

#[test]
fn newton_numbers_of_diagonal() {
    let pr = prof(3);
    let d = diag(&pr, &[9], &[27], None);
    assert_eq!(d.newton_number(Point::Closed).unwrap(), Rational::from(5));
    assert_eq!(d.newton_number(Point::Generic).unwrap(), Rational::from(5));
}

#[test]
fn specialization_at_zero() {
    let pr = prof(3);
    let d = counterexample(&pr);
    let pt = d.specialize_closed();
    assert_eq!(pt.frobenius[0][0].to_integer(), Some(3));
    let g = pt.fil(1).unwrap();
    assert!(g[0][0].agrees_with(&pr.k().from_int(3)));
    assert!(g[1][0].agrees_with(&pr.k().one()));
    let e = diag(&pr, &[0, 1], &[1], None).specialize_closed();
    assert!(e.frobenius[0][0].is_zero());
}

#[test]
fn slopes_at_closed_point() {
    let pr = prof(3);
    let d = counterexample(&pr);
    let mut s = d.newton_slopes_closed().unwrap();
    s.sort();
    assert_eq!(s, vec![Rational::from(0), Rational::from(1)]);
    let anti = FilteredModule::new(
        &pr,
        vec![vec![r0(&pr, &[]), r0(&pr, &[3])], vec![r0(&pr, &[1]), r0(&pr, &[])]],
        vec![vec![r0(&pr, &[]); 2]; 2],
        vec![],
    )
    .unwrap();
    assert_eq!(anti.newton_slopes_closed().unwrap(), vec![Rational::new(1, 2); 2]);
}

#[test]
fn subobject_hodge_numbers() {
    let pr = prof(3);
    let d = counterexample(&pr);
    let e1 = Subobject { generators: vec![vec![r0(&pr, &[1])], vec![r0(&pr, &[])]] };
    let e2 = Subobject { generators: vec![vec![r0(&pr, &[])], vec![r0(&pr, &[1])]] };
    assert_eq!(d.subobject_hodge_number(&e1).unwrap(), 0);
    assert_eq!(d.subobject_hodge_number(&e2).unwrap(), 0);
    assert_eq!(d.subobject_newton_number(&e1, Point::Closed).unwrap(), Rational::from(1));
    assert_eq!(d.subobject_newton_number(&e2, Point::Generic).unwrap(), Rational::from(0));
    // a module whose φ-stable line e_1 carries the filtration
    let f = diag(&pr, &[3], &[1], Some(vec![vec![r(&pr, &[1])], vec![r(&pr, &[])]]));
    assert_eq!(f.subobject_hodge_number(&e1).unwrap(), 1);
}

#[test]
fn weak_admissibility_auto() {
    let pr = prof(3);
    let wa = counterexample(&pr).check_punctual_weak_admissibility(None).unwrap();
    assert!(wa.holds);
    assert_eq!(wa.mode, SubobjectMode::AutoDistinctSlopes);
    // Fil^1 = e_2 on the slope-0 line
    let bad = diag(&pr, &[3], &[1], Some(vec![vec![r(&pr, &[])], vec![r(&pr, &[1])]]));
    let wa = bad.check_punctual_weak_admissibility(None).unwrap();
    assert!(!wa.holds);
    let e2 = wa.subobjects.iter().find(|s| s.label == "e2").unwrap();
    assert_eq!(e2.hodge, 1);
    assert_eq!(e2.newton.closed, Rational::from(0));
}

#[test]
fn rank_one_weight_one() {
    let pr = prof(3);
    let d = FilteredModule::new(
        &pr,
        vec![vec![r0(&pr, &[3])]],
        vec![vec![r0(&pr, &[])]],
        vec![FilStep { weight: 1, generators: vec![vec![r(&pr, &[1])]] }],
    )
    .unwrap();
    assert!(d.check_punctual_weak_admissibility(None).unwrap().holds);
}

#[test]
fn auto_mode_rejects_non_diagonal() {
    let pr = prof(3);
    let d = FilteredModule::new(
        &pr,
        vec![vec![r0(&pr, &[]), r0(&pr, &[3])], vec![r0(&pr, &[1]), r0(&pr, &[])]],
        vec![vec![r0(&pr, &[]); 2]; 2],
        vec![],
    )
    .unwrap();
    assert!(matches!(d.check_punctual_weak_admissibility(None), Err(Error::AutoModeUnsupported(_))));
}

#[test]
fn lattices_of_the_counterexample() {
    let pr = prof(3);
    let d = counterexample(&pr);
    let k0 = pr.k0();
    // M_0 = span(p e_1, e_2/p)
    let m0 = vec![vec![k0.from_int(3), k0.zero()], vec![k0.zero(), k0.from_int(1).mul_p_pow(-1)]];
    let rep = d.verify_lattice_closed(&m0, None).unwrap();
    assert!(rep.all_pass(), "{rep}");
    // span(e_1, e_2) fails (iii)
    let std = vec![vec![k0.one(), k0.zero()], vec![k0.zero(), k0.one()]];
    let rep = d.verify_lattice_closed(&std, None).unwrap();
    assert!(matches!(rep.get(lattice::SD_FIL_DIVISIBLE).unwrap().outcome, Outcome::Fail(_)), "{rep}");
    // M_g = span(e_1, e_2/p) over W(k_g)
    let mg = vec![vec![r0(&pr, &[1]), r0(&pr, &[])], vec![r0(&pr, &[]), r0(&pr, &[1]).mul_p_pow(-1)]];
    let rep = d.verify_lattice_generic(&mg, None).unwrap();
    assert!(rep.all_pass(), "{rep}");
}

#[test]
fn griffiths_and_horizontality_detect_bad_connection() {
    let pr = prof(3);
    let p = 3;
    let phi = vec![vec![r0(&pr, &[p]), r0(&pr, &[])], vec![r0(&pr, &[]), r0(&pr, &[1])]];
    let n = vec![vec![r0(&pr, &[]), r0(&pr, &[1])], vec![r0(&pr, &[]), r0(&pr, &[])]];
    let d = FilteredModule::new(&pr, phi, n, vec![]).unwrap();
    let rep = d.validate();
    assert!(matches!(rep.get(AXIOM_HORIZONTAL).unwrap().outcome, Outcome::Fail(_)));
}

#[test]
fn non_nested_filtration_fails() {
    let pr = prof(3);
    let one = r(&pr, &[1]);
    let zero = r(&pr, &[]);
    let phi = vec![vec![r0(&pr, &[1]), r0(&pr, &[])], vec![r0(&pr, &[]), r0(&pr, &[1])]];
    let n = vec![vec![r0(&pr, &[]); 2]; 2];
    let steps = vec![
        FilStep { weight: 1, generators: vec![vec![one.clone()], vec![zero.clone()]] },
        FilStep { weight: 2, generators: vec![vec![zero], vec![one]] },
    ];
    let d = FilteredModule::new(&pr, phi, n, steps).unwrap();
    assert!(matches!(d.validate().get(AXIOM_DECREASING).unwrap().outcome, Outcome::Fail(_)));
}

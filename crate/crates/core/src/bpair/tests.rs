use super::*;
use crate::filmod::FilStep;
use crate::profile::PrecisionProfile;

fn prof() -> Profile {
    PrecisionProfile::new(3).with_truncation(12, 8, 6, 6).build().unwrap()
}

fn rs(pr: &Profile, c: &[i64]) -> RSeries {
    let k = pr.k();
    Series::from_coeffs(&k.zero(), c.iter().map(|&x| k.from_int(x)).collect(), pr.my())
}

fn r0(pr: &Profile, c: &[i64]) -> crate::series::R0Series {
    let f = pr.k0();
    Series::from_coeffs(&f.zero(), c.iter().map(|&x| f.from_int(x)).collect(), pr.my())
}

fn module(pr: &Profile, a: i64, b: i64, fil1: Option<Vec<Vec<RSeries>>>) -> FilteredModule {
    let phi = vec![vec![r0(pr, &[a]), r0(pr, &[])], vec![r0(pr, &[]), r0(pr, &[b])]];
    let n = vec![vec![r0(pr, &[]); 2]; 2];
    let steps = fil1.map(|g| vec![FilStep { weight: 1, generators: g }]).unwrap_or_default();
    FilteredModule::new(pr, phi, n, steps).unwrap()
}

fn model(pr: &Profile) -> BModel {
    BModel::new(pr.k(), pr.mc(), pr.mu(), pr.t_window)
}

#[test]
fn split_examples() {
    let pr = prof();
    let m = model(&pr);
    let k = pr.k();
    let c = m.biv_c();
    let u = m.biv_u();
    let three = Biv::constant(&k.from_int(3), 6, 6);

    let s = Split::new(&m, &rs(&pr, &[3, 1]));
    assert!(s.at_c.agrees_with(&c.add_ref(&three)));
    assert!(s.tail.agrees_with(&m.biv_one()));
    assert!(s.reassembles());

    let s = Split::new(&m, &rs(&pr, &[1]));
    assert!(s.tail.is_zero());

    let s = Split::new(&m, &rs(&pr, &[0, 0, 1]));
    assert!(s.at_c.agrees_with(&c.mul_ref(&c)));
    let two_c = c.scale(&k.from_int(2));
    assert!(s.tail.agrees_with(&two_c.add_ref(&u)));
}

#[test]
fn strict_split_rejects_non_unit_determinant() {
    let pr = prof();
    let (f, g, h, r) = (rs(&pr, &[3, 1]), rs(&pr, &[1]), rs(&pr, &[]), rs(&pr, &[1]));
    assert!(matches!(split_filtration_generator(&pr, &f, &g, &h, &r), Err(Error::DeterminantNotUnit(_))));
    assert!(split_filtration_generator(&pr, &f, &g, &rs(&pr, &[-1]), &rs(&pr, &[])).is_ok());
    let (f3, g3) = (rs(&pr, &[3]), rs(&pr, &[0, 3]));
    assert!(matches!(split_filtration_generator(&pr, &f3, &g3, &h, &r), Err(Error::NotPrimitive(_))));
}

#[test]
fn trivial_systems() {
    let pr = prof();
    let split = SplitData::formal(&pr, &rs(&pr, &[1]), &rs(&pr, &[]), &rs(&pr, &[]), &rs(&pr, &[1]));
    let sol = solve_basis_systems(&split).unwrap();
    for x in [&sol.first.0, &sol.first.1, &sol.second.0, &sol.second.1] {
        assert!(x.is_zero());
    }
    assert!(sol.report.all_pass(), "{}", sol.report);
}

#[test]
fn systems_for_y_plus_p() {
    let pr = prof();
    let split = SplitData::formal(&pr, &rs(&pr, &[3, 1]), &rs(&pr, &[1]), &rs(&pr, &[]), &rs(&pr, &[1]));
    let sol = solve_basis_systems(&split).unwrap();
    let (a, b) = &sol.first;
    // a·(c + p + u) = -1, b = -a
    let y_plus_p = &split.f.at_y;
    assert!(a.mul_ref(y_plus_p).agrees_with(&split.model.biv_one().neg_ref()));
    assert!(b.agrees_with(&a.neg_ref()));
    assert!(sol.second.0.is_zero() && sol.second.1.is_zero());
    assert!(sol.report.all_pass(), "{}", sol.report);
}

#[test]
fn wdr_basis_of_the_counterexample() {
    let pr = prof();
    let d = wdr_basis(&pr, &rs(&pr, &[3, 1]), &rs(&pr, &[1]), &rs(&pr, &[]), &rs(&pr, &[1])).unwrap();
    assert!(matches!(d.report.get(WDR_FIRST).unwrap().outcome, Outcome::Pass), "{}", d.report);
    assert!(matches!(d.report.get(WDR_SECOND).unwrap().outcome, Outcome::Pass), "{}", d.report);
    // with h = 0, r = 1 the determinant is Y + p
    assert!(matches!(d.report.get(WDR_DET).unwrap().outcome, Outcome::Fail(_)));
    assert_eq!(d.wdr_basis[0][0].min_degree(), Some(-1));
    // the complement h = -1, r = 0 makes it a unit
    let d = wdr_basis(&pr, &rs(&pr, &[3, 1]), &rs(&pr, &[1]), &rs(&pr, &[-1]), &rs(&pr, &[])).unwrap();
    assert!(d.report.all_pass(), "{}", d.report);
}

#[test]
fn wdr_basis_split_case() {
    let pr = prof();
    let d = wdr_basis(&pr, &rs(&pr, &[1]), &rs(&pr, &[]), &rs(&pr, &[]), &rs(&pr, &[1])).unwrap();
    assert!(d.report.all_pass(), "{}", d.report);
    let m = model(&pr);
    let e1_over_t = m.t_pow(-1).unwrap();
    assert!(identity_outcome(&d.wdr_basis[0][0], &e1_over_t) == Outcome::Pass);
    assert!(d.wdr_basis[1][0].is_zero());
    assert_eq!(d.we_basis, [(-1, 0), (0, 1)]);
}

#[test]
fn rank_examples() {
    let pr = prof();
    let v = vcris_rank(&pr, &rs(&pr, &[3, 1]), &rs(&pr, &[1])).unwrap();
    assert_eq!(v.rank, 1);
    assert_eq!(v.weierstrass_degree, Some(1));
    assert!(v.report.all_pass(), "{}", v.report);
    let v = vcris_rank(&pr, &rs(&pr, &[1]), &rs(&pr, &[0, 3])).unwrap();
    assert_eq!(v.rank, 2);
    assert!(v.report.all_pass(), "{}", v.report);
    let v = vcris_rank(&pr, &rs(&pr, &[1, 3]), &rs(&pr, &[0, 1])).unwrap();
    assert_eq!(v.rank, 2);
    assert_eq!(v.solutions.len(), 2);
    assert!(v.report.all_pass(), "{}", v.report);
}

#[test]
fn rank_ignores_unit_rescaling() {
    let pr = prof();
    let unit = rs(&pr, &[1, 1]).mul_p_pow(-2);
    let (f, g) = (rs(&pr, &[3, 1]), rs(&pr, &[1]));
    let v = vcris_rank(&pr, &f.mul_ref(&unit), &g.mul_ref(&unit)).unwrap();
    assert_eq!(v.rank, 1);
}

#[test]
fn classify_examples() {
    let pr = prof();
    let one = rs(&pr, &[1]);
    let zero = rs(&pr, &[]);
    let et = module(&pr, 3, 3, Some(vec![vec![one.clone(), zero.clone()], vec![zero.clone(), one.clone()]]));
    assert_eq!(classify(&et).unwrap().verdict, Verdict::Etale);
    let mult = module(&pr, 1, 1, None);
    assert_eq!(classify(&mult).unwrap().verdict, Verdict::Multiplicative);

    let mixed = module(&pr, 3, 1, Some(vec![vec![one.clone()], vec![rs(&pr, &[0, 3])]]));
    let c = classify(&mixed).unwrap();
    assert_eq!(c.verdict, Verdict::AdmissibleMixed);
    let (_, rep) = c.breuil.as_ref().unwrap();
    assert!(rep.all_pass(), "{rep}");

    let counter = module(&pr, 3, 1, Some(vec![vec![rs(&pr, &[3, 1])], vec![one.clone()]]));
    let c = classify(&counter).unwrap();
    assert_eq!(c.verdict, Verdict::WeaklyAdmissibleNonAdmissible);
    assert_eq!(c.rank.as_ref().unwrap().rank, 1);
    assert!(c.bpair.as_ref().unwrap().report.all_pass());

    let bad = module(&pr, 3, 1, Some(vec![vec![zero], vec![one]]));
    assert_eq!(classify(&bad).unwrap().verdict, Verdict::NotWeaklyAdmissible);
}

#[test]
fn classify_rescales_e2() {
    let pr = prof();
    // g/f = Y/3 needs e₂ ↦ e₂/9 to land in pR
    let m = module(&pr, 3, 1, Some(vec![vec![rs(&pr, &[3])], vec![rs(&pr, &[0, 1])]]));
    let c = classify(&m).unwrap();
    assert_eq!(c.verdict, Verdict::AdmissibleMixed);
    assert_eq!(c.normalized.as_ref().unwrap().1, 2);
}

#[test]
fn classify_rejects_other_shapes() {
    let pr = prof();
    let phi = vec![vec![r0(&pr, &[]), r0(&pr, &[3])], vec![r0(&pr, &[1]), r0(&pr, &[])]];
    let d = FilteredModule::new(&pr, phi, vec![vec![r0(&pr, &[]); 2]; 2], vec![]).unwrap();
    assert!(matches!(classify(&d), Err(Error::UnsupportedShape(_))));
}

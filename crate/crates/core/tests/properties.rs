use std::sync::Arc;

use proptest::prelude::*;

use relcris::bpair::{vcris_rank, wdr_basis, BModel, Biv, WDR_FIRST, WDR_SECOND};
use relcris::breuil::{SElem, SRing};
use relcris::doc::{self, module_agrees, module_to_doc, JobDocument};
use relcris::filmod::{FilStep, FilteredModule};
use relcris::profile::{CoeffDescriptor, PrecisionProfile, Profile};
use relcris::ring::{Coeff, Rational, RingElem};
use relcris::series::{R0Series, RSeries, Series};
use relcris::verdict::Outcome;

fn unramified() -> Profile {
    PrecisionProfile::new(3).with_truncation(12, 6, 9, 6).build().unwrap()
}

/// `E(x) = x² - 3`.
fn ramified() -> Profile {
    let mut spec = PrecisionProfile::new(3).with_truncation(12, 6, 10, 6);
    spec.eisenstein = Some(vec![CoeffDescriptor::Int(-3), CoeffDescriptor::Int(0)]);
    spec.build().unwrap()
}

fn profile(ram: bool) -> Profile {
    if ram {
        ramified()
    } else {
        unramified()
    }
}

fn r0(pr: &Profile, c: &[i64]) -> R0Series {
    let f = pr.k0();
    Series::from_coeffs(&f.zero(), c.iter().map(|&x| f.from_int(x)).collect(), pr.my())
}

fn rs(pr: &Profile, c: &[i64]) -> RSeries {
    let k = pr.k();
    Series::from_coeffs(&k.zero(), c.iter().map(|&x| k.from_int(x)).collect(), pr.my())
}

/// `Σ_n b_n(Y) u^n/⌊n/e⌋!` from a flat list of integer coefficients.
fn selem(ring: &Arc<SRing>, pr: &Profile, c: &[Vec<i64>]) -> SElem {
    let mut x = ring.zero();
    for (n, b) in c.iter().enumerate().take(ring.mu()) {
        x = x.add_ref(&ring.basis(n).scale_r0(&r0(pr, b)));
    }
    x
}

fn biv(model: &BModel, c: &[i64]) -> Biv {
    let k = model.field();
    let (mc, mu) = model.dims();
    let mut out = model.biv_zero();
    for (i, &x) in c.iter().enumerate() {
        let (a, b) = (i % 3, i / 3);
        let mut m = Biv::constant(&k.from_int(x), mc, mu);
        for _ in 0..a {
            m = m.mul_ref(&model.biv_c());
        }
        for _ in 0..b {
            m = m.mul_u();
        }
        out = out.add_ref(&m);
    }
    out
}

fn coeffs(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-20i64..=20, 0..=len)
}

fn s_coeffs() -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(coeffs(3), 0..=6)
}

fn v_p(mut n: u64, p: u64) -> i64 {
    let mut v = 0;
    while n > 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn s_multiplication_is_associative_and_commutative(ram in any::<bool>(), a in s_coeffs(), b in s_coeffs(), c in s_coeffs()) {
        let pr = profile(ram);
        let ring = SRing::new(&pr);
        let (x, y, z) = (selem(&ring, &pr, &a), selem(&ring, &pr, &b), selem(&ring, &pr, &c));
        prop_assert!(x.mul_ref(&y).mul_ref(&z).agrees_with(&x.mul_ref(&y.mul_ref(&z))));
        prop_assert!(x.mul_ref(&y).agrees_with(&y.mul_ref(&x)));
        prop_assert!(x.mul_ref(&y.add_ref(&z)).agrees_with(&x.mul_ref(&y).add_ref(&x.mul_ref(&z))));
    }

    #[test]
    fn s_frobenius_is_a_ring_map(ram in any::<bool>(), a in s_coeffs(), b in s_coeffs()) {
        let pr = profile(ram);
        let ring = SRing::new(&pr);
        let (x, y) = (selem(&ring, &pr, &a), selem(&ring, &pr, &b));
        prop_assert!(x.mul_ref(&y).phi().agrees_with(&x.phi().mul_ref(&y.phi())));
        prop_assert!(x.add_ref(&y).phi().agrees_with(&x.phi().add_ref(&y.phi())));
        prop_assert!(ring.one().phi().agrees_with(&ring.one()));
    }

    #[test]
    fn s_derivation_satisfies_leibniz(ram in any::<bool>(), a in s_coeffs(), b in s_coeffs()) {
        let pr = profile(ram);
        let ring = SRing::new(&pr);
        let (x, y) = (selem(&ring, &pr, &a), selem(&ring, &pr, &b));
        let lhs = x.mul_ref(&y).d_u();
        let rhs = x.d_u().mul_ref(&y).add_ref(&x.mul_ref(&y.d_u()));
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn quotient_is_a_ring_map(ram in any::<bool>(), a in s_coeffs(), b in s_coeffs()) {
        let pr = profile(ram);
        let ring = SRing::new(&pr);
        let (x, y) = (selem(&ring, &pr, &a), selem(&ring, &pr, &b));
        let (qx, qy) = (x.quotient_to_r(), y.quotient_to_r());
        prop_assert!(x.mul_ref(&y).quotient_to_r().agrees_with(&qx.mul_ref(&qy)));
        prop_assert!(x.sub_ref(&y).quotient_to_r().agrees_with(&qx.sub_ref(&qy)));
    }

    #[test]
    fn lift_then_quotient_is_the_identity(ram in any::<bool>(), g in coeffs(5)) {
        let pr = profile(ram);
        let ring = SRing::new(&pr);
        let g = rs(&pr, &g);
        prop_assert!(ring.lift(&g).quotient_to_r().agrees_with(&g));
    }

    #[test]
    fn theta_is_a_ring_map(a in coeffs(9), b in coeffs(9), a1 in coeffs(9), b1 in coeffs(9)) {
        let pr = unramified();
        let model = BModel::new(pr.k(), pr.mc(), pr.mu(), pr.t_window);
        let x = model.embed(biv(&model, &a)).add(&model.graded(1, biv(&model, &a1)).unwrap());
        let y = model.embed(biv(&model, &b)).add(&model.graded(1, biv(&model, &b1)).unwrap());
        let (tx, ty) = (x.theta().unwrap(), y.theta().unwrap());
        prop_assert!(x.mul(&y).unwrap().theta().unwrap().agrees_with(&tx.mul_ref(&ty)));
        prop_assert!(x.add(&y).theta().unwrap().agrees_with(&tx.add_ref(&ty)));
        prop_assert!(model.t_pow(1).unwrap().theta().unwrap().is_zero());
    }

    #[test]
    fn phi_of_divided_powers_of_e(ram in any::<bool>()) {
        // φ(Eⁿ/n!) ∈ p^{n - v_p(n!)}S, with equality of valuation below p
        let pr = profile(ram);
        let ring = SRing::new(&pr);
        let p = pr.p();
        let e = ring.eisenstein();
        let mut pow = ring.one();
        let mut vfact = 0;
        for n in 1..=ring.mu() / (p as usize) {
            vfact += v_p(n as u64, p);
            pow = pow.mul_ref(&e).scale_const(&pr.k0().from_int(n as i64).inv().unwrap());
            let v = pow.phi().min_valuation().unwrap();
            let bound = Rational::from(n as i64 - vfact);
            prop_assert!(v >= bound, "n = {}: {} < {}", n, v, bound);
            if (n as u64) < p {
                prop_assert_eq!(v, Rational::from(n as i64));
            }
        }
    }

    #[test]
    fn document_round_trip(
        phi in prop::collection::vec(coeffs(4), 4),
        gens in prop::collection::vec(coeffs(4), 2),
        scale in -2i64..=2,
    ) {
        let pr = unramified();
        let phi: Vec<Vec<R0Series>> = phi.chunks(2).map(|r| r.iter().map(|c| r0(&pr, c).mul_p_pow(scale)).collect()).collect();
        let n = vec![vec![r0(&pr, &[]); 2]; 2];
        let g: Vec<Vec<RSeries>> = gens.iter().map(|c| vec![rs(&pr, c)]).collect();
        let d = FilteredModule::new(&pr, phi, n, vec![FilStep { weight: 1, generators: g }]).unwrap();
        let md = module_to_doc(&d);
        let job = JobDocument { profile: pr.spec.clone(), module: md.clone(), subobjects: None, lattices: None, options: Default::default() };
        let text = serde_json::to_string(&job).unwrap();
        let back: JobDocument = doc::parse_job(&text).unwrap();
        prop_assert_eq!(&back, &job);
        let d2 = back.module.build(&pr).unwrap();
        prop_assert!(module_agrees(&d, &d2));
        prop_assert_eq!(module_to_doc(&d2), md);
    }
}

fn small_profile() -> Profile {
    PrecisionProfile::new(3).with_truncation(12, 6, 6, 6).build().unwrap()
}

/// `(f, g)` with `f(0)` a unit, or `f ∈ 3R` and `g(0)` a unit.
fn pair() -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
    (prop::collection::vec(-9i64..=9, 3), prop::collection::vec(-9i64..=9, 3), any::<bool>()).prop_map(|(mut f, mut g, unit_f)| {
        let (u, o) = if unit_f { (&mut f, &mut g) } else { (&mut g, &mut f) };
        if u[0] % 3 == 0 {
            u[0] += 1;
        }
        if !unit_f {
            o.iter_mut().for_each(|x| *x *= 3);
        }
        (f, g)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn change_of_basis_identities_hold((f, g) in pair()) {
        let pr = small_profile();
        let (h, r) = if f[0] % 3 != 0 { (0, 1) } else { (-1, 0) };
        let d = wdr_basis(&pr, &rs(&pr, &f), &rs(&pr, &g), &rs(&pr, &[h]), &rs(&pr, &[r])).unwrap();
        prop_assert!(d.report.all_pass(), "{}", d.report);
        prop_assert_eq!(&d.report.get(WDR_FIRST).unwrap().outcome, &Outcome::Pass);
        prop_assert_eq!(&d.report.get(WDR_SECOND).unwrap().outcome, &Outcome::Pass);
    }

    #[test]
    fn rank_survives_rescaling((f, g) in pair(), unit in prop::collection::vec(-9i64..=9, 2), n in 0i64..=2) {
        let pr = small_profile();
        let (f, g) = (rs(&pr, &f), rs(&pr, &g));
        let base = vcris_rank(&pr, &f, &g).unwrap();
        let mut u = unit;
        if u[0] % 3 == 0 {
            u[0] += 1;
        }
        let u = rs(&pr, &u).mul_p_pow(-1);
        let scaled = vcris_rank(&pr, &f.mul_ref(&u), &g.mul_ref(&u)).unwrap();
        prop_assert_eq!(base.rank, scaled.rank);
        // e₂ ↦ p^{-n}e₂ multiplies the e₂-coordinate by pⁿ
        let moved = vcris_rank(&pr, &f, &g.mul_p_pow(n)).unwrap();
        prop_assert_eq!(base.rank, moved.rank);
    }
}

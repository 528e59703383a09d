//! The Breuil module over `S` attached to a reducible rank-2 filtered module
//! whose `Fil¹` is spanned by `e₁ + p g₁ e₂`, together with a constructive
//! proof that `φ(Fil¹𝓜) = p𝓜`.
//!
//! The inclusion `p𝓜 ⊆ φ(Fil¹𝓜)` is established by explicit witnesses;
//! the reverse inclusion is checked on generators. Both are identities in
//! the truncated `S`, so no module membership over `S` is ever decided.

mod sring;

pub use sring::{SElem, SRing};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::filmod::span::zero_outcome;
use crate::padic::Padic;
use crate::profile::Profile;
use crate::ring::{Coeff, Rational, RingElem};
use crate::series::{Modulus, R0Series, RSeries, Series};
use crate::verdict::{Check, Outcome, Report};

pub const BR_MU_UNIT: &str = "φ(E)/p is a unit of S";
pub const BR_FIL_DIVISIBLE: &str = "φ(Fil¹𝓜) ⊆ p𝓜";
pub const BR_PE2: &str = "p·e₂ ∈ φ(Fil¹𝓜)";
pub const BR_PE1: &str = "p·e₁ ∈ φ(Fil¹𝓜)";
pub const BR_QUOTIENT: &str = "𝓜/Fil¹𝓜 ≅ D_R/Fil¹D_R";
pub const BR_HORIZONTAL: &str = "horizontality";
pub const BR_NILPOTENT: &str = "quasi-nilpotence";

#[derive(Clone, Debug)]
pub struct BreuilModule {
    ring: Arc<SRing>,
    g1: RSeries,
    lift: SElem,
    /// `φ(e₁) = p^a e₁`, `φ(e₂) = p^b e₂`.
    frobenius: (i64, i64),
}

/// `g ∈ pR`, decided on the known coefficients.
fn divisible_by_p(g: &RSeries) -> Result<bool> {
    for c in g.known() {
        match c.valuation() {
            Some(v) if v < Rational::from(1) => return Ok(false),
            Some(_) => {}
            None => {
                if c.precision().map_or(false, |pr| pr < Rational::from(1)) {
                    return Err(Error::Inconclusive("coefficient of g known to less than one digit".into()));
                }
            }
        }
    }
    Ok(true)
}

/// The Breuil module for `Fil¹ = (e₁ + g e₂)`, requiring `g ∈ pR`.
pub fn build_breuil(profile: &Profile, g: &RSeries) -> Result<BreuilModule> {
    if !divisible_by_p(g)? {
        return Err(Error::NotNormalized("g is not divisible by p in R".into()));
    }
    BreuilModule::from_g1(profile, &g.mul_p_pow(-1))
}

impl BreuilModule {
    pub fn from_g1(profile: &Profile, g1: &RSeries) -> Result<Self> {
        if g1.known().iter().any(|c| !c.is_integral()) {
            return Err(Error::NotNormalized("g₁ is not in O_K[[Y]]".into()));
        }
        let ring = SRing::new(profile);
        let lift = ring.lift(g1);
        Ok(BreuilModule { ring, g1: g1.clone(), lift, frobenius: (1, 0) })
    }

    /// Replaces the Frobenius by `φ(e₁) = p^a e₁`, `φ(e₂) = p^b e₂`.
    pub fn with_frobenius(mut self, a: i64, b: i64) -> Self {
        self.frobenius = (a, b);
        self
    }

    /// Uses the preimage `𝔤₁ + E(u)·s` of `g₁` instead of the canonical lift.
    pub fn shift_lift(mut self, s: &SElem) -> Self {
        self.lift = self.lift.add_ref(&self.ring.eisenstein().mul_ref(s));
        self
    }

    pub fn ring(&self) -> &Arc<SRing> {
        &self.ring
    }

    pub fn g1(&self) -> &RSeries {
        &self.g1
    }

    pub fn lift(&self) -> &SElem {
        &self.lift
    }

    pub fn frobenius_exponents(&self) -> (i64, i64) {
        self.frobenius
    }

    /// `(1, p𝔤₁)`, the distinguished generator of `Fil¹𝓜` modulo `Fil¹S·𝓜`.
    pub fn fil1_generator(&self) -> [SElem; 2] {
        [self.ring.one(), self.lift.mul_p_pow(1)]
    }

    pub fn frobenius_matrix(&self) -> [[SElem; 2]; 2] {
        let p = self.ring.k0().p_elem();
        let pw = |k: i64| self.ring.from_const(&pow_p(&p, k));
        let z = self.ring.zero();
        [[pw(self.frobenius.0), z.clone()], [z, pw(self.frobenius.1)]]
    }

    pub fn connection_matrix(&self) -> [[SElem; 2]; 2] {
        let z = self.ring.zero();
        [[z.clone(), z.clone()], [z.clone(), z]]
    }

    /// `φ(x₁e₁ + x₂e₂)` in coordinates.
    pub fn apply_phi(&self, v: &[SElem; 2]) -> [SElem; 2] {
        let p = self.ring.k0().p_elem();
        [v[0].phi().scale_const(&pow_p(&p, self.frobenius.0)), v[1].phi().scale_const(&pow_p(&p, self.frobenius.1))]
    }

    pub fn witnesses(&self) -> Witnesses {
        let ring = &self.ring;
        let p = ring.k0().p_elem();
        let e = ring.eisenstein();
        let z = ring.zero();
        let g1 = self.apply_phi(&[e.clone(), z.clone()]);
        let g2 = self.apply_phi(&[z, e.clone()]);
        let g3 = self.apply_phi(&self.fil1_generator());
        let mu = e.phi().mul_p_pow(-1);
        let mu_inv = mu.inverse().ok();
        let (a, b) = self.frobenius;
        let (c2, c3, c32) = match &mu_inv {
            Some(mi) => {
                let c2 = mi.scale_const(&pow_p(&p, -b));
                let c3 = ring.from_const(&pow_p(&p, 1 - a));
                let c32 = self.lift.phi().mul_ref(mi).scale_const(&pow_p(&p, 1 - a)).neg_ref();
                (Some(c2), Some(c3), Some(c32))
            }
            None => (None, None, None),
        };
        Witnesses { images: [g1, g2, g3], mu, e2: c2, e1: c3.zip(c32) }
    }

    pub fn verify(&self) -> Report {
        verify_breuil(self)
    }
}

fn pow_p(p: &Padic, k: i64) -> Padic {
    p.one_like().mul_p_pow(k)
}

/// The images `G₁ = φ(E e₁)`, `G₂ = φ(E e₂)`, `G₃ = φ(e₁ + p𝔤₁e₂)` and the
/// coefficients expressing `p e₂ = c₂ G₂` and `p e₁ = c₃ G₃ + c₃₂ G₂`.
#[derive(Clone, Debug)]
pub struct Witnesses {
    pub images: [[SElem; 2]; 3],
    pub mu: SElem,
    pub e2: Option<SElem>,
    pub e1: Option<(SElem, SElem)>,
}

fn s_modulus(xs: &[&SElem]) -> Modulus {
    let mut m = Modulus::new(None);
    let mut valid = usize::MAX;
    for x in xs {
        valid = valid.min(x.valid());
        for b in x.coeffs() {
            m = m.meet(&b.modulus());
        }
    }
    if valid != usize::MAX {
        m = m.with("u", valid);
    }
    m
}

fn identity_outcome(residual: &[SElem; 2]) -> Outcome {
    let flat: Vec<R0Series> = residual.iter().flat_map(|x| x.flat()).collect();
    if flat.is_empty() {
        return Outcome::Inconclusive("no known u-coefficients".into());
    }
    zero_outcome(&flat)
}

fn integral_outcome(x: &SElem, what: &str) -> Outcome {
    match x.is_integral() {
        Some(true) => Outcome::Pass,
        Some(false) => Outcome::Fail(format!("{what} is not integral")),
        None => Outcome::Inconclusive(format!("integrality of {what} undecided at precision")),
    }
}

/// Smallest valuation of an `e₂`-coordinate among the images of the
/// generators `E(u)ⁿ/n!·eᵢ` and `e₁ + p𝔤₁e₂`.
fn e2_image_valuation(m: &BreuilModule) -> Option<Rational> {
    let ring = &m.ring;
    let e = ring.eisenstein();
    let z = ring.zero();
    let mut pow = ring.one();
    let mut vals = Vec::new();
    let p = ring.k0().prime() as usize;
    let mut n = 1usize;
    while n * p < ring.mu() || n == 1 {
        pow = pow.mul_ref(&e).scale_const(&ring.k0().from_int(n as i64).inv().ok()?);
        for v in [[pow.clone(), z.clone()], [z.clone(), pow.clone()]] {
            vals.extend(m.apply_phi(&v)[1].min_valuation());
        }
        n += 1;
    }
    vals.extend(m.apply_phi(&m.fil1_generator())[1].min_valuation());
    vals.into_iter().min()
}

pub fn verify_breuil(m: &BreuilModule) -> Report {
    let mut report = Report::default();
    let ring = &m.ring;
    let w = m.witnesses();
    let all: Vec<&SElem> = w.images.iter().flatten().chain([&w.mu, &m.lift]).collect();
    let modulus = s_modulus(&all);

    let mu_ok = match w.mu.is_unit_of_s() {
        Some(true) if w.e2.is_some() => Outcome::Pass,
        Some(_) => Outcome::Fail("constant term of φ(E)/p is not a unit".into()),
        None => Outcome::Inconclusive("constant term undecided".into()),
    };
    report.push(Check::new(BR_MU_UNIT, mu_ok, modulus.clone()));

    // φ(Fil¹𝓜) ⊆ p𝓜 on generators: the three images above and φ(E^n/n!·eᵢ).
    let mut div = Outcome::Pass;
    for (k, img) in w.images.iter().enumerate() {
        for (i, x) in img.iter().enumerate() {
            match x.valuation_at_least(Rational::from(1)) {
                Some(true) => {}
                Some(false) => {
                    div = Outcome::Fail(format!("G{} has an e{} coordinate not divisible by p", k + 1, i + 1));
                }
                None if div == Outcome::Pass => div = Outcome::Inconclusive("valuation undecided".into()),
                None => {}
            }
        }
    }
    if div == Outcome::Pass {
        let e = ring.eisenstein();
        let mut pow = ring.one();
        let p = ring.k0().prime() as usize;
        let mut n = 1usize;
        while n * p < ring.mu() {
            let inv_n = ring.k0().from_int(n as i64).inv().expect("n is nonzero");
            pow = pow.mul_ref(&e).scale_const(&inv_n);
            for x in m.apply_phi(&[pow.clone(), pow.clone()]) {
                if x.valuation_at_least(Rational::from(1)) == Some(false) {
                    div = Outcome::Fail(format!("φ(E^{n}/{n}!·e) is not divisible by p"));
                }
            }
            n += 1;
        }
    }
    report.push(Check::new(BR_FIL_DIVISIBLE, div, modulus.clone()));

    let obstruction = || match e2_image_valuation(m) {
        Some(v) if v > Rational::from(1) => {
            format!("every e₂-coordinate of φ(Fil¹𝓜) is divisible by p^{v}, so p·e₂ is unreachable")
        }
        _ => "witness coefficient is not integral".into(),
    };

    let p = ring.k0().p_elem();
    let e2_target = [ring.zero(), ring.from_const(&p)];
    let pe2 = match &w.e2 {
        None => Outcome::Inconclusive("φ(E)/p is not invertible".into()),
        Some(c2) => match integral_outcome(c2, "c₂") {
            Outcome::Pass => {
                let got = [c2.mul_ref(&w.images[1][0]), c2.mul_ref(&w.images[1][1])];
                identity_outcome(&[got[0].sub_ref(&e2_target[0]), got[1].sub_ref(&e2_target[1])])
            }
            Outcome::Fail(_) => Outcome::Fail(obstruction()),
            o => o,
        },
    };
    report.push(Check::new(BR_PE2, pe2, modulus.clone()));

    let e1_target = [ring.from_const(&p), ring.zero()];
    let pe1 = match &w.e1 {
        None => Outcome::Inconclusive("φ(E)/p is not invertible".into()),
        Some((c3, c32)) => match (integral_outcome(c3, "c₃"), integral_outcome(c32, "c₃₂")) {
            (Outcome::Pass, Outcome::Pass) => {
                let got: Vec<SElem> = (0..2)
                    .map(|i| c3.mul_ref(&w.images[2][i]).add_ref(&c32.mul_ref(&w.images[1][i])))
                    .collect();
                identity_outcome(&[got[0].sub_ref(&e1_target[0]), got[1].sub_ref(&e1_target[1])])
            }
            (Outcome::Fail(why), _) | (_, Outcome::Fail(why)) => Outcome::Fail(why),
            (o, _) if o != Outcome::Pass => o,
            (_, o) => o,
        },
    };
    report.push(Check::new(BR_PE1, pe1, modulus.clone()));

    // The image of the distinguished generator in R² is (1, g): its first
    // coordinate is a unit, so the quotient is free of rank 1 and matches
    // D_R/Fil¹ = R²/(1, g).
    let q: Vec<RSeries> = m.fil1_generator().iter().map(|x| x.quotient_to_r()).collect();
    let g = m.g1.mul_p_pow(1);
    let one: RSeries = Series::one(&ring.k().zero(), ring.my());
    let res = [q[0].sub_ref(&one), q[1].sub_ref(&g)];
    let qmod = res.iter().map(|s| s.modulus()).reduce(|a, b| a.meet(&b)).unwrap_or_else(|| Modulus::new(None));
    report.push(Check::new(BR_QUOTIENT, zero_outcome(&res), qmod));

    // The Frobenius matrix is constant and the connection vanishes on the
    // basis, so ∇φ = φ∇ holds identically.
    let frob = m.frobenius_matrix();
    let dphi: Vec<SElem> = frob.iter().flatten().map(|x| x.d_u()).collect();
    let horiz = if dphi.iter().all(|x| x.is_zero()) {
        Outcome::Pass
    } else {
        Outcome::Fail("Frobenius matrix is not horizontal".into())
    };
    report.push(Check::new(BR_HORIZONTAL, horiz, modulus.clone()));
    let nil = m.connection_matrix().iter().flatten().all(|x| x.is_zero());
    report.push(Check::new(BR_NILPOTENT, Outcome::from_bool(nil, "connection is nonzero"), modulus));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::PrecisionProfile;

    fn prof() -> Profile {
        PrecisionProfile::new(3).with_truncation(12, 8, 12, 8).build().unwrap()
    }

    fn rs(pr: &Profile, c: &[i64]) -> RSeries {
        let f = pr.k0();
        Series::from_coeffs(&f.zero(), c.iter().map(|&x| f.from_int(x)).collect(), pr.my()).to_k(pr.k())
    }

    #[test]
    fn split_case_passes() {
        let pr = prof();
        let m = build_breuil(&pr, &rs(&pr, &[])).unwrap();
        let rep = m.verify();
        assert!(rep.all_pass(), "{rep}");
    }

    #[test]
    fn g1_equal_y_passes() {
        let pr = prof();
        let m = build_breuil(&pr, &rs(&pr, &[0, 3])).unwrap();
        assert!(m.fil1_generator()[1].quotient_to_r().agrees_with(&rs(&pr, &[0, 3])));
        let rep = m.verify();
        assert!(rep.all_pass(), "{rep}");
    }

    #[test]
    fn not_normalized() {
        let pr = prof();
        assert!(matches!(build_breuil(&pr, &rs(&pr, &[0, 1])), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn tampered_frobenius_fails() {
        let pr = prof();
        let m = build_breuil(&pr, &rs(&pr, &[3, 3])).unwrap().with_frobenius(1, 1);
        let rep = m.verify();
        let c = rep.get(BR_PE2).unwrap();
        assert!(matches!(c.outcome, Outcome::Fail(_)), "{rep}");
        assert!(c.to_string().contains("unreachable"), "{c}");
    }

    #[test]
    fn verdict_independent_of_lift() {
        let pr = prof();
        let ring = SRing::new(&pr);
        let y = Series::var(&pr.k0().zero(), pr.my());
        let s = ring.u_pow(1).add_ref(&ring.from_r0(&y));
        let m = build_breuil(&pr, &rs(&pr, &[3, 0, 6])).unwrap().shift_lift(&s);
        assert!(m.verify().all_pass());
    }
}

//! The `(B_dR^+, B_cris)` side of a reducible rank-2 module with
//! `Φ = diag(p, 1)`: the de Rham lattice attached to `Fil¹ = (f e₁ + g e₂)`,
//! the rank of `V_cris` and the resulting classification.
//!
//! Two facts about the period rings are consumed as an interface rather
//! than derived: `B_e ∩ B_dR^{∇+} = Q_p`, and `θ` maps the degree-one part
//! `U₁` of `B_cris^{φ=p}` onto `\hat{\bar R}[1/p]` with kernel `Q_p·t`.
//! The witnesses below are checked against these two statements.

mod model;

pub use model::{identity_outcome, BElem, BModel, Biv};

use crate::breuil::{build_breuil, BreuilModule};
use crate::error::{Error, Result};
use crate::filmod::{FilteredModule, PointNumbers, WeakAdmissibility};
use crate::padic::KElem;
use crate::profile::Profile;
use crate::ring::{Coeff, Rational, RingElem};
use crate::series::{Modulus, RSeries, Series};
use crate::verdict::{Check, Outcome, Report};

/// A series `f ∈ R` together with `f(c)`, `f(c + u)` and the tail
/// `f₁ = (f(c + u) - f(c))/u`.
#[derive(Clone, Debug)]
pub struct Split {
    pub series: RSeries,
    pub at_c: Biv,
    pub at_y: Biv,
    pub tail: Biv,
}

impl Split {
    pub fn new(model: &BModel, f: &RSeries) -> Self {
        let at_y = model.at_y(f);
        let at_c = model.at_c(f);
        let tail = at_y.shift_u();
        Split { series: f.clone(), at_c, at_y, tail }
    }

    /// `f(c + u) = f(c) + u·f₁`.
    pub fn reassembles(&self) -> bool {
        self.at_y.agrees_with(&self.at_c.add_ref(&self.tail.mul_u()))
    }
}

#[derive(Clone, Debug)]
pub struct SplitData {
    pub model: BModel,
    pub f: Split,
    pub g: Split,
    pub h: Split,
    pub r: Split,
}

impl SplitData {
    /// No checks on `f, g, h, r`; the linear systems only need
    /// `f(0)r(0) - g(0)h(0) ≠ 0`.
    pub fn formal(profile: &Profile, f: &RSeries, g: &RSeries, h: &RSeries, r: &RSeries) -> Self {
        let model = BModel::new(profile.k(), profile.mc(), profile.mu(), profile.t_window);
        SplitData {
            f: Split::new(&model, f),
            g: Split::new(&model, g),
            h: Split::new(&model, h),
            r: Split::new(&model, r),
            model,
        }
    }

    pub fn determinant(&self) -> RSeries {
        self.f.series.mul_ref(&self.r.series).sub_ref(&self.g.series.mul_ref(&self.h.series))
    }
}

/// In `O_K[[Y]]` and not divisible by `π`.
pub fn is_primitive(f: &RSeries) -> Result<bool> {
    if f.known().iter().any(|c| !c.is_integral()) {
        return Ok(false);
    }
    let zero = Rational::from(0);
    if f.known().iter().any(|c| c.valuation() == Some(zero)) {
        return Ok(true);
    }
    if f.known().iter().all(|c| c.valuation().is_some() || c.precision().map_or(true, |pr| pr > zero)) {
        return Ok(false);
    }
    Err(Error::Inconclusive("residue of the series undecided".into()))
}

fn pi(profile: &Profile) -> KElem {
    profile.k().uniformizer()
}

/// Checked version of [`SplitData::formal`]: one of `f, g` primitive and
/// `f r - g h` a unit of `R[1/p]`.
pub fn split_filtration_generator(
    profile: &Profile,
    f: &RSeries,
    g: &RSeries,
    h: &RSeries,
    r: &RSeries,
) -> Result<SplitData> {
    for (name, s) in [("f", f), ("g", g), ("h", h), ("r", r)] {
        if s.known().iter().any(|c| !c.is_integral()) {
            return Err(Error::NotPrimitive(format!("{name} is not in O_K[[Y]]")));
        }
    }
    if !is_primitive(f)? && !is_primitive(g)? {
        return Err(Error::NotPrimitive("both f and g are divisible by π".into()));
    }
    let split = SplitData::formal(profile, f, g, h, r);
    let det = split.determinant();
    match det.is_unit_after_inverting_p(&pi(profile)) {
        Ok(true) => Ok(split),
        Ok(false) => {
            let d = det.primitive_part(&pi(profile)).and_then(|(_, s)| s.weierstrass_degree()).ok();
            Err(Error::DeterminantNotUnit(match d {
                Some(d) => format!("f·r - g·h has Weierstrass degree {d}"),
                None => "f·r - g·h is not a unit".into(),
            }))
        }
        Err(Error::ZeroWithinTruncation) => Err(Error::DeterminantNotUnit("f·r - g·h vanishes".into())),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug)]
pub struct BasisSolutions {
    /// `f(Y)a + h(Y)b = -f₁`, `g(Y)a + r(Y)b = -g₁`.
    pub first: (Biv, Biv),
    /// `f(Y)a + h(Y)b = -h₁`, `g(Y)a + r(Y)b = -r₁`.
    pub second: (Biv, Biv),
    pub report: Report,
}

pub const SYS_FIRST: &str = "first system solved";
pub const SYS_SECOND: &str = "second system solved";
pub const SYS_FIRST_UNIQUE: &str = "first system: Cramer agrees with substitution";
pub const SYS_SECOND_UNIQUE: &str = "second system: Cramer agrees with substitution";

/// Successive substitution `x ← A(0)^{-1}(v - (A - A(0))x)`. Each step fixes
/// one more total degree in `(c, u)`.
pub fn solve_by_substitution(a: &[[Biv; 2]; 2], v: &[Biv; 2]) -> Result<[Biv; 2]> {
    let c = |i: usize, j: usize| a[i][j].coeff(0, 0).clone();
    let det0 = c(0, 0).mul_ref(&c(1, 1)).sub_ref(&c(0, 1).mul_ref(&c(1, 0)));
    if det0.is_zero() {
        return Err(Error::DeterminantNotUnit("f(0)r(0) - g(0)h(0) vanishes".into()));
    }
    let d = det0.inv()?;
    let inv0 = [[c(1, 1).mul_ref(&d), c(0, 1).mul_ref(&d).neg_ref()], [c(1, 0).mul_ref(&d).neg_ref(), c(0, 0).mul_ref(&d)]];
    let (mc, mu) = v[0].dims();
    let nil: Vec<Vec<Biv>> = (0..2)
        .map(|i| (0..2).map(|j| a[i][j].sub_ref(&Biv::constant(&c(i, j), mc, mu))).collect())
        .collect();
    let mut x = [v[0].zero_like(), v[1].zero_like()];
    for _ in 0..(mc + mu) {
        let w: Vec<Biv> = (0..2).map(|i| v[i].sub_ref(&nil[i][0].mul_ref(&x[0])).sub_ref(&nil[i][1].mul_ref(&x[1]))).collect();
        x = [
            w[0].scale(&inv0[0][0]).add_ref(&w[1].scale(&inv0[0][1])),
            w[0].scale(&inv0[1][0]).add_ref(&w[1].scale(&inv0[1][1])),
        ];
    }
    Ok(x)
}

/// Both linear systems, solved by Cramer's rule with the determinant
/// inverted as a series, and compared with [`solve_by_substitution`].
pub fn solve_basis_systems(split: &SplitData) -> Result<BasisSolutions> {
    let m = &split.model;
    let (fy, gy, hy, ry) = (&split.f.at_y, &split.g.at_y, &split.h.at_y, &split.r.at_y);
    let det = fy.mul_ref(ry).sub_ref(&gy.mul_ref(hy));
    let inv = det
        .inverse()
        .map_err(|_| Error::DeterminantNotUnit("f(0)r(0) - g(0)h(0) vanishes".into()))?;
    let cramer = |v1: &Biv, v2: &Biv| -> (Biv, Biv) {
        let a = v1.mul_ref(ry).sub_ref(&hy.mul_ref(v2)).mul_ref(&inv);
        let b = fy.mul_ref(v2).sub_ref(&gy.mul_ref(v1)).mul_ref(&inv);
        (a, b)
    };
    let matrix = [[fy.clone(), hy.clone()], [gy.clone(), ry.clone()]];
    let mut report = Report::default();
    let mut solve = |v1: Biv, v2: Biv, names: (&str, &str)| -> Result<(Biv, Biv)> {
        let (a, b) = cramer(&v1, &v2);
        let lhs1 = m.embed(fy.mul_ref(&a).add_ref(&hy.mul_ref(&b)));
        let lhs2 = m.embed(gy.mul_ref(&a).add_ref(&ry.mul_ref(&b)));
        let o1 = identity_outcome(&lhs1, &m.embed(v1.clone()));
        let o2 = identity_outcome(&lhs2, &m.embed(v2.clone()));
        let solved = worst(o1, o2);
        if let Outcome::Fail(why) = &solved {
            return Err(Error::IdentityFailure(format!("{}: {why}", names.0)));
        }
        report.push(Check::new(names.0, solved, lhs1.modulus().meet(&lhs2.modulus())));
        let [a2, b2] = solve_by_substitution(&matrix, &[v1, v2])?;
        let oa = identity_outcome(&m.embed(a.clone()), &m.embed(a2));
        let ob = identity_outcome(&m.embed(b.clone()), &m.embed(b2));
        let unique = worst(oa, ob);
        if let Outcome::Fail(why) = &unique {
            return Err(Error::IdentityFailure(format!("{}: {why}", names.1)));
        }
        report.push(Check::new(names.1, unique, m.embed(a.clone()).modulus().meet(&m.embed(b.clone()).modulus())));
        Ok((a, b))
    };
    let first = solve(split.f.tail.neg_ref(), split.g.tail.neg_ref(), (SYS_FIRST, SYS_FIRST_UNIQUE))?;
    let second = solve(split.h.tail.neg_ref(), split.r.tail.neg_ref(), (SYS_SECOND, SYS_SECOND_UNIQUE))?;
    Ok(BasisSolutions { first, second, report })
}

fn worst(a: Outcome, b: Outcome) -> Outcome {
    match (a, b) {
        (Outcome::Fail(w), _) | (_, Outcome::Fail(w)) => Outcome::Fail(w),
        (Outcome::Inconclusive(w), _) | (_, Outcome::Inconclusive(w)) => Outcome::Inconclusive(w),
        _ => Outcome::Pass,
    }
}

pub const WDR_FIRST: &str = "(f(Y)e₁+g(Y)e₂)/t·(1+ua) + (h(Y)e₁+r(Y)e₂)·(u/t)·b = (f(c)e₁+g(c)e₂)/t";
pub const WDR_SECOND: &str = "(f(Y)e₁+g(Y)e₂)/t·tua + (h(Y)e₁+r(Y)e₂)·(1+ub) = h(c)e₁+r(c)e₂";
pub const WDR_DET: &str = "f(c)r(c) - g(c)h(c) is a unit";

/// `W_e = t^{k₁}e₁·B_e ⊕ t^{k₂}e₂·B_e`, stored as the exponents.
pub const WE_BASIS: [(i32, usize); 2] = [(-1, 0), (0, 1)];

#[derive(Clone, Debug)]
pub struct BPairDescription {
    pub we_basis: [(i32, usize); 2],
    /// Columns `((f(c)e₁+g(c)e₂)/t, h(c)e₁+r(c)e₂)` as `e`-coordinates.
    pub wdr_basis: [[BElem; 2]; 2],
    pub solutions: BasisSolutions,
    pub report: Report,
}

/// The de Rham basis and both identities behind it. The determinant
/// condition is reported as its own check, so formal inputs with a
/// non-unit determinant still get their identities verified.
pub fn wdr_basis(profile: &Profile, f: &RSeries, g: &RSeries, h: &RSeries, r: &RSeries) -> Result<BPairDescription> {
    let split = SplitData::formal(profile, f, g, h, r);
    for (name, s) in [("f", &split.f), ("g", &split.g), ("h", &split.h), ("r", &split.r)] {
        if !s.reassembles() {
            return Err(Error::IdentityFailure(format!("{name}(c+u) = {name}(c) + u·{name}₁")));
        }
    }
    let solutions = solve_basis_systems(&split)?;
    let m = &split.model;
    let one = m.biv_one();
    let u = m.biv_u();
    let ti = m.t_pow(-1)?;
    let t = m.t_pow(1)?;
    let mut report = solutions.report.clone();

    let (a, b) = &solutions.first;
    let one_ua = m.embed(one.add_ref(&u.mul_ref(a)));
    let ub_t = m.embed(u.mul_ref(b)).mul(&ti)?;
    let mut outcome = Outcome::Pass;
    let mut modulus = Modulus::new(None);
    let mut wdr1 = Vec::new();
    for (top, bottom) in [(&split.f, &split.h), (&split.g, &split.r)] {
        let lhs = m.embed(top.at_y.clone()).mul(&ti)?.mul(&one_ua)?.add(&m.embed(bottom.at_y.clone()).mul(&ub_t)?);
        let rhs = m.embed(top.at_c.clone()).mul(&ti)?;
        outcome = worst(outcome, identity_outcome(&lhs, &rhs));
        modulus = modulus.meet(&lhs.modulus());
        wdr1.push(rhs);
    }
    if let Outcome::Fail(why) = &outcome {
        return Err(Error::IdentityFailure(format!("{WDR_FIRST}: {why}")));
    }
    report.push(Check::new(WDR_FIRST, outcome, modulus));

    let (a, b) = &solutions.second;
    let tua = m.embed(u.mul_ref(a)).mul(&t)?;
    let one_ub = m.embed(one.add_ref(&u.mul_ref(b)));
    let mut outcome = Outcome::Pass;
    let mut modulus = Modulus::new(None);
    let mut wdr2 = Vec::new();
    for (top, bottom) in [(&split.f, &split.h), (&split.g, &split.r)] {
        let lhs = m.embed(top.at_y.clone()).mul(&ti)?.mul(&tua)?.add(&m.embed(bottom.at_y.clone()).mul(&one_ub)?);
        let rhs = m.embed(bottom.at_c.clone());
        outcome = worst(outcome, identity_outcome(&lhs, &rhs));
        modulus = modulus.meet(&lhs.modulus());
        wdr2.push(rhs);
    }
    if let Outcome::Fail(why) = &outcome {
        return Err(Error::IdentityFailure(format!("{WDR_SECOND}: {why}")));
    }
    report.push(Check::new(WDR_SECOND, outcome, modulus));

    // θ(f(c)r(c) - g(c)h(c)) = f r - g h, and an element of B_dR^+ is a unit
    // exactly when its image under θ is.
    let dc = m.embed(split.f.at_c.mul_ref(&split.r.at_c).sub_ref(&split.g.at_c.mul_ref(&split.h.at_c)));
    let theta = dc.theta()?;
    let det_outcome = match theta.is_unit_after_inverting_p(&pi(profile)) {
        Ok(true) => Outcome::Pass,
        Ok(false) => Outcome::Fail("θ of the determinant is not a unit of R[1/p]".into()),
        Err(Error::ZeroWithinTruncation) => Outcome::Fail("determinant vanishes".into()),
        Err(e) => Outcome::from_error(&e),
    };
    report.push(Check::new(WDR_DET, det_outcome, theta.modulus()));

    let mut it1 = wdr1.into_iter();
    let mut it2 = wdr2.into_iter();
    let (x1, y1, x2, y2) = (it1.next().unwrap(), it1.next().unwrap(), it2.next().unwrap(), it2.next().unwrap());
    Ok(BPairDescription { we_basis: WE_BASIS, wdr_basis: [[x1, x2], [y1, y2]], solutions, report })
}

/// One solution `(x, y₁, s, z)` of `x = f(c)s + t h(c)z`,
/// `y₁ = g(c)s + t r(c)z`.
#[derive(Clone, Debug)]
pub struct RankSolution {
    pub label: String,
    pub x: BElem,
    pub y1: BElem,
    pub s: BElem,
    pub z: BElem,
}

#[derive(Clone, Debug)]
pub struct RankVerdict {
    pub rank: u8,
    /// Weierstrass degree of the primitive part of `f`; `None` when `f`
    /// vanishes at `Y = 0` identically.
    pub weierstrass_degree: Option<usize>,
    pub complement: (i64, i64),
    pub solutions: Vec<RankSolution>,
    pub report: Report,
}

pub const RANK_DEGREE: &str = "Weierstrass degree of f";
pub const RANK_KERNEL: &str = "solution (x, y₁) = (0, t)";
pub const RANK_X: &str = "solution with x = 1";
pub const RANK_THETA: &str = "θ(y₁) = g(Y)f(Y)⁻¹x";
pub const RANK_COLLAPSE: &str = "θ forces x = 0";

/// Scales `(f, g)` by a common power of `π` so that both lie in `O_K[[Y]]`
/// and one is primitive.
pub fn normalize_pair(profile: &Profile, f: &RSeries, g: &RSeries) -> Result<(RSeries, RSeries)> {
    let vals: Vec<Rational> = [f, g].iter().filter_map(|s| s.gauss_valuation().ok()).collect();
    let v = vals.into_iter().min().ok_or_else(|| Error::NotPrimitive("f and g both vanish".into()))?;
    let k = (v * Rational::from(profile.e() as i64)).to_integer();
    let scale = crate::series::pow_signed(&pi(profile), -k)?;
    Ok((f.scale(&scale), g.scale(&scale)))
}

fn u_free_nonneg(x: &BElem) -> bool {
    x.degrees().all(|j| {
        let b = x.component_or_zero(j);
        let (mc, mu) = b.dims();
        (j >= 0 || b.is_zero()) && (0..mc).all(|i| (1..mu).all(|l| !b.is_known(i, l) || b.coeff(i, l).is_zero()))
    })
}

fn check_solution(sol: &RankSolution, at: &[&Biv; 4], m: &BModel) -> Result<Outcome> {
    let [fc, gc, hc, rc] = at;
    let t = m.t_pow(1)?;
    let eq1 = sol.s.times(fc).add(&sol.z.times(hc).mul(&t)?);
    let eq2 = sol.s.times(gc).add(&sol.z.times(rc).mul(&t)?);
    let mut o = worst(identity_outcome(&sol.x, &eq1), identity_outcome(&sol.y1, &eq2));
    if !u_free_nonneg(&sol.s) || !u_free_nonneg(&sol.z) {
        o = worst(o, Outcome::Fail("s or z leaves the horizontal ∇-invariant part".into()));
    }
    Ok(o)
}

/// `rank_{Q_p} V_cris` for `Fil¹ = (f e₁ + g e₂)` and `Φ = diag(p, 1)`:
/// `2` exactly when `f` is a unit of `R[1/p]`.
pub fn vcris_rank(profile: &Profile, f: &RSeries, g: &RSeries) -> Result<RankVerdict> {
    let (f, g) = normalize_pair(profile, f, g)?;
    if !is_primitive(&f)? && !is_primitive(&g)? {
        return Err(Error::NotPrimitive("neither f nor g is primitive".into()));
    }
    let pi = pi(profile);
    let mut report = Report::default();
    let degree = match f.primitive_part(&pi) {
        Ok((_, prim)) => match prim.weierstrass_degree() {
            Ok(d) => Some(d),
            Err(Error::Inconclusive(w)) => return Err(Error::InconclusiveWeierstrass(w)),
            Err(e) => return Err(e),
        },
        Err(Error::ZeroWithinTruncation) if f.coeff(0).is_zero() && f.coeff(0).precision().is_none() => None,
        Err(Error::ZeroWithinTruncation) => {
            return Err(Error::InconclusiveWeierstrass("f vanishes within the truncation".into()))
        }
        Err(e) => return Err(e),
    };
    let f_unit = degree == Some(0);
    report.push(Check::new(RANK_DEGREE, Outcome::Pass, f.modulus()));
    let my = profile.my();
    let constant = |n: i64| Series::constant(&profile.k().from_int(n), my);
    let candidates: &[(i64, i64)] = if f_unit { &[(0, 1)] } else { &[(-1, 0), (1, 1), (-1, 1)] };
    let mut complement = None;
    for &(h, r) in candidates {
        let d = f.mul_ref(&constant(r)).sub_ref(&g.mul_ref(&constant(h)));
        if d.is_unit_after_inverting_p(&pi).unwrap_or(false) {
            complement = Some((h, r));
            break;
        }
    }
    let (h, r) = complement.ok_or_else(|| Error::UnsupportedShape("no constant complement to Fil¹".into()))?;
    let model = BModel::new(profile.k(), profile.mc(), profile.mu(), profile.t_window);
    let (fc, gc, hc, rc) = (model.at_c(&f), model.at_c(&g), model.at_c(&constant(h)), model.at_c(&constant(r)));
    let at = [&fc, &gc, &hc, &rc];
    let dc = fc.mul_ref(&rc).sub_ref(&gc.mul_ref(&hc));
    let dinv = dc.inverse()?;
    let t = model.t_pow(1)?;
    let zero = model.zero();

    let kernel = RankSolution {
        label: "x = 0, y₁ = t".into(),
        x: zero.clone(),
        y1: t.clone(),
        s: model.embed(hc.mul_ref(&dinv).neg_ref()).mul(&t)?,
        z: model.embed(fc.mul_ref(&dinv)),
    };
    let o = check_solution(&kernel, &at, &model)?;
    report.push(Check::new(RANK_KERNEL, o, kernel.s.modulus().meet(&kernel.z.modulus())));
    let mut solutions = vec![kernel];

    if f_unit {
        let s = model.embed(fc.inverse()?);
        let y1 = s.times(&gc);
        let sol = RankSolution { label: "x = 1".into(), x: model.one(), y1: y1.clone(), s, z: zero };
        let o = check_solution(&sol, &at, &model)?;
        report.push(Check::new(RANK_X, o, sol.s.modulus()));
        // θ(y₁) against g·f⁻¹ computed in R[1/p]
        let want = g.mul_ref(&f.invert_localized(&pi)?);
        let got = y1.theta()?;
        let n = got.len().min(want.len());
        let theta_ok = got.truncate(n).agrees_with(&want.truncate(n));
        report.push(Check::new(RANK_THETA, Outcome::from_bool(theta_ok, "θ(y₁) differs from g/f"), want.modulus()));
        solutions.push(sol);
    } else {
        // x = f(Y)θ(s) with x ∈ Q_p: a nonzero x would make f a unit of
        // \hat{\bar R}[1/p], which a positive Weierstrass degree excludes.
        let detail = match degree {
            Some(d) => format!("f has Weierstrass degree {d}"),
            None => "f(0) = 0".to_string(),
        };
        report.push(Check::new(format!("{RANK_COLLAPSE} ({detail})"), Outcome::Pass, f.modulus()));
    }
    Ok(RankVerdict { rank: if f_unit { 2 } else { 1 }, weierstrass_degree: degree, complement: (h, r), solutions, report })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Etale,
    Multiplicative,
    AdmissibleMixed,
    WeaklyAdmissibleNonAdmissible,
    NotWeaklyAdmissible,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Etale => "ETALE",
            Verdict::Multiplicative => "MULTIPLICATIVE",
            Verdict::AdmissibleMixed => "ADMISSIBLE_MIXED",
            Verdict::WeaklyAdmissibleNonAdmissible => "WEAKLY_ADMISSIBLE_NON_ADMISSIBLE",
            Verdict::NotWeaklyAdmissible => "NOT_WEAKLY_ADMISSIBLE",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub verdict: Verdict,
    pub validation: Report,
    pub weak_admissibility: WeakAdmissibility,
    pub hodge: i64,
    pub newton: PointNumbers,
    /// `(f, g)` in the basis where `Φ = diag(p, 1)`.
    pub generator: Option<(RSeries, RSeries)>,
    pub rank: Option<RankVerdict>,
    pub bpair: Option<BPairDescription>,
    /// `g` after `Fil¹ = (e₁ + g e₂)` and `e₂ ↦ p^{-n}e₂`, with `n`.
    pub normalized: Option<(RSeries, u32)>,
    pub breuil: Option<(BreuilModule, Report)>,
    pub modulus: Modulus,
}

fn exact_p_power(s: &crate::series::R0Series, k: i64) -> bool {
    let p = s.coeff(0).field().p_elem();
    let want = Series::constant(&p.one_like().mul_p_pow(k), s.len());
    s.agrees_with(&want) && s.coeff(0).val() == Some(k)
}

/// Sorts a rank-2 module with `Hodge–Tate` weights in `[0, 1]`, `N = 0` and
/// `Φ = diag(p^a, p^b)` into the five classes.
pub fn classify(d: &FilteredModule) -> Result<Classification> {
    let profile = d.profile().clone();
    if d.rank() != 2 {
        return Err(Error::UnsupportedShape("rank must be 2".into()));
    }
    let slopes = d
        .constant_diagonal_slopes()
        .ok_or_else(|| Error::UnsupportedShape("Φ must be constant diagonal and N zero".into()))?;
    let (a, b) = (slopes[0], slopes[1]);
    if !(0..=1).contains(&a) || !(0..=1).contains(&b) {
        return Err(Error::UnsupportedShape("Frobenius slopes must lie in {0, 1}".into()));
    }
    if !exact_p_power(&d.frobenius()[0][0], a) || !exact_p_power(&d.frobenius()[1][1], b) {
        return Err(Error::UnsupportedShape("diagonal entries must be exact powers of p".into()));
    }
    if d.steps().iter().any(|s| s.weight < 0 || s.weight > 1) {
        return Err(Error::UnsupportedShape("Hodge–Tate weights must lie in [0, 1]".into()));
    }
    let validation = d.validate();
    if let Some(c) = validation.first_failure() {
        return Err(Error::UnsupportedShape(format!("invalid filtered module: {}", c.name)));
    }
    let wa = d.check_punctual_weak_admissibility(None)?;
    let hodge = wa.hodge;
    let newton = wa.newton;
    let fil1 = d.fil(1);
    let r1 = fil1.first().map_or(0, |row| row.len());
    let mut out = Classification {
        verdict: Verdict::NotWeaklyAdmissible,
        validation,
        modulus: wa.modulus.clone(),
        weak_admissibility: wa,
        hodge,
        newton,
        generator: None,
        rank: None,
        bpair: None,
        normalized: None,
        breuil: None,
    };
    if !out.weak_admissibility.holds {
        return Ok(out);
    }
    match r1 {
        2 => {
            out.verdict = Verdict::Etale;
            return Ok(out);
        }
        0 => {
            out.verdict = Verdict::Multiplicative;
            return Ok(out);
        }
        _ => {}
    }
    // weakly admissible with rank-1 Fil¹ forces {a, b} = {0, 1}; put the
    // slope-1 line first
    let (f, g) = if a == 1 { (fil1[0][0].clone(), fil1[1][0].clone()) } else { (fil1[1][0].clone(), fil1[0][0].clone()) };
    let (f, g) = normalize_pair(&profile, &f, &g)?;
    let rank = vcris_rank(&profile, &f, &g)?;
    let (h, r) = rank.complement;
    let constant = |n: i64| Series::constant(&profile.k().from_int(n), profile.my());
    out.bpair = Some(wdr_basis(&profile, &f, &g, &constant(h), &constant(r))?);
    out.generator = Some((f.clone(), g.clone()));
    if rank.rank == 1 {
        out.verdict = Verdict::WeaklyAdmissibleNonAdmissible;
        out.rank = Some(rank);
        return Ok(out);
    }
    out.rank = Some(rank);
    let ratio = g.mul_ref(&f.invert_localized(&pi(&profile))?);
    let n = match ratio.gauss_valuation() {
        Ok(v) => (Rational::from(1) - v).ceil().to_integer().max(0),
        Err(Error::ZeroWithinTruncation) => 0,
        Err(e) => return Err(e),
    };
    let gn = ratio.mul_p_pow(n);
    let breuil = build_breuil(&profile, &gn)?;
    let report = breuil.verify();
    if let Some(m) = report.modulus() {
        out.modulus = out.modulus.meet(&m);
    }
    out.normalized = Some((gn, n as u32));
    out.breuil = Some((breuil, report));
    out.verdict = Verdict::AdmissibleMixed;
    Ok(out)
}

#[cfg(test)]
mod tests;

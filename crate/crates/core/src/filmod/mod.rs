//! Filtered (φ,∇)-modules over `R_0[1/p]` with `R_0 = W(k)[[Y]]`, their
//! Hodge and Newton numbers, and weak admissibility at the two primes of
//! `Spec R_0/pR_0`: the closed point `Y = 0` and the generic point, whose
//! residue field is reached only through the Gauss valuation.

mod lattice;
pub mod span;

use crate::error::{Error, Result};
use crate::linalg::{
    adjugate, charpoly, column, det, from_columns, identity, map_matrix, mat_add, mat_mul, mat_sub,
    newton_slopes, num_cols, Matrix,
};
use crate::padic::{KElem, Padic};
use crate::profile::Profile;
use crate::ring::{Coeff, Rational, RingElem};
use crate::series::{Modulus, R0Series, RSeries, Series};
use crate::verdict::{Check, Outcome, Report};

pub use lattice::{
    verify_strongly_divisible, PointScalar, PointVal, SD_BASIS, SD_FIL, SD_FIL_DIVISIBLE, SD_PHI_STABLE, SD_SPAN,
};
use span::{find_unit_minor, matrix_zero_outcome, membership, Membership, MinorSearch};

pub const AXIOM_ISOMORPHISM: &str = "1⊗φ isomorphism";
pub const AXIOM_HORIZONTAL: &str = "horizontality";
pub const AXIOM_DECREASING: &str = "filtration decreasing";
pub const AXIOM_SEPARATED: &str = "filtration separated";
pub const AXIOM_EXHAUSTIVE: &str = "filtration exhaustive";
pub const AXIOM_PROJECTIVE: &str = "graded pieces projective";
pub const AXIOM_GRIFFITHS: &str = "Griffiths transversality";

/// One step of the filtration: `Fil^j D_R` for `j` in `(previous weight, weight]`
/// is the `R[1/p]`-span of the columns of `generators`.
#[derive(Clone, Debug)]
pub struct FilStep {
    pub weight: i32,
    pub generators: Matrix<RSeries>,
}

/// Which prime of `Spec R_0/pR_0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Point {
    Closed,
    Generic,
}

impl Point {
    pub fn name(self) -> &'static str {
        match self {
            Point::Closed => "closed",
            Point::Generic => "generic",
        }
    }
}

/// A subobject `D' ⊂ D` given by generator columns over `R_0[1/p]`.
#[derive(Clone, Debug)]
pub struct Subobject {
    pub generators: Matrix<R0Series>,
}

impl Subobject {
    pub fn rank(&self) -> usize {
        num_cols(&self.generators)
    }
}

/// Specialization at `Y = 0`: a filtered φ-module over `W(k)[1/p]`.
#[derive(Clone, Debug)]
pub struct PointModule {
    pub frobenius: Matrix<Padic>,
    pub connection: Matrix<Padic>,
    pub filtration: Vec<(i32, Matrix<KElem>)>,
}

impl PointModule {
    /// Generators of `Fil^j`: the step with the smallest weight `≥ j`.
    pub fn fil(&self, j: i32) -> Option<&Matrix<KElem>> {
        self.filtration.iter().find(|(w, _)| *w >= j).map(|(_, g)| g)
    }
}

#[derive(Clone, Debug)]
pub struct FilteredModule {
    profile: Profile,
    frobenius: Matrix<R0Series>,
    connection: Matrix<R0Series>,
    steps: Vec<FilStep>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PointNumbers {
    pub closed: Rational,
    pub generic: Rational,
}

impl PointNumbers {
    pub fn at(&self, p: Point) -> Rational {
        match p {
            Point::Closed => self.closed,
            Point::Generic => self.generic,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubobjectMode {
    Supplied,
    /// Distinct slopes: the coordinate lines are all the rank-1 subobjects.
    AutoDistinctSlopes,
    /// Equal slopes `s`: the subobject scan reduces to `max{j : Fil^j ≠ 0} ≤ s`.
    AutoEqualSlopes,
}

impl SubobjectMode {
    pub fn name(&self) -> &'static str {
        match self {
            SubobjectMode::Supplied => "supplied",
            SubobjectMode::AutoDistinctSlopes => "auto (distinct slopes)",
            SubobjectMode::AutoEqualSlopes => "auto (equal slopes)",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SubobjectResult {
    pub label: String,
    pub hodge: i64,
    pub newton: PointNumbers,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct WeakAdmissibility {
    pub mode: SubobjectMode,
    pub hodge: i64,
    pub newton: PointNumbers,
    pub subobjects: Vec<SubobjectResult>,
    /// `(max{j : Fil^j ≠ 0}, s)` in the equal-slope mode.
    pub filtration_bound: Option<(i32, i64)>,
    pub holds: bool,
    pub modulus: Modulus,
}

impl FilteredModule {
    /// `frobenius[i][j]` is the coefficient of `e_i` in `φ(e_j)`; likewise for
    /// the connection. Steps may come in any order; when no step has weight
    /// `≤ 0` the step `Fil^0 = D_R` is supplied implicitly.
    pub fn new(
        profile: &Profile,
        frobenius: Matrix<R0Series>,
        connection: Matrix<R0Series>,
        mut steps: Vec<FilStep>,
    ) -> Result<Self> {
        let n = frobenius.len();
        if n == 0 {
            return Err(Error::Shape("rank must be at least 1".into()));
        }
        let my = profile.my();
        let square = |m: &Matrix<R0Series>, what: &str| -> Result<()> {
            if m.len() != n || m.iter().any(|r| r.len() != n) {
                return Err(Error::Shape(format!("{what} must be {n}×{n}")));
            }
            if m.iter().flatten().any(|s| s.len() != my) {
                return Err(Error::Shape(format!("{what} entries must have length {my}")));
            }
            Ok(())
        };
        square(&frobenius, "frobenius")?;
        square(&connection, "connection")?;
        for st in &steps {
            if st.generators.len() != n {
                return Err(Error::Shape(format!("Fil^{} generators need {n} rows", st.weight)));
            }
            let r = num_cols(&st.generators);
            if st.generators.iter().any(|row| row.len() != r) {
                return Err(Error::Shape(format!("Fil^{} generator rows differ in length", st.weight)));
            }
            if st.generators.iter().flatten().any(|s| s.len() != my) {
                return Err(Error::Shape(format!("Fil^{} entries must have length {my}", st.weight)));
            }
        }
        steps.sort_by_key(|s| s.weight);
        if steps.windows(2).any(|w| w[0].weight == w[1].weight) {
            return Err(Error::Shape("repeated filtration weight".into()));
        }
        if steps.first().map_or(true, |s| s.weight > 0) {
            let one = profile.k().one();
            steps.insert(0, FilStep { weight: 0, generators: identity(&Series::one(&one, my), n) });
        }
        Ok(FilteredModule { profile: profile.clone(), frobenius, connection, steps })
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn rank(&self) -> usize {
        self.frobenius.len()
    }

    pub fn frobenius(&self) -> &Matrix<R0Series> {
        &self.frobenius
    }

    pub fn connection(&self) -> &Matrix<R0Series> {
        &self.connection
    }

    pub fn steps(&self) -> &[FilStep] {
        &self.steps
    }

    fn p_elem(&self) -> Padic {
        self.profile.k0().p_elem()
    }

    fn pi(&self) -> KElem {
        self.profile.k().uniformizer()
    }

    fn r0_zero(&self) -> R0Series {
        Series::zero(&self.profile.k0().zero(), self.profile.my())
    }

    fn r_zero(&self) -> RSeries {
        Series::zero(&self.profile.k().zero(), self.profile.my())
    }

    fn to_r(&self, m: &Matrix<R0Series>) -> Matrix<RSeries> {
        let k = self.profile.k();
        map_matrix(m, |s| s.to_k(k))
    }

    /// Generators of `Fil^j D_R`.
    pub fn fil(&self, j: i32) -> Matrix<RSeries> {
        match self.steps.iter().find(|s| s.weight >= j) {
            Some(s) => s.generators.clone(),
            None => vec![Vec::new(); self.rank()],
        }
    }

    pub fn max_weight(&self) -> i32 {
        self.steps.last().map_or(0, |s| s.weight)
    }

    /// `φ` on a column vector: `Φ · φ(v)`.
    pub fn apply_phi(&self, v: &[R0Series]) -> Vec<R0Series> {
        let fv: Vec<R0Series> = v.iter().map(|s| s.frobenius()).collect();
        crate::linalg::mat_vec(&self.frobenius, &fv)
    }

    /// `∇` on a column vector of `D_R`, as the coefficient of `dY`.
    fn apply_nabla_r(&self, v: &[RSeries], n_r: &Matrix<RSeries>) -> Vec<RSeries> {
        let nv = crate::linalg::mat_vec(n_r, v);
        v.iter().zip(nv).map(|(a, b)| a.derivative().add_ref(&b)).collect()
    }

    fn apply_nabla(&self, v: &[R0Series]) -> Vec<R0Series> {
        let nv = crate::linalg::mat_vec(&self.connection, v);
        v.iter().zip(nv).map(|(a, b)| a.derivative().add_ref(&b)).collect()
    }

    pub fn det_frobenius(&self) -> R0Series {
        det(&self.frobenius)
    }

    /// Checks every axiom; never fails outright.
    pub fn validate(&self) -> Report {
        let mut report = Report::default();
        let p = self.p_elem();
        let pi = self.pi();

        // det Φ = p^a · (unit of R_0)
        let d = self.det_frobenius();
        let outcome = match d.is_unit_after_inverting_p(&p) {
            Ok(true) => Outcome::Pass,
            Ok(false) => {
                let deg = d.primitive_part(&p).and_then(|(_, q)| q.weierstrass_degree());
                Outcome::Fail(match deg {
                    Ok(k) => format!("det Φ has Weierstrass degree {k}"),
                    Err(e) => e.to_string(),
                })
            }
            Err(Error::ZeroWithinTruncation) => Outcome::Fail("det Φ vanishes within the truncation".into()),
            Err(e) => Outcome::from_error(&e),
        };
        report.push(Check::new(AXIOM_ISOMORPHISM, outcome, d.modulus()));

        // ∇(φ(e_j)) = (φ ⊗ φ)(∇ e_j) with φ(dY) = pY^{p-1} dY gives
        // ∂Φ + N·Φ = p·Y^{p-1}·Φ·φ(N).
        let dphi = map_matrix(&self.frobenius, |s| s.derivative());
        let lhs = mat_add(&dphi, &mat_mul(&self.connection, &self.frobenius));
        let phi_n = map_matrix(&self.connection, |s| s.frobenius());
        let py = {
            let pm1 = self.profile.p() as usize - 1;
            Series::constant(&p, self.profile.my()).shift_up(pm1)
        };
        let rhs = map_matrix(&mat_mul(&self.frobenius, &phi_n), |s| s.mul_ref(&py));
        let (outcome, modulus) = matrix_zero_outcome(&mat_sub(&lhs, &rhs));
        report.push(Check::new(AXIOM_HORIZONTAL, outcome, modulus));

        // exhaustive: the lowest step spans D_R
        let lowest = &self.steps[0];
        let outcome = if num_cols(&lowest.generators) != self.rank() {
            Outcome::Fail(format!(
                "Fil^{} has {} generators, rank is {}",
                lowest.weight,
                num_cols(&lowest.generators),
                self.rank()
            ))
        } else {
            match find_unit_minor(&lowest.generators, &pi) {
                MinorSearch::Unit(_) => Outcome::Pass,
                MinorSearch::NonzeroOnly | MinorSearch::AllZero => {
                    Outcome::Fail(format!("Fil^{} does not span D_R", lowest.weight))
                }
                MinorSearch::Undecided(why) => Outcome::Inconclusive(why),
            }
        };
        report.push(Check::new(AXIOM_EXHAUSTIVE, outcome, self.fil_modulus()));

        // separated: Fil^j = 0 for j above the top weight, by the step convention
        report.push(Check::new(AXIOM_SEPARATED, Outcome::Pass, self.fil_modulus()));

        // projective graded pieces: every step is a direct summand
        let mut outcome = Outcome::Pass;
        for st in &self.steps {
            match find_unit_minor(&st.generators, &pi) {
                MinorSearch::Unit(_) => {}
                MinorSearch::NonzeroOnly => {
                    outcome = Outcome::Fail(format!("Fil^{} is not a direct summand", st.weight));
                    break;
                }
                MinorSearch::AllZero => {
                    outcome = Outcome::Inconclusive(format!(
                        "Fil^{} generators are rank-deficient at truncation",
                        st.weight
                    ));
                }
                MinorSearch::Undecided(why) => outcome = Outcome::Inconclusive(why),
            }
        }
        report.push(Check::new(AXIOM_PROJECTIVE, outcome, self.fil_modulus()));

        // decreasing: each step lies in the previous one
        let mut outcome = Outcome::Pass;
        let mut modulus = self.fil_modulus();
        'outer: for w in self.steps.windows(2) {
            for j in 0..num_cols(&w[1].generators) {
                match membership(&w[0].generators, &column(&w[1].generators, j), &pi) {
                    Ok(m) => {
                        modulus = modulus.meet(m.modulus());
                        if !m.is_member() {
                            outcome = Outcome::Fail(format!("Fil^{} ⊄ Fil^{}", w[1].weight, w[0].weight));
                            break 'outer;
                        }
                    }
                    Err(e) => outcome = Outcome::from_error(&e),
                }
            }
        }
        report.push(Check::new(AXIOM_DECREASING, outcome, modulus));

        // Griffiths: ∇ Fil^j ⊆ Fil^{j-1} ⊗ dY, checked on generators
        let n_r = self.to_r(&self.connection);
        let mut outcome = Outcome::Pass;
        let mut modulus = self.fil_modulus().with("Y", self.profile.my() - 1);
        'g: for st in &self.steps[1..] {
            let target = self.fil(st.weight - 1);
            for j in 0..num_cols(&st.generators) {
                let v = self.apply_nabla_r(&column(&st.generators, j), &n_r);
                match membership(&target, &v, &pi) {
                    Ok(m) => {
                        modulus = modulus.meet(m.modulus());
                        if !m.is_member() {
                            outcome = Outcome::Fail(format!(
                                "∇ of generator {j} of Fil^{} leaves Fil^{}",
                                st.weight,
                                st.weight - 1
                            ));
                            break 'g;
                        }
                    }
                    Err(e) => outcome = Outcome::from_error(&e),
                }
            }
        }
        report.push(Check::new(AXIOM_GRIFFITHS, outcome, modulus));
        report
    }

    fn fil_modulus(&self) -> Modulus {
        let mut m = Modulus::new(None).with("Y", self.profile.my());
        for st in &self.steps {
            for s in st.generators.iter().flatten() {
                m = m.meet(&s.modulus());
            }
        }
        m
    }

    fn step_rank(&self, st: &FilStep) -> Result<usize> {
        match find_unit_minor(&st.generators, &self.pi()) {
            MinorSearch::Unit(_) | MinorSearch::NonzeroOnly => Ok(num_cols(&st.generators)),
            MinorSearch::AllZero => Err(Error::RankUndetermined(format!(
                "Fil^{} generators have no nonzero maximal minor",
                st.weight
            ))),
            MinorSearch::Undecided(why) => Err(Error::RankUndetermined(why)),
        }
    }

    /// `t_H(D) = Σ_j j · rank gr^j D_R`.
    pub fn hodge_number(&self) -> Result<i64> {
        let ranks: Vec<usize> = self.steps.iter().map(|s| self.step_rank(s)).collect::<Result<_>>()?;
        let mut t = 0i64;
        for (k, st) in self.steps.iter().enumerate() {
            let next = ranks.get(k + 1).copied().unwrap_or(0);
            t += st.weight as i64 * (ranks[k] as i64 - next as i64);
        }
        Ok(t)
    }

    pub fn specialize_closed(&self) -> PointModule {
        let ev0 = |m: &Matrix<R0Series>| map_matrix(m, |s| s.eval_zero());
        PointModule {
            frobenius: ev0(&self.frobenius),
            connection: ev0(&self.connection),
            filtration: self
                .steps
                .iter()
                .map(|s| (s.weight, map_matrix(&s.generators, |x| x.eval_zero())))
                .collect(),
        }
    }

    /// Sum of the Newton slopes at a point. The Newton number of a φ-module
    /// is the valuation of the determinant of any of its Frobenius matrices:
    /// a change of basis by `A` multiplies the determinant by
    /// `σ(det A)/det A`, a unit. So specializing `det Φ` suffices, at
    /// `Y = 0` for the closed point and through the Gauss valuation for the
    /// generic one.
    pub fn newton_number(&self, point: Point) -> Result<Rational> {
        det_valuation(&self.det_frobenius(), point)
    }

    /// Slopes at the closed point: the Newton polygon of the characteristic
    /// polynomial of `Φ_0 σ(Φ_0) ⋯ σ^{m-1}(Φ_0)`, the matrix of `φ^m`,
    /// rescaled by `1/m`.
    pub fn newton_slopes_closed(&self) -> Result<Vec<Rational>> {
        newton_slopes_point(&self.specialize_closed().frobenius, self.profile.spec.m)
    }

    pub fn newton_numbers(&self) -> Result<PointNumbers> {
        Ok(PointNumbers { closed: self.newton_number(Point::Closed)?, generic: self.newton_number(Point::Generic)? })
    }

    /// `Φ'` with `φ(V) = V·Φ'`, for a φ-stable subobject spanned by `V`.
    pub fn subobject_frobenius(&self, sub: &Subobject) -> Result<Matrix<R0Series>> {
        let p = self.p_elem();
        let v = &sub.generators;
        let mut cols = Vec::new();
        for j in 0..sub.rank() {
            let w = self.apply_phi(&column(v, j));
            match membership(v, &w, &p)? {
                Membership::Member { coords, .. } => cols.push(coords),
                Membership::NotMember { modulus } => {
                    return Err(Error::InvalidSubobject(format!("not φ-stable {modulus}")))
                }
            }
        }
        Ok(from_columns(&cols, sub.rank()))
    }

    pub fn validate_subobject(&self, sub: &Subobject) -> Report {
        let mut report = Report::default();
        let p = self.p_elem();
        let base = Modulus::new(None).with("Y", self.profile.my());
        if sub.generators.len() != self.rank() || sub.rank() == 0 || sub.rank() > self.rank() {
            report.push(Check::new("subobject shape", Outcome::Fail("bad generator matrix".into()), base));
            return report;
        }
        let outcome = match find_unit_minor(&sub.generators, &p) {
            MinorSearch::Unit(_) => Outcome::Pass,
            MinorSearch::NonzeroOnly => Outcome::Fail("quotient has torsion".into()),
            MinorSearch::AllZero => Outcome::Inconclusive("generators rank-deficient at truncation".into()),
            MinorSearch::Undecided(why) => Outcome::Inconclusive(why),
        };
        report.push(Check::new("saturated", outcome, base.clone()));
        for (name, f) in [("φ-stable", 0), ("∇-stable", 1)] {
            let mut outcome = Outcome::Pass;
            let mut modulus = base.clone();
            for j in 0..sub.rank() {
                let col = column(&sub.generators, j);
                let w = if f == 0 { self.apply_phi(&col) } else { self.apply_nabla(&col) };
                match membership(&sub.generators, &w, &p) {
                    Ok(m) => {
                        modulus = modulus.meet(m.modulus());
                        if !m.is_member() {
                            outcome = Outcome::Fail(format!("generator {j} leaves the span"));
                            break;
                        }
                    }
                    Err(e) => outcome = Outcome::from_error(&e),
                }
            }
            report.push(Check::new(name, outcome, modulus));
        }
        report
    }

    pub fn subobject_newton_number(&self, sub: &Subobject, point: Point) -> Result<Rational> {
        det_valuation(&det(&self.subobject_frobenius(sub)?), point)
    }

    /// Largest `j` with the (rank-1) generator in `Fil^j D_R`.
    pub fn subobject_hodge_number(&self, sub: &Subobject) -> Result<i64> {
        if sub.rank() != 1 {
            return Err(Error::UnsupportedShape("subobject Hodge numbers need rank 1".into()));
        }
        let k = self.profile.k();
        let v: Vec<RSeries> = column(&sub.generators, 0).iter().map(|s| s.to_k(k)).collect();
        let pi = self.pi();
        let mut t = self.steps[0].weight as i64;
        for st in &self.steps[1..] {
            if membership(&st.generators, &v, &pi)?.is_member() {
                t = st.weight as i64;
            } else {
                break;
            }
        }
        Ok(t)
    }

    /// `Some((valuations of the diagonal))` when `N = 0` and `Φ` is a
    /// constant diagonal matrix.
    pub fn constant_diagonal_slopes(&self) -> Option<Vec<i64>> {
        if self.connection.iter().flatten().any(|s| !s.is_zero()) {
            return None;
        }
        let mut out = Vec::new();
        for (i, row) in self.frobenius.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                let higher_zero = s.known()[1..].iter().all(|c| c.is_zero());
                if !higher_zero || (i != j && !s.is_zero()) {
                    return None;
                }
            }
            out.push(row[i].eval_zero().val()?);
        }
        Some(out)
    }

    /// `t_H(D) = t_N(D, 𝔭)` at both points, and `t_H(D') ≤ t_N(D', 𝔭)` for
    /// the subobjects (supplied, or enumerated with `subobjects = None`).
    pub fn check_punctual_weak_admissibility(&self, subobjects: Option<&[Subobject]>) -> Result<WeakAdmissibility> {
        let hodge = self.hodge_number()?;
        let newton = self.newton_numbers()?;
        let mut holds = newton.closed == Rational::from(hodge) && newton.generic == Rational::from(hodge);
        let mut results = Vec::new();
        let mut bound = None;
        let mode;
        let list: Vec<(String, Subobject)> = match subobjects {
            Some(list) => {
                mode = SubobjectMode::Supplied;
                list.iter().enumerate().map(|(i, s)| (format!("supplied #{i}"), s.clone())).collect()
            }
            None => {
                let slopes = self.constant_diagonal_slopes().ok_or_else(|| {
                    Error::AutoModeUnsupported("needs N = 0 and a constant diagonal Φ".into())
                })?;
                match slopes.as_slice() {
                    [_] => {
                        mode = SubobjectMode::AutoDistinctSlopes;
                        Vec::new()
                    }
                    [a, b] if a != b => {
                        mode = SubobjectMode::AutoDistinctSlopes;
                        let one = Series::one(&self.profile.k0().zero(), self.profile.my());
                        let zero = self.r0_zero();
                        vec![
                            ("e1".to_string(), Subobject { generators: vec![vec![one.clone()], vec![zero.clone()]] }),
                            ("e2".to_string(), Subobject { generators: vec![vec![zero], vec![one]] }),
                        ]
                    }
                    [s, _] => {
                        mode = SubobjectMode::AutoEqualSlopes;
                        let pi = self.pi();
                        let mut top = self.steps[0].weight;
                        for st in &self.steps {
                            let nonzero = match find_unit_minor(&st.generators, &pi) {
                                MinorSearch::AllZero => false,
                                _ => num_cols(&st.generators) > 0,
                            };
                            if nonzero {
                                top = st.weight;
                            }
                        }
                        bound = Some((top, *s));
                        holds &= (top as i64) <= *s;
                        Vec::new()
                    }
                    _ => return Err(Error::AutoModeUnsupported("rank above 2".into())),
                }
            }
        };
        for (label, sub) in list {
            let report = self.validate_subobject(&sub);
            if let Some(c) = report.first_failure() {
                return Err(Error::InvalidSubobject(format!("{label}: {c}")));
            }
            if !report.is_conclusive() {
                return Err(Error::MembershipInconclusive(format!("{label}: subobject checks inconclusive")));
            }
            let h = self.subobject_hodge_number(&sub)?;
            let nn = PointNumbers {
                closed: self.subobject_newton_number(&sub, Point::Closed)?,
                generic: self.subobject_newton_number(&sub, Point::Generic)?,
            };
            let ok = Rational::from(h) <= nn.closed && Rational::from(h) <= nn.generic;
            holds &= ok;
            results.push(SubobjectResult { label, hodge: h, newton: nn, holds: ok });
        }
        let modulus = self.det_frobenius().modulus().meet(&self.fil_modulus());
        Ok(WeakAdmissibility { mode, hodge, newton, subobjects: results, filtration_bound: bound, holds, modulus })
    }

    /// The module in the basis `e'_j = Σ_i A_{ij} e_i`, `A ∈ GL_n(R_0)`:
    /// `Φ' = A^{-1} Φ φ(A)`, `N' = A^{-1}(∂A + N A)`, `G' = A^{-1} G`.
    pub fn change_basis(&self, a: &Matrix<R0Series>) -> Result<Self> {
        let d = det(a);
        if !d.eval_zero().is_unit_integral() {
            return Err(Error::DeterminantNotUnit("base change is not in GL_n(R_0)".into()));
        }
        let dinv = d.inverse()?;
        let ainv = map_matrix(&adjugate(a), |s| s.mul_ref(&dinv));
        let phi_a = map_matrix(a, |s| s.frobenius());
        let frobenius = mat_mul(&ainv, &mat_mul(&self.frobenius, &phi_a));
        let da = map_matrix(a, |s| s.derivative());
        let connection = mat_mul(&ainv, &mat_add(&da, &mat_mul(&self.connection, a)));
        let ainv_r = self.to_r(&ainv);
        let steps = self
            .steps
            .iter()
            .map(|s| FilStep {
                weight: s.weight,
                generators: if num_cols(&s.generators) == 0 {
                    s.generators.clone()
                } else {
                    mat_mul(&ainv_r, &s.generators)
                },
            })
            .collect();
        FilteredModule::new(&self.profile, frobenius, connection, steps)
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let (n1, n2) = (self.rank(), other.rank());
        let z0 = self.r0_zero();
        let block = |a: &Matrix<R0Series>, b: &Matrix<R0Series>| -> Matrix<R0Series> {
            (0..n1 + n2)
                .map(|i| {
                    (0..n1 + n2)
                        .map(|j| match (i < n1, j < n1) {
                            (true, true) => a[i][j].clone(),
                            (false, false) => b[i - n1][j - n1].clone(),
                            _ => z0.clone(),
                        })
                        .collect()
                })
                .collect()
        };
        let mut weights: Vec<i32> = self.steps.iter().chain(&other.steps).map(|s| s.weight).collect();
        weights.sort();
        weights.dedup();
        let zr = self.r_zero();
        let steps = weights
            .into_iter()
            .map(|w| {
                let (g1, g2) = (self.fil(w), other.fil(w));
                let (r1, r2) = (num_cols(&g1), num_cols(&g2));
                let generators = (0..n1 + n2)
                    .map(|i| {
                        (0..r1 + r2)
                            .map(|j| match (i < n1, j < r1) {
                                (true, true) => g1[i][j].clone(),
                                (false, false) => g2[i - n1][j - r1].clone(),
                                _ => zr.clone(),
                            })
                            .collect()
                    })
                    .collect();
                FilStep { weight: w, generators }
            })
            .collect();
        FilteredModule::new(
            &self.profile,
            block(&self.frobenius, &other.frobenius),
            block(&self.connection, &other.connection),
            steps,
        )
    }

    /// Generators of `Fil^1` over `K_0`-coefficient series; requires `e = 1`.
    pub fn fil1_base(&self) -> Result<Matrix<R0Series>> {
        if self.profile.e() != 1 {
            return Err(Error::UnsupportedShape("lattice checks need K = W(k)[1/p]".into()));
        }
        if num_cols(&self.fil(2)) != 0 {
            return Err(Error::UnsupportedShape("Hodge–Tate weights must lie in [0, 1]".into()));
        }
        let g = self.fil(1);
        let conv = |s: &RSeries| {
            s.try_map(|c| c.as_base().cloned().ok_or_else(|| Error::UnsupportedShape("π-adic coefficient".into())))
        };
        g.iter().map(|row| row.iter().map(conv).collect()).collect()
    }

    /// Strong divisibility of the `W(k)`-lattice spanned by the columns of
    /// `basis` in the specialization at `Y = 0`.
    pub fn verify_lattice_closed(&self, basis: &Matrix<Padic>, fil1: Option<&Matrix<Padic>>) -> Result<Report> {
        let phi0 = self.specialize_closed().frobenius;
        let g = match fil1 {
            Some(g) => g.clone(),
            None => map_matrix(&self.fil1_base()?, |s| s.eval_zero()),
        };
        Ok(verify_strongly_divisible(basis, &g, &phi0))
    }

    /// The same over `W(k_g)`, with entries of `R_0[1/p]` valued by the
    /// Gauss valuation.
    pub fn verify_lattice_generic(
        &self,
        basis: &Matrix<R0Series>,
        fil1: Option<&Matrix<R0Series>>,
    ) -> Result<Report> {
        let g = match fil1 {
            Some(g) => g.clone(),
            None => self.fil1_base()?,
        };
        Ok(verify_strongly_divisible(basis, &g, &self.frobenius))
    }
}

fn det_valuation(d: &R0Series, point: Point) -> Result<Rational> {
    match point {
        Point::Closed => {
            let d0 = d.eval_zero();
            match d0.val() {
                Some(v) => Ok(Rational::from(v)),
                None => Err(Error::ZeroDeterminant),
            }
        }
        Point::Generic => d.gauss_valuation().map_err(|e| match e {
            Error::ZeroWithinTruncation => Error::ZeroDeterminant,
            other => other,
        }),
    }
}

/// Slopes of the σ-semilinear map with matrix `phi0` over `W(F_{p^m})[1/p]`.
pub fn newton_slopes_point(phi0: &Matrix<Padic>, m: usize) -> Result<Vec<Rational>> {
    let mut lin = phi0.clone();
    let mut twist = phi0.clone();
    for _ in 1..m {
        twist = map_matrix(&twist, |x| x.sigma());
        lin = mat_mul(&lin, &twist);
    }
    let cp = charpoly(&lin);
    let slopes = newton_slopes(&cp)?;
    Ok(slopes.into_iter().map(|s| s / Rational::from(m as i64)).collect())
}

#[cfg(test)]
mod tests;

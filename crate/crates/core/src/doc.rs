//! JSON documents: series literals, filtered modules, jobs, and the
//! exported Breuil modules and classification reports.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bpair::{BElem, Classification, RankVerdict};
use crate::breuil::{BreuilModule, SElem};
use crate::error::{Error, Result};
use crate::filmod::{FilStep, FilteredModule, Point, Subobject, WeakAdmissibility};
use crate::linalg::Matrix;
use crate::padic::{KElem, Padic};
use crate::profile::{kelem_descriptor, padic_descriptor, CoeffDescriptor, PrecisionProfile, Profile};
use crate::ring::{Coeff, Rational, RingElem};
use crate::series::{R0Series, RSeries, Series};
use crate::verdict::Report;

/// `p^scale · Σ coeffs[n] Y^n`, known modulo `Y^valid` (default: the
/// profile's `M_Y`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDoc {
    #[serde(default, skip_serializing_if = "is_zero")]
    pub scale: i64,
    pub coeffs: Vec<CoeffDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valid: Option<usize>,
}

fn is_zero(x: &i64) -> bool {
    *x == 0
}

impl SeriesDoc {
    pub fn ints(c: &[i64]) -> Self {
        SeriesDoc { scale: 0, coeffs: c.iter().map(|&x| CoeffDescriptor::Int(x)).collect(), valid: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDoc {
    pub weight: i32,
    pub generators: Vec<Vec<SeriesDoc>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDoc {
    pub rank: usize,
    pub frobenius: Vec<Vec<SeriesDoc>>,
    /// Omitted means `N = 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<Vec<Vec<SeriesDoc>>>,
    #[serde(default)]
    pub filtration: Vec<StepDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubobjectDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub generators: Vec<Vec<SeriesDoc>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointDoc {
    Closed,
    Generic,
}

impl From<PointDoc> for Point {
    fn from(p: PointDoc) -> Point {
        match p {
            PointDoc::Closed => Point::Closed,
            PointDoc::Generic => Point::Generic,
        }
    }
}

/// A lattice with basis the columns of `basis`; at the closed point each
/// entry must be a constant series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub point: PointDoc,
    pub basis: Vec<Vec<SeriesDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fil1: Option<Vec<Vec<SeriesDoc>>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<PointDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auto: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobDocument {
    pub profile: PrecisionProfile,
    pub module: ModuleDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subobjects: Option<Vec<SubobjectDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattices: Option<Vec<LatticeDoc>>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub options: JobOptions,
}

fn is_default(o: &JobOptions) -> bool {
    *o == JobOptions::default()
}

/// Parses JSON into `T`, reporting the offending field path and position.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let at = if path == "." { String::new() } else { format!(" at `{path}`") };
        Error::Parse(format!("line {} column {}{at}: {inner}", inner.line(), inner.column()))
    })
}

pub fn parse_job(text: &str) -> Result<JobDocument> {
    parse_json(text)
}

fn series_from_doc<C: Coeff>(
    d: &SeriesDoc,
    m: usize,
    zero: &C,
    coeff: impl Fn(&CoeffDescriptor) -> Result<C>,
) -> Result<Series<C>> {
    let mut coeffs = Vec::with_capacity(m);
    for c in d.coeffs.iter().take(m) {
        coeffs.push(coeff(c)?.mul_p_pow(d.scale));
    }
    let s = Series::from_coeffs(zero, coeffs, m);
    Ok(match d.valid {
        Some(v) => s.with_valid(v.min(m)),
        None => s,
    })
}

pub fn r0_series(profile: &Profile, d: &SeriesDoc) -> Result<R0Series> {
    series_from_doc(d, profile.my(), &profile.k0().zero(), |c| profile.padic(c))
}

pub fn r_series(profile: &Profile, d: &SeriesDoc) -> Result<RSeries> {
    series_from_doc(d, profile.my(), &profile.k().zero(), |c| profile.kelem(c))
}

fn matrix<T>(rows: &[Vec<SeriesDoc>], f: impl Fn(&SeriesDoc) -> Result<T>) -> Result<Matrix<T>> {
    rows.iter().map(|r| r.iter().map(&f).collect()).collect()
}

impl ModuleDoc {
    pub fn build(&self, profile: &Profile) -> Result<FilteredModule> {
        if self.frobenius.len() != self.rank {
            return Err(Error::Shape(format!("rank is {} but frobenius has {} rows", self.rank, self.frobenius.len())));
        }
        let phi = matrix(&self.frobenius, |d| r0_series(profile, d))?;
        let n = match &self.connection {
            Some(rows) => matrix(rows, |d| r0_series(profile, d))?,
            None => vec![vec![Series::zero(&profile.k0().zero(), profile.my()); self.rank]; self.rank],
        };
        let steps = self
            .filtration
            .iter()
            .map(|s| Ok(FilStep { weight: s.weight, generators: matrix(&s.generators, |d| r_series(profile, d))? }))
            .collect::<Result<Vec<_>>>()?;
        FilteredModule::new(profile, phi, n, steps)
    }
}

impl SubobjectDoc {
    pub fn build(&self, profile: &Profile) -> Result<Subobject> {
        Ok(Subobject { generators: matrix(&self.generators, |d| r0_series(profile, d))? })
    }
}

/// A lattice ready for verification.
pub enum Lattice {
    Closed { basis: Matrix<Padic>, fil1: Option<Matrix<Padic>> },
    Generic { basis: Matrix<R0Series>, fil1: Option<Matrix<R0Series>> },
}

fn constant_term(s: &R0Series) -> Result<Padic> {
    if s.known().iter().skip(1).any(|c| !c.is_zero()) {
        return Err(Error::Shape("closed-point lattice entries must be constants".into()));
    }
    Ok(s.eval_zero())
}

impl LatticeDoc {
    pub fn build(&self, profile: &Profile) -> Result<Lattice> {
        let basis = matrix(&self.basis, |d| r0_series(profile, d))?;
        let fil1 = self.fil1.as_ref().map(|f| matrix(f, |d| r0_series(profile, d))).transpose()?;
        Ok(match self.point {
            PointDoc::Generic => Lattice::Generic { basis, fil1 },
            PointDoc::Closed => {
                let c = |m: &Matrix<R0Series>| -> Result<Matrix<Padic>> {
                    m.iter().map(|r| r.iter().map(constant_term).collect()).collect()
                };
                Lattice::Closed { basis: c(&basis)?, fil1: fil1.as_ref().map(c).transpose()? }
            }
        })
    }
}

impl JobDocument {
    /// Profile with the command-line overrides applied.
    pub fn profile_with(&self, prec_p: Option<i64>, y: Option<usize>, u: Option<usize>, c: Option<usize>) -> Result<Profile> {
        let mut spec = self.profile.clone();
        if let Some(v) = prec_p {
            spec.prec_p = v;
        }
        if let Some(v) = y {
            spec.prec_y = v;
        }
        if let Some(v) = u {
            spec.prec_u = v;
        }
        if let Some(v) = c {
            spec.prec_c = v;
        }
        spec.build()
    }
}

fn balanced(x: i128, modulus: i128) -> i128 {
    let r = x.rem_euclid(modulus);
    if r > modulus / 2 {
        r - modulus
    } else {
        r
    }
}

/// Compact descriptor: balanced digits, and the precision left out when it
/// is the default for a literal.
fn compact(x: &Padic) -> CoeffDescriptor {
    let cap = x.field().cap();
    let d = padic_descriptor(x);
    let CoeffDescriptor::Scaled { scale, w, prec } = d else {
        return d;
    };
    let rel = prec.map(|a| a - scale);
    let p = x.field().prime() as i128;
    let digits = rel.unwrap_or(cap).clamp(0, cap) as u32;
    let modulus = p.checked_pow(digits).unwrap_or(i128::MAX);
    let w: Vec<i64> = w.iter().map(|&c| balanced(c as i128, modulus) as i64).collect();
    let prec = if rel == Some(cap) { None } else { prec };
    if prec.is_none() && w.len() == 1 && (0..=18).contains(&scale) {
        if let Some(v) = p.checked_pow(scale as u32).and_then(|q| q.checked_mul(w[0] as i128)) {
            if let Ok(v) = i64::try_from(v) {
                return CoeffDescriptor::Int(v);
            }
        }
    }
    if prec.is_none() && scale == 0 && w.len() > 1 {
        return CoeffDescriptor::Poly(w);
    }
    CoeffDescriptor::Scaled { scale, w, prec }
}

fn compact_k(x: &KElem) -> CoeffDescriptor {
    match x.as_base() {
        Some(b) => compact(b),
        None => match kelem_descriptor(x) {
            CoeffDescriptor::Ramified { .. } => CoeffDescriptor::Ramified { pi: x.coeffs().iter().map(compact).collect() },
            d => d,
        },
    }
}

fn series_to_doc<C: Coeff>(s: &Series<C>, f: impl Fn(&C) -> CoeffDescriptor) -> SeriesDoc {
    let known = s.known();
    let last = known.iter().rposition(|c| !(c.is_zero() && c.precision().is_none()));
    let coeffs = match last {
        Some(i) => known[..=i].iter().map(f).collect(),
        None => Vec::new(),
    };
    SeriesDoc { scale: 0, coeffs, valid: (s.valid() < s.len()).then_some(s.valid()) }
}

pub fn r0_to_doc(s: &R0Series) -> SeriesDoc {
    series_to_doc(s, compact)
}

pub fn r_to_doc(s: &RSeries) -> SeriesDoc {
    series_to_doc(s, compact_k)
}

fn matrix_doc<T>(m: &Matrix<T>, f: impl Fn(&T) -> SeriesDoc) -> Vec<Vec<SeriesDoc>> {
    m.iter().map(|r| r.iter().map(&f).collect()).collect()
}

pub fn module_to_doc(d: &FilteredModule) -> ModuleDoc {
    ModuleDoc {
        rank: d.rank(),
        frobenius: matrix_doc(d.frobenius(), r0_to_doc),
        connection: Some(matrix_doc(d.connection(), r0_to_doc)),
        filtration: d
            .steps()
            .iter()
            .map(|s| StepDoc { weight: s.weight, generators: matrix_doc(&s.generators, r_to_doc) })
            .collect(),
    }
}

pub fn rational(r: Rational) -> String {
    r.to_string()
}

fn selem_doc(x: &SElem) -> Value {
    let terms: Vec<Value> = x
        .coeffs()
        .iter()
        .take(x.valid())
        .enumerate()
        .filter(|(_, b)| !b.is_zero())
        .map(|(n, b)| json!({ "n": n, "coeff": r0_to_doc(b) }))
        .collect();
    json!({ "valid_u": x.valid(), "terms": terms })
}

fn selem_pair(v: &[SElem]) -> Value {
    Value::Array(v.iter().map(selem_doc).collect())
}

/// Export of a Breuil module with its witnesses and verification report.
/// Elements of `S` are lists of `(n, b_n)` for `Σ b_n u^n/⌊n/e⌋!`.
pub fn breuil_to_json(m: &BreuilModule, report: &Report) -> Value {
    let w = m.witnesses();
    let frob = m.frobenius_matrix();
    let conn = m.connection_matrix();
    let (a, b) = m.frobenius_exponents();
    json!({
        "basis": ["e1", "e2"],
        "e": m.ring().e(),
        "g1": r_to_doc(m.g1()),
        "fil1_generator": selem_pair(&m.fil1_generator()),
        "frobenius": frob.iter().map(|r| selem_pair(r)).collect::<Vec<_>>(),
        "frobenius_exponents": [a, b],
        "connection": conn.iter().map(|r| selem_pair(r)).collect::<Vec<_>>(),
        "n_derivation": conn.iter().map(|r| selem_pair(r)).collect::<Vec<_>>(),
        "witnesses": {
            "mu": selem_doc(&w.mu),
            "images": w.images.iter().map(|g| selem_pair(g)).collect::<Vec<_>>(),
            "p_e2": w.e2.as_ref().map(|c| json!({ "c2": selem_doc(c) })),
            "p_e1": w.e1.as_ref().map(|(c3, c32)| json!({ "c3": selem_doc(c3), "c32": selem_doc(c32) })),
        },
        "report": report,
        "holds": report.all_pass(),
    })
}

fn belem_doc(x: &BElem) -> Value {
    let parts: Vec<Value> = x
        .degrees()
        .filter_map(|j| {
            let b = x.component(j)?;
            if b.is_zero() {
                return None;
            }
            let (mc, mu) = b.dims();
            let mut terms = Vec::new();
            for i in 0..mc {
                for l in 0..mu {
                    if b.is_known(i, l) && !b.coeff(i, l).is_zero() {
                        terms.push(json!({ "c": i, "u": l, "coeff": compact_k(b.coeff(i, l)) }));
                    }
                }
            }
            Some(json!({ "t": j, "terms": terms }))
        })
        .collect();
    Value::Array(parts)
}

pub fn weak_admissibility_json(wa: &WeakAdmissibility) -> Value {
    json!({
        "mode": wa.mode.name(),
        "holds": wa.holds,
        "hodge": wa.hodge,
        "newton": { "closed": rational(wa.newton.closed), "generic": rational(wa.newton.generic) },
        "subobjects": wa.subobjects.iter().map(|s| json!({
            "label": s.label,
            "hodge": s.hodge,
            "newton": { "closed": rational(s.newton.closed), "generic": rational(s.newton.generic) },
            "holds": s.holds,
        })).collect::<Vec<_>>(),
        "filtration_bound": wa.filtration_bound.map(|(j, s)| json!({ "max_weight": j, "slope": s })),
        "modulus": wa.modulus.to_string(),
    })
}

pub fn rank_json(r: &RankVerdict) -> Value {
    json!({
        "rank": r.rank,
        "weierstrass_degree_f": r.weierstrass_degree,
        "complement": { "h": r.complement.0, "r": r.complement.1 },
        "solutions": r.solutions.iter().map(|s| json!({
            "label": s.label,
            "x": belem_doc(&s.x),
            "y1": belem_doc(&s.y1),
            "s": belem_doc(&s.s),
            "z": belem_doc(&s.z),
        })).collect::<Vec<_>>(),
        "report": r.report,
    })
}

pub fn classification_to_json(c: &Classification) -> Value {
    let mut checks = c.validation.clone();
    if let Some(b) = &c.bpair {
        checks.checks.extend(b.report.checks.iter().cloned());
    }
    json!({
        "verdict": c.verdict.name(),
        "modulus": c.modulus.to_string(),
        "hodge": c.hodge,
        "newton": { "closed": rational(c.newton.closed), "generic": rational(c.newton.generic) },
        "weak_admissibility": weak_admissibility_json(&c.weak_admissibility),
        "generator": c.generator.as_ref().map(|(f, g)| json!({ "f": r_to_doc(f), "g": r_to_doc(g) })),
        "vcris": c.rank.as_ref().map(rank_json),
        "wdr_basis": c.bpair.as_ref().map(|b| json!({
            "we_basis": b.we_basis.iter().map(|(k, i)| json!({ "t": k, "e": i + 1 })).collect::<Vec<_>>(),
            "vectors": b.wdr_basis.iter().map(|row| row.iter().map(belem_doc).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })),
        "normalized": c.normalized.as_ref().map(|(g, n)| json!({ "g": r_to_doc(g), "n": n })),
        "breuil": c.breuil.as_ref().map(|(m, r)| breuil_to_json(m, r)),
        "checks": checks,
    })
}

/// `Φ`, `N` and `Fil` of `d` converted back to `R_0`/`R` matrices, for
/// comparisons after a round trip.
pub fn module_agrees(a: &FilteredModule, b: &FilteredModule) -> bool {
    let eq = |x: &Matrix<R0Series>, y: &Matrix<R0Series>| {
        x.len() == y.len() && x.iter().flatten().zip(y.iter().flatten()).all(|(s, t)| s.agrees_with(t) && s.valid() == t.valid())
    };
    let eqr = |x: &Matrix<RSeries>, y: &Matrix<RSeries>| {
        x.len() == y.len()
            && x.iter().zip(y).all(|(r, q)| r.len() == q.len())
            && x.iter().flatten().zip(y.iter().flatten()).all(|(s, t)| s.agrees_with(t) && s.valid() == t.valid())
    };
    eq(a.frobenius(), b.frobenius())
        && eq(a.connection(), b.connection())
        && a.steps().len() == b.steps().len()
        && a.steps().iter().zip(b.steps()).all(|(s, t)| s.weight == t.weight && eqr(&s.generators, &t.generators))
}

#[cfg(test)]
mod tests {
    use super::*;

    const COUNTER: &str = r#"{
        "profile": {"p": 3, "prec_p": 12, "prec_y": 8, "prec_u": 12, "prec_c": 8},
        "module": {
            "rank": 2,
            "frobenius": [[{"coeffs": [3]}, {"coeffs": []}], [{"coeffs": []}, {"coeffs": [1]}]],
            "filtration": [{"weight": 1, "generators": [[{"coeffs": [3, 1]}], [{"coeffs": [1]}]]}]
        }
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let job = parse_job(COUNTER).unwrap();
        let prof = job.profile_with(None, None, None, None).unwrap();
        let d = job.module.build(&prof).unwrap();
        assert_eq!(d.hodge_number().unwrap(), 1);
        let doc = module_to_doc(&d);
        let again = doc.build(&prof).unwrap();
        assert!(module_agrees(&d, &again));
        assert_eq!(module_to_doc(&again), doc);
        assert_eq!(doc.frobenius[0][0], SeriesDoc::ints(&[3]));
    }

    #[test]
    fn unknown_fields_are_rejected_with_a_path() {
        let bad = COUNTER.replace("\"rank\": 2", "\"rank\": 2, \"colour\": 1");
        let err = parse_job(&bad).unwrap_err().to_string();
        assert!(err.contains("module") && err.contains("colour"), "{err}");
        let bad = COUNTER.replace("[3, 1]", "[3, \"x\"]");
        let err = parse_job(&bad).unwrap_err().to_string();
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn negative_and_scaled_coefficients() {
        let prof = PrecisionProfile::new(5).with_truncation(10, 6, 6, 6).build().unwrap();
        let s = r0_series(&prof, &SeriesDoc { scale: -2, coeffs: vec![CoeffDescriptor::Int(-7)], valid: Some(4) }).unwrap();
        let d = r0_to_doc(&s);
        assert_eq!(d.valid, Some(4));
        let back = r0_series(&prof, &d).unwrap();
        assert!(back.agrees_with(&s));
        assert_eq!(r0_to_doc(&back), d);
        let m1 = r0_to_doc(&r0_series(&prof, &SeriesDoc::ints(&[-1, 0, 2])).unwrap());
        assert_eq!(m1, SeriesDoc::ints(&[-1, 0, 2]));
    }
}

//! Strongly divisible lattices in a filtered φ-module over a point, with
//! Hodge–Tate weights in `[0, 1]`.
//!
//! Coordinates in the lattice basis `B` are `adj(B)·w / det B`, so every
//! integrality question becomes a valuation comparison and no division is
//! performed. At the generic point the scalars are elements of `R_0[1/p]`
//! viewed inside `W(k_g)[1/p]`, where the valuation is the Gauss valuation.

use crate::error::Error;
use crate::linalg::{adjugate, column, det, mat_vec, num_cols, subsets, submatrix, Matrix};
use crate::padic::Padic;
use crate::ring::{Coeff, Rational, RingElem};
use crate::series::{Modulus, R0Series};
use crate::verdict::{Check, Outcome, Report};

pub enum PointVal {
    Val(Rational),
    /// Zero to the given absolute precision (`None`: exactly zero).
    Zero(Option<Rational>),
    Unknown(String),
}

/// Scalars of a point: `W(k)[1/p]` (closed) or `R_0[1/p] ⊂ W(k_g)[1/p]`
/// (generic).
pub trait PointScalar: RingElem {
    fn phi(&self) -> Self;
    fn point_valuation(&self) -> PointVal;
    fn times_p_pow(&self, k: i64) -> Self;
    fn point_modulus(&self) -> Modulus;
}

impl PointScalar for Padic {
    fn phi(&self) -> Self {
        self.sigma()
    }

    fn point_valuation(&self) -> PointVal {
        match self.val() {
            Some(v) => PointVal::Val(Rational::from(v)),
            None if self.is_exact_zero() => PointVal::Zero(None),
            None => PointVal::Zero(Some(Rational::from(self.abs_precision()))),
        }
    }

    fn times_p_pow(&self, k: i64) -> Self {
        self.mul_p_pow(k)
    }

    fn point_modulus(&self) -> Modulus {
        Modulus::new(self.precision())
    }
}

impl PointScalar for R0Series {
    fn phi(&self) -> Self {
        self.frobenius()
    }

    fn point_valuation(&self) -> PointVal {
        match self.gauss_valuation() {
            Ok(v) => PointVal::Val(v),
            Err(Error::ZeroWithinTruncation) => PointVal::Zero(self.precision()),
            Err(e) => PointVal::Unknown(e.to_string()),
        }
    }

    fn times_p_pow(&self, k: i64) -> Self {
        self.mul_p_pow(k)
    }

    fn point_modulus(&self) -> Modulus {
        self.modulus()
    }
}

/// `val(x) - shift ≥ t`, or why it cannot be decided.
fn at_least<T: PointScalar>(x: &T, shift: Rational, t: Rational) -> std::result::Result<bool, String> {
    match x.point_valuation() {
        PointVal::Val(v) => Ok(v - shift >= t),
        PointVal::Zero(None) => Ok(true),
        PointVal::Zero(Some(prec)) if prec - shift >= t => Ok(true),
        PointVal::Zero(Some(prec)) => Err(format!("value known only modulo p^{prec}")),
        PointVal::Unknown(why) => Err(why),
    }
}

/// `val(x) - shift == t`.
fn exactly<T: PointScalar>(x: &T, shift: Rational, t: Rational) -> std::result::Result<bool, String> {
    match x.point_valuation() {
        PointVal::Val(v) => Ok(v - shift == t),
        PointVal::Zero(None) => Ok(false),
        PointVal::Zero(Some(prec)) if prec - shift > t => Ok(false),
        PointVal::Zero(Some(prec)) => Err(format!("value known only modulo p^{prec}")),
        PointVal::Unknown(why) => Err(why),
    }
}

fn integrality<T: PointScalar>(
    adj: &Matrix<T>,
    delta: Rational,
    vectors: &[Vec<T>],
    t: Rational,
    what: &str,
    modulus: &mut Modulus,
) -> Outcome {
    let mut undecided = None;
    for (k, w) in vectors.iter().enumerate() {
        for (i, c) in mat_vec(adj, w).iter().enumerate() {
            *modulus = modulus.meet(&c.point_modulus());
            match at_least(c, delta, t) {
                Ok(true) => {}
                Ok(false) => return Outcome::Fail(format!("{what} #{k}: coordinate {i} has valuation below {t}")),
                Err(why) => undecided = Some(why),
            }
        }
    }
    match undecided {
        Some(why) => Outcome::Inconclusive(why),
        None => Outcome::Pass,
    }
}

/// Some `k×k` minor of `m` has valuation exactly `shift`.
fn unit_minor<T: PointScalar>(m: &Matrix<T>, k: usize, shift: Rational, modulus: &mut Modulus) -> Outcome {
    if k == 0 {
        return Outcome::Pass;
    }
    let rows: Vec<usize> = (0..m.len()).collect();
    let mut undecided = None;
    for cols in subsets(num_cols(m), k) {
        for rs in subsets(rows.len(), k) {
            let d = det(&submatrix(m, &rs, &cols));
            *modulus = modulus.meet(&d.point_modulus());
            match exactly(&d, shift, Rational::from(0)) {
                Ok(true) => return Outcome::Pass,
                Ok(false) => {}
                Err(why) => undecided = Some(why),
            }
        }
    }
    match undecided {
        Some(why) => Outcome::Inconclusive(why),
        None => Outcome::Fail("no maximal minor is a unit".into()),
    }
}

pub const SD_BASIS: &str = "lattice basis invertible";
pub const SD_PHI_STABLE: &str = "(i) Φ(M) ⊆ M";
pub const SD_FIL: &str = "(ii) Fil¹M = Fil¹ ∩ M generated by the given vectors";
pub const SD_FIL_DIVISIBLE: &str = "(iii) Φ(Fil¹M) ⊆ pM";
pub const SD_SPAN: &str = "(iv) Φ(M) + p⁻¹Φ(Fil¹M) = M";

/// Checks conditions (i) to (iv) of strong divisibility for the lattice
/// spanned by the columns of `basis`, with `Fil¹` spanned by the columns of
/// `fil1` and Frobenius `x ↦ phi · φ(x)`.
pub fn verify_strongly_divisible<T: PointScalar>(basis: &Matrix<T>, fil1: &Matrix<T>, phi: &Matrix<T>) -> Report {
    let mut report = Report::default();
    let n = basis.len();
    let mut modulus = Modulus::new(None);
    for x in basis.iter().chain(fil1).chain(phi).flatten() {
        modulus = modulus.meet(&x.point_modulus());
    }
    let d = det(basis);
    let delta = match d.point_valuation() {
        PointVal::Val(v) => v,
        PointVal::Zero(_) => {
            report.push(Check::new(SD_BASIS, Outcome::Fail("det B vanishes".into()), modulus));
            return report;
        }
        PointVal::Unknown(why) => {
            report.push(Check::new(SD_BASIS, Outcome::Inconclusive(why), modulus));
            return report;
        }
    };
    report.push(Check::new(SD_BASIS, Outcome::Pass, modulus.clone()));
    let adj = adjugate(basis);
    let apply = |v: &[T]| -> Vec<T> {
        let fv: Vec<T> = v.iter().map(|x| x.phi()).collect();
        mat_vec(phi, &fv)
    };
    let basis_cols: Vec<Vec<T>> = (0..n).map(|j| column(basis, j)).collect();
    let fil_cols: Vec<Vec<T>> = (0..num_cols(fil1)).map(|j| column(fil1, j)).collect();
    let phi_b: Vec<Vec<T>> = basis_cols.iter().map(|b| apply(b)).collect();
    let phi_f: Vec<Vec<T>> = fil_cols.iter().map(|v| apply(v)).collect();
    let zero = Rational::from(0);

    let mut m1 = modulus.clone();
    let o1 = integrality(&adj, delta, &phi_b, zero, "Φ(basis)", &mut m1);
    report.push(Check::new(SD_PHI_STABLE, o1, m1));

    let mut m2 = modulus.clone();
    let mut o2 = integrality(&adj, delta, &fil_cols, zero, "Fil¹ generator", &mut m2);
    if o2 == Outcome::Pass && !fil_cols.is_empty() {
        // saturation: the coordinate matrix adj(B)·V/det B has a unit r×r minor
        let coords: Vec<Vec<T>> = fil_cols.iter().map(|v| mat_vec(&adj, v)).collect();
        let r = coords.len();
        let cm: Matrix<T> = (0..n).map(|i| coords.iter().map(|c| c[i].clone()).collect()).collect();
        o2 = match unit_minor(&cm, r, delta * Rational::from(r as i64), &mut m2) {
            Outcome::Fail(_) => Outcome::Fail("Fil¹ ∩ M is larger than the span of the given vectors".into()),
            o => o,
        };
    }
    report.push(Check::new(SD_FIL, o2, m2));

    let mut m3 = modulus.clone();
    let o3 = integrality(&adj, delta, &phi_f, Rational::from(1), "Φ(Fil¹ generator)", &mut m3);
    report.push(Check::new(SD_FIL_DIVISIBLE, o3, m3));

    // det(B^{-1} W_S) = det(W_S) / det(B)
    let mut m4 = modulus;
    let mut cols = phi_b;
    cols.extend(phi_f.iter().map(|v| v.iter().map(|x| x.times_p_pow(-1)).collect::<Vec<T>>()));
    let w: Matrix<T> = (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    let o4 = unit_minor_cols(&w, n, delta, &mut m4);
    report.push(Check::new(SD_SPAN, o4, m4));
    report
}

fn unit_minor_cols<T: PointScalar>(w: &Matrix<T>, n: usize, delta: Rational, modulus: &mut Modulus) -> Outcome {
    let rows: Vec<usize> = (0..n).collect();
    let mut undecided = None;
    for cols in subsets(num_cols(w), n) {
        let d = det(&submatrix(w, &rows, &cols));
        *modulus = modulus.meet(&d.point_modulus());
        match exactly(&d, delta, Rational::from(0)) {
            Ok(true) => return Outcome::Pass,
            Ok(false) => {}
            Err(why) => undecided = Some(why),
        }
    }
    match undecided {
        Some(why) => Outcome::Inconclusive(why),
        None => Outcome::Fail("the images do not span M".into()),
    }
}

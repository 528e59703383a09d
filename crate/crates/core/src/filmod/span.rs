//! Spans of columns over `R[1/p]`, decided through a maximal minor that is a
//! unit once `p` is inverted.

use crate::error::{Error, Result};
use crate::linalg::{adjugate, det, mat_vec, num_cols, subsets, submatrix, Matrix};
use crate::ring::{Coeff, Rational, RingElem};
use crate::series::{Modulus, Series};
use crate::verdict::Outcome;

/// Rows of a maximal minor that is a unit in the localization, with the
/// minor itself.
pub struct Pivot<C> {
    pub rows: Vec<usize>,
    pub minor: Series<C>,
}

pub enum MinorSearch<C> {
    Unit(Pivot<C>),
    /// Some minor is nonzero, none is a unit: full rank, not a direct summand.
    NonzeroOnly,
    /// Every minor vanishes within the truncation.
    AllZero,
    Undecided(String),
}

pub fn find_unit_minor<C: Coeff>(g: &Matrix<Series<C>>, pi: &C) -> MinorSearch<C> {
    let n = g.len();
    let r = num_cols(g);
    if r == 0 {
        // the empty minor is 1
        return MinorSearch::Unit(Pivot { rows: Vec::new(), minor: Series::one(pi, 1) });
    }
    if r > n {
        return MinorSearch::AllZero;
    }
    let cols: Vec<usize> = (0..r).collect();
    let mut nonzero = false;
    let mut undecided = None;
    for rows in subsets(n, r) {
        let minor = det(&submatrix(g, &rows, &cols));
        if minor.is_zero() {
            continue;
        }
        nonzero = true;
        match minor.is_unit_after_inverting_p(pi) {
            Ok(true) => return MinorSearch::Unit(Pivot { rows, minor }),
            Ok(false) => {}
            Err(e) => undecided = Some(e.to_string()),
        }
    }
    match (undecided, nonzero) {
        (Some(why), _) => MinorSearch::Undecided(why),
        (None, true) => MinorSearch::NonzeroOnly,
        (None, false) => MinorSearch::AllZero,
    }
}

pub enum Membership<C> {
    /// `v = G·coords` modulo the recorded modulus.
    Member { coords: Vec<Series<C>>, modulus: Modulus },
    NotMember { modulus: Modulus },
}

impl<C> Membership<C> {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }

    pub fn modulus(&self) -> &Modulus {
        match self {
            Membership::Member { modulus, .. } | Membership::NotMember { modulus } => modulus,
        }
    }
}

/// Decides `v ∈ span(G)`. With a unit pivot minor the coordinates are forced,
/// so a nonzero residual is a genuine non-membership.
pub fn membership<C: Coeff>(g: &Matrix<Series<C>>, v: &[Series<C>], pi: &C) -> Result<Membership<C>> {
    let pivot = match find_unit_minor(g, pi) {
        MinorSearch::Unit(p) => p,
        MinorSearch::Undecided(why) => return Err(Error::MembershipInconclusive(why)),
        MinorSearch::NonzeroOnly => {
            return Err(Error::MembershipInconclusive("span is not a direct summand".into()))
        }
        MinorSearch::AllZero => {
            return Err(Error::MembershipInconclusive("generators are rank-deficient at truncation".into()))
        }
    };
    membership_with_pivot(g, v, pi, &pivot)
}

pub fn membership_with_pivot<C: Coeff>(
    g: &Matrix<Series<C>>,
    v: &[Series<C>],
    pi: &C,
    pivot: &Pivot<C>,
) -> Result<Membership<C>> {
    let r = num_cols(g);
    let coords = if r == 0 {
        Vec::new()
    } else {
        let cols: Vec<usize> = (0..r).collect();
        let sub = submatrix(g, &pivot.rows, &cols);
        let inv_det = pivot.minor.invert_localized(pi)?;
        let vi: Vec<Series<C>> = pivot.rows.iter().map(|&i| v[i].clone()).collect();
        mat_vec(&adjugate(&sub), &vi).into_iter().map(|x| x.mul_ref(&inv_det)).collect()
    };
    let residual: Vec<Series<C>> = (0..v.len())
        .map(|i| {
            let mut acc = v[i].clone();
            for (j, x) in coords.iter().enumerate() {
                acc = acc.sub_ref(&g[i][j].mul_ref(x));
            }
            acc
        })
        .collect();
    let modulus = residual_modulus(&residual);
    match zero_outcome(&residual) {
        Outcome::Pass => Ok(Membership::Member { coords, modulus }),
        Outcome::Fail(_) => Ok(Membership::NotMember { modulus }),
        Outcome::Inconclusive(why) => Err(Error::MembershipInconclusive(why)),
    }
}

pub fn residual_modulus<C: Coeff>(res: &[Series<C>]) -> Modulus {
    res.iter()
        .map(|s| s.modulus())
        .reduce(|a, b| a.meet(&b))
        .unwrap_or_else(|| Modulus::new(None))
}

/// Vanishing of a residual, demanding at least one significant p-adic digit
/// so that a pass is never vacuous.
pub fn zero_outcome<C: Coeff>(res: &[Series<C>]) -> Outcome {
    if let Some((i, s)) = res.iter().enumerate().find(|(_, s)| !s.is_zero()) {
        let deg = s.known().iter().position(|c| !c.is_zero()).unwrap_or(0);
        return Outcome::Fail(format!("entry {i} has a nonzero coefficient at Y^{deg}"));
    }
    if res.iter().any(|s| s.valid() == 0) {
        return Outcome::Inconclusive("residual has no known coefficients".into());
    }
    let prec = res.iter().filter_map(|s| s.precision()).min();
    match prec {
        Some(p) if p < Rational::from(1) => {
            Outcome::Inconclusive(format!("residual is known only modulo p^{p}"))
        }
        _ => Outcome::Pass,
    }
}

pub fn matrix_zero_outcome<C: Coeff>(m: &Matrix<Series<C>>) -> (Outcome, Modulus) {
    let flat: Vec<Series<C>> = m.iter().flatten().cloned().collect();
    (zero_outcome(&flat), residual_modulus(&flat))
}

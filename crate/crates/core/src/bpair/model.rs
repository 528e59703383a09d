//! A truncated model of the period ring generated by `c`, `u` and `t^{±1}`
//! over `K`.
//!
//! An element is a finite sum `Σ_j t^j F_j(c, u)` with `|j| ≤ J`. No relation
//! between `t`, `c` and `u` is imposed. Every identity checked here is a
//! universal polynomial identity in the coefficients of the input series,
//! so it holds in the actual period ring whenever it holds in this free
//! model. What the model cannot see is topology: that a formal solution
//! lands in the right completion is assumed, not checked.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::padic::{KElem, Ramified};
use crate::ring::{Coeff, Rational, RingElem};
use crate::series::{taylor_shift, Bivariate, Modulus, RSeries, Series};
use crate::verdict::Outcome;

pub type Biv = Bivariate<KElem>;

/// Truncation data shared by the elements of one computation.
#[derive(Clone)]
pub struct BModel {
    k: Arc<Ramified>,
    mc: usize,
    mu: usize,
    window: i32,
}

impl fmt::Debug for BModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BModel(c^{}, u^{}, |t| ≤ {})", self.mc, self.mu, self.window)
    }
}

impl BModel {
    pub fn new(k: &Arc<Ramified>, mc: usize, mu: usize, window: i32) -> Self {
        BModel { k: k.clone(), mc, mu, window }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.mc, self.mu)
    }

    pub fn window(&self) -> i32 {
        self.window
    }

    pub fn field(&self) -> &Arc<Ramified> {
        &self.k
    }

    pub fn biv_zero(&self) -> Biv {
        Bivariate::zero(&self.k.zero(), self.mc, self.mu)
    }

    pub fn biv_one(&self) -> Biv {
        Bivariate::one(&self.k.zero(), self.mc, self.mu)
    }

    pub fn biv_c(&self) -> Biv {
        Bivariate::var_c(&self.k.zero(), self.mc, self.mu)
    }

    pub fn biv_u(&self) -> Biv {
        Bivariate::var_u(&self.k.zero(), self.mc, self.mu)
    }

    /// `f(c)`.
    pub fn at_c(&self, f: &RSeries) -> Biv {
        let zero = self.k.zero();
        let coeffs: Vec<KElem> = (0..self.mc).map(|i| if i < f.len() { f.coeff(i).clone() } else { zero.clone() }).collect();
        let s = Series::from_coeffs(&zero, coeffs, self.mc).with_valid(f.valid().min(self.mc));
        Bivariate::from_c_series(&s, self.mu)
    }

    /// `f(Y)` with `Y = c + u`.
    pub fn at_y(&self, f: &RSeries) -> Biv {
        taylor_shift(f, self.mc, self.mu)
    }

    pub fn zero(&self) -> BElem {
        BElem { model: self.clone(), parts: BTreeMap::new() }
    }

    pub fn one(&self) -> BElem {
        self.embed(self.biv_one())
    }

    pub fn embed(&self, b: Biv) -> BElem {
        self.graded(0, b).expect("degree 0 is inside every window")
    }

    /// `t^j · b`.
    pub fn graded(&self, j: i32, b: Biv) -> Result<BElem> {
        if j.abs() > self.window {
            return Err(Error::TWindowExceeded(j));
        }
        let mut parts = BTreeMap::new();
        parts.insert(j, b);
        Ok(BElem { model: self.clone(), parts })
    }

    pub fn t_pow(&self, j: i32) -> Result<BElem> {
        self.graded(j, self.biv_one())
    }
}

#[derive(Clone)]
pub struct BElem {
    model: BModel,
    parts: BTreeMap<i32, Biv>,
}

impl BElem {
    pub fn model(&self) -> &BModel {
        &self.model
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.parts.keys().copied()
    }

    pub fn component(&self, j: i32) -> Option<&Biv> {
        self.parts.get(&j)
    }

    pub fn component_or_zero(&self, j: i32) -> Biv {
        self.parts.get(&j).cloned().unwrap_or_else(|| self.model.biv_zero())
    }

    fn combine(&self, other: &BElem, f: impl Fn(&Biv, &Biv) -> Biv) -> BElem {
        let mut parts = BTreeMap::new();
        let keys: std::collections::BTreeSet<i32> = self.parts.keys().chain(other.parts.keys()).copied().collect();
        for j in keys {
            parts.insert(j, f(&self.component_or_zero(j), &other.component_or_zero(j)));
        }
        BElem { model: self.model.clone(), parts }
    }

    pub fn add(&self, other: &BElem) -> BElem {
        self.combine(other, |a, b| a.add_ref(b))
    }

    pub fn sub(&self, other: &BElem) -> BElem {
        self.combine(other, |a, b| a.sub_ref(b))
    }

    pub fn neg(&self) -> BElem {
        self.map(|b| b.neg_ref())
    }

    pub fn map(&self, f: impl Fn(&Biv) -> Biv) -> BElem {
        BElem { model: self.model.clone(), parts: self.parts.iter().map(|(j, b)| (*j, f(b))).collect() }
    }

    /// Product with a degree-0 element.
    pub fn times(&self, b: &Biv) -> BElem {
        self.map(|x| x.mul_ref(b))
    }

    pub fn mul(&self, other: &BElem) -> Result<BElem> {
        let mut out = self.model.zero();
        for (i, a) in &self.parts {
            for (j, b) in &other.parts {
                let d = i + j;
                if d.abs() > self.model.window {
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    return Err(Error::TWindowExceeded(d));
                }
                let term = a.mul_ref(b);
                let acc = out.component_or_zero(d).add_ref(&term);
                out.parts.insert(d, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_t(&self, k: i32) -> Result<BElem> {
        let mut parts = BTreeMap::new();
        for (j, b) in &self.parts {
            let d = j + k;
            if d.abs() > self.model.window && !b.is_zero() {
                return Err(Error::TWindowExceeded(d));
            }
            if d.abs() <= self.model.window {
                parts.insert(d, b.clone());
            }
        }
        Ok(BElem { model: self.model.clone(), parts })
    }

    /// Lowest `t`-degree carrying a nonzero component.
    pub fn min_degree(&self) -> Option<i32> {
        self.parts.iter().find(|(_, b)| !b.is_zero()).map(|(j, _)| *j)
    }

    pub fn is_zero(&self) -> bool {
        self.parts.values().all(|b| b.is_zero())
    }

    /// `c ↦ Y`, `u ↦ 0`, `t ↦ 0`, defined in nonnegative `t`-degree.
    pub fn theta(&self) -> Result<RSeries> {
        if self.parts.iter().any(|(j, b)| *j < 0 && !b.is_zero()) {
            return Err(Error::NegativeTDegree);
        }
        Ok(self.component_or_zero(0).eval_u0())
    }

    pub fn modulus(&self) -> Modulus {
        self.parts.values().map(|b| b.modulus()).reduce(|a, b| a.meet(&b)).unwrap_or_else(|| self.model.biv_zero().modulus())
    }
}

impl fmt::Debug for BElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, b) in &self.parts {
            if b.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "t^{j}·({b:?})")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `lhs = rhs` coefficientwise. A coefficient that cancels must do so with
/// at least one significant digit relative to the larger of the two sides,
/// so that large denominators do not make a pass vacuous.
pub fn identity_outcome(lhs: &BElem, rhs: &BElem) -> Outcome {
    let keys: std::collections::BTreeSet<i32> = lhs.parts.keys().chain(rhs.parts.keys()).copied().collect();
    let (mc, mu) = lhs.model.dims();
    let mut known_any = false;
    let mut weak = None;
    for j in keys {
        let (l, r) = (lhs.component_or_zero(j), rhs.component_or_zero(j));
        let d = l.sub_ref(&r);
        for a in 0..mc {
            for b in 0..mu {
                if !(l.is_known(a, b) && r.is_known(a, b)) {
                    continue;
                }
                known_any = true;
                let x = d.coeff(a, b);
                if !x.is_zero() {
                    return Outcome::Fail(format!("coefficient of t^{j} c^{a} u^{b} differs"));
                }
                let scale = [l.coeff(a, b).valuation(), r.coeff(a, b).valuation()]
                    .into_iter()
                    .flatten()
                    .min()
                    .unwrap_or_else(|| Rational::from(0))
                    .min(Rational::from(0));
                if let Some(prec) = x.precision() {
                    if prec - scale < Rational::from(1) {
                        weak = Some(format!("coefficient of t^{j} c^{a} u^{b} has no significant digit"));
                    }
                }
            }
        }
    }
    match (known_any, weak) {
        (false, _) => Outcome::Inconclusive("no known coefficients".into()),
        (true, Some(why)) => Outcome::Inconclusive(why),
        (true, None) => Outcome::Pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::PrecisionProfile;

    fn model() -> (crate::profile::Profile, BModel) {
        let pr = PrecisionProfile::new(3).with_truncation(12, 8, 6, 6).build().unwrap();
        let m = BModel::new(pr.k(), pr.mc(), pr.mu(), 2);
        (pr, m)
    }

    #[test]
    fn theta_values() {
        let (pr, m) = model();
        let k = pr.k();
        let c = m.embed(m.biv_c());
        let y = Series::var(&k.zero(), m.mc);
        assert!(c.theta().unwrap().agrees_with(&y));
        assert!(m.embed(m.biv_u()).theta().unwrap().is_zero());
        let cp = m.embed(m.biv_c().add_ref(&Bivariate::constant(&k.from_int(3), 6, 6)));
        let one_u = m.embed(m.biv_one().add_ref(&m.biv_u()));
        let prod = cp.mul(&one_u).unwrap().theta().unwrap();
        let expect = Series::from_coeffs(&k.zero(), vec![k.from_int(3), k.one()], m.mc);
        assert!(prod.agrees_with(&expect));
        assert!(m.t_pow(1).unwrap().theta().unwrap().is_zero());
        assert_eq!(m.t_pow(-1).unwrap().theta().unwrap_err(), Error::NegativeTDegree);
    }

    #[test]
    fn window_is_enforced() {
        let (_, m) = model();
        let t2 = m.t_pow(2).unwrap();
        assert_eq!(t2.mul(&m.t_pow(1).unwrap()).unwrap_err(), Error::TWindowExceeded(3));
        assert!(m.t_pow(3).is_err());
        assert!(t2.mul(&m.t_pow(-2).unwrap()).unwrap().sub(&m.one()).is_zero());
    }
}

use std::fmt;
use std::sync::Arc;

use super::unramified::{Padic, Unramified};
use crate::error::{Error, Result};
use crate::ring::{min_precision, Coeff, Rational, RingElem};

/// `K = K_0[π]/E(π)` for an Eisenstein polynomial `E` of degree `e` over
/// `W(k)`. Elements are kept reduced: polynomials of degree `< e` in `π`.
pub struct Ramified {
    base: Arc<Unramified>,
    eisenstein: Vec<Padic>,
}

impl fmt::Debug for Ramified {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K_0[π]/E, E = {:?} + π^{}", self.eisenstein, self.eisenstein.len())
    }
}

impl Ramified {
    /// `lower` holds `E_0, …, E_{e-1}`; the leading coefficient is 1.
    pub fn new(base: Arc<Unramified>, lower: Vec<Padic>) -> Result<Arc<Self>> {
        if lower.is_empty() {
            return Err(Error::InvalidProfile("Eisenstein polynomial needs degree >= 1".into()));
        }
        if lower[0].val() != Some(1) {
            return Err(Error::InvalidProfile(
                "Eisenstein constant term must have valuation exactly 1".into(),
            ));
        }
        if lower.iter().any(|c| c.val().map_or(false, |v| v < 1)) {
            return Err(Error::InvalidProfile(
                "Eisenstein lower coefficients must be divisible by p".into(),
            ));
        }
        Ok(Arc::new(Ramified { base, eisenstein: lower }))
    }

    pub fn base(&self) -> &Arc<Unramified> {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.eisenstein.len()
    }

    pub fn eisenstein(&self) -> &[Padic] {
        &self.eisenstein
    }

    pub fn zero(self: &Arc<Self>) -> KElem {
        KElem { field: self.clone(), coeffs: vec![self.base.zero(); self.degree()] }
    }

    pub fn one(self: &Arc<Self>) -> KElem {
        self.embed(&self.base.one())
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> KElem {
        self.embed(&self.base.from_int(n))
    }

    pub fn embed(self: &Arc<Self>, x: &Padic) -> KElem {
        let mut coeffs = vec![self.base.zero(); self.degree()];
        coeffs[0] = x.clone();
        KElem { field: self.clone(), coeffs }
    }

    pub fn from_coeffs(self: &Arc<Self>, mut coeffs: Vec<Padic>) -> Result<KElem> {
        if coeffs.len() > self.degree() {
            return Err(Error::Shape(format!(
                "{} π-coefficients for ramification degree {}",
                coeffs.len(),
                self.degree()
            )));
        }
        coeffs.resize(self.degree(), self.base.zero());
        Ok(KElem { field: self.clone(), coeffs })
    }

    /// The uniformizer `π`.
    pub fn uniformizer(self: &Arc<Self>) -> KElem {
        if self.degree() == 1 {
            return self.embed(&self.eisenstein[0].neg_ref());
        }
        let mut coeffs = vec![self.base.zero(); self.degree()];
        coeffs[1] = self.base.one();
        KElem { field: self.clone(), coeffs }
    }

    pub fn pi_pow(self: &Arc<Self>, n: usize) -> KElem {
        let pi = self.uniformizer();
        let mut acc = self.one();
        for _ in 0..n {
            acc = acc.mul_ref(&pi);
        }
        acc
    }
}

/// Element of `K`, `Σ a_j π^j` with `a_j ∈ K_0` and `j < e`.
#[derive(Clone)]
pub struct KElem {
    field: Arc<Ramified>,
    coeffs: Vec<Padic>,
}

impl KElem {
    pub fn field(&self) -> &Arc<Ramified> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Padic] {
        &self.coeffs
    }

    /// `val_π = min_j (e·val_p(a_j) + j)`; distinct `j < e` never tie.
    pub fn val_pi(&self) -> Option<i64> {
        self.valuation().map(|v| (v * self.field.degree() as i64).to_integer())
    }

    /// The `K_0` part when the element lies in `K_0`.
    pub fn as_base(&self) -> Option<&Padic> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn agrees_with(&self, other: &KElem) -> bool {
        self.sub_ref(other).is_zero()
    }

    fn raw_valuation(&self) -> Option<Rational> {
        let e = self.field.degree() as i64;
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(|(j, c)| c.val().map(|v| Rational::new(v * e + j as i64, e)))
            .min()
    }
}

impl RingElem for KElem {
    fn zero_like(&self) -> Self {
        self.field.zero()
    }

    fn one_like(&self) -> Self {
        self.field.one()
    }

    fn add_ref(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add_ref(b)).collect();
        KElem { field: self.field.clone(), coeffs }
    }

    fn sub_ref(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub_ref(b)).collect();
        KElem { field: self.field.clone(), coeffs }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        let e = self.field.degree();
        if e == 1 {
            return KElem { field: self.field.clone(), coeffs: vec![self.coeffs[0].mul_ref(&other.coeffs[0])] };
        }
        let zero = self.field.base.zero();
        let mut prod = vec![zero; 2 * e - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                prod[i + j] = prod[i + j].add_ref(&a.mul_ref(b));
            }
        }
        // π^e = -Σ E_i π^i
        for d in (e..2 * e - 1).rev() {
            let c = std::mem::replace(&mut prod[d], self.field.base.zero());
            if c.is_exact_zero() {
                continue;
            }
            for (i, ei) in self.field.eisenstein.iter().enumerate() {
                prod[d - e + i] = prod[d - e + i].sub_ref(&c.mul_ref(ei));
            }
        }
        prod.truncate(e);
        KElem { field: self.field.clone(), coeffs: prod }
    }

    fn neg_ref(&self) -> Self {
        KElem { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c.neg_ref()).collect() }
    }

    fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }
}

impl Coeff for KElem {
    fn prime(&self) -> u64 {
        self.field.base.prime()
    }

    fn ramification(&self) -> i64 {
        self.field.degree() as i64
    }

    fn from_i64_like(&self, n: i64) -> Self {
        self.field.from_int(n)
    }

    /// Solves `x·y = 1` as an `e×e` linear system over `K_0`, pivoting on the
    /// entry of least valuation.
    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InversionOfZero);
        }
        let e = self.field.degree();
        if e == 1 {
            return Ok(KElem { field: self.field.clone(), coeffs: vec![self.coeffs[0].inv()?] });
        }
        // column j of the multiplication matrix is x·π^j
        let pi = self.field.uniformizer();
        let mut cols = Vec::with_capacity(e);
        let mut cur = self.clone();
        for _ in 0..e {
            cols.push(cur.coeffs.clone());
            cur = cur.mul_ref(&pi);
        }
        let mut a: Vec<Vec<Padic>> = (0..e).map(|r| (0..e).map(|c| cols[c][r].clone()).collect()).collect();
        let mut rhs: Vec<Padic> = (0..e).map(|r| if r == 0 { self.field.base.one() } else { self.field.base.zero() }).collect();
        let sol = crate::linalg::solve_field(&mut a, &mut rhs)?;
        Ok(KElem { field: self.field.clone(), coeffs: sol })
    }

    fn valuation(&self) -> Option<Rational> {
        let v = self.raw_valuation()?;
        match self.precision() {
            Some(prec) if v >= prec => None,
            _ => Some(v),
        }
    }

    /// The neglected part lies in `Σ p^{prec_j} π^j O_K`, whose valuation is
    /// at least `min_j (prec_j + j/e)`.
    fn precision(&self) -> Option<Rational> {
        let e = self.field.degree() as i64;
        self.coeffs.iter().enumerate().fold(None, |acc, (j, c)| {
            min_precision(acc, c.precision().map(|p| p + Rational::new(j as i64, e)))
        })
    }

    fn mul_p_pow(&self, k: i64) -> Self {
        KElem { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c.mul_p_pow(k)).collect() }
    }

    fn cap_precision(&self, abs: i64) -> Self {
        KElem { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c.cap_precision(abs)).collect() }
    }
}

impl PartialEq for KElem {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.field, &other.field) && self.coeffs == other.coeffs
    }
}

impl fmt::Debug for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree() == 1 {
            return write!(f, "{:?}", self.coeffs[0]);
        }
        write!(f, "[")?;
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c:?})π^{j}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic() -> Arc<Ramified> {
        // E(x) = x^2 - 3 over Q_3
        let base = Unramified::new(3, 1, 10, None).unwrap();
        let lower = vec![base.from_int(-3), base.zero()];
        Ramified::new(base, lower).unwrap()
    }

    #[test]
    fn uniformizer_squares_to_p() {
        let k = quadratic();
        let pi = k.uniformizer();
        let pi2 = pi.mul_ref(&pi);
        assert!(pi2.agrees_with(&k.from_int(3)));
        assert_eq!(pi.val_pi(), Some(1));
        assert_eq!(pi2.val_pi(), Some(2));
        assert_eq!(pi.valuation(), Some(Rational::new(1, 2)));
    }

    #[test]
    fn inverse_in_ramified_extension() {
        let k = quadratic();
        let pi = k.uniformizer();
        let x = k.one().add_ref(&pi).add_ref(&pi.mul_ref(&pi).mul_ref(&pi));
        let y = x.inv().unwrap();
        assert!(x.mul_ref(&y).agrees_with(&k.one()));
        let z = pi.inv().unwrap();
        assert!(z.mul_ref(&pi).agrees_with(&k.one()));
        assert_eq!(z.val_pi(), Some(-1));
    }

    #[test]
    fn val_pi_is_additive() {
        let k = quadratic();
        let pi = k.uniformizer();
        let a = pi.add_ref(&k.from_int(3));
        let b = k.from_int(3).mul_ref(&pi).add_ref(&k.from_int(9));
        assert_eq!(a.val_pi(), Some(1));
        assert_eq!(b.val_pi(), Some(3));
        assert_eq!(a.mul_ref(&b).val_pi(), Some(4));
    }

    #[test]
    fn rejects_non_eisenstein() {
        let base = Unramified::new(3, 1, 10, None).unwrap();
        assert!(Ramified::new(base.clone(), vec![base.from_int(9)]).is_err());
        assert!(Ramified::new(base.clone(), vec![base.from_int(3), base.from_int(1)]).is_err());
        assert!(Ramified::new(base.clone(), vec![base.from_int(-3)]).is_ok());
    }
}

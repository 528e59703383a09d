use std::fmt;
use std::sync::Arc;

use super::fp;
use crate::error::{Error, Result};
use crate::ring::{Coeff, Rational, RingElem};

/// Precision marker for exact zeros.
pub const EXACT: i64 = i64::MAX / 4;

fn padd(a: i64, b: i64) -> i64 {
    if a >= EXACT || b >= EXACT {
        EXACT
    } else {
        a + b
    }
}

/// `W(F_{p^m})[1/p] = Q_p[w]/P(w)` for a monic `P` irreducible mod p, with
/// every element carried to at most `cap` significant digits.
///
/// The Frobenius `σ` sends `w` to the root of `P` congruent to `w^p` mod p;
/// that root is Hensel-lifted once here and its powers are cached.
pub struct Unramified {
    p: u64,
    degree: usize,
    cap: i64,
    modulus: Vec<i128>,
    residue_modulus: Vec<u64>,
    pow: Vec<i128>,
    frob: Vec<Vec<i128>>,
}

impl fmt::Debug for Unramified {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "W(F_{}^{})[1/p] mod P = {:?}, {} digits",
            self.p, self.degree, self.residue_modulus, self.cap
        )
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Unramified {
    /// `poly` lists `P_0, …, P_{m-1}` for `P = x^m + Σ P_i x^i`; when absent
    /// the first irreducible of degree `m` in digit order is used.
    pub fn new(p: u64, degree: usize, cap: i64, poly: Option<&[i64]>) -> Result<Arc<Self>> {
        if !is_prime(p) || p == 2 {
            return Err(Error::InvalidProfile(format!("p = {p} must be an odd prime")));
        }
        if degree == 0 {
            return Err(Error::InvalidProfile("residue degree must be at least 1".into()));
        }
        if cap < 1 {
            return Err(Error::InvalidProfile("p-adic precision must be at least 1".into()));
        }
        let mut pow = vec![1i128];
        for _ in 0..cap {
            let next = pow.last().unwrap() * p as i128;
            if next >= 1i128 << 62 {
                return Err(Error::InvalidProfile(format!(
                    "p^{cap} exceeds the 62-bit working modulus"
                )));
            }
            pow.push(next);
        }
        let residue_modulus: Vec<u64> = match poly {
            Some(c) => {
                if c.len() != degree {
                    return Err(Error::InvalidProfile(format!(
                        "defining polynomial needs {degree} lower coefficients, got {}",
                        c.len()
                    )));
                }
                let mut f: Vec<u64> =
                    c.iter().map(|x| x.rem_euclid(p as i64) as u64).collect();
                f.push(1);
                if !fp::is_irreducible(&f, p) {
                    return Err(Error::HenselFailure(
                        "defining polynomial is not irreducible (hence not separable) mod p".into(),
                    ));
                }
                f
            }
            None => fp::find_irreducible(degree, p),
        };
        let modulus: Vec<i128> = match poly {
            Some(c) => c.iter().map(|&x| x as i128).collect(),
            None => residue_modulus[..degree].iter().map(|&x| x as i128).collect(),
        };
        let mut field = Unramified {
            p,
            degree,
            cap,
            modulus: modulus.iter().map(|x| x.rem_euclid(pow[cap as usize])).collect(),
            residue_modulus,
            pow,
            frob: Vec::new(),
        };
        field.frob = field.lift_frobenius()?;
        Ok(Arc::new(field))
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn cap(&self) -> i64 {
        self.cap
    }

    /// Lower coefficients of the defining polynomial reduced mod p.
    pub fn residue_polynomial(&self) -> &[u64] {
        &self.residue_modulus[..self.degree]
    }

    fn pk(&self, k: i64) -> i128 {
        self.pow[k as usize]
    }

    fn reduce(&self, a: &mut [i128], modulus: i128) {
        for x in a.iter_mut() {
            *x = x.rem_euclid(modulus);
        }
    }

    fn poly_mul(&self, a: &[i128], b: &[i128], modulus: i128) -> Vec<i128> {
        let m = self.degree;
        let mut r = vec![0i128; 2 * m - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + x * y % modulus) % modulus;
            }
        }
        for d in (m..2 * m - 1).rev() {
            let c = r[d];
            if c == 0 {
                continue;
            }
            r[d] = 0;
            for i in 0..m {
                let t = c * (self.modulus[i] % modulus) % modulus;
                r[d - m + i] = (r[d - m + i] - t).rem_euclid(modulus);
            }
        }
        r.truncate(m);
        r
    }

    fn poly_pow(&self, a: &[i128], mut e: u64, modulus: i128) -> Vec<i128> {
        let mut result = vec![0i128; self.degree];
        result[0] = 1 % modulus;
        let mut b = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                result = self.poly_mul(&result, &b, modulus);
            }
            b = self.poly_mul(&b, &b, modulus);
            e >>= 1;
        }
        result
    }

    /// Inverse of a unit polynomial modulo `p^digits`.
    fn unit_inverse(&self, a: &[i128], digits: i64) -> Option<Vec<i128>> {
        let p = self.p;
        let residue: Vec<u64> = {
            let mut v: Vec<u64> = a.iter().map(|x| x.rem_euclid(p as i128) as u64).collect();
            fp::trim(&mut v);
            v
        };
        let inv0 = fp::inverse_mod(&residue, &self.residue_modulus, p)?;
        let mut y: Vec<i128> = (0..self.degree)
            .map(|i| inv0.get(i).copied().unwrap_or(0) as i128)
            .collect();
        let mut known = 1i64;
        while known < digits {
            known = (2 * known).min(digits);
            let modulus = self.pk(known);
            let ay = self.poly_mul(a, &y, modulus);
            let mut two_minus = ay.iter().map(|x| (-x).rem_euclid(modulus)).collect::<Vec<_>>();
            two_minus[0] = (two_minus[0] + 2) % modulus;
            y = self.poly_mul(&y, &two_minus, modulus);
        }
        let modulus = self.pk(digits);
        self.reduce(&mut y, modulus);
        Some(y)
    }

    fn lift_frobenius(&self) -> Result<Vec<Vec<i128>>> {
        let m = self.degree;
        let modulus = self.pk(self.cap);
        let mut one = vec![0i128; m];
        one[0] = 1;
        if m == 1 {
            return Ok(vec![one]);
        }
        let mut w = vec![0i128; m];
        w[1] = 1;
        // Horner evaluation of P and P' at x inside Z/p^cap[w]/P
        let eval = |x: &[i128], deriv: bool| -> Vec<i128> {
            let coeffs: Vec<i128> = if deriv {
                (1..=m)
                    .map(|i| {
                        let c = if i == m { 1 } else { self.modulus[i] };
                        c * i as i128 % modulus
                    })
                    .collect()
            } else {
                let mut c = self.modulus.clone();
                c.push(1);
                c
            };
            let mut acc = vec![0i128; m];
            for c in coeffs.iter().rev() {
                acc = self.poly_mul(&acc, x, modulus);
                acc[0] = (acc[0] + c).rem_euclid(modulus);
            }
            acc
        };
        let mut x = self.poly_pow(&w, self.p, modulus);
        for _ in 0..=64 {
            let fx = eval(&x, false);
            if fx.iter().all(|c| *c == 0) {
                let mut powers = vec![one.clone()];
                for i in 1..m {
                    let next = self.poly_mul(&powers[i - 1], &x, modulus);
                    powers.push(next);
                }
                return Ok(powers);
            }
            let dfx = eval(&x, true);
            let inv = self.unit_inverse(&dfx, self.cap).ok_or_else(|| {
                Error::HenselFailure("derivative of the defining polynomial vanishes mod p".into())
            })?;
            let step = self.poly_mul(&fx, &inv, modulus);
            for i in 0..m {
                x[i] = (x[i] - step[i]).rem_euclid(modulus);
            }
        }
        Err(Error::HenselFailure("Newton iteration did not converge".into()))
    }

    pub fn zero(self: &Arc<Self>) -> Padic {
        Padic { field: self.clone(), val: 0, prec: EXACT, unit: Vec::new() }
    }

    /// Zero known only modulo `p^prec`.
    pub fn zero_mod(self: &Arc<Self>, prec: i64) -> Padic {
        Padic { field: self.clone(), val: 0, prec, unit: Vec::new() }
    }

    pub fn one(self: &Arc<Self>) -> Padic {
        self.from_int(1)
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> Padic {
        self.from_poly(&[n], 0)
    }

    /// `p^scale · Σ c_i w^i`, known to `cap` significant digits.
    pub fn from_poly(self: &Arc<Self>, coeffs: &[i64], scale: i64) -> Padic {
        let wide: Vec<i128> = coeffs.iter().map(|&c| c as i128).collect();
        self.from_poly_i128(&wide, scale)
    }

    pub fn from_poly_i128(self: &Arc<Self>, coeffs: &[i128], scale: i64) -> Padic {
        let p = self.p as i128;
        let common = match coeffs
            .iter()
            .filter(|x| **x != 0)
            .map(|x| {
                let (mut y, mut v) = (*x, 0i64);
                while y % p == 0 {
                    y /= p;
                    v += 1;
                }
                v
            })
            .min()
        {
            Some(v) => v,
            None => return self.zero(),
        };
        let modulus = self.pk(self.cap);
        let mut c = vec![0i128; self.degree];
        let mut wpow = vec![0i128; self.degree];
        wpow[0] = 1;
        let mut w = vec![0i128; self.degree];
        if self.degree > 1 {
            w[1] = 1;
        }
        for (i, coeff) in coeffs.iter().enumerate() {
            if i > 0 {
                wpow = if self.degree == 1 { vec![0] } else { self.poly_mul(&wpow, &w, modulus) };
            }
            let reduced = (coeff / p.pow(common as u32)).rem_euclid(modulus);
            for j in 0..self.degree {
                c[j] = (c[j] + reduced * wpow[j]) % modulus;
            }
        }
        let val = scale + common;
        Padic::normalize(self, val, val + self.cap, c)
    }

    /// The unramified generator `w`.
    pub fn generator(self: &Arc<Self>) -> Padic {
        let mut c = vec![0i64; self.degree];
        if self.degree > 1 {
            c[1] = 1;
        }
        self.from_poly(&c, 0)
    }

    pub fn p_elem(self: &Arc<Self>) -> Padic {
        self.from_poly(&[1], 1)
    }
}

/// Element of `W(F_{p^m})[1/p]` with absolute precision tracking.
///
/// A nonzero value is `p^val · unit` where `unit` is a polynomial in `w`
/// known modulo `p^(prec - val)` with some coefficient prime to p. A zero is
/// either exact (`prec == EXACT`) or known only modulo `p^prec`.
#[derive(Clone)]
pub struct Padic {
    field: Arc<Unramified>,
    val: i64,
    prec: i64,
    unit: Vec<i128>,
}

impl Padic {
    fn normalize(field: &Arc<Unramified>, val: i64, prec: i64, mut c: Vec<i128>) -> Padic {
        if prec >= EXACT {
            // only zero is exact
            debug_assert!(c.iter().all(|x| *x == 0));
            return field.zero();
        }
        let rel = prec - val;
        if rel <= 0 {
            return field.zero_mod(prec);
        }
        let rel = rel.min(field.cap);
        let modulus = field.pk(rel);
        field.reduce(&mut c, modulus);
        let mut shift = 0i64;
        while shift < rel && c.iter().all(|x| x % field.pk(shift + 1) == 0) {
            shift += 1;
        }
        if shift == rel {
            return field.zero_mod(prec);
        }
        let div = field.pk(shift);
        for x in c.iter_mut() {
            *x /= div;
        }
        let new_rel = rel - shift;
        let m2 = field.pk(new_rel);
        field.reduce(&mut c, m2);
        Padic { field: field.clone(), val: val + shift, prec: val + shift + new_rel, unit: c }
    }

    pub fn field(&self) -> &Arc<Unramified> {
        &self.field
    }

    pub fn is_exact_zero(&self) -> bool {
        self.unit.is_empty() && self.prec >= EXACT
    }

    /// `val_p`, or `None` when the element is zero to its precision.
    pub fn val(&self) -> Option<i64> {
        if self.unit.is_empty() {
            None
        } else {
            Some(self.val)
        }
    }

    /// Absolute precision (`EXACT` for exact zeros).
    pub fn abs_precision(&self) -> i64 {
        self.prec
    }

    pub fn relative_precision(&self) -> i64 {
        if self.unit.is_empty() {
            0
        } else {
            self.prec - self.val
        }
    }

    /// Coefficients of the unit part in the basis `1, w, …, w^{m-1}`.
    pub fn unit_coeffs(&self) -> &[i128] {
        &self.unit
    }

    /// Representative in `[0, p^cap)` of an element of `Z_p` known modulo `p^cap`.
    pub fn to_integer(&self) -> Option<i128> {
        if self.unit.is_empty() {
            return Some(0);
        }
        if self.val < 0 || self.unit[1..].iter().any(|x| *x != 0) {
            return None;
        }
        let cap = self.field.cap;
        if self.prec < cap {
            return None;
        }
        if self.val >= cap {
            return Some(0);
        }
        Some(self.unit[0] * self.field.pk(self.val) % self.field.pk(cap))
    }

    pub fn sigma(&self) -> Padic {
        if self.unit.is_empty() || self.field.degree == 1 {
            return self.clone();
        }
        let rel = self.prec - self.val;
        let modulus = self.field.pk(rel);
        let mut out = vec![0i128; self.field.degree];
        for (i, c) in self.unit.iter().enumerate() {
            for (j, f) in self.field.frob[i].iter().enumerate() {
                out[j] = (out[j] + c * (f % modulus) % modulus) % modulus;
            }
        }
        Padic::normalize(&self.field, self.val, self.prec, out)
    }

    pub fn sigma_pow(&self, k: usize) -> Padic {
        let mut x = self.clone();
        for _ in 0..k % self.field.degree {
            x = x.sigma();
        }
        x
    }

    fn check_field(&self, other: &Padic) {
        debug_assert!(Arc::ptr_eq(&self.field, &other.field), "mixed coefficient fields");
    }

    pub fn with_precision(&self, prec: i64) -> Padic {
        if prec >= self.prec {
            return self.clone();
        }
        if self.unit.is_empty() {
            return self.field.zero_mod(prec);
        }
        Padic::normalize(&self.field, self.val, prec, self.unit.clone())
    }

    /// Equal at the common precision.
    pub fn agrees_with(&self, other: &Padic) -> bool {
        self.sub_ref(other).is_zero()
    }
}

impl RingElem for Padic {
    fn zero_like(&self) -> Self {
        self.field.zero()
    }

    fn one_like(&self) -> Self {
        self.field.one()
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.check_field(other);
        let prec = self.prec.min(other.prec);
        if self.unit.is_empty() {
            return other.with_precision(prec);
        }
        if other.unit.is_empty() {
            return self.with_precision(prec);
        }
        let v = self.val.min(other.val);
        let rel = prec - v;
        if rel <= 0 {
            return self.field.zero_mod(prec);
        }
        let modulus = self.field.pk(rel.min(self.field.cap));
        let shift = |x: &Padic| -> Vec<i128> {
            let d = x.val - v;
            if d >= rel {
                vec![0; x.unit.len()]
            } else {
                let f = self.field.pk(d);
                x.unit.iter().map(|c| c * f % modulus).collect()
            }
        };
        let a = shift(self);
        let b = shift(other);
        let c: Vec<i128> = a.iter().zip(&b).map(|(x, y)| (x + y) % modulus).collect();
        Padic::normalize(&self.field, v, prec, c)
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.check_field(other);
        match (self.unit.is_empty(), other.unit.is_empty()) {
            (true, true) => self.field.zero_mod(padd(self.prec, other.prec)),
            (true, false) => self.field.zero_mod(padd(self.prec, other.val)),
            (false, true) => self.field.zero_mod(padd(other.prec, self.val)),
            (false, false) => {
                let rel = (self.prec - self.val).min(other.prec - other.val);
                let modulus = self.field.pk(rel);
                let c = self.field.poly_mul(&self.unit, &other.unit, modulus);
                let val = self.val + other.val;
                Padic::normalize(&self.field, val, val + rel, c)
            }
        }
    }

    fn neg_ref(&self) -> Self {
        if self.unit.is_empty() {
            return self.clone();
        }
        let modulus = self.field.pk(self.prec - self.val);
        let c = self.unit.iter().map(|x| (-x).rem_euclid(modulus)).collect();
        Padic { field: self.field.clone(), val: self.val, prec: self.prec, unit: c }
    }

    fn is_zero(&self) -> bool {
        self.unit.is_empty()
    }
}

impl Coeff for Padic {
    fn prime(&self) -> u64 {
        self.field.p
    }

    fn ramification(&self) -> i64 {
        1
    }

    fn from_i64_like(&self, n: i64) -> Self {
        self.field.from_int(n)
    }

    fn inv(&self) -> Result<Self> {
        if self.unit.is_empty() {
            return Err(Error::InversionOfZero);
        }
        let rel = self.prec - self.val;
        let inv = self.field.unit_inverse(&self.unit, rel).ok_or(Error::InversionOfZero)?;
        Ok(Padic::normalize(&self.field, -self.val, -self.val + rel, inv))
    }

    fn valuation(&self) -> Option<Rational> {
        self.val().map(Rational::from)
    }

    fn precision(&self) -> Option<Rational> {
        if self.prec >= EXACT {
            None
        } else {
            Some(Rational::from(self.prec))
        }
    }

    fn mul_p_pow(&self, k: i64) -> Self {
        if self.unit.is_empty() {
            return if self.prec >= EXACT { self.clone() } else { self.field.zero_mod(self.prec + k) };
        }
        Padic { field: self.field.clone(), val: self.val + k, prec: self.prec + k, unit: self.unit.clone() }
    }

    fn cap_precision(&self, abs: i64) -> Self {
        self.with_precision(abs)
    }
}

impl PartialEq for Padic {
    /// Structural equality: same valuation, precision and digits.
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.field, &other.field)
            && self.prec == other.prec
            && self.unit == other.unit
            && (self.unit.is_empty() || self.val == other.val)
    }
}

impl fmt::Debug for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.unit.is_empty() {
            if self.prec >= EXACT {
                return write!(f, "0");
            }
            return write!(f, "O(p^{})", self.prec);
        }
        if self.field.degree == 1 {
            write!(f, "p^{}*{} + O(p^{})", self.val, self.unit[0], self.prec)
        } else {
            write!(f, "p^{}*{:?} + O(p^{})", self.val, self.unit, self.prec)
        }
    }
}

macro_rules! padic_op {
    ($tr:ident, $method:ident, $via:ident) => {
        impl std::ops::$tr<&Padic> for &Padic {
            type Output = Padic;
            fn $method(self, rhs: &Padic) -> Padic {
                self.$via(rhs)
            }
        }
        impl std::ops::$tr<Padic> for Padic {
            type Output = Padic;
            fn $method(self, rhs: Padic) -> Padic {
                self.$via(&rhs)
            }
        }
    };
}
padic_op!(Add, add, add_ref);
padic_op!(Sub, sub, sub_ref);
padic_op!(Mul, mul, mul_ref);

impl std::ops::Neg for &Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(p: u64, n: i64) -> Arc<Unramified> {
        Unramified::new(p, 1, n, None).unwrap()
    }

    #[test]
    fn inverse_of_two_mod_243() {
        let f = qp(3, 5);
        let inv = f.from_int(2).inv().unwrap();
        assert_eq!(inv.to_integer(), Some(122));
        assert!(f.from_int(2).mul_ref(&inv).agrees_with(&f.one()));
    }

    #[test]
    fn inverse_of_one_and_valuations() {
        let f = qp(5, 8);
        assert_eq!(f.one().inv().unwrap().to_integer(), Some(1));
        let p = f.p_elem();
        assert_eq!(p.mul_ref(&p).val(), Some(2));
        assert_eq!(p.inv().unwrap().val(), Some(-1));
        assert_eq!(f.zero().val(), None);
        assert_eq!(f.from_int(7).mul_ref(&f.from_int(25)).val(), Some(2));
    }

    #[test]
    fn inversion_of_zero_fails() {
        let f = qp(3, 6);
        assert_eq!(f.zero().inv().unwrap_err(), Error::InversionOfZero);
        // 3^6 is zero at six digits of absolute precision
        let small = f.from_int(1).with_precision(6).sub_ref(&f.from_int(1 + 729).with_precision(6));
        assert!(small.is_zero());
        assert!(small.inv().is_err());
    }

    #[test]
    fn cancellation_reports_reduced_precision() {
        let f = qp(3, 6);
        let a = f.from_int(1);
        let b = f.from_int(1 + 9);
        let d = b.sub_ref(&a);
        assert_eq!(d.val(), Some(2));
        assert_eq!(d.abs_precision(), 6);
        assert_eq!(d.relative_precision(), 4);
    }

    #[test]
    fn sigma_on_quadratic_extension() {
        // w^2 + 2w + 2 over F_3; the conjugate root is -2 - w
        let f = Unramified::new(3, 2, 10, Some(&[2, 2])).unwrap();
        let w = f.generator();
        let sw = w.sigma();
        let mut w3 = w.mul_ref(&w).mul_ref(&w);
        w3 = w3.sub_ref(&sw);
        assert!(w3.val().unwrap() >= 1, "sigma(w) = w^3 mod 3");
        let conj = f.from_int(-2).sub_ref(&w);
        assert!(sw.agrees_with(&conj));
        assert!(sw.sigma().agrees_with(&w));
    }

    #[test]
    fn sigma_fixes_qp() {
        let f = Unramified::new(5, 3, 8, None).unwrap();
        let q = f.from_int(17).mul_ref(&f.p_elem().inv().unwrap());
        assert!(q.sigma().agrees_with(&q));
        let w = f.generator();
        assert!(w.sigma_pow(3).agrees_with(&w));
        assert!(!w.sigma().agrees_with(&w));
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(Unramified::new(2, 1, 5, None).is_err());
        assert!(Unramified::new(9, 1, 5, None).is_err());
        assert!(Unramified::new(3, 2, 5, Some(&[2, 0])).is_err());
        assert!(Unramified::new(3, 1, 60, None).is_err());
    }
}

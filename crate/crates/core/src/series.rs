//! Truncated power series in one variable (`W(k)[[Y]]`, `O_K[[Y]]` and their
//! `1/p` localizations) and in two variables `(c, u)`.
//!
//! Every series remembers the degree up to which its coefficients are known.
//! Coefficients at or beyond that bound are stored as zeros but never take
//! part in comparisons or valuations.

use std::fmt;

use crate::error::{Error, Result};
use crate::padic::{KElem, Padic, Ramified};
use crate::ring::{min_precision, Coeff, Rational, RingElem};

/// The ideal modulo which a verdict holds: `p^prec` on coefficients, and the
/// listed truncation degrees on the variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Modulus {
    pub prec: Option<Rational>,
    pub degrees: Vec<(&'static str, usize)>,
}

impl Modulus {
    pub fn new(prec: Option<Rational>) -> Self {
        Modulus { prec, degrees: Vec::new() }
    }

    pub fn with(mut self, var: &'static str, deg: usize) -> Self {
        match self.degrees.iter_mut().find(|(v, _)| *v == var) {
            Some(entry) => entry.1 = entry.1.min(deg),
            None => self.degrees.push((var, deg)),
        }
        self
    }

    pub fn meet(&self, other: &Modulus) -> Modulus {
        let mut out = Modulus::new(min_precision(self.prec, other.prec));
        out.degrees = self.degrees.clone();
        for &(v, d) in &other.degrees {
            out = out.with(v, d);
        }
        out
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(mod ")?;
        match self.prec {
            Some(p) if p.is_integer() => write!(f, "p^{}", p)?,
            Some(p) => write!(f, "p^({})", p)?,
            None => write!(f, "exact")?,
        }
        for (v, d) in &self.degrees {
            write!(f, ", {v}^{d}")?;
        }
        write!(f, ")")
    }
}

/// Series `Σ_{n<M} a_n Y^n` whose coefficients are known for `n < valid`.
#[derive(Clone)]
pub struct Series<C> {
    coeffs: Vec<C>,
    valid: usize,
}

pub type R0Series = Series<Padic>;
pub type RSeries = Series<KElem>;

impl<C: Coeff> Series<C> {
    /// Pads or cuts `coeffs` to length `m`; everything is known below `m`.
    pub fn from_coeffs(zero: &C, mut coeffs: Vec<C>, m: usize) -> Self {
        assert!(m >= 1, "truncation order must be positive");
        coeffs.truncate(m);
        coeffs.resize(m, zero.zero_like());
        Series { coeffs, valid: m }
    }

    pub fn constant(c: &C, m: usize) -> Self {
        Self::from_coeffs(c, vec![c.clone()], m)
    }

    pub fn zero(like: &C, m: usize) -> Self {
        Self::from_coeffs(like, Vec::new(), m)
    }

    pub fn one(like: &C, m: usize) -> Self {
        Self::constant(&like.one_like(), m)
    }

    /// The variable `Y`.
    pub fn var(like: &C, m: usize) -> Self {
        let mut s = Self::zero(like, m);
        if m > 1 {
            s.coeffs[1] = like.one_like();
        }
        s
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn valid(&self) -> usize {
        self.valid
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn known(&self) -> &[C] {
        &self.coeffs[..self.valid]
    }

    pub fn coeff(&self, n: usize) -> &C {
        &self.coeffs[n]
    }

    pub fn with_valid(mut self, valid: usize) -> Self {
        let v = valid.min(self.valid);
        for c in &mut self.coeffs[v..] {
            *c = c.zero_like();
        }
        self.valid = v;
        self
    }

    /// Minimum coefficient precision over the known range.
    pub fn precision(&self) -> Option<Rational> {
        self.known().iter().fold(None, |acc, c| min_precision(acc, c.precision()))
    }

    pub fn modulus(&self) -> Modulus {
        Modulus::new(self.precision()).with("Y", self.valid)
    }

    /// Constant term; meaningless when `valid == 0`.
    pub fn eval_zero(&self) -> C {
        self.coeffs[0].clone()
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        Series { coeffs: self.coeffs.iter().map(f).collect(), valid: self.valid }
    }

    pub fn try_map<D: Coeff>(&self, f: impl Fn(&C) -> Result<D>) -> Result<Series<D>> {
        Ok(Series { coeffs: self.coeffs.iter().map(f).collect::<Result<_>>()?, valid: self.valid })
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map(|a| a.mul_ref(c))
    }

    pub fn mul_p_pow(&self, k: i64) -> Self {
        self.map(|a| a.mul_p_pow(k))
    }

    fn zip(&self, other: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        assert_eq!(self.len(), other.len(), "series truncation orders differ");
        let valid = self.valid.min(other.valid);
        let coeffs = (0..self.len())
            .map(|n| if n < valid { f(&self.coeffs[n], &other.coeffs[n]) } else { self.coeffs[n].zero_like() })
            .collect();
        Series { coeffs, valid }
    }

    /// Formal derivative; the top coefficient becomes unknown.
    pub fn derivative(&self) -> Self {
        let m = self.len();
        let mut coeffs = Vec::with_capacity(m);
        for n in 0..m {
            if n + 1 < self.valid {
                coeffs.push(self.coeffs[n + 1].mul_ref(&self.coeffs[n + 1].from_i64_like(n as i64 + 1)));
            } else {
                coeffs.push(self.coeffs[0].zero_like());
            }
        }
        Series { coeffs, valid: self.valid.saturating_sub(1) }
    }

    /// `Y^k · f`.
    pub fn shift_up(&self, k: usize) -> Self {
        let m = self.len();
        let mut coeffs = vec![self.coeffs[0].zero_like(); m];
        for n in 0..m.saturating_sub(k) {
            coeffs[n + k] = self.coeffs[n].clone();
        }
        Series { coeffs, valid: (self.valid + k).min(m) }
    }

    pub fn inverse(&self) -> Result<Self> {
        let a0 = self.eval_zero();
        if self.valid == 0 || a0.is_zero() {
            return Err(Error::NotAUnit("constant term vanishes".into()));
        }
        let inv0 = a0.inv()?;
        let m = self.len();
        let mut out: Vec<C> = vec![inv0.zero_like(); m];
        out[0] = inv0.clone();
        for n in 1..self.valid {
            let mut acc = inv0.zero_like();
            for k in 1..=n {
                if self.coeffs[k].is_zero() && self.coeffs[k].precision().is_none() {
                    continue;
                }
                acc = acc.add_ref(&self.coeffs[k].mul_ref(&out[n - k]));
            }
            out[n] = acc.mul_ref(&inv0).neg_ref();
        }
        Ok(Series { coeffs: out, valid: self.valid })
    }

    /// `min_n val_p(a_n)` over the known range.
    pub fn gauss_valuation(&self) -> Result<Rational> {
        let min_val = self.known().iter().filter_map(|c| c.valuation()).min();
        let Some(v) = min_val else {
            return Err(Error::ZeroWithinTruncation);
        };
        // a coefficient that is zero only to a precision below `v` could hide
        // a smaller valuation
        for c in self.known() {
            if c.valuation().is_none() {
                if let Some(prec) = c.precision() {
                    if prec < v {
                        return Err(Error::Inconclusive(format!(
                            "coefficient known only modulo p^{prec}, below the candidate valuation {v}"
                        )));
                    }
                }
            }
        }
        Ok(v)
    }

    /// Least `n` with `a_n` a unit of the integer ring.
    ///
    /// Input is expected in primitive form: integral coefficients, not all
    /// divisible by `π`. A fully known series violating that is
    /// `NotPrimitive`; a series whose known part has no unit is
    /// `Inconclusive`.
    pub fn weierstrass_degree(&self) -> Result<usize> {
        let e = self.coeffs[0].ramification();
        let pi_val = Rational::new(1, e);
        for (n, c) in self.known().iter().enumerate() {
            match c.valuation() {
                Some(v) if v < Rational::from(0) => {
                    return Err(Error::NotPrimitive(format!("coefficient of Y^{n} is not integral")));
                }
                Some(v) if v == Rational::from(0) => return Ok(n),
                Some(_) => {}
                None => {
                    if c.precision().map_or(false, |pr| pr < pi_val) {
                        return Err(Error::Inconclusive(format!(
                            "coefficient of Y^{n} is not known modulo π"
                        )));
                    }
                }
            }
        }
        if self.known().iter().all(|c| c.is_zero()) {
            return Err(Error::ZeroWithinTruncation);
        }
        if self.valid == self.len() {
            Err(Error::NotPrimitive("every coefficient is divisible by π".into()))
        } else {
            Err(Error::Inconclusive(format!("no unit coefficient below Y^{}", self.valid)))
        }
    }

    /// `π^{-k} f` with `k` the π-adic Gauss valuation, so that some
    /// coefficient is a unit. Returns the exponent `k` as well.
    pub fn primitive_part(&self, pi: &C) -> Result<(i64, Self)> {
        let v = self.gauss_valuation()?;
        let e = self.coeffs[0].ramification();
        let k = (v * e).to_integer();
        let pi_inv_k = pow_signed(pi, -k)?;
        Ok((k, self.scale(&pi_inv_k)))
    }

    /// Invertibility in the localization `R[1/p]`: the primitive part must
    /// have Weierstrass degree 0.
    pub fn is_unit_after_inverting_p(&self, pi: &C) -> Result<bool> {
        let (_, prim) = self.primitive_part(pi)?;
        Ok(prim.weierstrass_degree()? == 0)
    }

    /// Inverse in `R[1/p]` (or `R_0[1/p]`) of a series whose primitive part
    /// is a unit.
    pub fn invert_localized(&self, pi: &C) -> Result<Self> {
        let (k, prim) = self.primitive_part(pi)?;
        if prim.weierstrass_degree()? != 0 {
            return Err(Error::NotAUnit("primitive part has positive Weierstrass degree".into()));
        }
        Ok(prim.inverse()?.scale(&pow_signed(pi, -k)?))
    }

    /// Agreement on the common known range at the common precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let n = self.valid.min(other.valid);
        (0..n).all(|i| self.coeffs[i].sub_ref(&other.coeffs[i]).is_zero())
    }

    /// Truncate to a shorter length `m`.
    pub fn truncate(&self, m: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(m);
        Series { coeffs, valid: self.valid.min(m) }
    }
}

pub(crate) fn pow_signed<C: Coeff>(x: &C, k: i64) -> Result<C> {
    let base = if k < 0 { x.inv()? } else { x.clone() };
    let mut acc = x.one_like();
    for _ in 0..k.unsigned_abs() {
        acc = acc.mul_ref(&base);
    }
    Ok(acc)
}

impl<C: Coeff> RingElem for Series<C> {
    fn zero_like(&self) -> Self {
        Series::zero(&self.coeffs[0], self.len())
    }

    fn one_like(&self) -> Self {
        Series::one(&self.coeffs[0], self.len())
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.add_ref(b))
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.sub_ref(b))
    }

    fn mul_ref(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "series truncation orders differ");
        let m = self.len();
        let valid = self.valid.min(other.valid);
        let zero = self.coeffs[0].zero_like();
        let mut coeffs = vec![zero; m];
        for (i, a) in self.coeffs[..valid].iter().enumerate() {
            if a.is_zero() && a.precision().is_none() {
                continue;
            }
            for (j, b) in other.coeffs[..valid - i].iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Series { coeffs, valid }
    }

    fn neg_ref(&self) -> Self {
        self.map(|a| a.neg_ref())
    }

    fn is_zero(&self) -> bool {
        self.known().iter().all(|c| c.is_zero())
    }
}

impl<C: Coeff> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.known().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c:?}")?,
                1 => write!(f, "({c:?})Y")?,
                _ => write!(f, "({c:?})Y^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(Y^{})", self.valid)
    }
}

impl Series<Padic> {
    /// `σ` on coefficients together with `Y ↦ Y^p`.
    pub fn frobenius(&self) -> Self {
        let m = self.len();
        let p = self.coeffs[0].field().prime() as usize;
        let mut coeffs = vec![self.coeffs[0].field().zero(); m];
        for n in 0..self.valid {
            if n * p >= m {
                break;
            }
            coeffs[n * p] = self.coeffs[n].sigma();
        }
        Series { coeffs, valid: m.min(p.saturating_mul(self.valid)) }
    }

    pub fn sigma_coeffs(&self) -> Self {
        self.map(|a| a.sigma())
    }

    /// Base change `R_0 → R`.
    pub fn to_k(&self, k: &std::sync::Arc<Ramified>) -> Series<KElem> {
        self.map(|a| k.embed(a))
    }

    /// Evaluation at `Y = y` for `y` with positive valuation (or at a
    /// truncation-exact polynomial).
    pub fn eval(&self, y: &Padic) -> Padic {
        let mut acc = y.field().zero();
        for c in self.known().iter().rev() {
            acc = acc.mul_ref(y).add_ref(c);
        }
        acc
    }
}

/// Series in `(c, u)`: coefficients `a_{ij} c^i u^j` for `i < M_c`,
/// `j < M_u`, known on the region `i < vc, j < vu, i + j < vt`.
#[derive(Clone)]
pub struct Bivariate<C> {
    grid: Vec<Vec<C>>,
    vc: usize,
    vu: usize,
    vt: usize,
}

impl<C: Coeff> Bivariate<C> {
    pub fn zero(like: &C, mc: usize, mu: usize) -> Self {
        assert!(mc >= 1 && mu >= 1, "truncation orders must be positive");
        Bivariate { grid: vec![vec![like.zero_like(); mu]; mc], vc: mc, vu: mu, vt: mc + mu }
    }

    pub fn constant(c: &C, mc: usize, mu: usize) -> Self {
        let mut b = Self::zero(c, mc, mu);
        b.grid[0][0] = c.clone();
        b
    }

    pub fn one(like: &C, mc: usize, mu: usize) -> Self {
        Self::constant(&like.one_like(), mc, mu)
    }

    pub fn var_c(like: &C, mc: usize, mu: usize) -> Self {
        let mut b = Self::zero(like, mc, mu);
        if mc > 1 {
            b.grid[1][0] = like.one_like();
        }
        b
    }

    pub fn var_u(like: &C, mc: usize, mu: usize) -> Self {
        let mut b = Self::zero(like, mc, mu);
        if mu > 1 {
            b.grid[0][1] = like.one_like();
        }
        b
    }

    /// A series in `c` alone.
    pub fn from_c_series(f: &Series<C>, mu: usize) -> Self {
        let mc = f.len();
        let mut b = Self::zero(f.coeff(0), mc, mu);
        for i in 0..f.valid() {
            b.grid[i][0] = f.coeff(i).clone();
        }
        b.vc = f.valid();
        b.vt = f.valid() + mu;
        b
    }

    /// A series in `u` alone.
    pub fn from_u_series(f: &Series<C>, mc: usize) -> Self {
        let mu = f.len();
        let mut b = Self::zero(f.coeff(0), mc, mu);
        for j in 0..f.valid() {
            b.grid[0][j] = f.coeff(j).clone();
        }
        b.vu = f.valid();
        b.vt = f.valid() + mc;
        b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.grid.len(), self.grid[0].len())
    }

    pub fn is_known(&self, i: usize, j: usize) -> bool {
        i < self.vc && j < self.vu && i + j < self.vt
    }

    pub fn coeff(&self, i: usize, j: usize) -> &C {
        &self.grid[i][j]
    }

    pub fn modulus(&self) -> Modulus {
        let (mc, mu) = self.dims();
        let mut m = Modulus::new(self.precision()).with("c", self.vc.min(mc)).with("u", self.vu.min(mu));
        if self.vt < self.vc.min(mc) + self.vu.min(mu) - 1 {
            m = m.with("deg", self.vt);
        }
        m
    }

    pub fn precision(&self) -> Option<Rational> {
        let mut acc = None;
        for (i, row) in self.grid.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if self.is_known(i, j) {
                    acc = min_precision(acc, c.precision());
                }
            }
        }
        acc
    }

    fn like(&self) -> &C {
        &self.grid[0][0]
    }

    fn known_region(&self, other: &Self) -> (usize, usize, usize) {
        assert_eq!(self.dims(), other.dims(), "bivariate truncation orders differ");
        (self.vc.min(other.vc), self.vu.min(other.vu), self.vt.min(other.vt))
    }

    fn build(&self, vc: usize, vu: usize, vt: usize, f: impl Fn(usize, usize) -> C) -> Self {
        let (mc, mu) = self.dims();
        let zero = self.like().zero_like();
        let grid = (0..mc)
            .map(|i| {
                (0..mu)
                    .map(|j| if i < vc && j < vu && i + j < vt { f(i, j) } else { zero.clone() })
                    .collect()
            })
            .collect();
        Bivariate { grid, vc, vu, vt }
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Bivariate<D> {
        Bivariate {
            grid: self.grid.iter().map(|r| r.iter().map(&f).collect()).collect(),
            vc: self.vc,
            vu: self.vu,
            vt: self.vt,
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map(|a| a.mul_ref(c))
    }

    /// `F(c, 0)`.
    pub fn eval_u0(&self) -> Series<C> {
        let mc = self.dims().0;
        let valid = self.vc.min(self.vt).min(mc);
        let valid = if self.vu == 0 { 0 } else { valid };
        let coeffs = (0..mc).map(|i| if i < valid { self.grid[i][0].clone() } else { self.like().zero_like() }).collect();
        Series { coeffs, valid }
    }

    /// `F(0, u)`.
    pub fn eval_c0(&self) -> Series<C> {
        let mu = self.dims().1;
        let valid = if self.vc == 0 { 0 } else { self.vu.min(self.vt).min(mu) };
        let coeffs = (0..mu).map(|j| if j < valid { self.grid[0][j].clone() } else { self.like().zero_like() }).collect();
        Series { coeffs, valid }
    }

    /// `(F(c, u) - F(c, 0)) / u`.
    pub fn shift_u(&self) -> Self {
        let vu = self.vu.saturating_sub(1);
        let vt = self.vt.saturating_sub(1);
        self.build(self.vc, vu, vt, |i, j| self.grid[i][j + 1].clone())
    }

    /// `∂F/∂u`.
    pub fn d_u(&self) -> Self {
        let vu = self.vu.saturating_sub(1);
        let vt = self.vt.saturating_sub(1);
        self.build(self.vc, vu, vt, |i, j| {
            let c = &self.grid[i][j + 1];
            c.mul_ref(&c.from_i64_like(j as i64 + 1))
        })
    }

    /// `∂F/∂c`.
    pub fn d_c(&self) -> Self {
        let vc = self.vc.saturating_sub(1);
        let vt = self.vt.saturating_sub(1);
        self.build(vc, self.vu, vt, |i, j| {
            let c = &self.grid[i + 1][j];
            c.mul_ref(&c.from_i64_like(i as i64 + 1))
        })
    }

    /// `u · F`.
    pub fn mul_u(&self) -> Self {
        let mu = self.dims().1;
        let vu = (self.vu + 1).min(mu);
        let vt = self.vt + 1;
        self.build(self.vc, vu, vt, |i, j| if j == 0 { self.like().zero_like() } else { self.grid[i][j - 1].clone() })
    }

    pub fn inverse(&self) -> Result<Self> {
        let a0 = self.grid[0][0].clone();
        if !self.is_known(0, 0) || a0.is_zero() {
            return Err(Error::NotAUnit("constant term vanishes".into()));
        }
        // Newton-free recursion in total degree: G = a0^{-1}(1 - (F - a0)G)
        let inv0 = a0.inv()?;
        let (mc, mu) = self.dims();
        let zero = a0.zero_like();
        let mut g = vec![vec![zero.clone(); mu]; mc];
        let max_total = (mc + mu).min(self.vt);
        for total in 0..max_total {
            for i in 0..=total {
                let j = total - i;
                if i >= mc || j >= mu || !self.is_known(i, j) {
                    continue;
                }
                if total == 0 {
                    g[0][0] = inv0.clone();
                    continue;
                }
                let mut acc = zero.clone();
                for a in 0..=i {
                    for b in 0..=j {
                        if a == 0 && b == 0 {
                            continue;
                        }
                        let f = &self.grid[a][b];
                        if f.is_zero() && f.precision().is_none() {
                            continue;
                        }
                        acc = acc.add_ref(&f.mul_ref(&g[i - a][j - b]));
                    }
                }
                g[i][j] = acc.mul_ref(&inv0).neg_ref();
            }
        }
        Ok(Bivariate { grid: g, vc: self.vc, vu: self.vu, vt: self.vt })
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        let (vc, vu, vt) = self.known_region(other);
        let (mc, mu) = self.dims();
        (0..mc.min(vc)).all(|i| {
            (0..mu.min(vu)).all(|j| i + j >= vt || self.grid[i][j].sub_ref(&other.grid[i][j]).is_zero())
        })
    }

    /// Least valuation over the known region, with exact zeros ignored.
    pub fn min_valuation(&self) -> Option<Rational> {
        let (mc, mu) = self.dims();
        let mut best: Option<Rational> = None;
        for i in 0..mc {
            for j in 0..mu {
                if self.is_known(i, j) {
                    if let Some(v) = self.grid[i][j].valuation() {
                        best = Some(best.map_or(v, |b| b.min(v)));
                    }
                }
            }
        }
        best
    }
}

impl<C: Coeff> RingElem for Bivariate<C> {
    fn zero_like(&self) -> Self {
        let (mc, mu) = self.dims();
        Bivariate::zero(self.like(), mc, mu)
    }

    fn one_like(&self) -> Self {
        let (mc, mu) = self.dims();
        Bivariate::one(self.like(), mc, mu)
    }

    fn add_ref(&self, other: &Self) -> Self {
        let (vc, vu, vt) = self.known_region(other);
        self.build(vc, vu, vt, |i, j| self.grid[i][j].add_ref(&other.grid[i][j]))
    }

    fn sub_ref(&self, other: &Self) -> Self {
        let (vc, vu, vt) = self.known_region(other);
        self.build(vc, vu, vt, |i, j| self.grid[i][j].sub_ref(&other.grid[i][j]))
    }

    fn mul_ref(&self, other: &Self) -> Self {
        let (vc, vu, vt) = self.known_region(other);
        let (mc, mu) = self.dims();
        let zero = self.like().zero_like();
        let mut grid = vec![vec![zero; mu]; mc];
        for i1 in 0..mc.min(vc) {
            for j1 in 0..mu.min(vu) {
                let a = &self.grid[i1][j1];
                if i1 + j1 >= vt || (a.is_zero() && a.precision().is_none()) {
                    continue;
                }
                for i2 in 0..mc.min(vc) - i1 {
                    for j2 in 0..mu.min(vu) - j1 {
                        if i1 + i2 + j1 + j2 >= vt {
                            break;
                        }
                        let b = &other.grid[i2][j2];
                        grid[i1 + i2][j1 + j2] = grid[i1 + i2][j1 + j2].add_ref(&a.mul_ref(b));
                    }
                }
            }
        }
        Bivariate { grid, vc, vu, vt }
    }

    fn neg_ref(&self) -> Self {
        self.map(|a| a.neg_ref())
    }

    fn is_zero(&self) -> bool {
        let (mc, mu) = self.dims();
        (0..mc).all(|i| (0..mu).all(|j| !self.is_known(i, j) || self.grid[i][j].is_zero()))
    }
}

impl<C: Coeff> fmt::Debug for Bivariate<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (mc, mu) = self.dims();
        let mut first = true;
        for i in 0..mc {
            for j in 0..mu {
                if !self.is_known(i, j) || self.grid[i][j].is_zero() {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "({:?})c^{i}u^{j}", self.grid[i][j])?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O{}", self.modulus())
    }
}

fn binomial(n: usize, k: usize) -> i64 {
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    i64::try_from(acc).expect("binomial coefficient overflows i64")
}

/// `F(c, u) = f(c + u)`, truncated at `(M_c, M_u)`.
pub fn taylor_shift<C: Coeff>(f: &Series<C>, mc: usize, mu: usize) -> Bivariate<C> {
    let like = f.coeff(0);
    let mut b = Bivariate::zero(like, mc, mu);
    for i in 0..mc {
        for j in 0..mu {
            let n = i + j;
            if n < f.valid() {
                let a = f.coeff(n);
                b.grid[i][j] = a.mul_ref(&a.from_i64_like(binomial(n, i)));
            }
        }
    }
    b.vt = f.valid();
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Unramified;
    use std::sync::Arc;

    fn q3() -> Arc<Unramified> {
        Unramified::new(3, 1, 10, None).unwrap()
    }

    fn s(f: &Arc<Unramified>, c: &[i64], m: usize) -> R0Series {
        Series::from_coeffs(&f.zero(), c.iter().map(|&x| f.from_int(x)).collect(), m)
    }

    #[test]
    fn frobenius_of_y_is_y_to_the_p() {
        let f = q3();
        let y = Series::var(&f.zero(), 8);
        let fy = y.frobenius();
        assert!(fy.agrees_with(&s(&f, &[0, 0, 0, 1], 8)));
        assert_eq!(fy.valid(), 8);
        let one = Series::one(&f.zero(), 8);
        assert!(one.frobenius().agrees_with(&one));
    }

    #[test]
    fn frobenius_tracks_validity() {
        let f = q3();
        let g = s(&f, &[1, 1, 1], 10).with_valid(2);
        assert_eq!(g.frobenius().valid(), 6);
    }

    #[test]
    fn derivative_basics() {
        let f = q3();
        let y2 = s(&f, &[0, 0, 1], 6);
        assert!(y2.derivative().agrees_with(&s(&f, &[0, 2], 6)));
        assert_eq!(y2.derivative().valid(), 5);
        assert!(s(&f, &[7], 6).derivative().is_zero());
    }

    #[test]
    fn weierstrass_examples() {
        let f = q3();
        let y_plus_p = s(&f, &[3, 1], 8);
        assert_eq!(y_plus_p.weierstrass_degree().unwrap(), 1);
        assert!(!y_plus_p.is_unit_after_inverting_p(&f.p_elem()).unwrap());
        assert_eq!(s(&f, &[1, 3], 8).weierstrass_degree().unwrap(), 0);
        let prod = y_plus_p.mul_ref(&s(&f, &[1, 1], 8));
        assert_eq!(prod.weierstrass_degree().unwrap(), 1);
        assert!(matches!(s(&f, &[3, 9], 8).weierstrass_degree(), Err(Error::NotPrimitive(_))));
        assert!(matches!(s(&f, &[3, 9], 8).with_valid(2).weierstrass_degree(), Err(Error::Inconclusive(_))));
        // 3(1 + Y) is a unit once p is inverted
        assert!(s(&f, &[3, 3], 8).is_unit_after_inverting_p(&f.p_elem()).unwrap());
    }

    #[test]
    fn gauss_valuation_examples() {
        let f = q3();
        assert_eq!(s(&f, &[3, 3], 8).gauss_valuation().unwrap(), Rational::from(1));
        assert_eq!(s(&f, &[3, 1], 8).gauss_valuation().unwrap(), Rational::from(0));
        assert!(matches!(s(&f, &[], 8).gauss_valuation(), Err(Error::ZeroWithinTruncation)));
    }

    #[test]
    fn inverse_geometric() {
        let f = q3();
        let one_minus_y = s(&f, &[1, -1], 6);
        let inv = one_minus_y.inverse().unwrap();
        assert!(inv.agrees_with(&s(&f, &[1, 1, 1, 1, 1, 1], 6)));
        assert!(matches!(s(&f, &[0, 1], 6).inverse(), Err(Error::NotAUnit(_))));
    }

    #[test]
    fn inverse_of_c_plus_p() {
        let f = q3();
        let cp = s(&f, &[3, 1], 6);
        let inv = cp.inverse().unwrap();
        // (1/p) Σ (-c/p)^n
        for n in 0..6 {
            let expect = f.from_int(if n % 2 == 0 { 1 } else { -1 }).mul_p_pow(-(n as i64) - 1);
            assert!(inv.coeff(n).agrees_with(&expect));
        }
        assert!(cp.mul_ref(&inv).agrees_with(&Series::one(&f.zero(), 6)));
    }

    #[test]
    fn taylor_shift_examples() {
        let f = q3();
        let (mc, mu) = (5, 5);
        let t = taylor_shift(&s(&f, &[0, 0, 1], 6), mc, mu);
        let c = Bivariate::var_c(&f.zero(), mc, mu);
        let u = Bivariate::var_u(&f.zero(), mc, mu);
        let cu = c.add_ref(&u);
        assert!(t.agrees_with(&cu.mul_ref(&cu)));
        let t2 = taylor_shift(&s(&f, &[3, 1], 6), mc, mu);
        assert!(t2.eval_u0().agrees_with(&s(&f, &[3, 1], 5)));
        assert!(t2.shift_u().agrees_with(&Bivariate::one(&f.zero(), mc, mu)));
    }

    #[test]
    fn bivariate_inverse() {
        let f = q3();
        let (mc, mu) = (4, 4);
        let c = Bivariate::var_c(&f.zero(), mc, mu);
        let u = Bivariate::var_u(&f.zero(), mc, mu);
        let x = Bivariate::constant(&f.from_int(3), mc, mu).add_ref(&c).add_ref(&u.mul_ref(&c));
        let inv = x.inverse().unwrap();
        assert!(x.mul_ref(&inv).agrees_with(&Bivariate::one(&f.zero(), mc, mu)));
    }

    #[test]
    fn modulus_display() {
        let f = q3();
        let m = s(&f, &[1, 2], 8).modulus();
        assert_eq!(m.to_string(), "(mod p^10, Y^8)");
    }
}

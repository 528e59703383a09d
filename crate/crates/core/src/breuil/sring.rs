//! The divided-power ring `S`, truncated in `u`.
//!
//! An element is `Σ_{n < M_u} b_n u^n / ⌊n/e⌋!` with `b_n ∈ R_0[1/p]`. The
//! set of elements supported in degrees `≥ M` is an ideal (products of basis
//! elements only raise the degree), so truncation is compatible with the
//! ring structure.
//!
//! Multiplication of basis elements:
//! `(u^m/⌊m/e⌋!)(u^n/⌊n/e⌋!) = C(m,n) u^{m+n}/⌊(m+n)/e⌋!` where, writing
//! `a = ⌊m/e⌋`, `b = ⌊n/e⌋`, `c = ⌊(m+n)/e⌋ ∈ {a+b, a+b+1}`,
//! `C(m,n) = c!/(a! b!) = binom(a+b, a) · (c!/(a+b)!)`. The second factor is
//! `1` or `c`, so `C(m,n)` is a positive integer.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::padic::{Padic, Ramified, Unramified};
use crate::profile::Profile;
use crate::ring::{Coeff, Rational, RingElem};
use crate::series::{R0Series, RSeries, Series};

/// Shared data for `S` at a given profile.
pub struct SRing {
    k0: Arc<Unramified>,
    k: Arc<Ramified>,
    e: usize,
    mu: usize,
    my: usize,
    /// `n!` for `n ≤ M_u`, exact.
    fact: Vec<Padic>,
}

impl fmt::Debug for SRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S(e = {}, u^{}, Y^{})", self.e, self.mu, self.my)
    }
}

fn binomial_u128(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

impl SRing {
    pub fn new(profile: &Profile) -> Arc<Self> {
        let k0 = profile.k0().clone();
        let mut fact = vec![k0.one()];
        for n in 1..=profile.mu() {
            let next = fact[n - 1].mul_ref(&k0.from_int(n as i64));
            fact.push(next);
        }
        Arc::new(SRing { k0, k: profile.k().clone(), e: profile.e(), mu: profile.mu(), my: profile.my(), fact })
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn my(&self) -> usize {
        self.my
    }

    pub fn k0(&self) -> &Arc<Unramified> {
        &self.k0
    }

    pub fn k(&self) -> &Arc<Ramified> {
        &self.k
    }

    /// `C(m, n)` as an exact integer.
    pub fn carry(&self, m: usize, n: usize) -> u128 {
        let (a, b, c) = (m / self.e, n / self.e, (m + n) / self.e);
        let rising = if c > a + b { c as u128 } else { 1 };
        binomial_u128(a + b, a) * rising
    }

    fn carry_padic(&self, m: usize, n: usize) -> Padic {
        let c = self.carry(m, n);
        let c = i64::try_from(c).expect("carry factor exceeds i64; lower M_u");
        self.k0.from_int(c)
    }

    fn r0_zero(&self) -> R0Series {
        Series::zero(&self.k0.zero(), self.my)
    }

    pub fn zero(self: &Arc<Self>) -> SElem {
        SElem { ring: self.clone(), coeffs: vec![self.r0_zero(); self.mu], valid: self.mu }
    }

    pub fn one(self: &Arc<Self>) -> SElem {
        self.from_r0(&Series::one(&self.k0.zero(), self.my))
    }

    pub fn from_r0(self: &Arc<Self>, b: &R0Series) -> SElem {
        let mut x = self.zero();
        x.coeffs[0] = b.clone();
        x
    }

    pub fn from_const(self: &Arc<Self>, c: &Padic) -> SElem {
        self.from_r0(&Series::constant(c, self.my))
    }

    /// `u^n` written in the divided-power basis: `⌊n/e⌋! · (u^n/⌊n/e⌋!)`.
    pub fn u_pow(self: &Arc<Self>, n: usize) -> SElem {
        let mut x = self.zero();
        if n < self.mu {
            x.coeffs[n] = Series::constant(&self.fact[n / self.e], self.my);
        }
        x
    }

    /// The basis element `u^n/⌊n/e⌋!`.
    pub fn basis(self: &Arc<Self>, n: usize) -> SElem {
        let mut x = self.zero();
        if n < self.mu {
            x.coeffs[n] = Series::one(&self.k0.zero(), self.my);
        }
        x
    }

    /// `E(u) = u^e + Σ E_i u^i`.
    pub fn eisenstein(self: &Arc<Self>) -> SElem {
        let mut x = self.u_pow(self.e);
        for (i, c) in self.k.eisenstein().iter().enumerate() {
            x.coeffs[i] = x.coeffs[i].add_ref(&Series::constant(c, self.my));
        }
        x
    }

    /// The canonical preimage of `g ∈ O_K[[Y]]`: `π^j ↦ u^j` for `j < e`.
    pub fn lift(self: &Arc<Self>, g: &RSeries) -> SElem {
        let mut x = self.zero();
        for j in 0..self.e.min(self.mu) {
            let coeffs: Vec<Padic> = g.coeffs().iter().map(|c| c.coeffs()[j].clone()).collect();
            x.coeffs[j] = Series::from_coeffs(&self.k0.zero(), coeffs, self.my).with_valid(g.valid());
        }
        x
    }

    /// Validity in `u` after evaluation at `π`: the dropped terms
    /// `b_n π^n/⌊n/e⌋!` with `n ≥ M_u` have valuation at least
    /// `val(b) + n/e - val(⌊n/e⌋!) ≥ val(b) + n(p-2)/(e(p-1))`.
    fn quotient_tail_bound(&self, valid: usize) -> Rational {
        let p = self.k0.prime() as i64;
        Rational::new(valid as i64 * (p - 2), self.e as i64 * (p - 1))
    }
}

/// Element of the truncated `S[1/p]`; coefficients known for `n < valid`.
#[derive(Clone)]
pub struct SElem {
    ring: Arc<SRing>,
    coeffs: Vec<R0Series>,
    valid: usize,
}

impl SElem {
    pub fn ring(&self) -> &Arc<SRing> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[R0Series] {
        &self.coeffs
    }

    pub fn valid(&self) -> usize {
        self.valid
    }

    pub fn coeff(&self, n: usize) -> &R0Series {
        &self.coeffs[n]
    }

    fn known(&self) -> &[R0Series] {
        &self.coeffs[..self.valid]
    }

    pub fn map(&self, f: impl Fn(&R0Series) -> R0Series) -> SElem {
        SElem { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(f).collect(), valid: self.valid }
    }

    pub fn scale_const(&self, c: &Padic) -> SElem {
        self.map(|b| b.scale(c))
    }

    pub fn scale_r0(&self, s: &R0Series) -> SElem {
        self.map(|b| b.mul_ref(s))
    }

    pub fn mul_p_pow(&self, k: i64) -> SElem {
        self.map(|b| b.mul_p_pow(k))
    }

    /// Frobenius: `φ` on `R_0` and `u ↦ u^p`, with
    /// `φ(u^n/⌊n/e⌋!) = (⌊pn/e⌋!/⌊n/e⌋!) · u^{pn}/⌊pn/e⌋!`.
    pub fn phi(&self) -> SElem {
        let ring = &self.ring;
        let p = ring.k0.prime() as usize;
        let mut out = ring.zero();
        for n in 0..self.valid {
            let target = n * p;
            if target >= ring.mu {
                break;
            }
            let mut factor = ring.k0.one();
            for j in (n / ring.e + 1)..=(target / ring.e) {
                factor = factor.mul_ref(&ring.k0.from_int(j as i64));
            }
            out.coeffs[target] = self.coeffs[n].frobenius().scale(&factor);
        }
        out.valid = ring.mu.min(p.saturating_mul(self.valid));
        out
    }

    /// `d_S^u`: differentiate the `R_0`-coefficients, keep the basis.
    pub fn d_u(&self) -> SElem {
        self.map(|b| b.derivative())
    }

    /// `u ↦ π`, landing in `R[1/p] = O_K[[Y]][1/p]`.
    pub fn quotient_to_r(&self) -> RSeries {
        let ring = &self.ring;
        let k = &ring.k;
        let my = ring.my;
        let mut acc: RSeries = Series::zero(&k.zero(), my);
        let pi = k.uniformizer();
        let mut pi_n = k.one();
        for n in 0..self.valid {
            let denom = k.embed(&ring.fact[n / ring.e]).inv().expect("factorials are invertible");
            let c = pi_n.mul_ref(&denom);
            acc = acc.add_ref(&self.coeffs[n].to_k(k).scale(&c));
            pi_n = pi_n.mul_ref(&pi);
        }
        // the neglected tail
        let scale = self
            .known()
            .iter()
            .filter_map(|b| b.gauss_valuation().ok())
            .min()
            .unwrap_or_else(|| Rational::from(0))
            .min(Rational::from(0));
        let bound = scale + ring.quotient_tail_bound(self.valid);
        let cap = bound.floor().to_integer();
        acc.map(|c| c.cap_precision(cap))
    }

    /// Inverse by `c^{-1} Σ (-y)^k`, where `c` is the `u^0` coefficient and
    /// `y = c^{-1}x - 1` has no `u^0` term, hence is nilpotent modulo `u^{M_u}`.
    pub fn inverse(&self) -> Result<SElem> {
        let ring = &self.ring;
        if self.valid == 0 {
            return Err(Error::NotAUnit("no known coefficients".into()));
        }
        let c_inv = self.coeffs[0].invert_localized(&ring.k0.p_elem())?;
        let one = ring.one();
        let y = self.scale_r0(&c_inv).sub_ref(&one);
        let minus_y = y.neg_ref();
        let mut term = one.clone();
        let mut sum = one;
        for _ in 1..ring.mu {
            term = term.mul_ref(&minus_y);
            if term.is_zero() {
                break;
            }
            sum = sum.add_ref(&term);
        }
        Ok(sum.scale_r0(&c_inv))
    }

    /// Smallest Gauss valuation among the known coefficients (`None` if zero).
    pub fn min_valuation(&self) -> Option<Rational> {
        self.known().iter().filter_map(|b| b.gauss_valuation().ok()).min()
    }

    /// All known coefficients have valuation `≥ t`, counting zeros known
    /// to absolute precision `≥ t`. `None` when undecidable.
    pub fn valuation_at_least(&self, t: Rational) -> Option<bool> {
        for b in self.known() {
            for c in b.known() {
                match c.valuation() {
                    Some(v) if v < t => return Some(false),
                    Some(_) => {}
                    None => {
                        if c.precision().map_or(false, |pr| pr < t) {
                            return None;
                        }
                    }
                }
            }
        }
        Some(true)
    }

    pub fn is_integral(&self) -> Option<bool> {
        self.valuation_at_least(Rational::from(0))
    }

    /// The constant coefficient `b_0(0)` is a unit and everything is integral.
    pub fn is_unit_of_s(&self) -> Option<bool> {
        let c = self.coeffs[0].eval_zero();
        if c.valuation() != Some(Rational::from(0)) {
            return Some(false);
        }
        self.is_integral()
    }

    pub fn agrees_with(&self, other: &SElem) -> bool {
        self.sub_ref(other).is_zero()
    }

    /// The coefficient series, for residual checks.
    pub fn flat(&self) -> Vec<R0Series> {
        self.known().to_vec()
    }
}

impl RingElem for SElem {
    fn zero_like(&self) -> Self {
        self.ring.zero()
    }

    fn one_like(&self) -> Self {
        self.ring.one()
    }

    fn add_ref(&self, other: &Self) -> Self {
        let valid = self.valid.min(other.valid);
        let coeffs = (0..self.coeffs.len())
            .map(|n| if n < valid { self.coeffs[n].add_ref(&other.coeffs[n]) } else { self.ring.r0_zero() })
            .collect();
        SElem { ring: self.ring.clone(), coeffs, valid }
    }

    fn sub_ref(&self, other: &Self) -> Self {
        let valid = self.valid.min(other.valid);
        let coeffs = (0..self.coeffs.len())
            .map(|n| if n < valid { self.coeffs[n].sub_ref(&other.coeffs[n]) } else { self.ring.r0_zero() })
            .collect();
        SElem { ring: self.ring.clone(), coeffs, valid }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        let ring = &self.ring;
        let valid = self.valid.min(other.valid);
        let mut coeffs = vec![ring.r0_zero(); ring.mu];
        for m in 0..valid {
            let a = &self.coeffs[m];
            if a.is_zero() && a.precision().is_none() {
                continue;
            }
            for n in 0..valid - m {
                let b = &other.coeffs[n];
                if b.is_zero() && b.precision().is_none() {
                    continue;
                }
                let term = a.mul_ref(b).scale(&ring.carry_padic(m, n));
                coeffs[m + n] = coeffs[m + n].add_ref(&term);
            }
        }
        SElem { ring: ring.clone(), coeffs, valid }
    }

    fn neg_ref(&self) -> Self {
        self.map(|b| b.neg_ref())
    }

    fn is_zero(&self) -> bool {
        self.known().iter().all(|b| b.is_zero())
    }
}

impl fmt::Debug for SElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, b) in self.known().iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{b:?}]·u^{n}/{}!", n / self.ring.e)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(u^{})", self.valid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{CoeffDescriptor, PrecisionProfile};

    fn ring(p: u64, e2: bool) -> (Profile, Arc<SRing>) {
        let mut spec = PrecisionProfile::new(p).with_truncation(12, 8, 12, 8);
        if e2 {
            // E(x) = x^2 - p
            spec.eisenstein = Some(vec![CoeffDescriptor::int(-(p as i64)), CoeffDescriptor::int(0)]);
        }
        let prof = spec.build().unwrap();
        let s = SRing::new(&prof);
        (prof, s)
    }

    #[test]
    fn carry_factor_of_u_e_squared() {
        for e2 in [false, true] {
            let (_, s) = ring(3, e2);
            let e = s.e();
            assert_eq!(s.carry(e, e), 2);
            let x = s.basis(e);
            let sq = x.mul_ref(&x);
            let expect = s.basis(2 * e).scale_const(&s.k0().from_int(2));
            assert!(sq.agrees_with(&expect));
        }
    }

    #[test]
    fn carry_factor_is_integral_quotient() {
        let (_, s) = ring(5, true);
        let f = |n: usize| (1..=n).map(|i| i as u128).product::<u128>();
        for m in 0..12 {
            for n in 0..12 {
                let (a, b, c) = (m / 2, n / 2, (m + n) / 2);
                assert_eq!(s.carry(m, n) * f(a) * f(b), f(c));
            }
        }
    }

    #[test]
    fn phi_of_u_and_one() {
        let (_, s) = ring(3, false);
        assert!(s.u_pow(1).phi().agrees_with(&s.u_pow(3)));
        assert!(s.one().phi().agrees_with(&s.one()));
    }

    #[test]
    fn phi_of_eisenstein_over_p_is_unit() {
        for e2 in [false, true] {
            let (_, s) = ring(3, e2);
            let mu = s.eisenstein().phi().mul_p_pow(-1);
            assert_eq!(mu.is_unit_of_s(), Some(true));
            let inv = mu.inverse().unwrap();
            assert!(inv.mul_ref(&mu).agrees_with(&s.one()));
        }
    }

    #[test]
    fn quotient_examples() {
        for e2 in [false, true] {
            let (prof, s) = ring(3, e2);
            let k = prof.k();
            let e = s.eisenstein();
            assert!(e.quotient_to_r().is_zero());
            let pi = Series::constant(&k.uniformizer(), prof.my());
            assert!(s.u_pow(1).quotient_to_r().agrees_with(&pi));
            let e2_half = e.mul_ref(&e).scale_const(&s.k0().from_int(2).inv().unwrap());
            assert!(e2_half.quotient_to_r().is_zero());
        }
    }

    #[test]
    fn lift_round_trip() {
        let (prof, s) = ring(3, true);
        let k = prof.k();
        let pi = k.uniformizer();
        let g = Series::from_coeffs(&k.zero(), vec![pi.clone(), k.from_int(2), pi.add_ref(&k.one())], prof.my());
        assert!(s.lift(&g).quotient_to_r().agrees_with(&g));
        let lifted_pi = s.lift(&Series::constant(&pi, prof.my()));
        assert!(lifted_pi.agrees_with(&s.u_pow(1)));
    }

    #[test]
    fn d_u_examples() {
        let (prof, s) = ring(3, false);
        assert!(s.u_pow(1).d_u().is_zero());
        let y = Series::var(&prof.k0().zero(), prof.my());
        let x = s.basis(3).scale_r0(&y);
        assert!(x.d_u().agrees_with(&s.basis(3)));
    }
}

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{KElem, Padic, Ramified, Unramified};

pub const DEFAULT_PREC_P: i64 = 12;
pub const DEFAULT_PREC_Y: usize = 16;
pub const DEFAULT_PREC_U: usize = 24;
pub const DEFAULT_PREC_C: usize = 16;
/// Largest |t-degree| the de Rham model keeps.
pub const DEFAULT_T_WINDOW: i32 = 2;

/// A coefficient of `W(F_{p^m})[1/p]` or of `K`, as written in documents.
///
/// Accepted shapes: a bare integer, a list `[a_0, …, a_{m-1}]` meaning
/// `Σ a_i w^i`, `{"scale": s, "w": [...]}` for `p^s·Σ a_i w^i`, and
/// `{"pi": [c_0, …, c_{e-1}]}` for `Σ c_j π^j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffDescriptor {
    Int(i64),
    Poly(Vec<i64>),
    Scaled {
        scale: i64,
        w: Vec<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prec: Option<i64>,
    },
    Ramified { pi: Vec<CoeffDescriptor> },
}

impl CoeffDescriptor {
    pub fn int(n: i64) -> Self {
        CoeffDescriptor::Int(n)
    }

    pub fn scaled(scale: i64, n: i64) -> Self {
        CoeffDescriptor::Scaled { scale, w: vec![n], prec: None }
    }
}

/// User-facing precision profile. Everything is validated in [`Profile::new`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecisionProfile {
    pub p: u64,
    #[serde(default = "one_usize")]
    pub m: usize,
    #[serde(default = "default_prec_p")]
    pub prec_p: i64,
    /// Lower coefficients `E_0, …, E_{e-1}` of the Eisenstein polynomial;
    /// the default `E(x) = x - p` gives `K = K_0`, `π = p`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eisenstein: Option<Vec<CoeffDescriptor>>,
    /// Lower coefficients of the polynomial defining `W(F_{p^m})` over `Z_p`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unramified: Option<Vec<i64>>,
    #[serde(default = "default_prec_y")]
    pub prec_y: usize,
    #[serde(default = "default_prec_u")]
    pub prec_u: usize,
    #[serde(default = "default_prec_c")]
    pub prec_c: usize,
}

fn one_usize() -> usize {
    1
}
fn default_prec_p() -> i64 {
    DEFAULT_PREC_P
}
fn default_prec_y() -> usize {
    DEFAULT_PREC_Y
}
fn default_prec_u() -> usize {
    DEFAULT_PREC_U
}
fn default_prec_c() -> usize {
    DEFAULT_PREC_C
}

impl PrecisionProfile {
    pub fn new(p: u64) -> Self {
        PrecisionProfile {
            p,
            m: 1,
            prec_p: DEFAULT_PREC_P,
            eisenstein: None,
            unramified: None,
            prec_y: DEFAULT_PREC_Y,
            prec_u: DEFAULT_PREC_U,
            prec_c: DEFAULT_PREC_C,
        }
    }

    pub fn with_truncation(mut self, prec_p: i64, prec_y: usize, prec_u: usize, prec_c: usize) -> Self {
        self.prec_p = prec_p;
        self.prec_y = prec_y;
        self.prec_u = prec_u;
        self.prec_c = prec_c;
        self
    }

    /// All four precisions scaled by `num/den`, rounded up.
    pub fn scaled(&self, num: usize, den: usize) -> Self {
        let up = |x: usize| (x * num).div_ceil(den);
        let mut out = self.clone();
        out.prec_p = ((self.prec_p as usize * num).div_ceil(den)) as i64;
        out.prec_y = up(self.prec_y);
        out.prec_u = up(self.prec_u);
        out.prec_c = up(self.prec_c);
        out
    }

    pub fn build(&self) -> Result<Profile> {
        Profile::new(self)
    }
}

/// A validated profile with the coefficient fields constructed.
#[derive(Debug, Clone)]
pub struct Profile {
    pub spec: PrecisionProfile,
    k0: Arc<Unramified>,
    k: Arc<Ramified>,
    pub t_window: i32,
}

impl Profile {
    pub fn new(spec: &PrecisionProfile) -> Result<Self> {
        if spec.prec_y == 0 || spec.prec_u == 0 || spec.prec_c == 0 {
            return Err(Error::InvalidProfile("truncation orders must be at least 1".into()));
        }
        let k0 = Unramified::new(spec.p, spec.m, spec.prec_p, spec.unramified.as_deref())?;
        let lower = match &spec.eisenstein {
            None => vec![k0.from_int(-(spec.p as i64))],
            Some(list) => list.iter().map(|d| padic_from_descriptor(&k0, d)).collect::<Result<_>>()?,
        };
        let k = Ramified::new(k0.clone(), lower)?;
        Ok(Profile { spec: spec.clone(), k0, k, t_window: DEFAULT_T_WINDOW })
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn k0(&self) -> &Arc<Unramified> {
        &self.k0
    }

    pub fn k(&self) -> &Arc<Ramified> {
        &self.k
    }

    pub fn e(&self) -> usize {
        self.k.degree()
    }

    pub fn my(&self) -> usize {
        self.spec.prec_y
    }

    pub fn mu(&self) -> usize {
        self.spec.prec_u
    }

    pub fn mc(&self) -> usize {
        self.spec.prec_c
    }

    pub fn padic(&self, d: &CoeffDescriptor) -> Result<Padic> {
        padic_from_descriptor(&self.k0, d)
    }

    pub fn kelem(&self, d: &CoeffDescriptor) -> Result<KElem> {
        match d {
            CoeffDescriptor::Ramified { pi } => {
                let coeffs = pi.iter().map(|c| padic_from_descriptor(&self.k0, c)).collect::<Result<Vec<_>>>()?;
                self.k.from_coeffs(coeffs)
            }
            other => Ok(self.k.embed(&padic_from_descriptor(&self.k0, other)?)),
        }
    }

    /// Text form of the modulus used for verdicts.
    pub fn modulus_label(&self) -> String {
        format!(
            "(mod p^{}, Y^{}, u^{}, c^{}; p = {}, m = {}, e = {})",
            self.spec.prec_p,
            self.spec.prec_y,
            self.spec.prec_u,
            self.spec.prec_c,
            self.spec.p,
            self.spec.m,
            self.e()
        )
    }
}

pub fn padic_from_descriptor(k0: &Arc<Unramified>, d: &CoeffDescriptor) -> Result<Padic> {
    let check_len = |w: &[i64]| {
        if w.len() > k0.degree() {
            Err(Error::Shape(format!(
                "coefficient has {} components but the residue degree is {}",
                w.len(),
                k0.degree()
            )))
        } else {
            Ok(())
        }
    };
    match d {
        CoeffDescriptor::Int(n) => Ok(k0.from_int(*n)),
        CoeffDescriptor::Poly(w) => {
            check_len(w)?;
            Ok(k0.from_poly(w, 0))
        }
        CoeffDescriptor::Scaled { scale, w, prec } => {
            check_len(w)?;
            let x = k0.from_poly(w, *scale);
            Ok(match prec {
                Some(a) => x.with_precision(*a),
                None => x,
            })
        }
        CoeffDescriptor::Ramified { pi } => {
            if pi.len() <= 1 {
                match pi.first() {
                    Some(c) => padic_from_descriptor(k0, c),
                    None => Ok(k0.zero()),
                }
            } else {
                Err(Error::Shape("π-adic coefficient where W(k)[1/p] was expected".into()))
            }
        }
    }
}

/// Descriptor for an element of `K_0` (valuation, unit digits, precision).
pub fn padic_descriptor(x: &Padic) -> CoeffDescriptor {
    match x.val() {
        None if x.is_exact_zero() => CoeffDescriptor::Int(0),
        None => CoeffDescriptor::Scaled { scale: 0, w: vec![0], prec: Some(x.abs_precision()) },
        Some(v) => CoeffDescriptor::Scaled {
            scale: v,
            w: x.unit_coeffs().iter().map(|c| *c as i64).collect(),
            prec: Some(x.abs_precision()),
        },
    }
}

pub fn kelem_descriptor(x: &KElem) -> CoeffDescriptor {
    match x.as_base() {
        Some(b) => padic_descriptor(b),
        None => CoeffDescriptor::Ramified { pi: x.coeffs().iter().map(padic_descriptor).collect() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_scaling() {
        let spec = PrecisionProfile::new(3);
        assert_eq!((spec.prec_p, spec.prec_y, spec.prec_u, spec.prec_c), (12, 16, 24, 16));
        let big = spec.scaled(3, 2);
        assert_eq!((big.prec_p, big.prec_y, big.prec_u, big.prec_c), (18, 24, 36, 24));
        let prof = spec.build().unwrap();
        assert_eq!(prof.e(), 1);
        assert!(prof.k().uniformizer().agrees_with(&prof.k().from_int(3)));
    }

    #[test]
    fn descriptors_parse() {
        let prof = PrecisionProfile::new(5).build().unwrap();
        let x: CoeffDescriptor = serde_json::from_str(r#"{"scale": -1, "w": [2]}"#).unwrap();
        let v = prof.padic(&x).unwrap();
        assert_eq!(v.val(), Some(-1));
        let y: CoeffDescriptor = serde_json::from_str("7").unwrap();
        assert_eq!(prof.padic(&y).unwrap().to_integer(), Some(7));
        let back = padic_descriptor(&v);
        assert!(prof.padic(&back).unwrap().agrees_with(&v));
    }

    #[test]
    fn unknown_profile_fields_rejected() {
        let r: std::result::Result<PrecisionProfile, _> = serde_json::from_str(r#"{"p": 3, "q": 1}"#);
        assert!(r.is_err());
    }

    #[test]
    fn ramified_profile() {
        let mut spec = PrecisionProfile::new(3);
        spec.eisenstein = Some(vec![CoeffDescriptor::int(3), CoeffDescriptor::int(3)]);
        let prof = spec.build().unwrap();
        assert_eq!(prof.e(), 2);
        spec.eisenstein = Some(vec![CoeffDescriptor::int(9), CoeffDescriptor::int(3)]);
        assert!(spec.build().is_err());
    }
}

//! Coefficient fields: `W(F_{p^m})[1/p]` with its Witt-vector Frobenius, and
//! totally ramified extensions `K = W(k)[1/p](π)` cut out by an Eisenstein
//! polynomial.

mod fp;
mod ramified;
mod unramified;

pub use ramified::{KElem, Ramified};
pub use unramified::{Padic, Unramified, EXACT};

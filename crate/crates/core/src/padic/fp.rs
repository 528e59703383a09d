//! Dense polynomials over `F_p`, only as much as the residue-field setup needs:
//! irreducibility testing and inversion modulo the defining polynomial.
//! Coefficients are stored lowest degree first.

pub(crate) fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut r: Vec<u64> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut r);
    r
}

fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + x * y) % p;
        }
    }
    trim(&mut r);
    r
}

/// Returns `(q, r)` with `a = q*b + r`, `deg r < deg b`. `b` must be nonzero.
fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![0u64; r.len() - db];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = r[r.len() - 1] * lead_inv % p;
        q[shift] = c;
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p * p - c * bi % p) % p;
        }
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = divrem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    divrem(&mul(a, b, p), f, p).1
}

fn powmod_poly(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut b = divrem(base, f, p).1;
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod(&result, &b, f, p);
        }
        b = mulmod(&b, &b, f, p);
        e >>= 1;
    }
    result
}

/// `f` is monic of degree `m >= 1`. A reducible `f` has a factor of degree
/// `d <= m/2`, and that factor divides `x^{p^d} - x`.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let m = f.len() - 1;
    if m == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let mut xp = x.clone();
    for _ in 1..=m / 2 {
        xp = powmod_poly(&xp, p, f, p);
        let g = gcd(f, &sub(&xp, &x, p), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Inverse of `a` modulo the irreducible `f`, via the extended Euclidean
/// algorithm. Returns `None` when `a ≡ 0`.
pub(crate) fn inverse_mod(a: &[u64], f: &[u64], p: u64) -> Option<Vec<u64>> {
    let mut r0 = f.to_vec();
    let mut r1 = divrem(a, f, p).1;
    if r1.is_empty() {
        return None;
    }
    let mut s0: Vec<u64> = Vec::new();
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        let s = sub(&s0, &mul(&q, &s1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    // r0 is a nonzero constant
    let c = inv_mod(r0[0], p);
    let mut out: Vec<u64> = s0.iter().map(|x| x * c % p).collect();
    trim(&mut out);
    Some(divrem(&out, f, p).1)
}

/// First monic irreducible polynomial of degree `m` in the order
/// `x^m + c_{m-1}x^{m-1} + … + c_0` with `(c_0, …, c_{m-1})` read as base-p digits.
pub(crate) fn find_irreducible(m: usize, p: u64) -> Vec<u64> {
    if m == 1 {
        return vec![0, 1];
    }
    let total = (p as u128).pow(m as u32);
    for n in 0..total {
        let mut f = Vec::with_capacity(m + 1);
        let mut k = n;
        for _ in 0..m {
            f.push((k % p as u128) as u64);
            k /= p as u128;
        }
        f.push(1);
        if f[0] != 0 && is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducibility_small_cases() {
        // x^2 + 2x + 2 over F_3 has no roots
        assert!(is_irreducible(&[2, 2, 1], 3));
        // x^2 + 2 = (x - 1)(x + 1) over F_3
        assert!(!is_irreducible(&[2, 0, 1], 3));
        // (x^2 + 1)^2 over F_3 is caught through the repeated factor
        assert!(!is_irreducible(&[1, 0, 2, 0, 1], 3));
        assert!(is_irreducible(&[1, 0, 1], 3));
    }

    #[test]
    fn search_returns_irreducible() {
        for p in [3u64, 5, 7] {
            for m in 1..=4 {
                let f = find_irreducible(m, p);
                assert_eq!(f.len(), m + 1);
                assert!(is_irreducible(&f, p));
            }
        }
    }

    #[test]
    fn inverse_mod_roundtrip() {
        let f = [2u64, 2, 1];
        for a0 in 0..3u64 {
            for a1 in 0..3u64 {
                let a = {
                    let mut v = vec![a0, a1];
                    trim(&mut v);
                    v
                };
                match inverse_mod(&a, &f, 3) {
                    None => assert!(a.is_empty()),
                    Some(b) => assert_eq!(mulmod(&a, &b, &f, 3), vec![1]),
                }
            }
        }
    }
}

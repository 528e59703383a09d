//! Small dense matrices over any `RingElem`; row-major `Vec<Vec<T>>`.
//!
//! Ranks here are tiny (the modules of interest have rank 2), so
//! determinants use cofactor expansion and characteristic polynomials use
//! the division-free Berkowitz recursion. Neither divides, which keeps
//! p-adic precision loss confined to the arithmetic itself.

use crate::error::{Error, Result};
use crate::ring::{Coeff, Rational, RingElem};

pub type Matrix<T> = Vec<Vec<T>>;

pub fn identity<T: RingElem>(like: &T, n: usize) -> Matrix<T> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { like.one_like() } else { like.zero_like() }).collect())
        .collect()
}

pub fn mat_mul<T: RingElem>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, |r| r.len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = a[i][0].mul_ref(&b[0][j]);
                    for l in 1..k {
                        acc = acc.add_ref(&a[i][l].mul_ref(&b[l][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec<T: RingElem>(a: &Matrix<T>, v: &[T]) -> Vec<T> {
    a.iter()
        .map(|row| {
            let mut acc = row[0].mul_ref(&v[0]);
            for (x, y) in row.iter().zip(v).skip(1) {
                acc = acc.add_ref(&x.mul_ref(y));
            }
            acc
        })
        .collect()
}

pub fn mat_sub<T: RingElem>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.sub_ref(y)).collect()).collect()
}

pub fn mat_add<T: RingElem>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.add_ref(y)).collect()).collect()
}

pub fn map_matrix<T, U>(a: &Matrix<T>, f: impl Fn(&T) -> U) -> Matrix<U> {
    a.iter().map(|r| r.iter().map(&f).collect()).collect()
}

pub fn transpose<T: Clone>(a: &Matrix<T>) -> Matrix<T> {
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

fn minor_matrix<T: Clone>(a: &Matrix<T>, row: usize, col: usize) -> Matrix<T> {
    a.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// Determinant by cofactor expansion along the first row.
pub fn det<T: RingElem>(a: &Matrix<T>) -> T {
    match a.len() {
        0 => panic!("determinant of an empty matrix"),
        1 => a[0][0].clone(),
        2 => a[0][0].mul_ref(&a[1][1]).sub_ref(&a[0][1].mul_ref(&a[1][0])),
        n => {
            let mut acc = a[0][0].zero_like();
            for j in 0..n {
                let term = a[0][j].mul_ref(&det(&minor_matrix(a, 0, j)));
                acc = if j % 2 == 0 { acc.add_ref(&term) } else { acc.sub_ref(&term) };
            }
            acc
        }
    }
}

/// Adjugate: `adj(A)·A = A·adj(A) = det(A)·I`.
pub fn adjugate<T: RingElem>(a: &Matrix<T>) -> Matrix<T> {
    let n = a.len();
    if n == 1 {
        return vec![vec![a[0][0].one_like()]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = det(&minor_matrix(a, j, i));
                    if (i + j) % 2 == 0 {
                        c
                    } else {
                        c.neg_ref()
                    }
                })
                .collect()
        })
        .collect()
}

/// Column `j` of an `n×r` matrix.
pub fn column<T: Clone>(a: &Matrix<T>, j: usize) -> Vec<T> {
    a.iter().map(|r| r[j].clone()).collect()
}

/// `n×r` matrix with the given columns; `n` is needed when `r = 0`.
pub fn from_columns<T: Clone>(cols: &[Vec<T>], n: usize) -> Matrix<T> {
    (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
}

pub fn num_cols<T>(a: &Matrix<T>) -> usize {
    a.first().map_or(0, |r| r.len())
}

/// Square submatrix on the given rows and columns.
pub fn submatrix<T: Clone>(a: &Matrix<T>, rows: &[usize], cols: &[usize]) -> Matrix<T> {
    rows.iter().map(|&i| cols.iter().map(|&j| a[i][j].clone()).collect()).collect()
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Coefficients `c_0, …, c_n` of `det(xI - A)` (so `c_n = 1`), via Berkowitz.
pub fn charpoly<T: RingElem>(a: &Matrix<T>) -> Vec<T> {
    let n = a.len();
    assert!(n > 0);
    let like = &a[0][0];
    // transforms[k-1] is the (k+2)×(k+1) Toeplitz matrix built from the
    // leading (k+1)×(k+1) block
    let mut transforms: Vec<Matrix<T>> = Vec::new();
    let mut block: Matrix<T> = a.clone();
    for size in (2..=n).rev() {
        let k = size - 1;
        let r: Vec<T> = (0..k).map(|j| block[k][j].neg_ref()).collect();
        let c: Vec<T> = (0..k).map(|i| block[i][k].clone()).collect();
        let lead = block[k][k].neg_ref();
        block = (0..k).map(|i| block[i][..k].to_vec()).collect();
        let mut vecs = vec![c];
        for i in 0..size.saturating_sub(2) {
            let next = mat_vec(&block, &vecs[i]);
            vecs.push(next);
        }
        let mut items = vec![like.one_like(), lead];
        for v in &vecs {
            let mut acc = r[0].mul_ref(&v[0]);
            for (x, y) in r.iter().zip(v).skip(1) {
                acc = acc.add_ref(&x.mul_ref(y));
            }
            items.push(acc);
        }
        let mut t: Matrix<T> = vec![vec![like.zero_like(); size]; size + 1];
        for col in 0..size {
            for row in col..=size {
                t[row][col] = items[row - col].clone();
            }
        }
        transforms.push(t);
    }
    transforms.reverse();
    let mut poly: Vec<T> = vec![like.one_like(), block[0][0].neg_ref()];
    for t in &transforms {
        poly = mat_vec(t, &poly);
    }
    // poly runs from x^n down to x^0
    poly.reverse();
    poly
}

/// Gaussian elimination over a coefficient field, pivoting on least valuation.
/// `a` must be square and invertible at the working precision.
pub fn solve_field<C: Coeff>(a: &mut Matrix<C>, b: &mut [C]) -> Result<Vec<C>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .filter_map(|r| a[r][col].valuation().map(|v| (v, r)))
            .min()
            .map(|(_, r)| r)
            .ok_or(Error::InversionOfZero)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].inv()?;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].mul_ref(&inv);
            for c in col..n {
                let t = factor.mul_ref(&a[col][c]);
                a[r][c] = a[r][c].sub_ref(&t);
            }
            let t = factor.mul_ref(&b[col]);
            b[r] = b[r].sub_ref(&t);
        }
    }
    let mut x: Vec<C> = vec![b[0].zero_like(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc = acc.sub_ref(&a[r][c].mul_ref(&x[c]));
        }
        x[r] = acc.mul_ref(&a[r][r].inv()?);
    }
    Ok(x)
}

/// Root valuations of a polynomial `Σ c_i x^i` read off its Newton polygon,
/// with multiplicity, in increasing order.
///
/// Coefficients that are zero only to finite precision are treated as
/// lying at height equal to their precision; if such a point falls strictly
/// below the polygon of the known coefficients the answer depends on digits
/// we do not have and `Inconclusive` is returned.
pub fn newton_slopes<C: Coeff>(coeffs: &[C]) -> Result<Vec<Rational>> {
    let known: Vec<(i64, Rational)> = coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.valuation().map(|v| (i as i64, v)))
        .collect();
    let deg = coeffs.len() as i64 - 1;
    if known.last().map(|k| k.0) != Some(deg) {
        return Err(Error::Inconclusive("leading coefficient vanishes at precision".into()));
    }
    if known.first().map(|k| k.0) != Some(0) {
        return Err(Error::ZeroDeterminant);
    }
    let hull = lower_hull(&known);
    for (i, c) in coeffs.iter().enumerate() {
        if c.valuation().is_none() {
            if let Some(prec) = c.precision() {
                let h = polygon_height(&hull, i as i64);
                if prec < h {
                    return Err(Error::Inconclusive(format!(
                        "coefficient of x^{i} is only known to be O(p^{prec})"
                    )));
                }
            }
        }
    }
    let mut out = Vec::new();
    for w in hull.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        let slope = (y1 - y0) / Rational::from(x1 - x0);
        for _ in 0..(x1 - x0) {
            out.push(-slope);
        }
    }
    out.sort();
    Ok(out)
}

/// Lower convex hull of points sorted by abscissa.
pub fn lower_hull(points: &[(i64, Rational)]) -> Vec<(i64, Rational)> {
    let mut hull: Vec<(i64, Rational)> = Vec::new();
    for &pt in points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop the middle point when it lies on or above the chord
            let cross = (y2 - y1) * Rational::from(pt.0 - x1) - (pt.1 - y1) * Rational::from(x2 - x1);
            if cross >= Rational::from(0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull
}

fn polygon_height(hull: &[(i64, Rational)], x: i64) -> Rational {
    for w in hull.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        if x0 <= x && x <= x1 {
            return y0 + (y1 - y0) * Rational::new(x - x0, x1 - x0);
        }
    }
    hull[0].1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Unramified;
    use std::sync::Arc;

    fn field() -> Arc<Unramified> {
        Unramified::new(3, 1, 12, None).unwrap()
    }

    fn m(f: &Arc<Unramified>, rows: &[&[i64]]) -> Matrix<crate::padic::Padic> {
        rows.iter().map(|r| r.iter().map(|&x| f.from_int(x)).collect()).collect()
    }

    fn ints(v: &[crate::padic::Padic]) -> Vec<i128> {
        v.iter().map(|x| {
            let n = x.to_integer().unwrap();
            // symmetric residue for readability
            let modulus = 3i128.pow(12);
            if n > modulus / 2 { n - modulus } else { n }
        }).collect()
    }

    #[test]
    fn charpoly_matches_cofactor_expansion() {
        let f = field();
        let a = m(&f, &[&[2, 1, 0], &[1, 3, 1], &[4, 0, 5]]);
        let cp = charpoly(&a);
        // det(xI - A) = x^3 - 10x^2 + 30x - 29, expanded by hand
        assert_eq!(ints(&cp), vec![-29, 30, -10, 1]);
        let b = m(&f, &[&[0, 3], &[1, 0]]);
        assert_eq!(ints(&charpoly(&b)), vec![-3, 0, 1]);
    }

    #[test]
    fn adjugate_identity() {
        let f = field();
        let a = m(&f, &[&[2, 1, 7], &[1, 3, 1], &[4, 0, 5]]);
        let d = det(&a);
        let prod = mat_mul(&adjugate(&a), &a);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { d.clone() } else { f.zero() };
                assert!(prod[i][j].agrees_with(&expect));
            }
        }
    }

    #[test]
    fn solve_small_system() {
        let f = field();
        let mut a = m(&f, &[&[3, 1], &[1, 1]]);
        let mut b = vec![f.from_int(5), f.from_int(3)];
        let x = solve_field(&mut a, &mut b).unwrap();
        assert_eq!(ints(&x), vec![1, 2]);
    }

    #[test]
    fn newton_slopes_examples() {
        let f = field();
        // x^2 - 3: one segment of slope -1/2
        let s = newton_slopes(&[f.from_int(-3), f.zero(), f.one()]).unwrap();
        assert_eq!(s, vec![Rational::new(1, 2), Rational::new(1, 2)]);
        // (x-3)(x-1)
        let s = newton_slopes(&[f.from_int(3), f.from_int(-4), f.one()]).unwrap();
        assert_eq!(s, vec![Rational::from(0), Rational::from(1)]);
        // x^2 - 27 x + 9 ... roots of valuation 1, 1? points (0,2),(1,3),(2,0)
        let s = newton_slopes(&[f.from_int(9), f.from_int(-27), f.one()]).unwrap();
        assert_eq!(s, vec![Rational::from(1), Rational::from(1)]);
    }

    #[test]
    fn newton_slopes_inconclusive_on_lost_digits() {
        let f = field();
        let lost = f.zero_mod(1);
        let r = newton_slopes(&[f.from_int(81), lost, f.one()]);
        assert!(matches!(r, Err(Error::Inconclusive(_))));
    }
}

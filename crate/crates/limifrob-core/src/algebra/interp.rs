//! Polynomial and rational-function interpolation over ℚ (Newton divided
//! differences and Cauchy interpolation via the extended Euclidean
//! algorithm).  Used by the evaluation–interpolation fast path for large
//! reduction systems.

use super::poly::UniPoly;
use super::ratfunc::RatFunc;
use super::Rat;
use num_traits::Zero;

/// Interpolating polynomial through distinct nodes, by Newton divided
/// differences.
pub fn poly_interpolate(points: &[(Rat, Rat)]) -> UniPoly<Rat> {
    let n = points.len();
    if n == 0 {
        return UniPoly::zero();
    }
    // Divided-difference coefficients.
    let mut dd: Vec<Rat> = points.iter().map(|(_, y)| y.clone()).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            let num = dd[i].clone() - &dd[i - 1];
            let den = points[i].0.clone() - &points[i - level].0;
            assert!(!den.is_zero(), "interpolation nodes must be distinct");
            dd[i] = num / den;
        }
    }
    // Horner assembly of the Newton form.
    let mut poly = UniPoly::zero();
    for i in (0..n).rev() {
        let factor = UniPoly::new(vec![-points[i].0.clone(), Rat::from_integer(1.into())]);
        poly = if i + 1 == n {
            UniPoly::constant(dd[i].clone())
        } else {
            poly.mul(&factor).add(&UniPoly::constant(dd[i].clone()))
        };
    }
    poly
}

/// Cauchy (rational-function) interpolation: finds `f = r/v` with
/// `deg r ≤ max_num`, `deg v ≤ max_den`, matching all nodes, if one exists.
///
/// Runs the extended Euclidean algorithm on `(∏(x − xᵢ), P)` where `P` is the
/// polynomial interpolant, stopping at the first remainder of degree
/// ≤ `max_num`; the cofactor of `P` is the denominator.  The candidate is
/// validated by `r(xᵢ) = yᵢ·v(xᵢ)` at every node.
pub fn cauchy_interpolate(
    points: &[(Rat, Rat)],
    max_num: usize,
    max_den: usize,
) -> Option<RatFunc> {
    assert!(
        points.len() > max_num + max_den + 1,
        "need more than max_num + max_den + 1 nodes to determine and verify"
    );
    let p = poly_interpolate(points);
    let mut modulus = UniPoly::one();
    for (x, _) in points {
        modulus = modulus.mul(&UniPoly::new(vec![-x.clone(), Rat::from_integer(1.into())]));
    }
    // EEA state: r = u·modulus + v·p  (u is not tracked).
    let mut r0 = modulus;
    let mut r1 = p;
    let mut v0 = UniPoly::<Rat>::zero();
    let mut v1 = UniPoly::<Rat>::one();
    while r1.degree().unwrap_or(0) > max_num && !r1.is_zero() {
        let (q, r) = r0.divrem(&r1);
        let v = v0.sub(&q.mul(&v1));
        r0 = std::mem::replace(&mut r1, r);
        v0 = std::mem::replace(&mut v1, v);
    }
    if r1.is_zero() && v1.degree().unwrap_or(0) == 0 {
        // p itself was the zero function.
        return Some(RatFunc::zero());
    }
    if v1.is_zero() || v1.degree().unwrap_or(0) > max_den {
        return None;
    }
    for (x, y) in points {
        if r1.eval(x) != y.clone() * v1.eval(x) {
            return None;
        }
    }
    Some(RatFunc::new(r1, v1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rint};

    #[test]
    fn polynomial_through_samples() {
        // f(x) = 3x² − x + 2 sampled at 0, 1, 2.
        let f = UniPoly::new(vec![rint(2), rint(-1), rint(3)]);
        let pts: Vec<(Rat, Rat)> = (0..3)
            .map(|i| (rint(i), f.eval(&rint(i))))
            .collect();
        assert_eq!(poly_interpolate(&pts), f);
    }

    #[test]
    fn rational_function_recovered() {
        // f(x) = (x² + 1)/(x − 5), sampled away from the pole.
        let num = UniPoly::new(vec![rint(1), rint(0), rint(1)]);
        let den = UniPoly::new(vec![rint(-5), rint(1)]);
        let f = RatFunc::new(num, den);
        let pts: Vec<(Rat, Rat)> = (0..9)
            .filter(|i| *i != 5)
            .map(|i| (rint(i), f.eval(&rint(i)).unwrap()))
            .collect();
        let rec = cauchy_interpolate(&pts, 2, 1).unwrap();
        assert_eq!(rec, f);
        // Verification on extra nodes it has never seen.
        assert_eq!(rec.eval(&rat(22, 7)), f.eval(&rat(22, 7)));
    }

    #[test]
    fn degree_budget_too_small_is_detected() {
        let num = UniPoly::new(vec![rint(1), rint(0), rint(1)]);
        let den = UniPoly::new(vec![rint(-5), rint(1)]);
        let f = RatFunc::new(num, den);
        let pts: Vec<(Rat, Rat)> = (0..9)
            .filter(|i| *i != 5)
            .map(|i| (rint(i), f.eval(&rint(i)).unwrap()))
            .collect();
        assert!(cauchy_interpolate(&pts, 1, 1).is_none());
    }
}

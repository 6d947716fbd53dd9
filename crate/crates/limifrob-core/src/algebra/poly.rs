//! Dense univariate polynomials over a commutative ring.

use num_traits::{FromPrimitive, One, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Coefficient requirements for [`UniPoly`].  Blanket-implemented; the
/// concrete instantiations in this crate are `BigRational` and `BigInt`.
pub trait Coeff:
    Clone
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + FromPrimitive
{
}

impl<T> Coeff for T where
    T: Clone + PartialEq + Zero + One + Neg<Output = T> + Sub<Output = T> + FromPrimitive
{
}

/// Dense univariate polynomial.  Invariant: `coeffs` is empty (the zero
/// polynomial) or its last entry is nonzero.
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly<C> {
    coeffs: Vec<C>,
}

impl<C: Coeff> UniPoly<C> {
    /// Builds a polynomial from low-to-high coefficients, trimming trailing
    /// zeros to restore the invariant.
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPoly::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        UniPoly::new(vec![c])
    }

    /// `c·x^k`.
    pub fn monomial(c: C, k: usize) -> Self {
        if c.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![C::zero(); k + 1];
        coeffs[k] = c;
        UniPoly { coeffs }
    }

    /// The variable `x`.
    pub fn x() -> Self {
        UniPoly::monomial(C::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial counted as 0 (convenient for bounds).
    pub fn degree_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> UniPoly<D> {
        UniPoly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        UniPoly::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - other.coeff(i));
        }
        UniPoly::new(out)
    }

    pub fn neg(&self) -> Self {
        UniPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = std::mem::replace(&mut out[i + j], C::zero()) + a.clone() * b.clone();
            }
        }
        UniPoly::new(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return UniPoly::zero();
        }
        UniPoly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Multiplies by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![C::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        UniPoly { coeffs }
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.clone() * C::from_usize(i).expect("small integer fits coefficient"))
            .collect();
        UniPoly::new(out)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &C) -> C {
        let mut acc = C::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// Substitutes another polynomial for the variable (Horner).
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = UniPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&UniPoly::constant(c.clone()));
        }
        acc
    }

    /// Substitutes `x ↦ x^e`, spreading coefficients.
    pub fn subst_pow(&self, e: usize) -> Self {
        assert!(e >= 1, "substitution exponent must be positive");
        if self.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![C::zero(); (self.coeffs.len() - 1) * e + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * e] = c.clone();
        }
        UniPoly { coeffs: out }
    }

    /// The reversed polynomial `x^deg · f(1/x)`.
    pub fn reversed(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        UniPoly::new(coeffs)
    }

    /// Valuation at 0: the index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Divides by `x^k`; panics if the valuation is smaller than `k`.
    pub fn shift_down(&self, k: usize) -> Self {
        if self.is_zero() {
            return UniPoly::zero();
        }
        assert!(
            self.valuation().expect("nonzero") >= k,
            "shift_down requires valuation >= {k}"
        );
        UniPoly::new(self.coeffs[k..].to_vec())
    }
}

impl<C: Coeff + Div<Output = C>> UniPoly<C> {
    /// Euclidean division by a polynomial with invertible leading
    /// coefficient; returns `(quotient, remainder)`.
    pub fn divrem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dd = divisor.degree().expect("nonzero divisor");
        let lead = divisor.leading().expect("nonzero divisor").clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut quot = vec![C::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = rem[i].clone() / lead.clone();
            quot[i - dd] = q.clone();
            for j in 0..=dd {
                let t = std::mem::replace(&mut rem[i - dd + j], C::zero());
                rem[i - dd + j] = t - q.clone() * divisor.coeffs[j].clone();
            }
        }
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    /// Makes the leading coefficient 1 (no-op on zero).
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => UniPoly::zero(),
            Some(l) => {
                let l = l.clone();
                UniPoly::new(
                    self.coeffs
                        .iter()
                        .map(|c| c.clone() / l.clone())
                        .collect(),
                )
            }
        }
    }

    /// Monic gcd by the Euclidean algorithm (field coefficients).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Exact division; panics if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Self) -> Self {
        let (q, r) = self.divrem(divisor);
        assert!(r.is_zero(), "div_exact: division was not exact");
        q
    }
}

impl<C: Coeff + fmt::Display> fmt::Debug for UniPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*x")?,
                _ => write!(f, "({c})*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl<C: Coeff> Add for &UniPoly<C> {
    type Output = UniPoly<C>;
    fn add(self, rhs: Self) -> UniPoly<C> {
        UniPoly::add(self, rhs)
    }
}

impl<C: Coeff> Sub for &UniPoly<C> {
    type Output = UniPoly<C>;
    fn sub(self, rhs: Self) -> UniPoly<C> {
        UniPoly::sub(self, rhs)
    }
}

impl<C: Coeff> Mul for &UniPoly<C> {
    type Output = UniPoly<C>;
    fn mul(self, rhs: Self) -> UniPoly<C> {
        UniPoly::mul(self, rhs)
    }
}

impl<C: Coeff> Neg for &UniPoly<C> {
    type Output = UniPoly<C>;
    fn neg(self) -> UniPoly<C> {
        UniPoly::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rint, Rat};

    fn p(coeffs: &[i64]) -> UniPoly<Rat> {
        UniPoly::new(coeffs.iter().map(|&c| rint(c)).collect())
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let f = p(&[1, 2, 0, 0]);
        assert_eq!(f.degree(), Some(1));
        assert!(p(&[0, 0]).is_zero());
        assert_eq!(p(&[0]).degree(), None);
    }

    #[test]
    fn arithmetic_matches_hand_computation() {
        let f = p(&[1, 1]); // 1 + x
        let g = p(&[-1, 1]); // -1 + x
        assert_eq!(f.mul(&g), p(&[-1, 0, 1]));
        assert_eq!(f.add(&g), p(&[0, 2]));
        assert_eq!(f.sub(&g), p(&[2]));
        assert_eq!(f.derivative(), p(&[1]));
    }

    #[test]
    fn divrem_recombines() {
        let f = p(&[3, 0, -2, 7, 1]);
        let g = p(&[1, 2, 1]);
        let (q, r) = f.divrem(&g);
        assert_eq!(q.mul(&g).add(&r), f);
        assert!(r.degree_or_zero() < g.degree().unwrap());
    }

    #[test]
    fn gcd_of_products_contains_common_factor() {
        let a = p(&[1, 1]);
        let b = p(&[2, 1]);
        let c = p(&[-3, 1]);
        let g = a.mul(&b).gcd(&a.mul(&c));
        assert_eq!(g, a.monic());
    }

    #[test]
    fn eval_and_compose_agree() {
        let f = p(&[2, -1, 3]);
        let g = p(&[1, 5]);
        let x = rat(7, 2);
        assert_eq!(f.compose(&g).eval(&x), f.eval(&g.eval(&x)));
    }

    #[test]
    fn subst_pow_spreads_coefficients() {
        let f = p(&[1, 2, 3]);
        let g = f.subst_pow(3);
        assert_eq!(g.degree(), Some(6));
        assert_eq!(g.coeff(3), rint(2));
        assert_eq!(g.coeff(2), rint(0));
    }
}

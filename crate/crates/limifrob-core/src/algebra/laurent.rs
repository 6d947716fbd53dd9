//! Laurent polynomials over ℚ: a dense polynomial together with an integer
//! valuation shift.

use super::poly::UniPoly;
use super::Rat;
use num_traits::{FromPrimitive, Zero};

/// `s^val · base(s)` with `base` having a nonzero constant term (so `val` is
/// the exact valuation at 0), or `base = 0, val = 0` for the zero element.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    base: UniPoly<Rat>,
    val: i64,
}

impl LaurentPoly {
    pub fn new(base: UniPoly<Rat>, val: i64) -> Self {
        match base.valuation() {
            None => LaurentPoly {
                base: UniPoly::zero(),
                val: 0,
            },
            Some(v) => LaurentPoly {
                base: base.shift_down(v),
                val: val + v as i64,
            },
        }
    }

    pub fn zero() -> Self {
        LaurentPoly {
            base: UniPoly::zero(),
            val: 0,
        }
    }

    pub fn one() -> Self {
        LaurentPoly {
            base: UniPoly::one(),
            val: 0,
        }
    }

    pub fn constant(c: Rat) -> Self {
        LaurentPoly::new(UniPoly::constant(c), 0)
    }

    pub fn from_poly(p: UniPoly<Rat>) -> Self {
        LaurentPoly::new(p, 0)
    }

    /// `c·s^k` with `k` possibly negative.
    pub fn monomial(c: Rat, k: i64) -> Self {
        LaurentPoly::new(UniPoly::constant(c), k)
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero()
    }

    /// Valuation at 0; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.val)
        }
    }

    /// Largest exponent with nonzero coefficient; `None` for zero.
    pub fn top_degree(&self) -> Option<i64> {
        self.base.degree().map(|d| self.val + d as i64)
    }

    /// Coefficient of `s^k`.
    pub fn coeff(&self, k: i64) -> Rat {
        if self.is_zero() || k < self.val {
            return Rat::zero();
        }
        self.base.coeff((k - self.val) as usize)
    }

    pub fn base(&self) -> &UniPoly<Rat> {
        &self.base
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let val = self.val.min(other.val);
        let a = self.base.shift_up((self.val - val) as usize);
        let b = other.base.shift_up((other.val - val) as usize);
        LaurentPoly::new(a.add(&b), val)
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            base: self.base.neg(),
            val: self.val,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            base: self.base.mul(&other.base),
            val: self.val + other.val,
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        LaurentPoly::new(self.base.scale(c), self.val)
    }

    /// Multiplies by `s^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            base: self.base.clone(),
            val: self.val + k,
        }
    }

    /// d/ds.
    pub fn derivative(&self) -> Self {
        if self.is_zero() {
            return LaurentPoly::zero();
        }
        let coeffs: Vec<Rat> = self
            .base
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.clone() * Rat::from_i64(self.val + i as i64).expect("integer fits rational")
            })
            .collect();
        LaurentPoly::new(UniPoly::new(coeffs), self.val - 1)
    }

    /// Substitutes `s ↦ s^e`, `e ≥ 1`.
    pub fn subst_pow(&self, e: i64) -> Self {
        assert!(e >= 1);
        if self.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            base: self.base.subst_pow(e as usize),
            val: self.val * e,
        }
    }

    /// Evaluation at a nonzero rational point.
    pub fn eval(&self, x: &Rat) -> Rat {
        assert!(!x.is_zero(), "Laurent evaluation at 0");
        let p = self.base.eval(x);
        let shift = if self.val >= 0 {
            num_traits::pow::pow(x.clone(), self.val as usize)
        } else {
            num_traits::pow::pow(x.clone(), (-self.val) as usize)
                .recip()
        };
        p * shift
    }

    /// True when no negative power of `s` occurs.
    pub fn is_regular(&self) -> bool {
        self.is_zero() || self.val >= 0
    }

    /// Converts to an ordinary polynomial; panics when a negative power
    /// occurs.
    pub fn to_poly(&self) -> UniPoly<Rat> {
        assert!(self.is_regular(), "Laurent polynomial has a pole at 0");
        if self.is_zero() {
            UniPoly::zero()
        } else {
            self.base.shift_up(self.val as usize)
        }
    }
}

impl std::fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "s^{}*({:?})", self.val, self.base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rint};

    fn lp(coeffs: &[i64], val: i64) -> LaurentPoly {
        LaurentPoly::new(
            UniPoly::new(coeffs.iter().map(|&c| rint(c)).collect()),
            val,
        )
    }

    #[test]
    fn normalization_moves_valuation() {
        let f = lp(&[0, 0, 3, 1], -1);
        assert_eq!(f.valuation(), Some(1));
        assert_eq!(f.coeff(1), rint(3));
        assert_eq!(f.coeff(0), rint(0));
    }

    #[test]
    fn derivative_handles_negative_exponents() {
        // d/ds (s^{-2}) = -2 s^{-3}; d/ds (constant) = 0.
        let f = lp(&[1], -2);
        assert_eq!(f.derivative(), lp(&[-2], -3));
        assert!(lp(&[5], 0).derivative().is_zero());
    }

    #[test]
    fn eval_matches_structure() {
        let f = lp(&[1, 1], -1); // s^{-1} + 1
        let x = rat(2, 3);
        assert_eq!(f.eval(&x), rat(3, 2) + rat(1, 1));
    }

    #[test]
    fn mul_adds_valuations() {
        let f = lp(&[1, 1], -2);
        let g = lp(&[2], 5);
        assert_eq!(f.mul(&g).valuation(), Some(3));
    }
}

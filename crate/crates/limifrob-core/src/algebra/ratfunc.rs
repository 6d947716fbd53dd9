//! Rational functions in one variable over ℚ, kept in lowest terms with a
//! monic denominator, plus the integer-polynomial gcd machinery used to keep
//! coefficient growth under control.

use super::poly::UniPoly;
use super::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Extracts `f = scale · g` with `g` a primitive integer polynomial with
/// positive leading coefficient.  Returns `(scale, g)`; for `f = 0` the scale
/// is 0 and `g = 0`.
pub fn primitive_int(f: &UniPoly<Rat>) -> (Rat, UniPoly<BigInt>) {
    if f.is_zero() {
        return (Rat::zero(), UniPoly::zero());
    }
    let mut den_lcm = BigInt::one();
    for c in f.coeffs() {
        den_lcm = den_lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = f
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&den_lcm / c.denom()))
        .collect();
    let mut content = BigInt::zero();
    for c in &ints {
        content = content.gcd(c);
    }
    if ints.last().expect("nonzero poly").is_negative() {
        content = -content;
    }
    let prim = UniPoly::new(ints.iter().map(|c| c / &content).collect());
    (Rat::new(content, den_lcm), prim)
}

/// Content (gcd of coefficients, sign matching the leading coefficient) of an
/// integer polynomial.
pub fn int_content(f: &UniPoly<BigInt>) -> BigInt {
    let mut content = BigInt::zero();
    for c in f.coeffs() {
        content = content.gcd(c);
    }
    if f.leading().is_some_and(Signed::is_negative) {
        content = -content;
    }
    content
}

fn int_primitive_part(f: &UniPoly<BigInt>) -> UniPoly<BigInt> {
    if f.is_zero() {
        return UniPoly::zero();
    }
    let c = int_content(f);
    UniPoly::new(f.coeffs().iter().map(|a| a / &c).collect())
}

/// Pseudo-remainder of `a` by `b` (both nonzero): the remainder of
/// `lc(b)^(deg a − deg b + 1) · a` under polynomial division by `b`, which
/// stays integral.
fn pseudo_rem(a: &UniPoly<BigInt>, b: &UniPoly<BigInt>) -> UniPoly<BigInt> {
    let db = b.degree().expect("nonzero divisor");
    let lead = b.leading().expect("nonzero divisor").clone();
    let mut rem: Vec<BigInt> = a.coeffs().to_vec();
    while rem.len() > db {
        let top = rem.last().expect("nonempty").clone();
        let shift = rem.len() - 1 - db;
        for c in rem.iter_mut() {
            *c = &*c * &lead;
        }
        for j in 0..=db {
            let sub = &top * &b.coeffs()[j];
            rem[shift + j] -= sub;
        }
        while rem.last().is_some_and(Zero::is_zero) {
            rem.pop();
        }
        if rem.is_empty() {
            break;
        }
    }
    UniPoly::new(rem)
}

/// Gcd of integer polynomials via the primitive pseudo-remainder sequence;
/// the result is primitive with positive leading coefficient.
pub fn int_poly_gcd(a: &UniPoly<BigInt>, b: &UniPoly<BigInt>) -> UniPoly<BigInt> {
    if a.is_zero() {
        return int_primitive_part(b);
    }
    if b.is_zero() {
        return int_primitive_part(a);
    }
    let (mut f, mut g) = if a.degree_or_zero() >= b.degree_or_zero() {
        (int_primitive_part(a), int_primitive_part(b))
    } else {
        (int_primitive_part(b), int_primitive_part(a))
    };
    while !g.is_zero() {
        let r = int_primitive_part(&pseudo_rem(&f, &g));
        f = g;
        g = r;
    }
    f
}

/// Monic gcd over ℚ computed through the integer primitive PRS (much better
/// coefficient growth than naive rational Euclid).
pub fn rat_poly_gcd(a: &UniPoly<Rat>, b: &UniPoly<Rat>) -> UniPoly<Rat> {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let (_, ia) = primitive_int(a);
    let (_, ib) = primitive_int(b);
    let g = int_poly_gcd(&ia, &ib);
    g.map(|c| Rat::from_integer(c.clone())).monic()
}

/// Squarefree part of a rational polynomial: `f / gcd(f, f′)`, monic.
pub fn squarefree_part(f: &UniPoly<Rat>) -> UniPoly<Rat> {
    if f.is_zero() {
        return UniPoly::zero();
    }
    let g = rat_poly_gcd(f, &f.derivative());
    f.div_exact(&g).monic()
}

/// Rational function in lowest terms.  Invariants: `den` is monic and
/// nonzero, `gcd(num, den) = 1`; the zero function has `num = 0, den = 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: UniPoly<Rat>,
    den: UniPoly<Rat>,
}

impl RatFunc {
    pub fn new(num: UniPoly<Rat>, den: UniPoly<Rat>) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFunc {
                num: UniPoly::zero(),
                den: UniPoly::one(),
            };
        }
        let g = rat_poly_gcd(&num, &den);
        let num = num.div_exact(&g);
        let den = den.div_exact(&g);
        let lead = den.leading().expect("nonzero").clone();
        RatFunc {
            num: num.map(|c| c / &lead),
            den: den.monic(),
        }
    }

    pub fn from_poly(p: UniPoly<Rat>) -> Self {
        RatFunc {
            num: p,
            den: UniPoly::one(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        RatFunc::from_poly(UniPoly::constant(c))
    }

    pub fn zero() -> Self {
        RatFunc::from_poly(UniPoly::zero())
    }

    pub fn one() -> Self {
        RatFunc::from_poly(UniPoly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numer(&self) -> &UniPoly<Rat> {
        &self.num
    }

    pub fn denom(&self) -> &UniPoly<Rat> {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        // num/den + num'/den' with a gcd on the denominators first.
        let g = rat_poly_gcd(&self.den, &other.den);
        let da = self.den.div_exact(&g);
        let db = other.den.div_exact(&g);
        let num = &self.num.mul(&db) + &other.num.mul(&da);
        let den = self.den.mul(&db);
        RatFunc::new(num, den)
    }

    pub fn neg(&self) -> Self {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        // Cross-reduce before multiplying to limit growth.
        let g1 = rat_poly_gcd(&self.num, &other.den);
        let g2 = rat_poly_gcd(&other.num, &self.den);
        let num = self.num.div_exact(&g1).mul(&other.num.div_exact(&g2));
        let den = self.den.div_exact(&g2).mul(&other.den.div_exact(&g1));
        RatFunc::new(num, den)
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of the zero rational function");
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn derivative(&self) -> Self {
        let num = &self.num.derivative().mul(&self.den) - &self.num.mul(&self.den.derivative());
        let den = self.den.mul(&self.den);
        RatFunc::new(num, den)
    }

    /// Evaluation; `None` when `x` is a pole.
    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(x) / d)
    }

    /// Substitutes `t ↦ t^e`.
    pub fn subst_pow(&self, e: usize) -> Self {
        RatFunc::new(self.num.subst_pow(e), self.den.subst_pow(e))
    }

    /// Order of vanishing at 0 (negative for a pole); `None` for the zero
    /// function.
    pub fn valuation_at_zero(&self) -> Option<i64> {
        let vn = self.num.valuation()? as i64;
        let vd = self.den.valuation().expect("nonzero denominator") as i64;
        Some(vn - vd)
    }

    /// Pole order at 0 (0 if regular there).
    pub fn pole_order_at_zero(&self) -> i64 {
        self.valuation_at_zero().map_or(0, |v| (-v).max(0))
    }
}

impl std::fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?})/({:?})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rint};

    fn p(coeffs: &[i64]) -> UniPoly<Rat> {
        UniPoly::new(coeffs.iter().map(|&c| rint(c)).collect())
    }

    #[test]
    fn lowest_terms_and_monic_denominator() {
        // (x²−1)/(2x−2) = (x+1)/2.
        let f = RatFunc::new(p(&[-1, 0, 1]), p(&[-2, 2]));
        assert_eq!(f.numer(), &UniPoly::new(vec![rat(1, 2), rat(1, 2)]));
        assert_eq!(f.denom(), &UniPoly::one());
    }

    #[test]
    fn field_laws_on_samples() {
        let f = RatFunc::new(p(&[1, 3]), p(&[0, 0, 1]));
        let g = RatFunc::new(p(&[-2, 1]), p(&[5, 1]));
        let x = rat(3, 7);
        let fg = f.mul(&g);
        assert_eq!(
            fg.eval(&x).unwrap(),
            f.eval(&x).unwrap() * g.eval(&x).unwrap()
        );
        let s = f.add(&g);
        assert_eq!(
            s.eval(&x).unwrap(),
            f.eval(&x).unwrap() + g.eval(&x).unwrap()
        );
        assert_eq!(f.div(&f), RatFunc::one());
        assert_eq!(f.sub(&f), RatFunc::zero());
    }

    #[test]
    fn derivative_of_quotient() {
        // d/dt (1/t) = -1/t².
        let f = RatFunc::new(p(&[1]), p(&[0, 1]));
        let df = f.derivative();
        assert_eq!(df, RatFunc::new(p(&[-1]), p(&[0, 0, 1])));
        assert_eq!(f.pole_order_at_zero(), 1);
        assert_eq!(df.pole_order_at_zero(), 2);
    }

    #[test]
    fn int_gcd_finds_common_factor() {
        let a = p(&[1, 2]).mul(&p(&[3, 0, 1]));
        let b = p(&[1, 2]).mul(&p(&[-1, 1]));
        assert_eq!(rat_poly_gcd(&a, &b), p(&[1, 2]).monic());
    }

    #[test]
    fn squarefree_part_strips_multiplicity() {
        let f = p(&[1, 1]).mul(&p(&[1, 1])).mul(&p(&[-2, 1]));
        assert_eq!(squarefree_part(&f), p(&[1, 1]).mul(&p(&[-2, 1])).monic());
    }
}

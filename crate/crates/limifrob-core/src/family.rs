//! The one-parameter pencil of projective hypersurfaces and the monomial
//! basis of primitive middle cohomology that every later stage acts on.
//!
//! A family is P_t = (1−t)·P₀ + t·P₁, homogeneous of degree d in n+2
//! variables, with P₁ diagonal.  Primitive middle cohomology of a smooth
//! member is spanned by the classes x^w Ω / P_t^k where every exponent of w
//! lies in 0..=d−2 and |w| = k·d − (n+2).  Those classes are enumerated
//! here in a fixed order — pole level k ascending, then lexicographic in
//! w — which every matrix in the pipeline refers to by column index.

use crate::algebra::Rat;
use crate::error::Error;
use crate::Result;
use num_bigint::BigUint;
use num_traits::{One, Zero};

// ---------------------------------------------------------------------------
// Sparse multivariate polynomials over ℚ.
// ---------------------------------------------------------------------------

/// A sparse polynomial over ℚ in `nvars` variables: (exponent vector,
/// coefficient) pairs.  Constructors keep terms merged, nonzero, and sorted
/// by exponent vector, so equal polynomials compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    pub nvars: usize,
    pub terms: Vec<(Vec<u32>, Rat)>,
}

impl SparsePoly {
    /// Build from raw terms: merges duplicate exponent vectors, drops zero
    /// coefficients, sorts lexicographically.
    pub fn new(nvars: usize, terms: Vec<(Vec<u32>, Rat)>) -> Self {
        let mut merged: Vec<(Vec<u32>, Rat)> = Vec::new();
        let mut sorted = terms;
        for (e, _) in &sorted {
            assert!(
                e.len() == nvars,
                "exponent vector length must equal the variable count"
            );
        }
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        for (e, c) in sorted {
            if let Some(last) = merged.last_mut() {
                if last.0 == e {
                    last.1 += c;
                    continue;
                }
            }
            merged.push((e, c));
        }
        merged.retain(|(_, c)| !c.is_zero());
        SparsePoly {
            nvars,
            terms: merged,
        }
    }

    pub fn zero(nvars: usize) -> Self {
        SparsePoly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// Every term has total degree exactly `d` and the polynomial is
    /// nonzero.
    pub fn is_homogeneous_of_degree(&self, d: u32) -> bool {
        !self.terms.is_empty()
            && self
                .terms
                .iter()
                .all(|(e, _)| e.iter().sum::<u32>() == d)
    }

    /// Partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> SparsePoly {
        assert!(var < self.nvars, "variable index out of range");
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[var] > 0)
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2[var] -= 1;
                (e2, c * Rat::from_integer(e[var].into()))
            })
            .collect();
        SparsePoly::new(self.nvars, terms)
    }

    pub fn scale(&self, c: &Rat) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero(self.nvars);
        }
        SparsePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        assert!(self.nvars == other.nvars, "variable counts must agree");
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        SparsePoly::new(self.nvars, terms)
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        assert!(self.nvars == other.nvars, "variable counts must agree");
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                terms.push((e, c1 * c2));
            }
        }
        SparsePoly::new(self.nvars, terms)
    }

    /// Multiply by the monomial x^exps.
    pub fn mul_monomial(&self, exps: &[u32]) -> SparsePoly {
        assert!(exps.len() == self.nvars, "variable counts must agree");
        SparsePoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    (
                        e.iter().zip(exps).map(|(a, b)| a + b).collect(),
                        c.clone(),
                    )
                })
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// The cohomology basis.
// ---------------------------------------------------------------------------

/// A basis class x^w Ω / P_t^level of primitive middle cohomology.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    /// Pole order k, between 1 and n+1.
    pub level: usize,
    /// Monomial exponents, each in 0..=d−2, summing to level·d − (n+2).
    pub w: Vec<u32>,
}

/// All exponent vectors of length `nvars` with entries in 0..=cap summing
/// to `total`, in lexicographic order.
pub(crate) fn bounded_compositions(nvars: usize, cap: u32, total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn rec(cur: &mut Vec<u32>, pos: usize, cap: u32, rem: u32, out: &mut Vec<Vec<u32>>) {
        if pos == cur.len() {
            if rem == 0 {
                out.push(cur.clone());
            }
            return;
        }
        // Remaining positions must be able to absorb the remainder.
        let slots_after = (cur.len() - pos - 1) as u32;
        for v in 0..=cap.min(rem) {
            if rem - v > cap * slots_after {
                continue;
            }
            cur[pos] = v;
            rec(cur, pos + 1, cap, rem - v, out);
        }
        cur[pos] = 0;
    }
    rec(&mut cur, 0, cap, total, &mut out);
    out
}

/// The basis of primitive middle cohomology for degree-d hypersurfaces of
/// dimension n: monomials x^w with digits in 0..=d−2 and |w| = k·d−(n+2),
/// listed level by level (k = 1..=n+1), lexicographically within a level.
pub fn dwork_basis(n: usize, d: u32) -> Vec<BasisElement> {
    assert!(d >= 2, "degree must be at least 2");
    let nvars = n + 2;
    let mut out = Vec::new();
    for k in 1..=(n + 1) {
        let deg = k as i64 * d as i64 - nvars as i64;
        if deg < 0 {
            continue;
        }
        for w in bounded_compositions(nvars, d - 2, deg as u32) {
            out.push(BasisElement { level: k, w });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// The family itself.
// ---------------------------------------------------------------------------

/// A pencil P_t = (1−t)·P₀ + t·P₁ of degree-d hypersurfaces in ℙ^{n+1}
/// over ℚ, with diagonal P₁, studied at the odd prime p.
#[derive(Clone, Debug)]
pub struct Family {
    /// Dimension of the hypersurfaces (they live in ℙ^{n+1}).
    pub n: usize,
    /// Common degree of P₀ and P₁.
    pub d: u32,
    /// The prime of the p-adic computation.
    pub p: u64,
    /// General member at t = 0.
    pub p0: SparsePoly,
    /// Diagonal member at t = 1: Σ aᵢ·xᵢ^d with every aᵢ a p-adic unit.
    pub p1: SparsePoly,
}

impl Family {
    /// Validate and build a family.  Checks: p is an odd prime not dividing
    /// d, both polynomials are homogeneous of degree d in n+2 variables
    /// with p-integral coefficients, and P₁ is diagonal with p-unit
    /// coefficients on all n+2 variables.
    pub fn new(n: usize, d: u32, p: u64, p0: SparsePoly, p1: SparsePoly) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidFamily(
                "hypersurface dimension must be at least 1".into(),
            ));
        }
        if d < 2 {
            return Err(Error::InvalidFamily("degree must be at least 2".into()));
        }
        if p < 3 || p.is_multiple_of(2) || !crate::algebra::charpoly::is_probable_prime(&BigUint::from(p)) {
            return Err(Error::InvalidFamily(format!("p = {p} is not an odd prime")));
        }
        if u64::from(d) % p == 0 {
            return Err(Error::InvalidFamily(format!(
                "p = {p} divides the degree d = {d}"
            )));
        }
        let nvars = n + 2;
        let pbig = num_bigint::BigInt::from(p);
        for (name, poly) in [("P0", &p0), ("P1", &p1)] {
            if poly.nvars != nvars {
                return Err(Error::InvalidFamily(format!(
                    "{name} has {} variables, expected {nvars}",
                    poly.nvars
                )));
            }
            if !poly.is_homogeneous_of_degree(d) {
                return Err(Error::InvalidFamily(format!(
                    "{name} is not homogeneous of degree {d}"
                )));
            }
            for (_, c) in &poly.terms {
                if (c.denom() % &pbig).is_zero() {
                    return Err(Error::BadReduction(c.to_string()));
                }
            }
        }
        // P₁ must be exactly Σ aᵢ xᵢ^d over all variables, aᵢ a p-unit.
        if p1.terms.len() != nvars {
            return Err(Error::InvalidFamily(
                "P1 must have exactly one term per variable".into(),
            ));
        }
        let mut seen = vec![false; nvars];
        for (e, c) in &p1.terms {
            let support: Vec<usize> = (0..nvars).filter(|&i| e[i] > 0).collect();
            if support.len() != 1 || e[support[0]] != d {
                return Err(Error::InvalidFamily(format!(
                    "P1 term with exponents {e:?} is not of the form a·x_i^{d}"
                )));
            }
            seen[support[0]] = true;
            if (c.numer() % &pbig).is_zero() {
                return Err(Error::InvalidFamily(format!(
                    "diagonal coefficient {c} is divisible by p = {p}"
                )));
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::InvalidFamily(
                "P1 must involve every variable".into(),
            ));
        }
        Ok(Family { n, d, p, p0, p1 })
    }

    pub fn nvars(&self) -> usize {
        self.n + 2
    }

    /// The fiber polynomial (1−t)·P₀ + t·P₁ at a rational parameter value.
    pub fn member_at(&self, t: &Rat) -> SparsePoly {
        let one_minus = Rat::one() - t;
        self.p0.scale(&one_minus).add(&self.p1.scale(t))
    }

    /// The cohomology basis for this family's (n, d).
    pub fn basis(&self) -> Vec<BasisElement> {
        dwork_basis(self.n, self.d)
    }

    /// Diagonal coefficients a₀..a_{n+1} of P₁, indexed by variable.
    pub fn diagonal_coeffs(&self) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.nvars()];
        for (e, c) in &self.p1.terms {
            let var = (0..self.nvars())
                .find(|&i| e[i] > 0)
                .expect("diagonal term has a supported variable");
            out[var] = c.clone();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rint, UniPoly};
    use num_bigint::BigInt;

    fn mono(nvars: usize, pairs: &[(usize, u32)], c: Rat) -> (Vec<u32>, Rat) {
        let mut e = vec![0u32; nvars];
        for &(i, k) in pairs {
            e[i] = k;
        }
        (e, c)
    }

    /// x⁴+y⁴+z⁴ in 3 variables.
    fn fermat(nvars: usize, d: u32) -> SparsePoly {
        SparsePoly::new(
            nvars,
            (0..nvars).map(|i| mono(nvars, &[(i, d)], rint(1))).collect(),
        )
    }

    #[test]
    fn sparse_poly_arithmetic_basics() {
        // (x+y)·(x−y) = x²−y² and ∂/∂x(x²−y²) = 2x.
        let x = SparsePoly::new(2, vec![mono(2, &[(0, 1)], rint(1))]);
        let y = SparsePoly::new(2, vec![mono(2, &[(1, 1)], rint(1))]);
        let prod = x.add(&y).mul(&x.sub(&y));
        let expect = SparsePoly::new(
            2,
            vec![mono(2, &[(0, 2)], rint(1)), mono(2, &[(1, 2)], rint(-1))],
        );
        assert_eq!(prod, expect);
        let dx = prod.partial(0);
        assert_eq!(dx, SparsePoly::new(2, vec![mono(2, &[(0, 1)], rint(2))]));
        assert!(prod.is_homogeneous_of_degree(2));
        assert!(!prod.add(&x).is_homogeneous_of_degree(2));
    }

    // The basis sizes below are the primitive middle Betti numbers; the
    // expected values are frozen from the dimension formula
    // ((d−1)^{n+2} + (−1)^n (d−1)) / d computed by hand:
    //   (n,d) = (1,4): (27 − 3)/4  = 6
    //   (n,d) = (2,4): (81 + 3)/4  = 21, split (1, 19, 1) by pole level
    //   (n,d) = (3,3): (32 − 2)/3  = 10, split (0, 5, 5, 0) by pole level
    #[test]
    fn basis_counts_match_betti_numbers() {
        let b14 = dwork_basis(1, 4);
        assert_eq!(b14.len(), 6);
        let b24 = dwork_basis(2, 4);
        assert_eq!(b24.len(), 21);
        let by_level = |b: &[BasisElement], k: usize| b.iter().filter(|e| e.level == k).count();
        assert_eq!(by_level(&b24, 1), 1);
        assert_eq!(by_level(&b24, 2), 19);
        assert_eq!(by_level(&b24, 3), 1);
        let b33 = dwork_basis(3, 3);
        assert_eq!(b33.len(), 10);
        assert_eq!(by_level(&b33, 1), 0);
        assert_eq!(by_level(&b33, 2), 5);
        assert_eq!(by_level(&b33, 3), 5);
        assert_eq!(by_level(&b33, 4), 0);
    }

    #[test]
    fn basis_ordering_is_by_level_then_lex() {
        let b = dwork_basis(1, 4);
        // Level 1: |w| = 1 over digits ≤ 2 → (0,0,1), (0,1,0), (1,0,0);
        // level 2: |w| = 5 → lex-first is (1,2,2).
        assert_eq!(b[0].w, vec![0, 0, 1]);
        assert_eq!(b[1].w, vec![0, 1, 0]);
        assert_eq!(b[2].w, vec![1, 0, 0]);
        assert_eq!(b[3].level, 2);
        assert_eq!(b[3].w, vec![1, 2, 2]);
    }

    /// Independent oracle: the number of level-k elements is the
    /// coefficient of x^{kd−(n+2)} in (1 + x + … + x^{d−2})^{n+2},
    /// computed by univariate polynomial multiplication.
    #[test]
    fn basis_level_counts_match_generating_function() {
        for (n, d) in [(1usize, 3u32), (1, 4), (1, 5), (2, 4), (2, 5), (3, 3), (3, 4)] {
            let nvars = n + 2;
            let step = UniPoly::new(vec![BigInt::from(1); (d - 1) as usize]);
            let mut gf = UniPoly::new(vec![BigInt::from(1)]);
            for _ in 0..nvars {
                gf = gf.mul(&step);
            }
            let basis = dwork_basis(n, d);
            for k in 1..=(n + 1) {
                let deg = k as i64 * d as i64 - nvars as i64;
                let expect = if deg < 0 {
                    BigInt::from(0)
                } else {
                    gf.coeff(deg as usize)
                };
                let got = basis.iter().filter(|e| e.level == k).count();
                assert_eq!(
                    BigInt::from(got),
                    expect,
                    "level {k} count for (n,d)=({n},{d})"
                );
            }
        }
    }

    #[test]
    fn family_validation_accepts_good_and_rejects_bad() {
        let p0 = SparsePoly::new(
            3,
            vec![
                mono(3, &[(0, 4)], rint(1)),
                mono(3, &[(1, 4)], rint(1)),
                mono(3, &[(2, 4)], rint(1)),
                mono(3, &[(0, 1), (1, 2), (2, 1)], rint(2)),
            ],
        );
        let p1 = fermat(3, 4);
        let fam = Family::new(1, 4, 5, p0.clone(), p1.clone()).expect("valid family");
        assert_eq!(fam.nvars(), 3);
        assert_eq!(fam.diagonal_coeffs(), vec![rint(1), rint(1), rint(1)]);
        // t = 0 and t = 1 recover the ends of the pencil.
        assert_eq!(fam.member_at(&rint(0)), p0);
        assert_eq!(fam.member_at(&rint(1)), p1);
        // Midpoint has the mixed term halved.
        let mid = fam.member_at(&rat(1, 2));
        let coeff = mid
            .terms
            .iter()
            .find(|(e, _)| e == &vec![1, 2, 1])
            .expect("mixed term survives at the midpoint")
            .1
            .clone();
        assert_eq!(coeff, rint(1));

        // p even / composite / dividing d.
        assert!(matches!(
            Family::new(1, 4, 2, p0.clone(), p1.clone()),
            Err(Error::InvalidFamily(_))
        ));
        assert!(matches!(
            Family::new(1, 4, 9, p0.clone(), p1.clone()),
            Err(Error::InvalidFamily(_))
        ));
        assert!(Family::new(1, 4, 999999937, p0.clone(), p1.clone()).is_ok());
        assert!(matches!(
            Family::new(1, 3, 3, fermat(3, 3), fermat(3, 3)),
            Err(Error::InvalidFamily(_))
        ));

        // Non-homogeneous P0.
        let bad = p0.add(&SparsePoly::new(3, vec![mono(3, &[(0, 1)], rint(1))]));
        assert!(matches!(
            Family::new(1, 4, 5, bad, p1.clone()),
            Err(Error::InvalidFamily(_))
        ));

        // Non-diagonal P1.
        assert!(matches!(
            Family::new(1, 4, 5, p0.clone(), p0.clone()),
            Err(Error::InvalidFamily(_))
        ));

        // Diagonal coefficient divisible by p.
        let p1_bad = SparsePoly::new(
            3,
            vec![
                mono(3, &[(0, 4)], rint(5)),
                mono(3, &[(1, 4)], rint(1)),
                mono(3, &[(2, 4)], rint(1)),
            ],
        );
        assert!(matches!(
            Family::new(1, 4, 5, p0.clone(), p1_bad),
            Err(Error::InvalidFamily(_))
        ));

        // Coefficient with p in the denominator.
        let p0_bad = SparsePoly::new(
            3,
            vec![
                mono(3, &[(0, 4)], rat(1, 5)),
                mono(3, &[(1, 4)], rint(1)),
                mono(3, &[(2, 4)], rint(1)),
            ],
        );
        assert!(matches!(
            Family::new(1, 4, 5, p0_bad, p1),
            Err(Error::BadReduction(_))
        ));
    }
}

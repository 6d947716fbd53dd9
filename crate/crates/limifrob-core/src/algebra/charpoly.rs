//! Characteristic polynomials over ℚ and extraction of fully rational
//! spectra (with multiplicity) via the rational root theorem.

use super::matrix::Matrix;
use super::poly::UniPoly;
use super::ratfunc::primitive_int;
use super::Rat;
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Monic characteristic polynomial `det(x·I − M)` by the Faddeev–LeVerrier
/// recurrence (exact over ℚ).
pub fn char_poly(m: &Matrix<Rat>) -> Result<UniPoly<Rat>> {
    if !m.is_square() {
        return Err(Error::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut coeffs = vec![Rat::zero(); n + 1];
    coeffs[n] = Rat::one();
    let mut b = Matrix::<Rat>::identity(n);
    for k in 1..=n {
        let ab = m.mul(&b);
        let c = -ab.trace() / Rat::from_integer(BigInt::from(k));
        coeffs[n - k] = c.clone();
        b = ab;
        for i in 0..n {
            b[(i, i)] += &c;
        }
    }
    Ok(UniPoly::new(coeffs))
}

/// All eigenvalues of `m` as a multiset, provided the characteristic
/// polynomial splits over ℚ; otherwise [`Error::NotRationalSpectrum`] naming
/// the unfactored part.  Eigenvalues are returned sorted.
pub fn rational_eigenvalues(m: &Matrix<Rat>) -> Result<Vec<Rat>> {
    let chi = char_poly(m)?;
    let mut eigen = rational_roots_with_multiplicity(&chi)?;
    eigen.sort();
    Ok(eigen)
}

/// Rational roots of a rational polynomial, with multiplicity, requiring the
/// polynomial to split completely.
pub fn rational_roots_with_multiplicity(chi: &UniPoly<Rat>) -> Result<Vec<Rat>> {
    let deg = chi.degree().unwrap_or(0);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let (_, mut f) = primitive_int(chi);
    let mut eigen: Vec<Rat> = Vec::new();
    // Strip zero roots first.
    let v = f.valuation().expect("nonzero polynomial");
    for _ in 0..v {
        eigen.push(Rat::zero());
    }
    f = f.shift_down(v);
    if f.degree() == Some(0) {
        return Ok(eigen);
    }
    // Candidate roots r/s from divisors of the constant and leading terms.
    let c0 = f.coeff(0).magnitude().clone();
    let lead = f.leading().expect("nonzero").magnitude().clone();
    let (num_divs, den_divs) = match (divisors(&c0), divisors(&lead)) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::NotRationalSpectrum {
                remainder: format!("{f:?} (root candidate enumeration too large)"),
            })
        }
    };
    let mut candidates: Vec<Rat> = Vec::new();
    for r in &num_divs {
        for s in &den_divs {
            if r.gcd(s).is_one() {
                let q = Rat::new(BigInt::from(r.clone()), BigInt::from(s.clone()));
                candidates.push(-q.clone());
                candidates.push(q);
            }
        }
    }
    candidates.sort();
    candidates.dedup();
    let fq = f.map(|c| Rat::from_integer(c.clone()));
    let mut rem = fq.clone();
    for cand in candidates {
        if rem.degree() == Some(0) {
            break;
        }
        if !fq.eval(&cand).is_zero() {
            continue;
        }
        // Divide out (x − cand) to full multiplicity.
        let factor = UniPoly::new(vec![-cand.clone(), Rat::one()]);
        loop {
            let (q, r) = rem.divrem(&factor);
            if !r.is_zero() {
                break;
            }
            rem = q;
            eigen.push(cand.clone());
            if rem.degree().is_none() {
                break;
            }
        }
    }
    if rem.degree().unwrap_or(0) > 0 {
        return Err(Error::NotRationalSpectrum {
            remainder: format!("{rem:?}"),
        });
    }
    Ok(eigen)
}

const DIVISOR_CAP: usize = 100_000;

/// All positive divisors of `n` (None when the list would exceed the cap).
/// `n = 0` yields `[1]` so that the rational-root candidates stay finite (a
/// zero constant term is stripped before calling this).
fn divisors(n: &BigUint) -> Option<Vec<BigUint>> {
    if n.is_zero() {
        return Some(vec![BigUint::one()]);
    }
    let factors = factorize(n.clone());
    let mut divs = vec![BigUint::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e + 1));
        let mut pk = BigUint::one();
        for _ in 0..=e {
            for d in &divs {
                next.push(d * &pk);
            }
            pk *= &p;
        }
        divs = next;
        if divs.len() > DIVISOR_CAP {
            return None;
        }
    }
    divs.sort();
    Some(divs)
}

/// Prime factorization by trial division plus Pollard–Brent rho.
fn factorize(mut n: BigUint) -> Vec<(BigUint, usize)> {
    let mut out: Vec<(BigUint, usize)> = Vec::new();
    let push = |p: BigUint, out: &mut Vec<(BigUint, usize)>| {
        if let Some(last) = out.iter_mut().find(|(q, _)| *q == p) {
            last.1 += 1;
        } else {
            out.push((p, 1));
        }
    };
    for small in 2u64..=(1 << 16) {
        let sp = BigUint::from(small);
        if &sp * &sp > n {
            break;
        }
        while (&n % &sp).is_zero() {
            n /= &sp;
            push(sp.clone(), &mut out);
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            push(m, &mut out);
            continue;
        }
        let d = pollard_brent(&m);
        stack.push(&m / &d);
        stack.push(d);
    }
    out.sort();
    out
}

pub(crate) fn is_probable_prime(n: &BigUint) -> bool {
    if n < &BigUint::from(2u32) {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let bp = BigUint::from(p);
        if n == &bp {
            return true;
        }
        if (n % &bp).is_zero() {
            return false;
        }
    }
    // Miller–Rabin with a fixed base set (deterministic far beyond the
    // coefficient sizes arising from residue matrices).
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().expect("n−1 > 0");
    let d = &nm1 >> s;
    'bases: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == nm1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigUint) -> BigUint {
    let two = BigUint::from(2u32);
    if (n % &two).is_zero() {
        return two;
    }
    let mut c = BigUint::one();
    loop {
        let mut x = BigUint::from(2u32);
        let mut y = BigUint::from(2u32);
        let mut d = BigUint::one();
        let f = |v: &BigUint| (v * v + &c) % n;
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
        }
        if !d.is_one() && &d != n {
            return d;
        }
        c += 1u32; // retry with a different polynomial offset
        assert!(
            c.to_u64() < Some(64),
            "Pollard rho failed to find a factor of {n}"
        );
    }
}

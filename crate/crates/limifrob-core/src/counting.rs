//! Brute-force point counting over small finite fields and zeta-function
//! bookkeeping: the independent oracle against which the p-adic pipeline
//! is verified.
//!
//! Finite fields 𝔽_{p^k} are realized as 𝔽_p[x]/(f) for the lexicographically
//! first monic irreducible f, with multiplication through discrete-log
//! tables.  Point counts feed Newton-identity machinery that either builds a
//! curve's zeta numerator from counts or checks an assembled zeta function
//! against counts.

use crate::algebra::{Rat, UniPoly};
use crate::error::Error;
use crate::family::SparsePoly;
use crate::Result;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

/// Hard ceiling on the number of points a single enumeration may visit.
///
/// Brute-force verification is quadratic-to-cubic in the field size; 10⁹
/// point visits is roughly a minute of work on one core with table-driven
/// field arithmetic, which is the largest delay a verification pass should
/// ever impose.  Larger requests are refused, not attempted.
pub const POINT_ENUM_BUDGET: u128 = 1_000_000_000;

// ---------------------------------------------------------------------------
// Small finite fields.
// ---------------------------------------------------------------------------

/// The field 𝔽_{p^k}, elements indexed `0..q` where index `Σ d_i p^i`
/// stands for the residue `Σ d_i x^i` modulo the defining polynomial.
#[derive(Clone, Debug)]
pub struct Fq {
    pub p: u64,
    pub k: u32,
    pub q: u64,
    /// Coefficients c_0 .. c_{k−1} of the monic defining polynomial
    /// x^k + c_{k−1}x^{k−1} + … + c_0.
    modpoly: Vec<u64>,
    /// exp[i] = element index of g^i for 0 ≤ i < 2(q−1), doubled so that a
    /// sum of two logarithms never needs reduction.
    exp: Vec<u32>,
    /// log[e] for a non-zero element index e (log[0] is unused).
    log: Vec<u32>,
}

impl Fq {
    /// Build 𝔽_{p^k}.  `p` must be prime (trusted input) and `q = p^k`
    /// small enough for the log tables; enumeration budgets keep q ≤ ~10⁶.
    pub fn new(p: u64, k: u32) -> Self {
        assert!(k >= 1, "extension degree must be at least 1");
        let q = p.checked_pow(k).expect("field size fits in u64");
        assert!(q <= 1 << 24, "field too large for table-driven arithmetic");
        let modpoly = first_irreducible(p, k);
        let mut field = Fq {
            p,
            k,
            q,
            modpoly,
            exp: Vec::new(),
            log: Vec::new(),
        };
        field.build_tables();
        field
    }

    fn digits(&self, mut e: u64) -> Vec<u64> {
        let mut d = vec![0u64; self.k as usize];
        for slot in d.iter_mut() {
            *slot = e % self.p;
            e /= self.p;
        }
        d
    }

    fn index_of_digits(&self, d: &[u64]) -> u64 {
        let mut e = 0u64;
        for &c in d.iter().rev() {
            e = e * self.p + c;
        }
        e
    }

    /// Table-free product used only while bootstrapping the tables.
    fn raw_mul(&self, a: u64, b: u64) -> u64 {
        let da = self.digits(a);
        let db = self.digits(b);
        let k = self.k as usize;
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        // Reduce by x^k ≡ −(c_{k−1}x^{k−1} + … + c_0).
        for i in (k..2 * k - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for (j, &m) in self.modpoly.iter().enumerate() {
                let idx = i - k + j;
                prod[idx] = (prod[idx] + c * (self.p - m) % self.p) % self.p;
            }
        }
        self.index_of_digits(&prod[..k])
    }

    fn build_tables(&mut self) {
        let q = self.q;
        let order = q - 1;
        let factors = factor_u64(order);
        // Find a multiplicative generator.
        let mut gen = 0u64;
        for cand in 1..q {
            if self.raw_pow(cand, order) != 1 {
                continue; // not invertible (cannot happen) or arithmetic bug
            }
            let primitive = factors
                .iter()
                .all(|&(f, _)| self.raw_pow(cand, order / f) != 1);
            if primitive {
                gen = cand;
                break;
            }
        }
        assert!(gen != 0, "multiplicative group of a finite field is cyclic");
        self.exp = vec![0u32; 2 * order as usize];
        self.log = vec![0u32; q as usize];
        let mut cur = 1u64;
        for i in 0..order as usize {
            self.exp[i] = cur as u32;
            self.exp[i + order as usize] = cur as u32;
            self.log[cur as usize] = i as u32;
            cur = self.raw_mul(cur, gen);
        }
        debug_assert_eq!(cur, 1, "generator order must be q−1");
    }

    fn raw_pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.raw_mul(acc, base);
            }
            base = self.raw_mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn defining_poly(&self) -> &[u64] {
        &self.modpoly
    }

    /// Embed an integer residue (the prime subfield).
    pub fn from_int(&self, c: &BigInt) -> u32 {
        let p = BigInt::from(self.p);
        let r = ((c % &p) + &p) % &p;
        r.to_u32().expect("residue fits") // digit-0 encoding of 𝔽_p
    }

    /// Embed a rational with p-unit denominator.
    pub fn from_rat(&self, c: &Rat) -> Result<u32> {
        let num = self.from_int(c.numer()) as u64;
        let den = self.from_int(c.denom()) as u64;
        if den == 0 {
            return Err(Error::BadReduction(c.to_string()));
        }
        Ok(self.mul(num as u32, self.inv(den as u32)))
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let (mut a, mut b) = (a as u64, b as u64);
        let mut out = 0u64;
        let mut base = 1u64;
        for _ in 0..self.k {
            let mut s = a % self.p + b % self.p;
            if s >= self.p {
                s -= self.p;
            }
            out += s * base;
            base *= self.p;
            a /= self.p;
            b /= self.p;
        }
        out as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        let mut a = a as u64;
        let mut out = 0u64;
        let mut base = 1u64;
        for _ in 0..self.k {
            let d = a % self.p;
            out += if d == 0 { 0 } else { self.p - d } * base;
            base *= self.p;
            a /= self.p;
        }
        out as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let l = self.log[a as usize] as u64;
        let order = self.q - 1;
        self.exp[((order - l) % order) as usize]
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let order = (self.q - 1) as u128;
        let l = self.log[a as usize] as u128;
        self.exp[((l * (e as u128 % order)) % order) as usize]
    }

    /// Quadratic character: 0 at zero, +1 on squares, −1 otherwise
    /// (q odd: squares are exactly the even powers of a generator).
    #[inline]
    pub fn chi(&self, a: u32) -> i32 {
        if a == 0 {
            0
        } else if self.log[a as usize].is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// The lexicographically first monic irreducible polynomial of degree k
/// over 𝔽_p: candidates x^k + c_{k−1}x^{k−1} + … + c_0 are ordered by the
/// base-p integer Σ c_i p^i.
fn first_irreducible(p: u64, k: u32) -> Vec<u64> {
    if k == 1 {
        return vec![0]; // x itself: 𝔽_p needs no extension
    }
    assert!(k <= 4, "extensions beyond degree 4 are not needed by counting");
    let kk = k as usize;
    let mut cand = 0u64;
    let total = p.pow(k);
    while cand < total {
        let mut c = vec![0u64; kk];
        let mut e = cand;
        for slot in c.iter_mut() {
            *slot = e % p;
            e /= p;
        }
        if is_irreducible(p, &c) {
            return c;
        }
        cand += 1;
    }
    unreachable!("irreducible polynomials of every degree exist over 𝔽_p");
}

/// Irreducibility of x^k + c_{k−1}x^{k−1} + … + c_0 for k ≤ 4: no roots
/// rules out linear factors (enough for k ≤ 3); for k = 4 also no
/// irreducible quadratic factor.
fn is_irreducible(p: u64, c: &[u64]) -> bool {
    let k = c.len();
    let eval = |x: u64| -> u64 {
        let mut v = 1u64; // monic leading term
        for i in (0..k).rev() {
            v = (v * x + c[i]) % p;
        }
        v
    };
    if (0..p).any(|x| eval(x) == 0) {
        return false;
    }
    if k < 4 {
        return true;
    }
    // Trial division by monic irreducible quadratics x² + ax + b.
    for a in 0..p {
        for b in 0..p {
            let quad_has_root = (0..p).any(|x| (x * x + a * x + b) % p == 0);
            if quad_has_root {
                continue;
            }
            if divides_quartic(p, c, a, b) {
                return false;
            }
        }
    }
    true
}

/// Does x² + ax + b divide the monic quartic x⁴ + c₃x³ + c₂x² + c₁x + c₀?
fn divides_quartic(p: u64, c: &[u64], a: u64, b: u64) -> bool {
    // Reduce x⁴ + … modulo x² ≡ −ax − b by synthetic division.
    // Quotient-free reduction: maintain x^j mod (x²+ax+b) as (u_j, v_j) with
    // x^j ≡ u_j + v_j·x; accumulate Σ coeff_j x^j.
    let (mut u, mut v) = (1u64, 0u64); // x^0
    let coeffs = [c[0], c[1], c[2], c[3], 1];
    let mut rem = [0u64, 0u64];
    for (j, &cf) in coeffs.iter().enumerate() {
        if j > 0 {
            // multiply (u + v x) by x: v x² + u x ≡ −v(ax+b) + u x
            let nu = (v * (p - b % p)) % p;
            let nv = (u + v * (p - a % p)) % p;
            u = nu;
            v = nv;
        }
        rem[0] = (rem[0] + cf % p * u) % p;
        rem[1] = (rem[1] + cf % p * v) % p;
    }
    rem == [0, 0]
}

/// Trial-division factorization of a u64 (fields here are tiny).
fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

// ---------------------------------------------------------------------------
// Projective hypersurface point counts.
// ---------------------------------------------------------------------------

/// Number of points of ℙ^{n}(𝔽_q) = (q^{n+1} − 1)/(q − 1).
pub fn projective_space_size(q: u64, n: usize) -> u128 {
    let mut total = 0u128;
    let mut pw = 1u128;
    for _ in 0..=n {
        total += pw;
        pw *= q as u128;
    }
    total
}

/// Count projective points of the hypersurface `poly = 0` over the given
/// field.  Points are enumerated in the standard charts (first non-zero
/// coordinate normalized to 1); the total visited is checked against
/// `budget` first and refused with [`Error::BudgetExceeded`] if too large.
pub fn count_points(poly: &SparsePoly, fq: &Fq, budget: u128) -> Result<u64> {
    let nvars = poly.nvars;
    assert!(nvars >= 2, "a projective hypersurface needs at least 2 variables");
    let required = projective_space_size(fq.q, nvars - 1);
    if required > budget {
        return Err(Error::BudgetExceeded {
            required,
            budget,
        });
    }
    // Dense representation: flattened array over per-variable degree bounds.
    let mut bounds = vec![0u32; nvars];
    for (exps, _) in &poly.terms {
        for (b, &e) in bounds.iter_mut().zip(exps) {
            *b = (*b).max(e);
        }
    }
    let dims: Vec<usize> = bounds.iter().map(|&b| b as usize + 1).collect();
    let size: usize = dims.iter().product();
    let mut dense = vec![0u32; size];
    for (exps, c) in &poly.terms {
        let mut idx = 0usize;
        for (v, &e) in exps.iter().enumerate() {
            idx = idx * dims[v] + e as usize;
        }
        let emb = fq.from_rat(c)?;
        dense[idx] = fq.add(dense[idx], emb);
    }
    let mut total = 0u64;
    for lead in 0..nvars {
        // Chart: x_0 = … = x_{lead−1} = 0, x_lead = 1, the rest free.
        let mut cur = dense.clone();
        let mut cur_dims = dims.clone();
        for v in 0..lead {
            cur = substitute_first(fq, &cur, &cur_dims, 0);
            cur_dims.remove(0);
            let _ = v;
        }
        cur = substitute_first(fq, &cur, &cur_dims, 1);
        cur_dims.remove(0);
        total += count_zeros(fq, &cur, &cur_dims);
    }
    Ok(total)
}

/// Substitute `value` for the first variable of a dense array: Horner over
/// the leading axis.
fn substitute_first(fq: &Fq, arr: &[u32], dims: &[usize], value: u32) -> Vec<u32> {
    let d0 = dims[0];
    let inner: usize = dims[1..].iter().product::<usize>().max(1);
    let mut out = vec![0u32; inner];
    for block in (0..d0).rev() {
        let slice = &arr[block * inner..(block + 1) * inner];
        for (o, &s) in out.iter_mut().zip(slice) {
            *o = fq.add(fq.mul(*o, value), s);
        }
    }
    out
}

/// Count zeros of a dense polynomial over all affine tuples of the
/// remaining variables; the last axis is evaluated by Horner.
fn count_zeros(fq: &Fq, arr: &[u32], dims: &[usize]) -> u64 {
    if dims.is_empty() {
        return if arr[0] == 0 { 1 } else { 0 };
    }
    if dims.len() == 1 {
        let mut count = 0u64;
        for x in 0..fq.q as u32 {
            let mut v = 0u32;
            for &c in arr.iter().rev() {
                v = fq.add(fq.mul(v, x), c);
            }
            if v == 0 {
                count += 1;
            }
        }
        return count;
    }
    let mut count = 0u64;
    for x in 0..fq.q as u32 {
        let sub = substitute_first(fq, arr, dims, x);
        count += count_zeros(fq, &sub, &dims[1..]);
    }
    count
}

/// Point count of the smooth projective model of the hyperelliptic curve
/// y² = f(x) over the given (odd) field: Σ_x (1 + χ(f(x))) affine points
/// plus 1 point at infinity for odd deg f, plus 2 or 0 for even deg f
/// according to whether the leading coefficient is a square.
pub fn hyperelliptic_count(fq: &Fq, f: &[Rat]) -> Result<u64> {
    assert!(!f.is_empty(), "f must be non-zero");
    let coeffs: Vec<u32> = f.iter().map(|c| fq.from_rat(c)).collect::<Result<_>>()?;
    let deg = coeffs.len() - 1;
    assert!(*coeffs.last().expect("non-empty") != 0, "leading coefficient vanished mod p");
    let mut total: i64 = 0;
    for x in 0..fq.q as u32 {
        let mut v = 0u32;
        for &c in coeffs.iter().rev() {
            v = fq.add(fq.mul(v, x), c);
        }
        total += 1 + fq.chi(v) as i64;
    }
    total += if deg % 2 == 1 {
        1
    } else if fq.chi(*coeffs.last().expect("non-empty")) == 1 {
        2
    } else {
        0
    };
    Ok(total as u64)
}

// ---------------------------------------------------------------------------
// Zeta bookkeeping via Newton identities.
// ---------------------------------------------------------------------------

/// Power sums s_k = Σ β_j^k of the inverse roots of f = 1 + a₁T + a₂T² + …
/// (the β_j are the roots of the reversed polynomial), for k = 1..=kmax:
/// s_k = −k·a_k − Σ_{j=1}^{k−1} a_j · s_{k−j}.
pub fn inverse_root_power_sums(f: &UniPoly<BigInt>, kmax: usize) -> Vec<BigInt> {
    assert!(
        f.coeff(0).is_one(),
        "zeta factors are normalized with constant term 1"
    );
    let mut s: Vec<BigInt> = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let mut sk = BigInt::from(-(k as i64)) * f.coeff(k);
        for j in 1..k {
            sk -= f.coeff(j) * &s[k - j - 1];
        }
        s.push(sk);
    }
    s
}

/// One line of a zeta consistency report: the count predicted by the
/// assembled zeta function at extension degree k against the brute count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaCheckLine {
    pub k: usize,
    pub predicted: BigInt,
    pub counted: u64,
    pub ok: bool,
}

/// Check point counts against Z(T) = ∏ f_i(T)^{ε_i}: the predicted count is
/// N_k = −Σ_i ε_i · s_k(f_i).
pub fn zeta_consistency(
    factors: &[(UniPoly<BigInt>, i64)],
    counts: &[u64],
) -> Vec<ZetaCheckLine> {
    let kmax = counts.len();
    let sums: Vec<Vec<BigInt>> = factors
        .iter()
        .map(|(f, _)| inverse_root_power_sums(f, kmax))
        .collect();
    counts
        .iter()
        .enumerate()
        .map(|(idx, &counted)| {
            let k = idx + 1;
            let mut predicted = BigInt::zero();
            for ((_, eps), s) in factors.iter().zip(&sums) {
                predicted -= BigInt::from(*eps) * &s[idx];
            }
            ZetaCheckLine {
                k,
                predicted: predicted.clone(),
                counted,
                ok: predicted == BigInt::from(counted),
            }
        })
        .collect()
}

/// The zeta factors of a smooth hypersurface of dimension n with primitive
/// middle-cohomology characteristic polynomial Q:
/// Z(T) = Q(T)^{(−1)^{n+1}} / ∏_{i=0}^{n} (1 − p^i T).
pub fn hypersurface_zeta_factors(
    q_poly: &UniPoly<BigInt>,
    p: u64,
    n: usize,
) -> Vec<(UniPoly<BigInt>, i64)> {
    let mut factors = Vec::with_capacity(n + 2);
    let eps = if n.is_multiple_of(2) { -1 } else { 1 };
    factors.push((q_poly.clone(), eps));
    let mut pw = BigInt::one();
    for _ in 0..=n {
        factors.push((
            UniPoly::new(vec![BigInt::one(), -&pw]),
            -1,
        ));
        pw *= BigInt::from(p);
    }
    factors
}

/// Build the zeta numerator ∏_{i=1}^{2g} (1 − α_i T) of a smooth projective
/// curve of genus g over 𝔽_p from the counts N_1, …, N_k (k ≥ g):
/// Newton's identities determine the first g coefficients from
/// a_k = p^k + 1 − N_k, the functional equation c_{2g−i} = p^{g−i} c_i fills
/// the rest, and any extra counts must match the completed polynomial
/// ([`Error::SymmetryViolation`] names the first k that does not, with
/// k = 1 also flagging a count outside the Weil bound).
pub fn zeta_numerator_curve(p: u64, genus: usize, counts: &[u64]) -> Result<UniPoly<BigInt>> {
    if genus == 0 {
        return Ok(UniPoly::one());
    }
    if counts.len() < genus {
        return Err(Error::InsufficientCounts {
            needed: genus,
            got: counts.len(),
        });
    }
    // Frobenius power sums a_k = p^k + 1 − N_k.
    let a: Vec<BigInt> = counts
        .iter()
        .enumerate()
        .map(|(i, &nk)| BigInt::from(p).pow(i as u32 + 1) + 1 - BigInt::from(nk))
        .collect();
    // Weil sanity at k = 1: |a_1| ≤ 2g·√p, i.e. a_1² ≤ 4g²p.
    if a[0].clone() * &a[0] > BigInt::from(4 * (genus * genus) as u64 * p) {
        return Err(Error::SymmetryViolation { k: 1 });
    }
    // Newton: e_m = (1/m) Σ_{i=1}^{m} (−1)^{i−1} e_{m−i} a_i, c_m = (−1)^m e_m.
    let mut e: Vec<Rat> = vec![Rat::one()];
    for m in 1..=genus {
        let mut acc = Rat::zero();
        let mut sign = BigInt::one();
        for i in 1..=m {
            acc += Rat::from_integer(sign.clone() * &a[i - 1]) * e[m - i].clone();
            sign = -sign;
        }
        e.push(acc / Rat::from_integer(BigInt::from(m as i64)));
    }
    let mut c: Vec<BigInt> = vec![BigInt::one()];
    for (m, em) in e.iter().enumerate().skip(1) {
        let signed = if m % 2 == 1 { -em.clone() } else { em.clone() };
        assert!(
            signed.is_integer(),
            "Newton coefficients of a zeta numerator are integers"
        );
        c.push(signed.to_integer());
    }
    // Functional equation: c_{2g−i} = p^{g−i} · c_i.
    c.resize(2 * genus + 1, BigInt::zero());
    for i in (0..genus).rev() {
        c[2 * genus - i] = BigInt::from(p).pow((genus - i) as u32) * &c[i];
    }
    let q_poly = UniPoly::new(c);
    // Every provided count must be reproduced by the completed numerator.
    let zeta = hypersurface_zeta_factors(&q_poly, p, 1);
    for line in zeta_consistency(&zeta, counts) {
        if !line.ok {
            return Err(Error::SymmetryViolation { k: line.k });
        }
    }
    Ok(q_poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rint};

    fn sp(nvars: usize, terms: Vec<(Vec<u32>, i64)>) -> SparsePoly {
        SparsePoly {
            nvars,
            terms: terms
                .into_iter()
                .map(|(e, c)| (e, rint(c)))
                .collect(),
        }
    }

    #[test]
    fn frozen_defining_polynomials() {
        // First monic irreducibles in base-p order: x² + 2 over 𝔽₅,
        // x³ + x + 1 over 𝔽₅, x² + 1 over 𝔽₇ (−1 is not a square mod 7).
        assert_eq!(Fq::new(5, 2).defining_poly(), &[2, 0]);
        assert_eq!(Fq::new(5, 3).defining_poly(), &[1, 1, 0]);
        assert_eq!(Fq::new(7, 2).defining_poly(), &[1, 0]);
    }

    #[test]
    fn field_axioms_exhaustive_f9() {
        let f = Fq::new(3, 2);
        for a in 0..9u32 {
            for b in 0..9u32 {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in 0..9u32 {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(
                        f.mul(a, f.add(b, c)),
                        f.add(f.mul(a, b), f.mul(a, c)),
                        "distributivity at ({}, {}, {})",
                        a,
                        b,
                        c
                    );
                }
            }
        }
        for a in 1..9u32 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
            // Frobenius is additive: (a+b)³ = a³ + b³.
            for b in 0..9u32 {
                assert_eq!(f.pow(f.add(a, b), 3), f.add(f.pow(a, 3), f.pow(b, 3)));
            }
        }
    }

    #[test]
    fn quadratic_character_properties() {
        for (p, k) in [(5, 2), (7, 1), (13, 1)] {
            let f = Fq::new(p, k);
            // χ(a²) = 1, Σ_a χ(a) = 0.
            let mut total = 0i64;
            for a in 0..f.q as u32 {
                total += f.chi(a) as i64;
                if a != 0 {
                    assert_eq!(f.chi(f.mul(a, a)), 1);
                }
            }
            assert_eq!(total, 0);
        }
    }

    #[test]
    fn hyperplane_counts_are_projective_subspaces() {
        // x₀ = 0 in ℙ² is a ℙ¹: q + 1 points.
        let h = sp(3, vec![(vec![1, 0, 0], 1)]);
        let f5 = Fq::new(5, 1);
        assert_eq!(count_points(&h, &f5, POINT_ENUM_BUDGET).unwrap(), 6);
        let f25 = Fq::new(5, 2);
        assert_eq!(count_points(&h, &f25, POINT_ENUM_BUDGET).unwrap(), 26);
    }

    #[test]
    fn smooth_conic_is_a_projective_line() {
        let conic = sp(3, vec![(vec![2, 0, 0], 1), (vec![0, 2, 0], 1), (vec![0, 0, 2], 1)]);
        for p in [5u64, 7, 13] {
            let f = Fq::new(p, 1);
            assert_eq!(
                count_points(&conic, &f, POINT_ENUM_BUDGET).unwrap(),
                p + 1,
                "conic over F_{}",
                p
            );
        }
    }

    #[test]
    fn fermat_quartic_over_f5_has_no_points() {
        // Fourth powers mod 5 lie in {0, 1}, so x⁴+y⁴+z⁴ never vanishes on ℙ².
        let fermat = sp(3, vec![(vec![4, 0, 0], 1), (vec![0, 4, 0], 1), (vec![0, 0, 4], 1)]);
        let f5 = Fq::new(5, 1);
        assert_eq!(count_points(&fermat, &f5, POINT_ENUM_BUDGET).unwrap(), 0);
    }

    #[test]
    fn elliptic_curve_frozen_count_and_dual_route() {
        // y²z = x³ − xz² over 𝔽₅ has 8 points (7 affine + infinity).
        let cubic = sp(
            3,
            vec![
                (vec![0, 2, 1], 1),
                (vec![3, 0, 0], -1),
                (vec![1, 0, 2], 1),
            ],
        );
        let f5 = Fq::new(5, 1);
        assert_eq!(count_points(&cubic, &f5, POINT_ENUM_BUDGET).unwrap(), 8);
        // Independent route: the hyperelliptic counter on y² = x³ − x
        // must agree over 𝔽₅ and 𝔽₂₅ (odd degree: one point at infinity).
        let f = vec![rint(0), rint(-1), rint(0), rint(1)];
        assert_eq!(hyperelliptic_count(&f5, &f).unwrap(), 8);
        let f25 = Fq::new(5, 2);
        let via_curve = count_points(&cubic, &f25, POINT_ENUM_BUDGET).unwrap();
        let via_hyper = hyperelliptic_count(&f25, &f).unwrap();
        assert_eq!(via_curve, via_hyper);
        assert_eq!(via_curve, 32); // 26 − a₂ with a₂ = a₁² − 2p = −6
    }

    #[test]
    fn elliptic_zeta_numerator_from_counts() {
        // Counts (8, 32) over 𝔽₅, 𝔽₂₅ give Q(T) = 1 + 2T + 5T², and the
        // second count exercises the symmetry verification path.
        let q = zeta_numerator_curve(5, 1, &[8, 32]).unwrap();
        assert_eq!(
            q,
            UniPoly::new(vec![BigInt::from(1), BigInt::from(2), BigInt::from(5)])
        );
        // Genus 0 has trivial numerator.
        assert_eq!(zeta_numerator_curve(5, 0, &[6]).unwrap(), UniPoly::one());
    }

    #[test]
    fn genus_two_roundtrip_with_counter() {
        // y² = x⁵ − x over 𝔽₅: count through four extensions, build the
        // numerator from the first two, and insist the last two are
        // reproduced (k > g goes through the symmetry check).
        let f: Vec<Rat> = vec![rint(0), rint(-1), rint(0), rint(0), rint(0), rint(1)];
        let counts: Vec<u64> = (1..=4)
            .map(|k| hyperelliptic_count(&Fq::new(5, k), &f).unwrap())
            .collect();
        assert_eq!(counts[0], 6); // x⁵ ≡ x on 𝔽₅, so χ(f) = 0 everywhere
        let q = zeta_numerator_curve(5, 2, &counts).unwrap();
        assert_eq!(q.degree(), Some(4));
        assert_eq!(q.coeff(0), BigInt::one());
        // Functional equation: c₄ = p², c₃ = p·c₁.
        assert_eq!(q.coeff(4), BigInt::from(25));
        assert_eq!(q.coeff(3).clone(), BigInt::from(5) * q.coeff(1));
    }

    #[test]
    fn zeta_consistency_projective_plane() {
        // Z_{ℙ²}(T) = 1/((1−T)(1−5T)(1−25T)): N_k = 1 + 5^k + 25^k.
        let factors: Vec<(UniPoly<BigInt>, i64)> = [1i64, 5, 25]
            .iter()
            .map(|&c| (UniPoly::new(vec![BigInt::one(), BigInt::from(-c)]), -1))
            .collect();
        let counts: Vec<u64> = (1..=3)
            .map(|k| projective_space_size(5u64.pow(k), 2) as u64)
            .collect();
        let report = zeta_consistency(&factors, &counts);
        assert!(report.iter().all(|l| l.ok));
        // A corrupted count is pinpointed.
        let bad = zeta_consistency(&factors, &[31, 652, 15751]);
        assert!(bad[0].ok && !bad[1].ok && bad[2].ok);
        assert_eq!(bad[1].predicted, BigInt::from(651));
    }

    #[test]
    fn curve_zeta_factors_reproduce_counts() {
        // Assembled hypersurface zeta of the elliptic curve above:
        // Z = Q(T)/((1−T)(1−5T)) must reproduce the brute counts.
        let q_poly = UniPoly::new(vec![BigInt::from(1), BigInt::from(2), BigInt::from(5)]);
        let factors = hypersurface_zeta_factors(&q_poly, 5, 1);
        let report = zeta_consistency(&factors, &[8, 32]);
        assert!(report.iter().all(|l| l.ok), "{:?}", report);
    }

    #[test]
    fn count_errors() {
        let h = sp(3, vec![(vec![1, 0, 0], 1)]);
        let f5 = Fq::new(5, 1);
        let err = count_points(&h, &f5, 10).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { required: 31, budget: 10 }));
        // p in a denominator cannot be reduced.
        let bad = SparsePoly {
            nvars: 3,
            terms: vec![(vec![1, 0, 0], rat(1, 5))],
        };
        assert!(matches!(
            count_points(&bad, &f5, POINT_ENUM_BUDGET).unwrap_err(),
            Error::BadReduction(_)
        ));
        // Too few counts for the genus.
        assert!(matches!(
            zeta_numerator_curve(5, 2, &[6]).unwrap_err(),
            Error::InsufficientCounts { needed: 2, got: 1 }
        ));
        // A count outside the Weil bound is rejected immediately.
        assert!(matches!(
            zeta_numerator_curve(5, 1, &[100]).unwrap_err(),
            Error::SymmetryViolation { k: 1 }
        ));
        // Counts that cannot come from one genus-1 numerator: N₂ corrupted.
        assert!(matches!(
            zeta_numerator_curve(5, 1, &[8, 33]).unwrap_err(),
            Error::SymmetryViolation { k: 2 }
        ));
    }
}

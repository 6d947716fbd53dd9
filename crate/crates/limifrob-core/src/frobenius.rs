//! The Frobenius structure of the pencil: exact diagonal-fiber matrix at
//! t = 1, p-adic continuation across the t-line, and the limit at s = 0.
//!
//! The crystalline Frobenius Φ of the family is σ-semilinear over t ↦ t^p
//! and horizontal for the connection.  On the monomial basis, with columns
//! as images (Φ b_j = Σᵢ F_{ij} bᵢ) and ∇ = d + N as in [`crate::connection`],
//! horizontality reads
//!
//! `dF/dt + N(t)·F(t) = p·t^{p−1}·F(t)·N(t^p)`.
//!
//! The pipeline solves this equation outward from t = 1:
//!
//! 1. [`diagonal_frobenius`] — at t = 1 the fiber is the diagonal
//!    hypersurface Σ cᵢ·xᵢ^d with cᵢ = ±1; when d | p−1 Frobenius preserves
//!    each monomial line and its eigenvalues are Jacobi-sum products,
//!    computed exactly in ℤ_p by direct summation over Teichmüller
//!    representatives (no ramified extension is ever needed).
//! 2. [`global_frobenius`] — writes F = C·F₁·C_σ⁻¹ where C is the flat
//!    frame at t = 1 (C′ = −N·C, C(1) = I) and C_σ(t) = C(t^p), solves for
//!    the series of F on the residue disk of 1, and reconstructs F as
//!    p^{−c}·P(t)/D(t) with integer polynomial matrix P and a common
//!    denominator D discovered from the series (it mixes factors of Δ(t)
//!    and Δ(t^p)).  The reconstruction is accepted only after an exact
//!    integer verification of the horizontality equation above.
//! 3. [`specialize_limit`] — conjugates by the normalizing gauge,
//!    F′(s) = H(s)·F(s^e)·H(s^p)⁻¹, checks that the negative Laurent
//!    coefficients vanish p-adically, and reads off Fr₀ = F′(0), the
//!    Frobenius of the limiting structure, which satisfies
//!    N₀·Fr₀ = p·Fr₀·N₀.
//!
//! [`precision_plan`] sizes the working modulus and series lengths so that
//! a requested output precision survives every division of the chain, and
//! carries the escalation schedule used when a first attempt falls short.

use crate::algebra::{solve::det_rat, LaurentPoly, Matrix, Rat, RatFunc, UniPoly};
use crate::connection::NormalizedConnection;
use crate::dwork::GaussManin;
use crate::error::Error;
use crate::family::{dwork_basis, Family};
use crate::padic::{
    frobenius_pullback_compose, ord_p_factorial, p_power, series_backsub, series_mul_const_right,
    series_ode_solve, teichmuller_lift, zp_mul_trunc, PadicScalar, SeriesMat, ZModCtx,
};
use crate::Result;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

// ---------------------------------------------------------------------------
// The diagonal fiber at t = 1.
// ---------------------------------------------------------------------------

/// The Jacobi sum J(ω^{−m₁}, ω^{−m₂}) = Σ_{x ≠ 0,1} ω^{−m₁}(x)·ω^{−m₂}(1−x),
/// summed exactly over Teichmüller representatives mod p^{nw}.  Both
/// characters must be nontrivial (0 < mᵢ < p−1); ω^{−m}(x) = τ(x)^{p−1−m}.
fn jacobi_sum(ctx: &ZModCtx, tau: &[BigUint], m1: u64, m2: u64) -> BigUint {
    let p = ctx.p;
    let pm1 = p - 1;
    debug_assert!(m1 > 0 && m1 < pm1 && m2 > 0 && m2 < pm1);
    let e1 = BigUint::from(pm1 - m1);
    let e2 = BigUint::from(pm1 - m2);
    let modulus = ctx.modulus().clone();
    let mut acc = BigUint::zero();
    for x in 2..p {
        let a = tau[x as usize].modpow(&e1, &modulus);
        let b = tau[(p + 1 - x) as usize].modpow(&e2, &modulus);
        acc = ctx.add(&acc, &ctx.mul(&a, &b));
    }
    acc
}

/// The product ∏ᵢ g(ω^{−mᵢ}) of Gauss sums with Σmᵢ ≡ 0 mod p−1, computed
/// without ever materializing a single Gauss sum: the running product is
/// kept in the form acc·g(ω^{−ρ}) and each new factor is folded in with
/// either a Jacobi sum (g(ρ)g(χ) = J(ρ,χ)·g(ρχ) when ρχ is nontrivial) or
/// the norm relation g(χ)g(χ̄) = χ(−1)·p.  Since the exponent sum is a
/// multiple of p−1, the trailing character is trivial and the product is an
/// ordinary element of ℤ_p, of valuation Σmᵢ/(p−1).
fn gauss_product(ctx: &ZModCtx, tau: &[BigUint], ms: &[u64]) -> BigUint {
    let pm1 = ctx.p - 1;
    debug_assert!(ms.iter().sum::<u64>() % pm1 == 0);
    let mut acc = BigUint::one();
    let mut rho = 0u64; // current trailing character is ω^{−rho}
    for &m in ms {
        debug_assert!(m > 0 && m < pm1);
        if rho == 0 {
            rho = m;
            continue;
        }
        let s = (rho + m) % pm1;
        if s == 0 {
            // ω^{−rho}·ω^{−m} is trivial: g(χ)g(χ̄) = χ(−1)·p, and
            // χ(−1) = ω(−1)^{−rho} = (−1)^{rho}.
            let mut fac = ctx.reduce_int(&BigInt::from(ctx.p));
            if rho % 2 == 1 {
                fac = ctx.neg(&fac);
            }
            acc = ctx.mul(&acc, &fac);
            rho = 0;
        } else {
            let j = jacobi_sum(ctx, tau, rho, m);
            acc = ctx.mul(&acc, &j);
            rho = s;
        }
    }
    assert!(rho == 0, "character exponents must sum to a multiple of p−1");
    acc
}

fn diagonal_frobenius_with(
    n: usize,
    d: u32,
    p: u64,
    n_work: u32,
    coeffs: &[Rat],
) -> Result<Matrix<PadicScalar>> {
    let pm1 = p - 1;
    if pm1 % u64::from(d) != 0 {
        return Err(Error::DegreeNotDividing {
            d: u64::from(d),
            pm1,
        });
    }
    // The eigenvalue formula below is exact only when the Teichmüller lift
    // of each coefficient's reduction equals the coefficient itself; the
    // rational units with that property are ±1.
    let mut signs = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        if *c == Rat::one() {
            signs.push(false);
        } else if *c == -Rat::one() {
            signs.push(true);
        } else {
            return Err(Error::InvalidFamily(format!(
                "diagonal coefficient {c} is not ±1; \
                 the diagonal-fiber Frobenius is only exact for ±1 coefficients"
            )));
        }
    }
    let e_d = pm1 / u64::from(d);
    // One guard digit absorbs the final division by p.
    let nw_int = n_work + 1;
    let ctx = ZModCtx::new(p, nw_int);
    let tau: Vec<BigUint> = (0..=p)
        .map(|x| {
            if x == 0 || x == p {
                BigUint::zero()
            } else {
                teichmuller_lift(p, &BigUint::from(x), nw_int)
            }
        })
        .collect();
    let basis = dwork_basis(n, d);
    let r = basis.len();
    let mut out = Matrix::from_fn(r, r, |_, _| PadicScalar::exact_zero(p));
    for (i, b) in basis.iter().enumerate() {
        // The monomial class x^w Ω/P^k spans an eigenline of Frobenius; the
        // character attached to that line is indexed by the *complement*
        // ā = d − (w+1), giving the eigenvalue (−1)^n·p^{−1}·∏ᵢ g(ω^{−āᵢ·e_d}),
        // twisted by ∏ᵢ ω(cᵢ)^{āᵢ·e_d} when the diagonal coefficients cᵢ are
        // not all 1.  (The complement is forced by the Hodge filtration: a
        // pole-order-k class lies in Fil^{n+1−k}, so its eigenvalue must have
        // valuation n+1−k, which is ∏g(ω^{−āᵢe_d})/p and not the a-indexed
        // product; the a ↔ ā swap permutes the eigenvalue multiset, so
        // characteristic polynomials cannot see it, but the deformation of
        // the matrix can.)
        let ms: Vec<u64> = b
            .w
            .iter()
            .map(|&wi| (u64::from(d) - u64::from(wi + 1)) * e_d)
            .collect();
        let mut acc = gauss_product(&ctx, &tau, &ms);
        let mut flip = n % 2 == 1;
        for (sign, m) in signs.iter().zip(&ms) {
            // ω(−1)^{āᵢ·e_d} = (−1)^{āᵢ·e_d}.
            if *sign && m % 2 == 1 {
                flip = !flip;
            }
        }
        if flip {
            acc = ctx.neg(&acc);
        }
        assert_eq!(
            ctx.ord(&acc) as usize,
            n + 2 - b.level,
            "a Gauss-sum product over the complement of level k has valuation n+2−k"
        );
        out[(i, i)] = PadicScalar::from_payload(&ctx, &acc, 1, nw_int);
    }
    Ok(out)
}

/// The Frobenius matrix of the diagonal hypersurface Σᵢ xᵢ^d ⊂ ℙ^{n+1}
/// over 𝔽_p on the monomial basis of primitive middle cohomology,
/// normalized to act on H^n (valuations run from n on pole order 1 down to
/// 0 on pole order n+1, matching F(Fil^i) ⊆ p^i).  Requires d | p−1, which
/// makes the matrix diagonal; entries are known to absolute precision
/// `n_work`.
pub fn diagonal_frobenius(n: usize, d: u32, p: u64, n_work: u32) -> Result<Matrix<PadicScalar>> {
    let coeffs = vec![Rat::one(); n + 2];
    diagonal_frobenius_with(n, d, p, n_work, &coeffs)
}

/// [`diagonal_frobenius`] for the t = 1 member of a family, honouring the
/// signs of its diagonal coefficients (which must all be ±1).
pub fn diagonal_frobenius_for(fam: &Family, n_work: u32) -> Result<Matrix<PadicScalar>> {
    diagonal_frobenius_with(fam.n, fam.d, fam.p, n_work, &fam.diagonal_coeffs())
}

// ---------------------------------------------------------------------------
// Precision planning.
// ---------------------------------------------------------------------------

/// Working sizes for one attempt at the deformation solve: the modulus
/// p^{n_work}, the series length on the disk around t = 1, the cap on
/// reconstructed numerator degrees, and the payload shifts absorbing the
/// denominators produced by the flat frame (`shift_c`, one digit per power
/// of p in k!) and by the Frobenius series itself (`shift_f`).
#[derive(Clone, Debug)]
pub struct PrecisionPlan {
    /// The prime.
    pub p: u64,
    /// Requested output precision: the limiting data is correct mod p^{n_target}.
    pub n_target: u32,
    /// Worst p-denominator of the normalizing gauge pair (H, H⁻¹); the
    /// specialization stage loses at most 2·delta_h digits.
    pub delta_h: u32,
    /// Digits of the working modulus.
    pub n_work: u32,
    /// Number of series coefficients computed on the disk |t − 1| < 1.
    pub series_len: usize,
    /// Largest numerator degree the reconstruction may accept.
    pub degree_cap: usize,
    /// Payload shift of the flat frame series.
    pub shift_c: u32,
    /// Payload shift of the Frobenius series.
    pub shift_f: u32,
    /// Escalation rounds allowed after the first attempt.
    pub max_rounds: u32,
}

fn plan_with(
    p: u64,
    e: u64,
    delta_h: u32,
    n_target: u32,
    series_len: usize,
    degree_cap: usize,
    max_rounds: u32,
) -> PrecisionPlan {
    let shift_c = ord_p_factorial(p, series_len as u64 - 1) as u32;
    let shift_f = shift_c + 4;
    // Guard digits: fixed slack plus a little room that grows with the
    // ramification (the specialization window scales with e and p).
    let guard = 10 + (64 - e.leading_zeros()).min(8);
    let n_work = n_target + 2 * delta_h + 2 * shift_c + shift_f + guard;
    PrecisionPlan {
        p,
        n_target,
        delta_h,
        n_work,
        series_len,
        degree_cap,
        shift_c,
        shift_f,
        max_rounds,
    }
}

/// Size the p-adic working precision for a connection of rank `r` whose
/// pole polynomial has degree `deg_delta`, a ramification index `e`, a
/// gauge loss `delta_h`, and a requested output precision `n_target`.
/// Escalation (see [`PrecisionPlan::escalated`]) is capped at `max_rounds`.
pub fn precision_plan(
    p: u64,
    r: usize,
    deg_delta: usize,
    e: u64,
    delta_h: u32,
    n_target: u32,
    max_rounds: u32,
) -> PrecisionPlan {
    // The common denominator of the rational Frobenius mixes factors of
    // Δ(t) and Δ(t^p), so its degree grows linearly with the number of
    // certified digits, at a rate of up to deg Δ·(p + 1)/4 per digit in
    // observed families.  Escalation doubles the budget when a family
    // outruns this estimate.
    let digits = n_target as usize + 10;
    let slope = deg_delta * (p as usize + 1) / 4 + 1;
    let degree_cap = (digits * slope).max(2 * deg_delta + 2 * r + 8);
    let series_len = 2 * degree_cap + deg_delta + 64;
    plan_with(p, e, delta_h, n_target, series_len, degree_cap, max_rounds)
}

impl PrecisionPlan {
    /// The plan after `rounds` escalations: series length and degree cap
    /// double each round and the working precision is resized to match.
    pub fn escalated(&self, rounds: u32) -> PrecisionPlan {
        let f = 1usize << rounds.min(16);
        // e was folded into the guard; reconstruct nothing, just rescale.
        let mut plan = plan_with(
            self.p,
            1,
            self.delta_h,
            self.n_target,
            self.series_len * f,
            self.degree_cap * f,
            self.max_rounds,
        );
        // Keep the original guard headroom (it contained the e-dependent part).
        plan.n_work = plan.n_work.max(self.n_work + 2 * (plan.shift_c - self.shift_c) + (plan.shift_f - self.shift_f));
        plan
    }

    /// The working precision of the final escalation round — the precision
    /// at which the initial Frobenius matrix should be supplied so that
    /// every round can run.
    pub fn max_n_work(&self) -> u32 {
        self.escalated(self.max_rounds).n_work
    }
}

// ---------------------------------------------------------------------------
// The connection with cleared denominators.
// ---------------------------------------------------------------------------

/// N = B/(q·δ) with B an integer polynomial matrix, δ a primitive integer
/// polynomial (the monic lcm of the entry denominators, cleared of rational
/// content), and q a rational scalar.
struct ClearedConnection {
    b: Matrix<UniPoly<BigInt>>,
    delta_n: UniPoly<BigInt>,
    q: Rat,
}

fn clear_connection(n: &Matrix<RatFunc>) -> ClearedConnection {
    let r = n.rows();
    // Monic lcm of the reduced denominators.
    let mut den = UniPoly::<Rat>::one();
    for e in n.data() {
        let d = e.denom().monic();
        let g = crate::algebra::ratfunc::rat_poly_gcd(&den, &d);
        den = den.mul(&d.div_exact(&g)).monic();
    }
    // B_rat = den·N entrywise (exact polynomial division of den by each
    // entry's denominator).
    let b_rat = Matrix::from_fn(r, r, |i, j| {
        let e = &n[(i, j)];
        if e.is_zero() {
            UniPoly::zero()
        } else {
            let cof = den.div_exact(&e.denom().monic());
            // Undo the monic normalization of the entry's denominator.
            let lead = e.denom().leading().expect("nonzero denominator").clone();
            e.numer().mul(&cof).scale(&lead.recip())
        }
    });
    // Integer forms: den = cd·delta_n with delta_n primitive, and a common
    // integer denominator for the coefficients of B_rat.
    let (cd, delta_n) = crate::algebra::ratfunc::primitive_int(&den);
    let mut den_b = BigInt::one();
    for e in b_rat.data() {
        for c in e.coeffs() {
            den_b = den_b.lcm(c.denom());
        }
    }
    let b = b_rat.map(|e| {
        e.map(|c| {
            let scaled = c * Rat::from_integer(den_b.clone());
            debug_assert!(scaled.is_integer());
            scaled.to_integer()
        })
    });
    // N = B_rat/den = (B/den_b)/(cd·delta_n) = B/(den_b·cd·delta_n).
    let q = Rat::from_integer(den_b) * cd;
    ClearedConnection { b, delta_n, q }
}

fn ord_p_bigint(p: u64, x: &BigInt) -> u32 {
    debug_assert!(!x.is_zero());
    let bp = BigInt::from(p);
    let mut v = 0u32;
    let mut y = x.clone();
    loop {
        let (q, rem) = y.div_rem(&bp);
        if !rem.is_zero() {
            return v;
        }
        v += 1;
        y = q;
    }
}

/// Smallest p-valuation over all coefficients of all entries; None when the
/// matrix is identically zero.
fn min_ord_p(p: u64, m: &Matrix<UniPoly<BigInt>>) -> Option<u32> {
    let mut best: Option<u32> = None;
    for e in m.data() {
        for c in e.coeffs() {
            if c.is_zero() {
                continue;
            }
            let v = ord_p_bigint(p, c);
            best = Some(best.map_or(v, |b| b.min(v)));
            if best == Some(0) {
                return best;
            }
        }
    }
    best
}

fn mat_poly_mul(a: &Matrix<UniPoly<BigInt>>, b: &Matrix<UniPoly<BigInt>>) -> Matrix<UniPoly<BigInt>> {
    assert_eq!(a.cols(), b.rows());
    Matrix::from_fn(a.rows(), b.cols(), |i, j| {
        let mut acc = UniPoly::zero();
        for l in 0..a.cols() {
            if a[(i, l)].is_zero() || b[(l, j)].is_zero() {
                continue;
            }
            acc = acc.add(&a[(i, l)].mul(&b[(l, j)]));
        }
        acc
    })
}

// ---------------------------------------------------------------------------
// The global Frobenius matrix.
// ---------------------------------------------------------------------------

/// F(t) ≡ p^{−c}·numerators(t)/D(t) to absolute precision `n_ach`: the
/// Frobenius matrix of the family as an explicitly rational p-adic
/// approximation with a common denominator D discovered from the series
/// itself, verified against the horizontality equation by exact integer
/// arithmetic.
#[derive(Clone, Debug)]
pub struct GlobalFrobenius {
    /// The prime.
    pub p: u64,
    /// Global p-power shift: the represented matrix is p^{−c}·num/D.
    pub c: u32,
    /// Common denominator polynomial, a p-adic divisor of a product of
    /// powers of Δ(t) and Δ(t^p); its p-content is zero and its value at
    /// t = 1 is a unit.
    pub denominator: UniPoly<BigInt>,
    /// Integer numerator polynomials, one per matrix entry.
    pub numerators: Matrix<UniPoly<BigInt>>,
    /// The pole polynomial of the connection (primitive, integer).
    pub delta: UniPoly<BigInt>,
    /// The represented matrix agrees with the true Frobenius to this
    /// absolute p-adic precision.
    pub n_ach: u32,
}

impl GlobalFrobenius {
    /// Evaluate at a point t₀ of the closed unit disk where Δ(t₀) is a
    /// p-adic unit: the flattened payload matrix, to be read as
    /// p^{−c}·payload mod p^{ctx digits}.  [`Error::Singular`] when Δ(t₀)
    /// or the denominator is not invertible there.
    pub fn eval_mod(&self, ctx: &ZModCtx, t0: &BigUint) -> Result<Vec<BigUint>> {
        let gate = eval_int_poly_mod(ctx, &self.delta, t0);
        ctx.inv(&gate).ok_or(Error::Singular)?;
        let dv = eval_int_poly_mod(ctx, &self.denominator, t0);
        let dinv = ctx.inv(&dv).ok_or(Error::Singular)?;
        let r = self.numerators.rows();
        let mut out = Vec::with_capacity(r * r);
        for i in 0..r {
            for j in 0..r {
                let nv = eval_int_poly_mod(ctx, &self.numerators[(i, j)], t0);
                out.push(ctx.mul(&nv, &dinv));
            }
        }
        Ok(out)
    }
}

fn eval_int_poly_mod(ctx: &ZModCtx, f: &UniPoly<BigInt>, t0: &BigUint) -> BigUint {
    let mut acc = BigUint::zero();
    for c in f.coeffs().iter().rev() {
        acc = ctx.mul(&acc, t0);
        acc = ctx.add(&acc, &ctx.reduce_int(c));
    }
    acc
}

/// Compose an integer polynomial with t = 1 + u (exact binomial shift).
fn shift_to_disk(f: &UniPoly<BigInt>) -> UniPoly<BigInt> {
    f.compose(&UniPoly::new(vec![BigInt::one(), BigInt::one()]))
}

fn reduce_rat_poly(ctx: &ZModCtx, f: &UniPoly<Rat>) -> Result<Vec<BigUint>> {
    f.coeffs()
        .iter()
        .map(|c| {
            ctx.reduce_rat(c)
                .ok_or_else(|| Error::BadReduction(format!("{c}")))
        })
        .collect()
}

struct Reconstruction {
    c: u32,
    /// Exponents of Δ(t) and Δ(t^p) in the common denominator.
    exp_delta: u32,
    exp_delta_sigma: u32,
    numerators_u: Matrix<UniPoly<BigInt>>,
    n_ach: u32,
}

/// Numerator degree allowance above the denominator degree in the rational
/// fit: the entries of the Frobenius matrix are not constrained at t = ∞,
/// so the numerators may run a little past the denominator.
const FIT_DEG_SLACK: usize = 12;

/// Coefficients the fit window must extend past the numerator degree bound
/// for a vanishing tail to count as evidence of polynomiality.
const FIT_TAIL_SLACK: usize = 32;

/// Cut a payload series matrix that is claimed to be polynomial of degree
/// ≤ `deg_bound` into integer polynomials.  The tail over
/// `(deg_bound, window_end)` must sit at payload valuation ≥
/// `shift_div + k_keep` — the claim fails (None) otherwise — and kept
/// coefficients are divided by p^{shift_div} and centered mod p^{k_keep}.
fn cut_polynomial_matrix(
    ctx: &ZModCtx,
    prods: &[Vec<BigUint>],
    r: usize,
    shift_div: u32,
    k_keep: u32,
    deg_bound: usize,
    window_end: usize,
) -> Option<Matrix<UniPoly<BigInt>>> {
    let floor = (shift_div + k_keep).min(ctx.nw);
    for t in prods {
        if ((deg_bound + 1)..window_end).any(|k| ctx.ord(&t[k]) < floor) {
            return None;
        }
    }
    Some(Matrix::from_fn(r, r, |i, j| {
        let t = &prods[i * r + j];
        let deg = (0..=deg_bound).rev().find(|&k| ctx.ord(&t[k]) < floor);
        match deg {
            None => UniPoly::zero(),
            Some(deg) => UniPoly::new(
                (0..=deg)
                    .map(|k| {
                        let v = ctx
                            .div_exact_p(&t[k], shift_div)
                            .expect("entry payloads sit at or above the common shift");
                        ctx.centered_mod(&v, k_keep)
                    })
                    .collect(),
            ),
        }
    }))
}

/// Try to write the Frobenius series as a single rational matrix
/// P(u)/D(u) with common denominator D = Δ(t)^a·Δ(t^p)^b — the shape the
/// deformation produces: F is not globally rational, but for every
/// precision p^K it agrees with such a quotient, with exponents (and hence
/// degrees) growing linearly in K.  The exponent pair is found by scanning
/// the grid smallest-degree-first and testing, at full working precision,
/// that Δ^a·Δσ^b·F has a vanishing tail; no linear algebra mod p^K is
/// involved, so no precision is lost to elimination.  The caller certifies
/// the winner through the exact integer residual of the horizontality
/// equation, so a spurious fit cannot survive.  Entry payloads of `f`
/// carry shift `plan.shift_f`; `delta_u` and `delta_sigma_u` are the
/// payload coefficients of Δ(1+u) and Δ((1+u)^p).
fn try_reconstruct(
    ctx: &ZModCtx,
    f: &SeriesMat,
    delta_u: &[BigUint],
    delta_sigma_u: &[BigUint],
    plan: &PrecisionPlan,
) -> Option<Reconstruction> {
    let r = f.r;
    let len = f.len;
    let nw = ctx.nw;
    // Entry series, row-major.
    let entries: Vec<Vec<BigUint>> = (0..r * r)
        .map(|idx| (0..len).map(|k| f.get(k, idx / r, idx % r).clone()).collect())
        .collect();
    // Global p-shift of the represented values: payloads are
    // p^{shift_f}·value, so a payload valuation floor min_ord below shift_f
    // witnesses a value denominator p^{shift_f − min_ord}.  The unit-root
    // entry of the initial condition keeps min_ord ≤ shift_f.
    let min_ord = entries
        .iter()
        .flat_map(|e| e.iter().map(|c| ctx.ord(c)))
        .min()
        .unwrap_or(nw);
    if min_ord >= nw {
        return None;
    }
    let c_shift = plan.shift_f.saturating_sub(min_ord);
    let shift_div = plan.shift_f - c_shift;
    // The claimable precision cap from the series chain: reliable to
    // nw − 2·shift_c payload digits (the flat frame and the
    // back-substitution each consume up to shift_c), values sit at
    // p^{−shift_f} of payloads, and the global p^{−c} costs c more.
    let n_cap = nw
        .saturating_sub(2 * plan.shift_c + plan.shift_f)
        .saturating_sub(c_shift);
    if n_cap < plan.n_target {
        return None;
    }
    // Certification precision of the fit: enough to carry the target
    // through the p^{−c} shift with a little slack, and safely below the
    // noise floor of the series chain.
    let data_digits = nw.saturating_sub(2 * plan.shift_c).saturating_sub(shift_div);
    let k_cert = (plan.n_target + c_shift + 4).min(data_digits.saturating_sub(2));
    if k_cert < plan.n_target + c_shift {
        return None;
    }
    let window_end = len.saturating_sub(8);
    let deg_d = delta_u.len().saturating_sub(1);
    let deg_ds = delta_sigma_u.len().saturating_sub(1);

    // Scan exponent pairs (a, b), cheapest (σ-side) direction outermost,
    // keeping the smallest-degree denominator that passes the tail test.
    let mut best: Option<(usize, u32, u32, Matrix<UniPoly<BigInt>>)> = None;
    let b_cap = if deg_ds == 0 { 0 } else { plan.degree_cap / deg_ds };
    let mut fb = entries;
    for b in 0..=b_cap {
        let base_deg = b as usize * deg_ds;
        if let Some((bd, ..)) = &best {
            if base_deg >= *bd {
                break;
            }
        }
        if b > 0 {
            fb = fb
                .iter()
                .map(|e| zp_mul_trunc(ctx, e, delta_sigma_u, len))
                .collect();
        }
        let a_cap = if deg_d == 0 {
            0
        } else {
            (plan.degree_cap - base_deg) / deg_d
        };
        let mut ga = fb.clone();
        for a in 0..=a_cap {
            let deg_den = base_deg + a as usize * deg_d;
            if let Some((bd, ..)) = &best {
                if deg_den >= *bd {
                    break;
                }
            }
            if a > 0 {
                ga = ga.iter().map(|e| zp_mul_trunc(ctx, e, delta_u, len)).collect();
            }
            let deg_bound = deg_den + FIT_DEG_SLACK;
            if deg_bound + FIT_TAIL_SLACK > window_end {
                break;
            }
            if let Some(numerators_u) =
                cut_polynomial_matrix(ctx, &ga, r, shift_div, k_cert, deg_bound, window_end)
            {
                best = Some((deg_den, a as u32, b as u32, numerators_u));
                break;
            }
        }
    }
    let (_, exp_delta, exp_delta_sigma, numerators_u) = best?;
    let n_ach = (k_cert - c_shift).min(n_cap);
    Some(Reconstruction {
        c: c_shift,
        exp_delta,
        exp_delta_sigma,
        numerators_u,
        n_ach,
    })
}

/// The p-valuation of the exact residual of the horizontality equation for
/// the candidate g: min ord_p over the integer-cleared matrix
///
/// `q_num·δδ^σ·(P′D − D′P) + q_den·δ^σ·D·B·P − q_den·p·t^{p−1}·δ·D·P·B^σ`
///
/// minus the p-content of the clearing factors (c and ord_p q_num; D and
/// the δ's are primitive); the true residual
/// dF/dt + N·F − p·t^{p−1}·F·N(t^p) has exactly this Gauss valuation.
/// `i64::MAX` when the residual is identically zero.
fn residual_valuation(cleared: &ClearedConnection, g: &GlobalFrobenius) -> i64 {
    let p = g.p;
    let pp = &g.numerators;
    let r = pp.rows();
    let d_poly = &g.denominator;
    let d_prime = d_poly.derivative();
    let dn = &cleared.delta_n;
    let dn_sigma = dn.subst_pow(p as usize);
    let b_sigma = cleared.b.map(|e| e.subst_pow(p as usize));
    let q_num = cleared.q.numer().clone();
    let q_den = cleared.q.denom().clone();

    // Term 1: q_num·δ·δ^σ·(P′D − D′P).
    let dd = dn.mul(&dn_sigma).scale(&q_num);
    let term1 = Matrix::from_fn(r, r, |i, j| {
        let e = &pp[(i, j)];
        let lead = e.derivative().mul(d_poly);
        let tail = d_prime.mul(e);
        lead.sub(&tail).mul(&dd)
    });
    // Term 2: q_den·δ^σ·D·B·P.
    let bp = mat_poly_mul(&cleared.b, pp);
    let s2 = dn_sigma.mul(d_poly).scale(&q_den);
    let term2 = bp.map(|e| e.mul(&s2));
    // Term 3: q_den·p·t^{p−1}·δ·D·P·B^σ.
    let pbs = mat_poly_mul(pp, &b_sigma);
    let s3 = dn
        .mul(d_poly)
        .scale(&(BigInt::from(p) * &q_den))
        .shift_up(p as usize - 1);
    let term3 = pbs.map(|e| e.mul(&s3));

    let res = term1.add(&term2).sub(&term3);
    match min_ord_p(p, &res) {
        None => i64::MAX,
        Some(v) => {
            let q_num_ord = ord_p_bigint(p, &q_num);
            i64::from(v) - i64::from(g.c) - i64::from(q_num_ord)
        }
    }
}

/// Payload form of an integral scalar matrix: entry (i,j) reduced mod the
/// context modulus.  Requires every entry to have valuation ≥ 0 and
/// absolute precision ≥ the context digits.
fn payload_matrix(ctx: &ZModCtx, f: &Matrix<PadicScalar>) -> Result<Vec<BigUint>> {
    let nw = ctx.nw;
    let mut out = Vec::with_capacity(f.rows() * f.cols());
    for e in f.data() {
        if e.is_exactly_zero() {
            out.push(BigUint::zero());
            continue;
        }
        match e.valuation() {
            None => {
                // Zero to its recorded precision; that precision must cover
                // the working modulus for the payload to be exact.
                let abs = e.abs_precision().unwrap_or(0);
                if abs < i64::from(nw) {
                    return Err(Error::PrecisionExhausted(format!(
                        "initial Frobenius entry known only to precision {abs}, need {nw}"
                    )));
                }
                out.push(BigUint::zero());
            }
            Some(v) => {
                if v < 0 {
                    return Err(Error::PrecisionExhausted(
                        "initial Frobenius matrix must be p-integral".into(),
                    ));
                }
                let abs = e.abs_precision().expect("nonzero scalar has a precision");
                if abs < i64::from(nw) {
                    return Err(Error::PrecisionExhausted(format!(
                        "initial Frobenius entry known to precision {abs}, need {nw}; \
                         supply it at the plan's max_n_work"
                    )));
                }
                if v >= i64::from(nw) {
                    out.push(BigUint::zero());
                    continue;
                }
                // The payload p^v·unit is pinned mod p^nw by the unit mod
                // p^{nw−v}, which the absolute-precision check guarantees.
                let unit = e.unit_mod(nw - v as u32).expect("precision checked above");
                out.push(ctx.mul(&p_power(ctx.p, v as u32), &unit));
            }
        }
    }
    Ok(out)
}

/// The cleared, p-stripped ODE data of a connection, in the disk coordinate
/// u = t − 1: δ(u)·C′ + B(u)·C = 0 with δ = den(1+u) and B = (den·N)(1+u).
struct OdeData {
    cleared: ClearedConnection,
    den_u: UniPoly<Rat>,
    b_u: Matrix<UniPoly<Rat>>,
    /// Δ(1+u), exact.
    delta_u_int: UniPoly<BigInt>,
    r: usize,
}

fn prepare_ode(gm: &GaussManin, p: u64) -> OdeData {
    let cleared = clear_connection(&gm.n_matrix);
    // The equation is invariant under a common scalar, so strip the p-power
    // content of the clearing scalar q first: a p-power there would either
    // mask the t=1 unit test for δ or falsely flag integral data as having
    // bad reduction.
    let q_strip = {
        let q_ord = rat_ord_p(p, &cleared.q);
        let pw = Rat::from_integer(BigInt::from(p).pow(q_ord.unsigned_abs() as u32));
        if q_ord >= 0 {
            pw.recip()
        } else {
            pw
        }
    };
    let den_u: UniPoly<Rat> = {
        let den = cleared
            .delta_n
            .map(|c| Rat::from_integer(c.clone()))
            .scale(&(cleared.q.clone() * &q_strip));
        den.compose(&UniPoly::new(vec![Rat::one(), Rat::one()]))
    };
    let b_u: Matrix<UniPoly<Rat>> = cleared.b.map(|e| {
        e.map(|c| Rat::from_integer(c.clone()) * &q_strip)
            .compose(&UniPoly::new(vec![Rat::one(), Rat::one()]))
    });
    OdeData {
        r: gm.n_matrix.rows(),
        den_u,
        b_u,
        delta_u_int: shift_to_disk(&gm.delta),
        cleared,
    }
}

/// Solve for the Frobenius series on the disk around t = 1 at the sizes of
/// one plan round: the flat frame C (C′ = −N·C, C(1) = I), its σ-pullback
/// C(t^p), and the back-substitution F·C(t^p) = C·F₁.
fn frobenius_series(
    ctx: &ZModCtx,
    ode: &OdeData,
    f1_payload: &[BigUint],
    plan_r: &PrecisionPlan,
) -> Result<SeriesMat> {
    let r = ode.r;
    let delta_coeffs = reduce_rat_poly(ctx, &ode.den_u)?;
    if ctx.ord(&delta_coeffs[0]) > 0 {
        return Err(Error::Singular);
    }
    let max_bdeg = ode
        .b_u
        .data()
        .iter()
        .map(|e| e.degree_or_zero())
        .max()
        .unwrap_or(0);
    let mut b_coeffs: Vec<Vec<BigUint>> = vec![vec![BigUint::zero(); r * r]; max_bdeg + 1];
    for i in 0..r {
        for j in 0..r {
            let cs = reduce_rat_poly(ctx, &ode.b_u[(i, j)])?;
            for (k, c) in cs.into_iter().enumerate() {
                b_coeffs[k][i * r + j] = c;
            }
        }
    }
    let c_mat = series_ode_solve(
        ctx,
        &delta_coeffs,
        &b_coeffs,
        r,
        plan_r.series_len,
        plan_r.shift_c,
    )?;
    let d_sigma = frobenius_pullback_compose(ctx, &c_mat, plan_r.series_len);
    let rhs = series_mul_const_right(ctx, &c_mat, f1_payload);
    series_backsub(ctx, &rhs, &d_sigma, plan_r.shift_f)
}

/// Check G(1) = F₁ at payload level, mod p^{n_target}.
fn initial_condition_holds(
    ctx: &ZModCtx,
    g: &GlobalFrobenius,
    f1: &[BigUint],
    n_target: u32,
) -> bool {
    let one = BigUint::one();
    let at_one = match g.eval_mod(ctx, &one) {
        Ok(v) => v,
        Err(_) => return false,
    };
    let pc = p_power(ctx.p, g.c) % ctx.modulus();
    let floor = n_target + g.c;
    at_one.iter().zip(f1).all(|(a, b)| {
        let d = ctx.sub(a, &ctx.mul(b, &pc));
        ctx.ord(&d) >= floor.min(ctx.nw)
    })
}

/// Solve the horizontality equation outward from t = 1 and reconstruct the
/// Frobenius matrix of the family as p^{−c}·P(t)/D(t) with a common
/// denominator discovered from the series.
///
/// `f1` is the Frobenius of the diagonal fiber at t = 1, supplied at
/// absolute precision ≥ `plan.max_n_work()` so that every escalation round
/// can run.  Each round solves for the flat frame C (C′ = −N·C, C(1) = I)
/// with the pole polynomial cleared, forms F = C·F₁·C(t^p)⁻¹ by
/// back-substitution, and reconstructs; a reconstruction is accepted only
/// if the initial condition holds and the exact integer residual of the
/// horizontality equation has valuation ≥ `plan.n_target`.
///
/// Pre: Δ(1) must be a p-adic unit ([`Error::Singular`] otherwise).
pub fn global_frobenius(
    gm: &GaussManin,
    f1: &Matrix<PadicScalar>,
    plan: &PrecisionPlan,
) -> Result<GlobalFrobenius> {
    let r = gm.n_matrix.rows();
    if f1.rows() != r || f1.cols() != r {
        return Err(Error::DimensionMismatch(format!(
            "initial Frobenius is {}x{}, connection has rank {r}",
            f1.rows(),
            f1.cols()
        )));
    }
    let p = plan.p;
    let ode = prepare_ode(gm, p);
    // Δ(t^p) and the disk-coordinate forms of both denominator factors.
    let delta_sigma_t = gm.delta.subst_pow(p as usize);
    let one_plus_u = UniPoly::new(vec![BigInt::one(), BigInt::one()]);
    let delta_sigma_u_int = delta_sigma_t.compose(&one_plus_u);

    let trace = std::env::var_os("LIMIFROB_TRACE").is_some();
    let mut last_residual: Option<(i64, i64)> = None;
    let mut rounds_run = 0u32;
    for round in 0..=plan.max_rounds {
        rounds_run = round;
        let plan_r = plan.escalated(round);
        let ctx = ZModCtx::new(p, plan_r.n_work);
        let f1_payload = payload_matrix(&ctx, f1)?;
        if trace {
            eprintln!(
                "[deform] round {round}: len {} cap {} n_work {}",
                plan_r.series_len, plan_r.degree_cap, plan_r.n_work
            );
        }

        let solved = (|| -> Result<GlobalFrobenius> {
            let t0 = std::time::Instant::now();
            let f_series = frobenius_series(&ctx, &ode, &f1_payload, &plan_r)?;
            if trace {
                eprintln!("[deform]   series: {:.1}s", t0.elapsed().as_secs_f64());
            }
            let t1 = std::time::Instant::now();
            let delta_u_pay: Vec<BigUint> = ode
                .delta_u_int
                .coeffs()
                .iter()
                .map(|c| ctx.reduce_int(c))
                .collect();
            let delta_sigma_u_pay: Vec<BigUint> = delta_sigma_u_int
                .coeffs()
                .iter()
                .map(|c| ctx.reduce_int(c))
                .collect();
            let rec =
                try_reconstruct(&ctx, &f_series, &delta_u_pay, &delta_sigma_u_pay, &plan_r)
                    .ok_or(Error::ReconstructionFailed { rounds: round });
            if trace {
                eprintln!(
                    "[deform]   reconstruct: {:.1}s ({})",
                    t1.elapsed().as_secs_f64(),
                    match &rec {
                        Ok(r) => format!("Δ^{}·Δσ^{}", r.exp_delta, r.exp_delta_sigma),
                        Err(_) => "no fit".into(),
                    }
                );
            }
            let rec = rec?;
            // Back to the t coordinate: u = t − 1.  The denominator is the
            // exact integer polynomial Δ(t)^a·Δ(t^p)^b.
            let back = UniPoly::new(vec![-BigInt::one(), BigInt::one()]);
            let numerators = rec.numerators_u.map(|e| e.compose(&back));
            let mut denominator = UniPoly::constant(BigInt::one());
            for _ in 0..rec.exp_delta {
                denominator = denominator.mul(&gm.delta);
            }
            for _ in 0..rec.exp_delta_sigma {
                denominator = denominator.mul(&delta_sigma_t);
            }
            Ok(GlobalFrobenius {
                p,
                c: rec.c,
                denominator,
                numerators,
                delta: gm.delta.clone(),
                n_ach: rec.n_ach,
            })
        })();
        let mut g = match solved {
            Ok(g) => g,
            Err(Error::PrecisionExhausted(_)) | Err(Error::ReconstructionFailed { .. }) => continue,
            Err(e) => return Err(e),
        };
        if !initial_condition_holds(&ctx, &g, &f1_payload, plan.n_target) {
            if trace {
                eprintln!("[deform]   initial condition failed");
            }
            continue;
        }
        let t2 = std::time::Instant::now();
        let achieved = residual_valuation(&ode.cleared, &g);
        if trace {
            eprintln!(
                "[deform]   residual: {:.1}s (achieved {achieved}, deg D {})",
                t2.elapsed().as_secs_f64(),
                g.denominator.degree_or_zero()
            );
        }
        if achieved >= i64::from(plan.n_target) {
            // The exact residual is the certificate; never claim beyond it.
            if achieved < i64::from(g.n_ach) {
                g.n_ach = u32::try_from(achieved).unwrap_or(g.n_ach);
            }
            return Ok(g);
        }
        last_residual = Some((achieved, i64::from(plan.n_target)));
    }
    match last_residual {
        Some((achieved, required)) => Err(Error::ResidualCheckFailed { achieved, required }),
        None => Err(Error::ReconstructionFailed { rounds: rounds_run }),
    }
}

// ---------------------------------------------------------------------------
// Specialization to the limit point.
// ---------------------------------------------------------------------------

/// The Frobenius of the limiting structure at s = 0 together with the
/// precision it is known to and the ramification index it lives over.
#[derive(Clone, Debug)]
pub struct LimitingFrobenius {
    /// Fr₀, invertible, satisfying N₀·Fr₀ = p·Fr₀·N₀.
    pub fr0: Matrix<PadicScalar>,
    /// Ramification index of the pullback t = s^e.
    pub e: u64,
    /// Absolute precision of the entries of Fr₀.
    pub n_ach: u32,
}

fn rat_ord_p(p: u64, c: &Rat) -> i64 {
    debug_assert!(!c.is_zero());
    i64::from(ord_p_bigint(p, c.numer())) - i64::from(ord_p_bigint(p, c.denom()))
}

/// Laurent polynomial over ℚ → payload series with a fixed shift: the
/// coefficient of s^k is p^{shift}·(rational coefficient) mod p^{nw}.
fn laurent_payload(
    ctx: &ZModCtx,
    l: &LaurentPoly,
    shift: u32,
    off: i64,
    len: usize,
) -> Result<Vec<BigUint>> {
    let pw = Rat::from_integer(BigInt::from(ctx.p).pow(shift));
    let mut co = vec![BigUint::zero(); len];
    if let Some(v) = l.valuation() {
        let top = l.top_degree().expect("nonzero Laurent entry has a top");
        for k in v..=top {
            let c = l.coeff(k);
            if c.is_zero() {
                continue;
            }
            let idx = k - off;
            assert!(idx >= 0, "matrix offset is the least entry valuation");
            if (idx as usize) < len {
                let scaled = &c * &pw;
                let red = ctx
                    .reduce_rat(&scaled)
                    .ok_or_else(|| Error::BadReduction(format!("{c}")))?;
                co[idx as usize] = red;
            }
        }
    }
    Ok(co)
}

fn laurent_matrix_offset(m: &Matrix<LaurentPoly>) -> i64 {
    m.data()
        .iter()
        .filter_map(|e| e.valuation())
        .min()
        .unwrap_or(0)
}

fn laurent_matrix_payload(
    ctx: &ZModCtx,
    m: &Matrix<LaurentPoly>,
    shift: u32,
    len: usize,
) -> Result<(i64, Vec<Vec<BigUint>>)> {
    let off = laurent_matrix_offset(m);
    let mut out = Vec::with_capacity(m.rows() * m.cols());
    for e in m.data() {
        out.push(laurent_payload(ctx, e, shift, off, len)?);
    }
    Ok((off, out))
}

/// Conjugate the global Frobenius into the normalized frame and read off
/// its value at s = 0.
///
/// With t = s^e the matrix F′(s) = H(s)·F(s^e)·H(s^p)⁻¹ is regular at
/// s = 0 (all negative Laurent coefficients vanish p-adically —
/// [`Error::NegativeCoefficientNonzero`] reports a violation) and
/// Fr₀ = F′(0).  The result is checked to be invertible and to satisfy
/// N₀·Fr₀ = p·Fr₀·N₀ to the achieved precision.
pub fn specialize_limit(
    g: &GlobalFrobenius,
    norm: &NormalizedConnection,
    plan: &PrecisionPlan,
) -> Result<LimitingFrobenius> {
    let p = g.p;
    let r = g.numerators.rows();
    let e = norm.e;
    // Actual gauge loss of this normalization.
    let mut worst = 0i64;
    for m in [&norm.h, &norm.h_inv] {
        for entry in m.data() {
            let Some(v) = entry.valuation() else { continue };
            let top = entry.top_degree().expect("nonzero entry");
            for k in v..=top {
                let c = entry.coeff(k);
                if !c.is_zero() {
                    worst = worst.min(rat_ord_p(p, &c));
                }
            }
        }
    }
    let dh = (-worst).max(0) as u32;
    if plan.n_target + 2 * dh > g.n_ach {
        return Err(Error::PrecisionExhausted(format!(
            "specialization needs {} digits of the global Frobenius, have {}",
            plan.n_target + 2 * dh,
            g.n_ach
        )));
    }
    let n_out = g.n_ach - 2 * dh;
    let ctx = ZModCtx::new(p, g.n_ach + g.c + 2 * dh + 8);

    // F(s^e) = p^{−c}·Num(s^e)/D(s^e) with D(s^e) = s^z·V(s), V(0) a unit
    // (z > 0 happens when the discovered denominator carries t-power
    // factors of the pole polynomial).
    let d_se = g.denominator.subst_pow(e as usize);
    let z = d_se.valuation().expect("denominator is nonzero") as i64;
    let v_poly = d_se.shift_down(z as usize);
    let v_mod: Vec<BigUint> = v_poly.coeffs().iter().map(|c| ctx.reduce_int(c)).collect();
    let v0_inv = ctx.inv(&v_mod[0]).ok_or_else(|| {
        Error::PrecisionExhausted(
            "lowest coefficient of D(s^e) is not a p-adic unit; \
             the limit cannot be expanded p-adically"
            .into(),
        )
    })?;

    // Laurent offsets of the three factors.
    let hp_inv: Matrix<LaurentPoly> = norm.h_inv.map(|l| l.subst_pow(p as i64));
    let off_h = laurent_matrix_offset(&norm.h);
    let off_hp = laurent_matrix_offset(&hp_inv);
    let off_f = -z;
    let off_total = off_h + off_f + off_hp;
    // Window: everything needed to see s^0 of the product, plus slack.
    let len = usize::try_from((1 - off_total).max(1)).expect("window fits") + 4;

    // V(s)⁻¹ as a payload-free unit series.
    let mut w_inv = vec![BigUint::zero(); len];
    w_inv[0] = v0_inv;
    for k in 1..len {
        let mut acc = BigUint::zero();
        for j in 1..=k.min(v_mod.len() - 1) {
            if v_mod[j].is_zero() || w_inv[k - j].is_zero() {
                continue;
            }
            acc = ctx.add(&acc, &ctx.mul(&v_mod[j], &w_inv[k - j]));
        }
        let head = ctx.mul(&acc, &w_inv[0]);
        w_inv[k] = ctx.neg(&head);
    }

    // Factor payload series.
    let (oh, h_series) = laurent_matrix_payload(&ctx, &norm.h, dh, len)?;
    let (ohp, hp_series) = laurent_matrix_payload(&ctx, &hp_inv, dh, len)?;
    let f_series: Vec<Vec<BigUint>> = g
        .numerators
        .data()
        .iter()
        .map(|num| {
            let nse = num.subst_pow(e as usize);
            let ns: Vec<BigUint> = nse.coeffs().iter().map(|c| ctx.reduce_int(c)).collect();
            zp_mul_trunc(&ctx, &ns, &w_inv, len)
        })
        .collect();

    // Product H·F(s^e)·H(s^p)⁻¹, offsets oh + off_f + ohp.
    let mul_mats = |a: &[Vec<BigUint>], b: &[Vec<BigUint>]| -> Vec<Vec<BigUint>> {
        let mut out = vec![vec![BigUint::zero(); len]; r * r];
        for i in 0..r {
            for l in 0..r {
                let ae = &a[i * r + l];
                if ae.iter().all(|c| c.is_zero()) {
                    continue;
                }
                for j in 0..r {
                    let be = &b[l * r + j];
                    if be.iter().all(|c| c.is_zero()) {
                        continue;
                    }
                    let prod = zp_mul_trunc(&ctx, ae, be, len);
                    let oe = &mut out[i * r + j];
                    for (o, c) in oe.iter_mut().zip(&prod) {
                        *o = ctx.add(o, c);
                    }
                }
            }
        }
        out
    };
    let hf = mul_mats(&h_series, &f_series);
    let full = mul_mats(&hf, &hp_series);
    let off_prod = oh + off_f + ohp;
    let total_shift = u64::from(g.c) + 2 * u64::from(dh);

    // All coefficients of s^k with k < 0 must vanish to the target
    // precision; the s^0 coefficient is Fr₀.
    let floor = plan.n_target + g.c + 2 * dh;
    let zero_idx = usize::try_from(-off_prod).ok();
    for (flat, series) in full.iter().enumerate() {
        for (i, c) in series.iter().enumerate() {
            let s_exp = off_prod + i as i64;
            if s_exp >= 0 {
                break;
            }
            let v = ctx.ord(c);
            if v < floor.min(ctx.nw) {
                let _ = flat;
                return Err(Error::NegativeCoefficientNonzero {
                    index: s_exp,
                    valuation: i64::from(v) - total_shift as i64,
                });
            }
        }
    }
    let known_abs = (n_out as u64 + total_shift).min(u64::from(ctx.nw)) as u32;
    let fr0 = Matrix::from_fn(r, r, |i, j| {
        let series = &full[i * r + j];
        let payload = match zero_idx {
            Some(idx) if idx < series.len() => series[idx].clone(),
            _ => BigUint::zero(),
        };
        PadicScalar::from_payload(&ctx, &payload, total_shift as i64, known_abs)
    });

    // Invertibility: det Fr₀ must be nonzero to working precision.
    let det = det_rat(&Matrix::from_fn(r, r, |i, j| {
        let series = &full[i * r + j];
        let payload = match zero_idx {
            Some(idx) if idx < series.len() => series[idx].clone(),
            _ => BigUint::zero(),
        };
        Rat::from_integer(ctx.centered_mod(&payload, ctx.nw))
    }));
    let det_ok = !det.is_zero()
        && i64::from(ord_p_bigint(p, &det.to_integer()))
            < i64::from(ctx.nw) - (r as i64) * total_shift as i64 - 4;
    if !det_ok {
        return Err(Error::Singular);
    }

    // N₀·Fr₀ = p·Fr₀·N₀ to the achieved precision (N₀ is exact rational).
    let n0_ord = norm
        .n0
        .data()
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| rat_ord_p(p, c))
        .min()
        .unwrap_or(0)
        .min(0);
    let margin = 4 + (-n0_ord) as u32;
    let thresh = i64::from(plan.n_target.min(n_out).saturating_sub(margin));
    let rel = n_out + 8;
    let n0s = norm.n0.map(|c| PadicScalar::from_rat(p, c, rel));
    let p_rat = PadicScalar::from_rat(p, &Rat::from_integer(BigInt::from(p)), rel);
    for i in 0..r {
        for j in 0..r {
            let mut lhs = PadicScalar::exact_zero(p);
            let mut rhs = PadicScalar::exact_zero(p);
            for l in 0..r {
                lhs = lhs.add(&n0s[(i, l)].mul(&fr0[(l, j)]));
                rhs = rhs.add(&fr0[(i, l)].mul(&n0s[(l, j)]));
            }
            let diff = lhs.sub(&rhs.mul(&p_rat));
            if let Some(v) = diff.valuation() {
                if v < thresh {
                    return Err(Error::ResidualCheckFailed {
                        achieved: v,
                        required: thresh,
                    });
                }
            }
        }
    }

    Ok(LimitingFrobenius {
        fr0,
        e,
        n_ach: n_out,
    })
}

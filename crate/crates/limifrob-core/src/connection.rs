//! Normalization of a Gauss–Manin connection at the origin: regularization to
//! a simple pole, ramified pullback t = s^e, and shearing of the residue to
//! nilpotency.
//!
//! Conventions.  A connection matrix M acts on coordinate columns through
//! ∇ = d/dt + M, so horizontal sections satisfy x′ = −M·x.  A change of
//! coordinates y = H·x transports M to H·M·H⁻¹ − (dH/dt)·H⁻¹; every gauge
//! matrix produced here is reported in that orientation, together with its
//! inverse.  Gauges are Laurent-polynomial matrices, so they never introduce
//! poles away from the origin.

use crate::algebra::charpoly::rational_eigenvalues;
use crate::algebra::solve::{column_space, det_rat, invert_rat, nullspace};
use crate::algebra::{LaurentPoly, Matrix, Rat, RatFunc, UniPoly};
use crate::error::Error;
use crate::Result;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// The connection brought to its limiting normal form at the origin.
///
/// In the coordinate `s` with `t = s^e`, the matrix `nprime` has at most a
/// simple pole at `s = 0` and its residue `n0` is nilpotent.  The cumulative
/// change of coordinates from the input frame (pulled back to `s`) is `h`,
/// with `h_inv` its exact inverse; both are invertible over ℚ[s, s⁻¹], so
/// `det h` is a nonzero rational multiple of a power of `s`.
pub struct NormalizedConnection {
    pub e: u64,
    pub h: Matrix<LaurentPoly>,
    pub h_inv: Matrix<LaurentPoly>,
    pub nprime: Matrix<RatFunc>,
    pub n0: Matrix<Rat>,
}

impl NormalizedConnection {
    /// Smallest k ≥ 1 with `n0`^k = 0.
    pub fn nilpotency_index(&self) -> usize {
        let r = self.n0.rows();
        let mut pow = self.n0.clone();
        for k in 1..=r {
            if pow.is_zero_matrix() {
                return k;
            }
            pow = pow.mul(&self.n0);
        }
        unreachable!("sheared residue must be nilpotent within the dimension")
    }
}

// ---------------------------------------------------------------------------
// Laurent/rational-function glue.
// ---------------------------------------------------------------------------

/// `s^k` as a rational function, for `k` of either sign.
fn rat_monomial(k: i64) -> RatFunc {
    if k >= 0 {
        RatFunc::from_poly(UniPoly::monomial(Rat::one(), k as usize))
    } else {
        RatFunc::new(UniPoly::one(), UniPoly::monomial(Rat::one(), (-k) as usize))
    }
}

/// A Laurent polynomial viewed inside ℚ(s).
pub fn laurent_to_ratfunc(l: &LaurentPoly) -> RatFunc {
    match l.valuation() {
        None => RatFunc::zero(),
        Some(v) => RatFunc::from_poly(l.base().clone()).mul(&rat_monomial(v)),
    }
}

fn laurent_matrix_to_ratfunc(m: &Matrix<LaurentPoly>) -> Matrix<RatFunc> {
    m.map(laurent_to_ratfunc)
}

/// Largest pole order at the origin over all entries (0 when regular there).
pub fn matrix_pole_order(m: &Matrix<RatFunc>) -> i64 {
    m.data()
        .iter()
        .map(RatFunc::pole_order_at_zero)
        .max()
        .unwrap_or(0)
}

/// Residue at the origin of a matrix with at most a simple pole there.
pub fn residue_at_zero(m: &Matrix<RatFunc>) -> Matrix<Rat> {
    assert!(
        matrix_pole_order(m) <= 1,
        "residue extraction requires at most a simple pole at the origin"
    );
    let s = rat_monomial(1);
    m.map(|entry| {
        entry
            .mul(&s)
            .eval(&Rat::zero())
            .expect("s·entry is regular at 0 when the pole is at most simple")
    })
}

/// Transport of a connection matrix under the coordinate change y = H·x:
/// returns H·M·H⁻¹ − (dH/ds)·H⁻¹, computed exactly over ℚ(s).
pub fn gauge_transport(
    h: &Matrix<LaurentPoly>,
    h_inv: &Matrix<LaurentPoly>,
    m: &Matrix<RatFunc>,
) -> Matrix<RatFunc> {
    let hr = laurent_matrix_to_ratfunc(h);
    let hir = laurent_matrix_to_ratfunc(h_inv);
    let dh = hr.map(RatFunc::derivative);
    hr.mul(m).mul(&hir).sub(&dh.mul(&hir))
}

fn mat_pow(m: &Matrix<Rat>, k: usize) -> Matrix<Rat> {
    let mut acc = Matrix::<Rat>::identity(m.rows());
    for _ in 0..k {
        acc = acc.mul(m);
    }
    acc
}

// ---------------------------------------------------------------------------
// Laurent factorization.
// ---------------------------------------------------------------------------

/// Splits an invertible matrix over ℚ(s) as G = L·H where H is invertible
/// over ℚ[s, s⁻¹] and L is pole-free at the origin with L(0) invertible.
///
/// Returns (H, H⁻¹).  The loop alternates two column operations: scaling each
/// column to valuation exactly 0 by a monomial, and — whenever the matrix of
/// constant terms is singular — replacing one column by the kernel
/// combination, which raises its valuation.  Each pass lowers the order of
/// det at the origin by at least one while keeping it nonnegative, so an
/// invertible input terminates; inputs that exhaust the (generous) budget are
/// singular.
pub fn laurent_factorize(
    g: &Matrix<RatFunc>,
) -> Result<(Matrix<LaurentPoly>, Matrix<LaurentPoly>)> {
    assert!(g.is_square(), "factorization requires a square matrix");
    let r = g.rows();
    let mut l = g.clone();
    let mut h: Matrix<LaurentPoly> = Matrix::identity(r);
    let mut h_inv: Matrix<LaurentPoly> = Matrix::identity(r);

    // ord₀ det(G) ≤ deg of the determinant numerator plus the denominator
    // order, both bounded by the total entry size; the budget over-counts it.
    let mut budget: i64 = 64 + 16 * r as i64;
    for entry in g.data() {
        if !entry.is_zero() {
            budget += entry
                .valuation_at_zero()
                .expect("nonzero rational function has a valuation")
                .abs()
                + entry.numer().degree_or_zero() as i64
                + entry.denom().degree_or_zero() as i64;
        }
    }

    loop {
        // Normalize every column to valuation exactly 0.
        for j in 0..r {
            let vj = (0..r)
                .filter_map(|i| l[(i, j)].valuation_at_zero())
                .min();
            let Some(vj) = vj else {
                return Err(Error::Singular);
            };
            if vj != 0 {
                let mono = rat_monomial(-vj);
                for i in 0..r {
                    l[(i, j)] = l[(i, j)].mul(&mono);
                }
                // l absorbed D = diag(…, s^(−vj), …) on the right, so H gains
                // D⁻¹ on the left and H⁻¹ gains D on the right.
                for k in 0..r {
                    h[(j, k)] = h[(j, k)].shift(vj);
                    h_inv[(k, j)] = h_inv[(k, j)].shift(-vj);
                }
            }
        }

        let l0 = Matrix::from_fn(r, r, |i, j| {
            l[(i, j)]
                .eval(&Rat::zero())
                .expect("column-normalized entry is regular at 0")
        });
        if !det_rat(&l0).is_zero() {
            return Ok((h, h_inv));
        }

        // Combine columns along a kernel vector of the constant terms; the
        // resulting column vanishes at 0, so its valuation rises.
        let null = nullspace(&l0);
        let mut u = null.column(0);
        let m = (0..r)
            .rev()
            .find(|&i| !u[i].is_zero())
            .expect("kernel vector of a singular matrix is nonzero");
        let pivot = u[m].clone();
        for c in u.iter_mut() {
            *c /= &pivot;
        }

        let new_col: Vec<RatFunc> = (0..r)
            .map(|i| {
                let mut acc = RatFunc::zero();
                for (j, uj) in u.iter().enumerate() {
                    if !uj.is_zero() {
                        acc = acc.add(&l[(i, j)].scale(uj));
                    }
                }
                acc
            })
            .collect();
        for i in 0..r {
            l[(i, m)] = new_col[i].clone();
        }
        // l absorbed O = (identity with column m := u) on the right; update
        // H ← O⁻¹·H (rows i ≠ m lose u_i·row_m) and H⁻¹ ← H⁻¹·O.
        for i in 0..r {
            if i == m || u[i].is_zero() {
                continue;
            }
            let ui = u[i].clone();
            for k in 0..r {
                let correction = h[(m, k)].scale(&ui);
                h[(i, k)] = h[(i, k)].sub(&correction);
            }
        }
        let inv_col: Vec<LaurentPoly> = (0..r)
            .map(|i| {
                let mut acc = LaurentPoly::zero();
                for (j, uj) in u.iter().enumerate() {
                    if !uj.is_zero() {
                        acc = acc.add(&h_inv[(i, j)].scale(uj));
                    }
                }
                acc
            })
            .collect();
        for i in 0..r {
            h_inv[(i, m)] = inv_col[i].clone();
        }

        budget -= 1;
        if budget < 0 {
            return Err(Error::Singular);
        }
    }
}

// ---------------------------------------------------------------------------
// Regularization.
// ---------------------------------------------------------------------------

/// θv = t·(dv/dt + N·v), the logarithmic derivative along the connection.
fn theta_apply(n: &Matrix<RatFunc>, v: &[RatFunc]) -> Vec<RatFunc> {
    let t = rat_monomial(1);
    let nv = n.mul_vec(v);
    v.iter()
        .zip(nv)
        .map(|(vi, nvi)| vi.derivative().add(&nvi).mul(&t))
        .collect()
}

/// Columns c, θc, …, θ^(r−1)c.
fn cyclic_matrix(n: &Matrix<RatFunc>, c: &[RatFunc]) -> Matrix<RatFunc> {
    let r = n.rows();
    let mut cols: Vec<Vec<RatFunc>> = Vec::with_capacity(r);
    cols.push(c.to_vec());
    for k in 1..r {
        let next = theta_apply(n, &cols[k - 1]);
        cols.push(next);
    }
    Matrix::from_fn(r, r, |i, j| cols[j][i].clone())
}

/// Sound invertibility witness: a nonzero determinant value at any sample
/// point certifies det ≢ 0.  Returning false merely skips a candidate.
fn certified_invertible(m: &Matrix<RatFunc>) -> bool {
    for t0 in [2i64, 3, 5, 7, 11, 13, 17, 23] {
        let x = Rat::from_integer(BigInt::from(t0));
        let values: Option<Vec<Rat>> = m.data().iter().map(|entry| entry.eval(&x)).collect();
        let Some(values) = values else { continue };
        let value_matrix = Matrix::from_vec(m.rows(), m.cols(), values);
        if !det_rat(&value_matrix).is_zero() {
            return true;
        }
    }
    false
}

/// Deterministic cyclic-vector candidates: standard basis vectors first, then
/// degree-one pairs e_i + t·e_j, then the two power ladders Σ tⁱ·e_i.
fn cyclic_candidates(r: usize) -> Vec<Vec<RatFunc>> {
    let mut out: Vec<Vec<RatFunc>> = Vec::new();
    let unit = |i: usize| -> Vec<RatFunc> {
        (0..r)
            .map(|k| if k == i { RatFunc::one() } else { RatFunc::zero() })
            .collect()
    };
    for i in 0..r {
        out.push(unit(i));
    }
    let t = rat_monomial(1);
    for i in 0..r {
        for j in 0..r {
            if i == j {
                continue;
            }
            let mut c = unit(i);
            c[j] = t.clone();
            out.push(c);
        }
    }
    if r > 1 {
        out.push((0..r).map(|i| rat_monomial(i as i64)).collect());
        out.push((0..r).map(|i| rat_monomial((r - 1 - i) as i64)).collect());
    }
    out
}

/// Gauges the connection to at most a simple pole at the origin.
///
/// Returns (H₁, H₁⁻¹, N_reg) with N_reg = H₁NH₁⁻¹ − (dH₁/dt)H₁⁻¹.  A matrix
/// already regular at the origin passes through untouched.  Otherwise a
/// cyclic vector c for θ = t·∇ is located, and the frame matrix
/// C = [c | θc | … | θ^(r−1)c] is Laurent-factored from the left — writing
/// C = H′·L′ with L′ pole-free and invertible at 0 — so that H₁ := H′⁻¹
/// differs from the cyclic frame C⁻¹ only by the benign factor L′⁻¹.  In the
/// cyclic frame the θ-matrix is a companion matrix with coefficients regular
/// at the origin exactly when the singularity is regular, which makes the
/// d/dt-matrix simple-pole there; the final pole order is re-checked exactly
/// and a violation is reported as an irregular singularity.
pub fn regularize(
    n: &Matrix<RatFunc>,
) -> Result<(Matrix<LaurentPoly>, Matrix<LaurentPoly>, Matrix<RatFunc>)> {
    assert!(n.is_square(), "connection matrix must be square");
    let r = n.rows();
    if matrix_pole_order(n) <= 1 {
        return Ok((Matrix::identity(r), Matrix::identity(r), n.clone()));
    }

    for candidate in cyclic_candidates(r) {
        let cm = cyclic_matrix(n, &candidate);
        if !certified_invertible(&cm) {
            continue;
        }
        // Row-factor C = H′·L′ by column-factoring the transpose.
        let (hhat, hhat_inv) = laurent_factorize(&cm.transpose())?;
        let h1 = hhat_inv.transpose();
        let h1_inv = hhat.transpose();
        let n_reg = gauge_transport(&h1, &h1_inv, n);
        let order = matrix_pole_order(&n_reg);
        if order <= 1 {
            return Ok((h1, h1_inv, n_reg));
        }
        // The verdict is independent of the particular cyclic vector: the
        // companion coefficients are regular for every cyclic frame exactly
        // when the singularity is regular.
        return Err(Error::NotRegular { pole_order: order });
    }
    Err(Error::NoCyclicVectorFound)
}

// ---------------------------------------------------------------------------
// Ramification and pullback.
// ---------------------------------------------------------------------------

/// Least e ≥ 1 such that every residue eigenvalue of e·N_reg(s^e)·e·s^(e−1)…
/// is an integer: the lcm of the denominators of the residue's (rational)
/// eigenvalues.  Minimality holds because each reduced denominator divides e.
pub fn ramification_index(n_reg: &Matrix<RatFunc>) -> Result<u64> {
    assert!(
        matrix_pole_order(n_reg) <= 1,
        "ramification index requires a simple pole at the origin"
    );
    let res = residue_at_zero(n_reg);
    let eigen = rational_eigenvalues(&res)?;
    let mut e = BigInt::one();
    for lam in &eigen {
        e = e.lcm(lam.denom());
    }
    Ok(e.to_u64().expect("ramification index fits a machine word"))
}

/// Substitutes t = s^e: returns e·s^(e−1)·N_reg(s^e).  The residue at the
/// origin becomes exactly e times the original residue matrix.
pub fn pullback(n_reg: &Matrix<RatFunc>, e: u64) -> Matrix<RatFunc> {
    if e == 1 {
        return n_reg.clone();
    }
    let factor = RatFunc::from_poly(UniPoly::monomial(
        Rat::from_integer(BigInt::from(e)),
        (e - 1) as usize,
    ));
    n_reg.map(|entry| entry.subst_pow(e as usize).mul(&factor))
}

// ---------------------------------------------------------------------------
// Shearing.
// ---------------------------------------------------------------------------

fn integer_eigenvalues(res: &Matrix<Rat>) -> Result<Vec<BigInt>> {
    rational_eigenvalues(res)?
        .into_iter()
        .map(|lam| {
            if lam.is_integer() {
                Ok(lam.to_integer())
            } else {
                Err(Error::NonIntegerEigenvalue {
                    value: lam.to_string(),
                })
            }
        })
        .collect()
}

/// Spectral projector onto the generalized λ-eigenspace of `res`, along the
/// sum of the other generalized eigenspaces.  Exact over ℚ; requires the
/// characteristic polynomial to split (guaranteed when all eigenvalues are
/// integers).
fn spectral_projector(res: &Matrix<Rat>, lam: &BigInt) -> Matrix<Rat> {
    let r = res.rows();
    let lam_rat = Rat::from_integer(lam.clone());
    let mut a = res.clone();
    for i in 0..r {
        a[(i, i)] -= &lam_rat;
    }
    let apow = mat_pow(&a, r);
    let kernel = nullspace(&apow);
    let image = column_space(&apow);
    let k = kernel.cols();
    let basis = kernel.hstack(&image);
    let basis_inv = invert_rat(&basis)
        .expect("generalized eigenspaces of a split rational matrix span the space");
    Matrix::from_fn(r, r, |i, j| {
        let mut acc = Rat::zero();
        for c in 0..k {
            acc += basis[(i, c)].clone() * basis_inv[(c, j)].clone();
        }
        acc
    })
}

/// Drives all (integer) residue eigenvalues to zero with shearing gauges.
///
/// Each step targets one extremal eigenvalue λ — the largest positive one if
/// any, otherwise the smallest negative one — and applies H = s^(±1)·P + (I−P)
/// with P the generalized-eigenspace projector of λ.  Under the transport law
/// M ↦ HMH⁻¹ − H′H⁻¹ this shifts the λ-block's eigenvalue one step toward 0
/// and leaves the other eigenvalues fixed, so the total number of steps is at
/// most Σ|λᵢ|.  Eigenspaces are recomputed from the fresh residue each step.
///
/// Returns (H₂, H₂⁻¹, N′) with N′ simple-pole and nilpotent residue.
pub fn shear_to_nilpotent(
    n_int: &Matrix<RatFunc>,
) -> Result<(Matrix<LaurentPoly>, Matrix<LaurentPoly>, Matrix<RatFunc>)> {
    assert!(
        matrix_pole_order(n_int) <= 1,
        "shearing requires a simple pole at the origin"
    );
    let r = n_int.rows();
    let mut m = n_int.clone();
    let mut h2: Matrix<LaurentPoly> = Matrix::identity(r);
    let mut h2_inv: Matrix<LaurentPoly> = Matrix::identity(r);

    let initial = integer_eigenvalues(&residue_at_zero(&m))?;
    let mut budget: i64 = initial
        .iter()
        .map(|lam| lam.abs().to_i64().expect("eigenvalue fits a machine word"))
        .sum();

    loop {
        let res = residue_at_zero(&m);
        let eigen = integer_eigenvalues(&res)?;
        let positive = eigen.iter().filter(|lam| lam.is_positive()).max();
        let target = match positive {
            Some(lam) => lam.clone(),
            None => match eigen.iter().filter(|lam| lam.is_negative()).min() {
                Some(lam) => lam.clone(),
                None => break,
            },
        };

        let p = spectral_projector(&res, &target);
        let direction: i64 = if target.is_positive() { 1 } else { -1 };
        let step = Matrix::from_fn(r, r, |i, j| {
            let pij = p[(i, j)].clone();
            let qij = if i == j {
                Rat::one() - pij.clone()
            } else {
                -pij.clone()
            };
            LaurentPoly::monomial(pij, direction).add(&LaurentPoly::constant(qij))
        });
        let step_inv = Matrix::from_fn(r, r, |i, j| {
            let pij = p[(i, j)].clone();
            let qij = if i == j {
                Rat::one() - pij.clone()
            } else {
                -pij.clone()
            };
            LaurentPoly::monomial(pij, -direction).add(&LaurentPoly::constant(qij))
        });

        m = gauge_transport(&step, &step_inv, &m);
        assert!(
            matrix_pole_order(&m) <= 1,
            "shearing along a spectral projector must preserve the simple pole"
        );
        h2 = step.mul(&h2);
        h2_inv = h2_inv.mul(&step_inv);

        budget -= 1;
        assert!(
            budget >= 0,
            "shearing must terminate within the total eigenvalue budget"
        );
    }

    Ok((h2, h2_inv, m))
}

// ---------------------------------------------------------------------------
// End-to-end normalization.
// ---------------------------------------------------------------------------

/// Full normalization pipeline: regularize, compute the ramification index,
/// pull back t = s^e, and shear the residue to nilpotency.  The cumulative
/// gauge H(s) = H₂(s)·H₁(s^e) satisfies, exactly over ℚ(s),
/// `nprime = H·Ñ·H⁻¹ − (dH/ds)·H⁻¹` where Ñ = e·s^(e−1)·N(s^e).
pub fn normalize(n: &Matrix<RatFunc>) -> Result<NormalizedConnection> {
    let (h1, h1_inv, n_reg) = regularize(n)?;
    let e = ramification_index(&n_reg)?;
    let n_pulled = pullback(&n_reg, e);
    let h1s = h1.map(|entry| entry.subst_pow(e as i64));
    let h1s_inv = h1_inv.map(|entry| entry.subst_pow(e as i64));
    let (h2, h2_inv, nprime) = shear_to_nilpotent(&n_pulled)?;

    let h = h2.mul(&h1s);
    let h_inv = h1s_inv.mul(&h2_inv);
    let n0 = residue_at_zero(&nprime);
    assert!(
        mat_pow(&n0, n0.rows()).is_zero_matrix(),
        "sheared residue must be nilpotent"
    );
    Ok(NormalizedConnection {
        e,
        h,
        h_inv,
        nprime,
        n0,
    })
}

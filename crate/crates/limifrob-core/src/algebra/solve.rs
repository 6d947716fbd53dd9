//! Exact linear algebra: Gaussian elimination over ℚ, fraction-free Bareiss
//! elimination over ℚ[t] for systems with rational-function entries, and the
//! subspace lattice operations (kernel, image, sum, intersection) used by the
//! monodromy filtration.

use super::matrix::Matrix;
use super::poly::UniPoly;
use super::ratfunc::RatFunc;
use super::Rat;
use crate::{Error, Result};
use num_traits::{One, Zero};

// ---------------------------------------------------------------------------
// Dense exact elimination over ℚ.
// ---------------------------------------------------------------------------

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Matrix<Rat>) -> Vec<usize> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        m.swap_rows(r, pr);
        let inv = m[(r, c)].clone().recip();
        for j in c..cols {
            let v = m[(r, j)].clone() * &inv;
            m[(r, j)] = v;
        }
        for i in 0..rows {
            if i != r && !m[(i, c)].is_zero() {
                let f = m[(i, c)].clone();
                for j in c..cols {
                    let v = m[(i, j)].clone() - &f * &m[(r, j)];
                    m[(i, j)] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix<Rat>) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// One solution of `A·x = b` over ℚ (free variables set to zero), or `None`
/// when inconsistent.
pub fn solve_rat(a: &Matrix<Rat>, b: &[Rat]) -> Option<Vec<Rat>> {
    assert_eq!(a.rows(), b.len(), "rhs length mismatch");
    let mut aug = Matrix::from_fn(a.rows(), a.cols() + 1, |i, j| {
        if j < a.cols() {
            a[(i, j)].clone()
        } else {
            b[i].clone()
        }
    });
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&a.cols()) {
        return None; // pivot in the rhs column: inconsistent
    }
    let mut x = vec![Rat::zero(); a.cols()];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[(r, a.cols())].clone();
    }
    Some(x)
}

/// Inverse of a square rational matrix, or `None` if singular.
pub fn invert_rat(a: &Matrix<Rat>) -> Option<Matrix<Rat>> {
    assert!(a.is_square(), "inverse of a non-square matrix");
    let n = a.rows();
    let mut aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            a[(i, j)].clone()
        } else if j - n == i {
            Rat::one()
        } else {
            Rat::zero()
        }
    });
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.submatrix(0..n, n..2 * n))
}

/// Determinant over ℚ by elimination.
pub fn det_rat(a: &Matrix<Rat>) -> Rat {
    assert!(a.is_square());
    let n = a.rows();
    let mut m = a.clone();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
            return Rat::zero();
        };
        if pr != c {
            m.swap_rows(c, pr);
            det = -det;
        }
        det *= &m[(c, c)];
        let inv = m[(c, c)].clone().recip();
        for i in c + 1..n {
            if m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone() * &inv;
            for j in c..n {
                let v = m[(i, j)].clone() - &f * &m[(c, j)];
                m[(i, j)] = v;
            }
        }
    }
    det
}

// ---------------------------------------------------------------------------
// Subspace lattice over ℚ.  Subspaces are represented by matrices whose
// columns span them.
// ---------------------------------------------------------------------------

/// Basis (as columns) of the kernel of `a`.
pub fn nullspace(a: &Matrix<Rat>) -> Matrix<Rat> {
    let mut m = a.clone();
    let pivots = rref(&mut m);
    let n = a.cols();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Matrix::zero(n, free.len());
    for (k, &fc) in free.iter().enumerate() {
        basis[(fc, k)] = Rat::one();
        for (r, &pc) in pivots.iter().enumerate() {
            basis[(pc, k)] = -m[(r, fc)].clone();
        }
    }
    basis
}

/// Basis (as columns) of the column space of `a`.
pub fn column_space(a: &Matrix<Rat>) -> Matrix<Rat> {
    let mut m = a.clone();
    let pivots = rref(&mut m);
    a.select_columns(&pivots)
}

/// Sum of two column-span subspaces of the same ambient space.
pub fn sum_spaces(u: &Matrix<Rat>, v: &Matrix<Rat>) -> Matrix<Rat> {
    assert_eq!(u.rows(), v.rows(), "ambient dimension mismatch");
    column_space(&u.hstack(v))
}

/// Intersection of two column-span subspaces of the same ambient space.
pub fn intersect_spaces(u: &Matrix<Rat>, v: &Matrix<Rat>) -> Matrix<Rat> {
    assert_eq!(u.rows(), v.rows(), "ambient dimension mismatch");
    if u.cols() == 0 || v.cols() == 0 {
        return Matrix::zero(u.rows(), 0);
    }
    // Solutions of U·x = V·y give intersection vectors U·x.
    let stacked = u.hstack(&v.neg());
    let null = nullspace(&stacked);
    let x_part = null.submatrix(0..u.cols(), 0..null.cols());
    column_space(&u.mul(&x_part))
}

/// Does the span of `u` contain the span of `v`?
pub fn contains_space(u: &Matrix<Rat>, v: &Matrix<Rat>) -> bool {
    (0..v.cols()).all(|j| solve_rat(u, &v.column(j)).is_some())
}

// ---------------------------------------------------------------------------
// Fraction-free solving over ℚ(t).
// ---------------------------------------------------------------------------

/// One solution of `A·x = b` with entries in ℚ(t), or [`Error::NoSolution`].
///
/// Rows are cleared to polynomial form, eliminated by fraction-free Bareiss
/// steps (pivot choice: lowest degree, then lowest row index — deterministic),
/// and back-substituted exactly.  Free variables are set to zero.  The
/// returned solution is re-verified against the original system.
pub fn solve_linear(a: &Matrix<RatFunc>, b: &[RatFunc]) -> Result<Vec<RatFunc>> {
    if a.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "system has {} rows but rhs has {} entries",
            a.rows(),
            b.len()
        )));
    }
    let polys = clear_rows(a, b);
    let x = solve_poly_system(polys, a.cols())?;
    // Exact post-check on the original rational-function system.
    for i in 0..a.rows() {
        let mut acc = RatFunc::zero();
        for j in 0..a.cols() {
            if !a[(i, j)].is_zero() && !x[j].is_zero() {
                acc = acc.add(&a[(i, j)].mul(&x[j]));
            }
        }
        if acc.sub(&b[i]) != RatFunc::zero() {
            return Err(Error::NoSolution);
        }
    }
    Ok(x)
}

/// Clears denominators row by row, producing the augmented polynomial matrix.
fn clear_rows(a: &Matrix<RatFunc>, b: &[RatFunc]) -> Matrix<UniPoly<Rat>> {
    Matrix::from_fn(a.rows(), a.cols() + 1, |i, j| {
        // lcm of denominators in row i (including the rhs).
        let mut l = UniPoly::<Rat>::one();
        for k in 0..a.cols() {
            let d = a[(i, k)].denom();
            l = l.mul(&d.div_exact(&super::ratfunc::rat_poly_gcd(&l, d)));
        }
        let db = b[i].denom();
        l = l.mul(&db.div_exact(&super::ratfunc::rat_poly_gcd(&l, db)));
        let entry = if j < a.cols() { &a[(i, j)] } else { &b[i] };
        entry.numer().mul(&l.div_exact(entry.denom()))
    })
}

/// Forward Bareiss elimination and exact back-substitution on an augmented
/// polynomial matrix (last column = rhs).  `ncols` is the number of unknowns.
fn solve_poly_system(mut m: Matrix<UniPoly<Rat>>, ncols: usize) -> Result<Vec<RatFunc>> {
    let rows = m.rows();
    let mut prev = UniPoly::<Rat>::one();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut r = 0;
    for c in 0..ncols {
        if r == rows {
            break;
        }
        // Deterministic pivot: minimal degree, then minimal row index.
        let Some(pr) = (r..rows)
            .filter(|&i| !m[(i, c)].is_zero())
            .min_by_key(|&i| (m[(i, c)].degree_or_zero(), i))
        else {
            continue;
        };
        m.swap_rows(r, pr);
        let pivot = m[(r, c)].clone();
        for i in r + 1..rows {
            if m[(i, c)].is_zero() {
                // Still renormalize by the Bareiss rule to keep the division
                // pattern consistent.
                for j in c + 1..=ncols {
                    let v = m[(i, j)].mul(&pivot).div_exact(&prev);
                    m[(i, j)] = v;
                }
            } else {
                let f = m[(i, c)].clone();
                for j in c + 1..=ncols {
                    let v = m[(i, j)]
                        .mul(&pivot)
                        .sub(&f.mul(&m[(r, j)]))
                        .div_exact(&prev);
                    m[(i, j)] = v;
                }
            }
            m[(i, c)] = UniPoly::zero();
        }
        prev = pivot;
        pivots.push((r, c));
        r += 1;
    }
    // Consistency: a zero row with nonzero rhs means no solution.
    for i in r..rows {
        if !m[(i, ncols)].is_zero() {
            return Err(Error::NoSolution);
        }
    }
    // Back-substitution in ℚ(t); free variables are zero.
    let mut x = vec![RatFunc::zero(); ncols];
    for &(pr, pc) in pivots.iter().rev() {
        let mut acc = RatFunc::from_poly(m[(pr, ncols)].clone());
        for j in pc + 1..ncols {
            if !m[(pr, j)].is_zero() && !x[j].is_zero() {
                acc = acc.sub(&RatFunc::from_poly(m[(pr, j)].clone()).mul(&x[j]));
            }
        }
        x[pc] = acc.div(&RatFunc::from_poly(m[(pr, pc)].clone()));
    }
    Ok(x)
}

/// Determinant of a square matrix over ℚ[t] by fraction-free Bareiss
/// elimination.
pub fn det_poly(a: &Matrix<UniPoly<Rat>>) -> UniPoly<Rat> {
    assert!(a.is_square());
    let n = a.rows();
    if n == 0 {
        return UniPoly::one();
    }
    let mut m = a.clone();
    let mut prev = UniPoly::<Rat>::one();
    let mut sign = false;
    for c in 0..n {
        let Some(pr) = (c..n)
            .filter(|&i| !m[(i, c)].is_zero())
            .min_by_key(|&i| (m[(i, c)].degree_or_zero(), i))
        else {
            return UniPoly::zero();
        };
        if pr != c {
            m.swap_rows(c, pr);
            sign = !sign;
        }
        let pivot = m[(c, c)].clone();
        for i in c + 1..n {
            let f = m[(i, c)].clone();
            for j in c + 1..n {
                let v = m[(i, j)]
                    .mul(&pivot)
                    .sub(&f.mul(&m[(c, j)]))
                    .div_exact(&prev);
                m[(i, j)] = v;
            }
            m[(i, c)] = UniPoly::zero();
        }
        prev = pivot;
    }
    // After full Bareiss elimination the last pivot is the determinant.
    let det = m[(n - 1, n - 1)].clone();
    if sign {
        det.neg()
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rint};

    fn mr(rows: usize, cols: usize, v: &[i64]) -> Matrix<Rat> {
        Matrix::from_vec(rows, cols, v.iter().map(|&c| rint(c)).collect())
    }

    #[test]
    fn solve_matches_cramer_on_3x3() {
        // Oracle: Cramer's rule on an invertible 3x3 system.
        let a = mr(3, 3, &[2, 1, -1, -3, -1, 2, -2, 1, 2]);
        let b = [rint(8), rint(-11), rint(-3)];
        let det = det_rat(&a);
        let mut expected = Vec::new();
        for j in 0..3 {
            let mut aj = a.clone();
            for i in 0..3 {
                aj[(i, j)] = b[i].clone();
            }
            expected.push(det_rat(&aj) / &det);
        }
        assert_eq!(solve_rat(&a, &b).unwrap(), expected);
        assert_eq!(expected, vec![rint(2), rint(3), rint(-1)]);
    }

    #[test]
    fn inconsistent_system_detected() {
        let a = mr(2, 2, &[1, 1, 2, 2]);
        assert!(solve_rat(&a, &[rint(1), rint(3)]).is_none());
        assert!(solve_rat(&a, &[rint(1), rint(2)]).is_some());
    }

    #[test]
    fn inverse_round_trips() {
        let a = mr(3, 3, &[1, 2, 0, 0, 1, 3, 4, 0, 1]);
        let inv = invert_rat(&a).unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(3));
        assert!(invert_rat(&mr(2, 2, &[1, 2, 2, 4])).is_none());
    }

    #[test]
    fn nullspace_is_killed_by_matrix() {
        let a = mr(2, 4, &[1, 2, 3, 4, 2, 4, 6, 8]);
        let ns = nullspace(&a);
        assert_eq!(ns.cols(), 3);
        let prod = a.mul(&ns);
        assert!(prod.is_zero_matrix());
    }

    #[test]
    fn subspace_lattice_small_example() {
        // U = span{e1, e2}, V = span{e2, e3} in Q^3.
        let u = mr(3, 2, &[1, 0, 0, 1, 0, 0]);
        let v = mr(3, 2, &[0, 0, 1, 0, 0, 1]);
        let inter = intersect_spaces(&u, &v);
        assert_eq!(inter.cols(), 1);
        assert!(contains_space(&v, &inter));
        assert!(contains_space(&u, &inter));
        let s = sum_spaces(&u, &v);
        assert_eq!(s.cols(), 3);
    }

    #[test]
    fn rational_function_system_from_cramer() {
        use crate::algebra::UniPoly;
        // A = [[t, 1], [1, t]], b = [1, 0]  ⇒  x = (t/(t²−1), −1/(t²−1)).
        let t = RatFunc::from_poly(UniPoly::x());
        let one = RatFunc::one();
        let a = Matrix::from_vec(
            2,
            2,
            vec![t.clone(), one.clone(), one.clone(), t.clone()],
        );
        let b = [RatFunc::one(), RatFunc::zero()];
        let x = solve_linear(&a, &b).unwrap();
        let den = t.mul(&t).sub(&one);
        assert_eq!(x[0], t.div(&den));
        assert_eq!(x[1], one.neg().div(&den));
    }

    #[test]
    fn underdetermined_takes_free_vars_zero() {
        let t = RatFunc::from_poly(crate::algebra::UniPoly::x());
        let a = Matrix::from_vec(1, 2, vec![t.clone(), RatFunc::one()]);
        let x = solve_linear(&a, &[RatFunc::one()]).unwrap();
        // Columns are eliminated left to right, so x0 carries the pivot and
        // x1 is a free variable pinned to zero: x0 = 1/t, x1 = 0.
        assert_eq!(x[0], RatFunc::one().div(&t));
        assert_eq!(x[1], RatFunc::zero());
    }

    #[test]
    fn det_poly_matches_expansion() {
        use crate::algebra::UniPoly;
        let t = UniPoly::<Rat>::x();
        let one = UniPoly::one();
        // det [[t, 1], [1, t]] = t² − 1.
        let m = Matrix::from_vec(2, 2, vec![t.clone(), one.clone(), one.clone(), t.clone()]);
        assert_eq!(det_poly(&m), t.mul(&t).sub(&one));
    }

    #[test]
    fn shape_mismatch_reported() {
        let a = Matrix::<RatFunc>::identity(2);
        let b = [RatFunc::one()];
        assert!(matches!(
            solve_linear(&a, &b),
            Err(crate::Error::DimensionMismatch(_))
        ));
    }

    proptest::proptest! {
        #![proptest_config(proptest::test_runner::Config::with_cases(24))]
        #[test]
        fn random_consistent_systems_solve(seed in 0u64..1000) {
            // Build A (3x3, small integer entries) and x, then solve A·x = A·x.
            let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) % 7) as i64 - 3
            };
            let a = Matrix::from_fn(3, 3, |_, _| rat(next(), 1));
            let x: Vec<Rat> = (0..3).map(|_| rat(next(), 1)).collect();
            let b = a.mul_vec(&x);
            if let Some(sol) = solve_rat(&a, &b) {
                let back = a.mul_vec(&sol);
                proptest::prop_assert_eq!(back, b);
            } else {
                proptest::prop_assert!(false, "consistent system reported unsolvable");
            }
        }
    }
}

//! Squarefree decomposition over ℚ and floating-point complex root finding
//! (Aberth–Ehrlich) for Weil weight verification.
//!
//! High-multiplicity factors (e.g. `(1+pT)^12`) make direct numeric rooting
//! hopeless, so callers should always go through the squarefree
//! decomposition; the numeric stage then only ever sees simple roots.

use super::poly::UniPoly;
use super::ratfunc::rat_poly_gcd;
use super::Rat;
use num_complex::Complex64;
use num_traits::ToPrimitive;

/// Yun's squarefree decomposition: returns `[(g₁, 1), (g₂, 2), …]` with
/// `f = c · ∏ gᵢ^i`, each `gᵢ` squarefree and monic (factors with `gᵢ = 1`
/// omitted).
pub fn squarefree_decomposition(f: &UniPoly<Rat>) -> Vec<(UniPoly<Rat>, usize)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let f = f.monic();
    let df = f.derivative();
    let a0 = rat_poly_gcd(&f, &df);
    let mut b = f.div_exact(&a0);
    let mut c = df.div_exact(&a0);
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let d = c.sub(&b.derivative());
        let g = rat_poly_gcd(&b, &d);
        if g.degree().unwrap_or(0) > 0 {
            out.push((g.clone(), i));
        }
        b = b.div_exact(&g);
        c = d.div_exact(&g);
        i += 1;
    }
    out
}

/// All complex roots of `f` with multiplicity, via Aberth–Ehrlich iteration
/// on each squarefree factor.
pub fn complex_roots(f: &UniPoly<Rat>) -> Vec<Complex64> {
    let mut roots = Vec::new();
    for (g, mult) in squarefree_decomposition(f) {
        for r in aberth(&g) {
            for _ in 0..mult {
                roots.push(r);
            }
        }
    }
    roots
}

/// Aberth–Ehrlich on a squarefree monic rational polynomial.
fn aberth(g: &UniPoly<Rat>) -> Vec<Complex64> {
    let n = match g.degree() {
        None | Some(0) => return Vec::new(),
        Some(n) => n,
    };
    let coeffs: Vec<f64> = g
        .coeffs()
        .iter()
        .map(|c| c.to_f64().expect("coefficient fits f64"))
        .collect();
    let deriv: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * i as f64)
        .collect();
    let eval = |cs: &[f64], z: Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in cs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    // Initial guesses on a circle of radius the Cauchy bound, angles offset
    // to break symmetry.
    let lead = *coeffs.last().expect("nonzero");
    let bound = 1.0
        + coeffs[..n]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max);
    let radius = bound.max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.27) / n as f64 + 0.42;
            Complex64::from_polar(radius * (0.5 + 0.5 * (k as f64 + 1.0) / n as f64), theta)
        })
        .collect();
    for _ in 0..400 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let fz = eval(&coeffs, z[i]);
            let dz = eval(&deriv, z[i]);
            if fz.norm() == 0.0 {
                continue;
            }
            let w = fz / dz;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let corr = w / (Complex64::new(1.0, 0.0) - w * s);
            z[i] -= corr;
            let rel = corr.norm() / (1.0 + z[i].norm());
            max_step = max_step.max(rel);
        }
        if max_step < 1e-13 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rint;

    fn p(coeffs: &[i64]) -> UniPoly<Rat> {
        UniPoly::new(coeffs.iter().map(|&c| rint(c)).collect())
    }

    #[test]
    fn squarefree_decomposition_of_power_product() {
        // (x−1)·(x+2)² ⇒ [(x−1, 1), (x+2, 2)].
        let f = p(&[-1, 1]).mul(&p(&[2, 1])).mul(&p(&[2, 1]));
        let dec = squarefree_decomposition(&f);
        assert_eq!(dec.len(), 2);
        assert_eq!(dec[0], (p(&[-1, 1]), 1));
        assert_eq!(dec[1], (p(&[2, 1]), 2));
    }

    #[test]
    fn roots_of_cyclotomic_like_product() {
        // (x²+1)(x−3): roots ±i and 3.
        let f = p(&[1, 0, 1]).mul(&p(&[-3, 1]));
        let mut roots = complex_roots(&f);
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert_eq!(roots.len(), 3);
        assert!((roots[0] - Complex64::new(0.0, -1.0)).norm() < 1e-9
            || (roots[0] - Complex64::new(0.0, 1.0)).norm() < 1e-9);
        assert!((roots[2] - Complex64::new(3.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn high_multiplicity_handled_through_decomposition() {
        // (x−2)^5: naive iteration would stall; decomposition reduces to a
        // single simple root repeated.
        let mut f = UniPoly::one();
        for _ in 0..5 {
            f = f.mul(&p(&[-2, 1]));
        }
        let roots = complex_roots(&f);
        assert_eq!(roots.len(), 5);
        for r in roots {
            assert!((r - Complex64::new(2.0, 0.0)).norm() < 1e-8);
        }
    }
}

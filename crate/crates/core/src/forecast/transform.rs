//! Reparametrization of AR-type polynomials through partial
//! autocorrelations.
//!
//! Any real vector maps to partial autocorrelations in (−1, 1), and the
//! Durbin–Levinson recursion turns those into the coefficients of a
//! polynomial `1 − φ₁z − … − φₚzᵖ` whose roots all lie outside the unit
//! circle. Searching over the unconstrained vector therefore only ever
//! visits stationary (or, for MA terms, invertible) models.

use num_complex::Complex64;

/// Partial autocorrelations are kept this far inside (−1, 1) so the
/// resulting polynomial stays strictly stationary in floating point.
const MAX_PARTIAL: f64 = 1.0 - 1e-9;

fn to_partial(u: f64) -> f64 {
    (u / (1.0 + u * u).sqrt()).clamp(-MAX_PARTIAL, MAX_PARTIAL)
}

fn from_partial(r: f64) -> f64 {
    let r = r.clamp(-MAX_PARTIAL, MAX_PARTIAL);
    r / (1.0 - r * r).sqrt()
}

/// Unconstrained vector → coefficients of a stationary AR polynomial.
pub fn constrain(unconstrained: &[f64]) -> Vec<f64> {
    let mut phi: Vec<f64> = Vec::with_capacity(unconstrained.len());
    for &u in unconstrained {
        let r = to_partial(u);
        let prev = phi.clone();
        let k = prev.len();
        for j in 0..k {
            phi[j] = prev[j] - r * prev[k - 1 - j];
        }
        phi.push(r);
    }
    phi
}

/// Step-down (reverse Durbin–Levinson): coefficients → partial
/// autocorrelations. `None` when the recursion leaves (−1, 1), i.e. the
/// polynomial is not stationary.
pub fn partials(coeffs: &[f64]) -> Option<Vec<f64>> {
    let mut phi = coeffs.to_vec();
    let mut out = vec![0.0; phi.len()];
    for k in (0..phi.len()).rev() {
        let r = phi[k];
        // Also rejects NaN.
        if r.is_nan() || r.abs() >= 1.0 {
            return None;
        }
        out[k] = r;
        let denom = 1.0 - r * r;
        let prev: Vec<f64> = (0..k).map(|j| (phi[j] + r * phi[k - 1 - j]) / denom).collect();
        phi.truncate(k);
        phi.copy_from_slice(&prev);
    }
    Some(out)
}

/// Inverse of [`constrain`] for stationary inputs.
pub fn unconstrain(coeffs: &[f64]) -> Option<Vec<f64>> {
    partials(coeffs).map(|rs| rs.into_iter().map(from_partial).collect())
}

/// Whether `1 − c₁z − … − cₖzᵏ` has every root strictly outside the unit circle.
pub fn is_stationary(coeffs: &[f64]) -> bool {
    partials(coeffs).is_some()
}

/// Whether `1 + θ₁z + … + θ_qz^q` has every root strictly outside the unit circle.
pub fn is_invertible(ma: &[f64]) -> bool {
    let neg: Vec<f64> = ma.iter().map(|t| -t).collect();
    is_stationary(&neg)
}

/// Whether every root of `1 − c₁z − … − cₖzᵏ` has modulus greater than
/// `radius`. Substituting z = radius·y reduces this to stationarity of the
/// rescaled coefficients `cⱼ·radiusʲ`.
pub fn roots_outside(coeffs: &[f64], radius: f64) -> bool {
    let scaled: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| c * radius.powi(j as i32 + 1))
        .collect();
    is_stationary(&scaled)
}

/// Roots of `1 + c₁z + … + cₖzᵏ` via Durand–Kerner iteration. Trailing
/// coefficients that are numerically zero lower the degree.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|x| x.abs() < 1e-12) {
        c.pop();
    }
    let k = c.len();
    if k == 0 {
        return Vec::new();
    }
    // Monic form: zᵏ + (c_{k−1}/c_k) z^{k−1} + … + 1/c_k.
    let lead = c[k - 1];
    let monic: Vec<f64> = std::iter::once(1.0 / lead)
        .chain(c[..k - 1].iter().map(|x| x / lead))
        .collect();
    let eval = |z: Complex64| {
        let mut acc = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            acc = acc * z + monic[j];
        }
        acc
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..k).map(|j| seed.powi(j as i32)).collect();
    for _ in 0..500 {
        let mut shift = 0.0_f64;
        for i in 0..k {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..k {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            shift = shift.max(delta.norm() / roots[i].norm().max(1.0));
        }
        if shift < 1e-14 {
            break;
        }
    }
    roots
}

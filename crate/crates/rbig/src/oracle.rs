//! Direct numeric-integration oracles for low-dimensional information
//! measures. These deliberately avoid the closed-form routes used by the
//! synthetic samplers (digamma/log-gamma identities, determinant algebra)
//! so they can certify those formulas independently: everything here is a
//! Gauss–Legendre quadrature of an explicit density.
//!
//! Integrals over the real line use the substitution x = s·tan θ with a
//! caller-chosen scale s matched to the density's spread, which compresses
//! the line to (−π/2, π/2) and clusters nodes where the density lives.

use nalgebra::DMatrix;

use crate::error::{RbigError, Result};
use crate::quad::gauss_legendre;
use crate::special::{log_gamma, LN_2PI};

use std::f64::consts::FRAC_PI_2;

/// ∫ f over the real line via x = scale·tan θ.
pub fn integrate_r1(f: impl Fn(f64) -> f64, scale: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n, -FRAC_PI_2, FRAC_PI_2);
    let mut acc = 0.0;
    for (&t, &w) in nodes.iter().zip(weights.iter()) {
        let c = t.cos();
        let x = scale * t.tan();
        acc += w * f(x) * scale / (c * c);
    }
    acc
}

/// ∫∫ f over the plane via the tensor-product tangent grid.
pub fn integrate_r2(f: impl Fn(f64, f64) -> f64, sx: f64, sy: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n, -FRAC_PI_2, FRAC_PI_2);
    let mut acc = 0.0;
    for (&tx, &wx) in nodes.iter().zip(weights.iter()) {
        let cx = tx.cos();
        let x = sx * tx.tan();
        let jx = sx / (cx * cx);
        let mut inner = 0.0;
        for (&ty, &wy) in nodes.iter().zip(weights.iter()) {
            let cy = ty.cos();
            let y = sy * ty.tan();
            inner += wy * f(x, y) * sy / (cy * cy);
        }
        acc += wx * jx * inner;
    }
    acc
}

fn neg_p_ln_p(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

/// Differential entropy −∫ p ln p of a density on the real line.
pub fn entropy_1d(pdf: impl Fn(f64) -> f64, scale: f64, n: usize) -> f64 {
    integrate_r1(|x| neg_p_ln_p(pdf(x)), scale, n)
}

/// Differential entropy of a density on the plane.
pub fn entropy_2d(pdf: impl Fn(f64, f64) -> f64, sx: f64, sy: f64, n: usize) -> f64 {
    integrate_r2(|x, y| neg_p_ln_p(pdf(x, y)), sx, sy, n)
}

/// Differential entropy −∫ p ln p over a finite interval (plain
/// Gauss–Legendre; split at any kinks and sum the pieces).
pub fn entropy_bounded(pdf: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n, lo, hi);
    nodes
        .iter()
        .zip(weights.iter())
        .map(|(&x, &w)| w * neg_p_ln_p(pdf(x)))
        .sum()
}

/// KL divergence ∫ p ln(p/q) of two densities on the real line. Both
/// densities are assumed everywhere positive; nodes where either one
/// underflows to zero in f64 are skipped, which only discards
/// contributions far below the quadrature error (p there is at most a
/// few hundred log-units above the underflow threshold).
pub fn kl_1d(p: impl Fn(f64) -> f64, q: impl Fn(f64) -> f64, scale: f64, n: usize) -> f64 {
    integrate_r1(
        |x| {
            let pv = p(x);
            let qv = q(x);
            if pv > 0.0 && qv > 0.0 {
                pv * (pv.ln() - qv.ln())
            } else {
                0.0
            }
        },
        scale,
        n,
    )
}

/// Total correlation of a bivariate density: H(x) + H(y) − H(x, y), with
/// the marginal densities themselves obtained by numeric integration of
/// the joint (no closed-form marginals are assumed anywhere).
pub fn total_correlation_2d(
    pdf: impl Fn(f64, f64) -> f64,
    sx: f64,
    sy: f64,
    n: usize,
) -> f64 {
    let h_joint = entropy_2d(&pdf, sx, sy, n);
    let (nodes, weights) = gauss_legendre(n, -FRAC_PI_2, FRAC_PI_2);
    let mut h_x = 0.0;
    let mut h_y = 0.0;
    for (&t, &w) in nodes.iter().zip(weights.iter()) {
        let c = t.cos();
        let x = sx * t.tan();
        let mx = integrate_r1(|y| pdf(x, y), sy, n);
        h_x += w * neg_p_ln_p(mx) * sx / (c * c);
        let y = sy * t.tan();
        let my = integrate_r1(|u| pdf(u, y), sx, n);
        h_y += w * neg_p_ln_p(my) * sy / (c * c);
    }
    h_x + h_y - h_joint
}

/// Density of N(μ, σ²) on the real line.
pub fn gaussian_pdf_1d(mu: f64, var: f64) -> Result<impl Fn(f64) -> f64> {
    if !(var > 0.0) {
        return Err(RbigError::Domain(format!("variance must be positive, got {var}")));
    }
    let norm = (-0.5 * (LN_2PI + var.ln())).exp();
    Ok(move |x: f64| {
        let z = (x - mu) * (x - mu) / var;
        norm * (-0.5 * z).exp()
    })
}

/// Density of N(μ, Σ) on the plane for a 2×2 covariance.
pub fn gaussian_pdf_2d(mu: [f64; 2], cov: &DMatrix<f64>) -> Result<impl Fn(f64, f64) -> f64> {
    let (det, inv) = inv_2x2(cov)?;
    let ln_norm = -LN_2PI - 0.5 * det.ln();
    Ok(move |x: f64, y: f64| {
        let dx = x - mu[0];
        let dy = y - mu[1];
        let q = inv[0] * dx * dx + 2.0 * inv[1] * dx * dy + inv[2] * dy * dy;
        (ln_norm - 0.5 * q).exp()
    })
}

/// Density of the 1D Student-t with ν degrees of freedom and scale a
/// (standard deviation² × (ν−2)/ν for ν > 2).
pub fn student_pdf_1d(nu: f64, a: f64) -> Result<impl Fn(f64) -> f64> {
    if !(nu > 0.0) || !(a > 0.0) {
        return Err(RbigError::Domain(format!(
            "student pdf needs nu > 0 and a > 0, got nu={nu} a={a}"
        )));
    }
    let ln_norm = log_gamma((nu + 1.0) / 2.0)?
        - log_gamma(nu / 2.0)?
        - 0.5 * (nu * std::f64::consts::PI).ln()
        - 0.5 * a.ln();
    Ok(move |x: f64| {
        let q = x * x / a;
        (ln_norm - (nu + 1.0) / 2.0 * (1.0 + q / nu).ln()).exp()
    })
}

/// Density of the zero-mean bivariate elliptical Student-t with a 2×2
/// scale matrix.
pub fn student_pdf_2d(nu: f64, scale: &DMatrix<f64>) -> Result<impl Fn(f64, f64) -> f64> {
    if !(nu > 0.0) {
        return Err(RbigError::Domain(format!("student pdf needs nu > 0, got {nu}")));
    }
    let (det, inv) = inv_2x2(scale)?;
    let ln_norm = log_gamma((nu + 2.0) / 2.0)?
        - log_gamma(nu / 2.0)?
        - (nu * std::f64::consts::PI).ln()
        - 0.5 * det.ln();
    Ok(move |x: f64, y: f64| {
        let q = inv[0] * x * x + 2.0 * inv[1] * x * y + inv[2] * y * y;
        (ln_norm - (nu + 2.0) / 2.0 * (1.0 + q / nu).ln()).exp()
    })
}

/// Determinant and packed inverse [ixx, ixy, iyy] of a symmetric
/// positive-definite 2×2 matrix.
fn inv_2x2(m: &DMatrix<f64>) -> Result<(f64, [f64; 3])> {
    if m.nrows() != 2 || m.ncols() != 2 {
        return Err(RbigError::Domain("expected a 2x2 matrix".into()));
    }
    let (a, b, c) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    let det = a * c - b * b;
    if !(det > 0.0) || !(a > 0.0) {
        return Err(RbigError::Domain(format!(
            "matrix [[{a}, {b}], [{b}, {c}]] is not positive definite"
        )));
    }
    Ok((det, [c / det, -b / det, a / det]))
}

/// Entropy of y = a·u₁ + b·u₂ with u ~ U(0,1)², a, b > 0, by piecewise
/// quadrature of the trapezoidal density (rise on [0, min], plateau, fall).
pub fn sum_uniform_entropy_quad(a: f64, b: f64, n: usize) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(RbigError::Domain(format!(
            "uniform sum needs positive coefficients, got {a}, {b}"
        )));
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let pdf = move |y: f64| -> f64 {
        if y <= 0.0 || y >= lo + hi {
            0.0
        } else if y < lo {
            y / (lo * hi)
        } else if y <= hi {
            1.0 / hi
        } else {
            (lo + hi - y) / (lo * hi)
        }
    };
    // The plateau piece is empty when the coefficients coincide (triangle
    // density).
    let plateau = if hi > lo {
        entropy_bounded(&pdf, lo, hi, n)
    } else {
        0.0
    };
    Ok(entropy_bounded(&pdf, 0.0, lo, n) + plateau + entropy_bounded(&pdf, hi, lo + hi, n))
}

//! Complete elliptic integrals, Jacobi theta functions and the nome/modulus
//! correspondence.
//!
//! Conventions: `I(k) = ∫₀¹ dx / √((1-x²)(1-k²x²))`, theta functions in the
//! nome form `θ₂(ω|ζ) = 2 Σ_{m≥0} ζ^{(m+½)²} cos((2m+1)ω)` and
//! `θ₃(ω|ζ) = 1 + 2 Σ_{m≥1} ζ^{m²} cos(2mω)`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Largest nome accepted by the theta routines.
pub const MAX_NOME: f64 = 0.999;

const AGM_TOLERANCE: f64 = 1e-15;
const BISECTION_CAP: usize = 200;

/// Arithmetic-geometric mean of two non-negative numbers.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= AGM_TOLERANCE * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind in the modulus convention.
pub fn elliptic_i(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain(format!("elliptic modulus must lie in [0, 1), got {k}")));
    }
    let k_prime = ((1.0 - k) * (1.0 + k)).sqrt();
    Ok(FRAC_PI_2 / agm(1.0, k_prime))
}

/// `π I(k') / I(k)` evaluated without forming either integral separately,
/// so it stays accurate for `k` close to 0 or 1.
pub fn level_spacing(k: f64, k_prime: f64) -> f64 {
    PI * agm(1.0, k_prime) / agm(1.0, k)
}

fn check_nome(zeta: f64) -> Result<()> {
    if !(0.0..=MAX_NOME).contains(&zeta) {
        return Err(Error::Domain(format!("nome must lie in [0, {MAX_NOME}], got {zeta}")));
    }
    Ok(())
}

fn nome_power(zeta: f64, exponent: f64) -> f64 {
    if zeta == 0.0 {
        0.0
    } else {
        (exponent * zeta.ln()).exp()
    }
}

/// Sums `Σ_m amplitude(m) · weight(m)` until the amplitude bound drops below
/// double precision relative to the accumulated magnitude.
fn theta_series(zeta: f64, first: usize, exponent: impl Fn(usize) -> f64, weight: impl Fn(usize) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut magnitude: f64 = 0.0;
    let mut m = first;
    loop {
        let amplitude = nome_power(zeta, exponent(m));
        if amplitude <= 1e-17 * magnitude.max(1e-300) || amplitude == 0.0 {
            break;
        }
        sum += amplitude * weight(m);
        magnitude += amplitude;
        m += 1;
    }
    sum
}

pub fn theta2(omega: f64, zeta: f64) -> Result<f64> {
    check_nome(zeta)?;
    let s = theta_series(
        zeta,
        0,
        |m| (m as f64 + 0.5).powi(2),
        |m| ((2 * m + 1) as f64 * omega).cos(),
    );
    Ok(2.0 * s)
}

pub fn theta3(omega: f64, zeta: f64) -> Result<f64> {
    check_nome(zeta)?;
    let s = theta_series(zeta, 1, |m| (m * m) as f64, |m| (2.0 * m as f64 * omega).cos());
    Ok(1.0 + 2.0 * s)
}

/// `θ₄(0|ζ) = 1 + 2 Σ (-1)^m ζ^{m²}`.
pub fn theta4_zero(zeta: f64) -> Result<f64> {
    check_nome(zeta)?;
    let s = theta_series(zeta, 1, |m| (m * m) as f64, |m| if m % 2 == 0 { 1.0 } else { -1.0 });
    Ok(1.0 + 2.0 * s)
}

fn product_terms(zeta: f64, mut factor: impl FnMut(usize) -> f64) -> f64 {
    let mut prod = 1.0;
    let mut m = 1;
    loop {
        if nome_power(zeta, (2 * m - 1) as f64) < 1e-18 {
            break;
        }
        prod *= factor(m);
        m += 1;
    }
    prod
}

/// Product representation of θ₂; an independent route to the series.
pub fn theta2_product(omega: f64, zeta: f64) -> Result<f64> {
    check_nome(zeta)?;
    let c2 = (2.0 * omega).cos();
    let p = product_terms(zeta, |m| {
        let z2 = nome_power(zeta, (2 * m) as f64);
        (1.0 - z2) * (1.0 + 2.0 * z2 * c2 + z2 * z2)
    });
    Ok(2.0 * nome_power(zeta, 0.25) * omega.cos() * p)
}

/// Product representation of θ₃.
pub fn theta3_product(omega: f64, zeta: f64) -> Result<f64> {
    check_nome(zeta)?;
    let c2 = (2.0 * omega).cos();
    let p = product_terms(zeta, |m| {
        let z2 = nome_power(zeta, (2 * m) as f64);
        let z1 = nome_power(zeta, (2 * m - 1) as f64);
        (1.0 - z2) * (1.0 + 2.0 * z1 * c2 + z1 * z1)
    });
    Ok(p)
}

/// Euler product `Π_{l≥1} (1 - ζ^{2l})`.
pub fn euler_product(zeta: f64) -> f64 {
    product_terms(zeta, |l| 1.0 - nome_power(zeta, (2 * l) as f64))
}

/// Modulus pair `(k, k')` whose nome is `ζ`, from `k = (θ₂/θ₃)²`, `k' = (θ₄/θ₃)²`.
pub fn modulus_from_nome(zeta: f64) -> Result<(f64, f64)> {
    let t3 = theta3(0.0, zeta)?;
    let k = (theta2(0.0, zeta)? / t3).powi(2);
    let k_prime = (theta4_zero(zeta)? / t3).powi(2);
    Ok((k, k_prime))
}

/// Solves `n_epsilon = π I(k_n') / I(k_n)` for `(k_n, k_n')` by bisection.
///
/// The smaller of the two moduli is always the one bisected, using the
/// symmetry `k ↔ k'`, `nε ↔ π²/(nε)`; the larger is then formed from it
/// without cancellation.
pub fn nome_modulus(n_epsilon: f64) -> Result<(f64, f64)> {
    if !(n_epsilon.is_finite() && n_epsilon > 0.0) {
        return Err(Error::Domain(format!("n·ε must be positive and finite, got {n_epsilon}")));
    }
    if n_epsilon >= PI {
        let k = small_modulus(n_epsilon);
        Ok((k, ((1.0 - k) * (1.0 + k)).sqrt()))
    } else {
        let k_prime = small_modulus(PI * PI / n_epsilon);
        Ok((((1.0 - k_prime) * (1.0 + k_prime)).sqrt(), k_prime))
    }
}

/// Bisection in `ln k` for `n_epsilon ≥ π`, where `k ≤ 1/√2`.
fn small_modulus(n_epsilon: f64) -> f64 {
    let spacing = |y: f64| {
        let k = y.exp();
        level_spacing(k, ((1.0 - k) * (1.0 + k)).sqrt())
    };
    // k ≈ 4 e^{-nε/2}; start two e-folds below that.
    let mut lo = (4f64.ln() - 0.5 * n_epsilon).min(0.0) - 2.0;
    while spacing(lo) < n_epsilon {
        lo -= 2.0;
    }
    let mut hi = -0.5 * 2f64.ln();
    for _ in 0..BISECTION_CAP {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if spacing(mid) > n_epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// `|Π(1-ζ^{2l}) - [k̃ k̃' / (4 ζ^{1/2})]^{1/6} θ₃(ζ)|` with `k̃` the modulus of nome `ζ`.
pub fn euler_product_check(zeta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&zeta) {
        return Err(Error::Domain(format!("nome must lie in [0, 1), got {zeta}")));
    }
    if zeta == 0.0 {
        return Ok(0.0);
    }
    let (k, k_prime) = nome_modulus(-zeta.ln())?;
    let rhs = (k * k_prime / (4.0 * zeta.sqrt())).powf(1.0 / 6.0) * theta3(0.0, zeta)?;
    Ok((euler_product(zeta) - rhs).abs())
}

/// Elliptic data of a dimerization `δ ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AsymptoticParams {
    pub delta: f64,
    pub k: f64,
    pub k_prime: f64,
    pub epsilon: f64,
}

impl AsymptoticParams {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Domain(format!(
                "asymptotic formulas need 0 < δ < 1, got {delta}"
            )));
        }
        let k = (1.0 - delta) / (1.0 + delta);
        let k_prime = 2.0 * delta.sqrt() / (1.0 + delta);
        let epsilon = level_spacing(k, k_prime);
        Ok(Self { delta, k, k_prime, epsilon })
    }

    /// `e^{-nε}`.
    pub fn nome(&self, n: f64) -> f64 {
        (-n * self.epsilon).exp()
    }

    /// `(k_n, k_n')` for real `n > 0` from the theta quotient identity.
    pub fn modulus(&self, n: f64) -> Result<(f64, f64)> {
        modulus_from_nome(self.nome(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        step(f, a, b, fa, fm, fb, whole, tol, 50)
    }

    fn quadrature_i(k: f64) -> f64 {
        // x = sin θ removes the endpoint singularity.
        adaptive_simpson(&|th: f64| 1.0 / (1.0 - k * k * th.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-14)
    }

    #[test]
    fn elliptic_i_values() {
        assert!((elliptic_i(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let k = 0.5385;
        let ik = elliptic_i(k).unwrap();
        assert!((ik - quadrature_i(k)).abs() / ik < 1e-10);
        for k in [0.1, 0.5, 0.9, 0.99] {
            let ik = elliptic_i(k).unwrap();
            assert!((ik - quadrature_i(k)).abs() / ik < 1e-10, "k = {k}");
        }
        let (a, b, c) = (elliptic_i(0.9).unwrap(), elliptic_i(0.99).unwrap(), elliptic_i(0.999).unwrap());
        assert!(c > b && b > a);
        assert!(elliptic_i(1.0).is_err());
        assert!(elliptic_i(-0.1).is_err());
    }

    #[test]
    fn theta_trivial_values() {
        assert_eq!(theta3(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(theta2(0.0, 0.0).unwrap(), 0.0);
        for z in [0.01, 0.3, 0.7, 0.95] {
            assert!(theta2(FRAC_PI_2, z).unwrap().abs() < 1e-14);
        }
        assert!(theta2(0.0, 0.9995).is_err());
        assert!(theta3(0.0, -0.1).is_err());
    }

    #[test]
    fn series_matches_product() {
        for (w, z) in [(0.3, 0.4), (0.0, 0.02), (1.1, 0.8), (FRAC_PI_2, 0.5)] {
            let (s2, p2) = (theta2(w, z).unwrap(), theta2_product(w, z).unwrap());
            let (s3, p3) = (theta3(w, z).unwrap(), theta3_product(w, z).unwrap());
            assert!((s2 - p2).abs() < 1e-12, "θ2 at ({w}, {z}): {s2} vs {p2}");
            assert!((s3 - p3).abs() < 1e-12, "θ3 at ({w}, {z}): {s3} vs {p3}");
        }
    }

    #[test]
    fn theta3_positive_and_minimal_at_half_pi() {
        for z in [0.05, 0.3, 0.6, 0.9] {
            let floor = theta3(FRAC_PI_2, z).unwrap();
            assert!(floor > 0.0);
            for i in 0..50 {
                let w = i as f64 * PI / 49.0;
                assert!(theta3(w, z).unwrap() >= floor - 1e-15);
            }
        }
    }

    #[test]
    fn level_spacing_at_point_three() {
        let p = AsymptoticParams::new(0.3).unwrap();
        assert!((p.k - 0.5384615384615384).abs() < 1e-15);
        assert!((p.k * p.k + p.k_prime * p.k_prime - 1.0).abs() < 1e-12);
        assert!((p.epsilon - 3.844953953453666).abs() < 1e-12);
    }

    #[test]
    fn epsilon_increases_with_delta() {
        let h = 1e-6;
        for i in 1..=9 {
            let d = i as f64 / 10.0;
            let e = AsymptoticParams::new(d).unwrap().epsilon;
            assert!(e > 0.0);
            let deriv = (AsymptoticParams::new(d + h).unwrap().epsilon
                - AsymptoticParams::new(d - h).unwrap().epsilon)
                / (2.0 * h);
            assert!(deriv > 0.0);
        }
    }

    #[test]
    fn nome_modulus_round_trips() {
        for d in [0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
            let p = AsymptoticParams::new(d).unwrap();
            let (k, kp) = nome_modulus(p.epsilon).unwrap();
            assert!((k - p.k).abs() < 1e-10, "δ = {d}");
            assert!((kp - p.k_prime).abs() < 1e-10);
        }
        let eps = AsymptoticParams::new(0.3).unwrap().epsilon;
        let (k10, _) = nome_modulus(10.0 * eps).unwrap();
        let (k20, _) = nome_modulus(20.0 * eps).unwrap();
        assert!(k20 < k10 && k10 < 1e-2);
        assert!(nome_modulus(0.0).is_err());
    }

    #[test]
    fn theta_identity_for_modulus() {
        let p = AsymptoticParams::new(0.3).unwrap();
        for n in [1.0, 2.0, 3.0, 1.5] {
            let (k_theta, kp_theta) = p.modulus(n).unwrap();
            let (k_bis, kp_bis) = nome_modulus(n * p.epsilon).unwrap();
            assert!((k_theta - k_bis).abs() < 1e-10, "n = {n}");
            assert!((kp_theta - kp_bis).abs() < 1e-10);
        }
        let (k1, _) = p.modulus(1.0).unwrap();
        assert!((k1 - p.k).abs() < 1e-12);
    }

    #[test]
    fn euler_product_identity() {
        for d in [0.3, 0.7] {
            let z = (-AsymptoticParams::new(d).unwrap().epsilon).exp();
            assert!(euler_product_check(z).unwrap() <= 1e-10);
        }
        for z in [1e-12, 1e-3, 0.2, 0.6] {
            assert!(euler_product_check(z).unwrap() <= 1e-10, "ζ = {z}");
        }
        assert_eq!(euler_product_check(0.0).unwrap(), 0.0);
        assert!((euler_product(1e-9) - 1.0).abs() < 1e-15);
    }
}

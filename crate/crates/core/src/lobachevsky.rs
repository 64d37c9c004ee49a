//! The Lobachevsky function `Λ(θ) = -∫₀^θ ln|2 sin t| dt`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

const TERMS: usize = 30;

/// Coefficients `c_k = 2 ζ(2k) / ((2π)^{2k} · 2k · (2k+1))` of the Clausen
/// series `Cl₂(x) = x - x ln|x| + Σ_k c_k x^{2k+1}`, valid for `|x| < 2π`.
fn clausen_coefficients() -> &'static [f64; TERMS] {
    static COEFFS: OnceLock<[f64; TERMS]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut c = [0.0; TERMS];
        let two_pi_sq = (2.0 * PI) * (2.0 * PI);
        let mut scale = 1.0;
        for (idx, slot) in c.iter_mut().enumerate() {
            let k = idx + 1;
            scale /= two_pi_sq;
            let s = 2 * k;
            let zeta = match k {
                1 => PI.powi(2) / 6.0,
                2 => PI.powi(4) / 90.0,
                3 => PI.powi(6) / 945.0,
                4 => PI.powi(8) / 9450.0,
                _ => (1..=200).rev().map(|n| (n as f64).powi(-(s as i32))).sum(),
            };
            *slot = 2.0 * zeta * scale / (s as f64 * (s + 1) as f64);
        }
        c
    })
}

/// Clausen function `Cl₂(x)` for `|x| ≤ π`.
fn clausen_reduced(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let x2 = x * x;
    let mut sum = 0.0;
    for &c in clausen_coefficients().iter().rev() {
        sum = sum * x2 + c;
    }
    x - x * x.abs().ln() + sum * x2 * x
}

/// `Λ(θ)`: odd, `π`-periodic, zero at multiples of `π/2`.
pub fn lobachevsky(theta: f64) -> f64 {
    if !theta.is_finite() {
        return f64::NAN;
    }
    // Reduce to (-π/2, π/2].
    let mut t = theta - PI * (theta / PI).round();
    if t <= -FRAC_PI_2 {
        t += PI;
    }
    0.5 * clausen_reduced(2.0 * t)
}

/// `Λ'(θ) = -ln|2 sin θ|`.
pub fn lobachevsky_derivative(theta: f64) -> f64 {
    -(2.0 * theta.sin()).abs().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: split off the log singularity analytically and integrate the
    /// smooth remainder `ln(sin t / t)` with adaptive Simpson.
    pub(crate) fn lobachevsky_quadrature(theta: f64) -> f64 {
        assert!(theta > 0.0 && theta < PI);
        let smooth = |t: f64| if t == 0.0 { 0.0 } else { (t.sin() / t).ln() };
        let singular = theta * (2.0 * theta).ln() - theta;
        -(singular + adaptive_simpson(&smooth, 0.0, theta, 1e-15, 50))
    }

    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
            let m = 0.5 * (a + b);
            (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
        }
        fn recurse(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            b: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let (left, right) = (simpson(f, a, m), simpson(f, m, b));
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                recurse(f, a, m, left, tol / 2.0, depth - 1)
                    + recurse(f, m, b, right, tol / 2.0, depth - 1)
            }
        }
        recurse(f, a, b, simpson(f, a, b), tol, depth)
    }

    #[test]
    fn special_values() {
        assert_eq!(lobachevsky(0.0), 0.0);
        assert!(lobachevsky(FRAC_PI_2).abs() < 1e-15);
        assert!(lobachevsky(PI).abs() < 1e-15);
        assert!((lobachevsky(PI / 6.0) - 0.5074708).abs() < 5e-8);
    }

    #[test]
    fn matches_quadrature() {
        for i in 1..200 {
            let theta = i as f64 * PI / 200.0;
            let q = lobachevsky_quadrature(theta);
            assert!((lobachevsky(theta) - q).abs() < 1e-12, "θ = {theta}");
        }
        assert!((lobachevsky_quadrature(PI / 6.0) - 0.5074708).abs() < 5e-8);
    }

    #[test]
    fn odd_and_periodic() {
        for i in 0..100 {
            let theta = -3.0 + 0.061 * i as f64;
            assert!((lobachevsky(-theta) + lobachevsky(theta)).abs() < 1e-14);
            assert!((lobachevsky(theta + PI) - lobachevsky(theta)).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let h = 1e-5;
        for i in 1..50 {
            let theta = i as f64 * PI / 50.0 + 0.01;
            let fd = (lobachevsky(theta + h) - lobachevsky(theta - h)) / (2.0 * h);
            assert!(
                (fd - lobachevsky_derivative(theta)).abs() < 1e-6,
                "θ = {theta}"
            );
        }
    }

    #[test]
    fn maximum_at_pi_over_six() {
        // Λ' vanishes where 2 sin θ = 1.
        assert!(lobachevsky_derivative(PI / 6.0).abs() < 1e-15);
        assert!(lobachevsky(PI / 6.0) > lobachevsky(PI / 6.0 + 0.01));
        assert!(lobachevsky(PI / 6.0) > lobachevsky(PI / 6.0 - 0.01));
    }
}

//! Legendre polynomials, the normalized order-one associated Legendre
//! functions and the two lowest spherical Bessel functions.
//!
//! Everything is evaluated by recurrence. Derivatives use
//! `P^(d)_{k+1} = P^(d)_{k-1} + (2k+1) P^(d-1)_k`, which is free of the
//! `1/(x^2 - 1)` factor of the textbook derivative formula and therefore
//! exact at the endpoints as well.
//!
//! Sign convention: the associated functions carry the Condon-Shortley
//! phase, `P_l^1(x) = -sqrt(1 - x^2) P_l'(x)`, so `P_1^1(x) = -sqrt(1 - x^2)`.
//! Galerkin products contain every basis function twice, so the phase never
//! shows up in an eigenvalue.

use crate::error::{Error, Result};

/// Slack allowed beyond `[-1, 1]` before an argument is rejected.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// Below this argument the spherical Bessel functions switch to their
/// Maclaurin series.
pub const BESSEL_SERIES_CUTOFF: f64 = 0.1;

fn check_unit_interval(function: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x.abs() <= 1.0 + DOMAIN_SLACK {
        Ok(())
    } else {
        Err(Error::Domain {
            function,
            value: x,
            expected: "|x| <= 1",
        })
    }
}

/// `P_n` and its first three derivatives at `x`.
///
/// Valid for any real `x` (these are polynomials); callers that expose a
/// public surface check the domain themselves.
pub(crate) fn legendre_with_derivatives(n: usize, x: f64) -> [f64; 4] {
    // current[d] = P^(d)_k, previous[d] = P^(d)_{k-1}
    let mut previous = [1.0, 0.0, 0.0, 0.0];
    if n == 0 {
        return previous;
    }
    let mut current = [x, 1.0, 0.0, 0.0];
    for k in 1..n {
        let kf = k as f64;
        let two_k_plus_one = 2.0 * kf + 1.0;
        let next = [
            (two_k_plus_one * x * current[0] - kf * previous[0]) / (kf + 1.0),
            previous[1] + two_k_plus_one * current[0],
            previous[2] + two_k_plus_one * current[1],
            previous[3] + two_k_plus_one * current[2],
        ];
        previous = current;
        current = next;
    }
    current
}

/// Legendre polynomial `P_n(x)` by the three-term recurrence.
pub fn legendre_p(n: usize, x: f64) -> Result<f64> {
    check_unit_interval("legendre_p", x)?;
    if x == 1.0 {
        return Ok(1.0);
    }
    if x == -1.0 {
        return Ok(if n.is_multiple_of(2) { 1.0 } else { -1.0 });
    }
    Ok(legendre_with_derivatives(n, x)[0])
}

/// First (`order = 1`) or second (`order = 2`) derivative of `P_n` at `x`.
pub fn legendre_p_deriv(n: usize, x: f64, order: u8) -> Result<f64> {
    check_unit_interval("legendre_p_deriv", x)?;
    match order {
        1 | 2 => Ok(legendre_with_derivatives(n, x)[order as usize]),
        _ => Err(Error::InvalidInput(format!(
            "derivative order must be 1 or 2, got {order}"
        ))),
    }
}

/// `sqrt((2l+1) / (2l(l+1)))`, the factor making `P_l^1` unit-norm on `[-1, 1]`.
pub fn plm1_norm(l: usize) -> f64 {
    let lf = l as f64;
    ((2.0 * lf + 1.0) / (2.0 * lf * (lf + 1.0))).sqrt()
}

/// Normalized associated Legendre function of order one,
/// `sqrt((2n+1)/(2n(n+1))) P_n^1(x)`, Condon-Shortley phase.
pub fn normalized_plm1(n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "associated Legendre function of order 1 needs degree >= 1".into(),
        ));
    }
    check_unit_interval("normalized_plm1", x)?;
    let x = x.clamp(-1.0, 1.0);
    let s = (1.0 - x * x).max(0.0).sqrt();
    Ok(-plm1_norm(n) * s * legendre_with_derivatives(n, x)[1])
}

/// The normalized `Theta = c P_l^1` together with the two combinations the
/// axisymmetric operators need, all free of pole singularities:
///
/// * `value`: `Theta(mu)`
/// * `stretch`: `s d/dmu (s Theta)`, the latitudinal part of `d/dtheta` acting on `sin(theta) Theta`
/// * `laplace`: `s d^2/dmu^2 (s Theta)`, which equals `-l(l+1) Theta`
///
/// with `s = sqrt(1 - mu^2)`. Because `s Theta = -c (1 - mu^2) P_l'` is a
/// polynomial, both combinations are evaluated without dividing by `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatitudinalTerms {
    pub value: f64,
    pub stretch: f64,
    pub laplace: f64,
}

pub(crate) fn plm1_terms(l: usize, mu: f64) -> LatitudinalTerms {
    let c = plm1_norm(l);
    let [_, d1, d2, d3] = legendre_with_derivatives(l, mu);
    let one_minus = 1.0 - mu * mu;
    let s = one_minus.max(0.0).sqrt();
    // g = s Theta = -c (1 - mu^2) P'
    let g1 = -c * (one_minus * d2 - 2.0 * mu * d1);
    let g2 = -c * (one_minus * d3 - 4.0 * mu * d2 - 2.0 * d1);
    LatitudinalTerms {
        value: -c * s * d1,
        stretch: s * g1,
        laplace: s * g2,
    }
}

/// Spherical Bessel function of the first kind, orders 0 and 1.
///
/// `j0(x) = sin x / x`, `j1(x) = sin x / x^2 - cos x / x`; below
/// [`BESSEL_SERIES_CUTOFF`] a truncated Maclaurin series is used.
pub fn spherical_bessel_j(n: u32, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain {
            function: "spherical_bessel_j",
            value: x,
            expected: "x >= 0",
        });
    }
    let x2 = x * x;
    match n {
        0 if x < BESSEL_SERIES_CUTOFF => {
            Ok(1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0)))))
        }
        0 => Ok(x.sin() / x),
        1 if x < BESSEL_SERIES_CUTOFF => {
            Ok(x / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0 * (1.0 - x2 / 54.0 * (1.0 - x2 / 88.0)))))
        }
        1 => Ok(x.sin() / x2 - x.cos() / x),
        _ => Err(Error::InvalidInput(format!(
            "spherical Bessel functions are provided for orders 0 and 1 only, got {n}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;

    fn closed_form(n: usize, x: f64) -> f64 {
        match n {
            0 => 1.0,
            1 => x,
            2 => 0.5 * (3.0 * x * x - 1.0),
            3 => 0.5 * (5.0 * x.powi(3) - 3.0 * x),
            4 => (35.0 * x.powi(4) - 30.0 * x * x + 3.0) / 8.0,
            _ => unreachable!(),
        }
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_p(0, 0.3).unwrap(), 1.0);
        assert!((legendre_p(2, 0.5).unwrap() + 0.125).abs() < 1e-15);
        assert_eq!(legendre_p(7, 1.0).unwrap(), 1.0);
        assert_eq!(legendre_p(7, -1.0).unwrap(), -1.0);
        assert_eq!(legendre_p(6, -1.0).unwrap(), 1.0);
    }

    #[test]
    fn legendre_matches_closed_forms() {
        for n in 0..=4 {
            for i in 0..=40 {
                let x = -1.0 + 0.05 * i as f64;
                let got = legendre_p(n, x).unwrap();
                assert!((got - closed_form(n, x)).abs() < 1e-14, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn legendre_rejects_outside_interval() {
        assert!(matches!(legendre_p(3, 1.1), Err(Error::Domain { .. })));
        assert!(matches!(legendre_p_deriv(3, -1.5, 1), Err(Error::Domain { .. })));
        assert!(legendre_p(3, 1.0 + 1e-14).is_ok());
        assert!(legendre_p_deriv(3, 0.1, 3).is_err());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(legendre_p_deriv(1, 0.7, 1).unwrap(), 1.0);
        assert!((legendre_p_deriv(2, 0.5, 1).unwrap() - 1.5).abs() < 1e-15);
        let h = 1e-6;
        let fd = (legendre_p(5, 0.3 + h).unwrap() - legendre_p(5, 0.3 - h).unwrap()) / (2.0 * h);
        assert!((legendre_p_deriv(5, 0.3, 1).unwrap() - fd).abs() < 1e-8);
    }

    #[test]
    fn derivative_endpoint_values() {
        for n in 0..12 {
            let nf = n as f64;
            let d1 = nf * (nf + 1.0) / 2.0;
            let d2 = (nf - 1.0) * nf * (nf + 1.0) * (nf + 2.0) / 8.0;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((legendre_p_deriv(n, 1.0, 1).unwrap() - d1).abs() < 1e-12);
            assert!((legendre_p_deriv(n, -1.0, 1).unwrap() + sign * d1).abs() < 1e-12);
            assert!((legendre_p_deriv(n, 1.0, 2).unwrap() - d2).abs() < 1e-10);
            assert!((legendre_p_deriv(n, -1.0, 2).unwrap() - sign * d2).abs() < 1e-10);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for n in [1usize, 3, 6, 9, 12] {
            for i in 0..20 {
                let x = -0.95 + 0.1 * i as f64;
                let p = |y: f64| legendre_with_derivatives(n, y);
                let fd1 = (p(x + h)[0] - p(x - h)[0]) / (2.0 * h);
                let fd2 = (p(x + h)[1] - p(x - h)[1]) / (2.0 * h);
                let fd3 = (p(x + h)[2] - p(x - h)[2]) / (2.0 * h);
                let [_, d1, d2, d3] = p(x);
                let scale = 1.0 + d1.abs().max(d2.abs());
                assert!((d1 - fd1).abs() < 1e-7 * scale, "P' n={n} x={x}");
                assert!((d2 - fd2).abs() < 1e-7 * scale, "P'' n={n} x={x}");
                assert!((d3 - fd3).abs() < 1e-7 * (1.0 + d3.abs()), "P''' n={n} x={x}");
            }
        }
    }

    #[test]
    fn legendre_orthogonality() {
        let rule = gauss_legendre(16, -1.0, 1.0).unwrap();
        for n in 0..=10 {
            for m in 0..=10 {
                let vals: Vec<f64> = rule
                    .nodes()
                    .iter()
                    .map(|&x| legendre_p(n, x).unwrap() * legendre_p(m, x).unwrap())
                    .collect();
                let expected = if n == m { 2.0 / (2.0 * n as f64 + 1.0) } else { 0.0 };
                assert!((rule.integrate(&vals).unwrap() - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn plm1_examples() {
        let v = normalized_plm1(1, 0.0).unwrap();
        assert!((v + 3f64.sqrt() / 2.0).abs() < 1e-15);
        for n in 1..10 {
            assert_eq!(normalized_plm1(n, 1.0).unwrap(), 0.0);
            assert!(normalized_plm1(n, -1.0).unwrap().abs() < 1e-300);
        }
        assert!(normalized_plm1(0, 0.2).is_err());
    }

    #[test]
    fn plm1_orthonormal() {
        let rule = gauss_legendre(24, -1.0, 1.0).unwrap();
        for n in 1..=10 {
            for m in 1..=10 {
                let vals: Vec<f64> = rule
                    .nodes()
                    .iter()
                    .map(|&x| normalized_plm1(n, x).unwrap() * normalized_plm1(m, x).unwrap())
                    .collect();
                let expected = if n == m { 1.0 } else { 0.0 };
                assert!((rule.integrate(&vals).unwrap() - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn plm1_unnormalized_square_integral() {
        // int (P_n^1)^2 = 2 n (n+1) / (2n+1)
        let rule = gauss_legendre(20, -1.0, 1.0).unwrap();
        for n in 1..=8 {
            let c = plm1_norm(n);
            let vals: Vec<f64> = rule
                .nodes()
                .iter()
                .map(|&x| (normalized_plm1(n, x).unwrap() / c).powi(2))
                .collect();
            let nf = n as f64;
            let analytic = 2.0 * nf * (nf + 1.0) / (2.0 * nf + 1.0);
            assert!((rule.integrate(&vals).unwrap() - analytic).abs() < 1e-12 * analytic);
        }
    }

    #[test]
    fn latitudinal_laplacian_is_diagonal() {
        for l in 1..=12 {
            for i in 1..40 {
                let mu = -1.0 + i as f64 / 20.0;
                let t = plm1_terms(l, mu);
                let lf = l as f64;
                assert!((t.laplace + lf * (lf + 1.0) * t.value).abs() < 1e-10 * (1.0 + lf * lf));
            }
        }
    }

    #[test]
    fn latitudinal_stretch_matches_finite_difference() {
        let h = 1e-6;
        for l in [1usize, 2, 5, 8] {
            for i in 1..20 {
                let mu = -0.95 + 0.1 * i as f64;
                let s = |m: f64| (1.0 - m * m).sqrt();
                let g = |m: f64| s(m) * normalized_plm1(l, m).unwrap();
                let fd = s(mu) * (g(mu + h) - g(mu - h)) / (2.0 * h);
                assert!((plm1_terms(l, mu).stretch - fd).abs() < 1e-7 * (1.0 + l as f64));
            }
        }
    }

    #[test]
    fn bessel_examples() {
        let pi = std::f64::consts::PI;
        assert!(spherical_bessel_j(0, pi).unwrap().abs() < 1e-14);
        let x = 1e-4;
        assert!((spherical_bessel_j(1, x).unwrap() / x - 1.0 / 3.0).abs() < 1e-8);
        assert!(spherical_bessel_j(2, 1.0).is_err());
        assert!(spherical_bessel_j(0, -1.0).is_err());
        assert_eq!(spherical_bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(spherical_bessel_j(1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn bessel_series_is_continuous_at_cutoff() {
        for n in 0..=1 {
            let below = spherical_bessel_j(n, BESSEL_SERIES_CUTOFF * (1.0 - 1e-12)).unwrap();
            let above = spherical_bessel_j(n, BESSEL_SERIES_CUTOFF).unwrap();
            // |j_n'| < 1, so the step in x contributes at most 1e-13
            assert!((below - above).abs() < 1e-14 + 1e-13, "order {n}: {below} {above}");
        }
    }

    #[test]
    fn bessel_first_zero_of_j1_in_bracket() {
        let a = spherical_bessel_j(1, 4.0).unwrap();
        let b = spherical_bessel_j(1, 5.0).unwrap();
        assert!(a * b < 0.0);
        assert!(spherical_bessel_j(1, 4.4934094579).unwrap().abs() < 1e-10);
    }
}

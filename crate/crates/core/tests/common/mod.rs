//! Oracles shared by the integration suites. Nothing here calls the
//! evaluation paths it is used to check.

#![allow(dead_code)]

use galerkin_dynamo::basis::{
    Parity, ShellMap, decay_radial_a, decay_radial_b, dynamo_radial_a, dynamo_radial_b,
};

/// Monomial coefficients of `P_0..=P_n` from the three-term recurrence.
pub fn legendre_monomials(n: usize) -> Vec<Vec<f64>> {
    let mut p = vec![vec![1.0], vec![0.0, 1.0]];
    for k in 1..n {
        let kf = k as f64;
        let mut next = vec![0.0; k + 2];
        for (i, c) in p[k].iter().enumerate() {
            next[i + 1] += (2.0 * kf + 1.0) * c / (kf + 1.0);
        }
        for (i, c) in p[k - 1].iter().enumerate() {
            next[i] -= kf * c / (kf + 1.0);
        }
        p.push(next);
    }
    p.truncate(n + 1);
    p
}

pub fn combine(terms: &[(usize, f64)]) -> Vec<f64> {
    let top = terms.iter().map(|t| t.0).max().unwrap_or(0);
    let table = legendre_monomials(top.max(1));
    let mut out = vec![0.0; top + 1];
    for &(k, c) in terms {
        for (i, v) in table[k].iter().enumerate() {
            out[i] += c * v;
        }
    }
    out
}

pub fn times_x(c: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0];
    out.extend_from_slice(c);
    out
}

pub fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(i, v)| i as f64 * v).collect()
}

pub fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

/// `sum |c_k x^k|`, the rounding scale of a monomial evaluation.
pub fn magnitude(c: &[f64], x: f64) -> f64 {
    c.iter().enumerate().map(|(k, v)| (v * x.powi(k as i32)).abs()).sum()
}

/// Basis families written out in monomials, straight from their definitions.
#[derive(Debug, Clone, Copy)]
pub enum Family {
    DecayB,
    DecayA(Parity),
    ShellB,
    ShellA(Parity),
}

pub const FAMILIES: [Family; 6] = [
    Family::DecayB,
    Family::DecayA(Parity::Odd),
    Family::DecayA(Parity::Even),
    Family::ShellB,
    Family::ShellA(Parity::Odd),
    Family::ShellA(Parity::Even),
];

pub fn monomial_form(family: Family, n: usize, m: usize) -> Vec<f64> {
    let nf = n as f64;
    match family {
        Family::DecayB => times_x(&combine(&[(2 * n + 1, 1.0), (1, -1.0)])),
        Family::DecayA(parity) => {
            let l = parity.degree(m) as f64;
            let c = ((2.0 * nf + 1.0) * (2.0 * nf + 2.0) + 2.0 * (l + 1.0)) / (2.0 * l + 4.0);
            times_x(&combine(&[(2 * n + 1, 1.0), (1, -c)]))
        }
        Family::ShellB => {
            // inner radius 0.65
            let d = 13.0 * nf * nf + 26.0 * nf + 6.0;
            combine(&[
                (n - 1, 1.0),
                (n, -13.0 * (2.0 * nf + 1.0) / d),
                (n + 1, -(13.0 * nf * nf - 7.0) / d),
            ])
        }
        Family::ShellA(parity) => {
            let l = parity.degree(m) as f64;
            let q = 2.0 * l * 0.35 / 2.0;
            let d = (nf + 1.0).powi(2) + q;
            combine(&[(n - 1, 1.0), (n, (2.0 * nf + 1.0) / d), (n + 1, -(nf * nf + q) / d)])
        }
    }
}

pub fn evaluate(family: Family, n: usize, m: usize, z: f64) -> [f64; 3] {
    let map = ShellMap::default();
    let v = match family {
        Family::DecayB => decay_radial_b(n, z),
        Family::DecayA(p) => decay_radial_a(n, p.degree(m), z),
        Family::ShellB => dynamo_radial_b(n, z, &map),
        Family::ShellA(p) => dynamo_radial_a(n, p.degree(m), z, &map),
    };
    [v.value, v.d1, v.d2]
}

/// Largest boundary-condition residual of one basis function, in the
/// physical radius `x`.
pub fn boundary_residual(family: Family, n: usize, m: usize) -> f64 {
    let map = ShellMap::default();
    let f = map.factor();
    match family {
        Family::DecayB => {
            let [v0, ..] = evaluate(family, n, m, 0.0);
            let [v1, ..] = evaluate(family, n, m, 1.0);
            v0.abs().max(v1.abs())
        }
        Family::DecayA(p) => {
            let l = p.degree(m) as f64;
            let [v0, ..] = evaluate(family, n, m, 0.0);
            let [v1, d1, _] = evaluate(family, n, m, 1.0);
            v0.abs().max((d1 + l * v1).abs())
        }
        Family::ShellB => {
            // d(xB)/dx at the bottom, B at the top
            let [v, d, _] = evaluate(family, n, m, -1.0);
            let flux = v + map.to_x(-1.0) * f * d;
            let [top, ..] = evaluate(family, n, m, 1.0);
            flux.abs().max(top.abs())
        }
        Family::ShellA(p) => {
            let l = p.degree(m) as f64;
            let [bottom, ..] = evaluate(family, n, m, -1.0);
            let [v, d, _] = evaluate(family, n, m, 1.0);
            bottom.abs().max((f * d + l * v).abs())
        }
    }
}

/// `int_a^b x^k dx`.
pub fn monomial_integral(k: usize, a: f64, b: f64) -> f64 {
    let e = k as i32 + 1;
    (b.powi(e) - a.powi(e)) / e as f64
}

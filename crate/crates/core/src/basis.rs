//! Trial functions.
//!
//! Every radial function is a short combination of Legendre polynomials
//! chosen so that it satisfies its boundary conditions on its own; nothing is
//! imposed on the assembled matrices afterwards.
//!
//! | family | coordinate | conditions |
//! |---|---|---|
//! | free-decay toroidal | `x` in `[0, 1]` | regular at 0, `S(1) = 0` |
//! | free-decay poloidal | `x` in `[0, 1]` | regular at 0, `S'(1) + l S(1) = 0` |
//! | shell toroidal | `xi` in `[-1, 1]` | `d(xS)/dx = 0` at the bottom, `S = 0` at the top |
//! | shell poloidal | `xi` in `[-1, 1]` | `S = 0` at the bottom, `dS/dx + l S = 0` at the top |
//!
//! The shell poloidal family is indexed so that `n = 1` starts from `P_0`:
//! `S_n = P_{n-1} + (2n+1)/D P_n - (n^2 + 2l/f)/D P_{n+1}` with
//! `D = (n+1)^2 + 2l/f`. The `2l/f` term carries the harmonic degree `l`,
//! which is what makes the vacuum condition hold for every latitudinal mode.

use serde::{Deserialize, Serialize};

use crate::orthopoly::{legendre_with_derivatives, plm1_terms, LatitudinalTerms};
use crate::quadrature::QuadratureRule;

/// Inner radius of the shell used by the dynamo benchmark.
pub const DEFAULT_INNER_RADIUS: f64 = 0.65;

/// Equatorial parity class of a latitudinal family.
///
/// `Odd` (index 0) uses the odd harmonic degrees `l = 2m - 1`, `Even`
/// (index 1) the even degrees `l = 2m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn from_index(index: u8) -> Option<Self> {
        match index {
            0 => Some(Parity::Odd),
            1 => Some(Parity::Even),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Parity::Odd => 0,
            Parity::Even => 1,
        }
    }

    /// Harmonic degree of the `m`-th latitudinal function (`m >= 1`).
    pub fn degree(self, m: usize) -> usize {
        debug_assert!(m >= 1);
        match self {
            Parity::Odd => 2 * m - 1,
            Parity::Even => 2 * m,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Odd => Parity::Even,
            Parity::Even => Parity::Odd,
        }
    }
}

/// Flattening of the `(n, m)` mode grid into matrix indices.
///
/// The radial index runs fastest: `k = N_r (m - 1) + (n - 1)` for
/// `n = 1..=N_r`, `m = 1..=N_theta` (zero-based `k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModeIndexMap {
    n_radial: usize,
    n_lat: usize,
}

impl ModeIndexMap {
    pub fn n_radial(&self) -> usize {
        self.n_radial
    }

    pub fn n_lat(&self) -> usize {
        self.n_lat
    }

    pub fn len(&self) -> usize {
        self.n_radial * self.n_lat
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// One-based `(n, m)` of the zero-based flat index `k`.
    pub fn mode(&self, k: usize) -> (usize, usize) {
        (k % self.n_radial + 1, k / self.n_radial + 1)
    }

    /// Zero-based flat index of the one-based pair `(n, m)`.
    pub fn index(&self, n: usize, m: usize) -> usize {
        self.n_radial * (m - 1) + (n - 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.len()).map(move |k| {
            let (n, m) = self.mode(k);
            (k, n, m)
        })
    }
}

pub fn mode_index(n_radial: usize, n_lat: usize) -> ModeIndexMap {
    assert!(n_radial >= 1 && n_lat >= 1, "mode grid must be non-empty");
    ModeIndexMap { n_radial, n_lat }
}

/// Affine map between `xi` in `[-1, 1]` and the radius `x` in `[x_i, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellMap {
    x_inner: f64,
    factor: f64,
}

impl ShellMap {
    pub fn new(x_inner: f64) -> Self {
        assert!(
            (0.0..1.0).contains(&x_inner),
            "inner radius must lie in [0, 1)"
        );
        ShellMap {
            x_inner,
            factor: 2.0 / (1.0 - x_inner),
        }
    }

    pub fn x_inner(&self) -> f64 {
        self.x_inner
    }

    /// `f = 2 / (1 - x_i)`, so that `d/dx = f d/dxi`.
    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn to_x(&self, xi: f64) -> f64 {
        self.x_inner + (xi + 1.0) / self.factor
    }

    pub fn to_xi(&self, x: f64) -> f64 {
        (x - self.x_inner) * self.factor - 1.0
    }
}

impl Default for ShellMap {
    fn default() -> Self {
        ShellMap::new(DEFAULT_INNER_RADIUS)
    }
}

/// Value and first two derivatives of a radial trial function with respect
/// to its native coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RadialValue {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// `sum_k c_k P_{degree_k}(z)` with derivatives.
fn legendre_combination(terms: &[(usize, f64)], z: f64) -> RadialValue {
    terms.iter().fold(RadialValue::default(), |acc, &(k, c)| {
        let [p, d1, d2, _] = legendre_with_derivatives(k, z);
        RadialValue {
            value: acc.value + c * p,
            d1: acc.d1 + c * d1,
            d2: acc.d2 + c * d2,
        }
    })
}

/// `x g(x)` from `g` and its derivatives.
fn times_x(g: RadialValue, x: f64) -> RadialValue {
    RadialValue {
        value: x * g.value,
        d1: g.value + x * g.d1,
        d2: 2.0 * g.d1 + x * g.d2,
    }
}

/// Coefficient of `P_1` in the free-decay poloidal function.
pub fn decay_a_coefficient(n: usize, l: usize) -> f64 {
    let (n, l) = (n as f64, l as f64);
    ((2.0 * n + 1.0) * (2.0 * n + 2.0) + 2.0 * (l + 1.0)) / (2.0 * l + 4.0)
}

/// Free-decay toroidal function `x (P_{2n+1}(x) - P_1(x))`.
pub fn decay_radial_b(n: usize, x: f64) -> RadialValue {
    assert!(n >= 1);
    times_x(legendre_combination(&[(2 * n + 1, 1.0), (1, -1.0)], x), x)
}

/// Free-decay poloidal function `x (P_{2n+1}(x) - c P_1(x))` for harmonic degree `l`.
pub fn decay_radial_a(n: usize, l: usize, x: f64) -> RadialValue {
    assert!(n >= 1 && l >= 1);
    let c = decay_a_coefficient(n, l);
    times_x(legendre_combination(&[(2 * n + 1, 1.0), (1, -c)], x), x)
}

/// Coefficients `(a, b)` of `P_{n-1} + a P_n + b P_{n+1}` for the shell
/// toroidal family.
pub fn dynamo_b_coefficients(n: usize, map: &ShellMap) -> (f64, f64) {
    let q = map.x_inner() * map.factor();
    let nf = n as f64;
    let a = -q * (2.0 * nf + 1.0) / (q * (nf + 1.0).powi(2) - 2.0);
    (a, -1.0 - a)
}

/// Shell toroidal function in `xi`. For `x_i = 0.65` this is
/// `P_{n-1} - 13(2n+1) P_n / (13n^2+26n+6) - (13n^2-7) P_{n+1} / (13n^2+26n+6)`.
pub fn dynamo_radial_b(n: usize, xi: f64, map: &ShellMap) -> RadialValue {
    assert!(n >= 1);
    let (a, b) = dynamo_b_coefficients(n, map);
    legendre_combination(&[(n - 1, 1.0), (n, a), (n + 1, b)], xi)
}

/// Coefficients `(a, b)` of `P_{n-1} + a P_n + b P_{n+1}` for the shell
/// poloidal family at harmonic degree `l`.
pub fn dynamo_a_coefficients(n: usize, l: usize, map: &ShellMap) -> (f64, f64) {
    let nf = n as f64;
    let q = 2.0 * l as f64 / map.factor();
    let d = (nf + 1.0).powi(2) + q;
    ((2.0 * nf + 1.0) / d, -(nf * nf + q) / d)
}

/// Shell poloidal function in `xi` for harmonic degree `l`.
pub fn dynamo_radial_a(n: usize, l: usize, xi: f64, map: &ShellMap) -> RadialValue {
    assert!(n >= 1 && l >= 1);
    let (a, b) = dynamo_a_coefficients(n, l, map);
    legendre_combination(&[(n - 1, 1.0), (n, a), (n + 1, b)], xi)
}

/// `m`-th latitudinal function: normalized `P_l^1(mu)` with `l` from `parity`.
pub fn latitudinal_basis(m: usize, parity: Parity, mu: f64) -> f64 {
    plm1_terms(parity.degree(m), mu).value
}

/// The radial families, each tied to its coordinate and boundary conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialFamily {
    DecayToroidal,
    DecayPoloidal { parity: Parity },
    ShellToroidal { map: ShellMap },
    ShellPoloidal { map: ShellMap, parity: Parity },
}

impl RadialFamily {
    /// Evaluates mode `(n, m)`; `m` matters only for the poloidal families.
    pub fn eval(&self, n: usize, m: usize, z: f64) -> RadialValue {
        match *self {
            RadialFamily::DecayToroidal => decay_radial_b(n, z),
            RadialFamily::DecayPoloidal { parity } => decay_radial_a(n, parity.degree(m), z),
            RadialFamily::ShellToroidal { map } => dynamo_radial_b(n, z, &map),
            RadialFamily::ShellPoloidal { map, parity } => {
                dynamo_radial_a(n, parity.degree(m), z, &map)
            }
        }
    }
}

/// Radial functions tabulated at quadrature nodes, one row per flat mode index.
#[derive(Debug, Clone)]
pub struct RadialTable {
    pub value: Vec<Vec<f64>>,
    pub d1: Vec<Vec<f64>>,
    pub d2: Vec<Vec<f64>>,
}

impl RadialTable {
    pub fn build(family: &RadialFamily, index: &ModeIndexMap, rule: &QuadratureRule) -> Self {
        let mut table = RadialTable {
            value: Vec::with_capacity(index.len()),
            d1: Vec::with_capacity(index.len()),
            d2: Vec::with_capacity(index.len()),
        };
        for (_, n, m) in index.iter() {
            let vals: Vec<RadialValue> = rule.nodes().iter().map(|&z| family.eval(n, m, z)).collect();
            table.value.push(vals.iter().map(|v| v.value).collect());
            table.d1.push(vals.iter().map(|v| v.d1).collect());
            table.d2.push(vals.iter().map(|v| v.d2).collect());
        }
        table
    }
}

/// Latitudinal functions tabulated at interior Gauss nodes, one row per
/// latitudinal index `m`.
#[derive(Debug, Clone)]
pub struct LatitudinalTable {
    pub parity: Parity,
    pub value: Vec<Vec<f64>>,
    pub stretch: Vec<Vec<f64>>,
    pub laplace: Vec<Vec<f64>>,
}

impl LatitudinalTable {
    pub fn build(parity: Parity, n_lat: usize, rule: &QuadratureRule) -> Self {
        let mut table = LatitudinalTable {
            parity,
            value: Vec::with_capacity(n_lat),
            stretch: Vec::with_capacity(n_lat),
            laplace: Vec::with_capacity(n_lat),
        };
        for m in 1..=n_lat {
            let terms: Vec<LatitudinalTerms> = rule
                .nodes()
                .iter()
                .map(|&mu| plm1_terms(parity.degree(m), mu))
                .collect();
            table.value.push(terms.iter().map(|t| t.value).collect());
            table.stretch.push(terms.iter().map(|t| t.stretch).collect());
            table.laplace.push(terms.iter().map(|t| t.laplace).collect());
        }
        table
    }
}

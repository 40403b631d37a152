//! Galerkin projection of the decay and dynamo operators.
//!
//! Every matrix entry is a sum of separable products
//! `[sum_r w_r k(x_r) S_i(x_r) D S_j(x_r)] * [sum_t w_t c(mu_t) T_i(mu_t) E T_j(mu_t)]`
//! where `D` picks a radial derivative and `E` one of the latitudinal
//! operators tabulated in [`LatitudinalTable`]. The projection is taken with
//! plain `dx dmu` weights on both the test and the trial side.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::basis::{LatitudinalTable, ModeIndexMap, Parity, RadialFamily, RadialTable, ShellMap, mode_index};
use crate::error::{Error, Result};
use crate::linalg::lu_factor;
use crate::model::DynamoModel;
use crate::quadrature::{QuadratureRule, gauss_legendre};

/// Relative tolerance for the mass-matrix symmetry check.
pub const MASS_SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Quadrature points per basis function in each direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadratureDensity {
    pub radial: usize,
    pub latitudinal: usize,
}

impl Default for QuadratureDensity {
    fn default() -> Self {
        QuadratureDensity {
            radial: 4,
            latitudinal: 6,
        }
    }
}

impl QuadratureDensity {
    pub fn doubled(self) -> Self {
        QuadratureDensity {
            radial: 2 * self.radial,
            latitudinal: 2 * self.latitudinal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    DecayB,
    DecayA,
    Dynamo,
}

/// Toroidal (`B`) or poloidal (`A`) field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FieldKind {
    B,
    A,
}

impl std::str::FromStr for FieldKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "B" | "b" => Ok(FieldKind::B),
            "A" | "a" => Ok(FieldKind::A),
            _ => Err(Error::InvalidInput(format!("field must be B or A, got `{s}`"))),
        }
    }
}

impl std::fmt::Display for FieldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FieldKind::B => "B",
            FieldKind::A => "A",
        })
    }
}

/// Generalized eigenproblem `operator u = lambda mass u`.
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    pub mass: DMatrix<f64>,
    pub operator: DMatrix<f64>,
    pub index_map: ModeIndexMap,
    pub kind: ProblemKind,
}

impl GalerkinSystem {
    /// `mass^-1 operator` through a pivoted LU solve.
    pub fn reduced(&self) -> Result<DMatrix<f64>> {
        lu_factor(&self.mass)?.solve_matrix(&self.operator)
    }
}

/// Checks that `m` is symmetric to [`MASS_SYMMETRY_TOLERANCE`] relative to
/// its norm and positive definite.
pub fn check_mass(m: &DMatrix<f64>) -> Result<()> {
    let asym = (m - m.transpose()).norm();
    if asym > MASS_SYMMETRY_TOLERANCE * m.norm() {
        return Err(Error::InvalidInput(format!(
            "mass matrix is not symmetric (|M - M^T| = {asym:e})"
        )));
    }
    if m.clone().cholesky().is_none() {
        return Err(Error::InvalidInput("mass matrix is not positive definite".into()));
    }
    Ok(())
}

/// Basis tables and rules for one field on one grid.
#[derive(Debug, Clone)]
pub struct FieldTables {
    pub index: ModeIndexMap,
    pub radial_rule: QuadratureRule,
    pub lat_rule: QuadratureRule,
    pub radial: RadialTable,
    pub lat: LatitudinalTable,
}

impl FieldTables {
    pub fn build(
        family: RadialFamily,
        parity: Parity,
        n_radial: usize,
        n_lat: usize,
        density: QuadratureDensity,
    ) -> Result<Self> {
        if n_radial < 1 || n_lat < 1 {
            return Err(Error::InvalidInput(format!(
                "resolution must be at least 1x1, got {n_radial}x{n_lat}"
            )));
        }
        let index = mode_index(n_radial, n_lat);
        let radial_rule = gauss_legendre(density.radial * n_radial, -1.0, 1.0)?;
        let lat_rule = gauss_legendre(density.latitudinal * n_lat, -1.0, 1.0)?;
        let radial = RadialTable::build(&family, &index, &radial_rule);
        let lat = LatitudinalTable::build(parity, n_lat, &lat_rule);
        Ok(FieldTables {
            index,
            radial_rule,
            lat_rule,
            radial,
            lat,
        })
    }
}

/// Which tabulated radial quantity the trial side uses.
#[derive(Debug, Clone, Copy)]
pub enum RadialOp {
    Value,
    D1,
    D2,
}

/// Which tabulated latitudinal quantity the trial side uses.
#[derive(Debug, Clone, Copy)]
pub enum LatOp {
    Value,
    Stretch,
    Laplace,
}

fn radial_rows(t: &RadialTable, op: RadialOp) -> &[Vec<f64>] {
    match op {
        RadialOp::Value => &t.value,
        RadialOp::D1 => &t.d1,
        RadialOp::D2 => &t.d2,
    }
}

fn lat_rows(t: &LatitudinalTable, op: LatOp) -> &[Vec<f64>] {
    match op {
        LatOp::Value => &t.value,
        LatOp::Stretch => &t.stretch,
        LatOp::Laplace => &t.laplace,
    }
}

/// One separable term of a bilinear form.
pub struct SeparableTerm<'a> {
    /// Radial kernel at the radial nodes (quadrature weights not included).
    pub radial_kernel: &'a [f64],
    pub radial_op: RadialOp,
    /// Latitudinal kernel at the latitudinal nodes.
    pub lat_kernel: &'a [f64],
    pub lat_op: LatOp,
}

/// Projects separable terms with trial functions from `trial` onto test
/// functions from `test`. Both must share the quadrature rules.
pub fn project(test: &FieldTables, trial: &FieldTables, terms: &[SeparableTerm<'_>]) -> Result<DMatrix<f64>> {
    if test.radial_rule != trial.radial_rule || test.lat_rule != trial.lat_rule {
        return Err(Error::InvalidInput("test and trial tables use different quadrature rules".into()));
    }
    let nr = test.radial_rule.order();
    let nt = test.lat_rule.order();
    let (rows, cols) = (test.index.len(), trial.index.len());
    let mut out = DMatrix::zeros(rows, cols);
    for term in terms {
        if term.radial_kernel.len() != nr {
            return Err(Error::DimensionMismatch {
                expected: nr,
                found: term.radial_kernel.len(),
                context: "radial kernel samples",
            });
        }
        if term.lat_kernel.len() != nt {
            return Err(Error::DimensionMismatch {
                expected: nt,
                found: term.lat_kernel.len(),
                context: "latitudinal kernel samples",
            });
        }
        let rw: Vec<f64> = test
            .radial_rule
            .weights()
            .iter()
            .zip(term.radial_kernel)
            .map(|(w, k)| w * k)
            .collect();
        let lw: Vec<f64> = test
            .lat_rule
            .weights()
            .iter()
            .zip(term.lat_kernel)
            .map(|(w, k)| w * k)
            .collect();
        let trial_lat = lat_rows(&trial.lat, term.lat_op);
        let lat: Vec<Vec<f64>> = test
            .lat
            .value
            .iter()
            .map(|ti| trial_lat.iter().map(|tj| dot3(&lw, ti, tj)).collect())
            .collect();
        let trial_rad = radial_rows(&trial.radial, term.radial_op);
        for (ki, _, mi) in test.index.iter() {
            let si = &test.radial.value[ki];
            for (kj, _, mj) in trial.index.iter() {
                let t = lat[mi - 1][mj - 1];
                if t != 0.0 {
                    out[(ki, kj)] += dot3(&rw, si, &trial_rad[kj]) * t;
                }
            }
        }
    }
    Ok(out)
}

fn dot3(w: &[f64], a: &[f64], b: &[f64]) -> f64 {
    w.iter().zip(a).zip(b).map(|((w, a), b)| w * a * b).sum()
}

fn ones(n: usize) -> Vec<f64> {
    vec![1.0; n]
}

/// `[sum_r w_r S_i S_j] [sum_t w_t T_i T_j]`.
pub fn mass_matrix(t: &FieldTables) -> Result<DMatrix<f64>> {
    let r = ones(t.radial_rule.order());
    let l = ones(t.lat_rule.order());
    project(
        t,
        t,
        &[SeparableTerm {
            radial_kernel: &r,
            radial_op: RadialOp::Value,
            lat_kernel: &l,
            lat_op: LatOp::Value,
        }],
    )
}

/// `S'' - l(l+1) S / x^2` on the full sphere; the operator is the same for
/// both decay fields, only the basis differs.
fn decay_operator(t: &FieldTables) -> Result<DMatrix<f64>> {
    let r1 = ones(t.radial_rule.order());
    let inv_x2: Vec<f64> = t.radial_rule.nodes().iter().map(|x| 1.0 / (x * x)).collect();
    let l = ones(t.lat_rule.order());
    project(
        t,
        t,
        &[
            SeparableTerm {
                radial_kernel: &r1,
                radial_op: RadialOp::D2,
                lat_kernel: &l,
                lat_op: LatOp::Value,
            },
            SeparableTerm {
                radial_kernel: &inv_x2,
                radial_op: RadialOp::Value,
                lat_kernel: &l,
                lat_op: LatOp::Laplace,
            },
        ],
    )
}

/// Toroidal free-decay operator for `u = x B`.
pub fn decay_operator_b(t: &FieldTables) -> Result<DMatrix<f64>> {
    decay_operator(t)
}

/// Poloidal free-decay operator for `a = A / sin(theta)`.
pub fn decay_operator_a(t: &FieldTables) -> Result<DMatrix<f64>> {
    decay_operator(t)
}

/// Tables for a free-decay problem on `x` in `[-1, 1]` (the integrands are even).
pub fn decay_tables(
    field: FieldKind,
    n_radial: usize,
    n_lat: usize,
    parity: Parity,
    density: QuadratureDensity,
) -> Result<FieldTables> {
    let family = match field {
        FieldKind::B => RadialFamily::DecayToroidal,
        FieldKind::A => RadialFamily::DecayPoloidal { parity },
    };
    FieldTables::build(family, parity, n_radial, n_lat, density)
}

pub fn decay_system(
    field: FieldKind,
    n_radial: usize,
    n_lat: usize,
    parity: Parity,
    density: QuadratureDensity,
) -> Result<GalerkinSystem> {
    let t = decay_tables(field, n_radial, n_lat, parity, density)?;
    let mass = mass_matrix(&t)?;
    check_mass(&mass)?;
    let (operator, kind) = match field {
        FieldKind::B => (decay_operator_b(&t)?, ProblemKind::DecayB),
        FieldKind::A => (decay_operator_a(&t)?, ProblemKind::DecayA),
    };
    Ok(GalerkinSystem {
        mass,
        operator,
        index_map: t.index,
        kind,
    })
}

/// The dynamo operator split into its dynamo-number-independent blocks:
/// `K = [[L_AA, C_alpha M_AB], [C_omega M_BA, L_BB]]`, `M = diag(M_A, M_B)`.
#[derive(Debug, Clone)]
pub struct DynamoBlocks {
    pub map: ShellMap,
    /// Parity of the poloidal field; the toroidal field has the other one.
    pub parity: Parity,
    pub a: FieldTables,
    pub b: FieldTables,
    pub mass_a: DMatrix<f64>,
    pub mass_b: DMatrix<f64>,
    pub l_aa: DMatrix<f64>,
    pub l_bb: DMatrix<f64>,
    pub alpha_ab: DMatrix<f64>,
    pub shear_ba: DMatrix<f64>,
}

fn sample<F>(profile: &'static str, nodes: &[f64], radial: bool, f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
{
    nodes
        .iter()
        .map(|&z| {
            let v = f(z);
            if v.is_finite() {
                Ok(v)
            } else if radial {
                Err(Error::ProfileEvaluation { profile, x: z, mu: f64::NAN })
            } else {
                Err(Error::ProfileEvaluation { profile, x: f64::NAN, mu: z })
            }
        })
        .collect()
}

/// Assembles the blocks of the alpha-Omega problem in the shell.
///
/// In terms of `x` (with `d/dx = f d/dxi`):
///
/// * `L_BB`: `(1/x) d/dx(eta d(xB)/dx) - eta l(l+1) B / x^2`
/// * `L_AA`: `eta (A'' - l(l+1) A / x^2)`
/// * `M_AB`: `alpha_hat eta G x 2 mu B`
/// * `M_BA`: `(1/x) [-Omega_x s d/dmu(s A) + (1 - mu^2) Omega_mu dA/dx]`, `s = sin(theta)`
pub fn dynamo_blocks(
    model: &DynamoModel,
    n_radial: usize,
    n_lat: usize,
    parity: Parity,
    density: QuadratureDensity,
) -> Result<DynamoBlocks> {
    model.validate()?;
    let map = ShellMap::new(model.x_inner);
    let a = FieldTables::build(RadialFamily::ShellPoloidal { map, parity }, parity, n_radial, n_lat, density)?;
    let b = FieldTables::build(RadialFamily::ShellToroidal { map }, parity.flip(), n_radial, n_lat, density)?;
    let f = map.factor();

    let xs: Vec<f64> = a.radial_rule.nodes().iter().map(|&xi| map.to_x(xi)).collect();
    let mus = a.lat_rule.nodes();
    let eta = sample("eta", &xs, true, |x| {
        let v = model.eta.eval(x).0;
        if v > 0.0 { v } else { f64::NAN }
    })?;
    let eta_x = sample("eta", &xs, true, |x| model.eta.eval(x).1)?;
    let g = sample("g", &xs, true, |x| model.g.eval(x).0)?;
    let h = sample("omega", &xs, true, |x| model.omega.transition.eval(x).0)?;
    let h_x = sample("omega", &xs, true, |x| model.omega.transition.eval(x).1)?;
    let alpha_r = sample("alpha", &xs, true, |x| model.alpha.radial.eval(x).0)?;
    let alpha_l = sample("alpha", mus, false, |mu| model.alpha.latitudinal.eval(mu).0)?;
    let w_in = sample("omega", mus, false, |mu| model.omega.inner.eval(mu).0)?;
    let w_out = sample("omega", mus, false, |mu| model.omega.outer.eval(mu).0)?;
    let dw_in = sample("omega", mus, false, |mu| model.omega.inner.eval(mu).1)?;
    let dw_out = sample("omega", mus, false, |mu| model.omega.outer.eval(mu).1)?;

    let lat1 = ones(mus.len());
    let map_r = |k: &dyn Fn(usize) -> f64| -> Vec<f64> { (0..xs.len()).map(k).collect() };
    let map_l = |k: &dyn Fn(usize) -> f64| -> Vec<f64> { (0..mus.len()).map(k).collect() };

    let mass_a = mass_matrix(&a)?;
    let mass_b = mass_matrix(&b)?;
    check_mass(&mass_a)?;
    check_mass(&mass_b)?;

    let eta_f2 = map_r(&|r| eta[r] * f * f);
    let eta_inv_x2 = map_r(&|r| eta[r] / (xs[r] * xs[r]));
    let l_aa = project(
        &a,
        &a,
        &[
            SeparableTerm {
                radial_kernel: &eta_f2,
                radial_op: RadialOp::D2,
                lat_kernel: &lat1,
                lat_op: LatOp::Value,
            },
            SeparableTerm {
                radial_kernel: &eta_inv_x2,
                radial_op: RadialOp::Value,
                lat_kernel: &lat1,
                lat_op: LatOp::Laplace,
            },
        ],
    )?;

    let k0 = map_r(&|r| eta_x[r] / xs[r]);
    let k1 = map_r(&|r| f * (eta_x[r] + 2.0 * eta[r] / xs[r]));
    let l_bb = project(
        &b,
        &b,
        &[
            SeparableTerm {
                radial_kernel: &k0,
                radial_op: RadialOp::Value,
                lat_kernel: &lat1,
                lat_op: LatOp::Value,
            },
            SeparableTerm {
                radial_kernel: &k1,
                radial_op: RadialOp::D1,
                lat_kernel: &lat1,
                lat_op: LatOp::Value,
            },
            SeparableTerm {
                radial_kernel: &eta_f2,
                radial_op: RadialOp::D2,
                lat_kernel: &lat1,
                lat_op: LatOp::Value,
            },
            SeparableTerm {
                radial_kernel: &eta_inv_x2,
                radial_op: RadialOp::Value,
                lat_kernel: &lat1,
                lat_op: LatOp::Laplace,
            },
        ],
    )?;

    let src_r = map_r(&|r| alpha_r[r] * eta[r] * g[r] * xs[r]);
    let src_l = map_l(&|t| alpha_l[t] * 2.0 * mus[t]);
    let alpha_ab = project(
        &a,
        &b,
        &[SeparableTerm {
            radial_kernel: &src_r,
            radial_op: RadialOp::Value,
            lat_kernel: &src_l,
            lat_op: LatOp::Value,
        }],
    )?;

    let shear_x = map_r(&|r| -h_x[r] / xs[r]);
    let shear_x_lat = map_l(&|t| w_out[t] - w_in[t]);
    let f_over_x = map_r(&|r| f / xs[r]);
    let h_f_over_x = map_r(&|r| h[r] * f / xs[r]);
    let sin2 = |t: usize| 1.0 - mus[t] * mus[t];
    let d_in = map_l(&|t| sin2(t) * dw_in[t]);
    let d_jump = map_l(&|t| sin2(t) * (dw_out[t] - dw_in[t]));
    let shear_ba = project(
        &b,
        &a,
        &[
            SeparableTerm {
                radial_kernel: &shear_x,
                radial_op: RadialOp::Value,
                lat_kernel: &shear_x_lat,
                lat_op: LatOp::Stretch,
            },
            SeparableTerm {
                radial_kernel: &f_over_x,
                radial_op: RadialOp::D1,
                lat_kernel: &d_in,
                lat_op: LatOp::Value,
            },
            SeparableTerm {
                radial_kernel: &h_f_over_x,
                radial_op: RadialOp::D1,
                lat_kernel: &d_jump,
                lat_op: LatOp::Value,
            },
        ],
    )?;

    Ok(DynamoBlocks {
        map,
        parity,
        a,
        b,
        mass_a,
        mass_b,
        l_aa,
        l_bb,
        alpha_ab,
        shear_ba,
    })
}

fn stack(aa: &DMatrix<f64>, ab: &DMatrix<f64>, ba: &DMatrix<f64>, bb: &DMatrix<f64>) -> DMatrix<f64> {
    let (na, nb) = (aa.nrows(), bb.nrows());
    let mut m = DMatrix::zeros(na + nb, na + nb);
    m.view_mut((0, 0), (na, na)).copy_from(aa);
    m.view_mut((0, na), (na, nb)).copy_from(ab);
    m.view_mut((na, 0), (nb, na)).copy_from(ba);
    m.view_mut((na, na), (nb, nb)).copy_from(bb);
    m
}

impl DynamoBlocks {
    /// The coupled `2NN x 2NN` system, unknowns ordered `(A, B)`.
    pub fn system(&self, c_alpha: f64, c_omega: f64) -> GalerkinSystem {
        let za = DMatrix::zeros(self.mass_a.nrows(), self.mass_b.ncols());
        let zb = DMatrix::zeros(self.mass_b.nrows(), self.mass_a.ncols());
        GalerkinSystem {
            mass: stack(&self.mass_a, &za, &zb, &self.mass_b),
            operator: stack(&self.l_aa, &(&self.alpha_ab * c_alpha), &(&self.shear_ba * c_omega), &self.l_bb),
            index_map: self.a.index,
            kind: ProblemKind::Dynamo,
        }
    }

    /// Mass-reduced blocks, factored once and reused across dynamo numbers.
    pub fn reduce(&self) -> Result<ReducedDynamo> {
        let lu_a = lu_factor(&self.mass_a)?;
        let lu_b = lu_factor(&self.mass_b)?;
        Ok(ReducedDynamo {
            aa: lu_a.solve_matrix(&self.l_aa)?,
            ab: lu_a.solve_matrix(&self.alpha_ab)?,
            ba: lu_b.solve_matrix(&self.shear_ba)?,
            bb: lu_b.solve_matrix(&self.l_bb)?,
        })
    }
}

/// `M^-1 K` by blocks; linear in both dynamo numbers.
#[derive(Debug, Clone)]
pub struct ReducedDynamo {
    pub aa: DMatrix<f64>,
    pub ab: DMatrix<f64>,
    pub ba: DMatrix<f64>,
    pub bb: DMatrix<f64>,
}

impl ReducedDynamo {
    pub fn matrix(&self, c_alpha: f64, c_omega: f64) -> DMatrix<f64> {
        stack(&self.aa, &(&self.ab * c_alpha), &(&self.ba * c_omega), &self.bb)
    }
}

/// The coupled Galerkin system of `model` at the given `C_alpha`.
pub fn dynamo_operator(
    model: &DynamoModel,
    c_alpha: f64,
    n_radial: usize,
    n_lat: usize,
    parity: Parity,
) -> Result<GalerkinSystem> {
    Ok(dynamo_blocks(model, n_radial, n_lat, parity, QuadratureDensity::default())?.system(c_alpha, model.c_omega))
}

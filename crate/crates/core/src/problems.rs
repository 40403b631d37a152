//! Benchmark drivers: free decay in the full sphere and the alpha-Omega
//! critical dynamo number in the shell.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::assembly::{
    DynamoBlocks, FieldKind, QuadratureDensity, ReducedDynamo, decay_system, dynamo_blocks,
};
use crate::basis::{Parity, RadialFamily, latitudinal_basis};
use crate::error::{Error, Result};
use crate::linalg::{DEFAULT_ROOT_TOLERANCE, Spectrum, eig_dense, eigenvalues, find_root};
use crate::model::DynamoModel;
use crate::orthopoly::spherical_bessel_j;
use crate::quadrature::gauss_legendre;

pub const SCHEMA_VERSION: u32 = 1;

/// Latitudinal resolution used by the decay benchmark.
pub const DECAY_N_LAT: usize = 6;

/// Gauss points on `[0, 1]` for the field-error integral.
pub const FIELD_ERROR_POINTS: usize = 96;

/// Values below these are at the binary64 floor and flagged as such.
pub const E_WAVENUMBER_FLOOR: f64 = 1e-13;
pub const E_FIELD_FLOOR: f64 = 1e-26;

/// Bracket width at which the critical `C_alpha` search stops.
pub const CRITICAL_TOLERANCE: f64 = 1e-10;

pub const DEFAULT_BRACKET: (f64, f64) = (0.1, 1.0);

/// Reference free-decay mode of degree 1: `u(x) = x j_1(k x)` with
/// `lambda = -k^2`, scaled to 1 at `x = 0.5` (toroidal) or `x = 1` (poloidal).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticMode {
    pub field: FieldKind,
    pub wavenumber: f64,
    pub lambda_true: f64,
    pub scale_point: f64,
    scale: f64,
}

impl AnalyticMode {
    pub fn profile(&self, x: f64) -> Result<f64> {
        Ok(x * spherical_bessel_j(1, self.wavenumber * x)? / self.scale)
    }
}

/// First zero of `j_1` (toroidal, `B(1) = 0`) or of `j_0` (poloidal, vacuum
/// matching at degree 1).
pub fn analytic_decay_mode(field: FieldKind) -> Result<AnalyticMode> {
    let (wavenumber, scale_point) = match field {
        FieldKind::B => (find_root(|x| spherical_bessel_j(1, x), 4.0, 5.0, DEFAULT_ROOT_TOLERANCE)?, 0.5),
        FieldKind::A => (find_root(|x| spherical_bessel_j(0, x), 3.0, 4.0, DEFAULT_ROOT_TOLERANCE)?, 1.0),
    };
    let scale = scale_point * spherical_bessel_j(1, wavenumber * scale_point)?;
    Ok(AnalyticMode {
        field,
        wavenumber,
        lambda_true: -wavenumber * wavenumber,
        scale_point,
        scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub x: f64,
    pub weight: f64,
    pub numeric: f64,
    pub analytic: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayResult {
    pub field_kind: FieldKind,
    pub n_radial: usize,
    pub n_lat: usize,
    pub lambda_num: f64,
    pub lambda_true: f64,
    /// `|lambda_true - lambda_num|`.
    pub e_lambda: f64,
    /// `|sqrt|lambda_num| - sqrt|lambda_true||`, about `e_lambda / (2 k)`.
    pub e_wavenumber: f64,
    /// `int_0^1 (u_num - u_true)^2 dx` with both profiles scaled.
    pub e_field: f64,
    /// Set when `e_wavenumber` or `e_field` sits at the binary64 floor.
    pub floored: bool,
    /// Scaled profiles at the Gauss nodes used for `e_field`.
    pub radial_profile: Vec<ProfilePoint>,
}

/// Leading free-decay mode at the given resolution, compared with the
/// analytic degree-1 mode.
pub fn solve_free_decay(field: FieldKind, n_radial: usize, n_lat: usize, parity: Parity) -> Result<DecayResult> {
    solve_free_decay_with(field, n_radial, n_lat, parity, QuadratureDensity::default())
}

pub fn solve_free_decay_with(
    field: FieldKind,
    n_radial: usize,
    n_lat: usize,
    parity: Parity,
    density: QuadratureDensity,
) -> Result<DecayResult> {
    if n_radial < 2 {
        return Err(Error::InvalidInput(format!("decay needs n_radial >= 2, got {n_radial}")));
    }
    if parity != Parity::Odd {
        return Err(Error::InvalidInput(
            "the analytic reference modes are degree 1; decay runs support parity 0 only".into(),
        ));
    }
    let exact = analytic_decay_mode(field)?;
    let system = decay_system(field, n_radial, n_lat, parity, density)?;
    let spectrum = eig_dense(&system.reduced()?)?;
    let lambda = spectrum.leading();
    let coeffs = &spectrum.eigenvectors[0];

    let family = match field {
        FieldKind::B => RadialFamily::DecayToroidal,
        FieldKind::A => RadialFamily::DecayPoloidal { parity },
    };
    let raw = |x: f64| -> f64 {
        system
            .index_map
            .iter()
            .filter(|&(_, _, m)| m == 1)
            .map(|(k, n, m)| coeffs[k].re * family.eval(n, m, x).value)
            .sum()
    };
    let norm = raw(exact.scale_point);
    if norm == 0.0 {
        return Err(Error::InvalidInput("leading decay mode vanishes at the scaling point".into()));
    }

    let rule = gauss_legendre(FIELD_ERROR_POINTS, 0.0, 1.0)?;
    let mut radial_profile = Vec::with_capacity(rule.order());
    let mut e_field = 0.0;
    for (&x, &weight) in rule.nodes().iter().zip(rule.weights()) {
        let numeric = raw(x) / norm;
        let analytic = exact.profile(x)?;
        e_field += weight * (numeric - analytic).powi(2);
        radial_profile.push(ProfilePoint {
            x,
            weight,
            numeric,
            analytic,
        });
    }
    let e_wavenumber = ((-lambda.re).abs().sqrt() - exact.wavenumber).abs();
    Ok(DecayResult {
        field_kind: field,
        n_radial,
        n_lat,
        lambda_num: lambda.re,
        lambda_true: exact.lambda_true,
        e_lambda: (exact.lambda_true - lambda.re).abs(),
        e_wavenumber,
        e_field,
        floored: e_wavenumber < E_WAVENUMBER_FLOOR || e_field < E_FIELD_FLOOR,
        radial_profile,
    })
}

/// One row per radial resolution; rows are computed on up to `jobs` threads
/// and returned in input order.
pub fn convergence_table(
    field: FieldKind,
    n_radial: impl IntoIterator<Item = usize>,
    n_lat: usize,
    parity: Parity,
    jobs: usize,
) -> Result<Vec<DecayResult>> {
    let sizes: Vec<usize> = n_radial.into_iter().collect();
    let jobs = jobs.clamp(1, sizes.len().max(1));
    let mut rows: Vec<Option<Result<DecayResult>>> = (0..sizes.len()).map(|_| None).collect();
    let chunk = sizes.len().div_ceil(jobs).max(1);
    std::thread::scope(|scope| {
        for (chunk_sizes, chunk_rows) in sizes.chunks(chunk).zip(rows.chunks_mut(chunk)) {
            scope.spawn(move || {
                for (&n, slot) in chunk_sizes.iter().zip(chunk_rows.iter_mut()) {
                    *slot = Some(solve_free_decay(field, n, n_lat, parity));
                }
            });
        }
    });
    rows.into_iter().map(|r| r.expect("every row is computed")).collect()
}

/// Dynamo operator at fixed resolution, reduced once and evaluated for any
/// `C_alpha`.
#[derive(Debug, Clone)]
pub struct DynamoSolver {
    pub blocks: DynamoBlocks,
    pub reduced: ReducedDynamo,
    pub c_omega: f64,
}

impl DynamoSolver {
    pub fn new(model: &DynamoModel, n_radial: usize, n_lat: usize, parity: Parity) -> Result<Self> {
        Self::with_density(model, n_radial, n_lat, parity, QuadratureDensity::default())
    }

    pub fn with_density(
        model: &DynamoModel,
        n_radial: usize,
        n_lat: usize,
        parity: Parity,
        density: QuadratureDensity,
    ) -> Result<Self> {
        if n_radial < 2 || n_lat < 2 {
            return Err(Error::InvalidInput(format!(
                "dynamo resolution must be at least 2x2, got {n_radial}x{n_lat}"
            )));
        }
        let blocks = dynamo_blocks(model, n_radial, n_lat, parity, density)?;
        let reduced = blocks.reduce()?;
        Ok(DynamoSolver {
            blocks,
            reduced,
            c_omega: model.c_omega,
        })
    }

    fn matrix(&self, c_alpha: f64) -> Result<DMatrix<f64>> {
        if !(c_alpha >= 0.0) || !c_alpha.is_finite() {
            return Err(Error::InvalidInput(format!("C_alpha must be finite and >= 0, got {c_alpha}")));
        }
        Ok(self.reduced.matrix(c_alpha, self.c_omega))
    }

    /// Eigenvalue with the largest real part.
    pub fn leading(&self, c_alpha: f64) -> Result<Complex64> {
        Ok(eigenvalues(&self.matrix(c_alpha)?)?[0])
    }

    pub fn spectrum(&self, c_alpha: f64) -> Result<Spectrum> {
        eig_dense(&self.matrix(c_alpha)?)
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.blocks.a.index.n_radial(), self.blocks.a.index.n_lat())
    }
}

pub fn solve_dynamo(model: &DynamoModel, c_alpha: f64, n_radial: usize, n_lat: usize, parity: Parity) -> Result<Spectrum> {
    DynamoSolver::new(model, n_radial, n_lat, parity)?.spectrum(c_alpha)
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalResult {
    pub c_alpha_crit: f64,
    pub omega: f64,
    pub n_radial: usize,
    pub n_lat: usize,
    pub growth_rate_residual: f64,
}

/// Root of `g(C_alpha) = max Re lambda` inside `bracket`.
pub fn find_critical_calpha(
    model: &DynamoModel,
    n_radial: usize,
    n_lat: usize,
    bracket: (f64, f64),
    parity: Parity,
) -> Result<CriticalResult> {
    critical_for(&DynamoSolver::new(model, n_radial, n_lat, parity)?, bracket)
}

pub fn critical_for(solver: &DynamoSolver, bracket: (f64, f64)) -> Result<CriticalResult> {
    let (lo, hi) = bracket;
    if !(lo < hi) {
        return Err(Error::InvalidInput(format!("bracket needs lo < hi, got ({lo}, {hi})")));
    }
    let g_lo = solver.leading(lo)?.re;
    let g_hi = solver.leading(hi)?.re;
    if !(g_lo < 0.0 && g_hi > 0.0) {
        return Err(Error::BracketNotCritical { lo, hi, g_lo, g_hi });
    }
    let c = find_root(|c| Ok(solver.leading(c)?.re), lo, hi, CRITICAL_TOLERANCE)?;
    let lead = solver.leading(c)?;
    let (n_radial, n_lat) = solver.resolution();
    Ok(CriticalResult {
        c_alpha_crit: c,
        omega: lead.im.abs(),
        n_radial,
        n_lat,
        growth_rate_residual: lead.re.abs(),
    })
}

/// Uniform plotting grid on `[x_inner, 1] x [0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SnapshotGrid {
    pub n_x: usize,
    pub n_theta: usize,
}

impl Default for SnapshotGrid {
    fn default() -> Self {
        SnapshotGrid { n_x: 64, n_theta: 128 }
    }
}

/// Phases covering half a cycle.
pub const HALF_CYCLE_PHASES: [f64; 4] = [
    0.0,
    std::f64::consts::FRAC_PI_4,
    std::f64::consts::FRAC_PI_2,
    3.0 * std::f64::consts::FRAC_PI_4,
];

/// Fields on the grid, row `i` at `grid_x[i]`, column `j` at `grid_theta[j]`.
#[derive(Debug, Clone, Serialize)]
pub struct FieldSnapshot {
    pub phase: f64,
    pub grid_x: Vec<f64>,
    pub grid_theta: Vec<f64>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
}

fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `Re(e^{i phase} B)` and `Re(e^{i phase} A)` of a dynamo eigenvector
/// ordered `(A, B)`, with `A = sin(theta) sum a_k S^A_k T^A_k`.
pub fn reconstruct_fields(
    blocks: &DynamoBlocks,
    eigenvector: &[Complex64],
    grid: SnapshotGrid,
    phase: f64,
) -> Result<FieldSnapshot> {
    let na = blocks.a.index.len();
    let nb = blocks.b.index.len();
    if eigenvector.len() != na + nb {
        return Err(Error::DimensionMismatch {
            expected: na + nb,
            found: eigenvector.len(),
            context: "dynamo eigenvector length",
        });
    }
    let map = blocks.map;
    let parity_a = blocks.parity;
    let parity_b = parity_a.flip();
    let fam_a = RadialFamily::ShellPoloidal { map, parity: parity_a };
    let fam_b = RadialFamily::ShellToroidal { map };
    let rot = Complex64::from_polar(1.0, phase);
    let coef: Vec<Complex64> = eigenvector.iter().map(|z| z * rot).collect();

    let grid_x = uniform(map.x_inner(), 1.0, grid.n_x);
    let grid_theta = uniform(0.0, std::f64::consts::PI, grid.n_theta);
    let mus: Vec<f64> = grid_theta.iter().map(|t| t.cos().clamp(-1.0, 1.0)).collect();

    let n_lat = blocks.a.index.n_lat();
    let lat = |parity: Parity| -> Vec<Vec<f64>> {
        (1..=n_lat)
            .map(|m| mus.iter().map(|&mu| latitudinal_basis(m, parity, mu)).collect())
            .collect()
    };
    let lat_a = lat(parity_a);
    let lat_b = lat(parity_b);

    let mut b = vec![vec![0.0; grid_theta.len()]; grid_x.len()];
    let mut a = vec![vec![0.0; grid_theta.len()]; grid_x.len()];
    for (i, &x) in grid_x.iter().enumerate() {
        let xi = map.to_xi(x).clamp(-1.0, 1.0);
        // radial parts first, folded with the coefficients per latitudinal mode
        let mut ra = vec![0.0; n_lat];
        let mut rb = vec![0.0; n_lat];
        for (k, n, m) in blocks.a.index.iter() {
            ra[m - 1] += coef[k].re * fam_a.eval(n, m, xi).value;
        }
        for (k, n, m) in blocks.b.index.iter() {
            rb[m - 1] += coef[na + k].re * fam_b.eval(n, m, xi).value;
        }
        for (j, theta) in grid_theta.iter().enumerate() {
            let s = theta.sin();
            a[i][j] = s * (0..n_lat).map(|m| ra[m] * lat_a[m][j]).sum::<f64>();
            b[i][j] = (0..n_lat).map(|m| rb[m] * lat_b[m][j]).sum::<f64>();
        }
    }
    Ok(FieldSnapshot {
        phase,
        grid_x,
        grid_theta,
        b,
        a,
    })
}

/// Marginal eigenmode at criticality with snapshots over half a cycle.
#[derive(Debug, Clone, Serialize)]
pub struct SnapshotSet {
    pub schema_version: u32,
    pub model: String,
    pub critical: CriticalResult,
    pub snapshots: Vec<FieldSnapshot>,
}

pub fn critical_snapshots(
    model: &DynamoModel,
    n_radial: usize,
    n_lat: usize,
    bracket: (f64, f64),
    parity: Parity,
    grid: SnapshotGrid,
) -> Result<SnapshotSet> {
    let solver = DynamoSolver::new(model, n_radial, n_lat, parity)?;
    let critical = critical_for(&solver, bracket)?;
    let spectrum = solver.spectrum(critical.c_alpha_crit)?;
    // of the conjugate pair take the member with positive frequency
    let k = if spectrum.eigenvalues.len() > 1
        && spectrum.eigenvalues[0].im < 0.0
        && (spectrum.eigenvalues[1] - spectrum.eigenvalues[0].conj()).norm() <= 1e-9 * spectrum.eigenvalues[0].norm()
    {
        1
    } else {
        0
    };
    let vector = &spectrum.eigenvectors[k];
    let snapshots = HALF_CYCLE_PHASES
        .iter()
        .map(|&phase| reconstruct_fields(&solver.blocks, vector, grid, phase))
        .collect::<Result<Vec<_>>>()?;
    Ok(SnapshotSet {
        schema_version: SCHEMA_VERSION,
        model: model.name.clone(),
        critical,
        snapshots,
    })
}

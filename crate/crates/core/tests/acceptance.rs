//! Acceptance gate. Prints one `[PASS]` / `[FAIL]` line per criterion
//! (indented detail lines under it) and exits nonzero if any criterion fails.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::{boundary_residual, monomial_integral, FAMILIES};
use galerkin_dynamo::assembly::{check_mass, decay_system};
use galerkin_dynamo::basis::Parity;
use galerkin_dynamo::linalg::{eigenvalues, sort_eigenvalues};
use galerkin_dynamo::orthopoly::spherical_bessel_j;
use galerkin_dynamo::problems::{critical_for, solve_free_decay_with, DynamoSolver, DEFAULT_BRACKET};
use galerkin_dynamo::{
    find_root, gauss_legendre, solve_free_decay, DynamoModel, FieldKind,
    QuadratureDensity,
};
use nalgebra::DMatrix;
use num_complex::Complex64;

const DECAY_N_LAT: usize = 6;
const DECAY_ROW_LIMIT: Duration = Duration::from_secs(10);
const DYNAMO_ROW_LIMIT: Duration = Duration::from_secs(300);

const E_LAMBDA_N5: f64 = 5e-10;
const E_LAMBDA_HIGH: f64 = 1e-9;
const A_WAVENUMBER: f64 = 1e-9;
const E_FIELD_B_N5: f64 = 1e-10;
const E_FIELD_A_N4: f64 = 1e-10;
const FIELD_DROP_FACTOR: f64 = 50.0;
const J1_ZERO: f64 = 4.49340946;
const J1_ZERO_TOL: f64 = 1e-7;
const LEADING_B: f64 = -20.1907286;
const LEADING_B_TOL: f64 = 1e-5;
const C_ALPHA_TOL: f64 = 0.005;
const OMEGA_TOL: f64 = 1.5;
const QUADRATURE_REL: f64 = 1e-13;
const BC_RESIDUAL: f64 = 1e-10;
const MASS_SYMMETRY: f64 = 1e-14;
const EIGEN_RESIDUAL: f64 = 1e-8;
const DECOUPLING: f64 = 1e-10;
const DOUBLING: f64 = 1e-9;

/// Table 2: resolution, C_alpha_crit, omega.
const TABLE_2: [(usize, f64, f64); 6] = [
    (8, 0.443, 180.5),
    (10, 0.4175, 175.1),
    (12, 0.4095, 172.2),
    (13, 0.411, 172.4),
    (14, 0.4122, 172.7),
    (16, 0.4125, 172.9),
];

#[derive(Default)]
struct Criterion {
    ok: bool,
    lines: Vec<String>,
}

impl Criterion {
    fn new() -> Self {
        Criterion { ok: true, lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.ok &= ok;
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.lines.push(format!("     {line}"));
    }
}

fn report(id: usize, name: &str, c: &Criterion) -> bool {
    println!("[{}] {id}. {name}", if c.ok { "PASS" } else { "FAIL" });
    for l in &c.lines {
        println!("      {l}");
    }
    c.ok
}

fn decay_b_eigenvalue() -> Criterion {
    let mut c = Criterion::new();
    for n in 5..=8 {
        let t = Instant::now();
        let r = solve_free_decay(FieldKind::B, n, DECAY_N_LAT, Parity::Odd).unwrap();
        let dt = t.elapsed();
        let bound = if n == 5 { E_LAMBDA_N5 } else { E_LAMBDA_HIGH };
        c.check(
            r.e_lambda <= bound,
            format!("N={n}: |lambda_true - lambda_num| = {:.3e} <= {bound:.0e}", r.e_lambda),
        );
        c.note(format!("N={n}: |sqrt|lambda| - k| = {:.3e}", r.e_wavenumber));
        c.check(dt < DECAY_ROW_LIMIT, format!("N={n}: {:.3} s < {} s", dt.as_secs_f64(), DECAY_ROW_LIMIT.as_secs()));
    }
    c
}

fn decay_a_eigenvalue() -> Criterion {
    let mut c = Criterion::new();
    for n in 5..=8 {
        let t = Instant::now();
        let r = solve_free_decay(FieldKind::A, n, DECAY_N_LAT, Parity::Odd).unwrap();
        let dt = t.elapsed();
        let err = (r.lambda_num.abs().sqrt() - std::f64::consts::PI).abs();
        c.check(err <= A_WAVENUMBER, format!("N={n}: |sqrt|lambda| - pi| = {err:.3e} <= {A_WAVENUMBER:.0e}"));
        c.check(dt < DECAY_ROW_LIMIT, format!("N={n}: {:.3} s < {} s", dt.as_secs_f64(), DECAY_ROW_LIMIT.as_secs()));
    }
    c
}

fn decay_field_errors() -> Criterion {
    let mut c = Criterion::new();
    for (field, n_check, bound) in [(FieldKind::B, 5, E_FIELD_B_N5), (FieldKind::A, 4, E_FIELD_A_N4)] {
        let e: Vec<f64> = (3..=5)
            .map(|n| solve_free_decay(field, n, DECAY_N_LAT, Parity::Odd).unwrap().e_field)
            .collect();
        let at = e[n_check - 3];
        c.check(at <= bound, format!("E({field}) at N={n_check} = {at:.3e} <= {bound:.0e}"));
        for (k, w) in e.windows(2).enumerate() {
            let ratio = w[0] / w[1];
            c.check(
                ratio >= FIELD_DROP_FACTOR,
                format!("E({field}) N={}->{}: {:.3e} -> {:.3e}, factor {ratio:.0} >= {FIELD_DROP_FACTOR}", k + 3, k + 4, w[0], w[1]),
            );
        }
    }
    c
}

fn analytic_anchors() -> Criterion {
    let mut c = Criterion::new();
    let root = find_root(|x| spherical_bessel_j(1, x), 4.0, 5.0, 1e-14).unwrap();
    c.check((root - J1_ZERO).abs() <= J1_ZERO_TOL, format!("first zero of j1 = {root:.10} (want {J1_ZERO} +- {J1_ZERO_TOL:.0e})"));
    let lead = solve_free_decay(FieldKind::B, 5, DECAY_N_LAT, Parity::Odd).unwrap().lambda_num;
    c.check(
        (lead - LEADING_B).abs() <= LEADING_B_TOL,
        format!("leading decay-B eigenvalue = {lead:.10} (want {LEADING_B} +- {LEADING_B_TOL:.0e})"),
    );
    c
}

fn model_b_table() -> Criterion {
    let mut c = Criterion::new();
    let model = DynamoModel::model_b();
    for (n, ca, om) in TABLE_2 {
        let t = Instant::now();
        let solver = DynamoSolver::new(&model, n, n, Parity::Odd).unwrap();
        let r = critical_for(&solver, DEFAULT_BRACKET).unwrap();
        let dt = t.elapsed();
        let (dc, dw) = ((r.c_alpha_crit - ca).abs(), (r.omega - om).abs());
        c.check(
            dc <= C_ALPHA_TOL && dw <= OMEGA_TOL,
            format!(
                "{n}x{n}: C_alpha = {:.5} (table {ca}, diff {dc:.4}), omega = {:.3} (table {om}, diff {dw:.3})",
                r.c_alpha_crit, r.omega
            ),
        );
        c.check(dt < DYNAMO_ROW_LIMIT, format!("{n}x{n}: {:.2} s < {} s", dt.as_secs_f64(), DYNAMO_ROW_LIMIT.as_secs()));
    }
    c
}

fn quadrature_exactness(c: &mut Criterion) {
    let mut worst = 0.0f64;
    for n in [2, 4, 8, 16, 32] {
        for (a, b) in [(-1.0, 1.0), (0.0, 1.0), (0.65, 1.0)] {
            let rule = gauss_legendre(n, a, b).unwrap();
            for k in 0..2 * n {
                let exact = monomial_integral(k, a, b);
                // scale by the integral of |x^k| so odd moments over [-1, 1] are judged fairly
                let scale: f64 = if a < 0.0 { 2.0 / (k as f64 + 1.0) } else { exact };
                let got = rule.integrate_fn(|x| x.powi(k as i32));
                worst = worst.max((got - exact).abs() / scale);
            }
        }
    }
    c.check(worst <= QUADRATURE_REL, format!("quadrature: worst relative error on x^k, k < 2n = {worst:.2e}"));
}

fn boundary_conditions(c: &mut Criterion) {
    let mut worst = 0.0f64;
    for family in FAMILIES {
        for n in 1..=8 {
            for m in 1..=8 {
                worst = worst.max(boundary_residual(family, n, m));
            }
        }
    }
    c.check(worst <= BC_RESIDUAL, format!("boundary residuals, all families, n, m <= 8: {worst:.2e}"));
}

fn mass_properties(c: &mut Criterion, model: &DynamoModel) {
    let mut worst = 0.0f64;
    let mut spd = true;
    let mut masses = Vec::new();
    for field in [FieldKind::B, FieldKind::A] {
        for n in 3..=8 {
            masses.push(decay_system(field, n, DECAY_N_LAT, Parity::Odd, QuadratureDensity::default()).unwrap().mass);
        }
    }
    for n in [4, 8, 12] {
        let s = DynamoSolver::new(model, n, n, Parity::Odd).unwrap();
        masses.push(s.blocks.mass_a);
        masses.push(s.blocks.mass_b);
    }
    for m in &masses {
        worst = worst.max((m - m.transpose()).amax() / m.amax());
        spd &= m.clone().cholesky().is_some() && check_mass(m).is_ok();
    }
    c.check(worst <= MASS_SYMMETRY && spd, format!("mass matrices: asymmetry {worst:.2e}, positive definite: {spd}"));
}

fn generalized_residual(k: &DMatrix<f64>, m: &DMatrix<f64>, lambda: Complex64, v: &[Complex64]) -> f64 {
    let v = nalgebra::DVector::from_column_slice(v);
    let kc = k.map(|x| Complex64::new(x, 0.0));
    let mc = m.map(|x| Complex64::new(x, 0.0));
    let r = &kc * &v - &mc * &v * lambda;
    r.norm() / ((k.norm() + lambda.norm() * m.norm()) * v.norm())
}

fn eigen_residuals(c: &mut Criterion, model: &DynamoModel) {
    let mut worst = 0.0f64;
    for field in [FieldKind::B, FieldKind::A] {
        let sys = decay_system(field, 8, DECAY_N_LAT, Parity::Odd, QuadratureDensity::default()).unwrap();
        let s = galerkin_dynamo::eig_dense(&sys.reduced().unwrap()).unwrap();
        for (l, v) in s.eigenvalues.iter().zip(&s.eigenvectors) {
            worst = worst.max(generalized_residual(&sys.operator, &sys.mass, *l, v));
        }
    }
    for (n, ca) in [(8, 0.41), (12, 0.41)] {
        let solver = DynamoSolver::new(model, n, n, Parity::Odd).unwrap();
        let sys = solver.blocks.system(ca, model.c_omega);
        let s = solver.spectrum(ca).unwrap();
        for (l, v) in s.eigenvalues.iter().zip(&s.eigenvectors) {
            worst = worst.max(generalized_residual(&sys.operator, &sys.mass, *l, v));
        }
    }
    c.check(worst <= EIGEN_RESIDUAL, format!("eigenpair residuals |Kv - lambda Mv| (relative): {worst:.2e}"));
}

fn decoupling(c: &mut Criterion, model: &DynamoModel) {
    let solver = DynamoSolver::new(model, 8, 8, Parity::Odd).unwrap();
    let full = eigenvalues(&solver.reduced.matrix(0.0, model.c_omega)).unwrap();
    let mut union = eigenvalues(&solver.reduced.aa).unwrap();
    union.extend(eigenvalues(&solver.reduced.bb).unwrap());
    sort_eigenvalues(&mut union);
    let worst = full
        .iter()
        .zip(&union)
        .map(|(a, b)| (a - b).norm() / a.norm().max(1.0))
        .fold(0.0, f64::max);
    c.check(
        full.len() == union.len() && worst <= DECOUPLING,
        format!("C_alpha = 0 spectrum vs union of diagonal blocks (8x8): {worst:.2e}"),
    );
}

fn doubling(c: &mut Criterion, model: &DynamoModel) {
    let dense = QuadratureDensity::default().doubled();
    let mut worst_decay = 0.0f64;
    for field in [FieldKind::B, FieldKind::A] {
        for n in 3..=8 {
            let a = solve_free_decay(field, n, DECAY_N_LAT, Parity::Odd).unwrap().lambda_num;
            let b = solve_free_decay_with(field, n, DECAY_N_LAT, Parity::Odd, dense).unwrap().lambda_num;
            worst_decay = worst_decay.max((a - b).abs() / a.abs().max(1.0));
        }
    }
    c.check(worst_decay <= DOUBLING, format!("decay eigenvalues, default vs doubled quadrature: {worst_decay:.2e}"));
    for (n, ca, _) in TABLE_2 {
        let a = DynamoSolver::new(model, n, n, Parity::Odd).unwrap().leading(ca).unwrap();
        let b = DynamoSolver::with_density(model, n, n, Parity::Odd, dense).unwrap().leading(ca).unwrap();
        let d = (a - b).norm() / a.norm().max(1.0);
        c.check(d <= DOUBLING, format!("Model B {n}x{n} leading eigenvalue at C_alpha = {ca}, default vs doubled quadrature: {d:.2e}"));
    }
}

fn property_suites() -> Criterion {
    let mut c = Criterion::new();
    let model = DynamoModel::model_b();
    quadrature_exactness(&mut c);
    boundary_conditions(&mut c);
    mass_properties(&mut c, &model);
    eigen_residuals(&mut c, &model);
    decoupling(&mut c, &model);
    doubling(&mut c, &model);
    c
}

fn determinism() -> Criterion {
    let mut c = Criterion::new();
    let commands: [&[&str]; 6] = [
        &["quad", "--n", "16", "--a", "0.65", "--b", "1"],
        &["decay", "--field", "B", "--nr", "3..8", "--jobs", "4"],
        &["decay", "--field", "A", "--nr", "3..8", "--format", "json"],
        &["dynamo-critical", "--model", "model_b", "--nr", "8", "--ntheta", "8"],
        &["dynamo-critical", "--model", "model_b", "--nr", "10", "--ntheta", "10", "--format", "json"],
        &["dynamo-snapshot", "--model", "model_b", "--nr", "8", "--ntheta", "8", "--grid-nx", "16", "--grid-ntheta", "32"],
    ];
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_galerkin-dynamo"))
            .args(args)
            .env_remove("DYNAMO_MODEL_DIR")
            .output()
            .unwrap()
    };
    for args in commands {
        let (a, b) = (run(args), run(args));
        let same = a.status.success() && a.stdout == b.stdout && a.stderr == b.stderr && a.status == b.status;
        c.check(same, format!("`{}`: {} bytes, identical: {same}", args.join(" "), a.stdout.len()));
    }
    let serial = run(&["decay", "--field", "B", "--nr", "3..8", "--jobs", "1"]);
    let parallel = run(&["decay", "--field", "B", "--nr", "3..8", "--jobs", "4"]);
    c.check(serial.stdout == parallel.stdout, "`decay --jobs 1` and `--jobs 4` agree byte for byte".into());
    c
}

type Check = (&'static str, fn() -> Criterion);

fn main() {
    let criteria: [Check; 7] = [
        ("free-decay B eigenvalue", decay_b_eigenvalue),
        ("free-decay A eigenvalue", decay_a_eigenvalue),
        ("free-decay field errors", decay_field_errors),
        ("analytic anchors", analytic_anchors),
        ("Model B critical C_alpha and omega", model_b_table),
        ("property suites", property_suites),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !report(i + 1, name, &f()) {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Reference eigenvalues come from two independent oracles (a fixed-point
//! confluent-hypergeometric characteristic function and integral-representation
//! Bessel zeros) plus the published 12-digit values for the quadratic
//! potential on (0, π].

mod common;

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use besseltrans::cli::pipeline::{run_solve, SolveOutput};
use besseltrans::cli::verify::verify_suite;
use besseltrans::cli::ProblemConfig;
use besseltrans::solver::MomentScratch;

use common::*;

struct Fixture {
    out: SolveOutput,
    wall: Duration,
}

fn run_quadratic(l: f64, beta: f64, gamma: f64, hi: f64, mode: &str) -> Fixture {
    let cfg = ProblemConfig::from_json(&format!(
        r#"{{
            "l": {l},
            "b": 3.141592653589793,
            "potential": {{ "expression": "x^2" }},
            "boundary": {{ "beta": {beta}, "gamma": {gamma} }},
            "lambda_range": {{ "lo": 0.0, "hi": {hi} }},
            "mode": "{mode}"
        }}"#
    ))
    .expect("valid config");
    let start = Instant::now();
    let out = run_solve(&cfg).expect("solve succeeds");
    Fixture { out, wall: start.elapsed() }
}

fn dirichlet_neg_half() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| run_quadratic(-0.5, 1.0, 0.0, 10100.0, "Q"))
}

fn dirichlet_pos_half() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| run_quadratic(0.5, 1.0, 0.0, 10150.0, "Q"))
}

fn dirichlet_one() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| run_quadratic(1.0, 1.0, 0.0, 10200.0, "Q"))
}

fn neumann_neg_half() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| run_quadratic(-0.5, 0.0, 1.0, 9950.0, "Q"))
}

fn neumann_pos_half() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| run_quadratic(0.5, 0.0, 1.0, 9850.0, "Q"))
}

fn pointwise_neg_half() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| run_quadratic(-0.5, 1.0, 0.0, 10100.0, "q"))
}

fn max_listed_error(fix: &Fixture, table: &[(usize, f64)]) -> f64 {
    let mut worst = 0.0f64;
    for &(n, lam) in table {
        let got = fix.out.eigen.eigenvalues[n - 1].lambda;
        worst = worst.max((got - lam).abs());
    }
    worst
}

#[test]
fn criterion_1_table1_dirichlet_l_neg_half() {
    let fix = dirichlet_neg_half();
    assert_eq!(fix.out.eigen.eigenvalues.len(), 100, "expected the first 100 eigenvalues");
    let worst = max_listed_error(fix, &DIRICHLET_L_NEG_HALF);
    let ok = worst <= 1e-6 && fix.wall <= Duration::from_secs(300);
    println!(
        "criterion 1 (Dirichlet l=-1/2 eigenvalue table): {} — max |Δλ| = {worst:.2e} (tol 1e-6), N = {}, ε = {:.2e}, wall = {:.1?}",
        if ok { "PASS" } else { "FAIL" },
        fix.out.approx.n,
        fix.out.approx.epsilon,
        fix.wall
    );
    assert!(worst <= 1e-6, "max eigenvalue error {worst:.3e}");
    assert!(fix.wall <= Duration::from_secs(300), "run took {:?}", fix.wall);
}

#[test]
fn criterion_2_table1_dirichlet_l_pos_half() {
    let fix = dirichlet_pos_half();
    assert_eq!(fix.out.eigen.eigenvalues.len(), 100);
    let worst = max_listed_error(fix, &DIRICHLET_L_POS_HALF);
    println!(
        "criterion 2 (Dirichlet l=+1/2 eigenvalue table): {} — max |Δλ| = {worst:.2e} (tol 1e-6)",
        if worst <= 1e-6 { "PASS" } else { "FAIL" }
    );
    assert!(worst <= 1e-6, "max eigenvalue error {worst:.3e}");
}

#[test]
fn criterion_3_dirichlet_l_one_conditioning_limited() {
    let fix = dirichlet_one();
    assert!(
        fix.out.eigen.eigenvalues.len() >= 100,
        "found {} eigenvalues",
        fix.out.eigen.eigenvalues.len()
    );
    let mut worst = 0.0f64;
    for &n in &LISTED_INDICES {
        let got = fix.out.eigen.eigenvalues[n - 1].lambda;
        let exact = kummer_eigenvalue_near(1.0, false, got, 0.5);
        worst = worst.max((got - exact).abs());
    }
    let flag = fix.out.approx.conditioning_limited;
    let ok = worst <= 1e-2 && flag;
    println!(
        "criterion 3 (Dirichlet l=1, conditioning-limited regime): {} — max |Δλ| = {worst:.2e} (tol 1e-2), ε = {:.2e}, conditioning flag = {flag}",
        if ok { "PASS" } else { "FAIL" },
        fix.out.approx.epsilon
    );
    assert!(worst <= 1e-2, "max eigenvalue error {worst:.3e}");
    assert!(flag, "conditioning flag was not raised");
}

#[test]
fn criterion_4_table2_neumann() {
    let fa = neumann_neg_half();
    let fb = neumann_pos_half();
    assert_eq!(fa.out.eigen.eigenvalues.len(), 100);
    // the l=+1/2 window holds 99 eigenvalues: the published table's last row
    // carries the 99th eigenvalue (its value checks out to 12 digits against
    // the exact characteristic, but only 49 roots exist between the table's
    // own n=50 and n=100 rows — verified with the fixed-point oracle)
    assert_eq!(fb.out.eigen.eigenvalues.len(), 99);
    let wa = max_listed_error(fa, &NEUMANN_L_NEG_HALF);
    let mut wb = 0.0f64;
    for &(n, lam) in &NEUMANN_L_POS_HALF {
        let idx = if n == 100 { 99 } else { n };
        let got = fb.out.eigen.eigenvalues[idx - 1].lambda;
        wb = wb.max((got - lam).abs());
    }
    // the exact count places the published "n = 100" value at position 99
    let exact_99 = kummer_eigenvalue_near(0.5, true, 9754.77670125413, 0.3);
    assert!((exact_99 - 9754.77670125413).abs() < 1e-9);
    let worst = wa.max(wb);
    println!(
        "criterion 4 (Neumann eigenvalue tables, l=∓1/2): {} — max |Δλ| = {worst:.2e} (tol 1e-6); note: published l=+1/2 row n=100 sits at spectral position 99",
        if worst <= 1e-6 { "PASS" } else { "FAIL" }
    );
    assert!(worst <= 1e-6, "max eigenvalue error {worst:.3e} (l=-1/2: {wa:.2e}, l=+1/2: {wb:.2e})");
}

#[test]
fn criterion_5_approximation_quality() {
    let fa = dirichlet_neg_half();
    let fb = dirichlet_pos_half();
    let ok = fa.out.approx.epsilon <= 1e-7
        && fa.out.approx.n <= 20
        && fb.out.approx.epsilon <= 1e-7
        && fb.out.approx.n <= 20;
    println!(
        "criterion 5 (uniform approximation quality): {} — l=-1/2: ε = {:.2e} at N = {}; l=+1/2: ε = {:.2e} at N = {} (tol ε ≤ 1e-7, N ≤ 20)",
        if ok { "PASS" } else { "FAIL" },
        fa.out.approx.epsilon,
        fa.out.approx.n,
        fb.out.approx.epsilon,
        fb.out.approx.n
    );
    assert!(ok);
}

#[test]
fn criterion_6_pointwise_mode() {
    let fix = pointwise_neg_half();
    assert_eq!(fix.out.eigen.eigenvalues.len(), 100);
    let eps = fix.out.approx.epsilon;

    // oracle self-check: the exact characteristic must reproduce the
    // published 12-digit values before it referees anything
    for &(n, lam) in &DIRICHLET_L_NEG_HALF {
        let oracle = kummer_eigenvalue_near(-0.5, false, lam, 0.3);
        assert!(
            (oracle - lam).abs() < 1.5e-10,
            "oracle disagrees with published value at n = {n}: {oracle} vs {lam}"
        );
    }

    let mut worst = 0.0f64;
    for ev in &fix.out.eigen.eigenvalues {
        let exact = kummer_eigenvalue_near(-0.5, false, ev.lambda, 0.5);
        worst = worst.max((ev.lambda - exact).abs());
    }
    let ok = eps <= 1e-8 && worst <= 1e-7;
    println!(
        "criterion 6 (pointwise q-mode, l=-1/2): {} — ε = {eps:.2e} at N = {} (tol 1e-8), max |Δλ| over n ≤ 100 = {worst:.2e} (tol 1e-7)",
        if ok { "PASS" } else { "FAIL" },
        fix.out.approx.n
    );
    assert!(eps <= 1e-8, "pointwise epsilon {eps:.3e}");
    assert!(worst <= 1e-7, "max eigenvalue error {worst:.3e}");
}

#[test]
fn criterion_7_zero_potential_reduction() {
    let mut worst = 0.0f64;
    for &l in &[-0.5f64, 0.5, 1.0] {
        let nu = l + 0.5;
        let j50 = bessel_zero_oracle(nu, 50);
        let hi = (j50 / std::f64::consts::PI).powi(2) + 40.0;
        let cfg = ProblemConfig::from_json(&format!(
            r#"{{
                "l": {l},
                "b": 3.141592653589793,
                "potential": {{ "expression": "0" }},
                "boundary": {{ "beta": 1.0, "gamma": 0.0 }},
                "lambda_range": {{ "lo": 0.0, "hi": {hi} }}
            }}"#
        ))
        .unwrap();
        let out = run_solve(&cfg).unwrap();
        assert!(
            out.eigen.eigenvalues.len() >= 50,
            "l={l}: found {} eigenvalues",
            out.eigen.eigenvalues.len()
        );
        for n in 1..=50usize {
            let expect = (bessel_zero_oracle(nu, n) / std::f64::consts::PI).powi(2);
            let got = out.eigen.eigenvalues[n - 1].lambda;
            worst = worst.max(((got - expect) / expect).abs());
        }
    }
    println!(
        "criterion 7 (q = 0 reduction to Bessel zeros, n ≤ 50): {} — max rel error = {worst:.2e} (tol 1e-9)",
        if worst <= 1e-9 { "PASS" } else { "FAIL" }
    );
    assert!(worst <= 1e-9, "max relative error {worst:.3e}");
}

#[test]
fn criterion_8_residual_bound_sweep() {
    let fix = dirichlet_neg_half();
    let mut scratch = MomentScratch::new();
    let mut worst = 0.0f64;
    for i in 0..20 {
        let lambda = 10f64.powf(4.0 * i as f64 / 19.0);
        let rep = fix.out.evaluator.residual_bound_check(lambda, &mut scratch).unwrap();
        worst = worst.max(rep.worst_ratio);
    }
    println!(
        "criterion 8 (residual bound 2ε√x, 20 λ in [1, 1e4]): {} — worst ratio = {worst:.3} (tol 1.0)",
        if worst <= 1.0 { "PASS" } else { "FAIL" }
    );
    assert!(worst <= 1.0, "residual bound ratio {worst:.4}");
}

#[test]
fn criterion_9_identity_suite() {
    let start = Instant::now();
    let report = verify_suite().expect("verify suite runs");
    let wall = start.elapsed();
    let ok = report.all_pass() && wall <= Duration::from_secs(120);
    println!(
        "criterion 9 (identity verification suite): {} — {} checks, wall = {:.1?} (limit 120 s)",
        if ok { "PASS" } else { "FAIL" },
        report.checks.len(),
        wall
    );
    for c in &report.checks {
        println!(
            "    {:<44} tol {:>8.1e}  measured {:>10.3e}  {}",
            c.name,
            c.tolerance,
            c.measured,
            if c.pass { "pass" } else { "FAIL" }
        );
    }
    assert!(report.all_pass(), "\n{}", report.render_table());
    assert!(wall <= Duration::from_secs(120), "verify took {wall:?}");
}

#[test]
fn oracle_self_checks() {
    // the exact characteristic, evaluated in fixed point, must reproduce the
    // published 12-digit eigenvalues for all four published problem variants
    let mut worst = 0.0f64;
    for (table, l, neumann) in [
        (&DIRICHLET_L_NEG_HALF, -0.5, false),
        (&DIRICHLET_L_POS_HALF, 0.5, false),
        (&NEUMANN_L_NEG_HALF, -0.5, true),
        (&NEUMANN_L_POS_HALF, 0.5, true),
    ] {
        for &(_, lam) in table.iter().take(3).chain(table.iter().rev().take(1)) {
            let oracle = kummer_eigenvalue_near(l, neumann, lam, 0.3);
            worst = worst.max((oracle - lam).abs());
        }
    }
    // integral-representation zeros against classical values
    let z_checks = [
        (0.0, 1, 2.404825557695773),
        (0.0, 50, 156.29503426853353),
        (1.0, 1, 3.8317059702075123),
        (1.5, 1, 4.4934094579090642),
    ];
    let mut worst_z = 0.0f64;
    for (nu, n, expect) in z_checks {
        worst_z = worst_z.max((bessel_zero_oracle(nu, n) - expect).abs());
    }
    println!(
        "oracle self-checks: characteristic vs published |Δλ| = {worst:.2e}; zeros |Δj| = {worst_z:.2e}"
    );
    assert!(worst < 8e-10, "characteristic oracle off by {worst:.3e}");
    assert!(worst_z < 5e-9, "zero oracle off by {worst_z:.3e}");
}

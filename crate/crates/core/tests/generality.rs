//! Cross-grid consistency on problems away from the benchmark: fractional l,
//! a potential with q(0) ≠ 0 (exercising the Λ-shift), and a Robin boundary
//! condition. Halving the grid step changes every quadrature in the pipeline,
//! so agreement of the eigenvalues — at the accuracy level the approximation
//! itself reports — pins down convergence without an external reference.

use besseltrans::cli::pipeline::run_solve;
use besseltrans::cli::ProblemConfig;

fn solve(l: f64, q: &str, beta: f64, gamma: f64, lo: f64, hi: f64, grid_points: usize) -> (Vec<f64>, f64) {
    let cfg = ProblemConfig::from_json(&format!(
        r#"{{
            "l": {l},
            "b": 3.141592653589793,
            "potential": {{ "expression": "{q}" }},
            "boundary": {{ "beta": {beta}, "gamma": {gamma} }},
            "lambda_range": {{ "lo": {lo}, "hi": {hi} }},
            "grid_points": {grid_points},
            "N_max": 16
        }}"#
    ))
    .unwrap();
    let out = run_solve(&cfg).unwrap();
    assert!(
        out.eigen.eigenvalues.iter().all(|e| e.residual_bound_ok),
        "residual bound violated (l={l}, q={q}, β={beta}, γ={gamma})"
    );
    (
        out.eigen.eigenvalues.iter().map(|e| e.lambda).collect(),
        out.evaluator.epsilon_integral,
    )
}

#[test]
fn fractional_order_shifted_potential_grid_consistency() {
    // fractional l puts the trace powers x^{2n+2l+2} off the target's integer
    // powers, so the approximation is conditioning-limited (ε plateaus) and
    // cross-grid agreement inherits that uncertainty; the comparison budget
    // therefore scales with the reported ε. Half-integer l aligns the powers
    // and is orders of magnitude sharper.
    for &(l, q, beta, gamma, lo) in &[
        (0.7f64, "cos(x)", 1.0f64, 0.0f64, 1.0f64),
        (1.3, "cos(x)", 1.0, 0.5, 1.0),
        (-0.5, "sin(x)^2", 0.0, 1.0, 0.0),
    ] {
        let (coarse, eps_c) = solve(l, q, beta, gamma, lo, 80.0, 2001);
        let (fine, eps_f) = solve(l, q, beta, gamma, lo, 80.0, 10001);
        assert_eq!(coarse.len(), fine.len(), "count changed with the grid (l={l})");
        assert!(!coarse.is_empty());
        let budget = 1e-9 + 500.0 * eps_c.max(eps_f);
        for (a, b) in coarse.iter().zip(&fine) {
            assert!(
                ((a - b) / b).abs() < budget,
                "l={l} q={q}: {a} vs {b} (budget {budget:.2e})"
            );
        }
    }
}

#[test]
fn eigenvalues_shift_with_constant_potential_offset() {
    // replacing q by q + c shifts every eigenvalue by c; a half-integer case
    // keeps the approximation sharp so the equivariance check is tight
    let (base, eps) = solve(-0.5, "x^2", 1.0, 0.0, 0.0, 80.0, 2001);
    assert!(eps < 1e-8, "well-conditioned case expected, got eps = {eps:.2e}");
    let (shifted, _) = solve(-0.5, "x^2 + 5", 1.0, 0.0, 5.0, 85.0, 2001);
    assert_eq!(base.len(), shifted.len());
    for (a, b) in base.iter().zip(&shifted) {
        assert!(
            (a + 5.0 - b).abs() < 1e-8 * b.max(1.0),
            "{} + 5 vs {}",
            a,
            b
        );
    }
}

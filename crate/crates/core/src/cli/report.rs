//! CSV and JSON emission. All numeric output uses '.' as the decimal
//! separator, no thousands separators, 17 significant digits.

use serde::Serialize;

use crate::cli::pipeline::{SolveOutput, StepTimings};
use crate::error::Result;
use crate::grid::evaluate_at;

/// 17 significant digits, locale-independent.
pub fn fmt_g17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Eigenvalue table: index, lambda, phi_residual, residual_bound_ok,
/// refinement_iterations.
pub fn eigenvalues_csv(out: &SolveOutput) -> String {
    let mut s = String::from("index,lambda,phi_residual,residual_bound_ok,refinement_iterations\n");
    for ev in &out.eigen.eigenvalues {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            ev.index,
            fmt_g17(ev.lambda),
            fmt_g17(ev.phi_residual),
            ev.residual_bound_ok,
            ev.refinement_iterations
        ));
    }
    s
}

#[derive(Serialize)]
struct EigenvalueRow {
    index: usize,
    lambda: f64,
    phi_residual: f64,
    residual_bound_ok: bool,
    refinement_iterations: usize,
}

#[derive(Serialize)]
struct SolveReport<'a> {
    n: usize,
    epsilon: f64,
    epsilon_integral: f64,
    mode: String,
    method: &'a str,
    target_reached: bool,
    conditioning_limited: bool,
    max_abs_coefficient: f64,
    equioscillation_count: usize,
    coefficients: Vec<f64>,
    eigenvalue_count: usize,
    residual_bound_all_ok: bool,
    eigenvalues: Vec<EigenvalueRow>,
    timings_ms: StepTimings,
}

/// JSON solve report: approximation order, error levels, coefficients,
/// conditioning flags, per-step timings.
pub fn solve_report_json(out: &SolveOutput) -> Result<String> {
    let report = SolveReport {
        n: out.approx.n,
        epsilon: out.approx.epsilon,
        epsilon_integral: out.evaluator.epsilon_integral,
        mode: out.approx.mode.to_string(),
        method: match out.approx.method {
            crate::approx::SolveMethod::Remez => "remez",
            crate::approx::SolveMethod::LsqFallback => "lsq-fallback",
        },
        target_reached: out.approx.target_reached,
        conditioning_limited: out.approx.conditioning_limited,
        max_abs_coefficient: out.approx.condition.max_abs_coeff,
        equioscillation_count: out.approx.condition.equioscillation_count,
        coefficients: out.approx.a.clone(),
        eigenvalue_count: out.eigen.eigenvalues.len(),
        residual_bound_all_ok: out.eigen.eigenvalues.iter().all(|e| e.residual_bound_ok),
        eigenvalues: out
            .eigen
            .eigenvalues
            .iter()
            .map(|e| EigenvalueRow {
                index: e.index,
                lambda: e.lambda,
                phi_residual: e.phi_residual,
                residual_bound_ok: e.residual_bound_ok,
                refinement_iterations: e.refinement_iterations,
            })
            .collect(),
        timings_ms: out.timings,
    };
    Ok(serde_json::to_string_pretty(&report)? + "\n")
}

/// Rectangular matrix of K_N over [0,b]²: row i, column j holds
/// K_N(x_i, t_j) at `resolution` uniformly spaced coordinates including both
/// endpoints. First row and first column are exactly zero.
pub fn kernel_csv(out: &SolveOutput, resolution: usize) -> Result<String> {
    let ka = out.kernel()?;
    let b = out.basis.grid().b();
    let coords: Vec<f64> =
        (0..resolution).map(|i| b * i as f64 / (resolution - 1) as f64).collect();
    let mut s = String::new();
    for &x in &coords {
        let mut first = true;
        for &t in &coords {
            if !first {
                s.push(',');
            }
            s.push_str(&fmt_g17(ka.eval(x, t)?));
            first = false;
        }
        s.push('\n');
    }
    Ok(s)
}

/// Trace functions as columns: x, c_0 … c_N, at `resolution` points.
pub fn basis_csv(out: &SolveOutput, resolution: usize) -> Result<String> {
    let b = out.basis.grid().b();
    let n_max = out.basis.n_max;
    let mut s = String::from("x");
    for n in 0..=n_max {
        s.push_str(&format!(",c_{n}"));
    }
    s.push('\n');
    for i in 0..resolution {
        let x = b * i as f64 / (resolution - 1) as f64;
        s.push_str(&fmt_g17(x));
        for n in 0..=n_max {
            s.push(',');
            s.push_str(&fmt_g17(evaluate_at(out.basis.trace(n), x)?));
        }
        s.push('\n');
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_formats_are_locale_free() {
        assert_eq!(fmt_g17(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_g17(-0.015625), "-1.5625000000000000e-2");
        let parsed: f64 = fmt_g17(std::f64::consts::PI).parse().unwrap();
        assert_eq!(parsed, std::f64::consts::PI);
    }
}

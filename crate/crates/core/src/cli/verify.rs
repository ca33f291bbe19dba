//! Built-in verification suite: identity checks spanning every module, with
//! machine-readable pass/fail results and measured worst-case margins.

use std::f64::consts::PI;

use crate::approx::{build_target, select_n, ApproxMode, MinimaxProblem};
use crate::error::Result;
use crate::grid::{differentiate, SampledFunction, UniformGrid};
use crate::solver::{MomentScratch, SolutionEvaluator, SolverOptions, SpectralProblem};
use crate::specfun::{
    bessel_j_asymptotic, bessel_j_half_integer_trig, bessel_j_series, bessel_j_unchecked,
    pochhammer,
};
use crate::spps::{build_u0, recursive_integrals, y_apply, y_monomial_coefficient};
use crate::wavebasis::{u_poly, WaveBasis, XiTable};

/// One verification check: its tolerance and the worst measured deviation.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckResult {
    pub name: String,
    pub tolerance: f64,
    pub measured: f64,
    pub pass: bool,
}

impl CheckResult {
    fn new(name: impl Into<String>, tolerance: f64, measured: f64) -> Self {
        CheckResult { name: name.into(), tolerance, measured, pass: measured <= tolerance }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render_table(&self) -> String {
        let mut s = String::from("check                                    tolerance   measured    status\n");
        for c in &self.checks {
            s.push_str(&format!(
                "{:<40} {:>9.1e} {:>11.3e}  {}\n",
                c.name,
                c.tolerance,
                c.measured,
                if c.pass { "pass" } else { "FAIL" }
            ));
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

const VERIFY_L: [f64; 5] = [-0.5, 0.0, 0.5, 1.0, 2.3];

/// Locate the n-th positive zero of J_ν by bracketed bisection around the
/// large-zero asymptotic guess.
fn bessel_zero(nu: f64, n: usize) -> f64 {
    let guess = (n as f64 + 0.5 * nu - 0.25) * PI;
    let (mut lo, mut hi) = (guess - 1.2, guess + 1.2);
    lo = lo.max(0.05);
    let mut flo = bessel_j_unchecked(nu, lo);
    while bessel_j_unchecked(nu, hi).signum() == flo.signum() {
        hi += 0.5;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let fm = bessel_j_unchecked(nu, mid);
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn monomial_image_check() -> Result<CheckResult> {
    let g = UniformGrid::new(2.0, 2001)?;
    let mut worst = 0.0f64;
    for &l in &VERIFY_L {
        for k in 0..=10usize {
            let f = SampledFunction::from_fn(g, |t| t.powi(k as i32))?;
            let img = y_apply(l, &f)?;
            let ck = y_monomial_coefficient(l, k)?;
            for i in [500usize, 1000, 1500, 2000] {
                let x = g.x(i);
                let expect = ck * x.powf(k as f64 + l + 1.0);
                worst = worst.max(((img.values()[i] - expect) / expect).abs());
            }
        }
    }
    Ok(CheckResult::new("monomial images Y[x^k] = C_k x^{k+l+1}", 1e-8, worst))
}

fn mapping_property_check() -> Result<CheckResult> {
    let g = UniformGrid::new(PI, 2001)?;
    let q = SampledFunction::zeros(g);
    let mut worst = 0.0f64;
    for &l in &VERIFY_L {
        let u0 = build_u0(l, &q, 1e-14)?;
        let xt = recursive_integrals(&u0, 5)?;
        for k in 0..=5usize {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let fact: f64 = (1..=k).map(|i| i as f64).product();
            let coef = sign * 4.0f64.powi(k as i32) * fact * pochhammer(l + 1.5, k);
            let xk = xt.x_tilde(2 * k as isize).expect("order bounded").values();
            for (i, x) in g.points().enumerate() {
                if x <= 0.01 * PI {
                    continue;
                }
                let lhs = coef * u0.u0.values()[i] * xk[i];
                let rhs = x.powf(2.0 * k as f64 + l + 1.0);
                worst = worst.max(((lhs - rhs) / rhs).abs());
            }
        }
    }
    Ok(CheckResult::new("mapping property at q = 0, k <= 5", 1e-10, worst))
}

fn x_tilde_closed_forms_check() -> Result<CheckResult> {
    let g = UniformGrid::new(PI, 2001)?;
    let q = SampledFunction::zeros(g);
    let mut worst = 0.0f64;
    for &l in &VERIFY_L {
        let u0 = build_u0(l, &q, 1e-14)?;
        let xt = recursive_integrals(&u0, 1)?;
        let x1 = xt.x_tilde(1).expect("order bounded").values();
        let x2 = xt.x_tilde(2).expect("order bounded").values();
        for (i, x) in g.points().enumerate().skip(1) {
            let e1 = x.powf(2.0 * l + 3.0) / (2.0 * l + 3.0);
            let e2 = -x * x / (2.0 * (2.0 * l + 3.0));
            worst = worst.max(((x1[i] - e1) / e1).abs());
            worst = worst.max(((x2[i] - e2) / e2).abs());
        }
    }
    Ok(CheckResult::new("recursive integrals at q = 0 (closed forms)", 1e-10, worst))
}

/// c_n trace versus the diagonal of U_{4n−1} at q ≡ 0; the Ξ table is
/// injectable so a perturbed table demonstrably breaks the identity.
pub(crate) fn trace_diagonal_check(xi_override: Option<(f64, XiTable)>) -> Result<CheckResult> {
    let g = UniformGrid::new(PI, 2001)?;
    let q = SampledFunction::zeros(g);
    let mut worst = 0.0f64;
    let ls: Vec<f64> = match &xi_override {
        Some((l, _)) => vec![*l],
        None => vec![-0.5, 0.5, 1.0],
    };
    for &l in &ls {
        let u0 = build_u0(l, &q, 1e-14)?;
        let xt = recursive_integrals(&u0, 8)?;
        let basis = match &xi_override {
            Some((_, xi)) => WaveBasis::build_with_xi(&u0, &xt, xi.clone())?,
            None => WaveBasis::build(&u0, &xt, 8)?,
        };
        for n in 0..=8usize {
            for (i, x) in g.points().enumerate() {
                if x <= 0.01 * PI {
                    continue;
                }
                let diag = u_poly(l, n, x, x)?;
                worst = worst.max(((basis.trace(n).values()[i] - diag) / diag).abs());
            }
        }
    }
    Ok(CheckResult::new("traces equal U_{4n-1} diagonal at q = 0, n <= 8", 1e-10, worst))
}

fn quadratic_pipeline() -> Result<(SpectralProblem, WaveBasis, crate::approx::ApproximationResult)> {
    let m = 5001;
    let g = UniformGrid::new(PI, m)?;
    let q = SampledFunction::from_fn(g, |x| x * x)?;
    let options = SolverOptions { grid_points: m, eps_target: 1e-9, mode: ApproxMode::Integral, n_max: 18 };
    let problem = SpectralProblem::new(-0.5, q, 1.0, 0.0, (0.0, 10100.0), options)?;
    let u0 = build_u0(-0.5, problem.normalized_q(), 1e-14)?;
    let xt = recursive_integrals(&u0, 18)?;
    let basis = WaveBasis::build(&u0, &xt, 18)?;
    let target = build_target(problem.normalized_q(), ApproxMode::Integral)?;
    let minimax = MinimaxProblem::new(target, basis.traces().to_vec(), ApproxMode::Integral)?;
    let approx = select_n(&minimax, 1e-9, 18)?;
    Ok((problem, basis, approx))
}

fn trace_derivative_fd_check(basis: &WaveBasis) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for n in 0..=10usize {
        let fd = differentiate(basis.trace(n));
        let an = basis.trace_derivative(n);
        let scale = an.sup_norm();
        for i in 30..fd.grid().len() - 2 {
            worst = worst.max((fd.values()[i] - an.values()[i]).abs() / scale);
        }
    }
    Ok(CheckResult::new("trace derivatives vs finite differences", 1e-7, worst))
}

fn du_fd_check(ev: &SolutionEvaluator) -> Result<CheckResult> {
    let mut scratch = MomentScratch::new();
    let g = ev.grid();
    let mut worst = 0.0f64;
    for &lambda in &[1.0, 10.0, 100.0] {
        let u = ev.eval_u_grid(lambda, &mut scratch)?;
        let fd = differentiate(&u);
        for i in (0..g.len()).step_by(131) {
            let x = g.x(i);
            if x < 0.05 * PI {
                continue;
            }
            let du = ev.eval_du(lambda, x, &mut scratch)?;
            worst = worst.max((du - fd.values()[i]).abs() / fd.values()[i].abs().max(1e-9));
        }
    }
    Ok(CheckResult::new("u_N' closed form vs finite differences", 1e-7, worst))
}

fn residual_sweep_check(ev: &SolutionEvaluator) -> Result<CheckResult> {
    let mut scratch = MomentScratch::new();
    let mut worst = 0.0f64;
    for i in 0..20 {
        let lambda = 10f64.powf(4.0 * i as f64 / 19.0);
        let rep = ev.residual_bound_check(lambda, &mut scratch)?;
        worst = worst.max(rep.worst_ratio);
    }
    Ok(CheckResult::new("residual bound |∫(q_N-q)d_l| <= 2eps sqrt(x)", 1.0, worst))
}

fn zero_potential_eigenvalue_check() -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for &l in &[-0.5f64, 0.5] {
        let nu = l + 0.5;
        let m = 1001;
        let g = UniformGrid::new(PI, m)?;
        let q = SampledFunction::zeros(g);
        let options = SolverOptions { grid_points: m, eps_target: 1e-9, mode: ApproxMode::Integral, n_max: 2 };
        let problem = SpectralProblem::new(l, q, 1.0, 0.0, (0.0, 30.0), options)?;
        let u0 = build_u0(l, problem.normalized_q(), 1e-14)?;
        let xt = recursive_integrals(&u0, 2)?;
        let basis = WaveBasis::build(&u0, &xt, 2)?;
        let target = build_target(problem.normalized_q(), ApproxMode::Integral)?;
        let minimax = MinimaxProblem::new(target, basis.traces().to_vec(), ApproxMode::Integral)?;
        let approx = select_n(&minimax, 1e-9, 2)?;
        let ev = SolutionEvaluator::build(&problem, &basis, &approx)?;
        let found = crate::solver::find_eigenvalues(&problem, &ev)?;
        for (idx, eig) in found.eigenvalues.iter().enumerate() {
            let expect = (bessel_zero(nu, idx + 1) / PI).powi(2);
            worst = worst.max(((eig.lambda - expect) / expect).abs());
        }
    }
    Ok(CheckResult::new("q = 0 eigenvalues equal scaled Bessel zeros", 1e-9, worst))
}

fn bessel_trig_forms_check() -> CheckResult {
    let mut worst = 0.0f64;
    for &nu in &[0.5, 1.5, 2.5] {
        let mut x = 2.0;
        while x <= 100.0 {
            let trig = bessel_j_half_integer_trig(nu, x);
            let general = if x <= 20.0 { bessel_j_series(nu, x) } else { bessel_j_asymptotic(nu, x) };
            let scale = trig.abs().max((2.0 / (PI * x)).sqrt());
            worst = worst.max((trig - general).abs() / scale);
            x += 0.731;
        }
    }
    CheckResult::new("Bessel trig forms vs series/asymptotic", 1e-12, worst)
}

/// Run every identity check; failures are report content, not errors.
pub fn verify_suite() -> Result<VerifyReport> {
    let mut checks = Vec::new();
    checks.push(monomial_image_check()?);
    checks.push(mapping_property_check()?);
    checks.push(x_tilde_closed_forms_check()?);
    checks.push(trace_diagonal_check(None)?);
    checks.push(bessel_trig_forms_check());

    let (problem, basis, approx) = quadratic_pipeline()?;
    checks.push(trace_derivative_fd_check(&basis)?);
    let ev = SolutionEvaluator::build(&problem, &basis, &approx)?;
    checks.push(du_fd_check(&ev)?);
    checks.push(residual_sweep_check(&ev)?);
    checks.push(zero_potential_eigenvalue_check()?);

    Ok(VerifyReport { checks })
}

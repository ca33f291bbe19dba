//! Pipeline orchestration: normalize, build the particular solution, the
//! recursive integrals and the trace basis, solve the uniform-approximation
//! problem, then locate eigenvalues.

use std::time::Instant;

use crate::approx::{build_target, select_n, ApproximationResult, MinimaxProblem};
use crate::cli::config::ProblemConfig;
use crate::error::Result;
use crate::grid::SampledFunction;
use crate::solver::{find_eigenvalues, EigenResult, SolutionEvaluator, SpectralProblem};
use crate::spps::{build_u0, recursive_integrals};
use crate::wavebasis::{KernelApprox, WaveBasis};

const PICARD_TOL: f64 = 1e-14;

/// Wall-clock milliseconds per pipeline step.
#[derive(Debug, Clone, Copy, Default, serde::Serialize)]
pub struct StepTimings {
    pub normalize_ms: f64,
    pub particular_solution_ms: f64,
    pub recursive_integrals_ms: f64,
    pub wave_basis_ms: f64,
    pub approximation_ms: f64,
    pub evaluator_ms: f64,
    pub eigenvalue_scan_ms: f64,
}

/// Everything a solve produces, kept alive for reporting and kernel dumps.
pub struct SolveOutput {
    pub problem: SpectralProblem,
    pub basis: WaveBasis,
    pub approx: ApproximationResult,
    pub evaluator: SolutionEvaluator,
    pub eigen: EigenResult,
    pub timings: StepTimings,
}

impl SolveOutput {
    pub fn kernel(&self) -> Result<KernelApprox<'_>> {
        KernelApprox::new(&self.basis, self.approx.a.clone(), self.approx.epsilon)
    }
}

/// Build the prepared state (through the approximation step) without the
/// eigenvalue scan; used by `solve`, `kernel` and `basis`.
pub fn prepare(cfg: &ProblemConfig) -> Result<(SpectralProblem, WaveBasis, ApproximationResult, StepTimings)> {
    let mut timings = StepTimings::default();
    let ms = |t: Instant| t.elapsed().as_secs_f64() * 1e3;

    let t = Instant::now();
    let q = cfg.build_potential()?;
    let problem = SpectralProblem::new(
        cfg.l,
        q,
        cfg.boundary.beta,
        cfg.boundary.gamma,
        (cfg.lambda_range.lo, cfg.lambda_range.hi),
        cfg.solver_options(),
    )?;
    timings.normalize_ms = ms(t);

    let t = Instant::now();
    let u0 = build_u0(cfg.l, problem.normalized_q(), PICARD_TOL)?;
    timings.particular_solution_ms = ms(t);

    let t = Instant::now();
    let x_tilde = recursive_integrals(&u0, cfg.n_max)?;
    timings.recursive_integrals_ms = ms(t);

    let t = Instant::now();
    let basis = WaveBasis::build(&u0, &x_tilde, cfg.n_max)?;
    timings.wave_basis_ms = ms(t);

    let t = Instant::now();
    let mode = cfg.approx_mode();
    let target = build_target(problem.normalized_q(), mode)?;
    let columns: Vec<SampledFunction> = match mode {
        crate::approx::ApproxMode::Integral => basis.traces().to_vec(),
        crate::approx::ApproxMode::Pointwise => basis.trace_derivatives().to_vec(),
    };
    let minimax = MinimaxProblem::new(target, columns, mode)?;
    let approx = select_n(&minimax, cfg.eps_target, cfg.n_max)?;
    timings.approximation_ms = ms(t);

    Ok((problem, basis, approx, timings))
}

/// Execute the full pipeline: returns located eigenvalues plus diagnostics.
pub fn run_solve(cfg: &ProblemConfig) -> Result<SolveOutput> {
    let (problem, basis, approx, mut timings) = prepare(cfg)?;
    let ms = |t: Instant| t.elapsed().as_secs_f64() * 1e3;

    let t = Instant::now();
    let evaluator = SolutionEvaluator::build(&problem, &basis, &approx)?;
    timings.evaluator_ms = ms(t);

    let t = Instant::now();
    let eigen = find_eigenvalues(&problem, &evaluator)?;
    timings.eigenvalue_scan_ms = ms(t);

    Ok(SolveOutput { problem, basis, approx, evaluator, eigen, timings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::ProblemConfig;

    #[test]
    fn zero_potential_pipeline_finds_bessel_zeros() {
        let cfg = ProblemConfig::from_json(
            r#"{
                "l": 0.5,
                "b": 3.141592653589793,
                "potential": { "expression": "0" },
                "boundary": { "beta": 1.0, "gamma": 0.0 },
                "lambda_range": { "lo": 0.0, "hi": 9.0 },
                "grid_points": 1001,
                "N_max": 4
            }"#,
        )
        .unwrap();
        let out = run_solve(&cfg).unwrap();
        // zeros of J₁ over π: j₁,₁ = 3.8317…, j₁,₂ = 7.0156…
        let expect = [3.8317059702075123f64, 7.015586669815619];
        assert_eq!(out.eigen.eigenvalues.len(), 2);
        for (ev, j) in out.eigen.eigenvalues.iter().zip(expect) {
            let lam = (j / std::f64::consts::PI).powi(2);
            assert!(((ev.lambda - lam) / lam).abs() < 1e-10, "{} vs {lam}", ev.lambda);
        }
        assert_eq!(out.approx.n, 0);
        assert_eq!(out.approx.epsilon, 0.0);
    }
}

//! Python bindings: scalar special functions plus a Solver class wrapping
//! the full transmutation-kernel pipeline.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use besseltrans::approx::ApproximationResult;
use besseltrans::cli::pipeline::{prepare, run_solve};
use besseltrans::cli::report::{eigenvalues_csv, solve_report_json};
use besseltrans::cli::ProblemConfig;
use besseltrans::grid::evaluate_at;
use besseltrans::solver::{
    find_eigenvalues, MomentScratch, SolutionEvaluator, SpectralProblem,
};
use besseltrans::specfun;
use besseltrans::wavebasis::{KernelApprox, WaveBasis};

fn to_py_err(e: besseltrans::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Gamma function Γ(x); raises ValueError at nonpositive integers.
#[pyfunction]
fn gamma(x: f64) -> PyResult<f64> {
    specfun::gamma(x).map_err(to_py_err)
}

/// Bessel function of the first kind J_ν(x), ν ≥ 0, x ≥ 0.
#[pyfunction]
fn bessel_j(nu: f64, x: f64) -> PyResult<f64> {
    let order = specfun::BesselOrder::new(nu).map_err(to_py_err)?;
    specfun::bessel_j(order, x).map_err(to_py_err)
}

/// ₁F₂(a; b1, b2; z); returns (value, clean) where clean is false when the
/// series lost accuracy to cancellation.
#[pyfunction]
fn hyp1f2(a: f64, b1: f64, b2: f64, z: f64) -> PyResult<(f64, bool)> {
    let h = specfun::hyp1f2(a, b1, b2, z).map_err(to_py_err)?;
    Ok((h.value, h.is_clean()))
}

/// Regular solution d_l(x, ω²) = √x·J_{l+1/2}(ωx) of the unperturbed equation.
#[pyfunction]
fn d_l(l: f64, omega: f64, x: f64) -> PyResult<f64> {
    let freq = specfun::SpectralFrequency::new(omega).map_err(to_py_err)?;
    specfun::d_l(l, freq, x).map_err(to_py_err)
}

/// Run a full solve from a JSON configuration string; returns the eigenvalue
/// CSV and the JSON report.
#[pyfunction]
fn solve_config(json: &str) -> PyResult<(String, String)> {
    let cfg = ProblemConfig::from_json(json).map_err(to_py_err)?;
    let out = run_solve(&cfg).map_err(to_py_err)?;
    let report = solve_report_json(&out).map_err(to_py_err)?;
    Ok((eigenvalues_csv(&out), report))
}

/// A prepared spectral problem: the approximation step has been run and the
/// closed-form solution can be evaluated at any λ with Λ = λ − q(0) > 0.
#[pyclass]
struct Solver {
    problem: SpectralProblem,
    basis: WaveBasis,
    approx: ApproximationResult,
    evaluator: SolutionEvaluator,
}

#[pymethods]
impl Solver {
    #[new]
    #[pyo3(signature = (l, b, potential, beta, gamma, grid_points=20001, eps_target=1e-9, mode="Q", n_max=30))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        l: f64,
        b: f64,
        potential: &str,
        beta: f64,
        gamma: f64,
        grid_points: usize,
        eps_target: f64,
        mode: &str,
        n_max: usize,
    ) -> PyResult<Self> {
        // the λ window is supplied per eigenvalues() call; seed the config
        // with a window that clears the q(0) validation
        let q0 = besseltrans::cli::parse_potential(potential)
            .and_then(|e| e.eval(0.0))
            .map_err(to_py_err)?;
        let cfg_json =
            serde_json_config(l, b, potential, beta, gamma, grid_points, eps_target, mode, n_max, q0);
        let cfg = ProblemConfig::from_json(&cfg_json).map_err(to_py_err)?;
        let (problem, basis, approx, _) = prepare(&cfg).map_err(to_py_err)?;
        let evaluator = SolutionEvaluator::build(&problem, &basis, &approx).map_err(to_py_err)?;
        Ok(Solver { problem, basis, approx, evaluator })
    }

    /// (order N, epsilon, conditioning_limited, method)
    fn approximation(&self) -> (usize, f64, bool, String) {
        (
            self.approx.n,
            self.approx.epsilon,
            self.approx.conditioning_limited,
            match self.approx.method {
                besseltrans::approx::SolveMethod::Remez => "remez".into(),
                besseltrans::approx::SolveMethod::LsqFallback => "lsq-fallback".into(),
            },
        )
    }

    fn coefficients(&self) -> Vec<f64> {
        self.approx.a.clone()
    }

    /// Eigenvalues in (lo, hi].
    fn eigenvalues(&self, lo: f64, hi: f64) -> PyResult<Vec<f64>> {
        let mut problem = self.problem.clone();
        problem.lambda_range = (lo, hi);
        let result = find_eigenvalues(&problem, &self.evaluator).map_err(to_py_err)?;
        Ok(result.eigenvalues.iter().map(|e| e.lambda).collect())
    }

    /// u_N(x, λ) at each x.
    fn evaluate(&self, lam: f64, xs: Vec<f64>) -> PyResult<Vec<f64>> {
        let mut scratch = MomentScratch::new();
        xs.into_iter()
            .map(|x| self.evaluator.eval_u(lam, x, &mut scratch).map_err(to_py_err))
            .collect()
    }

    /// u_N′(x, λ) at each x.
    fn evaluate_derivative(&self, lam: f64, xs: Vec<f64>) -> PyResult<Vec<f64>> {
        let mut scratch = MomentScratch::new();
        xs.into_iter()
            .map(|x| self.evaluator.eval_du(lam, x, &mut scratch).map_err(to_py_err))
            .collect()
    }

    /// Kernel approximant K_N(x, t).
    fn kernel(&self, x: f64, t: f64) -> PyResult<f64> {
        let ka = KernelApprox::new(&self.basis, self.approx.a.clone(), self.approx.epsilon)
            .map_err(to_py_err)?;
        ka.eval(x, t).map_err(to_py_err)
    }

    /// Trace function c_n sampled at the given points.
    fn trace(&self, n: usize, xs: Vec<f64>) -> PyResult<Vec<f64>> {
        if n > self.basis.n_max {
            return Err(PyValueError::new_err(format!("n = {n} beyond basis order {}", self.basis.n_max)));
        }
        xs.into_iter()
            .map(|x| evaluate_at(self.basis.trace(n), x).map_err(to_py_err))
            .collect()
    }
}

#[allow(clippy::too_many_arguments)]
fn serde_json_config(
    l: f64,
    b: f64,
    potential: &str,
    beta: f64,
    gamma: f64,
    grid_points: usize,
    eps_target: f64,
    mode: &str,
    n_max: usize,
    q0: f64,
) -> String {
    format!(
        r#"{{
            "l": {l},
            "b": {b},
            "potential": {{ "expression": {} }},
            "boundary": {{ "beta": {beta}, "gamma": {gamma} }},
            "lambda_range": {{ "lo": {q0}, "hi": {hi} }},
            "grid_points": {grid_points},
            "eps_target": {eps_target},
            "mode": {},
            "N_max": {n_max}
        }}"#,
        serde_escape(potential),
        serde_escape(mode),
        hi = q0 + 1.0,
    )
}

fn serde_escape(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[pymodule]
fn besseltrans_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(hyp1f2, m)?)?;
    m.add_function(wrap_pyfunction!(d_l, m)?)?;
    m.add_function(wrap_pyfunction!(solve_config, m)?)?;
    m.add_class::<Solver>()?;
    Ok(())
}

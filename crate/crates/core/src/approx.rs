//! The uniform-approximation step: build the target function, run a discrete
//! Remez exchange over the trace basis (least-squares fallback when the
//! exchange cannot make progress), and select the approximation order.

use crate::error::{Error, Result};
use crate::grid::{cumulative_integral, SampledFunction};
use crate::linalg::{lsq_householder, solve_full_pivot};

/// Which Goursat data the coefficients are fitted to: the integral form
/// matches ½∫₀ˣ q against Σ a_κ c_κ, the pointwise form matches q/2 against
/// Σ a_κ c_κ′.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxMode {
    Integral,
    Pointwise,
}

impl std::fmt::Display for ApproxMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ApproxMode::Integral => write!(f, "Q"),
            ApproxMode::Pointwise => write!(f, "q"),
        }
    }
}

/// A discrete minimax problem over one grid.
#[derive(Debug, Clone)]
pub struct MinimaxProblem {
    pub target: SampledFunction,
    pub basis: Vec<SampledFunction>,
    pub mode: ApproxMode,
}

impl MinimaxProblem {
    pub fn new(target: SampledFunction, basis: Vec<SampledFunction>, mode: ApproxMode) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::precondition("MinimaxProblem", "empty basis"));
        }
        if !basis.iter().all(|f| f.same_grid(&target)) {
            return Err(Error::precondition("MinimaxProblem", "basis and target on different grids"));
        }
        Ok(MinimaxProblem { target, basis, mode })
    }
}

/// Target of the uniform approximation: ½∫₀ˣ q (integral mode) or q/2
/// (pointwise mode). Requires the normalized potential, q(0) = 0.
pub fn build_target(q: &SampledFunction, mode: ApproxMode) -> Result<SampledFunction> {
    let q0 = q.values()[0];
    if q0.abs() > 1e-12 * q.sup_norm().max(1.0) {
        return Err(Error::precondition(
            "build_target",
            format!("q(0) = {q0:e} ≠ 0; normalize first: replace q by q − q(0) and λ by λ − q(0)"),
        ));
    }
    match mode {
        ApproxMode::Integral => {
            let mut f = cumulative_integral(q);
            for v in f.values_mut() {
                *v *= 0.5;
            }
            Ok(f)
        }
        ApproxMode::Pointwise => {
            let vals = q.values().iter().map(|v| 0.5 * v).collect();
            SampledFunction::new(q.grid(), vals)
        }
    }
}

/// How the coefficients were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Remez,
    LsqFallback,
}

/// Conditioning diagnostics of one solve.
#[derive(Debug, Clone, Copy)]
pub struct ConditionReport {
    pub max_abs_coeff: f64,
    /// alternating residual extrema within 5% of ε
    pub equioscillation_count: usize,
    /// leveled error of the final reference set (0 for the fallback)
    pub h_leveled: f64,
}

/// Result of one uniform-approximation solve.
#[derive(Debug, Clone)]
pub struct ApproximationResult {
    pub n: usize,
    pub a: Vec<f64>,
    /// achieved sup-norm error, recomputed from the final coefficients over
    /// the whole grid
    pub epsilon: f64,
    pub mode: ApproxMode,
    pub method: SolveMethod,
    pub condition: ConditionReport,
    /// set by select_n when it stops on stagnation, coefficient blow-up, or
    /// an unreached target
    pub conditioning_limited: bool,
    pub target_reached: bool,
}

const REMEZ_MAX_ITER: usize = 200;
const REMEZ_AGREEMENT: f64 = 1e-3;

fn residual(target: &[f64], basis: &[&[f64]], a: &[f64], out: &mut [f64]) {
    out.copy_from_slice(target);
    for (j, col) in basis.iter().enumerate() {
        let aj = a[j];
        if aj == 0.0 {
            continue;
        }
        for i in 0..out.len() {
            out[i] -= aj * col[i];
        }
    }
}

fn sup_index(r: &[f64]) -> (usize, f64) {
    let mut best = (0usize, 0.0f64);
    for (i, v) in r.iter().enumerate() {
        if v.abs() > best.1 {
            best = (i, v.abs());
        }
    }
    best
}

fn count_equioscillations(r: &[f64], eps: f64) -> usize {
    if eps == 0.0 {
        return 0;
    }
    let thresh = 0.95 * eps;
    let mut count = 0usize;
    let mut last_sign = 0.0f64;
    for &v in r {
        if v.abs() >= thresh {
            let s = v.signum();
            if s != last_sign {
                count += 1;
                last_sign = s;
            }
        }
    }
    count
}

fn finish(
    p: &MinimaxProblem,
    n: usize,
    a_scaled: Vec<f64>,
    scales: &[f64],
    method: SolveMethod,
    h_leveled: f64,
) -> ApproximationResult {
    let a: Vec<f64> = a_scaled.iter().zip(scales).map(|(v, s)| v / s).collect();
    let cols: Vec<&[f64]> = p.basis[..=n].iter().map(|f| f.values()).collect();
    let mut r = vec![0.0; p.target.values().len()];
    residual(p.target.values(), &cols, &a, &mut r);
    let (_, eps) = sup_index(&r);
    let max_abs_coeff = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    ApproximationResult {
        n,
        epsilon: eps,
        mode: p.mode,
        method,
        condition: ConditionReport {
            max_abs_coeff,
            equioscillation_count: count_equioscillations(&r, eps),
            h_leveled,
        },
        a,
        conditioning_limited: false,
        target_reached: false,
    }
}

fn lsq_fallback(p: &MinimaxProblem, n: usize, scaled_cols: &[Vec<f64>], scales: &[f64]) -> Result<ApproximationResult> {
    match lsq_householder(scaled_cols, p.target.values()) {
        Some(a_scaled) => Ok(finish(p, n, a_scaled, scales, SolveMethod::LsqFallback, 0.0)),
        None => Err(Error::Singular { op: "remez_solve (least-squares fallback)" }),
    }
}

/// Discrete linear Remez exchange over the first n+1 basis functions:
/// maintain n+2 reference points, solve the equioscillation system, exchange
/// against the global extremum, and stop when the leveled error agrees with
/// the global error to 1e-3 relative. Stalls and singular systems fall back
/// to least squares over the full grid.
pub fn remez_solve(p: &MinimaxProblem, n: usize) -> Result<ApproximationResult> {
    let m = p.target.values().len();
    if n + 1 > p.basis.len() {
        return Err(Error::precondition(
            "remez_solve",
            format!("order {n} needs {} basis functions, only {} available", n + 1, p.basis.len()),
        ));
    }
    if m < 10 * (n + 2) {
        return Err(Error::precondition(
            "remez_solve",
            format!("grid of {m} points is too coarse for order {n}"),
        ));
    }
    let target = p.target.values();

    // column scaling by sup norms
    let scales: Vec<f64> = p.basis[..=n]
        .iter()
        .map(|f| {
            let s = f.sup_norm();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    let scaled_cols: Vec<Vec<f64>> = p.basis[..=n]
        .iter()
        .zip(&scales)
        .map(|(f, s)| f.values().iter().map(|v| v / s).collect())
        .collect();

    // all-zero target: exact zero solution
    if target.iter().all(|&v| v == 0.0) {
        return Ok(finish(p, n, vec![0.0; n + 1], &scales, SolveMethod::Remez, 0.0));
    }

    // reference set: Chebyshev-like extrema snapped to the grid
    let nref = n + 2;
    let mut refs: Vec<usize> = (0..nref)
        .map(|i| {
            let t = 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / (nref - 1) as f64).cos());
            ((m - 1) as f64 * t).round() as usize
        })
        .collect();
    for i in 1..nref {
        if refs[i] <= refs[i - 1] {
            refs[i] = refs[i - 1] + 1;
        }
    }
    if *refs.last().unwrap() >= m {
        return lsq_fallback(p, n, &scaled_cols, &scales);
    }

    let mut r = vec![0.0f64; m];
    let mut prev_h = 0.0f64;
    let mut degenerate = 0usize;
    let mut a_scaled = vec![0.0f64; n + 1];

    for iter in 0..REMEZ_MAX_ITER {
        // equioscillation system on the reference set
        let mut mat = Vec::with_capacity(nref);
        let mut rhs = Vec::with_capacity(nref);
        for (i, &idx) in refs.iter().enumerate() {
            let mut row = Vec::with_capacity(nref);
            for col in &scaled_cols {
                row.push(col[idx]);
            }
            row.push(if i % 2 == 0 { 1.0 } else { -1.0 });
            mat.push(row);
            rhs.push(target[idx]);
        }
        let sol = match solve_full_pivot(mat, rhs, 1e-15) {
            Some(s) => s,
            None => return lsq_fallback(p, n, &scaled_cols, &scales),
        };
        let h = sol[nref - 1];
        if !h.is_finite() {
            return lsq_fallback(p, n, &scaled_cols, &scales);
        }
        // h = 0 means the basis interpolates the reference points outright;
        // the exchange may still escape the degeneracy, but not forever
        if h == 0.0 {
            degenerate += 1;
            if degenerate > 35 {
                return lsq_fallback(p, n, &scaled_cols, &scales);
            }
        } else {
            degenerate = 0;
        }
        a_scaled.copy_from_slice(&sol[..n + 1]);

        let a_unscaled: Vec<f64> = a_scaled.iter().zip(&scales).map(|(v, s)| v / s).collect();
        let cols: Vec<&[f64]> = p.basis[..=n].iter().map(|f| f.values()).collect();
        residual(target, &cols, &a_unscaled, &mut r);
        let (imax, eps_cur) = sup_index(&r);

        // monotone sandwich |h| ≤ ε must hold for a healthy exchange
        if h.abs() > eps_cur * (1.0 + 1e-6)
            || (iter > 0 && h != 0.0 && prev_h > 0.0 && h.abs() < prev_h * (1.0 - 1e-6))
        {
            return lsq_fallback(p, n, &scaled_cols, &scales);
        }
        if h != 0.0 {
            prev_h = h.abs();
        }

        if eps_cur == 0.0 || eps_cur - h.abs() <= REMEZ_AGREEMENT * eps_cur {
            return Ok(finish(p, n, a_scaled, &scales, SolveMethod::Remez, h.abs()));
        }

        // single-point exchange keeping sign alternation
        if refs.contains(&imax) {
            return lsq_fallback(p, n, &scaled_cols, &scales);
        }
        let s_new = r[imax].signum();
        if imax < refs[0] {
            if s_new == r[refs[0]].signum() {
                refs[0] = imax;
            } else {
                refs.pop();
                refs.insert(0, imax);
            }
        } else if imax > *refs.last().unwrap() {
            if s_new == r[*refs.last().unwrap()].signum() {
                *refs.last_mut().unwrap() = imax;
            } else {
                refs.remove(0);
                refs.push(imax);
            }
        } else {
            let j = refs.iter().position(|&idx| idx > imax).unwrap();
            if s_new == r[refs[j - 1]].signum() {
                refs[j - 1] = imax;
            } else {
                refs[j] = imax;
            }
        }
    }
    // iteration budget exhausted: keep the current solution unless the
    // least-squares fallback beats it (a non-converging exchange is a stall)
    let remez_result = finish(p, n, a_scaled, &scales, SolveMethod::Remez, prev_h);
    if let Ok(lsq) = lsq_fallback(p, n, &scaled_cols, &scales) {
        if lsq.epsilon < remez_result.epsilon {
            return Ok(lsq);
        }
    }
    Ok(remez_result)
}

/// Raise the order from 0 until the target error is reached; stop early and
/// return the best order seen when ε rises three times in a row or a
/// coefficient passes 10¹², flagging the result conditioning-limited.
pub fn select_n(p: &MinimaxProblem, eps_target: f64, n_max: usize) -> Result<ApproximationResult> {
    if !(eps_target > 0.0) {
        return Err(Error::precondition("select_n", "eps_target must be > 0"));
    }
    let n_cap = n_max.min(p.basis.len() - 1);
    let mut best: Option<ApproximationResult> = None;
    let mut prev_eps = f64::INFINITY;
    let mut rises = 0usize;

    for n in 0..=n_cap {
        let mut res = match remez_solve(p, n) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let better = best.as_ref().map(|b| res.epsilon < b.epsilon).unwrap_or(true);
        if res.epsilon <= eps_target {
            res.target_reached = true;
            return Ok(res);
        }
        if res.epsilon > prev_eps {
            rises += 1;
        } else {
            rises = 0;
        }
        prev_eps = res.epsilon;
        let blow_up = res.condition.max_abs_coeff > 1e12;
        if better {
            best = Some(res);
        }
        if rises >= 3 || blow_up {
            break;
        }
    }

    match best {
        Some(mut b) => {
            b.conditioning_limited = true;
            Ok(b)
        }
        None => Err(Error::Singular { op: "select_n" }),
    }
}

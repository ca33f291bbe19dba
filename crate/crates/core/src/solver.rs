//! Spectral-parameter-dependent machinery: moment integrals of the regular
//! unperturbed solution, closed-form evaluation of the approximate solution
//! u_N and its derivative, the characteristic function of a boundary
//! condition, the eigenvalue scan, and the residual bound check.

use crate::approx::{ApproxMode, ApproximationResult};
use crate::error::{Error, Result};
use crate::grid::{
    cumulative_integral, cumulative_integral_power, evaluate_at, SampledFunction,
    UniformGrid,
};
use crate::specfun::{
    d_l_prime_unchecked, d_l_unchecked, hyp1f2, ln_gamma, SpectralFrequency,
};
use crate::wavebasis::WaveBasis;

/// Options steering the solve pipeline.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub grid_points: usize,
    pub eps_target: f64,
    pub mode: ApproxMode,
    pub n_max: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grid_points: 20001,
            eps_target: 1e-9,
            mode: ApproxMode::Integral,
            n_max: 30,
        }
    }
}

/// A spectral problem −u″ + (l(l+1)/x² + q)u = λu on (0,b] with boundary
/// condition β·u(b) + γ·u′(b) = 0 and a λ search window.
#[derive(Debug, Clone)]
pub struct SpectralProblem {
    pub l: f64,
    pub b: f64,
    pub q: SampledFunction,
    pub beta: f64,
    pub gamma: f64,
    pub lambda_range: (f64, f64),
    pub options: SolverOptions,
    /// q(0); the normalized problem uses q₀ = q − q(0) and Λ = λ − q(0)
    shift: f64,
    q0: SampledFunction,
}

impl SpectralProblem {
    pub fn new(
        l: f64,
        q: SampledFunction,
        beta: f64,
        gamma: f64,
        lambda_range: (f64, f64),
        options: SolverOptions,
    ) -> Result<Self> {
        if l < -0.5 || !l.is_finite() {
            return Err(Error::Config(format!("l = {l} must be finite and ≥ −1/2")));
        }
        if beta.abs() + gamma.abs() == 0.0 || !beta.is_finite() || !gamma.is_finite() {
            return Err(Error::Config("boundary condition needs |β| + |γ| ≠ 0".into()));
        }
        let (lo, hi) = lambda_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Config(format!("invalid lambda range ({lo}, {hi}]")));
        }
        let shift = q.values()[0];
        if lo < shift {
            return Err(Error::Config(format!(
                "lambda range starts at {lo} < q(0) = {shift}; only Λ = λ − q(0) > 0 is supported"
            )));
        }
        let q0 = SampledFunction::new(q.grid(), q.values().iter().map(|v| v - shift).collect())?;
        Ok(SpectralProblem {
            l,
            b: q.grid().b(),
            beta,
            gamma,
            lambda_range,
            options,
            shift,
            q0,
            q,
        })
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// The normalized potential q₀ = q − q(0).
    pub fn normalized_q(&self) -> &SampledFunction {
        &self.q0
    }
}

// ---------------------------------------------------------------------------
// moment integrals m_k(x, ω) = ∫₀ˣ t^{2k+l+1} d_l(t, ω²) dt
// ---------------------------------------------------------------------------

/// Moment evaluator over one grid. The closed ₁F₂ form serves small ωx, the
/// trigonometric recursion serves integer l, and cumulative quadrature of the
/// sampled integrand covers everything else, cached per (λ, k).
pub struct MomentEngine {
    pub l: f64,
    grid: UniformGrid,
    k_max: usize,
    /// t^{2k+l+1} per k on the grid
    powers: Vec<Vec<f64>>,
    /// composite-rule weights for the full-interval integral
    end_weights: Vec<f64>,
    /// (ω/2)^{l+1/2}/Γ(l+3/2) denominator
    ln_gamma_l32: f64,
}

/// Per-λ workspace: sampled d_l and cached cumulative moment arrays.
pub struct MomentScratch {
    omega_bits: u64,
    grid_len: usize,
    dl: Vec<f64>,
    /// smooth factor d_l/t^{l+1} for the power-weighted quadrature
    s_reg: Vec<f64>,
    at_b: Option<Vec<f64>>,
    cums: Vec<Option<SampledFunction>>,
}

impl MomentScratch {
    pub fn new() -> Self {
        MomentScratch {
            omega_bits: 0,
            grid_len: 0,
            dl: Vec::new(),
            s_reg: Vec::new(),
            at_b: None,
            cums: Vec::new(),
        }
    }
}

impl Default for MomentScratch {
    fn default() -> Self {
        Self::new()
    }
}

const PANEL_END_ROW: [f64; 6] = [
    95.0 / 288.0,
    125.0 / 96.0,
    125.0 / 144.0,
    125.0 / 144.0,
    125.0 / 96.0,
    95.0 / 288.0,
];

impl MomentEngine {
    pub fn new(l: f64, grid: UniformGrid, k_max: usize) -> Result<Self> {
        // powers[k][i] = x_i^{2k+l+1}, built incrementally
        let mut powers = Vec::with_capacity(k_max + 1);
        let p0: Vec<f64> = grid
            .points()
            .map(|x| if x == 0.0 { 0.0 } else { x.powf(l + 1.0) })
            .collect();
        powers.push(p0);
        for _ in 1..=k_max {
            let mut next = powers.last().unwrap().clone();
            for (i, v) in next.iter_mut().enumerate() {
                let x = grid.x(i);
                *v *= x * x;
            }
            powers.push(next);
        }
        let mut end_weights = vec![0.0f64; grid.len()];
        let panels = (grid.len() - 1) / 5;
        for p in 0..panels {
            for i in 0..6 {
                end_weights[5 * p + i] += PANEL_END_ROW[i] * grid.h();
            }
        }
        Ok(MomentEngine {
            l,
            grid,
            k_max,
            powers,
            end_weights,
            ln_gamma_l32: ln_gamma(l + 1.5)?,
        })
    }

    pub fn grid(&self) -> UniformGrid {
        self.grid
    }

    fn is_integer_l(&self) -> Option<usize> {
        if self.l >= 0.0 && self.l.fract() == 0.0 {
            Some(self.l as usize)
        } else {
            None
        }
    }

    /// Closed ₁F₂ form; None when the series flags cancellation.
    fn try_1f2(&self, k: usize, omega: f64, x: f64) -> Option<f64> {
        let l = self.l;
        let p = 2.0 * (k as f64 + l) + 3.0;
        let z = -(omega * x) * (omega * x) / 4.0;
        match hyp1f2(p / 2.0, (p + 2.0) / 2.0, l + 1.5, z) {
            Ok(h) if h.is_clean() => {
                let ln_pref = (l + 0.5) * (omega.ln() - std::f64::consts::LN_2) - self.ln_gamma_l32;
                Some(ln_pref.exp() * x.powf(p) / p * h.value)
            }
            _ => None,
        }
    }

    /// Trigonometric recursion for integer l; None when the coefficient sums
    /// cancel too heavily to trust.
    fn try_trig(&self, k: usize, omega: f64, x: f64) -> Option<f64> {
        let l_int = self.is_integer_l()?;
        let l = l_int as f64;
        let m = 2 * k + l_int; // highest power is m+1
        // P_j = (−1)^{⌊j/2⌋} (l+j)!/(j!(l−j)!2^j) for j ≤ l, else 0
        let p_coef = |j: usize| -> f64 {
            if j > l_int {
                return 0.0;
            }
            let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let mut num = 1.0f64;
            for i in 1..=(l_int + j) {
                num *= i as f64;
            }
            let mut den = 2.0f64.powi(j as i32);
            for i in 1..=j {
                den *= i as f64;
            }
            for i in 1..=(l_int - j) {
                den *= i as f64;
            }
            sign * num / den
        };
        // C_{m+1} = −1; C_{m−j} = (−1)^j [P_{j+1} − (m+1−j) C_{m+1−j}]
        let mut c = vec![0.0f64; m + 2];
        c[m + 1] = -1.0;
        for j in 0..=m {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            c[m - j] = sign * (p_coef(j + 1) - (m + 1 - j) as f64 * c[m + 1 - j]);
        }
        let eval = |t: f64| -> (f64, f64) {
            let wt = omega * t;
            let mut s_sin = 0.0f64;
            let mut s_cos = 0.0f64;
            let mut max_term = 0.0f64;
            let mut j = 0usize;
            while 2 * j <= m {
                let term = c[m - 2 * j] * wt.powi((m - 2 * j) as i32);
                s_sin += term;
                max_term = max_term.max(term.abs());
                j += 1;
            }
            let mut j = 0usize;
            while 2 * j <= m + 1 {
                let term = c[m + 1 - 2 * j] * wt.powi((m + 1 - 2 * j) as i32);
                s_cos += term;
                max_term = max_term.max(term.abs());
                j += 1;
            }
            let phase = wt - l * std::f64::consts::FRAC_PI_2;
            let val = phase.sin() * s_sin + phase.cos() * s_cos;
            (val, max_term)
        };
        let (fx, max_x) = eval(x);
        let (f0, _) = eval(0.0);
        let combined = fx - f0;
        if combined == 0.0 || max_x > 1e8 * combined.abs() {
            return None;
        }
        let pref = (2.0 / std::f64::consts::PI).sqrt() / omega.powf(2.0 * k as f64 + l + 2.5);
        Some(pref * combined)
    }

    fn refresh_scratch(&self, omega: f64, scratch: &mut MomentScratch) {
        let bits = omega.to_bits();
        if scratch.omega_bits == bits
            && scratch.grid_len == self.grid.len()
            && scratch.cums.len() == self.k_max + 1
            && !scratch.dl.is_empty()
        {
            return;
        }
        scratch.omega_bits = bits;
        scratch.grid_len = self.grid.len();
        scratch.dl = self.grid.points().map(|x| d_l_unchecked(self.l, omega, x)).collect();
        // d_l/t^{l+1} with its analytic limit at 0
        let l = self.l;
        let s0 = ((l + 0.5) * (omega / 2.0).ln() - self.ln_gamma_l32).exp();
        scratch.s_reg = self
            .grid
            .points()
            .zip(&scratch.dl)
            .map(|(x, &d)| if x == 0.0 { s0 } else { d / x.powf(l + 1.0) })
            .collect();
        scratch.at_b = None;
        scratch.cums = (0..=self.k_max).map(|_| None).collect();
    }

    /// All moments at x = b for one ω, with per-path selection.
    pub fn moments_at_b(&self, omega: f64, scratch: &mut MomentScratch) -> Vec<f64> {
        self.refresh_scratch(omega, scratch);
        if let Some(cached) = &scratch.at_b {
            return cached.clone();
        }
        let b = self.grid.b();
        let mut out = vec![f64::NAN; self.k_max + 1];
        let mut need_quad = Vec::new();
        for k in 0..=self.k_max {
            if let Some(v) = self.try_1f2(k, omega, b) {
                out[k] = v;
            } else if let Some(v) = self.try_trig(k, omega, b) {
                out[k] = v;
            } else {
                need_quad.push(k);
            }
        }
        if !need_quad.is_empty() {
            for &k in &need_quad {
                let mut acc = 0.0;
                let pw = &self.powers[k];
                for i in 0..self.grid.len() {
                    acc += self.end_weights[i] * pw[i] * scratch.dl[i];
                }
                out[k] = acc;
            }
        }
        scratch.at_b = Some(out.clone());
        out
    }

    /// m_k(x, ω) at arbitrary x ∈ [0, b].
    pub fn moment(&self, k: usize, omega: SpectralFrequency, x: f64, scratch: &mut MomentScratch) -> Result<f64> {
        if k > self.k_max {
            return Err(Error::precondition("moment", format!("k = {k} beyond table ({})", self.k_max)));
        }
        let b = self.grid.b();
        if !(0.0..=b * (1.0 + 1e-14)).contains(&x) {
            return Err(Error::domain("moment", format!("x = {x} outside [0, {b}]")));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        let omega = omega.omega();
        if let Some(v) = self.try_1f2(k, omega, x) {
            return Ok(v);
        }
        if let Some(v) = self.try_trig(k, omega, x) {
            return Ok(v);
        }
        self.refresh_scratch(omega, scratch);
        if scratch.cums[k].is_none() {
            let beta = 2.0 * k as f64 + 2.0 * self.l + 2.0;
            let s = SampledFunction::new(
                self.grid,
                scratch.s_reg.clone(),
            )?;
            scratch.cums[k] = Some(cumulative_integral_power(beta, &s)?);
        }
        evaluate_at(scratch.cums[k].as_ref().unwrap(), x)
    }

    /// Cumulative moment array over the grid for one (λ, k), cached.
    fn moment_array(&self, k: usize, omega: f64, scratch: &mut MomentScratch) -> Result<SampledFunction> {
        self.refresh_scratch(omega, scratch);
        if scratch.cums[k].is_none() {
            let beta = 2.0 * k as f64 + 2.0 * self.l + 2.0;
            let s = SampledFunction::new(self.grid, scratch.s_reg.clone())?;
            scratch.cums[k] = Some(cumulative_integral_power(beta, &s)?);
        }
        Ok(scratch.cums[k].clone().unwrap())
    }
}

// ---------------------------------------------------------------------------
// closed-form approximate solution u_N and its derivative
// ---------------------------------------------------------------------------

/// Everything needed to evaluate u_N(x, λ) and u_N′(x, λ) at any λ in the
/// supported region. The double sum over (n, k) of the kernel expansion is
/// collapsed once into g_k(x) = Σ_{n≥k} a_n Ξ_{n,k} X̃⁽²⁽ⁿ⁻ᵏ⁾⁾(x) plus the
/// odd-order companion, so each evaluation is O(N).
pub struct SolutionEvaluator {
    pub l: f64,
    shift: f64,
    grid: UniformGrid,
    n: usize,
    g: Vec<SampledFunction>,
    g_odd: Vec<SampledFunction>,
    u0: SampledFunction,
    u0_prime: SampledFunction,
    /// sup_x |½∫₀ˣ q₀ − Σ a_κ c_κ| — the uniform error of the integral-form
    /// approximation
    pub epsilon_integral: f64,
    /// sup_x |∫₀ˣ (q_N − q₀)| = 2·epsilon_integral — the defect level the
    /// residual bound 2ε√x is stated against
    pub epsilon_defect: f64,
    /// q_N − q₀ on the grid
    q_defect: SampledFunction,
    engine: MomentEngine,
    // endpoint scalars for the characteristic function
    u0_b: f64,
    u0p_b: f64,
    g_b: Vec<f64>,
    g_odd_b: Vec<f64>,
    pow_b: Vec<f64>,
}

impl SolutionEvaluator {
    pub fn build(problem: &SpectralProblem, basis: &WaveBasis, approx: &ApproximationResult) -> Result<Self> {
        let grid = basis.grid();
        let l = basis.l;
        let n = approx.n;
        let m = grid.len();
        if approx.a.len() != n + 1 {
            return Err(Error::precondition("SolutionEvaluator", "coefficient length mismatch"));
        }

        let mut g = Vec::with_capacity(n + 1);
        let mut g_odd = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut gv = vec![0.0f64; m];
            let mut gov = vec![0.0f64; m];
            for nn in k..=n {
                let xi = basis.xi.xi(nn, k);
                let an = approx.a[nn];
                if an == 0.0 {
                    continue;
                }
                let xe = basis.x_tilde.x_tilde(2 * (nn - k) as isize).expect("order bounded");
                for i in 0..m {
                    gv[i] += an * xi * xe.values()[i];
                }
                if nn > k {
                    let xo = basis.x_tilde.x_tilde(2 * (nn - k) as isize - 1).expect("order bounded");
                    for i in 0..m {
                        gov[i] += an * xi * xo.values()[i];
                    }
                }
            }
            g.push(SampledFunction::new(grid, gv)?);
            g_odd.push(SampledFunction::new(grid, gov)?);
        }

        // integral-form error level (equals approx.epsilon in integral mode)
        let half_int_q = {
            let mut f = cumulative_integral(problem.normalized_q());
            for v in f.values_mut() {
                *v *= 0.5;
            }
            f
        };
        let mut eps_int = 0.0f64;
        for i in 0..m {
            let mut fit = 0.0;
            for (kappa, &a) in approx.a.iter().enumerate() {
                fit += a * basis.trace(kappa).values()[i];
            }
            eps_int = eps_int.max((half_int_q.values()[i] - fit).abs());
        }

        // q_N − q₀
        let mut defect = vec![0.0f64; m];
        for i in 0..m {
            let mut qn = 0.0;
            for (kappa, &a) in approx.a.iter().enumerate() {
                qn += 2.0 * a * basis.trace_derivative(kappa).values()[i];
            }
            defect[i] = qn - problem.normalized_q().values()[i];
        }

        let engine = MomentEngine::new(l, grid, n)?;
        let u0_b = basis.u0.u0.values()[m - 1];
        let u0p_b = basis.u0.u0_prime.values()[m - 1];
        let g_b = g.iter().map(|f| f.values()[m - 1]).collect();
        let g_odd_b = g_odd.iter().map(|f| f.values()[m - 1]).collect();
        let b = grid.b();
        let pow_b = (0..=n).map(|k| b.powf(2.0 * k as f64 + l + 1.0)).collect();

        Ok(SolutionEvaluator {
            l,
            shift: problem.shift(),
            grid,
            n,
            g,
            g_odd,
            u0: basis.u0.u0.clone(),
            u0_prime: basis.u0.u0_prime.clone(),
            epsilon_integral: eps_int,
            epsilon_defect: 2.0 * eps_int,
            q_defect: SampledFunction::new(grid, defect)?,
            engine,
            u0_b,
            u0p_b,
            g_b,
            g_odd_b,
            pow_b,
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> UniformGrid {
        self.grid
    }

    pub fn engine(&self) -> &MomentEngine {
        &self.engine
    }

    fn big_lambda(&self, lambda: f64) -> Result<f64> {
        let big = lambda - self.shift;
        if big <= 0.0 {
            return Err(Error::UnsupportedSpectralRegion { lambda, big_lambda: big });
        }
        Ok(big)
    }

    /// u_N(x, λ) = d_l(x, Λ) + u₀(x) Σ_k g_k(x) m_k(x, √Λ).
    pub fn eval_u(&self, lambda: f64, x: f64, scratch: &mut MomentScratch) -> Result<f64> {
        let big = self.big_lambda(lambda)?;
        let omega = big.sqrt();
        if x == 0.0 {
            return Ok(0.0);
        }
        let freq = SpectralFrequency::new(omega)?;
        let mut acc = d_l_unchecked(self.l, omega, x);
        let u0x = evaluate_at(&self.u0, x)?;
        for k in 0..=self.n {
            let gk = evaluate_at(&self.g[k], x)?;
            if gk != 0.0 {
                acc += u0x * gk * self.engine.moment(k, freq, x, scratch)?;
            }
        }
        Ok(acc)
    }

    /// u_N over the whole grid at one λ (shared moment arrays).
    pub fn eval_u_grid(&self, lambda: f64, scratch: &mut MomentScratch) -> Result<SampledFunction> {
        let big = self.big_lambda(lambda)?;
        let omega = big.sqrt();
        let m = self.grid.len();
        let mut vals = vec![0.0f64; m];
        for i in 0..m {
            vals[i] = d_l_unchecked(self.l, omega, self.grid.x(i));
        }
        for k in 0..=self.n {
            let arr = self.engine.moment_array(k, omega, scratch)?;
            let gk = self.g[k].values();
            for i in 0..m {
                vals[i] += self.u0.values()[i] * gk[i] * arr.values()[i];
            }
        }
        SampledFunction::new(self.grid, vals)
    }

    /// u_N′(x, λ): the Bessel derivative group, the (u₀′ X̃ − X̃/u₀) moment
    /// group, and the d_l·u₀ power group.
    pub fn eval_du(&self, lambda: f64, x: f64, scratch: &mut MomentScratch) -> Result<f64> {
        let big = self.big_lambda(lambda)?;
        let omega = big.sqrt();
        if x == 0.0 {
            if self.l < 0.0 {
                return Err(Error::domain("eval_du", "derivative diverges at x = 0 for l < 0"));
            }
            let lim = if self.l == 0.0 {
                ((omega / 2.0).ln() * 0.5 - ln_gamma(1.5)?).exp()
            } else {
                0.0
            };
            return Ok(lim);
        }
        let freq = SpectralFrequency::new(omega)?;
        let mut acc = d_l_prime_unchecked(self.l, omega, x);
        let u0x = evaluate_at(&self.u0, x)?;
        let u0px = evaluate_at(&self.u0_prime, x)?;
        let dlx = d_l_unchecked(self.l, omega, x);
        for k in 0..=self.n {
            let gk = evaluate_at(&self.g[k], x)?;
            let gok = evaluate_at(&self.g_odd[k], x)?;
            if gk != 0.0 || gok != 0.0 {
                let mk = self.engine.moment(k, freq, x, scratch)?;
                acc += (u0px * gk - gok / u0x) * mk;
                acc += dlx * u0x * gk * x.powf(2.0 * k as f64 + self.l + 1.0);
            }
        }
        Ok(acc)
    }

    /// Characteristic function Φ(λ) = β·u_N(b,λ) + γ·u_N′(b,λ), using only
    /// endpoint scalars.
    pub fn characteristic(&self, beta: f64, gamma: f64, lambda: f64, scratch: &mut MomentScratch) -> Result<f64> {
        let big = self.big_lambda(lambda)?;
        let omega = big.sqrt();
        let b = self.grid.b();
        let moments = self.engine.moments_at_b(omega, scratch);
        let mut phi = 0.0;
        if beta != 0.0 {
            let mut u = d_l_unchecked(self.l, omega, b);
            for k in 0..=self.n {
                u += self.u0_b * self.g_b[k] * moments[k];
            }
            phi += beta * u;
        }
        if gamma != 0.0 {
            let dlb = d_l_unchecked(self.l, omega, b);
            let mut du = d_l_prime_unchecked(self.l, omega, b);
            for k in 0..=self.n {
                du += (self.u0p_b * self.g_b[k] - self.g_odd_b[k] / self.u0_b) * moments[k];
                du += dlb * self.u0_b * self.g_b[k] * self.pow_b[k];
            }
            phi += gamma * du;
        }
        Ok(phi)
    }

    /// |∫₀ˣ (q_N − q₀) d_l(·,Λ)| against the bound 2ε√x.
    pub fn residual_bound_check(&self, lambda: f64, scratch: &mut MomentScratch) -> Result<ResidualReport> {
        let big = self.big_lambda(lambda)?;
        let omega = big.sqrt();
        let _ = scratch;
        let m = self.grid.len();
        let mut integrand = vec![0.0f64; m];
        for i in 0..m {
            integrand[i] = self.q_defect.values()[i] * d_l_unchecked(self.l, omega, self.grid.x(i));
        }
        let cum = cumulative_integral(&SampledFunction::new(self.grid, integrand)?);
        let eps = self.epsilon_defect;
        let mut worst_ratio = 0.0f64;
        let mut worst_x = 0.0f64;
        for i in 1..m {
            let x = self.grid.x(i);
            let bound = 2.0 * eps * x.sqrt();
            let ratio = cum.values()[i].abs() / bound;
            if ratio > worst_ratio {
                worst_ratio = ratio;
                worst_x = x;
            }
        }
        Ok(ResidualReport {
            lambda,
            epsilon_used: eps,
            worst_ratio,
            worst_x,
            ok: worst_ratio <= 1.0 + 1e-9,
            within_slack: worst_ratio <= 1.1,
        })
    }
}

/// Outcome of one residual bound check.
#[derive(Debug, Clone, Copy)]
pub struct ResidualReport {
    pub lambda: f64,
    pub epsilon_used: f64,
    pub worst_ratio: f64,
    pub worst_x: f64,
    pub ok: bool,
    /// a violation beyond 10% slack is a hard failure
    pub within_slack: bool,
}

// ---------------------------------------------------------------------------
// eigenvalue search
// ---------------------------------------------------------------------------

/// One located eigenvalue with its diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct Eigenvalue {
    pub index: usize,
    pub lambda: f64,
    pub phi_residual: f64,
    pub refinement_iterations: usize,
    pub residual_bound_ok: bool,
}

/// Eigenvalues located in the search window plus scan diagnostics.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub eigenvalues: Vec<Eigenvalue>,
    /// (λ, Φ(λ)) samples of the scan grid
    pub char_values: Vec<(f64, f64)>,
}

fn scan_threads() -> usize {
    if let Ok(v) = std::env::var("BESSELTRANS_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n >= 1 {
                return n;
            }
        }
    }
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8)
}

/// Scan Φ over a frequency grid with step Δω ≤ π/(4b), bracket the sign
/// changes, refine by bisection then secant to 1e-12 relative, and attach a
/// residual bound check to every root.
pub fn find_eigenvalues(problem: &SpectralProblem, ev: &SolutionEvaluator) -> Result<EigenResult> {
    let (lo, hi) = problem.lambda_range;
    let shift = problem.shift();
    let big_hi = hi - shift;
    if big_hi <= 0.0 {
        return Ok(EigenResult { eigenvalues: Vec::new(), char_values: Vec::new() });
    }
    let big_lo = (lo - shift).max(big_hi * 1e-14).max(1e-14);
    let omega_lo = big_lo.sqrt();
    let omega_hi = big_hi.sqrt();
    let d_omega = (std::f64::consts::PI / (4.0 * problem.b)).min((omega_hi - omega_lo) / 8.0);
    let steps = ((omega_hi - omega_lo) / d_omega).ceil() as usize + 1;
    let omegas: Vec<f64> = (0..=steps)
        .map(|i| (omega_lo + i as f64 * (omega_hi - omega_lo) / steps as f64).min(omega_hi))
        .collect();

    // Φ on the global scan nodes, chunked across workers; the node list is
    // fixed up front so results do not depend on the worker count
    let n_threads = scan_threads().min(omegas.len()).max(1);
    let mut phis = vec![0.0f64; omegas.len()];
    let chunk = omegas.len().div_ceil(n_threads);
    std::thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::new();
        for (t, slot) in phis.chunks_mut(chunk).enumerate() {
            let omegas = &omegas;
            let handle = scope.spawn(move || -> Result<()> {
                let mut scratch = MomentScratch::new();
                for (j, out) in slot.iter_mut().enumerate() {
                    let w = omegas[t * chunk + j];
                    *out = ev.characteristic(problem.beta, problem.gamma, w * w + shift, &mut scratch)?;
                }
                Ok(())
            });
            handles.push(handle);
        }
        for h in handles {
            h.join().expect("scan worker panicked")?;
        }
        Ok(())
    })?;

    let char_values: Vec<(f64, f64)> =
        omegas.iter().zip(&phis).map(|(&w, &p)| (w * w + shift, p)).collect();

    // bracket sign changes
    let mut brackets = Vec::new();
    for i in 1..omegas.len() {
        let (pa, pb) = (phis[i - 1], phis[i]);
        if pa == 0.0 {
            if i == 1 {
                brackets.push((omegas[0], omegas[0]));
            }
            continue;
        }
        if pb == 0.0 {
            brackets.push((omegas[i], omegas[i]));
            continue;
        }
        if pa.signum() != pb.signum() {
            brackets.push((omegas[i - 1], omegas[i]));
        }
    }

    // refine brackets (independent, chunked deterministically)
    let mut roots: Vec<(f64, f64, usize)> = vec![(f64::NAN, f64::NAN, 0); brackets.len()];
    let chunk_r = brackets.len().div_ceil(n_threads).max(1);
    std::thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::new();
        for (t, slot) in roots.chunks_mut(chunk_r).enumerate() {
            let brackets = &brackets;
            let handle = scope.spawn(move || -> Result<()> {
                let mut scratch = MomentScratch::new();
                for (j, out) in slot.iter_mut().enumerate() {
                    let (wa, wb) = brackets[t * chunk_r + j];
                    *out = refine_root(problem, ev, wa, wb, &mut scratch)?;
                }
                Ok(())
            });
            handles.push(handle);
        }
        for h in handles {
            h.join().expect("refine worker panicked")?;
        }
        Ok(())
    })?;

    let mut scratch = MomentScratch::new();
    let mut eigenvalues = Vec::with_capacity(roots.len());
    let mut sorted = roots;
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for (idx, (lambda, phi_res, iters)) in sorted.into_iter().enumerate() {
        let residual = ev.residual_bound_check(lambda, &mut scratch)?;
        eigenvalues.push(Eigenvalue {
            index: idx + 1,
            lambda,
            phi_residual: phi_res,
            refinement_iterations: iters,
            residual_bound_ok: residual.ok,
        });
    }
    Ok(EigenResult { eigenvalues, char_values })
}

fn refine_root(
    problem: &SpectralProblem,
    ev: &SolutionEvaluator,
    wa: f64,
    wb: f64,
    scratch: &mut MomentScratch,
) -> Result<(f64, f64, usize)> {
    let shift = problem.shift();
    let phi = |lambda: f64, scratch: &mut MomentScratch| -> Result<f64> {
        ev.characteristic(problem.beta, problem.gamma, lambda, scratch)
    };
    let (mut la, mut lb) = (wa * wa + shift, wb * wb + shift);
    let mut iters = 0usize;
    if la == lb {
        let p = phi(la, scratch)?;
        return Ok((la, p.abs(), 0));
    }
    let mut fa = phi(la, scratch)?;
    let mut fb = phi(lb, scratch)?;
    if fa == 0.0 {
        return Ok((la, 0.0, 0));
    }
    if fb == 0.0 {
        return Ok((lb, 0.0, 0));
    }
    // bisection to a tight relative bracket
    while (lb - la) > 1e-8 * lb.abs().max(1.0) && iters < 200 {
        let mid = 0.5 * (la + lb);
        let fm = phi(mid, scratch)?;
        iters += 1;
        if fm == 0.0 {
            return Ok((mid, 0.0, iters));
        }
        if fm.signum() == fa.signum() {
            la = mid;
            fa = fm;
        } else {
            lb = mid;
            fb = fm;
        }
    }
    // secant polish with bracket safeguard
    let (mut x0, mut f0, mut x1, mut f1) = (la, fa, lb, fb);
    for _ in 0..40 {
        if f1 == f0 {
            break;
        }
        let mut x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !(x2 > la && x2 < lb) {
            x2 = 0.5 * (la + lb);
        }
        let f2 = phi(x2, scratch)?;
        iters += 1;
        if f2 == 0.0 {
            return Ok((x2, 0.0, iters));
        }
        if f2.signum() == fa.signum() {
            la = x2;
            fa = f2;
        } else {
            lb = x2;
            fb = f2;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        if (lb - la) <= 1e-12 * lb.abs().max(1.0) {
            break;
        }
    }
    let root = if fa.abs() <= fb.abs() { la } else { lb };
    let p = fa.abs().min(fb.abs());
    Ok((root, p, iters))
}

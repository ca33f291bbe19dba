//! Generalized wave polynomials: the Ξ_{n,k} coefficient table, the trace
//! functions c_n and their derivatives, evaluation of the kernel approximant
//! K_N, and the classical wave polynomials used by the verification suite.

use crate::error::{Error, Result};
use crate::grid::{SampledFunction, UniformGrid};
use crate::specfun::ln_gamma;
use crate::spps::{ParticularSolution, RecursiveIntegrals};

/// Largest exponent ln|Ξ| may reach before the table refuses to convert to
/// binary64 (a little headroom under ln(f64::MAX) ≈ 709.8).
const LN_OVERFLOW: f64 = 700.0;

/// Triangular table of coefficients
/// Ξ_{n,k} = C²·binom(2n,2k)·(−1)^{n−k}·2^{2(n−k)}·(n−k)!·Γ(n+1/2−k)Γ(k+1/2)
///           / (Γ(k+l+3/2)Γ(l+3/2)),   C = Γ(l+1)/(2^{l+3/2}Γ(l+3/2)),
/// kept in log space with separate signs because the entries grow like (2n)!.
#[derive(Debug, Clone)]
pub struct XiTable {
    pub l: f64,
    pub n_max: usize,
    ln_abs: Vec<Vec<f64>>,
    sign: Vec<Vec<f64>>,
}

impl XiTable {
    #[inline]
    pub fn xi(&self, n: usize, k: usize) -> f64 {
        self.sign[n][k] * self.ln_abs[n][k].exp()
    }

    #[inline]
    pub fn ln_abs(&self, n: usize, k: usize) -> f64 {
        self.ln_abs[n][k]
    }

    #[inline]
    pub fn sign(&self, n: usize, k: usize) -> f64 {
        self.sign[n][k]
    }

    /// Largest order whose entries all fit in binary64.
    pub fn max_safe_order(l: f64) -> usize {
        let mut n = 0;
        while n < 10_000 {
            if ln_xi(l, n + 1, 0).map(|(ln, _)| ln > LN_OVERFLOW).unwrap_or(true)
                || (0..=n + 1).any(|k| ln_xi(l, n + 1, k).map(|(ln, _)| ln > LN_OVERFLOW).unwrap_or(true))
            {
                return n;
            }
            n += 1;
        }
        n
    }

    #[cfg(test)]
    pub(crate) fn perturb(&mut self, n: usize, k: usize, rel: f64) {
        self.ln_abs[n][k] += rel.ln_1p();
    }
}

fn ln_xi(l: f64, n: usize, k: usize) -> Result<(f64, f64)> {
    let ln2 = std::f64::consts::LN_2;
    let nf = n as f64;
    let kf = k as f64;
    let ln_c = ln_gamma(l + 1.0)? - (l + 1.5) * ln2 - ln_gamma(l + 1.5)?;
    let ln_binom = ln_gamma(2.0 * nf + 1.0)? - ln_gamma(2.0 * kf + 1.0)? - ln_gamma(2.0 * (nf - kf) + 1.0)?;
    let ln = 2.0 * ln_c
        + ln_binom
        + 2.0 * (nf - kf) * ln2
        + ln_gamma(nf - kf + 1.0)?
        + ln_gamma(nf + 0.5 - kf)?
        + ln_gamma(kf + 0.5)?
        - ln_gamma(kf + l + 1.5)?
        - ln_gamma(l + 1.5)?;
    let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
    Ok((ln, sign))
}

/// Build the Ξ table up to order `n_max`; fails with the largest safe order
/// when any requested entry overflows binary64.
pub fn xi_coefficients(l: f64, n_max: usize) -> Result<XiTable> {
    if l < -0.5 {
        return Err(Error::domain("xi_coefficients", format!("l = {l} must be ≥ −1/2")));
    }
    let mut ln_abs = Vec::with_capacity(n_max + 1);
    let mut sign = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut row_ln = Vec::with_capacity(n + 1);
        let mut row_sg = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let (ln, sg) = ln_xi(l, n, k)?;
            if ln > LN_OVERFLOW {
                return Err(Error::Range {
                    op: "xi_coefficients",
                    requested: n_max,
                    max_safe: XiTable::max_safe_order(l),
                });
            }
            row_ln.push(ln);
            row_sg.push(sg);
        }
        ln_abs.push(row_ln);
        sign.push(row_sg);
    }
    Ok(XiTable { l, n_max, ln_abs, sign })
}

/// Trace functions c_n(x) = u_n(x,x) of the generalized wave polynomials and
/// their analytic derivatives, plus everything needed to evaluate K_N.
#[derive(Debug, Clone)]
pub struct WaveBasis {
    pub l: f64,
    pub n_max: usize,
    pub xi: XiTable,
    c: Vec<SampledFunction>,
    c_prime: Vec<SampledFunction>,
    pub u0: ParticularSolution,
    pub x_tilde: RecursiveIntegrals,
}

impl WaveBasis {
    /// c_n(x) = u₀(x) Σ_k Ξ_{n,k} X̃⁽²⁽ⁿ⁻ᵏ⁾⁾(x) x^{2k+l+1}, with the u₀
    /// factor folded in through v so x = 0 is exact, and the k-sum
    /// accumulated in increasing k with compensation.
    pub fn build(u0: &ParticularSolution, x_tilde: &RecursiveIntegrals, n_max: usize) -> Result<WaveBasis> {
        let xi = xi_coefficients(u0.l, n_max)?;
        Self::build_with_xi(u0, x_tilde, xi)
    }

    /// Build against a caller-supplied Ξ table (verification support).
    pub(crate) fn build_with_xi(
        u0: &ParticularSolution,
        x_tilde: &RecursiveIntegrals,
        xi: XiTable,
    ) -> Result<WaveBasis> {
        let n_max = xi.n_max;
        if x_tilde.n_max < n_max {
            return Err(Error::precondition(
                "WaveBasis::build",
                format!("recursive integrals go to order {} but n_max = {n_max}", x_tilde.n_max),
            ));
        }
        if (u0.l - x_tilde.l).abs() > 0.0 {
            return Err(Error::precondition("WaveBasis::build", "u0 and X̃ built for different l"));
        }
        let l = u0.l;
        let grid = u0.u0.grid();
        let m = grid.len();
        let vv = u0.v.values();
        let vp = u0.v_prime.values();

        // running power tables per k: x^{2k+2l+2}, x^{2k+2l+1}, x^{2k}
        let xs: Vec<f64> = grid.points().collect();
        let mut pow_a: Vec<f64> = xs.iter().map(|&x| x.powf(2.0 * l + 2.0)).collect();
        let mut pow_b: Vec<f64> = xs.iter().map(|&x| x.powf(2.0 * l + 1.0)).collect();
        let mut pow_c: Vec<f64> = vec![1.0; m];
        if l == -0.5 {
            pow_b[0] = 1.0; // x^0 at x = 0
        }

        let mut c_sum = vec![vec![0.0f64; m]; n_max + 1];
        let mut c_cmp = vec![vec![0.0f64; m]; n_max + 1];
        let mut cp_sum = vec![vec![0.0f64; m]; n_max + 1];
        let mut cp_cmp = vec![vec![0.0f64; m]; n_max + 1];

        let kahan = |sum: &mut f64, cmp: &mut f64, term: f64| {
            let y = term - *cmp;
            let t = *sum + y;
            *cmp = (t - *sum) - y;
            *sum = t;
        };

        for k in 0..=n_max {
            for n in k..=n_max {
                let xi_nk = xi.xi(n, k);
                let mdiff = n - k;
                let x_even = x_tilde.x_tilde(2 * mdiff as isize).expect("order bounded").values();
                let x_odd = if mdiff == 0 {
                    None
                } else {
                    Some(x_tilde.x_tilde(2 * mdiff as isize - 1).expect("order bounded").values())
                };
                for i in 0..m {
                    // c_n term: Ξ·X̃⁽²ᵐ⁾·v·x^{2k+2l+2}
                    let t_c = xi_nk * x_even[i] * vv[i] * pow_a[i];
                    kahan(&mut c_sum[n][i], &mut c_cmp[n][i], t_c);
                    // c_n′ term: Ξ·[((2k+2l+2)v + x v′)X̃⁽²ᵐ⁾x^{2k+2l+1} − X̃⁽²ᵐ⁻¹⁾x^{2k}/v]
                    let x = xs[i];
                    let mut t_p = ((2.0 * k as f64 + 2.0 * l + 2.0) * vv[i] + x * vp[i])
                        * x_even[i]
                        * pow_b[i];
                    if let Some(xo) = x_odd {
                        t_p -= xo[i] * pow_c[i] / vv[i];
                    }
                    kahan(&mut cp_sum[n][i], &mut cp_cmp[n][i], xi_nk * t_p);
                }
            }
            for i in 0..m {
                let x2 = xs[i] * xs[i];
                pow_a[i] *= x2;
                pow_b[i] *= x2;
                pow_c[i] *= x2;
            }
        }

        let c = c_sum
            .into_iter()
            .map(|vals| SampledFunction::new(grid, vals))
            .collect::<Result<Vec<_>>>()?;
        let c_prime = cp_sum
            .into_iter()
            .map(|vals| SampledFunction::new(grid, vals))
            .collect::<Result<Vec<_>>>()?;

        Ok(WaveBasis {
            l,
            n_max,
            xi,
            c,
            c_prime,
            u0: u0.clone(),
            x_tilde: x_tilde.clone(),
        })
    }

    pub fn grid(&self) -> UniformGrid {
        self.u0.u0.grid()
    }

    pub fn trace(&self, n: usize) -> &SampledFunction {
        &self.c[n]
    }

    pub fn traces(&self) -> &[SampledFunction] {
        &self.c
    }

    pub fn trace_derivative(&self, n: usize) -> &SampledFunction {
        &self.c_prime[n]
    }

    pub fn trace_derivatives(&self) -> &[SampledFunction] {
        &self.c_prime
    }
}

/// Kernel approximant K_N(x,t) = Σ_κ a_κ u_κ(x,t) over a wave basis.
#[derive(Debug, Clone)]
pub struct KernelApprox<'a> {
    pub basis: &'a WaveBasis,
    pub a: Vec<f64>,
    pub n: usize,
    pub epsilon: f64,
}

impl<'a> KernelApprox<'a> {
    pub fn new(basis: &'a WaveBasis, a: Vec<f64>, epsilon: f64) -> Result<Self> {
        if a.is_empty() || a.len() > basis.n_max + 1 {
            return Err(Error::precondition(
                "KernelApprox",
                format!("{} coefficients for a basis of order {}", a.len(), basis.n_max),
            ));
        }
        Ok(KernelApprox { n: a.len() - 1, basis, a, epsilon })
    }

    /// K_N(x,t) = Σ_κ a_κ u₀(x) Σ_k Ξ_{κ,k} X̃⁽²⁽κ⁻ᵏ⁾⁾(x) t^{2k+l+1}.
    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        let grid = self.basis.grid();
        let b = grid.b();
        if !(0.0..=b * (1.0 + 1e-14)).contains(&x) || !(0.0..=b * (1.0 + 1e-14)).contains(&t) {
            return Err(Error::domain("kernel_KN_eval", format!("(x,t) = ({x},{t}) outside [0,{b}]²")));
        }
        if x == 0.0 || t == 0.0 {
            return Ok(0.0); // u₀(0) = 0 and t^{l+1} with l+1 > 0
        }
        let l = self.basis.l;
        let u0x = crate::grid::evaluate_at(&self.basis.u0.u0, x)?;
        let mut total = 0.0;
        for (kappa, &a) in self.a.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for k in 0..=kappa {
                let xe = self
                    .basis
                    .x_tilde
                    .x_tilde(2 * (kappa - k) as isize)
                    .expect("order bounded");
                inner += self.basis.xi.xi(kappa, k)
                    * crate::grid::evaluate_at(xe, x)?
                    * t.powf(2.0 * k as f64 + l + 1.0);
            }
            total += a * u0x * inner;
        }
        Ok(total)
    }

    /// Diagonal K_N(x,x) = Σ_κ a_κ c_κ(x) on the grid.
    pub fn diagonal(&self) -> SampledFunction {
        let grid = self.basis.grid();
        let mut vals = vec![0.0; grid.len()];
        for (kappa, &a) in self.a.iter().enumerate() {
            let c = self.basis.trace(kappa).values();
            for i in 0..vals.len() {
                vals[i] += a * c[i];
            }
        }
        SampledFunction::new(grid, vals).expect("finite")
    }

    /// q_N(x) = 2·dK_N(x,x)/dx = 2 Σ_κ a_κ c_κ′(x) on the grid.
    pub fn q_n(&self) -> SampledFunction {
        let grid = self.basis.grid();
        let mut vals = vec![0.0; grid.len()];
        for (kappa, &a) in self.a.iter().enumerate() {
            let cp = self.basis.trace_derivative(kappa).values();
            for i in 0..vals.len() {
                vals[i] += 2.0 * a * cp[i];
            }
        }
        SampledFunction::new(grid, vals).expect("finite")
    }
}

// ---------------------------------------------------------------------------
// classical wave polynomials and unperturbed generalized wave polynomials
// (test and verification support)
// ---------------------------------------------------------------------------

fn binom(n: usize, k: usize) -> f64 {
    let mut b = 1.0f64;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

/// Classical wave polynomial p_m(x,t): p₀ = 1,
/// p_{2m−1} = Σ_{even k ≤ m} binom(m,k) x^{m−k} t^k,
/// p_{2m}   = Σ_{odd k ≤ m}  binom(m,k) x^{m−k} t^k.
pub fn wave_polynomial(m_index: usize, x: f64, t: f64) -> f64 {
    if m_index == 0 {
        return 1.0;
    }
    let (m, odd_k) = if m_index % 2 == 1 {
        ((m_index + 1) / 2, false)
    } else {
        (m_index / 2, true)
    };
    let mut acc = 0.0;
    let mut k = if odd_k { 1 } else { 0 };
    while k <= m {
        acc += binom(m, k) * x.powi((m - k) as i32) * t.powi(k as i32);
        k += 2;
    }
    acc
}

/// U₀(x,t) = C₀² (xt)^{l+1}.
pub fn u_poly_zero(l: f64, x: f64, t: f64) -> Result<f64> {
    let c0 = crate::spps::y_monomial_coefficient(l, 0)?;
    Ok(c0 * c0 * (x * t).powf(l + 1.0))
}

/// U_{4n−1}(x,t): the image of p_{4n−1} under Y_{l,x}Y_{l,t}, written as an
/// explicit double-Gamma sum over even powers.
pub fn u_poly(l: f64, n: usize, x: f64, t: f64) -> Result<f64> {
    if n == 0 {
        return u_poly_zero(l, x, t);
    }
    let ln2 = std::f64::consts::LN_2;
    let mut acc = 0.0;
    for j in 0..=n {
        let nf = n as f64;
        let jf = j as f64;
        let ln = (ln_gamma(2.0 * nf + 1.0)? - ln_gamma(2.0 * jf + 1.0)? - ln_gamma(2.0 * (nf - jf) + 1.0)?)
            + ln_gamma(nf + 0.5 - jf)?
            + ln_gamma(jf + 0.5)?
            + 2.0 * ln_gamma(l + 1.0)?
            - 2.0 * (l + 1.5) * ln2
            - 2.0 * ln_gamma(l + 1.5)?
            - ln_gamma(nf + l + 1.5 - jf)?
            - ln_gamma(l + jf + 1.5)?;
        acc += ln.exp() * x.powf(2.0 * (nf - jf) + l + 1.0) * t.powf(2.0 * jf + l + 1.0);
    }
    Ok(acc)
}

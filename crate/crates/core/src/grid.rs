//! Uniform grids on [0, b], composite 6-point Newton–Cotes cumulative
//! integration, numerical differentiation and off-grid evaluation.
//!
//! The cumulative rule works panel-by-panel over 5 subintervals; values at
//! panel-interior nodes come from integrating the degree-5 interpolant of the
//! panel, so the rule stays exact for polynomials of degree ≤ 5 at every
//! grid point, not only at panel boundaries.

use crate::error::{Error, Result};

/// Cumulative weights inside one panel: row j−1 holds the weights of the six
/// panel nodes for ∫ over [x₀, x₀+jh], in units of h. All entries are exact
/// rationals with denominator 1440; row 5 is the classical composite rule
/// (19, 75, 50, 50, 75, 19)·5/288.
const PANEL_CUM_NUM: [[i32; 6]; 5] = [
    [475, 1427, -798, 482, -173, 27],
    [448, 2064, 224, 224, -96, 16],
    [459, 1971, 1026, 1026, -189, 27],
    [448, 2048, 768, 2048, 448, 0],
    [475, 1875, 1250, 1250, 1875, 475],
];
const PANEL_DEN: f64 = 1440.0;

/// Coefficients of the degree-5 Lagrange basis ℓ_i(s) on nodes s = 0..5,
/// ascending powers, times 120.
const LAGRANGE_NUM: [[i32; 6]; 6] = [
    [120, -274, 225, -85, 15, -1],
    [0, 600, -770, 355, -70, 5],
    [0, -600, 1070, -590, 130, -10],
    [0, 400, -780, 490, -120, 10],
    [0, -150, 305, -205, 55, -5],
    [0, 24, -50, 35, -10, 1],
];
const LAGRANGE_DEN: f64 = 120.0;

/// Uniform grid of `m` points covering [0, b] inclusive; (m−1) must be a
/// multiple of 5 so the interval splits into whole panels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    b: f64,
    m: usize,
    h: f64,
}

impl UniformGrid {
    pub fn new(b: f64, m: usize) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::domain("UniformGrid", format!("b = {b} must be finite and > 0")));
        }
        if m < 11 {
            return Err(Error::domain("UniformGrid", format!("m = {m} must be ≥ 11")));
        }
        if (m - 1) % 5 != 0 {
            return Err(Error::domain(
                "UniformGrid",
                format!("m − 1 = {} must be divisible by 5", m - 1),
            ));
        }
        Ok(UniformGrid { b, m, h: b / (m - 1) as f64 })
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        if i == self.m - 1 {
            self.b
        } else {
            i as f64 * self.h
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.m).map(move |i| self.x(i))
    }

    fn panels(&self) -> usize {
        (self.m - 1) / 5
    }
}

/// Real samples of a function on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: UniformGrid,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::domain(
                "SampledFunction",
                format!("{} values for a grid of {} points", values.len(), grid.len()),
            ));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain("SampledFunction", format!("non-finite sample {bad}")));
        }
        Ok(SampledFunction { grid, values })
    }

    pub fn from_fn(grid: UniformGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: UniformGrid) -> Self {
        SampledFunction { grid, values: vec![0.0; grid.len()] }
    }

    #[inline]
    pub fn grid(&self) -> UniformGrid {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn same_grid(&self, other: &SampledFunction) -> bool {
        self.grid == other.grid
    }
}

/// Cumulative integral F(x_i) ≈ ∫₀^{x_i} f, exact for polynomials of degree
/// ≤ 5 everywhere; F(0) = 0.
pub fn cumulative_integral(f: &SampledFunction) -> SampledFunction {
    let grid = f.grid();
    let v = f.values();
    let mut out = vec![0.0; v.len()];
    let h = grid.h();
    let mut base = 0.0;
    for p in 0..grid.panels() {
        let i0 = 5 * p;
        let seg = &v[i0..i0 + 6];
        for j in 1..=5 {
            let row = &PANEL_CUM_NUM[j - 1];
            let mut acc = 0.0;
            for i in 0..6 {
                acc += row[i] as f64 * seg[i];
            }
            out[i0 + j] = base + h * acc / PANEL_DEN;
        }
        base = out[i0 + 5];
    }
    SampledFunction { grid, values: out }
}

/// Full-interval integral ∫₀^b f with the composite rule (no cumulative array).
pub fn integral(f: &SampledFunction) -> f64 {
    let grid = f.grid();
    let v = f.values();
    let h = grid.h();
    let row = &PANEL_CUM_NUM[4];
    let mut acc = 0.0;
    for p in 0..grid.panels() {
        let i0 = 5 * p;
        let mut s = 0.0;
        for i in 0..6 {
            s += row[i] as f64 * v[i0 + i];
        }
        acc += s;
    }
    h * acc / PANEL_DEN
}

/// Leading panels that integrate t^β against the interpolant with exact
/// power moments. The plain rule's relative error on panel p scales like
/// (β/5p)⁶, so the weighted region grows with β.
fn power_panels(beta: f64) -> usize {
    32usize.max((8.0 * beta).ceil() as usize)
}

/// Cumulative integral of t^β·s(t) where `s` holds samples of the smooth
/// factor (s[0] must carry its limit at 0). Near the origin t^β has
/// unbounded derivatives for fractional β, so the first panels integrate
/// t^β times the degree-5 interpolant of s with exact moments; later panels
/// use the ordinary rule on the assembled integrand.
pub fn cumulative_integral_power(beta: f64, s: &SampledFunction) -> Result<SampledFunction> {
    if beta <= -1.0 {
        return Err(Error::domain("cumulative_integral_power", format!("β = {beta} must be > −1")));
    }
    let grid = s.grid();
    let sv = s.values();
    let h = grid.h();
    let mut out = vec![0.0; sv.len()];
    let hb = h.powf(beta + 1.0);
    let weighted_panels = power_panels(beta).min(grid.panels());

    // panel 0: ∫₀^{jh} t^β ℓ_i(t/h) dt = h^{β+1} Σ_m A[i][m] j^{β+m+1}/(β+m+1)
    for j in 1..=5usize {
        let jf = j as f64;
        let mut acc = 0.0;
        for i in 0..6 {
            let mut w = 0.0;
            for m in 0..6 {
                w += LAGRANGE_NUM[i][m] as f64 / LAGRANGE_DEN * jf.powf(beta + m as f64 + 1.0)
                    / (beta + m as f64 + 1.0);
            }
            acc += w * sv[i];
        }
        out[j] = hb * acc;
    }

    // panels 1..P0: expand σ^β about the panel midpoint c = 5p + 5/2,
    // σ^β = c^β Σ_r binom(β,r)(w/c)^r with w = σ − c ∈ [−5/2, 5/2], and
    // integrate against the interpolant re-expanded in powers of w.
    let mut base = out[5];
    for p in 1..weighted_panels {
        let i0 = 5 * p;
        // interpolant coefficients in local u = σ − 5p
        let mut a = [0.0f64; 6];
        for m in 0..6 {
            for i in 0..6 {
                a[m] += LAGRANGE_NUM[i][m] as f64 / LAGRANGE_DEN * sv[i0 + i];
            }
        }
        // shift u = w + 5/2: ã_r = Σ_{m≥r} a_m binom(m,r) (5/2)^{m−r}
        let mut at = [0.0f64; 6];
        for r in 0..6 {
            let mut binom = 1.0f64;
            let mut pw = 1.0f64;
            for m in r..6 {
                at[r] += a[m] * binom * pw;
                binom = binom * (m + 1) as f64 / (m + 1 - r) as f64;
                pw *= 2.5;
            }
        }
        let c = 5.0 * p as f64 + 2.5;
        // h^{β+1}·c^β can overflow separately for large β; fold into (hc)^β
        let scale = h * (h * c).powf(beta);
        // moments g_e(j) = ∫_{−5/2}^{j−5/2} w^e dw accumulated over e
        let mut lo_pow = -2.5f64; // (−5/2)^{e+1}
        let mut hi_pow = [0.0f64; 5]; // (j−5/2)^{e+1}
        for j in 1..=5 {
            hi_pow[j - 1] = j as f64 - 2.5;
        }
        let mut vals = [0.0f64; 5];
        let max_e = 6 + 60;
        let mut bin = 1.0f64; // binom(β, r)
        let mut cr = 1.0f64; // c^{−r}
        // coeff[e] = Σ_{r+m=e} binom(β,r) c^{−r} ã_m
        let mut coeff = vec![0.0f64; max_e + 1];
        for r in 0..=60usize {
            for m in 0..6 {
                coeff[r + m] += bin * cr * at[m];
            }
            bin *= (beta - r as f64) / (r as f64 + 1.0);
            cr /= c;
            if bin.abs() * cr * 2.5f64.powi(r as i32 + 1) < 1e-20 {
                break;
            }
        }
        for e in 0..=max_e {
            if coeff[e] != 0.0 {
                for j in 0..5 {
                    vals[j] += coeff[e] * (hi_pow[j] - lo_pow) / (e as f64 + 1.0);
                }
            }
            lo_pow *= -2.5;
            for j in 0..5 {
                hi_pow[j] *= j as f64 + 1.0 - 2.5;
            }
        }
        for j in 0..5 {
            out[i0 + j + 1] = base + scale * vals[j];
        }
        base = out[i0 + 5];
    }

    // remaining panels on f_i = x_i^β s_i
    for p in weighted_panels..grid.panels() {
        let i0 = 5 * p;
        let mut f6 = [0.0; 6];
        for i in 0..6 {
            f6[i] = grid.x(i0 + i).powf(beta) * sv[i0 + i];
        }
        for j in 1..=5 {
            let row = &PANEL_CUM_NUM[j - 1];
            let mut acc = 0.0;
            for i in 0..6 {
                acc += row[i] as f64 * f6[i];
            }
            out[i0 + j] = base + h * acc / PANEL_DEN;
        }
        base = out[i0 + 5];
    }
    Ok(SampledFunction { grid, values: out })
}

/// 5-point finite-difference derivative: central stencils in the interior,
/// one-sided at the edges; O(h⁴).
pub fn differentiate(f: &SampledFunction) -> SampledFunction {
    let grid = f.grid();
    let v = f.values();
    let n = v.len();
    let inv12h = 1.0 / (12.0 * grid.h());
    let mut out = vec![0.0; n];
    out[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) * inv12h;
    out[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) * inv12h;
    for i in 2..n - 2 {
        out[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) * inv12h;
    }
    out[n - 2] = (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] - v[n - 5]) * inv12h;
    out[n - 1] = (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4] + 3.0 * v[n - 5]) * inv12h;
    SampledFunction { grid, values: out }
}

/// Local cubic interpolation through the four grid points nearest to x;
/// exact at the nodes.
pub fn evaluate_at(f: &SampledFunction, x: f64) -> Result<f64> {
    let grid = f.grid();
    let b = grid.b();
    if !(x >= 0.0 && x <= b * (1.0 + 1e-14) + f64::MIN_POSITIVE) {
        return Err(Error::domain("evaluate_at", format!("x = {x} outside [0, {b}]")));
    }
    let x = x.min(b);
    let v = f.values();
    let h = grid.h();
    let pos = x / h;
    let near = pos.round() as usize;
    let near = near.min(grid.len() - 1);
    if (pos - near as f64).abs() < 1e-9 {
        return Ok(v[near]);
    }
    // window [j, j+3] with x between the middle pair where possible
    let j = (pos.floor() as usize).saturating_sub(1).min(grid.len() - 4);
    let t = pos - j as f64; // in [0, 3] nominally
    let l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    let l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    let l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    let l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    Ok(l0 * v[j] + l1 * v[j + 1] + l2 * v[j + 2] + l3 * v[j + 3])
}

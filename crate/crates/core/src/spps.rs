//! Transmutation primitives: the integral operator Y_{l,x}, the particular
//! solution u₀ of the λ = 0 equation, and the recursive integrals X̃⁽ⁿ⁾ that
//! drive the spectral parameter power series construction.

use crate::error::{Error, Result};
use crate::grid::{cumulative_integral, cumulative_integral_power, evaluate_at, SampledFunction};
use crate::specfun::{gamma, ln_gamma};

/// Particular solution u₀ = x^{l+1}·v of −u″ + (l(l+1)/x² + q)u = 0 with
/// u₀ ~ x^{l+1} at 0. The regular factor v and its derivative are kept
/// because every near-zero evaluation downstream needs them to avoid 0/0.
#[derive(Debug, Clone)]
pub struct ParticularSolution {
    pub l: f64,
    pub u0: SampledFunction,
    /// u₀′ samples; for l < 0 the derivative diverges at x = 0 and the first
    /// entry is a placeholder zero (consumers use the v-factor form there).
    pub u0_prime: SampledFunction,
    pub v: SampledFunction,
    pub v_prime: SampledFunction,
    pub iterations_used: usize,
    /// sup-norm of successive Picard corrections, one entry per iteration.
    pub sup_steps: Vec<f64>,
    /// smallest pointwise Picard correction seen (≥ 0 for q ≥ 0).
    pub min_step: f64,
}

/// Recursive integrals X̃⁽⁰⁾ … X̃⁽²ⁿᵐᵃˣ⁾ built from u₀.
#[derive(Debug, Clone)]
pub struct RecursiveIntegrals {
    pub l: f64,
    pub n_max: usize,
    x: Vec<SampledFunction>,
}

impl RecursiveIntegrals {
    /// X̃⁽ⁿ⁾ for n ≥ 0; n = −1 is identically zero by convention.
    pub fn x_tilde(&self, n: isize) -> Option<&SampledFunction> {
        if n < 0 {
            None
        } else {
            self.x.get(n as usize)
        }
    }

    pub fn order(&self) -> usize {
        self.x.len() - 1
    }
}

/// C_k = Γ((k+1)/2)Γ(l+1) / (2^{l+3/2} Γ(l+3/2) Γ(l+(k+3)/2)); the monomial
/// image Y_{l,x}[x^k] equals C_k x^{k+l+1}.
pub fn y_monomial_coefficient(l: f64, k: usize) -> Result<f64> {
    if l < -0.5 {
        return Err(Error::domain("y_monomial_coefficient", format!("l = {l} must be ≥ −1/2")));
    }
    let kf = k as f64;
    let ln = ln_gamma((kf + 1.0) / 2.0)? + ln_gamma(l + 1.0)?
        - (l + 1.5) * std::f64::consts::LN_2
        - ln_gamma(l + 1.5)?
        - ln_gamma(l + (kf + 3.0) / 2.0)?;
    Ok(ln.exp())
}

// quadrature resolution for the z-integral of y_apply (panels per region)
const Y_MAIN_PANELS: usize = 200;
const Y_TAIL_PANELS: usize = 100;
const Y_SPLIT: f64 = 0.75;

/// Composite 6-point weights for one panel in units of the step.
const PANEL_END_ROW: [f64; 6] = [
    95.0 / 288.0,
    125.0 / 96.0,
    125.0 / 144.0,
    125.0 / 144.0,
    125.0 / 96.0,
    95.0 / 288.0,
];

/// (Y_{l,x} f)(x) = x^{l+1}/(2^{l+1/2} Γ(l+3/2)) ∫₀¹ (1−z²)^l f(xz) dz on
/// every grid point. The tail z ∈ [3/4, 1] integrates in the variable
/// z = 1 − w², which removes the kernel singularity at z = 1 for l < 0.
pub fn y_apply(l: f64, f: &SampledFunction) -> Result<SampledFunction> {
    if l < -0.5 {
        return Err(Error::domain("y_apply", format!("l = {l} must be ≥ −1/2")));
    }
    let grid = f.grid();
    let norm = 2.0f64.powf(l + 0.5) * gamma(l + 1.5)?;

    // fixed quadrature nodes/weights in z and w
    let hz = Y_SPLIT / (5 * Y_MAIN_PANELS) as f64;
    let wmax = (1.0 - Y_SPLIT as f64).sqrt();
    let hw = wmax / (5 * Y_TAIL_PANELS) as f64;
    let n_z = 5 * Y_MAIN_PANELS + 1;
    let n_w = 5 * Y_TAIL_PANELS + 1;
    let mut z_nodes = Vec::with_capacity(n_z);
    let mut z_weights = vec![0.0f64; n_z];
    for i in 0..n_z {
        z_nodes.push(i as f64 * hz);
    }
    for p in 0..Y_MAIN_PANELS {
        for i in 0..6 {
            z_weights[5 * p + i] += PANEL_END_ROW[i] * hz;
        }
    }
    let mut w_nodes = Vec::with_capacity(n_w);
    let mut w_weights = vec![0.0f64; n_w];
    for i in 0..n_w {
        w_nodes.push(i as f64 * hw);
    }
    for p in 0..Y_TAIL_PANELS {
        for i in 0..6 {
            w_weights[5 * p + i] += PANEL_END_ROW[i] * hw;
        }
    }

    // kernel factors independent of x
    let kern_z: Vec<f64> = z_nodes.iter().map(|&z| (1.0 - z * z).powf(l)).collect();
    // z = 1 − w²: (1−z²)^l dz → 2 w^{2l+1} (2−w²)^l dw
    let kern_w: Vec<f64> = w_nodes
        .iter()
        .map(|&w| if w == 0.0 && 2.0 * l + 1.0 > 0.0 { 0.0 } else { 2.0 * w.powf(2.0 * l + 1.0) * (2.0 - w * w).powf(l) })
        .collect();

    let mut out = vec![0.0; grid.len()];
    for (ix, x) in grid.points().enumerate() {
        if x == 0.0 {
            continue;
        }
        let mut acc = 0.0;
        for i in 0..n_z {
            acc += z_weights[i] * kern_z[i] * evaluate_at(f, x * z_nodes[i])?;
        }
        for i in 0..n_w {
            let z = 1.0 - w_nodes[i] * w_nodes[i];
            acc += w_weights[i] * kern_w[i] * evaluate_at(f, x * z)?;
        }
        out[ix] = x.powf(l + 1.0) * acc / norm;
    }
    SampledFunction::new(grid, out)
}

const PICARD_MAX_ITER: usize = 100;

/// Build u₀ = x^{l+1} v by Picard iteration on
/// v(x) = 1 + ∫₀ˣ s^{−2(l+1)} ∫₀ˢ t^{2(l+1)} q(t) v(t) dt ds.
pub fn build_u0(l: f64, q: &SampledFunction, tol: f64) -> Result<ParticularSolution> {
    if l < -0.5 {
        return Err(Error::domain("build_u0", format!("l = {l} must be ≥ −1/2")));
    }
    let grid = q.grid();
    let beta = 2.0 * (l + 1.0);
    let qv = q.values();

    let mut v = vec![1.0f64; grid.len()];
    let mut sup_steps = Vec::new();
    let mut min_step = f64::INFINITY;
    let mut v_prime = vec![0.0f64; grid.len()];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < PICARD_MAX_ITER {
        iterations += 1;
        // inner(s) = ∫₀ˢ t^{2(l+1)} q v dt, with the smooth factor q·v
        let s_fun = SampledFunction::new(grid, qv.iter().zip(&v).map(|(a, b)| a * b).collect())?;
        let inner = cumulative_integral_power(beta, &s_fun)?;
        // w(s) = inner(s)/s^{2(l+1)}, analytic limit 0 at s = 0
        let mut w = vec![0.0f64; grid.len()];
        for i in 1..grid.len() {
            w[i] = inner.values()[i] / grid.x(i).powf(beta);
        }
        let w_fun = SampledFunction::new(grid, w)?;
        let outer = cumulative_integral(&w_fun);

        let mut sup = 0.0f64;
        let mut min_delta = f64::INFINITY;
        let mut v_new = vec![0.0f64; grid.len()];
        for i in 0..grid.len() {
            v_new[i] = 1.0 + outer.values()[i];
            let delta = v_new[i] - v[i];
            sup = sup.max(delta.abs());
            min_delta = min_delta.min(delta);
        }
        sup_steps.push(sup);
        min_step = min_step.min(min_delta);
        let scale = v.iter().fold(1.0f64, |a, x| a.max(x.abs()));
        v = v_new;
        v_prime = w_fun.into_values();
        if sup <= tol * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            op: "build_u0",
            iterations,
            residual: sup_steps.last().copied().unwrap_or(f64::NAN),
        });
    }

    // zero of u₀ on (0,b] means a sign change of v
    for i in 1..grid.len() {
        if v[i] <= 0.0 {
            return Err(Error::UnsupportedPotential { x: grid.x(i) });
        }
    }

    let mut u0 = vec![0.0f64; grid.len()];
    let mut u0p = vec![0.0f64; grid.len()];
    for i in 0..grid.len() {
        let x = grid.x(i);
        if i == 0 {
            u0[i] = 0.0;
            // limit of (l+1)x^l v: 0 for l > 0, v(0) for l = 0, divergent for l < 0
            u0p[i] = if l > 0.0 {
                0.0
            } else if l == 0.0 {
                v[0]
            } else {
                0.0 // placeholder, see struct docs
            };
        } else {
            u0[i] = x.powf(l + 1.0) * v[i];
            u0p[i] = (l + 1.0) * x.powf(l) * v[i] + x.powf(l + 1.0) * v_prime[i];
        }
    }

    Ok(ParticularSolution {
        l,
        u0: SampledFunction::new(grid, u0)?,
        u0_prime: SampledFunction::new(grid, u0p)?,
        v: SampledFunction::new(grid, v)?,
        v_prime: SampledFunction::new(grid, v_prime)?,
        iterations_used: iterations,
        sup_steps,
        min_step,
    })
}

/// X̃⁽⁰⁾ ≡ 1; odd orders integrate u₀²·X̃⁽ⁿ⁻¹⁾, even orders integrate
/// −X̃⁽ⁿ⁻¹⁾/u₀². Every integrand vanishes at 0 like a known power of t
/// (X̃⁽²ᵐ⁾ ~ t²ᵐ, X̃⁽²ᵐ⁻¹⁾ ~ t^{2m+2l+1}), and that power is divided out
/// before quadrature so the interpolated factor stays smooth and
/// nonvanishing; the v-factor form removes the 0/0 at the origin.
pub fn recursive_integrals(u0: &ParticularSolution, n_max: usize) -> Result<RecursiveIntegrals> {
    let grid = u0.u0.grid();
    let l = u0.l;
    let vv = u0.v.values();

    let mut x_seq: Vec<SampledFunction> =
        vec![SampledFunction::new(grid, vec![1.0; grid.len()])?];

    for n in 1..=(2 * n_max) {
        let prev = x_seq[n - 1].values();
        let m = n / 2;
        let next = if n % 2 == 1 {
            // ∫₀ˣ u₀² X̃⁽²ᵐ⁾ = ∫₀ˣ t^{2l+2+2m} · (v² X̃⁽²ᵐ⁾/t²ᵐ)
            let beta = 2.0 * (l + 1.0) + 2.0 * m as f64;
            let mut s = vec![0.0f64; grid.len()];
            for i in 1..grid.len() {
                let x = grid.x(i);
                s[i] = vv[i] * vv[i] * prev[i] / x.powi(2 * m as i32);
            }
            s[0] = if m == 0 {
                vv[0] * vv[0]
            } else {
                4.0 * s[1] - 6.0 * s[2] + 4.0 * s[3] - s[4]
            };
            let s_fun = SampledFunction::new(grid, s)?;
            cumulative_integral_power(beta, &s_fun)?
        } else {
            // −∫₀ˣ X̃⁽²ᵐ⁻¹⁾/u₀² = −∫₀ˣ t^{2m−1} · (X̃⁽²ᵐ⁻¹⁾/(t^{2m+2l+1} v²))
            let beta = 2.0 * m as f64 - 1.0;
            let mut s = vec![0.0f64; grid.len()];
            for i in 1..grid.len() {
                let x = grid.x(i);
                s[i] = prev[i] / (x.powf(2.0 * m as f64 + 2.0 * l + 1.0) * vv[i] * vv[i]);
            }
            s[0] = if m == 1 {
                1.0 / (2.0 * l + 3.0)
            } else {
                4.0 * s[1] - 6.0 * s[2] + 4.0 * s[3] - s[4]
            };
            let s_fun = SampledFunction::new(grid, s)?;
            let mut res = cumulative_integral_power(beta, &s_fun)?;
            for val in res.values_mut() {
                *val = -*val;
            }
            res
        };
        x_seq.push(next);
    }

    Ok(RecursiveIntegrals { l, n_max, x: x_seq })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::UniformGrid;
    use crate::specfun::{bessel_j_unchecked, pochhammer};
    use std::f64::consts::PI;

    fn grid(b: f64, m: usize) -> UniformGrid {
        UniformGrid::new(b, m).unwrap()
    }

    #[test]
    fn monomial_coefficient_closed_values() {
        // C₀(l = −1/2) = π/2
        let c = y_monomial_coefficient(-0.5, 0).unwrap();
        assert!((c - PI / 2.0).abs() < 1e-14);
        // C₁(l = 0) = Γ(1)Γ(1)/(2^{3/2} Γ(3/2) Γ(2)) = 1/√(2π)
        let c = y_monomial_coefficient(0.0, 1).unwrap();
        assert!((c - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        // C₄(l = 1) = Γ(5/2)Γ(2)/(2^{5/2} Γ(5/2) Γ(9/2)) = 16/(105·2^{5/2}·√π)
        let c = y_monomial_coefficient(1.0, 4).unwrap();
        let exact = 16.0 / (105.0 * 2.0f64.powf(2.5) * PI.sqrt());
        assert!((c - exact).abs() < 1e-15 * exact);
    }

    #[test]
    fn y_apply_constant_at_l_minus_half() {
        let g = grid(2.0, 201);
        let one = SampledFunction::from_fn(g, |_| 1.0).unwrap();
        let img = y_apply(-0.5, &one).unwrap();
        for (i, x) in g.points().enumerate().skip(1) {
            let expect = PI / 2.0 * x.sqrt();
            assert!(
                ((img.values()[i] - expect) / expect).abs() < 1e-10,
                "x={x}: {} vs {}",
                img.values()[i],
                expect
            );
        }
    }

    #[test]
    fn y_apply_monomials_match_coefficients() {
        let g = grid(2.0, 2001);
        for &l in &[-0.5, 0.0, 0.5, 1.0, 2.3] {
            for k in 0..=10usize {
                let f = SampledFunction::from_fn(g, |t| t.powi(k as i32)).unwrap();
                let img = y_apply(l, &f).unwrap();
                let ck = y_monomial_coefficient(l, k).unwrap();
                for i in [500usize, 770, 1400, 2000] {
                    let x = g.x(i);
                    let expect = ck * x.powf(k as f64 + l + 1.0);
                    let rel = ((img.values()[i] - expect) / expect).abs();
                    assert!(rel < 1e-8, "l={l} k={k} x={x}: rel {rel:.2e}");
                }
            }
        }
    }

    #[test]
    fn y_apply_cosine_is_bessel_image() {
        // Y[cos(√λ x)] = √π Γ(l+1)/(2 Γ(l+3/2)) √x λ^{−(2l+1)/4} J_{l+1/2}(√λ x)
        let g = grid(2.0, 501);
        let l = 0.5;
        let lambda = 1.0f64;
        let f = SampledFunction::from_fn(g, |t| (lambda.sqrt() * t).cos()).unwrap();
        let img = y_apply(l, &f).unwrap();
        let pref = PI.sqrt() * gamma(l + 1.0).unwrap() / (2.0 * gamma(l + 1.5).unwrap());
        for i in [50usize, 180, 333, 499] {
            let x = g.x(i);
            let expect = pref
                * x.sqrt()
                * lambda.powf(-(2.0 * l + 1.0) / 4.0)
                * bessel_j_unchecked(l + 0.5, lambda.sqrt() * x);
            let rel = ((img.values()[i] - expect) / expect).abs();
            assert!(rel < 1e-9, "x={x}: rel {rel:.2e}");
        }
    }

    #[test]
    fn y_apply_rejects_small_l() {
        let g = grid(1.0, 21);
        let f = SampledFunction::from_fn(g, |_| 1.0).unwrap();
        assert!(y_apply(-0.6, &f).is_err());
    }

    #[test]
    fn u0_for_zero_potential_is_power() {
        let g = grid(PI, 501);
        let q = SampledFunction::zeros(g);
        for &l in &[-0.5, 0.0, 1.0, 2.3] {
            let sol = build_u0(l, &q, 1e-14).unwrap();
            assert!(sol.iterations_used <= 2);
            for (i, x) in g.points().enumerate().skip(1) {
                assert!((sol.u0.values()[i] - x.powf(l + 1.0)).abs() < 1e-13 * x.powf(l + 1.0));
                assert!(
                    (sol.u0_prime.values()[i] - (l + 1.0) * x.powf(l)).abs()
                        < 1e-12 * (l + 1.0) * x.powf(l).max(1e-12)
                );
            }
        }
    }

    /// u₀ for q ≡ 1, l = −1/2 is √x·I₀(x); independent ascending-series oracle.
    fn bessel_i0(x: f64) -> f64 {
        let w = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for m in 1..200 {
            term *= w / ((m * m) as f64);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        sum
    }

    #[test]
    fn u0_constant_potential_is_modified_bessel() {
        let g = grid(1.0, 2001);
        let q = SampledFunction::from_fn(g, |_| 1.0).unwrap();
        let sol = build_u0(-0.5, &q, 1e-14).unwrap();
        let got = sol.u0.values()[g.len() - 1];
        let oracle = bessel_i0(1.0);
        assert!((oracle - 1.266_065_877_752_008_4).abs() < 1e-14);
        assert!((got - oracle).abs() < 1e-10, "u0(1) = {got}, I0(1) = {oracle}");
    }

    #[test]
    fn u0_quadratic_potential_satisfies_equation() {
        let g = grid(PI, 2001);
        let q = SampledFunction::from_fn(g, |t| t * t).unwrap();
        let l = -0.5;
        let sol = build_u0(l, &q, 1e-14).unwrap();
        let u = sol.u0.values();
        let h = g.h();
        let maxu = sol.u0.sup_norm();
        let mut worst = 0.0f64;
        for i in 2..g.len() - 2 {
            let x = g.x(i);
            if x < 0.05 {
                continue;
            }
            let upp = (-u[i - 2] + 16.0 * u[i - 1] - 30.0 * u[i] + 16.0 * u[i + 1] - u[i + 2])
                / (12.0 * h * h);
            let resid = -upp + (l * (l + 1.0) / (x * x) + x * x) * u[i];
            worst = worst.max(resid.abs());
        }
        assert!(worst <= 1e-6 * maxu, "residual {worst:.2e} vs {maxu:.2e}");
    }

    #[test]
    fn picard_iterates_monotone_and_geometric() {
        let g = grid(PI, 1001);
        let q = SampledFunction::from_fn(g, |t| t * t).unwrap();
        let sol = build_u0(0.5, &q, 1e-14).unwrap();
        assert!(sol.min_step >= -1e-15, "iterates not monotone: {}", sol.min_step);
        // successive sup-steps eventually contract at least geometrically
        let steps = &sol.sup_steps;
        for w in steps.windows(2).skip(2) {
            if w[0] > 1e-13 {
                assert!(w[1] / w[0] < 0.9, "slow contraction: {} -> {}", w[0], w[1]);
            }
        }
        // u₀ strictly increasing for q ≥ 0
        let u = sol.u0.values();
        for i in 1..u.len() {
            assert!(u[i] > u[i - 1]);
        }
    }

    #[test]
    fn recursive_integrals_zero_potential_closed_forms() {
        let g = grid(PI, 1001);
        let q = SampledFunction::zeros(g);
        for &l in &[-0.5, 0.5, 1.0, 2.3] {
            let sol = build_u0(l, &q, 1e-14).unwrap();
            let xt = recursive_integrals(&sol, 2).unwrap();
            let x1 = xt.x_tilde(1).unwrap().values();
            let x2 = xt.x_tilde(2).unwrap().values();
            assert!(xt.x_tilde(-1).is_none());
            assert_eq!(xt.x_tilde(0).unwrap().values()[300], 1.0);
            for (i, x) in g.points().enumerate().skip(1) {
                let e1 = x.powf(2.0 * l + 3.0) / (2.0 * l + 3.0);
                let e2 = -x * x / (2.0 * (2.0 * l + 3.0));
                assert!(((x1[i] - e1) / e1).abs() < 1e-11, "l={l} x={x} X1");
                assert!(((x2[i] - e2) / e2).abs() < 1e-10, "l={l} x={x} X2: {} vs {}", x2[i], e2);
            }
        }
    }

    #[test]
    fn mapping_property_zero_potential() {
        // (−1)^k 2^{2k} k! (l+3/2)_k u₀ X̃⁽²ᵏ⁾ = x^{2k+l+1}
        let g = grid(PI, 2001);
        let q = SampledFunction::zeros(g);
        for &l in &[-0.5, 0.0, 0.5, 1.0, 2.3] {
            let sol = build_u0(l, &q, 1e-14).unwrap();
            let xt = recursive_integrals(&sol, 5).unwrap();
            for k in 0..=5usize {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let fact: f64 = (1..=k).map(|i| i as f64).product();
                let coef = sign * 4.0f64.powi(k as i32) * fact * pochhammer(l + 1.5, k);
                let xk = xt.x_tilde(2 * k as isize).unwrap().values();
                for (i, x) in g.points().enumerate() {
                    if x <= 0.01 * PI {
                        continue;
                    }
                    let lhs = coef * sol.u0.values()[i] * xk[i];
                    let rhs = x.powf(2.0 * k as f64 + l + 1.0);
                    let rel = ((lhs - rhs) / rhs).abs();
                    assert!(rel < 1e-10, "l={l} k={k} x={x}: rel {rel:.2e}");
                }
            }
        }
    }

    #[test]
    fn x_tilde_signs_alternate_near_zero() {
        let g = grid(1.0, 501);
        let q = SampledFunction::from_fn(g, |t| t * t + 0.3).unwrap();
        let sol = build_u0(0.5, &q, 1e-14).unwrap();
        let xt = recursive_integrals(&sol, 3).unwrap();
        for m in 0..=3usize {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let val = xt.x_tilde(2 * m as isize).unwrap().values()[40];
            assert!(sign * val > 0.0, "X̃^(2·{m}) wrong sign near 0: {val:.3e}");
            if m >= 1 {
                let odd = xt.x_tilde(2 * m as isize - 1).unwrap().values()[40];
                let osign = if (m - 1) % 2 == 0 { 1.0 } else { -1.0 };
                assert!(osign * odd > 0.0, "X̃^(odd {}) wrong sign: {odd:.3e}", 2 * m - 1);
            }
        }
    }

    #[test]
    fn unsupported_potential_detected() {
        // strongly negative q forces u₀ through zero on (0, b]
        let g = grid(PI, 501);
        let q = SampledFunction::from_fn(g, |_| -4.0).unwrap();
        match build_u0(-0.5, &q, 1e-12) {
            Err(Error::UnsupportedPotential { .. }) => {}
            other => panic!("expected UnsupportedPotential, got {other:?}"),
        }
    }
}

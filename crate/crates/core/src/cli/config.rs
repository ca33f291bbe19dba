//! Problem configuration: strict JSON schema, validation, and realization of
//! the potential on the solver grid.

use serde::{Deserialize, Serialize};

use crate::approx::ApproxMode;
use crate::cli::potential::parse_potential;
use crate::error::{Error, Result};
use crate::grid::{SampledFunction, UniformGrid};
use crate::solver::SolverOptions;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub l: f64,
    pub b: f64,
    pub potential: PotentialSpec,
    pub boundary: Boundary,
    pub lambda_range: LambdaRange,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_eps_target")]
    pub eps_target: f64,
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default = "default_n_max", rename = "N_max")]
    pub n_max: usize,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Boundary {
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaRange {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalues_csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_json: Option<String>,
}

/// One of: an expression in x, polynomial coefficients (ascending), or a CSV
/// of (x, q(x)) samples on the exact solver grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialSpec {
    Expression(String),
    Polynomial(Vec<f64>),
    Samples(String),
}

fn default_grid_points() -> usize {
    20001
}
fn default_eps_target() -> f64 {
    1e-9
}
fn default_mode() -> String {
    "Q".into()
}
fn default_n_max() -> usize {
    30
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ProblemConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {path}: {e}")))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.l.is_finite() || self.l < -0.5 {
            return Err(Error::Config(format!("l = {} must be finite and ≥ -1/2", self.l)));
        }
        if !(self.b > 0.0) || !self.b.is_finite() {
            return Err(Error::Config(format!("b = {} must be finite and > 0", self.b)));
        }
        if self.grid_points < 11 || (self.grid_points - 1) % 5 != 0 {
            return Err(Error::Config(format!(
                "grid_points = {} must be ≥ 11 with grid_points ≡ 1 (mod 5)",
                self.grid_points
            )));
        }
        if !(self.eps_target > 0.0) {
            return Err(Error::Config("eps_target must be > 0".into()));
        }
        if self.mode != "Q" && self.mode != "q" {
            return Err(Error::Config(format!("mode '{}' must be \"Q\" or \"q\"", self.mode)));
        }
        if self.boundary.beta.abs() + self.boundary.gamma.abs() == 0.0 {
            return Err(Error::Config("boundary needs |beta| + |gamma| != 0".into()));
        }
        if !(self.lambda_range.lo.is_finite()
            && self.lambda_range.hi.is_finite()
            && self.lambda_range.lo < self.lambda_range.hi)
        {
            return Err(Error::Config("lambda_range must satisfy lo < hi, both finite".into()));
        }
        if let PotentialSpec::Expression(text) = &self.potential {
            parse_potential(text)?;
        }
        Ok(())
    }

    pub fn approx_mode(&self) -> ApproxMode {
        if self.mode == "Q" {
            ApproxMode::Integral
        } else {
            ApproxMode::Pointwise
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            grid_points: self.grid_points,
            eps_target: self.eps_target,
            mode: self.approx_mode(),
            n_max: self.n_max,
        }
    }

    /// Materialize the potential on the solver grid.
    pub fn build_potential(&self) -> Result<SampledFunction> {
        let grid = UniformGrid::new(self.b, self.grid_points)?;
        match &self.potential {
            PotentialSpec::Expression(text) => {
                let expr = parse_potential(text)?;
                let mut vals = Vec::with_capacity(grid.len());
                for x in grid.points() {
                    vals.push(expr.eval(x)?);
                }
                SampledFunction::new(grid, vals)
            }
            PotentialSpec::Polynomial(coeffs) => {
                let vals = grid
                    .points()
                    .map(|x| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c))
                    .collect();
                SampledFunction::new(grid, vals)
            }
            PotentialSpec::Samples(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read samples {path}: {e}")))?;
                let mut vals = Vec::with_capacity(grid.len());
                for (row, line) in text.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || (row == 0 && line.starts_with('x')) {
                        continue;
                    }
                    let mut parts = line.split(',');
                    let x: f64 = parts
                        .next()
                        .and_then(|s| s.trim().parse().ok())
                        .ok_or_else(|| Error::Config(format!("{path}:{}: bad x value", row + 1)))?;
                    let q: f64 = parts
                        .next()
                        .and_then(|s| s.trim().parse().ok())
                        .ok_or_else(|| Error::Config(format!("{path}:{}: bad q value", row + 1)))?;
                    let i = vals.len();
                    if i >= grid.len() || (x - grid.x(i)).abs() > 1e-12 * self.b.max(1.0) {
                        return Err(Error::Config(format!(
                            "{path}:{}: sample abscissa {x} does not match grid node",
                            row + 1
                        )));
                    }
                    vals.push(q);
                }
                if vals.len() != grid.len() {
                    return Err(Error::Config(format!(
                        "{path}: {} samples for a grid of {} points",
                        vals.len(),
                        grid.len()
                    )));
                }
                SampledFunction::new(grid, vals)
            }
        }
    }
}

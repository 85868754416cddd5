use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::geometry::{FeasibleSet, ProxSetup};
use crate::problems::{
    bilinear_from_matrix, make_affine_vi, make_bilinear_saddle, make_holder_field, random_affine_vi, ProblemInstance,
};
use crate::solver::{InitialL, SolverConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub instance: InstanceSpec,
    pub solver: SolverSpec,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    #[serde(default = "one")]
    pub repetitions: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSpec {
    /// Random `m x n` game, or an explicit payoff matrix given row by row.
    Bilinear {
        #[serde(default)]
        m: Option<usize>,
        #[serde(default)]
        n: Option<usize>,
        #[serde(default = "unit")]
        entry_scale: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        matrix: Option<Vec<Vec<f64>>>,
    },
    /// Random monotone affine field, or explicit `matrix` and `offset`.
    Affine {
        #[serde(default)]
        n: Option<usize>,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        matrix: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        offset: Option<Vec<f64>>,
        geometry: GeometrySpec,
    },
    Holder { n: usize, nu: f64, set: SetSpec },
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometrySpec {
    Euclidean { set: SetSpec },
    Entropy { dim: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Simplex { dim: usize },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Cube { dim: usize, lo: f64, hi: f64 },
    Ball { center: Vec<f64>, radius: f64 },
}

impl SetSpec {
    pub fn build(&self) -> Result<FeasibleSet, HarnessError> {
        let set = match self {
            SetSpec::Simplex { dim } => FeasibleSet::simplex(*dim),
            SetSpec::Box { lower, upper } => FeasibleSet::boxed(lower.clone(), upper.clone()),
            SetSpec::Cube { dim, lo, hi } => FeasibleSet::cube(*dim, *lo, *hi),
            SetSpec::Ball { center, radius } => FeasibleSet::ball(center.clone(), *radius),
        };
        set.map_err(|e| HarnessError::config("instance.set", e.to_string()))
    }
}

impl GeometrySpec {
    pub fn build(&self) -> Result<ProxSetup, HarnessError> {
        let setup = match self {
            GeometrySpec::Euclidean { set } => ProxSetup::euclidean(set.build()?),
            GeometrySpec::Entropy { dim } => ProxSetup::entropy(*dim),
        };
        setup.map_err(|e| HarnessError::config("instance.geometry", e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[default]
    Adaptive,
    #[serde(alias = "inexact")]
    AdaptiveInexact,
    Fixed,
}

/// `"auto"` or a number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum L0Setting {
    Value(f64),
    Keyword(Auto),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Auto {
    Auto,
}

impl Default for L0Setting {
    fn default() -> Self {
        L0Setting::Keyword(Auto::Auto)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default)]
    pub kind: SolverKind,
    pub epsilon: f64,
    #[serde(default)]
    pub l0: L0Setting,
    /// Overrides `l0` with `l0_scale * known_L`.
    #[serde(default)]
    pub l0_scale: Option<f64>,
    #[serde(default)]
    pub l0_seed: u64,
    #[serde(default)]
    pub max_outer: Option<usize>,
    #[serde(default)]
    pub max_backtracks_per_iter: Option<usize>,
    #[serde(default)]
    pub l_floor: Option<f64>,
    #[serde(default)]
    pub record_trace: bool,
    #[serde(default)]
    pub probe_seed: u64,
    #[serde(default)]
    pub controllable_error: Option<f64>,
    #[serde(default)]
    pub delta_u: f64,
    #[serde(default)]
    pub noise_seed: u64,
    /// Fixed-step constant; defaults to `known_L`.
    #[serde(default)]
    pub fixed_l: Option<f64>,
    /// Fixed-step budget; defaults to `ceil(2 L R^2 / eps)` at `fixed_l`.
    #[serde(default)]
    pub fixed_iterations: Option<usize>,
}

impl SolverSpec {
    pub fn new(kind: SolverKind, epsilon: f64) -> Self {
        SolverSpec {
            kind,
            epsilon,
            l0: L0Setting::default(),
            l0_scale: None,
            l0_seed: 0,
            max_outer: None,
            max_backtracks_per_iter: None,
            l_floor: None,
            record_trace: false,
            probe_seed: 0,
            controllable_error: None,
            delta_u: 0.0,
            noise_seed: 0,
            fixed_l: None,
            fixed_iterations: None,
        }
    }

    /// Solver configuration for an instance with the given `known_L`.
    pub fn solver_config(&self, known_l: Option<f64>) -> Result<SolverConfig, HarnessError> {
        let mut c = SolverConfig::new(self.epsilon);
        c.l0 = match (self.l0_scale, self.l0) {
            (Some(scale), _) => {
                let l = known_l.ok_or_else(|| HarnessError::config("solver.l0_scale", "instance has no known L"))?;
                InitialL::Fixed(scale * l)
            }
            (None, L0Setting::Value(v)) => InitialL::Fixed(v),
            (None, L0Setting::Keyword(Auto::Auto)) => InitialL::Auto,
        };
        c.l0_seed = self.l0_seed;
        if let Some(v) = self.max_outer {
            c.max_outer = v;
        }
        if let Some(v) = self.max_backtracks_per_iter {
            c.max_backtracks_per_iter = v;
        }
        if let Some(v) = self.l_floor {
            c.l_floor = v;
        }
        c.record_trace = self.record_trace;
        c.probe_seed = self.probe_seed;
        c.controllable_error = self.controllable_error;
        c.validate().map_err(|e| HarnessError::config("solver", e.to_string()))?;
        Ok(c)
    }
}

impl ExperimentConfig {
    pub fn new(instance: InstanceSpec, solver: SolverSpec) -> Self {
        ExperimentConfig { schema_version: SCHEMA_VERSION, name: None, instance, solver, output: None, repetitions: 1 }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| HarnessError::config("<toml>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| e.with_path(path))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(HarnessError::config(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        if self.repetitions == 0 {
            return Err(HarnessError::config("repetitions", "must be at least 1"));
        }
        if !(self.solver.epsilon > 0.0 && self.solver.epsilon.is_finite()) {
            return Err(HarnessError::config("solver.epsilon", format!("must be positive, got {}", self.solver.epsilon)));
        }
        if !(self.solver.delta_u >= 0.0 && self.solver.delta_u.is_finite()) {
            return Err(HarnessError::config("solver.delta_u", format!("must be nonnegative, got {}", self.solver.delta_u)));
        }
        if let Some(s) = self.solver.l0_scale {
            if !(s > 0.0 && s.is_finite()) {
                return Err(HarnessError::config("solver.l0_scale", format!("must be positive, got {s}")));
            }
        }
        // building the instance catches the remaining family-specific errors
        self.build_instance(0)?;
        Ok(())
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| match &self.instance {
            InstanceSpec::Bilinear { .. } => "bilinear".into(),
            InstanceSpec::Affine { .. } => "affine".into(),
            InstanceSpec::Holder { .. } => "holder".into(),
        })
    }

    /// Instance for repetition `rep`; seeded families use `seed + rep`.
    pub fn build_instance(&self, rep: usize) -> Result<ProblemInstance, HarnessError> {
        let field = "instance";
        let inst = match &self.instance {
            InstanceSpec::Bilinear { m, n, entry_scale, seed, matrix } => match (matrix, m, n) {
                (Some(rows), _, _) => bilinear_from_matrix(matrix_from_rows(rows, "instance.matrix")?),
                (None, Some(m), Some(n)) => make_bilinear_saddle(*m, *n, *entry_scale, seed.wrapping_add(rep as u64)),
                _ => return Err(HarnessError::config(field, "bilinear needs either `matrix` or both `m` and `n`")),
            },
            InstanceSpec::Affine { n, seed, matrix, offset, geometry } => {
                let setup = geometry.build()?;
                match (matrix, offset, n) {
                    (Some(rows), Some(b), _) => {
                        make_affine_vi(matrix_from_rows(rows, "instance.matrix")?, DVector::from_vec(b.clone()), setup)
                    }
                    (None, None, Some(n)) => random_affine_vi(*n, seed.wrapping_add(rep as u64), setup),
                    _ => {
                        return Err(HarnessError::config(
                            field,
                            "affine needs `matrix` and `offset`, or `n` for a random instance",
                        ))
                    }
                }
            }
            InstanceSpec::Holder { n, nu, set } => make_holder_field(*n, *nu, set.build()?),
        };
        inst.map_err(|e| HarnessError::config(field, e.to_string()))
    }
}

fn matrix_from_rows(rows: &[Vec<f64>], field: &str) -> Result<DMatrix<f64>, HarnessError> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(HarnessError::config(field, "matrix rows must be nonempty and of equal length"));
    }
    Ok(DMatrix::from_row_iterator(rows.len(), ncols, rows.iter().flatten().copied()))
}

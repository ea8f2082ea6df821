//! TOML experiment configuration. Every block has defaults except the
//! physical parameters, which solve and sweep need explicitly.

use std::path::Path;

use kgmp::mountainpass::MPConfig;
use kgmp::{Geometry, GeometryKind, Params};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seed for every randomized experiment.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub geometry: GeometryBlock,
    #[serde(default)]
    pub grid: GridBlock,
    pub params: Option<ParamsBlock>,
    #[serde(default)]
    pub solver: MPConfig,
    #[serde(default)]
    pub solve: SolveBlock,
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub phase_ratio: PhaseRatioBlock,
    #[serde(default)]
    pub aubin: AubinBlock,
    #[serde(default)]
    pub pohozaev: PohozaevBlock,
    #[serde(default)]
    pub gauge_check: GaugeCheckBlock,
}

fn default_seed() -> u64 {
    0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Sphere,
    Ball,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    pub kind: Shape,
    pub n: usize,
    /// Ball radius; ignored on the sphere.
    pub r_max: f64,
}

impl Default for GeometryBlock {
    fn default() -> Self {
        GeometryBlock {
            kind: Shape::Sphere,
            n: 3,
            r_max: 1.0,
        }
    }
}

impl GeometryBlock {
    pub fn build(&self) -> Result<Geometry, CliError> {
        let geometry = match self.kind {
            Shape::Sphere => Geometry::sphere(self.n),
            Shape::Ball => Geometry::new(GeometryKind::EuclideanBall, self.n, self.r_max),
        };
        geometry.map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub intervals: usize,
    pub grading: f64,
}

impl Default for GridBlock {
    fn default() -> Self {
        GridBlock {
            intervals: 200,
            grading: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsBlock {
    /// Defaults to the critical exponent `2n/(n-2)`.
    pub p: Option<f64>,
    pub m0: f64,
    pub m1: f64,
    pub q: f64,
    #[serde(default)]
    pub omega: f64,
}

impl ParamsBlock {
    pub fn build(&self, n: usize) -> Result<Params, CliError> {
        let built = match self.p {
            Some(p) => Params::new(n, p, self.m0, self.m1, self.q, self.omega),
            None => Params::critical(n, self.m0, self.m1, self.q, self.omega),
        };
        built.map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveBlock {
    /// Width of the bubble seed `B_mu`.
    pub seed_mu: f64,
}

impl Default for SolveBlock {
    fn default() -> Self {
        SolveBlock { seed_mu: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub from: f64,
    pub to: f64,
    pub points: usize,
    /// Read `from` and `to` as multiples of `m0`.
    #[serde(default)]
    pub relative: bool,
}

impl SweepBlock {
    pub fn omegas(&self, m0: f64) -> Result<Vec<f64>, CliError> {
        if self.points == 0 {
            return Err(CliError::Config("empty sweep range".into()));
        }
        if !(self.from.is_finite() && self.to.is_finite()) {
            return Err(CliError::Config("sweep bounds must be finite".into()));
        }
        let scale = if self.relative { m0 } else { 1.0 };
        if self.points == 1 {
            return Ok(vec![self.from * scale]);
        }
        let last = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|k| {
                let t = k as f64 / last;
                ((1.0 - t) * self.from + t * self.to) * scale
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseRatioBlock {
    pub dims: Vec<usize>,
    pub mus: Vec<f64>,
    pub intervals: usize,
}

impl Default for PhaseRatioBlock {
    fn default() -> Self {
        PhaseRatioBlock {
            dims: vec![3, 5],
            mus: vec![1e-1, 1e-2, 1e-3],
            intervals: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AubinBlock {
    pub lambda: f64,
    pub eps: Vec<f64>,
    /// Cutoff radius of the truncated bubble.
    pub rho0: f64,
}

impl Default for AubinBlock {
    fn default() -> Self {
        AubinBlock {
            lambda: 1.0,
            eps: vec![0.5, 0.3, 0.2, 0.1, 0.05, 0.03],
            rho0: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PohozaevBlock {
    /// Concentration scales of the exact sphere solutions.
    pub mus: Vec<f64>,
    pub r0: f64,
}

impl Default for PohozaevBlock {
    fn default() -> Self {
        PohozaevBlock {
            mus: vec![3e-2, 1e-2],
            r0: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeCheckBlock {
    pub dims: Vec<usize>,
    pub charges: Vec<f64>,
    /// Random fields for the bound check.
    pub fields: usize,
    /// Random pairs for the continuity check.
    pub pairs: usize,
    pub m1: f64,
}

impl Default for GaugeCheckBlock {
    fn default() -> Self {
        GaugeCheckBlock {
            dims: vec![3, 5, 7],
            charges: vec![0.5, 1.0, 2.0],
            fields: 100,
            pairs: 50,
            m1: 1.0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Applies command-line grid overrides and re-validates.
    pub fn with_grid(mut self, intervals: Option<usize>, grading: Option<f64>) -> Result<Self, CliError> {
        if let Some(n) = intervals {
            self.grid.intervals = n;
        }
        if let Some(g) = grading {
            self.grid.grading = g;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.geometry.build()?;
        if self.grid.intervals < 8 {
            return Err(CliError::Config("grid.intervals must be at least 8".into()));
        }
        if !(self.grid.grading >= 1.0 && self.grid.grading.is_finite()) {
            return Err(CliError::Config("grid.grading must be >= 1".into()));
        }
        if let Some(params) = &self.params {
            params.build(self.geometry.n)?;
        }
        self.solver
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if !(self.solve.seed_mu > 0.0) {
            return Err(CliError::Config("solve.seed_mu must be positive".into()));
        }
        if self.pohozaev.mus.iter().any(|&m| !(m > 0.0)) || !(self.pohozaev.r0 > 0.0) {
            return Err(CliError::Config("pohozaev.mus and r0 must be positive".into()));
        }
        if self.phase_ratio.mus.iter().any(|&m| !(m > 0.0)) {
            return Err(CliError::Config("phase_ratio.mus must be positive".into()));
        }
        if self.aubin.eps.iter().any(|&e| !(e > 0.0)) || !(self.aubin.rho0 > 0.0) {
            return Err(CliError::Config("aubin.eps and rho0 must be positive".into()));
        }
        let gc = &self.gauge_check;
        if gc.charges.iter().any(|&q| !(q > 0.0)) || !(gc.m1 > 0.0) {
            return Err(CliError::Config("gauge_check charges and m1 must be positive".into()));
        }
        if gc.dims.iter().any(|&n| n < 3) || self.phase_ratio.dims.iter().any(|&n| n < 3) {
            return Err(CliError::Config("dimensions must be at least 3".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<Params, CliError> {
        self.params
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [params] block".into()))?
            .build(self.geometry.n)
    }
}

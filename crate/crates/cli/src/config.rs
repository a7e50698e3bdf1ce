//! JSON run configurations. Keys shared by every command (`out`, `threads`,
//! `seed`, `settings`) are split off first; the rest must match the command's
//! record exactly.

use std::f64::consts::PI;
use std::path::PathBuf;

use dumbbell::geometry::{DumbbellSpec, TubeProfile};
use dumbbell::limit1d::AngularConvention;
use dumbbell::NumericSettings;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::Failure;

fn unit_area_radius() -> f64 {
    1.0 / PI.sqrt()
}

fn unit_area_perimeter() -> f64 {
    2.0 * PI.sqrt()
}

/// Settings common to all commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Common {
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub settings: NumericSettings,
}

fn default_seed() -> u64 {
    2024
}

impl Default for Common {
    fn default() -> Self {
        Self {
            out: None,
            threads: None,
            seed: default_seed(),
            settings: NumericSettings::default(),
        }
    }
}

/// Splits a config document into the common part and the command record.
pub fn parse<T: DeserializeOwned + Default>(text: Option<&str>) -> Result<(Common, T), Failure> {
    let Some(text) = text else {
        return Ok((Common::default(), T::default()));
    };
    let mut value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Failure::Validation(format!("malformed config: {e}")))?;
    let object = value
        .as_object_mut()
        .ok_or_else(|| Failure::Validation("config must be a JSON object".into()))?;
    let mut common = serde_json::Map::new();
    for key in ["out", "threads", "seed", "settings"] {
        if let Some(v) = object.remove(key) {
            common.insert(key.to_string(), v);
        }
    }
    let common: Common = serde_json::from_value(common.into())
        .map_err(|e| Failure::Validation(format!("invalid config: {e}")))?;
    let command: T =
        serde_json::from_value(value).map_err(|e| Failure::Validation(format!("invalid config: {e}")))?;
    Ok((common, command))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitProblem {
    /// Dynamic boundary conditions, planar (`n = 2`).
    Ep1,
    /// Dirichlet ends with weight `rho^{n-2}` (`n >= 3`).
    Ep3,
    /// First eigenvalue with fixed end values (`n >= 3`): closed form.
    Ep2,
    /// Dynamic boundary conditions with endpoint masses `P_i / eps^{n-2}`.
    Ep4,
    /// Roots of the characteristic equation for `rho = 1`, `n = 2`.
    Roots,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitConfig {
    pub problem: LimitProblem,
    #[serde(alias = "rho")]
    pub profile: TubeProfile,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "P1")]
    pub p1: f64,
    #[serde(rename = "P2")]
    pub p2: f64,
    /// Grid intervals.
    #[serde(rename = "N")]
    pub n: usize,
    /// Highest index computed.
    pub k: usize,
    /// Dimension for `ep2`, `ep3`, `ep4`.
    pub dim: usize,
    /// Tube width for `ep4`.
    pub eps: f64,
    pub convention: AngularConvention,
}

impl Default for LimitConfig {
    fn default() -> Self {
        Self {
            problem: LimitProblem::Ep1,
            profile: TubeProfile::Constant(1.0),
            length: 12.0,
            p1: unit_area_perimeter(),
            p2: unit_area_perimeter(),
            n: 4096,
            k: 5,
            dim: 3,
            eps: 0.01,
            convention: AngularConvention::Paper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Dumbbell,
    Disk,
    Rectangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FemProblem {
    Steklov,
    Neumann,
    Both,
}

/// Domain description shared by `fem` and `mesh`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainConfig {
    pub domain: Domain,
    /// Disk radius.
    pub radius: f64,
    /// Rectangle sides.
    pub width: f64,
    pub height: f64,
    pub r1: f64,
    pub r2: f64,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(alias = "rho")]
    pub profile: TubeProfile,
    pub eps: f64,
    /// Mesh size; for dumbbells `None` means `min(0.1, L / 60)`, otherwise 0.05.
    pub h: Option<f64>,
    /// Cross-tube layers.
    pub n_y: usize,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self {
            domain: Domain::Dumbbell,
            radius: 1.0,
            width: 1.0,
            height: 1.0,
            r1: unit_area_radius(),
            r2: unit_area_radius(),
            length: 4.0,
            profile: TubeProfile::Constant(1.0),
            eps: 0.1,
            h: None,
            n_y: 4,
        }
    }
}

impl DomainConfig {
    pub fn mesh_size(&self) -> f64 {
        match (self.h, self.domain) {
            (Some(h), _) => h,
            (None, Domain::Dumbbell) => 0.1f64.min(self.length / 60.0),
            (None, _) => 0.05,
        }
    }

    pub fn dumbbell(&self) -> DumbbellSpec {
        DumbbellSpec::new(self.r1, self.r2, self.length, self.profile.clone(), self.eps)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FemConfig {
    #[serde(flatten)]
    pub domain: DomainConfig,
    #[serde(flatten)]
    pub options: FemOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FemOptions {
    pub problem: FemProblem,
    /// Steklov pairs `0..=k`, Neumann `mu_1..=mu_k`.
    pub k: usize,
    /// Sample eigenfunctions along `trace_polyline` (default: the symmetry
    /// axis `x2 = 0` across the domain).
    pub traces: bool,
    pub trace_polyline: Option<Vec<[f64; 2]>>,
    pub trace_per_segment: usize,
}

const FEM_OPTION_KEYS: [&str; 5] = ["problem", "k", "traces", "trace_polyline", "trace_per_segment"];

// serde cannot combine `flatten` with `deny_unknown_fields`, so the two
// halves are split by key and parsed strictly.
impl<'de> Deserialize<'de> for FemConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let mut value = serde_json::Value::deserialize(d)?;
        let object = value.as_object_mut().ok_or_else(|| D::Error::custom("expected an object"))?;
        let mut options = serde_json::Map::new();
        for key in FEM_OPTION_KEYS {
            if let Some(v) = object.remove(key) {
                options.insert(key.to_string(), v);
            }
        }
        Ok(Self {
            domain: serde_json::from_value(value).map_err(D::Error::custom)?,
            options: serde_json::from_value(options.into()).map_err(D::Error::custom)?,
        })
    }
}

impl Default for FemOptions {
    fn default() -> Self {
        Self {
            problem: FemProblem::Both,
            k: 6,
            traces: false,
            trace_polyline: None,
            trace_per_segment: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub r1: f64,
    pub r2: f64,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(alias = "rho")]
    pub profile: TubeProfile,
    /// Strictly decreasing widths, at least three.
    pub eps: Vec<f64>,
    pub k: usize,
    pub h: Option<f64>,
    pub n_y: usize,
    pub trace_samples: usize,
    pub neumann: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            r1: unit_area_radius(),
            r2: unit_area_radius(),
            length: 4.0,
            profile: TubeProfile::Constant(1.0),
            eps: vec![0.4, 0.2, 0.1, 0.05],
            k: 3,
            h: None,
            n_y: 4,
            trace_samples: 129,
            neumann: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleConfig {
    #[serde(rename = "L")]
    pub length: f64,
    /// Also run the FEM probes.
    pub fem: bool,
    pub eps: Vec<f64>,
    pub h: f64,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self {
            length: 12.0,
            fem: false,
            eps: dumbbell::counterexample::PROBE_EPS.to_vec(),
            h: 0.15,
        }
    }
}

/// Wraps `DomainConfig` so the `mesh` command has its own strict record.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MeshConfig(pub DomainConfig);

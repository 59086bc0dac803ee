//! Scenario files: a TOML grammar with unit-suffixed keys (`.scn` by
//! convention), validated with line-anchored diagnostics, plus seeded world
//! construction. Parsing goes through span-carrying mirror structs so a bad
//! value can be reported at its line; the public [`Scenario`] is plain data
//! that serializes back to the same grammar.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;
use toml::Spanned;

use crate::behaviors::{BehaviorWeights, Limits};
use crate::geometry::{Bounds, Polygon, Vec2, Vector};
use crate::perception::ZoneParams;
use crate::sim::{
    AgentState, AlienState, AttractionGrowth, Measurement, Model, StepOptions, World,
};
use crate::simplified::SimplifiedParams;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("{key}{}: {reason}", match line { Some(l) => format!(" (line {l})"), None => String::new() })]
    Invalid { key: String, line: Option<usize>, reason: String },
}

fn invalid(key: impl Into<String>, line: usize, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid { key: key.into(), line: Some(line), reason: reason.into() }
}

/// CLI-level knobs applied before validation, so e.g. a model override can
/// still demand its parameter block with a proper diagnostic.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub model: Option<Model>,
    pub measurement: Option<Measurement>,
    /// Turns on both strict flags: unconditional velocity squash and
    /// band-only intruder surveillance.
    pub strict_paper_mode: bool,
}

// ---------------------------------------------------------------------------
// Plain, validated scenario data (serializes back to file grammar).

fn ser_model<S: Serializer>(m: &Model, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(model_str(*m))
}

fn ser_measurement<S: Serializer>(m: &Measurement, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(measurement_str(*m))
}

pub fn model_str(m: Model) -> &'static str {
    match m {
        Model::Zone => "zone",
        Model::Simplified => "simplified",
    }
}

pub fn measurement_str(m: Measurement) -> &'static str {
    match m {
        Measurement::Position => "position",
        Measurement::Bearing => "bearing",
        Measurement::BearingFd => "bearing-fd",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorldSpec {
    pub dimension: usize,
    pub dt_s: f64,
    pub total_time_s: f64,
    #[serde(serialize_with = "ser_model")]
    pub model: Model,
    #[serde(serialize_with = "ser_measurement")]
    pub measurement: Measurement,
    pub v_desired_mps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds_min_m: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds_max_m: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OptionsSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cohesion_normalize: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict_velocity_bound: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict_surveillance_band: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triangle_alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triangle_edge_probes: Option<bool>,
    /// "auto" (default), "off", or "custom" with the step/cap keys below.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attraction_growth: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attraction_growth_step_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attraction_growth_max_radius_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count_smoothing: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simplified_extensions: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate_from_applied_control: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_zone_pressure: Option<bool>,
}

/// Which agents get a nonzero speed-alignment weight.
#[derive(Clone, Debug, PartialEq)]
pub enum InformedSpec {
    All,
    None,
    Ids(Vec<usize>),
}

impl Serialize for InformedSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            InformedSpec::All => s.serialize_str("all"),
            InformedSpec::None => s.serialize_str("none"),
            InformedSpec::Ids(ids) => {
                let mut seq = s.serialize_seq(Some(ids.len()))?;
                for id in ids {
                    seq.serialize_element(id)?;
                }
                seq.end()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InitSpec {
    pub pos_min_m: Vec<f64>,
    pub pos_max_m: Vec<f64>,
    pub vel_min_mps: Vec<f64>,
    pub vel_max_mps: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExplicitSpec {
    pub pos_m: Vec<f64>,
    pub vel_mps: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZonesSpec {
    pub repulsion_radius_m: f64,
    pub conflict_radius_m: f64,
    pub attraction_radius_m: f64,
    pub surveillance_radius_m: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightsSpec {
    pub separation: f64,
    pub cohesion: f64,
    pub alignment: f64,
    pub strategic: f64,
    pub avoidance: f64,
    pub speed: f64,
    pub gain: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LimitsSpec {
    pub v_max_mps: f64,
    pub u_max_mps2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SimplifiedSpec {
    pub perception_radius_m: f64,
    /// Defaults to 1 / perception_radius_m.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_per_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_sep_cohesion: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_alignment: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerAgentSpec {
    pub id: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub informed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zones: Option<ZonesSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limits: Option<LimitsSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simplified: Option<SimplifiedSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgentsSpec {
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub informed: Option<InformedSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init: Option<InitSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zones: Option<ZonesSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limits: Option<LimitsSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simplified: Option<SimplifiedSpec>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub explicit: Vec<ExplicitSpec>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub per_agent: Vec<PerAgentSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlienSpec {
    pub start_pos_m: Vec<f64>,
    pub max_speed_mps: f64,
    pub detection_radius_m: f64,
    pub containment_m: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstacleSpec {
    pub vertices_m: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scenario {
    pub schema_version: u32,
    pub seed: u64,
    pub world: WorldSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub options: Option<OptionsSpec>,
    pub agents: AgentsSpec,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub aliens: Vec<AlienSpec>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub obstacles: Vec<ObstacleSpec>,
}

// ---------------------------------------------------------------------------
// Span-carrying mirror of the file grammar.

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    schema_version: Spanned<u32>,
    seed: Option<Spanned<u64>>,
    world: RawWorld,
    options: Option<RawOptions>,
    agents: RawAgents,
    #[serde(default)]
    aliens: Vec<RawAlien>,
    #[serde(default)]
    obstacles: Vec<RawObstacle>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWorld {
    dimension: Spanned<usize>,
    dt_s: Spanned<f64>,
    total_time_s: Spanned<f64>,
    model: Spanned<String>,
    measurement: Spanned<String>,
    v_desired_mps: Spanned<f64>,
    bounds_min_m: Option<Spanned<Vec<f64>>>,
    bounds_max_m: Option<Spanned<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    cohesion_normalize: Option<Spanned<bool>>,
    strict_velocity_bound: Option<Spanned<bool>>,
    strict_surveillance_band: Option<Spanned<bool>>,
    triangle_alpha: Option<Spanned<f64>>,
    triangle_edge_probes: Option<Spanned<bool>>,
    attraction_growth: Option<Spanned<String>>,
    attraction_growth_step_m: Option<Spanned<f64>>,
    attraction_growth_max_radius_m: Option<Spanned<f64>>,
    count_smoothing: Option<Spanned<f64>>,
    simplified_extensions: Option<Spanned<bool>>,
    estimate_from_applied_control: Option<Spanned<bool>>,
    wall_zone_pressure: Option<Spanned<bool>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAgents {
    count: Spanned<usize>,
    informed: Option<Spanned<toml::Value>>,
    init: Option<RawInit>,
    zones: Option<RawZones>,
    weights: Option<RawWeights>,
    limits: Option<RawLimits>,
    simplified: Option<RawSimplified>,
    #[serde(default)]
    explicit: Vec<RawExplicit>,
    #[serde(default)]
    per_agent: Vec<RawPerAgent>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInit {
    pos_min_m: Spanned<Vec<f64>>,
    pos_max_m: Spanned<Vec<f64>>,
    vel_min_mps: Spanned<Vec<f64>>,
    vel_max_mps: Spanned<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExplicit {
    pos_m: Spanned<Vec<f64>>,
    vel_mps: Spanned<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawZones {
    repulsion_radius_m: Spanned<f64>,
    conflict_radius_m: Spanned<f64>,
    attraction_radius_m: Spanned<f64>,
    surveillance_radius_m: Spanned<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeights {
    separation: Spanned<f64>,
    cohesion: Spanned<f64>,
    alignment: Spanned<f64>,
    strategic: Spanned<f64>,
    avoidance: Spanned<f64>,
    speed: Spanned<f64>,
    gain: Spanned<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLimits {
    v_max_mps: Spanned<f64>,
    u_max_mps2: Spanned<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimplified {
    perception_radius_m: Spanned<f64>,
    beta_per_m: Option<Spanned<f64>>,
    w_sep_cohesion: Option<Spanned<f64>>,
    w_alignment: Option<Spanned<f64>>,
    gain: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPerAgent {
    id: Spanned<usize>,
    informed: Option<Spanned<bool>>,
    zones: Option<RawZones>,
    weights: Option<RawWeights>,
    limits: Option<RawLimits>,
    simplified: Option<RawSimplified>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlien {
    start_pos_m: Spanned<Vec<f64>>,
    max_speed_mps: Spanned<f64>,
    detection_radius_m: Spanned<f64>,
    containment_m: Spanned<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObstacle {
    vertices_m: Spanned<Vec<Vec<f64>>>,
}

// ---------------------------------------------------------------------------
// Parsing + validation.

pub fn load_scenario(path: &Path, overrides: &Overrides) -> Result<Scenario, ScenarioError> {
    let src = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&src, overrides)
}

pub fn parse_scenario(src: &str, overrides: &Overrides) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario = toml::from_str(src)?;
    Checker { src }.convert(raw, overrides)
}

/// Validation context: maps byte spans back to 1-based lines.
struct Checker<'a> {
    src: &'a str,
}

impl<'a> Checker<'a> {
    fn line<T>(&self, s: &Spanned<T>) -> usize {
        let start = s.span().start.min(self.src.len());
        1 + self.src[..start].bytes().filter(|&b| b == b'\n').count()
    }

    fn finite(&self, key: &str, v: &Spanned<f64>) -> Result<f64, ScenarioError> {
        let x = *v.get_ref();
        if !x.is_finite() {
            return Err(invalid(key, self.line(v), format!("must be finite, got {x}")));
        }
        Ok(x)
    }

    fn positive(&self, key: &str, v: &Spanned<f64>) -> Result<f64, ScenarioError> {
        let x = self.finite(key, v)?;
        if x <= 0.0 {
            return Err(invalid(key, self.line(v), format!("must be > 0, got {x}")));
        }
        Ok(x)
    }

    fn nonnegative(&self, key: &str, v: &Spanned<f64>) -> Result<f64, ScenarioError> {
        let x = self.finite(key, v)?;
        if x < 0.0 {
            return Err(invalid(key, self.line(v), format!("must be >= 0, got {x}")));
        }
        Ok(x)
    }

    fn vector(&self, key: &str, v: &Spanned<Vec<f64>>, dim: usize) -> Result<Vec<f64>, ScenarioError> {
        let xs = v.get_ref();
        if xs.len() != dim {
            return Err(invalid(
                key,
                self.line(v),
                format!("expected {dim} components, got {}", xs.len()),
            ));
        }
        if let Some(bad) = xs.iter().find(|x| !x.is_finite()) {
            return Err(invalid(key, self.line(v), format!("non-finite component {bad}")));
        }
        Ok(xs.clone())
    }

    fn zones(&self, key_base: &str, raw: &RawZones) -> Result<ZonesSpec, ScenarioError> {
        let k = |f: &str| format!("{key_base}.{f}");
        let r = self.positive(&k("repulsion_radius_m"), &raw.repulsion_radius_m)?;
        let c = self.positive(&k("conflict_radius_m"), &raw.conflict_radius_m)?;
        let a = self.positive(&k("attraction_radius_m"), &raw.attraction_radius_m)?;
        let s = self.positive(&k("surveillance_radius_m"), &raw.surveillance_radius_m)?;
        if c < r {
            return Err(invalid(
                k("conflict_radius_m"),
                self.line(&raw.conflict_radius_m),
                format!("zone ordering requires repulsion <= conflict, got {c} < {r}"),
            ));
        }
        if a < c {
            return Err(invalid(
                k("attraction_radius_m"),
                self.line(&raw.attraction_radius_m),
                format!("zone ordering requires conflict <= attraction, got {a} < {c}"),
            ));
        }
        if s < a {
            return Err(invalid(
                k("surveillance_radius_m"),
                self.line(&raw.surveillance_radius_m),
                format!("zone ordering requires attraction <= surveillance, got {s} < {a}"),
            ));
        }
        Ok(ZonesSpec {
            repulsion_radius_m: r,
            conflict_radius_m: c,
            attraction_radius_m: a,
            surveillance_radius_m: s,
        })
    }

    fn weights(&self, key_base: &str, raw: &RawWeights) -> Result<WeightsSpec, ScenarioError> {
        let k = |f: &str| format!("{key_base}.{f}");
        Ok(WeightsSpec {
            separation: self.nonnegative(&k("separation"), &raw.separation)?,
            cohesion: self.nonnegative(&k("cohesion"), &raw.cohesion)?,
            alignment: self.nonnegative(&k("alignment"), &raw.alignment)?,
            strategic: self.nonnegative(&k("strategic"), &raw.strategic)?,
            avoidance: self.nonnegative(&k("avoidance"), &raw.avoidance)?,
            speed: self.nonnegative(&k("speed"), &raw.speed)?,
            gain: self.positive(&k("gain"), &raw.gain)?,
        })
    }

    fn limits(&self, key_base: &str, raw: &RawLimits) -> Result<LimitsSpec, ScenarioError> {
        Ok(LimitsSpec {
            v_max_mps: self.positive(&format!("{key_base}.v_max_mps"), &raw.v_max_mps)?,
            u_max_mps2: self.positive(&format!("{key_base}.u_max_mps2"), &raw.u_max_mps2)?,
        })
    }

    fn simplified(
        &self,
        key_base: &str,
        raw: &RawSimplified,
    ) -> Result<SimplifiedSpec, ScenarioError> {
        let k = |f: &str| format!("{key_base}.{f}");
        let radius = self.positive(&k("perception_radius_m"), &raw.perception_radius_m)?;
        let beta = raw
            .beta_per_m
            .as_ref()
            .map(|b| self.positive(&k("beta_per_m"), b))
            .transpose()?;
        let w_sc = raw
            .w_sep_cohesion
            .as_ref()
            .map(|w| self.nonnegative(&k("w_sep_cohesion"), w))
            .transpose()?;
        let w_a = raw
            .w_alignment
            .as_ref()
            .map(|w| self.nonnegative(&k("w_alignment"), w))
            .transpose()?;
        let gain = raw.gain.as_ref().map(|g| self.positive(&k("gain"), g)).transpose()?;
        Ok(SimplifiedSpec {
            perception_radius_m: radius,
            beta_per_m: beta,
            w_sep_cohesion: w_sc,
            w_alignment: w_a,
            gain,
        })
    }

    fn polygon(&self, key: &str, raw: &Spanned<Vec<Vec<f64>>>) -> Result<Vec<Vec<f64>>, ScenarioError> {
        let line = self.line(raw);
        let pts = raw.get_ref();
        for p in pts {
            if p.len() != 2 {
                return Err(invalid(key, line, format!("vertices need 2 components, got {}", p.len())));
            }
            if !p.iter().all(|x| x.is_finite()) {
                return Err(invalid(key, line, "non-finite vertex"));
            }
        }
        let verts: Vec<Vec2> = pts.iter().map(|p| Vec2::xy(p[0], p[1])).collect();
        Polygon::new(verts).map_err(|e| invalid(key, line, e.to_string()))?;
        Ok(pts.clone())
    }

    fn informed(
        &self,
        raw: &Spanned<toml::Value>,
        count: usize,
    ) -> Result<InformedSpec, ScenarioError> {
        let key = "agents.informed";
        let line = self.line(raw);
        match raw.get_ref() {
            toml::Value::String(s) => match s.as_str() {
                "all" => Ok(InformedSpec::All),
                "none" => Ok(InformedSpec::None),
                other => Err(invalid(key, line, format!("expected \"all\", \"none\", or an id list, got \"{other}\""))),
            },
            toml::Value::Array(items) => {
                let mut ids = Vec::with_capacity(items.len());
                for item in items {
                    let id = item.as_integer().ok_or_else(|| {
                        invalid(key, line, format!("ids must be integers, got {item}"))
                    })?;
                    if id < 0 || id as usize >= count {
                        return Err(invalid(key, line, format!("id {id} outside 0..{count}")));
                    }
                    let id = id as usize;
                    if ids.contains(&id) {
                        return Err(invalid(key, line, format!("duplicate id {id}")));
                    }
                    ids.push(id);
                }
                Ok(InformedSpec::Ids(ids))
            }
            other => Err(invalid(key, line, format!("expected a string or an array, got {other}"))),
        }
    }

    fn convert(&self, raw: RawScenario, ov: &Overrides) -> Result<Scenario, ScenarioError> {
        if *raw.schema_version.get_ref() != 1 {
            return Err(invalid(
                "schema_version",
                self.line(&raw.schema_version),
                format!("unsupported version {}, expected 1", raw.schema_version.get_ref()),
            ));
        }
        let seed = ov.seed.unwrap_or_else(|| raw.seed.as_ref().map_or(0, |s| *s.get_ref()));

        let dim = *raw.world.dimension.get_ref();
        if !(1..=3).contains(&dim) {
            return Err(invalid(
                "world.dimension",
                self.line(&raw.world.dimension),
                format!("must be 1, 2, or 3, got {dim}"),
            ));
        }
        let dt = self.positive("world.dt_s", &raw.world.dt_s)?;
        let total = self.positive("world.total_time_s", &raw.world.total_time_s)?;
        if total + 1e-12 < dt {
            return Err(invalid(
                "world.total_time_s",
                self.line(&raw.world.total_time_s),
                format!("must cover at least one step of {dt} s, got {total}"),
            ));
        }
        let model = match ov.model {
            Some(m) => m,
            None => match raw.world.model.get_ref().as_str() {
                "zone" => Model::Zone,
                "simplified" => Model::Simplified,
                other => {
                    return Err(invalid(
                        "world.model",
                        self.line(&raw.world.model),
                        format!("expected \"zone\" or \"simplified\", got \"{other}\""),
                    ))
                }
            },
        };
        let measurement = match ov.measurement {
            Some(m) => m,
            None => match raw.world.measurement.get_ref().as_str() {
                "position" => Measurement::Position,
                "bearing" => Measurement::Bearing,
                "bearing-fd" => Measurement::BearingFd,
                other => {
                    return Err(invalid(
                        "world.measurement",
                        self.line(&raw.world.measurement),
                        format!(
                            "expected \"position\", \"bearing\", or \"bearing-fd\", got \"{other}\""
                        ),
                    ))
                }
            },
        };
        let v_desired = self.nonnegative("world.v_desired_mps", &raw.world.v_desired_mps)?;

        let bounds = match (&raw.world.bounds_min_m, &raw.world.bounds_max_m) {
            (None, None) => None,
            (Some(min), Some(max)) => {
                if dim != 2 {
                    return Err(invalid(
                        "world.bounds_min_m",
                        self.line(min),
                        format!("boundary walls require dimension = 2, got {dim}"),
                    ));
                }
                let lo = self.vector("world.bounds_min_m", min, 2)?;
                let hi = self.vector("world.bounds_max_m", max, 2)?;
                if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
                    return Err(invalid(
                        "world.bounds_max_m",
                        self.line(max),
                        "bounds must satisfy min < max componentwise",
                    ));
                }
                Some((lo, hi))
            }
            (Some(min), None) => {
                return Err(invalid(
                    "world.bounds_min_m",
                    self.line(min),
                    "bounds_min_m given without bounds_max_m",
                ))
            }
            (None, Some(max)) => {
                return Err(invalid(
                    "world.bounds_max_m",
                    self.line(max),
                    "bounds_max_m given without bounds_min_m",
                ))
            }
        };

        let options = raw.options.as_ref().map(|o| self.options(o)).transpose()?;
        let simplified_extensions = options
            .as_ref()
            .and_then(|o| o.simplified_extensions)
            .unwrap_or(false);

        // Agents.
        let count = *raw.agents.count.get_ref();
        if count == 0 {
            return Err(invalid(
                "agents.count",
                self.line(&raw.agents.count),
                "a flock needs at least one agent",
            ));
        }
        let count_line = self.line(&raw.agents.count);
        let informed = raw
            .agents
            .informed
            .as_ref()
            .map(|i| self.informed(i, count))
            .transpose()?;

        let init = match (&raw.agents.init, raw.agents.explicit.is_empty()) {
            (Some(init), true) => {
                let pos_min = self.vector("agents.init.pos_min_m", &init.pos_min_m, dim)?;
                let pos_max = self.vector("agents.init.pos_max_m", &init.pos_max_m, dim)?;
                let vel_min = self.vector("agents.init.vel_min_mps", &init.vel_min_mps, dim)?;
                let vel_max = self.vector("agents.init.vel_max_mps", &init.vel_max_mps, dim)?;
                if pos_min.iter().zip(&pos_max).any(|(a, b)| a > b) {
                    return Err(invalid(
                        "agents.init.pos_max_m",
                        self.line(&init.pos_max_m),
                        "init ranges must satisfy min <= max componentwise",
                    ));
                }
                if vel_min.iter().zip(&vel_max).any(|(a, b)| a > b) {
                    return Err(invalid(
                        "agents.init.vel_max_mps",
                        self.line(&init.vel_max_mps),
                        "init ranges must satisfy min <= max componentwise",
                    ));
                }
                Some(InitSpec {
                    pos_min_m: pos_min,
                    pos_max_m: pos_max,
                    vel_min_mps: vel_min,
                    vel_max_mps: vel_max,
                })
            }
            (None, false) => None,
            (Some(init), false) => {
                return Err(invalid(
                    "agents.init",
                    self.line(&init.pos_min_m),
                    "give either [agents.init] ranges or [[agents.explicit]] states, not both",
                ))
            }
            (None, true) => {
                return Err(invalid(
                    "agents.count",
                    count_line,
                    "agents need either [agents.init] ranges or [[agents.explicit]] states",
                ))
            }
        };

        let explicit: Vec<ExplicitSpec> = raw
            .agents
            .explicit
            .iter()
            .map(|e| {
                Ok(ExplicitSpec {
                    pos_m: self.vector("agents.explicit.pos_m", &e.pos_m, dim)?,
                    vel_mps: self.vector("agents.explicit.vel_mps", &e.vel_mps, dim)?,
                })
            })
            .collect::<Result<_, ScenarioError>>()?;
        if !explicit.is_empty() && explicit.len() != count {
            return Err(invalid(
                "agents.count",
                count_line,
                format!("count = {count} but {} explicit states given", explicit.len()),
            ));
        }

        let zones = raw.agents.zones.as_ref().map(|z| self.zones("agents.zones", z)).transpose()?;
        let weights =
            raw.agents.weights.as_ref().map(|w| self.weights("agents.weights", w)).transpose()?;
        let limits =
            raw.agents.limits.as_ref().map(|l| self.limits("agents.limits", l)).transpose()?;
        let simplified = raw
            .agents
            .simplified
            .as_ref()
            .map(|s| self.simplified("agents.simplified", s))
            .transpose()?;

        if limits.is_none() {
            return Err(invalid("agents.limits", count_line, "missing [agents.limits] block"));
        }
        if model == Model::Zone {
            if zones.is_none() {
                return Err(invalid(
                    "agents.zones",
                    count_line,
                    "the zone model needs an [agents.zones] block",
                ));
            }
            if weights.is_none() {
                return Err(invalid(
                    "agents.weights",
                    count_line,
                    "the zone model needs an [agents.weights] block",
                ));
            }
        }
        if model == Model::Simplified && simplified.is_none() {
            return Err(invalid(
                "agents.simplified",
                count_line,
                "the simplified model needs an [agents.simplified] block",
            ));
        }
        if simplified_extensions && weights.is_none() {
            return Err(invalid(
                "agents.weights",
                count_line,
                "simplified_extensions needs an [agents.weights] block for the extra rules",
            ));
        }

        let mut per_agent = Vec::with_capacity(raw.agents.per_agent.len());
        let mut seen_override_ids = Vec::new();
        for pa in &raw.agents.per_agent {
            let id = *pa.id.get_ref();
            let id_line = self.line(&pa.id);
            if id >= count {
                return Err(invalid(
                    "agents.per_agent.id",
                    id_line,
                    format!("id {id} outside 0..{count}"),
                ));
            }
            if seen_override_ids.contains(&id) {
                return Err(invalid(
                    "agents.per_agent.id",
                    id_line,
                    format!("duplicate override for id {id}"),
                ));
            }
            seen_override_ids.push(id);
            per_agent.push(PerAgentSpec {
                id,
                informed: pa.informed.as_ref().map(|i| *i.get_ref()),
                zones: pa.zones.as_ref().map(|z| self.zones("agents.per_agent.zones", z)).transpose()?,
                weights: pa
                    .weights
                    .as_ref()
                    .map(|w| self.weights("agents.per_agent.weights", w))
                    .transpose()?,
                limits: pa
                    .limits
                    .as_ref()
                    .map(|l| self.limits("agents.per_agent.limits", l))
                    .transpose()?,
                simplified: pa
                    .simplified
                    .as_ref()
                    .map(|s| self.simplified("agents.per_agent.simplified", s))
                    .transpose()?,
            });
        }

        // Environment features are planar.
        let mut aliens = Vec::with_capacity(raw.aliens.len());
        for al in &raw.aliens {
            let line = self.line(&al.start_pos_m);
            if dim != 2 {
                return Err(invalid(
                    "aliens.start_pos_m",
                    line,
                    format!("alien agents require dimension = 2, got {dim}"),
                ));
            }
            let start = self.vector("aliens.start_pos_m", &al.start_pos_m, 2)?;
            let v_max = self.nonnegative("aliens.max_speed_mps", &al.max_speed_mps)?;
            let detection = self.positive("aliens.detection_radius_m", &al.detection_radius_m)?;
            let containment = self.polygon("aliens.containment_m", &al.containment_m)?;
            let poly = Polygon::new(
                containment.iter().map(|p| Vec2::xy(p[0], p[1])).collect(),
            )
            .expect("validated above");
            let p = Vec2::xy(start[0], start[1]);
            if !poly.contains(p) && (poly.closest_boundary_point(p) - p).norm() > 1e-9 {
                return Err(invalid(
                    "aliens.start_pos_m",
                    line,
                    "start position lies outside the containment polygon",
                ));
            }
            aliens.push(AlienSpec {
                start_pos_m: start,
                max_speed_mps: v_max,
                detection_radius_m: detection,
                containment_m: containment,
            });
        }
        let mut obstacles = Vec::with_capacity(raw.obstacles.len());
        for ob in &raw.obstacles {
            let line = self.line(&ob.vertices_m);
            if dim != 2 {
                return Err(invalid(
                    "obstacles.vertices_m",
                    line,
                    format!("obstacles require dimension = 2, got {dim}"),
                ));
            }
            obstacles.push(ObstacleSpec { vertices_m: self.polygon("obstacles.vertices_m", &ob.vertices_m)? });
        }

        let mut options = options;
        if ov.strict_paper_mode {
            let o = options.get_or_insert_with(OptionsSpec::default);
            o.strict_velocity_bound = Some(true);
            o.strict_surveillance_band = Some(true);
        }

        Ok(Scenario {
            schema_version: 1,
            seed,
            world: WorldSpec {
                dimension: dim,
                dt_s: dt,
                total_time_s: total,
                model,
                measurement,
                v_desired_mps: v_desired,
                bounds_min_m: bounds.as_ref().map(|(lo, _)| lo.clone()),
                bounds_max_m: bounds.map(|(_, hi)| hi),
            },
            options,
            agents: AgentsSpec {
                count,
                informed,
                init,
                zones,
                weights,
                limits,
                simplified,
                explicit,
                per_agent,
            },
            aliens,
            obstacles,
        })
    }

    fn options(&self, raw: &RawOptions) -> Result<OptionsSpec, ScenarioError> {
        let alpha = raw
            .triangle_alpha
            .as_ref()
            .map(|a| {
                let x = self.finite("options.triangle_alpha", a)?;
                if !(x > 0.0 && x <= 1.0) {
                    return Err(invalid(
                        "options.triangle_alpha",
                        self.line(a),
                        format!("must lie in (0, 1], got {x}"),
                    ));
                }
                Ok(x)
            })
            .transpose()?;
        let smoothing = raw
            .count_smoothing
            .as_ref()
            .map(|f| {
                let x = self.finite("options.count_smoothing", f)?;
                if !(x > 0.0 && x <= 1.0) {
                    return Err(invalid(
                        "options.count_smoothing",
                        self.line(f),
                        format!("must lie in (0, 1], got {x}"),
                    ));
                }
                Ok(x)
            })
            .transpose()?;
        let growth = raw
            .attraction_growth
            .as_ref()
            .map(|g| {
                let s = g.get_ref().as_str();
                if !["auto", "off", "custom"].contains(&s) {
                    return Err(invalid(
                        "options.attraction_growth",
                        self.line(g),
                        format!("expected \"auto\", \"off\", or \"custom\", got \"{s}\""),
                    ));
                }
                Ok(s.to_string())
            })
            .transpose()?;
        let custom = growth.as_deref() == Some("custom");
        let step = raw
            .attraction_growth_step_m
            .as_ref()
            .map(|s| {
                if !custom {
                    return Err(invalid(
                        "options.attraction_growth_step_m",
                        self.line(s),
                        "only meaningful with attraction_growth = \"custom\"",
                    ));
                }
                self.positive("options.attraction_growth_step_m", s)
            })
            .transpose()?;
        let cap = raw
            .attraction_growth_max_radius_m
            .as_ref()
            .map(|c| {
                if !custom {
                    return Err(invalid(
                        "options.attraction_growth_max_radius_m",
                        self.line(c),
                        "only meaningful with attraction_growth = \"custom\"",
                    ));
                }
                self.positive("options.attraction_growth_max_radius_m", c)
            })
            .transpose()?;
        if custom && step.is_none() {
            return Err(invalid(
                "options.attraction_growth",
                self.line(raw.attraction_growth.as_ref().unwrap()),
                "custom growth needs attraction_growth_step_m",
            ));
        }
        Ok(OptionsSpec {
            cohesion_normalize: raw.cohesion_normalize.as_ref().map(|b| *b.get_ref()),
            strict_velocity_bound: raw.strict_velocity_bound.as_ref().map(|b| *b.get_ref()),
            strict_surveillance_band: raw
                .strict_surveillance_band
                .as_ref()
                .map(|b| *b.get_ref()),
            triangle_alpha: alpha,
            triangle_edge_probes: raw.triangle_edge_probes.as_ref().map(|b| *b.get_ref()),
            attraction_growth: growth,
            attraction_growth_step_m: step,
            attraction_growth_max_radius_m: cap,
            count_smoothing: smoothing,
            simplified_extensions: raw.simplified_extensions.as_ref().map(|b| *b.get_ref()),
            estimate_from_applied_control: raw
                .estimate_from_applied_control
                .as_ref()
                .map(|b| *b.get_ref()),
            wall_zone_pressure: raw.wall_zone_pressure.as_ref().map(|b| *b.get_ref()),
        })
    }
}

// ---------------------------------------------------------------------------
// World construction.

#[derive(Clone, Debug)]
pub enum AnyWorld {
    D1(World<1>),
    D2(World<2>),
    D3(World<3>),
}

impl AnyWorld {
    pub fn dimension(&self) -> usize {
        match self {
            AnyWorld::D1(_) => 1,
            AnyWorld::D2(_) => 2,
            AnyWorld::D3(_) => 3,
        }
    }
}

impl Scenario {
    /// Number of integration steps covering total_time_s.
    pub fn steps(&self) -> usize {
        (self.world.total_time_s / self.world.dt_s).round() as usize
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serialization cannot fail")
    }

    pub fn build(&self) -> Result<AnyWorld, ScenarioError> {
        Ok(match self.world.dimension {
            1 => AnyWorld::D1(self.build_world::<1>()?),
            2 => AnyWorld::D2(self.build_world::<2>()?),
            3 => AnyWorld::D3(self.build_world::<3>()?),
            d => {
                return Err(ScenarioError::Invalid {
                    key: "world.dimension".into(),
                    line: None,
                    reason: format!("must be 1, 2, or 3, got {d}"),
                })
            }
        })
    }

    fn informed_flags(&self) -> Vec<bool> {
        let n = self.agents.count;
        let mut flags = match &self.agents.informed {
            Some(InformedSpec::All) => vec![true; n],
            Some(InformedSpec::None) | None => vec![false; n],
            Some(InformedSpec::Ids(ids)) => {
                let mut f = vec![false; n];
                for &id in ids {
                    f[id] = true;
                }
                f
            }
        };
        for pa in &self.agents.per_agent {
            if let Some(informed) = pa.informed {
                flags[pa.id] = informed;
            }
        }
        flags
    }

    fn build_world<const D: usize>(&self) -> Result<World<D>, ScenarioError> {
        let n = self.agents.count;
        let informed = self.informed_flags();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let sample = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| -> f64 {
            if lo == hi {
                lo
            } else {
                rng.gen_range(lo..hi)
            }
        };

        let mut agents = Vec::with_capacity(n);
        for id in 0..n {
            let (pos, vel) = if let Some(init) = &self.agents.init {
                let mut pos = Vector::<D>::ZERO;
                for k in 0..D {
                    pos[k] = sample(&mut rng, init.pos_min_m[k], init.pos_max_m[k]);
                }
                let mut vel = Vector::<D>::ZERO;
                for k in 0..D {
                    vel[k] = sample(&mut rng, init.vel_min_mps[k], init.vel_max_mps[k]);
                }
                (pos, vel)
            } else {
                let e = &self.agents.explicit[id];
                let mut pos = Vector::<D>::ZERO;
                let mut vel = Vector::<D>::ZERO;
                for k in 0..D {
                    pos[k] = e.pos_m[k];
                    vel[k] = e.vel_mps[k];
                }
                (pos, vel)
            };

            let over = self.agents.per_agent.iter().find(|pa| pa.id == id);
            let simplified_spec =
                over.and_then(|pa| pa.simplified).or(self.agents.simplified);
            let simplified_params = simplified_spec.map(|s| {
                let radius = s.perception_radius_m;
                SimplifiedParams {
                    radius,
                    beta: s.beta_per_m.unwrap_or(1.0 / radius),
                    w_sep_cohesion: s.w_sep_cohesion.unwrap_or(1.0),
                    w_alignment: s.w_alignment.unwrap_or(1.0),
                    gain: s.gain.unwrap_or(1.0),
                }
            });

            let zones_spec = over.and_then(|pa| pa.zones).or(self.agents.zones);
            let zones = match zones_spec {
                Some(z) => ZoneParams::new(
                    z.repulsion_radius_m,
                    z.conflict_radius_m,
                    z.attraction_radius_m,
                    z.surveillance_radius_m,
                )
                .expect("validated at parse"),
                None => {
                    // Simplified-only run: a single perception zone.
                    let r = simplified_params
                        .as_ref()
                        .expect("model requirements validated at parse")
                        .radius;
                    ZoneParams::uniform(r).expect("positive radius validated")
                }
            };
            let weights_spec = over.and_then(|pa| pa.weights).or(self.agents.weights);
            let weights = match weights_spec {
                Some(w) => BehaviorWeights {
                    separation: w.separation,
                    cohesion: w.cohesion,
                    alignment: w.alignment,
                    strategic: w.strategic,
                    avoidance: w.avoidance,
                    speed: w.speed,
                    gain: w.gain,
                },
                None => BehaviorWeights {
                    separation: 0.0,
                    cohesion: 0.0,
                    alignment: 0.0,
                    strategic: 0.0,
                    avoidance: 0.0,
                    speed: 0.0,
                    gain: simplified_params.as_ref().map_or(1.0, |p| p.gain),
                },
            };
            let limits_spec = over
                .and_then(|pa| pa.limits)
                .or(self.agents.limits)
                .expect("limits required at parse");
            let limits =
                Limits { u_max: limits_spec.u_max_mps2, v_max: limits_spec.v_max_mps };

            let mut agent = AgentState::new(id, pos, vel, zones, weights, limits, informed[id]);
            if let Some(params) = simplified_params {
                agent = agent.with_simplified(params);
            }
            agents.push(agent);
        }

        let mut world = World::new(
            agents,
            self.world.dt_s,
            self.world.model,
            self.world.measurement,
            self.world.v_desired_mps,
        );
        if let (Some(lo), Some(hi)) = (&self.world.bounds_min_m, &self.world.bounds_max_m) {
            world.bounds = Some(Bounds {
                min: Vector([lo[0], lo[1]]),
                max: Vector([hi[0], hi[1]]),
            });
        }
        for ob in &self.obstacles {
            let verts = ob.vertices_m.iter().map(|p| Vec2::xy(p[0], p[1])).collect();
            world.obstacles.push(Polygon::new(verts).expect("validated at parse"));
        }
        for (id, al) in self.aliens.iter().enumerate() {
            let verts = al.containment_m.iter().map(|p| Vec2::xy(p[0], p[1])).collect();
            world.aliens.push(AlienState {
                id,
                pos: Vec2::xy(al.start_pos_m[0], al.start_pos_m[1]),
                vel: Vec2::ZERO,
                v_max: al.max_speed_mps,
                detection_radius: al.detection_radius_m,
                containment: Polygon::new(verts).expect("validated at parse"),
            });
        }
        world.options = self.step_options();
        world.validate().map_err(|e| ScenarioError::Invalid {
            key: "world".into(),
            line: None,
            reason: e.to_string(),
        })?;
        Ok(world)
    }

    pub fn step_options(&self) -> StepOptions {
        let mut opts = StepOptions::default();
        if let Some(o) = &self.options {
            if let Some(v) = o.cohesion_normalize {
                opts.cohesion_normalize = v;
            }
            if let Some(v) = o.strict_velocity_bound {
                opts.strict_velocity_bound = v;
            }
            if let Some(v) = o.strict_surveillance_band {
                opts.strict_surveillance_band = v;
            }
            if let Some(v) = o.triangle_alpha {
                opts.triangle_alpha = v;
            }
            if let Some(v) = o.triangle_edge_probes {
                opts.triangle_edge_probes = v;
            }
            opts.attraction_growth = match o.attraction_growth.as_deref() {
                None | Some("auto") => AttractionGrowth::Auto,
                Some("off") => AttractionGrowth::Disabled,
                Some("custom") => AttractionGrowth::Enabled {
                    step_m: o.attraction_growth_step_m.expect("validated at parse"),
                    max_radius_m: o.attraction_growth_max_radius_m,
                },
                Some(other) => unreachable!("growth mode {other} rejected at parse"),
            };
            opts.count_smoothing = o.count_smoothing;
            if let Some(v) = o.simplified_extensions {
                opts.simplified_extensions = v;
            }
            if let Some(v) = o.estimate_from_applied_control {
                opts.estimate_from_applied_control = v;
            }
            if let Some(v) = o.wall_zone_pressure {
                opts.wall_zone_pressure = v;
            }
        }
        opts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zone_src() -> String {
        r#"
schema_version = 1
seed = 7

[world]
dimension = 2
dt_s = 0.1
total_time_s = 100.0
model = "zone"
measurement = "bearing"
v_desired_mps = 3.0
bounds_min_m = [0.0, 0.0]
bounds_max_m = [50.0, 50.0]

[agents]
count = 10
informed = "all"

[agents.init]
pos_min_m = [0.0, 0.0]
pos_max_m = [10.0, 10.0]
vel_min_mps = [0.0, 0.0]
vel_max_mps = [1.0, 1.0]

[agents.zones]
repulsion_radius_m = 1.5
conflict_radius_m = 3.0
attraction_radius_m = 5.0
surveillance_radius_m = 6.0

[agents.weights]
separation = 5.0
cohesion = 0.75
alignment = 0.25
strategic = 5.0
avoidance = 5.0
speed = 5.0
gain = 1.0

[agents.limits]
v_max_mps = 4.0
u_max_mps2 = 2.0

[[aliens]]
start_pos_m = [30.0, 40.0]
max_speed_mps = 3.5
detection_radius_m = 9.0
containment_m = [[25.0, 35.0], [35.0, 35.0], [30.0, 45.0]]

[[obstacles]]
vertices_m = [[20.0, 15.0], [26.0, 17.0], [24.0, 23.0], [18.0, 21.0]]
"#
        .to_string()
    }

    #[test]
    fn parses_the_reference_zone_scenario() {
        let scn = parse_scenario(&zone_src(), &Overrides::default()).unwrap();
        assert_eq!(scn.agents.count, 10);
        assert_eq!(scn.world.model, Model::Zone);
        assert_eq!(scn.world.measurement, Measurement::Bearing);
        assert_eq!(scn.seed, 7);
        assert_eq!(scn.steps(), 1000);
        let z = scn.agents.zones.unwrap();
        assert_eq!(
            (z.repulsion_radius_m, z.conflict_radius_m, z.attraction_radius_m, z.surveillance_radius_m),
            (1.5, 3.0, 5.0, 6.0)
        );
        let w = scn.agents.weights.unwrap();
        assert_eq!(w.cohesion, 0.75);
        assert_eq!(w.alignment, 0.25);
        assert_eq!(scn.aliens.len(), 1);
        assert_eq!(scn.obstacles.len(), 1);
    }

    #[test]
    fn zone_ordering_violation_names_key_and_line() {
        let src = zone_src().replace("conflict_radius_m = 3.0", "conflict_radius_m = 1.0");
        let err = parse_scenario(&src, &Overrides::default()).unwrap_err();
        match err {
            ScenarioError::Invalid { key, line, reason } => {
                assert_eq!(key, "agents.zones.conflict_radius_m");
                let expected = src
                    .lines()
                    .position(|l| l.starts_with("conflict_radius_m"))
                    .unwrap()
                    + 1;
                assert_eq!(line, Some(expected));
                assert!(reason.contains("repulsion <= conflict"), "{reason}");
            }
            other => panic!("expected Invalid, got {other}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let src = zone_src().replace("v_desired_mps = 3.0", "v_desired_mps = 3.0\nwarp = 9.0");
        let err = parse_scenario(&src, &Overrides::default()).unwrap_err();
        assert!(matches!(err, ScenarioError::Parse(_)), "{err}");
        assert!(err.to_string().contains("warp"), "{err}");
    }

    #[test]
    fn model_override_demands_its_block() {
        let ov = Overrides { model: Some(Model::Simplified), ..Overrides::default() };
        let err = parse_scenario(&zone_src(), &ov).unwrap_err();
        assert!(err.to_string().contains("agents.simplified"), "{err}");
    }

    #[test]
    fn strict_mode_override_sets_both_flags() {
        let ov = Overrides { strict_paper_mode: true, ..Overrides::default() };
        let scn = parse_scenario(&zone_src(), &ov).unwrap();
        let opts = scn.step_options();
        assert!(opts.strict_velocity_bound);
        assert!(opts.strict_surveillance_band);
    }

    #[test]
    fn planar_features_reject_other_dimensions() {
        let src = zone_src()
            .replace("dimension = 2", "dimension = 3")
            .replace("pos_min_m = [0.0, 0.0]", "pos_min_m = [0.0, 0.0, 0.0]")
            .replace("pos_max_m = [10.0, 10.0]", "pos_max_m = [10.0, 10.0, 10.0]")
            .replace("vel_min_mps = [0.0, 0.0]", "vel_min_mps = [0.0, 0.0, 0.0]")
            .replace("vel_max_mps = [1.0, 1.0]", "vel_max_mps = [1.0, 1.0, 1.0]");
        let err = parse_scenario(&src, &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("dimension = 2"), "{err}");
    }

    #[test]
    fn alien_outside_containment_is_rejected() {
        let src = zone_src().replace("start_pos_m = [30.0, 40.0]", "start_pos_m = [1.0, 1.0]");
        let err = parse_scenario(&src, &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("outside the containment"), "{err}");
    }

    #[test]
    fn informed_ids_must_be_in_range() {
        let src = zone_src().replace("informed = \"all\"", "informed = [0, 10]");
        let err = parse_scenario(&src, &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("outside 0..10"), "{err}");
    }

    #[test]
    fn round_trips_through_serialization() {
        let scn = parse_scenario(&zone_src(), &Overrides::default()).unwrap();
        let text = scn.to_toml_string();
        let again = parse_scenario(&text, &Overrides::default()).unwrap();
        assert_eq!(scn, again);
    }

    #[test]
    fn options_block_overrides_step_defaults() {
        let src = zone_src()
            + r#"
[options]
wall_zone_pressure = true
triangle_alpha = 1.0
triangle_edge_probes = true
"#;
        let scn = parse_scenario(&src, &Overrides::default()).unwrap();
        let opts = scn.step_options();
        assert!(opts.wall_zone_pressure);
        assert!(opts.triangle_edge_probes);
        assert_eq!(opts.triangle_alpha, 1.0);
        // and the keys survive a write/parse cycle
        let again = parse_scenario(&scn.to_toml_string(), &Overrides::default()).unwrap();
        assert_eq!(scn, again);
        assert!(again.step_options().wall_zone_pressure);
    }

    #[test]
    fn builds_are_seed_deterministic() {
        let scn = parse_scenario(&zone_src(), &Overrides::default()).unwrap();
        let (a, b) = (scn.build().unwrap(), scn.build().unwrap());
        let (AnyWorld::D2(a), AnyWorld::D2(b)) = (a, b) else {
            panic!("expected planar worlds")
        };
        for (x, y) in a.agents.iter().zip(&b.agents) {
            assert_eq!(x.pos, y.pos);
            assert_eq!(x.vel, y.vel);
            assert!(x.informed);
        }
        let mut scn2 = scn.clone();
        scn2.seed = 8;
        let AnyWorld::D2(c) = scn2.build().unwrap() else { panic!() };
        assert!(a.agents.iter().zip(&c.agents).any(|(x, y)| x.pos != y.pos));
        // Sampled inside the configured box.
        for agent in &a.agents {
            assert!((0.0..10.0).contains(&agent.pos[0]));
            assert!((0.0..10.0).contains(&agent.pos[1]));
            assert!((0.0..1.0).contains(&agent.vel[0]));
        }
    }

    #[test]
    fn per_agent_overrides_apply() {
        let src = zone_src()
            + r#"
[[agents.per_agent]]
id = 3
informed = false
limits = { v_max_mps = 2.0, u_max_mps2 = 1.0 }
"#;
        let scn = parse_scenario(&src, &Overrides::default()).unwrap();
        let AnyWorld::D2(w) = scn.build().unwrap() else { panic!() };
        let a3 = w.agents.iter().find(|a| a.id == 3).unwrap();
        assert!(!a3.informed);
        assert_eq!(a3.weights.speed, 0.0);
        assert_eq!(a3.limits.v_max, 2.0);
        let a0 = w.agents.iter().find(|a| a.id == 0).unwrap();
        assert_eq!(a0.limits.v_max, 4.0);
        assert_eq!(a0.weights.speed, 5.0);
    }

    #[test]
    fn explicit_states_bypass_sampling() {
        let src = r#"
schema_version = 1

[world]
dimension = 2
dt_s = 0.1
total_time_s = 1.0
model = "simplified"
measurement = "bearing"
v_desired_mps = 0.0

[agents]
count = 2

[agents.limits]
v_max_mps = 100.0
u_max_mps2 = 100.0

[agents.simplified]
perception_radius_m = 10.0

[[agents.explicit]]
pos_m = [0.0, 0.0]
vel_mps = [0.0, 0.0]

[[agents.explicit]]
pos_m = [5.0, 0.0]
vel_mps = [0.0, 0.0]
"#;
        let scn = parse_scenario(src, &Overrides::default()).unwrap();
        let AnyWorld::D2(mut w) = scn.build().unwrap() else { panic!() };
        assert_eq!(w.agents[1].pos, Vector([5.0, 0.0]));
        let p = w.agents[0].simplified.unwrap();
        assert_eq!(p.beta, 0.1);
        assert_eq!(p.gain, 1.0);
        // The reference two-agent control check end to end.
        let u = w.step();
        assert_eq!(u[0], Vector([4.0, 0.0]));
    }
}

//! JSON-compatible config files for graphs and stacks.
//!
//! Potentials are written either as shorthand strings — `"zero"`,
//! `"const:v"`, `"well:depth,a,b"` (the well is `depth` on `[a, b]` inside
//! `[0, 1]`) — or as explicit `{"segments": [[len, value], ...]}`.
//!
//! A graph file looks like
//!
//! ```json
//! {
//!   "d": 2,
//!   "vertices": [{"id": "v1", "robin": 0.0}, {"id": "w", "dirichlet": true}],
//!   "edges": [{"tail": "v1", "head": "w", "shift": [1, 0],
//!              "potential": "well:-16,0.3333,0.6667"}]
//! }
//! ```
//!
//! and a stack file like
//!
//! ```json
//! {
//!   "layers": [
//!     {"shift": "A", "q": ["well:-16,0.3333,0.6667", "zero", "zero"],
//!      "alpha": [0, 0], "rotated": false},
//!     {"shift": "B", "q": ["well:-16,0.3333,0.6667", "zero", "zero"]}
//!   ],
//!   "connectors": [{"q": ["zero"]}]
//! }
//! ```
//!
//! Aligned junctions take two connector potentials (one per vertex
//! color), shifted junctions take one. Unknown keys are errors.

use crate::edge::Potential;
use crate::error::{QgError, Result};
use crate::graph::{PeriodicGraph, VertexCondition};
use crate::graphene::{Coupling, LayerSpec, Shift, StackSpec};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PotentialSpec {
    Shorthand(String),
    Segments { segments: Vec<(f64, f64)> },
}

impl PotentialSpec {
    fn build(&self) -> Result<Potential> {
        match self {
            PotentialSpec::Segments { segments } => Potential::new(segments.clone()),
            PotentialSpec::Shorthand(text) => parse_shorthand(text),
        }
    }
}

fn parse_shorthand(text: &str) -> Result<Potential> {
    if text == "zero" {
        return Ok(Potential::zero(1.0));
    }
    if let Some(rest) = text.strip_prefix("const:") {
        let v: f64 = rest
            .parse()
            .map_err(|_| QgError::Config(format!("bad constant value in potential '{text}'")))?;
        return Ok(Potential::constant(v, 1.0));
    }
    if let Some(rest) = text.strip_prefix("well:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 3 {
            return Err(QgError::Config(format!(
                "potential '{text}' needs depth,a,b"
            )));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|_| QgError::Config(format!("bad number '{p}' in potential '{text}'")))
            })
            .collect::<Result<_>>()?;
        return Potential::well(nums[0], nums[1], nums[2]);
    }
    Err(QgError::Config(format!(
        "unknown potential shorthand '{text}' (expected zero, const:v, well:depth,a,b or segments)"
    )))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphConfig {
    d: usize,
    vertices: Vec<VertexConfig>,
    edges: Vec<EdgeConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexConfig {
    id: String,
    #[serde(default)]
    robin: Option<f64>,
    #[serde(default)]
    dirichlet: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeConfig {
    tail: String,
    head: String,
    shift: Vec<i32>,
    potential: PotentialSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StackConfig {
    layers: Vec<LayerConfig>,
    connectors: Vec<ConnectorConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerConfig {
    shift: String,
    #[serde(default)]
    rotated: bool,
    q: [PotentialSpec; 3],
    #[serde(default)]
    alpha: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnectorConfig {
    q: Vec<PotentialSpec>,
}

/// A parsed config file: either a raw periodic graph or a declarative
/// stack.
#[derive(Debug, Clone)]
pub enum ParsedConfig {
    Graph(PeriodicGraph),
    Stack(StackSpec),
}

/// Parses a config from text, detecting the kind by its top-level keys.
/// Stacks are validated (shape and layer isospectrality) before being
/// returned.
pub fn parse_config_str(text: &str) -> Result<ParsedConfig> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| QgError::Config(format!("not valid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| QgError::Config("top level must be an object".into()))?;
    if obj.contains_key("layers") {
        let cfg: StackConfig = serde_json::from_value(value.clone())
            .map_err(|e| QgError::Config(format!("bad stack config: {e}")))?;
        let ss = build_stack(cfg)?;
        ss.validate()?;
        Ok(ParsedConfig::Stack(ss))
    } else if obj.contains_key("vertices") {
        let cfg: GraphConfig = serde_json::from_value(value.clone())
            .map_err(|e| QgError::Config(format!("bad graph config: {e}")))?;
        Ok(ParsedConfig::Graph(build_graph(cfg)?))
    } else {
        Err(QgError::Config(
            "config must contain either \"layers\" (stack) or \"vertices\" (graph)".into(),
        ))
    }
}

/// Parses a config file from disk.
pub fn parse_config(path: &Path) -> Result<ParsedConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| QgError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}

fn build_graph(cfg: GraphConfig) -> Result<PeriodicGraph> {
    let mut g = PeriodicGraph::new(cfg.d);
    for v in &cfg.vertices {
        let condition = match (v.robin, v.dirichlet) {
            (Some(alpha), None) | (Some(alpha), Some(false)) => VertexCondition::Robin(alpha),
            (None, Some(true)) => VertexCondition::Dirichlet,
            (None, None) => VertexCondition::Robin(0.0),
            _ => {
                return Err(QgError::Config(format!(
                    "vertex '{}' must have either \"robin\" or \"dirichlet\": true",
                    v.id
                )))
            }
        };
        if g.vertex_by_name(&v.id).is_some() {
            return Err(QgError::Config(format!("duplicate vertex id '{}'", v.id)));
        }
        g.add_vertex(v.id.clone(), condition);
    }
    for (i, e) in cfg.edges.iter().enumerate() {
        let tail = g
            .vertex_by_name(&e.tail)
            .ok_or_else(|| QgError::Config(format!("edge {i}: unknown tail '{}'", e.tail)))?;
        let head = g
            .vertex_by_name(&e.head)
            .ok_or_else(|| QgError::Config(format!("edge {i}: unknown head '{}'", e.head)))?;
        if e.shift.len() != cfg.d {
            return Err(QgError::Config(format!(
                "edge {i}: shift {:?} has wrong dimension (graph is {}-periodic)",
                e.shift, cfg.d
            )));
        }
        g.add_edge(tail, head, e.shift.clone(), e.potential.build()?)?;
    }
    let report = g.validate();
    if !report.is_valid() {
        return Err(QgError::Config(report.errors.join("; ")));
    }
    Ok(g)
}

fn build_stack(cfg: StackConfig) -> Result<StackSpec> {
    let mut layers = Vec::with_capacity(cfg.layers.len());
    for (i, l) in cfg.layers.iter().enumerate() {
        let shift = match l.shift.as_str() {
            "A" | "a" => Shift::A,
            "B" | "b" => Shift::B,
            "C" | "c" => Shift::C,
            other => {
                return Err(QgError::Config(format!(
                    "layer {i}: unknown shift '{other}' (expected A, B or C)"
                )))
            }
        };
        let q = [l.q[0].build()?, l.q[1].build()?, l.q[2].build()?];
        let alpha = l.alpha.unwrap_or([0.0, 0.0]);
        layers.push((
            LayerSpec::new(q, (alpha[0], alpha[1]), l.rotated)?,
            shift,
        ));
    }
    let mut connectors = Vec::with_capacity(cfg.connectors.len());
    for (i, c) in cfg.connectors.iter().enumerate() {
        match c.q.len() {
            1 => connectors.push(Coupling::Single { q: c.q[0].build()? }),
            2 => connectors.push(Coupling::PerColor {
                color1: c.q[0].build()?,
                color2: c.q[1].build()?,
            }),
            n => {
                return Err(QgError::Config(format!(
                    "connector {i}: expected 1 or 2 potentials, got {n}"
                )))
            }
        }
    }
    Ok(StackSpec { layers, connectors })
}

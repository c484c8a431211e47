//! The periodic quantum-graph data model and the three graph surgeries:
//! Dirichlet severing of a vertex orbit, the single-vertex join of two
//! periodic graphs, and edge subdivision (inserting an artificial Neumann
//! vertex, which relocates poles of the dispersion function).
//!
//! Graphs are immutable; surgeries return new graphs.

use crate::edge::Potential;
use crate::error::{QgError, Result};

/// Vertex condition: `sum f'(v) = alpha f(v)` over incident edges (Robin;
/// Kirchhoff/Neumann when `alpha = 0`), or the Dirichlet condition
/// `f(v) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VertexCondition {
    Robin(f64),
    Dirichlet,
}

impl VertexCondition {
    pub fn is_dirichlet(&self) -> bool {
        matches!(self, VertexCondition::Dirichlet)
    }
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub name: String,
    pub condition: VertexCondition,
}

/// A directed edge of the fundamental domain: the x-interval `[0, L]` runs
/// from `tail` (x = 0) to the copy of `head` shifted by `shift` (x = L).
/// The orientation matters: the spectral-matrix assembly places the
/// cosine-type term at the tail end and its dual at the head end, and layer
/// rotation reverses potentials.
#[derive(Debug, Clone)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub shift: Vec<i32>,
    pub potential: Potential,
}

impl Edge {
    pub fn length(&self) -> f64 {
        self.potential.total_length()
    }

    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// A d-periodic metric graph with Schrödinger data: a finite fundamental
/// domain of vertices (Robin parameter or Dirichlet flag) and directed
/// edges carrying a shift vector in Z^d and a potential.
#[derive(Debug, Clone)]
pub struct PeriodicGraph {
    d: usize,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

/// Specification of a single-vertex join: vertex `v1` of the first graph is
/// identified with vertex `v2` of the second; the merged Robin parameter is
/// `alpha1 + alpha2` unless overridden.
#[derive(Debug, Clone, Copy)]
pub struct JoinSpec {
    pub v1: usize,
    pub v2: usize,
    pub alpha_override: Option<f64>,
}

/// Outcome of `validate`: hard errors make the graph unusable; warnings
/// flag legal but degenerate situations.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }
}

impl PeriodicGraph {
    pub fn new(d: usize) -> Self {
        Self {
            d,
            vertices: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Adds a vertex and returns its id.
    pub fn add_vertex(&mut self, name: impl Into<String>, condition: VertexCondition) -> usize {
        self.vertices.push(Vertex {
            name: name.into(),
            condition,
        });
        self.vertices.len() - 1
    }

    /// Adds a directed edge and returns its id.
    pub fn add_edge(
        &mut self,
        tail: usize,
        head: usize,
        shift: Vec<i32>,
        potential: Potential,
    ) -> Result<usize> {
        if tail >= self.vertices.len() {
            return Err(QgError::UnknownVertex(tail));
        }
        if head >= self.vertices.len() {
            return Err(QgError::UnknownVertex(head));
        }
        if shift.len() != self.d {
            return Err(QgError::DimensionMismatch(shift.len(), self.d));
        }
        self.edges.push(Edge {
            tail,
            head,
            shift,
            potential,
        });
        Ok(self.edges.len() - 1)
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.name == name)
    }

    /// Checks the structural invariants and reports findings.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.vertices.is_empty() {
            report.errors.push("graph has no vertices".into());
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.tail >= self.vertices.len() {
                report
                    .errors
                    .push(format!("edge {i} references missing tail vertex {}", e.tail));
            }
            if e.head >= self.vertices.len() {
                report
                    .errors
                    .push(format!("edge {i} references missing head vertex {}", e.head));
            }
            if !(e.length() > 0.0) {
                report
                    .errors
                    .push(format!("edge {i} has non-positive length {}", e.length()));
            }
            if e.shift.len() != self.d {
                report.errors.push(format!(
                    "edge {i} has a shift of dimension {} in a {}-periodic graph",
                    e.shift.len(),
                    self.d
                ));
            }
        }
        let mut touched = vec![false; self.vertices.len()];
        for e in &self.edges {
            if e.tail < touched.len() {
                touched[e.tail] = true;
            }
            if e.head < touched.len() {
                touched[e.head] = true;
            }
        }
        for (i, t) in touched.iter().enumerate() {
            if !t {
                report
                    .warnings
                    .push(format!("vertex {i} ({}) is isolated", self.vertices[i].name));
            }
        }
        if !self.vertices.is_empty() && self.vertices.iter().all(|v| v.condition.is_dirichlet()) {
            report.warnings.push(
                "all vertices carry the Dirichlet condition; the spectral matrix is empty and \
                 the dispersion reduces to the product of edge spectral functions"
                    .into(),
            );
        }
        report
    }

    /// Replaces the condition at the orbit of `v` with Dirichlet, severing
    /// the graph there in the spectral sense. Topology and edge ids are
    /// unchanged; applying it twice is idempotent.
    pub fn dirichlet_at_orbit(&self, v: usize) -> Result<Self> {
        if v >= self.vertices.len() {
            return Err(QgError::UnknownVertex(v));
        }
        let mut g = self.clone();
        g.vertices[v].condition = VertexCondition::Dirichlet;
        Ok(g)
    }

    /// Disjoint union of two d-periodic graphs with `v1` of `self`
    /// identified with `v2` of `other`. The merged vertex keeps the sum of
    /// the two Robin parameters unless `alpha_override` replaces it. Vertex
    /// ids of `self` are preserved; ids of `other` are appended except for
    /// `v2`, which maps onto `v1`.
    pub fn single_vertex_join(&self, other: &Self, js: JoinSpec) -> Result<Self> {
        if self.d != other.d {
            return Err(QgError::DimensionMismatch(self.d, other.d));
        }
        if js.v1 >= self.vertices.len() {
            return Err(QgError::UnknownVertex(js.v1));
        }
        if js.v2 >= other.vertices.len() {
            return Err(QgError::UnknownVertex(js.v2));
        }
        let alpha1 = match self.vertices[js.v1].condition {
            VertexCondition::Robin(a) => a,
            VertexCondition::Dirichlet => return Err(QgError::DirichletJoinPoint(js.v1)),
        };
        let alpha2 = match other.vertices[js.v2].condition {
            VertexCondition::Robin(a) => a,
            VertexCondition::Dirichlet => return Err(QgError::DirichletJoinPoint(js.v2)),
        };

        let mut g = self.clone();
        let merged = js.alpha_override.unwrap_or(alpha1 + alpha2);
        g.vertices[js.v1].condition = VertexCondition::Robin(merged);
        g.vertices[js.v1].name = format!(
            "{}+{}",
            self.vertices[js.v1].name, other.vertices[js.v2].name
        );

        // Map other's vertex ids into the union.
        let mut map = Vec::with_capacity(other.vertices.len());
        for (i, v) in other.vertices.iter().enumerate() {
            if i == js.v2 {
                map.push(js.v1);
            } else {
                map.push(g.vertices.len());
                g.vertices.push(v.clone());
            }
        }
        for e in &other.edges {
            g.edges.push(Edge {
                tail: map[e.tail],
                head: map[e.head],
                shift: e.shift.clone(),
                potential: e.potential.clone(),
            });
        }
        Ok(g)
    }

    /// Replaces edge `e` by two edges meeting at a new Robin(0) vertex at
    /// the interior point `t * L`. The first part keeps the tail and shift
    /// 0; the second part carries the original shift, so the composed
    /// translation is unchanged. The potential is split at the cut.
    pub fn subdivide_edge(&self, e: usize, t: f64) -> Result<Self> {
        if e >= self.edges.len() {
            return Err(QgError::UnknownEdge(e));
        }
        if !(t > 0.0 && t < 1.0) {
            return Err(QgError::BoundaryT(t));
        }
        let edge = self.edges[e].clone();
        let cut = t * edge.length();
        let (first, second) = edge.potential.split_at(cut)?;
        let mut g = self.clone();
        let mid = g.add_vertex(format!("dot[{e}@{t}]"), VertexCondition::Robin(0.0));
        g.edges[e] = Edge {
            tail: edge.tail,
            head: mid,
            shift: vec![0; self.d],
            potential: first,
        };
        g.edges.push(Edge {
            tail: mid,
            head: edge.head,
            shift: edge.shift,
            potential: second,
        });
        Ok(g)
    }
}

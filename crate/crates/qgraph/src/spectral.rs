//! Assembly of the spectral matrix of a periodic quantum graph at a fixed
//! energy, dispersion functions as Laurent polynomials, pointwise numeric
//! evaluation, and spectrum scans over an energy window.
//!
//! The matrix is indexed by the non-Dirichlet vertices of the fundamental
//! domain. For an edge from `v` (x = 0) to the `g`-shifted copy of `w`
//! (x = L) with transfer data `(c, s, c', s')`:
//!
//! - both ends Robin, `v != w`: add `-c/s` at (v,v), `-s'/s` at (w,w),
//!   `z^g/s` at (v,w), `z^{-g}/s` at (w,v);
//! - a loop (`v == w`): add `(z^g + z^{-g} - c - s')/s` at (v,v);
//! - head Dirichlet: only `-c/s` at (v,v); tail Dirichlet: only `-s'/s`
//!   at (w,w);
//! - both ends Dirichlet: the edge contributes no matrix entry, and the
//!   dispersion function attains an extra scalar factor `s(lambda)`,
//!   tracked separately.
//!
//! Finally `-alpha_v` is added on the diagonal for each Robin vertex.

use crate::edge::{transfer_matrix, EdgeSpectralData};
use crate::error::{QgError, Result};
use crate::graph::PeriodicGraph;
use crate::laurent::{self, LaurentPoly};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// The spectral matrix at a fixed energy, with Laurent-polynomial entries.
#[derive(Debug, Clone)]
pub struct SpectralMatrix {
    pub lambda: f64,
    /// Row/column index for each graph vertex (None for Dirichlet vertices).
    pub vertex_index: Vec<Option<usize>>,
    /// Graph vertex id for each row.
    pub rows: Vec<usize>,
    pub entries: Vec<Vec<LaurentPoly>>,
    /// `(edge id, s(lambda))` for edges with both endpoints Dirichlet;
    /// these multiply the dispersion function as scalars.
    pub extra_s_factors: Vec<(usize, f64)>,
}

/// Pole tolerance used by refinement paths: evaluation stays meaningful
/// much closer to a Dirichlet eigenvalue than the sweep-skip tolerance.
pub(crate) const REFINE_POLE_TOL: f64 = 1e-13;

/// Edge ids whose Dirichlet spectral function vanishes (within tolerance)
/// at `lambda`.
pub fn pole_edges(g: &PeriodicGraph, lambda: f64) -> Vec<usize> {
    g.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| transfer_matrix(&e.potential, lambda).is_pole())
        .map(|(i, _)| i)
        .collect()
}

/// Per-edge transfer data for a graph at a fixed energy, reused across
/// evaluation points. Construction fails with `PoleAtLambda` if any edge
/// has `|s(lambda)|` below tolerance.
pub struct EvaluatedGraph<'g> {
    pub graph: &'g PeriodicGraph,
    pub lambda: f64,
    pub edge_data: Vec<EdgeSpectralData>,
}

impl<'g> EvaluatedGraph<'g> {
    pub fn new(graph: &'g PeriodicGraph, lambda: f64) -> Result<Self> {
        Self::with_tolerance(graph, lambda, crate::edge::POLE_TOL)
    }

    /// Like `new` with an explicit pole tolerance. Edge refinement
    /// evaluates very close to Dirichlet eigenvalues (band edges often sit
    /// exactly on them), so it uses a far tighter tolerance than sweeps.
    pub fn with_tolerance(graph: &'g PeriodicGraph, lambda: f64, tol: f64) -> Result<Self> {
        let edge_data: Vec<EdgeSpectralData> = g_edge_data(graph, lambda);
        let poles: Vec<usize> = edge_data
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_pole_with(tol))
            .map(|(i, _)| i)
            .collect();
        if !poles.is_empty() {
            return Err(QgError::PoleAtLambda {
                lambda,
                edges: poles,
            });
        }
        Ok(Self {
            graph,
            lambda,
            edge_data,
        })
    }

    fn row_map(&self) -> (Vec<Option<usize>>, Vec<usize>) {
        row_map(self.graph)
    }

    /// The spectral matrix with Laurent-polynomial entries.
    pub fn matrix(&self) -> SpectralMatrix {
        let (vertex_index, rows) = self.row_map();
        let n = rows.len();
        let d = self.graph.d();
        let mut entries = vec![vec![LaurentPoly::zero(d); n]; n];
        let mut extra = Vec::new();

        for (eid, (e, t)) in self
            .graph
            .edges()
            .iter()
            .zip(&self.edge_data)
            .enumerate()
        {
            let inv_s = 1.0 / t.s;
            let vi = vertex_index[e.tail];
            let wi = vertex_index[e.head];
            let neg_shift: Vec<i32> = e.shift.iter().map(|x| -x).collect();
            match (vi, wi) {
                (Some(v), Some(w)) if v == w => {
                    let mut add = LaurentPoly::monomial(d, &e.shift, inv_s);
                    add = add
                        .add(&LaurentPoly::monomial(d, &neg_shift, inv_s))
                        .unwrap()
                        .add(&LaurentPoly::constant(d, -(t.c + t.sp) * inv_s))
                        .unwrap();
                    entries[v][v] = entries[v][v].add(&add).unwrap();
                }
                (Some(v), Some(w)) => {
                    entries[v][v] = entries[v][v]
                        .add(&LaurentPoly::constant(d, -t.c * inv_s))
                        .unwrap();
                    entries[w][w] = entries[w][w]
                        .add(&LaurentPoly::constant(d, -t.sp * inv_s))
                        .unwrap();
                    entries[v][w] = entries[v][w]
                        .add(&LaurentPoly::monomial(d, &e.shift, inv_s))
                        .unwrap();
                    entries[w][v] = entries[w][v]
                        .add(&LaurentPoly::monomial(d, &neg_shift, inv_s))
                        .unwrap();
                }
                (Some(v), None) => {
                    entries[v][v] = entries[v][v]
                        .add(&LaurentPoly::constant(d, -t.c * inv_s))
                        .unwrap();
                }
                (None, Some(w)) => {
                    entries[w][w] = entries[w][w]
                        .add(&LaurentPoly::constant(d, -t.sp * inv_s))
                        .unwrap();
                }
                (None, None) => {
                    extra.push((eid, t.s));
                }
            }
        }

        for (row, &vid) in rows.iter().enumerate() {
            if let crate::graph::VertexCondition::Robin(alpha) =
                self.graph.vertices()[vid].condition
            {
                if alpha != 0.0 {
                    entries[row][row] = entries[row][row]
                        .add(&LaurentPoly::constant(d, -alpha))
                        .unwrap();
                }
            }
        }

        SpectralMatrix {
            lambda: self.lambda,
            vertex_index,
            rows,
            entries,
            extra_s_factors: extra,
        }
    }

    /// Numeric spectral matrix at the point `z`, mirroring `matrix()`.
    pub fn matrix_at(&self, z: &[Complex64]) -> Result<DMatrix<Complex64>> {
        let d = self.graph.d();
        if z.len() != d {
            return Err(QgError::DimensionMismatch(z.len(), d));
        }
        if let Some(i) = z.iter().position(|v| v.norm() == 0.0) {
            return Err(QgError::ZeroEvaluationPoint(i));
        }
        let (vertex_index, rows) = self.row_map();
        let n = rows.len();
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for (e, t) in self.graph.edges().iter().zip(&self.edge_data) {
            let inv_s = Complex64::new(1.0 / t.s, 0.0);
            let zg: Complex64 = z
                .iter()
                .zip(&e.shift)
                .map(|(zi, &gi)| zi.powi(gi))
                .product();
            let vi = vertex_index[e.tail];
            let wi = vertex_index[e.head];
            match (vi, wi) {
                (Some(v), Some(w)) if v == w => {
                    m[(v, v)] += (zg + zg.inv() - t.c - t.sp) * inv_s;
                }
                (Some(v), Some(w)) => {
                    m[(v, v)] -= t.c * inv_s;
                    m[(w, w)] -= t.sp * inv_s;
                    m[(v, w)] += zg * inv_s;
                    m[(w, v)] += zg.inv() * inv_s;
                }
                (Some(v), None) => m[(v, v)] -= t.c * inv_s,
                (None, Some(w)) => m[(w, w)] -= t.sp * inv_s,
                (None, None) => {}
            }
        }
        for (row, &vid) in rows.iter().enumerate() {
            if let crate::graph::VertexCondition::Robin(alpha) =
                self.graph.vertices()[vid].condition
            {
                m[(row, row)] -= Complex64::new(alpha, 0.0);
            }
        }
        Ok(m)
    }

    /// Scalar product of the Dirichlet spectral values of both-Dirichlet
    /// edges, which multiplies the determinant.
    pub fn extra_factor(&self) -> f64 {
        let (vertex_index, _) = self.row_map();
        self.graph
            .edges()
            .iter()
            .zip(&self.edge_data)
            .filter(|(e, _)| vertex_index[e.tail].is_none() && vertex_index[e.head].is_none())
            .map(|(_, t)| t.s)
            .product()
    }

    /// Numeric dispersion value at `z` (determinant times extra factors).
    pub fn dispersion_at(&self, z: &[Complex64]) -> Result<Complex64> {
        let m = self.matrix_at(z)?;
        let det = if m.nrows() == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            m.lu().determinant()
        };
        Ok(det * self.extra_factor())
    }
}

fn g_edge_data(g: &PeriodicGraph, lambda: f64) -> Vec<EdgeSpectralData> {
    g.edges()
        .iter()
        .map(|e| transfer_matrix(&e.potential, lambda))
        .collect()
}

fn row_map(g: &PeriodicGraph) -> (Vec<Option<usize>>, Vec<usize>) {
    let mut vertex_index = vec![None; g.vertices().len()];
    let mut rows = Vec::new();
    for (i, v) in g.vertices().iter().enumerate() {
        if !v.condition.is_dirichlet() {
            vertex_index[i] = Some(rows.len());
            rows.push(i);
        }
    }
    (vertex_index, rows)
}

/// The spectral matrix of `g` at `lambda`.
pub fn spectral_matrix(g: &PeriodicGraph, lambda: f64) -> Result<SpectralMatrix> {
    Ok(EvaluatedGraph::new(g, lambda)?.matrix())
}

/// The dispersion function of `g` at `lambda` as a Laurent polynomial:
/// determinant of the spectral matrix times the extra Dirichlet-edge
/// factors.
pub fn dispersion(g: &PeriodicGraph, lambda: f64) -> Result<LaurentPoly> {
    dispersion_with_tolerance(g, lambda, crate::edge::POLE_TOL)
}

pub(crate) fn dispersion_with_tolerance(
    g: &PeriodicGraph,
    lambda: f64,
    tol: f64,
) -> Result<LaurentPoly> {
    let eg = EvaluatedGraph::with_tolerance(g, lambda, tol)?;
    let sm = eg.matrix();
    let det = if sm.rows.is_empty() {
        LaurentPoly::constant(g.d(), 1.0)
    } else {
        laurent::det(&sm.entries)?
    };
    let factor: f64 = sm.extra_s_factors.iter().map(|&(_, s)| s).product();
    Ok(det.scale(factor))
}

/// Numeric dispersion value at a single `(z, lambda)` point.
pub fn dispersion_at(g: &PeriodicGraph, lambda: f64, z: &[Complex64]) -> Result<Complex64> {
    EvaluatedGraph::new(g, lambda)?.dispersion_at(z)
}

/// Result of a spectrum scan: merged band intervals and the pole energies
/// that were skipped.
#[derive(Debug, Clone)]
pub struct BandScan {
    pub bands: Vec<(f64, f64)>,
    pub skipped_poles: Vec<f64>,
}

/// Scans the energy window on a uniform grid and returns the spectral
/// bands: the closure of the set of energies where the dispersion function
/// vanishes somewhere on the torus. The evaluated dispersion is real on
/// the torus (Hermitian matrix), so `lambda` is in the spectrum iff the
/// minimum and maximum of the real values straddle zero; band edges are
/// refined by interval halving to 1e-8.
pub fn spectrum_scan(
    g: &PeriodicGraph,
    window: (f64, f64),
    step: f64,
    torus_grid: usize,
) -> Result<BandScan> {
    assert!(torus_grid >= 8, "torus grid too coarse");
    assert!(step > 0.0 && window.1 > window.0);
    let nsteps = ((window.1 - window.0) / step).round() as usize;
    let mut skipped = Vec::new();
    let status = |lam: f64| -> Option<bool> { in_spectrum(g, lam, torus_grid) };

    let mut samples: Vec<(f64, Option<bool>)> = Vec::with_capacity(nsteps + 1);
    for i in 0..=nsteps {
        let lam = window.0 + step * i as f64;
        let s = status(lam);
        if s.is_none() {
            skipped.push(lam);
        }
        samples.push((lam, s));
    }

    let refine = |inside: f64, outside: f64| -> f64 {
        let mut a = inside;
        let mut b = outside;
        while (b - a).abs() > 1e-8 {
            let mut m = 0.5 * (a + b);
            let mut st = status(m);
            if st.is_none() {
                // Nudge off the pole; pole positions carry no band edge.
                m += (b - a) * 1e-3;
                st = status(m);
            }
            match st {
                Some(true) => a = m,
                _ => b = m,
            }
        }
        0.5 * (a + b)
    };

    let mut bands: Vec<(f64, f64)> = Vec::new();
    let mut run_start: Option<f64> = None;
    let mut prev: Option<(f64, Option<bool>)> = None;
    for &(lam, st) in &samples {
        match (run_start, st) {
            (None, Some(true)) => {
                let lo = match prev {
                    Some((plam, Some(false))) => refine(lam, plam),
                    Some((plam, None)) => refine(lam, plam),
                    _ => lam,
                };
                run_start = Some(lo);
            }
            (Some(lo), Some(false)) => {
                let hi = refine(prev.unwrap().0, lam);
                bands.push((lo, hi));
                run_start = None;
            }
            // Poles inside a run do not terminate it: representation
            // artifacts carry no spectral content by themselves.
            _ => {}
        }
        prev = Some((lam, st));
    }
    if let Some(lo) = run_start {
        bands.push((lo, window.1));
    }
    Ok(BandScan {
        bands,
        skipped_poles: skipped,
    })
}

/// Whether `lambda` belongs to the spectrum, or `None` if the energy is a
/// pole of the representation. All grid-local extrema of the torus values
/// are polished by pattern search: when two components nearly coincide the
/// sign-change region is a thin sliver that a single-start polish misses.
fn in_spectrum(g: &PeriodicGraph, lambda: f64, torus_grid: usize) -> Option<bool> {
    let eg = EvaluatedGraph::with_tolerance(g, lambda, REFINE_POLE_TOL).ok()?;
    let d = g.d();
    let value = |k: &[f64]| -> f64 {
        let z: Vec<Complex64> = k.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
        eg.dispersion_at(&z).map(|v| v.re).unwrap_or(f64::NAN)
    };

    let total = torus_grid.pow(d as u32);
    let mut values = vec![0.0f64; total];
    let mut k = vec![0.0; d];
    let point = |flat: usize, k: &mut [f64]| {
        let mut rem = flat;
        for kv in k.iter_mut() {
            *kv = 2.0 * std::f64::consts::PI * (rem % torus_grid) as f64 / torus_grid as f64;
            rem /= torus_grid;
        }
    };
    for (flat, slot) in values.iter_mut().enumerate() {
        point(flat, &mut k);
        *slot = value(&k);
    }
    let min_v = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max_v = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min_v <= 0.0 && max_v >= 0.0 {
        return Some(true);
    }
    let scale = min_v.abs().max(max_v.abs()).max(1e-300);
    let step = 2.0 * std::f64::consts::PI / torus_grid as f64;

    // All values have one sign; polish every grid-local extremum of the
    // relevant sign toward zero.
    let toward_zero: Box<dyn Fn(&[f64]) -> f64> = if min_v > 0.0 {
        Box::new(value)
    } else {
        Box::new(move |k: &[f64]| -value(k))
    };
    let neighbors = |flat: usize| -> Vec<usize> {
        let mut idx = vec![0usize; d];
        let mut rem = flat;
        for i in idx.iter_mut() {
            *i = rem % torus_grid;
            rem /= torus_grid;
        }
        let mut out = Vec::with_capacity(2 * d);
        for v in 0..d {
            for delta in [torus_grid - 1, 1] {
                let mut j = idx.clone();
                j[v] = (j[v] + delta) % torus_grid;
                out.push(j.iter().rev().fold(0, |acc, &x| acc * torus_grid + x));
            }
        }
        out
    };
    let signed = |flat: usize| {
        if min_v > 0.0 {
            values[flat]
        } else {
            -values[flat]
        }
    };
    for flat in 0..total {
        if neighbors(flat).iter().all(|&n| signed(flat) <= signed(n)) {
            point(flat, &mut k);
            let polished = pattern_search_min(toward_zero.as_ref(), &mut k, step);
            if polished <= 1e-11 * scale {
                return Some(true);
            }
        }
    }
    Some(false)
}

/// Coordinate pattern search minimizer on the torus; returns the final
/// function value.
pub(crate) fn pattern_search_min(f: &dyn Fn(&[f64]) -> f64, k: &mut [f64], mut step: f64) -> f64 {
    let mut best = f(k);
    while step > 1e-10 {
        let mut improved = false;
        for i in 0..k.len() {
            for dir in [-1.0, 1.0] {
                let old = k[i];
                k[i] = old + dir * step;
                let v = f(k);
                if v < best {
                    best = v;
                    improved = true;
                } else {
                    k[i] = old;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

//! Builders for single and stacked hexagonal (graphene-type) quantum
//! graphs, characteristic curves, band tables, conical-point detection,
//! and dispersion-surface sampling.
//!
//! A layer is a 2-periodic bipartite graph with two vertices and three
//! edges of length 1 per fundamental domain, all oriented from the first
//! vertex to the second, with shifts (0,0), (1,0), (0,1). Stacks couple
//! layers by vertical edges: layers at the same shift are coupled at both
//! vertex colors, layers one shift step apart at the single vertically
//! aligned pair.

use crate::edge::{transfer_matrix, Potential};
use crate::error::{QgError, Result};
use crate::graph::{PeriodicGraph, VertexCondition};
use crate::laurent::LaurentPoly;
use crate::reduce::{type2_characteristic, zeta_components, Type2Layer, Type2Spec};
use crate::spectral::dispersion;
use num_complex::Complex64;
use std::f64::consts::PI;

/// One layer: three edge potentials, the two Robin parameters, and
/// whether the layer is rotated by 180 degrees (which reverses each
/// potential and swaps the Robin parameters).
#[derive(Debug, Clone)]
pub struct LayerSpec {
    pub potentials: [Potential; 3],
    pub robin: (f64, f64),
    pub rotated: bool,
}

impl LayerSpec {
    pub fn new(potentials: [Potential; 3], robin: (f64, f64), rotated: bool) -> Result<Self> {
        for (i, q) in potentials.iter().enumerate() {
            if (q.total_length() - 1.0).abs() > 1e-12 {
                return Err(QgError::InvalidPotential(format!(
                    "layer edge {i} has length {}, expected 1",
                    q.total_length()
                )));
            }
        }
        Ok(Self {
            potentials,
            robin,
            rotated,
        })
    }

    /// The same potential on all three edges, Kirchhoff vertices.
    pub fn uniform(q: Potential) -> Self {
        Self::new([q.clone(), q.clone(), q], (0.0, 0.0), false).expect("length-1 potential")
    }

    /// Potentials after applying the rotation flag.
    pub fn effective_potentials(&self) -> [Potential; 3] {
        if self.rotated {
            [
                self.potentials[0].reversed(),
                self.potentials[1].reversed(),
                self.potentials[2].reversed(),
            ]
        } else {
            self.potentials.clone()
        }
    }

    /// Robin parameters after applying the rotation flag.
    pub fn effective_robin(&self) -> (f64, f64) {
        if self.rotated {
            (self.robin.1, self.robin.0)
        } else {
            self.robin
        }
    }
}

/// Horizontal placement of a layer: unshifted, or offset by one resp. two
/// thirds of the diagonal period vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shift {
    A,
    B,
    C,
}

impl Shift {
    pub fn value(self) -> u8 {
        match self {
            Shift::A => 0,
            Shift::B => 1,
            Shift::C => 2,
        }
    }
}

/// Vertical coupling between two successive layers. Layers at the same
/// shift align at both vertex colors and take one connector edge per
/// color; layers one shift step apart align at a single vertex pair.
#[derive(Debug, Clone)]
pub enum Coupling {
    PerColor { color1: Potential, color2: Potential },
    Single { q: Potential },
}

/// A declarative multi-layer stack.
#[derive(Debug, Clone)]
pub struct StackSpec {
    pub layers: Vec<(LayerSpec, Shift)>,
    pub connectors: Vec<Coupling>,
}

impl StackSpec {
    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Relative shift (0, 1 or 2 thirds) between layers `j` and `j + 1`.
    fn relative_shift(&self, j: usize) -> u8 {
        (self.layers[j + 1].1.value() + 3 - self.layers[j].1.value()) % 3
    }

    /// Whether every junction couples identically shifted layers.
    pub fn is_pure_aligned(&self) -> bool {
        (0..self.layers.len().saturating_sub(1)).all(|j| self.relative_shift(j) == 0)
    }

    fn check_shape(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(QgError::Config("stack has no layers".into()));
        }
        if self.connectors.len() + 1 != self.layers.len() {
            return Err(QgError::Config(format!(
                "{} layers need {} connectors, got {}",
                self.layers.len(),
                self.layers.len() - 1,
                self.connectors.len()
            )));
        }
        for j in 0..self.connectors.len() {
            let rel = self.relative_shift(j);
            match (&self.connectors[j], rel) {
                (Coupling::PerColor { .. }, 0) | (Coupling::Single { .. }, 1 | 2) => {}
                (Coupling::PerColor { .. }, _) => {
                    return Err(QgError::Config(format!(
                        "junction {j} couples shifted layers and needs a single connector edge"
                    )))
                }
                (Coupling::Single { .. }, _) => {
                    return Err(QgError::Config(format!(
                        "junction {j} couples aligned layers and needs one connector per color"
                    )))
                }
            }
        }
        Ok(())
    }

    /// Checks that corresponding layer edges are Dirichlet-isospectral; the
    /// composite Floquet variable is then common to all layers.
    fn check_isospectrality(&self) -> Result<()> {
        let window = (-30.0, 150.0);
        let reference: Vec<Vec<f64>> = self.layers[0]
            .0
            .effective_potentials()
            .iter()
            .map(|q| crate::edge::dirichlet_zeros(q, window, 600))
            .collect();
        for (j, (layer, _)) in self.layers.iter().enumerate().skip(1) {
            for (e, q) in layer.effective_potentials().iter().enumerate() {
                let zeros = crate::edge::dirichlet_zeros(q, window, 600);
                let mismatch = if zeros.len() != reference[e].len() {
                    f64::INFINITY
                } else {
                    zeros
                        .iter()
                        .zip(&reference[e])
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                };
                if mismatch > 1e-7 {
                    return Err(QgError::IsospectralityViolation {
                        layer_a: 0,
                        layer_b: j,
                        edge: e,
                        mismatch,
                    });
                }
            }
        }
        Ok(())
    }

    /// Shape and isospectrality checks together; config loading and the
    /// builders run this before any spectral computation.
    pub fn validate(&self) -> Result<()> {
        self.check_shape()?;
        self.check_isospectrality()
    }

    /// Converts a fully aligned stack to the tridiagonal fast-path spec.
    pub fn to_type2(&self) -> Result<Type2Spec> {
        assert!(self.is_pure_aligned());
        let layers = self
            .layers
            .iter()
            .map(|(ls, _)| Type2Layer {
                potentials: ls.effective_potentials().to_vec(),
                alpha: ls.effective_robin(),
            })
            .collect();
        let mut c1 = Vec::new();
        let mut c2 = Vec::new();
        for coupling in &self.connectors {
            match coupling {
                Coupling::PerColor { color1, color2 } => {
                    c1.push(color1.clone());
                    c2.push(color2.clone());
                }
                Coupling::Single { .. } => unreachable!("aligned stack"),
            }
        }
        Type2Spec::new(layers, c1, c2)
    }
}

/// The 2-vertex, 3-edge hexagonal layer graph.
pub fn single_layer(ls: &LayerSpec) -> PeriodicGraph {
    let mut g = PeriodicGraph::new(2);
    let (a1, a2) = ls.effective_robin();
    let v1 = g.add_vertex("v1", VertexCondition::Robin(a1));
    let v2 = g.add_vertex("v2", VertexCondition::Robin(a2));
    let q = ls.effective_potentials();
    g.add_edge(v1, v2, vec![0, 0], q[0].clone()).unwrap();
    g.add_edge(v1, v2, vec![1, 0], q[1].clone()).unwrap();
    g.add_edge(v1, v2, vec![0, 1], q[2].clone()).unwrap();
    g
}

/// Assembles the full periodic graph of a stack: disjoint layers plus
/// vertical connector edges with shift (0,0). Vertex ids are
/// `2j` (first color of layer j) and `2j + 1` (second color).
pub fn stack(ss: &StackSpec) -> Result<PeriodicGraph> {
    ss.validate()?;
    let mut g = PeriodicGraph::new(2);
    for (j, (ls, _)) in ss.layers.iter().enumerate() {
        let (a1, a2) = ls.effective_robin();
        let v1 = g.add_vertex(format!("L{j}.v1"), VertexCondition::Robin(a1));
        let v2 = g.add_vertex(format!("L{j}.v2"), VertexCondition::Robin(a2));
        let q = ls.effective_potentials();
        g.add_edge(v1, v2, vec![0, 0], q[0].clone())?;
        g.add_edge(v1, v2, vec![1, 0], q[1].clone())?;
        g.add_edge(v1, v2, vec![0, 1], q[2].clone())?;
    }
    for (j, coupling) in ss.connectors.iter().enumerate() {
        let (lo1, lo2) = (2 * j, 2 * j + 1);
        let (hi1, hi2) = (2 * (j + 1), 2 * (j + 1) + 1);
        match (coupling, ss.relative_shift(j)) {
            (Coupling::PerColor { color1, color2 }, 0) => {
                g.add_edge(lo1, hi1, vec![0, 0], color1.clone())?;
                g.add_edge(lo2, hi2, vec![0, 0], color2.clone())?;
            }
            // One shift step up: the upper layer's second vertex sits over
            // the lower layer's first vertex.
            (Coupling::Single { q }, 1) => {
                g.add_edge(lo1, hi2, vec![0, 0], q.clone())?;
            }
            // One shift step down: the upper layer's first vertex sits
            // over the lower layer's second vertex.
            (Coupling::Single { q }, 2) => {
                g.add_edge(lo2, hi1, vec![0, 0], q.clone())?;
            }
            _ => unreachable!("checked by check_shape"),
        }
    }
    Ok(g)
}

/// `w(z) = 1/s0 + z1/s1 + z2/s2` for the given Dirichlet spectral values.
pub fn w_poly(s: &[f64; 3]) -> LaurentPoly {
    let mut w = LaurentPoly::constant(2, 1.0 / s[0]);
    w.add_term(&[1, 0], Complex64::new(1.0 / s[1], 0.0));
    w.add_term(&[0, 1], Complex64::new(1.0 / s[2], 0.0));
    w
}

/// The composite Floquet variable `zeta(z) = w(z) w(1/z)`.
pub fn zeta_poly(s: &[f64; 3]) -> LaurentPoly {
    let w = w_poly(s);
    w.mul(&w.invert_vars()).unwrap()
}

/// `G~(k1, k2) = |1 + e^{ik1} + e^{ik2}|^2
///             = 1 + 8 cos((k2-k1)/2) cos(k1/2) cos(k2/2)`,
/// the torus restriction of the hexagonal weight; range [0, 9].
pub fn g_tilde(k1: f64, k2: f64) -> f64 {
    1.0 + 8.0 * ((k2 - k1) / 2.0).cos() * (k1 / 2.0).cos() * (k2 / 2.0).cos()
}

/// Extrema of `G~` over the torus: grid scan plus local polish. Returns
/// `((min, argmin), (max, argmax))`.
pub fn g_tilde_extrema(grid: usize) -> ((f64, [f64; 2]), (f64, [f64; 2])) {
    let f = |k: &[f64]| g_tilde(k[0], k[1]);
    let mut min_v = f64::INFINITY;
    let mut max_v = f64::NEG_INFINITY;
    let mut argmin = [0.0; 2];
    let mut argmax = [0.0; 2];
    for i in 0..grid {
        let k1 = -PI + 2.0 * PI * i as f64 / grid as f64;
        for j in 0..grid {
            let k2 = -PI + 2.0 * PI * j as f64 / grid as f64;
            let v = g_tilde(k1, k2);
            if v < min_v {
                min_v = v;
                argmin = [k1, k2];
            }
            if v > max_v {
                max_v = v;
                argmax = [k1, k2];
            }
        }
    }
    let step = 2.0 * PI / grid as f64;
    let mut kmin = argmin.to_vec();
    let min_v = crate::spectral::pattern_search_min(&f, &mut kmin, step);
    let neg = |k: &[f64]| -f(k);
    let mut kmax = argmax.to_vec();
    let max_v = -crate::spectral::pattern_search_min(&neg, &mut kmax, step);
    ((min_v, [kmin[0], kmin[1]]), (max_v, [kmax[0], kmax[1]]))
}

/// Point evaluator for the characteristic values of a stack. Fully
/// aligned stacks use the tridiagonal fast path; general stacks fit the
/// dispersion as a polynomial in the composite Floquet variable and scale
/// its roots.
pub struct MuPipeline {
    n: usize,
    mode: MuMode,
}

enum MuMode {
    Aligned(Type2Spec),
    General {
        graph: PeriodicGraph,
        layer_potentials: [Potential; 3],
    },
}

impl MuPipeline {
    pub fn new(ss: &StackSpec) -> Result<Self> {
        ss.check_shape()?;
        let n = ss.layer_count();
        if ss.is_pure_aligned() && n > 1 {
            Ok(Self {
                n,
                mode: MuMode::Aligned(ss.to_type2()?),
            })
        } else if n == 1 {
            // A single layer is trivially aligned.
            let spec = Type2Spec::new(
                vec![Type2Layer {
                    potentials: ss.layers[0].0.effective_potentials().to_vec(),
                    alpha: ss.layers[0].0.effective_robin(),
                }],
                vec![],
                vec![],
            )?;
            Ok(Self {
                n,
                mode: MuMode::Aligned(spec),
            })
        } else {
            Ok(Self {
                n,
                mode: MuMode::General {
                    graph: stack(ss)?,
                    layer_potentials: ss.layers[0].0.effective_potentials(),
                },
            })
        }
    }

    pub fn component_count(&self) -> usize {
        self.n
    }

    /// The unordered characteristic values at one energy. Energies at
    /// Dirichlet eigenvalues of involved edges fail with `PoleAtLambda`.
    pub fn mu_at(&self, lambda: f64) -> Result<Vec<Complex64>> {
        match &self.mode {
            MuMode::Aligned(spec) => Ok(type2_characteristic(spec, lambda)?.mu),
            MuMode::General {
                graph,
                layer_potentials,
            } => {
                let s = [
                    transfer_matrix(&layer_potentials[0], lambda).s,
                    transfer_matrix(&layer_potentials[1], lambda).s,
                    transfer_matrix(&layer_potentials[2], lambda).s,
                ];
                let d = crate::spectral::dispersion_with_tolerance(
                    graph,
                    lambda,
                    crate::spectral::REFINE_POLE_TOL,
                )?;
                let zeta = zeta_poly(&s);
                let st = zeta_components(&d, &zeta, self.n)?;
                let s0sq = s[0] * s[0];
                Ok(st.roots.iter().map(|r| r * s0sq).collect())
            }
        }
    }
}

/// Sampled characteristic curves, continued in `lambda` by
/// nearest-neighbor matching in the complex plane.
#[derive(Debug, Clone)]
pub struct MuCurves {
    pub lambdas: Vec<f64>,
    /// `curves[i][j]` is component `i` at `lambdas[j]`; `None` where the
    /// sample was skipped (pole or degenerate fit).
    pub curves: Vec<Vec<Option<Complex64>>>,
    /// `(lambda, i, j)` where two curves approached within 1e-3 of the
    /// curve scale; crossings are recorded, not resolved.
    pub close_approaches: Vec<(f64, usize, usize)>,
}

impl MuCurves {
    /// Largest finite curve magnitude, ignoring pole blow-ups beyond 50.
    pub fn robust_scale(&self) -> f64 {
        let mut scale: f64 = 1.0;
        for curve in &self.curves {
            for v in curve.iter().flatten() {
                let m = v.norm();
                if m <= 50.0 {
                    scale = scale.max(m);
                }
            }
        }
        scale
    }
}

/// Samples the characteristic curves over the window.
pub fn mu_curves(ss: &StackSpec, window: (f64, f64), step: f64) -> Result<MuCurves> {
    let pipeline = MuPipeline::new(ss)?;
    mu_curves_with(&pipeline, window, step)
}

pub fn mu_curves_with(
    pipeline: &MuPipeline,
    window: (f64, f64),
    step: f64,
) -> Result<MuCurves> {
    assert!(step > 0.0 && window.1 > window.0);
    let n = pipeline.component_count();
    let nsteps = ((window.1 - window.0) / step).round() as usize;
    let mut lambdas = Vec::with_capacity(nsteps + 1);
    let mut curves = vec![Vec::with_capacity(nsteps + 1); n];
    let mut close = Vec::new();
    let mut reference: Option<Vec<Complex64>> = None;
    let mut reference_lambda = f64::NAN;

    for i in 0..=nsteps {
        let lam = window.0 + step * i as f64;
        lambdas.push(lam);
        let vals = match pipeline.mu_at(lam) {
            Ok(v) if v.len() == n => v,
            Ok(_) | Err(QgError::PoleAtLambda { .. }) => {
                for curve in curves.iter_mut() {
                    curve.push(None);
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        let ordered = match &reference {
            None => vals,
            Some(prev) => {
                let matched =
                    continue_ordered(pipeline, prev, reference_lambda, &vals, lam, 3)?;
                let scale = prev.iter().map(|v| v.norm()).fold(1.0, f64::max);
                for a in 0..n {
                    for b in a + 1..n {
                        if (matched[a] - matched[b]).norm() < 1e-3 * scale {
                            close.push((lam, a, b));
                        }
                    }
                }
                matched
            }
        };
        for (curve, v) in curves.iter_mut().zip(&ordered) {
            curve.push(Some(*v));
        }
        reference = Some(ordered);
        reference_lambda = lam;
    }
    Ok(MuCurves {
        lambdas,
        curves,
        close_approaches: close,
    })
}

/// Orders `vals` against `reference`; if two reference values are closer
/// than the matching is reliable for, the interval is subdivided (up to
/// `depth` halvings) so the assignment follows the curves through near
/// crossings.
fn continue_ordered(
    pipeline: &MuPipeline,
    reference: &[Complex64],
    ref_lambda: f64,
    vals: &[Complex64],
    lambda: f64,
    depth: usize,
) -> Result<Vec<Complex64>> {
    let scale = reference.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let mut ambiguous = false;
    for a in 0..reference.len() {
        for b in a + 1..reference.len() {
            if (reference[a] - reference[b]).norm() < 1e-3 * scale {
                ambiguous = true;
            }
        }
    }
    if ambiguous && depth > 0 && ref_lambda.is_finite() {
        let mid = 0.5 * (ref_lambda + lambda);
        if let Ok(mid_vals) = pipeline.mu_at(mid) {
            if mid_vals.len() == reference.len() {
                let mid_ordered =
                    continue_ordered(pipeline, reference, ref_lambda, &mid_vals, mid, depth - 1)?;
                return continue_ordered(pipeline, &mid_ordered, mid, vals, lambda, depth - 1);
            }
        }
    }
    Ok(assign_nearest(reference, vals))
}

/// Permutation of `vals` minimizing the total distance to `reference`
/// (exact for up to 7 components, greedy beyond).
fn assign_nearest(reference: &[Complex64], vals: &[Complex64]) -> Vec<Complex64> {
    let n = reference.len();
    if n <= 7 {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best: Option<(f64, Vec<usize>)> = None;
        permute(&mut perm, 0, &mut |p| {
            let cost: f64 = (0..n).map(|i| (reference[i] - vals[p[i]]).norm()).sum();
            if best.as_ref().map_or(true, |(c, _)| cost < *c) {
                best = Some((cost, p.to_vec()));
            }
        });
        let (_, p) = best.unwrap();
        p.iter().map(|&j| vals[j]).collect()
    } else {
        let mut taken = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for r in reference {
            let (j, _) = vals
                .iter()
                .enumerate()
                .filter(|(j, _)| !taken[*j])
                .min_by(|a, b| (r - a.1).norm().total_cmp(&(r - b.1).norm()))
                .unwrap();
            taken[j] = true;
            out.push(vals[j]);
        }
        out
    }
}

fn permute(perm: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, visit);
        perm.swap(k, i);
    }
}

/// A spectral band contributed by one component.
#[derive(Debug, Clone, Copy)]
pub struct BandInterval {
    pub component: usize,
    pub lo: f64,
    pub hi: f64,
}

/// Membership tolerance for `mu in [0, 9]` (relative to the curve scale).
const BAND_TOL: f64 = 1e-12;

/// A characteristic value only contributes a band where it is real: the
/// component `zeta = rho` meets the torus iff `rho` is real with
/// `s0^2 rho in [0, 9]`. Asymmetric connectors do produce genuinely
/// complex conjugate pairs over parts of the energy axis.
fn is_real(v: &Complex64) -> bool {
    v.im.abs() <= 1e-8 * (1.0 + v.norm())
}

/// Per-component band intervals: the energies where the component's
/// characteristic value lies in [0, 9]. Edges are refined by interval
/// halving to 1e-8.
pub fn bands(ss: &StackSpec, window: (f64, f64), step: f64) -> Result<Vec<BandInterval>> {
    let pipeline = MuPipeline::new(ss)?;
    let curves = mu_curves_with(&pipeline, window, step)?;
    bands_from_curves(&pipeline, &curves, window)
}

pub fn bands_from_curves(
    pipeline: &MuPipeline,
    curves: &MuCurves,
    window: (f64, f64),
) -> Result<Vec<BandInterval>> {
    let mut out = Vec::new();
    let scale = curves.robust_scale();
    for (comp, curve) in curves.curves.iter().enumerate() {
        let member = |v: &Complex64| -> bool {
            is_real(v) && v.re >= -BAND_TOL * scale && v.re <= 9.0 + BAND_TOL * scale
        };
        // Point query continued from the given reference ordering.
        let mu_comp = |lam: f64, reference: &[Complex64]| -> Option<Complex64> {
            let vals = pipeline.mu_at(lam).ok()?;
            if vals.len() != reference.len() {
                return None;
            }
            Some(assign_nearest(reference, &vals)[comp])
        };
        let reference_at = |j: usize| -> Option<Vec<Complex64>> {
            curves
                .curves
                .iter()
                .map(|c| c[j])
                .collect::<Option<Vec<_>>>()
        };
        let refine = |j_in: usize, lam_out: f64| -> f64 {
            let reference = match reference_at(j_in) {
                Some(r) => r,
                None => return curves.lambdas[j_in],
            };
            let mut a = curves.lambdas[j_in];
            let mut b = lam_out;
            while (b - a).abs() > 1e-8 {
                let m = 0.5 * (a + b);
                match mu_comp(m, &reference) {
                    Some(v) if member(&v) => a = m,
                    Some(_) => b = m,
                    None => {
                        // Pole between: nudge off it.
                        let m2 = m + (b - a) * 1e-3;
                        match mu_comp(m2, &reference) {
                            Some(v) if member(&v) => a = m2,
                            _ => b = m2,
                        }
                    }
                }
            }
            0.5 * (a + b)
        };

        let mut run_start: Option<f64> = None;
        let mut prev_state: Option<(usize, bool)> = None;
        for (j, v) in curve.iter().enumerate() {
            let state = v.as_ref().map(member);
            match (run_start, state) {
                (None, Some(true)) => {
                    let lo = match prev_state {
                        Some((pj, false)) => refine(j, curves.lambdas[pj]),
                        _ => curves.lambdas[j],
                    };
                    run_start = Some(lo);
                }
                (Some(lo), Some(false)) => {
                    let hi = match prev_state {
                        Some((pj, true)) => refine(pj, curves.lambdas[j]),
                        _ => curves.lambdas[j],
                    };
                    out.push(BandInterval {
                        component: comp,
                        lo,
                        hi,
                    });
                    run_start = None;
                }
                // None samples (poles) do not terminate a band run.
                _ => {}
            }
            if let Some(s) = state {
                prev_state = Some((j, s));
            }
        }
        if let Some(lo) = run_start {
            out.push(BandInterval {
                component: comp,
                lo,
                hi: window.1,
            });
        }
    }
    Ok(out)
}

/// Union of per-component bands as merged intervals (for comparison with a
/// direct spectrum scan).
pub fn band_union(bands: &[BandInterval], tol: f64) -> Vec<(f64, f64)> {
    let mut intervals: Vec<(f64, f64)> = bands.iter().map(|b| (b.lo, b.hi)).collect();
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in intervals {
        match out.last_mut() {
            Some(last) if lo <= last.1 + tol => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// Classification of a zero of a characteristic curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeClass {
    /// Tangential zero with positive curvature: a conical point of the
    /// dispersion relation.
    Cone,
    /// The curve crosses zero with nonzero slope: a nondegenerate band
    /// edge, not a cone.
    Transversal,
    Degenerate,
}

#[derive(Debug, Clone, Copy)]
pub struct ConeReport {
    pub component: usize,
    pub lambda_star: f64,
    pub classification: ConeClass,
    pub mu_prime: f64,
    pub mu_second: f64,
}

/// Finds the zeros of every characteristic curve in the window and
/// classifies each by first and second finite differences (step 1e-4).
pub fn cone_scan(ss: &StackSpec, window: (f64, f64), step: f64) -> Result<Vec<ConeReport>> {
    let pipeline = MuPipeline::new(ss)?;
    let curves = mu_curves_with(&pipeline, window, step)?;
    cone_scan_from_curves(&pipeline, &curves)
}

pub fn cone_scan_from_curves(
    pipeline: &MuPipeline,
    curves: &MuCurves,
) -> Result<Vec<ConeReport>> {
    let scale = curves.robust_scale();
    let tol_slope = 1e-4 * scale;
    let tol_curv = 1e-6;
    let mut out = Vec::new();

    for (comp, curve) in curves.curves.iter().enumerate() {
        let reference_at = |j: usize| -> Option<Vec<Complex64>> {
            curves
                .curves
                .iter()
                .map(|c| c[j])
                .collect::<Option<Vec<_>>>()
        };
        let mu_comp = |lam: f64, reference: &[Complex64]| -> Option<f64> {
            let vals = pipeline.mu_at(lam).ok()?;
            if vals.len() != reference.len() {
                return None;
            }
            Some(assign_nearest(reference, &vals)[comp].re)
        };

        let mut zeros: Vec<f64> = Vec::new();
        for j in 1..curve.len() {
            let (Some(a), Some(b)) = (curve[j - 1], curve[j]) else {
                continue;
            };
            if !is_real(&a) || !is_real(&b) {
                continue;
            }
            let reference = match reference_at(j - 1) {
                Some(r) => r,
                None => continue,
            };
            if a.re == 0.0 {
                zeros.push(curves.lambdas[j - 1]);
            } else if a.re * b.re < 0.0 {
                // Transversal crossing: bisect.
                let f = |lam: f64| mu_comp(lam, &reference).unwrap_or(f64::NAN);
                let z = crate::edge::bisect(&f, curves.lambdas[j - 1], curves.lambdas[j], 1e-10);
                zeros.push(z);
            }
        }
        // Tangential zeros: local minima of the curve magnitude that reach
        // (numerical) zero without a sign change.
        for j in 1..curve.len().saturating_sub(1) {
            let (Some(a), Some(b), Some(c)) = (curve[j - 1], curve[j], curve[j + 1]) else {
                continue;
            };
            if !is_real(&a) || !is_real(&b) || !is_real(&c) {
                continue;
            }
            let (fa, fb, fc) = (a.re, b.re, c.re);
            if fb.abs() <= fa.abs() && fb.abs() <= fc.abs() && fb.abs() < 1e-3 * scale {
                if fa * fb < 0.0 || fb * fc < 0.0 {
                    continue; // already found as a crossing
                }
                let reference = match reference_at(j) {
                    Some(r) => r,
                    None => continue,
                };
                let g = |lam: f64| {
                    let v = mu_comp(lam, &reference).unwrap_or(f64::NAN);
                    v * v
                };
                let z = golden_min(
                    &g,
                    curves.lambdas[j - 1],
                    curves.lambdas[j + 1],
                    1e-10,
                );
                if g(z).sqrt() <= 1e-6 * scale {
                    zeros.push(z);
                }
            }
        }
        zeros.sort_by(f64::total_cmp);
        zeros.dedup_by(|a, b| (*a - *b).abs() < 1e-6);

        for z in zeros {
            // Reference ordering from the nearest sampled energy.
            let j_near = curves
                .lambdas
                .iter()
                .enumerate()
                .filter(|(j, _)| curve[*j].is_some())
                .min_by(|a, b| (a.1 - z).abs().total_cmp(&(b.1 - z).abs()))
                .map(|(j, _)| j)
                .unwrap();
            let reference = reference_at(j_near).unwrap();
            let h = 1e-4;
            let full = |lam: f64| -> Option<Vec<f64>> {
                let vals = pipeline.mu_at(lam).ok()?;
                if vals.len() != reference.len() {
                    return None;
                }
                Some(
                    assign_nearest(&reference, &vals)
                        .iter()
                        .map(|v| v.re)
                        .collect(),
                )
            };
            let (Some(vm), Some(v0), Some(vp)) = (full(z - h), full(z), full(z + h)) else {
                continue;
            };
            // Two branches may cross zero at the same energy, in which
            // case nearest matching swaps them and fakes a tangential
            // touch. Allow the continuation to exit on any branch that
            // also vanishes at z and keep the one with the least
            // curvature.
            let (fm, f0) = (vm[comp], v0[comp]);
            let mut mu_prime = (vp[comp] - fm) / (2.0 * h);
            let mut mu_second = (vp[comp] - 2.0 * f0 + fm) / (h * h);
            for (j, &v0j) in v0.iter().enumerate() {
                if j == comp || v0j.abs() > 1e-3 * scale {
                    continue;
                }
                let second = (vp[j] - 2.0 * f0 + fm) / (h * h);
                if second.abs() < mu_second.abs() {
                    mu_prime = (vp[j] - fm) / (2.0 * h);
                    mu_second = second;
                }
            }
            let classification = if mu_prime.abs() < tol_slope && mu_second > tol_curv {
                ConeClass::Cone
            } else if mu_prime.abs() >= tol_slope {
                ConeClass::Transversal
            } else {
                ConeClass::Degenerate
            };
            out.push(ConeReport {
                component: comp,
                lambda_star: z,
                classification,
                mu_prime,
                mu_second,
            });
        }
    }
    Ok(out)
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// One sampled point of the dispersion surface: at wavevector `(k1, k2)`,
/// component `component` passes through energy `lambda`.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceSample {
    pub k1: f64,
    pub k2: f64,
    pub lambda: f64,
    pub component: usize,
}

/// Samples the dispersion surface: for each wavevector on a uniform
/// `k_grid x k_grid` grid over `[-pi, pi]^2`, solves `mu_i(lambda) =
/// G~(k1, k2)` by bisection on each bracketing segment of the sampled
/// curves.
pub fn dispersion_surface(
    ss: &StackSpec,
    window: (f64, f64),
    lambda_step: f64,
    k_grid: usize,
) -> Result<Vec<SurfaceSample>> {
    let pipeline = MuPipeline::new(ss)?;
    let curves = mu_curves_with(&pipeline, window, lambda_step)?;
    let mut out = Vec::new();
    for i in 0..k_grid {
        let k1 = -PI + 2.0 * PI * i as f64 / k_grid as f64;
        for j in 0..k_grid {
            let k2 = -PI + 2.0 * PI * j as f64 / k_grid as f64;
            let target = g_tilde(k1, k2);
            for (comp, curve) in curves.curves.iter().enumerate() {
                for jj in 1..curve.len() {
                    let (Some(a), Some(b)) = (curve[jj - 1], curve[jj]) else {
                        continue;
                    };
                    let (fa, fb) = (a.re - target, b.re - target);
                    if fa * fb > 0.0 {
                        continue;
                    }
                    let reference: Option<Vec<Complex64>> = curves
                        .curves
                        .iter()
                        .map(|c| c[jj - 1])
                        .collect();
                    let Some(reference) = reference else { continue };
                    let f = |lam: f64| {
                        pipeline
                            .mu_at(lam)
                            .ok()
                            .filter(|v| v.len() == reference.len())
                            .map(|v| assign_nearest(&reference, &v)[comp].re - target)
                            .unwrap_or(f64::NAN)
                    };
                    let lam = crate::edge::bisect(
                        &f,
                        curves.lambdas[jj - 1],
                        curves.lambdas[jj],
                        1e-8,
                    );
                    out.push(SurfaceSample {
                        k1,
                        k2,
                        lambda: lam,
                        component: comp,
                    });
                }
            }
        }
    }
    Ok(out)
}

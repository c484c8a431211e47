//! Reducibility machinery for periodic quantum graphs: the single-vertex
//! join calculus, detection of the dispersion function as a polynomial in
//! a composite Floquet variable, the tridiagonal fast path for stacks
//! coupled by edges, verification of the pole-moving identity under edge
//! subdivision, and the irreducible bilayer fixtures.

use crate::edge::{dirichlet_zeros, transfer_matrix, Potential, POLE_TOL};
use crate::error::{QgError, Result};
use crate::graph::{JoinSpec, PeriodicGraph};
use crate::laurent::{self, polynomial_roots, LaurentPoly};
use crate::spectral::{dispersion, dispersion_at, spectral_matrix};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeSet;

/// The dispersion of the severed graph, with the convention required by
/// the join calculus: scalar factors from edges that become
/// Dirichlet-Dirichlet only through the severing are dropped, while
/// factors already present in the original graph are kept. With this
/// convention the join identity holds for arbitrary graphs, including
/// loops at the join vertex.
pub fn severed_dispersion(g: &PeriodicGraph, v: usize, lambda: f64) -> Result<LaurentPoly> {
    let original_dd: BTreeSet<usize> = spectral_matrix(g, lambda)?
        .extra_s_factors
        .iter()
        .map(|&(e, _)| e)
        .collect();
    let severed = g.dirichlet_at_orbit(v)?;
    let sm = spectral_matrix(&severed, lambda)?;
    let det = if sm.rows.is_empty() {
        LaurentPoly::constant(g.d(), 1.0)
    } else {
        laurent::det(&sm.entries)?
    };
    let factor: f64 = sm
        .extra_s_factors
        .iter()
        .filter(|(e, _)| original_dd.contains(e))
        .map(|&(_, s)| s)
        .product();
    Ok(det.scale(factor))
}

/// Dispersion of the single-vertex join of `g1` and `g2`, computed through
/// the join calculus
///
/// `[G1 G2] = [G1][G2^v2] + [G1^v1][G2] (+ (alpha - a1 - a2)[G1^v1][G2^v2])`
///
/// and cross-checked against the directly assembled joined graph. A
/// disagreement beyond 1e-8 relative signals an assembly bug and is
/// reported as `JoinIdentityViolation`.
pub fn join_dispersion(
    g1: &PeriodicGraph,
    v1: usize,
    g2: &PeriodicGraph,
    v2: usize,
    alpha_override: Option<f64>,
    lambda: f64,
) -> Result<LaurentPoly> {
    let joined = g1.single_vertex_join(
        g2,
        JoinSpec {
            v1,
            v2,
            alpha_override,
        },
    )?;
    let d1 = dispersion(g1, lambda)?;
    let d2 = dispersion(g2, lambda)?;
    let s1 = severed_dispersion(g1, v1, lambda)?;
    let s2 = severed_dispersion(g2, v2, lambda)?;

    let mut rhs = d1.mul(&s2)?.add(&s1.mul(&d2)?)?;
    if let Some(alpha) = alpha_override {
        let a1 = match g1.vertices()[v1].condition {
            crate::graph::VertexCondition::Robin(a) => a,
            _ => unreachable!("join would have failed"),
        };
        let a2 = match g2.vertices()[v2].condition {
            crate::graph::VertexCondition::Robin(a) => a,
            _ => unreachable!("join would have failed"),
        };
        // Overriding the merged Robin parameter adds -(alpha - a1 - a2) to
        // the joined diagonal entry, so the determinant changes by the
        // severed product with that sign.
        rhs = rhs.add(&s1.mul(&s2)?.scale(a1 + a2 - alpha))?;
    }

    let direct = dispersion(&joined, lambda)?;
    let err = direct.rel_distance(&rhs);
    if err > 1e-8 {
        return Err(QgError::JoinIdentityViolation(err));
    }
    Ok(direct)
}

/// The dispersion expressed as a polynomial in a composite Floquet
/// variable, together with the component roots.
#[derive(Debug, Clone)]
pub struct ZetaStructure {
    pub zeta: LaurentPoly,
    /// Coefficients of `P(zeta)` (trimmed of negligible leading terms).
    pub coeffs: Vec<Complex64>,
    /// Roots of `P`, with multiplicities expanded; each root `rho` gives a
    /// Fermi-surface component `zeta(z) = rho`.
    pub roots: Vec<Complex64>,
    pub residual: f64,
}

impl ZetaStructure {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Fits `D` as a polynomial in `zeta` and extracts the component roots.
/// Fails with `StructureNotFound` if the residual exceeds 1e-6.
pub fn zeta_components(
    d: &LaurentPoly,
    zeta: &LaurentPoly,
    max_deg: usize,
) -> Result<ZetaStructure> {
    assert!(max_deg >= 1);
    let fit = laurent::fit_in_zeta(d, zeta, max_deg)?;
    if fit.residual > 1e-6 {
        return Err(QgError::StructureNotFound {
            residual: fit.residual,
        });
    }
    let coeffs = fit.trimmed();
    let roots = if coeffs.len() >= 2 {
        cluster_roots(polynomial_roots(&coeffs))
    } else {
        Vec::new()
    };
    Ok(ZetaStructure {
        zeta: zeta.clone(),
        coeffs,
        roots,
        residual: fit.residual,
    })
}

/// Averages root clusters within 1e-6 relative so symmetric stacks report
/// exact multiplicities.
fn cluster_roots(mut roots: Vec<Complex64>) -> Vec<Complex64> {
    roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut out: Vec<Complex64> = Vec::with_capacity(roots.len());
    let mut i = 0;
    while i < roots.len() {
        let mut j = i + 1;
        let mut sum = roots[i];
        while j < roots.len()
            && (roots[j] - roots[i]).norm() <= 1e-6 * (1.0 + roots[i].norm())
        {
            sum += roots[j];
            j += 1;
        }
        let mean = sum / (j - i) as f64;
        for _ in i..j {
            out.push(mean);
        }
        i = j;
    }
    out
}

/// One layer of a stack coupled by edges: a bipartite graph with one
/// vertex of each color per period, all edges oriented color-1 to color-2.
#[derive(Debug, Clone)]
pub struct Type2Layer {
    pub potentials: Vec<Potential>,
    pub alpha: (f64, f64),
}

/// An n-layer stack coupled by single edges per color between successive
/// layers. Corresponding layer edges must be Dirichlet-isospectral, which
/// makes the off-diagonal Floquet weight common to all layers.
#[derive(Debug, Clone)]
pub struct Type2Spec {
    layers: Vec<Type2Layer>,
    connector1: Vec<Potential>,
    connector2: Vec<Potential>,
}

/// Window on which layer isospectrality is verified.
const ISOSPECTRAL_WINDOW: (f64, f64) = (-30.0, 150.0);

impl Type2Spec {
    /// Builds the spec, verifying that Dirichlet spectra of corresponding
    /// edges agree across layers to 1e-7 on the working window.
    pub fn new(
        layers: Vec<Type2Layer>,
        connector1: Vec<Potential>,
        connector2: Vec<Potential>,
    ) -> Result<Self> {
        assert!(!layers.is_empty());
        assert_eq!(connector1.len(), layers.len() - 1);
        assert_eq!(connector2.len(), layers.len() - 1);
        let m = layers[0].potentials.len();
        for layer in &layers[1..] {
            assert_eq!(layer.potentials.len(), m);
        }
        for e in 0..m {
            let reference = dirichlet_zeros(&layers[0].potentials[e], ISOSPECTRAL_WINDOW, 600);
            for (j, layer) in layers.iter().enumerate().skip(1) {
                let zeros = dirichlet_zeros(&layer.potentials[e], ISOSPECTRAL_WINDOW, 600);
                let mismatch = if zeros.len() != reference.len() {
                    f64::INFINITY
                } else {
                    zeros
                        .iter()
                        .zip(&reference)
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
        Ok(Self {
            layers,
            connector1,
            connector2,
        })
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Type2Layer] {
        &self.layers
    }
}

/// The characteristic data of a stack coupled by edges at one energy.
#[derive(Debug, Clone)]
pub struct Type2Characteristic {
    /// `Delta = s0^2 * B1 * B2`, assembled in scaled form so it stays
    /// finite through the Dirichlet eigenvalues of the layer edges.
    pub delta: DMatrix<f64>,
    /// Eigenvalues of `Delta`; imaginary parts are reported, not assumed
    /// to vanish.
    pub mu: Vec<Complex64>,
    /// `s0 * B1` and `s0 * B2` (the scaled tridiagonal color matrices).
    pub scaled_color1: DMatrix<f64>,
    pub scaled_color2: DMatrix<f64>,
    /// Value of the layer edge-0 Dirichlet spectral function at `lambda`.
    pub s0: f64,
}

/// Assembles the tridiagonal color matrices of a stack coupled by edges
/// and returns the characteristic matrix and its eigenvalues.
///
/// The color matrices are `B_i = diag(b_i^j) + chain_i`, where the chain
/// holds the connector DtN entries; everything is assembled pre-multiplied
/// by `s0` to avoid cancellation near layer-edge Dirichlet eigenvalues.
pub fn type2_characteristic(spec: &Type2Spec, lambda: f64) -> Result<Type2Characteristic> {
    let n = spec.layers.len();
    // The scaled assembly is finite through the layer-edge Dirichlet
    // eigenvalues (band edges often sit exactly on them), so only a thin
    // guard window around the exact poles is refused.
    let pole_scale = crate::spectral::REFINE_POLE_TOL * (1.0 + lambda.abs());

    // Shared s-functions of the layer edges (isospectral across layers).
    let s_edges: Vec<f64> = spec.layers[0]
        .potentials
        .iter()
        .map(|q| transfer_matrix(q, lambda).s)
        .collect();
    let s0 = s_edges[0];
    let mut pole_edges = Vec::new();
    for (i, s) in s_edges.iter().enumerate() {
        if s.abs() <= pole_scale {
            pole_edges.push(i);
        }
    }
    if !pole_edges.is_empty() {
        return Err(QgError::PoleAtLambda {
            lambda,
            edges: pole_edges,
        });
    }

    let mut m1 = DMatrix::zeros(n, n);
    let mut m2 = DMatrix::zeros(n, n);
    for (j, layer) in spec.layers.iter().enumerate() {
        let mut diag1 = 0.0;
        let mut diag2 = 0.0;
        for (e, q) in layer.potentials.iter().enumerate() {
            let t = transfer_matrix(q, lambda);
            // s0 * c_e / s_e with the shared s-function ratio formed first.
            let ratio = s0 / s_edges[e];
            diag1 -= ratio * t.c;
            diag2 -= ratio * t.sp;
        }
        m1[(j, j)] = diag1 - s0 * layer.alpha.0;
        m2[(j, j)] = diag2 - s0 * layer.alpha.1;
    }
    for (chain, m) in [(&spec.connector1, &mut m1), (&spec.connector2, &mut m2)] {
        for (j, q) in chain.iter().enumerate() {
            let t = transfer_matrix(q, lambda);
            if t.s.abs() <= pole_scale {
                return Err(QgError::PoleAtLambda {
                    lambda,
                    edges: vec![j],
                });
            }
            let inv = s0 / t.s;
            m[(j, j)] -= inv * t.c;
            m[(j + 1, j + 1)] -= inv * t.sp;
            m[(j, j + 1)] += inv;
            m[(j + 1, j)] += inv;
        }
    }

    let delta = &m1 * &m2;
    let mu: Vec<Complex64> = delta
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|c| Complex64::new(c.re, c.im))
        .collect();
    for m in &mu {
        if m.im.abs() > 1e-8 * (1.0 + m.norm()) {
            log::warn!(
                "characteristic eigenvalue has imaginary part {:.3e} at lambda = {lambda}",
                m.im
            );
        }
    }
    Ok(Type2Characteristic {
        delta,
        mu,
        scaled_color1: m1,
        scaled_color2: m2,
        s0,
    })
}

/// Report of the pole-moving identity `s1 s2 D_dot = sign * s * D` checked
/// at a set of `(z, lambda)` samples after subdividing edge `e` at `t`.
#[derive(Debug, Clone)]
pub struct PoleMoveReport {
    pub sign: f64,
    pub max_rel_err: f64,
    pub samples: usize,
}

pub fn verify_pole_move(
    g: &PeriodicGraph,
    e: usize,
    t: f64,
    samples: &[(Vec<Complex64>, f64)],
) -> Result<PoleMoveReport> {
    assert!(!samples.is_empty());
    let dotted = g.subdivide_edge(e, t)?;
    let q = &g.edges()[e].potential;
    let cut = t * q.total_length();
    let (qa, qb) = q.split_at(cut)?;

    let mut sign = 0.0;
    let mut max_rel = 0.0f64;
    for (z, lambda) in samples {
        let s = transfer_matrix(q, *lambda);
        let s1 = transfer_matrix(&qa, *lambda);
        let s2 = transfer_matrix(&qb, *lambda);
        if s.is_pole() || s1.is_pole() || s2.is_pole() {
            return Err(QgError::SampleAtPole(*lambda));
        }
        let lhs = dispersion_at(&dotted, *lambda, z)? * s1.s * s2.s;
        let rhs = dispersion_at(g, *lambda, z)? * s.s;
        if sign == 0.0 {
            sign = if (lhs - rhs).norm() <= (lhs + rhs).norm() {
                1.0
            } else {
                -1.0
            };
        }
        let err = (lhs - rhs * sign).norm() / (1.0 + rhs.norm());
        max_rel = max_rel.max(err);
    }
    Ok(PoleMoveReport {
        sign,
        max_rel_err: max_rel,
        samples: samples.len(),
    })
}

/// The two explicit bilayer spectral matrices whose determinants resist
/// factorization at the standard coefficient specialization. The entries
/// are direct coefficient substitutions, not built from potentials.
pub mod fixtures {
    use super::*;

    /// Transfer-matrix values `(c, s, s')` of one edge class at the probed
    /// energy.
    #[derive(Debug, Clone, Copy)]
    pub struct EdgeValues {
        pub c: f64,
        pub s: f64,
        pub sp: f64,
    }

    /// Coefficient assignment: the common layer-edge values plus the two
    /// connector edges.
    #[derive(Debug, Clone, Copy)]
    pub struct FixtureValues {
        pub layer: EdgeValues,
        pub connector1: EdgeValues,
        pub connector2: EdgeValues,
    }

    impl FixtureValues {
        /// The specialization under which both determinants are
        /// non-factorable: all values 1 except the second connector's
        /// cosine value 2.
        pub fn nonfactorable_specialization() -> Self {
            Self {
                layer: EdgeValues {
                    c: 1.0,
                    s: 1.0,
                    sp: 1.0,
                },
                connector1: EdgeValues {
                    c: 1.0,
                    s: 1.0,
                    sp: 1.0,
                },
                connector2: EdgeValues {
                    c: 2.0,
                    s: 1.0,
                    sp: 1.0,
                },
            }
        }

        /// Both connectors identical (the determinant then factors, but
        /// not through the product of the two hexagonal weights).
        pub fn identical_connectors() -> Self {
            Self {
                layer: EdgeValues {
                    c: 1.0,
                    s: 1.0,
                    sp: 1.0,
                },
                connector1: EdgeValues {
                    c: 1.0,
                    s: 1.0,
                    sp: 1.0,
                },
                connector2: EdgeValues {
                    c: 1.0,
                    s: 1.0,
                    sp: 1.0,
                },
            }
        }
    }

    fn c64(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn constant(x: f64) -> LaurentPoly {
        LaurentPoly::constant(2, x)
    }

    /// `1 + z2` and friends.
    fn one_plus(exp: [i32; 2]) -> LaurentPoly {
        let mut p = LaurentPoly::constant(2, 1.0);
        p.add_term(&exp, c64(1.0));
        p
    }

    /// Two identical tripartite layers (three vertex colors per period)
    /// coupled by one edge between first-color vertices and one between
    /// second-color vertices: the 6x6 spectral matrix.
    pub fn tripartite_bilayer(v: FixtureValues) -> Vec<Vec<LaurentPoly>> {
        let l = v.layer;
        let inv_s = 1.0 / l.s;
        let zero = LaurentPoly::zero(2);
        let mut m = vec![vec![zero; 6]; 6];

        let d_green = constant(-3.0 * l.c * inv_s);
        let d_red = constant((-2.0 * l.c - 2.0 * l.sp) * inv_s);
        let d_blue = constant(-3.0 * l.sp * inv_s);
        let up2 = one_plus([0, 1]).scale(inv_s);
        let dn2 = one_plus([0, -1]).scale(inv_s);
        let up1 = one_plus([1, 0]).scale(inv_s);
        let dn1 = one_plus([-1, 0]).scale(inv_s);
        let one = constant(inv_s);

        for layer in 0..2 {
            let (g, r, b) = (layer, 2 + layer, 4 + layer);
            m[g][g] = d_green.clone();
            m[r][r] = d_red.clone();
            m[b][b] = d_blue.clone();
            m[g][r] = up2.clone();
            m[r][g] = dn2.clone();
            m[r][b] = up1.clone();
            m[b][r] = dn1.clone();
            m[g][b] = one.clone();
            m[b][g] = one.clone();
        }

        // Connector between the two green vertices.
        let c1 = v.connector1;
        m[0][0] = m[0][0].add(&constant(-c1.c / c1.s)).unwrap();
        m[1][1] = m[1][1].add(&constant(-c1.sp / c1.s)).unwrap();
        m[0][1] = m[0][1].add(&constant(1.0 / c1.s)).unwrap();
        m[1][0] = m[1][0].add(&constant(1.0 / c1.s)).unwrap();
        // Connector between the two red vertices.
        let c2 = v.connector2;
        m[2][2] = m[2][2].add(&constant(-c2.c / c2.s)).unwrap();
        m[3][3] = m[3][3].add(&constant(-c2.sp / c2.s)).unwrap();
        m[2][3] = m[2][3].add(&constant(1.0 / c2.s)).unwrap();
        m[3][2] = m[3][2].add(&constant(1.0 / c2.s)).unwrap();
        m
    }

    /// Crossed bilayer graphene: two identical layers, the first-color
    /// vertex of each layer connected to the second-color vertex of the
    /// other: the 4x4 spectral matrix, with hexagonal weights
    /// `w = 1 + 1/z1 + 1/z2` and `w' = 1 + z1 + z2` off the diagonal.
    pub fn crossed_bilayer(v: FixtureValues) -> Vec<Vec<LaurentPoly>> {
        let l = v.layer;
        let inv_s = 1.0 / l.s;
        let zero = LaurentPoly::zero(2);
        let mut m = vec![vec![zero; 4]; 4];

        let mut w = LaurentPoly::constant(2, 1.0);
        w.add_term(&[-1, 0], c64(1.0));
        w.add_term(&[0, -1], c64(1.0));
        let mut wp = LaurentPoly::constant(2, 1.0);
        wp.add_term(&[1, 0], c64(1.0));
        wp.add_term(&[0, 1], c64(1.0));

        for i in 0..2 {
            m[i][i] = constant(-3.0 * l.c * inv_s);
            m[2 + i][2 + i] = constant(-3.0 * l.sp * inv_s);
            m[i][2 + i] = w.scale(inv_s);
            m[2 + i][i] = wp.scale(inv_s);
        }

        let c1 = v.connector1;
        m[0][0] = m[0][0].add(&constant(-c1.c / c1.s)).unwrap();
        m[3][3] = m[3][3].add(&constant(-c1.sp / c1.s)).unwrap();
        m[0][3] = m[0][3].add(&constant(1.0 / c1.s)).unwrap();
        m[3][0] = m[3][0].add(&constant(1.0 / c1.s)).unwrap();
        let c2 = v.connector2;
        m[1][1] = m[1][1].add(&constant(-c2.c / c2.s)).unwrap();
        m[2][2] = m[2][2].add(&constant(-c2.sp / c2.s)).unwrap();
        m[1][2] = m[1][2].add(&constant(1.0 / c2.s)).unwrap();
        m[2][1] = m[2][1].add(&constant(1.0 / c2.s)).unwrap();
        m
    }
}

//! Bounded factorization probe for Laurent polynomials in at most two
//! variables.
//!
//! Factorization is meaningful only modulo monomial units, so the input is
//! first normalized to a genuine polynomial with componentwise-minimal
//! exponent zero and unit leading coefficient. The Newton polytope of a
//! product is the Minkowski sum of the factors' polytopes, so candidate
//! factor supports are enumerated as Minkowski summands of the Newton
//! polytope (edge-vector splittings of the boundary). Each candidate split
//! yields a bilinear system for the factor coefficients, attacked by
//! alternating least squares from several random starts followed by a
//! Gauss-Newton polish. A positive verdict is self-validating: it is
//! accepted only if the reconstructed product matches the input to 1e-8
//! relative max-norm. A negative verdict is a probe result, not a
//! certificate.

use super::fit::lstsq;
use super::LaurentPoly;
use crate::error::{QgError, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Hard cap on the lattice-point count of the Newton polytope.
pub const MAX_POLYTOPE_POINTS: usize = 64;

const ACCEPT_TOL: f64 = 1e-8;
const RESTARTS: usize = 24;
const ALS_ITERS: usize = 80;

/// A Laurent polynomial normalized modulo monomial units:
/// `original = scale * z^shift * poly`, where `poly` has componentwise
/// minimum exponent 0 and leading (lexicographically largest exponent)
/// coefficient 1.
#[derive(Debug, Clone)]
pub struct MonomialClass {
    pub poly: LaurentPoly,
    pub shift: Vec<i32>,
    pub scale: Complex64,
}

impl MonomialClass {
    pub fn normalize(p: &LaurentPoly) -> Self {
        assert!(!p.is_zero(), "cannot normalize the zero polynomial");
        let shift = p.min_exponents().unwrap();
        let neg: Vec<i32> = shift.iter().map(|x| -x).collect();
        let shifted = p.mul_monomial(&neg);
        let lead = shifted.support().pop().unwrap();
        let scale = shifted.coeff(&lead);
        Self {
            poly: shifted.scale(1.0 / scale),
            shift,
            scale,
        }
    }
}

/// Outcome of the factor probe.
#[derive(Debug, Clone)]
pub enum FactorVerdict {
    /// `f * g` reproduces the input to 1e-8 relative max-norm; the monomial
    /// unit and overall scale are folded into `g`.
    Factored(LaurentPoly, LaurentPoly),
    /// No split of the Newton polytope produced a factorization within the
    /// search bounds. The bounds are reported for the record.
    NoFactorizationFound {
        lattice_points: usize,
        splits_tried: usize,
        restarts_per_split: usize,
    },
}

/// Probes whether `d` factors as a product of two non-monomial Laurent
/// polynomials. `max_support` caps the lattice-point count of a candidate
/// factor support; `seed` fixes the random restarts.
pub fn factor_probe(d: &LaurentPoly, max_support: usize, seed: u64) -> Result<FactorVerdict> {
    assert!(!d.is_zero(), "factor probe requires a nonzero polynomial");
    assert!(d.nvars() <= 2, "factor probe supports at most 2 variables");
    let normal = MonomialClass::normalize(d);
    let p = &normal.poly;

    let support: Vec<Vec<i64>> = p
        .support()
        .into_iter()
        .map(|e| e.iter().map(|&x| x as i64).collect())
        .collect();

    // Affine dimension of the support decides the strategy.
    if support.len() == 1 {
        // A monomial is a unit; it has no non-monomial factorization.
        return Ok(FactorVerdict::NoFactorizationFound {
            lattice_points: 1,
            splits_tried: 0,
            restarts_per_split: 0,
        });
    }

    if let Some((dir, base, coeffs)) = collinear_form(p, &support) {
        return Ok(factor_univariate(d, &normal, &dir, &base, &coeffs));
    }

    factor_planar(d, &normal, max_support, seed)
}

/// If the support is collinear, returns the primitive step direction, the
/// support point at step zero, and the dense coefficient vector along the
/// direction.
fn collinear_form(
    p: &LaurentPoly,
    support: &[Vec<i64>],
) -> Option<(Vec<i32>, Vec<i32>, Vec<Complex64>)> {
    let nvars = p.nvars();
    if nvars == 1 {
        let (_, hi) = p.var_span(0).unwrap();
        let coeffs = (0..=hi).map(|k| p.coeff(&[k])).collect();
        return Some((vec![1], vec![0], coeffs));
    }
    let base = &support[0];
    let mut dir: Option<(i64, i64)> = None;
    for e in &support[1..] {
        let v = (e[0] - base[0], e[1] - base[1]);
        match dir {
            None => {
                let g = gcd(v.0.abs(), v.1.abs()).max(1);
                dir = Some((v.0 / g, v.1 / g));
            }
            Some(u) => {
                if u.0 * v.1 - u.1 * v.0 != 0 {
                    return None;
                }
            }
        }
    }
    let u = dir.unwrap();
    // Orient so steps from the componentwise-minimal support are nonnegative.
    let u = if u.0 < 0 || (u.0 == 0 && u.1 < 0) {
        (-u.0, -u.1)
    } else {
        u
    };
    // The support min is the exponent origin after normalization.
    let step = |e: &Vec<i64>| -> i64 {
        if u.0 != 0 {
            e[0] / u.0
        } else {
            e[1] / u.1
        }
    };
    let deg = support.iter().map(step).max().unwrap();
    let base_pt = support
        .iter()
        .find(|&e| step(e) == 0)
        .expect("step zero is attained on a normalized support");
    let mut coeffs = vec![Complex64::new(0.0, 0.0); deg as usize + 1];
    for e in support {
        let k = step(e) as usize;
        coeffs[k] = p.coeff(&[e[0] as i32, e[1] as i32]);
    }
    Some((
        vec![u.0 as i32, u.1 as i32],
        vec![base_pt[0] as i32, base_pt[1] as i32],
        coeffs,
    ))
}

/// Splits a univariate (in `t = z^dir`) polynomial of degree >= 2 into a
/// linear factor and the deflated remainder via its complex roots.
fn factor_univariate(
    original: &LaurentPoly,
    normal: &MonomialClass,
    dir: &[i32],
    base: &[i32],
    coeffs: &[Complex64],
) -> FactorVerdict {
    let deg = coeffs.len() - 1;
    let lattice_points = coeffs.len();
    if deg < 2 {
        return FactorVerdict::NoFactorizationFound {
            lattice_points,
            splits_tried: 0,
            restarts_per_split: 0,
        };
    }
    let roots = polynomial_roots(coeffs);
    let r = roots[0];
    // Synthetic division by (t - r) of the monic-scaled polynomial.
    let lead = coeffs[deg];
    let mut quotient = vec![Complex64::new(0.0, 0.0); deg];
    let mut carry = lead;
    for k in (0..deg).rev() {
        quotient[k] = carry;
        carry = coeffs[k] + carry * r;
    }
    let nvars = original.nvars();
    let mut f = LaurentPoly::constant(nvars, -r);
    f.add_term(dir, Complex64::new(1.0, 0.0));
    let mut g = LaurentPoly::zero(nvars);
    let mut e = vec![0i32; nvars];
    for (k, q) in quotient.iter().enumerate() {
        for (i, ei) in e.iter_mut().enumerate() {
            *ei = dir[i] * k as i32;
        }
        g.add_term(&e, *q);
    }
    let g = g
        .scale(normal.scale)
        .mul_monomial(base)
        .mul_monomial(&normal.shift);
    match validated(original, f, g) {
        Some(v) => v,
        None => FactorVerdict::NoFactorizationFound {
            lattice_points,
            splits_tried: 1,
            restarts_per_split: 0,
        },
    }
}

fn validated(original: &LaurentPoly, f: LaurentPoly, g: LaurentPoly) -> Option<FactorVerdict> {
    let product = f.mul(&g).ok()?;
    if product.rel_distance(original) <= ACCEPT_TOL && f.num_terms() > 1 && g.num_terms() > 1 {
        Some(FactorVerdict::Factored(f, g))
    } else {
        None
    }
}

fn factor_planar(
    original: &LaurentPoly,
    normal: &MonomialClass,
    max_support: usize,
    seed: u64,
) -> Result<FactorVerdict> {
    let p = &normal.poly;
    let support: Vec<(i64, i64)> = p
        .support()
        .into_iter()
        .map(|e| (e[0] as i64, e[1] as i64))
        .collect();
    let hull = convex_hull(&support);
    let polytope_points = lattice_points(&hull);
    if polytope_points.len() > MAX_POLYTOPE_POINTS {
        return Err(QgError::SupportTooLarge {
            points: polytope_points.len(),
            limit: MAX_POLYTOPE_POINTS,
        });
    }

    // Edge vectors of the hull as (primitive direction, multiplicity).
    let mut edges: Vec<((i64, i64), i64)> = Vec::new();
    for i in 0..hull.len() {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        let v = (b.0 - a.0, b.1 - a.1);
        let g = gcd(v.0.abs(), v.1.abs());
        edges.push(((v.0 / g, v.1 / g), g));
    }

    let splits = enumerate_splits(&edges);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut splits_tried = 0usize;

    for assignment in &splits {
        let q_points = summand_lattice_points(&edges, assignment, false);
        let r_points = summand_lattice_points(&edges, assignment, true);
        if q_points.len() < 2 || r_points.len() < 2 {
            continue; // monomial factors are units, not factorizations
        }
        if q_points.len() > max_support || r_points.len() > max_support {
            continue;
        }
        splits_tried += 1;
        if let Some((f, g)) =
            bilinear_solve(p, &polytope_points, &q_points, &r_points, &mut rng)
        {
            let g_full = g.scale(normal.scale).mul_monomial(&normal.shift);
            if let Some(v) = validated(original, f, g_full) {
                return Ok(v);
            }
        }
    }

    Ok(FactorVerdict::NoFactorizationFound {
        lattice_points: polytope_points.len(),
        splits_tried,
        restarts_per_split: RESTARTS,
    })
}

/// All closing assignments `a_i in [0, m_i]` with `sum a_i d_i = 0`,
/// excluding the trivial all-zero/all-full pair and deduplicating
/// complements.
fn enumerate_splits(edges: &[((i64, i64), i64)]) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut current = vec![0i64; edges.len()];
    fn rec(
        edges: &[((i64, i64), i64)],
        k: usize,
        sum: (i64, i64),
        current: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        if out.len() > 5000 {
            return; // bounded search
        }
        if k == edges.len() {
            if sum == (0, 0) {
                out.push(current.clone());
            }
            return;
        }
        for a in 0..=edges[k].1 {
            current[k] = a;
            rec(
                edges,
                k + 1,
                (sum.0 + a * edges[k].0 .0, sum.1 + a * edges[k].0 .1),
                current,
                out,
            );
        }
        current[k] = 0;
    }
    rec(edges, 0, (0, 0), &mut current, &mut out);
    // Drop the trivial split and complementary duplicates.
    let full: Vec<i64> = edges.iter().map(|&(_, m)| m).collect();
    out.retain(|a| a.iter().any(|&x| x > 0) && a != &full);
    let mut seen = std::collections::BTreeSet::new();
    out.retain(|a| {
        let comp: Vec<i64> = a.iter().zip(&full).map(|(x, m)| m - x).collect();
        let key = a.clone().min(comp);
        seen.insert(key)
    });
    out
}

/// Lattice points of the summand polygon obtained by walking the selected
/// edge multiples in hull order, translated to componentwise minimum 0.
fn summand_lattice_points(
    edges: &[((i64, i64), i64)],
    assignment: &[i64],
    complement: bool,
) -> Vec<(i64, i64)> {
    let mut vertices = vec![(0i64, 0i64)];
    let mut pos = (0i64, 0i64);
    for (i, &(dir, m)) in edges.iter().enumerate() {
        let a = if complement {
            m - assignment[i]
        } else {
            assignment[i]
        };
        if a > 0 {
            pos = (pos.0 + a * dir.0, pos.1 + a * dir.1);
            vertices.push(pos);
        }
    }
    let minx = vertices.iter().map(|v| v.0).min().unwrap();
    let miny = vertices.iter().map(|v| v.1).min().unwrap();
    let shifted: Vec<(i64, i64)> = vertices.iter().map(|v| (v.0 - minx, v.1 - miny)).collect();
    lattice_points(&convex_hull(&shifted))
}

/// Attempts to solve `conv(f, g) = p` with supports `q_points`/`r_points`
/// by alternating least squares with random restarts and a Gauss-Newton
/// polish. Returns normalized factors on success.
fn bilinear_solve(
    p: &LaurentPoly,
    product_points: &[(i64, i64)],
    q_points: &[(i64, i64)],
    r_points: &[(i64, i64)],
    rng: &mut ChaCha8Rng,
) -> Option<(LaurentPoly, LaurentPoly)> {
    let target = DVector::from_fn(product_points.len(), |i, _| {
        p.coeff(&[product_points[i].0 as i32, product_points[i].1 as i32])
    });
    let scale = target.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let index_of: std::collections::BTreeMap<(i64, i64), usize> = product_points
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i))
        .collect();

    // conv matrix with g fixed: rows product points, cols q coefficients.
    let conv_matrix = |fixed: &DVector<Complex64>,
                       fixed_pts: &[(i64, i64)],
                       free_pts: &[(i64, i64)]| {
        let mut m = DMatrix::zeros(product_points.len(), free_pts.len());
        for (j, &qe) in free_pts.iter().enumerate() {
            for (k, &re) in fixed_pts.iter().enumerate() {
                let e = (qe.0 + re.0, qe.1 + re.1);
                if let Some(&row) = index_of.get(&e) {
                    m[(row, j)] += fixed[k];
                }
            }
        }
        m
    };

    for _ in 0..RESTARTS {
        let mut g = DVector::from_fn(r_points.len(), |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let mut f = DVector::zeros(q_points.len());
        let mut best = f64::INFINITY;
        for _ in 0..ALS_ITERS {
            let mg = conv_matrix(&g, r_points, q_points);
            f = lstsq(&mg, &target, 1e-13).0;
            let mf = conv_matrix(&f, q_points, r_points);
            g = lstsq(&mf, &target, 1e-13).0;
            let res = (&mf * &g - &target).norm() / scale.max(f64::MIN_POSITIVE);
            if res < 1e-14 {
                best = res;
                break;
            }
            if (best - res).abs() < 1e-16 {
                best = res;
                break; // stalled
            }
            best = res;
        }
        if best < 1e-4 {
            gauss_newton_polish(
                &target,
                product_points,
                q_points,
                r_points,
                &mut f,
                &mut g,
                &conv_matrix,
            );
            let mf = conv_matrix(&f, q_points, r_points);
            let res = (&mf * &g - &target).norm() / scale.max(f64::MIN_POSITIVE);
            if res <= ACCEPT_TOL {
                let mut fp = LaurentPoly::zero(p.nvars());
                for (j, &e) in q_points.iter().enumerate() {
                    fp.add_term(&[e.0 as i32, e.1 as i32], f[j]);
                }
                let mut gp = LaurentPoly::zero(p.nvars());
                for (k, &e) in r_points.iter().enumerate() {
                    gp.add_term(&[e.0 as i32, e.1 as i32], g[k]);
                }
                return Some((fp.cleaned(), gp.cleaned()));
            }
        }
    }
    None
}

/// A few joint Gauss-Newton steps on the bilinear residual, with the scalar
/// gauge `(f, g) -> (t f, g / t)` fixed by pinning the largest coefficient
/// of `f`.
#[allow(clippy::too_many_arguments)]
fn gauss_newton_polish(
    target: &DVector<Complex64>,
    product_points: &[(i64, i64)],
    q_points: &[(i64, i64)],
    r_points: &[(i64, i64)],
    f: &mut DVector<Complex64>,
    g: &mut DVector<Complex64>,
    conv_matrix: &dyn Fn(&DVector<Complex64>, &[(i64, i64)], &[(i64, i64)]) -> DMatrix<Complex64>,
) {
    let nq = q_points.len();
    let nr = r_points.len();
    let pin = f
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    for _ in 0..8 {
        let mg = conv_matrix(f, q_points, r_points); // d residual / d g
        let mf = conv_matrix(g, r_points, q_points); // d residual / d f
        let residual = &mg * &*g - target;
        let rows = product_points.len() + 1;
        let mut jac = DMatrix::zeros(rows, nq + nr);
        jac.view_mut((0, 0), (product_points.len(), nq)).copy_from(&mf);
        jac.view_mut((0, nq), (product_points.len(), nr)).copy_from(&mg);
        // Gauge row: keep f[pin] fixed.
        jac[(product_points.len(), pin)] = Complex64::new(1.0, 0.0);
        let mut rhs = DVector::zeros(rows);
        for i in 0..product_points.len() {
            rhs[i] = -residual[i];
        }
        let (delta, _) = lstsq(&jac, &rhs, 1e-13);
        for i in 0..nq {
            f[i] += delta[i];
        }
        for k in 0..nr {
            g[k] += delta[nq + k];
        }
        if delta.norm() < 1e-15 {
            break;
        }
    }
}

/// Durand-Kerner iteration for the roots of a dense univariate complex
/// polynomial (ascending coefficients, nonzero leading term).
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    assert!(deg >= 1);
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |t: Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            acc = acc * t + c;
        }
        acc
    };
    let radius = 1.0
        + monic[..deg]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|k| seed.powu(k as u32 + 1) * radius / seed.norm())
        .collect();
    for _ in 0..500 {
        let mut converged = true;
        for j in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for k in 0..deg {
                if k != j {
                    denom *= roots[j] - roots[k];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-20, 0.0);
            }
            let step = eval(roots[j]) / denom;
            roots[j] -= step;
            if step.norm() > 1e-14 * (1.0 + roots[j].norm()) {
                converged = false;
            }
        }
        if converged {
            break;
        }
    }
    roots
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// Andrew's monotone chain; returns hull vertices in counterclockwise
/// order. Degenerate inputs (a point, a segment) return 1 or 2 vertices.
fn convex_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    if lower.len() + upper.len() < 3 {
        // All points collinear.
        return vec![*pts.first().unwrap(), *pts.last().unwrap()];
    }
    lower.extend(upper);
    lower
}

/// Lattice points inside or on a convex hull given in counterclockwise
/// order (degenerate hulls allowed).
fn lattice_points(hull: &[(i64, i64)]) -> Vec<(i64, i64)> {
    match hull.len() {
        0 => return Vec::new(),
        1 => return vec![hull[0]],
        2 => {
            let (a, b) = (hull[0], hull[1]);
            let v = (b.0 - a.0, b.1 - a.1);
            let g = gcd(v.0.abs(), v.1.abs());
            return (0..=g)
                .map(|k| (a.0 + k * v.0 / g, a.1 + k * v.1 / g))
                .collect();
        }
        _ => {}
    }
    let minx = hull.iter().map(|p| p.0).min().unwrap();
    let maxx = hull.iter().map(|p| p.0).max().unwrap();
    let miny = hull.iter().map(|p| p.1).min().unwrap();
    let maxy = hull.iter().map(|p| p.1).max().unwrap();
    let inside = |p: (i64, i64)| {
        for i in 0..hull.len() {
            let a = hull[i];
            let b = hull[(i + 1) % hull.len()];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross < 0 {
                return false;
            }
        }
        true
    };
    let mut out = Vec::new();
    for x in minx..=maxx {
        for y in miny..=maxy {
            if inside((x, y)) {
                out.push((x, y));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::hexagonal_weight;
    use super::*;

    #[test]
    fn hexagonal_weight_factors() {
        let g = hexagonal_weight();
        match factor_probe(&g, 16, 7).unwrap() {
            FactorVerdict::Factored(f, h) => {
                assert!(f.num_terms() >= 2 && h.num_terms() >= 2);
                assert!(f.mul(&h).unwrap().rel_distance(&g) < 1e-8);
            }
            other => panic!("expected a factorization, got {other:?}"),
        }
    }

    #[test]
    fn univariate_quadratic_factors() {
        // z + 3 + 2/z = (z + 1)(z + 2)/z
        let mut p = LaurentPoly::zero(1);
        p.add_term(&[1], Complex64::new(1.0, 0.0));
        p.add_term(&[0], Complex64::new(3.0, 0.0));
        p.add_term(&[-1], Complex64::new(2.0, 0.0));
        match factor_probe(&p, 8, 3).unwrap() {
            FactorVerdict::Factored(f, g) => {
                assert!(f.mul(&g).unwrap().rel_distance(&p) < 1e-10);
            }
            other => panic!("expected a factorization, got {other:?}"),
        }
    }

    #[test]
    fn monomial_is_a_unit() {
        let p = LaurentPoly::monomial(2, &[3, -2], 5.0);
        assert!(matches!(
            factor_probe(&p, 8, 1).unwrap(),
            FactorVerdict::NoFactorizationFound { .. }
        ));
    }

    #[test]
    fn binomial_is_irreducible() {
        // 1 + z1 z2: segment support of length 1.
        let mut p = LaurentPoly::constant(2, 1.0);
        p.add_term(&[1, 1], Complex64::new(1.0, 0.0));
        assert!(matches!(
            factor_probe(&p, 8, 1).unwrap(),
            FactorVerdict::NoFactorizationFound { .. }
        ));
    }

    #[test]
    fn collinear_bivariate_support_splits() {
        // (z1/z2)^2 + 3 (z1/z2) + 2 factors through the composite variable.
        let mut p = LaurentPoly::zero(2);
        p.add_term(&[2, -2], Complex64::new(1.0, 0.0));
        p.add_term(&[1, -1], Complex64::new(3.0, 0.0));
        p.add_term(&[0, 0], Complex64::new(2.0, 0.0));
        match factor_probe(&p, 8, 5).unwrap() {
            FactorVerdict::Factored(f, g) => {
                assert!(f.mul(&g).unwrap().rel_distance(&p) < 1e-10);
            }
            other => panic!("expected a factorization, got {other:?}"),
        }
    }

    #[test]
    fn product_of_random_supports_is_found() {
        // (1 + 2 z1 + z2)(3 + z1 - z2) reconstructed from its expansion.
        let mut f = LaurentPoly::constant(2, 1.0);
        f.add_term(&[1, 0], Complex64::new(2.0, 0.0));
        f.add_term(&[0, 1], Complex64::new(1.0, 0.0));
        let mut g = LaurentPoly::constant(2, 3.0);
        g.add_term(&[1, 0], Complex64::new(1.0, 0.0));
        g.add_term(&[0, 1], Complex64::new(-1.0, 0.0));
        let d = f.mul(&g).unwrap();
        match factor_probe(&d, 16, 11).unwrap() {
            FactorVerdict::Factored(a, b) => {
                assert!(a.mul(&b).unwrap().rel_distance(&d) < 1e-8);
            }
            other => panic!("expected a factorization, got {other:?}"),
        }
    }

    #[test]
    fn generic_dense_quadratic_is_not_factored() {
        // A generic inhomogeneous quadratic in two variables is irreducible.
        let mut p = LaurentPoly::zero(2);
        p.add_term(&[0, 0], Complex64::new(1.0, 0.0));
        p.add_term(&[1, 0], Complex64::new(0.3, 0.0));
        p.add_term(&[0, 1], Complex64::new(-0.7, 0.0));
        p.add_term(&[2, 0], Complex64::new(1.1, 0.0));
        p.add_term(&[1, 1], Complex64::new(0.9, 0.0));
        p.add_term(&[0, 2], Complex64::new(1.7, 0.0));
        assert!(matches!(
            factor_probe(&p, 16, 2).unwrap(),
            FactorVerdict::NoFactorizationFound { .. }
        ));
    }

    #[test]
    fn polytope_cap_is_enforced() {
        let mut p = LaurentPoly::zero(2);
        p.add_term(&[0, 0], Complex64::new(1.0, 0.0));
        p.add_term(&[12, 0], Complex64::new(1.0, 0.0));
        p.add_term(&[0, 12], Complex64::new(1.0, 0.0));
        assert!(matches!(
            factor_probe(&p, 16, 2),
            Err(QgError::SupportTooLarge { .. })
        ));
    }

    #[test]
    fn roots_of_cubic() {
        // (t - 1)(t - 2i)(t + 3) = t^3 + (2 - 2i) t^2 + (-3 - 4i) t + 6i
        let coeffs = [
            Complex64::new(0.0, 6.0),
            Complex64::new(-3.0, -4.0),
            Complex64::new(2.0, -2.0),
            Complex64::new(1.0, 0.0),
        ];
        let mut roots = polynomial_roots(&coeffs);
        roots.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((roots[0] - Complex64::new(-3.0, 0.0)).norm() < 1e-10);
        assert!((roots[1] - Complex64::new(0.0, 2.0)).norm() < 1e-10);
        assert!((roots[2] - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }
}

//! Determinants of square matrices with Laurent-polynomial entries.
//!
//! The primary path samples the matrix on a per-variable root-of-unity grid
//! sized by an exponent-span bound, takes numeric determinants, and inverts
//! the discrete Fourier system. Supports here are tiny, so the dense
//! O(grid^2) inverse transform is cheap and avoids symbolic expression
//! swell. A recursive cofactor expansion is kept as an independent oracle.

use super::LaurentPoly;
use crate::error::{QgError, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Determinant by evaluation-interpolation. Entries must all share the same
/// number of variables; the matrix must be square and nonempty rows/columns
/// consistent.
pub fn det(entries: &[Vec<LaurentPoly>]) -> Result<LaurentPoly> {
    let n = entries.len();
    if n == 0 {
        return Ok(LaurentPoly::constant(0, 1.0));
    }
    let nvars = entries[0][0].nvars();
    for row in entries {
        if row.len() != n {
            return Err(QgError::DimensionMismatch(row.len(), n));
        }
        for p in row {
            if p.nvars() != nvars {
                return Err(QgError::DimensionMismatch(p.nvars(), nvars));
            }
        }
    }

    // Exponent-span bound for the determinant: per variable, sum over rows
    // of the largest (resp. smallest) exponent appearing in that row.
    let mut lo = vec![0i64; nvars];
    let mut hi = vec![0i64; nvars];
    for row in entries {
        for v in 0..nvars {
            let mut row_lo = i64::MAX;
            let mut row_hi = i64::MIN;
            for p in row {
                if let Some((a, b)) = p.var_span(v) {
                    row_lo = row_lo.min(a as i64);
                    row_hi = row_hi.max(b as i64);
                }
            }
            if row_lo == i64::MAX {
                // Row of zero polynomials: the determinant is zero.
                return Ok(LaurentPoly::zero(nvars));
            }
            lo[v] += row_lo;
            hi[v] += row_hi;
        }
    }
    let sizes: Vec<usize> = (0..nvars).map(|v| (hi[v] - lo[v] + 1) as usize).collect();

    let result = interpolate(entries, nvars, &lo, &sizes, 1.0)?;
    if interpolation_ok(entries, &result) {
        return Ok(result);
    }
    // Degenerate sampling (an entry singularity on the unit grid, say) is
    // detected by re-evaluation; retry on a slightly larger radius.
    let retry = interpolate(entries, nvars, &lo, &sizes, 1.07)?;
    if interpolation_ok(entries, &retry) {
        Ok(retry)
    } else if residual_at_probes(entries, &retry) < residual_at_probes(entries, &result) {
        Ok(retry)
    } else {
        Ok(result)
    }
}

fn interpolate(
    entries: &[Vec<LaurentPoly>],
    nvars: usize,
    lo: &[i64],
    sizes: &[usize],
    radius: f64,
) -> Result<LaurentPoly> {
    let total: usize = sizes.iter().product();
    let n = entries.len();

    // Sample determinants on the product grid of scaled roots of unity.
    let mut samples = vec![Complex64::new(0.0, 0.0); total];
    let mut idx = vec![0usize; nvars];
    let mut z = vec![Complex64::new(0.0, 0.0); nvars];
    for (flat, sample) in samples.iter_mut().enumerate() {
        unflatten(flat, sizes, &mut idx);
        for v in 0..nvars {
            let angle = 2.0 * std::f64::consts::PI * idx[v] as f64 / sizes[v] as f64;
            z[v] = Complex64::from_polar(radius, angle);
        }
        let m = DMatrix::from_fn(n, n, |i, j| entries[i][j].eval(&z).expect("nonzero grid"));
        // Multiply by z^{-lo} so the sampled function is a plain polynomial
        // with exponents in [0, size-1] per variable.
        let mut twiddle = Complex64::new(1.0, 0.0);
        for v in 0..nvars {
            twiddle *= z[v].powi(-(lo[v] as i32));
        }
        *sample = m.lu().determinant() * twiddle;
    }

    // Invert the DFT one variable at a time.
    let mut coeffs = samples;
    for v in 0..nvars {
        coeffs = idft_along(&coeffs, sizes, v);
    }

    // Undo the radius scaling and reattach the exponent offset.
    let mut out = LaurentPoly::zero(nvars);
    let mut e = vec![0i32; nvars];
    for (flat, &cval) in coeffs.iter().enumerate() {
        unflatten(flat, sizes, &mut idx);
        let mut scale = 1.0;
        for v in 0..nvars {
            e[v] = (lo[v] + idx[v] as i64) as i32;
            scale *= radius.powi(idx[v] as i32);
        }
        out.add_term(&e, cval / scale);
    }
    Ok(out.cleaned())
}

fn unflatten(mut flat: usize, sizes: &[usize], idx: &mut [usize]) {
    for v in (0..sizes.len()).rev() {
        idx[v] = flat % sizes[v];
        flat /= sizes[v];
    }
}

/// Inverse DFT along variable `v` of a flattened multi-dimensional array.
fn idft_along(data: &[Complex64], sizes: &[usize], v: usize) -> Vec<Complex64> {
    let nv = sizes[v];
    let stride: usize = sizes[v + 1..].iter().product();
    let outer: usize = data.len() / (nv * stride);
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for o in 0..outer {
        for s in 0..stride {
            for m in 0..nv {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..nv {
                    let angle = -2.0 * std::f64::consts::PI * (k * m % nv) as f64 / nv as f64;
                    acc += data[(o * nv + k) * stride + s] * Complex64::from_polar(1.0, angle);
                }
                out[(o * nv + m) * stride + s] = acc / nv as f64;
            }
        }
    }
    out
}

fn residual_at_probes(entries: &[Vec<LaurentPoly>], candidate: &LaurentPoly) -> f64 {
    let nvars = candidate.nvars();
    let n = entries.len();
    let mut worst = 0.0f64;
    for probe in 0..3 {
        let z: Vec<Complex64> = (0..nvars)
            .map(|v| Complex64::from_polar(1.0, 0.7 + 1.9 * probe as f64 + 0.41 * v as f64))
            .collect();
        let m = DMatrix::from_fn(n, n, |i, j| entries[i][j].eval(&z).expect("torus point"));
        let direct = m.lu().determinant();
        let interp = candidate.eval(&z).expect("torus point");
        let scale = 1.0 + direct.norm();
        worst = worst.max((direct - interp).norm() / scale);
    }
    worst
}

fn interpolation_ok(entries: &[Vec<LaurentPoly>], candidate: &LaurentPoly) -> bool {
    residual_at_probes(entries, candidate) < 1e-8
}

/// Recursive cofactor expansion; exponential in the matrix size and kept
/// only as an independent check of `det`.
pub fn det_cofactor(entries: &[Vec<LaurentPoly>]) -> Result<LaurentPoly> {
    let n = entries.len();
    if n == 0 {
        return Ok(LaurentPoly::constant(0, 1.0));
    }
    let nvars = entries[0][0].nvars();
    if n == 1 {
        return Ok(entries[0][0].clone());
    }
    let mut acc = LaurentPoly::zero(nvars);
    for (j, pivot) in entries[0].iter().enumerate() {
        if pivot.is_zero() {
            continue;
        }
        let minor: Vec<Vec<LaurentPoly>> = entries[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let term = pivot.mul(&det_cofactor(&minor)?)?.scale(sign);
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

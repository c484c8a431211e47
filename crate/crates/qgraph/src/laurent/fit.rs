//! Least-squares fitting of a Laurent polynomial as a polynomial in a
//! composite variable `zeta`.

use super::LaurentPoly;
use crate::error::{QgError, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::collections::BTreeSet;

/// Result of fitting `D = sum_k coeffs[k] * zeta^k`.
#[derive(Debug, Clone)]
pub struct ZetaFit {
    /// Fit coefficients `a_0, ..., a_max_deg` (untrimmed).
    pub coeffs: Vec<Complex64>,
    /// `|a_k|` times the max coefficient modulus of `zeta^k`: the size of
    /// each power's contribution to `D`. The coefficients themselves span
    /// wildly different magnitudes, so degree decisions use these.
    pub contributions: Vec<f64>,
    /// Max-norm of `D - sum_k a_k zeta^k` relative to the max-norm of `D`.
    pub residual: f64,
}

impl ZetaFit {
    /// Coefficients with negligible leading entries removed (by
    /// contribution, not raw magnitude); the fitted degree is
    /// `trimmed().len() - 1`.
    pub fn trimmed(&self) -> Vec<Complex64> {
        let scale = self.contributions.iter().copied().fold(0.0, f64::max);
        let mut out = self.coeffs.clone();
        let mut contrib = self.contributions.clone();
        while out.len() > 1 && *contrib.last().unwrap() <= 1e-10 * scale {
            out.pop();
            contrib.pop();
        }
        out
    }
}

/// Solves `min || D - sum_k a_k zeta^k ||` over the union of the monomial
/// supports, by column-pivoted least squares over the complex numbers.
///
/// Returns `RankDeficient` when the powers of `zeta` are linearly dependent
/// as polynomials, in which case the coefficients are not determined.
pub fn fit_in_zeta(d: &LaurentPoly, zeta: &LaurentPoly, max_deg: usize) -> Result<ZetaFit> {
    if d.nvars() != zeta.nvars() {
        return Err(QgError::DimensionMismatch(d.nvars(), zeta.nvars()));
    }
    let nvars = d.nvars();

    let mut powers: Vec<LaurentPoly> = vec![LaurentPoly::constant(nvars, 1.0)];
    for _ in 1..=max_deg {
        powers.push(powers.last().unwrap().mul(zeta)?);
    }

    let mut support: BTreeSet<Vec<i32>> = d.support().into_iter().collect();
    for p in &powers {
        support.extend(p.support());
    }
    let support: Vec<Vec<i32>> = support.into_iter().collect();

    let rows = support.len();
    let cols = max_deg + 1;
    // Powers of zeta span wildly different magnitudes; normalize columns
    // so rank detection sees dependence, not scaling.
    let col_scale: Vec<f64> = powers
        .iter()
        .map(|p| p.max_coeff().max(f64::MIN_POSITIVE))
        .collect();
    let a = DMatrix::from_fn(rows, cols, |i, j| powers[j].coeff(&support[i]) / col_scale[j]);
    let b = DVector::from_fn(rows, |i, _| d.coeff(&support[i]));

    let (x, rank) = lstsq(&a, &b, 1e-12);
    if rank < cols {
        return Err(QgError::RankDeficient { rank, cols });
    }

    let coeffs: Vec<Complex64> = x
        .iter()
        .zip(&col_scale)
        .map(|(v, s)| v / s)
        .collect();
    let contributions: Vec<f64> = x.iter().map(|v| v.norm()).collect();
    let mut combo = LaurentPoly::zero(nvars);
    for (k, p) in powers.iter().enumerate() {
        combo = combo.add(&p.scale(coeffs[k]))?;
    }
    let scale = d.max_coeff().max(f64::MIN_POSITIVE);
    let residual = d.sub(&combo)?.max_coeff() / scale;

    Ok(ZetaFit {
        coeffs,
        contributions,
        residual,
    })
}

/// Complex least squares `min ||A x - b||` via SVD, returning the solution
/// and the numerical rank at relative tolerance `tol`.
pub(crate) fn lstsq(
    a: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
    tol: f64,
) -> (DVector<Complex64>, usize) {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > tol * smax)
        .count();
    let x = svd
        .solve(b, tol * smax)
        .unwrap_or_else(|_| DVector::zeros(a.ncols()));
    (x, rank)
}

#[cfg(test)]
mod tests {
    use super::super::hexagonal_weight;
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn recovers_constructed_polynomial() {
        // D = zeta^2 - 3 zeta + 2 with zeta the hexagonal weight.
        let zeta = hexagonal_weight();
        let d = zeta
            .mul(&zeta)
            .unwrap()
            .add(&zeta.scale(-3.0))
            .unwrap()
            .add(&LaurentPoly::constant(2, 2.0))
            .unwrap();
        let fit = fit_in_zeta(&d, &zeta, 2).unwrap();
        assert!(fit.residual < 1e-12, "residual {}", fit.residual);
        assert!((fit.coeffs[0] - c(2.0)).norm() < 1e-10);
        assert!((fit.coeffs[1] - c(-3.0)).norm() < 1e-10);
        assert!((fit.coeffs[2] - c(1.0)).norm() < 1e-10);
    }

    #[test]
    fn disjoint_supports_leave_large_residual() {
        // D = z1 + z2 cannot be represented in powers of zeta = z1 z2.
        let mut d = LaurentPoly::zero(2);
        d.add_term(&[1, 0], c(1.0));
        d.add_term(&[0, 1], c(1.0));
        let zeta = LaurentPoly::monomial(2, &[1, 1], 1.0);
        let fit = fit_in_zeta(&d, &zeta, 3).unwrap();
        assert!(fit.residual >= 0.5, "residual {}", fit.residual);
    }

    #[test]
    fn constant_zeta_is_rank_deficient() {
        let d = hexagonal_weight();
        let zeta = LaurentPoly::constant(2, 2.0);
        assert!(matches!(
            fit_in_zeta(&d, &zeta, 2),
            Err(QgError::RankDeficient { .. })
        ));
    }

    #[test]
    fn trim_detects_true_degree()  {
        let zeta = hexagonal_weight();
        let d = zeta.scale(4.0).add(&LaurentPoly::constant(2, 1.0)).unwrap();
        let fit = fit_in_zeta(&d, &zeta, 4).unwrap();
        assert!(fit.residual < 1e-12);
        assert_eq!(fit.trimmed().len(), 2);
    }
}

//! Sparse multivariate Laurent polynomials with complex coefficients.
//!
//! Terms are stored in a `BTreeMap` keyed by exponent vectors, which keeps
//! iteration (and the debug text form) deterministic. Coefficients whose
//! modulus falls below `DROP_TOL` relative to the largest coefficient are
//! dropped, so structural zeros produced by cancellation do not pollute
//! supports and Newton polytopes.

mod det;
mod factor;
mod fit;

pub use det::{det, det_cofactor};
pub use factor::{factor_probe, polynomial_roots, FactorVerdict, MonomialClass};
pub use fit::{fit_in_zeta, ZetaFit};

use crate::error::{QgError, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

/// Relative coefficient drop tolerance.
pub const DROP_TOL: f64 = 1e-12;

/// A sparse Laurent polynomial in `nvars` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i32>, Complex64>,
}

impl LaurentPoly {
    /// The zero polynomial.
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    /// A constant polynomial.
    pub fn constant(nvars: usize, value: impl Into<Complex64>) -> Self {
        let mut p = Self::zero(nvars);
        let v = value.into();
        if v != Complex64::new(0.0, 0.0) {
            p.terms.insert(vec![0; nvars], v);
        }
        p
    }

    /// A single term `coeff * z^exponents`.
    pub fn monomial(nvars: usize, exponents: &[i32], coeff: impl Into<Complex64>) -> Self {
        assert_eq!(exponents.len(), nvars);
        let mut p = Self::zero(nvars);
        let v = coeff.into();
        if v != Complex64::new(0.0, 0.0) {
            p.terms.insert(exponents.to_vec(), v);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterates terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&[i32], Complex64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn coeff(&self, exponents: &[i32]) -> Complex64 {
        self.terms
            .get(exponents)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Largest coefficient modulus (0 for the zero polynomial).
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Adds `coeff * z^exponents` in place.
    pub fn add_term(&mut self, exponents: &[i32], coeff: Complex64) {
        assert_eq!(exponents.len(), self.nvars);
        let entry = self
            .terms
            .entry(exponents.to_vec())
            .or_insert(Complex64::new(0.0, 0.0));
        *entry += coeff;
        if entry.norm() == 0.0 {
            self.terms.remove(exponents);
        }
    }

    /// Removes coefficients below `DROP_TOL` relative to the largest one.
    pub fn cleaned(mut self) -> Self {
        let cutoff = DROP_TOL * self.max_coeff();
        self.terms.retain(|_, c| c.norm() > cutoff);
        self
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(QgError::DimensionMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c);
        }
        Ok(out.cleaned())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, -c);
        }
        Ok(out.cleaned())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = Self::zero(self.nvars);
        let mut e = vec![0i32; self.nvars];
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                for i in 0..self.nvars {
                    e[i] = ea[i] + eb[i];
                }
                out.add_term(&e, ca * cb);
            }
        }
        Ok(out.cleaned())
    }

    pub fn scale(&self, factor: impl Into<Complex64>) -> Self {
        let f = factor.into();
        let mut out = Self::zero(self.nvars);
        if f == Complex64::new(0.0, 0.0) {
            return out;
        }
        for (e, c) in self.terms() {
            out.terms.insert(e.to_vec(), c * f);
        }
        out
    }

    /// Multiplies by the monomial `z^shift`.
    pub fn mul_monomial(&self, shift: &[i32]) -> Self {
        assert_eq!(shift.len(), self.nvars);
        let mut out = Self::zero(self.nvars);
        for (e, c) in self.terms() {
            let ne: Vec<i32> = e.iter().zip(shift).map(|(a, b)| a + b).collect();
            out.terms.insert(ne, c);
        }
        out
    }

    /// Substitutes `z -> z^{-1}` (negates all exponents).
    pub fn invert_vars(&self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in self.terms() {
            out.terms.insert(e.iter().map(|x| -x).collect(), c);
        }
        out
    }

    /// Evaluates at `z`; every coordinate must be nonzero.
    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.nvars {
            return Err(QgError::DimensionMismatch(z.len(), self.nvars));
        }
        if let Some(i) = z.iter().position(|v| v.norm() == 0.0) {
            return Err(QgError::ZeroEvaluationPoint(i));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in self.terms() {
            let mut t = c;
            for (zi, &ei) in z.iter().zip(e) {
                t *= zi.powi(ei);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Per-variable exponent range `(min, max)`, or `None` for the zero
    /// polynomial.
    pub fn var_span(&self, var: usize) -> Option<(i32, i32)> {
        assert!(var < self.nvars);
        let mut span: Option<(i32, i32)> = None;
        for (e, _) in self.terms() {
            let v = e[var];
            span = Some(match span {
                None => (v, v),
                Some((lo, hi)) => (lo.min(v), hi.max(v)),
            });
        }
        span
    }

    /// Componentwise minimum exponent over the support.
    pub fn min_exponents(&self) -> Option<Vec<i32>> {
        self.terms.keys().fold(None, |acc: Option<Vec<i32>>, e| {
            Some(match acc {
                None => e.clone(),
                Some(m) => m.iter().zip(e).map(|(a, b)| *a.min(b)).collect(),
            })
        })
    }

    /// Support as a list of exponent vectors (lexicographic order).
    pub fn support(&self) -> Vec<Vec<i32>> {
        self.terms.keys().cloned().collect()
    }

    /// Largest coefficient modulus of the difference, relative to the
    /// largest coefficient modulus of `self` (or absolute if `self` is 0).
    pub fn rel_distance(&self, other: &Self) -> f64 {
        let scale = self.max_coeff().max(other.max_coeff());
        if scale == 0.0 {
            return 0.0;
        }
        let diff = self.sub(other).unwrap_or_else(|_| Self::zero(self.nvars));
        // `sub` drops relative noise below DROP_TOL; that floor is the
        // resolution of the comparison.
        diff.max_coeff() / scale
    }
}

impl fmt::Display for LaurentPoly {
    /// One term per line, lexicographic exponent order:
    /// `(<re>, <im>) * z1^a z2^b`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return writeln!(f, "0");
        }
        for (e, c) in self.terms() {
            write!(f, "({:+.12e}, {:+.12e})", c.re, c.im)?;
            if e.iter().any(|&p| p != 0) {
                write!(f, " *")?;
                for (i, &p) in e.iter().enumerate() {
                    if p != 0 {
                        write!(f, " z{}^{}", i + 1, p)?;
                    }
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `(1 + z1 + z2)(1 + 1/z1 + 1/z2)`, the hexagonal lattice weight whose
/// restriction to the torus has range [0, 9].
pub fn hexagonal_weight() -> LaurentPoly {
    let mut w = LaurentPoly::constant(2, 1.0);
    w.add_term(&[1, 0], Complex64::new(1.0, 0.0));
    w.add_term(&[0, 1], Complex64::new(1.0, 0.0));
    w.mul(&w.invert_vars()).unwrap()
}

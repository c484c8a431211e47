//! Transfer matrices, Dirichlet spectral functions, and edge
//! Dirichlet-to-Neumann data for `-d²/dx² + q(x)` on an interval.
//!
//! Potentials are piecewise constant, so each segment has the closed-form
//! constant-coefficient transfer matrix and the full matrix is the ordered
//! product. A fixed-step RK4 integrator of the same ODE serves as an
//! independent cross-check.

use crate::error::{QgError, Result};

/// Relative tolerance for the consistency of segment lengths.
const LENGTH_TOL: f64 = 1e-12;

/// `|s(lambda)|` at or below `POLE_TOL * (1 + |lambda|)` counts as a pole of
/// the edge DtN map (lambda is a Dirichlet eigenvalue of the edge).
pub const POLE_TOL: f64 = 1e-9;

/// A piecewise-constant potential on an interval, stored as ordered
/// segments of (length, value).
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    segments: Vec<(f64, f64)>,
    total_length: f64,
}

impl Potential {
    /// Builds a potential from ordered `(length, value)` segments.
    pub fn new(segments: Vec<(f64, f64)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(QgError::InvalidPotential("no segments".into()));
        }
        for &(len, _) in &segments {
            if !(len > 0.0) || !len.is_finite() {
                return Err(QgError::InvalidPotential(format!(
                    "segment length {len} is not strictly positive"
                )));
            }
        }
        let total_length = segments.iter().map(|&(l, _)| l).sum();
        Ok(Self {
            segments,
            total_length,
        })
    }

    /// The zero potential on `[0, length]`.
    pub fn zero(length: f64) -> Self {
        Self::new(vec![(length, 0.0)]).expect("positive length")
    }

    /// A constant potential `value` on `[0, length]`.
    pub fn constant(value: f64, length: f64) -> Self {
        Self::new(vec![(length, value)]).expect("positive length")
    }

    /// `depth * chi_[a,b]` on `[0, 1]`.
    pub fn well(depth: f64, a: f64, b: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a >= b {
            return Err(QgError::InvalidPotential(format!(
                "well bounds [{a}, {b}] must satisfy 0 <= a < b <= 1"
            )));
        }
        let mut segments = Vec::new();
        if a > 0.0 {
            segments.push((a, 0.0));
        }
        segments.push((b - a, depth));
        if b < 1.0 {
            segments.push((1.0 - b, 0.0));
        }
        Self::new(segments)
    }

    pub fn segments(&self) -> &[(f64, f64)] {
        &self.segments
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    /// The reversed potential `q(L - x)`; rotating a layer by 180 degrees
    /// reverses every potential on it.
    pub fn reversed(&self) -> Self {
        let mut segments = self.segments.clone();
        segments.reverse();
        Self {
            segments,
            total_length: self.total_length,
        }
    }

    /// Whether the segment list is a palindrome, i.e. the potential is
    /// symmetric about the interval center.
    pub fn is_symmetric(&self) -> bool {
        let rev = self.reversed();
        self.segments.len() == rev.segments.len()
            && self
                .segments
                .iter()
                .zip(rev.segments.iter())
                .all(|(a, b)| (a.0 - b.0).abs() <= LENGTH_TOL * self.total_length && a.1 == b.1)
    }

    /// Splits the potential at arclength `x` from the left end, partitioning
    /// the segment containing `x` if necessary.
    pub fn split_at(&self, x: f64) -> Result<(Self, Self)> {
        if !(x > 0.0 && x < self.total_length) {
            return Err(QgError::InvalidPotential(format!(
                "split point {x} outside (0, {})",
                self.total_length
            )));
        }
        let eps = LENGTH_TOL * self.total_length;
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut pos = 0.0;
        for &(len, val) in &self.segments {
            let end = pos + len;
            if end <= x {
                left.push((len, val));
            } else if pos >= x {
                right.push((len, val));
            } else {
                // The cut lands inside this segment; drop slivers created
                // when x coincides with a breakpoint up to rounding.
                if x - pos > eps {
                    left.push((x - pos, val));
                }
                if end - x > eps {
                    right.push((end - x, val));
                }
            }
            pos = end;
        }
        Ok((Self::new(left)?, Self::new(right)?))
    }
}

/// The four entries of the transfer matrix of `-u'' + q u = lambda u` at a
/// fixed energy: `T = [[c, s], [cp, sp]]` maps `(u(0), u'(0))` to
/// `(u(L), u'(L))`. `s` is the Dirichlet spectral function of the edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSpectralData {
    pub c: f64,
    pub s: f64,
    pub cp: f64,
    pub sp: f64,
    pub lambda: f64,
}

impl EdgeSpectralData {
    /// The Wronskian `c*sp - s*cp`; equals 1 for any potential.
    pub fn det(&self) -> f64 {
        self.c * self.sp - self.s * self.cp
    }

    /// Whether `s` is within pole tolerance of zero, i.e. `lambda` is a
    /// Dirichlet eigenvalue of the edge.
    pub fn is_pole(&self) -> bool {
        self.is_pole_with(POLE_TOL)
    }

    /// Pole test with an explicit relative tolerance. Band edges often sit
    /// exactly at Dirichlet eigenvalues, so refinement paths evaluate much
    /// closer to the poles than sweep grids do.
    pub fn is_pole_with(&self, tol: f64) -> bool {
        self.s.abs() <= tol * (1.0 + self.lambda.abs())
    }

    fn compose(later: Self, earlier: Self) -> Self {
        Self {
            c: later.c * earlier.c + later.s * earlier.cp,
            s: later.c * earlier.s + later.s * earlier.sp,
            cp: later.cp * earlier.c + later.sp * earlier.cp,
            sp: later.cp * earlier.s + later.sp * earlier.sp,
            lambda: earlier.lambda,
        }
    }
}

/// Even part of cos(sqrt(x) t)-type series: `coss(x) = cos(sqrt(x))` for
/// `x >= 0`, `cosh(sqrt(-x))` for `x < 0`, evaluated branch-free near 0.
fn coss(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        // cos(sqrt(x)) = sum_k (-x)^k / (2k)!
        1.0 - x / 2.0 + x * x / 24.0 - x * x * x / 720.0
    } else if x > 0.0 {
        x.sqrt().cos()
    } else {
        (-x).sqrt().cosh()
    }
}

/// `sins(x) = sin(sqrt(x))/sqrt(x)` continued through 0 (sinh branch for
/// `x < 0`).
fn sins(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        // sin(sqrt(x))/sqrt(x) = sum_k (-x)^k / (2k+1)!
        1.0 - x / 6.0 + x * x / 120.0 - x * x * x / 5040.0
    } else if x > 0.0 {
        let w = x.sqrt();
        w.sin() / w
    } else {
        let k = (-x).sqrt();
        k.sinh() / k
    }
}

/// Transfer matrix of a single constant segment of length `len` and value
/// `val`: with `w^2 = lambda - val`,
/// `[[cos(w len), sin(w len)/w], [-w sin(w len), cos(w len)]]`,
/// continued through `w = 0` and to the hyperbolic branch.
fn segment_transfer(len: f64, val: f64, lambda: f64) -> EdgeSpectralData {
    let w2 = lambda - val;
    let x = w2 * len * len;
    let c = coss(x);
    let s = len * sins(x);
    // -w sin(w len) = -w^2 len * sin(w len)/(w len)
    let cp = -w2 * len * sins(x);
    EdgeSpectralData {
        c,
        s,
        cp,
        sp: c,
        lambda,
    }
}

/// Closed-form transfer matrix of the whole potential: ordered product of
/// segment matrices, later segments multiplying on the left.
pub fn transfer_matrix(pot: &Potential, lambda: f64) -> EdgeSpectralData {
    let mut acc = EdgeSpectralData {
        c: 1.0,
        s: 0.0,
        cp: 0.0,
        sp: 1.0,
        lambda,
    };
    for &(len, val) in pot.segments() {
        acc = EdgeSpectralData::compose(segment_transfer(len, val, lambda), acc);
    }
    acc
}

/// Independent oracle: fixed-step fourth-order Runge-Kutta integration of
/// `u'' = (q - lambda) u` for the two fundamental solutions. Steps are
/// distributed per segment so the integrator never crosses a jump of `q`.
pub fn transfer_matrix_ode(pot: &Potential, lambda: f64, steps: usize) -> EdgeSpectralData {
    assert!(steps >= 100, "need at least 100 steps");
    // State (u_c, u_c', u_s, u_s') for the two fundamental solutions.
    let mut y = [1.0f64, 0.0, 0.0, 1.0];
    let total = pot.total_length();
    for &(len, val) in pot.segments() {
        let n = ((steps as f64) * len / total).ceil().max(2.0) as usize;
        let h = len / n as f64;
        let k = val - lambda; // u'' = k u on this segment
        let f = |y: &[f64; 4]| [y[1], k * y[0], y[3], k * y[2]];
        for _ in 0..n {
            let k1 = f(&y);
            let y2 = add_scaled(&y, &k1, h / 2.0);
            let k2 = f(&y2);
            let y3 = add_scaled(&y, &k2, h / 2.0);
            let k3 = f(&y3);
            let y4 = add_scaled(&y, &k3, h);
            let k4 = f(&y4);
            for i in 0..4 {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
    }
    EdgeSpectralData {
        c: y[0],
        cp: y[1],
        s: y[2],
        sp: y[3],
        lambda,
    }
}

fn add_scaled(y: &[f64; 4], d: &[f64; 4], h: f64) -> [f64; 4] {
    [
        y[0] + h * d[0],
        y[1] + h * d[1],
        y[2] + h * d[2],
        y[3] + h * d[3],
    ]
}

/// All roots of the Dirichlet spectral function `s(lambda)` in the window,
/// bracketed on a scan grid of `grid` cells and refined by bisection to
/// 1e-9 absolute. Returned sorted ascending.
///
/// The scan is repeated on a doubled grid; if the counts disagree the grid
/// was too coarse and the finer result is used (with a warning).
pub fn dirichlet_zeros(pot: &Potential, window: (f64, f64), grid: usize) -> Vec<f64> {
    let coarse = scan_zeros(pot, window, grid.max(8));
    let fine = scan_zeros(pot, window, 2 * grid.max(8));
    if fine.len() != coarse.len() {
        log::warn!(
            "dirichlet_zeros: scan grid of {} cells too coarse ({} vs {} roots); using the finer scan",
            grid,
            coarse.len(),
            fine.len()
        );
        let finest = scan_zeros(pot, window, 4 * grid.max(8));
        if finest.len() != fine.len() {
            log::warn!("dirichlet_zeros: count still unstable; supply a finer grid");
        }
        return finest;
    }
    fine
}

fn scan_zeros(pot: &Potential, window: (f64, f64), n: usize) -> Vec<f64> {
    let (lo, hi) = window;
    assert!(lo.is_finite() && hi.is_finite() && lo < hi, "window must be finite");
    let s_at = |lam: f64| transfer_matrix(pot, lam).s;
    let mut zeros = Vec::new();
    let mut prev_lam = lo;
    let mut prev_s = s_at(lo);
    for i in 1..=n {
        let lam = lo + (hi - lo) * i as f64 / n as f64;
        let s = s_at(lam);
        if prev_s == 0.0 {
            zeros.push(prev_lam);
        } else if prev_s * s < 0.0 {
            zeros.push(bisect(&s_at, prev_lam, lam, 1e-9));
        }
        prev_lam = lam;
        prev_s = s;
    }
    if prev_s == 0.0 {
        zeros.push(prev_lam);
    }
    zeros
}

/// Bisection to absolute tolerance `tol` on a bracketing interval.
pub fn bisect(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    debug_assert!(fa * f(b) <= 0.0);
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// The edge Dirichlet-to-Neumann map `(1/s) [[-c, 1], [1, -sp]]`, taking
/// boundary values `(f(v), f(w))` to inward derivatives `(f'(v), f'(w))`.
pub fn dtn_edge(esd: &EdgeSpectralData) -> Result<[[f64; 2]; 2]> {
    if esd.is_pole() {
        return Err(QgError::PoleAtLambda {
            lambda: esd.lambda,
            edges: vec![],
        });
    }
    let inv = 1.0 / esd.s;
    Ok([[-esd.c * inv, inv], [inv, -esd.sp * inv]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// The square well used throughout the stacked-graphene examples:
    /// -16 on the middle third of [0, 1].
    pub fn q0() -> Potential {
        Potential::new(vec![(1.0 / 3.0, 0.0), (1.0 / 3.0, -16.0), (1.0 / 3.0, 0.0)]).unwrap()
    }

    /// The asymmetric well -10 on [1/2, 1].
    pub fn qc() -> Potential {
        Potential::new(vec![(0.5, 0.0), (0.5, -10.0)]).unwrap()
    }

    #[test]
    fn free_edge_at_quarter_pi_squared() {
        let t = transfer_matrix(&Potential::zero(1.0), PI * PI / 4.0);
        assert_abs_diff_eq!(t.c, 0.0, epsilon = 1e-14);
        assert_relative_eq!(t.s, 2.0 / PI, max_relative = 1e-14);
        assert_relative_eq!(t.cp, -PI / 2.0, max_relative = 1e-14);
        assert_abs_diff_eq!(t.sp, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn free_edge_at_zero_energy() {
        let t = transfer_matrix(&Potential::zero(1.0), 0.0);
        assert_relative_eq!(t.c, 1.0, max_relative = 1e-15);
        assert_relative_eq!(t.s, 1.0, max_relative = 1e-15);
        assert_abs_diff_eq!(t.cp, 0.0, epsilon = 1e-15);
        assert_relative_eq!(t.sp, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn closed_form_matches_ode_on_square_well() {
        for &lam in &[5.0, 20.0] {
            let a = transfer_matrix(&q0(), lam);
            let b = transfer_matrix_ode(&q0(), lam, 10_000);
            assert_relative_eq!(a.c, b.c, max_relative = 1e-8);
            assert_relative_eq!(a.s, b.s, max_relative = 1e-8);
            assert_relative_eq!(a.cp, b.cp, max_relative = 1e-8);
            assert_relative_eq!(a.sp, b.sp, max_relative = 1e-8);
        }
    }

    #[test]
    fn ode_free_edge_cosine_zero() {
        let t = transfer_matrix_ode(&Potential::zero(1.0), PI * PI / 4.0, 10_000);
        assert_abs_diff_eq!(t.c, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn ode_hyperbolic_branch() {
        // Constant barrier +16 at lambda = 0 gives w^2 = -16, so c = cosh(4).
        let t = transfer_matrix_ode(&Potential::constant(16.0, 1.0), 0.0, 10_000);
        assert_relative_eq!(t.c, 4.0f64.cosh(), max_relative = 1e-6);
        // Constant well -16 at lambda = 0 oscillates: c = cos(4).
        let t = transfer_matrix_ode(&Potential::constant(-16.0, 1.0), 0.0, 10_000);
        assert_relative_eq!(t.c, 4.0f64.cos(), max_relative = 1e-6);
    }

    #[test]
    fn reversal_swaps_and_preserves() {
        let q = Potential::new(vec![(0.5, 0.0), (0.5, -10.0)]).unwrap();
        let r = q.reversed();
        assert_eq!(r.segments(), &[(0.5, -10.0), (0.5, 0.0)]);
        assert_eq!(r.total_length(), q.total_length());
        assert_eq!(r.reversed(), q);
        // The symmetric well reverses to itself.
        assert_eq!(q0().reversed(), q0());
        assert!(q0().is_symmetric());
        assert!(!qc().is_symmetric());
    }

    #[test]
    fn reversal_law_on_transfer_matrix() {
        // T(rev q) = J T(q)^{-1} J with J = diag(1, -1): s fixed, c and sp swap.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let q = random_potential(&mut rng);
            let lam = rng.gen_range(-30.0..150.0);
            let t = transfer_matrix(&q, lam);
            let r = transfer_matrix(&q.reversed(), lam);
            assert_relative_eq!(r.s, t.s, max_relative = 1e-9, epsilon = 1e-12);
            assert_relative_eq!(r.c, t.sp, max_relative = 1e-9, epsilon = 1e-12);
            assert_relative_eq!(r.sp, t.c, max_relative = 1e-9, epsilon = 1e-12);
            assert_relative_eq!(r.cp, t.cp, max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    #[test]
    fn free_dirichlet_zeros() {
        let zeros = dirichlet_zeros(&Potential::zero(1.0), (0.1, 100.0), 400);
        let expect = [PI * PI, 4.0 * PI * PI, 9.0 * PI * PI];
        assert_eq!(zeros.len(), 3);
        for (z, e) in zeros.iter().zip(expect.iter()) {
            assert_abs_diff_eq!(z, e, epsilon = 1e-8);
        }
    }

    #[test]
    fn constant_shift_dirichlet_zeros() {
        // s(lambda) for q = v is the free s at lambda - v.
        let v = -7.0;
        let zeros = dirichlet_zeros(&Potential::constant(v, 1.0), (-10.0, 100.0), 400);
        for (n, z) in zeros.iter().enumerate() {
            let e = v + ((n + 1) as f64 * PI).powi(2);
            assert_abs_diff_eq!(z, &e, epsilon = 1e-8);
        }
        assert!(!zeros.is_empty());
    }

    #[test]
    fn square_well_zeros_match_ode_sign_changes() {
        let zeros = dirichlet_zeros(&q0(), (-20.0, 100.0), 600);
        assert!(!zeros.is_empty());
        for &z in &zeros {
            let lo = transfer_matrix_ode(&q0(), z - 1e-6, 2000).s;
            let hi = transfer_matrix_ode(&q0(), z + 1e-6, 2000).s;
            assert!(lo * hi < 0.0, "ODE oracle disagrees about zero at {z}");
        }
    }

    #[test]
    fn dtn_free_edge() {
        let t = transfer_matrix(&Potential::zero(1.0), PI * PI / 4.0);
        let n = dtn_edge(&t).unwrap();
        let half_pi = PI / 2.0;
        assert_abs_diff_eq!(n[0][0], 0.0, epsilon = 1e-13);
        assert_relative_eq!(n[0][1], half_pi, max_relative = 1e-13);
        assert_relative_eq!(n[1][0], half_pi, max_relative = 1e-13);
        assert_abs_diff_eq!(n[1][1], 0.0, epsilon = 1e-13);
    }

    #[test]
    fn dtn_pole_at_dirichlet_eigenvalue() {
        let t = transfer_matrix(&Potential::zero(1.0), PI * PI);
        assert!(t.is_pole());
        assert!(dtn_edge(&t).is_err());
    }

    #[test]
    fn symmetric_potential_has_equal_diagonal() {
        for &lam in &[-3.0, 2.0, 17.5, 60.0] {
            let t = transfer_matrix(&q0(), lam);
            assert_relative_eq!(t.c, t.sp, max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    pub fn random_potential(rng: &mut ChaCha8Rng) -> Potential {
        let n = rng.gen_range(1..=4);
        let segments = (0..n)
            .map(|_| (rng.gen_range(0.1..0.6), rng.gen_range(-25.0..25.0)))
            .collect();
        Potential::new(segments).unwrap()
    }

    #[test]
    fn wronskian_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let q = random_potential(&mut rng);
            let lam = rng.gen_range(-30.0..150.0);
            let t = transfer_matrix(&q, lam);
            assert_relative_eq!(t.det(), 1.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn split_preserves_segments() {
        let q = q0();
        let (a, b) = q.split_at(1.0 / 3.0).unwrap();
        assert_eq!(a.segments().len(), 1);
        assert_eq!(b.segments().len(), 2);
        assert_relative_eq!(a.total_length() + b.total_length(), 1.0, max_relative = 1e-14);
        let (a, b) = q.split_at(0.5).unwrap();
        assert_relative_eq!(a.total_length(), 0.5, max_relative = 1e-14);
        assert_eq!(b.segments()[0], (1.0 / 3.0 - (0.5 - 1.0 / 3.0), -16.0));
    }

    #[test]
    fn split_composition_matches_whole() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let q = random_potential(&mut rng);
            let x = rng.gen_range(0.05..0.95) * q.total_length();
            let (a, b) = q.split_at(x).unwrap();
            let lam = rng.gen_range(-10.0..80.0);
            let whole = transfer_matrix(&q, lam);
            let left = transfer_matrix(&a, lam);
            let right = transfer_matrix(&b, lam);
            let composed = EdgeSpectralData::compose(right, left);
            assert_relative_eq!(composed.c, whole.c, max_relative = 1e-10, epsilon = 1e-12);
            assert_relative_eq!(composed.s, whole.s, max_relative = 1e-10, epsilon = 1e-12);
            assert_relative_eq!(composed.cp, whole.cp, max_relative = 1e-10, epsilon = 1e-12);
            assert_relative_eq!(composed.sp, whole.sp, max_relative = 1e-10, epsilon = 1e-12);
        }
    }
}

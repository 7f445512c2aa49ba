//! Floating-point check of the local plumbing chart `xy = ε`.
//!
//! The form `η = (a·x^{k+1} + ε^{k+1}·a₋₁)/(x² + y²)·(x dx − y dy)`, with `a = 1` for `k ≠ −1`
//! and `a = 0` for `k = −1`, pulls back along `φ_V(z) = (z, ε/z)` to
//! `a z^k dz + ε^{k+1} a₋₁ dz/z` and along `φ_W(w) = (ε/w, w)` to
//! `ε^{k+1}(−a w^{−k−2} − a₋₁/w) dw`. The residue term enters with a plus sign: the opposite
//! sign flips the residue on both sides.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlumbError {
    #[error("|epsilon| must lie in (0, 1), got {0}")]
    Epsilon(f64),
    #[error("order k must be at least -1, got {0}")]
    Order(i32),
    #[error("sample {0} lies outside sqrt|epsilon| < |z| < 1")]
    Sample(Complex64),
    #[error("point ({x}, {y}) is off the curve xy = epsilon")]
    OffCurve { x: Complex64, y: Complex64 },
    #[error("x^2 + y^2 vanishes at ({x}, {y})")]
    Degenerate { x: Complex64, y: Complex64 },
}

/// Chart data: order, plumbing parameter, residue parameter and sample points.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalPlumbData {
    k: i32,
    epsilon: Complex64,
    a_minus_one: Complex64,
    samples: Vec<Complex64>,
}

impl LocalPlumbData {
    pub fn new(
        k: i32,
        epsilon: Complex64,
        a_minus_one: Complex64,
        samples: Vec<Complex64>,
    ) -> Result<Self, PlumbError> {
        if !(epsilon.norm() > 0.0 && epsilon.norm() < 1.0) {
            return Err(PlumbError::Epsilon(epsilon.norm()));
        }
        if k < -1 {
            return Err(PlumbError::Order(k));
        }
        let inner = epsilon.norm().sqrt();
        if let Some(z) = samples.iter().find(|z| !(z.norm() > inner && z.norm() < 1.0)) {
            return Err(PlumbError::Sample(*z));
        }
        Ok(LocalPlumbData {
            k,
            epsilon,
            a_minus_one,
            samples,
        })
    }

    /// `n` points on a deterministic polar grid filling the annulus `√|ε| < |z| < 1`.
    pub fn with_grid(k: i32, epsilon: Complex64, a_minus_one: Complex64, n: usize) -> Result<Self, PlumbError> {
        Self::new(k, epsilon, a_minus_one, annulus_grid(epsilon.norm().sqrt(), n))
    }

    pub fn k(&self) -> i32 {
        self.k
    }

    pub fn epsilon(&self) -> Complex64 {
        self.epsilon
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    fn leading(&self) -> f64 {
        if self.k == -1 {
            0.0
        } else {
            1.0
        }
    }

    /// `ε^{k+1}`.
    fn scale(&self) -> Complex64 {
        self.epsilon.powi(self.k + 1)
    }

    /// Coefficients of `dx` and `dy` of `η` at a point of `xy = ε`.
    pub fn eval_eta(&self, x: Complex64, y: Complex64) -> Result<(Complex64, Complex64), PlumbError> {
        if (x * y - self.epsilon).norm() > 1e-9 * self.epsilon.norm() {
            return Err(PlumbError::OffCurve { x, y });
        }
        let denominator = x * x + y * y;
        if denominator.norm() == 0.0 {
            return Err(PlumbError::Degenerate { x, y });
        }
        let numerator = self.leading() * x.powi(self.k + 1) + self.scale() * self.a_minus_one;
        let f = numerator / denominator;
        Ok((f * x, -f * y))
    }

    /// `φ_V^* η` at `z`, as the coefficient of `dz`, computed through [`Self::eval_eta`].
    pub fn pullback_v(&self, z: Complex64) -> Result<Complex64, PlumbError> {
        let (x, y) = (z, self.epsilon / z);
        let (cx, cy) = self.eval_eta(x, y)?;
        Ok(cx - cy * self.epsilon / (z * z))
    }

    /// `φ_W^* η` at `w`, as the coefficient of `dw`.
    pub fn pullback_w(&self, w: Complex64) -> Result<Complex64, PlumbError> {
        let (x, y) = (self.epsilon / w, w);
        let (cx, cy) = self.eval_eta(x, y)?;
        Ok(-cx * self.epsilon / (w * w) + cy)
    }

    pub fn closed_form_v(&self, z: Complex64) -> Complex64 {
        self.leading() * z.powi(self.k) + self.scale() * self.a_minus_one / z
    }

    pub fn closed_form_w(&self, w: Complex64) -> Complex64 {
        self.scale() * (-self.leading() * w.powi(-self.k - 2) - self.a_minus_one / w)
    }

    /// Trapezoid rule for `(1/2πi) ∮_{|z|=r} φ_V^* η` with `nodes` equally spaced nodes.
    pub fn residue_v(&self, radius: f64, nodes: usize) -> Result<Complex64, PlumbError> {
        let mut total = Complex64::new(0.0, 0.0);
        for j in 0..nodes {
            let z = Complex64::from_polar(radius, 2.0 * PI * j as f64 / nodes as f64);
            total += self.pullback_v(z)? * z;
        }
        Ok(total / nodes as f64)
    }

    pub fn expected_residue_v(&self) -> Complex64 {
        self.scale() * self.a_minus_one
    }

    pub fn pullback_check(&self, tol: f64) -> Result<PullbackReport, PlumbError> {
        let mut max_rel_err_v: f64 = 0.0;
        let mut max_rel_err_w: f64 = 0.0;
        for &s in &self.samples {
            max_rel_err_v = max_rel_err_v.max(relative_error(self.pullback_v(s)?, self.closed_form_v(s)));
            max_rel_err_w = max_rel_err_w.max(relative_error(self.pullback_w(s)?, self.closed_form_w(s)));
        }
        let residue = self.residue_v(RESIDUE_RADIUS, RESIDUE_NODES)?;
        let expected = self.expected_residue_v();
        let residue_abs_err = (residue - expected).norm();
        Ok(PullbackReport {
            max_rel_err_v,
            max_rel_err_w,
            residue: (residue.re, residue.im),
            expected_residue: (expected.re, expected.im),
            residue_abs_err,
            pass: max_rel_err_v < tol && max_rel_err_w < tol && residue_abs_err < RESIDUE_TOL,
        })
    }
}

pub const RESIDUE_RADIUS: f64 = 0.9;
pub const RESIDUE_NODES: usize = 1 << 10;
pub const RESIDUE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PullbackReport {
    pub max_rel_err_v: f64,
    pub max_rel_err_w: f64,
    pub residue: (f64, f64),
    pub expected_residue: (f64, f64),
    pub residue_abs_err: f64,
    pub pass: bool,
}

/// `|got − expected|/|expected|`, or the absolute error when `expected = 0`.
pub fn relative_error(got: Complex64, expected: Complex64) -> f64 {
    let diff = (got - expected).norm();
    if expected.norm() == 0.0 {
        diff
    } else {
        diff / expected.norm()
    }
}

/// Ten radii by `n/10` angles, offset so no sample sits on a symmetry axis.
pub fn annulus_grid(inner: f64, n: usize) -> Vec<Complex64> {
    let rings = 10.min(n.max(1));
    let per_ring = n.div_ceil(rings);
    (0..n)
        .map(|i| {
            let (ring, slot) = (i / per_ring, i % per_ring);
            let r = inner + (1.0 - inner) * (ring as f64 + 0.5) / rings as f64;
            let theta = 2.0 * PI * (slot as f64 + 0.37) / per_ring as f64;
            Complex64::from_polar(r, theta)
        })
        .collect()
}

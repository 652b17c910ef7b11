//! Fundamental solution of the 2D Laplacian and its normal derivatives.
//!
//! `U(x, y) = −(1/2π) ln ‖y − x‖` solves `−ΔU = δ`. The double layer kernel is
//! `∂U/∂n_y = −(1/2π) (y − x)·n_y / r²` and its adjoint `∂U/∂n_x = (1/2π) (y − x)·n_x / r²`.
//! The hypersingular kernel is only used in its integrated-by-parts form.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, Parametrization, Point};

pub const INV_2PI: f64 = 0.5 / PI;

/// The four boundary integral operators of the Calderón system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// `V`, kernel `U`.
    SingleLayer,
    /// `K`, kernel `∂U/∂n_y`.
    DoubleLayer,
    /// `K′`, kernel `∂U/∂n_x`.
    AdjointDoubleLayer,
    /// `D = ∂²U/∂n_x∂n_y`. Its Galerkin form is evaluated as
    /// `⟨D u, v⟩ = −⟨V ∂ₛu, ∂ₛv⟩`.
    Hypersingular,
}

impl KernelKind {
    /// Kernels whose Galerkin matrices are symmetric on identical spaces.
    pub fn is_symmetric(self) -> bool {
        matches!(self, Self::SingleLayer | Self::Hypersingular)
    }

    /// Kernels with a logarithmic singularity (after integration by parts).
    pub fn is_logarithmic(self) -> bool {
        self.is_symmetric()
    }
}

/// `U(x, y) = −(1/2π) ln ‖y − x‖`.
pub fn fundamental_solution(x: Point, y: Point) -> Result<f64> {
    let r = (y - x).norm();
    if r == 0.0 {
        return Err(Error::Coincident);
    }
    Ok(-INV_2PI * r.ln())
}

/// `∂U/∂n_y(x, y)`.
pub fn double_layer_kernel(x: Point, y: Point, n_y: Point) -> Result<f64> {
    let d = y - x;
    let r2 = d.norm_squared();
    if r2 == 0.0 {
        return Err(Error::Coincident);
    }
    Ok(-INV_2PI * d.dot(&n_y) / r2)
}

/// `∂U/∂n_x(x, y)`.
pub fn adjoint_double_layer_kernel(x: Point, y: Point, n_x: Point) -> Result<f64> {
    let d = y - x;
    let r2 = d.norm_squared();
    if r2 == 0.0 {
        return Err(Error::Coincident);
    }
    Ok(INV_2PI * d.dot(&n_x) / r2)
}

/// Unchecked `∂U/∂n_y` for quadrature loops.
#[inline]
pub(crate) fn dl(x: Point, y: Point, n_y: Point) -> f64 {
    let d = y - x;
    -INV_2PI * d.dot(&n_y) / d.norm_squared()
}

/// Unchecked `∂U/∂n_x` for quadrature loops.
#[inline]
pub(crate) fn adl(x: Point, y: Point, n_x: Point) -> f64 {
    let d = y - x;
    INV_2PI * d.dot(&n_x) / d.norm_squared()
}

/// Limit of `∂U/∂n_y(C(s), C(t))` as `s → t`, equal to `−σκ(t)/(4π)`.
pub fn coincident_limit_double_layer(curve: &BoundaryCurve, t: f64) -> Result<f64> {
    let (a, b) = curve.domain();
    if !(t >= a && t <= b) {
        return Err(Error::Domain { t, a, b });
    }
    if let Parametrization::Spline(s) = curve.parametrization() {
        let k = s.knots.order();
        let m = s.knots.multiplicity(t);
        if t > a && t < b && m > 0 && m + 3 > k {
            return Err(Error::Geometry(format!("curve is not C2 at t = {t}")));
        }
    }
    Ok(-curve.outward_sign() * curve.curvature(t) / (4.0 * PI))
}

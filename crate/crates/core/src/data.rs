//! Boundary data and exact solutions.

use num_complex::Complex64;

use crate::geometry::Point;

/// A harmonic function in the plane with analytically known gradient.
#[derive(Clone, Debug, PartialEq)]
pub enum HarmonicFunction {
    /// `−(x₁ + x₂)`.
    NegSum,
    Const(f64),
    /// `a₀ + Σₙ aₙ Re zⁿ + bₙ Im zⁿ` with coefficients `[a₀, a₁, b₁, a₂, b₂, …]`, `z = x₁ + i x₂`.
    Poly(Vec<f64>),
}

impl HarmonicFunction {
    pub fn value(&self, x: Point) -> f64 {
        match self {
            HarmonicFunction::NegSum => -(x.x + x.y),
            HarmonicFunction::Const(v) => *v,
            HarmonicFunction::Poly(c) => {
                let z = Complex64::new(x.x, x.y);
                let mut zn = Complex64::new(1.0, 0.0);
                let mut v = c.first().copied().unwrap_or(0.0);
                for pair in c[1.min(c.len())..].chunks(2) {
                    zn *= z;
                    v += pair[0] * zn.re + pair.get(1).copied().unwrap_or(0.0) * zn.im;
                }
                v
            }
        }
    }

    pub fn gradient(&self, x: Point) -> Point {
        match self {
            HarmonicFunction::NegSum => Point::new(-1.0, -1.0),
            HarmonicFunction::Const(_) => Point::zeros(),
            HarmonicFunction::Poly(c) => {
                let z = Complex64::new(x.x, x.y);
                let mut zn1 = Complex64::new(1.0, 0.0);
                let mut g = Point::zeros();
                for (i, pair) in c[1.min(c.len())..].chunks(2).enumerate() {
                    let n = (i + 1) as f64;
                    let d = zn1 * n;
                    let (a, b) = (pair[0], pair.get(1).copied().unwrap_or(0.0));
                    g += Point::new(a * d.re + b * d.im, -a * d.im + b * d.re);
                    zn1 *= z;
                }
                g
            }
        }
    }

    /// Normal derivative `∇u·n`.
    pub fn flux(&self, x: Point, n: Point) -> f64 {
        self.gradient(x).dot(&n)
    }
}

/// Prescribed density of a single-layer potential on an open arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScreenDensity {
    /// `√(1 + 4x₁²)`.
    ParabolaJump,
}

impl ScreenDensity {
    pub fn value(&self, x: Point) -> f64 {
        match self {
            ScreenDensity::ParabolaJump => (1.0 + 4.0 * x.x * x.x).sqrt(),
        }
    }
}

//! Knot vectors and control polygons of the four benchmark geometries.

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, Orientation, Point};
use crate::spline::{KnotVector, Spline};

fn points(x: &[f64], y: &[f64]) -> Vec<Point> {
    x.iter().zip(y).map(|(&a, &b)| Point::new(a, b)).collect()
}

/// Quadratic, breakpoints `0..=9`, double knots at 1 and 8.
pub fn t1() -> KnotVector {
    KnotVector::new(3, vec![0., 0., 0., 1., 1., 2., 3., 4., 5., 6., 7., 8., 8., 9., 9., 9.]).expect("valid knots")
}

/// Quadratic, breakpoints `0..=9`, triple knots at 1 and 8.
pub fn t2() -> KnotVector {
    KnotVector::new(
        3,
        vec![0., 0., 0., 1., 1., 1., 2., 3., 4., 5., 6., 7., 8., 8., 8., 9., 9., 9.],
    )
    .expect("valid knots")
}

/// Cubic, uniform breakpoints with step 1/8 on `[0, 1]`.
pub fn t3() -> KnotVector {
    KnotVector::new(
        4,
        vec![0., 0., 0., 0., 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1., 1., 1., 1.],
    )
    .expect("valid knots")
}

/// Cubic, uniform breakpoints with step 1/6 on `[0, 1]`.
pub fn t4() -> KnotVector {
    KnotVector::new(
        4,
        vec![0., 0., 0., 0., 1. / 6., 2. / 6., 3. / 6., 4. / 6., 5. / 6., 1., 1., 1., 1.],
    )
    .expect("valid knots")
}

/// Quartic, uniform breakpoints with step 1/5 on `[0, 1]`.
pub fn t5() -> KnotVector {
    KnotVector::new(5, vec![0., 0., 0., 0., 0., 0.2, 0.4, 0.6, 0.8, 1., 1., 1., 1., 1.]).expect("valid knots")
}

/// Quadratic Bézier on `[-1, 1]`.
pub fn t6() -> KnotVector {
    KnotVector::new(3, vec![-1., -1., -1., 1., 1., 1.]).expect("valid knots")
}

pub fn example1_spline() -> Spline<Point> {
    let x = [0., 0.5, 1., 1., 0., -1., -1., -1., 0., 1., 1., 0.5, 0.];
    let y = [0., 0.125, 0.25, 1., 1., 1., 0., -1., -1., -1., -0.25, -0.125, 0.];
    Spline::new(t1(), points(&x, &y)).expect("13 control points")
}

/// Three-cornered closed quadratic curve on `[0, 9]`.
pub fn example1_curve() -> BoundaryCurve {
    BoundaryCurve::spline(t1(), example1_spline().coeffs, true, 1.0).expect("closed curve")
}

pub fn example2_spline() -> Spline<Point> {
    let x = [-16., -22., -1., 2., 29., 1., 32., 12., 4., -10., -16.];
    let y = [11.5, 6.5, 2., -15., -8., -4., 17., 19., 1., 16.5, 11.5];
    Spline::new(t3(), points(&x, &y)).expect("11 control points")
}

/// Smooth free-form closed cubic curve on `[0, 1]`.
pub fn example2_curve() -> BoundaryCurve {
    BoundaryCurve::spline(t3(), example2_spline().coeffs, true, 1.0).expect("closed curve")
}

/// Outer and inner boundary of the domains with a hole: `(outer, inner)`.
/// Domain A (`domain_b = false`) is cubic, domain B quartic. The inner curves
/// run clockwise, so their right-hand normal already points into the hole.
pub fn example3_curves(domain_b: bool) -> (BoundaryCurve, BoundaryCurve) {
    let ox = [1., 1., 0., -1., -1., -1., 0., 1., 1.];
    let oy = [0., 1., 1., 1., 0., -1., -1., -1., 0.];
    let (kv, ix, iy) = if domain_b {
        (
            t5(),
            [-0.25, -0.25, -0.5, -0.75, -0.75, -0.75, -0.5, -0.25, -0.25],
            [0.5, 0.25, 0.25, 0.25, 0.5, 0.75, 0.75, 0.75, 0.5],
        )
    } else {
        (
            t4(),
            [0.25, 0.25, -0.25, -0.75, -0.75, -0.75, -0.25, 0.25, 0.25],
            [0.25, -0.25, -0.25, -0.25, 0.25, 0.75, 0.75, 0.75, 0.25],
        )
    };
    let outer = BoundaryCurve::spline(kv.clone(), points(&ox, &oy), true, 1.0).expect("outer curve");
    let inner = BoundaryCurve::spline(kv, points(&ix, &iy), true, 1.0).expect("inner curve");
    (outer, inner)
}

/// Arc of the parabola `x₂ = 1 − x₁²`, `x₁ = t ∈ [−1, 1]`.
pub fn example4_curve() -> BoundaryCurve {
    BoundaryCurve::spline(t6(), points(&[-1., 0., 1.], &[0., 2., 0.]), false, 1.0).expect("open arc")
}

/// Verifies the closure points and orientations of the built-in curves.
pub fn self_check() -> Result<()> {
    let fail = |what: &str| Err(Error::Geometry(format!("built-in geometry check failed: {what}")));
    let c1 = example1_curve();
    if c1.point(0.0).norm() > 1e-15 || c1.point(9.0).norm() > 1e-15 {
        return fail("example 1 must start and end at the origin");
    }
    if c1.orientation() != Orientation::Counterclockwise || example2_curve().orientation() != Orientation::Counterclockwise {
        return fail("examples 1 and 2 must run counterclockwise");
    }
    for b in [false, true] {
        let (outer, inner) = example3_curves(b);
        if outer.orientation() != Orientation::Counterclockwise || inner.orientation() != Orientation::Clockwise {
            return fail("example 3 needs a counterclockwise outer and a clockwise inner curve");
        }
    }
    let arc = example4_curve();
    if arc.is_closed() || (arc.point(-1.0) - Point::new(-1.0, 0.0)).norm() > 1e-15 {
        return fail("example 4 must be the open arc from (-1, 0) to (1, 0)");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_check_passes() {
        self_check().unwrap();
    }

    #[test]
    fn orientations_of_the_benchmark_curves() {
        assert_eq!(example1_curve().orientation(), Orientation::Counterclockwise);
        assert_eq!(example2_curve().orientation(), Orientation::Counterclockwise);
        for b in [false, true] {
            let (outer, inner) = example3_curves(b);
            assert_eq!(outer.orientation(), Orientation::Counterclockwise);
            assert_eq!(inner.orientation(), Orientation::Clockwise);
        }
    }

    #[test]
    fn closure_points() {
        assert!(example1_curve().point(9.0).norm() < 1e-15);
        assert!((example2_curve().point(1.0) - Point::new(-16.0, 11.5)).norm() < 1e-13);
    }
}

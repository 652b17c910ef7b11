//! Parametric boundary curves, their differential geometry and meshes.
//!
//! A [`BoundaryCurve`] maps a parameter interval `[a, b]` to the plane. The
//! domain-outward unit normal is `n = σ (C₂′, −C₁′) / ‖C′‖` where `σ` is the
//! curve's `outward_sign`; for a counterclockwise outer boundary `σ = +1`.

use nalgebra::Vector2;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spline::{uniform_breakpoints, KnotVector, Side, Spline};

pub type Point = Vector2<f64>;

/// Relative tolerance used when merging parameter values that should coincide.
pub const PARAM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Parametrization {
    /// Polynomial B-form curve.
    Spline(Spline<Point>),
    /// `c + r (cos t, sin t)` for `t ∈ [0, 2π]`.
    Circle { center: Point, radius: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Counterclockwise,
    Clockwise,
}

/// Position, tangent, speed and unit normal at a parameter.
#[derive(Clone, Copy, Debug)]
pub struct Frame {
    pub point: Point,
    pub derivative: Point,
    pub jacobian: f64,
    pub normal: Point,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCurve {
    param: Parametrization,
    closed: bool,
    outward_sign: f64,
    orientation: Orientation,
}

impl BoundaryCurve {
    pub fn new(param: Parametrization, closed: bool, outward_sign: f64) -> Result<Self> {
        if outward_sign != 1.0 && outward_sign != -1.0 {
            return Err(Error::Geometry(format!("outward sign must be +1 or -1, got {outward_sign}")));
        }
        if let Parametrization::Circle { radius, .. } = &param {
            if !(*radius > 0.0) || !closed {
                return Err(Error::Geometry("circles need a positive radius and are closed".into()));
            }
        }
        let mut curve = Self {
            param,
            closed,
            outward_sign,
            orientation: Orientation::Counterclockwise,
        };
        let (a, b) = curve.domain();
        let (pa, pb) = (curve.point(a), curve.point(b));
        let gap = (pa - pb).norm();
        let scale = curve.scale();
        if closed && gap > 1e-14 * scale.max(1.0) {
            return Err(Error::Geometry(format!(
                "curve flagged closed but C(a) and C(b) differ by {gap:e}"
            )));
        }
        if !closed && gap <= 1e-14 * scale.max(1.0) {
            return Err(Error::Geometry("curve flagged open but C(a) = C(b)".into()));
        }
        if curve.signed_area() < 0.0 {
            curve.orientation = Orientation::Clockwise;
        }
        Ok(curve)
    }

    /// B-form curve from a knot vector and control points.
    pub fn spline(knots: KnotVector, control_points: Vec<Point>, closed: bool, outward_sign: f64) -> Result<Self> {
        Self::new(
            Parametrization::Spline(Spline::new(knots, control_points)?),
            closed,
            outward_sign,
        )
    }

    pub fn circle(center: Point, radius: f64) -> Result<Self> {
        Self::new(Parametrization::Circle { center, radius }, true, 1.0)
    }

    pub fn parametrization(&self) -> &Parametrization {
        &self.param
    }

    pub fn as_spline(&self) -> Option<&Spline<Point>> {
        match &self.param {
            Parametrization::Spline(s) => Some(s),
            Parametrization::Circle { .. } => None,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn outward_sign(&self) -> f64 {
        self.outward_sign
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn domain(&self) -> (f64, f64) {
        match &self.param {
            Parametrization::Spline(s) => s.knots.domain(),
            Parametrization::Circle { .. } => (0.0, 2.0 * PI),
        }
    }

    /// Parameter values where the curve may lose smoothness.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.param {
            Parametrization::Spline(s) => s.knots.breakpoints(),
            Parametrization::Circle { .. } => vec![0.0, 2.0 * PI],
        }
    }

    /// Largest control-point or radius magnitude, used to scale tolerances.
    pub fn scale(&self) -> f64 {
        match &self.param {
            Parametrization::Spline(s) => s.coeffs.iter().map(|p| p.norm()).fold(0.0, f64::max),
            Parametrization::Circle { center, radius } => center.norm() + radius,
        }
    }

    /// Locator for the smooth piece containing the interior point `t`; pass
    /// it to [`BoundaryCurve::eval_at`] to evaluate that piece's polynomial.
    pub fn locate(&self, t: f64) -> usize {
        match &self.param {
            Parametrization::Spline(s) => {
                let (a, b) = s.knots.domain();
                s.knots.find_span(t.clamp(a, b)).expect("clamped parameter")
            }
            Parametrization::Circle { .. } => 0,
        }
    }

    /// Point and first derivative on the piece selected by `hint`.
    pub fn eval_at(&self, hint: usize, t: f64) -> (Point, Point) {
        match &self.param {
            Parametrization::Spline(s) => (
                s.knots.evaluate_in_span(&s.coeffs, hint, t, 0),
                s.knots.evaluate_in_span(&s.coeffs, hint, t, 1),
            ),
            Parametrization::Circle { center, radius } => {
                let (sn, cs) = t.sin_cos();
                (center + Point::new(cs, sn) * *radius, Point::new(-sn, cs) * *radius)
            }
        }
    }

    /// Second derivative on the piece selected by `hint`.
    pub fn second_at(&self, hint: usize, t: f64) -> Point {
        match &self.param {
            Parametrization::Spline(s) => s.knots.evaluate_in_span(&s.coeffs, hint, t, 2),
            Parametrization::Circle { radius, .. } => {
                let (sn, cs) = t.sin_cos();
                Point::new(-cs, -sn) * *radius
            }
        }
    }

    /// Unit normal from a derivative vector.
    pub fn normal_from(&self, d: Point) -> Point {
        Point::new(d.y, -d.x) * (self.outward_sign / d.norm())
    }

    pub fn point(&self, t: f64) -> Point {
        self.eval_at(self.locate(t), t).0
    }

    pub fn frame(&self, t: f64) -> Result<Frame> {
        self.frame_side(t, Side::Right)
    }

    /// Frame using the one-sided limit at knots.
    pub fn frame_side(&self, t: f64, side: Side) -> Result<Frame> {
        let hint = match &self.param {
            Parametrization::Spline(s) => s.knots.find_span_side(t, side)?,
            Parametrization::Circle { .. } => {
                let (a, b) = self.domain();
                if !(t >= a && t <= b) {
                    return Err(Error::Domain { t, a, b });
                }
                0
            }
        };
        let (point, derivative) = self.eval_at(hint, t);
        let jacobian = derivative.norm();
        if !(jacobian > 1e-14 * self.scale().max(1.0)) {
            return Err(Error::SingularParametrization { t, speed: jacobian });
        }
        Ok(Frame {
            point,
            derivative,
            jacobian,
            normal: self.normal_from(derivative),
        })
    }

    /// Signed curvature `(C₁′C₂″ − C₂′C₁″)/‖C′‖³` at a smooth interior point.
    pub fn curvature(&self, t: f64) -> f64 {
        let hint = self.locate(t);
        let (_, d) = self.eval_at(hint, t);
        let dd = self.second_at(hint, t);
        (d.x * dd.y - d.y * dd.x) / d.norm().powi(3)
    }

    /// Twice the signed enclosed area for closed curves, estimated by the
    /// shoelace formula on a fine sampling; the chord area for open arcs.
    fn signed_area(&self) -> f64 {
        let (a, b) = self.domain();
        let n = 4096;
        let pts: Vec<Point> = uniform_breakpoints(a, b, n).iter().map(|&t| self.point(t)).collect();
        pts.windows(2).map(|w| w[0].x * w[1].y - w[1].x * w[0].y).sum::<f64>() + (pts[n].x * pts[0].y - pts[0].x * pts[n].y)
    }

    /// Inserts a simple knot at the midpoint of every non-empty span.
    pub fn refine_uniform(&self) -> Result<Self> {
        let param = match &self.param {
            Parametrization::Spline(s) => Parametrization::Spline(s.refine_midpoints()?),
            Parametrization::Circle { .. } => self.param.clone(),
        };
        Ok(Self { param, ..self.clone() })
    }

    /// Raises the polynomial degree of a B-form curve by one.
    pub fn elevate_degree(&self) -> Result<Self> {
        let param = match &self.param {
            Parametrization::Spline(s) => Parametrization::Spline(s.elevate_degree()?),
            Parametrization::Circle { .. } => return Err(Error::Unsupported("degree elevation of an analytic circle".into())),
        };
        Ok(Self { param, ..self.clone() })
    }

    /// Inserts knot `t` into a B-form curve.
    pub fn insert_knot(&self, t: f64) -> Result<Self> {
        let param = match &self.param {
            Parametrization::Spline(s) => Parametrization::Spline(s.insert_knot(t)?),
            Parametrization::Circle { .. } => return Err(Error::Unsupported("knot insertion into an analytic circle".into())),
        };
        Ok(Self { param, ..self.clone() })
    }

    /// Arclength of `[t0, t1]` by composite Gauss–Legendre on adapted cells of the smooth pieces.
    pub fn arclength(&self, t0: f64, t1: f64) -> f64 {
        let rule = crate::quadrature::gauss_legendre(20);
        let mut cuts: Vec<f64> = vec![t0];
        cuts.extend(self.breakpoints().into_iter().filter(|&t| t > t0 && t < t1));
        cuts.push(t1);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let hint = self.locate(0.5 * (w[0] + w[1]));
            for (c0, c1) in crate::quadrature::quadrature_cells(self, hint, w[0], w[1], 20) {
                let len = c1 - c0;
                for (x, wt) in rule.iter() {
                    total += wt * len * self.eval_at(hint, c0 + x * len).1.norm();
                }
            }
        }
        total
    }

    /// Winding number of the closed curve around `x`, by summing the turning
    /// angle over a fine polygonal sampling.
    pub fn winding_number(&self, x: Point) -> f64 {
        let (a, b) = self.domain();
        let n = 4096;
        let ts = uniform_breakpoints(a, b, n);
        let mut total = 0.0;
        let mut prev = self.point(ts[0]) - x;
        for &t in &ts[1..] {
            let cur = self.point(t) - x;
            total += (prev.x * cur.y - prev.y * cur.x).atan2(prev.dot(&cur));
            prev = cur;
        }
        total / (2.0 * PI)
    }
}

/// Uniform partition of the parameter interval.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryMesh {
    pub elements: Vec<(f64, f64)>,
    pub h: f64,
    pub closed: bool,
}

impl BoundaryMesh {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Element endpoints `t_0 < … < t_n`.
    pub fn nodes(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.elements.iter().map(|e| e.0).collect();
        v.push(self.elements.last().map(|e| e.1).unwrap_or(0.0));
        v
    }
}

/// Uniform mesh of `n_elements` intervals on the curve's parameter domain.
pub fn induced_mesh(curve: &BoundaryCurve, n_elements: usize) -> Result<BoundaryMesh> {
    if n_elements == 0 {
        return Err(Error::Geometry("a mesh needs at least one element".into()));
    }
    let (a, b) = curve.domain();
    let bp = uniform_breakpoints(a, b, n_elements);
    Ok(BoundaryMesh {
        elements: bp.windows(2).map(|w| (w[0], w[1])).collect(),
        h: (b - a) / n_elements as f64,
        closed: curve.is_closed(),
    })
}

/// Chords interpolating the curve at the element endpoints.
#[derive(Clone, Debug)]
pub struct PolygonalBoundary {
    pub vertices: Vec<Point>,
    pub params: Vec<f64>,
    pub closed: bool,
}

impl PolygonalBoundary {
    pub fn segments(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// Unit normals per segment, in the curve's outward convention.
    pub fn normals(&self, outward_sign: f64) -> Vec<Point> {
        self.vertices
            .windows(2)
            .map(|w| {
                let d = w[1] - w[0];
                Point::new(d.y, -d.x) * (outward_sign / d.norm())
            })
            .collect()
    }

    /// The polygon as a degree-one B-form curve over the original parameters,
    /// so that each chord is traversed over the parameter interval of its element.
    pub fn to_curve(&self, outward_sign: f64) -> Result<BoundaryCurve> {
        let mut knots = vec![self.params[0]];
        knots.extend_from_slice(&self.params);
        knots.push(*self.params.last().unwrap());
        let mut verts = self.vertices.clone();
        if self.closed {
            *verts.last_mut().unwrap() = verts[0];
        }
        BoundaryCurve::spline(KnotVector::new(2, knots)?, verts, self.closed, outward_sign)
    }
}

pub fn polygonal_boundary(curve: &BoundaryCurve, mesh: &BoundaryMesh) -> PolygonalBoundary {
    let params = mesh.nodes();
    let mut vertices: Vec<Point> = params.iter().map(|&t| curve.point(t)).collect();
    if curve.is_closed() {
        let first = vertices[0];
        *vertices.last_mut().unwrap() = first;
    }
    PolygonalBoundary {
        vertices,
        params,
        closed: curve.is_closed(),
    }
}

/// Sorted union of parameter lists with near-duplicates merged.
pub fn merge_params(lists: &[&[f64]], span: f64) -> Vec<f64> {
    let mut all: Vec<f64> = lists.iter().flat_map(|l| l.iter().copied()).collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tol = PARAM_TOL * span.abs().max(1.0);
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for t in all {
        match out.last() {
            Some(&last) if (t - last).abs() <= tol => {}
            _ => out.push(t),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use proptest::prelude::*;

    fn samples(n: usize, a: f64, b: f64) -> Vec<f64> {
        let g = 0.618_033_988_749_894_9;
        (1..=n).map(|i| a + (b - a) * ((i as f64 * g) % 1.0)).collect()
    }

    #[test]
    fn parabola_frame_at_vertex() {
        let c = builtin::example4_curve();
        let f = c.frame(0.0).unwrap();
        assert!((f.point - Point::new(0.0, 1.0)).norm() < 1e-15);
        assert!((f.derivative - Point::new(1.0, 0.0)).norm() < 1e-15);
        assert!((f.normal - Point::new(0.0, -1.0) * c.outward_sign()).norm() < 1e-15);
        for t in samples(20, -1.0, 1.0) {
            let p = c.point(t);
            assert!((p.x - t).abs() < 1e-14 && (p.y - (1.0 - t * t)).abs() < 1e-14);
        }
    }

    #[test]
    fn example1_starts_at_origin_and_closes() {
        let c = builtin::example1_curve();
        assert!(c.frame(0.0).unwrap().point.norm() < 1e-15);
        assert!(c.point(9.0).norm() < 1e-15);
        assert!(c.is_closed());
        assert_eq!(c.orientation(), Orientation::Counterclockwise);
    }

    #[test]
    fn straight_segment_has_unit_speed() {
        let kv = KnotVector::new(2, vec![0., 0., 1., 1.]).unwrap();
        let c = BoundaryCurve::spline(kv, vec![Point::new(0., 0.), Point::new(1., 0.)], false, 1.0).unwrap();
        for t in samples(10, 0.0, 1.0) {
            assert!((c.frame(t).unwrap().jacobian - 1.0).abs() < 1e-15);
        }
        assert!(c.curvature(0.3).abs() < 1e-15);
    }

    #[test]
    fn degenerate_speed_is_reported() {
        let kv = KnotVector::new(2, vec![0., 0., 1., 2., 2.]).unwrap();
        let p = vec![Point::new(0., 0.), Point::new(1., 0.), Point::new(1., 0.)];
        let c = BoundaryCurve::spline(kv, p, false, 1.0).unwrap();
        assert!(matches!(c.frame(1.5), Err(Error::SingularParametrization { .. })));
    }

    #[test]
    fn closure_flag_is_checked() {
        let kv = KnotVector::new(2, vec![0., 0., 1., 1.]).unwrap();
        let p = vec![Point::new(0., 0.), Point::new(1., 0.)];
        assert!(BoundaryCurve::spline(kv, p, true, 1.0).is_err());
    }

    #[test]
    fn example1_flux_identity_pins_the_normal() {
        let c = builtin::example1_curve();
        for t in samples(100, 0.0, 9.0) {
            let f = c.frame(t).unwrap();
            let expected = (f.derivative.x - f.derivative.y) / f.jacobian;
            let grad = Point::new(-1.0, -1.0);
            assert!((expected - grad.dot(&f.normal)).abs() <= 1e-13);
        }
    }

    #[test]
    fn normals_point_away_from_the_domain() {
        for (outer, inner) in [builtin::example3_curves(false), builtin::example3_curves(true)] {
            for (curve, sign_inside) in [(&outer, 1.0), (&inner, 0.0)] {
                let (a, b) = curve.domain();
                for t in samples(12, a, b) {
                    let f = curve.frame(t).unwrap();
                    let probe = f.point + f.normal * 1e-3;
                    let w_out = outer.winding_number(probe).abs();
                    let w_in = inner.winding_number(probe).abs();
                    let in_domain = w_out > 0.5 && w_in < 0.5;
                    assert!(!in_domain, "normal enters the domain at t={t}");
                    let back = f.point - f.normal * 1e-3;
                    let inside = outer.winding_number(back).abs() > 0.5 && inner.winding_number(back).abs() < 0.5;
                    assert!(inside, "reverse normal leaves the domain at t={t} ({sign_inside})");
                }
            }
        }
    }

    #[test]
    fn induced_meshes() {
        let m = induced_mesh(&builtin::example1_curve(), 9).unwrap();
        assert_eq!(m.len(), 9);
        assert!(m.nodes().iter().enumerate().all(|(i, &t)| t == i as f64));
        let m2 = induced_mesh(&builtin::example2_curve(), 8).unwrap();
        assert_eq!(m2.len(), 8);
        assert_eq!(m2.h, 0.125);
        let one = induced_mesh(&builtin::example2_curve(), 1).unwrap();
        assert_eq!(one.elements, vec![(0.0, 1.0)]);
    }

    #[test]
    fn polygon_through_circle_quarter_points_is_a_square() {
        let c = BoundaryCurve::circle(Point::zeros(), 1.0).unwrap();
        let poly = polygonal_boundary(&c, &induced_mesh(&c, 4).unwrap());
        assert_eq!(poly.segments(), 4);
        assert!((poly.length() - 4.0 * 2f64.sqrt()).abs() < 1e-14);
        let pc = poly.to_curve(1.0).unwrap();
        assert_eq!(pc.orientation(), Orientation::Counterclockwise);
    }

    #[test]
    fn parabola_chords_deviate_quadratically() {
        let c = builtin::example4_curve();
        let mut devs = Vec::new();
        for n in [20, 40] {
            let poly = polygonal_boundary(&c, &induced_mesh(&c, n).unwrap());
            let mut worst: f64 = 0.0;
            for i in 0..poly.segments() {
                let mid = 0.5 * (poly.vertices[i] + poly.vertices[i + 1]);
                let tm = 0.5 * (poly.params[i] + poly.params[i + 1]);
                worst = worst.max((c.point(tm) - mid).norm());
            }
            assert!(poly.length() <= c.arclength(-1.0, 1.0));
            devs.push(worst);
        }
        // chord sagitta of x2 = 1 - x1^2 with step h is h^2/4
        assert!((devs[0] - 0.1f64.powi(2) / 4.0).abs() < 1e-12);
        assert!((devs[0] / devs[1] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn refinement_levels_keep_the_geometry() {
        for curve in [builtin::example1_curve(), builtin::example2_curve()] {
            let (a, b) = curve.domain();
            let mut r = curve.clone();
            for _ in 0..3 {
                r = r.refine_uniform().unwrap();
            }
            for t in samples(50, a, b) {
                let f0 = curve.frame(t).unwrap();
                let f1 = r.frame(t).unwrap();
                assert!((f0.point - f1.point).norm() <= 1e-12);
                assert!((f0.normal - f1.normal).norm() <= 1e-12);
            }
            let (l0, l1) = (curve.arclength(a, b), r.arclength(a, b));
            assert!((l0 - l1).abs() <= 1e-12 * l0);
        }
        let r = builtin::example1_curve()
            .refine_uniform()
            .unwrap()
            .refine_uniform()
            .unwrap()
            .refine_uniform()
            .unwrap();
        assert_eq!(r.as_spline().unwrap().knots.dimension(), 76);
    }

    #[test]
    fn circle_curvature_and_winding() {
        let c = BoundaryCurve::circle(Point::new(0.5, -0.5), 2.0).unwrap();
        assert!((c.curvature(1.0) - 0.5).abs() < 1e-14);
        assert!((c.winding_number(Point::new(0.5, 0.0)) - 1.0).abs() < 1e-9);
        assert!(c.winding_number(Point::new(5.0, 0.0)).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn normals_are_unit(t in 0.0f64..9.0) {
            let c = builtin::example1_curve();
            let f = c.frame(t).unwrap();
            prop_assert!((f.normal.norm() - 1.0).abs() < 1e-14);
            prop_assert!(f.normal.dot(&f.derivative).abs() < 1e-13 * f.jacobian);
        }
    }
}

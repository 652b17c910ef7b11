//! Approximation spaces for the boundary unknowns.
//!
//! Three families share one representation: a list of panels (parameter
//! intervals on which both the geometry and the basis are polynomial), each
//! with a local basis and a local-to-global degree-of-freedom map.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{induced_mesh, merge_params, polygonal_boundary, BoundaryCurve, BoundaryMesh, PARAM_TOL};
use crate::quadrature::Shapes;
use crate::spline::{uniform_breakpoints, KnotVector, Side, MAX_ORDER};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// B-splines on the exact curve.
    BSpline,
    /// Lagrangian elements on the exact curve.
    LagrangeCurvilinear,
    /// Discontinuous Lagrangian elements on the inscribed polygon.
    LagrangePolygonal,
}

/// Smoothness class at a breakpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Continuity {
    /// `C^j`, `j ≥ 0`.
    C(usize),
    Discontinuous,
}

impl Continuity {
    /// Knot multiplicity realizing this class for splines of order `k`.
    pub fn multiplicity(self, order: usize) -> usize {
        match self {
            Continuity::C(j) => order.saturating_sub(1 + j).max(1),
            Continuity::Discontinuous => order,
        }
    }

    pub fn from_multiplicity(m: usize, order: usize) -> Self {
        if m >= order {
            Continuity::Discontinuous
        } else {
            Continuity::C(order - 1 - m)
        }
    }
}

/// Basis functions that do not vanish on one panel.
#[derive(Clone, Debug)]
pub enum LocalBasis {
    /// The `k` B-splines of a knot span.
    BSpline { knots: Arc<KnotVector>, span: usize },
    /// Lagrange polynomials on uniform nodes of `[e0, e1]` (midpoint for degree 0).
    Lagrange { e0: f64, e1: f64, degree: usize },
}

impl LocalBasis {
    pub fn len(&self) -> usize {
        match self {
            LocalBasis::BSpline { knots, .. } => knots.order(),
            LocalBasis::Lagrange { degree, .. } => degree + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn lagrange_nodes(e0: f64, e1: f64, degree: usize) -> Vec<f64> {
        if degree == 0 {
            return vec![0.5 * (e0 + e1)];
        }
        (0..=degree).map(|j| e0 + (e1 - e0) * j as f64 / degree as f64).collect()
    }
}

impl Shapes for LocalBasis {
    fn len(&self) -> usize {
        LocalBasis::len(self)
    }

    fn eval(&self, t: f64, val: &mut [f64], der: &mut [f64]) {
        match self {
            LocalBasis::BSpline { knots, span } => {
                let k = knots.order();
                let mut buf = [0.0; 2 * MAX_ORDER];
                knots.eval_in_span(*span, t, 1, &mut buf[..2 * k]);
                val[..k].copy_from_slice(&buf[..k]);
                der[..k].copy_from_slice(&buf[k..2 * k]);
            }
            LocalBasis::Lagrange { e0, e1, degree } => {
                let d = *degree;
                if d == 0 {
                    val[0] = 1.0;
                    der[0] = 0.0;
                    return;
                }
                let x = Self::lagrange_nodes(*e0, *e1, d);
                for j in 0..=d {
                    let mut v = 1.0;
                    let mut dv = 0.0;
                    for m in 0..=d {
                        if m == j {
                            continue;
                        }
                        let den = x[j] - x[m];
                        dv = dv * (t - x[m]) / den + v / den;
                        v *= (t - x[m]) / den;
                    }
                    val[j] = v;
                    der[j] = dv;
                }
            }
        }
    }
}

/// A parameter interval on which the geometry and all basis functions are polynomial.
#[derive(Clone, Debug)]
pub struct Panel {
    pub t0: f64,
    pub t1: f64,
    pub basis: LocalBasis,
    /// `(local index, global dof)` for every local function carrying a dof.
    pub dofs: Vec<(usize, usize)>,
}

/// A discrete space on one boundary curve.
#[derive(Clone, Debug)]
pub struct DiscreteSpace {
    pub kind: SpaceKind,
    pub degree: usize,
    /// Geometry the integrals run over (the polygon for the polygonal kind).
    pub curve: BoundaryCurve,
    /// Exact geometry, used for data and error evaluation.
    pub exact: BoundaryCurve,
    pub panels: Vec<Panel>,
    pub dof_count: usize,
    /// Continuity class at every breakpoint of the space, including the ends.
    pub continuity: Vec<(f64, Continuity)>,
    /// B-spline knot vector before closure identification.
    pub knots: Option<Arc<KnotVector>>,
    /// First and last function merged into one dof at the closure point.
    pub identified: bool,
    /// Mesh step in parameter units.
    pub h: f64,
}

impl DiscreteSpace {
    pub fn dof_count(&self) -> usize {
        self.dof_count
    }

    /// Panel index containing `t`, preferring the requested side at panel ends.
    pub fn panel_at(&self, t: f64, side: Side) -> Option<usize> {
        let i = match side {
            Side::Right => self.panels.iter().position(|p| t >= p.t0 && t < p.t1),
            Side::Left => self.panels.iter().position(|p| t > p.t0 && t <= p.t1),
        };
        i.or_else(|| self.panels.iter().position(|p| t >= p.t0 && t <= p.t1))
    }

    /// `Σ c_i φ_i` and its parametric derivative at `t` on panel `p`.
    pub fn eval_on(&self, coeffs: &[f64], p: usize, t: f64) -> (f64, f64) {
        let panel = &self.panels[p];
        let m = panel.basis.len();
        let mut val = vec![0.0; m];
        let mut der = vec![0.0; m];
        panel.basis.eval(t, &mut val, &mut der);
        panel
            .dofs
            .iter()
            .fold((0.0, 0.0), |(a, b), &(r, g)| (a + coeffs[g] * val[r], b + coeffs[g] * der[r]))
    }

    pub fn eval(&self, coeffs: &[f64], t: f64, side: Side) -> Result<f64> {
        let p = self.panel_at(t, side).ok_or_else(|| {
            let (a, b) = self.curve.domain();
            Error::Domain { t, a, b }
        })?;
        Ok(self.eval_on(coeffs, p, t).0)
    }

    /// Values of every dof function at `t` from the requested side.
    pub fn functions_at(&self, t: f64, side: Side) -> Vec<(usize, f64)> {
        let Some(p) = self.panel_at(t, side) else {
            return Vec::new();
        };
        let panel = &self.panels[p];
        let m = panel.basis.len();
        let mut val = vec![0.0; m];
        let mut der = vec![0.0; m];
        panel.basis.eval(t, &mut val, &mut der);
        let mut out: Vec<(usize, f64)> = Vec::new();
        for &(r, g) in &panel.dofs {
            match out.iter_mut().find(|e| e.0 == g) {
                Some(e) => e.1 += val[r],
                None => out.push((g, val[r])),
            }
        }
        out
    }

    /// Panels on which dof `g` does not vanish identically.
    pub fn support(&self, g: usize) -> Vec<usize> {
        (0..self.panels.len())
            .filter(|&p| self.panels[p].dofs.iter().any(|&(_, d)| d == g))
            .collect()
    }

    /// Dof coefficients of the interpolant of `f(t, side)`: Greville
    /// interpolation for B-splines, nodal interpolation otherwise.
    pub fn interpolate(&self, f: &dyn Fn(f64, Side) -> Result<f64>) -> Result<Vec<f64>> {
        match self.kind {
            SpaceKind::BSpline => {
                let knots = self.knots.as_ref().expect("B-spline space has knots");
                let raw: Vec<f64> = knots.interpolate(|t, side| f(t, side))?;
                let n = raw.len();
                let mut out = raw[..self.dof_count].to_vec();
                if self.identified {
                    out[0] = 0.5 * (raw[0] + raw[n - 1]);
                }
                Ok(out)
            }
            _ => {
                let mut out = vec![f64::NAN; self.dof_count];
                for panel in &self.panels {
                    let LocalBasis::Lagrange { e0, e1, degree } = panel.basis else {
                        unreachable!("Lagrange space with spline basis")
                    };
                    let nodes = LocalBasis::lagrange_nodes(e0, e1, degree);
                    for &(r, g) in &panel.dofs {
                        if out[g].is_nan() {
                            let t = nodes[r];
                            let side = if r == 0 && degree > 0 { Side::Right } else { Side::Left };
                            out[g] = f(t, side)?;
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// Collocation parameters: Greville abscissae for B-splines, element
    /// nodes otherwise, one per dof.
    pub fn collocation_points(&self) -> Result<Vec<f64>> {
        match self.kind {
            SpaceKind::BSpline => {
                let g = self.knots.as_ref().expect("knots").greville()?;
                Ok(g[..self.dof_count].to_vec())
            }
            _ => {
                let mut out = vec![f64::NAN; self.dof_count];
                for panel in &self.panels {
                    if let LocalBasis::Lagrange { e0, e1, degree } = panel.basis {
                        let nodes = LocalBasis::lagrange_nodes(e0, e1, degree);
                        for &(r, g) in &panel.dofs {
                            if out[g].is_nan() {
                                out[g] = nodes[r];
                            }
                        }
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Panels from the union of the space's and the geometry's breakpoints.
fn panel_params(curve: &BoundaryCurve, space_breaks: &[f64]) -> Result<Vec<f64>> {
    let (a, b) = curve.domain();
    let geom = curve.breakpoints();
    let params = merge_params(&[space_breaks, &geom], b - a);
    let need = if curve.is_closed() { 3 } else { 1 };
    if params.len() < need + 1 {
        return Err(Error::Space(format!(
            "a closed curve needs at least 3 panels, got {}",
            params.len() - 1
        )));
    }
    Ok(params)
}

/// B-spline space with knot vector `knots` on `curve`; with `identify` the
/// first and last functions are merged at the closure point.
pub fn build_bspline_space(curve: &BoundaryCurve, knots: KnotVector, identify: bool) -> Result<DiscreteSpace> {
    let (a, b) = curve.domain();
    let (ka, kb) = knots.domain();
    let tol = PARAM_TOL * (b - a).abs().max(1.0);
    if (ka - a).abs() > tol || (kb - b).abs() > tol {
        return Err(Error::Space(format!(
            "knot domain [{ka}, {kb}] differs from curve domain [{a}, {b}]"
        )));
    }
    if !knots.is_open() {
        return Err(Error::Space("only open knot vectors are supported".into()));
    }
    if identify && !curve.is_closed() {
        return Err(Error::Space("closure identification on an open curve".into()));
    }
    let knots = Arc::new(knots);
    let k = knots.order();
    let raw = knots.dimension();
    let dof_count = if identify { raw - 1 } else { raw };
    let params = panel_params(curve, &knots.breakpoints())?;
    let panels = params
        .windows(2)
        .map(|w| {
            let span = knots.find_span(0.5 * (w[0] + w[1])).expect("inside domain");
            let first = span + 1 - k;
            let dofs = (0..k)
                .map(|r| {
                    let i = first + r;
                    (r, if identify && i == raw - 1 { 0 } else { i })
                })
                .collect();
            Panel {
                t0: w[0],
                t1: w[1],
                basis: LocalBasis::BSpline {
                    knots: knots.clone(),
                    span,
                },
                dofs,
            }
        })
        .collect();
    let bp = knots.breakpoints();
    let mut continuity: Vec<(f64, Continuity)> = bp
        .iter()
        .map(|&t| (t, Continuity::from_multiplicity(knots.multiplicity(t), k)))
        .collect();
    let closure = if identify {
        Continuity::C(0)
    } else {
        Continuity::Discontinuous
    };
    continuity[0].1 = closure;
    let last = continuity.len() - 1;
    continuity[last].1 = closure;
    let h = (b - a) / (bp.len() - 1) as f64;
    Ok(DiscreteSpace {
        kind: SpaceKind::BSpline,
        degree: k - 1,
        curve: curve.clone(),
        exact: curve.clone(),
        panels,
        dof_count,
        continuity,
        knots: Some(knots),
        identified: identify,
        h,
    })
}

/// Knot vector obtained from the curve's own by raising the degree to
/// `degree`, raising the multiplicity of the listed breakpoints, and
/// inserting midpoints `refinements` times.
pub fn refined_geometry_knots(
    curve: &BoundaryCurve,
    degree: usize,
    raise: &[(f64, usize)],
    refinements: usize,
) -> Result<KnotVector> {
    let kv = elevate_to(geometry_knots(curve, degree)?, degree)?;
    let mut kv = raise_multiplicities(kv, raise)?;
    for _ in 0..refinements {
        kv = bisect(&kv)?;
    }
    Ok(kv)
}

/// Knot vector obtained from the curve's own by inserting midpoints
/// `refinements` times and then raising the degree to `degree`, so that every
/// breakpoint keeps the smoothness it had at the geometry degree.
pub fn refined_then_elevated_knots(curve: &BoundaryCurve, degree: usize, refinements: usize) -> Result<KnotVector> {
    let mut kv = geometry_knots(curve, degree)?;
    for _ in 0..refinements {
        kv = bisect(&kv)?;
    }
    elevate_to(kv, degree)
}

fn geometry_knots(curve: &BoundaryCurve, degree: usize) -> Result<KnotVector> {
    let spline = curve
        .as_spline()
        .ok_or_else(|| Error::Space("geometry-based spaces need a B-form curve".into()))?;
    if degree + 1 < spline.knots.order() {
        return Err(Error::Space(format!(
            "degree {degree} is below the geometry degree {}",
            spline.knots.degree()
        )));
    }
    Ok(spline.knots.clone())
}

fn elevate_to(mut kv: KnotVector, degree: usize) -> Result<KnotVector> {
    while kv.order() < degree + 1 {
        kv = kv.elevated()?;
    }
    Ok(kv)
}

fn raise_multiplicities(mut kv: KnotVector, raise: &[(f64, usize)]) -> Result<KnotVector> {
    for &(t, extra) in raise {
        for _ in 0..extra {
            let mut knots = kv.knots().to_vec();
            let pos = knots.partition_point(|&x| x <= t);
            knots.insert(pos, t);
            kv = KnotVector::new(kv.order(), knots)?;
        }
    }
    Ok(kv)
}

fn bisect(kv: &KnotVector) -> Result<KnotVector> {
    let mids: Vec<f64> = kv
        .spans()
        .iter()
        .map(|&mu| 0.5 * (kv.knots()[mu] + kv.knots()[mu + 1]))
        .collect();
    let mut knots = kv.knots().to_vec();
    knots.extend(mids);
    knots.sort_by(f64::total_cmp);
    KnotVector::new(kv.order(), knots)
}

/// Open knot vector of degree `degree` on `n` uniform elements of the curve's
/// domain, with interior smoothness `interior` and per-breakpoint overrides.
pub fn uniform_knots(
    curve: &BoundaryCurve,
    degree: usize,
    n: usize,
    interior: Continuity,
    overrides: &[(f64, Continuity)],
) -> Result<KnotVector> {
    let (a, b) = curve.domain();
    let k = degree + 1;
    let bp = uniform_breakpoints(a, b, n);
    let tol = PARAM_TOL * (b - a).abs().max(1.0);
    let mult: Vec<usize> = bp[1..n]
        .iter()
        .map(|&t| {
            overrides
                .iter()
                .find(|(p, _)| (p - t).abs() <= tol)
                .map(|(_, c)| c.multiplicity(k))
                .unwrap_or_else(|| interior.multiplicity(k))
        })
        .collect();
    for (p, _) in overrides {
        if *p > a + tol && *p < b - tol && !bp.iter().any(|t| (t - p).abs() <= tol) {
            return Err(Error::Space(format!("override at {p} is not a mesh breakpoint")));
        }
    }
    KnotVector::open(k, &bp, &mult)
}

/// Lagrangian elements of `degree ≥ 1` on the mesh of the exact curve.
/// Adjacent elements share the node at a breakpoint unless it is listed in
/// `discontinuous`; on a closed curve the closure point is shared iff
/// `closure_continuous`.
pub fn build_lagrange_space(
    curve: &BoundaryCurve,
    mesh: &BoundaryMesh,
    degree: usize,
    discontinuous: &[f64],
    closure_continuous: bool,
) -> Result<DiscreteSpace> {
    if degree == 0 {
        return Err(Error::Space("curvilinear Lagrange spaces need degree >= 1".into()));
    }
    let nodes = mesh.nodes();
    let n = mesh.len();
    let (a, b) = curve.domain();
    let tol = PARAM_TOL * (b - a).abs().max(1.0);
    let is_disc = |t: f64| discontinuous.iter().any(|d| (d - t).abs() <= tol);
    let closure_shared = curve.is_closed() && closure_continuous;
    // global index of node j of element l
    let mut elem_dofs: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut next = 0;
    for l in 0..n {
        let mut ids = Vec::with_capacity(degree + 1);
        for j in 0..=degree {
            if j == 0 && l > 0 && !is_disc(nodes[l]) {
                ids.push(elem_dofs[l - 1][degree]);
            } else if j == degree && l == n - 1 && closure_shared {
                ids.push(elem_dofs[0][0]);
            } else {
                ids.push(next);
                next += 1;
            }
        }
        elem_dofs.push(ids);
    }
    let mut continuity: Vec<(f64, Continuity)> = nodes
        .iter()
        .map(|&t| {
            (
                t,
                if is_disc(t) {
                    Continuity::Discontinuous
                } else {
                    Continuity::C(0)
                },
            )
        })
        .collect();
    let closure = if closure_shared {
        Continuity::C(0)
    } else {
        Continuity::Discontinuous
    };
    continuity[0].1 = closure;
    continuity[n].1 = closure;
    lagrange_panels(
        SpaceKind::LagrangeCurvilinear,
        curve.clone(),
        curve,
        mesh,
        degree,
        elem_dofs,
        next,
        continuity,
    )
}

/// Fully discontinuous Lagrangian elements of `degree ≥ 0` on the polygon
/// inscribed at the mesh nodes.
pub fn build_polygonal_space(curve: &BoundaryCurve, mesh: &BoundaryMesh, degree: usize) -> Result<DiscreteSpace> {
    let poly = polygonal_boundary(curve, mesh).to_curve(curve.outward_sign())?;
    let n = mesh.len();
    let elem_dofs: Vec<Vec<usize>> = (0..n).map(|l| (0..=degree).map(|j| l * (degree + 1) + j).collect()).collect();
    let continuity = mesh.nodes().iter().map(|&t| (t, Continuity::Discontinuous)).collect();
    lagrange_panels(
        SpaceKind::LagrangePolygonal,
        poly,
        curve,
        mesh,
        degree,
        elem_dofs,
        n * (degree + 1),
        continuity,
    )
}

#[allow(clippy::too_many_arguments)]
fn lagrange_panels(
    kind: SpaceKind,
    geometry: BoundaryCurve,
    exact: &BoundaryCurve,
    mesh: &BoundaryMesh,
    degree: usize,
    elem_dofs: Vec<Vec<usize>>,
    dof_count: usize,
    continuity: Vec<(f64, Continuity)>,
) -> Result<DiscreteSpace> {
    let nodes = mesh.nodes();
    let params = panel_params(&geometry, &nodes)?;
    let panels = params
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let l = mesh
                .elements
                .iter()
                .position(|e| mid >= e.0 && mid <= e.1)
                .expect("panel inside the mesh");
            let (e0, e1) = mesh.elements[l];
            Panel {
                t0: w[0],
                t1: w[1],
                basis: LocalBasis::Lagrange { e0, e1, degree },
                dofs: elem_dofs[l].iter().copied().enumerate().collect(),
            }
        })
        .collect();
    Ok(DiscreteSpace {
        kind,
        degree,
        curve: geometry,
        exact: exact.clone(),
        panels,
        dof_count,
        continuity,
        knots: None,
        identified: false,
        h: mesh.h,
    })
}

/// Uniform mesh helper re-exported for space recipes.
pub fn mesh(curve: &BoundaryCurve, n: usize) -> Result<BoundaryMesh> {
    induced_mesh(curve, n)
}

/// A space with the dofs that do not vanish at given parameters removed.
#[derive(Clone, Debug)]
pub struct ConstrainedSpace {
    /// Dofs of the base space kept, in increasing order.
    pub kept: Vec<usize>,
    pub removed: Vec<usize>,
}

impl ConstrainedSpace {
    pub fn dof_count(&self) -> usize {
        self.kept.len()
    }
}

/// Removes every dof whose function is nonzero (from either side) at one of
/// `params`, so that the remaining span vanishes there.
pub fn constrain_endpoints(space: &DiscreteSpace, params: &[f64]) -> ConstrainedSpace {
    let mut removed: Vec<usize> = Vec::new();
    for &t in params {
        for side in [Side::Left, Side::Right] {
            for (g, v) in space.functions_at(t, side) {
                if v.abs() > 1e-12 && !removed.contains(&g) {
                    removed.push(g);
                }
            }
        }
    }
    removed.sort_unstable();
    let kept = (0..space.dof_count).filter(|g| !removed.contains(g)).collect();
    ConstrainedSpace { kept, removed }
}

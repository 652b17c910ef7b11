//! Boundary value problems and their text file format.

use std::path::Path;

use serde::Deserialize;

use crate::builtin;
use crate::data::{HarmonicFunction, ScreenDensity};
use crate::error::{Error, Result};
use crate::geometry::{merge_params, BoundaryCurve, Point, PARAM_TOL};
use crate::spline::KnotVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BcKind {
    Dirichlet,
    Neumann,
}

/// Source of prescribed boundary values.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryData {
    /// Trace (Dirichlet) or normal derivative (Neumann) of a harmonic function.
    Harmonic(HarmonicFunction),
    /// Single-layer potential of a density on the same open arc.
    ScreenPotential(ScreenDensity),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCondition {
    pub curve: usize,
    /// Parameter range; the whole curve when absent.
    pub range: Option<(f64, f64)>,
    pub kind: BcKind,
    pub data: BoundaryData,
}

/// Reference solution used for error measurement.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactSolution {
    /// Interior harmonic function; its trace and flux are the exact boundary data.
    Harmonic(HarmonicFunction),
    /// Density of a single-layer potential on open arcs.
    Screen(ScreenDensity),
}

/// Interior mixed problem on closed curves, or a Dirichlet problem on open arcs.
#[derive(Clone, Debug)]
pub struct BvpProblem {
    pub curves: Vec<BoundaryCurve>,
    pub conditions: Vec<BoundaryCondition>,
    pub exact: Option<ExactSolution>,
}

impl BvpProblem {
    pub fn new(curves: Vec<BoundaryCurve>, conditions: Vec<BoundaryCondition>, exact: Option<ExactSolution>) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::IllPosed("no boundary curves".into()));
        }
        let open = curves.iter().filter(|c| !c.is_closed()).count();
        if open > 0 && open < curves.len() {
            return Err(Error::Unsupported("open arcs mixed with closed curves".into()));
        }
        for (i, bc) in conditions.iter().enumerate() {
            let curve = curves
                .get(bc.curve)
                .ok_or_else(|| Error::IllPosed(format!("condition {i} refers to missing curve {}", bc.curve)))?;
            if let Some((a, b)) = bc.range {
                let (ca, cb) = curve.domain();
                let tol = PARAM_TOL * (cb - ca).abs().max(1.0);
                if !(a < b) || a < ca - tol || b > cb + tol {
                    return Err(Error::IllPosed(format!(
                        "condition {i} has range [{a}, {b}] outside [{ca}, {cb}]"
                    )));
                }
            }
            if !curve.is_closed() && bc.kind == BcKind::Neumann {
                return Err(Error::IllPosed(format!("condition {i}: open arcs carry Dirichlet data only")));
            }
            if curve.is_closed() && matches!(bc.data, BoundaryData::ScreenPotential(_)) {
                return Err(Error::IllPosed(format!("condition {i}: screen data on a closed curve")));
            }
        }
        let problem = Self {
            curves,
            conditions,
            exact,
        };
        let mut dirichlet = false;
        for c in 0..problem.curves.len() {
            for (t0, t1) in problem.parts(c) {
                match problem.condition_at(c, 0.5 * (t0 + t1)) {
                    None => {
                        return Err(Error::IllPosed(format!("curve {c} has no condition on [{t0}, {t1}]")));
                    }
                    Some(i) => dirichlet |= problem.conditions[i].kind == BcKind::Dirichlet,
                }
            }
        }
        if !dirichlet {
            return Err(Error::IllPosed("the Dirichlet part has zero measure".into()));
        }
        Ok(problem)
    }

    /// All curves are open arcs.
    pub fn is_screen(&self) -> bool {
        !self.curves[0].is_closed()
    }

    pub fn has_neumann(&self) -> bool {
        self.conditions.iter().any(|c| c.kind == BcKind::Neumann)
    }

    /// Index of the condition governing parameter `t` of `curve` (the last listed wins).
    pub fn condition_at(&self, curve: usize, t: f64) -> Option<usize> {
        self.conditions.iter().rposition(|bc| {
            bc.curve == curve
                && match bc.range {
                    None => true,
                    Some((a, b)) => t >= a && t <= b,
                }
        })
    }

    pub fn kind_at(&self, curve: usize, t: f64) -> BcKind {
        self.condition_at(curve, t)
            .map(|i| self.conditions[i].kind)
            .unwrap_or(BcKind::Dirichlet)
    }

    /// Parameters at which the condition may change: range ends and domain ends.
    pub fn breakpoints(&self, curve: usize) -> Vec<f64> {
        let (a, b) = self.curves[curve].domain();
        let mut pts = vec![a, b];
        for bc in self.conditions.iter().filter(|bc| bc.curve == curve) {
            if let Some((r0, r1)) = bc.range {
                pts.extend([r0, r1]);
            }
        }
        merge_params(&[&pts], b - a)
    }

    fn parts(&self, curve: usize) -> Vec<(f64, f64)> {
        self.breakpoints(curve).windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Points where the Dirichlet and Neumann parts of `curve` meet.
    pub fn interfaces(&self, curve: usize) -> Vec<f64> {
        let parts = self.parts(curve);
        let kinds: Vec<BcKind> = parts.iter().map(|&(a, b)| self.kind_at(curve, 0.5 * (a + b))).collect();
        let mut out = Vec::new();
        for i in 1..parts.len() {
            if kinds[i] != kinds[i - 1] {
                out.push(parts[i].0);
            }
        }
        if self.curves[curve].is_closed() && parts.len() > 1 && kinds[0] != kinds[parts.len() - 1] {
            out.push(parts[0].0);
            out.push(parts[parts.len() - 1].1);
        }
        out
    }

    /// Example 1: Dirichlet data `−(x₁ + x₂)` on the three-corner domain.
    pub fn example1() -> Self {
        Self::dirichlet(vec![builtin::example1_curve()], HarmonicFunction::NegSum)
    }

    /// Example 2: Dirichlet data `−(x₁ + x₂)` on the smooth free-form domain.
    pub fn example2() -> Self {
        Self::dirichlet(vec![builtin::example2_curve()], HarmonicFunction::NegSum)
    }

    /// Example 3: `u = 1` on the inner boundary and zero flux on the outer one.
    pub fn example3(domain_b: bool) -> Self {
        let (outer, inner) = builtin::example3_curves(domain_b);
        let one = HarmonicFunction::Const(1.0);
        Self::new(
            vec![outer, inner],
            vec![
                BoundaryCondition {
                    curve: 0,
                    range: None,
                    kind: BcKind::Neumann,
                    data: BoundaryData::Harmonic(one.clone()),
                },
                BoundaryCondition {
                    curve: 1,
                    range: None,
                    kind: BcKind::Dirichlet,
                    data: BoundaryData::Harmonic(one.clone()),
                },
            ],
            Some(ExactSolution::Harmonic(one)),
        )
        .expect("built-in problem is valid")
    }

    /// Example 4: exterior Dirichlet problem on the parabolic arc whose
    /// density jump is `√(1 + 4x₁²)`.
    pub fn example4() -> Self {
        Self::new(
            vec![builtin::example4_curve()],
            vec![BoundaryCondition {
                curve: 0,
                range: None,
                kind: BcKind::Dirichlet,
                data: BoundaryData::ScreenPotential(ScreenDensity::ParabolaJump),
            }],
            Some(ExactSolution::Screen(ScreenDensity::ParabolaJump)),
        )
        .expect("built-in problem is valid")
    }

    /// Dirichlet problem with harmonic data on every curve.
    pub fn dirichlet(curves: Vec<BoundaryCurve>, u: HarmonicFunction) -> Self {
        let conditions = (0..curves.len())
            .map(|c| BoundaryCondition {
                curve: c,
                range: None,
                kind: BcKind::Dirichlet,
                data: BoundaryData::Harmonic(u.clone()),
            })
            .collect();
        Self::new(curves, conditions, Some(ExactSolution::Harmonic(u))).expect("Dirichlet problem is valid")
    }
}

/// Discretization settings read from a problem file.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FileSettings {
    pub method: Option<String>,
    pub degree: Option<usize>,
    pub levels: Option<usize>,
    pub elements: Option<usize>,
    pub quad_order: Option<usize>,
    /// Per-curve continuity across the closing point of B-spline spaces;
    /// empty when no curve sets it, in which case closed curves are continuous.
    pub closure_continuous: Vec<bool>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    curves: Vec<RawCurve>,
    bc: Vec<RawBc>,
    exact: Option<String>,
    method: Option<RawMethod>,
    refinement: Option<RawRefinement>,
    quadrature: Option<RawQuadrature>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurve {
    name: Option<String>,
    degree: Option<usize>,
    knots: Option<Vec<f64>>,
    points: Option<Vec<[f64; 2]>>,
    circle: Option<RawCircle>,
    closed: Option<bool>,
    outward_sign: Option<f64>,
    closure_continuous: Option<bool>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircle {
    center: [f64; 2],
    radius: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBc {
    curve: toml::Value,
    kind: String,
    data: String,
    range: Option<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMethod {
    name: Option<String>,
    degree: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRefinement {
    levels: Option<usize>,
    elements: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    order: Option<usize>,
}

/// Parses `neg_sum`, `const:<v>`, `poly:<a0>,<a1>,<b1>,…` and `screen:parabola`.
pub fn parse_data(s: &str) -> std::result::Result<BoundaryData, String> {
    let s = s.trim();
    if s == "neg_sum" {
        return Ok(BoundaryData::Harmonic(HarmonicFunction::NegSum));
    }
    if s == "screen:parabola" {
        return Ok(BoundaryData::ScreenPotential(ScreenDensity::ParabolaJump));
    }
    if let Some(v) = s.strip_prefix("const:") {
        return v
            .trim()
            .parse::<f64>()
            .map(|v| BoundaryData::Harmonic(HarmonicFunction::Const(v)))
            .map_err(|e| format!("bad constant '{v}': {e}"));
    }
    if let Some(list) = s.strip_prefix("poly:") {
        let coeffs: std::result::Result<Vec<f64>, _> = list.split(',').map(|c| c.trim().parse::<f64>()).collect();
        return coeffs
            .map(|c| BoundaryData::Harmonic(HarmonicFunction::Poly(c)))
            .map_err(|e| format!("bad coefficient list '{list}': {e}"));
    }
    Err(format!(
        "unknown data '{s}' (expected neg_sum, const:<v>, poly:<list> or screen:parabola)"
    ))
}

/// Reads a problem file; every diagnostic names the offending field.
pub fn load_problem_file(path: &Path) -> Result<(BvpProblem, FileSettings)> {
    let text = std::fs::read_to_string(path)?;
    parse_problem(&text, &path.display().to_string())
}

pub fn parse_problem(text: &str, origin: &str) -> Result<(BvpProblem, FileSettings)> {
    let fail = |message: String| Error::Parse {
        path: origin.to_string(),
        message,
    };
    let raw: RawFile = toml::from_str(text).map_err(|e| fail(e.to_string()))?;
    let mut names = Vec::new();
    let mut curves = Vec::new();
    for (i, rc) in raw.curves.iter().enumerate() {
        let sign = rc.outward_sign.unwrap_or(1.0);
        let curve = if let Some(c) = &rc.circle {
            BoundaryCurve::circle(Point::new(c.center[0], c.center[1]), c.radius)
        } else {
            let degree = rc.degree.ok_or_else(|| fail(format!("curves[{i}].degree is required")))?;
            let knots = rc
                .knots
                .clone()
                .ok_or_else(|| fail(format!("curves[{i}].knots is required")))?;
            let points = rc
                .points
                .as_ref()
                .ok_or_else(|| fail(format!("curves[{i}].points is required")))?;
            let kv = KnotVector::new(degree + 1, knots).map_err(|e| fail(format!("curves[{i}].knots: {e}")))?;
            let pts = points.iter().map(|p| Point::new(p[0], p[1])).collect();
            BoundaryCurve::spline(kv, pts, rc.closed.unwrap_or(true), sign)
        }
        .map_err(|e| fail(format!("curves[{i}]: {e}")))?;
        names.push(rc.name.clone().unwrap_or_else(|| i.to_string()));
        curves.push(curve);
    }
    let mut conditions = Vec::new();
    for (i, rb) in raw.bc.iter().enumerate() {
        let curve = match &rb.curve {
            toml::Value::Integer(n) if *n >= 0 && (*n as usize) < curves.len() => *n as usize,
            toml::Value::String(s) => names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| fail(format!("bc[{i}].curve: no curve named '{s}'")))?,
            other => return Err(fail(format!("bc[{i}].curve: invalid reference {other}"))),
        };
        let kind = match rb.kind.as_str() {
            "dirichlet" => BcKind::Dirichlet,
            "neumann" => BcKind::Neumann,
            k => return Err(fail(format!("bc[{i}].kind: '{k}' is neither dirichlet nor neumann"))),
        };
        let data = parse_data(&rb.data).map_err(|m| fail(format!("bc[{i}].data: {m}")))?;
        conditions.push(BoundaryCondition {
            curve,
            range: rb.range.map(|r| (r[0], r[1])),
            kind,
            data,
        });
    }
    let exact = match &raw.exact {
        None => None,
        Some(s) => Some(match parse_data(s).map_err(|m| fail(format!("exact: {m}")))? {
            BoundaryData::Harmonic(h) => ExactSolution::Harmonic(h),
            BoundaryData::ScreenPotential(d) => ExactSolution::Screen(d),
        }),
    };
    let problem = BvpProblem::new(curves, conditions, exact).map_err(|e| fail(e.to_string()))?;
    let settings = FileSettings {
        method: raw.method.as_ref().and_then(|m| m.name.clone()),
        degree: raw.method.as_ref().and_then(|m| m.degree),
        levels: raw.refinement.as_ref().and_then(|r| r.levels),
        elements: raw.refinement.as_ref().and_then(|r| r.elements),
        quad_order: raw.quadrature.as_ref().and_then(|q| q.order),
        closure_continuous: if raw.curves.iter().any(|c| c.closure_continuous.is_some()) {
            raw.curves.iter().map(|c| c.closure_continuous.unwrap_or(true)).collect()
        } else {
            Vec::new()
        },
    };
    Ok((problem, settings))
}

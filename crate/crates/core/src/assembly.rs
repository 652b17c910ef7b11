//! Galerkin and collocation systems.
//!
//! The boundary is cut into panels at the union of the space breakpoints and
//! the points where the boundary condition changes. Each block of the system
//! is a sum over panel pairs of local matrices scattered through panel maps
//! `(local function, global column, coefficient)`. Data columns are single
//! columns whose coefficients are those of the interpolated data.
//!
//! Unknowns are ordered `[q on Γ₁; u on Γ₂]` and the system is
//! ```text
//! [  V₁₁  −K₁₂ ] [q]   [ ½M g_D + K g_D − V g_N  ]
//! [ −K′₂₁ −W₂₂ ] [u] = [ −½M g_N + K′ g_N + W g_D ]
//! ```
//! with `W` the positive Maue form of the hypersingular operator. Open arcs
//! lead to the first-kind equation `V q = u*` alone.

use std::borrow::Cow;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::data::ScreenDensity;
use crate::error::{Error, Result};
use crate::geometry::{induced_mesh, merge_params, BoundaryCurve, Point, PARAM_TOL};
use crate::kernels::KernelKind;
use crate::linalg::{singular_condition, solve_symmetric, spectral_condition};
use crate::postprocess::{BoundarySolution, SolutionPanel};
use crate::problem::{BcKind, BoundaryData, BvpProblem};
use crate::quadrature::{gauss_legendre, quadrature_cells, FnShapes, Integrator, PanelRef, QuadConfig};
use crate::spaces::{constrain_endpoints, Continuity, DiscreteSpace};
use crate::spline::Side;

/// Per panel: `(local function, global column, coefficient)`.
pub type PanelMap = Vec<Vec<(usize, usize, f64)>>;

/// A panel of the assembled boundary.
#[derive(Clone, Debug)]
pub struct BoundaryPanel {
    pub curve: usize,
    /// Index of the space panel containing it.
    pub space_panel: usize,
    pub t0: f64,
    pub t1: f64,
    pub kind: BcKind,
    pub cells: Vec<(f64, f64)>,
}

/// Assembled symmetric system and its layout.
#[derive(Clone, Debug)]
pub struct GalerkinSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    /// Number of flux unknowns (leading block).
    pub n_q: usize,
    /// Number of trace unknowns (trailing block).
    pub n_u: usize,
}

impl GalerkinSystem {
    pub fn order(&self) -> usize {
        self.n_q + self.n_u
    }

    pub fn condition(&self) -> f64 {
        spectral_condition(&self.matrix)
    }
}

/// A problem together with one discrete space per curve.
pub struct Discretization {
    pub problem: BvpProblem,
    pub spaces: Vec<DiscreteSpace>,
    pub panels: Vec<BoundaryPanel>,
    /// `(curve, space dof)` of every flux unknown.
    pub q_dofs: Vec<(usize, usize)>,
    /// `(curve, space dof)` of every trace unknown.
    pub u_dofs: Vec<(usize, usize)>,
    /// Interpolated Dirichlet data per curve, trace unknowns zeroed.
    pub g_d: Vec<Vec<f64>>,
    /// Interpolated Neumann data per curve.
    pub g_n: Vec<Vec<f64>>,
    pub integrator: Integrator,
    screen: Option<ScreenPotential>,
}

fn panel_ref<'a>(spaces: &'a [DiscreteSpace], p: &'a BoundaryPanel) -> PanelRef<'a> {
    let space = &spaces[p.curve];
    PanelRef::with_cells(
        &space.curve,
        p.t0,
        p.t1,
        &space.panels[p.space_panel].basis,
        Cow::Borrowed(&p.cells),
    )
}

/// `Σ_pairs` of local matrices scattered through the maps; with `symmetric`
/// the two sides are identical and only `p ≤ q` pairs are integrated.
#[allow(clippy::too_many_arguments)]
fn assemble_maps(
    integ: &Integrator,
    kind: KernelKind,
    xs: &[PanelRef],
    test: &PanelMap,
    ys: &[PanelRef],
    trial: &PanelMap,
    rows: usize,
    cols: usize,
    symmetric: bool,
) -> DMatrix<f64> {
    let pairs: Vec<(usize, usize)> = (0..xs.len())
        .filter(|&p| !test[p].is_empty())
        .flat_map(|p| {
            (0..ys.len())
                .filter(move |&q| !trial[q].is_empty() && (!symmetric || p <= q))
                .map(move |q| (p, q))
        })
        .collect();
    let locals: Vec<DMatrix<f64>> = pairs
        .par_iter()
        .map(|&(p, q)| integ.pair_block(kind, &xs[p], &ys[q]))
        .collect();
    let mut out = DMatrix::zeros(rows, cols);
    let mut scatter = |p: usize, q: usize, m: &DMatrix<f64>, transpose: bool| {
        for &(r, i, a) in &test[p] {
            for &(s, j, b) in &trial[q] {
                let v = if transpose { m[(s, r)] } else { m[(r, s)] };
                out[(i, j)] += a * b * v;
            }
        }
    };
    for (&(p, q), m) in pairs.iter().zip(&locals) {
        scatter(p, q, m, false);
        if symmetric && p != q {
            scatter(q, p, m, true);
        }
    }
    out
}

/// Quadrature nodes `(t, w·|C′(t)|)` on the cells of a panel.
fn panel_nodes(curve: &BoundaryCurve, p: &PanelRef, order: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(order);
    let mut out = Vec::with_capacity(rule.len() * p.cells.len());
    for &(a, b) in p.cells.iter() {
        for (u, w) in rule.iter() {
            let t = a + u * (b - a);
            out.push((t, w * (b - a) * curve.eval_at(p.hint, t).1.norm()));
        }
    }
    out
}

/// Cells touching an end of an open curve, geometrically graded toward it so
/// that data with `r ln r` behaviour at the end integrates accurately.
fn graded_cells(curve: &BoundaryCurve, cells: &[(f64, f64)]) -> Vec<(f64, f64)> {
    const RATIO: f64 = 0.15;
    const LEVELS: usize = 12;
    if curve.is_closed() {
        return cells.to_vec();
    }
    let (lo, hi) = curve.domain();
    let mut out = Vec::with_capacity(cells.len() + 2 * LEVELS);
    for &(a, b) in cells {
        if a == lo {
            let mut cut = Vec::with_capacity(LEVELS + 2);
            cut.push(a);
            cut.extend((0..LEVELS).rev().map(|k| a + (b - a) * RATIO.powi(k as i32 + 1)));
            cut.push(b);
            out.extend(cut.windows(2).map(|w| (w[0], w[1])));
        } else if b == hi {
            let mut cut = Vec::with_capacity(LEVELS + 2);
            cut.push(a);
            cut.extend((0..LEVELS).map(|k| b - (b - a) * RATIO.powi(k as i32 + 1)));
            cut.push(b);
            out.extend(cut.windows(2).map(|w| (w[0], w[1])));
        } else {
            out.push((a, b));
        }
    }
    out
}

fn mass_maps(xs: &[PanelRef], test: &PanelMap, trial: &PanelMap, rows: usize, cols: usize, order: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(rows, cols);
    for (p, x) in xs.iter().enumerate() {
        if test[p].is_empty() || trial[p].is_empty() {
            continue;
        }
        let m = x.shapes.len();
        let mut val = vec![0.0; m];
        let mut der = vec![0.0; m];
        let mut local = DMatrix::<f64>::zeros(m, m);
        for (t, w) in panel_nodes(x.curve, x, order) {
            x.shapes.eval(t, &mut val, &mut der);
            for r in 0..m {
                for s in 0..m {
                    local[(r, s)] += w * val[r] * val[s];
                }
            }
        }
        for &(r, i, a) in &test[p] {
            for &(s, j, b) in &trial[p] {
                out[(i, j)] += a * b * local[(r, s)];
            }
        }
    }
    out
}

/// Galerkin matrix of one operator between two full spaces.
pub fn assemble_block(kind: KernelKind, test: &DiscreteSpace, trial: &DiscreteSpace, cfg: QuadConfig) -> DMatrix<f64> {
    let integ = Integrator::new(cfg);
    let build = |s: &DiscreteSpace| -> (Vec<Vec<(f64, f64)>>, PanelMap) {
        let cells = s
            .panels
            .iter()
            .map(|p| quadrature_cells(&s.curve, s.curve.locate(0.5 * (p.t0 + p.t1)), p.t0, p.t1, cfg.disjoint))
            .collect();
        let map = s
            .panels
            .iter()
            .map(|p| p.dofs.iter().map(|&(r, g)| (r, g, 1.0)).collect())
            .collect();
        (cells, map)
    };
    let (cx, mx) = build(test);
    let (cy, my) = build(trial);
    let xs = space_refs(test, &cx);
    let ys = space_refs(trial, &cy);
    let symmetric = kind.is_symmetric() && std::ptr::eq(test, trial);
    assemble_maps(&integ, kind, &xs, &mx, &ys, &my, test.dof_count, trial.dof_count, symmetric)
}

fn space_refs<'a>(s: &'a DiscreteSpace, cells: &'a [Vec<(f64, f64)>]) -> Vec<PanelRef<'a>> {
    s.panels
        .iter()
        .zip(cells)
        .map(|(p, c)| PanelRef::with_cells(&s.curve, p.t0, p.t1, &p.basis, Cow::Borrowed(c)))
        .collect()
}

/// Mass matrix `∫ φ_i φ_j dγ` of a space.
pub fn assemble_mass(space: &DiscreteSpace, order: usize) -> DMatrix<f64> {
    let xs: Vec<PanelRef> = space
        .panels
        .iter()
        .map(|p| PanelRef::new(&space.curve, p.t0, p.t1, &p.basis))
        .collect();
    let map: PanelMap = space
        .panels
        .iter()
        .map(|p| p.dofs.iter().map(|&(r, g)| (r, g, 1.0)).collect())
        .collect();
    mass_maps(&xs, &map, &map, space.dof_count, space.dof_count, order)
}

/// Single-layer potential of a density on an open arc, evaluated on the arc.
struct ScreenPotential {
    curve: BoundaryCurve,
    density: ScreenDensity,
    panels: Vec<CellPanel>,
    breakpoints: Vec<f64>,
    order: usize,
}

/// Parameter interval and its quadrature cells.
type CellPanel = (f64, f64, Vec<(f64, f64)>);

/// Panels used to integrate a prescribed density.
const SCREEN_PANELS: usize = 64;

impl ScreenPotential {
    fn new(curve: &BoundaryCurve, density: ScreenDensity, order: usize) -> Result<Self> {
        let (a, b) = curve.domain();
        let mesh = induced_mesh(curve, SCREEN_PANELS)?;
        let breakpoints = curve.breakpoints();
        let params = merge_params(&[&mesh.nodes(), &breakpoints], b - a);
        let panels = params
            .windows(2)
            .map(|w| {
                (
                    w[0],
                    w[1],
                    quadrature_cells(curve, curve.locate(0.5 * (w[0] + w[1])), w[0], w[1], order),
                )
            })
            .collect();
        Ok(Self {
            curve: curve.clone(),
            density,
            panels,
            breakpoints,
            order,
        })
    }

    /// The panels around `t` are re-split at `t`, and a mesh node closer to
    /// `t` than half the neighbouring panel is dropped, so every panel not
    /// touching `x` stays well separated from it.
    fn value(&self, integ: &Integrator, t: f64) -> f64 {
        let x = self.curve.point(t);
        let curve = &self.curve;
        let density = self.density;
        let shape = FnShapes(vec![move |s: f64| (density.value(curve.point(s)), 0.0)]);
        let k = self.panels.iter().position(|p| t <= p.1).unwrap_or(self.panels.len() - 1);
        let lo = k.saturating_sub(1);
        let hi = (k + 1).min(self.panels.len() - 1);
        let fixed = |n: f64| self.breakpoints.contains(&n);
        let mut local: Vec<f64> = (lo..=hi).map(|i| self.panels[i].0).collect();
        local.push(self.panels[hi].1);
        let (first, last) = (local[0], *local.last().unwrap());
        let mut nodes: Vec<f64> = local
            .iter()
            .enumerate()
            .filter(|&(i, &n)| {
                let gap = if n < t {
                    n - local.get(i.wrapping_sub(1)).copied().unwrap_or(n)
                } else {
                    local.get(i + 1).copied().unwrap_or(n) - n
                };
                n == first || n == last || fixed(n) || (n - t).abs() >= 0.5 * gap
            })
            .map(|(_, &n)| n)
            .collect();
        if !nodes.contains(&t) {
            nodes.push(t);
            nodes.sort_by(f64::total_cmp);
        }
        let mut out = [0.0];
        let mut total = 0.0;
        let mut add = |t0: f64, t1: f64, cells: Cow<[(f64, f64)]>| {
            let p = PanelRef::with_cells(curve, t0, t1, &shape, cells);
            let on = (t >= t0 && t <= t1).then_some(t);
            integ.point_integrals(false, x, &p, on, &mut out);
            total += out[0];
        };
        for (i, (t0, t1, cells)) in self.panels.iter().enumerate() {
            if i < lo || i > hi {
                add(*t0, *t1, Cow::Borrowed(cells));
            }
        }
        for w in nodes.windows(2) {
            let cells = quadrature_cells(curve, curve.locate(0.5 * (w[0] + w[1])), w[0], w[1], self.order);
            add(w[0], w[1], Cow::Owned(cells));
        }
        total
    }
}

impl Discretization {
    pub fn new(problem: BvpProblem, spaces: Vec<DiscreteSpace>, cfg: QuadConfig) -> Result<Self> {
        if spaces.len() != problem.curves.len() {
            return Err(Error::Space(format!(
                "{} spaces for {} curves",
                spaces.len(),
                problem.curves.len()
            )));
        }
        let screen = problem.is_screen();
        let mut panels = Vec::new();
        for (c, space) in spaces.iter().enumerate() {
            let (a, b) = space.curve.domain();
            let (ca, cb) = problem.curves[c].domain();
            let tol = PARAM_TOL * (b - a).abs().max(1.0);
            if (a - ca).abs() > tol || (b - cb).abs() > tol {
                return Err(Error::Space(format!("space {c} is not defined on the domain of curve {c}")));
            }
            let cuts = problem.breakpoints(c);
            for (sp, panel) in space.panels.iter().enumerate() {
                let inner: Vec<f64> = cuts
                    .iter()
                    .copied()
                    .filter(|&t| t > panel.t0 + tol && t < panel.t1 - tol)
                    .collect();
                let params = merge_params(&[&[panel.t0, panel.t1], &inner], b - a);
                for w in params.windows(2) {
                    let kind = problem.kind_at(c, 0.5 * (w[0] + w[1]));
                    let hint = space.curve.locate(0.5 * (w[0] + w[1]));
                    panels.push(BoundaryPanel {
                        curve: c,
                        space_panel: sp,
                        t0: w[0],
                        t1: w[1],
                        kind,
                        cells: quadrature_cells(&space.curve, hint, w[0], w[1], cfg.disjoint),
                    });
                }
            }
            let neumann = panels.iter().any(|p| p.curve == c && p.kind == BcKind::Neumann);
            if neumann {
                let n = space.continuity.len();
                let disc = space
                    .continuity
                    .iter()
                    .enumerate()
                    .any(|(i, &(_, k))| k == Continuity::Discontinuous && (space.curve.is_closed() || (i > 0 && i + 1 < n)));
                if disc {
                    return Err(Error::Space(format!(
                        "curve {c} has a Neumann part, which needs a continuous space"
                    )));
                }
            }
        }
        let mut q_dofs = Vec::new();
        let mut u_dofs = Vec::new();
        for (c, space) in spaces.iter().enumerate() {
            let removed = constrain_endpoints(space, &problem.interfaces(c)).removed;
            for g in 0..space.dof_count {
                let on = |kind: BcKind| {
                    panels
                        .iter()
                        .any(|p| p.curve == c && p.kind == kind && space.panels[p.space_panel].dofs.iter().any(|&(_, d)| d == g))
                };
                if on(BcKind::Dirichlet) {
                    q_dofs.push((c, g));
                }
                if !on(BcKind::Dirichlet) && on(BcKind::Neumann) && !removed.contains(&g) {
                    u_dofs.push((c, g));
                }
            }
        }
        let integrator = Integrator::new(cfg);
        let screen_data = match problem.conditions.iter().find_map(|bc| match bc.data {
            BoundaryData::ScreenPotential(d) => Some((bc.curve, d)),
            _ => None,
        }) {
            Some((c, d)) => Some(ScreenPotential::new(&problem.curves[c], d, cfg.disjoint)?),
            None => None,
        };
        let mut g_d = Vec::new();
        let mut g_n = Vec::new();
        for (c, space) in spaces.iter().enumerate() {
            if screen {
                g_d.push(vec![0.0; space.dof_count]);
                g_n.push(vec![0.0; space.dof_count]);
                continue;
            }
            let pick = |t: f64, kind: BcKind| {
                problem
                    .condition_at(c, t)
                    .filter(|&i| problem.conditions[i].kind == kind)
                    .or_else(|| problem.conditions.iter().position(|bc| bc.curve == c && bc.kind == kind))
                    .map(|i| &problem.conditions[i].data)
            };
            let mut d = space.interpolate(&|t, _side| {
                Ok(match pick(t, BcKind::Dirichlet) {
                    Some(BoundaryData::Harmonic(h)) => h.value(space.curve.point(t)),
                    _ => 0.0,
                })
            })?;
            for &(cu, g) in &u_dofs {
                if cu == c {
                    d[g] = 0.0;
                }
            }
            let n = space.interpolate(&|t, side| {
                Ok(match pick(t, BcKind::Neumann) {
                    Some(BoundaryData::Harmonic(h)) => {
                        let f = space.curve.frame_side(t, side)?;
                        h.flux(f.point, f.normal)
                    }
                    _ => 0.0,
                })
            })?;
            g_d.push(d);
            g_n.push(n);
        }
        Ok(Self {
            problem,
            spaces,
            panels,
            q_dofs,
            u_dofs,
            g_d,
            g_n,
            integrator,
            screen: screen_data,
        })
    }

    fn refs(&self) -> Vec<PanelRef<'_>> {
        self.panels.iter().map(|p| panel_ref(&self.spaces, p)).collect()
    }

    fn index_map(&self, dofs: &[(usize, usize)], kind: BcKind) -> PanelMap {
        let mut index: Vec<Vec<Option<usize>>> = self.spaces.iter().map(|s| vec![None; s.dof_count]).collect();
        for (i, &(c, g)) in dofs.iter().enumerate() {
            index[c][g] = Some(i);
        }
        self.panels
            .iter()
            .map(|p| {
                if p.kind != kind {
                    return Vec::new();
                }
                self.spaces[p.curve].panels[p.space_panel]
                    .dofs
                    .iter()
                    .filter_map(|&(r, g)| index[p.curve][g].map(|i| (r, i, 1.0)))
                    .collect()
            })
            .collect()
    }

    fn data_map(&self, data: &[Vec<f64>], only: Option<BcKind>) -> PanelMap {
        self.panels
            .iter()
            .map(|p| {
                if only.is_some_and(|k| k != p.kind) {
                    return Vec::new();
                }
                self.spaces[p.curve].panels[p.space_panel]
                    .dofs
                    .iter()
                    .filter(|&&(_, g)| data[p.curve][g] != 0.0)
                    .map(|&(r, g)| (r, 0, data[p.curve][g]))
                    .collect()
            })
            .collect()
    }

    /// Prescribed Dirichlet value at parameter `t` of `curve` for single-equation problems.
    pub fn dirichlet_value(&self, curve: usize, t: f64) -> Result<f64> {
        let i = self
            .problem
            .condition_at(curve, t)
            .ok_or_else(|| Error::IllPosed(format!("no condition at t = {t} on curve {curve}")))?;
        match &self.problem.conditions[i].data {
            BoundaryData::Harmonic(h) => Ok(h.value(self.problem.curves[curve].point(t))),
            BoundaryData::ScreenPotential(_) => {
                let s = self.screen.as_ref().expect("screen data prepared");
                Ok(s.value(&self.integrator, t))
            }
        }
    }

    pub fn assemble(&self) -> Result<GalerkinSystem> {
        let refs = self.refs();
        let integ = &self.integrator;
        let (nq, nu) = (self.q_dofs.len(), self.u_dofs.len());
        let map_q = self.index_map(&self.q_dofs, BcKind::Dirichlet);
        let v11 = assemble_maps(integ, KernelKind::SingleLayer, &refs, &map_q, &refs, &map_q, nq, nq, true);
        if self.problem.is_screen() {
            let order = integ.cfg.disjoint;
            let rows: Vec<Vec<(usize, f64)>> = refs
                .par_iter()
                .enumerate()
                .map(|(p, x)| -> Result<Vec<(usize, f64)>> {
                    let m = x.shapes.len();
                    let mut local = vec![0.0; m];
                    let mut val = vec![0.0; m];
                    let mut der = vec![0.0; m];
                    if map_q[p].is_empty() {
                        return Ok(Vec::new());
                    }
                    let graded = PanelRef::with_cells(x.curve, x.t0, x.t1, x.shapes, Cow::Owned(graded_cells(x.curve, &x.cells)));
                    for (t, w) in panel_nodes(x.curve, &graded, order) {
                        let f = self.dirichlet_value(self.panels[p].curve, t)?;
                        x.shapes.eval(t, &mut val, &mut der);
                        for r in 0..m {
                            local[r] += w * f * val[r];
                        }
                    }
                    Ok(map_q[p].iter().map(|&(r, i, a)| (i, a * local[r])).collect())
                })
                .collect::<Result<_>>()?;
            let mut rhs = DVector::zeros(nq);
            for row in rows {
                for (i, v) in row {
                    rhs[i] += v;
                }
            }
            return Ok(GalerkinSystem {
                matrix: v11,
                rhs,
                n_q: nq,
                n_u: 0,
            });
        }
        let map_u = self.index_map(&self.u_dofs, BcKind::Neumann);
        let map_gd = self.data_map(&self.g_d, None);
        let map_gn = self.data_map(&self.g_n, Some(BcKind::Neumann));
        let order = integ.cfg.disjoint;
        let k12 = assemble_maps(integ, KernelKind::DoubleLayer, &refs, &map_q, &refs, &map_u, nq, nu, false);
        let w22 = assemble_maps(integ, KernelKind::Hypersingular, &refs, &map_u, &refs, &map_u, nu, nu, true);
        let mut b1 = mass_maps(&refs, &map_q, &map_gd, nq, 1, order) * 0.5;
        b1 += assemble_maps(integ, KernelKind::DoubleLayer, &refs, &map_q, &refs, &map_gd, nq, 1, false);
        b1 -= assemble_maps(integ, KernelKind::SingleLayer, &refs, &map_q, &refs, &map_gn, nq, 1, false);
        let mut b2 = mass_maps(&refs, &map_u, &map_gn, nu, 1, order) * -0.5;
        b2 += assemble_maps(
            integ,
            KernelKind::AdjointDoubleLayer,
            &refs,
            &map_u,
            &refs,
            &map_gn,
            nu,
            1,
            false,
        );
        b2 += assemble_maps(integ, KernelKind::Hypersingular, &refs, &map_u, &refs, &map_gd, nu, 1, false);
        let n = nq + nu;
        let mut a = DMatrix::zeros(n, n);
        a.view_mut((0, 0), (nq, nq)).copy_from(&v11);
        a.view_mut((0, nq), (nq, nu)).copy_from(&(-&k12));
        a.view_mut((nq, 0), (nu, nq)).copy_from(&(-k12.transpose()));
        a.view_mut((nq, nq), (nu, nu)).copy_from(&(-w22));
        let mut rhs = DVector::zeros(n);
        rhs.rows_mut(0, nq).copy_from(&b1.column(0));
        rhs.rows_mut(nq, nu).copy_from(&b2.column(0));
        Ok(GalerkinSystem {
            matrix: a,
            rhs,
            n_q: nq,
            n_u: nu,
        })
    }

    /// Boundary traces from a solution vector of [`Discretization::assemble`].
    pub fn solution(&self, x: &DVector<f64>) -> BoundarySolution {
        let mut q: Vec<Vec<f64>> = self.spaces.iter().map(|s| vec![0.0; s.dof_count]).collect();
        let mut u = self.g_d.clone();
        for (i, &(c, g)) in self.q_dofs.iter().enumerate() {
            q[c][g] = x[i];
        }
        for (i, &(c, g)) in self.u_dofs.iter().enumerate() {
            u[c][g] += x[self.q_dofs.len() + i];
        }
        BoundarySolution {
            spaces: self.spaces.clone(),
            panels: self
                .panels
                .iter()
                .map(|p| SolutionPanel {
                    curve: p.curve,
                    space_panel: p.space_panel,
                    t0: p.t0,
                    t1: p.t1,
                    kind: p.kind,
                    cells: p.cells.clone(),
                })
                .collect(),
            q,
            u,
            g_n: self.g_n.clone(),
            screen: self.problem.is_screen(),
            cfg: self.integrator.cfg,
        }
    }

    /// Assembles, solves with the symmetric indefinite factorization and
    /// returns the system with the recovered boundary traces.
    pub fn solve(&self) -> Result<(GalerkinSystem, BoundarySolution)> {
        let sys = self.assemble()?;
        let x = solve_symmetric(&sys.matrix, &sys.rhs)?;
        let sol = self.solution(&x);
        Ok((sys, sol))
    }

    /// Collocation of `V q = u*` at the collocation points of the space of an
    /// open-arc problem; returns the matrix, right-hand side and points.
    pub fn assemble_collocation(&self) -> Result<(DMatrix<f64>, DVector<f64>, Vec<f64>)> {
        if !self.problem.is_screen() || self.spaces.len() != 1 {
            return Err(Error::Unsupported("collocation is implemented for single open arcs".into()));
        }
        let space = &self.spaces[0];
        let pts = space.collocation_points()?;
        let geo = &self.problem.curves[0];
        let (a, b) = geo.domain();
        for &t in &pts {
            if t > a && t < b {
                let fl = geo.frame_side(t, Side::Left)?;
                let fr = geo.frame_side(t, Side::Right)?;
                if (fl.normal - fr.normal).norm() > 1e-10 {
                    return Err(Error::Geometry(format!("collocation point t = {t} lies on a corner")));
                }
            }
        }
        let refs = self.refs();
        let map: PanelMap = self
            .panels
            .iter()
            .map(|p| space.panels[p.space_panel].dofs.iter().map(|&(r, g)| (r, g, 1.0)).collect())
            .collect();
        let n = space.dof_count;
        let rows: Vec<Result<(Vec<f64>, f64)>> = pts
            .par_iter()
            .map(|&t| {
                let x: Point = space.curve.point(t);
                let mut row = vec![0.0; n];
                for (p, pr) in refs.iter().enumerate() {
                    let m = pr.shapes.len();
                    let mut out = vec![0.0; m];
                    let on = (t >= pr.t0 && t <= pr.t1).then_some(t);
                    self.integrator.point_integrals(false, x, pr, on, &mut out);
                    for &(r, g, c) in &map[p] {
                        row[g] += c * out[r];
                    }
                }
                Ok((row, self.dirichlet_value(0, t)?))
            })
            .collect();
        let mut mat = DMatrix::zeros(n, n);
        let mut rhs = DVector::zeros(n);
        for (i, r) in rows.into_iter().enumerate() {
            let (row, v) = r?;
            for (j, x) in row.into_iter().enumerate() {
                mat[(i, j)] = x;
            }
            rhs[i] = v;
        }
        Ok((mat, rhs, pts))
    }

    /// Solves the collocation system by LU; returns its singular-value
    /// condition number with the recovered density.
    pub fn solve_collocation(&self) -> Result<(f64, BoundarySolution)> {
        let (a, b, _) = self.assemble_collocation()?;
        let cond = singular_condition(&a);
        let x = a
            .clone()
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::Linear("singular collocation matrix".into()))?;
        Ok((cond, self.solution(&x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::data::HarmonicFunction;
    use crate::linalg::asymmetry;
    use crate::postprocess::Part;
    use crate::problem::{BoundaryCondition, ExactSolution};
    use crate::spaces::{build_bspline_space, refined_geometry_knots, uniform_knots};
    use std::f64::consts::PI;

    fn circle_space(degree: usize, n: usize) -> DiscreteSpace {
        let c = BoundaryCurve::circle(Point::zeros(), 1.0).unwrap();
        let kv = uniform_knots(&c, degree, n, Continuity::C(degree - 1), &[]).unwrap();
        build_bspline_space(&c, kv, true).unwrap()
    }

    fn cos_coeffs(s: &DiscreteSpace, n: usize) -> DVector<f64> {
        DVector::from_vec(s.interpolate(&|t, _| Ok((n as f64 * t).cos())).unwrap())
    }

    #[test]
    fn circle_fourier_modes() {
        let s = circle_space(7, 48);
        let cfg = QuadConfig::default();
        let v = assemble_block(KernelKind::SingleLayer, &s, &s, cfg);
        let w = assemble_block(KernelKind::Hypersingular, &s, &s, cfg);
        let m = assemble_mass(&s, 20);
        for n in 1..=4 {
            let c = cos_coeffs(&s, n);
            let vq = (c.transpose() * &v * &c)[0];
            let wq = (c.transpose() * &w * &c)[0];
            let mq = (c.transpose() * &m * &c)[0];
            assert!((vq - PI / (2.0 * n as f64)).abs() < 1e-6, "V mode {n}: {vq}");
            assert!((wq - n as f64 * PI / 2.0).abs() < 1e-6, "W mode {n}: {wq}");
            assert!((vq / mq - 0.5 / n as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn constants_on_the_unit_circle() {
        let s = circle_space(3, 12);
        let cfg = QuadConfig::default();
        let ones = DVector::from_element(s.dof_count, 1.0);
        let v = assemble_block(KernelKind::SingleLayer, &s, &s, cfg);
        assert!((&v * &ones).amax() < 1e-8);
        assert!(asymmetry(&v) <= 1e-12);
        let w = assemble_block(KernelKind::Hypersingular, &s, &s, cfg);
        assert!((&w * &ones).amax() < 1e-8);
        assert!(asymmetry(&w) <= 1e-12);
    }

    #[test]
    fn hypersingular_row_sums_on_a_free_form_curve() {
        let c = builtin::example2_curve();
        let s = build_bspline_space(&c, refined_geometry_knots(&c, 3, &[], 1).unwrap(), true).unwrap();
        let w = assemble_block(KernelKind::Hypersingular, &s, &s, QuadConfig::default());
        let ones = DVector::from_element(s.dof_count, 1.0);
        assert!((&w * &ones).amax() < 1e-8 * w.amax());
    }

    #[test]
    fn adjoint_block_is_the_transpose() {
        let (outer, inner) = builtin::example3_curves(false);
        let so = build_bspline_space(&outer, outer.as_spline().unwrap().knots.clone(), true).unwrap();
        let si = build_bspline_space(&inner, inner.as_spline().unwrap().knots.clone(), true).unwrap();
        let cfg = QuadConfig::default();
        for (a, b) in [(&so, &si), (&si, &so), (&so, &so)] {
            let k = assemble_block(KernelKind::DoubleLayer, a, b, cfg);
            let kp = assemble_block(KernelKind::AdjointDoubleLayer, b, a, cfg);
            assert!((&kp - k.transpose()).norm() <= 1e-10 * k.norm().max(1.0));
        }
    }

    fn scaled(c: &BoundaryCurve, f: f64) -> BoundaryCurve {
        let s = c.as_spline().unwrap();
        let pts = s.coeffs.iter().map(|p| p * f).collect();
        BoundaryCurve::spline(s.knots.clone(), pts, true, c.outward_sign()).unwrap()
    }

    #[test]
    fn single_layer_is_positive_definite_in_the_unit_disk() {
        for b in [false, true] {
            let (outer, inner) = builtin::example3_curves(b);
            let curves = vec![scaled(&outer, 0.3), scaled(&inner, 0.3)];
            let spaces = curves
                .iter()
                .map(|c| build_bspline_space(c, c.as_spline().unwrap().knots.clone(), true).unwrap())
                .collect();
            let p = BvpProblem::dirichlet(curves, HarmonicFunction::Const(1.0));
            let sys = Discretization::new(p, spaces, QuadConfig::default())
                .unwrap()
                .assemble()
                .unwrap();
            let ev = sys.matrix.clone().symmetric_eigenvalues();
            assert!(ev.min() > 0.0, "{}", ev.min());
        }
    }

    fn example1(levels: usize) -> Discretization {
        let p = BvpProblem::example1();
        let kv = refined_geometry_knots(&p.curves[0], 2, &[], levels).unwrap();
        let s = build_bspline_space(&p.curves[0], kv, false).unwrap();
        Discretization::new(p, vec![s], QuadConfig::default()).unwrap()
    }

    #[test]
    fn example1_flux_sign() {
        let d = example1(2);
        let (sys, sol) = d.solve().unwrap();
        assert_eq!(sys.order(), 40);
        assert!(asymmetry(&sys.matrix) <= 1e-12);
        let c = &d.problem.curves[0];
        let exact = |_: usize, t: f64| {
            let f = c.frame(t).unwrap();
            HarmonicFunction::NegSum.flux(f.point, f.normal)
        };
        let mut dot = 0.0;
        for i in 0..90 {
            let t = 0.05 + 0.1 * i as f64;
            dot += exact(0, t) * sol.flux(0, t).unwrap();
        }
        assert!(dot > 0.0);
        assert!(sol.relative_l2_error(Part::Flux, &exact).unwrap() < 0.3);
    }

    #[test]
    fn parallel_assembly_is_deterministic() {
        let d = example1(1);
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| d.assemble().unwrap());
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| d.assemble().unwrap());
        assert_eq!(serial.matrix, parallel.matrix);
        assert_eq!(serial.rhs, parallel.rhs);
    }

    #[test]
    fn circle_dirichlet_flux_converges() {
        let mut errs = Vec::new();
        let c = BoundaryCurve::circle(Point::zeros(), 0.5).unwrap();
        for n in [8, 16, 32] {
            let kv = uniform_knots(&c, 2, n, Continuity::C(1), &[]).unwrap();
            let s = build_bspline_space(&c, kv, true).unwrap();
            let p = BvpProblem::dirichlet(vec![c.clone()], HarmonicFunction::Poly(vec![0.0, 1.0]));
            let (_, sol) = Discretization::new(p, vec![s], QuadConfig::default())
                .unwrap()
                .solve()
                .unwrap();
            errs.push(sol.relative_l2_error(Part::Flux, &|_, t| t.cos()).unwrap());
        }
        for w in errs.windows(2) {
            assert!((w[0] / w[1]).log2() > 2.5, "{errs:?}");
        }
    }

    #[test]
    fn example3_mixed_problem() {
        for b in [false, true] {
            let p = BvpProblem::example3(b);
            let spaces = p
                .curves
                .iter()
                .map(|c| build_bspline_space(c, c.as_spline().unwrap().knots.clone(), true).unwrap())
                .collect();
            let d = Discretization::new(p, spaces, QuadConfig::default()).unwrap();
            assert_eq!((d.q_dofs.len(), d.u_dofs.len()), (8, 8));
            let (sys, sol) = d.solve().unwrap();
            assert_eq!(sys.order(), 16);
            assert!(asymmetry(&sys.matrix) <= 1e-12);
            let eq = sol.max_error(Part::Flux, &|_, _| 0.0, 32);
            let eu = sol.max_error(Part::Trace, &|_, _| 1.0, 32);
            assert!(eq <= 1e-4 && eu <= 1e-4, "domain {b}: {eq} {eu}");
        }
    }

    #[test]
    fn neumann_parts_need_continuous_spaces() {
        let p = BvpProblem::example3(false);
        let spaces = p
            .curves
            .iter()
            .map(|c| build_bspline_space(c, c.as_spline().unwrap().knots.clone(), false).unwrap())
            .collect();
        assert!(matches!(
            Discretization::new(p, spaces, QuadConfig::default()),
            Err(Error::Space(_))
        ));
    }

    #[test]
    fn mixed_problem_on_a_circle_with_interfaces() {
        let c = BoundaryCurve::circle(Point::zeros(), 1.0).unwrap();
        let h = HarmonicFunction::Poly(vec![0.5, 1.0, -0.5, 0.25, 0.0]);
        let bc = |range, kind| BoundaryCondition {
            curve: 0,
            range,
            kind,
            data: BoundaryData::Harmonic(h.clone()),
        };
        let p = BvpProblem::new(
            vec![c.clone()],
            vec![
                bc(None, BcKind::Dirichlet),
                bc(Some((PI / 2.0, 3.0 * PI / 2.0)), BcKind::Neumann),
            ],
            Some(ExactSolution::Harmonic(h.clone())),
        )
        .unwrap();
        let s = circle_space(3, 32);
        let d = Discretization::new(p, vec![s], QuadConfig::default()).unwrap();
        let (sys, sol) = d.solve().unwrap();
        assert!(asymmetry(&sys.matrix) <= 1e-12);
        let trace = |_: usize, t: f64| h.value(c.point(t));
        let flux = |_: usize, t: f64| {
            let f = c.frame(t).unwrap();
            h.flux(f.point, f.normal)
        };
        assert!(sol.max_error(Part::Trace, &trace, 32) < 1e-3);
        assert!(sol.relative_l2_error(Part::Flux, &flux).unwrap() < 2e-2);
        let x = Point::new(0.2, -0.1);
        assert!((sol.interior_value(x).unwrap() - h.value(x)).abs() < 1e-4);
    }

    #[test]
    fn example4_system_order() {
        let p = BvpProblem::example4();
        let kv = uniform_knots(&p.curves[0], 2, 20, Continuity::C(1), &[]).unwrap();
        let s = build_bspline_space(&p.curves[0], kv, false).unwrap();
        let d = Discretization::new(p, vec![s], QuadConfig::default()).unwrap();
        let sys = d.assemble().unwrap();
        assert_eq!(sys.order(), 22);
        assert!(asymmetry(&sys.matrix) <= 1e-12);
    }

    #[test]
    fn collocation_consistency() {
        let p = BvpProblem::example4();
        let kv = uniform_knots(&p.curves[0], 2, 10, Continuity::C(1), &[]).unwrap();
        let s = build_bspline_space(&p.curves[0], kv, false).unwrap();
        let d = Discretization::new(p, vec![s], QuadConfig::default()).unwrap();
        let (a, _, pts) = d.assemble_collocation().unwrap();
        assert_eq!(pts.len(), 12);
        let c = DVector::from_fn(12, |i, _| 1.0 + (i as f64).sin());
        let x = a.clone().lu().solve(&(&a * &c)).unwrap();
        assert!((x - c).amax() < 1e-10);
    }
}

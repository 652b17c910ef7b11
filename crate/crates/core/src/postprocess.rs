//! Boundary traces, interior evaluation, error norms and convergence orders.

use std::borrow::Cow;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::problem::BcKind;
use crate::quadrature::{gauss_legendre, quadrature_cells, Integrator, PanelRef, QuadConfig};
use crate::spaces::DiscreteSpace;

/// A panel of a solved boundary.
#[derive(Clone, Debug)]
pub struct SolutionPanel {
    pub curve: usize,
    pub space_panel: usize,
    pub t0: f64,
    pub t1: f64,
    pub kind: BcKind,
    pub cells: Vec<(f64, f64)>,
}

/// Which boundary function an error refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    /// Recovered flux (or density jump) on the Dirichlet part.
    Flux,
    /// Recovered trace on the Neumann part.
    Trace,
}

impl Part {
    fn kind(self) -> BcKind {
        match self {
            Part::Flux => BcKind::Dirichlet,
            Part::Trace => BcKind::Neumann,
        }
    }
}

/// Discrete flux and trace on every curve.
#[derive(Clone, Debug)]
pub struct BoundarySolution {
    pub spaces: Vec<DiscreteSpace>,
    pub panels: Vec<SolutionPanel>,
    /// Flux coefficients per curve, meaningful on Dirichlet panels.
    pub q: Vec<Vec<f64>>,
    /// Trace coefficients per curve: interpolated data plus recovered unknowns.
    pub u: Vec<Vec<f64>>,
    /// Interpolated Neumann data per curve.
    pub g_n: Vec<Vec<f64>>,
    /// Open-arc problem: `q` is the density jump and there is no trace term.
    pub screen: bool,
    pub cfg: QuadConfig,
}

impl BoundarySolution {
    fn panel_at(&self, curve: usize, t: f64) -> Option<&SolutionPanel> {
        self.panels
            .iter()
            .find(|p| p.curve == curve && t > p.t0 && t < p.t1)
            .or_else(|| self.panels.iter().find(|p| p.curve == curve && t >= p.t0 && t <= p.t1))
    }

    fn coeffs(&self, p: &SolutionPanel, part: Part) -> &[f64] {
        match (part, p.kind) {
            (Part::Flux, BcKind::Dirichlet) => &self.q[p.curve],
            (Part::Flux, BcKind::Neumann) => &self.g_n[p.curve],
            (Part::Trace, _) => &self.u[p.curve],
        }
    }

    /// Value of the flux or the trace at parameter `t` of `curve`.
    pub fn eval(&self, part: Part, curve: usize, t: f64) -> Result<f64> {
        let p = self.panel_at(curve, t).ok_or_else(|| {
            let (a, b) = self.spaces[curve].curve.domain();
            Error::Domain { t, a, b }
        })?;
        Ok(self.spaces[curve].eval_on(self.coeffs(p, part), p.space_panel, t).0)
    }

    pub fn flux(&self, curve: usize, t: f64) -> Result<f64> {
        self.eval(Part::Flux, curve, t)
    }

    pub fn trace(&self, curve: usize, t: f64) -> Result<f64> {
        self.eval(Part::Trace, curve, t)
    }

    /// Interior value from the representation formula
    /// `u(x) = ∫ U(x, y) q(y) dγ_y − ∫ ∂U/∂n_y(x, y) u(y) dγ_y`.
    pub fn interior_value(&self, x: Point) -> Result<f64> {
        let integ = Integrator::new(self.cfg);
        let mut guard = f64::INFINITY;
        let mut total = 0.0;
        for p in &self.panels {
            let space = &self.spaces[p.curve];
            let basis = &space.panels[p.space_panel].basis;
            let pr = PanelRef::with_cells(&space.curve, p.t0, p.t1, basis, Cow::Borrowed(&p.cells));
            for &(a, b) in &p.cells {
                for s in [a, 0.5 * (a + b), b] {
                    guard = guard.min((space.curve.point(s) - x).norm());
                }
            }
            let m = basis.len();
            let dofs = &space.panels[p.space_panel].dofs;
            let mut out = vec![0.0; m];
            integ.point_integrals(false, x, &pr, None, &mut out);
            let q = self.coeffs(p, Part::Flux);
            total += dofs.iter().map(|&(r, g)| q[g] * out[r]).sum::<f64>();
            if !self.screen {
                integ.point_integrals(true, x, &pr, None, &mut out);
                let u = &self.u[p.curve];
                total -= dofs.iter().map(|&(r, g)| u[g] * out[r]).sum::<f64>();
            }
        }
        let scale = self.spaces.iter().map(|s| s.curve.scale()).fold(0.0, f64::max);
        if guard <= 1e-9 * scale.max(1.0) {
            return Err(Error::NearBoundary([x.x, x.y]));
        }
        Ok(total)
    }

    /// `‖f − f_h‖_{L²} / ‖f‖_{L²}` over the panels of `part`, with the
    /// arclength measure of the exact curve and interior Gauss nodes only.
    pub fn relative_l2_error(&self, part: Part, exact: &dyn Fn(usize, f64) -> f64) -> Result<f64> {
        let degree = self.spaces.iter().map(|s| s.degree).max().unwrap_or(0);
        let order = (2 * degree + 8).max(20);
        let rule = gauss_legendre(order);
        let mut num = 0.0;
        let mut den = 0.0;
        for p in self.panels.iter().filter(|p| p.kind == part.kind()) {
            let space = &self.spaces[p.curve];
            let exact_curve = &space.exact;
            let hint = exact_curve.locate(0.5 * (p.t0 + p.t1));
            let coeffs = self.coeffs(p, part);
            for (a, b) in quadrature_cells(exact_curve, hint, p.t0, p.t1, order) {
                for (s, w) in rule.iter() {
                    let t = a + s * (b - a);
                    let jac = exact_curve.eval_at(hint, t).1.norm();
                    let f = exact(p.curve, t);
                    let fh = space.eval_on(coeffs, p.space_panel, t).0;
                    num += w * (b - a) * jac * (f - fh) * (f - fh);
                    den += w * (b - a) * jac * f * f;
                }
            }
        }
        if den == 0.0 {
            return Err(Error::ErrorSequence("the exact solution has zero norm".into()));
        }
        Ok((num / den).sqrt())
    }

    /// `max |f − f_h|` over `samples` interior points per panel of `part`.
    pub fn max_error(&self, part: Part, exact: &dyn Fn(usize, f64) -> f64, samples: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for p in self.panels.iter().filter(|p| p.kind == part.kind()) {
            let space = &self.spaces[p.curve];
            let coeffs = self.coeffs(p, part);
            for i in 0..samples {
                let t = p.t0 + (p.t1 - p.t0) * (i as f64 + 0.5) / samples as f64;
                let fh = space.eval_on(coeffs, p.space_panel, t).0;
                worst = worst.max((exact(p.curve, t) - fh).abs());
            }
        }
        worst
    }
}

/// Samples per panel for maximum-norm errors.
pub const MAX_ERROR_SAMPLES: usize = 32;

/// `log₂(e_{i−1}/e_i)` for a sequence whose mesh steps halve.
pub fn convergence_orders(errors: &[f64], h: &[f64]) -> Result<Vec<f64>> {
    if errors.len() < 2 || errors.len() != h.len() {
        return Err(Error::ErrorSequence(format!(
            "need at least two errors with matching steps, got {} errors and {} steps",
            errors.len(),
            h.len()
        )));
    }
    for w in h.windows(2) {
        if ((w[0] / w[1]) - 2.0).abs() > 1e-9 {
            return Err(Error::ErrorSequence(format!("steps {} and {} do not halve", w[0], w[1])));
        }
    }
    Ok(errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}

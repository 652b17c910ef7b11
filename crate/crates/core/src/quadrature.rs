//! Gaussian rules and the double-integration engine over element pairs.
//!
//! Rules live on `(0, 1)`. Pairs of boundary panels are integrated by tensor
//! Gauss–Legendre when they are apart, and by singularity-adapted transforms
//! when they coincide or share an endpoint: the logarithm is split as
//! `ln r = ln(r/ρ) + ln ρ`, the smooth part is integrated by Gauss–Legendre
//! and `ln ρ` by the rule with weight `ln(1/ρ)`.

use nalgebra::DMatrix;
use std::borrow::Cow;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, BoundaryMesh, Point};
use crate::kernels::{adl, dl, KernelKind, INV_2PI};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKind {
    /// Weight 1.
    Unit,
    /// Weight `ln(1/x)`.
    Log,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: WeightKind,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `Σ w_i f(x_i)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Gauss–Legendre rule with `n` nodes on `(0, 1)`.
pub fn gauss_legendre(n: usize) -> QuadratureRule {
    let n = n.max(1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root on (-1, 1)
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        nodes[i] = 0.5 * (1.0 - x);
        weights[n - 1 - i] = 0.5 * w;
        weights[i] = 0.5 * w;
    }
    QuadratureRule {
        nodes,
        weights,
        kind: WeightKind::Unit,
    }
}

/// Legendre polynomial `P_n` and its derivative on `[-1, 1]`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss rule with `n` nodes for the weight `ln(1/x)` on `(0, 1)`.
///
/// Recurrence coefficients come from the modified Chebyshev algorithm with
/// monic shifted Legendre polynomials as the auxiliary basis, whose modified
/// moments are known in closed form; nodes and weights are then obtained from
/// the Jacobi matrix and polished by Newton steps on the orthogonal polynomial.
pub fn gauss_log(n: usize) -> QuadratureRule {
    let n = n.max(1);
    let (alpha, beta) = log_recurrence(n);
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 || j == i + 1 {
            beta[i.max(j)].sqrt()
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..8 {
            let (p, dp, _) = orthogonal_eval(&alpha, &beta, *x);
            let dx = p / dp;
            *x -= dx;
            if dx.abs() <= 1e-17 {
                break;
            }
        }
        let (_, _, christoffel) = orthogonal_eval(&alpha, &beta, *x);
        weights.push(1.0 / christoffel);
    }
    QuadratureRule {
        nodes,
        weights,
        kind: WeightKind::Log,
    }
}

/// Monic orthogonal polynomial `p_n(x)`, its derivative, and
/// `Σ_{k<n} p_k(x)² / ‖p_k‖²` for the recurrence `(α, β)`.
fn orthogonal_eval(alpha: &[f64], beta: &[f64], x: f64) -> (f64, f64, f64) {
    let n = alpha.len();
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    let mut norm = beta[0];
    let mut sum = 1.0 / norm;
    for k in 0..n {
        let bk = if k == 0 { 0.0 } else { beta[k] };
        let p_next = (x - alpha[k]) * p - bk * p_prev;
        let d_next = p + (x - alpha[k]) * d - bk * d_prev;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
        if k + 1 < n {
            norm *= beta[k + 1];
            sum += p * p / norm;
        }
    }
    (p, d, sum)
}

/// Recurrence coefficients `α_k, β_k` (`k < n`) of the monic orthogonal
/// polynomials for `ln(1/x)` on `(0, 1)`; `β_0` is the total mass 1.
fn log_recurrence(n: usize) -> (Vec<f64>, Vec<f64>) {
    let m = 2 * n;
    let a = vec![0.5; m];
    let b: Vec<f64> = (0..m)
        .map(|l| {
            let l = l as f64;
            if l == 0.0 {
                0.0
            } else {
                l * l / (4.0 * (4.0 * l * l - 1.0))
            }
        })
        .collect();
    let mut moments = vec![0.0; m];
    moments[0] = 1.0;
    let mut ratio = 1.0; // (l!)^2 / (2l)!
    for (l, mom) in moments.iter_mut().enumerate().skip(1) {
        let lf = l as f64;
        ratio *= lf * lf / ((2.0 * lf - 1.0) * 2.0 * lf);
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        *mom = ratio * sign / (lf * (lf + 1.0));
    }
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    let mut sig_prev = vec![0.0; m + 1];
    let mut sig = moments.clone();
    sig.push(0.0);
    alpha[0] = a[0] + moments[1] / moments[0];
    beta[0] = moments[0];
    for k in 1..n {
        let mut next = vec![0.0; m + 1];
        for l in k..(m - k) {
            next[l] = sig[l + 1] - (alpha[k - 1] - a[l]) * sig[l] - beta[k - 1] * sig_prev[l] + b[l] * sig[l - 1];
        }
        alpha[k] = a[k] + next[k + 1] / next[k] - sig[k] / sig[k - 1];
        beta[k] = next[k] / sig[k - 1];
        sig_prev = sig;
        sig = next;
    }
    (alpha, beta)
}

/// Which endpoint of a parameter interval takes part in a contact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    Start,
    End,
}

/// Relative position of two elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairClass {
    Coincident,
    /// The elements touch at one endpoint: `x` at `x_end`, `y` at `y_end`.
    Adjacent {
        x_end: End,
        y_end: End,
    },
    Disjoint,
}

fn touching(x: (f64, f64), y: (f64, f64), domain: (f64, f64), closed: bool) -> Option<(End, End)> {
    let tol = 1e-12 * (domain.1 - domain.0).abs().max(1.0);
    let eq = |p: f64, q: f64| (p - q).abs() <= tol;
    if eq(x.1, y.0) {
        Some((End::End, End::Start))
    } else if eq(x.0, y.1) {
        Some((End::Start, End::End))
    } else if closed && eq(x.0, domain.0) && eq(y.1, domain.1) {
        Some((End::Start, End::End))
    } else if closed && eq(x.1, domain.1) && eq(y.0, domain.0) {
        Some((End::End, End::Start))
    } else {
        None
    }
}

/// Classification of mesh elements `i` and `j`.
pub fn classify_pair(mesh: &BoundaryMesh, i: usize, j: usize) -> PairClass {
    if i == j {
        return PairClass::Coincident;
    }
    let first = mesh.elements[0].0;
    let last = mesh.elements[mesh.len() - 1].1;
    match touching(mesh.elements[i], mesh.elements[j], (first, last), mesh.closed) {
        Some((x_end, y_end)) => PairClass::Adjacent { x_end, y_end },
        None => PairClass::Disjoint,
    }
}

/// Shape functions living on one panel.
pub trait Shapes: Sync {
    fn len(&self) -> usize;
    /// Values and first parametric derivatives at `t`.
    fn eval(&self, t: f64, val: &mut [f64], der: &mut [f64]);
}

/// Adapter turning closures `t ↦ (value, derivative)` into [`Shapes`].
pub struct FnShapes<F>(pub Vec<F>);

impl<F: Fn(f64) -> (f64, f64) + Sync> Shapes for FnShapes<F> {
    fn len(&self) -> usize {
        self.0.len()
    }
    fn eval(&self, t: f64, val: &mut [f64], der: &mut [f64]) {
        for (i, f) in self.0.iter().enumerate() {
            let (v, d) = f(t);
            val[i] = v;
            der[i] = d;
        }
    }
}

/// A parameter interval of a curve on which the geometry is polynomial,
/// together with the shapes integrated over it and its quadrature cells.
#[derive(Clone)]
pub struct PanelRef<'a> {
    pub curve: &'a BoundaryCurve,
    /// Geometry piece locator from [`BoundaryCurve::locate`].
    pub hint: usize,
    pub t0: f64,
    pub t1: f64,
    pub shapes: &'a dyn Shapes,
    /// Consecutive subintervals of `[t0, t1]` integrated separately.
    pub cells: Cow<'a, [(f64, f64)]>,
}

impl<'a> PanelRef<'a> {
    /// Panel with cells adapted to the parametric speed, see [`quadrature_cells`].
    pub fn new(curve: &'a BoundaryCurve, t0: f64, t1: f64, shapes: &'a dyn Shapes) -> Self {
        let hint = curve.locate(0.5 * (t0 + t1));
        let cells = quadrature_cells(curve, hint, t0, t1, DEFAULT_ORDER);
        Self::with_cells(curve, t0, t1, shapes, Cow::Owned(cells))
    }

    pub fn with_cells(curve: &'a BoundaryCurve, t0: f64, t1: f64, shapes: &'a dyn Shapes, cells: Cow<'a, [(f64, f64)]>) -> Self {
        Self {
            curve,
            hint: curve.locate(0.5 * (t0 + t1)),
            t0,
            t1,
            shapes,
            cells,
        }
    }

    fn piece(&self, cell: (f64, f64)) -> Piece<'a> {
        Piece {
            curve: self.curve,
            hint: self.hint,
            t0: cell.0,
            t1: cell.1,
            shapes: self.shapes,
        }
    }
}

const DEFAULT_ORDER: usize = 16;

/// Splits `[t0, t1]` into halves until the `order`-point Gauss–Legendre
/// arclength of every cell agrees with that of its two halves to 1e-13.
/// Parametric speeds with complex zeros close to the real axis make the
/// integrands of every kernel nearly singular; the cells resolve them.
pub fn quadrature_cells(curve: &BoundaryCurve, hint: usize, t0: f64, t1: f64, order: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(order);
    let length = |a: f64, b: f64| rule.integrate(|u| curve.eval_at(hint, a + u * (b - a)).1.norm()) * (b - a);
    let mut out = Vec::new();
    let mut stack = vec![(t0, t1, length(t0, t1), 0usize)];
    while let Some((a, b, l, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let (l0, l1) = (length(a, m), length(m, b));
        if depth >= 8 || (l0 + l1 - l).abs() <= 1e-13 * l.abs() {
            out.push((a, b));
        } else {
            stack.push((m, b, l1, depth + 1));
            stack.push((a, m, l0, depth + 1));
        }
    }
    out
}

/// A single quadrature cell of a panel.
#[derive(Clone, Copy)]
struct Piece<'a> {
    curve: &'a BoundaryCurve,
    hint: usize,
    t0: f64,
    t1: f64,
    shapes: &'a dyn Shapes,
}

impl<'a> Piece<'a> {
    fn sub(&self, t0: f64, t1: f64) -> Self {
        Self { t0, t1, ..*self }
    }

    fn len(&self) -> f64 {
        self.t1 - self.t0
    }

    fn at(&self, end: End, local: f64) -> f64 {
        match end {
            End::Start => self.t0 + local * self.len(),
            End::End => self.t1 - local * self.len(),
        }
    }
}

fn classify_pieces(x: &Piece, y: &Piece) -> PairClass {
    if !std::ptr::eq(x.curve, y.curve) {
        return PairClass::Disjoint;
    }
    if x.t0 == y.t0 && x.t1 == y.t1 {
        return PairClass::Coincident;
    }
    match touching((x.t0, x.t1), (y.t0, y.t1), x.curve.domain(), x.curve.is_closed()) {
        Some((x_end, y_end)) => PairClass::Adjacent { x_end, y_end },
        None => PairClass::Disjoint,
    }
}

/// Classification of two panels.
pub fn classify_panels(x: &PanelRef, y: &PanelRef) -> PairClass {
    classify_pieces(&x.piece((x.t0, x.t1)), &y.piece((y.t0, y.t1)))
}

/// Node counts per pair class and near-field subdivision controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig {
    pub disjoint: usize,
    pub coincident: usize,
    pub adjacent: usize,
    /// Disjoint pairs closer than `near_ratio` times the larger diameter are subdivided.
    pub near_ratio: f64,
    pub max_depth: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self::uniform(16)
    }
}

impl QuadConfig {
    pub fn uniform(order: usize) -> Self {
        Self {
            disjoint: order,
            coincident: order,
            adjacent: order,
            near_ratio: 1.0,
            max_depth: 10,
        }
    }
}

/// Evaluated geometry and weighted shape factors at one parameter.
struct Sample {
    p: Point,
    n: Point,
}

/// Double and single integration over panels with precomputed rules.
pub struct Integrator {
    pub cfg: QuadConfig,
    gl_disjoint: QuadratureRule,
    gl_coincident: QuadratureRule,
    log_coincident: QuadratureRule,
    gl_adjacent: QuadratureRule,
    log_adjacent: QuadratureRule,
}

impl Integrator {
    pub fn new(cfg: QuadConfig) -> Self {
        Self {
            cfg,
            gl_disjoint: gauss_legendre(cfg.disjoint),
            gl_coincident: gauss_legendre(cfg.coincident),
            log_coincident: gauss_log(cfg.coincident),
            gl_adjacent: gauss_legendre(cfg.adjacent),
            log_adjacent: gauss_log(cfg.adjacent),
        }
    }

    /// Geometry at `t` and the kernel-specific shape factors: `φ·J` for
    /// `V, K, K′`, and `σ φ′` for the integrated-by-parts hypersingular form.
    fn sample(&self, kind: KernelKind, panel: &Piece, t: f64, val: &mut [f64], der: &mut [f64], out: &mut [f64]) -> Sample {
        let (p, d) = panel.curve.eval_at(panel.hint, t);
        let jac = d.norm();
        panel.shapes.eval(t, val, der);
        let m = panel.shapes.len();
        if kind == KernelKind::Hypersingular {
            let s = panel.curve.outward_sign();
            for i in 0..m {
                out[i] = s * der[i];
            }
        } else {
            for i in 0..m {
                out[i] = val[i] * jac;
            }
        }
        Sample {
            p,
            n: panel.curve.normal_from(d),
        }
    }

    /// Local matrix `M[r][s] = ∫∫ φ_r(x) k(x, y) ψ_s(y) dγ_y dγ_x` of a panel pair.
    /// For [`KernelKind::Hypersingular`] this is `⟨V ∂ₛφ_r, ∂ₛψ_s⟩`.
    pub fn pair_block(&self, kind: KernelKind, x: &PanelRef, y: &PanelRef) -> DMatrix<f64> {
        let mut acc = DMatrix::zeros(x.shapes.len(), y.shapes.len());
        for &cx in x.cells.iter() {
            for &cy in y.cells.iter() {
                let (px, py) = (x.piece(cx), y.piece(cy));
                match classify_pieces(&px, &py) {
                    PairClass::Coincident => acc += self.coincident(kind, &px, &py),
                    PairClass::Adjacent { x_end, y_end } => acc += self.adjacent(kind, &px, &py, x_end, y_end),
                    PairClass::Disjoint => self.disjoint(kind, &px, &py, 0, &mut acc),
                }
            }
        }
        let same = std::ptr::eq(x.curve, y.curve) && x.t0 == y.t0 && x.t1 == y.t1;
        if same && kind.is_symmetric() && acc.is_square() {
            let t = acc.transpose();
            acc = (acc + t) * 0.5;
        }
        acc
    }

    fn samples(&self, kind: KernelKind, panel: &Piece, rule: &QuadratureRule) -> (Vec<Sample>, DMatrix<f64>) {
        let m = panel.shapes.len();
        let mut val = vec![0.0; m];
        let mut der = vec![0.0; m];
        let mut out = vec![0.0; m];
        let mut fac = DMatrix::zeros(rule.len(), m);
        let h = panel.len();
        let pts = rule
            .iter()
            .enumerate()
            .map(|(i, (u, w))| {
                let s = self.sample(kind, panel, panel.t0 + u * h, &mut val, &mut der, &mut out);
                for r in 0..m {
                    fac[(i, r)] = out[r] * w * h;
                }
                s
            })
            .collect();
        (pts, fac)
    }

    fn disjoint(&self, kind: KernelKind, x: &Piece, y: &Piece, depth: usize, acc: &mut DMatrix<f64>) {
        let rule = &self.gl_disjoint;
        let (sx, fx) = self.samples(kind, x, rule);
        let (sy, fy) = self.samples(kind, y, rule);
        if depth < self.cfg.max_depth {
            let (bx, by) = (bbox(x, &sx), bbox(y, &sy));
            let (dx, dy) = (diam(&bx), diam(&by));
            if box_distance(&bx, &by) < self.cfg.near_ratio * dx.max(dy) {
                if dx >= dy {
                    let mid = 0.5 * (x.t0 + x.t1);
                    self.disjoint(kind, &x.sub(x.t0, mid), y, depth + 1, acc);
                    self.disjoint(kind, &x.sub(mid, x.t1), y, depth + 1, acc);
                } else {
                    let mid = 0.5 * (y.t0 + y.t1);
                    self.disjoint(kind, x, &y.sub(y.t0, mid), depth + 1, acc);
                    self.disjoint(kind, x, &y.sub(mid, y.t1), depth + 1, acc);
                }
                return;
            }
        }
        let kmat = DMatrix::from_fn(sx.len(), sy.len(), |i, j| kernel(kind, &sx[i], &sy[j]));
        *acc += fx.transpose() * kmat * fy;
    }

    fn coincident(&self, kind: KernelKind, x: &Piece, y: &Piece) -> DMatrix<f64> {
        let (mx, my) = (x.shapes.len(), y.shapes.len());
        let mut acc = DMatrix::zeros(mx, my);
        let h = x.len();
        let mut bufs = Buffers::new(mx.max(my));
        let gl = &self.gl_coincident;
        let gl_v = &self.gl_coincident;
        // (u, weight, is_log_part)
        let mut u_nodes: Vec<(f64, f64, bool)> = gl.iter().map(|(u, w)| (u, w, false)).collect();
        if kind.is_logarithmic() {
            u_nodes.extend(self.log_coincident.iter().map(|(u, w)| (u, w, true)));
        }
        for &(u, wu, log_part) in &u_nodes {
            for (v, wv) in gl_v.iter() {
                let lo = (1.0 - u) * v;
                for swap in [false, true] {
                    let (xi, eta) = if swap { (lo, lo + u) } else { (lo + u, lo) };
                    let w = wu * wv * (1.0 - u) * h * h;
                    let sx = self.sample(kind, x, x.t0 + xi * h, &mut bufs.v, &mut bufs.d, &mut bufs.a);
                    let sy = self.sample(kind, y, y.t0 + eta * h, &mut bufs.v, &mut bufs.d, &mut bufs.b);
                    let k = if log_part {
                        INV_2PI
                    } else if kind.is_logarithmic() {
                        // -(1/2π) ln(r/u), smooth across the diagonal
                        -INV_2PI * ((sx.p - sy.p).norm().ln() - u.ln())
                    } else {
                        kernel(kind, &sx, &sy)
                    };
                    rank1(&mut acc, w * k, &bufs.a[..mx], &bufs.b[..my]);
                }
            }
        }
        if kind.is_symmetric() && mx == my {
            let t = acc.transpose();
            acc = (acc + t) * 0.5;
        }
        acc
    }

    fn adjacent(&self, kind: KernelKind, x: &Piece, y: &Piece, x_end: End, y_end: End) -> DMatrix<f64> {
        let (mx, my) = (x.shapes.len(), y.shapes.len());
        let mut acc = DMatrix::zeros(mx, my);
        let (hx, hy) = (x.len(), y.len());
        let mut bufs = Buffers::new(mx.max(my));
        let gl = &self.gl_adjacent;
        let mut rho_nodes: Vec<(f64, f64, bool)> = gl.iter().map(|(r, w)| (r, w, false)).collect();
        if kind.is_logarithmic() {
            rho_nodes.extend(self.log_adjacent.iter().map(|(r, w)| (r, w, true)));
        }
        for &(rho, wr, log_part) in &rho_nodes {
            for (w_, ww) in gl.iter() {
                for swap in [false, true] {
                    let (lx, ly) = if swap { (rho * w_, rho) } else { (rho, rho * w_) };
                    let w = wr * ww * rho * hx * hy;
                    let sx = self.sample(kind, x, x.at(x_end, lx), &mut bufs.v, &mut bufs.d, &mut bufs.a);
                    let sy = self.sample(kind, y, y.at(y_end, ly), &mut bufs.v, &mut bufs.d, &mut bufs.b);
                    let k = if log_part {
                        INV_2PI
                    } else if kind.is_logarithmic() {
                        -INV_2PI * ((sx.p - sy.p).norm().ln() - rho.ln())
                    } else {
                        kernel(kind, &sx, &sy)
                    };
                    rank1(&mut acc, w * k, &bufs.a[..mx], &bufs.b[..my]);
                }
            }
        }
        acc
    }

    /// `out[r] = ∫_panel k(x, y) φ_r(y) dγ_y` for a point `x`, where `k` is `U`
    /// (`double = false`) or `∂U/∂n_y`. `on_panel` gives the parameter of `x`
    /// when `x` lies on the closure of the panel.
    pub fn point_integrals(&self, double: bool, x: Point, panel: &PanelRef, on_panel: Option<f64>, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for &cell in panel.cells.iter() {
            let piece = panel.piece(cell);
            match on_panel {
                Some(ts) if ts >= cell.0 && ts <= cell.1 => {
                    for (lo, hi) in [(cell.0, ts), (ts, cell.1)] {
                        if hi - lo > 0.0 {
                            self.point_singular(double, x, &piece, lo, hi, ts, out);
                        }
                    }
                }
                _ => self.point_regular(double, x, &piece, 0, out),
            }
        }
    }

    fn point_singular(&self, double: bool, x: Point, panel: &Piece, lo: f64, hi: f64, ts: f64, out: &mut [f64]) {
        let m = panel.shapes.len();
        let mut val = vec![0.0; m];
        let mut der = vec![0.0; m];
        let len = hi - lo;
        let toward = |u: f64| if ts == lo { lo + u * len } else { hi - u * len };
        for (u, w) in self.gl_coincident.iter() {
            let t = toward(u);
            let (p, d) = panel.curve.eval_at(panel.hint, t);
            panel.shapes.eval(t, &mut val, &mut der);
            let jac = d.norm();
            let k = if double {
                dl(x, p, panel.curve.normal_from(d))
            } else {
                // -(1/2π) ln(r/u) on the regular part; r/u → len·|C'| as u → 0
                let r = (p - x).norm();
                let ratio = if r > 1e3 * f64::EPSILON * len * jac {
                    r / u
                } else {
                    len * jac
                };
                -INV_2PI * ratio.ln()
            };
            for r in 0..m {
                out[r] += w * len * k * val[r] * jac;
            }
        }
        if !double {
            for (u, w) in self.log_coincident.iter() {
                let t = toward(u);
                let (_, d) = panel.curve.eval_at(panel.hint, t);
                panel.shapes.eval(t, &mut val, &mut der);
                let jac = d.norm();
                for r in 0..m {
                    out[r] += w * len * INV_2PI * val[r] * jac;
                }
            }
        }
    }

    fn point_regular(&self, double: bool, x: Point, panel: &Piece, depth: usize, out: &mut [f64]) {
        let m = panel.shapes.len();
        let rule = &self.gl_disjoint;
        let len = panel.len();
        let mut val = vec![0.0; m];
        let mut der = vec![0.0; m];
        let mut pts = Vec::with_capacity(rule.len());
        for (u, _) in rule.iter() {
            pts.push(panel.curve.eval_at(panel.hint, panel.t0 + u * len));
        }
        if depth < self.cfg.max_depth {
            let samples: Vec<Sample> = pts
                .iter()
                .map(|(p, _)| Sample {
                    p: *p,
                    n: Point::zeros(),
                })
                .collect();
            let b = bbox(panel, &samples);
            let dist = box_distance(&b, &(x, x));
            if dist < self.cfg.near_ratio * diam(&b) {
                let mid = 0.5 * (panel.t0 + panel.t1);
                self.point_regular(double, x, &panel.sub(panel.t0, mid), depth + 1, out);
                self.point_regular(double, x, &panel.sub(mid, panel.t1), depth + 1, out);
                return;
            }
        }
        for ((u, w), (p, d)) in rule.iter().zip(pts) {
            let t = panel.t0 + u * len;
            panel.shapes.eval(t, &mut val, &mut der);
            let jac = d.norm();
            let k = if double {
                dl(x, p, panel.curve.normal_from(d))
            } else {
                -INV_2PI * (p - x).norm().ln()
            };
            for r in 0..m {
                out[r] += w * len * k * val[r] * jac;
            }
        }
    }
}

struct Buffers {
    v: Vec<f64>,
    d: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Buffers {
    fn new(m: usize) -> Self {
        Self {
            v: vec![0.0; m],
            d: vec![0.0; m],
            a: vec![0.0; m],
            b: vec![0.0; m],
        }
    }
}

#[inline]
fn rank1(acc: &mut DMatrix<f64>, s: f64, a: &[f64], b: &[f64]) {
    for (j, &bj) in b.iter().enumerate() {
        let sb = s * bj;
        for (i, &ai) in a.iter().enumerate() {
            acc[(i, j)] += ai * sb;
        }
    }
}

#[inline]
fn kernel(kind: KernelKind, x: &Sample, y: &Sample) -> f64 {
    match kind {
        KernelKind::SingleLayer | KernelKind::Hypersingular => -INV_2PI * (y.p - x.p).norm().ln(),
        KernelKind::DoubleLayer => dl(x.p, y.p, y.n),
        KernelKind::AdjointDoubleLayer => adl(x.p, y.p, x.n),
    }
}

type BBox = (Point, Point);

fn bbox(panel: &Piece, samples: &[Sample]) -> BBox {
    let ends = [
        panel.curve.eval_at(panel.hint, panel.t0).0,
        panel.curve.eval_at(panel.hint, panel.t1).0,
    ];
    let mut lo = ends[0];
    let mut hi = ends[0];
    for p in ends.iter().chain(samples.iter().map(|s| &s.p)) {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

fn diam(b: &BBox) -> f64 {
    (b.1 - b.0).norm()
}

fn box_distance(a: &BBox, b: &BBox) -> f64 {
    let dx = (b.0.x - a.1.x).max(a.0.x - b.1.x).max(0.0);
    let dy = (b.0.y - a.1.y).max(a.0.y - b.1.y).max(0.0);
    dx.hypot(dy)
}

/// Double integral `∫∫ φ(x) k(x, y) ψ(y) dγ_y dγ_x` of scalar shapes over the
/// parameter intervals `ex` of `curve_x` and `ey` of `curve_y`, with `order`
/// nodes per direction for every pair class.
#[allow(clippy::too_many_arguments)]
pub fn integrate_pair<F, G>(
    kind: KernelKind,
    curve_x: &BoundaryCurve,
    ex: (f64, f64),
    shape_x: F,
    curve_y: &BoundaryCurve,
    ey: (f64, f64),
    shape_y: G,
    order: usize,
) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64) + Sync,
    G: Fn(f64) -> (f64, f64) + Sync,
{
    for (curve, (t0, t1)) in [(curve_x, ex), (curve_y, ey)] {
        for t in [0.25, 0.5, 0.75].map(|u| t0 + u * (t1 - t0)) {
            curve.frame(t)?;
        }
    }
    let sx = FnShapes(vec![shape_x]);
    let sy = FnShapes(vec![shape_y]);
    let px = PanelRef::new(curve_x, ex.0, ex.1, &sx);
    let py = PanelRef::new(curve_y, ey.0, ey.1, &sy);
    let integ = Integrator::new(QuadConfig::uniform(order));
    let m = integ.pair_block(kind, &px, &py);
    if !m[(0, 0)].is_finite() {
        return Err(Error::SingularParametrization { t: ex.0, speed: 0.0 });
    }
    Ok(m[(0, 0)])
}

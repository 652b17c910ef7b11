//! Built-in benchmark runs, problem-file runs and result output.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::assembly::Discretization;
use crate::data::HarmonicFunction;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, Parametrization};
use crate::postprocess::{convergence_orders, BoundarySolution, Part, MAX_ERROR_SAMPLES};
use crate::problem::{load_problem_file, BvpProblem, ExactSolution, FileSettings};
use crate::quadrature::QuadConfig;
use crate::spaces::{
    build_bspline_space, build_lagrange_space, build_polygonal_space, mesh, refined_geometry_knots, refined_then_elevated_knots,
    uniform_knots, Continuity, DiscreteSpace,
};

/// Discretization family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Galerkin with B-splines on the exact geometry.
    Iga,
    /// Galerkin with Lagrangian elements on the exact geometry.
    Curvilinear,
    /// Galerkin with discontinuous Lagrangian elements on the inscribed polygon.
    Standard,
    /// Collocation with B-splines at the Greville abscissae.
    Collocation,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iga" | "iga-sgbem" => Ok(Method::Iga),
            "curvilinear" | "c-sgbem" => Ok(Method::Curvilinear),
            "standard" | "s-sgbem" => Ok(Method::Standard),
            "iga-collocation" | "collocation" => Ok(Method::Collocation),
            _ => Err(Error::Usage(format!(
                "unknown method '{s}' (expected iga, curvilinear, standard or iga-collocation)"
            ))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Iga => "IGA-SGBEM",
            Method::Curvilinear => "C-SGBEM",
            Method::Standard => "S-SGBEM",
            Method::Collocation => "IGA-collocation",
        })
    }
}

/// One experiment: a method, its space parameters and the refinement sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub method: Method,
    /// Polynomial degree; the example's default when absent.
    pub degree: Option<usize>,
    /// Number of rows, each halving the mesh step of the previous one.
    pub levels: usize,
    /// Explicit element counts, one row each; overrides `levels`.
    pub elements: Option<Vec<usize>>,
    /// Example-specific space variant (`t1`/`t2`, `c2`/`c1`, `a`/`b`).
    pub variant: Option<String>,
    /// Gauss nodes per direction; grown with the degree when absent.
    pub quad_order: Option<usize>,
    /// Per-class node counts overriding `quad_order`.
    pub class_orders: ClassOrders,
    /// Record wall-clock seconds; zero otherwise, for reproducible output.
    pub timing: bool,
}

impl RunConfig {
    pub fn new(method: Method, levels: usize) -> Self {
        Self {
            method,
            degree: None,
            levels,
            elements: None,
            variant: None,
            quad_order: None,
            class_orders: ClassOrders::default(),
            timing: true,
        }
    }

    pub fn degree(mut self, d: usize) -> Self {
        self.degree = Some(d);
        self
    }

    pub fn variant(mut self, v: &str) -> Self {
        self.variant = Some(v.to_string());
        self
    }

    pub fn elements(mut self, e: Vec<usize>) -> Self {
        self.elements = Some(e);
        self
    }

    pub fn timing(mut self, on: bool) -> Self {
        self.timing = on;
        self
    }

    fn quad(&self, degree: usize) -> QuadConfig {
        self.class_orders
            .apply(QuadConfig::uniform(self.quad_order.unwrap_or((2 * degree + 6).max(16))))
    }

    /// Element counts of the rows, starting from `base`.
    fn counts(&self, base: usize) -> Vec<usize> {
        match &self.elements {
            Some(e) => e.clone(),
            None => (0..self.levels).map(|l| base << l).collect(),
        }
    }
}

/// Optional node counts for coincident, adjacent and disjoint pairs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClassOrders {
    pub coincident: Option<usize>,
    pub adjacent: Option<usize>,
    pub disjoint: Option<usize>,
}

impl ClassOrders {
    pub fn apply(&self, mut cfg: QuadConfig) -> QuadConfig {
        cfg.coincident = self.coincident.unwrap_or(cfg.coincident);
        cfg.adjacent = self.adjacent.unwrap_or(cfg.adjacent);
        cfg.disjoint = self.disjoint.unwrap_or(cfg.disjoint);
        cfg
    }
}

/// One line of a results table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    /// Mesh step in parameter units.
    pub h: f64,
    pub dof: usize,
    /// Spectral (Galerkin) or singular-value (collocation) condition number.
    pub cond: f64,
    /// Relative L² error of the flux, or the maximum-norm error.
    pub error: f64,
    /// `log₂` of the error ratio to the previous row, when steps halve.
    pub order: Option<f64>,
    pub seconds: f64,
}

/// Rows of one method within a table.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub label: String,
    pub rows: Vec<ResultRow>,
    /// Additional per-row measurements, e.g. separate flux and trace errors.
    pub notes: Vec<String>,
}

/// Error measure reported in the `error` column.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    /// `‖q − q_h‖/‖q‖` on the Dirichlet part.
    RelativeFlux,
    /// Maximum-norm error of the flux (or density jump).
    MaxFlux,
    /// Larger of the maximum-norm errors of flux and trace.
    MaxBoth,
}

/// Solved case: size, conditioning and errors.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub dof: usize,
    pub cond: f64,
    pub error: f64,
    /// Maximum-norm flux and trace errors when the trace is an unknown.
    pub max_errors: Option<(f64, f64)>,
    pub seconds: f64,
    pub solution: BoundarySolution,
}

/// Exact value on curve `c` at parameter `t`.
type CurveFunction<'a> = Box<dyn Fn(usize, f64) -> f64 + 'a>;

fn exact_functions(problem: &BvpProblem) -> Option<(CurveFunction<'_>, CurveFunction<'_>)> {
    match problem.exact.as_ref()? {
        ExactSolution::Harmonic(h) => {
            let flux = move |c: usize, t: f64| {
                let f = problem.curves[c].frame(t).expect("regular parametrization");
                h.flux(f.point, f.normal)
            };
            let trace = move |c: usize, t: f64| h.value(problem.curves[c].point(t));
            Some((Box::new(flux), Box::new(trace)))
        }
        ExactSolution::Screen(d) => {
            let flux = move |c: usize, t: f64| d.value(problem.curves[c].point(t));
            Some((Box::new(flux), Box::new(|_, _| 0.0)))
        }
    }
}

/// Assembles, solves and measures one discretization.
pub fn solve_case(
    problem: BvpProblem,
    spaces: Vec<DiscreteSpace>,
    method: Method,
    quad: QuadConfig,
    measure: Measure,
) -> Result<Outcome> {
    let start = Instant::now();
    let disc = Discretization::new(problem, spaces, quad)?;
    let (dof, cond, solution) = if method == Method::Collocation {
        let (cond, sol) = disc.solve_collocation()?;
        (disc.q_dofs.len(), cond, sol)
    } else {
        let (sys, sol) = disc.solve()?;
        (sys.order(), sys.condition(), sol)
    };
    let seconds = start.elapsed().as_secs_f64();
    let problem = &disc.problem;
    let (error, max_errors) = match exact_functions(problem) {
        None => (f64::NAN, None),
        Some((flux, trace)) => match measure {
            Measure::RelativeFlux => (solution.relative_l2_error(Part::Flux, &flux)?, None),
            Measure::MaxFlux => (solution.max_error(Part::Flux, &flux, MAX_ERROR_SAMPLES), None),
            Measure::MaxBoth => {
                let eq = solution.max_error(Part::Flux, &flux, MAX_ERROR_SAMPLES);
                let eu = solution.max_error(Part::Trace, &trace, MAX_ERROR_SAMPLES);
                (eq.max(eu), Some((eq, eu)))
            }
        },
    };
    Ok(Outcome {
        dof,
        cond,
        error,
        max_errors,
        seconds,
        solution,
    })
}

fn block_from(label: String, cases: Vec<(f64, Outcome)>, timing: bool) -> Block {
    let h: Vec<f64> = cases.iter().map(|c| c.0).collect();
    let errors: Vec<f64> = cases.iter().map(|c| c.1.error).collect();
    let mut notes = Vec::new();
    let rows = cases
        .iter()
        .enumerate()
        .map(|(i, (h_i, o))| {
            let order = (i > 0)
                .then(|| convergence_orders(&errors[i - 1..=i], &h[i - 1..=i]).ok().map(|v| v[0]))
                .flatten();
            if let Some((eq, eu)) = o.max_errors {
                notes.push(format!("h = {h_i}: max flux error {eq:.4e}, max trace error {eu:.4e}"));
            }
            ResultRow {
                h: *h_i,
                dof: o.dof,
                cond: o.cond,
                error: o.error,
                order,
                seconds: if timing { o.seconds } else { 0.0 },
            }
        })
        .collect();
    Block { label, rows, notes }
}

fn variant<'a>(cfg: &'a RunConfig, default: &'a str, allowed: &[&str]) -> Result<&'a str> {
    let v = cfg.variant.as_deref().unwrap_or(default);
    if allowed.contains(&v) {
        Ok(v)
    } else {
        Err(Error::Usage(format!("variant '{v}' is not one of {allowed:?}")))
    }
}

fn refinement_levels(n: usize, base: usize) -> Result<usize> {
    if n < base || !n.is_multiple_of(base) || !(n / base).is_power_of_two() {
        return Err(Error::Usage(format!(
            "{n} elements is not a dyadic refinement of the {base} geometry elements"
        )));
    }
    Ok((n / base).trailing_zeros() as usize)
}

/// Spaces and mesh step of one row of a built-in example.
fn example_spaces(example: usize, cfg: &RunConfig, problem: &BvpProblem, n: usize) -> Result<(Vec<DiscreteSpace>, f64)> {
    let c0 = &problem.curves[0];
    let (a, b) = c0.domain();
    let h = (b - a) / n as f64;
    let spaces = match (example, cfg.method) {
        (1, Method::Iga) => {
            let degree = cfg.degree.unwrap_or(2);
            let raise: &[(f64, usize)] = match variant(cfg, "t1", &["t1", "t2"])? {
                "t1" => &[],
                _ => &[(1.0, 1), (8.0, 1)],
            };
            let levels = refinement_levels(n, 9)?;
            let kv = refined_geometry_knots(c0, degree, raise, levels)?;
            vec![build_bspline_space(c0, kv, false)?]
        }
        (1, Method::Curvilinear) => vec![build_lagrange_space(
            c0,
            &mesh(c0, n)?,
            cfg.degree.unwrap_or(2),
            &[1.0, 8.0],
            false,
        )?],
        (2, Method::Iga) => {
            let degree = cfg.degree.unwrap_or(3);
            let c1 = variant(cfg, "c2", &["c2", "c1", "uniform"])?;
            let kv = match (c1, refinement_levels(n, 8)) {
                ("c2", Ok(l)) => refined_then_elevated_knots(c0, degree, l)?,
                ("c1", Ok(l)) => {
                    let raise: Vec<(f64, usize)> = (1..8).map(|i| (i as f64 / 8.0, 1)).collect();
                    refined_geometry_knots(c0, degree, &raise, l)?
                }
                ("c1", Err(e)) => return Err(e),
                _ => uniform_knots(c0, degree, n, Continuity::C(degree - 1), &[])?,
            };
            vec![build_bspline_space(c0, kv, true)?]
        }
        (2, Method::Curvilinear) => vec![build_lagrange_space(c0, &mesh(c0, n)?, cfg.degree.unwrap_or(3), &[], true)?],
        (1 | 2, Method::Standard) => {
            let d = cfg.degree.unwrap_or(if example == 1 { 2 } else { 3 });
            vec![build_polygonal_space(c0, &mesh(c0, n)?, d)?]
        }
        (3, Method::Iga) => {
            let base = if variant(cfg, "a", &["a", "b"])? == "b" { 5 } else { 6 };
            let levels = refinement_levels(n, base)?;
            let mut out = Vec::new();
            for c in &problem.curves {
                let degree = cfg.degree.unwrap_or(c.as_spline().expect("spline").knots.degree());
                out.push(build_bspline_space(c, refined_geometry_knots(c, degree, &[], levels)?, true)?);
            }
            out
        }
        (3, Method::Curvilinear) => {
            let default = if variant(cfg, "a", &["a", "b"])? == "b" { 4 } else { 3 };
            let d = cfg.degree.unwrap_or(default);
            let mut out = Vec::new();
            for c in &problem.curves {
                out.push(build_lagrange_space(c, &mesh(c, n)?, d, &[], true)?);
            }
            out
        }
        (4, Method::Iga | Method::Collocation) => {
            let d = cfg.degree.unwrap_or(2);
            vec![build_bspline_space(
                c0,
                uniform_knots(c0, d, n, Continuity::C(d - 1), &[])?,
                false,
            )?]
        }
        (4, Method::Curvilinear) => vec![build_lagrange_space(c0, &mesh(c0, n)?, cfg.degree.unwrap_or(2), &[], false)?],
        (4, Method::Standard) => vec![build_polygonal_space(c0, &mesh(c0, n)?, cfg.degree.unwrap_or(2))?],
        (e, m) => return Err(Error::Usage(format!("example {e} does not support {m}"))),
    };
    Ok((spaces, h))
}

/// Default first element count of each example and method.
fn base_elements(example: usize, cfg: &RunConfig) -> usize {
    match (example, cfg.method) {
        (1, _) => 9,
        (2, Method::Standard) => 6,
        (2, _) => 8,
        (3, _) => {
            if cfg.variant.as_deref() == Some("b") {
                5
            } else {
                6
            }
        }
        (4, Method::Iga | Method::Collocation) => 10,
        _ => 20,
    }
}

pub fn builtin_problem(example: usize, cfg: &RunConfig) -> Result<BvpProblem> {
    crate::builtin::self_check()?;
    Ok(match example {
        1 => BvpProblem::example1(),
        2 => BvpProblem::example2(),
        3 => BvpProblem::example3(variant(cfg, "a", &["a", "b"])? == "b"),
        4 => BvpProblem::example4(),
        _ => return Err(Error::Usage(format!("there is no example {example}; choose 1 to 4"))),
    })
}

fn measure_for(problem: &BvpProblem) -> Measure {
    if problem.is_screen() {
        Measure::MaxFlux
    } else if problem.has_neumann() {
        Measure::MaxBoth
    } else {
        Measure::RelativeFlux
    }
}

/// One row per refinement level of a built-in example.
pub fn run_builtin(example: usize, cfg: &RunConfig) -> Result<Block> {
    let problem = builtin_problem(example, cfg)?;
    let variants: &[&str] = match example {
        1 => &["t1", "t2"],
        2 => &["c2", "c1", "uniform"],
        3 => &["a", "b"],
        _ => &[],
    };
    if let Some(v) = &cfg.variant {
        if !variants.contains(&v.as_str()) {
            return Err(Error::Usage(format!(
                "example {example} has no variant '{v}' (choose from {variants:?})"
            )));
        }
    }
    if cfg.method == Method::Collocation && !problem.is_screen() {
        return Err(Error::Usage("collocation is available for example 4 only".into()));
    }
    let measure = measure_for(&problem);
    let base = base_elements(example, cfg);
    let mut cases = Vec::new();
    let mut degree = 0;
    for n in cfg.counts(base) {
        let (spaces, h) = example_spaces(example, cfg, &problem, n)?;
        degree = spaces.iter().map(|s| s.degree).max().unwrap_or(0);
        let out = solve_case(problem.clone(), spaces, cfg.method, cfg.quad(degree), measure)?;
        cases.push((h, out));
    }
    let mut label = format!("example {example}, {}, degree {degree}", cfg.method);
    if let Some(v) = &cfg.variant {
        label.push_str(&format!(", {v}"));
    }
    Ok(block_from(label, cases, cfg.timing))
}

/// Same pipeline for a problem file. Settings in the file are defaults that
/// the configuration's explicit values override.
pub fn run_problem(path: &Path, cfg: &RunConfig) -> Result<Block> {
    let (problem, settings) = load_problem_file(path)?;
    run_loaded(problem, &settings, cfg, &path.display().to_string())
}

pub fn run_loaded(problem: BvpProblem, settings: &FileSettings, cfg: &RunConfig, label: &str) -> Result<Block> {
    let method = cfg.method;
    if method == Method::Collocation && !problem.is_screen() {
        return Err(Error::Usage("collocation needs a Dirichlet problem on an open arc".into()));
    }
    let degree = cfg.degree.or(settings.degree);
    let levels = if cfg.levels > 0 {
        cfg.levels
    } else {
        settings.levels.unwrap_or(1)
    };
    let measure = measure_for(&problem);
    let mut cases = Vec::new();
    let mut max_degree = 0;
    for level in 0..levels {
        let mut spaces = Vec::new();
        let mut h = f64::NAN;
        for (c, curve) in problem.curves.iter().enumerate() {
            let identify = curve.is_closed() && settings.closure_continuous.get(c).copied().unwrap_or(true);
            let geometry_elements = curve.breakpoints().len() - 1;
            let n0 = cfg.elements.as_ref().and_then(|e| e.first().copied()).or(settings.elements);
            let space = match (method, curve.parametrization()) {
                (Method::Iga | Method::Collocation, Parametrization::Spline(s)) if n0.is_none() => {
                    let d = degree.unwrap_or(s.knots.degree());
                    build_bspline_space(curve, refined_geometry_knots(curve, d, &[], level)?, identify)?
                }
                (Method::Iga | Method::Collocation, _) => {
                    let d = degree.unwrap_or(2);
                    let n = n0.unwrap_or(geometry_elements.max(8)) << level;
                    build_bspline_space(curve, uniform_knots(curve, d, n, Continuity::C(d - 1), &[])?, identify)?
                }
                (Method::Curvilinear, _) => {
                    let n = n0.unwrap_or(geometry_elements.max(4)) << level;
                    build_lagrange_space(curve, &mesh(curve, n)?, degree.unwrap_or(2), &[], identify)?
                }
                (Method::Standard, _) => {
                    let n = n0.unwrap_or(geometry_elements.max(4)) << level;
                    build_polygonal_space(curve, &mesh(curve, n)?, degree.unwrap_or(2))?
                }
            };
            if c == 0 {
                h = space.h;
            }
            max_degree = max_degree.max(space.degree);
            spaces.push(space);
        }
        let quad = match settings.quad_order {
            Some(q) if cfg.quad_order.is_none() => cfg.class_orders.apply(QuadConfig::uniform(q)),
            _ => cfg.quad(max_degree),
        };
        cases.push((h, solve_case(problem.clone(), spaces, method, quad, measure)?));
    }
    Ok(block_from(
        format!("{label}, {method}, degree {max_degree}"),
        cases,
        cfg.timing,
    ))
}

/// Parses a method name from a problem file or the command line.
pub fn method_of(settings: &FileSettings) -> Result<Method> {
    settings.method.as_deref().unwrap_or("iga").parse()
}

/// The runs behind table `n` (1 to 8).
pub fn table(n: usize, timing: bool) -> Result<Vec<Block>> {
    let run = |ex: usize, cfg: RunConfig| run_builtin(ex, &cfg.timing(timing));
    Ok(match n {
        1 => vec![run(1, RunConfig::new(Method::Iga, 4).variant("t1"))?],
        2 => vec![
            run(1, RunConfig::new(Method::Iga, 4).variant("t2"))?,
            run(1, RunConfig::new(Method::Curvilinear, 4))?,
        ],
        3..=5 => {
            let level = n - 3;
            let mut iga = Vec::new();
            let mut lag = Vec::new();
            for d in 3..=9 {
                let b = run(2, RunConfig::new(Method::Iga, 1).degree(d).elements(vec![8 << level]))?;
                iga.extend(b.rows);
                let b = run(2, RunConfig::new(Method::Curvilinear, 1).degree(d).elements(vec![8 << level]))?;
                lag.extend(b.rows);
            }
            let h = format!("h = 1/{}, degrees 3 to 9", 8 << level);
            vec![
                Block {
                    label: format!("example 2, IGA-SGBEM C2, {h}"),
                    rows: iga,
                    notes: Vec::new(),
                },
                Block {
                    label: format!("example 2, C-SGBEM C0, {h}"),
                    rows: lag,
                    notes: Vec::new(),
                },
            ]
        }
        6 => vec![
            run(2, RunConfig::new(Method::Iga, 4).variant("c2"))?,
            run(2, RunConfig::new(Method::Iga, 4).variant("c1"))?,
            run(2, RunConfig::new(Method::Curvilinear, 4))?,
            run(
                2,
                RunConfig::new(Method::Iga, 0)
                    .variant("uniform")
                    .elements(vec![22, 46, 94, 190]),
            )?,
            run(2, RunConfig::new(Method::Standard, 4))?,
        ],
        7 => vec![
            run(4, RunConfig::new(Method::Iga, 3).elements(vec![20, 40, 80]))?,
            run(4, RunConfig::new(Method::Curvilinear, 3))?,
            run(4, RunConfig::new(Method::Standard, 3))?,
        ],
        8 => vec![
            run(4, RunConfig::new(Method::Iga, 5))?,
            run(4, RunConfig::new(Method::Collocation, 5))?,
        ],
        _ => return Err(Error::Usage(format!("there is no table {n}; choose 1 to 8"))),
    })
}

/// Short file-name tag of a block label.
fn slug(label: &str) -> String {
    let mut s: String = label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect();
    while s.contains("__") {
        s = s.replace("__", "_");
    }
    s.trim_matches('_').to_string()
}

/// Writes one CSV per block and one plot-data file with `(dof, error)` pairs
/// per block; returns the paths written.
pub fn emit_outputs(blocks: &[Block], dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    if blocks.is_empty() || blocks.iter().any(|b| b.rows.is_empty()) {
        return Err(Error::Usage("refusing to write empty results".into()));
    }
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut plot = String::new();
    for (i, b) in blocks.iter().enumerate() {
        let path = dir.join(format!("{stem}_{}_{}.csv", i + 1, slug(&b.label)));
        let mut w = csv::Writer::from_path(&path)?;
        for r in &b.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        written.push(path);
        plot.push_str(&format!("# {}\n# dof error\n", b.label));
        for r in &b.rows {
            plot.push_str(&format!("{} {:e}\n", r.dof, r.error));
        }
        plot.push_str("\n\n");
    }
    let path = dir.join(format!("{stem}_plot.dat"));
    std::fs::write(&path, plot)?;
    written.push(path);
    Ok(written)
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for row in r.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// Plain-text rendering of a block.
pub fn format_block(b: &Block) -> String {
    let mut s = format!(
        "{}\n{:>10} {:>6} {:>11} {:>11} {:>7} {:>9}\n",
        b.label, "h", "dof", "cond", "error", "order", "seconds"
    );
    for r in &b.rows {
        let order = r.order.map(|o| format!("{o:.2}")).unwrap_or_else(|| "-".into());
        s.push_str(&format!(
            "{:>10.6} {:>6} {:>11.3e} {:>11.3e} {:>7} {:>9.3}\n",
            r.h, r.dof, r.cond, r.error, order, r.seconds
        ));
    }
    for n in &b.notes {
        s.push_str(&format!("  {n}\n"));
    }
    s
}

/// Harmonic reference used by the circle self-check of the CLI.
pub fn circle_problem(radius: f64) -> Result<BvpProblem> {
    let c = BoundaryCurve::circle(crate::geometry::Point::zeros(), radius)?;
    Ok(BvpProblem::dirichlet(vec![c], HarmonicFunction::Poly(vec![0.0, 1.0])))
}

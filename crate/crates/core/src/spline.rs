//! Polynomial splines in B-form.
//!
//! An [`KnotVector`] of order `k` carries the knots `τ_0 ≤ … ≤ τ_{N+k}` of a
//! spline space of dimension `N + 1`; the basis is generated by the
//! Cox–de Boor recursion with the convention that `ω_{i,j}` vanishes whenever
//! `τ_i = τ_{i+j-1}`. Evaluation is right-continuous at interior knots and
//! switches to the left limit at the right end `b` of the domain.

use nalgebra::{DMatrix, Vector2};
use std::ops::{Add, Mul};

use crate::error::{Error, Result};

/// Largest supported spline order (degree + 1).
pub const MAX_ORDER: usize = 16;

/// Values that can be combined linearly as spline coefficients.
pub trait Coefficient: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    const DIM: usize;
    fn zero() -> Self;
    fn component(&self, i: usize) -> f64;
    fn from_components(c: &[f64]) -> Self;
}

impl Coefficient for f64 {
    const DIM: usize = 1;
    fn zero() -> Self {
        0.0
    }
    fn component(&self, _i: usize) -> f64 {
        *self
    }
    fn from_components(c: &[f64]) -> Self {
        c[0]
    }
}

impl Coefficient for Vector2<f64> {
    const DIM: usize = 2;
    fn zero() -> Self {
        Vector2::zeros()
    }
    fn component(&self, i: usize) -> f64 {
        self[i]
    }
    fn from_components(c: &[f64]) -> Self {
        Vector2::new(c[0], c[1])
    }
}

/// Which one-sided limit to take at a knot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Extended knot vector `T = {τ_0, …, τ_{N+k}}` of a spline space of order `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct KnotVector {
    order: usize,
    knots: Vec<f64>,
}

/// The at most `k` basis functions that do not vanish at a parameter.
#[derive(Clone, Debug)]
pub struct BasisValues {
    /// Global index of the first returned function.
    pub first_index: usize,
    /// `values[d][r]` is the `d`-th derivative of `B_{first_index + r, k}`.
    pub values: Vec<Vec<f64>>,
}

impl KnotVector {
    pub fn new(order: usize, knots: Vec<f64>) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::InvalidKnots(format!("order {order} not in 1..={MAX_ORDER}")));
        }
        if knots.len() < 2 * order {
            return Err(Error::InvalidKnots(format!(
                "{} knots cannot carry order {order}",
                knots.len()
            )));
        }
        if knots.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidKnots("non-finite knot".into()));
        }
        if let Some(w) = knots.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidKnots(format!(
                "knots decrease at position {}: {} > {}",
                w + 1,
                knots[w],
                knots[w + 1]
            )));
        }
        let mut run = 1;
        for w in knots.windows(2) {
            run = if w[1] == w[0] { run + 1 } else { 1 };
            if run > order {
                return Err(Error::InvalidKnots(format!("knot {} has multiplicity > {order}", w[0])));
            }
        }
        let n = knots.len() - order; // N + 1
        if knots[order - 1] >= knots[n] {
            return Err(Error::InvalidKnots("empty parameter domain".into()));
        }
        Ok(Self { order, knots })
    }

    /// Open knot vector on the breakpoints `t_0 < … < t_n` with interior
    /// multiplicities `m_1 … m_{n-1}`.
    pub fn open(order: usize, breakpoints: &[f64], multiplicities: &[usize]) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidKnots("need at least two breakpoints".into()));
        }
        if multiplicities.len() + 2 != breakpoints.len() {
            return Err(Error::InvalidKnots(format!(
                "{} breakpoints need {} interior multiplicities, got {}",
                breakpoints.len(),
                breakpoints.len() - 2,
                multiplicities.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidKnots("breakpoints must increase strictly".into()));
        }
        if let Some(&m) = multiplicities.iter().find(|&&m| m == 0 || m > order) {
            return Err(Error::InvalidKnots(format!("multiplicity {m} not in 1..={order}")));
        }
        let mut knots = vec![breakpoints[0]; order];
        for (t, &m) in breakpoints[1..breakpoints.len() - 1].iter().zip(multiplicities) {
            knots.extend(std::iter::repeat_n(*t, m));
        }
        knots.extend(std::iter::repeat_n(*breakpoints.last().unwrap(), order));
        Self::new(order, knots)
    }

    /// Open knot vector on `n` uniform intervals of `[a, b]`, all interior
    /// breakpoints with multiplicity `m`.
    pub fn open_uniform(order: usize, a: f64, b: f64, n: usize, m: usize) -> Result<Self> {
        let bp = uniform_breakpoints(a, b, n);
        Self::open(order, &bp, &vec![m; n.saturating_sub(1)])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.order - 1
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Dimension `N + 1 = k + Σ m_i` of the spline space.
    pub fn dimension(&self) -> usize {
        self.knots.len() - self.order
    }

    /// Parameter domain `[a, b] = [τ_{k-1}, τ_{N+1}]`.
    pub fn domain(&self) -> (f64, f64) {
        (self.knots[self.order - 1], self.knots[self.dimension()])
    }

    pub fn is_open(&self) -> bool {
        let (a, b) = self.domain();
        let k = self.order;
        self.knots[..k].iter().all(|&t| t == a) && self.knots[self.knots.len() - k..].iter().all(|&t| t == b)
    }

    /// Distinct knot values in `[a, b]`, i.e. the breakpoints `t_0 < … < t_n`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (a, b) = self.domain();
        let mut out: Vec<f64> = Vec::new();
        for &t in &self.knots {
            if t >= a && t <= b && out.last() != Some(&t) {
                out.push(t);
            }
        }
        out
    }

    /// Number of occurrences of `t` in the knot vector.
    pub fn multiplicity(&self, t: f64) -> usize {
        self.knots.iter().filter(|&&x| x == t).count()
    }

    /// Multiplicities `m_1 … m_{n-1}` of the interior breakpoints.
    pub fn interior_multiplicities(&self) -> Vec<usize> {
        let bp = self.breakpoints();
        bp[1..bp.len() - 1].iter().map(|&t| self.multiplicity(t)).collect()
    }

    /// Indices `μ` of the non-empty knot spans `[τ_μ, τ_{μ+1})` inside `[a, b]`.
    pub fn spans(&self) -> Vec<usize> {
        (self.order - 1..self.dimension())
            .filter(|&mu| self.knots[mu] < self.knots[mu + 1])
            .collect()
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let (a, b) = self.domain();
        if !(t >= a && t <= b) {
            return Err(Error::Domain { t, a, b });
        }
        Ok(())
    }

    /// Span index `μ` with `τ_μ ≤ t < τ_{μ+1}`; at `t = b` the last non-empty span.
    pub fn find_span(&self, t: f64) -> Result<usize> {
        self.find_span_side(t, Side::Right)
    }

    /// Span whose closure contains `t`, taking the requested one-sided limit at knots.
    pub fn find_span_side(&self, t: f64, side: Side) -> Result<usize> {
        self.check_domain(t)?;
        let k = self.order;
        let last = self.dimension() - 1; // N
        let (a, b) = self.domain();
        let mu = match side {
            Side::Right if t < b => self.knots.partition_point(|&x| x <= t) - 1,
            Side::Left if t > a => self.knots.partition_point(|&x| x < t) - 1,
            Side::Right => self.knots.partition_point(|&x| x < t) - 1,
            Side::Left => self.knots.partition_point(|&x| x <= t) - 1,
        };
        Ok(mu.clamp(k - 1, last))
    }

    /// Evaluates the `k` basis functions of span `mu` and their derivatives up to
    /// `nderiv` at `t`. `out[d * k + r]` receives the `d`-th derivative of
    /// `B_{mu-k+1+r}`. No domain checks.
    pub fn eval_in_span(&self, mu: usize, t: f64, nderiv: usize, out: &mut [f64]) {
        let k = self.order;
        let tau = &self.knots;
        let mut tab = [[0.0f64; MAX_ORDER]; MAX_ORDER];
        tab[0][0] = 1.0;
        let omega = |i: usize, j: usize| -> f64 {
            let (lo, hi) = (tau[i], tau[i + j - 1]);
            if lo < hi {
                (t - lo) / (hi - lo)
            } else {
                0.0
            }
        };
        for j in 1..k {
            let order = j + 1;
            for r in 0..=j {
                let i = mu + r - j;
                let left = if r >= 1 { tab[j - 1][r - 1] } else { 0.0 };
                let right = if r < j { tab[j - 1][r] } else { 0.0 };
                let mut v = 0.0;
                if left != 0.0 {
                    v += omega(i, order) * left;
                }
                if right != 0.0 {
                    v += (1.0 - omega(i + 1, order)) * right;
                }
                tab[j][r] = v;
            }
        }
        out[..k].copy_from_slice(&tab[k - 1][..k]);
        for d in 1..=nderiv {
            let row = &mut out[d * k..(d + 1) * k];
            if d >= k {
                row.fill(0.0);
                continue;
            }
            for (r0, slot) in row.iter_mut().enumerate() {
                let mut c = [0.0f64; MAX_ORDER];
                c[r0] = 1.0;
                let mut len = k;
                for _ in 0..d {
                    let order = len;
                    let mut next = [0.0f64; MAX_ORDER];
                    for rp in 0..order - 1 {
                        let i = mu + 2 + rp - order;
                        let den = tau[i + order - 1] - tau[i];
                        if den > 0.0 {
                            next[rp] = (order - 1) as f64 * (c[rp + 1] - c[rp]) / den;
                        }
                    }
                    c = next;
                    len -= 1;
                }
                *slot = (0..len).map(|r| c[r] * tab[len - 1][r]).sum();
            }
        }
    }

    /// Nonzero basis functions at `t` and their derivatives up to `nderiv`.
    pub fn eval_basis(&self, t: f64, nderiv: usize) -> Result<BasisValues> {
        let mu = self.find_span(t)?;
        Ok(self.basis_in_span(mu, t, nderiv))
    }

    pub fn eval_basis_side(&self, t: f64, nderiv: usize, side: Side) -> Result<BasisValues> {
        let mu = self.find_span_side(t, side)?;
        Ok(self.basis_in_span(mu, t, nderiv))
    }

    fn basis_in_span(&self, mu: usize, t: f64, nderiv: usize) -> BasisValues {
        let k = self.order;
        let mut buf = vec![0.0; (nderiv + 1) * k];
        self.eval_in_span(mu, t, nderiv, &mut buf);
        BasisValues {
            first_index: mu + 1 - k,
            values: buf.chunks(k).map(|c| c.to_vec()).collect(),
        }
    }

    /// Greville abscissae `γ_i = (τ_{i+1} + … + τ_{i+k-1}) / (k - 1)`.
    pub fn greville(&self) -> Result<Vec<f64>> {
        let k = self.order;
        if k < 2 {
            return Err(Error::Unsupported("Greville abscissae need order >= 2".into()));
        }
        Ok((0..self.dimension())
            .map(|i| self.knots[i + 1..i + k].iter().sum::<f64>() / (k - 1) as f64)
            .collect())
    }

    /// Greville abscissae paired with the side from which `B_i` is positive there.
    pub fn interpolation_sites(&self) -> Result<Vec<(f64, Side)>> {
        let k = self.order;
        let g = self.greville()?;
        g.into_iter()
            .enumerate()
            .map(|(i, gi)| {
                let mut best = (Side::Right, -1.0);
                for side in [Side::Left, Side::Right] {
                    let mu = self.find_span_side(gi, side)?;
                    if mu + 1 < i + 1 || mu > i + k - 1 {
                        continue;
                    }
                    let mut buf = [0.0; MAX_ORDER];
                    self.eval_in_span(mu, gi, 0, &mut buf);
                    let v = buf[i + k - 1 - mu];
                    if v > best.1 {
                        best = (side, v);
                    }
                }
                Ok((gi, best.0))
            })
            .collect()
    }

    /// Evaluates `Σ c_i B_{i,k}^{(deriv)}(t)`.
    pub fn evaluate<P: Coefficient>(&self, coeffs: &[P], t: f64, deriv: usize) -> Result<P> {
        self.evaluate_side(coeffs, t, deriv, Side::Right)
    }

    pub fn evaluate_side<P: Coefficient>(&self, coeffs: &[P], t: f64, deriv: usize, side: Side) -> Result<P> {
        self.check_coeffs(coeffs.len())?;
        let mu = self.find_span_side(t, side)?;
        Ok(self.evaluate_in_span(coeffs, mu, t, deriv))
    }

    /// Evaluation inside a known span; no checks.
    pub fn evaluate_in_span<P: Coefficient>(&self, coeffs: &[P], mu: usize, t: f64, deriv: usize) -> P {
        let k = self.order;
        let mut buf = [0.0; MAX_ORDER * 4];
        let mut heap;
        let out: &mut [f64] = if (deriv + 1) * k <= buf.len() {
            &mut buf[..(deriv + 1) * k]
        } else {
            heap = vec![0.0; (deriv + 1) * k];
            &mut heap
        };
        self.eval_in_span(mu, t, deriv, out);
        let first = mu + 1 - k;
        let row = &out[deriv * k..(deriv + 1) * k];
        row.iter()
            .enumerate()
            .fold(P::zero(), |acc, (r, &b)| acc + coeffs[first + r] * b)
    }

    fn check_coeffs(&self, n: usize) -> Result<()> {
        if n != self.dimension() {
            return Err(Error::CoefficientCount {
                expected: self.dimension(),
                got: n,
            });
        }
        Ok(())
    }

    /// Boehm insertion of a single knot; the represented function is unchanged.
    pub fn insert_knot<P: Coefficient>(&self, coeffs: &[P], t: f64) -> Result<(KnotVector, Vec<P>)> {
        self.check_coeffs(coeffs.len())?;
        let (a, b) = self.domain();
        if !(t > a && t < b) {
            return Err(Error::Domain { t, a, b });
        }
        let k = self.order;
        let multiplicity = self.multiplicity(t) + 1;
        if multiplicity > k {
            return Err(Error::MultiplicityOverflow {
                t,
                multiplicity,
                order: k,
            });
        }
        let mu = self.find_span(t)?;
        let n = coeffs.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let c = if i + k <= mu + 1 {
                coeffs[i]
            } else if i > mu {
                coeffs[i - 1]
            } else {
                let alpha = (t - self.knots[i]) / (self.knots[i + k - 1] - self.knots[i]);
                coeffs[i] * alpha + coeffs[i - 1] * (1.0 - alpha)
            };
            out.push(c);
        }
        let mut knots = self.knots.clone();
        knots.insert(mu + 1, t);
        Ok((KnotVector::new(k, knots)?, out))
    }

    /// Inserts a simple knot at the midpoint of every non-empty span.
    pub fn refine_midpoints<P: Coefficient>(&self, coeffs: &[P]) -> Result<(KnotVector, Vec<P>)> {
        let mids: Vec<f64> = self
            .spans()
            .into_iter()
            .map(|mu| 0.5 * (self.knots[mu] + self.knots[mu + 1]))
            .collect();
        let mut kv = self.clone();
        let mut c = coeffs.to_vec();
        for t in mids {
            let (nk, nc) = kv.insert_knot(&c, t)?;
            kv = nk;
            c = nc;
        }
        Ok((kv, c))
    }

    /// Knot vector of the order-`k+1` space: every knot value gains one copy.
    pub fn elevated(&self) -> Result<KnotVector> {
        let mut knots = Vec::with_capacity(self.knots.len() + self.breakpoints().len() + 2);
        for (i, &t) in self.knots.iter().enumerate() {
            knots.push(t);
            if i + 1 == self.knots.len() || self.knots[i + 1] != t {
                knots.push(t);
            }
        }
        KnotVector::new(self.order + 1, knots)
    }

    /// Raises the order by one, preserving the function and every
    /// breakpoint's continuity class.
    pub fn elevate_degree<P: Coefficient>(&self, coeffs: &[P]) -> Result<(KnotVector, Vec<P>)> {
        self.check_coeffs(coeffs.len())?;
        let target = self.elevated()?;
        let c = target.interpolate(|t, side| self.evaluate_side(coeffs, t, 0, side))?;
        Ok((target, c))
    }

    /// Coefficients of the spline interpolating `f` at the Greville sites.
    pub fn interpolate<P, F>(&self, f: F) -> Result<Vec<P>>
    where
        P: Coefficient,
        F: Fn(f64, Side) -> Result<P>,
    {
        let sites = self.interpolation_sites()?;
        let n = self.dimension();
        let k = self.order;
        let mut a = DMatrix::<f64>::zeros(n, n);
        let mut rhs = DMatrix::<f64>::zeros(n, P::DIM);
        let mut buf = [0.0; MAX_ORDER];
        for (row, &(t, side)) in sites.iter().enumerate() {
            let mu = self.find_span_side(t, side)?;
            self.eval_in_span(mu, t, 0, &mut buf);
            for r in 0..k {
                a[(row, mu + 1 - k + r)] = buf[r];
            }
            let v = f(t, side)?;
            for d in 0..P::DIM {
                rhs[(row, d)] = v.component(d);
            }
        }
        let sol = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Linear("singular interpolation matrix".into()))?;
        Ok((0..n)
            .map(|i| {
                let comps: Vec<f64> = (0..P::DIM).map(|d| sol[(i, d)]).collect();
                P::from_components(&comps)
            })
            .collect())
    }
}

/// `n + 1` uniform breakpoints on `[a, b]`, computed once so that nested
/// refinements reproduce identical values.
pub fn uniform_breakpoints(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| if i == n { b } else { a + (b - a) * (i as f64) / (n as f64) })
        .collect()
}

/// A spline function or curve in B-form.
#[derive(Clone, Debug, PartialEq)]
pub struct Spline<P> {
    pub knots: KnotVector,
    pub coeffs: Vec<P>,
}

impl<P: Coefficient> Spline<P> {
    pub fn new(knots: KnotVector, coeffs: Vec<P>) -> Result<Self> {
        knots.check_coeffs(coeffs.len())?;
        Ok(Self { knots, coeffs })
    }

    pub fn eval(&self, t: f64) -> Result<P> {
        self.knots.evaluate(&self.coeffs, t, 0)
    }

    pub fn eval_deriv(&self, t: f64, deriv: usize, side: Side) -> Result<P> {
        self.knots.evaluate_side(&self.coeffs, t, deriv, side)
    }

    pub fn insert_knot(&self, t: f64) -> Result<Self> {
        let (knots, coeffs) = self.knots.insert_knot(&self.coeffs, t)?;
        Ok(Self { knots, coeffs })
    }

    pub fn refine_midpoints(&self) -> Result<Self> {
        let (knots, coeffs) = self.knots.refine_midpoints(&self.coeffs)?;
        Ok(Self { knots, coeffs })
    }

    pub fn elevate_degree(&self) -> Result<Self> {
        let (knots, coeffs) = self.knots.elevate_degree(&self.coeffs)?;
        Ok(Self { knots, coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use proptest::prelude::*;

    /// Direct transcription of the recursive definition, one function at a time.
    fn naive_bspline(tau: &[f64], i: usize, j: usize, t: f64) -> f64 {
        if j == 1 {
            return if tau[i] <= t && t < tau[i + 1] { 1.0 } else { 0.0 };
        }
        let w = |i: usize| {
            if tau[i] < tau[i + j - 1] {
                (t - tau[i]) / (tau[i + j - 1] - tau[i])
            } else {
                0.0
            }
        };
        w(i) * naive_bspline(tau, i, j - 1, t) + (1.0 - w(i + 1)) * naive_bspline(tau, i + 1, j - 1, t)
    }

    fn samples(n: usize, a: f64, b: f64) -> Vec<f64> {
        let g = 0.618_033_988_749_894_9;
        (1..=n).map(|i| a + (b - a) * ((i as f64 * g) % 1.0)).collect()
    }

    #[test]
    fn dimensions_of_example_spaces() {
        assert_eq!(builtin::t1().dimension(), 13);
        assert_eq!(builtin::t2().dimension(), 15);
        let bez = KnotVector::new(3, vec![0., 0., 0., 1., 1., 1.]).unwrap();
        assert_eq!(bez.dimension(), 3);
        let t1 = builtin::t1();
        assert_eq!(t1.dimension(), 3 + t1.interior_multiplicities().iter().sum::<usize>());
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(KnotVector::new(2, vec![0., 1., 0.5, 2.]).is_err());
        assert!(KnotVector::new(2, vec![0., 0., 1., 1., 1., 2., 2.]).is_err());
        assert!(KnotVector::new(3, vec![0., 0., 0., 0., 1., 1.]).is_err());
    }

    #[test]
    fn order_one_is_an_indicator() {
        let kv = KnotVector::new(1, vec![0., 0.5, 1.0, 2.0]).unwrap();
        let b = kv.eval_basis(0.7, 0).unwrap();
        assert_eq!(b.first_index, 1);
        assert_eq!(b.values[0], vec![1.0]);
        let end = kv.eval_basis(2.0, 0).unwrap();
        assert_eq!(end.first_index, 2);
    }

    #[test]
    fn last_function_is_one_at_right_end() {
        let t1 = builtin::t1();
        let b = t1.eval_basis(9.0, 0).unwrap();
        assert_eq!(b.first_index + 2, 12);
        assert_eq!(b.values[0][2], 1.0);
    }

    #[test]
    fn t1_basis_matches_recursive_definition() {
        let t1 = builtin::t1();
        let tau = t1.knots();
        for &t in &[0.5, 0.0, 1.0, 3.25, 7.9, 8.0, 8.5] {
            let b = t1.eval_basis(t, 0).unwrap();
            for i in 0..13 {
                let naive = naive_bspline(tau, i, 3, t);
                let fast = if i >= b.first_index && i < b.first_index + 3 {
                    b.values[0][i - b.first_index]
                } else {
                    0.0
                };
                assert!((naive - fast).abs() <= 1e-14, "t={t} i={i}: {naive} vs {fast}");
            }
        }
    }

    #[test]
    fn local_support_and_nonnegativity() {
        let t2 = builtin::t2();
        let tau = t2.knots();
        for t in samples(500, 0.0, 9.0) {
            let b = t2.eval_basis(t, 0).unwrap();
            for (r, &v) in b.values[0].iter().enumerate() {
                let i = b.first_index + r;
                assert!(v >= 0.0);
                if v > 0.0 {
                    assert!(t >= tau[i] && t <= tau[i + 3]);
                }
            }
        }
    }

    #[test]
    fn first_derivative_matches_central_differences() {
        let kv = KnotVector::open_uniform(5, 0.0, 1.0, 7, 1).unwrap();
        let d = 1e-5;
        for t in samples(200, 0.01, 0.99) {
            let b = kv.eval_basis(t, 1).unwrap();
            let mu = kv.find_span(t).unwrap();
            let mut p = [0.0; MAX_ORDER];
            let mut m = [0.0; MAX_ORDER];
            kv.eval_in_span(mu, t + d, 0, &mut p);
            kv.eval_in_span(mu, t - d, 0, &mut m);
            for r in 0..5 {
                let fd = (p[r] - m[r]) / (2.0 * d);
                let exact = b.values[1][r];
                assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{fd} vs {exact}");
            }
        }
    }

    #[test]
    fn second_derivative_of_a_polynomial() {
        // t^2 on an open cubic space: coefficients from interpolation
        let kv = KnotVector::open_uniform(4, 0.0, 1.0, 5, 1).unwrap();
        let c: Vec<f64> = kv.interpolate(|t, _| Ok(t * t)).unwrap();
        for t in samples(50, 0.0, 1.0) {
            let v2 = kv.evaluate(&c, t, 2).unwrap();
            assert!((v2 - 2.0).abs() < 1e-10);
            assert!((kv.evaluate(&c, t, 3).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn greville_cases() {
        let t6 = builtin::t6();
        assert_eq!(t6.greville().unwrap(), vec![-1.0, 0.0, 1.0]);
        let lin = KnotVector::new(2, vec![0., 0., 0.25, 0.5, 1., 1.]).unwrap();
        assert_eq!(lin.greville().unwrap(), vec![0.0, 0.25, 0.5, 1.0]);
        let g = builtin::t2().greville().unwrap();
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 9.0);
        assert!(g.windows(2).all(|w| w[0] <= w[1]));
        let flat = KnotVector::new(1, vec![0., 1.]).unwrap();
        assert!(matches!(flat.greville(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn insertion_up_to_full_multiplicity() {
        let kv = KnotVector::open_uniform(3, 0.0, 1.0, 4, 2).unwrap();
        let c: Vec<f64> = (0..kv.dimension()).map(|i| (i as f64).sin()).collect();
        let (k2, c2) = kv.insert_knot(&c, 0.5).unwrap();
        assert_eq!(k2.multiplicity(0.5), 3);
        for t in samples(50, 0.0, 1.0) {
            let a = kv.evaluate(&c, t, 0).unwrap();
            let b = k2.evaluate(&c2, t, 0).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
        assert!(matches!(k2.insert_knot(&c2, 0.5), Err(Error::MultiplicityOverflow { .. })));
        assert!(matches!(kv.insert_knot(&c, 1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn example1_midpoint_refinement_keeps_the_curve() {
        let curve = builtin::example1_spline();
        let refined = curve.refine_midpoints().unwrap();
        assert_eq!(refined.knots.dimension(), 22);
        for t in samples(100, 0.0, 9.0) {
            let a = curve.eval(t).unwrap();
            let b = refined.eval(t).unwrap();
            assert!((a - b).norm() <= 1e-13);
        }
    }

    #[test]
    fn tripling_corner_knots_gives_t2() {
        let curve = builtin::example1_spline();
        let c = curve.insert_knot(1.0).unwrap().insert_knot(8.0).unwrap();
        assert_eq!(c.knots, builtin::t2());
        for t in samples(100, 0.0, 9.0) {
            assert!((curve.eval(t).unwrap() - c.eval(t).unwrap()).norm() <= 1e-13);
        }
    }

    #[test]
    fn elevating_a_line_keeps_it_straight() {
        let kv = KnotVector::open_uniform(2, 0.0, 1.0, 3, 1).unwrap();
        let pts: Vec<Vector2<f64>> = (0..4).map(|i| Vector2::new(i as f64, 2.0 * i as f64 + 1.0)).collect();
        let s = Spline::new(kv, pts).unwrap();
        let e = s.elevate_degree().unwrap();
        assert_eq!(e.knots.order(), 3);
        for p in &e.coeffs {
            assert!((p.y - (2.0 * p.x + 1.0)).abs() < 1e-12);
        }
        for t in samples(50, 0.0, 1.0) {
            assert!((s.eval(t).unwrap() - e.eval(t).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn example2_elevation_to_degree_nine() {
        let base = builtin::example2_spline();
        let mut cur = base.clone();
        for degree in 4..=9 {
            cur = cur.elevate_degree().unwrap();
            assert_eq!(cur.knots.degree(), degree);
            // C2 at every interior breakpoint: multiplicity degree - 2
            assert!(cur.knots.interior_multiplicities().iter().all(|&m| m == degree - 2));
            let scale = 40.0;
            for t in samples(100, 0.0, 1.0) {
                let d = (base.eval(t).unwrap() - cur.eval(t).unwrap()).norm();
                assert!(d <= 1e-12 * scale, "degree {degree}, t={t}: {d}");
            }
            for t in samples(20, 0.0, 1.0) {
                let b = cur.knots.eval_basis(t, 0).unwrap();
                assert!((b.values[0].iter().sum::<f64>() - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn elevation_preserves_jumps() {
        let kv = KnotVector::open(3, &[0.0, 0.5, 1.0], &[3]).unwrap();
        let c = vec![0.0, 1.0, 2.0, 5.0, 4.0, 3.0];
        let (e, ec) = kv.elevate_degree(&c).unwrap();
        assert_eq!(e.multiplicity(0.5), 4);
        for t in samples(40, 0.0, 1.0) {
            let a = kv.evaluate(&c, t, 0).unwrap();
            let b = e.evaluate(&ec, t, 0).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn partition_of_unity(order in 1usize..8, n in 1usize..12, m in 1usize..4, u in 0.0f64..=1.0) {
            let m = m.min(order);
            let kv = KnotVector::open_uniform(order, -2.0, 3.0, n, m).unwrap();
            let t = -2.0 + 5.0 * u;
            let b = kv.eval_basis(t, 0).unwrap();
            let s: f64 = b.values[0].iter().sum();
            prop_assert!((s - 1.0).abs() <= 1e-13);
            prop_assert!(b.values[0].iter().all(|&v| v >= 0.0));
        }

        #[test]
        fn insertion_is_invisible(u in 0.001f64..0.999, v in 0.0f64..=1.0) {
            let kv = KnotVector::open_uniform(4, 0.0, 1.0, 6, 1).unwrap();
            let c: Vec<f64> = (0..kv.dimension()).map(|i| ((i * 7 % 5) as f64) - 2.0).collect();
            let (k2, c2) = kv.insert_knot(&c, u).unwrap();
            let a = kv.evaluate(&c, v, 0).unwrap();
            let b = k2.evaluate(&c2, v, 0).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}

//! Sampled real functions on `[0, 1]`.
//!
//! A [`GridFunction`] stores samples at the uniform nodes `x_i = i / N`,
//! optionally with derivative samples. Evaluation between nodes uses two-point
//! Hermite interpolation when derivative rows are present (quintic with two
//! rows, cubic with one) and four-point cubic interpolation otherwise.
//!
//! [`GridFunction::sup_norm`] is the maximum over nodes only. It is a lower
//! bound for the true supremum and is exact whenever the maximum is attained
//! at a node; the gap is `O(h^2)` for smooth functions.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::taylor::Taylor;

/// Position of node `i` on a grid with `n` intervals.
#[inline]
pub fn node(i: usize, n: usize) -> f64 {
    i as f64 / n as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridFunctionWire", into = "GridFunctionWire")]
pub struct GridFunction {
    n: usize,
    values: Vec<f64>,
    derivs: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct GridFunctionWire {
    n: usize,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    derivs: Vec<Vec<f64>>,
}

impl TryFrom<GridFunctionWire> for GridFunction {
    type Error = Error;

    fn try_from(w: GridFunctionWire) -> Result<Self> {
        GridFunction::with_derivs(w.n, w.values, w.derivs)
    }
}

impl From<GridFunction> for GridFunctionWire {
    fn from(g: GridFunction) -> Self {
        GridFunctionWire {
            n: g.n,
            values: g.values,
            derivs: g.derivs,
        }
    }
}

fn check_row(row: &[f64], n: usize, what: &str) -> Result<()> {
    if row.len() != n + 1 {
        return Err(Error::Shape(format!(
            "{what} has {} entries, expected {}",
            row.len(),
            n + 1
        )));
    }
    if let Some(i) = row.iter().position(|v| !v.is_finite()) {
        return Err(Error::Construction(format!("{what} is not finite at node {i}")));
    }
    Ok(())
}

impl GridFunction {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        Self::with_derivs(n, values, Vec::new())
    }

    /// `derivs[m]` holds samples of the `(m + 1)`-th derivative.
    pub fn with_derivs(n: usize, values: Vec<f64>, derivs: Vec<Vec<f64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("grid needs at least one interval".into()));
        }
        check_row(&values, n, "values")?;
        for (m, row) in derivs.iter().enumerate() {
            check_row(row, n, &format!("derivative row {}", m + 1))?;
        }
        Ok(GridFunction { n, values, derivs })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(n, (0..=n).map(|i| f(node(i, n))).collect())
    }

    pub fn zero(n: usize) -> Self {
        GridFunction {
            n,
            values: vec![0.0; n + 1],
            derivs: Vec::new(),
        }
    }

    /// Samples of `f` and its first `m` derivatives.
    pub fn from_smooth(f: &SmoothFunction, n: usize, m: usize) -> Result<Self> {
        let mut rows = f.node_rows(n, m)?;
        let values = rows.remove(0);
        Self::with_derivs(n, values, rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivs(&self) -> &[Vec<f64>] {
        &self.derivs
    }

    /// Highest derivative order with stored samples (0 when none).
    pub fn deriv_order(&self) -> usize {
        self.derivs.len()
    }

    /// Row `m`: the values for `m = 0`, derivative samples otherwise.
    pub fn row(&self, m: usize) -> &[f64] {
        if m == 0 {
            &self.values
        } else {
            &self.derivs[m - 1]
        }
    }

    /// Values and derivative samples at node `i`.
    pub fn node_jet(&self, i: usize) -> Vec<f64> {
        (0..=self.deriv_order()).map(|m| self.row(m)[i]).collect()
    }

    pub fn without_derivs(&self) -> Self {
        GridFunction {
            n: self.n,
            values: self.values.clone(),
            derivs: Vec::new(),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.eval_derivative(x, 0)
    }

    /// Interpolated derivative of order `m`, using the rows above `m` as
    /// Hermite data.
    pub fn eval_derivative(&self, x: f64, m: usize) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("x = {x} outside [0, 1]")));
        }
        if m > self.deriv_order() {
            return Err(Error::Domain(format!(
                "derivative order {m} exceeds stored order {}",
                self.deriv_order()
            )));
        }
        Ok(self.interp_row(m, x))
    }

    /// All derivatives `0..=upto` at `x`.
    pub fn eval_jet(&self, x: f64, upto: usize) -> Result<Vec<f64>> {
        (0..=upto).map(|m| self.eval_derivative(x, m)).collect()
    }

    pub(crate) fn interp_row(&self, m: usize, x: f64) -> f64 {
        let top = self.deriv_order();
        let rows: Vec<&[f64]> = (m..=top.min(m + 2)).map(|r| self.row(r)).collect();
        interpolate(&rows, self.n, x)
    }

    /// Max of `|values|` over the nodes. A lower bound for the true sup,
    /// short of it by `O(h^2)` when the max falls between nodes.
    pub fn sup_norm(&self) -> f64 {
        sup_abs(&self.values)
    }

    /// Sup of `|f|` over the nodes and the interior points `(i + s / SUP_REFINE) / N`
    /// of every panel, read off the interpolant.
    pub fn refined_sup_norm(&self) -> f64 {
        let top = self.deriv_order().min(2);
        let rows: Vec<&[f64]> = (0..=top).map(|r| self.row(r)).collect();
        refined_points(self.n).fold(self.sup_norm(), |m, x| m.max(interpolate(&rows, self.n, x).abs()))
    }

    /// Sum of the sup norms of the stored rows up to order `k`.
    pub fn ck_norm(&self, k: usize) -> f64 {
        (0..=k.min(self.deriv_order()))
            .map(|m| sup_abs(self.row(m)))
            .sum()
    }

    /// `alpha * self + beta * other`, row by row on the rows both carry.
    pub fn combine(&self, alpha: f64, other: &GridFunction, beta: f64) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Shape(format!("grid sizes {} and {}", self.n, other.n)));
        }
        let lin = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect()
        };
        let depth = self.deriv_order().min(other.deriv_order());
        Ok(GridFunction {
            n: self.n,
            values: lin(&self.values, &other.values),
            derivs: (0..depth).map(|m| lin(&self.derivs[m], &other.derivs[m])).collect(),
        })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        let sc = |r: &Vec<f64>| r.iter().map(|v| v * s).collect::<Vec<f64>>();
        GridFunction {
            n: self.n,
            values: sc(&self.values),
            derivs: self.derivs.iter().map(sc).collect(),
        }
    }

    /// `x -> ∫_0^x f(t) dt + b` at every node.
    ///
    /// Without derivative samples this is composite Simpson at even nodes and
    /// a four-point panel rule to reach odd nodes. With derivative samples each
    /// panel is integrated exactly over its Hermite interpolant. The result
    /// carries one more derivative row than `self`, the first being `self`'s
    /// values.
    pub fn antiderivative(&self, b: f64) -> Result<GridFunction> {
        let n = self.n;
        if n < 2 {
            return Err(Error::Domain("antiderivative needs at least 3 nodes".into()));
        }
        let h = 1.0 / n as f64;
        let f = &self.values;
        let mut cum = vec![0.0; n + 1];
        match self.deriv_order() {
            0 => {
                let panel = |i: usize| -> f64 {
                    if n == 2 {
                        return if i == 0 {
                            h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2])
                        } else {
                            h / 12.0 * (-f[0] + 8.0 * f[1] + 5.0 * f[2])
                        };
                    }
                    if i == 0 {
                        h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
                    } else if i == n - 1 {
                        h / 24.0 * (f[n - 3] - 5.0 * f[n - 2] + 19.0 * f[n - 1] + 9.0 * f[n])
                    } else {
                        h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2])
                    }
                };
                let mut i = 0;
                while i + 2 <= n {
                    cum[i + 1] = cum[i] + panel(i);
                    cum[i + 2] = cum[i] + h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
                    i += 2;
                }
                if i < n {
                    cum[n] = cum[n - 1] + panel(n - 1);
                }
            }
            1 => {
                let d = &self.derivs[0];
                for i in 0..n {
                    let p = h / 2.0 * (f[i] + f[i + 1]) + h * h / 12.0 * (d[i] - d[i + 1]);
                    cum[i + 1] = cum[i] + p;
                }
            }
            _ => {
                let d = &self.derivs[0];
                let dd = &self.derivs[1];
                for i in 0..n {
                    let p = h / 2.0 * (f[i] + f[i + 1])
                        + h * h / 10.0 * (d[i] - d[i + 1])
                        + h * h * h / 120.0 * (dd[i] + dd[i + 1]);
                    cum[i + 1] = cum[i] + p;
                }
            }
        }
        let mut values: Vec<f64> = cum.iter().map(|c| c + b).collect();
        values[0] = b;
        let mut derivs = Vec::with_capacity(self.deriv_order() + 1);
        derivs.push(self.values.clone());
        derivs.extend(self.derivs.iter().cloned());
        GridFunction::with_derivs(n, values, derivs)
    }

    /// Fourth-order finite-difference derivative: central five-point stencil
    /// inside, one-sided five-point stencils at the two nodes nearest each end.
    /// Error is `O(h^4)`.
    pub fn finite_difference_derivative(&self) -> Result<GridFunction> {
        let n = self.n;
        if n < 4 {
            return Err(Error::Domain("finite differences need N >= 4".into()));
        }
        let f = &self.values;
        let c = n as f64 / 12.0;
        let mut d = vec![0.0; n + 1];
        d[0] = c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
        d[1] = c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
        for i in 2..n - 1 {
            d[i] = c * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
        }
        d[n - 1] = -c * (-3.0 * f[n] - 10.0 * f[n - 1] + 18.0 * f[n - 2] - 6.0 * f[n - 3] + f[n - 4]);
        d[n] = -c * (-25.0 * f[n] + 48.0 * f[n - 1] - 36.0 * f[n - 2] + 16.0 * f[n - 3] - 3.0 * f[n - 4]);
        GridFunction::new(n, d)
    }
}

/// Interior samples per panel, plus one, used by refined sups.
pub const SUP_REFINE: usize = 8;

/// The off-node sample points of [`GridFunction::refined_sup_norm`].
pub fn refined_points(n: usize) -> impl Iterator<Item = f64> {
    (0..n).flat_map(move |i| {
        (1..SUP_REFINE).map(move |s| (i as f64 + s as f64 / SUP_REFINE as f64) / n as f64)
    })
}

pub(crate) fn sup_abs(row: &[f64]) -> f64 {
    row.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Interpolate on a uniform grid. `rows[0]` holds values, `rows[1]` and
/// `rows[2]` (when present) first and second derivatives.
pub(crate) fn interpolate(rows: &[&[f64]], n: usize, x: f64) -> f64 {
    let t = x * n as f64;
    let i = (t.floor().max(0.0) as usize).min(n - 1);
    let p = rows[0];
    if x == node(i, n) {
        return p[i];
    }
    if x == node(i + 1, n) {
        return p[i + 1];
    }
    let s = t - i as f64;
    let h = 1.0 / n as f64;
    match rows.len() {
        1 => cubic_lagrange(p, n, t),
        2 => {
            let d = rows[1];
            let s2 = s * s;
            let s3 = s2 * s;
            let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
            let h10 = s3 - 2.0 * s2 + s;
            let h01 = -2.0 * s3 + 3.0 * s2;
            let h11 = s3 - s2;
            h00 * p[i] + h10 * h * d[i] + h01 * p[i + 1] + h11 * h * d[i + 1]
        }
        _ => {
            let d = rows[1];
            let dd = rows[2];
            let s2 = s * s;
            let s3 = s2 * s;
            let s4 = s3 * s;
            let s5 = s4 * s;
            let b0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
            let b1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
            let b2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
            let c0 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
            let c1 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
            let c2 = 0.5 * (s3 - 2.0 * s4 + s5);
            b0 * p[i]
                + h * b1 * d[i]
                + h * h * b2 * dd[i]
                + c0 * p[i + 1]
                + h * c1 * d[i + 1]
                + h * h * c2 * dd[i + 1]
        }
    }
}

fn cubic_lagrange(p: &[f64], n: usize, t: f64) -> f64 {
    if n < 3 {
        // linear fallback on tiny grids
        let i = (t.floor() as usize).min(n - 1);
        let s = t - i as f64;
        return p[i] * (1.0 - s) + p[i + 1] * s;
    }
    let i = (t.floor().max(0.0) as usize).min(n - 1);
    let j0 = i.saturating_sub(1).min(n - 3);
    let u = t - j0 as f64;
    let l0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    let l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    let l2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    let l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    l0 * p[j0] + l1 * p[j0 + 1] + l2 * p[j0 + 2] + l3 * p[j0 + 3]
}

/// A closed-form function on `[0, 1]` returning exact jets.
#[derive(Clone)]
pub struct SmoothFunction {
    max_order: usize,
    jet: Arc<dyn Fn(f64, usize) -> Vec<f64> + Send + Sync>,
}

impl fmt::Debug for SmoothFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFunction")
            .field("max_order", &self.max_order)
            .finish_non_exhaustive()
    }
}

impl SmoothFunction {
    /// `jet(x, m)` must return `m + 1` entries `[f(x), f'(x), ..., f^(m)(x)]`.
    pub fn new(max_order: usize, jet: impl Fn(f64, usize) -> Vec<f64> + Send + Sync + 'static) -> Self {
        SmoothFunction {
            max_order,
            jet: Arc::new(jet),
        }
    }

    /// Build from an expression over Taylor jets; derivatives of every order
    /// are then available.
    pub fn from_expr(expr: impl Fn(&Taylor) -> Taylor + Send + Sync + 'static) -> Self {
        SmoothFunction::new(usize::MAX, move |x, m| expr(&Taylor::variable(x, m)).to_derivs())
    }

    pub fn zero() -> Self {
        SmoothFunction::new(usize::MAX, |_, m| vec![0.0; m + 1])
    }

    /// `x -> a x`.
    pub fn linear(a: f64) -> Self {
        SmoothFunction::new(usize::MAX, move |x, m| {
            let mut j = vec![0.0; m + 1];
            j[0] = a * x;
            if m >= 1 {
                j[1] = a;
            }
            j
        })
    }

    /// `x -> log(1 + a cos 2πx) - log(1 + a)`, for `|a| < 1`. Vanishes at both
    /// ends and is periodic with all derivatives.
    pub fn log_cosine(a: f64) -> Self {
        let shift = (1.0 + a).ln();
        SmoothFunction::from_expr(move |x| {
            let (_, c) = x.scale(2.0 * std::f64::consts::PI).sin_cos();
            c.scale(a).add_constant(1.0).ln().add_constant(-shift)
        })
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn jet(&self, x: f64, m: usize) -> Result<Vec<f64>> {
        if m > self.max_order {
            return Err(Error::Domain(format!(
                "order {m} exceeds declared maximum {}",
                self.max_order
            )));
        }
        let j = (self.jet)(x, m);
        if j.len() != m + 1 || j.iter().any(|v| !v.is_finite()) {
            return Err(Error::Construction(format!("bad jet at x = {x}")));
        }
        Ok(j)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.jet(x, 0)?[0])
    }

    pub fn scaled(&self, s: f64) -> Self {
        let inner = self.jet.clone();
        SmoothFunction::new(self.max_order, move |x, m| {
            inner(x, m).into_iter().map(|v| v * s).collect()
        })
    }
}

/// Anything that can supply derivative rows at the nodes of a grid.
pub trait JetSource {
    fn available_order(&self) -> usize;

    /// Rows `0..=order`, each with `n + 1` node samples.
    fn node_rows(&self, n: usize, order: usize) -> Result<Vec<Vec<f64>>>;
}

impl JetSource for SmoothFunction {
    fn available_order(&self) -> usize {
        self.max_order
    }

    fn node_rows(&self, n: usize, order: usize) -> Result<Vec<Vec<f64>>> {
        let mut rows = vec![vec![0.0; n + 1]; order + 1];
        for i in 0..=n {
            let j = self.jet(node(i, n), order)?;
            for (m, v) in j.into_iter().enumerate() {
                rows[m][i] = v;
            }
        }
        Ok(rows)
    }
}

impl JetSource for GridFunction {
    fn available_order(&self) -> usize {
        self.deriv_order()
    }

    fn node_rows(&self, n: usize, order: usize) -> Result<Vec<Vec<f64>>> {
        if n != self.n {
            return Err(Error::Shape(format!("grid has N = {}, requested {n}", self.n)));
        }
        if order > self.deriv_order() {
            return Err(Error::Domain(format!(
                "requested order {order}, grid function stores {}",
                self.deriv_order()
            )));
        }
        Ok((0..=order).map(|m| self.row(m).to_vec()).collect())
    }
}

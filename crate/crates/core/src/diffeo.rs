//! Machinery shared by interval and circle diffeomorphisms: the [`Diffeomorphism`]
//! trait, the coordinates `Φ_k` and their inverse, and jet-grid kernels for
//! logarithmic derivatives, composition and inversion.

use serde::{Deserialize, Serialize};

use crate::config::DPOS_MIN;
use crate::error::{Error, Result};
use crate::funcspace::{node, GridFunction, JetSource};
use crate::polyengine::{compiled_r_family, inverse_derivative};
use crate::taylor::{faa_di_bruno, Taylor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manifold {
    Interval,
    Circle,
}

impl Manifold {
    pub fn name(self) -> &'static str {
        match self {
            Manifold::Interval => "interval",
            Manifold::Circle => "circle",
        }
    }
}

/// `Φ_k(f) = (φ_k(f), φ_{k-1}(f)(0), ..., φ_2(f)(0))`; `Φ_1 = φ_1`, `Φ_2 = φ_2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiCoords {
    pub order: usize,
    pub head: GridFunction,
    /// `(φ_{k-1}(0), ..., φ_2(0))`, empty for `k <= 2`.
    pub initial_values: Vec<f64>,
}

impl PhiCoords {
    /// Sup norm on `C[0,1] ⊕ R^{k-2}`: the max of the head's sup norm and the
    /// largest initial value. The head's sup is taken on the refined sample set.
    pub fn norm(&self) -> f64 {
        self.initial_values
            .iter()
            .fold(self.head.refined_sup_norm(), |m, v| m.max(v.abs()))
    }

    pub fn distance(&self, other: &PhiCoords) -> Result<f64> {
        if self.order != other.order {
            return Err(Error::Shape(format!(
                "coordinates of order {} and {}",
                self.order, other.order
            )));
        }
        let head = self.head.sub(&other.head)?.refined_sup_norm();
        Ok(self
            .initial_values
            .iter()
            .zip(&other.initial_values)
            .fold(head, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn scale(&self, s: f64) -> PhiCoords {
        PhiCoords {
            order: self.order,
            head: self.head.scale(s),
            initial_values: self.initial_values.iter().map(|v| v * s).collect(),
        }
    }

    /// Recover `φ_1` by integrating the head back up through the stored initial
    /// values. Each integration adds one derivative row.
    pub fn to_phi1(&self) -> Result<GridFunction> {
        match self.order {
            0 => Err(Error::Domain("coordinates of order 0".into())),
            1 => Ok(self.head.clone()),
            _ => {
                let mut g = self.head.clone();
                for c in &self.initial_values {
                    g = g.antiderivative(*c)?;
                }
                g.antiderivative(0.0)
            }
        }
    }
}

/// Common interface of [`crate::IntervalDiffeo`] and [`crate::CircleDiffeo`].
pub trait Diffeomorphism: Clone + Sized + Send + Sync {
    const MANIFOLD: Manifold;

    fn order(&self) -> usize;

    /// Jet grid: values and derivative rows `1..=order` (the lift for circles).
    fn jets(&self) -> &GridFunction;

    fn identity(order: usize, n: usize) -> Self;

    /// `self ∘ inner`.
    fn compose(&self, inner: &Self) -> Result<Self>;

    fn invert(&self) -> Result<Self>;

    /// `Φ_k^{-1}` (for circles: the stabilizer element with these coordinates).
    fn from_phi_coords(coords: &PhiCoords, order: usize) -> Result<Self>;

    /// Distance between two image points (`|a - b|` or the chordal distance).
    fn point_distance(a: f64, b: f64) -> f64;

    fn n(&self) -> usize {
        self.jets().n()
    }

    fn phi(&self, j: usize) -> Result<GridFunction> {
        phi_from_grid(self.jets(), self.order(), j)
    }

    fn phi_coords(&self, k: usize) -> Result<PhiCoords> {
        phi_coords_from_grid(self.jets(), self.order(), k)
    }

    /// `d_k(f, g) = ‖Φ_k(f) - Φ_k(g)‖`.
    fn dk(&self, other: &Self, k: usize) -> Result<f64> {
        check_same_grid(self.jets(), other.jets())?;
        self.phi_coords(k)?.distance(&other.phi_coords(k)?)
    }

    /// `ρ_k(f, g) = sup d(f(x), g(x)) + Σ_{j=1..k} ‖f^(j) - g^(j)‖`, node-wise.
    fn rho(&self, other: &Self, k: usize) -> Result<f64> {
        check_same_grid(self.jets(), other.jets())?;
        if k > self.order() || k > other.order() {
            return Err(Error::Domain(format!(
                "rho_{k} needs order >= {k}, have {} and {}",
                self.order(),
                other.order()
            )));
        }
        let (a, b) = (self.jets(), other.jets());
        let c0 = a
            .values()
            .iter()
            .zip(b.values())
            .fold(0.0f64, |m, (x, y)| m.max(Self::point_distance(*x, *y)));
        Ok((1..=k).fold(c0, |acc, j| {
            acc + a
                .row(j)
                .iter()
                .zip(b.row(j))
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        }))
    }

    /// `d_k(e, f) = ‖Φ_k(f)‖`.
    fn dk_identity(&self, k: usize) -> Result<f64> {
        Ok(self.phi_coords(k)?.norm())
    }
}

pub(crate) fn check_same_grid(a: &GridFunction, b: &GridFunction) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::Shape(format!("grid sizes {} and {}", a.n(), b.n())));
    }
    Ok(())
}

/// Rows `L_0..L_{order-1}` of `log f'` and its derivatives, from exact jets.
pub(crate) fn log_derivative_rows(grid: &GridFunction, order: usize) -> Vec<Vec<f64>> {
    let n = grid.n();
    let mut rows = vec![vec![0.0; n + 1]; order];
    for i in 0..=n {
        let fp: Vec<f64> = (1..=order).map(|m| grid.row(m)[i]).collect();
        let l = Taylor::from_derivs(&fp).ln().to_derivs();
        for (m, v) in l.into_iter().enumerate() {
            rows[m][i] = v;
        }
    }
    rows
}

/// `φ_j` with derivative samples up to order `order - j`.
pub(crate) fn phi_from_grid(grid: &GridFunction, order: usize, j: usize) -> Result<GridFunction> {
    if j == 0 || j > order {
        return Err(Error::Domain(format!("phi_{j} needs 1 <= j <= order = {order}")));
    }
    let mut rows = log_derivative_rows(grid, order);
    if j == 1 {
        let l0 = rows[0][0];
        for v in rows[0].iter_mut() {
            *v -= l0;
        }
        rows[0][0] = 0.0;
    }
    let mut rows: Vec<Vec<f64>> = rows.drain(j - 1..).collect();
    let values = rows.remove(0);
    GridFunction::with_derivs(grid.n(), values, rows)
}

pub(crate) fn phi_coords_from_grid(grid: &GridFunction, order: usize, k: usize) -> Result<PhiCoords> {
    if k == 0 || k > order {
        return Err(Error::Domain(format!("Phi_{k} needs 1 <= k <= order = {order}")));
    }
    let head = phi_from_grid(grid, order, k)?;
    let initial_values = if k <= 2 {
        Vec::new()
    } else {
        let rows = log_derivative_rows(grid, order);
        // φ_m(0) = L_{m-1}(0) for m = k-1 down to 2
        (2..k).rev().map(|m| rows[m - 1][0]).collect()
    };
    Ok(PhiCoords {
        order: k,
        head,
        initial_values,
    })
}

/// Derivative rows of `x -> (1/C) ∫_0^x exp(F)`, for `F` supplied with at
/// least `order - 1` derivative rows. Row 0 runs from 0 to 1 exactly.
pub(crate) fn integrate_exp_rows(source: &impl JetSource, n: usize, order: usize) -> Result<Vec<Vec<f64>>> {
    if order == 0 {
        return Err(Error::Domain("diffeomorphisms need order >= 1".into()));
    }
    let avail = source.available_order();
    if avail < order - 1 {
        return Err(Error::Domain(format!(
            "phi_1 carries {avail} derivative rows, order {order} needs {}",
            order - 1
        )));
    }
    let q = (order - 1).max(avail.min(2));
    let f_rows = source.node_rows(n, q)?;
    let mut u_rows = vec![vec![0.0; n + 1]; q + 1];
    for i in 0..=n {
        let jet: Vec<f64> = f_rows.iter().map(|r| r[i]).collect();
        let u = Taylor::from_derivs(&jet).exp().to_derivs();
        for (m, v) in u.into_iter().enumerate() {
            u_rows[m][i] = v;
        }
    }
    let mut rows_iter = u_rows.into_iter();
    let u_vals = rows_iter.next().expect("value row");
    let u = GridFunction::with_derivs(n, u_vals, rows_iter.collect())?;
    let cum = u.antiderivative(0.0)?;
    let c = cum.values()[n];
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Construction(format!("normalizing integral {c} not positive")));
    }
    let mut values: Vec<f64> = cum.values().iter().map(|v| v / c).collect();
    values[0] = 0.0;
    values[n] = 1.0;
    let mut out = vec![values];
    for m in 0..order {
        out.push(u.row(m).iter().map(|v| v / c).collect());
    }
    Ok(out)
}

/// Check positivity of the first derivative and strict monotonicity.
pub(crate) fn check_monotone(grid: &GridFunction) -> Result<()> {
    if grid.deriv_order() >= 1 {
        if let Some(i) = grid.row(1).iter().position(|d| !(*d >= DPOS_MIN)) {
            return Err(Error::Invariant(format!(
                "first derivative {} below {DPOS_MIN} at node {i}",
                grid.row(1)[i]
            )));
        }
    }
    if let Some(i) = grid.values().windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::Invariant(format!("values not increasing at node {i}")));
    }
    Ok(())
}

/// Jets of `outer ∘ inner` at every node. `outer_at(y)` returns the outer
/// derivatives `0..=order` at `y`; the value row is returned unadjusted.
pub(crate) fn compose_rows(
    outer_at: impl Fn(f64) -> Vec<f64>,
    inner: &GridFunction,
    order: usize,
) -> Vec<Vec<f64>> {
    let n = inner.n();
    let mut rows = vec![vec![0.0; n + 1]; order + 1];
    for i in 0..=n {
        let jet = inner.node_jet(i);
        let outer = outer_at(jet[0]);
        let c = faa_di_bruno(&outer[..=order], &jet[..=order]);
        for (m, v) in c.into_iter().enumerate() {
            rows[m][i] = v;
        }
    }
    rows
}

/// Hybrid Newton / bisection for an increasing function on `[lo, hi]`.
/// `f` returns `(value, derivative)`.
pub(crate) fn solve_increasing(
    f: impl Fn(f64) -> (f64, f64),
    target: f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo - target > tol || target - fhi > tol {
        return Err(Error::Root(format!(
            "target {target} not bracketed by [{flo}, {fhi}]"
        )));
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (v, d) = f(x);
        let r = v - target;
        if r.abs() <= tol {
            return Ok(x);
        }
        if r < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            return Ok(x);
        }
        let newton = x - r / d;
        x = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok(x)
}

/// Solve `f(y) = target` for the increasing function sampled on `grid`,
/// searching the panel whose node values bracket the target.
pub(crate) fn grid_root(grid: &GridFunction, target: f64, tol: f64) -> Result<f64> {
    let n = grid.n();
    let vals = grid.values();
    let idx = vals.partition_point(|v| *v < target);
    if idx <= n && vals[idx] == target {
        return Ok(node(idx, n));
    }
    if idx == 0 || idx > n {
        return Err(Error::Root(format!(
            "target {target} outside [{}, {}]",
            vals[0], vals[n]
        )));
    }
    solve_increasing(
        |y| (grid.interp_row(0, y), grid.interp_row(1, y)),
        target,
        node(idx - 1, n),
        node(idx, n),
        tol,
    )
}

/// Jets of an inverse function from the roots `y_i` and the outer jets there:
/// `(f^{-1})^(j)(x_i) = R_j(f'(y_i), ...) / f'(y_i)^{2j-1}`.
pub(crate) fn inverse_rows(
    roots: &[f64],
    outer_at: impl Fn(f64) -> Vec<f64>,
    order: usize,
) -> Result<Vec<Vec<f64>>> {
    let rs = compiled_r_family(order)?;
    let n = roots.len() - 1;
    let mut rows = vec![vec![0.0; n + 1]; order + 1];
    for (i, y) in roots.iter().enumerate() {
        rows[0][i] = *y;
        let d = outer_at(*y);
        for j in 1..=order {
            rows[j][i] = inverse_derivative(&rs[j - 1], j, &d[1..]);
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyTag {
    pub name: String,
    pub params: Vec<f64>,
}

/// File form shared by both manifolds:
/// `{"manifold": ..., "order": k, "n": N, "jets": [[f, f', ...], ...], "family": ...}`.
#[derive(Serialize, Deserialize)]
pub(crate) struct JetFileWire {
    pub manifold: String,
    pub order: usize,
    pub n: usize,
    pub jets: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyTag>,
}

impl JetFileWire {
    pub fn from_grid(m: Manifold, order: usize, grid: &GridFunction, family: Option<FamilyTag>) -> Self {
        JetFileWire {
            manifold: m.name().to_string(),
            order,
            n: grid.n(),
            jets: (0..=grid.n()).map(|i| grid.node_jet(i)).collect(),
            family,
        }
    }

    pub fn into_grid(self, expect: Manifold) -> Result<(usize, GridFunction, Option<FamilyTag>)> {
        if self.manifold != expect.name() {
            return Err(Error::Shape(format!(
                "expected manifold {}, found {}",
                expect.name(),
                self.manifold
            )));
        }
        if self.jets.len() != self.n + 1 {
            return Err(Error::Shape(format!(
                "{} jets for N = {}",
                self.jets.len(),
                self.n
            )));
        }
        let mut rows = vec![Vec::with_capacity(self.n + 1); self.order + 1];
        for (i, jet) in self.jets.iter().enumerate() {
            if jet.len() != self.order + 1 {
                return Err(Error::Shape(format!(
                    "jet {i} has {} entries, order {} needs {}",
                    jet.len(),
                    self.order,
                    self.order + 1
                )));
            }
            for (m, v) in jet.iter().enumerate() {
                rows[m].push(*v);
            }
        }
        let values = rows.remove(0);
        let grid = GridFunction::with_derivs(self.n, values, rows)?;
        Ok((self.order, grid, self.family))
    }
}

pub(crate) fn nodes(n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| node(i, n))
}

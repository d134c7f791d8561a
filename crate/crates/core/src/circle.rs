//! Orientation-preserving `C^k` diffeomorphisms of the circle `R/Z`, stored
//! through their normalized lifts on `[0, 1]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::config::{TOL_EXACT, TOL_NUM, TOL_ROOT};
use crate::diffeo::{
    check_monotone, check_same_grid, compose_rows, grid_root, integrate_exp_rows, inverse_rows,
    nodes, Diffeomorphism, FamilyTag, JetFileWire, Manifold, PhiCoords,
};
use crate::error::{Error, Result};
use crate::funcspace::{refined_points, GridFunction, JetSource};

/// Reduce a real to its representative in `[0, 1)`.
pub fn wrap01(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 || 1.0 - r < 4.0 * f64::EPSILON {
        0.0
    } else {
        r
    }
}

/// Chordal distance `|e^{2πix} - e^{2πiy}|`.
pub fn circle_distance(x: f64, y: f64) -> f64 {
    2.0 * (PI * (x - y)).sin().abs()
}

/// Closed-form circle families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircleFamily {
    Rotation { t: f64 },
    /// Lift with derivative `1 + a cos(2π(x - c))` followed by the rotation by
    /// `t`; `|a| < 1`.
    Cosine { a: f64, c: f64, t: f64 },
}

impl CircleFamily {
    pub fn parse(name: &str, params: &[f64]) -> Result<Self> {
        match (name, params) {
            ("rotation", [t]) => Ok(CircleFamily::Rotation { t: *t }),
            ("cosine", [a]) => Ok(CircleFamily::Cosine { a: *a, c: 0.0, t: 0.0 }),
            ("cosine", [a, c]) => Ok(CircleFamily::Cosine { a: *a, c: *c, t: 0.0 }),
            ("cosine", [a, c, t]) => Ok(CircleFamily::Cosine { a: *a, c: *c, t: *t }),
            ("rotation" | "cosine", _) => Err(Error::Domain(format!(
                "family {name} got {} parameter(s)",
                params.len()
            ))),
            _ => Err(Error::Domain(format!("unknown circle family {name}"))),
        }
    }

    pub fn tag(&self) -> FamilyTag {
        let (name, params) = match *self {
            CircleFamily::Rotation { t } => ("rotation", vec![t]),
            CircleFamily::Cosine { a, c, t } => ("cosine", vec![a, c, t]),
        };
        FamilyTag {
            name: name.into(),
            params,
        }
    }

    /// Jet of the (unnormalized) lift at `x`.
    pub fn jet(&self, x: f64, k: usize) -> Result<Vec<f64>> {
        let mut j = vec![0.0; k + 1];
        match *self {
            CircleFamily::Rotation { t } => {
                j[0] = x + t;
                if k >= 1 {
                    j[1] = 1.0;
                }
            }
            CircleFamily::Cosine { a, c, t } => {
                if !(a.abs() < 1.0) {
                    return Err(Error::Construction(format!("cosine amplitude {a} needs |a| < 1")));
                }
                let w = 2.0 * PI;
                let th = w * (x - c);
                j[0] = x + t + a / w * (th.sin() + (w * c).sin());
                if k >= 1 {
                    j[1] = 1.0 + a * th.cos();
                }
                // d^m/dx^m cos(th) = w^m cos(th + mπ/2)
                let mut p = a;
                for (m, v) in j.iter_mut().enumerate().skip(2) {
                    p *= w;
                    *v = p * (th + (m - 1) as f64 * PI / 2.0).cos();
                }
            }
        }
        Ok(j)
    }
}

/// A circle diffeomorphism given by jets of its lift `f̃` at the nodes `i / N`,
/// normalized so that `f̃(0) ∈ [0, 1)` and `f̃(1) = f̃(0) + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleDiffeo {
    order: usize,
    grid: GridFunction,
    family: Option<FamilyTag>,
}

impl CircleDiffeo {
    /// Validate and wrap a lift jet grid.
    pub fn from_grid(order: usize, grid: GridFunction, family: Option<FamilyTag>) -> Result<Self> {
        if order == 0 {
            return Err(Error::Domain("order must be at least 1".into()));
        }
        if grid.deriv_order() != order {
            return Err(Error::Shape(format!(
                "grid stores {} derivative rows, order is {order}",
                grid.deriv_order()
            )));
        }
        let n = grid.n();
        let (v0, v1) = (grid.values()[0], grid.values()[n]);
        if !(0.0..1.0).contains(&v0) || v1 != v0 + 1.0 {
            return Err(Error::Invariant(format!(
                "lift not normalized: f(0) = {v0}, f(1) = {v1}"
            )));
        }
        for m in 1..=order {
            let (a, b) = (grid.row(m)[0], grid.row(m)[n]);
            if (a - b).abs() > TOL_EXACT * (1.0 + a.abs()) {
                return Err(Error::Invariant(format!(
                    "derivative {m} not periodic: {a} at 0, {b} at 1"
                )));
            }
        }
        check_monotone(&grid)?;
        Ok(CircleDiffeo {
            order,
            grid,
            family,
        })
    }

    /// Shift the lift by an integer so that `f̃(0) ∈ [0, 1)`, then close it up.
    /// With `snap` the jets at 1 are overwritten by those at 0, which is only
    /// legitimate when periodicity holds mathematically and the gap is roundoff.
    fn from_rows(order: usize, n: usize, mut rows: Vec<Vec<f64>>, snap: bool, family: Option<FamilyTag>) -> Result<Self> {
        let v0 = rows[0][0];
        let w = wrap01(v0);
        let shift = (v0 - w).round();
        for v in rows[0].iter_mut() {
            *v -= shift;
        }
        rows[0][0] = w;
        rows[0][n] = rows[0][0] + 1.0;
        if snap {
            for row in rows.iter_mut().skip(1) {
                row[n] = row[0];
            }
        }
        let values = rows.remove(0);
        CircleDiffeo::from_grid(order, GridFunction::with_derivs(n, values, rows)?, family)
    }

    pub fn rotation(t: f64, k: usize, n: usize) -> Self {
        CircleDiffeo::from_family(CircleFamily::Rotation { t: wrap01(t) }, k, n)
            .expect("rotations satisfy every invariant")
    }

    pub fn from_family(family: CircleFamily, k: usize, n: usize) -> Result<Self> {
        let mut rows = vec![vec![0.0; n + 1]; k + 1];
        for (i, x) in nodes(n).enumerate() {
            for (m, v) in family.jet(x, k)?.into_iter().enumerate() {
                rows[m][i] = v;
            }
        }
        CircleDiffeo::from_rows(k, n, rows, true, Some(family.tag()))
            .map_err(|e| Error::Construction(format!("{family:?}: {e}")))
    }

    pub fn from_family_name(name: &str, params: &[f64], k: usize, n: usize) -> Result<Self> {
        CircleDiffeo::from_family(CircleFamily::parse(name, params)?, k, n)
    }

    /// `rotation(t) ∘ h`, where `h` fixes 0 and has `φ_1(h) = F`. `F` must
    /// vanish at both ends and have periodic derivatives up to order `k - 1`.
    pub fn circle_from(f: &impl JetSource, t: f64, k: usize, n: usize) -> Result<Self> {
        CircleDiffeo::circle_from_tol(f, t, k, n, TOL_EXACT, false)
    }

    fn circle_from_tol(f: &impl JetSource, t: f64, k: usize, n: usize, tol: f64, snap: bool) -> Result<Self> {
        let f_rows = f.node_rows(n, 0)?;
        let (f0, f1) = (f_rows[0][0], f_rows[0][n]);
        if f0.abs() > tol {
            return Err(Error::Domain(format!("phi_1 must vanish at 0, got {f0}")));
        }
        if f1.abs() > tol {
            return Err(Error::Domain(format!(
                "phi_1(1) = {f1}: the lift would not close up"
            )));
        }
        let mut rows = integrate_exp_rows(f, n, k)?;
        let t = wrap01(t);
        for v in rows[0].iter_mut() {
            *v += t;
        }
        CircleDiffeo::from_rows(k, n, rows, snap, None)
    }

    pub fn family(&self) -> Option<&FamilyTag> {
        self.family.as_ref()
    }

    /// `f̃(0)`, the image of the base point.
    pub fn offset(&self) -> f64 {
        self.grid.values()[0]
    }

    pub fn fixes_zero(&self) -> bool {
        self.offset() == 0.0
    }

    /// Jet of the lift at any real `x`, using `f̃(x + 1) = f̃(x) + 1`.
    pub fn lift_jet(&self, x: f64) -> Vec<f64> {
        let mut fl = x.floor();
        let mut r = x - fl;
        if r >= 1.0 {
            r = 0.0;
            fl += 1.0;
        }
        let mut j: Vec<f64> = (0..=self.order).map(|m| self.grid.interp_row(m, r)).collect();
        j[0] += fl;
        j
    }

    /// `f([x]) ∈ [0, 1)`.
    pub fn eval(&self, x: f64) -> f64 {
        wrap01(self.lift_jet(x)[0])
    }

    /// `(t, a*)` with `a = rotation(t) ∘ a*` and `a*` fixing 0.
    pub fn stabilizer_decompose(&self) -> (f64, CircleDiffeo) {
        let t = self.offset();
        let n = self.n();
        let mut values: Vec<f64> = self.grid.values().iter().map(|v| v - t).collect();
        values[0] = 0.0;
        values[n] = 1.0;
        let rows = (1..=self.order).map(|m| self.grid.row(m).to_vec()).collect();
        let grid = GridFunction::with_derivs(n, values, rows).expect("same shape");
        (
            t,
            CircleDiffeo {
                order: self.order,
                grid,
                family: None,
            },
        )
    }

    /// `rotation(t) ∘ self`, computed directly on the lift.
    pub fn rotate(&self, t: f64) -> Result<CircleDiffeo> {
        let mut rows: Vec<Vec<f64>> = (0..=self.order).map(|m| self.grid.row(m).to_vec()).collect();
        let t = wrap01(t);
        for v in rows[0].iter_mut() {
            *v += t;
        }
        CircleDiffeo::from_rows(self.order, self.n(), rows, false, None)
    }

    /// `σ_1(f, g) = sup_x d(f(x), g(x)) + ‖Φ_1(f) - Φ_1(g)‖`, with both sups
    /// over the nodes and the refined interior samples.
    pub fn sigma1(&self, other: &CircleDiffeo) -> Result<f64> {
        check_same_grid(&self.grid, &other.grid)?;
        let nodes = self
            .grid
            .values()
            .iter()
            .zip(other.grid.values())
            .fold(0.0f64, |m, (a, b)| m.max(circle_distance(*a, *b)));
        let chord = refined_points(self.n()).fold(nodes, |m, x| {
            m.max(circle_distance(self.grid.interp_row(0, x), other.grid.interp_row(0, x)))
        });
        Ok(chord + self.dk(other, 1)?)
    }

    /// Re-check every lift invariant; used by property sweeps.
    pub fn check_invariants(&self) -> Result<()> {
        CircleDiffeo::from_grid(self.order, self.grid.clone(), None).map(|_| ())
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order == 0 || order > self.order {
            return Err(Error::Domain(format!("cannot truncate order {} to {order}", self.order)));
        }
        let rows = (1..=order).map(|m| self.grid.row(m).to_vec()).collect();
        let grid = GridFunction::with_derivs(self.n(), self.grid.values().to_vec(), rows)?;
        Ok(CircleDiffeo {
            order,
            grid,
            family: self.family.clone(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: JetFileWire = serde_json::from_str(s)?;
        let (order, grid, family) = wire.into_grid(Manifold::Circle)?;
        CircleDiffeo::from_grid(order, grid, family)
    }
}

impl Serialize for CircleDiffeo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        JetFileWire::from_grid(Manifold::Circle, self.order, &self.grid, self.family.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CircleDiffeo {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = JetFileWire::deserialize(d)?;
        let (order, grid, family) = wire.into_grid(Manifold::Circle).map_err(serde::de::Error::custom)?;
        CircleDiffeo::from_grid(order, grid, family).map_err(serde::de::Error::custom)
    }
}

impl Diffeomorphism for CircleDiffeo {
    const MANIFOLD: Manifold = Manifold::Circle;

    fn order(&self) -> usize {
        self.order
    }

    fn jets(&self) -> &GridFunction {
        &self.grid
    }

    fn identity(order: usize, n: usize) -> Self {
        CircleDiffeo::rotation(0.0, order, n)
    }

    fn compose(&self, inner: &Self) -> Result<Self> {
        check_same_grid(&self.grid, &inner.grid)?;
        if self.order != inner.order {
            return Err(Error::Shape(format!("orders {} and {}", self.order, inner.order)));
        }
        let rows = compose_rows(|y| self.lift_jet(y), &inner.grid, self.order);
        CircleDiffeo::from_rows(self.order, self.n(), rows, true, None)
    }

    fn invert(&self) -> Result<Self> {
        let n = self.n();
        let k = self.order;
        let c = self.offset();
        // f̃ maps [0, 1] onto [c, c + 1]; targets below c are lifted by one and
        // the root shifted back, giving the inverse lift on [0, 1].
        let roots = nodes(n)
            .map(|x| {
                if x >= c {
                    grid_root(&self.grid, x, TOL_ROOT)
                } else {
                    grid_root(&self.grid, x + 1.0, TOL_ROOT).map(|y| y - 1.0)
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        let rows = inverse_rows(&roots, |y| self.lift_jet(y), k)?;
        CircleDiffeo::from_rows(k, n, rows, true, None)
    }

    /// The stabilizer element with the given coordinates. `φ_1(1)` is allowed
    /// to miss 0 by quadrature error.
    fn from_phi_coords(coords: &PhiCoords, order: usize) -> Result<Self> {
        let phi1 = coords.to_phi1()?;
        CircleDiffeo::circle_from_tol(&phi1, 0.0, order, phi1.n(), TOL_NUM, true)
    }

    fn point_distance(a: f64, b: f64) -> f64 {
        circle_distance(a, b)
    }
}

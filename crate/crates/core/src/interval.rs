//! Orientation-preserving `C^k` diffeomorphisms of `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::config::{TOL_EXACT, TOL_ROOT};
use crate::diffeo::{
    check_monotone, check_same_grid, compose_rows, grid_root, integrate_exp_rows, inverse_rows,
    nodes, Diffeomorphism, FamilyTag, JetFileWire, Manifold, PhiCoords,
};
use crate::error::{Error, Result};
use crate::funcspace::{GridFunction, JetSource, SmoothFunction};

/// Closed-form interval families with exact jets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntervalFamily {
    Identity,
    /// `(e^{ax} - 1) / (e^a - 1)`; `a = 0` is the identity.
    Exp { a: f64 },
    /// `(1 + t) x / (1 + t x)`, `t > -1`; `t = 0` is the identity.
    Mobius { t: f64 },
    /// `log(1 + (e^a - 1) y) / a`, the inverse of `Exp { a }`.
    ExpInverse { a: f64 },
}

impl IntervalFamily {
    pub fn parse(name: &str, params: &[f64]) -> Result<Self> {
        let need = |k: usize| -> Result<()> {
            if params.len() != k {
                return Err(Error::Domain(format!(
                    "family {name} takes {k} parameter(s), got {}",
                    params.len()
                )));
            }
            Ok(())
        };
        match name {
            "identity" => {
                need(0)?;
                Ok(IntervalFamily::Identity)
            }
            "exp" => {
                need(1)?;
                Ok(IntervalFamily::Exp { a: params[0] })
            }
            "mobius" => {
                need(1)?;
                Ok(IntervalFamily::Mobius { t: params[0] })
            }
            "exp_inverse" => {
                need(1)?;
                Ok(IntervalFamily::ExpInverse { a: params[0] })
            }
            other => Err(Error::Domain(format!("unknown interval family {other}"))),
        }
    }

    pub fn tag(&self) -> FamilyTag {
        let (name, params) = match *self {
            IntervalFamily::Identity => ("identity", vec![]),
            IntervalFamily::Exp { a } => ("exp", vec![a]),
            IntervalFamily::Mobius { t } => ("mobius", vec![t]),
            IntervalFamily::ExpInverse { a } => ("exp_inverse", vec![a]),
        };
        FamilyTag {
            name: name.into(),
            params,
        }
    }

    /// `[f(x), f'(x), ..., f^(k)(x)]` in closed form.
    pub fn jet(&self, x: f64, k: usize) -> Result<Vec<f64>> {
        let mut j = vec![0.0; k + 1];
        match *self {
            IntervalFamily::Identity => identity_jet(&mut j, x),
            IntervalFamily::Exp { a } if a == 0.0 => identity_jet(&mut j, x),
            IntervalFamily::Exp { a } => {
                let c = a.exp_m1();
                j[0] = (a * x).exp_m1() / c;
                let e = (a * x).exp() / c;
                let mut p = 1.0;
                for v in j.iter_mut().skip(1) {
                    p *= a;
                    *v = p * e;
                }
            }
            IntervalFamily::Mobius { t } => {
                if !(t > -1.0) {
                    return Err(Error::Construction(format!(
                        "mobius parameter t = {t} must exceed -1"
                    )));
                }
                if t == 0.0 {
                    identity_jet(&mut j, x);
                } else {
                    let q = 1.0 + t * x;
                    j[0] = (1.0 + t) * x / q;
                    // f^(m) = (1+t) (-1)^{m-1} m! t^{m-1} / q^{m+1}
                    let mut c = (1.0 + t) / (q * q);
                    for (m, v) in j.iter_mut().enumerate().skip(1) {
                        *v = c;
                        c *= -(m as f64 + 1.0) * t / q;
                    }
                }
            }
            IntervalFamily::ExpInverse { a } if a == 0.0 => identity_jet(&mut j, x),
            IntervalFamily::ExpInverse { a } => {
                let c = a.exp_m1();
                let q = 1.0 + c * x;
                j[0] = (c * x).ln_1p() / a;
                // g^(m) = (1/a) (-1)^{m-1} (m-1)! c^m / q^m
                let mut v = c / (a * q);
                for (m, slot) in j.iter_mut().enumerate().skip(1) {
                    *slot = v;
                    v *= -(m as f64) * c / q;
                }
            }
        }
        Ok(j)
    }
}

fn identity_jet(j: &mut [f64], x: f64) {
    j[0] = x;
    if j.len() > 1 {
        j[1] = 1.0;
    }
}

/// A jet grid `(f, f', ..., f^(k))` at the nodes `i / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalDiffeo {
    order: usize,
    grid: GridFunction,
    family: Option<FamilyTag>,
}

impl IntervalDiffeo {
    /// Validate and wrap a jet grid. `grid` must carry exactly `order`
    /// derivative rows.
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
        if grid.values()[0] != 0.0 || grid.values()[n] != 1.0 {
            return Err(Error::Invariant(format!(
                "endpoints must be fixed exactly, got f(0) = {}, f(1) = {}",
                grid.values()[0],
                grid.values()[n]
            )));
        }
        check_monotone(&grid)?;
        Ok(IntervalDiffeo {
            order,
            grid,
            family,
        })
    }

    fn from_rows(order: usize, n: usize, mut rows: Vec<Vec<f64>>, family: Option<FamilyTag>) -> Result<Self> {
        rows[0][0] = 0.0;
        rows[0][n] = 1.0;
        let values = rows.remove(0);
        IntervalDiffeo::from_grid(order, GridFunction::with_derivs(n, values, rows)?, family)
    }

    pub fn from_family(family: IntervalFamily, k: usize, n: usize) -> Result<Self> {
        let mut rows = vec![vec![0.0; n + 1]; k + 1];
        for (i, x) in nodes(n).enumerate() {
            for (m, v) in family.jet(x, k)?.into_iter().enumerate() {
                rows[m][i] = v;
            }
        }
        IntervalDiffeo::from_rows(k, n, rows, Some(family.tag()))
            .map_err(|e| Error::Construction(format!("{:?}: {e}", family)))
    }

    pub fn from_family_name(name: &str, params: &[f64], k: usize, n: usize) -> Result<Self> {
        IntervalDiffeo::from_family(IntervalFamily::parse(name, params)?, k, n)
    }

    /// Sample a closed-form diffeomorphism; the endpoint values must be within
    /// `TOL_EXACT` of 0 and 1 and are then fixed exactly.
    pub fn from_smooth(f: &SmoothFunction, k: usize, n: usize) -> Result<Self> {
        let rows = f.node_rows(n, k)?;
        if rows[0][0].abs() > TOL_EXACT || (rows[0][n] - 1.0).abs() > TOL_EXACT {
            return Err(Error::Construction("function does not fix the endpoints".into()));
        }
        IntervalDiffeo::from_rows(k, n, rows, None)
    }

    /// `Φ_1^{-1}(F)(x) = (1/C) ∫_0^x exp F`, `C = ∫_0^1 exp F`. `F` must vanish
    /// at 0 and carry at least `k - 1` derivative rows.
    pub fn from_phi1(f: &impl JetSource, k: usize, n: usize) -> Result<Self> {
        let f0 = f.node_rows(n, 0)?[0][0];
        if f0.abs() > TOL_EXACT {
            return Err(Error::Domain(format!("phi_1 must vanish at 0, got {f0}")));
        }
        let rows = integrate_exp_rows(f, n, k)?;
        IntervalDiffeo::from_rows(k, n, rows, None)
    }

    pub fn family(&self) -> Option<&FamilyTag> {
        self.family.as_ref()
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.grid.eval(x)
    }

    pub fn eval_jet(&self, x: f64) -> Result<Vec<f64>> {
        self.grid.eval_jet(x, self.order)
    }

    /// Lower the order by dropping the top derivative rows.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order == 0 || order > self.order {
            return Err(Error::Domain(format!("cannot truncate order {} to {order}", self.order)));
        }
        let rows: Vec<Vec<f64>> = (1..=order).map(|m| self.grid.row(m).to_vec()).collect();
        let grid = GridFunction::with_derivs(self.n(), self.grid.values().to_vec(), rows)?;
        Ok(IntervalDiffeo {
            order,
            grid,
            family: self.family.clone(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&JetFileWire::from_grid(
            Manifold::Interval,
            self.order,
            &self.grid,
            self.family.clone(),
        ))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: JetFileWire = serde_json::from_str(s)?;
        let (order, grid, family) = wire.into_grid(Manifold::Interval)?;
        IntervalDiffeo::from_grid(order, grid, family)
    }
}

impl Serialize for IntervalDiffeo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        JetFileWire::from_grid(Manifold::Interval, self.order, &self.grid, self.family.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntervalDiffeo {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = JetFileWire::deserialize(d)?;
        let (order, grid, family) = wire.into_grid(Manifold::Interval).map_err(serde::de::Error::custom)?;
        IntervalDiffeo::from_grid(order, grid, family).map_err(serde::de::Error::custom)
    }
}

impl Diffeomorphism for IntervalDiffeo {
    const MANIFOLD: Manifold = Manifold::Interval;

    fn order(&self) -> usize {
        self.order
    }

    fn jets(&self) -> &GridFunction {
        &self.grid
    }

    fn identity(order: usize, n: usize) -> Self {
        IntervalDiffeo::from_family(IntervalFamily::Identity, order, n)
            .expect("identity satisfies every invariant")
    }

    fn compose(&self, inner: &Self) -> Result<Self> {
        check_same_grid(&self.grid, &inner.grid)?;
        if self.order != inner.order {
            return Err(Error::Shape(format!("orders {} and {}", self.order, inner.order)));
        }
        let k = self.order;
        let rows = compose_rows(
            |y| {
                let y = y.clamp(0.0, 1.0);
                (0..=k).map(|m| self.grid.interp_row(m, y)).collect()
            },
            &inner.grid,
            k,
        );
        IntervalDiffeo::from_rows(k, self.n(), rows, None)
    }

    fn invert(&self) -> Result<Self> {
        let n = self.n();
        let k = self.order;
        let roots = nodes(n)
            .map(|x| grid_root(&self.grid, x, TOL_ROOT))
            .collect::<Result<Vec<f64>>>()?;
        let rows = inverse_rows(
            &roots,
            |y| (0..=k).map(|m| self.grid.interp_row(m, y)).collect(),
            k,
        )?;
        IntervalDiffeo::from_rows(k, n, rows, None)
    }

    fn from_phi_coords(coords: &PhiCoords, order: usize) -> Result<Self> {
        let phi1 = coords.to_phi1()?;
        IntervalDiffeo::from_phi1(&phi1, order, phi1.n())
    }

    fn point_distance(a: f64, b: f64) -> f64 {
        (a - b).abs()
    }
}

//! Coarse-geometric constructions on the diffeomorphism groups: boundedness
//! reports, translation Lipschitz constants, ε-ball factorizations and
//! large-scale geodesic chains on the circle.

use rayon::prelude::*;
use serde::Serialize;

use crate::circle::CircleDiffeo;
use crate::diffeo::{Diffeomorphism, PhiCoords};
use crate::error::{Error, Result};
use crate::funcspace::sup_abs;
use crate::polyengine::{build_p, CompiledPoly, Var};

/// Doublings of `r` tried before a factorization gives up.
pub const MAX_DOUBLINGS: u32 = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObReport {
    pub k: usize,
    /// `sup |log f'|` over the family and all nodes.
    pub sup_log_deriv: f64,
    /// `sup |f^(j)|` for `j = 2..=k`.
    pub sup_higher: Vec<f64>,
    pub family_size: usize,
}

impl ObReport {
    /// Columns `j,sup`; row `j = 1` holds the log-derivative bound.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("j,sup\n");
        s.push_str(&format!("1,{:?}\n", self.sup_log_deriv));
        for (i, v) in self.sup_higher.iter().enumerate() {
            s.push_str(&format!("{},{:?}\n", i + 2, v));
        }
        s
    }
}

/// Node-wise bounds on `|log f'|` and `|f^(j)|` over a finite family.
pub fn ob_bounds<D: Diffeomorphism>(family: &[D], k: usize) -> Result<ObReport> {
    if family.is_empty() {
        return Err(Error::Domain("ob_bounds needs a non-empty family".into()));
    }
    if k == 0 {
        return Err(Error::Domain("ob_bounds needs k >= 1".into()));
    }
    if let Some(f) = family.iter().find(|f| f.order() < k) {
        return Err(Error::Domain(format!("member of order {} below k = {k}", f.order())));
    }
    let per: Vec<(f64, Vec<f64>)> = family
        .par_iter()
        .map(|f| {
            let g = f.jets();
            let log = g.row(1).iter().fold(0.0f64, |m, d| m.max(d.ln().abs()));
            let higher = (2..=k).map(|j| sup_abs(g.row(j))).collect();
            (log, higher)
        })
        .collect();
    let mut sup_higher = vec![0.0f64; k.saturating_sub(1)];
    let mut sup_log_deriv = 0.0f64;
    for (log, higher) in per {
        sup_log_deriv = sup_log_deriv.max(log);
        for (s, v) in sup_higher.iter_mut().zip(higher) {
            *s = s.max(v);
        }
    }
    Ok(ObReport {
        k,
        sup_log_deriv,
        sup_higher,
        family_size: family.len(),
    })
}

/// Per-element constant `L(h)` with `d_k(f h^{-1}, g h^{-1}) <= L(h) d_k(f, g)`.
///
/// Each `φ_m(f h^{-1}) - φ_m(g h^{-1})` expands as `Σ_j P^m_j(jets of h^{-1})`
/// times `[φ_{m-j+2}(f) - φ_{m-j+2}(g)] ∘ h^{-1}`, and `‖φ_i(f) - φ_i(g)‖` is at
/// most `(k - i + 1) d_k(f, g)`. Bounding the head (`m = k`, sup over nodes)
/// and each initial value (`m < k`, at the node 0) that way gives
/// `L(h) = max(Σ_j (j-1) sup|P^k_j|, max_m Σ_j (k-m+j-1) |P^m_j(0)|)`.
pub fn lipschitz_bound<D: Diffeomorphism>(h: &D, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!(
            "lipschitz_bound needs k >= 2 (d_1 is right-invariant), got {k}"
        )));
    }
    if h.order() < k {
        return Err(Error::Domain(format!("order {} below k = {k}", h.order())));
    }
    let inv = h.invert()?;
    let vars: Vec<Var> = (1..k as u32).map(Var::X).collect();
    let compiled = |m: usize| -> Result<Vec<CompiledPoly>> {
        build_p(m)?.iter().map(|p| p.compile(&vars)).collect()
    };
    let g = inv.jets();
    let jet_at = |i: usize| -> Vec<f64> { (1..k).map(|m| g.row(m)[i]).collect() };

    let pk = compiled(k)?;
    let mut head = 0.0;
    for (idx, p) in pk.iter().enumerate() {
        let j = idx + 2;
        let sup = (0..=g.n())
            .into_par_iter()
            .map(|i| p.eval(&jet_at(i)).abs())
            .reduce(|| 0.0f64, f64::max);
        head += (j - 1) as f64 * sup;
    }

    let at0 = jet_at(0);
    let mut init = 0.0f64;
    for m in 2..k {
        let s: f64 = compiled(m)?
            .iter()
            .enumerate()
            .map(|(idx, p)| (k - m + idx + 1) as f64 * p.eval(&at0).abs())
            .sum();
        init = init.max(s);
    }
    Ok(head.max(init))
}

#[derive(Debug, Clone)]
pub struct FactorizationResult<D> {
    pub order: usize,
    pub epsilon: f64,
    /// `g_1, ..., g_r`, with `f = g_r ∘ ... ∘ g_1`.
    pub factors: Vec<D>,
    /// `d_j(e, g_i)` in the same order as `factors`.
    pub radii: Vec<f64>,
    /// `ρ_j(g_r ∘ ... ∘ g_1, f)`.
    pub recomposition_error: f64,
    /// The first `r` tried.
    pub initial_r: usize,
    /// Number of doublings used.
    pub doublings: u32,
}

impl<D> FactorizationResult<D> {
    pub fn r(&self) -> usize {
        self.factors.len()
    }

    pub fn max_radius(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }

    /// Columns `i,radius`, with `i` starting at 1.
    pub fn radii_csv(&self) -> String {
        let mut s = String::from("i,radius\n");
        for (i, r) in self.radii.iter().enumerate() {
            s.push_str(&format!("{},{:?}\n", i + 1, r));
        }
        s
    }
}

/// `g_r ∘ ... ∘ g_1`.
pub fn recompose<D: Diffeomorphism>(factors: &[D]) -> Result<D> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::Domain("no factors".into()))?;
    rest.iter().try_fold(first.clone(), |acc, g| g.compose(&acc))
}

/// Write `f` as a product of elements in the `d_j`-ball of radius `epsilon`.
///
/// The path is `f_i = Φ_j^{-1}((i / r) Φ_j(f))` with `f_0 = e`, `f_r = f`, and
/// the factors are `g_i = f_i ∘ f_{i-1}^{-1}`. Circle inputs must fix 0; see
/// [`factor_circle`] for general elements.
pub fn factor_into_ball<D: Diffeomorphism>(f: &D, j: usize, epsilon: f64) -> Result<FactorizationResult<D>> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if j == 0 || j > f.order() {
        return Err(Error::Domain(format!("j = {j} outside 1..={}", f.order())));
    }
    if f.jets().values()[0] != 0.0 {
        return Err(Error::Domain(
            "circle element does not fix 0; decompose it first".into(),
        ));
    }
    let order = f.order();
    let n = f.n();
    let coords = f.phi_coords(j)?;
    let dist = coords.norm();
    let l_hat = if j == 1 { 1.0 } else { lipschitz_bound(f, j)?.max(1.0) };
    let initial_r = (l_hat * dist / epsilon).floor() as usize + 1;

    let mut r = initial_r;
    let mut last_radius = f64::INFINITY;
    for doublings in 0..=MAX_DOUBLINGS {
        let (factors, radii) = factor_path(f, &coords, order, n, j, r)?;
        let worst = radii.iter().copied().fold(0.0, f64::max);
        if worst < epsilon {
            let recomposition_error = recompose(&factors)?.rho(f, j)?;
            return Ok(FactorizationResult {
                order: j,
                epsilon,
                factors,
                radii,
                recomposition_error,
                initial_r,
                doublings,
            });
        }
        last_radius = worst;
        if doublings < MAX_DOUBLINGS {
            r *= 2;
        }
    }
    Err(Error::RetriesExhausted {
        radius: last_radius,
        epsilon,
        r,
    })
}

fn factor_path<D: Diffeomorphism>(
    f: &D,
    coords: &PhiCoords,
    order: usize,
    n: usize,
    j: usize,
    r: usize,
) -> Result<(Vec<D>, Vec<f64>)> {
    let path: Vec<D> = (0..=r)
        .into_par_iter()
        .map(|i| {
            if i == 0 {
                Ok(D::identity(order, n))
            } else if i == r {
                Ok(f.clone())
            } else {
                D::from_phi_coords(&coords.scale(i as f64 / r as f64), order)
            }
        })
        .collect::<Result<_>>()?;
    let factors: Vec<D> = (1..=r)
        .into_par_iter()
        .map(|i| path[i].compose(&path[i - 1].invert()?))
        .collect::<Result<_>>()?;
    let radii = factors
        .par_iter()
        .map(|g| g.dk_identity(j))
        .collect::<Result<_>>()?;
    Ok((factors, radii))
}

/// Factorization of a general circle element as `rotation(t) ∘ a*` with `a*`
/// in the stabilizer of 0 factored into the ball.
#[derive(Debug, Clone)]
pub struct CircleFactorization {
    pub rotation: f64,
    pub stabilizer: FactorizationResult<CircleDiffeo>,
    /// `ρ_j(rotation(t) ∘ g_r ∘ ... ∘ g_1, f)`.
    pub recomposition_error: f64,
}

pub fn factor_circle(f: &CircleDiffeo, j: usize, epsilon: f64) -> Result<CircleFactorization> {
    let (t, a_star) = f.stabilizer_decompose();
    let stabilizer = factor_into_ball(&a_star, j, epsilon)?;
    let recomposition_error = recompose(&stabilizer.factors)?.rotate(t)?.rho(f, j)?;
    Ok(CircleFactorization {
        rotation: t,
        stabilizer,
        recomposition_error,
    })
}

#[derive(Debug, Clone)]
pub struct ChainResult {
    /// `ℓ_0 = e, ..., ℓ_n`.
    pub nodes: Vec<CircleDiffeo>,
    /// `σ_1(ℓ_{i-1}, ℓ_i)` for `i = 1..=n`.
    pub step_costs: Vec<f64>,
    /// `σ_1(h_{i-1}, h_i)` along the stabilizer path.
    pub stabilizer_steps: Vec<f64>,
    pub total_cost: f64,
    /// `ρ_k(ℓ_n, f)`.
    pub endpoint_error: f64,
}

impl ChainResult {
    pub fn n(&self) -> usize {
        self.step_costs.len()
    }

    /// Columns `i,step_cost`, with `i` starting at 1.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("i,step_cost\n");
        for (i, c) in self.step_costs.iter().enumerate() {
            s.push_str(&format!("{},{:?}\n", i + 1, c));
        }
        s
    }
}

/// Chain from the identity to `f` whose steps are rotations by `t / n`
/// combined with equal steps along the linear path `(i / n) φ_1(h)` in the
/// stabilizer, where `f = rotation(t) ∘ h`. With `n = None` the length is
/// `ceil(σ_1(e, f) / 2)`.
pub fn geodesic_chain(f: &CircleDiffeo, n: Option<usize>) -> Result<ChainResult> {
    let order = f.order();
    let grid_n = f.n();
    let id = CircleDiffeo::identity(order, grid_n);
    let n = match n {
        Some(0) => return Err(Error::Domain("chain length must be positive".into())),
        Some(n) => n,
        None => (id.sigma1(f)? / 2.0).ceil() as usize,
    };
    if n == 0 {
        return Ok(ChainResult {
            nodes: vec![id],
            step_costs: vec![],
            stabilizer_steps: vec![],
            total_cost: 0.0,
            endpoint_error: f.rho(&CircleDiffeo::identity(order, grid_n), order)?,
        });
    }
    let (t, h) = f.stabilizer_decompose();
    let phi = h.phi_coords(1)?;
    let hs: Vec<CircleDiffeo> = (0..=n)
        .into_par_iter()
        .map(|i| {
            if i == 0 {
                Ok(id.clone())
            } else if i == n {
                Ok(h.clone())
            } else {
                CircleDiffeo::from_phi_coords(&phi.scale(i as f64 / n as f64), order)
            }
        })
        .collect::<Result<_>>()?;
    let nodes: Vec<CircleDiffeo> = hs
        .par_iter()
        .enumerate()
        .map(|(i, hi)| hi.rotate(i as f64 * t / n as f64))
        .collect::<Result<_>>()?;
    let step_costs: Vec<f64> = (1..=n)
        .into_par_iter()
        .map(|i| nodes[i - 1].sigma1(&nodes[i]))
        .collect::<Result<_>>()?;
    let stabilizer_steps: Vec<f64> = (1..=n)
        .into_par_iter()
        .map(|i| hs[i - 1].sigma1(&hs[i]))
        .collect::<Result<_>>()?;
    let total_cost = step_costs.iter().sum();
    let endpoint_error = nodes[n].rho(f, order)?;
    Ok(ChainResult {
        nodes,
        step_costs,
        stabilizer_steps,
        total_cost,
        endpoint_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbeddingRow {
    pub d1: f64,
    pub phi_norm: f64,
    pub difference: f64,
}

/// `d_1(f, g)` next to `‖Φ_1(f) - Φ_1(g)‖` for each pair.
pub fn embedding_report<D: Diffeomorphism>(pairs: &[(D, D)]) -> Result<Vec<EmbeddingRow>> {
    pairs
        .par_iter()
        .map(|(f, g)| {
            let d1 = f.dk(g, 1)?;
            let phi_norm = f.phi(1)?.sub(&g.phi(1)?)?.refined_sup_norm();
            Ok(EmbeddingRow {
                d1,
                phi_norm,
                difference: (d1 - phi_norm).abs(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferRow {
    pub delta: f64,
    /// Members with `d_k(f, e) <= delta`.
    pub count: usize,
    pub max_rho: f64,
    pub max_rho_inverse: f64,
}

/// For each `delta`, the largest `ρ_k(f, e)` and `ρ_k(f^{-1}, e)` over the
/// members inside the `d_k`-ball of radius `delta`.
pub fn boundedness_transfer<D: Diffeomorphism>(family: &[D], k: usize, deltas: &[f64]) -> Result<Vec<TransferRow>> {
    let stats: Vec<(f64, f64, f64)> = family
        .par_iter()
        .map(|f| {
            let id = D::identity(f.order(), f.n());
            Ok((f.dk_identity(k)?, f.rho(&id, k)?, f.invert()?.rho(&id, k)?))
        })
        .collect::<Result<_>>()?;
    Ok(deltas
        .iter()
        .map(|&delta| {
            let inside = stats.iter().filter(|s| s.0 <= delta);
            let (count, max_rho, max_rho_inverse) = inside.fold((0, 0.0f64, 0.0f64), |(c, a, b), s| {
                (c + 1, a.max(s.1), b.max(s.2))
            });
            TransferRow {
                delta,
                count,
                max_rho,
                max_rho_inverse,
            }
        })
        .collect())
}

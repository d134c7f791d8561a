//! Seeded verification suites. Each suite returns one [`Check`] per property
//! with the worst residual seen; a check passes when the residual is within
//! its tolerance.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{CircleDiffeo, CircleFamily};
use crate::config::{TOL_EXACT, TOL_NUM, TOL_ROOT};
use crate::diffeo::{solve_increasing, Diffeomorphism};
use crate::error::{Error, Result};
use crate::funcspace::{node, GridFunction, SmoothFunction};
use crate::geometry::{
    boundedness_transfer, embedding_report, factor_into_ball, geodesic_chain, lipschitz_bound,
};
use crate::interval::{IntervalDiffeo, IntervalFamily};
use crate::polyengine::{build_p, build_q, build_r, Var};
use crate::taylor::{faa_di_bruno, Taylor};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub kind: String,
    pub k: usize,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(kind: &str, k: usize, max_residual: f64, tolerance: f64) -> Self {
        Check {
            kind: kind.to_string(),
            k,
            max_residual,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// Columns `kind,k,max_residual`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,k,max_residual\n");
        for c in &self.checks {
            s.push_str(&format!("{},{},{:?}\n", c.kind, c.k, c.max_residual));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Interval,
    Circle,
    Geometry,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Identities, Suite::Interval, Suite::Circle, Suite::Geometry];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Suite::Identities),
            "interval" => Ok(Suite::Interval),
            "circle" => Ok(Suite::Circle),
            "geometry" => Ok(Suite::Geometry),
            other => Err(Error::Domain(format!("unknown suite {other}"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Identities => "identities",
            Suite::Interval => "interval",
            Suite::Circle => "circle",
            Suite::Geometry => "geometry",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub order: usize,
    pub n: usize,
    pub seed: u64,
    /// Random triples per sweep.
    pub samples: usize,
}

impl VerifyConfig {
    pub fn new(order: usize, n: usize, seed: u64) -> Self {
        VerifyConfig {
            order,
            n,
            seed,
            samples: 100,
        }
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    if cfg.order == 0 {
        return Err(Error::Domain("verify needs order >= 1".into()));
    }
    let checks = match suite {
        Suite::Identities => identities(cfg.order)?,
        Suite::Interval => interval_suite(cfg)?,
        Suite::Circle => circle_suite(cfg)?,
        Suite::Geometry => geometry_suite(cfg)?,
    };
    Ok(SuiteReport { suite, checks })
}

/// Closed-form interval families used by the sweeps, paired with their
/// inverses.
pub fn reference_families() -> Vec<(IntervalFamily, IntervalFamily)> {
    let mut out = Vec::new();
    for a in [-3.0, -1.0, 0.5, 2.0, 3.0] {
        out.push((IntervalFamily::Exp { a }, IntervalFamily::ExpInverse { a }));
    }
    for t in [-0.5, 0.5, 2.0] {
        out.push((IntervalFamily::Mobius { t }, IntervalFamily::Mobius { t: -t / (1.0 + t) }));
    }
    out
}

/// A random member of the exp or Möbius family.
pub fn random_interval_family(rng: &mut impl Rng) -> IntervalFamily {
    if rng.gen_bool(0.5) {
        IntervalFamily::Exp {
            a: rng.gen_range(-3.0..=3.0),
        }
    } else {
        IntervalFamily::Mobius {
            t: rng.gen_range(-0.5..=2.0),
        }
    }
}

/// A random member of the circle cosine family.
pub fn random_circle_family(rng: &mut impl Rng) -> CircleFamily {
    CircleFamily::Cosine {
        a: rng.gen_range(-0.6..=0.6),
        c: rng.gen_range(0.0..1.0),
        t: rng.gen_range(0.0..1.0),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

/// `[φ_2, ..., φ_k]` at a point from the jet `[f, f', ..., f^(k)]`.
fn phis_at(jet: &[f64]) -> Vec<f64> {
    let l = Taylor::from_derivs(&jet[1..]).ln().to_derivs();
    l[1..].to_vec()
}

fn sample_points() -> impl Iterator<Item = f64> {
    (0..=256).map(|i| node(i, 256))
}

/// Residuals of the `Q_k`, `R_k` and `P^k` identities on closed-form jets.
fn identities(order: usize) -> Result<Vec<Check>> {
    let fams = reference_families();
    let mut checks = Vec::new();
    for k in 2..=order {
        // Q_k(f', ..., f^(k-1), φ_2, ..., φ_k) = f^(k)
        let q_vars: Vec<Var> = (1..k as u32).map(Var::X).chain((2..=k as u32).map(Var::Y)).collect();
        let q = build_q(k)?.compile(&q_vars)?;
        let mut worst_q = 0.0f64;
        for (f, _) in &fams {
            for x in sample_points() {
                let jet = f.jet(x, k)?;
                let mut vals: Vec<f64> = jet[1..k].to_vec();
                vals.extend(phis_at(&jet));
                worst_q = worst_q.max(rel(q.eval(&vals), jet[k]));
            }
        }
        checks.push(Check::new("Q", k, worst_q, TOL_EXACT));

        // (f^{-1})^(k)(x) = R_k(f'(y), ...) / f'(y)^{2k-1} at the root y of f(y) = x
        let r_vars: Vec<Var> = (1..=k as u32).map(Var::X).collect();
        let r = build_r(k)?.compile(&r_vars)?;
        let mut worst_r = 0.0f64;
        for (f, finv) in &fams {
            for x in sample_points() {
                let y = solve_increasing(
                    |y| {
                        let j = f.jet(y, 1).expect("valid family");
                        (j[0], j[1])
                    },
                    x,
                    0.0,
                    1.0,
                    TOL_ROOT,
                )?;
                let jet = f.jet(y, k)?;
                let got = r.eval(&jet[1..]) / jet[1].powi(2 * k as i32 - 1);
                worst_r = worst_r.max(rel(got, finv.jet(x, k)?[k]));
            }
        }
        checks.push(Check::new("R", k, worst_r, TOL_NUM));

        // φ_k(f h^{-1}) = Σ_j P^k_j(h^{-1} jets) [φ_{k-j+2}(f) - φ_{k-j+2}(h)] ∘ h^{-1}
        let p_vars: Vec<Var> = (1..k as u32).map(Var::X).collect();
        let ps = build_p(k)?
            .iter()
            .map(|p| p.compile(&p_vars))
            .collect::<Result<Vec<_>>>()?;
        let mut worst_p = 0.0f64;
        for (f, _) in &fams {
            for (h, hinv) in &fams {
                for x in sample_points() {
                    let hi = hinv.jet(x, k)?;
                    let y = hi[0];
                    let fj = f.jet(y, k)?;
                    let hj = h.jet(y, k)?;
                    let direct = phis_at(&faa_di_bruno(&fj, &hi))[k - 2];
                    let (pf, ph) = (phis_at(&fj), phis_at(&hj));
                    let expansion: f64 = ps
                        .iter()
                        .enumerate()
                        .map(|(idx, p)| {
                            let m = k - idx; // φ index k - j + 2 with j = idx + 2
                            p.eval(&hi[1..k]) * (pf[m - 2] - ph[m - 2])
                        })
                        .sum();
                    worst_p = worst_p.max(rel(expansion, direct));
                }
            }
        }
        checks.push(Check::new("P", k, worst_p, TOL_NUM));
    }
    Ok(checks)
}

/// Largest `|a_j - b_j|` over nodes and rows `j <= k`, each row divided by
/// `1 + max sup|op_j|` over the operands that produced `a`. High derivatives
/// of inverses reach `1e7` on the families, so absolute `ρ_k` gaps there
/// measure cancellation in large terms rather than error in the result.
fn scaled_gap<D: Diffeomorphism>(a: &D, b: &D, k: usize, operands: &[&D]) -> f64 {
    let (ga, gb) = (a.jets(), b.jets());
    let mut worst = ga
        .values()
        .iter()
        .zip(gb.values())
        .fold(0.0f64, |m, (x, y)| m.max(D::point_distance(*x, *y)));
    for j in 1..=k {
        let scale = operands
            .iter()
            .fold(0.0f64, |m, op| m.max(crate::funcspace::sup_abs(op.jets().row(j))));
        let gap = ga
            .row(j)
            .iter()
            .zip(gb.row(j))
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        worst = worst.max(gap / (1.0 + scale));
    }
    worst
}

fn gen_intervals(rng: &mut ChaCha8Rng, count: usize, k: usize, n: usize) -> Result<Vec<IntervalDiffeo>> {
    let fams: Vec<IntervalFamily> = (0..count).map(|_| random_interval_family(rng)).collect();
    fams.par_iter().map(|f| IntervalDiffeo::from_family(*f, k, n)).collect()
}

fn gen_circles(rng: &mut ChaCha8Rng, count: usize, k: usize, n: usize) -> Result<Vec<CircleDiffeo>> {
    let fams: Vec<CircleFamily> = (0..count).map(|_| random_circle_family(rng)).collect();
    fams.par_iter().map(|f| CircleDiffeo::from_family(*f, k, n)).collect()
}

fn par_max(v: impl IntoParallelIterator<Item = Result<f64>>) -> Result<f64> {
    let all: Vec<f64> = v.into_par_iter().collect::<Result<_>>()?;
    Ok(all.into_iter().fold(0.0, f64::max))
}

fn interval_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let (k, n, s) = (cfg.order, cfg.n, cfg.samples);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let fs = gen_intervals(&mut rng, s, k, n)?;
    let gs = gen_intervals(&mut rng, s, k, n)?;
    let hs = gen_intervals(&mut rng, s, k, n)?;
    let id = IntervalDiffeo::identity(k, n);
    let idx: Vec<usize> = (0..s).collect();
    let mut checks = Vec::new();

    let right_inv = par_max(idx.par_iter().map(|&i| {
        let lhs = fs[i].compose(&hs[i])?.dk(&gs[i].compose(&hs[i])?, 1)?;
        Ok((lhs - fs[i].dk(&gs[i], 1)?).abs())
    }))?;
    checks.push(Check::new("d1_right_invariance", 1, right_inv, TOL_NUM));

    let cocycle = par_max(idx.par_iter().map(|&i| {
        let (f, h) = (&fs[i], &hs[i]);
        let hinv = h.invert()?;
        let lhs = f.compose(&hinv)?.phi(1)?;
        let diff = f.phi(1)?.sub(&h.phi(1)?)?;
        let mut worst = 0.0f64;
        for (j, y) in hinv.jets().values().iter().enumerate() {
            worst = worst.max((lhs.values()[j] - diff.eval(y.clamp(0.0, 1.0))?).abs());
        }
        Ok(worst)
    }))?;
    checks.push(Check::new("phi1_cocycle", 1, cocycle, TOL_NUM));

    let mut bound_violation = 0.0f64;
    let mut fprime0 = 0.0f64;
    for delta in [0.25f64, 0.5, 1.0, 2.0] {
        let (lo, hi) = ((-2.0 * delta).exp(), (2.0 * delta).exp());
        for f in &fs {
            if f.dk_identity(1)? >= delta {
                continue;
            }
            let finv = f.invert()?;
            for d in f.jets().row(1).iter().chain(finv.jets().row(1)) {
                bound_violation = bound_violation.max(lo - d).max(d - hi);
            }
        }
    }
    for f in &fs {
        let phi1 = f.phi(1)?;
        let e = GridFunction::new(n, phi1.values().iter().map(|v| v.exp()).collect())?;
        let c = e.antiderivative(0.0)?.values()[n];
        fprime0 = fprime0.max((f.jets().row(1)[0] - 1.0 / c).abs());
    }
    checks.push(Check::new("derivative_bound", 1, bound_violation.max(0.0), TOL_NUM));
    checks.push(Check::new("fprime0_normalization", 1, fprime0, TOL_NUM));

    for kk in 2..=k {
        let v = par_max(fs.par_iter().map(|f| {
            Ok((f.dk_identity(kk - 1)? - 2.0 * f.dk_identity(kk)?).max(0.0))
        }))?;
        checks.push(Check::new("lipschitz_chain", kk, v, TOL_NUM));
    }

    let sym = par_max(idx.par_iter().map(|&i| Ok((fs[i].dk(&gs[i], k)? - gs[i].dk(&fs[i], k)?).abs())))?;
    checks.push(Check::new("dk_symmetry", k, sym, 0.0));
    let tri = par_max(idx.par_iter().map(|&i| {
        let (f, g, h) = (&fs[i], &gs[i], &hs[i]);
        Ok((f.dk(h, k)? - f.dk(g, k)? - g.dk(h, k)?).max(0.0))
    }))?;
    checks.push(Check::new("dk_triangle", k, tri, TOL_NUM));

    let few = s.min(20);
    let assoc = par_max(idx[..few].par_iter().map(|&i| {
        let (f, g, h) = (&fs[i], &gs[i], &hs[i]);
        let gh = g.compose(h)?;
        let left = f.compose(g)?.compose(h)?;
        let right = f.compose(&gh)?;
        Ok(scaled_gap(&left, &right, k, &[f, g, h, &gh]))
    }))?;
    checks.push(Check::new("associativity", k, assoc, TOL_NUM));
    let ident = par_max(idx[..few].par_iter().map(|&i| {
        let f = &fs[i];
        Ok(f.compose(&id)?.rho(f, k)?.max(id.compose(f)?.rho(f, k)?))
    }))?;
    checks.push(Check::new("identity_law", k, ident, TOL_NUM));
    let inverse = par_max(idx[..few].par_iter().map(|&i| {
        let f = &fs[i];
        let finv = f.invert()?;
        let a = scaled_gap(&f.compose(&finv)?, &id, k, &[f, &finv]);
        let b = scaled_gap(&finv.compose(f)?, &id, k, &[f, &finv]);
        Ok(a.max(b))
    }))?;
    checks.push(Check::new("inverse_law", k, inverse, TOL_NUM));

    let round = par_max(fs.par_iter().map(|f| {
        let back = IntervalDiffeo::from_phi1(&f.phi(1)?, k, n)?;
        back.rho(f, k)
    }))?;
    checks.push(Check::new("phi1_round_trip", k, round, TOL_NUM));
    let coeffs: Vec<(f64, f64)> = (0..few)
        .map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
        .collect();
    let reverse = par_max(coeffs.par_iter().map(|&(a, b)| {
        let big_f = SmoothFunction::from_expr(move |x| {
            let (s, _) = x.scale(std::f64::consts::PI).sin_cos();
            &x.scale(a) + &s.scale(b)
        });
        let f = IntervalDiffeo::from_phi1(&big_f, k, n)?;
        let want = GridFunction::from_smooth(&big_f, n, 0)?;
        Ok(f.phi(1)?.sub(&want)?.sup_norm())
    }))?;
    checks.push(Check::new("phi1_reverse_round_trip", k, reverse, TOL_NUM));
    Ok(checks)
}

fn circle_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let (k, n, s) = (cfg.order, cfg.n, cfg.samples);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();

    // products of up to three generators, each possibly inverted
    let gens = gen_circles(&mut rng, 16, k, n)?;
    let inverses = gens.par_iter().map(|g| g.invert()).collect::<Result<Vec<_>>>()?;
    let mut violations = 0usize;
    for _ in 0..1000 {
        let depth = rng.gen_range(1..=3);
        let mut acc: Option<CircleDiffeo> = None;
        for _ in 0..depth {
            let i = rng.gen_range(0..gens.len());
            let g = if rng.gen_bool(0.5) { &gens[i] } else { &inverses[i] };
            let step = match &acc {
                None => Ok(g.clone()),
                Some(a) if rng.gen_bool(0.5) => a.compose(g),
                Some(a) => g.compose(a),
            };
            acc = match step.and_then(|c| if rng.gen_bool(0.2) { c.invert() } else { Ok(c) }) {
                Ok(c) if c.check_invariants().is_ok() => Some(c),
                _ => {
                    violations += 1;
                    None
                }
            };
            if acc.is_none() {
                break;
            }
        }
    }
    checks.push(Check::new("lift_invariants", k, violations as f64, 0.0));

    let fs = gen_circles(&mut rng, s, k, n)?;
    let gs = gen_circles(&mut rng, s, k, n)?;
    let hs = gen_circles(&mut rng, s, k, n)?;
    let ts: Vec<f64> = (0..s).map(|_| rng.gen_range(0.0..1.0)).collect();
    let idx: Vec<usize> = (0..s).collect();

    let rot = par_max(idx.par_iter().map(|&i| {
        let sh = CircleDiffeo::rotation(ts[i], k, n).compose(&hs[i])?;
        Ok(sh.phi(1)?.sub(&hs[i].phi(1)?)?.sup_norm())
    }))?;
    checks.push(Check::new("phi1_rotation_invariance", 1, rot, TOL_EXACT));

    let right_inv = |stab: bool| {
        par_max(idx.par_iter().map(|&i| {
            let h = if stab { hs[i].stabilizer_decompose().1 } else { hs[i].clone() };
            let lhs = fs[i].compose(&h)?.sigma1(&gs[i].compose(&h)?)?;
            Ok((lhs - fs[i].sigma1(&gs[i])?).abs())
        }))
    };
    checks.push(Check::new("sigma1_right_invariance", 1, right_inv(false)?, TOL_NUM));
    checks.push(Check::new("sigma1_right_invariance_stabilizer", 1, right_inv(true)?, TOL_NUM));

    let sandwich = par_max(idx.par_iter().map(|&i| {
        let (f, g) = (fs[i].stabilizer_decompose().1, gs[i].stabilizer_decompose().1);
        let (sig, d1) = (f.sigma1(&g)?, f.dk(&g, 1)?);
        Ok((sig - 2.0 - d1).max(d1 - sig).max(0.0))
    }))?;
    checks.push(Check::new("sigma1_d1_sandwich", 1, sandwich, TOL_NUM));

    let shift = par_max(idx.par_iter().map(|&i| {
        let sh = CircleDiffeo::rotation(ts[i], k, n).compose(&hs[i])?;
        Ok((sh.sigma1(&hs[i])? - 2.0).max(0.0))
    }))?;
    checks.push(Check::new("sigma1_rotation_step", 1, shift, TOL_NUM));

    let star = par_max(fs.par_iter().map(|a| {
        let (_, a_star) = a.stabilizer_decompose();
        let mut worst = 0.0f64;
        for m in 1..=k {
            let (x, y) = (a.jets().row(m), a_star.jets().row(m));
            let sx = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            let sy = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            worst = worst.max((sx - sy).abs());
        }
        Ok(worst)
    }))?;
    checks.push(Check::new("stabilizer_derivatives", k, star, TOL_NUM));
    Ok(checks)
}

fn geometry_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let (k, n, s) = (cfg.order, cfg.n, cfg.samples);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();

    let targets = [
        IntervalFamily::Exp { a: 1.5 },
        IntervalFamily::Exp { a: -1.0 },
        IntervalFamily::Mobius { t: 1.0 },
    ];
    for j in 1..=k.min(3) {
        let mut recompose = 0.0f64;
        let mut radius_excess = f64::NEG_INFINITY;
        let mut first_try = 0.0f64;
        for fam in targets {
            let f = IntervalDiffeo::from_family(fam, k, n)?;
            for eps in [0.25, 0.5, 1.0] {
                let res = factor_into_ball(&f, j, eps)?;
                recompose = recompose.max(res.recomposition_error);
                radius_excess = radius_excess.max(res.max_radius() - eps);
                if j == 1 {
                    let predicted = (f.dk_identity(1)? / eps).floor() as usize + 1;
                    first_try = first_try.max((res.r() as f64 - predicted as f64).abs());
                }
            }
        }
        checks.push(Check::new("factor_recomposition", j, recompose, TOL_NUM));
        // strict inequality: any non-negative excess fails
        let excess = if radius_excess < 0.0 { 0.0 } else { 1.0 + radius_excess };
        checks.push(Check::new("factor_radius", j, excess, 0.0));
        if j == 1 {
            checks.push(Check::new("factor_first_try", 1, first_try, 0.0));
        }
    }

    for kk in [2usize, 3].into_iter().filter(|kk| *kk <= k) {
        let fs = gen_intervals(&mut rng, s, kk, n)?;
        let gs = gen_intervals(&mut rng, s, kk, n)?;
        let hs = gen_intervals(&mut rng, s, kk, n)?;
        let v = par_max((0..s).into_par_iter().map(|i| {
            let hinv = hs[i].invert()?;
            let lhs = fs[i].compose(&hinv)?.dk(&gs[i].compose(&hinv)?, kk)?;
            let l = lipschitz_bound(&hs[i], kk)?;
            Ok((lhs - l * fs[i].dk(&gs[i], kk)?).max(0.0))
        }))?;
        checks.push(Check::new("translation_lipschitz", kk, v, TOL_NUM));
    }

    let circles = gen_circles(&mut rng, 6, k, n)?;
    let mut endpoint = 0.0f64;
    let mut step = 0.0f64;
    let mut total = 0.0f64;
    for f in &circles {
        for len in [None, Some(3)] {
            let c = geodesic_chain(f, len)?;
            endpoint = endpoint.max(c.endpoint_error);
            for (cost, stab) in c.step_costs.iter().zip(&c.stabilizer_steps) {
                step = step.max(cost - 4.0 - stab);
            }
            let sig = CircleDiffeo::identity(k, n).sigma1(f)?;
            total = total.max(c.total_cost - 2.0 * sig - 10.0 * std::f64::consts::PI - 1e-3);
        }
    }
    checks.push(Check::new("chain_endpoint", k, endpoint, TOL_NUM));
    checks.push(Check::new("chain_step", 1, step.max(0.0), TOL_NUM));
    checks.push(Check::new("chain_total", 1, total.max(0.0), 0.0));

    let family = gen_intervals(&mut rng, 30, k, n)?;
    let deltas = [0.5, 1.0, 2.0];
    let mut transfer_bad = 0.0;
    for kk in 1..=k {
        let rows = boundedness_transfer(&family, kk, &deltas)?;
        let finite = rows.iter().all(|r| r.max_rho.is_finite() && r.max_rho_inverse.is_finite());
        let monotone = rows
            .windows(2)
            .all(|w| w[1].max_rho >= w[0].max_rho && w[1].max_rho_inverse >= w[0].max_rho_inverse);
        if !(finite && monotone) {
            transfer_bad += 1.0;
        }
    }
    checks.push(Check::new("boundedness_transfer", k, transfer_bad, 0.0));

    let pairs: Vec<(IntervalDiffeo, IntervalDiffeo)> =
        family.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect();
    let iso = embedding_report(&pairs)?
        .iter()
        .fold(0.0f64, |m, r| m.max(r.difference));
    checks.push(Check::new("phi1_isometry", 1, iso, 1e-10));
    Ok(checks)
}

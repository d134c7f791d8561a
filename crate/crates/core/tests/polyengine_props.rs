use std::collections::BTreeSet;

use diffgeo_core::polyengine::inverse_derivative;
use diffgeo_core::{build_q, build_r, IntervalFamily, Var};
use proptest::prelude::*;

#[test]
fn alphabets() {
    for k in 2..=6u32 {
        let q: BTreeSet<Var> = (1..k).map(Var::X).chain((2..=k).map(Var::Y)).collect();
        assert_eq!(build_q(k as usize).unwrap().used_vars(), q, "Q_{k}");
        // R_2 = -X2 never touches X1, so R_k is checked on its declared alphabet
        let r: BTreeSet<Var> = (1..=k).map(Var::X).collect();
        let rk = build_r(k as usize).unwrap();
        assert_eq!(rk.alphabet().collect::<BTreeSet<_>>(), r, "R_{k}");
        assert!(rk.used_vars().is_subset(&r));
    }
}

/// `[φ_2, ..., φ_k]` of the Möbius map `(1 + t) x / (1 + t x)`:
/// `log f' = log(1 + t) - 2 log(1 + t x)`, so
/// `φ_m = -2 (-1)^m (m - 2)! t^{m-1} / (1 + t x)^{m-1}`.
fn mobius_phis(t: f64, x: f64, k: usize) -> Vec<f64> {
    let q = 1.0 + t * x;
    (2..=k)
        .map(|m| {
            let fact: f64 = (1..=m - 2).map(|i| i as f64).product();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            -2.0 * sign * fact * t.powi(m as i32 - 1) / q.powi(m as i32 - 1)
        })
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q_recovers_top_derivative(t in -0.5..2.0f64, x in 0.0..=1.0f64, k in 2usize..=6) {
        let jet = IntervalFamily::Mobius { t }.jet(x, k).unwrap();
        let vars: Vec<Var> = (1..k as u32).map(Var::X).chain((2..=k as u32).map(Var::Y)).collect();
        let q = build_q(k).unwrap().compile(&vars).unwrap();
        let mut args = jet[1..k].to_vec();
        args.extend(mobius_phis(t, x, k));
        prop_assert!(rel(q.eval(&args), jet[k]) <= 1e-10);
    }

    #[test]
    fn q_on_exp_family(a in -3.0..3.0f64, x in 0.0..=1.0f64, k in 2usize..=6) {
        prop_assume!(a.abs() > 1e-3);
        let jet = IntervalFamily::Exp { a }.jet(x, k).unwrap();
        let vars: Vec<Var> = (1..k as u32).map(Var::X).chain((2..=k as u32).map(Var::Y)).collect();
        let q = build_q(k).unwrap().compile(&vars).unwrap();
        // log f' = log(a / (e^a - 1)) + a x
        let mut args = jet[1..k].to_vec();
        args.push(a);
        args.extend(std::iter::repeat(0.0).take(k - 2));
        prop_assert!(rel(q.eval(&args), jet[k]) <= 1e-10);
    }

    #[test]
    fn r_gives_inverse_derivatives(a in -3.0..3.0f64, y in 0.0..=1.0f64, k in 1usize..=6) {
        prop_assume!(a.abs() > 1e-3);
        let inv = IntervalFamily::ExpInverse { a }.jet(y, k).unwrap();
        let f = IntervalFamily::Exp { a }.jet(inv[0], k).unwrap();
        let vars: Vec<Var> = (1..=k as u32).map(Var::X).collect();
        let r = build_r(k).unwrap().compile(&vars).unwrap();
        prop_assert!(rel(inverse_derivative(&r, k, &f[1..]), inv[k]) <= 1e-9);
    }
}

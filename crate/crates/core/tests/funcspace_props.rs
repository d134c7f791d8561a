use std::f64::consts::PI;

use diffgeo_core::funcspace::node;
use diffgeo_core::{GridFunction, SmoothFunction};
use proptest::prelude::*;

const N: usize = 512;

/// `d + Σ c_j sin(2π j x + p_j)` for `j = 1..=3`.
fn trig(d: f64, terms: [(f64, f64); 3]) -> SmoothFunction {
    SmoothFunction::from_expr(move |x| {
        let mut acc = x.scale(0.0).add_constant(d);
        for (j, (c, p)) in terms.iter().enumerate() {
            let s = x.scale(2.0 * PI * (j + 1) as f64).add_constant(*p).sin_cos().0.scale(*c);
            acc = &acc + &s;
        }
        acc
    })
}

fn coeffs() -> impl Strategy<Value = (f64, [(f64, f64); 3])> {
    (
        -2.0..2.0f64,
        [(-1.0..1.0f64, 0.0..6.3f64), (-1.0..1.0f64, 0.0..6.3f64), (-1.0..1.0f64, 0.0..6.3f64)],
    )
}

fn grid(c: &(f64, [(f64, f64); 3]), m: usize) -> GridFunction {
    GridFunction::from_smooth(&trig(c.0, c.1), N, m).unwrap()
}

/// `O(h^4)` scaled by the fifth derivative of `trig`, at most `3 (6π)^5`.
fn quartic_bound() -> f64 {
    3.0 * (6.0 * PI).powi(5) * (1.0 / N as f64).powi(4)
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn antiderivative_is_linear(
        cf in coeffs(), cg in coeffs(), m in 0usize..=2,
        alpha in -3.0..3.0f64, beta in -3.0..3.0f64, a in -1.0..1.0f64, b in -1.0..1.0f64,
    ) {
        let (f, g) = (grid(&cf, m), grid(&cg, m));
        let lhs = f.combine(alpha, &g, beta).unwrap().antiderivative(alpha * a + beta * b).unwrap();
        let rhs = f.antiderivative(a).unwrap().combine(alpha, &g.antiderivative(b).unwrap(), beta).unwrap();
        prop_assert!(max_gap(lhs.values(), rhs.values()) <= 1e-12);
    }

    #[test]
    fn differentiation_undoes_integration(cf in coeffs()) {
        let f = grid(&cf, 0);
        let back = f.antiderivative(0.0).unwrap().finite_difference_derivative().unwrap();
        prop_assert!(max_gap(back.values(), f.values()) <= quartic_bound());
    }

    #[test]
    fn integration_undoes_differentiation(cf in coeffs()) {
        let f = grid(&cf, 1);
        let df = GridFunction::new(N, f.row(1).to_vec()).unwrap();
        let back = df.antiderivative(f.values()[0]).unwrap();
        prop_assert!(max_gap(back.values(), f.values()) <= quartic_bound());
    }

    #[test]
    fn antiderivative_norm_bounds(cf in coeffs(), m in 0usize..=2, b in -2.0..2.0f64) {
        let f = grid(&cf, m);
        let i = f.antiderivative(b).unwrap();
        prop_assert!(i.sup_norm() <= f.sup_norm() + b.abs() + 1e-12);
        prop_assert!(i.ck_norm(m + 1) <= f.ck_norm(m) + f.sup_norm() + b.abs() + 1e-12);
    }

    #[test]
    fn eval_at_nodes_is_exact(cf in coeffs(), m in 0usize..=2, i in 0usize..=N) {
        let f = grid(&cf, m);
        prop_assert_eq!(f.eval(node(i, N)).unwrap(), f.values()[i]);
        for r in 1..=m {
            prop_assert_eq!(f.eval_derivative(node(i, N), r).unwrap(), f.row(r)[i]);
        }
    }

    #[test]
    fn interpolation_tracks_the_function(cf in coeffs(), x in 0.0..1.0f64) {
        let s = trig(cf.0, cf.1);
        let exact = s.eval(x).unwrap();
        prop_assert!((grid(&cf, 2).eval(x).unwrap() - exact).abs() <= 1e-9);
        prop_assert!((grid(&cf, 0).eval(x).unwrap() - exact).abs() <= 1e-5);
    }

    #[test]
    fn refined_sup_dominates_node_sup(cf in coeffs(), m in 0usize..=2) {
        let f = grid(&cf, m);
        prop_assert!(f.refined_sup_norm() >= f.sup_norm());
    }
}

#[test]
fn stated_ck_bound_needs_the_extra_sup_term() {
    // f = 1, b = 0: I(f, 0) = x has C^1 norm 2 while ‖f‖_0 + |b| = 1
    let f = GridFunction::from_fn(N, |_| 1.0).unwrap();
    let i = f.antiderivative(0.0).unwrap();
    assert!((i.ck_norm(1) - 2.0).abs() < 1e-12);
    assert!(i.ck_norm(1) > f.ck_norm(0));
}

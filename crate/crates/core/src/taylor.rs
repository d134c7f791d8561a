//! Truncated Taylor series ("jets") at a point.
//!
//! A [`Taylor`] of order `k` stores the normalized coefficients
//! `c_m = f^(m)(x0) / m!` for `m = 0..=k`. Products, quotients, `exp`, `ln`
//! and composition all work coefficient-wise with the usual recurrences, which
//! is how the diffeomorphism modules propagate derivative data through
//! logarithms and compositions without any numerical differentiation.

use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Taylor {
    coeffs: Vec<f64>,
}

fn factorial(m: usize) -> f64 {
    (1..=m).fold(1.0, |acc, i| acc * i as f64)
}

impl Taylor {
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least the value term");
        Taylor { coeffs }
    }

    /// Build from a derivative vector `[f, f', f'', ...]`.
    pub fn from_derivs(derivs: &[f64]) -> Self {
        let coeffs = derivs
            .iter()
            .enumerate()
            .map(|(m, d)| d / factorial(m))
            .collect();
        Taylor::from_coeffs(coeffs)
    }

    pub fn constant(c: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = c;
        Taylor { coeffs }
    }

    /// The identity function expanded at `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = x0;
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Taylor { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn to_derivs(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * factorial(m))
            .collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        Taylor {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    pub fn exp(&self) -> Self {
        let a = &self.coeffs;
        let mut b = vec![0.0; a.len()];
        b[0] = a[0].exp();
        for m in 1..a.len() {
            let s: f64 = (1..=m).map(|i| i as f64 * a[i] * b[m - i]).sum();
            b[m] = s / m as f64;
        }
        Taylor { coeffs: b }
    }

    /// Natural logarithm; the value term must be positive.
    pub fn ln(&self) -> Self {
        let a = &self.coeffs;
        let mut b = vec![0.0; a.len()];
        b[0] = a[0].ln();
        for m in 1..a.len() {
            let s: f64 = (1..m).map(|i| i as f64 * b[i] * a[m - i]).sum();
            b[m] = (a[m] - s / m as f64) / a[0];
        }
        Taylor { coeffs: b }
    }

    pub fn recip(&self) -> Self {
        Taylor::constant(1.0, self.order()).div(self)
    }

    pub fn div(&self, rhs: &Taylor) -> Self {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let (a, b) = (&self.coeffs, &rhs.coeffs);
        let mut q = vec![0.0; n];
        for m in 0..n {
            let s: f64 = (1..=m).map(|i| b[i] * q[m - i]).sum();
            q[m] = (a[m] - s) / b[0];
        }
        Taylor { coeffs: q }
    }

    /// Returns `(sin f, cos f)`.
    pub fn sin_cos(&self) -> (Self, Self) {
        let a = &self.coeffs;
        let n = a.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for m in 1..n {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for i in 1..=m {
                ss += i as f64 * a[i] * c[m - i];
                cc += i as f64 * a[i] * s[m - i];
            }
            s[m] = ss / m as f64;
            c[m] = -cc / m as f64;
        }
        (Taylor { coeffs: s }, Taylor { coeffs: c })
    }

    /// Compose an outer function, given by its derivatives at `inner.value()`,
    /// with `inner`. This is the Faà di Bruno formula evaluated by Horner's rule
    /// on truncated series.
    pub fn compose_outer(outer_derivs: &[f64], inner: &Taylor) -> Taylor {
        let order = inner.order().min(outer_derivs.len() - 1);
        let mut delta = inner.truncate(order);
        delta.coeffs[0] = 0.0;
        let outer = Taylor::from_derivs(&outer_derivs[..=order]);
        let mut acc = Taylor::constant(outer.coeffs[order], order);
        for m in (0..order).rev() {
            acc = &acc * &delta;
            acc.coeffs[0] += outer.coeffs[m];
        }
        acc
    }

    pub fn truncate(&self, order: usize) -> Self {
        Taylor {
            coeffs: self.coeffs[..=order.min(self.order())].to_vec(),
        }
    }

    /// Formal derivative: the jet of `f'` (one order shorter).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Taylor::constant(0.0, 0);
        }
        Taylor {
            coeffs: (1..self.coeffs.len())
                .map(|m| m as f64 * self.coeffs[m])
                .collect(),
        }
    }
}

/// Derivatives `0..=k` of `outer ∘ inner` from derivative vectors, with
/// `outer_derivs` taken at `inner_derivs[0]`. Uses partial Bell polynomials
/// `B_{m,j}`, so an identity inner jet `(x, 1, 0, ...)` reproduces the outer
/// jet bit for bit.
pub fn faa_di_bruno(outer_derivs: &[f64], inner_derivs: &[f64]) -> Vec<f64> {
    let k = (outer_derivs.len() - 1).min(inner_derivs.len() - 1);
    // bell[m][j] = B_{m,j}(g', g'', ...)
    let mut bell = vec![vec![0.0; k + 1]; k + 1];
    bell[0][0] = 1.0;
    let mut binom = vec![vec![0.0; k + 1]; k + 1];
    for m in 0..=k {
        binom[m][0] = 1.0;
        for i in 1..=m {
            binom[m][i] = binom[m - 1][i - 1] + if i < m { binom[m - 1][i] } else { 0.0 };
        }
    }
    for m in 1..=k {
        for j in 1..=m {
            let mut acc = 0.0;
            for i in 1..=m - j + 1 {
                let b = bell[m - i][j - 1];
                if b != 0.0 && inner_derivs[i] != 0.0 {
                    acc += binom[m - 1][i - 1] * inner_derivs[i] * b;
                }
            }
            bell[m][j] = acc;
        }
    }
    let mut out = vec![0.0; k + 1];
    out[0] = outer_derivs[0];
    for m in 1..=k {
        let mut acc = 0.0;
        for j in 1..=m {
            if bell[m][j] != 0.0 {
                acc += outer_derivs[j] * bell[m][j];
            }
        }
        out[m] = acc;
    }
    out
}

impl<'a> Mul for &'a Taylor {
    type Output = Taylor;

    fn mul(self, rhs: &'a Taylor) -> Taylor {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            for (j, b) in rhs.coeffs.iter().take(n - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Taylor { coeffs: out }
    }
}

impl<'a> Add for &'a Taylor {
    type Output = Taylor;

    fn add(self, rhs: &'a Taylor) -> Taylor {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        Taylor {
            coeffs: (0..n).map(|i| self.coeffs[i] + rhs.coeffs[i]).collect(),
        }
    }
}

impl<'a> Sub for &'a Taylor {
    type Output = Taylor;

    fn sub(self, rhs: &'a Taylor) -> Taylor {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        Taylor {
            coeffs: (0..n).map(|i| self.coeffs[i] - rhs.coeffs[i]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol * (1.0 + y.abs()), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn exp_of_linear() {
        // d^m/dx^m e^{2x} at x = 0.3 is 2^m e^{0.6}
        let x = Taylor::variable(0.3, 5).scale(2.0);
        let d = x.exp().to_derivs();
        let want: Vec<f64> = (0..6).map(|m| 2f64.powi(m) * 0.6f64.exp()).collect();
        close(&d, &want, 1e-14);
    }

    #[test]
    fn ln_inverts_exp() {
        let f = Taylor::from_derivs(&[0.4, -1.0, 2.5, 0.3, -7.0]);
        let back = f.exp().ln();
        close(back.coeffs(), f.coeffs(), 1e-13);
    }

    #[test]
    fn ln_of_one_plus_x() {
        // (log(1+x))^(m) at 0 = (-1)^{m-1} (m-1)!
        let d = Taylor::variable(0.0, 5).add_constant(1.0).ln().to_derivs();
        close(&d, &[0.0, 1.0, -1.0, 2.0, -6.0, 24.0], 1e-14);
    }

    #[test]
    fn division_matches_product_inverse() {
        let a = Taylor::from_derivs(&[1.0, 2.0, -1.0, 0.5]);
        let b = Taylor::from_derivs(&[2.0, 0.1, 0.7, -0.2]);
        let q = a.div(&b);
        close((&q * &b).coeffs(), a.coeffs(), 1e-14);
    }

    #[test]
    fn sin_cos_derivatives() {
        let x = Taylor::variable(0.7, 4);
        let (s, c) = x.sin_cos();
        let v = 0.7f64;
        close(&s.to_derivs(), &[v.sin(), v.cos(), -v.sin(), -v.cos(), v.sin()], 1e-14);
        close(&c.to_derivs(), &[v.cos(), -v.sin(), -v.cos(), v.sin(), v.cos()], 1e-14);
    }

    #[test]
    fn compose_exp_with_square() {
        // e^{x^2} at x = 0.5: value, 2x e, (2 + 4x^2) e, (12x + 8x^3) e
        let x = Taylor::variable(0.5, 3);
        let inner = &x * &x;
        let e = (0.25f64).exp();
        let outer = [e, e, e, e];
        let got = Taylor::compose_outer(&outer, &inner).to_derivs();
        close(&got, &[e, 1.0 * e, 3.0 * e, 7.0 * e], 1e-14);
        let bell = faa_di_bruno(&outer, &[0.25, 1.0, 2.0, 0.0]);
        close(&bell, &[e, 1.0 * e, 3.0 * e, 7.0 * e], 1e-14);
    }

    #[test]
    fn faa_di_bruno_identity_inner_is_exact() {
        let outer = [0.3, 1.0 / 3.0, -7.1, 0.1, 2.0 / 7.0];
        assert_eq!(faa_di_bruno(&outer, &[0.5, 1.0, 0.0, 0.0, 0.0]), outer.to_vec());
    }

    #[test]
    fn faa_di_bruno_matches_horner() {
        let outer = [0.3, -1.2, 0.7, 2.5, -0.4, 1.1];
        let inner = [0.1, 0.9, -0.3, 1.7, 0.2, -2.0];
        let h = Taylor::compose_outer(&outer, &Taylor::from_derivs(&inner)).to_derivs();
        close(&faa_di_bruno(&outer, &inner), &h, 1e-13);
    }
}

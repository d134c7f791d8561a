//! Exact multivariate polynomials and the three derivative-identity families.
//!
//! Variables are tagged [`Var::X`] (the `i`-th derivative of some function)
//! or [`Var::Y`] (the value of `φ_j`). Formal differentiation treats every
//! variable as a function of an underlying coordinate and applies the shift
//! rule `X_i -> X_{i+1}`, `Y_j -> Y_{j+1}`.
//!
//! * `Q_k` expresses `f^(k)` through `f', ..., f^(k-1)` and `φ_2, ..., φ_k`.
//! * `R_k` gives `(g^{-1})^(k) = [R_k(g', ..., g^(k)) / (g')^{2k-1}] ∘ g^{-1}`.
//!   The denominator exponent is not stored; it is part of the evaluation
//!   contract (see [`inverse_derivative`]).
//! * `P^k_j` are the coefficients in the expansion of `φ_k(f h^{-1})` in the
//!   differences `[φ_m(f) - φ_m(h)] ∘ h^{-1}`, with variables
//!   `X_i = (h^{-1})^(i)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X(u32),
    Y(u32),
}

impl Var {
    pub fn shift(self) -> Var {
        match self {
            Var::X(i) => Var::X(i + 1),
            Var::Y(j) => Var::Y(j + 1),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "X{i}"),
            Var::Y(j) => write!(f, "Y{j}"),
        }
    }
}

/// Sorted `(variable, exponent)` pairs with positive exponents.
type Monomial = Vec<(Var, u32)>;

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: BTreeMap<Var, u32> = a.iter().cloned().collect();
    for (v, e) in b {
        *out.entry(*v).or_insert(0) += e;
    }
    out.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalPoly {
    alphabet: BTreeSet<Var>,
    terms: BTreeMap<Monomial, BigRational>,
}

impl FormalPoly {
    pub fn zero() -> Self {
        FormalPoly {
            alphabet: BTreeSet::new(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: i64) -> Self {
        let mut p = FormalPoly::zero();
        p.add_term(Vec::new(), BigRational::from_integer(BigInt::from(c)));
        p
    }

    pub fn var(v: Var) -> Self {
        let mut p = FormalPoly::zero();
        p.alphabet.insert(v);
        p.add_term(vec![(v, 1)], BigRational::one());
        p
    }

    /// Declare extra variables without changing the polynomial.
    pub fn with_alphabet(mut self, vars: impl IntoIterator<Item = Var>) -> Self {
        self.alphabet.extend(vars);
        self
    }

    fn add_term(&mut self, mono: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn alphabet(&self) -> impl Iterator<Item = Var> + '_ {
        self.alphabet.iter().copied()
    }

    pub fn arity(&self) -> usize {
        self.alphabet.len()
    }

    /// Variables that occur with a positive exponent in some term.
    pub fn used_vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.iter().map(|(v, _)| *v)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|(_, e)| e).sum())
            .max()
            .unwrap_or(0)
    }

    /// Coefficient of the monomial given as `(variable, exponent)` pairs.
    pub fn coeff(&self, mono: &[(Var, u32)]) -> BigRational {
        let key: Monomial = mono
            .iter()
            .fold(BTreeMap::new(), |mut acc: BTreeMap<Var, u32>, (v, e)| {
                *acc.entry(*v).or_insert(0) += e;
                acc
            })
            .into_iter()
            .filter(|(_, e)| *e > 0)
            .collect();
        self.terms.get(&key).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &FormalPoly) -> FormalPoly {
        let mut out = self.clone();
        out.alphabet.extend(other.alphabet.iter().copied());
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &BigRational) -> FormalPoly {
        let mut out = FormalPoly {
            alphabet: self.alphabet.clone(),
            terms: BTreeMap::new(),
        };
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn scale_int(&self, s: i64) -> FormalPoly {
        self.scale(&BigRational::from_integer(BigInt::from(s)))
    }

    pub fn sub(&self, other: &FormalPoly) -> FormalPoly {
        self.add(&other.scale_int(-1))
    }

    pub fn mul(&self, other: &FormalPoly) -> FormalPoly {
        let mut out = FormalPoly {
            alphabet: self.alphabet.union(&other.alphabet).copied().collect(),
            terms: BTreeMap::new(),
        };
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }

    /// Partial derivative with respect to `v`; the alphabet is kept.
    pub fn partial(&self, v: Var) -> FormalPoly {
        let mut out = FormalPoly {
            alphabet: self.alphabet.clone(),
            terms: BTreeMap::new(),
        };
        for (m, c) in &self.terms {
            if let Some(pos) = m.iter().position(|(w, _)| *w == v) {
                let e = m[pos].1;
                let mut mono = m.clone();
                if e == 1 {
                    mono.remove(pos);
                } else {
                    mono[pos].1 = e - 1;
                }
                out.add_term(mono, c * BigRational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// `d/dx` with every variable shifted: `Σ_v ∂p/∂v · shift(v)`.
    /// The result's alphabet is the union of the input alphabet and its shift.
    pub fn formal_derivative(&self) -> FormalPoly {
        let mut out = FormalPoly {
            alphabet: self
                .alphabet
                .iter()
                .flat_map(|v| [*v, v.shift()])
                .collect(),
            terms: BTreeMap::new(),
        };
        if self.terms.is_empty() {
            return out;
        }
        for v in self.used_vars() {
            let term = self.partial(v).mul(&FormalPoly::var(v.shift()));
            for (m, c) in term.terms {
                out.add_term(m, c);
            }
        }
        out
    }

    /// Exact evaluation: every input is converted to an exact rational, the
    /// sum is accumulated exactly and rounded once at the end.
    pub fn eval(&self, assignment: &HashMap<Var, f64>) -> Result<f64> {
        let mut exact: HashMap<Var, BigRational> = HashMap::new();
        for v in self.used_vars() {
            let x = assignment
                .get(&v)
                .ok_or_else(|| Error::MissingVariable(v.to_string()))?;
            let r = BigRational::from_float(*x)
                .ok_or_else(|| Error::Domain(format!("value for {v} is not finite")))?;
            exact.insert(v, r);
        }
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m {
                t *= num_traits::pow(exact[v].clone(), *e as usize);
            }
            acc += t;
        }
        acc.to_f64()
            .ok_or_else(|| Error::Domain("polynomial value overflows f64".into()))
    }

    /// Floating-point evaluator over a fixed variable order, for hot loops.
    pub fn compile(&self, order: &[Var]) -> Result<CompiledPoly> {
        let index: HashMap<Var, usize> = order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let factors = m
                .iter()
                .map(|(v, e)| {
                    index
                        .get(v)
                        .map(|i| (*i, *e as i32))
                        .ok_or_else(|| Error::MissingVariable(v.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            let coeff = c
                .to_f64()
                .ok_or_else(|| Error::Domain("coefficient overflows f64".into()))?;
            terms.push((coeff, factors));
        }
        Ok(CompiledPoly { terms })
    }
}

impl fmt::Display for FormalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = a.is_one();
            if !unit || m.is_empty() {
                write!(f, "{a}")?;
            }
            for (k, (v, e)) in m.iter().enumerate() {
                if k > 0 || !unit {
                    write!(f, "*")?;
                }
                write!(f, "{v}")?;
                if *e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Floating-point form of a [`FormalPoly`] bound to a variable order.
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    pub fn eval(&self, values: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, fs)| fs.iter().fold(*c, |acc, (i, e)| acc * values[*i].powi(*e)))
            .sum()
    }
}

fn x_vars(count: u32) -> Vec<Var> {
    (1..=count).map(Var::X).collect()
}

/// `Q_k`, with `Q_2 = X1*Y2` and `Q_{k+1} = D Q_k`.
pub fn build_q(k: usize) -> Result<FormalPoly> {
    if k < 2 {
        return Err(Error::Domain(format!("Q_k needs k >= 2, got {k}")));
    }
    let mut q = FormalPoly::var(Var::X(1)).mul(&FormalPoly::var(Var::Y(2)));
    for _ in 2..k {
        q = q.formal_derivative();
    }
    Ok(q)
}

/// `R_k`, with `R_1 = 1` and
/// `R_{k+1} = (Σ_i ∂R_k/∂X_i · X_{i+1}) · X1 - (2k-1) · R_k · X2`.
pub fn build_r(k: usize) -> Result<FormalPoly> {
    if k < 1 {
        return Err(Error::Domain("R_k needs k >= 1".into()));
    }
    let x1 = FormalPoly::var(Var::X(1));
    let x2 = FormalPoly::var(Var::X(2));
    let mut r = FormalPoly::constant(1).with_alphabet([Var::X(1)]);
    for step in 1..k {
        let lead = r.formal_derivative().mul(&x1);
        let corr = r.mul(&x2).scale_int(2 * step as i64 - 1);
        r = lead.sub(&corr).with_alphabet(x_vars(step as u32 + 1));
    }
    Ok(r)
}

/// `[P^k_2, ..., P^k_k]`; `P^k_j` multiplies `[φ_{k-j+2}(f) - φ_{k-j+2}(h)] ∘ h^{-1}`
/// and has variables `X1..X_{j-1}`.
pub fn build_p(k: usize) -> Result<Vec<FormalPoly>> {
    if k < 2 {
        return Err(Error::Domain(format!("P^k needs k >= 2, got {k}")));
    }
    let x1 = FormalPoly::var(Var::X(1));
    // level[j - 2] = P^level_j
    let mut level = vec![x1.clone()];
    for lk in 2..k {
        let mut next = Vec::with_capacity(lk);
        // P^{lk+1}_2 = X1 * P^lk_2
        next.push(level[0].mul(&x1));
        // P^{lk+1}_{j+1} = X1 * P^lk_{j+1} + D P^lk_j, for 2 <= j < lk
        for j in 2..lk {
            let t = level[j - 1].mul(&x1).add(&level[j - 2].formal_derivative());
            next.push(t.with_alphabet(x_vars(j as u32)));
        }
        // P^{lk+1}_{lk+1} = D P^lk_lk
        next.push(level[lk - 2].formal_derivative().with_alphabet(x_vars(lk as u32)));
        level = next;
    }
    Ok(level)
}

/// Evaluate `R_j(g', ..., g^(j)) / (g')^{2j-1}` for a derivative vector
/// `g_derivs = [g', g'', ...]` of length at least `j`.
pub fn inverse_derivative(r_j: &CompiledPoly, j: usize, g_derivs: &[f64]) -> f64 {
    r_j.eval(g_derivs) / g_derivs[0].powi(2 * j as i32 - 1)
}

/// Compiled `R_1..=R_k`, each bound to `[X1, ..., X_k]`.
pub fn compiled_r_family(k: usize) -> Result<Vec<CompiledPoly>> {
    let order = x_vars(k as u32);
    (1..=k).map(|j| build_r(j)?.compile(&order)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u32) -> FormalPoly {
        FormalPoly::var(Var::X(i))
    }

    fn y(j: u32) -> FormalPoly {
        FormalPoly::var(Var::Y(j))
    }

    #[test]
    fn derivative_examples() {
        let p = x(1).mul(&y(2));
        assert_eq!(p.formal_derivative().to_string(), x(2).mul(&y(2)).add(&x(1).mul(&y(3))).to_string());
        assert!(FormalPoly::constant(1).formal_derivative().is_zero());
        let sq = x(1).mul(&x(1)).formal_derivative();
        assert_eq!(sq, x(1).mul(&x(2)).scale_int(2).with_alphabet([Var::X(1), Var::X(2)]));
    }

    #[test]
    fn q_examples() {
        assert_eq!(build_q(2).unwrap().to_string(), "X1*Y2");
        let q3 = build_q(3).unwrap();
        assert_eq!(q3.coeff(&[(Var::X(2), 1), (Var::Y(2), 1)]), BigRational::one());
        assert_eq!(q3.coeff(&[(Var::X(1), 1), (Var::Y(3), 1)]), BigRational::one());
        assert_eq!(q3.num_terms(), 2);
        let q4 = build_q(4).unwrap();
        let want = x(3)
            .mul(&y(2))
            .add(&x(2).mul(&y(3)).scale_int(2))
            .add(&x(1).mul(&y(4)));
        assert_eq!(q4.sub(&want).num_terms(), 0);
        assert!(build_q(1).is_err());
    }

    #[test]
    fn q_alphabet() {
        for k in 2..=6u32 {
            let q = build_q(k as usize).unwrap();
            let want: BTreeSet<Var> = (1..k).map(Var::X).chain((2..=k).map(Var::Y)).collect();
            assert_eq!(q.alphabet().collect::<BTreeSet<_>>(), want);
            assert!(q.used_vars().is_subset(&want));
            assert_eq!(q.arity(), 2 * (k as usize - 1));
        }
    }

    #[test]
    fn r_examples() {
        assert_eq!(build_r(1).unwrap().to_string(), "1");
        assert_eq!(build_r(2).unwrap().to_string(), "-X2");
        let r3 = build_r(3).unwrap();
        let want = x(2).mul(&x(2)).scale_int(3).sub(&x(1).mul(&x(3)));
        assert!(r3.sub(&want).is_zero());
        assert!(build_r(0).is_err());
        for k in 1..=6 {
            assert_eq!(build_r(k).unwrap().arity(), k);
        }
    }

    #[test]
    fn p_examples() {
        let p2 = build_p(2).unwrap();
        assert_eq!(p2.len(), 1);
        assert_eq!(p2[0].to_string(), "X1");
        let p3 = build_p(3).unwrap();
        assert_eq!(p3[0].to_string(), "X1^2");
        assert_eq!(p3[1].to_string(), "X2");
        for k in 2..=6 {
            for (idx, p) in build_p(k).unwrap().iter().enumerate() {
                let j = idx + 2;
                assert_eq!(p.arity(), j - 1, "P^{k}_{j}");
                assert!(p.used_vars().iter().all(|v| matches!(v, Var::X(i) if (*i as usize) < j)));
            }
        }
        assert!(build_p(1).is_err());
    }

    #[test]
    fn p4_by_hand() {
        // two steps of the recursion from P^2_2 = X1
        let p4 = build_p(4).unwrap();
        assert_eq!(p4[0].to_string(), "X1^3");
        // X1*X2 + D(X1^2) = X1*X2 + 2 X1 X2
        assert!(p4[1].sub(&x(1).mul(&x(2)).scale_int(3)).is_zero());
        assert_eq!(p4[2].to_string(), "X3");
    }

    #[test]
    fn eval_examples() {
        let mut a = HashMap::new();
        a.insert(Var::X(1), 2.0);
        a.insert(Var::Y(2), 3.0);
        assert_eq!(build_q(2).unwrap().eval(&a).unwrap(), 6.0);
        let mut b = HashMap::new();
        b.insert(Var::X(2), 0.5);
        assert_eq!(build_r(2).unwrap().eval(&b).unwrap(), -0.5);
        let mut c = HashMap::new();
        c.insert(Var::X(1), 1.0);
        c.insert(Var::X(2), 2.0);
        c.insert(Var::X(3), 3.0);
        assert_eq!(build_r(3).unwrap().eval(&c).unwrap(), 9.0);
    }

    #[test]
    fn eval_missing_variable_names_tag() {
        let err = build_r(3).unwrap().eval(&HashMap::new()).unwrap_err();
        match err {
            Error::MissingVariable(tag) => assert_eq!(tag, "X1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn compiled_matches_exact() {
        let r5 = build_r(5).unwrap();
        let vals = [1.3, -0.4, 2.2, 0.7, -1.1];
        let order = x_vars(5);
        let a: HashMap<Var, f64> = order.iter().copied().zip(vals).collect();
        let exact = r5.eval(&a).unwrap();
        let fast = r5.compile(&order).unwrap().eval(&vals);
        assert!((exact - fast).abs() < 1e-12 * (1.0 + exact.abs()));
    }
}

//! Sparse multivariate polynomials over exact rationals or complex doubles.
//!
//! Terms live in a `BTreeMap` keyed by exponent multi-indices under graded-lex
//! order, so iteration is deterministic and stored coefficients are never zero.
//! The degree of the zero polynomial is `None` (the "minus infinity" sentinel).

mod parse;

pub use parse::{parse_complex, parse_rational};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exponent multi-index of a single term, ordered graded-lex:
/// lower total degree first, then lexicographic on the exponent vector.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    /// The constant monomial (all exponents zero).
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    /// x_j as a monomial (0-based variable index).
    pub fn var(nvars: usize, j: usize) -> Self {
        let mut e = vec![0; nvars];
        e[j] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise exponent parity, the invariant of `Δ(q₂ ·)` blocks.
    pub fn parity(&self) -> Vec<u8> {
        self.0.iter().map(|e| (e % 2) as u8).collect()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Coefficient field abstraction: exact rationals or complex doubles.
pub trait Coeff:
    Clone + PartialEq + fmt::Debug + Zero + One + Neg<Output = Self> + Sub<Output = Self>
{
    fn conj(&self) -> Self;
    fn from_u32(v: u32) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    /// Canonical text form, re-parseable by the polynomial grammar.
    fn coeff_string(&self) -> String;
    fn parse_coeff(s: &str) -> Result<Self>;
    fn to_c64(&self) -> Complex64;
}

impl Coeff for BigRational {
    fn conj(&self) -> Self {
        self.clone()
    }

    fn from_u32(v: u32) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn coeff_string(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn parse_coeff(s: &str) -> Result<Self> {
        parse::parse_rational_coeff(s)
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

impl Coeff for Complex64 {
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn from_u32(v: u32) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn coeff_string(&self) -> String {
        if self.im == 0.0 {
            format!("{}", self.re)
        } else if self.im < 0.0 {
            format!("{}{}i", self.re, self.im)
        } else {
            format!("{}+{}i", self.re, self.im)
        }
    }

    fn parse_coeff(s: &str) -> Result<Self> {
        parse::parse_complex_coeff(s)
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }
}

/// Sparse multivariate polynomial with coefficients in `C`.
#[derive(Clone, PartialEq, Debug)]
pub struct MultiPoly<C: Coeff> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

/// Polynomial over exact rationals.
pub type RatPoly = MultiPoly<BigRational>;
/// Polynomial over complex doubles.
pub type CxPoly = MultiPoly<Complex64>;

impl<C: Coeff> MultiPoly<C> {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    /// The variable x_j (0-based index).
    pub fn var(nvars: usize, j: usize) -> Self {
        assert!(j < nvars, "variable index out of range");
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial::var(nvars, j), C::one());
        p
    }

    pub fn monomial(nvars: usize, exps: &[u32], c: C) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::new(exps.to_vec()), c);
        }
        p
    }

    /// The monomial `x^m` with unit coefficient.
    pub fn from_mono(m: Monomial) -> Self {
        let nvars = m.nvars();
        let mut p = Self::zero(nvars);
        p.terms.insert(m, C::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Graded-lex iteration over (monomial, coefficient) pairs.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&C> {
        self.terms.get(m)
    }

    /// Adds `c · x^m` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: C) {
        debug_assert_eq!(m.nvars(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &C) -> Self
    where
        C: Mul<Output = C>,
    {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        let mut out = Self::zero(self.nvars);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self
    where
        C: Mul<Output = C>,
    {
        let mut acc = Self::constant(self.nvars, C::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates at a point; errors on arity mismatch.
    pub fn eval(&self, x: &[C]) -> Result<C>
    where
        C: Mul<Output = C>,
    {
        if x.len() != self.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: x.len(),
            });
        }
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (j, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    t = t * x[j].clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Partial derivative with respect to x_j.
    pub fn partial(&self, j: usize) -> Self
    where
        C: Mul<Output = C>,
    {
        assert!(j < self.nvars);
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exps()[j];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[j] -= 1;
            out.add_term(Monomial::new(exps), c.clone() * C::from_u32(e));
        }
        out
    }

    /// Gradient as a vector of polynomials.
    pub fn grad(&self) -> Vec<Self>
    where
        C: Mul<Output = C>,
    {
        (0..self.nvars).map(|j| self.partial(j)).collect()
    }

    /// Σ_j ∂²p/∂x_j². Degree drops by exactly 2 unless the result is zero.
    pub fn laplacian(&self) -> Self
    where
        C: Mul<Output = C>,
    {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            for j in 0..self.nvars {
                let e = m.exps()[j];
                if e < 2 {
                    continue;
                }
                let mut exps = m.exps().to_vec();
                exps[j] -= 2;
                out.add_term(
                    Monomial::new(exps),
                    c.clone() * C::from_u32(e) * C::from_u32(e - 1),
                );
            }
        }
        out
    }

    /// `Some(k)` if every term has total degree `k`; zero counts as
    /// homogeneous of every degree and reports `None` via `degree()`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys();
        let first = it.next()?.degree();
        if it.all(|m| m.degree() == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    /// The degree-`k` homogeneous component.
    pub fn homogeneous_part(&self, k: u32) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.degree() == k {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Converts coefficients into another scalar field.
    pub fn map_coeff<D: Coeff>(&self, f: impl Fn(&C) -> D) -> MultiPoly<D> {
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// JSON form: `{"nvars": n, "terms": [{"exponents": [...], "coeff": "..."}]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                serde_json::json!({
                    "exponents": m.exps(),
                    "coeff": c.coeff_string(),
                })
            })
            .collect();
        serde_json::json!({ "nvars": self.nvars, "terms": terms })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let nvars = v["nvars"]
            .as_u64()
            .ok_or_else(|| Error::Parse("missing nvars".into()))? as usize;
        let mut p = Self::zero(nvars);
        let terms = v["terms"]
            .as_array()
            .ok_or_else(|| Error::Parse("missing terms".into()))?;
        for t in terms {
            let exps: Vec<u32> = t["exponents"]
                .as_array()
                .ok_or_else(|| Error::Parse("missing exponents".into()))?
                .iter()
                .map(|e| e.as_u64().unwrap_or(0) as u32)
                .collect();
            if exps.len() != nvars {
                return Err(Error::ArityMismatch {
                    expected: nvars,
                    got: exps.len(),
                });
            }
            let c = C::parse_coeff(
                t["coeff"]
                    .as_str()
                    .ok_or_else(|| Error::Parse("missing coeff".into()))?,
            )?;
            p.add_term(Monomial::new(exps), c);
        }
        Ok(p)
    }
}

impl RatPoly {
    /// Evaluates with f64 arithmetic (for numeric pipelines).
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nvars);
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (j, &e) in m.exps().iter().enumerate() {
                t *= x[j].powi(e as i32);
            }
            acc += t;
        }
        acc
    }

    pub fn to_complex(&self) -> CxPoly {
        self.map_coeff(|c| c.to_c64())
    }
}

impl<C: Coeff> Add for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn add(self, rhs: Self) -> MultiPoly<C> {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn sub(self, rhs: Self) -> MultiPoly<C> {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<C: Coeff> Neg for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn neg(self) -> MultiPoly<C> {
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }
}

impl<C: Coeff + Mul<Output = C>> Mul for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn mul(self, rhs: Self) -> MultiPoly<C> {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch");
        let mut out = MultiPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<C: Coeff> fmt::Display for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // Highest-order terms first.
        for (m, c) in self.terms.iter().rev() {
            let cs = c.coeff_string();
            let (sign, mag) = if let Some(rest) = cs.strip_prefix('-') {
                ("-", rest.to_string())
            } else {
                ("+", cs)
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            let needs_parens = mag.contains('+') || mag.contains('-') || mag.contains('i');
            let vars: Vec<String> = m
                .exps()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(j, &e)| {
                    if e == 1 {
                        format!("x{}", j + 1)
                    } else {
                        format!("x{}^{}", j + 1, e)
                    }
                })
                .collect();
            if vars.is_empty() {
                if needs_parens {
                    write!(f, "({})", mag)?;
                } else {
                    write!(f, "{}", mag)?;
                }
            } else if mag == "1" && !needs_parens {
                write!(f, "{}", vars.join("*"))?;
            } else if needs_parens {
                write!(f, "({})*{}", mag, vars.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// A scalar from either backend: exact rational or complex double.
/// Arithmetic on the rational variant is exact.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Rational(BigRational),
    Complex(Complex64),
}

impl Scalar {
    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Rational(r) => r.to_c64(),
            Scalar::Complex(c) => *c,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{}", Coeff::coeff_string(r)),
            Scalar::Complex(c) => write!(f, "{}", Coeff::coeff_string(c)),
        }
    }
}

/// α! = Π α_j! as an exact rational.
pub fn multi_factorial(exps: &[u32]) -> BigRational {
    let mut acc = BigInt::one();
    for &e in exps {
        for k in 2..=e {
            acc *= BigInt::from(k);
        }
    }
    BigRational::from_integer(acc)
}

/// Fischer inner product Σ_{|α|=k} α! f_α conj(g_α) on homogeneous
/// polynomials of equal degree. The zero polynomial pairs with anything.
pub fn fischer_inner<C: Coeff + Mul<Output = C>>(f: &MultiPoly<C>, g: &MultiPoly<C>) -> Result<C> {
    if f.nvars() != g.nvars() {
        return Err(Error::ArityMismatch {
            expected: f.nvars(),
            got: g.nvars(),
        });
    }
    let df = f.homogeneous_degree();
    let dg = g.homogeneous_degree();
    match (f.is_zero(), g.is_zero()) {
        (true, _) | (_, true) => return Ok(C::zero()),
        _ => {
            if df.is_none() || dg.is_none() || df != dg {
                return Err(Error::DegreeMismatch {
                    left: df,
                    right: dg,
                });
            }
        }
    }
    let mut acc = C::zero();
    for (m, fa) in f.terms() {
        if let Some(ga) = g.coeff(m) {
            let fac = C::from_rational(&multi_factorial(m.exps()));
            acc = acc + fac * fa.clone() * ga.conj();
        }
    }
    Ok(acc)
}

/// Expands (z · conj(ξ))^m as a homogeneous complex polynomial of degree m.
pub fn dot_power(xi: &[Complex64], m: u32) -> CxPoly {
    let nvars = xi.len();
    let mut linear = CxPoly::zero(nvars);
    for (j, &x) in xi.iter().enumerate() {
        linear.add_term(Monomial::var(nvars, j), x.conj());
    }
    linear.pow(m)
}

/// Σ_j x_j² in n variables (the multiplier adjoint to Δ under the
/// Fischer pairing).
pub fn radius_squared<C: Coeff>(nvars: usize) -> MultiPoly<C> {
    let mut p = MultiPoly::zero(nvars);
    for j in 0..nvars {
        let mut exps = vec![0u32; nvars];
        exps[j] = 2;
        p.add_term(Monomial::new(exps), C::one());
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn rat(n: i64) -> BigRational {
        BigRational::from_i64(n).unwrap()
    }

    fn x(nvars: usize, j: usize) -> RatPoly {
        RatPoly::var(nvars, j)
    }

    #[test]
    fn laplacian_of_sum_of_squares() {
        // Δ(x1² + x2²) = 4
        let p = &(&x(2, 0) * &x(2, 0)) + &(&x(2, 1) * &x(2, 1));
        assert_eq!(p.laplacian(), RatPoly::constant(2, rat(4)));
    }

    #[test]
    fn laplacian_of_harmonic_is_zero() {
        // Δ(x1² − x2²) = 0
        let p = &(&x(2, 0) * &x(2, 0)) - &(&x(2, 1) * &x(2, 1));
        assert!(p.laplacian().is_zero());
        assert_eq!(p.laplacian().degree(), None);
    }

    #[test]
    fn laplacian_of_cubic() {
        // Δ(x1³x2) = 6 x1 x2
        let p = RatPoly::monomial(2, &[3, 1], rat(1));
        let expected = RatPoly::monomial(2, &[1, 1], rat(6));
        assert_eq!(p.laplacian(), expected);
    }

    #[test]
    fn degree_drops_by_two() {
        let p = RatPoly::monomial(3, &[2, 1, 1], rat(5));
        assert_eq!(p.degree(), Some(4));
        assert_eq!(p.laplacian().degree(), Some(2));
    }

    #[test]
    fn eval_and_grad() {
        let p = &(&x(2, 0) * &x(2, 0)) - &(&x(2, 1) * &x(2, 1));
        assert_eq!(p.eval(&[rat(3), rat(2)]).unwrap(), rat(5));
        let g = (&x(2, 0) * &x(2, 1)).grad();
        assert_eq!(g[0], x(2, 1));
        assert_eq!(g[1], x(2, 0));
        assert!(p.eval(&[rat(1)]).is_err());
    }

    #[test]
    fn mul_monomials() {
        assert_eq!(&x(2, 0) * &x(2, 0), RatPoly::monomial(2, &[2, 0], rat(1)));
    }

    #[test]
    fn fischer_diagonal_is_factorial() {
        // ⟨x1², x1²⟩ = 2! = 2
        let p = RatPoly::monomial(2, &[2, 0], rat(1));
        assert_eq!(fischer_inner(&p, &p).unwrap(), rat(2));
        // ⟨x1³, x1³⟩ = 3! = 6
        let q = RatPoly::monomial(1, &[3], rat(1));
        assert_eq!(fischer_inner(&q, &q).unwrap(), rat(6));
    }

    #[test]
    fn fischer_off_diagonal_is_zero() {
        let p = RatPoly::monomial(2, &[1, 1], rat(1));
        let q = RatPoly::monomial(2, &[2, 0], rat(1));
        assert_eq!(fischer_inner(&p, &q).unwrap(), rat(0));
    }

    #[test]
    fn fischer_rejects_degree_mismatch() {
        let p = RatPoly::monomial(2, &[2, 0], rat(1));
        let q = RatPoly::monomial(2, &[1, 0], rat(1));
        assert!(matches!(
            fischer_inner(&p, &q),
            Err(Error::DegreeMismatch { .. })
        ));
        let inhom = &p + &q;
        assert!(fischer_inner(&inhom, &p).is_err());
    }

    #[test]
    fn dot_power_single_axis() {
        let xi = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let p = dot_power(&xi, 3);
        assert_eq!(p.num_terms(), 1);
        let c = p.coeff(&Monomial::new(vec![3, 0, 0])).unwrap();
        assert!((c - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dot_power_isotropic_pair() {
        // ξ = (1, i, 0): (z·ξ̄)² = (x1 − i x2)² = x1² − 2i x1 x2 − x2²
        let xi = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ];
        let p = dot_power(&xi, 2);
        let c11 = p.coeff(&Monomial::new(vec![1, 1, 0])).unwrap();
        assert!((c11 - Complex64::new(0.0, -2.0)).norm() < 1e-15);
        let c20 = p.coeff(&Monomial::new(vec![2, 0, 0])).unwrap();
        assert!((c20 - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let c02 = p.coeff(&Monomial::new(vec![0, 2, 0])).unwrap();
        assert!((c02 - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        // Its Laplacian vanishes on the isotropic cone.
        let lap = p.laplacian();
        assert!(lap.terms().all(|(_, c)| c.norm() < 1e-14));
    }

    #[test]
    fn dot_power_sum_vector() {
        let xi = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let p = dot_power(&xi, 1);
        assert_eq!(p.num_terms(), 2);
    }

    #[test]
    fn display_round_trip() {
        let p = parse_rational("3/2*x1^2*x2 - x3 + 1", Some(3)).unwrap();
        let q = parse_rational(&p.to_string(), Some(3)).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.degree(), Some(3));
    }

    #[test]
    fn json_round_trip() {
        let p = parse_rational("3/2*x1^2*x2 - x3 + 1", Some(3)).unwrap();
        let v = p.to_json();
        let q = RatPoly::from_json(&v).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn scalar_display_round_trips() {
        let r = Scalar::Rational(BigRational::new(BigInt::from(3), BigInt::from(2)));
        assert_eq!(r.to_string(), "3/2");
        assert_eq!(r.to_c64(), Complex64::new(1.5, 0.0));
        let c = Scalar::Complex(Complex64::new(1.0, 2.0));
        assert_eq!(c.to_string(), "1+2i");
        let parsed = Complex64::parse_coeff(&c.to_string()).unwrap();
        assert!((parsed - c.to_c64()).norm() < 1e-15);
    }

    #[test]
    fn graded_lex_iteration_order() {
        let p = parse_rational("x1^2 + x1*x2 + x2^2 + x1 + x2 + 1", Some(2)).unwrap();
        let order: Vec<Vec<u32>> = p.terms().map(|(m, _)| m.exps().to_vec()).collect();
        assert_eq!(
            order,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![1, 0],
                vec![0, 2],
                vec![1, 1],
                vec![2, 0],
            ]
        );
    }
}

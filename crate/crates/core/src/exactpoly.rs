//! Exact scalar and polynomial arithmetic.
//!
//! Exponents of the inner variable are stored doubled so that half-integer
//! powers such as `X^{1/2}` are represented exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in lowest terms with positive denominator.
pub type RatScalar = BigRational;

pub fn rat(n: i64) -> RatScalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> RatScalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a doubled exponent as `k` or `k/2`.
pub fn format_exp2(e2: i64) -> String {
    if e2 % 2 == 0 {
        (e2 / 2).to_string()
    } else {
        format!("{}/2", e2)
    }
}

/// Parses `k` or `k/2` into a doubled exponent.
pub fn parse_exp2(s: &str) -> Result<i64> {
    let s = s.trim();
    let bad = || Error::Usage(format!("bad half-integer `{s}`"));
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        match den.trim() {
            "1" => Ok(2 * num),
            "2" => Ok(num),
            _ => Err(bad()),
        }
    } else {
        let v: i64 = s.parse().map_err(|_| bad())?;
        Ok(2 * v)
    }
}

/// The name of the inner variable of a [`HalfLaurent`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    X,
    #[serde(rename = "q")]
    Q,
    #[serde(rename = "u")]
    U,
}

impl Var {
    pub fn symbol(self) -> &'static str {
        match self {
            Var::X => "X",
            Var::Q => "q",
            Var::U => "u",
        }
    }
}

/// Sparse univariate Laurent polynomial with exponents in `(1/2)Z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HalfLaurent {
    var: Var,
    terms: BTreeMap<i64, RatScalar>,
}

impl HalfLaurent {
    pub fn zero(var: Var) -> Self {
        HalfLaurent { var, terms: BTreeMap::new() }
    }

    pub fn one(var: Var) -> Self {
        Self::monomial(var, 0, rat(1))
    }

    pub fn constant(var: Var, c: RatScalar) -> Self {
        Self::monomial(var, 0, c)
    }

    /// `c * var^(exp2/2)`.
    pub fn monomial(var: Var, exp2: i64, c: RatScalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp2, c);
        }
        HalfLaurent { var, terms }
    }

    /// `var^(exp2/2)`.
    pub fn power(var: Var, exp2: i64) -> Self {
        Self::monomial(var, exp2, rat(1))
    }

    /// Dense integer coefficients, lowest at integer exponent 0.
    pub fn from_coeffs(var: Var, coeffs: &[i64]) -> Self {
        Self::from_terms(var, coeffs.iter().enumerate().map(|(i, &c)| (2 * i as i64, rat(c))))
    }

    /// Builds from `(doubled exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms<I: IntoIterator<Item = (i64, RatScalar)>>(var: Var, it: I) -> Self {
        let mut out = Self::zero(var);
        for (e, c) in it {
            out.add_term(e, c);
        }
        out
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn retag(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &RatScalar)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn coeff(&self, exp2: i64) -> RatScalar {
        self.terms.get(&exp2).cloned().unwrap_or_else(RatScalar::zero)
    }

    pub fn min_exp2(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp2(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn has_half_integer_exponent(&self) -> bool {
        self.terms.keys().any(|e| e % 2 != 0)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    pub fn add_term(&mut self, exp2: i64, c: RatScalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp2).or_insert_with(RatScalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exp2);
        }
    }

    /// Multiplies by `var^(exp2/2)`.
    pub fn shift(&self, exp2: i64) -> Self {
        HalfLaurent { var: self.var, terms: self.terms.iter().map(|(e, c)| (e + exp2, c.clone())).collect() }
    }

    pub fn scale(&self, c: &RatScalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.var);
        }
        HalfLaurent { var: self.var, terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    /// Replaces the variable by its inverse.
    pub fn substitute_inverse(&self) -> Self {
        HalfLaurent { var: self.var, terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect() }
    }

    /// Replaces `var` by `var^k` for an integer `k`.
    pub fn stretch(&self, k: i64) -> Self {
        HalfLaurent { var: self.var, terms: self.terms.iter().map(|(e, c)| (e * k, c.clone())).collect() }
    }

    /// Product with a variable-tag check.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.var != other.var {
            return Err(Error::Usage(format!(
                "cannot multiply polynomials in {} and {}",
                self.var.symbol(),
                other.var.symbol()
            )));
        }
        Ok(self.mul_raw(other))
    }

    fn mul_raw(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.var);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.var);
        for _ in 0..k {
            acc = acc.mul_raw(self);
        }
        acc
    }

    /// Exact evaluation at `var = p`.
    ///
    /// Half-integer exponents need `p` to be a perfect square.
    pub fn eval_exact(&self, p: &BigInt) -> Result<RatScalar> {
        let root = if self.has_half_integer_exponent() {
            let r = p.sqrt();
            if &(&r * &r) != p {
                return Err(Error::Precision(format!(
                    "half-integer exponent at non-square {p}; use floating evaluation"
                )));
            }
            Some(r)
        } else {
            None
        };
        let mut acc = RatScalar::zero();
        for (e, c) in &self.terms {
            let (base, exp) = match &root {
                Some(r) => (r.clone(), *e),
                None => (p.clone(), e / 2),
            };
            acc += c * rat_pow(&base, exp)?;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.terms.iter().map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * x.powf(*e as f64 / 2.0)).sum()
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> RatScalar {
        self.terms.values().map(|c| c.abs()).fold(RatScalar::zero(), |a, b| a + b)
    }

    /// `c·v^a·[n]_v` when the polynomial is a scaled q-integer with `n ≥ 2`.
    fn as_q_integer(&self) -> Option<(RatScalar, i64, usize)> {
        let (e0, c0) = self.terms.iter().next()?;
        let n = self.terms.len();
        if n < 2 || e0 % 2 != 0 {
            return None;
        }
        let run = self.terms.iter().enumerate().all(|(i, (e, c))| *e == e0 + 2 * i as i64 && c == c0);
        run.then(|| (c0.clone(), *e0, n))
    }

    pub fn to_latex(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let v = self.var.symbol();
        if let Some((c, e, n)) = self.as_q_integer() {
            let mut s = String::new();
            if c.is_negative() {
                s.push('-');
            }
            if !c.abs().is_one() {
                s.push_str(&latex_rat(&c.abs()));
            }
            match e {
                0 => {}
                2 => s.push_str(v),
                e => s.push_str(&format!("{v}^{{{}}}", format_exp2(e))),
            }
            s.push_str(&format!("[{n}]_{v}"));
            return s;
        }
        let mut s = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { "-" } else { "+" });
            }
            let mono = match *e {
                0 => String::new(),
                2 => v.to_string(),
                e => format!("{v}^{{{}}}", format_exp2(e)),
            };
            if mono.is_empty() || !a.is_one() {
                s.push_str(&latex_rat(&a));
            }
            s.push_str(&mono);
        }
        s
    }
}

fn latex_rat(r: &RatScalar) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

/// `base^exp` as a rational, allowing negative exponents.
pub fn rat_pow(base: &BigInt, exp: i64) -> Result<RatScalar> {
    if exp >= 0 {
        Ok(RatScalar::from_integer(num_traits::pow(base.clone(), exp as usize)))
    } else if base.is_zero() {
        Err(Error::Domain("zero to a negative power".into()))
    } else {
        Ok(RatScalar::new(BigInt::one(), num_traits::pow(base.clone(), (-exp) as usize)))
    }
}

impl fmt::Display for HalfLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let v = self.var.symbol();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if *e == 0 {
                write!(f, "{a}")?;
                continue;
            }
            if !a.is_one() {
                write!(f, "{a}*")?;
            }
            if *e == 2 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{}", format_exp2(*e))?;
            }
        }
        Ok(())
    }
}

impl Add for &HalfLaurent {
    type Output = HalfLaurent;
    fn add(self, rhs: &HalfLaurent) -> HalfLaurent {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for HalfLaurent {
    type Output = HalfLaurent;
    fn add(mut self, rhs: HalfLaurent) -> HalfLaurent {
        self += &rhs;
        self
    }
}

impl AddAssign<&HalfLaurent> for HalfLaurent {
    fn add_assign(&mut self, rhs: &HalfLaurent) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl Neg for &HalfLaurent {
    type Output = HalfLaurent;
    fn neg(self) -> HalfLaurent {
        HalfLaurent { var: self.var, terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Sub for &HalfLaurent {
    type Output = HalfLaurent;
    fn sub(self, rhs: &HalfLaurent) -> HalfLaurent {
        self + &(-rhs)
    }
}

/// Panics on a variable-tag mismatch; use [`HalfLaurent::try_mul`] for the checked form.
impl Mul for &HalfLaurent {
    type Output = HalfLaurent;
    fn mul(self, rhs: &HalfLaurent) -> HalfLaurent {
        self.try_mul(rhs).expect("variable tags must agree")
    }
}

impl Mul for HalfLaurent {
    type Output = HalfLaurent;
    fn mul(self, rhs: HalfLaurent) -> HalfLaurent {
        &self * &rhs
    }
}

/// Checked product.
pub fn hl_mul(a: &HalfLaurent, b: &HalfLaurent) -> Result<HalfLaurent> {
    a.try_mul(b)
}

pub fn hl_substitute_inverse(a: &HalfLaurent) -> HalfLaurent {
    a.substitute_inverse()
}

#[derive(Serialize, Deserialize)]
struct HalfLaurentRepr {
    var: Var,
    terms: Vec<(String, String)>,
}

impl Serialize for HalfLaurent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HalfLaurentRepr {
            var: self.var,
            terms: self.terms.iter().map(|(e, c)| (format_exp2(*e), c.to_string())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HalfLaurent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = HalfLaurentRepr::deserialize(d)?;
        let mut out = HalfLaurent::zero(repr.var);
        for (e, c) in repr.terms {
            let e2 = parse_exp2(&e).map_err(D::Error::custom)?;
            let c: RatScalar = c.parse().map_err(|_| D::Error::custom(format!("bad rational `{c}`")))?;
            out.add_term(e2, c);
        }
        Ok(out)
    }
}

/// Serde adapter writing big integers and rationals as decimal strings.
pub mod decimal {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T: FromStr, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|_| D::Error::custom(format!("bad number `{s}`")))
    }
}

/// The outer variable of a [`SeriesPoly`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outer {
    T,
    Y,
}

impl Outer {
    pub fn symbol(self) -> &'static str {
        match self {
            Outer::T => "T",
            Outer::Y => "Y",
        }
    }
}

/// Polynomial in an outer variable (`T` or `Y`) with [`HalfLaurent`] coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeriesPoly {
    outer: Outer,
    inner: Var,
    coeffs: Vec<HalfLaurent>,
}

impl SeriesPoly {
    pub fn zero(outer: Outer, inner: Var) -> Self {
        SeriesPoly { outer, inner, coeffs: Vec::new() }
    }

    pub fn one(outer: Outer, inner: Var) -> Self {
        SeriesPoly { outer, inner, coeffs: vec![HalfLaurent::one(inner)] }
    }

    pub fn from_coeffs(outer: Outer, inner: Var, coeffs: Vec<HalfLaurent>) -> Self {
        let coeffs = coeffs.into_iter().map(|c| c.retag(inner)).collect();
        let mut s = SeriesPoly { outer, inner, coeffs };
        s.trim();
        s
    }

    /// `c * outer^d`.
    pub fn monomial(outer: Outer, d: usize, c: HalfLaurent) -> Self {
        let inner = c.var();
        let mut coeffs = vec![HalfLaurent::zero(inner); d];
        coeffs.push(c);
        Self::from_coeffs(outer, inner, coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn outer(&self) -> Outer {
        self.outer
    }

    pub fn inner(&self) -> Var {
        self.inner
    }

    pub fn with_outer(mut self, outer: Outer) -> Self {
        self.outer = outer;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[HalfLaurent] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> HalfLaurent {
        self.coeffs.get(d).cloned().unwrap_or_else(|| HalfLaurent::zero(self.inner))
    }

    pub fn add_at(&mut self, d: usize, c: &HalfLaurent) {
        if self.coeffs.len() <= d {
            self.coeffs.resize(d + 1, HalfLaurent::zero(self.inner));
        }
        self.coeffs[d] += c;
        self.trim();
    }

    /// Replaces the outer variable `Z` by `Z^k`.
    pub fn stretch_outer(&self, k: usize) -> Self {
        let mut out = Self::zero(self.outer, self.inner);
        for (d, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.add_at(d * k, c);
            }
        }
        out
    }

    /// Multiplies by `outer^k`.
    pub fn shift_outer(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![HalfLaurent::zero(self.inner); k];
        coeffs.extend(self.coeffs.iter().cloned());
        SeriesPoly { outer: self.outer, inner: self.inner, coeffs }
    }

    pub fn map_coeffs<F: Fn(&HalfLaurent) -> HalfLaurent>(&self, f: F) -> Self {
        Self::from_coeffs(self.outer, self.inner, self.coeffs.iter().map(f).collect())
    }

    pub fn substitute_inner_inverse(&self) -> Self {
        self.map_coeffs(|c| c.substitute_inverse())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.outer, self.inner);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out.add_at(i + j, &(a * &b.clone().retag(self.inner)));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (d, c) in other.coeffs.iter().enumerate() {
            out.add_at(d, &c.clone().retag(self.inner));
        }
        out
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integral())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_nonnegative())
    }

    /// Exact value at inner variable `p` and outer variable `t`.
    pub fn eval_exact(&self, p: &BigInt, t: &RatScalar) -> Result<RatScalar> {
        let mut acc = RatScalar::zero();
        let mut tp = RatScalar::one();
        for c in &self.coeffs {
            acc += c.eval_exact(p)? * &tp;
            tp *= t;
        }
        Ok(acc)
    }

    /// Coefficients in the outer variable after setting the inner variable to `p`.
    pub fn specialize_inner(&self, p: &BigInt) -> Result<Vec<RatScalar>> {
        self.coeffs.iter().map(|c| c.eval_exact(p)).collect()
    }

    pub fn eval_f64(&self, x: f64, t: f64) -> f64 {
        let mut acc = 0.0;
        let mut tp = 1.0;
        for c in &self.coeffs {
            acc += c.eval_f64(x) * tp;
            tp *= t;
        }
        acc
    }

    pub fn to_latex(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let o = self.outer.symbol();
        let mut parts = Vec::new();
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = match d {
                0 => String::new(),
                1 => o.to_string(),
                d => format!("{o}^{{{d}}}"),
            };
            let body = if mono.is_empty() {
                c.to_latex()
            } else if c.is_one() {
                mono
            } else if c.len() == 1 || c.as_q_integer().is_some() {
                format!("{}{}", c.to_latex(), mono)
            } else {
                format!("({}){}", c.to_latex(), mono)
            };
            parts.push(body);
        }
        parts.join("+").replace("+-", "-")
    }
}

impl fmt::Display for SeriesPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let o = self.outer.symbol();
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono = match d {
                0 => String::new(),
                1 => o.to_string(),
                d => format!("{o}^{d}"),
            };
            if mono.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "({c})*{mono}")?;
            }
        }
        Ok(())
    }
}

/// Specialization `X = p`, outer variable `= t`.
pub trait EvalAtPrime {
    fn eval_at_prime(&self, p: u64, t: &RatScalar) -> Result<RatScalar>;
}

fn check_prime_arg(p: u64) -> Result<BigInt> {
    if p < 2 {
        return Err(Error::Usage(format!("evaluation point must be >= 2, got {p}")));
    }
    Ok(BigInt::from(p))
}

impl EvalAtPrime for HalfLaurent {
    fn eval_at_prime(&self, p: u64, _t: &RatScalar) -> Result<RatScalar> {
        self.eval_exact(&check_prime_arg(p)?)
    }
}

impl EvalAtPrime for SeriesPoly {
    fn eval_at_prime(&self, p: u64, t: &RatScalar) -> Result<RatScalar> {
        self.eval_exact(&check_prime_arg(p)?, t)
    }
}

pub fn eval_at_prime<E: EvalAtPrime>(a: &E, p: u64, t: &RatScalar) -> Result<RatScalar> {
    a.eval_at_prime(p, t)
}

/// Monomial key of an [`Mpoly`]: powers of `T`, `u`, and the coefficient of the
/// symbolic parameter `B` in the exponent of `X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mono {
    pub t: i64,
    pub u: i64,
    pub b: i64,
}

/// Laurent polynomial in `(X, u, T)` with an optional symbolic `X^{kB}` factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mpoly {
    var: Var,
    terms: BTreeMap<Mono, HalfLaurent>,
}

impl Mpoly {
    pub fn zero(var: Var) -> Self {
        Mpoly { var, terms: BTreeMap::new() }
    }

    pub fn one(var: Var) -> Self {
        Self::term(HalfLaurent::one(var), Mono { t: 0, u: 0, b: 0 })
    }

    pub fn term(c: HalfLaurent, m: Mono) -> Self {
        let mut out = Self::zero(c.var());
        out.add_term(m, &c);
        out
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &HalfLaurent)> + '_ {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Mono) -> HalfLaurent {
        self.terms.get(&m).cloned().unwrap_or_else(|| HalfLaurent::zero(self.var))
    }

    pub fn add_term(&mut self, m: Mono, c: &HalfLaurent) {
        if c.is_zero() {
            return;
        }
        let var = self.var;
        let entry = self.terms.entry(m).or_insert_with(|| HalfLaurent::zero(var));
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add_assign(&mut self, other: &Mpoly) {
        for (m, c) in &other.terms {
            self.add_term(*m, c);
        }
    }

    pub fn add(&self, other: &Mpoly) -> Mpoly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn mul(&self, other: &Mpoly) -> Mpoly {
        let mut out = Mpoly::zero(self.var);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = Mono { t: ma.t + mb.t, u: ma.u + mb.u, b: ma.b + mb.b };
                out.add_term(m, &(ca * &cb.clone().retag(self.var)));
            }
        }
        out
    }

    /// Multiplies by `X^{x2/2} u^u T^t X^{bB}`.
    pub fn shift(&self, x2: i64, m: Mono) -> Mpoly {
        Mpoly {
            var: self.var,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (Mono { t: k.t + m.t, u: k.u + m.u, b: k.b + m.b }, c.shift(x2)))
                .collect(),
        }
    }

    /// `(X, u, T) -> (X^{-1}, u^{-1}, T^{-1})`; the symbolic `X^{kB}` inverts with `X`.
    pub fn invert_all(&self) -> Mpoly {
        Mpoly {
            var: self.var,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (Mono { t: -k.t, u: -k.u, b: -k.b }, c.substitute_inverse()))
                .collect(),
        }
    }

    /// `X -> X^{-1}` only.
    pub fn invert_x(&self) -> Mpoly {
        Mpoly {
            var: self.var,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (Mono { t: k.t, u: k.u, b: -k.b }, c.substitute_inverse()))
                .collect(),
        }
    }

    pub fn retag(self, var: Var) -> Mpoly {
        Mpoly { var, terms: self.terms.into_iter().map(|(k, c)| (k, c.retag(var))).collect() }
    }

    /// Terms whose `T`-degree has the given parity.
    pub fn parity_part(&self, odd: bool) -> Mpoly {
        Mpoly {
            var: self.var,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| (k.t.rem_euclid(2) == 1) == odd)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Fixes `B = b2/2`.
    pub fn fix_b(&self, b2: i64) -> Mpoly {
        let mut out = Mpoly::zero(self.var);
        for (k, c) in &self.terms {
            out.add_term(Mono { t: k.t, u: k.u, b: 0 }, &c.shift(k.b * b2));
        }
        out
    }

    /// Sets `u = X^{A}`, `T -> X^{A} T`, `B = b2/2` (with `A = a2/2`) and returns a
    /// polynomial in `T`.
    pub fn specialize(&self, a2: i64, b2: i64) -> Result<SeriesPoly> {
        let mut out = SeriesPoly::zero(Outer::T, self.var);
        for (k, c) in &self.terms {
            if k.t < 0 {
                return Err(Error::Internal("negative T-degree in specialization".into()));
            }
            let x2 = (k.u + k.t) * a2 + k.b * b2;
            out.add_at(k.t as usize, &c.shift(x2));
        }
        Ok(out)
    }

    /// Sets `u = 1` and `B = 0`, keeping `T`.
    pub fn at_u_one(&self) -> Result<SeriesPoly> {
        self.specialize(0, 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| c.is_nonnegative())
    }
}

impl fmt::Display for Mpoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if k.b != 0 {
                write!(f, "*X^({}B)", k.b)?;
            }
            if k.u != 0 {
                write!(f, "*u^{}", k.u)?;
            }
            if k.t != 0 {
                write!(f, "*T^{}", k.t)?;
            }
        }
        Ok(())
    }
}

/// One record of a [`TermTable`]: `wPoly * var^{xExp} * u^{uExp} * T^{tDeg} * X^{bCoef*B}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    #[serde(rename = "wPoly")]
    pub w_poly: HalfLaurent,
    /// Doubled exponent of the inner variable.
    #[serde(rename = "xExp2")]
    pub x_exp2: i64,
    #[serde(rename = "uExp")]
    pub u_exp: i64,
    #[serde(rename = "tDeg")]
    pub t_deg: u32,
    #[serde(rename = "bCoef", default)]
    pub b_coef: i64,
}

/// Unsimplified list of terms, one per summation index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermTable {
    pub var: Var,
    pub terms: Vec<Term>,
}

impl TermTable {
    pub fn new(var: Var) -> Self {
        TermTable { var, terms: Vec::new() }
    }

    pub fn push(&mut self, t: Term) {
        self.terms.push(t);
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_t_deg(&self) -> u32 {
        self.terms.iter().map(|t| t.t_deg).max().unwrap_or(0)
    }

    /// Collects like terms.
    pub fn to_mpoly(&self) -> Mpoly {
        let mut out = Mpoly::zero(self.var);
        for t in &self.terms {
            out.add_term(
                Mono { t: t.t_deg as i64, u: t.u_exp, b: t.b_coef },
                &t.w_poly.shift(t.x_exp2).retag(self.var),
            );
        }
        out
    }
}

/// Greatest common divisor helper for `i64`.
pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(coeffs: &[i64]) -> HalfLaurent {
        HalfLaurent::from_coeffs(Var::X, coeffs)
    }

    #[test]
    fn half_exponents_add() {
        let h = HalfLaurent::power(Var::X, 1);
        assert_eq!(&h * &h, HalfLaurent::power(Var::X, 2));
    }

    #[test]
    fn binomial_square() {
        assert_eq!(&x(&[1, 1]) * &x(&[1, 1]), x(&[1, 2, 1]));
    }

    #[test]
    fn shift_by_inverse() {
        let a = HalfLaurent::from_coeffs(Var::Q, &[0, 1, 1]);
        let b = HalfLaurent::power(Var::Q, -2);
        assert_eq!(&a * &b, HalfLaurent::from_coeffs(Var::Q, &[1, 1]));
    }

    #[test]
    fn tag_mismatch_is_usage_error() {
        let a = HalfLaurent::one(Var::X);
        let b = HalfLaurent::one(Var::Q);
        assert!(matches!(hl_mul(&a, &b), Err(Error::Usage(_))));
    }

    #[test]
    fn inverse_examples() {
        let a = HalfLaurent::from_coeffs(Var::Q, &[1, 1]);
        let inv = a.substitute_inverse();
        assert_eq!(inv.to_string(), "q^-1 + 1");
        assert_eq!(HalfLaurent::power(Var::Q, 6).substitute_inverse(), HalfLaurent::power(Var::Q, -6));
        let b = HalfLaurent::from_terms(Var::X, [(1, rat(1)), (-2, rat(2))]);
        let expect = HalfLaurent::from_terms(Var::X, [(-1, rat(1)), (2, rat(2))]);
        assert_eq!(b.substitute_inverse(), expect);
    }

    #[test]
    fn eval_examples() {
        let w = SeriesPoly::from_coeffs(Outer::T, Var::X, vec![x(&[1]), x(&[0, 1]), x(&[0, 0, 0, 0, 0, 1])]);
        let v = w.eval_at_prime(2, &rat_frac(1, 128)).unwrap();
        assert_eq!(v, rat(1) + rat_frac(2, 128) + rat_frac(32, 128 * 128));
        let one_plus_t = SeriesPoly::from_coeffs(Outer::T, Var::X, vec![x(&[1]), x(&[1])]);
        assert_eq!(one_plus_t.eval_at_prime(3, &rat(0)).unwrap(), rat(1));
        assert_eq!(x(&[0, 0, 1]).eval_at_prime(5, &rat(0)).unwrap(), rat(25));
    }

    #[test]
    fn half_integer_needs_square() {
        let h = HalfLaurent::power(Var::X, 1);
        assert!(matches!(h.eval_at_prime(2, &rat(0)), Err(Error::Precision(_))));
        assert_eq!(h.eval_at_prime(9, &rat(0)).unwrap(), rat(3));
    }

    #[test]
    fn canonical_text() {
        let a = HalfLaurent::from_terms(Var::X, [(-1, rat(2)), (0, rat(1)), (3, rat(-1))]);
        assert_eq!(a.to_string(), "2*X^-1/2 + 1 - X^3/2");
    }

    #[test]
    fn json_round_trip() {
        let a = HalfLaurent::from_terms(Var::X, [(-1, rat_frac(2, 3)), (4, rat(1))]);
        let s = serde_json::to_string(&a).unwrap();
        let b: HalfLaurent = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}

//! Sparse exact polynomials over the rationals in the commuting variables
//! `a_{ij}` and `t_i`, plus truncated power series graded by `t`-degree.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A polynomial variable: a matrix entry `a_{ij}` or a grading variable `t_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarId {
    A(u8, u8),
    T(u8),
}

impl VarId {
    pub fn is_t(self) -> bool {
        matches!(self, VarId::T(_))
    }

    fn parse(s: &str) -> Result<Self> {
        let bad = || Error::parse("variable", s.to_string());
        let parts: Vec<&str> = s.split('_').collect();
        match parts.as_slice() {
            ["t", i] => Ok(VarId::T(i.parse().map_err(|_| bad())?)),
            ["a", i, j] => Ok(VarId::A(
                i.parse().map_err(|_| bad())?,
                j.parse().map_err(|_| bad())?,
            )),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarId::A(i, j) => write!(f, "a_{i}_{j}"),
            VarId::T(i) => write!(f, "t_{i}"),
        }
    }
}

/// Exponent vector stored sparsely, sorted by variable, without zero exponents.
///
/// Ordered by `t`-degree first, then lexicographically on the sparse vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: Vec<(VarId, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: VarId) -> Self {
        Monomial { exps: vec![(v, 1)] }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, u32)>) -> Self {
        let mut acc: BTreeMap<VarId, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *acc.entry(v).or_insert(0) += e;
        }
        Monomial {
            exps: acc.into_iter().filter(|&(_, e)| e > 0).collect(),
        }
    }

    pub fn exponents(&self) -> &[(VarId, u32)] {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn t_degree(&self) -> u32 {
        self.exps
            .iter()
            .filter(|(v, _)| v.is_t())
            .map(|&(_, e)| e)
            .sum()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.exps
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map(|i| self.exps[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            let (a, b) = (self.exps[i], other.exps[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.exps[i..]);
        out.extend_from_slice(&other.exps[j..]);
        Monomial { exps: out }
    }

    /// Renames every variable; exponents of variables that collide are added.
    pub fn map_vars(&self, f: impl Fn(VarId) -> VarId) -> Monomial {
        Monomial::from_pairs(self.exps.iter().map(|&(v, e)| (f(v), e)))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.t_degree()
            .cmp(&other.t_degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("1");
        }
        for (n, (v, e)) in self.exps.iter().enumerate() {
            if n > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Exact sparse polynomial; no stored zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::term(c, Monomial::one())
    }

    pub fn from_int(n: i64) -> Self {
        Poly::constant(rational(n))
    }

    pub fn term(c: BigRational, mono: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        Poly { terms }
    }

    pub fn var(v: VarId) -> Self {
        Poly::term(BigRational::one(), Monomial::var(v))
    }

    /// `t_i`, 1-based.
    pub fn t(i: usize) -> Self {
        Poly::var(VarId::T(i as u8))
    }

    /// `a_{ij}`, 1-based.
    pub fn a(i: usize, j: usize) -> Self {
        Poly::var(VarId::A(i as u8, j as u8))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (graded) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> BigRational {
        self.terms
            .get(mono)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, mono: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// The value when `self` has no variables.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.mul(mono), v.clone()))
                .collect(),
        }
    }

    /// Highest `t`-degree present, `None` for the zero polynomial.
    pub fn t_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::t_degree).max()
    }

    /// The part of `t`-degree exactly `d`.
    pub fn t_component(&self, d: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.t_degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Drops every term of `t`-degree above `cap`.
    pub fn truncate(&self, cap: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.t_degree() <= cap)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Product with terms above `t`-degree `cap` never materialized.
    pub fn mul_truncated(&self, other: &Poly, cap: u32) -> Poly {
        let mut acc: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        let rhs: Vec<(&Monomial, &BigRational, u32)> = other
            .terms
            .iter()
            .map(|(m, c)| (m, c, m.t_degree()))
            .collect();
        for (ma, ca) in &self.terms {
            let da = ma.t_degree();
            if da > cap {
                continue;
            }
            for &(mb, cb, db) in &rhs {
                if da + db > cap {
                    continue;
                }
                let c = ca * cb;
                *acc.entry(ma.mul(mb)).or_insert_with(BigRational::zero) += c;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Poly { terms: acc }
    }

    pub fn map_vars(&self, f: impl Fn(VarId) -> VarId) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.map_vars(&f), c.clone());
        }
        out
    }

    /// Swaps `t_i` and `t_{i+1}` (1-based), leaving `a`-variables fixed.
    pub fn apply_transposition(&self, i: usize) -> Poly {
        let (a, b) = (i as u8, i as u8 + 1);
        self.map_vars(|v| match v {
            VarId::T(x) if x == a => VarId::T(b),
            VarId::T(x) if x == b => VarId::T(a),
            other => other,
        })
    }

    /// Sets every `t_i` equal to `t_1`.
    pub fn collapse_t(&self) -> Poly {
        self.map_vars(|v| match v {
            VarId::T(_) => VarId::T(1),
            other => other,
        })
    }

    /// Substitutes numbers for `a`-variables; variables without a value stay.
    pub fn eval_a(&self, value: impl Fn(u8, u8) -> Option<BigRational>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for &(v, e) in m.exponents() {
                match v {
                    VarId::A(i, j) => match value(i, j) {
                        Some(x) => coeff *= num_traits::pow(x, e as usize),
                        None => rest.push((v, e)),
                    },
                    VarId::T(_) => rest.push((v, e)),
                }
            }
            out.add_term(Monomial::from_pairs(rest), coeff);
        }
        out
    }

    /// Coefficients of `t_1^0 .. t_1^cap` for a polynomial in `t_1` alone.
    pub fn univariate_coeffs(&self, cap: u32) -> Result<Vec<BigRational>> {
        let mut out = vec![BigRational::zero(); cap as usize + 1];
        for (m, c) in &self.terms {
            let d = m.exponent(VarId::T(1));
            if m.degree() != d {
                return Err(Error::parse(
                    "univariate series",
                    format!("unexpected monomial {m}"),
                ));
            }
            if d <= cap {
                out[d as usize] = c.clone();
            }
        }
        Ok(out)
    }

    pub fn to_json_terms(&self) -> Vec<PolyTermJson> {
        self.terms
            .iter()
            .map(|(m, c)| PolyTermJson {
                coeff: c.to_string(),
                monomial: m
                    .exponents()
                    .iter()
                    .map(|(v, e)| (v.to_string(), *e))
                    .collect(),
            })
            .collect()
    }

    pub fn from_json_terms(terms: &[PolyTermJson]) -> Result<Poly> {
        let mut p = Poly::zero();
        for t in terms {
            let c = parse_rational(&t.coeff)?;
            let pairs = t
                .monomial
                .iter()
                .map(|(v, e)| VarId::parse(v).map(|v| (v, *e)))
                .collect::<Result<Vec<_>>>()?;
            p.add_term(Monomial::from_pairs(pairs), c);
        }
        Ok(p)
    }
}

/// One term of the JSON form `{"coeff": "p/q", "monomial": {"t_1": 2}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTermJson {
    pub coeff: String,
    pub monomial: BTreeMap<String, u32>,
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_terms().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<PolyTermJson>::deserialize(d)?;
        Poly::from_json_terms(&terms).map_err(serde::de::Error::custom)
    }
}

/// Parses `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = |d: String| Error::parse("rational", format!("{s:?}: {d}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|e| bad(format!("{e}")))?;
            let d: BigInt = d.trim().parse().map_err(|e| bad(format!("{e}")))?;
            if d.is_zero() {
                return Err(bad("zero denominator".into()));
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|e| bad(format!("{e}")))?;
            Ok(BigRational::from_integer(n))
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (n, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut acc: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                *acc.entry(ma.mul(mb)).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Poly { terms: acc }
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

/// A polynomial known only up to `t`-degree `cap`; `a`-degrees are unbounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    poly: Poly,
    cap: u32,
}

impl TruncatedSeries {
    pub fn new(poly: &Poly, cap: u32) -> Self {
        TruncatedSeries {
            poly: poly.truncate(cap),
            cap,
        }
    }

    pub fn one(cap: u32) -> Self {
        TruncatedSeries::new(&Poly::one(), cap)
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn into_poly(self) -> Poly {
        self.poly
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Product at the smaller of the two caps.
    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let cap = self.cap.min(other.cap);
        TruncatedSeries {
            poly: self.poly.mul_truncated(&other.poly, cap),
            cap,
        }
    }

    pub fn mul_poly(&self, other: &Poly) -> TruncatedSeries {
        TruncatedSeries {
            poly: self.poly.mul_truncated(other, self.cap),
            cap: self.cap,
        }
    }

    pub fn component(&self, d: u32) -> Poly {
        self.poly.t_component(d)
    }
}

/// Inverse of `p` modulo `t`-degree above `cap`.
///
/// The `t`-degree 0 part of `p` must be exactly 1. Each graded piece of the
/// inverse is `q_d = -sum_{j=1..d} p_j q_{d-j}`.
pub fn series_inverse(p: &Poly, cap: u32) -> Result<TruncatedSeries> {
    let p0 = p.t_component(0);
    if !p0.is_one() {
        return Err(Error::NonInvertible(p0.to_string()));
    }
    let pieces: Vec<Poly> = (0..=cap).map(|d| p.t_component(d)).collect();
    let mut q: Vec<Poly> = vec![Poly::one()];
    for d in 1..=cap as usize {
        let mut qd = Poly::zero();
        for j in 1..=d {
            if pieces[j].is_zero() || q[d - j].is_zero() {
                continue;
            }
            qd -= &(&pieces[j] * &q[d - j]);
        }
        q.push(qd);
    }
    let mut poly = Poly::zero();
    for piece in &q {
        poly += piece;
    }
    Ok(TruncatedSeries { poly, cap })
}

/// `e_r(t_1, ..., t_m)`; zero when `r > m`.
pub fn elementary_sym(r: usize, m: usize) -> Poly {
    let mut out = Poly::zero();
    for combo in (1..=m as u8).combinations(r) {
        out.add_term(
            Monomial::from_pairs(combo.into_iter().map(|i| (VarId::T(i), 1))),
            BigRational::one(),
        );
    }
    out
}

/// `h_r(t_1, ..., t_m)`.
pub fn complete_sym(r: usize, m: usize) -> Poly {
    let mut out = Poly::zero();
    for combo in (1..=m as u8).combinations_with_replacement(r) {
        out.add_term(
            Monomial::from_pairs(combo.into_iter().map(|i| (VarId::T(i), 1))),
            BigRational::one(),
        );
    }
    out
}

/// Coefficient ring interface used by the rewriting and identity code, so
/// the same algorithms run over integers, rationals and polynomials.
pub trait Coeff: Clone + fmt::Debug + PartialEq + Send + Sync + Zero + One {
    fn from_int(n: i64) -> Self;
    fn accumulate(&mut self, rhs: &Self);
    fn times(&self, rhs: &Self) -> Self;
    fn scale_int(&self, n: i64) -> Self;
    /// Exact string form used in JSON output.
    fn to_exact_string(&self) -> String;
}

impl Coeff for i64 {
    fn from_int(n: i64) -> Self {
        n
    }
    fn accumulate(&mut self, rhs: &Self) {
        *self = self
            .checked_add(*rhs)
            .expect("integer coefficient overflow");
    }
    fn times(&self, rhs: &Self) -> Self {
        self.checked_mul(*rhs)
            .expect("integer coefficient overflow")
    }
    fn scale_int(&self, n: i64) -> Self {
        self.times(&n)
    }
    fn to_exact_string(&self) -> String {
        self.to_string()
    }
}

impl Coeff for BigInt {
    fn from_int(n: i64) -> Self {
        BigInt::from(n)
    }
    fn accumulate(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn scale_int(&self, n: i64) -> Self {
        self * n
    }
    fn to_exact_string(&self) -> String {
        self.to_string()
    }
}

impl Coeff for BigRational {
    fn from_int(n: i64) -> Self {
        rational(n)
    }
    fn accumulate(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn scale_int(&self, n: i64) -> Self {
        self * rational(n)
    }
    fn to_exact_string(&self) -> String {
        self.to_string()
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
}

impl One for Poly {
    fn one() -> Self {
        Poly::one()
    }
}

impl Coeff for Poly {
    fn from_int(n: i64) -> Self {
        Poly::from_int(n)
    }
    fn accumulate(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn scale_int(&self, n: i64) -> Self {
        Poly::scale(self, &rational(n))
    }
    fn to_exact_string(&self) -> String {
        self.to_string()
    }
}

//! The extended Master Theorem:
//!
//! ```text
//! ( sum_{i admissible} G(i) t_{i_1}...t_{i_l} ) * ( sum_{r = 0,1 mod k} (-1)^alpha(r) c_r(TA) ) = 1
//! ```
//!
//! `G(i)` is the coefficient of `M_i(X)` in `M_i(AX) = y_{i_1} ... y_{i_l}`
//! with `y_i = sum_j a_{ij} x_j`, computed exactly and checked grade by grade.

use std::collections::BTreeMap;

use itertools::Itertools;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::charpoly::{
    alpha, enumerate_partial_perms, second_factor, second_factor_indices, MatrixMode, SymMatrix,
};
use crate::error::{Error, Result};
use crate::polyring::{rational, Coeff, Monomial, Poly, PolyTermJson, VarId};
use crate::rewrite::{coefficient_row, reduce, LeftMultiplier, NCombination, Strategy};
use crate::words::{enumerate_admissible, AlgebraParams, Variant, Word};

/// How `G(i)` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GMethod {
    /// `G(i) = sum_j c_{i,j} a_{i_1 j_1} ... a_{i_l j_l}`, with the row
    /// `c_{i,.}` found by a forward sweep over k-reversions.
    #[default]
    PathSum,
    /// Normal form of `y_{i_1} * NF(y_{i_2} ... y_{i_l})`, built from the
    /// stored normal forms of admissible suffixes.
    Incremental,
    /// Expand `y_{i_1} ... y_{i_l}` into all `m^l` words, then reduce.
    FullExpansion,
}

fn check_dim(a: &SymMatrix, params: &AlgebraParams) -> Result<()> {
    if a.dim() != params.m() {
        return Err(Error::DimensionMismatch {
            expected: params.m(),
            got: a.dim(),
        });
    }
    Ok(())
}

fn entry_table<C>(a: &SymMatrix, f: impl Fn(&Poly) -> C) -> Vec<Vec<C>> {
    (0..a.dim())
        .map(|i| (0..a.dim()).map(|j| f(a.get(i, j))).collect())
        .collect()
}

fn product_along<C: Coeff>(entries: &[Vec<C>], i: &Word, j: &Word) -> C {
    let mut acc = C::one();
    for (&r, &c) in i.letters().iter().zip(j.letters()) {
        let e = &entries[r as usize - 1][c as usize - 1];
        if e.is_zero() {
            return C::zero();
        }
        acc = acc.times(e);
    }
    acc
}

fn g_path_sum<C: Coeff>(entries: &[Vec<C>], i: &Word, params: &AlgebraParams) -> Result<C> {
    let mut acc = C::zero();
    for (j, c) in coefficient_row(i, params)? {
        let prod = product_along(entries, i, &j);
        if !prod.is_zero() {
            acc.accumulate(&prod.scale_int(c));
        }
    }
    Ok(acc)
}

fn g_full_expansion<C: Coeff>(entries: &[Vec<C>], i: &Word, params: &AlgebraParams) -> Result<C> {
    let m = params.m() as u8;
    let mut expanded: Vec<(Word, C)> = vec![(Word::empty(), C::one())];
    for &row in i.letters() {
        let mut next = Vec::with_capacity(expanded.len() * m as usize);
        for (w, c) in &expanded {
            for col in 1..=m {
                let e = &entries[row as usize - 1][col as usize - 1];
                if e.is_zero() {
                    continue;
                }
                let mut v = w.letters().to_vec();
                v.push(col);
                next.push((Word::new(v), c.times(e)));
            }
        }
        expanded = next;
    }
    Ok(reduce(expanded, params, Strategy::Smallest)?.coeff(i))
}

/// `NF(y_{i_1}) = sum_b a_{i_1 b} x_b` prepended onto a stored suffix form.
fn extend_left<C: Coeff>(
    entries: &[Vec<C>],
    letter: u8,
    suffix: &NCombination<C>,
    lm: &mut LeftMultiplier,
) -> Result<NCombination<C>> {
    let mut acc: BTreeMap<Word, C> = BTreeMap::new();
    for (b, e) in entries[letter as usize - 1].iter().enumerate() {
        if e.is_zero() {
            continue;
        }
        let part = lm.left_mul_combination(b as u8 + 1, suffix)?;
        for (w, c) in part.iter() {
            acc.entry(w.clone())
                .or_insert_with(C::zero)
                .accumulate(&c.times(e));
        }
    }
    acc.retain(|_, c| !c.is_zero());
    Ok(crate::rewrite::from_terms(lm.params(), acc))
}

/// Suffix-indexed table of normal forms `NF(M_v(AX))` for admissible `v`.
fn incremental_table<C: Coeff>(
    entries: &[Vec<C>],
    params: &AlgebraParams,
    cap: usize,
) -> Result<BTreeMap<Word, NCombination<C>>> {
    let mut lm = LeftMultiplier::new(*params);
    let mut table: BTreeMap<Word, NCombination<C>> = BTreeMap::new();
    table.insert(Word::empty(), NCombination::basis(Word::empty(), *params)?);
    for len in 1..=cap {
        for i in enumerate_admissible(params, len, Variant::Strict) {
            let nf = extend_left(entries, i.letters()[0], &table[&i.tail()], &mut lm)?;
            table.insert(i, nf);
        }
    }
    Ok(table)
}

fn g_incremental<C: Coeff>(entries: &[Vec<C>], i: &Word, params: &AlgebraParams) -> Result<C> {
    let mut lm = LeftMultiplier::new(*params);
    let mut nf: NCombination<C> = NCombination::basis(Word::empty(), *params)?;
    for s in (0..i.len()).rev() {
        nf = extend_left(entries, i.letters()[s], &nf, &mut lm)?;
    }
    Ok(nf.coeff(i))
}

fn g_dispatch<C: Coeff>(
    entries: &[Vec<C>],
    i: &Word,
    params: &AlgebraParams,
    method: GMethod,
) -> Result<C> {
    match method {
        GMethod::PathSum => g_path_sum(entries, i, params),
        GMethod::Incremental => g_incremental(entries, i, params),
        GMethod::FullExpansion => g_full_expansion(entries, i, params),
    }
}

/// `G(i)`, the coefficient of `M_i(X)` in `M_i(AX)`.
pub fn g_coefficient(a: &SymMatrix, i: &Word, params: &AlgebraParams) -> Result<Poly> {
    g_coefficient_with(a, i, params, GMethod::PathSum)
}

pub fn g_coefficient_with(
    a: &SymMatrix,
    i: &Word,
    params: &AlgebraParams,
    method: GMethod,
) -> Result<Poly> {
    check_dim(a, params)?;
    if !i.is_admissible(params)? {
        return Err(Error::NotAdmissible(i.clone()));
    }
    match a.as_rationals() {
        Some(rows) => g_dispatch(&rows, i, params, method).map(Poly::constant),
        None => g_dispatch(&entry_table(a, Poly::clone), i, params, method),
    }
}

/// `G(i)` for every admissible `i` with `|i| <= cap`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstFactorSeries {
    params: AlgebraParams,
    cap: usize,
    mode: MatrixMode,
    coeffs: BTreeMap<Word, Poly>,
}

impl FirstFactorSeries {
    pub fn params(&self) -> AlgebraParams {
        self.params
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn mode(&self) -> MatrixMode {
        self.mode
    }

    /// `G(i)`; zero for admissible words not stored.
    pub fn g(&self, i: &Word) -> Poly {
        self.coeffs.get(i).cloned().unwrap_or_else(Poly::zero)
    }

    /// Words in graded order: by length, then lexicographically.
    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Poly)> {
        self.coeffs.iter().sorted_by_key(|(w, _)| w.len())
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `sum_i G(i) t_{i_1} ... t_{i_l}`.
    pub fn series(&self) -> Poly {
        let mut out = Poly::zero();
        for (w, g) in &self.coeffs {
            let mono = Monomial::from_pairs(w.letters().iter().map(|&c| (VarId::T(c), 1)));
            out += &g.mul_monomial(&mono);
        }
        out
    }

    /// `sum_{|i| = l} G(i)` for `l = 0..=cap`: the series at `t_1 = ... = t_m = t`.
    pub fn grade_totals(&self) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.cap + 1];
        for (w, g) in &self.coeffs {
            out[w.len()] += g;
        }
        out
    }
}

fn collect_first_factor<C: Coeff>(
    entries: &[Vec<C>],
    params: &AlgebraParams,
    cap: usize,
    method: GMethod,
    embed: impl Fn(C) -> Poly + Sync,
) -> Result<BTreeMap<Word, Poly>> {
    let mut coeffs = BTreeMap::new();
    match method {
        GMethod::Incremental => {
            for (w, nf) in incremental_table(entries, params, cap)? {
                let g = nf.coeff(&w);
                if !g.is_zero() {
                    coeffs.insert(w, embed(g));
                }
            }
        }
        _ => {
            for len in 0..=cap {
                let words: Vec<Word> = enumerate_admissible(params, len, Variant::Strict).collect();
                let values = words
                    .par_iter()
                    .map(|w| g_dispatch(entries, w, params, method))
                    .collect::<Result<Vec<C>>>()?;
                for (w, g) in words.into_iter().zip(values) {
                    if !g.is_zero() {
                        coeffs.insert(w, embed(g));
                    }
                }
            }
        }
    }
    Ok(coeffs)
}

pub fn first_factor(
    a: &SymMatrix,
    params: &AlgebraParams,
    cap: usize,
) -> Result<FirstFactorSeries> {
    first_factor_with(a, params, cap, GMethod::PathSum)
}

pub fn first_factor_with(
    a: &SymMatrix,
    params: &AlgebraParams,
    cap: usize,
    method: GMethod,
) -> Result<FirstFactorSeries> {
    check_dim(a, params)?;
    let (mode, coeffs) = match a.as_rationals() {
        Some(rows) => (
            MatrixMode::Numeric,
            collect_first_factor(&rows, params, cap, method, Poly::constant)?,
        ),
        None => (
            MatrixMode::Symbolic,
            collect_first_factor(&entry_table(a, Poly::clone), params, cap, method, |p| p)?,
        ),
    };
    Ok(FirstFactorSeries {
        params: *params,
        cap,
        mode,
        coeffs,
    })
}

/// Outcome for one `t`-degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeCheck {
    pub d: u32,
    pub ok: bool,
    pub residual_terms: usize,
}

/// The lowest failing degree and (up to 20 of) its residual terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureDump {
    pub d: u32,
    pub terms: Vec<PolyTermJson>,
}

const DUMP_LIMIT: usize = 20;

fn degree_checks(residual: &Poly, cap: u32) -> (Vec<DegreeCheck>, Option<FailureDump>) {
    let mut checks = Vec::with_capacity(cap as usize + 1);
    let mut failure = None;
    for d in 0..=cap {
        let comp = residual.t_component(d);
        let ok = comp.is_zero();
        if !ok && failure.is_none() {
            let mut terms = comp.to_json_terms();
            terms.truncate(DUMP_LIMIT);
            failure = Some(FailureDump { d, terms });
        }
        checks.push(DegreeCheck {
            d,
            ok,
            residual_terms: comp.len(),
        });
    }
    (checks, failure)
}

/// Result of checking first factor times second factor against 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MasterReport {
    pub params: AlgebraParams,
    pub cap: u32,
    pub mode: MatrixMode,
    pub pass: bool,
    pub per_degree: Vec<DegreeCheck>,
    pub first_failure: Option<FailureDump>,
}

/// Checks the identity through `t`-degree `cap`; failure is reported, not raised.
pub fn verify_master(a: &SymMatrix, params: &AlgebraParams, cap: usize) -> Result<MasterReport> {
    let ff = first_factor(a, params, cap)?;
    let sf = second_factor(a, params)?;
    Ok(master_report(&ff, &sf))
}

/// Checks a precomputed first factor against the second factor `sf`.
pub fn master_report(ff: &FirstFactorSeries, sf: &Poly) -> MasterReport {
    let cap = ff.cap() as u32;
    let product = ff.series().mul_truncated(sf, cap);
    let residual = &product - &Poly::one();
    let (per_degree, first_failure) = degree_checks(&residual, cap);
    MasterReport {
        params: ff.params(),
        cap,
        mode: ff.mode(),
        pass: first_failure.is_none(),
        per_degree,
        first_failure,
    }
}

/// The combinatorial form at `t_i = 1`, graded by word length and support size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorollaryReport {
    pub params: AlgebraParams,
    pub cap: u32,
    pub pass: bool,
    pub per_degree: Vec<DegreeCheck>,
    /// `sum_{i in Lambda(m,k,l)} sum_j c_{i,j} a_{ij}` for `l = 0..=cap`.
    pub first_bracket: Vec<String>,
    /// Graded pieces of the partial-permutation bracket, with the `(-1)^r`
    /// factor that makes it equal `sum (-1)^alpha(r) c_r(A)`.
    pub second_bracket: Vec<String>,
    /// Whether the bracket without the `(-1)^r` factor also gives 1.
    pub unsigned_bracket_pass: bool,
}

/// Evaluates the word/partial-permutation form of the identity for a numeric
/// matrix, tracking `t`-degree through a single variable.
pub fn verify_corollary(
    assignment: &[Vec<BigRational>],
    params: &AlgebraParams,
    cap: usize,
) -> Result<CorollaryReport> {
    let a = SymMatrix::from_rationals(assignment)?;
    check_dim(&a, params)?;
    let m = params.m();
    let mut first = vec![rational(0); cap + 1];
    for (len, slot) in first.iter_mut().enumerate() {
        let words: Vec<Word> = enumerate_admissible(params, len, Variant::Strict).collect();
        let parts = words
            .par_iter()
            .map(|i| g_path_sum(assignment, i, params))
            .collect::<Result<Vec<_>>>()?;
        for g in parts {
            Coeff::accumulate(slot, &g);
        }
    }

    let mut signed = vec![rational(0); m + 1];
    let mut unsigned = vec![rational(0); m + 1];
    for r in second_factor_indices(m, params.k()) {
        let mut sum = rational(0);
        for omega in enumerate_partial_perms(m, r) {
            let w = omega.weight(&a).as_constant().expect("numeric matrix");
            let w = if omega.inversions() % 2 == 0 { w } else { -w };
            sum += w;
        }
        let base = if alpha(r, params.k()).is_multiple_of(2) {
            sum
        } else {
            -sum
        };
        signed[r] = if r % 2 == 0 {
            base.clone()
        } else {
            -base.clone()
        };
        unsigned[r] = base;
    }

    let as_poly = |v: &[BigRational]| {
        let mut p = Poly::zero();
        for (d, c) in v.iter().enumerate() {
            p.add_term(Monomial::from_pairs([(VarId::T(1), d as u32)]), c.clone());
        }
        p
    };
    let cap32 = cap as u32;
    let lhs = as_poly(&first);
    let residual = &lhs.mul_truncated(&as_poly(&signed), cap32) - &Poly::one();
    let (per_degree, failure) = degree_checks(&residual, cap32);
    let unsigned_residual = &lhs.mul_truncated(&as_poly(&unsigned), cap32) - &Poly::one();

    Ok(CorollaryReport {
        params: *params,
        cap: cap32,
        pass: failure.is_none(),
        per_degree,
        first_bracket: first.iter().map(|c| c.to_string()).collect(),
        second_bracket: signed.iter().map(|c| c.to_string()).collect(),
        unsigned_bracket_pass: unsigned_residual.is_zero(),
    })
}

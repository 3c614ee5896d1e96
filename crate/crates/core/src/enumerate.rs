//! Counting consequences: admissible-word counts by three independent
//! methods, the generating function `F_{m,k}` against its closed form, the
//! permutation-run EGF, and the all-ones coefficient sums `N_m(l)`.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::charpoly::SymMatrix;
use crate::error::{Error, Result};
use crate::identity::first_factor;
use crate::polyring::{
    complete_sym, elementary_sym, series_inverse, Monomial, Poly, TruncatedSeries, VarId,
};
use crate::rewrite::{LeftMultiplier, NCombination};
use crate::words::{enumerate_admissible, AlgebraParams, Variant, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    /// Dynamic programming on (last letter, current decreasing-run length).
    Dp,
    /// Walks in the window graph of the last `k - 1` letters.
    Transfer,
    /// Coefficients of the reciprocal of the alternating denominator.
    Series,
}

impl CountMethod {
    pub const ALL: [CountMethod; 3] = [CountMethod::Dp, CountMethod::Transfer, CountMethod::Series];

    pub fn as_str(self) -> &'static str {
        match self {
            CountMethod::Dp => "dp",
            CountMethod::Transfer => "transfer",
            CountMethod::Series => "series",
        }
    }
}

impl fmt::Display for CountMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CountMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dp" => Ok(CountMethod::Dp),
            "transfer" => Ok(CountMethod::Transfer),
            "series" => Ok(CountMethod::Series),
            other => Err(Error::parse("count method", other)),
        }
    }
}

fn as_strings<S: Serializer>(values: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(values.iter().map(|v| v.to_string()))
}

/// Number of admissible words of each length `0..=L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountTable {
    pub m: usize,
    pub k: usize,
    pub variant: Variant,
    pub method: CountMethod,
    #[serde(serialize_with = "as_strings")]
    pub values: Vec<BigUint>,
}

/// Window graph: states are the words of length `k - 1`, edges append one
/// letter without completing a forbidden window of length `k`.
#[derive(Debug, Clone)]
pub struct TransferGraph {
    states: Vec<Word>,
    adjacency: Vec<Vec<usize>>,
}

impl TransferGraph {
    pub fn new(params: &AlgebraParams, variant: Variant) -> Self {
        let (m, k) = (params.m(), params.k());
        let width = k - 1;
        let states: Vec<Word> = (0..width)
            .map(|_| 1..=m as u8)
            .multi_cartesian_product()
            .map(Word::new)
            .chain(if width == 0 {
                Some(Word::empty())
            } else {
                None
            })
            .collect();
        // states are in base-m lexicographic order, so a window's index is its digits
        let index = |letters: &[u8]| {
            letters
                .iter()
                .fold(0usize, |acc, &c| acc * m + (c as usize - 1))
        };
        let adjacency = states
            .iter()
            .map(|s| {
                let l = s.letters();
                let run_closes = |c: u8| {
                    let mut window = l.to_vec();
                    window.push(c);
                    window.windows(2).all(|p| variant.continues(p[0], p[1]))
                };
                (1..=m as u8)
                    .filter(|&c| !run_closes(c))
                    .map(|c| {
                        let mut next = l.get(1..).unwrap_or(&[]).to_vec();
                        next.push(c);
                        index(&next[next.len() - width..])
                    })
                    .collect()
            })
            .collect();
        TransferGraph { states, adjacency }
    }

    pub fn states(&self) -> &[Word] {
        &self.states
    }

    pub fn successors(&self, state: usize) -> &[usize] {
        &self.adjacency[state]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    /// Word counts for lengths `0..=max_len`.
    pub fn count_words(&self, m: usize, max_len: usize) -> Vec<BigUint> {
        let width = self.states[0].len();
        let mut out: Vec<BigUint> = (0..=max_len.min(width))
            .map(|l| BigUint::from(m).pow(l as u32))
            .collect();
        let mut paths = vec![BigUint::one(); self.states.len()];
        for _ in width + 1..=max_len {
            let mut next = vec![BigUint::zero(); self.states.len()];
            for (s, count) in paths.iter().enumerate() {
                for &t in &self.adjacency[s] {
                    next[t] += count;
                }
            }
            paths = next;
            out.push(paths.iter().sum());
        }
        out
    }
}

fn count_dp(params: &AlgebraParams, max_len: usize, variant: Variant) -> Vec<BigUint> {
    let (m, k) = (params.m(), params.k());
    // table[c][r]: words ending in letter c+1 whose decreasing run has length r+1
    let mut table = vec![vec![BigUint::zero(); k - 1]; m];
    let mut out = vec![BigUint::one()];
    for len in 1..=max_len {
        let mut next = vec![vec![BigUint::zero(); k - 1]; m];
        for (c, slot) in next.iter_mut().enumerate() {
            if len == 1 {
                slot[0] = BigUint::one();
                continue;
            }
            for (prev, runs) in table.iter().enumerate() {
                for (r, count) in runs.iter().enumerate() {
                    if count.is_zero() {
                        continue;
                    }
                    let run = if variant.continues(prev as u8, c as u8) {
                        r + 1
                    } else {
                        0
                    };
                    if run < k - 1 {
                        slot[run] += count;
                    }
                }
            }
        }
        table = next;
        out.push(table.iter().flatten().sum());
    }
    out
}

/// The univariate denominator at `t_1 = ... = t_m = t`.
///
/// Strict: `1 - m t + C(m,k) t^k - C(m,k+1) t^{k+1} + C(m,2k) t^{2k} - ...`.
/// Weak: the same pattern with `h_r(t,...,t) = C(m+r-1, r) t^r`, an infinite
/// series truncated at `cap`.
pub fn count_denominator(params: &AlgebraParams, variant: Variant, cap: usize) -> Poly {
    let (m, k) = (params.m(), params.k());
    let top = match variant {
        Variant::Strict => m.min(cap),
        Variant::Weak => cap,
    };
    let mut p = Poly::zero();
    for r in (0..=top).filter(|r| r % k <= 1) {
        let c = match variant {
            Variant::Strict => binomial(BigInt::from(m), BigInt::from(r)),
            Variant::Weak => binomial(BigInt::from(m + r) - 1, BigInt::from(r)),
        };
        let c = if r % k == 0 { c } else { -c };
        p.add_term(
            Monomial::from_pairs([(VarId::T(1), r as u32)]),
            BigRational::from_integer(c),
        );
    }
    p
}

fn to_count(c: &BigRational) -> BigUint {
    assert!(
        c.is_integer() && !c.is_negative(),
        "count coefficient {c} is not a natural number"
    );
    c.to_integer().to_biguint().expect("nonnegative")
}

fn count_series(params: &AlgebraParams, max_len: usize, variant: Variant) -> Result<Vec<BigUint>> {
    let inv = series_inverse(&count_denominator(params, variant, max_len), max_len as u32)?;
    Ok(inv
        .poly()
        .univariate_coeffs(max_len as u32)?
        .iter()
        .map(to_count)
        .collect())
}

pub fn count_admissible(
    params: &AlgebraParams,
    max_len: usize,
    variant: Variant,
    method: CountMethod,
) -> Result<CountTable> {
    let values = match method {
        CountMethod::Dp => count_dp(params, max_len, variant),
        CountMethod::Transfer => {
            TransferGraph::new(params, variant).count_words(params.m(), max_len)
        }
        CountMethod::Series => count_series(params, max_len, variant)?,
    };
    Ok(CountTable {
        m: params.m(),
        k: params.k(),
        variant,
        method,
        values,
    })
}

/// Both sides of `F_{m,k} = 1 / (alternating symmetric-function sum)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FSeriesCheck {
    pub cap: u32,
    pub variant: Variant,
    /// Sum of `t_{i_1} ... t_{i_l}` over admissible words, `l <= cap`.
    pub lhs: TruncatedSeries,
    pub denominator: Poly,
    pub rhs: TruncatedSeries,
    pub equal: bool,
}

/// `1 - e_1 + e_k - e_{k+1} + e_{2k} - ...` (strict) or the same in `h`
/// (weak, materialized to degree `cap`).
pub fn symmetric_denominator(params: &AlgebraParams, variant: Variant, cap: usize) -> Poly {
    let (m, k) = (params.m(), params.k());
    let top = match variant {
        Variant::Strict => m,
        Variant::Weak => cap,
    };
    let mut p = Poly::zero();
    for r in (0..=top).filter(|r| r % k <= 1) {
        let piece = match variant {
            Variant::Strict => elementary_sym(r, m),
            Variant::Weak => complete_sym(r, m),
        };
        if r % k == 0 {
            p += &piece;
        } else {
            p -= &piece;
        }
    }
    p
}

/// Generating polynomial of admissible words up to length `cap`.
pub fn admissible_series(params: &AlgebraParams, cap: usize, variant: Variant) -> Poly {
    let mut lhs = Poly::zero();
    for len in 0..=cap {
        for w in enumerate_admissible(params, len, variant) {
            let mono = Monomial::from_pairs(w.letters().iter().map(|&c| (VarId::T(c), 1)));
            lhs.add_term(mono, BigRational::one());
        }
    }
    lhs
}

pub fn f_series(params: &AlgebraParams, cap: usize, variant: Variant) -> Result<FSeriesCheck> {
    let lhs = TruncatedSeries::new(&admissible_series(params, cap, variant), cap as u32);
    let denominator = symmetric_denominator(params, variant, cap);
    let rhs = series_inverse(&denominator, cap as u32)?;
    let equal = lhs == rhs;
    Ok(FSeriesCheck {
        cap: cap as u32,
        variant,
        lhs,
        denominator,
        rhs,
        equal,
    })
}

/// Invariance under every adjacent transposition `t_i <-> t_{i+1}`.
pub fn check_symmetry(series: &Poly, m: usize) -> bool {
    (1..m).all(|i| &series.apply_transposition(i) == series)
}

/// Permutations of `[n]` with no strictly decreasing consecutive run of
/// length `k` or more, by brute force.
pub fn count_perms_no_long_descents(n: usize, k: usize) -> BigUint {
    let count = (0..n)
        .permutations(n)
        .filter(|perm| {
            crate::words::first_run(
                &perm.iter().map(|&x| x as u8).collect::<Vec<_>>(),
                k,
                Variant::Strict,
            )
            .is_none()
        })
        .count();
    BigUint::from(count)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EgfRow {
    pub n: usize,
    pub brute_force: String,
    pub series: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EgfReport {
    pub k: usize,
    pub rows: Vec<EgfRow>,
    pub pass: bool,
}

/// Compares `n! [x^n] (1 - x + x^k/k! - x^{k+1}/(k+1)! + ...)^{-1}` with the
/// brute-force permutation count for `n <= max_n`.
pub fn egf_check(k: usize, max_n: usize) -> Result<EgfReport> {
    if k < 2 {
        return Err(Error::InvalidParams { m: max_n, k });
    }
    let mut denom = Poly::zero();
    let mut fact = BigInt::one();
    for r in 0..=max_n {
        if r > 0 {
            fact *= r;
        }
        if r % k <= 1 {
            let sign = if r % k == 0 {
                BigInt::one()
            } else {
                -BigInt::one()
            };
            denom.add_term(
                Monomial::from_pairs([(VarId::T(1), r as u32)]),
                BigRational::new(sign, fact.clone()),
            );
        }
    }
    let coeffs = series_inverse(&denom, max_n as u32)?
        .poly()
        .univariate_coeffs(max_n as u32)?;
    let mut rows = Vec::with_capacity(max_n + 1);
    let mut fact = BigInt::one();
    let mut pass = true;
    for (n, c) in coeffs.iter().enumerate() {
        if n > 0 {
            fact *= n;
        }
        let scaled = c * BigRational::from_integer(fact.clone());
        let brute = count_perms_no_long_descents(n, k);
        let ok = scaled.is_integer() && scaled.to_integer().to_biguint().as_ref() == Some(&brute);
        pass &= ok;
        rows.push(EgfRow {
            n,
            brute_force: brute.to_string(),
            series: scaled.to_string(),
        });
    }
    Ok(EgfReport { k, rows, pass })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NmRow {
    pub l: usize,
    /// `sum_{|i| = l} G(i)` for the all-ones matrix with `k = m`.
    pub first_factor: String,
    /// Sum of all coefficients in the normal form of `(x_1 + ... + x_m)^l`.
    pub rewriting: String,
    pub expected: String,
    /// `L_{m,m}(l)`, the number of admissible words, for contrast.
    pub admissible: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NmReport {
    pub m: usize,
    pub rows: Vec<NmRow>,
    pub pass: bool,
}

/// Checks `N_m(l) = m^l` for `l <= max_len` in `B(m,m)` with `A` all ones.
pub fn n_m_check(m: usize, max_len: usize) -> Result<NmReport> {
    let params = AlgebraParams::new(m, m)?;
    let ff = first_factor(&SymMatrix::ones(m), &params, max_len)?;
    let totals = ff.grade_totals();
    let admissible = count_admissible(&params, max_len, Variant::Strict, CountMethod::Dp)?.values;

    let mut lm = LeftMultiplier::new(params);
    let mut power: NCombination<BigInt> = NCombination::basis(Word::empty(), params)?;
    let mut rows = Vec::with_capacity(max_len + 1);
    let mut pass = true;
    for l in 0..=max_len {
        if l > 0 {
            let mut next: Option<NCombination<BigInt>> = None;
            for b in 1..=m as u8 {
                let part = lm.left_mul_combination(b, &power)?;
                next = Some(match next {
                    None => part,
                    Some(acc) => add_combinations(acc, &part),
                });
            }
            power = next.expect("m >= 2");
        }
        let rewriting: BigInt = power.iter().map(|(_, c)| c.clone()).sum();
        let expected = BigInt::from(m).pow(l as u32);
        let first = totals[l].as_constant().expect("numeric").to_integer();
        pass &= first == expected && rewriting == expected;
        rows.push(NmRow {
            l,
            first_factor: first.to_string(),
            rewriting: rewriting.to_string(),
            expected: expected.to_string(),
            admissible: admissible[l].to_string(),
        });
    }
    Ok(NmReport { m, rows, pass })
}

fn add_combinations(
    acc: NCombination<BigInt>,
    other: &NCombination<BigInt>,
) -> NCombination<BigInt> {
    let params = acc.params();
    let mut terms = acc.into_terms();
    for (w, c) in other.iter() {
        *terms.entry(w.clone()).or_insert_with(BigInt::zero) += c;
    }
    terms.retain(|_, c| !c.is_zero());
    crate::rewrite::from_terms(params, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(m: usize, k: usize) -> AlgebraParams {
        AlgebraParams::new(m, k).unwrap()
    }

    fn nums(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn brute_count(params: &AlgebraParams, len: usize, variant: Variant) -> usize {
        (0..len)
            .map(|_| 1..=params.m() as u8)
            .multi_cartesian_product()
            .filter(|w| {
                Word::new(w.clone())
                    .is_admissible_variant(params, variant)
                    .unwrap()
            })
            .count()
            .max(if len == 0 { 1 } else { 0 })
    }

    #[test]
    fn count_examples() {
        for method in CountMethod::ALL {
            let t = count_admissible(&p(3, 3), 5, Variant::Strict, method).unwrap();
            assert_eq!(t.values, nums(&[1, 3, 9, 26, 75, 216]), "{method}");
            let t = count_admissible(&p(3, 2), 2, Variant::Strict, method).unwrap();
            assert_eq!(t.values[2], BigUint::from(6u32));
        }
        for l in 0..=5 {
            assert_eq!(
                brute_count(&p(3, 3), l, Variant::Strict),
                [1, 3, 9, 26, 75, 216][l]
            );
        }
    }

    #[test]
    fn methods_agree_with_brute_force_both_variants() {
        for m in 2..=4 {
            for k in 2..=m {
                for variant in [Variant::Strict, Variant::Weak] {
                    let tables: Vec<CountTable> = CountMethod::ALL
                        .iter()
                        .map(|&meth| count_admissible(&p(m, k), 6, variant, meth).unwrap())
                        .collect();
                    for l in 0..=6 {
                        let b = BigUint::from(brute_count(&p(m, k), l, variant));
                        for t in &tables {
                            assert_eq!(t.values[l], b, "m={m} k={k} {variant} l={l} {}", t.method);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn transfer_graph_shape() {
        let g = TransferGraph::new(&p(3, 3), Variant::Strict);
        assert_eq!(g.states().len(), 9);
        // only (3,2) -> 1 is missing
        assert_eq!(g.edge_count(), 26);
        let g = TransferGraph::new(&p(3, 2), Variant::Weak);
        assert_eq!(g.states().len(), 3);
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn f_series_examples() {
        let check = f_series(&p(2, 2), 3, Variant::Strict).unwrap();
        assert!(check.equal);
        let mut h = Poly::zero();
        for d in 0..=3 {
            h += &complete_sym(d, 2);
        }
        assert_eq!(check.lhs.poly(), &h);

        let check = f_series(&p(3, 3), 4, Variant::Strict).unwrap();
        assert!(check.equal);
        let t = Poly::t;
        let expected = &(&Poly::one() - &(&(&t(1) + &t(2)) + &t(3))) + &(&(&t(1) * &t(2)) * &t(3));
        assert_eq!(check.denominator, expected);

        let check = f_series(&p(3, 2), 3, Variant::Weak).unwrap();
        assert!(check.equal);
        let e = (0..=3).fold(Poly::zero(), |acc, r| &acc + &elementary_sym(r, 3));
        assert_eq!(check.lhs.poly(), &e);
    }

    #[test]
    fn symmetry_examples() {
        let f = admissible_series(&p(3, 3), 4, Variant::Strict);
        assert!(check_symmetry(&f, 3));
        assert!(!check_symmetry(&Poly::t(1), 3));
        assert!(check_symmetry(&elementary_sym(2, 3), 3));
    }

    #[test]
    fn perm_examples() {
        for n in 0..=6 {
            assert_eq!(count_perms_no_long_descents(n, 2), BigUint::one());
        }
        assert_eq!(count_perms_no_long_descents(3, 3), BigUint::from(5u32));
        assert_eq!(count_perms_no_long_descents(0, 3), BigUint::one());
        let report = egf_check(2, 6).unwrap();
        assert!(report.pass);
        assert!(report.rows.iter().all(|r| r.series == "1"));
    }

    #[test]
    fn n_m_examples() {
        let report = n_m_check(2, 4).unwrap();
        assert!(report.pass);
        let got: Vec<&str> = report
            .rows
            .iter()
            .map(|r| r.first_factor.as_str())
            .collect();
        assert_eq!(got, ["1", "2", "4", "8", "16"]);
        let report = n_m_check(3, 6).unwrap();
        assert!(report.pass);
        assert_eq!(report.rows[6].expected, "729");
        assert_eq!(report.rows[0].rewriting, "1");
    }

    #[test]
    fn density_decreases_for_m_equals_k() {
        for m in 2..=5 {
            let t = count_admissible(&p(m, m), 15, Variant::Strict, CountMethod::Dp).unwrap();
            let ratios: Vec<BigRational> = t
                .values
                .iter()
                .enumerate()
                .map(|(l, c)| {
                    BigRational::new(BigInt::from(c.clone()), BigInt::from(m).pow(l as u32))
                })
                .collect();
            for l in 1..ratios.len() {
                assert!(ratios[l] <= ratios[l - 1]);
                if l >= m {
                    assert!(ratios[l] < ratios[l - 1], "m={m} l={l}");
                }
            }
        }
    }

    #[test]
    fn count_table_json() {
        let t = count_admissible(&p(3, 3), 3, Variant::Strict, CountMethod::Series).unwrap();
        assert_eq!(
            serde_json::to_string(&t).unwrap(),
            r#"{"m":3,"k":3,"variant":"strict","method":"series","values":["1","3","9","26"]}"#
        );
    }
}

//! The rewriting system of `B(m,k)`.
//!
//! Each defining relation is solved for its strictly decreasing term, so a
//! strictly decreasing block `b_1 > ... > b_k` is replaced by the signed sum
//! of its other `k! - 1` arrangements. Every replacement lowers the inversion
//! count, and the words that cannot be rewritten are the admissible ones.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyring::Coeff;
use crate::words::{inversions, AlgebraParams, Word};

/// A linear combination of admissible words: a normal-form element of `B(m,k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NCombination<C = i64> {
    params: AlgebraParams,
    terms: BTreeMap<Word, C>,
}

/// JSON form of one term: `{"word": [1,2,3], "coeff": "-1"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NCombinationTermJson {
    pub word: Vec<u8>,
    pub coeff: String,
}

impl<C: Coeff> NCombination<C> {
    pub fn zero(params: AlgebraParams) -> Self {
        NCombination {
            params,
            terms: BTreeMap::new(),
        }
    }

    /// The basis element for an admissible word.
    pub fn basis(word: Word, params: AlgebraParams) -> Result<Self> {
        if !word.is_admissible(&params)? {
            return Err(Error::NotAdmissible(word));
        }
        let mut terms = BTreeMap::new();
        terms.insert(word, C::one());
        Ok(NCombination { params, terms })
    }

    pub fn params(&self) -> AlgebraParams {
        self.params
    }

    pub fn coeff(&self, word: &Word) -> C {
        self.terms.get(word).cloned().unwrap_or_else(C::zero)
    }

    pub fn get(&self, word: &Word) -> Option<&C> {
        self.terms.get(word)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn into_terms(self) -> BTreeMap<Word, C> {
        self.terms
    }

    pub fn to_json_terms(&self) -> Vec<NCombinationTermJson> {
        self.terms
            .iter()
            .map(|(w, c)| NCombinationTermJson {
                word: w.letters().to_vec(),
                coeff: c.to_exact_string(),
            })
            .collect()
    }
}

impl<C: Coeff> Serialize for NCombination<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_terms().serialize(s)
    }
}

/// Where to apply a relation when a word has several decreasing runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// The leftmost run; this matches the k-reversion definition.
    #[default]
    Smallest,
    /// The rightmost run.
    Last,
}

impl Strategy {
    fn locate(self, w: &Word, params: &AlgebraParams) -> Option<usize> {
        match self {
            Strategy::Smallest => w.smallest_decreasing_run(params),
            Strategy::Last => w.last_decreasing_run(params),
        }
    }
}

/// Sign attached to arrangement `sigma` of a strictly decreasing block of
/// length `k` when that block is rewritten: `(-1)^(C(k,2) + inv(sigma) + 1)`.
pub fn arrangement_sign(sigma: &[u8]) -> i64 {
    let k = sigma.len();
    if (k * (k - 1) / 2 + inversions(sigma) + 1).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Rewrites the strictly decreasing block of length `k` starting at `s`.
/// Arrangements are produced in lexicographic order.
fn expand_at(w: &Word, s: usize, k: usize) -> Vec<(Word, i64)> {
    let letters = w.letters();
    let mut block: Vec<u8> = letters[s..s + k].to_vec();
    block.sort_unstable();
    let mut out = Vec::with_capacity(factorial(k) - 1);
    for sigma in block.iter().copied().permutations(k) {
        if sigma.windows(2).all(|p| p[0] > p[1]) {
            continue;
        }
        let mut v = letters.to_vec();
        v[s..s + k].copy_from_slice(&sigma);
        out.push((Word::new(v), arrangement_sign(&sigma)));
    }
    out
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// One application of the relation at the leftmost decreasing run of `w`.
///
/// The signed sum of the returned words equals `w` in `B(m,k)`.
pub fn expand_block(w: &Word, params: &AlgebraParams) -> Result<Vec<(Word, i64)>> {
    w.check(params)?;
    match w.smallest_decreasing_run(params) {
        Some(s) => Ok(expand_at(w, s, params.k())),
        None => Err(Error::AlreadyAdmissible(w.clone())),
    }
}

/// Reduces a combination of arbitrary words to admissible normal form.
///
/// Pending words are processed in decreasing inversion order, so every word
/// is expanded once, after all of its contributions have been collected.
pub fn reduce<C: Coeff>(
    input: impl IntoIterator<Item = (Word, C)>,
    params: &AlgebraParams,
    strategy: Strategy,
) -> Result<NCombination<C>> {
    let mut pending: BTreeMap<(usize, Word), C> = BTreeMap::new();
    for (w, c) in input {
        w.check(params)?;
        accumulate(&mut pending, w, &c);
    }
    let mut out = NCombination::zero(*params);
    while let Some(((_, w), c)) = pending.pop_last() {
        if c.is_zero() {
            continue;
        }
        match strategy.locate(&w, params) {
            None => {
                let slot = out.terms.entry(w).or_insert_with(C::zero);
                slot.accumulate(&c);
            }
            Some(s) => {
                for (next, sign) in expand_at(&w, s, params.k()) {
                    accumulate(&mut pending, next, &c.scale_int(sign));
                }
            }
        }
    }
    out.terms.retain(|_, c| !c.is_zero());
    Ok(out)
}

fn accumulate<C: Coeff>(pending: &mut BTreeMap<(usize, Word), C>, w: Word, c: &C) {
    let key = (w.inversions(), w);
    pending.entry(key).or_insert_with(C::zero).accumulate(c);
}

/// Normal form of a single word, rewriting at the leftmost decreasing run.
pub fn normal_form(w: &Word, params: &AlgebraParams) -> Result<NCombination<i64>> {
    normal_form_with(w, params, Strategy::Smallest)
}

pub fn normal_form_with(
    w: &Word,
    params: &AlgebraParams,
    strategy: Strategy,
) -> Result<NCombination<i64>> {
    reduce([(w.clone(), 1i64)], params, strategy)
}

/// A single k-reversion `source -> target`: `source` is `target` with its
/// leftmost decreasing run rearranged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReversionStep {
    pub source: Word,
    pub target: Word,
    /// 0-based start of the block.
    pub block_position: usize,
    /// The block as it appears in `source`.
    pub block_arrangement: Vec<u8>,
}

impl ReversionStep {
    /// `(-1)^(inv(target) - inv(source) - 1)`, this step's factor in a path sign.
    pub fn sign(&self) -> i64 {
        arrangement_sign(&self.block_arrangement)
    }
}

/// All steps ending at `target`; empty when `target` is admissible.
pub fn predecessors(target: &Word, params: &AlgebraParams) -> Vec<ReversionStep> {
    let k = params.k();
    match target.smallest_decreasing_run(params) {
        None => Vec::new(),
        Some(s) => expand_at(target, s, k)
            .into_iter()
            .map(|(source, _)| ReversionStep {
                block_arrangement: source.letters()[s..s + k].to_vec(),
                source,
                target: target.clone(),
                block_position: s,
            })
            .collect(),
    }
}

/// All steps starting at `source`.
///
/// A block of `k` distinct letters not already strictly decreasing is sorted
/// into decreasing order; the move is a k-reversion exactly when that block
/// becomes the leftmost decreasing run of the result.
pub fn successors(source: &Word, params: &AlgebraParams) -> Vec<ReversionStep> {
    let k = params.k();
    let letters = source.letters();
    if letters.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for s in 0..=letters.len() - k {
        let block = &letters[s..s + k];
        if block.windows(2).all(|p| p[0] > p[1]) {
            continue;
        }
        let mut sorted = block.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            continue;
        }
        let mut v = letters.to_vec();
        v[s..s + k].copy_from_slice(&sorted);
        let target = Word::new(v);
        if target.smallest_decreasing_run(params) == Some(s) {
            out.push(ReversionStep {
                source: source.clone(),
                target,
                block_position: s,
                block_arrangement: block.to_vec(),
            });
        }
    }
    out
}

/// Signed path counts `c_{i,j}` computed by backward path enumeration.
///
/// Column `c_{., w}` (indexed by admissible `i`) is memoized per word `w`.
#[derive(Debug)]
pub struct PathCoefficients {
    params: AlgebraParams,
    columns: HashMap<Word, Arc<BTreeMap<Word, i64>>>,
}

impl PathCoefficients {
    pub fn new(params: AlgebraParams) -> Self {
        PathCoefficients {
            params,
            columns: HashMap::new(),
        }
    }

    /// `c_{i,j}` for admissible `i`; words of different length or content give 0.
    pub fn coefficient(&mut self, i: &Word, j: &Word) -> Result<i64> {
        if !i.is_admissible(&self.params)? {
            return Err(Error::NotAdmissible(i.clone()));
        }
        j.check(&self.params)?;
        if i.len() != j.len() {
            return Ok(0);
        }
        Ok(self.column(j).get(i).copied().unwrap_or(0))
    }

    /// Every nonzero `c_{i,w}` for the fixed word `w`.
    pub fn column(&mut self, w: &Word) -> Arc<BTreeMap<Word, i64>> {
        if let Some(col) = self.columns.get(w) {
            return Arc::clone(col);
        }
        let mut col: BTreeMap<Word, i64> = BTreeMap::new();
        let preds = predecessors(w, &self.params);
        if preds.is_empty() {
            // only the empty path
            col.insert(w.clone(), 1);
        }
        for step in preds {
            let sign = step.sign();
            let sub = self.column(&step.source);
            for (i, c) in sub.iter() {
                *col.entry(i.clone()).or_insert(0) += sign * c;
            }
        }
        col.retain(|_, c| *c != 0);
        let col = Arc::new(col);
        self.columns.insert(w.clone(), Arc::clone(&col));
        col
    }
}

/// `c_{i,j}` from the memoized backward enumeration.
pub fn path_coefficient(i: &Word, j: &Word, params: &AlgebraParams) -> Result<i64> {
    PathCoefficients::new(*params).coefficient(i, j)
}

/// `c_{i,j}` by walking every reversion path individually. Exponential;
/// intended as an oracle for small words.
pub fn path_coefficient_dfs(i: &Word, j: &Word, params: &AlgebraParams) -> Result<i64> {
    if !i.is_admissible(params)? {
        return Err(Error::NotAdmissible(i.clone()));
    }
    j.check(params)?;
    if i.len() != j.len() {
        return Ok(0);
    }
    // a path of `steps` reversions from i to j carries (-1)^(inv(j) - inv(i) - steps)
    fn walk(i: &Word, w: &Word, params: &AlgebraParams, steps: usize, gap: usize, acc: &mut i64) {
        if w == i {
            *acc += if (gap + steps).is_multiple_of(2) {
                1
            } else {
                -1
            };
            return;
        }
        for step in predecessors(w, params) {
            if step.source.inversions() >= i.inversions() {
                walk(i, &step.source, params, steps + 1, gap, acc);
            }
        }
    }
    let mut acc = 0;
    if j.inversions() < i.inversions() {
        return Ok(0);
    }
    walk(i, j, params, 0, j.inversions() - i.inversions(), &mut acc);
    Ok(acc)
}

/// The row `c_{i,.}`: every word `j` reachable from admissible `i` by
/// k-reversions, with its signed path count. Includes `i` itself with 1.
pub fn coefficient_row(i: &Word, params: &AlgebraParams) -> Result<BTreeMap<Word, i64>> {
    if !i.is_admissible(params)? {
        return Err(Error::NotAdmissible(i.clone()));
    }
    // forward sweep in increasing inversion order
    let mut frontier: BTreeMap<(usize, Word), i64> = BTreeMap::new();
    frontier.insert((i.inversions(), i.clone()), 1);
    let mut row = BTreeMap::new();
    while let Some(((_, w), c)) = frontier.pop_first() {
        for step in successors(&w, params) {
            let key = (step.target.inversions(), step.target.clone());
            *frontier.entry(key).or_insert(0) += step.sign() * c;
        }
        if c != 0 {
            row.insert(w, c);
        }
    }
    Ok(row)
}

/// Memoized left multiplication by a generator on admissible words:
/// `x_a * M_w` rewritten into the admissible basis.
type Products = Arc<Vec<(Word, i64)>>;

#[derive(Debug)]
pub struct LeftMultiplier {
    params: AlgebraParams,
    cache: HashMap<(u8, Word), Products>,
}

impl LeftMultiplier {
    pub fn new(params: AlgebraParams) -> Self {
        LeftMultiplier {
            params,
            cache: HashMap::new(),
        }
    }

    pub fn params(&self) -> AlgebraParams {
        self.params
    }

    pub fn left_mul(&mut self, letter: u8, w: &Word) -> Result<Products> {
        if let Some(hit) = self.cache.get(&(letter, w.clone())) {
            return Ok(Arc::clone(hit));
        }
        let nf = normal_form(&w.prepend(letter), &self.params)?;
        let terms: Products = Arc::new(nf.into_terms().into_iter().collect());
        self.cache.insert((letter, w.clone()), Arc::clone(&terms));
        Ok(terms)
    }

    /// `x_a * comb` for a combination of admissible words.
    pub fn left_mul_combination<C: Coeff>(
        &mut self,
        letter: u8,
        comb: &NCombination<C>,
    ) -> Result<NCombination<C>> {
        let mut out: BTreeMap<Word, C> = BTreeMap::new();
        for (w, c) in comb.iter() {
            for (v, n) in self.left_mul(letter, w)?.iter() {
                out.entry(v.clone())
                    .or_insert_with(C::zero)
                    .accumulate(&c.scale_int(*n));
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(NCombination {
            params: self.params,
            terms: out,
        })
    }
}

pub(crate) fn from_terms<C: Coeff>(
    params: AlgebraParams,
    terms: BTreeMap<Word, C>,
) -> NCombination<C> {
    NCombination { params, terms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{enumerate_admissible, Variant};

    fn p(m: usize, k: usize) -> AlgebraParams {
        AlgebraParams::new(m, k).unwrap()
    }

    fn w<const N: usize>(v: [u8; N]) -> Word {
        Word::from(v)
    }

    fn all_words(m: usize, len: usize) -> Vec<Word> {
        (0..len)
            .map(|_| 1..=m as u8)
            .multi_cartesian_product()
            .map(Word::new)
            .chain(if len == 0 { Some(Word::empty()) } else { None })
            .collect()
    }

    #[test]
    fn expand_block_examples() {
        assert_eq!(
            expand_block(&w([2, 1]), &p(2, 2)).unwrap(),
            vec![(w([1, 2]), 1)]
        );
        let got = expand_block(&w([3, 2, 1]), &p(3, 3)).unwrap();
        let expected = vec![
            (w([1, 2, 3]), 1),
            (w([1, 3, 2]), -1),
            (w([2, 1, 3]), -1),
            (w([2, 3, 1]), 1),
            (w([3, 1, 2]), 1),
        ];
        assert_eq!(got, expected);
        let got = expand_block(&w([1, 3, 2, 1]), &p(3, 3)).unwrap();
        let embedded: Vec<(Word, i64)> = expected.iter().map(|(v, s)| (v.prepend(1), *s)).collect();
        assert_eq!(got, embedded);
        assert!(matches!(
            expand_block(&w([1, 2, 3]), &p(3, 3)),
            Err(Error::AlreadyAdmissible(_))
        ));
    }

    #[test]
    fn normal_form_examples() {
        let nf = normal_form(&w([1, 2]), &p(2, 2)).unwrap();
        assert_eq!(nf.into_terms(), BTreeMap::from([(w([1, 2]), 1)]));
        let nf = normal_form(&w([2, 1]), &p(2, 2)).unwrap();
        assert_eq!(nf.into_terms(), BTreeMap::from([(w([1, 2]), 1)]));
        let nf = normal_form(&w([3, 2, 1]), &p(3, 3)).unwrap();
        assert_eq!(
            nf.into_terms(),
            BTreeMap::from([
                (w([1, 2, 3]), 1),
                (w([1, 3, 2]), -1),
                (w([2, 1, 3]), -1),
                (w([2, 3, 1]), 1),
                (w([3, 1, 2]), 1),
            ])
        );
        assert!(normal_form(&w([1, 5]), &p(3, 3)).is_err());
    }

    #[test]
    fn path_coefficient_examples() {
        let params = p(3, 3);
        assert_eq!(
            path_coefficient(&w([1, 2, 3]), &w([1, 2, 3]), &params).unwrap(),
            1
        );
        assert_eq!(
            path_coefficient(&w([1, 3, 2]), &w([3, 2, 1]), &params).unwrap(),
            -1
        );
        assert_eq!(
            path_coefficient_dfs(&w([1, 3, 2]), &w([3, 2, 1]), &params).unwrap(),
            -1
        );
        assert_eq!(
            path_coefficient(&w([1, 2]), &w([2, 1]), &p(2, 2)).unwrap(),
            1
        );
        assert_eq!(
            path_coefficient(&w([1, 2]), &w([2, 2]), &p(2, 2)).unwrap(),
            0
        );
        assert!(matches!(
            path_coefficient(&w([3, 2, 1]), &w([3, 2, 1]), &params),
            Err(Error::NotAdmissible(_))
        ));
    }

    #[test]
    fn reversion_example_from_inversions() {
        let params = p(6, 3);
        let target = w([4, 6, 3, 2, 1]);
        let source = w([4, 3, 2, 6, 1]);
        let step = predecessors(&target, &params)
            .into_iter()
            .find(|s| s.source == source)
            .unwrap();
        assert_eq!(step.block_position, 1);
        assert_eq!(step.block_arrangement, vec![3, 2, 6]);
        assert!(successors(&source, &params)
            .iter()
            .any(|s| s.target == target));
        assert!(source.inversions() < target.inversions());
    }

    #[test]
    fn successors_invert_predecessors() {
        for (m, k, len) in [(3, 2, 4), (3, 3, 5), (4, 3, 4)] {
            let params = p(m, k);
            for u in all_words(m, len) {
                for step in successors(&u, &params) {
                    assert!(predecessors(&step.target, &params).contains(&step));
                    assert!(step.source.inversions() < step.target.inversions());
                }
                for step in predecessors(&u, &params) {
                    assert!(successors(&step.source, &params).contains(&step));
                }
            }
        }
    }

    #[test]
    fn commutative_case_sorts() {
        let params = p(3, 2);
        for len in 0..=5 {
            for j in all_words(3, len) {
                let mut sorted = j.letters().to_vec();
                sorted.sort_unstable();
                let nf = normal_form(&j, &params).unwrap();
                assert_eq!(nf.into_terms(), BTreeMap::from([(Word::new(sorted), 1)]));
            }
        }
    }

    #[test]
    fn terms_are_rearrangements_and_reduction_terminates() {
        let params = p(4, 3);
        for j in all_words(4, 4) {
            let mut key = j.letters().to_vec();
            key.sort_unstable();
            for (i, _) in normal_form(&j, &params).unwrap().iter() {
                let mut other = i.letters().to_vec();
                other.sort_unstable();
                assert_eq!(other, key);
                assert!(i.is_admissible(&params).unwrap());
            }
            if let Ok(exp) = expand_block(&j, &params) {
                assert!(exp.iter().all(|(v, _)| v.inversions() < j.inversions()));
            }
        }
    }

    #[test]
    fn dfs_matches_memoized() {
        for (m, k, len) in [(3, 2, 4), (3, 3, 5)] {
            let params = p(m, k);
            let mut memo = PathCoefficients::new(params);
            for j in all_words(m, len) {
                for i in enumerate_admissible(&params, len, Variant::Strict) {
                    assert_eq!(
                        memo.coefficient(&i, &j).unwrap(),
                        path_coefficient_dfs(&i, &j, &params).unwrap(),
                        "i={i} j={j}"
                    );
                }
            }
        }
    }

    #[test]
    fn rows_match_columns() {
        let params = p(3, 3);
        let mut memo = PathCoefficients::new(params);
        for i in enumerate_admissible(&params, 5, Variant::Strict) {
            let row = coefficient_row(&i, &params).unwrap();
            for j in all_words(3, 5) {
                assert_eq!(
                    row.get(&j).copied().unwrap_or(0),
                    memo.coefficient(&i, &j).unwrap()
                );
            }
        }
    }

    #[test]
    fn left_multiplier_matches_normal_form() {
        let params = p(3, 3);
        let mut lm = LeftMultiplier::new(params);
        for v in enumerate_admissible(&params, 3, Variant::Strict) {
            for a in 1..=3u8 {
                let got: BTreeMap<Word, i64> =
                    lm.left_mul(a, &v).unwrap().iter().cloned().collect();
                assert_eq!(
                    got,
                    normal_form(&v.prepend(a), &params).unwrap().into_terms()
                );
            }
        }
    }

    #[test]
    fn json_terms() {
        let nf = normal_form(&w([2, 1]), &p(2, 2)).unwrap();
        assert_eq!(
            serde_json::to_string(&nf).unwrap(),
            r#"[{"word":[1,2],"coeff":"1"}]"#
        );
    }
}

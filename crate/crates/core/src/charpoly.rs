//! Characteristic-polynomial coefficients of `TA` and the alternating second
//! factor of the extended Master Theorem.

use std::fmt;

use itertools::Itertools;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyring::{parse_rational, rational, Poly};
use crate::words::{inversions, AlgebraParams};

/// Square matrix of polynomials. Numeric matrices are constant polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymMatrix {
    m: usize,
    entries: Vec<Poly>,
}

/// Whether a matrix has numeric entries or the formal variables `a_{ij}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixMode {
    Numeric,
    Symbolic,
}

impl MatrixMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MatrixMode::Numeric => "numeric",
            MatrixMode::Symbolic => "symbolic",
        }
    }
}

/// On-disk matrix: `{"m": 2, "mode": "numeric", "entries": [["1/2","0"],["0","1"]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub m: usize,
    pub mode: MatrixMode,
    #[serde(default)]
    pub entries: Vec<Vec<String>>,
}

/// Range of entries drawn by [`SymMatrix::random`].
pub const RANDOM_ENTRY_RANGE: std::ops::RangeInclusive<i64> = -3..=3;

impl SymMatrix {
    pub fn from_fn(m: usize, f: impl Fn(usize, usize) -> Poly) -> Self {
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                entries.push(f(i, j));
            }
        }
        SymMatrix { m, entries }
    }

    pub fn identity(m: usize) -> Self {
        SymMatrix::from_fn(m, |i, j| if i == j { Poly::one() } else { Poly::zero() })
    }

    pub fn zero(m: usize) -> Self {
        SymMatrix::from_fn(m, |_, _| Poly::zero())
    }

    pub fn ones(m: usize) -> Self {
        SymMatrix::from_fn(m, |_, _| Poly::one())
    }

    /// Entries are the formal variables `a_{ij}`.
    pub fn symbolic(m: usize) -> Self {
        SymMatrix::from_fn(m, |i, j| Poly::a(i + 1, j + 1))
    }

    pub fn from_rationals(rows: &[Vec<BigRational>]) -> Result<Self> {
        let m = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: bad.len(),
            });
        }
        Ok(SymMatrix::from_fn(m, |i, j| {
            Poly::constant(rows[i][j].clone())
        }))
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Result<Self> {
        let rows: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| rational(x)).collect())
            .collect();
        SymMatrix::from_rationals(&rows)
    }

    /// Integer entries uniform on `-3..=3`, row-major, from ChaCha8 seeded
    /// with `seed` (`rand_chacha` 0.3 `seed_from_u64`, `rand` 0.8 `gen_range`).
    pub fn random(m: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<i64> = (0..m * m)
            .map(|_| rng.gen_range(RANDOM_ENTRY_RANGE))
            .collect();
        SymMatrix::from_fn(m, |i, j| Poly::from_int(values[i * m + j]))
    }

    pub fn from_file(file: &MatrixFile) -> Result<Self> {
        match file.mode {
            MatrixMode::Symbolic => Ok(SymMatrix::symbolic(file.m)),
            MatrixMode::Numeric => {
                if file.entries.len() != file.m {
                    return Err(Error::MatrixFile(format!(
                        "expected {} rows, found {}",
                        file.m,
                        file.entries.len()
                    )));
                }
                let mut rows = Vec::with_capacity(file.m);
                for (i, row) in file.entries.iter().enumerate() {
                    if row.len() != file.m {
                        return Err(Error::MatrixFile(format!(
                            "row {} has {} entries, expected {}",
                            i + 1,
                            row.len(),
                            file.m
                        )));
                    }
                    let parsed = row
                        .iter()
                        .enumerate()
                        .map(|(j, s)| {
                            parse_rational(s).map_err(|e| {
                                Error::MatrixFile(format!(
                                    "entry ({},{}) = {s:?}: {e}",
                                    i + 1,
                                    j + 1
                                ))
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    rows.push(parsed);
                }
                SymMatrix::from_rationals(&rows)
            }
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: MatrixFile =
            serde_json::from_str(s).map_err(|e| Error::MatrixFile(e.to_string()))?;
        SymMatrix::from_file(&file)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// 0-based entry access.
    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.m + j]
    }

    /// Numeric entries, or `None` if any entry involves a variable.
    pub fn as_rationals(&self) -> Option<Vec<Vec<BigRational>>> {
        (0..self.m)
            .map(|i| (0..self.m).map(|j| self.get(i, j).as_constant()).collect())
            .collect()
    }

    pub fn mode(&self) -> MatrixMode {
        if self.as_rationals().is_some() {
            MatrixMode::Numeric
        } else {
            MatrixMode::Symbolic
        }
    }

    /// `TA`: row `i` multiplied by `t_i`.
    pub fn scale_rows_by_t(&self) -> SymMatrix {
        SymMatrix::from_fn(self.m, |i, j| self.get(i, j) * &Poly::t(i + 1))
    }

    /// Determinant of the submatrix on `rows x cols` by cofactor expansion
    /// along the first row.
    fn minor(&self, rows: &[usize], cols: &[usize]) -> Poly {
        match rows.len() {
            0 => Poly::one(),
            1 => self.get(rows[0], cols[0]).clone(),
            _ => {
                let mut acc = Poly::zero();
                for (n, &c) in cols.iter().enumerate() {
                    let entry = self.get(rows[0], c);
                    if entry.is_zero() {
                        continue;
                    }
                    let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let term = entry * &self.minor(&rows[1..], &rest);
                    if n % 2 == 0 {
                        acc += &term;
                    } else {
                        acc -= &term;
                    }
                }
                acc
            }
        }
    }

    pub fn determinant(&self) -> Poly {
        let idx: Vec<usize> = (0..self.m).collect();
        self.minor(&idx, &idx)
    }

    /// Sum of all `r x r` principal minors.
    pub fn principal_minor_sum(&self, r: usize) -> Poly {
        let mut acc = Poly::zero();
        for subset in (0..self.m).combinations(r) {
            acc += &self.minor(&subset, &subset);
        }
        acc
    }

    /// `det(I - self)`.
    pub fn det_identity_minus(&self) -> Poly {
        SymMatrix::from_fn(self.m, |i, j| {
            let neg = -self.get(i, j);
            if i == j {
                &Poly::one() + &neg
            } else {
                neg
            }
        })
        .determinant()
    }
}

impl fmt::Display for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.m {
            let row = (0..self.m).map(|j| self.get(i, j).to_string()).join(", ");
            writeln!(f, "[{row}]")?;
        }
        Ok(())
    }
}

/// A subset `J` of `[m]` with a bijection `J -> J`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialPermutation {
    /// `J = {j_1 < ... < j_r}`, 1-based.
    support: Vec<u8>,
    /// `(omega(j_1), ..., omega(j_r))`.
    images: Vec<u8>,
}

impl PartialPermutation {
    pub fn new(support: Vec<u8>, images: Vec<u8>) -> Result<Self> {
        let mut sorted_support = support.clone();
        sorted_support.sort_unstable();
        sorted_support.dedup();
        let mut sorted_images = images.clone();
        sorted_images.sort_unstable();
        if sorted_support != support || sorted_images != support {
            return Err(Error::parse(
                "partial permutation",
                format!("{images:?} is not a bijection of {support:?}"),
            ));
        }
        Ok(PartialPermutation { support, images })
    }

    pub fn support(&self) -> &[u8] {
        &self.support
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    pub fn size(&self) -> usize {
        self.support.len()
    }

    /// Inversions of the word `(omega(j_1), ..., omega(j_r))`.
    pub fn inversions(&self) -> usize {
        inversions(&self.images)
    }

    /// `a_omega = prod_s A[j_s, omega(j_s)]`, 1 for the empty permutation.
    pub fn weight(&self, a: &SymMatrix) -> Poly {
        self.support
            .iter()
            .zip(&self.images)
            .fold(Poly::one(), |acc, (&j, &w)| {
                &acc * a.get(j as usize - 1, w as usize - 1)
            })
    }
}

/// All `C(m,r) r!` partial permutations with support of size `r`.
pub fn enumerate_partial_perms(m: usize, r: usize) -> Vec<PartialPermutation> {
    let mut out = Vec::new();
    for support in (1..=m as u8).combinations(r) {
        for images in support.iter().copied().permutations(r) {
            out.push(PartialPermutation {
                support: support.clone(),
                images,
            });
        }
    }
    out
}

/// `c_0 .. c_m` with `det(lambda I - M) = sum_r c_r lambda^(m-r)`, from
/// principal minors: `c_r = (-1)^r * (sum of r x r principal minors)`.
pub fn char_coeffs(mat: &SymMatrix) -> Vec<Poly> {
    (0..=mat.dim())
        .map(|r| {
            let s = mat.principal_minor_sum(r);
            if r % 2 == 0 {
                s
            } else {
                -s
            }
        })
        .collect()
}

/// The same coefficients from the partial-permutation expansion
/// `c_r = (-1)^r sum_{omega in Sigma_m(r)} (-1)^inv(omega) a_omega`.
pub fn char_coeffs_by_partial_perms(mat: &SymMatrix) -> Vec<Poly> {
    (0..=mat.dim())
        .map(|r| {
            let mut acc = Poly::zero();
            for omega in enumerate_partial_perms(mat.dim(), r) {
                let w = omega.weight(mat);
                if (omega.inversions() + r) % 2 == 0 {
                    acc += &w;
                } else {
                    acc -= &w;
                }
            }
            acc
        })
        .collect()
}

/// `alpha(r) = r - (r mod k)`.
pub fn alpha(r: usize, k: usize) -> usize {
    r - r % k
}

/// Indices `r <= m` with `r = 0` or `1 (mod k)`.
pub fn second_factor_indices(m: usize, k: usize) -> impl Iterator<Item = usize> {
    (0..=m).filter(move |r| r % k <= 1)
}

/// `sum_{r = 0,1 mod k} (-1)^alpha(r) c_r` for precomputed coefficients.
pub fn alternating_sum(coeffs: &[Poly], k: usize) -> Poly {
    let mut acc = Poly::zero();
    for r in second_factor_indices(coeffs.len() - 1, k) {
        if alpha(r, k).is_multiple_of(2) {
            acc += &coeffs[r];
        } else {
            acc -= &coeffs[r];
        }
    }
    acc
}

/// The second factor `sum_{r = 0,1 mod k} (-1)^alpha(r) c_r(TA)`.
pub fn second_factor(a: &SymMatrix, params: &AlgebraParams) -> Result<Poly> {
    if a.dim() != params.m() {
        return Err(Error::DimensionMismatch {
            expected: params.m(),
            got: a.dim(),
        });
    }
    Ok(alternating_sum(
        &char_coeffs(&a.scale_rows_by_t()),
        params.k(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::elementary_sym;

    fn p(m: usize, k: usize) -> AlgebraParams {
        AlgebraParams::new(m, k).unwrap()
    }

    fn signed_e(r: usize, m: usize) -> Poly {
        let e = elementary_sym(r, m);
        if r.is_multiple_of(2) {
            e
        } else {
            -e
        }
    }

    #[test]
    fn scale_rows_examples() {
        let ta = SymMatrix::identity(2).scale_rows_by_t();
        assert_eq!(ta.get(0, 0), &Poly::t(1));
        assert_eq!(ta.get(1, 1), &Poly::t(2));
        assert!(ta.get(0, 1).is_zero());
        let ta = SymMatrix::symbolic(2).scale_rows_by_t();
        assert_eq!(ta.get(0, 1), &(&Poly::a(1, 2) * &Poly::t(1)));
        assert_eq!(SymMatrix::zero(3).scale_rows_by_t(), SymMatrix::zero(3));
    }

    #[test]
    fn char_coeffs_identity() {
        for m in 1..=4 {
            let c = char_coeffs(&SymMatrix::identity(m).scale_rows_by_t());
            assert_eq!(c.len(), m + 1);
            for (r, cr) in c.iter().enumerate() {
                assert_eq!(cr, &signed_e(r, m));
            }
        }
    }

    #[test]
    fn char_coeffs_two_by_two() {
        let c = char_coeffs(&SymMatrix::symbolic(2).scale_rows_by_t());
        let (t1, t2) = (Poly::t(1), Poly::t(2));
        assert_eq!(c[0], Poly::one());
        assert_eq!(c[1], -(&(&t1 * &Poly::a(1, 1)) + &(&t2 * &Poly::a(2, 2))));
        let det = &(&Poly::a(1, 1) * &Poly::a(2, 2)) - &(&Poly::a(1, 2) * &Poly::a(2, 1));
        assert_eq!(c[2], &(&t1 * &t2) * &det);
    }

    #[test]
    fn partial_perm_counts() {
        assert_eq!(enumerate_partial_perms(3, 0).len(), 1);
        assert_eq!(enumerate_partial_perms(3, 1).len(), 3);
        assert!(enumerate_partial_perms(3, 1)
            .iter()
            .all(|w| w.support() == w.images()));
        assert_eq!(enumerate_partial_perms(3, 2).len(), 6);
        assert_eq!(enumerate_partial_perms(4, 3).len(), 24);
        let w = PartialPermutation::new(vec![1, 3, 4], vec![4, 1, 3]).unwrap();
        assert_eq!(w.inversions(), 2);
        assert!(PartialPermutation::new(vec![1, 3], vec![1, 2]).is_err());
    }

    #[test]
    fn expansions_agree() {
        for m in 1..=4 {
            let a = SymMatrix::symbolic(m);
            assert_eq!(char_coeffs(&a), char_coeffs_by_partial_perms(&a), "m={m}");
        }
    }

    #[test]
    fn det_identity_minus_is_coefficient_sum() {
        for m in 1..=4 {
            let ta = SymMatrix::symbolic(m).scale_rows_by_t();
            let sum = char_coeffs(&ta)
                .iter()
                .fold(Poly::zero(), |acc, c| &acc + c);
            assert_eq!(sum, ta.det_identity_minus(), "m={m}");
        }
    }

    #[test]
    fn diagonal_matrix_gives_signed_elementary() {
        let d = SymMatrix::from_fn(3, |i, j| if i == j { Poly::t(i + 1) } else { Poly::zero() });
        for (r, c) in char_coeffs(&d).iter().enumerate() {
            assert_eq!(c, &signed_e(r, 3));
        }
    }

    #[test]
    fn alpha_table() {
        for k in 2..=6 {
            for r in 0..=12 {
                if r < k {
                    assert_eq!(alpha(r, k), 0);
                }
                assert_eq!(
                    alpha(r, k).is_multiple_of(2),
                    (r / k) % 2 == 0 || k % 2 == 0
                );
                assert_eq!(alpha(r, k), (r / k) * k);
            }
        }
    }

    #[test]
    fn second_factor_examples() {
        for m in 2..=4 {
            let a = SymMatrix::symbolic(m);
            let sf = second_factor(&a, &p(m, 2)).unwrap();
            assert_eq!(sf, a.scale_rows_by_t().det_identity_minus());
        }
        let t = |i| Poly::t(i);
        let expected = &(&Poly::one() - &(&(&t(1) + &t(2)) + &t(3))) + &(&(&t(1) * &t(2)) * &t(3));
        assert_eq!(
            second_factor(&SymMatrix::identity(3), &p(3, 3)).unwrap(),
            expected
        );
        let e = |r| elementary_sym(r, 4);
        let expected = &(&(&Poly::one() - &e(1)) + &e(3)) - &e(4);
        assert_eq!(
            second_factor(&SymMatrix::identity(4), &p(4, 3)).unwrap(),
            expected
        );
        assert!(second_factor(&SymMatrix::identity(3), &p(4, 3)).is_err());
    }

    #[test]
    fn random_is_reproducible() {
        let a = SymMatrix::random(4, 7);
        assert_eq!(a, SymMatrix::random(4, 7));
        assert_ne!(a, SymMatrix::random(4, 8));
        let vals = a.as_rationals().unwrap();
        assert!(vals
            .iter()
            .flatten()
            .all(|x| *x >= rational(-3) && *x <= rational(3)));
    }

    #[test]
    fn matrix_file_parsing() {
        let a = SymMatrix::from_json_str(
            r#"{"m":2,"mode":"numeric","entries":[["1/2","0"],["0","1/3"]]}"#,
        )
        .unwrap();
        assert_eq!(
            a.get(0, 0),
            &Poly::constant(BigRational::new(1.into(), 2.into()))
        );
        assert_eq!(a.mode(), MatrixMode::Numeric);
        let s = SymMatrix::from_json_str(r#"{"m":3,"mode":"symbolic"}"#).unwrap();
        assert_eq!(s, SymMatrix::symbolic(3));
        let err =
            SymMatrix::from_json_str(r#"{"m":2,"mode":"numeric","entries":[["1","x"],["0","1"]]}"#)
                .unwrap_err();
        assert!(err.to_string().contains("entry (1,2)"), "{err}");
        assert!(SymMatrix::from_json_str(r#"{"m":2,"mode":"numeric","entries":[["1"]]}"#).is_err());
    }
}

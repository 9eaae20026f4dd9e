use std::str::FromStr;

use super::{compress, CompressedTuple, MatrixError, SparseMatrix};
use crate::numeric::Rational;

/// Default cap on the number of rows a family builder may produce.
pub const DEFAULT_ROW_CAP: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Finite sums matrix: one 0/1 row per nonempty subset of the columns.
    FiniteSums,
    /// Milliken–Taylor matrix of a compressed tuple.
    MillikenTaylor,
    /// Rows `2^k e_0 + e_k`: images can be pushed into any central set but
    /// never kept inside `(0, 1)`.
    PowersOfTwo,
    /// Rows `e_0/(2n+1) - e_{n+1}`: images exist near zero only.
    OddReciprocals,
    /// Rows `x`, `y`, `x + y`.
    Schur,
    Identity,
}

impl FromStr for Family {
    type Err = MatrixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "fs" => Family::FiniteSums,
            "mt" => Family::MillikenTaylor,
            "ex16" => Family::PowersOfTwo,
            "ex17" => Family::OddReciprocals,
            "schur" => Family::Schur,
            "identity" => Family::Identity,
            other => return Err(MatrixError::UnknownFamily(other.to_string())),
        })
    }
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::FiniteSums => "fs",
            Family::MillikenTaylor => "mt",
            Family::PowersOfTwo => "ex16",
            Family::OddReciprocals => "ex17",
            Family::Schur => "schur",
            Family::Identity => "identity",
        }
    }

    /// Whether the family is a prefix of an ω×ω matrix.
    fn is_infinite(self) -> bool {
        matches!(
            self,
            Family::FiniteSums | Family::MillikenTaylor | Family::PowersOfTwo | Family::OddReciprocals
        )
    }
}

pub fn build_family(name: &str, size: usize, params: &[Rational]) -> Result<SparseMatrix, MatrixError> {
    build_family_with_cap(name, size, params, DEFAULT_ROW_CAP)
}

/// Builds a family matrix truncated to `size`. `params` holds the tuple for
/// `mt` and is ignored by the other families.
pub fn build_family_with_cap(
    name: &str,
    size: usize,
    params: &[Rational],
    row_cap: usize,
) -> Result<SparseMatrix, MatrixError> {
    let family: Family = name.parse()?;
    if size == 0 && family != Family::Schur {
        return Err(MatrixError::InvalidParams("size must be positive".into()));
    }
    let check_cap = |rows: u128| {
        if rows > row_cap as u128 {
            Err(MatrixError::SizeTooLarge { rows, cap: row_cap })
        } else {
            Ok(())
        }
    };
    let one = Rational::one;
    let matrix = match family {
        Family::FiniteSums => {
            check_cap(if size >= 127 { u128::MAX } else { (1u128 << size) - 1 })?;
            let rows = (1u64..(1u64 << size))
                .map(|mask| {
                    (0..size)
                        .filter(|c| mask >> c & 1 == 1)
                        .map(|c| (c, one()))
                        .collect()
                })
                .collect();
            SparseMatrix::new(size, rows)?
        }
        Family::MillikenTaylor => {
            if params.is_empty() {
                return Err(MatrixError::InvalidParams("mt needs a coefficient tuple".into()));
            }
            let tuple = compress(params)?;
            if tuple.entries() != params {
                return Err(MatrixError::InvalidParams(
                    "mt coefficients must already be compressed".into(),
                ));
            }
            check_cap(mt_row_count(tuple.len(), size))?;
            let rows = mt_rows(&tuple, size)
                .into_iter()
                .map(|labels| {
                    labels
                        .iter()
                        .enumerate()
                        .filter(|(_, &l)| l > 0)
                        .map(|(c, &l)| (c, tuple.entries()[l - 1].clone()))
                        .collect()
                })
                .collect();
            SparseMatrix::new(size, rows)?
        }
        Family::PowersOfTwo => {
            check_cap(size as u128)?;
            let rows = (0..size)
                .map(|k| {
                    if k == 0 {
                        vec![(0, one())]
                    } else {
                        vec![(0, Rational::pow2(k as i64)), (k, one())]
                    }
                })
                .collect();
            SparseMatrix::new(size, rows)?
        }
        Family::OddReciprocals => {
            check_cap(size as u128)?;
            let rows = (0..size)
                .map(|n| {
                    vec![
                        (0, Rational::new(1, 2 * n as i64 + 1).expect("odd denominator")),
                        (n + 1, -one()),
                    ]
                })
                .collect();
            SparseMatrix::new(size + 1, rows)?
        }
        Family::Schur => SparseMatrix::from_integers(&[&[1, 0], &[0, 1], &[1, 1]]),
        Family::Identity => {
            check_cap(size as u128)?;
            SparseMatrix::identity(size)
        }
    };
    let truncation = family.is_infinite().then_some(size);
    Ok(matrix.with_family(family.name()).with_truncation(truncation))
}

/// Number of block patterns `F_1 < ... < F_m` over `n` indices.
fn mt_row_count(m: usize, n: usize) -> u128 {
    // dp[b] = patterns over the indices seen so far whose last used block is b
    let mut dp = vec![0u128; m + 1];
    dp[0] = 1;
    for _ in 0..n {
        let mut next = dp.clone();
        for b in 1..=m {
            next[b] = next[b].saturating_add(dp[b]).saturating_add(dp[b - 1]);
        }
        dp = next;
    }
    dp[m]
}

/// Block label vectors for the Milliken–Taylor matrix of `tuple` over `n`
/// columns, in lexicographic order. Label 0 means the column is unused,
/// label `i` puts the column in block `F_i`.
pub fn mt_rows(tuple: &CompressedTuple, n: usize) -> Vec<Vec<usize>> {
    fn rec(pos: usize, n: usize, m: usize, block: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == n {
            if block == m {
                out.push(cur.clone());
            }
            return;
        }
        // need at least m - block more columns to open the remaining blocks
        if m - block > n - pos {
            return;
        }
        let mut choices = vec![0];
        if block >= 1 {
            choices.push(block);
        }
        if block < m {
            choices.push(block + 1);
        }
        for label in choices {
            cur.push(label);
            rec(pos + 1, n, m, block.max(label), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, tuple.len(), 0, &mut Vec::with_capacity(n), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn fs_has_all_nonzero_01_rows() {
        let m = build_family("fs", 3, &[]).unwrap();
        assert_eq!(m.nrows(), 7);
        let mut dense = m.to_dense();
        dense.sort();
        dense.dedup();
        assert_eq!(dense.len(), 7);
        assert!(dense.iter().all(|r| r.iter().all(|v| v.is_zero() || *v == q("1"))));
        assert!(!dense.iter().any(|r| r.iter().all(Rational::is_zero)));
        assert_eq!(m.truncation(), Some(3));
    }

    #[test]
    fn ex16_first_column_is_powers_of_two() {
        let m = build_family("ex16", 4, &[]).unwrap();
        let d = m.to_dense();
        let first: Vec<_> = d.iter().map(|r| r[0].clone()).collect();
        assert_eq!(first, vec![q("1"), q("2"), q("4"), q("8")]);
        assert_eq!(d[0], vec![q("1"), q("0"), q("0"), q("0")]);
        assert_eq!(d[2], vec![q("4"), q("0"), q("1"), q("0")]);
    }

    #[test]
    fn ex17_rows() {
        let m = build_family("ex17", 3, &[]).unwrap();
        let d = m.to_dense();
        assert_eq!(d[0], vec![q("1"), q("-1"), q("0"), q("0")]);
        assert_eq!(d[2], vec![q("1/5"), q("0"), q("0"), q("-1")]);
    }

    /// Brute force over all pairs of nonempty subsets of {0,1,2}.
    fn brute_block_pairs(n: usize) -> usize {
        let mut count = 0;
        for f1 in 1u32..(1 << n) {
            for f2 in 1u32..(1 << n) {
                let max1 = 31 - f1.leading_zeros();
                let min2 = f2.trailing_zeros();
                if max1 < min2 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn mt_pair_count_matches_brute_force() {
        let m = build_family("mt", 3, &[q("1"), q("2")]).unwrap();
        assert_eq!(m.nrows(), 5);
        assert_eq!(brute_block_pairs(3), 5);
        for n in 2..8 {
            let t = CompressedTuple::from_integers(&[1, 2]).unwrap();
            assert_eq!(mt_rows(&t, n).len(), brute_block_pairs(n));
            assert_eq!(mt_row_count(2, n) as usize, brute_block_pairs(n));
        }
    }

    #[test]
    fn mt_rows_are_lexicographic() {
        let t = CompressedTuple::from_integers(&[1, 2]).unwrap();
        let rows = mt_rows(&t, 4);
        assert!(rows.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(rows[0], vec![0, 0, 1, 2]);
    }

    #[test]
    fn family_errors() {
        assert_eq!(
            build_family("nope", 3, &[]),
            Err(MatrixError::UnknownFamily("nope".into()))
        );
        assert!(matches!(
            build_family("fs", 20, &[]),
            Err(MatrixError::SizeTooLarge { .. })
        ));
        assert!(matches!(
            build_family("mt", 3, &[q("1"), q("1")]),
            Err(MatrixError::InvalidParams(_))
        ));
        assert!(build_family_with_cap("fs", 20, &[], 1 << 21).is_ok());
    }
}

//! Dense matrices over the rationals with exact determinant, inverse and
//! product.
//!
//! Determinants run fraction-free (Bareiss) on a denominator-cleared integer
//! copy; inverses use exact Gauss-Jordan elimination.

use rug::Complete;

use super::{rat, Integer, Rational};
use crate::{Error, Result};

/// Dense row-major matrix over [`Rational`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::new(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = rat(1);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    /// Builds from rows of integer pairs `(num, den)`; test/display helper.
    pub fn from_ratios(rows: &[Vec<(i64, i64)>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| Rational::from(rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (&self[(i, j)] * c).complete()
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = Rational::new();
            for t in 0..self.cols {
                acc += (&self[(i, t)] * &other[(t, j)]).complete();
            }
            acc
        }))
    }

    /// Exact determinant via fraction-free Bareiss elimination on the
    /// denominator-cleared integer matrix.
    pub fn det(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "determinant of {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(rat(1));
        }
        // Clear denominators row by row, tracking the total scale factor.
        let mut m: Vec<Vec<Integer>> = Vec::with_capacity(n);
        let mut scale = Integer::from(1);
        for i in 0..n {
            let mut lcm = Integer::from(1);
            for j in 0..n {
                lcm.lcm_mut(self[(i, j)].denom());
            }
            let lcm_q = Rational::from(&lcm);
            let row = (0..n)
                .map(|j| {
                    let q = (&self[(i, j)] * &lcm_q).complete();
                    debug_assert_eq!(*q.denom(), 1);
                    q.into_numer_denom().0
                })
                .collect();
            m.push(row);
            scale *= &lcm;
        }

        let mut sign = 1i32;
        let mut prev = Integer::from(1);
        for p in 0..n - 1 {
            if m[p][p] == 0 {
                // pivot search
                let swap = (p + 1..n).find(|&r| m[r][p] != 0);
                match swap {
                    Some(r) => {
                        m.swap(p, r);
                        sign = -sign;
                    }
                    None => return Ok(rat(0)),
                }
            }
            for i in p + 1..n {
                for j in p + 1..n {
                    let t = (&m[p][p] * &m[i][j]).complete() - (&m[i][p] * &m[p][j]).complete();
                    let (q, r) = t.div_rem(prev.clone());
                    debug_assert_eq!(r, 0, "Bareiss exact division failed");
                    m[i][j] = q;
                }
                m[i][p] = Integer::new();
            }
            prev = m[p][p].clone();
        }
        let mut det = Rational::from(m[n - 1][n - 1].clone());
        det /= Rational::from(scale);
        if sign < 0 {
            det = -det;
        }
        Ok(det)
    }

    /// Exact inverse via Gauss-Jordan elimination.
    ///
    /// Returns [`Error::SingularMatrix`] when no inverse exists.
    pub fn invert(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "inverse of {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for p in 0..n {
            let pivot_row = (p..n).find(|&r| a[(r, p)] != 0);
            let pivot_row = pivot_row.ok_or(Error::SingularMatrix)?;
            if pivot_row != p {
                for j in 0..n {
                    let (x, y) = (a[(p, j)].clone(), a[(pivot_row, j)].clone());
                    a[(p, j)] = y;
                    a[(pivot_row, j)] = x;
                    let (x, y) = (inv[(p, j)].clone(), inv[(pivot_row, j)].clone());
                    inv[(p, j)] = y;
                    inv[(pivot_row, j)] = x;
                }
            }
            let piv = a[(p, p)].clone();
            for j in 0..n {
                a[(p, j)] /= &piv;
                inv[(p, j)] /= &piv;
            }
            for i in 0..n {
                if i == p || a[(i, p)] == 0 {
                    continue;
                }
                let f = a[(i, p)].clone();
                for j in 0..n {
                    let t = (&a[(p, j)] * &f).complete();
                    a[(i, j)] -= t;
                    let t = (&inv[(p, j)] * &f).complete();
                    inv[(i, j)] -= t;
                }
            }
        }
        Ok(inv)
    }

    /// True when every entry is an integer.
    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|q| *q.denom() == 1)
    }

    /// Deletes one row and one column (used for the primed constructions).
    pub fn delete_row_col(&self, row: usize, col: usize) -> Self {
        Self::from_fn(self.rows - 1, self.cols - 1, |i, j| {
            let si = if i < row { i } else { i + 1 };
            let sj = if j < col { j } else { j + 1 };
            self[(si, sj)].clone()
        })
    }

    /// Entries rendered as `num/den` strings, row major.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_string()).collect())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for ExactMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use proptest::prelude::*;

    #[test]
    fn det_base_cases() {
        let m = ExactMatrix::from_ratios(&[vec![(7, 3)]]);
        assert_eq!(m.det().unwrap(), ratio(7, 3));
        assert_eq!(ExactMatrix::identity(5).det().unwrap(), rat(1));
        assert_eq!(ExactMatrix::zeros(0, 0).det().unwrap(), rat(1));
        assert_eq!(ExactMatrix::zeros(3, 3).det().unwrap(), rat(0));
    }

    #[test]
    fn det_with_zero_pivot() {
        let m = ExactMatrix::from_ratios(&[
            vec![(0, 1), (1, 1), (2, 1)],
            vec![(1, 1), (0, 1), (3, 1)],
            vec![(4, 1), (5, 1), (6, 1)],
        ]);
        // expansion: det = 0*(0*6-3*5) - 1*(6-12) + 2*(5-0) = 16
        assert_eq!(m.det().unwrap(), rat(16));
    }

    #[test]
    fn invert_symbolic_2x2() {
        // [[0, 8/15], [8/15, x]]^{-1} = [[-x (15/8)^2, 15/8], [15/8, 0]]
        for x in [ratio(7, 3), rat(0), ratio(-208, 3375)] {
            let m = ExactMatrix::from_fn(2, 2, |i, j| match (i, j) {
                (0, 0) => rat(0),
                (1, 1) => x.clone(),
                _ => ratio(8, 15),
            });
            let inv = m.invert().unwrap();
            let scale = ratio(15, 8) * ratio(15, 8);
            assert_eq!(inv[(0, 0)], -x.clone() * scale);
            assert_eq!(inv[(0, 1)], ratio(15, 8));
            assert_eq!(inv[(1, 0)], ratio(15, 8));
            assert_eq!(inv[(1, 1)], rat(0));
        }
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = ExactMatrix::from_ratios(&[vec![(1, 1), (2, 1)], vec![(2, 1), (4, 1)]]);
        assert!(matches!(m.invert(), Err(Error::SingularMatrix)));
        assert_eq!(m.det().unwrap(), rat(0));
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-40i64..=40, 1i64..=12).prop_map(|(n, d)| Rational::from((n, d)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn det_times_det_of_inverse_is_one(
            entries in proptest::collection::vec(small_rational(), 16),
        ) {
            let m = ExactMatrix::from_fn(4, 4, |i, j| entries[4 * i + j].clone());
            let d = m.det().unwrap();
            if d != 0 {
                let inv = m.invert().unwrap();
                let di = inv.det().unwrap();
                prop_assert_eq!(d * di, rat(1));
                let prod = m.matmul(&inv).unwrap();
                prop_assert_eq!(prod, ExactMatrix::identity(4));
            }
        }

        #[test]
        fn det_matches_cofactor_expansion_3x3(
            entries in proptest::collection::vec(small_rational(), 9),
        ) {
            let m = ExactMatrix::from_fn(3, 3, |i, j| entries[3 * i + j].clone());
            let cof = {
                let e = |i: usize, j: usize| m[(i, j)].clone();
                e(0,0) * (e(1,1)*e(2,2) - e(1,2)*e(2,1))
                    - e(0,1) * (e(1,0)*e(2,2) - e(1,2)*e(2,0))
                    + e(0,2) * (e(1,0)*e(2,1) - e(1,1)*e(2,0))
            };
            prop_assert_eq!(m.det().unwrap(), cof);
        }
    }
}

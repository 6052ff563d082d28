use num_traits::Zero;

use super::{ExactError, RMatrix, Rational, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearSolution {
    Unique(Vec<Rational>),
    NoSolution,
    /// Consistent but rank deficient; `particular` sets every free variable to zero.
    Underdetermined {
        particular: Vec<Rational>,
        nullity: usize,
    },
}

/// Solve `A·x = b` exactly by Gauss–Jordan elimination, choosing the lowest
/// indexed nonzero pivot in each column.
pub fn solve_linear(a: &RMatrix, b: &[Rational]) -> Result<LinearSolution> {
    if a.rows() != b.len() {
        return Err(ExactError::DimensionMismatch {
            expected: a.rows(),
            found: b.len(),
        });
    }
    let (m, n) = (a.rows(), a.cols());
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.push(b[i].clone());
            row
        })
        .collect();

    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !t[i][c].is_zero()) else {
            continue;
        };
        t.swap(r, p);
        let inv = t[r][c].recip();
        for x in t[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m {
            if i == r || t[i][c].is_zero() {
                continue;
            }
            let factor = t[i][c].clone();
            for k in c..=n {
                let delta = &factor * &t[r][k];
                t[i][k] -= delta;
            }
        }
        pivot_cols.push(c);
        r += 1;
    }

    if t[r..].iter().any(|row| !row[n].is_zero()) {
        return Ok(LinearSolution::NoSolution);
    }
    let mut x = vec![Rational::zero(); n];
    for (row, &c) in pivot_cols.iter().enumerate() {
        x[c] = t[row][n].clone();
    }
    if pivot_cols.len() == n {
        Ok(LinearSolution::Unique(x))
    } else {
        Ok(LinearSolution::Underdetermined {
            particular: x,
            nullity: n - pivot_cols.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, ints, rat};

    #[test]
    fn identity_system() {
        let b = vec![rat(1, 2), int(-3), int(7)];
        assert_eq!(
            solve_linear(&RMatrix::identity(3), &b).unwrap(),
            LinearSolution::Unique(b.clone())
        );
    }

    #[test]
    fn a2_system() {
        let a = RMatrix::from_int_rows(&[[-2, 1], [1, -2]]).unwrap();
        assert_eq!(
            solve_linear(&a, &ints(&[-2, 1])).unwrap(),
            LinearSolution::Unique(ints(&[1, 0]))
        );
    }

    #[test]
    fn inconsistent_and_deficient_are_distinct() {
        let a = RMatrix::from_int_rows(&[[-2, 2], [2, -2]]).unwrap();
        assert_eq!(solve_linear(&a, &ints(&[1, 0])).unwrap(), LinearSolution::NoSolution);
        assert_eq!(
            solve_linear(&a, &ints(&[2, -2])).unwrap(),
            LinearSolution::Underdetermined {
                particular: ints(&[-1, 0]),
                nullity: 1
            }
        );
    }

    #[test]
    fn length_mismatch() {
        assert!(solve_linear(&RMatrix::identity(2), &ints(&[1])).is_err());
    }
}

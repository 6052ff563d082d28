//! Two-phase tableau simplex over ℚ with Bland's rule.
//!
//! Solves `min cᵀx  s.t.  A·x = b, x ≥ 0`. Entering and leaving variables
//! are always the lowest eligible index, so runs are deterministic and
//! cannot cycle.

use num_traits::{One, Signed, Zero};

use super::{RMatrix, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum LpOutcome {
    Optimal {
        x: Vec<Rational>,
        value: Rational,
    },
    /// `y` with `yᵀA ≥ 0` componentwise and `yᵀb < 0`.
    Infeasible {
        farkas: Vec<Rational>,
    },
    Unbounded,
}

struct Tableau {
    /// `m` rows of `width + 1` entries; the last entry is the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        &self.rows[r][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs `c_j − c_Bᵀ B⁻¹ A_j` for all columns.
    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut red = cost.to_vec();
        for (row, &bv) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[bv];
            if cb.is_zero() {
                continue;
            }
            for (j, r) in red.iter_mut().enumerate() {
                *r -= cb * &row[j];
            }
        }
        red
    }

    fn objective(&self, cost: &[Rational]) -> Rational {
        self.basis
            .iter()
            .enumerate()
            .map(|(r, &bv)| &cost[bv] * self.rhs(r))
            .sum()
    }

    /// Runs Bland iterations on `cost`, only letting columns below `allowed`
    /// enter. Returns false if the objective is unbounded below.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let red = self.reduced_costs(cost);
            let Some(enter) = (0..allowed).find(|&j| red[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }
}

pub(crate) fn solve(a: &RMatrix, b: &[Rational], c: &[Rational]) -> LpOutcome {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);

    // Flip rows so the right-hand side is nonnegative; artificials n..n+m.
    let signs: Vec<bool> = b.iter().map(|x| x.is_negative()).collect();
    let width = n + m;
    let rows = (0..m)
        .map(|i| {
            let mut row = Vec::with_capacity(width + 1);
            for j in 0..n {
                row.push(if signs[i] { -&a[(i, j)] } else { a[(i, j)].clone() });
            }
            for k in 0..m {
                row.push(if k == i { Rational::one() } else { Rational::zero() });
            }
            row.push(if signs[i] { -&b[i] } else { b[i].clone() });
            row
        })
        .collect();
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        width,
    };

    let mut phase1 = vec![Rational::zero(); width];
    for x in &mut phase1[n..] {
        *x = Rational::one();
    }
    let finite = t.optimize(&phase1, width);
    debug_assert!(finite, "phase one is bounded below by zero");
    let infeasibility = t.objective(&phase1);
    if infeasibility.is_positive() {
        let red = t.reduced_costs(&phase1);
        let farkas = (0..m)
            .map(|i| {
                let w = Rational::one() - &red[n + i];
                if signs[i] {
                    w
                } else {
                    -w
                }
            })
            .collect();
        return LpOutcome::Infeasible { farkas };
    }

    // Drive zero-level artificials out of the basis; drop redundant rows.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            match (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                Some(j) => t.pivot(r, j),
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    let mut phase2 = c.to_vec();
    phase2.extend(std::iter::repeat_n(Rational::zero(), m));
    if !t.optimize(&phase2, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &bv) in t.basis.iter().enumerate() {
        x[bv] = t.rhs(r).clone();
    }
    let value = t.objective(&phase2);
    LpOutcome::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{dot, int, ints};

    #[test]
    fn small_optimum() {
        // min -x - y  s.t. x + 2y + s = 4, 3x + y + u = 6
        let a = RMatrix::from_int_rows(&[[1, 2, 1, 0], [3, 1, 0, 1]]).unwrap();
        let out = solve(&a, &ints(&[4, 6]), &ints(&[-1, -1, 0, 0]));
        match out {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, crate::exactmath::rat(-14, 5));
                assert_eq!(&x[..2], &[crate::exactmath::rat(8, 5), crate::exactmath::rat(6, 5)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_has_farkas_certificate() {
        // x + y = -1 with x, y >= 0
        let a = RMatrix::from_int_rows(&[[1, 1]]).unwrap();
        let b = ints(&[-1]);
        match solve(&a, &b, &ints(&[0, 0])) {
            LpOutcome::Infeasible { farkas } => {
                for j in 0..2 {
                    assert!(dot(&farkas, &a.column(j)) >= int(0));
                }
                assert!(dot(&farkas, &b) < int(0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_detected() {
        let a = RMatrix::from_int_rows(&[[1, -1]]).unwrap();
        assert_eq!(solve(&a, &ints(&[1]), &ints(&[-1, 0])), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let a = RMatrix::from_int_rows(&[[1, 1], [2, 2]]).unwrap();
        match solve(&a, &ints(&[1, 2]), &ints(&[1, 0])) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, int(0));
                assert_eq!(x, ints(&[0, 1]));
            }
            other => panic!("{other:?}"),
        }
    }
}

//! Dense exact-rational simplex for the small LPs behind dual norms.
//!
//! Solves `max c.x` subject to `A x <= b`, `x >= 0` with `b >= 0`, so the
//! slack basis is feasible and no phase-1 is needed. Bland's rule keeps the
//! pivoting finite. Everything is `BigRational`, so the optimum and the
//! optimal point are exact.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rat;

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: Rat,
    pub point: Vec<Rat>,
}

pub fn maximize(objective: &[Rat], rows: &[Vec<Rat>], rhs: &[Rat]) -> Result<LpSolution> {
    let n = objective.len();
    let m = rows.len();
    if rhs.len() != m || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Lp("inconsistent dimensions".into()));
    }
    if rhs.iter().any(|b| b < &Rat::zero()) {
        return Err(Error::Lp("negative right-hand side".into()));
    }

    // Tableau: m constraint rows and one objective row over columns
    // [x_0..x_n | s_0..s_m | rhs]; objective row holds -c so optimality is
    // "no negative entries".
    let cols = n + m + 1;
    let mut tab = vec![vec![Rat::zero(); cols]; m + 1];
    for (i, row) in rows.iter().enumerate() {
        tab[i][..n].clone_from_slice(row);
        tab[i][n + i] = Rat::from_integer(1.into());
        tab[i][cols - 1] = rhs[i].clone();
    }
    for (j, c) in objective.iter().enumerate() {
        tab[m][j] = -c.clone();
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Bland: the entering column is the lowest index with a negative reduced
    // cost; optimality once none remains.
    while let Some(enter) = (0..n + m).find(|&j| tab[m][j] < Rat::zero()) {
        // Ratio test; ties go to the smallest basis variable (Bland again).
        let mut pivot_row: Option<usize> = None;
        let mut best: Option<Rat> = None;
        for i in 0..m {
            if tab[i][enter] > Rat::zero() {
                let ratio = &tab[i][cols - 1] / &tab[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio < *b
                            || (ratio == *b
                                && basis[i] < basis[pivot_row.expect("row set with best")])
                    }
                };
                if better {
                    best = Some(ratio);
                    pivot_row = Some(i);
                }
            }
        }
        let Some(r) = pivot_row else {
            return Err(Error::Lp("objective unbounded".into()));
        };

        let pivot = tab[r][enter].clone();
        for v in tab[r].iter_mut() {
            *v /= &pivot;
        }
        let pivot_row = tab[r].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let factor = row[enter].clone();
                for (slot, pv) in row.iter_mut().zip(&pivot_row) {
                    *slot -= &factor * pv;
                }
            }
        }
        basis[r] = enter;
    }

    let mut point = vec![Rat::zero(); n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            point[var] = tab[i][cols - 1].clone();
        }
    }
    Ok(LpSolution {
        value: tab[m][cols - 1].clone(),
        point,
    })
}

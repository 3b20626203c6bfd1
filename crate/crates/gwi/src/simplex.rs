//! Dense phase-1 simplex used to decide feasibility of `Ax = b, x >= 0`.
//!
//! Bland's rule throughout, so the pivot sequence terminates on degenerate
//! problems. Sizes here are tiny (at most 256 structural variables).

use crate::error::{GwiError, Result};

pub struct FeasibilityProblem {
    /// Row-major constraint matrix, `rows x cols`.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
}

pub enum Feasibility {
    Feasible(Vec<f64>),
    Infeasible { residual: f64 },
}

/// Minimizes the sum of artificial variables; the problem is feasible iff the
/// optimum is (numerically) zero.
pub fn solve_feasibility(p: &FeasibilityProblem, tol: f64) -> Result<Feasibility> {
    let m = p.rows;
    let n = p.cols;
    let width = n + m + 1; // structural | artificial | rhs
    let mut t = vec![0.0f64; (m + 1) * width];
    let idx = |r: usize, c: usize| r * width + c;

    for r in 0..m {
        let flip = if p.b[r] < 0.0 { -1.0 } else { 1.0 };
        for c in 0..n {
            t[idx(r, c)] = flip * p.a[r * n + c];
        }
        t[idx(r, n + r)] = 1.0;
        t[idx(r, n + m)] = flip * p.b[r];
    }
    // phase-1 objective: minimize sum of artificials; zero out basic columns
    for c in 0..n {
        let s: f64 = (0..m).map(|r| t[idx(r, c)]).sum();
        t[idx(m, c)] = -s;
    }
    let rhs_sum: f64 = (0..m).map(|r| t[idx(r, n + m)]).sum();
    t[idx(m, n + m)] = -rhs_sum;

    let mut basis: Vec<usize> = (0..m).map(|r| n + r).collect();
    let eps = 1e-12;
    let max_pivots = 50 * (m + n).max(64);

    for _ in 0..max_pivots {
        // Bland: entering = lowest-index column with negative reduced cost
        let mut enter = None;
        for c in 0..n + m {
            if t[idx(m, c)] < -eps {
                enter = Some(c);
                break;
            }
        }
        let Some(ec) = enter else {
            let obj = -t[idx(m, n + m)];
            return if obj <= tol {
                let mut x = vec![0.0; n];
                for (r, &bv) in basis.iter().enumerate() {
                    if bv < n {
                        x[bv] = t[idx(r, n + m)];
                    }
                }
                Ok(Feasibility::Feasible(x))
            } else {
                Ok(Feasibility::Infeasible { residual: obj })
            };
        };

        // ratio test, ties broken by lowest basic variable index
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..m {
            let a = t[idx(r, ec)];
            if a > eps {
                let ratio = t[idx(r, n + m)] / a;
                match leave {
                    None => leave = Some((r, ratio)),
                    Some((lr, lratio)) => {
                        if ratio < lratio - eps
                            || (ratio < lratio + eps && basis[r] < basis[lr])
                        {
                            leave = Some((r, ratio));
                        }
                    }
                }
            }
        }
        let Some((lr, _)) = leave else {
            // phase-1 objective is bounded below by zero, so an unbounded
            // ray indicates numerical breakdown
            return Err(GwiError::Numerical("unbounded phase-1 simplex".into()));
        };

        // pivot on (lr, ec)
        let piv = t[idx(lr, ec)];
        for c in 0..width {
            t[idx(lr, c)] /= piv;
        }
        for r in 0..=m {
            if r == lr {
                continue;
            }
            let f = t[idx(r, ec)];
            if f != 0.0 {
                for c in 0..width {
                    t[idx(r, c)] -= f * t[idx(lr, c)];
                }
            }
        }
        basis[lr] = ec;
    }
    Err(GwiError::Numerical("simplex failed to terminate".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivially_feasible() {
        // x1 + x2 = 1
        let p = FeasibilityProblem { a: vec![1.0, 1.0], b: vec![1.0], rows: 1, cols: 2 };
        match solve_feasibility(&p, 1e-9).unwrap() {
            Feasibility::Feasible(x) => assert!((x[0] + x[1] - 1.0).abs() < 1e-9),
            _ => panic!("expected feasible"),
        }
    }

    #[test]
    fn infeasible_system() {
        // x1 = 1, x1 = 2 with x1 >= 0
        let p = FeasibilityProblem {
            a: vec![1.0, 1.0],
            b: vec![1.0, 2.0],
            rows: 2,
            cols: 1,
        };
        match solve_feasibility(&p, 1e-9).unwrap() {
            Feasibility::Infeasible { residual } => assert!(residual > 0.5),
            _ => panic!("expected infeasible"),
        }
    }

    #[test]
    fn negative_rhs_handled() {
        // -x1 = -0.5
        let p = FeasibilityProblem { a: vec![-1.0], b: vec![-0.5], rows: 1, cols: 1 };
        match solve_feasibility(&p, 1e-9).unwrap() {
            Feasibility::Feasible(x) => assert!((x[0] - 0.5).abs() < 1e-9),
            _ => panic!("expected feasible"),
        }
    }
}

//! Small dense solvers: Gaussian elimination with full pivoting for the
//! equioscillation systems and Householder least squares for the fallback.

/// Solve A x = b with full pivoting; A is row-major n×n and consumed.
/// Returns None when the pivot drops below `tol` times the largest initial
/// entry (singular to working precision).
pub(crate) fn solve_full_pivot(mut a: Vec<Vec<f64>>, mut b: Vec<f64>, tol: f64) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    let scale0 = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    let mut col_perm: Vec<usize> = (0..n).collect();

    for step in 0..n {
        // locate the largest remaining entry
        let (mut pr, mut pc, mut pv) = (step, step, 0.0f64);
        for r in step..n {
            for c in step..n {
                if a[r][c].abs() > pv {
                    pv = a[r][c].abs();
                    pr = r;
                    pc = c;
                }
            }
        }
        if pv <= tol * scale0 {
            return None;
        }
        a.swap(step, pr);
        b.swap(step, pr);
        if pc != step {
            for row in a.iter_mut() {
                row.swap(step, pc);
            }
            col_perm.swap(step, pc);
        }
        let pivot = a[step][step];
        for r in step + 1..n {
            let f = a[r][step] / pivot;
            if f == 0.0 {
                continue;
            }
            for c in step..n {
                a[r][c] -= f * a[step][c];
            }
            b[r] -= f * b[step];
        }
    }

    // back substitution
    let mut y = vec![0.0f64; n];
    for step in (0..n).rev() {
        let mut acc = b[step];
        for c in step + 1..n {
            acc -= a[step][c] * y[c];
        }
        y[step] = acc / a[step][step];
    }
    // undo column permutation
    let mut x = vec![0.0f64; n];
    for i in 0..n {
        x[col_perm[i]] = y[i];
    }
    Some(x)
}

/// Least squares min ‖A x − b‖₂ by Householder QR; `cols` holds the columns
/// of A (all of length m ≥ n). Returns None when R becomes rank deficient.
pub(crate) fn lsq_householder(cols: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = cols.len();
    let m = b.len();
    debug_assert!(cols.iter().all(|c| c.len() == m) && m >= n);
    // row-major working copy
    let mut a = vec![0.0f64; m * n];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..m {
            a[i * n + j] = col[i];
        }
    }
    let mut rhs = b.to_vec();
    let mut rdiag = vec![0.0f64; n];

    for j in 0..n {
        // norm of column j below row j
        let mut norm2 = 0.0f64;
        for i in j..m {
            norm2 += a[i * n + j] * a[i * n + j];
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            return None;
        }
        let alpha = if a[j * n + j] >= 0.0 { -norm } else { norm };
        // v = x − alpha e1, applied implicitly; store v in place of column j
        a[j * n + j] -= alpha;
        let vtv: f64 = (j..m).map(|i| a[i * n + j] * a[i * n + j]).sum();
        if vtv == 0.0 {
            return None;
        }
        for c in j + 1..n {
            let dot: f64 = (j..m).map(|i| a[i * n + j] * a[i * n + c]).sum();
            let f = 2.0 * dot / vtv;
            for i in j..m {
                a[i * n + c] -= f * a[i * n + j];
            }
        }
        let dot: f64 = (j..m).map(|i| a[i * n + j] * rhs[i]).sum();
        let f = 2.0 * dot / vtv;
        for i in j..m {
            rhs[i] -= f * a[i * n + j];
        }
        rdiag[j] = alpha;
    }

    let rmax = rdiag.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut x = vec![0.0f64; n];
    for j in (0..n).rev() {
        if rdiag[j].abs() <= 1e-14 * rmax {
            return None;
        }
        let mut acc = rhs[j];
        for c in j + 1..n {
            acc -= a[j * n + c] * x[c];
        }
        x[j] = acc / rdiag[j];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_pivot_solves_small_system() {
        let a = vec![
            vec![2.0, 1.0, -1.0],
            vec![-3.0, -1.0, 2.0],
            vec![-2.0, 1.0, 2.0],
        ];
        let b = vec![8.0, -11.0, -3.0];
        let x = solve_full_pivot(a, b, 1e-14).unwrap();
        let expect = [2.0, 3.0, -1.0];
        for (xi, ei) in x.iter().zip(expect) {
            assert!((xi - ei).abs() < 1e-12);
        }
    }

    #[test]
    fn full_pivot_detects_singular() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve_full_pivot(a, vec![1.0, 2.0], 1e-14).is_none());
    }

    #[test]
    fn householder_recovers_exact_fit() {
        // b in the column span: residual-free solution
        let m = 50;
        let xs: Vec<f64> = (0..m).map(|i| i as f64 / (m - 1) as f64).collect();
        let cols: Vec<Vec<f64>> = (0..3).map(|p| xs.iter().map(|x| x.powi(p)).collect()).collect();
        let b: Vec<f64> = xs.iter().map(|x| 1.5 - 2.0 * x + 0.25 * x * x).collect();
        let sol = lsq_householder(&cols, &b).unwrap();
        for (got, want) in sol.iter().zip([1.5, -2.0, 0.25]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn householder_least_squares_residual_orthogonal() {
        let m = 101;
        let xs: Vec<f64> = (0..m).map(|i| i as f64 / (m - 1) as f64).collect();
        let cols: Vec<Vec<f64>> = (0..4).map(|p| xs.iter().map(|x| x.powi(p)).collect()).collect();
        let b: Vec<f64> = xs.iter().map(|x| (3.0 * x).sin()).collect();
        let sol = lsq_householder(&cols, &b).unwrap();
        for col in &cols {
            let mut dot = 0.0;
            for i in 0..m {
                let fit: f64 = (0..4).map(|j| sol[j] * cols[j][i]).sum();
                dot += col[i] * (b[i] - fit);
            }
            assert!(dot.abs() < 1e-10, "normal equations violated: {dot:.2e}");
        }
    }
}

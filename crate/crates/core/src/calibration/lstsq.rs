//! Dense least squares by Householder QR with column pivoting.

use nalgebra::{DMatrix, DVector};

/// Relative threshold on `|R_kk| / |R_00|` below which a column counts as dependent.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub solution: DVector<f64>,
    pub rank: usize,
}

/// Solves `min ‖A x − b‖₂`.
///
/// Full column rank: pivoted QR with back substitution. Rank deficient: the
/// minimum-norm solution from the SVD with the same rank cutoff.
pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> LeastSquares {
    let (m, n) = a.shape();
    if n == 0 {
        return LeastSquares {
            solution: DVector::zeros(0),
            rank: 0,
        };
    }
    let mut r = a.clone();
    let mut qtb = b.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut norms: Vec<f64> = (0..n).map(|j| r.column(j).norm_squared()).collect();
    let steps = m.min(n);
    let mut diag = vec![0.0; steps];

    for k in 0..steps {
        // Pivot the remaining column of largest norm into place.
        let (pj, _) = (k..n)
            .map(|j| (j, norms[j]))
            .fold((k, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pj != k {
            r.swap_columns(k, pj);
            norms.swap(k, pj);
            perm.swap(k, pj);
        }
        let x_norm = r.view((k, k), (m - k, 1)).norm();
        if x_norm == 0.0 {
            diag[k] = 0.0;
            continue;
        }
        let alpha = if r[(k, k)] > 0.0 { -x_norm } else { x_norm };
        let mut v: Vec<f64> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let v_norm2: f64 = v.iter().map(|x| x * x).sum();
        if v_norm2 > 0.0 {
            for j in k..n {
                let dot: f64 = (k..m).map(|i| v[i - k] * r[(i, j)]).sum();
                let s = 2.0 * dot / v_norm2;
                for i in k..m {
                    r[(i, j)] -= s * v[i - k];
                }
            }
            let dot: f64 = (k..m).map(|i| v[i - k] * qtb[i]).sum();
            let s = 2.0 * dot / v_norm2;
            for i in k..m {
                qtb[i] -= s * v[i - k];
            }
        }
        diag[k] = r[(k, k)];
        for j in (k + 1)..n {
            norms[j] = (k + 1..m).map(|i| r[(i, j)] * r[(i, j)]).sum();
        }
    }

    let lead = diag.first().map_or(0.0, |d| d.abs());
    let rank = diag
        .iter()
        .take_while(|d| lead > 0.0 && d.abs() > RANK_TOLERANCE * lead)
        .count();

    if rank < n {
        return LeastSquares {
            solution: min_norm_svd(a, b, lead),
            rank,
        };
    }

    let mut z = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = ((k + 1)..n).map(|j| r[(k, j)] * z[j]).sum();
        z[k] = (qtb[k] - s) / r[(k, k)];
    }
    let mut x = DVector::zeros(n);
    for (k, &col) in perm.iter().enumerate() {
        x[col] = z[k];
    }
    LeastSquares { solution: x, rank }
}

fn min_norm_svd(a: &DMatrix<f64>, b: &DVector<f64>, lead: f64) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let cutoff = RANK_TOLERANCE * svd.singular_values.max().max(lead);
    svd.solve(b, cutoff).unwrap_or_else(|_| DVector::zeros(a.ncols()))
}

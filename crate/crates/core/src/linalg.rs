//! Fixed-size dense helpers for the 2x2 .. 4x4 systems that show up in the
//! covariance algebra.

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det<const N: usize>(mut m: [[f64; N]; N]) -> f64 {
    let mut det = 1.0;
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap_or(col);
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for row in col + 1..N {
            let factor = m[row][col] / p;
            if factor != 0.0 {
                for k in col..N {
                    m[row][k] -= factor * m[col][k];
                }
            }
        }
    }
    det
}

/// Submatrix with the given row and column index sets.
pub fn select<const N: usize, const K: usize>(
    m: &[[f64; N]; N],
    rows: [usize; K],
    cols: [usize; K],
) -> [[f64; K]; K] {
    let mut out = [[0.0; K]; K];
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            out[i][j] = m[r][c];
        }
    }
    out
}

/// Lower Cholesky factor of a symmetric positive semidefinite matrix.
/// Pivots that come out non-positive are set to zero together with the rest
/// of their column, which is the limit for rank-deficient input.
pub fn cholesky<const N: usize>(m: &[[f64; N]; N]) -> [[f64; N]; N] {
    let mut l = [[0.0; N]; N];
    for j in 0..N {
        let mut d = m[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if d <= 0.0 {
            continue;
        }
        let ljj = d.sqrt();
        l[j][j] = ljj;
        for i in j + 1..N {
            let mut s = m[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / ljj;
        }
    }
    l
}

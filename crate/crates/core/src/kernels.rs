//! Reproducing kernels K_m^{(r,s)}(x, y) = sum_{j<m} p_j^{(r)}(x) p_j^{(s)}(y)
//! and the covariance algebra of (G(x), G(y), G'(x), G'(y)).
//!
//! Kernel order `m` counts basis functions: a degree-n ensemble uses m = n + 1.

use serde::{Deserialize, Serialize};

use crate::ensemble::{eval_basis, fill_divided_differences, BasisValues, RecurrenceTable};
use crate::error::{Error, Result};
use crate::linalg::{det, select};

/// Below this relative discriminant, Delta / (K(x,x) K(y,y)), the
/// determinant route is rounding noise.
pub const DEGENERACY_THRESHOLD: f64 = 1e3 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelBlock {
    pub m: usize,
    pub x: f64,
    pub y: f64,
    pub k: f64,
    pub k01: f64,
    pub k10: f64,
    pub k11: f64,
    pub k20: f64,
    pub k02: f64,
}

fn check_order(table: &RecurrenceTable, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::domain("kernel order must be at least 1"));
    }
    table.check_degree(m - 1)
}

/// Kernel block from precomputed basis values (both must reach degree m-1).
pub fn block_from_basis(m: usize, bx: &BasisValues, by: &BasisValues) -> KernelBlock {
    let mut acc = [0.0; 6];
    for j in 0..m {
        let px = bx.values[j];
        let py = by.values[j];
        acc[0] += px[0] * py[0];
        acc[1] += px[0] * py[1];
        acc[2] += px[1] * py[0];
        acc[3] += px[1] * py[1];
        acc[4] += px[2] * py[0];
        acc[5] += px[0] * py[2];
    }
    KernelBlock {
        m,
        x: bx.x,
        y: by.x,
        k: acc[0],
        k01: acc[1],
        k10: acc[2],
        k11: acc[3],
        k20: acc[4],
        k02: acc[5],
    }
}

/// All six kernel entries at (x, y) by direct summation.
pub fn kernel_block(table: &RecurrenceTable, m: usize, x: f64, y: f64) -> Result<KernelBlock> {
    check_order(table, m)?;
    let bx = eval_basis(table, m - 1, x, 2)?;
    let by = if y == x { bx.clone() } else { eval_basis(table, m - 1, y, 2)? };
    Ok(block_from_basis(m, &bx, &by))
}

/// K_m(x, y) by the Christoffel-Darboux formula
/// `b_m (p_m(x) p_{m-1}(y) - p_{m-1}(x) p_m(y)) / (x - y)`.
pub fn cd_kernel(table: &RecurrenceTable, m: usize, x: f64, y: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("kernel order must be at least 1"));
    }
    if (x - y).abs() < 1e-12 {
        return Err(Error::domain(format!(
            "Christoffel-Darboux form needs |x - y| >= 1e-12, got {:e}",
            (x - y).abs()
        )));
    }
    table.check_degree(m)?;
    let bx = eval_basis(table, m, x, 0)?;
    let by = eval_basis(table, m, y, 0)?;
    let num = bx.get(m, 0) * by.get(m - 1, 0) - bx.get(m - 1, 0) * by.get(m, 0);
    Ok(table.b(m) * num / (x - y))
}

/// The three kernel blocks needed for a point pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairKernels {
    pub xx: KernelBlock,
    pub yy: KernelBlock,
    pub xy: KernelBlock,
}

impl PairKernels {
    pub fn compute(table: &RecurrenceTable, m: usize, x: f64, y: f64) -> Result<Self> {
        check_order(table, m)?;
        let bx = eval_basis(table, m - 1, x, 2)?;
        let by = eval_basis(table, m - 1, y, 2)?;
        Ok(Self::from_basis(m, &bx, &by))
    }

    pub fn from_basis(m: usize, bx: &BasisValues, by: &BasisValues) -> Self {
        PairKernels {
            xx: block_from_basis(m, bx, bx),
            yy: block_from_basis(m, by, by),
            xy: block_from_basis(m, bx, by),
        }
    }

    /// Covariance matrix of (G(x), G(y), G'(x), G'(y)).
    pub fn sigma(&self) -> [[f64; 4]; 4] {
        let (xx, yy, xy) = (&self.xx, &self.yy, &self.xy);
        // K^{(0,1)}(y, x) = K^{(1,0)}(x, y)
        let k01_yx = xy.k10;
        [
            [xx.k, xy.k, xx.k01, xy.k01],
            [xy.k, yy.k, k01_yx, yy.k01],
            [xx.k01, k01_yx, xx.k11, xy.k11],
            [xy.k01, yy.k01, xy.k11, yy.k11],
        ]
    }

    /// Delta / (K(x,x) K(y,y)), formed as (1 - r)(1 + r).
    pub fn relative_delta(&self) -> f64 {
        let r = self.xy.k / (self.xx.k * self.yy.k).sqrt();
        (1.0 - r) * (1.0 + r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrices {
    pub delta: f64,
    pub sigma: [[f64; 4]; 4],
    pub omega11: f64,
    pub omega12: f64,
    pub omega22: f64,
    pub det_sigma: f64,
}

/// Delta, Sigma, Omega and det Sigma for a point pair.
///
/// Omega entries come from bordered 3x3 determinants of Sigma divided by
/// Delta, and det Sigma from pivoted elimination, all on the
/// diagonally-normalized matrix so that entries of size n, n^2 and n^3 do
/// not mix in one elimination.
pub fn correlation_matrices(pair: &PairKernels) -> Result<CorrelationMatrices> {
    let sigma = pair.sigma();
    let diag: [f64; 4] = std::array::from_fn(|i| sigma[i][i]);
    if diag.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::domain("degenerate variances (kernel order too small)"));
    }
    let scale: [f64; 4] = std::array::from_fn(|i| diag[i].sqrt());
    let mut unit = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            unit[i][j] = sigma[i][j] / (scale[i] * scale[j]);
        }
    }
    let rel_delta = pair.relative_delta();
    let delta = rel_delta * diag[0] * diag[1];
    if rel_delta < DEGENERACY_THRESHOLD {
        return Err(Error::Degenerate {
            relative_delta: rel_delta,
        });
    }
    let d11 = det(select(&unit, [0, 1, 2], [0, 1, 2]));
    let d22 = det(select(&unit, [0, 1, 3], [0, 1, 3]));
    let d12 = det(select(&unit, [0, 1, 2], [0, 1, 3]));
    let omega11 = d11 / rel_delta * diag[2];
    let omega22 = d22 / rel_delta * diag[3];
    let omega12 = d12 / rel_delta * scale[2] * scale[3];
    let det_sigma = det(unit) * diag.iter().product::<f64>();
    Ok(CorrelationMatrices {
        delta,
        sigma,
        omega11,
        omega12,
        omega22,
        det_sigma,
    })
}

/// Omega entries by the expanded conditional-covariance expressions.
/// Kept as a cross-check of [`correlation_matrices`]; it subtracts products
/// of size O(m^3) and loses accuracy near the diagonal.
pub fn omega_direct(pair: &PairKernels) -> (f64, f64, f64) {
    let (xx, yy, xy) = (&pair.xx, &pair.yy, &pair.xy);
    let (kxx, kyy, kxy) = (xx.k, yy.k, xy.k);
    let (k01xx, k01yy, k01xy, k01yx) = (xx.k01, yy.k01, xy.k01, xy.k10);
    let delta = kxx * kyy - kxy * kxy;
    let o11 = xx.k11
        - (kyy * k01xx * k01xx - 2.0 * kxy * k01xx * k01yx + kxx * k01yx * k01yx) / delta;
    let o22 = yy.k11
        - (kyy * k01xy * k01xy - 2.0 * kxy * k01xy * k01yy + kxx * k01yy * k01yy) / delta;
    let o12 = xy.k11
        - (kyy * k01xx * k01xy - kxy * k01xy * k01yx - kxy * k01xx * k01yy
            + kxx * k01yx * k01yy)
            / delta;
    (o11, o12, o22)
}

/// Gram matrix of the Hermite divided differences
/// w_j = (p_j[x], p_j[x,y], p_j[x,x,y], p_j[x,x,y,y]), j < m.
///
/// With h = y - x, (G(x), G(y), G'(x), G'(y)) = T W for the lower-triangular
/// T = [[1,0,0,0],[1,h,0,0],[0,1,-h,0],[0,1,h,h^2]], so this matrix carries
/// the same information as Sigma but stays well conditioned as y -> x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfluentGram {
    pub m: usize,
    pub x: f64,
    pub y: f64,
    pub gram: [[f64; 4]; 4],
}

impl ConfluentGram {
    pub fn compute(table: &RecurrenceTable, m: usize, x: f64, y: f64) -> Result<Self> {
        check_order(table, m)?;
        let mut rows = vec![[0.0; 4]; m];
        fill_divided_differences(table, x, y, &mut rows);
        Ok(Self::from_rows(m, x, y, &rows))
    }

    pub(crate) fn from_rows(m: usize, x: f64, y: f64, rows: &[[f64; 4]]) -> Self {
        let mut gram = [[0.0; 4]; 4];
        for w in &rows[..m] {
            for i in 0..4 {
                for j in i..4 {
                    gram[i][j] += w[i] * w[j];
                }
            }
        }
        for i in 0..4 {
            for j in 0..i {
                gram[i][j] = gram[j][i];
            }
        }
        ConfluentGram { m, x, y, gram }
    }

    /// Sigma rebuilt from the Gram matrix as T Gram T^T.
    pub fn sigma(&self) -> [[f64; 4]; 4] {
        let h = self.y - self.x;
        let t = [
            [1.0, 0.0, 0.0, 0.0],
            [1.0, h, 0.0, 0.0],
            [0.0, 1.0, -h, 0.0],
            [0.0, 1.0, h, h * h],
        ];
        let mut tg = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                tg[i][j] = (0..4).map(|k| t[i][k] * self.gram[k][j]).sum();
            }
        }
        let mut out = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = (0..4).map(|k| tg[i][k] * t[j][k]).sum();
            }
        }
        out
    }
}

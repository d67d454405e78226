//! One- and two-point intensities of real zeros of G_n = sum_{j<=n} a_j p_j
//! with i.i.d. standard Gaussian a_j.
//!
//! Conventions: degree n uses kernel order m = n + 1, and
//! E[N_n([a, b])] = integral of rho1 over [a, b] (no extra 1/pi factor).
//!
//! Two routes compute rho2:
//! * [`rho2`] works from Sigma through bordered determinants and refuses
//!   pairs whose discriminant is at rounding level;
//! * [`rho2_confluent`] conditions on Hermite divided differences instead of
//!   point values, which removes every factor of (y - x) analytically and is
//!   accurate all the way to the diagonal. Scaled and near-diagonal callers
//!   use this one.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ensemble::{fill_basis, fill_divided_differences, RecurrenceTable};
use crate::equilibrium::omega_density;
use crate::error::{Error, Result};
use crate::kernels::{correlation_matrices, kernel_block, ConfluentGram, KernelBlock, PairKernels};
use crate::linalg::cholesky;

/// Relative slack under which a negative square-root argument is rounding.
const SQRT_SLACK: f64 = 1e-12;
/// Slack for an arcsin argument just outside [-1, 1].
const ASIN_SLACK: f64 = 1e-10;
/// Slack for quantities that are nonnegative in exact arithmetic.
const NONNEG_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityPair {
    pub rho1_x: f64,
    pub rho1_y: f64,
    pub rho2: f64,
    /// rho2 - rho1(x) rho1(y)
    pub defect: f64,
    pub psi_x: f64,
    pub psi_y: f64,
}

/// rho1 and Psi = K11 K - K01^2 from a diagonal kernel block.
pub fn rho1_from_block(block: &KernelBlock) -> Result<(f64, f64)> {
    rho1_from_sums(block.k, block.k01, block.k11)
}

fn rho1_from_sums(k: f64, k01: f64, k11: f64) -> Result<(f64, f64)> {
    if k11 == 0.0 {
        return Ok((0.0, 0.0));
    }
    let psi = k11 * k - k01 * k01;
    let arg = psi / (k * k);
    if arg >= 0.0 {
        return Ok((arg.sqrt() / PI, psi));
    }
    if arg >= -SQRT_SLACK * (k11 / k) {
        Ok((0.0, 0.0))
    } else {
        Err(Error::consistency(format!(
            "rho1 square-root argument {arg:e} is negative beyond rounding"
        )))
    }
}

/// Expected density of real zeros at x for the degree-n ensemble.
pub fn rho1(table: &RecurrenceTable, n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let block = kernel_block(table, n + 1, x, x)?;
    rho1_from_block(&block).map(|(r, _)| r)
}

/// Two-point intensity by the determinant route.
///
/// `sqrt(Omega11 Omega22 - Omega12^2)` is taken as `sqrt(det Sigma / Delta)`.
pub fn rho2(table: &RecurrenceTable, n: usize, x: f64, y: f64) -> Result<IntensityPair> {
    if n == 0 {
        return Err(Error::domain("two-point intensity needs degree n >= 1"));
    }
    if x == y {
        return Err(Error::Degenerate { relative_delta: 0.0 });
    }
    let pair = PairKernels::compute(table, n + 1, x, y)?;
    let cm = correlation_matrices(&pair)?;
    let (rho1_x, psi_x) = rho1_from_block(&pair.xx)?;
    let (rho1_y, psi_y) = rho1_from_block(&pair.yy)?;

    let var_scale = pair.xx.k11 * pair.yy.k11;
    let det_unit = cm.det_sigma / (pair.xx.k * pair.yy.k * var_scale);
    if det_unit < -NONNEG_SLACK {
        return Err(Error::consistency(format!(
            "det Sigma is negative: {:e} (normalized)",
            det_unit
        )));
    }
    let o11 = clamp_nonneg(cm.omega11, pair.xx.k11, "Omega11")?;
    let o22 = clamp_nonneg(cm.omega22, pair.yy.k11, "Omega22")?;
    let root = (cm.det_sigma.max(0.0) / cm.delta).sqrt();
    let denom = (o11 * o22).sqrt();
    let arcsin_term = if denom > 1e-13 * var_scale.sqrt() {
        let r = cm.omega12 / denom;
        if r.abs() > 1.0 + ASIN_SLACK {
            return Err(Error::consistency(format!(
                "|Omega12| / sqrt(Omega11 Omega22) = {} exceeds 1",
                r.abs()
            )));
        }
        cm.omega12 * r.clamp(-1.0, 1.0).asin()
    } else {
        // conditional derivative variances at rounding level
        0.0
    };
    let rho2 = (root + arcsin_term) / (PI * PI * cm.delta.sqrt());
    if rho2 < -NONNEG_SLACK * rho1_x * rho1_y {
        return Err(Error::consistency(format!("rho2 = {rho2:e} is negative")));
    }
    let rho2 = rho2.max(0.0);
    Ok(IntensityPair {
        rho1_x,
        rho1_y,
        rho2,
        defect: rho2 - rho1_x * rho1_y,
        psi_x,
        psi_y,
    })
}

fn clamp_nonneg(v: f64, scale: f64, what: &str) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -NONNEG_SLACK * scale {
        Ok(0.0)
    } else {
        Err(Error::consistency(format!("{what} = {v:e} is negative")))
    }
}

/// rho2 from the Gram matrix of Hermite divided differences.
///
/// With h = y - x and Omega~ the covariance of (G[x,x,y], G[x,x,y,y]) given
/// G[x] = G[x,y] = 0:
///
/// ```text
/// rho2 = |h| / (pi^2 sqrt(det Gamma_11)) * (s + q atan2(q, s)),
///   q = Omega~_11 + h Omega~_12,   s = |h| sqrt(det Omega~)
/// ```
///
/// which is the determinant-route formula with the h-powers cancelled and the
/// arcsin rewritten as an atan2 of its sine and cosine.
pub fn rho2_from_gram(gram: &ConfluentGram) -> Result<f64> {
    let g = &gram.gram;
    let h = gram.y - gram.x;
    let scale: [f64; 4] = std::array::from_fn(|i| if g[i][i] > 0.0 { g[i][i].sqrt() } else { 1.0 });
    let mut unit = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            unit[i][j] = g[i][j] / (scale[i] * scale[j]);
        }
    }
    let l = cholesky(&unit);
    let sqrt_det11 = l[0][0] * l[1][1] * scale[0] * scale[1];
    if !(sqrt_det11 > 0.0) {
        return Err(Error::domain(
            "G(x) and G[x,y] are linearly dependent (degree too small)",
        ));
    }
    // Schur complement of the leading 2x2 block: rows 2..4 of L times their transpose
    let o_aa = (l[2][2] * l[2][2]) * scale[2] * scale[2];
    let o_ab = (l[3][2] * l[2][2]) * scale[2] * scale[3];
    let sqrt_det_o = l[2][2] * l[3][3] * scale[2] * scale[3];
    let q = o_aa + h * o_ab;
    let s = h.abs() * sqrt_det_o;
    let bracket = if q == 0.0 && s == 0.0 { 0.0 } else { s + q * q.atan2(s) };
    Ok(h.abs() * bracket / (PI * PI * sqrt_det11))
}

/// Two-point intensity by the divided-difference route. Valid for any
/// x != y, including pairs far below the determinant route's degeneracy
/// threshold.
pub fn rho2_confluent(table: &RecurrenceTable, n: usize, x: f64, y: f64) -> Result<IntensityPair> {
    if n == 0 {
        return Err(Error::domain("two-point intensity needs degree n >= 1"));
    }
    if x == y {
        return Err(Error::domain("two-point intensity needs x != y"));
    }
    let gram = ConfluentGram::compute(table, n + 1, x, y)?;
    let rho2 = rho2_from_gram(&gram)?;
    let bx = kernel_block(table, n + 1, x, x)?;
    let by = kernel_block(table, n + 1, y, y)?;
    let (rho1_x, psi_x) = rho1_from_block(&bx)?;
    let (rho1_y, psi_y) = rho1_from_block(&by)?;
    Ok(IntensityPair {
        rho1_x,
        rho1_y,
        rho2,
        defect: rho2 - rho1_x * rho1_y,
        psi_x,
        psi_y,
    })
}

/// Repeated defect evaluations with the first point held fixed. Keeps the
/// scratch rows so the inner loop of a double integral does not allocate.
pub struct DefectEvaluator<'a> {
    table: &'a RecurrenceTable,
    n: usize,
    x: f64,
    rho1_x: f64,
    dd_rows: Vec<[f64; 4]>,
    basis_rows: Vec<[f64; 3]>,
}

impl<'a> DefectEvaluator<'a> {
    pub fn new(table: &'a RecurrenceTable, n: usize, x: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("two-point intensity needs degree n >= 1"));
        }
        table.check_degree(n)?;
        let mut basis_rows = vec![[0.0; 3]; n + 1];
        let rho1_x = rho1_at(table, x, &mut basis_rows)?;
        Ok(DefectEvaluator {
            table,
            n,
            x,
            rho1_x,
            dd_rows: vec![[0.0; 4]; n + 1],
            basis_rows,
        })
    }

    pub fn rho1_x(&self) -> f64 {
        self.rho1_x
    }

    pub fn rho1(&mut self, y: f64) -> Result<f64> {
        rho1_at(self.table, y, &mut self.basis_rows)
    }

    /// rho2(x, y) - rho1(x) rho1(y).
    pub fn defect(&mut self, y: f64) -> Result<f64> {
        if y == self.x {
            return Err(Error::domain("defect evaluated on the diagonal"));
        }
        fill_divided_differences(self.table, self.x, y, &mut self.dd_rows);
        let gram = ConfluentGram::from_rows(self.n + 1, self.x, y, &self.dd_rows);
        let rho2 = rho2_from_gram(&gram)?;
        let rho1_y = self.rho1(y)?;
        Ok(rho2 - self.rho1_x * rho1_y)
    }
}

fn rho1_at(table: &RecurrenceTable, x: f64, rows: &mut [[f64; 3]]) -> Result<f64> {
    fill_basis(table, x, 1, rows);
    let (mut k, mut k01, mut k11) = (0.0, 0.0, 0.0);
    for r in rows.iter() {
        k += r[0] * r[0];
        k01 += r[0] * r[1];
        k11 += r[1] * r[1];
    }
    rho1_from_sums(k, k01, k11).map(|(r, _)| r)
}

/// (n omega(x))^{-2} (rho2(x, y) - rho1(x) rho1(y)) at y = x + u / (n omega(x)).
pub fn scaled_defect(table: &RecurrenceTable, n: usize, x: f64, u: f64) -> Result<f64> {
    if u == 0.0 || !u.is_finite() {
        return Err(Error::domain("scaled separation u must be finite and nonzero"));
    }
    let scale = n as f64 * omega_density(x)?;
    let y = x + u / scale;
    if !(y.abs() < 1.0) {
        return Err(Error::domain(format!(
            "scaled partner point y = {y} leaves (-1, 1)"
        )));
    }
    let mut eval = DefectEvaluator::new(table, n, x)?;
    Ok(eval.defect(y)? / (scale * scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::jacobi_recurrence;
    use approx::assert_relative_eq;

    fn legendre(m: usize) -> RecurrenceTable {
        jacobi_recurrence(0.0, 0.0, m).unwrap()
    }

    fn chebyshev(m: usize) -> RecurrenceTable {
        jacobi_recurrence(-0.5, -0.5, m).unwrap()
    }

    #[test]
    fn rho1_degree_one_closed_form() {
        let t = legendre(3);
        for &x in &[0.0, 0.4, -0.9, 2.0] {
            let expect = 3f64.sqrt() / (PI * (1.0 + 3.0 * x * x));
            assert_relative_eq!(rho1(&t, 1, x).unwrap(), expect, max_relative = 1e-14);
        }
        assert_relative_eq!(rho1(&t, 1, 0.0).unwrap(), 0.551_328_895_421_792, epsilon = 1e-12);
    }

    #[test]
    fn rho1_degree_zero_is_zero() {
        assert_eq!(rho1(&legendre(3), 0, 0.2).unwrap(), 0.0);
    }

    #[test]
    fn rho1_bulk_scaling() {
        let n = 400;
        let t = legendre(n + 1);
        let r = rho1(&t, n, 0.0).unwrap() / (n as f64 * omega_density(0.0).unwrap());
        assert!((r * 3f64.sqrt() - 1.0).abs() < 0.02);
    }

    #[test]
    fn linear_ensemble_has_no_pairs() {
        let t = legendre(3);
        for &(x, y) in &[(0.1, 0.7), (-0.5, 0.3)] {
            let det = rho2(&t, 1, x, y).unwrap();
            assert!(det.rho2.abs() < 1e-12, "{det:?}");
            let conf = rho2_confluent(&t, 1, x, y).unwrap();
            assert_eq!(conf.rho2, 0.0);
            assert_relative_eq!(conf.defect, -det.rho1_x * det.rho1_y, max_relative = 1e-12);
        }
    }

    #[test]
    fn rho2_is_symmetric() {
        let t = chebyshev(31);
        for &(x, y) in &[(0.12, -0.33), (0.8, 0.79), (-0.6, 0.05)] {
            let a = rho2(&t, 30, x, y).unwrap();
            let b = rho2(&t, 30, y, x).unwrap();
            assert_relative_eq!(a.rho2, b.rho2, max_relative = 1e-10);
            let c = rho2_confluent(&t, 30, x, y).unwrap();
            let d = rho2_confluent(&t, 30, y, x).unwrap();
            assert_relative_eq!(c.rho2, d.rho2, max_relative = 1e-10);
        }
    }

    #[test]
    fn routes_agree_off_diagonal() {
        for t in [legendre(201), chebyshev(201), jacobi_recurrence(0.5, 1.5, 201).unwrap()] {
            for &n in &[3usize, 10, 60, 200] {
                for &(x, y) in &[(0.1, 0.5), (-0.7, 0.65), (0.3, 0.31), (0.0, -0.02)] {
                    let det = rho2(&t, n, x, y).unwrap();
                    let conf = rho2_confluent(&t, n, x, y).unwrap();
                    let scale = det.rho1_x * det.rho1_y;
                    assert!(
                        (det.rho2 - conf.rho2).abs() < 1e-8 * scale,
                        "n={n} ({x},{y}): {} vs {}",
                        det.rho2,
                        conf.rho2
                    );
                }
            }
        }
    }

    #[test]
    fn determinant_route_refuses_the_diagonal() {
        let t = legendre(21);
        assert!(matches!(rho2(&t, 20, 0.3, 0.3), Err(Error::Degenerate { .. })));
        assert!(matches!(rho2(&t, 20, 0.3, 0.3 + 1e-9), Err(Error::Degenerate { .. })));
        // the confluent route has no such limit and tends to zero
        let near = rho2_confluent(&t, 20, 0.3, 0.3 + 1e-9).unwrap();
        assert!(near.rho2 >= 0.0 && near.rho2 < 1e-5);
    }

    #[test]
    fn psi_is_nonnegative() {
        let t = jacobi_recurrence(-0.3, 0.8, 101).unwrap();
        for i in 0..50 {
            let x = -0.98 + 0.04 * i as f64;
            let p = rho2_confluent(&t, 100, x, x + 0.013).unwrap();
            assert!(p.psi_x >= 0.0 && p.psi_y >= 0.0);
        }
    }

    #[test]
    fn scaled_defect_domain_checks() {
        let t = chebyshev(101);
        assert!(scaled_defect(&t, 100, 0.3, 0.0).is_err());
        assert!(scaled_defect(&t, 100, 1.0, 0.5).is_err());
        assert!(scaled_defect(&t, 100, 0.99, 50.0).is_err());
    }

    #[test]
    fn scaled_defect_near_diagonal_is_bounded() {
        let n = 200;
        let t = chebyshev(n + 1);
        for i in 1..=50 {
            let u = 0.01 * i as f64;
            for s in [-1.0, 1.0] {
                let v = scaled_defect(&t, n, 0.3, s * u).unwrap();
                assert!(v.abs() <= 1.0, "u={}: {v}", s * u);
            }
        }
    }
}

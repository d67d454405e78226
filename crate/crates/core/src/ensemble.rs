//! Orthonormal polynomial families defined by three-term recurrences.
//!
//! A [`RecurrenceTable`] stores the coefficients of
//!
//! ```text
//! b_{k+1} p_{k+1}(x) = (x - a_k) p_k(x) - b_k p_{k-1}(x),   p_{-1} = 0,  p_0 = p0
//! ```
//!
//! The measure is not normalized to a probability measure: `p0` is
//! `mass^{-1/2}`, so the polynomials are orthonormal for the measure itself.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::GaussRule;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EnsembleKind {
    /// Weight (1 - x)^alpha (1 + x)^beta on [-1, 1].
    Jacobi { alpha: f64, beta: f64 },
    /// Coefficients loaded from a file; the weight is unknown.
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceTable {
    kind: EnsembleKind,
    /// a_0 .. a_{m-1}
    a: Vec<f64>,
    /// b_1 .. b_m, stored at index k - 1
    b: Vec<f64>,
    p0: f64,
}

impl RecurrenceTable {
    /// Builds a table after validating the invariants.
    pub fn new(kind: EnsembleKind, a: Vec<f64>, b: Vec<f64>, p0: f64) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::domain(format!(
                "recurrence needs equally many a_k and b_k (got {} and {})",
                a.len(),
                b.len()
            )));
        }
        if !(p0.is_finite() && p0 > 0.0) {
            return Err(Error::domain(format!("p0 must be positive, got {p0}")));
        }
        if let Some(k) = a.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("a_{k} is not finite")));
        }
        if let Some(k) = b.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::domain(format!(
                "b_{} must be positive, got {}",
                k + 1,
                b[k]
            )));
        }
        Ok(RecurrenceTable { kind, a, b, p0 })
    }

    pub fn kind(&self) -> EnsembleKind {
        self.kind
    }

    /// Highest degree whose polynomial the table can produce.
    pub fn capacity(&self) -> usize {
        self.a.len()
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    /// Diagonal coefficient a_k, 0 <= k < capacity.
    pub fn a(&self, k: usize) -> f64 {
        self.a[k]
    }

    /// Off-diagonal coefficient b_k, 1 <= k <= capacity.
    pub fn b(&self, k: usize) -> f64 {
        self.b[k - 1]
    }

    /// Leading coefficient gamma_n = p0 / (b_1 ... b_n).
    pub fn leading_coefficient(&self, n: usize) -> Result<f64> {
        self.check_degree(n)?;
        // log-space keeps the product finite for large n
        let log: f64 = self.b[..n].iter().map(|b| b.ln()).sum();
        Ok((self.p0.ln() - log).exp())
    }

    /// Total mass of the weight, for built-in families.
    pub fn mass(&self) -> Option<f64> {
        match self.kind {
            EnsembleKind::Jacobi { alpha, beta } => Some(jacobi_mass(alpha, beta)),
            EnsembleKind::Custom => None,
        }
    }

    /// Short identifier used in reports, e.g. `jacobi:-0.5:-0.5`.
    pub fn label(&self) -> String {
        match self.kind {
            EnsembleKind::Jacobi { alpha, beta } => format!("jacobi:{alpha}:{beta}"),
            EnsembleKind::Custom => "custom".to_string(),
        }
    }

    pub(crate) fn check_degree(&self, n: usize) -> Result<()> {
        if n > self.capacity() {
            Err(Error::Capacity {
                requested: n,
                capacity: self.capacity(),
            })
        } else {
            Ok(())
        }
    }
}

fn jacobi_mass(alpha: f64, beta: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    ((alpha + beta + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(alpha + beta + 2.0))
    .exp()
}

/// Orthonormal Jacobi recurrence for (1 - x)^alpha (1 + x)^beta with
/// capacity `m`.
pub fn jacobi_recurrence(alpha: f64, beta: f64, m: usize) -> Result<RecurrenceTable> {
    if !(alpha > -1.0 && beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::domain(format!(
            "Jacobi parameters must exceed -1, got alpha={alpha}, beta={beta}"
        )));
    }
    if m == 0 {
        return Err(Error::domain("capacity must be at least 1"));
    }
    let s = alpha + beta;
    let a = (0..m)
        .map(|k| {
            if k == 0 {
                (beta - alpha) / (s + 2.0)
            } else {
                let t = 2.0 * k as f64 + s;
                (beta * beta - alpha * alpha) / (t * (t + 2.0))
            }
        })
        .collect();
    let b = (1..=m)
        .map(|k| {
            if k == 1 {
                // (1 + alpha + beta) cancels; needed when alpha + beta = -1
                (4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + s).powi(2) * (3.0 + s))).sqrt()
            } else {
                let k = k as f64;
                let t = 2.0 * k + s;
                (4.0 * k * (k + alpha) * (k + beta) * (k + s) / (t * t * (t + 1.0) * (t - 1.0)))
                    .sqrt()
            }
        })
        .collect();
    let p0 = 1.0 / jacobi_mass(alpha, beta).sqrt();
    RecurrenceTable::new(EnsembleKind::Jacobi { alpha, beta }, a, b, p0)
}

/// Reads a custom recurrence file.
///
/// Format: `#` starts a comment; the first data line is `p0 <value>`; every
/// following line is `<k> <a_k> <b_{k+1}>` with k = 0, 1, 2, ...
pub fn load_recurrence(path: impl AsRef<Path>) -> Result<RecurrenceTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_recurrence(&text, path)
}

pub fn parse_recurrence(text: &str, origin: &Path) -> Result<RecurrenceTable> {
    let err = |line: usize, msg: String| Error::Parse {
        path: PathBuf::from(origin),
        line,
        msg,
    };
    let mut p0: Option<f64> = None;
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if p0.is_none() {
            if fields.len() != 2 || fields[0] != "p0" {
                return Err(err(line_no, format!("expected `p0 <value>`, found `{content}`")));
            }
            let v = parse_decimal(fields[1]).map_err(|m| err(line_no, m))?;
            if !(v > 0.0) {
                return Err(err(line_no, format!("p0 must be positive, got {v}")));
            }
            p0 = Some(v);
            continue;
        }
        if fields.len() != 3 {
            return Err(err(
                line_no,
                format!("expected `<k> <a_k> <b_k+1>`, found {} fields", fields.len()),
            ));
        }
        let k: usize = fields[0]
            .parse()
            .map_err(|_| err(line_no, format!("bad index `{}`", fields[0])))?;
        if k != a.len() {
            return Err(err(line_no, format!("expected index {}, found {k}", a.len())));
        }
        let ak = parse_decimal(fields[1]).map_err(|m| err(line_no, m))?;
        let bk = parse_decimal(fields[2]).map_err(|m| err(line_no, m))?;
        if !(bk > 0.0) {
            return Err(err(line_no, format!("b_{} must be positive, got {bk}", k + 1)));
        }
        a.push(ak);
        b.push(bk);
    }
    let Some(p0) = p0 else {
        return Err(err(last_line.max(1), "missing `p0` header".to_string()));
    };
    if a.is_empty() {
        return Err(err(last_line, "no recurrence rows".to_string()));
    }
    RecurrenceTable::new(EnsembleKind::Custom, a, b, p0)
}

// Rust's float parser is locale-independent; only reject what it would
// silently accept but a recurrence file should not contain.
fn parse_decimal(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("bad number `{s}`"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite number `{s}`"))
    }
}

/// Values p_j^{(r)}(x) for 0 <= j <= n and r <= max_deriv.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisValues {
    pub n: usize,
    pub max_deriv: usize,
    pub x: f64,
    /// Row j holds (p_j, p_j', p_j''); entries above max_deriv are zero.
    pub values: Vec<[f64; 3]>,
}

impl BasisValues {
    pub fn get(&self, j: usize, r: usize) -> f64 {
        self.values[j][r]
    }
}

/// Evaluates p_0..p_n and up to two derivatives by the differentiated
/// recurrence
/// `b_{k+1} p_{k+1}^{(r)} = (x - a_k) p_k^{(r)} + r p_k^{(r-1)} - b_k p_{k-1}^{(r)}`.
pub fn eval_basis(
    table: &RecurrenceTable,
    n: usize,
    x: f64,
    max_deriv: usize,
) -> Result<BasisValues> {
    if max_deriv > 2 {
        return Err(Error::domain(format!("max_deriv must be <= 2, got {max_deriv}")));
    }
    table.check_degree(n)?;
    let mut values = vec![[0.0; 3]; n + 1];
    fill_basis(table, x, max_deriv, &mut values);
    Ok(BasisValues {
        n,
        max_deriv,
        x,
        values,
    })
}

/// Allocation-free core of [`eval_basis`]; `out.len() - 1` must not exceed
/// the table capacity.
pub(crate) fn fill_basis(table: &RecurrenceTable, x: f64, max_deriv: usize, out: &mut [[f64; 3]]) {
    let Some(first) = out.first_mut() else {
        return;
    };
    *first = [table.p0, 0.0, 0.0];
    let mut prev = [0.0; 3];
    for k in 0..out.len() - 1 {
        let cur = out[k];
        let t = x - table.a[k];
        let bk = if k == 0 { 0.0 } else { table.b[k - 1] };
        let inv = 1.0 / table.b[k];
        let mut next = [0.0; 3];
        next[0] = (t * cur[0] - bk * prev[0]) * inv;
        if max_deriv >= 1 {
            next[1] = (t * cur[1] + cur[0] - bk * prev[1]) * inv;
        }
        if max_deriv >= 2 {
            next[2] = (t * cur[2] + 2.0 * cur[1] - bk * prev[2]) * inv;
        }
        prev = cur;
        out[k + 1] = next;
    }
}

/// Hermite divided differences of p_j over the node sequence (x, y, x, y):
/// row j holds (p_j[x], p_j[x,y], p_j[x,x,y], p_j[x,x,y,y]).
///
/// Uses the product rule `[z_0..z_k](t f) = z_k [z_0..z_k] f + [z_0..z_{k-1}] f`
/// inside the recurrence, so no difference quotient is ever formed and the
/// values stay accurate as y approaches x (where they tend to p, p', p''/2,
/// p'''/6).
pub fn divided_differences(table: &RecurrenceTable, n: usize, x: f64, y: f64) -> Result<Vec<[f64; 4]>> {
    table.check_degree(n)?;
    let mut out = vec![[0.0; 4]; n + 1];
    fill_divided_differences(table, x, y, &mut out);
    Ok(out)
}

pub(crate) fn fill_divided_differences(table: &RecurrenceTable, x: f64, y: f64, out: &mut [[f64; 4]]) {
    let Some(first) = out.first_mut() else {
        return;
    };
    *first = [table.p0, 0.0, 0.0, 0.0];
    let nodes = [x, y, x, y];
    let mut prev = [0.0; 4];
    for k in 0..out.len() - 1 {
        let cur = out[k];
        let ak = table.a[k];
        let bk = if k == 0 { 0.0 } else { table.b[k - 1] };
        let inv = 1.0 / table.b[k];
        let mut next = [0.0; 4];
        for i in 0..4 {
            let lower = if i == 0 { 0.0 } else { cur[i - 1] };
            next[i] = ((nodes[i] - ak) * cur[i] + lower - bk * prev[i]) * inv;
        }
        prev = cur;
        out[k + 1] = next;
    }
}

/// Evaluates sum_j coeffs[j] p_j(x).
pub fn eval_series(table: &RecurrenceTable, coeffs: &[f64], x: f64) -> Result<f64> {
    if coeffs.is_empty() {
        return Ok(0.0);
    }
    let n = coeffs.len() - 1;
    table.check_degree(n)?;
    let mut prev = 0.0;
    let mut cur = table.p0;
    let mut acc = coeffs[0] * cur;
    for k in 0..n {
        let bk = if k == 0 { 0.0 } else { table.b[k - 1] };
        let next = ((x - table.a[k]) * cur - bk * prev) / table.b[k];
        prev = cur;
        cur = next;
        acc += coeffs[k + 1] * cur;
    }
    Ok(acc)
}

/// Largest deviation of the Gram matrix of p_0..p_n from the identity,
/// integrated against the known Jacobi weight.
///
/// The integral runs in theta with x = cos(theta), where the weight becomes
/// 2^{alpha+beta+1} sin(theta/2)^{2 alpha + 1} cos(theta/2)^{2 beta + 1}.
/// Panels are graded geometrically toward theta = 0 and theta = pi so the
/// algebraic endpoint behaviour for non-half-integer parameters is resolved.
pub fn orthonormality_residual(table: &RecurrenceTable, n: usize) -> Result<f64> {
    let EnsembleKind::Jacobi { alpha, beta } = table.kind else {
        return Err(Error::Unsupported(
            "orthonormality residual needs a built-in weight".into(),
        ));
    };
    table.check_degree(n)?;
    let rule = GaussRule::legendre(24);
    let breaks = graded_breaks(n);
    let scale = (alpha + beta + 1.0) * std::f64::consts::LN_2;
    let weight = |theta: f64| {
        let (s, c) = (0.5 * theta).sin_cos();
        ((2.0 * alpha + 1.0) * s.ln() + (2.0 * beta + 1.0) * c.ln() + scale).exp()
    };
    let mut gram = vec![0.0; (n + 1) * (n + 1)];
    let mut row = vec![[0.0; 3]; n + 1];
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        for (t, wt) in rule.nodes.iter().zip(&rule.weights) {
            let theta = mid + half * t;
            let wq = wt * half * weight(theta);
            fill_basis(table, theta.cos(), 0, &mut row);
            for i in 0..=n {
                let pi = row[i][0] * wq;
                for j in i..=n {
                    gram[i * (n + 1) + j] += pi * row[j][0];
                }
            }
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        for j in i..=n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[i * (n + 1) + j] - target).abs());
        }
    }
    Ok(worst)
}

fn graded_breaks(n: usize) -> Vec<f64> {
    let interior = (n + 8).max(16);
    let h = PI / interior as f64;
    let mut breaks = Vec::new();
    // geometric refinement inside the first panel
    let levels = 40;
    breaks.push(0.0);
    for l in (1..levels).rev() {
        breaks.push(h * 0.25f64.powi(l));
    }
    for i in 1..interior {
        breaks.push(h * i as f64);
    }
    for l in 1..levels {
        breaks.push(PI - h * 0.25f64.powi(l));
    }
    breaks.push(PI);
    breaks
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn legendre() -> RecurrenceTable {
        jacobi_recurrence(0.0, 0.0, 60).unwrap()
    }

    fn chebyshev() -> RecurrenceTable {
        jacobi_recurrence(-0.5, -0.5, 60).unwrap()
    }

    #[test]
    fn legendre_coefficients() {
        let t = legendre();
        for k in 0..60 {
            assert_eq!(t.a(k), 0.0);
        }
        assert_relative_eq!(t.b(1), 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        for k in 1..=60 {
            let kf = k as f64;
            assert_relative_eq!(t.b(k), kf / (4.0 * kf * kf - 1.0).sqrt(), epsilon = 1e-15);
        }
        assert_relative_eq!(t.p0(), 1.0 / 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn chebyshev_coefficients() {
        let t = chebyshev();
        assert_relative_eq!(t.p0(), 1.0 / PI.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(t.b(1), 0.5f64.sqrt(), epsilon = 1e-15);
        for k in 2..=60 {
            assert_relative_eq!(t.b(k), 0.5, epsilon = 1e-15);
        }
        for k in 0..60 {
            assert!(t.a(k).abs() < 1e-16);
        }
    }

    #[test]
    fn jacobi_rejects_bad_parameters() {
        assert!(matches!(jacobi_recurrence(-1.0, 0.0, 5), Err(Error::Domain(_))));
        assert!(matches!(jacobi_recurrence(0.0, -1.5, 5), Err(Error::Domain(_))));
        assert!(matches!(jacobi_recurrence(0.0, 0.0, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn builtin_tables_are_bounded() {
        for (al, be) in [(0.0, 0.0), (-0.5, -0.5), (0.5, -0.3), (2.0, 1.0), (-0.9, 3.0)] {
            let t = jacobi_recurrence(al, be, 200).unwrap();
            for k in 0..200 {
                assert!(t.a(k).abs() < 1.0, "a_{k} for ({al},{be})");
                assert!(t.b(k + 1) < 1.0 && t.b(k + 1) > 0.0);
            }
        }
    }

    #[test]
    fn legendre_p2_at_one() {
        let v = eval_basis(&legendre(), 2, 1.0, 0).unwrap();
        assert_relative_eq!(v.get(2, 0), 2.5f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn chebyshev_cosine_identity() {
        let theta: f64 = 0.7;
        let v = eval_basis(&chebyshev(), 3, theta.cos(), 0).unwrap();
        assert_relative_eq!(v.get(3, 0), (2.0 / PI).sqrt() * (2.1f64).cos(), epsilon = 1e-14);
    }

    #[test]
    fn degree_zero_row() {
        let t = jacobi_recurrence(1.5, 0.25, 4).unwrap();
        let v = eval_basis(&t, 4, 0.37, 2).unwrap();
        assert_eq!(v.values[0], [t.p0(), 0.0, 0.0]);
    }

    #[test]
    fn eval_basis_capacity_and_deriv_errors() {
        let t = jacobi_recurrence(0.0, 0.0, 5).unwrap();
        assert!(matches!(
            eval_basis(&t, 6, 0.0, 0),
            Err(Error::Capacity { requested: 6, capacity: 5 })
        ));
        assert!(eval_basis(&t, 5, 0.0, 3).is_err());
    }

    #[test]
    fn chebyshev_leading_coefficient_ratio() {
        let t = chebyshev();
        for n in 2..40 {
            let r = t.leading_coefficient(n).unwrap() / t.leading_coefficient(n - 1).unwrap();
            assert_relative_eq!(r, 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn derivatives_match_central_differences() {
        let t = legendre();
        for &x in &[-0.7, 0.0, 0.4] {
            let v = eval_basis(&t, 50, x, 2).unwrap();
            for &h in &[1e-4, 1e-5] {
                let vp = eval_basis(&t, 50, x + h, 1).unwrap();
                let vm = eval_basis(&t, 50, x - h, 1).unwrap();
                for j in 0..=50 {
                    let fd1 = (vp.get(j, 0) - vm.get(j, 0)) / (2.0 * h);
                    let fd2 = (vp.get(j, 1) - vm.get(j, 1)) / (2.0 * h);
                    // third derivatives of p_50 reach ~1e7 on [-0.7, 0.4]
                    let scale = 1.0 + v.get(j, 1).abs() + v.get(j, 2).abs();
                    assert!((v.get(j, 1) - fd1).abs() <= 1e3 * h * h * scale + 1e-9 * scale);
                    assert!((v.get(j, 2) - fd2).abs() <= 1e5 * h * h * scale + 1e-8 * scale);
                }
            }
        }
    }

    #[test]
    fn divided_differences_on_diagonal_are_taylor_coefficients() {
        let t = legendre();
        let dd = divided_differences(&t, 20, 0.3, 0.3).unwrap();
        let v = eval_basis(&t, 20, 0.3, 2).unwrap();
        for j in 0..=20 {
            assert_relative_eq!(dd[j][0], v.get(j, 0), epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(dd[j][1], v.get(j, 1), epsilon = 1e-11, max_relative = 1e-12);
            assert_relative_eq!(dd[j][2], 0.5 * v.get(j, 2), epsilon = 1e-10, max_relative = 1e-12);
        }
    }

    #[test]
    fn divided_differences_match_quotients_off_diagonal() {
        let t = chebyshev();
        let (x, y) = (0.2, -0.45);
        let dd = divided_differences(&t, 30, x, y).unwrap();
        let vx = eval_basis(&t, 30, x, 1).unwrap();
        let vy = eval_basis(&t, 30, y, 1).unwrap();
        for j in 0..=30 {
            let xy = (vy.get(j, 0) - vx.get(j, 0)) / (y - x);
            let xxy = (xy - vx.get(j, 1)) / (y - x);
            let xyy = (vy.get(j, 1) - xy) / (y - x);
            let xxyy = (xyy - xxy) / (y - x);
            assert_relative_eq!(dd[j][1], xy, epsilon = 1e-10, max_relative = 1e-10);
            assert_relative_eq!(dd[j][2], xxy, epsilon = 1e-10, max_relative = 1e-10);
            assert_relative_eq!(dd[j][3], xxyy, epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    #[test]
    fn eval_series_matches_basis_sum() {
        let t = legendre();
        let coeffs: Vec<f64> = (0..=12).map(|j| (j as f64 * 0.37).sin()).collect();
        let v = eval_basis(&t, 12, -0.31, 0).unwrap();
        let direct: f64 = coeffs.iter().enumerate().map(|(j, c)| c * v.get(j, 0)).sum();
        assert_relative_eq!(eval_series(&t, &coeffs, -0.31).unwrap(), direct, epsilon = 1e-14);
    }

    #[test]
    fn orthonormality_of_builtin_families() {
        assert!(orthonormality_residual(&legendre(), 20).unwrap() < 1e-10);
        assert!(orthonormality_residual(&chebyshev(), 20).unwrap() < 1e-10);
        for (al, be) in [(0.5, 1.5), (-0.3, 0.7), (2.0, 0.0)] {
            let t = jacobi_recurrence(al, be, 20).unwrap();
            let r = orthonormality_residual(&t, 12).unwrap();
            assert!(r < 1e-9, "({al},{be}): {r}");
        }
    }

    #[test]
    fn degree_zero_normalization() {
        for (al, be) in [(0.0, 0.0), (-0.5, -0.5), (1.0, 2.0)] {
            let t = jacobi_recurrence(al, be, 3).unwrap();
            let mass = t.mass().unwrap();
            assert!((t.p0() * t.p0() * mass - 1.0).abs() < 1e-14);
            assert!(orthonormality_residual(&t, 0).unwrap() < 1e-12);
        }
    }

    #[test]
    fn custom_tables_have_no_residual() {
        let t = RecurrenceTable::new(EnsembleKind::Custom, vec![0.0], vec![0.5], 1.0).unwrap();
        assert!(matches!(orthonormality_residual(&t, 1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn parse_reports_line_numbers() {
        let text = "# legendre\np0 0.7071067811865476\n0 0 0.5773502691896258\n1 0 0\n";
        match parse_recurrence(text, Path::new("t.rec")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        match parse_recurrence("0 0 0.5\n", Path::new("t.rec")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        match parse_recurrence("# only comments\n", Path::new("t.rec")) {
            Err(Error::Parse { msg, .. }) => assert!(msg.contains("p0")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_recurrence("p0 1\n0 0 1,5\n", Path::new("t.rec")).is_err());
        assert!(parse_recurrence("p0 1\n1 0 0.5\n", Path::new("t.rec")).is_err());
    }
}

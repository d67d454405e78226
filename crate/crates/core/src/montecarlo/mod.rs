//! Sampling the Gaussian ensemble and counting its real zeros.
//!
//! Every sample draws its coefficients from its own ChaCha stream selected
//! by `(seed, sample_index)`, so any subset of samples can be regenerated
//! independently and reports do not depend on the number of workers.

pub mod sturm;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use ndarray::{Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{fill_basis, RecurrenceTable};
use crate::equilibrium::omega_mass;
use crate::error::{Error, Result};

pub use sturm::{monomial_from_orthonormal, sturm_count, STURM_DEGREE_CAP};

/// Width to which [`count_zeros_grid`] shrinks each sign-change bracket.
pub const BRACKET_WIDTH: f64 = 1e-13;

/// Samples per matrix product in [`simulate`].
const BATCH: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Grid points per local zero spacing 1/(n omega) (times pi).
    pub grid_per_wavelength: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            grid_per_wavelength: 8,
        }
    }
}

/// Limits on the work [`simulate`] may do.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceCap {
    /// Cap on samples * grid points * (n + 1) multiply-adds.
    pub max_flops: f64,
}

impl Default for ResourceCap {
    fn default() -> Self {
        ResourceCap { max_flops: 1e13 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub ensemble: String,
    pub n: usize,
    pub a: f64,
    pub b: f64,
    /// Requested number of samples.
    pub samples: usize,
    /// Samples actually simulated; smaller than `samples` only when partial.
    pub completed: usize,
    pub seed: u64,
    pub mean: f64,
    pub mean_stderr: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub variance_stderr: f64,
    /// Zero count -> number of samples with that count.
    pub histogram: BTreeMap<usize, u64>,
    pub grid: GridConfig,
    pub grid_points: usize,
    pub partial: bool,
}

/// The n + 1 coefficients of sample `sample_index`.
pub fn sample_coefficients(seed: u64, sample_index: u64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    fill_coefficients(seed, sample_index, &mut out);
    out
}

fn fill_coefficients(seed: u64, sample_index: u64, out: &mut [f64]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample_index);
    for c in out.iter_mut() {
        *c = rng.sample(StandardNormal);
    }
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(-1.0 <= a && a < b && b <= 1.0) {
        return Err(Error::domain(format!(
            "interval must satisfy -1 <= a < b <= 1, got ({a}, {b})"
        )));
    }
    Ok(())
}

/// x-coordinates of the counting grid: uniform in theta with x = cos theta,
/// ordered from b down to a.
pub fn grid_points(n: usize, a: f64, b: f64, grid: GridConfig) -> Result<Vec<f64>> {
    check_interval(a, b)?;
    if grid.grid_per_wavelength == 0 {
        return Err(Error::domain("grid_per_wavelength must be positive"));
    }
    let count = (grid.grid_per_wavelength as f64 * n as f64 * omega_mass(a, b)? * PI).ceil() as usize + 2;
    let (t0, t1) = (b.acos(), a.acos());
    let mut xs: Vec<f64> = (0..count)
        .map(|i| (t0 + (t1 - t0) * i as f64 / (count - 1) as f64).cos())
        .collect();
    // pin the endpoints against rounding in cos(acos(.))
    xs[0] = b;
    xs[count - 1] = a;
    Ok(xs)
}

fn nudge_zero(v: f64) -> f64 {
    if v == 0.0 {
        log::warn!("grid value exactly zero; perturbing by one ulp");
        f64::from_bits(1)
    } else {
        v
    }
}

fn sign_changes(values: impl Iterator<Item = f64>) -> Vec<usize> {
    let mut out = Vec::new();
    let mut prev: Option<f64> = None;
    for (i, v) in values.enumerate() {
        let v = nudge_zero(v);
        if let Some(p) = prev {
            if (p < 0.0) != (v < 0.0) {
                out.push(i - 1);
            }
        }
        prev = Some(v);
    }
    out
}

/// G and G' for G = sum_j coeffs[j] p_j.
fn eval_with_derivative(table: &RecurrenceTable, coeffs: &[f64], x: f64) -> (f64, f64) {
    let (mut p_prev, mut d_prev) = (0.0, 0.0);
    let (mut p, mut d) = (table.p0(), 0.0);
    let (mut g, mut dg) = (coeffs[0] * p, 0.0);
    for k in 0..coeffs.len() - 1 {
        let bk = if k == 0 { 0.0 } else { table.b(k) };
        let t = x - table.a(k);
        let inv = 1.0 / table.b(k + 1);
        let p_next = (t * p - bk * p_prev) * inv;
        let d_next = (t * d + p - bk * d_prev) * inv;
        (p_prev, d_prev, p, d) = (p, d, p_next, d_next);
        g += coeffs[k + 1] * p;
        dg += coeffs[k + 1] * d;
    }
    (g, dg)
}

/// Shrinks [lo, hi] around a sign change of `f` to width [`BRACKET_WIDTH`]; returns the final bracket, or None when the
/// sign change does not survive re-evaluation.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<(f64, f64)> {
    let (f_lo, f_hi) = (nudge_zero(f(lo)), nudge_zero(f(hi)));
    if (f_lo < 0.0) == (f_hi < 0.0) {
        return None;
    }
    let neg_lo = f_lo < 0.0;
    while hi - lo > BRACKET_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return Some((mid, mid));
        }
        if (v < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo, hi))
}

/// Number of distinct zeros of sum_j coeffs[j] p_j in [a, b].
///
/// Sign changes on the theta-uniform grid are confirmed by bisection down
/// to [`BRACKET_WIDTH`]. Cells without a sign change but with a sign change
/// of G' are searched for a close pair of zeros: the extremum is located to
/// the same width and counts two zeros when G changes sign there. Pairs
/// closer than the bracket width are not resolved.
pub fn count_zeros_grid(
    table: &RecurrenceTable,
    n: usize,
    coeffs: &[f64],
    a: f64,
    b: f64,
    grid: GridConfig,
) -> Result<usize> {
    if coeffs.len() != n + 1 {
        return Err(Error::domain(format!(
            "expected {} coefficients, got {}",
            n + 1,
            coeffs.len()
        )));
    }
    table.check_degree(n)?;
    let xs = grid_points(n, a, b, grid)?;
    let vals: Vec<(f64, f64)> = xs
        .iter()
        .map(|&x| eval_with_derivative(table, coeffs, x))
        .collect();
    let g = |x: f64| eval_with_derivative(table, coeffs, x).0;
    let dg = |x: f64| eval_with_derivative(table, coeffs, x).1;
    let mut count = 0;
    for i in 0..xs.len() - 1 {
        let (lo, hi) = (xs[i + 1], xs[i]);
        let (g_lo, g_hi) = (nudge_zero(vals[i + 1].0), nudge_zero(vals[i].0));
        if (g_lo < 0.0) != (g_hi < 0.0) {
            if bisect(g, lo, hi).is_some() {
                count += 1;
            }
            continue;
        }
        let (d_lo, d_hi) = (vals[i + 1].1, vals[i].1);
        if (d_lo < 0.0) == (d_hi < 0.0) {
            continue;
        }
        // G turns around inside the cell; look for a dip through zero
        let turns_back = if g_lo > 0.0 { d_lo < 0.0 } else { d_lo > 0.0 };
        if !turns_back {
            continue;
        }
        if let Some((l, h)) = bisect(dg, lo, hi) {
            let x_star = 0.5 * (l + h);
            let v = g(x_star);
            if v != 0.0 && (v < 0.0) != (g_lo < 0.0) {
                count += 2;
            }
        }
    }
    Ok(count)
}

/// Basis matrix with rows p_j evaluated on the grid, shape (n + 1, points).
fn basis_matrix(table: &RecurrenceTable, n: usize, xs: &[f64]) -> Array2<f64> {
    let mut m = Array2::zeros((n + 1, xs.len()));
    let mut rows = vec![[0.0; 3]; n + 1];
    for (g, &x) in xs.iter().enumerate() {
        fill_basis(table, x, 0, &mut rows);
        for (j, r) in rows.iter().enumerate() {
            m[[j, g]] = r[0];
        }
    }
    m
}

fn count_batch(basis: ArrayView2<f64>, seed: u64, first: usize, len: usize) -> Vec<usize> {
    let n1 = basis.nrows();
    let mut coeffs = Array2::<f64>::zeros((len, n1));
    for (k, mut row) in coeffs.axis_iter_mut(Axis(0)).enumerate() {
        fill_coefficients(seed, (first + k) as u64, row.as_slice_mut().expect("contiguous row"));
    }
    let values = coeffs.dot(&basis);
    values
        .axis_iter(Axis(0))
        .map(|row| sign_changes(row.iter().copied()).len())
        .collect()
}

/// Monte Carlo estimate of the law of N_n([a, b]).
#[allow(clippy::too_many_arguments)]
pub fn simulate(
    table: &RecurrenceTable,
    n: usize,
    a: f64,
    b: f64,
    samples: usize,
    seed: u64,
    grid: GridConfig,
    cap: ResourceCap,
) -> Result<SimulationReport> {
    if samples < 2 {
        return Err(Error::domain("simulate needs at least 2 samples"));
    }
    table.check_degree(n)?;
    let xs = grid_points(n, a, b, grid)?;
    let per_sample = (xs.len() * (n + 1)) as f64;
    let affordable = (cap.max_flops / per_sample).floor();
    let completed = if affordable >= samples as f64 {
        samples
    } else {
        affordable as usize
    };
    if completed < 2 {
        return Err(Error::Budget(format!(
            "resource cap of {:.3e} flops allows fewer than 2 samples",
            cap.max_flops
        )));
    }
    let partial = completed < samples;
    if partial {
        log::warn!("resource cap reached: simulating {completed} of {samples} samples");
    }

    let basis = basis_matrix(table, n, &xs);
    let batches: Vec<(usize, usize)> = (0..completed)
        .step_by(BATCH)
        .map(|s| (s, BATCH.min(completed - s)))
        .collect();
    let counts: Vec<Vec<usize>> = batches
        .par_iter()
        .map(|&(first, len)| count_batch(basis.view(), seed, first, len))
        .collect();

    let mut histogram = BTreeMap::new();
    for c in counts.iter().flatten() {
        *histogram.entry(*c).or_insert(0u64) += 1;
    }
    let stats = histogram_stats(&histogram);
    Ok(SimulationReport {
        ensemble: table.label(),
        n,
        a,
        b,
        samples,
        completed,
        seed,
        mean: stats.mean,
        mean_stderr: stats.mean_stderr,
        variance: stats.variance,
        variance_stderr: stats.variance_stderr,
        histogram,
        grid,
        grid_points: xs.len(),
        partial,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramStats {
    pub mean: f64,
    pub mean_stderr: f64,
    pub variance: f64,
    pub variance_stderr: f64,
}

/// Mean, unbiased variance and their standard errors from a count
/// histogram. The variance standard error uses the fourth central moment,
/// sqrt((m4 - (N - 3)/(N - 1) s^4) / N).
pub fn histogram_stats(histogram: &BTreeMap<usize, u64>) -> HistogramStats {
    let total: u64 = histogram.values().sum();
    let nn = total as f64;
    let mean = histogram
        .iter()
        .map(|(&k, &c)| k as f64 * c as f64)
        .sum::<f64>()
        / nn;
    let (mut m2, mut m4) = (0.0, 0.0);
    for (&k, &c) in histogram {
        let d = k as f64 - mean;
        m2 += c as f64 * d * d;
        m4 += c as f64 * d * d * d * d;
    }
    let variance = m2 / (nn - 1.0);
    let m4 = m4 / nn;
    let var_of_var = (m4 - (nn - 3.0) / (nn - 1.0) * variance * variance) / nn;
    HistogramStats {
        mean,
        mean_stderr: (variance / nn).sqrt(),
        variance,
        variance_stderr: var_of_var.max(0.0).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::jacobi_recurrence;

    #[test]
    fn coefficients_are_reproducible_and_distinct() {
        let a = sample_coefficients(7, 3, 10);
        assert_eq!(a, sample_coefficients(7, 3, 10));
        assert_ne!(a, sample_coefficients(7, 4, 10));
        assert_ne!(a, sample_coefficients(8, 3, 10));
        assert_eq!(a.len(), 11);
        // prefixes agree, so degree does not change the draws
        assert_eq!(&sample_coefficients(7, 3, 20)[..11], &a[..]);
    }

    #[test]
    fn first_coefficient_moments() {
        let draws: Vec<f64> = (0..100_000).map(|i| sample_coefficients(1, i, 0)[0]).collect();
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 4.0 / n.sqrt());
        assert!((var - 1.0).abs() < 0.02);
    }

    #[test]
    fn streams_are_uncorrelated() {
        let n = 100_000usize;
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for i in 0..n as u64 {
            let x = sample_coefficients(11, 2 * i, 0)[0];
            let y = sample_coefficients(11, 2 * i + 1, 0)[0];
            sxy += x * y;
            sxx += x * x;
            syy += y * y;
        }
        let corr = sxy / (sxx * syy).sqrt();
        assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "{corr}");
    }

    #[test]
    fn grid_spans_interval() {
        let xs = grid_points(10, -0.5, 0.5, GridConfig::default()).unwrap();
        assert_eq!(xs.len(), (8.0 * 10.0 / 3.0 * PI).ceil() as usize + 2);
        assert_eq!((xs[0], *xs.last().unwrap()), (0.5, -0.5));
        assert!(xs.windows(2).all(|w| w[1] < w[0]));
        assert!(grid_points(10, 0.5, -0.5, GridConfig::default()).is_err());
    }

    #[test]
    fn simple_counts() {
        let t = jacobi_recurrence(0.0, 0.0, 10).unwrap();
        let g = GridConfig::default();
        let mut e0 = vec![0.0; 6];
        e0[0] = 1.0;
        assert_eq!(count_zeros_grid(&t, 5, &e0, -0.5, 0.5, g).unwrap(), 0);
        assert_eq!(count_zeros_grid(&t, 1, &[0.0, 1.0], -0.5, 0.5, g).unwrap(), 1);
        // p_5 has its five zeros at +-0.9062, +-0.5385, 0
        let mut e5 = vec![0.0; 6];
        e5[5] = 1.0;
        assert_eq!(count_zeros_grid(&t, 5, &e5, -1.0, 1.0, g).unwrap(), 5);
        assert_eq!(count_zeros_grid(&t, 5, &e5, -0.5, 0.5, g).unwrap(), 1);
        assert!(count_zeros_grid(&t, 5, &e5[..3], -0.5, 0.5, g).is_err());
    }

    #[test]
    fn histogram_statistics() {
        let h: BTreeMap<usize, u64> = [(0, 2), (1, 2)].into_iter().collect();
        let s = histogram_stats(&h);
        assert_eq!(s.mean, 0.5);
        assert!((s.variance - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn simulate_is_deterministic_and_consistent() {
        let t = jacobi_recurrence(0.0, 0.0, 30).unwrap();
        let run = || {
            simulate(&t, 20, -0.5, 0.5, 1000, 5, GridConfig::default(), ResourceCap::default()).unwrap()
        };
        let r = run();
        assert_eq!(r, run());
        assert_eq!(r.histogram.values().sum::<u64>(), 1000);
        assert!(r.histogram.keys().all(|&k| k <= 20));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        assert_eq!(pool.install(run), r);
        // matches the per-sample counter
        for i in 0..50u64 {
            let c = sample_coefficients(5, i, 20);
            let direct = count_zeros_grid(&t, 20, &c, -0.5, 0.5, GridConfig::default()).unwrap();
            let batch = count_batch(basis_matrix(&t, 20, &grid_points(20, -0.5, 0.5, GridConfig::default()).unwrap()).view(), 5, i as usize, 1);
            assert_eq!(direct, batch[0]);
        }
    }

    #[test]
    fn resource_cap_gives_partial_report() {
        let t = jacobi_recurrence(0.0, 0.0, 30).unwrap();
        let cap = ResourceCap { max_flops: 100.0 * 21.0 * 170.0 };
        let r = simulate(&t, 20, -0.5, 0.5, 1000, 5, GridConfig::default(), cap).unwrap();
        assert!(r.partial && r.completed < 1000);
        let tiny = ResourceCap { max_flops: 10.0 };
        assert!(matches!(
            simulate(&t, 20, -0.5, 0.5, 1000, 5, GridConfig::default(), tiny),
            Err(Error::Budget(_))
        ));
    }
}

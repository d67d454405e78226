//! Panel quadrature: Gauss-Legendre rules, Gauss-Kronrod (7, 15) panels,
//! and an adaptive bisection driver seeded with caller-supplied breakpoints.
//!
//! Panel sums go through [`pairwise_sum`] in panel order, so for a fixed
//! panel set the result does not depend on how panels were scheduled.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

/// Kronrod abscissae on [0, 1]; odd indices are the embedded Gauss-7 nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

impl QuadResult {
    fn combine(parts: &[(f64, f64)], evals: usize, converged: bool) -> Self {
        let values: Vec<f64> = parts.iter().map(|p| p.0).collect();
        let errors: Vec<f64> = parts.iter().map(|p| p.1).collect();
        QuadResult {
            value: pairwise_sum(&values),
            error: pairwise_sum(&errors),
            evals,
            converged,
        }
    }
}

/// Sums by recursive halving. Deterministic for a given slice order and with
/// O(log n) error growth.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Gauss-Kronrod 15-point rule on [a, b]. Returns (K15 value, |K15 - G7|).
///
/// The rule is open: `f` is never evaluated at `a` or `b`.
pub fn gk15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Sum of GK15 panels over consecutive breakpoints, no refinement.
pub fn integrate_panels<F: Fn(f64) -> f64 + ?Sized>(f: &F, breaks: &[f64]) -> QuadResult {
    let parts: Vec<(f64, f64)> = breaks.windows(2).map(|w| gk15(f, w[0], w[1])).collect();
    QuadResult::combine(&parts, 15 * parts.len(), true)
}

/// Parallel version of [`integrate_panels`]; bit-identical to the serial one.
pub fn integrate_panels_par<F: Fn(f64) -> f64 + Sync>(f: &F, breaks: &[f64]) -> QuadResult {
    let parts: Vec<(f64, f64)> = breaks
        .par_windows(2)
        .map(|w| gk15(f, w[0], w[1]))
        .collect();
    QuadResult::combine(&parts, 15 * parts.len(), true)
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_evals: 2_000_000,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive GK15 quadrature starting from the panels given by `breaks`.
/// The worst panel is bisected until the summed error estimate meets
/// `max(abs_tol, rel_tol * |value|)` or the evaluation budget runs out,
/// in which case `converged` is false.
pub fn integrate_adaptive<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    breaks: &[f64],
    opts: AdaptiveOptions,
) -> QuadResult {
    let mut heap: BinaryHeap<Panel> = breaks
        .windows(2)
        .map(|w| {
            let (value, error) = gk15(f, w[0], w[1]);
            Panel {
                a: w[0],
                b: w[1],
                value,
                error,
            }
        })
        .collect();
    let mut evals = 15 * heap.len();
    let converged = loop {
        let (value, error) = totals(&heap);
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            break true;
        }
        if evals + 30 > opts.max_evals {
            break false;
        }
        let Some(worst) = heap.pop() else {
            break true;
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel can no longer be split in floating point
            heap.push(worst);
            break false;
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(f, a, b);
            heap.push(Panel { a, b, value, error });
        }
        evals += 30;
    };
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let parts: Vec<(f64, f64)> = panels.iter().map(|p| (p.value, p.error)).collect();
    QuadResult::combine(&parts, evals, converged)
}

fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    heap.iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}

/// Breakpoints splitting [a, b] into `n` equal panels.
pub fn uniform_breaks(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    let mut breaks: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
    breaks.push(b);
    breaks
}

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Nodes by Newton iteration on the Legendre recurrence.
    pub fn legendre(order: usize) -> Self {
        assert!(order >= 1, "Gauss rule needs at least one node");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut z =
                (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    /// Applies the rule on [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + h * x);
        }
        acc * h
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

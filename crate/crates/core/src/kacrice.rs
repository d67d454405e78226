//! Exact finite-n moments of the zero count N_n([a, b]) through the Kac-Rice
//! integrals, and the asymptotic variance prediction.
//!
//! Var N = double integral of (rho2 - rho1 rho1) + integral of rho1. For each
//! outer point x the inner integral over y is split at |y - x| = lambda /
//! (n omega(x)): the central piece is integrated in the scaled variable
//! u = n omega(x) (y - x), the tail piece in phi with y = cos phi. Both are
//! oscillatory on the scale 1/(n omega), so panels are sized in those units.
//! The outer integral runs in theta with x = cos theta.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::RecurrenceTable;
use crate::equilibrium::{omega_density, omega_mass};
use crate::error::{Error, Result};
use crate::intensity::{rho1, DefectEvaluator};
use crate::quad::{integrate_adaptive, pairwise_sum, AdaptiveOptions, QuadResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceQuadratureConfig {
    /// Central/tail split, in units of 1/(n omega(x)).
    pub lambda: f64,
    /// Half-width in u of the innermost central panels around the diagonal.
    pub eta: f64,
    /// Relative accuracy target for the variance.
    pub panel_target: f64,
    /// Cap on integrand evaluations; exceeding it yields a partial result.
    pub max_evals: usize,
}

impl Default for VarianceQuadratureConfig {
    fn default() -> Self {
        VarianceQuadratureConfig {
            lambda: 30.0,
            eta: 0.05,
            panel_target: 1e-3,
            max_evals: 200_000_000,
        }
    }
}

impl VarianceQuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.lambda.is_finite() && self.eta < self.lambda) {
            return Err(Error::domain(format!(
                "need 0 < eta < lambda, got eta = {}, lambda = {}",
                self.eta, self.lambda
            )));
        }
        if !(self.panel_target > 0.0 && self.panel_target < 1.0) {
            return Err(Error::domain("panel_target must lie in (0, 1)"));
        }
        if self.max_evals == 0 {
            return Err(Error::domain("max_evals must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceResult {
    pub variance: f64,
    pub expectation: f64,
    /// Double integral over |y - x| < lambda / (n omega(x)).
    pub central_part: f64,
    /// Double integral over the rest of the square.
    pub tail_part: f64,
    /// The single integral of rho1, equal to `expectation`.
    pub diagonal_part: f64,
    /// Estimated absolute quadrature error of `variance`.
    pub error: f64,
    pub evals: usize,
    /// Set when the evaluation budget ran out before the targets were met.
    pub partial: bool,
}

/// Width in u of the central panels and in n*phi/pi of the tail panels.
const PANEL_WIDTH: f64 = 0.5;

fn check_interior(a: f64, b: f64) -> Result<()> {
    if !(-1.0 < a && a <= b && b < 1.0) {
        return Err(Error::domain(format!(
            "interval must satisfy -1 < a <= b < 1, got ({a}, {b})"
        )));
    }
    Ok(())
}

/// theta-breaks for x = cos theta over [a, b], at most `step` apart.
fn theta_breaks(a: f64, b: f64, step: f64) -> Vec<f64> {
    let (t0, t1) = (b.acos(), a.acos());
    let panels = ((t1 - t0) / step).ceil().max(1.0) as usize;
    (0..=panels)
        .map(|i| t0 + (t1 - t0) * i as f64 / panels as f64)
        .collect()
}

/// E[N_n([a, b])] = integral of rho1 over [a, b], to relative accuracy `tol`.
pub fn expected_zeros(table: &RecurrenceTable, n: usize, a: f64, b: f64, tol: f64) -> Result<f64> {
    check_interior(a, b)?;
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    if a == b || n == 0 {
        return Ok(0.0);
    }
    table.check_degree(n)?;
    Ok(expectation_quad(table, n, a, b, tol)?.value)
}

fn expectation_quad(table: &RecurrenceTable, n: usize, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    let failure = RefCell::new(None::<Error>);
    let f = |t: f64| match rho1(table, n, t.cos()) {
        Ok(r) => r * t.sin(),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let breaks = theta_breaks(a, b, PI / n.max(1) as f64);
    let r = integrate_adaptive(
        &f,
        &breaks,
        AdaptiveOptions {
            abs_tol: 0.0,
            rel_tol: tol,
            max_evals: 10_000_000,
        },
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

struct Budget {
    used: AtomicUsize,
    cap: usize,
    exhausted: AtomicBool,
}

impl Budget {
    fn charge(&self, k: usize) -> bool {
        let used = self.used.fetch_add(k, Ordering::Relaxed) + k;
        if used > self.cap {
            self.exhausted.store(true, Ordering::Relaxed);
            false
        } else {
            true
        }
    }
}

/// Inner integrals at a fixed outer point x, split into (central, tail).
struct Inner<'a> {
    eval: DefectEvaluator<'a>,
    x: f64,
    scale: f64,
}

impl<'a> Inner<'a> {
    fn defect(&mut self, y: f64) -> Result<f64> {
        if y == self.x {
            // rho2 vanishes on the diagonal
            let r = self.eval.rho1_x();
            return Ok(-r * r);
        }
        self.eval.defect(y)
    }
}

#[derive(Clone, Copy, Default)]
struct InnerValue {
    central: f64,
    tail: f64,
    error: f64,
    evals: usize,
    converged: bool,
}

fn inner_integrals(
    table: &RecurrenceTable,
    n: usize,
    x: f64,
    a: f64,
    b: f64,
    cfg: &VarianceQuadratureConfig,
) -> Result<InnerValue> {
    let scale = n as f64 * omega_density(x)?;
    let inner = RefCell::new(Inner {
        eval: DefectEvaluator::new(table, n, x)?,
        x,
        scale,
    });
    let failure = RefCell::new(None::<Error>);
    let rho1_x = inner.borrow().eval.rho1_x();
    // the inner integral is of order rho1(x); aim well below the target
    let abs_tol = 1e-2 * cfg.panel_target * rho1_x.max(1e-300);
    let opts = |max_evals| AdaptiveOptions {
        abs_tol,
        rel_tol: 0.0,
        max_evals,
    };
    let record = |r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };

    // central piece in u
    let u_lo = (scale * (a - x)).max(-cfg.lambda);
    let u_hi = (scale * (b - x)).min(cfg.lambda);
    let mut breaks = central_breaks(u_lo, u_hi, cfg.eta);
    let central_fn = |u: f64| {
        let mut inn = inner.borrow_mut();
        let y = inn.x + u / inn.scale;
        let s = inn.scale;
        record(inn.defect(y)) / s
    };
    let central = if breaks.len() >= 2 {
        integrate_adaptive(&central_fn, &breaks, opts(2_000_000))
    } else {
        QuadResult {
            value: 0.0,
            error: 0.0,
            evals: 0,
            converged: true,
        }
    };

    // tail pieces in phi, y = cos phi
    let step = PI * PANEL_WIDTH / n as f64;
    let tail_fn = |phi: f64| {
        let mut inn = inner.borrow_mut();
        record(inn.defect(phi.cos())) * phi.sin()
    };
    let mut tail = QuadResult {
        value: 0.0,
        error: 0.0,
        evals: 0,
        converged: true,
    };
    let near = cfg.lambda / scale;
    for (lo, hi) in [(a, (x - near).min(b)), ((x + near).max(a), b)] {
        if hi > lo {
            breaks = theta_breaks(lo, hi, step);
            let r = integrate_adaptive(&tail_fn, &breaks, opts(2_000_000));
            tail.value += r.value;
            tail.error += r.error;
            tail.evals += r.evals;
            tail.converged &= r.converged;
        }
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(InnerValue {
        central: central.value,
        tail: tail.value,
        error: central.error + tail.error,
        evals: central.evals + tail.evals,
        converged: central.converged && tail.converged,
    })
}

/// Panel breaks on [lo, hi] in u: a split at 0, fine panels on |u| < eta,
/// then panels of width at most PANEL_WIDTH.
fn central_breaks(lo: f64, hi: f64, eta: f64) -> Vec<f64> {
    if !(hi > lo) {
        return Vec::new();
    }
    let mut marks = vec![lo, hi];
    for m in [-eta, 0.0, eta] {
        if m > lo && m < hi {
            marks.push(m);
        }
    }
    marks.sort_by(f64::total_cmp);
    let mut out = vec![lo];
    for w in marks.windows(2) {
        let k = ((w[1] - w[0]) / PANEL_WIDTH).ceil().max(1.0) as usize;
        for i in 1..=k {
            out.push(if i == k { w[1] } else { w[0] + (w[1] - w[0]) * i as f64 / k as f64 });
        }
    }
    out
}

/// Var N_n([a, b]) by the Kac-Rice formula.
pub fn variance(
    table: &RecurrenceTable,
    n: usize,
    a: f64,
    b: f64,
    cfg: &VarianceQuadratureConfig,
) -> Result<VarianceResult> {
    cfg.validate()?;
    if !(-1.0 < a && a < b && b < 1.0) {
        return Err(Error::domain(format!(
            "interval must satisfy -1 < a < b < 1, got ({a}, {b})"
        )));
    }
    if n == 0 {
        return Err(Error::domain("variance needs degree n >= 1"));
    }
    table.check_degree(n)?;

    let expectation = expectation_quad(table, n, a, b, 1e-3 * cfg.panel_target)?;
    let budget = Budget {
        used: AtomicUsize::new(expectation.evals),
        cap: cfg.max_evals,
        exhausted: AtomicBool::new(false),
    };

    // outer panels are integrated independently so the result does not
    // depend on how rayon schedules them
    let outer = theta_breaks(a, b, PI / n as f64);
    let per_panel_tol = 1e-2 * cfg.panel_target * expectation.value.abs().max(1e-12)
        / (outer.len() - 1) as f64;
    let panels: Vec<Result<[f64; 5]>> = outer
        .par_windows(2)
        .map(|w| outer_panel(table, n, a, b, cfg, w[0], w[1], per_panel_tol, &budget))
        .collect();
    let panels: Vec<[f64; 5]> = panels.into_iter().collect::<Result<_>>()?;
    let column = |i: usize| pairwise_sum(&panels.iter().map(|p| p[i]).collect::<Vec<_>>());
    let central_part = column(0);
    let tail_part = column(1);
    let outer_error = column(2);
    let inner_error = column(3);
    let inner_converged = panels.iter().all(|p| p[4] > 0.0);

    let partial = budget.exhausted.load(Ordering::Relaxed) || !inner_converged;
    let variance = central_part + tail_part + expectation.value;
    let error = outer_error + inner_error + expectation.error;
    if partial {
        log::warn!("variance quadrature stopped on its evaluation budget; result is partial");
    }
    Ok(VarianceResult {
        variance,
        expectation: expectation.value,
        central_part,
        tail_part,
        diagonal_part: expectation.value,
        error,
        evals: budget.used.load(Ordering::Relaxed),
        partial,
    })
}

/// One outer theta-panel: returns [central, tail, outer error, inner error
/// bound, converged flag].
#[allow(clippy::too_many_arguments)]
fn outer_panel(
    table: &RecurrenceTable,
    n: usize,
    a: f64,
    b: f64,
    cfg: &VarianceQuadratureConfig,
    t0: f64,
    t1: f64,
    tol: f64,
    budget: &Budget,
) -> Result<[f64; 5]> {
    let failure = RefCell::new(None::<Error>);
    let inner_err = RefCell::new(0.0f64);
    let converged = RefCell::new(true);
    // both outer passes start from the same nodes, so share inner results
    let cache = RefCell::new(HashMap::<u64, InnerValue>::new());
    let eval_inner = |t: f64| -> InnerValue {
        if let Some(v) = cache.borrow().get(&t.to_bits()) {
            return *v;
        }
        if budget.exhausted.load(Ordering::Relaxed) {
            return InnerValue::default();
        }
        match inner_integrals(table, n, t.cos(), a, b, cfg) {
            Ok(v) => {
                cache.borrow_mut().insert(t.to_bits(), v);
                if !budget.charge(v.evals) {
                    *converged.borrow_mut() = false;
                }
                let mut e = inner_err.borrow_mut();
                *e = e.max(v.error);
                *converged.borrow_mut() &= v.converged;
                v
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                InnerValue::default()
            }
        }
    };
    let opts = AdaptiveOptions {
        abs_tol: tol,
        rel_tol: 0.0,
        max_evals: 15 * 64,
    };
    // central and tail are integrated as separate outer integrals
    let central = integrate_adaptive(&|t: f64| eval_inner(t).central * t.sin(), &[t0, t1], opts);
    let tail = integrate_adaptive(&|t: f64| eval_inner(t).tail * t.sin(), &[t0, t1], opts);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let inner_bound = inner_err.into_inner() * (t0.cos() - t1.cos()).abs();
    let ok = converged.into_inner() && central.converged && tail.converged;
    Ok([
        central.value,
        tail.value,
        central.error + tail.error,
        inner_bound,
        if ok { 1.0 } else { 0.0 },
    ])
}

/// c * omega([a, b]); the prediction for Var N_n([a, b]) is n times this.
pub fn asymptotic_variance(a: f64, b: f64, c: f64) -> Result<f64> {
    Ok(c * omega_mass(a, b)?)
}

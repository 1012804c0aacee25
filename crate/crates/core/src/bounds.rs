//! Probabilistic backlog and delay bounds from the arrival envelope and the
//! service MGF bound.
//!
//! With `p_a = exp(theta rho)` and `q = q(theta)`, the kernel summed over all
//! start slots is bounded by the geometric series
//!
//! ```text
//! M(theta, s, t) <= exp(theta burst) p_a^max(t-s,0) q^max(s-t,0) / (1 - p_a q),
//! ```
//!
//! valid whenever `p_a q < 1`. The backlog bound is
//! `inf_theta (ln M(theta, t, t) - ln eps) / theta
//!   = inf_theta burst - (ln(1 - p_a q) + ln eps) / theta` and the delay bound is
//! the smallest integer `w` with `inf_theta exp(theta burst) q^w / (1 - p_a q) <= eps`.
//! Both are time-invariant.

use crate::arrival::AffineEnvelope;
use crate::error::{domain, Error, Result};
use crate::par::Execution;
use crate::service::{canonical_theta, LogBound, ServiceCharacterization};

/// Scan range for the stability region, in 1/bits.
pub const THETA_SCAN_MIN: f64 = 1e-14;
pub const THETA_SCAN_MAX: f64 = 1e-4;
const SCAN_POINTS_PER_DECADE: usize = 5;
const BISECT_REL_WIDTH: f64 = 1e-6;
const GRID_POINTS: usize = 200;
const GRID_MARGIN: f64 = 1e-3;
const GOLDEN_REL_TOL: f64 = 1e-6;
const MAX_DELAY_SLOTS: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Backlog,
    Delay,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundQuery {
    pub epsilon: f64,
    pub kind: BoundKind,
}

impl BoundQuery {
    pub fn new(kind: BoundKind, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(domain("epsilon", epsilon));
        }
        Ok(Self { epsilon, kind })
    }

    pub fn backlog(epsilon: f64) -> Result<Self> {
        Self::new(BoundKind::Backlog, epsilon)
    }

    pub fn delay(epsilon: f64) -> Result<Self> {
        Self::new(BoundKind::Delay, epsilon)
    }
}

/// The part of the scan range where `p_a(theta) q(theta) < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityInterval {
    pub lower: f64,
    pub upper: f64,
    /// The condition still held at the top of the scan range.
    pub reaches_scan_max: bool,
}

impl StabilityInterval {
    pub fn empty() -> Self {
        Self {
            lower: f64::NAN,
            upper: f64::NAN,
            reaches_scan_max: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.lower < self.upper)
    }

    pub fn contains(&self, theta: f64) -> bool {
        theta >= self.lower && theta <= self.upper
    }
}

/// One point of the optimization trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSample {
    pub theta: f64,
    /// Backlog bound in bits, or the log kernel for delay queries.
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub kind: BoundKind,
    pub epsilon: f64,
    /// Bits for backlog, slots for delay.
    pub value: f64,
    pub optimal_theta: f64,
    pub kernel_at_optimum: f64,
    pub stability: StabilityInterval,
    /// Objective on the search grid (for delay: at the returned `w`).
    /// When the infimum is only approached as `theta` grows without bound,
    /// `optimal_theta` is the top of the scan range and `value` is the limit.
    pub trace: Vec<ThetaSample>,
}

/// `ln(p_a q)` at `theta`.
fn log_load(env: &AffineEnvelope, svc: &ServiceCharacterization, theta: f64) -> Result<f64> {
    let theta = canonical_theta(theta);
    Ok(env.ln_rate_factor(theta) + svc.ln_q(theta)?)
}

/// `ln(1 - exp(f))` for `f < 0`.
fn ln_one_minus_exp(f: f64) -> f64 {
    if f > -std::f64::consts::LN_2 {
        (-f.exp_m1()).ln()
    } else {
        (-f.exp()).ln_1p()
    }
}

/// Closed-form bound on the kernel `M(theta, s, t)`.
pub fn kernel_bound(
    env: &AffineEnvelope,
    svc: &ServiceCharacterization,
    theta: f64,
    s: u64,
    t: u64,
) -> Result<LogBound> {
    let theta = canonical_theta(theta);
    let ln_q = svc.ln_q(theta)?;
    let f = env.ln_rate_factor(theta) + ln_q;
    if !(f < 0.0) {
        return Err(Error::StabilityViolation { theta, log_load: f });
    }
    let ahead = t.saturating_sub(s) as f64;
    let behind = s.saturating_sub(t) as f64;
    let mut ln = theta * env.burst_bits() - ln_one_minus_exp(f);
    if ahead > 0.0 {
        ln += ahead * env.ln_rate_factor(theta);
    }
    if behind > 0.0 {
        ln += behind * ln_q;
    }
    Ok(LogBound(ln))
}

/// Locates `{theta : p_a(theta) q(theta) < 1}` inside the scan range.
pub fn stability_region(
    env: &AffineEnvelope,
    svc: &ServiceCharacterization,
) -> Result<StabilityInterval> {
    stability_region_with(env, svc, Execution::default())
}

pub fn stability_region_with(
    env: &AffineEnvelope,
    svc: &ServiceCharacterization,
    exec: Execution,
) -> Result<StabilityInterval> {
    let decades = (THETA_SCAN_MAX / THETA_SCAN_MIN).log10();
    let n = (decades * SCAN_POINTS_PER_DECADE as f64).round() as usize + 1;
    let thetas = log_grid(THETA_SCAN_MIN, THETA_SCAN_MAX, n);
    let ln_q = svc.ln_q_many(&thetas, exec)?;
    let stable: Vec<bool> = thetas
        .iter()
        .zip(&ln_q)
        .map(|(&th, &lq)| env.ln_rate_factor(th) + lq < 0.0)
        .collect();
    let Some(first) = stable.iter().position(|&s| s) else {
        return Ok(StabilityInterval::empty());
    };
    let last = stable
        .iter()
        .rposition(|&s| s)
        .expect("one stable point exists");
    let is_stable = |th: f64| -> Result<bool> { Ok(log_load(env, svc, th)? < 0.0) };

    let lower = if first == 0 {
        thetas[0]
    } else {
        bisect_boundary(thetas[first - 1], thetas[first], true, &is_stable)?
    };
    let (upper, reaches_scan_max) = if last == n - 1 {
        (thetas[n - 1], true)
    } else {
        (
            bisect_boundary(thetas[last], thetas[last + 1], false, &is_stable)?,
            false,
        )
    };
    Ok(StabilityInterval {
        lower,
        upper,
        reaches_scan_max,
    })
}

/// Geometric bisection between a stable and an unstable point; returns the
/// stable end. `stable_above` says which side is stable.
fn bisect_boundary(
    mut lo: f64,
    mut hi: f64,
    stable_above: bool,
    is_stable: &impl Fn(f64) -> Result<bool>,
) -> Result<f64> {
    while hi / lo - 1.0 > BISECT_REL_WIDTH {
        let mid = canonical_theta((lo * hi).sqrt());
        if mid <= lo || mid >= hi {
            break;
        }
        if is_stable(mid)? == stable_above {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(if stable_above { hi } else { lo })
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![canonical_theta((lo * hi).sqrt())];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            canonical_theta(if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            })
        })
        .collect()
}

/// Search grid inside the stability interval, away from both ends.
fn search_grid(stab: &StabilityInterval) -> Vec<f64> {
    let lo = stab.lower * (1.0 + GRID_MARGIN);
    let hi = stab.upper * (1.0 - GRID_MARGIN);
    if lo < hi {
        log_grid(lo, hi, GRID_POINTS)
    } else {
        vec![canonical_theta((stab.lower * stab.upper).sqrt())]
    }
}

/// Minimum of `h` over `ln theta` in `[a, b]` by golden section, returning the
/// best point seen (including the seed).
fn golden_min(
    h: &impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    seed: (f64, f64),
) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a.ln(), b.ln());
    let mut best = seed;
    let mut consider = |theta: f64, v: f64| {
        if v < best.1 {
            best = (theta, v);
        }
    };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let at = |x: f64| canonical_theta(x.exp());
    let mut fc = h(at(c))?;
    let mut fd = h(at(d))?;
    consider(at(c), fc);
    consider(at(d), fd);
    while b - a > GOLDEN_REL_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = h(at(c))?;
            consider(at(c), fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = h(at(d))?;
            consider(at(d), fd);
        }
    }
    Ok(best)
}

/// Refines around grid index `i` of `grid`/`values` and returns the best point.
fn refine_around(
    h: &impl Fn(f64) -> Result<f64>,
    grid: &[f64],
    values: &[f64],
    i: usize,
) -> Result<(f64, f64)> {
    let seed = (grid[i], values[i]);
    if grid.len() < 3 {
        return Ok(seed);
    }
    let a = grid[i.saturating_sub(1)];
    let b = grid[(i + 1).min(grid.len() - 1)];
    golden_min(h, a, b, seed)
}

fn argmin(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) },
        )
        .0
}

fn require_stable(
    env: &AffineEnvelope,
    svc: &ServiceCharacterization,
) -> Result<StabilityInterval> {
    let stab = stability_region(env, svc)?;
    if stab.is_empty() {
        return Err(Error::Unstable);
    }
    Ok(stab)
}

/// Dispatches on `query.kind`.
pub fn bound(
    env: &AffineEnvelope,
    svc: &ServiceCharacterization,
    query: &BoundQuery,
) -> Result<BoundResult> {
    match query.kind {
        BoundKind::Backlog => backlog_bound(env, svc, query),
        BoundKind::Delay => delay_bound(env, svc, query),
    }
}

/// Backlog bound `b` with `P(B(t) > b) <= epsilon`, in bits.
pub fn backlog_bound(
    env: &AffineEnvelope,
    svc: &ServiceCharacterization,
    query: &BoundQuery,
) -> Result<BoundResult> {
    if query.kind != BoundKind::Backlog {
        return Err(Error::InvalidConfig(
            "backlog_bound needs a backlog query".into(),
        ));
    }
    let query = BoundQuery::new(query.kind, query.epsilon)?;
    let stab = require_stable(env, svc)?;
    let ln_eps = query.epsilon.ln();
    let burst = env.burst_bits();
    let objective = |theta: f64, ln_q: f64| -> f64 {
        let f = env.ln_rate_factor(theta) + ln_q;
        if f >= 0.0 {
            return f64::INFINITY;
        }
        burst - (ln_one_minus_exp(f) + ln_eps) / theta
    };
    let h = |theta: f64| -> Result<f64> { Ok(objective(theta, svc.ln_q(theta)?)) };

    let grid = search_grid(&stab);
    let ln_q = svc.ln_q_many(&grid, Execution::default())?;
    let values: Vec<f64> = grid
        .iter()
        .zip(&ln_q)
        .map(|(&th, &lq)| objective(th, lq))
        .collect();
    let (mut theta, mut best) = refine_around(&h, &grid, &values, argmin(&values))?;
    // When p_a q < 1 for every theta > 0 (no load, or a constant server that
    // keeps up) the objective tends to the burst as theta grows.
    let stable_everywhere = stab.reaches_scan_max
        && (env.rate_bits_per_slot() == 0.0 || svc.channel().sigma_db() == 0.0);
    if stable_everywhere && burst < best {
        theta = stab.upper;
        best = burst;
    }
    if !best.is_finite() {
        return Err(Error::NotConverged {
            what: "backlog bound",
            detail: "objective is infinite on the whole stability interval".into(),
        });
    }
    let kernel = kernel_bound(env, svc, theta, 0, 0)?.value();
    Ok(BoundResult {
        kind: BoundKind::Backlog,
        epsilon: query.epsilon,
        value: best.max(0.0),
        optimal_theta: theta,
        kernel_at_optimum: kernel,
        stability: stab,
        trace: trace(&grid, &values),
    })
}

fn trace(grid: &[f64], values: &[f64]) -> Vec<ThetaSample> {
    grid.iter()
        .zip(values)
        .map(|(&theta, &objective)| ThetaSample { theta, objective })
        .collect()
}

/// Delay bound `w` with `P(W(t) > w) <= epsilon`, in slots.
pub fn delay_bound(
    env: &AffineEnvelope,
    svc: &ServiceCharacterization,
    query: &BoundQuery,
) -> Result<BoundResult> {
    if query.kind != BoundKind::Delay {
        return Err(Error::InvalidConfig(
            "delay_bound needs a delay query".into(),
        ));
    }
    let query = BoundQuery::new(query.kind, query.epsilon)?;
    let stab = require_stable(env, svc)?;
    let ln_eps = query.epsilon.ln();
    let burst = env.burst_bits();
    let log_kernel = |theta: f64, ln_q: f64, w: u64| -> f64 {
        let f = env.ln_rate_factor(theta) + ln_q;
        if f >= 0.0 {
            return f64::INFINITY;
        }
        theta * burst + w as f64 * ln_q - ln_one_minus_exp(f)
    };

    let grid = search_grid(&stab);
    let ln_q = svc.ln_q_many(&grid, Execution::default())?;
    let on_grid = |w: u64| -> Vec<f64> {
        grid.iter()
            .zip(&ln_q)
            .map(|(&th, &lq)| log_kernel(th, lq, w))
            .collect()
    };
    // Smallest log kernel over theta for a given w, plus where it is attained.
    let solve = |w: u64| -> Result<(f64, f64, Vec<f64>)> {
        let values = on_grid(w);
        let i = argmin(&values);
        if values[i] <= ln_eps
            || convex_lower_bound(&grid, &values, stab.lower, stab.upper) > ln_eps
        {
            return Ok((grid[i], values[i], values));
        }
        let h = |theta: f64| -> Result<f64> { Ok(log_kernel(theta, svc.ln_q(theta)?, w)) };
        let (theta, v) = refine_around(&h, &grid, &values, i)?;
        Ok((theta, v, values))
    };
    let feasible = |w: u64| -> Result<bool> { Ok(solve(w)?.1 <= ln_eps) };

    // w = 0 never qualifies: the kernel is at least 1 > epsilon there.
    let mut lo = 0u64;
    let mut hi = 1u64;
    while !feasible(hi)? {
        lo = hi;
        hi = hi
            .checked_mul(2)
            .filter(|&h| h <= MAX_DELAY_SLOTS)
            .ok_or_else(|| Error::NotConverged {
                what: "delay bound",
                detail: format!("no feasible delay below {MAX_DELAY_SLOTS} slots"),
            })?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (theta, ln_kernel, values) = solve(hi)?;
    Ok(BoundResult {
        kind: BoundKind::Delay,
        epsilon: query.epsilon,
        value: hi as f64,
        optimal_theta: theta,
        kernel_at_optimum: ln_kernel.exp(),
        stability: stab,
        trace: trace(&grid, &values),
    })
}

/// Lower bound on the minimum over `[lower, upper]` of a convex function known
/// on `grid`: each gap is bounded below by the secants of its neighbours
/// extended into it. Only used to skip refinement, so a violated convexity
/// assumption can only make the delay bound more conservative.
fn convex_lower_bound(grid: &[f64], values: &[f64], lower: f64, upper: f64) -> f64 {
    let n = grid.len();
    if n < 3 {
        return f64::NEG_INFINITY;
    }
    let slope = |i: usize| (values[i + 1] - values[i]) / (grid[i + 1] - grid[i]);
    let line = |i: usize, x: f64| values[i] + slope(i) * (x - grid[i]);
    // outer rays
    let mut bound = line(0, lower).min(line(n - 2, upper));
    for i in 0..n - 1 {
        let (a, b) = (grid[i], grid[i + 1]);
        let left = (i > 0).then(|| i - 1);
        let right = (i + 2 < n).then(|| i + 1);
        let gap_min = match (left, right) {
            (Some(l), Some(r)) => {
                let mut m = line(l, a).max(line(r, a)).min(line(l, b).max(line(r, b)));
                let (sl, sr) = (slope(l), slope(r));
                if sl != sr {
                    let x = (values[r] - sr * grid[r] - values[l] + sl * grid[l]) / (sl - sr);
                    if x > a && x < b {
                        m = m.min(line(l, x));
                    }
                }
                m
            }
            (Some(l), None) => line(l, a).min(line(l, b)),
            (None, Some(r)) => line(r, a).min(line(r, b)),
            (None, None) => f64::NEG_INFINITY,
        };
        bound = bound.min(gap_min);
    }
    if bound.is_nan() {
        f64::NEG_INFINITY
    } else {
        bound
    }
}

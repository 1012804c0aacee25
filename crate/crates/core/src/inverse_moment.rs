//! Upper bounds on the inverse moment `E[(1 + X)^(-theta)]` of a non-negative
//! random variable from its CDF alone, plus a quadrature oracle for the exact
//! value.
//!
//! With bins of width `delta` and `N` bins, the discretized bound is
//!
//! ```text
//! U = (1 + N delta)^(-theta) + sum_{k=1..N} a_k F(k delta),
//! a_k = (1 + (k-1) delta)^(-theta) - (1 + k delta)^(-theta).
//! ```
//!
//! Summation by parts turns this into a sum of non-negative terms,
//!
//! ```text
//! U = sum_{k=0..N-1} (1 + k delta)^(-theta) P(k delta < X <= (k+1) delta)
//!     + (1 + N delta)^(-theta) P(X > N delta),
//! ```
//!
//! (the first bin also carries any atom at zero), which is how it is
//! evaluated here: every term is positive, so nothing cancels. Each extra bin
//! can only lower `U`, so the infimum over the truncation point is approached
//! as `N` grows; the truncation point is chosen by [`truncation_point`].

use crate::error::{domain, Error, Result};
use crate::fastmath::{exp_nonpositive, expm1_unit, ln_positive, multiversion};
use crate::quadrature;

/// A cumulative distribution function on `[0, inf)`.
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;

    /// `(P(X <= x), P(X > x))`. Implementations with an accurate upper tail
    /// should override this.
    fn cdf_and_sf(&self, x: f64) -> (f64, f64) {
        let f = self.cdf(x);
        (f, 1.0 - f)
    }

    /// `(mu, s)` when `ln X ~ N(mu, s^2)`. Bin masses are then integrated
    /// from the density where bins are narrow instead of differenced.
    fn log_normal_parameters(&self) -> Option<(f64, f64)> {
        None
    }
}

impl<F: Fn(f64) -> f64> Cdf for F {
    fn cdf(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Controls for the discretized bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscretizationConfig {
    /// Bin width on the linear scale of `X`.
    pub step_delta: f64,
    /// Truncate once the largest possible looseness of the dropped tail,
    /// `(1 + u)^(-theta) P(X > u)`, falls below this fraction of a lower
    /// bound on the expectation. For `theta = 0` this is the plain tail mass.
    pub tail_mass_tol: f64,
    /// Hard cap on the number of bins.
    pub max_terms: u64,
    /// Halve `step_delta` until successive bounds agree to `refine_rel_tol`.
    pub refine_to_limit: bool,
    pub refine_rel_tol: f64,
}

impl Default for DiscretizationConfig {
    fn default() -> Self {
        Self {
            step_delta: 1e-2,
            tail_mass_tol: 1e-12,
            max_terms: 10_000_000,
            refine_to_limit: false,
            refine_rel_tol: 5e-5,
        }
    }
}

impl DiscretizationConfig {
    pub fn with_step(step_delta: f64) -> Self {
        Self {
            step_delta,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_delta > 0.0 && self.step_delta.is_finite()) {
            return Err(domain("step_delta", self.step_delta));
        }
        if !(self.tail_mass_tol > 0.0 && self.tail_mass_tol < 1.0) {
            return Err(domain("tail_mass_tol", self.tail_mass_tol));
        }
        if self.max_terms < 1 {
            return Err(domain("max_terms", self.max_terms as f64));
        }
        if !(self.refine_rel_tol > 0.0 && self.refine_rel_tol < 1.0) {
            return Err(domain("refine_rel_tol", self.refine_rel_tol));
        }
        Ok(())
    }
}

/// Result of [`lemma1_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Estimate {
    /// The bound itself, in `(0, 1]`.
    pub value: f64,
    /// `1 - value`, computed directly when `value` is close to one.
    pub complement: f64,
    /// Number of bins `N`.
    pub terms: u64,
    /// Step actually used (differs from the configured one in refine mode).
    pub step_delta: f64,
    /// Truncation point `u` before snapping to the grid.
    pub truncation_point: f64,
    /// Whether `max_terms` cut the sum short of `u`.
    pub capped: bool,
}

impl Lemma1Estimate {
    /// `ln(value)` without losing the digits of a value near one.
    pub fn ln_value(&self) -> f64 {
        if self.complement < 0.5 {
            (-self.complement).ln_1p()
        } else {
            self.value.ln()
        }
    }
}

/// Discretized upper bound on `E[(1 + X)^(-theta)]`.
pub fn lemma1_bound<C: Cdf + ?Sized>(
    cdf: &C,
    theta: f64,
    config: &DiscretizationConfig,
) -> Result<Lemma1Estimate> {
    config.validate()?;
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(domain("theta", theta));
    }
    if theta == 0.0 {
        return Ok(Lemma1Estimate {
            value: 1.0,
            complement: 0.0,
            terms: 0,
            step_delta: config.step_delta,
            truncation_point: 0.0,
            capped: false,
        });
    }
    let u = truncation_point(cdf, theta, config.tail_mass_tol)?;
    let first = evaluate_at(cdf, theta, config.step_delta, u, config.max_terms)?;
    if !config.refine_to_limit {
        return Ok(first);
    }

    let mut best = first;
    for _ in 0..48 {
        let step = best.step_delta / 2.0;
        if bins_for(u, step) > config.max_terms {
            return Err(Error::NotConverged {
                what: "inverse moment refinement",
                detail: format!(
                    "step {step:e} needs more than {} bins (last value {:e})",
                    config.max_terms, best.value
                ),
            });
        }
        let next = evaluate_at(cdf, theta, step, u, config.max_terms)?;
        let change = (best.value - next.value) / next.value;
        best = next;
        if change <= config.refine_rel_tol {
            return Ok(best);
        }
    }
    Err(Error::NotConverged {
        what: "inverse moment refinement",
        detail: format!("no convergence down to step {:e}", best.step_delta),
    })
}

fn bins_for(u: f64, step: f64) -> u64 {
    let n = (u / step).floor();
    if n >= u64::MAX as f64 {
        u64::MAX
    } else {
        n as u64
    }
}

fn evaluate_at<C: Cdf + ?Sized>(
    cdf: &C,
    theta: f64,
    step: f64,
    u: f64,
    max_terms: u64,
) -> Result<Lemma1Estimate> {
    let wanted = bins_for(u, step);
    let terms = wanted.min(max_terms);
    let mut bins = BinWalker::new(step);
    let mut acc = BinAccumulator::new(theta, terms as f64 * step);
    let mut ln_left = Vec::with_capacity(CHUNK);
    let mut mass = Vec::with_capacity(CHUNK);
    let mut left = terms;
    while left > 0 {
        let take = left.min(CHUNK as u64);
        ln_left.clear();
        mass.clear();
        bins.fill(cdf, take as usize, &mut ln_left, &mut mass)?;
        acc.add_slice(&ln_left, &mass);
        left -= take;
    }
    let tail = bins.survival(cdf);
    let (value, complement) = acc.finish(tail);
    Ok(Lemma1Estimate {
        value,
        complement,
        terms,
        step_delta: step,
        truncation_point: u,
        capped: wanted > max_terms,
    })
}

/// Walks consecutive bins `(k delta, (k+1) delta]`, producing the log of the
/// left edge `ln(1 + k delta)` and the probability mass of each bin.
pub(crate) struct BinWalker {
    step: f64,
    k: u64,
    lower: f64,
    upper: f64,
    z_edges: Vec<f64>,
}

/// Bins narrower than this in the Gaussian coordinate get their mass from
/// 3-point Gauss-Legendre on the density (error far below rounding).
const MAX_QUADRATURE_WIDTH_Z: f64 = 0.05;
const GL3_NODE: f64 = 0.774_596_669_241_483_4; // sqrt(3/5)
const GL3_OUTER: f64 = 5.0 / 9.0;
const GL3_CENTRE: f64 = 8.0 / 9.0;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

impl BinWalker {
    pub(crate) fn new(step: f64) -> Self {
        // F(0-) = 0: an atom at zero lands in the first bin.
        Self {
            step,
            k: 0,
            lower: 0.0,
            upper: 1.0,
            z_edges: Vec::new(),
        }
    }

    /// Appends the next `n` bins.
    pub(crate) fn fill<C: Cdf + ?Sized>(
        &mut self,
        cdf: &C,
        n: usize,
        ln_left: &mut Vec<f64>,
        mass: &mut Vec<f64>,
    ) -> Result<()> {
        let (k0, step) = (self.k as f64, self.step);
        let start = ln_left.len();
        ln_left.resize(start + n, 0.0);
        log_grid(&mut ln_left[start..], 1.0, k0, step, 0.0, 1.0);
        match cdf.log_normal_parameters() {
            Some((mu, s)) => self.fill_log_normal(cdf, mu, s, n, mass),
            None => {
                for _ in 0..n {
                    let m = self.next_mass(cdf)?;
                    mass.push(m);
                }
                Ok(())
            }
        }
    }

    fn next_mass<C: Cdf + ?Sized>(&mut self, cdf: &C) -> Result<f64> {
        let right = (self.k + 1) as f64 * self.step;
        let (lower, upper) = cdf.cdf_and_sf(right);
        if !((0.0..=1.0).contains(&lower) && (0.0..=1.0).contains(&upper)) {
            return Err(Error::NonMonotoneCdf {
                x: right,
                before: self.lower,
                after: lower,
            });
        }
        if lower < self.lower - 1e-12 || upper > self.upper + 1e-12 {
            return Err(Error::NonMonotoneCdf {
                x: right,
                before: self.lower,
                after: lower,
            });
        }
        let mass = difference_mass((self.lower, self.upper), (lower, upper));
        self.lower = lower;
        self.upper = upper;
        self.k += 1;
        Ok(mass)
    }

    fn fill_log_normal<C: Cdf + ?Sized>(
        &mut self,
        cdf: &C,
        mu: f64,
        s: f64,
        n: usize,
        mass: &mut Vec<f64>,
    ) -> Result<()> {
        // Bin k has width ln(1 + 1/k) / s in z; from here on that is narrow.
        let first_narrow = (1.0 / (MAX_QUADRATURE_WIDTH_Z * s).exp_m1())
            .ceil()
            .max(1.0) as u64;
        let end = self.k + n as u64;
        while self.k < end.min(first_narrow) {
            let m = self.next_mass(cdf)?;
            mass.push(m);
        }
        let rest = (end - self.k) as usize;
        if rest == 0 {
            return Ok(());
        }
        let (k0, step, inv_s) = (self.k as f64, self.step, 1.0 / s);
        self.z_edges.resize(rest + 1, 0.0);
        let start = mass.len();
        mass.resize(start + rest, 0.0);
        log_grid(&mut self.z_edges, 0.0, k0, step, mu, inv_s);
        gl3_masses(&mut mass[start..], &self.z_edges);
        self.k = end;
        // Keep the difference path consistent if it is ever used again.
        let (lower, upper) = cdf.cdf_and_sf(end as f64 * step);
        self.lower = lower;
        self.upper = upper;
        Ok(())
    }

    /// `P(X > k delta)` at the current position.
    pub(crate) fn survival<C: Cdf + ?Sized>(&self, cdf: &C) -> f64 {
        if self.k == 0 {
            1.0
        } else {
            cdf.cdf_and_sf(self.k as f64 * self.step).1
        }
    }
}

multiversion! {
    /// `out[j] = (ln(offset + (k0 + j) step) - mu) * scale`.
    fn log_grid(out: &mut [f64], offset: f64, k0: f64, step: f64, mu: f64, scale: f64) {
        #[allow(clippy::needless_range_loop)] // an iterator here stops vectorisation
        for j in 0..out.len() {
            out[j] = (ln_positive(offset + (k0 + j as f64) * step) - mu) * scale;
        }
    }
}

multiversion! {
    /// Standard normal mass between consecutive `z_edges` by 3-point
    /// Gauss-Legendre.
    fn gl3_masses(out: &mut [f64], z_edges: &[f64]) {
        let (lo, hi) = (&z_edges[..out.len()], &z_edges[1..=out.len()]);
        for ((o, &a), &b) in out.iter_mut().zip(lo).zip(hi) {
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            let off = half * GL3_NODE;
            // phi(mid +- off) = phi(mid) e^(-off^2/2) e^(-+ mid off)
            let outer = 2.0 * small_exp_neg(0.5 * off * off) * cosh_series(mid * off);
            *o = half
                * INV_SQRT_2PI
                * exp_nonpositive(-0.5 * mid * mid)
                * (GL3_CENTRE + GL3_OUTER * outer);
        }
    }
}

/// `exp(-x)` for `0 <= x <= 2e-4`.
#[inline(always)]
fn small_exp_neg(x: f64) -> f64 {
    1.0 - x * (1.0 - x * (0.5 - x * (1.0 / 6.0 - x / 24.0)))
}

/// `cosh(a)` for `|a| <= 1`.
#[inline(always)]
fn cosh_series(a: f64) -> f64 {
    let a2 = a * a;
    let mut p = 1.0 / 20_922_789_888_000.0;
    p = p * a2 + 1.0 / 87_178_291_200.0;
    p = p * a2 + 1.0 / 479_001_600.0;
    p = p * a2 + 1.0 / 3_628_800.0;
    p = p * a2 + 1.0 / 40_320.0;
    p = p * a2 + 1.0 / 720.0;
    p = p * a2 + 1.0 / 24.0;
    p = p * a2 + 0.5;
    p * a2 + 1.0
}

/// Mass between two CDF evaluations, differencing whichever tail is small.
fn difference_mass((lower_a, upper_a): (f64, f64), (lower_b, upper_b): (f64, f64)) -> f64 {
    let mass = if lower_b <= 0.5 {
        lower_b - lower_a
    } else if upper_a <= 0.5 {
        upper_a - upper_b
    } else {
        lower_b - lower_a
    };
    mass.max(0.0)
}

const LANES: usize = 8;
const CHUNK: usize = 4096;

multiversion! {
    fn accumulate_lanes(
        lanes: &mut [f64; LANES],
        theta: f64,
        complement_form: bool,
        ln_left: &[f64],
        mass: &[f64],
    ) {
        let pairs = ln_left.chunks_exact(LANES).zip(mass.chunks_exact(LANES));
        if complement_form {
            for (l, m) in pairs {
                for j in 0..LANES {
                    lanes[j] += m[j] * -expm1_unit(-theta * l[j]);
                }
            }
        } else {
            for (l, m) in pairs {
                for j in 0..LANES {
                    lanes[j] += m[j] * exp_nonpositive(-theta * l[j]);
                }
            }
        }
    }
}

/// Accumulates `sum mass * (1 + x)^(-theta)`, or its complement
/// `sum mass * (1 - (1 + x)^(-theta))`, over bins fed in index order.
///
/// Terms go to `LANES` partial sums by bin index, so the result does not
/// depend on how the bins are sliced as long as every slice but the last has
/// a length divisible by `LANES`.
pub(crate) struct BinAccumulator {
    theta: f64,
    ln_end: f64,
    complement_form: bool,
    lanes: [f64; LANES],
    pos: usize,
}

impl BinAccumulator {
    /// `end` is the truncation point `N delta`; it decides which form keeps
    /// full relative precision.
    pub(crate) fn new(theta: f64, end: f64) -> Self {
        let ln_end = end.ln_1p();
        Self {
            theta,
            ln_end,
            complement_form: theta * ln_end <= 1.0,
            lanes: [0.0; LANES],
            pos: 0,
        }
    }

    #[inline(always)]
    fn weight(&self, ln_left: f64) -> f64 {
        let x = -self.theta * ln_left;
        if self.complement_form {
            -expm1_unit(x)
        } else {
            exp_nonpositive(x)
        }
    }

    pub(crate) fn add_slice(&mut self, ln_left: &[f64], mass: &[f64]) {
        debug_assert_eq!(ln_left.len(), mass.len());
        let mut start = 0;
        if self.pos.is_multiple_of(LANES) {
            let whole = ln_left.len() / LANES * LANES;
            accumulate_lanes(
                &mut self.lanes,
                self.theta,
                self.complement_form,
                &ln_left[..whole],
                &mass[..whole],
            );
            start = whole;
            self.pos += whole;
        }
        for (&l, &m) in ln_left[start..].iter().zip(&mass[start..]) {
            let w = self.weight(l);
            self.lanes[self.pos % LANES] += m * w;
            self.pos += 1;
        }
    }

    /// Adds the truncated tail and returns `(value, 1 - value)`.
    pub(crate) fn finish(self, tail_mass: f64) -> (f64, f64) {
        let tail = tail_mass * self.weight(self.ln_end);
        let l = &self.lanes;
        let sum = ((l[0] + l[1]) + (l[2] + l[3])) + ((l[4] + l[5]) + (l[6] + l[7])) + tail;
        let s = sum.clamp(0.0, 1.0);
        if self.complement_form {
            (1.0 - s, s)
        } else {
            (s, 1.0 - s)
        }
    }
}

/// Truncation point `u` for [`lemma1_bound`], independent of the step.
///
/// `u` is the smallest point with `(1 + u)^(-theta) P(X > u) <= tol * L`,
/// where `L = sup_x (1 + x)^(-theta) F(x)` is a lower bound on the expectation.
/// The left side bounds how much the dropped tail can loosen the result.
pub fn truncation_point<C: Cdf + ?Sized>(cdf: &C, theta: f64, tol: f64) -> Result<f64> {
    // Log domain: for large theta the weights underflow long before the
    // ratio in question does.
    let ln_h = |x: f64| -theta * x.ln_1p();
    let probes = std::iter::once(0.0).chain((-40..=80).map(|j| 2f64.powi(j)));
    let ln_reference = probes
        .map(|x| ln_h(x) + cdf.cdf_and_sf(x).0.ln())
        .fold(f64::NEG_INFINITY, f64::max);
    if ln_reference == f64::NEG_INFINITY {
        return Err(Error::InvalidConfig(
            "cdf carries no mass below 2^80".into(),
        ));
    }
    let target = tol.ln() + ln_reference;
    let below = |x: f64| ln_h(x) + cdf.cdf_and_sf(x).1.ln() <= target;
    if below(0.0) {
        return Ok(0.0);
    }
    let Some(j) = (-40..=80).find(|&j| below(2f64.powi(j))) else {
        return Ok(2f64.powi(80));
    };
    if j == -40 {
        return Ok(2f64.powi(-40));
    }
    let (mut lo, mut hi) = (2f64.powi(j - 1), 2f64.powi(j));
    for _ in 0..60 {
        let mid = (lo * hi).sqrt();
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi / lo - 1.0 < 1e-12 {
            break;
        }
    }
    Ok(hi)
}

/// Distribution descriptors accepted by [`exact_inverse_moment`].
#[derive(Clone, Copy)]
pub enum InverseMomentSource<'a> {
    /// `10 log10(X) ~ N(kappa_db, sigma_db^2)`, `sigma_db > 0`.
    LogNormalDb { kappa_db: f64, sigma_db: f64 },
    /// `X = g` almost surely.
    PointMass(f64),
    /// A density on `[0, inf)`.
    Density(&'a (dyn Fn(f64) -> f64 + Sync)),
}

impl std::fmt::Debug for InverseMomentSource<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::LogNormalDb { kappa_db, sigma_db } => f
                .debug_struct("LogNormalDb")
                .field("kappa_db", kappa_db)
                .field("sigma_db", sigma_db)
                .finish(),
            Self::PointMass(g) => f.debug_tuple("PointMass").field(g).finish(),
            Self::Density(_) => f.write_str("Density(..)"),
        }
    }
}

const QUAD_REL_TOL: f64 = 1e-9;
const QUAD_MAX_INTERVALS: usize = 4000;
const GAUSS_HALF_WIDTH: f64 = 10.0;
const PEAK_HALF_WIDTH: f64 = 12.0;

/// `E[(1 + X)^(-theta)]` by adaptive quadrature.
pub fn exact_inverse_moment(source: &InverseMomentSource<'_>, theta: f64) -> Result<f64> {
    let (value, complement) = exact_parts(source, theta)?;
    Ok(if complement < 0.5 {
        1.0 - complement
    } else {
        value
    })
}

/// `ln E[(1 + X)^(-theta)]`, keeping full relative precision near zero.
pub fn exact_inverse_moment_ln(source: &InverseMomentSource<'_>, theta: f64) -> Result<f64> {
    if let InverseMomentSource::PointMass(g) = *source {
        if g >= 0.0 && g.is_finite() && theta >= 0.0 && theta.is_finite() {
            return Ok(-theta * g.ln_1p());
        }
    }
    let (value, complement) = exact_parts(source, theta)?;
    Ok(if complement < 0.5 {
        (-complement).ln_1p()
    } else {
        value.ln()
    })
}

/// Returns `(value, 1 - value)` where whichever is more accurate was
/// integrated directly.
fn exact_parts(source: &InverseMomentSource<'_>, theta: f64) -> Result<(f64, f64)> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(domain("theta", theta));
    }
    if theta == 0.0 {
        return Ok((1.0, 0.0));
    }
    match *source {
        InverseMomentSource::PointMass(g) => {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(domain("point mass", g));
            }
            let e = -theta * g.ln_1p();
            Ok((e.exp(), -e.exp_m1()))
        }
        InverseMomentSource::LogNormalDb { kappa_db, sigma_db } => {
            if !(sigma_db > 0.0 && sigma_db.is_finite() && kappa_db.is_finite()) {
                return Err(domain("sigma_db", sigma_db));
            }
            let mu = crate::channel::IOTA * kappa_db;
            let s = crate::channel::IOTA * sigma_db;
            let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
            // ln(1 + e^y) without overflow
            let softplus = |y: f64| {
                if y > 0.0 {
                    y + (-y).exp().ln_1p()
                } else {
                    y.exp().ln_1p()
                }
            };
            let log_weight = move |z: f64| -theta * softplus(mu + s * z);
            let phi = move |z: f64| norm * (-0.5 * z * z).exp();
            if theta * softplus(mu + s * GAUSS_HALF_WIDTH) <= 1.0 {
                let q = quadrature::integrate(
                    |z| phi(z) * -log_weight(z).exp_m1(),
                    -GAUSS_HALF_WIDTH,
                    GAUSS_HALF_WIDTH,
                    QUAD_REL_TOL,
                    0.0,
                    QUAD_MAX_INTERVALS,
                )?;
                Ok((1.0 - q.value, q.value))
            } else {
                // The log integrand -z^2/2 + log_weight(z) has curvature at
                // most -1, so beyond PEAK_HALF_WIDTH of its peak it sits
                // under a Gaussian with negligible tail.
                let slope = |z: f64| {
                    let y = mu + s * z;
                    let logistic = if y > 0.0 {
                        1.0 / (1.0 + (-y).exp())
                    } else {
                        let e = y.exp();
                        e / (1.0 + e)
                    };
                    -z - theta * s * logistic
                };
                let (mut lo, mut hi) = (-theta * s, 0.0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if slope(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let peak = 0.5 * (lo + hi);
                let q = quadrature::integrate(
                    |z| phi(z) * log_weight(z).exp(),
                    peak - PEAK_HALF_WIDTH,
                    peak + PEAK_HALF_WIDTH,
                    QUAD_REL_TOL,
                    1e-300,
                    QUAD_MAX_INTERVALS,
                )?;
                let height = (-0.5 * peak * peak + log_weight(peak)).exp();
                let tails = height * libm::erfc(PEAK_HALF_WIDTH / std::f64::consts::SQRT_2);
                let value = q.value + tails;
                Ok((value, 1.0 - value))
            }
        }
        InverseMomentSource::Density(density) => {
            // x = t / (1 - t) maps [0, 1) onto [0, inf).
            let q = quadrature::integrate(
                |t| {
                    let x = t / (1.0 - t);
                    let jac = 1.0 / ((1.0 - t) * (1.0 - t));
                    density(x) * (-theta * x.ln_1p()).exp() * jac
                },
                0.0,
                1.0,
                QUAD_REL_TOL,
                1e-300,
                QUAD_MAX_INTERVALS,
            )?;
            Ok((q.value, 1.0 - q.value))
        }
    }
}

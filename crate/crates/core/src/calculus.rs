//! Numerical witnesses for the series bounds that control the heavy part.
//!
//! With `Vt_n = min(V_n, n)` and `p > 1`,
//!
//! ```text
//! E Vt_n^p <= int_0^n p s^{p-1} G(s) ds + n^p G(n)
//! sum_{n>=3} E Vt_n^p / n^p <= A + B <= C_G (2p - 1) / (p - 1)
//! ```
//!
//! Every series here is a partial sum plus a closed-form upper bound on the
//! remainder, never a bare truncation.

use serde::{Deserialize, Serialize};

use rayon::prelude::*;

use crate::generators::{DependenceMode, TailEnvelope};
use crate::quadrature::{adaptive_simpson, integrate};
use crate::rng::{derive_stream, Channel, StreamKey};
use crate::schedules::{insertion_exponents, MomentSchedule};
use crate::{Error, Result};

/// Absolute slack allowed before a bound counts as violated.
pub const BOUND_TOLERANCE: f64 = 1e-8;
/// Block search gives up past this index.
pub const SEARCH_LIMIT: u64 = 1_000_000_000_000;
pub const DEFAULT_TRUNCATION: u64 = 10_000;
pub const DEFAULT_P_VALUES: [f64; 5] = [1.01, 1.5, 2.0, 3.0, 10.0];

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("exponent p must exceed 1, got {p}")))
    }
}

fn power_integrand(envelope: &TailEnvelope, p: f64) -> impl Fn(f64) -> f64 + '_ {
    move |s: f64| {
        if s == 0.0 {
            0.0
        } else {
            p * s.powf(p - 1.0) * envelope.gbar(s)
        }
    }
}

/// `int_0^n p s^{p-1} G(s) ds`.
pub fn power_integral(envelope: &TailEnvelope, p: f64, n: f64) -> f64 {
    integrate(power_integrand(envelope, p), 0.0, n, &envelope.breakpoints(), 1e-14, 1e-13)
}

/// Upper bound on `E min(V, n)^p`: `int_0^n p s^{p-1} G(s) ds + n^p G(n)`.
///
/// This is the form the series bounds are built from. It over-counts the
/// atom at `n`; see [`exact_truncated_power_moment`] for the moment itself.
pub fn truncated_power_moment(envelope: &TailEnvelope, n: u64, p: f64) -> Result<f64> {
    check_p(p)?;
    if n == 0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    Ok(power_integral(envelope, p, nf) + nf.powf(p) * envelope.gbar(nf))
}

/// `E min(V, n)^p = int_0^n p s^{p-1} G(s) ds` for the extremal law.
pub fn exact_truncated_power_moment(envelope: &TailEnvelope, n: u64, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(power_integral(envelope, p, n as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub n: u64,
    pub p: f64,
    /// [`truncated_power_moment`]
    pub value: f64,
    pub exact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedMomentTable {
    pub envelope: TailEnvelope,
    pub entries: Vec<MomentEntry>,
}

impl TruncatedMomentTable {
    pub fn build(envelope: &TailEnvelope, ns: &[u64], ps: &[f64]) -> Result<Self> {
        let mut entries = Vec::with_capacity(ns.len() * ps.len());
        for &p in ps {
            for &n in ns {
                entries.push(MomentEntry {
                    n,
                    p,
                    value: truncated_power_moment(envelope, n, p)?,
                    exact: exact_truncated_power_moment(envelope, n, p)?,
                });
            }
        }
        Ok(Self {
            envelope: *envelope,
            entries,
        })
    }
}

/// `sum_{n >= m} n^{-p} <= (m - 1)^{1-p} / (p - 1)` for `m >= 2`.
pub fn zeta_remainder_bound(p: f64, m: u64) -> f64 {
    ((m - 1) as f64).powf(1.0 - p) / (p - 1.0)
}

/// Unit-interval pieces of `int p s^{p-1} G`, tolerance relative to the piece.
fn unit_piece(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let scale = (f(a).abs() + f(0.5 * (a + b)).abs() + f(b).abs()) * (b - a) / 3.0;
    adaptive_simpson(f, a, b, 1e-14 * scale + 1e-30)
}

/// Upper bound on `sum_{n > t} n^{-p} int_0^n p s^{p-1} G(s) ds` given
/// `i_t = int_0^t p s^{p-1} G`.
///
/// Split `int_0^n = i_t + sum_{i=t+1}^n int_{i-1}^i`, swap the sums, and
/// bound `s^{p-1} <= i^{p-1}` on `[i-1, i]`.
fn a_remainder(envelope: &TailEnvelope, p: f64, t: u64, i_t: f64) -> f64 {
    let tf = t as f64;
    let head = i_t * zeta_remainder_bound(p, t + 1);
    let growth = p / (p - 1.0) * ((tf + 1.0) / tf).powf(p - 1.0) * envelope.tail_integral(tf);
    head + growth
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesBound {
    #[serde(with = "crate::serde_float")]
    pub p: f64,
    pub truncation: u64,
    /// Partial sum over `3 <= n <= truncation`.
    pub partial: f64,
    /// Closed-form bound on the rest.
    pub remainder: f64,
    /// `partial + remainder`: an upper bound on the full series.
    pub numeric: f64,
    pub bound: f64,
    pub slack: f64,
}

impl SeriesBound {
    fn new(p: f64, truncation: u64, partial: f64, remainder: f64, bound: f64, what: &str) -> Result<Self> {
        let numeric = partial + remainder;
        if !(numeric <= bound + BOUND_TOLERANCE) {
            return Err(Error::BoundViolated {
                what: what.to_string(),
                value: numeric,
                bound,
            });
        }
        Ok(Self {
            p,
            truncation,
            partial,
            remainder,
            numeric,
            bound,
            slack: bound - numeric,
        })
    }
}

/// `A = sum_{n>=3} n^{-p} int_0^n p s^{p-1} G(s) ds` against `p/(p-1) C_G`.
pub fn series_bound_a(envelope: &TailEnvelope, p: f64, truncation: u64) -> Result<SeriesBound> {
    check_p(p)?;
    let t = truncation.max(3);
    let f = power_integrand(envelope, p);
    let mut i_n = 0.0;
    let mut partial = 0.0;
    for n in 1..=t {
        i_n += unit_piece(&f, (n - 1) as f64, n as f64);
        if n >= 3 {
            partial += i_n * (n as f64).powf(-p);
        }
    }
    let remainder = a_remainder(envelope, p, t, i_n);
    SeriesBound::new(p, t, partial, remainder, p / (p - 1.0) * envelope.c_g(), "A")
}

/// `B = sum_{n>=3} G(n)` against `C_G`; the tail past the truncation is
/// bounded by `int_T^inf G` since `G` is nonincreasing.
pub fn series_bound_b(envelope: &TailEnvelope, truncation: u64) -> Result<SeriesBound> {
    let t = truncation.max(2);
    let partial: f64 = (3..=t).map(|n| envelope.gbar(n as f64)).sum();
    let remainder = envelope.tail_integral(t as f64);
    SeriesBound::new(f64::NAN, t, partial, remainder, envelope.c_g(), "B")
}

/// `int_2^inf G`, the intermediate bound on `B`.
pub fn b_intermediate_bound(envelope: &TailEnvelope) -> f64 {
    envelope.tail_integral(2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombinedBound {
    pub envelope: TailEnvelope,
    pub p: f64,
    pub a: SeriesBound,
    pub b: SeriesBound,
    pub combined: f64,
    pub bound: f64,
    pub slack: f64,
}

/// `A + B <= C_G (2p - 1) / (p - 1)`.
pub fn combined_series_bound(envelope: &TailEnvelope, p: f64, truncation: u64) -> Result<CombinedBound> {
    let a = series_bound_a(envelope, p, truncation)?;
    let b = series_bound_b(envelope, truncation)?;
    let combined = a.numeric + b.numeric;
    let bound = envelope.c_g() * (2.0 * p - 1.0) / (p - 1.0);
    if !(combined <= bound + BOUND_TOLERANCE) {
        return Err(Error::BoundViolated {
            what: "A + B".into(),
            value: combined,
            bound,
        });
    }
    Ok(CombinedBound {
        envelope: *envelope,
        p,
        a,
        b,
        combined,
        bound,
        slack: bound - combined,
    })
}

/// Upper bound on `E sum_{n > N} Vt_n^p / n^p`.
pub fn block_tail_bound(envelope: &TailEnvelope, p: f64, n: u64) -> f64 {
    let i_n = power_integral(envelope, p, n as f64);
    a_remainder(envelope, p, n, i_n) + envelope.tail_integral(n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSchedule {
    /// `N_1 < N_2 < ...`
    pub n: Vec<u64>,
    /// `p_k = 1 / a_k`.
    pub p: Vec<f64>,
    /// The tail bound at each `N_k`; each is below `1/k^2`.
    pub tail_bounds: Vec<f64>,
}

impl BlockSchedule {
    /// `q(n) = p_k` for `N_k < n <= N_{k+1}`; `p_1` up to `N_1` and the last
    /// exponent past the final block.
    pub fn q(&self, n: u64) -> f64 {
        let k = self.n.partition_point(|&nk| nk < n);
        self.p[k.saturating_sub(1).min(self.p.len() - 1)]
    }
}

/// Relative margin by which the tail bound must clear `1/k^2`. For
/// `G(t) = e^{-t}` and `p = 2` the bound sits within 1e-13 of `1/k^2` at
/// `N = 2 k^2`, where rounding alone would decide the comparison.
pub const BLOCK_MARGIN: f64 = 1e-9;

/// Least `N_k >= N_{k-1} + 1` (with `N_0 = 1`) whose tail bound is below
/// `1/k^2`. Searches by doubling then bisection, which assumes the bound is
/// eventually decreasing in `N`.
pub fn build_block_schedule(
    envelope: &TailEnvelope,
    schedule: &MomentSchedule,
    k_max: u32,
) -> Result<BlockSchedule> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let mut out = BlockSchedule {
        n: Vec::with_capacity(k_max as usize),
        p: Vec::with_capacity(k_max as usize),
        tail_bounds: Vec::with_capacity(k_max as usize),
    };
    let mut prev = 1u64;
    for k in 1..=k_max {
        let p = schedule.eval_p(k as u64);
        check_p(p)?;
        let target = 1.0 / (k as f64).powi(2) * (1.0 - BLOCK_MARGIN);
        let ok = |n: u64| block_tail_bound(envelope, p, n) < target;
        let lower = prev + 1;
        let found = if ok(lower) {
            lower
        } else {
            let mut lo = lower;
            let mut hi = lower.max(2);
            loop {
                hi = hi.saturating_mul(2);
                if hi > SEARCH_LIMIT {
                    return Err(Error::SearchExhausted { k, limit: SEARCH_LIMIT });
                }
                if ok(hi) {
                    break;
                }
                lo = hi;
            }
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if ok(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        };
        out.n.push(found);
        out.p.push(p);
        out.tail_bounds.push(block_tail_bound(envelope, p, found));
        prev = found;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSeries {
    pub partial_sums: Vec<f64>,
    /// `(S_K - S_{K/10}) / S_K`, zero for an all-zero series.
    pub last_decade_increment: f64,
}

impl WeightedSeries {
    pub fn converged(&self, threshold: f64) -> bool {
        self.last_decade_increment < threshold
    }
}

fn weighted_from_log_terms(log_terms: impl Iterator<Item = f64>) -> WeightedSeries {
    let mut acc = 0.0;
    let partial_sums: Vec<f64> = log_terms
        .map(|lt| {
            acc += lt.exp();
            acc
        })
        .collect();
    let k = partial_sums.len();
    let last_decade_increment = if k == 0 || partial_sums[k - 1] == 0.0 {
        0.0
    } else {
        let before = if k / 10 == 0 { 0.0 } else { partial_sums[k / 10 - 1] };
        (partial_sums[k - 1] - before) / partial_sums[k - 1]
    };
    WeightedSeries {
        partial_sums,
        last_decade_increment,
    }
}

/// Partial sums of `sum_k |y_k| / k^{1/a_k}`.
pub fn weighted_y_series(ys: &[f64], exponents: &[f64]) -> WeightedSeries {
    weighted_from_log_terms(ys.iter().zip(exponents).enumerate().map(|(i, (&y, &a))| {
        let k = (i + 1) as f64;
        y.abs().ln() - k.ln() / a
    }))
}

/// Same series for `Y_k = V_k^{1/a_k}` given the `V_k` directly; computed in
/// log space so `Y_k` itself never has to be representable.
pub fn weighted_v_series(vs: &[f64], exponents: &[f64]) -> WeightedSeries {
    weighted_from_log_terms(vs.iter().zip(exponents).enumerate().map(|(i, (&v, &a))| {
        let k = (i + 1) as f64;
        (v.ln() - k.ln()) / a
    }))
}

/// One simulated heavy sequence `Y_k = V_k^{1/a_k}` of length `k_max`, with
/// `a_k` taken at the insertion position of the k-th heavy term under the
/// automatic pattern with constant `c`. Path `i` draws from the `Y` channel
/// keyed by `(seed, i)`.
pub fn simulate_weighted_series(
    envelope: &TailEnvelope,
    dependence: DependenceMode,
    exponents: &[f64],
    seed: u64,
    path_index: u64,
) -> WeightedSeries {
    let mut stream = derive_stream(StreamKey::new(seed, path_index, Channel::Y));
    let vs: Vec<f64> = match dependence {
        DependenceMode::Independent => exponents
            .iter()
            .map(|_| envelope.v_from_uniform(stream.next_uniform()))
            .collect(),
        DependenceMode::Comonotone => {
            let v = envelope.v_from_uniform(stream.next_uniform());
            vec![v; exponents.len()]
        }
    };
    weighted_v_series(&vs, exponents)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSeriesEnsemble {
    pub k_max: usize,
    pub n_paths: usize,
    pub threshold: f64,
    /// Last-decade relative increment per path, in path order.
    pub increments: Vec<f64>,
    pub converged_fraction: f64,
}

/// Runs [`simulate_weighted_series`] over `n_paths` paths and reports the
/// fraction whose last-decade relative increment is below `threshold`.
#[allow(clippy::too_many_arguments)]
pub fn weighted_series_ensemble(
    envelope: &TailEnvelope,
    dependence: DependenceMode,
    schedule: &MomentSchedule,
    c: f64,
    k_max: usize,
    n_paths: usize,
    seed: u64,
    threshold: f64,
) -> WeightedSeriesEnsemble {
    let exponents = insertion_exponents(schedule, c, k_max);
    let increments: Vec<f64> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| simulate_weighted_series(envelope, dependence, &exponents, seed, i).last_decade_increment)
        .collect();
    let ok = increments.iter().filter(|&&d| d < threshold).count();
    WeightedSeriesEnsemble {
        k_max,
        n_paths,
        threshold,
        converged_fraction: ok as f64 / n_paths.max(1) as f64,
        increments,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum KroneckerOutcome {
    Pass,
    Fail,
    PremiseFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KroneckerReport {
    pub n: usize,
    /// `sum_{k <= N} x_k / b_k`.
    pub series_sum: f64,
    /// `max_{N/10 <= m <= N} |P_N - P_m|` over partial sums `P`.
    pub cauchy_tail: f64,
    /// `(1/b_N) sum_{k <= N} x_k`.
    pub normalized_sum: f64,
    pub outcome: KroneckerOutcome,
}

/// Kronecker lemma on finite data: if `sum x_n / b_n` looks Cauchy over the
/// last decade, `(1/b_N) sum x_k` should be small.
pub fn kronecker_check(x: &[f64], b: &[f64], tol: f64) -> Result<KroneckerReport> {
    if x.is_empty() || x.len() != b.len() {
        return Err(Error::InvalidArgument("x and b must be nonempty and equally long".into()));
    }
    if b.iter().any(|&v| !(v > 0.0)) || b.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("b must be positive and nondecreasing".into()));
    }
    let n = x.len();
    let mut partials = Vec::with_capacity(n);
    let mut p = 0.0;
    let mut s = 0.0;
    for (xi, bi) in x.iter().zip(b) {
        p += xi / bi;
        s += xi;
        partials.push(p);
    }
    let last = partials[n - 1];
    let from = (n / 10).max(1) - 1;
    let cauchy_tail = partials[from..].iter().map(|&q| (last - q).abs()).fold(0.0, f64::max);
    let normalized_sum = s / b[n - 1];
    let outcome = if cauchy_tail >= tol {
        KroneckerOutcome::PremiseFailed
    } else if normalized_sum.abs() < tol {
        KroneckerOutcome::Pass
    } else {
        KroneckerOutcome::Fail
    };
    Ok(KroneckerReport {
        n,
        series_sum: last,
        cauchy_tail,
        normalized_sum,
        outcome,
    })
}

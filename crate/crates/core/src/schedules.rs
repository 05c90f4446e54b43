//! Moment-order schedules `a_n` and the 0/1 sparsity pattern `alpha_n`.
//!
//! The schedule is defined on the global index `n` of the mixed sequence.
//! Every formula is only meaningful for large `n`, so each form carries a
//! floor index below which `a_n` is clamped to its value at the floor.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "form")]
pub enum ScheduleForm {
    /// `a_n = 1 / sqrt(ln n)`.
    InvSqrtLog,
    /// `a_n = ln ln n / ln n`.
    LoglogOverLog,
    /// `a_n = a` for every `n`.
    Constant { a: f64 },
    /// `a_n = 1 / ln n`. Boundary case: `a_n ln n` stays at 1, so the growth
    /// condition fails. Only useful as a counterexample.
    InvLog,
}

impl ScheduleForm {
    pub fn default_floor_index(&self) -> u64 {
        match self {
            ScheduleForm::InvSqrtLog | ScheduleForm::InvLog => 3,
            ScheduleForm::LoglogOverLog => 16,
            ScheduleForm::Constant { .. } => 1,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, ScheduleForm::Constant { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSchedule {
    pub form: ScheduleForm,
    pub floor_index: u64,
}

impl MomentSchedule {
    pub fn new(form: ScheduleForm) -> Self {
        Self {
            floor_index: form.default_floor_index(),
            form,
        }
    }

    pub fn inv_sqrt_log() -> Self {
        Self::new(ScheduleForm::InvSqrtLog)
    }

    pub fn loglog_over_log() -> Self {
        Self::new(ScheduleForm::LoglogOverLog)
    }

    pub fn constant(a: f64) -> Self {
        Self::new(ScheduleForm::Constant { a })
    }

    pub fn with_floor_index(mut self, floor_index: u64) -> Self {
        self.floor_index = floor_index.max(1);
        self
    }

    /// `a_n` for an integer index `n >= 1`.
    #[inline]
    pub fn eval_a(&self, n: u64) -> f64 {
        self.eval_at(n as f64)
    }

    /// `a` at a real-valued index; used when insertion positions overflow
    /// 64-bit integers.
    pub fn eval_at(&self, x: f64) -> f64 {
        let x = x.max(self.floor_index as f64);
        match self.form {
            ScheduleForm::InvSqrtLog => 1.0 / x.ln().sqrt(),
            ScheduleForm::LoglogOverLog => {
                let l = x.ln();
                l.ln() / l
            }
            ScheduleForm::Constant { a } => a,
            ScheduleForm::InvLog => 1.0 / x.ln(),
        }
    }

    /// `p_n = 1 / a_n`.
    pub fn eval_p(&self, n: u64) -> f64 {
        1.0 / self.eval_a(n)
    }

    /// `n^{a_n}`.
    #[inline]
    pub fn growth(&self, n: u64) -> f64 {
        (n as f64).powf(self.eval_a(n))
    }

    /// Closed-form least integer `n` with `a_n ln n >= m`, or `None` when the
    /// form never gets there. Values beyond 2^53 are returned approximately.
    pub fn analytic_growth_index(&self, m: f64) -> Option<f64> {
        let candidate = match self.form {
            ScheduleForm::InvSqrtLog => (m.max(0.0) * m.max(0.0)).exp(),
            ScheduleForm::LoglogOverLog => m.exp().exp(),
            ScheduleForm::Constant { a } => (m / a).exp(),
            ScheduleForm::InvLog => {
                if m > 1.0 {
                    return None;
                }
                1.0
            }
        };
        if !candidate.is_finite() {
            return Some(f64::INFINITY);
        }
        let reaches = |n: u64| self.eval_a(n) * (n as f64).ln() >= m;
        if candidate <= (self.floor_index + 2) as f64 {
            return (1..=self.floor_index + 4)
                .find(|&n| reaches(n))
                .map(|n| n as f64)
                .or(Some(candidate.ceil()));
        }
        if candidate > 9.0e15 {
            return Some(candidate.ceil());
        }
        let mut n = candidate.ceil() as u64;
        while n > 1 && reaches(n - 1) {
            n -= 1;
        }
        while !reaches(n) {
            n += 1;
        }
        Some(n as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthCheck {
    pub target: f64,
    pub passes: bool,
    pub first_index_within_horizon: Option<u64>,
    pub analytic_index: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub horizon: u64,
    pub min_a: f64,
    pub max_a: f64,
    pub growth: GrowthCheck,
}

/// Checks `a_n in (0, 1]` and monotone nonincrease on `[1, horizon]`, then
/// locates the first index where `a_n ln n >= m`.
pub fn validate_schedule(
    schedule: &MomentSchedule,
    horizon: u64,
    m: f64,
) -> Result<ValidationReport> {
    if horizon < 3 {
        return Err(Error::InvalidArgument(format!(
            "validation horizon must be at least 3, got {horizon}"
        )));
    }
    let mut prev = f64::INFINITY;
    let mut prev_growth = f64::NEG_INFINITY;
    let mut min_a = f64::INFINITY;
    let mut max_a = f64::NEG_INFINITY;
    let mut first = None;
    let constant = schedule.form.is_constant();
    for n in 1..=horizon {
        let a = schedule.eval_a(n);
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::ScheduleRejected {
                index: n,
                reason: format!("a out of (0,1]: a_{n} = {a}"),
            });
        }
        if a > prev {
            return Err(Error::ScheduleRejected {
                index: n,
                reason: format!("a_n increases: a_{n} = {a} > a_{} = {prev}", n - 1),
            });
        }
        let g = a * (n as f64).ln();
        if !constant && g < prev_growth * (1.0 - 1e-12) {
            return Err(Error::ScheduleRejected {
                index: n,
                reason: format!("a_n ln n decreases at n = {n}"),
            });
        }
        if first.is_none() && g >= m {
            first = Some(n);
        }
        prev = a;
        prev_growth = g;
        min_a = min_a.min(a);
        max_a = max_a.max(a);
    }
    let analytic_index = if constant {
        None
    } else {
        schedule.analytic_growth_index(m)
    };
    let passes = constant || analytic_index.is_some();
    Ok(ValidationReport {
        horizon,
        min_a,
        max_a,
        growth: GrowthCheck {
            target: m,
            passes,
            first_index_within_horizon: first,
            analytic_index,
        },
    })
}

/// How `alpha_n` is generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum SparsityRule {
    /// Track `ceil(c * n^{a_n})` one insertion at a time.
    Auto { schedule: MomentSchedule, c: f64 },
    AllZero,
    AllOne,
    /// Explicit prefix; every index past the list has `alpha_n = 0`.
    Explicit { alpha: Vec<bool> },
}

/// The nonrandom 0/1 sequence deciding where heavy-tailed terms go.
///
/// Values are produced lazily by [`SparsityPattern::iter`]; hot loops use a
/// materialized [`AlphaTable`] instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityPattern {
    pub rule: SparsityRule,
    pub target_constant: f64,
}

impl SparsityPattern {
    pub fn all_zero(c: f64) -> Self {
        Self {
            rule: SparsityRule::AllZero,
            target_constant: c,
        }
    }

    pub fn all_one(c: f64) -> Self {
        Self {
            rule: SparsityRule::AllOne,
            target_constant: c,
        }
    }

    pub fn explicit(alpha: Vec<bool>, c: f64) -> Self {
        Self {
            rule: SparsityRule::Explicit { alpha },
            target_constant: c,
        }
    }

    pub fn iter(&self) -> AlphaIter<'_> {
        AlphaIter {
            rule: &self.rule,
            n: 0,
            phi: 0,
        }
    }

    pub fn materialize(&self, horizon: u64) -> AlphaTable {
        let alpha: Vec<bool> = self.iter().take(horizon as usize).map(|s| s.alpha).collect();
        AlphaTable { alpha }
    }
}

/// Builds the automatic pattern.
///
/// `alpha_1 = 1` iff `c >= 1`. For `n >= 2`, `alpha_n = 1` iff
/// `phi_{n-1} < ceil(c * n^{a_n})`, so `phi_n` never exceeds the ceiling and
/// `phi_n / n^{a_n} <= c + 1`.
pub fn build_sparsity(schedule: &MomentSchedule, c: f64) -> Result<SparsityPattern> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "sparsity constant must be positive, got {c}"
        )));
    }
    Ok(SparsityPattern {
        rule: SparsityRule::Auto {
            schedule: *schedule,
            c,
        },
        target_constant: c,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SparsityStep {
    pub n: u64,
    pub alpha: bool,
    pub phi: u64,
    pub psi: u64,
}

pub struct AlphaIter<'a> {
    rule: &'a SparsityRule,
    n: u64,
    phi: u64,
}

impl Iterator for AlphaIter<'_> {
    type Item = SparsityStep;

    fn next(&mut self) -> Option<SparsityStep> {
        self.n += 1;
        let n = self.n;
        let alpha = match self.rule {
            SparsityRule::AllZero => false,
            SparsityRule::AllOne => true,
            SparsityRule::Explicit { alpha } => alpha.get((n - 1) as usize).copied().unwrap_or(false),
            SparsityRule::Auto { schedule, c } => {
                if n == 1 {
                    *c >= 1.0
                } else {
                    let target = (c * schedule.growth(n)).ceil();
                    (self.phi as f64) < target
                }
            }
        };
        self.phi += alpha as u64;
        Some(SparsityStep {
            n,
            alpha,
            phi: self.phi,
            psi: n - self.phi,
        })
    }
}

/// `alpha_1..alpha_N` as a flat table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaTable {
    alpha: Vec<bool>,
}

impl AlphaTable {
    pub fn horizon(&self) -> u64 {
        self.alpha.len() as u64
    }

    /// `alpha_n`, 1-based.
    #[inline]
    pub fn get(&self, n: u64) -> bool {
        self.alpha[(n - 1) as usize]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.alpha
    }

    pub fn phi_at_horizon(&self) -> u64 {
        self.alpha.iter().filter(|&&a| a).count() as u64
    }
}

/// Summary of `phi_n / n^{a_n}` over `[1, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioScan {
    pub horizon: u64,
    pub sup: f64,
    pub argmax: u64,
    /// Max over `[1, horizon / 10]`; equal to `sup` when the running max was
    /// flat over the last decade.
    pub sup_before_last_decade: f64,
    pub phi_at_horizon: u64,
}

pub fn ratio_scan(pattern: &SparsityPattern, schedule: &MomentSchedule, horizon: u64) -> RatioScan {
    let cut = horizon / 10;
    let mut sup = 0.0f64;
    let mut argmax = 0;
    let mut before = 0.0f64;
    let mut phi = 0;
    for step in pattern.iter().take(horizon as usize) {
        let r = step.phi as f64 / schedule.growth(step.n);
        if r > sup {
            sup = r;
            argmax = step.n;
        }
        if step.n == cut {
            before = sup;
        }
        phi = step.phi;
    }
    RatioScan {
        horizon,
        sup,
        argmax,
        sup_before_last_decade: before,
        phi_at_horizon: phi,
    }
}

/// `max_{n <= horizon} phi_n / n^{a_n}`.
pub fn sparsity_ratio_sup(pattern: &SparsityPattern, schedule: &MomentSchedule, horizon: u64) -> f64 {
    ratio_scan(pattern, schedule, horizon).sup
}

/// Exponent `a` at the insertion position of each of the first `k_max`
/// heavy terms of the automatic pattern, solved on a real-valued index so
/// that positions past 2^64 remain usable.
pub fn insertion_exponents(schedule: &MomentSchedule, c: f64, k_max: usize) -> Vec<f64> {
    // Position of the k-th insertion: least n with c * n^{a_n} > k - 1.
    let g = |ln_x: f64| c * (schedule.eval_at(ln_x.exp()) * ln_x).exp();
    (1..=k_max)
        .map(|k| {
            let need = (k - 1) as f64;
            if g(0.0) > need {
                return schedule.eval_at(1.0);
            }
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            while g(hi) <= need {
                lo = hi;
                hi *= 2.0;
                if hi > 700.0 {
                    hi = 700.0;
                    break;
                }
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(mid) > need {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            schedule.eval_at(hi.exp().ceil())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn eval_a_examples() {
        let s = MomentSchedule::inv_sqrt_log();
        assert!((s.eval_a(55) - 0.499_542_305_144_631_2).abs() < 1e-12);
        assert!((s.eval_a(1_000_000) - 0.269_039_799_380_206_9).abs() < 1e-12);
        assert_eq!(MomentSchedule::constant(0.5).eval_a(1_000_000_000), 0.5);
        // clamped below the floor
        assert_eq!(s.eval_a(1), s.eval_a(3));
        assert_eq!(s.eval_a(2), s.eval_a(3));
        let l = MomentSchedule::loglog_over_log();
        assert_eq!(l.eval_a(1), l.eval_a(16));
    }

    #[test]
    fn inv_sqrt_log_reaches_three_at_8104() {
        let r = validate_schedule(&MomentSchedule::inv_sqrt_log(), 1_000_000, 3.0).unwrap();
        assert!(r.growth.passes);
        assert_eq!(r.growth.first_index_within_horizon, Some(8104));
        assert_eq!(r.growth.analytic_index, Some(8104.0));
        assert!(r.max_a <= 1.0 && r.min_a > 0.0);
    }

    #[test]
    fn constant_passes_trivially() {
        let r = validate_schedule(&MomentSchedule::constant(0.5), 1000, 3.0).unwrap();
        assert!(r.growth.passes);
    }

    #[test]
    fn inv_log_never_grows() {
        let r = validate_schedule(&MomentSchedule::new(ScheduleForm::InvLog), 100_000, 2.0).unwrap();
        assert!(!r.growth.passes);
        assert_eq!(r.growth.first_index_within_horizon, None);
        assert_eq!(r.growth.analytic_index, None);
    }

    #[test]
    fn out_of_range_constant_rejected() {
        let err = validate_schedule(&MomentSchedule::constant(1.5), 10, 3.0).unwrap_err();
        assert!(err.to_string().contains("a out of (0,1]"), "{err}");
        assert!(validate_schedule(&MomentSchedule::constant(0.0), 10, 3.0).is_err());
    }

    #[test]
    fn floor_below_turning_point_breaks_monotonicity() {
        // ln ln n / ln n increases up to n = e^e, so a floor at 3 is rejected.
        let s = MomentSchedule::loglog_over_log().with_floor_index(3);
        assert!(matches!(
            validate_schedule(&s, 100, 1.0),
            Err(Error::ScheduleRejected { .. })
        ));
    }

    #[test]
    fn loglog_growth_index_is_double_exponential() {
        let s = MomentSchedule::loglog_over_log();
        let r = validate_schedule(&s, 10_000, 2.0).unwrap();
        // ln ln n >= 2  <=>  n >= e^{e^2} = 1618.18
        assert_eq!(r.growth.first_index_within_horizon, Some(1619));
        assert_eq!(r.growth.analytic_index, Some(1619.0));
    }

    #[test]
    fn auto_pattern_at_one_million() {
        let s = MomentSchedule::inv_sqrt_log();
        let p = build_sparsity(&s, 1.0).unwrap();
        let scan = ratio_scan(&p, &s, 1_000_000);
        // e^{sqrt(ln 1e6)} = 41.1376
        assert!((scan.phi_at_horizon as f64 - 41.1376).abs() <= 1.0, "{scan:?}");
        assert!((0.5..=2.0).contains(&scan.sup), "{scan:?}");
    }

    #[test]
    fn all_one_ratio_at_ten_thousand() {
        let s = MomentSchedule::inv_sqrt_log();
        let r = sparsity_ratio_sup(&SparsityPattern::all_one(1.0), &s, 10_000);
        assert!((r - 480.8167).abs() < 1e-3, "{r}");
    }

    #[test]
    fn all_zero_ratio_is_zero() {
        let s = MomentSchedule::inv_sqrt_log();
        assert_eq!(sparsity_ratio_sup(&SparsityPattern::all_zero(1.0), &s, 1000), 0.0);
    }

    #[test]
    fn constant_one_is_dense() {
        let s = MomentSchedule::constant(1.0);
        let p = build_sparsity(&s, 1.0).unwrap();
        assert!(p.iter().take(1000).all(|st| st.alpha && st.phi == st.n));
        assert_eq!(sparsity_ratio_sup(&p, &s, 1000), 1.0);
    }

    #[test]
    fn alpha_one_convention() {
        let s = MomentSchedule::inv_sqrt_log();
        assert!(build_sparsity(&s, 1.0).unwrap().iter().next().unwrap().alpha);
        assert!(!build_sparsity(&s, 0.5).unwrap().iter().next().unwrap().alpha);
        assert!(build_sparsity(&s, 0.0).is_err());
    }

    #[test]
    fn explicit_pattern_pads_with_zero() {
        let p = SparsityPattern::explicit(vec![true, false, false, true], 1.0);
        let v: Vec<bool> = p.iter().take(6).map(|s| s.alpha).collect();
        assert_eq!(v, [true, false, false, true, false, false]);
        assert_eq!(p.materialize(6).phi_at_horizon(), 2);
    }

    #[test]
    fn insertion_exponents_match_direct_scan() {
        let s = MomentSchedule::inv_sqrt_log();
        let p = build_sparsity(&s, 1.0).unwrap();
        let direct: Vec<f64> = p
            .iter()
            .take(200_000)
            .filter(|st| st.alpha)
            .map(|st| s.eval_a(st.n))
            .collect();
        let solved = insertion_exponents(&s, 1.0, direct.len());
        for (k, (d, e)) in direct.iter().zip(&solved).enumerate() {
            assert!((d - e).abs() < 1e-9, "k = {}: {d} vs {e}", k + 1);
        }
        // far past u64 the solver still returns a sensible exponent: a ~ 1/ln k
        let far = insertion_exponents(&s, 1.0, 10_000);
        assert!((far[9_999] - 1.0 / (9_999f64).ln()).abs() < 1e-3);
    }

    fn any_schedule() -> impl Strategy<Value = MomentSchedule> {
        prop_oneof![
            Just(MomentSchedule::inv_sqrt_log()),
            Just(MomentSchedule::loglog_over_log()),
            (0.05f64..=1.0).prop_map(MomentSchedule::constant),
        ]
    }

    proptest! {
        #[test]
        fn pattern_bookkeeping(s in any_schedule(), c in 0.1f64..5.0, horizon in 1u64..3000) {
            let p = build_sparsity(&s, c).unwrap();
            let mut prev_phi = 0;
            for st in p.iter().take(horizon as usize) {
                prop_assert_eq!(st.phi + st.psi, st.n);
                prop_assert_eq!(st.phi - prev_phi, st.alpha as u64);
                prev_phi = st.phi;
            }
            prop_assert!(sparsity_ratio_sup(&p, &s, horizon) <= c + 1.0);
        }

        #[test]
        fn eval_a_nonincreasing(s in any_schedule(), mut grid in prop::collection::vec(1u64..1_000_000_000, 2..50)) {
            grid.sort_unstable();
            for w in grid.windows(2) {
                prop_assert!(s.eval_a(w[1]) <= s.eval_a(w[0]));
                prop_assert!(s.eval_a(w[0]) > 0.0 && s.eval_a(w[0]) <= 1.0);
            }
        }
    }
}

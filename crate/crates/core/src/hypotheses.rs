//! Checks for each assumption of the limit theorem on a concrete setup.

use serde::{Deserialize, Serialize};

pub use crate::generators::CheckStatus;
use crate::generators::{TailEnvelope, XFamily};
use crate::quadrature::{adaptive_simpson, integrate};
use crate::schedules::{ratio_scan, validate_schedule, MomentSchedule, SparsityPattern};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HypothesisId {
    Centering,
    CesaroTail,
    VMoment,
    Envelope,
    Infrequency,
    ALnN,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisEntry {
    pub id: HypothesisId,
    pub status: CheckStatus,
    #[serde(with = "crate::serde_float")]
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub entries: Vec<HypothesisEntry>,
}

impl HypothesisReport {
    pub fn get(&self, id: HypothesisId) -> Option<&HypothesisEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.status == CheckStatus::Pass)
    }
}

/// Pass/fail knobs. Nothing in this module hard-codes a threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HypothesisThresholds {
    pub n0: u64,
    /// `M` in the check `a_n ln n >= M`.
    pub growth_target: f64,
    /// Infrequency passes when `sup phi_n / n^{a_n} <= factor * c`.
    pub infrequency_factor: f64,
    /// Closed-form tail remainders above this count as divergent.
    pub divergence_budget: f64,
    pub quadrature_tol: f64,
}

impl Default for HypothesisThresholds {
    fn default() -> Self {
        Self {
            n0: 1,
            growth_target: 3.0,
            infrequency_factor: 10.0,
            divergence_budget: 1e12,
            quadrature_tol: 1e-9,
        }
    }
}

/// `C(n0)` for an identically distributed family.
///
/// With a common tail `P(|X| > x)` the Cesaro sup over `n >= n0` of
/// `((n - n0 + 1) / n) P(|X| > x)` is attained in the limit and equals the
/// tail itself, so `C(n0) = E|X|` for every `n0`. The tail is integrated by
/// adaptive Simpson up to the last kink, plus a closed-form remainder.
pub fn cesaro_tail_constant(family: &XFamily, n0: u64, tol: f64, budget: f64) -> Result<f64> {
    if n0 == 0 {
        return Err(Error::InvalidArgument("n0 must be at least 1".into()));
    }
    let bps = family.tail_breakpoints();
    let cut = bps.iter().copied().fold(0.0, f64::max);
    let remainder = family
        .tail_remainder(cut)
        .ok_or_else(|| Error::Divergent(format!("{family:?}: tail of |X| is not integrable")))?;
    if !(remainder <= budget) {
        return Err(Error::Divergent(format!(
            "{family:?}: tail remainder {remainder} exceeds budget {budget}"
        )));
    }
    let body = integrate(|x| family.tail(x), 0.0, cut, &bps, tol * 0.1, 0.0);
    Ok(body + remainder)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeConstant {
    pub analytic: f64,
    pub quadrature: f64,
}

impl EnvelopeConstant {
    pub fn discrepancy(&self) -> f64 {
        (self.analytic - self.quadrature).abs()
    }
}

/// `C_G`, analytic and by quadrature.
///
/// Exponential: integrate to `T = 30` where `G(T) < 1e-12`. Pareto:
/// integrate to `T = 1e4` and add the closed-form remainder.
pub fn envelope_constant(envelope: &TailEnvelope, tol: f64) -> EnvelopeConstant {
    let (t, rem) = match envelope {
        TailEnvelope::Exp => (30.0, 0.0),
        TailEnvelope::Pareto { .. } => (1e4, envelope.tail_integral(1e4)),
    };
    let quad = integrate(|s| envelope.gbar(s), 0.0, t, &envelope.breakpoints(), tol * 0.1, 0.0) + rem;
    EnvelopeConstant {
        analytic: envelope.c_g(),
        quadrature: quad,
    }
}

/// Sampled `G` on a log grid of `points` values over `[1e-3, 1e6]`; returns
/// the first grid pair that increases, if any.
pub fn envelope_monotonicity_audit(envelope: &TailEnvelope, points: usize) -> Option<(f64, f64)> {
    let (lo, hi) = (1e-3f64.ln(), 1e6f64.ln());
    let grid: Vec<f64> = (0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp())
        .collect();
    grid.windows(2)
        .find(|w| envelope.gbar(w[1]) > envelope.gbar(w[0]))
        .map(|w| (w[0], w[1]))
}

pub fn v_moment_check(envelope: &TailEnvelope, tol: f64) -> HypothesisEntry {
    // For the extremal law, E V = int_0^inf P(V > t) dt = int G = C_G.
    let c = envelope_constant(envelope, tol);
    let finite = c.quadrature.is_finite();
    HypothesisEntry {
        id: HypothesisId::VMoment,
        status: if finite { CheckStatus::Pass } else { CheckStatus::Fail },
        value: c.analytic,
        detail: format!("E V = int G = {:.12} (quadrature {:.12})", c.analytic, c.quadrature),
    }
}

/// Empirical median of `V` over `n` draws against the analytic median.
pub fn v_median_check(envelope: &TailEnvelope, n: usize, stream: &mut crate::rng::UniformStream) -> (f64, f64) {
    let mut v: Vec<f64> = (0..n).map(|_| envelope.v_from_uniform(stream.next_uniform())).collect();
    let mid = n / 2;
    let (_, m, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    (*m, envelope.median())
}

pub fn infrequency_check(
    pattern: &SparsityPattern,
    schedule: &MomentSchedule,
    horizon: u64,
    threshold: f64,
) -> HypothesisEntry {
    let scan = ratio_scan(pattern, schedule, horizon);
    let flat = scan.sup_before_last_decade >= scan.sup;
    let bounded = scan.sup <= threshold;
    HypothesisEntry {
        id: HypothesisId::Infrequency,
        status: if flat || bounded {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        value: scan.sup,
        detail: format!(
            "sup phi_n/n^a_n over [1,{horizon}] = {:.6} at n = {}; sup over first 90% = {:.6}; threshold {threshold}",
            scan.sup, scan.argmax, scan.sup_before_last_decade
        ),
    }
}

/// Everything the hypothesis checks need to know about a setup.
#[derive(Debug, Clone, Copy)]
pub struct HypothesisInputs<'a> {
    pub family: &'a XFamily,
    pub envelope: &'a TailEnvelope,
    pub schedule: &'a MomentSchedule,
    pub pattern: &'a SparsityPattern,
    pub horizon: u64,
}

pub fn check_hypotheses(inputs: HypothesisInputs<'_>, th: &HypothesisThresholds) -> HypothesisReport {
    let HypothesisInputs {
        family,
        envelope,
        schedule,
        pattern,
        horizon,
    } = inputs;
    let mut entries = Vec::with_capacity(6);

    entries.push(if family.has_finite_mean() {
        HypothesisEntry {
            id: HypothesisId::Centering,
            status: CheckStatus::Pass,
            value: 0.0,
            detail: format!("{family:?} is centered by construction"),
        }
    } else {
        HypothesisEntry {
            id: HypothesisId::Centering,
            status: CheckStatus::Fail,
            value: f64::INFINITY,
            detail: format!("{family:?} has infinite mean"),
        }
    });

    entries.push(
        match cesaro_tail_constant(family, th.n0, th.quadrature_tol, th.divergence_budget) {
            Ok(c) => HypothesisEntry {
                id: HypothesisId::CesaroTail,
                status: CheckStatus::Pass,
                value: c,
                detail: format!("C({}) = {c:.12}", th.n0),
            },
            Err(e) => HypothesisEntry {
                id: HypothesisId::CesaroTail,
                status: CheckStatus::Fail,
                value: f64::INFINITY,
                detail: format!("DIVERGENT: {e}"),
            },
        },
    );

    entries.push(v_moment_check(envelope, th.quadrature_tol));

    let ec = envelope_constant(envelope, th.quadrature_tol);
    let audit = envelope_monotonicity_audit(envelope, 1000);
    let env_ok = envelope.validate().is_ok() && ec.discrepancy() <= th.quadrature_tol && audit.is_none();
    entries.push(HypothesisEntry {
        id: HypothesisId::Envelope,
        status: if env_ok { CheckStatus::Pass } else { CheckStatus::Fail },
        value: ec.analytic,
        detail: format!(
            "C_G = {} (quadrature {:.12}, |diff| = {:.3e}); monotone on 1000-point log grid: {}",
            ec.analytic,
            ec.quadrature,
            ec.discrepancy(),
            audit.is_none()
        ),
    });

    entries.push(infrequency_check(
        pattern,
        schedule,
        horizon,
        th.infrequency_factor * pattern.target_constant,
    ));

    entries.push(match validate_schedule(schedule, horizon.max(3), th.growth_target) {
        Ok(r) => HypothesisEntry {
            id: HypothesisId::ALnN,
            status: if r.growth.passes {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            value: r.growth.analytic_index.unwrap_or(f64::INFINITY),
            detail: if schedule.form.is_constant() {
                "constant schedule: growth condition not needed".to_string()
            } else {
                format!(
                    "a_n ln n >= {} first at n = {:?} within horizon, analytically at n = {:?}",
                    th.growth_target, r.growth.first_index_within_horizon, r.growth.analytic_index
                )
            },
        },
        Err(e) => HypothesisEntry {
            id: HypothesisId::ALnN,
            status: CheckStatus::Fail,
            value: f64::NAN,
            detail: e.to_string(),
        },
    });

    HypothesisReport { entries }
}

/// Reference integral of a tail by plain adaptive Simpson, no splitting.
/// Used only to cross-check [`cesaro_tail_constant`] on bounded supports.
pub fn plain_tail_integral(family: &XFamily, upper: f64, tol: f64) -> f64 {
    adaptive_simpson(|x| family.tail(x), 0.0, upper, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedules::build_sparsity;

    const TOL: f64 = 1e-9;

    #[test]
    fn cesaro_uniform_is_half() {
        let c = cesaro_tail_constant(&XFamily::IidUniform { half_width: 1.0 }, 1, TOL, 1e12).unwrap();
        assert!((c - 0.5).abs() <= 1e-9, "{c}");
        // n0 does not matter for identically distributed families
        let c5 = cesaro_tail_constant(&XFamily::IidUniform { half_width: 1.0 }, 5, TOL, 1e12).unwrap();
        assert_eq!(c, c5);
    }

    #[test]
    fn cesaro_equals_abs_mean_for_every_builtin() {
        for fam in [
            XFamily::IidUniform { half_width: 2.5 },
            XFamily::IidShiftedExp { rate: 1.0 },
            XFamily::IidShiftedExp { rate: 3.0 },
            XFamily::ParityRademacher { block_bits: 4 },
            XFamily::IidParetoCentered { shape: 2.0 },
            XFamily::IidParetoCentered { shape: 3.5 },
            XFamily::IidParetoCentered { shape: 1.2 },
        ] {
            let c = cesaro_tail_constant(&fam, 1, TOL, 1e12).unwrap();
            let m = fam.abs_mean().unwrap();
            assert!((c - m).abs() <= 1e-9, "{fam:?}: {c} vs {m}");
        }
    }

    #[test]
    fn cesaro_parity_is_one() {
        let c = cesaro_tail_constant(&XFamily::ParityRademacher { block_bits: 2 }, 1, TOL, 1e12).unwrap();
        assert!((c - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn cesaro_infinite_mean_diverges() {
        let r = cesaro_tail_constant(&XFamily::IidParetoCentered { shape: 1.0 }, 1, TOL, 1e12);
        assert!(matches!(r, Err(Error::Divergent(_))));
        // shape just above one: finite but enormous remainder trips the budget
        let r = cesaro_tail_constant(&XFamily::IidParetoCentered { shape: 1.0 + 1e-14 }, 1, TOL, 1e12);
        assert!(matches!(r, Err(Error::Divergent(_))));
    }

    #[test]
    fn plain_simpson_agrees_on_bounded_support() {
        let fam = XFamily::IidUniform { half_width: 1.0 };
        assert!((plain_tail_integral(&fam, 1.0, 1e-12) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn envelope_constants_match_analytic() {
        for (env, want) in [
            (TailEnvelope::Exp, 1.0),
            (TailEnvelope::Pareto { gamma: 2.0 }, 2.0),
            (TailEnvelope::Pareto { gamma: 1.5 }, 3.0),
            (TailEnvelope::Pareto { gamma: 4.0 }, 4.0 / 3.0),
        ] {
            let c = envelope_constant(&env, TOL);
            assert_eq!(c.analytic, want);
            assert!(c.discrepancy() <= 1e-9, "{env:?}: {c:?}");
            assert!(envelope_monotonicity_audit(&env, 1000).is_none());
        }
    }

    #[test]
    fn v_moments() {
        assert_eq!(v_moment_check(&TailEnvelope::Exp, TOL).value, 1.0);
        let e = v_moment_check(&TailEnvelope::Pareto { gamma: 2.0 }, TOL);
        assert_eq!(e.value, 2.0);
        assert_eq!(e.status, CheckStatus::Pass);
    }

    #[test]
    fn pareto_v_median() {
        let mut s = crate::rng::derive_stream(crate::rng::StreamKey::new(5, 0, crate::rng::Channel::Y));
        let (emp, exact) = v_median_check(&TailEnvelope::Pareto { gamma: 2.0 }, 1_000_000, &mut s);
        assert!((exact - 2f64.sqrt()).abs() < 1e-15);
        assert!((emp - exact).abs() < 0.01, "{emp}");
    }

    #[test]
    fn infrequency_examples() {
        let s = MomentSchedule::inv_sqrt_log();
        let auto = build_sparsity(&s, 1.0).unwrap();
        let e = infrequency_check(&auto, &s, 100_000, 10.0);
        assert_eq!(e.status, CheckStatus::Pass);
        assert!(e.value <= 2.0);

        let dense = SparsityPattern::all_one(1.0);
        let e = infrequency_check(&dense, &s, 100_000, 10.0);
        assert_eq!(e.status, CheckStatus::Fail);
        // witness grows like n^{1 - a_n}
        let expected = 1e5f64.powf(1.0 - s.eval_a(100_000));
        assert!((e.value - expected).abs() < 1e-6 * expected);

        let e = infrequency_check(&SparsityPattern::all_zero(1.0), &s, 100_000, 10.0);
        assert_eq!(e.status, CheckStatus::Pass);
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn full_report_theorem_setup() {
        let s = MomentSchedule::inv_sqrt_log();
        let pattern = build_sparsity(&s, 1.0).unwrap();
        let fam = XFamily::ParityRademacher { block_bits: 4 };
        let env = TailEnvelope::Pareto { gamma: 2.0 };
        let report = check_hypotheses(
            HypothesisInputs {
                family: &fam,
                envelope: &env,
                schedule: &s,
                pattern: &pattern,
                horizon: 100_000,
            },
            &HypothesisThresholds::default(),
        );
        assert_eq!(report.entries.len(), 6);
        assert!(report.all_pass(), "{report:#?}");
        assert_eq!(report.get(HypothesisId::ALnN).unwrap().value, 8104.0);
    }

    #[test]
    fn full_report_flags_violations() {
        let s = MomentSchedule::inv_sqrt_log();
        let fam = XFamily::IidParetoCentered { shape: 1.0 };
        let env = TailEnvelope::Pareto { gamma: 2.0 };
        let dense = SparsityPattern::all_one(1.0);
        let report = check_hypotheses(
            HypothesisInputs {
                family: &fam,
                envelope: &env,
                schedule: &s,
                pattern: &dense,
                horizon: 10_000,
            },
            &HypothesisThresholds::default(),
        );
        assert_eq!(report.get(HypothesisId::Centering).unwrap().status, CheckStatus::Fail);
        assert_eq!(report.get(HypothesisId::CesaroTail).unwrap().status, CheckStatus::Fail);
        assert_eq!(report.get(HypothesisId::Infrequency).unwrap().status, CheckStatus::Fail);
        assert_eq!(report.get(HypothesisId::Envelope).unwrap().status, CheckStatus::Pass);
    }
}

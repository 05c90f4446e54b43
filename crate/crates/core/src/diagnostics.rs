//! Ensemble convergence diagnostics.
//!
//! Almost-sure convergence of `S_n / n` is a statement about path-wise tail
//! suprema. The finite-horizon stand-in is the suffix sup
//! `D(n) = max_{n <= m <= N} |S_m / m|`, summarized across an ensemble of
//! independently seeded paths.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::generators::{DependenceMode, TailEnvelope, XFamily};
use crate::mixture::{run_path, MixedSequenceConfig};
use crate::schedules::{MomentSchedule, SparsityPattern};
use crate::{Error, Result};

pub const DEFAULT_EPS: [f64; 5] = [0.2, 0.1, 0.05, 0.02, 0.01];
pub const DEFAULT_CHECKPOINTS: [u64; 5] = [1_000, 10_000, 100_000, 500_000, 1_000_000];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSummary {
    pub path_index: u64,
    pub checkpoints: Vec<u64>,
    /// `S_n / n` at each checkpoint.
    pub averages: Vec<f64>,
    /// `D(n)` at each checkpoint.
    pub deviations: Vec<f64>,
    pub final_average: f64,
    /// Heavy terms inserted up to the horizon.
    pub phi: u64,
    pub max_abs_z: f64,
}

/// Backward running max of `buffer` (1-based), read off at `checkpoints`.
pub fn suffix_sup(buffer: &[f64], checkpoints: &[u64]) -> Vec<f64> {
    let mut out = vec![0.0; checkpoints.len()];
    let mut running = f64::NEG_INFINITY;
    let mut cp = checkpoints.len();
    for m in (1..=buffer.len()).rev() {
        running = running.max(buffer[m - 1]);
        while cp > 0 && checkpoints[cp - 1] as usize == m {
            cp -= 1;
            out[cp] = running;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Convergent,
    Inconclusive,
    Divergent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointStats {
    pub checkpoint: u64,
    #[serde(with = "crate::serde_float")]
    pub median: f64,
    #[serde(with = "crate::serde_float")]
    pub q90: f64,
    #[serde(with = "crate::serde_float")]
    pub q99: f64,
    /// Fraction of paths with `D > eps`, one entry per `eps_list` value.
    pub frac_gt_eps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub n_paths: usize,
    pub horizon: u64,
    pub eps_list: Vec<f64>,
    pub eps_target: f64,
    pub fraction_target: f64,
    pub rows: Vec<CheckpointStats>,
    /// Fraction of paths with `D > eps_target` at the last checkpoint.
    pub final_fraction_above_target: f64,
    pub verdict: Verdict,
    /// Sorted `D` values per checkpoint.
    #[serde(skip)]
    pub sorted_deviations: Vec<Vec<f64>>,
}

/// Nearest-rank quantile of sorted data: the `ceil(q n)`-th order statistic.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

fn fraction_above(sorted: &[f64], eps: f64) -> f64 {
    let above = sorted.len() - sorted.partition_point(|&d| d <= eps);
    above as f64 / sorted.len() as f64
}

/// Reduces path summaries in path order into per-checkpoint statistics.
pub fn aggregate(
    summaries: &[PathSummary],
    horizon: u64,
    eps_list: &[f64],
    eps_target: f64,
    fraction_target: f64,
) -> Result<ConvergenceReport> {
    let first = summaries
        .first()
        .ok_or_else(|| Error::InvalidArgument("no paths to aggregate".into()))?;
    let checkpoints = &first.checkpoints;
    let mut sorted_deviations = Vec::with_capacity(checkpoints.len());
    let mut rows = Vec::with_capacity(checkpoints.len());
    for (j, &cp) in checkpoints.iter().enumerate() {
        let mut d: Vec<f64> = summaries.iter().map(|s| s.deviations[j]).collect();
        d.sort_by(f64::total_cmp);
        rows.push(CheckpointStats {
            checkpoint: cp,
            median: quantile(&d, 0.5),
            q90: quantile(&d, 0.9),
            q99: quantile(&d, 0.99),
            frac_gt_eps: eps_list.iter().map(|&e| fraction_above(&d, e)).collect(),
        });
        sorted_deviations.push(d);
    }
    let final_fraction_above_target = sorted_deviations
        .last()
        .map(|d| fraction_above(d, eps_target))
        .unwrap_or(1.0);
    let mut report = ConvergenceReport {
        n_paths: summaries.len(),
        horizon,
        eps_list: eps_list.to_vec(),
        eps_target,
        fraction_target,
        rows,
        final_fraction_above_target,
        verdict: Verdict::Inconclusive,
        sorted_deviations,
    };
    report.verdict = verdict(&report, eps_target, fraction_target);
    Ok(report)
}

/// CONVERGENT when few paths exceed `eps_target` at the last checkpoint and
/// the median of `D` falls strictly over the last three checkpoints (a
/// median already at zero counts as falling). DIVERGENT when the median
/// rises strictly over those checkpoints.
pub fn verdict(report: &ConvergenceReport, eps_target: f64, fraction_target: f64) -> Verdict {
    let k = report.rows.len();
    if k == 0 {
        return Verdict::Inconclusive;
    }
    let tail: Vec<f64> = report.rows[k.saturating_sub(3)..].iter().map(|r| r.median).collect();
    let frac = report
        .sorted_deviations
        .last()
        .map(|d| fraction_above(d, eps_target))
        .unwrap_or(report.final_fraction_above_target);
    let decreasing = tail.windows(2).all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0));
    let increasing = tail.len() >= 2 && tail.windows(2).all(|w| w[1] > w[0]);
    if frac < fraction_target && decreasing && (tail.len() >= 2 || tail[0] == 0.0) {
        Verdict::Convergent
    } else if increasing {
        Verdict::Divergent
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleOptions {
    pub n_paths: usize,
    pub checkpoints: Vec<u64>,
    pub eps_list: Vec<f64>,
    pub eps_target: f64,
    pub fraction_target: f64,
    /// Worker cap; `None` uses the global pool. Never changes results.
    pub threads: Option<usize>,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self {
            n_paths: 100,
            checkpoints: DEFAULT_CHECKPOINTS.to_vec(),
            eps_list: DEFAULT_EPS.to_vec(),
            eps_target: 0.05,
            fraction_target: 0.10,
            threads: None,
        }
    }
}

/// Runs `n_paths` paths (path `i` uses streams keyed by `(seed, i)`) and
/// aggregates them in path order.
pub fn run_ensemble_with_paths(
    config: &MixedSequenceConfig,
    opts: &EnsembleOptions,
) -> Result<(ConvergenceReport, Vec<PathSummary>)> {
    if opts.n_paths < 2 {
        return Err(Error::InvalidArgument(format!(
            "an ensemble needs at least 2 paths, got {}",
            opts.n_paths
        )));
    }
    config.validate()?;
    let alpha = config.alpha_table();
    let work = || -> Result<Vec<PathSummary>> {
        (0..opts.n_paths as u64)
            .into_par_iter()
            .map(|i| run_path(config, &alpha, &opts.checkpoints, i))
            .collect()
    };
    let summaries = match opts.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let report = aggregate(
        &summaries,
        config.horizon,
        &opts.eps_list,
        opts.eps_target,
        opts.fraction_target,
    )?;
    Ok((report, summaries))
}

pub fn run_ensemble(config: &MixedSequenceConfig, opts: &EnsembleOptions) -> Result<ConvergenceReport> {
    run_ensemble_with_paths(config, opts).map(|(r, _)| r)
}

/// The pairwise-independent part alone: `alpha_n = 0` throughout, so the
/// running average is `(1/n) sum_{k <= n} X_k`.
pub fn x_part_experiment(
    family: XFamily,
    horizon: u64,
    seed: u64,
    opts: &EnsembleOptions,
) -> Result<ConvergenceReport> {
    let config = MixedSequenceConfig::new(
        family,
        TailEnvelope::Exp,
        DependenceMode::Independent,
        MomentSchedule::constant(1.0),
        SparsityPattern::all_zero(1.0),
        horizon,
        seed,
    );
    run_ensemble(&config, opts)
}

/// `|sum of a fixed prefix| / n` for each `n`: a fixed finite prefix washes
/// out of the average at rate `1/n`.
pub fn prefix_drop(prefix: &[f64], ns: &[u64]) -> Vec<f64> {
    let s: f64 = prefix.iter().sum();
    ns.iter().map(|&n| s.abs() / n as f64).collect()
}

/// `checkpoints` restricted to `[1, horizon]`, with the horizon appended.
pub fn clip_checkpoints(checkpoints: &[u64], horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = checkpoints.iter().copied().filter(|&c| c >= 1 && c < horizon).collect();
    out.sort_unstable();
    out.dedup();
    out.push(horizon);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn suffix_sup_examples() {
        assert_eq!(suffix_sup(&[3.0, 1.0, 2.0], &[1, 2, 3]), vec![3.0, 2.0, 2.0]);
        assert_eq!(suffix_sup(&[0.7; 6], &[1, 4, 6]), vec![0.7; 3]);
        let dec = [5.0, 4.0, 3.0, 2.0, 1.0];
        assert_eq!(suffix_sup(&dec, &[1, 2, 3, 4, 5]), dec.to_vec());
    }

    fn report_with_medians(medians: &[f64]) -> ConvergenceReport {
        let summaries: Vec<PathSummary> = (0..3)
            .map(|i| PathSummary {
                path_index: i,
                checkpoints: (1..=medians.len() as u64).collect(),
                averages: medians.to_vec(),
                deviations: medians.to_vec(),
                final_average: 0.0,
                phi: 0,
                max_abs_z: 0.0,
            })
            .collect();
        aggregate(&summaries, medians.len() as u64, &DEFAULT_EPS, 0.05, 0.1).unwrap()
    }

    #[test]
    fn verdict_examples() {
        assert_eq!(report_with_medians(&[0.0, 0.0, 0.0]).verdict, Verdict::Convergent);
        assert_eq!(report_with_medians(&[0.1, 0.2, 0.4, 0.8]).verdict, Verdict::Divergent);
        assert_eq!(report_with_medians(&[0.3, 0.3, 0.3]).verdict, Verdict::Inconclusive);
        assert_eq!(report_with_medians(&[0.3, 0.03, 0.02, 0.01]).verdict, Verdict::Convergent);
        // falling but still above target
        assert_eq!(report_with_medians(&[0.9, 0.8, 0.7]).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn two_path_quantiles_are_order_statistics() {
        let summaries: Vec<PathSummary> = [0.4, 0.1]
            .iter()
            .enumerate()
            .map(|(i, &d)| PathSummary {
                path_index: i as u64,
                checkpoints: vec![10],
                averages: vec![d],
                deviations: vec![d],
                final_average: d,
                phi: 0,
                max_abs_z: d,
            })
            .collect();
        let r = aggregate(&summaries, 10, &[0.2], 0.05, 0.1).unwrap();
        assert_eq!(r.rows[0].median, 0.1);
        assert_eq!(r.rows[0].q90, 0.4);
        assert_eq!(r.rows[0].q99, 0.4);
        assert_eq!(r.rows[0].frac_gt_eps, vec![0.5]);
    }

    #[test]
    fn tiny_ensemble() {
        let cfg = MixedSequenceConfig::new(
            XFamily::IidUniform { half_width: 1.0 },
            TailEnvelope::Exp,
            DependenceMode::Independent,
            MomentSchedule::inv_sqrt_log(),
            SparsityPattern::all_zero(1.0),
            10,
            0,
        );
        let opts = EnsembleOptions {
            n_paths: 2,
            checkpoints: vec![5, 10],
            ..Default::default()
        };
        let (r, paths) = run_ensemble_with_paths(&cfg, &opts).unwrap();
        assert_eq!(r.n_paths, 2);
        let mut d: Vec<f64> = paths.iter().map(|p| p.deviations[1]).collect();
        d.sort_by(f64::total_cmp);
        assert_eq!(r.rows[1].median, d[0]);
        assert_eq!(r.rows[1].q99, d[1]);
        assert!(run_ensemble(&cfg, &EnsembleOptions { n_paths: 1, ..opts }).is_err());
    }

    #[test]
    fn uniform_x_median_small() {
        let opts = EnsembleOptions {
            n_paths: 100,
            checkpoints: vec![10_000, 50_000, 100_000],
            ..Default::default()
        };
        let r = x_part_experiment(XFamily::IidUniform { half_width: 1.0 }, 100_000, 1, &opts).unwrap();
        assert!(r.rows[1].median < 0.01, "{:?}", r.rows[1]);
    }

    #[test]
    fn prefix_washes_out() {
        let prefix: Vec<f64> = (0..99).map(|k| if k % 3 == 0 { 1.0 } else { -0.25 }).collect();
        let v = prefix_drop(&prefix, &[100, 1_000, 10_000]);
        assert!((v[0] - 10.0 * v[1]).abs() < 1e-15 && (v[1] - 10.0 * v[2]).abs() < 1e-15);
    }

    #[test]
    fn clip() {
        assert_eq!(clip_checkpoints(&DEFAULT_CHECKPOINTS, 100_000), vec![1_000, 10_000, 100_000]);
        assert_eq!(clip_checkpoints(&[5, 1, 5], 3), vec![1, 3]);
    }

    proptest! {
        #[test]
        fn suffix_sup_is_nonincreasing_and_dominates(buf in prop::collection::vec(0.0f64..10.0, 1..200)) {
            let cps: Vec<u64> = (1..=buf.len() as u64).collect();
            let d = suffix_sup(&buf, &cps);
            for w in d.windows(2) {
                prop_assert!(w[1] <= w[0]);
            }
            let last = *buf.last().unwrap();
            for (i, &di) in d.iter().enumerate() {
                prop_assert!(di >= last);
                prop_assert!(di >= buf[i]);
                let brute = buf[i..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
                prop_assert_eq!(di, brute);
            }
        }
    }
}

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use slln_lab::calculus::{build_block_schedule, kronecker_check, weighted_series_ensemble, weighted_y_series, KroneckerOutcome};
use slln_lab::diagnostics::{ConvergenceReport, Verdict};
use slln_lab::experiment::{calculus_table, CalculusRow, CalculusSettings, RunReport, SectionStatus};
use slln_lab::generators::{sample_x_block, DependenceMode, TailEnvelope, XFamily};
use slln_lab::hypotheses::{cesaro_tail_constant, envelope_constant};
use slln_lab::rng::{derive_stream, Channel, StreamKey};
use slln_lab::schedules::MomentSchedule;
use slln_lab::Error;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

struct CliRun {
    exit_ok: bool,
    report: RunReport,
    deviations: Vec<u8>,
}

fn slln(args: &[&str], out: &Path) -> Result<CliRun, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_slln"))
        .arg("run")
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    let text = std::fs::read_to_string(out.join("report.json"))
        .map_err(|e| format!("{e}; stderr: {}", String::from_utf8_lossy(&status.stderr)))?;
    let report: RunReport = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let deviations = std::fs::read(out.join("deviations.csv")).unwrap_or_default();
    Ok(CliRun {
        exit_ok: status.status.success(),
        report,
        deviations,
    })
}

fn timed(budget: Duration, o: Outcome, elapsed: Duration) -> Outcome {
    let within = elapsed < budget;
    outcome(
        o.pass && within,
        format!("{}; {:.2}s (budget {:.0}s)", o.detail, elapsed.as_secs_f64(), budget.as_secs_f64()),
    )
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let rows: Vec<CalculusRow> = calculus_table(&CalculusSettings::default());
    let elapsed = t.elapsed();
    let assertions = rows.len() * CalculusRow::ASSERTIONS;
    let holding: usize = rows
        .iter()
        .map(|r| [r.slack_a, r.slack_b, r.slack_combined].iter().filter(|&&s| s >= 0.0).count())
        .sum();
    let min_slack = rows
        .iter()
        .flat_map(|r| [r.slack_a, r.slack_b, r.slack_combined])
        .fold(f64::INFINITY, f64::min);
    let ok = assertions == 45 && holding == 45 && rows.iter().all(|r| r.status == SectionStatus::Pass);
    timed(
        Duration::from_secs(10),
        outcome(ok, format!("{holding}/{assertions} bound assertions hold, min slack {min_slack:.4}")),
        elapsed,
    )
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let cesaro = cesaro_tail_constant(&XFamily::IidUniform { half_width: 1.0 }, 1, 1e-12, 1e12);
    let exp = envelope_constant(&TailEnvelope::Exp, 1e-12);
    let par = envelope_constant(&TailEnvelope::Pareto { gamma: 2.0 }, 1e-12);
    let div = cesaro_tail_constant(&XFamily::IidParetoCentered { shape: 1.0 }, 1, 1e-12, 1e12);
    let elapsed = t.elapsed();
    let c_ok = matches!(cesaro, Ok(c) if (c - 0.5).abs() <= 1e-9);
    let e_ok = (exp.quadrature - 1.0).abs() <= 1e-9 && exp.analytic == 1.0;
    let p_ok = (par.quadrature - 2.0).abs() <= 1e-9 && par.analytic == 2.0;
    let d_ok = matches!(div, Err(Error::Divergent(_)));
    timed(
        Duration::from_secs(1),
        outcome(
            c_ok && e_ok && p_ok && d_ok,
            format!(
                "C(1) uniform = {:.12}, C_G exp = {:.12}, C_G pareto(2) = {:.12}, pareto(1) X divergent: {d_ok}",
                cesaro.as_ref().copied().unwrap_or(f64::NAN),
                exp.quadrature,
                par.quadrature
            ),
        ),
        elapsed,
    )
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let blocks = 100_000;
    let mut stream = derive_stream(StreamKey::new(0, 0, Channel::X));
    let x = sample_x_block(&XFamily::ParityRademacher { block_bits: 2 }, 3 * blocks, &mut stream);
    let tol = 4.0 * (0.25f64 * 0.75 / blocks as f64).sqrt();
    let mut worst = 0.0f64;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let hits = x.chunks_exact(3).filter(|b| b[i] == si && b[j] == sj).count();
            worst = worst.max((hits as f64 / blocks as f64 - 0.25).abs());
        }
    }
    let forbidden = x.chunks_exact(3).filter(|b| b[0] == 1.0 && b[1] == 1.0 && b[2] == -1.0).count();
    let elapsed = t.elapsed();
    timed(
        Duration::from_secs(1),
        outcome(
            worst <= tol && forbidden == 0,
            format!("max |cell - 0.25| = {worst:.5} (tol {tol:.5}), (1,1,-1) seen {forbidden} times"),
        ),
        elapsed,
    )
}

fn strictly_decreasing_median(r: &ConvergenceReport, at: &[u64]) -> bool {
    let m: Vec<f64> = at
        .iter()
        .filter_map(|&c| r.rows.iter().find(|row| row.checkpoint == c).map(|row| row.median))
        .collect();
    m.len() == at.len() && m.windows(2).all(|w| w[1] < w[0])
}

fn criterion_4(dir: &Path, threads: &str) -> (Outcome, Vec<u8>) {
    let t = Instant::now();
    let run = slln(
        &[
            config("theorem.json").to_str().unwrap(),
            "--paths",
            "200",
            "--horizon",
            "1000000",
            "--seed",
            "0",
            "--threads",
            threads,
            "--subcommand",
            "simulate",
        ],
        dir,
    );
    let elapsed = t.elapsed();
    match run {
        Ok(run) => {
            let c = run.report.convergence.as_ref().expect("convergence section");
            let ok = run.exit_ok
                && c.verdict == Verdict::Convergent
                && c.eps_target == 0.05
                && c.fraction_target == 0.10
                && c.final_fraction_above_target < 0.10
                && strictly_decreasing_median(c, &[10_000, 100_000, 1_000_000]);
            let medians: Vec<String> = c.rows.iter().map(|r| format!("{:.2e}", r.median)).collect();
            (
                timed(
                    Duration::from_secs(120),
                    outcome(
                        ok,
                        format!(
                            "verdict {:?}, fraction D(1e6) > 0.05 = {}, median D = [{}]",
                            c.verdict,
                            c.final_fraction_above_target,
                            medians.join(", ")
                        ),
                    ),
                    elapsed,
                ),
                run.deviations,
            )
        }
        Err(e) => (outcome(false, e), Vec::new()),
    }
}

fn criterion_5(dir: &Path) -> Outcome {
    let t = Instant::now();
    let mut details = Vec::new();
    let mut ok = true;
    for name in ["violate-sparsity.json", "violate-x-mean.json"] {
        let run = slln(
            &[
                config(name).to_str().unwrap(),
                "--paths",
                "100",
                "--horizon",
                "100000",
                "--seed",
                "0",
            ],
            &dir.join(name),
        );
        match run {
            Ok(run) => {
                let c = run.report.convergence.as_ref().expect("convergence section");
                ok &= !run.exit_ok && c.verdict != Verdict::Convergent && c.eps_target == 0.05 && c.fraction_target == 0.10;
                details.push(format!("{name}: {:?}, exit ok {}", c.verdict, run.exit_ok));
            }
            Err(e) => {
                ok = false;
                details.push(format!("{name}: {e}"));
            }
        }
    }
    timed(Duration::from_secs(60), outcome(ok, details.join("; ")), t.elapsed())
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let e = weighted_series_ensemble(
        &TailEnvelope::Pareto { gamma: 2.0 },
        DependenceMode::Independent,
        &MomentSchedule::inv_sqrt_log(),
        1.0,
        10_000,
        100,
        0,
        1e-3,
    );
    let zeta = *weighted_y_series(&vec![1.0; 10_000], &vec![0.5; 10_000]).partial_sums.last().unwrap();
    let gap = (zeta - std::f64::consts::PI.powi(2) / 6.0).abs();
    let elapsed = t.elapsed();
    outcome(
        e.converged_fraction >= 0.95 && gap < 1e-3,
        format!(
            "{:.0}% of 100 paths with last-decade increment < 1e-3; |sum k^-2 - pi^2/6| = {gap:.2e}; {:.2}s",
            100.0 * e.converged_fraction,
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_7() -> Outcome {
    let n = 10_000;
    let b: Vec<f64> = (1..=n).map(|k| k as f64).collect();
    let alt: Vec<f64> = (1..=n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let inv_sq: Vec<f64> = (1..=n).map(|k| 1.0 / (k as f64).powi(2)).collect();
    let r1 = kronecker_check(&alt, &b, 1e-2).unwrap();
    let r2 = kronecker_check(&vec![1.0; n], &b, 1e-2).unwrap();
    let r3 = kronecker_check(&inv_sq, &b, 1e-2).unwrap();
    let k_ok = r1.outcome == KroneckerOutcome::Pass
        && r1.normalized_sum.abs() <= 1.0 / n as f64
        && r2.outcome == KroneckerOutcome::PremiseFailed
        && r3.outcome == KroneckerOutcome::Pass
        && r3.normalized_sum <= std::f64::consts::PI.powi(2) / 6.0 / n as f64;
    let blocks = build_block_schedule(&TailEnvelope::Exp, &MomentSchedule::constant(0.5), 5);
    let (b_ok, b_detail) = match blocks {
        Ok(s) => {
            let inc = s.n.windows(2).all(|w| w[1] > w[0]);
            let tails = s
                .tail_bounds
                .iter()
                .enumerate()
                .all(|(k, &t)| t < 1.0 / ((k + 1) as f64).powi(2));
            (inc && tails && s.n.len() == 5, format!("N = {:?}", s.n))
        }
        Err(e) => (false, e.to_string()),
    };
    outcome(
        k_ok && b_ok,
        format!(
            "kronecker: {:?} / {:?} / {:?}; blocks {b_detail}",
            r1.outcome, r2.outcome, r3.outcome
        ),
    )
}

fn main() {
    let tmp = tempfile::tempdir().expect("temp dir");
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((1, "series bound suite", criterion_1()));
    results.push((2, "hypothesis constants", criterion_2()));
    results.push((3, "pairwise independence", criterion_3()));
    let (c4, csv1) = criterion_4(&tmp.path().join("threads-1"), "1");
    results.push((4, "theorem-regime convergence", c4));
    results.push((5, "counterexample sensitivity", criterion_5(&tmp.path().join("violations"))));
    results.push((6, "weighted-series convergence", criterion_6()));
    results.push((7, "kronecker and block schedule", criterion_7()));
    let (c8, csv8) = criterion_4(&tmp.path().join("threads-8"), "8");
    let same = !csv1.is_empty() && csv1 == csv8;
    results.push((
        8,
        "determinism across thread counts",
        outcome(
            same && c8.pass,
            format!("deviations.csv with 1 and 8 threads byte-identical: {same} ({} bytes)", csv1.len()),
        ),
    ));

    let mut failed = 0;
    for (id, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {id} [{tag}] {name}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

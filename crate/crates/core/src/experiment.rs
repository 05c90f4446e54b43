//! Batch front end: JSON experiment configs in, reports and tables out.
//!
//! A run produces up to four files in the output directory:
//!
//! * `report.json`: the resolved spec, artifact version and one section per
//!   requested stage.
//! * `deviations.csv`: per-checkpoint quantiles of the suffix-sup deviation.
//! * `calculus.csv`: the series bound table.
//! * `plot.svg`: median, q90 and q99 of `D` against the checkpoint.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::{build_block_schedule, combined_series_bound, BlockSchedule, DEFAULT_P_VALUES, DEFAULT_TRUNCATION};
use crate::diagnostics::{clip_checkpoints, run_ensemble, ConvergenceReport, EnsembleOptions, Verdict, DEFAULT_CHECKPOINTS, DEFAULT_EPS};
use crate::generators::{DependenceMode, TailEnvelope, XFamily};
use crate::hypotheses::{check_hypotheses, HypothesisInputs, HypothesisReport, HypothesisThresholds};
use crate::mixture::{MixedSequenceConfig, DEFAULT_MEMORY_BUDGET};
use crate::schedules::{build_sparsity, validate_schedule, MomentSchedule, ScheduleForm, SparsityPattern};
use crate::{Error, Result};

pub const ARTIFACT_NAME: &str = env!("CARGO_PKG_NAME");
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YSpec {
    #[serde(flatten)]
    pub envelope: TailEnvelope,
    pub dependence: DependenceMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    #[serde(flatten)]
    pub form: ScheduleForm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor_index: Option<u64>,
}

impl ScheduleSpec {
    pub fn build(&self) -> MomentSchedule {
        let s = MomentSchedule::new(self.form);
        match self.floor_index {
            Some(f) => s.with_floor_index(f),
            None => s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SparsityMode {
    Auto,
    AllZero,
    AllOne,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparsitySpec {
    pub mode: SparsityMode,
    #[serde(default = "one")]
    pub c: f64,
    /// Only read in `explicit` mode; indices past the list get `alpha = 0`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub list: Vec<bool>,
}

impl SparsitySpec {
    pub fn build(&self, schedule: &MomentSchedule) -> Result<SparsityPattern> {
        Ok(match self.mode {
            SparsityMode::Auto => build_sparsity(schedule, self.c)?,
            SparsityMode::AllZero => SparsityPattern::all_zero(self.c),
            SparsityMode::AllOne => SparsityPattern::all_one(self.c),
            SparsityMode::Explicit => SparsityPattern::explicit(self.list.clone(), self.c),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerdictThresholds {
    pub eps_target: f64,
    pub fraction_target: f64,
}

impl Default for VerdictThresholds {
    fn default() -> Self {
        Self {
            eps_target: 0.05,
            fraction_target: 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalculusSettings {
    pub envelopes: Vec<TailEnvelope>,
    pub p_values: Vec<f64>,
    pub truncation: u64,
    /// Blocks built for the config's own envelope and schedule.
    pub block_k_max: u32,
}

impl Default for CalculusSettings {
    fn default() -> Self {
        Self {
            envelopes: vec![
                TailEnvelope::Exp,
                TailEnvelope::Pareto { gamma: 1.5 },
                TailEnvelope::Pareto { gamma: 2.0 },
            ],
            p_values: DEFAULT_P_VALUES.to_vec(),
            truncation: DEFAULT_TRUNCATION,
            block_k_max: 5,
        }
    }
}

fn one() -> f64 {
    1.0
}
fn default_horizon() -> u64 {
    1_000_000
}
fn default_paths() -> usize {
    100
}
fn default_checkpoints() -> Vec<u64> {
    DEFAULT_CHECKPOINTS.to_vec()
}
fn default_eps() -> Vec<f64> {
    DEFAULT_EPS.to_vec()
}
fn default_budget() -> u64 {
    DEFAULT_MEMORY_BUDGET
}

/// One experiment as stored on disk. Every field except `name`, `x`, `y`,
/// `schedule` and `sparsity` has a default, and the resolved spec is echoed
/// into `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub x: XFamily,
    pub y: YSpec,
    pub schedule: ScheduleSpec,
    pub sparsity: SparsitySpec,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    #[serde(default = "default_paths")]
    pub n_paths: usize,
    #[serde(default = "default_checkpoints")]
    pub checkpoints: Vec<u64>,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(default)]
    pub verdict: VerdictThresholds,
    #[serde(default)]
    pub hypotheses: HypothesisThresholds,
    #[serde(default)]
    pub calculus: CalculusSettings,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default)]
    pub compensated: bool,
    #[serde(default = "default_budget")]
    pub memory_budget: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn moment_schedule(&self) -> MomentSchedule {
        self.schedule.build()
    }

    pub fn mixed_config(&self) -> Result<MixedSequenceConfig> {
        let schedule = self.moment_schedule();
        let mut cfg = MixedSequenceConfig::new(
            self.x,
            self.y.envelope,
            self.y.dependence,
            schedule,
            self.sparsity.build(&schedule)?,
            self.horizon,
            self.seed,
        );
        cfg.scale = self.scale;
        cfg.compensated = self.compensated;
        cfg.memory_budget = self.memory_budget;
        Ok(cfg)
    }

    pub fn ensemble_options(&self, threads: Option<usize>) -> EnsembleOptions {
        EnsembleOptions {
            n_paths: self.n_paths,
            checkpoints: self.checkpoints.clone(),
            eps_list: self.eps.clone(),
            eps_target: self.verdict.eps_target,
            fraction_target: self.verdict.fraction_target,
            threads,
        }
    }

    /// Checkpoints clipped to the horizon, which is always the last one.
    pub fn resolve(mut self) -> Self {
        self.checkpoints = clip_checkpoints(&self.checkpoints, self.horizon);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if self.name.trim().is_empty() {
            return bad("name must not be empty".into());
        }
        self.x.validate()?;
        self.y.envelope.validate()?;
        let schedule = self.moment_schedule();
        validate_schedule(&schedule, self.horizon.max(3), self.hypotheses.growth_target)
            .map_err(|e| Error::Validation(format!("schedule: {e}")))?;
        if !(self.sparsity.c > 0.0 && self.sparsity.c.is_finite()) {
            return bad(format!("sparsity constant c must be positive, got {}", self.sparsity.c));
        }
        if self.horizon == 0 {
            return bad("horizon must be at least 1".into());
        }
        if self.horizon > self.memory_budget {
            return Err(Error::HorizonOverflow {
                horizon: self.horizon,
                budget: self.memory_budget,
            });
        }
        if self.n_paths < 2 {
            return bad(format!("n_paths must be at least 2, got {}", self.n_paths));
        }
        if self.checkpoints.is_empty() || self.checkpoints.windows(2).any(|w| w[1] <= w[0]) || self.checkpoints[0] == 0 {
            return bad("checkpoints must be positive and strictly increasing".into());
        }
        if self.eps.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return bad("every eps must be positive".into());
        }
        let v = &self.verdict;
        if !(v.eps_target > 0.0) || !(v.fraction_target > 0.0 && v.fraction_target <= 1.0) {
            return bad(format!("verdict thresholds out of range: {v:?}"));
        }
        if self.calculus.p_values.iter().any(|&p| !(p > 1.0)) {
            return bad("calculus p values must exceed 1".into());
        }
        for env in &self.calculus.envelopes {
            env.validate()?;
        }
        Ok(())
    }
}

/// Parses and validates a spec from JSON text. `origin` only labels errors.
pub fn parse_config(text: &str, origin: &Path) -> Result<ExperimentSpec> {
    let spec: ExperimentSpec = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    spec.validate()?;
    Ok(spec)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentSpec> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_config(&text, path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcommand {
    Hypotheses,
    Calculus,
    Simulate,
    All,
}

impl Subcommand {
    fn includes(self, other: Subcommand) -> bool {
        self == Subcommand::All || self == other
    }
}

impl FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hypotheses" => Ok(Self::Hypotheses),
            "calculus" => Ok(Self::Calculus),
            "simulate" => Ok(Self::Simulate),
            "all" => Ok(Self::All),
            _ => Err(Error::InvalidArgument(format!(
                "unknown subcommand {s:?}; expected hypotheses, calculus, simulate or all"
            ))),
        }
    }
}

/// Command-line style overrides applied on top of a loaded spec.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub n_paths: Option<usize>,
    pub horizon: Option<u64>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, mut spec: ExperimentSpec) -> Result<ExperimentSpec> {
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        if let Some(p) = self.n_paths {
            spec.n_paths = p;
        }
        if let Some(h) = self.horizon {
            spec.horizon = h;
        }
        if let Some(o) = &self.out {
            spec.out = Some(o.clone());
        }
        let spec = spec.resolve();
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SectionStatus {
    Pass,
    Fail,
}

impl SectionStatus {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesesSection {
    pub status: SectionStatus,
    pub report: HypothesisReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalculusRow {
    pub envelope: TailEnvelope,
    pub p: f64,
    #[serde(with = "crate::serde_float")]
    pub a: f64,
    #[serde(with = "crate::serde_float")]
    pub bound_a: f64,
    #[serde(with = "crate::serde_float")]
    pub b: f64,
    #[serde(with = "crate::serde_float")]
    pub bound_b: f64,
    #[serde(with = "crate::serde_float")]
    pub combined: f64,
    #[serde(with = "crate::serde_float")]
    pub bound_combined: f64,
    #[serde(with = "crate::serde_float")]
    pub slack_a: f64,
    #[serde(with = "crate::serde_float")]
    pub slack_b: f64,
    #[serde(with = "crate::serde_float")]
    pub slack_combined: f64,
    pub status: SectionStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CalculusRow {
    /// Assertions behind the row: `A`, `B` and `A + B` against their bounds.
    pub const ASSERTIONS: usize = 3;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BlockStatus {
    Built,
    SearchExhausted,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSection {
    pub status: BlockStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<BlockSchedule>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalculusSection {
    pub status: SectionStatus,
    pub truncation: u64,
    pub rows: Vec<CalculusRow>,
    /// Informational; an exhausted search does not fail the section.
    pub blocks: BlockSection,
}

pub fn calculus_table(settings: &CalculusSettings) -> Vec<CalculusRow> {
    let pairs: Vec<(TailEnvelope, f64)> = settings
        .envelopes
        .iter()
        .flat_map(|&e| settings.p_values.iter().map(move |&p| (e, p)))
        .collect();
    pairs
        .into_par_iter()
        .map(|(envelope, p)| match combined_series_bound(&envelope, p, settings.truncation) {
            Ok(c) => CalculusRow {
                envelope,
                p,
                a: c.a.numeric,
                bound_a: c.a.bound,
                b: c.b.numeric,
                bound_b: c.b.bound,
                combined: c.combined,
                bound_combined: c.bound,
                slack_a: c.a.slack,
                slack_b: c.b.slack,
                slack_combined: c.slack,
                status: SectionStatus::from_bool(c.a.slack >= 0.0 && c.b.slack >= 0.0 && c.slack >= 0.0),
                error: None,
            },
            Err(e) => CalculusRow {
                envelope,
                p,
                a: f64::NAN,
                bound_a: f64::NAN,
                b: f64::NAN,
                bound_b: f64::NAN,
                combined: f64::NAN,
                bound_combined: f64::NAN,
                slack_a: f64::NAN,
                slack_b: f64::NAN,
                slack_combined: f64::NAN,
                status: SectionStatus::Fail,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

fn block_section(spec: &ExperimentSpec) -> BlockSection {
    let schedule = spec.moment_schedule();
    match build_block_schedule(&spec.y.envelope, &schedule, spec.calculus.block_k_max) {
        Ok(s) => BlockSection {
            status: BlockStatus::Built,
            detail: format!("{} blocks, N = {:?}", s.n.len(), s.n),
            schedule: Some(s),
        },
        Err(e @ Error::SearchExhausted { .. }) => BlockSection {
            status: BlockStatus::SearchExhausted,
            schedule: None,
            detail: e.to_string(),
        },
        Err(e) => BlockSection {
            status: BlockStatus::NotApplicable,
            schedule: None,
            detail: e.to_string(),
        },
    }
}

pub fn calculus_section(spec: &ExperimentSpec) -> CalculusSection {
    let rows = calculus_table(&spec.calculus);
    CalculusSection {
        status: SectionStatus::from_bool(rows.iter().all(|r| r.status == SectionStatus::Pass)),
        truncation: spec.calculus.truncation,
        rows,
        blocks: block_section(spec),
    }
}

pub fn hypotheses_section(spec: &ExperimentSpec) -> Result<HypothesesSection> {
    let schedule = spec.moment_schedule();
    let pattern = spec.sparsity.build(&schedule)?;
    let report = check_hypotheses(
        HypothesisInputs {
            family: &spec.x,
            envelope: &spec.y.envelope,
            schedule: &schedule,
            pattern: &pattern,
            horizon: spec.horizon,
        },
        &spec.hypotheses,
    );
    Ok(HypothesesSection {
        status: SectionStatus::from_bool(report.all_pass()),
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub artifact: Artifact,
    pub subcommand: Subcommand,
    pub seed: u64,
    pub spec: ExperimentSpec,
    pub status: SectionStatus,
    /// One line per failed section.
    pub failures: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypotheses: Option<HypothesesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calculus: Option<CalculusSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceReport>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.status == SectionStatus::Pass
    }
}

/// Runs the requested stages without touching the filesystem. `threads`
/// caps the simulation's worker count and never changes results.
pub fn execute(spec: &ExperimentSpec, sub: Subcommand, threads: Option<usize>) -> Result<RunReport> {
    spec.validate()?;
    let mut failures = Vec::new();
    let hypotheses = if sub.includes(Subcommand::Hypotheses) {
        let h = hypotheses_section(spec)?;
        for e in h.report.entries.iter().filter(|e| e.status != crate::generators::CheckStatus::Pass) {
            failures.push(format!("hypotheses: {:?} {:?}: {}", e.id, e.status, e.detail));
        }
        Some(h)
    } else {
        None
    };
    let calculus = if sub.includes(Subcommand::Calculus) {
        let c = calculus_section(spec);
        for r in c.rows.iter().filter(|r| r.status != SectionStatus::Pass) {
            failures.push(format!(
                "calculus: {:?} p = {}: {}",
                r.envelope,
                r.p,
                r.error.as_deref().unwrap_or("negative slack")
            ));
        }
        Some(c)
    } else {
        None
    };
    let convergence = if sub.includes(Subcommand::Simulate) {
        let r = run_ensemble(&spec.mixed_config()?, &spec.ensemble_options(threads))?;
        if r.verdict != Verdict::Convergent {
            failures.push(format!(
                "convergence: verdict {:?}, final fraction above {} = {}",
                r.verdict, r.eps_target, r.final_fraction_above_target
            ));
        }
        Some(r)
    } else {
        None
    };
    Ok(RunReport {
        artifact: Artifact {
            name: ARTIFACT_NAME.into(),
            version: ARTIFACT_VERSION.into(),
        },
        subcommand: sub,
        seed: spec.seed,
        spec: spec.clone(),
        status: SectionStatus::from_bool(failures.is_empty()),
        failures,
        hypotheses,
        calculus,
        convergence,
    })
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn deviations_csv(report: &ConvergenceReport) -> String {
    let mut s = String::from("checkpoint,median_D,q90_D,q99_D");
    for e in &report.eps_list {
        write!(s, ",frac_gt_eps_{e}").unwrap();
    }
    s.push('\n');
    for r in &report.rows {
        write!(s, "{},{},{},{}", r.checkpoint, fmt_f64(r.median), fmt_f64(r.q90), fmt_f64(r.q99)).unwrap();
        for f in &r.frac_gt_eps {
            write!(s, ",{}", fmt_f64(*f)).unwrap();
        }
        s.push('\n');
    }
    s
}

fn envelope_label(e: &TailEnvelope) -> String {
    match e {
        TailEnvelope::Exp => "exp".into(),
        TailEnvelope::Pareto { gamma } => format!("pareto({gamma})"),
    }
}

pub fn calculus_csv(section: &CalculusSection) -> String {
    let mut s = String::from("envelope,p,A,bound_A,B,bound_B,combined,bound_combined,status\n");
    for r in &section.rows {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{:?}",
            envelope_label(&r.envelope),
            fmt_f64(r.p),
            fmt_f64(r.a),
            fmt_f64(r.bound_a),
            fmt_f64(r.b),
            fmt_f64(r.bound_b),
            fmt_f64(r.combined),
            fmt_f64(r.bound_combined),
            r.status
        )
        .unwrap();
    }
    s
}

/// Median, q90 and q99 of `D` against the checkpoint, both axes log scaled.
pub fn render_svg(report: &ConvergenceReport) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 60.0;
    let xs: Vec<f64> = report.rows.iter().map(|r| (r.checkpoint as f64).log10()).collect();
    let series: [(&str, &str, Vec<f64>); 3] = [
        ("median", "#1f77b4", report.rows.iter().map(|r| r.median).collect()),
        ("q90", "#ff7f0e", report.rows.iter().map(|r| r.q90).collect()),
        ("q99", "#d62728", report.rows.iter().map(|r| r.q99).collect()),
    ];
    // zeros and non-finite values are dropped from the log axis
    let ly = |v: f64| if v > 0.0 && v.is_finite() { Some(v.log10()) } else { None };
    let all_y: Vec<f64> = series.iter().flat_map(|s| s.2.iter().filter_map(|&v| ly(v))).collect();
    let (x0, x1) = span(&xs);
    let (y0, y1) = span(&all_y);
    let px = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let py = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<path d="M{M} {M} V{b} H{r}" fill="none" stroke="black"/>"#,
        b = H - M,
        r = W - M
    )
    .unwrap();
    for x in (x0.ceil() as i32)..=(x1.floor() as i32) {
        let p = px(x as f64);
        writeln!(s, r#"<text x="{p:.1}" y="{:.1}" font-size="12" text-anchor="middle">1e{x}</text>"#, H - M + 18.0).unwrap();
    }
    for y in (y0.ceil() as i32)..=(y1.floor() as i32) {
        let p = py(y as f64);
        writeln!(s, r#"<text x="{:.1}" y="{p:.1}" font-size="12" text-anchor="end">1e{y}</text>"#, M - 6.0).unwrap();
    }
    writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">checkpoint n</text>"#, W / 2.0, H - 15.0).unwrap();
    writeln!(s, r#"<text x="15" y="{:.1}" font-size="13" transform="rotate(-90 15 {:.1})" text-anchor="middle">D(n)</text>"#, H / 2.0, H / 2.0).unwrap();
    for (i, (label, color, ys)) in series.iter().enumerate() {
        let pts: Vec<String> = xs
            .iter()
            .zip(ys)
            .filter_map(|(&x, &y)| ly(y).map(|ly| format!("{:.2},{:.2}", px(x), py(ly))))
            .collect();
        if !pts.is_empty() {
            writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, pts.join(" ")).unwrap();
        }
        let ty = M + 16.0 * i as f64;
        writeln!(s, r#"<text x="{:.1}" y="{ty:.1}" font-size="12" fill="{color}">{label}</text>"#, W - M - 50.0).unwrap();
    }
    writeln!(s, r#"<text x="{M}" y="30" font-size="14">verdict: {:?}</text>"#, report.verdict).unwrap();
    s.push_str("</svg>\n");
    s
}

fn span(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Written {
    pub report: PathBuf,
    pub deviations: Option<PathBuf>,
    pub calculus: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

pub fn write_artifacts(report: &RunReport, dir: &Path, plot: bool) -> Result<Written> {
    fs::create_dir_all(dir)?;
    let report_path = dir.join("report.json");
    fs::write(&report_path, serde_json::to_string_pretty(report)? + "\n")?;
    let mut written = Written {
        report: report_path,
        deviations: None,
        calculus: None,
        plot: None,
    };
    if let Some(c) = &report.convergence {
        let p = dir.join("deviations.csv");
        fs::write(&p, deviations_csv(c))?;
        written.deviations = Some(p);
        if plot {
            let p = dir.join("plot.svg");
            fs::write(&p, render_svg(c))?;
            written.plot = Some(p);
        }
    }
    if let Some(c) = &report.calculus {
        let p = dir.join("calculus.csv");
        fs::write(&p, calculus_csv(c))?;
        written.calculus = Some(p);
    }
    Ok(written)
}

/// Output directory: the spec's `out`, else `out/<name>`.
pub fn output_dir(spec: &ExperimentSpec) -> PathBuf {
    spec.out.clone().unwrap_or_else(|| PathBuf::from("out").join(&spec.name))
}

/// [`execute`] followed by [`write_artifacts`].
pub fn run(spec: &ExperimentSpec, sub: Subcommand, threads: Option<usize>, plot: bool) -> Result<(RunReport, Written)> {
    let report = execute(spec, sub, threads)?;
    let written = write_artifacts(&report, &output_dir(spec), plot)?;
    Ok((report, written))
}

//! Interleaving of the `X` and `Y` streams into `Z_n`.
//!
//! `Z_n = Y_{phi_n}` when `alpha_n = 1` and `Z_n = X_{psi_n}` otherwise. The
//! k-th heavy term uses the exponent `a_n` of the global index where it is
//! inserted.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{suffix_sup, PathSummary};
use crate::generators::{sample_y, DependenceMode, TailEnvelope, XFamily, XSampler};
use crate::rng::{derive_stream, Channel, StreamKey, UniformStream};
use crate::schedules::{AlphaTable, MomentSchedule, SparsityPattern};
use crate::{Error, Result};

pub const DEFAULT_MEMORY_BUDGET: u64 = 10_000_000;

/// Everything needed to produce one stochastic path of `Z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedSequenceConfig {
    pub x_family: XFamily,
    pub envelope: TailEnvelope,
    pub dependence: DependenceMode,
    pub schedule: MomentSchedule,
    pub pattern: SparsityPattern,
    pub horizon: u64,
    pub seed: u64,
    /// Multiplies every emitted `Z`.
    pub scale: f64,
    /// Neumaier-compensated running sum instead of plain left-to-right.
    pub compensated: bool,
    /// Largest horizon a path may buffer.
    pub memory_budget: u64,
}

impl MixedSequenceConfig {
    pub fn new(
        x_family: XFamily,
        envelope: TailEnvelope,
        dependence: DependenceMode,
        schedule: MomentSchedule,
        pattern: SparsityPattern,
        horizon: u64,
        seed: u64,
    ) -> Self {
        Self {
            x_family,
            envelope,
            dependence,
            schedule,
            pattern,
            horizon,
            seed,
            scale: 1.0,
            compensated: false,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Validation("horizon must be at least 1".into()));
        }
        if self.horizon > self.memory_budget {
            return Err(Error::HorizonOverflow {
                horizon: self.horizon,
                budget: self.memory_budget,
            });
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Validation(format!("scale must be positive, got {}", self.scale)));
        }
        self.x_family.validate()?;
        self.envelope.validate()?;
        let a1 = self.schedule.eval_a(1);
        if !(a1 > 0.0 && a1 <= 1.0) {
            return Err(Error::Validation(format!("a out of (0,1]: a_1 = {a1}")));
        }
        Ok(())
    }

    pub fn alpha_table(&self) -> AlphaTable {
        self.pattern.materialize(self.horizon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathState {
    pub n: u64,
    pub phi: u64,
    pub psi: u64,
    pub sum: f64,
    compensation: f64,
    pub shared_u: Option<f64>,
}

impl PathState {
    /// The running sum including any pending compensation term.
    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// One path in progress: state plus the streams it owns.
pub struct PathRunner<'a> {
    config: &'a MixedSequenceConfig,
    alpha: &'a AlphaTable,
    state: PathState,
    x_stream: UniformStream,
    y_stream: UniformStream,
    x_sampler: XSampler,
    path_index: u64,
}

impl<'a> PathRunner<'a> {
    pub fn new(config: &'a MixedSequenceConfig, alpha: &'a AlphaTable, path_index: u64) -> Self {
        let key = |channel| StreamKey::new(config.seed, path_index, channel);
        let shared_u = match config.dependence {
            DependenceMode::Comonotone => Some(derive_stream(key(Channel::Shared)).next_uniform()),
            DependenceMode::Independent => None,
        };
        Self {
            config,
            alpha,
            state: PathState {
                n: 0,
                phi: 0,
                psi: 0,
                sum: 0.0,
                compensation: 0.0,
                shared_u,
            },
            x_stream: derive_stream(key(Channel::X)),
            y_stream: derive_stream(key(Channel::Y)),
            x_sampler: XSampler::new(config.x_family),
            path_index,
        }
    }

    pub fn state(&self) -> &PathState {
        &self.state
    }

    pub fn path_index(&self) -> u64 {
        self.path_index
    }

    /// Emits `Z_{n+1}` and advances the state.
    #[inline]
    pub fn next_z(&mut self) -> Result<f64> {
        let n = self.state.n + 1;
        if n > self.alpha.horizon() {
            return Err(Error::InvalidArgument(format!(
                "path already at its horizon {}",
                self.alpha.horizon()
            )));
        }
        let raw = if self.alpha.get(n) {
            self.state.phi += 1;
            let a = self.config.schedule.eval_a(n);
            sample_y(
                &self.config.envelope,
                self.config.dependence,
                a,
                &mut self.y_stream,
                self.state.shared_u,
            )?
        } else {
            self.state.psi += 1;
            self.x_sampler.next(&mut self.x_stream)
        };
        let z = self.config.scale * raw;
        self.state.n = n;
        if self.config.compensated {
            let t = self.state.sum + z;
            if self.state.sum.abs() >= z.abs() {
                self.state.compensation += (self.state.sum - t) + z;
            } else {
                self.state.compensation += (z - t) + self.state.sum;
            }
            self.state.sum = t;
        } else {
            self.state.sum += z;
        }
        Ok(z)
    }
}

fn check_checkpoints(checkpoints: &[u64], horizon: u64) -> Result<()> {
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("checkpoints must be strictly increasing".into()));
    }
    if checkpoints.iter().any(|&c| c == 0 || c > horizon) {
        return Err(Error::InvalidArgument(format!(
            "checkpoints must lie in [1, {horizon}]"
        )));
    }
    Ok(())
}

/// Streams one path to the horizon, buffering `|S_m / m|` for every `m`.
pub fn run_path(
    config: &MixedSequenceConfig,
    alpha: &AlphaTable,
    checkpoints: &[u64],
    path_index: u64,
) -> Result<PathSummary> {
    config.validate()?;
    if alpha.horizon() != config.horizon {
        return Err(Error::InvalidArgument(format!(
            "alpha table covers {} indices, horizon is {}",
            alpha.horizon(),
            config.horizon
        )));
    }
    check_checkpoints(checkpoints, config.horizon)?;
    let mut runner = PathRunner::new(config, alpha, path_index);
    let mut deviations = Vec::with_capacity(config.horizon as usize);
    let mut averages = Vec::with_capacity(checkpoints.len());
    let mut next_cp = checkpoints.iter().peekable();
    let mut max_abs_z = 0.0f64;
    for m in 1..=config.horizon {
        let z = runner.next_z()?;
        max_abs_z = max_abs_z.max(z.abs());
        let avg = runner.state.total() / m as f64;
        deviations.push(avg.abs());
        if next_cp.peek() == Some(&&m) {
            averages.push(avg);
            next_cp.next();
        }
    }
    let d = suffix_sup(&deviations, checkpoints);
    Ok(PathSummary {
        path_index,
        checkpoints: checkpoints.to_vec(),
        averages,
        deviations: d,
        final_average: runner.state.total() / config.horizon as f64,
        phi: runner.state.phi,
        max_abs_z,
    })
}

//! Samplers for the two ingredients of the mixed sequence.
//!
//! The `X` families are centered and pairwise independent with closed-form
//! tails of `|X|`. The heavy part is built by drawing `V` with tail exactly
//! `G(t)` (the extremal law under the envelope) and returning `Y = V^{1/a}`.

use serde::{Deserialize, Serialize};

use crate::rng::UniformStream;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family", content = "params")]
pub enum XFamily {
    /// Uniform on `[-w, w]`.
    IidUniform { half_width: f64 },
    /// `E - 1/rate` with `E ~ Exp(rate)`.
    IidShiftedExp { rate: f64 },
    /// Blocks of `2^b - 1` parities of `b` fair signs.
    ParityRademacher { block_bits: u32 },
    /// `P - shape/(shape-1)` with `P ~ Pareto(shape)` on `[1, inf)`.
    /// With `shape <= 1` there is no mean to subtract and `X = P`.
    IidParetoCentered { shape: f64 },
}

impl XFamily {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            XFamily::IidUniform { half_width } => half_width > 0.0 && half_width.is_finite(),
            XFamily::IidShiftedExp { rate } => rate > 0.0 && rate.is_finite(),
            XFamily::ParityRademacher { block_bits } => (1..=20).contains(&block_bits),
            XFamily::IidParetoCentered { shape } => shape > 0.0 && shape.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Validation(format!("invalid X family parameters: {self:?}")))
        }
    }

    pub fn has_finite_mean(&self) -> bool {
        match *self {
            XFamily::IidParetoCentered { shape } => shape > 1.0,
            _ => true,
        }
    }

    fn pareto_shift(shape: f64) -> f64 {
        if shape > 1.0 {
            shape / (shape - 1.0)
        } else {
            0.0
        }
    }

    /// `E|X|`, the value the Cesaro tail constant must reproduce.
    pub fn abs_mean(&self) -> Option<f64> {
        match *self {
            XFamily::IidUniform { half_width } => Some(half_width / 2.0),
            XFamily::IidShiftedExp { rate } => Some(2.0 / (std::f64::consts::E * rate)),
            XFamily::ParityRademacher { .. } => Some(1.0),
            XFamily::IidParetoCentered { shape } if shape > 1.0 => {
                // E|X| = 2 E X^+ = 2 * int_m^inf y^-shape dy
                let m = Self::pareto_shift(shape);
                Some(2.0 * m.powf(1.0 - shape) / (shape - 1.0))
            }
            XFamily::IidParetoCentered { .. } => None,
        }
    }

    pub fn variance(&self) -> Option<f64> {
        match *self {
            XFamily::IidUniform { half_width } => Some(half_width * half_width / 3.0),
            XFamily::IidShiftedExp { rate } => Some(1.0 / (rate * rate)),
            XFamily::ParityRademacher { .. } => Some(1.0),
            XFamily::IidParetoCentered { shape } if shape > 2.0 => {
                Some(shape / ((shape - 1.0).powi(2) * (shape - 2.0)))
            }
            XFamily::IidParetoCentered { .. } => None,
        }
    }

    /// `P(|X| > x)` for `x >= 0`.
    pub fn tail(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0);
        match *self {
            XFamily::IidUniform { half_width } => {
                if x >= half_width {
                    0.0
                } else {
                    1.0 - x / half_width
                }
            }
            XFamily::IidShiftedExp { rate } => {
                let upper = (-1.0 - rate * x).exp();
                let lower = if rate * x < 1.0 {
                    -(-(1.0 - rate * x)).exp_m1()
                } else {
                    0.0
                };
                upper + lower
            }
            XFamily::ParityRademacher { .. } => {
                if x < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            XFamily::IidParetoCentered { shape } => {
                let m = Self::pareto_shift(shape);
                let hi = m + x;
                let upper = if hi <= 1.0 { 1.0 } else { hi.powf(-shape) };
                let lo = m - x;
                let lower = if lo > 1.0 { 1.0 - lo.powf(-shape) } else { 0.0 };
                upper + lower
            }
        }
    }

    /// Points where the tail has a kink or jump; quadrature splits there.
    pub fn tail_breakpoints(&self) -> Vec<f64> {
        match *self {
            XFamily::IidUniform { half_width } => vec![half_width],
            XFamily::IidShiftedExp { rate } => vec![1.0 / rate],
            XFamily::ParityRademacher { .. } => vec![1.0],
            XFamily::IidParetoCentered { shape } => {
                let m = Self::pareto_shift(shape);
                [m - 1.0, 1.0 - m]
                    .into_iter()
                    .filter(|&b| b > 0.0)
                    .collect()
            }
        }
    }

    /// `int_T^inf P(|X| > x) dx` in closed form for `T` at or past the last
    /// breakpoint; `None` when the integral diverges.
    pub fn tail_remainder(&self, t: f64) -> Option<f64> {
        match *self {
            XFamily::IidUniform { .. } => Some(0.0),
            XFamily::IidShiftedExp { rate } => Some((-1.0 - rate * t).exp() / rate),
            XFamily::ParityRademacher { .. } => Some(0.0),
            XFamily::IidParetoCentered { shape } if shape > 1.0 => {
                let m = Self::pareto_shift(shape);
                Some((m + t).powf(1.0 - shape) / (shape - 1.0))
            }
            XFamily::IidParetoCentered { .. } => None,
        }
    }

    fn draw_iid(&self, stream: &mut UniformStream) -> f64 {
        let u = stream.next_uniform();
        match *self {
            XFamily::IidUniform { half_width } => half_width * (2.0 * u - 1.0),
            XFamily::IidShiftedExp { rate } => -(-u).ln_1p() / rate - 1.0 / rate,
            XFamily::IidParetoCentered { shape } => {
                (1.0 - u).powf(-1.0 / shape) - Self::pareto_shift(shape)
            }
            XFamily::ParityRademacher { .. } => unreachable!("parity draws are block-based"),
        }
    }
}

/// Stateful `X` sampler; parity families keep the current block.
#[derive(Debug, Clone)]
pub struct XSampler {
    family: XFamily,
    bits: u64,
    mask: u64,
    block_len: u64,
}

impl XSampler {
    pub fn new(family: XFamily) -> Self {
        let block_len = match family {
            XFamily::ParityRademacher { block_bits } => (1u64 << block_bits) - 1,
            _ => 1,
        };
        Self {
            family,
            bits: 0,
            mask: block_len,
            block_len,
        }
    }

    pub fn family(&self) -> &XFamily {
        &self.family
    }

    /// Values per parity block; 1 for i.i.d. families.
    pub fn block_len(&self) -> u64 {
        self.block_len
    }

    #[inline]
    pub fn next(&mut self, stream: &mut UniformStream) -> f64 {
        match self.family {
            XFamily::ParityRademacher { block_bits } => {
                if self.mask == self.block_len {
                    self.bits = stream.next_u64() >> (64 - block_bits);
                    self.mask = 0;
                }
                self.mask += 1;
                // Subset `mask` of the b signs; its product is +1 iff an even
                // number of the selected bits are set.
                if (self.bits & self.mask).count_ones().is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            }
            _ => self.family.draw_iid(stream),
        }
    }
}

/// `count` consecutive draws; a trailing partial parity block is truncated.
pub fn sample_x_block(family: &XFamily, count: usize, stream: &mut UniformStream) -> Vec<f64> {
    let mut s = XSampler::new(*family);
    (0..count).map(|_| s.next(stream)).collect()
}

pub fn tail_x(family: &XFamily, x: f64) -> f64 {
    family.tail(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "envelope")]
pub enum TailEnvelope {
    /// `G(t) = e^{-t}`.
    Exp,
    /// `G(t) = min(1, t^{-gamma})`, `gamma > 1`.
    Pareto { gamma: f64 },
}

impl TailEnvelope {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TailEnvelope::Exp => Ok(()),
            TailEnvelope::Pareto { gamma } if gamma > 1.0 && gamma.is_finite() => Ok(()),
            TailEnvelope::Pareto { gamma } => Err(Error::Validation(format!(
                "pareto envelope needs gamma > 1 for a finite integral, got {gamma}"
            ))),
        }
    }

    #[inline]
    pub fn gbar(&self, t: f64) -> f64 {
        match *self {
            TailEnvelope::Exp => (-t).exp(),
            TailEnvelope::Pareto { gamma } => {
                if t <= 1.0 {
                    1.0
                } else {
                    t.powf(-gamma)
                }
            }
        }
    }

    /// Analytic `C_G = int_0^inf G`.
    pub fn c_g(&self) -> f64 {
        match *self {
            TailEnvelope::Exp => 1.0,
            TailEnvelope::Pareto { gamma } => 1.0 + 1.0 / (gamma - 1.0),
        }
    }

    /// `int_t^inf G(s) ds`.
    pub fn tail_integral(&self, t: f64) -> f64 {
        match *self {
            TailEnvelope::Exp => (-t).exp(),
            TailEnvelope::Pareto { gamma } => {
                if t <= 1.0 {
                    (1.0 - t) + 1.0 / (gamma - 1.0)
                } else {
                    t.powf(1.0 - gamma) / (gamma - 1.0)
                }
            }
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            TailEnvelope::Exp => vec![],
            TailEnvelope::Pareto { .. } => vec![1.0],
        }
    }

    /// Inverse of the upper tail: the `V` with `P(V > t) = G(t)` driven by `u`.
    #[inline]
    pub fn v_from_uniform(&self, u: f64) -> f64 {
        match *self {
            TailEnvelope::Exp => -(-u).ln_1p(),
            TailEnvelope::Pareto { gamma } => (1.0 - u).powf(-1.0 / gamma),
        }
    }

    pub fn median(&self) -> f64 {
        match *self {
            TailEnvelope::Exp => std::f64::consts::LN_2,
            TailEnvelope::Pareto { gamma } => 2f64.powf(1.0 / gamma),
        }
    }

    /// Tail exponent of `V`; `None` for light tails.
    pub fn tail_exponent(&self) -> Option<f64> {
        match *self {
            TailEnvelope::Exp => None,
            TailEnvelope::Pareto { gamma } => Some(gamma),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DependenceMode {
    /// A fresh uniform per heavy term.
    Independent,
    /// One uniform per path drives every heavy term.
    Comonotone,
}

#[inline]
pub fn y_from_v(v: f64, a: f64) -> f64 {
    v.powf(1.0 / a)
}

pub fn check_exponent(a: f64) -> Result<()> {
    if a > 0.0 && a <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(a))
    }
}

pub fn sample_y(
    envelope: &TailEnvelope,
    mode: DependenceMode,
    a: f64,
    stream: &mut UniformStream,
    shared_u: Option<f64>,
) -> Result<f64> {
    check_exponent(a)?;
    let u = match (mode, shared_u) {
        (DependenceMode::Independent, _) => stream.next_uniform(),
        (DependenceMode::Comonotone, Some(u)) => u,
        (DependenceMode::Comonotone, None) => {
            return Err(Error::InvalidArgument(
                "comonotone sampling needs the shared uniform".into(),
            ))
        }
    };
    Ok(y_from_v(envelope.v_from_uniform(u), a))
}

/// Global index from which `gamma * a_n <= 1`, i.e. `E|Y| = inf`.
pub fn infinite_mean_onset(envelope: &TailEnvelope, schedule: &crate::schedules::MomentSchedule) -> Option<f64> {
    let gamma = envelope.tail_exponent()?;
    // gamma * a_n <= 1  <=>  a_n ln n >= ln n / gamma, solve by bisection on ln n.
    let holds = |ln_n: f64| gamma * schedule.eval_at(ln_n.exp()) <= 1.0;
    if holds(0.0) {
        return Some(1.0);
    }
    let mut hi = 1.0f64;
    while !holds(hi) {
        hi *= 2.0;
        if hi > 700.0 {
            return None;
        }
    }
    let mut lo = hi / 2.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut n = hi.exp().ceil();
    if n < 9.0e15 {
        while n > 1.0 && holds((n - 1.0).ln()) {
            n -= 1.0;
        }
        while !holds(n.ln()) {
            n += 1.0;
        }
    }
    Some(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckStatus {
    Pass,
    Fail,
    #[serde(rename = "N/A")]
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanCheck {
    pub status: CheckStatus,
    pub n_samples: usize,
    #[serde(with = "crate::serde_float")]
    pub mean: f64,
    /// Half-width of the 3 sigma CLT band.
    #[serde(with = "crate::serde_float")]
    pub band: f64,
    pub detail: String,
}

/// Sample mean against its 3 sigma CLT band around zero.
pub fn centered_mean_check(
    family: &XFamily,
    n_samples: usize,
    stream: &mut UniformStream,
) -> Result<MeanCheck> {
    if n_samples < 1000 {
        return Err(Error::InvalidArgument(format!(
            "mean check needs at least 1000 samples, got {n_samples}"
        )));
    }
    if !family.has_finite_mean() {
        return Ok(MeanCheck {
            status: CheckStatus::NotApplicable,
            n_samples,
            mean: f64::NAN,
            band: f64::NAN,
            detail: "infinite-mean family: centering is undefined".into(),
        });
    }
    let xs = sample_x_block(family, n_samples, stream);
    let n = n_samples as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let (sigma, source) = match family.variance() {
        Some(v) => (v.sqrt(), "analytic"),
        None => {
            let v = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (v.sqrt(), "empirical (infinite variance)")
        }
    };
    let band = 3.0 * sigma / n.sqrt();
    let status = if mean.abs() <= band {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    Ok(MeanCheck {
        status,
        n_samples,
        mean,
        band,
        detail: format!("sigma {sigma:.6} ({source})"),
    })
}

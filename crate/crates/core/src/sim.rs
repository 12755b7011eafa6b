//! Slotted episodes: draw channels, optionally corrupt the CSI, let a scheme
//! decide, realize the decision on the true channels and move the bits.

use crate::channel::{corrupt_csi, sample_realization, slot_rng, CsiErrorSpec, FadingSpec, StreamPurpose};
use crate::error::SimError;
use crate::model::{
    rate_rd, rate_sr, BufferCapacity, BufferState, ChannelRealization, Decision, Evaluations, Mode, SystemParams,
};
use crate::par::{map_indices, Execution};
use crate::schemes::{ChdPhase, SchemeId, SelectionContext};

/// Initial fill used with infinite buffers: a backlog that never drains
/// within a run.
pub const INFINITE_BACKLOG_BITS: f64 = 1e12;

/// Default capacity of finite buffers, in bits per unit slot duration.
pub const DEFAULT_FINITE_CAPACITY: f64 = 20.0;

/// Repo default initial fill: half the capacity, or a standing backlog for
/// infinite buffers.
pub fn default_initial_fill(buffer: BufferCapacity) -> f64 {
    match buffer {
        BufferCapacity::Finite(q) => q / 2.0,
        BufferCapacity::Infinite => INFINITE_BACKLOG_BITS,
    }
}

/// How decided rates turn into realized rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealizationRule {
    /// Perfect CSI: the decided rates are achieved.
    Decided,
    /// Each hop achieves the smaller of its decided rate and true capacity.
    CapToCapacity,
    /// A hop whose decided rate exceeds the true capacity delivers nothing.
    OutageOnExcess,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeConfig {
    pub scheme: SchemeId,
    pub params: SystemParams,
    pub fading: FadingSpec,
    pub csi: Option<CsiErrorSpec>,
    pub slots: u64,
    /// Bits in every relay buffer at the start.
    pub initial_fill: f64,
    pub master_seed: u64,
    pub csi_outage_mode: bool,
    /// Restart every slot from the initial buffers instead of carrying them.
    pub per_slot_reset: bool,
}

impl EpisodeConfig {
    /// 5·10⁴ slots of unit-mean fading with perfect CSI and the default fill.
    pub fn new(scheme: SchemeId, params: SystemParams) -> Self {
        EpisodeConfig {
            scheme,
            fading: FadingSpec::unit(params.relay_count),
            csi: None,
            slots: 50_000,
            initial_fill: default_initial_fill(params.buffer),
            master_seed: 1,
            csi_outage_mode: false,
            per_slot_reset: false,
            params,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.params.validate()?;
        self.fading.validate()?;
        if self.fading.relay_count != self.params.relay_count {
            return Err(crate::error::ModelError::DimensionMismatch {
                expected: self.params.relay_count,
                found: self.fading.relay_count,
            }
            .into());
        }
        if let Some(csi) = &self.csi {
            csi.validate(&self.fading)?;
        }
        if self.slots == 0 {
            return Err(SimError::NoSlots);
        }
        let cap = self.params.buffer.bits();
        if !(self.initial_fill >= 0.0 && self.initial_fill <= cap) || !self.initial_fill.is_finite() {
            return Err(SimError::InvalidFill {
                fill: self.initial_fill,
                capacity: cap,
            });
        }
        Ok(())
    }

    fn rule(&self) -> RealizationRule {
        match (self.csi, self.csi_outage_mode) {
            (None, _) => RealizationRule::Decided,
            (Some(_), false) => RealizationRule::CapToCapacity,
            (Some(_), true) => RealizationRule::OutageOnExcess,
        }
    }
}

/// Outcome of one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotMetrics {
    pub realized_sr: f64,
    pub realized_rd: f64,
    pub sum: f64,
    pub mode: Mode,
    pub evaluations: Evaluations,
    /// An active hop delivered less than its minimum rate.
    pub qos_violation: bool,
}

/// Aggregate of an episode. Means run over all slots, idle ones included.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub slots: u64,
    pub mean_sum_throughput: f64,
    pub mean_sr_throughput: f64,
    pub mean_rd_throughput: f64,
    pub mmht: f64,
    /// Standard error of the mean sum-throughput.
    pub sum_std_err: f64,
    pub frac_pair: f64,
    pub frac_hd_receive: f64,
    pub frac_hd_transmit: f64,
    pub frac_idle: f64,
    pub frac_qos_violation: f64,
    pub evaluations: Evaluations,
    pub final_buffers: BufferState,
}

impl RunMetrics {
    pub fn frac_hd(&self) -> f64 {
        self.frac_hd_receive + self.frac_hd_transmit
    }
}

/// Minimum of the two hop means.
pub fn mmht(run: &RunMetrics) -> f64 {
    run.mean_sr_throughput.min(run.mean_rd_throughput)
}

const RATE_TOLERANCE: f64 = 1e-9;

fn inconsistent(decision: &Decision, why: &str) -> SimError {
    SimError::InconsistentDecision(format!("{decision:?}: {why}"))
}

fn check_decision(params: &SystemParams, n: usize, decision: &Decision) -> Result<(), SimError> {
    let finite_rate = |r: f64| r.is_finite() && r >= 0.0;
    let power_ok = |p: f64| p.is_finite() && p >= 0.0 && p <= params.max_relay_power * (1.0 + 1e-12);
    match *decision {
        Decision::Pair {
            rx,
            tx,
            power,
            rate_sr,
            rate_rd,
        } => {
            if rx >= n || tx >= n || rx == tx {
                return Err(inconsistent(decision, "bad relay indices"));
            }
            if !power_ok(power) {
                return Err(inconsistent(decision, "power outside [0, P_max]"));
            }
            if !finite_rate(rate_sr) || !finite_rate(rate_rd) {
                return Err(inconsistent(decision, "invalid rate"));
            }
        }
        Decision::HdReceive { rx, rate_sr } => {
            if rx >= n || !finite_rate(rate_sr) {
                return Err(inconsistent(decision, "bad receive slot"));
            }
        }
        Decision::HdTransmit { tx, power, rate_rd } => {
            if tx >= n || !power_ok(power) || !finite_rate(rate_rd) {
                return Err(inconsistent(decision, "bad transmit slot"));
            }
        }
        Decision::Idle => {}
    }
    Ok(())
}

fn realize(rule: RealizationRule, decided: f64, capacity: f64) -> f64 {
    match rule {
        RealizationRule::Decided => decided,
        RealizationRule::CapToCapacity => decided.min(capacity),
        RealizationRule::OutageOnExcess => {
            if decided > capacity {
                0.0
            } else {
                decided
            }
        }
    }
}

/// Realizes `decision` on the true channels and moves the bits. Received
/// bits never overflow the receiving buffer and sent bits never exceed the
/// stored ones.
pub fn apply_decision(
    params: &SystemParams,
    true_chan: &ChannelRealization,
    buffers: &BufferState,
    decision: &Decision,
    rule: RealizationRule,
) -> Result<(BufferState, SlotMetrics), SimError> {
    let n = true_chan.relay_count();
    if buffers.len() != n {
        return Err(crate::error::ModelError::DimensionMismatch {
            expected: n,
            found: buffers.len(),
        }
        .into());
    }
    check_decision(params, n, decision)?;

    let t = params.slot_duration;
    let (rx, tx, power) = match *decision {
        Decision::Pair { rx, tx, power, .. } => (Some(rx), Some(tx), power),
        Decision::HdReceive { rx, .. } => (Some(rx), None, 0.0),
        Decision::HdTransmit { tx, power, .. } => (None, Some(tx), power),
        Decision::Idle => (None, None, 0.0),
    };

    let mut next = buffers.clone();
    let mut realized_sr = 0.0;
    let mut realized_rd = 0.0;

    if let Some(rx) = rx {
        let e2 = tx.map_or(0.0, |tx| true_chan.inter(rx, tx));
        let capacity = rate_sr(params, true_chan.sr(rx), e2, power);
        let rate = realize(rule, decision.rate_sr(), capacity);
        let space = (params.buffer.bits() - buffers.level(rx)).max(0.0);
        let bits = (rate * t).min(space);
        next.levels[rx] = match params.buffer {
            // Land exactly on the capacity when the clip binds.
            BufferCapacity::Finite(qmax) if bits == space => qmax,
            _ => buffers.level(rx) + bits,
        };
        realized_sr = bits / t;
    }
    if let Some(tx) = tx {
        let capacity = rate_rd(params, true_chan.rd(tx), power);
        let rate = realize(rule, decision.rate_rd(), capacity);
        let stored = buffers.level(tx).max(0.0);
        let bits = (rate * t).min(stored);
        next.levels[tx] = if bits == stored { 0.0 } else { buffers.level(tx) - bits };
        realized_rd = bits / t;
    }

    let below = |r: f64, min: f64| r < min - RATE_TOLERANCE;
    let qos_violation = match decision.mode() {
        Mode::Pair => below(realized_sr, params.min_rate_sr) || below(realized_rd, params.min_rate_rd),
        Mode::HdReceive => below(realized_sr, params.min_rate_sr),
        Mode::HdTransmit => below(realized_rd, params.min_rate_rd),
        Mode::Idle => false,
    };

    Ok((
        next,
        SlotMetrics {
            realized_sr,
            realized_rd,
            sum: realized_sr + realized_rd,
            mode: decision.mode(),
            evaluations: Evaluations::default(),
            qos_violation,
        },
    ))
}

/// Channels, decision and outcome of slot `slot` starting from `buffers`.
pub fn simulate_slot(
    config: &EpisodeConfig,
    slot: u64,
    buffers: &BufferState,
) -> Result<(Decision, BufferState, SlotMetrics), SimError> {
    let truth = sample_realization(
        &config.fading,
        &mut slot_rng(config.master_seed, StreamPurpose::Fading, slot),
    );
    let estimate = match &config.csi {
        Some(csi) => Some(corrupt_csi(
            &truth,
            &config.fading,
            csi,
            &mut slot_rng(config.master_seed, StreamPurpose::CsiError, slot),
        )?),
        None => None,
    };
    let ctx = SelectionContext {
        params: &config.params,
        chan: estimate.as_ref().unwrap_or(&truth),
        true_chan: &truth,
        buffers,
        chd_phase: ChdPhase::for_slot(slot),
    };
    let mut evals = Evaluations::default();
    let decision = config.scheme.select(&ctx, &mut evals);
    let (next, mut metrics) = apply_decision(&config.params, &truth, buffers, &decision, config.rule())?;
    metrics.evaluations = evals;
    Ok((decision, next, metrics))
}

#[derive(Default)]
struct Accumulator {
    slots: u64,
    sr: f64,
    rd: f64,
    sum_sq: f64,
    sum_lin: f64,
    pair: u64,
    hd_rx: u64,
    hd_tx: u64,
    idle: u64,
    qos: u64,
    evals: Evaluations,
}

impl Accumulator {
    fn push(&mut self, m: &SlotMetrics) {
        self.slots += 1;
        self.sr += m.realized_sr;
        self.rd += m.realized_rd;
        self.sum_lin += m.sum;
        self.sum_sq += m.sum * m.sum;
        match m.mode {
            Mode::Pair => self.pair += 1,
            Mode::HdReceive => self.hd_rx += 1,
            Mode::HdTransmit => self.hd_tx += 1,
            Mode::Idle => self.idle += 1,
        }
        self.qos += m.qos_violation as u64;
        self.evals += m.evaluations;
    }

    fn finish(self, final_buffers: BufferState) -> RunMetrics {
        let n = self.slots as f64;
        let mean_sr = self.sr / n;
        let mean_rd = self.rd / n;
        let m = self.sum_lin / n;
        let var = if self.slots > 1 {
            ((self.sum_sq - n * m * m) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        let mut run = RunMetrics {
            slots: self.slots,
            mean_sum_throughput: mean_sr + mean_rd,
            mean_sr_throughput: mean_sr,
            mean_rd_throughput: mean_rd,
            mmht: 0.0,
            sum_std_err: (var / n).sqrt(),
            frac_pair: self.pair as f64 / n,
            frac_hd_receive: self.hd_rx as f64 / n,
            frac_hd_transmit: self.hd_tx as f64 / n,
            frac_idle: self.idle as f64 / n,
            frac_qos_violation: self.qos as f64 / n,
            evaluations: self.evals,
            final_buffers,
        };
        run.mmht = mmht(&run);
        run
    }
}

/// Runs an episode with the default execution.
pub fn run_episode(config: &EpisodeConfig) -> Result<RunMetrics, SimError> {
    run_episode_with(config, Execution::default(), |_, _, _, _| {})
}

/// Runs an episode, handing every slot's decision, metrics and resulting
/// buffers to `observe` in slot order.
///
/// Buffers carry over between slots, so slots run sequentially; with
/// `per_slot_reset` the slots are independent and go through `exec`.
pub fn run_episode_with(
    config: &EpisodeConfig,
    exec: Execution,
    mut observe: impl FnMut(u64, &Decision, &SlotMetrics, &BufferState),
) -> Result<RunMetrics, SimError> {
    config.validate()?;
    let start = BufferState::filled(config.params.relay_count, config.initial_fill);
    let mut acc = Accumulator::default();

    if config.per_slot_reset {
        let outcomes = map_indices(exec, config.slots as usize, |s| simulate_slot(config, s as u64, &start));
        let mut last = start.clone();
        for (slot, outcome) in outcomes.into_iter().enumerate() {
            let (decision, next, metrics) = outcome?;
            observe(slot as u64, &decision, &metrics, &next);
            acc.push(&metrics);
            last = next;
        }
        Ok(acc.finish(last))
    } else {
        let mut buffers = start;
        for slot in 0..config.slots {
            let (decision, next, metrics) = simulate_slot(config, slot, &buffers)?;
            observe(slot, &decision, &metrics, &next);
            acc.push(&metrics);
            buffers = next;
        }
        Ok(acc.finish(buffers))
    }
}

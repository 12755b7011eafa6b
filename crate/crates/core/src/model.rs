//! System model of the buffered two-hop relay network.
//!
//! Rates, the per-pair transmit-power interval implied by the QoS, power and
//! buffer constraints, and evaluation of the sum-throughput at the interval
//! endpoints. All powers are linear.

use std::fmt;
use std::ops::AddAssign;

use crate::error::ModelError;

/// Exponents above this make `2^x - 1` overflow; the constraint using it is
/// treated as inactive.
pub const MAX_EXPONENT: f64 = 1024.0;

/// Relay buffer capacity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BufferCapacity {
    /// Buffers hold at most this many bits.
    Finite(f64),
    /// Buffer constraints are removed from selection entirely.
    Infinite,
}

impl BufferCapacity {
    pub fn is_infinite(&self) -> bool {
        matches!(self, BufferCapacity::Infinite)
    }

    /// Capacity in bits, `f64::INFINITY` for the infinite mode.
    pub fn bits(&self) -> f64 {
        match *self {
            BufferCapacity::Finite(q) => q,
            BufferCapacity::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for BufferCapacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BufferCapacity::Finite(q) => write!(f, "{q}"),
            BufferCapacity::Infinite => f.write_str("inf"),
        }
    }
}

/// Scalar constants of the network.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Source transmit power `P_s`.
    pub source_power: f64,
    /// Relay transmit power limit `P_max`.
    pub max_relay_power: f64,
    /// Noise power `N_0` at every node.
    pub noise_power: f64,
    /// Minimum S-R rate `R_1` in bits/s/Hz.
    pub min_rate_sr: f64,
    /// Minimum R-D rate `R_2` in bits/s/Hz.
    pub min_rate_rd: f64,
    /// Slot duration `t`.
    pub slot_duration: f64,
    pub buffer: BufferCapacity,
    pub relay_count: usize,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            source_power: 1.0,
            max_relay_power: 1.0,
            noise_power: 1.0,
            min_rate_sr: 1.0,
            min_rate_rd: 1.0,
            slot_duration: 1.0,
            buffer: BufferCapacity::Infinite,
            relay_count: 2,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ModelError::InvalidParam { name, value: v })
            }
        };
        let nonneg = |name: &'static str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ModelError::InvalidParam { name, value: v })
            }
        };
        positive("source_power", self.source_power)?;
        positive("max_relay_power", self.max_relay_power)?;
        positive("noise_power", self.noise_power)?;
        nonneg("min_rate_sr", self.min_rate_sr)?;
        nonneg("min_rate_rd", self.min_rate_rd)?;
        positive("slot_duration", self.slot_duration)?;
        if let BufferCapacity::Finite(q) = self.buffer {
            nonneg("buffer_capacity", q)?;
        }
        if self.relay_count < 2 {
            return Err(ModelError::TooFewRelays(self.relay_count));
        }
        Ok(())
    }

    /// SINR threshold `2^{R_1} - 1` of the S-R hop.
    pub fn phi_sr(&self) -> f64 {
        self.min_rate_sr.exp2() - 1.0
    }

    /// SNR threshold `2^{R_2} - 1` of the R-D hop.
    pub fn phi_rd(&self) -> f64 {
        self.min_rate_rd.exp2() - 1.0
    }
}

/// Power gains of one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    sr_gain: Vec<f64>,
    rd_gain: Vec<f64>,
    /// Row-major `n x n`, symmetric, diagonal zero.
    inter_gain: Vec<f64>,
}

impl ChannelRealization {
    /// All-zero gains for `n` relays.
    pub fn zeros(n: usize) -> Self {
        ChannelRealization {
            sr_gain: vec![0.0; n],
            rd_gain: vec![0.0; n],
            inter_gain: vec![0.0; n * n],
        }
    }

    /// Builds a realization; `inter(i, j)` is queried for `i < j` only and
    /// mirrored.
    pub fn new(
        sr_gain: Vec<f64>,
        rd_gain: Vec<f64>,
        mut inter: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, ModelError> {
        let n = sr_gain.len();
        if rd_gain.len() != n {
            return Err(ModelError::DimensionMismatch {
                expected: n,
                found: rd_gain.len(),
            });
        }
        let mut chan = ChannelRealization {
            sr_gain,
            rd_gain,
            inter_gain: vec![0.0; n * n],
        };
        for i in 0..n {
            for j in i + 1..n {
                chan.set_inter(i, j, inter(i, j));
            }
        }
        chan.validate()?;
        Ok(chan)
    }

    /// Same inter-relay gain on every link.
    pub fn uniform_inter(sr_gain: Vec<f64>, rd_gain: Vec<f64>, e2: f64) -> Result<Self, ModelError> {
        Self::new(sr_gain, rd_gain, |_, _| e2)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let ok = |v: &f64| *v >= 0.0 && v.is_finite();
        if !self.sr_gain.iter().chain(&self.rd_gain).chain(&self.inter_gain).all(ok) {
            return Err(ModelError::InvalidGain);
        }
        let n = self.relay_count();
        for i in 0..n {
            for j in i + 1..n {
                if self.inter(i, j) != self.inter(j, i) {
                    return Err(ModelError::NotReciprocal { i, j });
                }
            }
        }
        Ok(())
    }

    pub fn relay_count(&self) -> usize {
        self.sr_gain.len()
    }

    pub fn sr(&self, i: usize) -> f64 {
        self.sr_gain[i]
    }

    pub fn rd(&self, j: usize) -> f64 {
        self.rd_gain[j]
    }

    pub fn inter(&self, i: usize, j: usize) -> f64 {
        self.inter_gain[i * self.relay_count() + j]
    }

    pub fn sr_gains(&self) -> &[f64] {
        &self.sr_gain
    }

    pub fn rd_gains(&self) -> &[f64] {
        &self.rd_gain
    }

    pub fn sr_mut(&mut self) -> &mut [f64] {
        &mut self.sr_gain
    }

    pub fn rd_mut(&mut self) -> &mut [f64] {
        &mut self.rd_gain
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set_inter(&mut self, i: usize, j: usize, e2: f64) {
        let n = self.relay_count();
        if i != j {
            self.inter_gain[i * n + j] = e2;
            self.inter_gain[j * n + i] = e2;
        }
    }

    /// Multiplies every gain by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let s = |v: &Vec<f64>| v.iter().map(|x| x * c).collect();
        ChannelRealization {
            sr_gain: s(&self.sr_gain),
            rd_gain: s(&self.rd_gain),
            inter_gain: s(&self.inter_gain),
        }
    }
}

/// Bits stored at each relay.
#[derive(Debug, Clone, PartialEq)]
pub struct BufferState {
    pub levels: Vec<f64>,
}

impl BufferState {
    pub fn filled(n: usize, bits: f64) -> Self {
        BufferState { levels: vec![bits; n] }
    }

    pub fn level(&self, i: usize) -> f64 {
        self.levels[i]
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// Non-empty closed interval of admissible relay powers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerInterval {
    lo: f64,
    hi: f64,
}

impl PowerInterval {
    /// `None` when `lo > hi` (or either bound is NaN).
    pub fn new(lo: f64, hi: f64) -> Option<Self> {
        (lo <= hi).then_some(PowerInterval { lo, hi })
    }

    pub fn p_min(&self) -> f64 {
        self.lo
    }

    pub fn p_max(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lo <= p && p <= self.hi
    }
}

/// What the network does in one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decision {
    /// Relay `rx` receives from the source while relay `tx` forwards to the
    /// destination at power `power`.
    Pair {
        rx: usize,
        tx: usize,
        power: f64,
        rate_sr: f64,
        rate_rd: f64,
    },
    HdReceive {
        rx: usize,
        rate_sr: f64,
    },
    HdTransmit {
        tx: usize,
        power: f64,
        rate_rd: f64,
    },
    Idle,
}

impl Decision {
    pub fn rate_sr(&self) -> f64 {
        match *self {
            Decision::Pair { rate_sr, .. } | Decision::HdReceive { rate_sr, .. } => rate_sr,
            _ => 0.0,
        }
    }

    pub fn rate_rd(&self) -> f64 {
        match *self {
            Decision::Pair { rate_rd, .. } | Decision::HdTransmit { rate_rd, .. } => rate_rd,
            _ => 0.0,
        }
    }

    pub fn sum_rate(&self) -> f64 {
        self.rate_sr() + self.rate_rd()
    }

    pub fn mode(&self) -> Mode {
        match self {
            Decision::Pair { .. } => Mode::Pair,
            Decision::HdReceive { .. } => Mode::HdReceive,
            Decision::HdTransmit { .. } => Mode::HdTransmit,
            Decision::Idle => Mode::Idle,
        }
    }
}

/// Tag of a [`Decision`] variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Pair,
    HdReceive,
    HdTransmit,
    Idle,
}

/// Work counters of a selection routine.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Evaluations {
    /// Sum-throughput evaluations.
    pub throughput: u64,
    /// Ratio-metric computations (RSS only).
    pub ratio_metric: u64,
}

impl AddAssign for Evaluations {
    fn add_assign(&mut self, rhs: Self) {
        self.throughput += rhs.throughput;
        self.ratio_metric += rhs.ratio_metric;
    }
}

/// SINR at receiving relay `i` while a relay with inter-relay gain `e2_ij`
/// transmits at `p_j`.
pub fn sinr_sr(params: &SystemParams, g2_i: f64, e2_ij: f64, p_j: f64) -> f64 {
    params.source_power * g2_i / (params.noise_power + p_j * e2_ij)
}

/// SNR at the destination.
pub fn snr_rd(params: &SystemParams, h2_j: f64, p_j: f64) -> f64 {
    p_j * h2_j / params.noise_power
}

/// S-R achievable rate `log2(1 + P_s g² / (N_0 + P_j e²))`.
pub fn rate_sr(params: &SystemParams, g2_i: f64, e2_ij: f64, p_j: f64) -> f64 {
    sinr_sr(params, g2_i, e2_ij, p_j).ln_1p() / std::f64::consts::LN_2
}

/// R-D achievable rate `log2(1 + P_j h² / N_0)`.
pub fn rate_rd(params: &SystemParams, h2_j: f64, p_j: f64) -> f64 {
    snr_rd(params, h2_j, p_j).ln_1p() / std::f64::consts::LN_2
}

/// `2^x - 1`, or `None` when the exponent is past [`MAX_EXPONENT`].
fn exp2_m1(x: f64) -> Option<f64> {
    (x <= MAX_EXPONENT).then(|| x.exp2() - 1.0)
}

fn check_pair(n: usize, rx: usize, tx: usize) -> Result<(), ModelError> {
    if rx >= n || tx >= n {
        return Err(ModelError::IndexOutOfRange { rx, tx, n });
    }
    if rx == tx {
        return Err(ModelError::SameRelay(rx));
    }
    Ok(())
}

/// Interval of relay powers satisfying every constraint for receiver `rx`
/// and transmitter `tx`, or `Ok(None)` when the pair is infeasible.
pub fn power_bounds(
    params: &SystemParams,
    chan: &ChannelRealization,
    buffers: &BufferState,
    rx: usize,
    tx: usize,
) -> Result<Option<PowerInterval>, ModelError> {
    check_pair(chan.relay_count(), rx, tx)?;
    if buffers.len() != chan.relay_count() {
        return Err(ModelError::DimensionMismatch {
            expected: chan.relay_count(),
            found: buffers.len(),
        });
    }
    Ok(bounds_unchecked(params, chan, buffers, rx, tx))
}

pub(crate) fn bounds_unchecked(
    params: &SystemParams,
    chan: &ChannelRealization,
    buffers: &BufferState,
    rx: usize,
    tx: usize,
) -> Option<PowerInterval> {
    let (g2, h2, e2) = (chan.sr(rx), chan.rd(tx), chan.inter(rx, tx));
    let n0 = params.noise_power;
    let ps = params.source_power;
    let t = params.slot_duration;
    let (phi1, phi2) = (params.phi_sr(), params.phi_rd());

    // (free space at rx, stored bits at tx)
    let buffer = match params.buffer {
        BufferCapacity::Finite(qmax) => {
            let space = qmax - buffers.level(rx);
            let stored = buffers.level(tx);
            if space <= 0.0 || stored <= 0.0 {
                return None;
            }
            Some((space, stored))
        }
        BufferCapacity::Infinite => None,
    };

    let mut lo = 0.0_f64;
    let mut hi = params.max_relay_power;

    if phi2 > 0.0 {
        if h2 <= 0.0 {
            return None;
        }
        lo = lo.max(phi2 * n0 / h2);
    }

    if e2 > 0.0 {
        if phi1 > 0.0 {
            hi = hi.min((ps * g2 - phi1 * n0) / (phi1 * e2));
        }
    } else if ps * g2 / n0 < phi1 {
        return None;
    }

    if let Some((space, stored)) = buffer {
        if h2 > 0.0 {
            if let Some(snr_cap) = exp2_m1(stored / t) {
                hi = hi.min(n0 * snr_cap / h2);
            }
        }
        if let Some(sinr_cap) = exp2_m1(space / t) {
            if e2 > 0.0 {
                lo = lo.max(ps * g2 / (sinr_cap * e2) - n0 / e2);
            } else if ps * g2 / n0 > sinr_cap {
                return None;
            }
        }
    }

    PowerInterval::new(lo, hi)
}

/// Sum-throughput `R_SR + R_RD` of pair `(rx, tx)` at relay power `p_j`.
pub fn sum_throughput(
    params: &SystemParams,
    chan: &ChannelRealization,
    rx: usize,
    tx: usize,
    p_j: f64,
    evals: &mut Evaluations,
) -> f64 {
    evals.throughput += 1;
    rate_sr(params, chan.sr(rx), chan.inter(rx, tx), p_j) + rate_rd(params, chan.rd(tx), p_j)
}

/// Power at one endpoint of the feasible interval and the sum-throughput
/// reached there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryOptimum {
    pub power: f64,
    pub throughput: f64,
}

/// Evaluates the sum-throughput at both ends of `interval` and keeps the
/// larger; the upper end wins ties.
pub fn best_in_interval(
    params: &SystemParams,
    chan: &ChannelRealization,
    rx: usize,
    tx: usize,
    interval: PowerInterval,
    evals: &mut Evaluations,
) -> BoundaryOptimum {
    let at_lo = sum_throughput(params, chan, rx, tx, interval.p_min(), evals);
    let at_hi = sum_throughput(params, chan, rx, tx, interval.p_max(), evals);
    if at_lo > at_hi {
        BoundaryOptimum {
            power: interval.p_min(),
            throughput: at_lo,
        }
    } else {
        BoundaryOptimum {
            power: interval.p_max(),
            throughput: at_hi,
        }
    }
}

/// Optimal relay power of a fixed pair. The sum-throughput is a log of a
/// quadratic-over-linear function of the power, so its maximum over an
/// interval sits at an endpoint.
pub fn best_boundary_power(
    params: &SystemParams,
    chan: &ChannelRealization,
    buffers: &BufferState,
    rx: usize,
    tx: usize,
    evals: &mut Evaluations,
) -> Result<Option<BoundaryOptimum>, ModelError> {
    Ok(power_bounds(params, chan, buffers, rx, tx)?.map(|iv| best_in_interval(params, chan, rx, tx, iv, evals)))
}

/// Builds the `Pair` decision for a power, with rates from the model.
pub fn pair_decision(params: &SystemParams, chan: &ChannelRealization, rx: usize, tx: usize, power: f64) -> Decision {
    Decision::Pair {
        rx,
        tx,
        power,
        rate_sr: rate_sr(params, chan.sr(rx), chan.inter(rx, tx), power),
        rate_rd: rate_rd(params, chan.rd(tx), power),
    }
}

//! Brute-force references for the selection code. Never used by the schemes.

use rand::Rng;

use crate::channel::{sample_realization, slot_rng, FadingSpec, StreamPurpose};
use crate::error::ModelError;
use crate::model::{
    best_boundary_power, pair_decision, power_bounds, rate_rd, rate_sr, BufferCapacity, BufferState,
    ChannelRealization, Decision, Evaluations, SystemParams,
};
use crate::par::{map_indices, Execution};
use crate::schemes::{hd_fallback, jpass_select, SelectionContext};

fn tau(params: &SystemParams, chan: &ChannelRealization, rx: usize, tx: usize, p: f64) -> f64 {
    rate_sr(params, chan.sr(rx), chan.inter(rx, tx), p) + rate_rd(params, chan.rd(tx), p)
}

/// Largest sum-throughput over `grid_points` evenly spaced powers spanning
/// the feasible interval, endpoints included. Returns `(power, throughput)`.
pub fn grid_optimal_power(
    params: &SystemParams,
    chan: &ChannelRealization,
    buffers: &BufferState,
    rx: usize,
    tx: usize,
    grid_points: usize,
) -> Result<Option<(f64, f64)>, ModelError> {
    let Some(iv) = power_bounds(params, chan, buffers, rx, tx)? else {
        return Ok(None);
    };
    let points = grid_points.max(2);
    let (lo, hi) = (iv.p_min(), iv.p_max());
    let step = (hi - lo) / (points - 1) as f64;
    let best = (0..points)
        .map(|k| if k == points - 1 { hi } else { lo + step * k as f64 })
        .map(|p| (p, tau(params, chan, rx, tx, p)))
        .fold(
            (lo, f64::NEG_INFINITY),
            |best, cand| if cand.1 > best.1 { cand } else { best },
        );
    Ok(Some(best))
}

/// Every ordered pair at both interval endpoints, sorted by throughput; the
/// first entry is the optimum. Half-duplex when nothing is feasible.
pub fn exhaustive_select(ctx: &SelectionContext<'_>) -> Decision {
    let n = ctx.chan.relay_count();
    let mut candidates: Vec<(f64, usize, usize, f64)> = (0..n)
        .flat_map(|rx| (0..n).map(move |tx| (rx, tx)))
        .filter(|(rx, tx)| rx != tx)
        .filter_map(|(rx, tx)| {
            power_bounds(ctx.params, ctx.chan, ctx.buffers, rx, tx)
                .expect("indices are in range")
                .map(|iv| (rx, tx, iv))
        })
        .flat_map(|(rx, tx, iv)| [iv.p_min(), iv.p_max()].map(|p| (tau(ctx.params, ctx.chan, rx, tx, p), rx, tx, p)))
        .collect();
    candidates.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
            .then(b.3.total_cmp(&a.3))
    });
    match candidates.first() {
        Some(&(_, rx, tx, p)) => pair_decision(ctx.params, ctx.chan, rx, tx, p),
        None => hd_fallback(ctx),
    }
}

/// A random network state: parameters, channels and buffers.
#[derive(Debug, Clone)]
pub struct RandomState {
    pub params: SystemParams,
    pub chan: ChannelRealization,
    pub buffers: BufferState,
}

/// Draws a state with `n` in `2..=8`, `P_max` in `[0, 30]` dB (`P_s`
/// independently in the same range), rate floors in `[0, 3]` and, half of the
/// time, finite buffers with random levels.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> RandomState {
    let n = rng.random_range(2..=8usize);
    let db = |rng: &mut R| 10f64.powf(rng.random_range(0.0..=30.0) / 10.0);
    let buffer = if rng.random_bool(0.5) {
        BufferCapacity::Finite(rng.random_range(1.0..40.0))
    } else {
        BufferCapacity::Infinite
    };
    let params = SystemParams {
        max_relay_power: db(rng),
        source_power: db(rng),
        noise_power: 1.0,
        min_rate_sr: rng.random_range(0.0..3.0),
        min_rate_rd: rng.random_range(0.0..3.0),
        slot_duration: 1.0,
        buffer,
        relay_count: n,
    };
    let chan = sample_realization(&FadingSpec::unit(n), rng);
    let cap = match buffer {
        BufferCapacity::Finite(q) => q,
        BufferCapacity::Infinite => 40.0,
    };
    let buffers = BufferState {
        levels: (0..n).map(|_| rng.random_range(0.0..=cap)).collect(),
    };
    RandomState { params, chan, buffers }
}

/// Result of [`audit`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuditReport {
    /// Feasible `(state, pair)` instances checked against the grid.
    pub instances: usize,
    /// Largest amount by which a grid point beat the boundary optimum.
    pub max_grid_excess: f64,
    /// Instances where that amount exceeded the tolerance.
    pub boundary_violations: usize,
    pub contexts: usize,
    /// Contexts where JPASS and the exhaustive search realize different
    /// sum-throughputs.
    pub selection_mismatches: usize,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.boundary_violations == 0 && self.selection_mismatches == 0
    }
}

/// Tolerance of the boundary-optimality check.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

/// Draws feasible instances until one is found; `None` after many misses.
fn feasible_instance(seed: u64, index: u64) -> Option<(RandomState, usize, usize)> {
    let mut rng = slot_rng(seed, StreamPurpose::Fading, index);
    for _ in 0..10_000 {
        let st = random_state(&mut rng);
        let n = st.params.relay_count;
        let rx = rng.random_range(0..n);
        let tx = (rx + rng.random_range(1..n)) % n;
        if matches!(power_bounds(&st.params, &st.chan, &st.buffers, rx, tx), Ok(Some(_))) {
            return Some((st, rx, tx));
        }
    }
    None
}

/// Checks the boundary rule against a `grid_points` grid on `instances`
/// feasible random instances, and JPASS against [`exhaustive_select`] on
/// `contexts` random states.
pub fn audit(instances: usize, contexts: usize, grid_points: usize, seed: u64, exec: Execution) -> AuditReport {
    let excess = map_indices(exec, instances, |k| {
        let (st, rx, tx) = feasible_instance(seed, k as u64).expect("feasible instance");
        let best = best_boundary_power(&st.params, &st.chan, &st.buffers, rx, tx, &mut Evaluations::default())
            .expect("valid pair")
            .expect("feasible");
        let (_, grid) = grid_optimal_power(&st.params, &st.chan, &st.buffers, rx, tx, grid_points)
            .expect("valid pair")
            .expect("feasible");
        grid - best.throughput
    });
    let mismatches = map_indices(exec, contexts, |k| {
        let mut rng = slot_rng(seed ^ 0x5eed, StreamPurpose::CsiError, k as u64);
        let st = random_state(&mut rng);
        let ctx = SelectionContext::perfect(&st.params, &st.chan, &st.buffers);
        let a = jpass_select(&ctx, &mut Evaluations::default());
        let b = exhaustive_select(&ctx);
        a.sum_rate() != b.sum_rate()
    });
    AuditReport {
        instances,
        max_grid_excess: excess.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        boundary_violations: excess.iter().filter(|&&d| d > BOUNDARY_TOLERANCE).count(),
        contexts,
        selection_mismatches: mismatches.into_iter().filter(|&m| m).count(),
    }
}

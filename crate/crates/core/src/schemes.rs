//! Per-slot relay selection policies.
//!
//! Every policy maps a [`SelectionContext`] to a [`Decision`]. JPASS and RSS
//! choose among the pairs whose power interval is nonempty and put the relay
//! power at an interval endpoint; the baselines (MMRS, BA-SOR, min-power,
//! CHD) are reconstructions from one-line descriptions of the original
//! schemes and should be read as approximations.

use std::fmt;
use std::str::FromStr;

use crate::model::{
    best_in_interval, bounds_unchecked, pair_decision, rate_rd, rate_sr, sinr_sr, snr_rd, BufferCapacity, BufferState,
    ChannelRealization, Decision, Evaluations, PowerInterval, SystemParams,
};

/// Selection policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeId {
    Jpass,
    Rss,
    Mmrs,
    BaSor,
    MinPower,
    Chd,
}

impl SchemeId {
    pub const ALL: [SchemeId; 6] = [
        SchemeId::Jpass,
        SchemeId::Rss,
        SchemeId::Mmrs,
        SchemeId::BaSor,
        SchemeId::MinPower,
        SchemeId::Chd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::Jpass => "jpass",
            SchemeId::Rss => "rss",
            SchemeId::Mmrs => "mmrs",
            SchemeId::BaSor => "ba-sor",
            SchemeId::MinPower => "min-power",
            SchemeId::Chd => "chd",
        }
    }

    pub fn allowed_names() -> String {
        Self::ALL.map(Self::name).join(", ")
    }

    /// Runs the policy on `ctx`.
    pub fn select(self, ctx: &SelectionContext<'_>, evals: &mut Evaluations) -> Decision {
        match self {
            SchemeId::Jpass => jpass_select(ctx, evals),
            SchemeId::Rss => rss_select(ctx, evals),
            SchemeId::Mmrs => mmrs_select(ctx),
            SchemeId::BaSor => basor_select(ctx),
            SchemeId::MinPower => minpower_select(ctx),
            SchemeId::Chd => chd_select(ctx),
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| format!("unknown scheme {s:?}; expected one of: {}", Self::allowed_names()))
    }
}

/// Phase of the conventional half-duplex cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChdPhase {
    #[default]
    Receive,
    Transmit,
}

impl ChdPhase {
    /// Even slots receive, odd slots transmit.
    pub fn for_slot(slot: u64) -> Self {
        if slot.is_multiple_of(2) {
            ChdPhase::Receive
        } else {
            ChdPhase::Transmit
        }
    }
}

/// Everything a policy may look at in one slot.
#[derive(Debug, Clone, Copy)]
pub struct SelectionContext<'a> {
    pub params: &'a SystemParams,
    /// Channels used to decide; estimates under imperfect CSI.
    pub chan: &'a ChannelRealization,
    /// Channels the decision is realized on.
    pub true_chan: &'a ChannelRealization,
    pub buffers: &'a BufferState,
    pub chd_phase: ChdPhase,
}

impl<'a> SelectionContext<'a> {
    /// Context with perfect CSI.
    pub fn perfect(params: &'a SystemParams, chan: &'a ChannelRealization, buffers: &'a BufferState) -> Self {
        SelectionContext {
            params,
            chan,
            true_chan: chan,
            buffers,
            chd_phase: ChdPhase::Receive,
        }
    }

    pub fn with_phase(self, chd_phase: ChdPhase) -> Self {
        SelectionContext { chd_phase, ..self }
    }

    fn n(&self) -> usize {
        self.chan.relay_count()
    }

    /// Free space at relay `i` in bits.
    fn space(&self, i: usize) -> f64 {
        match self.params.buffer {
            BufferCapacity::Finite(qmax) => qmax - self.buffers.level(i),
            BufferCapacity::Infinite => f64::INFINITY,
        }
    }

    /// Bits relay `j` can send.
    fn stored(&self, j: usize) -> f64 {
        match self.params.buffer {
            BufferCapacity::Finite(_) => self.buffers.level(j),
            BufferCapacity::Infinite => f64::INFINITY,
        }
    }

    fn has_data(&self, j: usize) -> bool {
        self.stored(j) > 0.0
    }

    /// Largest power at which relay `j` does not send more than it stores.
    fn drain_limited_power(&self, j: usize) -> f64 {
        let p = self.params;
        let h2 = self.chan.rd(j);
        let stored = self.stored(j);
        let x = stored / p.slot_duration;
        if h2 <= 0.0 || x > crate::model::MAX_EXPONENT {
            return p.max_relay_power;
        }
        p.max_relay_power.min(p.noise_power * (x.exp2() - 1.0) / h2)
    }
}

/// Ordered pair with a nonempty power interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasiblePair {
    pub rx: usize,
    pub tx: usize,
    pub interval: PowerInterval,
}

/// All ordered pairs `(rx, tx)`, `rx != tx`, that admit some relay power;
/// sorted by `rx` then `tx`.
pub fn feasible_pairs(ctx: &SelectionContext<'_>) -> Vec<FeasiblePair> {
    let n = ctx.n();
    let mut out = Vec::with_capacity(n * (n - 1));
    for rx in 0..n {
        for tx in (0..n).filter(|&tx| tx != rx) {
            if let Some(interval) = bounds_unchecked(ctx.params, ctx.chan, ctx.buffers, rx, tx) {
                out.push(FeasiblePair { rx, tx, interval });
            }
        }
    }
    out
}

/// Joint power allocation and selection: the best endpoint power over every
/// feasible pair. Falls back to half-duplex when no pair is feasible.
pub fn jpass_select(ctx: &SelectionContext<'_>, evals: &mut Evaluations) -> Decision {
    let mut best: Option<(FeasiblePair, f64, f64)> = None;
    for pair in feasible_pairs(ctx) {
        let opt = best_in_interval(ctx.params, ctx.chan, pair.rx, pair.tx, pair.interval, evals);
        // Pairs arrive in (rx, tx) order, so keeping the first maximum breaks
        // ties towards the smaller indices.
        if best.is_none_or(|(_, _, tau)| opt.throughput > tau) {
            best = Some((pair, opt.power, opt.throughput));
        }
    }
    match best {
        Some((pair, power, _)) => pair_decision(ctx.params, ctx.chan, pair.rx, pair.tx, power),
        None => hd_fallback(ctx),
    }
}

/// Ranking key of the RSS ratio `g² h² / e²`. Zero-interference pairs rank
/// above all others and among themselves by `g² h²`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
struct RatioKey {
    interference_free: bool,
    value: f64,
}

fn ratio_key(chan: &ChannelRealization, rx: usize, tx: usize) -> RatioKey {
    let gh = chan.sr(rx) * chan.rd(tx);
    let e2 = chan.inter(rx, tx);
    if e2 > 0.0 {
        RatioKey {
            interference_free: false,
            value: gh / e2,
        }
    } else {
        RatioKey {
            interference_free: true,
            value: gh,
        }
    }
}

/// Ratio selection: among feasible pairs take the one maximizing
/// `g² h² / e²`, then place its power at the better interval endpoint.
pub fn rss_select(ctx: &SelectionContext<'_>, evals: &mut Evaluations) -> Decision {
    let mut best: Option<(FeasiblePair, RatioKey)> = None;
    for pair in feasible_pairs(ctx) {
        evals.ratio_metric += 1;
        let key = ratio_key(ctx.chan, pair.rx, pair.tx);
        if best.is_none_or(|(_, k)| key > k) {
            best = Some((pair, key));
        }
    }
    match best {
        Some((pair, _)) => {
            let opt = best_in_interval(ctx.params, ctx.chan, pair.rx, pair.tx, pair.interval, evals);
            pair_decision(ctx.params, ctx.chan, pair.rx, pair.tx, opt.power)
        }
        None => hd_fallback(ctx),
    }
}

/// First index with the largest value; `None` for an empty iterator.
fn argmax(items: impl IntoIterator<Item = (usize, f64)>) -> Option<(usize, f64)> {
    items.into_iter().fold(None, |best, (i, v)| match best {
        Some((_, bv)) if bv >= v => best,
        _ => Some((i, v)),
    })
}

/// Best relay to receive from the source with no relay transmitting; it
/// must fit a full slot of data.
fn best_receiver(ctx: &SelectionContext<'_>) -> Option<(usize, f64)> {
    let t = ctx.params.slot_duration;
    argmax((0..ctx.n()).filter_map(|i| {
        let rate = rate_sr(ctx.params, ctx.chan.sr(i), 0.0, 0.0);
        (rate * t <= ctx.space(i)).then_some((i, rate))
    }))
}

/// Best relay to forward to the destination alone, at the largest power its
/// buffer allows. Returns `(relay, power, rate)`.
fn best_transmitter(ctx: &SelectionContext<'_>) -> Option<(usize, f64, f64)> {
    let best = argmax((0..ctx.n()).filter(|&j| ctx.has_data(j)).map(|j| {
        let p = ctx.drain_limited_power(j);
        (j, rate_rd(ctx.params, ctx.chan.rd(j), p))
    }))?;
    Some((best.0, ctx.drain_limited_power(best.0), best.1))
}

/// Half-duplex slot used when no relay pair is feasible: the better of the
/// best S-R link and the best R-D link, receive winning ties. Rate
/// thresholds are not enforced here.
pub fn hd_fallback(ctx: &SelectionContext<'_>) -> Decision {
    match (best_receiver(ctx), best_transmitter(ctx)) {
        (Some((rx, r)), Some((_, _, t))) if r >= t => Decision::HdReceive { rx, rate_sr: r },
        (_, Some((tx, power, rate_rd))) => Decision::HdTransmit { tx, power, rate_rd },
        (Some((rx, rate_sr)), None) => Decision::HdReceive { rx, rate_sr },
        (None, None) => Decision::Idle,
    }
}

/// `(rx, tx)` at the transmitter's full power, capped only by what its buffer
/// holds, if that power meets every pair constraint.
fn full_power_pair(ctx: &SelectionContext<'_>, rx: usize, tx: usize) -> Option<Decision> {
    let power = ctx.drain_limited_power(tx);
    let iv = bounds_unchecked(ctx.params, ctx.chan, ctx.buffers, rx, tx)?;
    (iv.p_min() <= power && power <= iv.p_max()).then(|| pair_decision(ctx.params, ctx.chan, rx, tx, power))
}

/// Relay indices by decreasing gain, lower index first on ties.
fn ranked(n: usize, gain: impl Fn(usize) -> f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| gain(b).total_cmp(&gain(a)).then(a.cmp(&b)));
    idx
}

/// Max-max selection: the strongest S-R relay receives and the strongest R-D
/// relay transmits at full power. Interference is ignored while ranking;
/// pairs that break a rate or buffer constraint at full power are skipped,
/// receivers taking precedence. Half-duplex when no pair qualifies.
pub fn mmrs_select(ctx: &SelectionContext<'_>) -> Decision {
    let receivers = ranked(ctx.n(), |i| ctx.chan.sr(i));
    let transmitters = ranked(ctx.n(), |j| ctx.chan.rd(j));
    receivers
        .iter()
        .flat_map(|&rx| {
            transmitters
                .iter()
                .filter(move |&&tx| tx != rx)
                .map(move |&tx| (rx, tx))
        })
        .find_map(|(rx, tx)| full_power_pair(ctx, rx, tx))
        .unwrap_or_else(|| hd_fallback(ctx))
}

/// BA-SOR style max-min selection: the pair maximizing
/// `min(SINR_sr, SNR_rd)` at full power among pairs meeting every
/// constraint at that power. Half-duplex when none does.
pub fn basor_select(ctx: &SelectionContext<'_>) -> Decision {
    let p = ctx.params;
    let mut best: Option<(Decision, f64)> = None;
    for rx in 0..ctx.n() {
        for tx in (0..ctx.n()).filter(|&j| j != rx) {
            let Some(d) = full_power_pair(ctx, rx, tx) else {
                continue;
            };
            let power = ctx.drain_limited_power(tx);
            let score =
                sinr_sr(p, ctx.chan.sr(rx), ctx.chan.inter(rx, tx), power).min(snr_rd(p, ctx.chan.rd(tx), power));
            if best.as_ref().is_none_or(|(_, s)| score > *s) {
                best = Some((d, score));
            }
        }
    }
    best.map(|(d, _)| d).unwrap_or_else(|| hd_fallback(ctx))
}

/// Min-power selection: the pair meeting both target rates with the least
/// relay power. The slot carries exactly the target rates.
pub fn minpower_select(ctx: &SelectionContext<'_>) -> Decision {
    let p = ctx.params;
    let t = p.slot_duration;
    let (phi1, phi2) = (p.phi_sr(), p.phi_rd());
    let mut best: Option<((usize, usize), f64)> = None;
    for tx in 0..ctx.n() {
        let h2 = ctx.chan.rd(tx);
        let power = if phi2 == 0.0 { 0.0 } else { phi2 * p.noise_power / h2 };
        if power > p.max_relay_power || p.min_rate_rd * t > ctx.stored(tx) {
            continue;
        }
        for rx in (0..ctx.n()).filter(|&i| i != tx) {
            let admissible = sinr_sr(p, ctx.chan.sr(rx), ctx.chan.inter(rx, tx), power) >= phi1
                && p.min_rate_sr * t <= ctx.space(rx);
            let better = match best {
                None => true,
                Some(((brx, btx), bp)) => power < bp || (power == bp && (rx, tx) < (brx, btx)),
            };
            if admissible && better {
                best = Some(((rx, tx), power));
            }
        }
    }
    match best {
        Some(((rx, tx), power)) => Decision::Pair {
            rx,
            tx,
            power,
            rate_sr: p.min_rate_sr,
            rate_rd: p.min_rate_rd,
        },
        None => match hd_fallback(ctx) {
            Decision::HdReceive { rx, rate_sr } => Decision::HdReceive {
                rx,
                rate_sr: rate_sr.min(p.min_rate_sr),
            },
            Decision::HdTransmit { tx, rate_rd, .. } if rate_rd > p.min_rate_rd => Decision::HdTransmit {
                tx,
                power: p.noise_power * phi2 / ctx.chan.rd(tx),
                rate_rd: p.min_rate_rd,
            },
            other => other,
        },
    }
}

/// Conventional half-duplex relaying: receive slots and transmit slots
/// alternate, one node active per slot.
pub fn chd_select(ctx: &SelectionContext<'_>) -> Decision {
    match ctx.chd_phase {
        ChdPhase::Receive => best_receiver(ctx)
            .map(|(rx, rate_sr)| Decision::HdReceive { rx, rate_sr })
            .unwrap_or(Decision::Idle),
        ChdPhase::Transmit => best_transmitter(ctx)
            .map(|(tx, power, rate_rd)| Decision::HdTransmit { tx, power, rate_rd })
            .unwrap_or(Decision::Idle),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(ps: f64, pmax: f64) -> SystemParams {
        SystemParams {
            source_power: ps,
            max_relay_power: pmax,
            ..SystemParams::default()
        }
    }

    fn chan(g: &[f64], h: &[f64], e: f64) -> ChannelRealization {
        ChannelRealization::uniform_inter(g.to_vec(), h.to_vec(), e).unwrap()
    }

    #[test]
    fn scheme_names_round_trip() {
        for id in SchemeId::ALL {
            assert_eq!(id.name().parse::<SchemeId>().unwrap(), id);
        }
        let err = "JPASS".parse::<SchemeId>().unwrap_err();
        assert!(err.contains("jpass, rss, mmrs, ba-sor, min-power, chd"));
    }

    #[test]
    fn feasible_pairs_enumeration() {
        let p = params(10.0, 10.0);
        let c = chan(&[1.0, 1.0], &[1.0, 1.0], 0.1);
        let b = BufferState::filled(2, 100.0);
        let ctx = SelectionContext::perfect(&p, &c, &b);
        let pairs = feasible_pairs(&ctx);
        assert_eq!(pairs.len(), 2);
        assert_eq!((pairs[0].rx, pairs[0].tx), (0, 1));
        assert_eq!((pairs[1].rx, pairs[1].tx), (1, 0));
        for fp in pairs {
            assert_abs_diff_eq!(fp.interval.p_min(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(fp.interval.p_max(), 10.0, epsilon = 1e-12);
        }

        let finite = SystemParams {
            buffer: BufferCapacity::Finite(10.0),
            ..p
        };
        let empty = BufferState::filled(2, 0.0);
        assert!(feasible_pairs(&SelectionContext::perfect(&finite, &c, &empty)).is_empty());
    }

    #[test]
    fn jpass_single_feasible_pair() {
        // h = 0 at relay 0 leaves (0 -> 1) as the only feasible pair.
        let p = params(10.0, 10.0);
        let c = chan(&[1.0, 1.0], &[0.0, 1.0], 0.1);
        let b = BufferState::filled(2, 100.0);
        let ctx = SelectionContext::perfect(&p, &c, &b);
        assert_eq!(feasible_pairs(&ctx).len(), 1);
        let mut ev = Evaluations::default();
        match jpass_select(&ctx, &mut ev) {
            Decision::Pair {
                rx,
                tx,
                power,
                rate_sr,
                rate_rd,
            } => {
                assert_eq!((rx, tx, power), (0, 1, 10.0));
                assert_abs_diff_eq!(rate_sr, 2.5850, epsilon = 1e-4);
                assert_abs_diff_eq!(rate_rd, 3.4594, epsilon = 1e-4);
            }
            d => panic!("unexpected {d:?}"),
        }
        assert_eq!(ev.throughput, 2);

        let mut ev_rss = Evaluations::default();
        assert_eq!(
            rss_select(&ctx, &mut ev_rss),
            jpass_select(&ctx, &mut Evaluations::default())
        );
        assert_eq!(ev_rss.throughput, 2);
    }

    #[test]
    fn jpass_picks_larger_of_two_examples() {
        // n = 4 with a low-interference pair (0 -> 1), a high-interference
        // pair (2 -> 3) and strongly coupled cross pairs.
        let p = SystemParams {
            source_power: 100.0,
            max_relay_power: 10.0,
            min_rate_sr: 0.5,
            min_rate_rd: 0.1,
            ..SystemParams::default()
        };
        let mut c = ChannelRealization::zeros(4);
        c.sr_mut().copy_from_slice(&[0.1, 0.0, 1.0, 0.0]);
        c.rd_mut().copy_from_slice(&[0.0, 1.0, 0.0, 0.05]);
        c.set_inter(0, 1, 0.1);
        c.set_inter(2, 3, 10.0);
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            c.set_inter(i, j, 1e3);
        }
        let b = BufferState::filled(4, 1.0);
        let ctx = SelectionContext::perfect(&p, &c, &b);

        // Oracle: every ordered pair, both endpoints.
        let mut best = (f64::NEG_INFINITY, 0, 0);
        for fp in feasible_pairs(&ctx) {
            for pw in [fp.interval.p_min(), fp.interval.p_max()] {
                let tau = rate_sr(&p, c.sr(fp.rx), c.inter(fp.rx, fp.tx), pw) + rate_rd(&p, c.rd(fp.tx), pw);
                if tau > best.0 {
                    best = (tau, fp.rx, fp.tx);
                }
            }
        }
        let mut ev = Evaluations::default();
        let d = jpass_select(&ctx, &mut ev);
        assert_eq!(ev.throughput, 2 * feasible_pairs(&ctx).len() as u64);
        match d {
            Decision::Pair { rx, tx, .. } => assert_eq!((rx, tx), (best.1, best.2)),
            d => panic!("unexpected {d:?}"),
        }
        assert_eq!(d.sum_rate(), best.0);
    }

    #[test]
    fn rss_metric_choice() {
        let p = params(10.0, 10.0);
        let c = chan(&[1.0, 4.0], &[9.0, 1.0], 1.0);
        let b = BufferState::filled(2, 100.0);
        let ctx = SelectionContext::perfect(&p, &c, &b);
        assert_eq!(feasible_pairs(&ctx).len(), 2);
        let mut ev = Evaluations::default();
        match rss_select(&ctx, &mut ev) {
            Decision::Pair { rx, tx, .. } => assert_eq!((rx, tx), (1, 0)),
            d => panic!("unexpected {d:?}"),
        }
        assert_eq!(ev.throughput, 2);
        assert_eq!(ev.ratio_metric, 2);
    }

    #[test]
    fn rss_zero_interference_pair_wins() {
        let p = params(10.0, 10.0);
        let mut c = ChannelRealization::zeros(3);
        c.sr_mut().copy_from_slice(&[5.0, 1.0, 1.0]);
        c.rd_mut().copy_from_slice(&[5.0, 1.0, 1.0]);
        c.set_inter(0, 1, 1e-3);
        c.set_inter(0, 2, 1e-3);
        c.set_inter(1, 2, 0.0);
        let b = BufferState::filled(3, 100.0);
        let ctx = SelectionContext::perfect(&p, &c, &b);
        match rss_select(&ctx, &mut Evaluations::default()) {
            Decision::Pair { rx, tx, .. } => assert_eq!((rx, tx), (1, 2)),
            d => panic!("unexpected {d:?}"),
        }
    }

    #[test]
    fn hd_fallback_cases() {
        let p = SystemParams {
            source_power: 10.0,
            max_relay_power: 10.0,
            buffer: BufferCapacity::Finite(10.0),
            ..SystemParams::default()
        };
        let c = chan(&[1.0, 1.0], &[1.0, 2.0], 0.1);

        let full = BufferState::filled(2, 10.0);
        let ctx = SelectionContext::perfect(&p, &c, &full);
        assert!(matches!(hd_fallback(&ctx), Decision::HdTransmit { .. }));

        let empty = BufferState::filled(2, 0.0);
        let g = chan(&[1.0, 3.0], &[1.0, 2.0], 0.1);
        let ctx = SelectionContext::perfect(&p, &g, &empty);
        match hd_fallback(&ctx) {
            Decision::HdReceive { rx, rate_sr } => {
                assert_eq!(rx, 1);
                assert_abs_diff_eq!(rate_sr, 31f64.log2(), epsilon = 1e-12);
            }
            d => panic!("unexpected {d:?}"),
        }

        // Equal receive and transmit rates: receive wins.
        let b = BufferState { levels: vec![4.0, 0.0] };
        let ctx = SelectionContext::perfect(&p, &c, &b);
        let (tx, power, rate) = best_transmitter(&ctx).unwrap();
        assert_eq!((tx, power), (0, 10.0));
        assert_abs_diff_eq!(rate, 11f64.log2(), epsilon = 1e-12);
        match hd_fallback(&ctx) {
            Decision::HdReceive { rx, rate_sr } => {
                assert_eq!(rx, 0);
                assert_abs_diff_eq!(rate_sr, 11f64.log2(), epsilon = 1e-12);
            }
            d => panic!("unexpected {d:?}"),
        }

        // No space and no data anywhere.
        let p0 = SystemParams {
            buffer: BufferCapacity::Finite(0.0),
            ..p
        };
        let ctx = SelectionContext::perfect(&p0, &c, &empty);
        assert_eq!(hd_fallback(&ctx), Decision::Idle);
    }

    #[test]
    fn mmrs_distinct_and_conflict() {
        let p = params(10.0, 10.0);
        let b3 = BufferState::filled(3, 100.0);
        let c = chan(&[3.0, 1.0, 2.0], &[1.0, 5.0, 2.0], 0.5);
        let ctx = SelectionContext::perfect(&p, &c, &b3);
        match mmrs_select(&ctx) {
            Decision::Pair { rx, tx, power, .. } => assert_eq!((rx, tx, power), (0, 1, 10.0)),
            d => panic!("unexpected {d:?}"),
        }

        // Relay 0 is best on both hops; it keeps the receive role.
        let b2 = BufferState::filled(2, 100.0);
        let c = chan(&[3.0, 1.0], &[5.0, 1.0], 0.5);
        let ctx = SelectionContext::perfect(&p, &c, &b2);
        match mmrs_select(&ctx) {
            Decision::Pair { rx, tx, .. } => assert_eq!((rx, tx), (0, 1)),
            d => panic!("unexpected {d:?}"),
        }
    }

    #[test]
    fn mmrs_skips_pairs_broken_at_full_power() {
        let p = params(10.0, 10.0);
        let b = BufferState::filled(3, 100.0);
        let mut c = chan(&[3.0, 1.0, 2.0], &[1.0, 5.0, 2.0], 0.5);
        // SINR of 0 <- 1 drops to 30 / 101 at full power.
        c.set_inter(0, 1, 10.0);
        let ctx = SelectionContext::perfect(&p, &c, &b);
        match mmrs_select(&ctx) {
            Decision::Pair { rx, tx, power, .. } => assert_eq!((rx, tx, power), (0, 2, 10.0)),
            d => panic!("unexpected {d:?}"),
        }
        // Nothing works at full power: half-duplex, even though JPASS finds
        // a pair at lower power.
        let c = chan(&[1.0, 1.0], &[1.0, 1.0], 2.0);
        let b2 = BufferState::filled(2, 100.0);
        let ctx = SelectionContext::perfect(&p, &c, &b2);
        assert!(matches!(mmrs_select(&ctx), Decision::HdReceive { .. }));
        assert!(matches!(basor_select(&ctx), Decision::HdReceive { .. }));
        assert!(matches!(
            jpass_select(&ctx, &mut Evaluations::default()),
            Decision::Pair { .. }
        ));
    }

    #[test]
    fn mmrs_without_data_receives() {
        let p = SystemParams {
            buffer: BufferCapacity::Finite(50.0),
            ..params(10.0, 10.0)
        };
        let c = chan(&[3.0, 1.0, 2.0], &[1.0, 5.0, 2.0], 0.5);
        let b = BufferState::filled(3, 0.0);
        let ctx = SelectionContext::perfect(&p, &c, &b);
        match mmrs_select(&ctx) {
            Decision::HdReceive { rx, .. } => assert_eq!(rx, 0),
            d => panic!("unexpected {d:?}"),
        }
    }

    #[test]
    fn basor_scores() {
        let p = params(10.0, 10.0);
        let b = BufferState::filled(2, 100.0);
        // Example A channels: gamma_ij = 10 / 2 = 5, gamma_j = 10.
        let c = chan(&[1.0, 1.0], &[1.0, 1.0], 0.1);
        let ctx = SelectionContext::perfect(&p, &c, &b);
        assert_abs_diff_eq!(sinr_sr(&p, 1.0, 0.1, 10.0).min(snr_rd(&p, 1.0, 10.0)), 5.0);
        // Symmetric: tie broken to (0, 1).
        match basor_select(&ctx) {
            Decision::Pair { rx, tx, power, .. } => assert_eq!((rx, tx, power), (0, 1, 10.0)),
            d => panic!("unexpected {d:?}"),
        }
        // Pair (1 -> 0) scores min(10*1/(1+1), 10*1) = 5; (0 -> 1) scores
        // min(10*0.5/2, 10*0.2) = 2.
        let c = chan(&[0.5, 1.0], &[1.0, 0.2], 0.1);
        let ctx = SelectionContext::perfect(&p, &c, &b);
        match basor_select(&ctx) {
            Decision::Pair { rx, tx, .. } => assert_eq!((rx, tx), (1, 0)),
            d => panic!("unexpected {d:?}"),
        }
    }

    #[test]
    fn minpower_targets() {
        let p = params(10.0, 10.0);
        let b = BufferState::filled(2, 100.0);
        let c = chan(&[1.0, 1.0], &[0.5, 2.0], 0.1);
        let ctx = SelectionContext::perfect(&p, &c, &b);
        match minpower_select(&ctx) {
            Decision::Pair {
                rx,
                tx,
                power,
                rate_sr,
                rate_rd,
            } => {
                assert_eq!((rx, tx, power), (0, 1, 0.5));
                assert_eq!(rate_sr + rate_rd, 2.0);
            }
            d => panic!("unexpected {d:?}"),
        }

        // Nothing admissible: P_max below every required power.
        let weak = params(10.0, 0.1);
        let ctx = SelectionContext::perfect(&weak, &c, &b);
        match minpower_select(&ctx) {
            Decision::HdReceive { rate_sr, .. } => assert_eq!(rate_sr, 1.0),
            d => panic!("unexpected {d:?}"),
        }
        let poor = chan(&[0.01, 0.01], &[0.05, 0.1], 0.1);
        let ctx = SelectionContext::perfect(&weak, &poor, &b);
        match minpower_select(&ctx) {
            Decision::HdReceive { rate_sr, .. } => assert_abs_diff_eq!(rate_sr, 1.1f64.log2(), epsilon = 1e-12),
            d => panic!("unexpected {d:?}"),
        }
    }

    #[test]
    fn chd_alternates() {
        let p = SystemParams {
            buffer: BufferCapacity::Finite(50.0),
            ..params(10.0, 10.0)
        };
        let c = chan(&[1.0, 4.0], &[1.0, 1.0], 0.1);
        let empty = BufferState::filled(2, 0.0);
        let ctx = SelectionContext::perfect(&p, &c, &empty);
        match chd_select(&ctx.with_phase(ChdPhase::Receive)) {
            Decision::HdReceive { rx, rate_sr } => {
                assert_eq!(rx, 1);
                assert_abs_diff_eq!(rate_sr, 41f64.log2(), epsilon = 1e-12);
            }
            d => panic!("unexpected {d:?}"),
        }
        assert_eq!(chd_select(&ctx.with_phase(ChdPhase::Transmit)), Decision::Idle);
        assert_eq!(ChdPhase::for_slot(0), ChdPhase::Receive);
        assert_eq!(ChdPhase::for_slot(7), ChdPhase::Transmit);
    }
}

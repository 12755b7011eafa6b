//! Parameter sweeps and their CSV output.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::channel::{CsiErrorSpec, FadingSpec};
use crate::error::SweepError;
use crate::model::{BufferCapacity, SystemParams};
use crate::par::{map_slice, Execution};
use crate::schemes::SchemeId;
use crate::sim::{default_initial_fill, run_episode_with, EpisodeConfig, RunMetrics};

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 20] = [
    "scheme",
    "axis",
    "axis_value",
    "pmax_db",
    "n",
    "r1",
    "r2",
    "qmax",
    "qs",
    "sigma_eta_sq",
    "slots",
    "seed",
    "mean_sum",
    "mean_sr",
    "mean_rd",
    "mmht",
    "frac_pair",
    "frac_hd",
    "frac_idle",
    "evals",
];

/// `10^{dB/10}`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Quantity varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    PmaxDb,
    RelayCount,
    SigmaEtaSq,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 3] = [SweepAxis::PmaxDb, SweepAxis::RelayCount, SweepAxis::SigmaEtaSq];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::PmaxDb => "pmax_db",
            SweepAxis::RelayCount => "n",
            SweepAxis::SigmaEtaSq => "sigma_eta_sq",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| SweepError::UnknownAxis {
                name: s.to_string(),
                allowed: Self::ALL.map(Self::name).join(", "),
            })
    }
}

/// Source power setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourcePower {
    /// `P_s = mult · P_max`.
    FollowsPmax {
        mult: f64,
    },
    FixedDb(f64),
}

/// Fixed settings of every sweep point; the axis overrides one of them.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTemplate {
    pub pmax_db: f64,
    pub source_power: SourcePower,
    pub relay_count: usize,
    pub r1: f64,
    pub r2: f64,
    pub buffer: BufferCapacity,
    /// Initial fill; `None` picks the default for the buffer mode.
    pub initial_fill: Option<f64>,
    pub slots: u64,
    pub seed: u64,
    pub sigma_eta_sq: f64,
    pub csi_outage: bool,
    pub per_slot_reset: bool,
}

impl Default for SweepTemplate {
    fn default() -> Self {
        SweepTemplate {
            pmax_db: 21.0,
            source_power: SourcePower::FollowsPmax { mult: 1.0 },
            relay_count: 6,
            r1: 1.0,
            r2: 1.0,
            buffer: BufferCapacity::Finite(crate::sim::DEFAULT_FINITE_CAPACITY),
            initial_fill: None,
            slots: 50_000,
            seed: 1,
            sigma_eta_sq: 0.0,
            csi_outage: false,
            per_slot_reset: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub template: SweepTemplate,
    pub schemes: Vec<SchemeId>,
}

/// One sweep point's settings and results.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: SchemeId,
    pub axis: SweepAxis,
    pub axis_value: f64,
    pub config: EpisodeConfig,
    pub pmax_db: f64,
    pub sigma_eta_sq: f64,
    pub metrics: RunMetrics,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.values.is_empty()
            || self
                .values
                .windows(2)
                .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(SweepError::BadValues);
        }
        if self.schemes.is_empty() {
            return Err(SweepError::Invalid("no schemes selected".into()));
        }
        if self.axis == SweepAxis::RelayCount && self.values.iter().any(|v| v.fract() != 0.0 || *v < 2.0) {
            return Err(SweepError::Invalid("relay counts must be integers >= 2".into()));
        }
        Ok(())
    }

    /// Episode for `scheme` at `value` on the axis.
    pub fn episode(&self, scheme: SchemeId, value: f64) -> (EpisodeConfig, f64, f64) {
        let t = &self.template;
        let mut pmax_db = t.pmax_db;
        let mut n = t.relay_count;
        let mut sigma = t.sigma_eta_sq;
        match self.axis {
            SweepAxis::PmaxDb => pmax_db = value,
            SweepAxis::RelayCount => n = value as usize,
            SweepAxis::SigmaEtaSq => sigma = value,
        }
        let pmax = db_to_linear(pmax_db);
        let ps = match t.source_power {
            SourcePower::FollowsPmax { mult } => mult * pmax,
            SourcePower::FixedDb(db) => db_to_linear(db),
        };
        let params = SystemParams {
            source_power: ps,
            max_relay_power: pmax,
            noise_power: 1.0,
            min_rate_sr: t.r1,
            min_rate_rd: t.r2,
            slot_duration: 1.0,
            buffer: t.buffer,
            relay_count: n,
        };
        let config = EpisodeConfig {
            scheme,
            fading: FadingSpec::unit(n),
            csi: (sigma > 0.0).then_some(CsiErrorSpec { sigma_eta_sq: sigma }),
            slots: t.slots,
            initial_fill: t.initial_fill.unwrap_or_else(|| default_initial_fill(t.buffer)),
            master_seed: t.seed,
            csi_outage_mode: t.csi_outage,
            per_slot_reset: t.per_slot_reset,
            params,
        };
        (config, pmax_db, sigma)
    }
}

/// Runs every (scheme, value) point. Rows come back scheme-major, in the
/// order `schemes` and `values` list them, whatever the completion order.
pub fn run_sweep(spec: &SweepSpec, exec: Execution) -> Result<Vec<SweepRow>, SweepError> {
    spec.validate()?;
    let jobs: Vec<(SchemeId, f64)> = spec
        .schemes
        .iter()
        .flat_map(|&s| spec.values.iter().map(move |&v| (s, v)))
        .collect();
    let results = map_slice(exec, &jobs, |&(scheme, value)| {
        let (config, pmax_db, sigma_eta_sq) = spec.episode(scheme, value);
        run_episode_with(&config, Execution::Sequential, |_, _, _, _| {}).map(|metrics| SweepRow {
            scheme,
            axis: spec.axis,
            axis_value: value,
            config,
            pmax_db,
            sigma_eta_sq,
            metrics,
        })
    });
    results.into_iter().map(|r| r.map_err(SweepError::from)).collect()
}

/// Formats like C's `%.6g`.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes the header and one record per row.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), SweepError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        let c = &r.config;
        let m = &r.metrics;
        let qmax = match c.params.buffer {
            BufferCapacity::Finite(q) => format_sig6(q),
            BufferCapacity::Infinite => "inf".to_string(),
        };
        w.write_record([
            r.scheme.name().to_string(),
            r.axis.name().to_string(),
            format_sig6(r.axis_value),
            format_sig6(r.pmax_db),
            c.params.relay_count.to_string(),
            format_sig6(c.params.min_rate_sr),
            format_sig6(c.params.min_rate_rd),
            qmax,
            format_sig6(c.initial_fill),
            format_sig6(r.sigma_eta_sq),
            c.slots.to_string(),
            c.master_seed.to_string(),
            format_sig6(m.mean_sum_throughput),
            format_sig6(m.mean_sr_throughput),
            format_sig6(m.mean_rd_throughput),
            format_sig6(m.mmht),
            format_sig6(m.frac_pair),
            format_sig6(m.frac_hd()),
            format_sig6(m.frac_idle),
            m.evaluations.throughput.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the sweep and renders the CSV.
pub fn sweep_csv(spec: &SweepSpec, exec: Execution) -> Result<String, SweepError> {
    let rows = run_sweep(spec, exec)?;
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Parses `a`, `a,b,c` or `start:stop:step` (inclusive of `stop` up to
/// rounding).
pub fn parse_values(s: &str) -> Result<Vec<f64>, SweepError> {
    let bad = || SweepError::Invalid(format!("cannot parse value list {s:?}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [single] => single.split(',').map(num).collect(),
        [start, stop, step] => {
            let (a, b, d) = (num(start)?, num(stop)?, num(step)?);
            if d.is_nan() || d <= 0.0 || b < a {
                return Err(bad());
            }
            let count = ((b - a) / d + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|k| a + d * k as f64).collect())
        }
        _ => Err(bad()),
    }
}

//! Rayleigh block fading and imperfect channel estimates.
//!
//! Every link is a circularly-symmetric complex Gaussian; power gains are
//! the squared magnitudes, hence exponential. Randomness comes from ChaCha8
//! streams keyed by `(master seed, purpose)` and indexed by slot, so the
//! draws of a slot depend only on those coordinates and not on the order in
//! which slots are generated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::ChannelError;
use crate::model::ChannelRealization;

/// What a random stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamPurpose {
    Fading,
    CsiError,
}

impl StreamPurpose {
    fn tag(self) -> u64 {
        match self {
            StreamPurpose::Fading => 0x6661_6469_6e67,
            StreamPurpose::CsiError => 0x6373_6965_7272,
        }
    }
}

/// Generator for `slot` of the run seeded with `master_seed`.
pub fn slot_rng(master_seed: u64, purpose: StreamPurpose, slot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed ^ purpose.tag().rotate_left(17));
    rng.set_stream(slot);
    rng
}

/// Mean power of each link class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingSpec {
    pub mean_sr: f64,
    pub mean_rd: f64,
    pub mean_inter: f64,
    pub relay_count: usize,
}

impl FadingSpec {
    /// Unit-mean fading on every link.
    pub fn unit(relay_count: usize) -> Self {
        FadingSpec {
            mean_sr: 1.0,
            mean_rd: 1.0,
            mean_inter: 1.0,
            relay_count,
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let ok = |m: f64| m > 0.0 && m.is_finite();
        if ok(self.mean_sr) && ok(self.mean_rd) && ok(self.mean_inter) {
            Ok(())
        } else {
            Err(ChannelError::InvalidMean)
        }
    }

    fn min_mean(&self) -> f64 {
        self.mean_sr.min(self.mean_rd).min(self.mean_inter)
    }
}

/// Variance of the channel estimation error, shared by all links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsiErrorSpec {
    pub sigma_eta_sq: f64,
}

impl CsiErrorSpec {
    pub fn validate(&self, fading: &FadingSpec) -> Result<(), ChannelError> {
        let limit = fading.min_mean();
        if self.sigma_eta_sq >= 0.0 && self.sigma_eta_sq < limit {
            Ok(())
        } else {
            Err(ChannelError::InvalidErrorVariance {
                sigma_eta_sq: self.sigma_eta_sq,
                limit,
            })
        }
    }
}

/// `|x|²` of a zero-mean complex Gaussian with `E|x|² = variance`.
fn complex_gaussian_power<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> f64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample::<f64, _>(StandardNormal) * s;
    let im: f64 = rng.sample::<f64, _>(StandardNormal) * s;
    re * re + im * im
}

/// Draws one slot of i.i.d. Rayleigh fading. The inter-relay link is drawn
/// once per unordered pair.
pub fn sample_realization<R: Rng + ?Sized>(spec: &FadingSpec, rng: &mut R) -> ChannelRealization {
    let n = spec.relay_count;
    let mut chan = ChannelRealization::zeros(n);
    for g in chan.sr_mut() {
        *g = complex_gaussian_power(rng, spec.mean_sr);
    }
    for h in chan.rd_mut() {
        *h = complex_gaussian_power(rng, spec.mean_rd);
    }
    for i in 0..n {
        for j in i + 1..n {
            let e = complex_gaussian_power(rng, spec.mean_inter);
            chan.set_inter(i, j, e);
        }
    }
    chan
}

/// Estimated power gain given the true one.
///
/// With `h = ĥ + η`, `ĥ` and `η` independent zero-mean complex Gaussians of
/// variances `σ_h² - σ_η²` and `σ_η²`, the estimate given `h` is Gaussian
/// with mean `(σ_ĥ²/σ_h²) h` and variance `σ_ĥ² σ_η² / σ_h²`. The phase of
/// `h` is irrelevant to `|ĥ|²`, so `h` is taken real and nonnegative.
fn estimate_power<R: Rng + ?Sized>(rng: &mut R, true_power: f64, variance: f64, sigma_eta_sq: f64) -> f64 {
    let est_var = variance - sigma_eta_sq;
    let mean = est_var / variance * true_power.sqrt();
    let s = (est_var * sigma_eta_sq / variance / 2.0).sqrt();
    let re = mean + rng.sample::<f64, _>(StandardNormal) * s;
    let im: f64 = rng.sample::<f64, _>(StandardNormal) * s;
    re * re + im * im
}

/// Channel estimates jointly distributed with `true_chan` under the additive
/// estimation-error model. Reciprocity is kept by estimating each
/// inter-relay link once.
pub fn corrupt_csi<R: Rng + ?Sized>(
    true_chan: &ChannelRealization,
    fading: &FadingSpec,
    spec: &CsiErrorSpec,
    rng: &mut R,
) -> Result<ChannelRealization, ChannelError> {
    spec.validate(fading)?;
    if spec.sigma_eta_sq == 0.0 {
        return Ok(true_chan.clone());
    }
    let n = true_chan.relay_count();
    let s2 = spec.sigma_eta_sq;
    let mut est = ChannelRealization::zeros(n);
    for i in 0..n {
        est.sr_mut()[i] = estimate_power(rng, true_chan.sr(i), fading.mean_sr, s2);
    }
    for j in 0..n {
        est.rd_mut()[j] = estimate_power(rng, true_chan.rd(j), fading.mean_rd, s2);
    }
    for i in 0..n {
        for j in i + 1..n {
            let e = estimate_power(rng, true_chan.inter(i, j), fading.mean_inter, s2);
            est.set_inter(i, j, e);
        }
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_and_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (v / n).sqrt())
    }

    fn correlation(a: &[f64], b: &[f64]) -> f64 {
        let (ma, _) = mean_and_se(a);
        let (mb, _) = mean_and_se(b);
        let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        cov / (va * vb).sqrt()
    }

    #[test]
    fn exponential_mean_and_variance() {
        let spec = FadingSpec::unit(3);
        let draws: Vec<ChannelRealization> = (0..50_000)
            .map(|s| sample_realization(&spec, &mut slot_rng(7, StreamPurpose::Fading, s)))
            .collect();
        let g: Vec<f64> = draws.iter().map(|c| c.sr(0)).collect();
        let (m, se) = mean_and_se(&g);
        assert!((m - 1.0).abs() < 4.0 * se && (m - 1.0).abs() < 0.02, "mean {m}");
        // Exponential: variance equals the squared mean.
        let var = g.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (g.len() as f64 - 1.0);
        assert!((var - 1.0).abs() < 0.06, "var {var}");
        let e: Vec<f64> = draws.iter().map(|c| c.inter(1, 2)).collect();
        let (me, see) = mean_and_se(&e);
        assert!((me - 1.0).abs() < 4.0 * see);
    }

    #[test]
    fn non_unit_means() {
        let spec = FadingSpec {
            mean_sr: 2.0,
            mean_rd: 0.5,
            mean_inter: 3.0,
            relay_count: 2,
        };
        let draws: Vec<ChannelRealization> = (0..50_000)
            .map(|s| sample_realization(&spec, &mut slot_rng(1, StreamPurpose::Fading, s)))
            .collect();
        for (f, want) in [
            (
                &(|c: &ChannelRealization| c.sr(1)) as &dyn Fn(&ChannelRealization) -> f64,
                2.0,
            ),
            (&|c: &ChannelRealization| c.rd(0), 0.5),
            (&|c: &ChannelRealization| c.inter(0, 1), 3.0),
        ] {
            let xs: Vec<f64> = draws.iter().map(f).collect();
            let (m, se) = mean_and_se(&xs);
            assert!((m - want).abs() < 4.0 * se, "mean {m} want {want}");
        }
    }

    #[test]
    fn reciprocity_and_determinism() {
        let spec = FadingSpec::unit(5);
        let a = sample_realization(&spec, &mut slot_rng(42, StreamPurpose::Fading, 3));
        let b = sample_realization(&spec, &mut slot_rng(42, StreamPurpose::Fading, 3));
        assert_eq!(a, b);
        a.validate().unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(a.inter(i, j), a.inter(j, i));
            }
        }
        let c = sample_realization(&spec, &mut slot_rng(42, StreamPurpose::Fading, 4));
        assert_ne!(a, c);
        let d = sample_realization(&spec, &mut slot_rng(43, StreamPurpose::Fading, 3));
        assert_ne!(a, d);
    }

    #[test]
    fn zero_error_is_exact() {
        let spec = FadingSpec::unit(4);
        let truth = sample_realization(&spec, &mut slot_rng(9, StreamPurpose::Fading, 0));
        let est = corrupt_csi(
            &truth,
            &spec,
            &CsiErrorSpec { sigma_eta_sq: 0.0 },
            &mut slot_rng(9, StreamPurpose::CsiError, 0),
        )
        .unwrap();
        assert_eq!(est, truth);
    }

    #[test]
    fn rejects_error_variance_at_or_above_channel_variance() {
        let spec = FadingSpec::unit(2);
        let truth = ChannelRealization::zeros(2);
        let mut rng = slot_rng(0, StreamPurpose::CsiError, 0);
        assert!(corrupt_csi(&truth, &spec, &CsiErrorSpec { sigma_eta_sq: 1.0 }, &mut rng).is_err());
        assert!(corrupt_csi(&truth, &spec, &CsiErrorSpec { sigma_eta_sq: -0.1 }, &mut rng).is_err());
    }

    fn estimate_pairs(sigma: f64) -> (Vec<f64>, Vec<f64>) {
        let spec = FadingSpec::unit(3);
        let csi = CsiErrorSpec { sigma_eta_sq: sigma };
        (0..50_000u64)
            .map(|s| {
                let truth = sample_realization(&spec, &mut slot_rng(5, StreamPurpose::Fading, s));
                let est = corrupt_csi(&truth, &spec, &csi, &mut slot_rng(5, StreamPurpose::CsiError, s)).unwrap();
                est.validate().unwrap();
                (truth.rd(1), est.rd(1))
            })
            .unzip()
    }

    #[test]
    fn estimate_power_mean() {
        let (_, est) = estimate_pairs(0.1);
        let (m, se) = mean_and_se(&est);
        assert!((m - 0.9).abs() < 4.0 * se && (m - 0.9).abs() < 0.02, "mean {m}");
    }

    #[test]
    fn estimate_tracks_truth_less_as_error_grows() {
        let (t1, e1) = estimate_pairs(0.05);
        let (t2, e2) = estimate_pairs(0.3);
        let c1 = correlation(&t1, &e1);
        let c2 = correlation(&t2, &e2);
        assert!(c1 > 0.0 && c2 > 0.0);
        assert!(c1 > c2, "{c1} <= {c2}");
    }
}

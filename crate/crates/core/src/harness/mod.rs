//! Monte Carlo experiment runner.
//!
//! Every `(experiment, scheme family, SNR index)` point draws its own seed
//! from the master seed. Within a point, trials are split into fixed-size
//! blocks with private RNG streams; blocks run in parallel and are combined
//! in block order, so results do not depend on the thread count. Detector
//! choice is not part of the seed, so MAP and ML runs see identical data and
//! noise.

mod output;
mod sweep;

pub use output::{emit, OutputFormat, CSV_HEADER};
pub use sweep::{region_endpoints, sweep, RegionEndpoints};

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adaptive::{adaptive_plan, default_precision_range, ube_scheme};
use crate::analysis::{ErrorReport, ErrorSource, ReportMetadata};
use crate::bits::{padded_len, DataBatch, QuantizerSpec, SlicingScheme};
use crate::channel::{ChannelConfig, MultiAccessChannel};
use crate::db_to_linear;
use crate::detector::{DetectorConfig, DetectorKind, PriorMode};
use crate::error::{invalid, Error, Result};
use crate::transceiver::{AnalogAirComp, DigitalAirComp};

/// Aggregated values simulated per trial block.
pub const BLOCK_LEN: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    #[default]
    SweepSnr,
    Latency,
    Region,
    Adaptive,
    Analyze,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::SweepSnr => "sweep-snr",
            Self::Latency => "latency",
            Self::Region => "region",
            Self::Adaptive => "adaptive",
            Self::Analyze => "analyze",
        }
    }

    fn tag(self) -> u64 {
        self as u64 + 1
    }
}

/// Slicing used by the digital scheme.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SchemeChoice {
    /// Most balanced split of `B` into `L` slices.
    #[default]
    Ube,
    /// Precision and slicing from the adaptive optimizer.
    Adaptive,
    Explicit(SlicingScheme),
}

impl FromStr for SchemeChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ube" => Ok(Self::Ube),
            "adaptive" => Ok(Self::Adaptive),
            other => {
                let widths = other
                    .trim_matches(|c| c == '[' || c == ']')
                    .split(['-', ','])
                    .map(|w| {
                        w.trim()
                            .parse::<u32>()
                            .map_err(|_| invalid(format!("invalid slicing scheme '{s}'")))
                    })
                    .collect::<Result<Vec<u32>>>()?;
                Ok(Self::Explicit(SlicingScheme::new(widths)?))
            }
        }
    }
}

impl fmt::Display for SchemeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ube => f.write_str("ube"),
            Self::Adaptive => f.write_str("adaptive"),
            Self::Explicit(s) => f.write_str(&s.label()),
        }
    }
}

impl TryFrom<String> for SchemeChoice {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SchemeChoice> for String {
    fn from(s: SchemeChoice) -> Self {
        s.to_string()
    }
}

/// Full description of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(rename = "k")]
    pub devices: usize,
    #[serde(rename = "b")]
    pub bits: u32,
    #[serde(rename = "l")]
    pub slices: usize,
    pub scheme: SchemeChoice,
    pub detector: DetectorKind,
    pub priors: PriorMode,
    /// SNR grid in dB.
    pub snr_db: Vec<f64>,
    /// Aggregated values simulated per grid point.
    pub trials: u64,
    /// Total symbol rate in symbols per second.
    pub rate: f64,
    /// Data vector length `M`.
    #[serde(rename = "m")]
    pub data_len: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub seed: u64,
    /// Average SNR (dB) for offline precision selection.
    pub avg_snr_db: f64,
    /// Device counts swept by the latency experiment.
    pub device_counts: Vec<usize>,
    /// Precisions compared by the region experiment.
    pub region_bits: Vec<u32>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::SweepSnr,
            devices: 10,
            bits: 6,
            slices: 6,
            scheme: SchemeChoice::Ube,
            detector: DetectorKind::Map,
            priors: PriorMode::Exact,
            snr_db: snr_grid(0.0, 30.0, 2.0).expect("static grid"),
            trials: 200_000,
            rate: 1e6,
            data_len: 181_503,
            x_min: -1.0,
            x_max: 1.0,
            seed: 1,
            avg_snr_db: 18.0,
            device_counts: (2..=20).step_by(2).collect(),
            region_bits: vec![6, 12],
            out: None,
            format: OutputFormat::Csv,
        }
    }
}

/// Inclusive dB grid `min, min + step, …, max`.
pub fn snr_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(max >= min) || !min.is_finite() || !max.is_finite() {
        return Err(invalid(format!(
            "invalid SNR grid [{min}, {max}] step {step}"
        )));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    // rounding keeps grid labels free of accumulated drift
    Ok((0..=n)
        .map(|i| ((min + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.devices == 0 {
            return Err(invalid("k must be at least 1"));
        }
        if self.slices == 0 || (self.bits as usize) < self.slices {
            return Err(invalid(format!(
                "need b >= l >= 1, got b={} and l={}",
                self.bits, self.slices
            )));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.snr_db.is_empty() {
            return Err(invalid("SNR grid is empty"));
        }
        if self.snr_db.iter().any(|g| g.is_nan()) {
            return Err(invalid("SNR grid contains NaN"));
        }
        if padded_len(self.data_len) < 2 {
            return Err(invalid("data length m must be at least 1"));
        }
        if !(self.rate > 0.0) || !self.rate.is_finite() {
            return Err(invalid(format!(
                "symbol rate must be positive, got {}",
                self.rate
            )));
        }
        if let SchemeChoice::Explicit(s) = &self.scheme {
            if s.total_bits() != self.bits || s.len() != self.slices {
                return Err(invalid(format!(
                    "scheme {s} does not split b={} into l={} slices",
                    self.bits, self.slices
                )));
            }
        }
        self.quantizer()?;
        Ok(())
    }

    /// Quantizer at the configured precision.
    pub fn quantizer(&self) -> Result<QuantizerSpec> {
        QuantizerSpec::new(self.bits, self.x_min, self.x_max)
    }

    pub fn detector_config(&self) -> DetectorConfig {
        DetectorConfig {
            kind: self.detector,
            priors: self.priors,
            ..DetectorConfig::default()
        }
    }

    /// Precision and slicing used at `snr_db`.
    pub fn resolve_scheme(&self, snr_db: f64) -> Result<(QuantizerSpec, SlicingScheme)> {
        let spec = self.quantizer()?;
        match &self.scheme {
            SchemeChoice::Ube => Ok((spec, ube_scheme(self.bits, self.slices)?)),
            SchemeChoice::Explicit(s) => Ok((spec, s.clone())),
            SchemeChoice::Adaptive => {
                let plan = adaptive_plan(
                    &spec,
                    default_precision_range(self.slices),
                    self.slices,
                    self.devices,
                    db_to_linear(self.avg_snr_db),
                    db_to_linear(snr_db),
                    self.detector_config(),
                )?;
                Ok((spec.with_bits(plan.bits)?, plan.scheme))
            }
        }
    }

    fn energy(&self) -> f64 {
        // independent of B: only the data range enters
        QuantizerSpec::new(1, self.x_min, self.x_max)
            .map(|s| s.aggregate_energy(self.devices))
            .unwrap_or(f64::NAN)
    }

    fn metadata(&self, bits: u32, scheme: String, snr_db: f64) -> ReportMetadata {
        ReportMetadata {
            devices: self.devices,
            bits,
            scheme,
            snr_db,
        }
    }
}

/// One output record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub scheme: String,
    pub snr_db: f64,
    pub k: usize,
    pub b: u32,
    pub l: usize,
    pub slicing: String,
    pub trials: u64,
    pub mse: f64,
    pub nmse: f64,
    /// 95% confidence half-width of `nmse`.
    pub ci95: f64,
    pub latency_s: f64,
    pub seed: u64,
}

/// Scheme family used in seed derivation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeFamily {
    Digital,
    Analog,
    Orthogonal,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mix(words: &[u64]) -> u64 {
    words.iter().fold(0, |h, &w| splitmix64(h ^ splitmix64(w)))
}

/// Seed of one grid point.
pub fn point_seed(master: u64, kind: ExperimentKind, family: SchemeFamily, index: usize) -> u64 {
    mix(&[master, kind.tag(), family as u64 + 1, index as u64])
}

#[derive(Debug, Clone, Copy, Default)]
struct BlockStats {
    n: u64,
    sum_e2: f64,
    sum_e4: f64,
    sum_q2: f64,
}

impl BlockStats {
    fn push(&mut self, err: f64, quant_err: f64) {
        let e2 = err * err;
        self.n += 1;
        self.sum_e2 += e2;
        self.sum_e4 += e2 * e2;
        self.sum_q2 += quant_err * quant_err;
    }

    fn merge(mut self, o: &BlockStats) -> Self {
        self.n += o.n;
        self.sum_e2 += o.sum_e2;
        self.sum_e4 += o.sum_e4;
        self.sum_q2 += o.sum_q2;
        self
    }

    fn mse(&self) -> f64 {
        self.sum_e2 / self.n as f64
    }

    fn ci95(&self) -> f64 {
        let n = self.n as f64;
        if self.n < 2 {
            return 0.0;
        }
        let mean = self.mse();
        let var = ((self.sum_e4 - n * mean * mean) / (n - 1.0)).max(0.0);
        1.96 * (var / n).sqrt()
    }
}

fn run_blocks<F>(trials: u64, seed: u64, block: F) -> Result<BlockStats>
where
    F: Fn(usize, u64, u64) -> Result<BlockStats> + Sync,
{
    let nblocks = trials.div_ceil(BLOCK_LEN as u64) as usize;
    let stats = (0..nblocks)
        .into_par_iter()
        .map(|i| {
            let len = (trials - (i * BLOCK_LEN) as u64).min(BLOCK_LEN as u64) as usize;
            block(len, mix(&[seed, i as u64, 0]), mix(&[seed, i as u64, 1]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(stats.iter().fold(BlockStats::default(), |a, b| a.merge(b)))
}

fn draw_batches(spec: &QuantizerSpec, devices: usize, len: usize, seed: u64) -> Vec<DataBatch> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..devices)
        .map(|_| DataBatch::uniform_from(spec, len, &mut rng, seed))
        .collect()
}

fn noise_variance(snr_db: f64) -> f64 {
    1.0 / db_to_linear(snr_db)
}

fn monte_carlo_report(stats: &BlockStats, energy: f64, meta: ReportMetadata) -> ErrorReport {
    let total = stats.mse();
    let quantization = stats.sum_q2 / stats.n as f64;
    ErrorReport {
        aggregation_error: (total - quantization).max(0.0),
        quantization_error: quantization,
        total,
        normalized: total / energy,
        ci95: stats.ci95(),
        samples: stats.n,
        source: ErrorSource::MonteCarlo,
        metadata: meta,
    }
}

/// Digital AirComp Monte Carlo at one SNR (`+∞` dB for a noiseless link)
/// with an explicit quantizer, scheme and point seed.
pub fn run_digital_with(
    config: &ExperimentConfig,
    spec: &QuantizerSpec,
    scheme: &SlicingScheme,
    snr_db: f64,
    seed: u64,
) -> Result<ErrorReport> {
    config.validate()?;
    let k = config.devices;
    let var = noise_variance(snr_db);
    let system = DigitalAirComp::new(*spec, scheme.clone(), k, 1.0, var, config.detector_config())?;
    let stats = run_blocks(config.trials, seed, |len, data_seed, noise_seed| {
        let batches = draw_batches(spec, k, len, data_seed);
        let mut channel = MultiAccessChannel::new(ChannelConfig::new(k, 1.0, var, noise_seed)?)?;
        let out = system.aggregate(&batches, &mut channel)?;
        let mut st = BlockStats::default();
        for m in 0..len {
            let mut y = 0.0;
            let mut u = 0;
            for b in &batches {
                y += b.values[m];
                u += spec.quantize(b.values[m])?;
            }
            st.push(out.y_hat[m] - y, spec.denormalize(u, k) - y);
        }
        Ok(st)
    })?;
    Ok(monte_carlo_report(
        &stats,
        config.energy(),
        config.metadata(spec.bits(), scheme.label(), snr_db),
    ))
}

/// Digital AirComp Monte Carlo at grid point `index` of the configured
/// experiment.
pub fn run_digital(config: &ExperimentConfig, snr_db: f64, index: usize) -> Result<ErrorReport> {
    let (spec, scheme) = config.resolve_scheme(snr_db)?;
    let seed = point_seed(config.seed, config.kind, SchemeFamily::Digital, index);
    run_digital_with(config, &spec, &scheme, snr_db, seed)
}

/// Analog AirComp Monte Carlo with `L`-fold repetition.
pub fn run_analog(config: &ExperimentConfig, snr_db: f64, index: usize) -> Result<ErrorReport> {
    config.validate()?;
    let k = config.devices;
    let var = noise_variance(snr_db);
    let system = AnalogAirComp::new(config.x_min, config.x_max, config.slices)?;
    let spec = config.quantizer()?;
    let seed = point_seed(config.seed, config.kind, SchemeFamily::Analog, index);
    let stats = run_blocks(config.trials, seed, |len, data_seed, noise_seed| {
        let batches = draw_batches(&spec, k, len, data_seed);
        let mut channel = MultiAccessChannel::new(ChannelConfig::new(k, 1.0, var, noise_seed)?)?;
        let y_hat = system.aggregate(&batches, &mut channel)?;
        let mut st = BlockStats::default();
        for (m, est) in y_hat.iter().enumerate() {
            let y: f64 = batches.iter().map(|b| b.values[m]).sum();
            st.push(est - y, 0.0);
        }
        Ok(st)
    })?;
    Ok(monte_carlo_report(
        &stats,
        config.energy(),
        config.metadata(0, "analog".into(), snr_db),
    ))
}

/// Orthogonal access: error-free links, so only the quantization error
/// `KΔ²/12` remains. Returns the report and the transmission latency.
pub fn run_orthogonal(config: &ExperimentConfig, snr_db: f64) -> Result<(ErrorReport, f64)> {
    config.validate()?;
    let spec = config.quantizer()?;
    let report = ErrorReport::closed_form(
        0.0,
        spec.quantization_error(config.devices),
        config.energy(),
        config.metadata(spec.bits(), "orthogonal".into(), snr_db),
    );
    Ok((report, latency_orthogonal(config, snr_db)))
}

/// AirComp latency `(M_pad/2)·L / rate`, independent of `K`.
pub fn latency_aircomp(config: &ExperimentConfig) -> f64 {
    (padded_len(config.data_len) / 2) as f64 * config.slices as f64 / config.rate
}

/// Orthogonal-access latency `K·M_pad·B / (rate·log₂(1 + γ))`.
pub fn latency_orthogonal(config: &ExperimentConfig, snr_db: f64) -> f64 {
    let capacity = (1.0 + db_to_linear(snr_db)).log2();
    config.devices as f64 * padded_len(config.data_len) as f64 * config.bits as f64
        / (config.rate * capacity)
}

/// Paired MAP and ML reports at one SNR.
pub fn compare_detectors(
    config: &ExperimentConfig,
    snr_db: f64,
    index: usize,
) -> Result<(ErrorReport, ErrorReport)> {
    let mut map = config.clone();
    map.detector = DetectorKind::Map;
    let mut ml = config.clone();
    ml.detector = DetectorKind::Ml;
    Ok((
        run_digital(&map, snr_db, index)?,
        run_digital(&ml, snr_db, index)?,
    ))
}

fn detector_name(kind: DetectorKind) -> &'static str {
    match kind {
        DetectorKind::Map => "map",
        DetectorKind::Ml => "ml",
    }
}

impl ResultRow {
    pub(crate) fn from_report(
        config: &ExperimentConfig,
        scheme: impl Into<String>,
        report: &ErrorReport,
        slicing: String,
        latency_s: f64,
        seed: u64,
    ) -> Self {
        Self {
            experiment: config.kind.name().into(),
            scheme: scheme.into(),
            snr_db: report.metadata.snr_db,
            k: report.metadata.devices,
            b: report.metadata.bits,
            l: config.slices,
            slicing,
            trials: report.samples,
            mse: report.total,
            nmse: report.normalized,
            ci95: report.normalized_ci95(),
            latency_s,
            seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(trials: u64) -> ExperimentConfig {
        ExperimentConfig {
            trials,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn scheme_choice_parsing() {
        assert_eq!("ube".parse::<SchemeChoice>().unwrap(), SchemeChoice::Ube);
        assert_eq!(
            "adaptive".parse::<SchemeChoice>().unwrap(),
            SchemeChoice::Adaptive
        );
        let s: SchemeChoice = "2-2-1".parse().unwrap();
        assert_eq!(
            s,
            SchemeChoice::Explicit(SlicingScheme::new(vec![2, 2, 1]).unwrap())
        );
        assert_eq!("[2,2,1]".parse::<SchemeChoice>().unwrap(), s);
        assert_eq!(s.to_string(), "2-2-1");
        assert!("2-x".parse::<SchemeChoice>().is_err());
        assert!("0-2".parse::<SchemeChoice>().is_err());
    }

    #[test]
    fn grid_construction() {
        assert_eq!(snr_grid(0.0, 4.0, 2.0).unwrap(), vec![0.0, 2.0, 4.0]);
        assert_eq!(snr_grid(0.0, 1.0, 0.1).unwrap().len(), 11);
        assert_eq!(snr_grid(0.0, 1.0, 0.1).unwrap()[3], 0.3);
        assert!(snr_grid(1.0, 0.0, 1.0).is_err());
        assert!(snr_grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let bad = [
            ExperimentConfig {
                trials: 0,
                ..Default::default()
            },
            ExperimentConfig {
                snr_db: vec![],
                ..Default::default()
            },
            ExperimentConfig {
                devices: 0,
                ..Default::default()
            },
            ExperimentConfig {
                bits: 4,
                slices: 6,
                ..Default::default()
            },
            ExperimentConfig {
                data_len: 0,
                ..Default::default()
            },
            ExperimentConfig {
                x_min: 1.0,
                x_max: 1.0,
                ..Default::default()
            },
            ExperimentConfig {
                scheme: "2-2-1".parse().unwrap(),
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let a = point_seed(1, ExperimentKind::SweepSnr, SchemeFamily::Digital, 0);
        assert_eq!(
            a,
            point_seed(1, ExperimentKind::SweepSnr, SchemeFamily::Digital, 0)
        );
        assert_ne!(
            a,
            point_seed(1, ExperimentKind::SweepSnr, SchemeFamily::Digital, 1)
        );
        assert_ne!(
            a,
            point_seed(1, ExperimentKind::SweepSnr, SchemeFamily::Analog, 0)
        );
        assert_ne!(
            a,
            point_seed(2, ExperimentKind::SweepSnr, SchemeFamily::Digital, 0)
        );
        assert_ne!(
            a,
            point_seed(1, ExperimentKind::Adaptive, SchemeFamily::Digital, 0)
        );
    }

    #[test]
    fn noiseless_digital_is_quantization_limited() {
        let cfg = small(50_000);
        let spec = cfg.quantizer().unwrap();
        let r = run_digital(&cfg, f64::INFINITY, 0).unwrap();
        assert_eq!(r.aggregation_error, 0.0);
        assert_eq!(r.total, r.quantization_error);
        let floor = spec.quantization_error(10);
        assert!(
            (r.total - floor).abs() <= 3.0 * r.ci95,
            "{} vs {floor}",
            r.total
        );
    }

    #[test]
    fn runs_are_deterministic() {
        let cfg = small(10_000);
        let a = run_digital(&cfg, 8.0, 3).unwrap();
        let b = run_digital(&cfg, 8.0, 3).unwrap();
        assert_eq!(a, b);
        let c = run_analog(&cfg, 8.0, 3).unwrap();
        assert_eq!(c, run_analog(&cfg, 8.0, 3).unwrap());
        assert_ne!(a.total, run_digital(&cfg, 8.0, 4).unwrap().total);
    }

    #[test]
    fn block_count_respects_trials() {
        let cfg = small(BLOCK_LEN as u64 * 2 + 17);
        assert_eq!(run_digital(&cfg, 10.0, 0).unwrap().samples, cfg.trials);
    }

    #[test]
    fn latency_values() {
        let cfg = ExperimentConfig::default();
        assert!((latency_aircomp(&cfg) - 0.544512).abs() < 1e-12);
        let k20 = ExperimentConfig {
            devices: 20,
            ..Default::default()
        };
        assert_eq!(latency_aircomp(&k20), latency_aircomp(&cfg));
        let t = latency_orthogonal(&k20, 10.0);
        assert!((t - 6.296).abs() < 0.01 * 6.296, "{t}");
        assert!((latency_orthogonal(&cfg, 10.0) * 2.0 - t).abs() < 1e-12);
        let (rep, lat) = run_orthogonal(&k20, 10.0).unwrap();
        assert_eq!(lat, t);
        assert_eq!(rep.total, cfg.quantizer().unwrap().quantization_error(20));
    }

    #[test]
    fn analog_single_repetition() {
        let cfg = ExperimentConfig {
            slices: 1,
            bits: 6,
            trials: 100_000,
            ..Default::default()
        };
        let r = run_analog(&cfg, 10.0, 0).unwrap();
        let want = crate::analysis::analog_error(2.0, 1, 10.0);
        assert!(
            (r.total - want).abs() <= 3.0 * r.ci95,
            "{} vs {want}",
            r.total
        );
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = ExperimentConfig {
            scheme: "3-2-1".parse().unwrap(),
            bits: 6,
            slices: 3,
            ..Default::default()
        };
        let text = toml::to_string(&cfg).unwrap();
        let back: ExperimentConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        let partial: ExperimentConfig = toml::from_str("k = 20\nscheme = \"ube\"\n").unwrap();
        assert_eq!(partial.devices, 20);
        assert_eq!(partial.bits, 6);
    }

    #[test]
    fn detector_names() {
        assert_eq!(detector_name(DetectorKind::Map), "map");
        assert_eq!(detector_name(DetectorKind::Ml), "ml");
    }
}

//! Closed-form error analysis.
//!
//! All helpers take the channel in effective form: common receive gain `ρ`
//! and complex noise variance `σ_z²` (so `γ = ρ²/σ_z²`). For a given SNR the
//! `*_snr` helpers use `ρ = 1`.

mod regime;
mod special;

pub use regime::{
    crossover_scan, regime_condition_holds, regime_max_devices, snr_regime, SnrInterval,
};
pub use special::{lambert_w0, lambert_w_minus1, q_function, r_lambert_roots, RLambertRoots};

use serde::{Deserialize, Serialize};

use crate::bits::{QuantizerSpec, SlicingScheme};
use crate::detector::{
    exact_priors, AggregatedConstellation, BoundarySet, Detector, DetectorConfig, PriorMode,
};
use crate::error::{invalid, Result};
use crate::modem::PamGrid;

/// Where an [`ErrorReport`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorSource {
    ClosedForm,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub devices: usize,
    pub bits: u32,
    pub scheme: String,
    pub snr_db: f64,
}

/// AirComp error split into aggregation and quantization parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub aggregation_error: f64,
    pub quantization_error: f64,
    /// Mean-square error against the ideal aggregate.
    pub total: f64,
    /// `total / E[y²]`.
    pub normalized: f64,
    /// 95% confidence half-width of `total` (zero for closed forms).
    pub ci95: f64,
    /// Number of aggregated values averaged (zero for closed forms).
    pub samples: u64,
    pub source: ErrorSource,
    pub metadata: ReportMetadata,
}

impl ErrorReport {
    pub fn closed_form(
        aggregation_error: f64,
        quantization_error: f64,
        energy: f64,
        metadata: ReportMetadata,
    ) -> Self {
        let total = aggregation_error + quantization_error;
        Self {
            aggregation_error,
            quantization_error,
            total,
            normalized: total / energy,
            ci95: 0.0,
            samples: 0,
            source: ErrorSource::ClosedForm,
            metadata,
        }
    }

    /// NMSE confidence half-width.
    pub fn normalized_ci95(&self) -> f64 {
        if self.total > 0.0 {
            self.ci95 * self.normalized / self.total
        } else {
            0.0
        }
    }
}

/// How the coefficient `A` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientMode {
    /// From the exact lattice priors.
    #[default]
    Exact,
    /// The upper bound `A = 2`.
    Bound,
}

/// Full pairwise-error sums or the high-SNR asymptote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorMode {
    #[default]
    Exact,
    Asymptotic,
}

/// Analog AirComp error with `L`-fold repetition: `δ_x²/(12Lγ)`.
pub fn analog_error(width: f64, repetitions: usize, snr: f64) -> f64 {
    width * width / (12.0 * repetitions as f64 * snr)
}

fn noise_std(noise_variance: f64) -> f64 {
    (noise_variance / 2.0).sqrt()
}

// P(lo < X ≤ hi) for X ~ N(0,1) written so that neither tail cancels
fn interval_probability(lo: f64, hi: f64) -> f64 {
    if lo >= 0.0 {
        q_function(lo) - q_function(hi)
    } else if hi <= 0.0 {
        q_function(-hi) - q_function(-lo)
    } else {
        1.0 - q_function(-lo) - q_function(hi)
    }
}

/// Probability that point `j` is detected as point `m`.
pub fn pairwise_error(
    j: usize,
    m: usize,
    constellation: &AggregatedConstellation,
    boundaries: &BoundarySet,
    rho: f64,
    noise_variance: f64,
) -> f64 {
    let centre = rho * constellation.points()[j];
    let (lo, hi) = (boundaries.lower(m), boundaries.upper(m));
    let sd = noise_std(noise_variance);
    if sd == 0.0 {
        return if lo < centre && centre <= hi {
            1.0
        } else {
            0.0
        };
    }
    interval_probability((lo - centre) / sd, (hi - centre) / sd)
}

// weighted sum Σ_m weight(j, m)·P_{j→m}, walking outward until the tails vanish
fn weighted_row<F: Fn(usize) -> f64>(
    j: usize,
    constellation: &AggregatedConstellation,
    boundaries: &BoundarySet,
    rho: f64,
    noise_variance: f64,
    weight: F,
) -> f64 {
    let n = constellation.len();
    let centre = rho * constellation.points()[j];
    let sd = noise_std(noise_variance);
    let mut acc = 0.0;
    for m in j + 1..n {
        acc += weight(m) * pairwise_error(j, m, constellation, boundaries, rho, noise_variance);
        if q_function((boundaries.upper(m) - centre) / sd) == 0.0 {
            break;
        }
    }
    for m in (0..j).rev() {
        acc += weight(m) * pairwise_error(j, m, constellation, boundaries, rho, noise_variance);
        if q_function((centre - boundaries.lower(m)) / sd) == 0.0 {
            break;
        }
    }
    acc
}

fn check_regions(constellation: &AggregatedConstellation, boundaries: &BoundarySet) -> Result<()> {
    if boundaries.regions() != constellation.len() {
        return Err(crate::Error::LengthMismatch {
            expected: constellation.len(),
            got: boundaries.regions(),
        });
    }
    Ok(())
}

/// Expected squared symbol detection error `Σ_j p_j Σ_m (s_m − s_j)² P_{j→m}`,
/// weighted by the constellation's own priors.
pub fn detection_error_exact(
    constellation: &AggregatedConstellation,
    boundaries: &BoundarySet,
    rho: f64,
    noise_variance: f64,
) -> Result<f64> {
    check_regions(constellation, boundaries)?;
    if noise_variance == 0.0 {
        return Ok(0.0);
    }
    let pts = constellation.points();
    Ok(constellation
        .priors()
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(j, &p)| {
            p * weighted_row(j, constellation, boundaries, rho, noise_variance, |m| {
                (pts[m] - pts[j]).powi(2)
            })
        })
        .sum())
}

/// Symbol error rate `Σ_j p_j Σ_{m≠j} P_{j→m}`.
pub fn symbol_error_rate(
    constellation: &AggregatedConstellation,
    boundaries: &BoundarySet,
    rho: f64,
    noise_variance: f64,
) -> Result<f64> {
    check_regions(constellation, boundaries)?;
    if noise_variance == 0.0 {
        return Ok(0.0);
    }
    Ok(constellation
        .priors()
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(j, &p)| p * weighted_row(j, constellation, boundaries, rho, noise_variance, |_| 1.0))
        .sum())
}

/// `A = Σ_j (√(p_{j−1}p_j) + √(p_j p_{j+1}))` over the exact priors, with
/// priors outside the lattice taken as zero.
pub fn coefficient_a(levels: u64, devices: usize) -> Result<f64> {
    let p = exact_priors(levels, devices)?;
    Ok(2.0 * p.windows(2).map(|w| (w[0] * w[1]).sqrt()).sum::<f64>())
}

fn coefficient(levels: u64, devices: usize, mode: CoefficientMode) -> Result<f64> {
    match mode {
        CoefficientMode::Exact => coefficient_a(levels, devices),
        CoefficientMode::Bound => Ok(2.0),
    }
}

/// Per-slice detection error `E_det/d²` in units of squared lattice steps,
/// with the detector built from `config` and the errors weighted by the
/// exact priors.
pub fn slice_detection_error(
    bits_per_branch: u32,
    devices: usize,
    rho: f64,
    noise_variance: f64,
    config: DetectorConfig,
) -> Result<f64> {
    let grid = PamGrid::new(bits_per_branch)?;
    let detector = Detector::new(&grid, devices, rho, noise_variance, config)?;
    let truth = AggregatedConstellation::new(&grid, devices, PriorMode::Exact)?;
    let e = detection_error_exact(&truth, detector.boundaries(), rho, noise_variance)?;
    Ok(e / (grid.spacing() * grid.spacing()))
}

/// Aggregation error `E_agg` of a slicing scheme.
///
/// Exact: `Δ²·Σ_ℓ 4^{c_{ℓ−1}}/d_ℓ²·E_det(ℓ)`. Asymptotic:
/// `Δ²·Σ_ℓ 4^{c_{ℓ−1}}·A_ℓ·Q(ρd_ℓ/(√2σ_z))`.
pub fn aggregation_error(
    spec: &QuantizerSpec,
    scheme: &SlicingScheme,
    devices: usize,
    rho: f64,
    noise_variance: f64,
    mode: ErrorMode,
    config: DetectorConfig,
) -> Result<f64> {
    scheme.check_against(spec)?;
    if !(rho > 0.0) || !(noise_variance >= 0.0) {
        return Err(invalid(format!(
            "need rho > 0 and noise variance >= 0, got {rho} and {noise_variance}"
        )));
    }
    let mut per_width: Vec<(u32, f64)> = Vec::new();
    let mut acc = 0.0;
    for (l, &b) in scheme.widths().iter().enumerate() {
        let term = match per_width.iter().find(|(w, _)| *w == b) {
            Some(&(_, t)) => t,
            None => {
                let t = match mode {
                    ErrorMode::Exact => {
                        slice_detection_error(b, devices, rho, noise_variance, config)?
                    }
                    ErrorMode::Asymptotic => {
                        let grid = PamGrid::new(b)?;
                        let x = rho * grid.spacing() / (2.0 * noise_variance).sqrt();
                        coefficient_a(grid.levels(), devices)? * q_function(x)
                    }
                };
                per_width.push((b, t));
                t
            }
        };
        acc += 4f64.powi(scheme.offset(l) as i32) * term;
    }
    Ok(spec.step() * spec.step() * acc)
}

/// [`aggregation_error`] at SNR `γ` (`ρ = 1`, `σ_z² = 1/γ`).
pub fn aggregation_error_snr(
    spec: &QuantizerSpec,
    scheme: &SlicingScheme,
    devices: usize,
    snr: f64,
    mode: ErrorMode,
    config: DetectorConfig,
) -> Result<f64> {
    aggregation_error(spec, scheme, devices, 1.0, 1.0 / snr, mode, config)
}

/// Sum `C = Σ_ℓ 4^{c_{ℓ−1}} = (4^B − 1)/(4^b − 1)` for uniform slicing.
pub fn slicing_gain(bits: u32, bits_per_slice: u32) -> f64 {
    (4f64.powi(bits as i32) - 1.0) / (4f64.powi(bits_per_slice as i32) - 1.0)
}

fn uniform_parts(spec: &QuantizerSpec, slices: usize) -> Result<(u32, PamGrid)> {
    if slices == 0 || !(spec.bits() as usize).is_multiple_of(slices) {
        return Err(invalid(format!(
            "uniform slicing needs L | B, got B={} and L={slices}",
            spec.bits()
        )));
    }
    let b = spec.bits() / slices as u32;
    Ok((b, PamGrid::new(b)?))
}

/// Digital AirComp error with uniform slicing,
/// `Δ²·A·C·Q(d√(γ/2)) + Δ²K/12`.
pub fn digital_error_uniform(
    spec: &QuantizerSpec,
    slices: usize,
    devices: usize,
    snr: f64,
    mode: CoefficientMode,
) -> Result<f64> {
    let (b, grid) = uniform_parts(spec, slices)?;
    let a = coefficient(grid.levels(), devices, mode)?;
    let d = grid.spacing();
    let step2 = spec.step() * spec.step();
    Ok(
        step2 * a * slicing_gain(spec.bits(), b) * q_function(d * (snr / 2.0).sqrt())
            + spec.quantization_error(devices),
    )
}

/// [`digital_error_uniform`] with `Q(x)` replaced by its Chernoff bound
/// `e^{−x²/2}/2`.
pub fn digital_error_uniform_chernoff(
    spec: &QuantizerSpec,
    slices: usize,
    devices: usize,
    snr: f64,
    mode: CoefficientMode,
) -> Result<f64> {
    let (b, grid) = uniform_parts(spec, slices)?;
    let a = coefficient(grid.levels(), devices, mode)?;
    let d2 = grid.spacing() * grid.spacing();
    let step2 = spec.step() * spec.step();
    Ok(
        step2 * a * slicing_gain(spec.bits(), b) * 0.5 * (-d2 * snr / 4.0).exp()
            + spec.quantization_error(devices),
    )
}

/// Closed-form digital report (exact or asymptotic aggregation
/// error plus `KΔ²/12`).
pub fn digital_report(
    spec: &QuantizerSpec,
    scheme: &SlicingScheme,
    devices: usize,
    snr_db: f64,
    mode: ErrorMode,
    config: DetectorConfig,
) -> Result<ErrorReport> {
    let snr = crate::db_to_linear(snr_db);
    let agg = aggregation_error_snr(spec, scheme, devices, snr, mode, config)?;
    Ok(ErrorReport::closed_form(
        agg,
        spec.quantization_error(devices),
        spec.aggregate_energy(devices),
        ReportMetadata {
            devices,
            bits: spec.bits(),
            scheme: scheme.label(),
            snr_db,
        },
    ))
}

/// Closed-form analog report with `L` repetitions.
pub fn analog_report(
    spec: &QuantizerSpec,
    repetitions: usize,
    devices: usize,
    snr_db: f64,
) -> ErrorReport {
    ErrorReport::closed_form(
        analog_error(spec.width(), repetitions, crate::db_to_linear(snr_db)),
        0.0,
        spec.aggregate_energy(devices),
        ReportMetadata {
            devices,
            bits: 0,
            scheme: "analog".into(),
            snr_db,
        },
    )
}

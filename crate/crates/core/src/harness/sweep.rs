//! Experiment drivers producing [`ResultRow`]s.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    detector_name, latency_aircomp, point_seed, run_analog, run_digital, run_digital_with,
    run_orthogonal, ExperimentConfig, ExperimentKind, ResultRow, SchemeChoice, SchemeFamily,
};
use crate::adaptive::ube_scheme;
use crate::analysis::{
    aggregation_error_snr, analog_error, analog_report, crossover_scan, digital_error_uniform,
    digital_error_uniform_chernoff, digital_report, snr_regime, CoefficientMode, ErrorMode,
    ErrorReport, SnrInterval,
};
use crate::error::{invalid, Result};
use crate::{db_to_linear, linear_to_db};

/// Lowest and highest SNR (dB) searched by the crossover scans.
pub const SCAN_RANGE_DB: (f64, f64) = (0.0, 70.0);
const SCAN_STEP_DB: f64 = 0.1;

/// Digital-beats-analog intervals for one uniform configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionEndpoints {
    /// Root-based interval from the r-Lambert equation.
    pub theory: SnrInterval,
    /// Scan of the Chernoff-bounded uniform-slicing error against analog.
    pub chernoff: SnrInterval,
    /// Scan of the exact closed-form digital error against analog.
    pub numeric: SnrInterval,
}

/// Computes the theoretical and scanned regions for the configured `B`, `L`
/// and `K`. `L` must divide `B`.
pub fn region_endpoints(config: &ExperimentConfig) -> Result<RegionEndpoints> {
    config.validate()?;
    let (bits, l, k) = (config.bits, config.slices, config.devices);
    if !(bits as usize).is_multiple_of(l) {
        return Err(invalid(format!(
            "region needs l | b, got b={bits} and l={l}"
        )));
    }
    let spec = config.quantizer()?;
    let scheme = ube_scheme(bits, l)?;
    let det = config.detector_config();
    let analog = |g: f64| analog_error(spec.width(), l, g);
    let (lo, hi) = SCAN_RANGE_DB;
    let theory = snr_regime(bits, bits / l as u32, l, k, CoefficientMode::Exact)?;
    let chernoff = crossover_scan(
        |g| Ok(digital_error_uniform_chernoff(&spec, l, k, g, CoefficientMode::Exact)? - analog(g)),
        lo,
        hi,
        SCAN_STEP_DB,
    )?;
    let numeric = crossover_scan(
        |g| {
            let agg = aggregation_error_snr(&spec, &scheme, k, g, ErrorMode::Exact, det)?;
            Ok(agg + spec.quantization_error(k) - analog(g))
        },
        lo,
        hi,
        SCAN_STEP_DB,
    )?;
    Ok(RegionEndpoints {
        theory,
        chernoff,
        numeric,
    })
}

/// Runs the configured experiment over its grid.
pub fn sweep(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    match config.kind {
        ExperimentKind::SweepSnr => sweep_snr(config),
        ExperimentKind::Latency => sweep_latency(config),
        ExperimentKind::Region => sweep_region(config),
        ExperimentKind::Adaptive => sweep_adaptive(config),
        ExperimentKind::Analyze => sweep_analyze(config),
    }
}

fn per_point<F>(config: &ExperimentConfig, f: F) -> Result<Vec<ResultRow>>
where
    F: Fn(usize, f64) -> Result<Vec<ResultRow>> + Sync,
{
    let rows = config
        .snr_db
        .par_iter()
        .enumerate()
        .map(|(i, &g)| f(i, g))
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn digital_label(config: &ExperimentConfig, prefix: &str) -> String {
    format!("{prefix}-{}", detector_name(config.detector))
}

fn sweep_snr(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let lat = latency_aircomp(config);
    per_point(config, |i, g| {
        let (_, scheme) = config.resolve_scheme(g)?;
        let digital = run_digital(config, g, i)?;
        let analog = run_analog(config, g, i)?;
        let (orth, orth_lat) = run_orthogonal(config, g)?;
        let seed = |f| point_seed(config.seed, config.kind, f, i);
        Ok(vec![
            ResultRow::from_report(
                config,
                digital_label(config, "digital"),
                &digital,
                scheme.label(),
                lat,
                seed(SchemeFamily::Digital),
            ),
            ResultRow::from_report(
                config,
                "analog",
                &analog,
                String::new(),
                lat,
                seed(SchemeFamily::Analog),
            ),
            ResultRow::from_report(
                config,
                "orthogonal",
                &orth,
                String::new(),
                orth_lat,
                seed(SchemeFamily::Orthogonal),
            ),
        ])
    })
}

fn sweep_latency(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    if config.device_counts.is_empty() {
        return Err(invalid("latency sweep needs at least one device count"));
    }
    let mut rows = Vec::new();
    for &k in &config.device_counts {
        let cfg = ExperimentConfig {
            devices: k,
            ..config.clone()
        };
        let (spec, scheme) = cfg.resolve_scheme(cfg.avg_snr_db)?;
        for &g in &cfg.snr_db {
            let digital = digital_report(
                &spec,
                &scheme,
                k,
                g,
                ErrorMode::Exact,
                cfg.detector_config(),
            )?;
            let (orth, orth_lat) = run_orthogonal(&cfg, g)?;
            rows.push(ResultRow::from_report(
                &cfg,
                digital_label(&cfg, "digital"),
                &digital,
                scheme.label(),
                latency_aircomp(&cfg),
                cfg.seed,
            ));
            rows.push(ResultRow::from_report(
                &cfg,
                "orthogonal",
                &orth,
                String::new(),
                orth_lat,
                cfg.seed,
            ));
        }
    }
    Ok(rows)
}

fn endpoint_rows(
    config: &ExperimentConfig,
    name: &str,
    interval: &SnrInterval,
    rows: &mut Vec<ResultRow>,
) -> Result<()> {
    let spec = config.quantizer()?;
    let scheme = ube_scheme(config.bits, config.slices)?;
    for (side, v) in [("lower", interval.lower), ("upper", interval.upper)] {
        let Some(g) = v else { continue };
        // at an endpoint both errors coincide; report the analog one
        let rep = analog_report(&spec, config.slices, config.devices, linear_to_db(g));
        let mut row = ResultRow::from_report(
            config,
            format!("{name}-{side}"),
            &rep,
            scheme.label(),
            0.0,
            config.seed,
        );
        row.b = config.bits;
        rows.push(row);
    }
    Ok(())
}

fn sweep_region(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for &bits in &config.region_bits {
        let cfg = ExperimentConfig {
            bits,
            scheme: SchemeChoice::Ube,
            ..config.clone()
        };
        let r = region_endpoints(&cfg)?;
        endpoint_rows(&cfg, "theory", &r.theory, &mut rows)?;
        endpoint_rows(&cfg, "chernoff", &r.chernoff, &mut rows)?;
        endpoint_rows(&cfg, "numeric", &r.numeric, &mut rows)?;
    }
    Ok(rows)
}

fn sweep_adaptive(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let adaptive = ExperimentConfig {
        scheme: SchemeChoice::Adaptive,
        ..config.clone()
    };
    let lat = latency_aircomp(config);
    per_point(config, |i, g| {
        let (spec, scheme) = adaptive.resolve_scheme(g)?;
        let seed = point_seed(config.seed, config.kind, SchemeFamily::Digital, i);
        let mut rows = Vec::with_capacity(2);
        let ube = ube_scheme(spec.bits(), config.slices)?;
        for (name, s) in [("adaptive", &scheme), ("ube", &ube)] {
            let cfg = ExperimentConfig {
                bits: spec.bits(),
                scheme: SchemeChoice::Explicit(s.clone()),
                ..config.clone()
            };
            let rep = run_digital_with(&cfg, &spec, s, g, seed)?;
            rows.push(ResultRow::from_report(
                &cfg,
                digital_label(&cfg, name),
                &rep,
                s.label(),
                lat,
                seed,
            ));
        }
        Ok(rows)
    })
}

fn closed_row(
    config: &ExperimentConfig,
    name: &str,
    rep: &ErrorReport,
    slicing: String,
) -> ResultRow {
    ResultRow::from_report(
        config,
        name,
        rep,
        slicing,
        latency_aircomp(config),
        config.seed,
    )
}

fn sweep_analyze(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let det = config.detector_config();
    per_point(config, |_, g| {
        let (spec, scheme) = config.resolve_scheme(g)?;
        let k = config.devices;
        let mut rows = vec![
            closed_row(
                config,
                "digital-exact",
                &digital_report(&spec, &scheme, k, g, ErrorMode::Exact, det)?,
                scheme.label(),
            ),
            closed_row(
                config,
                "digital-asymptotic",
                &digital_report(&spec, &scheme, k, g, ErrorMode::Asymptotic, det)?,
                scheme.label(),
            ),
        ];
        if (spec.bits() as usize).is_multiple_of(config.slices)
            && scheme == ube_scheme(spec.bits(), config.slices)?
        {
            let snr = db_to_linear(g);
            let energy = spec.aggregate_energy(k);
            for (name, total) in [
                (
                    "digital-uniform",
                    digital_error_uniform(&spec, config.slices, k, snr, CoefficientMode::Exact)?,
                ),
                (
                    "digital-chernoff",
                    digital_error_uniform_chernoff(
                        &spec,
                        config.slices,
                        k,
                        snr,
                        CoefficientMode::Exact,
                    )?,
                ),
            ] {
                let q = spec.quantization_error(k);
                let mut rep = digital_report(&spec, &scheme, k, g, ErrorMode::Exact, det)?;
                rep.aggregation_error = total - q;
                rep.total = total;
                rep.normalized = total / energy;
                rows.push(closed_row(config, name, &rep, scheme.label()));
            }
        }
        rows.push(closed_row(
            config,
            "analog",
            &analog_report(&spec, config.slices, k, g),
            String::new(),
        ));
        let (orth, orth_lat) = run_orthogonal(config, g)?;
        let mut row = closed_row(config, "orthogonal", &orth, String::new());
        row.latency_s = orth_lat;
        rows.push(row);
        Ok(rows)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_intervals_nest_sensibly() {
        let cfg = ExperimentConfig::default();
        let r = region_endpoints(&cfg).unwrap();
        let (tl, th) = (r.theory.lower_db().unwrap(), r.theory.upper_db().unwrap());
        let (cl, ch) = (
            r.chernoff.lower_db().unwrap(),
            r.chernoff.upper_db().unwrap(),
        );
        assert!((tl - cl).abs() < 0.05 && (th - ch).abs() < 0.05);
        // the bound overstates the digital error, so the true window is wider
        let (nl, nh) = (r.numeric.lower_db().unwrap(), r.numeric.upper_db().unwrap());
        assert!(nl < tl && nh > th - 0.5);
        let bad = ExperimentConfig {
            bits: 8,
            ..Default::default()
        };
        assert!(region_endpoints(&bad).is_err());
    }

    #[test]
    fn analyze_rows() {
        let cfg = ExperimentConfig {
            kind: ExperimentKind::Analyze,
            snr_db: vec![10.0, 20.0],
            ..Default::default()
        };
        let rows = sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 12);
        assert!(rows.iter().all(|r| r.trials == 0 && r.nmse >= 0.0));
        let floor = rows.iter().find(|r| r.scheme == "orthogonal").unwrap().nmse;
        assert!((floor - 2.441e-4).abs() < 1e-6);
    }

    #[test]
    fn latency_rows() {
        let cfg = ExperimentConfig {
            kind: ExperimentKind::Latency,
            snr_db: vec![10.0],
            device_counts: vec![2, 20],
            ..Default::default()
        };
        let rows = sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].latency_s, rows[2].latency_s);
        assert!(rows[3].latency_s / rows[2].latency_s >= 10.0);
    }

    #[test]
    fn adaptive_rows_are_paired() {
        let cfg = ExperimentConfig {
            kind: ExperimentKind::Adaptive,
            snr_db: vec![18.0],
            trials: 8192,
            ..Default::default()
        };
        let rows = sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].seed, rows[1].seed);
        assert_eq!(rows[0].b, 10);
        assert_eq!(rows[1].slicing, "2-2-2-2-1-1");
    }
}

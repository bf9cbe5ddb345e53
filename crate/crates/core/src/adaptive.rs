//! Bit allocation: offline choice of the precision `B` under balanced
//! slicing, then online choice of the slice widths for the current SNR.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{aggregation_error_snr, ErrorMode};
use crate::bits::{QuantizerSpec, SlicingScheme};
use crate::detector::DetectorConfig;
use crate::error::{invalid, Result};

/// Outcome of the two-stage optimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptivePlan {
    pub bits: u32,
    pub scheme: SlicingScheme,
    /// Aggregation error of `scheme` at `snr`.
    pub objective: f64,
    /// Linear SNR the slicing was optimized for.
    pub snr: f64,
}

/// Most balanced split: `⌈B/L⌉` for the first `B mod L` slices, `⌊B/L⌋` for
/// the rest.
pub fn ube_scheme(bits: u32, slices: usize) -> Result<SlicingScheme> {
    if slices == 0 || (bits as usize) < slices {
        return Err(invalid(format!(
            "cannot split {bits} bits into {slices} non-empty slices"
        )));
    }
    let l = slices as u32;
    let (base, extra) = (bits / l, bits % l);
    SlicingScheme::new((0..l).map(|i| base + u32::from(i < extra)).collect())
}

/// All partitions of `B` into exactly `L` non-increasing positive parts, in
/// descending lexicographic order (most unbalanced first).
pub fn enumerate_schemes(bits: u32, slices: usize) -> Result<Vec<SlicingScheme>> {
    if slices == 0 || (bits as usize) < slices {
        return Err(invalid(format!(
            "cannot split {bits} bits into {slices} non-empty slices"
        )));
    }
    fn fill(rest: u32, slots: usize, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        // every remaining slot needs at least one bit
        let hi = cap.min(rest - (slots as u32 - 1));
        let lo = rest.div_ceil(slots as u32);
        for w in (lo..=hi).rev() {
            cur.push(w);
            fill(rest - w, slots - 1, w, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    fill(
        bits,
        slices,
        bits,
        &mut Vec::with_capacity(slices),
        &mut out,
    );
    out.into_iter().map(SlicingScheme::new).collect()
}

/// Number of partitions of `n` into exactly `k` parts.
pub fn partition_count(n: u32, k: usize) -> u64 {
    let (n, k) = (n as usize, k);
    if k > n {
        return 0;
    }
    // p[i][j]: partitions of i into exactly j parts
    let mut p = vec![vec![0u64; k + 1]; n + 1];
    p[0][0] = 1;
    for i in 1..=n {
        for j in 1..=k.min(i) {
            p[i][j] = p[i - 1][j - 1] + p[i - j][j];
        }
    }
    p[n][k]
}

/// Exact aggregation error of `scheme` at linear SNR `snr`.
pub fn objective(
    spec: &QuantizerSpec,
    scheme: &SlicingScheme,
    devices: usize,
    snr: f64,
    config: DetectorConfig,
) -> Result<f64> {
    aggregation_error_snr(spec, scheme, devices, snr, ErrorMode::Exact, config)
}

/// Argmin of [`objective`] over all non-increasing `L`-part schemes of the
/// spec's precision. Ties go to the later (more balanced) scheme.
pub fn optimize_slicing(
    spec: &QuantizerSpec,
    slices: usize,
    devices: usize,
    snr: f64,
    config: DetectorConfig,
) -> Result<(SlicingScheme, f64)> {
    let schemes = enumerate_schemes(spec.bits(), slices)?;
    let values = schemes
        .par_iter()
        .map(|s| objective(spec, s, devices, snr, config))
        .collect::<Result<Vec<f64>>>()?;
    let best = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v <= values[best] { i } else { best });
    Ok((schemes[best].clone(), values[best]))
}

/// Default candidate precisions `[L, L + 8]`.
pub fn default_precision_range(slices: usize) -> RangeInclusive<u32> {
    slices as u32..=slices as u32 + 8
}

/// Precision minimizing the UBE aggregation error plus the quantization
/// error `KΔ²/12` at the average SNR. `base` fixes the data range.
pub fn optimize_precision(
    base: &QuantizerSpec,
    bits: RangeInclusive<u32>,
    slices: usize,
    devices: usize,
    avg_snr: f64,
    config: DetectorConfig,
) -> Result<u32> {
    if bits.is_empty() {
        return Err(invalid("empty precision range"));
    }
    if (*bits.start() as usize) < slices {
        return Err(invalid(format!(
            "precision range must start at L = {slices} or above"
        )));
    }
    let candidates: Vec<u32> = bits.collect();
    let values = candidates
        .par_iter()
        .map(|&b| {
            let spec = base.with_bits(b)?;
            let agg = objective(&spec, &ube_scheme(b, slices)?, devices, avg_snr, config)?;
            Ok(agg + spec.quantization_error(devices))
        })
        .collect::<Result<Vec<f64>>>()?;
    let best = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v < values[best] { i } else { best });
    Ok(candidates[best])
}

/// Offline precision at `avg_snr`, then online slicing at `snr`.
pub fn adaptive_plan(
    base: &QuantizerSpec,
    bits: RangeInclusive<u32>,
    slices: usize,
    devices: usize,
    avg_snr: f64,
    snr: f64,
    config: DetectorConfig,
) -> Result<AdaptivePlan> {
    let b = optimize_precision(base, bits, slices, devices, avg_snr, config)?;
    let spec = base.with_bits(b)?;
    let (scheme, objective) = optimize_slicing(&spec, slices, devices, snr, config)?;
    Ok(AdaptivePlan {
        bits: b,
        scheme,
        objective,
        snr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::db_to_linear;
    use proptest::prelude::*;

    fn widths(s: &[SlicingScheme]) -> Vec<Vec<u32>> {
        s.iter().map(|s| s.widths().to_vec()).collect()
    }

    #[test]
    fn ube_examples() {
        assert_eq!(ube_scheme(10, 6).unwrap().widths(), &[2, 2, 2, 2, 1, 1]);
        assert_eq!(ube_scheme(12, 6).unwrap().widths(), &[2; 6]);
        assert_eq!(ube_scheme(8, 3).unwrap().widths(), &[3, 3, 2]);
        assert!(ube_scheme(3, 4).is_err());
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(
            widths(&enumerate_schemes(8, 4).unwrap()),
            vec![
                vec![5, 1, 1, 1],
                vec![4, 2, 1, 1],
                vec![3, 3, 1, 1],
                vec![3, 2, 2, 1],
                vec![2, 2, 2, 2]
            ]
        );
        assert_eq!(widths(&enumerate_schemes(3, 2).unwrap()), vec![vec![2, 1]]);
        assert_eq!(widths(&enumerate_schemes(7, 1).unwrap()), vec![vec![7]]);
        assert!(enumerate_schemes(2, 3).is_err());
    }

    #[test]
    fn enumeration_counts_match_recurrence() {
        // known values of p(n, k)
        assert_eq!(partition_count(8, 4), 5);
        assert_eq!(partition_count(10, 3), 8);
        assert_eq!(partition_count(20, 5), 84);
        for b in 1..=20 {
            for l in 1..=b as usize {
                let all = enumerate_schemes(b, l).unwrap();
                assert_eq!(all.len() as u64, partition_count(b, l), "B={b} L={l}");
                for s in &all {
                    assert!(s.is_non_increasing() && s.total_bits() == b && s.len() == l);
                }
                for w in all.windows(2) {
                    assert!(w[0].widths() > w[1].widths());
                }
                assert_eq!(all.last().unwrap(), &ube_scheme(b, l).unwrap());
            }
        }
    }

    #[test]
    fn objective_decreases_in_snr() {
        let spec = QuantizerSpec::new(10, -1.0, 1.0).unwrap();
        let cfg = DetectorConfig::default();
        for s in enumerate_schemes(10, 6).unwrap() {
            let mut prev = f64::INFINITY;
            for db in (0..=30).step_by(3) {
                let v = objective(&spec, &s, 10, db_to_linear(db as f64), cfg).unwrap();
                assert!(v < prev, "{s} at {db} dB");
                prev = v;
            }
        }
    }

    #[test]
    fn sliced_beats_unsliced_at_moderate_snr() {
        let spec = QuantizerSpec::new(6, -1.0, 1.0).unwrap();
        let cfg = DetectorConfig::default();
        let at = |db: f64| {
            let g = db_to_linear(db);
            let whole = objective(&spec, &SlicingScheme::unsliced(6).unwrap(), 10, g, cfg).unwrap();
            let sliced =
                objective(&spec, &SlicingScheme::uniform(1, 6).unwrap(), 10, g, cfg).unwrap();
            (whole, sliced)
        };
        for db in [6.0, 10.0, 15.0] {
            let (whole, sliced) = at(db);
            assert!(sliced < whole, "{db} dB: {sliced} vs {whole}");
        }
        let (whole, sliced) = at(10.0);
        assert!(sliced * 10.0 < whole);
        // near 0 dB both saturate and the single wide constellation is ahead
        let (whole, sliced) = at(0.0);
        assert!(whole < sliced);
    }

    #[test]
    fn slicing_optimum_by_snr() {
        let spec = QuantizerSpec::new(10, -1.0, 1.0).unwrap();
        let cfg = DetectorConfig::default();
        for db in [5.0, 10.0, 15.0] {
            let (s, _) = optimize_slicing(&spec, 6, 10, db_to_linear(db), cfg).unwrap();
            assert_eq!(s.widths(), &[5, 1, 1, 1, 1, 1], "{db} dB");
        }
        for db in [20.0, 25.0, 30.0] {
            let (s, _) = optimize_slicing(&spec, 6, 10, db_to_linear(db), cfg).unwrap();
            assert_eq!(s, ube_scheme(10, 6).unwrap(), "{db} dB");
        }
        let (s, _) = optimize_slicing(&QuantizerSpec::unit(4).unwrap(), 4, 10, 1.0, cfg).unwrap();
        assert_eq!(s.widths(), &[1, 1, 1, 1]);
    }

    #[test]
    fn optimal_max_width_shifts_down() {
        let spec = QuantizerSpec::new(10, -1.0, 1.0).unwrap();
        let cfg = DetectorConfig::default();
        let mut prev = u32::MAX;
        for db in 5..=30 {
            let (s, _) = optimize_slicing(&spec, 6, 10, db_to_linear(db as f64), cfg).unwrap();
            assert!(s.max_width() <= prev, "{db} dB: {s}");
            prev = s.max_width();
        }
    }

    #[test]
    fn precision_choice() {
        let base = QuantizerSpec::new(6, -1.0, 1.0).unwrap();
        let cfg = DetectorConfig::default();
        let b18 = optimize_precision(
            &base,
            default_precision_range(6),
            6,
            10,
            db_to_linear(18.0),
            cfg,
        )
        .unwrap();
        assert_eq!(b18, 10);
        let hi = optimize_precision(&base, 6..=14, 6, 10, 1e12, cfg).unwrap();
        assert_eq!(hi, 14);
        let b8 = optimize_precision(&base, 6..=14, 6, 10, db_to_linear(8.0), cfg).unwrap();
        assert!(b8 < b18);
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 9..=8;
        assert!(optimize_precision(&base, empty, 6, 10, 10.0, cfg).is_err());
        assert!(optimize_precision(&base, 4..=8, 6, 10, 10.0, cfg).is_err());
    }

    #[test]
    fn plan_dominates_fixed_schemes() {
        let base = QuantizerSpec::new(6, -1.0, 1.0).unwrap();
        let cfg = DetectorConfig::default();
        let g18 = db_to_linear(18.0);
        let plan = adaptive_plan(&base, 6..=12, 6, 10, g18, g18, cfg).unwrap();
        assert_eq!(plan.bits, 10);
        assert_eq!(
            plan,
            adaptive_plan(&base, 6..=12, 6, 10, g18, g18, cfg).unwrap()
        );
        let spec = base.with_bits(plan.bits).unwrap();
        let ube = ube_scheme(plan.bits, 6).unwrap();
        let unbalanced = enumerate_schemes(plan.bits, 6).unwrap()[0].clone();
        for db in 6..=24 {
            let g = db_to_linear(db as f64);
            let p = adaptive_plan(&base, 6..=12, 6, 10, g18, g, cfg).unwrap();
            assert_eq!(p.bits, plan.bits);
            assert!(p.objective <= objective(&spec, &ube, 10, g, cfg).unwrap());
            assert!(p.objective <= objective(&spec, &unbalanced, 10, g, cfg).unwrap());
        }
    }

    proptest! {
        #[test]
        fn ube_is_balanced(l in 1usize..12, extra in 0u32..20) {
            let b = l as u32 + extra;
            let s = ube_scheme(b, l).unwrap();
            prop_assert_eq!(s.total_bits(), b);
            prop_assert!(s.is_non_increasing());
            prop_assert!(s.widths()[0] - s.widths()[l - 1] <= 1);
        }
    }
}

//! SNR regime in which digital AirComp with uniform slicing beats analog
//! AirComp with `L`-fold repetition.
//!
//! Bounding `Q(x) ≤ e^{−x²/2}/2` in the uniform-slicing error and comparing
//! with `δ²/(12Lγ)` gives `γe^{−d²γ/4} + rγ < 4^B/(6LAC)` with
//! `r = K/(6AC)`. The left side rises, falls and rises again, so the set of
//! winning SNRs (away from `γ → 0`) is the interval between the roots on the
//! `W_{r,−1}` and `W_{r,−2}` branches.

use serde::{Deserialize, Serialize};

use super::special::{lambert_w_minus1, r_lambert_roots};
use super::{coefficient, slicing_gain, CoefficientMode};
use crate::error::{invalid, Result};
use crate::modem::PamGrid;
use crate::{db_to_linear, linear_to_db};

/// Interval of linear SNRs. A missing endpoint means the interval extends
/// past the searched range on that side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrInterval {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub empty: bool,
}

impl SnrInterval {
    pub const EMPTY: Self = Self {
        lower: None,
        upper: None,
        empty: true,
    };

    pub fn lower_db(&self) -> Option<f64> {
        self.lower.map(linear_to_db)
    }

    pub fn upper_db(&self) -> Option<f64> {
        self.upper.map(linear_to_db)
    }

    pub fn contains(&self, snr: f64) -> bool {
        !self.empty
            && self.lower.is_none_or(|lo| snr >= lo)
            && self.upper.is_none_or(|hi| snr <= hi)
    }
}

struct UniformTerms {
    c: f64,
    r: f64,
    a: f64,
}

fn uniform_terms(
    bits: u32,
    bits_per_slice: u32,
    slices: usize,
    devices: usize,
    mode: CoefficientMode,
) -> Result<UniformTerms> {
    if bits_per_slice == 0 || slices == 0 || bits != bits_per_slice * slices as u32 {
        return Err(invalid(format!(
            "uniform slicing needs B = b·L, got B={bits}, b={bits_per_slice}, L={slices}"
        )));
    }
    if devices == 0 {
        return Err(invalid("need at least one device"));
    }
    let grid = PamGrid::new(bits_per_slice)?;
    let a_coef = coefficient(grid.levels(), devices, mode)?;
    let ac = a_coef * slicing_gain(bits, bits_per_slice);
    let d2 = grid.spacing() * grid.spacing();
    Ok(UniformTerms {
        c: -d2 / 4.0,
        r: devices as f64 / (6.0 * ac),
        a: 4f64.powi(bits as i32) / (6.0 * slices as f64 * ac),
    })
}

fn r_limit() -> f64 {
    (-2.0f64).exp()
}

/// SNR interval (linear) where the Chernoff-bounded digital error is below
/// the analog error. Empty when no such interval exists or `r ≥ 1/e²`.
pub fn snr_regime(
    bits: u32,
    bits_per_slice: u32,
    slices: usize,
    devices: usize,
    mode: CoefficientMode,
) -> Result<SnrInterval> {
    let t = uniform_terms(bits, bits_per_slice, slices, devices, mode)?;
    if t.r >= r_limit() {
        return Ok(SnrInterval::EMPTY);
    }
    let roots = r_lambert_roots(t.c, t.r, t.a)?;
    Ok(match roots.branch_minus2 {
        None => SnrInterval::EMPTY,
        Some(hi) => SnrInterval {
            lower: roots.branch_minus1,
            upper: Some(hi),
            empty: false,
        },
    })
}

/// Sufficient condition `−r[W + 1/W − 2] < 1/(8L)`, `W = W_{−1}(−re)`, for a
/// non-empty regime.
pub fn regime_condition_holds(
    bits: u32,
    bits_per_slice: u32,
    slices: usize,
    devices: usize,
    mode: CoefficientMode,
) -> Result<bool> {
    let t = uniform_terms(bits, bits_per_slice, slices, devices, mode)?;
    if t.r >= r_limit() {
        return Ok(false);
    }
    let w = lambert_w_minus1(-t.r * std::f64::consts::E)?;
    Ok(-t.r * (w + 1.0 / w - 2.0) < 1.0 / (8.0 * slices as f64))
}

// largest k in [lo, hi] with pred(k), given pred(lo) and !pred(hi + 1)-monotone
fn last_true<F: Fn(usize) -> Result<bool>>(mut lo: usize, mut hi: usize, pred: F) -> Result<usize> {
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if pred(mid)? {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}

/// Largest device count for which [`regime_condition_holds`]; zero if it fails
/// already at `K = 1`.
///
/// With exact `A` the search first brackets the answer using the bound
/// `A = 2` (which makes the condition weaker), so the exact coefficient is
/// only evaluated a logarithmic number of times.
pub fn regime_max_devices(
    bits: u32,
    bits_per_slice: u32,
    slices: usize,
    mode: CoefficientMode,
) -> Result<usize> {
    let holds =
        |k: usize, m: CoefficientMode| regime_condition_holds(bits, bits_per_slice, slices, k, m);
    if !holds(1, mode)? {
        return Ok(0);
    }
    // r ≥ 1/e² beyond this count even with A = 2
    let ceiling = (12.0 * slicing_gain(bits, bits_per_slice) * r_limit()).ceil() as usize + 1;
    let bound = last_true(1, ceiling, |k| holds(k, CoefficientMode::Bound))?;
    if mode == CoefficientMode::Bound {
        return Ok(bound);
    }
    let mut lo = bound;
    while !holds(lo, mode)? {
        lo /= 2;
    }
    last_true(lo, bound, |k| holds(k, mode))
}

/// Scans `gap(γ)` (digital minus analog error, linear `γ`) over a dB grid
/// and returns the first interval where it is negative, with endpoints
/// refined by bisection.
pub fn crossover_scan<F: Fn(f64) -> Result<f64>>(
    gap: F,
    min_db: f64,
    max_db: f64,
    step_db: f64,
) -> Result<SnrInterval> {
    if !(step_db > 0.0) || !(max_db > min_db) {
        return Err(invalid(format!(
            "invalid scan grid [{min_db}, {max_db}] step {step_db}"
        )));
    }
    let f = |db: f64| gap(db_to_linear(db));
    let refine = |mut neg: f64, mut pos: f64| -> Result<f64> {
        for _ in 0..60 {
            let mid = 0.5 * (neg + pos);
            if f(mid)? < 0.0 {
                neg = mid;
            } else {
                pos = mid;
            }
        }
        Ok(0.5 * (neg + pos))
    };
    let n = ((max_db - min_db) / step_db).round() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| min_db + i as f64 * step_db).collect();
    let values = grid.iter().map(|&db| f(db)).collect::<Result<Vec<f64>>>()?;
    let Some(first) = values.iter().position(|&v| v < 0.0) else {
        return Ok(SnrInterval::EMPTY);
    };
    let lower = if first == 0 {
        None
    } else {
        Some(db_to_linear(refine(grid[first], grid[first - 1])?))
    };
    let upper = match values[first..].iter().position(|&v| v >= 0.0) {
        None => None,
        Some(off) => {
            let i = first + off;
            Some(db_to_linear(refine(grid[i - 1], grid[i])?))
        }
    };
    Ok(SnrInterval {
        lower,
        upper,
        empty: false,
    })
}

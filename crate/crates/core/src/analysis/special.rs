//! Special functions: Gaussian tail, real Lambert W branches and the
//! three-branch r-Lambert equation `x·e^{cx} + r·x = a`.

use std::f64::consts::{E, SQRT_2};

use crate::error::{invalid, Error, Result};

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
#[inline]
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

const BRANCH_POINT: f64 = -1.0 / E;

fn halley(x: f64, mut w: f64) -> f64 {
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs().max(1.0) {
            break;
        }
    }
    w
}

// series around the branch point in p = ±sqrt(2(1 + e·x))
fn branch_point_series(p: f64) -> f64 {
    -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p - 43.0 / 540.0 * p.powi(4)
}

/// Principal branch `W_0(x)` for `x ≥ −1/e`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if !x.is_finite() || x < BRANCH_POINT {
        return Err(Error::Domain { function: "W_0", x });
    }
    if x == BRANCH_POINT {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let guess = if x < -0.25 {
        branch_point_series((2.0 * (1.0 + E * x)).max(0.0).sqrt())
    } else if x < 3.0 {
        // log1p keeps the guess accurate near the origin
        x.ln_1p() * (1.0 - x.ln_1p().ln_1p() / (2.0 + x.ln_1p()))
    } else {
        let l = x.ln();
        l - l.ln()
    };
    Ok(halley(x, guess))
}

/// Secondary real branch `W_{−1}(x)` for `x ∈ [−1/e, 0)`, with `W ≤ −1`.
pub fn lambert_w_minus1(x: f64) -> Result<f64> {
    if !x.is_finite() || !(BRANCH_POINT..0.0).contains(&x) {
        return Err(Error::Domain {
            function: "W_-1",
            x,
        });
    }
    if x == BRANCH_POINT {
        return Ok(-1.0);
    }
    let guess = if x < -0.25 {
        branch_point_series(-(2.0 * (1.0 + E * x)).max(0.0).sqrt())
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    Ok(halley(x, guess).min(-1.0))
}

/// Real roots of `x·e^{cx} + r·x = a` grouped by r-Lambert branch.
///
/// With `w = c·x` the equation becomes `w·e^w + r·w = c·a`. For
/// `0 < r < 1/e²` the left side rises on `(−∞, w₁]`, falls on `[w₁, w₂]` and
/// rises again on `[w₂, ∞)`, where `w₁ = W_{−1}(−re) − 1` and
/// `w₂ = W_0(−re) − 1`. Roots on those pieces belong to the branches
/// `W_{r,−2}`, `W_{r,−1}` and `W_{r,0}`. Because `c < 0` the `x` values come
/// out in reverse order: `branch_zero < branch_minus1 < branch_minus2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RLambertRoots {
    pub branch_minus2: Option<f64>,
    pub branch_minus1: Option<f64>,
    pub branch_zero: Option<f64>,
}

impl RLambertRoots {
    /// All roots in increasing `x`.
    pub fn ordered(&self) -> Vec<f64> {
        [self.branch_zero, self.branch_minus1, self.branch_minus2]
            .into_iter()
            .flatten()
            .collect()
    }
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `x·e^{cx} + r·x = a` for `c < 0`, `r ∈ (0, 1/e²)` and `a > 0`.
pub fn r_lambert_roots(c: f64, r: f64, a: f64) -> Result<RLambertRoots> {
    if !(c < 0.0) || !c.is_finite() {
        return Err(invalid(format!("r-Lambert requires c < 0, got {c}")));
    }
    if !(r > 0.0) || r >= (-2.0f64).exp() {
        return Err(invalid(format!(
            "r-Lambert requires r in (0, 1/e^2), got {r}"
        )));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(invalid(format!("r-Lambert requires a > 0, got {a}")));
    }
    let g = |w: f64| w * w.exp() + r * w;
    let target = c * a;
    let w1 = lambert_w_minus1(-r * E)? - 1.0;
    let w2 = lambert_w0(-r * E)? - 1.0;
    let (g1, g2) = (g(w1), g(w2));
    let h = |w: f64| g(w) - target;

    let mut roots = RLambertRoots::default();
    if target <= g1 {
        // g(w) < r·w for w < 0, so g(target/r − 1) < target − r
        let lo = (target / r - 1.0).min(w1);
        roots.branch_minus2 = Some(bisect(h, lo, w1) / c);
    }
    if g2 <= target && target <= g1 {
        roots.branch_minus1 = Some(bisect(h, w1, w2) / c);
    }
    if target >= g2 {
        roots.branch_zero = Some(bisect(h, w2, 0.0) / c);
    }
    Ok(roots)
}

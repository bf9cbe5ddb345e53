//! Symbol mapping.
//!
//! Digital AirComp maps the `ℓ`-th sliced integers of two consecutive data
//! values onto the I and Q branches of a unit-power square `4^b`-QAM symbol.
//! The analog baseline maps the values themselves, affinely, to a unit-power
//! complex symbol.

use num_complex::Complex64;

use crate::bits::QuantizerSpec;
use crate::error::{invalid, Error, Result};

/// Complex baseband symbol.
pub type ComplexSymbol = Complex64;

/// Per-branch PAM grid of a square `4^b`-QAM constellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PamGrid {
    bits: u32,
    spacing: f64,
}

impl PamGrid {
    pub fn new(bits_per_branch: u32) -> Result<Self> {
        if bits_per_branch == 0 || bits_per_branch > 20 {
            return Err(invalid(format!(
                "bits per branch must be in 1..=20, got {bits_per_branch}"
            )));
        }
        let qam_order = 4f64.powi(bits_per_branch as i32);
        Ok(Self {
            bits: bits_per_branch,
            spacing: (6.0 / (qam_order - 1.0)).sqrt(),
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// `P = 2^b`.
    pub fn levels(&self) -> u64 {
        1u64 << self.bits
    }

    /// Adjacent-point distance `d = sqrt(6 / (4^b − 1))`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Branch amplitude `(q − (P − 1)/2)·d`.
    #[inline]
    pub fn level(&self, q: u64) -> f64 {
        (q as f64 - (self.levels() - 1) as f64 / 2.0) * self.spacing
    }

    fn check(&self, q: u64) -> Result<()> {
        if q >= self.levels() {
            return Err(Error::IndexOutOfRange {
                index: q,
                max: self.levels() - 1,
            });
        }
        Ok(())
    }

    /// Inverts the superposition of `k` branch amplitudes back to the sum of
    /// sliced integers, rounding and clipping to `[0, (P − 1)K]`.
    #[inline]
    pub fn demap_branch(&self, amplitude: f64, k: usize) -> u64 {
        let max = ((self.levels() - 1) * k as u64) as f64;
        let u = amplitude / self.spacing + max / 2.0;
        u.round().clamp(0.0, max) as u64
    }
}

/// Maps two sliced integers to the I/Q branches of a QAM symbol.
pub fn map_digital(q_odd: u64, q_even: u64, grid: &PamGrid) -> Result<ComplexSymbol> {
    grid.check(q_odd)?;
    grid.check(q_even)?;
    Ok(Complex64::new(grid.level(q_odd), grid.level(q_even)))
}

/// Recovers the aggregated sliced integers `(û_odd, û_even)` from a detected
/// aggregate symbol.
pub fn demap_digital(symbol: ComplexSymbol, grid: &PamGrid, k: usize) -> (u64, u64) {
    (
        grid.demap_branch(symbol.re, k),
        grid.demap_branch(symbol.im, k),
    )
}

/// Affine analog mapping for the repetition-coded baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalogMapper {
    offset: f64,
    width: f64,
}

impl AnalogMapper {
    pub fn new(x_min: f64, x_max: f64) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(invalid(format!("invalid range [{x_min}, {x_max}]")));
        }
        Ok(Self {
            offset: x_max + x_min,
            width: x_max - x_min,
        })
    }

    pub fn from_spec(spec: &QuantizerSpec) -> Self {
        Self {
            offset: spec.offset(),
            width: spec.width(),
        }
    }

    #[inline]
    fn scale(&self) -> f64 {
        6f64.sqrt() / self.width
    }

    /// `(x − τ_x/2)·√6/δ_x` on each branch.
    pub fn map(&self, x_odd: f64, x_even: f64) -> ComplexSymbol {
        let s = self.scale();
        Complex64::new(
            (x_odd - self.offset / 2.0) * s,
            (x_even - self.offset / 2.0) * s,
        )
    }

    /// Estimates the two aggregated values from a received symbol:
    /// `Re(r)·δ_x/(ρ√6) + τ_x K/2` (and likewise for Q).
    pub fn demap(&self, r: ComplexSymbol, rho: f64, k: usize) -> Result<(f64, f64)> {
        if !(rho > 0.0) {
            return Err(invalid(format!(
                "scaling factor must be positive, got {rho}"
            )));
        }
        let g = 1.0 / (rho * self.scale());
        let c = self.offset * k as f64 / 2.0;
        Ok((r.re * g + c, r.im * g + c))
    }
}

pub fn map_analog(x_odd: f64, x_even: f64, mapper: &AnalogMapper) -> ComplexSymbol {
    mapper.map(x_odd, x_even)
}

pub fn demap_analog(
    r: ComplexSymbol,
    rho: f64,
    k: usize,
    mapper: &AnalogMapper,
) -> Result<(f64, f64)> {
    mapper.demap(r, rho, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn digital_map_examples() {
        let g1 = PamGrid::new(1).unwrap();
        assert!((g1.spacing() - 2f64.sqrt()).abs() < 1e-15);
        let m = map_digital(0, 1, &g1).unwrap();
        assert!(
            (m.re + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12
                && (m.im - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12
        );

        let g2 = PamGrid::new(2).unwrap();
        assert!((g2.spacing() - 0.4f64.sqrt()).abs() < 1e-15);
        let m = map_digital(0, 3, &g2).unwrap();
        assert!((m.re + 0.94868).abs() < 1e-5 && (m.im - 0.94868).abs() < 1e-5);

        assert!(map_digital(4, 0, &g2).is_err());
        assert!(map_digital(0, 4, &g2).is_err());
    }

    #[test]
    fn digital_grid_unit_power() {
        for b in 1..=3 {
            let g = PamGrid::new(b).unwrap();
            let p = g.levels();
            let mut acc = 0.0;
            for i in 0..p {
                for q in 0..p {
                    acc += map_digital(i, q, &g).unwrap().norm_sqr();
                }
            }
            assert!((acc / (p * p) as f64 - 1.0).abs() < 1e-12, "b = {b}");
        }
    }

    #[test]
    fn digital_demap_single_device_identity() {
        for b in 1..=3 {
            let g = PamGrid::new(b).unwrap();
            for i in 0..g.levels() {
                for q in 0..g.levels() {
                    let s = map_digital(i, q, &g).unwrap();
                    assert_eq!(demap_digital(s, &g, 1), (i, q));
                }
            }
        }
    }

    #[test]
    fn digital_demap_aggregate() {
        let g = PamGrid::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = 10;
        for _ in 0..10_000 {
            let mut s = Complex64::new(0.0, 0.0);
            let (mut uo, mut ue) = (0, 0);
            for _ in 0..k {
                let (a, b) = (rng.random_range(0..4), rng.random_range(0..4));
                uo += a;
                ue += b;
                s += map_digital(a, b, &g).unwrap();
            }
            assert_eq!(demap_digital(s, &g, k), (uo, ue));
        }
        assert_eq!(
            demap_digital(Complex64::new(0.0, 0.0), &PamGrid::new(1).unwrap(), 2),
            (1, 1)
        );
        // off-lattice input is clipped
        assert_eq!(demap_digital(Complex64::new(1e3, -1e3), &g, 2), (6, 0));
    }

    #[test]
    fn analog_examples() {
        let m = AnalogMapper::new(-1.0, 1.0).unwrap();
        assert_eq!(m.map(0.0, 0.0), Complex64::new(0.0, 0.0));
        let s = m.map(1.0, -1.0);
        assert!((s.re - 1.2247449).abs() < 1e-6 && (s.im + 1.2247449).abs() < 1e-6);
        let m2 = AnalogMapper::new(0.0, 4.0).unwrap();
        assert_eq!(m2.map(2.0, 2.0), Complex64::new(0.0, 0.0));
        assert_eq!(
            m.demap(Complex64::new(0.0, 0.0), 1.0, 2).unwrap(),
            (0.0, 0.0)
        );
        assert!(m.demap(Complex64::new(0.0, 0.0), 0.0, 2).is_err());
        assert!(AnalogMapper::new(1.0, -1.0).is_err());
    }

    #[test]
    fn analog_unit_power() {
        let m = AnalogMapper::new(-3.0, 5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 200_000;
        let p: f64 = (0..n)
            .map(|_| {
                m.map(rng.random_range(-3.0..5.0), rng.random_range(-3.0..5.0))
                    .norm_sqr()
            })
            .sum::<f64>()
            / n as f64;
        assert!((p - 1.0).abs() < 0.01, "power {p}");
    }

    #[test]
    fn analog_noiseless_loop_and_affinity() {
        let m = AnalogMapper::new(-1.0, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (k, rho) = (10, 0.7);
        for _ in 0..1000 {
            let mut s = Complex64::new(0.0, 0.0);
            let (mut yo, mut ye) = (0.0, 0.0);
            for _ in 0..k {
                let (a, b) = (rng.random_range(-1.0..3.0), rng.random_range(-1.0..3.0));
                yo += a;
                ye += b;
                s += m.map(a, b);
            }
            let (eo, ee) = m.demap(s * rho, rho, k).unwrap();
            assert!((eo - yo).abs() < 1e-9 && (ee - ye).abs() < 1e-9);

            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let (no, ne) = m.demap(s * rho + z, rho, k).unwrap();
            let g = 4.0 / (rho * 6f64.sqrt());
            assert!((no - eo - z.re * g).abs() < 1e-9 && (ne - ee - z.im * g).abs() < 1e-9);
        }
    }
}

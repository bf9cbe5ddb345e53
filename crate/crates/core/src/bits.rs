//! Bit-level pipeline: uniform quantization, bit-slicing, aggregated slice
//! assembly and denormalization of the aggregated index.
//!
//! Indices are `u64`. Slice 1 (position 0 here) carries the least significant
//! bits of the quantization index.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest supported quantizer precision.
pub const MAX_PRECISION_BITS: u32 = 30;

/// Uniform `B`-bit quantizer over `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizerSpec {
    bits: u32,
    x_min: f64,
    x_max: f64,
    step: f64,
}

impl QuantizerSpec {
    pub fn new(bits: u32, x_min: f64, x_max: f64) -> Result<Self> {
        if bits == 0 || bits > MAX_PRECISION_BITS {
            return Err(invalid(format!(
                "precision must be in 1..={MAX_PRECISION_BITS} bits, got {bits}"
            )));
        }
        if !x_min.is_finite() || !x_max.is_finite() || x_max <= x_min {
            return Err(invalid(format!(
                "dynamic range must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        let step = (x_max - x_min) / (1u64 << bits) as f64;
        Ok(Self {
            bits,
            x_min,
            x_max,
            step,
        })
    }

    /// `bits`-bit quantizer on the default range `[-1, 1]`.
    pub fn unit(bits: u32) -> Result<Self> {
        Self::new(bits, -1.0, 1.0)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Step size `Δ = (x_max − x_min) / 2^B`.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Number of codebook entries, `2^B`.
    pub fn levels(&self) -> u64 {
        1u64 << self.bits
    }

    pub fn max_index(&self) -> u64 {
        self.levels() - 1
    }

    /// Dynamic range width `δ_x = x_max − x_min`.
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    /// `τ_x = x_max + x_min`.
    pub fn offset(&self) -> f64 {
        self.x_max + self.x_min
    }

    /// Same range at a different precision.
    pub fn with_bits(&self, bits: u32) -> Result<Self> {
        Self::new(bits, self.x_min, self.x_max)
    }

    /// Codebook index of `x`; values outside the range are clamped.
    pub fn quantize(&self, x: f64) -> Result<u64> {
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        let cell = ((x - self.x_min) / self.step).floor();
        Ok(cell.clamp(0.0, self.max_index() as f64) as u64)
    }

    /// Cell midpoint `qΔ + Δ/2 + x_min`.
    pub fn dequantize(&self, q: u64) -> Result<f64> {
        if q > self.max_index() {
            return Err(Error::IndexOutOfRange {
                index: q,
                max: self.max_index(),
            });
        }
        Ok(self.reconstruct(q))
    }

    #[inline]
    fn reconstruct(&self, q: u64) -> f64 {
        q as f64 * self.step + (0.5 * self.step + self.x_min)
    }

    /// Maps an aggregated index `û` from `k` devices back to the value domain:
    /// `ŷ = ûΔ + (Δ/2 + x_min)K`.
    pub fn denormalize(&self, u: u64, k: usize) -> f64 {
        u as f64 * self.step + (0.5 * self.step + self.x_min) * k as f64
    }

    /// Aggregated quantization error `K·Δ²/12`.
    pub fn quantization_error(&self, k: usize) -> f64 {
        k as f64 * self.step * self.step / 12.0
    }

    /// Energy of the ideal aggregate, `E[y²] = Kδ_x²/12 + (Kτ_x/2)²`, under
    /// i.i.d. uniform sources.
    pub fn aggregate_energy(&self, k: usize) -> f64 {
        let k = k as f64;
        let mean = k * self.offset() / 2.0;
        k * self.width() * self.width() / 12.0 + mean * mean
    }
}

/// Ordered slice widths `b_1..b_L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct SlicingScheme {
    widths: Vec<u32>,
    // cumulative[l] = c_l, with cumulative[0] = 0
    cumulative: Vec<u32>,
}

impl SlicingScheme {
    pub fn new(widths: Vec<u32>) -> Result<Self> {
        if widths.is_empty() {
            return Err(invalid("a slicing scheme needs at least one slice"));
        }
        if let Some(pos) = widths.iter().position(|&b| b == 0) {
            return Err(invalid(format!("slice {} has zero width", pos + 1)));
        }
        let mut cumulative = Vec::with_capacity(widths.len() + 1);
        cumulative.push(0u32);
        for &b in &widths {
            cumulative.push(cumulative.last().unwrap() + b);
        }
        let total = *cumulative.last().unwrap();
        if total > MAX_PRECISION_BITS {
            return Err(invalid(format!(
                "total width {total} exceeds {MAX_PRECISION_BITS} bits"
            )));
        }
        Ok(Self { widths, cumulative })
    }

    /// `L` slices of `b` bits each.
    pub fn uniform(bits_per_slice: u32, slices: usize) -> Result<Self> {
        Self::new(vec![bits_per_slice; slices])
    }

    /// Single slice carrying all `bits`, i.e. no slicing.
    pub fn unsliced(bits: u32) -> Result<Self> {
        Self::new(vec![bits])
    }

    pub fn widths(&self) -> &[u32] {
        &self.widths
    }

    pub fn len(&self) -> usize {
        self.widths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.widths.is_empty()
    }

    /// Total width `c_L`.
    pub fn total_bits(&self) -> u32 {
        *self.cumulative.last().unwrap()
    }

    /// Bit offset `c_{ℓ−1}` of slice `slice` (0-based).
    pub fn offset(&self, slice: usize) -> u32 {
        self.cumulative[slice]
    }

    pub fn max_width(&self) -> u32 {
        self.widths.iter().copied().max().unwrap()
    }

    pub fn is_non_increasing(&self) -> bool {
        self.widths.windows(2).all(|w| w[0] >= w[1])
    }

    /// Verifies the scheme covers exactly the quantizer's precision.
    pub fn check_against(&self, spec: &QuantizerSpec) -> Result<()> {
        if self.total_bits() != spec.bits() {
            return Err(invalid(format!(
                "scheme {self} covers {} bits but the quantizer has {}",
                self.total_bits(),
                spec.bits()
            )));
        }
        Ok(())
    }

    /// Splits `q` into sliced integers, least significant slice first.
    pub fn slice(&self, q: u64) -> Result<Vec<u64>> {
        let mut out = vec![0; self.len()];
        self.slice_into(q, &mut out)?;
        Ok(out)
    }

    /// Allocation-free variant of [`slice`](Self::slice).
    pub fn slice_into(&self, q: u64, out: &mut [u64]) -> Result<()> {
        let limit = 1u64 << self.total_bits();
        if q >= limit {
            return Err(Error::IndexOutOfRange {
                index: q,
                max: limit - 1,
            });
        }
        if out.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: out.len(),
            });
        }
        for (l, slot) in out.iter_mut().enumerate() {
            // ⌊q / 2^{c_{ℓ−1}}⌋ − 2^{b_ℓ} ⌊q / 2^{c_ℓ}⌋
            let low = q >> self.cumulative[l];
            let high = q >> self.cumulative[l + 1];
            *slot = low - (high << self.widths[l]);
        }
        Ok(())
    }

    /// Inverse of [`slice`](Self::slice): `q = Σ 2^{c_{ℓ−1}} q[ℓ]`.
    pub fn reconstruct_index(&self, slices: &[u64]) -> Result<u64> {
        self.weighted_sum(slices, 1)
    }

    /// Assembles aggregated slice sums from `k` devices into `û`.
    ///
    /// Each `û[ℓ]` must lie in `[0, (2^{b_ℓ} − 1)K]`. With error-free slice
    /// sums this returns `Σ_k q_k`.
    pub fn assemble_aggregate(&self, slice_sums: &[u64], k: usize) -> Result<u64> {
        self.weighted_sum(slice_sums, k as u64)
    }

    fn weighted_sum(&self, values: &[u64], k: u64) -> Result<u64> {
        if values.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: values.len(),
            });
        }
        let mut acc = 0u64;
        for (l, &v) in values.iter().enumerate() {
            let max = ((1u64 << self.widths[l]) - 1) * k;
            if v > max {
                return Err(Error::IndexOutOfRange { index: v, max });
            }
            acc += v << self.cumulative[l];
        }
        Ok(acc)
    }

    /// Dash-separated widths, e.g. `2-2-1`.
    pub fn label(&self) -> String {
        self.widths
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join("-")
    }
}

impl fmt::Display for SlicingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, b) in self.widths.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "]")
    }
}

impl TryFrom<Vec<u32>> for SlicingScheme {
    type Error = Error;

    fn try_from(widths: Vec<u32>) -> Result<Self> {
        Self::new(widths)
    }
}

impl From<SlicingScheme> for Vec<u32> {
    fn from(scheme: SlicingScheme) -> Self {
        scheme.widths
    }
}

/// One device's data vector `x_k[1..M]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataBatch {
    pub values: Vec<f64>,
    pub seed: u64,
}

impl DataBatch {
    /// `len` i.i.d. uniform draws over the quantizer's range.
    pub fn uniform(spec: &QuantizerSpec, len: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::uniform_from(spec, len, &mut rng, seed)
    }

    pub(crate) fn uniform_from<R: Rng + ?Sized>(
        spec: &QuantizerSpec,
        len: usize,
        rng: &mut R,
        seed: u64,
    ) -> Self {
        let values = (0..len)
            .map(|_| rng.random_range(spec.x_min()..spec.x_max()))
            .collect();
        Self { values, seed }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values padded with one `x_min` sample when the length is odd, so that
    /// they can be consumed in I/Q pairs.
    pub fn padded_values(&self, x_min: f64) -> Vec<f64> {
        let mut v = self.values.clone();
        if v.len() % 2 == 1 {
            v.push(x_min);
        }
        v
    }
}

/// Length after padding to an even number of samples.
pub fn padded_len(len: usize) -> usize {
    len + len % 2
}

/// Receiver output of digital AirComp: estimates `ŷ[m]` and the aggregated
/// indices `û[m]` they were denormalized from.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub y_hat: Vec<f64>,
    pub u_hat: Vec<u64>,
    pub k: usize,
}

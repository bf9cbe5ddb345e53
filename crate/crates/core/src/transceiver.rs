//! End-to-end digital and analog AirComp links.
//!
//! Each data vector is consumed in I/Q pairs: pair `i` of every device is
//! carried by `L` consecutive symbols (one per slice for the digital scheme,
//! one per repetition for the analog scheme).

use crate::bits::{padded_len, AggregateResult, DataBatch, QuantizerSpec, SlicingScheme};
use crate::channel::MultiAccessChannel;
use crate::detector::{Detector, DetectorConfig};
use crate::error::{invalid, Error, Result};
use crate::modem::{map_digital, AnalogMapper, ComplexSymbol, PamGrid};

fn check_batches(batches: &[DataBatch], channel: &MultiAccessChannel) -> Result<usize> {
    if batches.len() != channel.config().devices {
        return Err(Error::LengthMismatch {
            expected: channel.config().devices,
            got: batches.len(),
        });
    }
    let len = batches.first().map_or(0, DataBatch::len);
    if len == 0 {
        return Err(invalid("data batches must be non-empty"));
    }
    if let Some(b) = batches.iter().find(|b| b.len() != len) {
        return Err(Error::LengthMismatch {
            expected: len,
            got: b.len(),
        });
    }
    Ok(len)
}

/// Digital AirComp with bit-slicing and per-slice MAP (or ML) detection.
#[derive(Debug, Clone)]
pub struct DigitalAirComp {
    spec: QuantizerSpec,
    scheme: SlicingScheme,
    grids: Vec<PamGrid>,
    detectors: Vec<Detector>,
}

impl DigitalAirComp {
    /// Builds one detector per slice for `devices` users at gain `ρ` and
    /// noise variance `σ_z²`.
    pub fn new(
        spec: QuantizerSpec,
        scheme: SlicingScheme,
        devices: usize,
        rho: f64,
        noise_variance: f64,
        config: DetectorConfig,
    ) -> Result<Self> {
        scheme.check_against(&spec)?;
        let grids = scheme
            .widths()
            .iter()
            .map(|&b| PamGrid::new(b))
            .collect::<Result<Vec<_>>>()?;
        let mut detectors: Vec<Detector> = Vec::with_capacity(grids.len());
        for (l, g) in grids.iter().enumerate() {
            // slices of equal width share a detector
            let reuse = grids[..l].iter().position(|p| p.bits() == g.bits());
            detectors.push(match reuse {
                Some(i) => detectors[i].clone(),
                None => Detector::new(g, devices, rho, noise_variance, config)?,
            });
        }
        Ok(Self {
            spec,
            scheme,
            grids,
            detectors,
        })
    }

    pub fn spec(&self) -> &QuantizerSpec {
        &self.spec
    }

    pub fn scheme(&self) -> &SlicingScheme {
        &self.scheme
    }

    /// Per-device transmit symbols for one data vector.
    pub fn modulate(&self, batch: &DataBatch) -> Result<Vec<ComplexSymbol>> {
        let values = batch.padded_values(self.spec.x_min());
        let l = self.scheme.len();
        let mut symbols = Vec::with_capacity(values.len() / 2 * l);
        let (mut odd, mut even) = (vec![0; l], vec![0; l]);
        for pair in values.chunks_exact(2) {
            self.scheme
                .slice_into(self.spec.quantize(pair[0])?, &mut odd)?;
            self.scheme
                .slice_into(self.spec.quantize(pair[1])?, &mut even)?;
            for s in 0..l {
                symbols.push(map_digital(odd[s], even[s], &self.grids[s])?);
            }
        }
        Ok(symbols)
    }

    /// Detects every slice symbol and reassembles the aggregated indices.
    pub fn demodulate(
        &self,
        received: &[ComplexSymbol],
        len: usize,
        k: usize,
    ) -> Result<AggregateResult> {
        let l = self.scheme.len();
        if received.len() != padded_len(len) / 2 * l {
            return Err(Error::LengthMismatch {
                expected: padded_len(len) / 2 * l,
                got: received.len(),
            });
        }
        let mut u_hat = Vec::with_capacity(padded_len(len));
        let (mut odd, mut even) = (vec![0u64; l], vec![0u64; l]);
        for block in received.chunks_exact(l) {
            for (s, &r) in block.iter().enumerate() {
                // a lattice index is the aggregated sliced integer it represents
                let (i, q) = self.detectors[s].detect_qam_indices(r);
                odd[s] = i as u64;
                even[s] = q as u64;
            }
            u_hat.push(self.scheme.assemble_aggregate(&odd, k)?);
            u_hat.push(self.scheme.assemble_aggregate(&even, k)?);
        }
        u_hat.truncate(len);
        let y_hat = u_hat.iter().map(|&u| self.spec.denormalize(u, k)).collect();
        Ok(AggregateResult { y_hat, u_hat, k })
    }

    /// Runs quantize, slice, map, transmit, detect, assemble and denormalize.
    pub fn aggregate(
        &self,
        batches: &[DataBatch],
        channel: &mut MultiAccessChannel,
    ) -> Result<AggregateResult> {
        let len = check_batches(batches, channel)?;
        let symbols = batches
            .iter()
            .map(|b| self.modulate(b))
            .collect::<Result<Vec<_>>>()?;
        let received = channel.transmit(&symbols)?;
        self.demodulate(&received, len, batches.len())
    }
}

/// Analog AirComp with `L`-fold repetition and receiver averaging.
#[derive(Debug, Clone, Copy)]
pub struct AnalogAirComp {
    mapper: AnalogMapper,
    x_min: f64,
    repetitions: usize,
}

impl AnalogAirComp {
    pub fn new(x_min: f64, x_max: f64, repetitions: usize) -> Result<Self> {
        if repetitions == 0 {
            return Err(invalid("at least one repetition is required"));
        }
        Ok(Self {
            mapper: AnalogMapper::new(x_min, x_max)?,
            x_min,
            repetitions,
        })
    }

    pub fn repetitions(&self) -> usize {
        self.repetitions
    }

    pub fn modulate(&self, batch: &DataBatch) -> Vec<ComplexSymbol> {
        batch
            .padded_values(self.x_min)
            .chunks_exact(2)
            .flat_map(|p| std::iter::repeat_n(self.mapper.map(p[0], p[1]), self.repetitions))
            .collect()
    }

    /// Estimates of `y[m]` from the received symbols.
    pub fn aggregate(
        &self,
        batches: &[DataBatch],
        channel: &mut MultiAccessChannel,
    ) -> Result<Vec<f64>> {
        let len = check_batches(batches, channel)?;
        let symbols: Vec<_> = batches.iter().map(|b| self.modulate(b)).collect();
        let received = channel.transmit(&symbols)?;
        let (rho, k) = (channel.config().rho, batches.len());
        let scale = 1.0 / self.repetitions as f64;
        let mut out = Vec::with_capacity(padded_len(len));
        for block in received.chunks_exact(self.repetitions) {
            let (mut a, mut b) = (0.0, 0.0);
            for &r in block {
                let (x, y) = self.mapper.demap(r, rho, k)?;
                a += x;
                b += y;
            }
            out.push(a * scale);
            out.push(b * scale);
        }
        out.truncate(len);
        Ok(out)
    }
}

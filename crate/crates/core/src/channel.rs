//! K-user multi-access channel with block fading, channel-inversion power
//! control and complex AWGN.
//!
//! Noise and fading use independent RNG streams derived from the configured
//! seed, so a run in [`InversionMode::Explicit`] sees exactly the same noise
//! realization as the equivalent [`InversionMode::Effective`] run.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::modem::ComplexSymbol;

/// Default `|h|²` level under which a draw is counted as a deep fade.
pub const DEFAULT_DEEP_FADE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InversionMode {
    /// Received signal is `ρ·Σ m + z`; fading is cancelled analytically.
    #[default]
    Effective,
    /// Fading is drawn per coherence block and each device pre-multiplies by
    /// `ρ/h_k`.
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub devices: usize,
    /// Scaling factor `ρ`.
    pub rho: f64,
    /// Total complex noise variance `σ_z²` (half per branch).
    pub noise_variance: f64,
    /// Degrees of freedom `κ` of the `χ²` channel power gain.
    pub fading_dof: f64,
    /// Coherence length `R` in symbol slots.
    pub coherence: usize,
    pub mode: InversionMode,
    pub deep_fade_floor: f64,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn new(devices: usize, rho: f64, noise_variance: f64, seed: u64) -> Result<Self> {
        let cfg = Self {
            devices,
            rho,
            noise_variance,
            fading_dof: 1.0,
            coherence: 64,
            mode: InversionMode::Effective,
            deep_fade_floor: DEFAULT_DEEP_FADE_FLOOR,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `ρ = 1` and `σ_z² = 1/γ` for the given per-device SNR in dB.
    pub fn from_snr_db(devices: usize, snr_db: f64, seed: u64) -> Result<Self> {
        Self::new(devices, 1.0, 1.0 / crate::db_to_linear(snr_db), seed)
    }

    pub fn with_mode(mut self, mode: InversionMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.devices == 0 {
            return Err(invalid("at least one device is required"));
        }
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(invalid(format!(
                "scaling factor must be positive, got {}",
                self.rho
            )));
        }
        if !(self.noise_variance >= 0.0) || !self.noise_variance.is_finite() {
            return Err(invalid(format!(
                "noise variance must be finite and non-negative, got {}",
                self.noise_variance
            )));
        }
        if !(self.fading_dof >= 1.0) {
            return Err(invalid(format!(
                "fading degrees of freedom must be >= 1, got {}",
                self.fading_dof
            )));
        }
        if self.coherence == 0 {
            return Err(invalid("coherence length must be positive"));
        }
        Ok(())
    }

    /// Receive SNR `γ = ρ²/σ_z²` (infinite when noiseless).
    pub fn snr(&self) -> f64 {
        self.rho * self.rho / self.noise_variance
    }
}

/// Draws `K` i.i.d. gains with `|h|² ~ χ²(κ)` and uniform phase.
pub fn draw_fading<R: Rng + ?Sized>(config: &ChannelConfig, rng: &mut R) -> Vec<Complex64> {
    let chi = ChiSquared::new(config.fading_dof).expect("validated degrees of freedom");
    (0..config.devices)
        .map(|_| {
            let power: f64 = chi.sample(rng);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(power.sqrt(), phase)
        })
        .collect()
}

/// Channel-inversion precoder for one device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub weight: Complex64,
    /// `|h|²` fell below the deep-fade floor; the precoder is still applied.
    pub deep_fade: bool,
}

/// Computes `w = ρ/h` so that `h·w = ρ`.
pub fn invert(h: Complex64, rho: f64, deep_fade_floor: f64) -> Result<Inversion> {
    let power = h.norm_sqr();
    if !(power > 0.0) || !power.is_finite() {
        return Err(Error::Domain {
            function: "channel inversion",
            x: power,
        });
    }
    Ok(Inversion {
        weight: Complex64::new(rho, 0.0) / h,
        deep_fade: power < deep_fade_floor,
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChannelDiagnostics {
    pub fading_draws: u64,
    pub deep_fades: u64,
    transmit_power_sum: f64,
    transmissions: u64,
}

impl ChannelDiagnostics {
    /// Empirical mean of `|w_k|² = ρ²/|h_k|²` over all device transmissions.
    ///
    /// For `κ ≤ 2` the population mean is infinite, so this estimate does not
    /// converge; it is reported for inspection only.
    pub fn mean_transmit_power(&self) -> Option<f64> {
        (self.transmissions > 0).then(|| self.transmit_power_sum / self.transmissions as f64)
    }
}

/// Stateful channel instance owning its noise and fading streams.
#[derive(Debug, Clone)]
pub struct MultiAccessChannel {
    config: ChannelConfig,
    noise_std: f64,
    noise_rng: ChaCha8Rng,
    fading_rng: ChaCha8Rng,
    weights: Vec<Complex64>,
    gains: Vec<Complex64>,
    slot: usize,
    diagnostics: ChannelDiagnostics,
}

impl MultiAccessChannel {
    pub fn new(config: ChannelConfig) -> Result<Self> {
        config.validate()?;
        let noise_rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut fading_rng = ChaCha8Rng::seed_from_u64(config.seed);
        fading_rng.set_stream(1);
        Ok(Self {
            noise_std: (config.noise_variance / 2.0).sqrt(),
            config,
            noise_rng,
            fading_rng,
            weights: Vec::new(),
            gains: Vec::new(),
            slot: 0,
            diagnostics: ChannelDiagnostics::default(),
        })
    }

    pub fn config(&self) -> &ChannelConfig {
        &self.config
    }

    pub fn diagnostics(&self) -> &ChannelDiagnostics {
        &self.diagnostics
    }

    /// One complex noise sample with variance `σ_z²/2` per branch.
    #[inline]
    pub fn noise(&mut self) -> Complex64 {
        if self.noise_std == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let re: f64 = StandardNormal.sample(&mut self.noise_rng);
        let im: f64 = StandardNormal.sample(&mut self.noise_rng);
        Complex64::new(re * self.noise_std, im * self.noise_std)
    }

    /// Effective post-inversion model `ρ·s + z` for an ideal superposition `s`.
    #[inline]
    pub fn receive_superposed(&mut self, s: ComplexSymbol) -> ComplexSymbol {
        s * self.config.rho + self.noise()
    }

    fn refresh_fading(&mut self) -> Result<()> {
        self.gains = draw_fading(&self.config, &mut self.fading_rng);
        self.weights.clear();
        for &h in &self.gains {
            let inv = invert(h, self.config.rho, self.config.deep_fade_floor)?;
            self.diagnostics.fading_draws += 1;
            if inv.deep_fade {
                self.diagnostics.deep_fades += 1;
            }
            self.weights.push(inv.weight);
        }
        Ok(())
    }

    /// Sends one symbol sequence per device over the channel.
    pub fn transmit(&mut self, symbols: &[Vec<ComplexSymbol>]) -> Result<Vec<ComplexSymbol>> {
        if symbols.len() != self.config.devices {
            return Err(Error::LengthMismatch {
                expected: self.config.devices,
                got: symbols.len(),
            });
        }
        let len = symbols[0].len();
        if let Some(bad) = symbols.iter().find(|s| s.len() != len) {
            return Err(Error::LengthMismatch {
                expected: len,
                got: bad.len(),
            });
        }
        let mut out = Vec::with_capacity(len);
        for t in 0..len {
            let r = match self.config.mode {
                InversionMode::Effective => {
                    let s: Complex64 = symbols.iter().map(|m| m[t]).sum();
                    self.receive_superposed(s)
                }
                InversionMode::Explicit => {
                    if self.slot == 0 {
                        self.refresh_fading()?;
                    }
                    self.slot = (self.slot + 1) % self.config.coherence;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (k, m) in symbols.iter().enumerate() {
                        let w = self.weights[k];
                        self.diagnostics.transmit_power_sum += w.norm_sqr();
                        self.diagnostics.transmissions += 1;
                        acc += self.gains[k] * w * m[t];
                    }
                    acc + self.noise()
                }
            };
            out.push(r);
        }
        Ok(out)
    }
}

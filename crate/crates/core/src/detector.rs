//! Detection of superimposed PAM/QAM symbols.
//!
//! The sum of `K` i.i.d. uniform `P`-level PAM symbols lives on a lattice of
//! `(P − 1)K + 1` evenly spaced points whose prior distribution is far from
//! uniform. The MAP detector shifts every decision boundary away from the
//! more probable neighbour; with uniform priors it collapses to the ML
//! (midpoint) detector.
//!
//! Lattice indices are 0-based throughout: point `j` is
//! `s_j = (j − (N − 1)/2)·d` with `N = (P − 1)K + 1`, so an index equals the
//! aggregated sum of sliced integers it represents.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::modem::{ComplexSymbol, PamGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorMode {
    /// Exact lattice distribution (iterated convolution).
    #[default]
    Exact,
    /// Discrete Normal approximation, renormalized.
    Normal,
    /// Equiprobable points.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryMode {
    /// Prior log-ratio shift of each midpoint.
    #[default]
    General,
    /// Closed form `ρ(s_j − d/2)(1 + 1/(γK))` implied by the Normal priors.
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorKind {
    #[default]
    Map,
    Ml,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub kind: DetectorKind,
    pub priors: PriorMode,
    pub boundaries: BoundaryMode,
}

impl DetectorConfig {
    pub fn ml() -> Self {
        Self {
            kind: DetectorKind::Ml,
            ..Self::default()
        }
    }
}

fn binomial(n: i128, k: i128) -> Option<i128> {
    if n < 0 || k < 0 || k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Polynomial coefficient `Σ_t (−1)^t C(k,t) C(n + k − tm − 1, k − 1)`: the
/// number of ways to place `n` balls into `k` bins holding at most `m − 1`
/// balls each.
pub fn polycoef(n: u64, k: u64, m: u64) -> Result<u128> {
    if k == 0 || m < 2 {
        return Err(invalid(format!(
            "polycoef requires k >= 1 and m >= 2, got k={k}, m={m}"
        )));
    }
    let overflow = || invalid(format!("polycoef({n}, {k}, {m}) overflows 128 bits"));
    let (n, k, m) = (n as i128, k as i128, m as i128);
    let mut acc: i128 = 0;
    let mut t = 0;
    while t <= k && t * m <= n {
        let term = binomial(k, t)
            .and_then(|a| binomial(n + k - t * m - 1, k - 1).and_then(|b| a.checked_mul(b)))
            .ok_or_else(overflow)?;
        acc = if t % 2 == 0 {
            acc.checked_add(term)
        } else {
            acc.checked_sub(term)
        }
        .ok_or_else(overflow)?;
        t += 1;
    }
    Ok(acc as u128)
}

fn check_lattice(levels: u64, devices: usize) -> Result<()> {
    if levels < 2 {
        return Err(invalid(format!("need at least 2 levels, got {levels}")));
    }
    if devices == 0 {
        return Err(invalid("need at least one device"));
    }
    Ok(())
}

/// Lattice size `(P − 1)K + 1`.
pub fn lattice_len(levels: u64, devices: usize) -> usize {
    (levels as usize - 1) * devices + 1
}

/// Exact priors of the `K`-fold sum of uniform `P`-level symbols.
///
/// Computed by repeated convolution with the uniform mass function, each
/// step normalized, so all intermediate values stay in `[0, 1]`. For very
/// large `K·P` the outermost entries underflow to zero.
pub fn exact_priors(levels: u64, devices: usize) -> Result<Vec<f64>> {
    check_lattice(levels, devices)?;
    let p = levels as usize;
    let w = 1.0 / p as f64;
    let mut cur = vec![w; p];
    for _ in 1..devices {
        let mut next = vec![0.0; cur.len() + p - 1];
        for (i, slot) in next.iter_mut().enumerate() {
            let lo = i.saturating_sub(p - 1);
            let hi = i.min(cur.len() - 1);
            *slot = cur[lo..=hi].iter().sum::<f64>() * w;
        }
        cur = next;
    }
    // the mass function is symmetric; remove rounding asymmetry
    let n = cur.len();
    for j in 0..n / 2 {
        let v = 0.5 * (cur[j] + cur[n - 1 - j]);
        cur[j] = v;
        cur[n - 1 - j] = v;
    }
    Ok(cur)
}

fn normal_moments(levels: u64, devices: usize) -> (f64, f64) {
    let (p, k) = (levels as f64, devices as f64);
    // 0-based lattice index with mean (P − 1)K/2
    let mean = (p - 1.0) * k / 2.0;
    let var = (p * p - 1.0) * k / 12.0;
    (mean, var)
}

/// Unnormalized discrete Normal density `exp(−(j − μ)²/(2σ²))/√(2πσ²)`
/// with `σ² = (P² − 1)K/12`, centred on the lattice.
pub fn normal_density(levels: u64, devices: usize) -> Result<Vec<f64>> {
    check_lattice(levels, devices)?;
    let (mean, var) = normal_moments(levels, devices);
    let norm = 1.0 / (2.0 * std::f64::consts::PI * var).sqrt();
    Ok((0..lattice_len(levels, devices))
        .map(|j| {
            let x = j as f64 - mean;
            norm * (-x * x / (2.0 * var)).exp()
        })
        .collect())
}

fn normal_log_priors(levels: u64, devices: usize) -> Vec<f64> {
    let (mean, var) = normal_moments(levels, devices);
    let n = lattice_len(levels, devices);
    let raw: Vec<f64> = (0..n)
        .map(|j| {
            let x = j as f64 - mean;
            -x * x / (2.0 * var)
        })
        .collect();
    let max = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let log_norm = max + raw.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
    raw.into_iter().map(|v| v - log_norm).collect()
}

/// Normal-approximate priors renormalized to sum to one.
pub fn normal_priors(levels: u64, devices: usize) -> Result<Vec<f64>> {
    check_lattice(levels, devices)?;
    Ok(normal_log_priors(levels, devices)
        .into_iter()
        .map(f64::exp)
        .collect())
}

/// Superimposed PAM lattice with its prior distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedConstellation {
    levels: u64,
    devices: usize,
    spacing: f64,
    points: Vec<f64>,
    priors: Vec<f64>,
    log_priors: Vec<f64>,
    mode: PriorMode,
}

impl AggregatedConstellation {
    pub fn new(grid: &PamGrid, devices: usize, mode: PriorMode) -> Result<Self> {
        Self::with_spacing(grid.levels(), devices, grid.spacing(), mode)
    }

    pub fn with_spacing(
        levels: u64,
        devices: usize,
        spacing: f64,
        mode: PriorMode,
    ) -> Result<Self> {
        check_lattice(levels, devices)?;
        if !(spacing > 0.0) {
            return Err(invalid(format!("spacing must be positive, got {spacing}")));
        }
        let n = lattice_len(levels, devices);
        let (priors, log_priors) = match mode {
            PriorMode::Exact => {
                let p = exact_priors(levels, devices)?;
                let lp = p.iter().map(|v| v.ln()).collect();
                (p, lp)
            }
            PriorMode::Normal => {
                let lp = normal_log_priors(levels, devices);
                (lp.iter().map(|v| v.exp()).collect(), lp)
            }
            PriorMode::Uniform => {
                let v = 1.0 / n as f64;
                (vec![v; n], vec![v.ln(); n])
            }
        };
        let centre = (n - 1) as f64 / 2.0;
        let points = (0..n).map(|j| (j as f64 - centre) * spacing).collect();
        Ok(Self {
            levels,
            devices,
            spacing,
            points,
            priors,
            log_priors,
            mode,
        })
    }

    pub fn levels(&self) -> u64 {
        self.levels
    }

    pub fn devices(&self) -> usize {
        self.devices
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn log_priors(&self) -> &[f64] {
        &self.log_priors
    }

    pub fn mode(&self) -> PriorMode {
        self.mode
    }

    /// Midpoint between points `j − 1` and `j`, i.e. `s_j − d/2`.
    #[inline]
    fn midpoint(&self, j: usize) -> f64 {
        self.points[j] - self.spacing / 2.0
    }
}

/// Interior decision boundaries; region `j` is `(lower(j), upper(j)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySet {
    interior: Vec<f64>,
}

impl BoundarySet {
    pub fn new(interior: Vec<f64>) -> Result<Self> {
        if let Some(i) = interior.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::NonMonotoneBoundaries(i + 1));
        }
        if interior.iter().any(|b| !b.is_finite()) {
            return Err(invalid("decision boundaries must be finite"));
        }
        Ok(Self { interior })
    }

    /// Boundaries between consecutive lattice points (`N − 1` values).
    pub fn interior(&self) -> &[f64] {
        &self.interior
    }

    pub fn regions(&self) -> usize {
        self.interior.len() + 1
    }

    pub fn lower(&self, j: usize) -> f64 {
        if j == 0 {
            f64::NEG_INFINITY
        } else {
            self.interior[j - 1]
        }
    }

    pub fn upper(&self, j: usize) -> f64 {
        self.interior.get(j).copied().unwrap_or(f64::INFINITY)
    }

    /// Index of the region containing `r`; a tie goes to the lower index.
    #[inline]
    pub fn region(&self, r: f64) -> usize {
        self.interior.partition_point(|&b| b < r)
    }
}

/// ML boundaries `ρ(s_j − d/2)`.
pub fn ml_boundaries(constellation: &AggregatedConstellation, rho: f64) -> Result<BoundarySet> {
    BoundarySet::new(
        (1..constellation.len())
            .map(|j| rho * constellation.midpoint(j))
            .collect(),
    )
}

/// MAP boundaries for arbitrary priors:
/// `b_j = ρ(s_j − d/2) − σ_z²/(2ρd)·ln(p_j/p_{j−1})`.
pub fn map_boundaries(
    constellation: &AggregatedConstellation,
    rho: f64,
    noise_variance: f64,
) -> Result<BoundarySet> {
    check_link(rho, noise_variance)?;
    let lp = constellation.log_priors();
    let shift = noise_variance / (2.0 * rho * constellation.spacing());
    let mut interior = Vec::with_capacity(constellation.len() - 1);
    for j in 1..constellation.len() {
        if !lp[j].is_finite() {
            return Err(Error::ZeroPrior(j));
        }
        if !lp[j - 1].is_finite() {
            return Err(Error::ZeroPrior(j - 1));
        }
        interior.push(rho * constellation.midpoint(j) - shift * (lp[j] - lp[j - 1]));
    }
    BoundarySet::new(interior)
}

/// Closed-form MAP boundaries `ρ(s_j − d/2)(1 + 1/(γK))`.
pub fn closed_form_boundaries(
    constellation: &AggregatedConstellation,
    rho: f64,
    noise_variance: f64,
) -> Result<BoundarySet> {
    check_link(rho, noise_variance)?;
    let factor = 1.0 + noise_variance / (rho * rho * constellation.devices() as f64);
    BoundarySet::new(
        (1..constellation.len())
            .map(|j| rho * constellation.midpoint(j) * factor)
            .collect(),
    )
}

fn check_link(rho: f64, noise_variance: f64) -> Result<()> {
    if !(rho > 0.0) {
        return Err(invalid(format!(
            "scaling factor must be positive, got {rho}"
        )));
    }
    if !(noise_variance >= 0.0) || !noise_variance.is_finite() {
        return Err(invalid(format!("invalid noise variance {noise_variance}")));
    }
    Ok(())
}

/// Lattice index detected for a real branch sample.
#[inline]
pub fn detect_pam(r: f64, boundaries: &BoundarySet) -> usize {
    boundaries.region(r)
}

/// Detects the aggregate QAM symbol by independent per-branch decisions.
pub fn detect_qam(
    r: ComplexSymbol,
    boundaries: &BoundarySet,
    constellation: &AggregatedConstellation,
) -> ComplexSymbol {
    let pts = constellation.points();
    Complex64::new(
        pts[detect_pam(r.re, boundaries)],
        pts[detect_pam(r.im, boundaries)],
    )
}

/// Per-slice detector: constellation, boundaries and the channel scaling.
#[derive(Debug, Clone)]
pub struct Detector {
    constellation: AggregatedConstellation,
    boundaries: BoundarySet,
    rho: f64,
}

impl Detector {
    pub fn new(
        grid: &PamGrid,
        devices: usize,
        rho: f64,
        noise_variance: f64,
        config: DetectorConfig,
    ) -> Result<Self> {
        let constellation = AggregatedConstellation::new(grid, devices, config.priors)?;
        let boundaries = match (config.kind, config.boundaries) {
            (DetectorKind::Ml, _) => ml_boundaries(&constellation, rho)?,
            (DetectorKind::Map, BoundaryMode::General) => {
                map_boundaries(&constellation, rho, noise_variance)?
            }
            (DetectorKind::Map, BoundaryMode::ClosedForm) => {
                closed_form_boundaries(&constellation, rho, noise_variance)?
            }
        };
        Ok(Self {
            constellation,
            boundaries,
            rho,
        })
    }

    pub fn from_parts(
        constellation: AggregatedConstellation,
        boundaries: BoundarySet,
        rho: f64,
    ) -> Result<Self> {
        if boundaries.regions() != constellation.len() {
            return Err(Error::LengthMismatch {
                expected: constellation.len(),
                got: boundaries.regions(),
            });
        }
        Ok(Self {
            constellation,
            boundaries,
            rho,
        })
    }

    pub fn constellation(&self) -> &AggregatedConstellation {
        &self.constellation
    }

    pub fn boundaries(&self) -> &BoundarySet {
        &self.boundaries
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    #[inline]
    pub fn detect_pam(&self, r: f64) -> usize {
        detect_pam(r, &self.boundaries)
    }

    /// Lattice indices detected on the I and Q branches.
    #[inline]
    pub fn detect_qam_indices(&self, r: ComplexSymbol) -> (usize, usize) {
        (self.detect_pam(r.re), self.detect_pam(r.im))
    }

    pub fn detect_qam(&self, r: ComplexSymbol) -> ComplexSymbol {
        detect_qam(r, &self.boundaries, &self.constellation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn enumerate_counts(p: u64, k: usize) -> Vec<u64> {
        let mut counts = vec![0u64; lattice_len(p, k)];
        let total = p.pow(k as u32);
        for mut code in 0..total {
            let mut s = 0;
            for _ in 0..k {
                s += code % p;
                code /= p;
            }
            counts[s as usize] += 1;
        }
        counts
    }

    #[test]
    fn exact_prior_examples() {
        assert_eq!(exact_priors(2, 2).unwrap(), vec![0.25, 0.5, 0.25]);
        let p = exact_priors(4, 2).unwrap();
        let expected = [1., 2., 3., 4., 3., 2., 1.].map(|v| v / 16.0);
        for (a, b) in p.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let p = exact_priors(2, 6).unwrap();
        let binom = [1., 6., 15., 20., 15., 6., 1.];
        for (a, b) in p.iter().zip(binom) {
            assert!((a - b / 64.0).abs() < 1e-15);
        }
        assert!(exact_priors(1, 2).is_err());
        assert!(exact_priors(2, 0).is_err());
    }

    #[test]
    fn exact_priors_match_polycoef_and_sum_to_one() {
        for p in 2..=8u64 {
            for k in 1..=6usize {
                let pr = exact_priors(p, k).unwrap();
                assert!((pr.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                let scale = (p as f64).powi(k as i32);
                for (j, v) in pr.iter().enumerate() {
                    let c = polycoef(j as u64, k as u64, p).unwrap() as f64;
                    assert!(
                        (v * scale - c).abs() < 1e-6 * c.max(1.0),
                        "P={p} K={k} j={j}"
                    );
                    assert_eq!(*v, pr[pr.len() - 1 - j]);
                }
            }
        }
    }

    #[test]
    fn polycoef_examples() {
        assert_eq!(polycoef(1, 2, 2).unwrap(), 2);
        for k in 1..6 {
            for m in 2..6 {
                assert_eq!(polycoef(0, k, m).unwrap(), 1);
            }
        }
        for k in 1..=4usize {
            for m in 2..=4u64 {
                let counts = enumerate_counts(m, k);
                for (n, &c) in counts.iter().enumerate() {
                    assert_eq!(polycoef(n as u64, k as u64, m).unwrap(), c as u128);
                }
                // beyond the lattice the count is zero
                assert_eq!(polycoef(counts.len() as u64, k as u64, m).unwrap(), 0);
            }
        }
        assert!(polycoef(1, 0, 2).is_err());
        assert!(polycoef(1, 2, 1).is_err());
    }

    #[test]
    fn normal_density_examples() {
        let d = normal_density(2, 2).unwrap();
        assert!((d[1] - 1.0 / (2.0 * std::f64::consts::PI * 0.5).sqrt()).abs() < 1e-12);
        assert!((d[1] - 0.5642).abs() < 1e-4);
        for (p, k) in [(2, 3), (4, 5), (8, 2)] {
            let n = normal_priors(p, k).unwrap();
            assert!((n.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for j in 0..n.len() {
                assert_eq!(n[j], n[n.len() - 1 - j]);
            }
        }
    }

    #[test]
    fn normal_approximation_improves_with_k() {
        let mut last = f64::INFINITY;
        for k in [4, 8, 16] {
            let e = exact_priors(4, k).unwrap();
            let n = normal_priors(4, k).unwrap();
            let dev = e
                .iter()
                .zip(&n)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(dev < last, "K={k}: {dev} !< {last}");
            last = dev;
        }
    }

    fn constellation(b: u32, k: usize, mode: PriorMode) -> AggregatedConstellation {
        AggregatedConstellation::new(&PamGrid::new(b).unwrap(), k, mode).unwrap()
    }

    #[test]
    fn constellation_geometry() {
        let c = constellation(2, 3, PriorMode::Exact);
        assert_eq!(c.len(), 10);
        let pts = c.points();
        for j in 0..pts.len() {
            assert!((pts[j] + pts[pts.len() - 1 - j]).abs() < 1e-12);
            if j > 0 {
                assert!((pts[j] - pts[j - 1] - c.spacing()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn uniform_priors_give_ml_boundaries_exactly() {
        let c = constellation(2, 4, PriorMode::Uniform);
        let map = map_boundaries(&c, 1.3, 0.4).unwrap();
        let ml = ml_boundaries(&c, 1.3).unwrap();
        assert_eq!(map.interior(), ml.interior());
    }

    #[test]
    fn closed_form_example() {
        let c = constellation(1, 5, PriorMode::Normal);
        assert!((c.points()[4] - 1.5 * 2f64.sqrt()).abs() < 1e-12);
        let ml = ml_boundaries(&c, 1.0).unwrap();
        let cf = closed_form_boundaries(&c, 1.0, 0.1).unwrap();
        assert!((ml.lower(4) - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!((cf.lower(4) - 1.44250).abs() < 1e-5);
        // the centre boundary stays at zero
        let cf5 = closed_form_boundaries(&c, 1.0, 0.3).unwrap();
        assert_eq!(cf5.lower(3), 0.0);
    }

    #[test]
    fn general_boundaries_with_normal_priors_match_closed_form() {
        for (b, k, snr) in [(1, 5, 10.0), (2, 7, 3.0), (3, 4, 40.0)] {
            let c = constellation(b, k, PriorMode::Normal);
            let g = map_boundaries(&c, 1.0, 1.0 / snr).unwrap();
            let f = closed_form_boundaries(&c, 1.0, 1.0 / snr).unwrap();
            let ml = ml_boundaries(&c, 1.0).unwrap();
            let factor = 1.0 + 1.0 / (snr * k as f64);
            for j in 0..g.interior().len() {
                assert!((g.interior()[j] - f.interior()[j]).abs() < 1e-9);
                let mid = ml.interior()[j];
                if mid.abs() > 1e-9 {
                    assert!((g.interior()[j] / mid - factor).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn map_offset_direction() {
        let c = constellation(1, 6, PriorMode::Exact);
        let map = map_boundaries(&c, 1.0, 1.0 / 2.5).unwrap();
        let ml = ml_boundaries(&c, 1.0).unwrap();
        let n = map.interior().len();
        for j in 0..n {
            let (a, b) = (map.interior()[j], ml.interior()[j]);
            if b < -1e-12 {
                assert!(a < b);
            } else if b > 1e-12 {
                assert!(a > b);
            } else {
                assert!(a.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn detect_limits_and_ties() {
        let c = constellation(2, 6, PriorMode::Exact);
        let bs = map_boundaries(&c, 1.0, 1e-4).unwrap();
        assert_eq!(detect_pam(f64::NEG_INFINITY, &bs), 0);
        assert_eq!(detect_pam(-1e9, &bs), 0);
        assert_eq!(detect_pam(1e9, &bs), c.len() - 1);
        for (j, &s) in c.points().iter().enumerate() {
            assert_eq!(detect_pam(s, &bs), j);
        }
        let tie = bs.interior()[3];
        assert_eq!(detect_pam(tie, &bs), 3);
    }

    fn argmax_oracle(r: f64, c: &AggregatedConstellation, rho: f64, var: f64) -> usize {
        // per-branch likelihood ∝ exp(−(r − ρs)²/σ_z²)
        let mut best = (f64::NEG_INFINITY, 0);
        for (j, (&s, &p)) in c.points().iter().zip(c.priors()).enumerate() {
            let score = p.ln() - (r - rho * s).powi(2) / var;
            if score > best.0 {
                best = (score, j);
            }
        }
        best.1
    }

    #[test]
    fn detect_pam_matches_argmax() {
        let c = constellation(2, 6, PriorMode::Exact);
        let (rho, var) = (1.0, 0.2);
        let bs = map_boundaries(&c, rho, var).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let extent = c.points()[c.len() - 1] + 1.0;
        for _ in 0..100_000 {
            let r = rng.random_range(-extent..extent);
            assert_eq!(detect_pam(r, &bs), argmax_oracle(r, &c, rho, var));
        }
    }

    #[test]
    fn detect_qam_matches_joint_argmax() {
        let c = constellation(1, 4, PriorMode::Exact);
        let (rho, var) = (1.0, 0.5);
        let det =
            Detector::from_parts(c.clone(), map_boundaries(&c, rho, var).unwrap(), rho).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let pts = c.points();
        for _ in 0..10_000 {
            let r = Complex64::new(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
            let mut best = (f64::NEG_INFINITY, Complex64::new(0.0, 0.0));
            for (i, &si) in pts.iter().enumerate() {
                for (q, &sq) in pts.iter().enumerate() {
                    let s = Complex64::new(si, sq);
                    let score =
                        (c.priors()[i] * c.priors()[q]).ln() - (r - s * rho).norm_sqr() / var;
                    if score > best.0 {
                        best = (score, s);
                    }
                }
            }
            assert_eq!(det.detect_qam(r), best.1);
            assert_eq!(det.detect_qam(r.conj()), det.detect_qam(r).conj());
        }
    }

    #[test]
    fn detect_qam_noiseless_identity() {
        for b in 1..=2 {
            for k in 1..=4 {
                let grid = PamGrid::new(b).unwrap();
                let det = Detector::new(&grid, k, 1.0, 0.1, DetectorConfig::default()).unwrap();
                let pts = det.constellation().points().to_vec();
                for &a in &pts {
                    for &q in &pts {
                        let s = Complex64::new(a, q);
                        assert_eq!(det.detect_qam(s), s);
                    }
                }
            }
        }
    }

    #[test]
    fn zero_prior_rejected() {
        // huge lattice: exact tails underflow
        let c = AggregatedConstellation::with_spacing(64, 400, 0.1, PriorMode::Exact).unwrap();
        assert!(matches!(
            map_boundaries(&c, 1.0, 0.1),
            Err(Error::ZeroPrior(_))
        ));
        // the Normal priors are handled in log space
        let c = AggregatedConstellation::with_spacing(64, 400, 0.1, PriorMode::Normal).unwrap();
        assert!(map_boundaries(&c, 1.0, 0.1).is_ok());
    }
}

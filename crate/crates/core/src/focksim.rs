//! Exact truncated-Fock-space model of the interference experiment.
//!
//! Four modes take part: two spatial ports, `a` (heralded signal) and `b`
//! (local oscillator), each split into a spectral mode `m` matched to the
//! signal and an orthogonal mode `o`. The LO coherent state `|√μ⟩` in
//! spectral mode `u` decomposes exactly as `|ζ√μ⟩_bm ⊗ |√((1−|ζ|²)μ)⟩_bo`,
//! which reduces the continuum problem to these four modes.
//!
//! The splitter acts identically on the `(am, bm)` and `(ao, bo)` pairs with
//! `a† → t c† + r d†`, `b† → −r c† + t d†`. After it, port `a` labels the
//! output seen by detector D1 and port `b` the one seen by D2.
//!
//! Pair statistics: the heralded signal follows the selected
//! [`PairStatistics`]; the unheralded signal is always thermal with mean `p`,
//! as the reduced state of one arm of a single-mode two-mode squeezed vacuum.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by std inherent methods whenever std is in the graph
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::hom::HomParams;
use crate::units::{delay_to_path_length, MICROMETER};
use crate::{Error, Result};

/// Photon-number cutoff per input mode used whenever the leakage guard allows it.
pub const DEFAULT_CUTOFF: usize = 4;
/// Largest cutoff the automatic selection will try.
pub const MAX_CUTOFF: usize = 16;
/// Maximum probability mass that may be lost to truncation.
pub const LEAKAGE_LIMIT: f64 = 1e-6;
/// Upper bound on the pair probability per pulse.
pub const MAX_PAIR_PROBABILITY: f64 = 0.2;

/// Mode order inside an occupation tuple.
pub const AM: usize = 0;
pub const AO: usize = 1;
pub const BM: usize = 2;
pub const BO: usize = 3;

fn pair_index(a: usize, b: usize) -> usize {
    let t = a + b;
    t * (t + 1) / 2 + a
}

fn pair_occupation(index: usize) -> (usize, usize) {
    // invert t(t+1)/2 <= index
    let mut t = 0;
    while (t + 1) * (t + 2) / 2 <= index {
        t += 1;
    }
    let a = index - t * (t + 1) / 2;
    (a, t - a)
}

/// Dense pure state over `(n_am, n_ao, n_bm, n_bo)`.
///
/// Inputs hold at most `n_max` photons per mode. Storage covers every tuple
/// with `n_am + n_bm ≤ 2·n_max` and `n_ao + n_bo ≤ 2·n_max`, a set closed
/// under the beam splitter, so no amplitude is lost when it is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    n_max: usize,
    pair_dim: usize,
    amplitudes: Vec<Complex64>,
}

impl FockState {
    pub fn vacuum(n_max: usize) -> Self {
        let cap = 2 * n_max;
        let pair_dim = (cap + 1) * (cap + 2) / 2;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); pair_dim * pair_dim];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self {
            n_max,
            pair_dim,
            amplitudes,
        }
    }

    /// Product state from per-mode amplitude vectors in `(am, ao, bm, bo)`
    /// order. Each vector is indexed by photon number and may hold at most
    /// `n_max + 1` entries.
    pub fn product(n_max: usize, modes: [&[Complex64]; 4]) -> Result<Self> {
        if modes.iter().any(|m| m.len() > n_max + 1 || m.is_empty()) {
            return Err(Error::InvalidParameter(alloc::format!(
                "mode amplitude vectors must hold 1..={} entries",
                n_max + 1
            )));
        }
        let mut state = Self::vacuum(n_max);
        state.amplitudes[0] = Complex64::new(0.0, 0.0);
        for (am, x_am) in modes[AM].iter().enumerate() {
            for (bm, x_bm) in modes[BM].iter().enumerate() {
                let pm = pair_index(am, bm);
                for (ao, x_ao) in modes[AO].iter().enumerate() {
                    for (bo, x_bo) in modes[BO].iter().enumerate() {
                        let po = pair_index(ao, bo);
                        state.amplitudes[pm * state.pair_dim + po] = x_am * x_bm * x_ao * x_bo;
                    }
                }
            }
        }
        Ok(state)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Largest photon number a single mode can hold.
    pub fn capacity(&self) -> usize {
        2 * self.n_max
    }

    fn index(&self, occ: [usize; 4]) -> Option<usize> {
        let cap = self.capacity();
        if occ[AM] + occ[BM] > cap || occ[AO] + occ[BO] > cap {
            return None;
        }
        Some(pair_index(occ[AM], occ[BM]) * self.pair_dim + pair_index(occ[AO], occ[BO]))
    }

    /// Amplitude of an occupation tuple (zero outside the stored set).
    pub fn amplitude(&self, occ: [usize; 4]) -> Complex64 {
        self.index(occ)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    pub fn set_amplitude(&mut self, occ: [usize; 4], value: Complex64) -> Result<()> {
        let i = self.index(occ).ok_or_else(|| {
            Error::InvalidParameter(alloc::format!("occupation {occ:?} exceeds the stored space"))
        })?;
        self.amplitudes[i] = value;
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Non-zero amplitudes with their occupation tuples.
    pub fn iter(&self) -> impl Iterator<Item = ([usize; 4], Complex64)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm_sqr() > 0.0)
            .map(move |(i, z)| {
                let (am, bm) = pair_occupation(i / self.pair_dim);
                let (ao, bo) = pair_occupation(i % self.pair_dim);
                ([am, ao, bm, bo], *z)
            })
    }

    /// Joint distribution of total photon numbers in port `a` and port `b`,
    /// indexed `[n_a * (2·cap + 1) + n_b]`.
    pub fn port_number_distribution(&self) -> PortDistribution {
        let side = 2 * self.capacity() + 1;
        let mut probabilities = vec![0.0; side * side];
        for pm in 0..self.pair_dim {
            let (am, bm) = pair_occupation(pm);
            for po in 0..self.pair_dim {
                let p = self.amplitudes[pm * self.pair_dim + po].norm_sqr();
                if p > 0.0 {
                    let (ao, bo) = pair_occupation(po);
                    probabilities[(am + ao) * side + bm + bo] += p;
                }
            }
        }
        PortDistribution { side, probabilities }
    }
}

/// Photon-number distribution over the two output ports.
#[derive(Debug, Clone, PartialEq)]
pub struct PortDistribution {
    side: usize,
    probabilities: Vec<f64>,
}

impl PortDistribution {
    pub fn get(&self, n_a: usize, n_b: usize) -> f64 {
        if n_a < self.side && n_b < self.side {
            self.probabilities[n_a * self.side + n_b]
        } else {
            0.0
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(move |(i, p)| (i / self.side, i % self.side, *p))
    }
}

/// Real unitary blocks `⟨k, t−k| U |j, t−j⟩` of the splitter, one per total
/// photon number `t ≤ cap`, stored row-major.
fn splitter_blocks(cap: usize, transmittance: f64) -> Vec<Vec<f64>> {
    let t_amp = transmittance.sqrt();
    let r_amp = (1.0 - transmittance).sqrt();
    let mut fact = vec![1.0f64; cap + 1];
    for n in 1..=cap {
        fact[n] = fact[n - 1] * n as f64;
    }
    let binom = |n: usize, k: usize| fact[n] / (fact[k] * fact[n - k]);
    (0..=cap)
        .map(|t| {
            let mut u = vec![0.0; (t + 1) * (t + 1)];
            for j in 0..=t {
                // expand (t c† + r d†)^j (−r c† + t d†)^(t−j)
                for p in 0..=j {
                    for q in 0..=t - j {
                        let k = p + q;
                        let coef = binom(j, p)
                            * t_amp.powi(p as i32)
                            * r_amp.powi((j - p) as i32)
                            * binom(t - j, q)
                            * (-r_amp).powi(q as i32)
                            * t_amp.powi((t - j - q) as i32);
                        u[k * (t + 1) + j] += coef;
                    }
                }
                for k in 0..=t {
                    u[k * (t + 1) + j] *= (fact[k] * fact[t - k] / (fact[j] * fact[t - j])).sqrt();
                }
            }
            u
        })
        .collect()
}

/// Applies the two-port splitter with power transmittance `T` to both
/// spectral mode pairs.
pub fn beam_splitter(state: &FockState, transmittance: f64) -> Result<FockState> {
    if !(0.0..=1.0).contains(&transmittance) {
        return Err(Error::InvalidParameter(alloc::format!(
            "transmittance must lie in [0, 1], got {transmittance}"
        )));
    }
    let cap = state.capacity();
    let blocks = splitter_blocks(cap, transmittance);
    let d = state.pair_dim;
    let zero = Complex64::new(0.0, 0.0);

    // matched pair: the outer index, contiguous blocks of size t+1 per sector
    let mut mid = vec![zero; state.amplitudes.len()];
    for po in 0..d {
        for (t, u) in blocks.iter().enumerate() {
            let base = t * (t + 1) / 2;
            for k in 0..=t {
                let mut acc = zero;
                for j in 0..=t {
                    acc += state.amplitudes[(base + j) * d + po] * u[k * (t + 1) + j];
                }
                mid[(base + k) * d + po] = acc;
            }
        }
    }
    // orthogonal pair: the inner index
    let mut out = vec![zero; mid.len()];
    for pm in 0..d {
        let row = &mid[pm * d..(pm + 1) * d];
        for (t, u) in blocks.iter().enumerate() {
            let base = t * (t + 1) / 2;
            for k in 0..=t {
                let mut acc = zero;
                for j in 0..=t {
                    acc += row[base + j] * u[k * (t + 1) + j];
                }
                out[pm * d + base + k] = acc;
            }
        }
    }
    Ok(FockState {
        n_max: state.n_max,
        pair_dim: d,
        amplitudes: out,
    })
}

/// Threshold detector: `P(click | n) = 1 − (1−η)^n (1−p_d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    efficiency: f64,
    dark_probability: f64,
}

impl DetectorModel {
    pub fn new(efficiency: f64, dark_probability: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&efficiency) {
            return Err(Error::InvalidParameter(alloc::format!(
                "detector efficiency must lie in [0, 1], got {efficiency}"
            )));
        }
        if !(0.0..1.0).contains(&dark_probability) {
            return Err(Error::InvalidParameter(alloc::format!(
                "dark-click probability must lie in [0, 1), got {dark_probability}"
            )));
        }
        Ok(Self {
            efficiency,
            dark_probability,
        })
    }

    pub const fn ideal() -> Self {
        Self {
            efficiency: 1.0,
            dark_probability: 0.0,
        }
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }

    pub fn dark_probability(&self) -> f64 {
        self.dark_probability
    }

    pub fn no_click_probability(&self, photons: usize) -> f64 {
        (1.0 - self.efficiency).powi(photons as i32) * (1.0 - self.dark_probability)
    }

    pub fn click_probability(&self, photons: usize) -> f64 {
        1.0 - self.no_click_probability(photons)
    }

    /// The same detector behind an extra transmission `eta`.
    pub fn with_extra_loss(&self, eta: f64) -> Result<Self> {
        Self::new(self.efficiency * eta, self.dark_probability)
    }
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self::ideal()
    }
}

/// Photon-pair number distribution per pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairStatistics {
    /// At most one pair: `P(1) = p`, `P(0) = 1 − p`.
    SinglePair,
    /// Single-mode thermal with mean `p`.
    Thermal,
}

impl PairStatistics {
    /// `P(n)` for a mean (or single-pair) probability `p`.
    pub fn probability(self, p: f64, n: usize) -> f64 {
        match self {
            PairStatistics::SinglePair => match n {
                0 => 1.0 - p,
                1 => p,
                _ => 0.0,
            },
            PairStatistics::Thermal => (p / (1.0 + p)).powi(n as i32) / (1.0 + p),
        }
    }

    /// `P(n > cutoff)`.
    pub fn tail(self, p: f64, cutoff: usize) -> f64 {
        match self {
            PairStatistics::SinglePair => 0.0,
            PairStatistics::Thermal => (p / (1.0 + p)).powi(cutoff as i32 + 1),
        }
    }
}

fn poisson_tail(mean: f64, cutoff: usize) -> f64 {
    let mut term = (-mean).exp();
    let mut kept = term;
    for n in 1..=cutoff {
        term *= mean / n as f64;
        kept += term;
    }
    // summing the tail directly avoids cancellation in 1 − kept
    let mut tail = 0.0;
    let mut t = term;
    for n in cutoff + 1..cutoff + 200 {
        t *= mean / n as f64;
        tail += t;
        if t < tail * 1e-17 {
            break;
        }
    }
    if mean > 1.0 {
        (1.0 - kept).max(tail)
    } else {
        tail
    }
}

/// Coherent-state amplitudes `e^{−|α|²/2} αⁿ/√n!` for `n ≤ cutoff`.
fn coherent_amplitudes(alpha: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(cutoff + 1);
    let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    out.push(c);
    for n in 1..=cutoff {
        c = c * alpha / (n as f64).sqrt();
        out.push(c);
    }
    out
}

/// Source and LO parameters for one delay setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceConfig {
    pair_probability: f64,
    statistics: PairStatistics,
    herald_arm_efficiency: f64,
    lo_mean_photons: f64,
    overlap: Complex64,
    cutoff: Option<usize>,
}

impl SourceConfig {
    /// Overlap starts at `ζ = 1`; the cutoff is chosen automatically.
    pub fn new(
        pair_probability: f64,
        statistics: PairStatistics,
        herald_arm_efficiency: f64,
        lo_mean_photons: f64,
    ) -> Result<Self> {
        if !(0.0..=MAX_PAIR_PROBABILITY).contains(&pair_probability) {
            return Err(Error::InvalidParameter(alloc::format!(
                "pair probability must lie in [0, {MAX_PAIR_PROBABILITY}], got {pair_probability}"
            )));
        }
        if !(0.0..=1.0).contains(&herald_arm_efficiency) {
            return Err(Error::InvalidParameter(alloc::format!(
                "heralding-arm efficiency must lie in [0, 1], got {herald_arm_efficiency}"
            )));
        }
        if !(lo_mean_photons >= 0.0) || !lo_mean_photons.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "LO mean photon number must be finite and non-negative, got {lo_mean_photons}"
            )));
        }
        Ok(Self {
            pair_probability,
            statistics,
            herald_arm_efficiency,
            lo_mean_photons,
            overlap: Complex64::new(1.0, 0.0),
            cutoff: None,
        })
    }

    pub fn with_overlap(mut self, overlap: Complex64) -> Result<Self> {
        if !(overlap.norm_sqr() <= 1.0 + 1e-12) {
            return Err(Error::InvalidParameter(alloc::format!(
                "overlap must lie in the unit disc, got {overlap}"
            )));
        }
        self.overlap = overlap;
        Ok(self)
    }

    /// Pins the per-mode cutoff instead of choosing it from the leakage guard.
    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn pair_probability(&self) -> f64 {
        self.pair_probability
    }

    pub fn statistics(&self) -> PairStatistics {
        self.statistics
    }

    pub fn herald_arm_efficiency(&self) -> f64 {
        self.herald_arm_efficiency
    }

    pub fn lo_mean_photons(&self) -> f64 {
        self.lo_mean_photons
    }

    pub fn overlap(&self) -> Complex64 {
        self.overlap
    }

    /// Leakage bound for a cutoff, valid for every overlap: the thermal tail
    /// plus the tail of the undivided LO, which dominates the product of the
    /// two split tails.
    fn leakage_bound(&self, cutoff: usize) -> f64 {
        PairStatistics::Thermal.tail(self.pair_probability, cutoff)
            + poisson_tail(self.lo_mean_photons, cutoff)
    }

    /// The pinned cutoff, or the smallest one `≥ DEFAULT_CUTOFF` whose
    /// leakage stays under [`LEAKAGE_LIMIT`].
    pub fn cutoff(&self) -> Result<usize> {
        if let Some(c) = self.cutoff {
            return Ok(c);
        }
        (DEFAULT_CUTOFF..=MAX_CUTOFF)
            .find(|&c| self.leakage_bound(c) < LEAKAGE_LIMIT)
            .ok_or(Error::TruncationLeakage {
                leakage: self.leakage_bound(MAX_CUTOFF),
                limit: LEAKAGE_LIMIT,
                cutoff: MAX_CUTOFF,
            })
    }
}

/// `ζ(τ)` with `|ζ|² = [2σ_sσ_L/(σ_s²+σ_L²)]·exp[−(σ_s²σ_L²τ² + 4δ²)/(2(σ_s²+σ_L²))]`
/// and zero phase.
pub fn mode_overlap(params: &HomParams, delay: f64) -> Complex64 {
    let x = params.ratio();
    let z = 2.0 * x / (1.0 + x * x) * params.dip_envelope(delay);
    Complex64::new(z.min(1.0).sqrt(), 0.0)
}

/// Overlap `∫ f_s*(ω) f_L(ω) e^{iωτ} dω` of two sampled spectral amplitudes on
/// a common uniform frequency axis, after normalizing each. For spectra that
/// are not Gaussian.
pub fn overlap_integral(omega: &[f64], signal: &[Complex64], lo: &[Complex64], delay: f64) -> Result<Complex64> {
    if omega.len() != signal.len() || omega.len() != lo.len() || omega.is_empty() {
        return Err(Error::InvalidParameter(
            "overlap samples must share one non-empty axis".into(),
        ));
    }
    let ns: f64 = signal.iter().map(|z| z.norm_sqr()).sum();
    let nl: f64 = lo.iter().map(|z| z.norm_sqr()).sum();
    if !(ns > 0.0 && nl > 0.0) {
        return Err(Error::InvalidParameter("overlap of an empty spectrum".into()));
    }
    let w0 = omega[0];
    let sum: Complex64 = omega
        .iter()
        .zip(signal.iter().zip(lo))
        .map(|(w, (s, l))| s.conj() * l * Complex64::from_polar(1.0, (w - w0) * delay))
        .sum();
    Ok(sum / (ns * nl).sqrt())
}

/// One term of the input mixture: weight, photons sent to the herald arm,
/// and the pure four-mode state entering the splitter.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub idler_photons: usize,
    pub state: FockState,
}

/// Builds the input mixture: `n` signal photons in mode `am` (and `n` idler
/// photons) with the pair weight, times the split LO. The heralded case uses
/// the configured statistics, the unheralded case thermal statistics.
pub fn prepare_input(source: &SourceConfig, heralded: bool) -> Result<Vec<MixtureComponent>> {
    let cutoff = source.cutoff()?;
    let stats = if heralded {
        source.statistics
    } else {
        PairStatistics::Thermal
    };
    let p = source.pair_probability;
    let mu = source.lo_mean_photons;
    let zeta = source.overlap;
    let z = zeta.norm_sqr().min(1.0);
    let alpha_m = zeta * mu.sqrt();
    let alpha_o = Complex64::new(((1.0 - z) * mu).sqrt(), 0.0);

    let pair_tail = stats.tail(p, cutoff);
    let keep_m = 1.0 - poisson_tail(alpha_m.norm_sqr(), cutoff);
    let keep_o = 1.0 - poisson_tail(alpha_o.norm_sqr(), cutoff);
    let leakage = 1.0 - (1.0 - pair_tail) * keep_m * keep_o;
    if leakage > LEAKAGE_LIMIT {
        return Err(Error::TruncationLeakage {
            leakage,
            limit: LEAKAGE_LIMIT,
            cutoff,
        });
    }

    let renorm = |v: Vec<Complex64>| {
        let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|c| c / n).collect::<Vec<_>>()
    };
    let bm = renorm(coherent_amplitudes(alpha_m, cutoff));
    let bo = renorm(coherent_amplitudes(alpha_o, cutoff));
    let vac = [Complex64::new(1.0, 0.0)];

    let weights: Vec<f64> = (0..=cutoff).map(|n| stats.probability(p, n)).collect();
    let total: f64 = weights.iter().sum();
    let mut out = Vec::new();
    for (n, w) in weights.into_iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        let mut am = vec![Complex64::new(0.0, 0.0); n + 1];
        am[n] = Complex64::new(1.0, 0.0);
        out.push(MixtureComponent {
            weight: w / total,
            idler_photons: n,
            state: FockState::product(cutoff, [&am, &vac, &bm, &bo])?,
        });
    }
    Ok(out)
}

/// Probabilities of the eight click patterns over (herald, D1, D2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternProbabilities([f64; 8]);

impl PatternProbabilities {
    pub fn index(herald: bool, d1: bool, d2: bool) -> usize {
        (herald as usize) << 2 | (d1 as usize) << 1 | d2 as usize
    }

    pub fn get(&self, herald: bool, d1: bool, d2: bool) -> f64 {
        self.0[Self::index(herald, d1, d2)]
    }

    pub fn as_array(&self) -> &[f64; 8] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Herald ∧ D1 ∧ D2.
    pub fn threefold(&self) -> f64 {
        self.get(true, true, true)
    }

    /// D1 ∧ D2, herald ignored.
    pub fn twofold(&self) -> f64 {
        self.get(false, true, true) + self.get(true, true, true)
    }

    /// Swaps the roles of D1 and D2.
    pub fn swapped(&self) -> Self {
        let mut out = [0.0; 8];
        for h in [false, true] {
            for a in [false, true] {
                for b in [false, true] {
                    out[Self::index(h, b, a)] = self.get(h, a, b);
                }
            }
        }
        Self(out)
    }
}

/// Exact pattern probabilities of a mixture of post-splitter states.
pub fn click_probabilities(
    mixture: &[MixtureComponent],
    d1: &DetectorModel,
    d2: &DetectorModel,
    herald: &DetectorModel,
) -> PatternProbabilities {
    let mut out = [0.0; 8];
    for c in mixture {
        let h_off = herald.no_click_probability(c.idler_photons);
        for (n1, n2, p) in c.state.port_number_distribution().iter() {
            let a_off = d1.no_click_probability(n1);
            let b_off = d2.no_click_probability(n2);
            for h in [false, true] {
                let ph = if h { 1.0 - h_off } else { h_off };
                for a in [false, true] {
                    let pa = if a { 1.0 - a_off } else { a_off };
                    for b in [false, true] {
                        let pb = if b { 1.0 - b_off } else { b_off };
                        out[PatternProbabilities::index(h, a, b)] += c.weight * p * ph * pa * pb;
                    }
                }
            }
        }
    }
    PatternProbabilities(out)
}

/// Full experiment: source, spectral overlap model, splitter and detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Experiment {
    pub source: SourceConfig,
    pub hom: HomParams,
    pub transmittance: f64,
    pub d1: DetectorModel,
    pub d2: DetectorModel,
    pub herald: DetectorModel,
}

impl Experiment {
    /// 50:50 splitter and ideal detectors.
    pub fn new(source: SourceConfig, hom: HomParams) -> Self {
        Self {
            source,
            hom,
            transmittance: 0.5,
            d1: DetectorModel::ideal(),
            d2: DetectorModel::ideal(),
            herald: DetectorModel::ideal(),
        }
    }

    pub fn with_detectors(mut self, d1: DetectorModel, d2: DetectorModel, herald: DetectorModel) -> Self {
        self.d1 = d1;
        self.d2 = d2;
        self.herald = herald;
        self
    }

    /// Pattern probabilities for a given overlap amplitude.
    pub fn patterns_at_overlap(&self, overlap: Complex64, heralded: bool) -> Result<PatternProbabilities> {
        let source = self.source.with_overlap(overlap)?;
        let mixture = prepare_input(&source, heralded)?
            .into_iter()
            .map(|c| {
                Ok(MixtureComponent {
                    state: beam_splitter(&c.state, self.transmittance)?,
                    ..c
                })
            })
            .collect::<Result<Vec<_>>>()?;
        // losses in the idler arm act like a less efficient herald detector
        let herald = self.herald.with_extra_loss(self.source.herald_arm_efficiency)?;
        Ok(click_probabilities(&mixture, &self.d1, &self.d2, &herald))
    }

    pub fn patterns(&self, delay: f64, heralded: bool) -> Result<PatternProbabilities> {
        self.patterns_at_overlap(mode_overlap(&self.hom, delay), heralded)
    }
}

/// `P3(τ) = P(herald ∧ D1 ∧ D2)`.
pub fn threefold_probability(exp: &Experiment, delay: f64) -> Result<f64> {
    Ok(exp.patterns(delay, true)?.threefold())
}

/// `P2(τ) = P(D1 ∧ D2)` with a thermal signal arm and no heralding.
pub fn twofold_probability(exp: &Experiment, delay: f64) -> Result<f64> {
    Ok(exp.patterns(delay, false)?.twofold())
}

/// `1 − P3(0)/P3(∞)`, where `τ → ∞` means zero overlap.
pub fn threefold_visibility(exp: &Experiment) -> Result<f64> {
    let dip = threefold_probability(exp, 0.0)?;
    let far = exp.patterns_at_overlap(Complex64::new(0.0, 0.0), true)?.threefold();
    Ok(1.0 - dip / far)
}

/// `1 − P2(0)/P2(∞)` for the unheralded two-fold coincidences.
pub fn twofold_visibility(exp: &Experiment) -> Result<f64> {
    let dip = twofold_probability(exp, 0.0)?;
    let far = exp.patterns_at_overlap(Complex64::new(0.0, 0.0), false)?.twofold();
    Ok(1.0 - dip / far)
}

/// Counts at one delay setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountPoint {
    pub pulses: u64,
    pub singles_i: u64,
    pub singles_d1: u64,
    pub singles_d2: u64,
    pub doubles_d1d2: u64,
    pub triples: u64,
}

impl CountPoint {
    fn from_patterns(counts: &[u64; 8]) -> Self {
        let sum = |f: &dyn Fn(bool, bool, bool) -> bool| -> u64 {
            (0..8)
                .filter(|&i| f(i & 4 != 0, i & 2 != 0, i & 1 != 0))
                .map(|i| counts[i])
                .sum()
        };
        Self {
            pulses: counts.iter().sum(),
            singles_i: sum(&|h, _, _| h),
            singles_d1: sum(&|_, a, _| a),
            singles_d2: sum(&|_, _, b| b),
            doubles_d1d2: sum(&|_, a, b| a && b),
            triples: counts[7],
        }
    }

    /// Three-fold ≤ two-fold ≤ singles ≤ pulses.
    pub fn is_consistent(&self) -> bool {
        self.triples <= self.doubles_d1d2
            && self.triples <= self.singles_i
            && self.doubles_d1d2 <= self.singles_d1.min(self.singles_d2)
            && self.singles_i.max(self.singles_d1).max(self.singles_d2) <= self.pulses
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountRecord {
    pub seed: u64,
    pub delays: Vec<f64>,
    pub points: Vec<CountPoint>,
}

impl CountRecord {
    pub fn path_lengths_um(&self) -> impl Iterator<Item = f64> + '_ {
        self.delays.iter().map(|t| delay_to_path_length(*t) / MICROMETER)
    }
}

/// The RNG stream owned by delay point `index`.
pub fn point_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Multinomial draw of `pulses` pattern outcomes, as a chain of binomials.
pub fn sample_patterns(probs: &PatternProbabilities, pulses: u64, rng: &mut ChaCha8Rng) -> [u64; 8] {
    let mut counts = [0u64; 8];
    let mut left = pulses;
    let mut mass = 1.0;
    for (i, p) in probs.as_array().iter().enumerate() {
        if left == 0 {
            break;
        }
        if i == 7 {
            counts[i] = left;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 1.0 };
        let k = Binomial::new(left, q)
            .expect("binomial parameters are clamped")
            .sample(rng);
        counts[i] = k;
        left -= k;
        mass -= p;
    }
    counts
}

/// Simulates delay point `index` of a scan. The heralded mixture (configured
/// statistics) feeds every pattern, so doubles here follow the source's own
/// statistics rather than the thermal model of [`twofold_probability`].
pub fn simulate_point(exp: &Experiment, delay: f64, index: usize, pulses: u64, seed: u64) -> Result<CountPoint> {
    if pulses == 0 {
        return Ok(CountPoint::from_patterns(&[0; 8]));
    }
    let probs = exp.patterns(delay, true)?;
    let mut rng = point_rng(seed, index);
    Ok(CountPoint::from_patterns(&sample_patterns(&probs, pulses, &mut rng)))
}

/// Sequential Monte Carlo over a delay scan.
pub fn simulate_counts(exp: &Experiment, delays: &[f64], pulses: u64, seed: u64) -> Result<CountRecord> {
    let points = delays
        .iter()
        .enumerate()
        .map(|(i, t)| simulate_point(exp, *t, i, pulses, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(CountRecord {
        seed,
        delays: delays.to_vec(),
        points,
    })
}

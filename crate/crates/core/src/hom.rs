//! Closed-form three-fold coincidence probability for a pure heralded photon
//! meeting a pure weak coherent pulse on a 50:50 splitter:
//!
//! ```text
//! P(τ) = 1/2 − σ_sσ_L/(σ_s² + σ_L²) · exp[−(σ_s²σ_L²τ² + 4δ²) / (2(σ_s² + σ_L²))]
//! ```
//!
//! and the visibility law `V = 2x/(1 + x²) = sech(ln x)` with `x = σ_s/σ_L`.
//!
//! The formula does not fix what the bandwidths `σ` are. They are taken to be
//! the intensity FWHM in angular frequency ([`HOM_BANDWIDTH_CONVENTION`]); that
//! reading turns 9.3 nm / 7.1 nm spectra into a 45.7 µm dip, against ~108 µm
//! for the standard-deviation reading. The visibility only depends on the ratio.

use alloc::vec::Vec;


#[allow(unused_imports)] // shadowed by std inherent methods whenever std is in the graph
use num_traits::Float;

use crate::units::{delay_to_path_length, fwhm_per_sigma, MICROMETER};
use crate::{Error, GaussianSpectrum, Result};

/// How a [`GaussianSpectrum`] is turned into the `σ` of the coincidence formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandwidthConvention {
    /// FWHM of the intensity spectrum in rad/s.
    IntensityFwhm,
    /// Standard deviation of the intensity spectrum in rad/s.
    IntensitySigma,
}

impl BandwidthConvention {
    pub fn bandwidth(self, spectrum: &GaussianSpectrum) -> f64 {
        match self {
            BandwidthConvention::IntensityFwhm => spectrum.fwhm_angular_frequency(),
            BandwidthConvention::IntensitySigma => spectrum.sigma_angular_frequency(),
        }
    }
}

pub const HOM_BANDWIDTH_CONVENTION: BandwidthConvention = BandwidthConvention::IntensityFwhm;

/// Signal and LO bandwidths (rad/s) and their centre-frequency offset
/// `δ = ω_s − ω_L` (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomParams {
    sigma_s: f64,
    sigma_l: f64,
    delta: f64,
}

impl HomParams {
    pub fn new(sigma_s: f64, sigma_l: f64, delta: f64) -> Result<Self> {
        if !(sigma_s > 0.0) || !(sigma_l > 0.0) || !sigma_s.is_finite() || !sigma_l.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "HOM bandwidths must be positive, got σ_s = {sigma_s}, σ_L = {sigma_l}"
            )));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParameter("detuning must be finite".into()));
        }
        Ok(Self {
            sigma_s,
            sigma_l,
            delta,
        })
    }

    /// Parameters from two spectra under [`HOM_BANDWIDTH_CONVENTION`].
    pub fn from_spectra(signal: &GaussianSpectrum, lo: &GaussianSpectrum) -> Result<Self> {
        Self::from_spectra_with(signal, lo, HOM_BANDWIDTH_CONVENTION)
    }

    pub fn from_spectra_with(
        signal: &GaussianSpectrum,
        lo: &GaussianSpectrum,
        convention: BandwidthConvention,
    ) -> Result<Self> {
        Self::new(
            convention.bandwidth(signal),
            convention.bandwidth(lo),
            signal.center_angular_frequency() - lo.center_angular_frequency(),
        )
    }

    pub fn sigma_s(&self) -> f64 {
        self.sigma_s
    }

    pub fn sigma_l(&self) -> f64 {
        self.sigma_l
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Bandwidth ratio `x = σ_s/σ_L`.
    pub fn ratio(&self) -> f64 {
        self.sigma_s / self.sigma_l
    }

    /// `σ_sσ_L/(σ_s² + σ_L²)`, at most 1/2.
    fn prefactor(&self) -> f64 {
        let x = self.ratio();
        x / (1.0 + x * x)
    }

    /// The Gaussian factor `exp[−(σ_s²σ_L²τ² + 4δ²)/(2(σ_s² + σ_L²))]`.
    pub(crate) fn dip_envelope(&self, delay: f64) -> f64 {
        let (s, l) = (self.sigma_s, self.sigma_l);
        let sum = s * s + l * l;
        // σ_s²σ_L²/(σ_s²+σ_L²) without squaring the rad/s-scale product
        let reduced = s * s * (l / sum.sqrt()) * (l / sum.sqrt());
        (-(reduced * delay * delay + 4.0 * self.delta * self.delta / sum) / 2.0).exp()
    }
}

/// `P(τ)` of the closed-form three-fold coincidence curve.
pub fn coincidence_probability(delay: f64, p: &HomParams) -> f64 {
    0.5 - p.prefactor() * p.dip_envelope(delay)
}

/// `V = 2x/(1 + x²)` with `x = σ_s/σ_L`; zero-detuning visibility.
pub fn visibility(sigma_s: f64, sigma_l: f64) -> f64 {
    let x = sigma_s / sigma_l;
    2.0 * x / (1.0 + x * x)
}

/// Zero-detuning visibility from the measured spectra. Only the width ratio
/// enters, so the result does not depend on the bandwidth convention.
pub fn expected_visibility_from_spectra(signal: &GaussianSpectrum, lo: &GaussianSpectrum) -> f64 {
    visibility(
        HOM_BANDWIDTH_CONVENTION.bandwidth(signal),
        HOM_BANDWIDTH_CONVENTION.bandwidth(lo),
    )
}

/// Dip FWHM as delay (s) and optical path length (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipWidth {
    pub delay: f64,
    pub path_length: f64,
}

impl DipWidth {
    pub fn path_um(&self) -> f64 {
        self.path_length / MICROMETER
    }
}

/// `FWHM_τ = 2√(2 ln 2)·√(σ_s² + σ_L²)/(σ_sσ_L)`; only defined for `δ = 0`.
pub fn dip_fwhm(p: &HomParams) -> Result<DipWidth> {
    if p.delta != 0.0 {
        return Err(Error::InvalidParameter(
            "dip width is only defined for zero detuning".into(),
        ));
    }
    let (s, l) = (p.sigma_s, p.sigma_l);
    let delay = fwhm_per_sigma() * (1.0 / (s * s) + 1.0 / (l * l)).sqrt();
    Ok(DipWidth {
        delay,
        path_length: delay_to_path_length(delay),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomCurve {
    pub delays: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl HomCurve {
    pub fn path_lengths_um(&self) -> impl Iterator<Item = f64> + '_ {
        self.delays.iter().map(|t| delay_to_path_length(*t) / MICROMETER)
    }
}

pub fn hom_curve(p: &HomParams, delays: &[f64]) -> HomCurve {
    HomCurve {
        delays: delays.to_vec(),
        probabilities: delays.iter().map(|t| coincidence_probability(*t, p)).collect(),
    }
}

/// `n` delays evenly spaced over `[start, stop]` (seconds).
pub fn delay_scan(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![start],
        _ => (0..n)
            .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::path_length_to_delay;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(x: f64) -> HomParams {
        HomParams::new(x * 2e13, 2e13, 0.0).unwrap()
    }

    #[test]
    fn perfect_dip_and_limits() {
        let p = params(1.0);
        assert_eq!(coincidence_probability(0.0, &p), 0.0);
        assert_relative_eq!(coincidence_probability(1e-9, &p), 0.5, epsilon = 1e-15);
        assert_relative_eq!(coincidence_probability(-1e-9, &p), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn ratio_1_3_dip() {
        let p = params(1.3);
        let v = 2.0 * 1.3 / (1.0 + 1.69);
        assert_relative_eq!(coincidence_probability(0.0, &p), (1.0 - v) / 2.0, max_relative = 1e-12);
        assert_eq!((visibility(1.3, 1.0) * 100.0).round() / 100.0, 0.97);
        assert!((visibility(1.3, 1.0) - 0.9665).abs() < 5e-4);
    }

    #[test]
    fn visibility_points() {
        assert_eq!(visibility(1.0, 1.0), 1.0);
        assert_eq!(visibility(2.0, 1.0), 0.8);
        assert!((visibility(0.5, 1.0) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn expected_visibility_of_measured_spectra() {
        let s = GaussianSpectrum::from_nm(830.0, 9.3).unwrap();
        let l = GaussianSpectrum::from_nm(830.0, 7.1).unwrap();
        let v = expected_visibility_from_spectra(&s, &l);
        assert!((v - 0.965).abs() < 0.002, "{v}");
        assert_eq!(v, expected_visibility_from_spectra(&l, &s));
        assert_eq!(expected_visibility_from_spectra(&s, &s), 1.0);
    }

    #[test]
    fn dip_width_under_fwhm_convention() {
        let s = GaussianSpectrum::from_nm(830.0, 9.3).unwrap();
        let l = GaussianSpectrum::from_nm(830.0, 7.1).unwrap();
        let w = dip_fwhm(&HomParams::from_spectra(&s, &l).unwrap()).unwrap();
        assert!((w.path_um() - 44.5).abs() / 44.5 < 0.05, "{}", w.path_um());
        let sd = HomParams::from_spectra_with(&s, &l, BandwidthConvention::IntensitySigma).unwrap();
        assert!((dip_fwhm(&sd).unwrap().path_um() - 107.7).abs() < 1.0);
    }

    #[test]
    fn dip_width_scales_inversely_with_bandwidth() {
        let p = HomParams::new(2.5e13, 1.9e13, 0.0).unwrap();
        let q = HomParams::new(5.0e13, 3.8e13, 0.0).unwrap();
        assert_relative_eq!(dip_fwhm(&p).unwrap().delay, 2.0 * dip_fwhm(&q).unwrap().delay, max_relative = 1e-15);
        assert!(dip_fwhm(&HomParams::new(1e13, 1e13, 1e11).unwrap()).is_err());
    }

    #[test]
    fn dip_width_matches_half_max_bisection() {
        // oracle: bisect P(τ) for the depth midway between P(0) and P(∞)
        for (s, l) in [(2.54e13, 1.94e13), (1e13, 4e13), (3e13, 3e13)] {
            let p = HomParams::new(s, l, 0.0).unwrap();
            let half = (coincidence_probability(0.0, &p) + 0.5) / 2.0;
            let (mut lo, mut hi) = (0.0, 1e-11);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if coincidence_probability(mid, &p) < half {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let w = dip_fwhm(&p).unwrap();
            assert_relative_eq!(w.delay, 2.0 * lo, max_relative = 1e-9);
            assert_relative_eq!(path_length_to_delay(w.path_length), w.delay, max_relative = 1e-15);
        }
    }

    #[test]
    fn curve_points() {
        let p = params(1.0);
        let delays = delay_scan(-1e-12, 1e-12, 21);
        let c = hom_curve(&p, &delays);
        assert_eq!(c.probabilities[10], 0.0);
        for (t, v) in c.delays.iter().zip(&c.probabilities) {
            assert_eq!(*v, coincidence_probability(*t, &p));
        }
        let a = hom_curve(&params(2.0), &delays);
        let b = hom_curve(&params(0.5), &delays);
        assert!((a.probabilities[10] - b.probabilities[10]).abs() < 1e-15);
        assert!(delay_scan(0.0, 1.0, 0).is_empty());
    }

    proptest! {
        #[test]
        fn probability_bounded_and_even(s in 1e12f64..1e14, l in 1e12f64..1e14, d in -1e13f64..1e13, t in -1e-11f64..1e-11) {
            let p = HomParams::new(s, l, d).unwrap();
            let v = coincidence_probability(t, &p);
            prop_assert!((0.0..=0.5).contains(&v));
            prop_assert_eq!(v, coincidence_probability(-t, &p));
            let q = HomParams::new(s, l, -d).unwrap();
            prop_assert_eq!(v, coincidence_probability(t, &q));
        }

        #[test]
        fn visibility_definition_matches_closed_form(s in 1e12f64..1e14, l in 1e12f64..1e14) {
            let p = HomParams::new(s, l, 0.0).unwrap();
            let inf = coincidence_probability(1.0, &p);
            let from_curve = (inf - coincidence_probability(0.0, &p)) / inf;
            prop_assert!((from_curve - visibility(s, l)).abs() < 1e-12);
        }

        #[test]
        fn visibility_symmetry_and_sech_identity(lnx in -5.0f64..5.0) {
            let x = lnx.exp();
            prop_assert!((visibility(x, 1.0) - visibility(1.0 / x, 1.0)).abs() < 1e-12);
            prop_assert!((visibility(x, 1.0) - 1.0 / lnx.cosh()).abs() < 1e-12);
        }

        #[test]
        fn detuning_shrinks_the_dip(s in 1e12f64..1e14, l in 1e12f64..1e14, d in 1e10f64..1e13) {
            let p0 = HomParams::new(s, l, d).unwrap();
            let p1 = HomParams::new(s, l, d * 1.5).unwrap();
            prop_assert!(coincidence_probability(0.0, &p1) > coincidence_probability(0.0, &p0)
                || coincidence_probability(0.0, &p0) == 0.5);
            prop_assert!((coincidence_probability(1.0, &p1) - 0.5).abs() < 1e-15);
        }
    }
}

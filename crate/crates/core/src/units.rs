//! Spectral and temporal unit conversions.
//!
//! Everything inside the crate works in SI: angular frequency in rad/s, time in
//! seconds, length in metres. Nanometres and micrometres only appear in the
//! `*_nm` / `*_um` helpers used at API boundaries.

use core::f64::consts::{LN_2, PI};


#[allow(unused_imports)] // shadowed by std inherent methods whenever std is in the graph
use num_traits::Float;

use crate::{Error, Result};

/// Vacuum speed of light (CODATA, exact), m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

pub const NANOMETER: f64 = 1e-9;
pub const MICROMETER: f64 = 1e-6;
pub const MILLIMETER: f64 = 1e-3;

/// Ratio between the FWHM and the standard deviation of a Gaussian, `2√(2 ln 2)`.
pub fn fwhm_per_sigma() -> f64 {
    2.0 * (2.0 * LN_2).sqrt()
}

/// `ω = 2πc/λ`.
pub fn wavelength_to_angular_frequency(wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0) {
        return Err(Error::Domain(alloc::format!(
            "wavelength must be positive, got {wavelength} m"
        )));
    }
    Ok(2.0 * PI * SPEED_OF_LIGHT / wavelength)
}

/// `λ = 2πc/ω`.
pub fn angular_frequency_to_wavelength(omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(alloc::format!(
            "angular frequency must be positive, got {omega} rad/s"
        )));
    }
    Ok(2.0 * PI * SPEED_OF_LIGHT / omega)
}

/// First-order width conversion `Δω = 2πc·Δλ/λ0²`.
pub fn fwhm_wavelength_to_fwhm_angfreq(center_wavelength: f64, fwhm_wavelength: f64) -> Result<f64> {
    if !(center_wavelength > 0.0) {
        return Err(Error::Domain(alloc::format!(
            "center wavelength must be positive, got {center_wavelength} m"
        )));
    }
    if !(fwhm_wavelength >= 0.0) || fwhm_wavelength >= center_wavelength {
        return Err(Error::Domain(alloc::format!(
            "width {fwhm_wavelength} m must satisfy 0 <= Δλ < λ0 = {center_wavelength} m"
        )));
    }
    Ok(2.0 * PI * SPEED_OF_LIGHT * fwhm_wavelength / (center_wavelength * center_wavelength))
}

/// Inverse of [`fwhm_wavelength_to_fwhm_angfreq`] at the same centre wavelength.
pub fn fwhm_angfreq_to_fwhm_wavelength(center_wavelength: f64, fwhm_omega: f64) -> Result<f64> {
    if !(center_wavelength > 0.0) || !(fwhm_omega >= 0.0) {
        return Err(Error::Domain(alloc::format!(
            "invalid width conversion: λ0 = {center_wavelength} m, Δω = {fwhm_omega} rad/s"
        )));
    }
    Ok(fwhm_omega * center_wavelength * center_wavelength / (2.0 * PI * SPEED_OF_LIGHT))
}

/// Optical path length `d = cτ`; sign is preserved.
pub fn delay_to_path_length(delay: f64) -> f64 {
    SPEED_OF_LIGHT * delay
}

pub fn path_length_to_delay(path: f64) -> f64 {
    path / SPEED_OF_LIGHT
}

/// A Gaussian spectrum given by its centre wavelength and the FWHM of its
/// *intensity* profile, both in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpectrum {
    center_wavelength: f64,
    fwhm_wavelength: f64,
}

impl GaussianSpectrum {
    pub fn new(center_wavelength: f64, fwhm_wavelength: f64) -> Result<Self> {
        if !(center_wavelength > 0.0) || !center_wavelength.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "spectrum centre wavelength must be positive, got {center_wavelength} m"
            )));
        }
        if !(fwhm_wavelength > 0.0) || fwhm_wavelength >= center_wavelength {
            return Err(Error::InvalidParameter(alloc::format!(
                "spectrum FWHM must satisfy 0 < FWHM < centre, got {fwhm_wavelength} m"
            )));
        }
        Ok(Self {
            center_wavelength,
            fwhm_wavelength,
        })
    }

    pub fn from_nm(center_nm: f64, fwhm_nm: f64) -> Result<Self> {
        Self::new(center_nm * NANOMETER, fwhm_nm * NANOMETER)
    }

    pub fn center_wavelength(&self) -> f64 {
        self.center_wavelength
    }

    pub fn fwhm_wavelength(&self) -> f64 {
        self.fwhm_wavelength
    }

    pub fn center_nm(&self) -> f64 {
        self.center_wavelength / NANOMETER
    }

    pub fn fwhm_nm(&self) -> f64 {
        self.fwhm_wavelength / NANOMETER
    }

    pub fn center_angular_frequency(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / self.center_wavelength
    }

    /// Intensity FWHM in angular frequency (first-order conversion).
    pub fn fwhm_angular_frequency(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT * self.fwhm_wavelength
            / (self.center_wavelength * self.center_wavelength)
    }

    /// Standard deviation of the intensity spectrum in angular frequency.
    pub fn sigma_angular_frequency(&self) -> f64 {
        self.fwhm_angular_frequency() / fwhm_per_sigma()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn angular_frequency_of_830nm() {
        let omega = wavelength_to_angular_frequency(830.0 * NANOMETER).unwrap();
        assert_relative_eq!(omega, 2.269_459_719_649_220_5e15, max_relative = 1e-14);
    }

    #[test]
    fn long_wavelength_limit() {
        let omega = wavelength_to_angular_frequency(1e12).unwrap();
        assert!(omega < 1e-2);
    }

    #[test]
    fn non_positive_wavelength_rejected() {
        assert!(matches!(
            wavelength_to_angular_frequency(0.0),
            Err(Error::Domain(_))
        ));
        assert!(wavelength_to_angular_frequency(-1.0).is_err());
        assert!(wavelength_to_angular_frequency(f64::NAN).is_err());
    }

    #[test]
    fn width_conversions() {
        let s = fwhm_wavelength_to_fwhm_angfreq(830e-9, 9.3e-9).unwrap();
        assert_relative_eq!(s, 2.542_888_601_534_668_8e13, max_relative = 1e-13);
        let l = fwhm_wavelength_to_fwhm_angfreq(830e-9, 7.1e-9).unwrap();
        assert_relative_eq!(l, 1.941_345_061_386_682_4e13, max_relative = 1e-13);
        assert_eq!(fwhm_wavelength_to_fwhm_angfreq(830e-9, 0.0).unwrap(), 0.0);
        assert!(fwhm_wavelength_to_fwhm_angfreq(830e-9, 830e-9).is_err());
        assert!(fwhm_wavelength_to_fwhm_angfreq(830e-9, 900e-9).is_err());
    }

    #[test]
    fn one_picosecond_of_path() {
        assert_eq!(delay_to_path_length(0.0), 0.0);
        assert_relative_eq!(
            delay_to_path_length(1e-12) / MICROMETER,
            299.792_458,
            max_relative = 1e-12
        );
        assert_relative_eq!(delay_to_path_length(-1e-12), -299.792_458e-6, max_relative = 1e-12);
    }

    #[test]
    fn spectrum_invariants() {
        assert!(GaussianSpectrum::from_nm(830.0, 0.0).is_err());
        assert!(GaussianSpectrum::from_nm(-830.0, 1.0).is_err());
        assert!(GaussianSpectrum::from_nm(830.0, 830.0).is_err());
        let s = GaussianSpectrum::from_nm(830.0, 9.3).unwrap();
        assert_relative_eq!(s.fwhm_angular_frequency(), 2.542_888_601_534_668_8e13, max_relative = 1e-13);
        assert_relative_eq!(
            s.sigma_angular_frequency() * fwhm_per_sigma(),
            s.fwhm_angular_frequency(),
            max_relative = 1e-15
        );
    }

    proptest! {
        #[test]
        fn wavelength_round_trip(nm in 100.0f64..5000.0) {
            let l = nm * NANOMETER;
            let back = angular_frequency_to_wavelength(wavelength_to_angular_frequency(l).unwrap()).unwrap();
            prop_assert!(((back - l) / l).abs() < 1e-12);
        }

        #[test]
        fn delay_round_trip(ps in -1e3f64..1e3) {
            let t = ps * 1e-12;
            let back = path_length_to_delay(delay_to_path_length(t));
            prop_assert!((back - t).abs() <= 1e-12 * t.abs());
        }

        #[test]
        fn width_round_trip(center in 200.0f64..2000.0, frac in 1e-4f64..0.2) {
            let c = center * NANOMETER;
            let w = frac * c;
            let back = fwhm_angfreq_to_fwhm_wavelength(c, fwhm_wavelength_to_fwhm_angfreq(c, w).unwrap()).unwrap();
            prop_assert!(((back - w) / w).abs() < 1e-12);
        }

        #[test]
        fn conversions_strictly_monotone(a in 100.0f64..5000.0, b in 100.0f64..5000.0) {
            prop_assume!(a < b);
            let wa = wavelength_to_angular_frequency(a * NANOMETER).unwrap();
            let wb = wavelength_to_angular_frequency(b * NANOMETER).unwrap();
            prop_assert!(wa > wb);
            prop_assert!(delay_to_path_length(a) < delay_to_path_length(b));
        }
    }
}

//! Birefringent dispersion and type-II (eoe) phase matching.
//!
//! Indices come from a Sellmeier set evaluated with the wavelength in
//! micrometres. The extraordinary index at angle `θ` to the optic axis follows
//! the index ellipse `1/n(θ)² = cos²θ/n_o² + sin²θ/n_e²`.
//!
//! For the eoe interaction the pump is extraordinary, the signal ordinary and
//! the idler extraordinary, so
//! `Δk = k_e(ω_s + ω_i, θ) − k_o(ω_s) − k_e(ω_i, θ)`.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};


#[allow(unused_imports)] // shadowed by std inherent methods whenever std is in the graph
use num_traits::Float;

use crate::units::{NANOMETER, SPEED_OF_LIGHT};
use crate::{Error, Result};

/// Relative angular-frequency step used for the group-index central difference.
pub const GROUP_INDEX_STEP: f64 = 1e-6;

/// One additive term of a Sellmeier expression in `λ` (µm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SellmeierTerm {
    /// `strength·λ²/(λ² − pole)`
    Resonance { strength: f64, pole_um2: f64 },
    /// `strength/(λ² − pole)`
    Pole { strength: f64, pole_um2: f64 },
    /// `coefficient·λ^exponent`
    Power { coefficient: f64, exponent: i32 },
}

impl SellmeierTerm {
    fn eval(&self, lambda_um: f64) -> f64 {
        let l2 = lambda_um * lambda_um;
        match *self {
            SellmeierTerm::Resonance { strength, pole_um2 } => strength * l2 / (l2 - pole_um2),
            SellmeierTerm::Pole { strength, pole_um2 } => strength / (l2 - pole_um2),
            SellmeierTerm::Power {
                coefficient,
                exponent,
            } => coefficient * lambda_um.powi(exponent),
        }
    }
}

/// `n²(λ) = constant + Σ terms`.
#[derive(Debug, Clone, PartialEq)]
pub struct SellmeierAxis {
    pub constant: f64,
    pub terms: Vec<SellmeierTerm>,
}

impl SellmeierAxis {
    fn index_squared(&self, lambda_um: f64) -> f64 {
        self.terms
            .iter()
            .fold(self.constant, |acc, t| acc + t.eval(lambda_um))
    }
}

/// Dispersion of a uniaxial crystal: ordinary and principal extraordinary axes
/// with the wavelength range on which the coefficients are valid.
#[derive(Debug, Clone, PartialEq)]
pub struct SellmeierSet {
    name: String,
    citation: String,
    ordinary: SellmeierAxis,
    extraordinary: SellmeierAxis,
    min_wavelength: f64,
    max_wavelength: f64,
}

/// Field polarization relative to the crystal's principal plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    Ordinary,
    Extraordinary,
}

impl SellmeierSet {
    /// Builds a set and checks that both indices stay in `(1, 3)` and finite on a
    /// sampling of the valid range.
    pub fn new(
        name: impl Into<String>,
        citation: impl Into<String>,
        ordinary: SellmeierAxis,
        extraordinary: SellmeierAxis,
        min_wavelength: f64,
        max_wavelength: f64,
    ) -> Result<Self> {
        if !(min_wavelength > 0.0) || !(max_wavelength > min_wavelength) {
            return Err(Error::InvalidParameter(alloc::format!(
                "Sellmeier range must satisfy 0 < min < max, got [{min_wavelength}, {max_wavelength}] m"
            )));
        }
        let set = Self {
            name: name.into(),
            citation: citation.into(),
            ordinary,
            extraordinary,
            min_wavelength,
            max_wavelength,
        };
        const SAMPLES: usize = 129;
        for i in 0..SAMPLES {
            let l = min_wavelength + (max_wavelength - min_wavelength) * i as f64 / (SAMPLES - 1) as f64;
            for n in [set.index_ordinary(l)?, set.principal_extraordinary(l)?] {
                if !(n > 1.0 && n < 3.0) {
                    return Err(Error::InvalidParameter(alloc::format!(
                        "Sellmeier set {} yields index {n} at {:.1} nm, outside (1, 3)",
                        set.name,
                        l / NANOMETER
                    )));
                }
            }
        }
        Ok(set)
    }

    /// Zernike's KDP dispersion, valid 213.8–1529 nm.
    pub fn kdp() -> Self {
        Self::new(
            "KDP",
            "F. Zernike, J. Opt. Soc. Am. 54, 1215 (1964)",
            SellmeierAxis {
                constant: 2.259_276,
                terms: alloc::vec![
                    SellmeierTerm::Pole {
                        strength: 0.010_089_56,
                        pole_um2: 0.012_942_625,
                    },
                    SellmeierTerm::Resonance {
                        strength: 13.005_22,
                        pole_um2: 400.0,
                    },
                ],
            },
            SellmeierAxis {
                constant: 2.132_668,
                terms: alloc::vec![
                    SellmeierTerm::Pole {
                        strength: 0.008_637_494,
                        pole_um2: 0.012_281_043,
                    },
                    SellmeierTerm::Resonance {
                        strength: 3.227_992_4,
                        pole_um2: 400.0,
                    },
                ],
            },
            213.8 * NANOMETER,
            1529.0 * NANOMETER,
        )
        .expect("built-in KDP coefficients are valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn citation(&self) -> &str {
        &self.citation
    }

    pub fn ordinary(&self) -> &SellmeierAxis {
        &self.ordinary
    }

    pub fn extraordinary(&self) -> &SellmeierAxis {
        &self.extraordinary
    }

    /// Valid wavelength range in metres.
    pub fn range(&self) -> (f64, f64) {
        (self.min_wavelength, self.max_wavelength)
    }

    fn check_range(&self, wavelength: f64) -> Result<f64> {
        if !(wavelength >= self.min_wavelength && wavelength <= self.max_wavelength) {
            return Err(Error::OutOfRange {
                material: self.name.clone(),
                wavelength_nm: wavelength / NANOMETER,
                min_nm: self.min_wavelength / NANOMETER,
                max_nm: self.max_wavelength / NANOMETER,
            });
        }
        Ok(wavelength / 1e-6)
    }

    pub fn index_ordinary(&self, wavelength: f64) -> Result<f64> {
        let um = self.check_range(wavelength)?;
        Ok(self.ordinary.index_squared(um).sqrt())
    }

    /// Principal extraordinary index `n_e(λ)` (field along the optic axis).
    pub fn principal_extraordinary(&self, wavelength: f64) -> Result<f64> {
        let um = self.check_range(wavelength)?;
        Ok(self.extraordinary.index_squared(um).sqrt())
    }

    /// Extraordinary index at `theta` (radians) from the optic axis.
    pub fn index_extraordinary(&self, wavelength: f64, theta: f64) -> Result<f64> {
        check_angle(theta)?;
        let um = self.check_range(wavelength)?;
        let no2 = self.ordinary.index_squared(um);
        if theta == 0.0 {
            return Ok(no2.sqrt());
        }
        let ne2 = self.extraordinary.index_squared(um);
        let (s, c) = theta.sin_cos();
        Ok(1.0 / (c * c / no2 + s * s / ne2).sqrt())
    }

    pub fn index(&self, wavelength: f64, polarization: Polarization, theta: f64) -> Result<f64> {
        match polarization {
            Polarization::Ordinary => self.index_ordinary(wavelength),
            Polarization::Extraordinary => self.index_extraordinary(wavelength, theta),
        }
    }

    fn index_at_omega(&self, omega: f64, polarization: Polarization, theta: f64) -> Result<f64> {
        if !(omega > 0.0) {
            return Err(Error::Domain(alloc::format!(
                "angular frequency must be positive, got {omega}"
            )));
        }
        self.index(2.0 * PI * SPEED_OF_LIGHT / omega, polarization, theta)
    }

    /// `k = n(ω)·ω/c` in rad/m; `theta` is ignored for ordinary polarization.
    pub fn wavenumber(&self, omega: f64, polarization: Polarization, theta: f64) -> Result<f64> {
        Ok(self.index_at_omega(omega, polarization, theta)? * omega / SPEED_OF_LIGHT)
    }

    /// Group index `n_g = n + ω·dn/dω` with the default central-difference step.
    pub fn group_index(&self, omega: f64, polarization: Polarization, theta: f64) -> Result<f64> {
        self.group_index_with_step(omega, polarization, theta, GROUP_INDEX_STEP)
    }

    /// Group index with an explicit relative step `h`: `dn/dω ≈ [n(ω(1+h)) − n(ω(1−h))]/(2hω)`.
    pub fn group_index_with_step(
        &self,
        omega: f64,
        polarization: Polarization,
        theta: f64,
        relative_step: f64,
    ) -> Result<f64> {
        if !(relative_step > 0.0 && relative_step < 0.1) {
            return Err(Error::InvalidParameter(alloc::format!(
                "finite-difference step {relative_step} outside (0, 0.1)"
            )));
        }
        let n = self.index_at_omega(omega, polarization, theta)?;
        let dw = omega * relative_step;
        let up = self.index_at_omega(omega + dw, polarization, theta)?;
        let down = self.index_at_omega(omega - dw, polarization, theta)?;
        Ok(n + omega * (up - down) / (2.0 * dw))
    }
}

fn check_angle(theta: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::Domain(alloc::format!(
            "angle {:.4}° outside [0°, 90°]",
            theta.to_degrees()
        )));
    }
    Ok(())
}

/// A crystal cut for eoe phase matching.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystalConfig {
    material: SellmeierSet,
    length: f64,
    theta: f64,
}

impl CrystalConfig {
    /// `length` in metres, `theta` in radians.
    pub fn new(material: SellmeierSet, length: f64, theta: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!(
                "crystal length must be positive, got {length} m"
            )));
        }
        if !(theta > 0.0 && theta < FRAC_PI_2) {
            return Err(Error::InvalidParameter(alloc::format!(
                "cut angle must lie in (0°, 90°), got {}°",
                theta.to_degrees()
            )));
        }
        Ok(Self {
            material,
            length,
            theta,
        })
    }

    pub fn from_mm_deg(material: SellmeierSet, length_mm: f64, theta_deg: f64) -> Result<Self> {
        Self::new(material, length_mm * 1e-3, theta_deg.to_radians())
    }

    pub fn material(&self) -> &SellmeierSet {
        &self.material
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn theta_deg(&self) -> f64 {
        self.theta.to_degrees()
    }

    /// Same crystal with a different length (used for the thin-crystal limit).
    pub fn with_length(&self, length: f64) -> Result<Self> {
        Self::new(self.material.clone(), length, self.theta)
    }
}

fn mismatch_at(material: &SellmeierSet, omega_s: f64, omega_i: f64, theta: f64) -> Result<f64> {
    let kp = material.wavenumber(omega_s + omega_i, Polarization::Extraordinary, theta)?;
    let ks = material.wavenumber(omega_s, Polarization::Ordinary, theta)?;
    let ki = material.wavenumber(omega_i, Polarization::Extraordinary, theta)?;
    Ok(kp - ks - ki)
}

/// `Δk = k_e(ω_s + ω_i, θ) − k_o(ω_s) − k_e(ω_i, θ)` in rad/m.
pub fn phase_mismatch(omega_s: f64, omega_i: f64, crystal: &CrystalConfig) -> Result<f64> {
    mismatch_at(&crystal.material, omega_s, omega_i, crystal.theta)
}

/// Residual tolerance of the phase-matching angle search, rad/m.
pub const PHASE_MATCH_TOLERANCE: f64 = 1e-6;

/// Cut angle (radians) at which a pump at `pump_wavelength` phase-matches a
/// signal at `degenerate_wavelength` with the idler taking the remaining energy.
///
/// Scans `(0°, 90°)` for a sign change of `Δk(θ)` and bisects the first bracket.
pub fn phasematch_angle_search(
    pump_wavelength: f64,
    degenerate_wavelength: f64,
    material: &SellmeierSet,
) -> Result<f64> {
    let omega_p = crate::units::wavelength_to_angular_frequency(pump_wavelength)?;
    let omega_s = crate::units::wavelength_to_angular_frequency(degenerate_wavelength)?;
    let omega_i = omega_p - omega_s;
    if !(omega_i > 0.0) {
        return Err(Error::Domain(alloc::format!(
            "pump {} nm cannot produce a {} nm signal",
            pump_wavelength / NANOMETER,
            degenerate_wavelength / NANOMETER
        )));
    }
    let residual = |theta: f64| mismatch_at(material, omega_s, omega_i, theta);
    let no_root = || Error::NoPhaseMatchingAngle {
        pump_nm: pump_wavelength / NANOMETER,
        degenerate_nm: degenerate_wavelength / NANOMETER,
    };

    const STEPS: usize = 180;
    let mut lo = 1e-6;
    let mut f_lo = residual(lo)?;
    for i in 1..=STEPS {
        let hi = if i == STEPS {
            FRAC_PI_2 - 1e-6
        } else {
            FRAC_PI_2 * i as f64 / STEPS as f64
        };
        let f_hi = residual(hi)?;
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_lo.signum() != f_hi.signum() {
            return bisect(residual, lo, hi, f_lo, PHASE_MATCH_TOLERANCE);
        }
        lo = hi;
        f_lo = f_hi;
    }
    Err(no_root())
}

/// Pump wavelength (metres) at which the extraordinary pump group index equals
/// the ordinary group index at twice the wavelength, for a fixed cut angle.
///
/// Scans upward from the short end of the valid range in 1 nm steps and bisects
/// the first sign change.
pub fn gvm_pump_search(theta: f64, material: &SellmeierSet) -> Result<f64> {
    check_angle(theta)?;
    let (min, max) = material.range();
    // keep the central-difference neighbourhoods of λ_p and 2λ_p inside the range
    let margin = 1.0 + 2.0 * GROUP_INDEX_STEP;
    let lo_bound = min * margin;
    let hi_bound = max / (2.0 * margin);
    let no_root = || Error::NoGvmRoot {
        theta_deg: theta.to_degrees(),
        min_nm: lo_bound / NANOMETER,
        max_nm: hi_bound / NANOMETER,
    };
    if !(hi_bound > lo_bound) {
        return Err(no_root());
    }
    let residual = |lambda_p: f64| -> Result<f64> {
        let wp = 2.0 * PI * SPEED_OF_LIGHT / lambda_p;
        let pump = material.group_index(wp, Polarization::Extraordinary, theta)?;
        let signal = material.group_index(wp / 2.0, Polarization::Ordinary, theta)?;
        Ok(pump - signal)
    };

    let step = NANOMETER;
    let mut lo = lo_bound;
    let mut f_lo = residual(lo)?;
    while lo < hi_bound {
        let hi = (lo + step).min(hi_bound);
        let f_hi = residual(hi)?;
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_lo.signum() != f_hi.signum() {
            return bisect(residual, lo, hi, f_lo, 0.0);
        }
        lo = hi;
        f_lo = f_hi;
    }
    Err(no_root())
}

/// Bisection until `|f| <= tolerance` or the bracket collapses to adjacent floats.
/// Returns the bracket end with the smaller residual.
fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, mut f_lo: f64, tolerance: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut best = (lo, f_lo.abs());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid.abs() < best.1 {
            best = (mid, f_mid.abs());
        }
        if f_mid.abs() <= tolerance {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::wavelength_to_angular_frequency;
    use approx::assert_relative_eq;

    fn omega(nm: f64) -> f64 {
        wavelength_to_angular_frequency(nm * NANOMETER).unwrap()
    }

    // Regression constants from an independent numpy evaluation of the same
    // Zernike coefficients.
    #[test]
    fn kdp_indices_match_reference_evaluation() {
        let kdp = SellmeierSet::kdp();
        let no = kdp.index_ordinary(830.0 * NANOMETER).unwrap();
        assert!(no > 1.4 && no < 1.6);
        assert_relative_eq!(no, 1.500_588_365_850_457_3, max_relative = 1e-13);
        let ne = kdp
            .index_extraordinary(415.0 * NANOMETER, 67.8f64.to_radians())
            .unwrap();
        assert_relative_eq!(ne, 1.484_305_870_034_790_2, max_relative = 1e-13);
        assert_relative_eq!(
            kdp.principal_extraordinary(415.0 * NANOMETER).unwrap(),
            1.478_269_529_550_726_9,
            max_relative = 1e-13
        );
    }

    #[test]
    fn normal_dispersion() {
        let kdp = SellmeierSet::kdp();
        assert!(
            kdp.index_ordinary(415.0 * NANOMETER).unwrap()
                > kdp.index_ordinary(830.0 * NANOMETER).unwrap()
        );
    }

    #[test]
    fn evaluation_is_deterministic() {
        let kdp = SellmeierSet::kdp();
        let a = kdp.index_ordinary(777.7 * NANOMETER).unwrap();
        let b = kdp.index_ordinary(777.7 * NANOMETER).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn out_of_range_names_the_range() {
        let kdp = SellmeierSet::kdp();
        let err = kdp.index_ordinary(2000.0 * NANOMETER).unwrap_err();
        match &err {
            Error::OutOfRange { min_nm, max_nm, .. } => {
                assert_eq!(*min_nm, 213.8);
                assert_eq!(*max_nm, 1529.0);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(alloc::format!("{err}").contains("1529"));
        assert!(kdp.index_ordinary(100.0 * NANOMETER).is_err());
    }

    #[test]
    fn index_ellipse_limits() {
        let kdp = SellmeierSet::kdp();
        for nm in [300.0, 415.0, 830.0, 1200.0] {
            let l = nm * NANOMETER;
            assert_eq!(
                kdp.index_extraordinary(l, 0.0).unwrap(),
                kdp.index_ordinary(l).unwrap()
            );
            assert_relative_eq!(
                kdp.index_extraordinary(l, FRAC_PI_2).unwrap(),
                kdp.principal_extraordinary(l).unwrap(),
                max_relative = 1e-15
            );
        }
        assert!(kdp.index_extraordinary(830e-9, -0.1).is_err());
        assert!(kdp.index_extraordinary(830e-9, 1.6).is_err());
    }

    #[test]
    fn wavenumber_reference_and_monotonicity() {
        let kdp = SellmeierSet::kdp();
        let w = omega(830.0);
        let k = kdp.wavenumber(w, Polarization::Ordinary, 0.0).unwrap();
        assert_relative_eq!(k, 11_359_608.159_561_707, max_relative = 1e-13);
        // θ is ignored for o-rays
        assert_eq!(
            k,
            kdp.wavenumber(w, Polarization::Ordinary, 1.0).unwrap()
        );
        let mut prev = 0.0;
        for i in 0..200 {
            let nm = 1500.0 - 6.4 * i as f64;
            let k = kdp
                .wavenumber(omega(nm), Polarization::Extraordinary, 1.1)
                .unwrap();
            assert!(k > prev);
            prev = k;
        }
    }

    #[test]
    fn group_index_exceeds_phase_index_and_converges() {
        let kdp = SellmeierSet::kdp();
        let theta = 67.8f64.to_radians();
        for (nm, pol) in [
            (415.0, Polarization::Extraordinary),
            (830.0, Polarization::Ordinary),
            (830.0, Polarization::Extraordinary),
        ] {
            let w = omega(nm);
            let ng = kdp.group_index(w, pol, theta).unwrap();
            let n = kdp.index(nm * NANOMETER, pol, theta).unwrap();
            assert!(ng >= n);
            let half = kdp
                .group_index_with_step(w, pol, theta, GROUP_INDEX_STEP / 2.0)
                .unwrap();
            assert!(((ng - half) / ng).abs() < 1e-8, "{nm} {pol:?}: {ng} vs {half}");
        }
    }

    #[test]
    fn pump_and_signal_group_velocities_match() {
        let kdp = SellmeierSet::kdp();
        let theta = 67.8f64.to_radians();
        let p = kdp
            .group_index(omega(415.0), Polarization::Extraordinary, theta)
            .unwrap();
        let s = kdp
            .group_index(omega(830.0), Polarization::Ordinary, theta)
            .unwrap();
        assert!((p - s).abs() / p < 1e-2);
        assert_relative_eq!(p, 1.525_701_286_461_295, max_relative = 1e-9);
        assert_relative_eq!(s, 1.525_703_655_949_967_5, max_relative = 1e-9);
    }

    #[test]
    fn group_index_neighbourhood_must_stay_in_range() {
        let kdp = SellmeierSet::kdp();
        let edge = omega(1529.0);
        assert!(kdp
            .group_index(edge, Polarization::Ordinary, 0.0)
            .is_err());
    }

    #[test]
    fn mismatch_reference_value() {
        let crystal = CrystalConfig::from_mm_deg(SellmeierSet::kdp(), 15.0, 67.8).unwrap();
        let dk = phase_mismatch(omega(825.0), omega(835.0), &crystal).unwrap();
        assert_relative_eq!(dk, -2_127.800_185_555_592, max_relative = 1e-7);
    }

    #[test]
    fn phase_matching_angle_near_67_8_degrees() {
        let kdp = SellmeierSet::kdp();
        let theta = phasematch_angle_search(415.0 * NANOMETER, 830.0 * NANOMETER, &kdp).unwrap();
        assert!((theta.to_degrees() - 67.8).abs() < 0.5);
        assert_relative_eq!(theta.to_degrees(), 67.764_259_882_958_56, max_relative = 1e-9);

        let crystal = CrystalConfig::new(kdp.clone(), 15e-3, theta).unwrap();
        let w = omega(830.0);
        let dk = phase_mismatch(w, omega(415.0) - w, &crystal).unwrap();
        assert!(dk.abs() < PHASE_MATCH_TOLERANCE, "residual {dk}");

        let again = phasematch_angle_search(415.0 * NANOMETER, 830.0 * NANOMETER, &kdp).unwrap();
        assert_eq!(theta.to_bits(), again.to_bits());

        let shifted = phasematch_angle_search(416.0 * NANOMETER, 830.0 * NANOMETER, &kdp).unwrap();
        assert!((shifted - theta).abs().to_degrees() < 2.0);
        assert_ne!(shifted, theta);
    }

    #[test]
    fn no_phase_matching_for_impossible_process() {
        // Type-II degenerate SHG of 300 nm is far below KDP's cutoff for the pump.
        let kdp = SellmeierSet::kdp();
        let err = phasematch_angle_search(250.0 * NANOMETER, 500.0 * NANOMETER, &kdp);
        assert!(matches!(err, Err(Error::NoPhaseMatchingAngle { .. })), "{err:?}");
    }

    #[test]
    fn gvm_pump_near_415nm() {
        let kdp = SellmeierSet::kdp();
        let theta = 67.8f64.to_radians();
        let lp = gvm_pump_search(theta, &kdp).unwrap();
        assert!((lp / NANOMETER - 415.0).abs() < 5.0, "{}", lp / NANOMETER);
        let res = |l: f64| {
            let wp = 2.0 * PI * SPEED_OF_LIGHT / l;
            kdp.group_index(wp, Polarization::Extraordinary, theta).unwrap()
                - kdp.group_index(wp / 2.0, Polarization::Ordinary, theta).unwrap()
        };
        assert!(res(lp).abs() < 1e-6);
        let d = 0.01 * NANOMETER;
        assert!(res(lp - d).signum() != res(lp + d).signum());
    }
}

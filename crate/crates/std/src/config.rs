//! Run configuration: one TOML file with sections, every key optional.
//! Missing keys take the reference setup (415/2.3 nm pump, 15 mm KDP,
//! 9.3/7.1 nm signal and LO spectra at 830 nm, μ = 0.02).
//!
//! ```toml
//! [crystal]
//! material = "kdp"          # built-in, or a material file relative to this file
//! length_mm = 15.0
//! # theta_deg = 67.8        # omitted: phase-matching angle search
//!
//! [pump]
//! center_nm = 415.0
//! fwhm_nm = 2.3
//!
//! [grid]
//! signal_points = 256
//! idler_points = 256
//! span_fwhm = 4.0
//!
//! [jsa]
//! kind = "spdc"             # or "separable" (signal × idler Gaussians)
//!
//! [spectra]
//! signal_center_nm = 830.0
//! signal_fwhm_nm = 9.3
//! idler_fwhm_nm = 1.9       # separable JSA only
//! lo_center_nm = 830.0
//! lo_fwhm_nm = 7.1
//!
//! [source]
//! pair_probability = 0.01
//! statistics = "single-pair" # or "thermal"
//! herald_arm_efficiency = 1.0
//! lo_mean_photons = 0.02
//! # cutoff = 4              # omitted: smallest cutoff meeting the leakage guard
//!
//! [detectors]
//! d1 = { efficiency = 1.0, dark_probability = 0.0 }
//! d2 = { efficiency = 1.0, dark_probability = 0.0 }
//! herald = { efficiency = 1.0, dark_probability = 0.0 }
//!
//! [scan]
//! start_um = -150.0
//! stop_um = 150.0
//! points = 61
//! # delays_um = [-50.0, 0.0, 50.0]   # explicit list, overrides the range
//!
//! [simulation]
//! pulses_per_point = 1000000
//! seed = 1
//!
//! [output]
//! directory = "out"
//! svg = false
//! ```

use std::path::{Path, PathBuf};

use homsim_core::crystal::{phasematch_angle_search, CrystalConfig, SellmeierSet};
use homsim_core::focksim::{DetectorModel, Experiment, PairStatistics, SourceConfig};
use homsim_core::hom::HomParams;
use homsim_core::jsa::{Axis, FrequencyGrid};
use homsim_core::units::{path_length_to_delay, MICROMETER, MILLIMETER, NANOMETER};
use homsim_core::GaussianSpectrum;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{AppError, AppResult};
use crate::material::load_material;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrystalSection {
    pub material: String,
    pub length_mm: f64,
    pub theta_deg: Option<f64>,
}

impl Default for CrystalSection {
    fn default() -> Self {
        Self {
            material: crate::material::BUILTIN_KDP.into(),
            length_mm: 15.0,
            theta_deg: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PumpSection {
    pub center_nm: f64,
    pub fwhm_nm: f64,
}

impl Default for PumpSection {
    fn default() -> Self {
        Self {
            center_nm: 415.0,
            fwhm_nm: 2.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub signal_points: usize,
    pub idler_points: usize,
    pub span_fwhm: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            signal_points: homsim_core::jsa::DEFAULT_GRID_POINTS,
            idler_points: homsim_core::jsa::DEFAULT_GRID_POINTS,
            span_fwhm: homsim_core::jsa::DEFAULT_SPAN_FWHM,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JsaKind {
    #[default]
    Spdc,
    Separable,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JsaSection {
    pub kind: JsaKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectraSection {
    pub signal_center_nm: f64,
    pub signal_fwhm_nm: f64,
    pub idler_fwhm_nm: f64,
    pub lo_center_nm: f64,
    pub lo_fwhm_nm: f64,
}

impl Default for SpectraSection {
    fn default() -> Self {
        Self {
            signal_center_nm: 830.0,
            signal_fwhm_nm: 9.3,
            idler_fwhm_nm: 1.9,
            lo_center_nm: 830.0,
            lo_fwhm_nm: 7.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistics {
    #[default]
    SinglePair,
    Thermal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceSection {
    pub pair_probability: f64,
    pub statistics: Statistics,
    pub herald_arm_efficiency: f64,
    pub lo_mean_photons: f64,
    pub cutoff: Option<usize>,
}

impl Default for SourceSection {
    fn default() -> Self {
        Self {
            pair_probability: 0.01,
            statistics: Statistics::SinglePair,
            herald_arm_efficiency: 1.0,
            lo_mean_photons: 0.02,
            cutoff: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorSection {
    pub efficiency: f64,
    pub dark_probability: f64,
}

impl Default for DetectorSection {
    fn default() -> Self {
        Self {
            efficiency: 1.0,
            dark_probability: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorsSection {
    pub d1: DetectorSection,
    pub d2: DetectorSection,
    pub herald: DetectorSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    pub start_um: f64,
    pub stop_um: f64,
    pub points: usize,
    pub delays_um: Option<Vec<f64>>,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            start_um: -150.0,
            stop_um: 150.0,
            points: 61,
            delays_um: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    pub pulses_per_point: u64,
    pub seed: u64,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            pulses_per_point: 1_000_000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: "out".into(),
            svg: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub crystal: CrystalSection,
    pub pump: PumpSection,
    pub grid: GridSection,
    pub jsa: JsaSection,
    pub spectra: SpectraSection,
    pub source: SourceSection,
    pub detectors: DetectorsSection,
    pub scan: ScanSection,
    pub simulation: SimulationSection,
    pub output: OutputSection,
    /// Directory that relative paths in the file resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

/// Bundled presets: `(name, toml)`.
pub const PRESETS: &[(&str, &str)] = &[
    ("paper", include_str!("../presets/paper.toml")),
    ("separable", include_str!("../presets/separable.toml")),
    ("matched", include_str!("../presets/matched.toml")),
    ("weak-lo", include_str!("../presets/weak_lo.toml")),
    ("unheralded", include_str!("../presets/unheralded.toml")),
];

impl RunConfig {
    pub fn parse(text: &str) -> AppResult<Self> {
        toml::from_str(text).map_err(|e| AppError::Validation(format!("config: {e}")))
    }

    pub fn preset(name: &str) -> AppResult<Self> {
        let (_, text) = PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| unknown_preset(name))?;
        Self::parse(text)
    }

    /// A preset (or the defaults) with a config file layered on top, key by key.
    pub fn compose(preset: Option<&str>, path: Option<&Path>) -> AppResult<Self> {
        let mut table = match preset {
            Some(name) => {
                let (_, text) = PRESETS
                    .iter()
                    .find(|(n, _)| *n == name)
                    .ok_or_else(|| unknown_preset(name))?;
                parse_table(text)?
            }
            None => toml::Table::new(),
        };
        let mut base_dir = None;
        if let Some(path) = path {
            if !path.is_file() {
                return Err(AppError::Validation(format!("config file not found: {}", path.display())));
            }
            let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
            let overlay =
                parse_table(&text).map_err(|e| AppError::Validation(format!("{}: {e}", path.display())))?;
            merge(&mut table, overlay);
            base_dir = path.parent().map(Path::to_path_buf);
        }
        let mut config: Self = toml::Value::Table(table)
            .try_into()
            .map_err(|e| AppError::Validation(format!("config: {e}")))?;
        config.base_dir = base_dir;
        Ok(config)
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        if !path.is_file() {
            return Err(AppError::Validation(format!("config file not found: {}", path.display())));
        }
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        let mut config = Self::parse(&text)
            .map_err(|e| AppError::Validation(format!("{}: {e}", path.display())))?;
        config.base_dir = path.parent().map(Path::to_path_buf);
        Ok(config)
    }

    /// SHA-256 of the canonical serialization, as lowercase hex. The output
    /// section is left out: where files land does not change their content.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = OutputSection::default();
        let text = toml::to_string(&canonical).unwrap_or_default();
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Checks every physical parameter and referenced path without running
    /// any computation.
    pub fn validate(&self) -> AppResult<()> {
        self.material()?;
        self.pump()?;
        if self.crystal.length_mm.is_nan() || self.crystal.length_mm <= 0.0 {
            return Err(AppError::Validation(format!(
                "crystal length must be positive, got {} mm",
                self.crystal.length_mm
            )));
        }
        if let Some(t) = self.crystal.theta_deg {
            if !(0.0..=90.0).contains(&t) {
                return Err(AppError::Validation(format!("theta must lie in [0, 90]°, got {t}")));
            }
        }
        let g = &self.grid;
        if g.signal_points < 2 || g.idler_points < 2 || g.span_fwhm.is_nan() || g.span_fwhm <= 0.0 {
            return Err(AppError::Validation(format!(
                "grid needs at least 2 points per axis and a positive span, got {}×{} over ±{} FWHM",
                g.signal_points, g.idler_points, g.span_fwhm
            )));
        }
        self.signal_spectrum()?;
        self.lo_spectrum()?;
        self.idler_spectrum()?;
        self.hom_params()?;
        self.source_config()?;
        self.detectors()?;
        self.delays()?;
        Ok(())
    }

    pub fn material(&self) -> AppResult<SellmeierSet> {
        load_material(&self.crystal.material, self.base_dir.as_deref())
    }

    pub fn pump(&self) -> AppResult<GaussianSpectrum> {
        Ok(GaussianSpectrum::from_nm(self.pump.center_nm, self.pump.fwhm_nm)?)
    }

    /// Crystal at the configured angle, or at the searched phase-matching
    /// angle for degenerate emission when no angle is given.
    pub fn crystal(&self) -> AppResult<CrystalConfig> {
        let material = self.material()?;
        let length = self.crystal.length_mm * MILLIMETER;
        let theta = match self.crystal.theta_deg {
            Some(t) => t.to_radians(),
            None => {
                let pump = self.pump.center_nm * NANOMETER;
                phasematch_angle_search(pump, 2.0 * pump, &material)?
            }
        };
        Ok(CrystalConfig::new(material, length, theta)?)
    }

    pub fn signal_spectrum(&self) -> AppResult<GaussianSpectrum> {
        Ok(GaussianSpectrum::from_nm(self.spectra.signal_center_nm, self.spectra.signal_fwhm_nm)?)
    }

    /// Idler marginal of the separable test JSA, at the energy-conserving
    /// partner of the signal centre.
    pub fn idler_spectrum(&self) -> AppResult<GaussianSpectrum> {
        let inv = 1.0 / self.pump.center_nm - 1.0 / self.spectra.signal_center_nm;
        if !(inv > 0.0) {
            return Err(AppError::Validation(
                "signal centre must be longer than the pump wavelength".into(),
            ));
        }
        Ok(GaussianSpectrum::from_nm(1.0 / inv, self.spectra.idler_fwhm_nm)?)
    }

    pub fn lo_spectrum(&self) -> AppResult<GaussianSpectrum> {
        Ok(GaussianSpectrum::from_nm(self.spectra.lo_center_nm, self.spectra.lo_fwhm_nm)?)
    }

    pub fn hom_params(&self) -> AppResult<HomParams> {
        Ok(HomParams::from_spectra(&self.signal_spectrum()?, &self.lo_spectrum()?)?)
    }

    /// Grid for the configured JSA kind.
    pub fn grid(&self, crystal: &CrystalConfig) -> AppResult<FrequencyGrid> {
        let g = &self.grid;
        match self.jsa.kind {
            JsaKind::Spdc => Ok(FrequencyGrid::around_degeneracy(
                &self.pump()?,
                crystal,
                g.signal_points,
                g.idler_points,
                g.span_fwhm,
            )?),
            JsaKind::Separable => {
                let s = self.signal_spectrum()?;
                let i = self.idler_spectrum()?;
                Ok(FrequencyGrid::new(
                    Axis::centered(
                        s.center_angular_frequency(),
                        g.span_fwhm * s.fwhm_angular_frequency(),
                        g.signal_points,
                    )?,
                    Axis::centered(
                        i.center_angular_frequency(),
                        g.span_fwhm * i.fwhm_angular_frequency(),
                        g.idler_points,
                    )?,
                ))
            }
        }
    }

    pub fn source_config(&self) -> AppResult<SourceConfig> {
        let s = &self.source;
        let stats = match s.statistics {
            Statistics::SinglePair => PairStatistics::SinglePair,
            Statistics::Thermal => PairStatistics::Thermal,
        };
        let mut cfg = SourceConfig::new(s.pair_probability, stats, s.herald_arm_efficiency, s.lo_mean_photons)?;
        if let Some(c) = s.cutoff {
            cfg = cfg.with_cutoff(c);
        }
        cfg.cutoff()?;
        Ok(cfg)
    }

    pub fn detectors(&self) -> AppResult<[DetectorModel; 3]> {
        let d = |s: &DetectorSection| DetectorModel::new(s.efficiency, s.dark_probability);
        Ok([d(&self.detectors.d1)?, d(&self.detectors.d2)?, d(&self.detectors.herald)?])
    }

    pub fn experiment(&self) -> AppResult<Experiment> {
        let [d1, d2, herald] = self.detectors()?;
        Ok(Experiment::new(self.source_config()?, self.hom_params()?).with_detectors(d1, d2, herald))
    }

    /// Path-length offsets of the scan, µm.
    pub fn positions_um(&self) -> AppResult<Vec<f64>> {
        let s = &self.scan;
        let positions = match &s.delays_um {
            Some(list) => list.clone(),
            None => homsim_core::hom::delay_scan(s.start_um, s.stop_um, s.points),
        };
        if positions.is_empty() {
            return Err(AppError::Validation("delay scan is empty".into()));
        }
        if positions.iter().any(|p| !p.is_finite()) {
            return Err(AppError::Validation("delay scan contains a non-finite entry".into()));
        }
        Ok(positions)
    }

    /// Scan delays, seconds.
    pub fn delays(&self) -> AppResult<Vec<f64>> {
        Ok(self
            .positions_um()?
            .into_iter()
            .map(|p| path_length_to_delay(p * MICROMETER))
            .collect())
    }
}

fn unknown_preset(name: &str) -> AppError {
    let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
    AppError::Validation(format!("unknown preset {name:?}; available: {}", names.join(", ")))
}

fn parse_table(text: &str) -> AppResult<toml::Table> {
    text.parse::<toml::Table>()
        .map_err(|e| AppError::Validation(format!("config: {e}")))
}

/// Recursively overlays `top` on `base`; tables merge, other values replace.
fn merge(base: &mut toml::Table, top: toml::Table) {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the numerical core.
///
/// Variants carry enough context for the CLI to print a useful diagnostic;
/// the CLI maps [`Error::is_validation`] to a configuration exit code and
/// everything else to a computation exit code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("wavelength {wavelength_nm:.3} nm outside Sellmeier range [{min_nm}, {max_nm}] nm of {material}")]
    OutOfRange {
        material: String,
        wavelength_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },

    #[error("no phase-matching angle in (0°, 90°) for pump {pump_nm} nm -> {degenerate_nm} nm")]
    NoPhaseMatchingAngle { pump_nm: f64, degenerate_nm: f64 },

    #[error("no group-velocity-matched pump wavelength in [{min_nm:.1}, {max_nm:.1}] nm at θ = {theta_deg}°")]
    NoGvmRoot {
        theta_deg: f64,
        min_nm: f64,
        max_nm: f64,
    },

    #[error("grid too coarse: {points:.1} points across the {axis} marginal FWHM (need at least {required})")]
    Resolution {
        axis: &'static str,
        points: f64,
        required: usize,
    },

    #[error("grid too narrow: {axis} marginal does not fall below half maximum inside the grid")]
    GridTooNarrow { axis: &'static str },

    #[error("non-finite entry in input data")]
    NonFinite,

    #[error("Fock truncation leakage {leakage:.3e} exceeds {limit:e} (cutoff {cutoff})")]
    TruncationLeakage {
        leakage: f64,
        limit: f64,
        cutoff: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dip fit: {0}")]
    Fit(#[from] crate::fit::FitError),
}

impl Error {
    /// True when the error stems from invalid user input rather than from a
    /// numerical procedure failing on valid input.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::OutOfRange { .. }
                | Error::InvalidParameter(_)
                | Error::Resolution { .. }
                | Error::GridTooNarrow { .. }
                | Error::Fit(crate::fit::FitError::TooFewPoints { .. })
                | Error::Fit(crate::fit::FitError::InsufficientWings { .. })
                | Error::Fit(crate::fit::FitError::InvalidData(_))
        )
    }
}

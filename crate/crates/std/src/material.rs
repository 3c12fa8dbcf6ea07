//! Sellmeier material files.
//!
//! ```toml
//! name = "KDP"
//! citation = "F. Zernike, J. Opt. Soc. Am. 54, 1215 (1964)"
//! min_nm = 213.8
//! max_nm = 1529.0
//!
//! [ordinary]
//! constant = 2.259276
//! terms = [
//!     { kind = "pole", strength = 0.01008956, pole_um2 = 0.012942625 },
//!     { kind = "resonance", strength = 13.00522, pole_um2 = 400.0 },
//! ]
//! ```
//!
//! `pole` is `s/(λ² − p)`, `resonance` is `s·λ²/(λ² − p)` and `power` is
//! `c·λ^e`, all with `λ` in µm.

use std::path::Path;

use homsim_core::crystal::{SellmeierAxis, SellmeierSet, SellmeierTerm};
use homsim_core::units::NANOMETER;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

/// Name that selects the built-in KDP set instead of a file.
pub const BUILTIN_KDP: &str = "kdp";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TermFile {
    Pole { strength: f64, pole_um2: f64 },
    Resonance { strength: f64, pole_um2: f64 },
    Power { coefficient: f64, exponent: i32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisFile {
    pub constant: f64,
    #[serde(default)]
    pub terms: Vec<TermFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialFile {
    pub name: String,
    #[serde(default)]
    pub citation: String,
    pub min_nm: f64,
    pub max_nm: f64,
    pub ordinary: AxisFile,
    pub extraordinary: AxisFile,
}

impl From<&TermFile> for SellmeierTerm {
    fn from(t: &TermFile) -> Self {
        match *t {
            TermFile::Pole { strength, pole_um2 } => SellmeierTerm::Pole { strength, pole_um2 },
            TermFile::Resonance { strength, pole_um2 } => SellmeierTerm::Resonance { strength, pole_um2 },
            TermFile::Power {
                coefficient,
                exponent,
            } => SellmeierTerm::Power {
                coefficient,
                exponent,
            },
        }
    }
}

fn term_file(t: &SellmeierTerm) -> TermFile {
    match *t {
        SellmeierTerm::Pole { strength, pole_um2 } => TermFile::Pole { strength, pole_um2 },
        SellmeierTerm::Resonance { strength, pole_um2 } => TermFile::Resonance { strength, pole_um2 },
        SellmeierTerm::Power {
            coefficient,
            exponent,
        } => TermFile::Power {
            coefficient,
            exponent,
        },
    }
}

impl AxisFile {
    fn to_axis(&self) -> SellmeierAxis {
        SellmeierAxis {
            constant: self.constant,
            terms: self.terms.iter().map(SellmeierTerm::from).collect(),
        }
    }

    fn from_axis(axis: &SellmeierAxis) -> Self {
        Self {
            constant: axis.constant,
            terms: axis.terms.iter().map(term_file).collect(),
        }
    }
}

impl MaterialFile {
    pub fn to_set(&self) -> AppResult<SellmeierSet> {
        Ok(SellmeierSet::new(
            self.name.clone(),
            self.citation.clone(),
            self.ordinary.to_axis(),
            self.extraordinary.to_axis(),
            self.min_nm * NANOMETER,
            self.max_nm * NANOMETER,
        )?)
    }

    pub fn from_set(set: &SellmeierSet) -> Self {
        let (lo, hi) = set.range();
        Self {
            name: set.name().to_string(),
            citation: set.citation().to_string(),
            min_nm: lo / NANOMETER,
            max_nm: hi / NANOMETER,
            ordinary: AxisFile::from_axis(set.ordinary()),
            extraordinary: AxisFile::from_axis(set.extraordinary()),
        }
    }
}

pub fn parse_material(text: &str) -> AppResult<SellmeierSet> {
    let file: MaterialFile =
        toml::from_str(text).map_err(|e| AppError::Validation(format!("material file: {e}")))?;
    file.to_set()
}

/// Loads a material file, or the built-in KDP set for [`BUILTIN_KDP`].
pub fn load_material(spec: &str, base: Option<&Path>) -> AppResult<SellmeierSet> {
    if spec.eq_ignore_ascii_case(BUILTIN_KDP) {
        return Ok(SellmeierSet::kdp());
    }
    let path = match base {
        Some(dir) => dir.join(spec),
        None => spec.into(),
    };
    if !path.is_file() {
        return Err(AppError::Validation(format!(
            "material file not found: {}",
            path.display()
        )));
    }
    let text = std::fs::read_to_string(&path).map_err(|e| AppError::io(&path, e))?;
    parse_material(&text).map_err(|e| match e {
        AppError::Validation(m) => AppError::Validation(format!("{}: {m}", path.display())),
        other => other,
    })
}

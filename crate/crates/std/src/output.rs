//! CSV files. Every file starts with one `#` comment line carrying the config
//! hash and seed; readers skip `#` lines.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use homsim_core::focksim::{CountPoint, CountRecord};
use homsim_core::hom::HomCurve;
use homsim_core::jsa::{FrequencyGrid, Marginals};
use homsim_core::units::{delay_to_path_length, path_length_to_delay, MICROMETER};

use crate::error::{AppError, AppResult};

/// Origin of an output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    pub fn header(&self) -> String {
        format!(
            "# homsim {} config_sha256={} seed={}",
            env!("CARGO_PKG_VERSION"),
            self.config_hash,
            self.seed
        )
    }
}

fn writer(path: &Path, prov: &Provenance) -> AppResult<csv::Writer<BufWriter<File>>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| AppError::io(path, e))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{}", prov.header()).map_err(|e| AppError::io(path, e))?;
    Ok(csv::WriterBuilder::new().flexible(true).from_writer(out))
}

fn write_rows<I, R>(path: &Path, prov: &Provenance, header: &[&str], rows: I) -> AppResult<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = writer(path, prov)?;
    let io = |e: csv::Error| AppError::io(path, e);
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush().map_err(|e| AppError::io(path, e))
}

fn num(x: f64) -> String {
    // shortest round-trip representation
    format!("{x:?}")
}

/// Row-major matrix over the grid: the header row lists idler frequencies,
/// each following row starts with its signal frequency.
pub fn write_density(path: &Path, prov: &Provenance, grid: &FrequencyGrid, values: &[f64]) -> AppResult<()> {
    let (ns, ni) = grid.shape();
    debug_assert_eq!(values.len(), ns * ni);
    let mut header = vec!["omega_s\\omega_i".to_string()];
    header.extend(grid.idler.values().map(num));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = grid.signal.values().enumerate().map(|(r, ws)| {
        std::iter::once(num(ws)).chain(values[r * ni..(r + 1) * ni].iter().map(|v| num(*v)))
    });
    write_rows(path, prov, &header, rows)
}

/// Reads a density matrix back as `(signal ω, idler ω, row-major values)`.
pub fn read_density(path: &Path) -> AppResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let mut r = reader(path)?;
    let bad = |m: String| AppError::Validation(format!("{}: {m}", path.display()));
    let idler = r
        .headers()
        .map_err(|e| bad(e.to_string()))?
        .iter()
        .skip(1)
        .map(|s| parse_num(s).map_err(bad))
        .collect::<AppResult<Vec<_>>>()?;
    let mut signal = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if rec.len() != idler.len() + 1 {
            return Err(bad(format!("row {} has {} cells", signal.len() + 1, rec.len())));
        }
        signal.push(parse_num(&rec[0]).map_err(bad)?);
        for s in rec.iter().skip(1) {
            values.push(parse_num(s).map_err(bad)?);
        }
    }
    Ok((signal, idler, values))
}

/// Long format: `axis, omega, wavelength_nm, density`.
pub fn write_marginals(path: &Path, prov: &Provenance, m: &Marginals) -> AppResult<()> {
    let rows = [("signal", &m.signal), ("idler", &m.idler)]
        .into_iter()
        .flat_map(|(name, marginal)| {
            marginal.omega.iter().zip(&marginal.density).map(move |(w, d)| {
                let nm = 2.0 * std::f64::consts::PI * homsim_core::units::SPEED_OF_LIGHT / w * 1e9;
                vec![name.to_string(), num(*w), num(nm), num(*d)]
            })
        });
    write_rows(path, prov, &["axis", "omega", "wavelength_nm", "density"], rows)
}

/// Schmidt weights `λ_n` with the amplitudes `√λ_n`.
pub fn write_schmidt(path: &Path, prov: &Provenance, coefficients: &[f64]) -> AppResult<()> {
    let rows = coefficients
        .iter()
        .enumerate()
        .map(|(k, l)| vec![k.to_string(), num(*l), num(l.sqrt())]);
    write_rows(path, prov, &["mode", "lambda", "sqrt_lambda"], rows)
}

pub fn write_hom_curve(path: &Path, prov: &Provenance, curve: &HomCurve) -> AppResult<()> {
    let rows = curve
        .delays
        .iter()
        .zip(curve.path_lengths_um())
        .zip(&curve.probabilities)
        .map(|((t, d), p)| vec![num(*t), num(d), num(*p)]);
    write_rows(path, prov, &["delay_s", "path_um", "probability"], rows)
}

/// Several named curves sharing one delay axis.
pub fn write_curves(path: &Path, prov: &Provenance, delays: &[f64], curves: &[(&str, Vec<f64>)]) -> AppResult<()> {
    let mut header = vec!["delay_s", "path_um"];
    header.extend(curves.iter().map(|(n, _)| *n));
    let rows = delays.iter().enumerate().map(|(i, t)| {
        let mut row = vec![num(*t), num(delay_to_path_length(*t) / MICROMETER)];
        row.extend(curves.iter().map(|(_, v)| num(v[i])));
        row
    });
    write_rows(path, prov, &header, rows)
}

pub const COUNT_COLUMNS: [&str; 8] = [
    "delay_s",
    "path_um",
    "pulses",
    "singles_i",
    "singles_d1",
    "singles_d2",
    "doubles_d1d2",
    "triples",
];

pub fn write_count_record(path: &Path, prov: &Provenance, record: &CountRecord) -> AppResult<()> {
    let rows = record
        .delays
        .iter()
        .zip(record.path_lengths_um())
        .zip(&record.points)
        .map(|((t, d), p)| {
            vec![
                num(*t),
                num(d),
                p.pulses.to_string(),
                p.singles_i.to_string(),
                p.singles_d1.to_string(),
                p.singles_d2.to_string(),
                p.doubles_d1d2.to_string(),
                p.triples.to_string(),
            ]
        });
    write_rows(path, prov, &COUNT_COLUMNS, rows)
}

fn reader(path: &Path) -> AppResult<csv::Reader<File>> {
    if !path.is_file() {
        return Err(AppError::Validation(format!("input file not found: {}", path.display())));
    }
    let file = File::open(path).map_err(|e| AppError::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn parse_num(s: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("not a finite number: {s:?}"))
}

/// Seed recorded in a provenance line, if any.
pub fn read_seed(path: &Path) -> AppResult<Option<u64>> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    Ok(text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .flat_map(str::split_whitespace)
        .find_map(|tok| tok.strip_prefix("seed=")?.parse().ok()))
}

pub fn read_count_record(path: &Path) -> AppResult<CountRecord> {
    let mut r = reader(path)?;
    let bad = |m: String| AppError::Validation(format!("{}: {m}", path.display()));
    let headers = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols != COUNT_COLUMNS {
        return Err(bad(format!("expected columns {COUNT_COLUMNS:?}, got {cols:?}")));
    }
    let mut delays = Vec::new();
    let mut points = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let int = |k: usize| -> AppResult<u64> {
            rec[k]
                .parse()
                .map_err(|_| bad(format!("row {}: {} is not a count: {:?}", line + 1, COUNT_COLUMNS[k], &rec[k])))
        };
        delays.push(parse_num(&rec[0]).map_err(bad)?);
        let point = CountPoint {
            pulses: int(2)?,
            singles_i: int(3)?,
            singles_d1: int(4)?,
            singles_d2: int(5)?,
            doubles_d1d2: int(6)?,
            triples: int(7)?,
        };
        if !point.is_consistent() {
            return Err(bad(format!("row {}: counts violate triples ≤ doubles ≤ singles ≤ pulses", line + 1)));
        }
        points.push(point);
    }
    Ok(CountRecord {
        seed: read_seed(path)?.unwrap_or(0),
        delays,
        points,
    })
}

/// Count column used when fitting a CountRecord file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum CountColumn {
    #[default]
    Triples,
    Doubles,
}

/// A `(position_um, counts)` series for fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub positions_um: Vec<f64>,
    pub counts: Vec<f64>,
}

/// Reads either a CountRecord CSV or a two-column `position_um, counts` CSV.
pub fn read_series(path: &Path, column: CountColumn) -> AppResult<Series> {
    let mut r = reader(path)?;
    let bad = |m: String| AppError::Validation(format!("{}: {m}", path.display()));
    let headers = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.iter().eq(COUNT_COLUMNS) {
        let rec = read_count_record(path)?;
        let counts = rec
            .points
            .iter()
            .map(|p| match column {
                CountColumn::Triples => p.triples as f64,
                CountColumn::Doubles => p.doubles_d1d2 as f64,
            })
            .collect();
        return Ok(Series {
            positions_um: rec.path_lengths_um().collect(),
            counts,
        });
    }
    if headers.len() != 2 {
        return Err(bad(format!(
            "expected a count record or two columns (position_um, counts), got {} columns",
            headers.len()
        )));
    }
    let mut positions_um = Vec::new();
    let mut counts = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let row = |m: String| bad(format!("row {}: {m}", line + 1));
        positions_um.push(parse_num(&rec[0]).map_err(row)?);
        let c = parse_num(&rec[1]).map_err(row)?;
        if c < 0.0 {
            return Err(row(format!("negative count {c}")));
        }
        counts.push(c);
    }
    Ok(Series { positions_um, counts })
}

pub fn write_series(path: &Path, prov: &Provenance, series: &Series) -> AppResult<()> {
    let rows = series
        .positions_um
        .iter()
        .zip(&series.counts)
        .map(|(d, c)| vec![num(*d), num(*c)]);
    write_rows(path, prov, &["position_um", "counts"], rows)
}

/// One row per criterion of the `paper` report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub measured: String,
    pub bound: String,
}

pub fn write_report(path: &Path, prov: &Provenance, rows: &[ReportRow]) -> AppResult<()> {
    let body = rows.iter().map(|r| {
        vec![
            r.id.clone(),
            r.name.clone(),
            if r.passed { "PASS" } else { "FAIL" }.to_string(),
            r.measured.clone(),
            r.bound.clone(),
        ]
    });
    write_rows(path, prov, &["criterion", "name", "status", "measured", "bound"], body)
}

/// Converts path offsets (µm) to delays (s).
pub fn delays_from_um(positions: &[f64]) -> Vec<f64> {
    positions.iter().map(|p| path_length_to_delay(p * MICROMETER)).collect()
}

/// Output directory, created if needed.
pub fn ensure_dir(dir: &Path) -> AppResult<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    Ok(dir.to_path_buf())
}

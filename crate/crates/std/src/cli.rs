//! Command-line front end.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use homsim_core::fit::{fit_dip, visibility_from_fit, FitResult};
use homsim_core::focksim::{threefold_visibility, twofold_visibility};
use homsim_core::hom::{dip_fwhm, hom_curve, visibility, HomParams};
use homsim_core::jsa::{build_jsa, build_separable_jsa, density_panels, marginal_spectra, JsaMatrix};
use homsim_core::schmidt::schmidt_decompose;

use crate::acceptance::{run_all, Tolerances};
use crate::config::{JsaKind, RunConfig, Statistics};
use crate::error::{AppError, AppResult};
use crate::output::{self, CountColumn, Provenance, Series};
use crate::parallel::{simulate_parallel, threads_from_env};
use crate::svg;

#[derive(Debug, Parser)]
#[command(name = "homsim", version, about = "Heralded-photon / weak-coherent-state HOM interference simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// Run configuration (TOML); layered over the preset.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Bundled parameter set: paper, separable, matched, weak-lo, unheralded.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Master seed for Monte Carlo runs.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Points per grid axis.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Joint spectral amplitude: density panels and marginals.
    Jsa(Common),
    /// Schmidt number, purity and leading coefficients.
    Schmidt(Common),
    /// Closed-form HOM dip curve, visibility and width.
    Hom(Common),
    /// Monte Carlo click counts over the delay scan.
    Simulate(Common),
    /// Gaussian dip fit of count data.
    Fit(FitArgs),
    /// Every acceptance scenario, one PASS/FAIL line each.
    Paper(Common),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: Common,
    /// Count record or two-column (position_um, counts) CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Count column of a count record.
    #[arg(long, value_enum, default_value_t = CountColumn::Triples)]
    pub column: CountColumn,
}

/// Effective configuration after preset, file and flags.
pub fn resolve(common: &Common) -> AppResult<RunConfig> {
    let mut c = RunConfig::compose(common.preset.as_deref(), common.config.as_deref())?;
    if let Some(seed) = common.seed {
        c.simulation.seed = seed;
    }
    if let Some(out) = &common.out {
        c.output.directory = out.clone();
    }
    if let Some(n) = common.grid {
        c.grid.signal_points = n;
        c.grid.idler_points = n;
    }
    c.validate()?;
    Ok(c)
}

struct Run {
    config: RunConfig,
    prov: Provenance,
    dir: PathBuf,
}

impl Run {
    fn new(common: &Common) -> AppResult<Self> {
        let config = resolve(common)?;
        let prov = Provenance {
            config_hash: config.hash(),
            seed: config.simulation.seed,
        };
        let dir = output::ensure_dir(&config.output.directory)?;
        Ok(Self { config, prov, dir })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }
}

fn build(c: &RunConfig) -> AppResult<JsaMatrix> {
    let crystal = c.crystal()?;
    let grid = c.grid(&crystal)?;
    Ok(match c.jsa.kind {
        JsaKind::Spdc => build_jsa(&grid, &c.pump()?, &crystal)?,
        JsaKind::Separable => build_separable_jsa(&grid, &c.signal_spectrum()?, &c.idler_spectrum()?)?,
    })
}

pub fn cmd_jsa(common: &Common) -> AppResult<()> {
    let run = Run::new(common)?;
    let c = &run.config;
    let crystal = c.crystal()?;
    let jsa = build(c)?;
    let grid = *jsa.grid();
    let (ns, ni) = grid.shape();
    let mut panels = vec![("jsa", jsa.intensity())];
    if c.jsa.kind == JsaKind::Spdc {
        let d = density_panels(&jsa, &c.pump()?, &crystal)?;
        panels.insert(0, ("phase_matching", d.phi));
        panels.insert(0, ("pump_envelope", d.alpha));
    }
    for (name, values) in &panels {
        output::write_density(&run.path(&format!("{name}.csv")), &run.prov, &grid, values)?;
        if c.output.svg {
            svg::heatmap(&run.path(&format!("{name}.svg")), name, ns, ni, values)?;
        }
    }
    let m = marginal_spectra(&jsa)?;
    output::write_marginals(&run.path("marginals.csv"), &run.prov, &m)?;
    println!("grid: {ns} × {ni}, θ = {:.3}°", crystal.theta_deg());
    println!("signal marginal FWHM: {:.3} nm", m.signal.fwhm_nm);
    println!("idler marginal FWHM: {:.3} nm", m.idler.fwhm_nm);
    println!("wrote {}", run.dir.display());
    Ok(())
}

pub fn cmd_schmidt(common: &Common) -> AppResult<()> {
    let run = Run::new(common)?;
    let r = schmidt_decompose(&build(&run.config)?)?;
    output::write_schmidt(&run.path("schmidt.csv"), &run.prov, r.coefficients())?;
    println!("Schmidt number K = {:.6}", r.schmidt_number());
    println!("purity γ = {:.6}", r.purity());
    for (k, l) in r.coefficients().iter().take(5).enumerate() {
        println!("λ_{k} = {l:.6e}");
    }
    Ok(())
}

pub fn cmd_hom(common: &Common) -> AppResult<()> {
    let run = Run::new(common)?;
    let c = &run.config;
    let params = c.hom_params()?;
    let curve = hom_curve(&params, &c.delays()?);
    output::write_hom_curve(&run.path("hom_curve.csv"), &run.prov, &curve)?;
    if c.output.svg {
        let x: Vec<f64> = curve.path_lengths_um().collect();
        svg::line_plot(
            &run.path("hom_curve.svg"),
            "HOM dip",
            ("path offset (µm)", "coincidence probability"),
            &x,
            &[("P", &curve.probabilities)],
        )?;
    }
    println!("x = σ_s/σ_L = {:.4}", params.ratio());
    println!("visibility V = {:.4}", visibility(params.sigma_s(), params.sigma_l()));
    match dip_fwhm(&params) {
        Ok(w) => println!("dip FWHM = {:.2} µm ({:.1} fs)", w.path_um(), w.delay * 1e15),
        Err(e) => println!("dip FWHM: {e}"),
    }
    Ok(())
}

pub fn cmd_simulate(common: &Common) -> AppResult<()> {
    let run = Run::new(common)?;
    let c = &run.config;
    let exp = c.experiment()?;
    let record = simulate_parallel(
        &exp,
        &c.delays()?,
        c.simulation.pulses_per_point,
        c.simulation.seed,
        threads_from_env()?,
    )?;
    output::write_count_record(&run.path("counts.csv"), &run.prov, &record)?;
    if c.output.svg {
        let x: Vec<f64> = record.path_lengths_um().collect();
        let triples: Vec<f64> = record.points.iter().map(|p| p.triples as f64).collect();
        let doubles: Vec<f64> = record.points.iter().map(|p| p.doubles_d1d2 as f64).collect();
        svg::line_plot(
            &run.path("counts.svg"),
            "simulated counts",
            ("path offset (µm)", "counts"),
            &x,
            &[("triples", &triples), ("doubles", &doubles)],
        )?;
    }
    println!("{} delays × {} pulses, seed {}", record.delays.len(), c.simulation.pulses_per_point, c.simulation.seed);
    println!("exact three-fold visibility: {:.4}", threefold_visibility(&exp)?);
    if c.source.statistics == Statistics::Thermal {
        println!("exact two-fold visibility: {:.4}", twofold_visibility(&exp)?);
    }
    println!("wrote {}", run.path("counts.csv").display());
    Ok(())
}

fn print_fit(r: &FitResult) -> AppResult<()> {
    let (v, dv) = visibility_from_fit(r)?;
    let e = &r.errors;
    println!("visibility V = {v:.5} ± {dv:.5}");
    println!("baseline B = {:.4} ± {:.4}", r.model.baseline, e.baseline);
    println!("center d0 = {:.3} ± {:.3} µm", r.model.center_um, e.center_um);
    println!("width w = {:.3} ± {:.3} µm", r.model.width_um, e.width_um);
    println!("FWHM = {:.3} ± {:.3} µm", r.fwhm_um(), e.fwhm_um());
    println!("reduced χ² = {:.4} (χ² = {:.3}, {} iterations)", r.reduced_chi_square, r.chi_square, r.iterations);
    Ok(())
}

pub fn cmd_fit(args: &FitArgs) -> AppResult<()> {
    let series = output::read_series(&args.input, args.column)?;
    let r = fit_dip(&series.positions_um, &series.counts)?;
    print_fit(&r)?;
    if let Some(dir) = &args.common.out {
        let prov = Provenance {
            config_hash: file_hash(&args.input)?,
            seed: output::read_seed(&args.input)?.unwrap_or(0),
        };
        let fitted = Series {
            positions_um: series.positions_um.clone(),
            counts: series.positions_um.iter().map(|d| r.model.eval(*d)).collect(),
        };
        let path = output::ensure_dir(dir)?.join("fit_curve.csv");
        output::write_series(&path, &prov, &fitted)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn file_hash(path: &Path) -> AppResult<String> {
    use sha2::{Digest, Sha256};
    let bytes = std::fs::read(path).map_err(|e| AppError::io(path, e))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// Returns whether every criterion passed.
pub fn cmd_paper(common: &Common) -> AppResult<bool> {
    let tol = Tolerances::from_env()?;
    let run = Run::new(common)?;
    let results = run_all(&tol);
    for r in &results {
        println!("{}", r.line());
    }
    let rows: Vec<_> = results.iter().map(|r| r.row()).collect();
    output::write_report(&run.path("paper_report.csv"), &run.prov, &rows)?;

    // dip curves for a range of bandwidth ratios x = σ_s/σ_L
    let delays = homsim_core::hom::delay_scan(-1.5e-12, 1.5e-12, 301);
    let sigma_l = run.config.hom_params()?.sigma_l();
    let curves = [0.5, 1.0, 1.3, 2.0]
        .into_iter()
        .map(|x| {
            let p = HomParams::new(x * sigma_l, sigma_l, 0.0)?;
            Ok((x, hom_curve(&p, &delays).probabilities))
        })
        .collect::<AppResult<Vec<_>>>()?;
    let names: Vec<String> = curves.iter().map(|(x, _)| format!("x={x}")).collect();
    let named: Vec<(&str, Vec<f64>)> = names.iter().map(String::as_str).zip(curves.iter().map(|(_, v)| v.clone())).collect();
    output::write_curves(&run.path("visibility_curves.csv"), &run.prov, &delays, &named)?;

    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed; report in {}", results.len(), run.path("paper_report.csv").display());
    Ok(passed == results.len())
}

/// Dispatches a parsed command line; returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Jsa(c) => cmd_jsa(c).map(|_| 0),
        Command::Schmidt(c) => cmd_schmidt(c).map(|_| 0),
        Command::Hom(c) => cmd_hom(c).map(|_| 0),
        Command::Simulate(c) => cmd_simulate(c).map(|_| 0),
        Command::Fit(a) => cmd_fit(a).map(|_| 0),
        Command::Paper(c) => cmd_paper(c).map(|ok| if ok { 0 } else { 1 }),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    })
}

//! Poisson-weighted Gaussian dip fitting.
//!
//! Model: `C(d) = B·[1 − V·exp(−(d − d0)²/(2w²))]` with `d` in µm. The
//! objective is `χ² = Σ (c_i − C(d_i))²/max(c_i, 1)`. It is minimized by a
//! Nelder–Mead simplex from four deterministic starts, the best vertex is
//! polished by damped Gauss–Newton steps, and standard errors come from the
//! Gauss–Newton normal matrix scaled by the reduced χ².

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by std inherent methods whenever std is in the graph
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::linalg::invert;
use crate::units::fwhm_per_sigma;

/// Minimum number of data points.
pub const MIN_POINTS: usize = 6;
/// Relative objective spread at which the simplex is considered converged.
pub const OBJECTIVE_TOLERANCE: f64 = 1e-10;
/// Simplex iterations allowed per start.
pub const MAX_ITERATIONS: usize = 20_000;

const PARAMS: usize = 4;

/// `C(d) = B·[1 − V·exp(−(d − d0)²/(2w²))]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipModel {
    pub baseline: f64,
    pub visibility: f64,
    pub center_um: f64,
    /// Gaussian standard deviation, µm.
    pub width_um: f64,
}

impl DipModel {
    pub fn from_fwhm(baseline: f64, visibility: f64, center_um: f64, fwhm_um: f64) -> Self {
        Self {
            baseline,
            visibility,
            center_um,
            width_um: fwhm_um / fwhm_per_sigma(),
        }
    }

    pub fn eval(&self, position_um: f64) -> f64 {
        let u = (position_um - self.center_um) / self.width_um;
        self.baseline * (1.0 - self.visibility * (-0.5 * u * u).exp())
    }

    pub fn fwhm_um(&self) -> f64 {
        fwhm_per_sigma() * self.width_um
    }

    fn is_admissible(&self) -> bool {
        self.baseline > 0.0
            && (0.0..=1.0).contains(&self.visibility)
            && self.width_um > 0.0
            && self.center_um.is_finite()
    }

    fn to_array(self) -> [f64; PARAMS] {
        [self.baseline, self.visibility, self.center_um, self.width_um]
    }

    fn from_array(p: [f64; PARAMS]) -> Self {
        Self {
            baseline: p[0],
            visibility: p[1],
            center_um: p[2],
            width_um: p[3],
        }
    }

    /// `∂C/∂(B, V, d0, w)` at one position.
    fn gradient(&self, position_um: f64) -> [f64; PARAMS] {
        let u = (position_um - self.center_um) / self.width_um;
        let g = (-0.5 * u * u).exp();
        let bvg = self.baseline * self.visibility * g;
        [
            1.0 - self.visibility * g,
            -self.baseline * g,
            -bvg * u / self.width_um,
            -bvg * u * u / self.width_um,
        ]
    }
}

/// One standard error per model parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterErrors {
    pub baseline: f64,
    pub visibility: f64,
    pub center_um: f64,
    pub width_um: f64,
}

impl ParameterErrors {
    fn from_array(p: [f64; PARAMS]) -> Self {
        Self {
            baseline: p[0],
            visibility: p[1],
            center_um: p[2],
            width_um: p[3],
        }
    }

    pub fn fwhm_um(&self) -> f64 {
        fwhm_per_sigma() * self.width_um
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: DipModel,
    pub errors: ParameterErrors,
    /// Parametric-bootstrap errors, when requested.
    pub bootstrap_errors: Option<ParameterErrors>,
    pub chi_square: f64,
    pub reduced_chi_square: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    pub fn fwhm_um(&self) -> f64 {
        self.model.fwhm_um()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("need at least {need} data points, got {got}")]
    TooFewPoints { got: usize, need: usize },

    #[error("no data point lies more than two estimated widths ({width_um:.3} µm) from the dip minimum")]
    InsufficientWings { width_um: f64 },

    #[error("flat data: visibility pinned to 0 ± {visibility_error:.3e} at baseline {baseline}")]
    FlatData { baseline: f64, visibility_error: f64 },

    #[error("no start converged after {iterations} iterations; best χ² = {chi_square:.6e}")]
    NonConvergence {
        best: DipModel,
        chi_square: f64,
        iterations: usize,
    },

    #[error("invalid fit data: {0}")]
    InvalidData(String),
}

/// Optional cross-checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FitOptions {
    /// Number of parametric-bootstrap resamples and their seed.
    pub bootstrap: Option<(usize, u64)>,
}

struct Data<'a> {
    x: &'a [f64],
    y: &'a [f64],
    var: Vec<f64>,
}

impl Data<'_> {
    fn chi_square(&self, m: &DipModel) -> f64 {
        if !m.is_admissible() {
            return f64::INFINITY;
        }
        self.x
            .iter()
            .zip(self.y)
            .zip(&self.var)
            .map(|((x, y), v)| {
                let r = y - m.eval(*x);
                r * r / v
            })
            .sum()
    }

    /// `JᵀWJ` and `JᵀWr` at `m`.
    fn normal_equations(&self, m: &DipModel) -> ([f64; PARAMS * PARAMS], [f64; PARAMS]) {
        let mut a = [0.0; PARAMS * PARAMS];
        let mut b = [0.0; PARAMS];
        for ((x, y), v) in self.x.iter().zip(self.y).zip(&self.var) {
            let g = m.gradient(*x);
            let r = y - m.eval(*x);
            for i in 0..PARAMS {
                b[i] += g[i] * r / v;
                for j in 0..PARAMS {
                    a[i * PARAMS + j] += g[i] * g[j] / v;
                }
            }
        }
        (a, b)
    }
}

/// Starting points from data heuristics.
struct Heuristics {
    baseline: f64,
    visibility: f64,
    center: f64,
    width: f64,
}

fn heuristics(x: &[f64], y: &[f64]) -> Heuristics {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
    // baseline: mean of points in the outer position quartiles
    let q = (n / 4).max(1);
    let outer: Vec<f64> = order[..q].iter().chain(&order[n - q..]).map(|&i| y[i]).collect();
    let baseline = (outer.iter().sum::<f64>() / outer.len() as f64).max(f64::MIN_POSITIVE);

    // minimum of the 3-point moving average, in position order
    let ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let xs: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    let smooth: Vec<f64> = (0..n)
        .map(|k| {
            let lo = k.saturating_sub(1);
            let hi = (k + 1).min(n - 1);
            ys[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();
    let kmin = (0..n).min_by(|&a, &b| smooth[a].total_cmp(&smooth[b])).unwrap_or(0);
    let depth_min = smooth[kmin];
    let visibility = ((baseline - depth_min) / baseline).clamp(0.05, 0.99);

    // half-depth crossings walking outward from the minimum
    let level = 0.5 * (baseline + depth_min);
    let mut left = kmin;
    while left > 0 && smooth[left] < level {
        left -= 1;
    }
    let mut right = kmin;
    while right + 1 < n && smooth[right] < level {
        right += 1;
    }
    let span = xs[n - 1] - xs[0];
    let mut fwhm = xs[right] - xs[left];
    if !(fwhm > 0.0) {
        fwhm = span / 4.0;
    }
    Heuristics {
        baseline,
        visibility,
        center: xs[kmin],
        width: (fwhm / fwhm_per_sigma()).max(span * 1e-3),
    }
}

struct Simplex {
    best: [f64; PARAMS],
    value: f64,
    iterations: usize,
    converged: bool,
}

fn nelder_mead(f: &dyn Fn(&[f64; PARAMS]) -> f64, start: [f64; PARAMS], step: [f64; PARAMS]) -> Simplex {
    let mut pts: Vec<([f64; PARAMS], f64)> = Vec::with_capacity(PARAMS + 1);
    pts.push((start, f(&start)));
    for i in 0..PARAMS {
        let mut p = start;
        p[i] += step[i];
        pts.push((p, f(&p)));
    }
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITERATIONS {
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (lo, hi) = (pts[0].1, pts[PARAMS].1);
        if hi - lo <= OBJECTIVE_TOLERANCE * lo.abs().max(1.0) {
            converged = true;
            break;
        }
        iterations += 1;
        let mut centroid = [0.0; PARAMS];
        for (p, _) in &pts[..PARAMS] {
            for i in 0..PARAMS {
                centroid[i] += p[i] / PARAMS as f64;
            }
        }
        let along = |t: f64| {
            let mut p = [0.0; PARAMS];
            for i in 0..PARAMS {
                p[i] = centroid[i] + t * (pts[PARAMS].0[i] - centroid[i]);
            }
            p
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < pts[0].1 {
            let xe = along(-2.0);
            let fe = f(&xe);
            pts[PARAMS] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < pts[PARAMS - 1].1 {
            pts[PARAMS] = (xr, fr);
        } else {
            let (xc, fc) = if fr < hi {
                let xc = along(-0.5);
                (xc, f(&xc))
            } else {
                let xc = along(0.5);
                (xc, f(&xc))
            };
            if fc < fr.min(hi) {
                pts[PARAMS] = (xc, fc);
            } else {
                let best = pts[0].0;
                for (p, v) in pts.iter_mut().skip(1) {
                    for i in 0..PARAMS {
                        p[i] = best[i] + 0.5 * (p[i] - best[i]);
                    }
                    *v = f(p);
                }
            }
        }
    }
    pts.sort_by(|a, b| a.1.total_cmp(&b.1));
    Simplex {
        best: pts[0].0,
        value: pts[0].1,
        iterations,
        converged,
    }
}

/// Damped Gauss–Newton refinement; never increases χ².
fn polish(data: &Data, mut m: DipModel, mut chi: f64) -> (DipModel, f64) {
    let mut lambda = 1e-6;
    for _ in 0..200 {
        let (a, b) = data.normal_equations(&m);
        let mut damped = a;
        for i in 0..PARAMS {
            damped[i * PARAMS + i] *= 1.0 + lambda;
        }
        let Some(inv) = invert(&damped, PARAMS) else {
            break;
        };
        let mut p = m.to_array();
        for i in 0..PARAMS {
            p[i] += (0..PARAMS).map(|j| inv[i * PARAMS + j] * b[j]).sum::<f64>();
        }
        let trial = DipModel::from_array(p);
        let c = data.chi_square(&trial);
        if c <= chi {
            let done = chi - c <= 1e-15 * chi.max(f64::MIN_POSITIVE);
            m = trial;
            chi = c;
            lambda = (lambda * 0.1).max(1e-12);
            if done {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e8 {
                break;
            }
        }
    }
    (m, chi)
}

fn validate(x: &[f64], y: &[f64]) -> Result<(), FitError> {
    if x.len() != y.len() {
        return Err(FitError::InvalidData(alloc::format!(
            "{} positions but {} counts",
            x.len(),
            y.len()
        )));
    }
    if x.len() < MIN_POINTS {
        return Err(FitError::TooFewPoints {
            got: x.len(),
            need: MIN_POINTS,
        });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) || y.iter().any(|v| *v < 0.0) {
        return Err(FitError::InvalidData(
            "positions must be finite and counts finite and non-negative".into(),
        ));
    }
    Ok(())
}

/// Fits the dip with default options.
pub fn fit_dip(positions_um: &[f64], counts: &[f64]) -> Result<FitResult, FitError> {
    fit_dip_with(positions_um, counts, &FitOptions::default())
}

pub fn fit_dip_with(positions_um: &[f64], counts: &[f64], options: &FitOptions) -> Result<FitResult, FitError> {
    validate(positions_um, counts)?;
    let data = Data {
        x: positions_um,
        y: counts,
        var: counts.iter().map(|c| c.max(1.0)).collect(),
    };

    if counts.iter().all(|c| *c == counts[0]) {
        // a dip spanning the whole scan is the most constraining case
        let b = counts[0];
        let info: f64 = data.var.iter().map(|v| b * b / v).sum();
        return Err(FitError::FlatData {
            baseline: b,
            visibility_error: if info > 0.0 { 1.0 / info.sqrt() } else { f64::INFINITY },
        });
    }

    let h = heuristics(positions_um, counts);
    let (xmin, xmax) = positions_um
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
    if (h.center - xmin).max(xmax - h.center) <= 2.0 * h.width {
        return Err(FitError::InsufficientWings { width_um: h.width });
    }

    let starts = [
        [h.baseline, h.visibility, h.center, h.width],
        [h.baseline, h.visibility, h.center, 2.0 * h.width],
        [h.baseline, h.visibility, h.center, 0.5 * h.width],
        [h.baseline, 0.5 * h.visibility, h.center + 0.5 * h.width, h.width],
    ];
    let objective = |p: &[f64; PARAMS]| data.chi_square(&DipModel::from_array(*p));
    let mut best: Option<Simplex> = None;
    let mut iterations = 0;
    for s in starts {
        let step = [0.1 * s[0], 0.1 * s[1].min(1.0 - s[1]).max(0.02), 0.3 * s[3], 0.2 * s[3]];
        let run = nelder_mead(&objective, s, step);
        iterations += run.iterations;
        // strict comparison keeps the earliest start on ties
        if best.as_ref().map_or(true, |b| run.value < b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    let (model, chi) = polish(&data, DipModel::from_array(best.best), best.value);
    if !best.converged {
        return Err(FitError::NonConvergence {
            best: model,
            chi_square: chi,
            iterations,
        });
    }

    let dof = (positions_um.len() - PARAMS).max(1) as f64;
    let reduced = chi / dof;
    let (a, _) = data.normal_equations(&model);
    let errors = invert(&a, PARAMS).map_or([f64::INFINITY; PARAMS], |cov| {
        core::array::from_fn(|i| (cov[i * PARAMS + i] * reduced).max(0.0).sqrt())
    });

    let bootstrap_errors = options
        .bootstrap
        .map(|(resamples, seed)| bootstrap(positions_um, &model, resamples, seed));

    Ok(FitResult {
        model,
        errors: ParameterErrors::from_array(errors),
        bootstrap_errors,
        chi_square: chi,
        reduced_chi_square: reduced,
        converged: true,
        iterations,
    })
}

/// Spread of refits to Poisson draws from the fitted model.
fn bootstrap(x: &[f64], model: &DipModel, resamples: usize, seed: u64) -> ParameterErrors {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fits: Vec<[f64; PARAMS]> = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let y: Vec<f64> = x
            .iter()
            .map(|d| {
                let mean = model.eval(*d);
                if mean > 0.0 {
                    Poisson::new(mean).map_or(0.0, |p| p.sample(&mut rng))
                } else {
                    0.0
                }
            })
            .collect();
        if let Ok(r) = fit_dip(x, &y) {
            fits.push(r.model.to_array());
        }
    }
    let n = fits.len() as f64;
    let spread = core::array::from_fn(|i| {
        if fits.len() < 2 {
            return f64::INFINITY;
        }
        let mean = fits.iter().map(|f| f[i]).sum::<f64>() / n;
        (fits.iter().map(|f| (f[i] - mean) * (f[i] - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    });
    ParameterErrors::from_array(spread)
}

/// `(V, σ_V)` of a converged fit.
pub fn visibility_from_fit(result: &FitResult) -> Result<(f64, f64), FitError> {
    if !result.converged {
        return Err(FitError::NonConvergence {
            best: result.model,
            chi_square: result.chi_square,
            iterations: result.iterations,
        });
    }
    Ok((result.model.visibility, result.errors.visibility))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn truth() -> DipModel {
        DipModel::from_fwhm(100.0, 0.894, 0.0, 50.1)
    }

    fn scan() -> Vec<f64> {
        (0..41).map(|k| -150.0 + 7.5 * k as f64).collect()
    }

    fn noiseless(m: &DipModel) -> (Vec<f64>, Vec<f64>) {
        let x = scan();
        let y = x.iter().map(|d| m.eval(*d)).collect();
        (x, y)
    }

    fn poisson_data(m: &DipModel, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = scan();
        let y = x.iter().map(|d| Poisson::new(m.eval(*d)).unwrap().sample(&mut rng)).collect();
        (x, y)
    }

    #[test]
    fn model_shape() {
        let m = truth();
        assert_relative_eq!(m.eval(0.0), 100.0 * (1.0 - 0.894));
        assert_relative_eq!(m.eval(25.05), 100.0 * (1.0 - 0.447), max_relative = 1e-12);
        assert_relative_eq!(m.fwhm_um(), 50.1, max_relative = 1e-12);
    }

    #[test]
    fn noiseless_recovery() {
        let m = truth();
        let (x, y) = noiseless(&m);
        let r = fit_dip(&x, &y).unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.model.baseline, 100.0, max_relative = 1e-6);
        assert_relative_eq!(r.model.visibility, 0.894, max_relative = 1e-6);
        assert!(r.model.center_um.abs() < 1e-6);
        assert_relative_eq!(r.fwhm_um(), 50.1, max_relative = 1e-6);
        assert_eq!(r.fwhm_um(), fwhm_per_sigma() * r.model.width_um);
        let (v, e) = visibility_from_fit(&r).unwrap();
        assert_eq!(v, r.model.visibility);
        assert!(e < 1e-6);
    }

    #[test]
    fn refit_of_own_output_is_a_fixed_point() {
        let (x, y) = noiseless(&truth());
        let first = fit_dip(&x, &y).unwrap();
        let y2: Vec<f64> = x.iter().map(|d| first.model.eval(*d)).collect();
        let second = fit_dip(&x, &y2).unwrap();
        for (a, b) in first.model.to_array().iter().zip(second.model.to_array()) {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn residuals_orthogonal_to_gradient() {
        let (x, y) = poisson_data(&DipModel::from_fwhm(300.0, 0.894, 3.0, 50.1), 11);
        let r = fit_dip(&x, &y).unwrap();
        // central-difference gradient of χ², scaled by each parameter's error
        let data = Data {
            x: &x,
            y: &y,
            var: y.iter().map(|c| c.max(1.0)).collect(),
        };
        let p = r.model.to_array();
        let e = [r.errors.baseline, r.errors.visibility, r.errors.center_um, r.errors.width_um];
        for i in 0..PARAMS {
            let h = 1e-4 * e[i];
            let (mut up, mut down) = (p, p);
            up[i] += h;
            down[i] -= h;
            let g = (data.chi_square(&DipModel::from_array(up)) - data.chi_square(&DipModel::from_array(down)))
                / (2.0 * h)
                * e[i];
            assert!(g.abs() < 1e-6, "parameter {i}: {g}");
        }
    }

    #[test]
    fn measured_like_noise_recovered_within_three_sigma() {
        // 4.8 Hz triples at the baseline over 60 s per point
        let m = DipModel::from_fwhm(4.8 * 60.0, 0.894, 0.0, 50.1);
        let (x, y) = poisson_data(&m, 2024);
        let r = fit_dip(&x, &y).unwrap();
        let (v, e) = visibility_from_fit(&r).unwrap();
        assert!((v - 0.894).abs() < 3.0 * e, "{v} ± {e}");
        assert!(e > 0.002 && e < 0.03, "{e}");
    }

    #[test]
    fn twofold_visibility_recovered() {
        let m = DipModel::from_fwhm(2000.0, 0.295, 0.0, 50.1);
        let (x, y) = poisson_data(&m, 5);
        let r = fit_dip(&x, &y).unwrap();
        assert!((r.model.visibility - 0.295).abs() < 3.0 * r.errors.visibility);
    }

    #[test]
    fn bootstrap_agrees_with_gauss_newton() {
        let m = DipModel::from_fwhm(300.0, 0.894, 0.0, 50.1);
        let (x, y) = poisson_data(&m, 3);
        let r = fit_dip_with(&x, &y, &FitOptions { bootstrap: Some((200, 9)) }).unwrap();
        let b = r.bootstrap_errors.unwrap();
        let ratio = b.visibility / r.errors.visibility;
        assert!(ratio > 0.7 && ratio < 1.4, "{ratio}");
    }

    #[test]
    fn flat_and_invalid_data() {
        let x = scan();
        let y = alloc::vec![50.0; x.len()];
        match fit_dip(&x, &y) {
            Err(FitError::FlatData { baseline, visibility_error }) => {
                assert_eq!(baseline, 50.0);
                assert!(visibility_error > 0.0 && visibility_error < 0.1);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            fit_dip(&x[..5], &y[..5]).unwrap_err(),
            FitError::TooFewPoints { got: 5, need: MIN_POINTS }
        );
        assert!(matches!(fit_dip(&x, &y[..10]), Err(FitError::InvalidData(_))));
        let mut bad = y.clone();
        bad[3] = f64::NAN;
        assert!(matches!(fit_dip(&x, &bad), Err(FitError::InvalidData(_))));
    }

    #[test]
    fn narrow_scan_rejected() {
        let m = truth();
        let x: Vec<f64> = (0..10).map(|k| -20.0 + 4.0 * k as f64).collect();
        let y: Vec<f64> = x.iter().map(|d| m.eval(*d)).collect();
        assert!(matches!(fit_dip(&x, &y), Err(FitError::InsufficientWings { .. })));
    }

    #[test]
    fn unconverged_result_rejected() {
        let (x, y) = noiseless(&truth());
        let mut r = fit_dip(&x, &y).unwrap();
        r.converged = false;
        assert!(matches!(visibility_from_fit(&r), Err(FitError::NonConvergence { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn visibility_invariant_under_count_scaling(k in 0.1f64..50.0, seed in 0u64..1000) {
            let (x, y) = poisson_data(&DipModel::from_fwhm(200.0, 0.8, 5.0, 45.0), seed);
            let scaled: Vec<f64> = y.iter().map(|c| c * k).collect();
            let a = fit_dip(&x, &y).unwrap();
            let b = fit_dip(&x, &scaled).unwrap();
            // weights max(c, 1) stop scaling exactly only near zero counts
            prop_assume!(y.iter().all(|c| *c >= 1.0) && scaled.iter().all(|c| *c >= 1.0));
            prop_assert!((a.model.visibility - b.model.visibility).abs() < 1e-9);
        }

        #[test]
        fn noiseless_recovery_across_parameters(
            b in 20.0f64..1e4, v in 0.05f64..0.99, d0 in -30.0f64..30.0, fwhm in 25.0f64..80.0,
        ) {
            let m = DipModel::from_fwhm(b, v, d0, fwhm);
            let (x, y) = noiseless(&m);
            let r = fit_dip(&x, &y).unwrap();
            prop_assert!((r.model.visibility - v).abs() < 1e-6 * v);
            prop_assert!((r.fwhm_um() - fwhm).abs() < 1e-6 * fwhm);
        }
    }
}

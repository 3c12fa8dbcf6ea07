use homsim_core::fit::{fit_dip, DipModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

#[test]
fn one_sigma_interval_covers_truth_at_nominal_rate() {
    let truth = DipModel::from_fwhm(4.8 * 60.0, 0.894, 0.0, 50.1);
    let x: Vec<f64> = (0..41).map(|k| -150.0 + 7.5 * k as f64).collect();
    let runs = 200;
    let mut covered = 0;
    for seed in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<f64> = x
            .iter()
            .map(|d| Poisson::new(truth.eval(*d)).unwrap().sample(&mut rng))
            .collect();
        let r = fit_dip(&x, &y).unwrap();
        if (r.model.visibility - truth.visibility).abs() <= r.errors.visibility {
            covered += 1;
        }
    }
    let rate = covered as f64 / runs as f64;
    println!("1σ coverage of V over {runs} datasets: {rate:.3}");
    assert!((0.60..=0.75).contains(&rate), "{rate}");
}

use homsim_core::focksim::{simulate_counts, threefold_probability, Experiment, PairStatistics, SourceConfig};
use homsim_core::hom::{delay_scan, HomParams};

#[test]
fn triples_track_exact_probability() {
    let source = SourceConfig::new(0.05, PairStatistics::SinglePair, 1.0, 0.1).unwrap();
    let exp = Experiment::new(source, HomParams::new(2.5e13, 1.9e13, 0.0).unwrap());
    let delays = delay_scan(-3e-13, 3e-13, 7);
    let pulses = 200_000u64;
    let record = simulate_counts(&exp, &delays, pulses, 42).unwrap();
    for (t, point) in delays.iter().zip(&record.points) {
        let p = threefold_probability(&exp, *t).unwrap();
        let n = pulses as f64;
        let sigma = (n * p * (1.0 - p)).sqrt();
        assert!((point.triples as f64 - n * p).abs() <= 5.0 * sigma.max(1.0));
        assert!(point.is_consistent());
    }
}

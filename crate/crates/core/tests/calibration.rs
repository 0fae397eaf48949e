mod common;

use mmray::calibration::{
    assemble_system, error_statistics, objective_db, objective_linear, solve_linear_domain, solve_log_domain,
    CalibrationSystem, ErrorDistribution, MeasurementRecord,
};
use mmray::antenna::{AntennaPattern, AntennaPose};
use mmray::geometry::Vec3;
use mmray::io::{read_environment, run_calibrate, RunConfig};
use mmray::tracer::TraceConfig;
use mmray::Error;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture_config(measurements: &str, out: &std::path::Path) -> RunConfig {
    let mut cfg = RunConfig::load(&common::fixture("calibrate.json")).unwrap();
    cfg.measurements = Some(common::fixture(measurements));
    cfg.output_dir = out.to_path_buf();
    cfg
}

#[test]
fn noiseless_fixture_recovers_table_losses() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_calibrate(&fixture_config("measurements_28ghz.csv", dir.path())).unwrap();
    let env = read_environment(&common::fixture("box_room.json")).unwrap();
    let l = &report.log.losses;
    for (name, m) in env.materials() {
        let r = l.reflection_db(name).unwrap();
        assert!((r - m.reflection_loss_db).abs() < 1e-6, "{name} reflection {r}");
        if let (Some(p), Some(truth)) = (l.penetration_db(name), m.penetration_loss_db) {
            assert!((p - truth).abs() < 1e-6, "{name} penetration {p}");
        }
    }
    assert!(!report.log.rank_deficient);
    assert!(report.log.of_db_rms < 1e-6);
    for f in ["materials.csv", "materials.txt", "residuals.csv"] {
        assert!(dir.path().join(f).exists());
    }
}

#[test]
fn noisy_fixture_shows_objective_duality() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_calibrate(&fixture_config("measurements_28ghz_noisy.csv", dir.path())).unwrap();
    assert!(r.log.of_db_rms <= r.linear.of_db_rms);
    assert!(r.linear.of_lin <= r.log_of_lin);
    let stats = r.statistics.unwrap();
    assert!((2.0..4.0).contains(&stats.std_db));
}

#[test]
fn los_only_records_have_no_unknowns() {
    let env = read_environment(&common::fixture("box_room.json")).unwrap();
    let iso = AntennaPattern::isotropic(0.0);
    let tx = Vec3::new(1.5, 5.0, 2.5);
    let records: Vec<MeasurementRecord> = [Vec3::new(6.0, 4.0, 1.5), Vec3::new(9.0, 3.0, 1.2)]
        .iter()
        .enumerate()
        .map(|(i, &rx)| MeasurementRecord {
            id: format!("los{i}"),
            tx: AntennaPose::new(tx, (rx - tx).normalized().unwrap()).unwrap(),
            rx: AntennaPose::new(rx, (tx - rx).normalized().unwrap()).unwrap(),
            tx_power_dbm: 30.0,
            measured_power_dbm: -40.0,
            frequency_ghz: 28.0,
        })
        .collect();
    let cfg = TraceConfig { tessellation_frequency: 8, max_reflections: 1, ..TraceConfig::default() };
    match assemble_system(&records, &env, &iso, &iso, &cfg, 5.0) {
        Err(Error::EmptySystem(msg)) => assert!(msg.contains("no unknowns"), "{msg}"),
        other => panic!("expected an empty system, got {other:?}"),
    }
}

fn random_system(rng: &mut ChaCha8Rng, m: usize, n: usize) -> (DMatrix<f64>, DVector<f64>) {
    loop {
        let w = DMatrix::from_fn(m, 2 * n, |_, _| rng.random_range(0..4) as f64);
        if w.clone().svd(false, false).rank(1e-9) == 2 * n {
            let a = DVector::from_fn(m, |_, _| rng.random_range(-10.0..40.0));
            return (w, a);
        }
    }
}

fn materials(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("m{i}")).collect()
}

#[test]
fn log_solution_matches_pseudoinverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let (w, a) = random_system(&mut rng, 200, 6);
        let expect = w.clone().pseudo_inverse(1e-12).unwrap() * &a;
        let sys = CalibrationSystem::from_rows(materials(6), w.clone(), a.clone()).unwrap();
        let sol = solve_log_domain(&sys).unwrap();
        let got = sol.losses.dense();
        assert!((got.clone() - expect).amax() < 1e-9);
        let normal = w.transpose() * (a - &w * got);
        assert!(normal.amax() < 1e-6);
    }
}

#[test]
fn duality_on_random_noisy_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for seed in 0..5 {
        let truth = DVector::from_fn(6, |_, _| rng.random_range(1.0..10.0));
        let w = DMatrix::from_fn(60, 6, |_, _| rng.random_range(0..3) as f64);
        let a = &w * &truth + DVector::from_fn(60, |_, _| rng.random_range(-3.0..3.0));
        let sys = CalibrationSystem::from_rows(materials(3), w, a).unwrap();
        let log = solve_log_domain(&sys).unwrap();
        let lin = solve_linear_domain(&sys, seed).unwrap();
        assert!(objective_db(&sys, &log.losses).1 <= objective_db(&sys, &lin.losses).1 + 1e-12);
        assert!(lin.of_lin <= objective_linear(&sys, &log.losses) + 1e-15);
    }
}

#[test]
fn zero_residual_duplicate_leaves_solution_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (w, a) = random_system(&mut rng, 40, 2);
    let sys = CalibrationSystem::from_rows(materials(2), w, a).unwrap();
    let first = solve_log_domain(&sys).unwrap();
    let l = first.losses.dense();
    let row = [1.0, 0.0, 2.0, 1.0];
    let fitted = DVector::from_row_slice(&row).dot(&l);
    let second = solve_log_domain(&sys.with_row("extra", &row, fitted).unwrap()).unwrap();
    assert!((second.losses.dense() - l).amax() < 1e-9);
}

#[test]
fn normal_residuals_select_normal_fit() {
    use rand_distr::{Distribution, Normal};
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let e: Vec<f64> = (0..500).map(|_| Normal::new(0.0, 3.0).unwrap().sample(&mut rng)).collect();
    let s = error_statistics(&e).unwrap();
    assert_eq!(s.best_fit, Some(ErrorDistribution::Normal));
    assert!((2.7..=3.3).contains(&s.std_db));
}

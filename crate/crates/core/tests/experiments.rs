use reflectsim::experiments::{io, run_error_experiment, run_v_study, simulate_coupled, ExperimentConfig, VCell, VStudyConfig};
use reflectsim::rectify::rectify_samples;
use reflectsim::{LevyModel, ReflectionSummary, Summation};

fn brownian_model() -> LevyModel {
    LevyModel::brownian(-0.5, 2.0).unwrap()
}

fn small_config(seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(brownian_model(), 0.3, 50, 2000, 600, seed);
    c.v_reference_draws = 2000;
    c
}

#[test]
fn zero_increments_give_zero_error() {
    for n in [1, 7, 50] {
        let p = simulate_coupled(0.3, n, n * 20, Summation::Plain, || 0.0).unwrap();
        assert_eq!(p.fine.y_n - p.coarse.y_n, 0.0);
        assert_eq!((p.coarse.switches, p.fine.switches), (0, 0));
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    let mut aggregates = Vec::new();
    for workers in [1, 3] {
        let config = ExperimentConfig { workers, ..small_config(17) };
        let report = run_error_experiment(&config).unwrap();
        let out = dir.path().join(format!("w{workers}"));
        io::write_experiment(&out, &report).unwrap();
        bytes.push(std::fs::read(out.join("records.csv")).unwrap());
        aggregates.push(report.aggregates);
    }
    assert_eq!(bytes[0], bytes[1]);
    assert_eq!(aggregates[0], aggregates[1]);
}

#[test]
fn records_round_trip_and_rectify_again() {
    let config = small_config(23);
    let report = run_error_experiment(&config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    io::write_experiment(dir.path(), &report).unwrap();

    let text = std::fs::read_to_string(dir.path().join("records.csv")).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (yc, yr, d) = (col("y_coarse"), col("y_reference"), col("delta"));
    for row in reader.records() {
        let row = row.unwrap();
        let get = |i: usize| row[i].parse::<f64>().unwrap();
        assert!((get(yr) - get(yc) - get(d)).abs() < 1e-12);
    }

    let rows = io::read_outcomes(dir.path().join("outcomes.csv")).unwrap();
    let summaries: Vec<ReflectionSummary> = rows.iter().map(|r| r.summary()).collect();
    let again = rectify_samples(&summaries, &config.model, config.n, &config.sampler(), config.policy, config.seed, 0)
        .unwrap();
    let expected: Vec<f64> = report.records.iter().map(|r| r.rectified).collect();
    assert_eq!(again.values, expected);

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["provenance"]["seed"], 23);
    assert_eq!(json["config"]["n"], 50);
}

#[test]
fn coarse_terminal_sums_match_the_fine_ones() {
    let report = run_error_experiment(&small_config(29)).unwrap();
    assert!(report.aggregates.coupling_max_abs_difference < 1e-12);
    for r in &report.records {
        assert!((r.x_coarse - r.x_fine).abs() < 1e-12);
    }
}

#[test]
fn barrier_disagreement_shrinks_with_n() {
    // same seed and fine resolution, so every run sees the same fine paths
    let mut previous = f64::INFINITY;
    for n in [50, 100, 400, 1000] {
        let mut config = ExperimentConfig::new(brownian_model(), 0.3, n, 20_000, 2000, 31);
        config.v_reference_draws = 100;
        let report = run_error_experiment(&config).unwrap();
        let d = report.aggregates.disagreement;
        assert!(d < previous, "n = {n}: {d} vs {previous}");
        previous = d;
    }
}

#[test]
fn brownian_cell_mean_matches_the_closed_form() {
    let config = VStudyConfig::new(vec![VCell { alpha: 2.0, beta: 0.0 }], 10_000, 37);
    let report = run_v_study(&config).unwrap();
    let m = report.cells[0].moments.unwrap();
    assert!((m.expected_v - 0.58258).abs() < 2e-5);
    assert!((m.mc_mean - m.expected_v).abs() < 3.0 * m.standard_error, "{m:?}");
    let area = report.cells[0].density.integral();
    assert!((area - 1.0).abs() < 0.01, "{area}");
}

#[test]
fn config_files_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    std::fs::write(
        &path,
        "x0 = 0.3\nn = 10\nn_fine = 100\nreplications = 5\n[model]\nkind = \"stable\"\nalpha = 1.5\nbeta = 0.2\n",
    )
    .unwrap();
    let c = ExperimentConfig::load(&path).unwrap();
    assert_eq!(c.model, LevyModel::StrictlyStable { alpha: 1.5, beta: 0.2, scale: 1.0 });
    assert!(run_error_experiment(&c).is_ok());
}

#[test]
fn shipped_configs_validate() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let c = ExperimentConfig::load(dir.join("brownian.toml")).unwrap();
    assert_eq!((c.n, c.n_fine, c.replications), (100, 10_000, 20_000));
    let v = VStudyConfig::load(dir.join("v_study.toml")).unwrap();
    assert_eq!(v.cells.len(), 5);
}

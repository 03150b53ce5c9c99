use std::path::Path;
use std::process::{Command, Output};

fn rpnn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rpnn")).args(args).output().expect("spawn rpnn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(out: &str, name: &str) -> String {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{name}: ")))
        .unwrap_or_else(|| panic!("no '{name}' in\n{out}"))
        .to_owned()
}

fn fit_model(dir: &Path, extra: &[&str]) -> (String, String) {
    let model = dir.join("m.json");
    let mut args = vec!["fit", "--function", "f1", "--k", "10", "--strategy", "informed", "--N", "100", "--solver", "cod"];
    args.extend_from_slice(extra);
    args.extend_from_slice(&["--output", model.to_str().unwrap()]);
    let o = rpnn(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(model.exists());
    (stdout(&o), model.to_str().unwrap().to_owned())
}

#[test]
fn fit_smoke_prints_seed_and_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let (out, _) = fit_model(dir.path(), &["--seed", "11"]);
    assert_eq!(field(&out, "seed"), "11");
    assert!(field(&out, "tolerance").ends_with("(auto)"));
    let l2: f64 = field(&out, "l2_error").parse().unwrap();
    assert!(l2 < 1e-6, "{l2}");
}

#[test]
fn fit_then_eval_at_the_zero_of_f1() {
    let dir = tempfile::tempdir().unwrap();
    let (out, model) = fit_model(dir.path(), &[]);
    let max_err: f64 = field(&out, "max_error").parse().unwrap();
    let o = rpnn(&["eval", "--model", &model, "--x", &format!("{}", 4.0 / 9.0)]);
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!(v.abs() <= max_err, "{v} vs {max_err}");
}

#[test]
fn eval_matches_in_memory_model_to_the_last_digit() {
    let dir = tempfile::tempdir().unwrap();
    let (_, model) = fit_model(dir.path(), &[]);
    let m = rpnn::RpnnModel::from_json(&std::fs::read_to_string(&model).unwrap()).unwrap();
    let xs = [0.0, 0.123, 0.5, 0.987654321, 1.0];
    let list: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    let o = rpnn(&["eval", "--model", &model, "--x", &list.join(",")]);
    let lines: Vec<f64> = stdout(&o).lines().map(|l| l.parse().unwrap()).collect();
    for (x, v) in xs.iter().zip(&lines) {
        assert_eq!(*v, m.evaluate(*x).unwrap(), "x = {x}");
    }
}

#[test]
fn eval_batch_and_out_of_domain_warning() {
    let dir = tempfile::tempdir().unwrap();
    let (_, model) = fit_model(dir.path(), &[]);
    let batch = dir.path().join("xs.txt");
    let text: String = (0..100).map(|i| format!("{}\n", i as f64 / 99.0)).collect();
    std::fs::write(&batch, text).unwrap();
    let o = rpnn(&["eval", "--model", &model, "--batch", batch.to_str().unwrap()]);
    assert_eq!(stdout(&o).lines().count(), 100);

    let o = rpnn(&["eval", "--model", &model, "--x", "1.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert!(stdout(&o).trim().parse::<f64>().unwrap().is_finite());
}

#[test]
fn usage_errors_exit_2() {
    let o = rpnn(&["fit", "--strategy", "clever", "--N", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = rpnn(&["fit", "--N", "5", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"alphas\": [1.0]").unwrap();
    let o = rpnn(&["eval", "--model", bad.to_str().unwrap(), "--x", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_1() {
    // f4 with eps = 1e-300 overflows at x = 1.
    let o = rpnn(&["bench", "--function", "f4", "--eps", "1e-300", "--x", "1"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sweep_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(
        &cfg,
        "neurons = [5, 10]\ntrials = 3\nseed = 5\n[function]\nid = \"f2\"\nk = 1\n",
    )
    .unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_rpnn"))
            .env("RPNN_THREADS", threads)
            .args(["sweep", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(field(&stdout(&o), "seed"), "5");
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv", "1");
    assert_eq!(a, run("b.csv", "4"));
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 2 * 3 + 2 * 2);
}

#[test]
fn sweep_writes_plot_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(&cfg, "neurons = [5]\ntrials = 2\nstrategies = [\"naive\"]\n[function]\nid = \"f1\"\nk = 10\n").unwrap();
    let plot = dir.path().join("p.py");
    let summary = dir.path().join("s.csv");
    let o = rpnn(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    // CSV on stdout, metadata on stderr
    assert!(stdout(&o).starts_with(rpnn::harness::CSV_HEADER));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed: 0"));
    assert!(std::fs::read_to_string(plot).unwrap().contains("matplotlib"));
    assert!(std::fs::read_to_string(summary).unwrap().contains("geometric_mean"));
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_rpnn"))
        .env("RPNN_THREADS", "many")
        .args(["bench", "--x", "0.5"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tolsweep_shape() {
    let o = rpnn(&["tolsweep", "--N", "20", "--trials", "1", "--tolerances", "1e-8"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 3);
    assert!(out.contains(",svd:1e-8,") && out.contains(",cod_abs:1e-8,"));
}

#[test]
fn theorem_subcommands() {
    let o = rpnn(&["theorem", "interp", "--N", "5", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("N=5: 10/10"), "{}", stdout(&o));
    let o = rpnn(&["theorem", "mimic", "--function", "f2", "--degrees", "2,3", "--draws", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("n=")).count(), 2);
}

#[test]
fn bench_values_and_grid() {
    let o = rpnn(&["bench", "--function", "f1", "--k", "10", "--x", "1"]);
    let line = stdout(&o);
    let v: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert_eq!(v, (50.0f64 / 9.0).atan());
    let o = rpnn(&["bench", "--function", "f3", "--grid", "5"]);
    assert_eq!(stdout(&o).lines().count(), 5);
}

#[test]
fn negative_abscissa_lists() {
    let o = rpnn(&["bench", "--function", "f3", "--x", "-0.5,0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Vec<f64> = stdout(&o).lines().map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(v[0], -v[1]);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let sweep = rpnn::harness::SweepConfig::load(&dir.join("f1_convergence.toml")).unwrap();
    assert_eq!(sweep, rpnn::harness::SweepConfig { output: sweep.output.clone(), ..rpnn::harness::SweepConfig::new(rpnn::benchmarks::FunctionSpec::F1 { k: 10.0 }) });
    let text = std::fs::read_to_string(dir.join("f1_tolerance.toml")).unwrap();
    let tol = rpnn::harness::ToleranceSweepConfig::from_toml(&text).unwrap();
    assert_eq!(tol.neurons, 400);
}

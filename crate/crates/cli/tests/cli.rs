use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_ncrelay");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn records(csv_text: &str) -> Vec<HashMap<String, String>> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    r.records()
        .map(|rec| {
            header
                .iter()
                .cloned()
                .zip(rec.unwrap().iter().map(String::from))
                .collect()
        })
        .collect()
}

fn num(row: &HashMap<String, String>, col: &str) -> f64 {
    row[col].parse().unwrap_or_else(|_| panic!("{col} = {:?}", row[col]))
}

const CHANNEL: [&str; 6] = ["--psd", "0.5", "--psr", "0.8", "--prd", "0.8"];

fn eval(extra: &[&str]) -> Vec<HashMap<String, String>> {
    let mut args = vec!["eval"];
    args.extend_from_slice(extra);
    records(&run_ok(&args))
}

#[test]
fn eval_arq_point() {
    let rows = eval(&[&["--scheme", "relay-only", "--n", "1", "--alpha", "1"][..], &CHANNEL].concat());
    assert_eq!(rows.len(), 1);
    assert_eq!(num(&rows[0], "t_per_packet"), 2.0);
    assert_eq!(rows[0]["sim_mean_T"], "");
}

#[test]
fn eval_both_on_perfect_direct_link() {
    let rows = eval(&["--scheme", "both", "--psd", "1", "--psr", "0.8", "--prd", "0.8"]);
    assert_eq!(num(&rows[0], "throughput"), 1.0);
    assert_eq!(num(&rows[0], "alpha"), 1.0);
}

#[test]
fn eval_reports_source_state_count() {
    let rows = eval(
        &[
            &["--scheme", "source-only", "--n", "2", "--x", "2", "--alpha", "0.5"][..],
            &CHANNEL,
        ]
        .concat(),
    );
    assert_eq!(rows[0]["state_count"], "15");
    assert_eq!(rows[0]["x"], "2");
}

#[test]
fn optimize_curve_contains_optimum() {
    let args = [
        &[
            "optimize",
            "--scheme",
            "relay-only",
            "--n",
            "2",
            "--curve",
            "--grid-points",
            "101",
        ][..],
        &CHANNEL,
    ]
    .concat();
    let rows = records(&run_ok(&args));
    assert_eq!(rows.len(), 102);
    let best = rows[..101]
        .iter()
        .map(|r| num(r, "t_total"))
        .fold(f64::INFINITY, f64::min);
    let opt = rows.last().unwrap();
    assert_eq!(opt["curve_label"], "optimum");
    assert!(num(opt, "t_total") <= best + 1e-12);
}

#[test]
fn exit_codes() {
    let bad = run(&[
        "eval",
        "--scheme",
        "relay-only",
        "--alpha",
        "1",
        "--psd",
        "1.5",
        "--psr",
        "0.8",
        "--prd",
        "0.8",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("p_sd"));

    assert_eq!(
        run(&["eval", "--scheme", "relay-only", "--psd", "0.5"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["bogus"]).status.code(), Some(2));

    // The relay never speaks and the sink cannot collect both packets.
    let stuck = run(&[
        &["eval", "--scheme", "relay-only", "--n", "2", "--alpha", "0"][..],
        &CHANNEL,
    ]
    .concat());
    assert_eq!(stuck.status.code(), Some(3));

    let capped = [
        "simulate",
        "--scheme",
        "relay-only",
        "--n",
        "2",
        "--alpha",
        "0.5",
        "--max-slots",
        "2",
        "--trials",
        "100",
    ];
    let weak = ["--psd", "0.1", "--psr", "0.1", "--prd", "0.1"];
    assert_eq!(run(&[&capped[..], &weak].concat()).status.code(), Some(4));
    let dropped = records(&run_ok(&[&capped[..], &CHANNEL, &["--allow-truncation"]].concat()));
    assert!(num(&dropped[0], "sim_mean_T") <= 2.0);

    // A cap below the generation size is a configuration error.
    let below = run(&[&capped[..6], &["--max-slots", "1"], &CHANNEL].concat());
    assert_eq!(below.status.code(), Some(2));
}

#[test]
fn simulate_fills_sim_columns() {
    let args = [
        &[
            "simulate",
            "--scheme",
            "source-only",
            "--n",
            "2",
            "--alpha",
            "0.6",
            "--trials",
            "20000",
            "--seed",
            "7",
        ][..],
        &CHANNEL,
    ]
    .concat();
    let row = &records(&run_ok(&args))[0];
    let (mean, se, exact) = (num(row, "sim_mean_T"), num(row, "sim_stderr_T"), num(row, "t_total"));
    assert!((mean - exact).abs() <= 3.0 * se, "{mean} ± {se} vs {exact}");
    assert_eq!(run_ok(&args), run_ok(&args));
}

fn write_spec(dir: &Path, text: &str) -> String {
    let path = dir.join("spec.txt");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn sweep(dir: &Path, text: &str, threads: &str) -> (String, String) {
    let spec = write_spec(dir, text);
    let out = dir.join("out.csv");
    let res = Command::new(BIN)
        .args(["sweep", &spec, "--out", out.to_str().unwrap()])
        .env("NCRELAY_THREADS", threads)
        .output()
        .unwrap();
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let manifest = fs::read_to_string(dir.join("out.csv.manifest")).unwrap();
    (fs::read_to_string(out).unwrap(), manifest)
}

#[test]
fn single_point_sweep_matches_eval() {
    let dir = tempfile::tempdir().unwrap();
    let text = "scheme = source-only\nn = 3\nx = 2\nalpha = 0.55\npsd = 0.5\npsr = 0.8\nprd = 0.8\n";
    let (csv_text, manifest) = sweep(dir.path(), text, "2");
    let single = run_ok(
        &[
            &[
                "eval",
                "--scheme",
                "source-only",
                "--n",
                "3",
                "--x",
                "2",
                "--alpha",
                "0.55",
            ][..],
            &CHANNEL,
        ]
        .concat(),
    );
    assert_eq!(csv_text, single);
    assert!(manifest.contains("points = 1\n"), "{manifest}");
    assert!(manifest.contains("seed = none\n"));
    assert!(manifest
        .lines()
        .any(|l| l.starts_with("spec_sha256 = ") && l.len() == "spec_sha256 = ".len() + 64));
    assert!(manifest.lines().any(|l| l.starts_with("timestamp = ")));
    assert!(manifest.contains(&format!("version = {}\n", env!("CARGO_PKG_VERSION"))));
}

#[test]
fn alpha_sweep_argmin_matches_optimizer() {
    let dir = tempfile::tempdir().unwrap();
    let text = "scheme = relay-only\nn = 2\nalpha = 0:1:0.005\npsd = 0.5\npsr = 0.8\nprd = 0.8\n";
    let rows = records(&sweep(dir.path(), text, "4").0);
    assert_eq!(rows.len(), 201);
    let best = rows
        .iter()
        .min_by(|a, b| num(a, "t_total").total_cmp(&num(b, "t_total")))
        .unwrap();
    let opt = &records(&run_ok(
        &[&["optimize", "--scheme", "relay-only", "--n", "2"][..], &CHANNEL].concat(),
    ))[0];
    assert!((num(best, "alpha") - num(opt, "alpha")).abs() <= 0.005);
    assert!(num(opt, "t_total") <= num(best, "t_total") + 1e-12);
    assert_eq!(rows[0]["solver_path"], "none");
}

#[test]
fn sweep_output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let text = "scheme = relay-only, source-only\nn = 1, 2\nx = 1:2:1\nalpha = 0.3, 0.7\npsd = 0.2, 0.6\npsr = 0.8\nprd = 0.7\n\
                simulate = true\ntrials = 2000\nseed = 11\n";
    let (a, manifest) = sweep(dir.path(), text, "1");
    let (b, _) = sweep(dir.path(), text, "4");
    assert_eq!(a, b);
    assert!(manifest.contains("seed = 11\n"));
    // relay: 2 n x 2 alpha x 2 psd; source: (1 + 2) x 2 x 2.
    assert_eq!(records(&a).len(), 8 + 12);
}

#[test]
fn sweep_simulation_agrees_with_source_chain() {
    let dir = tempfile::tempdir().unwrap();
    let text = "scheme = source-only\nn = 2\nx = 2\nalpha = 0.6\npsd = 0.3\npsr = 0.8\nprd = 0.8\nsimulate = true\ntrials = 100000\nseed = 3\n";
    let row = &records(&sweep(dir.path(), text, "4").0)[0];
    for (sim, se, exact) in [
        ("sim_mean_T", "sim_stderr_T", "t_total"),
        ("sim_mean_E", "sim_stderr_E", "e_total"),
    ] {
        let (m, s, e) = (num(row, sim), num(row, se), num(row, exact));
        assert!((m - e).abs() <= 3.0 * s, "{sim}: {m} ± {s} vs {e}");
    }
}

#[test]
fn sweep_lists_offending_keys() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "scheme = both\nflux = 3\npsd = 0.5\npsr = 0.8\nprd = 0.8\nalpah = 0.5\n",
    );
    let out = dir.path().join("out.csv");
    let res = run(&["sweep", &spec, "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("flux") && err.contains("alpah"), "{err}");
    assert!(!out.exists());
}

#[test]
fn sweep_cap_from_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "scheme = both\nalpha = 0.1:1:0.1\npsd = 0.5\npsr = 0.8\nprd = 0.8\n",
    );
    let out = dir.path().join("out.csv");
    let res = run(&["sweep", &spec, "--out", out.to_str().unwrap(), "--max-points", "5"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("10 points"));
}

#[test]
fn figure_has_legend_labels() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig.csv");
    run_ok(&["figure", "fig4-source-T", "--out", out.to_str().unwrap()]);
    let rows = records(&fs::read_to_string(&out).unwrap());
    let mut labels: Vec<&str> = rows.iter().map(|r| r["curve_label"].as_str()).collect();
    labels.dedup();
    assert!(labels.contains(&"n=10, x=3"));
    assert!(labels.contains(&"n=10, x=3 optimum"));
    assert!(rows.iter().all(|r| r["p_sd"] == "0.25" && r["scheme"] == "source-only"));

    let bad = run(&["figure", "fig99", "--out", out.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn energy_figure_uses_energy_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let (t_out, e_out) = (dir.path().join("t.csv"), dir.path().join("e.csv"));
    run_ok(&[
        "figure",
        "fig8-energy",
        "--out",
        t_out.to_str().unwrap(),
        "--psd-step",
        "0.25",
    ]);
    run_ok(&[
        "figure",
        "fig10-11-energy-opt",
        "--out",
        e_out.to_str().unwrap(),
        "--psd-step",
        "0.25",
    ]);
    let t_rows = records(&fs::read_to_string(t_out).unwrap());
    let e_rows = records(&fs::read_to_string(e_out).unwrap());
    assert_eq!(t_rows.len(), 16);
    for (t, e) in t_rows.iter().zip(&e_rows) {
        assert_eq!(t["curve_label"], e["curve_label"]);
        assert!(num(e, "e_total") <= num(t, "e_total") + 1e-9, "{t:?} vs {e:?}");
    }
}

use std::fs;
use std::path::Path;

use proptest::prelude::*;

use nodal_lab::cli::{run, ExperimentConfig};

fn nodal_lab(out: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["nodal-lab".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.push("--out".into());
    argv.push(out.display().to_string());
    run(argv)
}

fn csvs(dir: &Path) -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn sphere_modes_at_zero_is_the_constant() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(nodal_lab(d.path(), &["modes", "--surface", "sphere", "--lambda-max", "0"]), 0);
    let text = fs::read_to_string(d.path().join("modes.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["surface,variant,k1,k2|N|m,n,parity,lambda,lambda_sq", "sphere,real,,0,0,,0,0"]);
}

#[test]
fn torus_nodal_length_per_frequency() {
    let d = tempfile::tempdir().unwrap();
    let args = ["nodal", "--surface", "torus", "--k", "3,4", "--grid", "512", "--format", "json"];
    assert_eq!(nodal_lab(d.path(), &args), 0);
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.path().join("nodal_summary.json")).unwrap()).unwrap();
    let r = s["length/lambda"].as_f64().unwrap();
    assert!((r - std::f64::consts::FRAC_1_PI).abs() <= 0.003, "{r}");
}

#[test]
fn neumann_boundary_counts_stay_below_two_lambda() {
    let d = tempfile::tempdir().unwrap();
    let args = ["boundary-count", "--surface", "disc", "--bc", "neumann", "--lambda-max", "40"];
    assert_eq!(nodal_lab(d.path(), &args), 0);
    let mut rdr = csv::Reader::from_path(d.path().join("boundary-count.csv")).unwrap();
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let (lambda, m, zeros): (f64, usize, usize) = (rec[0].parse().unwrap(), rec[1].parse().unwrap(), rec[4].parse().unwrap());
        assert_eq!(zeros, 2 * m);
        assert!(zeros as f64 <= 2.0 * lambda.max(1e-300));
        rows += 1;
    }
    assert!(rows > 100);
}

#[test]
fn reruns_reproduce_csv_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let runs: [&[&str]; 4] = [
        &["cx-zeros", "--surface", "sphere", "--N", "7", "--m", "-3"],
        &["domains", "--surface", "disc", "--m", "2", "--N", "3"],
        &["calibrate-smallball", "--surface", "torus", "--lambda-max", "15", "--trials", "8", "--seed", "5"],
        &["kuznecov", "--surface", "sphere", "--lambda-max", "20"],
    ];
    for args in runs {
        assert_eq!(nodal_lab(a.path(), args), 0);
    }
    for (i, args) in runs.iter().enumerate() {
        let mut with_threads = args.to_vec();
        with_threads.extend(["--threads", if i % 2 == 0 { "1" } else { "3" }]);
        assert_eq!(nodal_lab(b.path(), &with_threads), 0);
    }
    let (ca, cb) = (csvs(a.path()), csvs(b.path()));
    assert!(ca.len() >= 5);
    assert_eq!(ca, cb);
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(nodal_lab(d.path(), &["nodal", "--grid", "2"]), 2);
    assert_eq!(nodal_lab(d.path(), &["frobnicate"]), 2);
    assert_eq!(nodal_lab(d.path(), &["nodal", "--surface", "klein"]), 2);
    assert_eq!(nodal_lab(d.path(), &["cx-zeros", "--surface", "disc"]), 2);
    let cfg = d.path().join("bad.cfg");
    fs::write(&cfg, "surface = torus\nresolution = 64\n").unwrap();
    assert_eq!(nodal_lab(d.path(), &["nodal", "--config", cfg.to_str().unwrap()]), 2);
    // A = 0.05 is far below the calibrated constant, so balls miss the nodal set
    let small = ["calibrate-smallball", "--lambda-max", "12", "--a", "0.05", "--trials", "8"];
    assert_eq!(nodal_lab(d.path(), &small), 1);
    assert!(fs::read_to_string(d.path().join("calibrate-smallball_empty.csv")).unwrap().lines().count() > 1);
}

#[test]
fn flags_override_the_config_file() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.cfg");
    fs::write(&cfg, "experiment = modes\nsurface = torus\nlambda_max = 100\n").unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(nodal_lab(d.path(), &["modes", "--config", c, "--lambda-max", "6.3"]), 0);
    // 2π·1 ≤ 6.3: the constant and the cos/sin pairs of (1,0), (0,1)
    let n = fs::read_to_string(d.path().join("modes.csv")).unwrap().lines().count() - 1;
    assert_eq!(n, 5);
    assert_eq!(nodal_lab(d.path(), &["weyl", "--config", c]), 2);
}

fn config_strategy() -> impl Strategy<Value = ExperimentConfig> {
    let surface = prop_oneof![Just("torus"), Just("sphere"), Just("disc")];
    (
        proptest::option::of(surface),
        proptest::option::of((-50i32..50, -50i32..50)),
        proptest::option::of(0u32..400),
        proptest::option::of(-400i32..400),
        proptest::option::of(16usize..4096),
        proptest::option::of(0.0f64..2000.0),
        proptest::option::of(1e-6f64..0.4),
        proptest::option::of(any::<u64>()),
        proptest::option::of("[a-z][a-z0-9_/]{0,12}"),
        proptest::option::of(proptest::sample::subsequence(vec!["csv", "json", "svg"], 1..=3)),
        proptest::option::of(prop_oneof![Just("dirichlet"), Just("neumann")]),
    )
        .prop_map(|(s, k, n, m, grid, lmax, eps, seed, out, fmt, bc)| {
            let mut c = ExperimentConfig::default();
            let mut set = |key: &str, v: Option<String>| {
                if let Some(v) = v {
                    c.set(key, &v).unwrap();
                }
            };
            set("surface", s.map(str::to_string));
            set("k", k.map(|(a, b)| format!("{a},{b}")));
            set("N", n.map(|x| x.to_string()));
            set("m", m.map(|x| x.to_string()));
            set("grid", grid.map(|x| x.to_string()));
            set("lambda_max", lmax.map(|x| x.to_string()));
            set("eps", eps.map(|x| x.to_string()));
            set("seed", seed.map(|x| x.to_string()));
            set("out", out);
            set("format", fmt.map(|f| f.join(",")));
            set("bc", bc.map(str::to_string));
            c
        })
}

proptest! {
    #[test]
    fn config_round_trip_is_the_identity(c in config_strategy()) {
        let text = c.serialize();
        let back = ExperimentConfig::parse(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.serialize(), text);
    }

    #[test]
    fn unknown_keys_are_rejected(key in "[a-z_]{1,12}") {
        prop_assume!(!nodal_lab::cli::config::KEYS.contains(&key.as_str()));
        let text = format!("{key} = 1\n");
        prop_assert!(ExperimentConfig::parse(&text).is_err());
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use whlab::harness::{run_config, ExperimentConfig};

const MI_N6: &str = r#"experiment = "mi-curve"
N = 6
q = 4
J = 1.0
beta = 2.0
mu = 0.3
interaction = "V"

[ensemble]
master_seed = 42
count = 2

[grid]
t = { start = 0.0, stop = 2.0, count = 5 }
"#;

fn whlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_whlab"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn data_rows(csv_path: &Path) -> Vec<csv::StringRecord> {
    let text = fs::read_to_string(csv_path).unwrap();
    assert!(text.starts_with("# whlab "));
    let body: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
    csv::Reader::from_reader(body.as_bytes()).records().map(|r| r.unwrap()).collect()
}

#[test]
fn mi_curve_row_count_and_means() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_toml(MI_N6).unwrap();
    let art = run_config(&cfg, dir.path()).unwrap();
    assert_eq!(art.dir, dir.path().join("mi-curve").join(&art.hash));
    let rows = data_rows(&art.dir.join("series.csv"));
    assert_eq!(rows.len(), 2 * 5 * 2);

    // summary means are plain arithmetic means of the member rows
    let means: Vec<f64> = serde_json::from_value(art.summary["mean_i_rt_neg_mu"].clone()).unwrap();
    for (i, m) in means.iter().enumerate() {
        let t = 0.5 * i as f64;
        let xs: Vec<f64> = rows
            .iter()
            .filter(|r| r[2].parse::<f64>().unwrap() == t && r[3].parse::<f64>().unwrap() < 0.0)
            .map(|r| r[4].parse().unwrap())
            .collect();
        assert_eq!(xs.len(), 2);
        assert!((xs.iter().sum::<f64>() / 2.0 - m).abs() < 1e-15);
    }
    for f in ["summary.json", "config.resolved.toml"] {
        assert!(art.dir.join(f).exists(), "{f}");
    }
    let resolved = fs::read_to_string(art.dir.join("config.resolved.toml")).unwrap();
    assert_eq!(ExperimentConfig::from_toml(&resolved).unwrap().hash().unwrap(), art.hash);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "mi.toml", MI_N6);
    let mut outputs = Vec::new();
    for (k, threads) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("run{k}"));
        let st = whlab()
            .args(["mi-curve", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .args(["--threads", threads])
            .output()
            .unwrap();
        assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
        let printed = PathBuf::from(String::from_utf8(st.stdout).unwrap().trim());
        outputs.push((
            fs::read(printed.join("series.csv")).unwrap(),
            fs::read(printed.join("summary.json")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn seed_override_changes_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "mi.toml", MI_N6);
    let run = |seed: &str| {
        let st = whlab()
            .args(["mi-curve", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.path().join("out"))
            .args(["--seed", seed])
            .output()
            .unwrap();
        assert!(st.status.success());
        String::from_utf8(st.stdout).unwrap()
    };
    assert_ne!(run("1"), run("2"));
}

#[test]
fn missing_n_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", &MI_N6.replace("N = 6\n", ""));
    let st = whlab().args(["mi-curve", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    let err = String::from_utf8_lossy(&st.stderr);
    assert!(err.contains("`N`"), "{err}");
}

#[test]
fn bad_grid_and_wrong_experiment_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "g.toml", &MI_N6.replace("t = { start = 0.0, stop = 2.0, count = 5 }", "t = [0.0, 0.0]"));
    let st = whlab().args(["mi-curve", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&st.stderr).contains("grid.t"));

    let ok = write_config(dir.path(), "ok.toml", MI_N6);
    let st = whlab().args(["warmup", "--config"]).arg(&ok).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn unwritable_output_leaves_nothing_behind() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = ExperimentConfig::from_toml(MI_N6).unwrap();
    assert!(run_config(&cfg, &blocker).is_err());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn list_and_missing_config() {
    let st = whlab().arg("list").output().unwrap();
    assert!(st.status.success());
    assert_eq!(String::from_utf8(st.stdout).unwrap().lines().count(), 13);
    let st = whlab().arg("warmup").output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&st.stderr).contains("--config"));
}

#[test]
fn print_default_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let st = whlab().args(["warmup", "--print-default"]).output().unwrap();
    assert!(st.status.success());
    let cfg = write_config(dir.path(), "w.toml", &String::from_utf8(st.stdout).unwrap());
    let st = whlab().args(["warmup", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let out = PathBuf::from(String::from_utf8(st.stdout).unwrap().trim());
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert!(summary["results"]["max_rho_deviation_from_closed_form"].as_f64().unwrap() < 1e-10);
    assert!(summary["scale_note"].as_str().unwrap().contains("N = 4"));
}

#[test]
fn small_runs_of_every_experiment() {
    // shrink each registry default to a few seconds and check the row contract
    let dir = tempfile::tempdir().unwrap();
    let shrink = |text: &str| -> String {
        let mut cfg: toml::Table = toml::from_str(text).unwrap();
        let exp = cfg["experiment"].as_str().unwrap().to_string();
        let n = match exp.as_str() {
            "twopoint" => 8,
            _ => 6,
        };
        cfg.insert("N".into(), n.into());
        cfg["ensemble"].as_table_mut().unwrap().insert("count".into(), 2.into());
        let grid = cfg["grid"].as_table_mut().unwrap();
        for (k, v) in grid.iter_mut() {
            let vals: Vec<f64> = match k.as_str() {
                "beta" if exp == "lyapunov" => vec![1.0, 4.0],
                "beta" => vec![0.5, 1.0, 2.0, 4.0],
                "mu" if exp.starts_with("eternal") => vec![0.05, 0.1, 0.15, 0.2, 0.4],
                "mu" => vec![0.0, 0.5],
                "t" if exp == "lyapunov" => (0..=12).map(|i| 0.5 * i as f64).collect(),
                "t0" => vec![1.5, 2.0],
                "t1" => vec![1.5, 2.0, 2.5],
                "tau" => vec![0.25, 0.5],
                _ => vec![0.5, 1.0, 1.5],
            };
            *v = toml::Value::Array(vals.into_iter().map(toml::Value::Float).collect());
        }
        if exp == "lyapunov" {
            cfg.insert("fit_window".into(), toml::Value::Array(vec![1.0.into(), 6.0.into()]));
        }
        if exp == "eternal-vb" {
            cfg.insert("fit_mu_max".into(), 0.3.into());
        }
        toml::to_string(&cfg).unwrap()
    };
    for e in whlab::harness::experiment_registry() {
        let cfg = ExperimentConfig::from_toml(&shrink(e.default_config)).unwrap();
        let art = run_config(&cfg, dir.path()).unwrap_or_else(|err| panic!("{}: {err}", e.name));
        let rows = data_rows(&art.dir.join("series.csv")).len();
        let g = |name: &str| cfg.grid(name).map(|v| v.len()).unwrap_or(0);
        let expected = match e.name {
            "mi-curve" | "tripartite" | "otoc" => 2 * g("t") * 2,
            "warmup" => 2 * g("mu"),
            "winding" => 2 * g("t") * 3 * (cfg.n + 1),
            "winding-summary" => 2 * g("t"),
            "lyapunov" => g("beta") * 2 * g("t"),
            "eternal" | "eternal-vb" => 2 * g("mu"),
            "causal" => g("t0") * g("t1"),
            "classical" => 2 * g("t") * 2 * (1 + (1 << (cfg.n / 2))),
            "pg-compare" => 2 * 2 * g("t1") * 2,
            "twopoint" => 2 * g("tau"),
            other => panic!("no row contract for {other}"),
        };
        assert_eq!(rows, expected, "{}", e.name);
    }
}

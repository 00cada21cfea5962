use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rarefaction"));
    c.env_remove("OUTPUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}\nstdout: {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn read(p: impl AsRef<Path>) -> Vec<u8> {
    std::fs::read(p).unwrap()
}

#[test]
fn solve1d_from_flags() {
    let d = tempfile::tempdir().unwrap();
    let o = d.path().to_str().unwrap();
    let out = run(&["solve1d", "--left", "1,-0.2", "--right", "1,0.2", "--out", o, "--profile-t", "0.5"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["region"], "IV");
    assert!((v["middle"]["rho"].as_f64().unwrap() - 0.81).abs() < 1e-10);
    assert!(v["middle"]["v1"].as_f64().unwrap().abs() < 1e-10);
    assert!(d.path().join("profile.csv").exists());
}

#[test]
fn solve1d_identical_states_are_degenerate() {
    let d = tempfile::tempdir().unwrap();
    let out = run(&["solve1d", "--left", "1,0.3", "--right", "1,0.3", "--out", d.path().to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["region"], "degenerate");
    for w in v["waves"].as_array().unwrap() {
        assert_eq!(w["strength"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn missing_flag_is_a_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let out = run(&["solve1d", "--left", "1,0.3", "--out", d.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["solve1d", "--left", "1;2"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn bad_config_is_a_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "[gas]\ngamma = 5.0\n");
    assert_eq!(run(&["solve1d", "--config", &cfg]).status.code(), Some(2));
    let cfg = write_config(d.path(), "[grid]\nunknown_key = 1\n");
    assert_eq!(run(&["simulate2d", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(run(&["simulate2d", "--config", "/definitely/not/here.toml"]).status.code(), Some(2));
}

#[test]
fn vacuum_is_a_runtime_error() {
    let d = tempfile::tempdir().unwrap();
    let out = run(&["solve1d", "--left", "1,-5", "--right", "1,5", "--out", d.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn output_dir_env_overrides_config() {
    let d = tempfile::tempdir().unwrap();
    let env_dir = d.path().join("from_env");
    let cfg = write_config(d.path(), &format!("[output]\ndir = {:?}\n", d.path().join("from_config").to_str().unwrap()));
    let out = bin().args(["solve1d", "--config", &cfg]).env("OUTPUT_DIR", &env_dir).output().unwrap();
    assert!(out.status.success());
    assert!(env_dir.join("fan.json").exists());
    assert!(!d.path().join("from_config").exists());
}

const PLANE: &str = "[grid]\nnx1 = 64\nnx2 = 8\nt_end = 0.2\n[output]\ntimes = [0.1]\n";

#[test]
fn plane_run_stays_plane() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), PLANE);
    let o = d.path().join("out");
    let out = run(&["simulate2d", "--config", &cfg, "--out", o.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["max_plane_asymmetry"].as_f64().unwrap() < 1e-12);
    for f in ["summary.json", "entropy.json", "fronts.csv", "plot.gp", "config.toml"] {
        assert!(o.join(f).exists(), "{f}");
    }
}

#[test]
fn perturbed_run_has_four_loci_and_reruns_identically() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "[grid]\nnx1 = 96\nnx2 = 16\nt_end = 0.3\n[perturbation]\nepsilon = 0.01\n[output]\ntimes = [0.15]\n");
    let a = d.path().join("a");
    let b = d.path().join("b");
    assert!(run(&["simulate2d", "--config", &cfg, "--out", a.to_str().unwrap(), "--seed", "7", "--threads", "1"]).status.success());
    assert!(run(&["simulate2d", "--config", &cfg, "--out", b.to_str().unwrap(), "--seed", "7", "--threads", "3"]).status.success());
    let fronts = String::from_utf8(read(a.join("fronts.csv"))).unwrap();
    let mut lines = fronts.lines();
    assert_eq!(lines.next().unwrap(), "t,row,cbar0,hbar,h,c0");
    for l in lines {
        let cols: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(cols.len(), 6);
        assert!(cols[2..].iter().all(|x| x.is_finite()), "{l}");
    }
    for e in std::fs::read_dir(&a).unwrap() {
        let name = e.unwrap().file_name();
        assert_eq!(read(a.join(&name)), read(b.join(&name)), "{name:?}");
    }
    // the echoed config replays the run
    let c = d.path().join("c");
    assert!(run(&["simulate2d", "--config", a.join("config.toml").to_str().unwrap(), "--out", c.to_str().unwrap()]).status.success());
    assert_eq!(read(a.join("summary.json")), read(c.join("summary.json")));
}

#[test]
fn build_data_constant_background() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "[data]\nn_theta = 16\norder = 3\n");
    let out = run(&["build-data", "--config", &cfg, "--out", d.path().join("o").to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    for e in v["entries"].as_array().unwrap() {
        assert!(e["measured"].as_f64().unwrap() < 1e-12, "{e}");
    }
}

#[test]
fn trace_fronts_on_the_fan() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "[fronts]\nu0 = 0.4\nn_rays = 12\n");
    let o = d.path().join("o");
    let out = run(&["trace-fronts", "--config", &cfg, "--out", o.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["all_reached"], true);
    assert!(v["max_u_deviation"].as_f64().unwrap() < 1e-8);
    assert!(o.join("fronts.csv").exists());
}

#[test]
fn verify_entropy_self_comparison() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), PLANE);
    let r = d.path().join("run");
    assert!(run(&["simulate2d", "--config", &cfg, "--out", r.to_str().unwrap()]).status.success());
    let o = d.path().join("check");
    let out = run(&["verify-entropy", "--run", r.to_str().unwrap(), "--out", o.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["integral_alpha"][0].as_f64().unwrap(), 0.0);
    assert!(o.join("entropy_report.json").exists());
}

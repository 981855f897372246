use std::path::Path;
use std::process::{Command, Output};

use edgebasis::edgeset;
use edgebasis::pgm::save_pgm;
use edgebasis_core::{random_edge_set, render_shapes, GrayImage, Shape, ShapeKind};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edgebasis")).args(args).current_dir(dir).output().expect("spawn edgebasis")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write_set(dir: &Path, name: &str, n: usize, seed: u64) {
    std::fs::write(dir.join(name), edgeset::serialize(&random_edge_set(n, 256, 256, seed))).unwrap();
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn extract_constant_image_gives_no_edges() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("flat.pgm"), save_pgm(&GrayImage::constant(32, 32, 0.5).unwrap(), true)).unwrap();
    let o = run(dir.path(), &["extract", "flat.pgm"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "EDGESET 1\n32 32 0\n");
}

#[test]
fn extract_disk_image() {
    let dir = tempfile::tempdir().unwrap();
    let disk = Shape { kind: ShapeKind::Disk { cx: 64.0, cy: 64.0, r: 30.0 }, intensity: 1.0 };
    let img = render_shapes(128, 128, 0.0, &[disk]).unwrap();
    std::fs::write(dir.path().join("disk.pgm"), save_pgm(&img, false)).unwrap();
    let o = run(dir.path(), &["--out", "disk.edgeset", "extract", "disk.pgm"]);
    assert_eq!(code(&o), 0);
    let set = edgeset::parse(&std::fs::read_to_string(dir.path().join("disk.edgeset")).unwrap()).unwrap();
    let on_ring = set.edges().iter().filter(|e| ((e.x - 64.0).hypot(e.y - 64.0) - 30.0).abs() <= 1.0).count();
    assert!(on_ring >= 100 && on_ring == set.len(), "{on_ring} of {}", set.len());
    let reliable = set.edges().iter().filter(|e| e.reliable).count();
    assert!(reliable * 10 >= set.len() * 9);
}

#[test]
fn extract_reports_missing_and_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["extract", "absent.pgm"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("absent.pgm"));
    std::fs::write(dir.path().join("bad.pgm"), b"P7\n1 1\n255\n\0").unwrap();
    assert_eq!(code(&run(dir.path(), &["extract", "bad.pgm"])), 2);
    std::fs::write(dir.path().join("tiny.pgm"), b"P5\n2 2\n255\n\0\0\0\0").unwrap();
    assert_eq!(code(&run(dir.path(), &["extract", "tiny.pgm"])), 2);
}

#[test]
fn match_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write_set(dir.path(), "a.edgeset", 300, 1);
    write_set(dir.path(), "b.edgeset", 300, 2);
    let o = run(dir.path(), &["--out", "self.json", "match", "--ref", "a.edgeset", "--probe", "a.edgeset"]);
    assert_eq!(code(&o), 0);
    let v = json(&dir.path().join("self.json"));
    assert_eq!(v["version"], 1);
    assert!(v["score"].as_f64().unwrap() >= 0.95);

    let o = run(dir.path(), &["match", "--ref", "a.edgeset", "--probe", "b.edgeset"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["decided"], false);

    std::fs::write(dir.path().join("bad.edgeset"), "EDGESET 1\n10 10 1\n1 2 3\n").unwrap();
    let o = run(dir.path(), &["match", "--ref", "a.edgeset", "--probe", "bad.edgeset"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected 6 fields"));
}

#[test]
fn unknown_flags_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["match", "--bogus"])), 2);
    assert_eq!(code(&run(dir.path(), &["--set", "verify.nope=1", "mc", "--trials", "10"])), 2);
}

#[test]
fn verbose_prints_effective_config_with_precedence() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.toml"), "[verify]\naccept_score = 0.5\nprobe_count = 7\n").unwrap();
    let o = run(
        dir.path(),
        &["--config", "cfg.toml", "--set", "verify.accept_score=0.6", "--verbose", "mc", "--p", "0.5", "--m", "1", "--trials", "10"],
    );
    assert_eq!(code(&o), 0);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("accept_score = 0.6"), "{err}");
    assert!(err.contains("probe_count = 7"));
    assert!(err.contains("[extract]") && err.contains("[hypothesis]"));
}

#[test]
fn overlay_outputs() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.edgeset"), "EDGESET 1\n64 48 0\n").unwrap();
    let o = run(dir.path(), &["overlay", "--ref", "empty.edgeset", "--probe", "empty.edgeset"]);
    assert_eq!(code(&o), 0);
    let svg = String::from_utf8(o.stdout).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<rect class=\"frame\"") && !svg.contains("<line"));

    write_set(dir.path(), "a.edgeset", 120, 3);
    assert_eq!(code(&run(dir.path(), &["--out", "r.json", "match", "--ref", "a.edgeset", "--probe", "a.edgeset"])), 0);
    let o = run(dir.path(), &["--out", "o.svg", "overlay", "--ref", "a.edgeset", "--probe", "a.edgeset", "--result", "r.json"]);
    assert_eq!(code(&o), 0);
    let svg = std::fs::read_to_string(dir.path().join("o.svg")).unwrap();
    assert_eq!(svg.matches("class=\"ref\"").count(), 120);
    assert_eq!(svg.matches("class=\"probe\"").count(), 120);
    assert_eq!(svg.matches("class=\"matched\"").count(), 240);
    assert_eq!(svg.matches("class=\"basis\"").count(), 4);
}

#[test]
fn mc_sweep_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--seed", "3", "mc", "--p", "0.25", "--m", "20", "--trials", "10000"]);
    assert_eq!(code(&o), 0);
    let csv = String::from_utf8(o.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("p,m,closed_form,mc_estimate,stderr"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[..3], ["0.25", "20", "6.600262e-8"]);
    assert_eq!(lines.next(), None);
}

#[test]
fn synth_is_reproducible_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| {
        vec!["--seed", "7", "--out", out, "synth", "--n", "100", "--scale", "1.12", "--dropout", "0.25", "--jitter-pos", "0.5", "--clutter", "0.1"]
    };
    assert_eq!(code(&run(dir.path(), &args("one"))), 0);
    assert_eq!(code(&run(dir.path(), &args("two"))), 0);
    for f in ["ref.edgeset", "probe.edgeset", "truth.json"] {
        let a = std::fs::read(dir.path().join("one").join(f)).unwrap();
        assert_eq!(a, std::fs::read(dir.path().join("two").join(f)).unwrap(), "{f}");
    }
    let truth = json(&dir.path().join("one/truth.json"));
    assert_eq!(truth["transform"]["s"], 1.12);
    assert_eq!(truth["seed"], 7);
    assert_eq!(code(&run(dir.path(), &["synth", "--n", "5"])), 2);
}

#[test]
fn gallery_enroll_and_search() {
    let dir = tempfile::tempdir().unwrap();
    write_set(dir.path(), "probe.edgeset", 250, 10);
    write_set(dir.path(), "other.edgeset", 250, 11);
    let enroll = |id: &str, file: &str| run(dir.path(), &["gallery", "enroll", "--root", "g", "--id", id, file]);
    assert_eq!(code(&enroll("probe", "probe.edgeset")), 0);
    assert_eq!(code(&enroll("other", "other.edgeset")), 0);
    assert_eq!(code(&enroll("other", "probe.edgeset")), 2);

    let o = run(dir.path(), &["gallery", "search", "--root", "g", "--probe", "probe.edgeset"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    assert_eq!(results[0]["id"], "probe");
    assert!(results[0]["result"]["score"].as_f64().unwrap() >= 0.95);
    let manifest = json(&dir.path().join("g/manifest.json"));
    assert_eq!(manifest.as_array().unwrap().len(), 2);
    assert_eq!(manifest[0]["file"], "models/probe.edgeset");
    assert_eq!(manifest[0]["edge_count"], 250);

    assert_eq!(code(&run(dir.path(), &["gallery", "search", "--root", "empty", "--probe", "probe.edgeset"])), 2);
}

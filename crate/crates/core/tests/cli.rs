use std::path::Path;
use std::process::{Command, Output};

use slice2stl::phantom::{write_phantom, PhantomSpec, Shape};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_slice2stl"));
    c.env("SLICE2STL_LOG", "error");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value<'a>(out: &'a str, key: &str) -> Option<&'a str> {
    out.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn small_cylinder(dir: &Path, slices: usize) {
    let spec = PhantomSpec {
        width: 64,
        height: 64,
        ..PhantomSpec::new(Shape::Cylinder { radius: 20.0 }, slices)
    };
    write_phantom(&spec, dir, false).unwrap();
}

const SQUARE: &str = "0 0\n10 0\n10 10\n0 10\n";

#[test]
fn help_and_usage_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["convert", "--gamma", "x", "a", "-o", "b"]).status.code(), Some(1));
}

#[test]
fn empty_directory_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.stl");
    let o = run(&["convert", p(dir.path()), "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no slices in range"));
    assert!(!out.exists());
}

#[test]
fn slice_range_selects_inclusive_positions() {
    let dir = tempfile::tempdir().unwrap();
    let slices = dir.path().join("s");
    small_cylinder(&slices, 100);
    let out = dir.path().join("o.stl");
    let report = dir.path().join("r.json");
    let o = run(&[
        "convert",
        p(&slices),
        "-o",
        p(&out),
        "--slice-range",
        "80:87",
        "--report",
        p(&report),
        "--median-kernel",
        "3",
        "--mean-kernel",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(value(&text, "slices"), Some("8"));
    assert_eq!(value(&text, "watertight"), Some("true"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(json["slices"].as_array().unwrap().len(), 8);
    assert_eq!(json["slices"][0]["file"], "slice_0080.pgm");
    assert_eq!(json["stack"]["wall_layers"], 7);
}

#[test]
fn convert_is_deterministic_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let slices = dir.path().join("s");
    small_cylinder(&slices, 4);
    let a = dir.path().join("a.stl");
    let b = dir.path().join("b.stl");
    assert_eq!(run(&["convert", p(&slices), "-o", p(&a), "--workers", "1"]).status.code(), Some(0));
    assert_eq!(run(&["convert", p(&slices), "-o", p(&b), "--workers", "3"]).status.code(), Some(0));
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn convert_reads_toml_config() {
    let dir = tempfile::tempdir().unwrap();
    let slices = dir.path().join("s");
    small_cylinder(&slices, 3);
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "threshold_space = \"enhanced\"\noutput_format = \"ascii\"\nspan = 0.2\n").unwrap();
    let out = dir.path().join("o.stl");
    let o = run(&["convert", p(&slices), "-o", p(&out), "--config", p(&cfg)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("solid"));

    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    assert_eq!(run(&["convert", p(&slices), "-o", p(&out), "--config", p(&cfg)]).status.code(), Some(1));
}

#[test]
fn stitch_two_squares_gives_closed_prism() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.txt"), dir.path().join("b.txt"));
    std::fs::write(&a, SQUARE).unwrap();
    std::fs::write(&b, SQUARE).unwrap();
    let out = dir.path().join("prism.stl");
    let o = run(&["stitch", p(&a), p(&b), "-z", "5", "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(value(&text, "facets"), Some("12"));
    assert_eq!(value(&text, "watertight"), Some("true"));
    assert_eq!(std::fs::metadata(&out).unwrap().len(), 84 + 50 * 12);

    let v = run(&["validate", p(&out)]);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(value(&stdout(&v), "euler"), Some("2"));
}

#[test]
fn stitch_three_layers_has_two_walls() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<_> = (0..3).map(|k| dir.path().join(format!("{k}.txt"))).collect();
    for f in &files {
        std::fs::write(f, SQUARE).unwrap();
    }
    let out = dir.path().join("o.stl");
    let o = run(&["stitch", p(&files[0]), p(&files[1]), p(&files[2]), "-z", "5", "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&stdout(&o), "wall_layers"), Some("2"));
}

#[test]
fn stitch_needs_two_layers() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    std::fs::write(&a, SQUARE).unwrap();
    let o = run(&["stitch", p(&a), "-z", "5", "-o", p(&dir.path().join("o.stl"))]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn stitch_rejects_malformed_points() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.txt"), dir.path().join("b.txt"));
    std::fs::write(&a, SQUARE).unwrap();
    std::fs::write(&b, "0 0\n1 oops\n").unwrap();
    let o = run(&["stitch", p(&a), p(&b), "-z", "5", "-o", p(&dir.path().join("o.stl"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn smooth_span_must_be_open_interval() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("p.txt");
    let pts: String = (0..20)
        .map(|k| {
            let t = k as f64 * std::f64::consts::TAU / 20.0;
            format!("{} {}\n", 10.0 * t.cos(), 10.0 * t.sin())
        })
        .collect();
    std::fs::write(&input, pts).unwrap();
    let out = dir.path().join("s.txt");
    assert_eq!(run(&["smooth", p(&input), "-o", p(&out), "--span", "1.0"]).status.code(), Some(1));
    let o = run(&["smooth", p(&input), "-o", p(&out), "--span", "0.3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 20);
}

#[test]
fn phantom_rejects_bad_shape() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["phantom", "box", "--side", "0", "-o", p(dir.path())]);
    assert_ne!(o.status.code(), Some(0));
    let o = run(&["phantom", "box", "--side", "20", "--width", "48", "--height", "48", "--slices", "3", "-o", p(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("slice_0002.pgm").is_file());
}

#[test]
fn validate_flags_open_mesh_and_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let open = dir.path().join("open.stl");
    std::fs::write(
        &open,
        "solid t\nfacet normal 0 0 1\nouter loop\nvertex 0 0 0\nvertex 1 0 0\nvertex 0 1 0\nendloop\nendfacet\nendsolid t\n",
    )
    .unwrap();
    let o = run(&["validate", p(&open)]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(value(&stdout(&o), "boundary_edges"), Some("3"));

    let junk = dir.path().join("junk.stl");
    std::fs::write(&junk, b"not an stl").unwrap();
    assert_eq!(run(&["validate", p(&junk)]).status.code(), Some(2));
    assert_eq!(run(&["validate", p(&dir.path().join("missing.stl"))]).status.code(), Some(2));
}

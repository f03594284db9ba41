use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn kfrag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kfrag"))
        .args(args)
        .env("FRAG_RNG_SEED", "7")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn text(len: usize) -> Vec<u8> {
    let line = b"12 rue de la Poste, 75001 Paris; colis 000417 remis le 03/02\n";
    line.iter().copied().cycle().take(len).collect()
}

struct Fixture {
    dir: TempDir,
    input: PathBuf,
}

impl Fixture {
    fn new(data: &[u8]) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("input.bin");
        fs::write(&input, data).unwrap();
        Self { dir, input }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn split(&self, out: &str, extra: &[&str]) -> Output {
        let out = self.path(out);
        let mut args = vec!["split", "--in", s(&self.input), "--out", s(&out)];
        args.extend_from_slice(extra);
        kfrag(&args)
    }
}

fn files_with_ext(dir: &Path, ext: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    v.sort();
    v
}

#[test]
fn split_then_join_by_manifest() {
    let data = text(50_000);
    let fx = Fixture::new(&data);
    let o = fx.split("frags", &["--k", "4", "--c", "2", "--block-size", "34"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(files_with_ext(&fx.path("frags"), "kfrg").len(), 4);
    assert!(fx.path("frags/manifest.json").exists());

    let out = fx.path("joined.bin");
    let o = kfrag(&[
        "join",
        "--manifest",
        s(&fx.path("frags/manifest.json")),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(fs::read(&out).unwrap(), data);
    let digest = String::from_utf8(o.stdout).unwrap();
    assert_eq!(digest.split_whitespace().next().unwrap().len(), 64);
}

#[test]
fn bad_multiple_is_a_parameter_error() {
    let fx = Fixture::new(b"abc");
    let o = fx.split("frags", &["--k", "5", "--c", "2"]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("k must be a multiple of c"), "{err}");
    assert!(err.contains("--k 5"), "{err}");
}

#[test]
fn ida_split_and_threshold() {
    let data = text(9_000);
    let fx = Fixture::new(&data);
    let o = fx.split("ida", &["--scheme", "ida", "--k", "3", "--n", "5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let files = files_with_ext(&fx.path("ida"), "kida");
    assert_eq!(files.len(), 5);

    let out = fx.path("ida.out");
    let o = kfrag(&[
        "join",
        "--frags",
        s(&files[0]),
        s(&files[2]),
        s(&files[4]),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(fs::read(&out).unwrap(), data);

    let o = kfrag(&[
        "join",
        "--frags",
        s(&files[0]),
        s(&files[1]),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("threshold not met"));
}

#[test]
fn proposed_join_with_a_missing_fragment_lists_it() {
    let fx = Fixture::new(&text(10_000));
    assert_eq!(code(&fx.split("f", &[])), 0);
    let files = files_with_ext(&fx.path("f"), "kfrg");
    let mut args = vec!["join", "--frags"];
    args.extend(files[..3].iter().map(|p| s(p)));
    let out = fx.path("o");
    args.extend(["--out", s(&out)]);
    let o = kfrag(&args);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("missing [3]"), "{}", stderr(&o));
}

#[test]
fn parity_substitutes_for_a_lost_primary() {
    let data = text(30_000);
    let fx = Fixture::new(&data);
    let o = fx.split("p", &["--k", "4", "--c", "2", "--n", "6"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(files_with_ext(&fx.path("p"), "kpar").len(), 2);
    fs::remove_file(fx.path("p/f1.kfrg")).unwrap();
    fs::remove_file(fx.path("p/f2.kfrg")).unwrap();
    let out = fx.path("o");
    let o = kfrag(&[
        "join",
        "--manifest",
        s(&fx.path("p/manifest.json")),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(fs::read(&out).unwrap(), data);
}

#[test]
fn tampered_fragment_is_an_integrity_error() {
    let fx = Fixture::new(&text(5_000));
    assert_eq!(code(&fx.split("t", &[])), 0);
    let victim = fx.path("t/f2.kfrg");
    let mut bytes = fs::read(&victim).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 0x40;
    fs::write(&victim, bytes).unwrap();
    let out = fx.path("o");
    let o = kfrag(&[
        "join",
        "--manifest",
        s(&fx.path("t/manifest.json")),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 5, "{}", stderr(&o));
}

#[test]
fn disperse_and_fetch_round_trip() {
    let data = text(40_000);
    let fx = Fixture::new(&data);
    assert_eq!(code(&fx.split("d", &["--k", "6", "--c", "3"])), 0);
    let sites: Vec<PathBuf> = (0..3).map(|i| fx.path(&format!("cloud{i}"))).collect();
    let site_list = sites.iter().map(|p| s(p)).collect::<Vec<_>>().join(",");
    let manifest = fx.path("d/manifest.json");

    let o = kfrag(&[
        "disperse",
        "--manifest",
        s(&manifest),
        "--sites",
        &site_list,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.starts_with("site  fragments"), "{table}");
    let dispersed = fx.path("d/dispersed.json");
    let m: serde_json::Value = serde_json::from_slice(&fs::read(&dispersed).unwrap()).unwrap();
    for e in m["fragments"].as_array().unwrap() {
        let (index, site) = (e["index"].as_u64().unwrap(), e["site"].as_u64().unwrap());
        assert_eq!(site, index % 3);
        assert!(sites[site as usize]
            .join(e["name"].as_str().unwrap())
            .exists());
    }

    let back = fx.path("back");
    let o = kfrag(&[
        "fetch",
        "--manifest",
        s(&dispersed),
        "--sites",
        &site_list,
        "--out",
        s(&back),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = fx.path("o");
    let o = kfrag(&[
        "join",
        "--manifest",
        s(&back.join("manifest.json")),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(fs::read(&out).unwrap(), data);

    // a second dispersal of the same run collides on object names
    let o = kfrag(&[
        "disperse",
        "--manifest",
        s(&manifest),
        "--sites",
        &site_list,
        "--out",
        s(&fx.path("x.json")),
    ]);
    assert_eq!(code(&o), 3);
    assert!(!fx.path("x.json").exists());
}

#[test]
fn disperse_checks_site_count_and_writability() {
    let fx = Fixture::new(&text(2_000));
    assert_eq!(code(&fx.split("d", &[])), 0);
    let manifest = fx.path("d/manifest.json");
    let a = fx.path("a");
    let o = kfrag(&["disperse", "--manifest", s(&manifest), "--sites", s(&a)]);
    assert_eq!(code(&o), 2);

    let blocked = fx.path("blocked");
    fs::write(&blocked, b"a file, not a directory").unwrap();
    let sites = format!("{},{}", s(&a), s(&blocked));
    let out = fx.path("m.json");
    let o = kfrag(&[
        "disperse",
        "--manifest",
        s(&manifest),
        "--sites",
        &sites,
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("site 1"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn fetch_with_a_deleted_object_reports_threshold() {
    let fx = Fixture::new(&text(3_000));
    assert_eq!(code(&fx.split("d", &[])), 0);
    let sites = format!("{},{}", s(&fx.path("s0")), s(&fx.path("s1")));
    let o = kfrag(&[
        "disperse",
        "--manifest",
        s(&fx.path("d/manifest.json")),
        "--sites",
        &sites,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let victim = fs::read_dir(fx.path("s1"))
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    fs::remove_dir_all(victim).unwrap();
    let o = kfrag(&[
        "fetch",
        "--manifest",
        s(&fx.path("d/dispersed.json")),
        "--sites",
        &sites,
        "--out",
        s(&fx.path("b")),
    ]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn analyze_reports_uniform_fragments_and_ida_patterns() {
    let data = text(100_000);
    let fx = Fixture::new(&data);
    let report = fx.path("r.json");
    let rec = fx.path("rec.csv");
    let o = kfrag(&[
        "analyze",
        "--in",
        s(&fx.input),
        "--k",
        "4",
        "--c",
        "2",
        "--block-size",
        "34",
        "--report",
        s(&report),
        "--recurrence-csv",
        s(&rec),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(r["scheme"], "proposed");
    assert_eq!(r["fragments"].as_array().unwrap().len(), 4);
    assert!(r["min_entropy"].as_f64().unwrap() > 7.9);
    assert!(fs::read_to_string(&rec)
        .unwrap()
        .starts_with("x,x_delayed\n"));

    let o = kfrag(&[
        "analyze",
        "--in",
        s(&fx.input),
        "--scheme",
        "ida",
        "--k",
        "2",
        "--report",
        s(&report),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(r["all_chi2_pass"], false);
    assert!(String::from_utf8(o.stdout).unwrap().contains("chi2 FAIL"));
}

#[test]
fn bench_smoke_and_malformed_grid() {
    let fx = Fixture::new(b"");
    let out = fx.path("bench.csv");
    let o = kfrag(&[
        "bench",
        "--grid",
        "proposed:k=4:c=2:b=16,250;sss:k=2",
        "--payload-mb",
        "1",
        "--reps",
        "3",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 2);
    assert!(csv.starts_with("scheme,k,c,block_size,mb_per_s_median,mb_per_s_stddev,direction"));
    assert!(fx.path("bench.json").exists());

    let o = kfrag(&["bench", "--grid", "proposed:k=banana", "--out", s(&out)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn seeded_runs_are_reproducible() {
    let fx = Fixture::new(&text(4_000));
    assert_eq!(code(&fx.split("a", &[])), 0);
    assert_eq!(code(&fx.split("b", &[])), 0);
    for j in 0..4 {
        let name = format!("f{j}.kfrg");
        assert_eq!(
            fs::read(fx.path("a").join(&name)).unwrap(),
            fs::read(fx.path("b").join(&name)).unwrap()
        );
    }
}

#[test]
fn io_and_usage_errors() {
    let fx = Fixture::new(b"x");
    let o = kfrag(&[
        "split",
        "--in",
        s(&fx.path("nope")),
        "--out",
        s(&fx.path("o")),
    ]);
    assert_eq!(code(&o), 3);
    let o = kfrag(&[
        "split",
        "--in",
        s(&fx.input),
        "--out",
        s(&fx.path("o")),
        "--bogus",
    ]);
    assert_eq!(code(&o), 2);
    let o = kfrag(&["join", "--manifest", "m.json", "--frags", "a", "--out", "o"]);
    assert_eq!(code(&o), 2);
    let empty = Fixture::new(b"");
    assert_eq!(code(&empty.split("e", &[])), 2);
}

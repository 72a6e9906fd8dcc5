use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use tempfile::TempDir;
use zkattest_core::privacy::PopulationParams;
use zkattest_core::session::synthetic_stream;
use zkattest_core::snark::ProofBundle;

const CONFIG: &str = r#"{
  "circuit": { "m": 6, "chain_length": 64 },
  "swf": { "memory_cost": 8388608, "time_cost": 1, "chain_length": 64 }
}"#;

fn zkattest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zkattest"))
        .args(args)
        .env_remove("ZKATTEST_KEY_DIR")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn keys(&self) -> PathBuf {
        self.dir.path().join("keys")
    }
    fn population(&self) -> PathBuf {
        self.dir.path().join("pop.json")
    }
    fn events(&self) -> PathBuf {
        self.dir.path().join("events.json")
    }
    fn session(&self) -> PathBuf {
        self.dir.path().join("s1")
    }
}

// setup, a DP release and one attested session, shared by the tests below
fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let f = Fixture { dir };
        let cfg = f.dir.path().join("cfg.json");
        std::fs::write(&cfg, CONFIG).unwrap();
        let o = zkattest(&["setup", "--config", s(&cfg), "--seed", "7", "--out", s(&f.keys())]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));

        let matrix = f.dir.path().join("matrix.csv");
        let mut csv = String::from("# six features per user, ms\n");
        for u in 0..500u32 {
            let row: Vec<String> = (0..6).map(|j| format!("{}", 350 + (u * 37 + j * 101) % 300)).collect();
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
        std::fs::write(&matrix, csv).unwrap();
        let o = zkattest(&["stats", s(&matrix), "--eps", "1", "--seed", "3", "--out", s(&f.population())]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));

        let pop: PopulationParams = serde_json::from_slice(&std::fs::read(f.population()).unwrap()).unwrap();
        std::fs::write(f.events(), synthetic_stream(&pop, 3, 9).to_json()).unwrap();
        let o = zkattest(&[
            "attest",
            s(&f.events()),
            "--population",
            s(&f.population()),
            "--keys",
            s(&f.keys()),
            "--seed",
            "5",
            "--out",
            s(&f.session()),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        f
    })
}

#[test]
fn honest_session_is_accepted() {
    let f = fixture();
    let (bundle, t) = (f.session().join("bundle.zkb"), f.session().join("transcript.zkt"));
    let (keys, pop) = (f.keys(), f.population());
    for extra in [&[][..], &["--batch"][..]] {
        let mut args = vec!["verify", s(&bundle), "--keys", s(&keys), "--population", s(&pop)];
        args.extend_from_slice(extra);
        args.extend_from_slice(&["--transcript", s(&t)]);
        let o = zkattest(&args);
        assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
        assert!(stdout(&o).contains("session: accept"));
        assert_eq!(stdout(&o).matches(": accept").count(), 4);
    }

    let o = zkattest(&["verify", s(&bundle), "--keys", s(&f.keys()), "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["accepted"], true);
    assert_eq!(v["population_pinned"], false);

    let m: serde_json::Value =
        serde_json::from_slice(&std::fs::read(f.session().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["checkpoints"], 3);
    assert_eq!(m["session_id"].as_str().unwrap().len(), 32);
}

#[test]
fn key_dir_comes_from_the_environment() {
    let f = fixture();
    let o = Command::new(env!("CARGO_BIN_EXE_zkattest"))
        .args(["verify", s(&f.session().join("bundle.zkb"))])
        .env("ZKATTEST_KEY_DIR", f.keys())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn tampered_bundle_names_the_checkpoint() {
    let f = fixture();
    let mut b = ProofBundle::from_bytes(&std::fs::read(f.session().join("bundle.zkb")).unwrap()).unwrap();
    b.proofs[1].public.swf_root = b.proofs[0].public.swf_root;
    let bad = f.dir.path().join("tampered.zkb");
    std::fs::write(&bad, b.to_bytes()).unwrap();
    let o = zkattest(&["verify", s(&bad), "--keys", s(&f.keys()), "--population", s(&f.population())]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("checkpoint 2: reject"), "{out}");
    assert!(out.contains("session: reject (checkpoints 2)"), "{out}");

    // truncated file: unreadable input, not a verdict
    let bytes = std::fs::read(f.session().join("bundle.zkb")).unwrap();
    std::fs::write(&bad, &bytes[..bytes.len() / 2]).unwrap();
    assert_eq!(code(&zkattest(&["verify", s(&bad), "--keys", s(&f.keys())])), 2);
}

#[test]
fn foreign_population_is_rejected() {
    let f = fixture();
    let mut pop: PopulationParams = serde_json::from_slice(&std::fs::read(f.population()).unwrap()).unwrap();
    pop.mu[2] += 64;
    let other = f.dir.path().join("other-pop.json");
    std::fs::write(&other, serde_json::to_string(&pop).unwrap()).unwrap();
    let bundle = f.session().join("bundle.zkb");
    let o = zkattest(&["verify", s(&bundle), "--keys", s(&f.keys()), "--population", s(&other)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("population parameters differ"));
}

#[test]
fn digest_mismatch_is_a_refusal() {
    let f = fixture();
    let mut b = ProofBundle::from_bytes(&std::fs::read(f.session().join("bundle.zkb")).unwrap()).unwrap();
    b.circuit_digest[31] ^= 0x80;
    let bad = f.dir.path().join("foreign.zkb");
    std::fs::write(&bad, b.to_bytes()).unwrap();
    let o = zkattest(&["verify", s(&bad), "--keys", s(&f.keys())]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("circuit digest mismatch"));
}

#[test]
fn seeded_runs_are_reproducible() {
    let f = fixture();
    let out = f.dir.path().join("s2");
    let o = zkattest(&[
        "attest",
        s(&f.events()),
        "--population",
        s(&f.population()),
        "--keys",
        s(&f.keys()),
        "--seed",
        "5",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for name in ["bundle.zkb", "transcript.zkt", "manifest.json"] {
        assert_eq!(
            std::fs::read(out.join(name)).unwrap(),
            std::fs::read(f.session().join(name)).unwrap(),
            "{name}"
        );
    }

    let cfg = f.dir.path().join("cfg.json");
    let again = f.dir.path().join("keys-again");
    let o = zkattest(&["setup", "--config", s(&cfg), "--seed", "7", "--out", s(&again)]);
    assert_eq!(code(&o), 0);
    let a: serde_json::Value = serde_json::from_slice(&std::fs::read(f.keys().join("setup.json")).unwrap()).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&std::fs::read(again.join("setup.json")).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn bad_inputs_exit_2() {
    let f = fixture();
    let dir = f.dir.path();

    let cfg = dir.join("bad-cfg.json");
    std::fs::write(&cfg, r#"{ "circuit": { "m": 6, "chain_lenght": 64 } }"#).unwrap();
    let o = zkattest(&["setup", "--config", s(&cfg), "--seed", "1", "--out", s(&dir.join("nowhere"))]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("chain_lenght"));
    assert!(!dir.join("nowhere").exists());

    let o = zkattest(&["setup", "--seed", "1", "--out", s(&dir.join("prod")), "--production"]);
    assert_eq!(code(&o), 2);

    assert_eq!(code(&zkattest(&["verify"])), 2);
    assert_eq!(code(&zkattest(&["frobnicate"])), 2);
    assert_eq!(code(&zkattest(&["verify", "missing.zkb", "--keys", s(&f.keys())])), 2);

    // an event outside the published bounds
    let pop: PopulationParams = serde_json::from_slice(&std::fs::read(f.population()).unwrap()).unwrap();
    let mut stream = synthetic_stream(&pop, 2, 4);
    stream.records[1].features_ms[0] = 999.0;
    let ev = dir.join("oob.json");
    std::fs::write(&ev, stream.to_json()).unwrap();
    let o = zkattest(&[
        "attest",
        s(&ev),
        "--population",
        s(&f.population()),
        "--keys",
        s(&f.keys()),
        "--out",
        s(&dir.join("oob")),
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("checkpoint 2"), "{}", stderr(&o));
}

#[test]
fn stats_refuses_bad_budgets() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.csv");
    std::fs::write(&one, "500,500\n").unwrap();
    assert_eq!(code(&zkattest(&["stats", s(&one), "--eps", "1"])), 2);

    let two = dir.path().join("two.csv");
    std::fs::write(&two, "500,500\n400,600\n").unwrap();
    assert_eq!(code(&zkattest(&["stats", s(&two), "--eps", "0"])), 2);
    assert_eq!(code(&zkattest(&["stats", s(&two), "--eps", "-1"])), 2);
    assert_eq!(code(&zkattest(&["stats", s(&two), "--eps", "1", "--delta", "0"])), 2);

    let junk = dir.path().join("junk.csv");
    std::fs::write(&junk, "500,abc\n400,600\n").unwrap();
    let o = zkattest(&["stats", s(&junk), "--eps", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("row 1"));

    let o = zkattest(&["stats", s(&two), "--eps", "1", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    let p: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(p["provenance"]["kind"], "dp-released");
    assert_eq!(p["provenance"]["n"], 2);
}

#[test]
fn analyze_prints_the_numbers() {
    let o = zkattest(&["analyze", "--leakage", "0.01"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("0.919207 bits"));

    let o = zkattest(&["analyze", "--detection", "0.1", "4", "10"]);
    assert!(stdout(&o).contains("0.985219"), "{}", stdout(&o));

    let o = zkattest(&["analyze", "--session-bound", "0.058", "120", "0.111", "--leakage", "0.058"]);
    let out = stdout(&o);
    assert!(out.contains("n_eff = 96.0216"), "{out}");
    assert!(out.contains("0.680546 bits"), "{out}");

    assert_eq!(code(&zkattest(&["analyze"])), 2);
    assert_eq!(code(&zkattest(&["analyze", "--leakage", "1.5"])), 2);
    assert_eq!(code(&zkattest(&["analyze", "--detection", "x", "4", "10"])), 2);
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    std::fs::write(
        &cfg,
        r#"[
          { "label": "no-dp", "epsilon": null, "n_sessions": 200, "cohort": 2000 },
          { "label": "eps-0.1", "epsilon": 0.1, "n_sessions": 200, "cohort": 2000 }
        ]"#,
    )
    .unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = zkattest(&["simulate", "--config", s(&cfg), "--out", s(&out)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        std::fs::read_to_string(out).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    assert_eq!(a.lines().count(), 3);
    assert!(a.lines().nth(1).unwrap().starts_with("no-dp,"));

    std::fs::write(&cfg, r#"[{ "label": "x", "n_sessions": 0 }]"#).unwrap();
    assert_eq!(code(&zkattest(&["simulate", "--config", s(&cfg)])), 2);
}

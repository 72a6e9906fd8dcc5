use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use zkattest_core::privacy::{
    default_sweep, detection_probability, log10_miss_probability, minimum_leakage, release_population,
    session_false_accept, simulate_privacy_utility, DpBudget, PopulationParams, SimulationConfig,
};
use zkattest_core::session::{attest as run_attest, verify_bundle, verify_transcript, EventStream, SessionConfig, VerifyOptions};
use zkattest_core::snark::{setup_with_mode, ProofBundle, ProverKey, SetupMode, VerifierKey};

use crate::manifest::{session_id, Artifact, SessionManifest};
use crate::Failure;

pub const PROVING_KEY: &str = "proving.key";
pub const VERIFYING_KEY: &str = "verifying.key";
pub const SESSION_CONFIG: &str = "session.json";
pub const SETUP_RECORD: &str = "setup.json";
pub const BUNDLE: &str = "bundle.zkb";
pub const TRANSCRIPT: &str = "transcript.zkt";
pub const MANIFEST: &str = "manifest.json";

type Res = Result<(), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Res {
    fs::write(path, bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn load_config(path: &Path) -> Result<SessionConfig, Failure> {
    SessionConfig::from_json(&read_text(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_population(path: &Path) -> Result<(PopulationParams, Vec<u8>), Failure> {
    let raw = read(path)?;
    let p: PopulationParams =
        serde_json::from_slice(&raw).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    p.validate()?;
    Ok((p, raw))
}

#[derive(Serialize)]
struct SetupRecord {
    circuit_digest: String,
    mode: &'static str,
    seed: u64,
    proving_key_sha256: String,
    verifying_key_sha256: String,
    constraints: usize,
}

pub fn setup(config: Option<PathBuf>, seed: Option<u64>, out: &Path, production: bool) -> Res {
    let cfg = match config {
        Some(p) => load_config(&p)?,
        None => SessionConfig::default(),
    };
    let seed = seed.unwrap_or_else(|| rand::thread_rng().gen());
    let mode = if production { SetupMode::Production } else { SetupMode::Test };
    let keys = setup_with_mode(&cfg.circuit, &seed.to_le_bytes(), mode)?;
    fs::create_dir_all(out).map_err(|e| Failure::Usage(format!("{}: {e}", out.display())))?;
    let pk = keys.proving_key_bytes();
    let vk = keys.verifying_key_bytes();
    write(&out.join(PROVING_KEY), &pk)?;
    write(&out.join(VERIFYING_KEY), &vk)?;
    write(&out.join(SESSION_CONFIG), json(&cfg).as_bytes())?;
    let report = zkattest_core::circuit::constraint_count(&cfg.circuit)?;
    let record = SetupRecord {
        circuit_digest: hex::encode(keys.circuit_digest()),
        mode: "test",
        seed,
        proving_key_sha256: hex::encode(Sha256::digest(&pk)),
        verifying_key_sha256: hex::encode(Sha256::digest(&vk)),
        constraints: report.total,
    };
    write(&out.join(SETUP_RECORD), json(&record).as_bytes())?;
    println!("circuit digest {}", record.circuit_digest);
    println!("constraints    {} (C1 {}, C2 {}, C3 {}, C4 {})", report.total, report.c1, report.c2, report.c3, report.c4);
    println!("proving key    {} bytes", pk.len());
    println!("verifying key  {} bytes", vk.len());
    println!("wrote {}", out.display());
    Ok(())
}

pub fn attest(events: &Path, population: &Path, keys: &Path, config: Option<PathBuf>, seed: Option<u64>, out: &Path) -> Res {
    let stream = EventStream::from_json(&read_text(events)?)?;
    let cfg = load_config(&config.unwrap_or_else(|| keys.join(SESSION_CONFIG)))?;
    let (pop, pop_raw) = load_population(population)?;
    let key = ProverKey::from_bytes(&read(&keys.join(PROVING_KEY))?)?;
    if key.config != cfg.circuit {
        return Err(Failure::Usage("session configuration does not match the proving key".into()));
    }
    let mut seed_bytes = [0u8; 32];
    match seed {
        Some(s) => seed_bytes[..8].copy_from_slice(&s.to_le_bytes()),
        None => rand::thread_rng().fill_bytes(&mut seed_bytes),
    }
    let session = run_attest(&key, &cfg.swf, &pop, &stream, &seed_bytes)?;

    fs::create_dir_all(out).map_err(|e| Failure::Usage(format!("{}: {e}", out.display())))?;
    let bundle = session.bundle.to_bytes();
    let transcript = session.transcript.to_bytes();
    let (bp, tp) = (out.join(BUNDLE), out.join(TRANSCRIPT));
    write(&bp, &bundle)?;
    write(&tp, &transcript)?;
    let manifest = SessionManifest {
        session_id: session_id(&session.bundle.session_nonce),
        circuit_digest: hex::encode(key.digest),
        checkpoints: session.bundle.proofs.len(),
        transcript: Artifact::new(&tp, &transcript),
        bundle: Artifact::new(&bp, &bundle),
        population_sha256: hex::encode(Sha256::digest(&pop_raw)),
        config: cfg.circuit,
        created_by: format!("zkattest {}", env!("CARGO_PKG_VERSION")),
    };
    write(&out.join(MANIFEST), json(&manifest).as_bytes())?;
    println!("session {}: {} checkpoints attested", manifest.session_id, manifest.checkpoints);
    println!("wrote {}", out.display());
    Ok(())
}

pub fn verify(bundle: &Path, keys: &Path, population: Option<PathBuf>, transcript: Option<PathBuf>, batch: bool, as_json: bool) -> Res {
    let key = VerifierKey::from_bytes(&read(&keys.join(VERIFYING_KEY))?)?;
    let b = ProofBundle::from_bytes(&read(bundle)?)?;
    let pop = population.map(|p| load_population(&p)).transpose()?.map(|p| p.0);
    let mut report = verify_bundle(&key, &b, &VerifyOptions { batch, population: pop.as_ref() })?;
    if let Some(t) = transcript {
        let t = zkattest_core::session::SessionTranscript::from_bytes(&read(&t)?)?;
        let diffs = verify_transcript(&t, &b);
        if !diffs.is_empty() {
            report.accepted = false;
        }
        for d in diffs {
            eprintln!("transcript: {d}");
        }
    }
    if as_json {
        print!("{}", json(&report));
    } else {
        if !report.population_pinned {
            println!("note: no --population given; checkpoints were only checked against each other");
        }
        for c in &report.checkpoints {
            if c.accepted {
                println!("checkpoint {}: accept", c.index);
            } else {
                println!("checkpoint {}: reject ({})", c.index, c.reasons.join("; "));
            }
        }
        if report.accepted {
            println!("session: accept");
        } else {
            let bad = report.rejected_indices();
            if bad.is_empty() {
                println!("session: reject");
            } else {
                let list: Vec<String> = bad.iter().map(u64::to_string).collect();
                println!("session: reject (checkpoints {})", list.join(", "));
            }
        }
    }
    if report.accepted {
        Ok(())
    } else {
        Err(Failure::Reject)
    }
}

fn read_matrix(path: &Path) -> Result<Vec<Vec<f64>>, Failure> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            rec.iter()
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| Failure::Usage(format!("{}: row {}: {v:?} is not a number", path.display(), i + 1)))
                })
                .collect()
        })
        .collect()
}

pub fn stats(matrix: &Path, eps: f64, delta: f64, mult: u64, clamp: (f64, f64), seed: Option<u64>, out: Option<PathBuf>) -> Res {
    let x = read_matrix(matrix)?;
    let budget = DpBudget::new(eps, delta, x.len())?;
    let m = x.first().map_or(0, |r| r.len());
    let seed = seed.unwrap_or_else(|| rand::thread_rng().gen());
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let p = release_population(&x, &vec![clamp; m], &budget, mult, Some(seed), &mut rng)?;
    let text = json(&p);
    match out {
        Some(path) => {
            write(&path, text.as_bytes())?;
            println!("released {m} features from {} rows (eps {eps}, delta {delta}) to {}", x.len(), path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn parse<T: std::str::FromStr>(what: &str, v: &str) -> Result<T, Failure> {
    v.parse().map_err(|_| Failure::Usage(format!("{what}: cannot parse {v:?}")))
}

pub fn analyze(leakage: Option<f64>, detection: Option<Vec<String>>, bound: Option<Vec<String>>) -> Res {
    if let Some(a) = leakage {
        let l = minimum_leakage(a)?;
        println!("minimum leakage: 1 - h(alpha), h(p) = -p log2 p - (1-p) log2 (1-p)");
        println!("alpha = {a}: {l:.6} bits");
    }
    if let Some(v) = detection {
        let (f, k, n): (f64, u64, u64) = (parse("f", &v[0])?, parse("k", &v[1])?, parse("n", &v[2])?);
        let p = detection_probability(f, k, n)?;
        println!("detection: 1 - (1 - f)^(k n)");
        println!("f = {f}, k = {k}, n = {n}: {p:.12}");
        if f > 0.0 && f < 1.0 {
            let x = log10_miss_probability(f, k, n)?;
            println!("miss probability (1 - f)^(k n) = 10^{x:.4} = {:.4e}", 10f64.powf(x));
            println!("detection = 1 - 10^{x:.4}");
        }
    }
    if let Some(v) = bound {
        let (a, n, r1): (f64, u64, f64) = (parse("alpha", &v[0])?, parse("n", &v[1])?, parse("r1", &v[2])?);
        let b = session_false_accept(a, n, r1)?;
        println!("effective checkpoints: n_eff = n (1 - r1) / (1 + r1)");
        println!("session false accept: alpha^n_eff");
        println!("alpha = {a}, n = {n}, r1 = {r1}: n_eff = {:.4}, bound = 10^{:.4}", b.n_eff, b.log10_bound);
    }
    Ok(())
}

pub fn simulate(config: Option<PathBuf>, seed: u64, out: Option<PathBuf>) -> Res {
    let sweep: Vec<SimulationConfig> = match config {
        Some(p) => serde_json::from_str(&read_text(&p)?).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
        None => default_sweep(seed),
    };
    let report = simulate_privacy_utility(&sweep)?;
    let csv = report.to_csv()?;
    match out {
        Some(path) => {
            write(&path, csv.as_bytes())?;
            print!("{}", report.summary());
            println!("wrote {}", path.display());
        }
        None => {
            print!("{csv}");
            eprint!("{}", report.summary());
        }
    }
    Ok(())
}

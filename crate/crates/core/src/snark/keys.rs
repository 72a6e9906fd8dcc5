use std::sync::Arc;

use ark_bn254::{Bn254, Fr};
use ark_groth16::{prepare_verifying_key, Groth16, PreparedVerifyingKey, ProvingKey, VerifyingKey};
use ark_relations::r1cs::{ConstraintMatrices, ConstraintSystem, OptimizationGoal, SynthesisMode};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::circuit::{AttestationCircuit, CircuitConfig};
use crate::codec::{Reader, Writer};
use crate::{Error, Result};

pub const CURVE: &str = "bn254";
const PK_MAGIC: &[u8; 8] = b"ZKATPK01";
const VK_MAGIC: &[u8; 8] = b"ZKATVK01";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetupMode {
    /// Keys derived from a caller seed; reproducible and therefore insecure.
    Test,
    /// Refuses seeded setup; keys must come from a ceremony.
    Production,
}

#[derive(Clone)]
pub struct ProverKey {
    pub config: CircuitConfig,
    pub digest: [u8; 32],
    pub pk: ProvingKey<Bn254>,
    pub(crate) matrices: Arc<ConstraintMatrices<Fr>>,
}

#[derive(Clone)]
pub struct VerifierKey {
    pub config: CircuitConfig,
    pub digest: [u8; 32],
    pub vk: VerifyingKey<Bn254>,
    pub(crate) pvk: PreparedVerifyingKey<Bn254>,
}

#[derive(Clone)]
pub struct SetupArtifacts {
    pub prover: ProverKey,
    pub verifier: VerifierKey,
}

impl SetupArtifacts {
    pub fn circuit_digest(&self) -> [u8; 32] {
        self.prover.digest
    }

    pub fn proving_key_bytes(&self) -> Vec<u8> {
        self.prover.to_bytes()
    }

    pub fn verifying_key_bytes(&self) -> Vec<u8> {
        self.verifier.to_bytes()
    }
}

/// Seeded (test-only) setup.
pub fn setup(config: &CircuitConfig, seed: &[u8]) -> Result<SetupArtifacts> {
    setup_with_mode(config, seed, SetupMode::Test)
}

pub fn setup_with_mode(config: &CircuitConfig, seed: &[u8], mode: SetupMode) -> Result<SetupArtifacts> {
    if mode == SetupMode::Production {
        return Err(Error::Config(
            "seeded setup is reproducible by anyone holding the seed; production keys need a ceremony".into(),
        ));
    }
    config.validate()?;
    let digest = config.digest();
    let rng_seed: [u8; 32] = Sha256::new()
        .chain_update(b"zkattest-setup-v1")
        .chain_update(digest)
        .chain_update(seed)
        .finalize()
        .into();
    let mut rng = ChaCha20Rng::from_seed(rng_seed);
    let pk = Groth16::<Bn254>::generate_random_parameters_with_reduction(AttestationCircuit::blank(config), &mut rng)?;
    let matrices = Arc::new(matrices(config)?);
    let verifier = VerifierKey::new(config.clone(), pk.vk.clone())?;
    Ok(SetupArtifacts {
        prover: ProverKey {
            config: config.clone(),
            digest,
            pk,
            matrices,
        },
        verifier,
    })
}

/// The R1CS matrices exactly as the generator sees them.
fn matrices(config: &CircuitConfig) -> Result<ConstraintMatrices<Fr>> {
    let cs = ConstraintSystem::<Fr>::new_ref();
    cs.set_optimization_goal(OptimizationGoal::Constraints);
    cs.set_mode(SynthesisMode::Setup);
    AttestationCircuit::blank(config).generate(&cs)?;
    cs.finalize();
    cs.to_matrices()
        .ok_or_else(|| Error::Config("constraint matrices unavailable".into()))
}

fn write_header(w: &mut Writer, magic: &[u8; 8], config: &CircuitConfig) {
    w.raw(magic);
    w.raw(&config.digest());
    w.bytes(CURVE.as_bytes());
    w.bytes(&serde_json::to_vec(config).expect("config serializes"));
}

fn read_header(r: &mut Reader, magic: &[u8; 8]) -> Result<(CircuitConfig, [u8; 32])> {
    if &r.array::<8>()? != magic {
        return Err(Error::Encoding("unexpected key file type".into()));
    }
    let digest = r.array::<32>()?;
    if r.bytes()? != CURVE.as_bytes() {
        return Err(Error::Encoding("key was generated for another curve".into()));
    }
    let config: CircuitConfig =
        serde_json::from_slice(r.bytes()?).map_err(|e| Error::Encoding(format!("key config: {e}")))?;
    config.validate()?;
    if config.digest() != digest {
        return Err(Error::Config("circuit digest does not match the embedded configuration".into()));
    }
    Ok((config, digest))
}

impl ProverKey {
    /// Uncompressed points: loading skips square roots, which dominate
    /// start-up time for compressed keys of this size.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        write_header(&mut w, PK_MAGIC, &self.config);
        let mut body = Vec::with_capacity(self.pk.uncompressed_size());
        self.pk.serialize_uncompressed(&mut body).expect("in-memory write");
        w.bytes(&body);
        w.finish()
    }

    /// Keys are trusted local files; points are not subgroup-checked.
    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        let mut r = Reader::new(b);
        let (config, digest) = read_header(&mut r, PK_MAGIC)?;
        let pk = ProvingKey::<Bn254>::deserialize_uncompressed_unchecked(r.bytes()?)
            .map_err(|e| Error::Encoding(format!("proving key: {e}")))?;
        r.expect_end()?;
        if pk.vk.gamma_abc_g1.len() != config.num_public_inputs() + 1 {
            return Err(Error::Config("proving key shape does not match its configuration".into()));
        }
        let matrices = Arc::new(matrices(&config)?);
        if pk.a_query.len() != matrices.num_instance_variables + matrices.num_witness_variables {
            return Err(Error::Config("proving key does not fit this circuit".into()));
        }
        Ok(ProverKey {
            config,
            digest,
            pk,
            matrices,
        })
    }
}

impl VerifierKey {
    pub fn new(config: CircuitConfig, vk: VerifyingKey<Bn254>) -> Result<Self> {
        if vk.gamma_abc_g1.len() != config.num_public_inputs() + 1 {
            return Err(Error::Config("verifying key shape does not match its configuration".into()));
        }
        let pvk = prepare_verifying_key(&vk);
        Ok(VerifierKey {
            digest: config.digest(),
            config,
            vk,
            pvk,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        write_header(&mut w, VK_MAGIC, &self.config);
        let mut body = Vec::new();
        self.vk.serialize_compressed(&mut body).expect("in-memory write");
        w.bytes(&body);
        w.finish()
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        let mut r = Reader::new(b);
        let (config, _) = read_header(&mut r, VK_MAGIC)?;
        let vk = VerifyingKey::<Bn254>::deserialize_compressed(r.bytes()?)
            .map_err(|e| Error::Encoding(format!("verifying key: {e}")))?;
        r.expect_end()?;
        Self::new(config, vk)
    }
}

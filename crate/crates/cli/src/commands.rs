use std::fs;
use std::path::{Path, PathBuf};

use catt_core::manager::ComponentStatus;
use catt_core::{
    deserialize_proof, serialize_proof, AccumulatorParams, AttestationSession, Backend,
    DomainMaterial, KeyFile, Proof, SchemeId, SigningKeyPair, TrustReport, Witness,
};

use crate::args::{Command, Material};
use crate::failure::Failure;
use crate::ingest;

const DEMO_SEED: &[u8] = b"catt demo-llm";
const DEMO_PARTS: [&str; 4] = ["env", "hw", "model", "lib"];

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::io(&path.display().to_string(), e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::io(&path.display().to_string(), e))
}

/// Loads the given material. With `public_only`, a private key is reduced
/// to its public half before use.
fn load_material(m: &Material, public_only: bool) -> Result<DomainMaterial, Failure> {
    let mut out = DomainMaterial::none();
    if let Some(p) = &m.params {
        out = out.with_params(AccumulatorParams::from_bytes(&read(p)?)?);
    }
    let key = match (&m.key, &m.pubkey) {
        (Some(k), _) => Some(KeyFile::from_bytes(&read(k)?)?),
        (None, Some(pk)) => Some(KeyFile::Public(
            KeyFile::from_bytes(&read(pk)?)?.public().clone(),
        )),
        (None, None) => None,
    };
    if let Some(key) = key {
        out = out.with_key(if public_only {
            KeyFile::Public(key.public().clone())
        } else {
            key
        });
    }
    Ok(out)
}

fn read_proof(path: &Path, expected: Option<SchemeId>) -> Result<Proof, Failure> {
    let proof = deserialize_proof(&read(path)?)?;
    match expected {
        Some(s) if s != proof.scheme() => Err(Failure::usage(format!(
            "{} holds a {} proof, not {s}",
            path.display(),
            proof.scheme()
        ))),
        _ => Ok(proof),
    }
}

fn seed_bytes(flag: Option<String>) -> Vec<u8> {
    match std::env::var("CATT_SEED").ok().or(flag) {
        Some(s) => s.into_bytes(),
        None => rand::random::<[u8; 32]>().to_vec(),
    }
}

pub fn run(command: Command, verbose: bool) -> Result<(), Failure> {
    match command {
        Command::Setup {
            seed,
            bits,
            params,
            key,
            pubkey,
        } => {
            if params.is_none() && key.is_none() && pubkey.is_none() {
                return Err(Failure::usage(
                    "nothing to do: pass --params, --key and/or --pubkey",
                ));
            }
            let seed = seed_bytes(seed);
            if let Some(path) = &params {
                write(path, &AccumulatorParams::setup(&seed, bits)?.to_bytes())?;
            }
            if key.is_some() || pubkey.is_some() {
                let pair = SigningKeyPair::generate(&seed, bits)?;
                if let Some(path) = &key {
                    write(path, &pair.to_bytes())?;
                }
                if let Some(path) = &pubkey {
                    write(path, &pair.public().to_bytes())?;
                }
            }
            Ok(())
        }

        Command::Attest {
            scheme,
            material,
            ingest,
            out,
            paths,
        } => {
            let backend = Backend::new(scheme, &load_material(&material, false)?)?;
            let cs = ingest::components(&ingest.base, &paths, verbose)?;
            let proof = backend.attest(&ingest::digests(&cs))?;
            write(&out, &serialize_proof(&proof))?;
            println!("attested {} components ({scheme})", cs.len());
            Ok(())
        }

        Command::Verify {
            scheme,
            material,
            ingest,
            proof,
            paths,
        } => {
            let proof = read_proof(&proof, scheme)?;
            let backend = Backend::new(proof.scheme(), &load_material(&material, true)?)?;
            let set = ingest::digests(&ingest::components(&ingest.base, &paths, verbose)?);
            if let Some(layers) = backend.verify_layers(&proof, &set) {
                println!("merkle layer:      {}", verdict(layers.merkle_ok));
                println!("accumulator layer: {}", verdict(layers.accumulator_ok));
                println!("signature layer:   {}", verdict(layers.signature_ok));
            }
            if backend.verify(&proof, &set) {
                println!("VALID");
                Ok(())
            } else {
                println!("INVALID");
                Err(Failure::invalid(
                    "proof does not match the given components",
                ))
            }
        }

        Command::Include {
            scheme,
            material,
            ingest,
            out,
            in_place,
            proof: proof_path,
            paths,
        } => {
            let target = match (out, in_place) {
                (Some(out), _) => out,
                (None, true) => proof_path.clone(),
                (None, false) => return Err(Failure::usage("pass --out or --in-place")),
            };
            let mut proof = read_proof(&proof_path, scheme)?;
            let backend = Backend::new(proof.scheme(), &load_material(&material, false)?)?;
            let cs = ingest::components(&ingest.base, &paths, verbose)?;
            for c in &cs {
                proof = backend.include(&proof, c)?;
            }
            write(&target, &serialize_proof(&proof))?;
            println!("included {} components", cs.len());
            Ok(())
        }

        Command::Compose {
            scheme,
            material,
            out,
            a,
            b,
        } => {
            let pa = read_proof(&a, scheme)?;
            let pb = read_proof(&b, Some(pa.scheme()))?;
            let backend = Backend::new(pa.scheme(), &load_material(&material, false)?)?;
            let composed = backend.compose(&pa, &pb)?;
            write(&out, &serialize_proof(&composed))?;
            println!("composed {} components", composed.members().len());
            Ok(())
        }

        Command::Witness {
            scheme,
            material,
            ingest,
            out,
            proof,
            path,
        } => {
            let proof = read_proof(&proof, scheme)?;
            let backend = Backend::new(proof.scheme(), &load_material(&material, true)?)?;
            let d = ingest::single_digest(&ingest.base, &path)?;
            let w = backend.witness(&proof, &d)?;
            write(&out, &w.to_bytes())?;
            Ok(())
        }

        Command::CheckWitness {
            scheme,
            material,
            ingest,
            witness,
            proof,
            path,
        } => {
            let proof = read_proof(&proof, scheme)?;
            let backend = Backend::new(proof.scheme(), &load_material(&material, true)?)?;
            let w = Witness::from_bytes(&read(&witness)?)?;
            let d = ingest::single_digest(&ingest.base, &path)?;
            if *w.member() != d {
                return Err(Failure::invalid("witness is for a different component"));
            }
            if backend.check_witness(&proof, &w) {
                println!("VALID");
                Ok(())
            } else {
                println!("INVALID");
                Err(Failure::invalid(
                    "witness does not verify against the proof",
                ))
            }
        }

        Command::DemoLlm {
            scheme,
            material,
            bits,
            expect,
            out,
            report,
            fixture,
        } => demo_llm(
            scheme, &material, bits, expect, out, report, &fixture, verbose,
        ),
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

fn demo_material(
    scheme: SchemeId,
    material: &Material,
    bits: u32,
) -> Result<DomainMaterial, Failure> {
    if material.params.is_some() || material.key.is_some() || material.pubkey.is_some() {
        return load_material(material, false);
    }
    let mut out = DomainMaterial::none();
    if matches!(scheme, SchemeId::Accumulator | SchemeId::Integrated) {
        out = out.with_params(AccumulatorParams::setup(DEMO_SEED, bits)?);
    }
    if matches!(scheme, SchemeId::Aggregate | SchemeId::Integrated) {
        out = out.with_key(KeyFile::Private(SigningKeyPair::generate(DEMO_SEED, bits)?));
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn demo_llm(
    scheme: SchemeId,
    material: &Material,
    bits: u32,
    expect: Option<PathBuf>,
    out: Option<PathBuf>,
    report_path: Option<PathBuf>,
    fixture: &Path,
    verbose: bool,
) -> Result<(), Failure> {
    let material = demo_material(scheme, material, bits)?;
    let mut combined: Option<AttestationSession> = None;
    for part in DEMO_PARTS {
        let cs = ingest::components(fixture, &[fixture.join(part)], verbose)?;
        let session = AttestationSession::create(Backend::new(scheme, &material)?, &cs)?;
        combined = Some(match combined {
            None => session,
            Some(acc) => AttestationSession::compose(&acc, &session)?,
        });
    }
    let session = combined.expect("at least one part");

    let report = match &expect {
        None => session.report(),
        Some(path) => judge(&session, &read_proof(path, Some(scheme))?),
    };
    if let Some(path) = &out {
        write(path, &serialize_proof(session.proof()))?;
    }
    let text = report.to_string();
    print!("{text}");
    if let Some(path) = &report_path {
        write(path, text.as_bytes())?;
    }
    if report.overall_valid {
        Ok(())
    } else {
        Err(Failure::invalid("trust report is not valid"))
    }
}

/// Report on the current components against a previously issued proof.
fn judge(session: &AttestationSession, expected: &Proof) -> TrustReport {
    let backend = session.backend();
    let set = session.digests();
    TrustReport {
        revision: session.revision(),
        scheme: session.scheme(),
        components: session
            .registry()
            .iter()
            .map(|(id, d)| ComponentStatus {
                id: id.clone(),
                digest: *d,
                included: expected.members().contains(d),
            })
            .collect(),
        overall_valid: backend.verify(expected, &set),
        layers: backend.verify_layers(expected, &set),
        proof: serialize_proof(expected),
    }
}

use std::path::PathBuf;

use catt_core::SchemeId;
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "catt",
    version,
    about = "Composable attestation for files and directory trees"
)]
pub struct Cli {
    /// Print per-component detail to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

/// Domain material shared by most commands.
#[derive(Debug, Args, Clone, Default)]
pub struct Material {
    /// Accumulator parameters file.
    #[arg(long, value_name = "FILE")]
    pub params: Option<PathBuf>,
    /// Private signing key file.
    #[arg(long, value_name = "FILE")]
    pub key: Option<PathBuf>,
    /// Public verification key file.
    #[arg(long, value_name = "FILE")]
    pub pubkey: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct Ingest {
    /// Directory that component ids are relative to.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub base: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate accumulator parameters and/or a signing key pair.
    Setup {
        /// Seed for deterministic generation. CATT_SEED takes precedence.
        #[arg(long)]
        seed: Option<String>,
        /// Modulus size: 512, 1024 or 2048.
        #[arg(long, default_value_t = 2048)]
        bits: u32,
        #[arg(long, value_name = "FILE")]
        params: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        key: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        pubkey: Option<PathBuf>,
    },
    /// Attest files and directories into a proof.
    Attest {
        #[arg(long)]
        scheme: SchemeId,
        #[command(flatten)]
        material: Material,
        #[command(flatten)]
        ingest: Ingest,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Verify a proof against files and directories.
    Verify {
        /// Expected scheme; defaults to the one recorded in the proof.
        #[arg(long)]
        scheme: Option<SchemeId>,
        #[command(flatten)]
        material: Material,
        #[command(flatten)]
        ingest: Ingest,
        proof: PathBuf,
        paths: Vec<PathBuf>,
    },
    /// Add components to an existing proof without reading prior ones.
    Include {
        #[arg(long)]
        scheme: Option<SchemeId>,
        #[command(flatten)]
        material: Material,
        #[command(flatten)]
        ingest: Ingest,
        #[arg(long, value_name = "FILE", conflicts_with = "in_place")]
        out: Option<PathBuf>,
        /// Overwrite the input proof.
        #[arg(long)]
        in_place: bool,
        proof: PathBuf,
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Combine two proofs from the same trust domain.
    Compose {
        #[arg(long)]
        scheme: Option<SchemeId>,
        #[command(flatten)]
        material: Material,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        a: PathBuf,
        b: PathBuf,
    },
    /// Produce an inclusion witness for one component.
    Witness {
        #[arg(long)]
        scheme: Option<SchemeId>,
        #[command(flatten)]
        material: Material,
        #[command(flatten)]
        ingest: Ingest,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        proof: PathBuf,
        path: PathBuf,
    },
    /// Check an inclusion witness for one component.
    CheckWitness {
        #[arg(long)]
        scheme: Option<SchemeId>,
        #[command(flatten)]
        material: Material,
        #[command(flatten)]
        ingest: Ingest,
        #[arg(long, value_name = "FILE")]
        witness: PathBuf,
        proof: PathBuf,
        path: PathBuf,
    },
    /// Attest an LLM deployment from env/, hw/, model/ and lib/ and print a trust report.
    DemoLlm {
        #[arg(long, default_value = "integrated")]
        scheme: SchemeId,
        #[command(flatten)]
        material: Material,
        /// Modulus size for the built-in demo domain when no material is given.
        #[arg(long, default_value_t = 1024)]
        bits: u32,
        /// Judge the fixture against this previously written proof.
        #[arg(long, value_name = "FILE")]
        expect: Option<PathBuf>,
        /// Write the composed proof here.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Write the report text here as well as to stdout.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
        fixture: PathBuf,
    },
}

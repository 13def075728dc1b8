//! Shared run context: configuration loading, config hash, output files.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use sha2::{Digest, Sha256};

use spdc_core::config::{MaterialFile, MaterialModels, RunConfigFile};
use spdc_core::io::{self, FileMeta};
use spdc_core::jsa::PumpSpec;
use spdc_core::phasematch::{CrystalSpec, SolverOptions};
use spdc_core::{Error, Result};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

const DEFAULT_RUN: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/run/default.toml"));
const DEFAULT_MATERIAL: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../data/materials/lithium_niobate.toml"
));

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Text tables with `# key: value` headers
    Csv,
    /// Little-endian binary, exact to the bit
    Bin,
}

#[derive(Args)]
pub struct GlobalArgs {
    /// Run configuration TOML; embedded defaults when absent
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Directory output files are written into
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,

    /// Seed for anything stochastic; part of the config hash
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for parallel sections; default lets the runtime pick
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Output file flavor
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

pub struct Context {
    pub run: RunConfigFile,
    pub material: MaterialModels,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub format: OutputFormat,
    pub config_hash: String,
}

impl Context {
    pub fn prepare(args: &GlobalArgs) -> Result<Self> {
        let run_text = match &args.config {
            Some(path) => std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
            None => DEFAULT_RUN.to_string(),
        };
        let run = RunConfigFile::parse(&run_text)?;

        let material_text = match &run.material_path {
            Some(rel) => {
                let base = args
                    .config
                    .as_deref()
                    .and_then(Path::parent)
                    .unwrap_or(Path::new("."));
                let path = base.join(rel);
                std::fs::read_to_string(&path)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => DEFAULT_MATERIAL.to_string(),
        };
        let material = MaterialFile::parse(&material_text)?.build()?;

        let mut hasher = Sha256::new();
        hasher.update(TOOLKIT_VERSION.as_bytes());
        hasher.update([0x1f]);
        hasher.update(run_text.as_bytes());
        hasher.update([0x1f]);
        hasher.update(material_text.as_bytes());
        hasher.update([0x1f]);
        let argv: Vec<String> = std::env::args().collect();
        hasher.update(argv.join("\x1f").as_bytes());
        hasher.update([0x1f]);
        hasher.update(args.seed.to_le_bytes());
        let config_hash = hex::encode(hasher.finalize());

        if let Some(n) = args.threads {
            // Ignore the error from a pool that is already up.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }

        Ok(Context {
            run,
            material,
            out_dir: args.out.clone(),
            seed: args.seed,
            format: args.format,
            config_hash,
        })
    }

    pub fn crystal(&self) -> Result<CrystalSpec<f64>> {
        self.run.crystal_spec(&self.material)
    }

    pub fn pump(&self) -> Result<PumpSpec<f64>> {
        self.run.pump_spec()
    }

    pub fn solver_options(&self) -> Result<SolverOptions<f64>> {
        self.run.solver_options()
    }

    pub fn meta(&self) -> FileMeta {
        FileMeta {
            toolkit_version: TOOLKIT_VERSION.to_string(),
            config_hash: self.config_hash.clone(),
        }
    }

    /// Write one output file atomically; returns the path for the summary.
    pub fn write_output(&self, name: &str, bytes: &[u8]) -> Result<String> {
        let path = self.out_dir.join(name);
        io::write_atomic(&path, bytes)?;
        Ok(path.display().to_string())
    }

    /// Pick a file name by output flavor.
    pub fn flavored(&self, stem: &str) -> String {
        match self.format {
            OutputFormat::Csv => format!("{stem}.csv"),
            OutputFormat::Bin => format!("{stem}.bin"),
        }
    }

    /// Append one line to the sidecar log. Timestamps live here and only
    /// here; failures to log never fail the run.
    pub fn log_outcome(&self, status: &str) {
        let unix_s = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let argv: Vec<String> = std::env::args().collect();
        let line = format!(
            "time_unix_s={unix_s} status={status} config_hash={} argv={:?}\n",
            self.config_hash, argv
        );
        if std::fs::create_dir_all(&self.out_dir).is_ok() {
            use std::io::Write;
            if let Ok(mut f) = std::fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(self.out_dir.join("run.log"))
            {
                let _ = f.write_all(line.as_bytes());
            }
        }
    }
}

/// Print the final summary line: `summary key=value ...` with keys in the
/// order given.
pub fn print_summary(pairs: &[(&str, String)]) {
    let body: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    println!("summary {}", body.join(" "));
}

/// Shortest-roundtrip decimal for a float summary value.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Exponent notation, for residual-scale numbers.
pub fn fmt_e(x: f64) -> String {
    format!("{x:e}")
}

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{ConfigError, ExperimentConfig};
use crate::experiments::{run_experiment, Artifacts};

pub const OUT_ENV: &str = "SURFLAB_OUT";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] surflab::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl RunError {
    /// 2 for bad input, 3 for numerical failures, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Core(surflab::Error::InvalidParameter { .. } | surflab::Error::Unsupported(_)) => 2,
            RunError::Core(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub dry_run: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub kind: &'static str,
    pub seed: u64,
    pub threads: usize,
    pub config_sha256: String,
    pub config: String,
    pub wall_time_s: f64,
    pub files: Vec<FileEntry>,
}

#[derive(Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub manifest: Option<Manifest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, RunError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError { field: "config".into(), reason: format!("{}: {e}", path.display()) })?;
    Ok(ExperimentConfig::from_toml(&text)?)
}

/// Applies command-line overrides on top of the file.
pub fn apply_overrides(cfg: &mut ExperimentConfig, opts: &RunOptions) {
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    if let Some(t) = opts.threads {
        cfg.threads = t;
    }
}

/// `--out`, then the config's `output`, then `$SURFLAB_OUT/<name>`, then `surflab-out/<name>`.
pub fn resolve_output(cfg: &ExperimentConfig, opts: &RunOptions, name: &str) -> PathBuf {
    if let Some(o) = &opts.out {
        return o.clone();
    }
    if let Some(o) = &cfg.output {
        return PathBuf::from(o);
    }
    match std::env::var_os(OUT_ENV) {
        Some(root) if !root.is_empty() => PathBuf::from(root).join(name),
        _ => PathBuf::from("surflab-out").join(name),
    }
}

/// Validates, computes and writes one experiment; nothing is left behind on failure.
pub fn execute(mut cfg: ExperimentConfig, opts: &RunOptions, name: &str) -> Result<RunSummary, RunError> {
    apply_overrides(&mut cfg, opts);
    cfg.validate()?;
    let out_dir = resolve_output(&cfg, opts, name);
    if opts.dry_run {
        return Ok(RunSummary { out_dir, manifest: None });
    }
    let start = Instant::now();
    let artifacts = run_experiment(&cfg)?;
    let canonical = cfg.canonical();
    let manifest = Manifest {
        tool: "surflab",
        version: env!("CARGO_PKG_VERSION"),
        kind: cfg.kind.name(),
        seed: cfg.seed,
        threads: cfg.threads,
        config_sha256: sha256_hex(canonical.as_bytes()),
        config: canonical,
        wall_time_s: start.elapsed().as_secs_f64(),
        files: artifacts
            .files
            .iter()
            .map(|(n, c)| FileEntry { name: n.clone(), bytes: c.len(), sha256: sha256_hex(c.as_bytes()) })
            .collect(),
    };
    write_atomic(&out_dir, &artifacts, &manifest)?;
    Ok(RunSummary { out_dir, manifest: Some(manifest) })
}

fn write_atomic(out: &Path, artifacts: &Artifacts, manifest: &Manifest) -> Result<(), RunError> {
    let parent = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent)?;
    if out.exists() {
        let replaceable = out.is_dir() && (out.join("manifest.json").is_file() || fs::read_dir(out)?.next().is_none());
        if !replaceable {
            return Err(io::Error::new(
                io::ErrorKind::AlreadyExists,
                format!("{} exists and is not a previous surflab output", out.display()),
            )
            .into());
        }
    }
    let base = out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    let tmp = parent.join(format!(".{base}.partial-{}", std::process::id()));
    let result = (|| -> io::Result<()> {
        if tmp.exists() {
            fs::remove_dir_all(&tmp)?;
        }
        fs::create_dir(&tmp)?;
        for (name, content) in &artifacts.files {
            fs::write(tmp.join(name), content)?;
        }
        let m = serde_json::to_string_pretty(manifest).map_err(io::Error::other)?;
        fs::write(tmp.join("manifest.json"), m + "\n")?;
        if out.exists() {
            fs::remove_dir_all(out)?;
        }
        fs::rename(&tmp, out)
    })();
    if result.is_err() {
        let _ = fs::remove_dir_all(&tmp);
    }
    Ok(result?)
}

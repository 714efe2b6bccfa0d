//! Shipped experiment files under `presets/`.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

/// Environment variable overriding the preset directory.
pub const PRESETS_ENV: &str = "FKDG_PRESETS";

/// `$FKDG_PRESETS`, then `./presets`, then the directory of the source tree.
pub fn presets_dir() -> PathBuf {
    if let Some(d) = env::var_os(PRESETS_ENV) {
        return PathBuf::from(d);
    }
    let local = PathBuf::from("presets");
    if local.is_dir() {
        return local;
    }
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../presets")
}

/// Sorted preset files of `dir`.
pub fn preset_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let rd = fs::read_dir(dir)
        .map_err(|e| CliError::Config(format!("preset directory {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    Ok(files)
}

/// Loads every preset in `dir`.
pub fn load_all(dir: &Path) -> CliResult<Vec<ExperimentConfig>> {
    preset_files(dir)?
        .iter()
        .map(|p| ExperimentConfig::load(p))
        .collect()
}

/// Loads the preset called `name` (file stem) from `dir`.
pub fn find(dir: &Path, name: &str) -> CliResult<ExperimentConfig> {
    let path = dir.join(format!("{name}.toml"));
    if !path.is_file() {
        let known: Vec<String> = preset_files(dir)
            .unwrap_or_default()
            .iter()
            .filter_map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()))
            .collect();
        return Err(CliError::Config(format!(
            "unknown preset {name:?}; available: {}",
            known.join(", ")
        )));
    }
    ExperimentConfig::load(&path)
}

/// One line per preset: name, source table, kind and key parameters.
pub fn describe(c: &ExperimentConfig) -> String {
    let p = &c.problem;
    let mut s = format!(
        "{:<14} {:<9} {:?}",
        c.name,
        c.table.as_deref().unwrap_or("-"),
        c.kind
    );
    s += &format!("  {:?} alpha={}", p.name, p.alpha);
    if let Some(d) = p.delta {
        s += &format!(" delta={d}");
    }
    s += &format!(
        " k={} gamma={} T={}",
        c.discretization.degree,
        c.time.gamma,
        c.final_time()
    );
    if let Some(m) = c.time.steps {
        s += &format!(" M={m}");
    }
    if !c.time.steps_list.is_empty() {
        s += &format!(" M={:?}", c.time.steps_list);
    }
    if !c.mesh.cells.is_empty() {
        s += &format!(" N={:?}", c.mesh.cells);
    }
    match c.discretization.flux {
        Some(f) => s += &format!(" sigma=({},{})", f[0], f[1]),
        None => s += &format!(" sigma={:?}", c.discretization.flux_list),
    }
    s
}

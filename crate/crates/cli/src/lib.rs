//! Scenario runner: reads TOML scenarios, runs the matching library
//! operation and writes one output file per scenario.

pub mod checks;
pub mod commands;
pub mod scenario;

use std::path::{Path, PathBuf};

use nullity_core::NullityError;

pub use commands::{execute, Options, Outcome};
pub use scenario::{Mode, Scenario};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] NullityError),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 2 for malformed scenarios, 3 for dimension mismatches, 4 when the
    /// requested time passes the Jacobi singularity, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Core(NullityError::DimensionMismatch(_)) => 3,
            CliError::Core(NullityError::SingularJacobi { .. }) => 4,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

/// Result of one scenario file.
#[derive(Debug)]
pub struct FileResult {
    pub name: String,
    pub output: Option<PathBuf>,
    pub result: Result<Outcome, CliError>,
}

impl FileResult {
    pub fn exit_code(&self) -> i32 {
        match &self.result {
            Ok(o) if o.failed => 1,
            Ok(_) => 0,
            Err(e) => e.exit_code(),
        }
    }
}

/// Scenario files under `path`: the file itself, or the `.toml` files of a
/// directory in name order.
pub fn scenario_files(path: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let entries = std::fs::read_dir(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    Ok(files)
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "scenario".into(), |s| s.to_string_lossy().into_owned())
}

fn run_file(name: String, scenario: Result<Scenario, CliError>, forced: Option<Mode>, out_dir: &Path, opts: &Options) -> FileResult {
    let result = scenario.and_then(|s| {
        let mode = forced
            .or(s.mode)
            .ok_or_else(|| CliError::Parse("scenario has no `mode` and none was given on the command line".into()))?;
        execute(mode, &s, opts)
    });
    let output = match &result {
        Ok(outcome) => {
            let path = out_dir.join(format!("{name}.{}", outcome.mode.output_extension()));
            match std::fs::write(&path, &outcome.contents) {
                Ok(()) => Some(path),
                Err(e) => {
                    return FileResult { name, output: None, result: Err(CliError::Io(format!("{}: {e}", path.display()))) }
                }
            }
        }
        Err(_) => None,
    };
    FileResult { name, output, result }
}

/// Runs every scenario under `path` (a file or a directory). Scenarios run
/// concurrently; results come back in file order.
pub fn run_batch(path: Option<&Path>, forced: Option<Mode>, out_dir: &Path, opts: &Options) -> Result<Vec<FileResult>, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let Some(path) = path else {
        // Only the check suite runs without a scenario.
        return Ok(vec![run_file("check".into(), Ok(empty_scenario()), forced, out_dir, opts)]);
    };
    let files = scenario_files(path)?;
    if files.is_empty() {
        return Err(CliError::Io(format!("no scenario files under {}", path.display())));
    }
    Ok(std::thread::scope(|scope| {
        let handles: Vec<_> = files
            .iter()
            .map(|f| scope.spawn(move || run_file(stem(f), Scenario::load(f), forced, out_dir, opts)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
    }))
}

fn empty_scenario() -> Scenario {
    Scenario::parse("").expect("the empty document is a valid scenario")
}

/// Exit status of a batch: the first nonzero status in file order.
pub fn batch_exit_code(results: &[FileResult]) -> i32 {
    results.iter().map(FileResult::exit_code).find(|&c| c != 0).unwrap_or(0)
}

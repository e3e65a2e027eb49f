//! The `sheafharm` command line.
//!
//! Exit codes: 0 on success, 1 when the input is well formed but fails
//! validation or analysis, 2 for unreadable or malformed input.

use std::ffi::OsString;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::attention::{validate_triple, GatTriple};
use crate::demo;
use crate::error::{Error, Result};
use crate::filtration::{barcode, build_filtration, FiltrationMode};
use crate::harmonic::{classify_harmonic_set, edge_residuals, epsilon_harmonic_set, DEFAULT_ETA};
use crate::io::{
    analyze, parse_triple, parse_triple_unchecked, sheaf_for, write_barcode, write_triple,
    AnalysisParams, BarcodeFormat, ResidualEntry, SheafKind,
};
use crate::sheaf::{global_sections, laplacian_spectrum, zero_eigenvalue_count, DEFAULT_RANK_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "sheafharm",
    version,
    about = "Cellular sheaf analysis of attention graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a triple document and report weight diagnostics.
    Validate {
        /// Triple document, or `-` for stdin.
        #[arg(long)]
        input: PathBuf,
    },
    /// Basis of the global section space.
    Sections {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        sheaf: SheafArgs,
        /// Relative singular value cutoff.
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
    },
    /// Harmonic or ε-harmonic substructure of the features.
    Harmonic {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        sheaf: SheafArgs,
        /// Residual threshold; when absent, exact harmonicity up to `--eta`.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_ETA)]
        eta: f64,
    },
    /// Persistence barcode of the residual filtration.
    Barcode {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        sheaf: SheafArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
        /// Keep bars of length zero.
        #[arg(long)]
        zero_bars: bool,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Write to a file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Eigenvalues of the sheaf Laplacian.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        sheaf: SheafArgs,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
    },
    /// Sections, spectrum, residuals, harmonic sets and barcode in one report.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = SheafArg::Gat)]
        sheaf: SheafArg,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
        /// Thresholds to report ε-harmonic sets for.
        #[arg(long, num_args = 1.., default_values_t = [0.0])]
        epsilon: Vec<f64>,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
        #[arg(long)]
        zero_bars: bool,
    },
    /// Emit a built-in example triple.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SheafArgs {
    #[arg(long, value_enum, default_value_t = SheafArg::Gat)]
    sheaf: SheafArg,
    /// Stalk dimension of the constant sheaf (defaults to the feature dimension).
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SheafArg {
    Gat,
    Constant,
}

impl From<SheafArg> for SheafKind {
    fn from(s: SheafArg) -> Self {
        match s {
            SheafArg::Gat => SheafKind::Gat,
            SheafArg::Constant => SheafKind::Constant,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Full,
    EdgeClosure,
    Nodes,
}

impl From<ModeArg> for FiltrationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Full => FiltrationMode::Full,
            ModeArg::EdgeClosure => FiltrationMode::EdgeClosure,
            ModeArg::Nodes => FiltrationMode::NodesOnly,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DemoName {
    Fig4,
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

impl CommandOutput {
    fn ok(stdout: String) -> Self {
        CommandOutput {
            code: EXIT_OK,
            stdout: stdout.into_bytes(),
            stderr: Vec::new(),
        }
    }

    fn from_error(e: &Error) -> Self {
        CommandOutput {
            code: exit_code(e),
            stdout: Vec::new(),
            stderr: format!("error: {e}\n").into_bytes(),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_FAILURE
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_command<I, T>(args: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string().into_bytes();
            return if e.use_stderr() {
                CommandOutput {
                    code: EXIT_INPUT,
                    stdout: Vec::new(),
                    stderr: text,
                }
            } else {
                CommandOutput {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: Vec::new(),
                }
            };
        }
    };
    match cli.command {
        Command::Validate { input } => {
            run_validate(&input).unwrap_or_else(|e| CommandOutput::from_error(&e))
        }
        other => execute(other)
            .map(CommandOutput::ok)
            .unwrap_or_else(|e| CommandOutput::from_error(&e)),
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        return Ok(buf);
    }
    std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<GatTriple> {
    parse_triple(&read_input(path)?)
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}

/// Writes `text` to `output` if given, otherwise returns it for stdout.
fn emit(text: String, output: Option<&Path>) -> Result<String> {
    match output {
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn run_validate(input: &Path) -> Result<CommandOutput> {
    let t = parse_triple_unchecked(&read_input(input)?)?;
    let diagnostics = validate_triple(&t);
    let mut stderr = String::new();
    for d in &diagnostics.items {
        let level = if d.is_error() { "error" } else { "warning" };
        stderr.push_str(&format!("{level}: {d}\n"));
    }
    let valid = !diagnostics.has_errors();
    let report = json!({
        "valid": valid,
        "nodes": t.graph.node_count(),
        "edges": t.graph.edge_count(),
        "feature_dim": t.feature_dim,
        "diagnostics": diagnostics.items,
    });
    Ok(CommandOutput {
        code: if valid { EXIT_OK } else { EXIT_FAILURE },
        stdout: pretty(&report).into_bytes(),
        stderr: stderr.into_bytes(),
    })
}

fn execute(command: Command) -> Result<String> {
    match command {
        Command::Validate { .. } => unreachable!("handled by run_validate"),
        Command::Sections { input, sheaf, tol } => {
            let t = load(&input)?;
            let sh = sheaf_for(&t, sheaf.sheaf.into(), sheaf.dim)?;
            let basis = global_sections(&sh, tol)?;
            Ok(pretty(&json!({
                "sheaf": SheafKind::from(sheaf.sheaf),
                "tolerance": tol,
                "global_section_dim": basis.dimension(),
                "basis": basis.cochains(),
            })))
        }
        Command::Harmonic {
            input,
            sheaf,
            epsilon,
            eta,
        } => {
            let t = load(&input)?;
            let sh = sheaf_for(&t, sheaf.sheaf.into(), sheaf.dim)?;
            let residuals = edge_residuals(&sh, &t.features)?;
            let mut h = epsilon_harmonic_set(&residuals, epsilon.unwrap_or(eta))?;
            if epsilon.is_none() {
                h.epsilon = 0.0;
            }
            let classification = classify_harmonic_set(&t.graph, &h)?;
            let residuals: Vec<ResidualEntry> = residuals
                .norms()
                .iter()
                .map(|(e, &r)| ResidualEntry {
                    edge: e.clone(),
                    residual: r,
                })
                .collect();
            Ok(pretty(&json!({
                "epsilon": h.epsilon,
                "eta": eta,
                "nodes": h.nodes,
                "edges": h.edges,
                "classification": classification,
                "residuals": residuals,
            })))
        }
        Command::Barcode {
            input,
            sheaf,
            mode,
            zero_bars,
            format,
            output,
        } => {
            let t = load(&input)?;
            let sh = sheaf_for(&t, sheaf.sheaf.into(), sheaf.dim)?;
            let residuals = edge_residuals(&sh, &t.features)?;
            let f = build_filtration(&t.graph, &residuals, mode.into())?;
            let format = match format {
                FormatArg::Json => BarcodeFormat::Json,
                FormatArg::Text => BarcodeFormat::Text,
            };
            let mut text = write_barcode(&barcode(&f, zero_bars)?, format);
            if !text.is_empty() {
                text.push('\n');
            }
            emit(text, output.as_deref())
        }
        Command::Spectrum { input, sheaf, tol } => {
            let t = load(&input)?;
            let sh = sheaf_for(&t, sheaf.sheaf.into(), sheaf.dim)?;
            let spectrum = laplacian_spectrum(&sh);
            Ok(pretty(&json!({
                "sheaf": SheafKind::from(sheaf.sheaf),
                "tolerance": tol,
                "zero_eigenvalues": zero_eigenvalue_count(&spectrum, tol),
                "eigenvalues": spectrum,
            })))
        }
        Command::Analyze {
            input,
            sheaf,
            tol,
            epsilon,
            mode,
            zero_bars,
        } => {
            let t = load(&input)?;
            let report = analyze(
                &t,
                &AnalysisParams {
                    sheaf: sheaf.into(),
                    tolerance: tol,
                    epsilons: epsilon,
                    mode: mode.into(),
                    include_zero_bars: zero_bars,
                },
            )?;
            Ok(pretty(&report))
        }
        Command::Demo { name, output } => {
            let t = match name {
                DemoName::Fig4 => demo::fig4_triple(),
            };
            emit(write_triple(&t), output.as_deref())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> CommandOutput {
        run_command(std::iter::once("sheafharm").chain(args.iter().copied()))
    }

    fn fig4_file(dir: &Path) -> PathBuf {
        let path = dir.join("fig4.json");
        std::fs::write(&path, write_triple(&demo::fig4_triple())).unwrap();
        path
    }

    fn temp_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("sheafharm-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn sections_on_demo() {
        let dir = temp_dir("sections");
        let path = fig4_file(&dir);
        let out = run(&["sections", "--input", path.to_str().unwrap()]);
        assert_eq!(out.code, 0, "{}", String::from_utf8_lossy(&out.stderr));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["global_section_dim"], 1);
    }

    #[test]
    fn barcode_text_output() {
        let dir = temp_dir("barcode");
        let path = fig4_file(&dir);
        let out = run(&[
            "barcode",
            "--input",
            path.to_str().unwrap(),
            "--format",
            "text",
        ]);
        assert_eq!(out.code, 0);
        assert_eq!(String::from_utf8(out.stdout).unwrap(), "H0 [0, inf)\n");
    }

    #[test]
    fn missing_file_is_input_error() {
        let out = run(&["spectrum", "--input", "/nonexistent/triple.json"]);
        assert_eq!(out.code, EXIT_INPUT);
        assert!(out.stdout.is_empty());
    }

    #[test]
    fn bad_usage_is_input_error() {
        assert_eq!(run(&["frobnicate"]).code, EXIT_INPUT);
        assert_eq!(run(&["--help"]).code, EXIT_OK);
    }

    #[test]
    fn dim_only_with_constant_sheaf() {
        let dir = temp_dir("dim");
        let path = fig4_file(&dir);
        let p = path.to_str().unwrap();
        assert_eq!(
            run(&["spectrum", "--input", p, "--dim", "2"]).code,
            EXIT_FAILURE
        );
        let out = run(&[
            "spectrum", "--input", p, "--sheaf", "constant", "--dim", "2",
        ]);
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 10);
        assert_eq!(v["zero_eigenvalues"], 2);
    }
}

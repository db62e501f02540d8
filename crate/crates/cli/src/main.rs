mod commands;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "triholo", version, about = "Triangle difference operators: holonomy, solvers and lattice calculus")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Mesh file (`tri-surface v1`).
    #[arg(long, global = true)]
    pub mesh: Option<PathBuf>,
    /// Connection file (`b` lines) or, for `holonomy`, a representation (`R` lines).
    #[arg(long, global = true)]
    pub conn: Option<PathBuf>,
    /// Domain file: `d <triangle>` on a mesh, `d b|w n1 n2` on the lattice.
    #[arg(long, global = true)]
    pub domain: Option<PathBuf>,
    /// `x0 x1` or `x0 x1 y0 y1`.
    #[arg(long, global = true, num_args = 2..=4, allow_negative_numbers = true)]
    pub window: Option<Vec<i64>>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Rational)]
    pub mode: Mode,
    /// Relative tolerance; required in float mode.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Rational,
    Float,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColorArg {
    Black,
    White,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a mesh and report its combinatorics.
    MeshCheck,
    /// Classify the global holonomy of a flat connection.
    Holonomy,
    /// Covariant constants and the zero modes of `L`.
    Covariants,
    /// Solve the black equations and check the maximum principle.
    Maxprinciple {
        /// Fixed vertex values (`psi` lines); random on a determining set otherwise.
        #[arg(long)]
        values: Option<PathBuf>,
        /// Hexagon radius when no mesh is given.
        #[arg(long, default_value_t = 4)]
        radius: i64,
    },
    /// Taylor coefficients of a holomorphic function.
    Taylor {
        /// Lattice function (`f` lines); random otherwise.
        #[arg(long)]
        values: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        order: usize,
    },
    /// Reconstruct a holomorphic function from its boundary values.
    Cauchy {
        #[arg(long)]
        values: Option<PathBuf>,
        /// Triangle count of the random domain when `--domain` is absent.
        #[arg(long, default_value_t = 40)]
        size: usize,
    },
    /// Tabulate the Green's function on a window.
    Green,
    /// Positive factorization of a seven-point operator.
    Factorize {
        /// Operator file (`op`/`c` lines); random otherwise.
        #[arg(long)]
        op: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ColorArg::Both)]
        color: ColorArg,
    },
    /// Check the exponential-coefficient operator identity.
    QcdIdentity {
        #[arg(long, default_value = "1")]
        c: String,
        #[arg(long, default_value = "1")]
        d: String,
        /// `E11 E12 E21 E22` (rational mode).
        #[arg(long, num_args = 4, allow_negative_numbers = true)]
        e: Option<Vec<String>>,
        /// `l11 l12 l21 l22` (float mode).
        #[arg(long, num_args = 4, allow_negative_numbers = true)]
        l: Option<Vec<f64>>,
    },
    /// Holonomy and Laplacian of the canonical connection on k-simplices.
    Ksimplicial {
        /// Complex file (`s` lines); `--mesh` is also accepted.
        #[arg(long)]
        complex: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain { kind: String, message: String },
}

impl CliError {
    pub fn domain(e: impl std::error::Error + std::fmt::Debug) -> Self {
        CliError::Domain { kind: error_kind(&format!("{e:?}")), message: e.to_string() }
    }
}

/// Innermost variant name of a nested error's `Debug` form.
fn error_kind(debug: &str) -> String {
    let mut s = debug;
    loop {
        let end = s.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(s.len());
        let name = &s[..end];
        let rest = &s[end..];
        match rest.strip_prefix('(') {
            Some(inner) if inner.starts_with(|c: char| c.is_ascii_uppercase()) => s = inner,
            _ => return name.to_string(),
        }
    }
}

/// What a command produced; `ok` is false when a checked invariant fails.
pub struct Output {
    pub json: Value,
    pub csv: Option<String>,
    pub svg: Option<String>,
    pub default_format: Format,
    pub ok: bool,
}

impl Output {
    pub fn json(json: Value, ok: bool) -> Self {
        Output { json, csv: None, svg: None, default_format: Format::Json, ok }
    }
}

pub const BUNDLED: &[(&str, &str)] = &[
    ("octahedron.tri", include_str!("../fixtures/octahedron.tri")),
    ("icosahedron.tri", include_str!("../fixtures/icosahedron.tri")),
    ("tetrahedron.tri", include_str!("../fixtures/tetrahedron.tri")),
    ("torus3.tri", include_str!("../fixtures/torus3.tri")),
    ("torus4.tri", include_str!("../fixtures/torus4.tri")),
    ("torus6.tri", include_str!("../fixtures/torus6.tri")),
    ("bad.tri", include_str!("../fixtures/bad.tri")),
    ("octahedron_half.dom", include_str!("../fixtures/octahedron_half.dom")),
    ("c5.sc", include_str!("../fixtures/c5.sc")),
    ("c6.sc", include_str!("../fixtures/c6.sc")),
    ("simplex4.sc", include_str!("../fixtures/simplex4.sc")),
    ("cross4.sc", include_str!("../fixtures/cross4.sc")),
];

/// Read a file by path, then under `TRIHOLO_FIXTURES`, then from the
/// bundled fixtures.
pub fn read_input(path: &Path) -> Result<String, CliError> {
    if let Ok(s) = std::fs::read_to_string(path) {
        return Ok(s);
    }
    if path.is_relative() {
        if let Some(dir) = std::env::var_os("TRIHOLO_FIXTURES") {
            if let Ok(s) = std::fs::read_to_string(Path::new(&dir).join(path)) {
                return Ok(s);
            }
        }
        if let Some((_, s)) = BUNDLED.iter().find(|(n, _)| Path::new(n) == path) {
            return Ok((*s).to_string());
        }
    }
    Err(CliError::Domain { kind: "FileNotFound".into(), message: format!("cannot read {}", path.display()) })
}

fn validate(run: &RunConfig) -> Result<(), CliError> {
    match (run.mode, run.tol) {
        (Mode::Float, None) => return Err(CliError::Usage("--mode float requires --tol".into())),
        (Mode::Rational, Some(_)) => return Err(CliError::Usage("--tol applies only to --mode float".into())),
        (_, Some(t)) if !(t > 0.0) => return Err(CliError::Usage("--tol must be positive".into())),
        _ => {}
    }
    if let Some(w) = &run.window {
        if w.len() == 3 {
            return Err(CliError::Usage("--window takes `x0 x1` or `x0 x1 y0 y1`".into()));
        }
    }
    Ok(())
}

fn emit(run: &RunConfig, out: &Output) -> Result<(), CliError> {
    let format = run.format.unwrap_or(out.default_format);
    let body = match format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("serializable") + "\n",
        Format::Csv => out.csv.clone().ok_or_else(|| CliError::Usage("this command has no CSV output".into()))?,
        Format::Svg => out.svg.clone().ok_or_else(|| CliError::Usage("this command has no SVG output".into()))?,
    };
    match &run.out {
        Some(p) => std::fs::write(p, body).map_err(|e| CliError::Domain {
            kind: "WriteFailed".into(),
            message: format!("{}: {e}", p.display()),
        }),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = validate(&cli.run).and_then(|_| commands::run(&cli.run, &cli.command)).and_then(|out| {
        emit(&cli.run, &out)?;
        Ok(out.ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain { kind, message }) => {
            println!("{}", json!({ "error": kind, "message": message }));
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::error_kind;

    #[test]
    fn nested_error_kinds() {
        assert_eq!(error_kind("Mesh(NonManifoldEdge { a: 0, b: 1, count: 3 })"), "NonManifoldEdge");
        assert_eq!(error_kind("Syntax { line: 1, message: \"x\" }"), "Syntax");
        assert_eq!(error_kind("UnknownSimplex(3)"), "UnknownSimplex");
        assert_eq!(error_kind("Empty"), "Empty");
    }
}

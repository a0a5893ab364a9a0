use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde_json::json;

mod commands;
mod config;
mod output;

use commands::Options;
use output::{Format, Table};

#[derive(Parser, Debug)]
#[command(name = "ultranorm", version, about = "Exact ultrametric norms, quotient metrics and adelic lattice invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Input configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 6)]
    max_degree: u32,
    /// Degrees to sample: `N` for 1..=N, or a comma list.
    #[arg(long, global = true, default_value = "8", value_parser = parse_degrees)]
    degrees: Degrees,
    #[arg(long, global = true, value_name = "NUM/DEN", value_parser = commands::parse_epsilon)]
    epsilon: Option<BigRational>,
    /// JSON file `{"points": [[...], ...]}` of sample points.
    #[arg(long, global = true)]
    points: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Lattice generators for `lambda`.
    #[arg(long, global = true)]
    lattice: Option<PathBuf>,
    /// Archimedean norm for `lambda`.
    #[arg(long, global = true)]
    norm: Option<PathBuf>,
    /// Include extended sections in `extension-table`.
    #[arg(long, global = true)]
    sections: bool,
    /// Report only the reduction upper bound in `lambda`.
    #[arg(long, global = true)]
    upper_bound: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Orthogonal basis adapted to a flag.
    Orthogonalize,
    /// Quotient norm under a surjection, with attaining lifts.
    Quotient,
    /// Dual norm.
    Dual,
    /// Unit-ball lattice of a norm, or the norm of a lattice.
    Lattice,
    /// Quotient-to-sup ratio σ at sample points.
    SigmaSample,
    /// Minimal extension ratios by degree.
    ExtensionTable,
    /// Trivially valued extension through the Laurent field.
    ExtendTrivial,
    /// Exact λ_Q and λ_Z of a normed lattice.
    Lambda,
    /// Small-basis search along a graded family.
    Nakai,
}

#[derive(Clone, Debug)]
struct Degrees(Vec<u32>);

fn parse_degrees(s: &str) -> Result<Degrees, String> {
    commands::parse_degrees(s).map(Degrees)
}

enum Failure {
    Schema { message: String, path: String },
    Io(String),
    Math(ultranorm::Error),
}

impl Failure {
    fn report(&self) -> (ExitCode, serde_json::Value) {
        match self {
            Failure::Schema { message, path } => {
                (ExitCode::from(2), json!({"error": "schema", "message": message, "path": path}))
            }
            Failure::Io(message) => (ExitCode::from(2), json!({"error": "io", "message": message})),
            Failure::Math(e) => (ExitCode::from(3), json!({"error": "math", "message": e.to_string()})),
        }
    }
}

impl From<ultranorm::Error> for Failure {
    fn from(e: ultranorm::Error) -> Self {
        Failure::Math(e)
    }
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        let token = match seg {
            Segment::Seq { index } => index.to_string(),
            Segment::Map { key } => key.clone(),
            Segment::Enum { variant } => variant.clone(),
            Segment::Unknown => continue,
        };
        out.push('/');
        out.push_str(&token.replace('~', "~0").replace('/', "~1"));
    }
    out
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| Failure::Schema {
        message: e.inner().to_string(),
        path: json_pointer(e.path()),
    })?;
    de.end().map_err(|e| Failure::Schema { message: e.to_string(), path: String::new() })?;
    Ok(value)
}

fn required<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, Failure> {
    p.as_deref().ok_or_else(|| Failure::Schema { message: format!("--{flag} is required"), path: String::new() })
}

fn run(cli: &Cli) -> Result<Table, Failure> {
    let opts = Options {
        max_degree: cli.max_degree,
        degrees: cli.degrees.0.clone(),
        epsilon: cli.epsilon.clone(),
        points: cli.points.as_deref().map(load).transpose()?,
        seed: cli.seed,
        with_sections: cli.sections,
        upper_bound: cli.upper_bound,
    };
    let config = || required(&cli.config, "config");
    let table = match cli.command {
        Command::Orthogonalize => commands::orthogonalize(&load(config()?)?)?,
        Command::Quotient => commands::quotient(&load(config()?)?)?,
        Command::Dual => commands::dual(&load(config()?)?)?,
        Command::Lattice => commands::lattice(&load(config()?)?)?,
        Command::SigmaSample => commands::sigma_sample(&load(config()?)?, &opts)?,
        Command::ExtensionTable => commands::extension_table(&load(config()?)?, &opts)?,
        Command::ExtendTrivial => commands::extend_trivial(&load(config()?)?, &opts)?,
        Command::Lambda => commands::lambda(
            &load(required(&cli.lattice, "lattice")?)?,
            &load(required(&cli.norm, "norm")?)?,
            &opts,
        )?,
        Command::Nakai => commands::nakai(&load(config()?)?, &opts)?,
    };
    Ok(table)
}

fn emit(cli: &Cli, table: &Table) -> io::Result<()> {
    match &cli.out {
        Some(path) => {
            let mut f = io::BufWriter::new(fs::File::create(path)?);
            table.write(cli.format, &mut f)?;
            f.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table.write(cli.format, &mut lock)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ULTRANORM_LOG", "warn")).init();
    let cli = Cli::parse();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{}", json!({"error": "io", "message": e.to_string()}));
            return ExitCode::from(2);
        }
    };
    log::debug!("running {:?}", cli.command);
    match pool.install(|| run(&cli)) {
        Ok(table) => match emit(&cli, &table) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("{}", json!({"error": "io", "message": e.to_string()}));
                ExitCode::from(2)
            }
        },
        Err(f) => {
            let (code, body) = f.report();
            eprintln!("{body}");
            code
        }
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::json;

use morse_topo::canonical::canonical_kr_graph;
use morse_topo::classify::{compare, equivalent_up_to_flip};
use morse_topo::kr_graph::{extract_kr_graph, HeightMesh};
use morse_topo::mcg_action::{canonical_generator_set, degree_along, factor_stabilizer, twist_admissible, CurveClass};
use morse_topo::surface::{CriticalType, Surface};
use morse_topo::symplectic::{factor_symplectic, stabilizer_decompose, SpMatrix};

#[derive(Parser)]
#[command(name = "morse-topo", version, about = "Kronrod-Reeb graphs, critical types and symplectic factorization for Morse mappings on surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the Kronrod-Reeb graph of a height mesh (.hmesh) as DOT, followed by its critical type
    Reeb { mesh: PathBuf },
    /// Decide whether two critical types (.ktype JSON) are Σ-homotopic
    Classify {
        a: PathBuf,
        b: PathBuf,
        /// Also accept a match after reversing the target orientation
        #[arg(long)]
        up_to_flip: bool,
    },
    /// Build the canonical Kronrod-Reeb graph of a critical type
    Canonical {
        /// `orientable:<g>[:<labels>]` or `nonorientable:<g>[:<labels>]`
        #[arg(long)]
        surface: String,
        ktype: PathBuf,
    },
    /// Factor a symplectic matrix fixing α_1 into allowed generators
    SpDecompose {
        #[arg(long)]
        g: usize,
        matrix: PathBuf,
        /// Factor an arbitrary symplectic matrix over all generators
        #[arg(long)]
        general: bool,
    },
    /// Check whether the twist along a class preserves the homotopy class
    Admissible {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
    },
    /// Factor a matrix fixing the level set class of q
    Factor {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// List mapping class group generators adapted to a canonical mapping
    Generators {
        #[arg(long)]
        surface: String,
        ktype: PathBuf,
    },
}

enum Failure {
    Unreadable(String),
    Malformed(String),
    Domain(String),
}

impl Failure {
    fn report(&self) {
        let (kind, message) = match self {
            Failure::Unreadable(m) => ("unreadable file", m),
            Failure::Malformed(m) => ("malformed input", m),
            Failure::Domain(m) => ("domain error", m),
        };
        eprintln!("{}", json!({ "error": kind, "message": format!("{kind}: {message}") }));
    }
}

type Outcome = Result<String, Failure>;

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Unreadable(format!("{}: {e}", path.display())))
}

fn read_ktype(path: &Path) -> Result<CriticalType, Failure> {
    CriticalType::from_json(&read(path)?).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

fn parse_vector(text: &str) -> Result<Vec<i64>, Failure> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|t| t.trim().parse().map_err(|_| Failure::Malformed(format!("bad vector entry `{t}` in `{text}`"))))
        .collect()
}

// a description without labels takes them from the type, in label order
fn surface_for(desc: &str, k: &CriticalType) -> Result<Surface, Failure> {
    let s: Surface = desc.parse().map_err(|e| Failure::Malformed(format!("{e}")))?;
    if s.boundary_count() == 0 && !k.eps.is_empty() {
        return Surface::new(s.is_orientable(), s.genus(), k.eps.labels()).map_err(domain);
    }
    Ok(s)
}

fn with_ktype(dot: &str, k: &CriticalType) -> String {
    format!("{}\n#KTYPE {}\n", dot.trim_end(), k.to_json())
}

fn reeb(path: &Path) -> Outcome {
    let mesh = HeightMesh::parse(&read(path)?).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))?;
    let x = extract_kr_graph(&mesh).map_err(domain)?;
    Ok(with_ktype(&x.graph.to_dot(), &x.critical_type()))
}

fn classify(a: &Path, b: &Path, up_to_flip: bool) -> Outcome {
    let (ka, kb) = (read_ktype(a)?, read_ktype(b)?);
    let mut verdict = compare(&ka, &kb).map_err(domain)?;
    if up_to_flip && !verdict.equivalent && equivalent_up_to_flip(&ka, &kb).map_err(domain)? {
        verdict.equivalent = true;
        verdict.reason = "flip";
    }
    Ok(format!("{}\n", verdict.to_json()))
}

fn canonical(desc: &str, path: &Path) -> Outcome {
    let k = read_ktype(path)?;
    let s = surface_for(desc, &k)?;
    let g = canonical_kr_graph(&s, &k.eps, k.c0, k.c2, k.target, &k.q).map_err(domain)?;
    if g.critical_counts().1 != k.c1 {
        return Err(Failure::Domain(format!("c1 = {} violates the Morse equality on this surface", k.c1)));
    }
    Ok(with_ktype(&g.to_dot(), &k))
}

fn read_matrix(path: &Path) -> Result<SpMatrix, Failure> {
    SpMatrix::parse(&read(path)?).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

fn sp_decompose(g: usize, path: &Path, general: bool) -> Outcome {
    let h = read_matrix(path)?;
    if h.genus() != g {
        return Err(Failure::Domain(format!("matrix has genus {}, expected {g}", h.genus())));
    }
    let word = if general { factor_symplectic(&h) } else { stabilizer_decompose(&h) }.map_err(domain)?;
    Ok(format!("{word}\n"))
}

fn admissible(q: &str, gamma: &str) -> Outcome {
    let (q, gamma) = (parse_vector(q)?, CurveClass::from_i64(&parse_vector(gamma)?));
    let degree = degree_along(&q, &gamma).map_err(domain)?;
    let ok = twist_admissible(&q, &gamma).map_err(domain)?;
    let degree = serde_json::from_str::<serde_json::Value>(&degree.to_string()).unwrap_or_else(|_| json!(degree.to_string()));
    Ok(format!("{}\n", json!({ "admissible": ok, "degree": degree })))
}

fn factor(q: &str, path: &Path) -> Outcome {
    let q = parse_vector(q)?;
    let h = read_matrix(path)?;
    let f = factor_stabilizer(&h, &q).map_err(domain)?;
    let residual = if f.is_torelli() { "Torelli" } else { "nontrivial" };
    Ok(format!("{}\n", json!({ "basis_change": f.basis_change.to_string(), "word": f.word.to_string(), "residual": residual })))
}

fn generators(desc: &str, path: &Path) -> Outcome {
    let k = read_ktype(path)?;
    let s = surface_for(desc, &k)?;
    let gens = canonical_generator_set(&s, &k).map_err(domain)?;
    let list: Vec<serde_json::Value> = gens.iter().map(|g| g.to_json()).collect();
    Ok(format!("{}\n", serde_json::Value::Array(list)))
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Reeb { mesh } => reeb(&mesh),
        Command::Classify { a, b, up_to_flip } => classify(&a, &b, up_to_flip),
        Command::Canonical { surface, ktype } => canonical(&surface, &ktype),
        Command::SpDecompose { g, matrix, general } => sp_decompose(g, &matrix, general),
        Command::Admissible { q, gamma } => admissible(&q, &gamma),
        Command::Factor { q, matrix } => factor(&q, &matrix),
        Command::Generators { surface, ktype } => generators(&surface, &ktype),
    }
}

fn clap_message(e: &clap::Error) -> String {
    let text = e.render().to_string();
    text.strip_prefix("error: ").unwrap_or(&text).to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            ErrorKind::InvalidSubcommand => {
                eprint!("unknown subcommand: {}", clap_message(&e));
                return ExitCode::from(2);
            }
            _ => {
                eprint!("usage error: {}", clap_message(&e));
                return ExitCode::from(2);
            }
        },
    };
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            f.report();
            ExitCode::from(1)
        }
    }
}

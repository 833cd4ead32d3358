//! Command-line front end. Every artifact is written deterministically;
//! `--out -` means standard output.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use crate::blocks::{self, BlockFactorization, BlockKind, SubFactor};
use crate::composer::{BuildError, Builder, Request, Route};
use crate::model::{encode_solution, Document};
use crate::outer::{Capability, ImportFile, OuterProvider, ProviderChain, SearchProvider, DEFAULT_SEARCH_LIMIT};
use crate::search;
use crate::verifier::{verify_block, verify_solution, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;
pub const EXIT_EXTERNAL: i32 = 4;
pub const EXIT_UNAVAILABLE: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "hwp", version, about = "Build and verify uniform {C4, Cm} 2-factorizations of K_v - I")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum IngredientType {
    Hwp12,
    Kts9,
    Equipartite,
}

#[derive(clap::Args, Debug)]
struct Instance {
    #[arg(long)]
    v: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    s: usize,
}

impl Instance {
    fn request(&self) -> Request {
        Request::new(self.v, self.m, self.r, self.s)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct a solution and write it as JSON.
    Build {
        #[command(flatten)]
        instance: Instance,
        /// Solution-format file supplying an outer factorization.
        #[arg(long = "ingredient", value_name = "FILE")]
        ingredients: Vec<PathBuf>,
        /// Search time limit in seconds.
        #[arg(long, value_name = "SECONDS")]
        time_limit: Option<f64>,
        #[arg(long, value_name = "DIR")]
        cache: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Check a solution file (or a block file with --kind).
    Verify {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        report: ReportFormat,
        /// Treat the file as a block factorization of this kind.
        #[arg(long)]
        kind: Option<BlockKind>,
    },
    /// Print the plan for an instance.
    Feasible {
        #[command(flatten)]
        instance: Instance,
        #[arg(long = "ingredient", value_name = "FILE")]
        ingredients: Vec<PathBuf>,
    },
    /// Emit one block factorization.
    Block {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        kind: BlockKind,
        #[arg(long, value_name = "FILE", default_value = "-")]
        out: PathBuf,
    },
    /// Search for (or load from cache) a derived ingredient.
    Ingredient {
        #[arg(long = "type", value_enum)]
        kind: IngredientType,
        /// Comma-separated `key=value` list; equipartite takes a, b, m.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, value_name = "SECONDS")]
        time_limit: Option<f64>,
        #[arg(long, value_name = "DIR")]
        cache: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn io(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Failure {
        let code = match e {
            BuildError::Infeasible(_) => EXIT_INFEASIBLE,
            BuildError::Unsupported(_) => EXIT_UNSUPPORTED,
            BuildError::External(_) => EXIT_EXTERNAL,
            BuildError::IngredientUnavailable(_) | BuildError::Internal(_) => EXIT_UNAVAILABLE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn route_exit_code(route: Route) -> i32 {
    match route {
        Route::Infeasible => EXIT_INFEASIBLE,
        Route::Unsupported => EXIT_UNSUPPORTED,
        Route::External => EXIT_EXTERNAL,
        _ => EXIT_OK,
    }
}

fn seconds(limit: Option<f64>) -> Result<Option<Duration>, Failure> {
    limit
        .map(|s| Duration::try_from_secs_f64(s).map_err(|e| Failure::io(format!("--time-limit: {e}"))))
        .transpose()
}

fn write_artifact(out: &Path, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), Failure> {
    if out == Path::new("-") {
        stdout.write_all(bytes).map_err(|e| Failure::io(e.to_string()))
    } else {
        std::fs::write(out, bytes).map_err(|e| Failure::io(format!("{}: {e}", out.display())))
    }
}

fn chain(ingredients: &[PathBuf], time_limit: Option<Duration>, cache: Option<&Path>) -> Result<ProviderChain, Failure> {
    let imports = ImportFile::load(ingredients).map_err(Failure::io)?;
    let search = SearchProvider {
        time_limit: time_limit.unwrap_or(DEFAULT_SEARCH_LIMIT),
        cache_dir: cache.map(Path::to_path_buf),
    };
    Ok(ProviderChain::new(imports, search))
}

fn parse_params(raw: &str) -> Result<Vec<(String, usize)>, Failure> {
    raw.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Failure::io(format!("--params: expected key=value, got `{p}`")))?;
            let v = v
                .trim()
                .parse()
                .map_err(|e| Failure::io(format!("--params: {k}: {e}")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn param(params: &[(String, usize)], key: &str) -> Result<usize, Failure> {
    params
        .iter()
        .find(|(k, _)| k == key)
        .map(|&(_, v)| v)
        .ok_or_else(|| Failure::io(format!("--params: missing `{key}`")))
}

fn block_from_document(doc: &Document, kind: BlockKind) -> Result<BlockFactorization, Failure> {
    let factors = doc.two_factors().map_err(|e| Failure::io(e.to_string()))?;
    let matching = doc.matching().map_err(|e| Failure::io(e.to_string()))?;
    let sub_factors = doc
        .factors
        .iter()
        .zip(factors)
        .map(|(fd, factor)| SubFactor {
            cycle_length: fd.cycle_length,
            factor,
        })
        .collect();
    Ok(BlockFactorization {
        m: doc.m,
        kind,
        sub_factors,
        removed_matching: matching,
    })
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Build {
            instance,
            ingredients,
            time_limit,
            cache,
            out,
        } => {
            let limit = seconds(time_limit)?;
            let builder = Builder {
                chain: chain(&ingredients, limit, cache.as_deref())?,
                cache_dir: cache,
                time_limit: limit,
            };
            let sol = builder.build(&instance.request())?;
            // the builder verifies already; this is the in-process guard
            let rep = verify_solution(&sol);
            if !rep.ok {
                return Err(Failure {
                    code: EXIT_UNAVAILABLE,
                    message: rep.to_text(),
                });
            }
            write_artifact(&out, &encode_solution(&sol), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Verify { input, report, kind } => {
            let bytes = std::fs::read(&input).map_err(|e| Failure::io(format!("{}: {e}", input.display())))?;
            let doc = Document::from_bytes(&bytes).map_err(|e| Failure::io(e.to_string()))?;
            let rep: VerificationReport = match kind {
                Some(kind) => verify_block(&block_from_document(&doc, kind)?),
                None => verify_solution(&doc.to_solution_unchecked().map_err(|e| Failure::io(e.to_string()))?),
            };
            let text = match report {
                ReportFormat::Json => {
                    let mut s = serde_json::to_string(&rep).expect("report serializes");
                    s.push('\n');
                    s
                }
                ReportFormat::Text => rep.to_text(),
            };
            stdout.write_all(text.as_bytes()).map_err(|e| Failure::io(e.to_string()))?;
            Ok(if rep.ok { EXIT_OK } else { EXIT_IO })
        }
        Command::Feasible { instance, ingredients } => {
            let chain = chain(&ingredients, None, None)?;
            let plan = Builder::with_chain(chain).plan(&instance.request());
            writeln!(stdout, "{}", plan.report()).map_err(|e| Failure::io(e.to_string()))?;
            Ok(route_exit_code(plan.route))
        }
        Command::Block { m, kind, out } => {
            let bf = blocks::block(m, kind).map_err(|e| Failure::io(e.to_string()))?;
            write_artifact(&out, &bf.to_document().to_bytes(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Ingredient {
            kind,
            params,
            time_limit,
            cache,
            out,
        } => {
            let limit = seconds(time_limit)?;
            let params = parse_params(&params)?;
            let unavailable = |message: String| Failure {
                code: EXIT_UNAVAILABLE,
                message,
            };
            let doc = match kind {
                IngredientType::Hwp12 => {
                    let sol = search::hwp12_ingredient(limit, cache.as_deref()).map_err(|e| unavailable(e.to_string()))?;
                    Document::from_bytes(&encode_solution(&sol)).expect("round trip")
                }
                IngredientType::Kts9 | IngredientType::Equipartite => {
                    let cap = match kind {
                        IngredientType::Kts9 => Capability::complete(9, 3),
                        _ => Capability::equipartite(param(&params, "a")?, param(&params, "b")?, param(&params, "m")?),
                    };
                    let provider = SearchProvider {
                        time_limit: limit.unwrap_or(DEFAULT_SEARCH_LIMIT),
                        cache_dir: cache,
                    };
                    let f = provider.provide(&cap).map_err(|e| unavailable(format!("{cap}: {e}")))?;
                    Document::from_factors(
                        cap.order(),
                        cap.cycle_length,
                        None,
                        Some(f.factors.len()),
                        &f.factors,
                        f.leftover.as_ref(),
                    )
                }
            };
            write_artifact(&out, &doc.to_bytes(), stdout)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match dispatch(cli, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.message);
            f.code
        }
    }
}

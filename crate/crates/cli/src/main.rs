//! `proofcomp`: validate proofs, generate question banks, fade worked
//! examples, grade response logs and analyse the grades.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use proofcomp::analytics::{analyze, AnalyticsError};
use proofcomp::config::{ConfigError, GenConfig};
use proofcomp::dsl::{parse_proof, DslError};
use proofcomp::grader::{self, GradeError, ResponseRecord};
use proofcomp::proof::{validate, Proof};
use proofcomp::questions::fade::{fade, FadeError, FadeStrategy, Solution};
use proofcomp::questions::{generate, BankError, QuestionBank};

#[derive(Parser)]
#[command(
    name = "proofcomp",
    version,
    about = "Proof comprehension questions: generate, grade, analyse"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse proofs and check their annotations. Exits 0 only if nothing is reported.
    Validate {
        #[arg(required = true)]
        proofs: Vec<PathBuf>,
        /// Print the reports as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Generate a question bank from a proof.
    Generate {
        proof: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Shuffle seed. PROOFCOMP_SEED, if set, takes precedence.
        #[arg(long)]
        seed: Option<u64>,
        /// Bank JSON; defaults to <proof>.bank.json in the working directory.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Teacher review in markdown; defaults to <proof>.review.md.
        #[arg(long)]
        review: Option<PathBuf>,
    },
    /// Produce faded versions of a worked solution.
    Fade {
        solution: PathBuf,
        #[arg(long)]
        levels: usize,
        #[arg(long, value_enum, default_value_t = Strategy::Backward)]
        strategy: Strategy,
        /// Custom fading: 1-based step numbers hidden at each level, levels
        /// separated by ';', e.g. "4;2,4".
        #[arg(long)]
        hide: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Grade a response log (.csv or .jsonl) against a bank.
    Grade {
        bank: PathBuf,
        responses: PathBuf,
        /// Grades as JSON lines; standard output if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Item statistics and distractor report for graded responses.
    Analyze {
        #[arg(required = true)]
        grades: Vec<PathBuf>,
        /// Bank the grades came from; lists options nobody chose.
        #[arg(long)]
        bank: Option<PathBuf>,
        /// Student ids, one per line; students without a record count as blank.
        #[arg(long)]
        roster: Option<PathBuf>,
        /// Statistics JSON; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Markdown report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write a bank for delivery.
    Export {
        bank: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        /// Include keys, sources and feedback in markdown.
        #[arg(long)]
        teacher: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Edit the feedback stored in a bank.
    Feedback {
        #[command(subcommand)]
        action: FeedbackAction,
    },
}

#[derive(Subcommand)]
enum FeedbackAction {
    /// Attach feedback to an answer class of an item and bump the bank version.
    Add {
        bank: PathBuf,
        item: String,
        class: String,
        text: String,
        /// Write the new bank here instead of replacing the input.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Backward,
    Custom,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

/// Failure classes, each with its own exit code.
#[derive(Debug)]
enum Failure {
    Parse {
        path: Option<PathBuf>,
        message: String,
        line: Option<usize>,
        column: Option<usize>,
    },
    Reference {
        path: Option<PathBuf>,
        message: String,
    },
    Io {
        path: PathBuf,
        message: String,
    },
    Other {
        message: String,
    },
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse { .. } => 2,
            Failure::Reference { .. } => 3,
            Failure::Io { .. } => 4,
            Failure::Other { .. } => 1,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        match self {
            Failure::Parse {
                path: p,
                message,
                line,
                column,
            } => json!({
                "error": "parse", "path": path(p), "message": message, "line": line, "column": column,
            }),
            Failure::Reference { path: p, message } => {
                json!({ "error": "reference", "path": path(p), "message": message })
            }
            Failure::Io { path: p, message } => {
                json!({ "error": "io", "path": p.display().to_string(), "message": message })
            }
            Failure::Other { message } => json!({ "error": "other", "message": message }),
        }
    }

    fn parse(path: &Path, message: impl ToString) -> Self {
        Failure::Parse {
            path: Some(path.to_path_buf()),
            message: message.to_string(),
            line: None,
            column: None,
        }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        Failure::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }

    fn other(message: impl ToString) -> Self {
        Failure::Other {
            message: message.to_string(),
        }
    }

    fn dsl(path: &Path, e: DslError) -> Self {
        match e {
            DslError::Parse { line, column, .. } => Failure::Parse {
                path: Some(path.to_path_buf()),
                message: e.to_string(),
                line: Some(line),
                column: Some(column),
            },
            DslError::Reference { .. }
            | DslError::UnknownStatement(_)
            | DslError::NoWarrantPresent(_) => Failure::Reference {
                path: Some(path.to_path_buf()),
                message: e.to_string(),
            },
        }
    }

    fn grade(path: &Path, e: GradeError) -> Self {
        match e {
            GradeError::Log { line, .. } => Failure::Parse {
                path: Some(path.to_path_buf()),
                message: e.to_string(),
                line: Some(line),
                column: None,
            },
            GradeError::UnknownItem(_) => Failure::Reference {
                path: Some(path.to_path_buf()),
                message: e.to_string(),
            },
            GradeError::Io(io) => Failure::io(path, io),
            GradeError::TypeMismatch { .. } | GradeError::Rules { .. } => Failure::other(e),
        }
    }

    fn config(path: &Path, e: ConfigError) -> Self {
        match e {
            ConfigError::Toml(_) => Failure::parse(path, e),
            _ => Failure::other(format!("{}: {e}", path.display())),
        }
    }

    fn fade(path: &Path, e: FadeError) -> Self {
        match e {
            FadeError::Solution(_) => Failure::parse(path, e),
            _ => Failure::other(e),
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

/// Writes through a temporary file in the target directory, so a failed
/// run never leaves a half-written file behind.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Failure::io(path, e))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| Failure::io(path, e))?;
    tmp.persist(path).map_err(|e| Failure::io(path, e.error))?;
    Ok(())
}

fn emit(output: Option<&Path>, contents: &str) -> Result<()> {
    match output {
        Some(p) => write_atomic(p, contents),
        None => {
            let mut out = io::stdout().lock();
            match out.write_all(contents.as_bytes()) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                    Err(Failure::io(Path::new("<stdout>"), e))
                }
                _ => Ok(()),
            }
        }
    }
}

fn load_proof(path: &Path) -> Result<Proof> {
    parse_proof(&read(path)?).map_err(|e| Failure::dsl(path, e))
}

fn load_bank(path: &Path) -> Result<QuestionBank> {
    QuestionBank::from_json(&read(path)?).map_err(|e| match e {
        BankError::Json(_) | BankError::Format(_) => Failure::parse(path, e),
    })
}

fn load_responses(path: &Path) -> Result<Vec<ResponseRecord>> {
    let file = fs::File::open(path).map_err(|e| Failure::io(path, e))?;
    let jsonl = path
        .extension()
        .is_some_and(|e| e == "jsonl" || e == "json");
    let records = if jsonl {
        grader::read_jsonl(BufReader::new(file))
    } else {
        grader::read_csv(file)
    };
    records.map_err(|e| Failure::grade(path, e))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "bank".to_string())
}

fn seed_override(flag: Option<u64>) -> Result<Option<u64>> {
    match std::env::var("PROOFCOMP_SEED") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            Failure::other(format!(
                "PROOFCOMP_SEED must be an unsigned 64-bit integer, got `{v}`"
            ))
        }),
        Err(_) => Ok(flag),
    }
}

/// "4;2,4" becomes levels {3} and {1, 3} (0-based).
fn parse_hide(hide: &str) -> std::result::Result<Vec<BTreeSet<usize>>, String> {
    hide.split(';')
        .map(|level| {
            level
                .split(',')
                .map(|n| match n.trim().parse::<usize>() {
                    Ok(k) if k >= 1 => Ok(k - 1),
                    _ => Err(format!("`{n}` is not a step number")),
                })
                .collect()
        })
        .collect()
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { proofs, json } => {
            let mut clean = true;
            let mut reports = Vec::new();
            for path in &proofs {
                let report = validate(&load_proof(path)?);
                clean &= report.is_empty();
                if json {
                    reports.push(
                        json!({ "path": path.display().to_string(), "findings": report.findings }),
                    );
                } else if report.is_empty() {
                    println!("{}: ok", path.display());
                } else {
                    println!("{}:", path.display());
                    print!("{report}");
                }
            }
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&reports).expect("reports serialize")
                );
            }
            Ok(if clean {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }

        Command::Generate {
            proof,
            config,
            seed,
            output,
            review,
        } => {
            let p = load_proof(&proof)?;
            let mut cfg = match &config {
                Some(path) => {
                    GenConfig::from_toml(&read(path)?).map_err(|e| Failure::config(path, e))?
                }
                None => GenConfig::default(),
            };
            if let Some(s) = seed_override(seed)? {
                cfg.seed = s;
            }
            let table = match (&cfg.table, &config) {
                (Some(t), Some(path)) => Some(t.build().map_err(|e| Failure::config(path, e))?),
                _ => None,
            };
            let bank = generate(&p, table.as_ref(), &cfg);
            let name = stem(&proof);
            let output = output.unwrap_or_else(|| PathBuf::from(format!("{name}.bank.json")));
            let review = review.unwrap_or_else(|| PathBuf::from(format!("{name}.review.md")));
            write_atomic(&output, &bank.to_json())?;
            write_atomic(&review, &bank.to_markdown(true))?;
            eprintln!(
                "{} items, {} templates skipped; wrote {} and {}",
                bank.items.len(),
                bank.skipped.len(),
                output.display(),
                review.display()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Fade {
            solution,
            levels,
            strategy,
            hide,
            format,
            output,
        } => {
            let sol =
                Solution::from_toml(&read(&solution)?).map_err(|e| Failure::fade(&solution, e))?;
            let strategy = match (strategy, hide) {
                (Strategy::Backward, None) => FadeStrategy::Backward,
                (Strategy::Custom, Some(hide)) => {
                    FadeStrategy::Custom(parse_hide(&hide).map_err(Failure::other)?)
                }
                (Strategy::Backward, Some(_)) => {
                    return Err(Failure::other("--hide needs --strategy custom"))
                }
                (Strategy::Custom, None) => {
                    return Err(Failure::other("--strategy custom needs --hide"))
                }
            };
            let faded = fade(&sol, levels, &strategy).map_err(|e| Failure::fade(&solution, e))?;
            let text = match format {
                Format::Json => {
                    let mut s =
                        serde_json::to_string_pretty(&faded).expect("faded examples serialize");
                    s.push('\n');
                    s
                }
                Format::Markdown => faded
                    .iter()
                    .map(|f| f.to_markdown())
                    .collect::<Vec<_>>()
                    .join("\n"),
            };
            emit(output.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Grade {
            bank,
            responses,
            output,
        } => {
            let b = load_bank(&bank)?;
            let records = load_responses(&responses)?;
            let grades =
                grader::grade_all(&b, &records).map_err(|e| Failure::grade(&responses, e))?;
            emit(output.as_deref(), &grader::grades_to_jsonl(&grades))?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Analyze {
            grades,
            bank,
            roster,
            out,
            report,
        } => {
            let mut all = Vec::new();
            for path in &grades {
                let file = fs::File::open(path).map_err(|e| Failure::io(path, e))?;
                all.extend(
                    grader::read_grades(BufReader::new(file))
                        .map_err(|e| Failure::grade(path, e))?,
                );
            }
            let bank = bank.as_deref().map(load_bank).transpose()?;
            let roster: Option<BTreeSet<String>> = match &roster {
                Some(path) => Some(
                    read(path)?
                        .lines()
                        .map(str::trim)
                        .filter(|l| !l.is_empty() && !l.starts_with('#'))
                        .map(str::to_string)
                        .collect(),
                ),
                None => None,
            };
            let r = analyze(&all, roster.as_ref(), bank.as_ref()).map_err(|e| match e {
                AnalyticsError::MixedBankVersions(_) => Failure::other(e),
            })?;
            emit(out.as_deref(), &r.to_json())?;
            if let Some(path) = report {
                write_atomic(&path, &r.to_markdown())?;
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Export {
            bank,
            format,
            teacher,
            output,
        } => {
            let b = load_bank(&bank)?;
            let text = match format {
                Format::Json => b.to_json(),
                Format::Markdown => b.to_markdown(teacher),
            };
            emit(output.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Feedback {
            action:
                FeedbackAction::Add {
                    bank,
                    item,
                    class,
                    text,
                    output,
                },
        } => {
            let b = load_bank(&bank)?;
            let updated = grader::register_feedback(&b, &item, &class, &text)
                .map_err(|e| Failure::grade(&bank, e))?;
            write_atomic(output.as_deref().unwrap_or(&bank), &updated.to_json())?;
            eprintln!(
                "{item}: feedback for `{class}` stored; bank version {}",
                updated.version
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.code())
        }
    }
}

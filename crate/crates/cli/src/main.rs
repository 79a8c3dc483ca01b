use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kbide_core::editor::reindent;
use kbide_core::engine::{self, Context, EngineError, Propagation};
use kbide_core::language::check_files;
use kbide_core::session::{spawn_run, RunMode, SessionEvent, SourceFile};
use kbide_core::{Diagnostic, ResourceLimits};
use kbide_server::{Mode, ServerConfig};
use thiserror::Error;

#[derive(Parser)]
#[command(name = "kbide", version, about = "Knowledge-base IDE server and tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the IDE over HTTP.
    Serve {
        /// Config file. A missing file means local defaults.
        #[arg(long, default_value = "ide.json")]
        config: PathBuf,
        /// Workspace directory, overriding the config.
        #[arg(long)]
        workspace: Option<PathBuf>,
        #[arg(long)]
        port: Option<u16>,
        #[arg(long, value_enum)]
        mode: Option<CliMode>,
        /// Address to listen on. Required in online mode.
        #[arg(long)]
        bind: Option<std::net::IpAddr>,
    },
    /// Report syntax and type errors.
    Check { files: Vec<PathBuf> },
    /// Run a procedure, or the interactive shell with `--shell`.
    Run {
        files: Vec<PathBuf>,
        #[arg(long)]
        shell: bool,
        /// Procedure to run instead of `main`.
        #[arg(long)]
        entry: Option<String>,
        /// Wall-clock budget in milliseconds.
        #[arg(long)]
        wall_ms: Option<u64>,
    },
    /// Run one inference on a theory and a structure.
    Infer {
        #[arg(value_enum)]
        kind: InferKind,
        #[arg(long, short)]
        theory: String,
        #[arg(long, short)]
        structure: String,
        /// Maximum number of models for modelexpand.
        #[arg(long, short = 'n', default_value_t = 10)]
        models: usize,
        files: Vec<PathBuf>,
    },
    /// Reindent files. Prints to stdout unless `--write` or `--check`.
    Fmt {
        files: Vec<PathBuf>,
        #[arg(long, conflicts_with = "check")]
        write: bool,
        /// Exit with status 1 if any file would change.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    Local,
    Online,
}

#[derive(Clone, Copy, ValueEnum)]
enum InferKind {
    Modelexpand,
    Propagate,
    Unsatcore,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Config(#[from] kbide_server::config::ConfigError),
    #[error(transparent)]
    Serve(#[from] kbide_server::ServeError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("no input files")]
    NoFiles,
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

fn read_files(paths: &[PathBuf]) -> Result<Vec<SourceFile>, CliError> {
    if paths.is_empty() {
        return Err(CliError::NoFiles);
    }
    paths
        .iter()
        .map(|p| {
            let content = std::fs::read_to_string(p).map_err(|source| CliError::Read {
                path: p.clone(),
                source,
            })?;
            Ok(SourceFile::new(p.display().to_string(), content))
        })
        .collect()
}

fn print_diagnostics(diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{d}");
    }
}

fn serve(
    config: &Path,
    workspace: Option<PathBuf>,
    port: Option<u16>,
    mode: Option<CliMode>,
    bind: Option<std::net::IpAddr>,
) -> Result<ExitCode, CliError> {
    let mut cfg = ServerConfig::load(config)?;
    cfg.apply_env(|k| std::env::var(k).ok())?;
    if let Some(m) = mode {
        let mode = match m {
            CliMode::Local => Mode::Local,
            CliMode::Online => Mode::Online,
        };
        if mode != cfg.mode && cfg.limits == kbide_server::config::default_limits(cfg.mode) {
            cfg.limits = kbide_server::config::default_limits(mode);
        }
        cfg.mode = mode;
    }
    if let Some(w) = workspace {
        cfg.workspace = w;
    }
    if let Some(p) = port {
        cfg.port = p;
    }
    if bind.is_some() {
        cfg.bind = bind;
    }
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(kbide_server::serve(cfg, async {
        let _ = tokio::signal::ctrl_c().await;
        tracing::info!("shutting down");
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn check(paths: &[PathBuf]) -> Result<ExitCode, CliError> {
    let files = read_files(paths)?;
    let (program, diags) = check_files(files.iter().map(|f| (f.name.as_str(), f.content.as_str())));
    print_diagnostics(&diags);
    Ok(if program.is_some() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn run(paths: &[PathBuf], shell: bool, entry: Option<String>, wall_ms: Option<u64>) -> Result<ExitCode, CliError> {
    let files = read_files(paths)?;
    let mut limits = ResourceLimits::local();
    if let Some(ms) = wall_ms {
        limits.wall_ms = ms.max(1);
    }
    let mode = if shell { RunMode::Shell } else { RunMode::Main };
    let mut handle = spawn_run(files, mode, entry, limits);
    let stdin = std::io::stdin();
    let mut stdout = std::io::stdout();
    let mut warned_viz = false;
    while let Some(event) = handle.events.blocking_recv() {
        match event {
            SessionEvent::Stdout { data } => {
                stdout.write_all(data.as_bytes())?;
                stdout.flush()?;
            }
            SessionEvent::Stderr { data } => eprint!("{data}"),
            SessionEvent::Ask { prompt } => {
                print!("{prompt}");
                stdout.flush()?;
                let mut line = String::new();
                if stdin.lock().read_line(&mut line)? == 0 {
                    if shell {
                        handle.control.send_input("exit");
                    } else {
                        handle.control.kill();
                    }
                    continue;
                }
                handle
                    .control
                    .send_input(line.trim_end_matches(['\n', '\r']).to_string());
            }
            SessionEvent::Viz { .. } => {
                if !warned_viz {
                    eprintln!("note: grid output is only shown in the web IDE");
                    warned_viz = true;
                }
            }
            SessionEvent::Limit { kind } => eprintln!("stopped: {kind} limit"),
            SessionEvent::Exit { code } => return Ok(ExitCode::from(u8::try_from(code).unwrap_or(1))),
        }
    }
    Ok(ExitCode::FAILURE)
}

fn infer(
    kind: InferKind,
    theory: &str,
    structure: &str,
    models: usize,
    paths: &[PathBuf],
) -> Result<ExitCode, CliError> {
    let files = read_files(paths)?;
    let (program, diags) = check_files(files.iter().map(|f| (f.name.as_str(), f.content.as_str())));
    print_diagnostics(&diags);
    let Some(program) = program else {
        return Ok(ExitCode::FAILURE);
    };
    let (theory, structure) = engine::lookup(&program, theory, structure)?;
    let ctx = Context::new(ResourceLimits::local().engine(), None);
    match kind {
        InferKind::Modelexpand => {
            let found = engine::modelexpand(theory, structure, models.max(1), &ctx)?;
            if found.is_empty() {
                println!("unsatisfiable");
            }
            let rendered: Vec<String> = found.iter().map(|m| m.render()).collect();
            println!("{}", rendered.join("\n\n"));
        }
        InferKind::Propagate => match engine::propagate(theory, structure, &ctx)? {
            Propagation::Refined(p) => println!("{}", p.render()),
            Propagation::Inconsistent => println!("inconsistent"),
        },
        InferKind::Unsatcore => match engine::unsatcore(theory, structure, &ctx) {
            Ok(core) => {
                for d in core.to_diagnostics() {
                    println!("{d}");
                }
            }
            Err(EngineError::Satisfiable) => println!("satisfiable"),
            Err(e) => return Err(e.into()),
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn fmt(paths: &[PathBuf], write: bool, check: bool) -> Result<ExitCode, CliError> {
    let mut changed = false;
    for file in read_files(paths)? {
        let out = reindent(&file.content);
        if out == file.content {
            continue;
        }
        changed = true;
        if check {
            println!("{}", file.name);
        } else if write {
            std::fs::write(&file.name, &out).map_err(|source| CliError::Write {
                path: PathBuf::from(&file.name),
                source,
            })?;
        } else {
            print!("{out}");
        }
    }
    Ok(if check && changed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Serve {
            config,
            workspace,
            port,
            mode,
            bind,
        } => serve(&config, workspace, port, mode, bind),
        Command::Check { files } => check(&files),
        Command::Run {
            files,
            shell,
            entry,
            wall_ms,
        } => run(&files, shell, entry, wall_ms),
        Command::Infer {
            kind,
            theory,
            structure,
            models,
            files,
        } => infer(kind, &theory, &structure, models, &files),
        Command::Fmt { files, write, check } => fmt(&files, write, check),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

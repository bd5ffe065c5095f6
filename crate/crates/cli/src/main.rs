use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use log::LevelFilter;
use pervol_cli::server;
use pervol_cli::{Engine, Failure, Session};
use pervol_core::io::{load_filt, load_points, save_filt, write_filt};
use pervol_core::json::VolumeJson;
use pervol_core::volume::to_off;
use pervol_core::{build_alpha_filtration, jitter, Filtration};

#[derive(Parser)]
#[command(name = "pervol", version, about = "Persistence diagrams, volume optimal cycles and persistence trees")]
struct Cli {
    #[arg(long, global = true, default_value = "warn", value_name = "LEVEL")]
    log_level: LevelFilter,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the alpha filtration of a point file and write it as FILT.
    BuildAlpha {
        points: PathBuf,
        /// Last column of every line is a weight.
        #[arg(long)]
        weighted: bool,
        /// Perturb the points with seeded noise before triangulating.
        #[arg(long, value_name = "SEED")]
        jitter_seed: Option<u64>,
        /// Output path; the FILT text goes to stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Persistence diagram of one degree as JSON.
    Pd {
        filt: PathBuf,
        #[arg(short = 'q', long)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = Engine::Auto)]
        engine: Engine,
        /// Keep pairs born and killed at the same value.
        #[arg(long)]
        include_zero: bool,
    },
    /// Volume optimal cycle of a finite pair.
    Volume {
        filt: PathBuf,
        /// 1-based filtration index of the death simplex.
        #[arg(long)]
        death: usize,
        /// Starting locality radius.
        #[arg(long)]
        radius: Option<f64>,
        /// Margin of the retry that forces a nonzero birth coefficient.
        #[arg(long)]
        eps: Option<f64>,
        /// Write the volume as an OFF mesh.
        #[arg(long, value_name = "PATH")]
        off: Option<PathBuf>,
        /// Write the cycle as an OFF mesh.
        #[arg(long, value_name = "PATH")]
        cycle_off: Option<PathBuf>,
    },
    /// Persistence tree of degree n−1 pairs.
    Tree {
        filt: PathBuf,
        #[arg(long)]
        include_zero: bool,
    },
    /// Optimal cycle of a pair, addressed by death index or, for essential pairs, birth index.
    Oc(OcArgs),
    /// Serve a filtration over local HTTP.
    Serve {
        filt: PathBuf,
        #[arg(long, env = "PERVOL_PORT", default_value_t = 8750)]
        port: u16,
        /// Directory of static files served under /ui.
        #[arg(long)]
        ui: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OcArgs {
    filt: PathBuf,
    #[arg(long, required_unless_present = "birth", conflicts_with = "birth")]
    death: Option<usize>,
    #[arg(long)]
    birth: Option<usize>,
}

fn session(path: &Path) -> Result<Session, Failure> {
    let f: Filtration = load_filt(path).map_err(|e| Failure::from(e).with_path(path))?;
    log::info!("loaded {} simplices from {}", f.len(), path.display());
    Ok(Session::new(f))
}

trait WithPath {
    fn with_path(self, path: &Path) -> Self;
}

impl WithPath for Failure {
    fn with_path(mut self, path: &Path) -> Self {
        self.message = format!("{}: {}", path.display(), self.message);
        self
    }
}

fn counts_line(f: &Filtration) -> String {
    const NAMES: [&str; 4] = ["vertices", "edges", "triangles", "tetrahedra"];
    let parts: Vec<String> = f.count_by_dim().iter().zip(NAMES).map(|(c, name)| format!("{c} {name}")).collect();
    format!("{} simplices: {}", f.len(), parts.join(", "))
}

/// Writes to stdout; a closed pipe ends output quietly.
fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::input(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::BuildAlpha { points, weighted, jitter_seed, output } => {
            let mut pc = load_points(&points, weighted).map_err(|e| Failure::from(e).with_path(&points))?;
            if let Some(seed) = jitter_seed {
                pc = jitter(&pc, seed);
            }
            let f = build_alpha_filtration(&pc)?;
            match output {
                Some(out) => {
                    save_filt(&f, &out).map_err(|e| Failure::from(e).with_path(&out))?;
                    emit(&format!("{}\n", counts_line(&f)))?;
                }
                None => {
                    emit(&write_filt(&f))?;
                    eprintln!("{}", counts_line(&f));
                }
            }
        }
        Command::Pd { filt, degree, engine, include_zero } => {
            emit(&format!("{}\n", session(&filt)?.diagram(degree, engine, include_zero)?))?;
        }
        Command::Volume { filt, death, radius, eps, off, cycle_off } => {
            let s = session(&filt)?;
            let ov = s.solve_volume(death, radius, eps)?;
            let f = s.filtration();
            if let Some(path) = off {
                write(&path, &to_off(f, &ov.volume.support())?)?;
            }
            if let Some(path) = cycle_off {
                write(&path, &to_off(f, &ov.cycle.support())?)?;
            }
            let json = serde_json::to_string_pretty(&VolumeJson::new(f, &ov)).expect("volume JSON");
            emit(&format!("{json}\n"))?;
        }
        Command::Tree { filt, include_zero } => emit(&format!("{}\n", session(&filt)?.tree(include_zero)?))?,
        Command::Oc(OcArgs { filt, death, birth }) => {
            let s = session(&filt)?;
            let out = match (death, birth) {
                (Some(d), _) => s.cycle(d, false)?,
                (None, Some(b)) => s.cycle(b, true)?,
                (None, None) => unreachable!("clap requires one of --death and --birth"),
            };
            emit(&format!("{out}\n"))?;
        }
        Command::Serve { filt, port, ui } => {
            let s = Arc::new(session(&filt)?);
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::input(e.to_string()))?;
            rt.block_on(async move {
                let (listener, addr) = server::bind(port).await.map_err(|e| Failure::input(format!("port {port}: {e}")))?;
                eprintln!("serving {} on http://{addr}", filt.display());
                server::serve(listener, server::router(s, ui)).await.map_err(|e| Failure::input(e.to_string()))
            })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().filter_level(cli.log_level).format_timestamp(None).init();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

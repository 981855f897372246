use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use edgebasis::config::Config;
use edgebasis::gallery::Gallery;
use edgebasis::report::{to_json, MatchReport, SearchReport, SynthTruth, SCHEMA_VERSION};
use edgebasis::{edgeset, mc, overlay, pgm};
use edgebasis_core::{
    corrupt_and_transform, extract_edges, match_edge_sets, random_edge_set, BasisArity, CorruptionSpec, EdgeSet,
    Transform,
};

#[derive(Parser)]
#[command(name = "edgebasis", version, about = "Match oriented-edge images under shift and scale")]
struct Cli {
    /// TOML file with [extract], [hypothesis] and [verify] sections.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one config value, e.g. `--set verify.accept_score=0.5`.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (directory for `synth`); stdout when absent.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Print the effective configuration to stderr.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract oriented edges from a PGM image.
    Extract { image: PathBuf },
    /// Match a probe edge set against a reference. Exit 0 accept, 1 reject.
    Match(Pair),
    /// Draw a reference, a probe and a match result as SVG.
    Overlay {
        #[command(flatten)]
        pair: Pair,
        /// JSON written by `match`.
        #[arg(long, value_name = "PATH")]
        result: Option<PathBuf>,
    },
    /// Generate a random reference set and a transformed, corrupted probe.
    Synth(SynthArgs),
    /// Closed-form and Monte Carlo basis-miss probability, as CSV.
    Mc(McArgs),
    #[command(subcommand)]
    Gallery(GalleryCommand),
}

#[derive(Args)]
struct Pair {
    #[arg(long = "ref", value_name = "EDGESET")]
    reference: PathBuf,
    #[arg(long, value_name = "EDGESET")]
    probe: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 300)]
    n: usize,
    #[arg(long, default_value_t = 256)]
    width: usize,
    #[arg(long, default_value_t = 256)]
    height: usize,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    tx: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    ty: f64,
    #[arg(long, default_value_t = 0.0)]
    dropout: f64,
    #[arg(long, default_value_t = 0.0)]
    jitter_pos: f64,
    #[arg(long, default_value_t = 0.0)]
    jitter_theta: f64,
    #[arg(long, default_value_t = 0.0)]
    clutter: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Arity {
    Two,
    Three,
}

#[derive(Args)]
struct McArgs {
    /// Non-detection probabilities, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.25, 0.5])]
    p: Vec<f64>,
    /// Couple counts, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1, 5, 10])]
    m: Vec<u32>,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, value_enum, default_value_t = Arity::Two)]
    arity: Arity,
    /// Run on one thread (same output).
    #[arg(long)]
    sequential: bool,
}

#[derive(Subcommand)]
enum GalleryCommand {
    /// Add an edge set under a new id.
    Enroll {
        #[arg(long, value_name = "DIR")]
        root: PathBuf,
        #[arg(long)]
        id: String,
        edgeset: PathBuf,
    },
    /// Rank every enrolled set against a probe.
    Search {
        #[arg(long, value_name = "DIR")]
        root: PathBuf,
        #[arg(long, value_name = "EDGESET")]
        probe: PathBuf,
        #[arg(long)]
        sequential: bool,
    },
}

fn read_edgeset(path: &Path) -> Result<EdgeSet> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    edgeset::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Enrollment time; `SOURCE_DATE_EPOCH` pins it for reproducible galleries.
fn now() -> Result<u64> {
    if let Ok(v) = std::env::var("SOURCE_DATE_EPOCH") {
        return v.trim().parse().context("SOURCE_DATE_EPOCH must be an integer");
    }
    Ok(SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = Config::load(cli.config.as_deref(), &cli.set)?;
    if cli.verbose {
        eprintln!("# effective configuration (seed = {})\n{}", cli.seed, cfg.to_toml());
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Extract { image } => {
            let bytes = std::fs::read(&image).with_context(|| format!("reading {}", image.display()))?;
            let img = pgm::load_pgm(&bytes).with_context(|| format!("decoding {}", image.display()))?;
            let set = extract_edges(&img, &cfg.extract)?;
            emit(out, &edgeset::serialize(&set))?;
        }
        Command::Match(pair) => {
            let a = read_edgeset(&pair.reference)?;
            let n = read_edgeset(&pair.probe)?;
            let r = match_edge_sets(&a, &n, &cfg.hypothesis, &cfg.verify)?;
            let decided = r.decided;
            emit(out, &to_json(&MatchReport::new(r)))?;
            return Ok(if decided { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Overlay { pair, result } => {
            let a = read_edgeset(&pair.reference)?;
            let n = read_edgeset(&pair.probe)?;
            let report = match result {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    let report: MatchReport =
                        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
                    if report.version != SCHEMA_VERSION {
                        bail!("{}: unsupported result version {}", path.display(), report.version);
                    }
                    Some(report.result)
                }
                None => None,
            };
            emit(out, &overlay::render_svg(&a, &n, report.as_ref()))?;
        }
        Command::Synth(s) => {
            let Some(dir) = out else { bail!("synth needs --out DIR") };
            let t = Transform { s: s.scale, tx: s.tx, ty: s.ty };
            let spec = CorruptionSpec {
                dropout: s.dropout,
                jitter_pos: s.jitter_pos,
                jitter_theta: s.jitter_theta,
                clutter_frac: s.clutter,
                seed: cli.seed.wrapping_add(1),
            };
            let a = edgeset::quantized(&random_edge_set(s.n, s.width, s.height, cli.seed));
            let n = corrupt_and_transform(&a, &t, &spec, s.width, s.height)?;
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let truth = SynthTruth { version: SCHEMA_VERSION, seed: cli.seed, edges: s.n, transform: t, corruption: spec };
            emit(Some(&dir.join("ref.edgeset")), &edgeset::serialize(&a))?;
            emit(Some(&dir.join("probe.edgeset")), &edgeset::serialize(&n))?;
            emit(Some(&dir.join("truth.json")), &to_json(&truth))?;
        }
        Command::Mc(m) => {
            let arity = match m.arity {
                Arity::Two => BasisArity::Two,
                Arity::Three => BasisArity::Three,
            };
            let csv = mc::sweep_csv(&m.p, &m.m, arity, m.trials, cli.seed, !m.sequential)?;
            emit(out, &csv)?;
        }
        Command::Gallery(GalleryCommand::Enroll { root, id, edgeset: path }) => {
            let set = read_edgeset(&path)?;
            let mut g = Gallery::open(&root)?;
            let source = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
            g.enroll(&id, &set, &source, now()?)?;
        }
        Command::Gallery(GalleryCommand::Search { root, probe, sequential }) => {
            let probe = read_edgeset(&probe)?;
            let g = Gallery::open(&root)?;
            let results = if sequential {
                g.search_sequential(&probe, &cfg.hypothesis, &cfg.verify)?
            } else {
                g.search(&probe, &cfg.hypothesis, &cfg.verify)?
            };
            emit(out, &to_json(&SearchReport { version: SCHEMA_VERSION, results }))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

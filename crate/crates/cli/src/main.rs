use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use conchain::eval::{render_tables, run_once};
use conchain::ingest::{ingest_pairs, load_state, read_state_file, write_state_file, Server};
use conchain::ontology::{generate_ontology, parse_rdf, write_rdf, GeneratorConfig, SamplerConfig};
use conchain::report::ReportJson;
use conchain::{assemble, classify_all, ChainStore, RuleConfig};

/// Concept-chain clustering and ontology reconstruction.
#[derive(Parser)]
#[command(name = "conchain", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random ontology and write it as RDF.
    Generate {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample an ontology, reconstruct it and compare. Exits 0 on an exact
    /// match and 2 otherwise.
    Run {
        /// RDF ontology file. A generated ontology is used when omitted.
        ontology: Option<PathBuf>,
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 300)]
        presentations: usize,
        /// Corrupt every n-th chain part; 0 disables noise.
        #[arg(long, default_value_t = 10)]
        noise_every: usize,
        #[command(flatten)]
        rules: RuleArgs,
    },
    /// Apply `parent<TAB>child` lines to a state file.
    Observe {
        #[arg(long)]
        state: PathBuf,
        /// Input file; standard input when omitted or `-`.
        input: Option<PathBuf>,
    },
    /// Classify a saved state and print the report.
    Classify {
        #[arg(long)]
        state: PathBuf,
        /// Also print the reconstructed edges.
        #[arg(long)]
        edges: bool,
        #[command(flatten)]
        rules: RuleArgs,
    },
    /// Accept observations over TCP.
    Serve {
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1:7878")]
        listen: String,
        #[command(flatten)]
        rules: RuleArgs,
    },
}

#[derive(Args)]
struct ShapeArgs {
    #[arg(long, default_value_t = GeneratorConfig::default().depth)]
    depth: usize,
    #[arg(long, default_value_t = GeneratorConfig::default().branching)]
    branching: usize,
    #[arg(long, default_value_t = GeneratorConfig::default().persons)]
    persons: usize,
}

impl ShapeArgs {
    fn config(&self, seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            depth: self.depth,
            branching: self.branching,
            persons: self.persons,
            seed,
        }
    }
}

#[derive(Args)]
struct RuleArgs {
    #[arg(long)]
    low_sum_ratio: Option<f64>,
    #[arg(long)]
    repeat_dominance_ratio: Option<f64>,
    #[arg(long)]
    small_band: Option<u64>,
}

impl RuleArgs {
    fn config(&self) -> Result<RuleConfig> {
        let d = RuleConfig::default();
        let cfg = RuleConfig {
            low_sum_ratio: self.low_sum_ratio.unwrap_or(d.low_sum_ratio),
            repeat_dominance_ratio: self.repeat_dominance_ratio.unwrap_or(d.repeat_dominance_ratio),
            small_band: self.small_band.unwrap_or(d.small_band),
            ..d
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Generate { shape, seed, out } => generate(&shape.config(seed), out.as_deref()),
        Command::Run {
            ontology,
            shape,
            seed,
            presentations,
            noise_every,
            rules,
        } => {
            let truth = match ontology {
                Some(path) => {
                    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    parse_rdf(&text).with_context(|| format!("parsing {}", path.display()))?
                }
                None => generate_ontology(&shape.config(seed)),
            };
            let sampler = SamplerConfig {
                presentations,
                noise_every,
                seed,
            };
            let result = run_once(&truth, &sampler, &rules.config()?)?;
            let mut out = io::stdout().lock();
            writeln!(out, "{}", ReportJson::from_seed_result(&result).to_line())?;
            write!(out, "{}", render_tables(&result.report))?;
            Ok(if result.metrics.exact { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Observe { state, input } => observe(&state, input.as_deref()),
        Command::Classify { state, edges, rules } => classify(&state, edges, &rules.config()?),
        Command::Serve { state, listen, rules } => {
            let store = match &state {
                Some(path) => read_state_file(path).with_context(|| format!("loading {}", path.display()))?,
                None => ChainStore::new(),
            };
            let server = Server::bind(&listen, store, state, rules.config()?).with_context(|| format!("binding {listen}"))?;
            println!("listening on {}", server.local_addr()?);
            io::stdout().flush()?;
            server.run()?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn generate(cfg: &GeneratorConfig, out: Option<&Path>) -> Result<ExitCode> {
    let tree = generate_ontology(cfg);
    let text = write_rdf(&tree)?;
    let summary = format!("{} nodes, {} edges", tree.node_count(), tree.edge_count());
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            println!("{summary}");
        }
        None => {
            print!("{text}");
            eprintln!("{summary}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn observe(state: &Path, input: Option<&Path>) -> Result<ExitCode> {
    let mut store = read_state_file(state).with_context(|| format!("loading {}", state.display()))?;
    let summary = match input {
        Some(path) if path != Path::new("-") => {
            let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
            ingest_pairs(&mut store, BufReader::new(file))?
        }
        _ => ingest_pairs(&mut store, io::stdin().lock())?,
    };
    for (line, message) in &summary.skipped {
        eprintln!("line {line}: {message}");
    }
    write_state_file(state, &store.snapshot()).with_context(|| format!("writing {}", state.display()))?;
    println!("applied {}, skipped {}", summary.applied, summary.skipped.len());
    Ok(ExitCode::SUCCESS)
}

fn classify(state: &Path, edges: bool, rules: &RuleConfig) -> Result<ExitCode> {
    let text = match fs::read_to_string(state) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => bail!("state file {} does not exist", state.display()),
        Err(e) => return Err(e.into()),
    };
    let snap = load_state(&text).with_context(|| format!("loading {}", state.display()))?.snapshot();
    let report = classify_all(&snap, rules);
    let (tree, notes) = assemble(&report);
    let mut out = io::stdout().lock();
    writeln!(out, "{}", ReportJson::new(&report, &notes).to_line())?;
    write!(out, "{}", render_tables(&report))?;
    if edges {
        writeln!(out)?;
        for (parent, child) in tree.edges() {
            writeln!(out, "{parent}\t{child}")?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

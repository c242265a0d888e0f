use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use qce_core::channel_games::{analytic_reward, channel_reward, TableGame, TableKind};
use qce_core::classical::{cond_majorizes_classical_with, ClassicalJoint};
use qce_core::cusc::is_cusc_with;
use qce_core::entropy::{cond_entropy_down, dual_cond_entropy, Divergence};
use qce_core::games::{RewardOptions, Strategy};
use qce_core::io::{
    from_json, round12, to_json, ChannelGameJson, ChannelJson, DensityJson, RewardReportJson, StateGameJson,
};
use qce_core::mc::{simulate_channel_game, simulate_state_game, SimResult};
use qce_core::state_games::{reward, scramble, strategy_value};
use qce_core::{QceError, Result};

const DEFAULT_CUSC_TOL: f64 = 1e-7;
const DEFAULT_TABLE_TOL: f64 = 1e-3;

#[derive(Parser, Debug)]
#[command(name = "qce", version, about = "Quantum conditional entropy and gambling-game numerics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Conditional entropy H(A|B) of a bipartite state.
    Entropy {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value = "umegaki")]
        divergence: Divergence,
        /// Also report the dual entropy.
        #[arg(long)]
        dual: bool,
    },
    /// Checks whether a bipartite channel is conditionally unital and semi-causal.
    CuscCheck {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        search: Search,
    },
    /// Optimised reward of a state in a conditional gambling game.
    StateReward {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        game: PathBuf,
        #[command(flatten)]
        search: Search,
    },
    /// Optimised reward of a channel in a channel gambling game.
    ChannelReward {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        game: PathBuf,
        #[command(flatten)]
        search: Search,
    },
    /// Analytic and optimised rewards of the noisy qubit channels.
    Table {
        /// Comma-separated noise parameters.
        #[arg(long, value_delimiter = ',', default_value = "0,0.3,0.7,1")]
        gamma: Vec<f64>,
        /// Comma-separated budget distribution, padded to four entries.
        #[arg(long, value_delimiter = ',', default_value = "0.4,0.3,0.2,0.1")]
        px: Vec<f64>,
        /// Gap above which a cell is flagged.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        search: Search,
    },
    /// Classical conditional majorization of two joint distributions given as CSV.
    ClassicalMajorize {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        #[command(flatten)]
        search: Search,
    },
    /// Monte Carlo simulation of the optimised strategy for a state or channel game.
    Simulate {
        #[arg(long, conflicts_with = "channel", required_unless_present = "channel")]
        state: Option<PathBuf>,
        #[arg(long)]
        channel: Option<PathBuf>,
        #[arg(long)]
        game: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        rounds: u64,
        #[command(flatten)]
        search: Search,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct Search {
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Search {
    fn options(self) -> RewardOptions {
        RewardOptions::default().with_restarts(self.restarts).with_seed(self.seed)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Md,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EntropyReport {
    divergence: Divergence,
    h_down: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TableRow {
    channel: String,
    gamma: f64,
    game: TableGame,
    analytic: f64,
    optimized: f64,
    gap: f64,
    flagged: bool,
    erratum_suspect: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SimulationReport {
    #[serde(flatten)]
    result: SimResult,
    /// Exact value of the simulated strategy.
    strategy_value: f64,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| QceError::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    from_json(&read(path)?).map_err(|e| QceError::InvalidInput(format!("{}: {e}", path.display())))
}

fn read_csv(path: &Path) -> Result<ClassicalJoint> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)
        .map_err(|e| QceError::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| QceError::InvalidInput(format!("{}: {e}", path.display())))?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| QceError::InvalidInput(format!("{}: '{f}': {e}", path.display()))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    ClassicalJoint::from_rows(&rows)
}

fn cmd_entropy(state: &Path, divergence: Divergence, dual: bool) -> Result<String> {
    let rho = read_json::<DensityJson>(state)?.to_state()?;
    if rho.dims().len() != 2 {
        return Err(QceError::DimensionMismatch(format!("entropy needs a bipartite state, got dims {:?}", rho.dims())));
    }
    let h_down = cond_entropy_down(&rho, divergence)?;
    let dual = if dual { Some(dual_cond_entropy(|s| cond_entropy_down(s, divergence), &rho)?) } else { None };
    to_json(&EntropyReport { divergence, h_down, dual })
}

fn cmd_cusc(channel: &Path, tol: Option<f64>, search: Search) -> Result<String> {
    let ch = read_json::<ChannelJson>(channel)?.to_channel()?;
    to_json(&is_cusc_with(&ch, tol.unwrap_or(DEFAULT_CUSC_TOL), 20, search.seed)?)
}

fn cmd_state_reward(state: &Path, game: &Path, search: Search) -> Result<String> {
    let rho = read_json::<DensityJson>(state)?.to_state()?;
    let game = read_json::<StateGameJson>(game)?.to_spec()?;
    to_json(&RewardReportJson::from_report(&reward(&rho, &game, &search.options())?))
}

fn cmd_channel_reward(channel: &Path, game: &Path, search: Search) -> Result<String> {
    let ch = read_json::<ChannelJson>(channel)?.to_channel()?;
    let game = read_json::<ChannelGameJson>(game)?.to_spec()?;
    to_json(&RewardReportJson::from_report(&channel_reward(&ch, &game, &search.options())?))
}

fn table_rows(gammas: &[f64], px: &[f64], tol: f64, search: Search) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for kind in TableKind::ALL {
        for &gamma in gammas {
            let ch = kind.channel(gamma)?;
            for game in [TableGame::Bell, TableGame::Zero] {
                let analytic = analytic_reward(kind, gamma, game, px)?;
                let optimized = channel_reward(&ch, &game.spec(px)?, &search.options())?.value;
                let gap = (optimized - analytic).abs();
                rows.push(TableRow {
                    channel: kind.name().to_string(),
                    gamma,
                    game,
                    analytic,
                    optimized,
                    gap,
                    flagged: gap > tol,
                    erratum_suspect: kind.erratum_suspect(game),
                });
            }
        }
    }
    Ok(rows)
}

fn game_name(g: TableGame) -> &'static str {
    match g {
        TableGame::Bell => "bell",
        TableGame::Zero => "zero",
    }
}

fn render_table(rows: &[TableRow], format: Format) -> Result<String> {
    let fmt = |x: f64| {
        let r = round12(x);
        if r != 0.0 && (r.abs() < 1e-4 || r.abs() >= 1e12) { format!("{r:e}") } else { format!("{r}") }
    };
    let mut out = String::new();
    match format {
        Format::Json => return to_json(&rows),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io_err = |e: csv::Error| QceError::Numerical(format!("csv output failed: {e}"));
            w.write_record(["channel", "gamma", "game", "analytic", "optimized", "gap", "flagged", "erratum_suspect"])
                .map_err(io_err)?;
            for r in rows {
                w.write_record([
                    r.channel.clone(),
                    fmt(r.gamma),
                    game_name(r.game).to_string(),
                    fmt(r.analytic),
                    fmt(r.optimized),
                    fmt(r.gap),
                    r.flagged.to_string(),
                    r.erratum_suspect.to_string(),
                ])
                .map_err(io_err)?;
            }
            let bytes = w.into_inner().map_err(|e| QceError::Numerical(format!("csv output failed: {e}")))?;
            out = String::from_utf8(bytes).map_err(|e| QceError::Numerical(e.to_string()))?;
        }
        Format::Md => {
            out.push_str("| channel | gamma | game | analytic | optimized | gap | note |\n");
            out.push_str("|---|---|---|---|---|---|---|\n");
            for r in rows {
                let mut note = Vec::new();
                if r.flagged {
                    note.push("GAP");
                }
                if r.erratum_suspect {
                    note.push("erratum-suspect");
                }
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} | {} |",
                    r.channel,
                    fmt(r.gamma),
                    game_name(r.game),
                    fmt(r.analytic),
                    fmt(r.optimized),
                    fmt(r.gap),
                    note.join(", ")
                );
            }
        }
    }
    Ok(out)
}

fn cmd_classical(p: &Path, q: &Path, search: Search) -> Result<String> {
    let p = read_csv(p)?;
    let q = read_csv(q)?;
    to_json(&cond_majorizes_classical_with(&p, &q, 500, search.seed)?)
}

fn cmd_simulate(state: Option<&Path>, channel: Option<&Path>, game: &Path, rounds: u64, search: Search) -> Result<String> {
    if rounds == 0 {
        return Err(QceError::InvalidInput("rounds must be at least 1".into()));
    }
    let opts = search.options();
    let report = if let Some(state) = state {
        let rho = read_json::<DensityJson>(state)?.to_state()?;
        let game = read_json::<StateGameJson>(game)?.to_spec()?;
        let r = reward(&rho, &game, &opts)?;
        let Strategy::State(s) = &r.strategy else { unreachable!("state games return state strategies") };
        // One strategy serves both branches, so its exact value is recomputed per branch.
        let plain = strategy_value(&rho, &game.t, s)?;
        let adv_value = match &r.adversary {
            Some(a) if game.p_adv > 0.0 => strategy_value(&scramble(&rho, &a.basis, &a.partition)?, &game.t, s)?,
            _ => plain,
        };
        let result = simulate_state_game(&rho, &game, s, r.adversary.as_ref(), rounds, search.seed)?;
        SimulationReport { result, strategy_value: game.p_adv * adv_value + (1.0 - game.p_adv) * plain }
    } else {
        let path = channel.expect("clap requires --state or --channel");
        let ch = read_json::<ChannelJson>(path)?.to_channel()?;
        let game = read_json::<ChannelGameJson>(game)?.to_spec()?;
        let r = channel_reward(&ch, &game, &opts)?;
        let Strategy::Preprocessing(e) = &r.strategy else { unreachable!("channel games return preprocessings") };
        let result = simulate_channel_game(&ch, e, &game, rounds, search.seed)?;
        SimulationReport { result, strategy_value: r.value }
    };
    to_json(&report)
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Entropy { state, divergence, dual } => cmd_entropy(&state, divergence, dual),
        Command::CuscCheck { channel, tol, search } => cmd_cusc(&channel, tol, search),
        Command::StateReward { state, game, search } => cmd_state_reward(&state, &game, search),
        Command::ChannelReward { channel, game, search } => cmd_channel_reward(&channel, &game, search),
        Command::Table { gamma, px, tol, format, search } => {
            render_table(&table_rows(&gamma, &px, tol.unwrap_or(DEFAULT_TABLE_TOL), search)?, format)
        }
        Command::ClassicalMajorize { p, q, search } => cmd_classical(&p, &q, search),
        Command::Simulate { state, channel, game, rounds, search } => {
            cmd_simulate(state.as_deref(), channel.as_deref(), &game, rounds, search)
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("QCE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    configure_threads();
    match run(cli) {
        Ok(out) => {
            // A closed pipe on the reader's side is not a failure of the computation.
            let _ = writeln!(std::io::stdout().lock(), "{}", out.trim_end());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 1 } else { 2 })
        }
    }
}

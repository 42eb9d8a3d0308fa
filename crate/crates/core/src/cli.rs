//! `ttroute` command line. Parsing failures exit with status 2, runtime
//! failures with status 1 and a one-line diagnostic on stderr.
//!
//! Every random draw derives from `--seed` (or the config's seed list), so
//! the same invocation always writes the same files.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::estimators::{write_trace_csv, ProviderKind};
use crate::experiments::{
    compare_paths, non_increasing_seed_count, prepare_seed, run_repetitions, run_schedule, seeded_run, sweep_regression,
    sweep_snr, write_comparison, write_experiment, ExperimentConfig, ExperimentSummary, MapSelector, Scenario,
    REGRESSION_RANGE, REPETITION_SET,
};
use crate::planner::{plan, write_paths_csv, PathRecord};
use crate::topo_map::{builtin_map, save_map, LayoutParams, MapFamily, NodeId};
use crate::world_sim::Snr;

/// Environment variable holding the log filter (`error`, `info`, `debug`,
/// or any `env_logger` directive).
pub const LOG_ENV: &str = "TTROUTE_LOG";

#[derive(Debug, Parser)]
#[command(name = "ttroute", version, about = "Travel-time estimation and route planning for warehouse robots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a map and write it as JSON.
    GenMap(GenMapArgs),
    /// Plan one route with a chosen cost provider.
    Plan(PlanArgs),
    /// Run the closed plan/execute loop for one provider and one seed.
    Simulate(SimulateArgs),
    /// Repetition experiment: every provider against the heuristic.
    Experiment(ExperimentArgs),
    /// Dynamic-provider sweep over regression order or SNR.
    Sweep(SweepArgs),
    /// Plan one source/destination pair with all three providers.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    WindingRacks,
    RandomRacks,
    Hub,
}

impl From<FamilyArg> for MapFamily {
    fn from(f: FamilyArg) -> MapFamily {
        match f {
            FamilyArg::WindingRacks => MapFamily::WindingRacks,
            FamilyArg::RandomRacks => MapFamily::RandomRacks,
            FamilyArg::Hub => MapFamily::Hub,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProviderArg {
    Heuristic,
    Static,
    Dynamic,
}

impl From<ProviderArg> for ProviderKind {
    fn from(p: ProviderArg) -> ProviderKind {
        match p {
            ProviderArg::Heuristic => ProviderKind::Heuristic,
            ProviderArg::Static => ProviderKind::Static,
            ProviderArg::Dynamic => ProviderKind::Dynamic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    Flat,
    Battery,
    BatteryFloor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    RegressionNo,
    Snr,
}

#[derive(Debug, Args)]
pub struct GenMapArgs {
    /// Map family to generate with default layout parameters.
    #[arg(long, value_enum, conflicts_with = "map", required_unless_present = "map")]
    pub family: Option<FamilyArg>,
    /// Write one of the numbered maps instead.
    #[arg(long, value_parser = parse_builtin)]
    pub map: Option<u8>,
    /// Layout seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(short, long)]
    pub out: PathBuf,
}

/// Flags shared by every experiment-style subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Experiment configuration (JSON). Flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Map: 1, 2, 3 or a path to a map JSON file.
    #[arg(long)]
    pub map: Option<MapSelector>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Planning calls per run.
    #[arg(long, value_parser = parse_repetitions)]
    pub repetitions: Option<usize>,
    /// Regression order of the dynamic filter.
    #[arg(long, value_parser = parse_regression_no)]
    pub regression_no: Option<usize>,
    /// Observation SNR in dB.
    #[arg(long, value_parser = parse_snr)]
    pub snr: Option<Snr>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value = "dynamic")]
    pub provider: ProviderArg,
    /// Source node id.
    #[arg(long)]
    pub from: usize,
    /// Destination node id.
    #[arg(long)]
    pub to: usize,
    /// Closed-loop calls on the seed's schedule before planning; no
    /// warm-up unless given.
    #[arg(long, value_parser = parse_repetitions)]
    pub warmup: Option<usize>,
    /// Directory for path.csv and trace.csv.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value = "dynamic")]
    pub provider: ProviderArg,
    /// Output directory for paths.csv, observations.csv and trace.csv.
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Run only this provider (the heuristic baseline always runs).
    #[arg(long, value_enum)]
    pub provider: Option<ProviderArg>,
    /// Output directory for summary.csv and records.csv.
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Parameter to sweep.
    #[arg(value_enum)]
    pub param: SweepParam,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output directory for summary.csv and records.csv.
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Degradation scenario; defaults to the config's.
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioArg>,
    /// Source node id; defaults to the seed's first scheduled pair.
    #[arg(long, requires = "to")]
    pub from: Option<usize>,
    #[arg(long, requires = "from")]
    pub to: Option<usize>,
    /// Output directory for compare.csv.
    #[arg(short, long)]
    pub out: PathBuf,
}

fn parse_builtin(s: &str) -> std::result::Result<u8, String> {
    match s {
        "1" | "2" | "3" => Ok(s.parse().expect("digit")),
        _ => Err("expected 1, 2 or 3".into()),
    }
}

fn parse_repetitions(s: &str) -> std::result::Result<usize, String> {
    s.parse::<usize>()
        .ok()
        .filter(|n| REPETITION_SET.contains(n))
        .ok_or_else(|| format!("expected one of {REPETITION_SET:?}"))
}

fn parse_regression_no(s: &str) -> std::result::Result<usize, String> {
    s.parse::<usize>()
        .ok()
        .filter(|n| REGRESSION_RANGE.contains(n))
        .ok_or_else(|| "expected an integer in 2..=9".into())
}

fn parse_snr(s: &str) -> std::result::Result<Snr, String> {
    match s {
        "10" | "25" | "50" | "inf" => s.parse().map_err(|e: Error| e.to_string()),
        _ => Err("expected 10, 25, 50 or inf".into()),
    }
}

impl CommonArgs {
    /// The config file (or defaults) with flag overrides applied. `--seed`
    /// shifts the seed list to start at the given value, keeping its length.
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(map) = &self.map {
            cfg.map = map.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seeds = (0..cfg.seeds.len() as u64).map(|i| seed.wrapping_add(i)).collect();
        }
        if let Some(r) = self.repetitions {
            cfg.repetitions = r;
        }
        if let Some(r) = self.regression_no {
            cfg.regression_no = r;
        }
        if let Some(snr) = self.snr {
            cfg.snr_db = snr;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    init_logging();
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ttroute: {e}");
            1
        }
    }
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or(LOG_ENV, "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

pub fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::GenMap(a) => gen_map(&a),
        Command::Plan(a) => plan_cmd(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Experiment(a) => experiment(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Compare(a) => compare(&a),
    }
}

fn out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn create(path: &Path) -> Result<fs::File> {
    log::info!("writing {}", path.display());
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn gen_map(a: &GenMapArgs) -> Result<()> {
    let map = match (a.map, a.family) {
        (Some(n), _) => crate::topo_map::numbered_map(n)?,
        (None, Some(f)) => builtin_map(&LayoutParams::default_for(f.into()), a.seed)?,
        (None, None) => unreachable!("clap requires one of --map or --family"),
    };
    out_dir(&a.out)?;
    let path = a.out.join(format!("{}.json", map.meta().name));
    save_map(&map, &path)?;
    println!(
        "wrote {} ({} nodes, {} edges)",
        path.display(),
        map.node_count(),
        map.edge_count()
    );
    Ok(())
}

fn plan_cmd(a: &PlanArgs) -> Result<()> {
    let cfg = a.common.resolve()?;
    let seed = cfg.seeds[0];
    let map = cfg.map.load()?;
    let (source, dest) = (NodeId(a.from), NodeId(a.to));
    map.node(source)?;
    map.node(dest)?;
    let kind = ProviderKind::from(a.provider);
    let setup = prepare_seed(&map, &cfg, seed)?;
    let (mut provider, mut world) = seeded_run(kind, &map, &cfg, &setup, seed)?;
    let warmup = a.warmup.unwrap_or(0);
    if warmup > 0 {
        run_schedule(&map, &mut world, &mut provider, &setup.scenario, &setup.od, 1..=warmup)?;
    }
    setup.scenario.apply_before_call(&mut world, warmup + 1);
    provider.enable_trace();
    let path = plan(&map, &mut provider, source, dest)?;
    let true_total = world.execute_path(&map, &path)?.true_total();
    println!("provider {kind}, seed {seed}, {warmup} warm-up calls");
    println!("path {}", crate::planner::format_node_sequence(&path.nodes));
    println!("estimated {:.3}s, executed {:.3}s", path.total_est_cost, true_total);
    if let Some(dir) = &a.out {
        out_dir(dir)?;
        let record = PathRecord {
            call_index: warmup + 1,
            source,
            dest,
            nodes: path.nodes.clone(),
            total_est_cost: path.total_est_cost,
            total_true_cost: true_total,
        };
        write_paths_csv(&[record], create(&dir.join("path.csv"))?)?;
        write_trace_csv(provider.trace(), create(&dir.join("trace.csv"))?)?;
    }
    Ok(())
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    let cfg = a.common.resolve()?;
    let seed = cfg.seeds[0];
    let map = cfg.map.load()?;
    let kind = ProviderKind::from(a.provider);
    let setup = prepare_seed(&map, &cfg, seed)?;
    let (mut provider, mut world) = seeded_run(kind, &map, &cfg, &setup, seed)?;
    provider.enable_trace();
    let calls = run_schedule(&map, &mut world, &mut provider, &setup.scenario, &setup.od, 1..=cfg.repetitions)?;

    out_dir(&a.out)?;
    let records: Vec<PathRecord> = calls
        .iter()
        .map(|c| PathRecord {
            call_index: c.call_index,
            source: c.source,
            dest: c.dest,
            nodes: c.path.nodes.clone(),
            total_est_cost: c.path.total_est_cost,
            total_true_cost: c.true_total,
        })
        .collect();
    write_paths_csv(&records, create(&a.out.join("paths.csv"))?)?;
    world.log().write_csv(&map, create(&a.out.join("observations.csv"))?)?;
    write_trace_csv(provider.trace(), create(&a.out.join("trace.csv"))?)?;

    let mean = records.iter().map(|r| r.total_true_cost).sum::<f64>() / records.len() as f64;
    let depleted = calls.iter().filter(|c| c.depleted).count();
    println!(
        "{} calls with {kind} on {} (seed {seed}): mean executed cost {mean:.3}s, {depleted} battery swaps",
        calls.len(),
        map.meta().name
    );
    Ok(())
}

fn print_summary(s: &ExperimentSummary) {
    for kind in ProviderKind::ALL {
        if s.cells_for(kind).next().is_none() {
            continue;
        }
        println!(
            "{:<9} mean est {:>8.3}s  mean true {:>8.3}s  saving {:+6.2}%",
            kind.name(),
            s.mean_est_cost(kind),
            s.mean_true_cost(kind),
            s.mean_saving_pct(kind)
        );
    }
}

fn experiment(a: &ExperimentArgs) -> Result<()> {
    let mut cfg = a.common.resolve()?;
    if let Some(p) = a.provider {
        cfg.providers = vec![p.into()];
    }
    let summary = run_repetitions(&cfg)?;
    out_dir(&a.out)?;
    log::info!("writing summary.csv and records.csv to {}", a.out.display());
    write_experiment(&summary.cells, &summary.records, &a.out)?;
    print_summary(&summary);
    Ok(())
}

fn sweep(a: &SweepArgs) -> Result<()> {
    let mut cfg = a.common.resolve()?;
    if !cfg.providers.contains(&ProviderKind::Dynamic) {
        cfg.providers.push(ProviderKind::Dynamic);
    }
    let (labels, runs): (Vec<String>, Vec<ExperimentSummary>) = match a.param {
        SweepParam::RegressionNo => {
            let values: Vec<usize> = match a.common.regression_no {
                Some(r) => vec![r],
                None => REGRESSION_RANGE.collect(),
            };
            let runs = sweep_regression(&cfg, &values)?;
            (values.iter().map(|r| format!("r={r}")).collect(), runs)
        }
        SweepParam::Snr => {
            let values: Vec<Snr> = match a.common.snr {
                Some(s) => vec![s],
                None => ["10", "25", "50", "inf"].iter().map(|s| s.parse()).collect::<Result<_>>()?,
            };
            let runs = sweep_snr(&cfg, &values)?;
            (values.iter().map(|s| format!("snr={s}")).collect(), runs)
        }
    };
    let cells: Vec<_> = runs.iter().flat_map(|r| r.cells.iter().cloned()).collect();
    let records: Vec<_> = runs.iter().flat_map(|r| r.records.iter().cloned()).collect();
    out_dir(&a.out)?;
    write_experiment(&cells, &records, &a.out)?;
    for (label, run) in labels.iter().zip(&runs) {
        println!(
            "{label:<8} dynamic mean true {:>8.3}s  saving {:+6.2}%",
            run.mean_true_cost(ProviderKind::Dynamic),
            run.mean_saving_pct(ProviderKind::Dynamic)
        );
    }
    println!(
        "non-increasing on {}/{} seeds",
        non_increasing_seed_count(&runs, ProviderKind::Dynamic, &cfg.seeds),
        cfg.seeds.len()
    );
    Ok(())
}

fn compare(a: &CompareArgs) -> Result<()> {
    let mut cfg = a.common.resolve()?;
    if let Some(s) = a.scenario {
        cfg.scenario = match s {
            ScenarioArg::Flat => Scenario::Flat,
            ScenarioArg::Battery => Scenario::Battery,
            ScenarioArg::BatteryFloor => Scenario::default(),
        };
    }
    let seed = cfg.seeds[0];
    let map = cfg.map.load()?;
    let od = match (a.from, a.to) {
        (Some(s), Some(t)) => (NodeId(s), NodeId(t)),
        _ => crate::experiments::schedule(&map, &cfg, seed)[0],
    };
    let report = compare_paths(&map, od, &cfg, seed)?;
    out_dir(&a.out)?;
    write_comparison(&report, &a.out)?;
    println!("{} from {} to {} after {} calls (seed {seed})", report.map, od.0, od.1, cfg.repetitions);
    for p in &report.paths {
        println!(
            "{:<9} {:<40} est {:>8.3}s  true {:>8.3}s  saving {:+6.2}%",
            p.provider.name(),
            crate::planner::format_node_sequence(&p.path.nodes),
            p.path.total_est_cost,
            p.true_total,
            p.saving_pct_vs_heuristic
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("ttroute").chain(args.iter().copied()))
    }

    #[test]
    fn command_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn restricted_values_are_rejected() {
        assert!(parse(&["experiment", "-o", "x", "--repetitions", "30"]).is_err());
        assert!(parse(&["experiment", "-o", "x", "--regression-no", "10"]).is_err());
        assert!(parse(&["experiment", "-o", "x", "--snr", "12"]).is_err());
        assert!(parse(&["experiment", "-o", "x", "--repetitions", "40", "--snr", "inf"]).is_ok());
    }

    #[test]
    fn seed_shifts_the_seed_list() {
        let Command::Experiment(a) = parse(&["experiment", "-o", "x", "--seed", "100"]).unwrap().command else {
            panic!("wrong subcommand");
        };
        let cfg = a.common.resolve().unwrap();
        assert_eq!(cfg.seeds, (100..110).collect::<Vec<u64>>());
    }

    #[test]
    fn gen_map_needs_a_source() {
        assert!(parse(&["gen-map", "-o", "x"]).is_err());
        assert!(parse(&["gen-map", "-o", "x", "--family", "hub", "--map", "1"]).is_err());
        assert!(parse(&["gen-map", "-o", "x", "--family", "hub"]).is_ok());
    }

    #[test]
    fn bad_arguments_exit_with_two() {
        assert_eq!(run(["ttroute", "plan", "--from", "zero"]), 2);
        assert_eq!(run(["ttroute", "plan", "--help"]), 0);
    }
}

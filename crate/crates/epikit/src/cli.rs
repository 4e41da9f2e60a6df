//! Command-line surface: ingest → metrics → staging → models → empirical,
//! with reproducible report and plot-data emission.

use crate::empirical::{
    fatality_recovery_scenarios, run_sweep, RampSlopes, SweepBase, SweepSpec, SweptParameter,
};
use crate::ingest::{
    build_contact_graph, daily_counts, parse_dataset, DateFormat, IngestError, ParseOptions,
    ParseWarning, PatientRecord,
};
use crate::metrics::{
    average_r0, case_fatality_rate, contact_histogram, daily_extremes, r0_from_graph,
    ExtremeMetric, MetricsError, DEFAULT_K_MAX,
};
use crate::models::{
    integrate, sir_end_time, CompartmentState, FoiScaling, Model, ModelError, ModelParams,
    DEFAULT_ALPHA2,
};
use crate::report::{fmt_float, write_table, OutputFormat, ReportMeta, Table};
use crate::staging::{classify_states, daily_state_counts, state_summary};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeSet;
use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;
use thiserror::Error;

/// Errors surfacing as process exit codes: 1 for domain errors, 2 for
/// input errors (bad files, bad flags, bad config).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "epikit",
    version,
    about = "Epidemic case-record analytics and compartmental model simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write output files into this directory instead of stdout
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    /// Output format for reports and series files
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,

    /// Suppress generation timestamps for byte-reproducible output
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    /// Worker threads for parameter sweeps
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a case dataset and report record and contact-graph statistics
    Ingest(IngestArgs),
    /// Reproduction numbers and fatality rates per region, plus daily series
    Metrics(MetricsArgs),
    /// Transmission-state classification summary and daily series
    Stage(StageArgs),
    /// Integrate a compartmental model and estimate the epidemic end time
    Simulate(SimulateArgs),
    /// Evaluate the empirical spread formula over a parameter sweep
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Case dataset CSV
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Dates in the input are ISO (yyyy-mm-dd) rather than dd/mm/yyyy
    #[arg(long)]
    pub iso_dates: bool,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: InputArgs,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Restrict per-region tables to one region
    #[arg(long)]
    pub region: Option<String>,

    /// Count only events announced on or before this date (yyyy-mm-dd)
    #[arg(long)]
    pub as_of: Option<NaiveDate>,

    /// Largest out-degree bucket of the contact histogram
    #[arg(long)]
    pub k_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StageArgs {
    #[command(flatten)]
    pub input: InputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Sir,
    Si,
    Sis,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::Sir)]
    pub model: ModelArg,

    /// Calibrate the transmission rate from a reproduction number
    #[arg(long, conflicts_with_all = ["rc", "pt"])]
    pub r0: Option<f64>,

    /// Contacts per person per day
    #[arg(long)]
    pub rc: Option<f64>,

    /// Per-contact transmission probability
    #[arg(long)]
    pub pt: Option<f64>,

    /// Recovery rate per day
    #[arg(long)]
    pub alpha2: Option<f64>,

    /// SIS recovery-to-susceptible rate per day
    #[arg(long)]
    pub alpha_sis: Option<f64>,

    /// Integration step in days
    #[arg(long)]
    pub dt: Option<f64>,

    /// Integration horizon in days
    #[arg(long)]
    pub horizon: Option<f64>,

    /// Population size (persons models)
    #[arg(long)]
    pub population: Option<f64>,

    /// Initial infectious count (SIR/SIS, persons) or fraction (SI)
    #[arg(long)]
    pub i0: Option<f64>,

    /// Infectious threshold below which the epidemic counts as ended
    #[arg(long)]
    pub eps_i: Option<f64>,

    /// Force-of-infection scaling: "paper" or "fractional"
    #[arg(long)]
    pub foi_scaling: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParamArg {
    SusceptiblePct,
    InfectiousPct,
    Rc,
    Pt,
    Population,
}

impl FromStr for SweepParamArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "susceptible-pct" => Ok(SweepParamArg::SusceptiblePct),
            "infectious-pct" => Ok(SweepParamArg::InfectiousPct),
            "rc" => Ok(SweepParamArg::Rc),
            "pt" => Ok(SweepParamArg::Pt),
            "population" => Ok(SweepParamArg::Population),
            other => Err(format!("unknown sweep parameter '{other}'")),
        }
    }
}

impl From<SweepParamArg> for SweptParameter {
    fn from(p: SweepParamArg) -> Self {
        match p {
            SweepParamArg::SusceptiblePct => SweptParameter::SusceptiblePct,
            SweepParamArg::InfectiousPct => SweptParameter::InfectiousPct,
            SweepParamArg::Rc => SweptParameter::RateOfContact,
            SweepParamArg::Pt => SweptParameter::TransmissionProbability,
            SweepParamArg::Population => SweptParameter::Population,
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Which parameter to sweep
    #[arg(long, value_enum)]
    pub parameter: Option<SweepParamArg>,

    /// Swept values, comma separated, strictly monotone
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<f64>,

    #[arg(long)]
    pub rc: Option<f64>,

    #[arg(long)]
    pub pt: Option<f64>,

    #[arg(long)]
    pub population: Option<f64>,

    /// Initial infected count I₀ of the spread formula
    #[arg(long)]
    pub i0: Option<f64>,

    /// Infectious count at evaluation time
    #[arg(long)]
    pub infectious: Option<f64>,

    /// Susceptible count at evaluation time
    #[arg(long)]
    pub susceptible: Option<f64>,

    /// Also run the four fatality/recovery ramp scenarios
    #[arg(long)]
    pub scenarios: bool,

    #[arg(long)]
    pub alpha2: Option<f64>,

    #[arg(long)]
    pub dt: Option<f64>,

    #[arg(long)]
    pub horizon: Option<f64>,
}

/// Flat key=value config file named by the EPIKIT_CONFIG environment
/// variable. Flags win over config values.
#[derive(Debug, Default)]
struct Config(HashMap<String, String>);

impl Config {
    fn load() -> Result<Self, CliError> {
        let Some(path) = std::env::var_os("EPIKIT_CONFIG") else {
            return Ok(Config::default());
        };
        let text = fs::read_to_string(&path).map_err(|e| {
            CliError::Input(format!("config file {}: {e}", path.to_string_lossy()))
        })?;
        let mut map = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Input(format!(
                    "config line {}: expected key=value",
                    lineno + 1
                )));
            };
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Config(map))
    }

    /// Flag value if present, else the parsed config value under `key`.
    fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                CliError::Input(format!("config key {key}: invalid value '{raw}'"))
            }),
        }
    }

    fn resolve_bool(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        Ok(self.resolve::<bool>(None, key)?.unwrap_or(false))
    }
}

/// Where and how tables get emitted.
struct Emitter {
    out_dir: Option<PathBuf>,
    format: OutputFormat,
    timestamp: bool,
}

impl Emitter {
    fn emit(&self, name: &str, meta: ReportMeta, table: &Table) -> Result<(), CliError> {
        let meta = if self.timestamp {
            meta.timestamped()
        } else {
            meta
        };
        match &self.out_dir {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                let path = dir.join(format!("{name}.{}", self.format.extension()));
                let mut file = fs::File::create(path)?;
                write_table(&mut file, self.format, &meta, table)?;
            }
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                use std::io::Write;
                writeln!(lock, "# file: {name}")?;
                write_table(&mut lock, self.format, &meta, table)?;
                writeln!(lock)?;
            }
        }
        Ok(())
    }
}

/// Parse the flags, run the subcommand, and map errors to exit codes.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let config = Config::load()?;
    let format: OutputFormat = match config.resolve(cli.format, "format")? {
        Some(FormatArg::Csv) | None => OutputFormat::Csv,
        Some(FormatArg::Json) => OutputFormat::Json,
    };
    let emitter = Emitter {
        out_dir: config.resolve(cli.out_dir, "out-dir")?,
        format,
        timestamp: !config.resolve_bool(cli.no_timestamp, "no-timestamp")?,
    };
    let jobs = config.resolve(cli.jobs, "jobs")?.unwrap_or(1).max(1);

    match cli.command {
        Command::Ingest(args) => cmd_ingest(&args, &config, &emitter),
        Command::Metrics(args) => cmd_metrics(&args, &config, &emitter),
        Command::Stage(args) => cmd_stage(&args, &config, &emitter),
        Command::Simulate(args) => cmd_simulate(&args, &config, &emitter),
        Command::Sweep(args) => cmd_sweep(&args, &config, &emitter, jobs),
    }
}

impl FromStr for FormatArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(FormatArg::Csv),
            "json" => Ok(FormatArg::Json),
            other => Err(format!("unknown format '{other}'")),
        }
    }
}

fn load_records(
    args: &InputArgs,
    config: &Config,
) -> Result<(Vec<PatientRecord>, Vec<ParseWarning>), CliError> {
    let input: PathBuf = config
        .resolve(args.input.clone(), "input")?
        .ok_or_else(|| CliError::Input("missing --input".into()))?;
    let raw = fs::read_to_string(&input)
        .map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
    let options = ParseOptions {
        date_format: if config.resolve_bool(args.iso_dates, "iso-dates")? {
            DateFormat::Iso8601
        } else {
            DateFormat::DayMonthYear
        },
    };
    Ok(parse_dataset(&raw, options)?)
}

fn report_warnings(warnings: &[ParseWarning]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn cmd_ingest(args: &IngestArgs, config: &Config, emitter: &Emitter) -> Result<(), CliError> {
    let (records, mut warnings) = load_records(&args.input, config)?;
    let (graph, graph_warnings) = build_contact_graph(&records)?;
    warnings.extend(graph_warnings);
    report_warnings(&warnings);

    let daily = daily_counts(&records, None);
    let mut table = Table::new(&["metric", "value"]);
    table.push_row(vec!["records".into(), records.len().to_string()]);
    table.push_row(vec!["warnings".into(), warnings.len().to_string()]);
    table.push_row(vec!["graph_nodes".into(), graph.node_count().to_string()]);
    table.push_row(vec!["graph_edges".into(), graph.edge_count().to_string()]);
    table.push_row(vec!["days_covered".into(), daily.len().to_string()]);
    let meta = ReportMeta::new("ingest");
    emitter.emit("ingest_report", meta, &table)
}

fn regions_of(records: &[PatientRecord]) -> Vec<String> {
    let set: BTreeSet<String> = records
        .iter()
        .filter_map(|r| r.region().map(str::to_owned))
        .collect();
    set.into_iter().collect()
}

fn cmd_metrics(args: &MetricsArgs, config: &Config, emitter: &Emitter) -> Result<(), CliError> {
    let (records, mut warnings) = load_records(&args.input, config)?;
    let (graph, graph_warnings) = build_contact_graph(&records)?;
    warnings.extend(graph_warnings);
    report_warnings(&warnings);

    let region = config.resolve(args.region.clone(), "region")?;
    let as_of = config.resolve(args.as_of, "as-of")?;
    let k_max = config.resolve(args.k_max, "k-max")?.unwrap_or(DEFAULT_K_MAX);
    let regions = match &region {
        Some(r) => vec![r.clone()],
        None => regions_of(&records),
    };
    let meta = |cmd: &str| {
        let mut m = ReportMeta::new(cmd)
            .param("region", region.as_deref().unwrap_or("all"))
            .param("k_max", k_max);
        if let Some(d) = as_of {
            m = m.param("as_of", d.format("%Y-%m-%d"));
        }
        m
    };

    // Out-degree averages per region, national pooled row last.
    let mut r0_table = Table::new(&["region", "infected", "infectors", "avg_r0"]);
    for r in &regions {
        match contact_histogram(&graph, Some(r), k_max).and_then(|h| average_r0(&h)) {
            Ok(r0) => r0_table.push_row(vec![
                r.clone(),
                r0.numerator.to_string(),
                r0.denominator.to_string(),
                fmt_float(r0.value),
            ]),
            Err(MetricsError::NoInfectors) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    if region.is_none() {
        if let Ok(r0) = r0_from_graph(&graph, None) {
            r0_table.push_row(vec![
                "TOTAL".into(),
                r0.numerator.to_string(),
                r0.denominator.to_string(),
                fmt_float(r0.value),
            ]);
        }
    }
    emitter.emit("r0_by_region", meta("metrics"), &r0_table)?;

    let mut cfr_table = Table::new(&["region", "infected", "deaths", "cfr_pct"]);
    for r in &regions {
        match case_fatality_rate(&records, Some(r), as_of) {
            Ok(cfr) => cfr_table.push_row(vec![
                r.clone(),
                cfr.infected.to_string(),
                cfr.deaths.to_string(),
                fmt_float(cfr.percent),
            ]),
            Err(MetricsError::NoCases) if as_of.is_some() => continue,
            Err(e) => return Err(e.into()),
        }
    }
    if region.is_none() {
        if let Ok(cfr) = case_fatality_rate(&records, None, as_of) {
            cfr_table.push_row(vec![
                "TOTAL".into(),
                cfr.infected.to_string(),
                cfr.deaths.to_string(),
                fmt_float(cfr.percent),
            ]);
        }
    }
    emitter.emit("cfr_by_region", meta("metrics"), &cfr_table)?;

    for (name, metric) in [
        ("r0_extremes", ExtremeMetric::R0),
        ("cfr_extremes", ExtremeMetric::Cfr),
    ] {
        let mut table = Table::new(&["date", "min", "max", "national"]);
        for day in daily_extremes(&records, &graph, metric) {
            let cell = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
            table.push_row(vec![
                day.date.format("%Y-%m-%d").to_string(),
                cell(day.min),
                cell(day.max),
                cell(day.national),
            ]);
        }
        emitter.emit(name, meta("metrics"), &table)?;
    }
    Ok(())
}

fn cmd_stage(args: &StageArgs, config: &Config, emitter: &Emitter) -> Result<(), CliError> {
    let (records, mut warnings) = load_records(&args.input, config)?;
    let (graph, graph_warnings) = build_contact_graph(&records)?;
    warnings.extend(graph_warnings);
    report_warnings(&warnings);

    let assignment = classify_states(&records, &graph);
    let summary = state_summary(&assignment, &records);
    let mut table = Table::new(&[
        "region",
        "state1",
        "state2",
        "state3",
        "unclassified",
        "state1_pct",
        "state2_pct",
        "state3_pct",
    ]);
    let mut push = |row: &crate::staging::RegionStateCounts| {
        let (p1, p2, p3) = row
            .percentages()
            .map(|(a, b, c)| (fmt_float(a), fmt_float(b), fmt_float(c)))
            .unwrap_or_default();
        table.push_row(vec![
            row.region.clone(),
            row.state1.to_string(),
            row.state2.to_string(),
            row.state3.to_string(),
            row.unclassified.to_string(),
            p1,
            p2,
            p3,
        ]);
    };
    for row in &summary.rows {
        push(row);
    }
    push(&summary.total);
    emitter.emit("states_by_region", ReportMeta::new("stage"), &table)?;

    let mut series = Table::new(&["date", "state1", "state2", "state3"]);
    for day in daily_state_counts(&records, &assignment) {
        series.push_row(vec![
            day.date.format("%Y-%m-%d").to_string(),
            day.state1.to_string(),
            day.state2.to_string(),
            day.state3.to_string(),
        ]);
    }
    emitter.emit("daily_states", ReportMeta::new("stage"), &series)
}

fn parse_foi(scaling: Option<String>) -> Result<FoiScaling, CliError> {
    match scaling.as_deref() {
        None | Some("fractional") => Ok(FoiScaling::Fractional),
        Some("paper") => Ok(FoiScaling::PaperLiteral),
        Some(other) => Err(CliError::Input(format!(
            "--foi-scaling must be 'paper' or 'fractional', got '{other}'"
        ))),
    }
}

fn cmd_simulate(args: &SimulateArgs, config: &Config, emitter: &Emitter) -> Result<(), CliError> {
    let alpha2 = config.resolve(args.alpha2, "alpha2")?.unwrap_or(DEFAULT_ALPHA2);
    let r0 = config.resolve(args.r0, "r0")?;
    let rc = config.resolve(args.rc, "rc")?;
    let pt = config.resolve(args.pt, "pt")?;
    let mut params = match r0 {
        Some(r0) => ModelParams::from_r0(r0, alpha2)?,
        None => ModelParams::new(rc.unwrap_or(1.0), pt.unwrap_or(0.3))?.with_alpha2(alpha2),
    };
    params = params
        .with_foi_scaling(parse_foi(config.resolve(args.foi_scaling.clone(), "foi-scaling")?)?)
        .with_alpha_sis(config.resolve(args.alpha_sis, "alpha-sis")?.unwrap_or(0.0));

    let dt = config.resolve(args.dt, "dt")?.unwrap_or(0.1);
    let horizon = config.resolve(args.horizon, "horizon")?.unwrap_or(100.0);
    let population = config.resolve(args.population, "population")?.unwrap_or(1000.0);
    let (model, init) = match args.model {
        ModelArg::Sir => {
            let i0 = config.resolve(args.i0, "i0")?.unwrap_or(1.0);
            if i0 > population {
                return Err(CliError::Domain(
                    "initial infectious count exceeds the population".into(),
                ));
            }
            (
                Model::Sir,
                CompartmentState::sir(population - i0, i0, 0.0, population)?,
            )
        }
        ModelArg::Si => {
            let i0 = config.resolve(args.i0, "i0")?.unwrap_or(0.01);
            (Model::Si, CompartmentState::si_fraction(i0)?)
        }
        ModelArg::Sis => {
            let i0 = config.resolve(args.i0, "i0")?.unwrap_or(1.0);
            (Model::Sis, CompartmentState::sis(i0, population)?)
        }
    };

    let meta = ReportMeta::new("simulate")
        .param("model", format!("{:?}", args.model).to_lowercase())
        .param("rc", params.r_c)
        .param("pt", params.p_t)
        .param("alpha2", params.alpha2)
        .param("dt", dt)
        .param("horizon", horizon)
        .param("population", init.m)
        .param("i0", init.i);

    let traj = integrate(model, &params, &init, dt, horizon)?;
    emitter.emit("trajectory", meta.clone(), &crate::report::trajectory_table(&traj))?;

    if model == Model::Sir {
        let eps_i = config.resolve(args.eps_i, "eps-i")?.unwrap_or(1.0);
        let report = sir_end_time(&params, &init, eps_i, 1e-9, horizon, dt)?;
        let mut table = Table::new(&["metric", "value"]);
        table.push_row(vec!["t_end".into(), fmt_float(report.t_end)]);
        table.push_row(vec![
            "termination".into(),
            format!("{:?}", report.termination),
        ]);
        table.push_row(vec!["final_s".into(), fmt_float(report.final_state.s)]);
        table.push_row(vec!["final_i".into(), fmt_float(report.final_state.i)]);
        table.push_row(vec!["final_r".into(), fmt_float(report.final_state.r)]);
        table.push_row(vec![
            "static_i_estimate".into(),
            fmt_float(report.static_estimate.0),
        ]);
        table.push_row(vec![
            "static_r_estimate".into(),
            fmt_float(report.static_estimate.1),
        ]);
        emitter.emit("end_time", meta.param("eps_i", eps_i), &table)?;
    }
    Ok(())
}

fn cmd_sweep(
    args: &SweepArgs,
    config: &Config,
    emitter: &Emitter,
    jobs: usize,
) -> Result<(), CliError> {
    let parameter: SweptParameter = config
        .resolve(args.parameter, "parameter")
        .map_err(|_| CliError::Input("config key parameter: invalid value".into()))?
        .ok_or_else(|| CliError::Input("missing --parameter".into()))?
        .into();
    let values = if args.values.is_empty() {
        match config.0.get("values") {
            None => Vec::new(),
            Some(raw) => raw
                .split(',')
                .map(|v| v.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Input("config key values: invalid value".into()))?,
        }
    } else {
        args.values.clone()
    };
    if values.is_empty() {
        return Err(CliError::Input("missing --values".into()));
    }

    let params = ModelParams::new(
        config.resolve(args.rc, "rc")?.unwrap_or(1.0),
        config.resolve(args.pt, "pt")?.unwrap_or(0.3),
    )?
    .with_alpha2(config.resolve(args.alpha2, "alpha2")?.unwrap_or(DEFAULT_ALPHA2));
    let base = SweepBase {
        params,
        population: config.resolve(args.population, "population")?.unwrap_or(1000.0),
        initial_infected: config.resolve(args.i0, "i0")?.unwrap_or(10.0),
        infectious: config.resolve(args.infectious, "infectious")?.unwrap_or(10.0),
        susceptible: config.resolve(args.susceptible, "susceptible")?.unwrap_or(250.0),
    };
    let spec = SweepSpec {
        swept: parameter,
        values,
        base: base.clone(),
        scenario: None,
    };
    let result = run_sweep_parallel(&spec, jobs)?;

    let meta = ReportMeta::new("sweep")
        .param("parameter", format!("{parameter:?}"))
        .param("rc", base.params.r_c)
        .param("pt", base.params.p_t)
        .param("population", base.population)
        .param("i0", base.initial_infected)
        .param("infectious", base.infectious)
        .param("susceptible", base.susceptible);
    let mut table = Table::new(&["value", "total_infected", "susceptible_count", "capped"]);
    for row in &result.rows {
        table.push_row(vec![
            fmt_float(row.value),
            fmt_float(row.total_infected),
            fmt_float(row.susceptible_count),
            row.capped.to_string(),
        ]);
    }
    emitter.emit("sweep", meta.clone(), &table)?;

    if config.resolve_bool(args.scenarios, "scenarios")? {
        let dt = config.resolve(args.dt, "dt")?.unwrap_or(0.1);
        let horizon = config.resolve(args.horizon, "horizon")?.unwrap_or(100.0);
        let i0 = base.initial_infected.min(base.population);
        let init =
            CompartmentState::sir(base.population - i0, i0, 0.0, base.population)?;
        let runs =
            fatality_recovery_scenarios(&params, &init, dt, horizon, RampSlopes::default())?;
        for run in runs {
            let mut table =
                Table::new(&["t", "susceptible", "infectious", "recovered", "deaths"]);
            for ((t, state), deaths) in run.trajectory.points.iter().zip(&run.deaths) {
                table.push_row(vec![
                    fmt_float(*t),
                    fmt_float(state.s),
                    fmt_float(state.i),
                    fmt_float(state.r),
                    fmt_float(*deaths),
                ]);
            }
            let name = format!("scenario_{}", run.scenario.label());
            emitter.emit(
                &name,
                meta.clone().param("dt", dt).param("horizon", horizon),
                &table,
            )?;
        }
    }
    Ok(())
}

/// Chunk the swept values across `jobs` threads; any contiguous slice of
/// a strictly monotone list is itself strictly monotone, so each chunk is
/// a valid sweep and the rows concatenate back in input order.
fn run_sweep_parallel(
    spec: &SweepSpec,
    jobs: usize,
) -> Result<crate::empirical::SweepResult, CliError> {
    if jobs <= 1 || spec.values.len() <= 1 {
        return Ok(run_sweep(spec)?);
    }
    // full-list validation first so monotonicity breaks across chunk
    // boundaries are still caught
    let increasing = spec.values.windows(2).all(|w| w[1] > w[0]);
    let decreasing = spec.values.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(ModelError::Domain("sweep values must be strictly monotone".into()).into());
    }
    let chunk_size = spec.values.len().div_ceil(jobs);
    let chunks: Vec<Vec<f64>> = spec
        .values
        .chunks(chunk_size)
        .map(|c| c.to_vec())
        .collect();
    let results: Vec<Result<crate::empirical::SweepResult, ModelError>> =
        std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|chunk| {
                    let sub = SweepSpec {
                        swept: spec.swept,
                        values: chunk.clone(),
                        base: spec.base.clone(),
                        scenario: spec.scenario,
                    };
                    scope.spawn(move || run_sweep(&sub))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sweep worker panicked"))
                .collect()
        });
    let mut rows = Vec::with_capacity(spec.values.len());
    for result in results {
        rows.extend(result?.rows);
    }
    Ok(crate::empirical::SweepResult {
        spec: spec.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Input("x".into()).exit_code(), 2);
        assert_eq!(CliError::Domain("x".into()).exit_code(), 1);
    }

    #[test]
    fn parallel_sweep_matches_serial() {
        let spec = SweepSpec {
            swept: SweptParameter::SusceptiblePct,
            values: (1..=20).map(|v| v as f64 * 5.0).collect(),
            base: SweepBase {
                params: ModelParams::new(1.0, 0.3).unwrap(),
                population: 1000.0,
                initial_infected: 10.0,
                infectious: 10.0,
                susceptible: 250.0,
            },
            scenario: None,
        };
        let serial = run_sweep(&spec).unwrap();
        let parallel = run_sweep_parallel(&spec, 4).unwrap();
        assert_eq!(serial.rows, parallel.rows);
    }

    #[test]
    fn parallel_sweep_still_validates_monotonicity() {
        let spec = SweepSpec {
            swept: SweptParameter::SusceptiblePct,
            values: vec![10.0, 30.0, 20.0, 40.0],
            base: SweepBase {
                params: ModelParams::new(1.0, 0.3).unwrap(),
                population: 1000.0,
                initial_infected: 10.0,
                infectious: 10.0,
                susceptible: 250.0,
            },
            scenario: None,
        };
        assert!(run_sweep_parallel(&spec, 2).is_err());
    }
}

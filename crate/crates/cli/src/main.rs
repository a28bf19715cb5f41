use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dynfatigue::config::{GridSpec, OutputFormat, ResolvedConfig, RunConfig};
use dynfatigue::io::{
    fmt6, met_text_table, parse_load_profile, validation_text_table, write_catalog_csv,
    write_curves_csv, write_met_csv, write_trajectory_csv, write_validation_csv, MetRow,
};
use dynfatigue::met_bank::HuijgensVariant;
use dynfatigue::model::capacity_at;
use dynfatigue::reference::{
    compare_capacity_curves, freund_takala_simulate, liu_closed_form, liu_simulate,
    CurveComparison, FreundTakalaParams, LiuParams,
};
use dynfatigue::{
    met, run_static_validation, static_met, trajectory, Error, LoadProfile, MuscleParams,
    NormalizedLoad,
};

const OUT_DIR_ENV: &str = "DYNFATIGUE_OUT_DIR";

/// Dynamic muscle fatigue model: endurance times, trajectories and
/// validation against published models.
#[derive(Parser, Debug)]
#[command(name = "dynfatigue", version)]
struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Maximum endurance time of the dynamic model or a static model.
    Met(MetArgs),
    /// Capacity and fatigue-index trajectory for a load profile.
    Simulate(SimulateArgs),
    /// Pearson r and ICC of the dynamic MET curve against every static model.
    ValidateStatic(ValidateArgs),
    /// Overlay the dynamic model on a reference fatigue model.
    CompareDynamic(CompareArgs),
    /// Catalog of the static MET models.
    ListModels(ListArgs),
}

#[derive(Args, Debug, Default)]
struct ModelFlags {
    /// Maximum voluntary contraction, N.
    #[arg(long)]
    mvc: Option<f64>,
    /// Fatigue rate, per minute.
    #[arg(long)]
    k: Option<f64>,
    /// Huijgens exponent reading: rohmert-consistent, sign-corrected or as-printed.
    #[arg(long)]
    huijgens_variant: Option<HuijgensVariant>,
}

#[derive(Args, Debug)]
struct MetArgs {
    /// `dynamic`, a model id, or `all`.
    #[arg(long)]
    model: String,
    /// Load fraction(s) of MVC.
    #[arg(long = "fmvc", num_args = 1.., conflicts_with = "grid")]
    fmvc: Vec<f64>,
    /// Grid as `start:stop:step` or a comma list.
    #[arg(long)]
    grid: Option<GridSpec>,
    #[arg(long)]
    format: Option<OutputFormat>,
    #[command(flatten)]
    model_flags: ModelFlags,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// CSV with header `duration_min,load_N`.
    #[arg(long)]
    profile: PathBuf,
    /// Sample step, minutes.
    #[arg(long)]
    step: Option<f64>,
    /// Write the trajectory here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    model_flags: ModelFlags,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long)]
    grid: Option<GridSpec>,
    /// Output directory (default: $DYNFATIGUE_OUT_DIR or the current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<OutputFormat>,
    #[command(flatten)]
    model_flags: ModelFlags,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(subcommand)]
    which: Reference,
}

#[derive(Subcommand, Debug)]
enum Reference {
    /// Motor-unit model; time in seconds.
    Liu {
        /// Brain effort over fatigue rate, B/F.
        #[arg(long, default_value_t = 1e3)]
        beta: f64,
        /// Recovery over fatigue rate, R/F.
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        /// Fatigue rate F, per second.
        #[arg(long, default_value_t = 1.0)]
        f_rate: f64,
        #[arg(long, default_value_t = 1.0)]
        m0: f64,
        /// Seconds.
        #[arg(long, default_value_t = 3.0)]
        horizon: f64,
        /// Seconds.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Capacity-reservoir model; time in minutes.
    Freund {
        /// Upper force limit, N; also used as the dynamic model's MVC.
        #[arg(long, default_value_t = 100.0)]
        s_limit: f64,
        #[arg(long, default_value_t = 1.0)]
        beta_decay: f64,
        #[arg(long, default_value_t = 1.0)]
        beta_recovery: f64,
        /// Constant exerted force, N.
        #[arg(long, default_value_t = 0.0, conflicts_with = "profile")]
        force: f64,
        /// Piecewise-constant force history instead of --force.
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Initial capacity, N (default: s_limit).
        #[arg(long)]
        s0_init: Option<f64>,
        /// Dynamic model fatigue rate, per minute.
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Minutes.
        #[arg(long, default_value_t = 5.0)]
        horizon: f64,
        /// Minutes.
        #[arg(long, default_value_t = 1e-2)]
        step: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ListArgs {
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    format: Option<OutputFormat>,
    #[arg(long)]
    huijgens_variant: Option<HuijgensVariant>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::Io(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(err: io::Error) -> Self {
        Failure {
            code: 3,
            message: err.to_string(),
        }
    }
}

type CliResult = Result<(), Failure>;

fn base_config(path: Option<&Path>) -> Result<RunConfig, Failure> {
    match path {
        Some(p) => Ok(RunConfig::load(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn resolve(base: RunConfig, overrides: RunConfig) -> Result<ResolvedConfig, Failure> {
    let default_out = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    Ok(base.merge(overrides).resolve(default_out)?)
}

fn flag_overrides(flags: &ModelFlags) -> RunConfig {
    RunConfig {
        mvc: flags.mvc,
        k: flags.k,
        huijgens_variant: flags.huijgens_variant,
        ..Default::default()
    }
}

/// Writes to `path`, or stdout when `None`.
fn emit<F>(path: Option<&Path>, write: F) -> CliResult
where
    F: FnOnce(&mut dyn Write) -> dynfatigue::Result<()>,
{
    match path {
        Some(p) => {
            let file =
                fs::File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            let mut out = io::BufWriter::new(file);
            write(&mut out)?;
            out.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut out = io::BufWriter::new(stdout.lock());
            write(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn cmd_met(args: MetArgs, base: RunConfig) -> CliResult {
    let mut overrides = flag_overrides(&args.model_flags);
    overrides.grid = args.grid.clone();
    overrides.format = args.format;
    let cfg = resolve(base, overrides)?;
    let bank = cfg.bank();

    let points: Vec<f64> = if args.fmvc.is_empty() {
        cfg.grid.values().to_vec()
    } else {
        args.fmvc.clone()
    };
    let loads = points
        .iter()
        .map(|&f| NormalizedLoad::new(f))
        .collect::<dynfatigue::Result<Vec<_>>>()?;

    let selected: Vec<Option<&dynfatigue::StaticMetModel>> = match args.model.as_str() {
        "dynamic" => vec![None],
        "all" => std::iter::once(None)
            .chain(bank.models().iter().map(Some))
            .collect(),
        id => match bank.get(id) {
            Ok(m) => vec![Some(m)],
            Err(err) => {
                return Err(Failure {
                    code: 2,
                    message: format!(
                        "{err}\navailable models: dynamic, all, {}",
                        bank.ids().join(", ")
                    ),
                })
            }
        },
    };

    let mut rows = Vec::new();
    for model in selected {
        for &load in &loads {
            let (name, value) = match model {
                None => ("dynamic".to_string(), met(&cfg.params, load)),
                Some(m) => (m.id.to_string(), static_met(m, load)?),
            };
            rows.push(MetRow {
                model: name,
                f_mvc: load.value(),
                met: value,
            });
        }
    }
    emit(None, |out| match cfg.format {
        OutputFormat::Csv => write_met_csv(&rows, out),
        OutputFormat::Text => Ok(out.write_all(met_text_table(&rows).as_bytes())?),
    })
}

fn cmd_simulate(args: SimulateArgs, base: RunConfig) -> CliResult {
    let mut overrides = flag_overrides(&args.model_flags);
    overrides.sample_step = args.step;
    let cfg = resolve(base, overrides)?;
    let profile = parse_load_profile(&args.profile).map_err(|err| match err {
        Error::Parse { row, reason } => Failure {
            code: 2,
            message: format!("{}: line {row}: {reason}", args.profile.display()),
        },
        other => other.into(),
    })?;
    let traj = trajectory(&profile, &cfg.params, cfg.sample_step)?;
    emit(args.output.as_deref(), |out| {
        write_trajectory_csv(&traj, out)
    })?;
    match traj.overloads.first() {
        Some(first) => eprintln!(
            "overload warnings: {} (load exceeds capacity from t = {} min)",
            traj.overloads.len(),
            fmt6(first.t)
        ),
        None => eprintln!("overload warnings: 0"),
    }
    Ok(())
}

fn cmd_validate(args: ValidateArgs, base: RunConfig) -> CliResult {
    let mut overrides = flag_overrides(&args.model_flags);
    overrides.grid = args.grid.clone();
    overrides.output_dir = args.out.clone();
    overrides.format = args.format;
    let cfg = resolve(base, overrides)?;

    let report = run_static_validation(&cfg.grid, &cfg.params, &cfg.bank());
    fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| Error::Io(format!("{}: {e}", cfg.output_dir.display())))?;
    let csv_path = cfg.output_dir.join("validation.csv");
    emit(Some(&csv_path), |out| write_validation_csv(&report, out))?;

    let failed: Vec<_> = report.rows.iter().filter(|r| r.error.is_some()).collect();
    for row in &failed {
        eprintln!("{}: {}", row.model_id, row.error.as_deref().unwrap_or(""));
    }
    match cfg.format {
        OutputFormat::Text => {
            let table = validation_text_table(&report);
            let txt_path = cfg.output_dir.join("validation.txt");
            emit(Some(&txt_path), |out| Ok(out.write_all(table.as_bytes())?))?;
            print!("{table}");
        }
        OutputFormat::Csv => println!(
            "wrote {} ({} models, {} grid points, {} failed)",
            csv_path.display(),
            report.rows.len(),
            report.grid.len(),
            failed.len()
        ),
    }
    Ok(())
}

/// `0, step, 2·step, …, horizon`, the last point landing exactly on `horizon`.
fn uniform_times(horizon: f64, step: f64) -> Result<Vec<f64>, Failure> {
    if !(horizon.is_finite() && horizon > 0.0 && step.is_finite() && step > 0.0) {
        return Err(Failure {
            code: 2,
            message: format!("need horizon > 0 and step > 0, got {horizon} and {step}"),
        });
    }
    let n = (horizon / step - 1e-9).ceil() as usize;
    Ok((0..=n)
        .map(|i| if i == n { horizon } else { i as f64 * step })
        .collect())
}

fn report_comparison(comparison: &CurveComparison) {
    eprintln!(
        "max_abs_diff = {}, r = {}",
        fmt6(comparison.max_abs_diff),
        comparison
            .pearson_r
            .map(fmt6)
            .unwrap_or_else(|| "undefined".into())
    );
}

fn cmd_compare(args: CompareArgs) -> CliResult {
    match args.which {
        Reference::Liu {
            beta,
            gamma,
            f_rate,
            m0,
            horizon,
            step,
            output,
        } => {
            let params = LiuParams::from_ratios(m0, f_rate, beta, gamma)?;
            let times = uniform_times(horizon, step)?;
            let reference: Vec<(f64, f64)> = match liu_closed_form(&params, 0.0) {
                Ok(_) => times
                    .iter()
                    .map(|&t| liu_closed_form(&params, t).map(|(a, uc)| (t, a + uc)))
                    .collect::<dynfatigue::Result<_>>()?,
                Err(Error::DegenerateClosedForm { .. }) => liu_simulate(&params, horizon, step)?
                    .into_iter()
                    .map(|(t, s)| (t, s.capacity_fraction(m0)))
                    .collect(),
                Err(e) => return Err(e.into()),
            };
            // full effort: constant load at MVC, rate converted to per minute
            let muscle = MuscleParams::new(1.0, 60.0 * f_rate)?;
            let profile = LoadProfile::constant(horizon / 60.0, 1.0)?;
            let dynamic: Vec<(f64, f64)> = times
                .iter()
                .map(|&t| capacity_at(&profile, &muscle, t / 60.0).map(|c| (t, c)))
                .collect::<dynfatigue::Result<_>>()?;
            let comparison = compare_capacity_curves(&reference, &dynamic)?;
            emit(output.as_deref(), |out| {
                write_curves_csv(
                    ["t_s", "liu_capacity", "dynamic_capacity"],
                    &reference,
                    &dynamic,
                    &comparison,
                    out,
                )
            })?;
            report_comparison(&comparison);
        }
        Reference::Freund {
            s_limit,
            beta_decay,
            beta_recovery,
            force,
            profile,
            s0_init,
            k,
            horizon,
            step,
            output,
        } => {
            let params = FreundTakalaParams::new(s_limit, beta_decay, beta_recovery)?;
            uniform_times(horizon, step)?;
            let load = match profile {
                Some(path) => parse_load_profile(&path)?,
                None => LoadProfile::constant(horizon, force)?,
            };
            if load.total_duration() + 1e-12 < horizon {
                return Err(Failure {
                    code: 2,
                    message: format!(
                        "profile covers {} min, shorter than the {horizon} min horizon",
                        load.total_duration()
                    ),
                });
            }
            let run =
                freund_takala_simulate(&params, &load, s0_init.unwrap_or(s_limit), horizon, step)?;
            if run.out_of_range {
                eprintln!("warning: reservoir left [0, {s_limit}]");
            }
            let muscle = MuscleParams::new(s_limit, k)?;
            let dynamic: Vec<(f64, f64)> = run
                .samples
                .iter()
                .map(|&(t, _)| capacity_at(&load, &muscle, t).map(|c| (t, c)))
                .collect::<dynfatigue::Result<_>>()?;
            let comparison = compare_capacity_curves(&run.samples, &dynamic)?;
            emit(output.as_deref(), |out| {
                write_curves_csv(
                    ["t_min", "freund_capacity_N", "dynamic_capacity_N"],
                    &run.samples,
                    &dynamic,
                    &comparison,
                    out,
                )
            })?;
            report_comparison(&comparison);
        }
    }
    Ok(())
}

fn cmd_list(args: ListArgs, base: RunConfig) -> CliResult {
    let cfg = resolve(
        base,
        RunConfig {
            huijgens_variant: args.huijgens_variant,
            format: args.format,
            ..Default::default()
        },
    )?;
    let bank = cfg.bank();
    let models = bank.list_by_name(args.group.as_deref())?;
    emit(None, |out| match cfg.format {
        OutputFormat::Csv => write_catalog_csv(models.iter().copied(), out),
        OutputFormat::Text => {
            let rows: Vec<Vec<String>> = models
                .iter()
                .map(|m| {
                    vec![
                        m.id.to_string(),
                        m.group.to_string(),
                        m.formula.to_string(),
                        m.domain.to_string(),
                    ]
                })
                .collect();
            let table = dynfatigue::io::render_text_table(&dynfatigue::io::CATALOG_HEADER, &rows);
            Ok(out.write_all(table.as_bytes())?)
        }
    })
}

fn run(cli: Cli) -> CliResult {
    let base = base_config(cli.config.as_deref())?;
    match cli.command {
        Command::Met(args) => cmd_met(args, base),
        Command::Simulate(args) => cmd_simulate(args, base),
        Command::ValidateStatic(args) => cmd_validate(args, base),
        Command::CompareDynamic(args) => cmd_compare(args),
        Command::ListModels(args) => cmd_list(args, base),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

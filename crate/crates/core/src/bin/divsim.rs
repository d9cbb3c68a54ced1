use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use divsim::bench::{
    run_suite, run_task, write_report, Domain, Features, Instance, Mode, Outcome, PlanFile, SuiteConfig,
    TaskSpec,
};
use divsim::domains::DomainError;
use divsim::render::render_puzznic;
use divsim::{with_instance, NoveltyConfig, NoveltyScope, Plan, SearchLimits};

const EXIT_UNSOLVED: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

#[derive(Parser)]
#[command(name = "divsim", version, about = "Behaviour-diverse planning over simulators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoveltyArg {
    Trace,
    Global,
}

#[derive(clap::Args)]
struct SearchArgs {
    /// Comma-separated diversity features: go, cb.
    #[arg(long, default_value = "go")]
    features: Features,
    #[arg(long, default_value_t = 1000)]
    cost_bound: u64,
    #[arg(long, default_value_t = 2)]
    max_width: usize,
    #[arg(long, value_enum, default_value_t = NoveltyArg::Trace)]
    novelty: NoveltyArg,
    /// Wall-clock budget in seconds.
    #[arg(long, default_value_t = 1800)]
    time_limit: u64,
    #[arg(long, default_value_t = 50_000_000)]
    node_limit: u64,
}

impl SearchArgs {
    fn novelty(&self) -> NoveltyConfig {
        let scope = match self.novelty {
            NoveltyArg::Trace => NoveltyScope::TraceLocal,
            NoveltyArg::Global => NoveltyScope::Global,
        };
        NoveltyConfig::new(self.max_width, scope)
    }

    fn limits(&self) -> SearchLimits {
        SearchLimits {
            cost_bound: self.cost_bound,
            time_budget: Duration::from_secs(self.time_limit),
            node_budget: self.node_limit,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Find k plans for one instance.
    Solve {
        #[arg(long)]
        domain: Option<Domain>,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "fbi")]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        search: SearchArgs,
        /// Plan file to write; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run both modes over every instance in a directory.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "2,5,10,100")]
        k_list: Vec<usize>,
        #[command(flatten)]
        search: SearchArgs,
        /// Directory for per-task plan files.
        #[arg(long)]
        plan_dir: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the playback of one plan from a plan file.
    Render {
        #[arg(long, default_value = "puzznic")]
        domain: Domain,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Enumerate every behaviour of a small instance exhaustively.
    Oracle {
        #[arg(long)]
        domain: Option<Domain>,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        max_len: usize,
        #[arg(long, default_value = "go")]
        features: Features,
        #[arg(long)]
        cost_bound: Option<u64>,
    },
}

fn domain_of(domain: Option<Domain>, path: &std::path::Path) -> Result<Domain> {
    match domain.or_else(|| Domain::from_path(path)) {
        Some(d) => Ok(d),
        None => bail!("cannot tell the domain of {}; pass --domain", path.display()),
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Solve {
            domain,
            instance,
            mode,
            k,
            search,
            out,
        } => {
            let spec = TaskSpec {
                domain: domain_of(domain, &instance)?,
                instance,
                mode,
                k,
                features: search.features,
                novelty: search.novelty(),
                limits: search.limits(),
                out: out.clone(),
            };
            let (result, row) = run_task(&spec)?;
            if out.is_none() {
                let instance = Instance::load(spec.domain, &spec.instance)?;
                let file = with_instance!(&instance, p => {
                    divsim::bench::plan_file(p, &spec, &result, row.outcome)?
                });
                println!("{}", serde_json::to_string_pretty(&file)?);
            }
            eprintln!(
                "{}: {} plan(s), {} behaviour(s), {}",
                spec.instance.display(),
                row.plans_found,
                row.behaviour_count,
                serde_json::to_string(&row.outcome)?.trim_matches('"')
            );
            Ok(match row.outcome {
                Outcome::Done => 0,
                Outcome::Exhausted | Outcome::Error => EXIT_UNSOLVED,
                Outcome::Timeout | Outcome::NodeCap => EXIT_BUDGET,
            })
        }
        Command::Bench {
            suite,
            k_list,
            search,
            plan_dir,
            out,
        } => {
            let config = SuiteConfig {
                k_list,
                features: search.features,
                novelty: search.novelty(),
                limits: search.limits(),
                plan_dir,
                ..SuiteConfig::default()
            };
            let report = run_suite(&suite, &config)?;
            write_report(&report, &out)?;
            for a in &report.aggregates {
                let t = a
                    .t_test
                    .map_or("-".to_string(), |t| format!("t={:.3} p={:.4}", t.t, t.p));
                println!(
                    "k={:<4} coverage fbi/naive {}/{}  CI {}  BC fbi/naive {}/{}  {t}",
                    a.k, a.coverage_fbi, a.coverage_naive, a.common, a.bc_fbi, a.bc_naive
                );
            }
            Ok(0)
        }
        Command::Render {
            domain,
            instance,
            plan,
            index,
        } => {
            if domain != Domain::Puzznic {
                bail!("render only supports puzznic");
            }
            let Instance::Puzznic(problem) = Instance::load(domain, &instance)? else {
                unreachable!("loaded as puzznic");
            };
            let file: PlanFile = serde_json::from_str(
                &std::fs::read_to_string(&plan).with_context(|| plan.display().to_string())?,
            )?;
            let Some(entry) = file.plans.get(index) else {
                bail!("plan file has {} plan(s), no index {index}", file.plans.len());
            };
            let plan = Plan::from_names(&problem, &entry.actions)?;
            print!("{}", render_puzznic(&problem, &plan)?);
            Ok(0)
        }
        Command::Oracle {
            domain,
            instance,
            max_len,
            features,
            cost_bound,
        } => {
            let domain = domain_of(domain, &instance)?;
            let instance = Instance::load(domain, &instance)?;
            with_instance!(&instance, p => {
                let space = features.space(p, cost_bound.unwrap_or(u64::MAX))?;
                let found = divsim::brute_force_behaviours(p, &space, max_len, cost_bound)?;
                for (b, plan) in &found {
                    println!(
                        "{}\t{}",
                        serde_json::to_string(&b.to_record(divsim::SimulatorProblem::symbols(p)))?,
                        plan.names(p).join(" ")
                    );
                }
                eprintln!("{} behaviour(s)", found.len());
            });
            Ok(0)
        }
    }
}

fn is_data_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<DomainError>().is_some()
            || c.downcast_ref::<serde_json::Error>().is_some()
            || c.downcast_ref::<divsim::ModelError>().is_some()
            || c.downcast_ref::<std::io::Error>().is_some()
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_data_error(&e) { EXIT_DATA } else { EXIT_USAGE })
        }
    }
}

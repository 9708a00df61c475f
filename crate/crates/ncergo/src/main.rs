use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand, ValueEnum};
use ncergo::config::{AverageTask, CertifyTask, MaximalTask};
use ncergo::{configured_tasks, emit_report, run_scenario, OutputFormat, RunOptions, Scenario, Task};

#[derive(Parser)]
#[command(name = "ncergo", version, about = "Weighted multiparameter ergodic averages on finite noncommutative L_p spaces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "ncergo-out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    format: Format,
    /// Replaces the scenario seed.
    #[arg(long, global = true)]
    seed_override: Option<u64>,
    /// Lattice-point budget for direct and grid evaluation.
    #[arg(long, global = true)]
    budget: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Structured,
    Tabular,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Check every configured contraction.
    Verify,
    /// Weighted averages over a box.
    Average {
        /// Lower box corner, comma separated.
        #[arg(long, value_delimiter = ',')]
        lower: Option<Vec<usize>>,
        /// Upper box corner, comma separated.
        #[arg(long, value_delimiter = ',')]
        upper: Option<Vec<usize>>,
        #[arg(long)]
        evaluator: Option<String>,
    },
    /// Dominant-element norms along a cutoff ladder.
    Maximal {
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        cutoffs: Option<Vec<usize>>,
    },
    /// Discrepancy scan of the weight against its approximant.
    Besicovitch,
    /// Projection certificates for the residual tails.
    Certify {
        #[arg(long, conflicts_with = "lambda")]
        epsilon: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Residual box `[1, horizon]^d`.
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        onsets: Option<Vec<usize>>,
    },
    /// Run several tasks; defaults to every configured one.
    Run {
        #[arg(long, value_delimiter = ',')]
        tasks: Option<Vec<String>>,
    },
}

fn apply(command: &Command, scenario: &mut Scenario, overrides: &mut Vec<String>) -> anyhow::Result<Vec<Task>> {
    let c = &mut scenario.config;
    let mut note = |s: String| overrides.push(s);
    Ok(match command {
        Command::Verify => vec![Task::Verify],
        Command::Average { lower, upper, evaluator } => {
            if c.average.is_none() {
                let upper = upper.clone().context("no [average] section; pass --upper")?;
                c.average = Some(AverageTask {
                    lower: None,
                    upper,
                    evaluator: "grid".into(),
                    limit_epsilon: None,
                });
            }
            let a = c.average.as_mut().expect("set above");
            if let Some(v) = lower {
                a.lower = Some(v.clone());
                note(format!("average.lower={v:?}"));
            }
            if let Some(v) = upper {
                a.upper = v.clone();
                note(format!("average.upper={v:?}"));
            }
            if let Some(v) = evaluator {
                a.evaluator = v.clone();
                note(format!("average.evaluator={v}"));
            }
            vec![Task::Average]
        }
        Command::Maximal { p, cutoffs } => {
            if let Some(p) = p {
                c.p = *p;
                note(format!("p={p}"));
            }
            match (&mut c.maximal, cutoffs) {
                (Some(m), Some(v)) => m.cutoffs = v.clone(),
                (Some(_), None) => {}
                (None, v) => {
                    let cutoffs = v.clone().context("no [maximal] section; pass --cutoffs")?;
                    c.maximal = Some(MaximalTask {
                        cutoffs,
                        cauchy_slack: 0.05,
                        tol: None,
                        max_iterations: None,
                    });
                }
            }
            if let Some(v) = cutoffs {
                note(format!("maximal.cutoffs={v:?}"));
            }
            vec![Task::Maximal]
        }
        Command::Besicovitch => vec![Task::Besicovitch],
        Command::Certify {
            epsilon,
            lambda,
            horizon,
            onsets,
        } => {
            if c.certify.is_none() {
                c.certify = Some(CertifyTask {
                    epsilon: None,
                    lambda: None,
                    onsets: onsets.clone().context("no [certify] section; pass --onsets")?,
                    horizon: horizon.context("no [certify] section; pass --horizon")?,
                    tol: None,
                    limit_epsilon: None,
                });
            }
            let t = c.certify.as_mut().expect("set above");
            if epsilon.is_some() || lambda.is_some() {
                t.epsilon = *epsilon;
                t.lambda = *lambda;
                note(format!("certify.epsilon={epsilon:?},lambda={lambda:?}"));
            }
            if t.epsilon.is_none() && t.lambda.is_none() {
                anyhow::bail!("certify needs --epsilon or --lambda");
            }
            if let Some(h) = horizon {
                t.horizon = *h;
                note(format!("certify.horizon={h}"));
            }
            if let Some(o) = onsets {
                t.onsets = o.clone();
                note(format!("certify.onsets={o:?}"));
            }
            vec![Task::Certify]
        }
        Command::Run { tasks: None } => configured_tasks(scenario),
        Command::Run { tasks: Some(names) } => names
            .iter()
            .map(|n| Task::parse(n).with_context(|| format!("unknown task `{n}`")))
            .collect::<anyhow::Result<_>>()?,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main(cli: Cli) -> anyhow::Result<bool> {
    let g = cli.global;
    let path = g.config.context("--config is required")?;
    let mut scenario = Scenario::load(&path)?;
    let mut opts = RunOptions {
        seed_override: g.seed_override,
        budget: g.budget,
        overrides: Vec::new(),
    };
    let tasks = apply(&cli.command, &mut scenario, &mut opts.overrides)?;
    let report = run_scenario(&scenario, &tasks, &opts);
    let fmt = match g.format {
        Format::Structured => OutputFormat::Structured,
        Format::Tabular => OutputFormat::Tabular,
        Format::Both => OutputFormat::Both,
    };
    let written = emit_report(&report, &g.out, fmt).with_context(|| format!("writing {}", g.out.display()))?;
    // A closed stdout (e.g. piped into `head`) must not turn into a panic.
    let mut out = std::io::stdout().lock();
    for t in &report.tasks {
        let _ = match &t.error {
            Some(e) => writeln!(out, "{:<12} {:<8} {e}", t.task, t.status.name()),
            None => writeln!(out, "{:<12} {}", t.task, t.status.name()),
        };
    }
    for p in written {
        let _ = writeln!(out, "wrote {}", p.display());
    }
    Ok(!report.failed())
}

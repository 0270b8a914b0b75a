//! `mobplan plan | validate | inspect`.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mobplan_core::domain::model::{DeadlineCheck, LinePolicy};
use mobplan_core::domain::{PlanOptions, StrictFailure};
use mobplan_core::htn::SearchStats;
use mobplan_core::validator::validate;
use mobplan_core::{plan, EnterpriseEnvironment, MobilizationTask, Plan};
use serde::Serialize;

use crate::error::from_json;
use crate::plan_text::{parse_plan, render_plan};
use crate::report::{inspect, render_inspection, render_report};
use crate::{read_domain, read_problem, read_text};

/// Process exit statuses.
pub mod exit {
    pub const OK: u8 = 0;
    pub const INPUT: u8 = 1;
    pub const INFEASIBLE: u8 = 2;
    pub const INVALID: u8 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "mobplan", version, about = "HTN planner for production and delivery tasks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan the problem's tasks against the domain and print the plan.
    Plan {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        policy: PolicyFlags,
        /// Print search statistics (to stderr in text mode).
        #[arg(long)]
        stats: bool,
    },
    /// Check a plan against the domain and problem.
    Validate {
        #[command(flatten)]
        inputs: Inputs,
        /// Plan file, in plan text or JSON.
        #[arg(long)]
        plan: PathBuf,
        #[command(flatten)]
        policy: PolicyFlags,
    },
    /// Print the efficiency ratios the planner ranks by.
    Inspect {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        problem: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Args)]
pub struct Inputs {
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long)]
    pub problem: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DeadlineFlag {
    Arrival,
    UnloadComplete,
}

/// Overrides for the domain file's policy section.
#[derive(Debug, Args)]
pub struct PolicyFlags {
    /// Line engagement: `lines=all-capable` or `lines=gamma-escalation`.
    #[arg(long, value_name = "lines=POLICY", value_parser = parse_line_policy)]
    pub policy: Option<LinePolicy>,
    /// Hours needed when a line switches products.
    #[arg(long, value_name = "HOURS", value_parser = parse_hours)]
    pub changeover: Option<f64>,
    #[arg(long, value_enum)]
    pub deadline_check: Option<DeadlineFlag>,
    /// Fail the whole run when any task cannot be accomplished.
    #[arg(long)]
    pub strict_deadlines: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

fn parse_line_policy(s: &str) -> Result<LinePolicy, String> {
    match s.split_once('=') {
        Some(("lines", "all-capable")) => Ok(LinePolicy::AllCapable),
        Some(("lines", "gamma-escalation")) => Ok(LinePolicy::GammaEscalation),
        Some(("lines", other)) => Err(format!("unknown line policy `{other}`")),
        _ => Err("expected `lines=all-capable` or `lines=gamma-escalation`".into()),
    }
}

fn parse_hours(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(h) if h.is_finite() && h >= 0.0 => Ok(h),
        _ => Err(format!("`{s}` is not a non-negative number of hours")),
    }
}

impl PolicyFlags {
    fn apply(&self, env: &mut EnterpriseEnvironment) {
        if let Some(p) = self.policy {
            env.policy.line_policy = p;
        }
        if let Some(h) = self.changeover {
            env.policy.changeover_hours = h;
        }
        match self.deadline_check {
            Some(DeadlineFlag::Arrival) => env.policy.deadline_check = DeadlineCheck::Arrival,
            Some(DeadlineFlag::UnloadComplete) => env.policy.deadline_check = DeadlineCheck::UnloadComplete,
            None => {}
        }
        if self.strict_deadlines {
            env.policy.strict_deadlines = true;
        }
    }
}

fn load(inputs: &Inputs, flags: &PolicyFlags) -> Result<(EnterpriseEnvironment, Vec<MobilizationTask>)> {
    let mut env = read_domain(&inputs.domain).with_context(|| format!("domain {}", inputs.domain.display()))?;
    let problem = read_problem(&inputs.problem).with_context(|| format!("problem {}", inputs.problem.display()))?;
    problem.bind(&mut env).with_context(|| format!("problem {}", inputs.problem.display()))?;
    flags.apply(&mut env);
    env.check_tasks(&problem.tasks).context("problem does not fit the domain")?;
    Ok((env, problem.tasks))
}

/// Reads a plan in either the text grammar or JSON.
pub fn read_plan(path: &Path) -> Result<Plan> {
    let text = read_text(path)?;
    let plan = if text.trim_start().starts_with('{') { from_json("plan", &text)? } else { parse_plan(&text)? };
    Ok(plan)
}

#[derive(Serialize)]
struct PlanJson<'a> {
    #[serde(flatten)]
    plan: &'a Plan,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<SearchStats>,
}

#[derive(Serialize)]
struct FailureJson<'a> {
    failed: bool,
    #[serde(flatten)]
    failure: &'a StrictFailure,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<SearchStats>,
}

fn json_line(value: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Runs one command, writing results to `out` and diagnostics to `err`.
/// Input errors come back as `Err` and map to exit status 1.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    match &cli.command {
        Command::Plan { inputs, policy, stats } => {
            let (env, tasks) = load(inputs, policy)?;
            let outcome = plan(&env, &tasks, PlanOptions::default())?;
            let shown_stats = stats.then_some(outcome.stats);
            match &outcome.result {
                Ok(p) => {
                    match policy.format {
                        Format::Text => out.write_all(render_plan(p).as_bytes())?,
                        Format::Json => {
                            out.write_all(json_line(&PlanJson { plan: p, stats: shown_stats })?.as_bytes())?
                        }
                    }
                    if *stats && policy.format == Format::Text {
                        writeln!(
                            err,
                            "; nodes {} backtracks {}",
                            outcome.stats.nodes_expanded, outcome.stats.backtracks
                        )?;
                    }
                    Ok(exit::OK)
                }
                Err(failure) => {
                    match policy.format {
                        Format::Text => out.write_all(
                            render_plan(&Plan { steps: Vec::new(), infeasible: failure.infeasible.clone() }).as_bytes(),
                        )?,
                        Format::Json => out.write_all(
                            json_line(&FailureJson { failed: true, failure, stats: shown_stats })?.as_bytes(),
                        )?,
                    }
                    writeln!(err, "{failure}")?;
                    Ok(exit::INFEASIBLE)
                }
            }
        }
        Command::Validate { inputs, plan: plan_path, policy } => {
            let (env, tasks) = load(inputs, policy)?;
            let p = read_plan(plan_path).with_context(|| format!("plan {}", plan_path.display()))?;
            let report = match validate(&p, &env, &tasks, &env.policy) {
                Ok(r) => r,
                Err(e) => bail!("plan {} does not match the domain: {e}", plan_path.display()),
            };
            match policy.format {
                Format::Text => out.write_all(render_report(&report).as_bytes())?,
                Format::Json => out.write_all(json_line(&report)?.as_bytes())?,
            }
            Ok(if report.passed() { exit::OK } else { exit::INVALID })
        }
        Command::Inspect { domain, problem, format } => {
            let mut env = read_domain(domain).with_context(|| format!("domain {}", domain.display()))?;
            let tasks = match problem {
                Some(path) => {
                    let p = read_problem(path).with_context(|| format!("problem {}", path.display()))?;
                    p.bind(&mut env)?;
                    p.tasks
                }
                None => Vec::new(),
            };
            let table = inspect(&env, &tasks);
            match format {
                Format::Text => out.write_all(render_inspection(&table).as_bytes())?,
                Format::Json => out.write_all(json_line(&table)?.as_bytes())?,
            }
            Ok(exit::OK)
        }
    }
}

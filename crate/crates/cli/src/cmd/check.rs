use std::path::PathBuf;

use clap::Args;
use embcol::counting::embcol_count;
use embcol::experiment::{run_trials, RateSummary};
use embcol::graphs::{ColoredInstance, PatternGraph};
use embcol::ip::{instance_check, select as select_oracles, CheckOutcome, SelectConfig};
use embcol::oracle::{CallCounter, CountOracle, OracleSpec};
use embcol::rng::Stream;
use embcol::wta::WtaConfig;
use serde_json::{json, Value};

use super::Inputs;
use crate::args::{parse_oracle, parse_pattern, usage, StatArgs};
use crate::input::load_colored;
use crate::report::{decimal, Report};
use crate::Outcome;

/// Shared by check and select: the instances to run on.
#[derive(Args, Debug)]
struct InstanceArgs {
    #[arg(long, value_parser = parse_pattern, default_value = "k12")]
    pattern: PatternGraph,
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[arg(long, value_enum, default_value = "random")]
    inputs: Inputs,
    /// A single binary instance instead of --trials drawn ones; the exit
    /// status then reflects its outcome.
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    instances: InstanceArgs,
    /// exact | corrupt:δ | constant[:v]
    #[arg(long, value_parser = parse_oracle, default_value = "exact")]
    oracle: OracleSpec,
    #[command(flatten)]
    stat: StatArgs,
}

#[derive(Args, Debug)]
pub struct SelectArgs {
    #[command(flatten)]
    instances: InstanceArgs,
    /// Comma-separated oracle specs, in order.
    #[arg(long, value_parser = parse_oracle, value_delimiter = ',', default_value = "exact,constant")]
    oracles: Vec<OracleSpec>,
    /// Curve points per unit of degree in the worst-case lifting.
    #[arg(long, default_value_t = 10)]
    multiplier: u64,
    /// Outer repeats of the consistency-matrix scan.
    #[arg(long, default_value_t = 3)]
    repeats: u32,
    #[command(flatten)]
    stat: StatArgs,
}

fn outcome_record(trial: u64, out: &CheckOutcome, truth: u128) -> (bool, bool, Value) {
    let (output, reason) = match out {
        CheckOutcome::Count { value } => (Some(decimal(*value)), None),
        CheckOutcome::Fail { reason } => (None, Some(*reason)),
    };
    let correct = out.count() == Some(truth);
    let wrong = out.count().is_some() && !correct;
    (correct, wrong, json!({ "trial": trial, "output": output, "fail_reason": reason, "truth": decimal(truth), "correct": correct, "wrong": wrong }))
}

/// Runs `body` on the single --graph instance or on --trials drawn inputs.
fn run_on_instances<F>(inst: &InstanceArgs, stat: &StatArgs, seed: u64, adversary: &CountOracle<'_>, body: F) -> anyhow::Result<Vec<(bool, bool, Value)>>
where
    F: Fn(&ColoredInstance, &mut Stream) -> anyhow::Result<CheckOutcome> + Sync,
{
    let fixed = inst.graph.as_deref().map(|p| load_colored("--graph", p)).transpose()?;
    if fixed.as_ref().is_some_and(|x| !x.is_binary()) {
        return Err(usage("--graph", "needs a binary instance"));
    }
    let trials = if fixed.is_some() { 1 } else { stat.trials };
    run_trials(trials, seed, stat.jobs(), |i, r| {
        let x = match &fixed {
            Some(x) => x.clone(),
            None => inst.inputs.draw(&inst.pattern, inst.n, i, adversary, r)?,
        };
        let truth = embcol_count(&x)?;
        Ok(outcome_record(i, &body(&x, r)?, truth))
    })
    .into_iter()
    .collect()
}

fn summarize(report: &mut Report, rows: Vec<(bool, bool, Value)>, single: bool) -> bool {
    let summary = RateSummary::from_flags(rows.iter().map(|r| r.0));
    let wrong = rows.iter().filter(|r| r.1).count();
    let fails = rows.iter().filter(|r| r.2["output"].is_null()).count();
    let total = rows.len().max(1) as f64;
    report.result = json!({
        "correct_rate": summary.rate,
        "wrong_outputs": wrong,
        "wrong_rate": wrong as f64 / total,
        "fail_outputs": fails,
        "fail_rate": fails as f64 / total,
    });
    report.summary = Some(summary);
    report.records = rows.into_iter().map(|r| r.2).collect();
    single && fails > 0
}

pub fn check(a: CheckArgs) -> anyhow::Result<Outcome> {
    let seed = a.stat.seed()?;
    let oracle = CallCounter::new(a.oracle.build(seed));
    let uncounted = a.oracle.build(seed);
    let rows = run_on_instances(&a.instances, &a.stat, seed, uncounted.as_ref(), |x, r| Ok(instance_check(x, &oracle, r)?))?;
    let params = json!({
        "pattern": a.instances.pattern,
        "n": a.instances.n,
        "inputs": format!("{:?}", a.instances.inputs).to_lowercase(),
        "graph": a.instances.graph.as_ref().map(|p| p.display().to_string()),
        "oracle": a.oracle,
        "trials": a.stat.trials,
    });
    let mut report = Report::new("check", Some(seed), params);
    report.query_count("oracle", oracle.calls());
    let failed = summarize(&mut report, rows, a.instances.graph.is_some());
    Ok(Outcome { report, failed })
}

pub fn select(a: SelectArgs) -> anyhow::Result<Outcome> {
    let seed = a.stat.seed()?;
    if a.oracles.is_empty() {
        return Err(usage("--oracles", "needs at least one oracle"));
    }
    let salt = |i: usize| seed.wrapping_add(i as u64);
    let built: Vec<_> = a.oracles.iter().enumerate().map(|(i, s)| CallCounter::new(s.build(salt(i)))).collect();
    let list: Vec<&CountOracle<'_>> = built.iter().map(|o| o as &CountOracle<'_>).collect();
    let cfg = SelectConfig { wta: WtaConfig { curve_points_multiplier: a.multiplier, ..WtaConfig::default() }, repeats: a.repeats };
    // inputs are drawn against the first oracle, which is the one a selector
    // has to see through when it lies
    let uncounted = a.oracles[0].build(salt(0));
    let rows = run_on_instances(&a.instances, &a.stat, seed, uncounted.as_ref(), |x, r| Ok(select_oracles(x, &list, &cfg, r)?))?;
    let params = json!({
        "pattern": a.instances.pattern,
        "n": a.instances.n,
        "inputs": format!("{:?}", a.instances.inputs).to_lowercase(),
        "graph": a.instances.graph.as_ref().map(|p| p.display().to_string()),
        "oracles": a.oracles,
        "config": cfg,
        "trials": a.stat.trials,
    });
    let mut report = Report::new("select", Some(seed), params);
    for (i, o) in built.iter().enumerate() {
        report.query_count(&format!("oracle_{i}"), o.calls());
    }
    let failed = summarize(&mut report, rows, a.instances.graph.is_some());
    Ok(Outcome { report, failed })
}

use clap::Args;
use embcol::counting::embcol_count;
use embcol::experiment::{run_trials, RateSummary};
use embcol::ffield::PrimeModulus;
use embcol::graphs::PatternGraph;
use embcol::oracle::OracleSpec;
use embcol::wta::{worst_to_avg, WtaConfig};
use serde_json::json;

use super::Inputs;
use crate::args::{parse_oracle, parse_pattern, parse_prime, usage, StatArgs};
use crate::report::{decimal, Report};
use crate::Outcome;

#[derive(Args, Debug)]
pub struct WtaArgs {
    #[arg(long, value_parser = parse_pattern, default_value = "k11")]
    pattern: PatternGraph,
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// exact | corrupt:δ | constant[:v]
    #[arg(long, value_parser = parse_oracle, default_value = "corrupt:0.01")]
    oracle: OracleSpec,
    #[arg(long, value_enum, default_value = "adversarial")]
    inputs: Inputs,
    /// Pin the field instead of sampling a prime per trial.
    #[arg(long, value_parser = parse_prime)]
    q: Option<PrimeModulus>,
    /// Curve points per unit of curve degree.
    #[arg(long, default_value_t = 100)]
    multiplier: u64,
    /// Binary expansion length (default: derived from q, |E(H)| and n).
    #[arg(long)]
    bits: Option<u32>,
    /// Independent decodes combined by majority.
    #[arg(long, default_value_t = 1)]
    repeats: u32,
    #[command(flatten)]
    stat: StatArgs,
}

pub fn run(a: WtaArgs) -> anyhow::Result<Outcome> {
    let seed = a.stat.seed()?;
    if a.n == 0 {
        return Err(usage("--n", "must be positive"));
    }
    if a.multiplier == 0 {
        return Err(usage("--multiplier", "must be positive"));
    }
    let cfg = WtaConfig { curve_points_multiplier: a.multiplier, bits: a.bits, majority_repeats: a.repeats.max(1), modulus: a.q };
    let oracle = a.oracle.build(seed);
    let outcomes = run_trials(a.stat.trials, seed, a.stat.jobs(), |i, r| -> anyhow::Result<_> {
        let x = a.inputs.draw(&a.pattern, a.n, i, oracle.as_ref(), r)?;
        let truth = embcol_count(&x)?;
        let run = worst_to_avg(&x, oracle.as_ref(), &cfg, r)?;
        let record = json!({
            "trial": i,
            "count": decimal(run.count),
            "truth": decimal(truth),
            "correct": run.count == truth,
            "oracle_calls": run.oracle_calls,
            "failed_repeats": run.failed_repeats,
            "q": run.params.q.q().to_string(),
            "t": run.params.t,
            "m": run.params.m,
        });
        Ok((run.count == truth, run.oracle_calls, run.params, record))
    });
    let outcomes = outcomes.into_iter().collect::<anyhow::Result<Vec<_>>>()?;
    let params = json!({
        "pattern": a.pattern,
        "n": a.n,
        "oracle": a.oracle,
        "inputs": format!("{:?}", a.inputs).to_lowercase(),
        "config": cfg,
        "trials": a.stat.trials,
    });
    let mut report = Report::new("wta", Some(seed), params);
    let summary = RateSummary::from_flags(outcomes.iter().map(|o| o.0));
    let calls: u64 = outcomes.iter().map(|o| o.1).sum();
    let first = outcomes.first().map(|o| o.2);
    report.query_count("oracle", calls);
    report.result = json!({
        "success_rate": summary.rate,
        "calls_per_trial": if outcomes.is_empty() { 0.0 } else { calls as f64 / outcomes.len() as f64 },
        "queries_per_decode_exact": outcomes.iter().all(|o| o.1 == o.2.queries_per_decode() * cfg.majority_repeats as u64),
        "q": first.map(|p| p.q.q().to_string()),
        "t": first.map(|p| p.t),
        "m": first.map(|p| p.m),
    });
    report.summary = Some(summary);
    report.records = outcomes.into_iter().map(|o| o.3).collect();
    Ok(Outcome { report, failed: false })
}

use clap::{Args, ValueEnum};
use embcol::amplify::{
    dpt_pipeline, gl_decode, measure_success, xor_pipeline, CorruptDp, CountingSelector, DistributionalProblem,
    EmbcolParityProblem, EmbcolProblem, ExactDp, ExactXor, GlConfig, IjkwConfig, NoisyXor, ParitySelector, SolveConfig,
    WorstCaseSolver, XorConfig,
};
use embcol::counting::Count;
use embcol::experiment::{run_trials, RateSummary};
use embcol::graphs::{rand_colored, structured_instance, ColoredInstance, PatternGraph};
use embcol::ip::SelectConfig;
use embcol::oracle::{CallCounter, Oracle};
use embcol::rng::Stream;
use embcol::wta::WtaConfig;
use rand::Rng;
use serde_json::{json, Value};

use crate::args::{parse_pattern, parse_unit, usage, StatArgs};
use crate::report::Report;
use crate::Outcome;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Direct-product decoding from a k-wise oracle correct on an ε fraction.
    Dpt,
    /// XOR list decoding from a k-wise XOR oracle with advantage ε.
    Gl,
    /// XOR decoding, direct-product decoding and the parity selector, end to end.
    Xor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeakOracle {
    Exact,
    /// Correct on an ε fraction of tuples (dpt) or with advantage ε (gl, xor).
    Noisy,
}

#[derive(Args, Debug)]
pub struct AmplifyArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long, value_parser = parse_pattern, default_value = "k11")]
    pattern: PatternGraph,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, value_enum, default_value = "noisy")]
    oracle: WeakOracle,
    /// Oracle arity.
    #[arg(long)]
    k: usize,
    /// Success fraction (dpt) or advantage (gl, xor) of the weak oracle.
    #[arg(long, value_parser = parse_unit)]
    epsilon: f64,
    #[arg(long, value_parser = parse_unit, default_value_t = 0.2)]
    delta: f64,
    /// Held-out samples per candidate (default: 500 dpt, 200 gl, 50 xor).
    #[arg(long)]
    samples: Option<usize>,
    /// Worst-case inputs solved per trial (default: 2 dpt, 4 xor; gl has none).
    #[arg(long)]
    inputs: Option<usize>,
    /// Cap on XOR-decoder votes per coordinate.
    #[arg(long)]
    max_queries: Option<usize>,
    /// Spectral candidates kept from the XOR decoder.
    #[arg(long, default_value_t = 1)]
    ranks: usize,
    /// Self-correction samples in the parity selector.
    #[arg(long, default_value_t = 5)]
    selector_repeats: usize,
    #[command(flatten)]
    stat: StatArgs,
}

struct TrialResult {
    per_candidate: Vec<f64>,
    end_to_end: Vec<bool>,
    queries: u64,
    extra: Value,
}

/// Worst-case inputs alternate between structured families and uniform draws.
fn worst_case_input(pattern: &PatternGraph, n: usize, j: usize, r: &mut Stream) -> ColoredInstance {
    if j % 2 == 0 {
        structured_instance(pattern, n, j / 2, r)
    } else {
        rand_colored(pattern, n, r)
    }
}

pub fn run(a: AmplifyArgs) -> anyhow::Result<Outcome> {
    let seed = a.stat.seed()?;
    if a.k == 0 {
        return Err(usage("--k", "must be positive"));
    }
    if a.epsilon == 0.0 {
        return Err(usage("--epsilon", "must be positive"));
    }
    if a.delta == 0.0 {
        return Err(usage("--delta", "must be positive"));
    }
    if a.mode != Mode::Dpt && a.epsilon > 0.5 {
        return Err(usage("--epsilon", "an XOR advantage lies in (0, 1/2]"));
    }
    let samples = a.samples.unwrap_or(match a.mode {
        Mode::Dpt => 500,
        Mode::Gl => 200,
        Mode::Xor => 50,
    });
    let inputs = a.inputs.unwrap_or(match a.mode {
        Mode::Dpt => 2,
        Mode::Gl => 0,
        Mode::Xor => 4,
    });
    let trials = run_trials(a.stat.trials, seed, a.stat.jobs(), |i, r| -> anyhow::Result<TrialResult> {
        let salt = r.gen();
        match a.mode {
            Mode::Dpt => dpt_trial(&a, samples, inputs, salt, r),
            Mode::Gl => gl_trial(&a, samples, salt, r),
            Mode::Xor => xor_trial(&a, samples, inputs, salt, r),
        }
        .map_err(|e| e.context(format!("trial {i}")))
    });
    let trials = trials.into_iter().collect::<anyhow::Result<Vec<_>>>()?;

    let params = json!({
        "mode": format!("{:?}", a.mode).to_lowercase(),
        "pattern": a.pattern,
        "n": a.n,
        "oracle": format!("{:?}", a.oracle).to_lowercase(),
        "k": a.k,
        "epsilon": a.epsilon,
        "delta": a.delta,
        "samples": samples,
        "inputs": inputs,
        "max_queries": a.max_queries,
        "ranks": a.ranks,
        "selector_repeats": a.selector_repeats,
        "trials": a.stat.trials,
    });
    let mut report = Report::new("amplify", Some(seed), params);
    let queries: u64 = trials.iter().map(|t| t.queries).sum();
    report.query_count("weak_oracle", queries);
    let candidates = trials.iter().map(|t| t.per_candidate.len()).max().unwrap_or(0);
    let mean_per_candidate: Vec<f64> = (0..candidates)
        .map(|c| {
            let vals: Vec<f64> = trials.iter().filter_map(|t| t.per_candidate.get(c).copied()).collect();
            vals.iter().sum::<f64>() / vals.len().max(1) as f64
        })
        .collect();
    let best: Vec<f64> = trials.iter().map(|t| t.per_candidate.iter().copied().fold(0.0, f64::max)).collect();
    let summary = RateSummary::from_flags(trials.iter().flat_map(|t| t.end_to_end.iter().copied()));
    report.result = json!({
        "per_candidate_success": mean_per_candidate,
        "best_candidate_success": best.iter().sum::<f64>() / best.len().max(1) as f64,
        "end_to_end_success": (summary.trials > 0).then_some(summary.rate),
        "queries_issued": queries,
    });
    report.summary = Some(summary);
    report.records = trials
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let best = t.per_candidate.iter().copied().fold(0.0, f64::max);
            json!({
                "trial": i,
                "per_candidate_success": t.per_candidate,
                "best_candidate_success": best,
                "end_to_end_correct": t.end_to_end.iter().filter(|&&b| b).count(),
                "end_to_end_inputs": t.end_to_end.len(),
                "queries": t.queries,
                "details": t.extra,
            })
        })
        .collect();
    Ok(Outcome { report, failed: false })
}

fn dpt_trial(a: &AmplifyArgs, samples: usize, inputs: usize, salt: u64, r: &mut Stream) -> anyhow::Result<TrialResult> {
    let problem = EmbcolProblem { pattern: a.pattern.clone(), n: a.n };
    let weak: Box<dyn Oracle<[ColoredInstance], Answer = Vec<Count>> + '_> = match a.oracle {
        WeakOracle::Exact => Box::new(ExactDp { problem: &problem, k: a.k }),
        WeakOracle::Noisy => Box::new(CorruptDp { problem: &problem, k: a.k, epsilon: a.epsilon, salt }),
    };
    let counter = CallCounter::new(weak);
    let selector = CountingSelector {
        cfg: SelectConfig { wta: WtaConfig { curve_points_multiplier: 10, ..WtaConfig::default() }, repeats: 1 },
    };
    let ijkw = IjkwConfig::new(a.k, a.epsilon, a.delta);
    let solver = dpt_pipeline(&problem, &counter, selector, &ijkw, SolveConfig::for_delta(a.delta), r)?;
    let per_candidate =
        solver.candidates().iter().map(|c| measure_success(&problem, *c, samples, r)).collect::<embcol::Result<Vec<_>>>()?;
    let end_to_end = (0..inputs)
        .map(|j| {
            let x = worst_case_input(&a.pattern, a.n, j, r);
            Ok(solver.solve(&x, r)? == Some(problem.truth(&x)?))
        })
        .collect::<embcol::Result<Vec<_>>>()?;
    Ok(TrialResult { per_candidate, end_to_end, queries: counter.calls(), extra: json!({ "list_size": ijkw.list_size(), "repeats": ijkw.repeats() }) })
}

fn xor_oracle<'a>(a: &AmplifyArgs, problem: &'a EmbcolParityProblem, salt: u64) -> Box<dyn Oracle<[ColoredInstance], Answer = bool> + 'a> {
    match a.oracle {
        WeakOracle::Exact => Box::new(ExactXor { problem, k: a.k }),
        WeakOracle::Noisy => Box::new(NoisyXor { problem, k: a.k, advantage: a.epsilon, salt }),
    }
}

fn gl_config(a: &AmplifyArgs) -> GlConfig {
    GlConfig { max_queries: a.max_queries, ..GlConfig::new(a.k, a.epsilon) }
}

fn gl_trial(a: &AmplifyArgs, samples: usize, salt: u64, r: &mut Stream) -> anyhow::Result<TrialResult> {
    let problem = EmbcolParityProblem { pattern: a.pattern.clone(), n: a.n };
    let counter = CallCounter::new(xor_oracle(a, &problem, salt));
    let truth = ExactDp { problem: &problem, k: 2 * a.k };
    let dec = gl_decode(&counter, &problem, &gl_config(a), r)?;
    let ranks = a.ranks.max(1);
    let mut rank_hits = vec![0usize; ranks];
    let mut advice_hits = Vec::with_capacity(samples);
    for _ in 0..samples {
        let xs = problem.sample_tuple(2 * a.k, r);
        let want = truth.query(&xs)?;
        advice_hits.push(dec.decode_with(&xs, dec.true_advice(&xs)?)? == want);
        for (rank, hits) in rank_hits.iter_mut().enumerate() {
            *hits += (dec.decode_ranked(&xs, rank)? == want) as usize;
        }
    }
    let per_candidate = rank_hits.iter().map(|&h| h as f64 / samples.max(1) as f64).collect();
    Ok(TrialResult {
        per_candidate,
        end_to_end: advice_hits,
        queries: counter.calls(),
        extra: json!({ "advice_bits": dec.seed_count(), "votes_per_coordinate": dec.queries() }),
    })
}

fn xor_trial(a: &AmplifyArgs, samples: usize, inputs: usize, salt: u64, r: &mut Stream) -> anyhow::Result<TrialResult> {
    let problem = EmbcolParityProblem { pattern: a.pattern.clone(), n: a.n };
    let counter = CallCounter::new(xor_oracle(a, &problem, salt));
    let mut cfg = XorConfig::new(a.k, a.epsilon, a.delta);
    cfg.gl = gl_config(a);
    cfg.gl_ranks = a.ranks.max(1);
    let selector = ParitySelector { repeats: a.selector_repeats.max(1) };
    let solver = xor_pipeline(&problem, &counter, selector, &cfg, r)?;
    let per_candidate =
        solver.candidates().iter().map(|c| measure_success(&problem, *c, samples, r)).collect::<embcol::Result<Vec<_>>>()?;
    let end_to_end = (0..inputs)
        .map(|j| {
            let x = worst_case_input(&a.pattern, a.n, j, r);
            Ok(solver.solve(&x, r)? == Some(problem.truth(&x)?))
        })
        .collect::<embcol::Result<Vec<_>>>()?;
    Ok(TrialResult {
        per_candidate,
        end_to_end,
        queries: counter.calls(),
        extra: json!({ "advice_bits": solver.decoder().seed_count(), "votes_per_coordinate": solver.decoder().queries() }),
    })
}

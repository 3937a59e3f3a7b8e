use std::path::PathBuf;

use clap::{Args, ValueEnum};
use embcol::ffield::PrimeModulus;
use embcol::graphs::{rand_colored, rand_field, structured_instance, PatternGraph, SimpleGraph, STRUCTURED_FAMILIES};
use embcol::ip::session_modulus;
use embcol::reductions::OvInstance;
use embcol::rng;
use rand::Rng;
use serde_json::{json, Value};

use crate::args::{parse_pattern, parse_prime, parse_unit, require_seed, usage};
use crate::input::write_text;
use crate::report::Report;
use crate::Outcome;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    /// Uniform binary colored instance.
    Colored,
    /// One of the structured families (zeros, ones, diagonal, ...), by --index.
    Structured,
    /// Uniform instance over F_q.
    Field,
    /// G(n, p) host graph.
    Graph,
    /// k-OV instance with bit density --p.
    Ov,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    #[arg(long, value_parser = parse_pattern, default_value = "k11")]
    pattern: PatternGraph,
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Field for --kind field (default: a fresh session prime).
    #[arg(long, value_parser = parse_prime)]
    q: Option<PrimeModulus>,
    #[arg(long, value_parser = parse_unit, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// k-OV: number of sets, dimension and block size.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 4)]
    d: usize,
    #[arg(long, default_value_t = 2)]
    block_size: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the generated object here instead of embedding it in the report.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(a: GenArgs) -> anyhow::Result<Outcome> {
    let seed = require_seed(a.seed)?;
    if a.n == 0 {
        return Err(usage("--n", "must be positive"));
    }
    let mut r = rng::stream(seed);
    let object: Value = match a.kind {
        GenKind::Colored => rand_colored(&a.pattern, a.n, &mut r).to_json_value(),
        GenKind::Structured => structured_instance(&a.pattern, a.n, a.index, &mut r).to_json_value(),
        GenKind::Field => {
            let q = match a.q {
                Some(q) => q,
                None => session_modulus(&a.pattern, a.n, 0, &mut r)?,
            };
            rand_field(&a.pattern, a.n, q, &mut r).to_json_value()
        }
        GenKind::Graph => serde_json::to_value(SimpleGraph::random(a.n, a.p, &mut r))?,
        GenKind::Ov => {
            if a.d == 0 || a.d > 63 {
                return Err(usage("--d", "must lie in 1..=63"));
            }
            let sets = (0..a.k)
                .map(|_| (0..a.n).map(|_| (0..a.d).fold(0u64, |v, t| v | (r.gen_bool(a.p) as u64) << t)).collect())
                .collect();
            let ov = OvInstance::new(a.k, a.d, sets, a.block_size).map_err(|e| usage("--block-size", e.to_string()))?;
            serde_json::from_str(&ov.to_json())?
        }
    };
    let params = json!({
        "kind": format!("{:?}", a.kind).to_lowercase(),
        "pattern": a.pattern,
        "n": a.n,
        "q": a.q.map(|q| q.q().to_string()),
        "p": a.p,
        "index": a.index % STRUCTURED_FAMILIES,
        "k": a.k,
        "d": a.d,
        "block_size": a.block_size,
    });
    let mut report = Report::new("gen", Some(seed), params);
    report.result = match &a.out {
        Some(path) => {
            write_text("--out", path, &serde_json::to_string_pretty(&object)?)?;
            json!({ "path": path.display().to_string() })
        }
        None => json!({ "object": object }),
    };
    Ok(Outcome { report, failed: false })
}

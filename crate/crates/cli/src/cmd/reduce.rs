use std::path::PathBuf;

use clap::{Args, ValueEnum};
use embcol::counting::{emb_count, embcol_count, hom_count, parity_count, subgraph_count, ParityTarget};
use embcol::graphs::{BipartiteGraph, PatternGraph, SimpleGraph};
use embcol::oracle::{CallCounter, ExactEmb, ExactEmbcol, ExactHom, FnOracle};
use embcol::reductions::{
    default_parity_trials, detect_via_parity, embcol_kab_via_bipartite, embcol_via_emb, hom_via_embcol, ka_to_kaa,
    kov_to_colorful_kab, lovasz_emb_via_hom, pad_kcd_to_kab, Detection, OvInstance,
};
use embcol::rng;
use serde_json::{json, Value};

use crate::args::{parse_pattern, require_seed, usage};
use crate::input::{load_colored, load_simple, read_text, write_text};
use crate::report::{decimal, Report};
use crate::Outcome;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Colorful count from an uncolored embedding oracle.
    EmbcolViaEmb,
    /// emb(H → G) from a homomorphism oracle.
    Lovasz,
    /// hom(H → G) as one colorful count on G × H.
    HomViaEmbcol,
    /// Pad a colorful K_{c,d} instance up to K_{a,b}.
    Pad,
    /// Colorful K_{a,b} count from a bipartite K_{a,b} embedding oracle.
    IeBipartite,
    /// k-OV to colorful K_{k,C} detection.
    Kov,
    /// K_a detection to colorful K_{a,a} detection.
    KaKaa,
    /// Subgraph detection from a parity oracle.
    DetectParity,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, value_parser = parse_pattern)]
    pattern: Option<PatternGraph>,
    /// Host graph or colored instance JSON, depending on --kind.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// k-OV instance JSON.
    #[arg(long)]
    ov: Option<PathBuf>,
    /// Target shape for pad, clique size for ka-kaa.
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    /// Random subgraphs queried by detect-parity (default 100 · 2^|E(H)|).
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the constructed instance here (pad, kov, ka-kaa).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ReduceArgs {
    fn pattern(&self) -> anyhow::Result<PatternGraph> {
        self.pattern.clone().ok_or_else(|| usage("--pattern", "required for this reduction"))
    }

    fn graph_path(&self) -> anyhow::Result<&std::path::Path> {
        self.graph.as_deref().ok_or_else(|| usage("--graph", "required for this reduction"))
    }

    fn simple(&self) -> anyhow::Result<SimpleGraph> {
        load_simple("--graph", self.graph_path()?)
    }
}

/// The two sides of a reduction check.
struct Comparison {
    via: Value,
    direct: Value,
    calls: u64,
    extra: Value,
}

pub fn run(a: ReduceArgs) -> anyhow::Result<Outcome> {
    let seed = if a.kind == Kind::DetectParity { Some(require_seed(a.seed)?) } else { None };
    let cmp = match a.kind {
        Kind::EmbcolViaEmb => {
            let x = load_colored("--graph", a.graph_path()?)?;
            let oracle = CallCounter::new(ExactEmb);
            let via = embcol_via_emb(&x, &oracle)?;
            Comparison { via: decimal(via), direct: decimal(embcol_count(&x)?), calls: oracle.calls(), extra: json!({}) }
        }
        Kind::Lovasz => {
            let (h, g) = (a.pattern()?, a.simple()?);
            let oracle = CallCounter::new(ExactHom);
            let via = lovasz_emb_via_hom(&h, &g, &oracle)?;
            Comparison { via: decimal(via), direct: decimal(emb_count(&h, &g)?), calls: oracle.calls(), extra: json!({}) }
        }
        Kind::HomViaEmbcol => {
            let (h, g) = (a.pattern()?, a.simple()?);
            let oracle = CallCounter::new(ExactEmbcol);
            let via = hom_via_embcol(&h, &g, &oracle)?;
            Comparison { via: decimal(via), direct: decimal(hom_count(&h, &g)?), calls: oracle.calls(), extra: json!({}) }
        }
        Kind::Pad => {
            let x = load_colored("--graph", a.graph_path()?)?;
            let ta = a.a.ok_or_else(|| usage("--a", "required for pad"))?;
            let tb = a.b.ok_or_else(|| usage("--b", "required for pad"))?;
            let padded = pad_kcd_to_kab(&x, ta, tb)?;
            if let Some(out) = &a.out {
                write_text("--out", out, &serde_json::to_string_pretty(&padded)?)?;
            }
            Comparison {
                via: decimal(embcol_count(&padded)?),
                direct: decimal(embcol_count(&x)?),
                calls: 0,
                extra: json!({ "padded_n": padded.n() }),
            }
        }
        Kind::IeBipartite => {
            let x = load_colored("--graph", a.graph_path()?)?;
            let (l, r) = x
                .pattern()
                .as_biclique()
                .ok_or_else(|| usage("--graph", "needs a colorful K_{a,b} instance"))?;
            let h = PatternGraph::biclique(l, r);
            let oracle = CallCounter::new(FnOracle(|g: &BipartiteGraph| emb_count(&h, &g.to_simple())));
            let via = embcol_kab_via_bipartite(&x, &oracle)?;
            Comparison { via: decimal(via), direct: decimal(embcol_count(&x)?), calls: oracle.calls(), extra: json!({}) }
        }
        Kind::Kov => {
            let path = a.ov.as_deref().ok_or_else(|| usage("--ov", "required for kov"))?;
            let ov = OvInstance::from_json(&read_text("--ov", path)?).map_err(|e| usage("--ov", e.to_string()))?;
            let red = kov_to_colorful_kab(&ov)?;
            if let Some(out) = &a.out {
                write_text("--out", out, &serde_json::to_string_pretty(&red.instance)?)?;
            }
            Comparison {
                via: json!(embcol_count(&red.instance)? > 0),
                direct: json!(ov.has_orthogonal_tuple()),
                calls: 0,
                extra: json!({ "instance_n": red.instance.n(), "live_vertices": red.vertex_count, "tuple_counts": red.tuple_counts }),
            }
        }
        Kind::KaKaa => {
            let g = a.simple()?;
            let size = a.a.ok_or_else(|| usage("--a", "required for ka-kaa"))?;
            let x = ka_to_kaa(&g, size)?;
            if let Some(out) = &a.out {
                write_text("--out", out, &serde_json::to_string_pretty(&x)?)?;
            }
            Comparison {
                via: json!(embcol_count(&x)? > 0),
                direct: json!(subgraph_count(&PatternGraph::complete(size), &g)? > 0),
                calls: 0,
                extra: json!({}),
            }
        }
        Kind::DetectParity => {
            let (h, g) = (a.pattern()?, a.simple()?);
            let s = seed.expect("checked above");
            let trials = a.trials.unwrap_or_else(|| default_parity_trials(&h));
            let oracle = CallCounter::new(FnOracle(|sub: &SimpleGraph| parity_count(ParityTarget::Subgraph(&h, sub))));
            let det = detect_via_parity(&g, &oracle, trials, &mut rng::stream(s))?;
            Comparison {
                via: json!(det == Detection::Yes),
                direct: json!(subgraph_count(&h, &g)? > 0),
                calls: oracle.calls(),
                extra: json!({ "trials": trials }),
            }
        }
    };
    let params = json!({
        "kind": a.kind.to_possible_value().map(|v| v.get_name().to_string()),
        "pattern": a.pattern,
        "graph": a.graph.as_ref().map(|p| p.display().to_string()),
        "ov": a.ov.as_ref().map(|p| p.display().to_string()),
        "a": a.a,
        "b": a.b,
        "trials": a.trials,
    });
    let agree = cmp.via == cmp.direct;
    let mut report = Report::new("reduce", seed, params);
    report.query_count("oracle", cmp.calls);
    report.result = json!({ "via_reduction": cmp.via, "direct": cmp.direct, "agree": agree, "details": cmp.extra });
    Ok(Outcome { report, failed: !agree })
}

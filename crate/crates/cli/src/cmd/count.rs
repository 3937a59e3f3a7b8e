use std::path::PathBuf;

use clap::{Args, ValueEnum};
use embcol::counting::{aut_count, count_kab_fast, emb_count, embcol_count, embcolpoly_eval, hom_count, subgraph_count};
use embcol::graphs::{GraphInput, PatternGraph};
use serde_json::json;

use crate::args::{parse_pattern, usage};
use crate::input::load_graph;
use crate::report::{decimal, Report};
use crate::Outcome;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// emb(H → G) on a host graph, embcol on a colored instance.
    Brute,
    /// K_{a,b} counting by subset ranking (host graph, biclique pattern).
    Fast,
    Hom,
    /// Unlabelled copies: emb / |Aut(H)|.
    Sub,
    /// |Aut(H)|; ignores --graph.
    Aut,
    /// The colorful polynomial over the instance's field.
    Poly,
    /// Parity of the subgraph count (host graph) or of embcol (instance).
    Parity,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    /// Pattern for host-graph methods; colored instances carry their own.
    #[arg(long, value_parser = parse_pattern)]
    pattern: Option<PatternGraph>,
    /// Host graph or colored instance JSON (`-` for stdin).
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "brute")]
    method: Method,
}

pub fn run(a: CountArgs) -> anyhow::Result<Outcome> {
    let pattern = || a.pattern.clone().ok_or_else(|| usage("--pattern", "required for this method on a host graph"));
    let graph = || {
        a.graph
            .as_deref()
            .ok_or_else(|| usage("--graph", "required"))
            .and_then(|p| load_graph("--graph", p))
    };
    let count: u128 = match a.method {
        Method::Aut => aut_count(&pattern()?)?,
        method => match (graph()?, method) {
            (GraphInput::Simple(g), Method::Brute) => emb_count(&pattern()?, &g)?,
            (GraphInput::Simple(g), Method::Fast) => {
                let h = pattern()?;
                let (l, r) = h.as_biclique().ok_or_else(|| usage("--pattern", "fast counting needs a K_{a,b} pattern"))?;
                count_kab_fast(l, r, &g)?
            }
            (GraphInput::Simple(g), Method::Hom) => hom_count(&pattern()?, &g)?,
            (GraphInput::Simple(g), Method::Sub) => subgraph_count(&pattern()?, &g)?,
            (GraphInput::Simple(g), Method::Parity) => subgraph_count(&pattern()?, &g)? % 2,
            (GraphInput::Colored(x), Method::Brute) => embcol_count(&x)?,
            (GraphInput::Colored(x), Method::Parity) => embcol_count(&x)? % 2,
            (GraphInput::Colored(x), Method::Poly) => embcolpoly_eval(&x, None)?.value() as u128,
            (GraphInput::Simple(_), m) => return Err(usage("--method", format!("{m:?} needs a colored instance").to_lowercase())),
            (GraphInput::Colored(_), m) => return Err(usage("--method", format!("{m:?} needs a host graph").to_lowercase())),
        },
    };
    let params = json!({
        "method": format!("{:?}", a.method).to_lowercase(),
        "pattern": a.pattern,
        "graph": a.graph.as_ref().map(|p| p.display().to_string()),
    });
    let mut report = Report::new("count", None, params);
    report.result = json!({ "count": decimal(count) });
    Ok(Outcome { report, failed: false })
}

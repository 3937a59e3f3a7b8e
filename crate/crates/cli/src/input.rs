//! Reading graphs, instances and transcripts from files (`-` is stdin).

use std::io::Read;
use std::path::Path;

use embcol::graphs::{ColoredInstance, GraphInput, SimpleGraph};

use crate::args::usage;

pub fn read_text(flag: &'static str, path: &Path) -> anyhow::Result<String> {
    let mut text = String::new();
    if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map_err(|e| usage(flag, format!("reading stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| usage(flag, format!("cannot read {}: {e}", path.display())))?;
    }
    Ok(text)
}

pub fn load_graph(flag: &'static str, path: &Path) -> anyhow::Result<GraphInput> {
    GraphInput::from_json(&read_text(flag, path)?).map_err(|e| usage(flag, format!("{}: {e}", path.display())))
}

pub fn load_simple(flag: &'static str, path: &Path) -> anyhow::Result<SimpleGraph> {
    match load_graph(flag, path)? {
        GraphInput::Simple(g) => Ok(g),
        GraphInput::Colored(_) => Err(usage(flag, format!("{} holds a colored instance, expected a host graph", path.display()))),
    }
}

pub fn load_colored(flag: &'static str, path: &Path) -> anyhow::Result<ColoredInstance> {
    match load_graph(flag, path)? {
        GraphInput::Colored(x) => Ok(x),
        GraphInput::Simple(_) => Err(usage(flag, format!("{} holds a host graph, expected a colored instance", path.display()))),
    }
}

pub fn write_text(flag: &'static str, path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).map_err(|e| usage(flag, format!("cannot write {}: {e}", path.display())))
}

//! Resolves a command-line graph argument.
//!
//! Accepted forms, tried in order:
//! - a generator spec: `path:6`, `star:5`, `cycle:4`, `complete:4`, `kbip:2,3`;
//! - an existing file, read as an edge list when its first non-blank line
//!   starts with a digit and as a single graph6 line otherwise;
//! - a literal graph6 string.

use std::path::Path;

use energame_core::graph::{self, Graph};

use crate::error::CliError;
use crate::format::{parse_edge_list, parse_graph6};

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// Bytes the input digest is computed over: the spec text for
    /// generators and graph6 strings, the file contents for files.
    pub digest_source: Vec<u8>,
}

const GENERATORS: [&str; 5] = ["path", "star", "cycle", "complete", "kbip"];

fn count(arg: &str, spec: &str) -> Result<usize, CliError> {
    arg.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("generator spec {spec:?}: {arg:?} is not a vertex count")))
}

/// Parses `name:args`; `Ok(None)` when `spec` does not name a generator.
pub fn parse_generator(spec: &str) -> Result<Option<Graph>, CliError> {
    let Some((name, args)) = spec.split_once(':') else {
        return Ok(None);
    };
    if !GENERATORS.contains(&name) {
        return Ok(None);
    }
    let g = match name {
        "kbip" => {
            let (a, b) = args
                .split_once(',')
                .ok_or_else(|| CliError::Usage(format!("generator spec {spec:?}: expected kbip:a,b")))?;
            graph::complete_bipartite(count(a, spec)?, count(b, spec)?)?
        }
        _ => {
            let n = count(args, spec)?;
            match name {
                "path" => graph::path(n)?,
                "star" => graph::star(n)?,
                "cycle" => graph::cycle(n)?,
                _ => graph::complete(n)?,
            }
        }
    };
    Ok(Some(g))
}

fn parse_file(path: &Path) -> Result<Graph, CliError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: display.clone(), source })?;
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    match lines.next() {
        Some(first) if first.starts_with(|c: char| c.is_ascii_digit()) => {
            parse_edge_list(&text).map_err(|source| CliError::EdgeList { path: display, source })
        }
        Some(first) => {
            if lines.next().is_some() {
                return Err(CliError::Usage(format!("{display}: expected exactly one graph6 line")));
            }
            Ok(parse_graph6(first)?)
        }
        None => Err(CliError::Usage(format!("{display}: empty input file"))),
    }
}

pub fn load(spec: &str) -> Result<LoadedGraph, CliError> {
    if let Some(graph) = parse_generator(spec)? {
        return Ok(LoadedGraph { graph, digest_source: spec.as_bytes().to_vec() });
    }
    let path = Path::new(spec);
    if path.is_file() {
        let graph = parse_file(path)?;
        let digest_source = std::fs::read(path).map_err(|source| CliError::Io { path: spec.to_string(), source })?;
        return Ok(LoadedGraph { graph, digest_source });
    }
    Ok(LoadedGraph { graph: parse_graph6(spec)?, digest_source: spec.as_bytes().to_vec() })
}

//! Serialisation of gain graphs: JSON, DOT and GraphML.
//!
//! Every writer is a pure function of the graph, so two exports of the same
//! graph are byte identical. Floats use Rust's shortest round-trip form.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QlError, Result};
use crate::graph::GainGraph;

#[derive(Debug, Serialize, Deserialize)]
struct EdgeRecord {
    u: usize,
    v: usize,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphRecord {
    n: usize,
    edges: Vec<EdgeRecord>,
    #[serde(default)]
    labels: BTreeMap<String, Vec<usize>>,
}

/// `{"n", "edges": [{u, v, re, im}], "labels": {tag: [vertices]}}`.
pub fn graph_to_json(g: &GainGraph) -> String {
    let edges = g
        .edges()
        .map(|(u, v, z)| EdgeRecord { u, v, re: z.re, im: z.im })
        .collect();
    let mut labels: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    if let Some(tags) = g.labels() {
        for (v, t) in tags.iter().enumerate() {
            labels.entry(t.clone()).or_default().push(v);
        }
    }
    let rec = GraphRecord { n: g.n_vertices(), edges, labels };
    serde_json::to_string_pretty(&rec).expect("graph record serialises")
}

/// Parses the JSON graph format. When labels are present every vertex must
/// carry exactly one.
pub fn graph_from_json(text: &str) -> Result<GainGraph> {
    let rec: GraphRecord = serde_json::from_str(text)?;
    let mut g = GainGraph::new(rec.n);
    for e in rec.edges {
        g.add_edge(e.u, e.v, Complex64::new(e.re, e.im))?;
    }
    if !rec.labels.is_empty() {
        let mut tags: Vec<Option<String>> = vec![None; rec.n];
        for (tag, vertices) in rec.labels {
            for v in vertices {
                let slot = tags
                    .get_mut(v)
                    .ok_or_else(|| QlError::invalid(format!("label vertex {v} out of range")))?;
                if slot.is_some() {
                    return Err(QlError::invalid(format!("vertex {v} labelled twice")));
                }
                *slot = Some(tag.clone());
            }
        }
        let tags = tags
            .into_iter()
            .enumerate()
            .map(|(v, t)| t.ok_or_else(|| QlError::invalid(format!("vertex {v} has no label"))))
            .collect::<Result<Vec<_>>>()?;
        g.set_labels(tags)?;
    }
    Ok(g)
}

pub fn read_graph(path: &Path) -> Result<GainGraph> {
    graph_from_json(&fs::read_to_string(path)?)
}

pub fn write_graph(path: &Path, g: &GainGraph) -> Result<()> {
    write_atomic(path, graph_to_json(g).as_bytes())
}

/// Phase of a gain in radians, in (-pi, pi].
pub fn phase(z: Complex64) -> f64 {
    let p = z.arg();
    if p == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        p
    }
}

/// Undirected DOT. Edges carry `phase`; labelled vertices carry `block`.
pub fn to_dot(g: &GainGraph) -> String {
    to_dot_with(g, |_, _| None)
}

/// DOT with an optional colour per edge.
pub fn to_dot_with<F>(g: &GainGraph, mut color: F) -> String
where
    F: FnMut(usize, usize) -> Option<String>,
{
    let mut s = String::from("graph G {\n");
    if let Some(tags) = g.labels() {
        for (v, t) in tags.iter().enumerate() {
            let _ = writeln!(s, "  {v} [block=\"{}\"];", escape(t));
        }
    } else {
        for v in 0..g.n_vertices() {
            let _ = writeln!(s, "  {v};");
        }
    }
    for (u, v, z) in g.edges() {
        match color(u, v) {
            Some(c) => {
                let _ = writeln!(s, "  {u} -- {v} [phase={}, color=\"{}\"];", phase(z), escape(&c));
            }
            None => {
                let _ = writeln!(s, "  {u} -- {v} [phase={}];", phase(z));
            }
        }
    }
    s.push_str("}\n");
    s
}

/// GraphML with a `phase` edge key and an optional `block` node key.
pub fn to_graphml(g: &GainGraph) -> String {
    let mut s = String::from(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n  \
         <key id=\"phase\" for=\"edge\" attr.name=\"phase\" attr.type=\"double\"/>\n  \
         <key id=\"block\" for=\"node\" attr.name=\"block\" attr.type=\"string\"/>\n  \
         <graph id=\"G\" edgedefault=\"undirected\">\n",
    );
    for v in 0..g.n_vertices() {
        match g.labels() {
            Some(tags) => {
                let _ = writeln!(
                    s,
                    "    <node id=\"n{v}\"><data key=\"block\">{}</data></node>",
                    escape(&tags[v])
                );
            }
            None => {
                let _ = writeln!(s, "    <node id=\"n{v}\"/>");
            }
        }
    }
    for (k, (u, v, z)) in g.edges().enumerate() {
        let _ = writeln!(
            s,
            "    <edge id=\"e{k}\" source=\"n{u}\" target=\"n{v}\"><data key=\"phase\">{}</data></edge>",
            phase(z)
        );
    }
    s.push_str("  </graph>\n</graphml>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Writes through a temporary sibling file and renames, so a failed write
/// never leaves a truncated artifact behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| QlError::invalid(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.partial", name.to_string_lossy()));
    let res = fs::write(&tmp, bytes).and_then(|_| fs::rename(&tmp, path));
    if res.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(res?)
}

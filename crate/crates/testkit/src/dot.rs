use std::collections::BTreeMap;

use graphviz_rust::dot_structures::{Attribute, EdgeTy, Graph, Id, Stmt, Vertex};

#[derive(Debug, Clone, PartialEq)]
pub struct DotNode {
    pub id: String,
    pub attrs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DotEdge {
    pub from: String,
    pub to: String,
    pub attrs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default)]
pub struct DotGraph {
    pub directed: bool,
    pub nodes: Vec<DotNode>,
    pub edges: Vec<DotEdge>,
    pub graph_attrs: BTreeMap<String, String>,
    pub edge_defaults: BTreeMap<String, String>,
}

impl DotGraph {
    pub fn node(&self, id: &str) -> Option<&DotNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn nodes_with_shape(&self, shape: &str) -> Vec<&DotNode> {
        self.nodes.iter().filter(|n| n.attr("shape") == Some(shape)).collect()
    }
}

impl DotNode {
    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.get(key).map(String::as_str)
    }

    /// The decoded label, one entry per rendered line.
    pub fn label_lines(&self) -> Vec<String> {
        decode_label(self.attr("label").unwrap_or_default())
            .split('\n')
            .map(str::to_string)
            .collect()
    }
}

/// DOT-level unquoting: only `\"` is an escape, other backslashes stay.
fn unquote(id: &Id) -> String {
    match id {
        Id::Escaped(s) => {
            let inner = s.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(s);
            let mut out = String::new();
            let mut chars = inner.chars();
            while let Some(c) = chars.next() {
                if c != '\\' {
                    out.push(c);
                    continue;
                }
                match chars.next() {
                    Some('"') => out.push('"'),
                    Some(other) => {
                        out.push('\\');
                        out.push(other);
                    }
                    None => out.push('\\'),
                }
            }
            out
        }
        Id::Html(s) | Id::Plain(s) | Id::Anonymous(s) => s.clone(),
    }
}

/// Label-level decoding of Graphviz escape strings: `\\` is a backslash and
/// `\n`, `\l`, `\r` are line breaks.
pub fn decode_label(raw: &str) -> String {
    let mut out = String::new();
    let mut chars = raw.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('n' | 'l' | 'r') => out.push('\n'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

fn attrs(list: &[Attribute]) -> BTreeMap<String, String> {
    list.iter().map(|Attribute(k, v)| (unquote(k), unquote(v))).collect()
}

fn vertex_id(v: &Vertex) -> Result<String, String> {
    match v {
        Vertex::N(n) => Ok(unquote(&n.0)),
        Vertex::S(_) => Err("subgraph used as an edge endpoint".to_string()),
    }
}

/// Parses DOT text with the Graphviz grammar and flattens it into nodes and
/// edges. Subgraphs are rejected since the exporter never emits them.
pub fn parse(text: &str) -> Result<DotGraph, String> {
    let graph = graphviz_rust::parse(text)?;
    let (directed, stmts) = match graph {
        Graph::Graph { stmts, .. } => (false, stmts),
        Graph::DiGraph { stmts, .. } => (true, stmts),
    };
    let mut out = DotGraph {
        directed,
        ..DotGraph::default()
    };
    for stmt in stmts {
        match stmt {
            Stmt::Node(n) => out.nodes.push(DotNode {
                id: unquote(&n.id.0),
                attrs: attrs(&n.attributes),
            }),
            Stmt::Edge(e) => {
                let ends = match &e.ty {
                    EdgeTy::Pair(a, b) => vec![vertex_id(a)?, vertex_id(b)?],
                    EdgeTy::Chain(vs) => vs.iter().map(vertex_id).collect::<Result<_, _>>()?,
                };
                for pair in ends.windows(2) {
                    out.edges.push(DotEdge {
                        from: pair[0].clone(),
                        to: pair[1].clone(),
                        attrs: attrs(&e.attributes),
                    });
                }
            }
            Stmt::Attribute(Attribute(k, v)) => {
                out.graph_attrs.insert(unquote(&k), unquote(&v));
            }
            Stmt::GAttribute(graphviz_rust::dot_structures::GraphAttributes::Edge(list)) => {
                out.edge_defaults.extend(attrs(&list));
            }
            Stmt::GAttribute(_) => {}
            Stmt::Subgraph(_) => return Err("unexpected subgraph".to_string()),
        }
    }
    Ok(out)
}

//! Reader for the GML subset used by common network datasets:
//! `graph [ directed 1 node [ id 0 label "x" value 1 ] edge [ source 0 target 1 ] ]`.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

#[derive(Debug, Clone)]
pub struct GmlGraph {
    pub graph: DirectedGraph,
    /// Class index per node, present when every kept node has a `value`.
    pub labels: Option<Vec<usize>>,
    /// Raw `value` strings in class-index order.
    pub label_names: Vec<String>,
    pub directed: bool,
    pub self_loops_dropped: usize,
    pub isolated_dropped: usize,
}

pub fn read_gml(path: impl AsRef<Path>, drop_isolated: bool) -> Result<GmlGraph> {
    let text = std::fs::read_to_string(path)?;
    parse_gml(&text, drop_isolated)
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Int(i64),
    Real(f64),
    Str(String),
    List(Vec<(String, Value, usize)>),
}

impl Value {
    fn scalar_string(&self) -> Option<String> {
        match self {
            Value::Int(i) => Some(i.to_string()),
            Value::Real(r) => Some(r.to_string()),
            Value::Str(s) => Some(s.clone()),
            Value::List(_) => None,
        }
    }
}

struct Lexer<'a> {
    bytes: &'a [u8],
    text: &'a str,
    pos: usize,
}

#[derive(Debug, PartialEq)]
enum Token {
    Key(String),
    Int(i64),
    Real(f64),
    Str(String),
    Open,
    Close,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { bytes: text.as_bytes(), text, pos: 0 }
    }

    fn err(&self, offset: usize, msg: impl Into<String>) -> Error {
        Error::Gml { offset, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    /// Returns the token and its starting byte offset.
    fn next(&mut self) -> Result<Option<(Token, usize)>> {
        self.skip_ws();
        let start = self.pos;
        let Some(&b) = self.bytes.get(self.pos) else {
            return Ok(None);
        };
        let tok = match b {
            b'[' => {
                self.pos += 1;
                Token::Open
            }
            b']' => {
                self.pos += 1;
                Token::Close
            }
            b'"' => {
                self.pos += 1;
                let s = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'"' {
                    self.pos += 1;
                }
                if self.pos >= self.bytes.len() {
                    return Err(self.err(start, "unterminated string"));
                }
                let out = self.text[s..self.pos].to_string();
                self.pos += 1;
                Token::Str(out)
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Token::Key(self.text[start..self.pos].to_string())
            }
            b if b.is_ascii_digit() || b == b'-' || b == b'+' || b == b'.' => {
                while self.pos < self.bytes.len()
                    && matches!(self.bytes[self.pos], b'0'..=b'9' | b'-' | b'+' | b'.' | b'e' | b'E')
                {
                    self.pos += 1;
                }
                let lit = &self.text[start..self.pos];
                if let Ok(i) = lit.parse::<i64>() {
                    Token::Int(i)
                } else if let Ok(r) = lit.parse::<f64>() {
                    Token::Real(r)
                } else {
                    return Err(self.err(start, format!("bad number `{lit}`")));
                }
            }
            _ => return Err(self.err(start, format!("unexpected byte 0x{b:02x}"))),
        };
        Ok(Some((tok, start)))
    }
}

/// Parses key/value pairs until `]` (when nested) or end of input.
fn parse_list(lex: &mut Lexer, nested: bool, open_at: usize) -> Result<Vec<(String, Value, usize)>> {
    let mut items = Vec::new();
    loop {
        let Some((tok, at)) = lex.next()? else {
            if nested {
                return Err(lex.err(open_at, "unclosed `[`"));
            }
            return Ok(items);
        };
        let key = match tok {
            Token::Key(k) => k,
            Token::Close if nested => return Ok(items),
            Token::Close => return Err(lex.err(at, "unmatched `]`")),
            other => return Err(lex.err(at, format!("expected key, found {other:?}"))),
        };
        let Some((tok, vat)) = lex.next()? else {
            return Err(lex.err(lex.pos, format!("missing value for `{key}`")));
        };
        let value = match tok {
            Token::Int(i) => Value::Int(i),
            Token::Real(r) => Value::Real(r),
            Token::Str(s) => Value::Str(s),
            Token::Open => Value::List(parse_list(lex, true, vat)?),
            other => return Err(lex.err(vat, format!("expected value for `{key}`, found {other:?}"))),
        };
        items.push((key, value, at));
    }
}

fn field<'v>(items: &'v [(String, Value, usize)], name: &str) -> Option<&'v Value> {
    items.iter().find(|(k, _, _)| k == name).map(|(_, v, _)| v)
}

fn int_field(items: &[(String, Value, usize)], name: &'static str, ctx: usize) -> Result<i64> {
    match field(items, name) {
        Some(Value::Int(i)) => Ok(*i),
        Some(_) => Err(Error::Gml { offset: ctx, msg: format!("`{name}` must be an integer") }),
        None => Err(Error::MissingField { field: name, context: format!("block at byte {ctx}") }),
    }
}

/// Edges are always read as `source -> target`; an undirected file yields
/// one arc per listed edge.
pub fn parse_gml(text: &str, drop_isolated: bool) -> Result<GmlGraph> {
    let mut lex = Lexer::new(text);
    let top = parse_list(&mut lex, false, 0)?;
    let (graph_items, graph_at) = top
        .iter()
        .find_map(|(k, v, at)| match (k.as_str(), v) {
            ("graph", Value::List(items)) => Some((items, *at)),
            _ => None,
        })
        .ok_or(Error::MissingField { field: "graph", context: "top level".into() })?;

    let directed = matches!(field(graph_items, "directed"), Some(Value::Int(1)));
    let mut index: HashMap<i64, usize> = HashMap::new();
    let mut names = Vec::new();
    let mut values: Vec<Option<String>> = Vec::new();
    let mut raw_arcs = Vec::new();
    let mut self_loops = 0;

    for (key, value, at) in graph_items {
        let Value::List(items) = value else { continue };
        match key.as_str() {
            "node" => {
                let id = int_field(items, "id", *at)?;
                if index.insert(id, names.len()).is_some() {
                    return Err(Error::Gml { offset: *at, msg: format!("duplicate node id {id}") });
                }
                let name = field(items, "label")
                    .and_then(Value::scalar_string)
                    .unwrap_or_else(|| id.to_string());
                names.push(name);
                values.push(field(items, "value").and_then(Value::scalar_string));
            }
            "edge" => {
                let s = int_field(items, "source", *at)?;
                let t = int_field(items, "target", *at)?;
                raw_arcs.push((s, t, *at));
            }
            _ => {}
        }
    }
    let _ = graph_at;

    let mut arcs = Vec::with_capacity(raw_arcs.len());
    for (s, t, at) in raw_arcs {
        let lookup = |id: i64| {
            index.get(&id).copied().ok_or_else(|| Error::Gml {
                offset: at,
                msg: format!("edge refers to unknown node {id}"),
            })
        };
        let (u, v) = (lookup(s)?, lookup(t)?);
        if u == v {
            self_loops += 1;
            continue;
        }
        arcs.push((u, v));
    }

    let mut graph = DirectedGraph::with_ids(names, arcs)?;
    let mut keep: Vec<usize> = (0..graph.node_count()).collect();
    let mut isolated_dropped = 0;
    if drop_isolated {
        let isolated = graph.isolated_nodes();
        if !isolated.is_empty() {
            isolated_dropped = isolated.len();
            keep.retain(|i| isolated.binary_search(i).is_err());
            graph = graph.induced_subgraph(&keep)?;
        }
    }

    let kept_values: Vec<&Option<String>> = keep.iter().map(|&i| &values[i]).collect();
    let (labels, label_names) = if !kept_values.is_empty() && kept_values.iter().all(|v| v.is_some()) {
        class_indices(kept_values.iter().map(|v| v.as_deref().unwrap()))
    } else {
        (None, Vec::new())
    };

    Ok(GmlGraph {
        graph,
        labels,
        label_names,
        directed,
        self_loops_dropped: self_loops,
        isolated_dropped,
    })
}

/// Non-negative integer values are used as class indices directly; anything
/// else is numbered in first-seen order.
fn class_indices<'a>(values: impl Iterator<Item = &'a str> + Clone) -> (Option<Vec<usize>>, Vec<String>) {
    let ints: Option<Vec<usize>> = values.clone().map(|v| v.parse::<usize>().ok()).collect();
    if let Some(ints) = ints {
        let max = ints.iter().copied().max().unwrap_or(0);
        let names = (0..=max).map(|i| i.to_string()).collect();
        return (Some(ints), names);
    }
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let mut names = Vec::new();
    let labels = values
        .map(|v| {
            *seen.entry(v).or_insert_with(|| {
                names.push(v.to_string());
                names.len() - 1
            })
        })
        .collect();
    (Some(labels), names)
}

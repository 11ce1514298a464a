//! Line-oriented text codecs for networks and demand files.
//!
//! Network files:
//! ```text
//! # comment
//! p network <n> <m> <k>
//! t <terminal-id> ...
//! e <u> <v> <num>/<den>
//! ```
//! Demand files carry `d <ti> <tj> <num>/<den>` lines. Fields are separated
//! by whitespace and `#` starts a comment anywhere on a line. Serialization
//! is canonical (sorted edge lines, explicit `<num>/<den>` capacities), so
//! equal values produce byte-identical files.
//!
//! Only vertices mentioned on `t` or `e` lines exist in the format; a
//! non-terminal with no edges cannot be expressed and is dropped on output.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::flow::Demand;
use crate::network::{Network, VertexId};
use crate::rational::{format_rational, parse_rational, Rational};

fn content_tokens(line: &str) -> Vec<&str> {
    let text = line.split('#').next().unwrap_or("");
    text.split_whitespace().collect()
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_id(tok: &str, line: usize) -> Result<VertexId> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad vertex id {tok:?}")))
}

fn parse_cap(tok: &str, line: usize) -> Result<Rational> {
    parse_rational(tok).map_err(|_| parse_err(line, format!("bad rational {tok:?}")))
}

pub fn parse_network(text: &str) -> Result<Network> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut terminals: Option<Vec<VertexId>> = None;
    let mut edge_lines: Vec<(VertexId, VertexId, Rational)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let toks = content_tokens(raw);
        if toks.is_empty() {
            continue;
        }
        match toks[0] {
            "p" => {
                if header.is_some() {
                    return Err(parse_err(lineno, "duplicate p line"));
                }
                if toks.len() != 5 || toks[1] != "network" {
                    return Err(parse_err(lineno, "expected `p network <n> <m> <k>`"));
                }
                let nums: Vec<usize> = toks[2..]
                    .iter()
                    .map(|t| {
                        t.parse()
                            .map_err(|_| parse_err(lineno, format!("bad count {t:?}")))
                    })
                    .collect::<Result<_>>()?;
                header = Some((nums[0], nums[1], nums[2]));
            }
            "t" => {
                if header.is_none() {
                    return Err(parse_err(lineno, "t line before p line"));
                }
                if terminals.is_some() {
                    return Err(parse_err(lineno, "duplicate t line"));
                }
                let ids = toks[1..]
                    .iter()
                    .map(|t| parse_id(t, lineno))
                    .collect::<Result<Vec<_>>>()?;
                terminals = Some(ids);
            }
            "e" => {
                if header.is_none() {
                    return Err(parse_err(lineno, "e line before p line"));
                }
                if toks.len() != 4 {
                    return Err(parse_err(lineno, "expected `e <u> <v> <num>/<den>`"));
                }
                let u = parse_id(toks[1], lineno)?;
                let v = parse_id(toks[2], lineno)?;
                let c = parse_cap(toks[3], lineno)?;
                edge_lines.push((u, v, c));
            }
            other => return Err(parse_err(lineno, format!("unknown directive {other:?}"))),
        }
    }
    let (n, m, k) = header.ok_or_else(|| parse_err(0, "missing p line"))?;
    let terminals = terminals.unwrap_or_default();
    if terminals.len() != k {
        return Err(parse_err(
            0,
            format!("header declares {k} terminals, t line has {}", terminals.len()),
        ));
    }
    if edge_lines.len() != m {
        return Err(parse_err(
            0,
            format!("header declares {m} edges, found {}", edge_lines.len()),
        ));
    }
    let mut vertices: BTreeSet<VertexId> = terminals.iter().copied().collect();
    for (u, v, _) in &edge_lines {
        vertices.insert(*u);
        vertices.insert(*v);
    }
    if vertices.len() != n {
        return Err(parse_err(
            0,
            format!("header declares {n} vertices, found {}", vertices.len()),
        ));
    }
    let mut net = Network::new(vertices, terminals)?;
    for (u, v, c) in edge_lines {
        net.add_edge(u, v, c)?;
    }
    Ok(net)
}

pub fn format_network(net: &Network) -> String {
    let mut mentioned: BTreeSet<VertexId> = net.terminals().iter().copied().collect();
    for (u, v, _) in net.edges() {
        mentioned.insert(u);
        mentioned.insert(v);
    }
    let mut out = String::new();
    out.push_str(&format!(
        "p network {} {} {}\n",
        mentioned.len(),
        net.edge_count(),
        net.k()
    ));
    out.push('t');
    for t in net.terminals() {
        out.push_str(&format!(" {t}"));
    }
    out.push('\n');
    for (u, v, c) in net.edges() {
        out.push_str(&format!("e {u} {v} {}\n", format_rational(c)));
    }
    out
}

/// Reads a demand file against an explicit terminal order. Repeated pairs
/// accumulate. Pairs must join two distinct listed terminals.
pub fn parse_demands(text: &str, terminals: &[VertexId]) -> Result<Demand> {
    let mut demand = Demand::new(terminals.len());
    let index = |id: VertexId, line: usize| {
        terminals
            .iter()
            .position(|&t| t == id)
            .ok_or_else(|| parse_err(line, format!("{id} is not a terminal")))
    };
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let toks = content_tokens(raw);
        if toks.is_empty() {
            continue;
        }
        if toks[0] != "d" || toks.len() != 4 {
            return Err(parse_err(lineno, "expected `d <ti> <tj> <num>/<den>`"));
        }
        let i = index(parse_id(toks[1], lineno)?, lineno)?;
        let j = index(parse_id(toks[2], lineno)?, lineno)?;
        let value = parse_cap(toks[3], lineno)?;
        demand
            .add(i, j, value)
            .map_err(|e| parse_err(lineno, e.to_string()))?;
    }
    Ok(demand)
}

pub fn format_demands(demand: &Demand, terminals: &[VertexId]) -> String {
    let mut out = String::new();
    for ((i, j), value) in demand.pairs() {
        out.push_str(&format!(
            "d {} {} {}\n",
            terminals[i],
            terminals[j],
            format_rational(value)
        ));
    }
    out
}

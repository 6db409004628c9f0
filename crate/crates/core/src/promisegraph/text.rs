//! Line-oriented graph format.
//!
//! ```text
//! # comment
//! agent <id> <alpha>
//! calibrate <type> <c>
//! promise <giver> <receiver> <type> <+|-> <constraint-csv|~> [| <condition-csv>]
//! ```
//!
//! `~` stands for an empty constraint. Tokens are separated by whitespace;
//! blank lines and `#` comments are ignored. Canonical output lists agents,
//! then calibrations sorted by type, then promises, with single spaces and
//! sorted constraint and condition lists.

use std::fmt::Write as _;

use super::{AgentId, GraphError, Polarity, Promise, PromiseGraph, Result, TypeTag};

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse { line, message: message.into() }
}

fn parse_f64(line: usize, what: &str, s: &str) -> Result<f64> {
    s.parse().map_err(|_| parse_err(line, format!("invalid {what} {s:?}")))
}

fn ident<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| parse_err(line, e.to_string()))
}

fn parse_promise(line: usize, tokens: &[&str]) -> Result<Promise> {
    if tokens.len() != 6 && tokens.len() != 8 {
        return Err(parse_err(
            line,
            "expected `promise <giver> <receiver> <type> <+|-> <constraint> [| <conditions>]`",
        ));
    }
    let giver = ident(line, AgentId::new(tokens[1]))?;
    let receiver = ident(line, AgentId::new(tokens[2]))?;
    let type_tag = ident(line, TypeTag::new(tokens[3]))?;
    let polarity = match tokens[4] {
        "+" => Polarity::Offer,
        "-" => Polarity::Accept,
        other => return Err(parse_err(line, format!("polarity must be + or -, got {other:?}"))),
    };
    let constraint: Vec<&str> = if tokens[5] == "~" { Vec::new() } else { tokens[5].split(',').collect() };
    if constraint.iter().any(|c| c.is_empty() || *c == "~") {
        return Err(parse_err(line, format!("invalid constraint {:?}", tokens[5])));
    }
    let mut promise = Promise::new(&giver, &receiver, &type_tag, polarity, constraint);
    if tokens.len() == 8 {
        if tokens[6] != "|" {
            return Err(parse_err(line, format!("expected `|`, got {:?}", tokens[6])));
        }
        let conditions = tokens[7]
            .split(',')
            .map(|c| ident(line, TypeTag::new(c)))
            .collect::<Result<Vec<_>>>()?;
        promise = promise.given(conditions);
    }
    Ok(promise)
}

/// Parses the text format into a validated graph.
pub fn parse_graph(input: &str) -> Result<PromiseGraph> {
    let mut builder = PromiseGraph::builder();
    for (i, raw) in input.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens.first().copied() {
            None => {}
            Some("agent") => {
                if tokens.len() != 3 {
                    return Err(parse_err(line, "expected `agent <id> <alpha>`"));
                }
                let id = ident(line, AgentId::new(tokens[1]))?;
                builder.add_agent(&id, parse_f64(line, "assessment", tokens[2])?);
            }
            Some("calibrate") => {
                if tokens.len() != 3 {
                    return Err(parse_err(line, "expected `calibrate <type> <c>`"));
                }
                let tag = ident(line, TypeTag::new(tokens[1]))?;
                builder.set_calibration(&tag, parse_f64(line, "calibration", tokens[2])?);
            }
            Some("promise") => builder.add_promise(parse_promise(line, &tokens)?),
            Some(other) => return Err(parse_err(line, format!("unknown record {other:?}"))),
        }
    }
    builder.build()
}

/// Emits the canonical text form of `graph`.
pub fn write_graph(graph: &PromiseGraph) -> String {
    let mut out = String::new();
    for a in graph.agents() {
        writeln!(out, "agent {} {}", a.id, a.assessment).expect("write to string");
    }
    for (tag, c) in graph.calibration() {
        writeln!(out, "calibrate {tag} {c}").expect("write to string");
    }
    for p in graph.promises() {
        let constraint = if p.constraint.is_empty() {
            "~".to_string()
        } else {
            p.constraint.iter().map(String::as_str).collect::<Vec<_>>().join(",")
        };
        write!(out, "promise {} {} {} {} {}", p.giver, p.receiver, p.type_tag, p.polarity.symbol(), constraint)
            .expect("write to string");
        if p.is_conditional() {
            let conds: Vec<&str> = p.conditions.iter().map(TypeTag::as_str).collect();
            write!(out, " | {}", conds.join(",")).expect("write to string");
        }
        out.push('\n');
    }
    out
}

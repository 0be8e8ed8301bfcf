//! JSON game files with exact probability strings, α-schedule files, and DOT
//! export.
//!
//! ```json
//! {
//!   "vertices": [{"id": 0, "owner": "random", "priority": 1},
//!                {"id": 1, "owner": "eve", "priority": 0, "label": "w"}],
//!   "edges": [{"from": 0, "to": 1, "prob": "1/2"},
//!             {"from": 0, "to": 0, "prob": "0.5"},
//!             {"from": 1, "to": 1}],
//!   "objective": {"type": "parity"}
//! }
//! ```
//!
//! Probabilities must be JSON strings; bare JSON numbers are rejected so that
//! no value passes through binary floating point.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize};

use crate::arena::{Arena, Game, Objective, Owner, PriorityFn, VertexId};
use crate::rational::{approx_decimal, format_exact, parse_exact, Rational};
use crate::reduction::AlphaSchedule;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IoError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{}", .0.join("; "))]
    Semantic(Vec<String>),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep only the message
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        IoError::Syntax { line: e.line(), column: e.column(), message }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum OwnerTag {
    Eve,
    Adam,
    Random,
}

impl From<OwnerTag> for Owner {
    fn from(t: OwnerTag) -> Self {
        match t {
            OwnerTag::Eve => Owner::Eve,
            OwnerTag::Adam => Owner::Adam,
            OwnerTag::Random => Owner::Random,
        }
    }
}

impl From<Owner> for OwnerTag {
    fn from(o: Owner) -> Self {
        match o {
            Owner::Eve => OwnerTag::Eve,
            Owner::Adam => OwnerTag::Adam,
            Owner::Random => OwnerTag::Random,
        }
    }
}

/// An exact probability read from a JSON string.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Prob(Rational);

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ProbVisitor;
        impl Visitor<'_> for ProbVisitor {
            type Value = Prob;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a probability string such as \"1/10\" or \"0.1\"")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Prob, E> {
                parse_exact(v).map(Prob).map_err(E::custom)
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Prob, E> {
                Err(E::custom(format!(
                    "probability {v} is a JSON number; write it as a string (\"a/b\" or exact decimal)"
                )))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Prob, E> {
                self.visit_f64(v as f64)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Prob, E> {
                self.visit_f64(v as f64)
            }
        }
        d.deserialize_any(ProbVisitor)
    }
}

impl Serialize for Prob {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_exact(&self.0))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRecord {
    id: usize,
    owner: OwnerTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    priority: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    from: usize,
    to: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prob: Option<Prob>,
    /// Decimal hint written by `--approx`; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    approx: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum ObjectiveRecord {
    Parity,
    Reachability { target: Vec<usize> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    vertices: Vec<VertexRecord>,
    edges: Vec<EdgeRecord>,
    objective: ObjectiveRecord,
}

/// Builds the game without checking arena invariants, so that `validate` can
/// list every violation. Only problems that prevent building an arena at all
/// (bad ids, missing priorities) are reported here.
pub fn parse_unchecked(text: &str) -> Result<Game, IoError> {
    let file: GameFile = serde_json::from_str(text)?;
    let n = file.vertices.len();
    let mut errors = Vec::new();
    let mut slots: Vec<Option<&VertexRecord>> = vec![None; n];
    for v in &file.vertices {
        if v.id >= n {
            errors.push(format!("vertex id {} is out of range 0..{}", v.id, n));
        } else if slots[v.id].is_some() {
            errors.push(format!("vertex id {} is declared twice", v.id));
        } else {
            slots[v.id] = Some(v);
        }
    }
    if !errors.is_empty() {
        return Err(IoError::Semantic(errors));
    }
    let records: Vec<&VertexRecord> = slots.into_iter().map(|s| s.expect("dense ids")).collect();

    let mut arena = Arena::new();
    for r in &records {
        arena.add_vertex(r.owner.into(), r.label.clone());
    }
    for (i, e) in file.edges.iter().enumerate() {
        if e.from >= n {
            errors.push(format!("edge #{i} starts at unknown vertex {}", e.from));
            continue;
        }
        match &e.prob {
            Some(p) => arena.add_random_edge(VertexId(e.from), VertexId(e.to), p.0.clone()),
            None => arena.add_edge(VertexId(e.from), VertexId(e.to)),
        }
    }
    let objective = match file.objective {
        ObjectiveRecord::Parity => {
            let mut pr = Vec::with_capacity(n);
            for r in &records {
                match r.priority {
                    Some(p) => pr.push(p),
                    None => errors.push(format!("vertex {} has no priority", r.id)),
                }
            }
            Objective::Parity(PriorityFn::new(pr))
        }
        ObjectiveRecord::Reachability { target } => {
            Objective::Reachability(target.into_iter().map(VertexId).collect())
        }
    };
    if !errors.is_empty() {
        return Err(IoError::Semantic(errors));
    }
    Ok(Game { arena, objective })
}

/// Parses and validates a game file.
pub fn parse(text: &str) -> Result<Game, IoError> {
    let game = parse_unchecked(text)?;
    let violations = game.validate();
    if violations.is_empty() {
        Ok(game)
    } else {
        Err(IoError::Semantic(violations.iter().map(|v| v.to_string()).collect()))
    }
}

/// Serializes a game; `approx` adds decimal hints next to probabilities.
pub fn serialize(game: &Game, approx: bool) -> String {
    let arena = &game.arena;
    let prios = game.objective.priorities();
    let vertices = arena
        .vertex_ids()
        .map(|v| VertexRecord {
            id: v.0,
            owner: arena.owner(v).into(),
            priority: prios.map(|p| p.get(v)),
            label: arena.label(v).map(str::to_string),
        })
        .collect();
    let edges = arena
        .vertex_ids()
        .flat_map(|v| {
            arena.edges(v).iter().map(move |e| EdgeRecord {
                from: v.0,
                to: e.target.0,
                approx: match (&e.prob, approx) {
                    (Some(p), true) => Some(approx_decimal(p, 12)),
                    _ => None,
                },
                prob: e.prob.clone().map(Prob),
            })
        })
        .collect();
    let objective = match &game.objective {
        Objective::Parity(_) => ObjectiveRecord::Parity,
        Objective::Reachability(t) => ObjectiveRecord::Reachability {
            target: t.iter().map(|v| v.0).collect(),
        },
    };
    let file = GameFile { vertices, edges, objective };
    let mut s = serde_json::to_string_pretty(&file).expect("game file serializes");
    s.push('\n');
    s
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum AlphaFile {
    List(Vec<Prob>),
    Geometric { first: Prob, ratio: Prob },
}

/// Reads an α-schedule: either a JSON list `["1/8", "1/64", ...]` giving
/// α_0, α_1, ... or an object `{"first": "1/8", "ratio": "1/8"}`.
pub fn parse_alpha(text: &str) -> Result<AlphaSchedule, IoError> {
    let f: AlphaFile = serde_json::from_str(text).map_err(|e| {
        if e.is_data() {
            IoError::Semantic(vec![
                "alpha file must be a list of probability strings or {\"first\", \"ratio\"}".into(),
            ])
        } else {
            e.into()
        }
    })?;
    Ok(match f {
        AlphaFile::List(v) => AlphaSchedule::table(v.into_iter().map(|p| p.0).collect()),
        AlphaFile::Geometric { first, ratio } => AlphaSchedule::geometric(first.0, ratio.0),
    })
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering: Eve vertices are boxes, Adam vertices pentagons,
/// random vertices circles; target vertices are green and other absorbing
/// vertices red.
pub fn to_dot(game: &Game) -> String {
    let arena = &game.arena;
    let empty = BTreeSet::new();
    let target = game.objective.target().unwrap_or(&empty);
    let mut out = String::from("digraph game {\n  rankdir=LR;\n");
    for v in arena.vertex_ids() {
        let shape = match arena.owner(v) {
            Owner::Eve => "box",
            Owner::Adam => "pentagon",
            Owner::Random => "circle",
        };
        let mut label = dot_escape(&arena.display_name(v));
        if let Some(p) = game.objective.priorities() {
            let _ = write!(label, "\\n{}", p.get(v));
        }
        let absorbing = arena.edges(v).iter().all(|e| e.target == v);
        let color = if target.contains(&v) {
            ", style=filled, fillcolor=green"
        } else if absorbing {
            ", style=filled, fillcolor=red"
        } else {
            ""
        };
        let _ = writeln!(out, "  {} [label=\"{}\", shape={shape}{color}];", v.0, label);
    }
    for v in arena.vertex_ids() {
        for e in arena.edges(v) {
            match &e.prob {
                Some(p) => {
                    let _ = writeln!(out, "  {} -> {} [label=\"{}\"];", v.0, e.target.0, format_exact(p));
                }
                None => {
                    let _ = writeln!(out, "  {} -> {};", v.0, e.target.0);
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Per-vertex values as a JSON object keyed by vertex id.
pub fn values_json(values: &[Rational]) -> String {
    let map: BTreeMap<usize, String> =
        values.iter().enumerate().map(|(i, v)| (i, format_exact(v))).collect();
    serde_json::to_string(&map).expect("values serialize")
}

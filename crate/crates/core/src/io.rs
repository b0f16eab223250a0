//! File formats: QP files, graph exports, DOT and polygon specs.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cy3::CyObject;
use crate::error::{Error, Result};
use crate::exchange::{quotient_simple_label, ExchangeGraph, QuotientGraph};
use crate::linalg::{format_rational, parse_rational};
use crate::polygon::{chord, Chord, PolygonPair, PolygonTriangulation, Side};
use crate::qp::{Arrow, Potential, Qp, Quiver};
use crate::silting::{PartialSiltingGraph, SiltingGraph};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
struct ArrowFile {
    id: String,
    src: String,
    tgt: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    comment: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
struct TermFile {
    coeff: String,
    cycle: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct QpFile {
    vertices: Vec<String>,
    arrows: Vec<ArrowFile>,
    #[serde(default)]
    potential: Vec<TermFile>,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

fn qp_from_file(f: QpFile) -> Result<Qp> {
    let arrows = f
        .arrows
        .into_iter()
        .map(|a| Arrow {
            id: a.id,
            src: a.src,
            tgt: a.tgt,
            comment: a.comment,
        })
        .collect();
    let mut pot = Potential::zero();
    for t in &f.potential {
        pot.add(&t.cycle, parse_rational(&t.coeff)?);
    }
    Qp::new(Quiver::new(f.vertices, arrows), pot)
}

fn qp_to_file(qp: &Qp) -> QpFile {
    QpFile {
        vertices: qp.quiver.vertices.clone(),
        arrows: qp
            .quiver
            .arrows
            .iter()
            .map(|a| ArrowFile {
                id: a.id.clone(),
                src: a.src.clone(),
                tgt: a.tgt.clone(),
                comment: a.comment.clone(),
            })
            .collect(),
        potential: qp
            .potential
            .terms()
            .map(|(c, x)| TermFile {
                coeff: format_rational(x),
                cycle: c.clone(),
            })
            .collect(),
    }
}

/// Parses and validates a QP file.
pub fn parse_qp(text: &str) -> Result<Qp> {
    qp_from_file(serde_json::from_str(text).map_err(parse_err)?)
}

pub fn qp_to_value(qp: &Qp) -> Value {
    serde_json::to_value(qp_to_file(qp)).expect("plain data")
}

pub fn serialize_qp(qp: &Qp) -> String {
    let mut s = serde_json::to_string_pretty(&qp_to_file(qp)).expect("plain data");
    s.push('\n');
    s
}

fn object_value(o: &CyObject) -> Value {
    match o {
        CyObject::Shifted { dim, shift } => json!({ "dim": dim, "shift": shift }),
        CyObject::Opaque { provenance, class } => json!({ "opaque": provenance, "class": class }),
    }
}

pub fn exchange_graph_value(g: &ExchangeGraph) -> Value {
    let vertices: Vec<Value> = g
        .hearts
        .iter()
        .enumerate()
        .map(|(v, h)| {
            json!({
                "key": h.key,
                "simples": h.simples.iter().map(object_value).collect::<Vec<_>>(),
                "quiver": qp_to_value(&h.qp),
                "depth": g.depth[v],
                "interior": g.interior[v],
            })
        })
        .collect();
    let edges: Vec<Value> = g
        .edges
        .iter()
        .map(|e| {
            json!({
                "src": e.src,
                "tgt": e.tgt,
                "index": e.index,
                "label": e.label.label(),
                "kind": "forward",
            })
        })
        .collect();
    json!({ "vertices": vertices, "edges": edges })
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn exchange_graph_dot(g: &ExchangeGraph) -> String {
    let mut out = String::from("digraph exchange {\n");
    for (v, h) in g.hearts.iter().enumerate() {
        let _ = writeln!(out, "  n{v} [label=\"{}\"];", dot_escape(&h.key));
    }
    for e in &g.edges {
        let _ = writeln!(
            out,
            "  n{} -> n{} [label=\"{}\"];",
            e.src,
            e.tgt,
            dot_escape(&e.label.label())
        );
    }
    out.push_str("}\n");
    out
}

pub fn quotient_graph_value(g: &ExchangeGraph, q: &QuotientGraph) -> Value {
    let classes: Vec<Value> = q
        .classes
        .iter()
        .map(|c| {
            json!({
                "key": c.key(),
                "members": c.members.iter().map(|&m| g.hearts[m].key.clone()).collect::<Vec<_>>(),
                "consistent": c.consistent,
                "fully_expanded": c.fully_expanded,
            })
        })
        .collect();
    let edges: Vec<Value> = q
        .edges
        .iter()
        .map(|e| {
            json!({
                "src": e.src,
                "tgt": e.tgt,
                "label": quotient_simple_label(&e.label),
                "witness": e.witness,
            })
        })
        .collect();
    json!({ "subset": q.sub, "classes": classes, "edges": edges })
}

pub fn quotient_graph_dot(g: &ExchangeGraph, q: &QuotientGraph) -> String {
    let mut out = String::from("digraph quotient {\n");
    for (c, cl) in q.classes.iter().enumerate() {
        let members: Vec<&str> = cl.members.iter().map(|&m| g.hearts[m].key.as_str()).collect();
        let _ = writeln!(
            out,
            "  q{c} [label=\"{}\", tooltip=\"{}\"];",
            dot_escape(&cl.key()),
            dot_escape(&members.join(" | "))
        );
    }
    for e in &q.edges {
        let _ = writeln!(
            out,
            "  q{} -> q{} [label=\"{}\"];",
            e.src,
            e.tgt,
            dot_escape(&quotient_simple_label(&e.label))
        );
    }
    out.push_str("}\n");
    out
}

pub fn silting_graph_value(s: &SiltingGraph) -> Value {
    let vertices: Vec<Value> = s
        .states
        .iter()
        .map(|st| json!({ "key": st.key(), "g_matrix": st.g, "heart": st.heart.key }))
        .collect();
    let edges: Vec<Value> = s
        .edges
        .iter()
        .map(|e| json!({ "src": e.src, "tgt": e.tgt, "label": e.index }))
        .collect();
    json!({ "vertices": vertices, "edges": edges, "certificate": s.certificate })
}

pub fn partial_silting_value(s: &PartialSiltingGraph) -> Value {
    let vertices: Vec<Value> = s
        .vertices
        .iter()
        .map(|p| json!({ "key": p.key(), "columns": p.columns, "heart": p.state.heart.key }))
        .collect();
    let edges: Vec<Value> = s
        .edges
        .iter()
        .map(|e| json!({ "src": e.src, "tgt": e.tgt, "label": quotient_simple_label(&e.label) }))
        .collect();
    let unverified: Vec<Value> = s
        .unverified
        .iter()
        .map(|(a, b, l)| json!({ "src": a, "tgt": b, "label": quotient_simple_label(l) }))
        .collect();
    json!({
        "vertices": vertices,
        "edges": edges,
        "certificate": s.certificate,
        "unverified": unverified,
    })
}

/// Heart keys listed in a region file `{"hearts": [...]}`.
pub fn parse_region(text: &str) -> Result<Vec<String>> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Region {
        hearts: Vec<String>,
    }
    let r: Region = serde_json::from_str(text).map_err(parse_err)?;
    Ok(r.hearts)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct PolygonFile {
    k: usize,
    l: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shared: Option<Chord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    identifications: Vec<(Chord, Chord)>,
    /// Chords in the labels of the glued polygon.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    chords: Vec<Chord>,
    /// Chords in the labels of each polygon.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    chords_k: Vec<Chord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    chords_l: Vec<Chord>,
}

/// Parses a polygon spec into the pair and its triangulation.
pub fn parse_polygon(text: &str) -> Result<(PolygonPair, PolygonTriangulation)> {
    let f: PolygonFile = serde_json::from_str(text).map_err(parse_err)?;
    let pp = PolygonPair::new(f.k, f.l)?.with_identifications(f.identifications)?;
    if let Some(s) = f.shared {
        if chord(s.0, s.1) != pp.shared() {
            return Err(Error::InvalidPolygon(format!(
                "shared edge {s:?} differs from {:?}",
                pp.shared()
            )));
        }
    }
    let mut local = pp.triangulation_from_local(&f.chords_k, &f.chords_l).or_else(|_| {
        // Local chords may cover only part of the pair; validated below.
        let mut chords = BTreeSet::new();
        for &(a, b) in &f.chords_k {
            chords.insert(chord(pp.global(Side::K, a)?, pp.global(Side::K, b)?));
        }
        for &(a, b) in &f.chords_l {
            chords.insert(chord(pp.global(Side::L, a)?, pp.global(Side::L, b)?));
        }
        Ok::<_, Error>(PolygonTriangulation { n: pp.n(), chords })
    })?;
    local.chords.extend(f.chords.iter().map(|&(a, b)| chord(a, b)));
    pp.check(&local)?;
    Ok((pp, local))
}

pub fn serialize_polygon(pp: &PolygonPair, t: &PolygonTriangulation) -> String {
    let f = PolygonFile {
        k: pp.k,
        l: pp.l,
        shared: Some(pp.shared()),
        identifications: pp.identifications.clone(),
        chords: t.chords.iter().copied().collect(),
        chords_k: Vec::new(),
        chords_l: Vec::new(),
    };
    let mut s = serde_json::to_string_pretty(&f).expect("plain data");
    s.push('\n');
    s
}

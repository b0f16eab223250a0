//! Quivers with potential and their mutation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::Rational;

/// Default bound on the length of cycles produced while reducing.
pub const DEFAULT_CYCLE_BOUND: usize = 12;

/// A rational combination of paths, each path a list of arrow ids.
pub type PathPoly = BTreeMap<Vec<String>, Rational>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub id: String,
    pub src: String,
    pub tgt: String,
    /// Free text carried through serialization (used for eJe witnesses).
    pub comment: Option<String>,
}

impl Arrow {
    pub fn new(id: impl Into<String>, src: impl Into<String>, tgt: impl Into<String>) -> Self {
        Arrow {
            id: id.into(),
            src: src.into(),
            tgt: tgt.into(),
            comment: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, arrows: Vec<Arrow>) -> Self {
        Quiver { vertices, arrows }
    }

    pub fn arrow(&self, id: &str) -> Option<&Arrow> {
        self.arrows.iter().find(|a| a.id == id)
    }

    pub fn vertex_index(&self, v: &str) -> Option<usize> {
        self.vertices.iter().position(|x| x == v)
    }

    pub fn has_vertex(&self, v: &str) -> bool {
        self.vertices.iter().any(|x| x == v)
    }

    /// Number of arrows `i -> j`.
    pub fn count(&self, i: &str, j: &str) -> usize {
        self.arrows.iter().filter(|a| a.src == i && a.tgt == j).count()
    }
}

/// Rotation of a cycle with lexicographically smallest arrow id sequence.
pub fn canonical_rotation<T: Ord + Clone>(cycle: &[T]) -> Vec<T> {
    let n = cycle.len();
    (0..n)
        .map(|r| {
            let mut v = cycle[r..].to_vec();
            v.extend_from_slice(&cycle[..r]);
            v
        })
        .min()
        .unwrap_or_default()
}

/// Potential stored as canonical cycles with nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Potential {
    terms: BTreeMap<Vec<String>, Rational>,
}

impl Potential {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coeff * cycle`, merging with an existing rotation of it.
    pub fn add(&mut self, cycle: &[String], coeff: Rational) {
        if cycle.is_empty() || coeff.is_zero() {
            return;
        }
        let key = canonical_rotation(cycle);
        let e = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *e += coeff;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<String>, &Rational)> {
        self.terms.iter()
    }

    pub fn arrows(&self) -> BTreeSet<&str> {
        self.terms.keys().flatten().map(String::as_str).collect()
    }

    pub fn contains_arrow(&self, a: &str) -> bool {
        self.terms.keys().any(|c| c.iter().any(|x| x == a))
    }

    /// Cyclic derivative: sum over occurrences of `a` of the rotation that
    /// starts right after `a`, with `a` removed.
    pub fn cyclic_derivative(&self, a: &str) -> PathPoly {
        let mut out = PathPoly::new();
        for (cycle, coeff) in &self.terms {
            for (p, x) in cycle.iter().enumerate() {
                if x != a {
                    continue;
                }
                let mut path: Vec<String> = cycle[p + 1..].to_vec();
                path.extend_from_slice(&cycle[..p]);
                add_poly_term(&mut out, path, coeff.clone());
            }
        }
        out
    }

    pub fn max_len(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }
}

pub(crate) fn add_poly_term(p: &mut PathPoly, path: Vec<String>, c: Rational) {
    if c.is_zero() {
        return;
    }
    let e = p.entry(path.clone()).or_insert_with(Rational::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&path);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Qp {
    pub quiver: Quiver,
    pub potential: Potential,
}

/// One violated invariant reported by [`validate_qp`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateVertex(String),
    DuplicateArrow(String),
    UnknownEndpoint { arrow: String, vertex: String },
    Loop(String),
    TwoCycle(String, String),
    UnknownArrowInPotential(String),
    NotComposable(Vec<String>),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateVertex(v) => write!(f, "duplicate vertex `{v}`"),
            Violation::DuplicateArrow(a) => write!(f, "duplicate arrow `{a}`"),
            Violation::UnknownEndpoint { arrow, vertex } => {
                write!(f, "arrow `{arrow}` uses unknown vertex `{vertex}`")
            }
            Violation::Loop(a) => write!(f, "loop `{a}`"),
            Violation::TwoCycle(a, b) => write!(f, "2-cycle `{a}`, `{b}`"),
            Violation::UnknownArrowInPotential(a) => write!(f, "potential uses unknown arrow `{a}`"),
            Violation::NotComposable(c) => write!(f, "potential term {} is not a cycle", c.join(" ")),
        }
    }
}

pub fn validate_qp(qp: &Qp) -> Vec<Violation> {
    let mut out = Vec::new();
    let q = &qp.quiver;
    let mut seen = BTreeSet::new();
    for v in &q.vertices {
        if !seen.insert(v) {
            out.push(Violation::DuplicateVertex(v.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    for a in &q.arrows {
        if !seen.insert(&a.id) {
            out.push(Violation::DuplicateArrow(a.id.clone()));
        }
        for v in [&a.src, &a.tgt] {
            if !q.has_vertex(v) {
                out.push(Violation::UnknownEndpoint {
                    arrow: a.id.clone(),
                    vertex: v.clone(),
                });
            }
        }
        if a.src == a.tgt {
            out.push(Violation::Loop(a.id.clone()));
        }
    }
    for (i, a) in q.arrows.iter().enumerate() {
        for b in &q.arrows[i + 1..] {
            if a.src != a.tgt && a.src == b.tgt && a.tgt == b.src {
                out.push(Violation::TwoCycle(a.id.clone(), b.id.clone()));
            }
        }
    }
    for (cycle, _) in qp.potential.terms() {
        let mut ok = true;
        for id in cycle {
            if q.arrow(id).is_none() {
                out.push(Violation::UnknownArrowInPotential(id.clone()));
                ok = false;
            }
        }
        if ok && !is_cycle(q, cycle) {
            out.push(Violation::NotComposable(cycle.clone()));
        }
    }
    out
}

pub fn is_path(q: &Quiver, path: &[String]) -> bool {
    path.windows(2).all(|w| match (q.arrow(&w[0]), q.arrow(&w[1])) {
        (Some(a), Some(b)) => a.tgt == b.src,
        _ => false,
    }) && path.iter().all(|a| q.arrow(a).is_some())
}

pub fn is_cycle(q: &Quiver, cycle: &[String]) -> bool {
    if cycle.is_empty() || !is_path(q, cycle) {
        return false;
    }
    let first = q.arrow(&cycle[0]).unwrap();
    let last = q.arrow(cycle.last().unwrap()).unwrap();
    last.tgt == first.src
}

impl Qp {
    pub fn new(quiver: Quiver, potential: Potential) -> Result<Self> {
        let qp = Qp { quiver, potential };
        let v = validate_qp(&qp);
        if let Some(first) = v.first() {
            return Err(Error::InvalidQp(first.to_string()));
        }
        Ok(qp)
    }

    /// Quiver `v_1 -> v_2 -> ... -> v_n` with arrows named `a1, a2, ...`.
    pub fn linear_a(n: usize) -> Self {
        let vertices: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let arrows = (1..n)
            .map(|i| Arrow::new(format!("a{i}"), i.to_string(), (i + 1).to_string()))
            .collect();
        Qp {
            quiver: Quiver::new(vertices, arrows),
            potential: Potential::zero(),
        }
    }

    pub fn n(&self) -> usize {
        self.quiver.vertices.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.quiver.vertices
    }
}

fn reversed_id(id: &str) -> String {
    match id.strip_suffix('*') {
        Some(s) => s.to_string(),
        None => format!("{id}*"),
    }
}

fn fresh(id: String, used: &mut BTreeSet<String>) -> String {
    let mut id = id;
    while used.contains(&id) {
        id.push('\'');
    }
    used.insert(id.clone());
    id
}

/// Arrow reversal at `k` plus composites through `k`. The result may
/// contain 2-cycles and is meant to be fed to [`reduce`].
pub fn premutate(qp: &Qp, k: &str) -> Result<Qp> {
    let q = &qp.quiver;
    if !q.has_vertex(k) {
        return Err(Error::UnknownVertex(k.to_string()));
    }
    let incoming: Vec<&Arrow> = q.arrows.iter().filter(|a| a.tgt == k).collect();
    let outgoing: Vec<&Arrow> = q.arrows.iter().filter(|a| a.src == k).collect();

    let mut used: BTreeSet<String> = q
        .arrows
        .iter()
        .filter(|a| a.src != k && a.tgt != k)
        .map(|a| a.id.clone())
        .collect();
    let mut rename: HashMap<&str, String> = HashMap::new();
    let mut arrows = Vec::new();
    for a in &q.arrows {
        if a.src == k || a.tgt == k {
            let id = fresh(reversed_id(&a.id), &mut used);
            rename.insert(&a.id, id.clone());
            arrows.push(Arrow::new(id, a.tgt.clone(), a.src.clone()));
        } else {
            arrows.push(a.clone());
        }
    }
    let mut composite: HashMap<(&str, &str), String> = HashMap::new();
    for a in &incoming {
        for b in &outgoing {
            let id = fresh(format!("[{}.{}]", a.id, b.id), &mut used);
            composite.insert((&a.id, &b.id), id.clone());
            arrows.push(Arrow::new(id, a.src.clone(), b.tgt.clone()));
        }
    }

    let mut pot = Potential::zero();
    for (cycle, coeff) in qp.potential.terms() {
        // Rotate so the cycle starts away from k; then every visit to k is an
        // adjacent (in, out) pair inside the sequence.
        let start = cycle
            .iter()
            .position(|id| q.arrow(id).is_some_and(|a| a.src != k))
            .unwrap_or(0);
        let mut rot: Vec<&String> = cycle[start..].iter().collect();
        rot.extend(cycle[..start].iter());
        let mut out = Vec::new();
        let mut i = 0;
        while i < rot.len() {
            let a = q.arrow(rot[i]).ok_or_else(|| Error::UnknownArrow(rot[i].clone()))?;
            if a.tgt == k && i + 1 < rot.len() {
                out.push(composite[&(rot[i].as_str(), rot[i + 1].as_str())].clone());
                i += 2;
            } else {
                out.push(rot[i].clone());
                i += 1;
            }
        }
        pot.add(&out, coeff.clone());
    }
    for a in &incoming {
        for b in &outgoing {
            let cyc = vec![
                composite[&(a.id.as_str(), b.id.as_str())].clone(),
                rename[b.id.as_str()].clone(),
                rename[a.id.as_str()].clone(),
            ];
            pot.add(&cyc, Rational::one());
        }
    }
    Ok(Qp {
        quiver: Quiver::new(q.vertices.clone(), arrows),
        potential: pot,
    })
}

/// Replace every occurrence of arrow `v` in `W` by `v + delta`.
fn substitute(w: &Potential, v: &str, delta: &PathPoly) -> Potential {
    let mut out = Potential::zero();
    for (cycle, coeff) in w.terms() {
        // Expand the product over positions; each `v` contributes either
        // itself or one of the paths of `delta`.
        let mut partial: Vec<(Vec<String>, Rational)> = vec![(Vec::new(), coeff.clone())];
        for x in cycle {
            let mut next = Vec::new();
            for (p, c) in &partial {
                let mut keep = p.clone();
                keep.push(x.clone());
                next.push((keep, c.clone()));
                if x == v {
                    for (dp, dc) in delta {
                        let mut q = p.clone();
                        q.extend(dp.iter().cloned());
                        next.push((q, c * dc));
                    }
                }
            }
            partial = next;
        }
        for (p, c) in partial {
            out.add(&p, c);
        }
    }
    out
}

fn scaled(p: &PathPoly, s: &Rational) -> PathPoly {
    p.iter().map(|(k, v)| (k.clone(), v * s)).collect()
}

/// `sum_t coeff_t / m_a(t) * d_a(t)` over terms other than the quadratic one,
/// so that those terms are cyclically `a * P`.
fn split_off(w: &Potential, a: &str, quad: &[String]) -> PathPoly {
    let mut out = PathPoly::new();
    for (cycle, coeff) in w.terms() {
        if cycle.as_slice() == quad {
            continue;
        }
        let m = cycle.iter().filter(|x| *x == a).count();
        if m == 0 {
            continue;
        }
        let s = coeff / Rational::from_integer(m.into());
        for (p, x) in cycle.iter().enumerate() {
            if x == a {
                let mut path: Vec<String> = cycle[p + 1..].to_vec();
                path.extend_from_slice(&cycle[..p]);
                add_poly_term(&mut out, path, s.clone());
            }
        }
    }
    out
}

/// Splits off the trivial part of a premutated QP whose quadratic terms are
/// disjoint 2-cycles `c * u v`.
pub fn reduce(raw: &Qp, bound: usize) -> Result<Qp> {
    let mut w = raw.potential.clone();
    let mut arrows = raw.quiver.arrows.clone();
    loop {
        if w.max_len() > bound {
            return Err(Error::ReductionUnsupported(format!(
                "cycle length {} exceeds bound {bound}",
                w.max_len()
            )));
        }
        let quads: Vec<(Vec<String>, Rational)> = w
            .terms()
            .filter(|(c, _)| c.len() <= 2)
            .map(|(c, x)| (c.clone(), x.clone()))
            .collect();
        let Some((quad, c)) = quads.first().cloned() else {
            break;
        };
        if quad.len() < 2 || quad[0] == quad[1] {
            return Err(Error::ReductionUnsupported(format!(
                "degenerate short term {}",
                quad.join(" ")
            )));
        }
        let (u, v) = (quad[0].clone(), quad[1].clone());
        if quads[1..].iter().any(|(o, _)| o.contains(&u) || o.contains(&v)) {
            return Err(Error::ReductionUnsupported(format!(
                "quadratic terms sharing arrows with {u} {v}"
            )));
        }
        // Phase one: clear u from every other term.
        loop {
            let p = split_off(&w, &u, &quad);
            if p.is_empty() {
                break;
            }
            let delta = scaled(&p, &(-c.recip()));
            w = substitute(&w, &v, &delta);
            if w.max_len() > bound {
                return Err(Error::ReductionUnsupported(format!(
                    "substitution exceeds cycle length bound {bound}"
                )));
            }
        }
        // Phase two: u only occurs in the quadratic term, one step suffices.
        let r = split_off(&w, &v, &quad);
        if !r.is_empty() {
            let delta = scaled(&r, &(-c.recip()));
            w = substitute(&w, &u, &delta);
        }
        if w.terms()
            .any(|(cy, _)| cy.as_slice() != quad.as_slice() && cy.iter().any(|x| *x == u || *x == v))
        {
            return Err(Error::ReductionUnsupported(format!("could not split off {u} {v}")));
        }
        w.add(&quad, -c);
        arrows.retain(|a| a.id != u && a.id != v);
    }
    let quiver = Quiver::new(raw.quiver.vertices.clone(), arrows);
    for (i, a) in quiver.arrows.iter().enumerate() {
        for b in &quiver.arrows[i + 1..] {
            if a.src == b.tgt && a.tgt == b.src {
                return Err(Error::ReductionUnsupported(format!(
                    "2-cycle {} {} has no quadratic term",
                    a.id, b.id
                )));
            }
        }
    }
    Ok(Qp { quiver, potential: w })
}

pub fn mutate(qp: &Qp, k: &str) -> Result<Qp> {
    mutate_with_bound(qp, k, DEFAULT_CYCLE_BOUND)
}

pub fn mutate_with_bound(qp: &Qp, k: &str, bound: usize) -> Result<Qp> {
    reduce(&premutate(qp, k)?, bound)
}

/// A proper vertex subset `I`; the complement is taken in a given QP.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VertexSubset {
    pub members: BTreeSet<String>,
}

impl VertexSubset {
    pub fn new<I, S>(items: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        VertexSubset {
            members: items.into_iter().map(Into::into).collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn contains(&self, v: &str) -> bool {
        self.members.contains(v)
    }

    /// Checks membership against `qp` and that the subset is proper.
    pub fn check(&self, qp: &Qp) -> Result<()> {
        for v in &self.members {
            if !qp.quiver.has_vertex(v) {
                return Err(Error::UnknownVertex(v.clone()));
            }
        }
        if !qp.vertices().is_empty() && self.members.len() >= qp.n() {
            return Err(Error::InvalidSubset("subset must be proper".into()));
        }
        Ok(())
    }

    /// Vertex positions of `I` in `qp`.
    pub fn indices(&self, qp: &Qp) -> Vec<usize> {
        qp.vertices()
            .iter()
            .enumerate()
            .filter(|(_, v)| self.contains(v))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn complement_indices(&self, qp: &Qp) -> Vec<usize> {
        qp.vertices()
            .iter()
            .enumerate()
            .filter(|(_, v)| !self.contains(v))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn complement(&self, qp: &Qp) -> Vec<String> {
        qp.vertices().iter().filter(|v| !self.contains(v)).cloned().collect()
    }
}

/// Full subquiver on `keep` with the terms of `W` that stay inside it.
pub fn restrict(qp: &Qp, keep: &VertexSubset) -> Qp {
    let vertices: Vec<String> = qp.vertices().iter().filter(|v| keep.contains(v)).cloned().collect();
    let arrows: Vec<Arrow> = qp
        .quiver
        .arrows
        .iter()
        .filter(|a| keep.contains(&a.src) && keep.contains(&a.tgt))
        .cloned()
        .collect();
    let ids: BTreeSet<&str> = arrows.iter().map(|a| a.id.as_str()).collect();
    let mut pot = Potential::zero();
    for (cycle, c) in qp.potential.terms() {
        if cycle.iter().all(|a| ids.contains(a.as_str())) {
            pot.add(cycle, c.clone());
        }
    }
    Qp {
        quiver: Quiver::new(vertices, arrows),
        potential: pot,
    }
}

/// `#arrows i -> j` in vertex order.
pub fn ext1_matrix(qp: &Qp) -> Vec<Vec<i64>> {
    let n = qp.n();
    let mut m = vec![vec![0i64; n]; n];
    for a in &qp.quiver.arrows {
        if let (Some(i), Some(j)) = (qp.quiver.vertex_index(&a.src), qp.quiver.vertex_index(&a.tgt)) {
            m[i][j] += 1;
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedArrow {
    pub id: String,
    pub src: String,
    pub tgt: String,
    pub degree: i32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GinzburgQuiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<GradedArrow>,
    /// Differential of each degree -1 and -2 arrow.
    pub differential: BTreeMap<String, PathPoly>,
}

pub fn dual_id(a: &str) -> String {
    format!("{a}^v")
}

pub fn loop_id(v: &str) -> String {
    format!("l_{v}")
}

pub fn ginzburg(qp: &Qp) -> GinzburgQuiver {
    let q = &qp.quiver;
    let mut arrows = Vec::new();
    let mut differential = BTreeMap::new();
    for a in &q.arrows {
        arrows.push(GradedArrow {
            id: a.id.clone(),
            src: a.src.clone(),
            tgt: a.tgt.clone(),
            degree: 0,
        });
    }
    for a in &q.arrows {
        let id = dual_id(&a.id);
        arrows.push(GradedArrow {
            id: id.clone(),
            src: a.tgt.clone(),
            tgt: a.src.clone(),
            degree: -1,
        });
        differential.insert(id, qp.potential.cyclic_derivative(&a.id));
    }
    for v in &q.vertices {
        let id = loop_id(v);
        arrows.push(GradedArrow {
            id: id.clone(),
            src: v.clone(),
            tgt: v.clone(),
            degree: -2,
        });
        let mut d = PathPoly::new();
        for a in &q.arrows {
            if &a.src == v {
                add_poly_term(&mut d, vec![a.id.clone(), dual_id(&a.id)], Rational::one());
            }
            if &a.tgt == v {
                add_poly_term(&mut d, vec![dual_id(&a.id), a.id.clone()], -Rational::one());
            }
        }
        differential.insert(id, d);
    }
    GinzburgQuiver {
        vertices: q.vertices.clone(),
        arrows,
        differential,
    }
}

/// Relabeling produced by [`canonical_form`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabeling {
    pub vertices: BTreeMap<String, String>,
    pub arrows: BTreeMap<String, String>,
}

type CanonKey = (usize, Vec<(usize, usize)>, Vec<(Vec<usize>, Rational)>);

/// Isomorphism-invariant relabeling with vertices `v0..` and arrows `a0..`.
pub fn canonical_form(qp: &Qp) -> (Qp, Relabeling) {
    let q = &qp.quiver;
    let n = q.vertices.len();
    let vidx: HashMap<&str, usize> = q.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let ends: Vec<(usize, usize)> = q
        .arrows
        .iter()
        .map(|a| (vidx[a.src.as_str()], vidx[a.tgt.as_str()]))
        .collect();
    let aidx: HashMap<&str, usize> = q.arrows.iter().enumerate().map(|(i, a)| (a.id.as_str(), i)).collect();
    let terms: Vec<(Vec<usize>, Rational)> = qp
        .potential
        .terms()
        .map(|(c, x)| (c.iter().map(|a| aidx[a.as_str()]).collect(), x.clone()))
        .collect();

    let colors = refine_colors(n, &ends, &terms);
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, c) in colors.iter().enumerate() {
        classes.entry(*c).or_default().push(v);
    }
    let classes: Vec<Vec<usize>> = classes.into_values().collect();

    let mut best: Option<(CanonKey, Vec<usize>, Vec<usize>)> = None;
    let mut order = Vec::with_capacity(n);
    search_orders(&classes, 0, &mut order, &mut |order: &[usize]| {
        let mut pos = vec![0usize; n];
        for (p, v) in order.iter().enumerate() {
            pos[*v] = p;
        }
        // Group arrows by relabeled endpoints; parallel arrows are permuted.
        let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (a, (s, t)) in ends.iter().enumerate() {
            groups.entry((pos[*s], pos[*t])).or_default().push(a);
        }
        let arrow_list: Vec<(usize, usize)> = groups
            .iter()
            .flat_map(|(k, v)| std::iter::repeat(*k).take(v.len()))
            .collect();
        let group_vec: Vec<Vec<usize>> = groups.into_values().collect();
        let mut arrow_order = Vec::new();
        search_orders(&group_vec, 0, &mut arrow_order, &mut |arrow_order: &[usize]| {
            let mut apos = vec![0usize; ends.len()];
            for (p, a) in arrow_order.iter().enumerate() {
                apos[*a] = p;
            }
            let mut pot: Vec<(Vec<usize>, Rational)> = terms
                .iter()
                .map(|(c, x)| {
                    let mapped: Vec<usize> = c.iter().map(|a| apos[*a]).collect();
                    (canonical_rotation(&mapped), x.clone())
                })
                .collect();
            pot.sort();
            let key: CanonKey = (n, arrow_list.clone(), pot);
            let better = match &best {
                None => true,
                Some((b, _, _)) => key < *b,
            };
            if better {
                best = Some((key, order.to_vec(), arrow_order.to_vec()));
            }
        });
    });
    let (_, vorder, aorder) = best.unwrap_or_default();
    let mut vmap = BTreeMap::new();
    for (p, v) in vorder.iter().enumerate() {
        vmap.insert(q.vertices[*v].clone(), format!("v{p}"));
    }
    let mut amap = BTreeMap::new();
    for (p, a) in aorder.iter().enumerate() {
        amap.insert(q.arrows[*a].id.clone(), format!("a{p}"));
    }
    let vertices = (0..n).map(|p| format!("v{p}")).collect();
    let mut arrows: Vec<Arrow> = aorder
        .iter()
        .enumerate()
        .map(|(p, a)| {
            let old = &q.arrows[*a];
            Arrow::new(format!("a{p}"), vmap[&old.src].clone(), vmap[&old.tgt].clone())
        })
        .collect();
    arrows.sort_by_key(|a| a.id[1..].parse::<usize>().unwrap_or(0));
    let mut pot = Potential::zero();
    for (cycle, c) in qp.potential.terms() {
        let mapped: Vec<String> = cycle.iter().map(|a| amap[a].clone()).collect();
        pot.add(&mapped, c.clone());
    }
    (
        Qp {
            quiver: Quiver::new(vertices, arrows),
            potential: pot,
        },
        Relabeling {
            vertices: vmap,
            arrows: amap,
        },
    )
}

fn refine_colors(n: usize, ends: &[(usize, usize)], terms: &[(Vec<usize>, Rational)]) -> Vec<usize> {
    let mut occ = vec![0usize; n];
    for (c, _) in terms {
        for a in c {
            occ[ends[*a].0] += 1;
        }
    }
    let mut sig: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let out = ends.iter().filter(|e| e.0 == v).count();
            let inn = ends.iter().filter(|e| e.1 == v).count();
            vec![out, inn, occ[v]]
        })
        .collect();
    let mut colors = rank_signatures(&sig);
    for _ in 0..n {
        sig = (0..n)
            .map(|v| {
                let mut outs: Vec<usize> = ends.iter().filter(|e| e.0 == v).map(|e| colors[e.1]).collect();
                let mut ins: Vec<usize> = ends.iter().filter(|e| e.1 == v).map(|e| colors[e.0]).collect();
                outs.sort_unstable();
                ins.sort_unstable();
                let mut s = vec![colors[v], usize::MAX];
                s.extend(outs);
                s.push(usize::MAX);
                s.extend(ins);
                s
            })
            .collect();
        let next = rank_signatures(&sig);
        let stable = distinct(&next) == distinct(&colors);
        colors = next;
        if stable {
            break;
        }
    }
    colors
}

fn distinct(c: &[usize]) -> usize {
    c.iter().collect::<BTreeSet<_>>().len()
}

fn rank_signatures(sig: &[Vec<usize>]) -> Vec<usize> {
    let sorted: BTreeSet<&Vec<usize>> = sig.iter().collect();
    let rank: BTreeMap<&Vec<usize>, usize> = sorted.into_iter().enumerate().map(|(i, s)| (s, i)).collect();
    sig.iter().map(|s| rank[s]).collect()
}

/// Calls `f` on every concatenation of permutations of the given blocks.
fn search_orders(blocks: &[Vec<usize>], b: usize, acc: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if b == blocks.len() {
        f(acc);
        return;
    }
    let mut items = blocks[b].clone();
    permute(&mut items, 0, &mut |perm: &[usize]| {
        let len = acc.len();
        acc.extend_from_slice(perm);
        search_orders(blocks, b + 1, acc, f);
        acc.truncate(len);
    });
}

fn permute(items: &mut Vec<usize>, i: usize, f: &mut dyn FnMut(&[usize])) {
    if i == items.len() {
        f(items);
        return;
    }
    for j in i..items.len() {
        items.swap(i, j);
        permute(items, i + 1, f);
        items.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn s(x: &str) -> String {
        x.to_string()
    }

    fn three_cycle() -> Qp {
        let q = Quiver::new(
            vec![s("1"), s("2"), s("3")],
            vec![
                Arrow::new("a", "1", "2"),
                Arrow::new("b", "2", "3"),
                Arrow::new("c", "3", "1"),
            ],
        );
        let mut w = Potential::zero();
        w.add(&[s("b"), s("c"), s("a")], rat(1));
        Qp::new(q, w).unwrap()
    }

    #[test]
    fn validate_reports_loops_and_two_cycles() {
        assert!(validate_qp(&Qp::linear_a(3)).is_empty());
        let l = Qp {
            quiver: Quiver::new(vec![s("1")], vec![Arrow::new("l", "1", "1")]),
            potential: Potential::zero(),
        };
        assert_eq!(validate_qp(&l), vec![Violation::Loop(s("l"))]);
        let t = Qp {
            quiver: Quiver::new(
                vec![s("1"), s("2")],
                vec![Arrow::new("a", "1", "2"), Arrow::new("b", "2", "1")],
            ),
            potential: Potential::zero(),
        };
        assert_eq!(validate_qp(&t), vec![Violation::TwoCycle(s("a"), s("b"))]);
    }

    #[test]
    fn potential_is_stored_in_canonical_rotation() {
        let qp = three_cycle();
        let terms: Vec<_> = qp.potential.terms().collect();
        assert_eq!(terms[0].0, &vec![s("a"), s("b"), s("c")]);
        let d = qp.potential.cyclic_derivative("a");
        assert_eq!(d, PathPoly::from([(vec![s("b"), s("c")], rat(1))]));
    }

    #[test]
    fn premutate_a3_at_middle() {
        let p = premutate(&Qp::linear_a(3), "2").unwrap();
        let ids: Vec<_> = p
            .quiver
            .arrows
            .iter()
            .map(|a| (a.id.as_str(), a.src.as_str(), a.tgt.as_str()))
            .collect();
        assert_eq!(ids, vec![("a1*", "2", "1"), ("a2*", "3", "2"), ("[a1.a2]", "1", "3")]);
        assert_eq!(p.potential.len(), 1);
        assert!(validate_qp(&p).is_empty());
    }

    #[test]
    fn premutate_edge_cases() {
        let a1 = Qp::linear_a(1);
        assert_eq!(premutate(&a1, "1").unwrap(), a1);
        let p = premutate(&Qp::linear_a(2), "2").unwrap();
        assert_eq!(p.quiver.arrows, vec![Arrow::new("a1*", "2", "1")]);
        assert!(p.potential.is_zero());
        assert_eq!(premutate(&a1, "9"), Err(Error::UnknownVertex(s("9"))));
    }

    #[test]
    fn mutation_twice_returns_a3() {
        let a3 = Qp::linear_a(3);
        let m = mutate(&a3, "2").unwrap();
        assert_eq!(ext1_matrix(&m), vec![vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]);
        let mm = mutate(&m, "2").unwrap();
        assert!(mm.potential.is_zero());
        assert_eq!(canonical_form(&mm).0, canonical_form(&a3).0);
        assert_eq!(mm.quiver.arrows.len(), 2);
    }

    #[test]
    fn reduction_substitutes_higher_terms() {
        // 1 -u-> 2 -v-> 1 with 1 -x-> 3 -y-> 2; W = uv + u x' ... chosen as
        // W = 2 uv + v x y, a 2-cycle plus a 3-cycle sharing v.
        let q = Quiver::new(
            vec![s("1"), s("2"), s("3")],
            vec![
                Arrow::new("u", "1", "2"),
                Arrow::new("v", "2", "1"),
                Arrow::new("x", "1", "3"),
                Arrow::new("y", "3", "2"),
            ],
        );
        let mut w = Potential::zero();
        w.add(&[s("u"), s("v")], rat(2));
        w.add(&[s("v"), s("x"), s("y")], rat(1));
        let raw = Qp {
            quiver: q,
            potential: w,
        };
        let r = reduce(&raw, DEFAULT_CYCLE_BOUND).unwrap();
        let ids: Vec<_> = r.quiver.arrows.iter().map(|a| a.id.as_str()).collect();
        assert_eq!(ids, vec!["x", "y"]);
        assert!(r.potential.is_zero());
        assert!(validate_qp(&r).is_empty());
    }

    #[test]
    fn reduction_refuses_bare_two_cycles() {
        let raw = Qp {
            quiver: Quiver::new(
                vec![s("1"), s("2")],
                vec![Arrow::new("a", "1", "2"), Arrow::new("b", "2", "1")],
            ),
            potential: Potential::zero(),
        };
        assert!(matches!(reduce(&raw, 12), Err(Error::ReductionUnsupported(_))));
    }

    #[test]
    fn mutating_an_oriented_three_cycle() {
        let m = mutate(&three_cycle(), "2").unwrap();
        // The 3-cycle becomes the A3 quiver 1 <- 2 <- 3 with zero potential.
        assert_eq!(m.quiver.arrows.len(), 2);
        assert!(m.potential.is_zero());
        assert_eq!(
            canonical_form(&mutate(&m, "2").unwrap()).0,
            canonical_form(&three_cycle()).0
        );
    }

    #[test]
    fn restriction_drops_cycles_through_the_complement() {
        let m = mutate(&Qp::linear_a(3), "2").unwrap();
        let r = restrict(&m, &VertexSubset::new(["2"]));
        assert_eq!(r.vertices(), &[s("2")]);
        assert!(r.quiver.arrows.is_empty() && r.potential.is_zero());
        let r = restrict(&three_cycle(), &VertexSubset::new(["1", "2"]));
        assert_eq!(r.quiver.arrows.len(), 1);
        assert!(r.potential.is_zero());
    }

    #[test]
    fn ginzburg_differentials() {
        let m = mutate(&Qp::linear_a(3), "2").unwrap();
        let g = ginzburg(&m);
        assert_eq!(g.arrows.len(), 3 + 3 + 3);
        assert_eq!(
            g.differential[&dual_id("[a1.a2]")],
            PathPoly::from([(vec![s("a2*"), s("a1*")], rat(1))])
        );
        let g1 = ginzburg(&Qp::linear_a(1));
        assert_eq!(g1.arrows.len(), 1);
        assert!(g1.differential[&loop_id("1")].is_empty());
        let g3 = ginzburg(&Qp::linear_a(3));
        assert_eq!(g3.differential[&loop_id("2")].len(), 2);
    }

    #[test]
    fn canonical_form_is_label_independent() {
        let a = Qp::linear_a(3);
        let b = Qp {
            quiver: Quiver::new(
                vec![s("z"), s("y"), s("x")],
                vec![Arrow::new("q", "y", "z"), Arrow::new("p", "x", "y")],
            ),
            potential: Potential::zero(),
        };
        assert_eq!(canonical_form(&a).0, canonical_form(&b).0);
        let m = mutate(&a, "2").unwrap();
        assert_ne!(canonical_form(&a).0, canonical_form(&m).0);
    }
}

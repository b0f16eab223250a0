//! Silting objects at the level of K-classes, paired with companion hearts.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::cy3::CyObject;
use crate::error::{Error, Result};
use crate::exchange::{
    explore, lift_tilt_search_dir, quotient_label, quotient_simples, v_tilt_search, Context, Direction, ExchangeGraph,
    Explore, Heart, QuotientGraph, QuotientSimple,
};

/// `[i][j] = g_i . c_j`.
pub fn pairing(g: &[Vec<i64>], c: &[Vec<i64>]) -> Vec<Vec<i64>> {
    g.iter()
        .map(|gi| c.iter().map(|cj| gi.iter().zip(cj).map(|(a, b)| a * b).sum()).collect())
        .collect()
}

fn is_identity(m: &[Vec<i64>]) -> bool {
    m.iter()
        .enumerate()
        .all(|(i, r)| r.iter().enumerate().all(|(j, &x)| x == i64::from(i == j)))
}

fn columns_label(cols: &[Vec<i64>]) -> String {
    cols.iter()
        .map(|c| format!("({})", c.iter().map(i64::to_string).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}

/// A silting object by the classes of its summands in the basis of the
/// indecomposable projectives, with the heart it is dual to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiltingState {
    /// Column `i` is dual to simple `i` of `heart`.
    pub g: Vec<Vec<i64>>,
    pub heart: Heart,
    pub word: Vec<(usize, Direction)>,
}

impl SiltingState {
    pub fn n(&self) -> usize {
        self.g.len()
    }

    pub fn pairing(&self) -> Vec<Vec<i64>> {
        pairing(&self.g, &self.heart.c_matrix())
    }

    /// Sorted columns, then the companion heart.
    pub fn key(&self) -> String {
        let mut cols = self.g.clone();
        cols.sort();
        format!("{}|{}", columns_label(&cols), self.heart.key)
    }

    pub fn g_key(&self) -> String {
        let mut cols = self.g.clone();
        cols.sort();
        columns_label(&cols)
    }
}

pub fn initial_silting(ctx: &Context) -> SiltingState {
    let heart = ctx.standard_heart();
    let n = heart.n();
    let g = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    SiltingState {
        g,
        heart,
        word: Vec::new(),
    }
}

/// Mutates summand `k` and tilts the companion heart at simple `k`.
pub fn silting_mutate(ctx: &Context, s: &SiltingState, k: usize, dir: Direction) -> Result<SiltingState> {
    let n = s.n();
    if k >= n {
        return Err(Error::IndexOutOfRange(k));
    }
    let names = s.heart.qp.vertices();
    let mut col: Vec<i64> = s.g[k].iter().map(|x| -x).collect();
    for i in (0..n).filter(|&i| i != k) {
        let a = match dir {
            Direction::Forward => s.heart.qp.quiver.count(&names[i], &names[k]),
            Direction::Backward => s.heart.qp.quiver.count(&names[k], &names[i]),
        };
        let (si, sk) = (&s.heart.simples[i], &s.heart.simples[k]);
        if !si.is_opaque() && !sk.is_opaque() {
            let e = match dir {
                Direction::Forward => ctx.engine.ext1_cy3(si, sk)?,
                Direction::Backward => ctx.engine.ext1_cy3(sk, si)?,
            };
            if e.total != a {
                return Err(Error::PairingViolation(format!(
                    "multiplicity {} between summands {i} and {k} but {a} arrows",
                    e.total
                )));
            }
        }
        for (c, x) in col.iter_mut().zip(&s.g[i]) {
            *c += a as i64 * x;
        }
    }
    let heart = ctx.tilt_lenient(&s.heart, k, dir)?;
    let mut g = s.g.clone();
    g[k] = col;
    let mut word = s.word.clone();
    word.push((k, dir));
    let next = SiltingState { g, heart, word };
    if !is_identity(&next.pairing()) {
        return Err(Error::PairingViolation(format!("after mutation word {:?}", next.word)));
    }
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiltingEdge {
    pub src: usize,
    pub tgt: usize,
    pub index: usize,
}

/// Silting states indexed like the exchange graph they were built from.
#[derive(Debug, Clone)]
pub struct SiltingGraph {
    pub states: Vec<SiltingState>,
    pub edges: Vec<SiltingEdge>,
    /// `(heart key, silting key)` per vertex.
    pub certificate: Vec<(String, String)>,
}

/// Silting states along the parent pointers of `eg`, with every tilt edge
/// checked against the mutation of its source state.
pub fn seg_from_exchange(ctx: &Context, eg: &ExchangeGraph) -> Result<SiltingGraph> {
    let mut states: Vec<SiltingState> = Vec::with_capacity(eg.len());
    for v in 0..eg.len() {
        let s = match eg.parent[v] {
            None => initial_silting(ctx),
            Some(p) => silting_mutate(ctx, &states[p.parent], p.index, p.dir)?,
        };
        if s.heart.is_representable() && s.heart.key != eg.hearts[v].key {
            return Err(Error::IsomorphismFailure(format!(
                "replay reached {} instead of {}",
                s.heart.key, eg.hearts[v].key
            )));
        }
        states.push(s);
    }
    let mut keys: HashMap<String, usize> = HashMap::new();
    for (v, s) in states.iter().enumerate() {
        if let Some(w) = keys.insert(s.key(), v) {
            return Err(Error::IsomorphismFailure(format!(
                "vertices {w} and {v} share {}",
                s.key()
            )));
        }
    }
    let mut edges = Vec::with_capacity(eg.edges.len());
    for e in &eg.edges {
        let m = silting_mutate(ctx, &states[e.src], e.index, Direction::Forward)?;
        let t = &states[e.tgt];
        let same_heart = !m.heart.is_representable() || !t.heart.is_representable() || m.heart.key == t.heart.key;
        if m.g_key() != t.g_key() || !same_heart {
            return Err(Error::IsomorphismFailure(format!(
                "edge {} -> {} at {} gives {}",
                e.src,
                e.tgt,
                e.index,
                m.key()
            )));
        }
        edges.push(SiltingEdge {
            src: e.src,
            tgt: e.tgt,
            index: e.index,
        });
    }
    let certificate = eg
        .hearts
        .iter()
        .zip(&states)
        .map(|(h, s)| (h.key.clone(), s.key()))
        .collect();
    Ok(SiltingGraph {
        states,
        edges,
        certificate,
    })
}

pub fn seg_explore(ctx: &Context, depth: usize, direction: Explore) -> Result<SiltingGraph> {
    seg_from_exchange(ctx, &explore(ctx, depth, direction))
}

/// The summands of a silting object not dual to the subcategory simples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSilting {
    /// Heart positions of the kept summands.
    pub positions: Vec<usize>,
    pub columns: Vec<Vec<i64>>,
    pub state: SiltingState,
    pub sub: Vec<usize>,
}

impl PartialSilting {
    pub fn comp(&self) -> Vec<usize> {
        (0..self.state.n()).filter(|i| !self.sub.contains(i)).collect()
    }

    /// Quotient simples dual to the kept summands, in position order.
    pub fn labels(&self) -> Vec<QuotientSimple> {
        let comp = self.comp();
        self.positions
            .iter()
            .map(|&p| quotient_label(&self.state.heart.simples[p], &comp).expect("representable"))
            .collect()
    }

    pub fn quotient_key(&self) -> String {
        quotient_key(&self.state.heart, &self.sub)
    }

    /// Sorted columns, then the quotient heart.
    pub fn key(&self) -> String {
        let mut cols = self.columns.clone();
        cols.sort();
        format!("{}|{}", columns_label(&cols), self.quotient_key())
    }

    pub fn position_of(&self, label: &QuotientSimple) -> Option<usize> {
        let labels = self.labels();
        self.positions
            .iter()
            .zip(&labels)
            .find(|(_, l)| *l == label)
            .map(|(&p, _)| p)
    }
}

fn quotient_key(h: &Heart, sub: &[usize]) -> String {
    let comp: Vec<usize> = (0..h.n()).filter(|i| !sub.contains(i)).collect();
    quotient_simples(h, sub, &comp)
        .iter()
        .map(crate::exchange::quotient_simple_label)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn partial_silting(s: &SiltingState, sub: &[usize]) -> Result<PartialSilting> {
    let n = s.n();
    let h = &s.heart;
    if !h.is_representable() {
        return Err(Error::HeartNotLifted);
    }
    if !has_standard_v_simples(h, sub) {
        return Err(Error::HeartNotLifted);
    }
    let v = h.v_simples(sub);
    let positions: Vec<usize> = (0..n).filter(|p| !v.contains(p)).collect();
    let columns: Vec<Vec<i64>> = positions.iter().map(|&p| s.g[p].clone()).collect();
    let c = h.c_matrix();
    for (a, col) in columns.iter().enumerate() {
        if sub.iter().any(|&i| col[i] != 0) {
            return Err(Error::PairingViolation(format!("column {col:?} meets the subcategory")));
        }
        for (b, &p) in positions.iter().enumerate() {
            let x: i64 = col.iter().zip(&c[p]).map(|(u, w)| u * w).sum();
            if x != i64::from(a == b) {
                return Err(Error::PairingViolation(format!("column {col:?} against simple {p}")));
            }
        }
    }
    Ok(PartialSilting {
        positions,
        columns,
        state: s.clone(),
        sub: sub.to_vec(),
    })
}

fn has_standard_v_simples(h: &Heart, sub: &[usize]) -> bool {
    let n = h.n();
    let v = h.v_simples(sub);
    h.is_representable()
        && v.len() == sub.len()
        && sub
            .iter()
            .all(|&i| v.iter().any(|&p| h.simples[p] == CyObject::simple(n, i, 0)))
}

/// Mutates the summand at heart position `j` after lifting the companion
/// heart so that the tilt at `j` descends to the quotient, then tilts at
/// subcategory simples until they are standard again. Tilts at subcategory
/// simples only move the subcategory summands.
pub fn partial_mutate(
    ctx: &Context,
    p: &PartialSilting,
    j: usize,
    dir: Direction,
    lift_bound: usize,
) -> Result<PartialSilting> {
    if !p.positions.contains(&j) {
        return Err(Error::IndexOutOfRange(j));
    }
    let lift = lift_tilt_search_dir(ctx, &p.state.heart, j, &p.sub, dir, lift_bound)?;
    let mut s = p.state.clone();
    for &(i, d) in &lift.steps {
        s = silting_mutate(ctx, &s, i, d)?;
    }
    s = silting_mutate(ctx, &s, j, dir)?;
    if !s.heart.is_representable() {
        return Err(Error::HeartNotLifted);
    }
    let back = v_tilt_search(
        ctx,
        &s.heart,
        j,
        &p.sub,
        &[Direction::Backward, Direction::Forward],
        lift_bound,
        |h| has_standard_v_simples(h, &p.sub),
    )?;
    for &(i, d) in &back.steps {
        s = silting_mutate(ctx, &s, i, d)?;
    }
    let out = partial_silting(&s, &p.sub)?;
    for (a, &q) in p.positions.iter().enumerate() {
        if q != j && out.columns[a] != p.columns[a] {
            return Err(Error::PairingViolation(format!("summand {q} moved")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialEdge {
    pub src: usize,
    pub tgt: usize,
    pub label: QuotientSimple,
}

/// Partial silting objects matched with quotient classes.
#[derive(Debug, Clone)]
pub struct PartialSiltingGraph {
    pub vertices: Vec<PartialSilting>,
    pub edges: Vec<PartialEdge>,
    /// Quotient class of each vertex.
    pub class: Vec<usize>,
    /// `(class key, partial silting key)` per vertex.
    pub certificate: Vec<(String, String)>,
    /// Quotient edges `(src class, tgt class, label)` whose partial mutation
    /// needs a heart outside the representable region.
    pub unverified: Vec<(usize, usize, QuotientSimple)>,
}

fn out_of_reach(e: &Error) -> bool {
    matches!(e, Error::BoundExceeded(_) | Error::HeartNotLifted)
}

/// Builds partial silting objects over the quotient graph, starting from
/// the class of the standard heart, and checks that the correspondence is
/// a label preserving isomorphism. Fully expanded classes must also have
/// every mutation of their partial silting object accounted for.
pub fn seg_bullet(ctx: &Context, q: &QuotientGraph, lift_bound: usize) -> Result<PartialSiltingGraph> {
    let fail = |m: String| Error::IsomorphismFailure(m);
    let root = q
        .class_containing(0)
        .ok_or_else(|| fail("standard heart is not in the quotient graph".into()))?;
    let start = partial_silting(&initial_silting(ctx), &q.sub)?;
    let mut of_class: BTreeMap<usize, usize> = BTreeMap::from([(root, 0)]);
    let mut vertices = vec![start];
    let mut class = vec![root];
    let mut edges: Vec<PartialEdge> = Vec::new();
    let mut queue = VecDeque::from([root]);
    let mut unverified = Vec::new();
    let place = |vertices: &mut Vec<PartialSilting>,
                 class: &mut Vec<usize>,
                 of_class: &mut BTreeMap<usize, usize>,
                 queue: &mut VecDeque<usize>,
                 c: usize,
                 p: PartialSilting|
     -> Result<usize> {
        if p.quotient_key() != q.classes[c].key() {
            return Err(fail(format!(
                "{} lands on {} not {}",
                p.key(),
                p.quotient_key(),
                q.classes[c].key()
            )));
        }
        match of_class.get(&c) {
            Some(&v) if vertices[v].key() == p.key() => Ok(v),
            Some(&v) => Err(fail(format!(
                "class {c} reached as {} and {}",
                vertices[v].key(),
                p.key()
            ))),
            None => {
                of_class.insert(c, vertices.len());
                vertices.push(p);
                class.push(c);
                queue.push_back(c);
                Ok(vertices.len() - 1)
            }
        }
    };
    while let Some(c) = queue.pop_front() {
        let v = of_class[&c];
        for e in &q.edges {
            if e.src == c {
                let p = vertices[v].clone();
                let j = p
                    .position_of(&e.label)
                    .ok_or_else(|| fail(format!("no summand dual to {:?}", e.label)))?;
                let m = match partial_mutate(ctx, &p, j, Direction::Forward, lift_bound) {
                    Err(err) if out_of_reach(&err) => {
                        unverified.push((e.src, e.tgt, e.label.clone()));
                        continue;
                    }
                    r => r?,
                };
                let w = place(&mut vertices, &mut class, &mut of_class, &mut queue, e.tgt, m)?;
                edges.push(PartialEdge {
                    src: v,
                    tgt: w,
                    label: e.label.clone(),
                });
            } else if e.tgt == c && !of_class.contains_key(&e.src) {
                let p = vertices[v].clone();
                let shifted = (e.label.0.clone(), e.label.1 + 1);
                let j = p
                    .position_of(&shifted)
                    .ok_or_else(|| fail(format!("no summand dual to {shifted:?}")))?;
                let m = match partial_mutate(ctx, &p, j, Direction::Backward, lift_bound) {
                    Err(err) if out_of_reach(&err) => {
                        unverified.push((e.src, e.tgt, e.label.clone()));
                        continue;
                    }
                    r => r?,
                };
                place(&mut vertices, &mut class, &mut of_class, &mut queue, e.src, m)?;
            }
        }
    }
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (v, p) in vertices.iter().enumerate() {
        if let Some(w) = seen.insert(p.key(), v) {
            return Err(fail(format!("classes {} and {} share {}", class[w], class[v], p.key())));
        }
    }
    // Mutations out of fully expanded classes are exactly the quotient edges.
    for (v, p) in vertices.iter().enumerate() {
        let c = class[v];
        if !q.classes[c].fully_expanded {
            continue;
        }
        for (&j, label) in p.positions.iter().zip(p.labels()) {
            let m = match partial_mutate(ctx, p, j, Direction::Forward, lift_bound) {
                Err(err) if out_of_reach(&err) => {
                    if !unverified.iter().any(|(s, _, l)| *s == c && *l == label) {
                        return Err(fail(format!("class {c} cannot mutate at {j}: {err}")));
                    }
                    continue;
                }
                r => r?,
            };
            let hit = q.edges.iter().any(|e| {
                e.src == c && e.label == label && of_class.get(&e.tgt).is_some_and(|&w| vertices[w].key() == m.key())
            });
            if !hit {
                return Err(fail(format!("mutation of {} at {j} has no quotient edge", p.key())));
            }
        }
        if q.out_degree(c) != p.positions.len() {
            return Err(fail(format!("class {c} has out-degree {}", q.out_degree(c))));
        }
    }
    let certificate = vertices
        .iter()
        .zip(&class)
        .map(|(p, &c)| (q.classes[c].key(), p.key()))
        .collect();
    Ok(PartialSiltingGraph {
        vertices,
        edges,
        class,
        certificate,
        unverified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qp::Qp;

    fn ctx(n: usize) -> Context {
        Context::new(&Qp::linear_a(n)).unwrap()
    }

    #[test]
    fn initial_states() {
        let s = initial_silting(&ctx(3));
        assert_eq!(s.g, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert!(is_identity(&s.pairing()));
        assert_eq!(initial_silting(&ctx(1)).g, vec![vec![1]]);
    }

    #[test]
    fn mutations_in_a3() {
        let c = ctx(3);
        let s = initial_silting(&c);
        let m = silting_mutate(&c, &s, 0, Direction::Forward).unwrap();
        assert_eq!(m.g[0], vec![-1, 0, 0]);
        assert_eq!(m.heart.c_matrix(), vec![vec![-1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let m = silting_mutate(&c, &s, 1, Direction::Forward).unwrap();
        assert_eq!(m.g[1], vec![1, -1, 0]);
        assert_eq!(m.heart.c_matrix(), vec![vec![1, 1, 0], vec![0, -1, 0], vec![0, 0, 1]]);
        for k in 0..3 {
            let m = silting_mutate(&c, &s, k, Direction::Forward).unwrap();
            let back = silting_mutate(&c, &m, k, Direction::Backward).unwrap();
            assert_eq!(back.g, s.g);
            assert_eq!(back.heart.key, s.heart.key);
        }
    }

    #[test]
    fn seg_depth_one() {
        let c = ctx(3);
        let g = seg_explore(&c, 1, Explore::Forward).unwrap();
        assert_eq!(g.states.len(), 4);
        assert_eq!(g.edges.len(), 3);
        assert_eq!(seg_explore(&c, 0, Explore::Both).unwrap().states.len(), 1);
    }

    #[test]
    fn partial_objects() {
        let c = ctx(3);
        let s = initial_silting(&c);
        let p = partial_silting(&s, &[1]).unwrap();
        assert_eq!(p.columns, vec![vec![1, 0, 0], vec![0, 0, 1]]);
        let y = silting_mutate(&c, &s, 1, Direction::Forward).unwrap();
        assert_eq!(partial_silting(&y, &[1]), Err(Error::HeartNotLifted));
        let m = partial_mutate(&c, &p, 0, Direction::Forward, 4).unwrap();
        assert_eq!(m.columns, vec![vec![-1, 0, 0], vec![0, 0, 1]]);
        let m = partial_mutate(&c, &p, 2, Direction::Forward, 4).unwrap();
        assert_eq!(m.columns, vec![vec![1, 0, 0], vec![1, 0, -1]]);
        let back = partial_mutate(&c, &m, 2, Direction::Backward, 4).unwrap();
        assert_eq!(back.columns, p.columns);
    }
}

//! Hearts, simple tilts, exchange graphs and their quotients.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use rayon::prelude::*;

use crate::cy3::{class_in_subcategory, CyObject, Engine};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::qp::{ext1_matrix, mutate, Qp, VertexSubset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn opposite(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Explore {
    Forward,
    Both,
}

/// A finite heart: its simples indexed by the vertices of `qp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Heart {
    pub simples: Vec<CyObject>,
    pub qp: Qp,
    pub key: String,
}

/// Identity of a heart whose simples are all shifted modules.
pub fn representable_key(simples: &[CyObject]) -> Option<String> {
    let mut parts: Vec<(&Vec<i64>, i64)> = Vec::new();
    for s in simples {
        match s {
            CyObject::Shifted { dim, shift } => parts.push((dim, *shift)),
            CyObject::Opaque { .. } => return None,
        }
    }
    parts.sort();
    Some(
        parts
            .iter()
            .map(|(d, s)| CyObject::shifted((*d).clone(), *s).label())
            .collect::<Vec<_>>()
            .join(" "),
    )
}

impl Heart {
    pub fn n(&self) -> usize {
        self.simples.len()
    }

    pub fn is_representable(&self) -> bool {
        self.simples.iter().all(|s| !s.is_opaque())
    }

    /// Columns are the K-classes of the simples.
    pub fn c_matrix(&self) -> Vec<Vec<i64>> {
        self.simples.iter().map(CyObject::k_class).collect()
    }

    /// Positions of the simples supported inside `sub`.
    pub fn v_simples(&self, sub: &[usize]) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| match &self.simples[i] {
                CyObject::Shifted { dim, .. } => class_in_subcategory(dim, sub),
                CyObject::Opaque { .. } => false,
            })
            .collect()
    }

    fn with_simples(simples: Vec<CyObject>, qp: Qp, fallback_key: String) -> Heart {
        let key = representable_key(&simples).unwrap_or(fallback_key);
        Heart { simples, qp, key }
    }
}

/// Engine plus the quiver whose standard heart is the root.
#[derive(Debug, Clone)]
pub struct Context {
    pub engine: Arc<Engine>,
    pub qp: Qp,
}

impl Context {
    pub fn new(qp: &Qp) -> Result<Self> {
        Ok(Context {
            engine: Arc::new(Engine::new(qp)?),
            qp: qp.clone(),
        })
    }

    pub fn standard_heart(&self) -> Heart {
        let n = self.qp.n();
        let simples = (0..n).map(|i| CyObject::simple(n, i, 0)).collect::<Vec<_>>();
        let key = representable_key(&simples).unwrap_or_default();
        Heart {
            simples,
            qp: self.qp.clone(),
            key,
        }
    }

    pub fn tilt(&self, h: &Heart, k: usize, dir: Direction) -> Result<Heart> {
        match dir {
            Direction::Forward => self.forward_tilt(h, k),
            Direction::Backward => self.backward_tilt(h, k),
        }
    }

    pub fn forward_tilt(&self, h: &Heart, k: usize) -> Result<Heart> {
        if k >= h.n() {
            return Err(Error::IndexOutOfRange(k));
        }
        if h.simples[k].is_opaque() {
            return Err(Error::OpaqueSource(k));
        }
        self.tilt_inner(h, k, Direction::Forward)
    }

    pub fn backward_tilt(&self, h: &Heart, k: usize) -> Result<Heart> {
        if k >= h.n() {
            return Err(Error::IndexOutOfRange(k));
        }
        if h.simples[k].is_opaque() {
            return Err(Error::OpaqueSource(k));
        }
        self.tilt_inner(h, k, Direction::Backward)
    }

    /// Tilt that also accepts an opaque source, tracking classes only.
    pub fn tilt_lenient(&self, h: &Heart, k: usize, dir: Direction) -> Result<Heart> {
        if k >= h.n() {
            return Err(Error::IndexOutOfRange(k));
        }
        self.tilt_inner(h, k, dir)
    }

    fn tilt_inner(&self, h: &Heart, k: usize, dir: Direction) -> Result<Heart> {
        let s = &h.simples[k];
        let vk = h.qp.vertices()[k].clone();
        let sign = if dir == Direction::Forward { 1 } else { -1 };
        let tag = if dir == Direction::Forward { "+" } else { "-" };
        let mut simples = Vec::with_capacity(h.n());
        for (j, sj) in h.simples.iter().enumerate() {
            if j == k {
                simples.push(match s {
                    CyObject::Shifted { .. } => s.shift_by(sign)?,
                    CyObject::Opaque { provenance, class } => CyObject::Opaque {
                        provenance: format!("{provenance}[{sign}]"),
                        class: class.iter().map(|x| -x).collect(),
                    },
                });
                continue;
            }
            let both = !s.is_opaque() && !sj.is_opaque();
            let next = if both {
                match dir {
                    Direction::Forward => self.engine.cone_forward(s, sj)?,
                    Direction::Backward => self.engine.cone_backward(s, sj)?,
                }
            } else {
                // Extension multiplicity from the arrows of the heart quiver.
                let vj = &h.qp.vertices()[j];
                let e = match dir {
                    Direction::Forward => h.qp.quiver.count(vj, &vk),
                    Direction::Backward => h.qp.quiver.count(&vk, vj),
                } as i64;
                if e == 0 {
                    sj.clone()
                } else {
                    let cs = s.k_class();
                    CyObject::Opaque {
                        provenance: format!("{tag}{k}({},{})", s.label(), sj.label()),
                        class: sj.k_class().iter().zip(&cs).map(|(x, y)| x + e * y).collect(),
                    }
                }
            };
            simples.push(next);
        }
        let qp = mutate(&h.qp, &vk)?;
        Ok(Heart::with_simples(simples, qp, format!("{}|{tag}{k}", h.key)))
    }

    /// Tilts at a set of pairwise Ext-orthogonal simples.
    pub fn composite_tilt(&self, h: &Heart, set: &[usize], dir: Direction) -> Result<Heart> {
        for &k in set {
            if k >= h.n() {
                return Err(Error::IndexOutOfRange(k));
            }
            if h.simples[k].is_opaque() {
                return Err(Error::OpaqueSource(k));
            }
        }
        for (a, &i) in set.iter().enumerate() {
            for &j in &set[a + 1..] {
                let x = self.engine.ext1_cy3(&h.simples[i], &h.simples[j])?.total;
                let y = self.engine.ext1_cy3(&h.simples[j], &h.simples[i])?.total;
                if i == j || x != 0 || y != 0 {
                    return Err(Error::NotIndependentSet);
                }
            }
        }
        let mut cur = h.clone();
        for &k in set {
            cur = self.tilt(&cur, k, dir)?;
        }
        Ok(cur)
    }

    /// `[Ext^1(S_i, S_j)]` on the simples of a representable heart.
    pub fn ext_matrix(&self, h: &Heart) -> Result<Vec<Vec<i64>>> {
        let n = h.n();
        let mut m = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m[i][j] = self.engine.ext1_cy3(&h.simples[i], &h.simples[j])?.total as i64;
                }
            }
        }
        Ok(m)
    }

    /// Checks that the Ext quiver of the simples is the arrow matrix of `qp`.
    pub fn quiver_consistent(&self, h: &Heart) -> Result<bool> {
        Ok(self.ext_matrix(h)? == ext1_matrix(&h.qp))
    }
}

/// `true` iff exactly `|I|` simples lie in the subcategory of `I` and their
/// classes restricted to `I` form a basis of `Z^I`.
pub fn is_compatible(h: &Heart, sub: &[usize]) -> Result<bool> {
    if !h.is_representable() {
        return Err(Error::OpaqueHeart);
    }
    let v = h.v_simples(sub);
    if v.len() != sub.len() {
        return Ok(false);
    }
    if sub.is_empty() {
        return Ok(true);
    }
    let rows: Vec<Vec<i64>> = v
        .iter()
        .map(|&i| {
            let c = h.simples[i].k_class();
            sub.iter().map(|&j| c[j]).collect()
        })
        .collect();
    Ok(crate::linalg::is_unimodular(&Matrix::from_i64_rows(&rows)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TiltEdge {
    pub src: usize,
    pub tgt: usize,
    /// Position of the tilted simple in the source heart.
    pub index: usize,
    pub label: CyObject,
    pub representable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParentStep {
    pub parent: usize,
    pub index: usize,
    pub dir: Direction,
}

#[derive(Debug, Clone)]
pub struct ExchangeGraph {
    pub hearts: Vec<Heart>,
    pub edges: Vec<TiltEdge>,
    pub depth: Vec<usize>,
    pub parent: Vec<Option<ParentStep>>,
    /// Expanded in every requested direction and representable.
    pub interior: Vec<bool>,
    pub direction: Explore,
    index: HashMap<String, usize>,
}

impl ExchangeGraph {
    pub fn find(&self, key: &str) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.hearts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hearts.is_empty()
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = &TiltEdge> {
        self.edges.iter().filter(move |e| e.src == v)
    }

    pub fn in_edges(&self, v: usize) -> impl Iterator<Item = &TiltEdge> {
        self.edges.iter().filter(move |e| e.tgt == v)
    }

    pub fn frontier(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| !self.interior[v]).collect()
    }

    /// Tilt steps from the root to `v` along parent pointers.
    pub fn path_to(&self, v: usize) -> Vec<(usize, Direction)> {
        let mut steps = Vec::new();
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            steps.push((p.index, p.dir));
            cur = p.parent;
        }
        steps.reverse();
        steps
    }

    /// Full subgraph on the chosen vertices, in the original order.
    pub fn induced(&self, keep: &[usize]) -> ExchangeGraph {
        let set: BTreeSet<usize> = keep.iter().copied().collect();
        let map: HashMap<usize, usize> = set.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let hearts: Vec<Heart> = set.iter().map(|&v| self.hearts[v].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| map.contains_key(&e.src) && map.contains_key(&e.tgt))
            .map(|e| TiltEdge {
                src: map[&e.src],
                tgt: map[&e.tgt],
                ..e.clone()
            })
            .collect();
        let parent = set
            .iter()
            .map(|&v| self.parent[v].and_then(|p| map.get(&p.parent).map(|&q| ParentStep { parent: q, ..p })))
            .collect();
        let index = hearts
            .iter()
            .enumerate()
            .filter(|(_, h)| h.is_representable())
            .map(|(i, h)| (h.key.clone(), i))
            .collect();
        ExchangeGraph {
            hearts,
            edges,
            depth: set.iter().map(|&v| self.depth[v]).collect(),
            parent,
            interior: set.iter().map(|&v| self.interior[v]).collect(),
            direction: self.direction,
            index,
        }
    }

    pub fn compatible_vertices(&self, sub: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&v| matches!(is_compatible(&self.hearts[v], sub), Ok(true)))
            .collect()
    }
}

/// Breadth-first exploration from the standard heart.
pub fn explore(ctx: &Context, depth: usize, direction: Explore) -> ExchangeGraph {
    let root = ctx.standard_heart();
    let mut g = ExchangeGraph {
        index: HashMap::from([(root.key.clone(), 0)]),
        hearts: vec![root],
        edges: Vec::new(),
        depth: vec![0],
        parent: vec![None],
        interior: vec![false],
        direction,
    };
    let dirs: Vec<Direction> = match direction {
        Explore::Forward => vec![Direction::Forward],
        Explore::Both => vec![Direction::Forward, Direction::Backward],
    };
    let mut edge_set: HashSet<(usize, usize, usize)> = HashSet::new();
    let mut layer: Vec<usize> = vec![0];
    for d in 0..depth {
        let tasks: Vec<(usize, usize, Direction)> = layer
            .iter()
            .filter(|&&v| g.hearts[v].is_representable())
            .flat_map(|&v| {
                let n = g.hearts[v].n();
                let dirs = dirs.clone();
                (0..n).flat_map(move |k| dirs.clone().into_iter().map(move |dir| (v, k, dir)))
            })
            .collect();
        let results: Vec<Option<Heart>> = tasks
            .par_iter()
            .map(|&(v, k, dir)| ctx.tilt(&g.hearts[v], k, dir).ok())
            .collect();
        for &v in &layer {
            g.interior[v] = g.hearts[v].is_representable();
        }
        // New hearts of the next layer, ordered by key.
        let mut fresh: BTreeMap<String, (Heart, ParentStep)> = BTreeMap::new();
        for (&(v, k, dir), r) in tasks.iter().zip(&results) {
            let Some(h) = r else {
                g.interior[v] = false;
                continue;
            };
            if !g.index.contains_key(&h.key) && !fresh.contains_key(&h.key) {
                fresh.insert(
                    h.key.clone(),
                    (
                        h.clone(),
                        ParentStep {
                            parent: v,
                            index: k,
                            dir,
                        },
                    ),
                );
            }
        }
        let mut next_layer = Vec::new();
        for (key, (h, step)) in fresh {
            let id = g.hearts.len();
            if h.is_representable() {
                g.index.insert(key, id);
            }
            g.hearts.push(h);
            g.depth.push(d + 1);
            g.parent.push(Some(step));
            g.interior.push(false);
            next_layer.push(id);
        }
        // Opaque hearts are looked up by their provenance key only within
        // this merge, so identical provenance collapses but nothing else.
        let opaque_ids: HashMap<String, usize> = next_layer
            .iter()
            .filter(|&&v| !g.hearts[v].is_representable())
            .map(|&v| (g.hearts[v].key.clone(), v))
            .collect();
        for (&(v, k, dir), r) in tasks.iter().zip(&results) {
            let Some(h) = r else { continue };
            let t = match g.index.get(&h.key).or_else(|| opaque_ids.get(&h.key)) {
                Some(&t) => t,
                None => continue,
            };
            // The stored heart may order its simples differently from the
            // freshly computed one, so locate the label by value.
            let (src, tgt, label) = match dir {
                Direction::Forward => (v, t, g.hearts[v].simples[k].clone()),
                Direction::Backward => (t, v, h.simples[k].clone()),
            };
            let Some(index) = g.hearts[src].simples.iter().position(|s| *s == label) else {
                continue;
            };
            if edge_set.insert((src, tgt, index)) {
                let representable = g.hearts[src].is_representable() && g.hearts[tgt].is_representable();
                g.edges.push(TiltEdge {
                    src,
                    tgt,
                    index,
                    label,
                    representable,
                });
            }
        }
        layer = next_layer;
    }
    g
}

/// Per-vertex degrees on interior vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityReport {
    /// `(vertex, out, in)` for interior vertices.
    pub degrees: Vec<(usize, usize, usize)>,
    pub frontier: Vec<usize>,
}

impl RegularityReport {
    pub fn is_regular(&self, m: usize) -> bool {
        self.degrees.iter().all(|&(_, o, i)| o == m && i == m)
    }
}

pub fn regularity_report(g: &ExchangeGraph) -> RegularityReport {
    let mut out = vec![0usize; g.len()];
    let mut inn = vec![0usize; g.len()];
    for e in &g.edges {
        out[e.src] += 1;
        inn[e.tgt] += 1;
    }
    RegularityReport {
        degrees: (0..g.len())
            .filter(|&v| g.interior[v])
            .map(|v| (v, out[v], inn[v]))
            .collect(),
        frontier: g.frontier(),
    }
}

/// Simples of a heart seen in the quotient: classes projected to `I^c`.
pub type QuotientSimple = (Vec<i64>, i64);

pub fn project(dim: &[i64], comp: &[usize]) -> Vec<i64> {
    comp.iter().map(|&i| dim[i]).collect()
}

pub fn quotient_label(obj: &CyObject, comp: &[usize]) -> Option<QuotientSimple> {
    match obj {
        CyObject::Shifted { dim, shift } => Some((project(dim, comp), *shift)),
        CyObject::Opaque { .. } => None,
    }
}

pub fn quotient_simple_label(q: &QuotientSimple) -> String {
    CyObject::shifted(q.0.clone(), q.1).label()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientClass {
    pub members: Vec<usize>,
    /// Sorted quotient simples of the first member.
    pub simples: Vec<QuotientSimple>,
    /// All members have the same quotient simples.
    pub consistent: bool,
    /// Every quotient simple has an explored lift of its forward and backward
    /// tilt at some member.
    pub fully_expanded: bool,
}

impl QuotientClass {
    pub fn key(&self) -> String {
        self.simples
            .iter()
            .map(quotient_simple_label)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientEdge {
    pub src: usize,
    pub tgt: usize,
    pub label: QuotientSimple,
    /// One exchange-graph edge realizing this quotient edge.
    pub witness: usize,
}

#[derive(Debug, Clone)]
pub struct QuotientGraph {
    pub sub: Vec<usize>,
    pub comp: Vec<usize>,
    pub classes: Vec<QuotientClass>,
    pub edges: Vec<QuotientEdge>,
    pub class_of: BTreeMap<usize, usize>,
}

impl QuotientGraph {
    pub fn out_degree(&self, c: usize) -> usize {
        self.edges.iter().filter(|e| e.src == c).count()
    }

    pub fn in_degree(&self, c: usize) -> usize {
        self.edges.iter().filter(|e| e.tgt == c).count()
    }

    pub fn class_containing(&self, v: usize) -> Option<usize> {
        self.class_of.get(&v).copied()
    }

    pub fn class_by_key(&self, key: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.key() == key)
    }

    /// Subgraph on the chosen classes. A class stays fully expanded only if
    /// none of its edges were dropped.
    pub fn restrict(&self, keep: &[usize]) -> QuotientGraph {
        let set: BTreeSet<usize> = keep.iter().copied().collect();
        let map: HashMap<usize, usize> = set.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let classes = set
            .iter()
            .map(|&c| {
                let mut cl = self.classes[c].clone();
                cl.fully_expanded &= self
                    .edges
                    .iter()
                    .filter(|e| e.src == c || e.tgt == c)
                    .all(|e| set.contains(&e.src) && set.contains(&e.tgt));
                cl
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| set.contains(&e.src) && set.contains(&e.tgt))
            .map(|e| QuotientEdge {
                src: map[&e.src],
                tgt: map[&e.tgt],
                ..e.clone()
            })
            .collect();
        let class_of = self
            .class_of
            .iter()
            .filter_map(|(v, c)| map.get(c).map(|&d| (*v, d)))
            .collect();
        QuotientGraph {
            sub: self.sub.clone(),
            comp: self.comp.clone(),
            classes,
            edges,
            class_of,
        }
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut c = x;
    while parent[c] != r {
        let n = parent[c];
        parent[c] = r;
        c = n;
    }
    r
}

/// Sorted quotient simples of a heart.
pub fn quotient_simples(h: &Heart, sub: &[usize], comp: &[usize]) -> Vec<QuotientSimple> {
    let v = h.v_simples(sub);
    let mut out: Vec<QuotientSimple> = (0..h.n())
        .filter(|i| !v.contains(i))
        .filter_map(|i| quotient_label(&h.simples[i], comp))
        .collect();
    out.sort();
    out
}

/// Whether `m` has a simple with quotient label `s` admitting no extension
/// with the `V`-simples in the tilting direction, and the tilt at it was
/// explored to a compatible heart.
fn liftable(
    eg: &ExchangeGraph,
    m: usize,
    sub: &[usize],
    comp: &[usize],
    s: &QuotientSimple,
    dir: Direction,
    compat: &BTreeSet<usize>,
) -> bool {
    if !eg.interior[m] {
        return false;
    }
    let h = &eg.hearts[m];
    let vs = h.v_simples(sub);
    let names = h.qp.vertices();
    (0..h.n()).filter(|k| !vs.contains(k)).any(|k| {
        if quotient_label(&h.simples[k], comp).as_ref() != Some(s) {
            return false;
        }
        let free = vs.iter().all(|&i| match dir {
            Direction::Forward => h.qp.quiver.count(&names[i], &names[k]) == 0,
            Direction::Backward => h.qp.quiver.count(&names[k], &names[i]) == 0,
        });
        free && match dir {
            Direction::Forward => eg.out_edges(m).any(|e| e.index == k && compat.contains(&e.tgt)),
            Direction::Backward => eg.in_edges(m).any(|e| {
                compat.contains(&e.src)
                    && eg.hearts[e.src].simples[e.index].shift_by(1).ok().as_ref() == Some(&h.simples[k])
            }),
        }
    })
}

/// Contracts the edges labelled by objects of the subcategory of `I` in the
/// compatible part of `eg`.
pub fn quotient_graph(eg: &ExchangeGraph, sub: &[usize]) -> QuotientGraph {
    let n = eg.hearts.first().map_or(0, Heart::n);
    let comp: Vec<usize> = (0..n).filter(|i| !sub.contains(i)).collect();
    let compat: BTreeSet<usize> = eg.compatible_vertices(sub).into_iter().collect();
    let mut uf: Vec<usize> = (0..eg.len()).collect();
    let in_v = |e: &TiltEdge| matches!(&e.label, CyObject::Shifted { dim, .. } if class_in_subcategory(dim, sub));
    for e in &eg.edges {
        if compat.contains(&e.src) && compat.contains(&e.tgt) && in_v(e) {
            let (a, b) = (find(&mut uf, e.src), find(&mut uf, e.tgt));
            if a != b {
                uf[a.max(b)] = a.min(b);
            }
        }
    }
    // Hearts with the same quotient are one vertex even when the contracted
    // edges joining them pass through unexplored or opaque hearts.
    let mut by_key: BTreeMap<Vec<QuotientSimple>, usize> = BTreeMap::new();
    for &v in &compat {
        let q = quotient_simples(&eg.hearts[v], sub, &comp);
        if let Some(&w) = by_key.get(&q) {
            let (a, b) = (find(&mut uf, v), find(&mut uf, w));
            if a != b {
                uf[a.max(b)] = a.min(b);
            }
        } else {
            by_key.insert(q, v);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &v in &compat {
        groups.entry(find(&mut uf, v)).or_default().push(v);
    }
    let mut class_of = BTreeMap::new();
    let mut classes = Vec::new();
    for (_, members) in groups {
        let c = classes.len();
        for &m in &members {
            class_of.insert(m, c);
        }
        let simples = quotient_simples(&eg.hearts[members[0]], sub, &comp);
        let consistent = members
            .iter()
            .all(|&m| quotient_simples(&eg.hearts[m], sub, &comp) == simples);
        let fully_expanded = [Direction::Forward, Direction::Backward].iter().all(|&dir| {
            simples
                .iter()
                .all(|s| members.iter().any(|&m| liftable(eg, m, sub, &comp, s, dir, &compat)))
        });
        classes.push(QuotientClass {
            members,
            simples,
            consistent,
            fully_expanded,
        });
    }
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for (i, e) in eg.edges.iter().enumerate() {
        if !(compat.contains(&e.src) && compat.contains(&e.tgt)) || in_v(e) {
            continue;
        }
        let Some(label) = quotient_label(&e.label, &comp) else {
            continue;
        };
        let (s, t) = (class_of[&e.src], class_of[&e.tgt]);
        if seen.insert((s, t, label.clone())) {
            edges.push(QuotientEdge {
                src: s,
                tgt: t,
                label,
                witness: i,
            });
        }
    }
    QuotientGraph {
        sub: sub.to_vec(),
        comp,
        classes,
        edges,
        class_of,
    }
}

/// Result of [`lift_tilt_search`].
#[derive(Debug, Clone)]
pub struct Lift {
    /// Tilts at subcategory simples, in order.
    pub steps: Vec<(usize, Direction)>,
    pub heart: Heart,
}

/// Forward tilts at simples of the subcategory until no arrow of the heart
/// quiver runs from a subcategory simple into position `k`.
pub fn lift_tilt_search(ctx: &Context, h: &Heart, k: usize, sub: &[usize], bound: usize) -> Result<Lift> {
    let done = |x: &Heart| {
        let names = x.qp.vertices();
        x.v_simples(sub)
            .iter()
            .all(|&i| x.qp.quiver.count(&names[i], &names[k]) == 0)
    };
    v_tilt_search(ctx, h, k, sub, &[Direction::Forward], bound, done)
}

/// Tilts in either direction at subcategory simples until the tilt at `k`
/// in direction `dir` has no extension with them: no arrow into `k` from a
/// subcategory simple when forward, none out of `k` when backward.
pub fn lift_tilt_search_dir(
    ctx: &Context,
    h: &Heart,
    k: usize,
    sub: &[usize],
    dir: Direction,
    bound: usize,
) -> Result<Lift> {
    let done = |x: &Heart| {
        let names = x.qp.vertices();
        x.v_simples(sub).iter().all(|&i| match dir {
            Direction::Forward => x.qp.quiver.count(&names[i], &names[k]) == 0,
            Direction::Backward => x.qp.quiver.count(&names[k], &names[i]) == 0,
        })
    };
    v_tilt_search(ctx, h, k, sub, &[Direction::Forward, Direction::Backward], bound, done)
}

/// Breadth-first search over representable tilts at subcategory simples
/// other than `skip`.
pub fn v_tilt_search(
    ctx: &Context,
    h: &Heart,
    skip: usize,
    sub: &[usize],
    dirs: &[Direction],
    bound: usize,
    done: impl Fn(&Heart) -> bool,
) -> Result<Lift> {
    if skip >= h.n() {
        return Err(Error::IndexOutOfRange(skip));
    }
    let mut seen: HashSet<String> = HashSet::from([h.key.clone()]);
    let mut queue: VecDeque<(Heart, Vec<(usize, Direction)>)> = VecDeque::from([(h.clone(), Vec::new())]);
    while let Some((cur, steps)) = queue.pop_front() {
        if done(&cur) {
            return Ok(Lift { steps, heart: cur });
        }
        if steps.len() >= bound {
            continue;
        }
        for i in cur.v_simples(sub) {
            if i == skip {
                continue;
            }
            for &dir in dirs {
                let Ok(next) = ctx.tilt(&cur, i, dir) else { continue };
                if !next.is_representable() || !seen.insert(next.key.clone()) {
                    continue;
                }
                let mut s = steps.clone();
                s.push((i, dir));
                queue.push_back((next, s));
            }
        }
    }
    Err(Error::BoundExceeded(bound))
}

/// Subset positions for a vertex subset of the base quiver.
pub fn subset_indices(qp: &Qp, sub: &VertexSubset) -> Result<Vec<usize>> {
    sub.check(qp)?;
    Ok(sub.indices(qp))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: usize) -> Context {
        Context::new(&Qp::linear_a(n)).unwrap()
    }

    fn obj(d: &[i64], s: i64) -> CyObject {
        CyObject::shifted(d.to_vec(), s)
    }

    #[test]
    fn standard_hearts() {
        let c = ctx(3);
        let h = c.standard_heart();
        assert_eq!(h.key, "(0,0,1)_1 (0,1,0)_1 (1,0,0)_1");
        assert_eq!(h.c_matrix(), vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(ctx(1).standard_heart().n(), 1);
        assert_eq!(ctx(2).standard_heart().qp, Qp::linear_a(2));
    }

    #[test]
    fn tilts_in_a3() {
        let c = ctx(3);
        let h = c.standard_heart();
        // positions: 0 = Z, 1 = Y, 2 = X
        let t = c.forward_tilt(&h, 0).unwrap();
        assert_eq!(
            t.simples,
            vec![obj(&[1, 0, 0], 1), obj(&[0, 1, 0], 0), obj(&[0, 0, 1], 0)]
        );
        let t = c.forward_tilt(&h, 1).unwrap();
        assert_eq!(
            t.simples,
            vec![obj(&[1, 1, 0], 0), obj(&[0, 1, 0], 1), obj(&[0, 0, 1], 0)]
        );
        let x4 = c.forward_tilt(&h, 2).unwrap();
        assert_eq!(
            x4.simples,
            vec![obj(&[1, 0, 0], 0), obj(&[0, 1, 1], 0), obj(&[0, 0, 1], 1)]
        );
        let x5 = c.forward_tilt(&x4, 1).unwrap();
        let mut got = x5.simples.clone();
        got.sort();
        let mut want = vec![obj(&[1, 1, 1], 0), obj(&[0, 1, 0], 0), obj(&[0, 1, 1], 1)];
        want.sort();
        assert_eq!(got, want);
        assert!(c.quiver_consistent(&x5).unwrap());
    }

    #[test]
    fn backward_tilt_inverts_forward() {
        let c = ctx(3);
        let h = c.standard_heart();
        for k in 0..3 {
            let t = c.forward_tilt(&h, k).unwrap();
            assert_eq!(c.backward_tilt(&t, k).unwrap().key, h.key);
        }
        let x1 = c.forward_tilt(&h, 0).unwrap();
        assert_eq!(c.backward_tilt(&x1, 0).unwrap().key, h.key);
    }

    #[test]
    fn backward_tilt_can_be_opaque() {
        let c = ctx(2);
        let h = c.forward_tilt(&c.standard_heart(), 0).unwrap();
        assert_eq!(h.simples[0], obj(&[1, 0], 1));
        let b = c.backward_tilt(&h, 1).unwrap();
        assert!(!b.is_representable());
        assert!(matches!(c.forward_tilt(&b, 0), Err(Error::OpaqueSource(0))));
    }

    #[test]
    fn composite_tilts_commute() {
        let c = ctx(3);
        let h = c.standard_heart();
        let a = c.composite_tilt(&h, &[0, 2], Direction::Forward).unwrap();
        let b = c.composite_tilt(&h, &[2, 0], Direction::Forward).unwrap();
        assert_eq!(a.key, b.key);
        assert_eq!(
            c.composite_tilt(&h, &[1], Direction::Forward).unwrap().key,
            c.forward_tilt(&h, 1).unwrap().key
        );
        assert_eq!(c.composite_tilt(&h, &[], Direction::Forward).unwrap().key, h.key);
        assert_eq!(
            c.composite_tilt(&h, &[0, 1], Direction::Forward),
            Err(Error::NotIndependentSet)
        );
    }

    #[test]
    fn exploration_basics() {
        let c = ctx(3);
        let g = explore(&c, 1, Explore::Forward);
        assert_eq!(g.len(), 4);
        assert_eq!(g.edges.len(), 3);
        let g0 = explore(&c, 0, Explore::Both);
        assert_eq!(g0.len(), 1);
        assert!(regularity_report(&g0).degrees.is_empty());
        let g = explore(&ctx(1), 2, Explore::Both);
        assert_eq!(g.len(), 5);
        assert_eq!(g.edges.len(), 4);
    }

    #[test]
    fn compatibility() {
        let c = ctx(3);
        let h = c.standard_heart();
        assert!(is_compatible(&h, &[1]).unwrap());
        assert!(is_compatible(&h, &[]).unwrap());
        let x4 = c.forward_tilt(&h, 2).unwrap();
        let x3 = c.forward_tilt(&x4, 0).unwrap();
        assert!(!is_compatible(&x3, &[1]).unwrap());
    }

    #[test]
    fn lift_search() {
        let c = ctx(3);
        let h = c.standard_heart();
        assert!(lift_tilt_search(&c, &h, 1, &[2], 4).unwrap().steps.is_empty());
        let l = lift_tilt_search(&c, &h, 2, &[1], 4).unwrap();
        assert_eq!(l.steps, vec![(1, Direction::Forward)]);
        assert!(l.heart.simples.contains(&obj(&[1, 1, 0], 0)));
        assert_eq!(
            lift_tilt_search(&c, &h, 2, &[1], 0).unwrap_err(),
            Error::BoundExceeded(0)
        );
    }
}

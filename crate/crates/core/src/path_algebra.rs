//! Graded dimensions of Jacobian algebras and the quiver of `eJe`.

use std::collections::{BTreeMap, HashMap};

use num_traits::One;

use crate::error::{Error, Result};
use crate::linalg::{Rational, SparseEchelon};
use crate::qp::{Arrow, PathPoly, Potential, Qp, Quiver, VertexSubset};

pub const DEFAULT_MAX_DEGREE: usize = 64;

/// Reads `QPT_MAX_DEGREE`, falling back to the default.
pub fn max_degree_from_env() -> usize {
    std::env::var("QPT_MAX_DEGREE")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&d| d > 0)
        .unwrap_or(DEFAULT_MAX_DEGREE)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSet {
    /// `(alpha, d_alpha W)` for every arrow occurring in `W`.
    pub relations: Vec<(String, PathPoly)>,
    pub homogeneous: bool,
}

pub fn relations(qp: &Qp) -> RelationSet {
    let mut rels = Vec::new();
    let mut homogeneous = true;
    for a in &qp.quiver.arrows {
        let d = qp.potential.cyclic_derivative(&a.id);
        if d.is_empty() {
            continue;
        }
        let mut lens = d.keys().map(Vec::len);
        let first = lens.next().unwrap_or(0);
        if lens.any(|l| l != first) {
            homogeneous = false;
        }
        rels.push((a.id.clone(), d));
    }
    RelationSet {
        relations: rels,
        homogeneous,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Finiteness {
    Finite(usize),
    InfiniteDetected,
    /// Degree bound reached with nonzero dimension.
    Unknown(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedDims {
    /// Dimensions by path length; trailing zero degrees are not stored.
    pub dims: Vec<usize>,
    pub verdict: Finiteness,
}

impl GradedDims {
    pub fn dim(&self, d: usize) -> usize {
        self.dims.get(d).copied().unwrap_or(0)
    }
}

/// All composable paths `i -> j` of length at most `max_len`, shortest first
/// and lexicographic within a length. The trivial path is the empty list.
pub fn enumerate_paths(q: &Quiver, i: &str, j: &str, max_len: usize) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut layer: Vec<(Vec<String>, &str)> = vec![(Vec::new(), i)];
    let mut sorted: Vec<&Arrow> = q.arrows.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    for len in 0..=max_len {
        let mut here: Vec<Vec<String>> = layer
            .iter()
            .filter(|(_, end)| *end == j)
            .map(|(p, _)| p.clone())
            .collect();
        here.sort();
        out.extend(here);
        if len == max_len {
            break;
        }
        let mut next = Vec::new();
        for (p, end) in &layer {
            for a in sorted.iter().filter(|a| a.src == *end) {
                let mut np = p.clone();
                np.push(a.id.clone());
                next.push((np, a.tgt.as_str()));
            }
        }
        layer = next;
    }
    out
}

struct Engine {
    n: usize,
    /// arrows sorted by id: (id, src, tgt)
    arrows: Vec<(String, usize, usize)>,
    /// relations as (src, tgt, length, combination over arrow-index paths)
    rels: Vec<(usize, usize, usize, Vec<(Vec<usize>, Rational)>)>,
}

/// Degree slice of the path algebra and of the Jacobian ideal.
struct Slice {
    paths: BTreeMap<(usize, usize), Vec<Vec<usize>>>,
    index: BTreeMap<(usize, usize), HashMap<Vec<usize>, usize>>,
    ideal: BTreeMap<(usize, usize), (SparseEchelon, Vec<Vec<(Vec<usize>, Rational)>>)>,
}

impl Slice {
    fn dim(&self, pair: (usize, usize)) -> usize {
        let total = self.paths.get(&pair).map_or(0, Vec::len);
        let r = self.ideal.get(&pair).map_or(0, |(e, _)| e.rank());
        total - r
    }

    fn total_dim(&self) -> usize {
        self.paths.keys().map(|p| self.dim(*p)).sum()
    }

    fn vector(&self, pair: (usize, usize), combo: &[(Vec<usize>, Rational)]) -> BTreeMap<usize, Rational> {
        let idx = &self.index[&pair];
        let mut v: BTreeMap<usize, Rational> = BTreeMap::new();
        for (p, c) in combo {
            *v.entry(idx[p]).or_default() += c;
        }
        v.retain(|_, c| !num_traits::Zero::is_zero(c));
        v
    }
}

impl Engine {
    fn new(qp: &Qp) -> Self {
        let q = &qp.quiver;
        let vi = |v: &str| q.vertex_index(v).expect("validated quiver");
        let mut arrows: Vec<(String, usize, usize)> = q
            .arrows
            .iter()
            .map(|a| (a.id.clone(), vi(&a.src), vi(&a.tgt)))
            .collect();
        arrows.sort();
        let aidx: HashMap<&str, usize> = arrows.iter().enumerate().map(|(i, a)| (a.0.as_str(), i)).collect();
        let mut rels = Vec::new();
        for (alpha, poly) in relations(qp).relations {
            let a = q.arrow(&alpha).expect("relation arrow exists");
            let combo: Vec<(Vec<usize>, Rational)> = poly
                .iter()
                .map(|(p, c)| (p.iter().map(|x| aidx[x.as_str()]).collect(), c.clone()))
                .collect();
            let len = combo[0].0.len();
            rels.push((vi(&a.tgt), vi(&a.src), len, combo));
        }
        Engine {
            n: q.vertices.len(),
            arrows,
            rels,
        }
    }

    fn degree_zero(&self) -> Slice {
        let mut paths = BTreeMap::new();
        let mut index = BTreeMap::new();
        for v in 0..self.n {
            paths.insert((v, v), vec![Vec::new()]);
            index.insert((v, v), HashMap::from([(Vec::new(), 0)]));
        }
        Slice {
            paths,
            index,
            ideal: BTreeMap::new(),
        }
    }

    fn next(&self, prev: &Slice, d: usize) -> Slice {
        let mut paths: BTreeMap<(usize, usize), Vec<Vec<usize>>> = BTreeMap::new();
        for (&(i, k), ps) in &prev.paths {
            for p in ps {
                for (a, (_, s, t)) in self.arrows.iter().enumerate() {
                    if *s == k {
                        let mut np = p.clone();
                        np.push(a);
                        paths.entry((i, *t)).or_default().push(np);
                    }
                }
            }
        }
        let mut index = BTreeMap::new();
        for (pair, ps) in paths.iter_mut() {
            ps.sort();
            index.insert(*pair, ps.iter().enumerate().map(|(n, p)| (p.clone(), n)).collect());
        }
        let mut slice = Slice {
            paths,
            index,
            ideal: BTreeMap::new(),
        };
        let mut gens: BTreeMap<(usize, usize), Vec<Vec<(Vec<usize>, Rational)>>> = BTreeMap::new();
        for (s, t, len, combo) in &self.rels {
            if *len == d {
                gens.entry((*s, *t)).or_default().push(combo.clone());
            }
        }
        for (&(i, k), (_, basis)) in &prev.ideal {
            for (a, (_, s, t)) in self.arrows.iter().enumerate() {
                if *s == k {
                    for b in basis {
                        let g = b.iter().map(|(p, c)| {
                            let mut np = p.clone();
                            np.push(a);
                            (np, c.clone())
                        });
                        gens.entry((i, *t)).or_default().push(g.collect());
                    }
                }
                if *t == i {
                    for b in basis {
                        let g = b.iter().map(|(p, c)| {
                            let mut np = vec![a];
                            np.extend(p);
                            (np, c.clone())
                        });
                        gens.entry((*s, k)).or_default().push(g.collect());
                    }
                }
            }
        }
        for (pair, gs) in gens {
            let mut ech = SparseEchelon::new();
            let mut kept = Vec::new();
            for g in gs {
                if ech.insert(slice.vector(pair, &g)) {
                    kept.push(g);
                }
            }
            slice.ideal.insert(pair, (ech, kept));
        }
        slice
    }
}

fn check_homogeneous(qp: &Qp) -> Result<()> {
    if !qp.potential.is_zero() && !relations(qp).homogeneous {
        return Err(Error::NonHomogeneousPotential);
    }
    Ok(())
}

/// A cycle of arrows that never occur in `W` survives in `J` in every degree.
fn free_cycle(qp: &Qp) -> bool {
    let q = &qp.quiver;
    let used = qp.potential.arrows();
    let free: Vec<&Arrow> = q.arrows.iter().filter(|a| !used.contains(a.id.as_str())).collect();
    let n = q.vertices.len();
    let idx = |v: &str| q.vertex_index(v).unwrap();
    // reach[i][j]: j reachable from i by a nonempty free path
    let mut reach = vec![vec![false; n]; n];
    for a in &free {
        reach[idx(&a.src)][idx(&a.tgt)] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    (0..n).any(|i| reach[i][i])
}

/// Dimensions of the path algebra itself, by counting walks.
fn path_counts(qp: &Qp, max_degree: usize) -> GradedDims {
    let q = &qp.quiver;
    let n = q.vertices.len();
    let mut walks: Vec<u128> = vec![1; n];
    let mut dims = vec![n];
    for d in 1..=max_degree {
        let mut next = vec![0u128; n];
        for a in &q.arrows {
            let (s, t) = (q.vertex_index(&a.src).unwrap(), q.vertex_index(&a.tgt).unwrap());
            next[t] = next[t].saturating_add(walks[s]);
        }
        walks = next;
        let total: u128 = walks.iter().fold(0u128, |a, b| a.saturating_add(*b));
        if total == 0 {
            let sum = dims.iter().sum();
            return GradedDims {
                dims,
                verdict: Finiteness::Finite(sum),
            };
        }
        dims.push(usize::try_from(total).unwrap_or(usize::MAX));
        if d == max_degree {
            break;
        }
    }
    GradedDims {
        dims,
        verdict: Finiteness::Unknown(max_degree),
    }
}

pub fn jacobian_dims(qp: &Qp, max_degree: usize) -> Result<GradedDims> {
    check_homogeneous(qp)?;
    if qp.potential.is_zero() {
        return Ok(path_counts(qp, max_degree));
    }
    if free_cycle(qp) {
        return Ok(GradedDims {
            dims: Vec::new(),
            verdict: Finiteness::InfiniteDetected,
        });
    }
    let (slices, verdict) = slices(qp, max_degree);
    Ok(GradedDims {
        dims: slices.iter().map(Slice::total_dim).collect(),
        verdict,
    })
}

fn slices(qp: &Qp, max_degree: usize) -> (Vec<Slice>, Finiteness) {
    let eng = Engine::new(qp);
    let mut out = vec![eng.degree_zero()];
    for d in 1..=max_degree {
        let s = eng.next(out.last().unwrap(), d);
        if s.total_dim() == 0 {
            let total = out.iter().map(Slice::total_dim).sum();
            return (out, Finiteness::Finite(total));
        }
        out.push(s);
    }
    (out, Finiteness::Unknown(max_degree))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EjeArrow {
    pub src: String,
    pub tgt: String,
    pub witness: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EjeQuiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<EjeArrow>,
}

impl EjeQuiver {
    pub fn count(&self, i: &str, j: &str) -> usize {
        self.arrows.iter().filter(|a| a.src == i && a.tgt == j).count()
    }

    /// As a QP with zero potential; witnesses go to arrow comments.
    pub fn to_qp(&self) -> Qp {
        let arrows = self
            .arrows
            .iter()
            .map(|a| Arrow {
                id: a.witness.join("."),
                src: a.src.clone(),
                tgt: a.tgt.clone(),
                comment: Some(format!("witness {}", a.witness.join(" "))),
            })
            .collect();
        Qp {
            quiver: Quiver::new(self.vertices.clone(), arrows),
            potential: Potential::zero(),
        }
    }
}

/// Quiver of `eJe` for `e` the idempotent of the complement of `sub`:
/// a basis of `rad/rad^2` in each degree, witnessed by paths of `Q`.
pub fn eje_quiver(qp: &Qp, sub: &VertexSubset, max_degree: usize) -> Result<EjeQuiver> {
    sub.check(qp)?;
    check_homogeneous(qp)?;
    let (slices, verdict) = slices(qp, max_degree);
    if !matches!(verdict, Finiteness::Finite(_)) {
        return Err(Error::JacobianNotFinite(max_degree));
    }
    let eng = Engine::new(qp);
    let keep = sub.complement_indices(qp);
    let in_keep = |v: usize| keep.contains(&v);
    let mut arrows = Vec::new();
    for &i in &keep {
        for &j in &keep {
            for (d, slice) in slices.iter().enumerate().skip(1) {
                let pair = (i, j);
                let Some(paths) = slice.paths.get(&pair) else { continue };
                let mut ech = match slice.ideal.get(&pair) {
                    Some((e, _)) => e.clone(),
                    None => SparseEchelon::new(),
                };
                // Paths through an interior vertex of the complement are
                // products in the radical.
                for (n, p) in paths.iter().enumerate() {
                    let interior = p[..d - 1].iter().any(|a| in_keep(eng.arrows[*a].2));
                    if interior {
                        ech.insert(crate::linalg::unit_vector(n));
                    }
                }
                for (n, p) in paths.iter().enumerate() {
                    if ech.insert(BTreeMap::from([(n, Rational::one())])) {
                        arrows.push(EjeArrow {
                            src: qp.vertices()[i].clone(),
                            tgt: qp.vertices()[j].clone(),
                            witness: p.iter().map(|a| eng.arrows[*a].0.clone()).collect(),
                        });
                    }
                }
            }
        }
    }
    Ok(EjeQuiver {
        vertices: sub.complement(qp),
        arrows,
    })
}

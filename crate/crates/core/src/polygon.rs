//! Triangulated polygons glued along an edge, flips, and their quivers.
//!
//! Two polygons `P_k` and `P_l` glued along `S` are one `(k + l - 2)`-gon with
//! vertices `1..` counterclockwise: `P_k` is `1..=k`, `P_l` is `k, k+1, .., 1`
//! and `S = (1, k)` is a fixed diagonal.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::linalg::rat;
use crate::qp::{Arrow, Potential, Qp, Quiver};

/// A diagonal or edge `(a, b)` with `a < b`.
pub type Chord = (usize, usize);

pub fn chord(a: usize, b: usize) -> Chord {
    (a.min(b), a.max(b))
}

/// Interiors of the two chords meet.
pub fn crosses(x: Chord, y: Chord) -> bool {
    let ((p, q), (r, s)) = (x, y);
    (p < r && r < q && q < s) || (r < p && p < s && s < q)
}

fn is_boundary(n: usize, c: Chord) -> bool {
    c.1 == c.0 + 1 || (c.0 == 1 && c.1 == n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    K,
    L,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolygonPair {
    pub k: usize,
    pub l: usize,
    /// Pairs of boundary edges glued to each other.
    pub identifications: Vec<(Chord, Chord)>,
}

impl PolygonPair {
    pub fn new(k: usize, l: usize) -> Result<Self> {
        if k < 3 || l < 3 {
            return Err(Error::InvalidPolygon(format!("polygon sizes {k}, {l} below 3")));
        }
        Ok(PolygonPair {
            k,
            l,
            identifications: Vec::new(),
        })
    }

    pub fn with_identifications(mut self, ids: Vec<(Chord, Chord)>) -> Result<Self> {
        let n = self.n();
        let mut used = BTreeSet::new();
        for &(a, b) in &ids {
            let (a, b) = (chord(a.0, a.1), chord(b.0, b.1));
            if !is_boundary(n, a) || !is_boundary(n, b) || a == b || !used.insert(a) || !used.insert(b) {
                return Err(Error::InvalidPolygon(format!("bad identification {a:?} ~ {b:?}")));
            }
        }
        self.identifications = ids
            .into_iter()
            .map(|(a, b)| (chord(a.0, a.1), chord(b.0, b.1)))
            .collect();
        Ok(self)
    }

    /// Vertex count of the glued polygon.
    pub fn n(&self) -> usize {
        self.k + self.l - 2
    }

    pub fn shared(&self) -> Chord {
        (1, self.k)
    }

    /// Global label of local vertex `j` (1-based, counterclockwise, with the
    /// shared edge from local `size` to local `1`).
    pub fn global(&self, side: Side, j: usize) -> Result<usize> {
        let size = match side {
            Side::K => self.k,
            Side::L => self.l,
        };
        if j == 0 || j > size {
            return Err(Error::InvalidPolygon(format!("local vertex {j} outside 1..={size}")));
        }
        Ok(match side {
            Side::K => j,
            Side::L if j == 1 => self.k,
            Side::L if j == size => 1,
            Side::L => self.k + j - 1,
        })
    }

    /// Builds a triangulation from chords given in each polygon's own labels.
    /// Both polygons list `S` as the edge `(size, 1)`.
    pub fn triangulation_from_local(&self, k_chords: &[Chord], l_chords: &[Chord]) -> Result<PolygonTriangulation> {
        let mut chords = BTreeSet::new();
        for &(a, b) in k_chords {
            chords.insert(chord(self.global(Side::K, a)?, self.global(Side::K, b)?));
        }
        for &(a, b) in l_chords {
            chords.insert(chord(self.global(Side::L, a)?, self.global(Side::L, b)?));
        }
        let t = PolygonTriangulation { n: self.n(), chords };
        self.check(&t)?;
        Ok(t)
    }

    /// Flip inside the pair; `S` stays fixed.
    pub fn flip(&self, t: &PolygonTriangulation, e: Chord) -> Result<PolygonTriangulation> {
        let e = chord(e.0, e.1);
        if e == self.shared() {
            return Err(Error::InvalidPolygon("the shared edge cannot be flipped".into()));
        }
        let mut full = t.clone();
        full.chords.insert(self.shared());
        let mut out = flip(&full, e)?;
        out.chords.remove(&self.shared());
        Ok(out)
    }

    pub fn side_of(&self, c: Chord) -> Side {
        if c.1 <= self.k {
            Side::K
        } else {
            Side::L
        }
    }

    /// Validates `t` as a triangulation of both polygons, `S` excluded.
    pub fn check(&self, t: &PolygonTriangulation) -> Result<()> {
        if t.n != self.n() {
            return Err(Error::InvalidPolygon(format!("triangulation of a {}-gon", t.n)));
        }
        if t.chords.contains(&self.shared()) {
            return Err(Error::InvalidPolygon("the shared edge is not a chord".into()));
        }
        let mut full = t.clone();
        full.chords.insert(self.shared());
        full.check()
    }

    /// The chord forming a triangle with `S` and the edge following it
    /// counterclockwise; `None` on a triangle.
    pub fn diagonal_d(&self, side: Side) -> Option<Chord> {
        match side {
            Side::K if self.k > 3 => Some((2, self.k)),
            Side::L if self.l > 3 => Some((1, self.k + 1)),
            _ => None,
        }
    }

    /// All triangulations, in lexicographic order of their chord lists.
    pub fn triangulations(&self) -> Vec<PolygonTriangulation> {
        let n = self.n();
        let mut out: Vec<PolygonTriangulation> = triangulate_range(1, self.k)
            .into_iter()
            .flat_map(|a| {
                let mut right: Vec<usize> = (self.k..=n).collect();
                right.push(1);
                sub_triangulations(&right).into_iter().map(move |b| {
                    let mut chords = a.clone();
                    chords.extend(b);
                    PolygonTriangulation { n, chords }
                })
            })
            .collect();
        out.sort_by(|x, y| x.chords.iter().cmp(y.chords.iter()));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolygonTriangulation {
    pub n: usize,
    pub chords: BTreeSet<Chord>,
}

impl PolygonTriangulation {
    pub fn fan(n: usize) -> Self {
        PolygonTriangulation {
            n,
            chords: (3..n).map(|j| (1, j)).collect(),
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidPolygon(format!("{}-gon", self.n)));
        }
        for &c in &self.chords {
            if c.0 == 0 || c.1 > self.n || c.0 >= c.1 || is_boundary(self.n, c) {
                return Err(Error::InvalidPolygon(format!("{c:?} is not a diagonal")));
            }
        }
        for &a in &self.chords {
            if let Some(&b) = self.chords.iter().find(|&&b| crosses(a, b)) {
                return Err(Error::InvalidPolygon(format!("{a:?} crosses {b:?}")));
            }
        }
        if self.chords.len() != self.n - 3 {
            return Err(Error::InvalidPolygon(format!(
                "{} chords, a triangulation has {}",
                self.chords.len(),
                self.n - 3
            )));
        }
        Ok(())
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        let c = chord(a, b);
        is_boundary(self.n, c) || self.chords.contains(&c)
    }

    /// Triangles `(a, b, c)` with `a < b < c`.
    pub fn triangles(&self) -> Vec<(usize, usize, usize)> {
        let n = self.n;
        let mut out = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                if !self.has_edge(a, b) {
                    continue;
                }
                for c in b + 1..=n {
                    if self.has_edge(b, c) && self.has_edge(a, c) {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }
}

/// Chords of `t` crossing `c`, in the order met walking along `c` from its
/// smaller endpoint.
pub fn crossing_edges(t: &PolygonTriangulation, c: Chord) -> Vec<Chord> {
    let (p, q) = chord(c.0, c.1);
    let n = t.n;
    let mut out: Vec<(usize, usize, Chord)> = t
        .chords
        .iter()
        .filter(|&&e| crosses(e, (p, q)))
        .map(|&e| {
            let (inner, outer) = if p < e.0 && e.0 < q { (e.0, e.1) } else { (e.1, e.0) };
            let back = (outer + n - q) % n;
            (inner, n - back, e)
        })
        .collect();
    out.sort();
    out.into_iter().map(|(_, _, e)| e).collect()
}

/// Replaces `e` by the other diagonal of the quadrilateral around it.
pub fn flip(t: &PolygonTriangulation, e: Chord) -> Result<PolygonTriangulation> {
    let e = chord(e.0, e.1);
    if !t.chords.contains(&e) {
        return Err(Error::ChordNotPresent(e.0, e.1));
    }
    let (a, b) = e;
    let apex = |x: &usize| t.has_edge(a, *x) && t.has_edge(*x, b);
    let inside = (a + 1..b).find(apex);
    let outside = (b + 1..=t.n).chain(1..a).find(apex);
    let (Some(x), Some(y)) = (inside, outside) else {
        return Err(Error::InvalidPolygon(format!("{e:?} does not bound two triangles")));
    };
    let mut chords = t.chords.clone();
    chords.remove(&e);
    chords.insert(chord(x, y));
    Ok(PolygonTriangulation { n: t.n, chords })
}

/// Flips performed and the resulting triangulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipSequence {
    pub flips: Vec<Chord>,
    /// Flips before the second polygon's phase.
    pub first_phase: usize,
    pub result: PolygonTriangulation,
}

/// Flips the chords crossing `d_k` in order, then those crossing `d_l`.
pub fn exconvrep_sequence(pp: &PolygonPair, t: &PolygonTriangulation) -> Result<FlipSequence> {
    pp.check(t)?;
    let mut cur = t.clone();
    let mut flips = Vec::new();
    let mut first_phase = 0;
    for side in [Side::K, Side::L] {
        if let Some(d) = pp.diagonal_d(side) {
            for e in crossing_edges(&cur, d) {
                let before = cur.chords.clone();
                cur = pp.flip(&cur, e)?;
                flips.push(e);
                let new: Vec<&Chord> = cur.chords.difference(&before).collect();
                if new.iter().any(|&&c| crosses(c, d)) && !crossing_edges(&cur, d).contains(new[0]) {
                    return Err(Error::InvalidPolygon(format!("flip of {e:?} left a stray crosser")));
                }
            }
            if !cur.chords.contains(&d) {
                return Err(Error::InvalidPolygon(format!("phase did not reach {d:?}")));
            }
        }
        if side == Side::K {
            first_phase = flips.len();
        }
    }
    Ok(FlipSequence {
        flips,
        first_phase,
        result: cur,
    })
}

pub fn chord_vertex(c: Chord) -> String {
    format!("c{}_{}", c.0, c.1)
}

/// Quiver of a triangulated polygon: one vertex per chord named by `name`,
/// an arrow per angle between chords, and the internal triangles as
/// potential. For `a < b < c` the arrows run `(b,c) -> (a,b)`,
/// `(a,c) -> (b,c)` and `(a,b) -> (a,c)`.
pub fn ngon_quiver_named(
    t: &PolygonTriangulation,
    extra: &[Chord],
    name: &dyn Fn(Chord) -> Option<String>,
) -> Result<Qp> {
    let mut vertices: Vec<String> = Vec::new();
    let mut seen = BTreeSet::new();
    let boundary: Vec<Chord> = (1..t.n).map(|a| (a, a + 1)).chain([(1, t.n)]).collect();
    for &c in t.chords.iter().chain(extra).chain(&boundary) {
        if let Some(v) = name(c) {
            if seen.insert(v.clone()) {
                vertices.push(v);
            }
        }
    }
    let mut full = t.clone();
    full.chords.extend(extra.iter().copied());
    let mut arrows = Vec::new();
    let mut potential = Potential::zero();
    let mut ids: BTreeMap<String, usize> = BTreeMap::new();
    for (a, b, c) in full.triangles() {
        let (e1, e2, e3) = ((a, b), (b, c), (a, c));
        let mut cycle = Vec::new();
        for (s, u) in [(e3, e2), (e2, e1), (e1, e3)] {
            if let (Some(x), Some(y)) = (name(s), name(u)) {
                let base = format!("{x}>{y}");
                let count = ids.entry(base.clone()).or_insert(0);
                *count += 1;
                let id = if *count == 1 { base } else { format!("{base}'{count}") };
                arrows.push(Arrow::new(id.clone(), x, y));
                cycle.push(id);
            }
        }
        if cycle.len() == 3 {
            potential.add(&cycle, rat(1));
        }
    }
    Qp::new(Quiver::new(vertices, arrows), potential)
}

/// Quiver of a plain triangulated polygon.
pub fn ngon_quiver(t: &PolygonTriangulation) -> Result<Qp> {
    let chords = t.chords.clone();
    ngon_quiver_named(t, &[], &|c| chords.contains(&c).then(|| chord_vertex(c)))
}

/// Quiver of a triangulated polygon pair: `S` is the vertex `S`, identified
/// boundary edges share one vertex.
pub fn polygon_quiver(pp: &PolygonPair, t: &PolygonTriangulation) -> Result<Qp> {
    pp.check(t)?;
    let s = pp.shared();
    let mut glued: BTreeMap<Chord, String> = BTreeMap::new();
    for &(a, b) in &pp.identifications {
        let v = format!("b{}_{}", a.0, a.1);
        glued.insert(a, v.clone());
        glued.insert(b, v);
    }
    let chords = t.chords.clone();
    ngon_quiver_named(t, &[s], &|c| {
        if c == s {
            Some("S".to_string())
        } else if chords.contains(&c) {
            Some(chord_vertex(c))
        } else {
            glued.get(&c).cloned()
        }
    })
}

/// Vertex of the pair quiver for a chord.
pub fn pair_vertex(pp: &PolygonPair, c: Chord) -> String {
    if chord(c.0, c.1) == pp.shared() {
        "S".to_string()
    } else {
        chord_vertex(chord(c.0, c.1))
    }
}

/// Triangulations of the polygon on the given cyclic vertex list.
fn sub_triangulations(vs: &[usize]) -> Vec<BTreeSet<Chord>> {
    let m = vs.len();
    if m < 4 {
        return vec![BTreeSet::new()];
    }
    // Edge (vs[0], vs[m-1]) lies in a triangle with some apex vs[j].
    let mut out = Vec::new();
    for j in 1..m - 1 {
        let left = sub_triangulations(&vs[..=j]);
        let right = sub_triangulations(&vs[j..]);
        for l in &left {
            for r in &right {
                let mut s: BTreeSet<Chord> = l.union(r).copied().collect();
                if j > 1 {
                    s.insert(chord(vs[0], vs[j]));
                }
                if j < m - 2 {
                    s.insert(chord(vs[j], vs[m - 1]));
                }
                out.push(s);
            }
        }
    }
    out
}

fn triangulate_range(a: usize, b: usize) -> Vec<BTreeSet<Chord>> {
    sub_triangulations(&(a..=b).collect::<Vec<_>>())
}

/// All triangulations of an `n`-gon.
pub fn all_triangulations(n: usize) -> Vec<PolygonTriangulation> {
    triangulate_range(1, n)
        .into_iter()
        .map(|chords| PolygonTriangulation { n, chords })
        .collect()
}

/// Triangulations reachable from the fan by flips.
pub fn flip_component(n: usize) -> BTreeSet<PolygonTriangulation> {
    let start = PolygonTriangulation::fan(n);
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for &e in &t.chords {
            let u = flip(&t, e).expect("chord of a triangulation");
            if seen.insert(u.clone()) {
                queue.push_back(u);
            }
        }
    }
    seen
}

pub fn catalan(m: usize) -> u128 {
    let mut c: u128 = 1;
    for i in 0..m as u128 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

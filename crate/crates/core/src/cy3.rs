//! Shifted modules over a Dynkin quiver viewed inside the 3-Calabi-Yau
//! category: Hom and Ext in the derived category, CY3 Ext via Serre duality,
//! and cones of universal extensions.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{rat, Matrix, Rational};
use crate::qp::Qp;

/// A representation with one matrix per arrow (rows indexed by the target).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    pub dim: Vec<usize>,
    pub maps: Vec<Matrix>,
}

/// An object of the CY3 category: a shifted indecomposable module or an
/// opaque token that the engine cannot represent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CyObject {
    Shifted { dim: Vec<i64>, shift: i64 },
    Opaque { provenance: String, class: Vec<i64> },
}

impl CyObject {
    pub fn shifted(dim: Vec<i64>, shift: i64) -> Self {
        CyObject::Shifted { dim, shift }
    }

    pub fn simple(n: usize, i: usize, shift: i64) -> Self {
        let mut dim = vec![0; n];
        dim[i] = 1;
        CyObject::Shifted { dim, shift }
    }

    pub fn is_opaque(&self) -> bool {
        matches!(self, CyObject::Opaque { .. })
    }

    pub fn shift_by(&self, k: i64) -> Result<Self> {
        match self {
            CyObject::Shifted { dim, shift } => Ok(CyObject::Shifted {
                dim: dim.clone(),
                shift: shift + k,
            }),
            CyObject::Opaque { .. } => Err(Error::OpaqueOperand),
        }
    }

    /// Class in the Grothendieck group, in the basis of standard simples.
    pub fn k_class(&self) -> Vec<i64> {
        match self {
            CyObject::Shifted { dim, shift } => {
                let s = if shift.rem_euclid(2) == 0 { 1 } else { -1 };
                dim.iter().map(|d| s * d).collect()
            }
            CyObject::Opaque { class, .. } => class.clone(),
        }
    }

    /// Compact display `(d1,..,dn)_i` using `M_i = M[i-1]`.
    pub fn label(&self) -> String {
        match self {
            CyObject::Shifted { dim, shift } => {
                let d: Vec<String> = dim.iter().map(i64::to_string).collect();
                format!("({})_{}", d.join(","), shift + 1)
            }
            CyObject::Opaque { provenance, .. } => format!("opaque<{provenance}>"),
        }
    }
}

impl fmt::Display for CyObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `dim Hom(a, b[d])` by degree `d`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GradedHomDims(pub std::collections::BTreeMap<i64, usize>);

impl GradedHomDims {
    pub fn get(&self, d: i64) -> usize {
        self.0.get(&d).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ext1Cy3 {
    pub total: usize,
    pub db_part: usize,
    pub dual_part: usize,
}

/// Outcome of taking the cone of a universal module map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MapCone {
    Coker(usize),
    Ker(usize),
    Neither,
}

/// Precomputed module calculus for one Dynkin quiver.
#[derive(Debug, Clone)]
pub struct Engine {
    pub n: usize,
    /// `(source, target)` vertex positions of the arrows.
    pub arrows: Vec<(usize, usize)>,
    pub roots: Vec<Vec<i64>>,
    pub reps: Vec<Representation>,
    root_index: HashMap<Vec<i64>, usize>,
    hom: Vec<Vec<usize>>,
    ext: Vec<Vec<usize>>,
    // Keyed by (quotient, sub): the middle term of 0 -> N^e -> E -> M -> 0.
    univ: Vec<Vec<Option<usize>>>,
    // Keyed by (quotient, sub): the middle term of 0 -> M -> E -> N^e -> 0.
    couniv: Vec<Vec<Option<usize>>>,
    // Keyed by (M, N): cone of M -> N^e built from a basis of Hom(M, N).
    map_out: Vec<Vec<MapCone>>,
    // Keyed by (N, M): cone of N^e -> M built from a basis of Hom(N, M).
    map_in: Vec<Vec<MapCone>>,
}

/// Positive definiteness of the symmetrized Tits form.
fn is_dynkin(n: usize, arrows: &[(usize, usize)]) -> bool {
    let mut c = Matrix::zeros(n, n);
    for i in 0..n {
        c[(i, i)] = rat(2);
    }
    for &(s, t) in arrows {
        c[(s, t)] -= rat(1);
        c[(t, s)] -= rat(1);
    }
    (1..=n).all(|k| {
        let mut m = Matrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = c[(i, j)].clone();
            }
        }
        m.determinant() > Rational::zero()
    })
}

fn is_acyclic(n: usize, arrows: &[(usize, usize)]) -> bool {
    let mut indeg = vec![0usize; n];
    for &(_, t) in arrows {
        indeg[t] += 1;
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop_front() {
        seen += 1;
        for &(s, t) in arrows {
            if s == v {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    queue.push_back(t);
                }
            }
        }
    }
    seen == n
}

/// Symmetric form `(x, y) = 2 sum x_i y_i - sum_arrows (x_s y_t + x_t y_s)`.
fn sym_form(arrows: &[(usize, usize)], x: &[i64], y: &[i64]) -> i64 {
    let mut v: i64 = x.iter().zip(y).map(|(a, b)| 2 * a * b).sum();
    for &(s, t) in arrows {
        v -= x[s] * y[t] + x[t] * y[s];
    }
    v
}

/// Euler form `<d, e> = sum d_i e_i - sum_{arrows i -> j} d_i e_j`.
pub fn euler_form(arrows: &[(usize, usize)], d: &[i64], e: &[i64]) -> i64 {
    let mut v: i64 = d.iter().zip(e).map(|(a, b)| a * b).sum();
    for &(s, t) in arrows {
        v -= d[s] * e[t];
    }
    v
}

/// Positive roots by reflections, ordered by height then lexicographically.
pub fn positive_roots(n: usize, arrows: &[(usize, usize)]) -> Vec<Vec<i64>> {
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut queue = VecDeque::new();
    for i in 0..n {
        let mut e = vec![0i64; n];
        e[i] = 1;
        seen.insert(e.clone());
        queue.push_back(e);
    }
    while let Some(x) = queue.pop_front() {
        for i in 0..n {
            let mut e = vec![0i64; n];
            e[i] = 1;
            let c = sym_form(arrows, &x, &e);
            let mut y = x.clone();
            y[i] -= c;
            if y.iter().all(|&v| v >= 0) && y.iter().any(|&v| v > 0) && seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    let mut roots: Vec<Vec<i64>> = seen.into_iter().collect();
    roots.sort_by_key(|r| (r.iter().sum::<i64>(), r.clone()));
    roots
}

fn hom_system(arrows: &[(usize, usize)], m: &Representation, n: &Representation) -> (Matrix, Vec<usize>) {
    // Unknowns: f_v is dim n_v x dim m_v, stored row-major per vertex.
    let mut offset = Vec::with_capacity(m.dim.len());
    let mut cols = 0;
    for v in 0..m.dim.len() {
        offset.push(cols);
        cols += n.dim[v] * m.dim[v];
    }
    let rows: usize = arrows.iter().map(|&(s, t)| n.dim[t] * m.dim[s]).sum();
    let mut d = Matrix::zeros(rows, cols);
    let mut row = 0;
    for (a, &(s, t)) in arrows.iter().enumerate() {
        let (na, ma) = (&n.maps[a], &m.maps[a]);
        for r in 0..n.dim[t] {
            for c in 0..m.dim[s] {
                // (N_a f_s)[r][c] - (f_t M_a)[r][c]
                for k in 0..n.dim[s] {
                    let x = &na[(r, k)];
                    if !x.is_zero() {
                        d[(row, offset[s] + k * m.dim[s] + c)] += x;
                    }
                }
                for k in 0..m.dim[t] {
                    let x = &ma[(k, c)];
                    if !x.is_zero() {
                        d[(row, offset[t] + r * m.dim[t] + k)] -= x;
                    }
                }
                row += 1;
            }
        }
    }
    (d, offset)
}

/// Basis of `Hom(m, n)`, each element one matrix per vertex.
pub fn hom_basis(arrows: &[(usize, usize)], m: &Representation, n: &Representation) -> Vec<Vec<Matrix>> {
    let (d, offset) = hom_system(arrows, m, n);
    d.nullspace()
        .into_iter()
        .map(|x| {
            (0..m.dim.len())
                .map(|v| {
                    let mut f = Matrix::zeros(n.dim[v], m.dim[v]);
                    for r in 0..n.dim[v] {
                        for c in 0..m.dim[v] {
                            f[(r, c)] = x[offset[v] + r * m.dim[v] + c].clone();
                        }
                    }
                    f
                })
                .collect()
        })
        .collect()
}

pub fn hom_dim(arrows: &[(usize, usize)], m: &Representation, n: &Representation) -> usize {
    let (d, _) = hom_system(arrows, m, n);
    d.cols() - d.rank()
}

/// Representatives of a basis of `Ext^1(m, n)`, one matrix
/// `m_{s(a)} -> n_{t(a)}` per arrow.
pub fn ext1_basis(arrows: &[(usize, usize)], m: &Representation, n: &Representation) -> Vec<Vec<Matrix>> {
    let (d, _) = hom_system(arrows, m, n);
    d.complement_units()
        .into_iter()
        .map(|u| {
            let mut row = 0;
            let mut out = Vec::new();
            for &(s, t) in arrows {
                let mut e = Matrix::zeros(n.dim[t], m.dim[s]);
                for r in 0..n.dim[t] {
                    for c in 0..m.dim[s] {
                        if row == u {
                            e[(r, c)] = Rational::one();
                        }
                        row += 1;
                    }
                }
                out.push(e);
            }
            out
        })
        .collect()
}

pub fn ext1_dim(arrows: &[(usize, usize)], m: &Representation, n: &Representation) -> usize {
    let (d, _) = hom_system(arrows, m, n);
    d.rows() - d.rank()
}

fn end_dim(arrows: &[(usize, usize)], m: &Representation) -> usize {
    hom_dim(arrows, m, m)
}

fn random_rep(arrows: &[(usize, usize)], dim: &[usize], rng: &mut ChaCha8Rng) -> Representation {
    let maps = arrows
        .iter()
        .map(|&(s, t)| {
            let mut m = Matrix::zeros(dim[t], dim[s]);
            for r in 0..dim[t] {
                for c in 0..dim[s] {
                    m[(r, c)] = rat(rng.gen_range(-2..=2));
                }
            }
            m
        })
        .collect();
    Representation {
        dim: dim.to_vec(),
        maps,
    }
}

/// One indecomposable per positive root of a Dynkin quiver.
pub fn indecomposables(qp: &Qp) -> Result<Vec<Representation>> {
    Ok(Engine::new(qp)?.reps)
}

fn quiver_data(qp: &Qp) -> Result<(usize, Vec<(usize, usize)>)> {
    let q = &qp.quiver;
    let mut arrows = Vec::new();
    for a in &q.arrows {
        let s = q
            .vertex_index(&a.src)
            .ok_or_else(|| Error::UnknownVertex(a.src.clone()))?;
        let t = q
            .vertex_index(&a.tgt)
            .ok_or_else(|| Error::UnknownVertex(a.tgt.clone()))?;
        arrows.push((s, t));
    }
    Ok((q.vertices.len(), arrows))
}

fn direct_power(m: &Representation, e: usize) -> Representation {
    Representation {
        dim: m.dim.iter().map(|d| d * e).collect(),
        maps: m.maps.iter().map(|a| a.block_diag_power(e)).collect(),
    }
}

impl Engine {
    pub fn new(qp: &Qp) -> Result<Self> {
        if !qp.potential.is_zero() {
            return Err(Error::NotFiniteType("object engine needs zero potential".into()));
        }
        let (n, arrows) = quiver_data(qp)?;
        if !is_acyclic(n, &arrows) {
            return Err(Error::NotFiniteType("quiver has an oriented cycle".into()));
        }
        if !is_dynkin(n, &arrows) {
            return Err(Error::NotFiniteType("underlying graph is not Dynkin".into()));
        }
        let roots = positive_roots(n, &arrows);
        let mut reps = Vec::with_capacity(roots.len());
        for (i, r) in roots.iter().enumerate() {
            let dim: Vec<usize> = r.iter().map(|&x| x as usize).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + i as u64);
            let rep = (0..1000)
                .map(|_| random_rep(&arrows, &dim, &mut rng))
                .find(|m| end_dim(&arrows, m) == 1)
                .ok_or_else(|| Error::NotFiniteType(format!("no brick found for root {r:?}")))?;
            reps.push(rep);
        }
        let root_index = roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
        let k = roots.len();
        let mut eng = Engine {
            n,
            arrows,
            roots,
            reps,
            root_index,
            hom: vec![vec![0; k]; k],
            ext: vec![vec![0; k]; k],
            univ: vec![vec![None; k]; k],
            couniv: vec![vec![None; k]; k],
            map_out: vec![vec![MapCone::Neither; k]; k],
            map_in: vec![vec![MapCone::Neither; k]; k],
        };
        for i in 0..k {
            for j in 0..k {
                eng.hom[i][j] = hom_dim(&eng.arrows, &eng.reps[i], &eng.reps[j]);
                eng.ext[i][j] = ext1_dim(&eng.arrows, &eng.reps[i], &eng.reps[j]);
            }
        }
        for i in 0..k {
            for j in 0..k {
                eng.univ[i][j] = eng.build_univ(i, j);
                eng.couniv[i][j] = eng.build_couniv(i, j);
                eng.map_out[i][j] = eng.build_map_out(i, j);
                eng.map_in[i][j] = eng.build_map_in(i, j);
            }
        }
        Ok(eng)
    }

    pub fn root_of(&self, dim: &[i64]) -> Option<usize> {
        self.root_index.get(dim).copied()
    }

    fn classify(&self, m: &Representation) -> Option<usize> {
        if end_dim(&self.arrows, m) != 1 {
            return None;
        }
        let d: Vec<i64> = m.dim.iter().map(|&x| x as i64).collect();
        self.root_of(&d)
    }

    /// Middle term of the universal extension `0 -> N^e -> E -> M -> 0`.
    fn build_univ(&self, m: usize, nn: usize) -> Option<usize> {
        let (mr, nr) = (&self.reps[m], &self.reps[nn]);
        let classes = ext1_basis(&self.arrows, mr, nr);
        let e = classes.len();
        if e == 0 {
            return None;
        }
        let ne = direct_power(nr, e);
        let maps = self
            .arrows
            .iter()
            .enumerate()
            .map(|(a, &(s, _))| {
                let stacked = Matrix::vstack(&classes.iter().map(|c| c[a].clone()).collect::<Vec<_>>(), mr.dim[s]);
                Matrix::block(
                    &ne.maps[a],
                    &stacked,
                    &Matrix::zeros(mr.maps[a].rows(), ne.maps[a].cols()),
                    &mr.maps[a],
                )
            })
            .collect();
        let dim = ne.dim.iter().zip(&mr.dim).map(|(a, b)| a + b).collect();
        self.classify(&Representation { dim, maps })
    }

    /// Middle term of the universal extension `0 -> M -> E -> N^e -> 0` with
    /// `e = dim Ext^1(N, M)`; keyed by `(N, M)`.
    fn build_couniv(&self, nn: usize, m: usize) -> Option<usize> {
        let (mr, nr) = (&self.reps[m], &self.reps[nn]);
        let classes = ext1_basis(&self.arrows, nr, mr);
        let e = classes.len();
        if e == 0 {
            return None;
        }
        let ne = direct_power(nr, e);
        let maps = self
            .arrows
            .iter()
            .enumerate()
            .map(|(a, &(_, t))| {
                let side = Matrix::hstack(&classes.iter().map(|c| c[a].clone()).collect::<Vec<_>>(), mr.dim[t]);
                Matrix::block(
                    &mr.maps[a],
                    &side,
                    &Matrix::zeros(ne.maps[a].rows(), mr.maps[a].cols()),
                    &ne.maps[a],
                )
            })
            .collect();
        let dim = mr.dim.iter().zip(&ne.dim).map(|(a, b)| a + b).collect();
        self.classify(&Representation { dim, maps })
    }

    /// Cone of `M -> N^e` whose components span `Hom(M, N)`.
    fn build_map_out(&self, m: usize, nn: usize) -> MapCone {
        let (mr, nr) = (&self.reps[m], &self.reps[nn]);
        let basis = hom_basis(&self.arrows, mr, nr);
        if basis.is_empty() {
            return MapCone::Neither;
        }
        let ne = direct_power(nr, basis.len());
        let f: Vec<Matrix> = (0..self.n)
            .map(|v| Matrix::vstack(&basis.iter().map(|h| h[v].clone()).collect::<Vec<_>>(), mr.dim[v]))
            .collect();
        self.map_cone(mr, &ne, &f)
    }

    /// Cone of `N^e -> M` whose components span `Hom(N, M)`.
    fn build_map_in(&self, nn: usize, m: usize) -> MapCone {
        let (mr, nr) = (&self.reps[m], &self.reps[nn]);
        let basis = hom_basis(&self.arrows, nr, mr);
        if basis.is_empty() {
            return MapCone::Neither;
        }
        let ne = direct_power(nr, basis.len());
        let g: Vec<Matrix> = (0..self.n)
            .map(|v| Matrix::hstack(&basis.iter().map(|h| h[v].clone()).collect::<Vec<_>>(), mr.dim[v]))
            .collect();
        self.map_cone(&ne, mr, &g)
    }

    fn map_cone(&self, src: &Representation, tgt: &Representation, f: &[Matrix]) -> MapCone {
        let ranks: Vec<usize> = f.iter().map(Matrix::rank).collect();
        let injective = (0..self.n).all(|v| ranks[v] == src.dim[v]);
        let surjective = (0..self.n).all(|v| ranks[v] == tgt.dim[v]);
        if injective {
            match self.classify(&cokernel(&self.arrows, tgt, f)) {
                Some(r) => MapCone::Coker(r),
                None => MapCone::Neither,
            }
        } else if surjective {
            match self.classify(&kernel(&self.arrows, src, f)) {
                Some(r) => MapCone::Ker(r),
                None => MapCone::Neither,
            }
        } else {
            MapCone::Neither
        }
    }

    fn rep_of(&self, obj: &CyObject) -> Result<(usize, i64)> {
        match obj {
            CyObject::Shifted { dim, shift } => self
                .root_of(dim)
                .map(|r| (r, *shift))
                .ok_or_else(|| Error::InvalidQp(format!("{dim:?} is not a positive root"))),
            CyObject::Opaque { .. } => Err(Error::OpaqueOperand),
        }
    }

    pub fn hom_db(&self, a: &CyObject, b: &CyObject) -> Result<GradedHomDims> {
        let (m, s) = self.rep_of(a)?;
        let (nn, t) = self.rep_of(b)?;
        let mut out = std::collections::BTreeMap::new();
        if self.hom[m][nn] > 0 {
            out.insert(s - t, self.hom[m][nn]);
        }
        if self.ext[m][nn] > 0 {
            out.insert(s - t + 1, self.ext[m][nn]);
        }
        Ok(GradedHomDims(out))
    }

    pub fn ext1_cy3(&self, a: &CyObject, b: &CyObject) -> Result<Ext1Cy3> {
        let db_part = self.hom_db(a, b)?.get(1);
        let dual_part = self.hom_db(b, a)?.get(2);
        Ok(Ext1Cy3 {
            total: db_part + dual_part,
            db_part,
            dual_part,
        })
    }

    fn opaque(&self, tag: &str, s: &CyObject, sj: &CyObject, e: usize) -> CyObject {
        // K-class of an extension of S_j by S^e (either direction).
        let cs = s.k_class();
        let class = sj.k_class().iter().zip(&cs).map(|(x, y)| x + (e as i64) * y).collect();
        CyObject::Opaque {
            provenance: format!("{tag}({},{})", s.label(), sj.label()),
            class,
        }
    }

    /// The new simple replacing `sj` when tilting forward at `s`.
    pub fn cone_forward(&self, s: &CyObject, sj: &CyObject) -> Result<CyObject> {
        let ext = self.ext1_cy3(sj, s)?;
        if ext.total == 0 {
            return Ok(sj.clone());
        }
        if ext.dual_part != 0 {
            return Ok(self.opaque("F", s, sj, ext.total));
        }
        let (nn, t) = self.rep_of(s)?;
        let (m, sh) = self.rep_of(sj)?;
        let obj = |r: usize, shift: i64| CyObject::shifted(self.roots[r].clone(), shift);
        let out = if sh == t {
            self.univ[m][nn].map(|r| obj(r, sh))
        } else if sh == t + 1 {
            match self.map_out[m][nn] {
                MapCone::Coker(r) => Some(obj(r, t)),
                MapCone::Ker(r) => Some(obj(r, t + 1)),
                MapCone::Neither => None,
            }
        } else {
            None
        };
        Ok(out.unwrap_or_else(|| self.opaque("F", s, sj, ext.total)))
    }

    /// The new simple replacing `sj` when tilting backward at `s`.
    pub fn cone_backward(&self, s: &CyObject, sj: &CyObject) -> Result<CyObject> {
        let ext = self.ext1_cy3(s, sj)?;
        if ext.total == 0 {
            return Ok(sj.clone());
        }
        if ext.dual_part != 0 {
            return Ok(self.opaque("E", s, sj, ext.total));
        }
        let (nn, t) = self.rep_of(s)?;
        let (m, sh) = self.rep_of(sj)?;
        let obj = |r: usize, shift: i64| CyObject::shifted(self.roots[r].clone(), shift);
        let out = if t == sh {
            self.couniv[nn][m].map(|r| obj(r, sh))
        } else if t == sh + 1 {
            match self.map_in[nn][m] {
                MapCone::Coker(r) => Some(obj(r, sh)),
                MapCone::Ker(r) => Some(obj(r, sh + 1)),
                MapCone::Neither => None,
            }
        } else {
            None
        };
        Ok(out.unwrap_or_else(|| self.opaque("E", s, sj, ext.total)))
    }
}

/// Cokernel of an injective morphism into `tgt`.
fn cokernel(arrows: &[(usize, usize)], tgt: &Representation, f: &[Matrix]) -> Representation {
    let n = tgt.dim.len();
    let mut proj = Vec::with_capacity(n);
    let mut sect = Vec::with_capacity(n);
    for v in 0..n {
        let img_cols: Vec<Vec<Rational>> = f[v].column_basis().iter().map(|&c| f[v].column(c)).collect();
        let img = Matrix::from_columns(tgt.dim[v], &img_cols);
        let units = img.complement_units();
        let mut cols = img_cols.clone();
        let mut s = Matrix::zeros(tgt.dim[v], units.len());
        for (k, &u) in units.iter().enumerate() {
            let mut e = vec![Rational::zero(); tgt.dim[v]];
            e[u] = Rational::one();
            s[(u, k)] = Rational::one();
            cols.push(e);
        }
        let b = Matrix::from_columns(tgt.dim[v], &cols);
        let inv = b.inverse().expect("basis of the ambient space");
        let mut p = Matrix::zeros(units.len(), tgt.dim[v]);
        for k in 0..units.len() {
            for c in 0..tgt.dim[v] {
                p[(k, c)] = inv[(img_cols.len() + k, c)].clone();
            }
        }
        proj.push(p);
        sect.push(s);
    }
    let maps = arrows
        .iter()
        .enumerate()
        .map(|(a, &(s, t))| proj[t].mul(&tgt.maps[a]).mul(&sect[s]))
        .collect();
    Representation {
        dim: proj.iter().map(Matrix::rows).collect(),
        maps,
    }
}

/// Kernel of a surjective morphism out of `src`.
fn kernel(arrows: &[(usize, usize)], src: &Representation, f: &[Matrix]) -> Representation {
    let n = src.dim.len();
    let ks: Vec<Matrix> = (0..n)
        .map(|v| Matrix::from_columns(src.dim[v], &f[v].nullspace()))
        .collect();
    let maps = arrows
        .iter()
        .enumerate()
        .map(|(a, &(s, t))| {
            let img = src.maps[a].mul(&ks[s]);
            if ks[t].cols() == 0 {
                return Matrix::zeros(0, ks[s].cols());
            }
            ks[t].left_inverse().expect("kernel basis has full rank").mul(&img)
        })
        .collect();
    Representation {
        dim: ks.iter().map(Matrix::cols).collect(),
        maps,
    }
}

/// Membership of a shifted module in the subcategory generated by the
/// simples at the positions `sub`.
pub fn in_subcategory(obj: &CyObject, sub: &[usize]) -> Result<bool> {
    match obj {
        CyObject::Shifted { dim, .. } => {
            Ok(dim.iter().enumerate().all(|(i, d)| *d == 0 || sub.contains(&i)) && dim.iter().any(|d| *d != 0))
        }
        CyObject::Opaque { .. } => Err(Error::OpaqueOperand),
    }
}

/// Support test on a K-class, usable for opaque objects too.
pub fn class_in_subcategory(class: &[i64], sub: &[usize]) -> bool {
    class.iter().enumerate().all(|(i, d)| *d == 0 || sub.contains(&i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qp::{Arrow, Potential, Quiver};

    fn a(n: usize) -> Engine {
        Engine::new(&Qp::linear_a(n)).unwrap()
    }

    fn obj(d: &[i64], s: i64) -> CyObject {
        CyObject::shifted(d.to_vec(), s)
    }

    #[test]
    fn indecomposables_by_type() {
        assert_eq!(a(2).roots.len(), 3);
        assert_eq!(a(3).roots.len(), 6);
        assert_eq!(a(2).roots, vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
        let d4 = Qp {
            quiver: Quiver::new(
                ["c", "x", "y", "z"].map(String::from).to_vec(),
                vec![
                    Arrow::new("p", "x", "c"),
                    Arrow::new("q", "y", "c"),
                    Arrow::new("r", "z", "c"),
                ],
            ),
            potential: Potential::zero(),
        };
        let e = Engine::new(&d4).unwrap();
        assert_eq!(e.roots.len(), 12);
        assert!(e.roots.contains(&vec![2, 1, 1, 1]));
        let kron = Qp {
            quiver: Quiver::new(
                vec!["1".into(), "2".into()],
                vec![Arrow::new("a", "1", "2"), Arrow::new("b", "1", "2")],
            ),
            potential: Potential::zero(),
        };
        assert!(matches!(Engine::new(&kron), Err(Error::NotFiniteType(_))));
    }

    #[test]
    fn graded_homs_in_a2() {
        let e = a(2);
        let h = e.hom_db(&obj(&[0, 1], 0), &obj(&[1, 1], 0)).unwrap();
        assert_eq!(h.0, [(0, 1)].into());
        let h = e.hom_db(&obj(&[1, 0], 0), &obj(&[0, 1], 0)).unwrap();
        assert_eq!(h.0, [(1, 1)].into());
        for r in &e.roots {
            assert_eq!(e.hom_db(&obj(r, 3), &obj(r, 3)).unwrap().get(0), 1);
        }
    }

    #[test]
    fn cy3_ext_in_a2() {
        let e = a(2);
        let (s1, s2) = (obj(&[1, 0], 0), obj(&[0, 1], 0));
        let x = e.ext1_cy3(&s1, &s2).unwrap();
        assert_eq!((x.total, x.db_part, x.dual_part), (1, 1, 0));
        let x = e.ext1_cy3(&s2, &s1).unwrap();
        assert_eq!(x.total, 0);
        let y = e.ext1_cy3(&obj(&[1, 0], 1), &obj(&[0, 1], 1)).unwrap();
        assert_eq!(y, e.ext1_cy3(&s1, &s2).unwrap());
    }

    #[test]
    fn forward_cones_in_a3() {
        let e = a(3);
        let (x, y, z) = (obj(&[0, 0, 1], 0), obj(&[0, 1, 0], 0), obj(&[1, 0, 0], 0));
        assert_eq!(e.cone_forward(&x, &y).unwrap(), obj(&[0, 1, 1], 0));
        assert_eq!(e.cone_forward(&z, &y).unwrap(), y);
        // Heart {X[1], U, Z} tilted at U.
        let u = obj(&[0, 1, 1], 0);
        assert_eq!(e.cone_forward(&u, &obj(&[0, 0, 1], 1)).unwrap(), obj(&[0, 1, 0], 0));
        assert_eq!(e.cone_forward(&u, &z).unwrap(), obj(&[1, 1, 1], 0));
    }

    #[test]
    fn backward_cones() {
        let e = a(3);
        let (y, z) = (obj(&[0, 1, 0], 0), obj(&[1, 0, 0], 0));
        assert_eq!(e.cone_backward(&z, &y).unwrap(), obj(&[1, 1, 0], 0));
        assert_eq!(e.cone_backward(&y, &z).unwrap(), z);
        let e2 = a(2);
        let c = e2.cone_backward(&obj(&[0, 1], 0), &obj(&[1, 0], 1)).unwrap();
        assert!(c.is_opaque());
        assert_eq!(c.k_class(), vec![-1, 1]);
    }

    #[test]
    fn cokernel_and_kernel_shapes() {
        let e = a(2);
        // S2 -> P1 = (1,1) is injective with cokernel S1.
        let (s2, p1) = (e.root_of(&[0, 1]).unwrap(), e.root_of(&[1, 1]).unwrap());
        assert_eq!(e.map_out[s2][p1], MapCone::Coker(e.root_of(&[1, 0]).unwrap()));
        assert_eq!(e.map_in[p1][e.root_of(&[1, 0]).unwrap()], MapCone::Ker(s2));
    }

    #[test]
    fn subcategory_membership() {
        assert!(!in_subcategory(&obj(&[0, 1, 1], 0), &[1]).unwrap());
        assert!(in_subcategory(&obj(&[0, 1, 0], 5), &[1]).unwrap());
        assert!(!in_subcategory(&obj(&[0, 1, 0], 0), &[]).unwrap());
        let op = CyObject::Opaque {
            provenance: "p".into(),
            class: vec![1, 0],
        };
        assert_eq!(in_subcategory(&op, &[0]), Err(Error::OpaqueOperand));
    }
}

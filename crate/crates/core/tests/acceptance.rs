//! One PASS/FAIL line per acceptance criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qpt_core::cy3::CyObject;
use qpt_core::exchange::{
    explore, quotient_graph, regularity_report, Context, Direction, ExchangeGraph, Explore, QuotientGraph,
};
use qpt_core::io::{parse_qp, parse_region};
use qpt_core::path_algebra::{eje_quiver, jacobian_dims, Finiteness};
use qpt_core::polygon::{all_triangulations, chord_vertex, exconvrep_sequence, flip, ngon_quiver, PolygonPair, Side};
use qpt_core::qp::{canonical_form, ext1_matrix, mutate, restrict};
use qpt_core::silting::{initial_silting, seg_bullet, silting_mutate};
use qpt_core::{Qp, VertexSubset};

type Check = std::result::Result<String, String>;

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    std::fs::read_to_string(p).unwrap()
}

fn qp_fixture(name: &str) -> Qp {
    parse_qp(&fixture(name)).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn same(a: &Qp, b: &Qp) -> bool {
    canonical_form(a).0 == canonical_form(b).0
}

// Letters for the A3 hearts: X=S_3, Y=S_2, Z=S_1.
fn letter(c: char) -> Vec<i64> {
    match c {
        'X' => vec![0, 0, 1],
        'Y' => vec![0, 1, 0],
        'Z' => vec![1, 0, 0],
        'U' => vec![0, 1, 1],
        'V' => vec![1, 1, 0],
        'W' => vec![1, 1, 1],
        _ => unreachable!(),
    }
}

/// `X1` is the module X, `X2` its shift.
fn object(s: &str) -> CyObject {
    let mut ch = s.chars();
    let l = ch.next().unwrap();
    let i: i64 = ch.as_str().parse().unwrap();
    CyObject::shifted(letter(l), i - 1)
}

fn heart_key(h: &str) -> String {
    let mut parts: Vec<(Vec<i64>, i64)> = (0..h.len())
        .step_by(2)
        .map(|i| match object(&h[i..i + 2]) {
            CyObject::Shifted { dim, shift } => (dim, shift),
            CyObject::Opaque { .. } => unreachable!(),
        })
        .collect();
    parts.sort();
    parts
        .into_iter()
        .map(|(d, s)| CyObject::shifted(d, s).label())
        .collect::<Vec<_>>()
        .join(" ")
}

const HEARTS: [&str; 14] = [
    "X1Y1Z2", "X1Y1Z1", "X2U1Z2", "X2U1Z1", "W1Y1U2", "X1Y2V1", "X2Y2W1", "W2Y1Z1", "U2Y1Z2", "V1Y2W2", "X2V2Z1",
    "X1V2Z1", "X2Y2Z2", "X1Y2Z2",
];

/// Drawn edges `(from, label, to)` by position in `HEARTS`, from 1.
const EDGES: [(usize, &str, usize); 21] = [
    (2, "Z1", 1),
    (2, "X1", 4),
    (2, "Y1", 6),
    (1, "X1", 3),
    (1, "Y1", 14),
    (4, "U1", 5),
    (4, "Z1", 3),
    (3, "U1", 9),
    (5, "Y1", 7),
    (5, "W1", 8),
    (6, "X1", 7),
    (6, "V1", 12),
    (7, "W1", 10),
    (8, "Y1", 10),
    (8, "Z1", 9),
    (9, "Y1", 13),
    (10, "V1", 11),
    (11, "Z1", 13),
    (14, "X1", 13),
    (12, "X1", 11),
    (12, "Z1", 14),
];

fn a3_region_graph() -> (Context, ExchangeGraph) {
    let ctx = Context::new(&Qp::linear_a(3)).unwrap();
    let eg = explore(&ctx, 6, Explore::Both);
    (ctx, eg)
}

fn c1() -> Check {
    let t = Instant::now();
    let a3 = qp_fixture("a3.qp");
    let m = mutate(&a3, "2").map_err(|e| e.to_string())?;
    ensure(same(&m, &qp_fixture("mu2_a3.qp")), || {
        "mutation differs from fixture".into()
    })?;
    for qp in [&a3, &m] {
        let e = eje_quiver(qp, &VertexSubset::new(["2"]), 64).map_err(|e| e.to_string())?;
        ensure(e.vertices == ["1", "3"], || format!("vertices {:?}", e.vertices))?;
        ensure(e.arrows.len() == 1 && e.count("1", "3") == 1, || {
            format!("arrows {:?}", e.arrows)
        })?;
    }
    let dt = t.elapsed().as_secs_f64();
    ensure(dt < 1.0, || format!("took {dt:.2}s"))?;
    Ok(format!("{dt:.3}s"))
}

fn c2() -> Check {
    let t = Instant::now();
    let (_, eg) = a3_region_graph();
    let mut ids = BTreeMap::new();
    for (i, h) in HEARTS.iter().enumerate() {
        let key = heart_key(h);
        let v = eg.find(&key).ok_or_else(|| format!("x{} = {h} missing", i + 1))?;
        ids.insert(i + 1, v);
    }
    for &(a, l, b) in &EDGES {
        let label = object(l).label();
        let found = eg
            .out_edges(ids[&a])
            .any(|e| e.tgt == ids[&b] && e.label.label() == label);
        ensure(found, || format!("edge x{a} -{l}-> x{b} missing"))?;
    }
    let dt = t.elapsed().as_secs_f64();
    ensure(dt < 10.0, || format!("took {dt:.2}s"))?;
    Ok(format!("14 hearts, {} drawn edges, {dt:.2}s", EDGES.len()))
}

struct Pentagon {
    sub: usize,
    /// Classes as positions in `HEARTS`, then edges between them.
    classes: [&'static [usize]; 5],
    edges: [(usize, &'static str, usize); 5],
}

const RED: Pentagon = Pentagon {
    sub: 1,
    classes: [&[2, 6], &[5, 7], &[8, 10], &[9, 13], &[1, 14]],
    edges: [(0, "X1", 1), (1, "W1", 2), (2, "Z1", 3), (0, "Z1", 4), (4, "X1", 3)],
};

const BLUE: Pentagon = Pentagon {
    sub: 2,
    classes: [&[2, 4], &[1, 3], &[6, 7], &[11, 12], &[13, 14]],
    edges: [(0, "Z1", 1), (0, "Y1", 2), (2, "V1", 3), (3, "Z1", 4), (1, "Y1", 4)],
};

fn project_label(o: &CyObject, comp: &[usize]) -> String {
    match o {
        CyObject::Shifted { dim, shift } => CyObject::shifted(comp.iter().map(|&i| dim[i]).collect(), *shift).label(),
        CyObject::Opaque { .. } => unreachable!(),
    }
}

/// Checks a reference pentagon and returns the restricted quotient graph.
fn pentagon(eg: &ExchangeGraph, p: &Pentagon) -> std::result::Result<QuotientGraph, String> {
    let q = quotient_graph(eg, &[p.sub]);
    let region: Vec<usize> = parse_region(&fixture("eg_a3_region.json"))
        .unwrap()
        .iter()
        .map(|k| eg.find(k).unwrap())
        .collect();
    let mut classes = Vec::new();
    for members in p.classes {
        let vs: Vec<usize> = members
            .iter()
            .map(|&x| eg.find(&heart_key(HEARTS[x - 1])).unwrap())
            .collect();
        let c = q
            .class_containing(vs[0])
            .ok_or_else(|| format!("x{} not compatible", members[0]))?;
        let in_region: BTreeSet<usize> = region
            .iter()
            .copied()
            .filter(|&v| q.class_containing(v) == Some(c))
            .collect();
        ensure(in_region == vs.iter().copied().collect(), || {
            format!("class of x{} meets the region in {:?}", members[0], in_region)
        })?;
        classes.push(c);
    }
    let keep: BTreeSet<usize> = classes.iter().copied().collect();
    ensure(keep.len() == 5, || "pentagon classes coincide".into())?;
    let r = q.restrict(&keep.iter().copied().collect::<Vec<_>>());
    let local = |c: usize| keep.iter().position(|&x| x == c).unwrap();
    let mut want: Vec<(usize, String, usize)> = p
        .edges
        .iter()
        .map(|&(a, l, b)| (local(classes[a]), project_label(&object(l), &q.comp), local(classes[b])))
        .collect();
    let mut got: Vec<(usize, String, usize)> = r
        .edges
        .iter()
        .map(|e| (e.src, CyObject::shifted(e.label.0.clone(), e.label.1).label(), e.tgt))
        .collect();
    want.sort();
    got.sort();
    ensure(got == want, || format!("pentagon edges {got:?}, expected {want:?}"))?;
    Ok(r)
}

fn fully_expanded_regular(q: &QuotientGraph) -> std::result::Result<usize, String> {
    let m = q.comp.len();
    let mut n = 0;
    for (c, cl) in q.classes.iter().enumerate() {
        if cl.fully_expanded {
            n += 1;
            let (o, i) = (q.out_degree(c), q.in_degree(c));
            ensure(o == m && i == m, || format!("class {} has degrees ({o},{i})", cl.key()))?;
        }
    }
    ensure(n > 0, || "no fully expanded class".into())?;
    Ok(n)
}

fn c3() -> Check {
    let (_, eg) = a3_region_graph();
    let mut notes = Vec::new();
    for p in [&RED, &BLUE] {
        pentagon(&eg, p)?;
        let n = fully_expanded_regular(&quotient_graph(&eg, &[p.sub]))?;
        notes.push(format!("I={{{}}}: {n} fully expanded classes", p.sub + 1));
    }
    Ok(notes.join(", "))
}

fn c4() -> Check {
    let mut notes = Vec::new();
    for (n, depth) in [(2, 8), (3, 6)] {
        let ctx = Context::new(&Qp::linear_a(n)).unwrap();
        let eg = explore(&ctx, depth, Explore::Both);
        let rep = regularity_report(&eg);
        ensure(!rep.degrees.is_empty(), || format!("A{n}: no interior hearts"))?;
        if let Some(bad) = rep.degrees.iter().find(|&&(_, o, i)| o != n || i != n) {
            return Err(format!("A{n}: heart {} has degrees {:?}", eg.hearts[bad.0].key, bad));
        }
        notes.push(format!("A{n}: {} interior hearts", rep.degrees.len()));
    }
    Ok(notes.join(", "))
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn c5() -> Check {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ctxs = [
        Context::new(&Qp::linear_a(2)).unwrap(),
        Context::new(&Qp::linear_a(3)).unwrap(),
    ];
    for w in 0..1000 {
        let ctx = &ctxs[w % 2];
        let n = ctx.qp.n();
        let len = rng.gen_range(0..=12);
        let mut s = initial_silting(ctx);
        for _ in 0..len {
            let k = rng.gen_range(0..n);
            let dir = if rng.gen_bool(0.5) {
                Direction::Forward
            } else {
                Direction::Backward
            };
            s = silting_mutate(ctx, &s, k, dir).map_err(|e| format!("word {w}: {e}"))?;
            ensure(s.pairing() == identity(n), || {
                format!("word {w}: pairing {:?}", s.pairing())
            })?;
        }
    }
    let (ctx, eg) = a3_region_graph();
    for p in [&RED, &BLUE] {
        let q = pentagon(&eg, p)?;
        let g = seg_bullet(&ctx, &q, 6).map_err(|e| e.to_string())?;
        ensure(g.unverified.is_empty(), || {
            format!("unverified edges {:?}", g.unverified)
        })?;
        ensure(g.vertices.len() == 5 && g.edges.len() == 5, || {
            format!("{} vertices, {} edges", g.vertices.len(), g.edges.len())
        })?;
        let keys: BTreeSet<String> = g.vertices.iter().map(|v| v.quotient_key()).collect();
        let classes: BTreeSet<String> = q.classes.iter().map(|c| c.key()).collect();
        ensure(keys == classes, || "vertex keys differ from class keys".into())?;
        let mut a: Vec<_> = g
            .edges
            .iter()
            .map(|e| (g.class[e.src], e.label.clone(), g.class[e.tgt]))
            .collect();
        let mut b: Vec<_> = q.edges.iter().map(|e| (e.src, e.label.clone(), e.tgt)).collect();
        a.sort();
        b.sort();
        ensure(a == b, || "edge labels differ".into())?;
    }
    let dt = t.elapsed().as_secs_f64();
    ensure(dt < 30.0, || format!("took {dt:.2}s"))?;
    Ok(format!("1000 words, both pentagons, {dt:.2}s"))
}

fn c6() -> Check {
    let a3 = jacobian_dims(&qp_fixture("a3.qp"), 64).map_err(|e| e.to_string())?;
    ensure(a3.verdict == Finiteness::Finite(6) && a3.dims == [3, 2, 1], || {
        format!("A3 {a3:?}")
    })?;
    let m = jacobian_dims(&qp_fixture("mu2_a3.qp"), 64).map_err(|e| e.to_string())?;
    ensure(m.verdict == Finiteness::Finite(6) && m.dims == [3, 3], || {
        format!("mu2 A3 {m:?}")
    })?;
    let c = jacobian_dims(&qp_fixture("cycle3.qp"), 64).map_err(|e| e.to_string())?;
    ensure(c.verdict == Finiteness::Unknown(64), || {
        format!("3-cycle {:?}", c.verdict)
    })?;
    Ok("A3 {3,2,1}, mu2 A3 {3,3,0}, 3-cycle Unknown(64)".into())
}

fn c7() -> Check {
    let (ctx, eg) = a3_region_graph();
    let mut n = 0;
    for h in eg.hearts.iter().filter(|h| h.is_representable()) {
        let ext = ctx.ext_matrix(h).map_err(|e| e.to_string())?;
        ensure(ext == ext1_matrix(&h.qp), || format!("heart {} disagrees", h.key))?;
        n += 1;
    }
    Ok(format!("{n} representable hearts"))
}

fn c8() -> Check {
    let t = Instant::now();
    let mut pairs = 0;
    for k in 3..=9 {
        for l in 3..=(12 - k) {
            let pp = PolygonPair::new(k, l).map_err(|e| e.to_string())?;
            for tr in pp.triangulations() {
                let seq = exconvrep_sequence(&pp, &tr).map_err(|e| format!("({k},{l}) {tr:?}: {e}"))?;
                let distinct: BTreeSet<_> = seq.flips.iter().collect();
                ensure(distinct.len() == seq.flips.len(), || {
                    format!("({k},{l}) repeated flip {:?}", seq.flips)
                })?;
                for side in [Side::K, Side::L] {
                    if let Some(d) = pp.diagonal_d(side) {
                        ensure(seq.result.chords.contains(&d), || {
                            format!("({k},{l}) {tr:?}: {d:?} absent")
                        })?;
                    }
                }
                pairs += 1;
            }
        }
    }
    let mut flips = 0;
    for n in 4..=8 {
        for tr in all_triangulations(n) {
            let q = ngon_quiver(&tr).map_err(|e| e.to_string())?;
            for &c in &tr.chords {
                let lhs = ngon_quiver(&flip(&tr, c).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                let rhs = mutate(&q, &chord_vertex(c)).map_err(|e| e.to_string())?;
                ensure(same(&lhs, &rhs), || format!("{n}-gon {tr:?} flip {c:?}"))?;
                flips += 1;
            }
        }
    }
    let dt = t.elapsed().as_secs_f64();
    ensure(dt < 120.0, || format!("took {dt:.2}s"))?;
    Ok(format!("{pairs} pair triangulations, {flips} flips, {dt:.2}s"))
}

fn c9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let tris: Vec<_> = (4..=9).map(all_triangulations).collect();
    for s in 0..500 {
        let ts = &tris[rng.gen_range(0..tris.len())];
        let mut qp = ngon_quiver(&ts[rng.gen_range(0..ts.len())]).map_err(|e| e.to_string())?;
        for _ in 0..rng.gen_range(0..6) {
            let v = qp.vertices()[rng.gen_range(0..qp.n())].clone();
            qp = mutate(&qp, &v).map_err(|e| format!("sample {s}: {e}"))?;
        }
        let k = qp.vertices()[rng.gen_range(0..qp.n())].clone();
        let twice = mutate(&mutate(&qp, &k).map_err(|e| e.to_string())?, &k).map_err(|e| e.to_string())?;
        ensure(same(&twice, &qp), || format!("sample {s}: mu_{k}^2 differs"))?;
    }
    let (ctx, eg) = a3_region_graph();
    let mut edges = 0;
    for e in &eg.edges {
        let (src, tgt) = (&eg.hearts[e.src], &eg.hearts[e.tgt]);
        if !src.is_representable() || !tgt.is_representable() {
            continue;
        }
        // Stored hearts keep the order of their first discovery, so the
        // shifted simple is located by label.
        let moved = src.simples[e.index].shift_by(1).map_err(|e| e.to_string())?;
        let j = tgt
            .simples
            .iter()
            .position(|x| *x == moved)
            .ok_or_else(|| format!("edge {} -> {} lacks the shifted simple", src.key, tgt.key))?;
        let back = ctx.backward_tilt(tgt, j).map_err(|e| e.to_string())?;
        ensure(back.key == src.key, || {
            format!("edge {} -> {} does not invert", src.key, tgt.key)
        })?;
        let i = back.simples.iter().position(|x| *x == src.simples[e.index]).unwrap();
        let fwd = ctx.forward_tilt(&back, i).map_err(|e| e.to_string())?;
        ensure(fwd.key == tgt.key, || {
            format!("edge {} -> {} does not re-tilt", src.key, tgt.key)
        })?;
        edges += 1;
    }
    Ok(format!("500 QPs, {edges} representable edges"))
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1..(1usize << n) - 1).map(move |m| (0..n).filter(|i| m >> i & 1 == 1).collect())
}

fn c10() -> Check {
    let corpus = ["a3.qp", "mu2_a3.qp", "a4.qp", "d4.qp", "hexagon.qp", "square_cycle.qp"];
    let mut triples = 0;
    for name in corpus {
        let qp = qp_fixture(name);
        let vs = qp.vertices().to_vec();
        for k in &vs {
            let mk = mutate(&qp, k).map_err(|e| format!("{name}: {e}"))?;
            for idx in subsets(vs.len()) {
                let sub = VertexSubset::new(idx.iter().map(|&i| vs[i].clone()));
                let lhs = restrict(&mk, &sub);
                let rhs = if sub.contains(k) {
                    mutate(&restrict(&qp, &sub), k).map_err(|e| e.to_string())?
                } else if idx
                    .iter()
                    .all(|&i| qp.quiver.count(&vs[i], k) + qp.quiver.count(k, &vs[i]) == 0)
                {
                    restrict(&qp, &sub)
                } else {
                    continue;
                };
                ensure(same(&lhs, &rhs), || format!("{name}, k={k}, I={idx:?}"))?;
                triples += 1;
            }
        }
    }
    Ok(format!("{triples} triples"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("1 mutation and eJe", c1),
        ("2 A3 exchange graph region", c2),
        ("3 quotient pentagons and regularity", c3),
        ("4 (n,n)-regularity", c4),
        ("5 simple-projective duality", c5),
        ("6 Jacobian dimensions", c6),
        ("7 Ext oracle", c7),
        ("8 polygon flips", c8),
        ("9 involutions", c9),
        ("10 restriction and mutation", c10),
    ];
    // Written to the process stdout so the lines survive output capture.
    let mut out = std::io::stdout().lock();
    let mut failed = Vec::new();
    for (name, f) in criteria {
        let line = match f() {
            Ok(note) => format!("PASS criterion {name}: {note}\n"),
            Err(why) => {
                failed.push(name);
                format!("FAIL criterion {name}: {why}\n")
            }
        };
        out.write_all(line.as_bytes()).unwrap();
    }
    out.flush().unwrap();
    assert!(failed.is_empty(), "failed: {failed:?}");
}

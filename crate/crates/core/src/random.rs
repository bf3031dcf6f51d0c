//! Seeded random triangulations, walks and moves for property testing.
//!
//! Triangulations are grown from a tree of ordinary triangles (a disc),
//! self-folded triangles are attached along free sides, a few extra gluings
//! add topology when they keep the surface signature-zero, and the sides
//! still free become boundary segments.
//!
//! Walks are built from random non-backtracking steps interleaved with
//! excursions `c (η_i η_k)^n c⁻¹` to self-folded triangles, so that curls
//! and spirals of every multiplicity show up often.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::flips::{available_moves, FlipMove};
use crate::ribbon::{EdgeId, VertexId};
use crate::triangulation::{LeafyDualGraph, Side, Triangle, Triangulation};
use crate::walks::{self, ClosedWalkClass, Walk};

/// Size limits for [`triangulation`].
#[derive(Debug, Clone, Copy)]
pub struct TriangulationParams {
    pub max_triangles: usize,
    pub max_punctures: usize,
    pub max_extra_gluings: usize,
}

impl Default for TriangulationParams {
    fn default() -> Self {
        TriangulationParams {
            max_triangles: 12,
            max_punctures: 4,
            max_extra_gluings: 2,
        }
    }
}

type Slots = Vec<[Option<Side>; 3]>;

fn free_slots(slots: &Slots) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (t, s) in slots.iter().enumerate() {
        for (i, side) in s.iter().enumerate() {
            if side.is_none() {
                out.push((t, i));
            }
        }
    }
    out
}

fn assemble(slots: &Slots, arcs: &[String], folded: &[(String, String, String)]) -> Triangulation {
    let mut segments = Vec::new();
    let mut triangles = Vec::new();
    for (t, s) in slots.iter().enumerate() {
        let sides = s.clone().map(|side| {
            side.unwrap_or_else(|| {
                let name = format!("s{}", segments.len());
                segments.push(name.clone());
                Side::Segment(name)
            })
        });
        triangles.push(Triangle::Ordinary {
            name: format!("T{t}"),
            sides,
        });
    }
    let mut arcs = arcs.to_vec();
    for (name, l, r) in folded {
        arcs.push(r.clone());
        triangles.push(Triangle::SelfFolded {
            name: name.clone(),
            loop_arc: l.clone(),
            radius_arc: r.clone(),
        });
    }
    Triangulation {
        arcs,
        boundary_segments: segments,
        triangles,
    }
}

/// A random valid signature-zero triangulation with at least one boundary segment.
pub fn triangulation<R: Rng>(rng: &mut R, p: TriangulationParams) -> Triangulation {
    loop {
        if let Some(t) = try_triangulation(rng, p) {
            return t;
        }
    }
}

fn try_triangulation<R: Rng>(rng: &mut R, p: TriangulationParams) -> Option<Triangulation> {
    let max_ordinary = p.max_triangles.clamp(1, 8);
    let n_ord = rng.gen_range(1..=max_ordinary);
    let mut slots: Slots = vec![[None, None, None]; n_ord];
    let mut arcs: Vec<String> = Vec::new();
    for i in 1..n_ord {
        let free: Vec<_> = free_slots(&slots).into_iter().filter(|&(t, _)| t < i).collect();
        let &(t, s) = free.choose(rng)?;
        let a = format!("x{}", arcs.len());
        slots[t][s] = Some(Side::Arc(a.clone()));
        slots[i][rng.gen_range(0..3)] = Some(Side::Arc(a.clone()));
        arcs.push(a);
    }

    let mut folded: Vec<(String, String, String)> = Vec::new();
    let room = p.max_triangles.saturating_sub(n_ord).min(p.max_punctures);
    let punctures = rng.gen_range(0..=room);
    for k in 0..punctures {
        let free = free_slots(&slots);
        if free.len() <= 1 {
            break;
        }
        let &(t, s) = free.choose(rng)?;
        let l = format!("l{k}");
        slots[t][s] = Some(Side::Arc(l.clone()));
        arcs.push(l.clone());
        folded.push((format!("v{k}"), l, format!("r{k}")));
    }

    for _ in 0..rng.gen_range(0..=p.max_extra_gluings) {
        let free = free_slots(&slots);
        if free.len() < 3 {
            break;
        }
        let &(t1, s1) = free.choose(rng)?;
        let &(t2, s2) = free.choose(rng)?;
        if t1 == t2 {
            continue;
        }
        let a = format!("x{}", arcs.len());
        slots[t1][s1] = Some(Side::Arc(a.clone()));
        slots[t2][s2] = Some(Side::Arc(a.clone()));
        arcs.push(a);
        if !assemble(&slots, &arcs, &folded).validate().is_empty() {
            slots[t1][s1] = None;
            slots[t2][s2] = None;
            arcs.pop();
        }
    }

    let t = assemble(&slots, &arcs, &folded);
    t.validate().is_empty().then_some(t)
}

/// Which vertices a random walk may start and end at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ends {
    /// Any dual-graph vertex that is not a self-folded triangle.
    Any,
    /// Boundary-segment vertices only.
    Basepoints,
}

fn allowed(lg: &LeafyDualGraph, ends: Ends) -> Vec<VertexId> {
    match ends {
        Ends::Any => lg.endpoints(),
        Ends::Basepoints => lg.basepoints(),
    }
}

/// A random shortest path (leaf edges excluded) from `from` to a vertex
/// satisfying `goal`.
pub fn path_to<R: Rng>(
    rng: &mut R,
    lg: &LeafyDualGraph,
    from: VertexId,
    goal: impl Fn(VertexId) -> bool,
) -> Option<Vec<EdgeId>> {
    let g = &lg.graph;
    let mut prev: Vec<Option<(VertexId, EdgeId)>> = vec![None; g.vertex_count()];
    let mut seen = vec![false; g.vertex_count()];
    seen[from.index()] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if goal(u) {
            let mut out = Vec::new();
            let mut cur = u;
            while let Some((p, e)) = prev[cur.index()] {
                out.push(e);
                cur = p;
            }
            out.reverse();
            return Some(out);
        }
        let mut es = g.edges_at(u);
        es.shuffle(rng);
        for e in es {
            if lg.is_leaf(e) {
                continue;
            }
            let Some(v) = g.other_end(e, u) else { continue };
            if !seen[v.index()] {
                seen[v.index()] = true;
                prev[v.index()] = Some((u, e));
                queue.push_back(v);
            }
        }
    }
    None
}

fn end_of(lg: &LeafyDualGraph, start: VertexId, word: &[EdgeId]) -> VertexId {
    let g = &lg.graph;
    word.iter()
        .fold(start, |u, &e| g.other_end(e, u).expect("consecutive word"))
}

/// Appends a random excursion to a self-folded triangle: a path in, `n`
/// turns around the puncture in a random order, and usually the path back.
fn excursion<R: Rng>(rng: &mut R, lg: &LeafyDualGraph, from: VertexId, word: &mut Vec<EdgeId>) {
    let Some(cluster) = lg.self_folded.choose(rng) else {
        return;
    };
    let Some(c) = path_to(rng, lg, from, |u| u == cluster.triangle) else {
        return;
    };
    let n = *[1usize, 1, 2, 2, 3, 4, 5].choose(rng).unwrap();
    let [e1, e2] = cluster.eta;
    let pair = if rng.gen_bool(0.5) { [e1, e2] } else { [e2, e1] };
    word.extend_from_slice(&c);
    for _ in 0..n {
        word.extend_from_slice(&pair);
    }
    if rng.gen_bool(0.7) {
        word.extend(c.iter().rev());
    }
}

fn raw_word<R: Rng>(rng: &mut R, lg: &LeafyDualGraph, start: VertexId, target: usize) -> Vec<EdgeId> {
    let g = &lg.graph;
    let mut word: Vec<EdgeId> = Vec::new();
    let mut cur = start;
    let mut guard = 0;
    while word.len() < target && guard < 4 * target + 16 {
        guard += 1;
        if !lg.self_folded.is_empty() && rng.gen_bool(0.3) {
            excursion(rng, lg, cur, &mut word);
        } else {
            let last = word.last().copied();
            let options: Vec<EdgeId> = g
                .edges_at(cur)
                .into_iter()
                .filter(|&e| Some(e) != last && !lg.is_leaf(e))
                .collect();
            match options.choose(rng) {
                Some(&e) => word.push(e),
                None => break,
            }
        }
        cur = end_of(lg, start, &word);
    }
    word
}

/// A random standard-form walk of length at most `max_len` between allowed
/// endpoints.
pub fn walk<R: Rng>(rng: &mut R, lg: &LeafyDualGraph, max_len: usize, ends: Ends) -> Walk {
    let g = &lg.graph;
    let ok = allowed(lg, ends);
    let start = *ok.choose(rng).expect("graph has an allowed endpoint");
    let target = rng.gen_range(1..=max_len.max(1));
    let mut word = raw_word(rng, lg, start, target);
    let here = end_of(lg, start, &word);
    let goal = *ok.choose(rng).unwrap();
    let back = path_to(rng, lg, here, |u| u == goal).expect("graph is connected");
    word.extend(back);
    let w = walks::standard_form(g, start, &word).expect("word is consecutive");
    truncate(lg, w, max_len, ends)
}

/// The longest prefix of at most `max_len` edges ending at an allowed endpoint.
fn truncate(lg: &LeafyDualGraph, w: Walk, max_len: usize, ends: Ends) -> Walk {
    if w.len() <= max_len {
        return w;
    }
    let g = &lg.graph;
    let verts = w.vertex_seq(g);
    let ok = |u: VertexId| match ends {
        Ends::Any => lg.is_endpoint(u),
        Ends::Basepoints => lg.is_basepoint(u),
    };
    let cut = (0..=max_len).rev().find(|&i| ok(verts[i])).unwrap_or(0);
    Walk::from_word(g, w.start, &w.edges[..cut]).expect("prefix of a walk")
}

/// A random walk from `from` whose reduced form ends at a self-folded
/// triangle, used to conjugate loops around a puncture.
pub fn path_to_cluster<R: Rng>(
    rng: &mut R,
    lg: &LeafyDualGraph,
    from: VertexId,
    cluster: usize,
    wander: usize,
) -> Walk {
    let g = &lg.graph;
    let target = lg.self_folded[cluster].triangle;
    let mut word = raw_word(rng, lg, from, wander);
    let here = end_of(lg, from, &word);
    word.extend(path_to(rng, lg, here, |u| u == target).expect("graph is connected"));
    walks::standard_form(g, from, &word).expect("word is consecutive")
}

/// A random non-contractible closed class of length at most `max_len`.
pub fn closed_walk<R: Rng>(rng: &mut R, lg: &LeafyDualGraph, max_len: usize) -> Option<ClosedWalkClass> {
    let g = &lg.graph;
    for _ in 0..16 {
        let start = *lg.endpoints().choose(rng)?;
        let target = rng.gen_range(2..=max_len.max(2));
        let mut word = raw_word(rng, lg, start, target);
        let here = end_of(lg, start, &word);
        word.extend(path_to(rng, lg, here, |u| u == start)?);
        let w = walks::standard_form(g, start, &word).ok()?;
        if w.is_empty() {
            continue;
        }
        let Ok(c) = walks::cyclic_reduce(g, &w) else {
            continue;
        };
        if c.len() <= max_len {
            return ClosedWalkClass::new(g, &c).ok();
        }
    }
    None
}

/// A random applicable move, if any.
pub fn flip_move<R: Rng>(rng: &mut R, t: &Triangulation) -> Option<FlipMove> {
    available_moves(t).choose(rng).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn triangulations_are_valid_and_varied() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut punctures = 0;
        let mut genus_or_holes = 0;
        for _ in 0..200 {
            let t = triangulation(&mut rng, TriangulationParams::default());
            assert!(t.validate().is_empty());
            assert!(t.triangles.len() <= 12);
            let s = t.surface_summary().unwrap();
            punctures += s.punctures;
            if s.genus > 0 || s.boundary_components.len() > 1 {
                genus_or_holes += 1;
            }
        }
        assert!(punctures > 100);
        assert!(genus_or_holes > 0);
    }

    #[test]
    fn walks_respect_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let t = triangulation(&mut rng, TriangulationParams::default());
            let lg = t.leafy_dual_graph().unwrap();
            for ends in [Ends::Any, Ends::Basepoints] {
                let w = walk(&mut rng, &lg, 60, ends);
                assert!(w.len() <= 60);
                assert!(w.is_backtrack_free());
                assert!(lg.is_endpoint(w.start) && lg.is_endpoint(w.end));
                if ends == Ends::Basepoints {
                    assert!(lg.is_basepoint(w.start) && lg.is_basepoint(w.end));
                }
            }
            if let Some(c) = closed_walk(&mut rng, &lg, 60) {
                assert!(!c.is_empty() && c.len() <= 60);
            }
        }
    }
}

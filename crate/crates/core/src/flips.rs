//! Flips between signature-zero triangulations and transport of walks.
//!
//! A standard flip replaces the diagonal `d` of the quadrilateral formed by
//! two ordinary triangles with the other diagonal. A double flip moves a
//! self-folded triangle inside its once-punctured digon: the loop and the
//! radius are re-anchored at the opposite marked point of the digon.
//!
//! Walks are transported by a graph map from the old leafy dual graph to the
//! new one: every vertex keeps its label and every edge is sent to a short
//! path, after which the image is reduced to standard form.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ribbon::{EdgeId, VertexId};
use crate::triangulation::{EdgeKind, LeafyDualGraph, Side, Triangle, Triangulation};
use crate::walks::{self, ClosedWalkClass, Walk};

/// A single flip, named by the arc or self-folded triangle it acts on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "target", rename_all = "snake_case")]
pub enum FlipMove {
    /// Flip the arc shared by two ordinary triangles.
    Standard(String),
    /// Move the self-folded triangle of this name across its digon.
    Double(String),
}

impl fmt::Display for FlipMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlipMove::Standard(a) => write!(f, "standard:{a}"),
            FlipMove::Double(v) => write!(f, "double:{v}"),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptEntry {
    kind: String,
    target: String,
}

/// Parses a flip script: a JSON array of `{"kind": "standard"|"double", "target": ...}`.
pub fn parse_script(text: &str) -> Result<Vec<FlipMove>> {
    let entries: Vec<ScriptEntry> =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    entries
        .into_iter()
        .map(|e| match e.kind.as_str() {
            "standard" => Ok(FlipMove::Standard(e.target)),
            "double" => Ok(FlipMove::Double(e.target)),
            other => Err(Error::Parse(format!("unknown flip kind `{other}`"))),
        })
        .collect()
}

/// Parses `standard:<arc>` or `double:<triangle>`.
pub fn parse_move(text: &str) -> Result<FlipMove> {
    match text.split_once(':') {
        Some(("standard", a)) if !a.is_empty() => Ok(FlipMove::Standard(a.to_string())),
        Some(("double", v)) if !v.is_empty() => Ok(FlipMove::Double(v.to_string())),
        _ => Err(Error::Parse(format!(
            "bad move `{text}`, expected standard:<arc> or double:<triangle>"
        ))),
    }
}

/// A label not yet used by any arc: the base label (without any previous
/// `~n` suffix) followed by `~n`.
fn fresh_label(t: &Triangulation, label: &str) -> String {
    let base = label.split('~').next().unwrap_or(label);
    (1..)
        .map(|n| format!("{base}~{n}"))
        .find(|l| !t.arcs.contains(l))
        .expect("unbounded search")
}

fn rotate_to_last(sides: &[Side; 3], d: &Side) -> [Side; 3] {
    let p = sides.iter().position(|s| s == d).expect("side present");
    [
        sides[(p + 1) % 3].clone(),
        sides[(p + 2) % 3].clone(),
        sides[p].clone(),
    ]
}

fn edge_label(side: &Side) -> String {
    match side {
        Side::Arc(a) => format!("a:{a}"),
        Side::Segment(s) => format!("b:{s}"),
    }
}

#[derive(Debug, Clone)]
enum Rule {
    Standard {
        old_diagonal: String,
        new_diagonal: String,
        /// Triangle names that keep their names.
        first: String,
        second: String,
        /// Sides of `first` that move to `second`, and conversely.
        moves_from_first: Side,
        moves_from_second: Side,
    },
    Double {
        triangle: String,
        cluster: String,
        old_loop: String,
        new_loop: String,
        /// Edge label of the side whose crossing carries the detour around
        /// the puncture, and the η order of that detour entering from outside.
        detour_side: String,
        detour_order: (u8, u8),
    },
}

/// A flip applied to a triangulation, able to transport walks.
#[derive(Debug, Clone)]
pub struct Flip {
    pub before: Triangulation,
    pub after: Triangulation,
    pub mv: FlipMove,
    /// The move on `after` that undoes this flip (up to relabeling).
    pub inverse: FlipMove,
    old_graph: LeafyDualGraph,
    new_graph: LeafyDualGraph,
    rule: Rule,
}

impl Flip {
    pub fn new(t: &Triangulation, mv: &FlipMove) -> Result<Flip> {
        let old_graph = t.leafy_dual_graph()?;
        let (after, rule, inverse) = match mv {
            FlipMove::Standard(d) => standard(t, d)?,
            FlipMove::Double(v) => double(t, v)?,
        };
        let diags = after.validate();
        if !diags.is_empty() {
            let text: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
            return Err(Error::NotFlippable(format!(
                "{mv} gives an invalid triangulation: {}",
                text.join("; ")
            )));
        }
        let new_graph = after.leafy_dual_graph()?;
        Ok(Flip {
            before: t.clone(),
            after,
            mv: mv.clone(),
            inverse,
            old_graph,
            new_graph,
            rule,
        })
    }

    pub fn old_graph(&self) -> &LeafyDualGraph {
        &self.old_graph
    }

    pub fn new_graph(&self) -> &LeafyDualGraph {
        &self.new_graph
    }

    /// The image of edge `e` traversed away from `from`, as edge labels of
    /// the new graph.
    fn image(&self, e: EdgeId, from: VertexId) -> Vec<String> {
        let g = &self.old_graph.graph;
        let label = g.edge_label(e).to_string();
        let to = g.other_end(e, from).unwrap_or(from);
        match &self.rule {
            Rule::Standard {
                old_diagonal,
                new_diagonal,
                first,
                second,
                moves_from_first,
                moves_from_second,
            } => {
                let diag = format!("a:{new_diagonal}");
                if label == format!("a:{old_diagonal}") {
                    return vec![diag];
                }
                let side = match &self.old_graph.edge_kind[e.index()] {
                    EdgeKind::Arc(a) => Side::Arc(a.clone()),
                    EdgeKind::Boundary(s) => Side::Segment(s.clone()),
                    _ => return vec![label],
                };
                let detour = |u: VertexId| {
                    let l = g.vertex_label(u);
                    (l == format!("t:{first}") && side == *moves_from_first)
                        || (l == format!("t:{second}") && side == *moves_from_second)
                };
                let mut out = Vec::with_capacity(3);
                if detour(from) {
                    out.push(diag.clone());
                }
                out.push(label);
                if detour(to) {
                    out.push(diag);
                }
                out
            }
            Rule::Double {
                triangle,
                cluster,
                old_loop,
                new_loop,
                detour_side,
                detour_order: (i, k),
            } => {
                let lam = format!("a:{new_loop}");
                if label == format!("a:{old_loop}") {
                    return vec![lam];
                }
                if label != *detour_side {
                    return vec![label];
                }
                let eta = |n: u8| format!("eta{n}:{cluster}");
                if g.vertex_label(from) == format!("t:{triangle}") {
                    vec![lam.clone(), eta(*k), eta(*i), lam, label]
                } else {
                    vec![label, lam.clone(), eta(*i), eta(*k), lam]
                }
            }
        }
    }

    fn vertex(&self, u: VertexId) -> Result<VertexId> {
        self.new_graph
            .graph
            .vertex_by_label(self.old_graph.graph.vertex_label(u))
    }

    /// Transports a walk on the old leafy dual graph; the result is in
    /// standard form on the new one.
    pub fn transport(&self, w: &Walk) -> Result<Walk> {
        let g = &self.old_graph.graph;
        let ng = &self.new_graph.graph;
        let verts = w.vertex_seq(g);
        let mut word = Vec::with_capacity(w.len() + 4);
        for (idx, &e) in w.edges.iter().enumerate() {
            for l in self.image(e, verts[idx]) {
                word.push(ng.edge_by_label(&l)?);
            }
        }
        walks::standard_form(ng, self.vertex(w.start)?, &word)
    }

    /// Transports a closed class; `None` never occurs for a non-contractible
    /// class since the transport is invertible.
    pub fn transport_closed(&self, c: &ClosedWalkClass) -> Result<ClosedWalkClass> {
        let w = self.transport(c.representative())?;
        ClosedWalkClass::new(&self.new_graph.graph, &w)
    }
}

fn standard(t: &Triangulation, d: &str) -> Result<(Triangulation, Rule, FlipMove)> {
    let not = |why: &str| Error::NotFlippable(format!("arc `{d}`: {why}"));
    if !t.arcs.iter().any(|a| a == d) {
        return Err(Error::UnknownEdge(d.to_string()));
    }
    let side = Side::Arc(d.to_string());
    let occ = t.occurrences().remove(&side).unwrap_or_default();
    let [(t1, _), (t2, _)] = occ[..] else {
        return Err(not("does not bound two triangles"));
    };
    if t1 == t2 {
        return Err(not("both sides lie in the same triangle"));
    }
    let (Triangle::Ordinary { name: n1, sides: s1 }, Triangle::Ordinary { name: n2, sides: s2 }) =
        (&t.triangles[t1], &t.triangles[t2])
    else {
        return Err(not("is a loop or radius of a self-folded triangle"));
    };
    let [a, b, _] = rotate_to_last(s1, &side);
    let [c, e, _] = rotate_to_last(s2, &side);
    if a == e || b == c {
        return Err(not("flipping would fold a triangle onto itself"));
    }
    let nd = fresh_label(t, d);
    let new_side = Side::Arc(nd.clone());
    let mut after = t.clone();
    for arc in after.arcs.iter_mut() {
        if arc == d {
            *arc = nd.clone();
        }
    }
    after.triangles[t1] = Triangle::Ordinary {
        name: n1.clone(),
        sides: [e.clone(), a, new_side.clone()],
    };
    after.triangles[t2] = Triangle::Ordinary {
        name: n2.clone(),
        sides: [b.clone(), c, new_side],
    };
    let rule = Rule::Standard {
        old_diagonal: d.to_string(),
        new_diagonal: nd.clone(),
        first: n1.clone(),
        second: n2.clone(),
        moves_from_first: b.clone(),
        moves_from_second: e.clone(),
    };
    Ok((after, rule, FlipMove::Standard(nd)))
}

fn double(t: &Triangulation, v: &str) -> Result<(Triangulation, Rule, FlipMove)> {
    let vi = t
        .triangle_index(v)
        .ok_or_else(|| Error::UnknownVertex(format!("t:{v}")))?;
    let Triangle::SelfFolded {
        loop_arc,
        radius_arc,
        ..
    } = &t.triangles[vi]
    else {
        return Err(Error::NotFlippable(format!("`{v}` is not self-folded")));
    };
    let lside = Side::Arc(loop_arc.clone());
    let ti = t
        .triangles
        .iter()
        .position(|tr| !tr.is_self_folded() && tr.slots().contains(&lside))
        .ok_or_else(|| Error::NotFlippable(format!("loop of `{v}` is not in an ordinary triangle")))?;
    let Triangle::Ordinary { name, sides } = &t.triangles[ti] else {
        unreachable!()
    };
    // rotate so the loop comes first: (l, x, y)
    let [x, y, _] = rotate_to_last(sides, &lside);
    let new_loop = fresh_label(t, loop_arc);
    let new_radius = fresh_label(t, radius_arc);
    let mut after = t.clone();
    for arc in after.arcs.iter_mut() {
        if arc == loop_arc {
            *arc = new_loop.clone();
        } else if arc == radius_arc {
            *arc = new_radius.clone();
        }
    }
    after.triangles[ti] = Triangle::Ordinary {
        name: name.clone(),
        sides: [Side::Arc(new_loop.clone()), y.clone(), x.clone()],
    };
    after.triangles[vi] = Triangle::SelfFolded {
        name: v.to_string(),
        loop_arc: new_loop.clone(),
        radius_arc: new_radius,
    };
    let (lx, ly) = (edge_label(&x), edge_label(&y));
    // the side with the smaller label keeps its crossing; the other one
    // picks up the detour around the puncture
    let (detour_side, detour_order) = if lx < ly { (ly, (2, 1)) } else { (lx, (1, 2)) };
    let rule = Rule::Double {
        triangle: name.clone(),
        cluster: v.to_string(),
        old_loop: loop_arc.clone(),
        new_loop,
        detour_side,
        detour_order,
    };
    Ok((after, rule, FlipMove::Double(v.to_string())))
}

/// Applies a move, returning the new triangulation.
pub fn flip(t: &Triangulation, mv: &FlipMove) -> Result<Triangulation> {
    Ok(Flip::new(t, mv)?.after)
}

/// Transports a walk across a move.
pub fn transport_walk(t: &Triangulation, mv: &FlipMove, w: &Walk) -> Result<Walk> {
    Flip::new(t, mv)?.transport(w)
}

/// Applies a script of moves in order, returning every intermediate flip.
pub fn run_script(t: &Triangulation, moves: &[FlipMove]) -> Result<Vec<Flip>> {
    let mut cur = t.clone();
    let mut out = Vec::with_capacity(moves.len());
    for mv in moves {
        let f = Flip::new(&cur, mv)?;
        cur = f.after.clone();
        out.push(f);
    }
    Ok(out)
}

/// Every move that can be applied to `t`.
pub fn available_moves(t: &Triangulation) -> Vec<FlipMove> {
    let mut out = Vec::new();
    for a in &t.arcs {
        let mv = FlipMove::Standard(a.clone());
        if Flip::new(t, &mv).is_ok() {
            out.push(mv);
        }
    }
    for tr in &t.triangles {
        if tr.is_self_folded() {
            let mv = FlipMove::Double(tr.name().to_string());
            if Flip::new(t, &mv).is_ok() {
                out.push(mv);
            }
        }
    }
    out
}

/// A relabeling of arcs and triangles carrying one triangulation onto
/// another; boundary segments keep their labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isomorphism {
    pub arcs: HashMap<String, String>,
    pub triangles: HashMap<String, String>,
}

impl Isomorphism {
    fn map_suffix(&self, kind: &str, rest: &str) -> Option<String> {
        match kind {
            "a" => self.arcs.get(rest).cloned(),
            "b" | "s" => Some(rest.to_string()),
            "t" | "w" | "z" | "eta1" | "eta2" | "leaf" => self.triangles.get(rest).cloned(),
            _ => None,
        }
    }

    /// Maps a vertex or edge label of the source leafy dual graph.
    pub fn map_label(&self, label: &str) -> Result<String> {
        let (kind, rest) = label
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bad label `{label}`")))?;
        self.map_suffix(kind, rest)
            .map(|r| format!("{kind}:{r}"))
            .ok_or_else(|| Error::UnknownEdge(label.to_string()))
    }

    /// Carries a walk across the isomorphism.
    pub fn map_walk(&self, from: &LeafyDualGraph, to: &LeafyDualGraph, w: &Walk) -> Result<Walk> {
        let (g, h) = (&from.graph, &to.graph);
        let start = h.vertex_by_label(&self.map_label(g.vertex_label(w.start))?)?;
        let word = w
            .edges
            .iter()
            .map(|&e| h.edge_by_label(&self.map_label(g.edge_label(e))?))
            .collect::<Result<Vec<_>>>()?;
        Walk::from_word(h, start, &word)
    }
}

/// Finds an isomorphism from `a` to `b` fixing boundary segment labels.
pub fn find_isomorphism(a: &Triangulation, b: &Triangulation) -> Option<Isomorphism> {
    let mut sa = a.boundary_segments.clone();
    let mut sb = b.boundary_segments.clone();
    sa.sort();
    sb.sort();
    if sa != sb || a.triangles.len() != b.triangles.len() || a.arcs.len() != b.arcs.len() {
        return None;
    }
    let anchor = Side::Segment(sa.first()?.clone());
    let occ_a = a.occurrences();
    let occ_b = b.occurrences();
    let (ta, ka) = *occ_a.get(&anchor)?.first()?;
    let (tb, kb) = *occ_b.get(&anchor)?.first()?;
    let slots_a: Vec<[Side; 3]> = a.triangles.iter().map(|t| t.slots()).collect();
    let slots_b: Vec<[Side; 3]> = b.triangles.iter().map(|t| t.slots()).collect();

    let mut tri: Vec<Option<(usize, usize)>> = vec![None; a.triangles.len()];
    let mut arcs: HashMap<String, String> = HashMap::new();
    let mut queue = VecDeque::new();
    let visit = |i: usize, j: usize, off: usize, tri: &mut Vec<Option<(usize, usize)>>, queue: &mut VecDeque<usize>| -> bool {
        if a.triangles[i].is_self_folded() != b.triangles[j].is_self_folded() {
            return false;
        }
        if a.triangles[i].is_self_folded() && off != 0 {
            return false;
        }
        match tri[i] {
            Some(x) => x == (j, off),
            None => {
                tri[i] = Some((j, off));
                queue.push_back(i);
                true
            }
        }
    };
    if !visit(ta, tb, (kb + 3 - ka) % 3, &mut tri, &mut queue) {
        return None;
    }
    while let Some(i) = queue.pop_front() {
        let (j, off) = tri[i].expect("queued triangles are mapped");
        for s in 0..3 {
            let x = &slots_a[i][s];
            let y = &slots_b[j][(s + off) % 3];
            match (x, y) {
                (Side::Segment(p), Side::Segment(q)) if p == q => continue,
                (Side::Arc(p), Side::Arc(q)) => {
                    if let Some(prev) = arcs.insert(p.clone(), q.clone()) {
                        if prev != *q {
                            return None;
                        }
                    }
                }
                _ => return None,
            }
            let other = |occ: &[(usize, usize)], me: (usize, usize)| occ.iter().copied().find(|&o| o != me);
            let (ui, us) = other(&occ_a[x], (i, s))?;
            let (uj, vs) = other(&occ_b[y], (j, (s + off) % 3))?;
            if ui == i && uj == j {
                continue;
            }
            if !visit(ui, uj, (vs + 3 - us) % 3, &mut tri, &mut queue) {
                return None;
            }
        }
    }
    let mut triangles = HashMap::new();
    let mut seen = vec![false; b.triangles.len()];
    for (i, m) in tri.iter().enumerate() {
        let (j, _) = (*m)?;
        if std::mem::replace(&mut seen[j], true) {
            return None;
        }
        triangles.insert(a.triangles[i].name().to_string(), b.triangles[j].name().to_string());
    }
    Some(Isomorphism { arcs, triangles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::kinks;
    use crate::walks::parse_walk;

    fn round_trip(t: &Triangulation, mv: &FlipMove, w: &str) {
        let f = Flip::new(t, mv).unwrap();
        let back = Flip::new(&f.after, &f.inverse).unwrap();
        let iso = find_isomorphism(&back.after, t).expect("flip back is isomorphic");
        let w = parse_walk(&f.old_graph().graph, w).unwrap();
        let there = f.transport(&w).unwrap();
        let again = back.transport(&there).unwrap();
        let home = iso.map_walk(back.new_graph(), f.old_graph(), &again).unwrap();
        assert_eq!(home, w, "{mv}");
    }

    #[test]
    fn standard_flip_on_the_annulus() {
        let t = fixtures::annulus();
        let f = Flip::new(&t, &FlipMove::Standard("delta".into())).unwrap();
        assert!(f.after.validate().is_empty());
        assert!(f.after.arcs.contains(&"delta~1".to_string()));
        assert_eq!(f.after.surface_summary().unwrap(), t.surface_summary().unwrap());
        for w in [fixtures::ANNULUS_F1, fixtures::ANNULUS_F2, fixtures::ANNULUS_F3, fixtures::ANNULUS_F4] {
            round_trip(&t, &FlipMove::Standard("delta".into()), w);
            round_trip(&t, &FlipMove::Standard("gamma".into()), w);
        }
    }

    #[test]
    fn double_flip_on_the_annulus() {
        let t = fixtures::annulus();
        let mv = FlipMove::Double("v1".into());
        let after = flip(&t, &mv).unwrap();
        assert!(after.validate().is_empty());
        assert_eq!(after.surface_summary().unwrap().punctures, 3);
        for w in [fixtures::ANNULUS_F1, fixtures::ANNULUS_F2, fixtures::ANNULUS_F3, fixtures::ANNULUS_F4] {
            round_trip(&t, &mv, w);
        }
    }

    #[test]
    fn kink_presence_survives_flips() {
        let t = fixtures::annulus();
        let lg = t.leafy_dual_graph().unwrap();
        for mv in available_moves(&t) {
            let f = Flip::new(&t, &mv).unwrap();
            for text in [fixtures::ANNULUS_F1, fixtures::ANNULUS_F2, fixtures::ANNULUS_F3, fixtures::ANNULUS_F4] {
                let w = parse_walk(&lg.graph, text).unwrap();
                let x = f.transport(&w).unwrap();
                let before = !kinks::find_kinks(&lg, &w).unwrap().is_empty();
                let after = !kinks::find_kinks(f.new_graph(), &x).unwrap().is_empty();
                assert_eq!(before, after, "{mv} on {text}");
            }
        }
    }

    #[test]
    fn illegal_moves() {
        let t = fixtures::annulus();
        for (mv, ok) in [
            (FlipMove::Standard("rho1".into()), false),
            (FlipMove::Standard("lambda".into()), false),
            (FlipMove::Double("T1".into()), false),
            (FlipMove::Standard("beta".into()), true),
        ] {
            assert_eq!(Flip::new(&t, &mv).is_ok(), ok, "{mv}");
        }
        assert!(matches!(
            flip(&t, &FlipMove::Standard("rho1".into())),
            Err(Error::NotFlippable(_))
        ));
    }

    #[test]
    fn isomorphism_detects_identity_and_swaps() {
        let t = fixtures::annulus();
        let iso = find_isomorphism(&t, &t).unwrap();
        assert!(iso.arcs.iter().all(|(a, b)| a == b));
        let once = flip(&t, &FlipMove::Standard("delta".into())).unwrap();
        assert!(find_isomorphism(&t, &once).is_none());
    }

    #[test]
    fn scripts() {
        let moves =
            parse_script(r#"[{"kind":"standard","target":"delta"},{"kind":"double","target":"v1"}]"#)
                .unwrap();
        assert_eq!(
            moves,
            vec![FlipMove::Standard("delta".into()), FlipMove::Double("v1".into())]
        );
        let flips = run_script(&fixtures::annulus(), &moves).unwrap();
        assert_eq!(flips.len(), 2);
        assert!(parse_script(r#"[{"kind":"triple","target":"x"}]"#).is_err());
        assert_eq!(parse_move("double:v2").unwrap(), FlipMove::Double("v2".into()));
        assert!(parse_move("v2").is_err());
    }
}

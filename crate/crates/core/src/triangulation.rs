//! Signature-zero ideal triangulations and their (leafy) dual graphs.
//!
//! Triangles are stored with their sides in clockwise order. A self-folded
//! triangle is stored by its loop and radius; its sides read clockwise as
//! (loop, radius, radius), and its middle corner is the enclosed puncture.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ribbon::{DartId, EdgeId, RibbonGraph, RibbonGraphBuilder, VertexId};

/// One side of an ordinary triangle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Arc(String),
    Segment(String),
}

impl Side {
    pub fn label(&self) -> &str {
        match self {
            Side::Arc(a) | Side::Segment(a) => a,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Arc(a) => write!(f, "{a}"),
            Side::Segment(s) => write!(f, "bd:{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Triangle {
    Ordinary { name: String, sides: [Side; 3] },
    SelfFolded {
        name: String,
        loop_arc: String,
        radius_arc: String,
    },
}

impl Triangle {
    pub fn name(&self) -> &str {
        match self {
            Triangle::Ordinary { name, .. } | Triangle::SelfFolded { name, .. } => name,
        }
    }

    pub fn is_self_folded(&self) -> bool {
        matches!(self, Triangle::SelfFolded { .. })
    }

    /// The three sides in clockwise order.
    pub fn slots(&self) -> [Side; 3] {
        match self {
            Triangle::Ordinary { sides, .. } => sides.clone(),
            Triangle::SelfFolded {
                loop_arc,
                radius_arc,
                ..
            } => [
                Side::Arc(loop_arc.clone()),
                Side::Arc(radius_arc.clone()),
                Side::Arc(radius_arc.clone()),
            ],
        }
    }
}

/// A position inside a triangulation: triangle index and side index.
pub type Slot = (usize, usize);

/// A violated triangulation invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    Empty,
    DuplicateArc { arc: String },
    DuplicateSegment { segment: String },
    DuplicateTriangle { triangle: String },
    UnknownArc { triangle: String, arc: String },
    UnknownSegment { triangle: String, segment: String },
    ArcMultiplicity { arc: String, count: usize },
    SegmentMultiplicity { segment: String, count: usize },
    RepeatedSide { triangle: String, side: String },
    LoopIsRadius { triangle: String, arc: String },
    RadiusOutsideItsTriangle { arc: String, triangle: String },
    LoopMisplaced { arc: String },
    NoBoundary,
    Disconnected { components: usize },
    UnenclosedPuncture { corners: Vec<String> },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Empty => write!(f, "triangulation has no triangles"),
            Diagnostic::DuplicateArc { arc } => write!(f, "arc `{arc}` declared twice"),
            Diagnostic::DuplicateSegment { segment } => {
                write!(f, "boundary segment `{segment}` declared twice")
            }
            Diagnostic::DuplicateTriangle { triangle } => {
                write!(f, "triangle name `{triangle}` used twice")
            }
            Diagnostic::UnknownArc { triangle, arc } => {
                write!(f, "triangle `{triangle}` uses undeclared arc `{arc}`")
            }
            Diagnostic::UnknownSegment { triangle, segment } => {
                write!(f, "triangle `{triangle}` uses undeclared boundary segment `{segment}`")
            }
            Diagnostic::ArcMultiplicity { arc, count } => {
                write!(f, "arc `{arc}` occurs in {count} sides, expected 2")
            }
            Diagnostic::SegmentMultiplicity { segment, count } => {
                write!(f, "boundary segment `{segment}` occurs in {count} sides, expected 1")
            }
            Diagnostic::RepeatedSide { triangle, side } => {
                write!(f, "ordinary triangle `{triangle}` uses `{side}` twice")
            }
            Diagnostic::LoopIsRadius { triangle, arc } => {
                write!(f, "self-folded triangle `{triangle}` uses `{arc}` as loop and radius")
            }
            Diagnostic::RadiusOutsideItsTriangle { arc, triangle } => {
                write!(f, "radius `{arc}` also occurs in triangle `{triangle}`")
            }
            Diagnostic::LoopMisplaced { arc } => {
                write!(f, "loop `{arc}` must bound exactly one ordinary triangle")
            }
            Diagnostic::NoBoundary => write!(f, "triangulation has no boundary segment"),
            Diagnostic::Disconnected { components } => {
                write!(f, "dual graph has {components} connected components")
            }
            Diagnostic::UnenclosedPuncture { corners } => write!(
                f,
                "puncture at corners [{}] is not enclosed by a self-folded triangle",
                corners.join(", ")
            ),
        }
    }
}

/// Topological data read off a valid triangulation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceSummary {
    pub genus: usize,
    /// Number of marked points on each boundary component, sorted decreasingly.
    pub boundary_components: Vec<usize>,
    pub punctures: usize,
    pub marked_points: usize,
}

/// A signature-zero ideal triangulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    pub arcs: Vec<String>,
    pub boundary_segments: Vec<String>,
    pub triangles: Vec<Triangle>,
}

impl Triangulation {
    /// Wraps the data and rejects it unless it is a valid signature-zero triangulation.
    pub fn new(
        arcs: Vec<String>,
        boundary_segments: Vec<String>,
        triangles: Vec<Triangle>,
    ) -> Result<Triangulation> {
        let t = Triangulation {
            arcs,
            boundary_segments,
            triangles,
        };
        let diags = t.validate();
        if diags.is_empty() {
            Ok(t)
        } else {
            Err(Error::InvalidTriangulation(diags))
        }
    }

    pub fn triangle_index(&self, name: &str) -> Option<usize> {
        self.triangles.iter().position(|t| t.name() == name)
    }

    /// Every occurrence of every side, keyed by side.
    pub fn occurrences(&self) -> BTreeMap<Side, Vec<Slot>> {
        let mut occ: BTreeMap<Side, Vec<Slot>> = BTreeMap::new();
        for (ti, t) in self.triangles.iter().enumerate() {
            for (si, s) in t.slots().into_iter().enumerate() {
                occ.entry(s).or_default().push((ti, si));
            }
        }
        occ
    }

    /// All violated invariants; empty iff the triangulation is valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.triangles.is_empty() {
            out.push(Diagnostic::Empty);
            return out;
        }
        let mut arcs = BTreeSet::new();
        for a in &self.arcs {
            if !arcs.insert(a.as_str()) {
                out.push(Diagnostic::DuplicateArc { arc: a.clone() });
            }
        }
        let mut segs = BTreeSet::new();
        for s in &self.boundary_segments {
            if !segs.insert(s.as_str()) {
                out.push(Diagnostic::DuplicateSegment { segment: s.clone() });
            }
        }
        let mut names = BTreeSet::new();
        for t in &self.triangles {
            if !names.insert(t.name()) {
                out.push(Diagnostic::DuplicateTriangle {
                    triangle: t.name().to_string(),
                });
            }
        }

        for t in &self.triangles {
            for s in t.slots() {
                match &s {
                    Side::Arc(a) if !arcs.contains(a.as_str()) => out.push(Diagnostic::UnknownArc {
                        triangle: t.name().to_string(),
                        arc: a.clone(),
                    }),
                    Side::Segment(g) if !segs.contains(g.as_str()) => {
                        out.push(Diagnostic::UnknownSegment {
                            triangle: t.name().to_string(),
                            segment: g.clone(),
                        })
                    }
                    _ => {}
                }
            }
            match t {
                Triangle::Ordinary { name, sides } => {
                    for i in 0..3 {
                        for k in i + 1..3 {
                            if sides[i] == sides[k] {
                                out.push(Diagnostic::RepeatedSide {
                                    triangle: name.clone(),
                                    side: sides[i].to_string(),
                                });
                            }
                        }
                    }
                }
                Triangle::SelfFolded {
                    name,
                    loop_arc,
                    radius_arc,
                } => {
                    if loop_arc == radius_arc {
                        out.push(Diagnostic::LoopIsRadius {
                            triangle: name.clone(),
                            arc: loop_arc.clone(),
                        });
                    }
                }
            }
        }

        let occ = self.occurrences();
        for a in &arcs {
            let n = occ.get(&Side::Arc(a.to_string())).map_or(0, Vec::len);
            if n != 2 {
                out.push(Diagnostic::ArcMultiplicity {
                    arc: a.to_string(),
                    count: n,
                });
            }
        }
        for s in &segs {
            let n = occ.get(&Side::Segment(s.to_string())).map_or(0, Vec::len);
            if n != 1 {
                out.push(Diagnostic::SegmentMultiplicity {
                    segment: s.to_string(),
                    count: n,
                });
            }
        }

        for (ti, t) in self.triangles.iter().enumerate() {
            if let Triangle::SelfFolded {
                loop_arc,
                radius_arc,
                ..
            } = t
            {
                if loop_arc == radius_arc {
                    continue;
                }
                for &(oi, _) in occ.get(&Side::Arc(radius_arc.clone())).into_iter().flatten() {
                    if oi != ti {
                        out.push(Diagnostic::RadiusOutsideItsTriangle {
                            arc: radius_arc.clone(),
                            triangle: self.triangles[oi].name().to_string(),
                        });
                    }
                }
                let elsewhere: Vec<usize> = occ
                    .get(&Side::Arc(loop_arc.clone()))
                    .into_iter()
                    .flatten()
                    .map(|&(oi, _)| oi)
                    .filter(|&oi| oi != ti)
                    .collect();
                let ok = elsewhere.len() == 1 && !self.triangles[elsewhere[0]].is_self_folded();
                if !ok {
                    out.push(Diagnostic::LoopMisplaced {
                        arc: loop_arc.clone(),
                    });
                }
            }
        }

        if self.boundary_segments.is_empty() {
            out.push(Diagnostic::NoBoundary);
        }
        if !out.is_empty() {
            return out;
        }

        let comps = self.triangle_components(&occ);
        if comps > 1 {
            out.push(Diagnostic::Disconnected { components: comps });
            return out;
        }

        let corners = self.corner_classes(&occ);
        for class in corners.classes() {
            let on_boundary = class.iter().any(|&(ti, ci)| corners.touches_boundary(ti, ci));
            if on_boundary {
                continue;
            }
            let enclosed = class.len() == 1 && {
                let (ti, ci) = class[0];
                self.triangles[ti].is_self_folded() && ci == 1
            };
            if !enclosed {
                out.push(Diagnostic::UnenclosedPuncture {
                    corners: class
                        .iter()
                        .map(|&(ti, ci)| format!("{}#{}", self.triangles[ti].name(), ci))
                        .collect(),
                });
            }
        }
        out
    }

    fn triangle_components(&self, occ: &BTreeMap<Side, Vec<Slot>>) -> usize {
        let n = self.triangles.len();
        let mut adj = vec![Vec::new(); n];
        for (side, slots) in occ {
            if let (Side::Arc(_), [a, b]) = (side, slots.as_slice()) {
                adj[a.0].push(b.0);
                adj[b.0].push(a.0);
            }
        }
        let mut seen = vec![false; n];
        let mut comps = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            comps += 1;
            let mut queue = VecDeque::from([s]);
            seen[s] = true;
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        comps
    }

    fn corner_classes(&self, occ: &BTreeMap<Side, Vec<Slot>>) -> Corners {
        let n = self.triangles.len();
        let mut uf = UnionFind::new(3 * n);
        let idx = |ti: usize, ci: usize| 3 * ti + ci % 3;
        let mut boundary = vec![false; 3 * n];
        for (side, slots) in occ {
            match (side, slots.as_slice()) {
                (Side::Arc(_), [(t1, s1), (t2, s2)]) => {
                    // side s runs clockwise from corner s-1 to corner s
                    uf.union(idx(*t1, s1 + 2), idx(*t2, *s2));
                    uf.union(idx(*t1, *s1), idx(*t2, s2 + 2));
                }
                (Side::Segment(_), [(t, s)]) => {
                    boundary[idx(*t, s + 2)] = true;
                    boundary[idx(*t, *s)] = true;
                }
                _ => {}
            }
        }
        let mut classes: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        let mut class_boundary: BTreeMap<usize, bool> = BTreeMap::new();
        for ti in 0..n {
            for ci in 0..3 {
                let r = uf.find(idx(ti, ci));
                classes.entry(r).or_default().push((ti, ci));
                *class_boundary.entry(r).or_default() |= boundary[idx(ti, ci)];
            }
        }
        Corners {
            uf,
            classes,
            class_boundary,
        }
    }

    /// Genus, boundary components, punctures and marked points.
    pub fn surface_summary(&self) -> Result<SurfaceSummary> {
        let diags = self.validate();
        if !diags.is_empty() {
            return Err(Error::InvalidTriangulation(diags));
        }
        let occ = self.occurrences();
        let mut corners = self.corner_classes(&occ);
        let vertices = corners.classes.len() as i64;
        let edges = (self.arcs.len() + self.boundary_segments.len()) as i64;
        let faces = self.triangles.len() as i64;
        let chi = vertices - edges + faces;

        // each boundary segment leaves one corner class and enters the next
        let mut starting_at: HashMap<usize, usize> = HashMap::new();
        let mut ending_at = Vec::new();
        for (i, s) in self.boundary_segments.iter().enumerate() {
            let (t, k) = occ[&Side::Segment(s.clone())][0];
            starting_at.insert(corners.uf.find(3 * t + (k + 2) % 3), i);
            ending_at.push(corners.uf.find(3 * t + k));
        }
        let mut visited = vec![false; self.boundary_segments.len()];
        let mut components = Vec::new();
        for i in 0..self.boundary_segments.len() {
            if visited[i] {
                continue;
            }
            let mut len = 0;
            let mut cur = i;
            while !visited[cur] {
                visited[cur] = true;
                len += 1;
                cur = starting_at[&ending_at[cur]];
            }
            components.push(len);
        }
        components.sort_unstable_by(|a, b| b.cmp(a));
        let b = components.len() as i64;
        let genus = (2 - b - chi) / 2;
        let punctures = self.triangles.iter().filter(|t| t.is_self_folded()).count();
        Ok(SurfaceSummary {
            genus: genus.max(0) as usize,
            boundary_components: components,
            punctures,
            marked_points: self.boundary_segments.len(),
        })
    }

    /// The dual graph: one vertex per triangle and per boundary segment,
    /// one edge per arc and per boundary segment. Radii become loops.
    pub fn dual_graph(&self) -> Result<DualGraph> {
        let diags = self.validate();
        if !diags.is_empty() {
            return Err(Error::InvalidTriangulation(diags));
        }
        let mut b = RibbonGraphBuilder::new();
        let tri_v: Vec<VertexId> = self
            .triangles
            .iter()
            .map(|t| b.add_vertex(format!("t:{}", t.name())))
            .collect();
        let mut slot_dart: HashMap<Slot, DartId> = HashMap::new();
        let mut edge_kind = Vec::new();
        let mut vertex_kind: Vec<VertexKind> = self
            .triangles
            .iter()
            .map(|t| VertexKind::Triangle(t.name().to_string()))
            .collect();
        for (side, slots) in self.occurrences() {
            match (&side, slots.as_slice()) {
                (Side::Arc(a), [s1, s2]) => {
                    let (_, d1, d2) = b.add_edge(format!("a:{a}"), tri_v[s1.0], tri_v[s2.0]);
                    slot_dart.insert(*s1, d1);
                    slot_dart.insert(*s2, d2);
                    edge_kind.push(EdgeKind::Arc(a.clone()));
                }
                (Side::Segment(s), [s1]) => {
                    let sv = b.add_vertex(format!("s:{s}"));
                    vertex_kind.push(VertexKind::Segment(s.clone()));
                    let (_, _, d) = b.add_edge(format!("b:{s}"), sv, tri_v[s1.0]);
                    slot_dart.insert(*s1, d);
                    edge_kind.push(EdgeKind::Boundary(s.clone()));
                }
                _ => unreachable!("validated"),
            }
        }
        for (ti, &v) in tri_v.iter().enumerate() {
            b.set_rotation(v, (0..3).map(|si| slot_dart[&(ti, si)]).collect());
        }
        Ok(DualGraph {
            graph: b.build()?,
            edge_kind,
            vertex_kind,
        })
    }

    /// The leafy dual graph: the dual graph with every radius loop split
    /// into two edges through a new trivalent vertex carrying a leaf.
    pub fn leafy_dual_graph(&self) -> Result<LeafyDualGraph> {
        let diags = self.validate();
        if !diags.is_empty() {
            return Err(Error::InvalidTriangulation(diags));
        }
        let mut b = RibbonGraphBuilder::new();
        let mut vertex_kind = Vec::new();
        let tri_v: Vec<VertexId> = self
            .triangles
            .iter()
            .map(|t| {
                vertex_kind.push(VertexKind::Triangle(t.name().to_string()));
                b.add_vertex(format!("t:{}", t.name()))
            })
            .collect();
        let mut slot_dart: HashMap<Slot, DartId> = HashMap::new();
        let mut edge_kind = Vec::new();
        let mut w_rotation = Vec::new();
        let mut self_folded = Vec::new();
        let radii: BTreeSet<&str> = self
            .triangles
            .iter()
            .filter_map(|t| match t {
                Triangle::SelfFolded { radius_arc, .. } => Some(radius_arc.as_str()),
                _ => None,
            })
            .collect();

        for (side, slots) in self.occurrences() {
            match (&side, slots.as_slice()) {
                (Side::Arc(a), _) if radii.contains(a.as_str()) => {}
                (Side::Arc(a), [s1, s2]) => {
                    let (_, d1, d2) = b.add_edge(format!("a:{a}"), tri_v[s1.0], tri_v[s2.0]);
                    slot_dart.insert(*s1, d1);
                    slot_dart.insert(*s2, d2);
                    edge_kind.push(EdgeKind::Arc(a.clone()));
                }
                (Side::Segment(s), [s1]) => {
                    let sv = b.add_vertex(format!("s:{s}"));
                    vertex_kind.push(VertexKind::Segment(s.clone()));
                    let (_, _, d) = b.add_edge(format!("b:{s}"), sv, tri_v[s1.0]);
                    slot_dart.insert(*s1, d);
                    edge_kind.push(EdgeKind::Boundary(s.clone()));
                }
                _ => unreachable!("validated"),
            }
        }
        for (ti, t) in self.triangles.iter().enumerate() {
            let Triangle::SelfFolded { name, loop_arc, .. } = t else {
                continue;
            };
            let w = b.add_vertex(format!("w:{name}"));
            vertex_kind.push(VertexKind::W(name.clone()));
            let z = b.add_vertex(format!("z:{name}"));
            vertex_kind.push(VertexKind::Z(name.clone()));
            let (e1, t1, w1) = b.add_edge(format!("eta1:{name}"), tri_v[ti], w);
            edge_kind.push(EdgeKind::Eta(name.clone(), 1));
            let (e2, t2, w2) = b.add_edge(format!("eta2:{name}"), tri_v[ti], w);
            edge_kind.push(EdgeKind::Eta(name.clone(), 2));
            let (l, wl, _) = b.add_edge(format!("leaf:{name}"), w, z);
            edge_kind.push(EdgeKind::Leaf(name.clone()));
            slot_dart.insert((ti, 1), t1);
            slot_dart.insert((ti, 2), t2);
            w_rotation.push((w, vec![w1, wl, w2]));
            self_folded.push(SelfFoldedCluster {
                name: name.clone(),
                loop_arc: loop_arc.clone(),
                triangle: tri_v[ti],
                w,
                z,
                eta: [e1, e2],
                leaf: l,
                loop_edge: EdgeId(u32::MAX),
            });
        }
        for (ti, &v) in tri_v.iter().enumerate() {
            b.set_rotation(v, (0..3).map(|si| slot_dart[&(ti, si)]).collect());
        }
        for (w, rot) in w_rotation {
            b.set_rotation(w, rot);
        }
        let graph = b.build()?;
        for c in &mut self_folded {
            c.loop_edge = graph.edge_by_label(&format!("a:{}", c.loop_arc))?;
        }
        let mut eta_of = vec![None; graph.edge_count()];
        for (ci, c) in self_folded.iter().enumerate() {
            eta_of[c.eta[0].index()] = Some((ci as u32, 1u8));
            eta_of[c.eta[1].index()] = Some((ci as u32, 2u8));
        }
        let mut cluster_at = vec![None; graph.vertex_count()];
        for (ci, c) in self_folded.iter().enumerate() {
            cluster_at[c.triangle.index()] = Some(ci as u32);
        }
        Ok(LeafyDualGraph {
            graph,
            edge_kind,
            vertex_kind,
            self_folded,
            eta_of,
            cluster_at,
        })
    }
}

struct Corners {
    uf: UnionFind,
    classes: BTreeMap<usize, Vec<(usize, usize)>>,
    class_boundary: BTreeMap<usize, bool>,
}

impl Corners {
    fn classes(&self) -> impl Iterator<Item = &Vec<(usize, usize)>> {
        self.classes.values()
    }

    fn touches_boundary(&self, ti: usize, ci: usize) -> bool {
        let mut uf = self.uf.clone();
        self.class_boundary[&uf.find(3 * ti + ci)]
    }
}

#[derive(Debug, Clone)]
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// What a dual-graph edge stands for.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Arc(String),
    Boundary(String),
    /// One half of a split radius loop: self-folded triangle and index 1 or 2.
    Eta(String, u8),
    Leaf(String),
}

/// What a dual-graph vertex stands for.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Triangle(String),
    Segment(String),
    W(String),
    Z(String),
}

/// The dual graph, where each radius is a loop at its self-folded triangle.
#[derive(Debug, Clone)]
pub struct DualGraph {
    pub graph: RibbonGraph,
    pub edge_kind: Vec<EdgeKind>,
    pub vertex_kind: Vec<VertexKind>,
}

/// The vertices and edges added around one self-folded triangle.
#[derive(Debug, Clone)]
pub struct SelfFoldedCluster {
    pub name: String,
    pub loop_arc: String,
    pub triangle: VertexId,
    pub w: VertexId,
    pub z: VertexId,
    pub eta: [EdgeId; 2],
    pub leaf: EdgeId,
    /// The dual of the enclosing loop arc.
    pub loop_edge: EdgeId,
}

/// The leafy dual graph together with the meaning of its cells.
#[derive(Debug, Clone)]
pub struct LeafyDualGraph {
    pub graph: RibbonGraph,
    pub edge_kind: Vec<EdgeKind>,
    pub vertex_kind: Vec<VertexKind>,
    pub self_folded: Vec<SelfFoldedCluster>,
    eta_of: Vec<Option<(u32, u8)>>,
    cluster_at: Vec<Option<u32>>,
}

impl LeafyDualGraph {
    /// Cluster index and η index (1 or 2) if `e` is an η edge.
    #[inline]
    pub fn eta(&self, e: EdgeId) -> Option<(usize, u8)> {
        self.eta_of[e.index()].map(|(c, i)| (c as usize, i))
    }

    /// Cluster index if `u` is the vertex of a self-folded triangle.
    pub fn cluster_at(&self, u: VertexId) -> Option<usize> {
        self.cluster_at[u.index()].map(|c| c as usize)
    }

    pub fn cluster_by_name(&self, name: &str) -> Option<usize> {
        self.self_folded.iter().position(|c| c.name == name)
    }

    pub fn is_leaf(&self, e: EdgeId) -> bool {
        matches!(self.edge_kind[e.index()], EdgeKind::Leaf(_))
    }

    /// Whether `u` is a vertex of the dual graph other than a self-folded triangle.
    pub fn is_endpoint(&self, u: VertexId) -> bool {
        match &self.vertex_kind[u.index()] {
            VertexKind::Segment(_) => true,
            VertexKind::Triangle(_) => self.cluster_at(u).is_none(),
            _ => false,
        }
    }

    /// Whether `u` is a boundary-segment vertex.
    pub fn is_basepoint(&self, u: VertexId) -> bool {
        matches!(self.vertex_kind[u.index()], VertexKind::Segment(_))
    }

    pub fn basepoints(&self) -> Vec<VertexId> {
        self.graph.vertices().filter(|&u| self.is_basepoint(u)).collect()
    }

    pub fn endpoints(&self) -> Vec<VertexId> {
        self.graph.vertices().filter(|&u| self.is_endpoint(u)).collect()
    }

    /// Collapses every leaf cluster back into a loop, recovering the
    /// dual graph's edge list and rotations as labelled data:
    /// `(vertex label, clockwise edge labels)` sorted by vertex label.
    pub fn collapse(&self) -> Vec<(String, Vec<String>)> {
        let g = &self.graph;
        let mut out = Vec::new();
        for u in g.vertices() {
            if matches!(self.vertex_kind[u.index()], VertexKind::W(_) | VertexKind::Z(_)) {
                continue;
            }
            let labels = g
                .edges_at(u)
                .into_iter()
                .map(|e| match &self.edge_kind[e.index()] {
                    EdgeKind::Eta(v, _) => format!("radius:{v}"),
                    _ => g.edge_label(e).to_string(),
                })
                .collect();
            out.push((g.vertex_label(u).to_string(), labels));
        }
        out.sort();
        out
    }
}

impl DualGraph {
    /// Same shape as [`LeafyDualGraph::collapse`], with radius loops renamed
    /// `radius:<triangle>` so both sides are comparable.
    pub fn labelled_rotations(&self, t: &Triangulation) -> Vec<(String, Vec<String>)> {
        let radius_of: HashMap<&str, &str> = t
            .triangles
            .iter()
            .filter_map(|tr| match tr {
                Triangle::SelfFolded {
                    name, radius_arc, ..
                } => Some((radius_arc.as_str(), name.as_str())),
                _ => None,
            })
            .collect();
        let g = &self.graph;
        let mut out: Vec<(String, Vec<String>)> = g
            .vertices()
            .map(|u| {
                let labels = g
                    .edges_at(u)
                    .into_iter()
                    .map(|e| match &self.edge_kind[e.index()] {
                        EdgeKind::Arc(a) if radius_of.contains_key(a.as_str()) => {
                            format!("radius:{}", radius_of[a.as_str()])
                        }
                        _ => g.edge_label(e).to_string(),
                    })
                    .collect();
                (g.vertex_label(u).to_string(), labels)
            })
            .collect();
        out.sort();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ribbon::TurnSign;

    fn seg(s: &str) -> Side {
        Side::Segment(s.into())
    }

    fn arc(s: &str) -> Side {
        Side::Arc(s.into())
    }

    fn single_triangle() -> Triangulation {
        Triangulation::new(
            vec![],
            vec!["s1".into(), "s2".into(), "s3".into()],
            vec![Triangle::Ordinary {
                name: "T".into(),
                sides: [seg("s1"), seg("s2"), seg("s3")],
            }],
        )
        .unwrap()
    }

    fn once_punctured_triangle() -> Triangulation {
        Triangulation::new(
            vec!["l".into(), "r".into()],
            vec!["s1".into(), "s2".into()],
            vec![
                Triangle::Ordinary {
                    name: "T".into(),
                    sides: [arc("l"), seg("s1"), seg("s2")],
                },
                Triangle::SelfFolded {
                    name: "v".into(),
                    loop_arc: "l".into(),
                    radius_arc: "r".into(),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn disc_is_valid() {
        let t = single_triangle();
        let s = t.surface_summary().unwrap();
        assert_eq!(s.genus, 0);
        assert_eq!(s.boundary_components, vec![3]);
        assert_eq!(s.punctures, 0);
        let d = t.dual_graph().unwrap();
        assert_eq!(d.graph.vertex_count(), 4);
        let tv = d.graph.vertex_by_label("t:T").unwrap();
        assert_eq!(d.graph.valency(tv).unwrap(), 3);
        let l = t.leafy_dual_graph().unwrap();
        assert_eq!(l.collapse(), d.labelled_rotations(&t));
    }

    #[test]
    fn arc_used_three_times() {
        let t = Triangulation {
            arcs: vec!["x".into()],
            boundary_segments: vec!["s1".into(), "s2".into(), "s3".into(), "s4".into()],
            triangles: vec![
                Triangle::Ordinary {
                    name: "A".into(),
                    sides: [arc("x"), seg("s1"), seg("s2")],
                },
                Triangle::Ordinary {
                    name: "B".into(),
                    sides: [arc("x"), seg("s3"), arc("x")],
                },
            ],
        };
        let d = t.validate();
        assert!(d.contains(&Diagnostic::ArcMultiplicity {
            arc: "x".into(),
            count: 3
        }));
    }

    #[test]
    fn punctured_disc_dual_and_leafy() {
        let t = once_punctured_triangle();
        let s = t.surface_summary().unwrap();
        assert_eq!((s.genus, s.punctures), (0, 1));
        assert_eq!(s.boundary_components, vec![2]);

        let d = t.dual_graph().unwrap();
        let loops = d.graph.loop_diagnostics();
        assert_eq!(loops.len(), 1);
        let v = d.graph.vertex_by_label("t:v").unwrap();
        let r = d.graph.edge_by_label("a:r").unwrap();
        assert!(d.graph.is_loop(r));
        assert_eq!(d.graph.endpoints(r).0, v);

        let l = t.leafy_dual_graph().unwrap();
        let g = &l.graph;
        assert!(g.validate().is_empty());
        assert!(g.loop_diagnostics().is_empty());
        assert_eq!(g.vertex_count(), d.graph.vertex_count() + 2);
        assert_eq!(g.edge_count(), d.graph.edge_count() + 2);
        let trivalent = g.vertices().filter(|&u| g.valency(u).unwrap() == 3).count();
        assert_eq!(trivalent, 3);
        let w = g.vertex_by_label("w:v").unwrap();
        let z = g.vertex_by_label("z:v").unwrap();
        assert_eq!(g.valency(z).unwrap(), 1);
        let e1 = g.edge_by_label("eta1:v").unwrap();
        let e2 = g.edge_by_label("eta2:v").unwrap();
        let leaf = g.edge_by_label("leaf:v").unwrap();
        assert_eq!(g.turn(e1, w, TurnSign::Plus).unwrap(), leaf);
        assert_eq!(g.turn(e1, w, TurnSign::Minus).unwrap(), e2);
        let tv = g.vertex_by_label("t:v").unwrap();
        let la = g.edge_by_label("a:l").unwrap();
        assert_eq!(g.turn(la, tv, TurnSign::Plus).unwrap(), e1);
        assert_eq!(l.collapse(), d.labelled_rotations(&t));
        assert!(!l.is_endpoint(tv));
        assert!(!l.is_endpoint(w));
        assert!(l.is_endpoint(g.vertex_by_label("t:T").unwrap()));
    }

    #[test]
    fn unenclosed_puncture_is_rejected() {
        // two triangles glued along all three sides except one boundary
        // segment would leave an interior vertex that is not enclosed
        let t = Triangulation {
            arcs: vec!["x".into(), "y".into()],
            boundary_segments: vec!["s1".into(), "s2".into()],
            triangles: vec![
                Triangle::Ordinary {
                    name: "A".into(),
                    sides: [arc("x"), arc("y"), seg("s1")],
                },
                Triangle::Ordinary {
                    name: "B".into(),
                    sides: [arc("y"), arc("x"), seg("s2")],
                },
            ],
        };
        let d = t.validate();
        assert!(
            d.iter()
                .any(|x| matches!(x, Diagnostic::UnenclosedPuncture { .. })),
            "{d:?}"
        );
    }

    #[test]
    fn misplaced_radius_and_loop() {
        let t = Triangulation {
            arcs: vec!["l".into(), "r".into()],
            boundary_segments: vec!["s1".into()],
            triangles: vec![
                Triangle::Ordinary {
                    name: "T".into(),
                    sides: [arc("l"), seg("s1"), arc("r")],
                },
                Triangle::SelfFolded {
                    name: "v".into(),
                    loop_arc: "l".into(),
                    radius_arc: "r".into(),
                },
            ],
        };
        let d = t.validate();
        assert!(d
            .iter()
            .any(|x| matches!(x, Diagnostic::RadiusOutsideItsTriangle { .. })));
        assert!(d
            .iter()
            .any(|x| matches!(x, Diagnostic::ArcMultiplicity { count: 3, .. })));
    }

    #[test]
    fn annulus_fixture() {
        let t = fixtures::annulus();
        assert!(t.validate().is_empty(), "{:?}", t.validate());
        let s = t.surface_summary().unwrap();
        assert_eq!(s.genus, 0);
        assert_eq!(s.boundary_components, vec![3, 1]);
        assert_eq!(s.punctures, 3);
        let l = t.leafy_dual_graph().unwrap();
        assert!(l.graph.validate().is_empty());
        assert!(l.graph.loop_diagnostics().is_empty());
        let d = t.dual_graph().unwrap();
        assert_eq!(l.collapse(), d.labelled_rotations(&t));
        for e in l.graph.edges() {
            let (a, b) = l.graph.endpoints(e);
            assert!(l.graph.valency(a).unwrap() == 3 || l.graph.valency(b).unwrap() == 3);
        }
    }
}

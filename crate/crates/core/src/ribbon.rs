//! Dart-based ribbon graphs.
//!
//! A ribbon graph is a graph together with a cyclic order of the darts
//! (half-edges) at every vertex. The stored order is read as clockwise.
//! The turn operators pick, at a trivalent vertex, the edge following or
//! preceding a given edge in that order.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Index of a vertex inside a [`RibbonGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VertexId(pub u32);

/// Index of an edge inside a [`RibbonGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EdgeId(pub u32);

/// Index of a dart (half-edge) inside a [`RibbonGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DartId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl DartId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A half-edge: one end of an edge, attached to a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dart {
    pub id: DartId,
    pub vertex: VertexId,
    pub edge: EdgeId,
}

/// Direction of a turn at a trivalent vertex.
///
/// `Plus` moves to the edge that follows the current one in the clockwise
/// rotation, `Minus` to the one that precedes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TurnSign {
    Plus,
    Minus,
}

impl TurnSign {
    pub fn negate(self) -> TurnSign {
        match self {
            TurnSign::Plus => TurnSign::Minus,
            TurnSign::Minus => TurnSign::Plus,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            TurnSign::Plus => '+',
            TurnSign::Minus => '-',
        }
    }
}

impl std::ops::Neg for TurnSign {
    type Output = TurnSign;

    fn neg(self) -> TurnSign {
        self.negate()
    }
}

impl fmt::Display for TurnSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A violated ribbon-graph invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    /// The edge involution maps a dart to itself.
    InvolutionFixedPoint { dart: u32 },
    /// Applying the involution twice does not return the dart.
    InvolutionNotInvolutive { dart: u32 },
    /// A dart is paired with a dart of a different edge.
    InvolutionCrossesEdges { dart: u32, partner: u32 },
    /// An edge does not own exactly two darts.
    EdgeDartCount { edge: String, count: usize },
    /// A dart refers to a vertex or edge that does not exist.
    DanglingDart { dart: u32 },
    /// A dart attached to a vertex is missing from its rotation.
    DartNotInRotation { dart: u32, vertex: String },
    /// A rotation lists a dart attached to a different vertex.
    ForeignDartInRotation { dart: u32, vertex: String },
    /// A rotation lists a dart more than once.
    RepeatedDartInRotation { dart: u32, vertex: String },
    /// Two vertices share a display label.
    DuplicateVertexLabel { label: String },
    /// Two edges share a display label.
    DuplicateEdgeLabel { label: String },
    /// Both darts of an edge sit at the same vertex.
    Loop { edge: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::InvolutionFixedPoint { dart } => {
                write!(f, "involution has fixed point at dart {dart}")
            }
            Diagnostic::InvolutionNotInvolutive { dart } => {
                write!(f, "involution is not an involution at dart {dart}")
            }
            Diagnostic::InvolutionCrossesEdges { dart, partner } => {
                write!(f, "darts {dart} and {partner} are paired but belong to different edges")
            }
            Diagnostic::EdgeDartCount { edge, count } => {
                write!(f, "edge `{edge}` has {count} darts, expected 2")
            }
            Diagnostic::DanglingDart { dart } => {
                write!(f, "dart {dart} refers to a missing vertex or edge")
            }
            Diagnostic::DartNotInRotation { dart, vertex } => {
                write!(f, "dart {dart} is missing from the rotation at `{vertex}`")
            }
            Diagnostic::ForeignDartInRotation { dart, vertex } => {
                write!(f, "rotation at `{vertex}` lists dart {dart} attached elsewhere")
            }
            Diagnostic::RepeatedDartInRotation { dart, vertex } => {
                write!(f, "rotation at `{vertex}` lists dart {dart} more than once")
            }
            Diagnostic::DuplicateVertexLabel { label } => {
                write!(f, "vertex label `{label}` is used twice")
            }
            Diagnostic::DuplicateEdgeLabel { label } => {
                write!(f, "edge label `{label}` is used twice")
            }
            Diagnostic::Loop { edge } => write!(f, "edge `{edge}` is a loop"),
        }
    }
}

/// A graph with a rotation system, stored dart by dart.
///
/// Values are immutable once built. Construct valid graphs through
/// [`RibbonGraphBuilder`]; [`RibbonGraph::from_parts`] accepts arbitrary
/// (possibly broken) data so that [`RibbonGraph::validate`] can inspect it.
#[derive(Debug, Clone)]
pub struct RibbonGraph {
    vertex_labels: Vec<String>,
    edge_labels: Vec<String>,
    darts: Vec<Dart>,
    involution: Vec<DartId>,
    rotation: Vec<Vec<DartId>>,
    vertex_index: HashMap<String, VertexId>,
    edge_index: HashMap<String, EdgeId>,
    // position of every dart inside the rotation of its vertex
    rot_pos: Vec<usize>,
    // the darts of each edge, in insertion order
    edge_darts: Vec<Vec<DartId>>,
    // position of each edge in the lexicographic order of edge labels
    edge_rank: Vec<u32>,
}

impl RibbonGraph {
    /// Assembles a graph from raw parts without checking any invariant.
    ///
    /// `darts[i].id` must equal `i`; everything else may be inconsistent.
    pub fn from_parts(
        vertex_labels: Vec<String>,
        edge_labels: Vec<String>,
        darts: Vec<Dart>,
        involution: Vec<DartId>,
        rotation: Vec<Vec<DartId>>,
    ) -> RibbonGraph {
        let mut vertex_index = HashMap::new();
        for (i, l) in vertex_labels.iter().enumerate() {
            vertex_index.entry(l.clone()).or_insert(VertexId(i as u32));
        }
        let mut edge_index = HashMap::new();
        for (i, l) in edge_labels.iter().enumerate() {
            edge_index.entry(l.clone()).or_insert(EdgeId(i as u32));
        }
        let mut rot_pos = vec![usize::MAX; darts.len()];
        for cycle in &rotation {
            for (p, d) in cycle.iter().enumerate() {
                if let Some(slot) = rot_pos.get_mut(d.index()) {
                    *slot = p;
                }
            }
        }
        let mut edge_darts = vec![Vec::new(); edge_labels.len()];
        for d in &darts {
            if let Some(list) = edge_darts.get_mut(d.edge.index()) {
                list.push(d.id);
            }
        }
        let mut order: Vec<usize> = (0..edge_labels.len()).collect();
        order.sort_by(|&a, &b| edge_labels[a].cmp(&edge_labels[b]).then(a.cmp(&b)));
        let mut edge_rank = vec![0; edge_labels.len()];
        for (r, &e) in order.iter().enumerate() {
            edge_rank[e] = r as u32;
        }
        RibbonGraph {
            vertex_labels,
            edge_labels,
            darts,
            involution,
            rotation,
            vertex_index,
            edge_index,
            rot_pos,
            edge_darts,
            edge_rank,
        }
    }

    /// Checks every structural invariant and lists the violations.
    ///
    /// Loops are allowed here; see [`RibbonGraph::loop_diagnostics`].
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let nv = self.vertex_labels.len();
        let ne = self.edge_labels.len();
        let nd = self.darts.len();

        let mut seen = HashMap::new();
        for l in &self.vertex_labels {
            if seen.insert(l.as_str(), ()).is_some() {
                out.push(Diagnostic::DuplicateVertexLabel { label: l.clone() });
            }
        }
        seen.clear();
        for l in &self.edge_labels {
            if seen.insert(l.as_str(), ()).is_some() {
                out.push(Diagnostic::DuplicateEdgeLabel { label: l.clone() });
            }
        }

        for (i, d) in self.darts.iter().enumerate() {
            if d.id.index() != i || d.vertex.index() >= nv || d.edge.index() >= ne {
                out.push(Diagnostic::DanglingDart { dart: i as u32 });
            }
        }

        for i in 0..nd {
            let Some(&p) = self.involution.get(i) else {
                out.push(Diagnostic::InvolutionFixedPoint { dart: i as u32 });
                continue;
            };
            if p.index() == i {
                out.push(Diagnostic::InvolutionFixedPoint { dart: i as u32 });
            } else if p.index() >= nd || self.involution.get(p.index()).map(|q| q.index()) != Some(i)
            {
                out.push(Diagnostic::InvolutionNotInvolutive { dart: i as u32 });
            } else if self.darts[i].edge != self.darts[p.index()].edge {
                out.push(Diagnostic::InvolutionCrossesEdges {
                    dart: i as u32,
                    partner: p.0,
                });
            }
        }

        for (e, ds) in self.edge_darts.iter().enumerate() {
            if ds.len() != 2 {
                out.push(Diagnostic::EdgeDartCount {
                    edge: self.edge_labels[e].clone(),
                    count: ds.len(),
                });
            }
        }

        let mut listed = vec![0usize; nd];
        for (v, cycle) in self.rotation.iter().enumerate() {
            let vlabel = self.vertex_labels.get(v).cloned().unwrap_or_default();
            for d in cycle {
                match self.darts.get(d.index()) {
                    Some(dart) if dart.vertex.index() == v => {
                        listed[d.index()] += 1;
                        if listed[d.index()] == 2 {
                            out.push(Diagnostic::RepeatedDartInRotation {
                                dart: d.0,
                                vertex: vlabel.clone(),
                            });
                        }
                    }
                    _ => out.push(Diagnostic::ForeignDartInRotation {
                        dart: d.0,
                        vertex: vlabel.clone(),
                    }),
                }
            }
        }
        for (i, d) in self.darts.iter().enumerate() {
            if listed[i] == 0 && d.vertex.index() < nv {
                out.push(Diagnostic::DartNotInRotation {
                    dart: i as u32,
                    vertex: self.vertex_labels[d.vertex.index()].clone(),
                });
            }
        }
        out
    }

    /// One diagnostic per loop edge.
    pub fn loop_diagnostics(&self) -> Vec<Diagnostic> {
        self.edges()
            .filter(|&e| self.is_loop(e))
            .map(|e| Diagnostic::Loop {
                edge: self.edge_label(e).to_string(),
            })
            .collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_labels.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_labels.len() as u32).map(VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edge_labels.len() as u32).map(EdgeId)
    }

    pub fn darts(&self) -> &[Dart] {
        &self.darts
    }

    pub fn dart(&self, d: DartId) -> Dart {
        self.darts[d.index()]
    }

    /// The other half of the edge containing `d`.
    pub fn partner(&self, d: DartId) -> DartId {
        self.involution[d.index()]
    }

    /// Clockwise dart order at `u`.
    pub fn rotation(&self, u: VertexId) -> &[DartId] {
        &self.rotation[u.index()]
    }

    pub fn vertex_label(&self, u: VertexId) -> &str {
        &self.vertex_labels[u.index()]
    }

    pub fn edge_label(&self, e: EdgeId) -> &str {
        &self.edge_labels[e.index()]
    }

    /// Position of `e` when all edges are sorted by label.
    pub fn edge_rank(&self, e: EdgeId) -> u32 {
        self.edge_rank[e.index()]
    }

    pub fn vertex_by_label(&self, label: &str) -> Result<VertexId> {
        self.vertex_index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    pub fn edge_by_label(&self, label: &str) -> Result<EdgeId> {
        self.edge_index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownEdge(label.to_string()))
    }

    fn check_vertex(&self, u: VertexId) -> Result<()> {
        if u.index() < self.vertex_labels.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(format!("#{}", u.0)))
        }
    }

    /// Number of darts at `u`.
    pub fn valency(&self, u: VertexId) -> Result<usize> {
        self.check_vertex(u)?;
        Ok(self.rotation[u.index()].len())
    }

    /// Both endpoints of `e`, in dart order.
    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        let ds = &self.edge_darts[e.index()];
        (self.darts[ds[0].index()].vertex, self.darts[ds[1].index()].vertex)
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        let (a, b) = self.endpoints(e);
        a == b
    }

    pub fn is_incident(&self, e: EdgeId, u: VertexId) -> bool {
        let (a, b) = self.endpoints(e);
        a == u || b == u
    }

    /// The endpoint of `e` opposite to `u`, if `e` is incident to `u`.
    pub fn other_end(&self, e: EdgeId, u: VertexId) -> Option<VertexId> {
        let (a, b) = self.endpoints(e);
        if a == u {
            Some(b)
        } else if b == u {
            Some(a)
        } else {
            None
        }
    }

    /// The dart of `e` attached at `u`; fails for loops and non-incident edges.
    pub fn dart_at(&self, e: EdgeId, u: VertexId) -> Result<DartId> {
        let ds = &self.edge_darts[e.index()];
        let at: Vec<DartId> = ds
            .iter()
            .copied()
            .filter(|d| self.darts[d.index()].vertex == u)
            .collect();
        match at.len() {
            1 => Ok(at[0]),
            0 => Err(Error::EdgeNotAtVertex {
                edge: self.edge_label(e).to_string(),
                vertex: self.vertex_label(u).to_string(),
            }),
            _ => Err(Error::LoopAtVertex {
                edge: self.edge_label(e).to_string(),
                vertex: self.vertex_label(u).to_string(),
            }),
        }
    }

    /// Edges at `u` in clockwise order (a loop appears twice).
    pub fn edges_at(&self, u: VertexId) -> Vec<EdgeId> {
        self.rotation[u.index()]
            .iter()
            .map(|d| self.darts[d.index()].edge)
            .collect()
    }

    /// The edge reached from `e` by turning at the trivalent vertex `u`.
    ///
    /// `Plus` returns the edge after `e` in the clockwise rotation at `u`,
    /// `Minus` the edge before it.
    pub fn turn(&self, e: EdgeId, u: VertexId, s: TurnSign) -> Result<EdgeId> {
        self.check_vertex(u)?;
        if e.index() >= self.edge_labels.len() {
            return Err(Error::UnknownEdge(format!("#{}", e.0)));
        }
        let cycle = &self.rotation[u.index()];
        if cycle.len() != 3 {
            return Err(Error::NotTrivalent {
                vertex: self.vertex_label(u).to_string(),
                valency: cycle.len(),
            });
        }
        let d = self.dart_at(e, u)?;
        let p = self.rot_pos[d.index()];
        let q = match s {
            TurnSign::Plus => (p + 1) % 3,
            TurnSign::Minus => (p + 2) % 3,
        };
        Ok(self.darts[cycle[q].index()].edge)
    }

    /// The sign `s` with `turn(e, u, s) == f`, if any.
    pub fn turn_sign(&self, e: EdgeId, u: VertexId, f: EdgeId) -> Result<Option<TurnSign>> {
        if self.turn(e, u, TurnSign::Plus)? == f {
            Ok(Some(TurnSign::Plus))
        } else if self.turn(e, u, TurnSign::Minus)? == f {
            Ok(Some(TurnSign::Minus))
        } else {
            Ok(None)
        }
    }
}

/// Incremental construction of a [`RibbonGraph`].
///
/// Darts are created by [`add_edge`](Self::add_edge); the rotation at each
/// vertex defaults to dart creation order and can be overridden with
/// [`set_rotation`](Self::set_rotation).
#[derive(Debug, Default)]
pub struct RibbonGraphBuilder {
    vertex_labels: Vec<String>,
    edge_labels: Vec<String>,
    darts: Vec<Dart>,
    rotation: Vec<Vec<DartId>>,
}

impl RibbonGraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, label: impl Into<String>) -> VertexId {
        let id = VertexId(self.vertex_labels.len() as u32);
        self.vertex_labels.push(label.into());
        self.rotation.push(Vec::new());
        id
    }

    /// Adds an edge from `u` to `v`; returns the edge and its darts at `u` and `v`.
    pub fn add_edge(
        &mut self,
        label: impl Into<String>,
        u: VertexId,
        v: VertexId,
    ) -> (EdgeId, DartId, DartId) {
        let e = EdgeId(self.edge_labels.len() as u32);
        self.edge_labels.push(label.into());
        let du = DartId(self.darts.len() as u32);
        self.darts.push(Dart {
            id: du,
            vertex: u,
            edge: e,
        });
        let dv = DartId(self.darts.len() as u32);
        self.darts.push(Dart {
            id: dv,
            vertex: v,
            edge: e,
        });
        self.rotation[u.index()].push(du);
        self.rotation[v.index()].push(dv);
        (e, du, dv)
    }

    /// Replaces the clockwise dart order at `u`.
    pub fn set_rotation(&mut self, u: VertexId, order: Vec<DartId>) {
        self.rotation[u.index()] = order;
    }

    /// Finishes the graph and validates it.
    pub fn build(self) -> Result<RibbonGraph> {
        let involution = (0..self.darts.len() as u32).map(|d| DartId(d ^ 1)).collect();
        let g = RibbonGraph::from_parts(
            self.vertex_labels,
            self.edge_labels,
            self.darts,
            involution,
            self.rotation,
        );
        let diags = g.validate();
        if diags.is_empty() {
            Ok(g)
        } else {
            Err(Error::InvalidGraph(diags))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> (RibbonGraph, VertexId, [EdgeId; 3]) {
        let mut b = RibbonGraphBuilder::new();
        let u = b.add_vertex("u");
        let x = b.add_vertex("x");
        let y = b.add_vertex("y");
        let z = b.add_vertex("z");
        let (a, _, _) = b.add_edge("a", u, x);
        let (bb, _, _) = b.add_edge("b", u, y);
        let (c, _, _) = b.add_edge("c", u, z);
        (b.build().unwrap(), u, [a, bb, c])
    }

    #[test]
    fn minimal_graph_is_valid() {
        let mut b = RibbonGraphBuilder::new();
        let u = b.add_vertex("u");
        let v = b.add_vertex("v");
        b.add_edge("e", u, v);
        let g = b.build().unwrap();
        assert!(g.validate().is_empty());
        assert_eq!(g.valency(u).unwrap(), 1);
    }

    #[test]
    fn fixed_point_is_reported() {
        let darts = vec![
            Dart {
                id: DartId(0),
                vertex: VertexId(0),
                edge: EdgeId(0),
            },
            Dart {
                id: DartId(1),
                vertex: VertexId(1),
                edge: EdgeId(0),
            },
        ];
        let g = RibbonGraph::from_parts(
            vec!["u".into(), "v".into()],
            vec!["e".into()],
            darts,
            vec![DartId(0), DartId(1)],
            vec![vec![DartId(0)], vec![DartId(1)]],
        );
        let diags = g.validate();
        assert!(diags.contains(&Diagnostic::InvolutionFixedPoint { dart: 0 }));
        assert!(diags
            .iter()
            .any(|d| d.to_string().contains("involution has fixed point")));
    }

    #[test]
    fn broken_rotation_is_reported() {
        let darts = vec![
            Dart {
                id: DartId(0),
                vertex: VertexId(0),
                edge: EdgeId(0),
            },
            Dart {
                id: DartId(1),
                vertex: VertexId(1),
                edge: EdgeId(0),
            },
        ];
        let g = RibbonGraph::from_parts(
            vec!["u".into(), "u".into()],
            vec!["e".into()],
            darts,
            vec![DartId(1), DartId(0)],
            vec![vec![DartId(0), DartId(1)], vec![]],
        );
        let diags = g.validate();
        assert!(diags.contains(&Diagnostic::DuplicateVertexLabel { label: "u".into() }));
        assert!(diags
            .iter()
            .any(|d| matches!(d, Diagnostic::ForeignDartInRotation { dart: 1, .. })));
        assert!(diags
            .iter()
            .any(|d| matches!(d, Diagnostic::DartNotInRotation { dart: 1, .. })));
    }

    #[test]
    fn turn_follows_rotation() {
        let (g, u, [a, b, c]) = star();
        assert_eq!(g.turn(b, u, TurnSign::Plus).unwrap(), c);
        assert_eq!(g.turn(b, u, TurnSign::Minus).unwrap(), a);
        let t = g.turn(a, u, TurnSign::Plus).unwrap();
        assert_eq!(g.turn(t, u, TurnSign::Minus).unwrap(), a);
        assert_eq!(g.turn_sign(a, u, b).unwrap(), Some(TurnSign::Plus));
        assert_eq!(g.turn_sign(a, u, a).unwrap(), None);
    }

    #[test]
    fn turn_errors() {
        let (g, u, [a, _, _]) = star();
        let x = g.vertex_by_label("x").unwrap();
        assert!(matches!(
            g.turn(a, x, TurnSign::Plus),
            Err(Error::NotTrivalent { valency: 1, .. })
        ));
        let b = g.edge_by_label("b").unwrap();
        let _ = u;
        let mut bld = RibbonGraphBuilder::new();
        let p = bld.add_vertex("p");
        let q = bld.add_vertex("q");
        let r = bld.add_vertex("r");
        let s = bld.add_vertex("s");
        bld.add_edge("pq", p, q);
        bld.add_edge("pr", p, r);
        let (ps, _, _) = bld.add_edge("ps", p, s);
        let (qr, _, _) = bld.add_edge("qr", q, r);
        let _ = (ps, b);
        let g2 = bld.build().unwrap();
        assert!(matches!(
            g2.turn(qr, p, TurnSign::Plus),
            Err(Error::EdgeNotAtVertex { .. })
        ));
    }

    #[test]
    fn parallel_edges_and_loops() {
        let mut b = RibbonGraphBuilder::new();
        let x = b.add_vertex("x");
        let y = b.add_vertex("y");
        let z = b.add_vertex("z");
        let (e1, _, _) = b.add_edge("e1", x, y);
        let (e2, _, _) = b.add_edge("e2", x, y);
        let (l, _, _) = b.add_edge("l", y, z);
        let (o, _, _) = b.add_edge("o", x, x);
        let g = b.build().unwrap();
        assert!(g.validate().is_empty());
        assert_eq!(g.loop_diagnostics().len(), 1);
        assert!(g.is_loop(o));
        assert!(matches!(g.dart_at(o, x), Err(Error::LoopAtVertex { .. })));
        assert_eq!(g.turn(e1, y, TurnSign::Plus).unwrap(), e2);
        assert_eq!(g.turn(e2, y, TurnSign::Plus).unwrap(), l);
        assert_eq!(g.other_end(l, z), Some(y));
        assert_eq!(g.valency(x).unwrap(), 4);
    }
}

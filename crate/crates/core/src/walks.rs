//! Backtrack-free walks on a loop-free graph.
//!
//! A walk is a start vertex plus a sequence of edges. In a loop-free graph
//! the edges determine every intermediate vertex. Free reduction deletes
//! adjacent equal edges; its result, the standard form, does not depend on
//! the order of deletions.

use std::fmt;

use crate::error::{Error, Result};
use crate::ribbon::{EdgeId, RibbonGraph, TurnSign, VertexId};

/// A walk with a start and an end vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Walk {
    pub start: VertexId,
    pub end: VertexId,
    pub edges: Vec<EdgeId>,
}

impl Walk {
    /// The empty walk at `u`.
    pub fn identity(u: VertexId) -> Walk {
        Walk {
            start: u,
            end: u,
            edges: Vec::new(),
        }
    }

    /// Checks that `word` can be walked from `start`, without reducing it.
    pub fn from_word(g: &RibbonGraph, start: VertexId, word: &[EdgeId]) -> Result<Walk> {
        g.valency(start)?;
        let mut cur = start;
        for (i, &e) in word.iter().enumerate() {
            cur = step(g, cur, e, i + 1)?;
        }
        Ok(Walk {
            start,
            end: cur,
            edges: word.to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.start == self.end
    }

    /// The vertices `u_0, ..., u_n` visited by the walk.
    pub fn vertex_seq(&self, g: &RibbonGraph) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(self.edges.len() + 1);
        let mut cur = self.start;
        out.push(cur);
        for &e in &self.edges {
            cur = g.other_end(e, cur).expect("walk is consecutive");
            out.push(cur);
        }
        out
    }

    /// Position of the first backtrack (1-based index `l` with `e_l = e_{l-1}`).
    pub fn first_backtrack(&self) -> Option<usize> {
        self.edges.windows(2).position(|w| w[0] == w[1]).map(|p| p + 2)
    }

    pub fn is_backtrack_free(&self) -> bool {
        self.first_backtrack().is_none()
    }
}

fn step(g: &RibbonGraph, cur: VertexId, e: EdgeId, index: usize) -> Result<VertexId> {
    if e.index() >= g.edge_count() {
        return Err(Error::UnknownEdge(format!("#{}", e.0)));
    }
    g.other_end(e, cur).ok_or_else(|| Error::NonConsecutive {
        index,
        edge: g.edge_label(e).to_string(),
        vertex: g.vertex_label(cur).to_string(),
    })
}

/// Appends `e` to a reduced edge stack, cancelling it against the top if equal.
#[inline]
fn push_reduced(stack: &mut Vec<EdgeId>, e: EdgeId) {
    if stack.last() == Some(&e) {
        stack.pop();
    } else {
        stack.push(e);
    }
}

/// Free reduction of `word` read from `start`.
pub fn standard_form(g: &RibbonGraph, start: VertexId, word: &[EdgeId]) -> Result<Walk> {
    let w = Walk::from_word(g, start, word)?;
    Ok(reduce(w))
}

/// Free reduction of an already consecutive walk.
pub fn reduce(w: Walk) -> Walk {
    let mut stack = Vec::with_capacity(w.edges.len());
    for &e in &w.edges {
        push_reduced(&mut stack, e);
    }
    Walk {
        start: w.start,
        end: w.end,
        edges: stack,
    }
}

/// Standard form of the concatenation `f * h`.
pub fn compose(f: &Walk, h: &Walk) -> Result<Walk> {
    if f.end != h.start {
        return Err(Error::EndpointMismatch {
            left: format!("#{}", f.end.0),
            right: format!("#{}", h.start.0),
        });
    }
    let mut stack = Vec::with_capacity(f.len() + h.len());
    stack.extend_from_slice(&f.edges);
    for &e in &h.edges {
        push_reduced(&mut stack, e);
    }
    Ok(Walk {
        start: f.start,
        end: h.end,
        edges: stack,
    })
}

/// Like [`compose`], with labelled endpoints in the error.
pub fn compose_in(g: &RibbonGraph, f: &Walk, h: &Walk) -> Result<Walk> {
    compose(f, h).map_err(|_| Error::EndpointMismatch {
        left: g.vertex_label(f.end).to_string(),
        right: g.vertex_label(h.start).to_string(),
    })
}

/// The reversed walk.
pub fn invert(f: &Walk) -> Walk {
    let mut edges = f.edges.clone();
    edges.reverse();
    Walk {
        start: f.end,
        end: f.start,
        edges,
    }
}

/// Signs of the turns made by a walk.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignSequence(pub Vec<TurnSign>);

impl SignSequence {
    /// Whether two closed-walk sign sequences agree up to cyclic rotation.
    pub fn cyclically_equal(&self, other: &SignSequence) -> bool {
        let n = self.0.len();
        if n != other.0.len() {
            return false;
        }
        if n == 0 {
            return true;
        }
        (0..n).any(|k| (0..n).all(|i| self.0[(i + k) % n] == other.0[i]))
    }
}

impl fmt::Display for SignSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Sign of the turn from `e` into `next` at `u`.
fn sign_at(g: &RibbonGraph, e: EdgeId, u: VertexId, next: EdgeId) -> Result<TurnSign> {
    g.turn_sign(e, u, next)?.ok_or_else(|| Error::NonConsecutive {
        index: 0,
        edge: g.edge_label(next).to_string(),
        vertex: g.vertex_label(u).to_string(),
    })
}

/// Sign sequence of an open walk: one sign per interior vertex.
pub fn sign_sequence(g: &RibbonGraph, f: &Walk) -> Result<SignSequence> {
    if let Some(p) = f.first_backtrack() {
        return Err(Error::NotStandard(p));
    }
    let vs = f.vertex_seq(g);
    let mut out = Vec::with_capacity(f.len().saturating_sub(1));
    for j in 1..f.len() {
        out.push(sign_at(g, f.edges[j - 1], vs[j], f.edges[j])?);
    }
    Ok(SignSequence(out))
}

/// Sign sequence of a closed walk, including the turn from `e_n` into `e_1`.
pub fn closed_sign_sequence(g: &RibbonGraph, f: &Walk) -> Result<SignSequence> {
    let f = cyclic_reduce(g, f)?;
    let mut s = sign_sequence(g, &f)?;
    let n = f.len();
    s.0.push(sign_at(g, f.edges[n - 1], f.start, f.edges[0])?);
    Ok(s)
}

/// Rotates a closed walk so that it starts after its first `k` edges.
pub fn rotate(g: &RibbonGraph, f: &Walk, k: usize) -> Walk {
    debug_assert!(f.is_closed());
    let n = f.len();
    if n == 0 {
        return f.clone();
    }
    let k = k % n;
    let start = f.vertex_seq(g)[k];
    let mut edges = Vec::with_capacity(n);
    edges.extend_from_slice(&f.edges[k..]);
    edges.extend_from_slice(&f.edges[..k]);
    Walk {
        start,
        end: start,
        edges,
    }
}

/// A closed walk up to rotation, stored by its canonical rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClosedWalkClass {
    rep: Walk,
}

impl ClosedWalkClass {
    /// The class of a closed walk; the walk is cyclically reduced first.
    pub fn new(g: &RibbonGraph, f: &Walk) -> Result<ClosedWalkClass> {
        let w = cyclic_reduce(g, f)?;
        Ok(ClosedWalkClass {
            rep: canonical_rotation(g, &w),
        })
    }

    /// The canonical representative.
    pub fn representative(&self) -> &Walk {
        &self.rep
    }

    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rep.is_empty()
    }

    /// The class with the opposite orientation.
    pub fn reversed(&self, g: &RibbonGraph) -> ClosedWalkClass {
        ClosedWalkClass {
            rep: canonical_rotation(g, &invert(&self.rep)),
        }
    }

    /// The smaller of this class and its reversal; identifies a class with
    /// its opposite orientation.
    pub fn unoriented(&self, g: &RibbonGraph) -> ClosedWalkClass {
        let r = self.reversed(g);
        if rotation_key(g, &r.rep) < rotation_key(g, &self.rep) {
            r
        } else {
            self.clone()
        }
    }

    /// Whether `f` (any rotation) belongs to this class.
    pub fn contains(&self, g: &RibbonGraph, f: &Walk) -> bool {
        ClosedWalkClass::new(g, f).is_ok_and(|c| c == *self)
    }

    pub fn sign_sequence(&self, g: &RibbonGraph) -> Result<SignSequence> {
        closed_sign_sequence(g, &self.rep)
    }
}

/// Free and cyclic reduction of a closed walk, so that `e_1 != e_n`.
pub fn cyclic_reduce(g: &RibbonGraph, f: &Walk) -> Result<Walk> {
    if !f.is_closed() {
        return Err(Error::NotClosed {
            start: g.vertex_label(f.start).to_string(),
            end: g.vertex_label(f.end).to_string(),
        });
    }
    let w = reduce(f.clone());
    let n = w.len();
    let mut lo = 0;
    let mut hi = n;
    while hi - lo >= 2 && w.edges[lo] == w.edges[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    if lo == hi {
        return Err(Error::Contractible);
    }
    let mut cur = w.start;
    for &e in &w.edges[..lo] {
        cur = g.other_end(e, cur).expect("walk is consecutive");
    }
    Ok(Walk {
        start: cur,
        end: cur,
        edges: w.edges[lo..hi].to_vec(),
    })
}

fn rotation_key(g: &RibbonGraph, w: &Walk) -> (Vec<u32>, u32) {
    (
        w.edges.iter().map(|&e| g.edge_rank(e)).collect(),
        w.start.0,
    )
}

/// The rotation of a cyclically reduced closed walk with the least
/// (edge-label sequence, start vertex) key.
pub fn canonical_rotation(g: &RibbonGraph, w: &Walk) -> Walk {
    let n = w.len();
    let ranks: Vec<u32> = w.edges.iter().map(|&e| g.edge_rank(e)).collect();
    let vs = w.vertex_seq(g);
    let mut best = 0;
    for k in 1..n {
        let ord = (0..n)
            .map(|i| ranks[(k + i) % n].cmp(&ranks[(best + i) % n]))
            .find(|o| o.is_ne())
            .unwrap_or_else(|| vs[k].cmp(&vs[best]));
        if ord.is_lt() {
            best = k;
        }
    }
    rotate(g, w, best)
}

/// Parses `[<vertex>] <edge> <edge> ...`.
///
/// Without a leading vertex the start is the first endpoint of the first
/// edge from which the whole word can be walked.
pub fn parse_word(g: &RibbonGraph, text: &str) -> Result<(VertexId, Vec<EdgeId>)> {
    let mut tokens = text.split_whitespace().peekable();
    let mut start = None;
    if let Some(first) = tokens.peek() {
        if let Ok(v) = g.vertex_by_label(first) {
            start = Some(v);
            tokens.next();
        }
    }
    let edges = tokens
        .map(|t| g.edge_by_label(t))
        .collect::<Result<Vec<_>>>()?;
    let start = match start {
        Some(s) => s,
        None => {
            let first = *edges
                .first()
                .ok_or_else(|| Error::Parse("empty walk needs a start vertex".into()))?;
            let (a, b) = g.endpoints(first);
            if Walk::from_word(g, a, &edges).is_ok() {
                a
            } else {
                b
            }
        }
    };
    Walk::from_word(g, start, &edges)?;
    Ok((start, edges))
}

/// Parses a walk and brings it to standard form.
pub fn parse_walk(g: &RibbonGraph, text: &str) -> Result<Walk> {
    let (start, edges) = parse_word(g, text)?;
    standard_form(g, start, &edges)
}

/// Prints a walk as `<start> e1 ... en`.
pub fn format_walk(g: &RibbonGraph, w: &Walk) -> String {
    let mut s = g.vertex_label(w.start).to_string();
    for &e in &w.edges {
        s.push(' ');
        s.push_str(g.edge_label(e));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ribbon::RibbonGraphBuilder;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn three_edge() -> RibbonGraph {
        crate::fixtures::three_edge_graph()
    }

    /// A small graph with a cycle structure: K4 plus pendant vertices.
    fn k4() -> RibbonGraph {
        let mut b = RibbonGraphBuilder::new();
        let v: Vec<_> = (0..4).map(|i| b.add_vertex(format!("v{i}"))).collect();
        let names = ["a", "b", "c", "d", "e", "f"];
        let mut k = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                b.add_edge(names[k], v[i], v[j]);
                k += 1;
            }
        }
        b.build().unwrap()
    }

    fn e(g: &RibbonGraph, l: &str) -> EdgeId {
        g.edge_by_label(l).unwrap()
    }

    /// Every walk reachable by deleting adjacent equal pairs in any order,
    /// keeping only the irreducible ones.
    fn brute_force_reductions(word: &[EdgeId]) -> HashSet<Vec<EdgeId>> {
        let mut seen = HashSet::new();
        let mut finals = HashSet::new();
        let mut stack = vec![word.to_vec()];
        while let Some(w) = stack.pop() {
            if !seen.insert(w.clone()) {
                continue;
            }
            let mut reducible = false;
            for i in 0..w.len().saturating_sub(1) {
                if w[i] == w[i + 1] {
                    reducible = true;
                    let mut next = w.clone();
                    next.drain(i..i + 2);
                    stack.push(next);
                }
            }
            if !reducible {
                finals.insert(w);
            }
        }
        finals
    }

    fn random_word(g: &RibbonGraph, rng: &mut ChaCha8Rng, start: VertexId, len: usize) -> Vec<EdgeId> {
        let mut cur = start;
        let mut out = Vec::new();
        for _ in 0..len {
            let es = g.edges_at(cur);
            let e = es[rng.gen_range(0..es.len())];
            cur = g.other_end(e, cur).unwrap();
            out.push(e);
        }
        out
    }

    #[test]
    fn single_cancellation() {
        let g = three_edge();
        let u0 = g.vertex_by_label("u0").unwrap();
        let a = e(&g, "alpha");
        assert!(standard_form(&g, u0, &[a, a]).unwrap().is_identity());
    }

    #[test]
    fn generator_square() {
        let g = three_edge();
        let u0 = g.vertex_by_label("u0").unwrap();
        let (a, e1, e2) = (e(&g, "alpha"), e(&g, "eta1"), e(&g, "eta2"));
        let w = standard_form(&g, u0, &[a, e1, e2, a, a, e1, e2, a]).unwrap();
        assert_eq!(w.edges, vec![a, e1, e2, e1, e2, a]);
        let f = Walk::from_word(&g, u0, &[a, e1, e2, a]).unwrap();
        assert_eq!(compose(&f, &f).unwrap(), w);
    }

    #[test]
    fn hand_reduction_matches_brute_force() {
        let g = k4();
        let v0 = g.vertex_by_label("v0").unwrap();
        // a: v0-v1, d: v1-v2, e: v1-v3; walk a d d e e a b
        let word: Vec<EdgeId> = ["a", "d", "d", "e", "e", "a", "b"]
            .iter()
            .map(|l| e(&g, l))
            .collect();
        let w = standard_form(&g, v0, &word).unwrap();
        assert_eq!(w.edges, vec![e(&g, "b")]);
        let finals = brute_force_reductions(&word);
        assert_eq!(finals.len(), 1);
        assert!(finals.contains(&w.edges));
    }

    #[test]
    fn random_words_agree_with_brute_force() {
        let g = three_edge();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let start = VertexId(rng.gen_range(0..3));
            let len = rng.gen_range(0..14);
            let word = random_word(&g, &mut rng, start, len);
            let w = standard_form(&g, start, &word).unwrap();
            let finals = brute_force_reductions(&word);
            assert_eq!(finals.len(), 1);
            assert!(finals.contains(&w.edges));
            assert!(w.is_backtrack_free());
            assert_eq!(standard_form(&g, start, &w.edges).unwrap(), w);
        }
    }

    #[test]
    fn non_consecutive_word() {
        let g = k4();
        let v0 = g.vertex_by_label("v0").unwrap();
        assert!(matches!(
            standard_form(&g, v0, &[e(&g, "f")]),
            Err(Error::NonConsecutive { index: 1, .. })
        ));
    }

    #[test]
    fn groupoid_axioms() {
        let g = k4();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let s = VertexId(rng.gen_range(0..4));
            let f = standard_form(&g, s, &random_word(&g, &mut rng, s, 8)).unwrap();
            let h = standard_form(&g, f.end, &random_word(&g, &mut rng, f.end, 8)).unwrap();
            let k = standard_form(&g, h.end, &random_word(&g, &mut rng, h.end, 8)).unwrap();
            let left = compose(&compose(&f, &h).unwrap(), &k).unwrap();
            let right = compose(&f, &compose(&h, &k).unwrap()).unwrap();
            assert_eq!(left, right);
            assert_eq!(compose(&f, &Walk::identity(f.end)).unwrap(), f);
            assert_eq!(compose(&Walk::identity(f.start), &f).unwrap(), f);
            assert!(compose(&f, &invert(&f)).unwrap().is_identity());
            assert!(compose(&invert(&f), &f).unwrap().is_identity());
        }
        assert!(matches!(
            compose(&Walk::identity(VertexId(0)), &Walk::identity(VertexId(1))),
            Err(Error::EndpointMismatch { .. })
        ));
    }

    #[test]
    fn rotations_share_a_class() {
        let g = k4();
        let v0 = g.vertex_by_label("v0").unwrap();
        // triangle v0 -a- v1 -d- v2 -b- v0
        let w = Walk::from_word(&g, v0, &[e(&g, "a"), e(&g, "d"), e(&g, "b")]).unwrap();
        let c = ClosedWalkClass::new(&g, &w).unwrap();
        for k in 0..3 {
            assert_eq!(ClosedWalkClass::new(&g, &rotate(&g, &w, k)).unwrap(), c);
        }
        let r = c.reversed(&g);
        assert_ne!(r, c);
        assert_eq!(c.unoriented(&g), r.unoriented(&g));
    }

    #[test]
    fn two_edge_cycle_rotation() {
        let g = three_edge();
        let x = g.vertex_by_label("x").unwrap();
        let y = g.vertex_by_label("y").unwrap();
        let (e1, e2) = (e(&g, "eta1"), e(&g, "eta2"));
        let a = ClosedWalkClass::new(&g, &Walk::from_word(&g, x, &[e1, e2]).unwrap()).unwrap();
        let b = ClosedWalkClass::new(&g, &Walk::from_word(&g, y, &[e2, e1]).unwrap()).unwrap();
        assert_eq!(a, b);
        let c = ClosedWalkClass::new(&g, &Walk::from_word(&g, x, &[e2, e1]).unwrap()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn cyclic_reduction() {
        let g = three_edge();
        let u0 = g.vertex_by_label("u0").unwrap();
        let (a, e1, e2) = (e(&g, "alpha"), e(&g, "eta1"), e(&g, "eta2"));
        let w = Walk::from_word(&g, u0, &[a, e1, e2, a]).unwrap();
        let r = cyclic_reduce(&g, &w).unwrap();
        assert_eq!(r.edges, vec![e1, e2]);
        assert_eq!(r.start, g.vertex_by_label("x").unwrap());
        let back = Walk::from_word(&g, u0, &[a, e1, e1, a]).unwrap();
        assert_eq!(cyclic_reduce(&g, &back), Err(Error::Contractible));
    }

    #[test]
    fn parse_and_print() {
        let g = three_edge();
        let w = parse_walk(&g, "u0 alpha eta1 eta2 alpha").unwrap();
        assert_eq!(format_walk(&g, &w), "u0 alpha eta1 eta2 alpha");
        let w2 = parse_walk(&g, "alpha eta1").unwrap();
        assert_eq!(format_walk(&g, &w2), "u0 alpha eta1");
        assert!(parse_walk(&g, "u0 nope").is_err());
        assert!(parse_walk(&g, "").is_err());
        let id = parse_walk(&g, "x").unwrap();
        assert!(id.is_identity());
    }
}

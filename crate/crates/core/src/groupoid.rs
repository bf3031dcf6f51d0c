//! The orbifold fundamental groupoid of the leafy dual graph.
//!
//! Two walks with the same endpoints are orbifold-equal when they differ by
//! a product of conjugates of squares `c (η_{v,1} η_{v,2})^2 c⁻¹`. A walk lies
//! in that subgroup exactly when its kink-free normal form is the identity,
//! which turns every question here into a normalization.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::kinks::{self, Strategy};
use crate::ribbon::VertexId;
use crate::triangulation::LeafyDualGraph;
use crate::walks::{self, ClosedWalkClass, Walk};

fn nf(lg: &LeafyDualGraph, f: &Walk) -> Result<Walk> {
    kinks::normalize(lg, f, Strategy::default())
}

fn check_same_endpoints(lg: &LeafyDualGraph, f: &Walk, h: &Walk) -> Result<()> {
    let g = &lg.graph;
    if f.start != h.start {
        return Err(Error::EndpointMismatch {
            left: g.vertex_label(f.start).to_string(),
            right: g.vertex_label(h.start).to_string(),
        });
    }
    if f.end != h.end {
        return Err(Error::EndpointMismatch {
            left: g.vertex_label(f.end).to_string(),
            right: g.vertex_label(h.end).to_string(),
        });
    }
    Ok(())
}

/// The loop `c * (η_{v,1}, η_{v,2}) * c⁻¹` in standard form, where `c` runs
/// from `u` to the self-folded triangle with cluster index `v`.
pub fn loop_generator(lg: &LeafyDualGraph, u: VertexId, v: usize, c: &Walk) -> Result<Walk> {
    let g = &lg.graph;
    let cluster = lg
        .self_folded
        .get(v)
        .ok_or_else(|| Error::UnknownVertex(format!("self-folded #{v}")))?;
    if c.start != u || c.end != cluster.triangle {
        return Err(Error::EndpointMismatch {
            left: g.vertex_label(c.end).to_string(),
            right: g.vertex_label(cluster.triangle).to_string(),
        });
    }
    let around = Walk::from_word(g, cluster.triangle, &cluster.eta)?;
    walks::compose(&walks::compose(c, &around)?, &walks::invert(c))
}

/// Whether the walk is trivial in the orbifold groupoid.
pub fn is_trivial(lg: &LeafyDualGraph, f: &Walk) -> Result<bool> {
    Ok(nf(lg, f)?.is_identity())
}

/// Whether `f` and `h` (same endpoints) are equal in the orbifold groupoid.
pub fn orbifold_equal(lg: &LeafyDualGraph, f: &Walk, h: &Walk) -> Result<bool> {
    check_same_endpoints(lg, f, h)?;
    let q = walks::compose(&walks::invert(h), f)?;
    is_trivial(lg, &q)
}

/// Whether the loop `f` is a non-trivial element whose square is trivial.
pub fn is_order_two(lg: &LeafyDualGraph, f: &Walk) -> Result<bool> {
    if !f.is_closed() {
        let g = &lg.graph;
        return Err(Error::NotClosed {
            start: g.vertex_label(f.start).to_string(),
            end: g.vertex_label(f.end).to_string(),
        });
    }
    if is_trivial(lg, f)? {
        return Ok(false);
    }
    is_trivial(lg, &walks::compose(f, f)?)
}

/// The unique kink-free walk orbifold-equal to `f`.
///
/// Refused with [`Error::OrderTwoClass`] for loops of order two, where two
/// kink-free representatives exist (see [`order_two_representatives`]).
pub fn iota(lg: &LeafyDualGraph, f: &Walk) -> Result<Walk> {
    if f.is_closed() && !f.is_identity() && is_order_two(lg, f)? {
        return Err(Error::OrderTwoClass);
    }
    nf(lg, f)
}

/// Both kink-free representatives of an order-two class: the normal form
/// and its inverse.
pub fn order_two_representatives(lg: &LeafyDualGraph, f: &Walk) -> Result<(Walk, Walk)> {
    if !is_order_two(lg, f)? {
        return Err(Error::NotOrderTwo);
    }
    let n = nf(lg, f)?;
    let inv = walks::invert(&n);
    Ok((n, inv))
}

/// The kink-free closed class of `c`, identified with its reversal.
pub fn iota_free(lg: &LeafyDualGraph, c: &ClosedWalkClass) -> Result<ClosedWalkClass> {
    match kinks::normalize_closed(lg, c, Strategy::default())? {
        Some(k) => Ok(k.unoriented(&lg.graph)),
        None => Err(Error::Contractible),
    }
}

/// A walk between basepoints, viewed in the orbifold groupoid, with its
/// normal form computed once on demand.
#[derive(Debug)]
pub struct OrbifoldClass {
    representative: Walk,
    normal_form: OnceLock<Walk>,
}

impl Clone for OrbifoldClass {
    fn clone(&self) -> Self {
        let normal_form = OnceLock::new();
        if let Some(n) = self.normal_form.get() {
            let _ = normal_form.set(n.clone());
        }
        OrbifoldClass {
            representative: self.representative.clone(),
            normal_form,
        }
    }
}

impl OrbifoldClass {
    /// Wraps a standard-form walk whose endpoints are boundary-segment vertices.
    pub fn new(lg: &LeafyDualGraph, f: Walk) -> Result<OrbifoldClass> {
        for u in [f.start, f.end] {
            if !lg.is_basepoint(u) {
                return Err(Error::NotABasepoint(lg.graph.vertex_label(u).to_string()));
            }
        }
        if let Some(p) = f.first_backtrack() {
            return Err(Error::NotStandard(p));
        }
        Ok(OrbifoldClass {
            representative: f,
            normal_form: OnceLock::new(),
        })
    }

    pub fn representative(&self) -> &Walk {
        &self.representative
    }

    pub fn normal_form(&self, lg: &LeafyDualGraph) -> Result<&Walk> {
        if let Some(n) = self.normal_form.get() {
            return Ok(n);
        }
        let n = nf(lg, &self.representative)?;
        Ok(self.normal_form.get_or_init(|| n))
    }

    pub fn equals(&self, lg: &LeafyDualGraph, other: &OrbifoldClass) -> Result<bool> {
        check_same_endpoints(lg, &self.representative, &other.representative)?;
        Ok(self.normal_form(lg)? == other.normal_form(lg)?)
    }
}

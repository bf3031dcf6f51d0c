//! Built-in example triangulations.
//!
//! The annulus has one marked point on its inner boundary, three on its
//! outer boundary and three punctures, each enclosed by a self-folded
//! triangle. Its four reference walks run from the boundary segment `u0`
//! to the boundary segment `v0`.

use crate::document::parse_triangulation;
use crate::ribbon::{RibbonGraph, RibbonGraphBuilder};
use crate::triangulation::Triangulation;

pub const ANNULUS_JSON: &str = include_str!("../fixtures/annulus.json");

pub fn annulus() -> Triangulation {
    parse_triangulation(ANNULUS_JSON).expect("built-in annulus is valid")
}

/// Reference walks on the annulus, in the walk grammar.
pub const ANNULUS_F1: &str = "s:u0 b:u0 a:beta a:gamma a:delta a:epsilon a:kappa b:v0";
pub const ANNULUS_F2: &str =
    "s:u0 b:u0 a:beta a:gamma a:lambda eta1:v1 eta2:v1 a:lambda a:delta a:epsilon a:kappa b:v0";
pub const ANNULUS_F3: &str = "s:u0 b:u0 a:beta a:gamma a:lambda eta1:v1 eta2:v1 eta1:v1 eta2:v1 a:lambda a:delta a:epsilon a:kappa b:v0";
pub const ANNULUS_F4: &str =
    "s:u0 b:u0 a:beta a:gamma a:lambda eta2:v1 eta1:v1 a:lambda a:delta a:epsilon a:kappa b:v0";

/// A once-punctured disc with two marked points: one ordinary triangle
/// wrapped around one self-folded triangle.
pub const PUNCTURED_TRIANGLE_JSON: &str = r#"{
  "arcs": ["l", "r"],
  "boundary_segments": ["s1", "s2"],
  "triangles": [
    {"name": "T", "sides": ["l", "bd:s1", "bd:s2"]},
    {"name": "v", "self_folded": {"loop": "l", "radius": "r"}}
  ]
}"#;

pub fn punctured_triangle() -> Triangulation {
    parse_triangulation(PUNCTURED_TRIANGLE_JSON).expect("built-in triangle is valid")
}

/// The three-edge graph: `u0 -alpha- x`, plus two parallel edges `eta1`,
/// `eta2` from `x` to `y`. Its loops at `u0` form an infinite cyclic group.
pub fn three_edge_graph() -> RibbonGraph {
    let mut b = RibbonGraphBuilder::new();
    let u0 = b.add_vertex("u0");
    let x = b.add_vertex("x");
    let y = b.add_vertex("y");
    b.add_edge("alpha", u0, x);
    b.add_edge("eta1", x, y);
    b.add_edge("eta2", x, y);
    b.build().expect("three-edge graph is valid")
}

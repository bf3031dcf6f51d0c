//! JSON encoding of triangulations.
//!
//! ```json
//! {
//!   "arcs": ["x"],
//!   "boundary_segments": ["s1", "s2"],
//!   "triangles": [
//!     {"name": "T", "sides": ["x", "bd:s1", "bd:s2"]},
//!     {"name": "v", "self_folded": {"loop": "x", "radius": "r"}}
//!   ]
//! }
//! ```
//!
//! Sides name arcs by bare label and boundary segments as `bd:<label>`,
//! listed in clockwise order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::triangulation::{Side, Triangle, Triangulation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangulationDocument {
    pub arcs: Vec<String>,
    pub boundary_segments: Vec<String>,
    pub triangles: Vec<TriangleEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TriangleEntry {
    Ordinary {
        name: String,
        sides: [String; 3],
    },
    SelfFolded {
        name: String,
        self_folded: SelfFoldedEntry,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelfFoldedEntry {
    #[serde(rename = "loop")]
    pub loop_arc: String,
    pub radius: String,
}

fn parse_side(s: &str) -> Side {
    match s.strip_prefix("bd:") {
        Some(seg) => Side::Segment(seg.to_string()),
        None => Side::Arc(s.to_string()),
    }
}

impl TriangulationDocument {
    pub fn from_json(text: &str) -> Result<TriangulationDocument> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    /// The triangulation described, without validating it.
    pub fn to_triangulation_unchecked(&self) -> Triangulation {
        let triangles = self
            .triangles
            .iter()
            .map(|t| match t {
                TriangleEntry::Ordinary { name, sides } => Triangle::Ordinary {
                    name: name.clone(),
                    sides: [
                        parse_side(&sides[0]),
                        parse_side(&sides[1]),
                        parse_side(&sides[2]),
                    ],
                },
                TriangleEntry::SelfFolded { name, self_folded } => Triangle::SelfFolded {
                    name: name.clone(),
                    loop_arc: self_folded.loop_arc.clone(),
                    radius_arc: self_folded.radius.clone(),
                },
            })
            .collect();
        Triangulation {
            arcs: self.arcs.clone(),
            boundary_segments: self.boundary_segments.clone(),
            triangles,
        }
    }

    /// The triangulation described; fails unless it is valid.
    pub fn to_triangulation(&self) -> Result<Triangulation> {
        let t = self.to_triangulation_unchecked();
        Triangulation::new(t.arcs, t.boundary_segments, t.triangles)
    }

    pub fn from_triangulation(t: &Triangulation) -> TriangulationDocument {
        let triangles = t
            .triangles
            .iter()
            .map(|tr| match tr {
                Triangle::Ordinary { name, sides } => TriangleEntry::Ordinary {
                    name: name.clone(),
                    sides: [sides[0].to_string(), sides[1].to_string(), sides[2].to_string()],
                },
                Triangle::SelfFolded {
                    name,
                    loop_arc,
                    radius_arc,
                } => TriangleEntry::SelfFolded {
                    name: name.clone(),
                    self_folded: SelfFoldedEntry {
                        loop_arc: loop_arc.clone(),
                        radius: radius_arc.clone(),
                    },
                },
            })
            .collect();
        TriangulationDocument {
            arcs: t.arcs.clone(),
            boundary_segments: t.boundary_segments.clone(),
            triangles,
        }
    }
}

/// Parses and validates a triangulation document.
pub fn parse_triangulation(text: &str) -> Result<Triangulation> {
    TriangulationDocument::from_json(text)?.to_triangulation()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = include_str!("../fixtures/annulus.json");
        let doc = TriangulationDocument::from_json(text).unwrap();
        let t = doc.to_triangulation().unwrap();
        let back = TriangulationDocument::from_triangulation(&t);
        assert_eq!(back, doc);
        let again = TriangulationDocument::from_json(&back.to_json()).unwrap();
        assert_eq!(again, doc);
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(
            TriangulationDocument::from_json("{\"arcs\": ["),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            TriangulationDocument::from_json("{\"arcs\": [], \"boundary_segments\": [], \"triangles\": [{\"name\": \"T\"}]}"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn duplicate_labels_rejected() {
        let text = r#"{"arcs": [], "boundary_segments": ["a", "a", "b"],
            "triangles": [{"name": "T", "sides": ["bd:a", "bd:b", "bd:a"]}]}"#;
        assert!(matches!(
            parse_triangulation(text),
            Err(Error::InvalidTriangulation(_))
        ));
    }
}
